# Tests for tempoflow
