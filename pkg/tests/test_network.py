"""
Unit tests for the temporal network model.

These tests verify:
1. Capacity arithmetic with the INFINITE sentinel and overflow checks
2. Piecewise-constant evaluation, window sums and canonicalisation
   (idempotence and exhaustive window sums on seeded functions)
3. Structural validation of networks (duplicate edges, self-loops, ...)
4. The canonical JSON format: parsing, field-named errors, dumping

Usage:
    pytest tests/test_network.py -v
"""
import json
import logging
import random

import numpy as np
import pytest

from tests.conftest import make_network
from tempoflow.errors import (
    ArithmeticOverflow,
    DuplicateEdge,
    MalformedPieces,
    NegativeValue,
    NetworkFormatError,
    SelfLoop,
    SourceEqualsSink,
    UnknownNode,
)
from tempoflow.network import (
    INFINITE,
    MAX_INT,
    PiecewiseConstant,
    capacity_to_json,
    change_times,
    checked_add,
    checked_mul,
    dump_network,
    load_network,
    network_to_dict,
    pc_eval,
    pc_sum_over_window,
    validate_network,
)


def network_doc(**overrides):
    doc = {
        "nodes": ["s", "a", "d"],
        "source": "s",
        "sink": "d",
        "tau": 1,
        "edges": [
            {"from": "s", "to": "a", "capacity": [{"from_time": 0, "value": 5}]},
            {"from": "a", "to": "d", "capacity": [{"from_time": 0, "value": 2}, {"from_time": 4, "value": 7}]},
        ],
    }
    doc.update(overrides)
    return doc


class TestCapacityArithmetic:
    """Test extended integer arithmetic."""

    def test_infinite_absorbs_addition(self):
        """INFINITE plus anything is INFINITE."""
        assert checked_add(INFINITE, 3) is INFINITE
        assert checked_add(3, INFINITE) is INFINITE

    def test_infinite_is_larger_than_every_integer(self):
        """INFINITE compares above any finite value."""
        assert INFINITE > MAX_INT
        assert 5 < INFINITE
        assert not INFINITE < 10**30

    def test_overflow_is_detected(self):
        """Sums and products beyond 64 bits raise."""
        with pytest.raises(ArithmeticOverflow):
            checked_add(MAX_INT, 1)
        with pytest.raises(ArithmeticOverflow):
            checked_mul(2**40, 2**40)

    def test_json_rendering(self):
        """INFINITE prints as "inf", integers stay integers."""
        assert capacity_to_json(INFINITE) == "inf"
        assert capacity_to_json(12) == 12


class TestPiecewiseConstant:
    """Test piecewise-constant capacity functions."""

    def test_value_at(self):
        """Evaluation picks the piece covering t, the last piece extends forever."""
        f, _ = PiecewiseConstant.canonical([(0, 2), (3, 5)])
        assert pc_eval(f, 0) == 2
        assert pc_eval(f, 2) == 2
        assert pc_eval(f, 3) == 5
        assert pc_eval(f, 1000) == 5

    def test_negative_time_rejected(self):
        """Capacity functions are undefined before 0."""
        with pytest.raises(ValueError):
            PiecewiseConstant.constant(1).value_at(-1)

    def test_sum_over_window_spans_pieces(self):
        """[1, 4] covers two steps of each piece."""
        f, _ = PiecewiseConstant.canonical([(0, 2), (3, 5)])
        assert pc_sum_over_window(f, 1, 4) == 2 + 2 + 5 + 5

    def test_empty_window_sums_to_zero(self):
        """lo = hi + 1 is the empty window."""
        f = PiecewiseConstant.constant(9)
        assert pc_sum_over_window(f, 5, 4) == 0

    def test_sum_matches_pointwise(self):
        """Window sums agree with summing evaluations."""
        f, _ = PiecewiseConstant.canonical([(0, 1), (2, 0), (5, 4), (9, 3)])
        for lo in range(0, 12):
            for hi in range(lo - 1, 14):
                assert pc_sum_over_window(f, lo, hi) == sum(f.value_at(t) for t in range(lo, hi + 1))

    def test_canonical_merges_equal_neighbours(self):
        """Adjacent equal values collapse into one piece and flag the repair."""
        f, repaired = PiecewiseConstant.canonical([(0, 5), (3, 5), (6, 2)])
        assert repaired
        assert f.to_list() == [{"from_time": 0, "value": 5}, {"from_time": 6, "value": 2}]

    def test_change_times_are_later_piece_starts(self):
        """Every piece after the first marks a change."""
        f, _ = PiecewiseConstant.canonical([(0, 1), (4, 0), (7, 2)])
        assert change_times(f) == [4, 7]
        assert change_times(PiecewiseConstant.constant(3)) == []

    @pytest.mark.parametrize(
        "pairs",
        [[], [(1, 3)], [(0, 1), (0, 2)], [(0, 1), (5, 2), (4, 3)]],
    )
    def test_malformed_pieces(self, pairs):
        """Empty lists, late starts and unordered starts cannot be repaired."""
        with pytest.raises(MalformedPieces):
            PiecewiseConstant.canonical(pairs)


def random_pairs(rng: random.Random, max_pieces: int = 5, last_start: int = 100):
    """Raw (from_time, value) pairs, possibly with equal neighbours."""
    count = rng.randint(1, max_pieces)
    starts = [0] + sorted(rng.sample(range(1, last_start + 1), count - 1))
    return [(t, rng.randint(0, 3)) for t in starts]


def step_value(pairs, t: int) -> int:
    return [value for start, value in pairs if start <= t][-1]


class TestPiecewiseProperties:
    """Properties of canonical pieces over many seeded functions."""

    def test_canonical_idempotent_and_pointwise(self):
        """Canonicalising twice changes nothing; values match the raw pieces."""
        rng = random.Random(17)
        for _ in range(200):
            pairs = random_pairs(rng)
            f, _ = PiecewiseConstant.canonical(pairs)
            again, repaired = PiecewiseConstant.canonical([(p.from_time, p.value) for p in f.pieces])
            assert again == f
            assert not repaired
            for t in range(0, 106):
                assert pc_eval(f, t) == step_value(pairs, t)

    def test_window_sums_exhaustive(self):
        """Every window 0 <= lo <= hi <= 100 sums like the pointwise values."""
        rng = random.Random(23)
        for _ in range(30):
            f, _ = PiecewiseConstant.canonical(random_pairs(rng))
            prefix = np.concatenate(([0], np.cumsum([f.value_at(t) for t in range(101)])))
            for lo in range(101):
                for hi in range(lo, 101):
                    assert pc_sum_over_window(f, lo, hi) == prefix[hi + 1] - prefix[lo]


class TestTemporalNetwork:
    """Test structural validation of hand-built networks."""

    def test_sizes(self):
        """n, m, mu and U are reported from the edges."""
        net = make_network(["s", "a", "d"], [("s", "a", [(0, 1), (2, 6)]), ("a", "d", 4)])
        assert (net.n, net.m, net.mu, net.max_capacity) == (3, 2, 3, 6)

    def test_duplicate_edge(self):
        """Parallel edges are rejected."""
        with pytest.raises(DuplicateEdge):
            make_network(["s", "d"], [("s", "d", 1), ("s", "d", 2)])

    def test_self_loop(self):
        """Self-loops are rejected."""
        with pytest.raises(SelfLoop):
            make_network(["s", "a", "d"], [("a", "a", 1)])

    def test_source_equals_sink(self):
        """Source and sink must differ."""
        with pytest.raises(SourceEqualsSink):
            make_network(["s", "d"], [], source="s", sink="s")

    def test_unknown_endpoint(self):
        """Edges may only join declared nodes."""
        with pytest.raises(UnknownNode):
            make_network(["s", "d"], [("s", "x", 1)])

    def test_lengths_and_uniformity(self, two_length_network):
        """Per-edge lengths make the network non-uniform."""
        assert two_length_network.lengths == {1, 2}
        assert not two_length_network.is_uniform
        uniform = make_network(["s", "d"], [("s", "d", 1, 1)], tau=1)
        assert uniform.is_uniform

    def test_adjacency(self, path_network):
        """Out- and in-edges are indexed by node."""
        assert [e.head for e in path_network.out_edges("s")] == ["a"]
        assert [e.tail for e in path_network.in_edges("d")] == ["a"]
        assert path_network.edge("a", "d") is not None
        assert path_network.edge("d", "a") is None


class TestValidateNetwork:
    """Test parsing of the canonical JSON format."""

    def test_valid_document(self):
        """A well-formed document parses into the canonical network."""
        net = validate_network(network_doc())
        assert net.nodes == ("s", "a", "d")
        assert net.edge("a", "d").capacity.value_at(5) == 7
        assert not net.repaired

    def test_repair_is_flagged_and_logged(self, caplog):
        """Equal neighbouring pieces are merged with a warning."""
        doc = network_doc()
        doc["edges"][0]["capacity"] = [{"from_time": 0, "value": 5}, {"from_time": 2, "value": 5}]
        with caplog.at_level(logging.WARNING, logger="tempoflow"):
            net = validate_network(doc)
        assert net.repaired
        assert len(net.edge("s", "a").capacity) == 1
        assert "[NETWORK]" in caplog.text

    def test_string_infinity_rejected(self):
        """Input capacities are finite integers."""
        doc = network_doc()
        doc["edges"][0]["capacity"][0]["value"] = "inf"
        with pytest.raises(NetworkFormatError) as exc:
            validate_network(doc)
        assert exc.value.field.startswith("edges.0.capacity.0.value")

    def test_unknown_field_rejected(self):
        """Extra top-level fields are an error."""
        with pytest.raises(NetworkFormatError):
            validate_network(network_doc(horizon=4))

    def test_negative_tau(self):
        """tau < 0 names the tau field."""
        with pytest.raises(NegativeValue) as exc:
            validate_network(network_doc(tau=-1))
        assert exc.value.field == "tau"

    def test_negative_capacity(self):
        """A negative piece value names the piece."""
        doc = network_doc()
        doc["edges"][1]["capacity"][1]["value"] = -3
        with pytest.raises(NegativeValue) as exc:
            validate_network(doc)
        assert exc.value.field == "edges[1].capacity[1].value"

    def test_late_first_piece(self):
        """The first piece must start at 0."""
        doc = network_doc()
        doc["edges"][0]["capacity"] = [{"from_time": 2, "value": 5}]
        with pytest.raises(MalformedPieces) as exc:
            validate_network(doc)
        assert exc.value.field == "edges[0].capacity"


class TestNetworkFiles:
    """Test reading and writing network files."""

    def test_dump_then_load(self, tmp_path, two_length_network):
        """A dumped network loads back equal, lengths included."""
        path = tmp_path / "net.json"
        path.write_text(dump_network(two_length_network))
        assert load_network(path) == two_length_network

    def test_length_emitted_only_when_different(self, two_length_network):
        """Edges of length tau carry no length field."""
        edges = network_to_dict(two_length_network)["edges"]
        assert edges[0]["length"] == 2
        assert "length" not in edges[1]

    def test_missing_file(self, tmp_path):
        """Unreadable files are a format error on the input."""
        with pytest.raises(NetworkFormatError) as exc:
            load_network(tmp_path / "absent.json")
        assert exc.value.field == "input"

    def test_invalid_json(self, tmp_path):
        """Non-JSON content is a format error on the input."""
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(NetworkFormatError):
            load_network(path)

    def test_dump_is_valid_json(self, path_network):
        """dump_network produces the canonical document."""
        doc = json.loads(dump_network(path_network))
        assert list(doc) == ["nodes", "source", "sink", "tau", "edges"]
        assert doc["edges"][0] == {"from": "s", "to": "a", "capacity": [{"from_time": 0, "value": 5}]}
