"""
Pytest fixtures for tempoflow tests.
"""
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import pytest
from dotenv import load_dotenv

# Ensure src/ is on sys.path so tests can import tempoflow.
ROOT = Path(__file__).resolve().parent.parent
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

# Load environment variables
load_dotenv()

from tempoflow.config import get_settings  # noqa: E402
from tempoflow.network import Edge, PiecewiseConstant, TemporalNetwork  # noqa: E402
from tempoflow.oracle import random_corpus  # noqa: E402


# ============================================================================
# Network builders
# ============================================================================


def make_network(
    nodes: Sequence[str],
    edges: List[tuple],
    tau: int = 1,
    source: str = "s",
    sink: str = "d",
) -> TemporalNetwork:
    """
    Build a network from (tail, head, capacity[, length]) tuples.

    ``capacity`` is either a constant or a list of (from_time, value) pairs.
    """
    built = []
    for spec in edges:
        tail, head, capacity = spec[:3]
        length: Optional[int] = spec[3] if len(spec) > 3 else None
        if isinstance(capacity, int):
            function = PiecewiseConstant.constant(capacity)
        else:
            function, _ = PiecewiseConstant.canonical(list(capacity))
        built.append(Edge(tail, head, function, length))
    return TemporalNetwork(nodes=tuple(nodes), edges=tuple(built), tau=tau, source=source, sink=sink)


def window(start: int, value: int) -> List[Tuple[int, int]]:
    """Capacity ``value`` during the single step ``start``, zero otherwise."""
    if start == 0:
        return [(0, value), (1, 0)]
    return [(0, 0), (start, value), (start + 1, 0)]


# ============================================================================
# Hand-built instances
# ============================================================================


@pytest.fixture
def path_network() -> TemporalNetwork:
    """s -> a -> d, tau = 1, both capacities constantly 5."""
    return make_network(["s", "a", "d"], [("s", "a", 5), ("a", "d", 5)])


@pytest.fixture
def single_edge_network() -> TemporalNetwork:
    """s -> d, tau = 1, capacity constantly 3."""
    return make_network(["s", "d"], [("s", "d", 3)])


@pytest.fixture
def chain_network() -> TemporalNetwork:
    """
    s -> a -> b -> c -> d, tau = 1, each edge open for one step only.

    Flow leaving s at t=1 reaches a at t=2, after a -> b has closed, so by
    T=4 nothing gets through. Coarse intervals that merge steps 1..3 hide
    the mismatch.
    """
    return make_network(
        ["s", "a", "b", "c", "d"],
        [
            ("s", "a", window(1, 5)),
            ("a", "b", window(1, 5)),
            ("b", "c", window(2, 5)),
            ("c", "d", window(3, 5)),
        ],
    )


@pytest.fixture
def two_length_network() -> TemporalNetwork:
    """s -> a (length 2) -> d (length 1) plus a direct s -> d of length 2."""
    return make_network(
        ["s", "a", "d"],
        [("s", "a", [(0, 4), (3, 1)], 2), ("a", "d", 3), ("s", "d", [(0, 0), (2, 2)], 2)],
        tau=1,
    )


# ============================================================================
# Seeded corpora
# ============================================================================


@pytest.fixture(scope="session")
def small_corpus():
    """40 seeded instances in the default ranges."""
    return list(random_corpus(seed=7, count=40))


@pytest.fixture(scope="session")
def tiny_corpus():
    """Instances small enough for exhaustive cut enumeration (n <= 4, T <= 8)."""
    return list(random_corpus(seed=11, count=30, nodes=(2, 4), max_edges=6, horizons=(1, 8), pieces=(1, 3)))


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Each test reads settings from its own environment."""
    for name in (
        "TEMPOFLOW_BUDGET",
        "TEMPOFLOW_ENUMERATION_BUDGET",
        "TEMPOFLOW_MAX_DISTINCT_LENGTHS",
        "TEMPOFLOW_VERIFY_WORKERS",
        "TEMPOFLOW_LOG_LEVEL",
        "TEMPOFLOW_LOG_CONFIG",
    ):
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
