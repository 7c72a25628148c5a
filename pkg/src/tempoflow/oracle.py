"""
Brute-force ground truth for the cTEN pipeline.

- FlowOverTime / validate_flow: edge flows per time step, checked against
  capacity, non-negative holding and zero net flow at interior nodes
- ten_flow_to_temporal / ten_cut_capacity: read flows and cuts off a full TEN
- enumerate_min_cuts: every minimum cut function of a tiny instance
- gen_random_network / random_corpus: seeded instance generation
- run_checks: the per-instance verification suite used by ``verify``
"""

import itertools
import logging
import random
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .config import get_settings
from .critical import CriticalTimeSet, critical_times
from .cuts import CutFunction, cut_cost, normalize_with_trace
from .errors import (
    BudgetExceeded,
    CapacityViolated,
    InfeasibleParameters,
    NegativeHolding,
    NonZeroNetFlow,
    TempoflowError,
)
from .expand import ArcKind, StaticFlowNetwork, build_cten, build_ten, cten_size_report
from .maxflow import FlowResult, extract_cut_function, max_flow, min_cut, solve_cten
from .network import (
    Capacity,
    Edge,
    PiecewiseConstant,
    TemporalNetwork,
    capacity_to_json,
    checked_add,
    checked_mul,
)

logger = logging.getLogger(__name__)


# ============================================================================
# Flows over time
# ============================================================================


@dataclass
class FlowOverTime:
    """f[k, t]: flow departing on edge k (network edge order) at time t, t in [0, T]."""

    edges: Tuple[Tuple[str, str], ...]
    horizon: int
    table: np.ndarray

    @classmethod
    def zeros(cls, network: TemporalNetwork, horizon: int) -> "FlowOverTime":
        table = np.zeros((network.m, horizon + 1), dtype=np.int64)
        return cls(tuple(e.key for e in network.edges), horizon, table)

    def _row(self, edge: Tuple[str, str]) -> int:
        return self.edges.index(tuple(edge))

    def set(self, edge: Tuple[str, str], t: int, value: int) -> None:
        self.table[self._row(edge), t] = value

    def to_dict(self) -> Dict[str, List[int]]:
        return {f"{tail}->{head}": [int(x) for x in row] for (tail, head), row in zip(self.edges, self.table)}


def capacity_table(network: TemporalNetwork, horizon: int) -> np.ndarray:
    """u[k, t] for every edge k and t in [0, T], filled piece by piece."""
    table = np.zeros((network.m, horizon + 1), dtype=np.int64)
    for k, edge in enumerate(network.edges):
        pieces = edge.capacity.pieces
        for p, piece in enumerate(pieces):
            end = pieces[p + 1].from_time if p + 1 < len(pieces) else horizon + 1
            if piece.from_time <= horizon:
                table[k, piece.from_time:min(end, horizon + 1)] = piece.value
    return table


def validate_flow(network: TemporalNetwork, horizon: int, flow: FlowOverTime) -> int:
    """
    Check a flow over time and return its value (net inflow at the sink by T).

    Holding at i by time t is: arrivals on in-edges departed by t - L,
    minus departures on out-edges by t.

    Raises:
        CapacityViolated: first (edge, t) with f > u or f < 0
        NegativeHolding: first (t, node) other than the source with negative holding
        NonZeroNetFlow: first interior node with non-zero holding at T
    """
    if network.m and horizon >= 0:
        checked_mul(max(network.max_capacity, 1), checked_mul(horizon + 1, network.m))

    capacities = capacity_table(network, horizon)
    over = np.argwhere((flow.table > capacities) | (flow.table < 0))
    if len(over):
        k, t = (int(x) for x in over[0])
        raise CapacityViolated(network.edges[k].key, t)

    departed = np.cumsum(flow.table, axis=1)
    holding = np.zeros((network.n, horizon + 1), dtype=np.int64)
    index = network.index
    for k, edge in enumerate(network.edges):
        length = network.length_of(edge)
        holding[index[edge.tail]] -= departed[k]
        if length <= horizon:
            holding[index[edge.head], length:] += departed[k, : horizon + 1 - length]

    check = holding.copy()
    check[index[network.source]] = 0
    negative = np.argwhere(check.T < 0)
    if len(negative):
        t, i = (int(x) for x in negative[0])
        raise NegativeHolding(network.nodes[i], t)

    for i, name in enumerate(network.nodes):
        if name in (network.source, network.sink):
            continue
        if holding[i, horizon] != 0:
            raise NonZeroNetFlow(name, int(holding[i, horizon]))

    return int(holding[index[network.sink], horizon])


def ten_flow_to_temporal(
    network: TemporalNetwork, horizon: int, ten: StaticFlowNetwork, result: FlowResult
) -> FlowOverTime:
    """Read f_ij(t) off the transmission arcs of a TEN flow."""
    flow = FlowOverTime.zeros(network, horizon)
    rows = {key: k for k, key in enumerate(flow.edges)}
    for arc, amount in zip(ten.arcs, result.arc_flows):
        if arc.kind == ArcKind.TRANSMISSION and amount:
            t = ten.nodes[arc.tail][1]
            flow.table[rows[arc.edge], t] += amount
    return flow


def ten_cut_capacity(ten: StaticFlowNetwork, phi: CutFunction) -> Capacity:
    """Capacity of the cut phi, summed arc by arc over a built TEN."""
    total: Capacity = 0
    for arc in ten.arcs:
        (tail, t), (head, t2) = ten.nodes[arc.tail], ten.nodes[arc.head]
        if t >= phi[tail] and t2 < phi[head]:
            total = checked_add(total, arc.capacity)
    return total


# ============================================================================
# Exhaustive cut enumeration
# ============================================================================


def enumerate_min_cuts(
    network: TemporalNetwork, horizon: int, budget: Optional[int] = None
) -> List[CutFunction]:
    """
    Every cut function of minimum cost, interior nodes ranging over [0, T+1].

    Raises:
        BudgetExceeded: if (T+2)^(n-2) exceeds the enumeration budget
    """
    limit = budget if budget is not None else get_settings().enumeration_budget
    interior = [v for v in network.nodes if v not in (network.source, network.sink)]
    combinations = (horizon + 2) ** len(interior)
    if combinations > limit:
        raise BudgetExceeded(
            f"enumerating {combinations} cut functions exceeds the budget {limit}",
            field="enumeration_budget",
        )

    best: Optional[Capacity] = None
    minimizers: List[CutFunction] = []
    for values in itertools.product(range(horizon + 2), repeat=len(interior)):
        assignment = {network.source: 0, network.sink: horizon + 1}
        assignment.update(zip(interior, values))
        phi = CutFunction({v: assignment[v] for v in network.nodes}, horizon)
        cost = cut_cost(network, horizon, phi)
        if best is None or cost < best:
            best = cost
            minimizers = [phi]
        elif cost == best:
            minimizers.append(phi)

    logger.debug(
        f"[ORACLE] Enumerated {combinations} cut functions: min cost {capacity_to_json(best)}, "
        f"{len(minimizers)} minimizers"
    )
    return minimizers


# ============================================================================
# Instance generation
# ============================================================================


def _random_capacity(rng: random.Random, pieces: int, max_capacity: int, horizon: int, positive: bool) -> PiecewiseConstant:
    starts = [0] + sorted(rng.sample(range(1, horizon + 1), pieces - 1))
    values = [rng.randint(0, max_capacity) for _ in starts]
    if positive and max_capacity > 0:
        values[rng.randrange(len(values))] = rng.randint(1, max_capacity)
    capacity, _ = PiecewiseConstant.canonical(list(zip(starts, values)))
    return capacity


def gen_random_network(
    seed: int,
    n: int,
    m: int,
    mu_per_edge: int,
    max_capacity: int,
    tau: int,
    horizon: int,
    lengths: Optional[Sequence[int]] = None,
    path_probability: float = 0.75,
) -> TemporalNetwork:
    """
    Deterministic random temporal network.

    Nodes are "s", "v1", ..., "d". With probability ``path_probability`` the
    first edges form an s -> ... -> d path through random interior nodes,
    each with some positive capacity; remaining edges are drawn uniformly
    from the unused ordered pairs.

    Args:
        seed: Random seed; equal seeds give identical networks
        n: Node count (>= 2)
        m: Edge count (<= n(n-1))
        mu_per_edge: Pieces per capacity function before merging (<= T+1)
        max_capacity: U, the largest capacity value
        tau: Uniform edge length
        horizon: T; piece boundaries fall in [1, T]
        lengths: Optional choices for per-edge lengths

    Returns:
        A canonical TemporalNetwork
    """
    if n < 2:
        raise InfeasibleParameters(f"need at least 2 nodes, got {n}", field="nodes")
    if m < 0 or m > n * (n - 1):
        raise InfeasibleParameters(f"{m} edges do not fit a simple digraph on {n} nodes", field="edges")
    if mu_per_edge < 1 or mu_per_edge > horizon + 1:
        raise InfeasibleParameters(f"{mu_per_edge} pieces do not fit in [0, {horizon}]", field="pieces")
    if max_capacity < 0 or tau < 0 or horizon < 0:
        raise InfeasibleParameters("capacity, tau and horizon must be non-negative", field="max_capacity")

    rng = random.Random(seed)
    nodes = ["s"] + [f"v{k}" for k in range(1, n - 1)] + ["d"]

    pairs: List[Tuple[str, str]] = []
    if m > 0 and rng.random() < path_probability:
        interior = nodes[1:-1]
        hops = rng.randint(0, min(len(interior), m - 1))
        route = ["s"] + rng.sample(interior, hops) + ["d"]
        pairs.extend(zip(route, route[1:]))
    path_edges = set(pairs)
    unused = [(u, v) for u in nodes for v in nodes if u != v and (u, v) not in path_edges]
    pairs.extend(rng.sample(unused, m - len(pairs)))

    edges = []
    for tail, head in pairs:
        capacity = _random_capacity(rng, mu_per_edge, max_capacity, horizon, (tail, head) in path_edges)
        length = rng.choice(list(lengths)) if lengths else None
        edges.append(Edge(tail, head, capacity, None if length == tau else length))

    return TemporalNetwork(nodes=tuple(nodes), edges=tuple(edges), tau=tau, source="s", sink="d")


@dataclass
class CorpusInstance:
    """One seeded instance: the network and the horizon to query it at."""

    index: int
    seed: int
    network: TemporalNetwork
    horizon: int


def random_corpus(
    seed: int,
    count: int,
    nodes: Tuple[int, int] = (2, 6),
    max_edges: int = 10,
    taus: Sequence[int] = (0, 1, 2, 3),
    horizons: Tuple[int, int] = (1, 40),
    pieces: Tuple[int, int] = (1, 4),
    max_capacity: int = 8,
    lengths: Optional[Sequence[int]] = None,
) -> Iterator[CorpusInstance]:
    """
    A seeded stream of instances within the given parameter ranges.

    With ``lengths``, tau is the smallest length and each edge draws its own.
    """
    rng = random.Random(seed)
    for index in range(count):
        n = rng.randint(*nodes)
        m = rng.randint(0, min(max_edges, n * (n - 1)))
        horizon = rng.randint(*horizons)
        mu = rng.randint(pieces[0], min(pieces[1], horizon + 1))
        tau = min(lengths) if lengths else rng.choice(list(taus))
        capacity = rng.randint(1, max_capacity)
        instance_seed = rng.randrange(2**32)
        network = gen_random_network(instance_seed, n, m, mu, capacity, tau, horizon, lengths=lengths)
        yield CorpusInstance(index=index, seed=instance_seed, network=network, horizon=horizon)


# ============================================================================
# Verification suite
# ============================================================================


@dataclass
class CheckResult:
    """Outcome of one named check on one instance."""

    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


CHECK_NAMES = ("equivalence", "round_trip", "size_bounds", "degenerate_identity", "normalization", "cten_cut")


def _arc_signature(net: StaticFlowNetwork) -> List[tuple]:
    return [(net.nodes[a.tail], net.nodes[a.head], a.capacity, a.kind) for a in net.arcs]


def run_checks(network: TemporalNetwork, horizon: int, budget: Optional[int] = None) -> List[CheckResult]:
    """
    Run the verification suite on one instance.

    Checks that need the full TEN fail with the budget message when it does
    not fit.
    """
    results: Dict[str, CheckResult] = {}

    def record(name: str, check) -> None:
        try:
            passed, detail = check()
        except TempoflowError as e:
            passed, detail = False, f"{e.code}: {e.message}"
        results[name] = CheckResult(name, passed, detail)

    crit = critical_times(network, horizon)
    cten = solve_cten(network, horizon, with_cut=True)

    def size_bounds():
        report = cten_size_report(cten.net, network, crit)
        if network.is_uniform:
            limit = (2 * network.n + 1) * (network.mu + 3)
            if len(crit) > limit:
                return False, f"|A|={len(crit)} exceeds (2n+1)(mu+3)={limit}"
        return True, f"|A|={report.interval_count}, arcs={report.total_arcs}/{report.max_total_arcs}"

    record("size_bounds", size_bounds)

    try:
        ten = build_ten(network, horizon, node_budget=budget)
    except BudgetExceeded as e:
        for name in CHECK_NAMES:
            if name not in results:
                results[name] = CheckResult(name, False, f"{e.code}: {e.message}")
        return [results[name] for name in CHECK_NAMES]

    ten_flow = max_flow(ten)

    def equivalence():
        ok = ten_flow.value == cten.value
        return ok, f"cten={capacity_to_json(cten.value)} ten={capacity_to_json(ten_flow.value)}"

    def round_trip():
        value = validate_flow(network, horizon, ten_flow_to_temporal(network, horizon, ten, ten_flow))
        return value == ten_flow.value, f"flow over time value {value}"

    def degenerate_identity():
        full = build_cten(network, CriticalTimeSet.full(horizon), horizon)
        same = full.nodes == ten.nodes and _arc_signature(full) == _arc_signature(ten)
        return same, f"{len(full.arcs)} arcs vs {len(ten.arcs)}"

    def normalization():
        limit = network.n * (horizon + 1)
        shifts = []
        for largest in (False, True):
            phi = extract_cut_function(min_cut(ten, ten_flow, largest=largest), ten)
            trace = normalize_with_trace(network, horizon, phi)
            if trace.cost != ten_flow.value or trace.iterations > limit:
                return False, f"{trace.iterations} shifts, cost {capacity_to_json(trace.cost)}"
            shifts.append(trace.iterations)
        return True, f"{shifts[0]}+{shifts[1]} shifts, cost {capacity_to_json(ten_flow.value)}"

    def cten_cut():
        phi = cten.cut_function
        if phi is None:
            return False, "cTEN min cut is INFINITE"
        cost = cut_cost(network, horizon, phi)
        enumerated = ten_cut_capacity(ten, phi)
        ok = cost == enumerated == ten_flow.value
        return ok, f"cut cost {capacity_to_json(cost)}, TEN arcs {capacity_to_json(enumerated)}"

    record("equivalence", equivalence)
    record("round_trip", round_trip)
    record("degenerate_identity", degenerate_identity)
    record("normalization", normalization)
    record("cten_cut", cten_cut)

    failed = [r.name for r in results.values() if not r.passed]
    if failed:
        logger.warning(f"[ORACLE] Checks failed at T={horizon}: {', '.join(failed)}")
    return [results[name] for name in CHECK_NAMES]
