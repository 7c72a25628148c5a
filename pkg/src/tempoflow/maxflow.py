"""
Steady-state max flow and min cut on expanded networks.

Dinic's algorithm on a paired residual array: arc k of the network is
residual edge 2k, its reverse is 2k+1, so ``e ^ 1`` flips direction.
INFINITE arcs are replaced by a bound B = 1 + sum of all finite
capacities; a flow value that reaches B can only pass through an
all-INFINITE path and is reported as INFINITE.
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Set

from .critical import CriticalTimeSet, critical_times
from .cuts import CutFunction
from .errors import DualityViolation, InvalidCutFunction, NotMonotone, SourceEqualsSink
from .expand import StaticFlowNetwork, build_cten
from .network import INFINITE, Capacity, TemporalNetwork, capacity_to_json, checked_add, is_infinite

logger = logging.getLogger(__name__)


@dataclass
class FlowResult:
    """A maximum flow: its value and the flow on every arc (in ``net.arcs`` order)."""

    value: Capacity
    arc_flows: List[int]
    bound: int

    @property
    def is_infinite(self) -> bool:
        return is_infinite(self.value)


@dataclass
class MinCut:
    """An s-d cut given by its source side (node indices of the network)."""

    source_side: Set[int]
    capacity: Capacity


def infinity_bound(net: StaticFlowNetwork) -> int:
    """B = 1 + the sum of all finite arc capacities."""
    total = 0
    for arc in net.arcs:
        if arc.capacity is not INFINITE:
            total = checked_add(total, arc.capacity)
    return checked_add(total, 1)


def _bounded(capacity: Capacity, bound: int) -> int:
    return bound if capacity is INFINITE else capacity


class DinicSolver:
    """
    Dinic's max-flow solver over integer node indices.

    Arcs are added in order; BFS and the blocking-flow search visit them in
    that order, so results are reproducible.
    """

    def __init__(self, node_count: int):
        self.node_count = node_count
        self.adjacency: List[List[int]] = [[] for _ in range(node_count)]
        self.to: List[int] = []
        self.residual: List[int] = []
        self.level: List[int] = []
        self.cursor: List[int] = []

    def add_arc(self, tail: int, head: int, capacity: int) -> int:
        """Add an arc and its reverse; returns the forward residual edge id."""
        e = len(self.to)
        self.to.extend((head, tail))
        self.residual.extend((capacity, 0))
        self.adjacency[tail].append(e)
        self.adjacency[head].append(e + 1)
        return e

    def _build_levels(self, source: int, sink: int) -> bool:
        self.level = [-1] * self.node_count
        self.level[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for e in self.adjacency[u]:
                v = self.to[e]
                if self.residual[e] > 0 and self.level[v] < 0:
                    self.level[v] = self.level[u] + 1
                    queue.append(v)
        return self.level[sink] >= 0

    def _blocking_flow(self, source: int, sink: int) -> int:
        self.cursor = [0] * self.node_count
        pushed = 0
        while True:
            path: List[int] = []
            u = source
            while u != sink:
                adjacency = self.adjacency[u]
                while self.cursor[u] < len(adjacency):
                    e = adjacency[self.cursor[u]]
                    if self.residual[e] > 0 and self.level[self.to[e]] == self.level[u] + 1:
                        break
                    self.cursor[u] += 1
                else:
                    # dead end: prune u and retreat one step
                    if u == source:
                        return pushed
                    self.level[u] = -1
                    e = path.pop()
                    u = self.to[e ^ 1]
                    self.cursor[u] += 1
                    continue
                path.append(e)
                u = self.to[e]

            amount = min(self.residual[e] for e in path)
            for e in path:
                self.residual[e] -= amount
                self.residual[e ^ 1] += amount
            pushed += amount

    def solve(self, source: int, sink: int) -> int:
        total = 0
        phases = 0
        while self._build_levels(source, sink):
            total += self._blocking_flow(source, sink)
            phases += 1
        logger.debug(f"[MAXFLOW] Dinic finished after {phases} phases, value {total}")
        return total


def max_flow(net: StaticFlowNetwork) -> FlowResult:
    """
    Exact maximum (source, sink) flow.

    Args:
        net: The network; INFINITE arcs are allowed

    Returns:
        FlowResult with an integral flow on every arc
    """
    if net.source == net.sink:
        raise SourceEqualsSink("expanded network has source == sink", field="sink")

    bound = infinity_bound(net)
    solver = DinicSolver(len(net.nodes))
    edge_ids = [solver.add_arc(a.tail, a.head, _bounded(a.capacity, bound)) for a in net.arcs]
    value = solver.solve(net.source, net.sink)

    arc_flows = [_bounded(a.capacity, bound) - solver.residual[e] for a, e in zip(net.arcs, edge_ids)]
    result = FlowResult(value=INFINITE if value >= bound else value, arc_flows=arc_flows, bound=bound)
    logger.info(f"[MAXFLOW] Max flow {capacity_to_json(result.value)} on {len(net.nodes)} nodes, {len(net.arcs)} arcs")
    return result


def _reachable(adjacency: Dict[int, List[int]], start: int) -> Set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def min_cut(net: StaticFlowNetwork, result: FlowResult, largest: bool = False) -> MinCut:
    """
    Minimum cut read off the residual graph of a maximum flow.

    By default the source side is every node the source reaches, the
    smallest minimum cut. With ``largest`` it is every node that cannot
    reach the sink, the largest one; its cut function takes the earliest
    times any minimum cut allows.

    Raises:
        DualityViolation: if the cut capacity differs from the flow value
    """
    forward: Dict[int, List[int]] = {i: [] for i in range(len(net.nodes))}
    backward: Dict[int, List[int]] = {i: [] for i in range(len(net.nodes))}
    for k, arc in enumerate(net.arcs):
        flow = result.arc_flows[k]
        if _bounded(arc.capacity, result.bound) - flow > 0:
            forward[arc.tail].append(arc.head)
            backward[arc.head].append(arc.tail)
        if flow > 0:
            forward[arc.head].append(arc.tail)
            backward[arc.tail].append(arc.head)

    if largest:
        side = set(range(len(net.nodes))) - _reachable(backward, net.sink)
    else:
        side = _reachable(forward, net.source)

    capacity: Capacity = 0
    for arc in net.arcs:
        if arc.tail in side and arc.head not in side:
            capacity = checked_add(capacity, arc.capacity)

    if net.sink in side or net.source not in side or capacity != result.value:
        raise DualityViolation(
            f"cut capacity {capacity_to_json(capacity)} != max flow {capacity_to_json(result.value)}"
        )
    return MinCut(source_side=side, capacity=capacity)


def extract_cut_function(cut: MinCut, net: StaticFlowNetwork) -> CutFunction:
    """
    Cut function of a finite cut of a TEN or cTEN.

    phi(i) is the earliest time label of a source-side copy of i, or T+1.

    Raises:
        InvalidCutFunction: if the cut is INFINITE
        NotMonotone: if a later copy of some node is on the sink side
    """
    if cut.capacity is INFINITE:
        raise InvalidCutFunction("an INFINITE cut has no cut function", field="cut")
    horizon = net.horizon
    labels: Dict[str, List[int]] = {}
    for name, t in net.nodes:
        labels.setdefault(name, []).append(t)

    assignment: Dict[str, int] = {}
    for name, times in labels.items():
        inside = [net.index_of((name, t)) in cut.source_side for t in times]
        first = next((k for k, flag in enumerate(inside) if flag), None)
        if first is None:
            assignment[name] = horizon + 1
            continue
        if not all(inside[first:]):
            raise NotMonotone(f"node {name} leaves the source side after t={times[first]}")
        assignment[name] = times[first]

    return CutFunction(assignment, horizon)


@dataclass
class CtenSolution:
    """Result of solving the cTEN over a set of interval starts."""

    value: Capacity
    times: CriticalTimeSet
    net: StaticFlowNetwork
    flow: FlowResult
    cut: Optional[MinCut] = None
    cut_function: Optional[CutFunction] = None


def solve_cten(
    network: TemporalNetwork,
    horizon: int,
    times: Optional[Iterable[int]] = None,
    with_cut: bool = False,
) -> CtenSolution:
    """
    Build and solve cTEN(N, A, T).

    Args:
        network: The temporal network
        horizon: T
        times: A (default: the critical times of the network)
        with_cut: Also extract the min cut and its cut function

    Returns:
        CtenSolution
    """
    if times is None:
        interval_set = critical_times(network, horizon)
    else:
        interval_set = CriticalTimeSet.of(times, horizon)
    net = build_cten(network, interval_set, horizon)
    flow = max_flow(net)
    solution = CtenSolution(value=flow.value, times=interval_set, net=net, flow=flow)
    if with_cut:
        solution.cut = min_cut(net, flow)
        if solution.cut.capacity is not INFINITE:
            solution.cut_function = extract_cut_function(solution.cut, net)
    return solution


def max_flow_over_time(network: TemporalNetwork, horizon: int) -> Capacity:
    """Maximum s-d flow over time by horizon T, via the cTEN over critical times."""
    value = solve_cten(network, horizon).value
    logger.info(f"[MAXFLOW] Max flow over time by T={horizon}: {capacity_to_json(value)}")
    return value
