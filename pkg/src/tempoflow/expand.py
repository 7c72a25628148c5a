"""
Time-expanded networks.

``build_ten`` writes down the full TEN(N, T) on V x [0, T]; it is only
meant for oracle-scale instances and is guarded by a node budget.
``build_cten`` collapses each node's time axis onto the intervals of a
set A (interval i covers [t_i, t_{i+1} - 1], the last covers [t_k, T])
and aggregates transmission capacities with piece arithmetic.
"""

import bisect
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Tuple, Union

import networkx as nx

from .config import get_settings
from .critical import CriticalTimeSet, interval_starts
from .errors import BoundViolation, BudgetExceeded, InvalidIntervalSet
from .network import INFINITE, Capacity, TemporalNetwork, capacity_to_json

logger = logging.getLogger(__name__)

NodeLabel = Tuple[str, int]


class ArcKind(str, Enum):
    """Kinds of arcs in an expanded network."""

    STORAGE = "storage"
    TRANSMISSION = "transmission"


@dataclass(frozen=True)
class Arc:
    """A capacitated arc between node indices of a StaticFlowNetwork."""

    tail: int
    head: int
    capacity: Capacity
    kind: ArcKind
    edge: Optional[Tuple[str, str]] = None  # originating temporal edge, transmission only


@dataclass(frozen=True)
class StaticFlowNetwork:
    """
    A steady-state flow network with extended (possibly INFINITE) capacities.

    Nodes are (base_node, time_label) pairs ordered by base node, then time.
    """

    nodes: Tuple[NodeLabel, ...]
    arcs: Tuple[Arc, ...]
    source: int
    sink: int
    horizon: Optional[int] = None
    times: Tuple[int, ...] = field(default=())

    @cached_property
    def index(self) -> Dict[NodeLabel, int]:
        return {label: i for i, label in enumerate(self.nodes)}

    def index_of(self, label: NodeLabel) -> int:
        return self.index[label]

    @property
    def storage_arcs(self) -> List[Arc]:
        return [a for a in self.arcs if a.kind == ArcKind.STORAGE]

    @property
    def transmission_arcs(self) -> List[Arc]:
        return [a for a in self.arcs if a.kind == ArcKind.TRANSMISSION]

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON output (INFINITE as "inf")."""
        return {
            "nodes": [{"name": name, "time": t} for name, t in self.nodes],
            "arcs": [
                {
                    "from": list(self.nodes[a.tail]),
                    "to": list(self.nodes[a.head]),
                    "capacity": capacity_to_json(a.capacity),
                    "kind": a.kind.value,
                }
                for a in self.arcs
            ],
            "source": list(self.nodes[self.source]),
            "sink": list(self.nodes[self.sink]),
        }

    def to_networkx(self) -> nx.DiGraph:
        """
        Export as a networkx DiGraph keyed by node label.

        Parallel arcs are merged by summing capacities; INFINITE arcs carry
        no ``capacity`` attribute, which networkx treats as unbounded.
        """
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        for arc in self.arcs:
            u, v = self.nodes[arc.tail], self.nodes[arc.head]
            if arc.capacity is INFINITE:
                graph.add_edge(u, v)
                graph[u][v].pop("capacity", None)
                graph[u][v]["unbounded"] = True
            elif graph.has_edge(u, v):
                if not graph[u][v].get("unbounded"):
                    graph[u][v]["capacity"] += arc.capacity
            else:
                graph.add_edge(u, v, capacity=arc.capacity)
        return graph


def _storage_arcs(n: int, width: int) -> List[Arc]:
    arcs = []
    for base in range(n):
        for k in range(width - 1):
            arcs.append(Arc(base * width + k, base * width + k + 1, INFINITE, ArcKind.STORAGE))
    return arcs


def build_ten(network: TemporalNetwork, horizon: int, node_budget: Optional[int] = None) -> StaticFlowNetwork:
    """
    Build the full time-expanded network TEN(N, T).

    Args:
        network: The temporal network
        horizon: T
        node_budget: Largest admissible n*(T+1) (default from settings)

    Returns:
        StaticFlowNetwork on V x [0, T] with source (s, 0) and sink (d, T)
    """
    budget = node_budget if node_budget is not None else get_settings().budget
    width = horizon + 1
    if network.n * width > budget:
        raise BudgetExceeded(
            f"TEN needs {network.n * width} nodes, budget is {budget}; use the cTEN path",
            field="budget",
        )

    nodes = tuple((name, t) for name in network.nodes for t in range(width))
    arcs = _storage_arcs(network.n, width)
    index = network.index
    for edge in network.edges:
        length = network.length_of(edge)
        tail_base = index[edge.tail] * width
        head_base = index[edge.head] * width
        for t in range(0, horizon - length + 1):
            u = edge.capacity.value_at(t)
            if u > 0:
                arcs.append(Arc(tail_base + t, head_base + t + length, u, ArcKind.TRANSMISSION, edge.key))

    ten = StaticFlowNetwork(
        nodes=nodes,
        arcs=tuple(arcs),
        source=index[network.source] * width,
        sink=index[network.sink] * width + horizon,
        horizon=horizon,
        times=tuple(range(width)),
    )
    logger.info(f"[EXPAND] Built TEN: {len(nodes)} nodes, {len(arcs)} arcs (T={horizon})")
    return ten


def build_cten(
    network: TemporalNetwork,
    times: Union[CriticalTimeSet, Iterable[int]],
    horizon: int,
) -> StaticFlowNetwork:
    """
    Build the condensed time-expanded network cTEN(N, A, T).

    For each edge xy of length L and each departure interval i, the
    departure window [t_i, end_i] (cut at T - L so flow arrives by T) is
    shifted by L and split across the arrival intervals it overlaps; each
    piece of the split becomes one arc with the summed capacity.

    Args:
        network: The temporal network
        times: The interval start set A; must contain 0 and T and lie in [0, T]
        horizon: T

    Returns:
        StaticFlowNetwork on V x A with source (s, 0) and sink (d, T)
    """
    starts = interval_starts(times)
    if not starts or starts[0] != 0 or horizon not in starts:
        raise InvalidIntervalSet(f"interval set must contain 0 and T={horizon}", field="times")
    if starts[-1] > horizon:
        raise InvalidIntervalSet(f"interval set has times beyond T={horizon}", field="times")

    width = len(starts)
    ends = [starts[k + 1] - 1 for k in range(width - 1)] + [horizon]
    nodes = tuple((name, t) for name in network.nodes for t in starts)
    arcs = _storage_arcs(network.n, width)
    index = network.index

    for edge in network.edges:
        length = network.length_of(edge)
        tail_base = index[edge.tail] * width
        head_base = index[edge.head] * width
        for i in range(width):
            lo = starts[i]
            hi = min(ends[i], horizon - length)
            if lo > hi:
                continue
            j = bisect.bisect_right(starts, lo + length) - 1
            while j < width and starts[j] <= hi + length:
                dep_lo = max(lo, starts[j] - length)
                dep_hi = min(hi, ends[j] - length)
                capacity = edge.capacity.sum_over_window(dep_lo, dep_hi)
                if capacity > 0:
                    arcs.append(Arc(tail_base + i, head_base + j, capacity, ArcKind.TRANSMISSION, edge.key))
                j += 1

    cten = StaticFlowNetwork(
        nodes=nodes,
        arcs=tuple(arcs),
        source=index[network.source] * width,
        sink=index[network.sink] * width + width - 1,
        horizon=horizon,
        times=starts,
    )
    logger.info(f"[EXPAND] Built cTEN: |A|={width}, {len(nodes)} nodes, {len(arcs)} arcs (T={horizon})")
    return cten


@dataclass
class SizeReport:
    """Sizes of a built cTEN against the edge-count bounds."""

    interval_count: int
    node_count: int
    storage_arcs: int
    transmission_arcs: int
    per_edge: Dict[str, int]
    max_total_arcs: int

    @property
    def total_arcs(self) -> int:
        return self.storage_arcs + self.transmission_arcs

    def to_dict(self) -> dict:
        """Convert to dictionary for serialization."""
        return {
            "interval_count": self.interval_count,
            "node_count": self.node_count,
            "storage_arcs": self.storage_arcs,
            "transmission_arcs": self.transmission_arcs,
            "total_arcs": self.total_arcs,
            "max_total_arcs": self.max_total_arcs,
            "per_edge": dict(self.per_edge),
        }


def cten_size_report(
    net: StaticFlowNetwork,
    network: TemporalNetwork,
    times: Union[CriticalTimeSet, Iterable[int]],
) -> SizeReport:
    """
    Count nodes and arcs of a cTEN and check them against the bounds.

    Node count must be n*|A|, storage arcs at most n*|A|, transmission arcs
    at most 5*|A| per edge, and all arcs at most n*|A| + 5*m*|A|.

    Raises:
        BoundViolation: if any bound fails (a builder bug)
    """
    p = len(interval_starts(times))
    per_edge = {f"{e.tail}->{e.head}": 0 for e in network.edges}
    storage = 0
    for arc in net.arcs:
        if arc.kind == ArcKind.STORAGE:
            storage += 1
        else:
            per_edge[f"{arc.edge[0]}->{arc.edge[1]}"] += 1

    report = SizeReport(
        interval_count=p,
        node_count=len(net.nodes),
        storage_arcs=storage,
        transmission_arcs=sum(per_edge.values()),
        per_edge=per_edge,
        max_total_arcs=network.n * p + 5 * network.m * p,
    )

    if report.node_count != network.n * p:
        raise BoundViolation(f"cTEN has {report.node_count} nodes, expected n*|A| = {network.n * p}")
    if storage > network.n * p:
        raise BoundViolation(f"cTEN has {storage} storage arcs, bound is n*|A| = {network.n * p}")
    for pair, count in per_edge.items():
        if count > 5 * p:
            raise BoundViolation(f"edge {pair} has {count} transmission arcs, bound is 5*|A| = {5 * p}")
    if report.total_arcs > report.max_total_arcs:
        raise BoundViolation(f"cTEN has {report.total_arcs} arcs, bound is {report.max_total_arcs}")

    logger.debug(f"[EXPAND] Size report: {report.to_dict()}")
    return report
