"""
Cut functions on time-expanded networks.

A cut function phi maps every node to a time in [0, T+1]; its TEN cut
holds (i, t) on the source side iff t >= phi(i). This module evaluates
cut costs by piece arithmetic, computes forbidden sets and local shifts,
builds the pinned-assignments graph, and runs the normalization loop
that moves a minimum cut onto critical times without changing its cost.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple, Union

import networkx as nx

from .critical import breaktimes, critical_times
from .errors import (
    CostIncreased,
    InvalidCutFunction,
    InvariantViolation,
    NodeNotInC,
    NotAMinCut,
    ShiftOutOfRange,
)
from .network import Capacity, TemporalNetwork, capacity_to_json, checked_add

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CutFunction:
    """phi: node -> time in [0, T+1], with phi(s) = 0 and phi(d) = T+1."""

    assignment: Mapping[str, int]
    horizon: int

    def __getitem__(self, node: str) -> int:
        return self.assignment[node]

    def __iter__(self):
        return iter(self.assignment)

    def validate(self, network: TemporalNetwork) -> "CutFunction":
        """Check totality, range and the terminal assignments."""
        missing = [v for v in network.nodes if v not in self.assignment]
        if missing:
            raise InvalidCutFunction(f"no assignment for {', '.join(missing)}", field="assignment")
        unknown = [v for v in self.assignment if v not in network.index]
        if unknown:
            raise InvalidCutFunction(f"assignment for unknown nodes {', '.join(unknown)}", field="assignment")
        for node, t in self.assignment.items():
            if not 0 <= t <= self.horizon + 1:
                raise InvalidCutFunction(f"phi({node})={t} outside [0, {self.horizon + 1}]", field=node)
        if self.assignment[network.source] != 0:
            raise InvalidCutFunction("phi(source) must be 0", field=network.source)
        if self.assignment[network.sink] != self.horizon + 1:
            raise InvalidCutFunction("phi(sink) must be T+1", field=network.sink)
        return self

    @property
    def range(self) -> FrozenSet[int]:
        return frozenset(self.assignment.values())

    @property
    def potential(self) -> int:
        return sum(self.assignment.values())

    def to_dict(self) -> Dict[str, int]:
        return dict(self.assignment)


def cut_range(phi: CutFunction) -> FrozenSet[int]:
    """crit(phi): the set of times phi takes."""
    return phi.range


def pinned_nodes(phi: CutFunction, horizon: int) -> FrozenSet[str]:
    """X_phi: nodes assigned to 0 or T+1."""
    return frozenset(v for v, t in phi.assignment.items() if t in (0, horizon + 1))


def cut_source_side(phi: CutFunction, horizon: int) -> Set[Tuple[str, int]]:
    """The TEN node set {(i, t) : phi(i) <= t <= T}."""
    return {(v, t) for v, start in phi.assignment.items() for t in range(start, horizon + 1)}


def cut_cost(network: TemporalNetwork, horizon: int, phi: CutFunction) -> Capacity:
    """
    Capacity of the TEN cut defined by phi.

    Edge ij of length L crosses at departures t with phi(i) <= t and
    t + L < phi(j); phi(j) <= T+1 keeps arrivals within the horizon.
    """
    total: Capacity = 0
    for edge in network.edges:
        lo = max(phi[edge.tail], 0)
        hi = phi[edge.head] - network.length_of(edge) - 1
        total = checked_add(total, edge.capacity.sum_over_window(lo, hi))
    return total


def forbidden_set(
    network: TemporalNetwork,
    horizon: int,
    phi: CutFunction,
    component: Iterable[str],
    node: str,
) -> FrozenSet[int]:
    """
    Times at which shifting phi(node) together with ``component`` could change the cost.

    Breaktimes, breaktimes offset by the lengths of the node's in-edges (tau
    in a uniform network), and the times that line phi(node) up with an
    out-neighbour or in-neighbour outside the component.

    Raises:
        NodeNotInC: if ``node`` is not in ``component``
    """
    component = set(component)
    if node not in component:
        raise NodeNotInC(f"{node} is not in the shifted component", field="node")

    thetas = breaktimes(network, horizon).times
    offsets = {network.length_of(e) for e in network.in_edges(node)}
    if network.is_uniform:
        offsets.add(network.tau)

    forbidden = set(thetas)
    forbidden.update(theta + offset for theta in thetas for offset in offsets)
    for edge in network.out_edges(node):
        if edge.head not in component:
            forbidden.update((phi[edge.head] - network.length_of(edge), phi[edge.head]))
    for edge in network.in_edges(node):
        if edge.tail not in component:
            forbidden.update((phi[edge.tail] + network.length_of(edge), phi[edge.tail]))
    return frozenset(forbidden)


class ShiftDirection(str, Enum):
    UP = "up"
    DOWN = "down"


def shift_cut(phi: CutFunction, component: Iterable[str], direction: Union[ShiftDirection, str]) -> CutFunction:
    """
    Move every assignment in ``component`` by +1 (up) or -1 (down).

    Raises:
        ShiftOutOfRange: if the component holds a node assigned to 0 or T+1
    """
    step = 1 if ShiftDirection(direction) == ShiftDirection.UP else -1
    component = set(component)
    pinned = pinned_nodes(phi, phi.horizon) & component
    if pinned:
        raise ShiftOutOfRange(f"cannot shift pinned nodes {', '.join(sorted(pinned))}", field="component")
    assignment = {v: t + step if v in component else t for v, t in phi.assignment.items()}
    return CutFunction(assignment, phi.horizon)


@dataclass
class PinnedGraph:
    """
    Undirected graph on nodes and breaktimes linking assignments that differ by a gap.

    Vertices are ("node", name) and ("time", theta).
    """

    graph: nx.Graph
    node_order: Tuple[str, ...]
    gaps: FrozenSet[int]

    def component_of(self, node: str) -> Set[Tuple[str, object]]:
        return nx.node_connected_component(self.graph, ("node", node))


def pinned_graph(
    network: TemporalNetwork,
    horizon: int,
    phi: CutFunction,
    lengths: Optional[Iterable[int]] = None,
) -> PinnedGraph:
    """
    Build the pinned-assignments graph of phi.

    Gaps are {0, tau}, or {0} plus the distinct edge lengths for networks
    whose edges do not share tau (``lengths`` overrides them).
    """
    if lengths is not None:
        gaps = frozenset({0, *lengths})
    elif network.is_uniform:
        gaps = frozenset({0, network.tau})
    else:
        gaps = frozenset({0, *network.lengths})

    thetas = set(breaktimes(network, horizon).times)
    graph = nx.Graph()
    graph.add_nodes_from(("node", v) for v in network.nodes)
    graph.add_nodes_from(("time", theta) for theta in thetas)

    nodes = network.nodes
    for a, u in enumerate(nodes):
        for v in nodes[a + 1:]:
            if abs(phi[u] - phi[v]) in gaps:
                graph.add_edge(("node", u), ("node", v))
        for gap in gaps:
            for theta in (phi[u] - gap, phi[u] + gap):
                if theta in thetas:
                    graph.add_edge(("node", u), ("time", theta))

    return PinnedGraph(graph=graph, node_order=nodes, gaps=gaps)


def find_free_component(
    pinned: PinnedGraph,
    phi: CutFunction,
    excluded: Optional[Iterable[str]] = None,
) -> Optional[FrozenSet[str]]:
    """
    First component (in node order) that touches no breaktime and no excluded node.

    Nodes assigned to 0 or T+1 are always linked to the breaktimes 0 and T+1,
    so their components are never free.
    """
    excluded = set(excluded or ())
    seen: Set[str] = set()
    for node in pinned.node_order:
        if node in seen:
            continue
        component = pinned.component_of(node)
        names = {name for kind, name in component if kind == "node"}
        seen |= names
        if len(names) < len(component) or names & excluded:
            continue
        return frozenset(names)
    return None


@dataclass
class NormalizationResult:
    """A normalized minimum cut and the shifts that produced it."""

    cut: CutFunction
    iterations: int
    cost: Capacity
    components: List[FrozenSet[str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "cut": self.cut.to_dict(),
            "iterations": self.iterations,
            "cost": capacity_to_json(self.cost),
            "components": [sorted(c) for c in self.components],
        }


def normalize_with_trace(network: TemporalNetwork, horizon: int, phi: CutFunction) -> NormalizationResult:
    """
    Shift free components of a minimum cut up until all assignments are critical.

    Each step must keep the cost equal; sum(phi) grows by at least one per
    step, so the loop ends within n*(T+1) steps.

    Args:
        network: The temporal network
        horizon: T
        phi: A minimum cut function

    Returns:
        NormalizationResult whose cut has the input cost and range within crit(N)

    Raises:
        CostIncreased: if a shift raises the cost
        NotAMinCut: if a shift lowers the cost (phi was not minimum)
        InvariantViolation: if a free component meets its forbidden set or
            the result leaves the critical times
    """
    phi.validate(network)
    cost = cut_cost(network, horizon, phi)
    limit = network.n * (horizon + 1)
    pinned = pinned_nodes(phi, horizon)
    components: List[FrozenSet[str]] = []

    while True:
        component = find_free_component(pinned_graph(network, horizon, phi), phi, pinned)
        if component is None:
            break
        for node in component:
            if phi[node] in forbidden_set(network, horizon, phi, component, node):
                raise InvariantViolation(f"free component {sorted(component)} has phi({node}) in its forbidden set")

        shifted = shift_cut(phi, component, ShiftDirection.UP)
        shifted_cost = cut_cost(network, horizon, shifted)
        if shifted_cost > cost:
            raise CostIncreased(
                f"shifting {sorted(component)} up raised the cost {capacity_to_json(cost)} -> "
                f"{capacity_to_json(shifted_cost)}"
            )
        if shifted_cost < cost:
            raise NotAMinCut(
                f"shifting {sorted(component)} up lowered the cost {capacity_to_json(cost)} -> "
                f"{capacity_to_json(shifted_cost)}"
            )
        phi = shifted
        components.append(component)
        logger.debug(f"[CUTS] Shifted {sorted(component)} up (potential {phi.potential})")
        if len(components) > limit:
            raise InvariantViolation(f"normalization exceeded {limit} iterations")

    allowed = set(critical_times(network, horizon))
    stray = sorted(t for t in phi.range if t <= horizon and t not in allowed)
    if stray:
        raise InvariantViolation(f"normalized cut still uses non-critical times {stray}")

    logger.info(f"[CUTS] Normalized cut after {len(components)} shifts, cost {capacity_to_json(cost)}")
    return NormalizationResult(cut=phi, iterations=len(components), cost=cost, components=components)


def normalize_min_cut(network: TemporalNetwork, horizon: int, phi: CutFunction) -> CutFunction:
    """A minimum cut function of equal cost whose assignments are critical times."""
    return normalize_with_trace(network, horizon, phi).cut
