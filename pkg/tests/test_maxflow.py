"""
Unit tests for the Dinic max-flow solver and min cut extraction.

These tests verify:
1. Max flow values on small static networks, INFINITE included
2. Duality: the smallest and largest residual min cuts match the flow value
3. Conservation and capacity bounds of the returned arc flows
4. Agreement with networkx's max-flow on corpus TENs and cTENs
5. Cut functions read off TEN/cTEN cuts, and the end-to-end max flow over time

Usage:
    pytest tests/test_maxflow.py -v
"""
import networkx as nx
import pytest

from tests.conftest import make_network
from tempoflow.critical import critical_times
from tempoflow.cuts import cut_cost
from tempoflow.errors import DualityViolation, NotMonotone
from tempoflow.expand import Arc, ArcKind, StaticFlowNetwork, build_cten, build_ten
from tempoflow.maxflow import (
    FlowResult,
    MinCut,
    extract_cut_function,
    max_flow,
    max_flow_over_time,
    min_cut,
    solve_cten,
)
from tempoflow.network import INFINITE


def static(names, arcs, source=0, sink=None):
    """Static network on nodes (name, 0) with (tail, head, capacity) arcs."""
    nodes = tuple((name, 0) for name in names)
    built = tuple(Arc(t, h, c, ArcKind.TRANSMISSION) for t, h, c in arcs)
    return StaticFlowNetwork(nodes=nodes, arcs=built, source=source, sink=len(nodes) - 1 if sink is None else sink)


def assert_feasible(net, result):
    balance = [0] * len(net.nodes)
    for arc, flow in zip(net.arcs, result.arc_flows):
        assert flow >= 0
        if arc.capacity is not INFINITE:
            assert flow <= arc.capacity
        balance[arc.tail] -= flow
        balance[arc.head] += flow
    for i, b in enumerate(balance):
        if i not in (net.source, net.sink):
            assert b == 0
    assert balance[net.sink] == -balance[net.source] == result.value


class TestMaxFlow:
    """Test max flow on hand-built static networks."""

    def test_parallel_arcs(self):
        """Disjoint paths add up."""
        net = static(["s", "d"], [(0, 1, 3), (0, 1, 4)])
        result = max_flow(net)
        assert result.value == 7
        assert_feasible(net, result)

    def test_bottleneck(self):
        """The smallest arc on a path limits it."""
        net = static(["s", "a", "d"], [(0, 1, 5), (1, 2, 2)])
        assert max_flow(net).value == 2

    def test_flow_needs_reverse_arc(self):
        """A greedy first path must be partly undone."""
        net = static(["s", "a", "b", "d"], [(0, 1, 1), (0, 2, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)])
        result = max_flow(net)
        assert result.value == 2
        assert_feasible(net, result)

    def test_infinite_path(self):
        """An all-INFINITE path gives an INFINITE value."""
        net = static(["s", "d"], [(0, 1, INFINITE)])
        assert max_flow(net).value is INFINITE

    def test_infinite_arc_before_bottleneck(self):
        """A finite arc downstream of an INFINITE one bounds the flow."""
        net = static(["s", "a", "d"], [(0, 1, INFINITE), (1, 2, 3)])
        result = max_flow(net)
        assert result.value == 3
        assert not result.is_infinite

    def test_disconnected(self):
        """No path means zero flow."""
        net = static(["s", "a", "d"], [(0, 1, 5)])
        assert max_flow(net).value == 0


class TestMinCut:
    """Test residual min cuts."""

    def test_bottleneck_cut(self):
        """The cut sits behind the bottleneck."""
        net = static(["s", "a", "d"], [(0, 1, 5), (1, 2, 2)])
        cut = min_cut(net, max_flow(net))
        assert cut.source_side == {0, 1}
        assert cut.capacity == 2

    def test_saturated_parallel_arcs(self):
        """Only the source remains reachable."""
        net = static(["s", "d"], [(0, 1, 3), (0, 1, 4)])
        cut = min_cut(net, max_flow(net))
        assert cut.source_side == {0}
        assert cut.capacity == 7

    def test_largest_cut(self):
        """With largest=True the source side keeps every node that cannot reach the sink."""
        net = static(["s", "a", "d"], [(0, 1, 5), (1, 2, 5)])
        result = max_flow(net)
        assert min_cut(net, result).source_side == {0}
        largest = min_cut(net, result, largest=True)
        assert largest.source_side == {0, 1}
        assert largest.capacity == 5

    def test_infinite_cut(self):
        """An INFINITE flow has an INFINITE cut."""
        net = static(["s", "a", "d"], [(0, 1, INFINITE), (1, 2, INFINITE), (0, 2, 4)])
        result = max_flow(net)
        assert min_cut(net, result).capacity is INFINITE

    def test_non_maximum_flow_detected(self):
        """A flow that is not maximum breaks duality."""
        net = static(["s", "d"], [(0, 1, 3)])
        with pytest.raises(DualityViolation):
            min_cut(net, FlowResult(value=3, arc_flows=[0], bound=4))


class TestAgainstNetworkx:
    """Cross-check the solver with networkx."""

    def test_ten_values(self, small_corpus):
        """Dinic and networkx agree on every corpus TEN."""
        for instance in small_corpus:
            ten = build_ten(instance.network, instance.horizon)
            result = max_flow(ten)
            assert_feasible(ten, result)
            expected = nx.maximum_flow_value(ten.to_networkx(), ten.nodes[ten.source], ten.nodes[ten.sink])
            assert result.value == expected

    def test_cten_values(self, small_corpus):
        """Dinic and networkx agree on every corpus cTEN."""
        for instance in small_corpus:
            crit = critical_times(instance.network, instance.horizon)
            cten = build_cten(instance.network, crit, instance.horizon)
            expected = nx.maximum_flow_value(cten.to_networkx(), cten.nodes[cten.source], cten.nodes[cten.sink])
            assert max_flow(cten).value == expected


class TestCutFunctions:
    """Test cut function extraction."""

    def test_source_copies_only(self, path_network):
        """A cut holding only the source's copies maps everything else to T+1."""
        ten = build_ten(path_network, 3)
        side = {ten.index_of(("s", t)) for t in range(4)}
        phi = extract_cut_function(MinCut(side, 0), ten)
        assert phi.to_dict() == {"s": 0, "a": 4, "d": 4}

    def test_non_monotone_cut(self, path_network):
        """A copy leaving the source side later is an error."""
        ten = build_ten(path_network, 3)
        side = {ten.index_of(("s", t)) for t in range(4)} | {ten.index_of(("a", 1))}
        with pytest.raises(NotMonotone):
            extract_cut_function(MinCut(side, 0), ten)

    def test_ten_cut_cost_matches(self, small_corpus):
        """cut_cost of the extracted function equals the min cut capacity."""
        for instance in small_corpus:
            ten = build_ten(instance.network, instance.horizon)
            cut = min_cut(ten, max_flow(ten))
            phi = extract_cut_function(cut, ten)
            assert cut_cost(instance.network, instance.horizon, phi) == cut.capacity

    def test_largest_cut_assigns_earlier_times(self, small_corpus):
        """The largest min cut has the same cost and never a later phi than the smallest."""
        for instance in small_corpus:
            ten = build_ten(instance.network, instance.horizon)
            result = max_flow(ten)
            smallest = extract_cut_function(min_cut(ten, result), ten)
            largest = extract_cut_function(min_cut(ten, result, largest=True), ten)
            assert cut_cost(instance.network, instance.horizon, largest) == result.value
            assert all(largest[v] <= smallest[v] for v in instance.network.nodes)


class TestMaxFlowOverTime:
    """Test the end-to-end operation."""

    def test_path_network(self, path_network):
        """Two waves of 5 reach d by T=3."""
        assert max_flow_over_time(path_network, 3) == 10

    def test_zero_capacities(self):
        """Nothing moves through closed edges."""
        net = make_network(["s", "a", "d"], [("s", "a", 0), ("a", "d", 0)])
        assert max_flow_over_time(net, 6) == 0

    def test_single_edge(self):
        """u = 4 for departures 0 and 1 by T=2."""
        net = make_network(["s", "d"], [("s", "d", 4)])
        assert max_flow_over_time(net, 2) == 8

    def test_direct_edge_two_intervals(self):
        """s -> d over A = {0, 2}: departures 0 and 1 each carry 5."""
        net = make_network(["s", "d"], [("s", "d", 5)])
        assert solve_cten(net, 2, times=[0, 2]).value == 10

    def test_chain_needs_critical_times(self, chain_network):
        """Coarse intervals overstate the chain's flow; critical ones do not."""
        assert max_flow(build_ten(chain_network, 4)).value == 0
        assert solve_cten(chain_network, 4, times=[0, 1, 4]).value == 5
        assert max_flow_over_time(chain_network, 4) == 0

    def test_solution_cut(self, path_network):
        """The cTEN min cut function costs the max flow value."""
        solution = solve_cten(path_network, 3, with_cut=True)
        assert solution.cut.capacity == 10
        assert cut_cost(path_network, 3, solution.cut_function) == 10

    def test_equivalence_on_corpus(self, small_corpus):
        """cTEN over critical times and the full TEN agree."""
        for instance in small_corpus:
            ten_value = max_flow(build_ten(instance.network, instance.horizon)).value
            assert max_flow_over_time(instance.network, instance.horizon) == ten_value
