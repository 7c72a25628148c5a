"""
tempoflow: maximum flow over time on temporal networks.

The headline operation is ``max_flow_over_time(N, T)``: one steady-state
max flow on the condensed time-expanded network over the critical times.
"""

from .critical import breaktimes, critical_times, generalized_critical_times
from .cuts import CutFunction, cut_cost, normalize_min_cut
from .errors import TempoflowError
from .expand import StaticFlowNetwork, build_cten, build_ten
from .maxflow import max_flow, max_flow_over_time, min_cut, solve_cten
from .network import INFINITE, PiecewiseConstant, TemporalNetwork, load_network, validate_network

__version__ = "0.1.0"

__all__ = [
    "INFINITE",
    "CutFunction",
    "PiecewiseConstant",
    "StaticFlowNetwork",
    "TemporalNetwork",
    "TempoflowError",
    "breaktimes",
    "build_cten",
    "build_ten",
    "critical_times",
    "cut_cost",
    "generalized_critical_times",
    "load_network",
    "max_flow",
    "max_flow_over_time",
    "min_cut",
    "normalize_min_cut",
    "solve_cten",
    "validate_network",
]
