"""
Temporal network domain types.

A temporal network is a directed graph whose edge capacities are
piecewise-constant functions of discrete time, with a static edge length
(uniform ``tau`` unless an edge carries its own ``length``). All values
are exact integers; the only non-integer capacity is the ``INFINITE``
sentinel used for storage arcs of expanded networks.

Also holds the canonical JSON network format:

    {"nodes":["s","a","d"],"source":"s","sink":"d","tau":1,
     "edges":[{"from":"s","to":"a","capacity":[{"from_time":0,"value":5}]}]}
"""

import bisect
import json
import logging
from dataclasses import dataclass, field
from functools import cached_property, total_ordering
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, StrictInt, StrictStr, ValidationError

from .errors import (
    ArithmeticOverflow,
    DuplicateEdge,
    MalformedPieces,
    NegativeValue,
    NetworkFormatError,
    SelfLoop,
    SourceEqualsSink,
    UnknownNode,
)

logger = logging.getLogger(__name__)

# Signed 64-bit integer width for capacities, sums and flows
MAX_INT = 2**63 - 1


# ============================================================================
# Capacity arithmetic
# ============================================================================


@total_ordering
class _Infinite:
    """The INFINITE capacity: greater than every finite value, absorbing under +."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other: object) -> bool:
        return other is self

    def __lt__(self, other: object) -> bool:
        return False

    def __hash__(self) -> int:
        return hash("inf")

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __repr__(self) -> str:
        return "INFINITE"

    def __str__(self) -> str:
        return "inf"


INFINITE = _Infinite()

Capacity = Union[int, _Infinite]


def is_infinite(value: Capacity) -> bool:
    return value is INFINITE


def checked_add(a: Capacity, b: Capacity) -> Capacity:
    """Add two capacities; INFINITE absorbs, finite sums are overflow-checked."""
    if a is INFINITE or b is INFINITE:
        return INFINITE
    total = a + b
    if total > MAX_INT:
        raise ArithmeticOverflow(f"capacity sum {a} + {b} exceeds the 64-bit integer width")
    return total


def checked_mul(a: int, b: int) -> int:
    product = a * b
    if product > MAX_INT:
        raise ArithmeticOverflow(f"capacity product {a} * {b} exceeds the 64-bit integer width")
    return product


def capacity_to_json(value: Capacity) -> Union[int, str]:
    """Serialize a capacity: decimal integer, or the string "inf"."""
    return "inf" if value is INFINITE else value


# ============================================================================
# Piecewise-constant capacity functions
# ============================================================================


@dataclass(frozen=True)
class Piece:
    """A constant piece: ``value`` holds from ``from_time`` until the next piece."""

    from_time: int
    value: int


@dataclass(frozen=True)
class PiecewiseConstant:
    """
    Canonical piecewise-constant function on t >= 0.

    Pieces are sorted strictly ascending by ``from_time``, the first starts
    at 0, adjacent pieces have distinct values and the last piece extends
    to +infinity. The piece count is the edge's mu.
    """

    pieces: Tuple[Piece, ...]

    def __post_init__(self):
        problem = _piece_problem([(p.from_time, p.value) for p in self.pieces])
        if problem:
            raise MalformedPieces(problem)
        for a, b in zip(self.pieces, self.pieces[1:]):
            if a.value == b.value:
                raise MalformedPieces(
                    f"adjacent pieces at t={a.from_time} and t={b.from_time} share value {a.value}"
                )

    @classmethod
    def constant(cls, value: int) -> "PiecewiseConstant":
        return cls((Piece(0, value),))

    @classmethod
    def canonical(cls, pairs: List[Tuple[int, int]]) -> Tuple["PiecewiseConstant", bool]:
        """
        Build the canonical form of a list of (from_time, value) pairs.

        Returns:
            Tuple of (function, repaired) where ``repaired`` is True when
            adjacent equal-valued pieces had to be merged
        """
        problem = _piece_problem(pairs)
        if problem:
            raise MalformedPieces(problem)
        merged: List[Piece] = []
        for from_time, value in pairs:
            if merged and merged[-1].value == value:
                continue
            merged.append(Piece(from_time, value))
        return cls(tuple(merged)), len(merged) != len(pairs)

    @cached_property
    def starts(self) -> Tuple[int, ...]:
        return tuple(p.from_time for p in self.pieces)

    def __len__(self) -> int:
        return len(self.pieces)

    def value_at(self, t: int) -> int:
        if t < 0:
            raise ValueError(f"capacity functions are defined on t >= 0, got t={t}")
        return self.pieces[bisect.bisect_right(self.starts, t) - 1].value

    def sum_over_window(self, lo: int, hi: int) -> int:
        """Sum of f(t) for t in [lo, hi], one multiplication per intersecting piece."""
        if hi < lo:
            return 0
        if lo < 0:
            raise ValueError(f"window must start at t >= 0, got lo={lo}")
        starts = self.starts
        k = bisect.bisect_right(starts, lo) - 1
        total = 0
        while k < len(starts) and starts[k] <= hi:
            end = starts[k + 1] - 1 if k + 1 < len(starts) else hi
            span = min(end, hi) - max(starts[k], lo) + 1
            total = checked_add(total, checked_mul(self.pieces[k].value, span))
            k += 1
        return total

    def change_times(self) -> List[int]:
        """Times t with f(t) != f(t-1); on canonical pieces, every later piece start."""
        return list(self.starts[1:])

    @property
    def max_value(self) -> int:
        return max(p.value for p in self.pieces)

    def to_list(self) -> List[Dict[str, int]]:
        return [{"from_time": p.from_time, "value": p.value} for p in self.pieces]


def _piece_problem(pairs: List[Tuple[int, int]]) -> Optional[str]:
    """Describe why a piece list is unusable, or None if it only needs merging."""
    if not pairs:
        return "capacity must have at least one piece"
    if pairs[0][0] != 0:
        return f"first piece must start at 0, got {pairs[0][0]}"
    for (t0, _), (t1, _) in zip(pairs, pairs[1:]):
        if t1 <= t0:
            return f"from_time must be strictly increasing ({t0} then {t1})"
    for t, value in pairs:
        if value < 0:
            return f"negative capacity {value} at t={t}"
    return None


def pc_eval(f: PiecewiseConstant, t: int) -> int:
    """Evaluate u(t)."""
    return f.value_at(t)


def pc_sum_over_window(f: PiecewiseConstant, lo: int, hi: int) -> int:
    """Sum u(t) over t in [lo, hi]; an empty window (lo = hi + 1) sums to 0."""
    return f.sum_over_window(lo, hi)


def change_times(f: PiecewiseConstant) -> List[int]:
    return f.change_times()


# ============================================================================
# Temporal network
# ============================================================================


@dataclass(frozen=True)
class Edge:
    """A directed edge with its capacity function and optional own length."""

    tail: str
    head: str
    capacity: PiecewiseConstant
    length: Optional[int] = None

    @property
    def key(self) -> Tuple[str, str]:
        return (self.tail, self.head)


@dataclass(frozen=True)
class TemporalNetwork:
    """
    The network N = (V, E, tau, {u_ij}, s, d).

    Immutable after construction; structural invariants are checked here so
    that a hand-built network is held to the same rules as a parsed one.
    """

    nodes: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    tau: int
    source: str
    sink: str
    repaired: bool = field(default=False, compare=False)

    def __post_init__(self):
        if len(set(self.nodes)) != len(self.nodes):
            raise NetworkFormatError("node names must be distinct", field="nodes")
        known = set(self.nodes)
        for name, label in ((self.source, "source"), (self.sink, "sink")):
            if name not in known:
                raise UnknownNode(f"{label} {name!r} is not a node", field=label)
        if self.source == self.sink:
            raise SourceEqualsSink(f"source and sink are both {self.source!r}", field="sink")
        if self.tau < 0:
            raise NegativeValue(f"tau must be non-negative, got {self.tau}", field="tau")

        seen = set()
        for idx, edge in enumerate(self.edges):
            where = f"edges[{idx}]"
            for name in (edge.tail, edge.head):
                if name not in known:
                    raise UnknownNode(f"edge endpoint {name!r} is not a node", field=where)
            if edge.tail == edge.head:
                raise SelfLoop(f"self-loop on {edge.tail!r}", field=where)
            if edge.key in seen:
                raise DuplicateEdge(f"duplicate edge {edge.tail}->{edge.head}", field=where)
            if edge.length is not None and edge.length < 0:
                raise NegativeValue(f"edge length must be non-negative, got {edge.length}", field=f"{where}.length")
            seen.add(edge.key)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def mu(self) -> int:
        """Total number of constant pieces across all capacity functions."""
        return sum(len(e.capacity) for e in self.edges)

    @property
    def max_capacity(self) -> int:
        """U: the largest capacity value (0 for an edgeless network)."""
        return max((e.capacity.max_value for e in self.edges), default=0)

    def length_of(self, edge: Edge) -> int:
        return self.tau if edge.length is None else edge.length

    @cached_property
    def lengths(self) -> FrozenSet[int]:
        """Gamma: the set of distinct effective edge lengths."""
        return frozenset(self.length_of(e) for e in self.edges)

    @property
    def is_uniform(self) -> bool:
        return self.lengths <= {self.tau}

    @cached_property
    def index(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.nodes)}

    @cached_property
    def _out(self) -> Dict[str, Tuple[Edge, ...]]:
        out: Dict[str, List[Edge]] = {name: [] for name in self.nodes}
        for edge in self.edges:
            out[edge.tail].append(edge)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def _in(self) -> Dict[str, Tuple[Edge, ...]]:
        into: Dict[str, List[Edge]] = {name: [] for name in self.nodes}
        for edge in self.edges:
            into[edge.head].append(edge)
        return {k: tuple(v) for k, v in into.items()}

    def out_edges(self, node: str) -> Tuple[Edge, ...]:
        return self._out[node]

    def in_edges(self, node: str) -> Tuple[Edge, ...]:
        return self._in[node]

    def edge(self, tail: str, head: str) -> Optional[Edge]:
        for e in self._out.get(tail, ()):
            if e.head == head:
                return e
        return None


# ============================================================================
# Canonical JSON format
# ============================================================================


class PieceModel(BaseModel):
    """One capacity piece as it appears in the network file."""

    model_config = ConfigDict(extra="forbid")

    from_time: StrictInt
    value: StrictInt


class EdgeModel(BaseModel):
    """One edge as it appears in the network file."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    tail: StrictStr = Field(alias="from")
    head: StrictStr = Field(alias="to")
    capacity: List[PieceModel]
    length: Optional[StrictInt] = None


class NetworkModel(BaseModel):
    """The network file."""

    model_config = ConfigDict(extra="forbid")

    nodes: List[StrictStr]
    source: StrictStr
    sink: StrictStr
    tau: StrictInt
    edges: List[EdgeModel]


def validate_network(raw: Union[Dict[str, Any], NetworkModel]) -> TemporalNetwork:
    """
    Validate a parsed network file and return its canonical form.

    Adjacent equal-valued pieces are merged (the result has ``repaired``
    set and a warning is logged); every other problem raises.

    Args:
        raw: The decoded JSON document, or an already-parsed NetworkModel

    Returns:
        The canonical TemporalNetwork
    """
    if isinstance(raw, NetworkModel):
        model = raw
    else:
        try:
            model = NetworkModel.model_validate(raw)
        except ValidationError as e:
            first = e.errors()[0]
            location = ".".join(str(part) for part in first["loc"])
            raise NetworkFormatError(f"{location}: {first['msg']}", field=location) from e

    if model.tau < 0:
        raise NegativeValue(f"tau must be non-negative, got {model.tau}", field="tau")

    edges = []
    repaired_any = False
    for idx, em in enumerate(model.edges):
        for k, piece in enumerate(em.capacity):
            where = f"edges[{idx}].capacity[{k}]"
            if piece.from_time < 0:
                raise NegativeValue(f"negative from_time {piece.from_time}", field=f"{where}.from_time")
            if piece.value < 0:
                raise NegativeValue(f"negative capacity {piece.value}", field=f"{where}.value")
        try:
            capacity, repaired = PiecewiseConstant.canonical([(p.from_time, p.value) for p in em.capacity])
        except MalformedPieces as e:
            raise MalformedPieces(e.message, field=f"edges[{idx}].capacity") from e
        if repaired:
            repaired_any = True
            logger.warning(
                f"[NETWORK] Merged adjacent equal pieces on {em.tail}->{em.head}: "
                f"{len(em.capacity)} -> {len(capacity)} pieces"
            )
        edges.append(Edge(em.tail, em.head, capacity, em.length))

    network = TemporalNetwork(
        nodes=tuple(model.nodes),
        edges=tuple(edges),
        tau=model.tau,
        source=model.source,
        sink=model.sink,
        repaired=repaired_any,
    )
    logger.info(f"[NETWORK] Validated network: n={network.n}, m={network.m}, mu={network.mu}")
    return network


def network_to_dict(network: TemporalNetwork) -> Dict[str, Any]:
    """Convert to the canonical JSON document."""
    edges = []
    for edge in network.edges:
        doc: Dict[str, Any] = {"from": edge.tail, "to": edge.head, "capacity": edge.capacity.to_list()}
        if edge.length is not None and edge.length != network.tau:
            doc["length"] = edge.length
        edges.append(doc)
    return {
        "nodes": list(network.nodes),
        "source": network.source,
        "sink": network.sink,
        "tau": network.tau,
        "edges": edges,
    }


def dump_network(network: TemporalNetwork) -> str:
    return json.dumps(network_to_dict(network), separators=(",", ":"))


def load_network(path: Union[str, Path]) -> TemporalNetwork:
    """Read and validate a network file."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except OSError as e:
        raise NetworkFormatError(f"cannot read {path}: {e.strerror}", field="input") from e
    except json.JSONDecodeError as e:
        raise NetworkFormatError(f"{path} is not valid JSON: {e.msg} (line {e.lineno})", field="input") from e
    if not isinstance(raw, dict):
        raise NetworkFormatError("network file must hold a JSON object", field="input")
    return validate_network(raw)
