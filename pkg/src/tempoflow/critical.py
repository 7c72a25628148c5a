"""
Breaktimes and critical times of a temporal network.

The breaktime set holds every time at which some capacity changes value,
plus 0, T and the sentinel T+1. Critical times offset each breaktime by
every multiple l*tau with l in [0, n] in both directions, clamped to
[0, T]. A cTEN built over the critical times has the same min cut as the
full time-expanded network.

Networks with a few distinct static lengths use the generalized set: each
breaktime offset by sum(a_g * g) for a_g in [-n, n], one coefficient per
distinct length g.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Tuple

from sortedcontainers import SortedSet

from .config import get_settings
from .errors import LengthsNotCovered, TooManyDistinctLengths
from .network import TemporalNetwork

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BreaktimeSet:
    """Sorted breaktimes, including 0, T and the sentinel T+1."""

    times: Tuple[int, ...]
    horizon: int

    def __iter__(self) -> Iterator[int]:
        return iter(self.times)

    def __len__(self) -> int:
        return len(self.times)

    def __contains__(self, t: object) -> bool:
        return t in self.times


@dataclass(frozen=True)
class CriticalTimeSet:
    """Sorted critical times, all within [0, T]; always contains 0 and T."""

    times: Tuple[int, ...]
    horizon: int

    def __iter__(self) -> Iterator[int]:
        return iter(self.times)

    def __len__(self) -> int:
        return len(self.times)

    def __contains__(self, t: object) -> bool:
        return t in self.times

    @classmethod
    def full(cls, horizon: int) -> "CriticalTimeSet":
        """Every time step in [0, T]; the cTEN over this set is the TEN."""
        return cls(tuple(range(horizon + 1)), horizon)

    @classmethod
    def of(cls, times: Iterable[int], horizon: int) -> "CriticalTimeSet":
        """Wrap an arbitrary set of times (e.g. a deliberately coarse one)."""
        return cls(tuple(sorted(set(times))), horizon)


def breaktimes(network: TemporalNetwork, horizon: int) -> BreaktimeSet:
    """
    Change times of all capacity functions within [1, T], plus {0, T, T+1}.

    Scans piece boundaries only, so runs in O(mu log mu) regardless of T.
    """
    times = SortedSet([0, horizon, horizon + 1])
    for edge in network.edges:
        times.update(t for t in edge.capacity.change_times() if 1 <= t <= horizon)
    return BreaktimeSet(tuple(times), horizon)


def _offset_set(thetas: Iterable[int], offsets: Iterable[int], horizon: int) -> Tuple[int, ...]:
    offsets = sorted(set(offsets))
    times = SortedSet([0, horizon])
    for theta in thetas:
        times.update(t for t in (theta + o for o in offsets) if 0 <= t <= horizon)
    return tuple(times)


def critical_times(network: TemporalNetwork, horizon: int) -> CriticalTimeSet:
    """
    crit(N) clamped to [0, T].

    For networks whose edges do not all share tau, this is the generalized
    set over the network's distinct lengths.
    """
    if not network.is_uniform:
        return generalized_critical_times(network, sorted(network.lengths), horizon)

    breaks = breaktimes(network, horizon)
    tau = network.tau
    offsets = [sign * ell * tau for ell in range(network.n + 1) for sign in (1, -1)]
    result = CriticalTimeSet(_offset_set(breaks, offsets, horizon), horizon)
    logger.info(
        f"[CRITICAL] |breaktimes|={len(breaks)}, |crit|={len(result)} "
        f"(n={network.n}, tau={tau}, T={horizon})"
    )
    return result


def generalized_critical_times(
    network: TemporalNetwork,
    lengths: Iterable[int],
    horizon: int,
    max_distinct: Optional[int] = None,
) -> CriticalTimeSet:
    """
    Critical times for a network with a small set of distinct static lengths.

    Args:
        network: The temporal network (edges may carry their own lengths)
        lengths: Gamma, the distinct edge lengths
        horizon: T
        max_distinct: Bound c on |Gamma| (default from settings)

    Returns:
        {theta + sum(a_g * g) : theta a breaktime, a_g in [-n, n]} clamped to [0, T]

    Raises:
        TooManyDistinctLengths: if |Gamma| exceeds the bound
        LengthsNotCovered: if some edge length is not in Gamma
    """
    gamma = sorted(set(lengths))
    bound = max_distinct if max_distinct is not None else get_settings().max_distinct_lengths
    if len(gamma) > bound:
        raise TooManyDistinctLengths(
            f"{len(gamma)} distinct edge lengths exceed the configured bound {bound}",
            field="lengths",
        )
    missing = sorted(network.lengths - set(gamma))
    if missing:
        raise LengthsNotCovered(f"edge lengths {missing} are not in {gamma}", field="lengths")

    n = network.n
    offsets = {0}
    for coefficients in itertools.product(range(-n, n + 1), repeat=len(gamma)):
        offsets.add(sum(a * g for a, g in zip(coefficients, gamma)))

    breaks = breaktimes(network, horizon)
    result = CriticalTimeSet(_offset_set(breaks, offsets, horizon), horizon)
    logger.info(
        f"[CRITICAL] Generalized crit over lengths {gamma}: |breaktimes|={len(breaks)}, "
        f"|crit|={len(result)}"
    )
    return result


def interval_starts(times: Iterable[int]) -> Tuple[int, ...]:
    """Sorted, deduplicated interval start times."""
    return tuple(sorted(set(times)))
