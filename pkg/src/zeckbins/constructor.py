"""Greedy construction of bin sequences and the achievable-sum engine.

Achievable sums are kept as Python ints used as bitsets (bit ``s`` set means
``s`` is the value of some legal selection). Each bitset is keyed by a tag:
the last used bin if it is still close enough to the frontier to block a
future bin, else ``None``. Older picks can never constrain a later bin, so
collapsing them to ``None`` keeps the state finite without changing the set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .core import (
    AllowedSet,
    BinSchedule,
    InvalidScheduleError,
    Sequence,
    StateCapExceeded,
    expand_allowed,
)

DEFAULT_STATE_CAP = 10_000_000
# A bitset wider than this many bits per allowed state is refused as well;
# sparse sum sets (g-nary) would otherwise cost memory far beyond the cap.
_BITS_PER_STATE = 64


def bits(mask: int) -> Iterator[int]:
    """Positions of the set bits of ``mask`` in increasing order."""
    pos = 0
    while mask:
        low = mask & -mask
        pos = low.bit_length() - 1
        yield pos
        mask ^= low


def mex_positive(mask: int) -> int:
    """Smallest positive integer whose bit is clear (bit 0 is always set)."""
    return ((mask + 1) & ~mask).bit_length() - 1


@dataclass(frozen=True)
class AchievableSums:
    """Values of every legal selection from bins ``1..through``.

    ``masks`` maps an adjacency tag to the bitset of sums reachable with that
    tag. The frontier is bin ``through + 1``.
    """

    through: int
    adjacency: int
    masks: dict[int | None, int]

    @property
    def plain_mask(self) -> int:
        out = 0
        for m in self.masks.values():
            out |= m
        return out

    @property
    def plain_sums(self) -> frozenset[int]:
        return frozenset(bits(self.plain_mask))

    @property
    def states(self) -> frozenset[tuple[int, int | None]]:
        return frozenset((s, tag) for tag, m in self.masks.items() for s in bits(m))

    @property
    def num_states(self) -> int:
        return sum(m.bit_count() for m in self.masks.values())

    @property
    def count(self) -> int:
        return self.plain_mask.bit_count()

    @property
    def max(self) -> int:
        return self.plain_mask.bit_length() - 1

    def mex(self) -> int:
        return mex_positive(self.plain_mask)

    def __contains__(self, s: int) -> bool:
        return s >= 0 and bool((self.plain_mask >> s) & 1)

    def is_interval(self) -> bool:
        m = self.plain_mask
        return m & (m + 1) == 0


def _absorb(mask: int, terms: tuple[int, ...] | list[int], counts: tuple[int, ...]) -> int:
    """Bitset of ``s + t`` for ``s`` in ``mask`` and ``t`` a sum of ``c`` terms, ``c`` in counts."""
    if not counts or not terms:
        return 0
    top = min(max(counts), len(terms))
    layers = [mask] + [0] * top
    for t in terms:
        for c in range(top, 0, -1):
            if layers[c - 1]:
                layers[c] |= layers[c - 1] << t
    out = 0
    for c in counts:
        if c <= top:
            out |= layers[c]
    return out


def _check_cap(masks: dict, n: int, cap: int) -> None:
    states = sum(m.bit_count() for m in masks.values())
    width = max((m.bit_length() for m in masks.values()), default=0)
    if states > cap or width > cap * _BITS_PER_STATE:
        raise StateCapExceeded(n, max(states, width // _BITS_PER_STATE), cap)


def _step(masks: dict, n: int, terms, allowed: AllowedSet, a: int) -> dict:
    """Advance the tagged state across a full bin ``n``."""
    counts = allowed.nonzero
    out: dict[int | None, int] = {}
    for tag, mask in masks.items():
        keep = tag if tag is not None and n + 1 - tag <= a else None
        out[keep] = out.get(keep, 0) | (mask if 0 in allowed else 0)
        if tag is None or n - tag > a:
            new_tag = n if a >= 1 else None
            out[new_tag] = out.get(new_tag, 0) | _absorb(mask, terms, counts)
    return {t: m for t, m in out.items() if m}


def _reachable_with_partial(masks: dict, n: int, terms, allowed: AllowedSet, a: int) -> int:
    counts = allowed.nonzero
    out = 0
    for tag, mask in masks.items():
        out |= mask
        if tag is None or n - tag > a:
            out |= _absorb(mask, terms, counts)
    return out


def achievable_sums(
    seq: Sequence, through_bin: int | None = None, state_cap: int = DEFAULT_STATE_CAP
) -> AchievableSums:
    """All legal selection values using bins ``1..through_bin`` (0 included)."""
    if through_bin is None:
        through_bin = seq.num_bins
    if not 0 <= through_bin <= seq.num_bins:
        raise ValueError(f"through_bin={through_bin} outside 0..{seq.num_bins}")
    a = seq.adjacency
    masks: dict[int | None, int] = {None: 1}
    for n in range(1, through_bin + 1):
        masks = _step(masks, n, seq.bin(n), seq.allowed(n), a)
        _check_cap(masks, n, state_cap)
    return AchievableSums(through_bin, a, masks)


def omega(seq: Sequence, n: int, state_cap: int = DEFAULT_STATE_CAP) -> int:
    """Largest value legally representable with bins ``1..n``."""
    return achievable_sums(seq, n, state_cap).max


def check_standard(schedule: BinSchedule, num_bins: int) -> None:
    for n in range(1, num_bins + 1):
        allowed = expand_allowed(schedule, n)
        if 0 not in allowed or 1 not in allowed:
            raise InvalidScheduleError(
                f"greedy construction needs 0 and 1 in every A_n; A_{n} = {allowed!r}"
            )


def build_sequence(
    schedule: BinSchedule, num_bins: int, state_cap: int = DEFAULT_STATE_CAP
) -> Sequence:
    """Greedy (b_n, A_n, a)-sequence with ``num_bins`` full bins.

    Every new term is the least positive integer that no legal selection of
    the terms placed so far (including those already in the current bin)
    can produce.

    >>> from zeckbins.core import parse_schedule
    >>> build_sequence(parse_schedule("const:1/zero-one/adj:1"), 7).flat()
    [1, 2, 3, 5, 8, 13, 21]
    """
    if num_bins < 0:
        raise ValueError("num_bins must be nonnegative")
    check_standard(schedule, num_bins)
    a = schedule.adjacency
    masks: dict[int | None, int] = {None: 1}
    bins: list[tuple[int, ...]] = []
    for n in range(1, num_bins + 1):
        allowed = expand_allowed(schedule, n)
        current: list[int] = []
        for _ in range(schedule.size(n)):
            reach = _reachable_with_partial(masks, n, current, allowed, a)
            current.append(mex_positive(reach))
        bins.append(tuple(current))
        if n < num_bins:
            masks = _step(masks, n, current, allowed, a)
            _check_cap(masks, n, state_cap)
    return Sequence(schedule, tuple(bins))
