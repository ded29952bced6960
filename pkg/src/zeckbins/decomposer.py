"""Legal decompositions of a target against a materialized sequence.

The search walks bins from the top down. Inside a bin it tries term subsets
in decreasing order of their (descending) position tuples, so the first hit is
the one that uses the largest terms as early as possible. Because of that the
search order and the canonical order of :class:`DecompositionSet` coincide.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .core import Decomposition, Sequence, count_summands

DEFAULT_LIMIT = 1000


@dataclass(frozen=True)
class DecompositionSet:
    target: int
    found: tuple[Decomposition, ...]
    truncated: bool

    def __len__(self) -> int:
        return len(self.found)


def prefix_omegas(seq: Sequence) -> list[int]:
    """``out[n]`` is the largest legal value using bins ``1..n`` (``out[0] = 0``)."""
    a = seq.adjacency
    out = [0]
    for n in range(1, seq.num_bins + 1):
        terms = seq.bin(n)
        m = min(seq.allowed(n).m, len(terms))
        top = sum(terms[len(terms) - m:]) if m else 0
        out.append(max(out[n - 1], top + out[max(n - a - 1, 0)]))
    return out


def bin_choices(
    terms: tuple[int, ...], counts: tuple[int, ...], lo: int, hi: int
) -> Iterator[tuple[tuple[int, ...], int]]:
    """Nonempty position tuples (descending) of legal size with sum in ``[lo, hi]``.

    Yields ``(positions, total)`` with extensions of a prefix ahead of the
    prefix itself, which is the canonical descending order.
    """
    if not counts:
        return
    top = max(counts)
    allowed = frozenset(counts)

    def rec(start: int, size: int, total: int, prefix: tuple[int, ...]):
        for p in range(start - 1, -1, -1):
            t = total + terms[p]
            if t > hi:
                continue
            room = min(top - size - 1, p)
            if t + sum(terms[p - room:p]) < lo:
                break  # terms ascend, so smaller p cannot reach lo either
            if room > 0:
                yield from rec(p, size + 1, t, prefix + (p,))
            if size + 1 in allowed and t >= lo:
                yield prefix + (p,), t

    yield from rec(len(terms), 0, 0, ())


def _search(seq: Sequence, x: int, top_bins: range | None = None) -> Iterator[Decomposition]:
    omegas = prefix_omegas(seq)
    a = seq.adjacency
    nonzero = [()] + [seq.allowed(n).nonzero for n in range(1, seq.num_bins + 1)]
    picks: list[tuple[int, tuple[int, ...]]] = []

    def dfs(n: int, r: int, first: bool) -> Iterator[Decomposition]:
        if r == 0:
            yield Decomposition.from_picks(seq, picks)
            return
        if n <= 0 or r > omegas[n]:
            return
        below = max(n - a - 1, 0)
        if not (first and top_bins is not None and n not in top_bins):
            for pos, s in bin_choices(seq.bin(n), nonzero[n], r - omegas[below], r):
                picks.append((n, pos))
                yield from dfs(below, r - s, False)
                picks.pop()
        if not (first and top_bins is not None and n - 1 < top_bins.start):
            yield from dfs(n - 1, r, first)

    yield from dfs(seq.num_bins, x, True)


def enumerate_decompositions(seq: Sequence, x: int, limit: int = DEFAULT_LIMIT) -> DecompositionSet:
    """All legal decompositions of ``x`` in canonical order, at most ``limit``.

    ``truncated`` is set when more than ``limit`` decompositions exist.
    """
    if x < 1:
        raise ValueError("target must be positive")
    if limit < 1:
        raise ValueError("limit must be at least 1")
    found: list[Decomposition] = []
    truncated = False
    for d in _search(seq, x):
        if len(found) == limit:
            truncated = True
            break
        found.append(d)
    return DecompositionSet(x, tuple(found), truncated)


def decompose(seq: Sequence, x: int) -> Decomposition | None:
    """First legal decomposition of ``x`` in canonical order, or ``None``."""
    if x < 1:
        raise ValueError("target must be positive")
    return next(_search(seq, x), None)


def decompose_above(seq: Sequence, x: int, n: int) -> Decomposition | None:
    """First decomposition of ``x`` whose top bin is strictly above ``n``."""
    if n >= seq.num_bins:
        return None
    return next(_search(seq, x, range(n + 1, seq.num_bins + 1)), None)


def iter_selections(seq: Sequence, top: int) -> Iterator[tuple[int, int]]:
    """``(value, summands)`` of every legal selection whose highest used bin is ``top``.

    Selections come out in canonical order.
    """
    a = seq.adjacency
    inf = float("inf")

    def below(n: int, total: int, k: int) -> Iterator[tuple[int, int]]:
        if n <= 0:
            yield total, k
            return
        allowed = seq.allowed(n)
        for pos, s in bin_choices(seq.bin(n), allowed.nonzero, 0, inf):
            yield from below(n - a - 1, total + s, k + len(pos))
        yield from below(n - 1, total, k)

    terms = seq.bin(top)
    for pos, s in bin_choices(terms, seq.allowed(top).nonzero, 0, inf):
        yield from below(top - a - 1, s, len(pos))


__all__ = [
    "DecompositionSet",
    "count_summands",
    "decompose",
    "decompose_above",
    "enumerate_decompositions",
    "iter_selections",
    "prefix_omegas",
    "bin_choices",
]
