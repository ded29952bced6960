"""Schedules, sequences and decompositions shared by every other module.

A bin schedule is the triple (b_n, A_n, a): bin ``n`` holds ``b_n`` terms, a
legal decomposition takes a number of terms from bin ``n`` lying in ``A_n``,
and two bins that are both used must differ in index by more than ``a``.
Bins are numbered from 1; positions inside a bin are numbered from 0.

Schedules have a small closed text form::

    const:2/zero-one/adj:1      b_n = 2,      A_n = {0,1},          a = 1
    affine:1,1/zero-one/adj:0   b_n = n + 1,  A_n = {0,1},          a = 0
    pow:2/full/adj:0            b_n = n**2,   A_n = {0,...,b_n},    a = 0
    list:3,3,4/set:0,1,3/adj:0  b_n from the list, A_n = {0,1,3}
    const:3/pair:2/adj:0        A_n = {0,2}   (g-nary sequences)
    affine:1,0/floordiv:2/adj:0 A_n = {0,...,floor(n/2)}
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator


class ZeckError(Exception):
    """Base class for domain errors raised by this package."""


class ScheduleError(ZeckError, ValueError):
    pass


class ScheduleParseError(ScheduleError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


class ScheduleSemanticError(ScheduleError):
    pass


class InvalidScheduleError(ZeckError):
    """The schedule does not satisfy the preconditions of an operation."""


class StateCapExceeded(ZeckError):
    def __init__(self, bin_index: int, states: int, cap: int):
        super().__init__(
            f"achievable-sum state cap exceeded at bin {bin_index}: "
            f"{states} states > cap {cap}"
        )
        self.bin_index = bin_index
        self.states = states
        self.cap = cap


class PreconditionError(ZeckError):
    pass


def binomial(n: int, k: int) -> int:
    """Exact C(n, k); zero when k > n."""
    if n < 0 or k < 0:
        raise ValueError("binomial arguments must be nonnegative")
    return math.comb(n, k)


# -- bin sizes ---------------------------------------------------------------

SIZE_KINDS = ("const", "affine", "pow", "list")
ALLOWED_KINDS = ("zero-one", "full", "full-minus", "set", "pair", "floordiv")


@dataclass(frozen=True)
class SizeRule:
    kind: str
    params: tuple[int, ...]

    def size(self, n: int) -> int:
        if n < 1:
            raise ValueError(f"bin index must be >= 1, got {n}")
        k, p = self.kind, self.params
        if k == "const":
            b = p[0]
        elif k == "affine":
            b = p[0] * n + p[1]
        elif k == "pow":
            b = n ** p[0]
        else:
            if n > len(p):
                raise ScheduleSemanticError(
                    f"bin {n} is beyond the explicit size list of length {len(p)}"
                )
            b = p[n - 1]
        if b < 1:
            raise ScheduleSemanticError(f"bin size b_{n} = {b} is not positive")
        return b

    @property
    def is_constant(self) -> bool:
        return self.kind == "const" or (self.kind == "affine" and self.params[0] == 0) or (
            self.kind == "pow" and self.params[0] == 0
        )

    @property
    def max_bins(self) -> int | None:
        return len(self.params) if self.kind == "list" else None

    def render(self) -> str:
        return f"{self.kind}:" + ",".join(str(v) for v in self.params)


@dataclass(frozen=True)
class AllowedRule:
    kind: str
    params: tuple[int, ...] = ()

    def counts(self, n: int, b: int) -> frozenset[int]:
        k = self.kind
        if k == "zero-one":
            return frozenset((0, 1))
        if k == "full":
            return frozenset(range(b + 1))
        if k == "full-minus":
            return frozenset(range(b))
        if k == "set":
            return frozenset(self.params)
        if k == "pair":
            return frozenset((0, self.params[0]))
        return frozenset(range(n // self.params[0] + 1))

    def max_count(self, n: int, b: int) -> int:
        k = self.kind
        if k == "zero-one":
            return 1
        if k == "full":
            return b
        if k == "full-minus":
            return b - 1
        if k in ("set", "pair"):
            return max(self.params)
        return n // self.params[0]

    def render(self) -> str:
        if self.params:
            return f"{self.kind}:" + ",".join(str(v) for v in self.params)
        return self.kind


@dataclass(frozen=True)
class AllowedSet:
    """A concrete A_n: the permitted numbers of terms taken from one bin."""

    counts: frozenset[int]

    def __post_init__(self):
        if not self.counts:
            raise ScheduleSemanticError("allowed set is empty")
        if min(self.counts) < 0:
            raise ScheduleSemanticError("allowed counts must be nonnegative")

    @classmethod
    def of(cls, *counts: int) -> AllowedSet:
        return cls(frozenset(counts))

    @property
    def m(self) -> int:
        return max(self.counts)

    @property
    def m_prime(self) -> int:
        if len(self.counts) < 2:
            raise ValueError("second-largest count needs at least two counts")
        return max(self.counts - {self.m})

    @property
    def nonzero(self) -> tuple[int, ...]:
        return tuple(sorted(c for c in self.counts if c))

    def __contains__(self, c: object) -> bool:
        return c in self.counts

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.counts))

    def __len__(self) -> int:
        return len(self.counts)

    def __repr__(self) -> str:
        return "{" + ",".join(str(c) for c in self) + "}"


@dataclass(frozen=True)
class BinSchedule:
    sizes: SizeRule
    allowed: AllowedRule
    adjacency: int

    def size(self, n: int) -> int:
        return self.sizes.size(n)

    def allowed_set(self, n: int) -> AllowedSet:
        return expand_allowed(self, n)

    @property
    def is_gnary(self) -> bool:
        return self.allowed.kind == "pair"

    def render(self) -> str:
        return f"{self.sizes.render()}/{self.allowed.render()}/adj:{self.adjacency}"

    def __str__(self) -> str:
        return self.render()


def check_allowed(schedule: BinSchedule, n: int) -> None:
    """Raise if A_n asks for more terms than bin ``n`` holds (without building A_n)."""
    b = schedule.size(n)
    if schedule.allowed.max_count(n, b) > b:
        raise ScheduleSemanticError(
            f"allowed set {schedule.allowed.render()} for bin {n} exceeds b_{n} = {b}"
        )


def expand_allowed(schedule: BinSchedule, n: int) -> AllowedSet:
    """Concrete A_n for bin ``n``; rejects counts above b_n."""
    check_allowed(schedule, n)
    return AllowedSet(schedule.allowed.counts(n, schedule.size(n)))


_UINT = r"(?:0|[1-9][0-9]*)"
_INT = r"(?:0|-?[1-9][0-9]*)"
_SIZE_RE = {
    "const": re.compile(rf"({_UINT})"),
    "affine": re.compile(rf"({_INT}),({_INT})"),
    "pow": re.compile(rf"({_UINT})"),
    "list": re.compile(rf"{_UINT}(?:,{_UINT})*"),
}
_ALLOWED_RE = {
    "set": re.compile(rf"{_UINT}(?:,{_UINT})*"),
    "pair": re.compile(rf"({_UINT})"),
    "floordiv": re.compile(rf"({_UINT})"),
}
_DIGITS = re.compile(r"[0-9]+")


def _ints(body: str) -> tuple[int, ...]:
    return tuple(int(v) for v in body.split(","))


_COMPLETIONS = ("", "0", "1", ",0", "0,0")


def _viable_prefix(pat: re.Pattern, body: str) -> int:
    # Length of the longest prefix of ``body`` that some valid body extends.
    for i in range(len(body), -1, -1):
        if any(pat.fullmatch(body[:i] + c) for c in _COMPLETIONS):
            return i
    return 0


def parse_schedule(text: str) -> BinSchedule:
    """Parse ``SIZESPEC/ALLOWSPEC/adj:UINT`` into a :class:`BinSchedule`.

    Raises :class:`ScheduleParseError` (with a character position) for text
    outside the grammar and :class:`ScheduleSemanticError` when the allowed
    counts exceed the size of bin 1 (or of any listed bin).
    """
    parts = text.split("/")
    if len(parts) != 3:
        pos = len(text) if len(parts) < 3 else len("/".join(parts[:3]))
        raise ScheduleParseError("expected SIZESPEC/ALLOWSPEC/adj:UINT", text, pos)
    size_txt, allow_txt, adj_txt = parts
    off_allow = len(size_txt) + 1
    off_adj = off_allow + len(allow_txt) + 1

    kind, sep, body = size_txt.partition(":")
    if kind not in SIZE_KINDS or not sep:
        raise ScheduleParseError(f"unknown bin-size rule {kind!r}", text, 0)
    pat = _SIZE_RE[kind]
    if not pat.fullmatch(body):
        pos = len(kind) + 1 + _viable_prefix(pat, body)
        raise ScheduleParseError(f"malformed {kind} parameters", text, pos)
    sizes = SizeRule(kind, _ints(body))

    kind, sep, body = allow_txt.partition(":")
    if kind in ("zero-one", "full", "full-minus"):
        if sep:
            raise ScheduleParseError(f"{kind} takes no parameters", text, off_allow + len(kind))
        allowed = AllowedRule(kind)
    elif kind in _ALLOWED_RE and sep:
        pat = _ALLOWED_RE[kind]
        if not pat.fullmatch(body):
            pos = off_allow + len(kind) + 1 + _viable_prefix(pat, body)
            raise ScheduleParseError(f"malformed {kind} parameters", text, pos)
        params = _ints(body)
        if kind == "set":
            params = tuple(sorted(set(params)))
        allowed = AllowedRule(kind, params)
    else:
        raise ScheduleParseError(f"unknown allowed-set rule {kind!r}", text, off_allow)

    if not adj_txt.startswith("adj:"):
        raise ScheduleParseError("expected 'adj:'", text, off_adj)
    if not re.fullmatch(_UINT, adj_txt[4:]):
        m = _DIGITS.match(adj_txt[4:])
        pos = off_adj + 4 + (m.end() if m else 0)
        raise ScheduleParseError("malformed adjacency", text, pos)
    schedule = BinSchedule(sizes, allowed, int(adj_txt[4:]))

    if allowed.kind == "floordiv" and allowed.params[0] == 0:
        raise ScheduleSemanticError("floordiv divisor must be positive")
    if allowed.kind == "pair" and allowed.params[0] == 0:
        raise ScheduleSemanticError("pair count must be positive")
    for n in range(1, (sizes.max_bins or 1) + 1):
        check_allowed(schedule, n)
    return schedule


def render_schedule(schedule: BinSchedule) -> str:
    return schedule.render()


# -- materialized sequences --------------------------------------------------


@dataclass(frozen=True)
class Sequence:
    """Full bins of a schedule. Bin ``n`` is ``bins[n - 1]``."""

    schedule: BinSchedule
    bins: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "bins", tuple(tuple(b) for b in self.bins))
        prev = 0
        for n, terms in enumerate(self.bins, start=1):
            b = self.schedule.size(n)
            if 0 not in expand_allowed(self.schedule, n):
                raise ValueError(f"A_{n} must contain 0 (every bin may be left unused)")
            if len(terms) != b:
                raise ValueError(f"bin {n} has {len(terms)} terms, expected {b}")
            if terms[0] < 1:
                raise ValueError(f"bin {n} holds a non-positive term")
            if any(x >= y for x, y in zip(terms, terms[1:])):
                raise ValueError(f"bin {n} is not strictly increasing: {terms}")
            if terms[0] < prev or (terms[0] == prev and not self.schedule.is_gnary):
                raise ValueError(f"bin {n} starts below the previous bin: {terms}")
            prev = terms[-1]

    @property
    def num_bins(self) -> int:
        return len(self.bins)

    def bin(self, n: int) -> tuple[int, ...]:
        if not 1 <= n <= len(self.bins):
            raise IndexError(f"bin {n} is not materialized (have {len(self.bins)})")
        return self.bins[n - 1]

    def allowed(self, n: int) -> AllowedSet:
        return expand_allowed(self.schedule, n)

    @property
    def adjacency(self) -> int:
        return self.schedule.adjacency

    def flat(self) -> list[int]:
        return [x for terms in self.bins for x in terms]

    def truncated(self, num_bins: int) -> Sequence:
        return Sequence(self.schedule, self.bins[:num_bins])


@dataclass(frozen=True)
class Decomposition:
    """A selection of terms. ``picks`` is ``((bin, positions), ...)`` by bin."""

    picks: tuple[tuple[int, tuple[int, ...]], ...]
    value: int

    @classmethod
    def from_picks(cls, seq: Sequence, picks: dict[int, tuple[int, ...]] | list) -> Decomposition:
        items = picks.items() if isinstance(picks, dict) else picks
        norm = tuple(sorted((n, tuple(sorted(pos))) for n, pos in items if pos))
        value = sum(seq.bin(n)[p] for n, pos in norm for p in pos)
        return cls(norm, value)

    @property
    def bins_used(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.picks)

    @property
    def top_bin(self) -> int:
        return self.picks[-1][0] if self.picks else 0

    @property
    def num_summands(self) -> int:
        return sum(len(pos) for _, pos in self.picks)

    def summands(self, seq: Sequence) -> list[int]:
        return sorted(seq.bin(n)[p] for n, pos in self.picks for p in pos)

    def sort_key(self) -> tuple:
        # Descending (bin, position) pairs; larger keys come first in canonical order.
        return tuple(sorted(((n, p) for n, pos in self.picks for p in pos), reverse=True))

    def violations(self, seq: Sequence) -> list[str]:
        out = []
        for n, pos in self.picks:
            if not 1 <= n <= seq.num_bins:
                out.append(f"bin {n} not materialized")
                continue
            if len(set(pos)) != len(pos) or any(not 0 <= p < len(seq.bin(n)) for p in pos):
                out.append(f"bad positions {pos} in bin {n}")
            if len(pos) not in seq.allowed(n):
                out.append(f"{len(pos)} terms from bin {n} not in A_{n} = {seq.allowed(n)!r}")
        used = self.bins_used
        for m, n in zip(used, used[1:]):
            if n - m <= seq.adjacency:
                out.append(f"bins {m} and {n} are within adjacency {seq.adjacency}")
        if not out and self.value != sum(self.summands(seq)):
            out.append(f"value {self.value} != sum of summands")
        return out

    def is_legal(self, seq: Sequence) -> bool:
        return not self.violations(seq)


def count_summands(d: Decomposition) -> int:
    return d.num_summands
