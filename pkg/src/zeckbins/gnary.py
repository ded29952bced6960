"""g-nary sequences: A_n = {0, g}, no adjacency, sums must stay distinct.

Bins are filled one whole bin at a time: a bin is the lexicographically
smallest increasing tuple (starting no lower than the previous bin's last
term) that keeps every legal selection value distinct. Term-at-a-time greed
is not enough, since a locally harmless term can leave no valid completion.

A new bin keeps sums distinct iff no difference of two of its possible
contributions (0 or a sum of ``g`` of its terms) is a difference of two
values already representable. Representable sets and their difference sets
are kept as int bitsets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .constructor import DEFAULT_STATE_CAP, achievable_sums
from .core import AllowedRule, BinSchedule, Sequence, SizeRule, ZeckError, binomial


class WindowExhausted(ZeckError):
    def __init__(self, bin_index: int, limit: int):
        super().__init__(f"no valid assignment for bin {bin_index} with terms up to {limit}")
        self.bin_index = bin_index
        self.limit = limit


def gnary_schedule(b: int, g: int) -> BinSchedule:
    if not 1 <= g <= b:
        raise ValueError(f"need 1 <= g <= b, got b={b}, g={g}")
    return BinSchedule(SizeRule("const", (b,)), AllowedRule("pair", (g,)), 0)


def _differences(mask: int) -> int:
    """Bitset of ``|u - v|`` over set bits ``u, v`` of ``mask``."""
    out = 0
    m = mask
    while m:
        low = m & -m
        out |= mask >> (low.bit_length() - 1)
        m ^= low
    return out


def _contributions(terms: tuple[int, ...], g: int) -> list[int]:
    return [0] + [sum(c) for c in combinations(terms, g)]


def _keeps_distinct(terms: tuple[int, ...], g: int, diffs: int) -> bool:
    w = sorted(_contributions(terms, g))
    for i in range(len(w)):
        for j in range(i + 1, len(w)):
            d = w[j] - w[i]
            if d == 0 or (diffs >> d) & 1:
                return False
    return True


def _fill_bin(n: int, b: int, g: int, lo: int, diffs: int, hi: int) -> tuple[int, ...]:
    # Two terms x < y of one bin give contributions differing by y - x whenever
    # some (g-1)-subset avoids both, so that difference must avoid ``diffs``.
    swap_rule = b - 2 >= g - 1 and g >= 1
    chosen: list[int] = []

    def ok_pairwise(x: int) -> bool:
        if not swap_rule:
            return True
        return not any((diffs >> (x - y)) & 1 for y in chosen)

    def rec(start: int) -> bool:
        if len(chosen) == b:
            return _keeps_distinct(tuple(chosen), g, diffs)
        for x in range(start, hi + 1):
            if not ok_pairwise(x):
                continue
            chosen.append(x)
            if len(chosen) >= g and not _keeps_distinct(tuple(chosen), g, diffs):
                chosen.pop()
                continue
            if rec(x + 1):
                return True
            chosen.pop()
        return False

    if not rec(lo):
        raise WindowExhausted(n, hi)
    return tuple(chosen)


def build_gnary_bruteforce(b: int, g: int, num_bins: int, window: int = 4) -> Sequence:
    """Whole-bin lexicographic search; terms of bin ``n`` are searched up to
    ``last + window * (omega_{n-1} + 1) * b``."""
    schedule = gnary_schedule(b, g)
    mask = 1  # representable values so far
    bins: list[tuple[int, ...]] = []
    last = 1
    for n in range(1, num_bins + 1):
        om = mask.bit_length() - 1
        diffs = _differences(mask)
        hi = last + window * (om + 1) * b
        terms = _fill_bin(n, b, g, last, diffs, hi)
        bins.append(terms)
        last = terms[-1]
        new = 0
        for w in set(_contributions(terms, g)):
            new |= mask << w
        mask = new
    return Sequence(schedule, tuple(bins))


def build_gnary_gapformula(b: int, g: int, num_bins: int, window: int = 4) -> Sequence:
    """Bin 1 from the brute-force search, then each bin starts at the previous
    bin's last term and steps by ``omega_{n-1} + 1``."""
    schedule = gnary_schedule(b, g)
    bins = [build_gnary_bruteforce(b, g, 1, window).bin(1)]
    om = sum(bins[0][-g:])
    for _ in range(2, num_bins + 1):
        start = bins[-1][-1]
        terms = tuple(start + j * (om + 1) for j in range(b))
        bins.append(terms)
        om += sum(terms[-g:])
    return Sequence(schedule, tuple(bins))


def first_mismatch(a: Sequence, b: Sequence) -> int | None:
    """First bin index where two sequences differ, else ``None``."""
    for n, (x, y) in enumerate(zip(a.bins, b.bins), start=1):
        if x != y:
            return n
    if a.num_bins != b.num_bins:
        return min(a.num_bins, b.num_bins) + 1
    return None


@dataclass
class GnaryReport:
    bins: tuple[tuple[int, ...], ...]
    omegas: list[int]  # omegas[n] for n = 0..N
    gaps: dict[tuple[int, int], int] = field(default_factory=dict)  # (n, j) -> G_{n,j}, j >= 2
    gap_verdicts: dict[tuple[int, int], bool] = field(default_factory=dict)
    uniform_gap_verdicts: dict[tuple[int, int], bool] = field(default_factory=dict)
    literal_remark_verdicts: dict[tuple[int, int], bool] = field(default_factory=dict)
    representable: list[int] = field(default_factory=list)  # |I_n| for n = 1..N
    predicted: list[int | None] = field(default_factory=list)

    @property
    def all_gaps_exceed_omega(self) -> bool:
        return all(self.gap_verdicts.values())

    @property
    def gaps_equal_omega_plus_one(self) -> bool:
        return all(self.uniform_gap_verdicts.values())


def count_representable(seq: Sequence, n: int, state_cap: int = DEFAULT_STATE_CAP) -> tuple[int, int | None]:
    """``(|I_n|, predicted)``; ``I_n`` includes 0.

    The prediction is ``(C(b, g) + 1)^n`` for constant bin size ``b`` and
    ``1 + sum_i C(n, i) C(b_i, g)^i`` otherwise; ``None`` unless A_n = {0, g}.
    """
    actual = achievable_sums(seq, n, state_cap).count
    sched = seq.schedule
    if sched.allowed.kind != "pair":
        return actual, None
    g = sched.allowed.params[0]
    if sched.sizes.is_constant:
        return actual, (binomial(sched.size(1), g) + 1) ** n
    return actual, 1 + sum(binomial(n, i) * binomial(sched.size(i), g) ** i for i in range(1, n + 1))


def gap_report(seq: Sequence, state_cap: int = DEFAULT_STATE_CAP) -> GnaryReport:
    """Gaps inside each bin against the largest value representable below it.

    ``gap_verdicts[(n, j)]`` is ``G_{n,j} > omega_{n-1}``;
    ``uniform_gap_verdicts[(n, j)]`` is ``G_{n,j} == omega_{n-1} + 1`` and
    ``literal_remark_verdicts[(n, j)]`` is ``G_{n,j} == omega_n``.
    """
    omegas = [0] + [achievable_sums(seq, n, state_cap).max for n in range(1, seq.num_bins + 1)]
    rep = GnaryReport(seq.bins, omegas)
    for n, terms in enumerate(seq.bins, start=1):
        for j in range(2, len(terms) + 1):
            gap = terms[j - 1] - terms[j - 2]
            rep.gaps[(n, j)] = gap
            rep.gap_verdicts[(n, j)] = gap > omegas[n - 1]
            if n >= 2:
                rep.uniform_gap_verdicts[(n, j)] = gap == omegas[n - 1] + 1
                rep.literal_remark_verdicts[(n, j)] = gap == omegas[n]
        actual, predicted = count_representable(seq, n, state_cap)
        rep.representable.append(actual)
        rep.predicted.append(predicted)
    return rep
