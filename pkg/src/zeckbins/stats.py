"""Exact summand-count statistics for schedules without adjacency.

Bin ``n`` contributes ``Y_n`` summands, where ``P(Y_n = i)`` is proportional
to ``C(b_n, i)`` for ``i`` in ``A_n``. Everything here is computed with
:class:`fractions.Fraction`; floats appear only in :func:`gaussian_distance`
and when results are rendered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .core import AllowedSet, BinSchedule, InvalidScheduleError, PreconditionError, Sequence, ZeckError, binomial
from .decomposer import decompose_above, iter_selections

DEFAULT_SELECTION_CAP = 5_000_000


class ZeroVarianceError(ZeckError):
    pass


class EnumerationCapExceeded(ZeckError):
    pass


@dataclass(frozen=True)
class BinPMF:
    n: int | None
    support: tuple[int, ...]
    probs: tuple[Fraction, ...]

    def prob(self, i: int) -> Fraction:
        return dict(zip(self.support, self.probs)).get(i, Fraction(0))


@dataclass(frozen=True)
class MomentTriple:
    n: int | None
    delta: int
    mu: Fraction
    sigma2: Fraction
    rho2d: Fraction


def _require_delta(delta: int) -> None:
    if not isinstance(delta, int) or delta < 1:
        raise ValueError(f"delta must be a positive integer, got {delta!r}")


def _weights(b: int, allowed: AllowedSet) -> list[tuple[int, int]]:
    if max(allowed.counts) > b:
        raise ValueError(f"allowed set {allowed!r} exceeds bin size {b}")
    return [(i, binomial(b, i)) for i in allowed]


def bin_pmf(b: int, allowed: AllowedSet, n: int | None = None) -> BinPMF:
    w = _weights(b, allowed)
    total = sum(c for _, c in w)
    return BinPMF(n, tuple(i for i, _ in w), tuple(Fraction(c, total) for _, c in w))


def bin_moments(b: int, allowed: AllowedSet, delta: int, n: int | None = None) -> MomentTriple:
    """Mean, variance and ``E|Y - mu|^(2+delta)`` of one bin's summand count.

    The variance uses the pairwise form ``sum_{i != j} (i-j)^2 C_i C_j / (2 W^2)``
    and the absolute moment ``sum_i C_i |sum_t (i-t) C_t|^(2+delta) / W^(3+delta)``,
    with ``C_i = C(b, i)`` and ``W = sum_t C_t``.
    """
    _require_delta(delta)
    w = _weights(b, allowed)
    total = sum(c for _, c in w)
    mu = Fraction(sum(i * c for i, c in w), total)
    pair = sum((i - j) ** 2 * ci * cj for i, ci in w for j, cj in w if i != j)
    sigma2 = Fraction(pair, 2 * total * total)
    p = 2 + delta
    num = sum(ci * abs(sum((i - t) * ct for t, ct in w)) ** p for i, ci in w)
    rho = Fraction(num, total ** (p + 1))
    return MomentTriple(n, delta, mu, sigma2, rho)


def schedule_moments(schedule: BinSchedule, n: int, delta: int) -> MomentTriple:
    return bin_moments(schedule.size(n), schedule.allowed_set(n), delta, n)


@dataclass(frozen=True)
class LyapunovRow:
    N: int
    s2: Fraction
    e: Fraction
    squared_ratio: Fraction | None  # None while s2 == 0


@dataclass
class LyapunovSeries:
    delta: int
    rows: list[LyapunovRow] = field(default_factory=list)

    def ratio(self, N: int) -> Fraction | None:
        return self.rows[N - 1].squared_ratio


def _require_no_adjacency(schedule: BinSchedule) -> None:
    if schedule.adjacency != 0:
        raise InvalidScheduleError(
            f"summand statistics are defined for adjacency 0, got {schedule.adjacency}"
        )


def lyapunov_series(schedule: BinSchedule, delta: int, max_n: int) -> LyapunovSeries:
    """Cumulative variance, cumulative absolute moment and the squared Lyapunov ratio.

    Row ``N`` sums bins ``1..N``: ``s2 = sum sigma_n^2``, ``e = sum rho_n^(2+delta)``
    and ``squared_ratio = e^2 / s2^(2+delta)``.
    """
    _require_no_adjacency(schedule)
    _require_delta(delta)
    out = LyapunovSeries(delta)
    s2 = e = Fraction(0)
    for N in range(1, max_n + 1):
        m = schedule_moments(schedule, N, delta)
        s2 += m.sigma2
        e += m.rho2d
        ratio = e * e / s2 ** (2 + delta) if s2 else None
        out.rows.append(LyapunovRow(N, s2, e, ratio))
    return out


# -- number-of-summands distributions ---------------------------------------


@dataclass(frozen=True)
class SummandPMF:
    """Distribution of the number of summands.

    ``counts[k]`` is an integer weight: the number of selections (model) or
    of integers (empirical) with ``k`` summands.
    """

    source: str  # "model" | "empirical"
    N: int
    include_top_bin: bool
    counts: dict[int, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def support(self) -> list[int]:
        return sorted(self.counts)

    @property
    def probs(self) -> dict[int, Fraction]:
        t = self.total
        return {k: Fraction(self.counts[k], t) for k in self.support}

    @property
    def mean(self) -> Fraction:
        return sum((k * p for k, p in self.probs.items()), Fraction(0))

    @property
    def variance(self) -> Fraction:
        mu = self.mean
        return sum(((k - mu) ** 2 * p for k, p in self.probs.items()), Fraction(0))


def _convolve(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _count_poly(b: int, counts, skip_zero: bool = False) -> list[int]:
    poly = [0] * (max(counts) + 1)
    for i in counts:
        if i or not skip_zero:
            poly[i] = binomial(b, i)
    return poly


def model_summand_pmf(schedule: BinSchedule, N: int, include_top_bin: bool = True) -> SummandPMF:
    """Exact law of ``Y_1 + ... + Y_{N-1}`` (plus a nonzero ``Y_N`` if requested).

    Each bin contributes the count polynomial ``sum_{i in A_n} C(b_n, i) x^i``;
    the top bin drops its ``i = 0`` term.
    """
    _require_no_adjacency(schedule)
    if N < 1:
        raise ValueError("N must be >= 1")
    poly = [1]
    for n in range(1, N):
        poly = _convolve(poly, _count_poly(schedule.size(n), schedule.allowed_set(n).counts))
    if include_top_bin:
        top = schedule.allowed_set(N)
        if not top.nonzero:
            raise InvalidScheduleError(f"A_{N} = {top!r} allows no pick from the top bin")
        poly = _convolve(poly, _count_poly(schedule.size(N), top.counts, skip_zero=True))
    return SummandPMF("model", N, include_top_bin, {k: c for k, c in enumerate(poly) if c})


def empirical_summand_pmf(
    seq: Sequence, N: int, selection_cap: int = DEFAULT_SELECTION_CAP
) -> SummandPMF:
    """Tally summand counts over the integers whose decomposition tops out in bin ``N``.

    Every integer is counted once, through its first decomposition in
    canonical order. Integers that also decompose with a bin above ``N``
    belong to that higher bin and are skipped.
    """
    if not 1 <= N <= seq.num_bins:
        raise PreconditionError(f"bin {N} is not materialized (have {seq.num_bins})")
    first: dict[int, int] = {}
    for i, (value, k) in enumerate(iter_selections(seq, N)):
        if i >= selection_cap:
            raise EnumerationCapExceeded(f"more than {selection_cap} selections with top bin {N}")
        first.setdefault(value, k)
    if N < seq.num_bins:
        first = {v: k for v, k in first.items() if decompose_above(seq, v, N) is None}
    counts: dict[int, int] = {}
    for k in first.values():
        counts[k] = counts.get(k, 0) + 1
    return SummandPMF("empirical", N, True, dict(sorted(counts.items())))


# -- distance to the normal law ---------------------------------------------


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


@dataclass(frozen=True)
class GaussReport:
    ks_distance: float
    mean: float
    std: float
    grid_size: int


def gaussian_distance(pmf: SummandPMF) -> GaussReport:
    """Kolmogorov-Smirnov distance between the standardized PMF and the standard normal.

    The step CDF is compared with the normal CDF on both sides of every jump,
    which is where the supremum is attained.
    """
    var = pmf.variance
    if var == 0:
        raise ZeroVarianceError("distribution has zero variance")
    mean = float(pmf.mean)
    std = math.sqrt(var)
    cdf = Fraction(0)
    worst = 0.0
    for k, p in pmf.probs.items():
        phi = normal_cdf((k - mean) / std)
        left = float(cdf)
        cdf += p
        worst = max(worst, abs(left - phi), abs(float(cdf) - phi))
    return GaussReport(worst, mean, std, len(pmf.counts))


# -- the b_n = n, A_n = {0..n} family ---------------------------------------


@dataclass
class Thm35Report:
    delta: int
    rho: list[Fraction]  # rho[n-1] = E|Y_n - n/2|^(2+delta)
    ratios: list[Fraction]  # rho_n / n^delta
    max_ratio: Fraction
    argmax: int
    edge_proxy: bool  # maximum attained before the last quarter of n
    degree: int | None  # degree of n -> rho_n as a polynomial, if determined
    bounded: bool
    sigma2_is_n_over_4: bool
    matches_general_formula: bool
    cancellations: tuple[Fraction, Fraction]


def full_bin_abs_moment(n: int, delta: int) -> Fraction:
    """``sum_i C(n,i) |2i - n|^(2+delta) / 2^(n+delta+2)``."""
    p = 2 + delta
    return Fraction(sum(binomial(n, i) * abs(2 * i - n) ** p for i in range(n + 1)), 2 ** (n + p))


def polynomial_degree(values: list[Fraction]) -> int | None:
    """Smallest ``d`` whose ``(d+1)``-th finite differences all vanish.

    Needs at least two spare points beyond ``d + 1`` to call it; else ``None``.
    """
    diffs = list(values)
    for d in range(len(values)):
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
        if len(diffs) < 2:
            return None
        if all(v == 0 for v in diffs):
            return d
    return None


def theorem35_check(max_n: int, delta: int = 2) -> Thm35Report:
    """Check that ``rho_n^(2+delta) = O(n^delta)`` for ``b_n = n``, ``A_n = {0..n}``.

    ``bounded`` is certified by showing ``rho_n`` agrees with a polynomial in
    ``n`` of degree at most ``delta`` on ``1..max_n`` (its finite differences
    of order ``degree + 1`` vanish). ``edge_proxy`` is the cruder test that
    the largest ratio is not attained in the last quarter of the range.
    """
    _require_delta(delta)
    if delta % 2:
        raise ValueError("delta must be even")
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    rho = [full_bin_abs_moment(n, delta) for n in range(1, max_n + 1)]
    ratios = [r / Fraction(n) ** delta for n, r in zip(range(1, max_n + 1), rho)]
    best = max(range(max_n), key=lambda i: (ratios[i], -i))
    sigma_ok = general_ok = True
    for n in range(1, max_n + 1):
        m = bin_moments(n, AllowedSet(frozenset(range(n + 1))), delta, n)
        sigma_ok &= m.sigma2 == Fraction(n, 4)
        general_ok &= m.rho2d == rho[n - 1]
    degree = polynomial_degree(rho)
    p = 2 + delta
    c_top = Fraction(sum((-1) ** j * binomial(p, j) for j in range(p + 1)))
    c_next = Fraction(sum((-1) ** j * (j * j - j) * binomial(p, j) for j in range(p + 1)), 2)
    return Thm35Report(
        delta=delta,
        rho=rho,
        ratios=ratios,
        max_ratio=ratios[best],
        argmax=best + 1,
        edge_proxy=(best + 1) <= max_n - max(1, max_n // 4),
        degree=degree,
        bounded=degree is not None and degree <= delta,
        sigma2_is_n_over_4=sigma_ok,
        matches_general_formula=general_ok,
        cancellations=(c_top, c_next),
    )
