from fractions import Fraction
from math import comb

import mpmath
import pytest

from oracles import moments_direct
from zeckbins.constructor import achievable_sums, build_sequence
from zeckbins.core import AllowedSet, InvalidScheduleError, PreconditionError, parse_schedule
from zeckbins.stats import (
    SummandPMF,
    ZeroVarianceError,
    bin_moments,
    bin_pmf,
    empirical_summand_pmf,
    full_bin_abs_moment,
    gaussian_distance,
    lyapunov_series,
    model_summand_pmf,
    normal_cdf,
    polynomial_degree,
    schedule_moments,
    theorem35_check,
)
from zeckbins.uniqueness import UNIQUE, classify

F = Fraction
ZO = AllowedSet.of(0, 1)


def test_bin_pmf_examples():
    assert bin_pmf(1, ZO).probs == (F(1, 2), F(1, 2))
    assert bin_pmf(2, ZO).probs == (F(1, 3), F(2, 3))
    p = bin_pmf(3, AllowedSet.of(0, 2))
    assert p.support == (0, 2) and p.probs == (F(1, 4), F(3, 4))
    assert p.prob(1) == 0
    with pytest.raises(ValueError):
        bin_pmf(1, AllowedSet.of(0, 2))


def test_bin_moments_examples():
    m = bin_moments(1, ZO, 2)
    assert (m.mu, m.sigma2, m.rho2d) == (F(1, 2), F(1, 4), F(1, 16))
    m = bin_moments(3, AllowedSet.of(0, 2), 1)
    assert (m.mu, m.sigma2) == (F(3, 2), F(3, 4))
    with pytest.raises(ValueError):
        bin_moments(3, ZO, 0)


@pytest.mark.parametrize("b", range(1, 9))
@pytest.mark.parametrize("delta", [1, 2, 3, 4])
def test_moments_match_direct_expectation(b, delta):
    sets = [{0, 1}, set(range(b + 1)), set(range(b)) | {0}, {0, 1, b}, {0, b}]
    for counts in sets:
        m = bin_moments(b, AllowedSet(frozenset(counts)), delta)
        assert (m.mu, m.sigma2, m.rho2d) == moments_direct(b, counts, delta)


def test_zero_one_closed_forms():
    for b in range(1, 51):
        m = bin_moments(b, ZO, 2)
        assert m.mu == F(b, b + 1)
        assert m.sigma2 == F(b, (b + 1) ** 2)


def test_full_bin_variance_is_n_over_4():
    for n in range(1, 41):
        assert bin_moments(n, AllowedSet(frozenset(range(n + 1))), 2).sigma2 == F(n, 4)


def test_rho_bound_for_zero_one():
    for b in range(1, 60):
        for delta in range(1, 7):
            assert bin_moments(b, ZO, delta).rho2d < F(b, (b + 1) ** 2)


# -- Lyapunov ----------------------------------------------------------------


def test_lyapunov_constant_one():
    s = lyapunov_series(parse_schedule("const:1/zero-one/adj:0"), 2, 100)
    assert all(r.squared_ratio == F(1, r.N**2) for r in s.rows)
    assert s.ratio(100) == F(1, 10000)


@pytest.mark.parametrize("c", [1, 2, 3, 7])
def test_lyapunov_cumulative_variance(c):
    s = lyapunov_series(parse_schedule(f"const:{c}/zero-one/adj:0"), 2, 30)
    for r in s.rows:
        # rows sum bins 1..N; the sum over n < N is the previous row
        assert r.s2 == r.N * F(c, (c + 1) ** 2)
    ratios = [r.squared_ratio for r in s.rows]
    assert all(x > y for x, y in zip(ratios[2:], ratios[3:]))


def test_lyapunov_pow2_stays_away_from_zero():
    s = lyapunov_series(parse_schedule("pow:2/zero-one/adj:0"), 2, 200)
    ratios = [r.squared_ratio for r in s.rows]
    low = min(ratios)
    assert low >= ratios[19] / 2
    # frozen floor from the exact run: the minimum over N <= 200 is at N = 200
    assert ratios.index(low) == 199
    assert float(low) == pytest.approx(0.6115364739231053, rel=1e-12)
    assert low > F(3, 5)


@pytest.mark.parametrize("k", [2, 3])
def test_floordiv_ratio_decreases(k):
    s = lyapunov_series(parse_schedule(f"affine:1,0/floordiv:{k}/adj:0"), 2, 200)
    ratios = [s.ratio(N) for N in range(20, 201)]
    assert all(x > y for x, y in zip(ratios, ratios[1:]))


def test_lyapunov_rejects_adjacency_and_handles_zero_variance():
    with pytest.raises(InvalidScheduleError):
        lyapunov_series(parse_schedule("const:1/zero-one/adj:1"), 2, 5)
    # floordiv:3 has A_1 = A_2 = {0}: no variance yet, ratio undefined
    s = lyapunov_series(parse_schedule("affine:1,0/floordiv:3/adj:0"), 2, 4)
    assert s.ratio(1) is None and s.ratio(2) is None and s.ratio(3) is not None


# -- summand distributions ---------------------------------------------------


def test_model_pmf_example():
    pmf = model_summand_pmf(parse_schedule("const:2/zero-one/adj:0"), 3, True)
    assert pmf.probs == {1: F(1, 9), 2: F(4, 9), 3: F(4, 9)}


def test_model_pmf_boundaries():
    pmf = model_summand_pmf(parse_schedule("const:2/zero-one/adj:0"), 1, False)
    assert pmf.probs == {0: 1}
    pmf = model_summand_pmf(parse_schedule("const:1/zero-one/adj:0"), 11, False)
    assert pmf.counts == {k: comb(10, k) for k in range(11)}
    with pytest.raises(InvalidScheduleError):
        model_summand_pmf(parse_schedule("affine:1,0/floordiv:2/adj:0"), 1, True)
    with pytest.raises(InvalidScheduleError):
        model_summand_pmf(parse_schedule("const:1/zero-one/adj:1"), 3)


def test_model_mean_and_variance_are_additive():
    for text in ["const:2/zero-one/adj:0", "affine:1,0/full/adj:0", "pow:2/zero-one/adj:0", "const:5/set:0,1,3/adj:0"]:
        sched = parse_schedule(text)
        for N in range(1, 8):
            pmf = model_summand_pmf(sched, N, False)
            moms = [schedule_moments(sched, n, 2) for n in range(1, N)]
            assert pmf.mean == sum((m.mu for m in moms), F(0))
            assert pmf.variance == sum((m.sigma2 for m in moms), F(0))


def test_empirical_pmf_examples():
    seq = build_sequence(parse_schedule("const:2/zero-one/adj:0"), 3)
    assert seq.bins == ((1, 2), (3, 6), (9, 18))
    pmf = empirical_summand_pmf(seq, 3)
    assert pmf.counts == {1: 2, 2: 8, 3: 8} and pmf.total == 18
    assert pmf.probs == model_summand_pmf(seq.schedule, 3, True).probs
    one = build_sequence(parse_schedule("const:1/zero-one/adj:0"), 1)
    assert empirical_summand_pmf(one, 1).counts == {1: 1}
    with pytest.raises(PreconditionError):
        empirical_summand_pmf(one, 2)


def test_empirical_skips_values_owned_by_higher_bins():
    # with a materialized bin 4, integers are still attributed to their own top bin
    seq = build_sequence(parse_schedule("const:2/zero-one/adj:0"), 4)
    assert empirical_summand_pmf(seq, 3).counts == {1: 2, 2: 8, 3: 8}


UNIQUE_MATRIX = [
    "const:1/zero-one/adj:0",
    "const:2/zero-one/adj:0",
    "const:3/zero-one/adj:0",
    "const:2/full/adj:0",
    "const:3/full-minus/adj:0",
    "affine:1,0/full/adj:0",
    "affine:1,1/zero-one/adj:0",
    "affine:1,1/full-minus/adj:0",
    "affine:1,0/floordiv:1/adj:0",
    "list:2,3,1,2,2,1/zero-one/adj:0",
]


@pytest.mark.parametrize("text", UNIQUE_MATRIX)
def test_model_equals_empirical(text):
    sched = parse_schedule(text)
    checked = 0
    for bins in range(1, 7):
        seq = build_sequence(sched, bins)
        if achievable_sums(seq).max > 10_000:
            break
        assert classify(sched, bins).classifier_verdict == UNIQUE
        emp = empirical_summand_pmf(seq, bins)
        assert emp.probs == model_summand_pmf(sched, bins, True).probs
        checked += 1
    assert checked >= 3


# -- distance to the normal law ----------------------------------------------


def test_normal_cdf_against_mpmath():
    for z in [-6, -3.3, -1, -0.25, 0, 0.5, 1.7, 4, 8]:
        assert normal_cdf(z) == pytest.approx(float(mpmath.ncdf(z)), abs=1e-15)


def _ks_oracle(counts):
    mpmath.mp.dps = 40
    total = sum(counts.values())
    mu = mpmath.mpf(sum(k * c for k, c in counts.items())) / total
    var = mpmath.mpf(sum((k - mu) ** 2 * c for k, c in counts.items())) / total
    sd = mpmath.sqrt(var)
    cdf = mpmath.mpf(0)
    worst = mpmath.mpf(0)
    for k in sorted(counts):
        phi = mpmath.ncdf((k - mu) / sd)
        worst = max(worst, abs(cdf - phi))
        cdf += mpmath.mpf(counts[k]) / total
        worst = max(worst, abs(cdf - phi))
    return float(worst)


def test_ks_binomial_golden_values():
    one = parse_schedule("const:1/zero-one/adj:0")
    b10 = gaussian_distance(model_summand_pmf(one, 11, False))
    b100 = gaussian_distance(model_summand_pmf(one, 101, False))
    # frozen from the high-precision oracle
    assert b10.ks_distance == pytest.approx(0.123046875, abs=1e-12)
    assert b10.ks_distance == pytest.approx(_ks_oracle({k: comb(10, k) for k in range(11)}), abs=1e-12)
    assert b100.ks_distance == pytest.approx(_ks_oracle({k: comb(100, k) for k in range(101)}), abs=1e-12)
    assert 0 < b10.ks_distance < 0.2
    assert b100.ks_distance < b10.ks_distance
    assert (b10.mean, b10.std, b10.grid_size) == (5.0, pytest.approx(10**0.5 / 2), 11)


def test_ks_other_shapes_against_oracle():
    for text, N in [("const:2/zero-one/adj:0", 9), ("affine:1,0/full/adj:0", 7), ("const:5/set:0,1,3/adj:0", 6)]:
        pmf = model_summand_pmf(parse_schedule(text), N, True)
        assert gaussian_distance(pmf).ks_distance == pytest.approx(_ks_oracle(pmf.counts), abs=1e-12)


def test_ks_zero_variance():
    with pytest.raises(ZeroVarianceError):
        gaussian_distance(SummandPMF("model", 1, False, {0: 1}))


# -- b_n = n, A_n = {0..n} ---------------------------------------------------


def test_full_bin_abs_moment_hand_values():
    assert full_bin_abs_moment(2, 2) == F(1, 2)
    assert full_bin_abs_moment(1, 2) == F(1, 16)
    # agrees with the general moment formula at the mean n/2
    for n in range(1, 15):
        assert full_bin_abs_moment(n, 4) == moments_direct(n, range(n + 1), 4)[2]


def test_polynomial_degree():
    assert polynomial_degree([F(n * n) for n in range(10)]) == 2
    assert polynomial_degree([F(3)] * 5) == 0
    assert polynomial_degree([F(2**n) for n in range(12)]) is None
    assert polynomial_degree([F(1), F(2)]) is None


def test_theorem35_report():
    rep = theorem35_check(60, 2)
    assert rep.rho[1] == F(1, 2) and rep.ratios[1] == F(1, 8)
    assert rep.sigma2_is_n_over_4 and rep.matches_general_formula
    assert rep.degree == 2 and rep.bounded
    assert rep.cancellations == (0, 0)
    # the ratio (3n - 2) / (16 n) climbs towards 3/16, so the maximum sits at the edge
    assert all(r == F(3 * n - 2, 16 * n) for n, r in enumerate(rep.ratios, 1))
    assert rep.argmax == 60 and not rep.edge_proxy
    assert rep.max_ratio == F(178, 960) < F(3, 16)


def test_theorem35_delta_four():
    rep = theorem35_check(40, 4)
    assert rep.bounded and rep.degree <= 4
    with pytest.raises(ValueError):
        theorem35_check(10, 3)
