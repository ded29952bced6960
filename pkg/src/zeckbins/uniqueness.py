"""Uniqueness of decomposition: classifier, exhaustive check, divisibility.

With no adjacency rule, a schedule decomposes every positive integer uniquely
exactly when each A_n is {0,1}, {0,...,b_n - 1} or {0,...,b_n}. The
classifier applies that test bin by bin and, for the first failing bin, names
the kind of failure:

* ``case-I``: {0,...,k} is inside A_n, k+1 is not, and 2 <= k <= b_n - 2;
* ``case-II``: 2 is not in A_n but some larger count is; ``k`` is the least
  such count, and the subcase records whether b_n is k, k+1 or larger.

:func:`verify_exhaustive` checks the same property by brute force.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .constructor import DEFAULT_STATE_CAP, achievable_sums
from .core import BinSchedule, Decomposition, PreconditionError, Sequence, expand_allowed
from .decomposer import enumerate_decompositions

UNIQUE = "unique"
NOT_UNIQUE = "not-unique"
OUT_OF_SCOPE = "out-of-theorem-scope"

CONFIRMED = "confirmed-unique"
COLLISION = "collision"
GAP = "gap"

DEFAULT_BOUND = 10_000


@dataclass(frozen=True)
class BinReason:
    n: int
    form: str | None  # "zero-one" | "full-minus-one" | "full" when the bin is fine
    case: str | None = None  # "case-I" | "case-II" | "missing-0-or-1"
    k: int | None = None
    subcase: str | None = None

    @property
    def ok(self) -> bool:
        return self.form is not None

    def label(self) -> str:
        if self.form:
            return self.form
        out = self.case or "?"
        if self.k is not None:
            out += f"(k={self.k}"
            out += f", {self.subcase})" if self.subcase else ")"
        return out


@dataclass(frozen=True)
class Collision:
    x: int
    first: Decomposition
    second: Decomposition


@dataclass
class UniquenessVerdict:
    classifier_verdict: str | None = None
    per_bin: list[BinReason] = field(default_factory=list)
    empirical_verdict: str | None = None
    bound: int | None = None
    collision: Collision | None = None
    gap: int | None = None

    @property
    def first_violation(self) -> BinReason | None:
        return next((r for r in self.per_bin if not r.ok), None)

    @property
    def empirically_unique(self) -> bool | None:
        if self.empirical_verdict is None:
            return None
        return self.empirical_verdict == CONFIRMED


def classify_allowed(n: int, b: int, counts: frozenset[int]) -> BinReason:
    """Classify one bin's allowed set against the three uniqueness forms."""
    if counts == {0, 1}:
        return BinReason(n, "zero-one")
    if counts == set(range(b)):
        return BinReason(n, "full-minus-one")
    if counts == set(range(b + 1)):
        return BinReason(n, "full")
    if 0 not in counts or 1 not in counts:
        return BinReason(n, None, "missing-0-or-1")
    if 2 in counts:
        k = 2
        while k + 1 in counts:
            k += 1
        return BinReason(n, None, "case-I", k)
    k = min(c for c in counts if c > 1)
    if b == k:
        sub = "b=k"
    elif b == k + 1:
        sub = "b=k+1"
    else:
        sub = "b>=k+2"
    return BinReason(n, None, "case-II", k, sub)


def classify(schedule: BinSchedule, num_bins: int) -> UniquenessVerdict:
    """Classifier verdict for bins ``1..num_bins``."""
    reasons = []
    for n in range(1, num_bins + 1):
        b = schedule.size(n)
        reasons.append(classify_allowed(n, b, expand_allowed(schedule, n).counts))
    bad = next((r for r in reasons if not r.ok), None)
    if schedule.adjacency != 0 or (bad is not None and bad.case == "missing-0-or-1"):
        verdict = OUT_OF_SCOPE
    else:
        verdict = UNIQUE if bad is None else NOT_UNIQUE
    return UniquenessVerdict(classifier_verdict=verdict, per_bin=reasons)


def _scan(seq: Sequence, lo: int, hi: int):
    for x in range(lo, hi + 1):
        ds = enumerate_decompositions(seq, x, limit=2)
        if len(ds.found) == 0:
            return x, None
        if len(ds.found) >= 2:
            return x, ds.found
    return None


def verify_exhaustive(
    seq: Sequence,
    bound: int | None = None,
    workers: int = 1,
    state_cap: int = DEFAULT_STATE_CAP,
) -> UniquenessVerdict:
    """Count decompositions of every ``x`` in ``1..bound``.

    Stops at the first ``x`` with two decompositions (collision) or none
    (gap). ``bound`` defaults to ``min(omega_N, 10000)`` and may not exceed
    ``omega_N``.
    """
    top = achievable_sums(seq, seq.num_bins, state_cap).max
    if bound is None:
        bound = min(top, DEFAULT_BOUND)
    if bound > top:
        raise PreconditionError(f"bound {bound} exceeds the largest representable value {top}")
    if workers <= 1 or bound < 2 * workers:
        hit = _scan(seq, 1, bound) if bound >= 1 else None
    else:
        step = -(-bound // (4 * workers))
        chunks = [(lo, min(lo + step - 1, bound)) for lo in range(1, bound + 1, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = list(pool.map(_scan, [seq] * len(chunks), *zip(*chunks)))
        hit = min((h for h in hits if h), key=lambda h: h[0], default=None)

    verdict = UniquenessVerdict(empirical_verdict=CONFIRMED, bound=bound)
    if hit is not None:
        x, found = hit
        if found is None:
            verdict.empirical_verdict, verdict.gap = GAP, x
        else:
            verdict.empirical_verdict = COLLISION
            verdict.collision = Collision(x, found[0], found[1])
    return verdict


def check_uniqueness(seq: Sequence, bound: int | None = None, workers: int = 1) -> UniquenessVerdict:
    """Classifier and exhaustive verdicts together."""
    out = classify(seq.schedule, seq.num_bins)
    emp = verify_exhaustive(seq, bound, workers)
    out.empirical_verdict = emp.empirical_verdict
    out.bound, out.collision, out.gap = emp.bound, emp.collision, emp.gap
    return out


@dataclass(frozen=True)
class DivisibilityResult:
    n0: int
    k: int
    all_divisible: bool
    offenders: tuple[int, ...] = ()


def divisibility_check(seq: Sequence, n0: int) -> DivisibilityResult:
    """If bins ``1..n0-1`` generate exactly ``{1..k}``, test later terms mod ``k+1``."""
    if not 1 <= n0 <= seq.num_bins + 1:
        raise ValueError(f"n0 must lie in 1..{seq.num_bins + 1}")
    sums = achievable_sums(seq, n0 - 1)
    if not sums.is_interval():
        mask = sums.plain_mask
        hole = ((mask + 1) & ~mask).bit_length() - 1
        raise PreconditionError(
            f"bins 1..{n0 - 1} do not generate an interval: {hole} is missing below {sums.max}"
        )
    k = sums.max
    later = [t for n in range(n0, seq.num_bins + 1) for t in seq.bin(n)]
    bad = tuple(t for t in later if t % (k + 1))
    return DivisibilityResult(n0, k, not bad, bad)
