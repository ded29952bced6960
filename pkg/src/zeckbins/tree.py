"""The Zeckendorf tree: level ``i`` holds ``i`` terms.

Integers are examined in increasing order and appended (filling levels in
reading order) when they are not a sum of terms taken at most one per level
from pairwise nonadjacent levels. This is built directly from that rule and
compared afterwards with the bin construction ``b_i = i``, ``A_i = {0,1}``,
``a = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .constructor import DEFAULT_STATE_CAP, build_sequence
from .core import AllowedRule, BinSchedule, SizeRule

TREE_SCHEDULE = BinSchedule(SizeRule("affine", (1, 0)), AllowedRule("zero-one"), 1)


@dataclass(frozen=True)
class ZeckTree:
    levels: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for i, level in enumerate(self.levels, start=1):
            if len(level) != i:
                raise ValueError(f"level {i} has {len(level)} terms")
        flat = self.flat()
        if any(x >= y for x, y in zip(flat, flat[1:])):
            raise ValueError("tree terms must increase in reading order")

    def flat(self) -> list[int]:
        return [x for level in self.levels for x in level]

    def term(self, i: int, j: int) -> int:
        return self.levels[i - 1][j - 1]

    @property
    def diagonal(self) -> list[int]:
        return [level[0] for level in self.levels]


def _representable(x: int, levels: list[list[int]]) -> bool:
    # Walk levels from the top; using level i rules out level i - 1.
    def rec(i: int, r: int) -> bool:
        if r == 0:
            return True
        if i < 0:
            return False
        for t in levels[i]:
            if t <= r and rec(i - 2, r - t):
                return True
        return rec(i - 1, r)

    return rec(len(levels) - 1, x)


def build_tree(num_levels: int, max_candidates: int = 10_000_000) -> ZeckTree:
    if num_levels < 1:
        raise ValueError("num_levels must be >= 1")
    levels: list[list[int]] = [[1]]
    x = 1
    tried = 0
    while not (len(levels) == num_levels and len(levels[-1]) == num_levels):
        x += 1
        tried += 1
        if tried > max_candidates:
            raise RuntimeError(f"examined more than {max_candidates} candidates")
        if _representable(x, levels):
            continue
        if len(levels[-1]) == len(levels):
            levels.append([])
        levels[-1].append(x)
    return ZeckTree(tuple(tuple(level) for level in levels))


def telephone_numbers(count: int) -> list[int]:
    out = [1, 2][:count]
    while len(out) < count:
        n = len(out) + 1
        out.append(out[-1] + (n - 1) * out[-2])
    return out


def telephone_check(tree: ZeckTree) -> bool:
    """Does the left diagonal satisfy d_1 = 1, d_2 = 2, d_n = d_{n-1} + (n-1) d_{n-2}?"""
    if len(tree.levels) < 3:
        raise ValueError("telephone check needs at least 3 levels")
    return tree.diagonal == telephone_numbers(len(tree.levels))


def bin_equivalence_check(num_levels: int, state_cap: int = DEFAULT_STATE_CAP) -> bool:
    seq = build_sequence(TREE_SCHEDULE, num_levels, state_cap)
    return build_tree(num_levels).flat() == seq.flat()


# Each reading says what the out-of-range entry a_{k,0} stands for.
READINGS = {
    "first-of-level": lambda t, k: t.term(k, 1) if k >= 1 else None,
    "reading-predecessor": lambda t, k: t.term(k - 1, k - 1) if k >= 2 else None,
    "two-levels-up-first": lambda t, k: t.term(k - 2, 1) if k >= 3 else None,
}


@dataclass
class RecurrenceResult:
    reading: str
    checked: list[tuple[int, int]] = field(default_factory=list)
    mismatches: list[tuple[int, int]] = field(default_factory=list)


def recurrence_check(tree: ZeckTree) -> dict[str, RecurrenceResult]:
    """Test ``a_{i,j} = a_{i,j-1} + a_{i-1,0}`` (j > 1) and
    ``a_{i,1} = a_{i-1,i-1} + a_{i,0}`` under each reading of the 0 index.

    Entries whose right-hand side is undefined under a reading are skipped.
    """
    if len(tree.levels) < 2:
        raise ValueError("recurrence check needs at least 2 levels")
    out = {}
    for name, zero in READINGS.items():
        res = RecurrenceResult(name)
        for i in range(2, len(tree.levels) + 1):
            for j in range(1, i + 1):
                if j > 1:
                    extra = zero(tree, i - 1)
                    prev = tree.term(i, j - 1)
                else:
                    extra = zero(tree, i)
                    prev = tree.term(i - 1, i - 1)
                if extra is None:
                    continue
                res.checked.append((i, j))
                if tree.term(i, j) != prev + extra:
                    res.mismatches.append((i, j))
        out[name] = res
    return out


def unique_decomposition_check(tree: ZeckTree) -> list[tuple[int, int]]:
    """``(x, count)`` for every ``x`` up to the last term whose count of legal
    selections is not exactly one; empty means uniqueness holds."""
    levels = tree.levels
    limit = levels[-1][-1]
    counts = [0] * (limit + 1)

    def rec(i: int, total: int) -> None:
        if total > limit:
            return
        if i < 0:
            counts[total] += 1
            return
        for t in levels[i]:
            rec(i - 2, total + t)
        rec(i - 1, total)

    rec(len(levels) - 1, 0)
    return [(x, c) for x, c in enumerate(counts) if x >= 1 and c != 1]
