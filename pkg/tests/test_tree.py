from itertools import product

import pytest

from zeckbins.tree import (
    READINGS,
    ZeckTree,
    bin_equivalence_check,
    build_tree,
    recurrence_check,
    telephone_check,
    telephone_numbers,
    unique_decomposition_check,
)


def naive_tree(num_levels):
    """Apply the tree rule with a plain set of every legal selection value."""
    levels = [[1]]
    x = 1
    while not (len(levels) == num_levels and len(levels[-1]) == num_levels):
        x += 1
        values = set()
        options = [[None] + lv for lv in levels]
        for choice in product(*options):
            used = [i for i, t in enumerate(choice) if t is not None]
            if all(j - i > 1 for i, j in zip(used, used[1:])):
                values.add(sum(t for t in choice if t is not None))
        if x in values:
            continue
        if len(levels[-1]) == len(levels):
            levels.append([])
        levels[-1].append(x)
    return [tuple(lv) for lv in levels]


def test_first_levels():
    t = build_tree(5)
    assert t.levels[:4] == ((1,), (2, 3), (4, 6, 8), (10, 14, 18, 22))
    assert t.levels[4][0] == 26


@pytest.mark.parametrize("n", range(1, 6))
def test_matches_naive_rule(n):
    assert list(build_tree(n).levels) == naive_tree(n)


def test_telephone():
    assert telephone_numbers(7) == [1, 2, 4, 10, 26, 76, 232]
    assert telephone_check(build_tree(5))
    assert telephone_check(build_tree(3))
    t = build_tree(5)
    tampered = ZeckTree(t.levels[:3] + ((11, 14, 18, 22),) + t.levels[4:])
    assert not telephone_check(tampered)
    with pytest.raises(ValueError):
        telephone_check(build_tree(2))


@pytest.mark.parametrize("n", range(1, 7))
def test_bin_equivalence(n):
    assert bin_equivalence_check(n)


def test_level_six_starts_with_next_telephone_number():
    assert build_tree(6).levels[5][0] == 76 == 26 + 5 * 10


@pytest.mark.parametrize("n", range(1, 7))
def test_unique_decomposition(n):
    assert unique_decomposition_check(build_tree(n)) == []


def test_unique_decomposition_detects_tampering():
    t = build_tree(4)
    bad = ZeckTree(t.levels[:3] + ((10, 14, 18, 21),))
    assert unique_decomposition_check(bad) != []


def test_recurrence_readings():
    res = recurrence_check(build_tree(6))
    assert set(res) == set(READINGS)
    # reading 0 as position 1 fixes every j > 1 entry but none of the j = 1 entries
    first = res["first-of-level"]
    assert first.mismatches == [(i, 1) for i in range(2, 7)]
    assert all(res[name].mismatches for name in READINGS)


def test_observed_recurrence():
    # the tree does satisfy a_{i,j} = a_{i,j-1} + a_{i-1,1} and
    # a_{i,1} = a_{i-1,i-1} + a_{i-2,1}
    t = build_tree(7)
    for i in range(3, 8):
        assert t.term(i, 1) == t.term(i - 1, i - 1) + t.term(i - 2, 1)
        for j in range(2, i + 1):
            assert t.term(i, j) == t.term(i, j - 1) + t.term(i - 1, 1)


def test_recurrence_boundary_and_tampering():
    two = recurrence_check(build_tree(2))
    assert all(len(r.checked) <= 2 for r in two.values())
    assert {c for r in two.values() for c in r.checked} <= {(2, 1), (2, 2)}
    t = build_tree(5)
    bad = ZeckTree(t.levels[:4] + ((26, 36, 46, 57, 66),))
    clean = recurrence_check(t)
    dirty = recurrence_check(bad)
    assert all(dirty[name].mismatches for name in READINGS)
    extra = set(dirty["first-of-level"].mismatches) - set(clean["first-of-level"].mismatches)
    assert extra == {(5, 4), (5, 5)}
    with pytest.raises(ValueError):
        recurrence_check(build_tree(1))


def test_tree_validation():
    with pytest.raises(ValueError):
        ZeckTree(((1,), (2,)))
    with pytest.raises(ValueError):
        ZeckTree(((1,), (3, 2)))
    with pytest.raises(ValueError):
        build_tree(0)
