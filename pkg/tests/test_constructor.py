import pytest

from oracles import brute_greedy, legal_selections
from zeckbins.constructor import achievable_sums, build_sequence, mex_positive, omega
from zeckbins.core import InvalidScheduleError, StateCapExceeded, parse_schedule


def build(text, n):
    return build_sequence(parse_schedule(text), n)


def test_fibonacci():
    assert build("const:1/zero-one/adj:1", 7).flat() == [1, 2, 3, 5, 8, 13, 21]


def test_generacci():
    assert build("const:2/zero-one/adj:1", 8).bins == (
        (1, 2), (3, 4), (5, 8), (11, 16), (21, 32), (43, 64), (85, 128), (171, 256),
    )


def test_affine_family():
    assert build("affine:1,1/zero-one/adj:0", 4).bins == (
        (1, 2), (3, 6, 9), (12, 24, 36, 48), (60, 120, 180, 240, 300),
    )


def test_case_one_family():
    assert build("const:4/set:0,1,2,4/adj:0", 2).bins == ((1, 2, 4, 7), (10, 20, 40, 70))


def test_zero_bins():
    assert build("const:1/zero-one/adj:1", 0).bins == ()


# Schedules small enough for the brute-force oracle: (text, sizes, allowed per bin, a, bins)
ORACLE_CASES = [
    ("const:1/zero-one/adj:1", 1, "zero-one", 1, 8),
    ("const:1/zero-one/adj:0", 1, "zero-one", 0, 8),
    ("const:2/zero-one/adj:1", 2, "zero-one", 1, 6),
    ("const:2/zero-one/adj:2", 2, "zero-one", 2, 6),
    ("const:2/full/adj:0", 2, "full", 0, 4),
    ("const:2/full/adj:1", 2, "full", 1, 5),
    ("const:3/full-minus/adj:0", 3, "full-minus", 0, 3),
    ("const:3/set:0,1,3/adj:0", 3, (0, 1, 3), 0, 3),
    ("const:3/set:0,1,3/adj:1", 3, (0, 1, 3), 1, 4),
    ("const:4/set:0,1,2,4/adj:0", 4, (0, 1, 2, 4), 0, 3),
    ("affine:1,0/zero-one/adj:1", "n", "zero-one", 1, 5),
    ("affine:1,1/zero-one/adj:0", "n+1", "zero-one", 0, 4),
    ("affine:1,0/floordiv:1/adj:0", "n", "floordiv1", 0, 4),
    ("list:3,1,2,2/set:0,1/adj:1", [3, 1, 2, 2], "zero-one", 1, 4),
]


def _oracle_inputs(size, allowed, num_bins):
    sizes = []
    counts = []
    for n in range(1, num_bins + 1):
        b = size if isinstance(size, int) else (n if size == "n" else n + 1 if size == "n+1" else size[n - 1])
        sizes.append(b)
        if allowed == "zero-one":
            counts.append({0, 1})
        elif allowed == "full":
            counts.append(set(range(b + 1)))
        elif allowed == "full-minus":
            counts.append(set(range(b)))
        elif allowed == "floordiv1":
            counts.append(set(range(n + 1)))
        else:
            counts.append(set(allowed))
    return sizes, counts


@pytest.mark.parametrize("text, size, allowed, a, num_bins", ORACLE_CASES)
def test_matches_bruteforce_greedy(text, size, allowed, a, num_bins):
    sizes, counts = _oracle_inputs(size, allowed, num_bins)
    assert list(build(text, num_bins).bins) == brute_greedy(sizes, counts, a)


@pytest.mark.parametrize("text, size, allowed, a, num_bins", ORACLE_CASES)
def test_achievable_sums_match_enumeration(text, size, allowed, a, num_bins):
    seq = build(text, num_bins)
    _, counts = _oracle_inputs(size, allowed, num_bins)
    for n in range(num_bins + 1):
        expected = {v for v, _ in legal_selections(seq.bins[:n], counts[:n], a)}
        sums = achievable_sums(seq, n)
        assert sums.plain_sums == expected
        assert sums.max == max(expected) == omega(seq, n)
        assert sums.count == len(expected)


def test_achievable_sums_examples():
    seq = build("affine:1,1/zero-one/adj:0", 3)
    assert achievable_sums(seq, 2).plain_sums == set(range(12))
    assert achievable_sums(seq, 2).is_interval()
    gen = build("const:2/zero-one/adj:1", 3)
    sums = achievable_sums(gen, 2)
    assert sums.plain_sums == {0, 1, 2, 3, 4}
    assert sums.mex() == 5
    # bin 1 can no longer block bin 3, so only bin-2 picks keep their tag
    assert sums.states == {(0, None), (1, None), (2, None), (3, 2), (4, 2)}
    assert achievable_sums(gen, 0).states == {(0, None)}


def test_mex_positive():
    assert mex_positive(0b1) == 1
    assert mex_positive(0b1011) == 2
    assert mex_positive(0b1111) == 4


def test_requires_zero_and_one():
    with pytest.raises(InvalidScheduleError):
        build("const:3/pair:2/adj:0", 2)
    with pytest.raises(InvalidScheduleError):
        build("const:3/set:0,2,3/adj:0", 2)
    with pytest.raises(InvalidScheduleError):
        build("affine:1,0/floordiv:2/adj:0", 3)  # A_1 = {0}


def test_state_cap():
    with pytest.raises(StateCapExceeded) as info:
        build_sequence(parse_schedule("const:2/zero-one/adj:1"), 12, state_cap=20)
    assert info.value.cap == 20
    seq = build("const:2/zero-one/adj:1", 8)
    with pytest.raises(StateCapExceeded):
        achievable_sums(seq, 8, state_cap=5)


def test_fibonacci_recurrence_and_default_cap():
    flat = build("const:1/zero-one/adj:1", 30).flat()
    assert all(flat[i + 1] == flat[i] + flat[i - 1] for i in range(1, len(flat) - 1))
    # every value below the last term is representable, so the state set
    # outgrows the default cap a few bins later and the build fails loudly
    with pytest.raises(StateCapExceeded) as info:
        build("const:1/zero-one/adj:1", 40)
    assert info.value.bin_index == 34
