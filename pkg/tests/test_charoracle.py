import pytest

from qaffine.charoracle import A1_AFFINE, C2_AFFINE, compare, freudenthal


def _partitions(n):
    p = [1] + [0] * n
    for k in range(1, n + 1):
        for m in range(k, n + 1):
            p[m] += p[m - k]
    return p


def test_basic_a1_module_delta_strings_are_partition_numbers():
    # mult of Lambda_0 - n delta in the basic module is p(n)
    t = freudenthal("A1", (1, 0), 6)
    p = _partitions(6)
    for n in range(7):
        assert t.mults.get((n, n), 0) == p[n]


def test_top_of_a1_level_two():
    t = freudenthal(A1_AFFINE, (2, 0), 3)
    assert t.mults[(0, 0)] == 1
    assert (0, 1) not in t.mults          # f_1 kills v_{2 Lambda_0}
    # grade one is sl2 (x) t^-1: weights -alpha_0, -delta, -delta - alpha_1
    assert [t.mults.get(b, 0) for b in ((1, 0), (1, 1), (1, 2))] == [1, 1, 1]


def test_c2_level_one_depth_zero_is_a_finite_module():
    # Lambda_1 of C2^(1) restricts to the 4-dimensional sp4 module at depth 0
    t = freudenthal(C2_AFFINE, (0, 1, 0), 0)
    assert sum(t.mults.values()) == 4
    t = freudenthal(C2_AFFINE, (0, 0, 1), 0)
    assert sum(t.mults.values()) == 5


def test_c2_graded_dimensions():
    want = {(1, 0, 0): [1, 10, 30, 85], (0, 1, 0): [4, 20, 60, 160], (0, 0, 1): [5, 15, 56, 130]}
    for hw, dims in want.items():
        t = freudenthal(C2_AFFINE, hw, 3)
        got = [0] * 4
        for b, m in t.mults.items():
            got[b[0]] += m
        assert got == dims


@pytest.mark.parametrize("seed", [1, 7, 42])
def test_root_order_does_not_matter(seed):
    a = freudenthal(C2_AFFINE, (1, 0, 0), 3)
    b = freudenthal(C2_AFFINE, (1, 0, 0), 3, seed=seed)
    assert compare(a, b)["equal"]


def test_compare_reports_common_depth():
    a = freudenthal("A1", (2, 0), 2)
    b = freudenthal("A1", (2, 0), 4)
    r = compare(a, b)
    assert r["equal"] and r["common_depth"] == 2 and "note" in r


def test_rejects_non_dominant():
    with pytest.raises(ValueError):
        freudenthal("A1", (-1, 2), 2)
