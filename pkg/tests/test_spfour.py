from fractions import Fraction

import pytest

from qaffine.qfield import ONE, qpow
from qaffine.spfour import (
    C2, BigSpace, Sp4Action, compare_character, qd_grade, verify_highest_weight, verify_linking,
    verify_sp4_relations, verify_sp4_serre, verify_y_ops,
)


@pytest.fixture(scope="module")
def acts():
    return {j: Sp4Action(BigSpace(j, 3)) for j in (0, 1, 2)}


def test_cartan_data():
    assert [[C2.a(i, j) for j in range(3)] for i in range(3)] == [[2, -1, 0], [-2, 2, -2], [0, -1, 2]]
    assert C2.qi(1) == 1 and C2.qi(2) == 2


def test_degrees_of_vacuum_vectors():
    assert qd_grade(0, (Fraction(0), (0, 0, 0), ())) == 0
    assert qd_grade(0, (Fraction(1), (0, 0, 0), ())) == 1
    assert qd_grade(2, (Fraction(-1), (0, 0, 0), ())) == 0
    assert qd_grade(2, (Fraction(1), (0, 0, 0), ())) == 0
    assert qd_grade(1, (Fraction(1, 2), (0, 0, 0), ())) == 0


def test_k2_on_charge_minus_one(acts):
    # b(0) = -1, K = 1 on v_{2L0} (x) v(-1): K2 = (q^{2 b(0)} K)^{-1} = q^2
    v = acts[2].V.vector(-1)
    assert acts[2].K2(v) == {k: qpow(2) for k in v}


def test_e1_kills_vacuum(acts):
    assert acts[0].e(1, acts[0].V.vector(0)) == {}


def test_gamma_is_q_squared(acts):
    a = acts[1]
    for s in a.V.basis(2):
        v = {s: ONE}
        t0 = {k: c * qpow(2) for k, c in a.K2(a.K1(v, -2), -1).items()}
        assert a.K2(a.K1(t0, 2)) == {k: c * qpow(2) for k, c in v.items()}


def test_apply_labels(acts):
    a = acts[0]
    v = a.V.highest()
    assert a.apply("e1", v) == a.e(1, v)
    assert a.apply("x2-(0)", v) == a.y(-1, 0, v)
    with pytest.raises(ValueError):
        a.apply("z9", v)


@pytest.mark.parametrize("j", [0, 1, 2])
def test_highest_weight(acts, j):
    rep = verify_highest_weight(j, 3, action=acts[j])
    assert rep.passed, rep.failures()


@pytest.mark.parametrize("j", [0, 1, 2])
def test_characters_depth_three(acts, j):
    assert compare_character(j, 3, action=acts[j])["equal"]


@pytest.mark.parametrize("j", [0, 1, 2])
def test_relations_small(acts, j):
    rep = verify_sp4_relations(j, 3, window=1, kmax=1, action=acts[j], max_states=(12, 5))
    assert rep.passed, rep.failures()


def test_serre_small(acts):
    rep = verify_sp4_serre(0, 3, window_cubic=1, window_quartic=0, action=acts[0], max_states=6)
    assert rep.passed, rep.failures()


def test_y_ops_small(acts):
    assert verify_y_ops(1, 3, window=1, kmax=1, action=acts[1], max_states=10).passed


def test_linking_scalars_nonzero():
    rep = verify_linking(3, pmax=0)
    assert rep.passed
    assert len(rep.entries) == 6
    for e in rep.entries.values():
        assert all(c for c in e.extra["scalars"].values())
