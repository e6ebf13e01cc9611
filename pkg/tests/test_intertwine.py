from fractions import Fraction

import pytest

from qaffine.intertwine import (
    Intertwiners, phi0_apply, verify_exchange, verify_intertwining, verify_nested_commutator, verify_drinfeld_commutation,
    verify_qd_conjugation,
)
from qaffine.qfield import ONE, qpow
from qaffine.sl2mod import ModuleFamily


@pytest.fixture(scope="module")
def it1():
    return Intertwiners(ModuleFamily(1, 4))


@pytest.fixture(scope="module")
def it2():
    return Intertwiners(ModuleFamily(2, 3))


def test_phi0_lowest_mode_on_basic_module():
    # Phi_0(z) v_{L0} starts at z^0 with D-hat v_{L0}
    it = Intertwiners(ModuleFamily(1, 3))
    src = it.module("L0")
    out = it.phi0("L0", 0, src.highest())
    assert out == it.fam.dhat((1, 0), src.highest())
    assert it.phi0("L0", -1, src.highest()) == {}


def test_mode_offsets(it2):
    assert it2.get("I", 0).mode_offset("L0+L1") == Fraction(1, 2)
    assert it2.get("II", 2).mode_offset("2L0") == 0


def test_component_index_checked(it1):
    with pytest.raises(ValueError):
        it1.get("I", 2)


def test_module_level_helper_agrees(it1):
    v = it1.module("L1").highest()
    m = Fraction(1, 2)
    assert phi0_apply(1, "L1", m, v, depth=4) == it1.phi0("L1", m, v)


@pytest.mark.parametrize("kind", ["I", "II"])
@pytest.mark.parametrize("lam", ["L0", "L1"])
def test_level_one_suites(it1, kind, lam):
    assert verify_intertwining(kind, 1, lam, 4, window=1, inter=it1).passed
    assert verify_drinfeld_commutation(kind, 1, lam, 4, window=1, kmax=1, inter=it1).passed


@pytest.mark.parametrize("kind", ["I", "II"])
def test_level_two_small(it2, kind):
    rep = verify_intertwining(kind, 2, "L0+L1", 3, window=1, inter=it2)
    assert rep.passed, rep.failures()
    assert len(rep.entries) == 6


def test_exchange_level_two(it2):
    assert verify_exchange(2, "2L0", 3, window=1, inter=it2).passed


@pytest.mark.parametrize("lam,power", [("2L0", 0), ("L0+L1", Fraction(-1, 2)), ("2L1", -1)])
def test_qd_constant(it2, lam, power):
    rep = verify_qd_conjugation("I", 2, lam, 3, window=1, inter=it2)
    e = rep.entries["type-I q^d conjugation"]
    assert rep.passed and e.extra["constant"] == qpow(power) == e.extra["expected_constant"]


def test_nested_commutator_on_2L0(it2):
    assert verify_nested_commutator("2L0", 3, window=2, inter=it2).passed
