import pytest

from qaffine.charoracle import freudenthal
from qaffine.qfield import ONE, qpow
from qaffine.sl2mod import (
    AffineWeightA1, EvaluationModule, IrredModuleA1, ModuleFamily, TruncationOverflow, build_module,
    verify_dhat, verify_drinfeld, verify_reflection,
)

LEVEL2 = ["2L0", "L0+L1", "2L1"]


@pytest.fixture(scope="module")
def fam():
    return ModuleFamily(2, 4)


def test_weight_parsing():
    assert AffineWeightA1.parse("2L0") == AffineWeightA1(2, 0)
    assert AffineWeightA1.parse("L0+L1") == AffineWeightA1(1, 1)
    assert AffineWeightA1.parse("0,2").label == "2L1"
    with pytest.raises(ValueError):
        AffineWeightA1.parse("L2")


@pytest.mark.parametrize("lam", LEVEL2)
def test_multiplicities_match_oracle(fam, lam):
    m = fam.module(lam)
    table = freudenthal("A1", (m.lam.m0, m.lam.m1), 4)
    built = {w: m.dim(*w) for w in m.weights(4) if m.dim(*w)}
    assert built == table.mults


@pytest.mark.parametrize("lam", LEVEL2)
def test_contravariant_form_nondegenerate(fam, lam):
    m = fam.module(lam)
    for w in m.weights(3):
        assert m.gram_rank(*w) == m.dim(*w)


def test_truncation_refuses_beyond_depth():
    m = IrredModuleA1(AffineWeightA1(2, 0), 2)
    with pytest.raises(TruncationOverflow):
        m.space(3, 3)


def test_f1_kills_top_of_2L0(fam):
    m = fam.module("2L0")
    assert m.f(1, m.highest()) == {}
    assert m.f(0, m.highest()) != {}


def test_level_from_t0_t1(fam):
    m = fam.module("L0+L1")
    v = m.highest()
    assert m.t(0, m.t(1, v)) == {k: c * qpow(2) for k, c in v.items()}


def test_sigma_is_an_involution(fam):
    lam = AffineWeightA1(1, 1)
    m = fam.module(lam)
    for key in m.basis(2):
        v = {key: ONE}
        assert fam.sigma(lam, fam.sigma(lam, v)) == v


def test_sigma_flips_words(fam):
    src, dst = fam.module("2L0"), fam.module("2L1")
    assert fam.sigma((2, 0), src.f(0, src.highest())) == dst.f(1, dst.highest())


def test_dhat_of_mixed_top_lies_in_a_line(fam):
    lam = AffineWeightA1(1, 1)
    out = fam.dhat(lam, fam.module(lam).highest())
    assert out and {k[:2] for k in out} == {(1, 0)}
    assert fam.module(lam).dim(1, 0) == 1


def test_cache_round_trip(tmp_path):
    a = build_module("L0+L1", 3, cache_dir=str(tmp_path))
    b = build_module("L0+L1", 3, cache_dir=str(tmp_path))
    assert a.to_json() == b.to_json()
    assert len(list(tmp_path.iterdir())) == 1


def test_cache_mismatch_is_rejected(tmp_path):
    m = build_module("2L0", 2)
    text = m.to_json().replace('"version": 1', '"version": 99')
    with pytest.raises(ValueError, match="cache"):
        IrredModuleA1.from_json(text)


@pytest.mark.parametrize("level", [1, 2, 3])
def test_evaluation_module_relations(level):
    assert EvaluationModule(level).check_relations() == []


@pytest.mark.parametrize("lam", LEVEL2)
def test_drinfeld_suite_small(lam):
    rep = verify_drinfeld(lam, 4, window=2)
    assert rep.passed, rep.failures()


def test_drinfeld_suite_level_one():
    assert verify_drinfeld("L0", 5, window=2).passed


def test_reflection_suite_small():
    rep = verify_reflection("L0+L1", 4)
    assert rep.passed, rep.failures()
    assert len(rep.entries) == 15


def test_dhat_suite_small():
    rep = verify_dhat("2L1", 4)
    assert rep.passed, rep.failures()
