"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
All comparisons are exact; the pinned parameters below are the tolerances.
"""

import subprocess
import sys

import pytest

from qaffine.suites import SuiteConfig, run_suite

ORDER = 12              # series order for criteria 1-3
LEVELS = (1, 2, 3)
SL2_DEPTH, SL2_WINDOW = 6, 3
REFLECT_DEPTH = 5
INTER_DEPTH, INTER_WINDOW = 5, 1
SP4_DEPTH, SP4_WINDOW, SERRE_WINDOW = 4, 3, 2   # Serre: cubic {-2..2}, quartic {-1,0,1}
HW_DEPTH = 4
CHAR_DEPTH = 5

_results = {}


def _line(n, ok, text, detail=""):
    msg = f"{'PASS' if ok else 'FAIL'}  criterion {n}: {text}"
    if detail:
        msg += f"  ({detail})"
    _results[n] = ok
    return msg


def _failed_ids(rep):
    return [e["id"] for e in rep["relations"] if not e["pass"]]


def crit1():
    from qaffine.qfield import ONE, ZERO, qexp_coeff
    bad = []
    for n in range(ORDER + 1):
        tot = ZERO
        for a in range(n + 1):
            tot = tot + qexp_coeff(a, 1) * qexp_coeff(n - a, -1) * (-1) ** (n - a)
        if tot != (ONE if n == 0 else ZERO):
            bad.append(n)
    return not bad, f"exp_q(x) exp_(q^-1)(-x) = 1 to order {ORDER}", f"bad orders {bad}" if bad else ""


def crit2():
    rep = run_suite(SuiteConfig("normal-ordering", order=ORDER))
    ids = [e["id"] for e in rep["relations"] if e["id"] != "log-product identity"]
    bad = _failed_ids(rep)
    detail = f"{len(ids)} identities"
    if bad:
        entry = next(e for e in rep["relations"] if e["id"] == bad[0])
        detail += f"; failing {bad}; witness {entry.get('witness')}; data {entry.get('data')}"
    return rep["pass"] and len(ids) == 21, f"normal-ordering prefactors to order {ORDER}", detail


def crit3():
    from qaffine.fockvo import QProduct, Series, qproduct_log
    from qaffine.qfield import ZERO, qint, qpow
    bad = []
    for l in LEVELS:
        lhs = Series([ZERO] + [-qint(l * k) / (qint(2 * k) * k) for k in range(1, ORDER + 1)])
        rhs = qproduct_log([QProduct(qpow(2 - l), qpow(4))], [QProduct(qpow(2 + l), qpow(4))], ORDER)
        if lhs != rhs:
            bad.append(l)
    return not bad, f"log-product identity, levels {LEVELS}, order {ORDER}", f"bad levels {bad}" if bad else ""


def crit4():
    rep = run_suite(SuiteConfig("sl2-drinfeld", depth=SL2_DEPTH, window=SL2_WINDOW))
    return rep["pass"], f"sl2 multiplicities and Drinfeld relations, depth {SL2_DEPTH}, |k| <= {SL2_WINDOW}", \
        ", ".join(_failed_ids(rep))


def crit5():
    a = run_suite(SuiteConfig("s-reflection", depth=REFLECT_DEPTH))
    b = run_suite(SuiteConfig("dhat", depth=REFLECT_DEPTH))
    n_s = len({e["id"].split(" [")[0] for e in a["relations"]} - {"q-exponential inverse"})
    return a["pass"] and b["pass"] and n_s == 14, \
        f"S_0, S_1 conjugations (7 each) and D-hat relations, depth {REFLECT_DEPTH}", \
        ", ".join(_failed_ids(a) + _failed_ids(b))


def crit6():
    reps = [run_suite(SuiteConfig(s, depth=INTER_DEPTH, window=INTER_WINDOW))
            for s in ("intertwiner-I", "intertwiner-II")]
    consts = {}
    for rep in reps:
        for e in rep["relations"]:
            if "q^d conjugation" in e["id"]:
                d = e.get("data", {})
                consts[e["id"]] = (d.get("constant"), d.get("expected_constant", d.get("constant")))
    ok = (all(r["pass"] for r in reps) and bool(consts)
          and all(c is not None and c == want for c, want in consts.values()))
    return ok, f"intertwiner equations, level 2, all weights, depth {INTER_DEPTH}", \
        "; ".join(f"{k}: {v[0]}" for k, v in sorted(consts.items())) + \
        ("; failing " + ", ".join(_failed_ids(reps[0]) + _failed_ids(reps[1])) if not ok else "")


def crit7():
    a = run_suite(SuiteConfig("sp4-relations", depth=SP4_DEPTH, window=SP4_WINDOW))
    b = run_suite(SuiteConfig("sp4-serre", depth=SP4_DEPTH, window=SERRE_WINDOW))
    return a["pass"] and b["pass"], \
        f"sp4 relations |k| <= {SP4_WINDOW} and Serre relations on each V(j), depth {SP4_DEPTH}", \
        ", ".join(_failed_ids(a) + _failed_ids(b))


def crit8():
    hw = run_suite(SuiteConfig("highest-weight", depth=HW_DEPTH))
    nested = run_suite(SuiteConfig("nested-commutator", depth=HW_DEPTH))
    link = run_suite(SuiteConfig("linking", depth=HW_DEPTH, window=1))
    nonzero = all(e.get("data", {}).get("scalars") and all(v != "0" for v in e["data"]["scalars"].values())
                  for e in link["relations"])
    ok = hw["pass"] and nested["pass"] and link["pass"] and len(link["relations"]) == 6 and nonzero
    return ok, "highest vectors, nested commutator identity, six linkings with nonzero scalars", \
        ", ".join(_failed_ids(hw) + _failed_ids(nested) + _failed_ids(link))


def crit9():
    from qaffine.spfour import compare_character
    bad = {}
    for j in (0, 1, 2):
        r = compare_character(j, CHAR_DEPTH)
        if not r["equal"]:
            bad[j] = r["diff"][:3]
    return not bad, f"characters of V(0), V(1), V(2) equal the oracle, depth {CHAR_DEPTH}", \
        str(bad) if bad else ""


def crit10():
    runs = [
        ["verify", "--suite", "normal-ordering"],
        ["verify", "--suite", "highest-weight", "--depth", "3"],
        ["verify", "--suite", "dhat", "--depth", "4", "--sample", "5", "--seed", "11"],
        ["verify", "--suite", "y-ops", "--depth", "2", "--window", "1"],
    ]
    bad = []
    for args in runs:
        outs = [subprocess.run([sys.executable, "-m", "qaffine.cli", *args, *extra],
                               capture_output=True, text=True).stdout
                for extra in ([], [], ["--jobs", "2"])]
        if not outs[0] or len(set(outs)) != 1:
            bad.append(args[2])
    return not bad, "repeated runs give byte-identical reports (also across --jobs)", \
        f"differs: {bad}" if bad else ""


CRITERIA = [crit1, crit2, crit3, crit4, crit5, crit6, crit7, crit8, crit9, crit10]


def _run(n, capsys=None):
    ok, text, detail = CRITERIA[n - 1]()
    msg = _line(n, ok, text, detail)
    if capsys is not None:
        with capsys.disabled():
            print("\n" + msg)
    else:
        print(msg)
    return ok, msg


@pytest.mark.parametrize("n", range(1, 11))
def test_criterion(n, capsys):
    ok, msg = _run(n, capsys)
    assert ok, msg


if __name__ == "__main__":
    results = [_run(n)[0] for n in range(1, 11)]
    sys.exit(0 if all(results) else 1)
