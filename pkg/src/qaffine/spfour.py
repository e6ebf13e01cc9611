"""Level-1 U_q(sp4-hat) modules built from level-2 U_q(sl2-hat) modules.

The space ``V(j)`` is a sum of ``V(lam_p) (x) F_p`` where ``F_p`` is the Fock
space of the b-oscillators with charge ``p``.  States are keyed
``(p, module_key, parts)``.  Drinfeld generators of sp4-hat act by

    X_1^{+-} -> X^{+-},   X_2^{+-} -> Y^{+-},   a_1 -> a,
    a_2(k) -> -(a(k) + [2k] b(k)) / [2],   K_1 -> K,   K_2 -> (q^{2 b(0)} K)^{-1},

with ``Y^+(z) = Psi_2(q^-2 z) (x) Omega_2(z)`` and
``Y^-(z) = Phi_0(z) (x) Omega_0(z)``; gamma = q^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable, Iterable, Mapping

from .charoracle import C2_AFFINE, CharTable, compare, freudenthal
from .fockvo import (B_OSCILLATORS, OMEGA0, OMEGA2, _partitions, annihilate, apply_mode, create,
                     phi0_spec, psi_spec)
from .intertwine import Intertwiners
from .linalg import axpy, proportional, vec_scale
from .qfield import ONE, ZERO, Scalar, as_scalar, qint, qpow
from .report import RelationReport, pick_states
from .sl2mod import AffineWeightA1, ModuleFamily, TruncationOverflow

__all__ = [
    "C2Data",
    "C2",
    "BigSpace",
    "Sp4Action",
    "build_bigspace",
    "qd_grade",
    "qbracket",
    "verify_sp4_relations",
    "verify_sp4_serre",
    "verify_y_ops",
    "verify_highest_weight",
    "verify_linking",
    "character",
    "compare_character",
]


@dataclass(frozen=True)
class C2Data:
    """Cartan data of C2^(1); rows of ``cartan`` are a_{i,j}, i the row."""

    cartan: tuple[tuple[int, ...], ...] = ((2, -1, 0), (-2, 2, -2), (0, -1, 2))
    d: tuple[int, ...] = (2, 1, 2)

    def a(self, i: int, j: int) -> int:
        return self.cartan[i][j]

    def qi(self, i: int) -> int:
        """Exponent e with q_i = q^e: q_1 = q, q_2 = q^2."""
        return self.d[i]

    def qint_i(self, n: int, i: int) -> Scalar:
        return qint(n, self.d[i])


C2 = C2Data()
GAMMA_EXP = 2  # gamma = q^2


def qbracket(a: Callable[[Mapping], dict], b: Callable[[Mapping], dict], v: Scalar) -> Callable:
    """[a, b]_v = a b - v b a as an operator on vectors."""
    def op(vec):
        out = a(b(vec))
        axpy(out, -v, b(a(vec)))
        return out
    return op


# -- spaces -------------------------------------------------------------------

def _charge_exponent(j: int, p: Fraction) -> Fraction:
    """Minus the q^d exponent of v(p) in V(j)."""
    if j == 1:
        return (p - Fraction(1, 2)) * (p + Fraction(1, 2)) / 2
    if p.denominator != 1:
        raise ValueError("integral charge expected")
    if p % 2 == 0:
        return p * p / 2
    return (p * p + (1 if j == 0 else -1)) / 2


_HW_CHARGE = {0: Fraction(0), 1: Fraction(-1, 2), 2: Fraction(-1)}


def qd_grade(j: int, state) -> int:
    """Degree (minus the q^d exponent, zero on the highest weight vector) of a basis state."""
    p, mk, parts = state
    deg = mk[0] + sum(parts) + _charge_exponent(j, p) - _charge_exponent(j, _HW_CHARGE[j])
    if deg.denominator != 1:
        raise ArithmeticError("non-integral degree")
    return int(deg)


class BigSpace:
    """Truncated V(j): states of degree <= depth, keyed (p, module_key, parts)."""

    def __init__(self, j: int, depth: int, family: ModuleFamily | None = None):
        if j not in (0, 1, 2):
            raise ValueError("j must be 0, 1 or 2")
        self.j = j
        self.depth = depth
        self.fam = family or ModuleFamily(2, depth)
        if self.fam.level != 2:
            raise ValueError("V(j) is built from level-2 modules")

    def lam_of(self, p: Fraction) -> AffineWeightA1:
        if self.j == 1:
            return AffineWeightA1(1, 1)
        even = p % 2 == 0
        if self.j == 0:
            return AffineWeightA1(2, 0) if even else AffineWeightA1(0, 2)
        return AffineWeightA1(0, 2) if even else AffineWeightA1(2, 0)

    def module(self, p: Fraction):
        return self.fam.module(self.lam_of(p))

    def charge_degree(self, p: Fraction) -> int:
        return int(_charge_exponent(self.j, p) - _charge_exponent(self.j, _HW_CHARGE[self.j]))

    def charges(self, max_degree: int | None = None) -> list[Fraction]:
        N = self.depth if max_degree is None else max_degree
        base = Fraction(1, 2) if self.j == 1 else Fraction(0)
        M = 2 * N + 3
        return [base + k for k in range(-M, M + 1) if self.charge_degree(base + k) <= N]

    def degree(self, state) -> int:
        return qd_grade(self.j, state)

    def basis(self, max_degree: int | None = None) -> list:
        N = self.depth if max_degree is None else max_degree
        out = []
        for p in self.charges(N):
            cd = self.charge_degree(p)
            mod = self.module(p)
            for mk in mod.basis(N - cd):
                rest = N - cd - mod.state_degree(mk)
                for n in range(rest + 1):
                    for parts in _partitions(n):
                        out.append((p, mk, parts))
        out.sort(key=lambda s: (self.degree(s), s[0], s[1], sorted(s[2], reverse=True), s[2]))
        return out

    def highest(self) -> dict:
        return {(_HW_CHARGE[self.j], (0, 0, 0), ()): ONE}

    def vector(self, p, mk=(0, 0, 0), parts=()) -> dict:
        return {(Fraction(p), tuple(mk), tuple(parts)): ONE}

    def graded_dims(self) -> dict[int, int]:
        dims: dict[int, int] = {}
        for s in self.basis():
            d = self.degree(s)
            dims[d] = dims.get(d, 0) + 1
        return dims

    def __repr__(self) -> str:
        return f"BigSpace(j={self.j}, depth={self.depth})"


def build_bigspace(j: int, depth: int) -> BigSpace:
    return BigSpace(j, depth)


# -- action -------------------------------------------------------------------

def _fock_overflow(fn):
    def wrapped(*args, **kw):
        try:
            return fn(*args, **kw)
        except OverflowError as exc:
            raise TruncationOverflow(str(exc)) from exc
    return wrapped


class Sp4Action:
    """Drinfeld and Chevalley generators of U_q(sp4-hat) on a BigSpace."""

    def __init__(self, space: BigSpace, fock_slack: int = 8):
        self.V = space
        self.fam = space.fam
        self.inter = Intertwiners(self.fam)
        self.cap = space.depth + fock_slack
        self._y_memo: dict = {}
        self._specs = {1: (psi_spec(2, Fraction(-2)), OMEGA2), -1: (phi0_spec(2), OMEGA0)}

    # factor-wise helpers
    def _on_module(self, vec: Mapping, fn: Callable) -> dict:
        """fn(module, module_vector) acting on the V(lam_p) factor."""
        out: dict = {}
        for (p, mk, parts), c in vec.items():
            img = fn(self.V.module(p), {mk: ONE})
            for mk2, c2 in img.items():
                axpy(out, c * c2, {(p, mk2, parts): ONE})
        return out

    def _on_fock(self, vec: Mapping, fn: Callable) -> dict:
        out: dict = {}
        for (p, mk, parts), c in vec.items():
            img = fn({(parts, p): ONE})
            for (parts2, p2), c2 in img.items():
                axpy(out, c * c2, {(p2, mk, parts2): ONE})
        return out

    # sl2 part
    def x1(self, sign: int, k: int, vec: Mapping) -> dict:
        name = "xp" if sign > 0 else "xm"
        return self._on_module(vec, lambda M, v: M.drinfeld.apply(name, k, v))

    def a1(self, k: int, vec: Mapping) -> dict:
        return self._on_module(vec, lambda M, v: M.drinfeld.a(k, v))

    def K1(self, vec: Mapping, power: int = 1) -> dict:
        return self._on_module(vec, lambda M, v: M.t(1, v, power))

    def chevalley_sl2(self, gen: str, vec: Mapping) -> dict:
        return self._on_module(vec, lambda M, v: M.act(gen, v))

    # Heisenberg part
    def b(self, k: int, vec: Mapping) -> dict:
        if k > 0:
            return self._on_fock(vec, lambda f: annihilate(B_OSCILLATORS, k, f))
        if k < 0:
            return self._on_fock(vec, lambda f: create(-k, f))
        return {s: c * as_scalar(s[0]) for s, c in vec.items() if s[0]}

    def a2(self, k: int, vec: Mapping) -> dict:
        out = self.a1(k, vec)
        axpy(out, qint(2 * abs(k)), self.b(k, vec))
        return vec_scale(-qint(2).inv(), out)

    def K2(self, vec: Mapping, power: int = 1) -> dict:
        # (q^{2 b(0)} K)^{-1}
        out = {}
        for s, c in vec.items():
            p, mk, _ = s
            h = self.V.module(p).h_value(1, mk[0], mk[1])
            out[s] = c * qpow(-power * (2 * p + h))
        return out

    def qd(self, vec: Mapping, power: int = 1) -> dict:
        return {s: c * qpow(-power * self.V.degree(s)) for s, c in vec.items()}

    # Y modes
    def y(self, sign: int, k: int, vec: Mapping) -> dict:
        """y^{+-}(k): coefficient of z^{-k-1} in Y^{+-}(z)."""
        out: dict = {}
        for s, c in vec.items():
            axpy(out, c, self._y_basis(sign, k, s))
        return out

    def _y_basis(self, sign: int, k: int, state) -> dict:
        mk_ = (sign, k, state)
        r = self._y_memo.get(mk_)
        if r is not None:
            return r
        p, mk, parts = state
        specM, specF = self._specs[sign]
        mod = self.V.module(p)
        lam = mod.lam
        h = mod.h_value(1, mk[0], mk[1])
        one = {mk: ONE}
        w = self.fam.dhat(lam, one) if specM.dhat > 0 else self.fam.dhat_inverse(lam, one)
        dst = self.fam.module(lam.flip())
        top = max(dst.state_degree(x) for x in w) if w else 0
        a_min = specM.slope * h - top
        b_min = specF.slope * p - sum(parts)
        total = Fraction(-k - 1)
        r = {}
        b = b_min
        while total - b >= a_min:
            fock = _fock_overflow(apply_mode)(specF, b, {(parts, p): ONE}, self.cap)
            if fock:
                modv = self.inter.apply_spec(specM, lam, total - b, one)
                for mk2, c1 in modv.items():
                    for (parts2, p2), c2 in fock.items():
                        axpy(r, c1 * c2, {(p2, mk2, parts2): ONE})
            b += 1
        self._y_memo[mk_] = r
        return r

    # unified access
    def X(self, i: int, sign: int, k: int, vec: Mapping) -> dict:
        return self.x1(sign, k, vec) if i == 1 else self.y(sign, k, vec)

    def A(self, i: int, k: int, vec: Mapping) -> dict:
        return self.a1(k, vec) if i == 1 else self.a2(k, vec)

    def Kop(self, i: int, vec: Mapping, power: int = 1) -> dict:
        return self.K1(vec, power) if i == 1 else self.K2(vec, power)

    def cartan_current(self, i: int, sign: int, n: int, vec: Mapping) -> dict:
        """Coefficient P_n (sign +) of K_i exp((q_i - q_i^-1) sum a_i(k) gamma^{k/2} z^-k),
        or F_n (sign -) of K_i^-1 exp(-(q_i - q_i^-1) sum a_i(-k) gamma^{k/2} z^k)."""
        e = C2.qi(i)
        qq = qpow(e) - qpow(-e)
        # E_n = (1/n) sum_k k c_k a(+-k) E_{n-k}, c_k = +-(q_i - q_i^-1) gamma^{k/2}
        terms = [dict(vec)]
        for m in range(1, n + 1):
            acc: dict = {}
            for k in range(1, m + 1):
                if not terms[m - k]:
                    continue
                ck = qq * qpow(Fraction(GAMMA_EXP * k, 2)) * sign
                axpy(acc, ck * k / m, self.A(i, sign * k, terms[m - k]))
            terms.append(acc)
        return self.Kop(i, terms[n], sign)

    # Chevalley generators
    def e(self, i: int, vec: Mapping) -> dict:
        if i == 1:
            return self.x1(1, 0, vec)
        if i == 2:
            return self.y(1, 0, vec)
        # e_0 = q^2 [x_1^-(0), [x_2^-(0), x_1^-(1)]_{q^-2}]_1 K_1^-2 K_2^-1
        v = self.K2(self.K1(vec, -2), -1)
        inner = qbracket(lambda u: self.y(-1, 0, u), lambda u: self.x1(-1, 1, u), qpow(-2))
        outer = qbracket(lambda u: self.x1(-1, 0, u), inner, ONE)
        return vec_scale(qpow(2), outer(v))

    def f(self, i: int, vec: Mapping) -> dict:
        if i == 1:
            return self.x1(-1, 0, vec)
        if i == 2:
            return self.y(-1, 0, vec)
        raise NotImplementedError("f_0 is not needed by the suites")

    def apply(self, label: str, vec: Mapping) -> dict:
        """Apply a generator label such as 'x1+(0)', 'x2-(-1)', 'a2(1)', 'K2', 'e0', 'qd', 'b(-1)'."""
        import re
        t = label.replace(" ", "")
        m = re.fullmatch(r"x([12])([+-])\((-?\d+)\)", t)
        if m:
            return self.X(int(m.group(1)), 1 if m.group(2) == "+" else -1, int(m.group(3)), vec)
        m = re.fullmatch(r"y([+-])\((-?\d+)\)", t)
        if m:
            return self.y(1 if m.group(1) == "+" else -1, int(m.group(2)), vec)
        m = re.fullmatch(r"a([12])\((-?\d+)\)", t)
        if m:
            return self.A(int(m.group(1)), int(m.group(2)), vec)
        m = re.fullmatch(r"b\((-?\d+)\)", t)
        if m:
            return self.b(int(m.group(1)), vec)
        m = re.fullmatch(r"K([12])(\^(-?1))?", t)
        if m:
            return self.Kop(int(m.group(1)), vec, int(m.group(3) or 1))
        m = re.fullmatch(r"([ef])([012])", t)
        if m:
            return self.e(int(m.group(2)), vec) if m.group(1) == "e" else self.f(int(m.group(2)), vec)
        if t in ("qd", "q^d"):
            return self.qd(vec)
        raise ValueError(f"unknown generator {label!r}")


# -- verification ----------------------------------------------------------------

def _lin(*terms) -> dict:
    out: dict = {}
    for c, v in terms:
        axpy(out, c, v)
    return out


def _interior(space: BigSpace, margin: int, limit: int | None) -> list:
    states = space.basis(max(space.depth - margin, 0))
    return pick_states(states, limit)


def verify_sp4_relations(j: int, depth: int, window: int = 1, kmax: int = 2,
                         action: Sp4Action | None = None, max_states: int | None = None) -> RelationReport:
    """Cartan, a-a, K and q^d conjugation, a-X brackets, locality and [X^+, X^-] in modes."""
    act = action or Sp4Action(BigSpace(j, depth))
    V = act.V
    rep = RelationReport("sp4-relations", {"j": j, "depth": depth, "window": window, "kmax": kmax})
    gq = lambda k: qpow(GAMMA_EXP * k) - qpow(-GAMMA_EXP * k)
    modes = list(range(-window, window + 1))
    states1 = _interior(V, 1, max_states)
    states2 = _interior(V, 1, max_states)

    with rep.relation("level: gamma = q^2 via t0 t1^2 t2", None) as e:
        for s in states1:
            v = {s: ONE}
            # t_0 = gamma (K1^2 K2)^-1 and q^{2c} = t0 t1^2 t2 with t1 = K1, t2 = K2
            t0 = vec_scale(qpow(GAMMA_EXP), act.K2(act.K1(v, -2), -1))
            e.check(s, {}, lambda: act.K2(act.K1(t0, 2)), lambda: vec_scale(qpow(GAMMA_EXP), v))

    with rep.relation("a_i a_j brackets", {"kmax": kmax}) as e:
        for s in states1:
            v = {s: ONE}
            for i in (1, 2):
                for jj in (1, 2):
                    for k in range(1, kmax + 1):
                        for l in range(-kmax, kmax + 1):
                            if l == 0:
                                continue
                            if k + l == 0:
                                qj = C2.qi(jj)
                                c = C2.qint_i(C2.a(i, jj) * k, i) / k * gq(k) / (qpow(qj) - qpow(-qj))
                            else:
                                c = ZERO
                            e.check(s, {"i": i, "j": jj, "k": k, "l": l},
                                    lambda: _lin((ONE, act.A(i, k, act.A(jj, l, v))),
                                                 (-ONE, act.A(jj, l, act.A(i, k, v)))),
                                    lambda: vec_scale(c, v))

    with rep.relation("K conjugation", {"modes": window}) as e:
        for s in states1:
            v = {s: ONE}
            for i in (1, 2):
                for jj in (1, 2):
                    for sign in (1, -1):
                        for k in modes:
                            c = qpow(sign * C2.qi(i) * C2.a(i, jj))
                            e.check(s, {"K": jj, "X": i, "sign": sign, "k": k},
                                    lambda: act.Kop(jj, act.X(i, sign, k, act.Kop(jj, v, -1))),
                                    lambda: vec_scale(c, act.X(i, sign, k, v)))
                    for k in (1, -1):
                        e.check(s, {"K": jj, "a": i, "k": k},
                                lambda: act.Kop(jj, act.A(i, k, act.Kop(jj, v, -1))),
                                lambda: act.A(i, k, v))

    with rep.relation("q^d conjugation", {"modes": window}) as e:
        for s in states1:
            v = {s: ONE}
            for i in (1, 2):
                for sign in (1, -1):
                    for k in modes:
                        e.check(s, {"X": i, "sign": sign, "k": k},
                                lambda: act.qd(act.X(i, sign, k, act.qd(v, -1))),
                                lambda: vec_scale(qpow(k), act.X(i, sign, k, v)))
                for k in (1, -1, 2, -2):
                    e.check(s, {"a": i, "k": k},
                            lambda: act.qd(act.A(i, k, act.qd(v, -1))),
                            lambda: vec_scale(qpow(k), act.A(i, k, v)))

    with rep.relation("a_i X_j brackets", {"modes": window, "kmax": kmax}) as e:
        for s in states1:
            v = {s: ONE}
            for i in (1, 2):
                for jj in (1, 2):
                    for sign in (1, -1):
                        for k in range(-kmax, kmax + 1):
                            if k == 0:
                                continue
                            ak = abs(k)
                            c = sign * C2.qint_i(C2.a(i, jj) * k, i) / k * qpow(Fraction(-sign * GAMMA_EXP * ak, 2))
                            for n in modes:
                                e.check(s, {"a": i, "X": jj, "sign": sign, "k": k, "n": n},
                                        lambda: _lin((ONE, act.A(i, k, act.X(jj, sign, n, v))),
                                                     (-ONE, act.X(jj, sign, n, act.A(i, k, v)))),
                                        lambda: vec_scale(c, act.X(jj, sign, n + k, v)))

    with rep.relation("X_i X_j locality", {"modes": window}) as e:
        for s in states2:
            v = {s: ONE}
            for i in (1, 2):
                for jj in (1, 2):
                    for sign in (1, -1):
                        Q = qpow(sign * C2.qi(i) * C2.a(i, jj))
                        Xi = lambda k, u: act.X(i, sign, k, u)
                        Xj = lambda k, u: act.X(jj, sign, k, u)
                        for m in modes:
                            for n in modes:
                                e.check(s, {"i": i, "j": jj, "sign": sign, "m": m, "n": n},
                                        lambda: _lin((ONE, Xi(m + 1, Xj(n, v))), (-Q, Xi(m, Xj(n + 1, v)))),
                                        lambda: _lin((-ONE, Xj(n + 1, Xi(m, v))), (Q, Xj(n, Xi(m + 1, v)))))

    with rep.relation("X+ X- commutator", {"modes": window}) as e:
        for s in states2:
            v = {s: ONE}
            for i in (1, 2):
                for jj in (1, 2):
                    qe = C2.qi(i)
                    for m in modes:
                        for n in modes:
                            def rhs(i=i, jj=jj, m=m, n=n, qe=qe):
                                if i != jj:
                                    return {}
                                out: dict = {}
                                if m + n >= 0:
                                    axpy(out, qpow(-GAMMA_EXP * n), act.cartan_current(i, 1, m + n, v))
                                if m + n <= 0:
                                    axpy(out, -qpow(GAMMA_EXP * n), act.cartan_current(i, -1, -(m + n), v))
                                return vec_scale((qpow(qe) - qpow(-qe)).inv(), out)
                            e.check(s, {"i": i, "j": jj, "m": m, "n": n},
                                    lambda: _lin((ONE, act.X(i, 1, m, act.X(jj, -1, n, v))),
                                                 (-ONE, act.X(jj, -1, n, act.X(i, 1, m, v)))),
                                    rhs)
    return rep


def verify_sp4_serre(j: int, depth: int, window_cubic: int = 2, window_quartic: int = 1,
                     action: Sp4Action | None = None, max_states: int | None = None,
                     signs: Iterable[int] = (1, -1)) -> RelationReport:
    """Symmetrized Serre relations in modes (cubic: one X_1, two X_2; quartic: one X_2, three X_1)."""
    act = action or Sp4Action(BigSpace(j, depth))
    V = act.V
    rep = RelationReport("sp4-serre", {"j": j, "depth": depth, "cubic_window": window_cubic,
                                       "quartic_window": window_quartic})
    c3 = C2.qint_i(3, 1)
    c2 = C2.qint_i(2, 2)
    states = _interior(V, 0, max_states)

    with rep.relation("Serre X2 X1 X1 X1 symmetrized", {"modes": window_quartic}) as e:
        W = range(-window_quartic, window_quartic + 1)
        for sign in signs:
            X1 = lambda k, u: act.X(1, sign, k, u)
            X2 = lambda k, u: act.X(2, sign, k, u)
            for s in states:
                v = {s: ONE}
                for n in W:
                    for ms in _multisets(W, 3):
                        perms = sorted(set(permutations(ms)))

                        def lhs(n=n, perms=perms):
                            out: dict = {}
                            for a, b, c in perms:
                                axpy(out, ONE, X2(n, X1(a, X1(b, X1(c, v)))))
                                axpy(out, c3, X1(a, X1(b, X2(n, X1(c, v)))))
                            return out

                        def rhs(n=n, perms=perms):
                            out: dict = {}
                            for a, b, c in perms:
                                axpy(out, c3, X1(a, X2(n, X1(b, X1(c, v)))))
                                axpy(out, ONE, X1(a, X1(b, X1(c, X2(n, v)))))
                            return out
                        e.check(s, {"sign": sign, "n": n, "m": list(ms)}, lhs, rhs)

    with rep.relation("Serre X1 X2 X2 symmetrized", {"modes": window_cubic}) as e:
        W = range(-window_cubic, window_cubic + 1)
        for sign in signs:
            X1 = lambda k, u: act.X(1, sign, k, u)
            X2 = lambda k, u: act.X(2, sign, k, u)
            for s in states:
                v = {s: ONE}
                for n in W:
                    for ms in _multisets(W, 2):
                        perms = sorted(set(permutations(ms)))

                        def lhs(n=n, perms=perms):
                            out: dict = {}
                            for a, b in perms:
                                axpy(out, ONE, X1(n, X2(a, X2(b, v))))
                                axpy(out, ONE, X2(a, X2(b, X1(n, v))))
                            return out

                        def rhs(n=n, perms=perms):
                            out: dict = {}
                            for a, b in perms:
                                axpy(out, c2, X2(a, X1(n, X2(b, v))))
                            return out
                        e.check(s, {"sign": sign, "n": n, "m": list(ms)}, lhs, rhs)
    return rep


def verify_y_ops(j: int, depth: int, window: int = 2, kmax: int = 2,
                 action: Sp4Action | None = None, max_states: int | None = None) -> RelationReport:
    """Brackets of a(k), b(k), b(0) and q^d with the modes of Y^+- on V(j)."""
    act = action or Sp4Action(BigSpace(j, depth))
    V = act.V
    rep = RelationReport("y-ops", {"j": j, "depth": depth, "window": window, "kmax": kmax})
    states = _interior(V, 1, max_states)
    modes = range(-window, window + 1)
    ks = [k for k in range(-kmax, kmax + 1) if k]

    def bracket(op, sign, k, m, v):
        return _lin((ONE, op(k, act.y(sign, m, v))), (-ONE, act.y(sign, m, op(k, v))))

    for s in states:
        v = {s: ONE}
        for sign in (1, -1):
            with rep.relation("a-Y bracket", {"modes": window, "kmax": kmax}) as e:
                for k in ks:
                    c = -sign * qint(2 * k) / k * qpow(-sign * abs(k))
                    for m in modes:
                        e.check(s, {"sign": sign, "k": k, "m": m},
                                lambda: bracket(act.a1, sign, k, m, v),
                                lambda: vec_scale(c, act.y(sign, m + k, v)))
            with rep.relation("b-Y bracket", {"modes": window, "kmax": kmax}) as e:
                for k in ks:
                    c = -sign * (qpow(2 * k) - ONE + qpow(-2 * k)) / abs(k) * qpow(-sign * abs(k))
                    for m in modes:
                        e.check(s, {"sign": sign, "k": k, "m": m},
                                lambda: bracket(act.b, sign, k, m, v),
                                lambda: vec_scale(c, act.y(sign, m + k, v)))
            with rep.relation("b(0) charge shift", {"modes": window}) as e:
                for m in modes:
                    e.check(s, {"sign": sign, "m": m},
                            lambda: act.b(0, act.y(sign, m, v)),
                            lambda: _lin((ONE, act.y(sign, m, act.b(0, v))),
                                         (Scalar.from_int(-sign), act.y(sign, m, v))))
            with rep.relation("q^d conjugation of Y modes", {"modes": window}) as e:
                for m in modes:
                    e.check(s, {"sign": sign, "m": m},
                            lambda: act.qd(act.y(sign, m, act.qd(v, -1))),
                            lambda: vec_scale(qpow(m), act.y(sign, m, v)))
    return rep


def _multisets(W, r):
    from itertools import combinations_with_replacement
    return list(combinations_with_replacement(list(W), r))


def verify_highest_weight(j: int, depth: int, action: Sp4Action | None = None) -> RelationReport:
    act = action or Sp4Action(BigSpace(j, max(depth, 2)))
    V = act.V
    w = V.highest()
    rep = RelationReport("highest-weight", {"j": j, "depth": V.depth})
    for i in (0, 1, 2):
        with rep.relation(f"e{i} kills highest vector", None) as e:
            out = act.e(i, w)
            e.check_value("w", {"e": i}, not out, out or None)
    with rep.relation("weight of highest vector", None) as e:
        (s,) = w
        k1 = act.K1(w)[s]
        k2 = act.K2(w)[s]
        h1 = _qexp(k1)
        h2 = Fraction(_qexp(k2), 2)
        t0 = vec_scale(qpow(GAMMA_EXP), act.K2(act.K1(w, -2), -1))[s]
        h0 = Fraction(_qexp(t0), 2)
        got = (h0, Fraction(h1), h2)
        want = tuple(Fraction(int(i == j)) for i in range(3))
        e.extra["weight"] = [str(x) for x in got]
        e.check_value("w", {}, got == want, {"weight": [str(x) for x in got]})
    with rep.relation("highest vector has degree 0", None) as e:
        (s,) = w
        e.check_value("w", {}, act.qd(w)[s] == ONE and V.degree(s) == 0)
    return rep


def _qexp(c: Scalar) -> int:
    """Exponent e with c = q^e (c must be a monomial)."""
    for e2 in range(-60, 61):
        if c == qpow(Fraction(e2, 2)):
            return Fraction(e2, 2)
    raise ValueError(f"{c} is not a power of q")


def verify_linking(depth: int, pmax: int = 1, fam: ModuleFamily | None = None) -> RelationReport:
    """The six linking equations between vacuum-type vectors; scalars recorded."""
    fam = fam or ModuleFamily(2, depth)
    spaces = {j: Sp4Action(BigSpace(j, depth, fam)) for j in (0, 1, 2)}
    rep = RelationReport("linking", {"depth": depth, "pmax": pmax})
    L00, L11, L01 = (2, 0), (0, 2), (1, 1)

    def space_for(lam, p):
        for j, act in spaces.items():
            V = act.V
            if (j == 1) != (Fraction(p).denominator == 2):
                continue
            if V.lam_of(Fraction(p)) == AffineWeightA1(*lam):
                return act
        return None

    def vec(p):
        return {(Fraction(p), (0, 0, 0), ()): ONE}

    half = Fraction(1, 2)
    cases = [
        ("y-(-(p+1)) on 2L0 x v(p)", L00, lambda p: p, L11, lambda p: p + 1,
         lambda act, p, v: act.y(-1, -(p + 1), v)),
        ("x-(1) y-(-(p+1)) on (L0+L1) x v(p-1/2)", L01, lambda p: p - half, L01, lambda p: p + half,
         lambda act, p, v: act.x1(-1, 1, act.y(-1, -(p + 1), v))),
        ("x-(1)^2 y-(-(p+2)) on 2L1 x v(p)", L11, lambda p: p, L00, lambda p: p + 1,
         lambda act, p, v: act.x1(-1, 1, act.x1(-1, 1, act.y(-1, -(p + 2), v)))),
        ("x+(0)^2 y+(p-1) on 2L0 x v(p)", L00, lambda p: p, L11, lambda p: p - 1,
         lambda act, p, v: act.x1(1, 0, act.x1(1, 0, act.y(1, p - 1, v)))),
        ("x+(0) y+(p) on (L0+L1) x v(p+1/2)", L01, lambda p: p + half, L01, lambda p: p - half,
         lambda act, p, v: act.x1(1, 0, act.y(1, p, v))),
        ("y+(p) on 2L1 x v(p)", L11, lambda p: p, L00, lambda p: p - 1,
         lambda act, p, v: act.y(1, p, v)),
    ]
    for rid, lsrc, psrc, ldst, pdst, op in cases:
        with rep.relation(f"linking {rid}", {"p": [-pmax, pmax]}) as e:
            scalars = {}
            for p in range(-pmax, pmax + 1):
                act = space_for(lsrc, psrc(p))
                if act is None:
                    continue
                src = vec(psrc(p))
                s = next(iter(src))
                if act.V.degree(s) > act.V.depth:
                    continue
                try:
                    out = op(act, p, src)
                except TruncationOverflow:
                    e.skipped += 1
                    continue
                target = vec(pdst(p))
                c = proportional(out, target)
                ok = c is not None and bool(c)
                e.check_value(s, {"p": p}, ok, {"image": out} if not ok else None)
                if ok:
                    scalars[str(p)] = c
            e.extra["scalars"] = scalars
    return rep


# -- characters -----------------------------------------------------------------

_HW_LABELS = {0: (1, 0, 0), 1: (0, 1, 0), 2: (0, 0, 1)}


def character(j: int, depth: int, action: Sp4Action | None = None) -> CharTable:
    """Multiplicities of joint (K1, K2, q^d) eigenspaces, read off from the action."""
    act = action or Sp4Action(BigSpace(j, depth))
    V = act.V
    mults: dict[tuple[int, ...], int] = {}
    for s in V.basis(depth):
        v = {s: ONE}
        k1 = proportional(act.K1(v), v)
        k2 = proportional(act.K2(v), v)
        dq = proportional(act.qd(v), v)
        if k1 is None or k2 is None or dq is None:
            raise ArithmeticError(f"basis state {s} is not a joint eigenvector")
        h1 = _qexp(k1)
        h2 = _qexp(k2) / 2
        D = -_qexp(dq)
        beta = _beta_from(j, D, h1, h2)
        mults[beta] = mults.get(beta, 0) + 1
    return CharTable(C2_AFFINE.name, _HW_LABELS[j], depth, "delta", mults)


def _beta_from(j: int, D, h1, h2) -> tuple[int, int, int]:
    # h_i(Lambda_j - beta) = delta_ij - sum_k a_{i,k} x_k with x_0 = D
    x0 = Fraction(D)
    d1 = Fraction(int(j == 1))
    d2 = Fraction(int(j == 2))
    # h1 = d1 + 2 x0 - 2 x1 + 2 x2 ; h2 = d2 + x1 - 2 x2
    x1_minus_x2 = (d1 + 2 * x0 - Fraction(h1)) / 2
    x1_minus_2x2 = Fraction(h2) - d2
    x2 = x1_minus_x2 - x1_minus_2x2
    x1 = x1_minus_x2 + x2
    beta = (x0, x1, x2)
    if any(b.denominator != 1 for b in beta):
        raise ArithmeticError(f"non-integral root coordinates {beta}")
    return tuple(int(b) for b in beta)


def compare_character(j: int, depth: int, action: Sp4Action | None = None) -> dict:
    ours = character(j, depth, action)
    oracle = freudenthal(C2_AFFINE, _HW_LABELS[j], depth)
    return compare(ours, oracle)
