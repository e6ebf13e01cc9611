"""Bosonized intertwiner components acting on truncated level-l modules.

``Phi_0(z)`` and ``Psi_l(z)`` are applied mode by mode from their vertex
operator specs (see :mod:`qaffine.fockvo`): the zero mode ``(c z)^{s h_1}``
acts first, then ``D^{+-1}``, the annihilating exponential and the creating
exponential.  ``Phi_j`` (j >= 1) and ``Psi_j`` (j < l) come from the
``f_1`` and ``e_1`` recursions.  A mode ``m`` of a component means the
coefficient of ``z^m``; on ``V(lam)`` the exponents lie in ``lam(h_1)/2 + Z``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .fockvo import VertexOpSpec, phi0_spec, psi_spec
from .linalg import axpy, proportional, vec_scale
from .qfield import ONE, ZERO, Scalar, qint, qpow, spow
from .report import RelationReport, pick_states
from .sl2mod import AffineWeightA1, ModuleFamily, TruncationOverflow

__all__ = [
    "IntertwinerComponent",
    "Intertwiners",
    "phi0_apply",
    "psi_ell_apply",
    "component_recursion",
    "verify_intertwining",
    "verify_drinfeld_commutation",
    "verify_exchange",
    "verify_qd_conjugation",
    "verify_nested_commutator",
]


class IntertwinerComponent:
    """Callable ``(lam, m, vec) -> vec`` for one component of one type."""

    def __init__(self, host: "Intertwiners", kind: str, j: int):
        if kind not in ("I", "II"):
            raise ValueError("kind must be 'I' or 'II'")
        if not 0 <= j <= host.level:
            raise ValueError(f"component index {j} out of range 0..{host.level}")
        self.host = host
        self.kind = kind
        self.j = j

    def __call__(self, lam, m, vec: Mapping) -> dict:
        return self.host.component(self.kind, lam, self.j, m, vec)

    def mode_offset(self, lam) -> Fraction:
        """Exponents of z on V(lam) lie in this offset + Z."""
        lam = self.host.fam.module(lam).lam
        return Fraction(lam.m1, 2) % 1

    def __repr__(self) -> str:
        name = "Phi" if self.kind == "I" else "Psi"
        return f"{name}_{self.j}^({self.host.level})"


class Intertwiners:
    """Intertwiner components for all level-l modules of one family."""

    def __init__(self, family: ModuleFamily):
        self.fam = family
        self.level = family.level
        self.phi_spec = phi0_spec(self.level)
        self.psi_spec = psi_spec(self.level)
        self._memo: dict = {}
        self._exp_memo: dict = {}

    @classmethod
    def build(cls, level: int, depth: int) -> "Intertwiners":
        return cls(ModuleFamily(level, depth))

    def module(self, lam):
        return self.fam.module(lam)

    def target(self, lam):
        return self.fam.module(self.fam.module(lam).lam.flip())

    # -- generic vertex operator on a module --------------------------------
    def _exp_terms(self, spec: VertexOpSpec, sign: int, lam: AffineWeightA1, key, n: int) -> dict:
        """Degree-n part of exp(sum c(k) a(sign k) z^{sign k}) on a basis state.

        Uses n E_n = sum_k k c(k) a(sign k) E_{n-k}.
        """
        mk = (spec.name, spec.scale_exp, sign, lam, key, n)
        r = self._exp_memo.get(mk)
        if r is not None:
            return r
        if n == 0:
            r = {key: ONE}
        else:
            mod = self.fam.module(lam)
            dm = mod.drinfeld
            cminus, cplus = spec.coeffs(f"a{self.level}")
            coef = cplus if sign > 0 else cminus
            r = {}
            for k in range(1, n + 1):
                c = coef(k)
                if not c:
                    continue
                prev = self._exp_terms(spec, sign, lam, key, n - k)
                if prev:
                    axpy(r, c * k / n, dm.a(sign * k, prev))
        self._exp_memo[mk] = r
        return r

    def _exp_apply(self, spec, sign, lam, vec: Mapping, n: int) -> dict:
        out: dict = {}
        for key, c in vec.items():
            axpy(out, c, self._exp_terms(spec, sign, lam, key, n))
        return out

    def apply_spec(self, spec: VertexOpSpec, lam, m, vec: Mapping) -> dict:
        """Coefficient of z^m in spec(z) vec for vec in V(lam), spec carrying D^{+-1}."""
        src = self.fam.module(lam)
        dst = self.fam.module(src.lam.flip())
        m = Fraction(m)
        out: dict = {}
        for key, c in vec.items():
            x, y, _ = key
            h = src.h_value(1, x, y)
            zpow = spec.slope * h
            need = m - zpow
            if need.denominator != 1:
                continue
            need = int(need)
            pref = c * qpow(spec.scale_exp * zpow)
            one = {key: ONE}
            w = self.fam.dhat(src.lam, one) if spec.dhat > 0 else self.fam.dhat_inverse(src.lam, one)
            if not w:
                continue
            top = max(dst.state_degree(k) for k in w)
            for A in range(0, top + 1):
                C = A + need
                if C < 0:
                    continue
                u = self._exp_apply(spec, +1, dst.lam, w, A)
                if not u:
                    continue
                axpy(out, pref, self._exp_apply(spec, -1, dst.lam, u, C))
        return out

    # -- components -----------------------------------------------------------
    def phi0(self, lam, m, vec: Mapping) -> dict:
        return self.apply_spec(self.phi_spec, lam, m, vec)

    def psi(self, lam, m, vec: Mapping) -> dict:
        return self.apply_spec(self.psi_spec, lam, m, vec)

    def component(self, kind: str, lam, j: int, m, vec: Mapping) -> dict:
        l = self.level
        if not 0 <= j <= l:
            raise ValueError(f"component index {j} out of range 0..{l}")
        src = self.fam.module(lam)
        out: dict = {}
        for key, c in vec.items():
            axpy(out, c, self._component_basis(kind, src.lam, j, Fraction(m), key))
        return out

    def _component_basis(self, kind: str, lam, j: int, m: Fraction, key) -> dict:
        mk = (kind, lam, j, m, key)
        r = self._memo.get(mk)
        if r is not None:
            return r
        l = self.level
        src = self.fam.module(lam)
        dst = self.target(lam)
        one = {key: ONE}
        if kind == "I":
            if j == 0:
                r = self.phi0(lam, m, one)
            else:
                # [j] Phi_j = f_1 Phi_{j-1} - q^{2(j-1)-l} Phi_{j-1} f_1
                prev = self.component("I", lam, j - 1, m, one)
                r = dst.f(1, prev)
                axpy(r, -qpow(2 * (j - 1) - l), self.component("I", lam, j - 1, m, src.f(1, one)))
                r = vec_scale(qint(j).inv(), r)
        else:
            if j == l:
                r = self.psi(lam, m, one)
            else:
                # [l-j] Psi_j = e_1 Psi_{j+1} - q^{l-2(j+1)} Psi_{j+1} e_1
                prev = self.component("II", lam, j + 1, m, one)
                r = dst.e(1, prev)
                axpy(r, -qpow(l - 2 * (j + 1)), self.component("II", lam, j + 1, m, src.e(1, one)))
                r = vec_scale(qint(l - j).inv(), r)
        self._memo[mk] = r
        return r

    def get(self, kind: str, j: int) -> IntertwinerComponent:
        return IntertwinerComponent(self, kind, j)


# -- module-level convenience ------------------------------------------------

_HOSTS: dict = {}


def _host(level: int, depth: int) -> Intertwiners:
    h = _HOSTS.get((level, depth))
    if h is None:
        h = Intertwiners.build(level, depth)
        _HOSTS[level, depth] = h
    return h


def phi0_apply(level: int, lam, m, vec: Mapping, depth: int = 5) -> dict:
    return _host(level, depth).phi0(lam, m, vec)


def psi_ell_apply(level: int, lam, m, vec: Mapping, depth: int = 5) -> dict:
    return _host(level, depth).psi(lam, m, vec)


def component_recursion(kind: str, level: int, j: int, lam, m, vec: Mapping, depth: int = 5) -> dict:
    return _host(level, depth).component(kind, lam, j, m, vec)


# -- verification ----------------------------------------------------------------

def _states(mod, max_degree: int, limit: int | None = None) -> list:
    keys = [k for k in mod.basis(max_degree)]
    return pick_states(keys, limit)


def _modes(offset: Fraction, window: int) -> list[Fraction]:
    return [offset + k for k in range(-window, window + 1)]


def _lin(*terms) -> dict:
    out: dict = {}
    for c, v in terms:
        axpy(out, c, v)
    return out


def verify_intertwining(kind: str, level: int, lam, depth: int, window: int = 2,
                        inter: Intertwiners | None = None, max_states=None, margin: int | None = None) -> RelationReport:
    """Check the six componentwise intertwining equations in modes.

    States range over degree <= depth - margin; modes over ``window`` steps
    around the natural exponent lattice.  Overflowing evaluations are
    skipped and counted.
    """
    it = inter or _host(level, depth)
    l = it.level
    src = it.module(lam)
    dst = it.target(lam)
    lam = src.lam
    margin = window + 1 if margin is None else margin
    states = _states(src, max(depth - margin, 0), max_states)
    off = Fraction(lam.m1, 2) % 1
    modes = _modes(off, window)
    rep = RelationReport(f"intertwiner-{kind}", {"level": l, "lambda": lam.label, "depth": depth,
                                                 "window": window})

    def P(j, m, v):
        if j < 0 or j > l:
            return {}
        return it.component(kind, lam, j, m, v)

    e0 = lambda v, M: M.e(0, v)
    names = ["e1-commutator", "e0-commutator", "f1-commutator", "f0-commutator",
             "t1-conjugation", "t0-conjugation"]
    for idx, name in enumerate(names):
        rid = f"{'type-I' if kind == 'I' else 'type-II'} {name}"
        with rep.relation(rid, window={"modes": window, "max_degree": depth - margin}) as e:
            for key in states:
                v = {key: ONE}
                for m in modes:
                    for j in range(0, l + 1):
                        lhs, rhs = _intertwining_sides(kind, idx, j, l, m, v, P, src, dst)
                        e.check(key, {"j": j, "m": m}, lhs, rhs)
    return rep


def _intertwining_sides(kind, idx, j, l, m, v, P, src, dst):
    """Return (lhs, rhs) thunks for equation ``idx`` of the given type."""
    qi = qint
    if kind == "I":
        if idx == 0:
            return (lambda: vec_scale(qi(l - j + 1), P(j - 1, m, src.t(1, v))),
                    lambda: _lin((ONE, dst.e(1, P(j, m, v))), (-ONE, P(j, m, src.e(1, v)))))
        if idx == 1:
            return (lambda: vec_scale(qi(j + 1), P(j + 1, m - 1, src.t(0, v))),
                    lambda: _lin((ONE, dst.e(0, P(j, m, v))), (-ONE, P(j, m, src.e(0, v)))))
        if idx == 2:
            return (lambda: vec_scale(qi(j + 1), P(j + 1, m, v)),
                    lambda: _lin((ONE, dst.f(1, P(j, m, v))), (-qpow(2 * j - l), P(j, m, src.f(1, v)))))
        if idx == 3:
            return (lambda: vec_scale(qi(l - j + 1), P(j - 1, m + 1, v)),
                    lambda: _lin((ONE, dst.f(0, P(j, m, v))), (-qpow(l - 2 * j), P(j, m, src.f(0, v)))))
        if idx == 4:
            return (lambda: dst.t(1, P(j, m, src.t(1, v, -1))),
                    lambda: vec_scale(qpow(l - 2 * j), P(j, m, v)))
        return (lambda: dst.t(0, P(j, m, src.t(0, v, -1))),
                lambda: vec_scale(qpow(2 * j - l), P(j, m, v)))
    if idx == 0:
        return (lambda: vec_scale(qi(l - j + 1), P(j - 1, m, v)),
                lambda: _lin((ONE, dst.e(1, P(j, m, v))), (-qpow(l - 2 * j), P(j, m, src.e(1, v)))))
    if idx == 1:
        return (lambda: vec_scale(qi(j + 1), P(j + 1, m - 1, v)),
                lambda: _lin((ONE, dst.e(0, P(j, m, v))), (-qpow(2 * j - l), P(j, m, src.e(0, v)))))
    if idx == 2:
        return (lambda: vec_scale(qi(j + 1), P(j + 1, m, src.t(1, v, -1))),
                lambda: _lin((ONE, dst.f(1, P(j, m, v))), (-ONE, P(j, m, src.f(1, v)))))
    if idx == 3:
        return (lambda: vec_scale(qi(l - j + 1), P(j - 1, m + 1, src.t(0, v, -1))),
                lambda: _lin((ONE, dst.f(0, P(j, m, v))), (-ONE, P(j, m, src.f(0, v)))))
    if idx == 4:
        return (lambda: dst.t(1, P(j, m, src.t(1, v, -1))),
                lambda: vec_scale(qpow(l - 2 * j), P(j, m, v)))
    return (lambda: dst.t(0, P(j, m, src.t(0, v, -1))),
            lambda: vec_scale(qpow(2 * j - l), P(j, m, v)))


def verify_drinfeld_commutation(kind: str, level: int, lam, depth: int, window: int = 2, kmax: int = 2,
                  inter: Intertwiners | None = None, max_states=None) -> RelationReport:
    """K-conjugation, commutation with X^+ (type I) or X^- (type II), a-brackets."""
    it = inter or _host(level, depth)
    l = it.level
    src = it.module(lam)
    dst = it.target(lam)
    lam = src.lam
    sd, dd = src.drinfeld, dst.drinfeld
    margin = window + kmax + 1
    states = _states(src, max(depth - margin, 0), max_states)
    off = Fraction(lam.m1, 2) % 1
    modes = _modes(off, window)
    op = it.phi0 if kind == "I" else it.psi
    V = lambda m, v: op(lam, m, v)
    tag = "type-I" if kind == "I" else "type-II"
    rep = RelationReport(f"prop-{tag}", {"level": l, "lambda": lam.label, "depth": depth,
                                         "window": window, "kmax": kmax})
    gamma_pow = l if kind == "I" else -l
    with rep.relation(f"{tag} K-conjugation", window) as e:
        for key in states:
            v = {key: ONE}
            for m in modes:
                e.check(key, {"m": m}, lambda: dd.K(V(m, sd.K(v, -1))),
                        lambda: vec_scale(qpow(gamma_pow), V(m, v)))
    xname = "xp" if kind == "I" else "xm"
    with rep.relation(f"{tag} commutes with X{'+' if kind == 'I' else '-'}", window) as e:
        for key in states:
            v = {key: ONE}
            for m in modes:
                for k in range(-kmax, kmax + 1):
                    e.check(key, {"m": m, "k": k},
                            lambda: dd.apply(xname, k, V(m, v)),
                            lambda: V(m, sd.apply(xname, k, v)))
    gh = spow(l)
    with rep.relation(f"{tag} a-bracket", window) as e:
        for key in states:
            v = {key: ONE}
            for m in modes:
                for k in range(1, kmax + 1):
                    for s in (1, -1):
                        if kind == "I":
                            c = gh ** k * qint(k * l) / k
                        else:
                            c = -(gh.inv() ** k) * qint(k * l) * qpow(2 * s * k) / k
                        # [a(sk), V(z)] = c z^{sk} V(z): coefficient of z^m uses V[m - sk]
                        e.check(key, {"m": m, "k": s * k},
                                lambda: _lin((ONE, dd.a(s * k, V(m, v))), (-ONE, V(m, sd.a(s * k, v)))),
                                lambda: vec_scale(c, V(m - s * k, v)))
    return rep


def verify_exchange(level: int, lam, depth: int, window: int = 2,
                    inter: Intertwiners | None = None, max_states=None) -> RelationReport:
    """(z - gamma w) Phi_0(z) X^-(w) = -(w - gamma z) X^-(w) Phi_0(z) in modes."""
    it = inter or _host(level, depth)
    src = it.module(lam)
    dst = it.target(lam)
    lam = src.lam
    sd, dd = src.drinfeld, dst.drinfeld
    g = qpow(it.level)
    states = _states(src, max(depth - window - 2, 0), max_states)
    modes = _modes(Fraction(lam.m1, 2) % 1, window)
    rep = RelationReport("exchange", {"level": it.level, "lambda": lam.label, "depth": depth})
    with rep.relation("Phi0 X- exchange", window) as e:
        for key in states:
            v = {key: ONE}
            for m in modes:
                for n in range(-window, window):
                    # coefficient of z^m w^{-n-1}
                    e.check(key, {"m": m, "n": n},
                            lambda: _lin((ONE, it.phi0(lam, m - 1, sd.xm(n, v))),
                                         (-g, it.phi0(lam, m, sd.xm(n + 1, v)))),
                            lambda: _lin((-ONE, dd.xm(n + 1, it.phi0(lam, m, v))),
                                         (g, dd.xm(n, it.phi0(lam, m - 1, v)))))
    return rep


def verify_qd_conjugation(kind: str, level: int, lam, depth: int, window: int = 2,
                          inter: Intertwiners | None = None, max_states=None) -> RelationReport:
    """q^d V(z) q^{-d} = c V(q^{-1} z): one constant c per (type, lambda), recorded."""
    it = inter or _host(level, depth)
    src = it.module(lam)
    dst = it.target(lam)
    lam = src.lam
    states = _states(src, max(depth - window - 1, 0), max_states)
    modes = _modes(Fraction(lam.m1, 2) % 1, window)
    op = it.phi0 if kind == "I" else it.psi
    tag = "type-I" if kind == "I" else "type-II"
    rep = RelationReport(f"qd-{tag}", {"level": it.level, "lambda": lam.label, "depth": depth})
    with rep.relation(f"{tag} q^d conjugation", window) as e:
        const = None
        for key in states:
            v = {key: ONE}
            for m in modes:
                try:
                    lhs = dst.qd(op(lam, m, src.qd(v, -1)))
                    rhs = vec_scale(qpow(-m), op(lam, m, v))
                except TruncationOverflow:
                    e.skipped += 1
                    continue
                if not lhs and not rhs:
                    continue
                c = proportional(lhs, rhs)
                if c is None or (const is not None and c != const):
                    e.check_value(key, {"m": m}, False, {"ratio": c, "expected": const})
                    continue
                const = c
                e.check_value(key, {"m": m}, True)
        e.extra["constant"] = const
        if kind == "I" and it.level == 2:
            e.extra["expected_constant"] = qpow(Fraction(lam.m0, 2) - 1)
    return rep


def verify_nested_commutator(lam, depth: int, window: int = 3, inter: Intertwiners | None = None) -> RelationReport:
    """[x^-(0), [Phi_0(z), x^-(1)]_{q^-2}]_1 v_lam against the closed form, level 2."""
    it = inter or _host(2, depth)
    src = it.module(lam)
    dst = it.target(lam)
    lam = src.lam
    sd, dd = src.drinfeld, dst.drinfeld
    v = src.highest()
    h = lam.m1
    spec = it.phi_spec
    rep = RelationReport("nested-commutator", {"lambda": lam.label, "depth": depth, "window": window})
    qm2 = qpow(-2)
    with rep.relation("nested q-commutator on highest vector", window) as e:
        for m in _modes(Fraction(h, 2) % 1, window):
            def lhs(m=m):
                # B = Phi x^-(1) - q^-2 x^-(1) Phi, then [x^-(0), B]
                def B(u):
                    return _lin((ONE, it.phi0(lam, m, sd.xm(1, u))), (-qm2, dd.xm(1, it.phi0(lam, m, u))))
                return _lin((ONE, dd.xm(0, B(v))), (-ONE, B(sd.xm(0, v))))

            def rhs(m=m):
                need = m + 1 - Fraction(h, 2)
                if need.denominator != 1 or need < 0:
                    return {}
                u = it._exp_apply(spec, -1, lam, v, int(need))
                return vec_scale(-qm2, it.fam.dhat(lam, src.f(1, src.f(1, u))))
            e.check("v_lambda", {"m": m}, lhs, rhs)
    return rep
