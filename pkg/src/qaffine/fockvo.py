"""Deformed Heisenberg Fock spaces and normally ordered vertex operators.

An oscillator algebra has modes beta(k), k != 0, with
``[beta(k), beta(-l)] = delta_{kl} kappa(k)``.  Fock states are monomials
``prod beta(-k)^{m_k} v(p)`` keyed by ``(parts, p)``, ``parts`` a partition
(descending tuple) and ``p`` the charge (a Fraction).

A :class:`VertexOpSpec` describes

    exp(sum_k cminus(k) beta(-k) z^k) exp(sum_k cplus(k) beta(k) z^-k)
        * D^n * (c z)^{slope H} * (shift of H by r)

where ``H`` is a charge operator, ``D`` an opaque operator (D-hat) and the
charge shift comes from ``T^r`` or from ``D``.  Contractions are the scalar
series relating ``A(z) B(w)`` to ``:A(z) B(w):``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct
from math import factorial
from typing import Callable, Iterable, Mapping, Sequence

from .linalg import axpy
from .qfield import ONE, Q, ZERO, Scalar, as_scalar, qint, qpow

__all__ = [
    "OscillatorAlgebra",
    "a_oscillators",
    "B_OSCILLATORS",
    "VertexOpSpec",
    "Series",
    "Contraction",
    "QProduct",
    "fock_vacuum",
    "fock_states",
    "annihilate",
    "create",
    "apply_mode",
    "apply_normal_ordered_pair",
    "contraction",
    "contraction_multi",
    "qproduct_expand",
    "qproduct_log",
    "series_exp",
    "rational_series",
    "named_spec",
    "SPEC_NAMES",
]


# -- oscillator algebras ------------------------------------------------------

@dataclass(frozen=True)
class OscillatorAlgebra:
    name: str
    kernel: Callable[[int], Scalar]
    has_zero_mode: bool = True

    def kappa(self, k: int) -> Scalar:
        return _kappa_cached(self.name, self.kernel, k)


@lru_cache(maxsize=None)
def _kappa_cached(name, kernel, k):
    return kernel(k)


def _a_kernel_factory(level: int):
    def kern(k: int) -> Scalar:
        return qint(2 * k) * qint(level * k) / k
    return kern


_A_CACHE: dict[int, OscillatorAlgebra] = {}


def a_oscillators(level: int) -> OscillatorAlgebra:
    """a(k) of U_q(sl2-hat) at level l: kappa(k) = [2k][lk]/k."""
    alg = _A_CACHE.get(level)
    if alg is None:
        alg = OscillatorAlgebra(f"a{level}", _a_kernel_factory(level))
        _A_CACHE[level] = alg
    return alg


def _b_kernel(k: int) -> Scalar:
    return (qpow(2 * k) - ONE + qpow(-2 * k)) / k


B_OSCILLATORS = OscillatorAlgebra("b", _b_kernel)


# -- Fock space -----------------------------------------------------------------

def fock_vacuum(p) -> dict:
    return {((), Fraction(p)): ONE}


def _partitions(n: int, maxpart: int | None = None):
    if maxpart is None:
        maxpart = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, maxpart), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def fock_states(degree: int) -> list[tuple[int, ...]]:
    """Partitions of ``degree`` in the fixed basis order (lexicographic, descending parts)."""
    return sorted(_partitions(degree), reverse=True)


def _mults(parts: tuple[int, ...]) -> dict[int, int]:
    m: dict[int, int] = {}
    for k in parts:
        m[k] = m.get(k, 0) + 1
    return m


def _from_mults(m: Mapping[int, int]) -> tuple[int, ...]:
    out = []
    for k in sorted(m, reverse=True):
        out.extend([k] * m[k])
    return tuple(out)


def annihilate(alg: OscillatorAlgebra, k: int, vec: Mapping) -> dict:
    """beta(k), k > 0."""
    out: dict = {}
    for (parts, p), c in vec.items():
        m = _mults(parts)
        n = m.get(k, 0)
        if not n:
            continue
        m[k] = n - 1
        if not m[k]:
            del m[k]
        axpy(out, c * alg.kappa(k) * n, {(_from_mults(m), p): ONE})
    return out


def create(k: int, vec: Mapping) -> dict:
    """beta(-k), k > 0."""
    out: dict = {}
    for (parts, p), c in vec.items():
        axpy(out, c, {(tuple(sorted(parts + (k,), reverse=True)), p): ONE})
    return out


def fock_degree(key) -> int:
    return sum(key[0])


# -- specs --------------------------------------------------------------------

Coeff = Callable[[int], Scalar]


def _zero(k: int) -> Scalar:
    return ZERO


@dataclass(frozen=True)
class VertexOpSpec:
    """Symbolic normally ordered vertex operator (see module docstring).

    ``osc`` maps an oscillator-algebra name to ``(cminus, cplus)``.
    ``charge`` names the graded operator H (``"h1"`` or ``"b0"``) carrying
    the factor ``(q^{scale_exp} z)^{slope H}``; ``shift`` is the change of H
    caused by the operator; ``dhat`` is the power of the opaque D operator;
    ``dhat_char`` is ``d`` in ``D^n V(w) = (-w^d)^n V(w) D^n`` (zero when
    the operator contains D itself).
    """

    name: str
    osc: tuple[tuple[str, Coeff, Coeff], ...]
    charge: str | None = None
    slope: Fraction = Fraction(0)
    scale_exp: Fraction = Fraction(0)
    shift: Fraction = Fraction(0)
    dhat: int = 0
    dhat_char: int = 0
    prefix: str = "identity"

    def coeffs(self, alg: str) -> tuple[Coeff, Coeff]:
        for name, cm, cp in self.osc:
            if name == alg:
                return cm, cp
        return _zero, _zero

    def algebras(self) -> list[str]:
        return [name for name, _, _ in self.osc]


# -- truncated series -------------------------------------------------------------

class Series:
    """Truncated power series sum_{n<=order} c_n x^n with Scalar coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Scalar]):
        self.coeffs = [as_scalar(c) for c in coeffs]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def one(cls, order: int) -> "Series":
        return cls([ONE] + [ZERO] * order)

    def __mul__(self, other: "Series") -> "Series":
        n = min(self.order, other.order)
        out = [ZERO] * (n + 1)
        for i in range(n + 1):
            a = self.coeffs[i]
            if not a:
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] = out[i + j] + a * b
        return Series(out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        n = min(self.order, other.order)
        return self.coeffs[: n + 1] == other.coeffs[: n + 1]

    def first_difference(self, other: "Series") -> int | None:
        n = min(self.order, other.order)
        for i in range(n + 1):
            if self.coeffs[i] != other.coeffs[i]:
                return i
        return None

    def __repr__(self) -> str:
        return "Series(" + ", ".join(str(c) for c in self.coeffs) + ")"


def series_exp(log_coeffs: Sequence[Scalar], order: int) -> Series:
    """exp(sum_{k>=1} L_k x^k) to the given order (L_0 ignored)."""
    L = list(log_coeffs) + [ZERO] * (order + 1)
    P = [ONE] + [ZERO] * order
    for n in range(1, order + 1):
        acc = ZERO
        for k in range(1, n + 1):
            if L[k]:
                acc = acc + L[k] * P[n - k] * k
        P[n] = acc / n
    return Series(P)


def rational_series(num: Iterable[Scalar], den: Iterable[Scalar], order: int) -> Series:
    """prod (1 - a x) / prod (1 - b x) expanded to the given order."""
    out = Series.one(order)
    for a in num:
        out = out * Series([ONE, -as_scalar(a)] + [ZERO] * (order - 1))
    for b in den:
        b = as_scalar(b)
        out = out * Series([b ** n for n in range(order + 1)])
    return out


# -- q-products -----------------------------------------------------------------

@dataclass(frozen=True)
class QProduct:
    """(c z; p) = prod_{k>=0} (1 - c z p^k)."""

    c: Scalar
    p: Scalar


def _pp(p: Scalar, n: int) -> Scalar:
    out = ONE
    for i in range(1, n + 1):
        out = out * (ONE - p ** i)
    return out


def qproduct_expand(num: Sequence[QProduct] | QProduct, den: Sequence[QProduct] = (),
                    order: int = 12) -> Series:
    """Expand prod(num)/prod(den) as a series in z via Euler's identities."""
    if isinstance(num, QProduct):
        num = [num]
    out = Series.one(order)
    for P in num:
        if not P.c:
            continue
        coeffs = []
        for n in range(order + 1):
            sgn = -1 if n % 2 else 1
            coeffs.append(P.p ** (n * (n - 1) // 2) * P.c ** n * sgn / _pp(P.p, n))
        out = out * Series(coeffs)
    for P in den:
        if not P.c:
            continue
        out = out * Series([P.c ** n / _pp(P.p, n) for n in range(order + 1)])
    return out


def qproduct_log(num: Sequence[QProduct], den: Sequence[QProduct] = (), order: int = 12) -> Series:
    """log of prod(num)/prod(den): coefficient of z^k is -sum c^k/(k(1-p^k)) (num) + (den)."""
    coeffs = [ZERO]
    for k in range(1, order + 1):
        acc = ZERO
        for P in num:
            acc = acc - P.c ** k / ((ONE - P.p ** k) * k)
        for P in den:
            acc = acc + P.c ** k / ((ONE - P.p ** k) * k)
        coeffs.append(acc)
    return Series(coeffs)


# -- contractions ------------------------------------------------------------------

@dataclass
class Contraction:
    """const * z^z_exp * w^w_exp * series(w/z)."""

    series: Series
    z_exp: Fraction = Fraction(0)
    w_exp: Fraction = Fraction(0)
    const: Scalar = ONE

    def same_as(self, other: "Contraction") -> bool:
        return (self.z_exp == other.z_exp and self.w_exp == other.w_exp
                and self.const == other.const and self.series == other.series)


def _kernels(level: int) -> dict[str, OscillatorAlgebra]:
    return {a_oscillators(level).name: a_oscillators(level), "b": B_OSCILLATORS}


def contraction(A: VertexOpSpec, B: VertexOpSpec, order: int,
                algebras: Mapping[str, OscillatorAlgebra] | None = None) -> Contraction:
    """Scalar relating A(z) B(w) to :A(z) B(w):."""
    algs = dict(algebras or {})
    logc = [ZERO] * (order + 1)
    for name in set(A.algebras()) & set(B.algebras()):
        alg = algs.get(name) or _algebra_by_name(name)
        _, cplusA = A.coeffs(name)
        cminusB, _ = B.coeffs(name)
        for k in range(1, order + 1):
            x = cplusA(k)
            if x:
                y = cminusB(k)
                if y:
                    logc[k] = logc[k] + alg.kappa(k) * x * y
    ser = series_exp(logc, order)
    z_exp = Fraction(0)
    const = ONE
    if A.charge is not None and A.charge == B.charge and A.slope and B.shift:
        e = A.slope * B.shift
        z_exp += e
        const = const * qpow(A.scale_exp * e)
    w_exp = Fraction(0)
    if A.dhat and B.dhat_char:
        w_exp += B.dhat_char * A.dhat
        if A.dhat % 2:
            const = -const
    return Contraction(ser, z_exp, w_exp, const)


def contraction_multi(specs: Sequence[VertexOpSpec], order: int,
                      algebras: Mapping[str, OscillatorAlgebra] | None = None) -> dict:
    """Pairwise contractions of an ordered product, keyed by (i, j) with i < j.

    The total prefactor is the product over pairs, the (i, j) factor being a
    series in z_j / z_i times z_i^{z_exp} z_j^{w_exp}.
    """
    out = {}
    for i in range(len(specs)):
        for j in range(i + 1, len(specs)):
            out[i, j] = contraction(specs[i], specs[j], order, algebras)
    return out


def _algebra_by_name(name: str) -> OscillatorAlgebra:
    if name == "b":
        return B_OSCILLATORS
    if name.startswith("a"):
        return a_oscillators(int(name[1:]))
    raise KeyError(name)


# -- mode application on a single-boson Fock space ---------------------------------

def _annih_terms(alg, cplus: Coeff, parts: tuple[int, ...]):
    """exp(sum cplus(k) beta(k) z^-k) on a monomial: yield (A, parts', coeff)."""
    m = _mults(parts)
    ks = sorted(m)
    choices = [range(m[k] + 1) for k in ks]
    for ns in iproduct(*choices):
        coef = ONE
        deg = 0
        newm = {}
        ok = True
        for k, n in zip(ks, ns):
            if n:
                c = cplus(k)
                if not c:
                    ok = False
                    break
                coef = coef * _binom(m[k], n) * (c * alg.kappa(k)) ** n
                deg += k * n
            if m[k] - n:
                newm[k] = m[k] - n
        if ok:
            yield deg, _from_mults(newm), coef


def _binom(n: int, k: int) -> int:
    return factorial(n) // (factorial(k) * factorial(n - k))


def _create_terms(cminus: Coeff, C: int):
    """Degree-C part of exp(sum cminus(k) beta(-k) z^k): yield (parts, coeff)."""
    for lam in _partitions(C):
        m = _mults(lam)
        coef = ONE
        for k, n in m.items():
            c = cminus(k)
            if not c:
                coef = ZERO
                break
            coef = coef * c ** n / factorial(n)
        if coef:
            yield lam, coef


def apply_mode(spec: VertexOpSpec, m, vec: Mapping, cap: int,
               alg: OscillatorAlgebra | None = None) -> dict:
    """Coefficient of z^m in spec(z) vec, on a single-boson Fock space.

    The charge H is the Fock charge p; D is modeled as a charge shift (opaque
    otherwise), so ``shift`` moves p.  States of oscillator degree above
    ``cap`` raise OverflowError.
    """
    m = Fraction(m)
    names = spec.algebras()
    if len(names) > 1:
        raise ValueError("apply_mode acts on one oscillator algebra at a time")
    name = names[0] if names else "b"
    alg = alg or _algebra_by_name(name)
    cminus, cplus = spec.coeffs(name)
    out: dict = {}
    for (parts, p), c in vec.items():
        zpow = spec.slope * p if spec.charge else Fraction(0)
        pref = qpow(spec.scale_exp * zpow) if spec.charge else ONE
        p_new = p + spec.shift
        d0 = sum(parts)
        need = m - zpow  # = C - A
        if need.denominator != 1:
            continue
        need = int(need)
        for A, rest, ca in _annih_terms(alg, cplus, parts):
            C = A + need
            if C < 0:
                continue
            if d0 - A + C > cap:
                raise OverflowError(f"Fock degree {d0 - A + C} beyond cap {cap}")
            for lam, cc in _create_terms(cminus, C):
                key = (tuple(sorted(rest + lam, reverse=True)), p_new)
                axpy(out, c * pref * ca * cc, {key: ONE})
    return out


def apply_normal_ordered_pair(A: VertexOpSpec, B: VertexOpSpec, mz, mw, vec: Mapping,
                              cap: int, alg: OscillatorAlgebra | None = None) -> dict:
    """Coefficient of z^mz w^mw in :A(z) B(w): vec (single-boson model)."""
    mz, mw = Fraction(mz), Fraction(mw)
    name = (A.algebras() or B.algebras() or ["b"])[0]
    alg = alg or _algebra_by_name(name)
    cmA, cpA = A.coeffs(name)
    cmB, cpB = B.coeffs(name)
    out: dict = {}
    for (parts, p), c in vec.items():
        # zero modes act on the input charge: (cA z)^{sA p} (cB w)^{sB p}
        zz = A.slope * p if A.charge else Fraction(0)
        ww = B.slope * p if B.charge else Fraction(0)
        pref = ONE
        if A.charge:
            pref = pref * qpow(A.scale_exp * zz)
        if B.charge:
            pref = pref * qpow(B.scale_exp * ww)
        p_new = p + A.shift + B.shift
        needz, needw = mz - zz, mw - ww
        if needz.denominator != 1 or needw.denominator != 1:
            continue
        needz, needw = int(needz), int(needw)
        d0 = sum(parts)
        # annihilators: exp(sum (cpA z^-k + cpB w^-k) beta(k))
        for ann in _annih_two(alg, cpA, cpB, parts):
            Az, Aw, rest, ca = ann
            Cz, Cw = Az + needz, Aw + needw
            if Cz < 0 or Cw < 0:
                continue
            if d0 - Az - Aw + Cz + Cw > cap:
                raise OverflowError("Fock degree beyond cap")
            for lz, cz in _create_terms(cmA, Cz):
                for lw, cw in _create_terms(cmB, Cw):
                    key = (tuple(sorted(rest + lz + lw, reverse=True)), p_new)
                    axpy(out, c * pref * ca * cz * cw, {key: ONE})
    return out


def _annih_two(alg, cpA: Coeff, cpB: Coeff, parts):
    m = _mults(parts)
    ks = sorted(m)
    choices = []
    for k in ks:
        choices.append([(a, b) for a in range(m[k] + 1) for b in range(m[k] + 1 - a)])
    for sel in iproduct(*choices):
        coef = ONE
        Az = Aw = 0
        newm = {}
        for k, (a, b) in zip(ks, sel):
            n = a + b
            if n:
                ca, cb = cpA(k), cpB(k)
                if (a and not ca) or (b and not cb):
                    coef = ZERO
                    break
                # beta(k)^n / n! picks n factors; multinomial split between z and w
                coef = coef * _binom(m[k], n) * _binom(n, a) * alg.kappa(k) ** n
                if a:
                    coef = coef * ca ** a
                if b:
                    coef = coef * cb ** b
                Az += k * a
                Aw += k * b
            if m[k] - n:
                newm[k] = m[k] - n
        if coef:
            yield Az, Aw, _from_mults(newm), coef


# -- named specs ----------------------------------------------------------------------

def _c(fn):
    return lru_cache(maxsize=None)(fn)


def phi0_spec(level: int, arg_exp: Fraction = Fraction(0)) -> VertexOpSpec:
    """Phi_0^{(l)}(q^{arg_exp} z)."""
    g = Fraction(level, 2)  # gamma^{1/2} = q^{l/2}
    cm = _c(lambda k: qpow(g * k + arg_exp * k) / qint(2 * k))
    cp = _c(lambda k: -qpow(g * k - arg_exp * k) / qint(2 * k))
    return VertexOpSpec(f"Phi0_l{level}", ((f"a{level}", cm, cp),), charge="h1",
                        slope=Fraction(1, 2), scale_exp=arg_exp, shift=Fraction(level), dhat=1)


def psi_spec(level: int, arg_exp: Fraction = Fraction(0)) -> VertexOpSpec:
    """Psi_l^{(l)}(q^{arg_exp} z); the formula uses the argument q^2 z."""
    g = Fraction(level, 2)
    t = arg_exp + 2
    cm = _c(lambda k: -qpow(-g * k + t * k) / qint(2 * k))
    cp = _c(lambda k: qpow(-g * k - t * k) / qint(2 * k))
    return VertexOpSpec(f"Psi_l{level}", ((f"a{level}", cm, cp),), charge="h1",
                        slope=Fraction(-1, 2), scale_exp=t, shift=Fraction(-level), dhat=-1)


def x_spec(level: int, sign: int) -> VertexOpSpec:
    """X^{+-}(z) seen through its a-commutators, charge shift and D-character."""
    g = Fraction(level, 2)
    cm = _c(lambda k: sign * qpow(-sign * g * k) / qint(level * k))
    cp = _c(lambda k: -sign * qpow(-sign * g * k) / qint(level * k))
    return VertexOpSpec("X+" if sign > 0 else "X-", ((f"a{level}", cm, cp),), charge="h1",
                        slope=Fraction(0), shift=Fraction(2 * sign), dhat_char=-sign)


OMEGA0 = VertexOpSpec(
    "Omega0", (("b", _c(lambda k: qpow(k)), _c(lambda k: -qpow(k))),),
    charge="b0", slope=Fraction(1), shift=Fraction(1))
OMEGA2 = VertexOpSpec(
    "Omega2", (("b", _c(lambda k: -qpow(-k)), _c(lambda k: qpow(-k))),),
    charge="b0", slope=Fraction(-1), shift=Fraction(-1))


def combine(name: str, *parts: VertexOpSpec) -> VertexOpSpec:
    """Tensor product of specs acting on different factors (e.g. Y = Psi (x) Omega)."""
    osc = tuple(o for p in parts for o in p.osc)
    if len({o[0] for o in osc}) != len(osc):
        raise ValueError("factors must use distinct oscillator algebras")
    return _Composite(name, osc, pieces=tuple(parts))


@dataclass(frozen=True)
class _Composite(VertexOpSpec):
    pieces: tuple = field(default=())


def contraction_composite(A: VertexOpSpec, B: VertexOpSpec, order: int) -> Contraction:
    """Contraction for tensor-product specs: product over matching factors."""
    pa = A.pieces if isinstance(A, _Composite) else (A,)
    pb = B.pieces if isinstance(B, _Composite) else (B,)
    total = Contraction(Series.one(order))
    for a in pa:
        for b in pb:
            shared = set(a.algebras()) & set(b.algebras())
            same_charge = a.charge is not None and a.charge == b.charge
            if not shared and not same_charge and not (a.dhat and b.dhat_char):
                continue
            c = contraction(a, b, order)
            total = Contraction(total.series * c.series, total.z_exp + c.z_exp,
                                total.w_exp + c.w_exp, total.const * c.const)
    return total


def y_spec(sign: int) -> VertexOpSpec:
    """Y^+(z) = Psi_2(q^-2 z) (x) Omega_2(z); Y^-(z) = Phi_0(z) (x) Omega_0(z)."""
    if sign > 0:
        return combine("Y+", psi_spec(2, Fraction(-2)), OMEGA2)
    return combine("Y-", phi0_spec(2), OMEGA0)


SPEC_NAMES = ("Phi0_l1", "Phi0_l2", "Phi0_l3", "Psi_l1", "Psi_l2", "Psi_l3",
              "Omega0", "Omega2", "X+", "X-", "Y+", "Y-")


def named_spec(name: str) -> VertexOpSpec:
    if name in ("Omega0", "Omega2"):
        return OMEGA0 if name == "Omega0" else OMEGA2
    if name.startswith("Phi0_l"):
        return phi0_spec(int(name[6:]))
    if name.startswith("Psi_l"):
        return psi_spec(int(name[5:]))
    if name in ("X+", "X-"):
        return x_spec(2, 1 if name == "X+" else -1)
    if name in ("Y+", "Y-"):
        return y_spec(1 if name == "Y+" else -1)
    raise KeyError(f"unknown vertex operator {name!r}")


def modewise_check(A: VertexOpSpec, B: VertexOpSpec, vec: Mapping, mz, mw, cap: int,
                   order: int = 12, sides: bool = False):
    """Residual of A(z)B(w) - contraction * :A(z)B(w): at z^mz w^mw on ``vec``.

    The left side is computed mode by mode with :func:`apply_mode`; the right
    side sums the contraction series against the normal-ordered product.
    Raises ValueError when ``order`` is too small for the sum to be exact.
    With ``sides`` the pair (lhs, rhs) is returned instead of the residual.
    """
    mz, mw = Fraction(mz), Fraction(mw)
    name = (A.algebras() or B.algebras() or ["b"])[0]
    alg = _algebra_by_name(name)
    lhs: dict = {}
    for key, c in vec.items():
        one = {key: c}
        p = key[1]
        # B contributes w^(sB p + C - A) with A <= deg; so mode of B is mw
        inner = apply_mode(B, mw, one, cap, alg)
        axpy(lhs, ONE, apply_mode(A, mz, inner, cap, alg))
    con = contraction(A, B, order)
    rhs: dict = {}
    for key, c in vec.items():
        one = {key: c}
        p = key[1]
        low_w = (B.slope * p if B.charge else 0) - sum(key[0])
        nmax = mw - con.w_exp - low_w
        if nmax.denominator != 1:
            continue
        nmax = int(nmax)
        if nmax > order:
            raise ValueError(f"contraction order {order} too small (need {nmax})")
        for n in range(0, nmax + 1):
            cn = con.series.coeffs[n]
            if not cn:
                continue
            ez = mz - con.z_exp + n
            ew = mw - con.w_exp - n
            no = apply_normal_ordered_pair(A, B, ez, ew, one, cap, alg)
            axpy(rhs, cn * con.const, no)
    if sides:
        return lhs, rhs
    return axpy(lhs, -ONE, rhs)


# -- normal-ordering suite ----------------------------------------------------------

def _product_prefactor(specs: Sequence[VertexOpSpec], order: int) -> dict:
    """Total monomial, constant and pairwise series of an ordered product."""
    mono = [Fraction(0)] * len(specs)
    const = ONE
    pairs = {}
    for i in range(len(specs)):
        for j in range(i + 1, len(specs)):
            c = contraction_composite(specs[i], specs[j], order)
            mono[i] += c.z_exp
            mono[j] += c.w_exp
            const = const * c.const
            pairs[i, j] = c.series
    return {"mono": tuple(mono), "const": const, "pairs": pairs}


def _expect(mono, const, pairs: Mapping, order: int) -> dict:
    """Expected prefactor; ``pairs[(i, j)] = (num, den)`` roots of prod(1-a x)/prod(1-b x), x = z_j/z_i."""
    return {"mono": tuple(Fraction(m) for m in mono), "const": as_scalar(const),
            "pairs": {k: rational_series(n, d, order) for k, (n, d) in pairs.items()}}


def _prefactor_diff(got: dict, want: dict) -> dict | None:
    if got["mono"] != want["mono"]:
        return {"monomial": [str(x) for x in got["mono"]], "expected": [str(x) for x in want["mono"]]}
    if got["const"] != want["const"]:
        return {"constant": str(got["const"]), "expected": str(want["const"])}
    for k in sorted(want["pairs"]):
        s, t = got["pairs"].get(k), want["pairs"][k]
        i = s.first_difference(t)
        if i is not None:
            return {"pair": list(k), "order": i, "got": str(s.coeffs[i]), "expected": str(t.coeffs[i])}
    return None


def _check_prefactor(entry, label, specs, want, order) -> None:
    got = _product_prefactor(specs, order)
    d = _prefactor_diff(got, want)
    entry.check_value(label, [s.name for s in specs], d is None, d)


def verify_normal_ordering(order: int = 12, levels: Sequence[int] = (1, 2, 3)):
    """Prefactors of products of vertex operators against their closed forms."""
    from .report import RelationReport

    rep = RelationReport("normal-ordering", {"order": order, "levels": list(levels)})
    q = qpow
    p4 = qpow(4)

    # general level: (x; q^4) products
    for l in levels:
        P, S = phi0_spec(l), psi_spec(l)
        h = Fraction(l, 2)
        cases = {
            "Phi0 Phi0": (P, P, h, 0, 2, 2 + 2 * l),
            "Phi0 Psi": (P, S, -h, 0, 4 + l, 4 - l),
            "Psi Phi0": (S, P, -h, -l, l, -l),
            "Psi Psi": (S, S, h, l, 2 - 2 * l, 2),
        }
        for name, (A, B, ze, ce, n, d) in cases.items():
            with rep.relation(f"{name} prefactor, general level", list(levels)) as e:
                got = _product_prefactor([A, B], order)
                want_series = qproduct_expand([QProduct(q(n), p4)], [QProduct(q(d), p4)], order)
                want = {"mono": (Fraction(ze), Fraction(0)), "const": q(ce), "pairs": {(0, 1): want_series}}
                dd = _prefactor_diff(got, want)
                e.check_value(f"level {l}", [A.name, B.name], dd is None, dd)
    with rep.relation("log-product identity", list(levels)) as e:
        for l in levels:
            lhs = Series([ZERO] + [-qint(l * k) / (qint(2 * k) * k) for k in range(1, order + 1)])
            rhs = qproduct_log([QProduct(q(2 - l), p4)], [QProduct(q(2 + l), p4)], order)
            i = lhs.first_difference(rhs)
            e.check_value(f"level {l}", (), i is None, None if i is None else {"order": i})

    O0, O2 = OMEGA0, OMEGA2
    omega = {
        "Omega0 Omega0": (O0, O0, 1, [1, q(4)], [q(2)]),
        "Omega0 Omega2": (O0, O2, -1, [1], [q(-2), q(2)]),
        "Omega2 Omega0": (O2, O0, -1, [1], [q(-2), q(2)]),
        "Omega2 Omega2": (O2, O2, 1, [1, q(-4)], [q(-2)]),
    }
    for name, (A, B, ze, num, den) in omega.items():
        with rep.relation(f"{name} prefactor") as e:
            _check_prefactor(e, name, [A, B], _expect((ze, 0), 1, {(0, 1): (num, den)}, order), order)

    Xp, Xm, Yp, Ym = x_spec(2, 1), x_spec(2, -1), y_spec(1), y_spec(-1)
    two = {
        "X+ Y+": (Xp, Yp, (0, 0), 1, [], [q(-2)]),
        "Y+ X+": (Yp, Xp, (-1, 1), -1, [], [q(-2)]),
        "X- Y-": (Xm, Ym, (0, 0), 1, [], [q(2)]),
        "Y- X-": (Ym, Xm, (-1, 1), -1, [], [q(2)]),
        "Y+ Y+": (Yp, Yp, (2, 0), 1, [q(-4), 1], []),
        "Y- Y-": (Ym, Ym, (2, 0), 1, [1, q(4)], []),
        "Y+ Y-": (Yp, Ym, (-2, 0), 1, [], [q(2), q(-2)]),
        "Y- Y+": (Ym, Yp, (-2, 0), 1, [], [q(2), q(-2)]),
    }
    for name, (A, B, mono, c, num, den) in two.items():
        with rep.relation(f"{name} prefactor") as e:
            _check_prefactor(e, name, [A, B], _expect(mono, c, {(0, 1): (num, den)}, order), order)

    # [a(k), Y(z)] and [b(k), Y(z)] read off the oscillator coefficients
    kernels = {"a2": a_oscillators(2), "b": B_OSCILLATORS}
    for alg, label in (("a2", "a-Y bracket"), ("b", "b-Y bracket")):
        with rep.relation(label, order) as e:
            for s, Y in ((1, Yp), (-1, Ym)):
                cm, cp = Y.coeffs(alg)
                for k in range(1, order + 1):
                    kap = kernels[alg].kappa(k)
                    if alg == "a2":
                        want = -s * qint(2 * k) / k * q(-s * k)
                    else:
                        want = -s * (q(2 * k) - 1 + q(-2 * k)) / k * q(-s * k)
                    e.check_value(("Y+" if s > 0 else "Y-", k), (k,), kap * cm(k) == want,
                                  {"got": kap * cm(k), "expected": want})
                    e.check_value(("Y+" if s > 0 else "Y-", -k), (-k,), -kap * cp(k) == want,
                                  {"got": -kap * cp(k), "expected": want})

    # three-operator products; variables in operator order
    def triple(name, ops, mono, c, pairs, alternative=None, note=None):
        with rep.relation(f"{name} prefactor", note=note) as e:
            for s in (1, -1):
                X, Y = (Xp, Yp) if s > 0 else (Xm, Ym)
                specs = [X if o == "X" else Y for o in ops]
                want = _expect(mono, c, pairs(s), order)
                _check_prefactor(e, "upper" if s > 0 else "lower", specs, want, order)
                if alternative is not None:
                    alt = _expect(mono, c, alternative(s), order)
                    ok = _prefactor_diff(_product_prefactor(specs, order), alt) is None
                    e.extra.setdefault("sign-flipped form matches", {})["upper" if s > 0 else "lower"] = ok

    # X(w) Y(z1) Y(z2) with the stated factor (z1 - q^{+-4} z2)(z1 - z2)
    triple("X Y Y", "XYY", (0, 2, 0), 1,
           lambda s: {(0, 1): ([], [q(-2 * s)]), (0, 2): ([], [q(-2 * s)]), (1, 2): ([q(4 * s), 1], [])},
           alternative=lambda s: {(0, 1): ([], [q(-2 * s)]), (0, 2): ([], [q(-2 * s)]),
                                  (1, 2): ([q(-4 * s), 1], [])},
           note="stated factor (z1 - q^{+-4} z2); data records the check of (z1 - q^{-+4} z2), "
                "the factor shared by the Y Y, Y X Y and Y Y X products")
    triple("Y X Y", "YXY", (1, 1, 0), -1,
           lambda s: {(0, 1): ([], [q(-2 * s)]), (1, 2): ([], [q(-2 * s)]), (0, 2): ([q(-4 * s), 1], [])})
    triple("Y Y X", "YYX", (1, -1, 2), 1,
           lambda s: {(0, 2): ([], [q(-2 * s)]), (1, 2): ([], [q(-2 * s)]), (0, 1): ([q(-4 * s), 1], [])})
    return rep


def verify_modewise(order: int = 12, cap: int = 25, window: int = 3, levels: Sequence[int] = (1, 2)):
    """Brute-force check of A(z)B(w) = contraction * :A(z)B(w): coefficient by coefficient."""
    from .report import RelationReport

    rep = RelationReport("omega", {"order": order, "cap": cap, "window": window, "levels": list(levels)})
    F = Fraction
    groups = [("Omega products mode by mode", [OMEGA0, OMEGA2],
               [((), F(0)), ((1,), F(1)), ((2, 1), F(-1)), ((1, 1), F(1, 2))], window)]
    for l in levels:
        groups.append((f"level-{l} vertex products mode by mode", [phi0_spec(l), psi_spec(l)],
                       [((), F(0)), ((1,), F(1)), ((2,), F(2))], max(window - 1, 0)))
    for rid, specs, states, W in groups:
        with rep.relation(rid, W) as e:
            for A in specs:
                for B in specs:
                    for st in states:
                        for mz in range(-W, W + 1):
                            for mw in range(-W, W + 1):
                                # shift the modes onto the lattice the charge sector allows
                                mzz = mz + (A.slope * (st[1] + B.shift)) % 1
                                mww = mw + (B.slope * st[1]) % 1
                                try:
                                    lhs, rhs = modewise_check(A, B, {st: ONE}, mzz, mww, cap, order,
                                                              sides=True)
                                except OverflowError:
                                    e.skipped += 1
                                    continue
                                e.check((A.name, B.name, str(st)), (str(mzz), str(mww)), lhs, rhs)
    return rep
