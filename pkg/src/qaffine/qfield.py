"""Exact arithmetic in Q(q^{1/2}).

Elements are stored as ``s**e * n(s) / d(s)`` with ``s = q^{1/2}``, where ``n``
and ``d`` are integer polynomials (python-flint ``fmpz_poly``) with nonzero
constant terms, ``gcd(n, d) = 1`` and ``d(0) > 0``.  That triple is canonical,
so equality is structural.
"""

from __future__ import annotations

from fractions import Fraction

from functools import lru_cache
from typing import Union

from flint import fmpz_poly

__all__ = [
    "Scalar",
    "ZERO",
    "ONE",
    "S",
    "Q",
    "qpow",
    "spow",
    "qint",
    "qfactorial",
    "qexp_coeff",
    "qbinom",
    "as_scalar",
]

_ONE_POLY = fmpz_poly([1])
_ZERO_POLY = fmpz_poly([])

Number = Union[int, "Scalar"]


def _strip_s(p: fmpz_poly) -> tuple[int, fmpz_poly]:
    """Split off the largest power of s dividing ``p`` (p nonzero)."""
    k = 0
    while p[k] == 0:
        k += 1
    if k:
        p = p.right_shift(k)
    return k, p


class Scalar:
    """An element of Q(q^{1/2}) in canonical form.  Immutable."""

    __slots__ = ("e", "n", "d", "_hash")

    def __init__(self, e: int = 0, n: fmpz_poly = _ZERO_POLY, d: fmpz_poly = _ONE_POLY):
        # trusted constructor: callers guarantee canonical form
        self.e = e
        self.n = n
        self.d = d
        self._hash = None

    # -- construction -------------------------------------------------------

    @staticmethod
    def make(e: int, n: fmpz_poly, d: fmpz_poly) -> "Scalar":
        """Canonicalize ``s**e * n / d``."""
        if n.is_zero():
            return ZERO
        if d.is_zero():
            raise ZeroDivisionError("zero denominator")
        k, n = _strip_s(n)
        e += k
        k, d = _strip_s(d)
        e -= k
        if not d.is_one():
            g = n.gcd(d)
            if not g.is_one():
                n = n // g
                d = d // g
            if d[0] < 0:
                n = -n
                d = -d
        return Scalar(e, n, d)

    @staticmethod
    def from_int(k: int) -> "Scalar":
        if k == 0:
            return ZERO
        return Scalar(0, fmpz_poly([k]), _ONE_POLY)

    @staticmethod
    def laurent(coeffs: dict[int, int]) -> "Scalar":
        """Laurent polynomial in s from ``{exponent: coefficient}``."""
        coeffs = {k: c for k, c in coeffs.items() if c}
        if not coeffs:
            return ZERO
        lo = min(coeffs)
        hi = max(coeffs)
        arr = [0] * (hi - lo + 1)
        for k, c in coeffs.items():
            arr[k - lo] = c
        return Scalar(lo, fmpz_poly(arr), _ONE_POLY)

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return self.n.is_zero()

    def __bool__(self) -> bool:
        return not self.n.is_zero()

    def is_laurent(self) -> bool:
        return self.d.is_one()

    def is_one(self) -> bool:
        return self.e == 0 and self.d.is_one() and self.n.is_one()

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> "Scalar":
        if self.n.is_zero():
            return self
        return Scalar(self.e, -self.n, self.d)

    def __pos__(self) -> "Scalar":
        return self

    def __add__(self, other: Number) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, int):
                other = Scalar.from_int(other)
            else:
                return NotImplemented
        if self.n.is_zero():
            return other
        if other.n.is_zero():
            return self
        e1, e2 = self.e, other.e
        lo = e1 if e1 < e2 else e2
        n1 = self.n if e1 == lo else self.n.left_shift(e1 - lo)
        n2 = other.n if e2 == lo else other.n.left_shift(e2 - lo)
        d1, d2 = self.d, other.d
        if d1.is_one() and d2.is_one():
            n = n1 + n2
            if n.is_zero():
                return ZERO
            k, n = _strip_s(n)
            return Scalar(lo + k, n, _ONE_POLY)
        if d1 == d2:
            return Scalar.make(lo, n1 + n2, d1)
        if d1.is_one():
            return Scalar.make(lo, n1 * d2 + n2, d2)
        if d2.is_one():
            return Scalar.make(lo, n1 + n2 * d1, d1)
        g = d1.gcd(d2)
        if g.is_one():
            return Scalar.make(lo, n1 * d2 + n2 * d1, d1 * d2)
        a = d1 // g
        b = d2 // g
        return Scalar.make(lo, n1 * b + n2 * a, a * d2)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "Scalar":
        if isinstance(other, int):
            other = Scalar.from_int(other)
        elif not isinstance(other, Scalar):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Number) -> "Scalar":
        return (-self) + other

    def __mul__(self, other: Number) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, int):
                if other == 0 or self.n.is_zero():
                    return ZERO
                if self.d.is_one():
                    return Scalar(self.e, self.n * other, self.d)
                return Scalar.make(self.e, self.n * other, self.d)
            return NotImplemented
        if self.n.is_zero() or other.n.is_zero():
            return ZERO
        e = self.e + other.e
        n1, d1, n2, d2 = self.n, self.d, other.n, other.d
        if d1.is_one() and d2.is_one():
            return Scalar(e, n1 * n2, _ONE_POLY)
        # cross-cancel keeps both factors reduced
        if not d2.is_one():
            g = n1.gcd(d2)
            if not g.is_one():
                n1 = n1 // g
                d2 = d2 // g
        if not d1.is_one():
            g = n2.gcd(d1)
            if not g.is_one():
                n2 = n2 // g
                d1 = d1 // g
        n = n1 * n2
        d = d1 * d2
        if d[0] < 0:
            n = -n
            d = -d
        return Scalar(e, n, d)

    __rmul__ = __mul__

    def inv(self) -> "Scalar":
        if self.n.is_zero():
            raise ZeroDivisionError("inverse of zero")
        n, d = self.d, self.n
        if d[0] < 0:
            n = -n
            d = -d
        return Scalar(-self.e, n, d)

    def __truediv__(self, other: Number) -> "Scalar":
        if isinstance(other, int):
            other = Scalar.from_int(other)
        elif not isinstance(other, Scalar):
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other: Number) -> "Scalar":
        return self.inv() * other

    def __pow__(self, k: int) -> "Scalar":
        if k < 0:
            return self.inv() ** (-k)
        if k == 0:
            return ONE
        if self.n.is_zero():
            return ZERO
        return Scalar(self.e * k, self.n**k, self.d**k)

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = Scalar.from_int(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        if self.n.is_zero():
            return other.n.is_zero()
        return self.e == other.e and self.n == other.n and self.d == other.d

    def __ne__(self, other: object) -> bool:
        r = self.__eq__(other)
        if r is NotImplemented:
            return r
        return not r

    def __hash__(self) -> int:
        if self._hash is None:
            if self.n.is_zero():
                self._hash = 0
            else:
                self._hash = hash((self.e, tuple(int(c) for c in self.n.coeffs()),
                                   tuple(int(c) for c in self.d.coeffs())))
        return self._hash

    # -- substitutions ------------------------------------------------------

    def invert_q(self) -> "Scalar":
        """Image under the field automorphism q -> q^{-1} (s -> s^{-1})."""
        if self.n.is_zero():
            return self
        dn = self.n.degree()
        dd = self.d.degree()
        n = fmpz_poly(list(reversed(self.n.coeffs())))
        d = fmpz_poly(list(reversed(self.d.coeffs())))
        return Scalar.make(-self.e - dn + dd, n, d)

    def evaluate(self, s_value):
        """Evaluate at ``s = s_value`` (any ring supporting +, *, /, **)."""
        num = sum(int(c) * s_value**i for i, c in enumerate(self.n.coeffs()))
        den = sum(int(c) * s_value**i for i, c in enumerate(self.d.coeffs()))
        return num * s_value**self.e / den if self.e >= 0 else num / (den * s_value ** (-self.e))

    # -- formatting ---------------------------------------------------------

    def _laurent_str(self, e: int, p: fmpz_poly) -> str:
        terms = []
        for i, c in enumerate(p.coeffs()):
            c = int(c)
            if c == 0:
                continue
            k = e + i
            if k == 0:
                mono = ""
            elif k % 2 == 0:
                mono = "q" if k == 2 else f"q^{k // 2}"
            else:
                mono = f"q^({k}/2)"
            if mono == "":
                t = str(c)
            elif c == 1:
                t = mono
            elif c == -1:
                t = "-" + mono
            else:
                t = f"{c}*{mono}"
            terms.append(t)
        if not terms:
            return "0"
        out = terms[0]
        for t in terms[1:]:
            out += " - " + t[1:] if t.startswith("-") else " + " + t
        return out

    def __str__(self) -> str:
        if self.n.is_zero():
            return "0"
        if self.d.is_one():
            return self._laurent_str(self.e, self.n)
        num = self._laurent_str(self.e, self.n)
        den = self._laurent_str(0, self.d)
        return f"({num})/({den})"

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def encode(self) -> str:
        """Stable text encoding ``e|n0,n1,..|d0,d1,..`` used in caches and reports."""
        if self.n.is_zero():
            return "0"
        n = ",".join(str(int(c)) for c in self.n.coeffs())
        d = ",".join(str(int(c)) for c in self.d.coeffs())
        return f"{self.e}|{n}|{d}"

    @staticmethod
    def decode(text: str) -> "Scalar":
        if text == "0":
            return ZERO
        e, n, d = text.split("|")
        return Scalar.make(int(e), fmpz_poly([int(c) for c in n.split(",")]),
                           fmpz_poly([int(c) for c in d.split(",")]))

    def __reduce__(self):
        return (Scalar.decode, (self.encode(),))


ZERO = Scalar(0, _ZERO_POLY, _ONE_POLY)
ONE = Scalar(0, _ONE_POLY, _ONE_POLY)
S = Scalar(1, _ONE_POLY, _ONE_POLY)
Q = Scalar(2, _ONE_POLY, _ONE_POLY)


def as_scalar(x: Number) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, Fraction):
        return Scalar.from_int(x.numerator) / x.denominator
    return Scalar.from_int(int(x))


@lru_cache(maxsize=None)
def spow(k: int) -> Scalar:
    """s**k = q^{k/2}."""
    return Scalar(k, _ONE_POLY, _ONE_POLY)


def qpow(k) -> Scalar:
    """q**k for k an integer or a half-integer (given as Fraction/float-free rational)."""
    twice = 2 * k
    if int(twice) != twice:
        raise ValueError(f"q-exponent {k} is not a half-integer")
    return spow(int(twice))


@lru_cache(maxsize=None)
def qint(n: int, i: int = 1) -> Scalar:
    """[n]_i = (q_i^n - q_i^-n)/(q_i - q_i^-1) with q_1 = q, q_2 = q^2."""
    if i not in (1, 2):
        raise ValueError("base index must be 1 or 2")
    if n == 0:
        return ZERO
    if n < 0:
        return -qint(-n, i)
    step = 2 * i  # exponent of s in q_i
    # q_i^{n-1} + q_i^{n-3} + ... + q_i^{-(n-1)}
    return Scalar.laurent({step * (n - 1 - 2 * t): 1 for t in range(n)})


@lru_cache(maxsize=None)
def qfactorial(n: int, i: int = 1) -> Scalar:
    if n < 0:
        raise ValueError("factorial of a negative integer")
    out = ONE
    for m in range(1, n + 1):
        out = out * qint(m, i)
    return out


@lru_cache(maxsize=None)
def qbinom(n: int, k: int) -> Scalar:
    if k < 0 or k > n:
        return ZERO
    return qfactorial(n) / (qfactorial(k) * qfactorial(n - k))


@lru_cache(maxsize=None)
def qexp_coeff(n: int, sign: int = 1) -> Scalar:
    """n-th coefficient of exp_{q^sign}(x) = sum q^{n(n-1)/2}/[n]! x^n."""
    if n < 0:
        raise ValueError("negative order")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    c = qpow(n * (n - 1) // 2) / qfactorial(n)
    return c if sign == 1 else c.invert_q()
