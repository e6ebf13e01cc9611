"""Exact sparse linear algebra over Q(q^{1/2}).

Elimination is fraction-free (Bareiss / Gauss-Jordan) after clearing row
denominators, with lowest-index pivoting so every output is deterministic.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Mapping, Sequence

from flint import fmpz_poly

from .qfield import ONE, ZERO, Scalar

__all__ = [
    "SparseVector",
    "SparseMatrix",
    "exact_div",
    "clear_denominators",
    "gauss_jordan",
    "rank",
    "nullspace",
    "solve",
    "proportional",
    "column_basis",
    "axpy",
    "vec_scale",
    "vec_add",
    "vec_sub",
    "vec_is_zero",
]


# -- plain-dict vector helpers (hot paths use these directly) ----------------

def axpy(acc: dict, c: Scalar, v: Mapping) -> dict:
    """acc += c * v, in place; drops cancelled entries."""
    if not c:
        return acc
    one = c.is_one()
    for k, x in v.items():
        y = x if one else c * x
        old = acc.get(k)
        if old is None:
            acc[k] = y
        else:
            z = old + y
            if z:
                acc[k] = z
            else:
                del acc[k]
    return acc


def vec_add(u: Mapping, v: Mapping) -> dict:
    return axpy(dict(u), ONE, v)


def vec_sub(u: Mapping, v: Mapping) -> dict:
    return axpy(dict(u), -ONE, v)


def vec_scale(c: Scalar, v: Mapping) -> dict:
    if not c:
        return {}
    if c.is_one():
        return dict(v)
    return {k: c * x for k, x in v.items()}


def vec_is_zero(v: Mapping) -> bool:
    return all(not x for x in v.values())


class SparseVector(dict):
    """Mapping index -> Scalar with zero entries absent."""

    @classmethod
    def from_items(cls, items: Iterable[tuple[Hashable, Scalar]]) -> "SparseVector":
        out = cls()
        for k, x in items:
            if x:
                out[k] = out[k] + x if k in out else x
                if not out[k]:
                    del out[k]
        return out

    def __add__(self, other: Mapping) -> "SparseVector":
        return SparseVector(axpy(dict(self), ONE, other))

    def __sub__(self, other: Mapping) -> "SparseVector":
        return SparseVector(axpy(dict(self), -ONE, other))

    def __neg__(self) -> "SparseVector":
        return SparseVector({k: -x for k, x in self.items()})

    def scale(self, c: Scalar) -> "SparseVector":
        return SparseVector(vec_scale(c, self))

    def is_zero(self) -> bool:
        return vec_is_zero(self)

    def sorted_items(self) -> list:
        return sorted(self.items())


class SparseMatrix:
    """rows x cols matrix stored as {(row, col): Scalar}, zeros absent."""

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], Scalar] | None = None):
        self.rows = rows
        self.cols = cols
        self.entries: dict[tuple[int, int], Scalar] = {}
        if entries:
            for (r, c), x in entries.items():
                if not (0 <= r < rows and 0 <= c < cols):
                    raise IndexError((r, c))
                if x:
                    self.entries[r, c] = x

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "SparseMatrix":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        ent = {}
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                x = x if isinstance(x, Scalar) else Scalar.from_int(x)
                if x:
                    ent[i, j] = x
        return cls(nr, nc, ent)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[Mapping[int, Scalar]]) -> "SparseMatrix":
        ent = {}
        for j, col in enumerate(columns):
            for i, x in col.items():
                if x:
                    ent[i, j] = x
        return cls(nrows, len(columns), ent)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): ONE for i in range(n)})

    def __getitem__(self, rc: tuple[int, int]) -> Scalar:
        return self.entries.get(rc, ZERO)

    def dense_rows(self) -> list[list[Scalar]]:
        out = [[ZERO] * self.cols for _ in range(self.rows)]
        for (r, c), x in self.entries.items():
            out[r][c] = x
        return out

    def column(self, c: int) -> SparseVector:
        return SparseVector({r: x for (r, cc), x in self.entries.items() if cc == c})

    def mul_vector(self, v: Mapping[int, Scalar]) -> SparseVector:
        out: dict = {}
        for (r, c), x in self.entries.items():
            y = v.get(c)
            if y:
                axpy(out, x * y, {r: ONE})
        return SparseVector(out)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        by_row: dict[int, list] = {}
        for (r, c), x in other.entries.items():
            by_row.setdefault(r, []).append((c, x))
        out: dict = {}
        for (r, k), x in self.entries.items():
            for c, y in by_row.get(k, ()):
                axpy(out, x * y, {(r, c): ONE})
        return SparseMatrix(self.rows, other.cols, out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.entries == other.entries

    def __repr__(self) -> str:
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


# -- fraction-free elimination ------------------------------------------------

def exact_div(a: Scalar, b: Scalar) -> Scalar:
    """a / b for Laurent polynomials where the quotient is known to be Laurent."""
    if not a:
        return ZERO
    if a.d.is_one() and b.d.is_one():
        quo, rem = divmod(a.n, b.n)
        if rem.is_zero():
            return Scalar.make(a.e - b.e, quo, a.d)
    return a / b


def _lcm(a: fmpz_poly, b: fmpz_poly) -> fmpz_poly:
    if a.is_one():
        return b
    if b.is_one():
        return a
    return (a * b) // a.gcd(b)


def clear_denominators(row: Mapping) -> dict:
    """Scale a row by a nonzero factor so all entries are polynomials in s."""
    den = fmpz_poly([1])
    lo = None
    for x in row.values():
        den = _lcm(den, x.d)
        lo = x.e if lo is None or x.e < lo else lo
    if lo is None:
        return {}
    factor = Scalar.make(-lo, den, fmpz_poly([1]))
    if factor.is_one():
        return dict(row)
    return {k: x * factor for k, x in row.items()}


def gauss_jordan(rows: Sequence[Mapping[int, Scalar]], ncols: int):
    """Fraction-free Gauss-Jordan elimination.

    Returns ``(pivots, reduced_rows, det)``: ``pivots`` lists pivot columns in
    increasing order; ``reduced_rows[i]`` has ``det`` in column ``pivots[i]``
    and zero in every other pivot column.  Rows are scaled copies of row
    combinations, so the row space is preserved.
    """
    work = [clear_denominators(r) for r in rows]
    work = [r for r in work if r]
    pivots: list[int] = []
    prev = ONE
    done = 0
    for col in range(ncols):
        piv_row = None
        for i in range(done, len(work)):
            if col in work[i]:
                piv_row = i
                break
        if piv_row is None:
            continue
        work[done], work[piv_row] = work[piv_row], work[done]
        prow = work[done]
        p = prow[col]
        for i in range(len(work)):
            if i == done:
                continue
            row = work[i]
            a = row.get(col)
            new: dict = {}
            keys = set(row) | set(prow)
            for j in keys:
                v = p * row[j] if j in row else ZERO
                if a is not None and j in prow:
                    v = v - a * prow[j]
                if v:
                    new[j] = exact_div(v, prev) if not prev.is_one() else v
            work[i] = new
        # rows already reduced above this step pick up a factor p/prev on
        # their pivot entries, which the update formula applies uniformly
        prev = p
        pivots.append(col)
        done += 1
        # drop zero rows below
        work = work[:done] + [r for r in work[done:] if r]
    return pivots, work[:done], prev


def rank(m: SparseMatrix) -> int:
    rows = [{} for _ in range(m.rows)]
    for (r, c), x in m.entries.items():
        rows[r][c] = x
    pivots, _, _ = gauss_jordan(rows, m.cols)
    return len(pivots)


def nullspace(m: SparseMatrix) -> list[SparseVector]:
    """Basis of the right nullspace; one vector per free column, free entry 1."""
    rows = [{} for _ in range(m.rows)]
    for (r, c), x in m.entries.items():
        rows[r][c] = x
    pivots, red, det = gauss_jordan(rows, m.cols)
    pivset = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivset:
            continue
        v = {free: ONE}
        for i, pc in enumerate(pivots):
            x = red[i].get(free)
            if x:
                v[pc] = -x / det
        basis.append(SparseVector(v))
    return basis


def solve(m: SparseMatrix, rhs: Mapping[int, Scalar]) -> SparseVector | None:
    """One solution of m x = rhs (free variables 0), or None if inconsistent."""
    rows = [{} for _ in range(m.rows)]
    for (r, c), x in m.entries.items():
        rows[r][c] = x
    aug = m.cols
    for r, x in rhs.items():
        if x:
            rows[r][aug] = x
    pivots, red, det = gauss_jordan(rows, m.cols + 1)
    if pivots and pivots[-1] == aug:
        return None
    sol = {}
    for i, pc in enumerate(pivots):
        x = red[i].get(aug)
        if x:
            sol[pc] = x / det
    return SparseVector(sol)


def column_basis(columns: Sequence[Mapping[Hashable, Scalar]]):
    """Greedy lowest-index basis of the span of ``columns``.

    Returns ``(basis_indices, coords)`` where ``coords[j]`` expresses column
    ``j`` in terms of the basis columns as ``{position in basis: Scalar}``.
    """
    row_keys = sorted({k for c in columns for k in c})
    index = {k: i for i, k in enumerate(row_keys)}
    # transpose: each column becomes a row of the working matrix
    ncols = len(columns)
    rows = [dict() for _ in row_keys]
    for j, col in enumerate(columns):
        for k, x in col.items():
            if x:
                rows[index[k]][j] = x
    pivots, red, det = gauss_jordan(rows, ncols)
    inv_det = det.inv() if pivots else ONE
    coords: list[dict[int, Scalar]] = []
    pos = {c: i for i, c in enumerate(pivots)}
    for j in range(ncols):
        if j in pos:
            coords.append({pos[j]: ONE})
            continue
        v = {}
        for i in range(len(pivots)):
            x = red[i].get(j)
            if x:
                v[i] = x * inv_det
        coords.append(v)
    return pivots, coords


def proportional(u: Mapping, v: Mapping) -> Scalar | None:
    """Return c with u = c v, or None when no such scalar exists.

    ``u = 0`` gives ZERO (the zero-vector case).  Both zero gives ONE by
    convention.  ``v = 0`` with ``u != 0`` is not proportional.
    """
    u = {k: x for k, x in u.items() if x}
    v = {k: x for k, x in v.items() if x}
    if not v:
        return ONE if not u else None
    if not u:
        return ZERO
    if set(u) != set(v):
        return None
    k0 = next(iter(v))
    c = u[k0] / v[k0]
    for k, x in v.items():
        if u[k] != c * x:
            return None
    return c
