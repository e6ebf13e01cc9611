"""Weight multiplicities of integrable highest-weight modules via Freudenthal.

Conventions
-----------
Weights are written ``Lambda - beta`` with ``beta = sum x_i alpha_i`` and
``x_i >= 0``; tables map the tuple ``beta`` to the multiplicity.  The Weyl
vector satisfies ``rho(h_i) = 1`` for every simple coroot, so
``(Lambda + rho | alpha_i) = d_i (Lambda(h_i) + 1)`` with
``d_i = (alpha_i | alpha_i) / 2``.

Two gradings select the truncation window: ``"delta"`` keeps ``x_0 <= N``
(the d-grading) and ``"principal"`` keeps ``sum(x) <= N``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable

__all__ = [
    "RootSystemData",
    "A1_AFFINE",
    "C2_AFFINE",
    "root_system",
    "CharTable",
    "freudenthal",
    "compare",
]


@dataclass(frozen=True)
class RootSystemData:
    name: str
    cartan: tuple[tuple[int, ...], ...]
    d: tuple[int, ...]                     # (alpha_i | alpha_i) / 2
    delta: tuple[int, ...]
    finite_roots: tuple[tuple[int, ...], ...]  # positive roots of the finite part, in alpha_1.. coords
    imaginary_mult: int

    @property
    def rank(self) -> int:
        return len(self.d)

    def form(self, a: Iterable[int], b: Iterable[int]) -> int:
        a = tuple(a)
        b = tuple(b)
        tot = 0
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        tot += ai * bj * self.d[i] * self.cartan[i][j]
        return tot

    def lam_pair(self, lam: tuple[int, ...], beta: Iterable[int]) -> int:
        """(Lambda | beta) for Lambda given by Dynkin labels."""
        return sum(self.d[i] * lam[i] * b for i, b in enumerate(beta))

    def positive_roots(self, max_delta: int):
        """Yield (root, multiplicity) for positive roots with x_0 <= max_delta."""
        n = self.rank
        fin = [(0,) + r for r in self.finite_roots]
        for k in range(0, max_delta + 1):
            kd = tuple(k * c for c in self.delta)
            for r in fin:
                yield tuple(a + b for a, b in zip(kd, r)), 1
                if k >= 1:
                    yield tuple(a - b for a, b in zip(kd, r)), 1
            if k >= 1:
                yield kd, self.imaginary_mult
        del n


A1_AFFINE = RootSystemData(
    name="A1^(1)",
    cartan=((2, -2), (-2, 2)),
    d=(1, 1),
    delta=(1, 1),
    finite_roots=((1,),),
    imaginary_mult=1,
)

# alpha_0, alpha_2 long (norm 4), alpha_1 short (norm 2)
C2_AFFINE = RootSystemData(
    name="C2^(1)",
    cartan=((2, -1, 0), (-2, 2, -2), (0, -1, 2)),
    d=(2, 1, 2),
    delta=(1, 2, 1),
    finite_roots=((1, 0), (0, 1), (1, 1), (2, 1)),
    imaginary_mult=2,
)


def root_system(name: str) -> RootSystemData:
    key = name.lower().replace("^", "").replace("(1)", "").replace("_", "")
    if key in ("a1", "a11", "sl2"):
        return A1_AFFINE
    if key in ("c2", "c21", "sp4"):
        return C2_AFFINE
    raise ValueError(f"unknown root system {name!r}")


@dataclass
class CharTable:
    system: str
    highest: tuple[int, ...]
    depth: int
    grading: str
    mults: dict[tuple[int, ...], int] = field(default_factory=dict)

    def depth_of(self, beta: tuple[int, ...]) -> int:
        return beta[0] if self.grading == "delta" else sum(beta)

    def to_json(self) -> str:
        rows = [{"beta": list(b), "mult": m} for b, m in sorted(self.mults.items())]
        return json.dumps(
            {"system": self.system, "highest": list(self.highest), "depth": self.depth,
             "grading": self.grading, "weights": rows},
            indent=1, sort_keys=True)

    def to_tsv(self) -> str:
        n = len(self.highest)
        head = "\t".join([f"x{i}" for i in range(n)] + ["depth", "mult"])
        lines = [head]
        for b, m in sorted(self.mults.items(), key=lambda t: (self.depth_of(t[0]), t[0])):
            lines.append("\t".join([str(x) for x in b] + [str(self.depth_of(b)), str(m)]))
        return "\n".join(lines) + "\n"


def freudenthal(system: RootSystemData | str, highest: Iterable[int], depth: int,
                grading: str = "delta", seed: int | None = None) -> CharTable:
    """Multiplicities of ``highest - beta`` for ``beta`` within the depth window.

    ``seed`` shuffles the order in which positive roots are summed; the
    result must not depend on it.
    """
    rs = root_system(system) if isinstance(system, str) else system
    lam = tuple(highest)
    if len(lam) != rs.rank or any(m < 0 for m in lam):
        raise ValueError("highest weight must be dominant with one label per node")
    if grading not in ("delta", "principal"):
        raise ValueError(f"unknown grading {grading!r}")
    n = rs.rank

    def in_window(beta):
        return (beta[0] if grading == "delta" else sum(beta)) <= depth

    def in_region(beta):
        # |Lambda|^2 - |Lambda - beta|^2 >= 0 holds on every weight
        return 2 * rs.lam_pair(lam, beta) - rs.form(beta, beta) >= 0

    # enumerate candidate betas by height
    zero = (0,) * n
    seen = {zero}
    frontier = [zero]
    layers = [[zero]]
    while frontier:
        nxt = []
        for b in frontier:
            for i in range(n):
                c = list(b)
                c[i] += 1
                c = tuple(c)
                if c not in seen and in_window(c) and in_region(c):
                    seen.add(c)
                    nxt.append(c)
        nxt.sort()
        if nxt:
            layers.append(nxt)
        frontier = nxt

    roots = list(rs.positive_roots(max(b[0] for b in seen)))
    if seed is not None:
        random.Random(seed).shuffle(roots)
    rootdata = [(r, m, rs.form(r, r)) for r, m in roots]
    rho_lam = [rs.d[i] * (lam[i] + 1) for i in range(n)]

    mult: dict[tuple[int, ...], int] = {zero: 1}
    for layer in layers[1:]:
        for beta in layer:
            lhs = 2 * sum(r * b for r, b in zip(rho_lam, beta)) - rs.form(beta, beta)
            rhs = 0
            for r, rm, rr in rootdata:
                # mu + k alpha = Lambda - (beta - k alpha)
                lam_r = rs.lam_pair(lam, r)
                beta_r = rs.form(beta, r)
                k = 1
                while True:
                    g = tuple(b - k * a for b, a in zip(beta, r))
                    if min(g) < 0:
                        break
                    m = mult.get(g, 0)
                    if m:
                        rhs += rm * m * (lam_r - beta_r + k * rr)
                    k += 1
            rhs *= 2
            if lhs == 0:
                if rhs != 0:
                    raise ArithmeticError(f"inconsistent recursion at {beta}")
                continue
            q, rem = divmod(rhs, lhs)
            if rem:
                raise ArithmeticError(f"non-integral multiplicity at {beta}")
            if q:
                mult[beta] = q
    return CharTable(rs.name, lam, depth, grading, mult)


def compare(a: CharTable, b: CharTable) -> dict:
    """Exact comparison on the common depth range.

    Returns a report with ``equal``, the common depth, a note when depths
    differ, and the list of discrepancies ``(beta, mult_a, mult_b)``.
    """
    report: dict = {"equal": True, "common_depth": min(a.depth, b.depth), "diff": []}
    if a.grading != b.grading:
        raise ValueError("tables use different gradings")
    if a.depth != b.depth:
        report["note"] = f"depths differ ({a.depth} vs {b.depth}); compared up to {report['common_depth']}"
    cd = report["common_depth"]
    keys = sorted({k for k in a.mults if a.depth_of(k) <= cd} | {k for k in b.mults if b.depth_of(k) <= cd})
    for k in keys:
        ma, mb = a.mults.get(k, 0), b.mults.get(k, 0)
        if ma != mb:
            report["diff"].append({"beta": list(k), "a": ma, "b": mb})
    report["equal"] = not report["diff"]
    return report
