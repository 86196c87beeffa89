"""Seed and compatible-pair mutation, exchange relations, and quantum-torus isogenies.

Integer matrices are lists of lists of ints; indices in the public API are
1-based, as mutation words usually are.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Sequence

from . import lattice
from .errors import FrozenIndex, ShapeMismatch
from .multipoly import LaurentPoly, PolyRing, RatFunc
from .rings import IntegerRing


def _int_matrix(A, name="matrix"):
    try:
        out = [[int(x) for x in row] for row in A]
    except (TypeError, ValueError):
        raise ShapeMismatch(f"{name} must be an integer matrix") from None
    if out and any(len(row) != len(out[0]) for row in out):
        raise ShapeMismatch(f"{name} rows have different lengths")
    return out


def _is_skew(L):
    n = len(L)
    return all(len(row) == n for row in L) and all(L[i][j] == -L[j][i] for i in range(n) for j in range(n))


class Seed:
    """An ``m x n`` exchange matrix with skew-symmetrizer ``D``."""

    def __init__(self, B, D: Sequence[int] | None = None):
        B = _int_matrix(B, "exchange matrix")
        self.m = len(B)
        self.n = len(B[0]) if B else 0
        if self.n > self.m:
            raise ShapeMismatch(f"exchange matrix is {self.m}x{self.n}; need n <= m")
        self.B = tuple(tuple(row) for row in B)
        self.D = tuple(int(d) for d in (D if D is not None else [1] * self.n))
        if len(self.D) != self.n or any(d <= 0 for d in self.D):
            raise ShapeMismatch("skew-symmetrizer must have n positive entries")
        if not self.is_skew_symmetrizable():
            raise ShapeMismatch(f"D B is not skew-symmetric for D = {list(self.D)}")

    def is_skew_symmetrizable(self) -> bool:
        B, D = self.B, self.D
        return all(D[i] * B[i][j] == -D[j] * B[j][i] for i in range(self.n) for j in range(self.n))

    def column(self, k):
        return [self.B[i][k - 1] for i in range(self.m)]

    def tolist(self):
        return [list(row) for row in self.B]

    def __eq__(self, other):
        return isinstance(other, Seed) and other.B == self.B and other.D == self.D

    def __hash__(self):
        return hash((self.B, self.D))

    def __repr__(self):
        return f"Seed({self.tolist()}, D={list(self.D)})"


def _check_index(k, n):
    if not 1 <= k <= n:
        raise FrozenIndex(f"index {k} is not mutable (mutable indices are 1..{n})")


def mutate_matrix(B, k: int):
    """Matrix mutation at 1-based ``k``."""
    m, n = len(B), len(B[0])
    _check_index(k, n)
    c = k - 1
    out = []
    for i in range(m):
        row = []
        for j in range(n):
            if i == c or j == c:
                row.append(-B[i][j])
            else:
                bik, bkj = B[i][c], B[c][j]
                row.append(B[i][j] + (abs(bik) * bkj + bik * abs(bkj)) // 2)
        out.append(row)
    return out


def mutate_seed(s: Seed, k: int) -> Seed:
    # Seed() re-validates skew-symmetrizability with the carried D
    return Seed(mutate_matrix([list(r) for r in s.B], k), s.D)


@dataclass(frozen=True)
class Compatibility:
    compatible: bool
    D: tuple | None
    product: tuple

    def to_json(self):
        return {"compatible": self.compatible, "D": None if self.D is None else list(self.D),
                "product": [list(r) for r in self.product]}


def check_compatible(Lam, B) -> Compatibility:
    """Does ``B^T Lam`` equal ``(D | 0)`` with a positive diagonal ``D``?"""
    Lam = _int_matrix(Lam, "form")
    B = _int_matrix(B, "exchange matrix")
    m = len(B)
    n = len(B[0]) if B else 0
    if len(Lam) != m or any(len(row) != m for row in Lam):
        raise ShapeMismatch(f"form must be {m}x{m} for a {m}x{n} exchange matrix")
    prod = lattice.matmul(lattice.transpose(B), Lam)
    ok = all(prod[i][j] == 0 for i in range(n) for j in range(m) if i != j)
    D = tuple(prod[i][i] for i in range(n))
    ok = ok and all(d > 0 for d in D)
    return Compatibility(ok, D if ok else None, tuple(tuple(r) for r in prod))


class CompatiblePair:
    """Skew form ``Lam`` and seed with ``B^T Lam = (D | 0)``."""

    def __init__(self, Lam, seed: Seed, D: Sequence[int] | None = None):
        Lam = _int_matrix(Lam, "form")
        if not _is_skew(Lam):
            raise ShapeMismatch("form must be skew-symmetric")
        res = check_compatible(Lam, seed.tolist())
        if not res.compatible:
            raise ShapeMismatch(f"not a compatible pair: B^T Lam = {[list(r) for r in res.product]}")
        if D is not None and tuple(D) != res.D:
            raise ShapeMismatch(f"compatibility diagonal {list(res.D)} differs from the carried D = {list(D)}")
        if lattice.rank(seed.tolist()) != seed.n:
            raise ShapeMismatch("exchange matrix must have full rank n")
        self.Lam = tuple(tuple(r) for r in Lam)
        self.seed = seed
        self.D = res.D

    def __eq__(self, other):
        return isinstance(other, CompatiblePair) and other.Lam == self.Lam and other.seed == self.seed

    def __hash__(self):
        return hash((self.Lam, self.seed))

    def __repr__(self):
        return f"CompatiblePair(Lam={[list(r) for r in self.Lam]}, B={self.seed.tolist()}, D={list(self.D)})"


def mutation_matrix_E(B, k: int):
    """``E_k``: identity except column ``k``, with ``-1`` at ``(k, k)`` and
    ``max(0, b_ik)`` elsewhere in that column."""
    m = len(B)
    c = k - 1
    E = lattice.identity(m)
    for i in range(m):
        E[i][c] = -1 if i == c else max(0, B[i][c])
    return E


def mutate_pair(pair: CompatiblePair, k: int) -> CompatiblePair:
    """``Lam' = E_k^T Lam E_k`` and seed mutation; compatibility rechecked with the same D."""
    _check_index(k, pair.seed.n)
    B = pair.seed.tolist()
    E = mutation_matrix_E(B, k)
    Lam = lattice.matmul(lattice.matmul(lattice.transpose(E), [list(r) for r in pair.Lam]), E)
    return CompatiblePair(Lam, mutate_seed(pair.seed, k), pair.D)


def principal_pair(B) -> CompatiblePair:
    """``B~ = (B; I)`` with ``Lam = [[0, -I], [I, -B]]`` for skew-symmetric ``B``."""
    B = _int_matrix(B)
    n = len(B)
    Bt = [list(r) for r in B] + lattice.identity(n)
    Lam = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        Lam[i][n + i] = -1
        Lam[n + i][i] = 1
        for j in range(n):
            Lam[n + i][n + j] = -B[i][j]
    return CompatiblePair(Lam, Seed(Bt))


# --- exchange relations --------------------------------------------------

def cluster_ring(m: int) -> PolyRing:
    return PolyRing(IntegerRing(), tuple(f"X{i}" for i in range(1, m + 1)), True)


@dataclass
class ClusterChart:
    """Cluster variables expressed in the initial variables ``X1..Xm``."""

    variables: tuple
    word: tuple = ()
    ring: PolyRing = field(default=None, repr=False)

    @classmethod
    def initial(cls, m: int) -> "ClusterChart":
        R = cluster_ring(m)
        return cls(R.gens(), (), R)

    def __post_init__(self):
        self.variables = tuple(self.variables)
        if self.ring is None:
            self.ring = self.variables[0].ring

    def strings(self):
        return [str(v) for v in self.variables]

    def is_laurent(self) -> bool:
        return all(isinstance(v, LaurentPoly) for v in self.variables)


def _as_frac(v):
    return v if isinstance(v, RatFunc) else RatFunc(v)


def exchange_mutation(chart: ClusterChart, seed: Seed, k: int) -> ClusterChart:
    """Replace variable ``k`` by ``(prod_{b_ik>0} X_i^b_ik + prod_{b_ik<0} X_i^-b_ik) / X_k``."""
    _check_index(k, seed.n)
    if len(chart.variables) != seed.m:
        raise ShapeMismatch(f"chart has {len(chart.variables)} variables for an {seed.m}-row seed")
    R = chart.ring
    pos = RatFunc(R.one())
    neg = RatFunc(R.one())
    for i, b in enumerate(seed.column(k)):
        if b > 0:
            pos = pos * _as_frac(chart.variables[i]) ** b
        elif b < 0:
            neg = neg * _as_frac(chart.variables[i]) ** (-b)
    new = ((pos + neg) / _as_frac(chart.variables[k - 1])).simplify()
    poly = new.to_poly()
    if poly is not None:
        new = poly
    vars_ = list(chart.variables)
    vars_[k - 1] = new
    return ClusterChart(tuple(vars_), chart.word + (k,), R)


def mutation_sequence(seed: Seed, word: Sequence[int], chart: ClusterChart | None = None):
    """Apply a mutation word; returns the final (seed, chart)."""
    chart = chart or ClusterChart.initial(seed.m)
    for k in word:
        chart = exchange_mutation(chart, seed, k)
        seed = mutate_seed(seed, k)
    return seed, chart


def laurent_check(seed: Seed, depth: int):
    """Every cluster variable within ``depth`` mutations is a Laurent polynomial.

    Returns ``(ok, count, offending_word)``.
    """
    frontier = [(seed, ClusterChart.initial(seed.m))]
    count = 0
    for _ in range(depth):
        nxt = []
        for s, ch in frontier:
            for k in range(1, s.n + 1):
                if ch.word and ch.word[-1] == k:
                    continue
                ch2 = exchange_mutation(ch, s, k)
                count += 1
                v = ch2.variables[k - 1]
                if not isinstance(v, LaurentPoly):
                    return False, count, ch2.word
                if any(x < 0 for e in v.terms for x in e[s.n:]):
                    return False, count, ch2.word
                nxt.append((mutate_seed(s, k), ch2))
        frontier = nxt
    return True, count, None


# --- isogenies of quantum tori -------------------------------------------

@dataclass
class Isogeny:
    kernel: list
    complement: list
    r: int
    d: int
    symplectic_basis: list
    Y: list
    commutation: list
    expected: list
    checks_pass: bool
    unimodular: bool

    def to_json(self):
        return {
            "kernel": self.kernel, "complement": self.complement, "r": self.r, "d": self.d,
            "symplectic_basis": [[str(x) for x in v] for v in self.symplectic_basis],
            "Y": self.Y, "commutation": self.commutation, "expected": self.expected,
            "checks_pass": self.checks_pass, "unimodular": self.unimodular,
        }


def _omega(Lam, a, b):
    return sum(a[i] * Lam[i][j] * b[j] for i in range(len(a)) if a[i] for j in range(len(b)) if b[j])


def isogeny_decomposition(Lam) -> Isogeny:
    """Split ``Z^s = K + L`` with ``K = ker Lam`` and build a rescaled symplectic basis.

    A symplectic basis ``v_1..v_r, w_1..w_r`` of ``L (x) Q`` is produced by
    symplectic Gram-Schmidt; ``d`` clears its denominators and the monomials
    ``Y_j = X^(d v_j)`` commute like the standard q-Weyl generators with
    ``q`` replaced by ``q^(d^2)``.
    """
    Lam = _int_matrix(Lam, "form")
    if not _is_skew(Lam):
        raise ShapeMismatch("form must be skew-symmetric")
    s = len(Lam)
    H, U, pivots = lattice.column_hnf(Lam, s)
    rk = len(pivots)
    cols = [[U[i][k] for i in range(s)] for k in range(s)]
    complement, kernel = cols[:rk], cols[rk:]
    # prefer coordinate vectors for the complement when they complete the kernel
    for chosen in combinations(range(s), rk):
        cand = [[int(i == c) for i in range(s)] for c in chosen]
        if abs(lattice.det(lattice.transpose(kernel + cand))) == 1:
            complement = cand
            break
    unimodular = abs(lattice.det(U)) == 1 if s else True
    # Smith form of [K | L] certifies the direct sum
    if s:
        S, _, _ = lattice.smith_normal_form(lattice.transpose(kernel + complement))
        unimodular = unimodular and all(abs(S[i][i]) == 1 for i in range(s))
    work = [[Fraction(x) for x in v] for v in complement]
    vs, ws = [], []
    while work:
        v = work.pop(0)
        idx = next((i for i, u in enumerate(work) if _omega(Lam, v, u) != 0), None)
        if idx is None:
            raise ShapeMismatch("restriction of the form to the complement is degenerate")
        u = work.pop(idx)
        c = _omega(Lam, v, u)
        w = [x / c for x in u]
        vs.append(v)
        ws.append(w)
        work = [[xi - _omega(Lam, x, w) * vi + _omega(Lam, x, v) * wi for xi, vi, wi in zip(x, v, w)]
                for x in work]
    basis = vs + ws
    r = len(vs)
    d = 1
    for vec in basis:
        for x in vec:
            d = lcm(d, x.denominator)
    Y = [[int(x * d) for x in vec] for vec in basis]
    comm = [[_omega(Lam, a, b) for b in Y] for a in Y]
    J = [[0] * (2 * r) for _ in range(2 * r)]
    for i in range(r):
        J[i][r + i] = d * d
        J[r + i][i] = -d * d
    return Isogeny(kernel, complement, r, d, basis, Y, comm, J, comm == J, unimodular)
