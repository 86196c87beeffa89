"""Quantum tori, q-connections at roots of unity and the symplectic twist calculus.

A quantum torus is the lattice algebra spanned by ``E(v)``, ``v`` in ``Z^s``,
with ``E(v) E(w) = s^omega(v, w) E(v + w)`` for an integer skew form omega and
a fixed square root ``s`` of ``q``.  The q-Weyl algebra in ``r`` variables
uses coordinates ``(x_1..x_r, T_1..T_r)`` and the form ``[[0, -I], [I, 0]]``,
so that ``T_i x_i = q x_i T_i``.

A q-connection is ``nabla_i = T_i^-1 a_i`` for invertible matrices ``a_i`` in
``x1..xr``; at ``q`` of order ``N`` its N-curvature is
``C_i = T_i^(N-1)(a_i) ... T_i(a_i) a_i``.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from . import lattice
from .dmod import CurvatureFamily, EigenForm, LagrangianVerdict, check_lift, graph_ideal, x_names
from .errors import (
    LatticeMismatch,
    MissingSqrtQ,
    NonUnitQ,
    NotFlat,
    NotInvertible,
    NotSymplectic,
    OracleMismatch,
    SearchExhausted,
    ShapeMismatch,
    WrongOrder,
    ZeroEigenvalue,
)
from .multipoly import LaurentPoly, PolyMatrix, PolyRing, RatFunc
from .psupport import PoissonStructure
from .rings import Ring, RingElement


def standard_form(r: int):
    """Skew form of the q-Weyl algebra on coordinates (x_1..x_r, T_1..T_r)."""
    m = [[0] * (2 * r) for _ in range(2 * r)]
    for i in range(r):
        m[i][r + i] = -1
        m[r + i][i] = 1
    return m


def standard_J(r: int):
    """``[[0, I], [-I, 0]]``."""
    m = [[0] * (2 * r) for _ in range(2 * r)]
    for i in range(r):
        m[i][r + i] = 1
        m[r + i][i] = -1
    return m


def choose_sqrt(ring: Ring, q):
    """A square root of ``q``: ``q^((N+1)/2)`` for odd order ``N``, else a search."""
    N = ring.multiplicative_order(q)
    if N is not None and N % 2 == 1:
        return ring.pow(q, (N + 1) // 2)
    s = ring.sqrt(q)
    if s is None:
        raise MissingSqrtQ(f"{ring.format(q)} has no square root in {ring}")
    return s


class QuantumTorus:
    """The algebra with basis ``E(v)`` and ``E(v)E(w) = s^omega(v,w) E(v+w)``."""

    def __init__(self, ring: Ring, form, q, s=None):
        self.ring = ring
        self.form = tuple(tuple(int(x) for x in row) for row in form)
        self.rank = len(self.form)
        if any(len(row) != self.rank for row in self.form):
            raise LatticeMismatch("commutation form must be square")
        if any(self.form[i][j] != -self.form[j][i] for i in range(self.rank) for j in range(self.rank)):
            raise LatticeMismatch("commutation form must be skew-symmetric")
        self.q = ring.coerce(q)
        if not ring.is_unit(self.q):
            raise NonUnitQ(f"q = {ring.format(self.q)} is not a unit")
        self.s = ring.coerce(s) if s is not None else choose_sqrt(ring, self.q)
        if ring.mul(self.s, self.s) != self.q:
            raise MissingSqrtQ(f"s^2 != q for s = {ring.format(self.s)}")

    @classmethod
    def weyl(cls, ring: Ring, r: int, q, s=None) -> "QuantumTorus":
        return cls(ring, standard_form(r), q, s)

    def __eq__(self, other):
        return (isinstance(other, QuantumTorus) and other.ring == self.ring and other.form == self.form
                and other.q == self.q and other.s == self.s)

    def __hash__(self):
        return hash((self.ring, self.form, self.q, self.s))

    def omega(self, v, w) -> int:
        f = self.form
        return sum(v[i] * f[i][j] * w[j] for i in range(self.rank) if v[i] for j in range(self.rank) if w[j])

    def E(self, v, coeff=1) -> "QWeylElement":
        v = tuple(int(x) for x in v)
        if len(v) != self.rank:
            raise LatticeMismatch(f"vector of length {len(v)} in a rank-{self.rank} torus")
        return QWeylElement(self, {v: self.ring.coerce(coeff)})

    def basis_vector(self, i):
        e = [0] * self.rank
        e[i] = 1
        return tuple(e)

    def gen(self, i) -> "QWeylElement":
        return self.E(self.basis_vector(i))

    def scalar(self, c) -> "QWeylElement":
        return self.E((0,) * self.rank, c)

    def zero(self):
        return QWeylElement(self, {})

    def x(self, i):
        """``x_i`` (0-based) in the q-Weyl coordinates."""
        return self.gen(i)

    def T(self, i):
        return self.gen(self.rank // 2 + i)

    def random_element(self, rng: random.Random, terms=3, spread=2):
        out = {}
        for _ in range(terms):
            v = tuple(rng.randint(-spread, spread) for _ in range(self.rank))
            out[v] = self.ring.random_raw(rng)
        return QWeylElement(self, out)


class QWeylElement:
    """Sparse linear combination of ``E(v)`` in a :class:`QuantumTorus`."""

    __slots__ = ("torus", "terms")

    def __init__(self, torus: QuantumTorus, terms: dict):
        R = torus.ring
        self.torus = torus
        self.terms = {v: c for v, c in terms.items() if not R.is_zero(c)}

    def _check(self, other):
        if isinstance(other, QWeylElement):
            if other.torus != self.torus:
                raise LatticeMismatch("elements of different quantum tori")
            return other
        if isinstance(other, (int, RingElement)):
            return self.torus.scalar(other)
        return None

    def __add__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        R = self.torus.ring
        out = dict(self.terms)
        for v, c in o.terms.items():
            out[v] = R.add(out[v], c) if v in out else c
        return QWeylElement(self.torus, out)

    __radd__ = __add__

    def __neg__(self):
        R = self.torus.ring
        return QWeylElement(self.torus, {v: R.neg(c) for v, c in self.terms.items()})

    def __sub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        T = self.torus
        R = T.ring
        out = {}
        for v, c in self.terms.items():
            for w, d in o.terms.items():
                k = R.mul(R.mul(c, d), R.pow(T.s, T.omega(v, w)))
                key = tuple(a + b for a, b in zip(v, w))
                out[key] = R.add(out[key], k) if key in out else k
        return QWeylElement(T, out)

    def __rmul__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return o * self

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        acc = self.torus.scalar(1)
        for _ in range(e):
            acc = acc * self
        return acc

    def inverse(self):
        if len(self.terms) != 1:
            raise NotInvertible("only monomials are inverted")
        (v, c), = self.terms.items()
        R = self.torus.ring
        # E(v)E(-v) = E(0)
        return QWeylElement(self.torus, {tuple(-x for x in v): R.inv(c)})

    def __eq__(self, other):
        o = self._check(other) if isinstance(other, (QWeylElement, int, RingElement)) else None
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def __str__(self):
        R = self.torus.ring
        parts = []
        for v in sorted(self.terms):
            c = R.format(self.terms[v])
            parts.append(f"{c}*E{v}" if c != "1" else f"E{v}")
        return " + ".join(parts) or "0"

    __repr__ = __str__


def qweyl_multiply(d1: QWeylElement, d2: QWeylElement) -> QWeylElement:
    return d1 * d2


# --- symplectic matrices -------------------------------------------------

class SymplecticMatrix:
    """Integer matrix ``g`` with ``g^T J g = J``."""

    def __init__(self, g):
        g = [[int(x) for x in row] for row in g]
        n = len(g)
        if n % 2 or any(len(row) != n for row in g):
            raise NotSymplectic("a symplectic matrix is square of even size")
        J = standard_J(n // 2)
        if lattice.matmul(lattice.matmul(lattice.transpose(g), J), g) != J:
            raise NotSymplectic(f"{g} does not preserve the standard form")
        self.g = tuple(tuple(row) for row in g)
        self.r = n // 2

    @classmethod
    def identity(cls, r):
        return cls(lattice.identity(2 * r))

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        return SymplecticMatrix(lattice.matmul(self.g, other.g))

    def __eq__(self, other):
        return isinstance(other, SymplecticMatrix) and other.g == self.g

    def __hash__(self):
        return hash(self.g)

    def apply(self, v):
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.g)

    def tolist(self):
        return [list(row) for row in self.g]

    def __repr__(self):
        return f"SymplecticMatrix({self.tolist()})"


def sp_twist(g: SymplecticMatrix, d: QWeylElement) -> QWeylElement:
    """``E(v) -> E(g v)``, an automorphism since ``g`` preserves the form."""
    T = d.torus
    if T.rank != 2 * g.r:
        raise LatticeMismatch(f"{2 * g.r}x{2 * g.r} matrix on a rank-{T.rank} torus")
    gg = [list(row) for row in g.g]
    if lattice.matmul(lattice.matmul(lattice.transpose(gg), [list(r) for r in T.form]), gg) != [list(r) for r in T.form]:
        raise NotSymplectic("g does not preserve this torus's commutation form")
    return QWeylElement(T, {g.apply(v): c for v, c in d.terms.items()})


def bernstein_generators(s: int):
    """Named generators of Sp(2s, Z) in search order.

    Coordinates are ``(x_1..x_s, T_1..T_s)``.  Order: rotations of each
    ``(x_i, T_i)`` plane and their inverses, unit shears ``T_i += x_i`` and
    ``T_i -= x_i``, mixed shears ``T_i += x_j, T_j += x_i`` (both signs), then
    swaps of two coordinate pairs.
    """
    n = 2 * s
    gens = []

    def ident():
        return lattice.identity(n)

    for i in range(s):
        m = ident()
        m[i][i], m[i][s + i], m[s + i][i], m[s + i][s + i] = 0, -1, 1, 0
        gens.append((f"R{i + 1}", m))
        m = ident()
        m[i][i], m[i][s + i], m[s + i][i], m[s + i][s + i] = 0, 1, -1, 0
        gens.append((f"R{i + 1}^-1", m))
    for i in range(s):
        for sign in (1, -1):
            m = ident()
            m[s + i][i] = sign
            gens.append((f"S{i + 1}{'+' if sign > 0 else '-'}", m))
    for i, j in combinations(range(s), 2):
        for sign in (1, -1):
            m = ident()
            m[s + i][j] = sign
            m[s + j][i] = sign
            gens.append((f"M{i + 1}{j + 1}{'+' if sign > 0 else '-'}", m))
    for i, j in combinations(range(s), 2):
        m = [[0] * n for _ in range(n)]
        for a in range(n):
            b = {i: j, j: i, s + i: s + j, s + j: s + i}.get(a, a)
            m[a][b] = 1
        gens.append((f"W{i + 1}{j + 1}", m))
    return gens


@dataclass
class BernsteinResult:
    g: SymplecticMatrix
    word: list
    images: list
    method: str

    def to_json(self):
        return {"g": self.g.tolist(), "word": list(self.word), "images": [list(v) for v in self.images],
                "last_coordinates": [v[-1] for v in self.images], "method": self.method}


def _last_row_separates(row, vecs):
    seen = set()
    for v in vecs:
        t = sum(a * b for a, b in zip(row, v))
        if t in seen:
            return False
        seen.add(t)
    return True


def bernstein_step(monomials: Sequence, depth: int = 8, seed: int = 0,
                   node_limit: int = 20000, random_tries: int = 5000) -> BernsteinResult:
    """Find ``g`` in Sp(2s, Z) giving the monomials distinct last coordinates.

    Breadth-first search over words in :func:`bernstein_generators` returns
    the shortlex-first successful word; past ``node_limit`` visited matrices
    a seeded random search over words of length at most ``depth`` takes over.
    """
    vecs = [tuple(int(x) for x in v) for v in monomials]
    if len(set(vecs)) < 2:
        raise ShapeMismatch("at least two distinct monomials are required")
    n = len(vecs[0])
    if n % 2 or any(len(v) != n for v in vecs):
        raise ShapeMismatch("monomials must be vectors of one even length")
    s = n // 2
    gens = bernstein_generators(s)
    start = tuple(map(tuple, lattice.identity(n)))
    queue = deque([(start, [])])
    seen = {start}
    while queue:
        mat, word = queue.popleft()
        if _last_row_separates(mat[-1], vecs):
            g = SymplecticMatrix(mat)
            return BernsteinResult(g, word, [g.apply(v) for v in vecs], "bfs")
        if len(word) >= depth or len(seen) >= node_limit:
            continue
        for name, m in gens:
            nxt = tuple(map(tuple, lattice.matmul(m, mat)))
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, word + [name]))
    rng = random.Random(seed)
    for _ in range(random_tries):
        length = rng.randint(1, max(1, depth))
        mat = [list(r) for r in start]
        word = []
        for _ in range(length):
            name, m = gens[rng.randrange(len(gens))]
            mat = lattice.matmul(m, mat)
            word.append(name)
        if _last_row_separates(mat[-1], vecs):
            g = SymplecticMatrix(mat)
            return BernsteinResult(g, word, [g.apply(v) for v in vecs], "random")
    raise SearchExhausted(f"no separating twist within depth {depth} and {random_tries} random words")


# --- q-connections -------------------------------------------------------

class QConnection:
    """``nabla_i = T_i^-1 a_i`` with invertible Laurent or rational matrices.

    ``q`` is a unit of ``ring``; inverses are computed from a unit
    determinant, or taken from ``inverses`` and checked.
    """

    def __init__(self, ring: Ring, q, matrices: Sequence, names=None, inverses=None):
        if not matrices:
            raise ShapeMismatch("a q-connection needs at least one direction")
        self.ring = ring
        self.q = ring.coerce(q)
        if not ring.is_unit(self.q):
            raise NonUnitQ(f"q = {ring.format(self.q)} is not a unit")
        self.r = len(matrices)
        self.xring = PolyRing(ring, names or x_names(self.r), True)
        mats = []
        for m in matrices:
            if not isinstance(m, PolyMatrix):
                m = PolyMatrix.from_strings(self.xring, m)
            elif m.ring != self.xring:
                m = m.change_ring(self.xring)
            mats.append(m)
        self.n = mats[0].n
        if any(m.n != self.n for m in mats):
            raise ShapeMismatch("all a_i must have the same size")
        self.a = mats
        self.inverses = []
        for i, m in enumerate(mats):
            inv = None if inverses is None else inverses[i]
            if inv is not None and not isinstance(inv, PolyMatrix):
                inv = PolyMatrix.from_strings(self.xring, inv)
            self.inverses.append(self._certify(m, inv))

    def _certify(self, m, inv):
        if inv is not None:
            if m * inv != PolyMatrix.identity(self.xring, self.n):
                raise NotInvertible("supplied inverse does not invert the matrix")
            return inv
        d = m.det()
        if isinstance(d, LaurentPoly) and d.is_unit():
            return m.adjugate() * d.inverse()
        raise NotInvertible(f"determinant {d} is not a unit monomial; supply an inverse")

    @property
    def q_element(self):
        return RingElement(self.ring, self.q)

    def __repr__(self):
        return f"QConnection(r={self.r}, n={self.n}, q={self.ring.format(self.q)})"

    def shift(self, m, i, power=1):
        return m.q_shift(i, self.q, power)

    def residual(self, i, j) -> PolyMatrix:
        """``T_i(a_j) a_i - T_j(a_i) a_j`` (0-based)."""
        ai, aj = self.a[i], self.a[j]
        return self.shift(aj, i) * ai - self.shift(ai, j) * aj

    def apply(self, i, vector):
        """``nabla_i`` on a column vector of functions."""
        a = self.a[i]
        out = []
        for row in a.rows:
            acc = self.xring.zero()
            for x, v in zip(row, vector):
                acc = acc + x * v
            out.append(acc.q_shift(i, self.q, -1))
        return out

    def gauge(self, g: PolyMatrix, g_inv: PolyMatrix | None = None) -> "QConnection":
        """``a_i -> T_i(g) a_i g^-1``."""
        g_inv = g_inv if g_inv is not None else g.inverse()
        mats = [self.shift(g, i) * a * g_inv for i, a in enumerate(self.a)]
        return QConnection(self.ring, self.q, mats, self.xring.names)


@dataclass
class QFlatCheck:
    flat: bool
    witness: PolyMatrix | None = None
    pair: tuple | None = None

    def to_json(self):
        return {"flat": self.flat, "pair": None if self.pair is None else list(self.pair),
                "witness": None if self.witness is None else self.witness.to_strings()}


def check_qflat(c: QConnection) -> QFlatCheck:
    for i, j in combinations(range(c.r), 2):
        res = c.residual(i, j)
        if not res.is_zero():
            return QFlatCheck(False, res, (i + 1, j + 1))
    return QFlatCheck(True)


def n_curvature(c: QConnection, N: int, oracle: bool = False) -> CurvatureFamily:
    """N-curvature as the ordered product of shifted factors.

    ``q`` must have order exactly ``N``.  With ``oracle=True`` each ``C_i``
    is recomputed as ``nabla_i^N`` applied to the identity,
    ``M -> T_i^-1(a_i M)``, and the two are compared.
    """
    order = c.ring.multiplicative_order(c.q)
    if order != N:
        raise WrongOrder(f"q = {c.ring.format(c.q)} has order {order}, not {N}")
    fl = check_qflat(c)
    if not fl.flat:
        raise NotFlat(f"q-connection is not flat: residual at {fl.pair} is {fl.witness}")
    Cs = []
    for i, a in enumerate(c.a):
        M = a
        for k in range(1, N):
            M = c.shift(a, i, k) * M
        if oracle:
            O = PolyMatrix.identity(c.xring, c.n)
            for _ in range(N):
                O = c.shift(a * O, i, -1)
            if O != M:
                raise OracleMismatch(f"repeated application disagrees with the product in direction {i + 1}")
        Cs.append(M)
    fam = CurvatureFamily(Cs, N, "q", c.q)
    if not fam.commute():
        raise OracleMismatch("N-curvature matrices do not commute")
    if not fam.invariants_hold():
        raise OracleMismatch("charpoly coefficients are not T-invariant")
    return fam


def is_lagrangian_q(forms: Sequence[EigenForm]) -> LagrangianVerdict:
    """Multiplicative closedness ``X_j Lambda_j d_j Lambda_i = X_i Lambda_i d_i Lambda_j``."""
    if not forms:
        raise ValueError("at least one eigenvalue form is required")
    for k, form in enumerate(forms):
        vals = form.values
        if any(v.is_zero() for v in vals):
            raise ZeroEigenvalue(f"form {k} has a zero component")
        R = vals[0].ring
        gens = R.gens()
        for i, j in combinations(range(len(vals)), 2):
            lhs = gens[j] * vals[j] * vals[i].diff(j)
            rhs = gens[i] * vals[i] * vals[j].diff(i)
            if lhs != rhs:
                left = (RatFunc(gens[j] * vals[i].diff(j)) / vals[i]).simplify()
                right = (RatFunc(gens[i] * vals[j].diff(i)) / vals[j]).simplify()
                return LagrangianVerdict(False, {
                    "form": k, "pair": [i + 1, j + 1],
                    "lhs": str(_simp(lhs)), "rhs": str(_simp(rhs)),
                    "log_derivatives": [str(left), str(right)],
                })
    return LagrangianVerdict(True)


def _simp(f):
    return f.simplify() if isinstance(f, RatFunc) else f


def q_graph_ideal(form: EigenForm):
    return graph_ideal(form, PoissonStructure.torus(len(form.values)))


@dataclass
class QLiftCheck:
    flat_over_S: bool
    qN_not_one: bool
    qN_minus_one: str
    qN_minus_one_square_zero: bool
    reduction_matches: bool
    q_reduces: bool
    flatness: QFlatCheck
    reduction: list
    mismatch: tuple | None = None

    def to_json(self):
        return {
            "flat_over_S": self.flat_over_S,
            "qN_not_one": self.qN_not_one,
            "qN_minus_one": self.qN_minus_one,
            "qN_minus_one_square_zero": self.qN_minus_one_square_zero,
            "reduction_matches": self.reduction_matches,
            "q_reduces": self.q_reduces,
            "flatness": self.flatness.to_json(),
            "reduction": [m.to_strings() for m in self.reduction],
            "mismatch": None if self.mismatch is None else list(self.mismatch),
        }


def check_lift_q(lift: QConnection, rmap, target: QConnection, N: int) -> QLiftCheck:
    """Flatness over S, ``q~^N != 1`` in S, and residue of the lift equal to ``target``."""
    base = check_lift(lift, rmap, target, check_qflat)
    S = lift.ring
    diff = S.sub(S.pow(lift.q, N), S.one())
    q_reduces = rmap.raw(lift.q) == target.q
    return QLiftCheck(
        base.flat_over_S,
        not S.is_zero(diff),
        S.format(diff),
        S.is_zero(S.mul(diff, diff)),
        base.reduction_matches and q_reduces,
        q_reduces,
        base.flatness,
        base.reduction,
        base.mismatch,
    )
