"""Flat connections in characteristic p, their p-curvature and p-support.

A connection of rank ``n`` on affine ``r``-space is given by matrices
``a_1..a_r`` with polynomial entries in ``x1..xr``; its operators are
``nabla_j = d_j + a_j``.  The p-curvature ``C_j = nabla_j^p`` is a matrix of
functions, and the invariants of the commuting family ``C`` live in the
Frobenius-twisted variables ``X_i = x_i^p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb, perm
from typing import Sequence

from .errors import (
    CandidateRejected,
    CharZero,
    ModeInapplicable,
    NotFlat,
    OracleMismatch,
    RewriteFailed,
    RingMismatch,
    ShapeMismatch,
)
from .multipoly import LaurentPoly, PolyMatrix, PolyRing, RatFunc, fraction_free_rank
from .psupport import PoissonStructure, SupportIdeal
from .rings import Ring, is_prime


def x_names(r):
    return tuple(f"x{i}" for i in range(1, r + 1))


def big_x_names(r):
    return tuple(f"X{i}" for i in range(1, r + 1))


# --- Weyl algebra --------------------------------------------------------

class WeylElement:
    """Element of the Weyl algebra in normal order ``sum c x^a d^b``.

    ``terms`` maps the concatenated exponent tuple ``a + b`` to a raw
    coefficient of ``ring``.
    """

    __slots__ = ("ring", "r", "terms")

    def __init__(self, ring: Ring, r: int, terms: dict | None = None):
        self.ring = ring
        self.r = r
        self.terms = {k: v for k, v in (terms or {}).items() if not ring.is_zero(v)}

    @classmethod
    def x(cls, ring, r, i):
        e = [0] * (2 * r)
        e[i] = 1
        return cls(ring, r, {tuple(e): ring.one()})

    @classmethod
    def d(cls, ring, r, i, power=1):
        e = [0] * (2 * r)
        e[r + i] = power
        return cls(ring, r, {tuple(e): ring.one()})

    @classmethod
    def scalar(cls, ring, r, c):
        return cls(ring, r, {(0,) * (2 * r): ring.coerce(c)})

    @classmethod
    def from_poly(cls, f: LaurentPoly):
        r = f.ring.nvars
        return cls(f.ring.coeffs, r, {e + (0,) * r: c for e, c in f.terms.items()})

    def _check(self, other):
        if not isinstance(other, WeylElement):
            return False
        if other.ring != self.ring or other.r != self.r:
            raise RingMismatch("Weyl elements over different algebras")
        return True

    def __add__(self, other):
        if not self._check(other):
            return NotImplemented
        R = self.ring
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = R.add(out[k], v) if k in out else v
        return WeylElement(R, self.r, out)

    def __neg__(self):
        return WeylElement(self.ring, self.r, {k: self.ring.neg(v) for k, v in self.terms.items()})

    def __sub__(self, other):
        if not self._check(other):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if not self._check(other):
            return NotImplemented
        R, r = self.ring, self.r
        out = {}
        for k1, c1 in self.terms.items():
            a, b = k1[:r], k1[r:]
            for k2, c2 in other.terms.items():
                c, d = k2[:r], k2[r:]
                for k, factor in _leibniz_terms(b, c):
                    coeff = R.smul(factor, R.mul(c1, c2))
                    if R.is_zero(coeff):
                        continue
                    key = tuple(ai + ci - ki for ai, ci, ki in zip(a, c, k)) + \
                        tuple(bi + di - ki for bi, di, ki in zip(b, d, k))
                    out[key] = R.add(out[key], coeff) if key in out else coeff
        return WeylElement(R, r, out)

    def __pow__(self, e: int):
        acc = WeylElement.scalar(self.ring, self.r, 1)
        for _ in range(e):
            acc = acc * self
        return acc

    def __eq__(self, other):
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self.ring == other.ring and self.r == other.r and self.terms == other.terms

    def __hash__(self):
        return hash((self.r, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    def order(self) -> int:
        """Total order in the derivatives."""
        return max((sum(k[self.r:]) for k in self.terms), default=-1)

    def function_part(self, ring: PolyRing) -> LaurentPoly:
        """The order-zero part as a polynomial in ``ring``."""
        r = self.r
        return LaurentPoly(ring, {k[:r]: v for k, v in self.terms.items() if not any(k[r:])})

    def __str__(self):
        r = self.r
        names = x_names(r) + tuple(f"d{i}" for i in range(1, r + 1))
        parts = []
        for k in sorted(self.terms, key=lambda e: (sum(e[r:]), sum(e), e)):
            mono = "*".join(n if v == 1 else f"{n}^{v}" for n, v in zip(names, k) if v)
            c = self.ring.format(self.terms[k])
            parts.append(mono if c == "1" and mono else (f"{c}*{mono}" if mono else c))
        return " + ".join(parts) or "0"

    __repr__ = __str__


def _leibniz_terms(b, c):
    """Pairs (k, factor) with d^b x^c = sum factor x^(c-k) d^(b-k)."""
    ranges = [range(min(bi, ci) + 1) for bi, ci in zip(b, c)]
    out = [((), 1)]
    for i, rg in enumerate(ranges):
        nxt = []
        for k, f in out:
            for ki in rg:
                nxt.append((k + (ki,), f * comb(b[i], ki) * perm(c[i], ki)))
        out = nxt
    return out


def weyl_multiply(d1: WeylElement, d2: WeylElement) -> WeylElement:
    return d1 * d2


def _weyl_matmul(A, B):
    n = len(A)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = A[i][0] * B[0][j]
            for k in range(1, n):
                acc = acc + A[i][k] * B[k][j]
            row.append(acc)
        out.append(row)
    return out


# --- connections ---------------------------------------------------------

class Connection:
    """``nabla_j = d_j + a_j`` with polynomial matrices ``a_j``.

    Parameters
    ----------
    ring : Ring
        Coefficient ring (a field of characteristic p, or a lift ring S).
    matrices : list
        One PolyMatrix (or nested list of polynomial strings) per direction.
    """

    def __init__(self, ring: Ring, matrices: Sequence, names: Sequence[str] | None = None):
        if not matrices:
            raise ShapeMismatch("a connection needs at least one direction")
        self.r = len(matrices)
        self.xring = PolyRing(ring, names or x_names(self.r))
        self.ring = ring
        mats = []
        for m in matrices:
            if not isinstance(m, PolyMatrix):
                m = PolyMatrix.from_strings(self.xring, m)
            elif m.ring != self.xring:
                m = m.change_ring(self.xring)
            mats.append(m)
        self.n = mats[0].n
        if any(m.n != self.n for m in mats):
            raise ShapeMismatch("all a_j must have the same size")
        if any(m.is_rational for m in mats):
            raise ShapeMismatch("connection matrices must have polynomial entries")
        for m in mats:
            for e in m.entries():
                if any(x < 0 for t in e.terms for x in t):
                    raise ShapeMismatch("connection matrices must have polynomial entries")
        self.a = mats

    def __repr__(self):
        return f"Connection(r={self.r}, n={self.n}, ring={self.ring!r})"

    def residual(self, i: int, j: int) -> PolyMatrix:
        """``d_i a_j - d_j a_i + [a_i, a_j]`` (0-based directions)."""
        ai, aj = self.a[i], self.a[j]
        return aj.diff(i) - ai.diff(j) + ai * aj - aj * ai

    def gauge(self, g: PolyMatrix, g_inv: PolyMatrix | None = None) -> "Connection":
        """Gauge transform ``a_j -> g a_j g^-1 - (d_j g) g^-1``."""
        g_inv = g_inv if g_inv is not None else g.inverse()
        return Connection(self.ring, [g * a * g_inv - g.diff(j) * g_inv for j, a in enumerate(self.a)],
                          self.xring.names)

    @classmethod
    def direct_sum(cls, *conns: "Connection") -> "Connection":
        first = conns[0]
        mats = [PolyMatrix.block_diag(*(c.a[j] for c in conns)) for j in range(first.r)]
        return cls(first.ring, mats, first.xring.names)


@dataclass
class FlatCheck:
    flat: bool
    witness: PolyMatrix | None = None
    pair: tuple | None = None

    def to_json(self):
        return {
            "flat": self.flat,
            "pair": None if self.pair is None else list(self.pair),
            "witness": None if self.witness is None else self.witness.to_strings(),
        }


def check_flat(c: Connection) -> FlatCheck:
    """All identities ``d_i a_j - d_j a_i + [a_i, a_j] = 0`` for ``i < j``."""
    for i, j in combinations(range(c.r), 2):
        res = c.residual(i, j)
        if not res.is_zero():
            return FlatCheck(False, res, (i + 1, j + 1))
    return FlatCheck(True)


# --- curvature families --------------------------------------------------

class CurvatureFamily:
    """Commuting curvature matrices ``C_j`` and their rewriting over ``X``.

    Shared by the differential (``kind="differential"``, exponent ``p``) and
    difference (``kind="q"``, exponent ``N``) settings.
    """

    def __init__(self, C: Sequence[PolyMatrix], order: int, kind: str = "differential", q=None):
        self.C = list(C)
        self.order = order
        self.kind = kind
        self.q = q
        self.xring = self.C[0].ring
        self.r = self.xring.nvars
        self.n = self.C[0].n
        self.coeffs = self.xring.coeffs
        self.rename = {x: X for x, X in zip(self.xring.names, big_x_names(self.r))}
        self.Xring = PolyRing(self.coeffs, big_x_names(self.r), self.xring.laurent)
        try:
            self.X = [m.map(self._rewrite, self.Xring) for m in self.C]
        except RewriteFailed:
            self.X = None

    def __repr__(self):
        return f"CurvatureFamily({self.kind}, order={self.order}, r={self.r}, n={self.n})"

    def _rewrite(self, f):
        return f.rewrite_power(self.order, self.rename, self.Xring)

    def rewrite(self, f):
        """Express an invariant function of ``x`` in the variables ``X``."""
        return self._rewrite(f)

    def pullback(self, f):
        """Substitute ``X_i = x_i^order``."""
        inv = {X: x for x, X in self.rename.items()}
        if isinstance(f, (int,)):
            return self.xring.constant(f)
        return f.pullback_power(self.order, inv, self.xring)

    def commute(self) -> bool:
        return all((a * b - b * a).is_zero() for a, b in combinations(self.C, 2))

    def t_ring(self) -> PolyRing:
        r = self.r
        names = self.xring.names + tuple(f"t{i}" for i in range(1, r + 1))
        return PolyRing(self.coeffs, names, self.xring.laurent + (False,) * r)

    def pencil(self) -> PolyMatrix:
        """``sum_j t_j C_j`` over the ring with extra variables ``t``."""
        R = self.t_ring()
        acc = PolyMatrix.zero(R, self.n)
        for j, m in enumerate(self.C):
            acc = acc + m.change_ring(R) * R.gen(f"t{j + 1}")
        return acc

    def pencil_charpoly_coefficients(self):
        """Coefficients ``c_1..c_n`` of ``det(lambda - sum t_j C_j)`` in ``x`` and ``t``."""
        return self.pencil().charpoly_coefficients()[1:]

    def invariants_hold(self) -> bool:
        """Charpoly coefficients of the pencil are killed by every ``d_i``
        (differential) or fixed by every ``T_i`` (q)."""
        coeffs = self.pencil_charpoly_coefficients()
        for c in coeffs:
            for i in range(self.r):
                if self.kind == "differential":
                    if not c.diff(i).is_zero():
                        return False
                elif c.q_shift(i, self.q) != c:
                    return False
        return True

    def charpoly(self, j: int):
        """Coefficients of ``det(lambda - C_j)`` (0-based direction)."""
        return self.C[j].charpoly_coefficients()

    def to_json(self):
        out = {"order": self.order, "C": [m.to_strings() for m in self.C]}
        out["C_X"] = None if self.X is None else [m.to_strings() for m in self.X]
        return out


def _check_char_p(ring: Ring) -> int:
    p = ring.characteristic
    if p == 0:
        raise CharZero("p-curvature needs positive characteristic")
    if not is_prime(p):
        raise CharZero(f"characteristic {p} is not prime")
    return p


def p_curvature(c: Connection, oracle: bool = False) -> CurvatureFamily:
    """p-curvature by p-fold application ``M -> d_j M + a_j M`` to the identity.

    For rank 1 the closed form ``d^(p-1) a + a^p`` is always compared.  With
    ``oracle=True`` the operator ``(d_j + a_j)^p`` is also expanded in the
    matrix Weyl algebra and checked to equal ``d_j^p + C_j``.
    """
    p = _check_char_p(c.ring)
    fl = check_flat(c)
    if not fl.flat:
        raise NotFlat(f"connection is not flat: residual at {fl.pair} is {fl.witness}")
    Cs = []
    for j, a in enumerate(c.a):
        M = PolyMatrix.identity(c.xring, c.n)
        for _ in range(p):
            M = M.diff(j) + a * M
        if c.n == 1:
            entry = a[0, 0]
            closed = entry.diff(j, p - 1) + entry ** p
            if closed != M[0, 0]:
                raise OracleMismatch(f"closed rank-1 formula disagrees in direction {j + 1}")
        if oracle:
            _weyl_oracle(c, j, M, p)
        Cs.append(M)
    fam = CurvatureFamily(Cs, p, "differential")
    if not fam.commute():
        raise OracleMismatch("p-curvature matrices do not commute")
    return fam


def _weyl_oracle(c: Connection, j: int, C: PolyMatrix, p: int):
    R, r, n = c.ring, c.r, c.n
    zero = WeylElement(R, r)
    dj = WeylElement.d(R, r, j)
    op = [[(dj if i == k else zero) + WeylElement.from_poly(c.a[j][i, k]) for k in range(n)]
          for i in range(n)]
    acc = op
    for _ in range(p - 1):
        acc = _weyl_matmul(acc, op)
    djp = WeylElement.d(R, r, j, p)
    for i in range(n):
        for k in range(n):
            expect = WeylElement.from_poly(C[i, k]) + (djp if i == k else zero)
            if acc[i][k] != expect:
                raise OracleMismatch(f"Weyl-algebra expansion disagrees in direction {j + 1}, entry ({i + 1},{k + 1})")


# --- support equations ---------------------------------------------------

def support_ambient(family: CurvatureFamily) -> PolyRing:
    r = family.r
    names = big_x_names(r) + tuple(f"P{i}" for i in range(1, r + 1))
    laurent = family.xring.laurent + family.xring.laurent
    return PolyRing(family.coeffs, names, laurent)


def support_generators(family: CurvatureFamily) -> list:
    """Coefficients of every t-monomial in ``charpoly(sum t_j C_j)(sum t_j P_j)``.

    Returned in k[X, P]; x-exponents are rewritten over X.
    """
    r, n = family.r, family.n
    base = family.t_ring()
    R = base.extend([f"P{i}" for i in range(1, r + 1)], family.xring.laurent)
    coeffs = [c.change_ring(R) for c in family.pencil().charpoly_coefficients()]
    lam = R.zero()
    for j in range(r):
        lam = lam + R.gen(f"t{j + 1}") * R.gen(f"P{j + 1}")
    chi = R.zero()
    for i, c in enumerate(coeffs):
        chi = chi + c * lam ** (n - i)
    amb = support_ambient(family)
    groups = {}
    for e, v in chi.terms.items():
        x, t, P = e[:r], e[r:2 * r], e[2 * r:]
        for k, xi in enumerate(x):
            if xi % family.order:
                raise RewriteFailed(f"exponent {xi} of x{k + 1} in the support equations "
                                    f"is not divisible by {family.order}")
        key = tuple(xi // family.order for xi in x) + P
        groups.setdefault(t, {})[key] = v
    out = []
    for t in sorted(groups, key=lambda e: (sum(e), tuple(-x for x in e))):
        out.append(LaurentPoly(amb, groups[t]))
    return out


def support_equations(family: CurvatureFamily) -> SupportIdeal:
    """The p-support equations as an ideal of k[X, P] with the canonical bracket."""
    return SupportIdeal(support_ambient(family), support_generators(family),
                        PoissonStructure.canonical(), family.r)


# --- eigenvalue forms ----------------------------------------------------

PROVENANCES = ("rank1", "triangular", "user_verified", "trace_mean")


@dataclass
class EigenForm:
    """A tuple of joint eigenvalues ``Lambda_1..Lambda_r`` over ``X``.

    When ``family`` is given, each component is checked to be a root of the
    characteristic polynomial of the matching ``C_j`` (skipped for
    ``trace_mean``, which is a sum of eigenvalues rather than one).
    """

    values: tuple
    multiplicity: int = 1
    provenance: str = "user_verified"
    family: CurvatureFamily | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        self.values = tuple(self.values)
        if self.family is not None and self.provenance != "trace_mean":
            for j, lam in enumerate(self.values):
                if not _is_root(self.family, j, lam):
                    raise CandidateRejected(f"component {j + 1} is not an eigenvalue of C_{j + 1}", j + 1)

    @property
    def ring(self) -> PolyRing:
        return self.values[0].ring

    def to_json(self):
        return {"values": [str(v) for v in self.values], "multiplicity": self.multiplicity,
                "provenance": self.provenance}


def _is_root(family, j, lam):
    coeffs = family.charpoly(j)
    x = family.pullback(lam)
    acc = RatFunc(family.xring.zero()) if isinstance(x, RatFunc) else family.xring.zero()
    for c in coeffs:
        acc = acc * x + c
    return acc.is_zero()


def parse_form(ring: PolyRing, values) -> tuple:
    return tuple(ring.parse(v) if isinstance(v, str) else v for v in values)


def eigenvalue_forms(family: CurvatureFamily, mode: str = "rank1", candidates=None) -> list:
    """Joint eigenvalue tuples of the family.

    ``rank1`` reads off the single entry, ``triangular`` collects diagonal
    tuples of simultaneously upper-triangular matrices, and ``verify``
    checks user candidates (tuples of polynomials or strings in X).
    """
    if mode == "rank1":
        if family.n != 1:
            raise ModeInapplicable(f"rank1 mode needs n = 1, got n = {family.n}")
        vals = tuple(family.rewrite(m[0, 0]) for m in family.C)
        return [EigenForm(vals, 1, "rank1", family)]
    if mode == "triangular":
        if not all(m.is_upper_triangular() for m in family.C):
            raise ModeInapplicable("curvature matrices are not simultaneously upper-triangular")
        counts = {}
        for i in range(family.n):
            key = tuple(family.rewrite(m[i, i]) for m in family.C)
            counts[key] = counts.get(key, 0) + 1
        return [EigenForm(k, v, "triangular", family) for k, v in counts.items()]
    if mode == "verify":
        if not candidates:
            raise ModeInapplicable("verify mode needs candidate tuples")
        out = []
        for cand in candidates:
            vals = parse_form(family.Xring, cand)
            if len(vals) != family.r:
                raise ShapeMismatch(f"candidate has {len(vals)} components for r = {family.r}")
            out.append(verify_candidate(family, vals))
        return out
    raise ModeInapplicable(f"unknown eigenvalue mode {mode!r}")


def verify_candidate(family: CurvatureFamily, values) -> EigenForm:
    """Accept ``values`` if every ``det(C_j - Lambda_j)`` vanishes and the
    joint kernel is nonzero over the fraction field."""
    rows = []
    for j, lam in enumerate(values):
        shifted = family.C[j] - PolyMatrix.scalar(family.xring, family.n, family.pullback(lam))
        if not shifted.det().is_zero():
            raise CandidateRejected(f"det(C_{j + 1} - Lambda_{j + 1}) is not zero", j + 1)
        rows.extend(list(r) for r in shifted.rows)
    if fraction_free_rank(rows) >= family.n:
        raise CandidateRejected("the joint kernel is zero", None)
    # multiplicity: dimension of the joint kernel
    mult = family.n - fraction_free_rank(rows)
    return EigenForm(tuple(values), mult, "user_verified", family)


def trace_form(family: CurvatureFamily) -> EigenForm:
    """``(Tr C_1, ..., Tr C_r)`` over X; equals ``n Lambda`` when all eigenvalues agree."""
    vals = tuple(family.rewrite(m.trace()) for m in family.C)
    return EigenForm(vals, family.n, "trace_mean", family)


@dataclass
class LagrangianVerdict:
    lagrangian: bool
    witness: dict | None = None

    def to_json(self):
        return {"lagrangian": self.lagrangian, "witness": self.witness}


def closedness_residual(form: EigenForm, i: int, j: int):
    """``d Lambda_j / d X_i - d Lambda_i / d X_j`` (0-based)."""
    vals = form.values
    return vals[j].diff(i) - vals[i].diff(j)


def is_lagrangian_differential(forms: Sequence[EigenForm]) -> LagrangianVerdict:
    """Closedness of every ``Lambda = sum Lambda_j dX_j``."""
    if not forms:
        raise ValueError("at least one eigenvalue form is required")
    for k, form in enumerate(forms):
        r = len(form.values)
        for i, j in combinations(range(r), 2):
            res = closedness_residual(form, i, j)
            if not res.is_zero():
                if isinstance(res, RatFunc):
                    res = res.simplify()
                return LagrangianVerdict(False, {"form": k, "pair": [i + 1, j + 1], "residual": str(res)})
    return LagrangianVerdict(True)


def graph_ideal(form: EigenForm, structure: PoissonStructure | None = None) -> SupportIdeal:
    """The ideal ``(P_j - Lambda_j)`` of a polynomial eigenvalue form."""
    r = len(form.values)
    Xr = form.values[0].ring
    names = big_x_names(r) + tuple(f"P{i}" for i in range(1, r + 1))
    amb = PolyRing(Xr.coeffs, names, Xr.laurent + Xr.laurent)
    gens = []
    for j, lam in enumerate(form.values):
        if isinstance(lam, RatFunc):
            lam = lam.to_poly()
            if lam is None:
                raise ModeInapplicable("graph ideals need polynomial eigenvalues")
        gens.append(amb.gen(f"P{j + 1}") - lam.change_ring(amb))
    return SupportIdeal(amb, gens, structure or PoissonStructure.canonical(), r)


# --- liftability ---------------------------------------------------------

@dataclass
class LiftCheck:
    flat_over_S: bool
    reduction_matches: bool
    flatness: FlatCheck
    reduction: list
    mismatch: tuple | None = None

    def to_json(self):
        return {
            "flat_over_S": self.flat_over_S,
            "reduction_matches": self.reduction_matches,
            "flatness": self.flatness.to_json(),
            "reduction": [m.to_strings() for m in self.reduction],
            "mismatch": None if self.mismatch is None else list(self.mismatch),
        }


def reduce_matrix(m: PolyMatrix, rmap, target: PolyRing) -> PolyMatrix:
    return m.map(lambda f: f.map_coefficients(rmap.raw, target), target)


def check_lift(lift, rmap, target, flat_check=check_flat) -> LiftCheck:
    """Flatness of ``lift`` over S and entrywise ``residue(lift) == target``.

    Works for differential and q-connections alike (``flat_check`` selects
    the flatness test).
    """
    if lift.r != target.r or lift.n != target.n:
        raise ShapeMismatch(f"lift is r={lift.r}, n={lift.n}; target is r={target.r}, n={target.n}")
    if rmap.source != lift.ring or rmap.target != target.ring:
        raise ShapeMismatch("residue map does not connect the two coefficient rings")
    fl = flat_check(lift)
    reduced = [reduce_matrix(m, rmap, target.xring) for m in lift.a]
    mismatch = None
    for j, (m, t) in enumerate(zip(reduced, target.a)):
        if m != t:
            for a in range(m.n):
                for b in range(m.n):
                    if m[a, b] != t[a, b]:
                        mismatch = (j + 1, a + 1, b + 1)
                        break
                if mismatch:
                    break
            break
    return LiftCheck(fl.flat, mismatch is None, fl, reduced, mismatch)
