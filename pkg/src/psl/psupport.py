"""Commutative side: Gröbner bases, Poisson brackets and Lagrangian certificates.

Ideals live in an ordinary polynomial ring over a field.  Laurent generators
(torus coordinates) are moved to the affine chart by clearing their minimal
monomial, which is harmless for the brackets used here because log-canonical
brackets of polynomials are polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .errors import AmbientMismatch, NotAField, TagMismatch, UnitIdeal
from .multipoly import LaurentPoly, PolyRing, RatFunc

CAVEAT = "with respect to the given generators; the radical is not computed"


# --- monomial orders ------------------------------------------------------

def _grlex(e):
    return (sum(e), e)


def _lex(e):
    return e


def _grevlex(e):
    return (sum(e), tuple(-x for x in reversed(e)))


ORDERS = {"grlex": _grlex, "lex": _lex, "grevlex": _grevlex}


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


class _Engine:
    """Raw-dict polynomial arithmetic for a fixed field and order."""

    def __init__(self, ring: PolyRing, order: str):
        if order not in ORDERS:
            raise ValueError(f"unknown monomial order {order!r}")
        self.ring = ring
        self.K = ring.coeffs
        if not self.K.is_field:
            raise NotAField(f"Gröbner bases need a field, got {self.K}")
        self.key = ORDERS[order]

    def lead(self, f):
        return max(f, key=self.key)

    def monic(self, f):
        K = self.K
        lc = f[self.lead(f)]
        if K.is_one(lc):
            return f
        inv = K.inv(lc)
        return {e: K.mul(c, inv) for e, c in f.items()}

    def sub_scaled(self, f, c, shift, g):
        """``f - c * x^shift * g`` in place."""
        K = self.K
        for e, v in g.items():
            key = tuple(a + b for a, b in zip(e, shift))
            nv = K.sub(f.get(key, K.zero()), K.mul(c, v))
            if K.is_zero(nv):
                f.pop(key, None)
            else:
                f[key] = nv
        return f

    def reduce(self, f, basis, leads):
        """Full normal form of ``f`` modulo monic ``basis``."""
        f = dict(f)
        rem = {}
        while f:
            lm = self.lead(f)
            c = f[lm]
            for g, lg in zip(basis, leads):
                if _divides(lg, lm):
                    self.sub_scaled(f, c, _sub(lm, lg), g)
                    break
            else:
                rem[lm] = c
                del f[lm]
        return rem

    def spoly(self, f, g, lf, lg):
        m = _lcm(lf, lg)
        out = {}
        self.sub_scaled(out, self.K.neg(self.K.one()), _sub(m, lf), f)
        self.sub_scaled(out, self.K.one(), _sub(m, lg), g)
        return out

    def buchberger(self, gens):
        basis = [self.monic(g) for g in gens if g]
        leads = [self.lead(g) for g in basis]
        pairs = {(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))}
        while pairs:
            i, j = min(pairs, key=lambda ij: (self.key(_lcm(leads[ij[0]], leads[ij[1]])), ij))
            pairs.discard((i, j))
            li, lj = leads[i], leads[j]
            m = _lcm(li, lj)
            # coprime leading monomials: the S-polynomial reduces to zero
            if all(x == 0 or y == 0 for x, y in zip(li, lj)):
                continue
            if self._chain(i, j, m, leads, pairs):
                continue
            h = self.reduce(self.spoly(basis[i], basis[j], li, lj), basis, leads)
            if h:
                h = self.monic(h)
                basis.append(h)
                leads.append(self.lead(h))
                k = len(basis) - 1
                pairs.update((a, k) for a in range(k))
        return self.interreduce(basis)

    @staticmethod
    def _chain(i, j, m, leads, pairs):
        for k, lk in enumerate(leads):
            if k in (i, j) or not _divides(lk, m):
                continue
            if (min(i, k), max(i, k)) not in pairs and (min(j, k), max(j, k)) not in pairs:
                return True
        return False

    def interreduce(self, basis):
        basis = [g for g in basis if g]
        leads = [self.lead(g) for g in basis]
        keep = []
        for i, li in enumerate(leads):
            dominated = any(
                _divides(lj, li) and (lj != li or j < i)
                for j, lj in enumerate(leads) if j != i
            )
            if not dominated:
                keep.append(i)
        basis = [basis[i] for i in keep]
        out = []
        for i, g in enumerate(basis):
            others = basis[:i] + basis[i + 1:]
            r = self.reduce(g, others, [self.lead(h) for h in others])
            out.append(self.monic(r))
        out.sort(key=lambda g: self.key(self.lead(g)))
        return out


# --- public API ----------------------------------------------------------

def _affine(ring: PolyRing) -> PolyRing:
    return PolyRing(ring.coeffs, ring.names, False)


def clear_denominators(f, ambient: PolyRing) -> LaurentPoly:
    """Scale ``f`` by a monomial (and a denominator) into ``ambient``'s polynomial chart."""
    if isinstance(f, RatFunc):
        f = f.num
    if f.ring.names != ambient.names:
        raise AmbientMismatch(f"{f.ring.names} vs {ambient.names}")
    shift = f.min_exponents()
    terms = {tuple(x - min(s, 0) for x, s in zip(e, shift)): c for e, c in f.terms.items()}
    return LaurentPoly(ambient, terms)


class GroebnerBasis:
    """A reduced Gröbner basis together with its monomial order."""

    def __init__(self, ring: PolyRing, polys: Sequence[LaurentPoly], order: str = "grlex"):
        self.ring = ring
        self.order = order
        self.polys = tuple(polys)
        self._engine = _Engine(ring, order)
        self._raw = [p.terms for p in self.polys]
        self._leads = [self._engine.lead(t) for t in self._raw]

    def __iter__(self):
        return iter(self.polys)

    def __len__(self):
        return len(self.polys)

    def __repr__(self):
        return f"GroebnerBasis([{', '.join(map(str, self.polys))}], order={self.order!r})"

    def is_unit_ideal(self) -> bool:
        return any(all(x == 0 for x in lm) for lm in self._leads)

    def leading_monomials(self):
        return list(self._leads)

    def normal_form(self, f: LaurentPoly) -> LaurentPoly:
        f = self._coerce(f)
        return LaurentPoly(self.ring, self._engine.reduce(f.terms, self._raw, self._leads))

    def _coerce(self, f):
        if isinstance(f, RatFunc):
            f = f.to_poly()
        if f.ring.names != self.ring.names or f.ring.coeffs != self.ring.coeffs:
            raise AmbientMismatch(f"{f.ring.names} over {f.ring.coeffs} vs {self.ring.names}")
        if f.ring != self.ring:
            if any(x < 0 for e in f.terms for x in e):
                raise AmbientMismatch("Laurent element outside the polynomial chart")
            f = LaurentPoly(self.ring, dict(f.terms))
        return f

    def s_polynomials_reduce(self) -> bool:
        """Buchberger's criterion, checked on every pair."""
        eng = self._engine
        for (f, lf), (g, lg) in combinations(zip(self._raw, self._leads), 2):
            if eng.reduce(eng.spoly(f, g, lf, lg), self._raw, self._leads):
                return False
        return True

    def is_reduced(self) -> bool:
        K = self.ring.coeffs
        for i, (f, lf) in enumerate(zip(self._raw, self._leads)):
            if not K.is_one(f[lf]):
                return False
            for j, lg in enumerate(self._leads):
                if j != i and any(_divides(lg, e) for e in f):
                    return False
        return True


def groebner_basis(gens: Sequence[LaurentPoly], order: str = "grlex", ring: PolyRing | None = None) -> GroebnerBasis:
    """Reduced Gröbner basis by Buchberger's algorithm with both criteria.

    >>> from psl.rings import PrimeField
    >>> R = PolyRing(PrimeField(5), ("x", "y"))
    >>> list(map(str, groebner_basis([R("x + y"), R("x - y")])))
    ['y', 'x']
    """
    gens = [g.to_poly() if isinstance(g, RatFunc) else g for g in gens]
    if ring is None:
        if not gens:
            raise ValueError("cannot infer the ambient ring of an empty generator list")
        ring = _affine(gens[0].ring)
    eng = _Engine(ring, order)
    raw = []
    for g in gens:
        if g.ring.names != ring.names:
            raise AmbientMismatch(f"{g.ring.names} vs {ring.names}")
        raw.append(clear_denominators(g, ring).terms)
    basis = eng.buchberger(raw)
    return GroebnerBasis(ring, [LaurentPoly(ring, b) for b in basis], order)


@dataclass(frozen=True)
class Membership:
    member: bool
    normal_form: LaurentPoly


def ideal_membership(f: LaurentPoly, gb: GroebnerBasis) -> Membership:
    nf = gb.normal_form(f)
    return Membership(nf.is_zero(), nf)


def krull_dimension(gb: GroebnerBasis) -> int:
    """Dimension of ``k[vars]/I`` from the leading monomials of a Gröbner basis.

    The largest set of variables containing the support of no leading
    monomial is a maximal independent set; its size is the dimension.
    """
    if gb.is_unit_ideal():
        raise UnitIdeal("the ideal is the whole ring")
    n = gb.ring.nvars
    supports = [frozenset(i for i, x in enumerate(lm) if x) for lm in gb.leading_monomials()]
    for size in range(n, -1, -1):
        for subset in combinations(range(n), size):
            s = frozenset(subset)
            if not any(sup <= s for sup in supports):
                return size
    return 0


# --- Poisson structures --------------------------------------------------

@dataclass(frozen=True)
class PoissonStructure:
    """Either the canonical structure on (X, P) or a log-canonical one.

    For ``log_canonical`` the skew matrix ``matrix[i][j]`` gives
    ``{v_i, v_j} = matrix[i][j] v_i v_j``.
    """

    kind: str
    matrix: tuple = ()

    def __post_init__(self):
        if self.kind not in ("canonical", "log_canonical"):
            raise TagMismatch(f"unknown Poisson structure {self.kind!r}")
        if self.kind == "log_canonical":
            m = tuple(tuple(int(x) for x in row) for row in self.matrix)
            if any(len(row) != len(m) for row in m):
                raise TagMismatch("log-canonical matrix must be square")
            if any(m[i][j] != -m[j][i] for i in range(len(m)) for j in range(len(m))):
                raise TagMismatch("log-canonical matrix must be skew-symmetric")
            object.__setattr__(self, "matrix", m)

    @classmethod
    def canonical(cls):
        return cls("canonical")

    @classmethod
    def log_canonical(cls, matrix):
        return cls("log_canonical", matrix)

    @classmethod
    def torus(cls, r: int):
        """``{P_i, X_j} = delta_ij P_i X_j`` on variables ordered X1..Xr, P1..Pr."""
        m = [[0] * (2 * r) for _ in range(2 * r)]
        for i in range(r):
            m[r + i][i] = 1
            m[i][r + i] = -1
        return cls("log_canonical", m)

    def to_json(self):
        if self.kind == "canonical":
            return "canonical"
        return {"log_canonical": [list(row) for row in self.matrix]}

    @classmethod
    def from_json(cls, obj):
        if obj == "canonical":
            return cls.canonical()
        if isinstance(obj, dict) and "log_canonical" in obj:
            return cls.log_canonical(obj["log_canonical"])
        raise TagMismatch(f"unknown Poisson structure {obj!r}")


def canonical_pairs(ring: PolyRing):
    """Index pairs (X_i, P_i) of a canonical ambient X1..Xr, P1..Pr."""
    names = ring.names
    if len(names) % 2:
        raise TagMismatch("canonical structure needs variables X1..Xr, P1..Pr")
    r = len(names) // 2
    expect = tuple(f"X{i}" for i in range(1, r + 1)) + tuple(f"P{i}" for i in range(1, r + 1))
    if names != expect:
        raise TagMismatch(f"canonical structure needs variables {expect}, got {names}")
    return [(i, r + i) for i in range(r)]


def poisson_bracket(f, g, structure: PoissonStructure):
    if isinstance(f, RatFunc) or isinstance(g, RatFunc):
        ring = f.ring
    else:
        ring = f.ring
    if g.ring != ring:
        raise AmbientMismatch(f"{f.ring.names} vs {g.ring.names}")
    if structure.kind == "canonical":
        acc = ring.zero()
        for xi, pi in canonical_pairs(ring):
            acc = acc + f.diff(pi) * g.diff(xi) - f.diff(xi) * g.diff(pi)
        return acc
    lam = structure.matrix
    if len(lam) != ring.nvars:
        raise TagMismatch(f"log-canonical matrix of size {len(lam)} for {ring.nvars} variables")
    grads_f = [f.diff(i) for i in range(ring.nvars)]
    grads_g = [g.diff(i) for i in range(ring.nvars)]
    gens = ring.gens()
    acc = ring.zero()
    for i, j in combinations(range(ring.nvars), 2):
        if lam[i][j]:
            inner = grads_f[i] * grads_g[j] - grads_f[j] * grads_g[i]
            if not inner.is_zero():
                acc = acc + inner * gens[i] * gens[j] * lam[i][j]
    return acc


# --- support ideals and certificates -------------------------------------

@dataclass
class SupportIdeal:
    """Generators of a support in k[X, P] (or torus coordinates), with a bracket."""

    ambient: PolyRing
    generators: list
    structure: PoissonStructure
    r: int

    def __post_init__(self):
        chart = _affine(self.ambient)
        gens = []
        for g in self.generators:
            if isinstance(g, str):
                g = self.ambient.parse(g)
            if g.is_zero():
                continue
            gens.append(clear_denominators(g, chart))
        self.generators = gens
        self.chart = chart
        if self.structure.kind == "canonical":
            canonical_pairs(self.ambient)
        elif len(self.structure.matrix) != self.ambient.nvars:
            raise TagMismatch("log-canonical matrix does not match the ambient")

    def strings(self):
        return [str(g) for g in self.generators]

    def groebner(self, order="grlex") -> GroebnerBasis:
        if not self.generators:
            return GroebnerBasis(self.chart, [], order)
        return groebner_basis(self.generators, order, self.chart)


def pth_root(f: LaurentPoly, p: int):
    """The ``g`` with ``g^p = f`` over a finite field of characteristic ``p``, or None."""
    K = f.ring.coeffs
    if K.characteristic != p or not K.is_field:
        return None
    if any(x % p for e in f.terms for x in e):
        return None
    root_power = K.size() // p
    terms = {tuple(x // p for x in e): K.pow(c, root_power) for e, c in f.terms.items()}
    return LaurentPoly(f.ring, terms)


def extract_pth_roots(gens, p: int):
    out = []
    for g in gens:
        while not g.is_constant():
            h = pth_root(g, p)
            if h is None:
                break
            g = h
        out.append(g)
    return out


@dataclass
class BracketWitness:
    first: LaurentPoly
    second: LaurentPoly
    bracket: LaurentPoly
    normal_form: LaurentPoly

    def to_json(self):
        return {"f": str(self.first), "g": str(self.second),
                "bracket": str(self.bracket), "normal_form": str(self.normal_form)}


@dataclass
class LagrangianCertificate:
    lagrangian: bool
    dimension: int
    expected_dimension: int
    coisotropic: bool
    basis: GroebnerBasis
    witness: BracketWitness | None = None
    caveat: str = CAVEAT
    generators: list = field(default_factory=list)

    def to_json(self):
        return {
            "lagrangian": self.lagrangian,
            "dimension": self.dimension,
            "expected_dimension": self.expected_dimension,
            "coisotropic": self.coisotropic,
            "order": self.basis.order,
            "groebner_basis": [str(g) for g in self.basis],
            "generators": [str(g) for g in self.generators],
            "witness": None if self.witness is None else self.witness.to_json(),
            "caveat": self.caveat,
        }


def lagrangian_certificate(ideal: SupportIdeal, order: str = "grlex",
                           pth_roots: int | None = None) -> LagrangianCertificate:
    """Dimension count plus coisotropy test of the given ideal.

    Brackets are taken between the listed generators and reduced modulo the
    Gröbner basis; by the Leibniz rule this decides whether the bracket of
    any two elements of the ideal lies in it.  With ``pth_roots=p`` each
    generator that is a ``p``-th power is first replaced by its root.
    """
    gens = list(ideal.generators)
    if pth_roots:
        gens = extract_pth_roots(gens, pth_roots)
    work = SupportIdeal(ideal.ambient, gens, ideal.structure, ideal.r)
    gb = work.groebner(order)
    dim = krull_dimension(gb)
    witness = None
    for f, g in combinations(work.generators, 2):
        br = poisson_bracket(f, g, ideal.structure)
        nf = gb.normal_form(br)
        if not nf.is_zero():
            witness = BracketWitness(f, g, br, nf)
            break
    coiso = witness is None
    return LagrangianCertificate(coiso and dim == ideal.r, dim, ideal.r, coiso, gb, witness,
                                 generators=list(work.generators))
