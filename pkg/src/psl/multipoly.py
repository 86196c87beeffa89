"""Sparse multivariate Laurent polynomials, fractions of them, and matrices.

A :class:`PolyRing` fixes the coefficient ring and the ordered variable roster
(with a Laurent flag per variable).  :class:`LaurentPoly` stores a dict from
exponent tuples to raw nonzero coefficients.  :class:`RatFunc` is a
numerator/denominator pair compared by cross-multiplication; it is not kept
in lowest terms.  :class:`PolyMatrix` holds square matrices of either kind,
with determinants and characteristic polynomials computed by the
division-free Berkowitz algorithm.
"""

from __future__ import annotations

import operator
from typing import Iterable, Mapping, Sequence

from . import grammar
from .errors import (
    DivisionByZeroPoly,
    NonUnitQ,
    NotInvertible,
    RewriteFailed,
    RingMismatch,
    RosterMismatch,
    SizeMismatch,
    UnknownVariable,
)
from .rings import Ring, RingElement

_add = operator.add


class PolyRing:
    """Coefficient ring plus an ordered roster of variable names."""

    def __init__(self, coeffs: Ring, names: Sequence[str], laurent=False):
        self.coeffs = coeffs
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise RosterMismatch(f"duplicate variable in {self.names}")
        if isinstance(laurent, bool):
            laurent = (laurent,) * len(self.names)
        self.laurent = tuple(bool(x) for x in laurent)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.nvars = len(self.names)
        self.zero_exp = (0,) * self.nvars
        self._key = (coeffs, self.names, self.laurent)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and other._key == self._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"PolyRing({self.coeffs!r}, {self.names})"

    # constructors
    def __call__(self, x) -> "LaurentPoly":
        if isinstance(x, LaurentPoly):
            if x.ring == self:
                return x
            return x.change_ring(self)
        if isinstance(x, str):
            out = self.parse(x)
            if isinstance(out, RatFunc):
                raise RosterMismatch(f"{x!r} is a rational function, not a polynomial")
            return out
        return self.constant(x)

    def constant(self, c) -> "LaurentPoly":
        raw = self.coeffs.coerce(c)
        if self.coeffs.is_zero(raw):
            return LaurentPoly(self, {})
        return LaurentPoly(self, {self.zero_exp: raw})

    def zero(self):
        return LaurentPoly(self, {})

    def one(self):
        return self.constant(1)

    def gen(self, name) -> "LaurentPoly":
        i = self.index[name] if isinstance(name, str) else int(name)
        e = [0] * self.nvars
        e[i] = 1
        return LaurentPoly(self, {tuple(e): self.coeffs.one()})

    def gens(self):
        return tuple(self.gen(i) for i in range(self.nvars))

    def monomial(self, exps, coeff=1) -> "LaurentPoly":
        exps = tuple(int(e) for e in exps)
        if len(exps) != self.nvars:
            raise SizeMismatch(f"exponent vector {exps} for {self.nvars} variables")
        self._check_exps(exps)
        raw = self.coeffs.coerce(coeff)
        return LaurentPoly(self, {} if self.coeffs.is_zero(raw) else {exps: raw})

    def _check_exps(self, e):
        for i, x in enumerate(e):
            if x < 0 and not self.laurent[i]:
                raise NotInvertible(f"negative power of non-Laurent variable {self.names[i]}")

    def variable_index(self, name) -> int:
        if isinstance(name, int):
            if not 0 <= name < self.nvars:
                raise UnknownVariable(f"no variable with index {name}")
            return name
        try:
            return self.index[name]
        except KeyError:
            raise UnknownVariable(f"{name!r} is not in {self.names}") from None

    def parse(self, text: str):
        gen_name = self.coeffs.generator_name

        def ident(name):
            if name in self.index:
                return self.gen(name)
            if name == gen_name:
                return self.constant(self.coeffs.gen())
            raise KeyError(name)

        out = grammar.parse(text, self.constant, ident)
        if isinstance(out, RatFunc) and out.den == self.one():
            return out.num
        return out

    def extend(self, names: Iterable[str], laurent=False) -> "PolyRing":
        new = [n for n in names if n not in self.index]
        if isinstance(laurent, bool):
            laurent = [laurent] * len(new)
        return PolyRing(self.coeffs, self.names + tuple(new), self.laurent + tuple(laurent))

    def with_coeffs(self, coeffs: Ring) -> "PolyRing":
        return PolyRing(coeffs, self.names, self.laurent)

    def renamed(self, mapping: Mapping[str, str]) -> "PolyRing":
        return PolyRing(self.coeffs, [mapping.get(n, n) for n in self.names], self.laurent)


def _format_coeff_term(cstr: str, mono: str) -> str:
    if not mono:
        return cstr
    if cstr == "1":
        return mono
    if cstr == "-1":
        return "-" + mono
    body = cstr[1:] if cstr.startswith("-") else cstr
    if body.isdigit():
        return f"{cstr}*{mono}"
    return f"({cstr})*{mono}"


def _join_terms(parts):
    if not parts:
        return "0"
    out = parts[0]
    for t in parts[1:]:
        if t.startswith("-"):
            out += " - " + t[1:]
        else:
            out += " + " + t
    return out


def _print_key(e):
    return (sum(e), tuple(-x for x in e))


class LaurentPoly:
    """Immutable sparse Laurent polynomial over a :class:`PolyRing`."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # --- coercion ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            if other.ring != self.ring:
                raise RosterMismatch(f"{other.ring} vs {self.ring}")
            return other
        if isinstance(other, (int, RingElement)):
            return self.ring.constant(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return LaurentPoly(self.ring, _add_terms(self.ring.coeffs, self.terms, o.terms))

    __radd__ = __add__

    def __neg__(self):
        R = self.ring.coeffs
        return LaurentPoly(self.ring, {e: R.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return LaurentPoly(self.ring, _add_terms(self.ring.coeffs, self.terms, o.terms, negate=True))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, RingElement)):
            return self.scale(self.ring.coeffs.coerce(other))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return LaurentPoly(self.ring, _mul_terms(self.ring.coeffs, self.terms, o.terms))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self, o)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(o, self)

    def scale(self, raw):
        R = self.ring.coeffs
        if R.is_zero(raw):
            return self.ring.zero()
        out = {}
        for e, c in self.terms.items():
            v = R.mul(c, raw)
            if not R.is_zero(v):
                out[e] = v
        return LaurentPoly(self.ring, out)

    def __pow__(self, e: int):
        e = int(e)
        if e < 0:
            return self.inverse() ** (-e)
        acc = self.ring.one()
        base = self
        while e:
            if e & 1:
                acc = acc * base
            e >>= 1
            if e:
                base = base * base
        return acc

    def inverse(self) -> "LaurentPoly":
        """Inverse of a unit monomial (Laurent variables only)."""
        if len(self.terms) != 1:
            raise NotInvertible(f"{self} is not a monomial")
        (e, c), = self.terms.items()
        neg = tuple(-x for x in e)
        self.ring._check_exps(neg)
        return LaurentPoly(self.ring, {neg: self.ring.coeffs.inv(c)})

    def is_unit(self) -> bool:
        if len(self.terms) != 1:
            return False
        (e, c), = self.terms.items()
        return self.ring.coeffs.is_unit(c) and all(x == 0 or self.ring.laurent[i] for i, x in enumerate(e))

    # --- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return other == self
        try:
            o = self._coerce(other)
        except RosterMismatch:
            return False
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.ring.zero_exp in self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def constant_coefficient(self) -> RingElement:
        R = self.ring.coeffs
        return RingElement(R, self.terms.get(self.ring.zero_exp, R.zero()))

    def coefficient(self, exps) -> RingElement:
        R = self.ring.coeffs
        return RingElement(R, self.terms.get(tuple(exps), R.zero()))

    def items(self):
        """(exponent tuple, RingElement) pairs in printing order."""
        R = self.ring.coeffs
        for e in sorted(self.terms, key=_print_key):
            yield e, RingElement(R, self.terms[e])

    # --- degrees ----------------------------------------------------------
    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, var) -> int:
        i = self.ring.variable_index(var)
        return max((e[i] for e in self.terms), default=-1)

    def max_abs_degree(self) -> int:
        return max((max(map(abs, e), default=0) for e in self.terms), default=0)

    def min_exponents(self):
        if not self.terms:
            return self.ring.zero_exp
        return tuple(min(col) for col in zip(*self.terms))

    def variables(self):
        used = set()
        for e in self.terms:
            used.update(i for i, x in enumerate(e) if x)
        return sorted(used)

    # --- calculus and substitutions --------------------------------------
    def diff(self, var, times: int = 1) -> "LaurentPoly":
        """Formal partial derivative, applied ``times`` times."""
        i = self.ring.variable_index(var)
        R = self.ring.coeffs
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            fac = 1
            for j in range(times):
                fac *= k - j
            if fac == 0:
                continue
            v = R.smul(fac, c)
            if R.is_zero(v):
                continue
            ne = list(e)
            ne[i] = k - times
            out[tuple(ne)] = v
        return LaurentPoly(self.ring, out)

    def q_shift(self, var, q, power: int = 1) -> "LaurentPoly":
        """``f(..., q^power x_i, ...)``; ``q`` must be a unit."""
        i = self.ring.variable_index(var)
        R = self.ring.coeffs
        qr = R.coerce(q)
        if not R.is_unit(qr):
            raise NonUnitQ(f"q = {R.format(qr)} is not a unit")
        cache = {}
        out = {}
        for e, c in self.terms.items():
            k = e[i] * power
            if k not in cache:
                cache[k] = R.pow(qr, k)
            v = R.mul(c, cache[k])
            if not R.is_zero(v):
                out[e] = v
        return LaurentPoly(self.ring, out)

    def additive_shift(self, var, c) -> "LaurentPoly":
        """Substitute ``x_i -> x_i + c``."""
        i = self.ring.variable_index(var)
        x = self.ring.gen(i)
        images = list(self.ring.gens())
        images[i] = x + self.ring.constant(c)
        return self.evaluate(images)

    def evaluate(self, images: Sequence, target=None):
        """Substitute ``images[i]`` for variable ``i``.

        Images may be LaurentPoly, RatFunc or ring constants of a common
        target ring; negative exponents need invertible images.
        """
        if len(images) != self.ring.nvars:
            raise SizeMismatch("one image per variable is required")
        if target is None:
            for im in images:
                if isinstance(im, (LaurentPoly, RatFunc)):
                    target = im.ring
                    break
        if target is None:
            target = self.ring
        R = self.ring.coeffs
        powers = [dict() for _ in images]
        acc = target.zero()
        for e, c in self.terms.items():
            term = target.constant(RingElement(R, c)) if target.coeffs == R else target.constant(c)
            for i, k in enumerate(e):
                if k == 0:
                    continue
                cache = powers[i]
                if k not in cache:
                    im = images[i]
                    if not isinstance(im, (LaurentPoly, RatFunc)):
                        im = target.constant(im)
                    if k < 0 and isinstance(im, LaurentPoly) and not im.is_unit():
                        im = RatFunc(im, target.one())
                    cache[k] = im ** k
                term = term * cache[k]
            acc = acc + term
        return acc

    def subs(self, mapping: Mapping, target=None):
        """Substitute by variable name; unmapped variables stay put."""
        target = target or self.ring
        images = []
        for n in self.ring.names:
            if n in mapping:
                images.append(mapping[n])
            elif n in target.index:
                images.append(target.gen(n))
            else:
                raise UnknownVariable(f"{n} has no image in {target.names}")
        return self.evaluate(images, target)

    def map_coefficients(self, fn, target: PolyRing) -> "LaurentPoly":
        """Apply a raw-coefficient map and reinterpret over ``target`` (same roster)."""
        if target.names != self.ring.names:
            raise RosterMismatch("map_coefficients keeps the roster")
        T = target.coeffs
        out = {}
        for e, c in self.terms.items():
            v = fn(c)
            if not T.is_zero(v):
                out[e] = v
        return LaurentPoly(target, out)

    def change_ring(self, target: PolyRing) -> "LaurentPoly":
        """Re-express over a roster containing every variable actually used."""
        if target.coeffs != self.ring.coeffs:
            raise RingMismatch(f"{self.ring.coeffs} vs {target.coeffs}")
        pos = []
        for i, n in enumerate(self.ring.names):
            pos.append(target.index.get(n))
        out = {}
        for e, c in self.terms.items():
            ne = [0] * target.nvars
            for i, k in enumerate(e):
                if k:
                    j = pos[i]
                    if j is None:
                        raise RosterMismatch(f"{self.ring.names[i]} is not in {target.names}")
                    ne[j] = k
            out[tuple(ne)] = c
        if any(x < 0 and not target.laurent[j] for e in out for j, x in enumerate(e)):
            raise RosterMismatch("negative exponent on a non-Laurent variable of the target")
        return LaurentPoly(target, out)

    def frobenius_twist(self, p: int, rename: Mapping[str, str] | None = None, target=None) -> "LaurentPoly":
        """Raise every coefficient to the ``p``-th power and rename variables."""
        rename = rename if rename is not None else {n: _upper(n) for n in self.ring.names}
        target = target or self.ring.renamed(rename)
        R = self.ring.coeffs
        images = {n: target.gen(rename.get(n, n)) for n in self.ring.names if rename.get(n, n) in target.index}
        out = {}
        for e, c in self.terms.items():
            v = R.frobenius(c, p)
            if not R.is_zero(v):
                out[e] = v
        return LaurentPoly(self.ring, out).subs(images, target) if images else LaurentPoly(target, out)

    def rewrite_power(self, p: int, rename: Mapping[str, str], target: PolyRing) -> "LaurentPoly":
        """Map ``x_i^(p k) -> X_i^k`` for renamed variables; others move unchanged.

        Raises RewriteFailed if some exponent of a renamed variable is not
        divisible by ``p``.
        """
        idx = []
        for i, n in enumerate(self.ring.names):
            new = rename.get(n, n)
            if new not in target.index:
                idx.append(None)
            else:
                idx.append((target.index[new], n in rename))
        out = {}
        for e, c in self.terms.items():
            ne = [0] * target.nvars
            for i, k in enumerate(e):
                if not k:
                    continue
                if idx[i] is None:
                    raise RewriteFailed(f"{self.ring.names[i]} has no image in {target.names}")
                j, scaled = idx[i]
                if scaled:
                    if k % p:
                        raise RewriteFailed(f"exponent {k} of {self.ring.names[i]} is not divisible by {p}")
                    k //= p
                ne[j] = k
            out[tuple(ne)] = c
        return LaurentPoly(target, out)

    def pullback_power(self, p: int, rename: Mapping[str, str], target: PolyRing) -> "LaurentPoly":
        """Inverse of :meth:`rewrite_power`: ``X_i^k -> x_i^(p k)``."""
        idx = []
        for n in self.ring.names:
            new = rename.get(n, n)
            idx.append((target.variable_index(new), n in rename))
        out = {}
        for e, c in self.terms.items():
            ne = [0] * target.nvars
            for i, k in enumerate(e):
                if k:
                    j, scaled = idx[i]
                    ne[j] += k * p if scaled else k
            out[tuple(ne)] = c
        return LaurentPoly(target, out)

    # --- division ---------------------------------------------------------
    def divexact(self, other: "LaurentPoly"):
        """Exact quotient ``self / other`` in the (Laurent) polynomial ring, or None."""
        other = self._coerce(other)
        if other.is_zero():
            raise DivisionByZeroPoly("division by the zero polynomial")
        if self.is_zero():
            return self
        R = self.ring.coeffs
        ma, mb = self.min_exponents(), other.min_exponents()
        shift = tuple(a - b for a, b in zip(ma, mb))
        for i, s in enumerate(shift):
            if s < 0 and not self.ring.laurent[i]:
                return None
        a = {tuple(x - y for x, y in zip(e, ma)): c for e, c in self.terms.items()}
        b = {tuple(x - y for x, y in zip(e, mb)): c for e, c in other.terms.items()}
        lb = max(b, key=_grlex_key)
        lcb = b[lb]
        q = {}
        while a:
            la = max(a, key=_grlex_key)
            d = tuple(x - y for x, y in zip(la, lb))
            if any(x < 0 for x in d):
                return None
            c = _divexact_coeff(R, a[la], lcb)
            if c is None:
                return None
            q[d] = c
            for eb, cb in b.items():
                key = tuple(map(_add, d, eb))
                v = R.sub(a.get(key, R.zero()), R.mul(c, cb))
                if R.is_zero(v):
                    a.pop(key, None)
                else:
                    a[key] = v
        out = {tuple(map(_add, e, shift)): c for e, c in q.items()}
        return LaurentPoly(self.ring, out)

    # --- printing ---------------------------------------------------------
    def __str__(self):
        R = self.ring.coeffs
        names = self.ring.names
        parts = []
        for e in sorted(self.terms, key=_print_key):
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            parts.append(_format_coeff_term(R.format(self.terms[e]), mono))
        return _join_terms(parts)

    def __repr__(self):
        return f"LaurentPoly({str(self)!r})"


def _upper(name: str) -> str:
    return name[0].upper() + name[1:] if name else name


def _grlex_key(e):
    return (sum(e), e)


def _divexact_coeff(R, a, b):
    if hasattr(R, "divexact"):
        return R.divexact(a, b)
    if R.is_unit(b):
        return R.mul(a, R.inv(b))
    return None


def _add_terms(R, a, b, negate=False):
    out = dict(a)
    m = R.int_modulus
    if m is not None:
        for e, c in b.items():
            v = out.get(e, 0) + (-c if negate else c)
            if m:
                v %= m
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return out
    zero = R.zero()
    for e, c in b.items():
        v = R.sub(out[e], c) if e in out and negate else R.add(out[e], c) if e in out else (R.neg(c) if negate else c)
        if v == zero:
            out.pop(e, None)
        else:
            out[e] = v
    return out


def _mul_terms(R, a, b):
    if not a or not b:
        return {}
    out = {}
    m = R.int_modulus
    if m is not None:
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(map(_add, ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        if m:
            return {e: v % m for e, v in out.items() if v % m}
        return {e: v for e, v in out.items() if v}
    zero = R.zero()
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(map(_add, ea, eb))
            p = R.mul(ca, cb)
            out[e] = R.add(out[e], p) if e in out else p
    return {e: v for e, v in out.items() if v != zero}


class RatFunc:
    """Fraction ``num / den`` of Laurent polynomials over one PolyRing.

    Only monomial content is stripped; equality is decided by
    cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, RatFunc) and den is None:
            num, den = num.num, num.den
        if den is None:
            den = num.ring.one()
        if not isinstance(num, LaurentPoly):
            num = den.ring.constant(num)
        if not isinstance(den, LaurentPoly):
            den = num.ring.constant(den)
        if num.ring != den.ring:
            raise RosterMismatch(f"{num.ring} vs {den.ring}")
        if den.is_zero():
            raise DivisionByZeroPoly("zero denominator")
        self.num, self.den = _normalize_fraction(num, den)

    @property
    def ring(self) -> PolyRing:
        return self.num.ring

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.ring != self.ring:
                raise RosterMismatch(f"{other.ring} vs {self.ring}")
            return other
        if isinstance(other, LaurentPoly):
            if other.ring != self.ring:
                raise RosterMismatch(f"{other.ring} vs {self.ring}")
            return RatFunc(other)
        if isinstance(other, (int, RingElement)):
            return RatFunc(self.ring.constant(other))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            raise DivisionByZeroPoly("division by zero")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, e: int):
        e = int(e)
        if e < 0:
            if self.num.is_zero():
                raise DivisionByZeroPoly("zero to a negative power")
            return RatFunc(self.den ** (-e), self.num ** (-e))
        return RatFunc(self.num ** e, self.den ** e)

    def inverse(self):
        return RatFunc(self.den, self.num)

    def is_unit(self) -> bool:
        return not self.num.is_zero()

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except RosterMismatch:
            return False
        if o is None:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        # fractions are not canonical; only polynomials hash consistently
        p = self.to_poly()
        return hash(p) if p is not None else hash(("ratfunc", self.ring))

    def __bool__(self):
        return not self.num.is_zero()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def to_poly(self):
        """The Laurent polynomial equal to this fraction, or None."""
        if self.den == self.ring.one():
            return self.num
        return self.num.divexact(self.den)

    def simplify(self) -> "RatFunc":
        p = self.to_poly()
        return RatFunc(p) if p is not None else self

    def diff(self, var, times: int = 1) -> "RatFunc":
        out = self
        for _ in range(times):
            n, d = out.num, out.den
            out = RatFunc(n.diff(var) * d - n * d.diff(var), d * d)
        return out

    def q_shift(self, var, q, power: int = 1) -> "RatFunc":
        return RatFunc(self.num.q_shift(var, q, power), self.den.q_shift(var, q, power))

    def additive_shift(self, var, c) -> "RatFunc":
        return RatFunc(self.num.additive_shift(var, c), self.den.additive_shift(var, c))

    def evaluate(self, images, target=None):
        n = self.num.evaluate(images, target)
        d = self.den.evaluate(images, target)
        return RatFunc(n) / d

    def subs(self, mapping, target=None):
        n = self.num.subs(mapping, target)
        d = self.den.subs(mapping, target)
        return RatFunc(n) / d

    def map_coefficients(self, fn, target):
        return RatFunc(self.num.map_coefficients(fn, target), self.den.map_coefficients(fn, target))

    def change_ring(self, target):
        return RatFunc(self.num.change_ring(target), self.den.change_ring(target))

    def frobenius_twist(self, p, rename=None, target=None):
        return RatFunc(self.num.frobenius_twist(p, rename, target), self.den.frobenius_twist(p, rename, target))

    def rewrite_power(self, p, rename, target):
        return RatFunc(self.num.rewrite_power(p, rename, target), self.den.rewrite_power(p, rename, target))

    def pullback_power(self, p, rename, target):
        return RatFunc(self.num.pullback_power(p, rename, target), self.den.pullback_power(p, rename, target))

    def total_degree(self):
        return max(self.num.total_degree(), self.den.total_degree())

    def max_abs_degree(self):
        return max(self.num.max_abs_degree(), self.den.max_abs_degree())

    def __str__(self):
        if self.den == self.ring.one():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RatFunc({str(self)!r})"


def _normalize_fraction(num: LaurentPoly, den: LaurentPoly):
    R = num.ring
    if num.is_zero():
        return num, R.one()
    mn, md = num.min_exponents(), den.min_exponents()
    common = []
    for i in range(R.nvars):
        c = min(mn[i], md[i])
        if not R.laurent[i]:
            c = max(c, 0)
        common.append(c)
    if any(common):
        neg = tuple(-c for c in common)
        num = LaurentPoly(R, {tuple(map(_add, e, neg)): c for e, c in num.terms.items()})
        den = LaurentPoly(R, {tuple(map(_add, e, neg)): c for e, c in den.terms.items()})
    if den.is_unit():
        return num * den.inverse(), R.one()
    return num, den


# --- matrices -------------------------------------------------------------

def berkowitz(rows, zero, one):
    """Characteristic polynomial coefficients by the Berkowitz algorithm.

    Returns ``[c_0, ..., c_n]`` with ``det(lambda I - A) = sum c_i lambda^(n-i)``
    (so ``c_0 = 1``).  Uses only ring addition and multiplication.
    """
    n = len(rows)
    vect = [one]
    for k in range(n):
        a = rows[k][k]
        R = rows[k][:k]
        v = [rows[i][k] for i in range(k)]
        t = [one, -a]
        for _ in range(k):
            s = zero
            for x, y in zip(R, v):
                s = s + x * y
            t.append(-s)
            v = [_dot(rows[i][:k], v, zero) for i in range(k)]
        new = []
        for i in range(k + 2):
            s = zero
            for j in range(min(i, k) + 1):
                if i - j < len(t):
                    s = s + t[i - j] * vect[j]
            new.append(s)
        vect = new
    return vect


def _dot(row, v, zero):
    s = zero
    for x, y in zip(row, v):
        s = s + x * y
    return s


class PolyMatrix:
    """Square matrix with LaurentPoly or RatFunc entries over one PolyRing."""

    __slots__ = ("ring", "rows", "n")

    def __init__(self, ring: PolyRing, rows):
        rows = [list(r) for r in rows]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise SizeMismatch("matrix must be square")
        conv = []
        rational = any(isinstance(x, RatFunc) for r in rows for x in r)
        for r in rows:
            out = []
            for x in r:
                if isinstance(x, str):
                    x = ring.parse(x)
                elif not isinstance(x, (LaurentPoly, RatFunc)):
                    x = ring.constant(x)
                if x.ring != ring:
                    x = x.change_ring(ring)
                out.append(x)
            conv.append(out)
        rational = rational or any(isinstance(x, RatFunc) for r in conv for x in r)
        if rational:
            conv = [[x if isinstance(x, RatFunc) else RatFunc(x) for x in r] for r in conv]
        self.ring = ring
        self.rows = tuple(tuple(r) for r in conv)
        self.n = n

    @classmethod
    def identity(cls, ring, n):
        return cls(ring, [[ring.one() if i == j else ring.zero() for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, ring, n):
        return cls(ring, [[ring.zero()] * n for _ in range(n)])

    @classmethod
    def scalar(cls, ring, n, value):
        v = value if isinstance(value, (LaurentPoly, RatFunc)) else ring.constant(value)
        return cls(ring, [[v if i == j else ring.zero() for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, ring, entries):
        n = len(entries)
        return cls(ring, [[entries[i] if i == j else ring.zero() for j in range(n)] for i in range(n)])

    @classmethod
    def from_strings(cls, ring, rows):
        return cls(ring, [[ring.parse(x) if isinstance(x, str) else x for x in r] for r in rows])

    @classmethod
    def block_diag(cls, *blocks):
        ring = blocks[0].ring
        n = sum(b.n for b in blocks)
        rows = [[ring.zero()] * n for _ in range(n)]
        off = 0
        for b in blocks:
            for i in range(b.n):
                for j in range(b.n):
                    rows[off + i][off + j] = b.rows[i][j]
            off += b.n
        return cls(ring, rows)

    @property
    def is_rational(self) -> bool:
        return any(isinstance(x, RatFunc) for r in self.rows for x in r)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def entries(self):
        for r in self.rows:
            yield from r

    def to_strings(self):
        return [[str(x) for x in r] for r in self.rows]

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(map(str, r)) + "]" for r in self.rows) + "]"

    __repr__ = __str__

    def _check(self, other):
        if not isinstance(other, PolyMatrix):
            return False
        if other.ring != self.ring:
            raise RosterMismatch(f"{other.ring} vs {self.ring}")
        if other.n != self.n:
            raise SizeMismatch(f"{other.n}x{other.n} vs {self.n}x{self.n}")
        return True

    def __add__(self, other):
        if not self._check(other):
            return NotImplemented
        return PolyMatrix(self.ring, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        if not self._check(other):
            return NotImplemented
        return PolyMatrix(self.ring, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return PolyMatrix(self.ring, [[-a for a in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, PolyMatrix):
            self._check(other)
            cols = list(zip(*other.rows))
            zero = self.ring.zero()
            out = []
            for r in self.rows:
                out.append([_dot(r, c, zero) for c in cols])
            return PolyMatrix(self.ring, out)
        if isinstance(other, (LaurentPoly, RatFunc, int, RingElement)):
            return PolyMatrix(self.ring, [[a * other for a in r] for r in self.rows])
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (LaurentPoly, RatFunc, int, RingElement)):
            return PolyMatrix(self.ring, [[other * a for a in r] for r in self.rows])
        return NotImplemented

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        acc = PolyMatrix.identity(self.ring, self.n)
        base = self
        while e:
            if e & 1:
                acc = acc * base
            e >>= 1
            if e:
                base = base * base
        return acc

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        if other.ring != self.ring or other.n != self.n:
            return False
        return all(a == b for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    def __hash__(self):
        return hash((self.ring, self.n))

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.entries())

    def map(self, fn, ring=None) -> "PolyMatrix":
        return PolyMatrix(ring or self.ring, [[fn(x) for x in r] for r in self.rows])

    def diff(self, var, times=1):
        return self.map(lambda x: x.diff(var, times))

    def q_shift(self, var, q, power=1):
        return self.map(lambda x: x.q_shift(var, q, power))

    def transpose(self):
        return PolyMatrix(self.ring, list(zip(*self.rows)))

    def trace(self):
        acc = self.ring.zero()
        for i in range(self.n):
            acc = acc + self.rows[i][i]
        return acc

    def diagonal(self):
        return [self.rows[i][i] for i in range(self.n)]

    def is_upper_triangular(self) -> bool:
        return all(self.rows[i][j].is_zero() for i in range(self.n) for j in range(i))

    def commutator(self, other):
        return self * other - other * self

    def _zero_one(self):
        z, o = self.ring.zero(), self.ring.one()
        if self.is_rational:
            z, o = RatFunc(z), RatFunc(o)
        return z, o

    def charpoly_coefficients(self):
        """``[1, c_1, ..., c_n]`` with ``det(lambda - A) = sum c_i lambda^(n-i)``."""
        z, o = self._zero_one()
        return berkowitz([list(r) for r in self.rows], z, o)

    def charpoly(self, var: str = "lambda", ring: PolyRing | None = None):
        """The characteristic polynomial ``det(var I - A)`` as a single polynomial."""
        ring = ring or self.ring.extend([var])
        lam = ring.gen(var)
        acc = ring.zero()
        coeffs = self.charpoly_coefficients()
        for i, c in enumerate(coeffs):
            acc = acc + c.change_ring(ring) * lam ** (self.n - i)
        return acc

    def det(self):
        c = self.charpoly_coefficients()[-1]
        return c if self.n % 2 == 0 else -c

    def adjugate(self) -> "PolyMatrix":
        coeffs = self.charpoly_coefficients()
        n = self.n
        z, o = self._zero_one()
        acc = PolyMatrix.scalar(self.ring, n, o) * coeffs[0]
        for i in range(1, n):
            acc = acc * self + PolyMatrix.scalar(self.ring, n, coeffs[i])
        return acc if n % 2 == 1 else -acc

    def inverse(self) -> "PolyMatrix":
        """Inverse via the adjugate; Laurent entries are kept when det is a unit monomial."""
        d = self.det()
        if d.is_zero():
            raise NotInvertible("singular matrix")
        adj = self.adjugate()
        if isinstance(d, LaurentPoly) and d.is_unit():
            return adj * d.inverse()
        if isinstance(d, RatFunc) and d.num.is_unit() and d.den.is_unit():
            return adj * RatFunc(d.den * d.num.inverse())
        return adj.map(lambda x: RatFunc(x) / d)

    def change_ring(self, ring):
        return self.map(lambda x: x.change_ring(ring), ring)

    def max_degree(self) -> int:
        return max((x.max_abs_degree() for x in self.entries()), default=0)


def poly_matrix(ring: PolyRing, rows) -> PolyMatrix:
    return PolyMatrix.from_strings(ring, rows)


def fraction_free_rank(rows) -> int:
    """Rank over the fraction field of a rectangular matrix of polynomials.

    Rational entries are cleared row by row; elimination is fraction-free
    (``r_i <- pivot * r_i - r_i[c] * r_pivot``), so the coefficient ring
    must be a domain for the count to be meaningful.
    """
    work = []
    for row in rows:
        dens = [x.den for x in row if isinstance(x, RatFunc)]
        cleared = []
        for x in row:
            if isinstance(x, RatFunc):
                v = x.num
                for d in dens:
                    v = v * d
                v = v.divexact(x.den)
                cleared.append(v)
            else:
                scale = None
                for d in dens:
                    scale = d if scale is None else scale * d
                cleared.append(x if scale is None else x * scale)
        work.append(cleared)
    if not work:
        return 0
    ncols = len(work[0])
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(work)) if not work[i][c].is_zero()), None)
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        top = work[rank]
        for i in range(rank + 1, len(work)):
            lead = work[i][c]
            if lead.is_zero():
                continue
            work[i] = [top[c] * y - lead * x for x, y in zip(top, work[i])]
            work[i][c] = work[i][c].ring.zero()
        rank += 1
    return rank
