"""Exact coefficient rings.

Three kinds of finite rings are supported, plus the integers:

* ``PrimeField(p)``        -- F_p, elements stored as ints in ``[0, p)``;
* ``IntegerResidue(m)``    -- Z/m, elements stored as ints in ``[0, m)``;
* ``MonicQuotient(base, f, relations)`` -- ``base[u]/(f, relations)`` for a
  monic ``f``; elements are coefficient tuples of length ``deg f``, reduced
  modulo the integer lattice spanned by ``m u^j`` and ``g u^j`` for each
  extra relation ``g``;
* ``IntegerRing()``        -- Z, used for cluster variables.

Ring methods operate on *raw* values (ints or tuples) so that polynomial code
can avoid wrapper allocation; :class:`RingElement` is the public wrapper.

A local ring is declared by listing generators of its maximal ideal; the
declaration is verified and yields a :class:`ResidueMap` onto its residue
field.
"""

from __future__ import annotations

import math
import random as _random

from . import lattice
from .errors import BadLocality, NotAField, NotInvertible, NotLocal, NotMonic, NotPrime, RingMismatch


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# --- univariate helpers over F_p (coefficient lists, low degree first) ------

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_divmod(a, b, p):
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        c = a[-1] * inv % p
        s = len(a) - len(b)
        q[s] = c
        for i, y in enumerate(b):
            a[s + i] = (a[s + i] - c * y) % p
        a = _trim(a)
    return q, a


def _fp_gcd(a, b, p):
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        _, r = _fp_divmod(a, b, p)
        a, b = b, r
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def _fp_mulmod(a, b, f, p):
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    return _fp_divmod(prod, f, p)[1]


def fp_is_irreducible(f, p) -> bool:
    """Ben-Or test for a univariate polynomial over F_p."""
    f = _trim([x % p for x in f])
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    upow = [0, 1]
    for i in range(1, d // 2 + 1):
        # upow <- upow^p mod f
        base, e, acc = upow, p, [1]
        while e:
            if e & 1:
                acc = _fp_mulmod(acc, base, f, p)
            base = _fp_mulmod(base, base, f, p)
            e >>= 1
        upow = acc
        diff = list(upow) + [0] * max(0, 2 - len(upow))
        diff[1] = (diff[1] - 1) % p
        if len(_fp_gcd(f, diff, p)) > 1:
            return False
    return True


def _fp_poly_str(c):
    terms = []
    for j, x in enumerate(c):
        if x:
            terms.append(f"{x}" if j == 0 else (f"{x}*u^{j}" if x != 1 else f"u^{j}"))
    return " + ".join(terms) or "0"


# --- rings -------------------------------------------------------------------

class Ring:
    """Common interface; subclasses fill in the raw arithmetic."""

    characteristic: int
    is_field: bool
    #: int modulus for int-backed rings (0 for Z), None for tuple-backed rings
    int_modulus: int | None = None
    generator_name: str | None = None

    def __call__(self, value) -> "RingElement":
        return RingElement(self, self.coerce(value))

    def coerce(self, value):
        if isinstance(value, RingElement):
            if value.ring != self:
                raise RingMismatch(f"element of {value.ring} used in {self}")
            return value.value
        if isinstance(value, int):
            return self.from_int(value)
        return self.normalize(value)

    # raw interface
    def zero(self):
        return self.from_int(0)

    def one(self):
        return self.from_int(1)

    def is_zero(self, a) -> bool:
        return a == self.zero()

    def is_one(self, a) -> bool:
        return a == self.one()

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def pow(self, a, e: int):
        if e < 0:
            a, e = self.inv(a), -e
        acc = self.one()
        while e:
            if e & 1:
                acc = self.mul(acc, a)
            a = self.mul(a, a)
            e >>= 1
        return acc

    def smul(self, n: int, a):
        return self.mul(self.from_int(n), a)

    def frobenius(self, a, p: int | None = None):
        return self.pow(a, p if p is not None else self.characteristic)

    def elements(self):
        raise NotImplementedError

    def size(self) -> int:
        raise NotImplementedError

    def random_raw(self, rng: _random.Random):
        raise NotImplementedError

    def multiplicative_order(self, a, bound: int | None = None) -> int | None:
        """Smallest ``k >= 1`` with ``a^k = 1``; None if ``a`` is not a unit."""
        if not self.is_unit(a):
            return None
        limit = bound if bound is not None else self.size()
        x = a
        for k in range(1, limit + 1):
            if self.is_one(x):
                return k
            x = self.mul(x, a)
        return None

    def sqrt(self, a):
        """Some ``s`` with ``s^2 = a``, by exhaustive search; None if absent."""
        if self.size() > 200_000:
            return None
        for s in self.elements():
            if self.mul(s, s) == a:
                return s
        return None

    def format(self, a) -> str:
        raise NotImplementedError

    def residue_map(self) -> "ResidueMap":
        if self.is_field:
            return ResidueMap(self, self, self._identity_image())
        raise NotLocal(f"{self} has no declared maximal ideal")

    def _identity_image(self):
        return None

    def __ne__(self, other):
        return not self == other


class IntegerResidue(Ring):
    """Z/m for m >= 2."""

    def __init__(self, m: int, maximal_ideal=None):
        m = int(m)
        if m < 2:
            raise NotPrime(f"modulus {m} must be at least 2")
        self.m = m
        self.int_modulus = m
        self.characteristic = m
        self.is_field = is_prime(m)
        self.maximal_ideal = None if maximal_ideal is None else tuple(int(g) for g in maximal_ideal)
        self._residue = None
        if self.maximal_ideal is not None and not self.is_field:
            primes = prime_factors(m)
            if len(primes) != 1:
                raise BadLocality(f"Z/{m} is not local")
            p = primes[0]
            g = m
            for x in self.maximal_ideal:
                if math.gcd(x, m) == 1:
                    raise BadLocality(f"declared generator {x} is a unit mod {m}")
                g = math.gcd(g, x)
            if g != p:
                raise BadLocality(f"declared ideal is ({g}), not the maximal ideal ({p})")
            self._residue = ResidueMap(self, PrimeField(p), None)

    def __eq__(self, other):
        return type(other) is type(self) and other.m == self.m

    def __hash__(self):
        return hash((type(self).__name__, self.m))

    def __repr__(self):
        return f"IntegerResidue({self.m})"

    def descriptor(self):
        out = {"kind": "zmod", "m": self.m}
        if self.maximal_ideal is not None:
            out["maximal_ideal"] = [str(g) for g in self.maximal_ideal]
        return out

    def from_int(self, n):
        return n % self.m

    def normalize(self, a):
        return int(a) % self.m

    def add(self, a, b):
        return (a + b) % self.m

    def neg(self, a):
        return -a % self.m

    def mul(self, a, b):
        return a * b % self.m

    def smul(self, n, a):
        return n * a % self.m

    def is_unit(self, a):
        return math.gcd(a, self.m) == 1

    def inv(self, a):
        if math.gcd(a, self.m) != 1:
            raise NotInvertible(f"{a} is not a unit mod {self.m}")
        return pow(a, -1, self.m)

    def frobenius(self, a, p=None):
        return pow(a, p if p is not None else self.characteristic, self.m)

    def elements(self):
        return range(self.m)

    def size(self):
        return self.m

    def random_raw(self, rng):
        return rng.randrange(self.m)

    def format(self, a):
        return str(a - self.m if a > self.m // 2 else a)

    def _identity_image(self):
        return None

    def residue_map(self):
        if self.is_field:
            return ResidueMap(self, self, None)
        if self._residue is not None:
            return self._residue
        raise NotLocal(f"Z/{self.m} has no declared maximal ideal")


class PrimeField(IntegerResidue):
    """F_p."""

    def __init__(self, p: int):
        p = int(p)
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        super().__init__(p)
        self.p = p
        self.maximal_ideal = None

    def __repr__(self):
        return f"PrimeField({self.p})"

    def descriptor(self):
        return {"kind": "prime", "p": self.p}

    def frobenius(self, a, p=None):
        return a


class IntegerRing(Ring):
    """The integers, for cluster-variable bookkeeping."""

    characteristic = 0
    is_field = False
    int_modulus = 0

    def __eq__(self, other):
        return type(other) is IntegerRing

    def __hash__(self):
        return hash("ZZ")

    def __repr__(self):
        return "IntegerRing()"

    def descriptor(self):
        return {"kind": "integers"}

    def from_int(self, n):
        return int(n)

    def normalize(self, a):
        return int(a)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def smul(self, n, a):
        return n * a

    def is_unit(self, a):
        return a in (1, -1)

    def inv(self, a):
        if a not in (1, -1):
            raise NotInvertible(f"{a} is not a unit in Z")
        return a

    def divexact(self, a, b):
        q, r = divmod(a, b)
        return q if r == 0 else None

    def format(self, a):
        return str(a)

    def random_raw(self, rng):
        return rng.randint(-5, 5)


class MonicQuotient(Ring):
    """``base[u] / (f, relations)`` with ``base`` = F_p or Z/m and ``f`` monic.

    Parameters
    ----------
    base : PrimeField or IntegerResidue
    f : sequence of int
        Coefficients of ``f`` from degree 0 up; the last one must be 1.
    relations : sequence of sequences of int, optional
        Further elements of ``Z[u]`` set to zero.
    maximal_ideal : sequence of sequences of int, optional
        Declared generators of the maximal ideal, checked at construction.
    """

    generator_name = "u"

    def __init__(self, base, f, relations=(), maximal_ideal=None):
        if not isinstance(base, IntegerResidue):
            raise RingMismatch("the base of a monic quotient must be F_p or Z/m")
        self.base = base
        m = base.m
        f = _trim([int(c) for c in f])
        if len(f) < 2:
            raise NotMonic("f must have positive degree")
        if f[-1] != 1:
            raise NotMonic(f"leading coefficient of f is {f[-1]}, not 1")
        self.f = tuple(f)
        self.degree = d = len(f) - 1
        self.relations = tuple(tuple(_trim(int(c) for c in g)) for g in relations)
        gens = [[m * int(i == j) for j in range(d)] for i in range(d)]
        for g in self.relations:
            gens.extend(self._ideal_span(g))
        self._lattice = lattice.row_hnf(gens, d)
        # coordinates where subtracting the pivot keeps the class: symmetric printing
        self._sym = [row[i] if all(row[j] == 0 for j in range(d) if j != i) else None
                     for i, row in enumerate(self._lattice)]
        self.characteristic = next(n for n in sorted(_divisors(m)) if self._is_zero_vec([n] + [0] * (d - 1)))
        self.is_field = self._compute_is_field()
        self.maximal_ideal = None if maximal_ideal is None else tuple(tuple(int(c) for c in g) for g in maximal_ideal)
        self._residue = None
        if self.maximal_ideal is not None:
            self._residue = self._check_locality()

    # exact structure
    def _reduce_f(self, coeffs):
        c = list(coeffs)
        d = self.degree
        f = self.f
        for k in range(len(c) - 1, d - 1, -1):
            t = c[k]
            if t:
                for i in range(d):
                    c[k - d + i] -= t * f[i]
                c[k] = 0
        c = c[:d] + [0] * max(0, d - len(c))
        return c

    def _ideal_span(self, g):
        out = []
        for j in range(self.degree):
            out.append(self._reduce_f([0] * j + list(g)))
        return out

    def _canon(self, vec):
        return tuple(lattice.reduce_mod_lattice(vec, self._lattice))

    def _is_zero_vec(self, vec):
        return not any(self._canon(vec))

    def _compute_is_field(self):
        p = self.characteristic
        if not is_prime(p):
            return False
        h = self.f
        for g in self.relations:
            h = _fp_gcd(h, g, p)
        h = _fp_gcd(h, self.f, p)
        # the ring is then F_p[u]/(h); equal size iff the lattice is p Z^d + (h)
        return fp_is_irreducible(h, p) and self.size() == p ** (len(h) - 1)

    def _check_locality(self):
        m, d = self.base.m, self.degree
        primes = prime_factors(m)
        if len(primes) != 1:
            raise BadLocality(f"Z/{m} is not local")
        p = primes[0]
        h0 = self.f
        for g in self.relations:
            h0 = _fp_gcd(h0, g, p)
        h0 = _fp_gcd(h0, self.f, p)
        gens = [list(g) for g in self.maximal_ideal]
        for g in gens:
            if self.is_unit(self.normalize(g)):
                raise BadLocality(f"declared generator {_fp_poly_str(g)} is a unit")
        span = [list(row) for row in self._lattice]
        for g in gens:
            span.extend(self._ideal_span(g))
        quot = lattice.row_hnf(span, d)
        char = next(n for n in sorted(_divisors(m))
                    if not any(lattice.reduce_mod_lattice([n] + [0] * (d - 1), quot)))
        if not is_prime(char):
            raise BadLocality(f"quotient by the declared ideal has characteristic {char}")
        p = char
        h = self.f
        for g in list(self.relations) + [tuple(g) for g in gens]:
            h = _fp_gcd(h, g, p)
        if not fp_is_irreducible(h, p):
            raise BadLocality(f"quotient by the declared ideal is F_{p}[u]/({_fp_poly_str(h)}), not a field")
        k = (len(h0) - 1) // (len(h) - 1)
        power = [1]
        for _ in range(k):
            power = _fp_mulmod(power, h, [0] * (len(h0) + 1) + [1], p)
        if _trim(power) != _trim(h0):
            raise BadLocality(f"S/pS = F_{p}[u]/({_fp_poly_str(h0)}) has several maximal ideals")
        if len(h) == 2:
            target = PrimeField(p)
            image = (-h[0]) % p
        else:
            target = MonicQuotient(PrimeField(p), h)
            image = target.normalize([0, 1])
        return ResidueMap(self, target, image)

    # bookkeeping
    def __eq__(self, other):
        return (type(other) is MonicQuotient and other.base == self.base and other.f == self.f
                and other._lattice == self._lattice)

    def __hash__(self):
        return hash((self.base, self.f, tuple(map(tuple, self._lattice))))

    def __repr__(self):
        rel = f", relations={list(map(list, self.relations))}" if self.relations else ""
        return f"MonicQuotient({self.base!r}, {list(self.f)}{rel})"

    def descriptor(self):
        out = {"kind": "quotient", "f": _int_poly_str(self.f)}
        out["p" if isinstance(self.base, PrimeField) else "m"] = self.base.m
        if self.relations:
            out["relations"] = [_int_poly_str(g) for g in self.relations]
        if self.maximal_ideal is not None:
            out["maximal_ideal"] = [_int_poly_str(g) for g in self.maximal_ideal]
        return out

    def from_int(self, n):
        return self._canon([n] + [0] * (self.degree - 1))

    def normalize(self, a):
        if isinstance(a, int):
            return self.from_int(a)
        a = [int(c) for c in a]
        if len(a) > self.degree:
            a = self._reduce_f(a)
        return self._canon(a + [0] * (self.degree - len(a)))

    def gen(self):
        return RingElement(self, self.normalize([0, 1]))

    def add(self, a, b):
        return self._canon([x + y for x, y in zip(a, b)])

    def neg(self, a):
        return self._canon([-x for x in a])

    def sub(self, a, b):
        return self._canon([x - y for x, y in zip(a, b)])

    def mul(self, a, b):
        prod = [0] * (2 * self.degree - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        return self._canon(self._reduce_f(prod))

    def smul(self, n, a):
        return self._canon([n * x for x in a])

    def _mult_matrix(self, a):
        cols = []
        for j in range(self.degree):
            cols.append(self._reduce_f([0] * j + list(a)))
        # column j = a * u^j
        return [[cols[j][i] for j in range(self.degree)] for i in range(self.degree)]

    def _solve_unit(self, a):
        # find x with a*x = 1 modulo the relation lattice
        M = self._mult_matrix(a)
        A = [row + [r[i] for r in self._lattice] for i, row in enumerate(M)]
        sol = lattice.solve_integer(A, [1] + [0] * (self.degree - 1))
        if sol is None:
            return None
        return self._canon(sol[: self.degree])

    def is_unit(self, a):
        if self.is_field and isinstance(self.base, PrimeField) and not self.relations:
            return any(a)
        return self._solve_unit(a) is not None

    def inv(self, a):
        if self.is_field and isinstance(self.base, PrimeField) and not self.relations:
            return self._euclid_inverse(a)
        x = self._solve_unit(a)
        if x is None:
            raise NotInvertible(f"{self.format(a)} is not a unit in {self}")
        return x

    def _euclid_inverse(self, a):
        p = self.base.m
        r0, r1 = list(self.f), _trim(a)
        s0, s1 = [0], [1]
        if not r1:
            raise NotInvertible("zero is not invertible")
        while r1:
            q, r = _fp_divmod(r0, r1, p)
            r0, r1 = r1, r
            qs = [0] * (len(q) + len(s1))
            for i, x in enumerate(q):
                for j, y in enumerate(s1):
                    qs[i + j] += x * y
            s_new = [((s0[i] if i < len(s0) else 0) - (qs[i] if i < len(qs) else 0)) % p
                     for i in range(max(len(s0), len(qs)))]
            s0, s1 = s1, _trim(s_new) or [0]
        if len(_trim(r0)) != 1:
            raise NotInvertible(f"{self.format(a)} is not a unit")
        c = pow(r0[0], -1, p)
        return self.normalize([x * c for x in s0])

    def _identity_image(self):
        return self.normalize([0, 1])

    def residue_map(self):
        if self._residue is not None:
            return self._residue
        if self.is_field:
            return ResidueMap(self, self, self._identity_image())
        raise NotLocal(f"{self} has no declared maximal ideal")

    def size(self):
        n = 1
        for i, row in enumerate(self._lattice):
            n *= row[i]
        return n

    def elements(self):
        ranges = [range(row[i]) for i, row in enumerate(self._lattice)]
        for combo in _product(ranges):
            yield self._canon(list(combo))

    def random_raw(self, rng):
        return self._canon([rng.randrange(row[i]) for i, row in enumerate(self._lattice)])

    def format(self, a):
        terms = []
        for j, c in enumerate(a):
            h = self._sym[j]
            if h is not None and c > h // 2:
                c -= h
            if c == 0:
                continue
            mono = "" if j == 0 else ("u" if j == 1 else f"u^{j}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}*{mono}")
        if not terms:
            return "0"
        out = terms[0]
        for t in terms[1:]:
            out += " - " + t[1:] if t.startswith("-") else " + " + t
        return out


def _product(ranges):
    if not ranges:
        yield ()
        return
    for head in ranges[0]:
        for tail in _product(ranges[1:]):
            yield (head,) + tail


def _divisors(m):
    return [d for d in range(1, m + 1) if m % d == 0]


def _int_poly_str(c):
    terms = []
    for j in range(len(c) - 1, -1, -1):
        x = c[j]
        if not x:
            continue
        mono = "" if j == 0 else ("u" if j == 1 else f"u^{j}")
        if not mono:
            s = str(abs(x))
        elif abs(x) == 1:
            s = mono
        else:
            s = f"{abs(x)}*{mono}"
        terms.append(("-" if x < 0 else "+", s))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, s in terms[1:]:
        out += f" {sign} {s}"
    return out


class RingElement:
    """An element of a :class:`Ring` in canonical form."""

    __slots__ = ("ring", "value")

    def __init__(self, ring: Ring, value):
        self.ring = ring
        self.value = value

    def _other(self, other):
        if isinstance(other, RingElement):
            if other.ring != self.ring:
                raise RingMismatch(f"{other.ring} vs {self.ring}")
            return other.value
        if isinstance(other, int):
            return self.ring.from_int(other)
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return RingElement(self.ring, self.ring.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return RingElement(self.ring, self.ring.sub(self.value, b))

    def __rsub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return RingElement(self.ring, self.ring.sub(b, self.value))

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return RingElement(self.ring, self.ring.mul(self.value, b))

    __rmul__ = __mul__

    def __neg__(self):
        return RingElement(self.ring, self.ring.neg(self.value))

    def __pow__(self, e: int):
        return RingElement(self.ring, self.ring.pow(self.value, e))

    def inverse(self):
        return RingElement(self.ring, self.ring.inv(self.value))

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return RingElement(self.ring, self.ring.mul(self.value, self.ring.inv(b)))

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.value)

    def is_zero(self) -> bool:
        return self.ring.is_zero(self.value)

    def order(self) -> int | None:
        return self.ring.multiplicative_order(self.value)

    def __eq__(self, other):
        try:
            b = self._other(other)
        except RingMismatch:
            return False
        if b is NotImplemented:
            return NotImplemented
        return self.value == b

    def __hash__(self):
        return hash((self.ring, self.value))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"RingElement({self.ring!r}, {self.value!r})"

    def __str__(self):
        return self.ring.format(self.value)


class ResidueMap:
    """Reduction ``S -> k`` determined by its value on the generator ``u``.

    For int-backed sources the map is reduction modulo ``char(k)``.
    """

    def __init__(self, source: Ring, target: Ring, image=None):
        self.source = source
        self.target = target
        if not target.is_field:
            raise NotAField(f"residue target {target} is not a field")
        self.image = image
        if source == target:
            return
        p = target.characteristic
        if isinstance(source, MonicQuotient):
            if source.base.m % p:
                raise BadLocality(f"char {p} does not divide {source.base.m}")
            if image is None:
                raise NotLocal("a generator image is required")
            for g in (source.f,) + source.relations:
                if not target.is_zero(self._eval(g)):
                    raise BadLocality(f"{_int_poly_str(g)} does not vanish at the chosen image")
            if source.maximal_ideal is not None:
                for g in source.maximal_ideal:
                    if not target.is_zero(self._eval(g)):
                        raise BadLocality(f"maximal-ideal generator {_int_poly_str(g)} is not killed")
        elif isinstance(source, IntegerResidue):
            if source.m % p:
                raise BadLocality(f"char {p} does not divide {source.m}")
        else:
            raise NotLocal(f"cannot reduce {source}")

    def _eval(self, coeffs):
        k = self.target
        acc = k.zero()
        ubar = self.image
        power = k.one()
        for c in coeffs:
            if c:
                acc = k.add(acc, k.mul(k.from_int(c), power))
            power = k.mul(power, ubar)
        return acc

    def raw(self, a):
        if self.source == self.target:
            return a
        if isinstance(self.source, MonicQuotient):
            return self._eval(a)
        return self.target.from_int(a)

    def __call__(self, a):
        if isinstance(a, RingElement):
            if a.ring != self.source:
                raise RingMismatch(f"{a.ring} is not the source {self.source}")
            a = a.value
        return RingElement(self.target, self.raw(a))

    def __repr__(self):
        return f"ResidueMap({self.source!r} -> {self.target!r})"


def residue_reduce(rmap: ResidueMap, a) -> RingElement:
    return rmap(a)


def construct_ring(descriptor: dict) -> Ring:
    """Build a ring from a JSON-style descriptor.

    ``{"kind": "prime", "p": 7}``, ``{"kind": "zmod", "m": 9}`` or
    ``{"kind": "quotient", "m": 9, "f": "u^2 - 3", "maximal_ideal": ["u"]}``
    (``"p"`` instead of ``"m"`` gives an F_p base; ``"relations"`` adds
    further elements of Z[u] set to zero).
    """
    from .errors import SchemaError

    if not isinstance(descriptor, dict) or "kind" not in descriptor:
        raise SchemaError(f"ring descriptor must be an object with a 'kind': {descriptor!r}")
    kind = descriptor["kind"]
    if kind == "prime":
        return PrimeField(_int_field(descriptor, "p"))
    if kind == "zmod":
        mi = descriptor.get("maximal_ideal")
        mi = None if mi is None else [_int_constant(g) for g in mi]
        return IntegerResidue(_int_field(descriptor, "m"), mi)
    if kind == "integers":
        return IntegerRing()
    if kind == "quotient":
        if "p" in descriptor:
            base = PrimeField(_int_field(descriptor, "p"))
        else:
            base = IntegerResidue(_int_field(descriptor, "m"))
        f = parse_u_poly(descriptor.get("f", ""))
        rels = [parse_u_poly(g) for g in descriptor.get("relations", [])]
        mi = descriptor.get("maximal_ideal")
        mi = None if mi is None else [parse_u_poly(g) for g in mi]
        return MonicQuotient(base, f, rels, mi)
    raise SchemaError(f"unknown ring kind {kind!r}")


def _int_field(d, key):
    from .errors import SchemaError

    v = d.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemaError(f"ring descriptor field {key!r} must be an integer")
    return v


def _int_constant(g):
    c = parse_u_poly(g) if isinstance(g, str) else [int(g)]
    if len(c) > 1:
        from .errors import SchemaError

        raise SchemaError(f"maximal-ideal generator {g!r} of Z/m must be an integer")
    return c[0] if c else 0


def parse_u_poly(text) -> list[int]:
    """Integer coefficient list (low degree first) of a polynomial in ``u``."""
    from .grammar import parse_integer_poly

    return parse_integer_poly(text, "u")
