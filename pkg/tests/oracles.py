"""Independent reference computations used to cross-check the library.

Everything here works on plain ``{exponent tuple: int}`` dictionaries modulo
a prime, so it shares no arithmetic with the code under test.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from psl.multipoly import LaurentPoly, PolyMatrix, PolyRing


# --- dict polynomials mod p ------------------------------------------------

def to_dict(f: LaurentPoly) -> dict:
    R = f.ring.coeffs
    p = R.characteristic
    return {e: int(c) % p for e, c in f.terms.items() if int(c) % p}


def from_dict(ring: PolyRing, d: dict) -> LaurentPoly:
    out = ring.zero()
    for e, c in d.items():
        out = out + ring.monomial(e, c)
    return out


def dadd(f, g, p):
    out = dict(f)
    for e, c in g.items():
        v = (out.get(e, 0) + c) % p
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def dmul(f, g, p):
    out = {}
    for (e1, c1), (e2, c2) in itertools.product(f.items(), g.items()):
        e = tuple(a + b for a, b in zip(e1, e2))
        out[e] = (out.get(e, 0) + c1 * c2) % p
    return {e: c for e, c in out.items() if c}


def ddiff(f, i, p):
    out = {}
    for e, c in f.items():
        if e[i] % p:
            e2 = list(e)
            e2[i] -= 1
            out[tuple(e2)] = (c * e[i]) % p
    return {e: c for e, c in out.items() if c}


def dshift(f, i, q, p, power=1):
    """f(..., q^power x_i, ...) for integer q mod p."""
    return {e: (c * pow(q, power * e[i], p)) % p for e, c in f.items()}


def dmat(m: PolyMatrix):
    return [[to_dict(x) for x in row] for row in m.rows]


def dmatmul(A, B, p):
    n = len(A)
    out = [[{} for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = {}
            for k in range(n):
                acc = dadd(acc, dmul(A[i][k], B[k][j], p), p)
            out[i][j] = acc
    return out


def d_identity(n, nvars):
    zero = (0,) * nvars
    return [[({zero: 1} if i == j else {}) for j in range(n)] for i in range(n)]


# --- curvature oracles -----------------------------------------------------

def naive_p_curvature(a_mats, j, p, nvars):
    """Apply v -> d_j v + a_j v to every basis vector, p times."""
    A = dmat(a_mats[j])
    M = d_identity(len(A), nvars)
    for _ in range(p):
        D = [[ddiff(x, j, p) for x in row] for row in M]
        AM = dmatmul(A, M, p)
        M = [[dadd(D[r][c], AM[r][c], p) for c in range(len(A))] for r in range(len(A))]
    return M


def naive_n_curvature(a_mats, i, q, N, p, nvars):
    """N-fold application of v -> T_i^{-1}(a_i v) to the identity matrix."""
    A = dmat(a_mats[i])
    M = d_identity(len(A), nvars)
    qinv = pow(q, -1, p)
    for _ in range(N):
        AM = dmatmul(A, M, p)
        M = [[dshift(x, i, qinv, p) for x in row] for row in AM]
    return M


def rank1_closed_form(a: dict, j: int, p: int) -> dict:
    """d_j^{p-1} a + a^p."""
    if not a:
        return {}
    d = a
    for _ in range(p - 1):
        d = ddiff(d, j, p)
    ap = {tuple(0 for _ in next(iter(a))): 1}
    for _ in range(p):
        ap = dmul(ap, a, p)
    return dadd(d, ap, p)


# --- determinants ------------------------------------------------------------

def cofactor_det(rows, zero, one):
    """Laplace expansion along the first row."""
    n = len(rows)
    if n == 0:
        return one
    if n == 1:
        return rows[0][0]
    acc = zero
    for c in range(n):
        minor = [r[:c] + r[c + 1:] for r in rows[1:]]
        term = rows[0][c] * cofactor_det(minor, zero, one)
        acc = acc + term if c % 2 == 0 else acc - term
    return acc


def rational_det(rows):
    """Exact determinant over Q by Gaussian elimination with Fractions."""
    A = [[Fraction(x) for x in r] for r in rows]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return det


# --- random generators ---------------------------------------------------------

def random_poly(ring: PolyRing, rng: random.Random, max_deg=3, terms=3, laurent=False):
    p = ring.coeffs.characteristic or 7
    out = ring.zero()
    for _ in range(rng.randint(0, terms)):
        if laurent:
            e = tuple(rng.randint(-max_deg, max_deg) for _ in range(ring.nvars))
        else:
            e = tuple(rng.randint(0, max_deg) for _ in range(ring.nvars))
        out = out + ring.monomial(e, rng.randrange(p))
    return out


def random_integer_poly(nvars, rng, max_deg=3, terms=3, bound=5):
    return {tuple(rng.randint(0, max_deg) for _ in range(nvars)): rng.randint(-bound, bound) for _ in range(terms)}


def int_dict_to_poly(ring: PolyRing, d: dict) -> LaurentPoly:
    out = ring.zero()
    for e, c in d.items():
        out = out + ring.monomial(e, c)
    return out


def int_dict_diff(d: dict, i: int) -> dict:
    out = {}
    for e, c in d.items():
        if e[i]:
            e2 = list(e)
            e2[i] -= 1
            out[tuple(e2)] = out.get(tuple(e2), 0) + c * e[i]
    return out


def elementary_product(ring: PolyRing, n, rng, steps=3, max_deg=2):
    """Random product of elementary matrices g and its inverse, both polynomial."""
    g = PolyMatrix.identity(ring, n)
    ginv = PolyMatrix.identity(ring, n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        f = random_poly(ring, rng, max_deg=max_deg, terms=2)
        e = [[ring.one() if r == c else ring.zero() for c in range(n)] for r in range(n)]
        einv = [[ring.one() if r == c else ring.zero() for c in range(n)] for r in range(n)]
        e[i][j] = f
        einv[i][j] = -f
        g = g * PolyMatrix(ring, e)
        ginv = PolyMatrix(ring, einv) * ginv
    return g, ginv


def random_skew(n, rng, bound=3):
    B = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = rng.randint(-bound, bound)
            B[i][j], B[j][i] = v, -v
    return B


def random_skew_symmetrizable(n, m, rng, bound=4):
    """Random m x n seed matrix with skew-symmetrizable top block."""
    D = [rng.randint(1, 3) for _ in range(n)]
    B = [[0] * n for _ in range(m)]
    for i in range(n):
        for j in range(i + 1, n):
            # d_i b_ij = -d_j b_ji: pick b_ij = d_j * t, b_ji = -d_i * t
            t = rng.randint(-1, 1)
            B[i][j], B[j][i] = D[j] * t, -D[i] * t
    for i in range(n, m):
        for j in range(n):
            B[i][j] = rng.randint(-bound, bound)
    return B, D
