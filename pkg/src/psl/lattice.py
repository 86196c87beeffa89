"""Exact integer linear algebra: Hermite and Smith forms, kernels, solving.

Matrices are plain lists of lists of Python ints, so entries never overflow.
"""

from __future__ import annotations


def _copy(A):
    return [list(map(int, row)) for row in A]


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B):
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(A))]


def transpose(A, ncols=None):
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*A)]


def _xgcd(a, b):
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def column_hnf(A, ncols=None):
    """Column-style Hermite normal form.

    Returns ``(H, U, pivots)`` with ``A U = H``, ``U`` unimodular, and
    ``H`` in column echelon form: column ``k`` has its first nonzero entry
    (positive) in row ``pivots[k]``, rows strictly increasing, and all
    columns from ``len(pivots)`` on are zero.
    """
    H = _copy(A)
    m = len(H)
    n = len(H[0]) if m else (ncols or 0)
    U = identity(n)

    def colop(j, k, a, b, c, d):
        # (col_j, col_k) <- (a*col_j + b*col_k, c*col_j + d*col_k)
        for M in (H, U):
            for row in M:
                x, y = row[j], row[k]
                row[j] = a * x + b * y
                row[k] = c * x + d * y

    pivots = []
    c = 0
    for i in range(m):
        if c >= n:
            break
        for k in range(c + 1, n):
            if H[i][k] == 0:
                continue
            a, b = H[i][c], H[i][k]
            g, s, t = _xgcd(a, b)
            colop(c, k, s, t, -b // g, a // g)
        if H[i][c] == 0:
            continue
        if H[i][c] < 0:
            for M in (H, U):
                for row in M:
                    row[c] = -row[c]
        piv = H[i][c]
        for k in range(c):
            q = H[i][k] // piv
            if q:
                for M in (H, U):
                    for row in M:
                        row[k] -= q * row[c]
        pivots.append(i)
        c += 1
    return H, U, pivots


def rank(A):
    return len(column_hnf(A)[2])


def integer_kernel(A, ncols=None):
    """Basis (as a list of vectors) of the saturated lattice ``{x : A x = 0}``."""
    H, U, pivots = column_hnf(A, ncols)
    n = len(U)
    return [[U[i][k] for i in range(n)] for k in range(len(pivots), n)]


def solve_integer(A, b, ncols=None):
    """Return an integer vector ``x`` with ``A x = b``, or None if none exists."""
    H, U, pivots = column_hnf(A, ncols)
    n = len(U)
    y = [0] * n
    k = 0
    for i, bi in enumerate(b):
        res = bi - sum(H[i][j] * y[j] for j in range(k))
        if k < len(pivots) and pivots[k] == i:
            q, r = divmod(res, H[i][k])
            if r:
                return None
            y[k] = q
            k += 1
        elif res:
            return None
    return [sum(U[i][j] * y[j] for j in range(n)) for i in range(n)]


def row_hnf(rows, width):
    """Upper-triangular row Hermite form of the lattice spanned by ``rows``.

    Returns the nonzero rows; row ``k`` has a positive pivot and entries
    above each pivot reduced into ``[0, pivot)``.
    """
    if not rows:
        return []
    H, _, pivots = column_hnf(transpose(rows), len(rows))
    out = []
    for k, p in enumerate(pivots):
        out.append([H[i][k] for i in range(width)])
    return out


def reduce_mod_lattice(v, hnf_rows):
    """Canonical representative of ``v`` modulo a full-rank row HNF lattice."""
    v = list(v)
    for row in hnf_rows:
        c = next(i for i, x in enumerate(row) if x)
        q = v[c] // row[c]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return v


def smith_normal_form(A):
    """Return ``(S, P, Q)`` with ``P A Q = S`` diagonal, ``d_i | d_{i+1}``.

    ``P`` and ``Q`` are unimodular.
    """
    S = _copy(A)
    m = len(S)
    n = len(S[0]) if m else 0
    P = identity(m)
    Q = identity(n)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for M in (S, Q):
            for row in M:
                row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(m, n):
        nz = [(abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, n) if S[i][j]]
        if not nz:
            break
        while True:
            _, i, j = min((abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, n) if S[i][j])
            swap_rows(t, i)
            swap_cols(t, j)
            piv = S[t][t]
            for i in range(t + 1, m):
                q = S[i][t] // piv
                if q:
                    for M in (S, P):
                        M[i] = [x - q * y for x, y in zip(M[i], M[t])]
            for j in range(t + 1, n):
                q = S[t][j] // piv
                if q:
                    for M in (S, Q):
                        for row in M:
                            row[j] -= q * row[t]
            if any(S[i][t] for i in range(t + 1, m)) or any(S[t][j] for j in range(t + 1, n)):
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % piv), None)
            if bad is None:
                break
            # fold a row with a non-divisible entry into row t
            S[t] = [x + y for x, y in zip(S[t], S[bad])]
            P[t] = [x + y for x, y in zip(P[t], P[bad])]
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            P[t] = [-x for x in P[t]]
        t += 1
    return S, P, Q


def det(A):
    """Determinant of a square integer matrix (Bareiss fraction-free)."""
    M = _copy(A)
    n = len(M)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]
