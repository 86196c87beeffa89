import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import dmat, naive_n_curvature, random_poly
from psl.dmod import EigenForm, eigenvalue_forms
from psl.errors import (
    LatticeMismatch,
    MissingSqrtQ,
    NotFlat,
    NotInvertible,
    NotSymplectic,
    SearchExhausted,
    ShapeMismatch,
    WrongOrder,
    ZeroEigenvalue,
)
from psl.multipoly import PolyMatrix, PolyRing
from psl.qmod import (
    QConnection,
    QuantumTorus,
    SymplecticMatrix,
    bernstein_generators,
    bernstein_step,
    check_lift_q,
    check_qflat,
    is_lagrangian_q,
    n_curvature,
    sp_twist,
)
from psl.rings import PrimeField, construct_ring

# (field, q, N) with q of exact order N
TORSION_POINTS = [(5, 4, 2), (7, 2, 3), (17, 4, 4), (11, 3, 5), (13, 4, 6), (3, 2, 2), (13, 3, 3)]


def sigma_strings(p, fill="1"):
    return [[fill if i == (j + 1) % p else "0" for j in range(p)] for i in range(p)]


def random_monomial_connection(p, q, N, rng, liftable=True, r=2):
    """Rank-1 a_x = alpha x^m1 y^n1, a_y = beta x^m2 y^n2 with n1 = m2 (or n1 = m2 mod N)."""
    k = PrimeField(p)
    m1, n2 = rng.randint(-3, 3), rng.randint(-3, 3)
    n1 = rng.randint(-3, 3)
    m2 = n1 if liftable else n1 + N * rng.randint(-1, 1)
    alpha, beta = rng.randint(1, p - 1), rng.randint(1, p - 1)
    return QConnection(k, q, [[[f"{alpha}*x1^{m1}*x2^{n1}"]], [[f"{beta}*x1^{m2}*x2^{n2}"]]]), (alpha, beta, m1, n1, m2, n2)


def random_diagonal_connection(p, q, N, rng, n=2):
    conns = [random_monomial_connection(p, q, N, rng)[0] for _ in range(n)]
    mats = [PolyMatrix.block_diag(*(c.a[i] for c in conns)) for i in range(2)]
    return QConnection(PrimeField(p), q, mats)


def unit_gauge(R, n, rng, steps=2):
    """Product of elementary Laurent matrices (determinant 1) and its inverse."""
    g, ginv = PolyMatrix.identity(R, n), PolyMatrix.identity(R, n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        f = random_poly(R, rng, 1, 2, laurent=True)
        e = [[R.one() if a == b else R.zero() for b in range(n)] for a in range(n)]
        ei = [[R.one() if a == b else R.zero() for b in range(n)] for a in range(n)]
        e[i][j], ei[i][j] = f, -f
        g, ginv = g * PolyMatrix(R, e), PolyMatrix(R, ei) * ginv
    return g, ginv


# --- quantum tori ----------------------------------------------------------

def test_defining_relation_and_e_basis_law():
    F = PrimeField(7)
    W = QuantumTorus.weyl(F, 1, 2)
    x, T = W.x(0), W.T(0)
    assert T * x == x * T * W.scalar(2)
    G = QuantumTorus(F, [[0, 1], [-1, 0]], 2, 4)
    assert G.E((1, 0)) * G.E((0, 1)) == G.E((1, 1), 4)
    assert G.E((0, 1)) * G.E((1, 0)) == G.E((1, 1), pow(4, -1, 7))


def test_missing_square_root():
    with pytest.raises(MissingSqrtQ):
        QuantumTorus.weyl(PrimeField(7), 1, 3)


def test_lattice_mismatch():
    A = QuantumTorus.weyl(PrimeField(7), 1, 2)
    B = QuantumTorus.weyl(PrimeField(7), 2, 2)
    with pytest.raises(LatticeMismatch):
        _ = A.x(0) * B.x(0)
    with pytest.raises(LatticeMismatch):
        A.E((1, 0, 0))


@settings(max_examples=500, deadline=None)
@given(st.integers(1, 2), st.integers(0, 2**32))
def test_qweyl_associativity(r, seed):
    rng = random.Random(seed)
    F = PrimeField(7)
    W = QuantumTorus.weyl(F, r, 2, 4)
    a, b, c = (W.random_element(rng) for _ in range(3))
    assert (a * b) * c == a * (b * c)


@pytest.mark.parametrize("p,q,N", TORSION_POINTS[:5])
@pytest.mark.parametrize("r", [1, 2])
def test_center_at_roots_of_unity(p, q, N, r):
    W = QuantumTorus.weyl(PrimeField(p), r, q)
    gens = [W.gen(i) for i in range(2 * r)]
    for i in range(r):
        for z in (W.x(i) ** N, W.T(i) ** N):
            assert all(z * g == g * z for g in gens)
        # below N the powers are not central
        assert W.x(i) ** (N - 1) * W.T(i) != W.T(i) * W.x(i) ** (N - 1)


# --- symplectic twists ------------------------------------------------------

def random_symplectic(s, rng, length=4):
    gens = bernstein_generators(s)
    g = SymplecticMatrix.identity(s)
    for _ in range(length):
        g = SymplecticMatrix(gens[rng.randrange(len(gens))][1]) @ g
    return g


def test_non_symplectic_rejected():
    with pytest.raises(NotSymplectic):
        SymplecticMatrix([[1, 1], [1, 1]])
    with pytest.raises(NotSymplectic):
        SymplecticMatrix([[1, 0, 0]])


def test_rotation_preserves_the_relation():
    F = PrimeField(7)
    W = QuantumTorus.weyl(F, 1, 2)
    g = SymplecticMatrix([[0, -1], [1, 0]])
    x, T = W.x(0), W.T(0)
    assert sp_twist(g, x) == W.E((0, 1))
    assert sp_twist(g, T * x - x * T * W.scalar(2)).is_zero()
    tx, tT = sp_twist(g, x), sp_twist(g, T)
    assert tT * tx == tx * tT * W.scalar(2)
    assert sp_twist(SymplecticMatrix.identity(1), x * T + x) == x * T + x


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 2), st.integers(0, 2**32))
def test_twist_is_functorial_and_multiplicative(r, seed):
    rng = random.Random(seed)
    W = QuantumTorus.weyl(PrimeField(7), r, 2, 4)
    g, h = random_symplectic(r, rng), random_symplectic(r, rng)
    a, b = W.random_element(rng), W.random_element(rng)
    assert sp_twist(g @ h, a) == sp_twist(g, sp_twist(h, a))
    assert sp_twist(g, a * b) == sp_twist(g, a) * sp_twist(g, b)


# --- Bernstein step ---------------------------------------------------------

def test_bernstein_examples():
    assert bernstein_step([(1, 0), (0, 1)]).g == SymplecticMatrix.identity(1)
    rot = bernstein_step([(1, 0), (2, 0)])
    assert rot.g.tolist() == [[0, -1], [1, 0]] and [v[-1] for v in rot.images] == [1, 2]
    shear = bernstein_step([(1, 0), (1, 2), (0, 2)])
    assert shear.g.tolist() == [[1, 0], [1, 1]] and [v[-1] for v in shear.images] == [1, 3, 2]


def test_bernstein_errors():
    with pytest.raises(ShapeMismatch):
        bernstein_step([(1, 0), (1, 0)])
    with pytest.raises(SearchExhausted):
        bernstein_step([(1, 0), (2, 0)], depth=0, random_tries=0)


def test_bernstein_is_deterministic():
    mons = [(1, 0, 2, 0), (1, 0, 2, 1), (0, 0, 2, 1), (3, 1, 2, 1)]
    assert bernstein_step(mons, seed=5).to_json() == bernstein_step(mons, seed=5).to_json()


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(*[st.integers(-3, 3)] * 4), min_size=2, max_size=6, unique=True))
def test_bernstein_postcondition(mons):
    res = bernstein_step(mons, depth=8, seed=0)
    last = [v[-1] for v in res.images]
    assert len(set(last)) == len(last)
    assert res.images == [res.g.apply(v) for v in mons]


# --- q-connections ------------------------------------------------------------

def test_qflat_examples():
    for p, q, N in TORSION_POINTS[:3]:
        assert check_qflat(QConnection(PrimeField(p), q, [[["1"]], [[f"x1^{N}"]]])).flat
    bad = QConnection(PrimeField(7), 2, [[["x2"]], [["x1^2"]]])
    assert not check_qflat(bad).flat
    ident = QConnection(PrimeField(7), 2, [[["1", "0"], ["0", "1"]]] * 2)
    assert check_qflat(ident).flat


def test_inverse_certification():
    with pytest.raises(NotInvertible):
        QConnection(PrimeField(7), 2, [[["1 + x1"]]])
    c = QConnection(PrimeField(7), 2, [[["3*x1^-2"]]])
    assert c.inverses[0] * c.a[0] == PolyMatrix.identity(c.xring, 1)


@pytest.mark.parametrize("p,q,N", TORSION_POINTS[:3])
def test_first_example_n_curvature(p, q, N):
    fam = n_curvature(QConnection(PrimeField(p), q, [[["1"]], [[f"x1^{N}"]]]), N, oracle=True)
    assert [m.to_strings() for m in fam.X] == [[["1"]], [[f"X1^{N}"]]]


def test_identity_curvature_and_errors():
    ident = QConnection(PrimeField(7), 2, [[["1", "0"], ["0", "1"]]] * 2)
    fam = n_curvature(ident, 3)
    assert all(C == PolyMatrix.identity(ident.xring, 2) for C in fam.C)
    with pytest.raises(WrongOrder):
        n_curvature(ident, 2)
    with pytest.raises(NotFlat):
        n_curvature(QConnection(PrimeField(7), 2, [[["x2"]], [["x1^2"]]]), 3)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(TORSION_POINTS), st.integers(0, 2**32))
def test_rank1_geometric_formula(point, seed):
    p, q, N = point
    rng = random.Random(seed)
    c, (alpha, beta, m1, n1, m2, n2) = random_monomial_connection(p, q, N, rng)
    fam = n_curvature(c, N, oracle=True)
    expected = pow(q, m1 * N * (N - 1) // 2 % (p - 1), p) * pow(alpha, N, p) % p
    X = fam.Xring
    assert fam.X[0][0, 0] == X.monomial((m1, n1), expected)
    for i in range(2):
        assert dmat(fam.C[i]) == naive_n_curvature(c.a, i, q, N, p, 2)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(TORSION_POINTS[:5]), st.booleans(), st.integers(0, 2**32))
def test_curvature_invariants(point, diagonal, seed):
    p, q, N = point
    rng = random.Random(seed)
    if diagonal:
        c = random_diagonal_connection(p, q, N, rng)
        g, ginv = unit_gauge(c.xring, 2, rng)
        c = c.gauge(g, ginv)
    else:
        c = random_monomial_connection(p, q, N, rng, liftable=False)[0]
    fam = n_curvature(c, N)
    assert fam.commute() and fam.invariants_hold()
    # C_j commutes with the whole nabla-action
    R = c.xring
    for _ in range(20):
        v = [random_poly(R, rng, 2, 2, laurent=True) for _ in range(c.n)]
        for i in range(c.r):
            for j in range(c.r):
                Cv = [sum((x * y for x, y in zip(row, v)), R.zero()) for row in fam.C[j].rows]
                lhs = c.apply(i, Cv)
                w = c.apply(i, v)
                rhs = [sum((x * y for x, y in zip(row, w)), R.zero()) for row in fam.C[j].rows]
                assert lhs == rhs


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(TORSION_POINTS[:5]), st.integers(0, 2**32))
def test_q_gauge_covariance(point, seed):
    p, q, N = point
    rng = random.Random(seed)
    c = random_diagonal_connection(p, q, N, rng)
    g, ginv = unit_gauge(c.xring, 2, rng, steps=3)
    assert g.det() == c.xring.one()
    fam, fam2 = n_curvature(c, N), n_curvature(c.gauge(g, ginv), N)
    for C, C2 in zip(fam.C, fam2.C):
        assert C2 == g * C * ginv


# --- q-Lagrangian test ------------------------------------------------------

def test_q_lagrangian_examples():
    for p, q, N in TORSION_POINTS[:3]:
        R = PolyRing(PrimeField(p), ("X1", "X2"), True)
        v = is_lagrangian_q([EigenForm((R.one(), R(f"X1^{N}")))])
        assert not v.lagrangian and v.witness["log_derivatives"][0] == "0"
        assert R.parse(v.witness["log_derivatives"][1]) == R.constant(N)
        assert is_lagrangian_q([EigenForm((R.one(), R.one()))]).lagrangian
        assert is_lagrangian_q([EigenForm((R("3*X1^2*X2^-1"), R("2*X1^-1*X2^4")))]).lagrangian
    R = PolyRing(PrimeField(5), ("X1", "X2"), True)
    with pytest.raises(ZeroEigenvalue):
        is_lagrangian_q([EigenForm((R.zero(), R.one()))])


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(TORSION_POINTS), st.integers(0, 2**32))
def test_liftable_rank1_q_connections_are_lagrangian(point, seed):
    p, q, N = point
    rng = random.Random(seed)
    c, (alpha, beta, m1, n1, m2, n2) = random_monomial_connection(p, q, N, rng)
    forms = eigenvalue_forms(n_curvature(c, N), "rank1")
    assert is_lagrangian_q(forms).lagrangian
    if (p, q, N) == (3, 2, 2):
        S = construct_ring({"kind": "quotient", "p": 3, "f": "u^2-u+1", "maximal_ideal": ["u-2"]})
        lift = QConnection(S, S.gen().value, [m.to_strings() for m in c.a])
        res = check_lift_q(lift, S.residue_map(), c, N)
        assert res.flat_over_S and res.qN_not_one and res.reduction_matches


# --- q-liftability -------------------------------------------------------------

def rank3_lift(S):
    p, N = 3, 2
    ax = [[f"u^{N * i}" if i == j else "0" for j in range(p)] for i in range(p)]
    return QConnection(S, S.gen().value, [ax, sigma_strings(p, "x1^2")])


def test_rank_p_example_lifts():
    k = PrimeField(3)
    target = QConnection(k, 2, [[["1" if i == j else "0" for j in range(3)] for i in range(3)], sigma_strings(3, "x1^2")])
    Z9 = construct_ring({"kind": "quotient", "m": 9, "f": "u^2-u+1", "maximal_ideal": ["3", "u-2"]})
    assert check_qflat(rank3_lift(Z9)).flat
    S = construct_ring({"kind": "quotient", "p": 3, "f": "u^2-u+1", "maximal_ideal": ["u-2"]})
    res = check_lift_q(rank3_lift(S), S.residue_map(), target, 2)
    assert res.flat_over_S and res.qN_not_one and res.qN_minus_one_square_zero and res.reduction_matches
    fam = n_curvature(target, 2, oracle=True)
    X = fam.Xring
    sigma2 = PolyMatrix.from_strings(X, sigma_strings(3)) ** 2
    assert fam.X[1] == sigma2 * X("X1^2") and fam.X[0] == PolyMatrix.identity(X, 3)
    forms = eigenvalue_forms(fam, "verify", [["1", "X1^2"]])
    assert not is_lagrangian_q(forms).lagrangian


def test_constant_lift_of_counterexample_is_not_flat():
    S = construct_ring({"kind": "quotient", "p": 3, "f": "u^2-u+1", "maximal_ideal": ["u-2"]})
    lift = QConnection(S, S.gen().value, [[["1"]], [["x1^2"]]])
    target = QConnection(PrimeField(3), 2, [[["1"]], [["x1^2"]]])
    res = check_lift_q(lift, S.residue_map(), target, 2)
    assert not res.flat_over_S and res.reduction_matches
    q = S.gen()
    R = lift.xring
    assert res.flatness.witness[0, 0] == R("x1^2") * (q * q - 1) or res.flatness.witness[0, 0] == -(R("x1^2") * (q * q - 1))


def test_q_lift_shape_mismatch():
    S = construct_ring({"kind": "quotient", "p": 3, "f": "u^2-u+1", "maximal_ideal": ["u-2"]})
    with pytest.raises(ShapeMismatch):
        check_lift_q(QConnection(S, S.gen().value, [[["1"]]]), S.residue_map(),
                     QConnection(PrimeField(3), 2, [[["1"]], [["1"]]]), 2)
