import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from oracles import random_skew, random_skew_symmetrizable
from psl import lattice
from psl.cluster import (
    ClusterChart,
    CompatiblePair,
    Seed,
    check_compatible,
    cluster_ring,
    exchange_mutation,
    isogeny_decomposition,
    laurent_check,
    mutate_matrix,
    mutate_pair,
    mutate_seed,
    mutation_matrix_E,
    mutation_sequence,
    principal_pair,
)
from psl.errors import FrozenIndex, ShapeMismatch
from psl.multipoly import RatFunc

A2 = [[0, 1], [-1, 0]]


def random_seed(rng):
    n = rng.randint(1, 4)
    m = rng.randint(n, 6)
    B, D = random_skew_symmetrizable(n, m, rng)
    return Seed(B, D)


# --- seed mutation ---------------------------------------------------------

def test_seed_mutation_examples():
    assert mutate_matrix(A2, 1) == [[0, -1], [1, 0]]
    B = [[0, 0, 1], [0, 0, 0], [-1, 0, 0]]
    assert mutate_matrix(B, 2) == B
    # correction term at work on a 3-cycle
    assert mutate_matrix([[0, 1, -1], [-1, 0, 1], [1, -1, 0]], 1) == [[0, -1, 1], [1, 0, 0], [-1, 0, 0]]


def test_frozen_index_rejected():
    s = Seed([[0, 1], [-1, 0], [2, 1]])
    with pytest.raises(FrozenIndex):
        mutate_seed(s, 3)
    with pytest.raises(FrozenIndex):
        exchange_mutation(ClusterChart.initial(3), s, 3)


def test_seed_validation():
    with pytest.raises(ShapeMismatch):
        Seed([[0, 1], [1, 0]])
    with pytest.raises(ShapeMismatch):
        Seed([[0, 1, 2]])
    assert Seed([[0, 2], [-1, 0]], [1, 2]).is_skew_symmetrizable()


@settings(max_examples=500, deadline=None)
@given(st.integers(0, 2**32))
def test_mutation_is_an_involution_preserving_d(seed):
    rng = random.Random(seed)
    s = random_seed(rng)
    k = rng.randint(1, s.n)
    t = mutate_seed(s, k)
    assert t.is_skew_symmetrizable() and t.D == s.D
    assert mutate_seed(t, k) == s


# --- compatible pairs ------------------------------------------------------

def test_compatibility_examples():
    res = check_compatible(A2, A2)
    assert res.compatible and res.D == (1, 1)
    assert not check_compatible([[0, 0], [0, 0]], A2).compatible
    with pytest.raises(ShapeMismatch):
        check_compatible([[0]], A2)


def test_a2_pair_mutation():
    pair = CompatiblePair(A2, Seed(A2))
    assert mutation_matrix_E(A2, 1) == [[-1, 0], [0, 1]]
    mutated = mutate_pair(pair, 1)
    assert [list(r) for r in mutated.Lam] == [[0, -1], [1, 0]]
    assert mutated.seed.tolist() == [[0, -1], [1, 0]] and mutated.D == (1, 1)
    assert mutate_pair(mutated, 1) == pair


def walk_pairs(pair, depth):
    frontier = [pair]
    seen = 0
    for _ in range(depth):
        nxt = []
        for p in frontier:
            for k in range(1, p.seed.n + 1):
                q = mutate_pair(p, k)
                assert q.D == pair.D and check_compatible(q.Lam, q.seed.tolist()).compatible
                assert mutate_pair(q, k) == p
                nxt.append(q)
                seen += 1
        frontier = nxt
    return seen


def test_a2_pair_to_depth_three():
    assert walk_pairs(CompatiblePair(A2, Seed(A2)), 3) == 14


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32))
def test_principal_family_stays_compatible(n, seed):
    rng = random.Random(seed)
    pair = principal_pair(random_skew(n, rng))
    assert pair.D == (1,) * n
    walk_pairs(pair, 3)


# --- exchange relations -------------------------------------------------------

def test_a2_exchange():
    chart = exchange_mutation(ClusterChart.initial(2), Seed(A2), 1)
    R = cluster_ring(2)
    assert chart.variables[0] == R("(1 + X2)*X1^-1")
    assert RatFunc(chart.variables[0]) == RatFunc(R("1 + X2"), R("X1"))
    assert chart.variables[1] == R("X2")
    assert chart.strings()[1] == "X2"


def test_pentagon_periodicity():
    seed, chart = mutation_sequence(Seed(A2), [1, 2, 1, 2, 1])
    assert set(chart.strings()) == {"X1", "X2"}
    assert chart.strings() == ["X2", "X1"]
    # the five distinct cluster variables along the way
    seen = set()
    s, ch = Seed(A2), ClusterChart.initial(2)
    for k in [1, 2, 1, 2, 1]:
        ch = exchange_mutation(ch, s, k)
        s = mutate_seed(s, k)
        seen.update(ch.strings())
    assert len(seen) == 5


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32))
def test_frozen_variables_unchanged(seed):
    rng = random.Random(seed)
    s = random_seed(rng)
    word = [rng.randint(1, s.n) for _ in range(3)]
    _, chart = mutation_sequence(s, word)
    initial = ClusterChart.initial(s.m)
    assert chart.variables[s.n:] == initial.variables[s.n:]


def test_laurent_phenomenon_to_depth_six():
    ok, count, bad = laurent_check(Seed(A2), 6)
    assert ok and bad is None and count == 12
    ok3, _, _ = laurent_check(Seed([[0, 1, -1], [-1, 0, 1], [1, -1, 0]]), 4)
    assert ok3


# --- isogenies -------------------------------------------------------------------

def test_isogeny_examples():
    J = isogeny_decomposition(A2)
    assert J.d == 1 and J.Y == [[1, 0], [0, 1]] and J.checks_pass
    J2 = isogeny_decomposition([[0, 2], [-2, 0]])
    assert J2.d == 2 and J2.r == 1 and J2.checks_pass
    assert J2.Y == [[2, 0], [0, 1]] and J2.commutation[0][1] == 4
    Z = isogeny_decomposition([[0] * 3 for _ in range(3)])
    assert Z.r == 0 and len(Z.kernel) == 3 and Z.checks_pass and Z.unimodular


def test_isogeny_rejects_non_skew():
    with pytest.raises(ShapeMismatch):
        isogeny_decomposition([[0, 1], [1, 0]])


def rank_two_form(s, rng):
    while True:
        a = [rng.randint(-3, 3) for _ in range(s)]
        b = [rng.randint(-3, 3) for _ in range(s)]
        L = [[a[i] * b[j] - b[i] * a[j] for j in range(s)] for i in range(s)]
        if lattice.rank(L) == 2:
            return L


@pytest.mark.parametrize("index", range(20))
def test_random_rank_two_isogenies(index):
    rng = random.Random(1000 + index)
    s = rng.randint(2, 4)
    L = rank_two_form(s, rng)
    iso = isogeny_decomposition(L)
    assert iso.r == 1 and len(iso.kernel) == s - 2
    assert iso.checks_pass and iso.unimodular
    assert iso.commutation == [[0, iso.d ** 2], [-iso.d ** 2, 0]]
    # kernel vectors are radical for the form
    for v, w in product(iso.kernel, range(s)):
        assert sum(v[i] * L[i][w] for i in range(s)) == 0
