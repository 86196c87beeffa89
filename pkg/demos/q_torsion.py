"""q-connections at a root of unity: N-curvature, q-Lagrangian test and a rank-p lift.

Run: python3 demos/q_torsion.py
"""

from psl.dmod import eigenvalue_forms
from psl.qmod import QConnection, check_lift_q, is_lagrangian_q, n_curvature
from psl.rings import PrimeField, construct_ring


def sigma(p, fill):
    return [[fill if i == (j + 1) % p else "0" for j in range(p)] for i in range(p)]


def main():
    for p, q, N in ((3, 2, 2), (7, 2, 3), (5, 2, 4)):
        conn = QConnection(PrimeField(p), q, [[["1"]], [[f"x1^{N}"]]])
        fam = n_curvature(conn, N, oracle=True)
        verdict = is_lagrangian_q(eigenvalue_forms(fam, "rank1"))
        print(f"F_{p}, q = {q} of order {N}: C_X = {[m.to_strings()[0][0] for m in fam.X]},",
              "q-Lagrangian:", verdict.lagrangian, verdict.witness)

    # rank 3 at p = 3, N = 2: a flat lift where q^2 - 1 is a nonzero square-zero element
    S = construct_ring({"kind": "quotient", "p": 3, "f": "u^2-u+1", "maximal_ideal": ["u-2"]})
    ax = [[f"u^{2 * i}" if i == j else "0" for j in range(3)] for i in range(3)]
    lift = QConnection(S, S.gen().value, [ax, sigma(3, "x1^2")])
    identity = [["1" if i == j else "0" for j in range(3)] for i in range(3)]
    target = QConnection(PrimeField(3), 2, [identity, sigma(3, "x1^2")])
    res = check_lift_q(lift, S.residue_map(), target, 2)
    print("lift flat:", res.flat_over_S, " q^N - 1 nonzero:", res.qN_not_one,
          " square zero:", res.qN_minus_one_square_zero)
    fam = n_curvature(target, 2)
    forms = eigenvalue_forms(fam, "verify", [["1", "X1^2"]])
    print("reduction C_X:", [m.to_strings() for m in fam.X])
    print("reduction q-Lagrangian:", is_lagrangian_q(forms).lagrangian)


if __name__ == "__main__":
    main()
