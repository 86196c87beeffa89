"""A flat rank-1 connection whose p-support is not Lagrangian, for several primes.

Run: python3 demos/nonlagrangian_support.py
"""

from psl.dmod import Connection, check_lift, eigenvalue_forms, is_lagrangian_differential, p_curvature, support_equations
from psl.psupport import lagrangian_certificate
from psl.rings import PrimeField, construct_ring


def main():
    for p in (3, 5, 7):
        conn = Connection(PrimeField(p), [[["0"]], [[f"x1^{p}*x2^{p - 1}"]]])
        fam = p_curvature(conn, oracle=True)
        print(f"p = {p}")
        print("  curvature in X:", [m.to_strings()[0][0] for m in fam.X])
        print("  support generators:", [str(g) for g in support_equations(fam).generators])
        verdict = is_lagrangian_differential(eigenvalue_forms(fam, "rank1"))
        print("  eigenvalue test:", verdict.lagrangian, verdict.witness)
        cert = lagrangian_certificate(support_equations(fam), pth_roots=p)
        print("  ideal certificate:", cert.lagrangian, cert.to_json()["witness"])

    # the naive lift to Z/9 is not flat, so the connection does not lift at rank 1
    Z9 = construct_ring({"kind": "zmod", "m": 9, "maximal_ideal": ["3"]})
    lift = Connection(Z9, [[["0"]], [["x1^3*x2^2"]]])
    res = check_lift(lift, Z9.residue_map(), Connection(PrimeField(3), [[["0"]], [["x1^3*x2^2"]]]))
    print("naive lift over Z/9 flat:", res.flat_over_S, "witness", res.flatness.witness.to_strings())


if __name__ == "__main__":
    main()
