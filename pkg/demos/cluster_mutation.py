"""Mutations of the A2 seed, a principal-coefficient pair, and two quantum-torus isogenies.

Run: python3 demos/cluster_mutation.py
"""

from psl.cluster import (
    ClusterChart,
    Seed,
    exchange_mutation,
    isogeny_decomposition,
    laurent_check,
    mutate_pair,
    mutate_seed,
    principal_pair,
)


def main():
    seed, chart = Seed([[0, 1], [-1, 0]]), ClusterChart.initial(2)
    print("A2 cluster walk:")
    for k in (1, 2, 1, 2, 1):
        chart = exchange_mutation(chart, seed, k)
        seed = mutate_seed(seed, k)
        print(f"  mu_{k}: {chart.strings()}")
    ok, count, _ = laurent_check(Seed([[0, 1], [-1, 0]]), 6)
    print(f"Laurent to depth 6: {ok} ({count} variables)")

    pair = principal_pair([[0, 1, 0], [-1, 0, 1], [0, -1, 0]])
    for k in (1, 2, 3):
        pair = mutate_pair(pair, k)
    print("principal pair after mu_3 mu_2 mu_1:", pair)

    for lam in ([[0, 2], [-2, 0]], [[0, 1, 2], [-1, 0, 3], [-2, -3, 0]]):
        iso = isogeny_decomposition(lam)
        print(f"form {lam}: kernel {iso.kernel}, d = {iso.d}, Y = {iso.Y}, checks pass: {iso.checks_pass}")


if __name__ == "__main__":
    main()
