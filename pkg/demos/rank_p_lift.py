"""A rank-p lift of the non-Lagrangian example, over two candidate lift rings.

Run: python3 demos/rank_p_lift.py
"""

import json
from pathlib import Path

from psl.tasks import run_task

TASKS = Path(__file__).resolve().parent.parent / "tasks"


def main():
    report, code = run_task(json.loads((TASKS / "rank_p_lift.json").read_text()))
    for res in report["results"]:
        ring = res["ring"]
        print(f"S = (Z/{ring['m']})[u]/({ring['f']}) with extra relations {ring.get('relations', [])}")
        print("  flat over S:", res["flat_over_S"], " reduction matches:", res["reduction_matches"])
        if not res["flat_over_S"]:
            print("  nonzero flatness entry:", res["flatness"]["witness"][1][2])
    print("some ring gives a lift:", report["liftable"], "exit code", code)

    reduced, _ = run_task(json.loads((TASKS / "rank_p_reduction.json").read_text()))
    print("the reduction (three copies) is Lagrangian:", reduced["lagrangian"])


if __name__ == "__main__":
    main()
