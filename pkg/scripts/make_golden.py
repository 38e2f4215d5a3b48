"""Regenerate the exact-mode golden file used by the harness tests."""
import argparse
from pathlib import Path

from eigenmark import harness

DEFAULT = Path(__file__).resolve().parents[1] / "tests" / "golden" / "exact_n2.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=DEFAULT)
    args = ap.parse_args()
    plan = harness.ExperimentPlan(n=2, reps=1, shots=1024, mode="exact")
    harness.save(harness.run_plan(plan, threads=1), args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
