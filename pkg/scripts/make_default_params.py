"""Regenerates the shipped parameter file from the shipped constraint file.

Run from the repo root:

    python scripts/make_default_params.py

The long budget here buys a tighter fit than the documented verification
run (seed 20170904, budget 12000) that the test suite repeats; both use
the same constraint file and the same seed.
"""

from pathlib import Path

from requisites.calibrate import calibrate
from requisites.modelfile import load_constraints, save_params

DATA = Path(__file__).resolve().parent.parent / "src" / "requisites" / "data"
SEED = 20170904
BUDGET = 60_000


def main() -> None:
    constraints = load_constraints(DATA / "trajectory.constraints.yaml")
    result = calibrate(constraints, seed=SEED, budget=BUDGET)
    save_params(result.params, DATA / "requisites.params.yaml")
    print(f"seed {SEED}, budget {BUDGET}")
    print(f"residual {result.residual:.6e} after {result.evaluations} evaluations")
    print(f"wrote {DATA / 'requisites.params.yaml'}")


if __name__ == "__main__":
    main()
