"""Write CSV series for plotting: amplitude trajectories and per-repetition counts."""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from pathlib import Path

from eigenmark import harness
from eigenmark.grover import trajectory_csv


@dataclass
class FigureConfig:
    Ns: list[int] = field(default_factory=lambda: [4, 16, 64, 1024])
    jmax: int = 40
    reps: int = 40
    shots: int = 1024
    seed: int = harness.DEFAULT_SEED
    out_dir: Path = Path("runs/figures")


def main(cfg: FigureConfig) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    (cfg.out_dir / "trajectory.csv").write_text(trajectory_csv(cfg.Ns, cfg.jmax))
    plan = harness.ExperimentPlan(reps=cfg.reps, shots=cfg.shots, master_seed=cfg.seed)
    results = harness.run_plan(plan)
    (cfg.out_dir / "counts.csv").write_text(harness.figure_counts_csv(results))
    print(f"wrote trajectory.csv and counts.csv to {cfg.out_dir}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", dest="Ns", type=int, nargs="+", default=FigureConfig().Ns)
    ap.add_argument("--jmax", type=int, default=40)
    ap.add_argument("--reps", type=int, default=40)
    ap.add_argument("--shots", type=int, default=1024)
    ap.add_argument("--seed", type=int, default=harness.DEFAULT_SEED)
    ap.add_argument("--out-dir", type=Path, default=Path("runs/figures"))
    main(FigureConfig(**vars(ap.parse_args())))
