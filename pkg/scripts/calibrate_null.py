"""Score the candidate null-marking angles and report which one is chosen."""
from __future__ import annotations

import argparse
import json
import math
from dataclasses import dataclass

from eigenmark import harness
from eigenmark.schemes import NULL_ANGLE_CANDIDATES


@dataclass
class CalibrationConfig:
    reps: int = 40
    shots: int = 1024
    seed: int = harness.DEFAULT_SEED
    tag_rotation: str = "rz"
    json: bool = False


def main(cfg: CalibrationConfig) -> harness.Calibration:
    cal = harness.calibrate_null_angle(
        NULL_ANGLE_CANDIDATES, reps=cfg.reps, shots=cfg.shots, master_seed=cfg.seed, tag_rotation=cfg.tag_rotation
    )
    target = harness.REFERENCE_MEANS["null"]
    if cfg.json:
        print(json.dumps({"chosen": cal.chosen, "candidates": {repr(a): r for a, r in cal.candidates.items()}}, indent=1))
        return cal
    print(f"target means {target}")
    for angle, r in cal.candidates.items():
        mark = "*" if angle == cal.chosen else " "
        means = ", ".join(f"{m:+.3f}" for m in r["means"])
        print(
            f"{mark} {angle / math.pi:+.2f} pi  means ({means})  max dev {r['deviation']:.3f}  "
            f"no-winner gap {abs(r['means'][0] - target[0]):.3f}  stands out={r['stands_out']}  "
            f"suppressed={r['suppressed']}"
        )
    return cal


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=40)
    ap.add_argument("--shots", type=int, default=1024)
    ap.add_argument("--seed", type=int, default=harness.DEFAULT_SEED)
    ap.add_argument("--tag-rotation", choices=["rz", "phase"], default="rz")
    ap.add_argument("--json", action="store_true")
    main(CalibrationConfig(**vars(ap.parse_args())))
