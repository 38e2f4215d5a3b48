"""Experiment protocol: every winner subset, repeated shots, tables and persistence.

Sampling uses numpy's PCG64 generator.  Each (scheme, scenario, repetition)
job gets its own seed from ``numpy.random.SeedSequence([master_seed,
scheme_id, scenario_bitmask, rep])``, so results do not depend on the order
or thread in which jobs run.
"""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .grover import WinnerScenario
from .metrics import (
    MetricsRecord,
    ShotCounts,
    aggregate_stats,
    compute_record,
    distinguishability_avg,
    distinguishability_worst,
    stats_json,
    UndefinedMetricError,
)
from .schemes import MARKING_SCHEMES, NULL_ANGLE, NULL_ANGLE_CANDIDATES, SchemeKind, run_scheme

DEFAULT_SEED = 7
MAX_EXHAUSTIVE_INPUTS = 4
SCHEME_IDS = {SchemeKind.EIGENMARKING: 1, SchemeKind.NULL_MARKING: 2, SchemeKind.SUBTLE_MARKING: 3}
THREADS_ENV = "EIGENMARK_THREADS"
SCHEMA_VERSION = 1

# Reference marking-factor means per winner count (0..4), two input qubits.
REFERENCE_MEANS = {
    "eigen": (0.01, 0.44, 0.46, 0.45, 0.95),
    "null": (-0.42, 0.08, 0.16, 0.18, 0.10),
    "subtle": (-0.73, 0.19, 0.48, 0.70, 0.33),
}


class ResultsFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentPlan:
    n: int = 2
    schemes: tuple[SchemeKind, ...] = MARKING_SCHEMES
    reps: int = 40
    shots: int = 1024
    master_seed: int = DEFAULT_SEED
    mode: str = "sampled"
    null_angle: float = NULL_ANGLE
    tag_rotation: str = "rz"

    def __post_init__(self):
        object.__setattr__(self, "schemes", tuple(SchemeKind.parse(s) for s in self.schemes))
        if self.reps < 1 or self.shots < 1:
            raise ValueError("reps and shots must be >= 1")
        if self.mode not in ("sampled", "exact"):
            raise ValueError(f"mode must be 'sampled' or 'exact', got {self.mode!r}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master seed must fit in 64 bits")
        for s in self.schemes:
            if s not in SCHEME_IDS:
                raise ValueError(f"scheme {s.value} is not part of the experiment protocol")

    def to_json(self) -> dict:
        d = asdict(self)
        d["schemes"] = [s.value for s in self.schemes]
        return d

    @classmethod
    def from_json(cls, d: Mapping) -> ExperimentPlan:
        d = dict(d)
        d["schemes"] = tuple(d["schemes"])
        return cls(**d)


@dataclass
class Record:
    scheme: SchemeKind
    scenario: WinnerScenario
    rep: int
    counts: ShotCounts
    metrics: MetricsRecord

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme.value,
            "winners": self.scenario.sorted_winners(),
            "rep": self.rep,
            "counts": dict(self.counts.counts),
            "metrics": self.metrics.to_json(),
        }


@dataclass
class ResultsSet:
    plan: ExperimentPlan
    records: list[Record]
    tables: dict | None = None
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "schema": SCHEMA_VERSION,
            "plan": self.plan.to_json(),
            "meta": self.meta,
            "records": [r.to_json() for r in self.records],
        }
        if self.tables is not None:
            out["tables"] = self.tables
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=False) + "\n"

    def by_scheme(self, scheme: SchemeKind) -> list[Record]:
        return [r for r in self.records if r.scheme is scheme]


def enumerate_scenarios(n: int) -> list[WinnerScenario]:
    """Every winner subset, grouped by winner count, by bitmask inside a group."""
    if not 1 <= n <= MAX_EXHAUSTIVE_INPUTS:
        raise ValueError(f"exhaustive enumeration supports 1 <= n <= {MAX_EXHAUSTIVE_INPUTS}, got {n}")
    masks = sorted(range(1 << (1 << n)), key=lambda m: (bin(m).count("1"), m))
    return [WinnerScenario.from_bitmask(n, m) for m in masks]


def derive_seed(master_seed: int, scheme: SchemeKind, bitmask: int, rep: int) -> int:
    ss = np.random.SeedSequence([master_seed, SCHEME_IDS[scheme], bitmask, rep])
    return int(ss.generate_state(1, np.uint64)[0])


def _clean_probs(probs: Mapping[str, float]) -> tuple[list[str], np.ndarray]:
    keys = list(probs)
    p = np.array([probs[k] for k in keys], dtype=float)
    if (p < -1e-12).any():
        raise ValueError(f"negative probability {p.min()}")
    if abs(p.sum() - 1) > 1e-9:
        raise ValueError(f"probabilities sum to {p.sum()}, not 1")
    p = np.clip(p, 0, None)
    return keys, p / p.sum()


def sample_counts(probs: Mapping[str, float], shots: int, seed: int) -> ShotCounts:
    keys, p = _clean_probs(probs)
    rng = np.random.Generator(np.random.PCG64(seed))
    draw = rng.multinomial(shots, p)
    return ShotCounts(dict(zip(keys, (int(v) for v in draw))))


def expected_counts(probs: Mapping[str, float], shots: int) -> ShotCounts:
    """shots * p rounded half-to-even; the total can differ from ``shots`` by rounding."""
    keys, p = _clean_probs(probs)
    return ShotCounts(dict(zip(keys, (int(v) for v in np.round(shots * p)))))


def _thread_count(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    return max(1, threads)


def _run_job(plan: ExperimentPlan, scheme: SchemeKind, scn: WinnerScenario, reported: dict) -> list[Record]:
    out = []
    for rep in range(plan.reps):
        if plan.mode == "exact":
            counts = expected_counts(reported, plan.shots)
        else:
            counts = sample_counts(reported, plan.shots, derive_seed(plan.master_seed, scheme, scn.bitmask, rep))
        out.append(Record(scheme, scn, rep, counts, compute_record(counts, scn, scheme)))
    return out


def run_plan(plan: ExperimentPlan, threads: int | None = None) -> ResultsSet:
    scenarios = enumerate_scenarios(plan.n)
    jobs = []
    for scheme in plan.schemes:
        for scn in scenarios:
            run = run_scheme(scheme, scn, null_angle=plan.null_angle, tag_rotation=plan.tag_rotation)
            jobs.append((scheme, scn, run.reported))
    n_threads = _thread_count(threads)
    if n_threads == 1:
        chunks = [_run_job(plan, *job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            chunks = list(pool.map(lambda job: _run_job(plan, *job), jobs))
    records = [r for chunk in chunks for r in chunk]
    results = ResultsSet(plan, records, meta=_run_meta(plan))
    results.tables = build_tables(results)
    return results


def _run_meta(plan: ExperimentPlan) -> dict:
    meta = {
        "prng": "numpy PCG64",
        "seed_derivation": "SeedSequence([master_seed, scheme_id, scenario_bitmask, rep])",
        "scheme_ids": {k.value: v for k, v in SCHEME_IDS.items()},
        "tag_rotation": plan.tag_rotation,
    }
    if SchemeKind.NULL_MARKING in plan.schemes:
        meta["null_angle"] = plan.null_angle
        meta["null_angle_source"] = (
            "calibrated" if plan.null_angle == NULL_ANGLE else "user-supplied"
        )
    return meta


# -- tables ------------------------------------------------------------------


def marking_samples(results: ResultsSet, scheme: SchemeKind) -> dict[int, list[float]]:
    out: dict[int, list[float]] = {i: [] for i in range(2**results.plan.n + 1)}
    for r in results.by_scheme(scheme):
        if r.metrics.marking_factor is not None:
            out[len(r.scenario.winners)].append(r.metrics.marking_factor)
    return out


def build_tables(results: ResultsSet) -> dict:
    n = results.plan.n
    classes = range(2**n + 1)
    table1, table2, table3 = [], [], []
    for scheme in results.plan.schemes:
        samples = marking_samples(results, scheme)
        missing = [i for i in classes if not samples[i]]
        if missing:
            raise ValueError(f"{scheme.value}: no marking-factor samples for winner counts {missing}")
        means = {}
        for i in classes:
            s = aggregate_stats(samples[i])
            means[i] = s.mean
            table1.append({"scheme": scheme.value, "winners": i, "mean": s.mean, "std": s.std})

        recs = results.by_scheme(scheme)
        for mode in ("global", "local"):
            vals = [getattr(r.metrics, f"margin_{mode}") for r in recs]
            included = [v for v in vals if v is not None]
            row = {"scheme": scheme.value, "margin": mode, "samples": len(included)}
            row["undefined"] = sum(
                1 for r in recs if 0 < len(r.scenario.winners) < 2**n and getattr(r.metrics, f"margin_{mode}") is None
            )
            if included:
                row.update(stats_json(aggregate_stats(included)))
            table2.append(row)

        m0 = abs(means[0])
        D = distinguishability_worst(samples)
        row = {"scheme": scheme.value, "D": D, "D_rel": D / m0 if m0 else None}
        try:
            d = distinguishability_avg(means)
            d_literal = distinguishability_avg(means, k=2**n - 1)
        except UndefinedMetricError:
            d = d_literal = None
        row.update(
            d=d,
            d_rel=d / m0 if d is not None and m0 else None,
            d_literal_k=d_literal,
            K=len(classes) - 1,
            K_literal=2**n - 1,
        )
        table3.append(row)
    return {"table1": table1, "table2": table2, "table3": table3}


TABLE_HEADERS = {
    "table1": ["scheme", "winners", "mean", "std"],
    "table2": ["scheme", "margin", "min", "mean", "max", "std"],
    "table3": ["scheme", "D", "D_rel", "d", "d_rel"],
}


def _fmt(v) -> str:
    if v is None:
        return ""
    return repr(v) if isinstance(v, float) else str(v)


def table_csv(tables: dict, name: str) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = TABLE_HEADERS[name]
    w.writerow(cols)
    for row in tables[name]:
        w.writerow([_fmt(row.get(c)) for c in cols])
    return buf.getvalue()


def table_text(tables: dict, name: str, n: int = 2) -> str:
    """Human-readable layout: one row per scheme."""
    lines = []
    if name == "table1":
        classes = sorted({r["winners"] for r in tables["table1"]})
        lines.append("scheme  " + "".join(f"{i:>14}" for i in classes))
        for scheme in dict.fromkeys(r["scheme"] for r in tables["table1"]):
            cells = [
                f"{r['mean']:.2f}({r['std']:.2f})" for r in tables["table1"] if r["scheme"] == scheme
            ]
            lines.append(f"{scheme:<8}" + "".join(f"{c:>14}" for c in cells))
    elif name == "table2":
        lines.append(f"{'scheme':<8}{'global':>34}{'local':>34}")
        by = {}
        for r in tables["table2"]:
            cell = (
                f"[{r['min']:.2f}, {r['mean']:.2f}, {r['max']:.2f}]({r['std']:.1f})" if "mean" in r else "n/a"
            )
            by.setdefault(r["scheme"], {})[r["margin"]] = cell
        for scheme, cells in by.items():
            lines.append(f"{scheme:<8}{cells.get('global', ''):>34}{cells.get('local', ''):>34}")
    elif name == "table3":
        lines.append(f"{'scheme':<8}{'D':>10}{'D/|M0|':>12}{'d':>10}{'d/|M0|':>12}")
        for r in tables["table3"]:
            vals = [r["D"], r["D_rel"], r["d"], r["d_rel"]]
            cells = ["n/a" if v is None else f"{v:.3f}" for v in vals]
            lines.append(f"{r['scheme']:<8}{cells[0]:>10}{cells[1]:>12}{cells[2]:>10}{cells[3]:>12}")
    else:
        raise KeyError(name)
    return "\n".join(lines) + "\n"


def figure_counts_csv(results: ResultsSet) -> str:
    """Per-repetition counts for one representative scenario per winner count."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scheme", "winners", "rep", "label", "count"])
    reps = {}
    for scn in enumerate_scenarios(results.plan.n):
        reps.setdefault(len(scn.winners), scn)
    chosen = {scn.bitmask for scn in reps.values()}
    for r in results.records:
        if r.scenario.bitmask in chosen:
            for label, count in r.counts.counts.items():
                w.writerow([r.scheme.value, " ".join(r.scenario.sorted_winners()), r.rep, label, count])
    return buf.getvalue()


# -- persistence -------------------------------------------------------------


def save(results: ResultsSet, path: str | os.PathLike) -> None:
    path = Path(path)
    try:
        path.write_text(results.dumps())
    except OSError as e:
        raise OSError(f"cannot write results to {path}: {e.strerror or e}") from e


def loads(text: str) -> ResultsSet:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        offset = len(text[: e.pos].encode())
        raise ResultsFormatError(f"malformed results JSON at byte offset {offset}: {e.msg}") from e
    try:
        plan = ExperimentPlan.from_json(d["plan"])
        records = []
        for r in d["records"]:
            scheme = SchemeKind.parse(r["scheme"])
            scn = WinnerScenario(plan.n, frozenset(r["winners"]))
            counts = ShotCounts({k: int(v) for k, v in r["counts"].items()})
            records.append(Record(scheme, scn, int(r["rep"]), counts, compute_record(counts, scn, scheme)))
    except (KeyError, TypeError, ValueError) as e:
        raise ResultsFormatError(f"results JSON does not match the expected schema: {e!r}") from e
    return ResultsSet(plan, records, d.get("tables"), d.get("meta", {}))


def load(path: str | os.PathLike) -> ResultsSet:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise OSError(f"cannot read results from {path}: {e.strerror or e}") from e
    try:
        return loads(text)
    except ResultsFormatError as e:
        raise ResultsFormatError(f"{path}: {e}") from e


# -- null-angle calibration ------------------------------------------------------


@dataclass
class Calibration:
    chosen: float
    candidates: dict[float, dict]


def _null_label_suppressed(n: int, angle: float, tag_rotation: str) -> bool:
    """With the all-ones input as the only winner the null label drops to the bulk level."""
    scn = WinnerScenario(n, frozenset({"1" * n}))
    rep = run_scheme(SchemeKind.NULL_MARKING, scn, null_angle=angle, tag_rotation=tag_rotation).reported
    null = rep[SchemeKind.NULL_MARKING.null_label(n)]
    return null <= float(np.median(list(rep.values()))) + 1e-9


def _null_label_stands_out(n: int, angle: float, tag_rotation: str) -> bool:
    rep = run_scheme(SchemeKind.NULL_MARKING, WinnerScenario(n), null_angle=angle, tag_rotation=tag_rotation).reported
    null_label = SchemeKind.NULL_MARKING.null_label(n)
    return all(rep[null_label] > v + 1e-9 for k, v in rep.items() if k != null_label)


def calibrate_null_angle(
    candidates: Sequence[float] = NULL_ANGLE_CANDIDATES,
    *,
    reps: int = 40,
    shots: int = 1024,
    master_seed: int = DEFAULT_SEED,
    tag_rotation: str = "rz",
) -> Calibration:
    """Score each candidate angle on the two-qubit protocol.

    A candidate is admissible when the null label stands out with no winner
    and is suppressed once the all-ones input wins.  Among admissible
    candidates the one whose class means sit closest (max abs deviation) to
    the reference null-marking row wins.
    """
    target = REFERENCE_MEANS["null"]
    report = {}
    for angle in candidates:
        plan = ExperimentPlan(
            n=2,
            schemes=(SchemeKind.NULL_MARKING,),
            reps=reps,
            shots=shots,
            master_seed=master_seed,
            null_angle=angle,
            tag_rotation=tag_rotation,
        )
        table1 = run_plan(plan, threads=1).tables["table1"]
        means = [row["mean"] for row in table1]
        report[angle] = {
            "means": means,
            "deviation": max(abs(m - t) for m, t in zip(means, target)),
            "stands_out": _null_label_stands_out(2, angle, tag_rotation),
            "suppressed": _null_label_suppressed(2, angle, tag_rotation),
        }
    admissible = [a for a, r in report.items() if r["stands_out"] and r["suppressed"]] or list(report)
    chosen = min(admissible, key=lambda a: report[a]["deviation"])
    return Calibration(chosen, report)
