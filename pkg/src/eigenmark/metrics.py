"""Count-based figures of merit: marking factor, winning margin, distinguishability."""
from __future__ import annotations

import math
import statistics
from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

from .grover import WinnerScenario
from .schemes import SchemeKind


class UndefinedMetricError(ArithmeticError):
    pass


class ScenarioExcludedError(ValueError):
    """Winning margins are not defined for no-winner and all-winner scenarios."""


@dataclass(frozen=True)
class ShotCounts:
    counts: dict[str, int]

    def __post_init__(self):
        if not self.counts:
            raise ValueError("empty counts")
        widths = {len(k) for k in self.counts}
        if len(widths) != 1:
            raise ValueError(f"labels have mixed widths {sorted(widths)}")
        if any(v < 0 for v in self.counts.values()):
            raise ValueError("negative count")

    @property
    def shots(self) -> int:
        return sum(self.counts.values())

    @property
    def width(self) -> int:
        return len(next(iter(self.counts)))

    def get(self, label: str) -> int:
        return self.counts.get(label, 0)

    def with_prefix(self, prefix: str) -> dict[str, int]:
        return {k: v for k, v in self.counts.items() if k.startswith(prefix)}

    def scaled(self, factor: int) -> ShotCounts:
        return ShotCounts({k: v * factor for k, v in self.counts.items()})


@dataclass(frozen=True)
class Stats:
    min: float
    mean: float
    max: float
    std: float


@dataclass
class MetricsRecord:
    marking_factor: float | None
    w: int
    w0: int
    margin_global: float | None = None
    margin_local: float | None = None
    c: int | None = None
    c_prime_global: int | None = None
    c_prime_local: int | None = None

    def to_json(self) -> dict:
        out = {"M": self.marking_factor}
        if self.margin_global is not None or self.margin_local is not None:
            out["W_global"] = self.margin_global
            out["W_local"] = self.margin_local
        return out


def _prefix_max(counts: ShotCounts, prefix: str) -> int:
    sel = counts.with_prefix(prefix)
    return max(sel.values()) if sel else 0


def marking_terms(counts: ShotCounts, scheme: SchemeKind | str) -> tuple[int, int]:
    """The answer count ``w`` and the complementary / null count ``w0``."""
    scheme = SchemeKind.parse(scheme)
    if scheme not in (SchemeKind.EIGENMARKING, SchemeKind.NULL_MARKING, SchemeKind.SUBTLE_MARKING):
        raise ValueError(f"no marking factor for scheme {scheme.value}")
    n = counts.width - scheme.n_tags
    if n < 1:
        raise ValueError(f"label width {counts.width} too short for scheme {scheme.value}")
    w = _prefix_max(counts, scheme.answer_prefix)
    if scheme is SchemeKind.EIGENMARKING:
        w0 = _prefix_max(counts, "10")
    else:
        w0 = counts.get(scheme.null_label(n))
    return w, w0


def marking_factor(counts: ShotCounts, scheme: SchemeKind | str) -> float:
    w, w0 = marking_terms(counts, scheme)
    if w + w0 == 0:
        raise UndefinedMetricError("marking factor undefined: w + w0 = 0")
    return (w - w0) / (w + w0)


def winner_labels(scn: WinnerScenario, scheme: SchemeKind | str) -> list[str]:
    prefix = SchemeKind.parse(scheme).answer_prefix
    return [prefix + x for x in scn.sorted_winners()]


def margin_terms(
    counts: ShotCounts, scn: WinnerScenario, scheme: SchemeKind | str, mode: str
) -> tuple[int, int]:
    if not 0 < len(scn.winners) < 2**scn.n:
        raise ScenarioExcludedError(f"winning margin undefined for {len(scn.winners)} of {2**scn.n} winners")
    if mode not in ("global", "local"):
        raise ValueError(f"mode must be 'global' or 'local', got {mode!r}")
    scheme = SchemeKind.parse(scheme)
    wins = set(winner_labels(scn, scheme))
    c = min(counts.get(x) for x in wins)
    pool = counts.counts if mode == "global" else counts.with_prefix(scheme.answer_prefix)
    others = [v for k, v in pool.items() if k not in wins]
    c_prime = max(others) if others else 0
    return c, c_prime


def winning_margin(counts: ShotCounts, scn: WinnerScenario, scheme: SchemeKind | str, mode: str = "global") -> float:
    c, c_prime = margin_terms(counts, scn, scheme, mode)
    if c_prime == 0:
        raise UndefinedMetricError("winning margin undefined: strongest non-winner has zero count")
    return (c - c_prime) / c_prime


def distinguishability_worst(samples: Mapping[int, Sequence[float]]) -> float:
    """Smallest some-winner marking factor minus the largest no-winner one."""
    if not samples.get(0):
        raise ValueError("no samples for the no-winner class")
    rest = [min(v) for i, v in samples.items() if i > 0 and len(v)]
    if not rest:
        raise ValueError("no samples for any some-winner class")
    return min(rest) - max(samples[0])


def distinguishability_avg(means: Mapping[int, float], k: int | None = None) -> float:
    """K-th root of the product of (mean_i - mean_0) over the some-winner classes.

    ``k`` defaults to the number of some-winner classes present.
    """
    if 0 not in means:
        raise ValueError("no mean for the no-winner class")
    diffs = [means[i] - means[0] for i in sorted(means) if i > 0]
    if not diffs:
        raise ValueError("no some-winner classes")
    if any(d <= 0 for d in diffs):
        raise UndefinedMetricError("average-case distinguishability needs every class above the no-winner mean")
    k = len(diffs) if k is None else k
    if k < 1:
        raise ValueError("root order must be >= 1")
    return math.exp(sum(math.log(d) for d in diffs) / k)


def aggregate_stats(values: Sequence[float]) -> Stats:
    """min / mean / max and the (n-1) sample standard deviation; a single value has std 0."""
    values = list(values)
    if not values:
        raise ValueError("no values to aggregate")
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return Stats(min(values), statistics.fmean(values), max(values), std)


def stats_json(s: Stats) -> dict:
    return asdict(s)


def compute_record(counts: ShotCounts, scn: WinnerScenario, scheme: SchemeKind | str) -> MetricsRecord:
    """All metrics for one repetition; undefined values are left as None."""
    scheme = SchemeKind.parse(scheme)
    w, w0 = marking_terms(counts, scheme)
    rec = MetricsRecord((w - w0) / (w + w0) if w + w0 else None, w, w0)
    if 0 < len(scn.winners) < 2**scn.n:
        c, cg = margin_terms(counts, scn, scheme, "global")
        _, cl = margin_terms(counts, scn, scheme, "local")
        rec.c, rec.c_prime_global, rec.c_prime_local = c, cg, cl
        rec.margin_global = (c - cg) / cg if cg else None
        rec.margin_local = (c - cl) / cl if cl else None
    return rec
