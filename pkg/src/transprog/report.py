"""Validation protocols and analyses over scored records.

Every report here is a pure function of its input records; the CLI layer
serializes results to CSV.  Standard deviations are population (ddof=0)
throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ReportError
from .score import TpRecord

PHASES = ("I", "II", "III", "IV")

PHASE_PUBTYPES = {
    "I": "Clinical Trial, Phase I",
    "II": "Clinical Trial, Phase II",
    "III": "Clinical Trial, Phase III",
    "IV": "Clinical Trial, Phase IV",
}


@dataclass(frozen=True)
class GroupStats:
    group_key: str
    count: int
    mean: float
    std_dev: float
    min: float
    max: float


@dataclass(frozen=True)
class Histogram:
    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]
    density: tuple[float, ...]


@dataclass(frozen=True)
class PhaseReport:
    stats: tuple[GroupStats, ...]  # ordered I, II, III, IV
    monotone: bool
    positive: bool


@dataclass(frozen=True)
class AchReport:
    stats: tuple[GroupStats, ...]  # sorted ascending by mean
    ordering: tuple[str, ...]  # labels by ascending mean; ties joined with "="


def _scores(records: Iterable[TpRecord], level: str) -> list[float]:
    if level not in ("tpe", "tpd"):
        raise ReportError(f"unknown score level {level!r}")
    values = [getattr(r, level) for r in records]
    return [v for v in values if v is not None]


def _group_stats(key: str, values: Sequence[float]) -> GroupStats:
    arr = np.asarray(values, dtype=np.float64)
    return GroupStats(
        group_key=key,
        count=len(arr),
        mean=float(arr.mean()),
        std_dev=float(arr.std(ddof=0)),
        min=float(arr.min()),
        max=float(arr.max()),
    )


def group_by_phase(records: Sequence[TpRecord], pub_types_by_id: Mapping[str, frozenset[str]]) -> dict[str, list[TpRecord]]:
    """Split records into clinical-trial phase groups by publication type."""
    groups: dict[str, list[TpRecord]] = {p: [] for p in PHASES}
    for r in records:
        types = pub_types_by_id.get(r.doc_id, frozenset())
        for phase, pubtype in PHASE_PUBTYPES.items():
            if pubtype in types:
                groups[phase].append(r)
    return groups


def phase_report(groups: Mapping[str, Sequence[TpRecord]], level: str) -> PhaseReport:
    """Per-phase stats plus the monotonicity (I < II < III < IV) and
    positivity (all means > 0) validation flags."""
    stats = []
    for phase in PHASES:
        values = _scores(groups.get(phase, ()), level)
        if not values:
            raise ReportError(f"phase group {phase!r} is empty or unscored")
        stats.append(_group_stats(phase, values))
    means = [s.mean for s in stats]
    return PhaseReport(
        stats=tuple(stats),
        monotone=all(a < b for a, b in zip(means, means[1:])),
        positive=all(m > 0 for m in means),
    )


def ach_report(records: Sequence[TpRecord], level: str) -> AchReport:
    """Per-ACH-label stats and the ordering they induce by mean score.

    Records labeled "none" are excluded.  Equal means are reported as an
    explicit tie ("X=Y") in the ordering.
    """
    by_label: dict[str, list[float]] = {}
    for r in records:
        value = getattr(r, level)
        if r.ach == "none" or value is None:
            continue
        by_label.setdefault(r.ach, []).append(value)
    if len(by_label) < 2:
        raise ReportError("ACH ordering needs at least two labeled groups")
    stats = sorted(
        (_group_stats(label, values) for label, values in by_label.items()),
        key=lambda s: (s.mean, s.group_key),
    )
    ordering: list[str] = []
    for s in stats:
        if ordering and by_label_mean(stats, ordering[-1].split("=")[-1]) == s.mean:
            ordering[-1] = ordering[-1] + "=" + s.group_key
        else:
            ordering.append(s.group_key)
    return AchReport(stats=tuple(stats), ordering=tuple(ordering))


def by_label_mean(stats: Sequence[GroupStats], label: str) -> float:
    for s in stats:
        if s.group_key == label:
            return s.mean
    raise KeyError(label)


def density(records: Sequence[TpRecord], level: str, bins: int) -> tuple[Histogram, list[float]]:
    """Uniform-bin histogram over [-1, 1] plus strict-local-maximum peak positions."""
    if bins < 2:
        raise ReportError("density needs at least 2 bins")
    values = _scores(records, level)
    if not values:
        raise ReportError("no scored records to bin")
    edges = np.linspace(-1.0, 1.0, bins + 1)
    counts, _ = np.histogram(values, bins=edges)
    width = 2.0 / bins
    dens = counts / (counts.sum() * width)
    peaks = []
    for i in range(len(dens)):
        left = dens[i - 1] if i > 0 else -np.inf
        right = dens[i + 1] if i < len(dens) - 1 else -np.inf
        if dens[i] > left and dens[i] > right:
            peaks.append(float((edges[i] + edges[i + 1]) / 2.0))
    return (
        Histogram(tuple(float(e) for e in edges), tuple(int(c) for c in counts),
                  tuple(float(d) for d in dens)),
        sorted(peaks),
    )


def _rank(values: np.ndarray) -> np.ndarray:
    """Average ranks (ties averaged), 1-based."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    sorted_vals = values[order]
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    sx = float(np.sqrt((xc * xc).sum()))
    sy = float(np.sqrt((yc * yc).sum()))
    if sx == 0.0 or sy == 0.0:
        raise ReportError("zero variance: correlation undefined")
    return float((xc * yc).sum()) / (sx * sy)


def correlation(records: Sequence[TpRecord]) -> tuple[float, float, int]:
    """(Pearson, Spearman, n) over records carrying both scores."""
    pairs = [(r.tpe, r.tpd) for r in records if r.tpe is not None and r.tpd is not None]
    if len(pairs) < 3:
        raise ReportError(f"correlation needs >= 3 paired records, got {len(pairs)}")
    x = np.array([p[0] for p in pairs], dtype=np.float64)
    y = np.array([p[1] for p in pairs], dtype=np.float64)
    return _pearson(x, y), _pearson(_rank(x), _rank(y)), len(pairs)


def yearly_trend(records: Sequence[TpRecord], level: str) -> list[tuple[int, GroupStats]]:
    """Per-year stats ascending by year; year-0 (unknown) records are excluded."""
    by_year: dict[int, list[float]] = {}
    for r in records:
        value = getattr(r, level)
        if r.year <= 0 or value is None:
            continue
        by_year.setdefault(r.year, []).append(value)
    return [
        (year, _group_stats(str(year), values))
        for year, values in sorted(by_year.items())
    ]


def heatmap_grid(
    pairs: Sequence[tuple[float, float]], x_bins: int, y_bins: int
) -> np.ndarray:
    """Count grid over [-1, 1]^2; the final bin on each axis is right-closed."""
    if x_bins < 1 or y_bins < 1:
        raise ReportError("heatmap needs at least 1 bin per axis")
    grid = np.zeros((x_bins, y_bins), dtype=np.int64)
    for x, y in pairs:
        xi = min(int((x + 1.0) / 2.0 * x_bins), x_bins - 1)
        yi = min(int((y + 1.0) / 2.0 * y_bins), y_bins - 1)
        grid[xi, yi] += 1
    return grid
