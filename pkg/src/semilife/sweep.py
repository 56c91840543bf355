"""Qutub-seed parameter sweeps, zoom levels, and precision comparison.

A sweep places ``qutub(a14, a23, a23, a14)`` (identical diagonal corner
pairs) at the center of an empty torus for every lattice point of the
two amplitude ranges, classifies each evolution, and records a pattern
census for terminal still-lifes. Lattice values are computed as
``lo + i*step`` with integral ``i`` in the sweep's precision, never by
repeated addition, so the recorded amplitudes are exactly reproducible
and round-trip losslessly through the CSV.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from .analysis import (
    ClassifierLimits,
    Oscillator,
    StillLife,
    Transient,
    classify_outcome,
    outcome_label,
    terminal_outcome,
)
from .core import Precision, Universe
from .patterns import default_library, match_patterns, place, qutub

__all__ = [
    "SweepSpec",
    "SweepPoint",
    "SweepResult",
    "PrecisionComparison",
    "ZOOM_LEVELS",
    "CENSUS_TOLERANCE",
    "lattice_values",
    "qutub_sweep",
    "zoom_sweep",
    "precision_compare",
    "census",
    "write_sweep_csv",
    "read_sweep_csv",
    "write_phase_raster",
    "resolve_workers",
]

Range = Tuple[float, float, float]  # (lo, hi, step)

# Zoom levels share identical machinery; only the ranges change.
ZOOM_LEVELS: Dict[str, Range] = {
    "coarse": (0.5, 1.0, 0.01),
    "fine": (0.50, 0.51, 0.001),
    "finest": (0.500, 0.501, 0.0001),
}

# Census tolerance for pattern matching on terminal still-lifes. Emergent
# structures carry residual amplitudes well below any visible level (a few
# thousandths) on cells that are exactly dead in the idealized pattern; the
# census reports the pattern a rendered frame would show.
CENSUS_TOLERANCE = 0.005

# Fixed raster/figure color per outcome label (RGB).
OUTCOME_COLORS: Dict[str, Tuple[int, int, int]] = {
    "extinct": (0, 0, 0),
    "still_life": (40, 80, 220),
    "oscillator": (240, 200, 40),
    "cloud": (170, 170, 170),
    "transient_extinct": (110, 40, 110),
    "transient_cloud": (60, 160, 160),
    "transient_still": (120, 160, 240),
    "unresolved": (220, 40, 40),
}


@dataclass(frozen=True)
class SweepSpec:
    """One qutub-seed sweep: diagonal corner amplitudes on a 2D lattice."""

    a14_range: Range = ZOOM_LEVELS["coarse"]
    a23_range: Range = ZOOM_LEVELS["coarse"]
    width: int = 100
    height: int = 100
    limits: ClassifierLimits = field(default_factory=ClassifierLimits)
    precision: Precision = Precision.DOUBLE
    order_invariant: bool = False

    def __post_init__(self):
        for lo, hi, step_ in (self.a14_range, self.a23_range):
            if not (0.0 <= lo <= hi <= 1.0):
                raise ValueError(f"range bounds must satisfy 0 <= lo <= hi <= 1, got ({lo}, {hi})")
            if step_ <= 0:
                raise ValueError(f"range step must be positive, got {step_}")
        if self.width < 5 or self.height < 5:
            raise ValueError("sweep universe must be at least 5x5")


@dataclass(frozen=True)
class SweepPoint:
    a14: float
    a23: float
    label: str            # wrapped outcome label (may be transient_*)
    terminal_label: str   # label of the final fate with transients unwrapped
    period: int           # 1 for still-lifes, p for oscillators, 0 otherwise
    stable_generations: int
    final_mean_a: float
    generations: int
    patterns: Tuple[Tuple[str, int], ...]  # census of matched patterns, sorted by name


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    a14_values: Tuple[float, ...]
    a23_values: Tuple[float, ...]
    points: Tuple[SweepPoint, ...]  # row-major: a23 outer, a14 inner


def lattice_values(rng: Range, precision: Precision) -> List[float]:
    """Inclusive lattice lo, lo+step, ..., hi computed as lo + i*step."""
    lo, hi, step_ = rng
    dt = precision.dtype.type
    n = int(round((hi - lo) / step_))
    return [float(dt(lo) + dt(i) * dt(step_)) for i in range(n + 1)]


def _classify_point(spec: SweepSpec, a14: float, a23: float) -> SweepPoint:
    u0 = place(
        Universe.empty(spec.width, spec.height, spec.precision),
        qutub(a14, a23, a23, a14),
        spec.width // 2 - 1,
        spec.height // 2 - 1,
    )
    result = classify_outcome(u0, spec.limits, order_invariant=spec.order_invariant)
    outcome = result.outcome
    terminal = terminal_outcome(outcome)
    if isinstance(terminal, StillLife):
        period = 1
    elif isinstance(terminal, Oscillator):
        period = terminal.period
    else:
        period = 0
    stable = outcome.stable_generations if isinstance(outcome, Transient) else 0
    patterns: Tuple[Tuple[str, int], ...] = ()
    if isinstance(terminal, StillLife):
        counts: Dict[str, int] = {}
        for m in match_patterns(result.final, default_library(), tolerance=CENSUS_TOLERANCE):
            counts[m.name] = counts.get(m.name, 0) + 1
        patterns = tuple(sorted(counts.items()))
    return SweepPoint(
        a14=a14,
        a23=a23,
        label=outcome_label(outcome),
        terminal_label=outcome_label(terminal),
        period=period,
        stable_generations=stable,
        final_mean_a=result.series.mean_a[-1],
        generations=result.generations_run,
        patterns=patterns,
    )


def _point_task(args) -> Tuple[int, SweepPoint]:
    index, spec, a14, a23 = args
    return index, _classify_point(spec, a14, a23)


def resolve_workers(workers: Optional[int] = None) -> int:
    """Worker-pool size: explicit argument, else SEMILIFE_WORKERS, else CPU count."""
    if workers is None:
        env = os.environ.get("SEMILIFE_WORKERS")
        workers = int(env) if env else (os.cpu_count() or 1)
    if workers < 1:
        raise ValueError(f"worker count must be positive, got {workers}")
    return workers


def qutub_sweep(spec: SweepSpec, workers: Optional[int] = None) -> SweepResult:
    """Classify every lattice point; parallel output equals sequential output."""
    a14s = lattice_values(spec.a14_range, spec.precision)
    a23s = lattice_values(spec.a23_range, spec.precision)
    tasks = [
        (i * len(a14s) + j, spec, a14, a23)
        for i, a23 in enumerate(a23s)
        for j, a14 in enumerate(a14s)
    ]
    points: List[Optional[SweepPoint]] = [None] * len(tasks)
    workers = resolve_workers(workers)
    if workers == 1 or len(tasks) == 1:
        for task in tasks:
            index, point = _point_task(task)
            points[index] = point
    else:
        chunk = max(1, len(tasks) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for index, point in pool.map(_point_task, tasks, chunksize=chunk):
                points[index] = point
    assert all(p is not None for p in points)
    return SweepResult(spec, tuple(a14s), tuple(a23s), tuple(points))


def zoom_sweep(level: str, workers: Optional[int] = None, **spec_overrides) -> SweepResult:
    """Run the sweep at one of the named zoom levels (coarse / fine / finest)."""
    try:
        rng = ZOOM_LEVELS[level]
    except KeyError:
        raise ValueError(f"unknown zoom level {level!r}; expected one of {sorted(ZOOM_LEVELS)}") from None
    spec = SweepSpec(a14_range=rng, a23_range=rng, **spec_overrides)
    return qutub_sweep(spec, workers=workers)


@dataclass(frozen=True)
class PrecisionComparison:
    double_result: SweepResult
    single_result: SweepResult
    agreement_fraction: float
    # (a14, a23, double terminal label, single terminal label) per disagreeing point
    disagreements: Tuple[Tuple[float, float, str, str], ...]


def precision_compare(spec: SweepSpec, workers: Optional[int] = None) -> PrecisionComparison:
    """Run the sweep in both precisions and report per-point outcome agreement.

    Agreement compares terminal fates (transient episodes unwrapped):
    a still-life that is only temporarily stable in single precision
    shows up as a disagreement, while an identical fate reached through
    a transient does not.
    """
    double_result = qutub_sweep(replace(spec, precision=Precision.DOUBLE), workers=workers)
    single_result = qutub_sweep(replace(spec, precision=Precision.SINGLE), workers=workers)
    disagreements = []
    for dp, sp in zip(double_result.points, single_result.points):
        if dp.terminal_label != sp.terminal_label:
            disagreements.append((dp.a14, dp.a23, dp.terminal_label, sp.terminal_label))
    total = len(double_result.points)
    agreement = (total - len(disagreements)) / total if total else 1.0
    return PrecisionComparison(double_result, single_result, agreement, tuple(disagreements))


def census(result: SweepResult) -> Dict[str, int]:
    """Outcome-label counts over the sweep."""
    counts: Dict[str, int] = {}
    for p in result.points:
        counts[p.label] = counts.get(p.label, 0) + 1
    return dict(sorted(counts.items()))


def _format_patterns(patterns: Tuple[Tuple[str, int], ...]) -> str:
    return ";".join(f"{name}×{count}" for name, count in patterns)


def _parse_patterns(text: str) -> Tuple[Tuple[str, int], ...]:
    if not text:
        return ()
    out = []
    for item in text.split(";"):
        name, count = item.split("×")
        out.append((name, int(count)))
    return tuple(out)


def write_sweep_csv(result: SweepResult, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("a14,a23,outcome,period,stable_gens,final_mean_a,generations,patterns\n")
        for p in result.points:
            fh.write(
                f"{p.a14:.17g},{p.a23:.17g},{p.label},{p.period},{p.stable_generations},"
                f"{p.final_mean_a:.17g},{p.generations},{_format_patterns(p.patterns)}\n"
            )


def read_sweep_csv(path) -> List[SweepPoint]:
    points = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "a14,a23,outcome,period,stable_gens,final_mean_a,generations,patterns":
            raise ValueError(f"{path}:1: unexpected sweep header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split(",")
            if len(parts) != 8:
                raise ValueError(f"{path}:{lineno}: expected 8 columns, got {line!r}")
            label = parts[2]
            terminal = label.replace("transient_still", "still_life").replace(
                "transient_extinct", "extinct").replace("transient_cloud", "cloud")
            points.append(
                SweepPoint(
                    a14=float(parts[0]),
                    a23=float(parts[1]),
                    label=label,
                    terminal_label=terminal,
                    period=int(parts[3]),
                    stable_generations=int(parts[4]),
                    final_mean_a=float(parts[5]),
                    generations=int(parts[6]),
                    patterns=_parse_patterns(parts[7]),
                )
            )
    return points


def write_phase_raster(result: SweepResult, path) -> None:
    """One P6 PPM pixel per lattice point.

    Columns are a14 ascending left to right; rows are a23 descending
    top to bottom, so the image reads like a phase diagram with its
    origin at the bottom-left. Colors follow OUTCOME_COLORS.
    """
    nx, ny = len(result.a14_values), len(result.a23_values)
    img = np.zeros((ny, nx, 3), dtype=np.uint8)
    for i in range(ny):
        for j in range(nx):
            p = result.points[i * nx + j]
            img[ny - 1 - i, j] = OUTCOME_COLORS[p.label]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{nx} {ny}\n255\n".encode("ascii"))
        fh.write(img.tobytes())
