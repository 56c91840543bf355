"""Liveness statistics, cycle detection, symmetry tracking, and outcome classification."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats as _scipy_stats

from .core import Observer, Universe, step

__all__ = [
    "LivenessSeries",
    "SteadyStateStats",
    "ClassifierLimits",
    "Extinct",
    "StillLife",
    "Oscillator",
    "Cloud",
    "Transient",
    "Unresolved",
    "Outcome",
    "ClassifyResult",
    "mean_liveness",
    "liveness_std",
    "steady_state_stats",
    "detect_cycle",
    "symmetry_defect",
    "classify_outcome",
    "outcome_label",
    "terminal_outcome",
]


def mean_liveness(u: Universe) -> float:
    """Mean alive amplitude over all cells.

    Accumulated by numpy's pairwise reduction over the row-major array
    at the universe's precision; deterministic for a given input.
    """
    n = u.a.dtype.type(u.a.size)
    return float(np.sum(u.a) / n)


def liveness_std(u: Universe) -> float:
    """Population standard deviation of the alive amplitude over cells."""
    return float(np.std(u.a))


@dataclass
class LivenessSeries:
    """Per-generation mean and population std of the alive amplitude."""

    generations: List[int] = field(default_factory=list)
    mean_a: List[float] = field(default_factory=list)
    std_a: List[float] = field(default_factory=list)

    def append(self, generation: int, mean: float, std: float) -> None:
        if self.generations:
            if generation <= self.generations[-1]:
                raise ValueError("generation indices must be strictly increasing")
        elif generation != 0:
            raise ValueError("series must start at generation 0")
        if not 0.0 <= mean <= 1.0:
            raise ValueError(f"mean liveness must lie in [0,1], got {mean!r}")
        self.generations.append(generation)
        self.mean_a.append(mean)
        self.std_a.append(std)

    def record(self, generation: int, u: Universe) -> None:
        self.append(generation, mean_liveness(u), liveness_std(u))

    def __len__(self) -> int:
        return len(self.generations)


@dataclass(frozen=True)
class SteadyStateStats:
    """Statistics of the per-generation mean liveness after burn-in."""

    burn_in: int
    mean_of_means: float
    std_of_means: float
    sample_count: int
    # Anderson-Darling normality statistic of the post-burn-in means;
    # NaN for a zero-variance sample. Reported, never asserted.
    normality_statistic: float


def steady_state_stats(series: LivenessSeries, burn_in: int) -> SteadyStateStats:
    """Mean/std of per-generation mean liveness over generations >= burn_in."""
    if burn_in < 0:
        raise ValueError(f"burn_in must be non-negative, got {burn_in}")
    samples = np.array(
        [m for g, m in zip(series.generations, series.mean_a) if g >= burn_in],
        dtype=np.float64,
    )
    if samples.size < 30:
        raise ValueError(
            f"need at least 30 post-burn-in samples for a steady-state fit, got {samples.size}"
        )
    mean = float(np.mean(samples))
    std = float(np.std(samples))
    if std == 0.0:
        normality = float("nan")
    else:
        normality = float(_scipy_stats.anderson(samples, dist="norm").statistic)
    return SteadyStateStats(burn_in, mean, std, int(samples.size), normality)


def detect_cycle(history: Sequence[Universe]) -> Optional[int]:
    """Smallest period at which the latest state recurs in the history.

    Fingerprints gate the search; every candidate is confirmed by full
    bitwise comparison, so hash collisions cannot produce a false
    period. Returns None when the latest state never recurred.
    """
    if not history:
        return None
    latest = history[-1]
    digest = latest.digest()
    for p in range(1, len(history)):
        earlier = history[-1 - p]
        if earlier.digest() == digest and np.array_equal(earlier.a, latest.a):
            return p
    return None


def symmetry_defect(u: Universe, cx: int, cy: int) -> float:
    """Deviation from four-fold rotational symmetry about (cx, cy).

    Maximum over cells of |a(cell) - a(cell rotated 90 degrees)| on the
    torus; exactly 0 for a four-fold symmetric universe. Requires a
    square universe.
    """
    if u.width != u.height:
        raise ValueError(f"rotation requires a square universe, got {u.width}x{u.height}")
    n = u.width
    ys, xs = np.indices((n, n))
    rx = (cx - (ys - cy)) % n
    ry = (cy + (xs - cx)) % n
    rotated = np.empty_like(u.a)
    rotated[ry, rx] = u.a
    return float(np.max(np.abs(u.a - rotated)))


@dataclass(frozen=True)
class Extinct:
    generation: int


@dataclass(frozen=True)
class StillLife:
    settled_generation: int


@dataclass(frozen=True)
class Oscillator:
    period: int
    settled_generation: int


@dataclass(frozen=True)
class Cloud:
    steady_mean: float


@dataclass(frozen=True)
class Transient:
    """A near-stable episode of more than 4 generations preceding the final fate."""

    stable_generations: int
    successor: "Outcome"


@dataclass(frozen=True)
class Unresolved:
    generations: int


Outcome = Union[Extinct, StillLife, Oscillator, Cloud, Transient, Unresolved]

_LABELS = {
    Extinct: "extinct",
    StillLife: "still_life",
    Oscillator: "oscillator",
    Cloud: "cloud",
    Unresolved: "unresolved",
}

_TRANSIENT_LABELS = {
    Extinct: "transient_extinct",
    Cloud: "transient_cloud",
    StillLife: "transient_still",
}


def outcome_label(outcome: Outcome) -> str:
    """CSV label of an outcome class."""
    if isinstance(outcome, Transient):
        return _TRANSIENT_LABELS[type(outcome.successor)]
    return _LABELS[type(outcome)]


def terminal_outcome(outcome: Outcome) -> Outcome:
    """The final fate, unwrapping any transient episode."""
    return outcome.successor if isinstance(outcome, Transient) else outcome


@dataclass(frozen=True)
class ClassifierLimits:
    """Knobs of classify_outcome.

    The cloud criterion is a trailing window of ``cloud_window``
    generations with mean liveness inside ``cloud_band`` and no bitwise
    recurrence; the band brackets the universal cloud constant 0.348
    with a wide margin. A configuration counts as a transient form when
    consecutive states stay within ``transient_tolerance`` (max per-cell
    amplitude change) for more than ``transient_threshold`` generations
    before changing again. Recurrence search retains the last
    ``history_recent`` states plus every ``history_stride``-th older
    one.

    Emergent still-lifes whose live cells approach amplitude 1
    asymptotically can stall a fraction below it (the derived dead
    amplitude quantizes the decay), so exact period-1 recurrence never
    triggers. Every ``still_snap_interval`` generations of a near-stable
    run the classifier therefore snaps amplitudes within
    ``still_snap_tolerance`` of 0 or 1 to those exact values and, if the
    snapped state is a bitwise fixed point of ``step``, reports a
    still-life with the snapped state as the final universe.
    """

    max_generations: int = 2000
    cloud_window: int = 200
    cloud_band: Tuple[float, float] = (0.298, 0.398)
    transient_threshold: int = 4
    transient_tolerance: float = 1e-6
    history_recent: int = 64
    history_stride: int = 64
    still_snap_tolerance: float = 1e-6
    still_snap_interval: int = 64

    def __post_init__(self):
        if self.max_generations < 0:
            raise ValueError("max_generations must be non-negative")
        if self.cloud_window < 1 or self.history_recent < 1 or self.history_stride < 1:
            raise ValueError("window sizes must be positive")
        if not self.cloud_band[0] < self.cloud_band[1]:
            raise ValueError("cloud_band must be an increasing interval")


@dataclass(frozen=True)
class ClassifyResult:
    outcome: Outcome
    series: LivenessSeries
    final: Universe
    generations_run: int


def _snap_to_pure(u: Universe, tolerance: float) -> Universe:
    """Copy of a universe with amplitudes within tolerance of 0 or 1 made exact."""
    a = u.a.copy()
    a[a <= tolerance] = 0.0
    a[a >= 1.0 - tolerance] = 1.0
    return Universe(a)


def classify_outcome(
    u0: Universe,
    limits: Optional[ClassifierLimits] = None,
    *,
    order_invariant: bool = False,
    observer: Optional[Observer] = None,
) -> ClassifyResult:
    """Evolve a universe until its fate is decided.

    Checks, per generation: all-dead (extinct); bitwise recurrence at
    period 1 (still-life) or period p > 1 (oscillator); a trailing
    window of in-band mean liveness (cloud); otherwise unresolved at
    the generation limit. A completed near-stable episode longer than
    the transient threshold wraps the extinct / cloud / still-life
    fates in a Transient record.
    """
    limits = limits or ClassifierLimits()
    series = LivenessSeries()
    series.record(0, u0)

    if u0.is_dead():
        return ClassifyResult(Extinct(0), series, u0, 0)

    # retained states for recurrence search, keyed by generation in
    # insertion (ascending) order: the last `history_recent` generations
    # plus every `history_stride`-th older one
    history = {0: u0}
    means = deque(maxlen=limits.cloud_window)
    means.append(series.mean_a[0])
    lo, hi = limits.cloud_band

    u = u0
    best_transient = 0
    current_run = 0

    def wrap(outcome: Outcome) -> Outcome:
        if best_transient > limits.transient_threshold and type(outcome) in _TRANSIENT_LABELS:
            return Transient(best_transient, outcome)
        return outcome

    for gen in range(1, limits.max_generations + 1):
        prev = u
        u = step(u, order_invariant=order_invariant)
        if observer is not None:
            observer(gen, u)
        series.record(gen, u)
        means.append(series.mean_a[-1])

        if u.is_dead():
            return ClassifyResult(wrap(Extinct(gen)), series, u, gen)

        digest = u.digest()
        for h_gen in reversed(history):
            h_u = history[h_gen]
            if h_u.digest() == digest and np.array_equal(h_u.a, u.a):
                period = gen - h_gen
                if period == 1:
                    return ClassifyResult(wrap(StillLife(h_gen)), series, u, gen)
                return ClassifyResult(wrap(Oscillator(period, h_gen)), series, u, gen)

        # near-stable episode tracking (tolerance-based, not bitwise)
        delta = float(np.max(np.abs(u.a - prev.a)))
        if delta <= limits.transient_tolerance:
            current_run += 1
            if current_run % limits.still_snap_interval == 0:
                # A long near-stable run may be converging to a fixed
                # point it can never reach bitwise; prove it by snapping
                # near-pure amplitudes and testing exact invariance.
                snapped = _snap_to_pure(u, limits.still_snap_tolerance)
                if not snapped.is_dead() and step(
                    snapped, order_invariant=order_invariant
                ) == snapped:
                    settled = gen - current_run
                    return ClassifyResult(wrap(StillLife(settled)), series, snapped, gen)
        else:
            if current_run > limits.transient_threshold:
                best_transient = max(best_transient, current_run)
            current_run = 0

        if len(means) == limits.cloud_window and all(lo <= m <= hi for m in means):
            steady = float(np.mean(np.fromiter(means, dtype=np.float64)))
            return ClassifyResult(wrap(Cloud(steady)), series, u, gen)

        history[gen] = u
        aged_out = gen - limits.history_recent
        if aged_out in history and aged_out % limits.history_stride != 0:
            del history[aged_out]

    return ClassifyResult(Unresolved(limits.max_generations), series, u, limits.max_generations)
