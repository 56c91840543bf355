"""Semi-quantum game of life: simulator library and experiment harness."""

from .analysis import (
    ClassifierLimits,
    ClassifyResult,
    Cloud,
    Extinct,
    LivenessSeries,
    Oscillator,
    Outcome,
    SteadyStateStats,
    StillLife,
    Transient,
    Unresolved,
    classify_outcome,
    detect_cycle,
    mean_liveness,
    outcome_label,
    steady_state_stats,
    symmetry_defect,
    terminal_outcome,
)
from .core import (
    CellState,
    GCoefficients,
    MOORE_OFFSETS,
    Precision,
    Universe,
    apply_g,
    cell_from_liveness,
    g_coefficients,
    neighborhood_liveness,
    run,
    step,
)
from .io import dump_state, export_frame, load_state, read_series_csv, write_series_csv
from .patterns import (
    Match,
    Pattern,
    SeedConfig,
    classical_pattern,
    default_library,
    is_still_life,
    load_pattern,
    match_patterns,
    place,
    qutub,
    qutub_template,
    random_init,
    save_pattern,
    stability_region,
)
from .sweep import (
    PrecisionComparison,
    SweepPoint,
    SweepResult,
    SweepSpec,
    ZOOM_LEVELS,
    census,
    lattice_values,
    precision_compare,
    qutub_sweep,
    read_sweep_csv,
    write_phase_raster,
    write_sweep_csv,
    zoom_sweep,
)

__version__ = "0.1.0"
