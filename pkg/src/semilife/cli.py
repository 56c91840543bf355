"""Command-line interface: run, sweep, verify-still, and match.

Configuration comes from flat ``key=value`` text files (``--config``,
or a shipped ``--preset``) and/or command-line flags; flags override
file values. Report paths emit delimited data (CSV, state dumps, PGM /
PPM rasters) and, unless ``figures=false``, a matplotlib PNG rendered
alongside each CSV.
"""

from __future__ import annotations

import argparse
import os
import sys
from importlib import resources
from typing import Dict, Optional

from . import analysis, io as sio, patterns, plotting, sweep as sweep_mod
from .analysis import ClassifierLimits, StillLife, classify_outcome, outcome_label, steady_state_stats, terminal_outcome
from .core import Precision, Universe
from .patterns import SeedConfig, classical_pattern, default_library, load_pattern, place, qutub, random_init
from .sweep import SweepSpec, census, precision_compare, qutub_sweep, write_phase_raster, write_sweep_csv

__all__ = ["main"]


class ConfigError(Exception):
    """Invalid configuration; the message names the offending key."""


def _parse_bool(key: str, text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def _parse_size(key: str, text: str):
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise ConfigError(f"{key}: expected WIDTHxHEIGHT, got {text!r}") from None


def _parse_range(key: str, text: str):
    try:
        lo, hi, step_ = (float(v) for v in text.split(":"))
        return lo, hi, step_
    except ValueError:
        raise ConfigError(f"{key}: expected lo:hi:step, got {text!r}") from None


def _parse_corners(key: str, text: str):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"{key}: expected 1 or 4 comma-separated amplitudes, got {text!r}") from None
    if len(vals) == 1:
        return vals * 4
    if len(vals) == 4:
        return vals
    raise ConfigError(f"{key}: expected 1 or 4 amplitudes, got {len(vals)}")


def read_config_file(path) -> Dict[str, str]:
    """Flat key=value file; '#' starts a comment, blank lines ignored."""
    values: Dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
                key, value = line.split("=", 1)
                values[key.strip()] = value.strip()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from None
    return values


def _load_preset(name: str) -> Dict[str, str]:
    base = resources.files("semilife").joinpath("presets")
    candidate = base.joinpath(f"{name}.cfg")
    if not candidate.is_file():
        available = sorted(p.name[:-4] for p in base.iterdir() if p.name.endswith(".cfg"))
        raise ConfigError(f"preset: unknown preset {name!r}; available: {', '.join(available)}")
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(candidate.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


class Settings:
    """Merged configuration: flags override file values override defaults."""

    def __init__(self, args: argparse.Namespace, allowed: Dict[str, str]):
        file_values: Dict[str, str] = {}
        if getattr(args, "preset", None):
            file_values.update(_load_preset(args.preset))
        if getattr(args, "config", None):
            file_values.update(read_config_file(args.config))
        for key in file_values:
            if key not in allowed:
                raise ConfigError(f"{key}: unknown configuration key")
        self._file = file_values
        self._args = args

    def get(self, key: str, default=None, parse=None):
        flag = getattr(self._args, key.replace("-", "_"), None)
        if flag is not None:
            return flag
        if key in self._file:
            raw = self._file[key]
            return parse(key, raw) if parse else raw
        return default


_RUN_KEYS = {
    "size": "universe WIDTHxHEIGHT",
    "precision": "single or double",
    "gens": "generation limit",
    "seed": "random | qutub | block | tub | blinker | file",
    "f": "random seeding fraction",
    "rng-seed": "PRNG seed for random seeding",
    "a": "qutub corner amplitudes (one value or a1,a2,a3,a4)",
    "pattern-file": "pattern file for seed=file",
    "at": "placement X,Y (default: centered)",
    "frames-every": "PGM frame cadence (0 = none)",
    "frames-dir": "directory for PGM frames",
    "series": "liveness series CSV path",
    "final-dump": "final state dump path",
    "dump-format": "text or binary",
    "burn-in": "generations excluded from steady-state stats",
    "order-invariant": "sorted neighbor summation",
    "figures": "render PNG figures alongside CSVs",
}

_SWEEP_KEYS = {
    "level": "coarse | fine | finest",
    "a14": "explicit lo:hi:step for a1=a4",
    "a23": "explicit lo:hi:step for a2=a3",
    "size": "universe WIDTHxHEIGHT",
    "precision": "single or double",
    "max-gens": "classifier generation limit",
    "compare-precision": "run both precisions and report agreement",
    "workers": "worker pool size (default: SEMILIFE_WORKERS or CPU count)",
    "out": "output path prefix",
    "order-invariant": "sorted neighbor summation",
    "figures": "render PNG figures alongside CSVs",
}


def _build_seed_universe(cfg: Settings, width: int, height: int, precision: Precision):
    seed = cfg.get("seed", "random")
    if seed == "random":
        f = cfg.get("f", 0.2, lambda k, v: float(v))
        rng_seed = cfg.get("rng-seed", 1, lambda k, v: int(v))
        return random_init(SeedConfig(width, height, f, rng_seed), precision)
    if seed in ("qutub", "block", "tub", "blinker", "file"):
        if seed == "qutub":
            corners = cfg.get("a", [0.5, 0.5, 0.5, 0.5], _parse_corners)
            pattern = qutub(*corners)
        elif seed == "file":
            path = cfg.get("pattern-file")
            if not path:
                raise ConfigError("pattern-file: required when seed=file")
            pattern = load_pattern(path)
        else:
            pattern = classical_pattern(seed)
        at = cfg.get("at", None, lambda k, v: tuple(int(x) for x in v.split(",")))
        if at is None:
            at = (width // 2 - pattern.width // 2, height // 2 - pattern.height // 2)
        elif len(at) != 2:
            raise ConfigError("at: expected X,Y")
        return place(Universe.empty(width, height, precision), pattern, at[0], at[1])
    raise ConfigError(f"seed: unknown seeding source {seed!r}")


def cmd_run(args: argparse.Namespace) -> int:
    cfg = Settings(args, _RUN_KEYS)
    width, height = cfg.get("size", (100, 100), _parse_size)
    precision = Precision.parse(cfg.get("precision", "double"))
    gens = cfg.get("gens", 2000, lambda k, v: int(v))
    burn_in = cfg.get("burn-in", 500, lambda k, v: int(v))
    order_invariant = cfg.get("order-invariant", False, _parse_bool)
    figures = cfg.get("figures", True, _parse_bool)
    frames_every = cfg.get("frames-every", 0, lambda k, v: int(v))
    frames_dir = cfg.get("frames-dir")
    series_path = cfg.get("series")
    dump_path = cfg.get("final-dump")
    dump_format = cfg.get("dump-format", "text")
    if frames_every < 0:
        raise ConfigError("frames-every: must be non-negative")
    if frames_every and not frames_dir:
        raise ConfigError("frames-dir: required when frames-every is set")
    out_paths = [p for p in (series_path, dump_path) if p]
    if len(set(out_paths)) != len(out_paths):
        raise ConfigError("series/final-dump: output paths must be distinct")

    u0 = _build_seed_universe(cfg, width, height, precision)

    observer = None
    if frames_every:
        os.makedirs(frames_dir, exist_ok=True)
        sio.export_frame(u0, os.path.join(frames_dir, "gen000000.pgm"))

        def observer(gen, u):
            if gen % frames_every == 0:
                sio.export_frame(u, os.path.join(frames_dir, f"gen{gen:06d}.pgm"))

    limits = ClassifierLimits(max_generations=gens)
    result = classify_outcome(u0, limits, order_invariant=order_invariant, observer=observer)

    print(f"outcome: {outcome_label(result.outcome)}")
    print(f"generations: {result.generations_run}")
    terminal = terminal_outcome(result.outcome)
    if isinstance(terminal, analysis.Oscillator):
        print(f"period: {terminal.period}")
    if isinstance(terminal, StillLife):
        counts: Dict[str, int] = {}
        for m in patterns.match_patterns(
            result.final, default_library(), tolerance=sweep_mod.CENSUS_TOLERANCE
        ):
            counts[m.name] = counts.get(m.name, 0) + 1
        if counts:
            print("patterns: " + ";".join(f"{n}×{c}" for n, c in sorted(counts.items())))
    post = sum(1 for g in result.series.generations if g >= burn_in)
    if post >= 30:
        stats = steady_state_stats(result.series, burn_in)
        print(
            f"steady-state: mean={stats.mean_of_means:.6f} std={stats.std_of_means:.6f} "
            f"samples={stats.sample_count} anderson-darling={stats.normality_statistic:.4f}"
        )
    else:
        print(f"steady-state: unavailable ({post} post-burn-in samples, need 30)")

    if series_path:
        sio.write_series_csv(result.series, series_path)
        if figures:
            plotting.save_liveness_figure(result.series, os.path.splitext(series_path)[0] + ".png", burn_in)
    if dump_path:
        sio.dump_state(result.final, dump_path, format=dump_format)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = Settings(args, _SWEEP_KEYS)
    level = cfg.get("level")
    a14 = cfg.get("a14", None, _parse_range)
    a23 = cfg.get("a23", None, _parse_range)
    if level and (a14 or a23):
        raise ConfigError("level: cannot combine a zoom level with explicit a14/a23 ranges")
    if level:
        if level not in sweep_mod.ZOOM_LEVELS:
            raise ConfigError(f"level: unknown zoom level {level!r}")
        a14 = a23 = sweep_mod.ZOOM_LEVELS[level]
    elif not (a14 and a23):
        raise ConfigError("level: either a zoom level or both a14 and a23 ranges are required")
    width, height = cfg.get("size", (100, 100), _parse_size)
    precision = Precision.parse(cfg.get("precision", "double"))
    max_gens = cfg.get("max-gens", 2000, lambda k, v: int(v))
    workers = cfg.get("workers", None, lambda k, v: int(v))
    compare = cfg.get("compare-precision", False, _parse_bool)
    figures = cfg.get("figures", True, _parse_bool)
    prefix = cfg.get("out", "sweep")
    order_invariant = cfg.get("order-invariant", False, _parse_bool)

    spec = SweepSpec(
        a14_range=a14,
        a23_range=a23,
        width=width,
        height=height,
        limits=ClassifierLimits(max_generations=max_gens),
        precision=precision,
        order_invariant=order_invariant,
    )

    def emit(result, tag=""):
        base = f"{prefix}{tag}"
        write_sweep_csv(result, base + ".csv")
        write_phase_raster(result, base + ".ppm")
        if figures:
            plotting.save_phase_figure(result, base + ".png")
        for label, count in census(result).items():
            print(f"{tag.lstrip('-') + ' ' if tag else ''}{label}:{count}")

    if compare:
        comparison = precision_compare(spec, workers=workers)
        emit(comparison.double_result, "-double")
        emit(comparison.single_result, "-single")
        print(f"agreement: {comparison.agreement_fraction:.6f}")
        print(f"disagreements: {len(comparison.disagreements)}")
        for a14v, a23v, dl, sl in comparison.disagreements:
            print(f"  ({a14v:.17g}, {a23v:.17g}): double={dl} single={sl}")
    else:
        emit(qutub_sweep(spec, workers=workers))
    return 0


def cmd_verify_still(args: argparse.Namespace) -> int:
    if args.pattern_file:
        pattern = load_pattern(args.pattern_file)
    elif args.builtin:
        if args.builtin == "qutub":
            corners = _parse_corners("a", args.a or "0.5")
            pattern = qutub(*corners)
        else:
            pattern = classical_pattern(args.builtin)
    else:
        raise ConfigError("pattern-file: either --pattern-file or --builtin is required")
    stable = patterns.is_still_life(
        pattern,
        padding=args.padding,
        max_generations=args.max_gens,
        precision=Precision.parse(args.precision),
    )
    print(f"still-life: {'true' if stable else 'false'}")
    return 0


def cmd_match(args: argparse.Namespace) -> int:
    u = sio.load_state(args.state)
    matches = patterns.match_patterns(u, default_library(), tolerance=args.tolerance)
    counts: Dict[str, int] = {}
    for m in matches:
        counts[m.name] = counts.get(m.name, 0) + 1
        values = " ".join(f"{v:.17g}" for v in m.values)
        print(f"{m.name} {m.x} {m.y}" + (f" {values}" if values else ""))
    print("census: " + (";".join(f"{n}×{c}" for n, c in sorted(counts.items())) or "none"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semilife",
        description="Semi-quantum game of life simulator and experiment harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="evolve one universe and report its outcome")
    run_p.add_argument("--config", help="key=value configuration file")
    run_p.add_argument("--preset", help="named shipped configuration")
    for key, help_ in _RUN_KEYS.items():
        flag = "--" + key
        dest = key.replace("-", "_")
        if key in ("gens", "frames-every", "burn-in"):
            run_p.add_argument(flag, dest=dest, type=int, help=help_)
        elif key == "f":
            run_p.add_argument(flag, dest=dest, type=float, help=help_)
        elif key == "rng-seed":
            run_p.add_argument(flag, dest=dest, type=int, help=help_)
        elif key == "size":
            run_p.add_argument(flag, dest=dest, type=lambda v: _parse_size("size", v), help=help_)
        elif key == "a":
            run_p.add_argument(flag, dest=dest, type=lambda v: _parse_corners("a", v), help=help_)
        elif key == "at":
            run_p.add_argument(flag, dest=dest, type=lambda v: tuple(int(x) for x in v.split(",")), help=help_)
        elif key in ("order-invariant", "figures"):
            run_p.add_argument(flag, dest=dest, type=lambda v: _parse_bool(key, v), help=help_)
        else:
            run_p.add_argument(flag, dest=dest, help=help_)
    run_p.set_defaults(func=cmd_run)

    sweep_p = sub.add_parser("sweep", help="qutub-seed parameter sweep")
    sweep_p.add_argument("--config", help="key=value configuration file")
    sweep_p.add_argument("--preset", help="named shipped configuration")
    for key, help_ in _SWEEP_KEYS.items():
        flag = "--" + key
        dest = key.replace("-", "_")
        if key in ("max-gens", "workers"):
            sweep_p.add_argument(flag, dest=dest, type=int, help=help_)
        elif key == "size":
            sweep_p.add_argument(flag, dest=dest, type=lambda v: _parse_size("size", v), help=help_)
        elif key in ("a14", "a23"):
            sweep_p.add_argument(flag, dest=dest, type=lambda v, k=key: _parse_range(k, v), help=help_)
        elif key in ("compare-precision", "order-invariant", "figures"):
            sweep_p.add_argument(flag, dest=dest, type=lambda v: _parse_bool(key, v), nargs="?",
                                 const=True, help=help_)
        else:
            sweep_p.add_argument(flag, dest=dest, help=help_)
    sweep_p.set_defaults(func=cmd_sweep)

    verify_p = sub.add_parser("verify-still", help="check whether a pattern is a still-life")
    verify_p.add_argument("--pattern-file", help="pattern file to verify")
    verify_p.add_argument("--builtin", choices=["qutub", "block", "tub", "blinker"],
                          help="verify a built-in pattern instead of a file")
    verify_p.add_argument("--a", help="qutub corner amplitudes (one value or a1,a2,a3,a4)")
    verify_p.add_argument("--padding", type=int, default=2)
    verify_p.add_argument("--max-gens", type=int, default=1)
    verify_p.add_argument("--precision", default="double")
    verify_p.set_defaults(func=cmd_verify_still)

    match_p = sub.add_parser("match", help="find library patterns in a state dump")
    match_p.add_argument("--state", required=True, help="state dump to scan")
    match_p.add_argument("--tolerance", type=float, default=0.0)
    match_p.set_defaults(func=cmd_match)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"semilife: config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"semilife: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
