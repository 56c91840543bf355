"""Pattern library, universe seeding, and still-life tools.

Patterns are named amplitude stencils. A stencil entry may carry a
fixed amplitude or be *free* (``None``), which is how the qutub's four
semi-live corners are parameterized for stability sweeps and pattern
matching.

Pattern files are plain text: one header line ``name width height``,
then one ``dx dy amplitude`` line per stencil entry, amplitudes written
with 17 significant digits so double-precision values round-trip
exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import Precision, Universe, step

__all__ = [
    "Pattern",
    "SeedConfig",
    "Match",
    "qutub",
    "qutub_template",
    "classical_pattern",
    "default_library",
    "place",
    "random_init",
    "is_still_life",
    "stability_region",
    "match_patterns",
    "save_pattern",
    "load_pattern",
]

StencilEntry = Tuple[int, int, Optional[float]]


@dataclass(frozen=True)
class Pattern:
    """Named multi-cell amplitude stencil.

    ``cells`` holds (dx, dy, amplitude) entries; offsets are relative to
    the pattern's top-left corner and must lie inside ``width`` x
    ``height``. ``None`` amplitudes mark free slots.
    """

    name: str
    width: int
    height: int
    cells: Tuple[StencilEntry, ...]

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"pattern extent must be positive, got {self.width}x{self.height}")
        seen = set()
        for dx, dy, amp in self.cells:
            if not (0 <= dx < self.width and 0 <= dy < self.height):
                raise ValueError(f"stencil offset ({dx},{dy}) outside extent {self.width}x{self.height}")
            if (dx, dy) in seen:
                raise ValueError(f"duplicate stencil offset ({dx},{dy})")
            seen.add((dx, dy))
            if amp is not None and not (np.isfinite(amp) and 0.0 <= amp <= 1.0):
                raise ValueError(f"stencil amplitude at ({dx},{dy}) must lie in [0,1], got {amp!r}")

    @property
    def free_slots(self) -> Tuple[Tuple[int, int], ...]:
        """Offsets of free-amplitude entries, in stencil order."""
        return tuple((dx, dy) for dx, dy, amp in self.cells if amp is None)

    def bind(self, values: Sequence[float]) -> "Pattern":
        """Fill the free slots, in stencil order, with the given amplitudes."""
        free = self.free_slots
        if len(values) != len(free):
            raise ValueError(f"pattern has {len(free)} free slots, got {len(values)} values")
        it = iter(values)
        cells = tuple(
            (dx, dy, float(next(it)) if amp is None else amp) for dx, dy, amp in self.cells
        )
        return replace(self, cells=cells)

    def to_grid(self, dtype=np.float64) -> np.ndarray:
        """Dense extent grid; unlisted cells are dead, free slots are NaN."""
        grid = np.zeros((self.height, self.width), dtype=dtype)
        for dx, dy, amp in self.cells:
            grid[dy, dx] = np.nan if amp is None else amp
        return grid


def qutub(a1: float, a2: float, a3: float, a4: float) -> Pattern:
    """The 3x3 semi-quantum still-life seed.

    Four fully live edge-center cells, four semi-live corners with
    amplitudes a1 (NW), a2 (NE), a3 (SW), a4 (SE) -- so (a1, a4) and
    (a2, a3) are the diagonal pairs -- and a dead center. It is a
    still-life exactly when every side-adjacent corner pair sums to 1
    or less.
    """
    for i, a in enumerate((a1, a2, a3, a4), start=1):
        if not (np.isfinite(a) and 0.0 <= a <= 1.0):
            raise ValueError(f"corner amplitude a{i} must lie in [0,1], got {a!r}")
    return Pattern(
        name="qutub",
        width=3,
        height=3,
        cells=(
            (0, 0, float(a1)), (1, 0, 1.0), (2, 0, float(a2)),
            (0, 1, 1.0), (1, 1, 0.0), (2, 1, 1.0),
            (0, 2, float(a3)), (1, 2, 1.0), (2, 2, float(a4)),
        ),
    )


def qutub_template() -> Pattern:
    """Qutub with all four corner amplitudes left free."""
    return Pattern(
        name="qutub",
        width=3,
        height=3,
        cells=(
            (0, 0, None), (1, 0, 1.0), (2, 0, None),
            (0, 1, 1.0), (1, 1, 0.0), (2, 1, 1.0),
            (0, 2, None), (1, 2, 1.0), (2, 2, None),
        ),
    )


_CLASSICAL = {
    "block": ((2, 2), ((0, 0), (1, 0), (0, 1), (1, 1))),
    "tub": ((3, 3), ((1, 0), (0, 1), (2, 1), (1, 2))),
    "blinker": ((3, 1), ((0, 0), (1, 0), (2, 0))),
}


def classical_pattern(name: str) -> Pattern:
    """Standard classical patterns: block, tub, or blinker (all amplitudes 1)."""
    try:
        (w, h), live = _CLASSICAL[name]
    except KeyError:
        raise ValueError(f"unknown classical pattern {name!r}; expected one of {sorted(_CLASSICAL)}") from None
    return Pattern(name=name, width=w, height=h, cells=tuple((dx, dy, 1.0) for dx, dy in live))


def default_library() -> List[Pattern]:
    """Patterns used for census reports: block, tub, blinker, and the qutub template."""
    return [classical_pattern("block"), classical_pattern("tub"), classical_pattern("blinker"), qutub_template()]


def place(u: Universe, p: Pattern, x: int, y: int) -> Universe:
    """Universe equal to ``u`` with the stencil written at toroidal offsets from (x, y)."""
    if p.free_slots:
        raise ValueError(f"pattern {p.name!r} has unbound free slots; call bind() first")
    if p.width > u.width or p.height > u.height:
        raise ValueError(
            f"pattern {p.name!r} ({p.width}x{p.height}) does not fit universe {u.width}x{u.height}"
        )
    arr = u.a.copy()
    for dx, dy, amp in p.cells:
        arr[(y + dy) % u.height, (x + dx) % u.width] = amp
    return Universe(arr, copy=False)


@dataclass(frozen=True)
class SeedConfig:
    """Random fraction-f seeding parameters."""

    width: int
    height: int
    f: float
    rng_seed: int

    def __post_init__(self):
        if self.width < 3 or self.height < 3:
            raise ValueError(f"universe must be at least 3x3, got {self.width}x{self.height}")
        if not (np.isfinite(self.f) and 0.0 <= self.f <= 1.0):
            raise ValueError(f"seed fraction must lie in [0,1], got {self.f!r}")


def random_init(cfg: SeedConfig, precision: Precision = Precision.DOUBLE) -> Universe:
    """Seed each cell independently with probability f, uniform amplitude if seeded.

    Stream discipline (fixed, for bit-reproducibility): a PCG64
    generator seeded with ``rng_seed`` is consumed in row-major cell
    order; each cell takes one uniform draw for the Bernoulli decision
    and, if seeded, one more for its amplitude. Unseeded cells are dead.
    """
    rng = np.random.Generator(np.random.PCG64(cfg.rng_seed))
    dtype = precision.dtype
    arr = np.zeros((cfg.height, cfg.width), dtype=dtype)
    f = cfg.f
    for yx in range(cfg.height * cfg.width):
        if rng.random() < f:
            arr[yx // cfg.width, yx % cfg.width] = dtype.type(rng.random())
    return Universe(arr, copy=False)


def is_still_life(
    p: Pattern,
    padding: int = 2,
    max_generations: int = 1,
    precision: Precision = Precision.DOUBLE,
    *,
    order_invariant: bool = False,
) -> bool:
    """True iff the pattern, embedded in dead padding, is bitwise invariant under step.

    ``max_generations`` > 1 repeats the check to guard against slow
    drift; equality is exact at the run's precision, never tolerance
    based.
    """
    if padding < 2:
        raise ValueError(f"padding must be at least 2 to isolate the pattern, got {padding}")
    if max_generations < 1:
        raise ValueError(f"max_generations must be positive, got {max_generations}")
    u0 = place(Universe.empty(p.width + 2 * padding, p.height + 2 * padding, precision), p, padding, padding)
    ref = u0.a
    u = u0
    for _ in range(max_generations):
        u = step(u, order_invariant=order_invariant)
        if not np.array_equal(u.a, ref):
            return False
    return True


def stability_region(
    template: Pattern,
    grid_step: float,
    padding: int = 2,
    max_generations: int = 1,
    precision: Precision = Precision.DOUBLE,
) -> List[Tuple[Tuple[float, ...], bool]]:
    """Exhaustively test the template's free amplitudes on a [0,1] grid.

    Grid values are ``i * grid_step`` for integral i (never repeated
    addition). Returns one (amplitude assignment, is_still_life) entry
    per lattice point, in lexicographic assignment order.
    """
    free = template.free_slots
    if not free:
        raise ValueError("template has no free amplitude slots")
    if len(free) > 4:
        raise ValueError(f"at most 4 free slots supported, got {len(free)}")
    if not (0.0 < grid_step <= 0.5):
        raise ValueError(f"grid_step must lie in (0, 0.5], got {grid_step!r}")
    dtype = precision.dtype
    n = int(round(1.0 / grid_step))
    values = [float(dtype.type(i) * dtype.type(grid_step)) for i in range(n + 1)]
    results = []
    for assignment in itertools.product(values, repeat=len(free)):
        stable = is_still_life(
            template.bind(assignment), padding=padding,
            max_generations=max_generations, precision=precision,
        )
        results.append((assignment, stable))
    return results


@dataclass(frozen=True)
class Match:
    """One pattern occurrence: anchor is the top-left cell of the matched orientation."""

    name: str
    x: int
    y: int
    values: Tuple[float, ...]  # free-slot amplitudes, row-major over the matched orientation


def _orientations(p: Pattern):
    """Unique dihedral orientations of the pattern's dense grid (NaN marks free slots)."""
    base = p.to_grid()
    seen = set()
    out = []
    for flipped in (base, np.fliplr(base)):
        for k in range(4):
            g = np.ascontiguousarray(np.rot90(flipped, k))
            key = (g.shape, g.tobytes())
            if key not in seen:
                seen.add(key)
                out.append(g)
    return out


def match_patterns(
    u: Universe,
    library: Sequence[Pattern],
    tolerance: float = 0.0,
) -> List[Match]:
    """Find all translations of all dihedral orientations of each pattern.

    A match requires every extent cell (unlisted stencil cells count as
    dead) within ``tolerance`` of the universe, free slots strictly
    inside (0, 1), and a one-cell dead border isolating the pattern.
    Occurrences are deduplicated per (name, anchor). When patterns with
    different numbers of free amplitudes match at the same anchor (for
    a positive tolerance a tub also satisfies the free-cornered qutub
    stencil), only the most specific -- fewest free slots -- is kept.
    Results are sorted by name, then y, then x.
    """
    if tolerance < 0:
        raise ValueError(f"tolerance must be non-negative, got {tolerance!r}")
    a = u.a
    dtype = a.dtype
    tol = dtype.type(tolerance)
    found = {}
    for p in library:
        for grid in _orientations(p):
            gh, gw = grid.shape
            if gh + 2 > u.height or gw + 2 > u.width:
                continue
            ok = np.ones(a.shape, dtype=bool)
            for dy in range(-1, gh + 1):
                for dx in range(-1, gw + 1):
                    shifted = np.roll(a, (-dy, -dx), axis=(0, 1))
                    border = not (0 <= dy < gh and 0 <= dx < gw)
                    if border:
                        ok &= shifted <= tol
                    else:
                        v = grid[dy, dx]
                        if np.isnan(v):
                            ok &= (shifted > 0) & (shifted < 1)
                        else:
                            ok &= np.abs(shifted - dtype.type(v)) <= tol
                    if not ok.any():
                        break
                else:
                    continue
                break
            for y, x in np.argwhere(ok):
                key = (p.name, int(x), int(y))
                if key in found:
                    continue
                values = tuple(
                    float(a[(y + dy) % u.height, (x + dx) % u.width])
                    for dy in range(gh)
                    for dx in range(gw)
                    if np.isnan(grid[dy, dx])
                )
                found[key] = Match(p.name, int(x), int(y), values)
    fewest_free = {}
    for m in found.values():
        anchor = (m.x, m.y)
        best = fewest_free.get(anchor)
        if best is None or len(m.values) < best:
            fewest_free[anchor] = len(m.values)
    matches = [m for m in found.values() if len(m.values) == fewest_free[(m.x, m.y)]]
    return sorted(matches, key=lambda m: (m.name, m.y, m.x))


def save_pattern(p: Pattern, path) -> None:
    """Write the plain-text pattern format; free slots are not serializable."""
    if p.free_slots:
        raise ValueError(f"pattern {p.name!r} has free slots and cannot be serialized")
    if any(ch.isspace() for ch in p.name):
        raise ValueError(f"pattern name {p.name!r} must not contain whitespace")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{p.name} {p.width} {p.height}\n")
        for dx, dy, amp in p.cells:
            fh.write(f"{dx} {dy} {amp:.17g}\n")


def load_pattern(path) -> Pattern:
    """Read the plain-text pattern format written by save_pattern."""
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty pattern file")
    header = lines[0].split()
    if len(header) != 3:
        raise ValueError(f"{path}:1: expected header 'name width height', got {lines[0]!r}")
    name = header[0]
    try:
        width, height = int(header[1]), int(header[2])
    except ValueError:
        raise ValueError(f"{path}:1: non-integer extent in header {lines[0]!r}") from None
    cells = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'dx dy amplitude', got {line!r}")
        try:
            cells.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: malformed stencil entry {line!r}") from None
    return Pattern(name=name, width=width, height=height, cells=tuple(cells))
