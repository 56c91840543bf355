"""Semi-quantum game of life rule engine.

Each cell is a superposition of alive and dead with alive amplitude
``a`` in [0, 1]; the dead amplitude is always ``sqrt(1 - a^2)`` and is
never stored. One generation applies, to every cell simultaneously, a
non-negative mixture of the birth / death / survival operators whose
weights depend on the neighborhood liveness ``A`` (the sum of the 8
Moore-neighbor alive amplitudes), followed by renormalization.

The engine is written once and parameterized over scalar precision:
single (binary32) and double (binary64) runs share the exact same code
path. Neighbor amplitudes are accumulated in a fixed documented order
(NW, N, NE, W, E, SW, S, SE -- row-major over the 3x3 block skipping
the center), so results are bit-reproducible per precision mode. An
optional order-invariant mode sorts the 8 addends before accumulating,
which makes the arithmetic exactly equivariant under grid rotation.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Precision",
    "CellState",
    "GCoefficients",
    "Universe",
    "cell_from_liveness",
    "g_coefficients",
    "apply_g",
    "neighborhood_liveness",
    "step",
    "run",
    "MOORE_OFFSETS",
]


class Precision(Enum):
    """Scalar width used for all amplitude arithmetic in a run."""

    SINGLE = "single"
    DOUBLE = "double"

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.float32) if self is Precision.SINGLE else np.dtype(np.float64)

    @property
    def eps(self) -> float:
        return float(np.finfo(self.dtype).eps)

    @classmethod
    def from_dtype(cls, dtype) -> "Precision":
        dtype = np.dtype(dtype)
        if dtype == np.float32:
            return cls.SINGLE
        if dtype == np.float64:
            return cls.DOUBLE
        raise ValueError(f"unsupported amplitude dtype {dtype}")

    @classmethod
    def parse(cls, text: str) -> "Precision":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown precision {text!r}; expected 'single' or 'double'") from None


# Moore-neighbor visiting order: row-major over the 3x3 block, center
# skipped. This order is part of the public contract.
MOORE_OFFSETS = (
    (-1, -1),  # NW
    (0, -1),   # N
    (1, -1),   # NE
    (-1, 0),   # W
    (1, 0),    # E
    (-1, 1),   # SW
    (0, 1),    # S
    (1, 1),    # SE
)

# Maximum distance (in machine epsilons) the post-normalization clamp is
# allowed to move an amplitude. Anything larger indicates a genuine bug.
_CLAMP_LIMIT_EPS = 4.0


def _scalar(dtype, value):
    return dtype.type(value)


@dataclass(frozen=True)
class CellState:
    """One cell's alive amplitude; the dead amplitude is derived."""

    a: float

    def __post_init__(self):
        if not np.isfinite(self.a):
            raise ValueError(f"alive amplitude must be finite, got {self.a!r}")
        if not 0.0 <= self.a <= 1.0:
            raise ValueError(f"alive amplitude must lie in [0, 1], got {self.a!r}")

    @property
    def b(self) -> float:
        """Dead amplitude, sqrt(1 - a^2); normalization holds by construction."""
        return float(np.sqrt(1.0 - self.a * self.a))


def cell_from_liveness(a: float) -> CellState:
    """Build a cell from its alive amplitude. Rejects values outside [0, 1]."""
    return CellState(float(a))


@dataclass(frozen=True)
class GCoefficients:
    """Non-negative weights of the death / survival / birth operator mixture."""

    c_d: float
    c_s: float
    c_b: float

    def __post_init__(self):
        for name, c in (("c_d", self.c_d), ("c_s", self.c_s), ("c_b", self.c_b)):
            if not np.isfinite(c):
                raise ValueError(f"{name} must be finite, got {c!r}")
            if c < 0.0:
                raise ValueError(f"{name} must be non-negative, got {c!r}")
        if self.c_d == 0.0 and self.c_s == 0.0 and self.c_b == 0.0:
            raise ValueError("at least one mixture weight must be positive")
        if self.c_d > 0.0 and self.c_s > 0.0 and self.c_b > 0.0:
            raise ValueError("at most two mixture weights may be nonzero")


def _coefficient_arrays(liveness, dtype):
    """Vectorized mixture weights for an array of neighborhood liveness values.

    Implements the rule table as an ordered cascade:
    A <= 1 -> pure death; 1 < A <= 2 -> death/survival mix;
    2 < A <= 3 -> survival/birth mix; 3 < A < 4 -> birth/death mix;
    A >= 4 -> pure death. The (sqrt(2)+1) factor and all band arithmetic
    are evaluated in the run's scalar width.
    """
    one = _scalar(dtype, 1)
    two = _scalar(dtype, 2)
    three = _scalar(dtype, 3)
    four = _scalar(dtype, 4)
    zero = _scalar(dtype, 0)
    s21 = np.sqrt(two) + one  # sqrt(2) + 1, computed at the run's precision

    a = liveness
    m1 = a <= one
    m2 = ~m1 & (a <= two)
    m3 = ~m1 & ~m2 & (a <= three)
    m4 = ~m1 & ~m2 & ~m3 & (a < four)

    c_d = np.select([m1, m2, m3, m4], [one, s21 * (two - a), zero, a - three], default=one)
    c_s = np.select([m1, m2, m3, m4], [zero, a - one, s21 * (three - a), zero], default=zero)
    c_b = np.select([m1, m2, m3, m4], [zero, zero, a - two, s21 * (four - a)], default=zero)
    return c_d, c_s, c_b


def _apply_arrays(a, c_d, c_s, c_b):
    """Apply the operator mixture to an amplitude array and renormalize.

    The unnormalized image of (a, b) under c_d*D + c_s*S + c_b*B is
    a' = c_s*a + c_b*(a+b), b' = c_s*b + c_d*(a+b). Exact fixed points
    are preserved bitwise: b' == 0 yields exactly 1, a' == 0 yields
    exactly 0, and a pure-survival mixture returns the input amplitude
    unchanged. These branches are data-independent masks, so single and
    double precision share the identical code path.
    """
    dtype = a.dtype
    zero = _scalar(dtype, 0)
    one = _scalar(dtype, 1)

    b = np.sqrt(one - a * a)
    ab = a + b
    ap = c_s * a + c_b * ab
    bp = c_s * b + c_d * ab
    with np.errstate(divide="ignore", invalid="ignore"):
        out = ap / np.sqrt(ap * ap + bp * bp)
    out = np.where(bp == zero, one, out)
    out = np.where(ap == zero, zero, out)
    out = np.where((c_b == zero) & (c_d == zero), a, out)

    if np.isnan(out).any():
        raise RuntimeError("normalization produced NaN; zero-norm internal invariant failure")
    limit = _CLAMP_LIMIT_EPS * np.finfo(dtype).eps
    excursion = max(float(np.max(out)) - 1.0, -float(np.min(out)), 0.0)
    if excursion > limit:
        raise RuntimeError(
            f"amplitude left [0,1] by {excursion:g}, beyond the {limit:g} clamp allowance"
        )
    return np.clip(out, zero, one)


class Universe:
    """Immutable 2D toroidal grid of cell amplitudes.

    The amplitude array is row-major with shape (height, width); index
    (x, y) wraps toroidally. Instances are snapshots: the underlying
    array is marked read-only and safe to share across threads.
    """

    __slots__ = ("a", "_digest")

    def __init__(self, amplitudes, *, copy: bool = True):
        arr = np.array(amplitudes, copy=copy, order="C")
        if arr.ndim != 2:
            raise ValueError(f"amplitude array must be 2D, got shape {arr.shape}")
        Precision.from_dtype(arr.dtype)
        if arr.size == 0:
            raise ValueError("universe must contain at least one cell")
        if not np.isfinite(arr).all():
            raise ValueError("amplitudes must be finite")
        if (arr < 0).any() or (arr > 1).any():
            raise ValueError("amplitudes must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "a", arr)
        object.__setattr__(self, "_digest", None)

    def __setattr__(self, name, value):
        raise AttributeError("Universe is immutable")

    @classmethod
    def empty(cls, width: int, height: int, precision: Precision = Precision.DOUBLE) -> "Universe":
        if width < 1 or height < 1:
            raise ValueError(f"universe dimensions must be positive, got {width}x{height}")
        return cls(np.zeros((height, width), dtype=precision.dtype), copy=False)

    @property
    def width(self) -> int:
        return self.a.shape[1]

    @property
    def height(self) -> int:
        return self.a.shape[0]

    @property
    def precision(self) -> Precision:
        return Precision.from_dtype(self.a.dtype)

    def cell(self, x: int, y: int) -> float:
        """Amplitude at toroidal coordinate (x, y)."""
        return float(self.a[y % self.height, x % self.width])

    def is_dead(self) -> bool:
        return not self.a.any()

    def translated(self, dx: int, dy: int) -> "Universe":
        """Universe shifted by (dx, dy) with toroidal wrap."""
        return Universe(np.roll(self.a, (dy, dx), axis=(0, 1)), copy=False)

    def digest(self) -> bytes:
        """Bitwise fingerprint of dimensions, precision and amplitudes."""
        if self._digest is None:
            h = hashlib.blake2b(digest_size=16)
            h.update(f"{self.width},{self.height},{self.a.dtype.str}".encode())
            h.update(self.a.tobytes())
            object.__setattr__(self, "_digest", h.digest())
        return self._digest

    def __eq__(self, other) -> bool:
        if not isinstance(other, Universe):
            return NotImplemented
        return (
            self.a.shape == other.a.shape
            and self.a.dtype == other.a.dtype
            and bool(np.array_equal(self.a, other.a))
        )

    def __hash__(self):
        return hash(self.digest())

    def __repr__(self):
        return f"Universe({self.width}x{self.height}, {self.precision.value})"


def g_coefficients(liveness: float, precision: Precision = Precision.DOUBLE) -> GCoefficients:
    """Mixture weights for a single neighborhood-liveness value.

    Delegates to the same vectorized kernel the grid update uses, so
    scalar and grid evaluations agree bitwise.
    """
    if not np.isfinite(liveness):
        raise ValueError(f"neighborhood liveness must be finite, got {liveness!r}")
    if liveness < 0:
        raise ValueError(f"neighborhood liveness must be non-negative, got {liveness!r}")
    arr = np.array([liveness], dtype=precision.dtype)
    c_d, c_s, c_b = _coefficient_arrays(arr, precision.dtype)
    return GCoefficients(float(c_d[0]), float(c_s[0]), float(c_b[0]))


def apply_g(g: GCoefficients, cell: CellState, precision: Precision = Precision.DOUBLE) -> CellState:
    """Apply an operator mixture to one cell and renormalize."""
    dtype = precision.dtype
    a = np.array([cell.a], dtype=dtype)
    c_d = np.array([g.c_d], dtype=dtype)
    c_s = np.array([g.c_s], dtype=dtype)
    c_b = np.array([g.c_b], dtype=dtype)
    out = _apply_arrays(a, c_d, c_s, c_b)
    return CellState(float(out[0]))


def _neighbor_views(a):
    """The 8 Moore-neighbor arrays in the documented visiting order."""
    return [np.roll(a, (-dy, -dx), axis=(0, 1)) for dx, dy in MOORE_OFFSETS]


def _liveness_array(a, order_invariant: bool):
    views = _neighbor_views(a)
    if order_invariant:
        stacked = np.stack(views)
        stacked.sort(axis=0, kind="stable")
        views = list(stacked)
    acc = views[0].copy()
    for v in views[1:]:
        acc += v
    return acc


def neighborhood_liveness(u: Universe, x: int, y: int, *, order_invariant: bool = False) -> float:
    """Sum of the 8 toroidal Moore-neighbor amplitudes of (x, y).

    Accumulated sequentially in the documented order (or over the
    sorted addends in order-invariant mode), bitwise identical to the
    grid update's per-cell arithmetic.
    """
    dtype = u.a.dtype
    vals = [
        _scalar(dtype, u.a[(y + dy) % u.height, (x + dx) % u.width])
        for dx, dy in MOORE_OFFSETS
    ]
    if order_invariant:
        vals.sort()
    acc = vals[0]
    for v in vals[1:]:
        acc = acc + v
    return float(acc)


def _step_reference(a, order_invariant: bool):
    """Pure-numpy generation update; the bitwise reference for the fast path."""
    liveness = _liveness_array(a, order_invariant)
    c_d, c_s, c_b = _coefficient_arrays(liveness, a.dtype)
    return _apply_arrays(a, c_d, c_s, c_b)


def _build_step_kernel():
    """Compile the per-cell update with numba when available.

    The kernel performs the exact same IEEE operations in the exact
    same order as the numpy reference (verified bitwise by the test
    suite), so using it never changes results. Set SEMILIFE_PURE_NUMPY=1
    to force the reference path.
    """
    if os.environ.get("SEMILIFE_PURE_NUMPY"):
        return None
    try:
        import numba
    except ImportError:
        return None

    @numba.njit(cache=True)
    def kernel(a, out, order_invariant):
        H, W = a.shape
        one = a.dtype.type(1.0)
        two = one + one
        three = two + one
        four = three + one
        zero = a.dtype.type(0.0)
        s21 = np.sqrt(two) + one
        excursion = zero
        nb = np.empty(8, a.dtype)
        for y in range(H):
            ym = y - 1 if y > 0 else H - 1
            yp = y + 1 if y < H - 1 else 0
            for x in range(W):
                xm = x - 1 if x > 0 else W - 1
                xp = x + 1 if x < W - 1 else 0
                if order_invariant:
                    nb[0] = a[ym, xm]; nb[1] = a[ym, x]; nb[2] = a[ym, xp]
                    nb[3] = a[y, xm]; nb[4] = a[y, xp]
                    nb[5] = a[yp, xm]; nb[6] = a[yp, x]; nb[7] = a[yp, xp]
                    for i in range(1, 8):
                        key = nb[i]
                        j = i - 1
                        while j >= 0 and nb[j] > key:
                            nb[j + 1] = nb[j]
                            j -= 1
                        nb[j + 1] = key
                    liveness = nb[0]
                    for i in range(1, 8):
                        liveness = liveness + nb[i]
                else:
                    liveness = (
                        a[ym, xm] + a[ym, x] + a[ym, xp]
                        + a[y, xm] + a[y, xp]
                        + a[yp, xm] + a[yp, x] + a[yp, xp]
                    )
                if liveness <= one:
                    c_d = one; c_s = zero; c_b = zero
                elif liveness <= two:
                    c_d = s21 * (two - liveness); c_s = liveness - one; c_b = zero
                elif liveness <= three:
                    c_d = zero; c_s = s21 * (three - liveness); c_b = liveness - two
                elif liveness < four:
                    c_d = liveness - three; c_s = zero; c_b = s21 * (four - liveness)
                else:
                    c_d = one; c_s = zero; c_b = zero
                av = a[y, x]
                if c_b == zero and c_d == zero:
                    r = av
                else:
                    b = np.sqrt(one - av * av)
                    ab = av + b
                    ap = c_s * av + c_b * ab
                    bp = c_s * b + c_d * ab
                    if ap == zero:
                        r = zero
                    elif bp == zero:
                        r = one
                    else:
                        r = ap / np.sqrt(ap * ap + bp * bp)
                        if r > one:
                            if r - one > excursion:
                                excursion = r - one
                            r = one
                        elif r < zero:
                            if -r > excursion:
                                excursion = -r
                            r = zero
                out[y, x] = r
        return excursion

    return kernel


_step_kernel = _build_step_kernel()


def _step_fast(a, order_invariant: bool):
    out = np.empty_like(a)
    excursion = float(_step_kernel(a, out, order_invariant))
    if np.isnan(out).any():
        raise RuntimeError("normalization produced NaN; zero-norm internal invariant failure")
    limit = _CLAMP_LIMIT_EPS * float(np.finfo(a.dtype).eps)
    if excursion > limit:
        raise RuntimeError(
            f"amplitude left [0,1] by {excursion:g}, beyond the {limit:g} clamp allowance"
        )
    return out


def step(u: Universe, *, order_invariant: bool = False) -> Universe:
    """One synchronous generation over the whole torus.

    The input generation is read-only during the update; the result is
    bitwise-deterministic given the input, the precision mode and the
    summation order.
    """
    if _step_kernel is not None:
        return Universe(_step_fast(u.a, order_invariant), copy=False)
    return Universe(_step_reference(u.a, order_invariant), copy=False)


Observer = Callable[[int, Universe], None]


def run(
    u: Universe,
    generations: int,
    observer: Optional[Observer] = None,
    *,
    order_invariant: bool = False,
) -> Universe:
    """Apply ``step`` repeatedly, calling ``observer(gen, universe)`` after each."""
    if generations < 0:
        raise ValueError(f"generation count must be non-negative, got {generations}")
    for gen in range(1, generations + 1):
        u = step(u, order_invariant=order_invariant)
        if observer is not None:
            observer(gen, u)
    return u
