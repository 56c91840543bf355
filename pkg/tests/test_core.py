"""Rule-engine tests: operator mixtures, normalization, stepping, reductions.

Oracles are written independently of the engine: a literal 2x2 matrix
for the operator action, and a direct neighbor-count implementation of
the classical Conway rules for the integer-amplitude reduction.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semilife.core import (
    CellState,
    GCoefficients,
    MOORE_OFFSETS,
    Precision,
    Universe,
    _step_kernel,
    _step_reference,
    apply_g,
    cell_from_liveness,
    g_coefficients,
    neighborhood_liveness,
    run,
    step,
)

S21 = math.sqrt(2.0) + 1.0


# ---------------------------------------------------------------- oracles


def matrix_oracle(c_d, c_s, c_b, a):
    """Independent 2x2 matrix model of the operator mixture.

    D = [[0,0],[1,1]], S = I, B = [[1,1],[0,0]] acting on (a, b); the
    mixture is applied as one matrix and the image is renormalized.
    """
    b = math.sqrt(1.0 - a * a)
    m = (
        c_d * np.array([[0.0, 0.0], [1.0, 1.0]])
        + c_s * np.eye(2)
        + c_b * np.array([[1.0, 1.0], [0.0, 0.0]])
    )
    ap, bp = m @ np.array([a, b])
    return ap / math.hypot(ap, bp)


def conway_step(grid):
    """Independent classical Conway step on a 0/1 integer array (toroidal)."""
    g = np.asarray(grid, dtype=int)
    h, w = g.shape
    out = np.zeros_like(g)
    for y in range(h):
        for x in range(w):
            n = 0
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if dx or dy:
                        n += g[(y + dy) % h, (x + dx) % w]
            out[y, x] = 1 if (n == 3 or (n == 2 and g[y, x])) else 0
    return out


# ---------------------------------------------------------------- CellState


def test_cell_from_liveness_examples():
    assert cell_from_liveness(0.0).b == 1.0
    assert cell_from_liveness(1.0).b == 0.0
    assert cell_from_liveness(0.6).b == pytest.approx(0.8, abs=1e-15)


@pytest.mark.parametrize("bad", [-0.1, 1.1, float("nan"), float("inf")])
def test_cell_rejects_out_of_range(bad):
    with pytest.raises(ValueError):
        cell_from_liveness(bad)


def test_cell_normalization_holds():
    for a in np.linspace(0, 1, 101):
        c = CellState(float(a))
        assert c.a * c.a + c.b * c.b == pytest.approx(1.0, abs=1e-15)


# ---------------------------------------------------------------- coefficients


def test_g_coefficients_examples():
    assert g_coefficients(0.0) == GCoefficients(1.0, 0.0, 0.0)
    assert g_coefficients(2.0) == GCoefficients(0.0, 1.0, 0.0)
    g = g_coefficients(2.5)
    assert g.c_d == 0.0
    assert g.c_s == pytest.approx(S21 * 0.5, rel=1e-15)
    assert g.c_b == pytest.approx(0.5, rel=1e-15)
    assert g_coefficients(5.0) == GCoefficients(1.0, 0.0, 0.0)


def test_g_coefficients_band_edges():
    assert g_coefficients(1.0) == GCoefficients(1.0, 0.0, 0.0)
    # (sqrt(2)+1)*(2-2) vanishes: pure survival
    assert g_coefficients(2.0) == GCoefficients(0.0, 1.0, 0.0)
    g3 = g_coefficients(3.0)
    assert (g3.c_d, g3.c_s, g3.c_b) == (0.0, 0.0, 1.0)
    # fourth band at A->4 and the A>=4 rule agree: pure death
    assert g_coefficients(4.0) == GCoefficients(1.0, 0.0, 0.0)


@given(st.floats(min_value=0.0, max_value=8.0, allow_nan=False))
def test_g_coefficients_properties(a):
    g = g_coefficients(a)
    assert g.c_d >= 0 and g.c_s >= 0 and g.c_b >= 0
    # at most two weights nonzero, and only adjacent-band pairings
    nonzero = {n for n, c in (("d", g.c_d), ("s", g.c_s), ("b", g.c_b)) if c > 0}
    assert nonzero in ({"d"}, {"d", "s"}, {"s"}, {"s", "b"}, {"b"}, {"b", "d"})


@pytest.mark.parametrize("bad", [-0.5, float("nan"), float("inf")])
def test_g_coefficients_rejects(bad):
    with pytest.raises(ValueError):
        g_coefficients(bad)


def test_gcoefficients_validation():
    with pytest.raises(ValueError):
        GCoefficients(0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        GCoefficients(0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        GCoefficients(-1.0, 0.0, 1.0)


# ---------------------------------------------------------------- apply_g


def test_apply_g_pure_operators_exact():
    birth = GCoefficients(0.0, 0.0, 1.0)
    death = GCoefficients(1.0, 0.0, 0.0)
    survive = GCoefficients(0.0, 1.0, 0.0)
    for a in (0.0, 0.3, 0.6, 1.0):
        cell = CellState(a)
        assert apply_g(birth, cell).a == 1.0
        assert apply_g(death, cell).a == 0.0
        assert apply_g(survive, cell).a == a  # bitwise identity


def test_apply_g_mixture_against_matrix_oracle():
    g = GCoefficients(0.0, 1.207107, 0.5)
    out = apply_g(g, CellState(0.6))
    # unnormalized image is (1.4242642, 0.9656856); normalized alive
    # amplitude 0.8276862 (hand matrix-multiply, norm 1.7207780)
    assert out.a == pytest.approx(0.8276862, abs=1e-7)
    assert out.a == pytest.approx(matrix_oracle(0.0, 1.207107, 0.5, 0.6), rel=1e-15)


@given(
    st.floats(min_value=0.0, max_value=8.0, allow_nan=False),
    st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
)
def test_apply_g_matches_matrix_oracle_everywhere(liveness, a):
    g = g_coefficients(liveness)
    got = apply_g(g, CellState(a)).a
    want = matrix_oracle(g.c_d, g.c_s, g.c_b, a)
    assert 0.0 <= got <= 1.0
    assert got == pytest.approx(want, abs=1e-12)


# ------------------------------------------------------- neighborhood liveness


def test_neighborhood_liveness_examples():
    dead = Universe.empty(5, 5)
    assert neighborhood_liveness(dead, 2, 2) == 0.0
    live = Universe(np.ones((5, 5)))
    assert neighborhood_liveness(live, 0, 0) == 8.0  # toroidal wrap
    lone = Universe.empty(5, 5)
    arr = lone.a.copy()
    arr[2, 2] = 1.0
    lone = Universe(arr)
    assert neighborhood_liveness(lone, 3, 2) == 1.0
    assert neighborhood_liveness(lone, 2, 2) == 0.0  # excludes the cell itself


def test_moore_order_is_row_major_center_skipped():
    expected = ((-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1))
    assert MOORE_OFFSETS == expected


def test_neighborhood_accumulation_order_matters_and_sorting_fixes_it():
    rng = np.random.default_rng(7)
    arr = rng.random((5, 5))
    u = Universe(arr)
    # order-invariant mode equals the sorted sequential sum exactly
    vals = sorted(u.a[(2 + dy) % 5, (2 + dx) % 5] for dx, dy in MOORE_OFFSETS)
    acc = vals[0]
    for v in vals[1:]:
        acc = acc + v
    assert neighborhood_liveness(u, 2, 2, order_invariant=True) == acc


# ---------------------------------------------------------------- step / run


def test_step_empty_universe_stays_empty():
    u = Universe.empty(8, 8)
    assert step(u) == u


def test_step_blinker_rotates():
    u = Universe.empty(7, 7)
    arr = u.a.copy()
    arr[3, 2:5] = 1.0
    u = Universe(arr)
    v = step(u)
    expected = np.zeros((7, 7))
    expected[2:5, 3] = 1.0
    assert np.array_equal(v.a, expected)
    assert step(v) == u  # period 2


def test_step_agrees_with_conway_on_classical_grids():
    rng = np.random.default_rng(123)
    for _ in range(50):
        grid = (rng.random((12, 12)) < 0.4).astype(np.float64)
        u = Universe(grid)
        got = step(u).a
        assert np.array_equal(got, conway_step(grid).astype(np.float64))


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_cgol_reduction_property(seed):
    rng = np.random.default_rng(seed)
    grid = (rng.random((9, 9)) < rng.uniform(0.1, 0.6)).astype(np.float64)
    assert np.array_equal(step(Universe(grid)).a, conway_step(grid).astype(np.float64))


def test_run_composition_and_zero():
    rng = np.random.default_rng(5)
    u = Universe(rng.random((6, 6)))
    assert run(u, 0) == u
    assert run(u, 2) == step(step(u))


def test_run_observer_sees_every_generation():
    seen = []
    u = Universe.empty(4, 4)
    run(u, 3, observer=lambda gen, v: seen.append((gen, v.is_dead())))
    assert seen == [(1, True), (2, True), (3, True)]


def test_run_rejects_negative():
    with pytest.raises(ValueError):
        run(Universe.empty(3, 3), -1)


# ---------------------------------------------------------------- properties


@pytest.mark.parametrize("precision", [Precision.SINGLE, Precision.DOUBLE])
def test_determinism(precision):
    rng = np.random.default_rng(9)
    arr = rng.random((20, 20)).astype(precision.dtype)
    a = run(Universe(arr), 50)
    b = run(Universe(arr), 50)
    assert a == b


@pytest.mark.parametrize("precision", [Precision.SINGLE, Precision.DOUBLE])
def test_toroidal_translation_equivariance(precision):
    rng = np.random.default_rng(11)
    arr = rng.random((16, 16)).astype(precision.dtype)
    u = Universe(arr)
    for dx, dy in ((3, 5), (15, 1), (8, 8)):
        assert step(u.translated(dx, dy)) == step(u).translated(dx, dy)


def test_rotation_equivariance_bitwise_in_order_invariant_mode():
    rng = np.random.default_rng(13)
    arr = rng.random((12, 12))
    u = Universe(arr)
    rot = Universe(np.ascontiguousarray(np.rot90(arr)))
    stepped_then_rot = np.ascontiguousarray(np.rot90(step(u, order_invariant=True).a))
    rot_then_stepped = step(rot, order_invariant=True).a
    assert np.array_equal(stepped_then_rot, rot_then_stepped)


@pytest.mark.parametrize("precision", [Precision.SINGLE, Precision.DOUBLE])
@pytest.mark.parametrize("order_invariant", [False, True])
def test_fast_kernel_matches_reference_bitwise(precision, order_invariant):
    if _step_kernel is None:
        pytest.skip("compiled kernel unavailable; reference path already in use")
    rng = np.random.default_rng(17)
    arr = rng.random((25, 25)).astype(precision.dtype)
    for _ in range(20):
        ref = _step_reference(arr, order_invariant)
        out = np.empty_like(arr)
        _step_kernel(arr, out, order_invariant)
        assert np.array_equal(ref, out)
        arr = ref


@pytest.mark.parametrize("precision", [Precision.SINGLE, Precision.DOUBLE])
def test_amplitudes_stay_normalized_over_long_runs(precision):
    rng = np.random.default_rng(19)
    u = Universe(rng.random((15, 15)).astype(precision.dtype))
    u = run(u, 200)
    assert float(u.a.min()) >= 0.0 and float(u.a.max()) <= 1.0


# ---------------------------------------------------------------- Universe


def test_universe_validation():
    with pytest.raises(ValueError):
        Universe(np.zeros((0, 3)))
    with pytest.raises(ValueError):
        Universe(np.zeros(4))
    with pytest.raises(ValueError):
        Universe(np.full((2, 2), 1.5))
    with pytest.raises(ValueError):
        Universe(np.full((2, 2), np.nan))
    with pytest.raises(ValueError):
        Universe(np.zeros((2, 2), dtype=np.float16))


def test_universe_is_immutable():
    u = Universe.empty(3, 3)
    with pytest.raises(AttributeError):
        u.a = None
    with pytest.raises((ValueError, RuntimeError)):
        u.a[0, 0] = 1.0


def test_universe_cell_wraps_toroidally():
    arr = np.zeros((4, 6))
    arr[1, 2] = 0.5
    u = Universe(arr)
    assert u.cell(2, 1) == 0.5
    assert u.cell(2 + 6, 1 - 4) == 0.5
    assert u.cell(-4, 5) == 0.5


def test_universe_digest_distinguishes_precision():
    a64 = Universe(np.zeros((3, 3), dtype=np.float64))
    a32 = Universe(np.zeros((3, 3), dtype=np.float32))
    assert a64.digest() != a32.digest()
    assert a64 != a32


def test_precision_parse():
    assert Precision.parse("single") is Precision.SINGLE
    assert Precision.parse(" Double ") is Precision.DOUBLE
    with pytest.raises(ValueError):
        Precision.parse("half")
