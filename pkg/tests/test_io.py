"""Frame, state-dump, and series serialization tests."""

import numpy as np
import pytest

from semilife.analysis import LivenessSeries
from semilife.core import Precision, Universe
from semilife.io import (
    dump_state,
    export_frame,
    load_state,
    read_series_csv,
    write_series_csv,
)
from semilife.patterns import place, qutub


# ---------------------------------------------------------------- frames


def test_export_frame_extremes(tmp_path):
    path = tmp_path / "dead.pgm"
    export_frame(Universe.empty(4, 3), path)
    data = path.read_bytes()
    assert data == b"P5\n4 3\n255\n" + b"\x00" * 12

    export_frame(Universe(np.ones((2, 2))), path)
    assert path.read_bytes() == b"P5\n2 2\n255\n" + b"\xff" * 4


def test_export_frame_rounds_half_up(tmp_path):
    path = tmp_path / "half.pgm"
    export_frame(Universe(np.full((1, 1), 0.5)), path)
    # 0.5 * 255 = 127.5 -> 128 under round-half-up
    assert path.read_bytes()[-1] == 128


def test_export_frame_deterministic_bytes(tmp_path):
    u = Universe(np.random.default_rng(2).random((8, 8)))
    export_frame(u, tmp_path / "a.pgm")
    export_frame(u, tmp_path / "b.pgm")
    assert (tmp_path / "a.pgm").read_bytes() == (tmp_path / "b.pgm").read_bytes()


# ---------------------------------------------------------------- dumps


@pytest.mark.parametrize("format", ["text", "binary"])
@pytest.mark.parametrize("precision", [Precision.SINGLE, Precision.DOUBLE])
def test_dump_round_trip_bitwise(tmp_path, format, precision):
    rng = np.random.default_rng(4)
    u = Universe(rng.random((7, 5)).astype(precision.dtype))
    path = tmp_path / f"state.{format}"
    dump_state(u, path, format=format)
    v = load_state(path)
    assert v == u
    assert v.precision is precision


def test_dump_qutub_has_nine_records(tmp_path):
    u = place(Universe.empty(3, 3), qutub(0.5, 0.5, 0.5, 0.5), 0, 0)
    path = tmp_path / "q.dump"
    dump_state(u, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 2 + 9  # magic + header + one amplitude per cell


def test_dump_rejects_unknown_format(tmp_path):
    with pytest.raises(ValueError):
        dump_state(Universe.empty(2, 2), tmp_path / "x", format="json")


def test_load_truncated_text_names_missing_cells(tmp_path):
    u = Universe(np.random.default_rng(6).random((4, 4)))
    path = tmp_path / "t.dump"
    dump_state(u, path)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-3]) + "\n")
    with pytest.raises(ValueError, match="3 cells missing"):
        load_state(path)


def test_load_truncated_binary_fails(tmp_path):
    u = Universe(np.random.default_rng(6).random((4, 4)))
    path = tmp_path / "b.dump"
    dump_state(u, path, format="binary")
    data = path.read_bytes()
    path.write_bytes(data[:-8])
    with pytest.raises(ValueError, match="truncated"):
        load_state(path)


def test_load_rejects_foreign_file(tmp_path):
    path = tmp_path / "junk"
    path.write_text("hello world\n")
    with pytest.raises(ValueError):
        load_state(path)


def test_load_reports_malformed_amplitude_line(tmp_path):
    path = tmp_path / "m.dump"
    dump_state(Universe.empty(2, 2), path)
    lines = path.read_text().splitlines()
    lines[3] = "zero point five"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ValueError, match="m.dump:4"):
        load_state(path)


# ---------------------------------------------------------------- series


def test_series_csv_round_trip(tmp_path):
    s = LivenessSeries()
    rng = np.random.default_rng(8)
    for g in range(50):
        s.append(g, float(rng.random()), float(rng.random()))
    path = tmp_path / "series.csv"
    write_series_csv(s, path)
    t = read_series_csv(path)
    assert t.generations == s.generations
    assert t.mean_a == s.mean_a  # 17 significant digits round-trip exactly
    assert t.std_a == s.std_a


def test_series_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("gen,mean\n")
    with pytest.raises(ValueError, match="bad.csv:1"):
        read_series_csv(path)


def test_frame_dump_series_consistency(tmp_path):
    from semilife.analysis import mean_liveness

    u = Universe(np.random.default_rng(10).random((9, 9)))
    dump_state(u, tmp_path / "s.dump")
    export_frame(u, tmp_path / "s.pgm")
    v = load_state(tmp_path / "s.dump")
    pixels = np.frombuffer((tmp_path / "s.pgm").read_bytes().split(b"255\n", 1)[1], dtype=np.uint8)
    expected = np.floor(v.a.astype(np.float64) * 255.0 + 0.5).astype(np.uint8).ravel()
    assert np.array_equal(pixels, expected)
    assert abs(mean_liveness(v) - float(v.a.mean())) <= 8 * np.finfo(np.float64).eps
