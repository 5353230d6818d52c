import csv

import numpy as np
import pytest

from modkg import io as mio
from modkg.errors import FormatError
from modkg.grid import Field, GridSpec
from modkg.trajectory import Trajectory

from conftest import band_limited


@pytest.fixture
def field(rng):
    return band_limited(GridSpec(2, 20.0, 16), rng, cap=3, count=1)


def test_v2_round_trip_is_exact(tmp_path, field):
    path = tmp_path / "f.mkgf"
    mio.write_field(path, field, version=2)
    back = mio.read_field(path)
    assert back.spec == field.spec
    assert np.array_equal(back.values, field.values)


def test_v1_round_trip_is_single_precision(tmp_path, field):
    path = tmp_path / "f.mkgf"
    mio.write_field(path, field, version=1)
    back = mio.read_field(path)
    assert back.spec == field.spec
    scale = np.max(np.abs(field.values))
    assert np.max(np.abs(back.values - field.values)) <= 1e-6 * scale
    assert path.stat().st_size == 24 + 8 * 16 * 16


def test_header_layout(field):
    raw = mio.field_bytes(field, 2)
    assert raw[:4] == b"MKGF"
    assert int.from_bytes(raw[4:8], "little") == 2
    assert int.from_bytes(raw[8:12], "little") == 2
    assert int.from_bytes(raw[12:16], "little") == 16


@pytest.mark.parametrize(
    "mutate",
    [
        lambda b: b"XXXX" + b[4:],
        lambda b: b[:4] + (9).to_bytes(4, "little") + b[8:],
        lambda b: b[:-1],
        lambda b: b[:10],
    ],
)
def test_bad_files_raise_format_error(field, mutate):
    with pytest.raises(FormatError):
        mio.parse_field(mutate(mio.field_bytes(field)))


def test_unknown_write_version(field):
    with pytest.raises(FormatError):
        mio.field_bytes(field, 3)


def test_field_csv(tmp_path):
    spec = GridSpec(1, 8.0, 16)
    f = Field.plane_wave(spec, [1])
    path = tmp_path / "f.csv"
    mio.write_field_csv(path, f)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["i0", "x0", "re", "im"]
    assert len(rows) == 17
    assert float(rows[1][1]) == -4.0
    assert complex(float(rows[5][2]), float(rows[5][3])) == pytest.approx(f.values[4])


def test_trajectory_round_trip_and_diagnostics(tmp_path, rng):
    spec = GridSpec(1, 16.0, 16)
    frames = [band_limited(spec, rng, cap=2, count=3) for _ in range(3)]
    ut = [band_limited(spec, rng, cap=2, count=3) for _ in range(3)]
    traj = Trajectory.from_fields([0.0, 0.5, 1.0], frames, ut)
    traj.diagnostics.update(contraction_ratios=[0.1, 0.01], changes=[1e-3, 1e-9])
    mio.write_trajectory(tmp_path, traj)
    back = mio.read_trajectory(tmp_path)
    assert np.array_equal(back.u, traj.u) and np.array_equal(back.ut, traj.ut)
    assert np.array_equal(back.times, traj.times)
    mio.write_diagnostics(tmp_path / "d.csv", traj, final_residual=1e-13, drift=None)
    rows = list(csv.reader(open(tmp_path / "d.csv")))
    assert rows[0] == mio.DIAGNOSTIC_COLUMNS
    assert [r[0] for r in rows[1:]] == ["1", "2", "final"]
    assert float(rows[-1][2]) == 1e-13 and rows[-1][3] == ""
