import csv
import filecmp
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tests.support import script_of
from vigil.constants import EYE_BOX_COLUMN_COUNT, EYE_BOX_FIRST_COLUMN, EYE_BOX_FIRST_ROW, EYE_BOX_ROW_COUNT
from vigil.errors import DomainError
from vigil.scenario import DriverCondition, InvalidScenarioError, ScenarioScript, ScenarioSegment
from vigil.signal_synth import BundleFormatError, read_bundle, render_frame, synthesize, write_bundle
from vigil.vision_detect import estimate_aperture, frame_diff_score


def test_sample_counts_match_rates():
    bundle = synthesize(script_of((10.0, DriverCondition.Awake)), seed=1)
    assert len(bundle.frames) == 100
    assert len(bundle.accel) == 500
    assert len(bundle.ppg) == 1000
    assert bundle.frames[0].timestamp == 0.0
    assert bundle.duration == 10.0


def test_streams_end_within_one_period_of_the_duration():
    script = script_of((7.3, DriverCondition.Awake), (4.05, DriverCondition.Drowsy))
    bundle = synthesize(script, seed=3)
    duration = script.duration
    assert duration - bundle.frames[-1].timestamp <= 1 / 10 + 1e-9
    assert duration - bundle.accel.timestamps[-1] <= 1 / 50 + 1e-9
    assert duration - bundle.ppg.timestamps[-1] <= 1 / 100 + 1e-9
    assert all(f.timestamp < duration for f in bundle.frames)


def test_same_seed_is_bit_identical(tmp_path: Path):
    script = script_of((20.0, DriverCondition.Sleepy), (10.0, DriverCondition.Awake))
    write_bundle(synthesize(script, seed=11), tmp_path / "a")
    write_bundle(synthesize(script, seed=11), tmp_path / "b")
    for name in ("bundle.json", "frames.csv", "accel.csv", "ppg.csv", "pir.csv"):
        assert filecmp.cmp(tmp_path / "a" / name, tmp_path / "b" / name, shallow=False), name


def test_different_seeds_differ():
    script = script_of((20.0, DriverCondition.Awake))
    a = synthesize(script, seed=1)
    b = synthesize(script, seed=2)
    assert not np.array_equal(a.ppg.amplitudes, b.ppg.amplitudes)


def test_no_pulse_ppg_is_flat():
    bundle = synthesize(script_of((10.0, DriverCondition.Awake), (20.0, DriverCondition.NoPulse)), seed=5)
    flat = bundle.ppg.between(10.0, 30.0)
    assert len(flat) > 0
    assert np.max(np.abs(flat.amplitudes)) <= 0.01


def test_asleep_has_no_pir_and_closed_eyes():
    bundle = synthesize(script_of((30.0, DriverCondition.Asleep)), seed=2)
    assert len(bundle.pir) == 0
    assert all(estimate_aperture(frame) == 0.0 for frame in bundle.frames)


def test_awake_pir_gaps_are_short():
    bundle = synthesize(script_of((120.0, DriverCondition.Awake)), seed=4)
    timestamps = bundle.pir.timestamps
    assert len(timestamps) > 20
    assert timestamps[0] <= 5.0
    assert np.all(np.diff(timestamps) <= 5.0)


def test_pir_events_stay_inside_their_segment():
    bundle = synthesize(script_of((15.0, DriverCondition.Awake), (15.0, DriverCondition.Asleep)), seed=8)
    assert np.all(bundle.pir.timestamps < 15.0)


def test_negative_seed_is_rejected():
    with pytest.raises(InvalidScenarioError):
        synthesize(script_of((5.0, DriverCondition.Awake)), seed=-1)


def test_empty_script_is_rejected():
    with pytest.raises(InvalidScenarioError):
        synthesize(ScenarioScript(segments=()), seed=0)


def test_unknown_override_is_rejected():
    with pytest.raises(InvalidScenarioError):
        ScenarioSegment(5.0, DriverCondition.Awake, {"tail_length": 3.0})


def test_render_frame_layout():
    frame = render_frame(0.75, 0.0, noise_seed=9)
    eye_box = frame.pixels[EYE_BOX_FIRST_ROW : EYE_BOX_FIRST_ROW + EYE_BOX_ROW_COUNT, EYE_BOX_FIRST_COLUMN:40]
    assert np.all((eye_box[:12] >= 225) & (eye_box[:12] <= 235))
    assert np.all((eye_box[12:] >= 35) & (eye_box[12:] <= 45))
    background = frame.pixels[:, :EYE_BOX_FIRST_COLUMN]
    assert np.all((background >= 35) & (background <= 45))


def test_head_pitch_shifts_the_eye_box():
    frame = render_frame(1.0, 10.0, noise_seed=0)
    columns = slice(EYE_BOX_FIRST_COLUMN, EYE_BOX_FIRST_COLUMN + EYE_BOX_COLUMN_COUNT)
    bright_rows = np.flatnonzero(frame.pixels[:, columns].mean(axis=1) > 128)
    assert bright_rows[0] == EYE_BOX_FIRST_ROW + 5
    assert len(bright_rows) == EYE_BOX_ROW_COUNT


def test_eye_box_is_clipped_at_the_frame_edge():
    frame = render_frame(1.0, 80.0, noise_seed=0)
    columns = slice(EYE_BOX_FIRST_COLUMN, EYE_BOX_FIRST_COLUMN + EYE_BOX_COLUMN_COUNT)
    bright_rows = np.flatnonzero(frame.pixels[:, columns].mean(axis=1) > 128)
    assert bright_rows[-1] == 63


@pytest.mark.parametrize("aperture", [-0.01, 1.01])
def test_render_frame_rejects_out_of_range_aperture(aperture: float):
    with pytest.raises(DomainError):
        render_frame(aperture, 0.0, noise_seed=0)


@given(
    aperture=st.floats(min_value=0.0, max_value=1.0),
    noise_seed=st.integers(min_value=0, max_value=2**31 - 2),
    head_pitch=st.floats(min_value=-20.0, max_value=20.0),
)
@settings(max_examples=200, deadline=None)
def test_estimate_aperture_inverts_render_frame(aperture: float, noise_seed: int, head_pitch: float):
    frame = render_frame(aperture, head_pitch, noise_seed)
    assert estimate_aperture(frame) == round(aperture * 16) / 16


def test_bundle_round_trip(tmp_path: Path):
    script = ScenarioScript(
        segments=(
            ScenarioSegment(6.0, DriverCondition.Awake),
            ScenarioSegment(6.0, DriverCondition.Sleepy, {"nod_amplitude": 25.0}),
        ),
        responses=(3.0,),
        resets=(9.5,),
    )
    bundle = synthesize(script, seed=21)
    write_bundle(bundle, tmp_path)
    restored = read_bundle(tmp_path)

    assert restored.seed == 21
    assert restored.script == script
    assert len(restored.frames) == len(bundle.frames)
    assert all(np.array_equal(a.pixels, b.pixels) for a, b in zip(bundle.frames, restored.frames))
    assert [f.timestamp for f in restored.frames] == [f.timestamp for f in bundle.frames]
    assert np.array_equal(restored.accel.ax, bundle.accel.ax)
    assert np.array_equal(restored.ppg.amplitudes, bundle.ppg.amplitudes)
    assert np.array_equal(restored.pir.timestamps, bundle.pir.timestamps)


def test_truncated_bundle_is_rejected(tmp_path: Path):
    write_bundle(synthesize(script_of((5.0, DriverCondition.Awake)), seed=0), tmp_path)
    ppg = tmp_path / "ppg.csv"
    ppg.write_text(ppg.read_text()[:-7])
    with pytest.raises(BundleFormatError):
        read_bundle(tmp_path)


def test_bundle_with_a_short_stream_is_rejected(tmp_path: Path):
    write_bundle(synthesize(script_of((5.0, DriverCondition.Awake)), seed=0), tmp_path)
    accel = tmp_path / "accel.csv"
    lines = accel.read_text().splitlines()
    # Drop the last half second of accelerometer samples
    accel.write_text("\n".join(lines[:-25]) + "\n")
    with pytest.raises(BundleFormatError):
        read_bundle(tmp_path)


def test_bundle_without_manifest_is_rejected(tmp_path: Path):
    write_bundle(synthesize(script_of((5.0, DriverCondition.Awake)), seed=0), tmp_path)
    (tmp_path / "bundle.json").unlink()
    with pytest.raises(BundleFormatError):
        read_bundle(tmp_path)


def test_bundle_with_malformed_number_is_rejected(tmp_path: Path):
    write_bundle(synthesize(script_of((5.0, DriverCondition.Awake)), seed=0), tmp_path)
    pir = tmp_path / "pir.csv"
    pir.write_text("timestamp\nsoon\n")
    with pytest.raises(BundleFormatError):
        read_bundle(tmp_path)


def test_bundle_row_with_an_extra_field_is_rejected(tmp_path: Path):
    write_bundle(synthesize(script_of((5.0, DriverCondition.Awake)), seed=0), tmp_path)
    accel = tmp_path / "accel.csv"
    lines = accel.read_text().splitlines()
    lines[1] += ",0.5"
    accel.write_text("\n".join(lines) + "\n")
    with pytest.raises(BundleFormatError, match="accel.csv:2"):
        read_bundle(tmp_path)


def test_bundle_files_are_plain_csv(tmp_path: Path):
    bundle = synthesize(script_of((5.0, DriverCondition.Awake)), seed=0)
    write_bundle(bundle, tmp_path)
    with (tmp_path / "ppg.csv").open(newline="") as f:
        records = list(csv.DictReader(f))
    assert len(records) == len(bundle.ppg)
    assert float(records[0]["amplitude"]) == bundle.ppg.amplitudes[0]


def test_frame_noise_only_changes_between_segments():
    bundle = synthesize(script_of((5.0, DriverCondition.Asleep), (5.0, DriverCondition.NoPulse)), seed=3)
    scores = [frame_diff_score(a, b) for a, b in zip(bundle.frames, bundle.frames[1:])]
    # The motionless driver only changes the picture where the second segment redraws its noise
    assert sum(score > 0 for score in scores) == 1
