"""Deterministic synthetic sensors.

Every stream is a pure function of the scenario script and the seed. Randomness is drawn from generators keyed on
(seed, segment index, stream), so adding a stream or reordering the evaluation never perturbs the other streams.
"""
import csv
import functools
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np
from pydantic import BaseModel, ValidationError

from vigil.constants import (
    BRIGHT_INTENSITY,
    DARK_INTENSITY,
    DEGREES_PER_EYE_BOX_ROW_SHIFT,
    EYE_BOX_COLUMN_COUNT,
    EYE_BOX_FIRST_COLUMN,
    EYE_BOX_FIRST_ROW,
    EYE_BOX_ROW_COUNT,
    FRAME_HEIGHT,
    FRAME_WIDTH,
    INTENSITY_NOISE_AMPLITUDE,
    MAX_PIXEL_INTENSITY,
    SECONDS_PER_MINUTE,
    TIMESTAMP_EPSILON,
)
from vigil.errors import DomainError, FormatError
from vigil.scenario import (
    ConditionProfile,
    DriverCondition,
    InvalidScenarioError,
    SampleRates,
    ScenarioScript,
    ScenarioSegment,
    validate_script,
)
from vigil.units import Degrees, Fraction, GForce, PixelBuffer, Seconds, TimestampArray

_logger = logging.getLogger(__name__)

# Shape of one synthetic pulse: a systolic Gaussian followed by a smaller dicrotic bump.
_SYSTOLIC_AMPLITUDE = 0.8
_SYSTOLIC_WIDTH: Seconds = 0.08
_DICROTIC_AMPLITUDE = 0.15
_DICROTIC_WIDTH: Seconds = 0.06
_DICROTIC_DELAY: Seconds = 0.3
_PPG_BASELINE = -0.1
_LATERAL_ACCELERATION_NOISE: GForce = 0.02

_BUNDLE_FORMAT_VERSION = 1


class BundleFormatError(FormatError):
    pass


@dataclass(frozen=True, eq=False)
class Frame:
    timestamp: Seconds
    # Row-major (height, width) uint8 intensities
    pixels: PixelBuffer
    width: int = FRAME_WIDTH
    height: int = FRAME_HEIGHT

    def __post_init__(self) -> None:
        if self.pixels.shape != (self.height, self.width) or self.pixels.dtype != np.uint8:
            raise DomainError(
                f"Frame pixels must be a {self.height}x{self.width} uint8 buffer, "
                f"got {self.pixels.shape} {self.pixels.dtype}"
            )


@dataclass(frozen=True)
class AccelSample:
    timestamp: Seconds
    ax: GForce
    ay: GForce
    az: GForce


@dataclass(frozen=True)
class PpgSample:
    timestamp: Seconds
    amplitude: float


@dataclass(frozen=True)
class PirEvent:
    timestamp: Seconds


def _slice_bounds(timestamps: TimestampArray, start_exclusive: Seconds, end_inclusive: Seconds) -> slice:
    lo = int(np.searchsorted(timestamps, start_exclusive, side="right"))
    hi = int(np.searchsorted(timestamps, end_inclusive, side="right"))
    return slice(lo, max(lo, hi))


@dataclass(frozen=True, eq=False)
class AccelTrace:
    """Columnar accelerometer stream."""

    timestamps: TimestampArray
    ax: np.ndarray
    ay: np.ndarray
    az: np.ndarray

    def __len__(self) -> int:
        return len(self.timestamps)

    def __getitem__(self, index: int) -> AccelSample:
        return AccelSample(
            timestamp=float(self.timestamps[index]),
            ax=float(self.ax[index]),
            ay=float(self.ay[index]),
            az=float(self.az[index]),
        )

    def __iter__(self) -> Iterator[AccelSample]:
        return (self[i] for i in range(len(self)))

    def between(self, start_exclusive: Seconds, end_inclusive: Seconds) -> "AccelTrace":
        s = _slice_bounds(self.timestamps, start_exclusive, end_inclusive)
        return AccelTrace(self.timestamps[s], self.ax[s], self.ay[s], self.az[s])

    @classmethod
    def empty(cls) -> "AccelTrace":
        return cls(np.zeros(0), np.zeros(0), np.zeros(0), np.zeros(0))

    @classmethod
    def from_samples(cls, samples: Sequence[AccelSample]) -> "AccelTrace":
        return cls(
            timestamps=np.array([s.timestamp for s in samples], dtype=float),
            ax=np.array([s.ax for s in samples], dtype=float),
            ay=np.array([s.ay for s in samples], dtype=float),
            az=np.array([s.az for s in samples], dtype=float),
        )


@dataclass(frozen=True, eq=False)
class PpgTrace:
    timestamps: TimestampArray
    amplitudes: np.ndarray

    def __len__(self) -> int:
        return len(self.timestamps)

    def __getitem__(self, index: int) -> PpgSample:
        return PpgSample(timestamp=float(self.timestamps[index]), amplitude=float(self.amplitudes[index]))

    def between(self, start_exclusive: Seconds, end_inclusive: Seconds) -> "PpgTrace":
        s = _slice_bounds(self.timestamps, start_exclusive, end_inclusive)
        return PpgTrace(self.timestamps[s], self.amplitudes[s])

    @classmethod
    def empty(cls) -> "PpgTrace":
        return cls(np.zeros(0), np.zeros(0))

    @classmethod
    def from_samples(cls, samples: Sequence[PpgSample]) -> "PpgTrace":
        return cls(
            timestamps=np.array([s.timestamp for s in samples], dtype=float),
            amplitudes=np.array([s.amplitude for s in samples], dtype=float),
        )


@dataclass(frozen=True, eq=False)
class PirTrace:
    timestamps: TimestampArray

    def __len__(self) -> int:
        return len(self.timestamps)

    def __getitem__(self, index: int) -> PirEvent:
        return PirEvent(timestamp=float(self.timestamps[index]))

    def between(self, start_exclusive: Seconds, end_inclusive: Seconds) -> "PirTrace":
        return PirTrace(self.timestamps[_slice_bounds(self.timestamps, start_exclusive, end_inclusive)])

    @classmethod
    def empty(cls) -> "PirTrace":
        return cls(np.zeros(0))


@dataclass(frozen=True, eq=False)
class SensorBundle:
    script: ScenarioScript
    seed: int
    frames: list[Frame]
    accel: AccelTrace
    ppg: PpgTrace
    pir: PirTrace

    @property
    def duration(self) -> Seconds:
        return self.script.duration


@dataclass
class _SegmentPlan:
    """Randomized choices made once per segment, shared by every stream the segment drives."""

    start: Seconds
    end: Seconds
    profile: ConditionProfile
    blink_times: np.ndarray
    nod_times: np.ndarray
    pir_times: np.ndarray
    sway_phase: float
    pulse_phase: Seconds
    frame_noise_seed: int


class _Stream:
    Plan = 0
    Accel = 1
    Ppg = 2


def _rng(seed: int, segment_index: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, segment_index, stream])


def _event_times(
    rng: np.random.Generator, start: Seconds, end: Seconds, first_gap: Seconds, min_gap: Seconds, max_gap: Seconds
) -> np.ndarray:
    times = []
    t = start + rng.uniform(0, first_gap)
    while t < end:
        times.append(t)
        t += rng.uniform(min_gap, max_gap)
    return np.array(times, dtype=float)


def _plan_segment(seed: int, segment_index: int, start: Seconds, segment: ScenarioSegment) -> _SegmentPlan:
    profile = segment.profile()
    end = start + segment.duration
    rng = _rng(seed, segment_index, _Stream.Plan)

    blink_times = np.zeros(0)
    if profile.blinks:
        period = SECONDS_PER_MINUTE / profile.blink_rate
        jitter = profile.blink_period_jitter
        blink_times = _event_times(rng, start, end, period, period * (1 - jitter), period * (1 + jitter))

    nod_times = np.zeros(0)
    if profile.nods:
        nod_times = _event_times(
            rng, start + profile.nod_min_gap / 2, end, profile.nod_max_gap, profile.nod_min_gap, profile.nod_max_gap
        )

    pir_times = np.zeros(0)
    if profile.has_pir:
        pir_times = _event_times(rng, start, end, profile.pir_max_gap, profile.pir_min_gap, profile.pir_max_gap)

    pulse_period = SECONDS_PER_MINUTE / profile.heart_rate if profile.has_pulse else 1.0
    return _SegmentPlan(
        start=start,
        end=end,
        profile=profile,
        blink_times=blink_times,
        nod_times=nod_times,
        pir_times=pir_times,
        sway_phase=float(rng.uniform(0, 2 * math.pi)),
        pulse_phase=float(rng.uniform(0, pulse_period)),
        frame_noise_seed=int(rng.integers(0, 2**31 - 1)),
    )


def _sample_times(duration: Seconds, rate: float) -> TimestampArray:
    # Sample k sits at k / rate; the last sample lands within one period of the end of the scenario
    sample_count = math.ceil(duration * rate - TIMESTAMP_EPSILON)
    return np.arange(sample_count) / rate


def _segment_slices(times: TimestampArray, plans: list[_SegmentPlan]) -> list[slice]:
    boundaries = np.searchsorted(times, [plan.start for plan in plans[1:]], side="left")
    edges = [0, *[int(b) for b in boundaries], len(times)]
    return [slice(lo, hi) for lo, hi in zip(edges[:-1], edges[1:])]


def _aperture_at(plan: _SegmentPlan, t: np.ndarray) -> np.ndarray:
    profile = plan.profile
    open_aperture = profile.open_aperture
    aperture = np.full(t.shape, open_aperture)
    ramp = profile.closure_ramp
    hold = profile.closure_hold
    for blink in plan.blink_times:
        if hold > 0:
            knots = [blink, blink + ramp, blink + ramp + hold, blink + 2 * ramp + hold]
            values = [open_aperture, 0.0, 0.0, open_aperture]
        else:
            knots = [blink, blink + ramp, blink + 2 * ramp]
            values = [open_aperture, 0.0, open_aperture]
        lo, hi = np.searchsorted(t, [knots[0], knots[-1]])
        aperture[lo:hi] = np.minimum(aperture[lo:hi], np.interp(t[lo:hi], knots, values))
    return aperture


def _head_pitch_at(plan: _SegmentPlan, t: np.ndarray) -> np.ndarray:
    profile = plan.profile
    sway = np.sin(2 * np.pi * (t - plan.start) / profile.head_sway_period + plan.sway_phase)
    pitch = profile.head_baseline + profile.head_sway_amplitude * sway
    half_width = profile.nod_half_width
    for nod in plan.nod_times:
        lo, hi = np.searchsorted(t, [nod - half_width, nod + half_width])
        pitch[lo:hi] += profile.nod_amplitude * np.maximum(0.0, 1 - np.abs(t[lo:hi] - nod) / half_width)
    return pitch


def _ppg_at(plan: _SegmentPlan, t: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    profile = plan.profile
    noise = rng.uniform(-profile.ppg_noise, profile.ppg_noise, size=t.shape)
    if not profile.has_pulse:
        return np.clip(noise, -1.0, 1.0)

    period = SECONDS_PER_MINUTE / profile.heart_rate
    first_beat = plan.start + plan.pulse_phase
    # Offset of each sample from its nearest beat
    systolic_offset = np.mod(t - first_beat + period / 2, period) - period / 2
    dicrotic_delay = _DICROTIC_DELAY * min(1.0, period)
    dicrotic_offset = np.mod(t - first_beat - dicrotic_delay + period / 2, period) - period / 2
    pulse = _SYSTOLIC_AMPLITUDE * np.exp(-(systolic_offset**2) / (2 * _SYSTOLIC_WIDTH**2))
    pulse += _DICROTIC_AMPLITUDE * np.exp(-(dicrotic_offset**2) / (2 * _DICROTIC_WIDTH**2))
    return np.clip(pulse + _PPG_BASELINE + noise, -1.0, 1.0)


@functools.lru_cache(maxsize=64)
def _fixed_pattern_noise(noise_seed: int) -> np.ndarray:
    """Sensor noise that is fixed for a given seed, like a camera's fixed-pattern noise.
    Each segment draws one seed, so frames within a segment differ only where the scene itself changes.
    A motionless driver therefore scores exactly zero between consecutive frames.
    """
    noise = np.random.default_rng(noise_seed).integers(
        -INTENSITY_NOISE_AMPLITUDE,
        INTENSITY_NOISE_AMPLITUDE,
        size=(FRAME_HEIGHT, FRAME_WIDTH),
        endpoint=True,
        dtype=np.int16,
    )
    noise.setflags(write=False)
    return noise


def render_frame(aperture: Fraction, head_pitch: Degrees, noise_seed: int, timestamp: Seconds = 0.0) -> Frame:
    """Draws the eye box with the top `round(aperture * 16)` rows bright and everything else dark.
    The eye box moves down by one row for every 2 degrees of head pitch, and is clipped to the frame.
    """
    if not 0.0 <= aperture <= 1.0:
        raise DomainError(f"Aperture must lie in [0, 1], got {aperture}")

    bright_row_count = int(round(float(aperture) * EYE_BOX_ROW_COUNT))
    row_shift = int(round(float(head_pitch) / DEGREES_PER_EYE_BOX_ROW_SHIFT))
    first_bright_row = max(0, EYE_BOX_FIRST_ROW + row_shift)
    last_bright_row = min(FRAME_HEIGHT, EYE_BOX_FIRST_ROW + row_shift + bright_row_count)

    intensities = np.full((FRAME_HEIGHT, FRAME_WIDTH), DARK_INTENSITY, dtype=np.int16)
    if last_bright_row > first_bright_row:
        columns = slice(EYE_BOX_FIRST_COLUMN, EYE_BOX_FIRST_COLUMN + EYE_BOX_COLUMN_COUNT)
        intensities[first_bright_row:last_bright_row, columns] = BRIGHT_INTENSITY
    intensities += _fixed_pattern_noise(noise_seed)
    pixels = np.clip(intensities, 0, MAX_PIXEL_INTENSITY).astype(np.uint8)
    return Frame(timestamp=timestamp, pixels=pixels)


def synthesize(script: ScenarioScript, seed: int) -> SensorBundle:
    validate_script(script)
    if seed < 0:
        raise InvalidScenarioError(f"Seeds must be non-negative, got {seed}")

    plans = [
        _plan_segment(seed, index, start, segment)
        for index, (start, segment) in enumerate(zip(script.segment_starts(), script.segments))
    ]
    rates = script.sample_rates
    duration = script.duration

    frame_times = _sample_times(duration, rates.frame)
    frames: list[Frame] = []
    for plan, s in zip(plans, _segment_slices(frame_times, plans)):
        t = frame_times[s]
        apertures = _aperture_at(plan, t)
        # Frames see the head pose without accelerometer noise
        pitches = _head_pitch_at(plan, t)
        for timestamp, aperture, pitch in zip(t, apertures, pitches):
            frames.append(render_frame(float(aperture), float(pitch), plan.frame_noise_seed, float(timestamp)))

    accel_times = _sample_times(duration, rates.accel)
    pitch_radians = np.zeros(len(accel_times))
    lateral = np.zeros(len(accel_times))
    for index, (plan, s) in enumerate(zip(plans, _segment_slices(accel_times, plans))):
        rng = _rng(seed, index, _Stream.Accel)
        t = accel_times[s]
        noise = rng.uniform(-plan.profile.pitch_noise, plan.profile.pitch_noise, size=t.shape)
        pitch_radians[s] = np.radians(_head_pitch_at(plan, t) + noise)
        lateral[s] = rng.uniform(-_LATERAL_ACCELERATION_NOISE, _LATERAL_ACCELERATION_NOISE, size=t.shape)
    accel = AccelTrace(accel_times, np.sin(pitch_radians), lateral, np.cos(pitch_radians))

    ppg_times = _sample_times(duration, rates.ppg)
    amplitudes = np.zeros(len(ppg_times))
    for index, (plan, s) in enumerate(zip(plans, _segment_slices(ppg_times, plans))):
        amplitudes[s] = _ppg_at(plan, ppg_times[s], _rng(seed, index, _Stream.Ppg))
    ppg = PpgTrace(ppg_times, amplitudes)

    pir_times = [plan.pir_times for plan in plans]
    pir = PirTrace(np.concatenate(pir_times) if pir_times else np.zeros(0))

    _logger.info(
        f"Synthesized {duration:.1f}s scenario with seed {seed}: {len(frames)} frames, {len(accel)} accelerometer "
        f"samples, {len(ppg)} PPG samples, {len(pir)} PIR events"
    )
    return SensorBundle(script=script, seed=seed, frames=frames, accel=accel, ppg=ppg, pir=pir)


class _SegmentManifest(BaseModel):
    duration: float
    condition: str
    overrides: dict[str, float] = {}


class _SampleRatesManifest(BaseModel):
    frame: float
    accel: float
    ppg: float


class BundleManifest(BaseModel):
    format_version: int
    seed: int
    duration: float
    sample_rates: _SampleRatesManifest
    segments: list[_SegmentManifest]
    responses: list[float]
    resets: list[float]


MANIFEST_FILE_NAME = "bundle.json"
_FRAMES_COLUMNS = ("timestamp", "width", "height", "pixels")
_ACCEL_COLUMNS = ("timestamp", "ax", "ay", "az")
_PPG_COLUMNS = ("timestamp", "amplitude")
_PIR_COLUMNS = ("timestamp",)


def _format_float(value: float) -> str:
    # repr() round-trips exactly through float()
    return repr(float(value))


def _write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)


def _float_rows(columns: Sequence[np.ndarray]) -> Iterator[list[str]]:
    return ([_format_float(v) for v in row] for row in zip(*columns))


def write_bundle(bundle: SensorBundle, directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    script = bundle.script
    manifest = BundleManifest(
        format_version=_BUNDLE_FORMAT_VERSION,
        seed=bundle.seed,
        duration=script.duration,
        sample_rates=_SampleRatesManifest(
            frame=script.sample_rates.frame, accel=script.sample_rates.accel, ppg=script.sample_rates.ppg
        ),
        segments=[
            _SegmentManifest(duration=s.duration, condition=s.condition.name, overrides=dict(s.overrides))
            for s in script.segments
        ],
        responses=list(script.responses),
        resets=list(script.resets),
    )
    (directory / MANIFEST_FILE_NAME).write_text(manifest.model_dump_json(indent=2) + "\n")

    _write_csv(
        directory / "frames.csv",
        _FRAMES_COLUMNS,
        (
            [_format_float(frame.timestamp), frame.width, frame.height, frame.pixels.tobytes().hex()]
            for frame in bundle.frames
        ),
    )
    accel = bundle.accel
    _write_csv(directory / "accel.csv", _ACCEL_COLUMNS, _float_rows([accel.timestamps, accel.ax, accel.ay, accel.az]))
    _write_csv(directory / "ppg.csv", _PPG_COLUMNS, _float_rows([bundle.ppg.timestamps, bundle.ppg.amplitudes]))
    _write_csv(directory / "pir.csv", _PIR_COLUMNS, _float_rows([bundle.pir.timestamps]))
    _logger.info(f"Recorded sensor bundle to {directory.as_posix()}")


def _read_rows(path: Path, columns: Sequence[str]) -> list[list[str]]:
    try:
        text = path.read_text()
    except OSError as e:
        raise BundleFormatError(f"Cannot read {path.as_posix()}: {e}")
    if not text.endswith("\n"):
        raise BundleFormatError(f"{path.name} is truncated (no trailing newline)")
    try:
        rows = list(csv.reader(text.splitlines()))
    except csv.Error as e:
        raise BundleFormatError(f"{path.name}: {e}")
    if not rows or tuple(rows[0]) != tuple(columns):
        raise BundleFormatError(f"{path.name} has an unexpected header")
    for line_number, row in enumerate(rows[1:], start=2):
        if len(row) != len(columns):
            raise BundleFormatError(f"{path.name}:{line_number}: expected {len(columns)} fields, got {len(row)}")
    return rows[1:]


def _parse_float_columns(path: Path, columns: Sequence[str]) -> list[np.ndarray]:
    rows = _read_rows(path, columns)
    try:
        values = np.array(rows, dtype=float).reshape(len(rows), len(columns))
    except ValueError as e:
        raise BundleFormatError(f"{path.name}: malformed number: {e}")
    if not np.all(np.isfinite(values)):
        raise BundleFormatError(f"{path.name}: non-finite value")
    return [values[:, i].copy() for i in range(len(columns))]


def _check_timestamps(name: str, timestamps: np.ndarray) -> None:
    if len(timestamps) > 1 and not np.all(np.diff(timestamps) > 0):
        raise BundleFormatError(f"{name}: timestamps are not strictly increasing")


def _check_span(name: str, timestamps: np.ndarray, rate: float, duration: Seconds) -> None:
    if len(timestamps) == 0:
        raise BundleFormatError(f"{name}: stream is empty")
    last = float(timestamps[-1])
    period = 1 / rate
    if last > duration + TIMESTAMP_EPSILON or duration - last > period + TIMESTAMP_EPSILON:
        raise BundleFormatError(
            f"{name}: stream ends at {last:.6f}s but the bundle spans {duration:.6f}s (sample period {period:.6f}s)"
        )


def _read_frames(path: Path) -> list[Frame]:
    frames = []
    for line_number, (timestamp, width, height, payload) in enumerate(_read_rows(path, _FRAMES_COLUMNS), start=2):
        try:
            w, h = int(width), int(height)
            pixels = np.frombuffer(bytes.fromhex(payload), dtype=np.uint8)
            frame_time = float(timestamp)
        except ValueError as e:
            raise BundleFormatError(f"{path.name}:{line_number}: malformed frame: {e}")
        if w <= 0 or h <= 0 or pixels.size != w * h:
            raise BundleFormatError(f"{path.name}:{line_number}: pixel payload does not match {w}x{h}")
        frames.append(Frame(timestamp=frame_time, pixels=pixels.reshape(h, w).copy(), width=w, height=h))
    return frames


def read_bundle(directory: Path) -> SensorBundle:
    try:
        manifest = BundleManifest.model_validate_json((directory / MANIFEST_FILE_NAME).read_text())
    except OSError as e:
        raise BundleFormatError(f"Cannot read bundle manifest in {directory.as_posix()}: {e}")
    except ValidationError as e:
        raise BundleFormatError(f"Malformed bundle manifest: {e}")
    if manifest.format_version != _BUNDLE_FORMAT_VERSION:
        raise BundleFormatError(f"Unsupported bundle format version {manifest.format_version}")

    try:
        script = ScenarioScript(
            segments=tuple(
                ScenarioSegment(s.duration, DriverCondition.from_name(s.condition), s.overrides)
                for s in manifest.segments
            ),
            sample_rates=SampleRates(
                frame=manifest.sample_rates.frame, accel=manifest.sample_rates.accel, ppg=manifest.sample_rates.ppg
            ),
            responses=tuple(manifest.responses),
            resets=tuple(manifest.resets),
        )
        validate_script(script)
    except InvalidScenarioError as e:
        raise BundleFormatError(f"Bundle manifest describes an invalid scenario: {e}")
    if abs(script.duration - manifest.duration) > TIMESTAMP_EPSILON:
        raise BundleFormatError(f"Manifest duration {manifest.duration} disagrees with its segments")

    frames = _read_frames(directory / "frames.csv")
    frame_times = np.array([f.timestamp for f in frames], dtype=float)
    accel_timestamps, ax, ay, az = _parse_float_columns(directory / "accel.csv", _ACCEL_COLUMNS)
    ppg_timestamps, amplitudes = _parse_float_columns(directory / "ppg.csv", _PPG_COLUMNS)
    (pir_timestamps,) = _parse_float_columns(directory / "pir.csv", _PIR_COLUMNS)

    rates = script.sample_rates
    duration = script.duration
    for name, timestamps, rate in (
        ("frames", frame_times, rates.frame),
        ("accel", accel_timestamps, rates.accel),
        ("ppg", ppg_timestamps, rates.ppg),
    ):
        _check_timestamps(name, timestamps)
        _check_span(name, timestamps, rate, duration)
    _check_timestamps("pir", pir_timestamps)
    if len(pir_timestamps) and (pir_timestamps[0] < 0 or pir_timestamps[-1] > duration):
        raise BundleFormatError("pir: events fall outside the bundle's span")
    if np.any(np.abs(amplitudes) > 1.0):
        raise BundleFormatError("ppg: amplitude outside [-1, 1]")

    return SensorBundle(
        script=script,
        seed=manifest.seed,
        frames=frames,
        accel=AccelTrace(accel_timestamps, ax, ay, az),
        ppg=PpgTrace(ppg_timestamps, amplitudes),
        pir=PirTrace(pir_timestamps),
    )
