import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.ndimage import median_filter

from vigil.config import (
    MINIMUM_NOD_SERIES_DURATION,
    NOD_BASELINE_WINDOW,
    NOD_MINIMUM_AMPLITUDE,
    NOD_REFRACTORY_PERIOD,
    PIR_ACTIVITY_WINDOW,
)
from vigil.constants import TIMESTAMP_EPSILON
from vigil.errors import DomainError, InsufficientDataError
from vigil.signal_synth import AccelTrace, PirTrace
from vigil.units import Degrees, Seconds, TimestampArray

_logger = logging.getLogger(__name__)


class DegenerateSampleError(DomainError):
    pass


@dataclass(frozen=True)
class NodEvent:
    timestamp: Seconds
    amplitude: Degrees


@dataclass(frozen=True, eq=False)
class PitchSeries:
    timestamps: TimestampArray
    pitches: np.ndarray

    def __len__(self) -> int:
        return len(self.timestamps)

    @property
    def duration(self) -> Seconds:
        if len(self) == 0:
            return 0.0
        return float(self.timestamps[-1] - self.timestamps[0])

    def window(self, window: Seconds, window_end: Optional[Seconds] = None) -> "PitchSeries":
        if len(self) == 0:
            return self
        end = float(self.timestamps[-1]) if window_end is None else window_end
        mask = (self.timestamps > end - window) & (self.timestamps <= end)
        return PitchSeries(self.timestamps[mask], self.pitches[mask])


def pitch_series(trace: AccelTrace) -> PitchSeries:
    """Gravity-referenced head tilt, atan2(ax, az), in degrees."""
    if len(trace) == 0:
        raise InsufficientDataError("Cannot derive pitch from an empty accelerometer trace")
    magnitudes = np.sqrt(trace.ax**2 + trace.ay**2 + trace.az**2)
    if np.any(magnitudes == 0):
        first_bad = int(np.argmax(magnitudes == 0))
        raise DegenerateSampleError(f"Zero-magnitude accelerometer sample at t={trace.timestamps[first_bad]}")
    return PitchSeries(trace.timestamps, np.degrees(np.arctan2(trace.ax, trace.az)))


def causal_median_baseline(pitch: PitchSeries, baseline_window: Seconds = NOD_BASELINE_WINDOW) -> np.ndarray:
    """Median of the trailing `baseline_window` seconds at every sample, padding the start with the first value."""
    spacing = float(np.median(np.diff(pitch.timestamps)))
    # Odd so the median is a sample value
    size = 2 * int(round(baseline_window / spacing / 2)) + 1
    # Shifting the origin by half the filter size makes the window end at the current sample
    return median_filter(pitch.pitches, size=size, mode="nearest", origin=(size - 1) // 2)


def detect_nods(
    pitch: PitchSeries,
    min_amplitude: Degrees = NOD_MINIMUM_AMPLITUDE,
    refractory: Seconds = NOD_REFRACTORY_PERIOD,
    baseline_window: Seconds = NOD_BASELINE_WINDOW,
) -> list[NodEvent]:
    if len(pitch) < 2 or pitch.duration < MINIMUM_NOD_SERIES_DURATION - TIMESTAMP_EPSILON:
        raise InsufficientDataError(f"Nod detection needs at least {MINIMUM_NOD_SERIES_DURATION}s of pitch")

    deviation = np.abs(pitch.pitches - causal_median_baseline(pitch, baseline_window))
    is_excursion = deviation >= min_amplitude
    # Boundaries of each contiguous run of excursion samples
    edges = np.diff(is_excursion.astype(np.int8), prepend=0, append=0)
    run_starts = np.flatnonzero(edges == 1)
    run_ends = np.flatnonzero(edges == -1)

    nods: list[NodEvent] = []
    for start, end in zip(run_starts, run_ends):
        peak = int(start + np.argmax(deviation[start:end]))
        timestamp = float(pitch.timestamps[peak])
        if nods and timestamp - nods[-1].timestamp < refractory:
            continue
        nods.append(NodEvent(timestamp=timestamp, amplitude=float(deviation[peak])))
    return nods


def pir_active(events: PirTrace, window_end: Seconds, window: Seconds = PIR_ACTIVITY_WINDOW) -> bool:
    if window <= 0:
        raise DomainError(f"PIR activity window must be positive, got {window}")
    timestamps = events.timestamps
    return bool(np.any((timestamps > window_end - window) & (timestamps <= window_end)))


def movement_range(pitch: PitchSeries, window: Seconds, window_end: Optional[Seconds] = None) -> Degrees:
    windowed = pitch.window(window, window_end)
    if len(windowed) == 0:
        raise InsufficientDataError("No pitch samples in the window")
    return float(np.max(windowed.pitches) - np.min(windowed.pitches))
