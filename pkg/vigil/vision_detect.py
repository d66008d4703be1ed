"""Visual fatigue evidence: frame differencing and eyelid aperture.

A blink is counted on each falling crossing of the 0.5 aperture threshold (open to closed). The eye has to reopen
above the threshold before another blink can be counted.
"""
import logging
from dataclasses import dataclass
from enum import Enum, auto
from typing import Optional

import numpy as np

from vigil.config import (
    BLINK_APERTURE_THRESHOLD,
    CLOSED_APERTURE_THRESHOLD,
    ERRATIC_MOTION_SCORE_THRESHOLD,
    MINIMUM_BLINK_ANALYSIS_WINDOW,
    MINIMUM_DIFF_SCORES_FOR_MOTION,
    STILL_MOTION_SCORE_THRESHOLD,
)
from vigil.constants import (
    EYE_BOX_COLUMN_COUNT,
    EYE_BOX_FIRST_COLUMN,
    EYE_BOX_ROW_COUNT,
    MAX_PIXEL_INTENSITY,
    OPEN_ROW_INTENSITY_THRESHOLD,
    SECONDS_PER_MINUTE,
)
from vigil.errors import DomainError, InsufficientDataError
from vigil.signal_synth import Frame
from vigil.units import BlinksPerMinute, Fraction, Seconds, TimestampArray

_logger = logging.getLogger(__name__)


class MotionLevel(Enum):
    Still = auto()
    Normal = auto()
    Erratic = auto()


def _window_mask(timestamps: TimestampArray, window: Seconds, window_end: Seconds) -> np.ndarray:
    return (timestamps > window_end - window) & (timestamps <= window_end)


@dataclass(frozen=True, eq=False)
class ApertureSeries:
    timestamps: TimestampArray
    apertures: np.ndarray

    def __post_init__(self) -> None:
        if self.timestamps.shape != self.apertures.shape:
            raise DomainError("Aperture series needs one aperture per timestamp")
        if len(self.timestamps) > 1 and not np.all(np.diff(self.timestamps) > 0):
            raise DomainError("Aperture series timestamps must be strictly increasing")
        if np.any((self.apertures < 0) | (self.apertures > 1)):
            raise DomainError("Apertures must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.timestamps)

    def window(self, window: Seconds, window_end: Optional[Seconds] = None) -> "ApertureSeries":
        """Samples in (window_end - window, window_end]. The window ends at the last sample by default."""
        if len(self) == 0:
            return self
        end = float(self.timestamps[-1]) if window_end is None else window_end
        mask = _window_mask(self.timestamps, window, end)
        return ApertureSeries(self.timestamps[mask], self.apertures[mask])


@dataclass(frozen=True, eq=False)
class DiffScoreSeries:
    # Each score is stamped with the timestamp of the newer frame of its pair
    timestamps: TimestampArray
    scores: np.ndarray

    def window(self, window: Seconds, window_end: Optional[Seconds] = None) -> "DiffScoreSeries":
        if len(self.timestamps) == 0:
            return self
        end = float(self.timestamps[-1]) if window_end is None else window_end
        mask = _window_mask(self.timestamps, window, end)
        return DiffScoreSeries(self.timestamps[mask], self.scores[mask])


def frame_diff_score(prev: Frame, next: Frame) -> Fraction:
    if prev.pixels.shape != next.pixels.shape:
        raise DomainError(f"Cannot compare a {prev.pixels.shape} frame with a {next.pixels.shape} frame")
    difference = np.abs(prev.pixels.astype(np.int32) - next.pixels.astype(np.int32))
    return float(difference.sum()) / (prev.pixels.size * MAX_PIXEL_INTENSITY)


def estimate_aperture(frame: Frame) -> Fraction:
    # Only the eye can be bright, so rows are counted anywhere in the eye's column band.
    # This keeps the estimate independent of how far head pitch has shifted the eye box.
    eye_band = frame.pixels[:, EYE_BOX_FIRST_COLUMN : EYE_BOX_FIRST_COLUMN + EYE_BOX_COLUMN_COUNT]
    open_rows = int(np.count_nonzero(eye_band.mean(axis=1) > OPEN_ROW_INTENSITY_THRESHOLD))
    return min(open_rows, EYE_BOX_ROW_COUNT) / EYE_BOX_ROW_COUNT


def blink_rate(
    series: ApertureSeries, window: Seconds, window_end: Optional[Seconds] = None
) -> BlinksPerMinute:
    if window < MINIMUM_BLINK_ANALYSIS_WINDOW:
        raise InsufficientDataError(f"Blink rate needs a window of at least {MINIMUM_BLINK_ANALYSIS_WINDOW}s")
    windowed = series.window(window, window_end)
    if len(windowed) < 2:
        raise InsufficientDataError("Blink rate needs at least two samples in the window")
    is_open = windowed.apertures >= BLINK_APERTURE_THRESHOLD
    blinks = int(np.count_nonzero(is_open[:-1] & ~is_open[1:]))
    return blinks * SECONDS_PER_MINUTE / window


def closed_fraction(
    series: ApertureSeries,
    window: Seconds,
    window_end: Optional[Seconds] = None,
    threshold: Fraction = CLOSED_APERTURE_THRESHOLD,
) -> Fraction:
    """Share of the window's samples whose aperture lies strictly below `threshold`."""
    if not 0 <= threshold <= 1:
        raise DomainError(f"Closed-aperture threshold must lie in [0, 1], got {threshold}")
    windowed = series.window(window, window_end)
    if len(windowed) == 0:
        raise InsufficientDataError("No aperture samples in the window")
    return float(np.count_nonzero(windowed.apertures < threshold)) / len(windowed)


def classify_motion(diff_scores: DiffScoreSeries, window: Seconds, window_end: Optional[Seconds] = None) -> MotionLevel:
    scores = diff_scores.window(window, window_end).scores
    if len(scores) < MINIMUM_DIFF_SCORES_FOR_MOTION:
        raise InsufficientDataError(
            f"Motion classification needs {MINIMUM_DIFF_SCORES_FOR_MOTION} scores, got {len(scores)}"
        )
    mean_score = float(np.mean(scores))
    if mean_score < STILL_MOTION_SCORE_THRESHOLD:
        return MotionLevel.Still
    if mean_score > ERRATIC_MOTION_SCORE_THRESHOLD:
        return MotionLevel.Erratic
    return MotionLevel.Normal
