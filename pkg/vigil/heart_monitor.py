import logging
import math
from dataclasses import dataclass
from enum import Enum, auto
from typing import Optional

import numpy as np
from scipy.signal import find_peaks

from vigil.config import (
    BPM_WINDOW,
    BRADYCARDIA_BELOW,
    FLATLINE_VARIANCE_FLOOR,
    HR_CHECK_DURATION,
    MINIMUM_PPG_DURATION,
    PPG_PEAK_REFRACTORY_PERIOD,
    PPG_PEAK_THRESHOLD,
    TACHYCARDIA_ABOVE,
)
from vigil.constants import SECONDS_PER_MINUTE, TIMESTAMP_EPSILON
from vigil.errors import DomainError, InsufficientDataError
from vigil.signal_synth import PpgTrace
from vigil.units import BeatsPerMinute, Seconds, TimestampArray

_logger = logging.getLogger(__name__)


class Vitality(Enum):
    Normal = auto()
    Bradycardia = auto()
    Tachycardia = auto()
    NoPulse = auto()
    Unknown = auto()


@dataclass(frozen=True)
class HeartAssessment:
    # None when too few beats were seen to estimate a rate
    bpm: Optional[BeatsPerMinute]
    vitality: Vitality
    peak_count: int
    variance: float


def detect_peaks(
    ppg: PpgTrace,
    threshold: float = PPG_PEAK_THRESHOLD,
    refractory: Seconds = PPG_PEAK_REFRACTORY_PERIOD,
) -> TimestampArray:
    if len(ppg) < 2 or ppg.timestamps[-1] - ppg.timestamps[0] < MINIMUM_PPG_DURATION - TIMESTAMP_EPSILON:
        raise InsufficientDataError(f"Peak detection needs at least {MINIMUM_PPG_DURATION}s of PPG")
    sample_period = float(np.median(np.diff(ppg.timestamps)))
    # find_peaks keeps the tallest peak among neighbours closer than `distance` samples
    distance = max(1, math.ceil(refractory / sample_period - TIMESTAMP_EPSILON))
    peak_indexes, _ = find_peaks(ppg.amplitudes, height=threshold, distance=distance)
    return ppg.timestamps[peak_indexes]


def bpm(
    peaks: TimestampArray, window: Seconds = BPM_WINDOW, window_end: Optional[Seconds] = None
) -> Optional[BeatsPerMinute]:
    """60 / mean inter-peak interval over the trailing window, or None (Unknown) with fewer than two peaks."""
    peaks = np.asarray(peaks, dtype=float)
    if len(peaks) == 0:
        return None
    end = float(peaks[-1]) if window_end is None else window_end
    in_window = peaks[(peaks > end - window) & (peaks <= end)]
    if len(in_window) < 2:
        return None
    return SECONDS_PER_MINUTE / float(np.mean(np.diff(in_window)))


def vitality(bpm_value: Optional[BeatsPerMinute], ppg_window_variance: float, peak_count: int) -> Vitality:
    if ppg_window_variance < 0:
        raise DomainError(f"Variance cannot be negative, got {ppg_window_variance}")
    if peak_count == 0 and ppg_window_variance < FLATLINE_VARIANCE_FLOOR:
        return Vitality.NoPulse
    if bpm_value is None:
        return Vitality.Unknown
    if bpm_value < BRADYCARDIA_BELOW:
        return Vitality.Bradycardia
    if bpm_value > TACHYCARDIA_ABOVE:
        return Vitality.Tachycardia
    return Vitality.Normal


def assess(
    ppg: PpgTrace,
    window_end: Seconds,
    window: Seconds = HR_CHECK_DURATION,
    bpm_window: Seconds = BPM_WINDOW,
) -> HeartAssessment:
    """Classifies the heart channel over (window_end - window, window_end].
    The rate is estimated from the longer trailing `bpm_window` so that slow hearts still yield two intervals.
    """
    history = ppg.between(window_end - max(window, bpm_window), window_end)
    assessed = ppg.between(window_end - window, window_end)
    if len(assessed) == 0:
        raise InsufficientDataError(f"No PPG samples in the {window}s before t={window_end}")

    peaks = detect_peaks(history)
    peak_count = int(np.count_nonzero(peaks > window_end - window))
    variance = float(np.var(assessed.amplitudes))
    rate = bpm(peaks, bpm_window, window_end)
    result = HeartAssessment(
        bpm=rate, vitality=vitality(rate, variance, peak_count), peak_count=peak_count, variance=variance
    )
    _logger.debug(f"Heart assessment at t={window_end:.1f}s: {result}")
    return result
