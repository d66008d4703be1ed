"""Three-process model of alertness.

Predicted alertness is the sum of three processes. The homeostatic process S decays toward a low asymptote while
awake and recovers toward a high asymptote during sleep. The circadian process C is a 24-hour cosine. Sleep inertia W
is a non-positive penalty that fades exponentially after waking.
All times are clock hours.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum, auto
from typing import Optional

from vigil.config import (
    CIRCADIAN_ACROPHASE,
    CIRCADIAN_AMPLITUDE,
    CIRCADIAN_MESOR,
    HOMEOSTATIC_HIGH_ASYMPTOTE,
    HOMEOSTATIC_LOW_ASYMPTOTE,
    HOMEOSTATIC_SLEEP_RECOVERY_RATE,
    HOMEOSTATIC_WAKE_DECAY_RATE,
    SLEEP_INERTIA_MAGNITUDE,
    SLEEP_INERTIA_TIME_CONSTANT,
)
from vigil.constants import HOURS_PER_DAY
from vigil.errors import ConfigError, DomainError
from vigil.units import AlertnessUnits, ClockHours, Hours, PerHour

_logger = logging.getLogger(__name__)

# Boundaries are compared with this tolerance since they are usually produced by float arithmetic
_BOUNDARY_TOLERANCE: Hours = 1e-9


class SleepWakeKind(Enum):
    Sleep = auto()
    Wake = auto()


@dataclass(frozen=True)
class SleepWakeInterval:
    start: ClockHours
    end: ClockHours
    kind: SleepWakeKind


@dataclass(frozen=True)
class SleepWakeSchedule:
    intervals: tuple[SleepWakeInterval, ...]

    def __post_init__(self) -> None:
        if not self.intervals:
            raise ConfigError("A sleep/wake schedule needs at least one interval")
        for interval in self.intervals:
            if not interval.end > interval.start:
                raise ConfigError(f"Interval ends before it starts: {interval}")
        for previous, following in zip(self.intervals, self.intervals[1:]):
            if abs(following.start - previous.end) > _BOUNDARY_TOLERANCE:
                raise ConfigError(f"Intervals must be contiguous: {previous} then {following}")
            if following.kind == previous.kind:
                raise ConfigError(f"Interval kinds must alternate: {previous} then {following}")

    @property
    def horizon_start(self) -> ClockHours:
        return self.intervals[0].start

    @property
    def horizon_end(self) -> ClockHours:
        return self.intervals[-1].end

    def shifted(self, hours: Hours) -> "SleepWakeSchedule":
        return SleepWakeSchedule(
            tuple(SleepWakeInterval(i.start + hours, i.end + hours, i.kind) for i in self.intervals)
        )


@dataclass(frozen=True)
class AlertnessParams:
    mesor: AlertnessUnits = CIRCADIAN_MESOR
    amplitude: AlertnessUnits = CIRCADIAN_AMPLITUDE
    acrophase: ClockHours = CIRCADIAN_ACROPHASE
    wake_decay_rate: PerHour = HOMEOSTATIC_WAKE_DECAY_RATE
    low_asymptote: AlertnessUnits = HOMEOSTATIC_LOW_ASYMPTOTE
    sleep_recovery_rate: PerHour = HOMEOSTATIC_SLEEP_RECOVERY_RATE
    high_asymptote: AlertnessUnits = HOMEOSTATIC_HIGH_ASYMPTOTE
    inertia_magnitude: AlertnessUnits = SLEEP_INERTIA_MAGNITUDE
    inertia_time_constant: Hours = SLEEP_INERTIA_TIME_CONSTANT

    def __post_init__(self) -> None:
        if self.amplitude < 0:
            raise ConfigError(f"Circadian amplitude must be non-negative, got {self.amplitude}")
        if not self.low_asymptote < self.high_asymptote:
            raise ConfigError("The low homeostatic asymptote must lie below the high one")
        if self.wake_decay_rate <= 0 or self.sleep_recovery_rate <= 0 or self.inertia_time_constant <= 0:
            raise ConfigError("Rates and time constants must be positive")
        if self.inertia_magnitude > 0:
            raise ConfigError(f"Sleep inertia depresses alertness, so its magnitude must be <= 0")

    @property
    def homeostatic_midpoint(self) -> AlertnessUnits:
        return (self.low_asymptote + self.high_asymptote) / 2


@dataclass(frozen=True)
class AlertnessScore:
    time: ClockHours
    homeostatic: AlertnessUnits
    circadian: AlertnessUnits
    inertia: AlertnessUnits
    value: AlertnessUnits


def circadian(t: ClockHours, params: AlertnessParams) -> AlertnessUnits:
    return params.mesor + params.amplitude * math.cos(2 * math.pi * (t - params.acrophase) / HOURS_PER_DAY)


def _evolve_homeostatic(
    s_entry: AlertnessUnits, elapsed: Hours, kind: SleepWakeKind, params: AlertnessParams
) -> AlertnessUnits:
    if kind == SleepWakeKind.Wake:
        return params.low_asymptote + (s_entry - params.low_asymptote) * math.exp(-params.wake_decay_rate * elapsed)
    return params.high_asymptote - (params.high_asymptote - s_entry) * math.exp(-params.sleep_recovery_rate * elapsed)


def _check_within_horizon(schedule: SleepWakeSchedule, t: ClockHours) -> None:
    if not schedule.horizon_start - _BOUNDARY_TOLERANCE <= t <= schedule.horizon_end + _BOUNDARY_TOLERANCE:
        raise DomainError(
            f"t={t}h lies outside the schedule horizon [{schedule.horizon_start}, {schedule.horizon_end}]"
        )


def homeostatic(
    schedule: SleepWakeSchedule,
    t: ClockHours,
    params: AlertnessParams,
    s_initial: Optional[AlertnessUnits] = None,
) -> AlertnessUnits:
    _check_within_horizon(schedule, t)
    s = params.homeostatic_midpoint if s_initial is None else s_initial
    if not params.low_asymptote <= s <= params.high_asymptote:
        raise DomainError(
            f"Initial homeostatic level {s} lies outside [{params.low_asymptote}, {params.high_asymptote}]"
        )

    for interval in schedule.intervals:
        if t <= interval.start:
            break
        s = _evolve_homeostatic(s, min(t, interval.end) - interval.start, interval.kind, params)
        if t <= interval.end:
            break
    return s


def sleep_inertia(time_since_waking: Hours, params: AlertnessParams) -> AlertnessUnits:
    if time_since_waking < 0:
        raise DomainError(f"Time since waking cannot be negative, got {time_since_waking}")
    return params.inertia_magnitude * math.exp(-time_since_waking / params.inertia_time_constant)


def time_since_waking(schedule: SleepWakeSchedule, t: ClockHours) -> Optional[Hours]:
    """Hours since the most recent sleep-to-wake transition.
    None if t is not in a wake interval that follows sleep.
    """
    for previous, interval in zip(schedule.intervals, schedule.intervals[1:]):
        if interval.start <= t <= interval.end:
            if interval.kind == SleepWakeKind.Wake and previous.kind == SleepWakeKind.Sleep:
                return t - interval.start
            return None
    return None


def predicted_alertness(
    schedule: SleepWakeSchedule,
    t: ClockHours,
    params: AlertnessParams,
    s_initial: Optional[AlertnessUnits] = None,
) -> AlertnessScore:
    s = homeostatic(schedule, t, params, s_initial)
    c = circadian(t, params)
    awake_for = time_since_waking(schedule, t)
    w = 0.0 if awake_for is None else sleep_inertia(awake_for, params)
    return AlertnessScore(time=t, homeostatic=s, circadian=c, inertia=w, value=s + c + w)


def alertness_curve(
    schedule: SleepWakeSchedule,
    params: AlertnessParams,
    step: Hours,
    s_initial: Optional[AlertnessUnits] = None,
) -> list[AlertnessScore]:
    """Scores at every `step` from the start of the schedule to its end, inclusive."""
    if step <= 0:
        raise DomainError(f"Curve step must be positive, got {step}")
    span = schedule.horizon_end - schedule.horizon_start
    point_count = int(math.floor(span / step + _BOUNDARY_TOLERANCE)) + 1
    times = [schedule.horizon_start + i * step for i in range(point_count)]
    if schedule.horizon_end - times[-1] > _BOUNDARY_TOLERANCE:
        times.append(schedule.horizon_end)
    return [predicted_alertness(schedule, min(t, schedule.horizon_end), params, s_initial) for t in times]
