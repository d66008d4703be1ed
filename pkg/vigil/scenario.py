import logging
import math
from dataclasses import dataclass, field, fields, replace
from enum import Enum, auto
from typing import Mapping

from vigil.config import ACCELEROMETER_RATE, FRAME_RATE, PPG_RATE
from vigil.errors import ConfigError
from vigil.units import BeatsPerMinute, BlinksPerMinute, Degrees, Fraction, Hertz, Seconds

_logger = logging.getLogger(__name__)


class InvalidScenarioError(ConfigError):
    pass


class DriverCondition(Enum):
    Awake = auto()
    Drowsy = auto()
    Sleepy = auto()
    Asleep = auto()
    NoPulse = auto()

    @classmethod
    def from_name(cls, name: str) -> "DriverCondition":
        try:
            return cls[name]
        except KeyError:
            raise InvalidScenarioError(f"Unknown driver condition: {name!r}")


@dataclass(frozen=True)
class ConditionProfile:
    """Parameters of the synthetic signals emitted while the driver is in one condition.
    A blink closes the eyelid over `closure_ramp`, holds it shut for `closure_hold`, then reopens over `closure_ramp`.
    """

    blink_rate: BlinksPerMinute
    # Each blink period is scaled by a uniform factor in [1 - jitter, 1 + jitter]
    blink_period_jitter: Fraction
    open_aperture: Fraction
    closure_ramp: Seconds
    closure_hold: Seconds

    head_baseline: Degrees
    head_sway_amplitude: Degrees
    head_sway_period: Seconds
    pitch_noise: Degrees
    # Triangular forward nods. An amplitude of zero disables them.
    nod_amplitude: Degrees
    nod_min_gap: Seconds
    nod_max_gap: Seconds
    nod_half_width: Seconds

    # PIR events are spaced by uniform gaps in this range. A maximum of zero disables the sensor.
    pir_min_gap: Seconds
    pir_max_gap: Seconds

    # Zero means there is no pulse at all and the PPG channel is flat noise.
    heart_rate: BeatsPerMinute
    ppg_noise: float

    def __post_init__(self) -> None:
        if self.blink_rate < 0 or not 0 <= self.blink_period_jitter < 1:
            raise InvalidScenarioError(f"Invalid blink parameters: {self}")
        if not 0 <= self.open_aperture <= 1:
            raise InvalidScenarioError(f"Open aperture must lie in [0, 1], got {self.open_aperture}")
        if self.blink_rate > 0 and (self.closure_ramp <= 0 or self.closure_hold < 0):
            raise InvalidScenarioError(f"Blinking requires a positive closure ramp, got {self.closure_ramp}")
        if self.head_sway_period <= 0 or self.pitch_noise < 0:
            raise InvalidScenarioError(f"Invalid head motion parameters: {self}")
        if self.nod_amplitude < 0:
            raise InvalidScenarioError(f"Nod amplitude must be non-negative, got {self.nod_amplitude}")
        if self.nod_amplitude > 0 and not (0 < self.nod_min_gap <= self.nod_max_gap and self.nod_half_width > 0):
            raise InvalidScenarioError(f"Invalid nod cadence: {self}")
        if self.pir_max_gap < 0 or (self.pir_max_gap > 0 and not 0 < self.pir_min_gap <= self.pir_max_gap):
            raise InvalidScenarioError(f"Invalid PIR cadence: {self}")
        if self.heart_rate < 0 or self.ppg_noise < 0:
            raise InvalidScenarioError(f"Invalid heart parameters: {self}")

    @property
    def blinks(self) -> bool:
        return self.blink_rate > 0

    @property
    def nods(self) -> bool:
        return self.nod_amplitude > 0

    @property
    def has_pir(self) -> bool:
        return self.pir_max_gap > 0

    @property
    def has_pulse(self) -> bool:
        return self.heart_rate > 0

    def with_overrides(self, overrides: Mapping[str, float]) -> "ConditionProfile":
        known_fields = {f.name for f in fields(self)}
        unknown_fields = set(overrides) - known_fields
        if unknown_fields:
            raise InvalidScenarioError(f"Unknown condition profile fields: {sorted(unknown_fields)}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})


_ASLEEP_PROFILE = ConditionProfile(
    blink_rate=0,
    blink_period_jitter=0,
    open_aperture=0.0,
    closure_ramp=0,
    closure_hold=0,
    # The head drops into a relaxed, slumped position and stays there
    head_baseline=26.0,
    head_sway_amplitude=0.0,
    head_sway_period=10.0,
    pitch_noise=0.1,
    nod_amplitude=0.0,
    nod_min_gap=0,
    nod_max_gap=0,
    nod_half_width=0,
    pir_min_gap=0,
    pir_max_gap=0,
    heart_rate=55,
    ppg_noise=0.02,
)


DEFAULT_CONDITION_PROFILES: dict[DriverCondition, ConditionProfile] = {
    DriverCondition.Awake: ConditionProfile(
        # 15 to 20 blinks per minute once the period jitter is applied
        blink_rate=17.5,
        blink_period_jitter=0.12,
        open_aperture=1.0,
        closure_ramp=0.1,
        closure_hold=0.1,
        head_baseline=0.0,
        head_sway_amplitude=2.0,
        head_sway_period=7.0,
        pitch_noise=0.5,
        nod_amplitude=0.0,
        nod_min_gap=0,
        nod_max_gap=0,
        nod_half_width=0,
        pir_min_gap=1.0,
        pir_max_gap=5.0,
        heart_rate=70,
        ppg_noise=0.02,
    ),
    DriverCondition.Drowsy: ConditionProfile(
        blink_rate=6,
        blink_period_jitter=0,
        # Drooping lids
        open_aperture=0.75,
        closure_ramp=0.5,
        closure_hold=4.5,
        head_baseline=5.0,
        head_sway_amplitude=3.0,
        head_sway_period=11.0,
        pitch_noise=0.5,
        nod_amplitude=0.0,
        nod_min_gap=0,
        nod_max_gap=0,
        nod_half_width=0,
        pir_min_gap=2.0,
        pir_max_gap=8.0,
        heart_rate=62,
        ppg_noise=0.02,
    ),
    DriverCondition.Sleepy: ConditionProfile(
        blink_rate=12,
        blink_period_jitter=0,
        open_aperture=0.6,
        closure_ramp=0.5,
        closure_hold=3.5,
        head_baseline=10.0,
        head_sway_amplitude=1.0,
        head_sway_period=13.0,
        pitch_noise=0.3,
        nod_amplitude=20.0,
        nod_min_gap=4.0,
        nod_max_gap=4.8,
        nod_half_width=0.6,
        pir_min_gap=10.0,
        pir_max_gap=25.0,
        heart_rate=58,
        ppg_noise=0.02,
    ),
    DriverCondition.Asleep: _ASLEEP_PROFILE,
    DriverCondition.NoPulse: replace(_ASLEEP_PROFILE, heart_rate=0, ppg_noise=0.005),
}


@dataclass(frozen=True)
class SampleRates:
    frame: Hertz = FRAME_RATE
    accel: Hertz = ACCELEROMETER_RATE
    ppg: Hertz = PPG_RATE

    def __post_init__(self) -> None:
        for name, rate in (("frame", self.frame), ("accel", self.accel), ("ppg", self.ppg)):
            if not rate > 0 or not math.isfinite(rate):
                raise InvalidScenarioError(f"The {name} sample rate must be positive, got {rate}")


@dataclass(frozen=True)
class ScenarioSegment:
    duration: Seconds
    condition: DriverCondition
    overrides: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.duration > 0 or not math.isfinite(self.duration):
            raise InvalidScenarioError(f"Segment duration must be positive, got {self.duration}")
        if not isinstance(self.condition, DriverCondition):
            raise InvalidScenarioError(f"Unknown driver condition: {self.condition!r}")
        # Fail on unknown override fields as early as possible
        self.profile()

    def profile(self) -> ConditionProfile:
        return DEFAULT_CONDITION_PROFILES[self.condition].with_overrides(self.overrides)


@dataclass(frozen=True)
class ScenarioScript:
    segments: tuple[ScenarioSegment, ...]
    sample_rates: SampleRates = SampleRates()
    # Scripted driver acknowledgments of the alarm
    responses: tuple[Seconds, ...] = ()
    # Scripted manual resets of the escalation controller
    resets: tuple[Seconds, ...] = ()

    @property
    def duration(self) -> Seconds:
        return sum(segment.duration for segment in self.segments)

    def segment_starts(self) -> list[Seconds]:
        starts = []
        cursor = 0.0
        for segment in self.segments:
            starts.append(cursor)
            cursor += segment.duration
        return starts

    def condition_at(self, t: Seconds) -> DriverCondition:
        condition = self.segments[0].condition
        for start, segment in zip(self.segment_starts(), self.segments):
            if start > t:
                break
            condition = segment.condition
        return condition


def validate_script(script: ScenarioScript) -> None:
    if len(script.segments) == 0:
        raise InvalidScenarioError("A scenario needs at least one segment")
    if not script.duration > 0:
        raise InvalidScenarioError("A scenario must have a positive total duration")
    for segment in script.segments:
        if not isinstance(segment.condition, DriverCondition):
            raise InvalidScenarioError(f"Unknown driver condition: {segment.condition!r}")
    for name, instants in (("respond", script.responses), ("reset", script.resets)):
        if list(instants) != sorted(instants) or any(t < 0 for t in instants):
            raise InvalidScenarioError(f"Scripted {name} instants must be non-negative and ordered: {instants}")
