"""Scenario and sleep/wake schedule files.

A scenario file is TOML:

    [[segment]]
    duration = 60.0
    condition = "Awake"

    [[segment]]
    duration = 120.0
    condition = "Asleep"
    overrides = { heart_rate = 45 }

    [[respond]]
    at = 75.0

    [run]
    tick = 0.1
    initial_speed = 100.0
    start_time = "2024-01-01T06:00:00Z"

Optional `[sample_rates]`, `[fusion]` and `[control]` tables override the defaults in vigil.config.
"""
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional

import dateutil.parser
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from vigil.alertness_model import AlertnessParams, SleepWakeInterval, SleepWakeKind, SleepWakeSchedule
from vigil.config import DEFAULT_SCENARIO_START_TIME, INITIAL_TRAIN_SPEED, TICK_PERIOD
from vigil.errors import ConfigError
from vigil.escalation_control import ControlConfig
from vigil.fusion_fsm import DriverState, FusionConfig
from vigil.scenario import (
    DriverCondition,
    InvalidScenarioError,
    SampleRates,
    ScenarioScript,
    ScenarioSegment,
    validate_script,
)
from vigil.units import AlertnessUnits, ClockHours, KilometersPerHour, Seconds, UnixSeconds

_logger = logging.getLogger(__name__)


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class _SegmentModel(_StrictModel):
    duration: float = Field(gt=0)
    condition: str
    overrides: dict[str, float] = {}


class _InstantModel(_StrictModel):
    at: float = Field(ge=0)


class _SampleRatesModel(_StrictModel):
    frame: Optional[float] = Field(default=None, gt=0)
    accel: Optional[float] = Field(default=None, gt=0)
    ppg: Optional[float] = Field(default=None, gt=0)


class _RunModel(_StrictModel):
    tick: float = Field(default=TICK_PERIOD, gt=0)
    initial_speed: float = Field(default=INITIAL_TRAIN_SPEED, ge=0)
    start_time: str = DEFAULT_SCENARIO_START_TIME


class _FusionModel(_StrictModel):
    window: Optional[float] = None
    dwell_up: Optional[int] = None
    dwell_down: Optional[int] = None
    drowsy_closed_fraction: Optional[float] = None
    sleepy_closed_fraction: Optional[float] = None
    asleep_closed_fraction: Optional[float] = None
    drowsy_maximum_blink_rate: Optional[float] = None
    sleepy_minimum_nod_rate: Optional[float] = None


class _ControlModel(_StrictModel):
    alarm_response_timeout: Optional[float] = None
    hr_check_duration: Optional[float] = None
    service_deceleration: Optional[float] = None
    trigger_severity: Optional[str] = None


class _ScenarioFileModel(_StrictModel):
    segment: list[_SegmentModel] = []
    respond: list[_InstantModel] = []
    reset: list[_InstantModel] = []
    sample_rates: _SampleRatesModel = _SampleRatesModel()
    run: _RunModel = _RunModel()
    fusion: _FusionModel = _FusionModel()
    control: _ControlModel = _ControlModel()


class _IntervalModel(_StrictModel):
    start: float
    end: float
    kind: str


class _ParamsModel(_StrictModel):
    mesor: Optional[float] = None
    amplitude: Optional[float] = None
    acrophase: Optional[float] = None
    wake_decay_rate: Optional[float] = None
    low_asymptote: Optional[float] = None
    sleep_recovery_rate: Optional[float] = None
    high_asymptote: Optional[float] = None
    inertia_magnitude: Optional[float] = None
    inertia_time_constant: Optional[float] = None


class _ScheduleFileModel(_StrictModel):
    interval: list[_IntervalModel]
    sim_start_hour: Optional[float] = None
    s_initial: Optional[float] = None
    params: _ParamsModel = _ParamsModel()


@dataclass(frozen=True)
class RunSettings:
    tick: Seconds = TICK_PERIOD
    initial_speed: KilometersPerHour = INITIAL_TRAIN_SPEED
    # Simulated instant of sim time 0, used to stamp status messages
    start_time: UnixSeconds = 0


@dataclass(frozen=True)
class ScenarioFile:
    script: ScenarioScript
    run: RunSettings
    fusion: FusionConfig
    control: ControlConfig


@dataclass(frozen=True)
class ScheduleFile:
    schedule: SleepWakeSchedule
    params: AlertnessParams
    s_initial: Optional[AlertnessUnits]
    # Clock hour corresponding to sim time 0. Defaults to the start of the schedule.
    sim_start_hour: ClockHours


def _load_toml(path: Path) -> dict[str, Any]:
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except OSError as e:
        raise ConfigError(f"Cannot read {path.as_posix()}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path.as_posix()} is not valid TOML: {e}") from e


def parse_start_time(text: str) -> UnixSeconds:
    try:
        instant = dateutil.parser.isoparse(text)
    except ValueError as e:
        raise ConfigError(f"Invalid start_time {text!r}: {e}") from e
    if instant.tzinfo is None:
        raise ConfigError(f"start_time {text!r} must carry a UTC offset")
    timestamp = int(instant.timestamp())
    if timestamp < 0:
        raise ConfigError(f"start_time {text!r} precedes the Unix epoch")
    return timestamp


def fusion_config_with_overrides(overrides: dict[str, Any]) -> FusionConfig:
    return replace(FusionConfig(), **overrides)


def control_config_with_overrides(overrides: dict[str, Any]) -> ControlConfig:
    overrides = dict(overrides)
    trigger = overrides.get("trigger_severity")
    if isinstance(trigger, str):
        try:
            overrides["trigger_severity"] = DriverState[trigger]
        except KeyError:
            raise ConfigError(f"Unknown trigger state {trigger!r}")
    return replace(ControlConfig(), **overrides)


def parse_scenario(document: dict[str, Any]) -> ScenarioFile:
    try:
        model = _ScenarioFileModel.model_validate(document)
    except ValidationError as e:
        raise InvalidScenarioError(f"Malformed scenario: {e}") from e

    rates = SampleRates(**model.sample_rates.model_dump(exclude_none=True))
    segments = tuple(
        ScenarioSegment(s.duration, DriverCondition.from_name(s.condition), s.overrides) for s in model.segment
    )
    script = ScenarioScript(
        segments=segments,
        sample_rates=rates,
        responses=tuple(sorted(r.at for r in model.respond)),
        resets=tuple(sorted(r.at for r in model.reset)),
    )
    validate_script(script)

    run = RunSettings(
        tick=model.run.tick,
        initial_speed=model.run.initial_speed,
        start_time=parse_start_time(model.run.start_time),
    )
    return ScenarioFile(
        script=script,
        run=run,
        fusion=fusion_config_with_overrides(model.fusion.model_dump(exclude_none=True)),
        control=control_config_with_overrides(model.control.model_dump(exclude_none=True)),
    )


def load_scenario_file(path: Path) -> ScenarioFile:
    scenario = parse_scenario(_load_toml(path))
    _logger.info(
        f"Loaded scenario {path.name}: {len(scenario.script.segments)} segments, "
        f"{scenario.script.duration:.1f}s in total"
    )
    return scenario


def parse_schedule(document: dict[str, Any]) -> ScheduleFile:
    try:
        model = _ScheduleFileModel.model_validate(document)
    except ValidationError as e:
        raise ConfigError(f"Malformed sleep/wake schedule: {e}") from e

    intervals = []
    for interval in model.interval:
        try:
            kind = SleepWakeKind[interval.kind]
        except KeyError:
            raise ConfigError(f"Unknown interval kind {interval.kind!r}")
        intervals.append(SleepWakeInterval(interval.start, interval.end, kind))
    schedule = SleepWakeSchedule(tuple(intervals))
    params = replace(AlertnessParams(), **model.params.model_dump(exclude_none=True))
    if model.s_initial is not None and not params.low_asymptote <= model.s_initial <= params.high_asymptote:
        raise ConfigError(f"s_initial {model.s_initial} lies outside the homeostatic asymptotes")
    sim_start_hour = schedule.horizon_start if model.sim_start_hour is None else model.sim_start_hour
    return ScheduleFile(schedule=schedule, params=params, s_initial=model.s_initial, sim_start_hour=sim_start_hour)


def load_schedule_file(path: Path) -> ScheduleFile:
    return parse_schedule(_load_toml(path))
