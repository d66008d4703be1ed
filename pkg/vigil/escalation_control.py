"""The alarm escalation protocol and the simulated train it protects.

Monitoring --(fused state reaches the trigger)--> AlarmSounding
AlarmSounding --(driver response)--> Monitoring
AlarmSounding --(no response within the timeout)--> Braking --(same tick)--> HrCheck --> Reported

Once braking starts it persists until a manual reset; the controller never resumes speed on its own.
"""
import logging
from dataclasses import dataclass
from enum import Enum, auto
from typing import Optional

from vigil.config import ALARM_RESPONSE_TIMEOUT, HR_CHECK_DURATION, SERVICE_DECELERATION
from vigil.constants import KILOMETERS_PER_HOUR_PER_METER_PER_SECOND, ZERO_SPEED
from vigil.errors import ConfigError, DomainError, ProtocolViolationError
from vigil.events import Event
from vigil.fusion_fsm import DriverState
from vigil.heart_monitor import Vitality
from vigil.units import KilometersPerHour, MetersPerSecondSquared, Seconds

_logger = logging.getLogger(__name__)


class EscalationPhase(Enum):
    Monitoring = auto()
    AlarmSounding = auto()
    Braking = auto()
    HrCheck = auto()
    Reported = auto()

    @property
    def is_transient(self) -> bool:
        # Phases that are left within the tick they were entered in
        return self == EscalationPhase.Braking


class ReportKind(Enum):
    StateReport = auto()
    VitalityReport = auto()


@dataclass(frozen=True)
class Action(Event):
    pass


@dataclass(frozen=True)
class SoundAlarm(Action):
    pass


@dataclass(frozen=True)
class StopAlarm(Action):
    pass


@dataclass(frozen=True)
class ApplyBrake(Action):
    deceleration: MetersPerSecondSquared

    def __post_init__(self) -> None:
        if self.deceleration <= 0:
            raise DomainError(f"Brake deceleration must be positive, got {self.deceleration}")


@dataclass(frozen=True)
class ReleaseBrake(Action):
    pass


@dataclass(frozen=True)
class ActivateHrSensor(Action):
    pass


@dataclass(frozen=True)
class SendReport(Action):
    """Asks the harness to send a status message. The harness stamps it with the sequence number, time and speed."""

    kind: ReportKind
    driver_state: DriverState
    vitality: Vitality


@dataclass(frozen=True)
class TrainState:
    speed: KilometersPerHour
    braking: bool = False

    def __post_init__(self) -> None:
        if self.speed < 0:
            raise DomainError(f"Train speed cannot be negative, got {self.speed}")


@dataclass(frozen=True)
class ControlConfig:
    alarm_response_timeout: Seconds = ALARM_RESPONSE_TIMEOUT
    hr_check_duration: Seconds = HR_CHECK_DURATION
    service_deceleration: MetersPerSecondSquared = SERVICE_DECELERATION
    trigger_severity: DriverState = DriverState.Sleepy

    def __post_init__(self) -> None:
        if self.alarm_response_timeout <= 0 or self.hr_check_duration <= 0:
            raise ConfigError("Escalation timeouts must be positive")
        if self.service_deceleration <= 0:
            raise ConfigError(f"Service deceleration must be positive, got {self.service_deceleration}")
        if self.trigger_severity in (DriverState.Awake, DriverState.Incapacitated):
            raise ConfigError(f"Cannot trigger the alarm on {self.trigger_severity.name}")


def state_after_vitality(state: DriverState, vitality: Vitality) -> DriverState:
    if vitality == Vitality.NoPulse:
        return DriverState.Incapacitated
    return state


def step(
    phase: EscalationPhase,
    driver_state: DriverState,
    response: bool,
    vitality: Optional[Vitality],
    elapsed_in_phase: Seconds,
    cfg: ControlConfig,
) -> tuple[EscalationPhase, list[Action]]:
    """Advances the escalation protocol by one evaluation.
    `vitality` is only consulted when the heart-rate check completes, and must be provided then.
    """
    if elapsed_in_phase < 0:
        raise ProtocolViolationError(f"Negative time in phase {phase.name}: {elapsed_in_phase}")

    if phase == EscalationPhase.Monitoring:
        if driver_state.severity >= cfg.trigger_severity.severity:
            return EscalationPhase.AlarmSounding, [SoundAlarm()]
        return phase, []

    if phase == EscalationPhase.AlarmSounding:
        if response:
            return EscalationPhase.Monitoring, [StopAlarm()]
        if elapsed_in_phase >= cfg.alarm_response_timeout:
            return EscalationPhase.Braking, [
                ApplyBrake(cfg.service_deceleration),
                SendReport(ReportKind.StateReport, driver_state, Vitality.Unknown),
            ]
        return phase, []

    if phase == EscalationPhase.Braking:
        return EscalationPhase.HrCheck, [ActivateHrSensor()]

    if phase == EscalationPhase.HrCheck:
        if elapsed_in_phase < cfg.hr_check_duration:
            return phase, []
        if vitality is None:
            raise ProtocolViolationError("The heart-rate check completed without a vitality result")
        return EscalationPhase.Reported, [
            SendReport(ReportKind.VitalityReport, state_after_vitality(driver_state, vitality), vitality),
        ]

    if phase == EscalationPhase.Reported:
        return phase, []

    raise ProtocolViolationError(f"Unhandled escalation phase {phase}")


def reset(phase: EscalationPhase) -> tuple[EscalationPhase, list[Action]]:
    if phase != EscalationPhase.Reported:
        raise ProtocolViolationError(f"Only a reported incident can be reset, not {phase.name}")
    return EscalationPhase.Monitoring, [StopAlarm(), ReleaseBrake()]


def advance_train(
    train: TrainState, dt: Seconds, braking: bool, deceleration: MetersPerSecondSquared = SERVICE_DECELERATION
) -> TrainState:
    if dt <= 0:
        raise DomainError(f"Time step must be positive, got {dt}")
    if not braking:
        return TrainState(speed=train.speed, braking=False)
    speed = max(ZERO_SPEED, train.speed - KILOMETERS_PER_HOUR_PER_METER_PER_SECOND * deceleration * dt)
    return TrainState(speed=speed, braking=True)
