import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vigil.errors import ConfigError, DomainError, ProtocolViolationError
from vigil.escalation_control import (
    ActivateHrSensor,
    ApplyBrake,
    ControlConfig,
    EscalationPhase,
    ReleaseBrake,
    ReportKind,
    SendReport,
    SoundAlarm,
    StopAlarm,
    TrainState,
    advance_train,
    reset,
    state_after_vitality,
    step,
)
from vigil.fusion_fsm import DriverState
from vigil.heart_monitor import Vitality

_CFG = ControlConfig()


def test_monitoring_triggers_on_sleepy():
    assert step(EscalationPhase.Monitoring, DriverState.Sleepy, False, None, 3.0, _CFG) == (
        EscalationPhase.AlarmSounding,
        [SoundAlarm()],
    )


def test_monitoring_ignores_drowsy():
    assert step(EscalationPhase.Monitoring, DriverState.Drowsy, False, None, 3.0, _CFG) == (
        EscalationPhase.Monitoring,
        [],
    )


def test_lower_trigger_fires_on_drowsy():
    cfg = ControlConfig(trigger_severity=DriverState.Drowsy)
    phase, actions = step(EscalationPhase.Monitoring, DriverState.Drowsy, False, None, 0.0, cfg)
    assert phase == EscalationPhase.AlarmSounding


def test_response_silences_the_alarm():
    assert step(EscalationPhase.AlarmSounding, DriverState.Asleep, True, None, 4.0, _CFG) == (
        EscalationPhase.Monitoring,
        [StopAlarm()],
    )


def test_alarm_waits_for_the_timeout():
    assert step(EscalationPhase.AlarmSounding, DriverState.Asleep, False, None, 9.9, _CFG) == (
        EscalationPhase.AlarmSounding,
        [],
    )


def test_timeout_brakes_and_reports():
    phase, actions = step(EscalationPhase.AlarmSounding, DriverState.Asleep, False, None, 10.0, _CFG)
    assert phase == EscalationPhase.Braking
    assert actions == [
        ApplyBrake(0.5),
        SendReport(ReportKind.StateReport, DriverState.Asleep, Vitality.Unknown),
    ]


def test_braking_activates_the_heart_sensor():
    assert step(EscalationPhase.Braking, DriverState.Asleep, False, None, 0.0, _CFG) == (
        EscalationPhase.HrCheck,
        [ActivateHrSensor()],
    )


def test_no_pulse_reports_incapacitated():
    phase, actions = step(EscalationPhase.HrCheck, DriverState.Asleep, False, Vitality.NoPulse, 5.0, _CFG)
    assert phase == EscalationPhase.Reported
    assert actions == [SendReport(ReportKind.VitalityReport, DriverState.Incapacitated, Vitality.NoPulse)]


def test_normal_pulse_keeps_the_fused_state():
    _, actions = step(EscalationPhase.HrCheck, DriverState.Asleep, False, Vitality.Normal, 5.0, _CFG)
    assert actions == [SendReport(ReportKind.VitalityReport, DriverState.Asleep, Vitality.Normal)]


def test_heart_check_waits_for_its_window():
    assert step(EscalationPhase.HrCheck, DriverState.Asleep, False, None, 4.9, _CFG) == (EscalationPhase.HrCheck, [])


def test_completed_heart_check_needs_a_vitality():
    with pytest.raises(ProtocolViolationError):
        step(EscalationPhase.HrCheck, DriverState.Asleep, False, None, 5.0, _CFG)


def test_negative_elapsed_is_a_violation():
    with pytest.raises(ProtocolViolationError):
        step(EscalationPhase.Monitoring, DriverState.Awake, False, None, -0.1, _CFG)


def test_reported_is_terminal_until_reset():
    for state in DriverState:
        assert step(EscalationPhase.Reported, state, True, None, 100.0, _CFG) == (EscalationPhase.Reported, [])


def test_reset_releases_everything():
    assert reset(EscalationPhase.Reported) == (EscalationPhase.Monitoring, [StopAlarm(), ReleaseBrake()])


@pytest.mark.parametrize("phase", [p for p in EscalationPhase if p != EscalationPhase.Reported])
def test_reset_outside_reported_is_a_violation(phase: EscalationPhase):
    with pytest.raises(ProtocolViolationError):
        reset(phase)


def test_a_responsive_driver_is_never_braked():
    phase = EscalationPhase.Monitoring
    entered = 0.0
    for tick in range(2000):
        t = tick * 0.1
        phase_before = phase
        phase, actions = step(phase, DriverState.Asleep, True, None, t - entered, _CFG)
        assert not any(isinstance(a, ApplyBrake) for a in actions)
        if phase != phase_before:
            entered = t


def test_state_after_vitality():
    assert state_after_vitality(DriverState.Sleepy, Vitality.NoPulse) == DriverState.Incapacitated
    assert state_after_vitality(DriverState.Sleepy, Vitality.Bradycardia) == DriverState.Sleepy


def test_one_second_of_braking():
    assert advance_train(TrainState(100.0), 1.0, True, 0.5).speed == pytest.approx(98.2)


def test_coasting_keeps_speed():
    assert advance_train(TrainState(100.0), 1.0, False).speed == 100.0


def test_train_stops_within_the_expected_time():
    train = TrainState(100.0)
    speeds = []
    for _ in range(1000):
        train = advance_train(train, 0.1, True, 0.5)
        speeds.append(train.speed)
    assert all(b <= a for a, b in zip(speeds, speeds[1:]))
    stopped_after = (speeds.index(0.0) + 1) * 0.1
    assert stopped_after <= math.ceil(100 / (3.6 * 0.5)) + 0.1 + 1e-9
    assert stopped_after == pytest.approx(55.6)


def test_speed_never_goes_negative():
    assert advance_train(TrainState(0.1), 1.0, True).speed == 0.0


def test_non_positive_time_step_is_rejected():
    with pytest.raises(DomainError):
        advance_train(TrainState(10.0), 0.0, True)


@pytest.mark.parametrize(
    "overrides",
    [
        {"alarm_response_timeout": 0.0},
        {"service_deceleration": -1.0},
        {"trigger_severity": DriverState.Awake},
        {"trigger_severity": DriverState.Incapacitated},
    ],
)
def test_invalid_control_config_is_rejected(overrides: dict):
    with pytest.raises(ConfigError):
        ControlConfig(**overrides)


def test_actions_describe_themselves():
    assert SoundAlarm().describe() == "SoundAlarm"
    assert ApplyBrake(0.5).describe() == "ApplyBrake(0.5)"
    assert SendReport(ReportKind.VitalityReport, DriverState.Incapacitated, Vitality.NoPulse).describe() == (
        "SendReport(VitalityReport:Incapacitated:NoPulse)"
    )


_LEGAL_TRANSITIONS = {
    (EscalationPhase.Monitoring, EscalationPhase.Monitoring),
    (EscalationPhase.Monitoring, EscalationPhase.AlarmSounding),
    (EscalationPhase.AlarmSounding, EscalationPhase.AlarmSounding),
    (EscalationPhase.AlarmSounding, EscalationPhase.Monitoring),
    (EscalationPhase.AlarmSounding, EscalationPhase.Braking),
    (EscalationPhase.Braking, EscalationPhase.HrCheck),
    (EscalationPhase.HrCheck, EscalationPhase.HrCheck),
    (EscalationPhase.HrCheck, EscalationPhase.Reported),
    (EscalationPhase.Reported, EscalationPhase.Reported),
    (EscalationPhase.Reported, EscalationPhase.Monitoring),
}

# (driver state, driver responded, seconds since the previous evaluation, manual reset requested)
_Input = tuple[DriverState, bool, float, bool]


class _Incident:
    """Tallies the actions of one excursion out of Monitoring."""

    def __init__(self) -> None:
        self.alarms = 0
        self.reports = 0
        self.brakes = 0

    def record(self, actions: list) -> None:
        self.alarms += sum(isinstance(a, SoundAlarm) for a in actions)
        self.reports += sum(isinstance(a, SendReport) for a in actions)
        self.brakes += sum(isinstance(a, ApplyBrake) for a in actions)
        assert self.alarms == 1
        assert self.reports <= 2
        assert self.brakes <= 1


def _drive(inputs: list[_Input], vitality: Vitality = Vitality.Normal, cfg: ControlConfig = _CFG) -> EscalationPhase:
    """Runs the controller the way the harness does, checking every transition on the way."""
    phase = EscalationPhase.Monitoring
    elapsed = 0.0
    incident = _Incident()
    for driver_state, response, dt, reset_requested in inputs:
        elapsed += dt
        if reset_requested and phase == EscalationPhase.Reported:
            next_phase, actions = reset(phase)
        else:
            next_phase, actions = step(phase, driver_state, response, vitality, elapsed, cfg)
        while True:
            assert (phase, next_phase) in _LEGAL_TRANSITIONS, (phase, next_phase)
            if phase == EscalationPhase.Monitoring and next_phase != EscalationPhase.Monitoring:
                incident = _Incident()
            if phase != EscalationPhase.Monitoring or next_phase != EscalationPhase.Monitoring:
                incident.record(actions)
            if next_phase != phase:
                elapsed = 0.0
            phase = next_phase
            if not phase.is_transient:
                break
            next_phase, actions = step(phase, driver_state, response, vitality, elapsed, cfg)
    return phase


_INPUT_ALPHABET: list[_Input] = [
    (driver_state, response, dt, False)
    for driver_state in (DriverState.Awake, DriverState.Asleep)
    for response in (False, True)
    for dt in (1.0, 10.0)
] + [(DriverState.Awake, False, 1.0, True)]


def _every_input_sequence(length: int):
    for n in range(length + 1):
        yield from itertools.product(_INPUT_ALPHABET, repeat=n)


@pytest.mark.fuzz
@pytest.mark.parametrize("vitality", [Vitality.Normal, Vitality.NoPulse])
def test_every_short_input_sequence_follows_the_protocol(vitality: Vitality):
    for inputs in _every_input_sequence(5):
        _drive(list(inputs), vitality)


@given(
    inputs=st.lists(
        st.tuples(
            st.sampled_from(list(DriverState)),
            st.booleans(),
            st.sampled_from([0.1, 0.5, 1.0, 5.0, 10.0]),
            st.booleans(),
        ),
        max_size=60,
    ),
    vitality=st.sampled_from(list(Vitality)),
    trigger=st.sampled_from([DriverState.Drowsy, DriverState.Sleepy, DriverState.Asleep]),
)
@settings(max_examples=300, deadline=None)
def test_random_input_sequences_follow_the_protocol(inputs: list[_Input], vitality: Vitality, trigger: DriverState):
    _drive(inputs, vitality, ControlConfig(trigger_severity=trigger))


def test_an_unanswered_alarm_runs_the_whole_protocol():
    asleep = (DriverState.Asleep, False, 1.0, False)
    inputs = [asleep] * (1 + 10 + 5)
    assert _drive(inputs) == EscalationPhase.Reported
    assert _drive(inputs + [(DriverState.Awake, False, 1.0, True)]) == EscalationPhase.Monitoring
