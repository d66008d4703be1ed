import collections
import csv
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Optional, Type

import numpy as np
from pydantic import BaseModel, ValidationError

from vigil.alertness_model import (
    AlertnessParams,
    SleepWakeInterval,
    SleepWakeKind,
    SleepWakeSchedule,
    alertness_curve,
    predicted_alertness,
)
from vigil.config import (
    ALERTNESS_CURVE_STEP_MINUTES,
    BLINK_ANALYSIS_WINDOW,
    BPM_WINDOW,
    MINIMUM_NOD_SERIES_DURATION,
    MOTION_ANALYSIS_WINDOW,
    NOD_ANALYSIS_WINDOW,
    NOD_BASELINE_WINDOW,
    PIR_ACTIVITY_WINDOW,
)
from vigil.constants import SECONDS_PER_HOUR, SECONDS_PER_MINUTE, TIMESTAMP_EPSILON
from vigil.errors import ConfigError, InsufficientDataError, ProtocolViolationError
from vigil.escalation_control import (
    Action,
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
    step,
)
from vigil.events import UnknownEventError
from vigil.fusion_fsm import DriverState, Evidence, FusionConfig, FusionFsm
from vigil.heart_monitor import HeartAssessment, assess
from vigil.motion_detect import PitchSeries, detect_nods, pir_active, pitch_series
from vigil.scenario import SampleRates, ScenarioScript
from vigil.scenario_file import (
    RunSettings,
    ScheduleFile,
    control_config_with_overrides,
    load_scenario_file,
    load_schedule_file,
)
from vigil.sensor_sample_provider import (
    SensorSampleChunk,
    SensorSampleProvider,
    SensorSampleProviderBackedByBundle,
    SensorSampleProviderBackedByDirectory,
)
from vigil.signal_synth import BundleFormatError, PirTrace, PpgTrace, synthesize, write_bundle
from vigil.telemetry import HR_CODES, STATE_CODES, UNKNOWN_BPM, ControlRoomReceiver, StatusMessage, encode
from vigil.timeline import (
    TimelineEvidence,
    TimelineFormatError,
    TimelineReport,
    TimelineRow,
    compute_metrics,
    read_summary,
    read_timeline,
    write_summary,
    write_timeline,
)
from vigil.units import AlertnessUnits, Seconds
from vigil.vision_detect import (
    ApertureSeries,
    DiffScoreSeries,
    MotionLevel,
    blink_rate,
    classify_motion,
    closed_fraction,
    estimate_aperture,
    frame_diff_score,
)

_logger = logging.getLogger(__name__)

TIMELINE_FILE_NAME = "timeline.csv"
SUMMARY_FILE_NAME = "summary.txt"
TELEMETRY_LOG_FILE_NAME = "telemetry.log"
ACK_LOG_FILE_NAME = "acks.log"
PLOT_FILE_NAME = "timeline.png"
BUNDLE_DIRECTORY_NAME = "bundle"
RUN_MANIFEST_FILE_NAME = "run.json"


@dataclass(frozen=True)
class RunConfig:
    scenario_path: Path
    seed: int
    out_dir: Path
    schedule_path: Optional[Path] = None
    # Overrides the scenario's own tick when set
    tick: Optional[Seconds] = None
    fusion_overrides: dict[str, Any] = field(default_factory=dict)
    control_overrides: dict[str, Any] = field(default_factory=dict)
    record_bundle: bool = False
    plot: bool = False


@dataclass(frozen=True)
class SimulationSettings:
    run: RunSettings
    fusion: FusionConfig
    control: ControlConfig
    schedule: Optional[ScheduleFile] = None


def _ticks_per_period(tick: Seconds, period: Seconds, description: str) -> int:
    ratio = period / tick
    rounded = round(ratio)
    if rounded < 1 or abs(ratio - rounded) > 1e-6:
        raise ConfigError(f"The tick ({tick}s) must evenly divide the {description} ({period}s)")
    return int(rounded)


def validate_tick(tick: Seconds, rates: SampleRates, fusion_window: Seconds) -> int:
    """Checks that every sensor delivers a whole number of samples per tick, and returns the ticks per fusion window."""
    if not tick > 0:
        raise ConfigError(f"The tick must be positive, got {tick}")
    for name, rate in (("frame", rates.frame), ("accelerometer", rates.accel), ("PPG", rates.ppg)):
        samples_per_tick = rate * tick
        if round(samples_per_tick) < 1 or abs(samples_per_tick - round(samples_per_tick)) > 1e-6:
            raise ConfigError(f"The tick ({tick}s) must be a whole number of {name} sample periods ({1 / rate}s)")
    return _ticks_per_period(tick, fusion_window, "fusion window")


class _RollingSeries:
    """(timestamp, value) pairs, trimmed to a trailing horizon."""

    def __init__(self, horizon: Seconds) -> None:
        self.horizon = horizon
        self.timestamps: collections.deque[float] = collections.deque()
        self.values: collections.deque[float] = collections.deque()

    def extend(self, timestamps: np.ndarray, values: np.ndarray) -> None:
        self.timestamps.extend(float(t) for t in timestamps)
        self.values.extend(float(v) for v in values)
        if not self.timestamps:
            return
        oldest_kept = self.timestamps[-1] - self.horizon
        while self.timestamps and self.timestamps[0] <= oldest_kept:
            self.timestamps.popleft()
            self.values.popleft()

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.timestamps, dtype=float), np.array(self.values, dtype=float)


class DriverMonitor:
    """Runs the monitoring pipeline over a logical clock, one tick per `step()`.

    Each tick ingests the samples that became due, closes a fusion window when one ends on this tick, steps the
    escalation controller with the fused state, routes any status reports to the control room, then advances the train.
    """

    def __init__(
        self,
        sensor_samples_provider: SensorSampleProvider,
        script: ScenarioScript,
        settings: SimulationSettings,
        control_room: ControlRoomReceiver,
    ) -> None:
        self.sensor_samples_provider = sensor_samples_provider
        self.script = script
        self.settings = settings
        self.control_room = control_room

        self.tick_period = settings.run.tick
        self.ticks_per_fusion_window = validate_tick(self.tick_period, script.sample_rates, settings.fusion.window)
        self.tick_count = int(math.floor(script.duration / self.tick_period + TIMESTAMP_EPSILON)) + 1
        self.tick_index = 0

        self.fusion = FusionFsm()
        self.phase = EscalationPhase.Monitoring
        self._phase_entry_tick = 0
        self.train = TrainState(speed=settings.run.initial_speed)
        self._alarm_sounding = False
        self._hr_sensor_active = False
        self._last_heart_assessment: Optional[HeartAssessment] = None
        self.next_report_seq = 1

        self._apertures = _RollingSeries(BLINK_ANALYSIS_WINDOW)
        self._diff_scores = _RollingSeries(MOTION_ANALYSIS_WINDOW)
        self._pitches = _RollingSeries(NOD_ANALYSIS_WINDOW + NOD_BASELINE_WINDOW)
        self._ppg = _RollingSeries(BPM_WINDOW)
        self._pir_events = _RollingSeries(PIR_ACTIVITY_WINDOW)
        self._previous_frame = None

        self._pending_responses = collections.deque(script.responses)
        self._pending_resets = collections.deque(script.resets)

    @property
    def is_finished(self) -> bool:
        return self.tick_index >= self.tick_count

    @property
    def alarm_sounding(self) -> bool:
        return self._alarm_sounding

    @property
    def hr_sensor_active(self) -> bool:
        return self._hr_sensor_active

    def run_to_completion(self) -> list[TimelineRow]:
        rows = []
        while not self.is_finished:
            rows.append(self.step())
        return rows

    def step(self) -> TimelineRow:
        tick = self.tick_index
        t = round(tick * self.tick_period, 6)
        chunk = self.sensor_samples_provider.get_samples_until(t)
        self._ingest(chunk)

        timeline_evidence = None
        if tick > 0 and tick % self.ticks_per_fusion_window == 0:
            timeline_evidence = self._fuse_window(t)

        actions: list[Action] = []
        try:
            actions.extend(self._perform_reset_if_necessary(t))
            scripted_response = self._consume_scripted(self._pending_responses, t)
            driver_responded = scripted_response or len(chunk.pir) > 0
            actions.extend(self._step_escalation(t, driver_responded))
        except ProtocolViolationError as e:
            raise ProtocolViolationError(f"Tick {tick} (t={t:.1f}s): {e}") from e

        # The row reports the speed reached at the end of this tick
        self.train = advance_train(
            self.train, self.tick_period, self.train.braking, self.settings.control.service_deceleration
        )
        self.tick_index += 1
        return TimelineRow(
            tick=tick,
            sim_time=t,
            condition=self.script.condition_at(t),
            evidence=timeline_evidence,
            state=self.fusion.state,
            phase=self.phase,
            actions=tuple(action.describe() for action in actions),
            speed=self.train.speed,
            braking=self.train.braking,
            alertness=self._predicted_alertness(t),
        )

    def _ingest(self, chunk: SensorSampleChunk) -> None:
        for frame in chunk.frames:
            self._apertures.extend(np.array([frame.timestamp]), np.array([estimate_aperture(frame)]))
            if self._previous_frame is not None:
                score = frame_diff_score(self._previous_frame, frame)
                self._diff_scores.extend(np.array([frame.timestamp]), np.array([score]))
            self._previous_frame = frame

        if len(chunk.accel):
            pitch = pitch_series(chunk.accel)
            self._pitches.extend(pitch.timestamps, pitch.pitches)
        self._ppg.extend(chunk.ppg.timestamps, chunk.ppg.amplitudes)
        self._pir_events.extend(chunk.pir.timestamps, np.ones(len(chunk.pir)))

    def _nod_rate(self, t: Seconds) -> float:
        timestamps, pitches = self._pitches.arrays()
        if len(timestamps) < 2 or timestamps[-1] - timestamps[0] < MINIMUM_NOD_SERIES_DURATION:
            return 0.0
        nods = detect_nods(PitchSeries(timestamps, pitches))
        recent_nods = [nod for nod in nods if t - NOD_ANALYSIS_WINDOW < nod.timestamp <= t]
        return len(recent_nods) * SECONDS_PER_MINUTE / NOD_ANALYSIS_WINDOW

    def _motion_level(self, t: Seconds) -> MotionLevel:
        timestamps, scores = self._diff_scores.arrays()
        try:
            return classify_motion(DiffScoreSeries(timestamps, scores), MOTION_ANALYSIS_WINDOW, t)
        except InsufficientDataError:
            # Without enough frames we cannot claim the driver is still
            return MotionLevel.Normal

    def _fuse_window(self, t: Seconds) -> TimelineEvidence:
        timestamps, apertures = self._apertures.arrays()
        series = ApertureSeries(timestamps, apertures)
        # The first blink window only closes once a full window of frames exists
        rate = None
        if t >= BLINK_ANALYSIS_WINDOW - TIMESTAMP_EPSILON:
            rate = blink_rate(series, BLINK_ANALYSIS_WINDOW, t)
        evidence = Evidence(
            window_end=t,
            blink_rate=rate,
            closed_fraction=closed_fraction(series, BLINK_ANALYSIS_WINDOW, t),
            nod_rate=self._nod_rate(t),
            motion=self._motion_level(t),
            pir_active=pir_active(PirTrace(self._pir_events.arrays()[0]), t, PIR_ACTIVITY_WINDOW),
        )
        _logger.debug(f"Evidence at t={t:.1f}s: {evidence}")
        self.fusion, candidate = self.fusion.observe(evidence, self.settings.fusion)
        return TimelineEvidence(
            blink_rate=evidence.blink_rate,
            closed_fraction=evidence.closed_fraction,
            nod_rate=evidence.nod_rate,
            motion=evidence.motion,
            pir_active=evidence.pir_active,
            candidate=candidate,
        )

    @staticmethod
    def _consume_scripted(pending: collections.deque, t: Seconds) -> bool:
        """Pops every scripted instant at or before t, and reports whether there was one."""
        occurred = False
        while pending and pending[0] <= t + TIMESTAMP_EPSILON:
            pending.popleft()
            occurred = True
        return occurred

    def _enter_phase(self, phase: EscalationPhase, t: Seconds) -> None:
        if phase != self.phase:
            _logger.info(f"Escalation {self.phase.name} -> {phase.name} at t={t:.1f}s")
            self.phase = phase
            self._phase_entry_tick = self.tick_index

    def _perform_reset_if_necessary(self, t: Seconds) -> list[Action]:
        if not self._consume_scripted(self._pending_resets, t):
            return []
        if self.phase != EscalationPhase.Reported:
            _logger.warning(f"Ignoring scripted reset at t={t:.1f}s: escalation is {self.phase.name}, not Reported")
            return []
        phase, actions = reset(self.phase)
        self._enter_phase(phase, t)
        self.fusion = FusionFsm()
        self._dispatch_actions(actions, t)
        return actions

    def _elapsed_in_phase(self) -> Seconds:
        return round((self.tick_index - self._phase_entry_tick) * self.tick_period, 9)

    def _step_escalation(self, t: Seconds, driver_responded: bool) -> list[Action]:
        control = self.settings.control
        emitted: list[Action] = []
        while True:
            elapsed = self._elapsed_in_phase()
            vitality = None
            if self.phase == EscalationPhase.HrCheck and elapsed >= control.hr_check_duration:
                self._last_heart_assessment = self._assess_heart(t)
                vitality = self._last_heart_assessment.vitality
            next_phase, actions = step(self.phase, self.fusion.state, driver_responded, vitality, elapsed, control)
            self._enter_phase(next_phase, t)
            self._dispatch_actions(actions, t)
            emitted.extend(actions)
            if not self.phase.is_transient:
                return emitted

    def _assess_heart(self, t: Seconds) -> HeartAssessment:
        if not self._hr_sensor_active:
            raise ProtocolViolationError("The heart was assessed before the heart-rate sensor was activated")
        timestamps, amplitudes = self._ppg.arrays()
        assessment = assess(PpgTrace(timestamps, amplitudes), t, self.settings.control.hr_check_duration)
        _logger.info(
            f"Heart check at t={t:.1f}s: {assessment.vitality.name}"
            + ("" if assessment.bpm is None else f" ({assessment.bpm:.1f} bpm)")
        )
        return assessment

    def _dispatch_actions(self, actions: list[Action], t: Seconds) -> None:
        action_type_to_callback: dict[Type[Action], Callable[[Any, Seconds], None]] = {
            SoundAlarm: self._handle_sound_alarm,
            StopAlarm: self._handle_stop_alarm,
            ApplyBrake: self._handle_apply_brake,
            ReleaseBrake: self._handle_release_brake,
            ActivateHrSensor: self._handle_activate_hr_sensor,
            SendReport: self._handle_send_report,
        }
        for action in actions:
            action_type = type(action)
            if action_type not in action_type_to_callback:
                raise UnknownEventError(action_type)
            action_type_to_callback[action_type](action, t)

    def _handle_sound_alarm(self, action: SoundAlarm, t: Seconds) -> None:
        if self._alarm_sounding:
            raise ProtocolViolationError("The alarm was sounded again before it was silenced")
        _logger.info(f"Sounding the cab alarm at t={t:.1f}s (driver {self.fusion.state.name})")
        self._alarm_sounding = True

    def _handle_stop_alarm(self, action: StopAlarm, t: Seconds) -> None:
        _logger.info(f"Silencing the cab alarm at t={t:.1f}s")
        self._alarm_sounding = False

    def _handle_apply_brake(self, action: ApplyBrake, t: Seconds) -> None:
        _logger.info(f"No response, braking at {action.deceleration}m/s^2 from {self.train.speed:.1f}km/h")
        self.train = TrainState(speed=self.train.speed, braking=True)

    def _handle_release_brake(self, action: ReleaseBrake, t: Seconds) -> None:
        _logger.info(f"Releasing the brake at t={t:.1f}s")
        self.train = TrainState(speed=self.train.speed, braking=False)
        self._hr_sensor_active = False

    def _handle_activate_hr_sensor(self, action: ActivateHrSensor, t: Seconds) -> None:
        if self._hr_sensor_active:
            raise ProtocolViolationError("The heart-rate sensor is already active")
        _logger.info(f"Activating the heart-rate sensor at t={t:.1f}s")
        self._hr_sensor_active = True

    def _handle_send_report(self, action: SendReport, t: Seconds) -> None:
        bpm = UNKNOWN_BPM
        if action.kind == ReportKind.VitalityReport:
            assessment = self._last_heart_assessment
            if assessment is None:
                raise ProtocolViolationError("A vitality report was requested before the heart was assessed")
            if assessment.bpm is not None:
                bpm = int(round(assessment.bpm))
            # The only way a driver becomes Incapacitated
            self.fusion = self.fusion.latched(action.driver_state)

        message = StatusMessage(
            seq=self.next_report_seq,
            timestamp=self.settings.run.start_time + int(math.floor(t)),
            state_code=STATE_CODES[action.driver_state],
            hr_code=HR_CODES[action.vitality],
            bpm=bpm,
            speed=int(round(self.train.speed * 10)),
        )
        self.next_report_seq += 1
        _logger.info(f"Sending {action.kind.name} #{message.seq} to the control room")
        self.control_room.receive(encode(message))

    def _predicted_alertness(self, t: Seconds) -> Optional[AlertnessUnits]:
        schedule_file = self.settings.schedule
        if schedule_file is None:
            return None
        clock_hour = schedule_file.sim_start_hour + t / SECONDS_PER_HOUR
        schedule = schedule_file.schedule
        if not schedule.horizon_start <= clock_hour <= schedule.horizon_end:
            return None
        return predicted_alertness(schedule, clock_hour, schedule_file.params, schedule_file.s_initial).value


class _IntervalManifest(BaseModel):
    start: float
    end: float
    kind: str


class _ScheduleManifest(BaseModel):
    intervals: list[_IntervalManifest]
    params: dict[str, float]
    s_initial: Optional[float]
    sim_start_hour: float


class RunManifest(BaseModel):
    """Everything besides the sensor streams that a replay needs to reproduce a run."""

    tick: float
    initial_speed: float
    start_time: int
    fusion: dict[str, float]
    control: dict[str, Any]
    schedule: Optional[_ScheduleManifest] = None

    @classmethod
    def from_settings(cls, settings: SimulationSettings) -> "RunManifest":
        control = asdict(settings.control)
        control["trigger_severity"] = settings.control.trigger_severity.name
        schedule = None
        if settings.schedule is not None:
            schedule = _ScheduleManifest(
                intervals=[
                    _IntervalManifest(start=i.start, end=i.end, kind=i.kind.name)
                    for i in settings.schedule.schedule.intervals
                ],
                params=asdict(settings.schedule.params),
                s_initial=settings.schedule.s_initial,
                sim_start_hour=settings.schedule.sim_start_hour,
            )
        return cls(
            tick=settings.run.tick,
            initial_speed=settings.run.initial_speed,
            start_time=settings.run.start_time,
            fusion=asdict(settings.fusion),
            control=control,
            schedule=schedule,
        )

    def to_settings(self) -> SimulationSettings:
        schedule = None
        if self.schedule is not None:
            schedule = ScheduleFile(
                schedule=SleepWakeSchedule(
                    tuple(SleepWakeInterval(i.start, i.end, SleepWakeKind[i.kind]) for i in self.schedule.intervals)
                ),
                params=AlertnessParams(**self.schedule.params),
                s_initial=self.schedule.s_initial,
                sim_start_hour=self.schedule.sim_start_hour,
            )
        fusion = dict(self.fusion)
        for count_field in ("dwell_up", "dwell_down"):
            fusion[count_field] = int(fusion[count_field])
        return SimulationSettings(
            run=RunSettings(tick=self.tick, initial_speed=self.initial_speed, start_time=self.start_time),
            fusion=FusionConfig(**fusion),
            control=control_config_with_overrides(self.control),
            schedule=schedule,
        )


def _settings_for_run(config: RunConfig) -> tuple[ScenarioScript, SimulationSettings]:
    scenario = load_scenario_file(config.scenario_path)
    run_settings = scenario.run if config.tick is None else replace(scenario.run, tick=config.tick)
    try:
        fusion = replace(scenario.fusion, **config.fusion_overrides)
        control = control_config_with_overrides({**asdict(scenario.control), **config.control_overrides})
    except TypeError as e:
        raise ConfigError(f"Unknown configuration override: {e}") from e
    schedule = None if config.schedule_path is None else load_schedule_file(config.schedule_path)
    settings = SimulationSettings(run=run_settings, fusion=fusion, control=control, schedule=schedule)
    validate_tick(run_settings.tick, scenario.script.sample_rates, fusion.window)
    return scenario.script, settings


def _execute(
    provider: SensorSampleProvider,
    script: ScenarioScript,
    seed: int,
    settings: SimulationSettings,
    out_dir: Path,
    plot: bool,
) -> TimelineReport:
    out_dir.mkdir(parents=True, exist_ok=True)
    log_path = out_dir / TELEMETRY_LOG_FILE_NAME
    ack_path = out_dir / ACK_LOG_FILE_NAME
    # The control room appends, so start every run from empty logs
    log_path.unlink(missing_ok=True)
    ack_path.unlink(missing_ok=True)

    with ControlRoomReceiver(log_path, ack_path) as control_room:
        monitor = DriverMonitor(provider, script, settings, control_room)
        _logger.info(f"Running {monitor.tick_count} ticks of {settings.run.tick}s")
        rows = monitor.run_to_completion()

    timeline_path = out_dir / TIMELINE_FILE_NAME
    write_timeline(rows, timeline_path)
    # Metrics are computed from the rows as stored, so that `report` recomputes them exactly
    stored_rows = read_timeline(timeline_path)
    metrics = compute_metrics(stored_rows, settings.control.trigger_severity)
    header_fields = {
        "seed": str(seed),
        "ticks": str(len(stored_rows)),
        "tick": repr(settings.run.tick),
        "trigger_state": settings.control.trigger_severity.name,
    }
    write_summary(out_dir / SUMMARY_FILE_NAME, header_fields, metrics)
    _logger.info(f"Run complete: {metrics}")

    if plot:
        # Imported here so that runs without plots never touch matplotlib
        from vigil.timeline_visualizer import TimelineVisualizer

        TimelineVisualizer(stored_rows).render(out_dir / PLOT_FILE_NAME)
    return TimelineReport(rows=stored_rows, metrics=metrics)


def run(config: RunConfig) -> TimelineReport:
    script, settings = _settings_for_run(config)
    bundle = synthesize(script, config.seed)
    if config.record_bundle:
        bundle_directory = config.out_dir / BUNDLE_DIRECTORY_NAME
        write_bundle(bundle, bundle_directory)
        manifest = RunManifest.from_settings(settings)
        (bundle_directory / RUN_MANIFEST_FILE_NAME).write_text(manifest.model_dump_json(indent=2) + "\n")
    provider = SensorSampleProviderBackedByBundle(bundle)
    return _execute(provider, script, config.seed, settings, config.out_dir, config.plot)


def replay(bundle_path: Path, out_dir: Path, plot: bool = False) -> TimelineReport:
    try:
        manifest = RunManifest.model_validate_json((bundle_path / RUN_MANIFEST_FILE_NAME).read_text())
    except OSError as e:
        raise BundleFormatError(f"Cannot read the run manifest in {bundle_path.as_posix()}: {e}") from e
    except ValidationError as e:
        raise BundleFormatError(f"Malformed run manifest: {e}") from e
    try:
        settings = manifest.to_settings()
    except (ConfigError, KeyError, TypeError) as e:
        raise BundleFormatError(f"Run manifest holds an invalid configuration: {e}") from e

    provider = SensorSampleProviderBackedByDirectory(bundle_path)
    bundle = provider.bundle
    validate_tick(settings.run.tick, bundle.script.sample_rates, settings.fusion.window)
    return _execute(provider, bundle.script, bundle.seed, settings, out_dir, plot)


@dataclass(frozen=True)
class ReportOutcome:
    text: str
    # Summary keys whose stored value disagrees with the recomputation
    mismatches: list[str]

    @property
    def is_consistent(self) -> bool:
        return not self.mismatches


def report(timeline_path: Path) -> ReportOutcome:
    rows = read_timeline(timeline_path)
    summary = read_summary(timeline_path.parent / SUMMARY_FILE_NAME)
    trigger_name = summary.get("trigger_state")
    if trigger_name not in DriverState.__members__:
        raise TimelineFormatError(f"Summary names an unknown trigger state: {trigger_name!r}")
    recomputed = compute_metrics(rows, DriverState[trigger_name]).as_summary_fields()

    lines = []
    mismatches = []
    for key, value in recomputed.items():
        stored = summary.get(key)
        if stored == value:
            lines.append(f"{key}: {value}")
        else:
            mismatches.append(key)
            lines.append(f"{key}: {value} (summary says {stored})")
    for key in mismatches:
        _logger.warning(f"Summary disagrees with the timeline on {key}")
    return ReportOutcome(text="\n".join(lines), mismatches=mismatches)


def alertness(schedule_path: Path, out_path: Path, step_minutes: float = ALERTNESS_CURVE_STEP_MINUTES) -> None:
    schedule_file = load_schedule_file(schedule_path)
    curve = alertness_curve(
        schedule_file.schedule,
        schedule_file.params,
        step_minutes * SECONDS_PER_MINUTE / SECONDS_PER_HOUR,
        schedule_file.s_initial,
    )
    with out_path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["t", "S", "C", "W", "value"])
        for score in curve:
            writer.writerow(
                [
                    f"{score.time:.6f}",
                    *(f"{v:.9f}" for v in (score.homeostatic, score.circadian, score.inertia, score.value)),
                ]
            )
    _logger.info(f"Wrote {len(curve)} alertness points to {out_path.as_posix()}")
