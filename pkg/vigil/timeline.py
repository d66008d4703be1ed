"""Per-tick timeline rows, their CSV encoding, and the summary metrics derived from them.

Metrics are always computed from rows as they read back from the CSV, so `report` reproduces a run's summary exactly.
"""
import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from vigil.config import FALSE_ALARM_LOOKBACK
from vigil.constants import TIMESTAMP_EPSILON
from vigil.errors import FormatError
from vigil.escalation_control import ApplyBrake, EscalationPhase, SendReport, SoundAlarm
from vigil.fusion_fsm import DriverState
from vigil.scenario import DriverCondition
from vigil.units import AlertnessUnits, BlinksPerMinute, Fraction, KilometersPerHour, NodsPerMinute, Seconds
from vigil.vision_detect import MotionLevel

_logger = logging.getLogger(__name__)

TIMELINE_COLUMNS = (
    "tick",
    "sim_time",
    "condition",
    "blink_rate",
    "closed_fraction",
    "nod_rate",
    "motion",
    "pir_active",
    "candidate",
    "state",
    "phase",
    "actions",
    "speed",
    "braking",
    "alertness",
)
_UNKNOWN = "NA"
_ACTION_SEPARATOR = ";"

# The driver state each scripted condition should eventually be fused into
CONDITION_STATES: dict[DriverCondition, DriverState] = {
    DriverCondition.Awake: DriverState.Awake,
    DriverCondition.Drowsy: DriverState.Drowsy,
    DriverCondition.Sleepy: DriverState.Sleepy,
    DriverCondition.Asleep: DriverState.Asleep,
    DriverCondition.NoPulse: DriverState.Asleep,
}


class TimelineFormatError(FormatError):
    pass


@dataclass(frozen=True)
class TimelineEvidence:
    blink_rate: Optional[BlinksPerMinute]
    closed_fraction: Fraction
    nod_rate: NodsPerMinute
    motion: MotionLevel
    pir_active: bool
    candidate: DriverState


@dataclass(frozen=True)
class TimelineRow:
    tick: int
    sim_time: Seconds
    condition: DriverCondition
    # Only present on ticks where a fusion window closed
    evidence: Optional[TimelineEvidence]
    state: DriverState
    phase: EscalationPhase
    actions: tuple[str, ...]
    speed: KilometersPerHour
    braking: bool
    alertness: Optional[AlertnessUnits]

    def has_action(self, action_type: type) -> bool:
        name = action_type.__name__
        return any(a == name or a.startswith(f"{name}(") for a in self.actions)

    def count_actions(self, action_type: type) -> int:
        name = action_type.__name__
        return sum(1 for a in self.actions if a == name or a.startswith(f"{name}("))


@dataclass(frozen=True)
class TimelineMetrics:
    # Worst onset-to-detection delay across the scripted fatigue onsets that were detected
    detection_latency: Optional[Seconds]
    missed_detections: int
    false_alarm_count: int
    alarms_sounded: int
    time_to_stop: Optional[Seconds]
    reports_sent: int
    final_speed: KilometersPerHour

    def as_summary_fields(self) -> dict[str, str]:
        return {
            "detection_latency": _format_optional(self.detection_latency, "{:.3f}"),
            "missed_detections": str(self.missed_detections),
            "false_alarm_count": str(self.false_alarm_count),
            "alarms_sounded": str(self.alarms_sounded),
            "time_to_stop": _format_optional(self.time_to_stop, "{:.3f}"),
            "reports_sent": str(self.reports_sent),
            "final_speed": f"{self.final_speed:.1f}",
        }


@dataclass(frozen=True)
class TimelineReport:
    rows: list[TimelineRow]
    metrics: TimelineMetrics


def _format_optional(value: Optional[float], fmt: str) -> str:
    return _UNKNOWN if value is None else fmt.format(value)


def _format_row(row: TimelineRow) -> list[str]:
    evidence = row.evidence
    if evidence is None:
        evidence_fields = ["", "", "", "", "", ""]
    else:
        evidence_fields = [
            _format_optional(evidence.blink_rate, "{:.3f}"),
            f"{evidence.closed_fraction:.4f}",
            f"{evidence.nod_rate:.3f}",
            evidence.motion.name,
            "1" if evidence.pir_active else "0",
            evidence.candidate.name,
        ]
    return [
        str(row.tick),
        f"{row.sim_time:.6f}",
        row.condition.name,
        *evidence_fields,
        row.state.name,
        row.phase.name,
        _ACTION_SEPARATOR.join(row.actions),
        f"{row.speed:.4f}",
        "1" if row.braking else "0",
        "" if row.alertness is None else f"{row.alertness:.6f}",
    ]


def write_timeline(rows: Sequence[TimelineRow], path: Path) -> None:
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TIMELINE_COLUMNS)
        writer.writerows(_format_row(row) for row in rows)


def _parse_enum(enum_type: type, text: str, line_number: int):  # type: ignore
    try:
        return enum_type[text]
    except KeyError:
        raise TimelineFormatError(f"line {line_number}: unknown {enum_type.__name__} {text!r}")


def _parse_flag(text: str, line_number: int) -> bool:
    if text not in ("0", "1"):
        raise TimelineFormatError(f"line {line_number}: expected 0 or 1, got {text!r}")
    return text == "1"


def _parse_row(fields: list[str], line_number: int) -> TimelineRow:
    (
        tick,
        sim_time,
        condition,
        blink_rate,
        closed_fraction,
        nod_rate,
        motion,
        pir_active,
        candidate,
        state,
        phase,
        actions,
        speed,
        braking,
        alertness,
    ) = fields
    try:
        evidence = None
        if candidate:
            evidence = TimelineEvidence(
                blink_rate=None if blink_rate == _UNKNOWN else float(blink_rate),
                closed_fraction=float(closed_fraction),
                nod_rate=float(nod_rate),
                motion=_parse_enum(MotionLevel, motion, line_number),
                pir_active=_parse_flag(pir_active, line_number),
                candidate=_parse_enum(DriverState, candidate, line_number),
            )
        return TimelineRow(
            tick=int(tick),
            sim_time=float(sim_time),
            condition=_parse_enum(DriverCondition, condition, line_number),
            evidence=evidence,
            state=_parse_enum(DriverState, state, line_number),
            phase=_parse_enum(EscalationPhase, phase, line_number),
            actions=tuple(actions.split(_ACTION_SEPARATOR)) if actions else (),
            speed=float(speed),
            braking=_parse_flag(braking, line_number),
            alertness=float(alertness) if alertness else None,
        )
    except ValueError as e:
        raise TimelineFormatError(f"line {line_number}: {e}") from e


def read_timeline(path: Path) -> list[TimelineRow]:
    try:
        text = path.read_text()
    except OSError as e:
        raise TimelineFormatError(f"Cannot read timeline {path.as_posix()}: {e}") from e
    try:
        records = list(csv.reader(text.splitlines()))
    except csv.Error as e:
        raise TimelineFormatError(f"{path.name}: {e}") from e
    if not records:
        raise TimelineFormatError(f"{path.name} is empty")
    if tuple(records[0]) != TIMELINE_COLUMNS:
        raise TimelineFormatError(f"{path.name} has an unexpected header")
    if len(records) == 1:
        raise TimelineFormatError(f"{path.name} has no rows")

    rows = []
    for line_number, fields in enumerate(records[1:], start=2):
        if len(fields) != len(TIMELINE_COLUMNS):
            raise TimelineFormatError(f"line {line_number}: expected {len(TIMELINE_COLUMNS)} fields, got {len(fields)}")
        row = _parse_row(fields, line_number)
        if rows and row.tick <= rows[-1].tick:
            raise TimelineFormatError(f"line {line_number}: ticks are not strictly increasing")
        rows.append(row)
    return rows


def _detection_latencies(rows: Sequence[TimelineRow], trigger: DriverState) -> tuple[list[Seconds], int]:
    """Latency from each non-Awake segment's onset until it is detected, and the count of segments never detected.

    A segment counts as detected once the fused state reaches its own condition's state or the trigger, whichever is
    less severe. A Drowsy segment under a Sleepy trigger is detected on reaching Drowsy, while an Asleep segment under
    a Drowsy trigger is detected on reaching Drowsy.
    """
    latencies = []
    missed = 0
    index = 0
    while index < len(rows):
        condition = rows[index].condition
        end = index
        while end < len(rows) and rows[end].condition == condition:
            end += 1
        if condition != DriverCondition.Awake:
            target = min(CONDITION_STATES[condition].severity, trigger.severity)
            onset_time = rows[index].sim_time
            detected_at = next((r.sim_time for r in rows[index:end] if r.state.severity >= target), None)
            if detected_at is None:
                missed += 1
            else:
                latencies.append(round(detected_at - onset_time, 6))
        index = end
    return latencies, missed


def _false_alarm_count(rows: Sequence[TimelineRow], trigger: DriverState) -> int:
    false_alarms = 0
    for index, row in enumerate(rows):
        if not row.has_action(SoundAlarm):
            continue
        lookback_start = row.sim_time - FALSE_ALARM_LOOKBACK - TIMESTAMP_EPSILON
        justified = False
        for earlier in reversed(rows[: index + 1]):
            if earlier.sim_time < lookback_start:
                break
            if CONDITION_STATES[earlier.condition].severity >= trigger.severity:
                justified = True
                break
        if not justified:
            false_alarms += 1
    return false_alarms


def _time_to_stop(rows: Sequence[TimelineRow]) -> Optional[Seconds]:
    brake_index = next((i for i, row in enumerate(rows) if row.has_action(ApplyBrake)), None)
    if brake_index is None:
        return None
    brake_time = rows[brake_index].sim_time
    stopped_at = next((row.sim_time for row in rows[brake_index:] if row.speed == 0), None)
    if stopped_at is None:
        return None
    return round(stopped_at - brake_time, 6)


def compute_metrics(rows: Sequence[TimelineRow], trigger: DriverState) -> TimelineMetrics:
    if not rows:
        raise TimelineFormatError("Cannot compute metrics without rows")
    latencies, missed = _detection_latencies(rows, trigger)
    return TimelineMetrics(
        detection_latency=max(latencies) if latencies else None,
        missed_detections=missed,
        false_alarm_count=_false_alarm_count(rows, trigger),
        alarms_sounded=sum(row.count_actions(SoundAlarm) for row in rows),
        time_to_stop=_time_to_stop(rows),
        reports_sent=sum(row.count_actions(SendReport) for row in rows),
        final_speed=rows[-1].speed,
    )


def write_summary(path: Path, header_fields: dict[str, str], metrics: TimelineMetrics) -> None:
    entries = {**header_fields, **metrics.as_summary_fields()}
    path.write_text("".join(f"{key}: {value}\n" for key, value in entries.items()))


def read_summary(path: Path) -> dict[str, str]:
    try:
        text = path.read_text()
    except OSError as e:
        raise TimelineFormatError(f"Cannot read summary {path.as_posix()}: {e}") from e
    entries = {}
    for line_number, line in enumerate(text.splitlines(), start=1):
        key, separator, value = line.partition(": ")
        if not separator or not key:
            raise TimelineFormatError(f"{path.name}:{line_number}: expected 'key: value'")
        entries[key] = value
    return entries
