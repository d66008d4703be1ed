"""Fuses per-window evidence into a driver state.

The fused state moves at most one severity level per window, and only after `dwell_up` (or `dwell_down`) consecutive
candidates all sit above (or below) it. Incapacitated is never inferred from evidence. It is latched only after a
vitality check finds no pulse, and is cleared only by a manual reset.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from vigil.config import (
    ASLEEP_CLOSED_FRACTION,
    DROWSY_CLOSED_FRACTION,
    DROWSY_MAXIMUM_BLINK_RATE,
    FUSION_DWELL_DOWN_WINDOWS,
    FUSION_DWELL_UP_WINDOWS,
    FUSION_WINDOW,
    SLEEPY_CLOSED_FRACTION,
    SLEEPY_MINIMUM_NOD_RATE,
)
from vigil.errors import ConfigError
from vigil.units import BlinksPerMinute, Fraction, NodsPerMinute, Seconds
from vigil.vision_detect import MotionLevel

_logger = logging.getLogger(__name__)


class DriverState(Enum):
    Awake = 0
    Drowsy = 1
    Sleepy = 2
    Asleep = 3
    Incapacitated = 4

    @property
    def severity(self) -> int:
        return self.value

    @classmethod
    def from_severity(cls, severity: int) -> "DriverState":
        return cls(severity)


@dataclass(frozen=True)
class Evidence:
    window_end: Seconds
    # None until a full blink analysis window has elapsed
    blink_rate: Optional[BlinksPerMinute]
    closed_fraction: Fraction
    nod_rate: NodsPerMinute
    motion: MotionLevel
    pir_active: bool


@dataclass(frozen=True)
class FusionConfig:
    window: Seconds = FUSION_WINDOW
    dwell_up: int = FUSION_DWELL_UP_WINDOWS
    dwell_down: int = FUSION_DWELL_DOWN_WINDOWS
    drowsy_closed_fraction: Fraction = DROWSY_CLOSED_FRACTION
    sleepy_closed_fraction: Fraction = SLEEPY_CLOSED_FRACTION
    asleep_closed_fraction: Fraction = ASLEEP_CLOSED_FRACTION
    drowsy_maximum_blink_rate: BlinksPerMinute = DROWSY_MAXIMUM_BLINK_RATE
    sleepy_minimum_nod_rate: NodsPerMinute = SLEEPY_MINIMUM_NOD_RATE

    def __post_init__(self) -> None:
        if self.window <= 0:
            raise ConfigError(f"Fusion window must be positive, got {self.window}")
        if self.dwell_up < 1 or self.dwell_down < 1:
            raise ConfigError(f"Dwell counts must be at least 1, got {self.dwell_up}/{self.dwell_down}")
        if not 0 <= self.drowsy_closed_fraction <= self.sleepy_closed_fraction <= self.asleep_closed_fraction <= 1:
            raise ConfigError("Closed-fraction thresholds must increase with severity and lie in [0, 1]")

    @property
    def history_length(self) -> int:
        return max(self.dwell_up, self.dwell_down)


def candidate_state(e: Evidence, cfg: FusionConfig) -> DriverState:
    # Most severe satisfied conjunction wins
    if e.closed_fraction >= cfg.asleep_closed_fraction and e.motion == MotionLevel.Still and not e.pir_active:
        return DriverState.Asleep
    if e.closed_fraction >= cfg.sleepy_closed_fraction and e.nod_rate >= cfg.sleepy_minimum_nod_rate:
        return DriverState.Sleepy
    if (
        e.closed_fraction >= cfg.drowsy_closed_fraction
        and e.blink_rate is not None
        and e.blink_rate <= cfg.drowsy_maximum_blink_rate
    ):
        return DriverState.Drowsy
    return DriverState.Awake


def update(current: DriverState, history: Sequence[DriverState], cfg: FusionConfig) -> DriverState:
    if current == DriverState.Incapacitated:
        return current

    recent_up = history[-cfg.dwell_up :]
    if len(recent_up) == cfg.dwell_up and all(c.severity > current.severity for c in recent_up):
        # Evidence alone never escalates past Asleep
        return DriverState.from_severity(min(current.severity + 1, DriverState.Asleep.severity))

    recent_down = history[-cfg.dwell_down :]
    if len(recent_down) == cfg.dwell_down and all(c.severity < current.severity for c in recent_down):
        return DriverState.from_severity(current.severity - 1)

    return current


@dataclass(frozen=True)
class FusionFsm:
    state: DriverState = DriverState.Awake
    history: tuple[DriverState, ...] = ()

    def advanced(self, candidate: DriverState, cfg: FusionConfig) -> "FusionFsm":
        history = (*self.history, candidate)[-cfg.history_length :]
        return FusionFsm(state=update(self.state, history, cfg), history=history)

    def observe(self, evidence: Evidence, cfg: FusionConfig) -> tuple["FusionFsm", DriverState]:
        candidate = candidate_state(evidence, cfg)
        fsm = self.advanced(candidate, cfg)
        if fsm.state != self.state:
            _logger.info(
                f"Driver state {self.state.name} -> {fsm.state.name} at t={evidence.window_end:.1f}s "
                f"(candidate {candidate.name})"
            )
        return fsm, candidate

    def latched(self, state: DriverState) -> "FusionFsm":
        if state != self.state:
            _logger.info(f"Driver state latched {self.state.name} -> {state.name}")
        return FusionFsm(state=state, history=self.history)
