import logging
from enum import Enum, auto
from pathlib import Path
from typing import Sequence

import matplotlib

# Rendering happens off-screen; a run never presents a window
matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.axes import Axes  # noqa: E402

from vigil.escalation_control import EscalationPhase, SoundAlarm  # noqa: E402
from vigil.fusion_fsm import DriverState  # noqa: E402
from vigil.timeline import CONDITION_STATES, TimelineRow  # noqa: E402

_logger = logging.getLogger(__name__)


class GraphTypeEnum(Enum):
    DRIVER_STATE = auto()
    ESCALATION_PHASE = auto()
    CLOSED_FRACTION = auto()
    TRAIN_SPEED = auto()
    ALERTNESS = auto()

    @property
    def presentation_name(self) -> str:
        return {
            self.DRIVER_STATE: "Driver State",
            self.ESCALATION_PHASE: "Escalation Phase",
            self.CLOSED_FRACTION: "Eyelid Closed Fraction",
            self.TRAIN_SPEED: "Train Speed (km/h)",
            self.ALERTNESS: "Predicted Alertness",
        }[self]


class TimelineVisualizer:
    def __init__(self, rows: Sequence[TimelineRow]) -> None:
        self.rows = rows
        self.has_alertness = any(row.alertness is not None for row in rows)
        self.graph_types = [t for t in GraphTypeEnum if t != GraphTypeEnum.ALERTNESS or self.has_alertness]
        self.figure, axes = plt.subplots(nrows=len(self.graph_types), ncols=1, sharex=True, figsize=(11, 9))
        self.graph_type_to_graphs: dict[GraphTypeEnum, Axes] = dict(zip(self.graph_types, axes))
        self.figure.suptitle("Driver Monitoring Timeline", fontweight="bold")

    def graph_for_type(self, t: GraphTypeEnum) -> Axes:
        return self.graph_type_to_graphs[t]

    def _draw_driver_state(self) -> None:
        graph = self.graph_for_type(GraphTypeEnum.DRIVER_STATE)
        times = [row.sim_time for row in self.rows]
        graph.step(times, [row.state.severity for row in self.rows], where="post", label="fused")
        graph.step(
            times,
            [CONDITION_STATES[row.condition].severity for row in self.rows],
            where="post",
            linestyle="--",
            label="scripted",
        )
        graph.set_yticks([s.severity for s in DriverState], [s.name for s in DriverState])
        graph.legend(loc="upper left")

        alarm_times = [row.sim_time for row in self.rows if row.has_action(SoundAlarm)]
        for alarm_time in alarm_times:
            graph.axvline(alarm_time, color="red", alpha=0.4)

    def _draw_escalation_phase(self) -> None:
        graph = self.graph_for_type(GraphTypeEnum.ESCALATION_PHASE)
        phases = list(EscalationPhase)
        graph.step(
            [row.sim_time for row in self.rows], [phases.index(row.phase) for row in self.rows], where="post"
        )
        graph.set_yticks(range(len(phases)), [p.name for p in phases])

    def _draw_closed_fraction(self) -> None:
        graph = self.graph_for_type(GraphTypeEnum.CLOSED_FRACTION)
        evaluated = [row for row in self.rows if row.evidence is not None]
        graph.plot(
            [row.sim_time for row in evaluated],
            [row.evidence.closed_fraction for row in evaluated],  # type: ignore
        )
        graph.set_ylim(-0.05, 1.05)

    def _draw_train_speed(self) -> None:
        graph = self.graph_for_type(GraphTypeEnum.TRAIN_SPEED)
        graph.plot([row.sim_time for row in self.rows], [row.speed for row in self.rows])
        graph.set_ylim(bottom=0)

    def _draw_alertness(self) -> None:
        graph = self.graph_for_type(GraphTypeEnum.ALERTNESS)
        scored = [row for row in self.rows if row.alertness is not None]
        graph.plot([row.sim_time for row in scored], [row.alertness for row in scored])

    def render(self, path: Path) -> None:
        graph_type_to_renderer = {
            GraphTypeEnum.DRIVER_STATE: self._draw_driver_state,
            GraphTypeEnum.ESCALATION_PHASE: self._draw_escalation_phase,
            GraphTypeEnum.CLOSED_FRACTION: self._draw_closed_fraction,
            GraphTypeEnum.TRAIN_SPEED: self._draw_train_speed,
            GraphTypeEnum.ALERTNESS: self._draw_alertness,
        }
        for graph_type in self.graph_types:
            graph_type_to_renderer[graph_type]()
            self.graph_for_type(graph_type).set_title(graph_type.presentation_name)
        self.graph_for_type(self.graph_types[-1]).set_xlabel("Simulated time (s)")
        self.figure.tight_layout()
        self.figure.savefig(path, dpi=100)
        plt.close(self.figure)
        _logger.info(f"Rendered timeline plot to {path.as_posix()}")
