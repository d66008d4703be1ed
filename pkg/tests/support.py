from pathlib import Path
from typing import Callable

from vigil.scenario import DriverCondition, ScenarioScript, ScenarioSegment

# Writes a scenario TOML file from (duration, condition name) pairs plus any extra tables
ScenarioWriter = Callable[..., Path]


def scenario_toml(segments: list[tuple[float, str]], extra: str = "") -> str:
    lines = []
    for duration, condition in segments:
        lines += ["[[segment]]", f"duration = {duration!r}", f'condition = "{condition}"', ""]
    return "\n".join(lines) + extra


def script_of(*segments: tuple[float, DriverCondition]) -> ScenarioScript:
    return ScenarioScript(tuple(ScenarioSegment(duration, condition) for duration, condition in segments))
