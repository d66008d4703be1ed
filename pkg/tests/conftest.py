from pathlib import Path

import pytest

from tests.support import ScenarioWriter, scenario_toml


@pytest.fixture
def write_scenario(tmp_path: Path) -> ScenarioWriter:
    def _write(segments: list[tuple[float, str]], extra: str = "", name: str = "scenario.toml") -> Path:
        path = tmp_path / name
        path.write_text(scenario_toml(segments, extra))
        return path

    return _write
