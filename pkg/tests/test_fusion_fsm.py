import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vigil.errors import ConfigError
from vigil.fusion_fsm import DriverState, Evidence, FusionConfig, FusionFsm, candidate_state, update
from vigil.vision_detect import MotionLevel

_EVIDENCE_STATES = [DriverState.Awake, DriverState.Drowsy, DriverState.Sleepy, DriverState.Asleep]


def _evidence(
    closed_fraction: float = 0.0,
    blink_rate: float = 17.0,
    nod_rate: float = 0.0,
    motion: MotionLevel = MotionLevel.Normal,
    pir_active: bool = True,
) -> Evidence:
    return Evidence(
        window_end=10.0,
        blink_rate=blink_rate,
        closed_fraction=closed_fraction,
        nod_rate=nod_rate,
        motion=motion,
        pir_active=pir_active,
    )


def _reference_update(current: DriverState, history: tuple[DriverState, ...], cfg: FusionConfig) -> DriverState:
    """Dwell rule written out longhand."""
    if current == DriverState.Incapacitated:
        return current
    if len(history) >= cfg.dwell_up:
        tail = history[len(history) - cfg.dwell_up :]
        if min(c.value for c in tail) > current.value:
            return DriverState(min(current.value + 1, 3))
    if len(history) >= cfg.dwell_down:
        tail = history[len(history) - cfg.dwell_down :]
        if max(c.value for c in tail) < current.value:
            return DriverState(current.value - 1)
    return current


def test_asleep_conjunction():
    e = _evidence(closed_fraction=0.95, nod_rate=0.0, motion=MotionLevel.Still, pir_active=False)
    assert candidate_state(e, FusionConfig()) == DriverState.Asleep


def test_asleep_needs_stillness():
    e = _evidence(closed_fraction=0.95, motion=MotionLevel.Normal, pir_active=False)
    assert candidate_state(e, FusionConfig()) != DriverState.Asleep


def test_asleep_needs_quiet_pir():
    e = _evidence(closed_fraction=0.95, motion=MotionLevel.Still, pir_active=True)
    assert candidate_state(e, FusionConfig()) != DriverState.Asleep


def test_sleepy_conjunction():
    e = _evidence(closed_fraction=0.65, nod_rate=8.0)
    assert candidate_state(e, FusionConfig()) == DriverState.Sleepy


def test_drowsy_conjunction():
    assert candidate_state(_evidence(closed_fraction=0.35, blink_rate=6.0), FusionConfig()) == DriverState.Drowsy


def test_drowsy_needs_a_blink_rate():
    e = Evidence(10.0, None, 0.35, 0.0, MotionLevel.Normal, True)
    assert candidate_state(e, FusionConfig()) == DriverState.Awake


def test_alert_evidence_is_awake():
    assert candidate_state(_evidence(), FusionConfig()) == DriverState.Awake


def test_one_step_at_a_time():
    cfg = FusionConfig()
    history = (DriverState.Asleep,) * 3
    assert update(DriverState.Awake, history, cfg) == DriverState.Drowsy


def test_dwell_down():
    cfg = FusionConfig(dwell_down=2)
    assert update(DriverState.Drowsy, (DriverState.Awake, DriverState.Awake), cfg) == DriverState.Awake


def test_incapacitated_is_never_left_by_evidence():
    cfg = FusionConfig()
    assert update(DriverState.Incapacitated, (DriverState.Awake,) * 3, cfg) == DriverState.Incapacitated


def test_evidence_never_reaches_incapacitated():
    cfg = FusionConfig()
    assert update(DriverState.Asleep, (DriverState.Asleep,) * 3, cfg) == DriverState.Asleep


@pytest.mark.parametrize("dwell_up, dwell_down", [(1, 1), (2, 2), (3, 2), (2, 3)])
def test_update_matches_reference_exhaustively(dwell_up: int, dwell_down: int):
    cfg = FusionConfig(dwell_up=dwell_up, dwell_down=dwell_down)
    for current in DriverState:
        for length in range(cfg.history_length + 1):
            for history in itertools.product(_EVIDENCE_STATES, repeat=length):
                assert update(current, history, cfg) == _reference_update(current, history, cfg), (current, history)


def _walk_every_sequence(fsm: FusionFsm, candidates: tuple[DriverState, ...], remaining: int, cfg: FusionConfig) -> int:
    """Feeds every candidate sequence of up to `remaining` windows, checking each step against the longhand rule."""
    walked = 1
    if remaining == 0:
        return walked
    for candidate in DriverState:
        history = candidates + (candidate,)
        expected = _reference_update(fsm.state, history, cfg)
        after = fsm.advanced(candidate, cfg)
        assert after.state == expected, (fsm.state, history)
        assert abs(after.state.severity - fsm.state.severity) <= 1
        if fsm.state != DriverState.Incapacitated:
            assert after.state != DriverState.Incapacitated
        walked += _walk_every_sequence(after, history, remaining - 1, cfg)
    return walked


@pytest.mark.fuzz
@pytest.mark.parametrize("dwell_up, dwell_down", [(3, 2), (2, 2), (1, 1)])
@pytest.mark.parametrize("start", list(DriverState))
def test_every_candidate_sequence_up_to_six_windows(start: DriverState, dwell_up: int, dwell_down: int):
    cfg = FusionConfig(dwell_up=dwell_up, dwell_down=dwell_down)
    walked = _walk_every_sequence(FusionFsm(state=start), (), 6, cfg)
    assert walked == sum(len(DriverState) ** n for n in range(7))


@given(
    steady=st.sampled_from(_EVIDENCE_STATES),
    spike=st.sampled_from(list(DriverState)),
    lead=st.integers(min_value=0, max_value=5),
    tail=st.integers(min_value=0, max_value=5),
)
@settings(max_examples=300, deadline=None)
def test_a_single_window_spike_never_moves_the_state(steady: DriverState, spike: DriverState, lead: int, tail: int):
    cfg = FusionConfig()
    fsm = FusionFsm(state=steady, history=(steady,) * cfg.history_length)
    for candidate in [steady] * lead + [spike] + [steady] * tail:
        fsm = fsm.advanced(candidate, cfg)
        assert fsm.state == steady


def test_awake_is_reached_within_severity_times_dwell_down():
    cfg = FusionConfig()
    fsm = FusionFsm(state=DriverState.Asleep)
    for _ in range(DriverState.Asleep.severity * cfg.dwell_down):
        fsm, candidate = fsm.observe(_evidence(), cfg)
        assert candidate == DriverState.Awake
    assert fsm.state == DriverState.Awake


def test_observe_keeps_a_bounded_history():
    cfg = FusionConfig()
    fsm = FusionFsm()
    for _ in range(10):
        fsm, _ = fsm.observe(_evidence(), cfg)
    assert len(fsm.history) == cfg.history_length


def test_latched_state_survives_awake_evidence():
    cfg = FusionConfig()
    fsm = FusionFsm().latched(DriverState.Incapacitated)
    for _ in range(10):
        fsm, _ = fsm.observe(_evidence(), cfg)
    assert fsm.state == DriverState.Incapacitated


@pytest.mark.parametrize(
    "overrides",
    [{"window": 0.0}, {"dwell_up": 0}, {"drowsy_closed_fraction": 0.7, "sleepy_closed_fraction": 0.6}],
)
def test_invalid_config_is_rejected(overrides: dict):
    with pytest.raises(ConfigError):
        FusionConfig(**overrides)
