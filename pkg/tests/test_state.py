"""Replay correctness: hand-worked plays, conservation, quarantine."""

import pytest
from hypothesis import given, settings, strategies as st

from baserisk.eventfile import Half, assemble_games, tokenize_event_file
from baserisk.playtoken import parse_play_token
from baserisk.state import (
    BATTER_OUT,
    BaseState,
    IllegalState,
    Snapshot,
    apply_play,
    initial_snapshot,
    replay_game,
)
from conftest import make_game_text, run_half


def snap(bases=BaseState(), outs=0, score=(0, 0), inning=1, half=Half.TOP):
    return Snapshot(bases, outs, score[0], score[1], "hpit1", inning, half, 0)


def effects(token, bases=BaseState(), outs=0, batter="bat0"):
    return apply_play(snap(bases, outs), parse_play_token(token), batter)


def test_initial_snapshot_empty():
    s = initial_snapshot("p001", inning=9, score_batting=3, score_fielding=3)
    assert s.bases == BaseState() and s.outs == 0
    assert (s.score_batting, s.score_fielding) == (3, 3)


def test_home_run_clears_bases():
    fx = effects("HR.1-H", BaseState(first="r1"), outs=1)
    assert (fx.outs_recorded, fx.runs_scored) == (0, 2)
    assert fx.new_bases == BaseState()
    assert fx.batter_final == 4


def test_home_run_implied_scoring():
    # no advance section at all: runners still come around
    fx = effects("HR", BaseState(first="r1", third="r3"))
    assert fx.runs_scored == 3
    assert fx.new_bases == BaseState()


def test_ground_double_play():
    fx = effects("64(1)3/GDP", BaseState(first="r1"), outs=1)
    assert (fx.outs_recorded, fx.runs_scored) == (2, 0)
    assert fx.new_bases == BaseState()
    assert fx.batter_final == BATTER_OUT


def test_strikeout_leaves_runners():
    fx = effects("K", BaseState(first="r1", second="r2"))
    assert fx.outs_recorded == 1
    assert fx.new_bases == BaseState(first="r1", second="r2")


def test_dropped_third_strike():
    fx = effects("K.B-1")
    assert fx.outs_recorded == 0
    assert fx.new_bases.first == "bat0"
    assert fx.batter_final == 1


def test_walk_pushes_only_forced_runners():
    fx = effects("W", BaseState(first="r1", third="r3"))
    assert fx.runs_scored == 0
    assert fx.new_bases == BaseState(first="bat0", second="r1", third="r3")


def test_bases_loaded_walk_scores_without_explicit_advances():
    fx = effects("W", BaseState("r1", "r2", "r3"))
    assert fx.runs_scored == 1
    assert fx.new_bases == BaseState(first="bat0", second="r1", third="r2")


def test_force_out_batter_reaches_first():
    fx = effects("64(1)", BaseState(first="r1"))
    assert fx.outs_recorded == 1
    assert fx.new_bases == BaseState(first="bat0")
    assert fx.batter_final == 1


def test_single_pushes_held_runner():
    # no advance recorded for the runner on first: the batter forces him up
    fx = effects("S8", BaseState(first="r1"))
    assert fx.new_bases == BaseState(first="bat0", second="r1")


def test_explicit_advance_overrides_push():
    fx = effects("S8.1-3", BaseState(first="r1"))
    assert fx.new_bases == BaseState(first="bat0", third="r1")


def test_out_on_advance_counts():
    fx = effects("S8.1XH(82)", BaseState(first="r1"))
    assert fx.outs_recorded == 1
    assert fx.runs_scored == 0
    assert fx.new_bases == BaseState(first="bat0")


def test_error_negated_advance_out_is_safe():
    fx = effects("K.2X3(E5)", BaseState(second="r2"))
    assert fx.outs_recorded == 1  # the strikeout stands, the tag does not
    assert fx.new_bases == BaseState(third="r2")


def test_caught_stealing_removes_runner():
    fx = effects("CS2(26)", BaseState(first="r1"))
    assert fx.outs_recorded == 1
    assert fx.new_bases == BaseState()


def test_strikeout_plus_steal():
    fx = effects("K+SB2", BaseState(first="r1"))
    assert fx.outs_recorded == 1
    assert fx.new_bases == BaseState(second="r1")


def test_pickoff():
    fx = effects("PO1(13)", BaseState(first="r1"))
    assert fx.outs_recorded == 1 and fx.new_bases == BaseState()
    fx = effects("PO1(E3)", BaseState(first="r1"))
    assert fx.outs_recorded == 0 and fx.new_bases == BaseState(first="r1")


def test_batter_out_on_advance_to_home():
    fx = effects("T9.BXH(82)")
    assert fx.outs_recorded == 1
    assert fx.batter_final == BATTER_OUT
    assert fx.new_bases == BaseState()


@pytest.mark.parametrize(
    "token,bases,outs",
    [
        ("S8.2-H", BaseState(), 0),             # advance from an empty base
        ("64(1)3/GDP", BaseState(first="r"), 2),  # fourth out
        ("CS2(26)", BaseState(), 0),            # out recorded on empty base
        ("S8.3-H;2-H;1-3;B-3", BaseState("a", "b", "c"), 0),
    ],
)
def test_illegal_states(token, bases, outs):
    with pytest.raises(IllegalState):
        effects(token, bases, outs)


def test_collision_without_force_is_illegal():
    # runner from first to second while the runner on second holds: the
    # held runner is pushable, so this cascades legally
    fx = effects("S8.1-2", BaseState(first="r1", second="r2"))
    assert fx.new_bases == BaseState(first="bat0", second="r1", third="r2")
    # but two explicit advances to the same base cannot both stand
    with pytest.raises(IllegalState):
        effects("S8.1-3;2-3", BaseState(first="r1", second="r2"))


# --- half-inning replay ------------------------------------------------------


def test_worked_half_inning_walkthrough():
    timeline, diags = run_half(["W", "S8/G.1-3", "K", "K", "3/G"])
    assert diags == []
    assert len(timeline.snapshots) == 5
    third_snap = timeline.snapshots[2]
    assert third_snap.bases.occupancy() == (True, False, True)
    assert timeline.runs_after == [0, 0, 0, 0, 0]
    assert timeline.complete and timeline.outs_total == 3


def test_runs_after_suffix_sums():
    timeline, _ = run_half(["D7", "S8.2-H", "HR.1-H", "K", "K", "K"])
    assert timeline.runs_on_play == [0, 1, 2, 0, 0, 0]
    assert timeline.runs_after == [3, 3, 2, 0, 0, 0]
    assert timeline.runs_total == 3


def test_walk_off_half_is_complete():
    timeline, _ = run_half(["K", "S8.B-1"], at_game_end=True)
    assert timeline.complete and timeline.outs_total == 1


def test_truncated_half_is_incomplete():
    timeline, _ = run_half(["K"], at_game_end=False)
    assert not timeline.complete


def test_unparseable_token_quarantines():
    timeline, diags = run_half(["W", "GLORP", "K"])
    assert timeline.excluded is not None
    assert any(d.code == "quarantined_half_inning" for d in diags)


def test_illegal_state_quarantines():
    timeline, diags = run_half(["S8.3-H"])
    assert timeline.excluded is not None
    assert timeline.snapshots == []  # nothing usable was recorded


def test_snapshots_never_show_three_outs():
    timeline, _ = run_half(["K", "K", "W", "S8.1-3", "K"])
    assert all(s.outs <= 2 for s in timeline.snapshots)


# --- whole-game replay -------------------------------------------------------


def replay_text(text):
    games, diags = assemble_games(tokenize_event_file(text)[0])
    assert diags == []
    return replay_game(games[0])


def test_scores_accumulate_across_halves():
    text = make_game_text([
        (1, 0, "vbat1", "HR"),
        (1, 0, "vbat2", "K"), (1, 0, "vbat3", "K"), (1, 0, "vbat4", "K"),
        (1, 1, "hbat1", "K"), (1, 1, "hbat2", "K"), (1, 1, "hbat3", "K"),
        (2, 0, "vbat5", "K"), (2, 0, "vbat6", "K"), (2, 0, "vbat7", "K"),
        (2, 1, "hbat4", "HR"), (2, 1, "hbat5", "HR"), (2, 1, "hbat6", "K"),
    ])
    replay = replay_text(text)
    assert replay.final_score == (1, 2)
    bottom2 = replay.timelines[-1]
    first = bottom2.snapshots[0]
    assert (first.score_batting, first.score_fielding) == (0, 1)
    later = bottom2.snapshots[2]
    assert (later.score_batting, later.score_fielding) == (2, 1)


def test_snapshot_pitcher_is_fielding_side():
    text = make_game_text([(1, 0, "vbat1", "K")])
    replay = replay_text(text)
    assert replay.timelines[0].snapshots[0].pitcher_id == "hpit1"


def test_mid_inning_pitcher_change_shifts_credit():
    text = make_game_text([
        (1, 0, "vbat1", "K"),
        'sub,hpit2,"Relief",1,0,1',
        (1, 0, "vbat2", "K"),
        (1, 0, "vbat3", "K"),
    ])
    replay = replay_text(text)
    pitchers = [s.pitcher_id for s in replay.timelines[0].snapshots]
    assert pitchers == ["hpit1", "hpit2", "hpit2"]


def test_pinch_runner_swaps_in_place():
    text = make_game_text([
        (1, 0, "vbat1", "W"),
        'sub,vbat9,"Runner",0,1,12',
        (1, 0, "vbat2", "K"),
    ])
    games, _ = assemble_games(tokenize_event_file(text)[0])
    replay = replay_game(games[0])
    second_snap = replay.timelines[0].snapshots[1]
    assert second_snap.bases.first == "vbat9"


def test_no_play_emits_no_snapshot():
    timeline, _ = run_half(["NP", "K", "K", "K"])
    assert len(timeline.snapshots) == 3


def test_quarantine_marks_rest_of_game_unreliable():
    text = make_game_text([
        (1, 0, "vbat1", "GLORP"),
        (1, 1, "hbat1", "K"), (1, 1, "hbat2", "K"), (1, 1, "hbat3", "K"),
    ])
    replay = replay_text(text)
    top1, bottom1 = replay.timelines
    assert top1.excluded is not None
    assert not bottom1.score_reliable
    assert bottom1.excluded is None  # still usable for all-innings stats


def test_incomplete_half_flagged():
    text = make_game_text([
        (1, 0, "vbat1", "K"),
        (1, 1, "hbat1", "K"), (1, 1, "hbat2", "K"), (1, 1, "hbat3", "K"),
    ])
    games, _ = assemble_games(tokenize_event_file(text)[0])
    replay = replay_game(games[0])
    assert not replay.timelines[0].complete
    assert any(d.code == "incomplete_half_inning" for d in replay.diagnostics)


def test_missing_starting_pitcher_is_reported():
    text = make_game_text([(1, 0, "vbat1", "K")]).replace(
        'start,hpit1,"H Pitcher",1,0,1\n', ""
    )
    games, _ = assemble_games(tokenize_event_file(text)[0])
    replay = replay_game(games[0])
    assert replay.timelines == []
    assert any(d.code == "missing_info" for d in replay.diagnostics)


# --- invariants over generated sequences -------------------------------------

TOKEN_POOL = [
    "K", "W", "S8", "S8.1-3", "D7", "D7.1-H", "T9", "HR", "8/F", "43/G",
    "64(1)3/GDP", "K+SB2", "CS2(26)", "E3", "FC5", "W.1-2", "S8.1XH(82)",
    "31/G", "SB2", "WP.1-2",
]


@settings(max_examples=150, deadline=None)
@given(st.lists(st.sampled_from(TOKEN_POOL), min_size=1, max_size=12))
def test_replay_invariants(tokens):
    timeline, _ = run_half(tokens)
    if timeline.excluded is not None:
        return
    assert timeline.outs_total <= 3
    after = timeline.runs_after
    assert all(a >= b for a, b in zip(after, after[1:]))
    assert sum(timeline.runs_on_play) == timeline.runs_total
    for s in timeline.snapshots:
        ids = [r for r in (s.bases.first, s.bases.second, s.bases.third) if r]
        assert len(ids) == len(set(ids))  # no runner on two bases
