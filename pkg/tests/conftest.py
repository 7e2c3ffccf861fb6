"""Shared builders for the test suite.

Batter-id convention in built games: ids starting with "v" bat for the
visitors (half 0), everything else for the home side.
"""

from __future__ import annotations

import pytest

from baserisk.eventfile import Half, PlayLine
from baserisk.oracle import DEFAULT_ADVANCES, Outcome, OutcomeModel
from baserisk.state import replay_half_inning


def make_game_text(
    play_lines: list[tuple[int, int, str, str] | str],
    game_id: str = "TST200004010",
    date: str = "2000/04/01",
) -> str:
    """Minimal valid single-game event file around the given play lines.

    play_lines entries are (inning, half, batter_id, token) tuples or raw
    record strings (for sub lines and deliberate corruption).
    """
    batters = sorted(
        {line[2] for line in play_lines if isinstance(line, tuple)}
    )
    lines = [
        f"id,{game_id}",
        "version,2",
        "info,visteam,VIS",
        "info,hometeam,HOM",
        f"info,date,{date}",
    ]
    slots = {0: 0, 1: 0}
    for pid in batters:
        team = 0 if pid.startswith("v") else 1
        slots[team] += 1
        lines.append(f'start,{pid},"{pid}",{team},{slots[team]},{slots[team] + 1}')
    lines.append('start,vpit1,"V Pitcher",0,0,1')
    lines.append('start,hpit1,"H Pitcher",1,0,1')
    for line in play_lines:
        if isinstance(line, str):
            lines.append(line)
        else:
            inning, half, batter, token = line
            lines.append(f"play,{inning},{half},{batter},??,,{token}")
    return "\n".join(lines) + "\n"


def run_half(
    tokens: list[str],
    inning: int = 1,
    half: Half = Half.TOP,
    entering_scores: tuple[int, int] = (0, 0),
    at_game_end: bool = True,
):
    """Replay a bare token list as one half-inning with fresh batters."""
    items = [
        PlayLine(inning, half, f"bat{i}", None, "", token, i + 1)
        for i, token in enumerate(tokens)
    ]
    return replay_half_inning(
        ("TST200004010", inning, half),
        2000,
        items,
        {0: "vpit1", 1: "hpit1"},
        {0: {}, 1: {}},
        entering_scores=entering_scores,
        at_game_end=at_game_end,
    )


# Outcome mix with no walk and no double play, and singles that stop the
# runner from second at third.  Under those rules the chance of scoring is
# the same for every occupancy pattern within a situation class, so the
# estimated class rates line up with the single-runner exact values.
CLOSURE_PROBS = {
    Outcome.OUT: 0.47,
    Outcome.STRIKEOUT: 0.20,
    Outcome.SINGLE: 0.215,
    Outcome.DOUBLE: 0.068,
    Outcome.TRIPLE: 0.006,
    Outcome.HOME_RUN: 0.041,
}


@pytest.fixture
def closure_model() -> OutcomeModel:
    advances = dict(DEFAULT_ADVANCES)
    advances[(Outcome.SINGLE, 2)] = 3
    return OutcomeModel(probs=dict(CLOSURE_PROBS), advances=advances)
