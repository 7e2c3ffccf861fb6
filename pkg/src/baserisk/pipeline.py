"""End-to-end ingest: event files through replay into tally tables.

The unit of parallelism is one input file; per-file results merge with
plain integer addition, so any partition of the inputs produces the same
tallies as a sequential pass, bit for bit.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .eventfile import Diagnostic, assemble_games, tokenize_event_file
from .state import replay_game
from .stats import (
    CountingMode,
    InningCounts,
    SituationObservation,
    TallyTable,
    extract_observations,
)

__all__ = ["IngestResult", "collect_observations", "ingest_paths", "ingest_text"]

MAX_KEPT_DIAGNOSTICS = 200


@dataclass
class IngestResult:
    table: TallyTable = field(default_factory=TallyTable)
    innings: InningCounts = field(default_factory=InningCounts)
    games: int = 0
    games_skipped: int = 0
    half_innings: int = 0
    quarantined: int = 0
    incomplete: int = 0
    observations: int = 0
    diagnostic_counts: dict[str, int] = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def _note(self, diagnostics: list[Diagnostic]) -> None:
        for diag in diagnostics:
            self.diagnostic_counts[diag.code] = (
                self.diagnostic_counts.get(diag.code, 0) + 1
            )
            if len(self.diagnostics) < MAX_KEPT_DIAGNOSTICS:
                self.diagnostics.append(diag)

    def merge(self, other: "IngestResult") -> "IngestResult":
        out = IngestResult()
        for part in (self, other):
            for key, cell in part.table.cells.items():
                acc = out.table.cells.setdefault(key, [0, 0])
                acc[0] += cell[0]
                acc[1] += cell[1]
            for key, cell in part.innings.counts.items():
                acc = out.innings.counts.setdefault(key, [0, 0])
                acc[0] += cell[0]
                acc[1] += cell[1]
            out.games += part.games
            out.games_skipped += part.games_skipped
            out.half_innings += part.half_innings
            out.quarantined += part.quarantined
            out.incomplete += part.incomplete
            out.observations += part.observations
            for code, count in part.diagnostic_counts.items():
                out.diagnostic_counts[code] = out.diagnostic_counts.get(code, 0) + count
            for diag in part.diagnostics:
                if len(out.diagnostics) < MAX_KEPT_DIAGNOSTICS:
                    out.diagnostics.append(diag)
        return out


def ingest_text(
    text: str,
    mode: CountingMode = CountingMode.INCLUDE_PLAY,
    years: tuple[int, int] | None = None,
) -> IngestResult:
    """Parse and replay one event file's text into tallies."""
    result = IngestResult()
    records, diags = tokenize_event_file(text)
    result._note(diags)
    games, diags = assemble_games(records)
    result._note(diags)
    skipped = {d.game_id for d in diags if d.code in
               ("missing_info", "orphan_player", "malformed_record")}
    result.games_skipped += len([g for g in skipped if g])

    for account in games:
        if years and not (years[0] <= account.season <= years[1]):
            continue
        replay = replay_game(account)
        if not replay.timelines and replay.diagnostics:
            result.games_skipped += 1
            result._note(replay.diagnostics)
            continue
        result.games += 1
        result._note(replay.diagnostics)
        for timeline in replay.timelines:
            result.half_innings += 1
            if timeline.excluded is not None:
                result.quarantined += 1
                continue
            if not timeline.complete:
                result.incomplete += 1
                continue
            observations = extract_observations(timeline, mode)
            result.observations += len(observations)
            result.table.add_all(observations)
            result.innings.add_timeline(timeline)
    return result


def _ingest_one(args: tuple[str, str, tuple[int, int] | None]) -> IngestResult:
    path, mode_value, years = args
    text = Path(path).read_text(encoding="latin-1")
    return ingest_text(text, CountingMode(mode_value), years)


def ingest_paths(
    paths: list[str | Path],
    mode: CountingMode = CountingMode.INCLUDE_PLAY,
    years: tuple[int, int] | None = None,
    jobs: int = 1,
) -> IngestResult:
    """Ingest many event files, optionally fanning out one file per worker."""
    work = [(str(p), mode.value, years) for p in sorted(str(p) for p in paths)]
    result = IngestResult()
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_ingest_one, work):
                result = result.merge(part)
    else:
        for item in work:
            result = result.merge(_ingest_one(item))
    return result


def collect_observations(
    paths: list[str | Path],
    mode: CountingMode = CountingMode.INCLUDE_PLAY,
    years: tuple[int, int] | None = None,
) -> list[SituationObservation]:
    """Observation-level pass over raw files, for ad-hoc queries."""
    observations: list[SituationObservation] = []
    for path in sorted(str(p) for p in paths):
        text = Path(path).read_text(encoding="latin-1")
        records, _ = tokenize_event_file(text)
        games, _ = assemble_games(records)
        for account in games:
            if years and not (years[0] <= account.season <= years[1]):
                continue
            for timeline in replay_game(account).timelines:
                observations.extend(extract_observations(timeline, mode))
    return observations
