"""Record-level parsing of event files and assembly into game accounts.

An event file is a sequence of comma-separated records (id, version, info,
start, sub, play, data, com, badj, padj, ladj).  Tokenizing never aborts:
bad lines become diagnostics and parsing continues, so one corrupt record
costs at most its own game.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from pathlib import Path

__all__ = [
    "Diagnostic",
    "GameAccount",
    "Half",
    "LineupEntry",
    "PlayLine",
    "RawRecord",
    "RecordKind",
    "SubLine",
    "assemble_games",
    "load_roster_names",
    "tokenize_event_file",
]


class RecordKind(Enum):
    ID = "id"
    VERSION = "version"
    INFO = "info"
    START = "start"
    SUB = "sub"
    PLAY = "play"
    DATA = "data"
    COM = "com"
    BADJ = "badj"
    PADJ = "padj"
    LADJ = "ladj"


class Half(IntEnum):
    TOP = 0
    BOTTOM = 1


@dataclass
class RawRecord:
    kind: RecordKind
    fields: list[str]
    line_no: int


@dataclass
class Diagnostic:
    """One skipped or suspect piece of input, with enough context to audit."""

    code: str
    detail: str
    line_no: int | None = None
    game_id: str | None = None

    def __str__(self) -> str:
        where = f" line {self.line_no}" if self.line_no is not None else ""
        game = f" game {self.game_id}" if self.game_id else ""
        return f"{self.code}{where}{game}: {self.detail}"


@dataclass
class LineupEntry:
    player_id: str
    name: str
    team: int  # 0 visitor, 1 home
    batting_order: int
    position: int


@dataclass
class SubLine(LineupEntry):
    line_no: int = 0


@dataclass
class PlayLine:
    inning: int
    half: Half
    batter_id: str
    count: str | None  # raw ball-strike count, "??" recorded as None
    pitches: str
    event_text: str
    line_no: int


@dataclass
class GameAccount:
    game_id: str
    info: dict[str, str]
    starters: list[LineupEntry]
    events: list[PlayLine | SubLine]
    earned_runs: dict[str, int] = field(default_factory=dict)

    @property
    def season(self) -> int:
        date = self.info.get("date", "")
        try:
            return int(date.split("/")[0])
        except (ValueError, IndexError):
            # fall back to the year embedded in the game id, e.g. NYA200309180
            try:
                return int(self.game_id[3:7])
            except ValueError:
                return 0


def tokenize_event_file(text: str) -> tuple[list[RawRecord], list[Diagnostic]]:
    """Split raw file text into typed records.

    Every non-empty line yields exactly one record or one diagnostic.
    Unknown record kinds are preserved as Com records so nothing is lost.
    """
    records: list[RawRecord] = []
    diagnostics: list[Diagnostic] = []
    kinds = {k.value: k for k in RecordKind}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            cells = next(csv.reader(io.StringIO(line)))
        except (csv.Error, StopIteration):
            diagnostics.append(Diagnostic("unreadable_line", line, line_no))
            continue
        if not cells or not cells[0]:
            diagnostics.append(Diagnostic("unreadable_line", line, line_no))
            continue
        kind = kinds.get(cells[0])
        if kind is None:
            diagnostics.append(
                Diagnostic("unknown_record_kind", cells[0], line_no)
            )
            records.append(RawRecord(RecordKind.COM, cells, line_no))
        else:
            records.append(RawRecord(kind, cells[1:], line_no))
    return records, diagnostics


def _build_account(
    game_id: str, body: list[RawRecord], diagnostics: list[Diagnostic]
) -> GameAccount | None:
    info: dict[str, str] = {}
    starters: list[LineupEntry] = []
    events: list[PlayLine | SubLine] = []
    earned: dict[str, int] = {}

    for rec in body:
        f = rec.fields
        try:
            if rec.kind is RecordKind.INFO:
                if len(f) >= 2:
                    info[f[0]] = f[1]
                elif len(f) == 1:
                    info[f[0]] = ""
            elif rec.kind is RecordKind.START:
                starters.append(
                    LineupEntry(f[0], f[1], int(f[2]), int(f[3]), int(f[4]))
                )
            elif rec.kind is RecordKind.SUB:
                events.append(
                    SubLine(f[0], f[1], int(f[2]), int(f[3]), int(f[4]), rec.line_no)
                )
            elif rec.kind is RecordKind.PLAY:
                count = f[3] if f[3] and f[3] != "??" else None
                events.append(
                    PlayLine(
                        int(f[0]), Half(int(f[1])), f[2], count, f[4], f[5],
                        rec.line_no,
                    )
                )
            elif rec.kind is RecordKind.DATA:
                if f and f[0] == "er" and len(f) >= 3:
                    earned[f[1]] = int(f[2])
            # version / com / badj / padj / ladj: accepted and ignored
        except (ValueError, IndexError) as exc:
            diagnostics.append(
                Diagnostic(
                    "malformed_record", f"{rec.kind.value} {f!r} ({exc})",
                    rec.line_no, game_id,
                )
            )
            return None

    for key in ("visteam", "hometeam", "date"):
        if key not in info:
            diagnostics.append(
                Diagnostic("missing_info", f"no {key} record", game_id=game_id)
            )
            return None

    known = {s.player_id for s in starters}
    for ev in events:
        if isinstance(ev, SubLine):
            known.add(ev.player_id)
        elif ev.batter_id not in known:
            diagnostics.append(
                Diagnostic(
                    "orphan_player",
                    f"batter {ev.batter_id} not in lineup",
                    ev.line_no, game_id,
                )
            )
            return None
    return GameAccount(game_id, info, starters, events, earned)


def assemble_games(
    records: list[RawRecord],
) -> tuple[list[GameAccount], list[Diagnostic]]:
    """Group records into GameAccounts, one per id record.

    Accounts that fail structural validation (missing required info, a play
    referencing a player never introduced, malformed cells) are skipped
    whole with a diagnostic; they are never silently truncated.
    """
    games: list[GameAccount] = []
    diagnostics: list[Diagnostic] = []
    current_id: str | None = None
    body: list[RawRecord] = []

    def flush() -> None:
        if current_id is None:
            return
        account = _build_account(current_id, body, diagnostics)
        if account is not None:
            games.append(account)

    for rec in records:
        if rec.kind is RecordKind.ID:
            flush()
            if rec.fields and rec.fields[0]:
                current_id = rec.fields[0]
                body = []
            else:
                diagnostics.append(
                    Diagnostic("missing_info", "id record without a game id", rec.line_no)
                )
                current_id = None
                body = []
        elif current_id is None:
            diagnostics.append(
                Diagnostic(
                    "orphan_record",
                    f"{rec.kind.value} record before any id",
                    rec.line_no,
                )
            )
        else:
            body.append(rec)
    flush()
    return games, diagnostics


def load_roster_names(paths: list[str | Path]) -> dict[str, tuple[str, str]]:
    """Read .ROS roster files into {player_id: (last, first)} for display."""
    names: dict[str, tuple[str, str]] = {}
    for path in paths:
        text = Path(path).read_text(encoding="latin-1")
        for row in csv.reader(io.StringIO(text)):
            if len(row) >= 3 and row[0]:
                names.setdefault(row[0], (row[1], row[2]))
    return names
