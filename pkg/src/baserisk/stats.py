"""Situation classification, tally tables, and the risk-threshold math.

Three situation classes are tracked, each at a fixed out count:

* third occupied (any first/second), 0 or 1 outs
* second occupied and third empty (any first), 0 or 1 outs
* exactly one runner, on first, 1 or 2 outs

A half-inning contributes at most one observation per class, taken at the
first qualifying snapshot; the recorded outcome is whether at least one run
scored from that point to the end of the half-inning.  The threshold for
sending a runner compares the scoring rate lost by an out on the bases
against the rate gained by taking the extra base:

    brt = f / (f + t - s)        when t > s, else clamped to 1

where t, s, f are the scoring rates from the third-occupied class at i
outs, the second-no-third class at i outs, and the first-only class at
i + 1 outs.  Sending the runner is worthwhile when the success probability
p is at least brt.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from enum import Enum

from .eventfile import Half
from .state import BaseState, StateTimeline

__all__ = [
    "BRTValue",
    "BucketRow",
    "ClassKind",
    "CountingMode",
    "Decision",
    "EmptyBucket",
    "EmptyCell",
    "InningCounts",
    "Rate",
    "RateTriple",
    "SituationClass",
    "SituationObservation",
    "TallyTable",
    "bucket_report",
    "career_high_leverage_innings",
    "classify_state",
    "compute_brt",
    "decide",
    "extract_observations",
    "merge",
    "rates",
]

HIGH_LEVERAGE_INNINGS = (8, 9)
HIGH_LEVERAGE_MARGIN = 1


class ClassKind(Enum):
    THIRD_OCCUPIED = "third_occupied"
    SECOND_NO_THIRD = "second_no_third"
    FIRST_ONLY = "first_only"


@dataclass(frozen=True)
class SituationClass:
    kind: ClassKind
    outs: int


class CountingMode(Enum):
    """Whether a run scoring on the snapshot's own play counts as scoring
    later in the inning.  The snapshot is the pre-play state, so the default
    says yes; the alternative starts counting at the next play."""

    INCLUDE_PLAY = "include"
    EXCLUDE_PLAY = "exclude"


class Decision(Enum):
    AGGRESSIVE = "aggressive"
    INDIFFERENT = "indifferent"
    CONVENTIONAL = "conventional"


class EmptyCell(ValueError):
    """A rate was requested from a cell with a zero denominator."""


class EmptyBucket(ValueError):
    """No pitcher fell into any requested bucket."""


def classify_state(bases: BaseState, outs: int) -> SituationClass | None:
    """Map a base-out state to its situation class, if any.

    Third-occupied takes precedence, then second-no-third; first-only
    requires first to be the lone occupied base.  Classes are mutually
    exclusive by construction.
    """
    first, second, third = bases.occupancy()
    if third and outs in (0, 1):
        return SituationClass(ClassKind.THIRD_OCCUPIED, outs)
    if second and not third and outs in (0, 1):
        return SituationClass(ClassKind.SECOND_NO_THIRD, outs)
    if first and not second and not third and outs in (1, 2):
        return SituationClass(ClassKind.FIRST_ONLY, outs)
    return None


@dataclass(frozen=True)
class SituationObservation:
    half_inning_key: tuple[str, int, Half]
    pitcher_id: str
    situation: SituationClass
    scored_later: bool
    high_leverage: bool
    season: int
    score_diff_abs: int
    inning: int


def extract_observations(
    timeline: StateTimeline, mode: CountingMode = CountingMode.INCLUDE_PLAY
) -> list[SituationObservation]:
    """First qualifying snapshot per class, at most one per half-inning.

    Quarantined and incomplete timelines yield nothing.  The high-leverage
    flag is evaluated at the qualifying snapshot and is never set when the
    running score is no longer trustworthy for this game.
    """
    if timeline.excluded is not None or not timeline.complete:
        return []
    runs_after = timeline.runs_after
    seen: set[SituationClass] = set()
    observations: list[SituationObservation] = []
    for idx, snap in enumerate(timeline.snapshots):
        situation = classify_state(snap.bases, snap.outs)
        if situation is None or situation in seen:
            continue
        seen.add(situation)
        later = runs_after[idx]
        if mode is CountingMode.EXCLUDE_PLAY:
            later -= timeline.runs_on_play[idx]
        margin = abs(snap.score_batting - snap.score_fielding)
        high_leverage = (
            snap.inning in HIGH_LEVERAGE_INNINGS
            and margin <= HIGH_LEVERAGE_MARGIN
            and timeline.score_reliable
        )
        observations.append(
            SituationObservation(
                timeline.half_inning_key, snap.pitcher_id, situation,
                later >= 1, high_leverage, timeline.season, margin, snap.inning,
            )
        )
    return observations


# (pitcher, class kind, outs, season, high_leverage) -> [numerator, denominator]
TallyKey = tuple[str, ClassKind, int, int, bool]


@dataclass
class TallyTable:
    cells: dict[TallyKey, list[int]] = field(default_factory=dict)

    def add(self, obs: SituationObservation) -> None:
        key = (
            obs.pitcher_id, obs.situation.kind, obs.situation.outs,
            obs.season, obs.high_leverage,
        )
        cell = self.cells.setdefault(key, [0, 0])
        cell[1] += 1
        if obs.scored_later:
            cell[0] += 1

    def add_all(self, observations: list[SituationObservation]) -> None:
        for obs in observations:
            self.add(obs)


def merge(*tables: TallyTable) -> TallyTable:
    """Combine tally tables cell-wise.  Commutative and associative with
    the empty table as identity, so any parallel partition merges to the
    same result as a sequential pass."""
    out = TallyTable()
    for table in tables:
        for key, (num, den) in table.cells.items():
            cell = out.cells.setdefault(key, [0, 0])
            cell[0] += num
            cell[1] += den
    return out


@dataclass
class InningCounts:
    """Distinct half-innings per (pitcher, season): [high-leverage, total]."""

    counts: dict[tuple[str, int], list[int]] = field(default_factory=dict)

    def add_timeline(self, timeline: StateTimeline) -> None:
        if timeline.excluded is not None or not timeline.complete:
            return
        pitchers: set[str] = set()
        hl_pitchers: set[str] = set()
        for snap in timeline.snapshots:
            pitchers.add(snap.pitcher_id)
            margin = abs(snap.score_batting - snap.score_fielding)
            if (
                snap.inning in HIGH_LEVERAGE_INNINGS
                and margin <= HIGH_LEVERAGE_MARGIN
                and timeline.score_reliable
            ):
                hl_pitchers.add(snap.pitcher_id)
        for pid in pitchers:
            cell = self.counts.setdefault((pid, timeline.season), [0, 0])
            cell[1] += 1
            if pid in hl_pitchers:
                cell[0] += 1

    def merge(self, other: "InningCounts") -> "InningCounts":
        out = InningCounts({k: list(v) for k, v in self.counts.items()})
        for key, (hl, total) in other.counts.items():
            cell = out.counts.setdefault(key, [0, 0])
            cell[0] += hl
            cell[1] += total
        return out

    def seasons(self, pitcher_id: str) -> list[int]:
        return sorted(s for (p, s) in self.counts if p == pitcher_id)


def career_high_leverage_innings(
    pitcher_id: str,
    innings: InningCounts,
    years: tuple[int, int] | None = None,
) -> int:
    """Distinct half-innings in which the pitcher faced at least one
    high-leverage snapshot."""
    total = 0
    for (pid, season), (hl, _) in innings.counts.items():
        if pid != pitcher_id:
            continue
        if years and not (years[0] <= season <= years[1]):
            continue
        total += hl
    return total


@dataclass(frozen=True)
class Rate:
    numerator: int
    denominator: int

    @property
    def value(self) -> float | None:
        if self.denominator == 0:
            return None
        return self.numerator / self.denominator

    def require(self, label: str = "cell") -> float:
        if self.denominator == 0:
            raise EmptyCell(f"{label} has no observations")
        return self.numerator / self.denominator


@dataclass(frozen=True)
class RateTriple:
    t: Rate  # third occupied, i outs
    s: Rate  # second, third empty, i outs
    f: Rate  # first only, i + 1 outs
    outs: int

    def complete(self) -> bool:
        return all(r.denominator > 0 for r in (self.t, self.s, self.f))


def rates(
    table: TallyTable,
    outs: int,
    pitchers: set[str] | None = None,
    leverage: bool | None = None,
    years: tuple[int, int] | None = None,
) -> RateTriple:
    """Aggregate scoring rates for the three classes at threshold index
    ``outs`` (the first-only class is read at ``outs + 1``).

    leverage=True keeps only high-leverage observations, None keeps all.
    """
    if outs not in (0, 1):
        raise ValueError("threshold index must be 0 or 1")
    wanted = {
        ClassKind.THIRD_OCCUPIED: outs,
        ClassKind.SECOND_NO_THIRD: outs,
        ClassKind.FIRST_ONLY: outs + 1,
    }
    sums = {kind: [0, 0] for kind in wanted}
    for (pid, kind, cell_outs, season, lev), (num, den) in table.cells.items():
        if wanted.get(kind) != cell_outs:
            continue
        if pitchers is not None and pid not in pitchers:
            continue
        if leverage is not None and lev != leverage:
            continue
        if years and not (years[0] <= season <= years[1]):
            continue
        sums[kind][0] += num
        sums[kind][1] += den
    return RateTriple(
        Rate(*sums[ClassKind.THIRD_OCCUPIED]),
        Rate(*sums[ClassKind.SECOND_NO_THIRD]),
        Rate(*sums[ClassKind.FIRST_ONLY]),
        outs,
    )


@dataclass(frozen=True)
class BRTValue:
    t: float
    s: float
    f: float
    brt: float
    clamped: bool
    sample_sizes: tuple[int, int, int] | None = None


def compute_brt(
    t: float, s: float, f: float,
    sample_sizes: tuple[int, int, int] | None = None,
) -> BRTValue:
    """Break-even success probability for trading a base for an out risk.

    Derived from p*t >= p*s + (1-p)*f: aggressive baserunning is at least
    as good as holding exactly when p >= f / (f + t - s).  When t <= s the
    extra base never helps, so the threshold clamps to 1.
    """
    for name, value in (("t", t), ("s", s), ("f", f)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must be a probability, got {value}")
    if t - s > 0.0:
        return BRTValue(t, s, f, f / (f + t - s), False, sample_sizes)
    return BRTValue(t, s, f, 1.0, True, sample_sizes)


def brt_from_rates(triple: RateTriple) -> BRTValue:
    t = triple.t.require("third-occupied cell")
    s = triple.s.require("second-no-third cell")
    f = triple.f.require("first-only cell")
    return compute_brt(
        t, s, f,
        (triple.t.denominator, triple.s.denominator, triple.f.denominator),
    )


def decide(p: float, brt: float) -> Decision:
    """Compare a success probability to the threshold.  Exactly at the
    threshold the two strategies have equal expected value."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be a probability, got {p}")
    if p > brt:
        return Decision.AGGRESSIVE
    if p == brt:
        return Decision.INDIFFERENT
    return Decision.CONVENTIONAL


@dataclass
class BucketRow:
    label: str
    low: int
    high: int | None  # None for the open-ended top bucket
    pitchers: list[str]
    cumulative: BRTValue | None
    mean: float | None
    stddev: float | None
    excluded: list[str]  # pitchers dropped from mean/stddev for empty cells


def _group_stats(
    table: TallyTable,
    pitcher_ids: list[str],
    outs: int,
    leverage: bool | None,
    years: tuple[int, int] | None,
) -> tuple[BRTValue | None, float | None, float | None, list[str]]:
    pooled = rates(table, outs, set(pitcher_ids), leverage, years)
    cumulative = brt_from_rates(pooled) if pooled.complete() else None
    per_pitcher: list[float] = []
    excluded: list[str] = []
    for pid in pitcher_ids:
        triple = rates(table, outs, {pid}, leverage, years)
        if triple.complete():
            per_pitcher.append(brt_from_rates(triple).brt)
        else:
            excluded.append(pid)
    mean = statistics.fmean(per_pitcher) if per_pitcher else None
    stddev = statistics.pstdev(per_pitcher) if per_pitcher else None
    return cumulative, mean, stddev, excluded


def bucket_report(
    table: TallyTable,
    innings: InningCounts,
    outs: int,
    boundaries: tuple[int, ...] = (100, 150, 200, 250, 300, 350),
    leverage: bool | None = True,
    years: tuple[int, int] | None = None,
    cohort_last_season_min: int | None = None,
) -> list[BucketRow]:
    """Group pitchers by career high-leverage half-innings and report the
    pooled threshold plus the spread of per-pitcher thresholds per bucket.

    With a single pitcher in a bucket the population stddev is 0.
    """
    careers: dict[str, int] = {}
    for (pid, _season), _ in innings.counts.items():
        careers.setdefault(pid, 0)
    for pid in careers:
        careers[pid] = career_high_leverage_innings(pid, innings, years)
        if cohort_last_season_min is not None:
            seasons = innings.seasons(pid)
            if not seasons or seasons[-1] < cohort_last_season_min:
                careers[pid] = -1  # marks the pitcher outside the cohort

    edges = list(boundaries) + [None]
    rows: list[BucketRow] = []
    any_pitchers = False
    for low, high in zip(edges[:-1], edges[1:]):
        members = sorted(
            pid for pid, career in careers.items()
            if career >= low and (high is None or career < high)
        )
        any_pitchers = any_pitchers or bool(members)
        label = f"{low}+" if high is None else f"{low}-{high - 1}"
        cumulative, mean, stddev, excluded = _group_stats(
            table, members, outs, leverage, years
        )
        rows.append(BucketRow(label, low, high, members, cumulative, mean, stddev, excluded))
    if not any_pitchers:
        raise EmptyBucket("no pitcher reached the first boundary")
    return rows


def group_summary(
    table: TallyTable,
    pitcher_ids: list[str],
    outs: int,
    leverage: bool | None = True,
    years: tuple[int, int] | None = None,
) -> BucketRow:
    """Bucket-style stats for an explicit pitcher list (e.g. save leaders)."""
    if not pitcher_ids:
        raise EmptyBucket("empty pitcher list")
    cumulative, mean, stddev, excluded = _group_stats(
        table, pitcher_ids, outs, leverage, years
    )
    return BucketRow(
        "group", 0, None, sorted(pitcher_ids), cumulative, mean, stddev, excluded
    )
