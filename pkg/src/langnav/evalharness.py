"""Stage-record corpus handling, aggregation, and live simulation evaluation.

Two record shapes exist: four-stage records (code / od / wp / path_exec, used
by the per-scene trial transcriptions) and two-column A/B records (the input
representation comparison). Aggregation groups by category or scene and
reports per-stage pass percentages rounded half-up to two decimals; rendering
strips trailing zeros ("90", "87.5", "66.67") to match the published tables
cell for cell.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from . import data as bundled
from .pipeline import CodegenConfig, NavCommand, World, run_command

STAGE_KEYS = ("code", "od", "wp", "path_exec")
AB_KEYS = ("a", "b")
CATEGORY_ORDER = ("Generic", "Specific", "Relational", "Contextual")


class RecordsError(ValueError):
    """A records or corpus file is malformed."""


@dataclass(frozen=True)
class StageRecord:
    scene: str
    category: str
    sentence: str
    stages: tuple[bool, ...]  # four stage flags, or two A/B flags
    kind: str = "stages"  # "stages" | "ab"

    def __post_init__(self) -> None:
        if self.kind == "stages":
            if len(self.stages) != 4:
                raise RecordsError(f"{self.sentence!r}: expected four stage flags")
            seen_fail = False
            for flag in self.stages:
                if flag and seen_fail:
                    raise RecordsError(
                        f"{self.sentence!r}: non-monotone stage record {self.stages}"
                    )
                if not flag:
                    seen_fail = True
        elif self.kind == "ab":
            if len(self.stages) != 2:
                raise RecordsError(f"{self.sentence!r}: expected A and B flags")
        else:
            raise RecordsError(f"unknown record kind {self.kind!r}")


def load_records(path: str | Path) -> list[StageRecord]:
    """Load a records file (either shape); validates monotonicity eagerly."""
    data = json.loads(Path(path).read_text())
    if not isinstance(data, list):
        raise RecordsError("records file must contain a list")
    records = []
    for idx, raw in enumerate(data):
        try:
            if "stages" in raw:
                s = raw["stages"]
                flags = tuple(bool(s[k]) for k in STAGE_KEYS)
                kind = "stages"
            else:
                flags = tuple(bool(raw[k]) for k in AB_KEYS)
                kind = "ab"
            records.append(
                StageRecord(
                    scene=str(raw["scene"]),
                    category=str(raw["category"]),
                    sentence=str(raw["sentence"]),
                    stages=flags,
                    kind=kind,
                )
            )
        except KeyError as exc:
            raise RecordsError(f"records[{idx}]: missing {exc}") from exc
    return records


def percent(passes: int, count: int) -> Decimal:
    """100 * passes / count rounded half-up to two decimals."""
    if count == 0:
        raise RecordsError("cannot aggregate an empty group")
    raw = Decimal(passes) * Decimal(100) / Decimal(count)
    return raw.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)


def render_percent(value: Decimal) -> str:
    """Two-decimal value with trailing zeros stripped: 90, 87.5, 66.67."""
    text = str(value.quantize(Decimal("0.01")))
    return text.rstrip("0").rstrip(".") if "." in text else text


@dataclass(frozen=True)
class AggregateRow:
    group: str
    count: int
    percentages: tuple[Decimal, ...]


@dataclass(frozen=True)
class AggregateTable:
    grouping: str  # "category" | "scene" | "representation"
    columns: tuple[str, ...]
    rows: tuple[AggregateRow, ...]

    def row(self, group: str) -> AggregateRow:
        for row in self.rows:
            if row.group == group:
                return row
        raise KeyError(group)

    def cell(self, group: str, column: str) -> str:
        row = self.row(group)
        return render_percent(row.percentages[self.columns.index(column)])

    def to_dict(self) -> dict:
        return {
            "grouping": self.grouping,
            "columns": list(self.columns),
            "rows": [
                {
                    "group": r.group,
                    "count": r.count,
                    "percentages": [render_percent(p) for p in r.percentages],
                }
                for r in self.rows
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AggregateTable":
        return cls(
            grouping=data["grouping"],
            columns=tuple(data["columns"]),
            rows=tuple(
                AggregateRow(
                    group=r["group"],
                    count=int(r["count"]),
                    percentages=tuple(Decimal(p) for p in r["percentages"]),
                )
                for r in data["rows"]
            ),
        )


def aggregate(records: list[StageRecord], grouping: str = "category") -> AggregateTable:
    """Group records and compute per-stage pass percentages plus a Total row."""
    if not records:
        raise RecordsError("cannot aggregate an empty record list")
    kinds = {r.kind for r in records}
    if len(kinds) != 1:
        raise RecordsError("cannot mix four-stage and A/B records in one table")
    kind = kinds.pop()
    effective_grouping = grouping
    if kind == "ab" and grouping == "representation":
        effective_grouping = "category"  # Table-1 layout: categories x {A, B}
    if effective_grouping == "category":
        keyfn = lambda r: r.category
        order = [c for c in CATEGORY_ORDER if any(r.category == c for r in records)]
        order += sorted({r.category for r in records} - set(CATEGORY_ORDER))
    elif effective_grouping == "scene":
        keyfn = lambda r: r.scene
        seen: list[str] = []
        for r in records:
            if r.scene not in seen:
                seen.append(r.scene)
        order = seen
    else:
        raise RecordsError(f"unknown grouping {grouping!r}")

    columns = STAGE_KEYS if kind == "stages" else AB_KEYS
    rows = []
    for group in order:
        members = [r for r in records if keyfn(r) == group]
        pcts = tuple(
            percent(sum(1 for r in members if r.stages[i]), len(members))
            for i in range(len(columns))
        )
        rows.append(AggregateRow(group=group, count=len(members), percentages=pcts))
    total_pcts = tuple(
        percent(sum(1 for r in records if r.stages[i]), len(records))
        for i in range(len(columns))
    )
    rows.append(AggregateRow(group="Total", count=len(records), percentages=total_pcts))
    return AggregateTable(grouping=grouping, columns=columns, rows=tuple(rows))


def table_to_csv(table: AggregateTable) -> str:
    """CSV with group, count, and per-stage percentage columns."""
    if table.columns == STAGE_KEYS:
        header = ["group", "count", "code_pct", "od_pct", "wp_pct", "path_exec_pct"]
    else:
        header = ["group", "count", "a_pct", "b_pct"]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in table.rows:
        writer.writerow(
            [row.group, row.count, *[render_percent(p) for p in row.percentages]]
        )
    return buffer.getvalue()


def emit_report(
    table: AggregateTable,
    records: list[StageRecord],
    fmt: str,
    path: str | Path,
) -> Path:
    """Write the aggregate (csv or json); json round-trips to an equal table."""
    out = Path(path)
    if fmt == "csv":
        out.write_text(table_to_csv(table))
    elif fmt == "json":
        payload = {
            "table": table.to_dict(),
            "records": [
                {
                    "scene": r.scene,
                    "category": r.category,
                    "sentence": r.sentence,
                    "kind": r.kind,
                    "flags": list(r.stages),
                }
                for r in records
            ],
        }
        out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        raise RecordsError(f"unknown report format {fmt!r}")
    return out


# ---------------------------------------------------------------------------
# live simulation evaluation


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    scene: str
    category: str
    sentence: str
    fixture: str
    target_object_id: str

    @classmethod
    def from_dict(cls, raw: dict) -> "CorpusEntry":
        try:
            return cls(
                id=str(raw["id"]),
                scene=str(raw["scene"]),
                category=str(raw["category"]),
                sentence=str(raw["sentence"]),
                fixture=str(raw["fixture"]),
                target_object_id=str(raw["target_object_id"]),
            )
        except KeyError as exc:
            raise RecordsError(f"corpus entry missing {exc}") from exc


def load_corpus(path: str | Path) -> list[CorpusEntry]:
    data = json.loads(Path(path).read_text())
    entries = data["entries"] if isinstance(data, dict) else data
    if not entries:
        raise RecordsError("corpus is empty")
    return [CorpusEntry.from_dict(raw) for raw in entries]


@dataclass
class LiveEvalResult:
    records: list[StageRecord]
    table: AggregateTable
    reports: list[dict]
    invalid: list[dict]


def run_live_eval(
    corpus: list[CorpusEntry] | str | Path,
    representation: str = "A",
    seed: int = 0,
    grouping: str = "category",
    codegen: CodegenConfig | None = None,
) -> LiveEvalResult:
    """Run every corpus entry in an isolated world copy and aggregate.

    Entries whose scene, fixture, or target annotation is missing are marked
    invalid and excluded from aggregation. Deterministic under a fixed seed.
    """
    if not isinstance(corpus, list):
        corpus = load_corpus(corpus)
    cfg = codegen or CodegenConfig(mode="fixture")
    worlds: dict[str, World] = {}
    records: list[StageRecord] = []
    reports: list[dict] = []
    invalid: list[dict] = []
    for entry in corpus:
        try:
            if entry.scene not in worlds:
                worlds[entry.scene] = World.load(bundled.scene_path(entry.scene))
            world = worlds[entry.scene].fresh_copy()
            world.scene.object_by_id(entry.target_object_id)
        except (FileNotFoundError, KeyError, ValueError) as exc:
            invalid.append({"id": entry.id, "reason": str(exc)})
            continue
        cmd = NavCommand(
            text=entry.sentence,
            scene=entry.scene,
            category=entry.category,
            representation=representation,
            fixture_id=entry.fixture,
            target_object_id=entry.target_object_id,
            seed=seed,
        )
        report = run_command(cmd, world, cfg)
        if report.stages.code.detail.startswith("codegen:"):
            invalid.append({"id": entry.id, "reason": report.stages.code.detail})
            continue
        records.append(
            StageRecord(
                scene=entry.scene,
                category=entry.category,
                sentence=entry.sentence,
                stages=report.stages.flags(),
            )
        )
        reports.append(report.to_dict())
    if not records:
        raise RecordsError("no valid corpus entries to aggregate")
    return LiveEvalResult(
        records=records,
        table=aggregate(records, grouping),
        reports=reports,
        invalid=invalid,
    )
