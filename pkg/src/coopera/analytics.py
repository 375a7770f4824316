"""Revision and usability analytics.

Edit distance is character-level Levenshtein over Unicode scalar values
with unit costs, reported both absolute and normalized by the longer
text (0/0 defined as 0). Deleted and inserted lengths come from an
explicit alignment backtrace; when several alignments tie on cost the
backtrace prefers match, then substitution, then deletion, then
insertion. A substitution counts toward both lengths, so
len(a) - deleted + inserted == len(b) always holds.

SUS scoring: odd items contribute raw - 1, even items 5 - raw, and a
respondent's composite is 2.5 times the sum of the ten adjusted items.
Items pair into five subscales reported as plain means of the adjusted
scores; the composite SD is the sample standard deviation (n - 1).

All functions here are pure.
"""

from __future__ import annotations

import csv
import json
import unicodedata
from array import array
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from statistics import mean, stdev
from typing import Mapping, Sequence

from .errors import NotFoundError, ValidationError
from .model import RevisionKind, ScriptProject, Stage
from .rendering import render_snapshot, render_stage
from .validation import Violation


def edit_distance(a: str, b: str) -> tuple[int, float]:
    """(absolute, normalized) Levenshtein distance. O(len(a) * len(b))
    time, two rows of memory."""
    absolute = _levenshtein(a, b)
    longest = max(len(a), len(b))
    return absolute, (absolute / longest if longest else 0.0)


def _levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = array("i", range(len(b) + 1))
    cur = array("i", [0] * (len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur[0] = i
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            cur[j] = min(prev[j - 1] + cost, prev[j] + 1, cur[j - 1] + 1)
        prev, cur = cur, prev
    return prev[len(b)]


def alignment_operations(a: str, b: str) -> list[str]:
    """Operation sequence of one minimal-cost alignment, as strings
    "match" / "substitute" / "delete" / "insert", in order along the
    texts. Ties are broken match > substitute > delete > insert.

    Memory is quadratic (the full DP matrix is kept for the backtrace);
    inputs here are script elements and stage renderings, not corpora.
    """
    n, m = len(a), len(b)
    rows = [array("i", [0] * (m + 1)) for _ in range(n + 1)]
    for j in range(m + 1):
        rows[0][j] = j
    for i in range(1, n + 1):
        rows[i][0] = i
        prev_row, row = rows[i - 1], rows[i]
        ca = a[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ca == b[j - 1] else 1
            row[j] = min(prev_row[j - 1] + cost, prev_row[j] + 1, row[j - 1] + 1)
    ops: list[str] = []
    i, j = n, m
    while i > 0 or j > 0:
        here = rows[i][j]
        if i > 0 and j > 0 and a[i - 1] == b[j - 1] and here == rows[i - 1][j - 1]:
            ops.append("match")
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and here == rows[i - 1][j - 1] + 1:
            ops.append("substitute")
            i, j = i - 1, j - 1
        elif i > 0 and here == rows[i - 1][j] + 1:
            ops.append("delete")
            i -= 1
        else:
            ops.append("insert")
            j -= 1
    ops.reverse()
    return ops


def diff_lengths(original: str, revised: str) -> tuple[int, int]:
    """(deleted_length, inserted_length) from the alignment backtrace.
    Substitutions count 1 toward each."""
    deleted = inserted = 0
    for op in alignment_operations(original, revised):
        if op == "substitute":
            deleted += 1
            inserted += 1
        elif op == "delete":
            deleted += 1
        elif op == "insert":
            inserted += 1
    return deleted, inserted


_CJK_RANGES = (
    (0x3040, 0x30FF),    # hiragana, katakana
    (0x3400, 0x4DBF),    # CJK extension A
    (0x4E00, 0x9FFF),    # CJK unified
    (0xAC00, 0xD7AF),    # hangul syllables
    (0xF900, 0xFAFF),    # CJK compatibility
)


def _is_cjk(ch: str) -> bool:
    code = ord(ch)
    return any(lo <= code <= hi for lo, hi in _CJK_RANGES)


def tokenize(text: str) -> set[str]:
    """Lowercase, drop punctuation, split on whitespace. Characters in
    CJK ranges carry no whitespace boundaries, so each becomes its own
    token regardless of surrounding spacing."""
    cleaned = []
    for ch in text.lower():
        if unicodedata.category(ch).startswith("P"):
            cleaned.append(" ")
        elif _is_cjk(ch):
            cleaned.append(f" {ch} ")
        else:
            cleaned.append(ch)
    return set("".join(cleaned).split())


def jaccard(a: str, b: str) -> float:
    """Token-set similarity in [0, 1]; J(empty, empty) is 1."""
    ta, tb = tokenize(a), tokenize(b)
    if not ta and not tb:
        return 1.0
    return len(ta & tb) / len(ta | tb)


def round_half_up(value: float, ndigits: int = 2) -> float:
    """Half-up rounding of the exact binary value (3.125 -> 3.13, where
    round() gives 3.12). Conversion from float is exact on purpose: a
    nominal 3.295 that is really 3.29499... stays 3.29. Reported
    metrics use this consistently."""
    quant = Decimal(1).scaleb(-ndigits)
    return float(Decimal(value).quantize(quant, rounding=ROUND_HALF_UP))


SUS_ITEMS = tuple(range(1, 11))

SUS_SUBSCALES: dict[str, tuple[int, int]] = {
    "willingness": (1, 2),
    "usable": (3, 4),
    "functional_cohesion": (5, 6),
    "learnable": (7, 8),
    "cognitive_efficiency": (9, 10),
}


def sus_adjusted(item: int, raw: int) -> int:
    """Reverse-scored adjustment: positively worded odd items score
    raw - 1, negatively worded even items 5 - raw."""
    if item not in SUS_ITEMS:
        raise ValueError(f"item must be 1..10, got {item}")
    if not isinstance(raw, int) or isinstance(raw, bool) or not 1 <= raw <= 5:
        raise ValueError(f"raw response must be an integer 1..5, got {raw!r}")
    return raw - 1 if item % 2 == 1 else 5 - raw


@dataclass(frozen=True)
class SusResponse:
    respondent_id: str
    raw: tuple[int, ...]  # Q1..Q10, each 1..5

    def adjusted(self) -> list[int]:
        return [sus_adjusted(i, r) for i, r in enumerate(self.raw, start=1)]


@dataclass
class SusReport:
    n: int
    per_item_adjusted_means: dict[int, float]
    subscale_means: dict[str, float]
    composite_mean: float
    composite_sd: float | None
    per_respondent: list[float]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "per_item_adjusted_means": {f"Q{k}": v for k, v in sorted(self.per_item_adjusted_means.items())},
            "subscale_means": dict(self.subscale_means),
            "composite_mean": self.composite_mean,
            "composite_sd": self.composite_sd,
            "per_respondent": list(self.per_respondent),
        }


def _validate_response(idx: int, response: SusResponse) -> list[int]:
    if len(response.raw) != 10:
        raise ValidationError(
            f"respondent {response.respondent_id or idx}: {len(response.raw)} items, expected 10",
            violations=[Violation("BAD_SUS_ROW", response.respondent_id, "a questionnaire needs exactly 10 items")],
        )
    try:
        return response.adjusted()
    except ValueError as exc:
        raise ValidationError(
            f"respondent {response.respondent_id or idx}: {exc}",
            violations=[Violation("BAD_SUS_VALUE", response.respondent_id, str(exc))],
        ) from exc


def sus_score(responses: Sequence[SusResponse]) -> SusReport:
    """Score a batch of questionnaires."""
    if not responses:
        raise ValidationError(
            "no questionnaire rows", violations=[Violation("EMPTY_SUS", None, "at least one response required")]
        )
    adjusted_rows = [_validate_response(i, r) for i, r in enumerate(responses)]
    per_respondent = [2.5 * sum(row) for row in adjusted_rows]
    item_means = {item: mean(row[item - 1] for row in adjusted_rows) for item in SUS_ITEMS}
    subscale_means = {
        name: mean(row[i - 1] for row in adjusted_rows for i in pair) for name, pair in SUS_SUBSCALES.items()
    }
    return SusReport(
        n=len(adjusted_rows),
        per_item_adjusted_means=item_means,
        subscale_means=subscale_means,
        composite_mean=mean(per_respondent),
        composite_sd=stdev(per_respondent) if len(per_respondent) > 1 else None,
        per_respondent=per_respondent,
    )


def subscales_from_item_means(item_means: Mapping[int, float]) -> dict[str, float]:
    """Subscale means given only per-item means of the adjusted scores.
    Valid because each subscale averages its two items over one and the
    same set of respondents."""
    return {name: (item_means[i] + item_means[j]) / 2 for name, (i, j) in SUS_SUBSCALES.items()}


def responses_from_rows(rows: Sequence[Mapping]) -> list[SusResponse]:
    """Questionnaires from mapping rows keyed Q1..Q10 plus optional id."""
    wanted = [f"Q{i}" for i in SUS_ITEMS]
    responses = []
    for idx, row in enumerate(rows, start=1):
        if not isinstance(row, Mapping):
            raise ValidationError(
                f"row {idx} is not an object",
                violations=[Violation("BAD_SUS_ROW", str(idx), "each response must be an object")],
            )
        rid = str(row.get("id") or idx)
        missing = [c for c in wanted if c not in row]
        if missing:
            raise ValidationError(
                f"row {idx} is missing {', '.join(missing)}",
                violations=[Violation("BAD_SUS_ROW", rid, f"missing items {missing}")],
            )
        responses.append(SusResponse(respondent_id=rid, raw=tuple(row[c] for c in wanted)))
    return responses


def load_sus_csv(path: str) -> list[SusResponse]:
    """Read questionnaires from a CSV with columns id,Q1..Q10 (the id
    column is optional; row numbers stand in when absent)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        wanted = [f"Q{i}" for i in SUS_ITEMS]
        missing = [c for c in wanted if c not in fields]
        if missing:
            raise ValidationError(
                f"CSV is missing columns: {', '.join(missing)}",
                violations=[Violation("BAD_SUS_CSV", None, f"missing columns {missing}")],
            )
        responses = []
        for record in reader:
            rid = record.get("id") or str(reader.line_num - 1)
            try:
                raw = tuple(int(record[c]) for c in wanted)
            except (TypeError, ValueError) as exc:
                raise ValidationError(
                    f"row {reader.line_num}: non-integer response",
                    violations=[Violation("BAD_SUS_VALUE", rid, "responses must be integers 1..5")],
                ) from exc
            responses.append(SusResponse(respondent_id=rid, raw=raw))
    return responses


@dataclass
class DiffReport:
    stage: Stage
    absolute_distance: int
    normalized_distance: float
    deleted_length: int
    inserted_length: int
    jaccard: float
    base_text: str
    current_text: str

    def to_dict(self) -> dict:
        return {
            "stage": self.stage.key,
            "absolute_distance": self.absolute_distance,
            "normalized_distance": self.normalized_distance,
            "deleted_length": self.deleted_length,
            "inserted_length": self.inserted_length,
            "jaccard": self.jaccard,
            "base_text": self.base_text,
            "current_text": self.current_text,
        }

    def as_table(self) -> str:
        rows = (
            ("absolute_distance", str(self.absolute_distance)),
            ("normalized_distance", f"{round_half_up(self.normalized_distance, 4):.4f}"),
            ("deleted_length", str(self.deleted_length)),
            ("inserted_length", str(self.inserted_length)),
            ("jaccard", f"{round_half_up(self.jaccard, 4):.4f}"),
        )
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name.ljust(width)}  {value}" for name, value in rows)


def project_diff_report(project: ScriptProject, stage: Stage) -> DiffReport:
    """How far a stage has drifted from its first agent-generated draft:
    the earliest Generate snapshot rendered as plain text, against the
    stage's current text."""
    base_entry = next(
        (e for e in project.revision_log if e.stage == stage and e.kind == RevisionKind.GENERATE),
        None,
    )
    if base_entry is None or base_entry.after_text is None:
        raise NotFoundError(f"stage {stage.key} has no generated baseline to diff against")
    base_text = render_snapshot(project, stage, base_entry.after_text)
    current_text = render_stage(project, stage)
    absolute, normalized = edit_distance(base_text, current_text)
    deleted, inserted = diff_lengths(base_text, current_text)
    return DiffReport(
        stage=stage,
        absolute_distance=absolute,
        normalized_distance=normalized,
        deleted_length=deleted,
        inserted_length=inserted,
        jaccard=jaccard(base_text, current_text),
        base_text=base_text,
        current_text=current_text,
    )


def revision_metrics(project: ScriptProject) -> list[dict]:
    """Per-entry metrics over the whole revision log, for export."""
    out = []
    for entry in project.revision_log:
        record: dict = {
            "revision": entry.revision,
            "stage": entry.stage.key,
            "kind": entry.kind.value,
            "actor": entry.actor.value,
        }
        if entry.before_text is not None and entry.after_text is not None:
            try:
                before = render_snapshot(project, entry.stage, entry.before_text)
                after = render_snapshot(project, entry.stage, entry.after_text)
            except (ValueError, KeyError, json.JSONDecodeError):
                before = entry.before_text
                after = entry.after_text
            absolute, normalized = edit_distance(before, after)
            deleted, inserted = diff_lengths(before, after)
            record.update(
                absolute_distance=absolute,
                normalized_distance=round_half_up(normalized, 4),
                deleted_length=deleted,
                inserted_length=inserted,
                jaccard=round_half_up(jaccard(before, after), 4),
            )
        out.append(record)
    return out
