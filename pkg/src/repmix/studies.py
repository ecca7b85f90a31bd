"""Study summaries, replication sets, inverse-variance pooling and dataset I/O.

Datasets are read from CSV (``label,role,estimate,std_error[,scale]``) or
JSON (``{"original": {...}, "replications": [...]}``).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Optional

__all__ = [
    "DatasetError",
    "StudySummary",
    "ReplicationSet",
    "pool",
    "parse_dataset",
    "serialize_dataset",
    "load_labels",
]

CSV_FIELDS = ("label", "role", "estimate", "std_error", "scale")


class DatasetError(ValueError):
    """Invalid dataset content. ``row`` is 1-based (header excluded)."""

    def __init__(self, message, row=None, field=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.row = row
        self.field = field


@dataclass(frozen=True)
class StudySummary:
    """Effect estimate and standard error of one study.

    ``scale`` is free text (e.g. "SMD") carried through to outputs; the
    estimate is assumed to already be on an approximately normal scale.
    """

    label: str
    estimate: float
    std_error: float
    scale: Optional[str] = None

    def __post_init__(self):
        if not math.isfinite(self.estimate):
            raise ValueError(f"{self.label}: estimate must be finite")
        if not (math.isfinite(self.std_error) and self.std_error > 0):
            raise ValueError(
                f"{self.label}: std_error must be positive and finite, "
                f"got {self.std_error!r}"
            )
        object.__setattr__(self, "estimate", float(self.estimate))
        object.__setattr__(self, "std_error", float(self.std_error))

    @property
    def variance(self) -> float:
        return self.std_error**2

    def rounded(self, digits: int = 2) -> "StudySummary":
        """Copy with estimate and standard error rounded to ``digits``."""
        return StudySummary(
            self.label,
            round(self.estimate, digits),
            round(self.std_error, digits),
            self.scale,
        )


@dataclass(frozen=True)
class ReplicationSet:
    original: StudySummary
    replications: tuple = field(default_factory=tuple)

    def __post_init__(self):
        reps = tuple(self.replications)
        object.__setattr__(self, "replications", reps)
        if not reps:
            raise DatasetError("no replications")
        labels = [self.original.label] + [r.label for r in reps]
        seen = set()
        for lab in labels:
            if lab in seen:
                raise DatasetError(f"duplicate label {lab!r}", field="label")
            seen.add(lab)

    @property
    def m(self) -> int:
        return len(self.replications)

    def pooled(self, label: str = "pooled", round_digits: Optional[int] = None):
        """Pooled replication summary, optionally rounded for display parity."""
        p = pool(self.replications, label=label)
        return p.rounded(round_digits) if round_digits is not None else p


def pool(replications: Iterable[StudySummary], label: str = "pooled") -> StudySummary:
    """Inverse-variance weighted (fixed-effect) pooling.

    Parameters
    ----------
    replications : iterable of StudySummary
    label : str
        Label of the returned summary.

    Returns
    -------
    StudySummary
        Weighted mean of the estimates with weights ``1 / se**2`` and
        standard error ``sqrt(1 / sum(1 / se**2))``.

    Examples
    --------
    >>> p = pool([StudySummary("a", 0.1, 0.1), StudySummary("b", 0.3, 0.1)])
    >>> round(p.estimate, 12), round(p.std_error, 6)
    (0.2, 0.070711)
    """
    reps = list(replications)
    if not reps:
        raise ValueError("cannot pool an empty sequence of studies")
    # sort the terms so the float sums do not depend on input order
    terms = sorted((1.0 / r.std_error**2, r.estimate) for r in reps)
    precision = math.fsum(w for w, _ in terms)
    estimate = math.fsum(w * x for w, x in terms) / precision
    scales = {r.scale for r in reps}
    scale = scales.pop() if len(scales) == 1 else None
    return StudySummary(label, estimate, math.sqrt(1.0 / precision), scale)


def _to_float(value, row, name):
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise DatasetError(f"not a number: {value!r}", row=row, field=name) from None
    if not math.isfinite(out):
        raise DatasetError(f"not finite: {value!r}", row=row, field=name)
    return out


def _make_study(rec, row):
    label = rec.get("label")
    if label is None or str(label).strip() == "":
        raise DatasetError("missing label", row=row, field="label")
    estimate = _to_float(rec.get("estimate"), row, "estimate")
    se = _to_float(rec.get("std_error"), row, "std_error")
    if se <= 0:
        raise DatasetError(f"must be positive, got {se!r}", row=row, field="std_error")
    scale = rec.get("scale") or None
    return StudySummary(str(label).strip(), estimate, se, scale)


def _assemble(original, reps):
    if original is None:
        raise DatasetError("missing original study", field="role")
    if not reps:
        raise DatasetError("no replications", field="role")
    labels = {}
    for row, study in [(None, original)] + reps:
        if study.label in labels:
            raise DatasetError(f"duplicate label {study.label!r}", row=row, field="label")
        labels[study.label] = row
    return ReplicationSet(original, tuple(s for _, s in reps))


def _parse_csv(text):
    reader = csv.DictReader(io.StringIO(text))
    header = [h.strip() for h in (reader.fieldnames or [])]
    missing = [h for h in CSV_FIELDS[:4] if h not in header]
    if missing:
        raise DatasetError(f"CSV header lacks column(s) {', '.join(missing)}")
    reader.fieldnames = header
    original, reps = None, []
    for i, rec in enumerate(reader, start=1):
        role = (rec.get("role") or "").strip().lower()
        study = _make_study(rec, i)
        if role == "original":
            if original is not None:
                raise DatasetError("more than one original study", row=i, field="role")
            original = study
        elif role == "replication":
            reps.append((i, study))
        else:
            raise DatasetError(f"unknown role {role!r}", row=i, field="role")
    return _assemble(original, reps)


def _parse_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DatasetError("top-level JSON value must be an object")
    if not isinstance(doc.get("original"), dict):
        raise DatasetError("missing original study", field="original")
    original = _make_study(doc["original"], None)
    raw_reps = doc.get("replications")
    if not isinstance(raw_reps, list):
        raise DatasetError("'replications' must be a list", field="replications")
    reps = []
    for i, rec in enumerate(raw_reps, start=1):
        if not isinstance(rec, dict):
            raise DatasetError("replication entry must be an object", row=i)
        reps.append((i, _make_study(rec, i)))
    return _assemble(original, reps)


def parse_dataset(raw, format: str = "csv") -> ReplicationSet:
    """Parse a dataset from bytes or text in ``"csv"`` or ``"json"`` format.

    Raises
    ------
    DatasetError
        With ``row``/``field`` set where the problem can be located.
    """
    if isinstance(raw, (bytes, bytearray)):
        try:
            raw = bytes(raw).decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise DatasetError(f"input is not valid UTF-8: {exc}") from None
    fmt = format.lower()
    if fmt == "csv":
        return _parse_csv(raw)
    if fmt == "json":
        return _parse_json(raw)
    raise ValueError(f"unknown dataset format {format!r}")


def _study_record(s: StudySummary, role=None):
    rec = {"label": s.label}
    if role is not None:
        rec["role"] = role
    rec["estimate"] = s.estimate
    rec["std_error"] = s.std_error
    if s.scale is not None:
        rec["scale"] = s.scale
    return rec


def serialize_dataset(data: ReplicationSet, format: str = "csv") -> str:
    """Inverse of :func:`parse_dataset`; floats are written with ``repr``."""
    fmt = format.lower()
    if fmt == "json":
        doc = {
            "original": _study_record(data.original),
            "replications": [_study_record(r) for r in data.replications],
        }
        return json.dumps(doc, indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown dataset format {format!r}")
    studies = [("original", data.original)] + [("replication", r) for r in data.replications]
    with_scale = any(s.scale is not None for _, s in studies)
    fields = CSV_FIELDS if with_scale else CSV_FIELDS[:4]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for role, s in studies:
        row = [s.label, role, repr(s.estimate), repr(s.std_error)]
        if with_scale:
            row.append(s.scale or "")
        writer.writerow(row)
    return buf.getvalue()


def load_labels() -> ReplicationSet:
    """The bundled "Labels" example: one original study and three replications."""
    text = resources.files("repmix").joinpath("datasets/labels.csv").read_text("utf-8")
    return parse_dataset(text, "csv")

