"""Strict CSV ingestion for macro panels, plus run artifacts.

The input format is a plain CSV with an ISO-date first column: one header row
of unique series names, one metadata row of transformation codes (first cell
literally ``tcode`` or empty), observations after that. Parsing is strict --
any malformed cell fails with its line and column -- because silently coerced
macro data is worse than no data.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .forecast import DataValidationError, apply_tcode, tcode_loss
from .statcore import SeriesPanel

__all__ = ["IngestResult", "ingest_csv", "write_forecasts_csv", "sha256_of", "RunManifest"]


@dataclass
class IngestResult:
    """Transformed panel plus the raw levels it came from.

    ``panel`` holds the per-column transformed series aligned to a common
    sample (every column loses the worst-case differencing head, recorded in
    ``rows_dropped``); ``dates`` are the dates of the aligned rows and
    ``raw`` / ``raw_dates`` keep the untouched input for target construction.
    """

    panel: SeriesPanel
    dates: list
    raw: np.ndarray = field(repr=False)
    raw_dates: list = field(repr=False)
    rows_dropped: int = 0


def _parse_float(cell: str, line_no: int, col_name: str) -> float:
    text = cell.strip()
    if not text:
        raise DataValidationError(f"line {line_no}: empty value in column {col_name!r}")
    try:
        return float(text)
    except ValueError:
        raise DataValidationError(
            f"line {line_no}: cannot parse {cell!r} in column {col_name!r} as a number"
        ) from None


def ingest_csv(path) -> IngestResult:
    """Read, validate and transform a panel CSV.

    Raises :class:`DataValidationError` with a line/column diagnostic on the
    first violation: wrong field count, unknown transformation code,
    unparseable number or date, or a non-positive value under a log code.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    rows = [ln.split(",") for ln in lines if ln.strip() != ""]
    if len(rows) < 3:
        raise DataValidationError("file needs a header, a tcode row and data rows")

    header = [c.strip() for c in rows[0]]
    if len(header) < 2:
        raise DataValidationError("header must contain a date column and at least one series")
    names = header[1:]
    if len(set(names)) != len(names):
        raise DataValidationError("series names must be unique")

    tcode_row = [c.strip() for c in rows[1]]
    if len(tcode_row) != len(header):
        raise DataValidationError("line 2: tcode row has wrong number of fields")
    if tcode_row[0] and tcode_row[0].lower() != "tcode":
        raise DataValidationError("line 2: first cell of the metadata row must be 'tcode'")
    tcodes = []
    for name, cell in zip(names, tcode_row[1:]):
        try:
            code = int(cell)
        except ValueError:
            raise DataValidationError(
                f"line 2: tcode {cell!r} for column {name!r} is not an integer"
            ) from None
        if code not in range(1, 8):
            raise DataValidationError(f"line 2: unknown tcode {code} for column {name!r}")
        tcodes.append(code)

    dates = []
    data = []
    for i, row in enumerate(rows[2:], start=3):
        if len(row) != len(header):
            raise DataValidationError(
                f"line {i}: expected {len(header)} fields, found {len(row)}"
            )
        date_text = row[0].strip()
        try:
            _dt.date.fromisoformat(date_text)
        except ValueError:
            raise DataValidationError(
                f"line {i}: first column {date_text!r} is not an ISO date"
            ) from None
        dates.append(date_text)
        data.append([_parse_float(c, i, names[j]) for j, c in enumerate(row[1:])])
    raw = np.asarray(data, dtype=float)
    if raw.shape[0] < 5:
        raise DataValidationError("need at least 5 observations")

    for j, (name, code) in enumerate(zip(names, tcodes)):
        if code in (4, 5, 6):
            bad = np.flatnonzero(raw[:, j] <= 0.0)
            if bad.size:
                raise DataValidationError(
                    f"line {bad[0] + 3}: non-positive value in column {name!r} "
                    f"under log transformation code {code}"
                )

    # every transformed column keeps rows from max_loss on
    max_loss = max(tcode_loss(c) for c in tcodes)
    cols = [
        apply_tcode(raw[:, j], code)[max_loss - tcode_loss(code) :]
        for j, code in enumerate(tcodes)
    ]
    panel = SeriesPanel(np.column_stack(cols), tuple(names), tuple(tcodes))
    return IngestResult(
        panel=panel,
        dates=dates[max_loss:],
        raw=raw,
        raw_dates=dates,
        rows_dropped=max_loss,
    )


def write_forecasts_csv(path, dates, results: dict) -> None:
    """One row per origin: realization date, actual, one prediction column
    per method. ``dates[k]`` must be the realization date for row k."""
    methods = list(results)
    first = results[methods[0]]
    for m in methods[1:]:
        if not np.array_equal(results[m].origins, first.origins):
            raise ValueError("forecast results cover different origins")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("date,actual," + ",".join(f"pred_{m}" for m in methods) + "\n")
        for k in range(len(first.origins)):
            row = [str(dates[k]), f"{first.actuals[k]:.17g}"]
            row += [f"{results[m].predictions[k]:.17g}" for m in methods]
            fh.write(",".join(row) + "\n")


def sha256_of(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """Provenance record written next to every command's outputs."""

    command: str
    config: dict
    outputs: dict = field(default_factory=dict)
    wall_clock_s: float = 0.0
    version: str = ""

    def add_output(self, path) -> None:
        import os

        self.outputs[os.path.basename(str(path))] = sha256_of(path)

    def write(self, path) -> None:
        payload = {
            "command": self.command,
            "config": self.config,
            "outputs": self.outputs,
            "wall_clock_s": self.wall_clock_s,
            "version": self.version,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
