"""Measurement CSV ingestion and export.

Row format: subject_id,test,day,value with a mandatory header. Value is
decimal arcsec or the literal "OL"; test is one of HD, ST_far, ST_near,
TNO; day is 1 or 2.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Sequence, Union

from .errors import DatasetError, UnmappableValue
from .ol import OL, is_ol
from .stats import MeasurementRecord, Test

HEADER = ("subject_id", "test", "day", "value")

_TESTS = {t.value: t for t in Test}


def parse_dataset(text: str) -> list[MeasurementRecord]:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise DatasetError("empty dataset: header row required", line_number=1)
    header = [cell.strip() for cell in rows[0]]
    if header != list(HEADER):
        raise DatasetError(
            f"expected header {','.join(HEADER)}, got {','.join(header)}", line_number=1
        )
    records = []
    for line_number, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 4:
            raise DatasetError(
                f"expected 4 fields, got {len(row)}", line_number=line_number
            )
        subject_id, test_raw, day_raw, value_raw = (cell.strip() for cell in row)
        if not subject_id:
            raise DatasetError("empty subject_id", line_number=line_number)
        if test_raw not in _TESTS:
            raise DatasetError(f"unknown test {test_raw!r}", line_number=line_number)
        try:
            day = int(day_raw)
        except ValueError:
            raise DatasetError(f"day must be an integer, got {day_raw!r}", line_number=line_number)
        if day not in (1, 2):
            raise DatasetError(f"day must be 1 or 2, got {day}", line_number=line_number)
        if value_raw == "OL":
            value = OL
        else:
            try:
                value = float(value_raw)
            except ValueError:
                raise DatasetError(
                    f"value must be decimal arcsec or OL, got {value_raw!r}",
                    line_number=line_number,
                )
        try:
            records.append(
                MeasurementRecord(subject_id=subject_id, test=_TESTS[test_raw], day=day, value=value)
            )
        except UnmappableValue as exc:
            raise DatasetError(str(exc), line_number=line_number)
    return records


def read_dataset(path: Union[str, Path]) -> list[MeasurementRecord]:
    return parse_dataset(Path(path).read_text(encoding="utf-8"))


def write_dataset(records: Sequence[MeasurementRecord], path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(HEADER)
        for r in records:
            value = "OL" if is_ol(r.value) else format(r.value, "g")
            writer.writerow([r.subject_id, r.test.value, r.day, value])
