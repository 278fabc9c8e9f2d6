"""Session record serialization and append-only JSON-lines persistence."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .geometry import DisparityLevel, DisplayProfile, LevelTable
from .ol import OL, is_ol
from .renderer import Orientation
from .staircase import SessionRecord, TrialRecord


def _encode_outcome(outcome):
    if outcome is None:
        return None
    if is_ol(outcome):
        return "OL"
    return float(outcome)


def _decode_outcome(raw):
    if raw is None:
        return None
    if raw == "OL":
        return OL
    return float(raw)


def level_table_to_dict(table: LevelTable) -> dict:
    return {
        "distance_m": table.distance_m,
        "scale_k": table.scale_k,
        "levels": [
            {
                "index": lv.index,
                "pixel_shift": lv.pixel_shift,
                "arcsec": lv.arcsec,
                "arcsec_rounded": lv.arcsec_rounded,
            }
            for lv in table.levels
        ],
    }


def level_table_from_dict(d: dict) -> LevelTable:
    levels = tuple(
        DisparityLevel(
            index=lv["index"],
            pixel_shift=lv["pixel_shift"],
            arcsec=lv["arcsec"],
            arcsec_rounded=lv["arcsec_rounded"],
        )
        for lv in d["levels"]
    )
    return LevelTable(distance_m=d["distance_m"], levels=levels, scale_k=d.get("scale_k"))


def trial_to_dict(t: TrialRecord) -> dict:
    return {
        "level_index": t.level_index,
        "pixel_shift": t.pixel_shift,
        "arcsec": t.arcsec,
        "presented_orientation": t.presented_orientation.value,
        "response_orientation": t.response_orientation.value if t.response_orientation else None,
        "correct": t.correct,
        "elapsed_ms": t.elapsed_ms,
    }


def trial_from_dict(d: dict) -> TrialRecord:
    return TrialRecord(
        level_index=d["level_index"],
        pixel_shift=d["pixel_shift"],
        arcsec=d["arcsec"],
        presented_orientation=Orientation(d["presented_orientation"]),
        response_orientation=(
            Orientation(d["response_orientation"]) if d.get("response_orientation") else None
        ),
        correct=d["correct"],
        elapsed_ms=d.get("elapsed_ms", 0),
    )


def record_to_dict(record: SessionRecord) -> dict:
    profile = None
    if record.profile is not None:
        profile = {
            "ppi": record.profile.ppi,
            "width_px": record.profile.width_px,
            "height_px": record.profile.height_px,
        }
    return {
        "session_id": record.session_id,
        "created_at": record.created_at,
        "distance_m": record.distance_m,
        "reference_m": record.reference_m,
        "seed": record.seed,
        "profile": profile,
        "level_table": level_table_to_dict(record.level_table),
        "trials": [trial_to_dict(t) for t in record.trials],
        "outcome": _encode_outcome(record.outcome),
    }


def record_from_dict(d: dict) -> SessionRecord:
    profile = None
    if d.get("profile"):
        profile = DisplayProfile(
            ppi=d["profile"]["ppi"],
            width_px=d["profile"]["width_px"],
            height_px=d["profile"]["height_px"],
        )
    return SessionRecord(
        session_id=d["session_id"],
        created_at=d["created_at"],
        distance_m=d["distance_m"],
        reference_m=d["reference_m"],
        seed=d["seed"],
        level_table=level_table_from_dict(d["level_table"]),
        trials=[trial_from_dict(t) for t in d["trials"]],
        outcome=_decode_outcome(d.get("outcome")),
        profile=profile,
    )


class SessionLog:
    """Append-only JSONL store; the last line per session id wins."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)

    def append(self, record: SessionRecord) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as handle:
            handle.write(json.dumps(record_to_dict(record)) + "\n")

    def load_latest(self) -> dict[str, SessionRecord]:
        out: dict[str, SessionRecord] = {}
        if not self.path.exists():
            return out
        for line in self.path.read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line:
                continue
            record = record_from_dict(json.loads(line))
            out[record.session_id] = record
        return out
