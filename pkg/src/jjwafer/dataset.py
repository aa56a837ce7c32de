"""On-disk dataset container: plain-text and JSON readers/writers.

One dataset file holds everything measured on one wafer: capacitance cells,
forward I-V sweeps, junction resistances, and breakdown ramps.  The text
format is line-oriented so that a corrupt line can be reported by number:

    format jjwafer-dataset 1
    units area=um2 c=fF r=MOhm len=um v=V i=A step=V rate=V/s
    wafer label=ref etch_s=0.0 rows=14 cols=14
    meta seed=42
    cap 0 3 50.0 1.23456
    cap 0 4 50.0 X
    iv 6 6 25.0 3 0.01:1.2e-12 0.02:2.5e-12 0.03:3.9e-12
    res 5.0 10.0 0.12 218.7
    ramp 6 6 25.0 0.01 0.07 3 0.01:1e-12 0.02:2.1e-12 0.03:3.4e-12

Rules: the format line comes first; a units line must precede the first data
record and must declare the canonical units exactly (datasets in other units
are rejected, not converted); `#` starts a comment; blank lines are ignored.
A capacitance value of `X` marks a probed-but-dead cell.  `meta` values may
contain spaces; everything else is whitespace-delimited.  The JSON format
carries the same payload as one object.

Readers validate eagerly and raise DatasetError subclasses carrying the
offending line number.  Writers are atomic: content goes to a temp file in
the target directory which is then renamed over the destination.

Floats are written with repr(), which round-trips exactly, so
load(save(ds)) == ds field for field.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .breakdown import RampTrace
from .capacitance import WaferMap
from .errors import (
    DatasetError,
    DatasetFormatError,
    DatasetSchemaError,
    DatasetUnitError,
)
from .geometry import JunctionGeometry
from .resistance import ResistanceRecord
from .transport import IVCurve

__all__ = [
    "FORMAT_NAME",
    "FORMAT_VERSION",
    "CANONICAL_UNITS",
    "CapRecord",
    "IVRecord",
    "ResRecordRow",
    "RampRecord",
    "DatasetFile",
    "save_dataset",
    "load_dataset",
    "loads_text",
    "dumps_text",
    "loads_json",
    "dumps_json",
    "cap_areas",
    "cap_wafer_map",
    "iv_curves",
    "ramp_traces",
    "resistance_records",
    "ground_truth",
]

FORMAT_NAME = "jjwafer-dataset"
FORMAT_VERSION = 1

CANONICAL_UNITS = {
    "area": "um2",
    "c": "fF",
    "r": "MOhm",
    "len": "um",
    "v": "V",
    "i": "A",
    "step": "V",
    "rate": "V/s",
}


@dataclass
class CapRecord:
    row: int
    col: int
    area_um2: float
    c_ff: float | None  # None marks a probed cell that gave no reading


@dataclass
class IVRecord:
    row: int
    col: int
    area_um2: float
    v: list[float]
    i: list[float]


@dataclass
class ResRecordRow:
    w_top_um: float
    w_bot_um: float
    h_um: float
    r_mohm: float


@dataclass
class RampRecord:
    row: int
    col: int
    area_um2: float
    step_v: float
    rate_v_per_s: float
    v: list[float]
    i: list[float]


@dataclass
class DatasetFile:
    """Parsed dataset: wafer attributes, free-form metadata, four record lists."""

    wafer: dict[str, str] = field(default_factory=dict)
    meta: dict[str, str] = field(default_factory=dict)
    cap: list[CapRecord] = field(default_factory=list)
    iv: list[IVRecord] = field(default_factory=list)
    res: list[ResRecordRow] = field(default_factory=list)
    ramp: list[RampRecord] = field(default_factory=list)

    @property
    def label(self) -> str:
        return self.wafer.get("label", "")


# ---------------------------------------------------------------- text format

def _fmt(x: float) -> str:
    return repr(float(x))


def _pairs(v: list[float], i: list[float]) -> str:
    return " ".join(f"{_fmt(a)}:{_fmt(b)}" for a, b in zip(v, i))


def dumps_text(ds: DatasetFile) -> str:
    lines = [f"format {FORMAT_NAME} {FORMAT_VERSION}"]
    lines.append("units " + " ".join(f"{k}={v}" for k, v in CANONICAL_UNITS.items()))
    if ds.wafer:
        for key, value in ds.wafer.items():
            _check_token(key, "wafer key")
            _check_token(value, f"wafer value for {key!r}")
        lines.append("wafer " + " ".join(f"{k}={v}" for k, v in ds.wafer.items()))
    for key, value in ds.meta.items():
        _check_token(key, "meta key")
        if "\n" in value:
            raise DatasetFormatError(f"meta value for {key!r} contains a newline")
        lines.append(f"meta {key}={value}")
    for r in ds.cap:
        val = "X" if r.c_ff is None else _fmt(r.c_ff)
        lines.append(f"cap {r.row} {r.col} {_fmt(r.area_um2)} {val}")
    for r in ds.iv:
        lines.append(f"iv {r.row} {r.col} {_fmt(r.area_um2)} {len(r.v)} "
                     + _pairs(r.v, r.i))
    for r in ds.res:
        lines.append(f"res {_fmt(r.w_top_um)} {_fmt(r.w_bot_um)} "
                     f"{_fmt(r.h_um)} {_fmt(r.r_mohm)}")
    for r in ds.ramp:
        lines.append(f"ramp {r.row} {r.col} {_fmt(r.area_um2)} {_fmt(r.step_v)} "
                     f"{_fmt(r.rate_v_per_s)} {len(r.v)} " + _pairs(r.v, r.i))
    return "\n".join(lines) + "\n"


def _check_token(s: str, what: str) -> None:
    if not s or any(ch.isspace() for ch in s) or "=" in s and what.endswith("key"):
        raise DatasetFormatError(f"{what} {s!r} must be non-empty and contain no whitespace")


def _parse_int(tok: str, what: str, line: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise DatasetFormatError(f"{what} must be an integer, got {tok!r}", line=line) from None


def _parse_float(tok: str, what: str, line: int, positive: bool = False) -> float:
    try:
        x = float(tok)
    except ValueError:
        raise DatasetFormatError(f"{what} must be a number, got {tok!r}", line=line) from None
    if not math.isfinite(x):
        raise DatasetFormatError(f"{what} must be finite, got {tok!r}", line=line)
    if positive and not (x > 0.0):
        raise DatasetSchemaError(f"{what} must be positive, got {x!r}", line=line)
    return x


def _parse_pairs(tokens: list[str], npts: int, line: int) -> tuple[list[float], list[float]]:
    if len(tokens) != npts:
        raise DatasetFormatError(
            f"expected {npts} v:i pairs, found {len(tokens)}", line=line
        )
    v, i = [], []
    for tok in tokens:
        left, sep, right = tok.partition(":")
        if not sep:
            raise DatasetFormatError(f"malformed v:i pair {tok!r}", line=line)
        v.append(_parse_float(left, "voltage", line))
        i.append(_parse_float(right, "current", line))
    for a, b in zip(v, v[1:]):
        if not (b > a):
            raise DatasetSchemaError("voltages must be strictly increasing", line=line)
    return v, i


def _check_ramp_step(v: list[float], step: float, line: int) -> None:
    diffs = np.diff(v)
    if diffs.size and (np.abs(diffs - step) > 0.01 * step).any():
        raise DatasetSchemaError(
            f"ramp voltages must advance in constant steps of {step!r}", line=line
        )


def loads_text(text: str) -> DatasetFile:
    ds = DatasetFile()
    seen_format = False
    seen_units = False
    seen_wafer = False
    cap_cells: set[tuple[int, int, float]] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kind, _, rest = line.partition(" ")
        if not seen_format:
            if kind != "format":
                raise DatasetFormatError(
                    f"first line must be the format declaration, got {kind!r}",
                    line=line_no,
                )
            toks = rest.split()
            if len(toks) != 2 or toks[0] != FORMAT_NAME:
                raise DatasetFormatError(
                    f"unrecognized format declaration {rest!r}", line=line_no
                )
            version = _parse_int(toks[1], "format version", line_no)
            if version != FORMAT_VERSION:
                raise DatasetFormatError(
                    f"unsupported format version {version}", line=line_no
                )
            seen_format = True
            continue
        if kind == "format":
            raise DatasetFormatError("duplicate format line", line=line_no)
        if kind == "units":
            if seen_units:
                raise DatasetFormatError("duplicate units line", line=line_no)
            declared = {}
            for tok in rest.split():
                key, sep, value = tok.partition("=")
                if not sep:
                    raise DatasetFormatError(f"malformed unit {tok!r}", line=line_no)
                declared[key] = value
            for key, want in CANONICAL_UNITS.items():
                got = declared.pop(key, None)
                if got is None:
                    raise DatasetUnitError(f"missing unit declaration for {key!r}",
                                           line=line_no)
                if got != want:
                    raise DatasetUnitError(
                        f"unit for {key!r} must be {want!r}, got {got!r}; "
                        "convert before ingest", line=line_no
                    )
            if declared:
                extra = ", ".join(sorted(declared))
                raise DatasetUnitError(f"unknown unit keys: {extra}", line=line_no)
            seen_units = True
            continue
        if kind == "wafer":
            if seen_wafer:
                raise DatasetFormatError("duplicate wafer line", line=line_no)
            for tok in rest.split():
                key, sep, value = tok.partition("=")
                if not sep or not key:
                    raise DatasetFormatError(f"malformed wafer attribute {tok!r}",
                                             line=line_no)
                ds.wafer[key] = value
            seen_wafer = True
            continue
        if kind == "meta":
            key, sep, value = rest.partition("=")
            if not sep or not key or " " in key:
                raise DatasetFormatError(f"malformed meta line {rest!r}", line=line_no)
            ds.meta[key] = value
            continue
        if not seen_units:
            raise DatasetUnitError(
                "units line must precede the first data record", line=line_no
            )
        toks = rest.split()
        if kind == "cap":
            if len(toks) != 4:
                raise DatasetFormatError(
                    f"cap record needs 4 fields, got {len(toks)}", line=line_no
                )
            row = _parse_int(toks[0], "row", line_no)
            col = _parse_int(toks[1], "col", line_no)
            if row < 0 or col < 0:
                raise DatasetSchemaError("die indices must be >= 0", line=line_no)
            area = _parse_float(toks[2], "area", line_no, positive=True)
            c_ff = None if toks[3] == "X" else _parse_float(toks[3], "capacitance", line_no)
            cell = (row, col, area)
            if cell in cap_cells:
                raise DatasetSchemaError(
                    f"duplicate cap record for die ({row}, {col}) at area {area!r}",
                    line=line_no,
                )
            cap_cells.add(cell)
            ds.cap.append(CapRecord(row=row, col=col, area_um2=area, c_ff=c_ff))
        elif kind == "iv":
            if len(toks) < 4:
                raise DatasetFormatError("iv record too short", line=line_no)
            row = _parse_int(toks[0], "row", line_no)
            col = _parse_int(toks[1], "col", line_no)
            area = _parse_float(toks[2], "area", line_no, positive=True)
            npts = _parse_int(toks[3], "point count", line_no)
            if npts < 2:
                raise DatasetSchemaError("iv record needs at least 2 points", line=line_no)
            v, i = _parse_pairs(toks[4:], npts, line_no)
            ds.iv.append(IVRecord(row=row, col=col, area_um2=area, v=v, i=i))
        elif kind == "res":
            if len(toks) != 4:
                raise DatasetFormatError(
                    f"res record needs 4 fields, got {len(toks)}", line=line_no
                )
            w_top = _parse_float(toks[0], "w_top", line_no, positive=True)
            w_bot = _parse_float(toks[1], "w_bot", line_no, positive=True)
            h = _parse_float(toks[2], "h", line_no, positive=True)
            r_mohm = _parse_float(toks[3], "resistance", line_no, positive=True)
            ds.res.append(ResRecordRow(w_top_um=w_top, w_bot_um=w_bot, h_um=h,
                                       r_mohm=r_mohm))
        elif kind == "ramp":
            if len(toks) < 6:
                raise DatasetFormatError("ramp record too short", line=line_no)
            row = _parse_int(toks[0], "row", line_no)
            col = _parse_int(toks[1], "col", line_no)
            area = _parse_float(toks[2], "area", line_no, positive=True)
            step = _parse_float(toks[3], "step", line_no, positive=True)
            rate = _parse_float(toks[4], "rate", line_no, positive=True)
            npts = _parse_int(toks[5], "point count", line_no)
            if npts < 2:
                raise DatasetSchemaError("ramp record needs at least 2 points",
                                         line=line_no)
            v, i = _parse_pairs(toks[6:], npts, line_no)
            _check_ramp_step(v, step, line_no)
            ds.ramp.append(RampRecord(row=row, col=col, area_um2=area, step_v=step,
                                      rate_v_per_s=rate, v=v, i=i))
        else:
            raise DatasetSchemaError(f"unknown record type {kind!r}", line=line_no)
    if not seen_format:
        raise DatasetFormatError("empty dataset: missing format declaration", line=1)
    return ds


# ---------------------------------------------------------------- json format

def dumps_json(ds: DatasetFile) -> str:
    payload = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "units": CANONICAL_UNITS,
        "wafer": ds.wafer,
        "meta": ds.meta,
        "cap": [
            {"row": r.row, "col": r.col, "area_um2": r.area_um2, "c_ff": r.c_ff}
            for r in ds.cap
        ],
        "iv": [
            {"row": r.row, "col": r.col, "area_um2": r.area_um2, "v": r.v, "i": r.i}
            for r in ds.iv
        ],
        "res": [
            {"w_top_um": r.w_top_um, "w_bot_um": r.w_bot_um, "h_um": r.h_um,
             "r_mohm": r.r_mohm}
            for r in ds.res
        ],
        "ramp": [
            {"row": r.row, "col": r.col, "area_um2": r.area_um2, "step_v": r.step_v,
             "rate_v_per_s": r.rate_v_per_s, "v": r.v, "i": r.i}
            for r in ds.ramp
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def _json_get(obj: dict, key: str, kinds, what: str):
    if key not in obj:
        raise DatasetSchemaError(f"{what}: missing key {key!r}")
    value = obj[key]
    if not isinstance(value, kinds):
        raise DatasetSchemaError(f"{what}: key {key!r} has wrong type")
    if isinstance(value, float) and not math.isfinite(value):
        raise DatasetSchemaError(f"{what}: key {key!r} must be finite")
    return value


def loads_json(text: str) -> DatasetFile:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(payload, dict):
        raise DatasetFormatError("top-level JSON value must be an object")
    if payload.get("format") != FORMAT_NAME:
        raise DatasetFormatError(f"unrecognized format {payload.get('format')!r}")
    if payload.get("version") != FORMAT_VERSION:
        raise DatasetFormatError(f"unsupported format version {payload.get('version')!r}")
    units = payload.get("units")
    if units != CANONICAL_UNITS:
        raise DatasetUnitError(
            f"units must equal {CANONICAL_UNITS!r}; convert before ingest"
        )
    ds = DatasetFile()
    wafer = payload.get("wafer", {})
    meta = payload.get("meta", {})
    if not isinstance(wafer, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in wafer.items()
    ):
        raise DatasetSchemaError("'wafer' must map strings to strings")
    if not isinstance(meta, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in meta.items()
    ):
        raise DatasetSchemaError("'meta' must map strings to strings")
    ds.wafer, ds.meta = dict(wafer), dict(meta)

    num = (int, float)
    cap_cells: set[tuple[int, int, float]] = set()
    for idx, rec in enumerate(payload.get("cap", [])):
        what = f"cap record {idx}"
        row = _json_get(rec, "row", int, what)
        col = _json_get(rec, "col", int, what)
        area = float(_json_get(rec, "area_um2", num, what))
        if row < 0 or col < 0 or area <= 0:
            raise DatasetSchemaError(f"{what}: indices must be >= 0 and area positive")
        c_ff = rec.get("c_ff")
        if c_ff is not None:
            c_ff = float(_json_get(rec, "c_ff", num, what))
        if (row, col, area) in cap_cells:
            raise DatasetSchemaError(f"{what}: duplicate cell")
        cap_cells.add((row, col, area))
        ds.cap.append(CapRecord(row=row, col=col, area_um2=area, c_ff=c_ff))
    for idx, rec in enumerate(payload.get("iv", [])):
        what = f"iv record {idx}"
        v, i = _json_series(rec, what)
        ds.iv.append(IVRecord(
            row=_json_get(rec, "row", int, what),
            col=_json_get(rec, "col", int, what),
            area_um2=float(_json_get(rec, "area_um2", num, what)),
            v=v, i=i,
        ))
    for idx, rec in enumerate(payload.get("res", [])):
        what = f"res record {idx}"
        vals = {}
        for key in ("w_top_um", "w_bot_um", "h_um", "r_mohm"):
            x = float(_json_get(rec, key, num, what))
            if not (x > 0.0):
                raise DatasetSchemaError(f"{what}: {key} must be positive")
            vals[key] = x
        ds.res.append(ResRecordRow(**vals))
    for idx, rec in enumerate(payload.get("ramp", [])):
        what = f"ramp record {idx}"
        v, i = _json_series(rec, what)
        step = float(_json_get(rec, "step_v", num, what))
        if not (step > 0.0):
            raise DatasetSchemaError(f"{what}: step_v must be positive")
        try:
            _check_ramp_step(v, step, 0)
        except DatasetError as exc:
            raise DatasetSchemaError(f"{what}: {exc.bare_message}") from None
        ds.ramp.append(RampRecord(
            row=_json_get(rec, "row", int, what),
            col=_json_get(rec, "col", int, what),
            area_um2=float(_json_get(rec, "area_um2", num, what)),
            step_v=step,
            rate_v_per_s=float(_json_get(rec, "rate_v_per_s", num, what)),
            v=v, i=i,
        ))
    return ds


def _json_series(rec: dict, what: str) -> tuple[list[float], list[float]]:
    v = _json_get(rec, "v", list, what)
    i = _json_get(rec, "i", list, what)
    if len(v) != len(i) or len(v) < 2:
        raise DatasetSchemaError(f"{what}: v and i must have equal length >= 2")
    try:
        v = [float(x) for x in v]
        i = [float(x) for x in i]
    except (TypeError, ValueError):
        raise DatasetSchemaError(f"{what}: v and i must be numeric") from None
    if not all(map(math.isfinite, v)) or not all(map(math.isfinite, i)):
        raise DatasetSchemaError(f"{what}: v and i must be finite")
    if any(b <= a for a, b in zip(v, v[1:])):
        raise DatasetSchemaError(f"{what}: voltages must be strictly increasing")
    return v, i


# ------------------------------------------------------------------------ io

def atomic_write_text(path: str, data: str) -> None:
    """Write via a same-directory temp file and rename, so readers never see
    a half-written file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_dataset(ds: DatasetFile, path: str, fmt: str | None = None) -> None:
    if fmt is None:
        fmt = "json" if str(path).endswith(".json") else "text"
    if fmt == "text":
        atomic_write_text(path, dumps_text(ds))
    elif fmt == "json":
        atomic_write_text(path, dumps_json(ds))
    else:
        raise ValueError(f"fmt must be 'text' or 'json', got {fmt!r}")


def load_dataset(path: str, fmt: str | None = None) -> DatasetFile:
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    if fmt is None:
        head = text.lstrip()
        fmt = "json" if head.startswith("{") else "text"
    if fmt == "text":
        return loads_text(text)
    if fmt == "json":
        return loads_json(text)
    raise ValueError(f"fmt must be 'text' or 'json', got {fmt!r}")


# -------------------------------------------------------- record materializers

def cap_areas(ds: DatasetFile) -> list[float]:
    """Distinct capacitor pad areas present, ascending [um^2]."""
    return sorted({rec.area_um2 for rec in ds.cap})


def _grid_shape(ds: DatasetFile) -> tuple[int, int]:
    rows = ds.wafer.get("rows")
    cols = ds.wafer.get("cols")
    cells = [(r.row, r.col) for r in ds.cap] + [(r.row, r.col) for r in ds.ramp]
    if rows is not None and cols is not None:
        try:
            shape = int(rows), int(cols)
        except ValueError:
            raise DatasetSchemaError("wafer rows/cols must be integers") from None
        if shape[0] < 1 or shape[1] < 1:
            raise DatasetSchemaError("wafer rows/cols must be positive")
        for r, c in cells:
            if r >= shape[0] or c >= shape[1]:
                raise DatasetSchemaError(
                    f"die ({r}, {c}) lies outside the declared {shape} grid"
                )
        return shape
    if not cells:
        raise DatasetSchemaError("cannot infer grid shape: no die-addressed records")
    return max(r for r, _ in cells) + 1, max(c for _, c in cells) + 1


def cap_wafer_map(ds: DatasetFile, area_um2: float) -> WaferMap:
    """WaferMap of the capacitance cells probed at one pad area."""
    rows, cols = _grid_shape(ds)
    values = np.full((rows, cols), np.nan)
    probed = np.zeros((rows, cols), dtype=bool)
    found = False
    for rec in ds.cap:
        if rec.area_um2 != area_um2:
            continue
        found = True
        probed[rec.row, rec.col] = True
        if rec.c_ff is not None:
            values[rec.row, rec.col] = rec.c_ff
    if not found:
        raise DatasetSchemaError(f"no cap records at area {area_um2!r}")
    return WaferMap(values=values, probed=probed, area_um2=area_um2,
                    label=ds.label, units="fF")


def iv_curves(ds: DatasetFile) -> list[IVCurve]:
    return [
        IVCurve(v=np.asarray(rec.v), i=np.asarray(rec.i), area_um2=rec.area_um2,
                die=(rec.row, rec.col), label=ds.label)
        for rec in ds.iv
    ]


def ramp_traces(ds: DatasetFile) -> list[RampTrace]:
    return [
        RampTrace(v=np.asarray(rec.v), i=np.asarray(rec.i), area_um2=rec.area_um2,
                  die=(rec.row, rec.col), step_v=rec.step_v,
                  rate_v_per_s=rec.rate_v_per_s)
        for rec in ds.ramp
    ]


def resistance_records(ds: DatasetFile) -> list[ResistanceRecord]:
    return [
        ResistanceRecord(
            geometry=JunctionGeometry(w_top=rec.w_top_um, w_bot=rec.w_bot_um,
                                      h=rec.h_um),
            r_mohm=rec.r_mohm,
        )
        for rec in ds.res
    ]


def ground_truth(ds: DatasetFile) -> dict | None:
    """Generator ground-truth snapshot, if this dataset carries one."""
    blob = ds.meta.get("ground_truth")
    if blob is None:
        return None
    try:
        return json.loads(blob)
    except json.JSONDecodeError:
        raise DatasetSchemaError("ground_truth metadata is not valid JSON") from None
