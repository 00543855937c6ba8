"""Delimited-text ingestion and report serialization."""

from __future__ import annotations

import csv
import enum
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import EmptyMatrix, MissingData, ParseError, ValidationError
from .screen import DiscoveryRecord, ScreeningReport
from .stats import ScreeningParams
from .waterfall import WaterfallCurves, build_waterfall
from .zscore import DataMatrix, default_labels

SCHEMA_VERSION = "1"
MISSING_TOKENS = frozenset({"", "na", "nan", "null", "none", "?"})
WATERFALL_HEADER = ["delta", "rank", "vertex_label", "rho_i_delta", "lambda_value", "p_value"]


class Orientation(str, enum.Enum):
    SAMPLES_AS_ROWS = "samples"
    VARIABLES_AS_ROWS = "variables"


class MissingPolicy(str, enum.Enum):
    FAIL = "fail"
    DROP_COLUMNS = "drop"


@dataclass
class IngestOptions:
    delimiter: str = ","
    has_header: bool = True
    orientation: Orientation = Orientation.SAMPLES_AS_ROWS
    missing_policy: MissingPolicy = MissingPolicy.FAIL


@dataclass
class LoadedMatrix:
    data: DataMatrix
    dropped: list[str] = field(default_factory=list)
    sha256: str = ""


def fmt_float(x: float) -> str:
    """17 significant digits, period decimal separator, independent of locale."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def load_matrix(path, opts: IngestOptions | None = None) -> LoadedMatrix:
    opts = opts or IngestOptions()
    raw = Path(path).read_bytes()
    text = raw.decode("utf-8-sig")
    rows = [r for r in csv.reader(io.StringIO(text), delimiter=opts.delimiter) if any(c.strip() for c in r)]
    header = None
    if opts.has_header and rows:
        header, rows = rows[0], rows[1:]
    if not rows:
        raise EmptyMatrix(f"{path}: no data rows")

    variables_as_rows = Orientation(opts.orientation) is Orientation.VARIABLES_AS_ROWS
    names = None
    if variables_as_rows:
        # first column holds variable names when a header is present
        if header is not None:
            names = [r[0].strip() for r in rows]
            rows = [r[1:] for r in rows]
    elif header is not None:
        names = [h.strip() for h in header]

    width = len(rows[0])
    values = np.empty((len(rows), width))
    missing = np.zeros((len(rows), width), dtype=bool)
    for r, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(r + 1 + bool(header), len(row), f"<{len(row)} fields, expected {width}>")
        for c, tok in enumerate(row):
            t = tok.strip()
            if t.lower() in MISSING_TOKENS:
                missing[r, c] = True
                values[r, c] = np.nan
                continue
            try:
                values[r, c] = float(t)
            except ValueError:
                raise ParseError(r + 1 + bool(header), c + 1, tok) from None
            if not math.isfinite(values[r, c]):
                missing[r, c] = True
    if variables_as_rows:
        values, missing = values.T, missing.T
    p = values.shape[1]
    if names is None or len(names) != p:
        names = default_labels(p)

    bad = np.flatnonzero(missing.any(axis=0))
    dropped: list[str] = []
    if bad.size:
        if MissingPolicy(opts.missing_policy) is MissingPolicy.FAIL:
            raise MissingData([names[j] for j in bad])
        dropped = [names[j] for j in bad]
        keep = np.setdiff1d(np.arange(p), bad)
        values = values[:, keep]
        names = [names[j] for j in keep]
    if values.shape[1] == 0:
        raise EmptyMatrix(f"{path}: no complete columns")
    return LoadedMatrix(DataMatrix(values, names), dropped, hashlib.sha256(raw).hexdigest())


def report_to_dict(report: ScreeningReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "params": report.params.to_dict(),
        "delta_max": report.delta_max,
        "d_max": report.d_max,
        "counts": {str(k): c for k, c in enumerate(report.counts, start=1)},
        "discoveries": [r.to_dict() for r in report.discoveries],
    }


def report_from_dict(d: dict) -> ScreeningReport:
    version = str(d.get("schema_version", ""))
    if version != SCHEMA_VERSION:
        raise ValidationError(f"unsupported report schema version {version!r}")
    counts = d.get("counts", {})
    return ScreeningReport(
        params=ScreeningParams.from_dict(d["params"]),
        discoveries=[DiscoveryRecord.from_dict(r) for r in d.get("discoveries", [])],
        counts=[int(counts[str(k)]) for k in range(1, len(counts) + 1)],
        d_max=int(d.get("d_max", 0)),
        delta_max=d.get("delta_max"),
    )


def dumps_report(report: ScreeningReport) -> str:
    # repr floats round-trip exactly; saturated rates serialize as Infinity
    return json.dumps(report_to_dict(report), indent=2, sort_keys=False) + "\n"


def load_report(path) -> ScreeningReport:
    return report_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def waterfall_csv(curves: WaterfallCurves) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(WATERFALL_HEADER)
    for delta, pts in curves.curves.items():
        for rank, c in enumerate(pts, start=1):
            w.writerow([delta, rank, c.label, fmt_float(c.rho), fmt_float(c.lam), fmt_float(c.pvalue)])
    return buf.getvalue()


def trajectory_csv(traj) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["vertex_label", "delta", "rho_i_delta", "p_value"])
    for delta, rho, pv in traj.points:
        w.writerow([traj.label, delta, fmt_float(rho), fmt_float(pv)])
    return buf.getvalue()


def summary_text(report: ScreeningReport) -> str:
    p = report.params
    lines = [
        f"hub screening ({p.mode.value}), n={p.n}, p={p.p}, rho*={fmt_float(p.rho)}, "
        f"J={fmt_float(p.J)}, phi convention={p.phi_convention.value}",
        f"discoveries: {len(report.discoveries)}, maximum degree: {report.d_max}",
    ]
    for k, c in enumerate(report.counts, start=1):
        lines.append(f"  N[delta>={k}] = {c}")
    return "\n".join(lines) + "\n"


@dataclass
class ReportBundle:
    report: ScreeningReport
    waterfall: WaterfallCurves | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.waterfall is None:
            self.waterfall = build_waterfall(self.report)


def write_report(bundle: ReportBundle, out_dir) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "report": out / "report.json",
        "waterfall": out / "waterfall.csv",
        "summary": out / "summary.txt",
        "provenance": out / "provenance.json",
    }
    prov = {"tool": "hubscreen", "version": __version__, "params": bundle.report.params.to_dict()}
    prov.update(bundle.provenance)
    contents = {
        "report": dumps_report(bundle.report),
        "waterfall": waterfall_csv(bundle.waterfall),
        "summary": summary_text(bundle.report),
        "provenance": json.dumps(prov, indent=2) + "\n",
    }
    for key, text in contents.items():
        tmp = files[key].with_suffix(files[key].suffix + ".tmp")
        tmp.write_text(text, encoding="utf-8", newline="")
        os.replace(tmp, files[key])
    return files
