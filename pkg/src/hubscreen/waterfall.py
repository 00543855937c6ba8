"""Waterfall curves and per-vertex p-value trajectories."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import VertexNotDiscovered
from .screen import ScreeningReport


@dataclass(frozen=True)
class CurvePoint:
    vertex: int
    label: str
    rho: float
    lam: float
    pvalue: float


@dataclass
class WaterfallCurves:
    curves: dict[int, list[CurvePoint]]
    d_max: int


@dataclass
class Trajectory:
    vertex: int
    label: str
    points: list[tuple[int, float, float]]  # (delta, rho_i(delta), p-value)


def build_waterfall(report: ScreeningReport) -> WaterfallCurves:
    """Curve delta lists every vertex with degree >= delta, largest p-value first."""
    curves: dict[int, list[CurvePoint]] = {}
    for rec in report.discoveries:
        for k, (r, lam, pv) in enumerate(zip(rec.profile, rec.lambdas, rec.pvalues), start=1):
            curves.setdefault(k, []).append(CurvePoint(rec.vertex, rec.label, r, lam, pv))
    for pts in curves.values():
        pts.sort(key=lambda c: (-c.pvalue, c.vertex))
    return WaterfallCurves(dict(sorted(curves.items())), max(curves, default=0))


def trajectory(report: ScreeningReport, vertex) -> Trajectory:
    """Trajectory of one discovery across degree levels; ``vertex`` is an id or a label."""
    for rec in report.discoveries:
        if rec.vertex == vertex or rec.label == vertex:
            pts = [(k, r, pv) for k, (r, pv) in enumerate(zip(rec.profile, rec.pvalues), start=1)]
            return Trajectory(rec.vertex, rec.label, pts)
    raise VertexNotDiscovered(vertex)
