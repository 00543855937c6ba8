"""Hub screening: thresholded graph plus per-discovery profiles and p-values."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import build_graph, counts_by_delta, threshold_profile
from .stats import ScreeningParams, discovery_pvalue
from .errors import ValidationError
from .zscore import DataMatrix, ScoreMatrix, score_matrix


@dataclass
class DiscoveryRecord:
    vertex: int
    label: str
    degree: int
    profile: list[float]
    lambdas: list[float]
    pvalues: list[float]

    def to_dict(self) -> dict:
        return {
            "vertex": self.vertex,
            "label": self.label,
            "degree": self.degree,
            "profile": self.profile,
            "lambdas": self.lambdas,
            "pvalues": self.pvalues,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DiscoveryRecord":
        return cls(
            vertex=int(d["vertex"]),
            label=str(d["label"]),
            degree=int(d["degree"]),
            profile=[float(x) for x in d["profile"]],
            lambdas=[float(x) for x in d["lambdas"]],
            pvalues=[float(x) for x in d["pvalues"]],
        )


@dataclass
class ScreeningReport:
    params: ScreeningParams
    discoveries: list[DiscoveryRecord] = field(default_factory=list)
    counts: list[int] = field(default_factory=list)  # counts[k] is N_{k+1, rho*}
    d_max: int = 0
    delta_max: int | None = None

    def count(self, delta: int) -> int:
        return self.counts[delta - 1] if 1 <= delta <= len(self.counts) else 0

    def record(self, vertex: int) -> DiscoveryRecord | None:
        for r in self.discoveries:
            if r.vertex == vertex:
                return r
        return None


def screen(
    Z: ScoreMatrix,
    rho_star: float,
    params: ScreeningParams,
    engine: str = "exact",
    threads: int = 1,
    delta_max: int | None = None,
    graph=None,
) -> ScreeningReport:
    """Screen score vectors at ``rho_star`` and attach rates and p-values.

    ``delta_max`` optionally truncates profiles (and per-degree counts) to
    degree levels 1..delta_max; the stored degree is always the full one.
    """
    if not 0.0 < rho_star <= 1.0:
        raise ValidationError(f"rho_star must lie in (0, 1] (got {rho_star})")
    if delta_max is not None and delta_max < 1:
        raise ValidationError("delta_max must be >= 1")
    params = params.with_(rho=float(rho_star), delta=1)
    G = graph if graph is not None else build_graph(Z, rho_star, engine=engine, threads=threads)
    deg = G.degrees
    records = []
    for i in np.flatnonzero(deg > 0):
        prof = threshold_profile(G, int(i))
        if delta_max is not None:
            prof = prof[:delta_max]
        lams, pvs = [], []
        for k, r in enumerate(prof, start=1):
            lam, pv = discovery_pvalue(k, float(r), params)
            lams.append(lam)
            pvs.append(pv)
        records.append(
            DiscoveryRecord(int(i), Z.labels[i], int(deg[i]), [float(x) for x in prof], lams, pvs)
        )
    counts = counts_by_delta(G)
    if delta_max is not None:
        counts = counts[:delta_max]
    return ScreeningReport(
        params=params,
        discoveries=records,
        counts=counts,
        d_max=int(deg.max()) if deg.size else 0,
        delta_max=delta_max,
    )


def screen_data(X: DataMatrix, rho_star: float, mode="parcor", **kwargs) -> ScreeningReport:
    """Full pipeline from raw data: scores, graph, report."""
    Z = score_matrix(X, mode)
    params = kwargs.pop("params", None) or ScreeningParams(n=X.n, p=X.p, mode=mode)
    return screen(Z, rho_star, params, **kwargs)
