"""Synthetic null data and Monte Carlo checks of the Poisson approximations.

Every trial draws from its own Philox stream keyed by (seed, trial), so a
trial's matrix does not depend on how many trials run or in which order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ValidationError
from .graph import build_graph, counts_by_delta
from .stats import (
    Mode,
    PhiConvention,
    ScreeningParams,
    critical_threshold,
    expected_hub_count,
    fwer,
)
from .zscore import DataMatrix, score_matrix


@dataclass(frozen=True)
class SimSpec:
    n: int
    p: int
    seed: int = 0
    model: str = "identity"  # identity | block | elliptical
    k: int = 0
    block_rho: float = 0.0
    dof: float = 0.0
    trials: int = 1

    def __post_init__(self):
        if self.model not in ("identity", "block", "elliptical"):
            raise ValidationError(f"unknown model {self.model!r}")
        if self.n < 3 or self.p < 2:
            raise ValidationError("need n >= 3 and p >= 2")
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        if self.k:
            if not 1 < self.k < self.p:
                raise ValidationError("block size k must satisfy 1 < k < p")
            if not abs(self.block_rho) < 1:
                raise ValidationError("|block_rho| must be < 1")
            if self.block_rho < -1.0 / (self.k - 1):
                raise ValidationError("block_rho below -1/(k-1) is not a valid correlation")
        elif self.model == "block":
            raise ValidationError("block model needs k > 1")
        if self.model == "elliptical" and not self.dof > 2:
            raise ValidationError("elliptical model needs dof > 2")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(int(trial) << 64) | int(seed)))


def _block_factor(k: int, block_rho: float) -> np.ndarray:
    C = np.full((k, k), block_rho)
    np.fill_diagonal(C, 1.0)
    return np.linalg.cholesky(C)


def generate(spec: SimSpec, trial: int = 0) -> DataMatrix:
    rng = trial_rng(spec.seed, trial)
    X = rng.standard_normal((spec.n, spec.p))
    if spec.k:
        L = _block_factor(spec.k, spec.block_rho)
        X[:, : spec.k] = X[:, : spec.k] @ L.T
    if spec.model == "elliptical":
        w = rng.chisquare(spec.dof, size=spec.n)
        X *= np.sqrt(spec.dof / w)[:, None]
    return DataMatrix(X)


@dataclass
class MonteCarloResult:
    empirical_P_N_positive: float
    empirical_mean_N: float
    standard_error: float
    trials: int
    theoretical_fwer: dict
    theoretical_expected_count: float
    theoretical_xi_J: float
    rho: float
    delta: int
    mode: str
    counts: list[int]

    def to_dict(self) -> dict:
        return asdict(self)


def _trial_count(spec: SimSpec, trial: int, rho: float, delta: int, mode: Mode) -> int:
    Z = score_matrix(generate(spec, trial), mode.value)
    deg = build_graph(Z, rho).degrees
    return int(np.count_nonzero(deg >= delta))


def run_monte_carlo(
    spec: SimSpec, rho: float, delta: int, mode="corr", J: float = 1.0, workers: int = 1
) -> MonteCarloResult:
    if not 0.0 < rho < 1.0:
        raise ValidationError("rho must lie in (0, 1)")
    mode = Mode(mode)

    def one(t):
        return _trial_count(spec, t, rho, delta, mode)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(one, range(spec.trials)))
    else:
        counts = [one(t) for t in range(spec.trials)]
    c = np.asarray(counts)
    f = float(np.mean(c > 0))
    params = ScreeningParams(spec.n, spec.p, delta, rho, J, mode)
    ec = expected_hub_count(params)
    return MonteCarloResult(
        empirical_P_N_positive=f,
        empirical_mean_N=float(c.mean()),
        standard_error=math.sqrt(f * (1 - f) / spec.trials),
        trials=spec.trials,
        theoretical_fwer={cv.value: fwer(params.with_(phi_convention=cv)) for cv in PhiConvention},
        theoretical_expected_count=ec.binomial,
        theoretical_xi_J=ec.xi_J,
        rho=rho,
        delta=delta,
        mode=mode.value,
        counts=counts,
    )


@dataclass
class SweepRow:
    rho: float
    empirical_mean: float
    predicted: float
    xi_J: float
    nearest_critical: bool = False


def phase_sweep(spec: SimSpec, delta: int, rho_grid, mode="corr", J: float = 1.0) -> list[SweepRow]:
    """Mean N_{delta,rho} over trials on a grid, next to the binomial prediction.

    Each trial's graph is built once at the smallest grid value and the other
    grid points are read off by thresholding its magnitudes.
    """
    grid = [float(r) for r in rho_grid]
    if any(not 0.0 < r <= 1.0 for r in grid):
        raise ValidationError("grid values must lie in (0, 1]")
    mode = Mode(mode)
    lo = min(grid)
    sums = np.zeros(len(grid))
    for t in range(spec.trials):
        Z = score_matrix(generate(spec, t), mode.value)
        G = build_graph(Z, lo)
        for g, r in enumerate(grid):
            src = np.repeat(np.arange(G.p), G.degrees)
            deg = np.bincount(src[G.magnitudes >= r], minlength=G.p)
            sums[g] += np.count_nonzero(deg >= delta)
    try:
        rc = critical_threshold(spec.p, spec.n, delta, J)
    except (ValidationError, ArithmeticError):
        rc = None
    rows = []
    for g, r in enumerate(grid):
        ec = expected_hub_count(ScreeningParams(spec.n, spec.p, delta, r, J, mode))
        rows.append(SweepRow(r, float(sums[g] / spec.trials), ec.binomial, ec.xi_J))
    if rc is not None and rows:
        best = min(range(len(rows)), key=lambda g: abs(rows[g].rho - rc))
        rows[best].nearest_critical = True
    return rows
