import math

import numpy as np
import pytest
from scipy import optimize

from hubscreen.errors import ValidationError
from hubscreen.sim import SimSpec, generate, phase_sweep, run_monte_carlo, trial_rng
from hubscreen.stats import ScreeningParams, critical_threshold, expected_hub_count, fwer


def test_generate_is_deterministic():
    spec = SimSpec(n=15, p=40, seed=123)
    a, b = generate(spec, 3).values, generate(spec, 3).values
    assert np.array_equal(a, b)
    assert not np.array_equal(a, generate(spec, 4).values)
    assert not np.array_equal(a, generate(SimSpec(n=15, p=40, seed=124), 3).values)


def test_trial_streams_are_independent_of_order():
    first = trial_rng(9, 5).standard_normal(4)
    trial_rng(9, 0).standard_normal(1000)
    assert np.array_equal(first, trial_rng(9, 5).standard_normal(4))


def test_block_moments():
    X = generate(SimSpec(n=2000, p=30, seed=1, model="block", k=10, block_rho=0.8)).values
    C = np.corrcoef(X, rowvar=False)
    within = C[:10, :10][~np.eye(10, dtype=bool)]
    off = np.concatenate([C[:10, 10:].ravel(), C[10:, 10:][~np.eye(20, dtype=bool)]])
    assert np.all(np.abs(within - 0.8) < 0.05)
    assert np.all(np.abs(off) < 0.1)
    assert np.abs(off).mean() < 0.05


def test_elliptical_keeps_shape_correlation():
    X = generate(SimSpec(n=20000, p=12, seed=2, model="elliptical", dof=5, k=4, block_rho=0.6)).values
    C = np.corrcoef(X, rowvar=False)
    assert np.abs(C[:4, :4][~np.eye(4, dtype=bool)] - 0.6).max() < 0.05
    assert np.abs(C[4:, 4:][~np.eye(8, dtype=bool)]).max() < 0.05


def test_simspec_validation():
    with pytest.raises(ValidationError):
        SimSpec(n=10, p=20, model="block", k=0)
    with pytest.raises(ValidationError):
        SimSpec(n=10, p=20, model="elliptical", dof=2)
    with pytest.raises(ValidationError):
        SimSpec(n=10, p=20, model="block", k=5, block_rho=1.0)
    with pytest.raises(ValidationError):
        SimSpec(n=10, p=20, trials=0)


def test_monte_carlo_rho_near_one():
    res = run_monte_carlo(SimSpec(n=10, p=50, seed=3, trials=50), 0.99999, 1, "corr")
    assert res.empirical_P_N_positive == 0.0 and res.standard_error == 0.0
    assert set(res.theoretical_fwer) == {"paper", "poisson"}


def test_monte_carlo_bookkeeping():
    res = run_monte_carlo(SimSpec(n=10, p=80, seed=4, trials=60), 0.8, 1, "corr")
    c = np.array(res.counts)
    assert res.empirical_P_N_positive == pytest.approx(np.mean(c > 0))
    f = res.empirical_P_N_positive
    assert res.standard_error == pytest.approx(math.sqrt(f * (1 - f) / 60))
    assert res.empirical_mean_N == pytest.approx(c.mean())


def test_null_calibration_mean():
    # binomial E[N] is the per-vertex model; 2000 null trials check its mean
    n, p = 10, 200
    rho = optimize.brentq(
        lambda r: expected_hub_count(ScreeningParams(n, p, 1, r, mode="corr")).binomial - 2.0, 0.5, 0.9999
    )
    res = run_monte_carlo(SimSpec(n, p, seed=77, trials=2000), rho, 1, "corr")
    c = np.array(res.counts)
    se = c.std(ddof=1) / math.sqrt(c.size)
    assert abs(c.mean() - res.theoretical_expected_count) < 3 * se


@pytest.mark.slow
def test_block_sparse_robustness():
    # block_rho = 0.3; stronger blocks (>= 0.5) break the null approximation at this n
    n, p = 30, 2000
    rho = optimize.brentq(lambda r: fwer(ScreeningParams(n, p, 1, r)) - 0.1, 0.3, 0.999, xtol=1e-13)
    spec = SimSpec(n, p, seed=31, model="block", k=20, block_rho=0.3, trials=400)
    res = run_monte_carlo(spec, rho, 1, "parcor")
    assert abs(res.empirical_P_N_positive - 0.1) <= 0.05


@pytest.mark.slow
@pytest.mark.xfail(
    strict=True,
    reason="a shared chi-square row scale makes the variables dependent, so multivariate-t "
    "counts are inflated relative to Gaussian ones at small n",
)
def test_elliptical_invariance():
    n, p, trials = 20, 300, 300
    rho = optimize.brentq(
        lambda r: expected_hub_count(ScreeningParams(n, p, 1, r, mode="corr")).binomial - 3.0, 0.2, 0.999
    )
    a = np.array(run_monte_carlo(SimSpec(n, p, seed=1, trials=trials), rho, 1, "corr").counts)
    b = np.array(
        run_monte_carlo(SimSpec(n, p, seed=2, model="elliptical", dof=5, trials=trials), rho, 1, "corr").counts
    )
    pooled = math.sqrt(a.var(ddof=1) / a.size + b.var(ddof=1) / b.size)
    assert abs(a.mean() - b.mean()) <= 3 * pooled


def test_phase_sweep_trivial_and_monotone():
    rows = phase_sweep(SimSpec(n=10, p=100, seed=5, trials=3), 1, [1.0])
    assert rows[0].empirical_mean == 0.0 and rows[0].predicted == 0.0
    grid = [0.6, 0.7, 0.8, 0.9, 0.95]
    for seed in range(3):
        rows = phase_sweep(SimSpec(n=10, p=100, seed=seed, trials=2), 2, grid)
        means = [r.empirical_mean for r in rows]
        assert all(a >= b for a, b in zip(means, means[1:]))


@pytest.mark.slow
def test_phase_sweep_reduced_sham():
    n, p = 266, 2000
    rc = critical_threshold(p, n, 1)
    grid = list(np.round(np.linspace(rc - 0.1, rc + 0.1, 9), 6))
    rows = phase_sweep(SimSpec(n=n, p=p, seed=11, trials=4), 1, grid, mode="corr")
    assert sum(r.nearest_critical for r in rows) == 1
    for r in rows:
        assert abs(r.empirical_mean - r.predicted) <= 3 * math.sqrt(max(r.predicted, 1.0))
