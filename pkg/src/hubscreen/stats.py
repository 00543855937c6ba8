"""Closed-form screening statistics: critical thresholds, Poisson rates,
expected hub counts, p-values and familywise error rates."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DegenerateThreshold, DomainError, ValidationError
from .special import (
    binomial_sf_log,
    cap_probability_P0,
    log_cap_probability,
    log_comb,
    sphere_constant_an,
)

# linear values past exp(700) are reported as +inf
LOG_OVERFLOW = 700.0


class Mode(str, enum.Enum):
    CORRELATION = "corr"
    PARTIAL_CORRELATION = "parcor"


class PhiConvention(str, enum.Enum):
    """How the Poisson rate is turned into a probability.

    ``PAPER`` uses ``1 - exp(-xi J)`` for every degree level. ``POISSON`` divides
    the rate by phi(delta), which is 2 at delta = 1 (each edge makes two
    degree-one vertices) and 1 otherwise. ``POISSON`` reproduces the published
    critical threshold for the sham experiment and is the default.
    """

    PAPER = "paper"
    POISSON = "poisson"


DEFAULT_CONVENTION = PhiConvention.POISSON


def phi(delta: int) -> int:
    return 2 if delta == 1 else 1


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


def _exp_capped(log_x: float) -> float:
    return math.inf if log_x > LOG_OVERFLOW else math.exp(log_x)


@dataclass(frozen=True)
class ScreeningParams:
    n: int
    p: int
    delta: int = 1
    rho: float = 0.0
    J: float = 1.0
    mode: Mode = Mode.PARTIAL_CORRELATION
    phi_convention: PhiConvention = DEFAULT_CONVENTION

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "phi_convention", PhiConvention(self.phi_convention))
        if self.n <= 2:
            raise ValidationError(f"n must exceed 2 (got {self.n})")
        if self.p < 2:
            raise ValidationError(f"p must be at least 2 (got {self.p})")
        if self.delta < 1:
            raise ValidationError(f"delta must be >= 1 (got {self.delta})")
        if not 0.0 <= self.rho <= 1.0:
            raise ValidationError(f"rho must lie in [0, 1] (got {self.rho})")
        if not self.J > 0:
            raise ValidationError(f"J must be positive (got {self.J})")

    def with_(self, **changes) -> "ScreeningParams":
        from dataclasses import replace

        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "delta": self.delta,
            "rho": self.rho,
            "J": self.J,
            "mode": self.mode.value,
            "phi_convention": self.phi_convention.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScreeningParams":
        return cls(
            n=int(d["n"]),
            p=int(d["p"]),
            delta=int(d["delta"]),
            rho=float(d["rho"]),
            J=float(d["J"]),
            mode=Mode(d["mode"]),
            phi_convention=PhiConvention(d["phi_convention"]),
        )


def critical_threshold(
    p: int,
    n: int,
    delta: int,
    J: float = 1.0,
    convention: PhiConvention = DEFAULT_CONVENTION,
) -> float:
    """Phase-transition threshold rho_{c,delta}.

    sqrt(1 - (c (p-1))^(-2 delta / (delta (n-2) - 2))) with
    c = a_n delta J, divided by phi(delta) under the Poisson convention.
    """
    convention = PhiConvention(convention)
    denom = delta * (n - 2) - 2
    if n <= 2 or denom <= 0:
        raise DomainError(f"critical threshold needs delta*(n-2) - 2 > 0 (n={n}, delta={delta})")
    if p < 2 or not J > 0:
        raise DomainError(f"critical threshold needs p >= 2 and J > 0 (p={p}, J={J})")
    c = sphere_constant_an(n) * delta * J
    if convention is PhiConvention.POISSON:
        c /= phi(delta)
    log_base = math.log(c) + math.log(p - 1)
    if log_base <= 0:
        raise DegenerateThreshold(
            f"c*(p-1) = {math.exp(log_base):.6g} <= 1: no phase transition in (0, 1)"
        )
    one_minus_sq = math.exp(-2.0 * delta / denom * log_base)
    return math.sqrt(1.0 - one_minus_sq)


def log_xi(params: ScreeningParams) -> float:
    """log of p * C(p-1, delta) * P0^delta."""
    log_p0 = log_cap_probability(params.rho, params.n)
    if log_p0 == -math.inf:
        return -math.inf
    return math.log(params.p) + log_comb(params.p - 1, params.delta) + params.delta * log_p0


def xi_rate(params: ScreeningParams) -> tuple[float, float]:
    """Return ``(xi, log_xi)``; xi saturates to +inf instead of overflowing."""
    lx = log_xi(params)
    return _exp_capped(lx), lx


def eta_diagnostic(params: ScreeningParams) -> float:
    p0 = cap_probability_P0(params.rho, params.n)
    if p0 == 0.0:
        return 0.0
    return _exp_capped(math.log(params.p) / params.delta + math.log(params.p - 1) + math.log(p0))


def lambda_rate(params: ScreeningParams) -> float:
    """Asymptotic surrogate Lambda = xi * J."""
    lx = log_xi(params)
    if lx == -math.inf:
        return 0.0
    return _exp_capped(lx + math.log(params.J))


@dataclass(frozen=True)
class ExpectedCount:
    binomial: float
    xi_J: float

    def __float__(self):
        return self.binomial


def expected_hub_count(params: ScreeningParams) -> ExpectedCount:
    """Mean number of degree->=delta hubs under the per-vertex binomial model.

    Each vertex has p-1 potential neighbours, each present with probability P0,
    so E[N] = p * P(Binomial(p-1, P0) >= delta). The asymptotic surrogate
    xi * J is carried alongside for comparison.
    """
    p0 = cap_probability_P0(params.rho, params.n)
    tail = binomial_sf_log(params.p - 1, p0, params.delta)
    binom_mean = 0.0 if tail == -math.inf else math.exp(math.log(params.p) + tail)
    return ExpectedCount(binomial=binom_mean, xi_J=lambda_rate(params))


def asymptotic_mean_limit(n: int, delta: int, e_nd: float) -> float:
    """kappa_{n,delta} = (e a_n / (n-2))^delta / delta!."""
    if n <= 2 or delta < 1:
        raise DomainError(f"need n > 2 and delta >= 1 (n={n}, delta={delta})")
    if e_nd < 0:
        raise DomainError(f"e_nd must be nonnegative (got {e_nd})")
    if e_nd == 0:
        return 0.0
    log_k = delta * (math.log(e_nd) + math.log(sphere_constant_an(n)) - math.log(n - 2))
    return _exp_capped(log_k - math.lgamma(delta + 1))


def effective_rate(lam: float, delta: int, convention: PhiConvention) -> float:
    if PhiConvention(convention) is PhiConvention.POISSON:
        return lam / phi(delta)
    return lam


def pvalue_from_rate(lam: float, delta: int, convention: PhiConvention = DEFAULT_CONVENTION) -> float:
    """1 - exp(-rate) with rate = lam (or lam / phi(delta) under the Poisson convention)."""
    if lam < 0:
        raise DomainError(f"rate must be nonnegative (got {lam})")
    return -math.expm1(-effective_rate(lam, delta, convention))


def discovery_pvalue(delta: int, rho_i_delta: float, params: ScreeningParams) -> tuple[float, float]:
    """(lambda-value, p-value) for a vertex whose delta-th neighbour sits at rho_i_delta.

    The lambda-value is the rate actually fed to the exponential, so that
    ``-log1p(-pv) == lambda`` under either convention.
    """
    at = params.with_(delta=delta, rho=rho_i_delta)
    lam = effective_rate(lambda_rate(at), delta, params.phi_convention)
    return lam, -math.expm1(-lam)


def fwer(params: ScreeningParams) -> float:
    """Poisson approximation to P(N_{delta,rho} > 0)."""
    return pvalue_from_rate(lambda_rate(params), params.delta, params.phi_convention)
