"""Log-space special functions: regularized incomplete beta and the
spherical-cap constants used by the screening statistics."""

import math

from .errors import DomainError

_TINY = 1e-300


def _stirling_corr(x: float) -> float:
    # lgamma(x) - [(x - 1/2) log x - x + log(2 pi)/2], valid for x >= 10
    x2 = x * x
    return (1.0 / 12 - (1.0 / 360 - (1.0 / 1260 - 1.0 / (1680 * x2)) / x2) / x2) / x


def log_beta(a: float, b: float) -> float:
    """log B(a, b) without the cancellation of lgamma differences at large arguments."""
    if a > b:
        a, b = b, a
    if b < 10.0:
        return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    # lgamma(b) - lgamma(a + b) regrouped so no term is of order b log b
    diff = -(b - 0.5) * math.log1p(a / b) - a * math.log(a + b) + a
    return math.lgamma(a) + diff + _stirling_corr(b) - _stirling_corr(a + b)


def log_comb(m: int, k: int) -> float:
    """log C(m, k) via log-Gamma; -inf outside 0 <= k <= m."""
    if k < 0 or k > m:
        return -math.inf
    return math.lgamma(m + 1) - math.lgamma(k + 1) - math.lgamma(m - k + 1)


def _betacf(a: float, b: float, x: float, rtol: float, max_iter: int) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < rtol:
            return h
    raise ArithmeticError(
        f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})"
    )


def betainc(a: float, b: float, x: float, rtol: float = 1e-12, max_iter: int = 300) -> float:
    """Regularized incomplete beta function I_x(a, b).

    Evaluated by continued fraction on whichever side of the mean
    ``(a + 1) / (a + b + 2)`` converges quickly, using the symmetry
    ``I_x(a, b) = 1 - I_{1-x}(b, a)`` on the other side. The prefactor
    ``x^a (1-x)^b / B(a, b)`` is formed in log-space so that very small
    tails (large ``a`` or ``b``) do not underflow prematurely.
    """
    if a <= 0 or b <= 0:
        raise DomainError(f"betainc requires a, b > 0 (got a={a}, b={b})")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"betainc requires 0 <= x <= 1 (got x={x})")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = a * math.log(x) + b * math.log1p(-x) - log_beta(a, b)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _betacf(a, b, x, rtol, max_iter) / a
    return 1.0 - math.exp(log_front) * _betacf(b, a, 1.0 - x, rtol, max_iter) / b


def log_betainc(a: float, b: float, x: float, rtol: float = 1e-12, max_iter: int = 300) -> float:
    """log I_x(a, b), keeping precision when the value underflows a double."""
    if a <= 0 or b <= 0 or not 0.0 <= x <= 1.0:
        raise DomainError(f"log_betainc outside domain (a={a}, b={b}, x={x})")
    if x == 0.0:
        return -math.inf
    if x == 1.0:
        return 0.0
    if x < (a + 1.0) / (a + b + 2.0):
        log_front = a * math.log(x) + b * math.log1p(-x) - log_beta(a, b)
        return log_front + math.log(_betacf(a, b, x, rtol, max_iter) / a)
    return math.log(betainc(a, b, x, rtol, max_iter))


def sphere_constant_an(n: int) -> float:
    """Normalizing constant 2 Gamma((n-1)/2) / (sqrt(pi) Gamma((n-2)/2)).

    With this constant the double-cap probability at threshold 0 is one.
    """
    if n <= 2:
        raise DomainError(f"a_n requires n > 2 (got n={n})")
    return math.exp(
        math.log(2.0) + math.lgamma((n - 1) / 2) - 0.5 * math.log(math.pi) - math.lgamma((n - 2) / 2)
    )


def _check_cap_args(rho: float, n: int) -> None:
    if n <= 2:
        raise DomainError(f"cap probability requires n > 2 (got n={n})")
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"cap probability requires 0 <= rho <= 1 (got rho={rho})")


def cap_probability_P0(rho: float, n: int) -> float:
    """Probability that a uniform point on S_{n-2} has |<u, z>| >= rho.

    Equals a_n * int_rho^1 (1 - u^2)^((n-4)/2) du = I_{1-rho^2}((n-2)/2, 1/2).
    """
    _check_cap_args(rho, n)
    if rho == 1.0:
        return 0.0
    if rho == 0.0:
        return 1.0
    # 1 - rho^2 computed as (1 - rho)(1 + rho) to keep digits near rho = 1
    return betainc((n - 2) / 2, 0.5, (1.0 - rho) * (1.0 + rho))


def log_cap_probability(rho: float, n: int) -> float:
    _check_cap_args(rho, n)
    if rho == 1.0:
        return -math.inf
    if rho == 0.0:
        return 0.0
    return log_betainc((n - 2) / 2, 0.5, (1.0 - rho) * (1.0 + rho))


def binomial_sf_log(m: int, q: float, k: int) -> float:
    """log P(Binomial(m, q) >= k) via I_q(k, m - k + 1)."""
    if k <= 0:
        return 0.0
    if k > m or q <= 0.0:
        return -math.inf
    if q >= 1.0:
        return 0.0
    return log_betainc(float(k), float(m - k + 1), q)
