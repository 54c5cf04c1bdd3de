"""Special constants and one-dimensional bound functions.

Gamma is evaluated with the Lanczos approximation (g = 7, nine terms,
Godfrey's coefficients).  The Haagerup constant

    B_q = sqrt(2) * (Gamma((q + 1) / 2) / sqrt(pi)) ** (1 / q),   q >= 2,

enters the anti-concentration bounds through B_q ** (-2q / (q - 2)), whose
exponent diverges as q -> 2.  Near q = 2 the logarithm of B_q is therefore
taken from the duplication formula

    log Gamma((3 + e) / 2) = -(1 + e) log 2 + log(pi) / 2 + log1p(e)
                             + log Gamma(1 + e) - log Gamma(1 + e / 2)

with the Taylor series of log Gamma(1 + z) in zeta values, which keeps
full relative accuracy in e = q - 2.
"""
from __future__ import annotations

import math
from typing import NamedTuple

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061
LOG2 = math.log(2.0)
SQRT_PI = math.sqrt(math.pi)

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
GAMMA_MAX_ARG = 171.0

# golden-section domain for u = log(q - 2)
U_MIN, U_MAX = -12.0, 4.0
Q_TOL = 1e-8
_NEAR_TWO = 0.25
_SERIES_TERMS = 48


def _lanczos_sum(z: float) -> float:
    acc = _LANCZOS[0]
    for i, c in enumerate(_LANCZOS[1:], start=1):
        acc += c / (z + i)
    return acc


def gamma_fn(x: float) -> float:
    """Gamma(x) for 0 < x <= 171."""
    x = float(x)
    if not 0 < x <= GAMMA_MAX_ARG:
        raise DomainError(f"gamma_fn needs 0 < x <= {GAMMA_MAX_ARG:g}, got {x!r}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    # split the power so t**(z+0.5) cannot overflow before exp(-t) applies
    half = t ** ((z + 0.5) / 2.0)
    return math.sqrt(2.0 * math.pi) * half * (half * math.exp(-t)) * _lanczos_sum(z)


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x!r}")
    if x < 0.5:
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return 0.5 * math.log(2.0 * math.pi) + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z))


def _zeta(k: int) -> float:
    """Riemann zeta at an integer k >= 2 (Euler-Maclaurin, N = 10)."""
    n_head = 10
    head = math.fsum(j ** (-k) for j in range(1, n_head))
    tail = n_head ** (1 - k) / (k - 1) + 0.5 * n_head ** (-k)
    bernoulli = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730)
    rising = float(k)
    for j, b in enumerate(bernoulli, start=1):
        # rising = k (k+1) ... (k + 2j - 2)
        tail += b / math.factorial(2 * j) * rising * n_head ** (-k - 2 * j + 1)
        rising *= (k + 2 * j - 1) * (k + 2 * j)
    return head + tail


_ZETA = {k: _zeta(k) for k in range(2, _SERIES_TERMS + 2)}


def _h_over_eps(eps: float) -> float:
    """h(2 + eps) / eps where h(q) = q log B_q, valid for 0 <= eps < 0.25."""
    log1p_ratio = 1.0 if eps == 0 else math.log1p(eps) / eps
    series = -EULER_GAMMA / 2.0
    power = 1.0
    for k in range(2, _SERIES_TERMS + 2):
        power *= eps
        term = _ZETA[k] * (1.0 - 2.0 ** (-k)) * power / k
        series += term if k % 2 == 0 else -term
        if power < 1e-20:
            break
    return -LOG2 / 2.0 + log1p_ratio + series


def _h(q: float) -> float:
    eps = q - 2.0
    if eps < _NEAR_TWO:
        return eps * _h_over_eps(eps)
    return log_gamma((q + 1.0) / 2.0) - 0.5 * math.log(math.pi) + 0.5 * q * LOG2


def log_haagerup_Bq(q: float) -> float:
    q = float(q)
    if not q >= 2:
        raise DomainError(f"B_q is defined for q >= 2, got {q!r}")
    return _h(q) / q


def haagerup_Bq(q: float) -> float:
    """Best upper Khintchine constant for q >= 2; B_2 = 1 exactly."""
    return math.exp(log_haagerup_Bq(q))


def khintchine_upper_constant(r: float) -> float:
    """A constant k with ||xi||_r <= k ||xi||_2 for every Rademacher sum."""
    r = float(r)
    if not r > 0:
        raise DomainError(f"r must be positive, got {r!r}")
    return 1.0 if r <= 2 else haagerup_Bq(r)


class PZBound(NamedTuple):
    lam: float
    q: float
    bound: float


def pz_lower_bound(lam: float, norm2: float, normq: float, q: float) -> PZBound:
    """Paley-Zygmund lower bound for P(xi > lam * ||xi||_2), clamped to [0, 1]."""
    lam, norm2, normq, q = float(lam), float(norm2), float(normq), float(q)
    if not q > 2:
        raise DomainError(f"q must exceed 2, got {q!r}")
    if not 0 <= lam <= 1:
        raise DomainError(f"lambda must lie in [0, 1], got {lam!r}")
    if not (norm2 > 0 and normq > 0):
        raise DomainError("norms must be positive")
    if normq < norm2 * (1 - 1e-12):
        raise DomainError(f"||xi||_q = {normq!r} is below ||xi||_2 = {norm2!r}")
    ratio = min((1.0 - lam * lam) * (norm2 / normq) ** 2, 1.0)
    bound = ratio ** (q / (q - 2.0)) if ratio > 0 else 0.0
    return PZBound(lam, q, min(max(bound, 0.0), 1.0))


def l0_tail_threshold_classic(a: float) -> float:
    """(1 - a^2)^2 / 3, the tail budget from the fourth-moment bound."""
    a = float(a)
    if not 0 < a < 1:
        raise DomainError(f"a must lie in (0, 1), got {a!r}")
    return (1.0 - a * a) ** 2 / 3.0


def refined_log_objective(q: float, a: float) -> float:
    """log of [(1 - a^2) B_q^-2]^(q/(q-2)); q = 2 means the limit q -> 2+."""
    eps = q - 2.0
    log_c = math.log1p(-a * a)
    if eps == 0:
        if a == 0:
            return LOG2 - 2.0 + EULER_GAMMA
        return -math.inf
    if eps < _NEAR_TWO:
        log_tail = -2.0 * _h_over_eps(eps)
    else:
        log_tail = -2.0 * _h(q) / eps
    return (q / eps) * log_c + log_tail if log_c else log_tail


def _u_objective(u: float, a: float) -> float:
    return refined_log_objective(2.0 + math.exp(u), a)


def refined_argmax(a: float) -> tuple[float, float]:
    """(q*, log value) from golden-section search on u = log(q - 2)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = U_MIN, U_MAX
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = _u_objective(x1, a), _u_objective(x2, a)
    while math.exp(hi) - math.exp(lo) > Q_TOL and hi - lo > 1e-15:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = _u_objective(x1, a)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = _u_objective(x2, a)
    candidates = [(f1, x1), (f2, x2), (_u_objective(lo, a), lo), (_u_objective(hi, a), hi)]
    best, u = max(candidates)
    limit = refined_log_objective(2.0, a)
    if limit > best:
        return 2.0, limit
    return 2.0 + math.exp(u), best


def l0_tail_threshold_refined(a: float) -> float:
    """sup over q > 2 of [(1 - a^2) B_q^-2]^(q/(q-2)); nonincreasing in a."""
    a = float(a)
    if not 0 <= a < 1:
        raise DomainError(f"a must lie in [0, 1), got {a!r}")
    return math.exp(refined_argmax(a)[1])


def refined_grid_scan(a: float, points: int = 10_000) -> float:
    """Brute-force counterpart of l0_tail_threshold_refined on a uniform u grid."""
    a = float(a)
    best = refined_log_objective(2.0, a)
    for i in range(points):
        u = U_MIN + (U_MAX - U_MIN) * i / (points - 1)
        best = max(best, _u_objective(u, a))
    return math.exp(best)


def euler_limit() -> float:
    """2 exp(-2 + gamma), the limit of B_q^(-2q/(q-2)) as q -> 2+."""
    return 2.0 * math.exp(-2.0 + EULER_GAMMA)


class ZeroMassThreshold(NamedTuple):
    exact: float
    limit: float
    numeric_limit_check: float
    q_check: float


def zero_mass_threshold(q_check: float = 2.0 + 1e-4) -> ZeroMassThreshold:
    """1 - 2e^(-2+gamma) and a direct Gamma evaluation of the limit at q_check."""
    b = math.sqrt(2.0) * (gamma_fn((q_check + 1.0) / 2.0) / SQRT_PI) ** (1.0 / q_check)
    numeric = b ** (-2.0 * q_check / (q_check - 2.0))
    limit = euler_limit()
    return ZeroMassThreshold(1.0 - limit, limit, numeric, q_check)
