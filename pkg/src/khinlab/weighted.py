"""Explicit constants of the weighted Khintchine inequality.

For a weight w with s = P(w != 0) above the mode threshold and 0 < p < q,
``extract_constants`` builds L and C2 with

    L * ||x||_2  <=  ||w xi||_p  <=  C2 * ||x||_2

for every coefficient vector x.  The upper constant comes from Hoelder,
``||w xi||_p <= ||w||_q ||xi||_r`` with 1/p = 1/q + 1/r.  The lower one uses
a tail budget b, a level a with threshold(a) = b, the level
delta0 = sup{d > 0 : P(w > d) >= tau} for tau = (s + 1 - b)/2, and the scale

    t = delta0^-1 (b - 1 + tau)^(-1/p),    L = a / t.

Classic mode uses the threshold (1 - a^2)^2 / 3 and needs s > 2/3; refined
mode uses the Haagerup-based threshold beta(a) and needs s > 1 - beta(0).
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum
from fractions import Fraction
import math

from .constants import euler_limit, khintchine_upper_constant, l0_tail_threshold_refined
from .errors import BelowThreshold, DomainError
from .rademacher import parse_exponent
from .weights import WeightSpec, delta0, weight_stats

A_TOL = 1e-10


class ThresholdMode(str, Enum):
    CLASSIC = "classic"
    REFINED = "refined"

    @classmethod
    def parse(cls, value) -> ThresholdMode:
        try:
            return cls(value.value if isinstance(value, ThresholdMode) else str(value).lower())
        except ValueError:
            raise DomainError(f"unknown threshold mode {value!r}") from None


def tail_threshold(a: float, mode) -> float:
    mode = ThresholdMode.parse(mode)
    if mode is ThresholdMode.CLASSIC:
        return (1.0 - a * a) ** 2 / 3.0
    return l0_tail_threshold_refined(a)


def budget_max(mode):
    """Largest admissible tail budget: threshold(a) as a -> 0."""
    if ThresholdMode.parse(mode) is ThresholdMode.CLASSIC:
        return Fraction(1, 3)
    return euler_limit()


def s_threshold(mode):
    """Minimal P(w != 0) the mode can handle (exclusive)."""
    return 1 - budget_max(mode)


@dataclass(frozen=True)
class ConstantsReport:
    mode: str
    p: float
    q: float
    r: float
    s: float
    s_threshold: float
    b: float
    a: float
    tau: float
    delta0: float
    t: float
    L: float
    C1: float
    k_r2: float
    w_q: float
    C2: float
    p_text: str = ""
    q_text: str = ""

    def to_json(self) -> dict:
        return asdict(self)


def _solve_level(b: float) -> float:
    """Bisection for beta(a) = b, returning the side where beta(a) >= b."""
    lo, hi = 0.0, 1.0
    while hi - lo > A_TOL:
        mid = 0.5 * (lo + hi)
        if l0_tail_threshold_refined(mid) >= b:
            lo = mid
        else:
            hi = mid
    return lo


def extract_constants(weight: WeightSpec, p, q, mode="classic") -> ConstantsReport:
    mode = ThresholdMode.parse(mode)
    p_val, p_text = parse_exponent(p, "p")
    q_val, q_text = parse_exponent(q, "q")
    if not q_val > p_val:
        raise DomainError(f"q must exceed p (p = {p_text}, q = {q_text})")
    s, w_q, _ = weight_stats(weight, q_val)
    threshold = s_threshold(mode)
    if not s > threshold:
        raise BelowThreshold(s, threshold, mode.value)

    if mode is ThresholdMode.CLASSIC:
        b = ((1 - s) + budget_max(mode)) / 2
        a = math.sqrt(1.0 - math.sqrt(3.0 * float(b)))
    else:
        b = ((1.0 - float(s)) + budget_max(mode)) / 2.0
        a = _solve_level(b)
    tau = (s + 1 - b) / 2
    d0 = delta0(weight, tau)
    slack = b - 1 + tau
    t = (slack ** (-1.0 / p_val) if p_val != 1 else 1 / slack) / d0
    t = float(t)
    r = p_val * q_val / (q_val - p_val)
    k_r2 = khintchine_upper_constant(r)
    return ConstantsReport(
        mode=mode.value,
        p=p_val,
        q=q_val,
        r=r,
        s=float(s),
        s_threshold=float(threshold),
        b=float(b),
        a=a,
        tau=float(tau),
        delta0=float(d0),
        t=t,
        L=a / t,
        C1=t / a,
        k_r2=k_r2,
        w_q=w_q,
        C2=w_q * k_r2,
        p_text=p_text,
        q_text=q_text,
    )


def comparability_factors(weight: WeightSpec, p1, p2, q, mode="classic") -> tuple[float, float]:
    """(lo, hi) with lo <= ||w xi||_p1 / ||w xi||_p2 <= hi for every x != 0."""
    c1 = extract_constants(weight, p1, q, mode)
    c2 = extract_constants(weight, p2, q, mode)
    return c1.L / c2.C2, c1.C2 / c2.L
