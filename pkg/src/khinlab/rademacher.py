"""Exact distributions, moments and tails of Rademacher sums by enumeration.

Every sign pattern of ``xi = sum_i r_i x_i`` is visited once.  The pattern
index has the first sign as its most significant bit with ``+`` encoded as 0,
so a sign-function weight of depth ``k`` reads its table entry from the top
``k`` bits.  Patterns are produced in blocks of at most ``2**CHUNK_BITS``:
the sums over the trailing coordinates are built once by doubling
(``S -> (S + x, S - x)``), and each block adds one prefix sum to that table.

Arithmetic is exact whenever all coefficients and weight values are short
decimals (see :mod:`khinlab._numbers`).  Otherwise values are floats, sums
with ``|S| <= ZERO_RTOL * max|x|`` count as zero, and a value within
``TIE_RTOL * max(t, max|w xi|)`` of a tail level ``t`` counts as equal to it.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from decimal import Decimal
from fractions import Fraction
import itertools
import math
import os

import numpy as np

from ._numbers import (
    int_array,
    scale_to_integers,
    scaled_to_float,
    to_decimal,
)
from .errors import DimensionTooLarge, DomainError, MalformedWeight
from .weights import WeightSpec

DEFAULT_N_MAX = 26
CHUNK_BITS = 18
ZERO_RTOL = 1e-12
TIE_RTOL = 1e-12
MERGE_RTOL = 1e-12


def default_n_max() -> int:
    """The enumeration cap, overridable through ``KHINLAB_NMAX``."""
    raw = os.environ.get("KHINLAB_NMAX")
    if raw is None:
        return DEFAULT_N_MAX
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"KHINLAB_NMAX must be an integer, got {raw!r}") from None
    if value < 1:
        raise DomainError("KHINLAB_NMAX must be positive")
    return value


class CoefficientVector:
    """A finite real coefficient sequence, kept both as decimals and floats."""

    def __init__(self, values):
        if isinstance(values, CoefficientVector):
            values = values.decimals
        decimals = tuple(to_decimal(v) for v in values)
        if not decimals:
            raise DomainError("a coefficient vector needs at least one entry")
        self.decimals: tuple[Decimal, ...] = decimals
        self.values: tuple[float, ...] = tuple(float(d) for d in decimals)
        scaled = scale_to_integers(decimals)
        self._ints, self._exponent = scaled if scaled is not None else (None, None)

    @property
    def n(self) -> int:
        return len(self.decimals)

    @property
    def exact(self) -> bool:
        """True when sums are taken in integers (no tolerance classification)."""
        return self._ints is not None

    @property
    def texts(self) -> list[str]:
        return [str(d) for d in self.decimals]

    def sum_of_squares(self) -> Fraction | float:
        """Sum of x_i^2, as an exact fraction when the vector is integer-scaled."""
        if self.exact:
            return sum(i * i for i in self._ints) * Fraction(10) ** (2 * self._exponent)
        return math.fsum(v * v for v in self.values)

    @property
    def norm2_squared(self) -> float:
        return float(self.sum_of_squares())

    @property
    def norm2(self) -> float:
        return math.sqrt(self.norm2_squared)

    def is_zero(self) -> bool:
        return all(d == 0 for d in self.decimals)

    def padded(self, n: int) -> CoefficientVector:
        """The same sum with zero coefficients appended up to length ``n``."""
        if n <= self.n:
            return self
        return CoefficientVector(self.decimals + (Decimal(0),) * (n - self.n))

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(self.values)

    def __eq__(self, other):
        return isinstance(other, CoefficientVector) and self.decimals == other.decimals

    def __hash__(self):
        return hash(self.decimals)

    def __repr__(self):
        return f"CoefficientVector({self.texts!r})"


@dataclass(frozen=True)
class MomentReport:
    p: float
    absolute_moment: float
    norm: float
    second_norm: float
    method: str = "exact"
    standard_error: float = 0.0
    sample_count: int = 0
    exact_arithmetic: bool = True
    p_text: str = ""
    ci_kind: str = "none"

    def to_json(self) -> dict:
        return asdict(self)


def as_coefficients(coeffs) -> CoefficientVector:
    return coeffs if isinstance(coeffs, CoefficientVector) else CoefficientVector(coeffs)


def parse_exponent(p, name: str = "p") -> tuple[float, str]:
    text = str(p) if not isinstance(p, float) else repr(p)
    try:
        value = float(to_decimal(p))
    except Exception:
        raise DomainError(f"{name} must be a positive real, got {p!r}") from None
    if not value > 0 or not math.isfinite(value):
        raise DomainError(f"{name} must be a positive real, got {p!r}")
    return value, text


def _signed_sums(x: np.ndarray) -> np.ndarray:
    """All 2**len(x) signed sums, first coordinate most significant, + first."""
    s = np.zeros(1, dtype=x.dtype)
    for xi in x:
        s = np.stack((s + xi, s - xi), axis=1).ravel()
    return s


_UNIT = WeightSpec.constant(1)


class _Enumeration:
    """Prepared enumeration of w * xi over all sign patterns and aux atoms."""

    def __init__(self, coeffs: CoefficientVector, weight: WeightSpec | None, n_max: int | None):
        n_max = default_n_max() if n_max is None else n_max
        if coeffs.n > n_max:
            raise DimensionTooLarge(coeffs.n, n_max)
        weight = _UNIT if weight is None else weight
        if not isinstance(weight, WeightSpec):
            raise MalformedWeight("weight must be a WeightSpec")
        if weight.depth > coeffs.n:
            raise MalformedWeight(
                f"weight depends on {weight.depth} signs but the sum has only {coeffs.n}")
        self.n = coeffs.n
        self.depth = weight.depth
        self.aux_probs = [p for _, p in weight.aux]
        table = scale_to_integers(weight.table)
        aux = scale_to_integers([v for v, _ in weight.aux])
        self.exact = coeffs.exact and table is not None and aux is not None
        if self.exact:
            t_ints, t_e = table
            u_ints, u_e = aux
            self.exponent = coeffs._exponent + t_e + u_e
            max_x = sum(abs(i) for i in coeffs._ints)
            self.bound = max_x * max(t_ints) * max(u_ints)
            self.x = int_array(coeffs._ints, self.bound)
            dtype = self.x.dtype
            self.multipliers = [np.asarray([t * u for t in t_ints], dtype=dtype) for u in u_ints]
            self.zero_tol = 0
        else:
            self.exponent = 0
            self.x = np.asarray(coeffs.values, dtype=np.float64)
            t_f = [float(v) for v in weight.table]
            self.multipliers = [np.asarray([t * float(u) for t in t_f]) for u, _ in weight.aux]
            max_x = float(np.max(np.abs(self.x)))
            self.bound = math.fsum(np.abs(self.x)) * max(t_f) * max(float(u) for u, _ in weight.aux)
            self.zero_tol = ZERO_RTOL * max_x
        self.unit_weight = weight is _UNIT or (
            weight.depth == 0 and len(self.multipliers) == 1 and self.multipliers[0][0] == 1)

    def blocks(self):
        """Yield (aux index, values of w*xi) block by block, in pattern order."""
        n = self.n
        b = min(n, CHUNK_BITS)
        m = n - b
        inner = _signed_sums(self.x[m:])
        outer = _signed_sums(self.x[:m])
        shift = n - self.depth
        width = 1 << b
        for c, base in enumerate(outer):
            s = inner + base
            if self.zero_tol:
                s[np.abs(s) <= self.zero_tol] = 0.0
            if self.unit_weight:
                yield 0, s
                continue
            if self.depth <= m:
                prefix = (c << b) >> shift
                for j, mult in enumerate(self.multipliers):
                    yield j, s * mult[prefix]
            else:
                idx = ((c << b) + np.arange(width, dtype=np.int64)) >> shift
                for j, mult in enumerate(self.multipliers):
                    yield j, s * mult[idx]

    def to_float(self, values: np.ndarray) -> np.ndarray:
        if self.exact:
            return scaled_to_float(values, self.exponent)
        return values

    def pattern_mass(self, j: int) -> Fraction:
        return self.aux_probs[j] / 2**self.n


def exact_distribution(coeffs, weight: WeightSpec | None = None, n_max: int | None = None):
    """Distribution of ``w * xi`` (or ``xi``) as sorted (value, probability) pairs.

    Probabilities are exact fractions.  In exact arithmetic the values are
    fractions too and equal values merge exactly; otherwise values are floats
    and neighbours within ``MERGE_RTOL * (1 + |v|)`` coalesce.
    """
    coeffs = as_coefficients(coeffs)
    en = _Enumeration(coeffs, weight, n_max)
    if en.exact:
        mass: dict[int, Fraction] = {}
        for j, values in en.blocks():
            uniq, counts = np.unique(values, return_counts=True)
            unit = en.pattern_mass(j)
            for v, c in zip(uniq.tolist(), counts.tolist()):
                mass[v] = mass.get(v, Fraction(0)) + c * unit
        scale = Fraction(10) ** en.exponent
        return [(Fraction(v) * scale, p) for v, p in sorted(mass.items())]
    pairs: list[tuple[float, Fraction]] = []
    for j, values in en.blocks():
        uniq, counts = np.unique(values, return_counts=True)
        unit = en.pattern_mass(j)
        pairs.extend((v, c * unit) for v, c in zip(uniq.tolist(), counts.tolist()))
    pairs.sort(key=lambda vp: vp[0])
    merged: list[list] = []
    for v, p in pairs:
        if merged and abs(v - merged[-1][0]) <= MERGE_RTOL * (1 + abs(merged[-1][0])):
            merged[-1][1] += p
        else:
            merged.append([v, p])
    return [(v, p) for v, p in merged]


def exact_moment(coeffs, p, weight: WeightSpec | None = None, n_max: int | None = None) -> MomentReport:
    """E|w xi|^p by enumeration, with an exactly rounded sum of the terms."""
    coeffs = as_coefficients(coeffs)
    p_val, p_text = parse_exponent(p)
    en = _Enumeration(coeffs, weight, n_max)

    def terms():
        for j, values in en.blocks():
            t = en.to_float(np.abs(values)) ** p_val
            prob = float(en.aux_probs[j])
            if prob != 1.0:
                t = t * prob
            yield t.tolist()

    total = math.fsum(itertools.chain.from_iterable(terms()))
    moment = math.ldexp(total, -coeffs.n)
    return MomentReport(
        p=p_val,
        absolute_moment=moment,
        norm=moment ** (1.0 / p_val),
        second_norm=coeffs.norm2,
        method="exact",
        exact_arithmetic=en.exact,
        p_text=p_text,
    )


def _exact_threshold(en: _Enumeration, t: Decimal):
    """Integer tail level and the factor that puts |w xi| on its scale."""
    scaled = scale_to_integers([t])
    if scaled is None:
        return None
    (t_int,), t_e = scaled
    if t_int == 0:
        return 0, 1
    common = min(en.exponent, t_e)
    return t_int * 10 ** (t_e - common), 10 ** (en.exponent - common)


def exact_tail(coeffs, t, weight: WeightSpec | None = None, strict: bool = True,
               n_max: int | None = None) -> Fraction:
    """P(|w xi| > t) when ``strict``, else P(|w xi| >= t), as an exact fraction."""
    coeffs = as_coefficients(coeffs)
    t_dec = to_decimal(t)
    if t_dec < 0:
        raise DomainError("tail level must be nonnegative")
    en = _Enumeration(coeffs, weight, n_max)
    counts = [0] * len(en.aux_probs)
    level = _exact_threshold(en, t_dec) if en.exact else None
    if level is not None:
        t_int, factor = level
        big = en.bound * factor >= 2**62 or t_int >= 2**62
        for j, values in en.blocks():
            mag = np.abs(values)
            if big:
                mag = mag.astype(object)
            if factor != 1:
                mag = mag * factor
            counts[j] += int(np.count_nonzero(mag > t_int if strict else mag >= t_int))
    else:
        t_f = float(t_dec)
        band = 0.0 if en.exact else TIE_RTOL * max(t_f, en.bound)
        for j, values in en.blocks():
            mag = np.abs(en.to_float(values))
            if strict:
                hit = (mag > t_f) & (mag - t_f > band)
            else:
                hit = (mag >= t_f) | (t_f - mag <= band)
            counts[j] += int(np.count_nonzero(hit))
    return sum((c * en.pattern_mass(j) for j, c in enumerate(counts)), Fraction(0))


def prob_zero(coeffs, n_max: int | None = None) -> Fraction:
    """Exact P(xi = 0); see the module notes for the float tolerance."""
    coeffs = as_coefficients(coeffs)
    en = _Enumeration(coeffs, None, n_max)
    zeros = sum(int(np.count_nonzero(values == 0)) for _, values in en.blocks())
    return Fraction(zeros, 2**coeffs.n)
