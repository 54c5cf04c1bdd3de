"""Seeded Monte Carlo estimates of moments and tails of w * xi.

Randomness comes from the Philox-4x64 counter-based generator, keyed by the
64-bit seed.  Batch ``i`` starts at counter ``i << 128`` so batches never
share words.  Only the raw 64-bit output is consumed:

* each sample reads ceil(n / 64) words for its signs, bit j of word w
  (least significant first) being the sign of coordinate 64 w + j, with
  1 meaning ``-``;
* when the weight has more than one aux atom, one extra word gives a uniform
  ``(word >> 11) * 2**-53`` that selects the atom by inverse CDF.

Standard errors come with normal-approximation intervals only.
"""
from __future__ import annotations

from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError, MalformedWeight
from .rademacher import ZERO_RTOL, MomentReport, as_coefficients, parse_exponent
from .weights import WeightSpec

DEFAULT_BATCH = 65_536
_U53 = 2.0**-53


@dataclass(frozen=True)
class McConfig:
    sample_count: int
    seed: int = 0
    batch_size: int = DEFAULT_BATCH

    def __post_init__(self):
        if int(self.sample_count) < 1:
            raise DomainError("sample_count must be at least 1")
        if int(self.batch_size) < 1:
            raise DomainError("batch_size must be at least 1")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")


class RawStream:
    """Uniform, integer and normal draws from one Philox substream."""

    def __init__(self, seed: int, stream: int = 0):
        self._bg = np.random.Philox(key=int(seed), counter=int(stream) << 128)

    def words(self, size: int) -> np.ndarray:
        return self._bg.random_raw(size)

    def uniform(self, size: int) -> np.ndarray:
        """Floats in [0, 1) with 53 random bits."""
        return (self.words(size) >> np.uint64(11)).astype(np.float64) * _U53

    def integers(self, lo: int, hi: int, size: int) -> np.ndarray:
        """Integers in the closed range [lo, hi]."""
        span = hi - lo + 1
        return lo + np.minimum((self.uniform(size) * span).astype(np.int64), span - 1)

    def normal(self, size: int) -> np.ndarray:
        u1 = 1.0 - self.uniform(size)
        u2 = self.uniform(size)
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)

    def choice(self, options):
        return options[int(self.integers(0, len(options) - 1, 1)[0])]


class _Sampler:
    def __init__(self, coeffs, weight: WeightSpec | None, cfg: McConfig):
        self.x = np.asarray(coeffs.values, dtype=np.float64)
        self.n = coeffs.n
        self.cfg = cfg
        self.zero_tol = ZERO_RTOL * float(np.max(np.abs(self.x)))
        if weight is None:
            weight = WeightSpec.constant(1)
        if weight.depth > self.n:
            raise MalformedWeight(f"weight depends on {weight.depth} signs but the sum has {self.n}")
        self.depth = weight.depth
        self.table = np.asarray([float(v) for v in weight.table])
        self.aux_values = np.asarray([float(v) for v, _ in weight.aux])
        cdf = np.cumsum([float(p) for _, p in weight.aux])
        cdf[-1] = 1.0
        self.aux_cdf = cdf
        self.sign_words = (self.n + 63) // 64
        self.words_per_sample = self.sign_words + (1 if len(weight.aux) > 1 else 0)

    def batches(self):
        """Yield arrays of w * xi, one per batch, in batch order."""
        remaining = self.cfg.sample_count
        index = 0
        while remaining > 0:
            size = min(self.cfg.batch_size, remaining)
            bg = np.random.Philox(key=int(self.cfg.seed), counter=index << 128)
            words = bg.random_raw(size * self.words_per_sample).reshape(size, self.words_per_sample)
            yield self._values(words)
            remaining -= size
            index += 1

    def _values(self, words: np.ndarray) -> np.ndarray:
        size = words.shape[0]
        s = np.zeros(size)
        prefix = np.zeros(size, dtype=np.int64)
        for j in range(self.n):
            bit = ((words[:, j // 64] >> np.uint64(j % 64)) & np.uint64(1)).astype(np.int64)
            s += self.x[j] * (1 - 2 * bit)
            if j < self.depth:
                prefix = (prefix << 1) | bit
        s[np.abs(s) <= self.zero_tol] = 0.0
        w = self.table[prefix] if self.depth else np.full(size, self.table[0])
        if self.words_per_sample > self.sign_words:
            u = (words[:, -1] >> np.uint64(11)).astype(np.float64) * _U53
            w = w * self.aux_values[np.searchsorted(self.aux_cdf, u, side="right")]
        else:
            w = w * self.aux_values[0]
        return w * s


def mc_moment(coeffs, p, weight: WeightSpec | None = None, cfg: McConfig | None = None) -> MomentReport:
    """Sample mean of |w xi|^p with its standard error (sample sd / sqrt(N))."""
    coeffs = as_coefficients(coeffs)
    p_val, p_text = parse_exponent(p)
    cfg = cfg or McConfig(100_000)
    count, mean, m2 = 0, 0.0, 0.0
    shift = None
    for values in _Sampler(coeffs, weight, cfg).batches():
        terms = np.abs(values) ** p_val
        if shift is None:
            # accumulate deviations from the first term; a constant stream
            # then has mean exactly `shift` and zero variance
            shift = float(terms[0])
        terms = terms - shift
        nb = terms.size
        mb = float(np.mean(terms))
        m2b = float(np.sum((terms - mb) ** 2))
        # Chan et al. pairwise merge, applied in batch order
        delta = mb - mean
        total = count + nb
        mean += delta * nb / total
        m2 += m2b + delta * delta * count * nb / total
        count = total
    var = m2 / (count - 1) if count > 1 else 0.0
    mean += shift
    return MomentReport(
        p=p_val,
        absolute_moment=mean,
        norm=mean ** (1.0 / p_val),
        second_norm=coeffs.norm2,
        method="monte-carlo",
        standard_error=math.sqrt(var / count),
        sample_count=count,
        exact_arithmetic=False,
        p_text=p_text,
        ci_kind="normal-approximation",
    )


class TailEstimate(NamedTuple):
    probability: float
    standard_error: float
    sample_count: int


def mc_tail(coeffs, t, weight: WeightSpec | None = None, strict: bool = True,
            cfg: McConfig | None = None) -> TailEstimate:
    """Estimate of P(|w xi| > t) (or >= t) with Bernoulli standard error."""
    coeffs = as_coefficients(coeffs)
    t = float(t)
    if t < 0:
        raise DomainError("tail level must be nonnegative")
    cfg = cfg or McConfig(100_000)
    hits = 0
    for values in _Sampler(coeffs, weight, cfg).batches():
        mag = np.abs(values)
        hits += int(np.count_nonzero(mag > t if strict else mag >= t))
    n = cfg.sample_count
    phat = hits / n
    return TailEstimate(phat, math.sqrt(phat * (1.0 - phat) / n), n)


def normal_interval(estimate: float, standard_error: float, z: float = 1.96) -> tuple[float, float]:
    """Normal-approximation confidence interval."""
    return estimate - z * standard_error, estimate + z * standard_error
