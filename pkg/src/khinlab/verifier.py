"""Property suites checking each inequality against exact enumeration.

Every check returns a :class:`CheckResult`; ``run_suite`` draws cases from a
:class:`CaseGenerator` and aggregates them into a :class:`SuiteReport`.
Case ``i`` of a generator with seed ``S`` is drawn from its own Philox
substream ``(S, i + 1)``, so any failing case can be regenerated alone.
Generated coefficients are rounded to 10 significant digits, which keeps the
enumeration in exact integer arithmetic.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from decimal import Decimal
from fractions import Fraction
import math
import time

import numpy as np

from ._numbers import to_decimal, to_fraction
from .constants import haagerup_Bq, pz_lower_bound, zero_mass_threshold
from .errors import BelowThreshold, DimensionTooLarge, DomainError
from .montecarlo import RawStream
from .rademacher import (
    CoefficientVector,
    as_coefficients,
    default_n_max,
    exact_distribution,
    exact_moment,
    exact_tail,
    prob_zero,
)
from .weighted import ThresholdMode, extract_constants, s_threshold, tail_threshold
from .weights import WeightSpec, weight_stats

CHECK_N_MAX = 16
FOURTH_MOMENT_RTOL = 1e-12
ZERO_MASS_SLACK = 1e-7
PZ_SLACK = 1e-12
SANDWICH_SLACK = 1e-10
UPPER_RTOL = 1e-10

SUITES = ("fourth-moment", "l0", "zero-mass", "paley-zygmund", "sandwich", "khintchine-upper")
A_GRID = tuple(Decimal(i) / 10 for i in range(1, 10))
LAMBDA_GRID = tuple(Decimal(i) / 10 for i in range(0, 11))
PZ_Q = (2.5, 3.0, 4.0)
UPPER_Q = (2.5, 3.0, 4.0, 6.0)
P_CHOICES = ("0.5", "1", "1.5", "2", "3")
Q_GAPS = ("0.5", "1", "2", "4")


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    observed: object
    bound: object
    info: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed


def _small(coeffs) -> CoefficientVector:
    coeffs = as_coefficients(coeffs)
    if coeffs.n > CHECK_N_MAX:
        raise DimensionTooLarge(coeffs.n, CHECK_N_MAX)
    return coeffs


def check_fourth_moment(coeffs) -> CheckResult:
    """E xi^4 <= 3 (E xi^2)^2, both sides by enumeration."""
    coeffs = _small(coeffs)
    m4 = exact_moment(coeffs, 4).absolute_moment
    m2 = exact_moment(coeffs, 2).absolute_moment
    rhs = 3.0 * m2 * m2
    return CheckResult(m4 <= rhs * (1 + FOURTH_MOMENT_RTOL), m4, rhs)


def check_l0_proposition(coeffs, a, mode="classic") -> CheckResult:
    """Contrapositive: sum x^2 > 1 forces P(|xi| > a) >= threshold(a)."""
    coeffs = _small(coeffs)
    a_dec = to_decimal(a)
    if not 0 < a_dec < 1:
        raise DomainError(f"a must lie in (0, 1), got {a!r}")
    bound = tail_threshold(float(a_dec), mode)
    if not coeffs.sum_of_squares() > 1:
        return CheckResult(True, None, bound, {"vacuous": True})
    tail = exact_tail(coeffs, a_dec, strict=True)
    return CheckResult(tail >= bound, tail, bound, {"vacuous": False})


def check_zero_mass_bound(coeffs) -> CheckResult:
    """P(xi = 0) <= 1 - 2 exp(-2 + gamma) for a nonzero sum."""
    coeffs = _small(coeffs)
    if coeffs.is_zero():
        raise DomainError("the zero-mass bound needs a nonzero coefficient vector")
    p0 = prob_zero(coeffs)
    bound = zero_mass_threshold().exact
    return CheckResult(p0 <= bound + ZERO_MASS_SLACK, p0, bound)


def _parse_distribution(dist) -> list[tuple[Fraction, Fraction]]:
    atoms = [(to_fraction(v), to_fraction(p)) for v, p in dist]
    if not atoms:
        raise DomainError("empty distribution")
    if any(v < 0 for v, _ in atoms) or any(p <= 0 for _, p in atoms):
        raise DomainError("values must be nonnegative and probabilities positive")
    if abs(sum(p for _, p in atoms) - 1) > 1e-12:
        raise DomainError("probabilities must sum to 1")
    if all(v == 0 for v, _ in atoms):
        raise DomainError("the variable must be nonzero")
    return atoms


def check_paley_zygmund(dist, lam, q) -> CheckResult:
    """P(xi > lam ||xi||_2) against the Paley-Zygmund bound, by exact summation.

    For xi >= 0 the event {xi > lam ||xi||_2} is {xi^2 > lam^2 E xi^2}, which
    is decided in rational arithmetic.
    """
    atoms = _parse_distribution(dist)
    q = float(q)
    if not q > 2:
        raise DomainError(f"q must exceed 2, got {q!r}")
    lam_f = to_fraction(lam)
    second = sum((p * v * v for v, p in atoms), Fraction(0))
    level = lam_f * lam_f * second
    prob = sum((p for v, p in atoms if v * v > level), Fraction(0))
    normq = math.fsum(float(p) * float(v) ** q for v, p in atoms) ** (1.0 / q)
    bound = pz_lower_bound(float(lam_f), math.sqrt(second), normq, q).bound
    return CheckResult(prob >= bound - PZ_SLACK, prob, bound)


def check_sandwich(weight: WeightSpec, coeffs, p, q, mode="classic") -> CheckResult:
    """L ||x||_2 <= ||w xi||_p <= C2 ||x||_2 with the extracted constants."""
    coeffs = as_coefficients(coeffs)
    consts = extract_constants(weight, p, q, mode)
    norm_x = coeffs.norm2
    if coeffs.is_zero():
        return CheckResult(True, 0.0, (0.0, 0.0), {"trivial": True})
    coeffs = coeffs.padded(weight.depth)
    if coeffs.n > default_n_max():
        raise DimensionTooLarge(coeffs.n, default_n_max())
    observed = exact_moment(coeffs, consts.p_text, weight).norm
    lower, upper = consts.L * norm_x, consts.C2 * norm_x
    slack = SANDWICH_SLACK * norm_x
    ok = lower <= observed + slack and observed <= upper + slack
    return CheckResult(ok, observed, (lower, upper), {"L": consts.L, "C2": consts.C2})


def check_khintchine_upper(coeffs, q) -> CheckResult:
    """||xi||_q <= B_q ||xi||_2 by enumeration."""
    coeffs = _small(coeffs)
    observed = exact_moment(coeffs, q).norm
    bound = haagerup_Bq(float(q)) * exact_moment(coeffs, 2).norm
    return CheckResult(observed <= bound * (1 + UPPER_RTOL), observed, bound)


@dataclass(frozen=True)
class CounterexampleReport:
    weight: dict
    coefficients: list[str]
    s: float
    norms: dict[str, float]
    exact_zero: bool
    exact_arithmetic: bool
    coefficient_norm: float
    rejections: dict[str, dict]
    literal_pair: dict

    def to_json(self) -> dict:
        return asdict(self)


def counterexample_weight() -> WeightSpec:
    """w = 1{r_1 + r_2 != 0} as a depth-2 sign function."""
    return WeightSpec.sign_function(2, ["1", "0", "0", "1"])


def counterexample_demo() -> CounterexampleReport:
    """w = 1{r_1 + r_2 != 0} annihilates xi = r_1 - r_2, so no lower bound holds.

    The literal pairing with xi = r_1 + r_2 gives w xi = xi and is reported
    for comparison.
    """
    w = counterexample_weight()
    x = CoefficientVector(["1", "-1"])
    norms = {}
    exact = True
    for p in ("1", "2"):
        rep = exact_moment(x, p, w)
        norms[p] = rep.norm
        exact = exact and rep.exact_arithmetic
    dist = exact_distribution(x, w)
    rejections = {}
    for mode in ThresholdMode:
        try:
            extract_constants(w, 1, 2, mode)
        except BelowThreshold as exc:
            rejections[mode.value] = {"rejected": True, "threshold": float(exc.threshold),
                                      "message": str(exc)}
        else:
            rejections[mode.value] = {"rejected": False, "threshold": float(s_threshold(mode))}
    literal = CoefficientVector(["1", "1"])
    literal_norms = {p: exact_moment(literal, p, w).norm for p in ("1", "2")}
    return CounterexampleReport(
        weight=w.to_json(),
        coefficients=x.texts,
        s=float(weight_stats(w, 2).s),
        norms=norms,
        exact_zero=dist == [(Fraction(0), Fraction(1))],
        exact_arithmetic=exact,
        coefficient_norm=x.norm2,
        rejections=rejections,
        literal_pair={"coefficients": literal.texts, "norms": literal_norms,
                      "coefficient_norm": literal.norm2,
                      "w_xi_equals_xi": exact_distribution(literal, w) == exact_distribution(literal)},
    )


def _sig10(values) -> list[str]:
    return [format(float(v), ".10g") for v in values]


def _partition(stream: RawStream, total: int, parts: int) -> list[int]:
    """Random composition of ``total`` into ``parts`` positive integers."""
    cuts: set[int] = set()
    while len(cuts) < parts - 1:
        cuts.add(int(stream.integers(1, total - 1, 1)[0]))
    edges = [0, *sorted(cuts), total]
    return [b - a for a, b in zip(edges, edges[1:])]


@dataclass(frozen=True)
class CaseGenerator:
    seed: int = 0
    n_range: tuple[int, int] = (1, CHECK_N_MAX)
    coefficient_law: str = "mixed"
    weight_law: str = "mixed"

    COEFFICIENT_LAWS = ("sphere", "grid", "sparse")
    WEIGHT_LAWS = ("independent", "sign_function")

    def stream(self, index: int) -> RawStream:
        return RawStream(self.seed, index + 1)

    def case_seed(self, index: int) -> dict:
        return {"seed": self.seed, "index": index}

    def _n(self, st: RawStream) -> int:
        lo, hi = self.n_range
        return int(st.integers(lo, hi, 1)[0])

    def direction(self, st: RawStream) -> np.ndarray:
        """Unnormalised coefficient direction drawn from the coefficient law."""
        law = self.coefficient_law
        if law == "mixed":
            law = st.choice(self.COEFFICIENT_LAWS)
        n = self._n(st)
        if law == "sphere":
            g = st.normal(n)
            return g / np.linalg.norm(g) if np.any(g) else np.ones(n)
        if law == "grid":
            v = st.integers(-5, 5, n).astype(np.float64)
        elif law == "sparse":
            v = np.zeros(n)
            k = int(st.integers(1, min(3, n), 1)[0])
            pos = st.integers(0, n - 1, k)
            v[pos] = st.integers(1, 4, k) * np.where(st.uniform(k) < 0.5, -1.0, 1.0)
        else:
            raise DomainError(f"unknown coefficient law {law!r}")
        if not np.any(v):
            v[0] = 1.0
        return v

    def coefficients(self, st: RawStream) -> CoefficientVector:
        v = self.direction(st)
        if np.any(v % 1):
            v = v * (0.2 + 2.8 * st.uniform(1)[0])
        return CoefficientVector(_sig10(v))

    def straddling(self, st: RawStream) -> CoefficientVector:
        """Coefficients with sum of squares in (1, 4]."""
        v = self.direction(st)
        target = 1.0 + 1e-6 + (3.0 - 2e-6) * st.uniform(1)[0]
        v = v * math.sqrt(target / float(np.dot(v, v)))
        x = CoefficientVector(_sig10(v))
        while not x.sum_of_squares() > 1:
            x = CoefficientVector(_sig10(np.asarray(x.values) * (1 + 1e-7)))
        return x

    def exponents(self, st: RawStream) -> tuple[str, str]:
        p = st.choice(P_CHOICES)
        q = Decimal(p) + Decimal(st.choice(Q_GAPS))
        return p, str(q)

    def weight(self, st: RawStream, mode) -> WeightSpec:
        """Random weight with P(w != 0) strictly above the mode threshold."""
        law = self.weight_law
        if law == "mixed":
            law = st.choice(self.WEIGHT_LAWS)
        floor = float(s_threshold(mode))
        # largest number of zero-mass thousandths keeping s > floor
        zero_units = math.ceil((1 - floor) * 1000) - 1
        if law == "independent":
            m = int(st.integers(1, 5, 1)[0])
            z = int(st.integers(0, zero_units, 1)[0]) if st.uniform(1)[0] < 0.7 else 0
            parts = _partition(st, 1000 - z, m) if 1000 - z >= m else [1000 - z]
            atoms = [(format(0.05 + 4.95 * u, ".3g"), f"{k / 1000}") for u, k in zip(st.uniform(len(parts)), parts)]
            if z:
                atoms.append(("0", f"{z / 1000}"))
            return WeightSpec.independent(atoms)
        if law == "sign_function":
            k = int(st.integers(1, 3, 1)[0])
            cells = 2**k
            max_zeros = max(z for z in range(cells) if 1 - z / cells > floor)
            zeros = int(st.integers(0, max_zeros, 1)[0])
            values = [format(0.1 + 2.9 * u, ".3g") for u in st.uniform(cells)]
            for pos in st.integers(0, cells - 1, zeros):
                values[int(pos)] = "0"
            s_table = sum(1 for v in values if Decimal(v) > 0) / cells
            aux = None
            if st.uniform(1)[0] < 0.5:
                room = math.ceil((1 - floor / s_table) * 1000) - 1
                z = int(st.integers(0, max(room, 0), 1)[0]) if room > 0 else 0
                aux = [(format(0.5 + 1.5 * st.uniform(1)[0], ".3g"), f"{(1000 - z) / 1000}")]
                if z:
                    aux.append(("0", f"{z / 1000}"))
            return WeightSpec.sign_function(k, values, aux)
        raise DomainError(f"unknown weight law {law!r}")

    def distribution(self, st: RawStream) -> list[tuple[str, str]]:
        """Random nonnegative, nonzero distribution with at most 8 atoms."""
        m = int(st.integers(1, 8, 1)[0])
        parts = _partition(st, 1000, m)
        if st.uniform(1)[0] < 0.3:
            values = [str(int(v)) for v in st.integers(0, 3, m)]
        else:
            values = [format(5 * u, ".3g") if u > 0.15 else "0" for u in st.uniform(m)]
        if all(Decimal(v) == 0 for v in values):
            values[0] = "1"
        return [(v, f"{k / 1000}") for v, k in zip(values, parts)]


@dataclass
class SuiteReport:
    suite: str
    seed: int
    case_count: int = 0
    pass_count: int = 0
    failures: list[dict] = field(default_factory=list)
    wall_time: float = 0.0
    mode: str | None = None

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return asdict(self)


def _jsonable(value):
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, (tuple, list)):
        return [_jsonable(v) for v in value]
    return value


def _modes(mode):
    if mode is None:
        return tuple(ThresholdMode)
    return (ThresholdMode.parse(mode),)


def _run_case(gen: CaseGenerator, suite: str, index: int, mode):
    """Return (inputs, list of (label, CheckResult)) for one case."""
    st = gen.stream(index)
    if suite == "fourth-moment":
        x = gen.coefficients(st)
        return {"coefficients": x.texts}, [("", check_fourth_moment(x))]
    if suite == "zero-mass":
        x = gen.coefficients(st)
        return {"coefficients": x.texts}, [("", check_zero_mass_bound(x))]
    if suite == "khintchine-upper":
        x = gen.coefficients(st)
        return {"coefficients": x.texts}, [(f"q={q:g}", check_khintchine_upper(x, q)) for q in UPPER_Q]
    if suite == "l0":
        x = gen.straddling(st)
        checks = []
        for a in A_GRID:
            tail = exact_tail(x, a, strict=True)
            for m in _modes(mode):
                bound = tail_threshold(float(a), m)
                checks.append((f"a={a},{m.value}", CheckResult(tail >= bound, tail, bound)))
        return {"coefficients": x.texts}, checks
    if suite == "paley-zygmund":
        dist = gen.distribution(st)
        checks = [(f"lambda={lam},q={q:g}", check_paley_zygmund(dist, lam, q))
                  for lam in LAMBDA_GRID for q in PZ_Q]
        return {"distribution": dist}, checks
    if suite == "sandwich":
        m = _modes(mode)[index % 2] if mode is None else ThresholdMode.parse(mode)
        w = gen.weight(st, m)
        x = gen.coefficients(st)
        p, q = gen.exponents(st)
        inputs = {"weight": w.to_json(), "coefficients": x.texts, "p": p, "q": q, "mode": m.value}
        return inputs, [(m.value, check_sandwich(w, x, p, q, m))]
    raise DomainError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")


def run_suite(gen: CaseGenerator, suite: str, cases: int, mode=None) -> SuiteReport:
    """Run ``cases`` generated cases of ``suite``; deterministic in the seed."""
    if suite not in SUITES:
        raise DomainError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if cases < 0:
        raise DomainError("case count must be nonnegative")
    report = SuiteReport(suite, gen.seed, mode=None if mode is None else ThresholdMode.parse(mode).value)
    start = time.perf_counter()
    for i in range(cases):
        inputs, checks = _run_case(gen, suite, i, mode)
        report.case_count += 1
        bad = [(label, r) for label, r in checks if not r.passed]
        if not bad:
            report.pass_count += 1
            continue
        label, r = bad[0]
        report.failures.append({
            "case_index": i,
            "case_seed": gen.case_seed(i),
            "inputs": inputs,
            "check": label,
            "expected_bound": _jsonable(r.bound),
            "observed": _jsonable(r.observed),
        })
    report.wall_time = time.perf_counter() - start
    return report
