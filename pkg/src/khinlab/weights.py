"""Discrete weight model.

A weight is ``w = table[first k signs] * u`` where ``u`` is an independent
atom layer.  An independent weight is the special case ``k = 0`` with a
one-entry table equal to 1; a pure sign function has the single aux atom
``(1, 1)``.  Sign patterns are indexed lexicographically with ``+`` before
``-``, the first sign being the most significant bit.
"""
from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
import math
from typing import Callable, NamedTuple

from ._numbers import to_decimal, to_fraction
from .errors import DomainError, KhinlabError, MalformedWeight, NoValidDelta

PROB_TOLERANCE = 1e-12
_ONE = Decimal(1)


@dataclass(frozen=True)
class WeightSpec:
    depth: int
    table: tuple[Decimal, ...]
    aux: tuple[tuple[Decimal, Fraction], ...]
    kind: str = "independent"

    def __post_init__(self):
        if self.depth < 0:
            raise MalformedWeight("sign-function depth must be nonnegative")
        if len(self.table) != 2**self.depth:
            raise MalformedWeight(
                f"depth {self.depth} needs {2**self.depth} table values, got {len(self.table)}")
        if not self.aux:
            raise MalformedWeight("at least one atom is required")
        if any(v < 0 for v in self.table) or any(v < 0 for v, _ in self.aux):
            raise MalformedWeight("weight values must be nonnegative (pass |w|)")
        if any(p <= 0 for _, p in self.aux):
            raise MalformedWeight("atom probabilities must be positive")
        total = sum((p for _, p in self.aux), Fraction(0))
        if abs(total - 1) > PROB_TOLERANCE:
            raise MalformedWeight(f"atom probabilities sum to {float(total)!r}, not 1")
        if all(v == 0 for v in self.table) or all(v == 0 for v, _ in self.aux):
            raise MalformedWeight("weight is identically zero")

    @classmethod
    def independent(cls, atoms) -> WeightSpec:
        """Weight independent of the signs; ``atoms`` is an iterable of (value, prob)."""
        aux = tuple((to_decimal(v), to_fraction(p)) for v, p in atoms)
        return cls(0, (_ONE,), aux, "independent")

    @classmethod
    def sign_function(cls, k: int, values, aux=None) -> WeightSpec:
        table = tuple(to_decimal(v) for v in values)
        if aux is None:
            layer = ((_ONE, Fraction(1)),)
        else:
            layer = tuple((to_decimal(v), to_fraction(p)) for v, p in aux)
        return cls(int(k), table, layer, "sign_function")

    @classmethod
    def constant(cls, value=1) -> WeightSpec:
        return cls.independent([(value, 1)])

    @classmethod
    def from_json(cls, obj) -> WeightSpec:
        try:
            if not isinstance(obj, dict) or len(obj) != 1:
                raise MalformedWeight("expected exactly one of 'independent' or 'sign_function'")
            if "independent" in obj:
                return cls.independent(_atoms_from_json(obj["independent"]))
            if "sign_function" in obj:
                body = obj["sign_function"]
                k = body["k"]
                if not isinstance(k, int) or isinstance(k, bool):
                    raise MalformedWeight("'k' must be an integer")
                aux = body.get("aux")
                if aux is not None:
                    aux = _atoms_from_json(aux)
                return cls.sign_function(k, body["values"], aux)
            raise MalformedWeight(f"unknown weight kind {next(iter(obj))!r}")
        except (KeyError, TypeError) as exc:
            raise MalformedWeight(f"malformed weight JSON: {exc}") from None
        except KhinlabError as exc:
            if isinstance(exc, MalformedWeight):
                raise
            raise MalformedWeight(str(exc)) from None

    def to_json(self) -> dict:
        atoms = {"atoms": [{"value": str(v), "prob": _prob_text(p)} for v, p in self.aux]}
        if self.kind == "independent":
            return {"independent": atoms}
        body = {"k": self.depth, "values": [str(v) for v in self.table]}
        if self.aux != ((_ONE, Fraction(1)),):
            body["aux"] = atoms
        return {"sign_function": body}

    def atoms(self) -> list[tuple[Fraction, Fraction]]:
        """Distribution of w as merged (value, probability) pairs, ascending."""
        cell = Fraction(1, 2**self.depth)
        merged: dict[Fraction, Fraction] = {}
        for tv in self.table:
            for uv, p in self.aux:
                v = Fraction(tv) * Fraction(uv)
                merged[v] = merged.get(v, Fraction(0)) + cell * p
        return sorted(merged.items())

    def scaled(self, c) -> WeightSpec:
        """The weight multiplied by the positive decimal ``c``."""
        c = to_decimal(c)
        if c <= 0:
            raise DomainError("scale factor must be positive")
        aux = tuple((v * c, p) for v, p in self.aux)
        return WeightSpec(self.depth, self.table, aux, self.kind)


def _atoms_from_json(block):
    atoms = block["atoms"]
    if not isinstance(atoms, list):
        raise MalformedWeight("'atoms' must be a list")
    out = []
    for atom in atoms:
        v, p = atom["value"], atom["prob"]
        if not isinstance(v, str) or not isinstance(p, str):
            raise MalformedWeight("atom value and prob must be decimal strings")
        out.append((v, p))
    return out


def _prob_text(p: Fraction) -> str:
    d = Decimal(p.numerator) / Decimal(p.denominator)
    return str(d) if Fraction(d) == p else f"{p.numerator}/{p.denominator}"


class WeightStats(NamedTuple):
    s: Fraction
    norm_q: float
    survival: Callable[[float], Fraction]


def survival_function(weight: WeightSpec) -> Callable[[float], Fraction]:
    atoms = weight.atoms()

    def survival(delta) -> Fraction:
        return sum((p for v, p in atoms if v > delta), Fraction(0))

    return survival


def weight_stats(weight: WeightSpec, q: float) -> WeightStats:
    """s = P(w != 0), the L^q norm of w, and the exact survival function P(w > .)."""
    if not q > 0:
        raise DomainError("q must be positive")
    atoms = weight.atoms()
    s = sum((p for v, p in atoms if v > 0), Fraction(0))
    moment = math.fsum(float(p) * float(v) ** q for v, p in atoms if v > 0)
    return WeightStats(s, moment ** (1.0 / q), survival_function(weight))


def delta0(weight: WeightSpec, tau) -> Fraction:
    """Largest weight level v > 0 with P(w >= v) >= tau.

    This is the supremum of {d > 0 : P(w > d) >= tau} for a discrete weight;
    it is attained at an atom, so the scan is exact.
    """
    if not 0 < tau <= 1:
        raise DomainError(f"tau must lie in (0, 1], got {float(tau)!r}")
    mass = Fraction(0)
    for v, p in reversed(weight.atoms()):
        if v <= 0:
            break
        mass += p
        if mass >= tau:
            return v
    raise NoValidDelta(f"P(w > 0) = {float(mass):.12g} is below tau = {float(tau):.12g}")
