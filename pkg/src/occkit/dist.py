"""Exact finite distributions over fixed-length bitstrings.

All masses are Fractions and every closeness decision is made in exact
arithmetic. Entropies are the one exception: they are reporting quantities,
returned as floats with a documented 1e-12 evaluation tolerance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .bitio import BitString
from .errors import NonDyadicExactError

ENTROPY_TOLERANCE = 1e-12

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class FiniteDistribution:
    """Probability map over {0,1}^n; absent keys carry mass 0."""

    n: int
    probs: Mapping[BitString, Fraction]

    def __post_init__(self):
        object.__setattr__(
            self, "probs", {k: Fraction(v) for k, v in self.probs.items() if v != 0}
        )
        for k, p in self.probs.items():
            if len(k) != self.n:
                raise ValueError(f"key {k!r} has length {len(k)}, expected {self.n}")
            if p < 0 or p > 1:
                raise ValueError(f"mass {p} outside [0,1]")
        if sum(self.probs.values(), ZERO) != ONE:
            raise ValueError("masses must sum to exactly 1")

    @classmethod
    def _unchecked(cls, n: int, probs: dict) -> "FiniteDistribution":
        """Internal fast path for callers that construct exact, normalized
        maps by construction (the machine-distribution DP)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "probs", probs)
        return obj

    def mass(self, key: BitString) -> Fraction:
        return self.probs.get(key, ZERO)

    def support(self) -> list[BitString]:
        return sorted(self.probs, key=lambda k: (len(k), k.to01()))

    def is_dyadic(self) -> bool:
        return all(p.denominator & (p.denominator - 1) == 0 for p in self.probs.values())

    def natural_exponent(self) -> int:
        """Smallest l with every mass a multiple of 2^-l; dyadic inputs only."""
        if not self.is_dyadic():
            raise NonDyadicExactError("distribution has non-dyadic masses")
        return max((p.denominator.bit_length() - 1 for p in self.probs.values()), default=0)

    @classmethod
    def point(cls, key: BitString) -> "FiniteDistribution":
        return cls(len(key), {key: ONE})

    @classmethod
    def uniform(cls, n: int) -> "FiniteDistribution":
        p = Fraction(1, 1 << n)
        return cls(n, {BitString.from_int(v, n): p for v in range(1 << n)})

    def to_json(self) -> str:
        probs = {k.to01(): str(self.probs[k]) for k in self.support()}
        return json.dumps({"n": self.n, "probs": probs}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FiniteDistribution":
        obj = json.loads(text)
        probs = {BitString.from01(k): Fraction(v) for k, v in obj["probs"].items()}
        return cls(int(obj["n"]), probs)


def statistical_distance(x: FiniteDistribution, y: FiniteDistribution) -> Fraction:
    """Half the L1 distance between two same-length distributions, exactly."""
    if x.n != y.n:
        raise ValueError(f"length mismatch: {x.n} vs {y.n}")
    keys = set(x.probs) | set(y.probs)
    total = sum((abs(x.mass(k) - y.mass(k)) for k in keys), ZERO)
    return total / 2


def shannon_entropy(x: FiniteDistribution) -> float:
    return -sum(float(p) * math.log2(float(p)) for p in x.probs.values() if p > 0) + 0.0


def renyi_entropy(x: FiniteDistribution, alpha) -> float:
    """Order-alpha entropy in bits; alpha=1 is Shannon, alpha=inf min-entropy."""
    if alpha == math.inf:
        return -math.log2(float(max(x.probs.values()))) + 0.0
    alpha = Fraction(alpha) if not isinstance(alpha, float) else alpha
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha == 1:
        return shannon_entropy(x)
    if alpha == 0:
        return math.log2(len(x.probs))
    a = float(alpha)
    s = sum(float(p) ** a for p in x.probs.values())
    return math.log2(s) / (1.0 - a)


def _apportion(masses: list[Fraction], levels: int) -> list[Fraction]:
    """Round masses to multiples of 2^-levels, conserving the total.

    Floor first, then hand the leftover units to the largest remainders;
    remainder ties break toward the earlier index, so callers fix tie order
    by sorting their keys.
    """
    scale = 1 << levels
    floors = [int(m * scale) for m in masses]
    rems = [m * scale - f for m, f in zip(masses, floors)]
    missing = scale - sum(floors)
    order = sorted(range(len(masses)), key=lambda i: (-rems[i], i))
    for i in order[:missing]:
        floors[i] += 1
    return [Fraction(f, scale) for f in floors]


def dyadic_approximation(
    x: FiniteDistribution, delta: Fraction
) -> tuple[FiniteDistribution, int]:
    """Closest-by-rule dyadic distribution within statistical distance delta.

    Dyadic inputs come back unchanged with their natural exponent. Otherwise
    the exponent grows from 1 until the apportioned rounding lands within
    delta; delta = 0 is then unsatisfiable and raises.
    """
    delta = Fraction(delta)
    if delta < 0:
        raise ValueError("delta must be >= 0")
    if x.is_dyadic():
        return x, x.natural_exponent()
    if delta == 0:
        raise NonDyadicExactError(
            "delta=0 requires dyadic masses (circuit outputs are dyadic)"
        )
    keys = x.support()
    masses = [x.probs[k] for k in keys]
    levels = 1
    while True:
        rounded = _apportion(masses, levels)
        approx = FiniteDistribution(x.n, dict(zip(keys, rounded)))
        if statistical_distance(x, approx) <= delta:
            return approx, levels
        levels += 1


def restrict(x: FiniteDistribution, n: int) -> FiniteDistribution:
    """Prefix marginal: the mass of p is the total mass of its extensions."""
    if n > x.n:
        raise ValueError(f"cannot restrict length {x.n} to longer length {n}")
    if n == x.n:
        return x
    out: dict[BitString, Fraction] = {}
    for k, p in x.probs.items():
        pre = k[:n]
        out[pre] = out.get(pre, ZERO) + p
    return FiniteDistribution(n, out)


def mixture(parts: list[tuple[Fraction, FiniteDistribution]]) -> FiniteDistribution:
    """Convex combination; weights must sum to 1 exactly."""
    if not parts:
        raise ValueError("empty mixture")
    n = parts[0][1].n
    out: dict[BitString, Fraction] = {}
    for w, d in parts:
        if d.n != n:
            raise ValueError("mixture components have mixed lengths")
        for k, p in d.probs.items():
            out[k] = out.get(k, ZERO) + w * p
    return FiniteDistribution(n, out)
