"""The stationary dimension group ``lim(Z^r, A')``, its state, and the
module of patch frequencies ``c * Z[1/lambda]``.

``A'`` is the transpose of the collared matrix: it sends the indicator of a
level-``n`` supertile class to the indicators of the level-``n+1`` classes
containing it, counted with multiplicity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd

from .perron import IntMatrix, matvec, transpose


@dataclass(frozen=True)
class FreqModule:
    """``coefficient * Z[1/base]``, kept in the normal form where the
    coefficient's numerator and denominator are coprime to ``base``."""

    coefficient: Fraction
    base: int
    dim: int = 1

    def __post_init__(self):
        if self.coefficient <= 0:
            raise ValueError("module coefficient must be positive")
        if self.base < 2:
            raise ValueError("module base must be at least 2")

    def __str__(self) -> str:
        c = self.coefficient
        return f"({c.numerator}/{c.denominator})·Z[1/{self.base}]"

    def to_json(self) -> dict:
        c = self.coefficient
        return {"coefficient": [c.numerator, c.denominator], "base": self.base}


@dataclass(frozen=True)
class LimitElement:
    """The class ``[k, n]`` of ``k`` at stage ``n`` of the direct limit."""

    vector: tuple[int, ...]
    level: int

    def advanced(self, a: IntMatrix) -> LimitElement:
        """The same limit element one stage later: ``[A' k, n + 1]``."""
        return LimitElement(tuple(matvec(transpose(a), self.vector)), self.level + 1)


def strip_factors(n: int, base: int) -> int:
    """``n`` with every prime factor shared with ``base`` removed."""
    g = gcd(n, base)
    while g > 1:
        while n % g == 0:
            n //= g
        g = gcd(n, base)
    return n


def canonical(c: Fraction, base: int) -> Fraction:
    return Fraction(strip_factors(c.numerator, base), strip_factors(c.denominator, base))


def state(e: LimitElement, alpha_prime, D: int, lam: int) -> Fraction:
    """``(1/D) (1/lam^(n-1)) sum k_i alpha'_i``."""
    if len(e.vector) != len(alpha_prime):
        raise ValueError(f"vector has length {len(e.vector)}, expected {len(alpha_prime)}")
    total = sum(k * a for k, a in zip(e.vector, alpha_prime))
    return Fraction(total, D) / Fraction(lam) ** (e.level - 1)


def gap_module(alpha_prime, D: int, lam: int) -> FreqModule:
    if any(a <= 0 for a in alpha_prime):
        raise ValueError("alpha' must be strictly positive")
    g = reduce(gcd, alpha_prime)
    return FreqModule(canonical(Fraction(g, D), lam), lam)


def class_frequency(alpha, class_id: int, level: int = 0) -> Fraction:
    """Frequency of a collared class among level-``level`` supertile positions."""
    if not 0 <= class_id < len(alpha):
        raise IndexError(f"unknown class id {class_id}")
    if level < 0:
        raise ValueError("level must be nonnegative")
    return Fraction(alpha[class_id]) / 5**level


def membership(x: Fraction, m: FreqModule) -> bool:
    """Whether ``x`` lies in ``c * Z[1/base]``."""
    q = Fraction(x) / m.coefficient
    return strip_factors(q.denominator, m.base) == 1


def empirical_frequencies(labels, n_classes: int) -> list[Fraction]:
    """Histogram of class labels normalised to sum 1."""
    counts = [0] * n_classes
    for c in labels:
        counts[c] += 1
    total = sum(counts)
    return [Fraction(c, total) for c in counts]


def report(alpha_prime, D: int, lam: int) -> dict:
    m = gap_module(alpha_prime, D, lam)
    return {
        **m.to_json(),
        "gcd": reduce(gcd, alpha_prime),
        "denominator": D,
        "module": str(m),
    }
