"""Fixed-precision p-adic integers.

All arithmetic in the package happens in Z/p^N for an odd prime p >= 3 and
a precision exponent N >= 1. PadicContext pins (p, N); PadicInt wraps a
residue in [0, p^N). A residue divisible by p^N is indistinguishable from
zero, so valuation is capped at N (valuation(0) == N by convention); that
floor is the source of every "unresolved at precision" flag downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ContextMismatch, NotAUnit


def _is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PadicContext:
    """Working ring Z/p^N.

    Attributes:
        p: odd prime >= 3.
        precision_exp: N >= 1, the power of p defining the modulus.
    """

    p: int
    precision_exp: int

    def __post_init__(self) -> None:
        if not _is_odd_prime(self.p):
            raise ValueError(f"p must be an odd prime >= 3, got {self.p}")
        if self.precision_exp < 1:
            raise ValueError("precision_exp must be >= 1")

    @property
    def modulus(self) -> int:
        return self.p**self.precision_exp

    def reduce(self, value: int) -> int:
        return value % self.modulus

    def valuation_of(self, residue: int) -> int:
        """p-adic valuation of a residue, capped at precision_exp."""
        r = residue % self.modulus
        if r == 0:
            return self.precision_exp
        v = 0
        while r % self.p == 0:
            r //= self.p
            v += 1
        return v

    def make(self, value: int) -> "PadicInt":
        return PadicInt(self.reduce(value), self)


@dataclass(frozen=True)
class PadicInt:
    """A residue in [0, p^N) tied to its context. Values are immutable."""

    residue: int
    context: PadicContext

    def __post_init__(self) -> None:
        if not 0 <= self.residue < self.context.modulus:
            object.__setattr__(self, "residue", self.residue % self.context.modulus)

    def _check(self, other: "PadicInt") -> None:
        if self.context != other.context:
            raise ContextMismatch(f"{self.context} vs {other.context}")

    def __add__(self, other: "PadicInt") -> "PadicInt":
        self._check(other)
        return PadicInt((self.residue + other.residue) % self.context.modulus, self.context)

    def __sub__(self, other: "PadicInt") -> "PadicInt":
        self._check(other)
        return PadicInt((self.residue - other.residue) % self.context.modulus, self.context)

    def __neg__(self) -> "PadicInt":
        return PadicInt((-self.residue) % self.context.modulus, self.context)

    def __mul__(self, other: "PadicInt") -> "PadicInt":
        self._check(other)
        return PadicInt((self.residue * other.residue) % self.context.modulus, self.context)

    def valuation(self) -> int:
        """Largest v <= N with p^v dividing the residue; N for zero."""
        return self.context.valuation_of(self.residue)

    def is_unit(self) -> bool:
        return self.residue % self.context.p != 0

    def invert_unit(self) -> "PadicInt":
        """Multiplicative inverse mod p^N; raises NotAUnit for v > 0."""
        if not self.is_unit():
            raise NotAUnit(f"{self.residue} has positive valuation")
        return PadicInt(pow(self.residue, -1, self.context.modulus), self.context)

    def __repr__(self) -> str:
        return f"PadicInt({self.residue} mod {self.context.p}^{self.context.precision_exp})"
