"""Exact scalar arithmetic for algebra coefficients.

Two coefficient domains are supported: the rationals (the default, backed by
``fractions.Fraction``) and prime fields Z/p. Elements of a prime field carry
their modulus so mixed-modulus arithmetic fails loudly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class ModInt:
    """An element of Z/p, normalized to 0 <= value < p."""

    value: int
    p: int

    def _check(self, other: "ModInt") -> None:
        if not isinstance(other, ModInt) or other.p != self.p:
            raise FieldError(f"mixed moduli: {self!r} vs {other!r}")

    def __add__(self, other: "ModInt") -> "ModInt":
        self._check(other)
        return ModInt((self.value + other.value) % self.p, self.p)

    def __sub__(self, other: "ModInt") -> "ModInt":
        self._check(other)
        return ModInt((self.value - other.value) % self.p, self.p)

    def __mul__(self, other: "ModInt") -> "ModInt":
        self._check(other)
        return ModInt((self.value * other.value) % self.p, self.p)

    def __neg__(self) -> "ModInt":
        return ModInt((-self.value) % self.p, self.p)

    def __truediv__(self, other: "ModInt") -> "ModInt":
        self._check(other)
        if other.value % other.p == 0:
            raise ZeroDivisionError("division by zero in Z/p")
        inv = pow(other.value, -1, self.p)
        return ModInt((self.value * inv) % self.p, self.p)

    def __bool__(self) -> bool:
        return self.value % self.p != 0

    def __str__(self) -> str:
        return str(self.value)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class Rationals:
    """The field of rational numbers."""

    name = "QQ"

    def of(self, num: int, den: int = 1) -> Fraction:
        return Fraction(num, den)

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def __repr__(self) -> str:
        return "Rationals()"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Rationals)

    def __hash__(self) -> int:
        return hash("sepalg.Rationals")


class PrimeField:
    """The field Z/p for a prime p."""

    def __init__(self, p: int):
        if not _is_prime(p):
            raise FieldError(f"{p} is not prime")
        self.p = p
        self.name = f"GF({p})"

    def of(self, num: int, den: int = 1) -> ModInt:
        return ModInt(num % self.p, self.p) / ModInt(den % self.p, self.p)

    @property
    def zero(self) -> ModInt:
        return ModInt(0, self.p)

    @property
    def one(self) -> ModInt:
        return ModInt(1, self.p)

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("sepalg.PrimeField", self.p))


QQ = Rationals()
