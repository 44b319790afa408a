"""Arithmetic in the prime field F_p.

Hot loops elsewhere in the package work on raw integer arrays modulo p; the
FieldElement wrapper exists for the places where carrying the modulus around
explicitly is worth it (scalar parameters, public entry points).
"""

from __future__ import annotations

from dataclasses import dataclass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_odd_prime(p: int) -> int:
    """Validate that p is an odd prime >= 3 and return it."""
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise ValueError(f"modulus must be an odd prime >= 3, got {p}")
    return p


def inv_mod(a: int, p: int) -> int:
    """Multiplicative inverse of a modulo the odd prime p."""
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no multiplicative inverse modulo {p}")
    return pow(a, p - 2, p)


def is_square_mod(a: int, p: int) -> bool:
    """True when a is a square residue modulo p; 0 counts as a square."""
    a %= p
    if a == 0:
        return True
    return pow(a, (p - 1) // 2, p) == 1


def squares_mod(p: int) -> set[int]:
    """The set of square residues modulo p, including 0."""
    return {(x * x) % p for x in range(p)}


@dataclass(frozen=True)
class FieldElement:
    """A residue in [0, p) for an odd prime modulus p."""

    value: int
    p: int

    def __post_init__(self):
        check_odd_prime(self.p)
        object.__setattr__(self, "value", int(self.value) % self.p)

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise ValueError(f"modulus mismatch: {self.p} vs {other.p}")
            return other
        return FieldElement(int(other), self.p)

    def __add__(self, other):
        other = self._coerce(other)
        return FieldElement(self.value + other.value, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return FieldElement(self.value - other.value, self.p)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return FieldElement(self.value * other.value, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inv()

    def __neg__(self):
        return FieldElement(-self.value, self.p)

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        return FieldElement(pow(self.value, n, self.p), self.p)

    def inv(self) -> "FieldElement":
        return FieldElement(inv_mod(self.value, self.p), self.p)

    def is_square(self) -> bool:
        return is_square_mod(self.value, self.p)

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.p})"
