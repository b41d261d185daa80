"""Exact univariate polynomials over the rationals.

``WPoly`` is the workhorse for every generating polynomial in one
bookkeeping variable: rows of structure constants packaged as
polynomials, the reduction coefficients of the scalar ODE, and the
interpolation targets of the residue machinery.  Coefficients are
``fractions.Fraction`` throughout; no floating point ever enters.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"exact rational expected, got {type(x).__name__}")


class WPoly:
    """Dense polynomial ``c0 + c1*w + ... + cn*w**n`` with Fraction coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Fraction | int] = ()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls) -> "WPoly":
        return cls(())

    @classmethod
    def one(cls) -> "WPoly":
        return cls((1,))

    @classmethod
    def monomial(cls, power: int, coeff: Fraction | int = 1) -> "WPoly":
        return cls((0,) * power + (coeff,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, j: int) -> Fraction:
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, WPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == WPoly((other,))
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other) -> "WPoly":
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return WPoly(tuple(self[j] + other[j] for j in range(n)))

    __radd__ = __add__

    def __neg__(self) -> "WPoly":
        return WPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "WPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "WPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "WPoly":
        if isinstance(other, (int, Fraction)):
            f = _frac(other)
            return WPoly(tuple(c * f for c in self.coeffs))
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return WPoly.zero()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return WPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "WPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = WPoly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    @staticmethod
    def _coerce(other) -> "WPoly":
        if isinstance(other, WPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return WPoly((other,))
        raise TypeError(f"cannot combine WPoly with {type(other).__name__}")

    def __call__(self, x: Fraction | int) -> Fraction:
        x = _frac(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose_affine(self, a: Fraction | int, b: Fraction | int) -> "WPoly":
        """Return ``p(a + b*z)`` as a polynomial in ``z`` (exact basis change)."""
        a, b = _frac(a), _frac(b)
        acc = WPoly.zero()
        lin = WPoly((a, b))
        for c in reversed(self.coeffs):
            acc = acc * lin + WPoly((c,))
        return acc

    def reversed_coeffs(self, degree: int) -> tuple[Fraction, ...]:
        """Coefficients read against the complement basis ``w**j -> w**(degree-j)``."""
        if self.degree > degree:
            raise ValueError("degree bound below actual degree")
        return tuple(self[degree - j] for j in range(degree + 1))

    def __repr__(self) -> str:
        if self.is_zero():
            return "WPoly(0)"
        parts = []
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            parts.append(f"{c}" if j == 0 else f"{c}*w^{j}")
        return "WPoly(" + " + ".join(parts) + ")"


def prod_linear(factors: Sequence[tuple[Fraction | int, Fraction | int]]) -> WPoly:
    """Product of linear factors ``(c + s*w)`` given as ``(c, s)`` pairs."""
    out = WPoly.one()
    for c, s in factors:
        out = out * WPoly((c, s))
    return out


def interpolate(points: Sequence[tuple[Fraction, Fraction]]) -> WPoly:
    """Lagrange interpolation through exact points ``(x_i, y_i)``, distinct x_i."""
    result = WPoly.zero()
    for i, (xi, yi) in enumerate(points):
        if yi == 0:
            continue
        basis = WPoly.one()
        denom = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            basis = basis * WPoly((-xj, 1))
            denom *= xi - xj
        result = result + basis * (yi / denom)
    return result
