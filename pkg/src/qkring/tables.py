"""Indexed families of structure constants and their selection rules.

A ``ConstantTable`` stores the numbers ``L[d, m]`` attached to a degree-k
hypersurface in projective (N-1)-space, graded by curve degree ``d`` and
cohomology index ``m``.  Two flavors exist: ``real`` tables obey the
dimension-counting selection rule of the quantum product, ``virtual``
tables the wider window ``0 <= m <= N-1-(N-k)d`` of the recursion-defined
extension.  Lookups outside the stored window return 0, so consumers can
sum blindly over index shifts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .wpoly import WPoly, prod_linear

REAL = "real"
VIRTUAL = "virtual"


def degree_window(N: int, k: int, d: int) -> int:
    """Upper index bound ``N - 1 - (N - k) d`` shared by both flavors."""
    return N - 1 - (N - k) * d


def real_m_range(N: int, k: int, d: int) -> range:
    """Indices where a real structure constant of degree ``d`` may be nonzero."""
    if d < 1:
        return range(0)
    lo = max(0, 2 - (N - k) * d)
    hi = min(N - 3, degree_window(N, k, d))
    return range(lo, hi + 1)


def virtual_m_range(N: int, k: int, d: int) -> range:
    """Indices where a virtual structure constant of degree ``d`` may be nonzero."""
    if d < 1:
        return range(0)
    return range(0, degree_window(N, k, d) + 1)


def beauville_row(k: int) -> WPoly:
    """Degree-1 generating polynomial ``k * prod_{j=1}^{k-1} (j*w + (k-j))``.

    Its coefficients are the degree-1 structure constants, which do not
    depend on the ambient dimension.
    """
    if k < 1:
        raise ValueError("k must be positive")
    return prod_linear([(k - j, j) for j in range(1, k)]) * k


@dataclass(frozen=True)
class ConstantTable:
    """Family ``(d, m) -> Fraction`` with flavor-dependent validity windows."""

    N: int
    k: int
    dmax: int
    flavor: str
    values: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.flavor not in (REAL, VIRTUAL):
            raise ValueError(f"unknown flavor {self.flavor!r}")
        rng = real_m_range if self.flavor == REAL else virtual_m_range
        for (d, m), v in self.values.items():
            if not 1 <= d <= self.dmax:
                raise ValueError(f"degree {d} outside table range")
            if m not in rng(self.N, self.k, d):
                raise ValueError(
                    f"index (d={d}, m={m}) violates the {self.flavor} selection rule "
                    f"for (N={self.N}, k={self.k})"
                )
            if not isinstance(v, Fraction):
                raise TypeError("table values must be Fractions")

    @classmethod
    def build(
        cls,
        N: int,
        k: int,
        dmax: int,
        flavor: str,
        entry: Callable[[int, int], Fraction],
    ) -> "ConstantTable":
        """Tabulate ``entry(d, m)`` over every valid index, dropping zeros."""
        rng = real_m_range if flavor == REAL else virtual_m_range
        vals: dict[tuple[int, int], Fraction] = {}
        for d in range(1, dmax + 1):
            for m in rng(N, k, d):
                v = Fraction(entry(d, m))
                if v != 0:
                    vals[(d, m)] = v
        return cls(N, k, dmax, flavor, vals)

    def m_range(self, d: int) -> range:
        rng = real_m_range if self.flavor == REAL else virtual_m_range
        return rng(self.N, self.k, d)

    def get(self, d: int, m: int) -> Fraction:
        """Zero-extended lookup; out-of-window indices read as 0."""
        return self.values.get((d, m), Fraction(0))

    def row(self, d: int) -> tuple[Fraction, ...]:
        return tuple(self.get(d, m) for m in self.m_range(d))

    def row_poly(self, d: int) -> WPoly:
        """The degree-d row packaged as ``sum_m L[d, m] w**m``."""
        window = degree_window(self.N, self.k, d)
        return WPoly([self.get(d, m) for m in range(max(window + 1, 0))])

    def same_values(self, other: "ConstantTable") -> bool:
        """Agreement of all stored entries, ignoring the flavor label."""
        return (
            (self.N, self.k, self.dmax) == (other.N, other.k, other.dmax)
            and dict(self.values) == dict(other.values)
        )

    def __repr__(self) -> str:
        return (
            f"ConstantTable(N={self.N}, k={self.k}, dmax={self.dmax}, "
            f"flavor={self.flavor}, {len(self.values)} entries)"
        )
