"""Dimension-lowering recursion for structure constants.

Each monomial of the degree-d residue polynomial names a product of
constants one dimension up, with index shifts determined by the ordered
partition the monomial belongs to.  Iterating the step from the stable
range ``N >= 2k`` (where only degree 1 survives and the row is the
classical one) defines the virtual constants for every ``(N, k)``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .residue import residue_polynomial
from .tables import REAL, VIRTUAL, ConstantTable, beauville_row
from .wpoly import WPoly


def delta_shift(
    x_exp: int, y_exp: int, z_exps: Sequence[int], N: int, k: int
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Index data of one residue-polynomial monomial.

    Returns ``(segments, shifts)``: the monomial ``x**a * prod z_i**e_i * y**b``
    selects the ordered partition whose interior breakpoints carry a positive
    z-exponent, and each factor of the corresponding product of constants is
    looked up at ``m + shift``.  The dimension entering the shifts is the
    *target* (lower) one.
    """
    d = x_exp + y_exp + sum(z_exps) + 1
    interior = tuple(i + 1 for i, e in enumerate(z_exps) if e > 0)
    pts = (0,) + interior + (d,)
    l = len(pts) - 1
    exps = [x_exp] + [z_exps[i - 1] for i in interior] + [y_exp]
    shifts = []
    for j in range(1, l + 1):
        delta = l - d  # the constant vector
        if j >= 2:
            delta += pts[j - 1] - (j - 1)  # breakpoint offset
            delta += pts[j - 1] * (N - k)  # grading transport
        # staircase contributions from interior exponents and the y-exponent
        delta += sum(exps[jp] - 1 for jp in range(j, l))
        delta += exps[l]
        shifts.append(delta)
    segments = tuple(b - a for a, b in zip(pts, pts[1:]))
    return segments, tuple(shifts)


def recursion_value(src: ConstantTable, N: int, d: int, m: int) -> Fraction:
    """One constant at the lower dimension from the table one dimension up."""
    if src.N != N + 1:
        raise ValueError("source table must live one dimension up")
    k = src.k
    acc = Fraction(0)
    for (x_exp, y_exp, z_exps), coeff in residue_polynomial(d).monomials.items():
        segments, shifts = delta_shift(x_exp, y_exp, z_exps, N, k)
        prod = coeff
        for seg, delta in zip(segments, shifts):
            prod *= src.get(seg, m + delta)
            if prod == 0:
                break
        acc += prod
    return acc


def recursion_step(src: ConstantTable, N: int) -> ConstantTable:
    """Apply the recursion once, producing the table at dimension ``N``."""
    if src.N != N + 1:
        raise ValueError("source table must live one dimension up")
    if src.flavor == REAL and N - src.k < 2:
        raise ValueError("real-flavor recursion output requires N - k >= 2")
    return ConstantTable.build(
        N, src.k, src.dmax, src.flavor, lambda d, m: recursion_value(src, N, d, m)
    )


def initial_table(N: int, k: int, dmax: int, flavor: str = VIRTUAL) -> ConstantTable:
    """Table in the stable range: the classical degree-1 row, nothing else."""
    if N < 2 * k:
        raise ValueError("initial condition lives in the range N >= 2k")
    row = beauville_row(k)
    return ConstantTable.build(
        N, k, dmax, flavor, lambda d, m: row[m] if d == 1 else Fraction(0)
    )


@lru_cache(maxsize=None)
def virtual_table(N: int, k: int, dmax: int) -> ConstantTable:
    """Virtual structure constants for any ``(N, k)``, by iterated recursion."""
    if N < 1 or k < 1 or dmax < 0:
        raise ValueError("N, k must be positive and dmax nonnegative")
    N0 = max(N, 2 * k)
    table = initial_table(N0, k, max(dmax, 1), VIRTUAL)
    for target in range(N0 - 1, N - 1, -1):
        table = recursion_step(table, target)
    return table


def virtual_row_poly(N: int, k: int, dmax: int, d: int) -> WPoly:
    """Virtual degree-d row packaged as a polynomial in the bookkeeping variable."""
    return virtual_table(N, k, dmax).row_poly(d)
