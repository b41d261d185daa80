"""Iterated residue calculus for the degree-lowering recursion.

The degree-d residue polynomial lives in variables ``x, y, z_1..z_{d-1}``
and encodes how degree-d structure constants in ambient dimension N
decompose into products of constants one dimension up.  Its coefficients
are extracted from nested contour integrals of rational functions whose
poles sit at exact rational locations: for each integration variable the
contour encloses the origin together with one weighted-average pole, and
nothing else.

Everything here is exact.  A coefficient polynomial is obtained by
evaluating the nested residues at generic rational points of the two
outer variables and interpolating the (homogeneous) result; points that
collide with a pole are detected and skipped.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Iterable, Sequence

from .wpoly import WPoly, interpolate

Rat = Fraction


class DegeneratePoint(Exception):
    """Raised when an evaluation point collides with the pole structure."""


# ---------------------------------------------------------------------------
# ordered partitions


def ordered_partitions(d: int, min_parts: int = 1) -> list[tuple[int, ...]]:
    """All compositions of ``d`` into at least ``min_parts`` positive parts."""
    out: list[tuple[int, ...]] = []

    def rec(rest: int, acc: list[int]):
        if rest == 0:
            if len(acc) >= min_parts:
                out.append(tuple(acc))
            return
        for p in range(1, rest + 1):
            acc.append(p)
            rec(rest - p, acc)
            acc.pop()

    rec(d, [])
    return out


def breakpoints(parts: Sequence[int]) -> tuple[int, ...]:
    """Prefix sums ``0 = i_0 < i_1 < ... < i_l`` of an ordered partition."""
    acc = [0]
    for p in parts:
        acc.append(acc[-1] + p)
    return tuple(acc)


@dataclass(frozen=True)
class OrderedPartition:
    """Composition of ``d`` with both encodings (parts and breakpoints)."""

    parts: tuple[int, ...]

    def __post_init__(self):
        if not self.parts or any(p < 1 for p in self.parts):
            raise ValueError("parts must be positive")

    @classmethod
    def from_breakpoints(cls, points: Sequence[int]) -> "OrderedPartition":
        if points[0] != 0 or any(b >= a for a, b in zip(points[1:], points)):
            raise ValueError("breakpoints must strictly increase from 0")
        return cls(tuple(a - b for a, b in zip(points[1:], points)))

    @property
    def total(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def points(self) -> tuple[int, ...]:
        return breakpoints(self.parts)


# ---------------------------------------------------------------------------
# homogeneous two-variable polynomials


class BiPoly:
    """Homogeneous polynomial ``sum_j a_j x**j y**(g-j)`` of degree ``g``."""

    __slots__ = ("degree", "coeffs")

    def __init__(self, degree: int, coeffs: Iterable[Fraction | int]):
        cs = tuple(Fraction(c) for c in coeffs)
        if degree < 0:
            if any(cs):
                raise ValueError("zero polynomial must have no coefficients")
            cs = ()
            degree = -1
        elif len(cs) != degree + 1:
            raise ValueError("need exactly degree+1 coefficients")
        self.degree = degree
        self.coeffs = cs

    @classmethod
    def zero(cls) -> "BiPoly":
        return cls(-1, ())

    @classmethod
    def const(cls, c: Fraction | int) -> "BiPoly":
        return cls(0, (c,))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiPoly):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.degree, self.coeffs))

    def __mul__(self, other) -> "BiPoly":
        if isinstance(other, (int, Fraction)):
            return BiPoly(self.degree, tuple(c * other for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return BiPoly.zero()
        g = self.degree + other.degree
        out = [Fraction(0)] * (g + 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return BiPoly(g, out)

    __rmul__ = __mul__

    def __add__(self, other: "BiPoly") -> "BiPoly":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError("cannot add homogeneous polynomials of different degree")
        return BiPoly(self.degree, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def swap(self) -> "BiPoly":
        """The polynomial with ``x`` and ``y`` exchanged."""
        return BiPoly(self.degree, tuple(reversed(self.coeffs))) if not self.is_zero() else self

    def __call__(self, xv: Fraction | int, yv: Fraction | int) -> Fraction:
        xv, yv = Fraction(xv), Fraction(yv)
        acc = Fraction(0)
        for j, c in enumerate(self.coeffs):
            if c != 0:
                acc += c * xv**j * yv ** (self.degree - j)
        return acc

    def __repr__(self) -> str:
        if self.is_zero():
            return "BiPoly(0)"
        terms = [
            f"{c}*x^{j}*y^{self.degree - j}" for j, c in enumerate(self.coeffs) if c != 0
        ]
        return "BiPoly(" + " + ".join(terms) + ")"


def base_poly(d: int) -> BiPoly:
    """Segment polynomial ``prod_{j=1}^{d-1} (j x + (d-j) y) / d`` of degree d-1."""
    if d < 1:
        raise ValueError("d must be positive")
    out = BiPoly.const(1)
    for j in range(1, d):
        # degree-1 coefficients are (y-part, x-part)
        out = out * BiPoly(1, (Fraction(d - j, d), Fraction(j, d)))
    return out


segment_poly = base_poly


# ---------------------------------------------------------------------------
# sparse polynomials in the integration variables (numeric end points)


class MPoly:
    """Sparse polynomial in ``nvars`` variables with Fraction coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict[tuple[int, ...], Fraction] | None = None):
        self.nvars = nvars
        self.terms = {e: c for e, c in (terms or {}).items() if c != 0}

    @classmethod
    def const(cls, nvars: int, c: Fraction | int) -> "MPoly":
        c = Fraction(c)
        return cls(nvars, {(0,) * nvars: c} if c != 0 else {})

    @classmethod
    def var(cls, nvars: int, idx: int) -> "MPoly":
        e = [0] * nvars
        e[idx] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "MPoly") -> "MPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return MPoly(self.nvars, out)

    def __mul__(self, other) -> "MPoly":
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return MPoly(self.nvars, {e: c * f for e, c in self.terms.items()})
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return MPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MPoly":
        result = MPoly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def by_var_power(self, idx: int) -> dict[int, "MPoly"]:
        """Split into coefficients of powers of one variable."""
        out: dict[int, dict[tuple[int, ...], Fraction]] = {}
        for e, c in self.terms.items():
            p = e[idx]
            rest = e[:idx] + (0,) + e[idx + 1 :]
            out.setdefault(p, {})[rest] = out.get(p, {}).get(rest, Fraction(0)) + c
        return {p: MPoly(self.nvars, t) for p, t in out.items()}

    def subs_linear(self, idx: int, lin: "LinForm") -> "MPoly":
        """Substitute variable ``idx`` by a linear form in the other variables."""
        pieces = self.by_var_power(idx)
        lin_poly = lin.as_mpoly(self.nvars)
        acc = MPoly(self.nvars, {})
        for p, coeff_poly in pieces.items():
            acc = acc + coeff_poly * (lin_poly**p)
        return acc

    def constant_value(self) -> Fraction:
        for e, c in self.terms.items():
            if any(e):
                raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * self.nvars, Fraction(0))


class LinForm:
    """Affine-linear form ``const + sum coeffs[i] * u_i`` over the u-variables."""

    __slots__ = ("const", "coeffs")

    def __init__(self, const: Fraction | int, coeffs: Sequence[Fraction | int]):
        self.const = Fraction(const)
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    def key(self) -> tuple:
        return (self.const, self.coeffs)

    def is_zero(self) -> bool:
        return self.const == 0 and all(c == 0 for c in self.coeffs)

    def involves(self, idx: int) -> bool:
        return self.coeffs[idx] != 0

    def only_var(self, idx: int) -> bool:
        """True if the form is a nonzero multiple of ``u_idx`` alone."""
        return (
            self.const == 0
            and self.coeffs[idx] != 0
            and all(c == 0 for i, c in enumerate(self.coeffs) if i != idx)
        )

    def drop_var(self, idx: int) -> "LinForm":
        cs = list(self.coeffs)
        cs[idx] = Fraction(0)
        return LinForm(self.const, cs)

    def subs_linear(self, idx: int, lin: "LinForm") -> "LinForm":
        c = self.coeffs[idx]
        if c == 0:
            return self
        base = self.drop_var(idx)
        return LinForm(
            base.const + c * lin.const,
            [a + c * b for a, b in zip(base.coeffs, lin.coeffs)],
        )

    def scale(self, f: Fraction) -> "LinForm":
        return LinForm(self.const * f, [c * f for c in self.coeffs])

    def as_mpoly(self, nvars: int) -> MPoly:
        terms: dict[tuple[int, ...], Fraction] = {}
        if self.const != 0:
            terms[(0,) * nvars] = self.const
        for i, c in enumerate(self.coeffs):
            if c != 0:
                e = [0] * nvars
                e[i] = 1
                terms[tuple(e)] = c
        return MPoly(nvars, terms)

    def constant_value(self) -> Fraction:
        if any(c != 0 for c in self.coeffs):
            raise ValueError("form is not constant")
        return self.const


@dataclass
class Term:
    """One summand ``num / prod(form ** power)`` of an intermediate integrand."""

    num: MPoly
    dens: dict[tuple, tuple[LinForm, int]]

    def add_den(self, tag: tuple, lin: LinForm, power: int) -> None:
        if power == 0:
            return
        if tag[0] == "F":
            tag = ("F", lin.key())
        if tag in self.dens:
            old, p = self.dens[tag]
            self.dens[tag] = (old, p + power)
        else:
            self.dens[tag] = (lin, power)


def _residue_at_root(
    t: Term,
    idx: int,
    root: LinForm,
    order: int,
    scale: Fraction,
    others: list[tuple[tuple, LinForm, int]],
    free: list[tuple[tuple, LinForm, int]],
    nvars: int,
) -> list[Term]:
    """Order-``order`` residue of one term at ``u_idx = root``.

    ``others`` are the remaining factors that still involve ``u_idx``; each is
    Taylor-expanded around the root, and its shifted base form keeps its tag so
    a designated pole survives as its own continuation into later stages.
    ``scale`` carries ``1 / lead**order`` of the defining factors.
    """
    out: list[Term] = []
    root_poly = root.as_mpoly(nvars)
    shifted: list[tuple[tuple, LinForm, Fraction, int]] = []
    for tag, lin, pw in others:
        base = lin.subs_linear(idx, root)  # the factor evaluated at the root
        if base.is_zero():
            raise DegeneratePoint("pole collision during residue extraction")
        shifted.append((tag, base, lin.coeffs[idx], pw))

    # numerator Taylor coefficients around the root: [eps^b] N(root + eps)
    num_parts = t.num.by_var_power(idx)
    num_taylor: dict[int, MPoly] = {}
    for a, coeff_poly in num_parts.items():
        for b in range(min(a, order - 1) + 1):
            piece = coeff_poly * Fraction(comb(a, b))
            if a - b:
                piece = piece * (root_poly ** (a - b))
            num_taylor[b] = num_taylor.get(b, MPoly.const(nvars, 0)) + piece

    for b, coeff_poly in num_taylor.items():
        if coeff_poly.is_zero():
            continue
        rem = order - 1 - b
        for combo in _tuples_with_sum(len(shifted), rem):
            new = Term(coeff_poly * scale, {})
            for (tag, base, lead, pw), n in zip(shifted, combo):
                new.num = new.num * (Fraction(comb(pw - 1 + n, n)) * (-lead) ** n)
                new.add_den(tag, base, pw + n)
            for otag, olin, opw in free:
                new.add_den(otag, olin, opw)
            if not new.num.is_zero():
                out.append(new)
    return out


def _residue_stage(terms: list[Term], idx: int, own_tag: tuple) -> list[Term]:
    """Sum of residues in ``u_idx`` at the origin and at the designated pole."""
    out: list[Term] = []
    for t in terms:
        nvars = t.num.nvars
        pure: list[tuple[tuple, LinForm, int]] = []
        mixed: list[tuple[tuple, LinForm, int]] = []
        free: list[tuple[tuple, LinForm, int]] = []
        for tag, (lin, pw) in t.dens.items():
            if lin.only_var(idx):
                pure.append((tag, lin, pw))
            elif lin.involves(idx):
                mixed.append((tag, lin, pw))
            else:
                free.append((tag, lin, pw))

        own = next(((tag, lin, pw) for tag, lin, pw in mixed if tag == own_tag), None)
        if own_tag in t.dens and own is None and not any(tag == own_tag for tag, _, _ in pure):
            # the designated pole lost its dependence on u_idx: nongeneric point
            raise DegeneratePoint(f"own factor degenerate at stage {idx}")

        # residue at the continued weighted-average pole of the own factor
        if own is not None:
            _, lin, pw = own
            c = lin.coeffs[idx]
            root = lin.drop_var(idx).scale(Fraction(-1) / c)
            # pure factors are analytic away from the origin: treat them as
            # ordinary factors around the own root
            others = [entry for entry in mixed if entry[0] != own_tag] + pure
            out.extend(
                _residue_at_root(t, idx, root, pw, Fraction(1) / c**pw, others, free, nvars)
            )

        # residue at the origin (order = total power of the pure factors)
        p0 = sum(pw for _, _, pw in pure)
        if p0 > 0:
            scale = Fraction(1)
            for _, lin, pw in pure:
                scale /= lin.coeffs[idx] ** pw
            origin = LinForm(0, [Fraction(0)] * nvars)
            out.extend(_residue_at_root(t, idx, origin, p0, scale, mixed, free, nvars))
    return out


def _tuples_with_sum(n: int, total: int) -> Iterable[tuple[int, ...]]:
    """All n-tuples of nonnegative integers with the given sum."""
    if n == 0:
        if total == 0:
            yield ()
        return
    for head in range(total + 1):
        for rest in _tuples_with_sum(n - 1, total - head):
            yield (head,) + rest


def _terms_value(terms: list[Term]) -> Fraction:
    acc = Fraction(0)
    for t in terms:
        v = t.num.constant_value()
        if v == 0:
            continue
        for lin, pw in t.dens.values():
            base = lin.constant_value()
            if base == 0:
                raise DegeneratePoint("residual denominator vanished")
            v /= base**pw
        acc += v
    return acc


# ---------------------------------------------------------------------------
# the two product operations


def _check_product_args(factors, parts, exps):
    l = len(parts)
    if len(factors) != l:
        raise ValueError("one polynomial factor per part is required")
    if len(exps) != l - 1:
        raise ValueError("one junction exponent per interior breakpoint is required")
    for j, (f, p) in enumerate(zip(factors, parts)):
        if not f.is_zero() and f.degree < 0:
            raise ValueError("bad factor")
    if any(e < 0 for e in exps):
        raise ValueError("junction exponents must be nonnegative")


def _circ_value(
    factors: Sequence[BiPoly],
    parts: Sequence[int],
    exps: Sequence[int],
    x0: Fraction,
    y0: Fraction,
    order: str = "desc",
) -> Fraction:
    """Evaluate the residue product at numeric outer arguments."""
    l = len(parts)
    pts = breakpoints(parts)
    if l == 1:
        return factors[0](x0, y0)
    nv = l - 1  # variables u_{i_1}..u_{i_{l-1}} at indices 0..l-2

    def arg(pos: int) -> MPoly:
        if pos == 0:
            return MPoly.const(nv, x0)
        if pos == l:
            return MPoly.const(nv, y0)
        return MPoly.var(nv, pos - 1)

    num = MPoly.const(nv, 1)
    for j in range(1, l + 1):
        f = factors[j - 1]
        if f.is_zero():
            return Fraction(0)
        a0, a1 = arg(j - 1), arg(j)
        acc = MPoly.const(nv, 0)
        for p, c in enumerate(f.coeffs):
            if c != 0:
                acc = acc + (a0**p) * (a1 ** (f.degree - p)) * c
        num = num * acc

    root = Term(num, {})
    for j in range(1, l):
        # own linear factor of u_{i_j}
        cs = [Fraction(0)] * nv
        cs[j - 1] = Fraction(pts[j + 1] - pts[j - 1])
        const = Fraction(0)
        # neighbor at j+1 enters with weight (i_j - i_{j-1}); at j-1 with (i_{j+1} - i_j)
        if j + 1 == l:
            const -= Fraction(pts[j] - pts[j - 1]) * y0
        else:
            cs[j] -= Fraction(pts[j] - pts[j - 1])
        if j - 1 == 0:
            const -= Fraction(pts[j + 1] - pts[j]) * x0
        else:
            cs[j - 2] -= Fraction(pts[j + 1] - pts[j])
        root.add_den(("L", j), LinForm(const, cs), 1)
        if exps[j - 1] - 1 > 0:
            unit = [Fraction(0)] * nv
            unit[j - 1] = Fraction(1)
            root.add_den(("U", j), LinForm(0, unit), exps[j - 1] - 1)

    stage_order = range(l - 1, 0, -1) if order == "desc" else range(1, l)
    terms = [root]
    for j in stage_order:
        terms = _residue_stage(terms, j - 1, ("L", j))

    prefactor = Fraction(pts[l] - pts[0])
    for j in range(1, l - 1):
        prefactor *= pts[j + 1] - pts[j]
    return _terms_value(terms) * prefactor


def _star_value(
    factors: Sequence[BiPoly],
    parts: Sequence[int],
    exps: Sequence[int],
    x0: Fraction,
    y0: Fraction,
) -> Fraction:
    """Evaluate the truncation product at numeric outer arguments."""
    l = len(parts)
    pts = breakpoints(parts)
    if l == 1:
        return factors[0](x0, y0)
    nv = l - 1

    def arg(pos: int) -> MPoly:
        if pos == 0:
            return MPoly.const(nv, x0)
        if pos == l:
            return MPoly.const(nv, y0)
        return MPoly.var(nv, pos - 1)

    num = MPoly.const(nv, 1)
    for j in range(1, l + 1):
        f = factors[j - 1]
        if f.is_zero():
            return Fraction(0)
        a0, a1 = arg(j - 1), arg(j)
        acc = MPoly.const(nv, 0)
        for p, c in enumerate(f.coeffs):
            if c != 0:
                acc = acc + (a0**p) * (a1 ** (f.degree - p)) * c
        num = num * acc

    d_total = pts[l] - pts[0]
    weights = [
        (Fraction(pts[j] - pts[0]) * y0 + Fraction(pts[l] - pts[j]) * x0) / d_total
        for j in range(1, l)
    ]
    acc = Fraction(0)
    for e, c in num.terms.items():
        shifted = [e[j] - (exps[j] - 1) for j in range(nv)]
        if any(s < 0 for s in shifted):
            continue  # negative-degree monomials are dropped by the truncation
        val = c
        for j, s in enumerate(shifted):
            val *= weights[j] ** s
        acc += val
    return acc


_EVAL_POOL = (1, 2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def _interpolate_homogeneous(
    degree: int, eval_fn: Callable[[Fraction, Fraction], Fraction]
) -> BiPoly:
    """Reconstruct a homogeneous BiPoly of known degree from generic samples."""
    if degree < 0:
        for t in _EVAL_POOL[:2]:
            try:
                if eval_fn(Fraction(t), Fraction(1)) != 0:
                    raise ValueError("expected a vanishing result")
            except DegeneratePoint:
                continue
        return BiPoly.zero()
    samples: list[tuple[Fraction, Fraction]] = []
    extra: Fraction | None = None
    extra_t: Fraction | None = None
    for t in _EVAL_POOL:
        try:
            v = eval_fn(Fraction(t), Fraction(1))
        except DegeneratePoint:
            continue
        if len(samples) <= degree:
            samples.append((Fraction(t), v))
        else:
            extra, extra_t = v, Fraction(t)
            break
    if len(samples) < degree + 1 or extra is None:
        raise RuntimeError("could not find enough generic evaluation points")
    poly = interpolate(samples)
    if poly.degree > degree or poly(extra_t) != extra:
        raise RuntimeError("homogeneous degree bound violated during interpolation")
    return BiPoly(degree, tuple(poly[j] for j in range(degree + 1)))


def circ_product(
    factors: Sequence[BiPoly],
    parts: Sequence[int],
    exps: Sequence[int],
    order: str = "desc",
) -> BiPoly:
    """Nested-residue product of homogeneous factors along an ordered partition.

    Factor ``j`` spans the j-th part; junction variable ``u_{i_j}`` carries a
    pole of order ``exps[j-1] - 1`` at the origin on top of its weighted-average
    pole.  The result is homogeneous of degree ``sum deg - sum (exps - 1)``.
    """
    _check_product_args(factors, parts, exps)
    g = sum(f.degree if not f.is_zero() else 0 for f in factors) - sum(e - 1 for e in exps)
    if any(f.is_zero() for f in factors):
        return BiPoly.zero()
    return _interpolate_homogeneous(
        g, lambda x0, y0: _circ_value(factors, parts, exps, x0, y0, order)
    )


def star_product(
    factors: Sequence[BiPoly],
    parts: Sequence[int],
    exps: Sequence[int],
) -> BiPoly:
    """Truncation product: drop negative junction degrees, then substitute.

    Each junction variable is replaced by the convex rational combination of
    the endpoints weighted by the breakpoint position.
    """
    _check_product_args(factors, parts, exps)
    g = sum(f.degree if not f.is_zero() else 0 for f in factors) - sum(e - 1 for e in exps)
    if any(f.is_zero() for f in factors):
        return BiPoly.zero()
    return _interpolate_homogeneous(
        g, lambda x0, y0: _star_value(factors, parts, exps, x0, y0)
    )


def iterated_residue(
    partition: OrderedPartition | Sequence[int], exponents: Sequence[int]
) -> BiPoly:
    """Coefficient polynomial of the z-monomial picked by ``exponents``.

    ``exponents[j]`` is the power of the z-variable at interior breakpoint
    ``i_j``; the result is the nested residue of the segment polynomials of
    the parts, homogeneous of degree ``d - 1 - sum(exponents)``.
    """
    parts = partition.parts if isinstance(partition, OrderedPartition) else tuple(partition)
    d = sum(parts)
    if len(exponents) != len(parts) - 1:
        raise ValueError("need one exponent per interior breakpoint")
    if any(e < 1 for e in exponents):
        raise ValueError("interior exponents must be at least 1")
    if sum(exponents) > d - 1:
        raise ValueError("exponents exceed the degree budget")
    return circ_product([segment_poly(p) for p in parts], parts, list(exponents))


# ---------------------------------------------------------------------------
# the assembled residue polynomial


@dataclass(frozen=True)
class ResiduePolynomial:
    """Degree-d residue polynomial in ``x, y, z_1..z_{d-1}``.

    Monomials are keyed by ``(x_exp, y_exp, z_exps)`` with ``z_exps`` a full
    (d-1)-tuple; the polynomial is homogeneous of total degree ``d - 1``.
    """

    d: int
    monomials: dict[tuple[int, int, tuple[int, ...]], Fraction]

    def coefficient(self, x_exp: int, y_exp: int, z_exps: Sequence[int]) -> Fraction:
        return self.monomials.get((x_exp, y_exp, tuple(z_exps)), Fraction(0))

    def is_symmetric(self) -> bool:
        """Invariance under ``x <-> y`` with the z-variables reversed."""
        for (a, b, z), c in self.monomials.items():
            if self.monomials.get((b, a, tuple(reversed(z)))) != c:
                return False
        return True


@lru_cache(maxsize=None)
def residue_polynomial(d: int) -> ResiduePolynomial:
    """Assemble the degree-d residue polynomial from its coefficient extractions."""
    if d < 1:
        raise ValueError("d must be positive")
    mono: dict[tuple[int, int, tuple[int, ...]], Fraction] = {}
    for interior in _subsets(range(1, d)):
        pts = (0,) + interior + (d,)
        parts = tuple(b - a for a, b in zip(pts, pts[1:]))
        l = len(parts)
        budget = d - 1
        for exps in _exponent_vectors(l - 1, budget):
            coeff_poly = iterated_residue(parts, exps)
            if coeff_poly.is_zero():
                continue
            z_full = [0] * (d - 1)
            for pos, e in zip(interior, exps):
                z_full[pos - 1] = e
            g = coeff_poly.degree
            for j, c in enumerate(coeff_poly.coeffs):
                if c == 0:
                    continue
                key = (j, g - j, tuple(z_full))
                mono[key] = mono.get(key, Fraction(0)) + c
    return ResiduePolynomial(d, {k: v for k, v in mono.items() if v != 0})


def _subsets(rng) -> list[tuple[int, ...]]:
    items = list(rng)
    out = []
    for r in range(len(items) + 1):
        out.extend(itertools.combinations(items, r))
    return out


def _exponent_vectors(n: int, budget: int) -> list[tuple[int, ...]]:
    """Vectors of ``n`` exponents, each >= 1, with total <= budget."""
    if n == 0:
        return [()]
    out = []
    for head in range(1, budget - n + 2):
        for rest in _exponent_vectors(n - 1, budget - head):
            out.append((head,) + rest)
    return out


# ---------------------------------------------------------------------------
# combinatorial identity helpers (used by the verification suite)


def weight_sum_identity(d: int, parts: Sequence[int]) -> tuple[WPoly, WPoly]:
    """Both sides of the segment-coefficient weight identity for one partition.

    The left side sums, over all choices of one coefficient per part, the
    product of segment coefficients times the book-keeping weights; the right
    side is ``prod_{j=1}^{d-1} (1 + j w)``.
    """
    pts = breakpoints(parts)
    if pts[-1] != d:
        raise ValueError("parts must sum to d")
    l = len(parts)
    blocks = [segment_poly(p) for p in parts]
    lhs = WPoly.zero()
    ranges = [range(p) for p in parts]
    for cs in itertools.product(*ranges):
        coeff = Fraction(1)
        for block, c in zip(blocks, cs):
            coeff *= block.coeffs[c] if c <= block.degree else Fraction(0)
        if coeff == 0:
            continue
        term = WPoly.one()
        for j in range(1, l + 1):
            c_prev = cs[j - 2] if j >= 2 else 0
            i_prev = pts[j - 1]
            i_prev2 = pts[j - 2] if j >= 2 else 0
            exponent = cs[j - 1] - c_prev + i_prev - i_prev2
            term = term * WPoly((1, d - pts[j - 1])) ** exponent
        lhs = lhs + term * coeff
    rhs = WPoly.one()
    for j in range(1, d):
        rhs = rhs * WPoly((1, j))
    return lhs, rhs


def parenthesizations(l: int) -> list[tuple]:
    """Ordered trees on ``l`` leaves with every internal node of arity >= 2.

    Each tree is encoded as a nested tuple of leaf indices; the root is the
    bare product, inner nodes are inserted parentheses.
    """

    def structures(span: tuple[int, ...], is_root: bool) -> list[tuple]:
        if len(span) == 1:
            return [(span[0],)]
        out: list[tuple] = []
        for comp in _compositions_of_list(span):
            if len(comp) == 1 and not is_root:
                continue  # duplicated parentheses around the same span
            if len(comp) == 1 and is_root:
                continue  # the outermost full-span parenthesis is not counted
            children_options = []
            for block in comp:
                if len(block) == 1:
                    children_options.append([block[0]])
                else:
                    children_options.append(structures(block, False))
            for choice in itertools.product(*children_options):
                out.append(tuple(choice))
        return out

    return structures(tuple(range(l)), True)


def _compositions_of_list(items: tuple[int, ...]) -> list[tuple[tuple[int, ...], ...]]:
    n = len(items)
    out = []
    for cut_mask in range(1 << (n - 1)):
        blocks = []
        start = 0
        for i in range(n - 1):
            if cut_mask & (1 << i):
                blocks.append(items[start : i + 1])
                start = i + 1
        blocks.append(items[start:])
        out.append(tuple(blocks))
    return out


def tree_internal_nodes(tree) -> int:
    """Number of inner parentheses in an encoded product tree (root excluded)."""
    count = 0
    for child in tree:
        if isinstance(child, tuple):
            count += 1 + tree_internal_nodes(child)
    return count


def evaluate_tree_star(
    tree, factors: Sequence[BiPoly], parts: Sequence[int], exps: Sequence[int]
) -> BiPoly:
    """Evaluate a parenthesized truncation product encoded as a nested tuple."""

    def span(node) -> tuple[int, int]:
        leaves = []

        def collect(n):
            if isinstance(n, tuple):
                for c in n:
                    collect(c)
            else:
                leaves.append(n)

        collect(node)
        return min(leaves), max(leaves)

    pts = breakpoints(parts)

    def rec(node) -> tuple[BiPoly, int, int]:
        if not isinstance(node, tuple):
            return factors[node], node, node
        blocks = [rec(c) for c in node]
        polys = [b[0] for b in blocks]
        lo = blocks[0][1]
        hi = blocks[-1][2]
        block_parts = [pts[b[2] + 1] - pts[b[1]] for b in blocks]
        block_exps = [exps[b[2]] for b in blocks[:-1]]
        return star_product(polys, block_parts, block_exps), lo, hi

    top = rec(tree)
    return top[0]


def circ_via_grouping(
    factors: Sequence[BiPoly],
    parts: Sequence[int],
    exps: Sequence[int],
) -> BiPoly:
    """Expand the residue product through truncation products of groups.

    Recursive expansion: over every breakpoint subset the groups are combined
    with a shorter residue product of truncation-product blocks, with sign
    ``(-1)**(l - 1 - s)``; the two-factor residue product is a truncation
    product outright.
    """
    l = len(parts)
    if l == 1:
        return factors[0]
    if l == 2:
        return star_product(factors, parts, exps)
    pts = breakpoints(parts)
    total = BiPoly.zero()
    for s in range(1, l):
        sign = (-1) ** (l - 1 - s)
        for cuts in itertools.combinations(range(1, l), s - 1):
            hs = (0,) + cuts + (l,)
            group_polys = []
            group_parts = []
            for a, b in zip(hs, hs[1:]):
                sub_factors = factors[a:b]
                sub_parts = parts[a:b]
                sub_exps = exps[a : b - 1]
                group_polys.append(star_product(sub_factors, sub_parts, sub_exps))
                group_parts.append(pts[b] - pts[a])
            group_exps = [exps[h - 1] for h in hs[1:-1]]
            term = circ_product(group_polys, group_parts, group_exps)
            total = _bi_add(total, term * sign)
    return total


def circ_via_parenthesizations(
    factors: Sequence[BiPoly],
    parts: Sequence[int],
    exps: Sequence[int],
) -> BiPoly:
    """Closed inclusion-exclusion form: signed sum over parenthesized products."""
    l = len(parts)
    if l == 1:
        return factors[0]
    total = BiPoly.zero()
    for tree in parenthesizations(l):
        sign = (-1) ** (l - tree_internal_nodes(tree))
        total = _bi_add(total, evaluate_tree_star(tree, factors, parts, exps) * sign)
    return total


def negative_part_integral(
    factors: Sequence[BiPoly],
    parts: Sequence[int],
    exps: Sequence[int],
    x0: Fraction | int,
    y0: Fraction | int,
) -> Fraction:
    """Residue integral restricted to the all-negative-degree part of the integrand.

    Every monomial whose degree in each junction variable is at most -1 is kept;
    the nested residue of that part must vanish identically.
    """
    l = len(parts)
    if l == 1:
        return Fraction(0)
    pts = breakpoints(parts)
    nv = l - 1
    x0, y0 = Fraction(x0), Fraction(y0)

    def arg(pos: int) -> MPoly:
        if pos == 0:
            return MPoly.const(nv, x0)
        if pos == l:
            return MPoly.const(nv, y0)
        return MPoly.var(nv, pos - 1)

    num = MPoly.const(nv, 1)
    for j in range(1, l + 1):
        f = factors[j - 1]
        a0, a1 = arg(j - 1), arg(j)
        acc = MPoly.const(nv, 0)
        for p, c in enumerate(f.coeffs):
            if c != 0:
                acc = acc + (a0**p) * (a1 ** (f.degree - p)) * c
        num = num * acc

    total = Fraction(0)
    for e, c in num.terms.items():
        degs = [e[j] - (exps[j] - 1) for j in range(nv)]
        if any(g >= 0 for g in degs):
            continue
        root = Term(MPoly.const(nv, c), {})
        for j in range(nv):
            if degs[j] < 0:
                unit = [Fraction(0)] * nv
                unit[j] = Fraction(1)
                root.add_den(("U", j + 1), LinForm(0, unit), -degs[j])
            else:
                mon = MPoly.var(nv, j) ** degs[j]
                root.num = root.num * mon
        for j in range(1, l):
            cs = [Fraction(0)] * nv
            cs[j - 1] = Fraction(pts[j + 1] - pts[j - 1])
            const = Fraction(0)
            if j + 1 == l:
                const -= Fraction(pts[j] - pts[j - 1]) * y0
            else:
                cs[j] -= Fraction(pts[j] - pts[j - 1])
            if j - 1 == 0:
                const -= Fraction(pts[j + 1] - pts[j]) * x0
            else:
                cs[j - 2] -= Fraction(pts[j + 1] - pts[j])
            root.add_den(("L", j), LinForm(const, cs), 1)
        terms = [root]
        for j in range(l - 1, 0, -1):
            terms = _residue_stage(terms, j - 1, ("L", j))
        prefactor = Fraction(pts[l] - pts[0])
        for j in range(1, l - 1):
            prefactor *= pts[j + 1] - pts[j]
        total += _terms_value(terms) * prefactor
    return total


def _bi_add(a: BiPoly, b: BiPoly) -> BiPoly:
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    return a + b
