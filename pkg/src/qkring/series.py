"""Truncated formal power series with exact rational coefficients.

Two layers are provided.

``QSeries`` is a series in the degree-counting variable ``q = exp(x)``
truncated at a fixed order ``D``; all operations are exact (truncated
convolution for products, recursive inversion for quotients).  Combining
two series of different orders truncates to the smaller one, and no
operation ever extends the order silently.

``LogSeries`` adjoins polynomial prefactors in ``x`` itself: it models
``sum_i x**i * p_i(q)``.  The derivative in ``x`` acts exactly, through
``(i+1)*p_{i+1}`` on the polynomial part and ``q d/dq`` on each series
entry, and multiplication by ``exp(x)`` is a shift of the ``q``-grading.
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


class QSeries:
    """Series ``c0 + c1*q + ... + cD*q**D`` truncated at order ``D``."""

    __slots__ = ("order", "c")

    def __init__(self, coeffs: Iterable[Fraction | int], order: int | None = None):
        cs = [_frac(v) for v in coeffs]
        if order is None:
            if not cs:
                raise ValueError("order required for an empty coefficient list")
            order = len(cs) - 1
        if order < 0:
            raise ValueError("truncation order must be nonnegative")
        cs = cs[: order + 1]
        cs.extend([Fraction(0)] * (order + 1 - len(cs)))
        self.order = order
        self.c = tuple(cs)

    @classmethod
    def zero(cls, order: int) -> "QSeries":
        return cls((), order)

    @classmethod
    def one(cls, order: int) -> "QSeries":
        return cls((1,), order)

    @classmethod
    def from_map(cls, order: int, f) -> "QSeries":
        return cls([f(d) for d in range(order + 1)], order)

    def __getitem__(self, d: int) -> Fraction:
        if 0 <= d <= self.order:
            return self.c[d]
        return Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, QSeries):
            return self.order == other.order and self.c == other.c
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.order, self.c))

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.c)

    def prefix(self, order: int) -> "QSeries":
        """Re-truncate to a lower (or equal) order."""
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return QSeries(self.c[: order + 1], order)

    def _meet(self, other: "QSeries") -> int:
        return min(self.order, other.order)

    def __add__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            other = QSeries((other,), self.order)
        D = self._meet(other)
        return QSeries([self[d] + other[d] for d in range(D + 1)], D)

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries([-v for v in self.c], self.order)

    def __sub__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            other = QSeries((other,), self.order)
        return self + (-other)

    def __rsub__(self, other) -> "QSeries":
        return (-self) + other

    def __mul__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            f = _frac(other)
            return QSeries([v * f for v in self.c], self.order)
        D = self._meet(other)
        out = [Fraction(0)] * (D + 1)
        for i in range(D + 1):
            a = self[i]
            if a == 0:
                continue
            for j in range(D + 1 - i):
                b = other[j]
                if b != 0:
                    out[i + j] += a * b
        return QSeries(out, D)

    __rmul__ = __mul__

    def inverse(self) -> "QSeries":
        if self[0] == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        D = self.order
        inv = [Fraction(0)] * (D + 1)
        inv[0] = 1 / self[0]
        for d in range(1, D + 1):
            acc = Fraction(0)
            for j in range(1, d + 1):
                acc += self[j] * inv[d - j]
            inv[d] = -acc / self[0]
        return QSeries(inv, D)

    def __truediv__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            f = _frac(other)
            if f == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / f)
        D = self._meet(other)
        return self.prefix(D) * other.prefix(D).inverse()

    def __pow__(self, n: int) -> "QSeries":
        if n < 0:
            return self.inverse() ** (-n)
        result = QSeries.one(self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def exp(self) -> "QSeries":
        if self[0] != 0:
            raise ValueError("exp needs a series with constant term 0")
        D = self.order
        term = QSeries.one(D)
        acc = QSeries.one(D)
        for n in range(1, D + 1):
            term = term * self * Fraction(1, n)
            acc = acc + term
        return acc

    def log(self) -> "QSeries":
        if self[0] != 1:
            raise ValueError("log needs a series with constant term 1")
        D = self.order
        g = self - 1
        term = QSeries.one(D)
        acc = QSeries.zero(D)
        for n in range(1, D + 1):
            term = term * g
            acc = acc + term * Fraction((-1) ** (n + 1), n)
        return acc

    def theta(self) -> "QSeries":
        """Apply ``q d/dq`` (the derivative in ``x`` for a pure q-series)."""
        return QSeries([d * v for d, v in enumerate(self.c)], self.order)

    def theta_inv(self) -> "QSeries":
        """Inverse of ``q d/dq`` with zero constant of integration."""
        if self[0] != 0:
            raise ValueError("theta_inv needs a series with constant term 0")
        return QSeries(
            [Fraction(0)] + [self[d] / d for d in range(1, self.order + 1)],
            self.order,
        )

    def shift(self, m: int = 1) -> "QSeries":
        """Multiply by ``q**m`` within the same truncation order."""
        if m < 0:
            raise ValueError("negative shift")
        return QSeries([Fraction(0)] * m + list(self.c), self.order)

    def __repr__(self) -> str:
        terms = [f"{v}*q^{d}" for d, v in enumerate(self.c) if v != 0]
        return "QSeries(" + (" + ".join(terms) if terms else "0") + f"; D={self.order})"


def series_arith(a: QSeries, b: QSeries | None, op: str) -> QSeries:
    """Dispatch-style entry point over the basic series operations.

    ``op`` is one of ``add``, ``mul``, ``div``, ``exp``, ``log``, ``pow``;
    the unary operations ignore ``b`` except ``pow``, which expects the
    integer exponent in ``b``.
    """
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "exp":
        return a.exp()
    if op == "log":
        return a.log()
    if op == "pow":
        if not isinstance(b, int):
            raise TypeError("pow expects an integer exponent")
        return a**b
    raise ValueError(f"unknown series operation {op!r}")


class LogSeries:
    """Finite sum ``sum_i x**i * p_i(q)`` with ``QSeries`` entries ``p_i``."""

    __slots__ = ("order", "entries")

    def __init__(self, entries: Sequence[QSeries], order: int | None = None):
        if order is None:
            if not entries:
                raise ValueError("order required for an empty entry list")
            order = min(e.order for e in entries)
        es = [e.prefix(order) for e in entries]
        while es and es[-1].is_zero():
            es.pop()
        self.order = order
        self.entries = tuple(es)

    @classmethod
    def zero(cls, order: int) -> "LogSeries":
        return cls((), order)

    @classmethod
    def from_qseries(cls, s: QSeries) -> "LogSeries":
        return cls((s,), s.order)

    @classmethod
    def x_monomial(cls, i: int, order: int, coeff: Fraction | int = 1) -> "LogSeries":
        """The series ``coeff * x**i`` (constant in q)."""
        pad = [QSeries.zero(order)] * i
        return cls(pad + [QSeries((coeff,), order)], order)

    @property
    def log_degree(self) -> int:
        return len(self.entries) - 1

    def entry(self, i: int) -> QSeries:
        if 0 <= i < len(self.entries):
            return self.entries[i]
        return QSeries.zero(self.order)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other) -> bool:
        if isinstance(other, LogSeries):
            return self.order == other.order and self.entries == other.entries
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.order, self.entries))

    def _meet(self, other: "LogSeries") -> int:
        return min(self.order, other.order)

    def __add__(self, other) -> "LogSeries":
        D = self._meet(other)
        n = max(len(self.entries), len(other.entries))
        return LogSeries([self.entry(i).prefix(D) + other.entry(i).prefix(D) for i in range(n)], D)

    def __neg__(self) -> "LogSeries":
        return LogSeries([-e for e in self.entries], self.order)

    def __sub__(self, other) -> "LogSeries":
        return self + (-other)

    def __mul__(self, other) -> "LogSeries":
        if isinstance(other, (int, Fraction)):
            return LogSeries([e * other for e in self.entries], self.order)
        if isinstance(other, QSeries):
            D = min(self.order, other.order)
            return LogSeries([e.prefix(D) * other.prefix(D) for e in self.entries], D)
        D = self._meet(other)
        if self.is_zero() or other.is_zero():
            return LogSeries.zero(D)
        n = len(self.entries) + len(other.entries) - 1
        out = [QSeries.zero(D) for _ in range(n)]
        for i, a in enumerate(self.entries):
            for j, b in enumerate(other.entries):
                out[i + j] = out[i + j] + a.prefix(D) * b.prefix(D)
        return LogSeries(out, D)

    __rmul__ = __mul__

    def __truediv__(self, other: QSeries) -> "LogSeries":
        if not isinstance(other, QSeries):
            raise TypeError("LogSeries can only be divided by a QSeries")
        D = min(self.order, other.order)
        inv = other.prefix(D).inverse()
        return LogSeries([e.prefix(D) * inv for e in self.entries], D)

    def dx(self) -> "LogSeries":
        """Exact derivative in ``x``, acting on both the ``x`` and ``q`` parts."""
        n = len(self.entries)
        out = []
        for i in range(n):
            term = self.entry(i).theta()
            if i + 1 < n:
                term = term + self.entry(i + 1) * (i + 1)
            out.append(term)
        return LogSeries(out, self.order)

    def shift_q(self, m: int = 1) -> "LogSeries":
        """Multiply by ``exp(m*x)``: a shift of the q-grading on every entry."""
        return LogSeries([e.shift(m) for e in self.entries], self.order)

    def qpart(self) -> QSeries:
        """The pure q-series part; raises if a genuine x-prefactor remains."""
        if self.log_degree > 0:
            raise ValueError("series still carries x-prefactors")
        return self.entry(0)

    def __repr__(self) -> str:
        if self.is_zero():
            return f"LogSeries(0; D={self.order})"
        parts = [f"x^{i}*({e!r})" for i, e in enumerate(self.entries)]
        return "LogSeries(" + " + ".join(parts) + ")"


def substitute_exp_shift(series: QSeries, g: QSeries) -> QSeries:
    """Substitute ``x = t + g`` into ``sum c_d exp(d x)``.

    With ``s = exp(t)`` the degree-d term becomes ``c_d s**d exp(d g(s))``;
    ``g`` must have zero constant term so the substitution preserves the
    grading by ``s``.
    """
    if g[0] != 0:
        raise ValueError("shift series must have zero constant term")
    D = min(series.order, g.order)
    out = QSeries((series[0],), D)
    for d in range(1, D + 1):
        if series[d] == 0:
            continue
        out = out + (g.prefix(D) * d).exp().shift(d) * series[d]
    return out


def invert_exp_map(corr: QSeries) -> QSeries:
    """Invert ``t = x + sum_{d>=1} c_d exp(d x)`` for the inverse correction.

    Returns ``g`` with ``x(t) = t + sum_{d>=1} g_d exp(d t)``; the defining
    fixed-point equation is ``g + sum c_d s**d exp(d g) = 0``, solved by
    iteration in the grading (one more order becomes exact per pass).
    """
    if corr[0] != 0:
        raise ValueError("mirror-map correction must have zero constant term")
    D = corr.order
    g = QSeries.zero(D)
    for _ in range(D):
        g = -substitute_exp_shift(corr, g)
    return g


def exp_reversion(t_series: LogSeries) -> LogSeries:
    """Invert a map of the shape ``t(x) = x + sum_{d>=1} c_d exp(d x)``.

    The input must be a ``LogSeries`` whose x-linear part is exactly ``x``
    and whose x-free part is a q-series vanishing at ``q = 0``; the output
    has the same shape in the flat variable ``t``.
    """
    if t_series.log_degree != 1 or t_series.entry(1) != QSeries.one(t_series.order):
        raise ValueError("input must have the shape x + (q-series)")
    corr = t_series.entry(0)
    if corr[0] != 0:
        raise ValueError("input must have the shape x + (q-series vanishing at q=0)")
    g = invert_exp_map(corr)
    return LogSeries([g, QSeries.one(t_series.order)], t_series.order)
