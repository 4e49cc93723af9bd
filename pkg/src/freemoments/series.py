"""Truncated formal power series over exact rationals, plus the series form
of the moment -> R-transform chain.

A series holds coefficients a_0..a_N of an order-N truncation.  Binary
operations truncate to the smaller order.  The chain implemented at series
level is: moments give the expansion of G(1/z) = z + m_1 z^2 + ... ; its
compositional inverse L satisfies 1/L = 1/z + (R-transform), so the
R-transform coefficients drop out of the reciprocal of L/z.  Everything is
exact, which makes this an independent route to the non-crossing cumulant
sums of the cumulants module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .cumulants import CumulantSequence, MomentSequence, as_fraction, FREE
from .errors import (
    CompositionDomainError,
    KindMismatchError,
    NonInvertibleSeriesError,
    PoleError,
    ValidationError,
)


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients a_0..a_N of a power series truncated at order N."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise ValidationError("series needs at least the constant term")
        object.__setattr__(
            self, "coeffs", tuple(as_fraction(c) for c in self.coeffs)
        )

    @classmethod
    def from_coeffs(cls, coeffs: Iterable) -> "TruncatedSeries":
        return cls(tuple(coeffs))

    @classmethod
    def zero(cls, order: int) -> "TruncatedSeries":
        return cls(tuple(Fraction(0) for _ in range(order + 1)))

    @classmethod
    def identity(cls, order: int) -> "TruncatedSeries":
        """The series z, truncated at the given order (>= 1)."""
        if order < 1:
            raise ValidationError("identity needs order >= 1")
        coeffs = [Fraction(0)] * (order + 1)
        coeffs[1] = Fraction(1)
        return cls(tuple(coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]

    def truncate(self, order: int) -> "TruncatedSeries":
        if order < 0:
            raise ValidationError("order must be >= 0")
        if order >= self.order:
            return self
        return TruncatedSeries(self.coeffs[: order + 1])

    # ----------------------------------------------------------- arithmetic

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        return TruncatedSeries(
            tuple(self.coeffs[i] + other.coeffs[i] for i in range(n + 1))
        )

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + other.scale(Fraction(-1))

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if a == 0:
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if b != 0:
                    out[i + j] += a * b
        return TruncatedSeries(tuple(out))

    def scale(self, scalar) -> "TruncatedSeries":
        s = as_fraction(scalar)
        return TruncatedSeries(tuple(c * s for c in self.coeffs))

    def reciprocal(self) -> "TruncatedSeries":
        """Multiplicative inverse; requires a nonzero constant term."""
        if self.coeffs[0] == 0:
            raise PoleError("reciprocal of a series vanishing at 0")
        n = self.order
        inv0 = 1 / self.coeffs[0]
        out = [inv0] + [Fraction(0)] * n
        for k in range(1, n + 1):
            acc = Fraction(0)
            for j in range(1, k + 1):
                if j <= n and self.coeffs[j] != 0:
                    acc += self.coeffs[j] * out[k - j]
            out[k] = -inv0 * acc
        return TruncatedSeries(tuple(out))

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """self(inner(z)); the inner series must vanish at 0."""
        if inner.coeffs[0] != 0:
            raise CompositionDomainError(
                "composition needs an inner series with zero constant term"
            )
        n = min(self.order, inner.order)
        inner_t = inner.truncate(n)
        result = TruncatedSeries.zero(n)
        for a in reversed(self.coeffs[: n + 1]):
            result = result * inner_t
            result = TruncatedSeries(
                (result.coeffs[0] + a,) + result.coeffs[1:]
            )
        return result

    def comp_inverse(self) -> "TruncatedSeries":
        """Compositional inverse g with self(g(z)) = z + O(z^{N+1}).

        Requires a simple zero at the origin (a_0 = 0, a_1 != 0).  Solved
        order by order: the z^k coefficient of self(g) is linear in g_k with
        slope a_1 once g_1..g_{k-1} are fixed.
        """
        if self.coeffs[0] != 0 or self.order < 1 or self.coeffs[1] == 0:
            raise NonInvertibleSeriesError(
                "compositional inverse needs a_0 = 0 and a_1 != 0"
            )
        n = self.order
        g = [Fraction(0)] * (n + 1)
        g[1] = 1 / self.coeffs[1]
        for k in range(2, n + 1):
            partial = TruncatedSeries(tuple(g[: k + 1]))
            h = self.truncate(k).compose(partial)
            g[k] = -h.coeffs[k] / self.coeffs[1]
        return TruncatedSeries(tuple(g))

    # ------------------------------------------------------------- calculus

    def differentiate(self) -> "TruncatedSeries":
        if self.order == 0:
            return TruncatedSeries((Fraction(0),))
        return TruncatedSeries(
            tuple(i * c for i, c in enumerate(self.coeffs) if i >= 1)
        )

    def integrate(self) -> "TruncatedSeries":
        """Antiderivative with zero constant term."""
        return TruncatedSeries(
            (Fraction(0),)
            + tuple(c / (i + 1) for i, c in enumerate(self.coeffs))
        )

    def exp(self) -> "TruncatedSeries":
        """exp of a series vanishing at 0, via e' = s' e."""
        if self.coeffs[0] != 0:
            raise CompositionDomainError("exp needs a zero constant term")
        n = self.order
        out = [Fraction(1)] + [Fraction(0)] * n
        for k in range(1, n + 1):
            acc = Fraction(0)
            for j in range(1, k + 1):
                acc += j * self.coeffs[j] * out[k - j]
            out[k] = acc / k
        return TruncatedSeries(tuple(out))

    def log(self) -> "TruncatedSeries":
        """log of a series with constant term 1, via (log s)' = s'/s."""
        if self.coeffs[0] != 1:
            raise CompositionDomainError("log needs constant term 1")
        derivative = self.differentiate() * self.reciprocal().truncate(
            max(self.order - 1, 0)
        )
        return derivative.integrate().truncate(self.order)


# ----------------------------------------------------------- JSON interface


def series_to_json(series: TruncatedSeries) -> list[str]:
    return [str(c) for c in series.coeffs]


def series_from_json(data: Iterable) -> TruncatedSeries:
    coeffs = []
    for item in data:
        if isinstance(item, float):
            raise ValidationError(
                "series coefficients must be exact: use 'p/q' strings"
            )
        if isinstance(item, str):
            try:
                coeffs.append(Fraction(item))
            except (ValueError, ZeroDivisionError) as exc:
                raise ValidationError(f"bad rational literal {item!r}") from exc
        else:
            coeffs.append(as_fraction(item))
    return TruncatedSeries(tuple(coeffs))


# ------------------------------------------------- moment / R-transform chain


def g_series_from_moments(moments: MomentSequence) -> TruncatedSeries:
    """Expansion of G(1/z) near 0: z + m_1 z^2 + ... + m_p z^{p+1}."""
    return TruncatedSeries(
        (Fraction(0), Fraction(1)) + moments.values
    )


def r_series_from_moments(moments: MomentSequence) -> TruncatedSeries:
    """R-transform coefficients k_1..k_p as a series of order p-1.

    Chain: L = compositional inverse of the G expansion; 1/L = 1/z + R, so
    R = (reciprocal(L/z) - 1)/z coefficientwise.
    """
    if moments.p < 1:
        raise ValidationError("need at least the first moment")
    g = g_series_from_moments(moments)
    ell = g.comp_inverse()
    ell_over_z = TruncatedSeries(ell.coeffs[1:])
    zk = ell_over_z.reciprocal()
    return TruncatedSeries(zk.coeffs[1:])


def moments_from_r_series(r: TruncatedSeries) -> MomentSequence:
    """Inverse of r_series_from_moments; input order p-1 yields p moments."""
    p = r.order + 1
    zk = TruncatedSeries((Fraction(1),) + r.coeffs)
    ell_over_z = zk.reciprocal()
    ell = TruncatedSeries((Fraction(0),) + ell_over_z.coeffs)
    g = ell.comp_inverse()
    if g.coeffs[1] != 1:
        raise ValidationError("R series does not invert to a moment expansion")
    return MomentSequence(tuple(g.coeffs[2:]))


def cumulant_series(cumulants: CumulantSequence) -> TruncatedSeries:
    """View free cumulants k_1..k_p as the R-series of order p-1."""
    if cumulants.kind != FREE:
        raise KindMismatchError("cumulant_series expects free cumulants")
    if cumulants.p < 1:
        raise ValidationError("need at least one cumulant")
    return TruncatedSeries(cumulants.values)


# ------------------------------------------------------------- support bound


def _int_nth_root_floor(x: int, n: int) -> int:
    """Largest r with r^n <= x, for x >= 0."""
    if x < 0:
        raise ValidationError("negative radicand")
    if x in (0, 1) or n == 1:
        return x
    r = int(round(x ** (1.0 / n)))
    while r > 0 and r**n > x:
        r -= 1
    while (r + 1) ** n <= x:
        r += 1
    return r


def _nth_root_upper(value: Fraction, n: int, digits: int = 18) -> Fraction:
    """Exact n-th root when value is a perfect n-th power of a rational,
    otherwise a certified rational upper bound within 10^-digits relative."""
    num, den = value.numerator, value.denominator
    rn = _int_nth_root_floor(num, n)
    rd = _int_nth_root_floor(den, n)
    if rn**n == num and rd**n == den:
        return Fraction(rn, rd)
    scale = 10**digits
    # ceil of (num * scale^n / den)^(1/n) ... / scale  bounds value^(1/n) above
    target = -(-num * scale**n // den)  # ceil division
    root = _int_nth_root_floor(target, n)
    if root**n < target:
        root += 1
    return Fraction(root, scale)


def support_bound_from_cumulants(cumulants: CumulantSequence) -> Fraction:
    """16 * max_n |k_n|^(1/n): every compactly supported measure whose free
    cumulants start with these values has support inside [-bound, bound].

    The argmax is found with exact cross-power comparisons |k_i|^j vs
    |k_j|^i; the root is exact when rational, otherwise a certified rational
    upper bound.  Deliberately conservative: for the standard semicircle the
    bound is 16 while the support is [-2, 2].
    """
    if cumulants.kind != FREE:
        raise KindMismatchError("support bound needs free cumulants")
    best_idx = None
    best_val = None
    for idx, k in enumerate(cumulants.values, start=1):
        v = abs(k)
        if v == 0:
            continue
        if best_idx is None or v**best_idx > best_val**idx:
            best_idx, best_val = idx, v
    if best_idx is None:
        return Fraction(0)
    return 16 * _nth_root_upper(best_val, best_idx)
