"""Measures on the real line: finite discrete measures with rational data and
a small family of named densities (semicircle, Marchenko-Pastur, Cauchy,
uniform).

Moments are exact rationals computed from closed recurrences.  The Cauchy
transform G(z) = integral of 1/(z - x) is evaluated in arbitrary precision
(mpmath): closed forms where stable ones exist, otherwise adaptive
Gauss-Legendre quadrature after a trigonometric substitution that absorbs the
square-root endpoint behaviour of the density.  The substitution keeps the
integrand analytic, so the quadrature converges to working precision and its
error estimate is checked; failure to certify raises rather than returning a
doubtful value.

Conventions: weights of discrete atoms are positive rationals; "moments" are
raw integrals of x^k (no normalization), which is what the Levy layer needs
for masses other than 1.  G is defined on the upper half-plane and, for
compactly supported measures, also outside the closed disk containing the
support, where it is continued by reflection G(conj z) = conj G(z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import mpmath as mp

from .cumulants import MomentSequence, as_fraction
from .errors import (
    DomainError,
    MomentDoesNotExistError,
    NumericError,
    UnsupportedOperationError,
    ValidationError,
)
from .noncrossing import catalan

DISCRETE = "discrete"
DENSITY = "density"

SEMICIRCLE = "semicircle"
MARCHENKO_PASTUR = "marchenko_pastur"
CAUCHY = "cauchy"
UNIFORM = "uniform"

_DENSITY_PARAMS = {
    SEMICIRCLE: ("center", "radius"),
    MARCHENKO_PASTUR: ("rate",),
    CAUCHY: ("center", "scale"),
    UNIFORM: ("a", "b"),
}

_QUAD_GUARD_DIGITS = 15


def _parse_exact(value) -> Fraction:
    """ints, Fractions and 'p/q' / decimal strings are exact; floats are
    rejected so binary rounding never sneaks into rational data."""
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"bad rational literal {value!r}") from exc
    if isinstance(value, float):
        raise ValidationError(
            f"float {value!r} rejected: pass an exact 'p/q' or decimal string"
        )
    return as_fraction(value)


@dataclass(frozen=True)
class Measure:
    """A finite positive measure: discrete atoms or a named density shape
    scaled to total mass ``mass``."""

    kind: str
    atoms: tuple[tuple[Fraction, Fraction], ...] = ()
    density: str | None = None
    params: tuple[tuple[str, Fraction], ...] = ()
    mass: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        if self.kind == DISCRETE:
            atoms = tuple(
                (_parse_exact(t), _parse_exact(w)) for t, w in self.atoms
            )
            atoms = tuple(sorted(atoms, key=lambda a: a[0]))
            locations = [t for t, _ in atoms]
            if len(set(locations)) != len(locations):
                raise ValidationError("duplicate atom locations")
            if any(w <= 0 for _, w in atoms):
                raise ValidationError("atom weights must be positive")
            object.__setattr__(self, "atoms", atoms)
            object.__setattr__(self, "mass", sum((w for _, w in atoms), Fraction(0)))
            if self.density is not None or self.params:
                raise ValidationError("discrete measure with density fields")
        elif self.kind == DENSITY:
            if self.density not in _DENSITY_PARAMS:
                raise ValidationError(f"unknown density {self.density!r}")
            wanted = _DENSITY_PARAMS[self.density]
            given = dict(self.params)
            if set(given) != set(wanted):
                raise ValidationError(
                    f"{self.density} needs params {wanted}, got {tuple(given)}"
                )
            params = tuple((name, _parse_exact(given[name])) for name in wanted)
            object.__setattr__(self, "params", params)
            object.__setattr__(self, "mass", _parse_exact(self.mass))
            if self.mass < 0:
                raise ValidationError("mass must be nonnegative")
            if self.atoms:
                raise ValidationError("density measure with atoms")
            self._validate_density()
        else:
            raise ValidationError(f"unknown measure kind {self.kind!r}")

    def _validate_density(self) -> None:
        p = self.param
        if self.density == SEMICIRCLE and p("radius") <= 0:
            raise ValidationError("semicircle radius must be positive")
        if self.density == MARCHENKO_PASTUR and p("rate") < 1:
            raise ValidationError(
                "marchenko_pastur rate must be >= 1 (below 1 the law has an "
                "atom at 0 and is not a pure density)"
            )
        if self.density == CAUCHY and p("scale") <= 0:
            raise ValidationError("cauchy scale must be positive")
        if self.density == UNIFORM and p("a") >= p("b"):
            raise ValidationError("uniform needs a < b")

    # ------------------------------------------------------------ constructors

    @classmethod
    def discrete(cls, atoms: Iterable[tuple]) -> "Measure":
        return cls(DISCRETE, atoms=tuple(atoms))

    @classmethod
    def dirac(cls, location, weight=1) -> "Measure":
        return cls.discrete([(location, weight)])

    @classmethod
    def semicircle(cls, center=0, radius=2, mass=1) -> "Measure":
        return cls(
            DENSITY,
            density=SEMICIRCLE,
            params=(("center", center), ("radius", radius)),
            mass=mass,
        )

    @classmethod
    def marchenko_pastur(cls, rate=1, mass=1) -> "Measure":
        return cls(DENSITY, density=MARCHENKO_PASTUR, params=(("rate", rate),), mass=mass)

    @classmethod
    def cauchy(cls, center=0, scale=1, mass=1) -> "Measure":
        return cls(
            DENSITY,
            density=CAUCHY,
            params=(("center", center), ("scale", scale)),
            mass=mass,
        )

    @classmethod
    def uniform(cls, a, b, mass=1) -> "Measure":
        return cls(DENSITY, density=UNIFORM, params=(("a", a), ("b", b)), mass=mass)

    # --------------------------------------------------------------- accessors

    def param(self, name: str) -> Fraction:
        for key, value in self.params:
            if key == name:
                return value
        raise ValidationError(f"no param {name!r}")

    def scaled(self, factor) -> "Measure":
        """Same shape with all weights (total mass) multiplied by factor."""
        f = _parse_exact(factor)
        if f <= 0:
            raise ValidationError("scale factor must be positive")
        if self.kind == DISCRETE:
            return Measure.discrete([(t, w * f) for t, w in self.atoms])
        return Measure(
            DENSITY, density=self.density, params=self.params, mass=self.mass * f
        )

    def support_radius(self, dps: int = 30):
        """mpf bound R with support inside [-R, R]; None when unbounded."""
        if self.kind == DISCRETE:
            if not self.atoms:
                return mp.mpf(0)
            return max(abs(mp.mpf(t.numerator) / t.denominator) for t, _ in self.atoms)
        if self.density == SEMICIRCLE:
            c, r = self.param("center"), self.param("radius")
            return max(abs(_to_mpf(c - r)), abs(_to_mpf(c + r)))
        if self.density == UNIFORM:
            return max(abs(_to_mpf(self.param("a"))), abs(_to_mpf(self.param("b"))))
        if self.density == MARCHENKO_PASTUR:
            with mp.workdps(dps):
                return (1 + mp.sqrt(_to_mpf(self.param("rate")))) ** 2
        return None  # cauchy


def _to_mpf(q: Fraction):
    return mp.mpf(q.numerator) / q.denominator


# -------------------------------------------------------------------- moments


def _semicircle_moments(center: Fraction, radius: Fraction, p: int) -> list[Fraction]:
    q = radius * radius / 4
    central = [Fraction(0)] * (p + 1)
    central[0] = Fraction(1)
    for k in range(1, p // 2 + 1):
        central[2 * k] = catalan(k) * q**k
    out = []
    for i in range(1, p + 1):
        out.append(
            sum(
                math.comb(i, j) * center ** (i - j) * central[j]
                for j in range(i + 1)
            )
        )
    return out


def _narayana(p: int, k: int) -> int:
    return math.comb(p, k) * math.comb(p, k - 1) // p


def _mp_moments(rate: Fraction, p: int) -> list[Fraction]:
    return [
        sum(_narayana(i, k) * rate**k for k in range(1, i + 1))
        for i in range(1, p + 1)
    ]


def _uniform_moments(a: Fraction, b: Fraction, p: int) -> list[Fraction]:
    return [
        (b ** (i + 1) - a ** (i + 1)) / ((i + 1) * (b - a))
        for i in range(1, p + 1)
    ]


def moments(mu: Measure, p: int) -> MomentSequence:
    """Raw moments m_1..m_p = integral of x^k d(mu), exact rationals."""
    if p < 0:
        raise ValidationError("p must be >= 0")
    if p == 0:
        return MomentSequence(())
    if mu.kind == DISCRETE:
        return MomentSequence(
            tuple(
                sum((w * t**i for t, w in mu.atoms), Fraction(0))
                for i in range(1, p + 1)
            )
        )
    if mu.density == CAUCHY:
        raise MomentDoesNotExistError(
            "the Cauchy density has no moments of order >= 1"
        )
    if mu.density == SEMICIRCLE:
        unit = _semicircle_moments(mu.param("center"), mu.param("radius"), p)
    elif mu.density == MARCHENKO_PASTUR:
        unit = _mp_moments(mu.param("rate"), p)
    else:
        unit = _uniform_moments(mu.param("a"), mu.param("b"), p)
    return MomentSequence(tuple(mu.mass * v for v in unit))


# ----------------------------------------------------------------- quadrature


def _quad_certified(f: Callable, a, b, dps: int):
    """Adaptive Gauss-Legendre with a checked error estimate: dps relative
    digits, or an absolute error of 10^(-dps-10) when the value itself is
    tiny (the estimator bottoms out at the working epsilon)."""
    with mp.workdps(dps + _QUAD_GUARD_DIGITS):
        for maxdegree in (8, 10, 12):
            val, err = mp.quad(
                f, [a, b], error=True, method="gauss-legendre", maxdegree=maxdegree
            )
            floor = max(
                abs(val) * mp.mpf(10) ** (-dps - 5), mp.mpf(10) ** (-dps - 10)
            )
            if err <= floor:
                return val
    raise NumericError(
        f"quadrature failed to certify {dps} digits (estimate {err})"
    )


def _density_integral(mu: Measure, h: Callable, dps: int):
    """integral of h(x) * density(x) dx for the unit-mass density shape,
    via a substitution making the integrand analytic."""
    if mu.density == MARCHENKO_PASTUR:
        rate = _to_mpf(mu.param("rate"))
        s = mp.sqrt(rate)
        a, b = (1 - s) ** 2, (1 + s) ** 2
        m, half = (a + b) / 2, (b - a) / 2

        def integrand(theta):
            c = mp.cos(theta)
            x = m + half * mp.sin(theta)
            return half * half * c * c / (2 * mp.pi * x) * h(x)

        return _quad_certified(integrand, -mp.pi / 2, mp.pi / 2, dps)
    if mu.density == SEMICIRCLE:
        center = _to_mpf(mu.param("center"))
        r = _to_mpf(mu.param("radius"))

        def integrand(theta):
            c = mp.cos(theta)
            x = center + r * mp.sin(theta)
            return 2 / mp.pi * c * c * h(x)

        return _quad_certified(integrand, -mp.pi / 2, mp.pi / 2, dps)
    if mu.density == UNIFORM:
        a, b = _to_mpf(mu.param("a")), _to_mpf(mu.param("b"))
        return _quad_certified(lambda x: h(x) / (b - a), a, b, dps)
    raise UnsupportedOperationError(f"no quadrature for {mu.density}")


def absolute_moments(mu: Measure, p: int) -> tuple[Fraction, ...]:
    """integral of |x|^k d(mu) for k = 1..p, exact, where a closed form
    exists: discrete measures, uniform windows, and densities whose support
    does not straddle zero."""
    if p < 0:
        raise ValidationError("p must be >= 0")
    if mu.kind == DISCRETE:
        return tuple(
            sum((w * abs(t) ** k for t, w in mu.atoms), Fraction(0))
            for k in range(1, p + 1)
        )
    if mu.density == CAUCHY:
        raise MomentDoesNotExistError("the Cauchy density has no moments")
    if mu.density == UNIFORM:
        a, b = mu.param("a"), mu.param("b")

        def anti(x: Fraction, k: int) -> Fraction:
            return x * abs(x) ** k / (k + 1)

        return tuple(
            mu.mass * (anti(b, k) - anti(a, k)) / (b - a) for k in range(1, p + 1)
        )
    lo: Fraction
    if mu.density == SEMICIRCLE:
        lo = mu.param("center") - mu.param("radius")
        hi = mu.param("center") + mu.param("radius")
    else:  # marchenko_pastur: support starts at (1 - sqrt(rate))^2 >= 0
        lo, hi = Fraction(0), None
    signed = moments(mu, p).values
    if lo >= 0:
        return signed
    if hi is not None and hi <= 0:
        return tuple(v if k % 2 == 0 else -v for k, v in enumerate(signed, start=1))
    raise UnsupportedOperationError(
        "no exact absolute moments for a density straddling zero"
    )


def numeric_moment(mu: Measure, k: int, dps: int = 30):
    """Quadrature value of the k-th raw moment of a density measure; used to
    cross-check the closed recurrences."""
    if mu.kind != DENSITY:
        raise UnsupportedOperationError("numeric_moment expects a density")
    if mu.density == CAUCHY and k >= 1:
        raise MomentDoesNotExistError("no Cauchy moments")
    with mp.workdps(dps):
        val = _density_integral(mu, lambda x: x**k, dps)
        return _to_mpf(mu.mass) * val


# ----------------------------------------------------------- Cauchy transform


def _part_to_mpf(v):
    if isinstance(v, (int, str, Fraction)):
        return _to_mpf(_parse_exact(v))
    return mp.mpf(v)


def _as_mpc(z) -> mp.mpc:
    if isinstance(z, (tuple, list)) and len(z) == 2:
        return mp.mpc(_part_to_mpf(z[0]), _part_to_mpf(z[1]))
    return mp.mpc(z)


def _check_domain(mu: Measure, z: mp.mpc, dps: int) -> None:
    if z.imag > 0:
        return
    radius = mu.support_radius(dps)
    if radius is not None and abs(z) > radius:
        return
    raise DomainError(
        f"point {z} is neither in the upper half-plane nor outside the "
        "support disk"
    )


def _transform_closed(mu: Measure, z: mp.mpc, derivative: bool) -> mp.mpc | None:
    if mu.kind == DISCRETE:
        total = mp.mpc(0)
        for t, w in mu.atoms:
            d = z - _to_mpf(t)
            if d == 0:
                raise DomainError(f"evaluation at the atom {t}")
            total += _to_mpf(w) * (-(d**-2) if derivative else 1 / d)
        return total
    if mu.density == SEMICIRCLE:
        center = _to_mpf(mu.param("center"))
        r = _to_mpf(mu.param("radius"))
        zeta = z - center
        s = mp.sqrt(zeta - r) * mp.sqrt(zeta + r)
        if derivative:
            return _to_mpf(mu.mass) * (-2) * (1 + zeta / s) / (zeta + s) ** 2
        return _to_mpf(mu.mass) * 2 / (zeta + s)
    if mu.density == CAUCHY:
        if z.imag <= 0:
            raise DomainError("the Cauchy transform of the Cauchy density is "
                              "only evaluated in the upper half-plane")
        d = z - _to_mpf(mu.param("center")) + mp.mpc(0, 1) * _to_mpf(mu.param("scale"))
        return _to_mpf(mu.mass) * (-(d**-2) if derivative else 1 / d)
    return None


def _transform(mu: Measure, z, dps: int, derivative: bool) -> mp.mpc:
    with mp.workdps(dps):
        zz = _as_mpc(z)
        _check_domain(mu, zz, dps)
        if zz.imag < 0 and not (mu.kind == DISCRETE or mu.density == CAUCHY):
            # reflection through the real axis for compactly supported shapes
            return mp.conj(_transform(mu, mp.conj(zz), dps, derivative))
        closed = _transform_closed(mu, zz, derivative)
        if closed is not None:
            return closed
        if derivative:
            h = lambda x: -((zz - x) ** -2)
        else:
            h = lambda x: 1 / (zz - x)
        return _to_mpf(mu.mass) * _density_integral(mu, h, dps)


def cauchy_transform(mu: Measure, z, dps: int = 30) -> mp.mpc:
    """G(z) = integral of 1/(z - x) dmu(x), to roughly dps digits.

    z must lie in the open upper half-plane, or (for compactly supported
    measures) strictly outside the disk |z| <= support radius.
    """
    return _transform(mu, z, dps, derivative=False)


def cauchy_transform_derivative(mu: Measure, z, dps: int = 30) -> mp.mpc:
    """G'(z) = -integral of 1/(z - x)^2 dmu(x); same domain as G."""
    return _transform(mu, z, dps, derivative=True)


def cauchy_transform_exact(mu: Measure, re: Fraction, im: Fraction) -> tuple[Fraction, Fraction]:
    """Exact rational (real, imag) of G at a rational point, for discrete
    measures: the transform is a rational function of the atom data."""
    if mu.kind != DISCRETE:
        raise UnsupportedOperationError("exact evaluation needs a discrete measure")
    re, im = _parse_exact(re), _parse_exact(im)
    if im <= 0:
        radius = max((abs(t) for t, _ in mu.atoms), default=Fraction(0))
        if re * re + im * im <= radius * radius:
            raise DomainError("rational point inside the support disk")
    out_re, out_im = Fraction(0), Fraction(0)
    for t, w in mu.atoms:
        dre = re - t
        denom = dre * dre + im * im
        if denom == 0:
            raise DomainError(f"evaluation at the atom {t}")
        out_re += w * dre / denom
        out_im -= w * im / denom
    return out_re, out_im


# ----------------------------------------------------------------- truncation


@dataclass(frozen=True)
class Window:
    """A real interval with explicit endpoint inclusion; None means
    unbounded on that side.  Default is the half-open [lo, hi)."""

    lo: Fraction | None = None
    hi: Fraction | None = None
    lo_closed: bool = True
    hi_closed: bool = False

    def __post_init__(self) -> None:
        lo = None if self.lo is None else _parse_exact(self.lo)
        hi = None if self.hi is None else _parse_exact(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo is not None and hi is not None and lo > hi:
            raise ValidationError("window with lo > hi")

    def contains(self, t: Fraction) -> bool:
        if self.lo is not None and (t < self.lo or (t == self.lo and not self.lo_closed)):
            return False
        if self.hi is not None and (t > self.hi or (t == self.hi and not self.hi_closed)):
            return False
        return True


def truncate_measure(mu: Measure, window: Window) -> Measure:
    """Restriction of a discrete measure to a window (weights unchanged)."""
    if mu.kind != DISCRETE:
        raise UnsupportedOperationError(
            "truncation is defined for discrete measures only"
        )
    kept = [(t, w) for t, w in mu.atoms if window.contains(t)]
    return Measure(DISCRETE, atoms=tuple(kept))


# ----------------------------------------------------------------------- JSON


def measure_to_json(mu: Measure) -> dict:
    if mu.kind == DISCRETE:
        return {
            "kind": DISCRETE,
            "atoms": [[str(t), str(w)] for t, w in mu.atoms],
        }
    return {
        "kind": DENSITY,
        "name": mu.density,
        "params": {k: str(v) for k, v in mu.params},
        "mass": str(mu.mass),
    }


def measure_from_json(data) -> Measure:
    if not isinstance(data, dict) or "kind" not in data:
        raise ValidationError("measure JSON must be an object with a 'kind'")
    kind = data["kind"]
    if kind == DISCRETE:
        atoms = data.get("atoms")
        if not isinstance(atoms, list) or any(len(a) != 2 for a in atoms):
            raise ValidationError("discrete measure needs 'atoms': [[t, w], ...]")
        mu = Measure.discrete([(a[0], a[1]) for a in atoms])
        if "mass" in data and _parse_exact(data["mass"]) != mu.mass:
            raise ValidationError("declared mass disagrees with atom weights")
        return mu
    if kind == DENSITY:
        params = data.get("params")
        if not isinstance(params, dict):
            raise ValidationError("density measure needs a 'params' object")
        return Measure(
            DENSITY,
            density=data.get("name"),
            params=tuple(params.items()),
            mass=data.get("mass", 1),
        )
    raise ValidationError(f"unknown measure kind {kind!r}")
