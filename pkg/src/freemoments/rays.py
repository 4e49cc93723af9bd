"""Numeric recovery of the R-transform on rays approaching the origin.

For a finite measure mu with Cauchy transform G, the compositional left
inverse K of G is defined near 0 (away from the real axis), and

    R(z) = K(z) - 1/z

extends holomorphically to z = 0 along any ray that stays inside a cone
around the negative imaginary axis.  Its Taylor coefficients at 0 are the
free cumulants of mu.  This module samples K on a geometric grid of radii
along such a ray (damped Newton with continuation from the smallest radius,
where K(z) is dominated by 1/z), and fits a polynomial to the R values to
estimate the leading Taylor coefficients together with per-coefficient
error estimates from nested sub-grid fits.

All arithmetic is mpmath at a caller-chosen working precision; every kept
sample carries a certified inversion residual |G(K(z)) - z|, and the
stability figure residual / |z|^2 bounds the error this residual induces in
the R value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .cumulants import MomentSequence, free_cumulants_from_moments
from .errors import (
    DomainError,
    NumericError,
    RegionTooLargeError,
    ValidationError,
)
from .measures import (
    Measure,
    _parse_exact,
    _to_mpf,
    cauchy_transform,
    cauchy_transform_derivative,
    moments,
)

DEFAULT_LEVELS = 41
FIT_RADIUS_SHRINK = 100  # fit only radii <= beta / this


@dataclass(frozen=True)
class NontangentialRay:
    """Geometric grid of points t_j * e^{i(theta - pi/2)}, t_j = beta / 2^j,
    j = 0..levels-1, approaching 0 inside the cone |tan theta| <
    min(alpha, 1/alpha) around the negative imaginary axis."""

    alpha: Fraction = Fraction(1)
    beta: Fraction = Fraction(1, 8)
    tan_theta: Fraction = Fraction(0)
    levels: int = DEFAULT_LEVELS

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", _parse_exact(self.alpha))
        object.__setattr__(self, "beta", _parse_exact(self.beta))
        object.__setattr__(self, "tan_theta", _parse_exact(self.tan_theta))
        if self.alpha <= 0:
            raise ValidationError("alpha must be positive")
        if self.beta <= 0:
            raise ValidationError("beta must be positive")
        if not isinstance(self.levels, int) or self.levels < 10:
            raise ValidationError("levels must be an int >= 10")
        lid = min(self.alpha, 1 / self.alpha)
        if abs(self.tan_theta) >= lid:
            raise ValidationError(
                f"|tan theta| = {self.tan_theta} leaves the cone (< {lid})"
            )

    def radii(self) -> list[Fraction]:
        return [self.beta / 2**j for j in range(self.levels)]

    def direction(self) -> mp.mpc:
        """Unit vector e^{i(theta - pi/2)} at the current precision."""
        tau = _to_mpf(self.tan_theta)
        c = 1 / mp.sqrt(1 + tau * tau)
        return mp.mpc(tau * c, -c)

    def points(self) -> list[mp.mpc]:
        d = self.direction()
        return [_to_mpf(t) * d for t in self.radii()]


@dataclass(frozen=True)
class RayTransformSamples:
    """Retained inversions along a ray: K and R values with certified
    residuals; `stability[i]` bounds the error of `r_values[i]`."""

    ray: NontangentialRay
    dps: int
    indices: tuple[int, ...]
    radii: tuple
    points: tuple
    k_values: tuple
    r_values: tuple
    residuals: tuple
    stability: tuple
    dropped: tuple[int, ...]


def _transform_pair(source):
    if isinstance(source, Measure):
        return (
            lambda z: cauchy_transform(source, z, dps=mp.mp.dps),
            lambda z: cauchy_transform_derivative(source, z, dps=mp.mp.dps),
        )
    if isinstance(source, tuple) and len(source) == 2 and all(callable(f) for f in source):
        return source
    raise ValidationError("source must be a Measure or a (G, G') pair of callables")


def _newton(g, gp, z, seed, target, max_iter=80) -> tuple[mp.mpc, mp.mpf] | None:
    w = seed
    try:
        fw = g(w) - z
    except (DomainError, ValueError, ZeroDivisionError):
        return None
    for _ in range(max_iter):
        if abs(fw) <= target:
            return w, abs(fw)
        try:
            dw = fw / gp(w)
        except (DomainError, ValueError, ZeroDivisionError):
            return None
        lam = mp.mpf(1)
        improved = False
        while lam > mp.mpf(2) ** -40:
            trial = w - lam * dw
            try:
                ft = g(trial) - z
            except (DomainError, ValueError, ZeroDivisionError):
                lam /= 2
                continue
            if abs(ft) < abs(fw):
                w, fw = trial, ft
                improved = True
                break
            lam /= 2
        if not improved:
            return None
    return (w, abs(fw)) if abs(fw) <= target else None


def invert_g_on_ray(
    source, ray: NontangentialRay | None = None, dps: int = 50
) -> RayTransformSamples:
    """Solve G(w) = z for every grid point z of the ray, smallest radius
    first (there K(z) ~ 1/z, so Newton starts essentially converged) and
    warm-started by carrying the finite part K(z) - 1/z to the next radius.

    Points where Newton cannot reach the residual target |z| * 10^(6-dps)
    are dropped; if every point fails the ray does not fit inside the
    region where G is invertible and RegionTooLargeError is raised.
    """
    if ray is None:
        ray = NontangentialRay()
    g, gp = None, None
    with mp.workdps(dps):
        g, gp = _transform_pair(source)
        zs = ray.points()
        slack = mp.mpf(10) ** (6 - dps)
        kept: list[tuple[int, mp.mpc, mp.mpc, mp.mpf]] = []
        dropped: list[int] = []
        finite_part = mp.mpc(0)
        for j in range(ray.levels - 1, -1, -1):
            z = zs[j]
            seed = 1 / z + finite_part
            got = _newton(g, gp, z, seed, target=abs(z) * slack)
            if got is None:
                dropped.append(j)
                continue
            w, res = got
            kept.append((j, z, w, res))
            finite_part = w - 1 / z
        if not kept:
            raise RegionTooLargeError(
                "no grid point of the ray could be inverted; shrink beta"
            )
        kept.reverse()
        radii_exact = ray.radii()
        return RayTransformSamples(
            ray=ray,
            dps=dps,
            indices=tuple(j for j, _, _, _ in kept),
            radii=tuple(_to_mpf(radii_exact[j]) for j, _, _, _ in kept),
            points=tuple(z for _, z, _, _ in kept),
            k_values=tuple(w for _, _, w, _ in kept),
            r_values=tuple(w - 1 / z for _, z, w, _ in kept),
            residuals=tuple(res for _, _, _, res in kept),
            stability=tuple(res / abs(z) ** 2 for _, z, _, res in kept),
            dropped=tuple(sorted(dropped)),
        )


def left_inverse_residual(source, samples: RayTransformSamples, dps: int | None = None):
    """Re-evaluate |G(K(z)) - z| for every retained sample, by default at
    10 extra digits; the max is a certificate for the whole inversion."""
    dps = dps or samples.dps + 10
    with mp.workdps(dps):
        g, _ = _transform_pair(source)
        return tuple(
            abs(g(w) - z) for w, z in zip(samples.k_values, samples.points)
        )


# ------------------------------------------------------------------- fitting


@dataclass(frozen=True)
class TaylorEstimate:
    """Leading Taylor coefficients of R at 0 fitted on ray samples.

    coefficients[i] estimates the (i+1)-st free cumulant; errors[i] is an
    empirical error figure (spread between nested sub-grid fits plus the
    propagated inversion residual), and nonreal[i] flags an imaginary part
    too large to blame on that error."""

    order: int
    guard: int
    coefficients: tuple
    imag_parts: tuple
    errors: tuple
    nonreal: tuple[bool, ...]
    condition: object
    points_used: int
    radius_range: tuple


def _fit_coefficients(ts, values, degree, t_ref):
    rows, cols = len(ts), degree + 1
    a = mp.matrix(rows, cols)
    b = mp.matrix(rows, 1)
    for i, (t, v) in enumerate(zip(ts, values)):
        s = t / t_ref
        acc = mp.mpf(1)
        for m in range(cols):
            a[i, m] = acc
            acc *= s
        b[i] = v
    try:
        x, _ = mp.qr_solve(a, b)
    except ValueError as exc:
        raise NumericError(
            "least-squares matrix is numerically singular; lower the fit "
            "degree or raise the working precision"
        ) from exc
    return a, [x[m] for m in range(cols)]


def estimate_taylor_on_ray(
    samples: RayTransformSamples,
    p: int,
    guard: int = 2,
    max_radius=None,
) -> TaylorEstimate:
    """Fit a polynomial of degree p - 1 + guard to the R values on the
    sub-grid of radii <= beta/100 (or max_radius) and read off the first p
    coefficients.  Requires at least 3 (p + 1) points spanning two decades
    of radius.  Error figures come from refitting on the even- and
    odd-indexed halves of the grid."""
    if p < 1:
        raise ValidationError("order p must be >= 1")
    if guard < 0:
        raise ValidationError("guard must be >= 0")
    with mp.workdps(samples.dps):
        if max_radius is None:
            cap = _to_mpf(samples.ray.beta) / FIT_RADIUS_SHRINK
        else:
            cap = mp.mpf(max_radius)
        sel = [i for i, t in enumerate(samples.radii) if t <= cap]
        degree = p - 1 + guard
        if len(sel) < 3 * (p + 1):
            raise ValidationError(
                f"{len(sel)} points below radius {mp.nstr(cap)} but the fit "
                f"needs at least {3 * (p + 1)}"
            )
        ts = [samples.radii[i] for i in sel]
        if max(ts) / min(ts) < 100:
            raise ValidationError("fit radii must span at least two decades")
        vals = [samples.r_values[i] for i in sel]
        t_ref = max(ts)
        a, x_full = _fit_coefficients(ts, vals, degree, t_ref)

        spreads = [mp.mpf(0)] * (degree + 1)
        for parity in (0, 1):
            sub = [i for i in range(len(sel)) if i % 2 == parity]
            if len(sub) < degree + 1:
                raise ValidationError("sub-grid too small for the fit degree")
            _, x_sub = _fit_coefficients(
                [ts[i] for i in sub], [vals[i] for i in sub], degree, t_ref
            )
            for m in range(degree + 1):
                spreads[m] = max(spreads[m], abs(x_full[m] - x_sub[m]))

        sv = mp.svd_r(a, compute_uv=False)
        smin, smax = min(sv), max(sv)
        condition = mp.inf if smin == 0 else smax / smin

        # row norms of the pseudo-inverse give the per-coefficient
        # sensitivity to the inversion residuals
        gram = a.T * a
        pinv = mp.inverse(gram) * a.T
        noise = max(samples.stability[i] for i in sel)
        sens = [
            mp.sqrt(sum(pinv[m, j] ** 2 for j in range(len(sel))))
            for m in range(degree + 1)
        ]

        d = samples.ray.direction()
        coeffs, imags, errors, nonreal = [], [], [], []
        for m in range(p):
            unscale = d**-m * t_ref**-m
            c = x_full[m] * unscale
            err = (spreads[m] + sens[m] * noise) * abs(unscale)
            coeffs.append(c.real)
            imags.append(c.imag)
            errors.append(err)
            nonreal.append(abs(c.imag) > max(mp.mpf(10) ** -6, 10 * err))
        return TaylorEstimate(
            order=p,
            guard=guard,
            coefficients=tuple(coeffs),
            imag_parts=tuple(imags),
            errors=tuple(errors),
            nonreal=tuple(nonreal),
            condition=condition,
            points_used=len(sel),
            radius_range=(min(ts), max(ts)),
        )


# ---------------------------------------------------------------- comparison


@dataclass(frozen=True)
class TaylorCheck:
    """Fitted Taylor coefficients against exact free cumulants."""

    order: int
    exact: tuple
    estimated: tuple
    abs_errors: tuple
    error_estimates: tuple
    max_error: object
    condition: object


def verify_taylor_cumulants(
    mu: Measure,
    p: int,
    ray: NontangentialRay | None = None,
    dps: int = 50,
    guard: int = 2,
    reference_moments: MomentSequence | None = None,
) -> TaylorCheck:
    """End-to-end check that the fitted ray coefficients reproduce the free
    cumulants computed exactly from the moments of mu.

    reference_moments substitutes an externally supplied exact moment
    sequence for the measure's own (at least p entries); the deliberate use
    is negative controls, where a corrupted reference must make the check
    fail."""
    if reference_moments is None:
        reference_moments = moments(mu, p)
    elif reference_moments.p < p:
        raise ValidationError(
            f"reference moments of order {reference_moments.p} < requested {p}"
        )
    exact = free_cumulants_from_moments(reference_moments).values[:p]
    samples = invert_g_on_ray(mu, ray, dps=dps)
    est = estimate_taylor_on_ray(samples, p, guard=guard)
    with mp.workdps(dps):
        exact_f = [_to_mpf(v) for v in exact]
        errs = tuple(abs(e - x) for e, x in zip(est.coefficients, exact_f))
        return TaylorCheck(
            order=p,
            exact=tuple(exact),
            estimated=est.coefficients,
            abs_errors=errs,
            error_estimates=est.errors,
            max_error=max(errs),
            condition=est.condition,
        )
