"""Infinitely divisible laws described by a drift/jump pair (gamma, sigma):
a real drift gamma and a finite positive measure sigma on the real line.

One pair describes two laws at once.  On the free side its R-transform is

    R(z) = gamma + integral of (z + x) / (1 - x z) dsigma(x),

so the free cumulants come straight from the moments of sigma:

    k_1 = gamma + m_1(sigma),   k_p = m_{p-2}(sigma) + m_p(sigma)  (p >= 2),

with m_0 = total mass.  On the classical side the log characteristic
function has the same canonical integral structure, and the classical
cumulants are given by the *same* numbers.  The two laws differ only in how
cumulants combine into moments, which the cumulants module already handles;
this module supplies the pair arithmetic (superposition, dilation), the
cumulant/moment maps, and an a priori growth bound on moments in terms of
absolute moments of sigma.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cumulants import (
    CLASSICAL,
    FREE,
    CumulantSequence,
    MomentSequence,
    _check_order,
    _nc_profile_counts,
    _product_for_profile,
    moments_from_classical_cumulants,
    moments_from_free_cumulants,
)
from .errors import UnsupportedOperationError, ValidationError
from .measures import (
    DENSITY,
    DISCRETE,
    Measure,
    _parse_exact,
    absolute_moments,
    measure_from_json,
    measure_to_json,
    moments,
)


@dataclass(frozen=True)
class LevyPair:
    """Drift gamma plus jump-intensity measure sigma."""

    gamma: Fraction
    sigma: Measure

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma", _parse_exact(self.gamma))
        if not isinstance(self.sigma, Measure):
            raise ValidationError("sigma must be a Measure")


def _sigma_moments(pair: LevyPair, p: int) -> tuple[Fraction, ...]:
    """(m_0, m_1, ..., m_p) of sigma, with m_0 the total mass."""
    return (pair.sigma.mass,) + moments(pair.sigma, p).values


def cumulants_from_levy(pair: LevyPair, p: int, kind: str = FREE) -> CumulantSequence:
    """Cumulants of order 1..p of the law generated by the pair.  The free
    and classical readings share the same numbers; only the kind tag
    changes."""
    _check_order(p, None)
    m = _sigma_moments(pair, p)
    values = [pair.gamma + (m[1] if p >= 1 else Fraction(0))]
    for q in range(2, p + 1):
        values.append(m[q - 2] + m[q])
    return CumulantSequence(tuple(values[:p]), kind=kind)


def free_cumulants_from_levy(pair: LevyPair, p: int) -> CumulantSequence:
    return cumulants_from_levy(pair, p, FREE)


def classical_cumulants_from_levy(pair: LevyPair, p: int) -> CumulantSequence:
    return cumulants_from_levy(pair, p, CLASSICAL)


def moments_of_free_id(pair: LevyPair, p: int) -> MomentSequence:
    """Moments of the freely infinitely divisible law of the pair."""
    return moments_from_free_cumulants(free_cumulants_from_levy(pair, p))


def moments_of_classical_id(pair: LevyPair, p: int) -> MomentSequence:
    """Moments of the classically infinitely divisible law of the pair."""
    return moments_from_classical_cumulants(classical_cumulants_from_levy(pair, p))


# ------------------------------------------------------------ pair arithmetic


def _merge_sigmas(a: Measure, b: Measure) -> Measure:
    if a.kind == DISCRETE and not a.atoms:
        return b
    if b.kind == DISCRETE and not b.atoms:
        return a
    if a.kind == DISCRETE and b.kind == DISCRETE:
        weights: dict[Fraction, Fraction] = {t: w for t, w in a.atoms}
        for t, w in b.atoms:
            weights[t] = weights.get(t, Fraction(0)) + w
        return Measure.discrete(sorted(weights.items()))
    if (
        a.kind == DENSITY
        and b.kind == DENSITY
        and a.density == b.density
        and a.params == b.params
    ):
        return Measure(DENSITY, density=a.density, params=a.params, mass=a.mass + b.mass)
    raise UnsupportedOperationError(
        "can only superpose discrete jump measures or identical density shapes"
    )


def levy_add(a: LevyPair, b: LevyPair) -> LevyPair:
    """Superposition: drifts add, jump measures add.  Cumulants of either
    generated law are additive under this operation."""
    return LevyPair(a.gamma + b.gamma, _merge_sigmas(a.sigma, b.sigma))


def dilate_levy(pair: LevyPair, t) -> LevyPair:
    """Pair of the dilation x -> t x of the generated law (discrete sigma
    only; the reweighting keeps the canonical form)."""
    t = _parse_exact(t)
    if t == 0:
        raise ValidationError("dilation factor must be nonzero")
    if pair.sigma.kind != DISCRETE:
        raise UnsupportedOperationError("dilation needs a discrete sigma")
    atoms = []
    drift_correction = Fraction(0)
    for x, c in pair.sigma.atoms:
        scale = t * t * (1 + x * x) / (1 + t * t * x * x)
        atoms.append((t * x, c * scale))
        drift_correction += c * x / (1 + t * t * x * x)
    gamma = t * pair.gamma + t * (1 - t * t) * drift_correction
    return LevyPair(gamma, Measure.discrete(atoms))


def shifted_poisson_parameters(pair: LevyPair) -> dict[str, Fraction]:
    """For a centerless pair whose sigma is a single atom c*delta_t with
    t != 0, the free law is a dilated Marchenko-Pastur law plus a shift:

        scale * MP(rate) shifted by `shift`,

    with scale = t, rate = c (1 + t^2) / t^2, shift = -c / t.  Handy for
    building matrix models of the law."""
    if pair.gamma != 0:
        raise UnsupportedOperationError("model is for pairs with zero drift")
    if pair.sigma.kind != DISCRETE or len(pair.sigma.atoms) != 1:
        raise UnsupportedOperationError("model needs a single-atom sigma")
    (t, c), = pair.sigma.atoms
    if t == 0:
        raise UnsupportedOperationError("atom at zero generates a plain semicircle")
    return {
        "scale": t,
        "rate": c * (1 + t * t) / (t * t),
        "shift": -c / t,
    }


# ------------------------------------------------------------- moment bounds


def moment_growth_bound(pair: LevyPair, p: int) -> tuple[Fraction, ...]:
    """B_1..B_p with |m_q(free law)| <= B_q: replace every cumulant in the
    moment expansion by the bound |gamma| + mhat_1 (singletons) or
    mhat_{q-2} + mhat_q (blocks of size q), mhat the absolute moments of
    sigma, and sum over non-crossing partitions."""
    _check_order(p, None)
    mhat = (pair.sigma.mass,) + absolute_moments(pair.sigma, p)
    b = [abs(pair.gamma) + mhat[1]]
    for q in range(2, p + 1):
        b.append(mhat[q - 2] + mhat[q])
    b = tuple(b)
    out = []
    for q in range(1, p + 1):
        acc = Fraction(0)
        for profile, count in _nc_profile_counts(q).items():
            acc += count * _product_for_profile(profile, b)
        out.append(acc)
    return tuple(out)


def diagnose_moment_transfer(pair: LevyPair, p: int) -> list[dict]:
    """Per-order comparison of the actual free-law moments against the
    a priori growth bound; `ratio` is |moment| / bound (0 when the bound
    degenerates to 0)."""
    actual = moments_of_free_id(pair, p)
    bounds = moment_growth_bound(pair, p)
    report = []
    for q in range(1, p + 1):
        m, bound = actual[q], bounds[q - 1]
        report.append(
            {
                "order": q,
                "moment": m,
                "bound": bound,
                "ratio": Fraction(0) if bound == 0 else abs(m) / bound,
                "within": abs(m) <= bound,
            }
        )
    return report


# ----------------------------------------------------------------------- JSON


def levy_pair_to_json(pair: LevyPair) -> dict:
    return {"gamma": str(pair.gamma), "sigma": measure_to_json(pair.sigma)}


def levy_pair_from_json(data) -> LevyPair:
    if not isinstance(data, dict) or set(data) != {"gamma", "sigma"}:
        raise ValidationError("pair JSON must have exactly 'gamma' and 'sigma'")
    return LevyPair(data["gamma"], measure_from_json(data["sigma"]))
