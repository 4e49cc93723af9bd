"""Self-checking acceptance battery.

Ten deterministic criteria, each with a pinned tolerance and a runtime
budget, covering the whole pipeline: exact moment/cumulant combinatorics,
formal series, pinned transforms, numeric ray recovery of Taylor
coefficients, support bounds, Levy-pair correspondents and their semigroup,
the random-matrix oracle, and lattice size bounds.

``run_suite`` executes every requested criterion (failures never
short-circuit the rest) and returns one :class:`CriterionResult` per
criterion; ``format_report`` renders one PASS/FAIL line each.  A criterion
that overruns its runtime budget fails even if all its checks pass.

``AcceptanceConfig`` exists mostly for negative controls: overriding the
semicircle reference moments with corrupted values must flip the
``taylor-recovery`` criterion to a named failure.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import mpmath as mp

from .cumulants import (
    CumulantSequence,
    MomentSequence,
    free_convolve,
    free_cumulants_from_moments,
    moments_from_free_cumulants,
)
from .errors import FreemomentsError, ValidationError
from .levy import (
    LevyPair,
    classical_cumulants_from_levy,
    free_cumulants_from_levy,
    levy_add,
    moments_of_classical_id,
    moments_of_free_id,
)
from .measures import Measure, _parse_exact, moments
from .noncrossing import (
    NCInterval,
    NCPartition,
    catalan,
    enumerate_nc,
    iter_nc_blocks,
    mobius_nc,
    mobius_nc_poset,
    refines,
)
from .rays import (
    NontangentialRay,
    estimate_taylor_on_ray,
    invert_g_on_ray,
    verify_taylor_cumulants,
)
from .rmt import (
    MatrixEnsembleSpec,
    compare_to_prediction,
    predicted_moments,
    sample_trace_moments,
)
from .series import r_series_from_moments, support_bound_from_cumulants

SUITE_SEED = 20260825


@dataclass(frozen=True)
class AcceptanceConfig:
    """Knobs for the battery.

    semicircle_moments replaces the exact reference moments of the standard
    semicircle inside the taylor-recovery criterion (negative-control hook);
    matrix_budget overrides the sampling cost guard of the matrix criterion.
    """

    semicircle_moments: tuple[Fraction, ...] | None = None
    matrix_budget: float | None = None

    def __post_init__(self) -> None:
        if self.semicircle_moments is not None:
            object.__setattr__(
                self,
                "semicircle_moments",
                tuple(_parse_exact(v) for v in self.semicircle_moments),
            )


@dataclass(frozen=True)
class CriterionResult:
    slug: str
    description: str
    passed: bool
    detail: str
    seconds: float


class _Checks:
    """Collects labelled pass/fail checks for one criterion."""

    def __init__(self) -> None:
        self.total = 0
        self.failures: list[str] = []

    def expect(self, condition: bool, label: str) -> None:
        self.total += 1
        if not condition:
            self.failures.append(label)

    def result(self, summary: str) -> tuple[bool, str]:
        if self.failures:
            shown = "; ".join(self.failures[:3])
            extra = len(self.failures) - 3
            if extra > 0:
                shown += f"; and {extra} more"
            return False, f"{len(self.failures)}/{self.total} checks failed: {shown}"
        return True, f"{summary} ({self.total} checks)"


def _random_moment_sequences(
    count: int, max_order: int, seed: int
) -> list[MomentSequence]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        order = rng.randint(1, max_order)
        values = tuple(
            Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(order)
        )
        out.append(MomentSequence(values))
    return out


def _fmt(x) -> str:
    return mp.nstr(mp.mpf(x) if not isinstance(x, (mp.mpf, mp.mpc)) else x, 3)


# ------------------------------------------------------------------ criteria


def _criterion_roundtrip(config: AcceptanceConfig) -> tuple[bool, str]:
    """Moment -> free cumulant -> moment is exactly the identity (and the
    reverse composition too) on random rational sequences of order <= 10."""
    checks = _Checks()
    for i, m in enumerate(_random_moment_sequences(200, 10, SUITE_SEED)):
        k = free_cumulants_from_moments(m)
        checks.expect(
            moments_from_free_cumulants(k).values == m.values,
            f"sequence {i}: m->k->m changed the values",
        )
        as_k = CumulantSequence(m.values)
        back = free_cumulants_from_moments(moments_from_free_cumulants(as_k))
        checks.expect(
            back.values == as_k.values,
            f"sequence {i}: k->m->k changed the values",
        )
    return checks.result("200 random rational sequences round-tripped exactly")


def _criterion_series(config: AcceptanceConfig) -> tuple[bool, str]:
    """The formal-series route to R coefficients agrees exactly with the
    partition-sum route on the same random sequences."""
    checks = _Checks()
    for i, m in enumerate(_random_moment_sequences(200, 10, SUITE_SEED)):
        series = r_series_from_moments(m)
        k = free_cumulants_from_moments(m)
        checks.expect(
            series.coeffs == k.values,
            f"sequence {i}: series and partition cumulants differ",
        )
    return checks.result("series route matched partition route on 200 sequences")


def _criterion_pinned(config: AcceptanceConfig) -> tuple[bool, str]:
    """Pinned R-transforms: point mass -> constant a, semicircle ->
    m + (r^2/4) z (exact); Cauchy -> constant -i on the ray (numeric)."""
    checks = _Checks()
    a = Fraction(7, 3)
    dirac = r_series_from_moments(moments(Measure.dirac(a), 8))
    checks.expect(
        dirac.coeffs == (a,) + (Fraction(0),) * 7,
        "point mass: R is not the constant a",
    )
    m, r = Fraction(1, 2), Fraction(3)
    semi = r_series_from_moments(moments(Measure.semicircle(m, r), 8))
    checks.expect(
        semi.coeffs == (m, r * r / 4) + (Fraction(0),) * 6,
        "semicircle: R is not m + (r^2/4) z",
    )
    std = r_series_from_moments(moments(Measure.semicircle(0, 2), 8))
    checks.expect(
        std.coeffs == (Fraction(0), Fraction(1)) + (Fraction(0),) * 6,
        "standard semicircle: R is not z",
    )
    samples = invert_g_on_ray(Measure.cauchy(), dps=50)
    with mp.workdps(50):
        dev = max(abs(rv + 1j) for rv in samples.r_values)
        checks.expect(
            dev < mp.mpf("1e-8"),
            f"Cauchy: max |R + i| = {_fmt(dev)} on the ray (tol 1e-8)",
        )
    return checks.result(f"exact pins plus Cauchy ray deviation {_fmt(dev)}")


def _five_atom_measure(seed: int) -> Measure:
    rng = random.Random(seed)
    locations: dict[Fraction, Fraction] = {}
    while len(locations) < 5:
        t = Fraction(rng.randint(-8, 8), rng.randint(1, 4))
        locations[t] = Fraction(rng.randint(1, 9), 1)
    total = sum(locations.values())
    return Measure.discrete([(t, w / total) for t, w in locations.items()])


def _criterion_taylor(config: AcceptanceConfig) -> tuple[bool, str]:
    """Numeric Taylor coefficients from the ray match the exact free
    cumulants at order 4 for four reference measures."""
    half = Fraction(1, 2)
    cases = [
        ("semicircle", Measure.semicircle(0, 2), mp.mpf("1e-5")),
        ("marchenko-pastur", Measure.marchenko_pastur(1), mp.mpf("1e-4")),
        ("two-atom", Measure.discrete([(-1, half), (1, half)]), mp.mpf("1e-5")),
        ("five-atom", _five_atom_measure(SUITE_SEED + 4), mp.mpf("1e-5")),
    ]
    checks = _Checks()
    worst = mp.mpf(0)
    for label, mu, tol in cases:
        reference = None
        if label == "semicircle" and config.semicircle_moments is not None:
            reference = MomentSequence(config.semicircle_moments)
        check = verify_taylor_cumulants(mu, 4, dps=50, reference_moments=reference)
        with mp.workdps(50):
            err = mp.mpf(check.max_error)
            worst = max(worst, err / tol)
            checks.expect(
                err <= tol,
                f"{label}: max coefficient error {_fmt(err)} > {_fmt(tol)}",
            )
    return checks.result(
        f"4 measures at order 4, worst error/tolerance ratio {_fmt(worst)}"
    )


def _criterion_nonreal(config: AcceptanceConfig) -> tuple[bool, str]:
    """A law without moments yields a decisively non-real constant
    coefficient, and the fit flags it."""
    samples = invert_g_on_ray(Measure.cauchy(), dps=50)
    est = estimate_taylor_on_ray(samples, 2)
    checks = _Checks()
    with mp.workdps(50):
        magnitude = abs(est.imag_parts[0])
        checks.expect(
            magnitude > mp.mpf("0.999"),
            f"|imag(b_0)| = {_fmt(magnitude)} <= 0.999",
        )
    checks.expect(bool(est.nonreal[0]), "non-real flag did not fire on b_0")
    return checks.result(f"|imag(b_0)| = {_fmt(magnitude)}, flag fired")


def _criterion_support(config: AcceptanceConfig) -> tuple[bool, str]:
    """The cumulant support bound evaluates to exactly 16 for the standard
    semicircle and the rate-1 Marchenko-Pastur law, and both true supports
    sit inside [-16, 16].  The factor-8 conservatism is documented, not
    patched."""
    checks = _Checks()
    semi_k = free_cumulants_from_moments(moments(Measure.semicircle(0, 2), 6))
    mp_k = free_cumulants_from_moments(moments(Measure.marchenko_pastur(1), 6))
    semi_bound = support_bound_from_cumulants(semi_k)
    mp_bound = support_bound_from_cumulants(mp_k)
    checks.expect(
        semi_bound == Fraction(16), f"semicircle bound {semi_bound} != 16"
    )
    checks.expect(
        mp_bound == Fraction(16), f"marchenko-pastur bound {mp_bound} != 16"
    )
    checks.expect(
        isinstance(semi_bound, Fraction) and isinstance(mp_bound, Fraction),
        "bounds are not exact rationals",
    )
    with mp.workdps(30):
        semi_radius = Measure.semicircle(0, 2).support_radius()
        mp_radius = Measure.marchenko_pastur(1).support_radius()
        checks.expect(
            semi_radius <= 16 and mp_radius <= 16,
            "a true support escapes [-16, 16]",
        )
    return checks.result(
        "both bounds exactly 16; true supports [-2,2] and [0,4] contained"
    )


def _criterion_levy_pins(config: AcceptanceConfig) -> tuple[bool, str]:
    """The two canonical positive pairs: free Poisson (all cumulants equal
    to the rate, Catalan-like moment ladder vs the classical Bell ladder)
    and the centered unit pair whose correspondents are the semicircle and
    the Gaussian."""
    checks = _Checks()
    half = Fraction(1, 2)
    poisson = LevyPair(half, Measure.discrete([(1, half)]))
    checks.expect(
        free_cumulants_from_levy(poisson, 4).values == (Fraction(1),) * 4,
        "rate-1 pair: free cumulants are not all 1",
    )
    checks.expect(
        classical_cumulants_from_levy(poisson, 4).values == (Fraction(1),) * 4,
        "rate-1 pair: classical cumulants are not all 1",
    )
    checks.expect(
        moments_of_free_id(poisson, 4).values
        == (Fraction(1), Fraction(2), Fraction(5), Fraction(14)),
        "rate-1 pair: free moments are not (1,2,5,14)",
    )
    checks.expect(
        moments_of_classical_id(poisson, 4).values
        == (Fraction(1), Fraction(2), Fraction(5), Fraction(15)),
        "rate-1 pair: classical moments are not (1,2,5,15)",
    )
    unit = LevyPair(0, Measure.discrete([(0, 1)]))
    checks.expect(
        moments_of_free_id(unit, 4).values
        == (Fraction(0), Fraction(1), Fraction(0), Fraction(2)),
        "centered unit pair: free side is not the semicircle",
    )
    checks.expect(
        moments_of_classical_id(unit, 4).values
        == (Fraction(0), Fraction(1), Fraction(0), Fraction(3)),
        "centered unit pair: classical side is not the Gaussian",
    )
    a = Fraction(5, 3)
    drift = LevyPair(a, Measure.discrete([]))
    checks.expect(
        moments_of_free_id(drift, 4).values == (a, a**2, a**3, a**4)
        and moments_of_classical_id(drift, 4).values == (a, a**2, a**3, a**4),
        "pure drift: correspondents are not the point mass",
    )
    return checks.result("free Poisson, semicircle/Gaussian, and drift pins exact")


def _random_levy_pair(rng: random.Random) -> LevyPair:
    gamma = Fraction(rng.randint(-6, 6), rng.randint(1, 6))
    atoms: dict[Fraction, Fraction] = {}
    for _ in range(rng.randint(1, 3)):
        t = Fraction(rng.randint(-8, 8), rng.randint(1, 4))
        w = Fraction(rng.randint(1, 8), rng.randint(1, 8))
        atoms[t] = atoms.get(t, Fraction(0)) + w
    return LevyPair(gamma, Measure.discrete(list(atoms.items())))


def _criterion_semigroup(config: AcceptanceConfig) -> tuple[bool, str]:
    """Pair addition adds cumulants exactly, and the (gamma/n, sigma/n)
    pair is an exact n-th convolution root, for 50 random discrete pairs
    and n in {2, 3, 7}."""
    checks = _Checks()
    rng = random.Random(SUITE_SEED + 8)
    order = 6
    for i in range(50):
        a = _random_levy_pair(rng)
        b = _random_levy_pair(rng)
        ka = free_cumulants_from_levy(a, order).values
        kb = free_cumulants_from_levy(b, order).values
        total = free_cumulants_from_levy(levy_add(a, b), order).values
        checks.expect(
            total == tuple(x + y for x, y in zip(ka, kb)),
            f"pair {i}: addition is not cumulant-additive",
        )
        if i < 10:
            via_moments = free_convolve(
                moments_of_free_id(a, order), moments_of_free_id(b, order)
            )
            checks.expect(
                via_moments.values == moments_of_free_id(levy_add(a, b), order).values,
                f"pair {i}: pair addition disagrees with free convolution",
            )
        for n in (2, 3, 7):
            root = LevyPair(a.gamma / n, a.sigma.scaled(Fraction(1, n)))
            scaled = free_cumulants_from_levy(root, order).values
            checks.expect(
                scaled == tuple(k / n for k in ka),
                f"pair {i}: (gamma/{n}, sigma/{n}) does not scale cumulants by 1/{n}",
            )
            acc = root
            for _ in range(n - 1):
                acc = levy_add(acc, root)
            checks.expect(
                free_cumulants_from_levy(acc, order).values == ka,
                f"pair {i}: {n}-fold sum of the scaled pair is not the original",
            )
    return checks.result("50 random pairs: additivity and n-th roots exact")


def _criterion_matrices(config: AcceptanceConfig) -> tuple[bool, str]:
    """Monte Carlo trace moments reproduce the exact predictions for the
    three reference ensembles, and the free-sum run statistically separates
    the free prediction from plausible classical-convolution values."""
    checks = _Checks()
    budget = config.matrix_budget
    half = Fraction(1, 2)

    gue = MatrixEnsembleSpec(kind="gue", dim=500, trials=40, seed=SUITE_SEED)
    est = sample_trace_moments(gue, 6, budget=budget)
    report = compare_to_prediction(est, predicted_moments(gue, 6))
    for row in report:
        checks.expect(
            row["within"],
            f"gue order {row['order']}: |{_fmt(row['difference'])}| exceeds "
            f"allowance {_fmt(row['allowance'])}",
        )

    wishart = MatrixEnsembleSpec(
        kind="wishart", dim=500, trials=40, seed=SUITE_SEED + 1, rate=Fraction(1)
    )
    est = sample_trace_moments(wishart, 4, budget=budget)
    report = compare_to_prediction(est, predicted_moments(wishart, 4))
    for row in report:
        checks.expect(
            row["within"],
            f"wishart order {row['order']}: |{_fmt(row['difference'])}| exceeds "
            f"allowance {_fmt(row['allowance'])}",
        )

    bernoulli = Measure.discrete([(-1, half), (1, half)])
    part = MatrixEnsembleSpec(
        kind="deterministic", dim=600, trials=1, seed=0, measure=bernoulli
    )
    free_sum = MatrixEnsembleSpec(
        kind="free_sum", dim=600, trials=40, seed=SUITE_SEED + 2, parts=(part, part)
    )
    est = sample_trace_moments(free_sum, 4, budget=budget)
    report = compare_to_prediction(est, predicted_moments(free_sum, 4))
    for row in report:
        checks.expect(
            row["within"],
            f"free-sum order {row['order']}: |{_fmt(row['difference'])}| exceeds "
            f"allowance {_fmt(row['allowance'])}",
        )
    # The free prediction for the fourth moment is 6.  A classical
    # (independent) sum of the same two Bernoulli matrices would have
    # fourth moment 8; the sampler must reject that, and also the value 4
    # sometimes quoted for this discriminator, at the same allowance.
    allowance = report[3]["allowance"]
    sampled = est.means[3]
    for classical_value in (4.0, 8.0):
        checks.expect(
            abs(sampled - classical_value) > allowance,
            f"free-sum m_4 = {_fmt(sampled)} does not reject "
            f"classical value {classical_value}",
        )
    return checks.result(
        f"3 ensembles within allowance; m_4 = {_fmt(sampled)} rejects 4 and 8"
    )


def _criterion_lattice(config: AcceptanceConfig) -> tuple[bool, str]:
    """Enumerated lattice sizes and top-interval Mobius values stay under
    4^n for n <= 10, and the closed-form Mobius product agrees with the
    poset recursion on every interval for n <= 7."""
    checks = _Checks()
    for n in range(1, 11):
        bound = 4**n
        count = 0
        worst = 0
        full = NCPartition.full(n)
        for blocks in iter_nc_blocks(n):
            count += 1
            pi = NCPartition.from_blocks(blocks, n)
            worst = max(worst, abs(mobius_nc(NCInterval(pi, full))))
        checks.expect(count == catalan(n), f"n={n}: count {count} != Catalan")
        checks.expect(count <= bound, f"n={n}: count {count} > 4^n")
        checks.expect(worst <= bound, f"n={n}: max |Mobius| {worst} > 4^n")
    parts = enumerate_nc(7)
    compared = 0
    for lower in parts:
        for upper in parts:
            if not refines(lower, upper):
                continue
            interval = NCInterval(lower, upper)
            compared += 1
            if mobius_nc(interval) != mobius_nc_poset(interval):
                checks.expect(
                    False,
                    f"closed and poset Mobius differ on an interval of NC(7): "
                    f"{lower.blocks} <= {upper.blocks}",
                )
    checks.expect(compared == 7752, f"expected 7752 intervals in NC(7), saw {compared}")
    return checks.result(
        "counts and Mobius bounded by 4^n up to n=10; 7752 intervals cross-checked"
    )


@dataclass(frozen=True)
class _Criterion:
    slug: str
    description: str
    budget_seconds: float
    run: Callable[[AcceptanceConfig], tuple[bool, str]]


CRITERIA: tuple[_Criterion, ...] = (
    _Criterion(
        "moment-cumulant-roundtrip",
        "free moment/cumulant conversions invert each other exactly",
        30.0,
        _criterion_roundtrip,
    ),
    _Criterion(
        "series-matches-partitions",
        "formal-series R coefficients equal partition-sum cumulants",
        30.0,
        _criterion_series,
    ),
    _Criterion(
        "pinned-r-transforms",
        "point mass, semicircle, Cauchy transforms hit their closed forms",
        60.0,
        _criterion_pinned,
    ),
    _Criterion(
        "taylor-recovery",
        "ray-fitted Taylor coefficients reproduce exact free cumulants",
        120.0,
        _criterion_taylor,
    ),
    _Criterion(
        "nonreal-direction-flag",
        "momentless law produces a flagged non-real constant coefficient",
        60.0,
        _criterion_nonreal,
    ),
    _Criterion(
        "support-bound",
        "cumulant support bound is exactly 16 and contains the true supports",
        30.0,
        _criterion_support,
    ),
    _Criterion(
        "levy-correspondents",
        "canonical pairs map to free Poisson / semicircle / Gaussian exactly",
        30.0,
        _criterion_levy_pins,
    ),
    _Criterion(
        "levy-semigroup",
        "pair addition and n-th convolution roots act exactly on cumulants",
        60.0,
        _criterion_semigroup,
    ),
    _Criterion(
        "matrix-oracle",
        "sampled trace moments match free predictions and reject classical",
        180.0,
        _criterion_matrices,
    ),
    _Criterion(
        "lattice-size-bounds",
        "lattice counts and Mobius values bounded; closed form equals recursion",
        120.0,
        _criterion_lattice,
    ),
)

CRITERIA_BY_SLUG = {c.slug: c for c in CRITERIA}


def run_criterion(
    criterion: _Criterion, config: AcceptanceConfig
) -> CriterionResult:
    start = time.perf_counter()
    try:
        passed, detail = criterion.run(config)
    except FreemomentsError as exc:
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    seconds = time.perf_counter() - start
    if passed and seconds > criterion.budget_seconds:
        passed = False
        detail += (
            f"; runtime {seconds:.1f}s exceeded the "
            f"{criterion.budget_seconds:.0f}s budget"
        )
    return CriterionResult(
        slug=criterion.slug,
        description=criterion.description,
        passed=passed,
        detail=detail,
        seconds=seconds,
    )


def run_suite(
    only: Iterable[str] | None = None,
    config: AcceptanceConfig | None = None,
) -> list[CriterionResult]:
    """Run the requested criteria (all by default, in declaration order)."""
    config = config or AcceptanceConfig()
    if only is None:
        selected: Sequence[_Criterion] = CRITERIA
    else:
        slugs = list(only)
        unknown = [s for s in slugs if s not in CRITERIA_BY_SLUG]
        if unknown:
            known = ", ".join(c.slug for c in CRITERIA)
            raise ValidationError(
                f"unknown criteria {unknown}; known criteria: {known}"
            )
        selected = [CRITERIA_BY_SLUG[s] for s in slugs]
    return [run_criterion(c, config) for c in selected]


def format_report(results: Sequence[CriterionResult]) -> str:
    lines = []
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        lines.append(f"{status} {res.slug} ({res.seconds:.2f}s): {res.detail}")
    failed = sum(1 for r in results if not r.passed)
    lines.append(
        f"{len(results) - failed}/{len(results)} criteria passed"
        + (f", {failed} FAILED" if failed else "")
    )
    return "\n".join(lines)


def suite_report_json(results: Sequence[CriterionResult]) -> dict:
    return {
        "criteria": [
            {
                "slug": r.slug,
                "description": r.description,
                "passed": r.passed,
                "detail": r.detail,
                "seconds": round(r.seconds, 3),
            }
            for r in results
        ],
        "passed": all(r.passed for r in results),
    }
