"""Random-matrix sampling against exact moment predictions."""

from fractions import Fraction

import numpy as np
import pytest

from freemoments.cumulants import MomentSequence
from freemoments.errors import BudgetError, ValidationError
from freemoments.levy import LevyPair, moments_of_free_id, shifted_poisson_parameters
from freemoments.measures import Measure
from freemoments.rmt import (
    MatrixEnsembleSpec,
    MomentEstimate,
    compare_to_prediction,
    ensemble_spec_from_json,
    ensemble_spec_to_json,
    haar_unitary,
    predicted_moments,
    sample_matrix,
    sample_trace_moments,
)

F = Fraction


def bernoulli_diag(dim: int, **kw) -> MatrixEnsembleSpec:
    return MatrixEnsembleSpec(
        kind="deterministic",
        dim=dim,
        measure=Measure.discrete([(-1, "1/2"), (1, "1/2")]),
        **kw,
    )


# --------------------------------------------------------------------- basics


def test_spec_validation():
    with pytest.raises(ValidationError):
        MatrixEnsembleSpec(kind="goe", dim=10)
    with pytest.raises(ValidationError):
        MatrixEnsembleSpec(kind="gue", dim=0)
    with pytest.raises(ValidationError):
        MatrixEnsembleSpec(kind="gue", dim=10, trials=0)
    with pytest.raises(ValidationError):
        MatrixEnsembleSpec(kind="gue", dim=10, seed=-1)
    with pytest.raises(ValidationError):
        MatrixEnsembleSpec(kind="wishart", dim=10)  # rate missing
    with pytest.raises(ValidationError):
        MatrixEnsembleSpec(kind="gue", dim=10, rate=2)
    with pytest.raises(ValidationError):
        MatrixEnsembleSpec(kind="deterministic", dim=10, measure=Measure.semicircle(0, 2))
    with pytest.raises(ValidationError):
        MatrixEnsembleSpec(
            kind="free_sum",
            dim=10,
            parts=(bernoulli_diag(10), bernoulli_diag(12)),
        )
    with pytest.raises(ValidationError):
        MatrixEnsembleSpec(kind="gue", dim=10, scale=0.5)


def test_wishart_columns_rounding():
    assert MatrixEnsembleSpec(kind="wishart", dim=10, rate=2).wishart_columns() == 20
    assert MatrixEnsembleSpec(kind="wishart", dim=10, rate="3/2").wishart_columns() == 15
    assert MatrixEnsembleSpec(kind="wishart", dim=7, rate="1/5").wishart_columns() == 1
    # half-up at .5
    assert MatrixEnsembleSpec(kind="wishart", dim=2, rate="5/4").wishart_columns() == 3


def test_haar_unitary_is_unitary():
    rng = np.random.default_rng(11)
    u = haar_unitary(40, rng)
    assert np.allclose(u @ u.conj().T, np.eye(40), atol=1e-10)


def test_haar_trace_statistics():
    # for Haar, E tr U = 0 and E |tr U|^2 = 1 independent of n
    rng = np.random.default_rng(5)
    traces = np.array([np.trace(haar_unitary(25, rng)) for _ in range(400)])
    assert abs(traces.mean()) < 0.15
    assert 0.75 < np.mean(np.abs(traces) ** 2) < 1.3


def test_sample_matrix_is_hermitian():
    rng = np.random.default_rng(0)
    for spec in (
        MatrixEnsembleSpec(kind="gue", dim=30),
        MatrixEnsembleSpec(kind="wishart", dim=30, rate=2),
        bernoulli_diag(30),
        MatrixEnsembleSpec(
            kind="free_sum", dim=30, parts=(bernoulli_diag(30), bernoulli_diag(30))
        ),
        MatrixEnsembleSpec(kind="gue", dim=30, scale="1/2", shift=-3),
    ):
        h = sample_matrix(spec, rng)
        assert h.shape == (30, 30)
        assert np.allclose(h, h.conj().T)


# -------------------------------------------------------------- reproducibility


def test_same_seed_same_estimate():
    spec = MatrixEnsembleSpec(kind="gue", dim=40, trials=6, seed=123)
    a = sample_trace_moments(spec, 4)
    b = sample_trace_moments(spec, 4)
    assert a.per_trial == b.per_trial


def test_trial_prefix_is_stable():
    # trial i only depends on (seed, i): adding trials never changes old ones
    few = sample_trace_moments(
        MatrixEnsembleSpec(kind="gue", dim=40, trials=3, seed=9), 4
    )
    many = sample_trace_moments(
        MatrixEnsembleSpec(kind="gue", dim=40, trials=8, seed=9), 4
    )
    assert many.per_trial[:3] == few.per_trial


def test_different_seeds_differ():
    a = sample_trace_moments(MatrixEnsembleSpec(kind="gue", dim=40, trials=2, seed=1), 2)
    b = sample_trace_moments(MatrixEnsembleSpec(kind="gue", dim=40, trials=2, seed=2), 2)
    assert a.per_trial != b.per_trial


# ------------------------------------------------------------------ estimates


def test_deterministic_moments_are_exact():
    spec = bernoulli_diag(100)
    est = sample_trace_moments(spec, 4)
    assert est.means == (0.0, 1.0, 0.0, 1.0)
    assert est.stderrs == (0.0, 0.0, 0.0, 0.0)
    report = compare_to_prediction(est, predicted_moments(spec, 4))
    assert all(r["within"] for r in report)


def test_deterministic_rounding_warns():
    spec = MatrixEnsembleSpec(
        kind="deterministic",
        dim=100,
        measure=Measure.discrete([(0, "1/3"), (1, "2/3")]),
    )
    with pytest.warns(UserWarning, match="rounded"):
        h = sample_matrix(spec, np.random.default_rng(0))
    assert np.isclose(np.trace(h).real, 67.0)  # largest-remainder split 33/67


def test_gue_matches_semicircle():
    spec = MatrixEnsembleSpec(kind="gue", dim=150, trials=24, seed=42)
    est = sample_trace_moments(spec, 6)
    exact = predicted_moments(spec, 6)
    assert exact.values == (0, 1, 0, 2, 0, 5)
    report = compare_to_prediction(est, exact)
    assert all(r["within"] for r in report)


def test_wishart_matches_constant_cumulant_law():
    spec = MatrixEnsembleSpec(kind="wishart", dim=120, rate=2, trials=24, seed=7)
    est = sample_trace_moments(spec, 5)
    exact = predicted_moments(spec, 5)
    assert exact.values == (2, 6, 22, 90, 394)
    report = compare_to_prediction(est, exact)
    assert all(r["within"] for r in report)


def test_free_sum_matches_free_convolution():
    # two Bernoulli diagonals in free position: the arcsine law
    spec = MatrixEnsembleSpec(
        kind="free_sum",
        dim=150,
        trials=24,
        seed=3,
        parts=(bernoulli_diag(150), bernoulli_diag(150)),
    )
    exact = predicted_moments(spec, 4)
    assert exact.values == (0, 2, 0, 6)
    report = compare_to_prediction(sample_trace_moments(spec, 4), exact)
    assert all(r["within"] for r in report)


def test_affine_prediction_and_sampling_agree():
    base = bernoulli_diag(100)
    spec = MatrixEnsembleSpec(
        kind="deterministic",
        dim=100,
        measure=base.measure,
        scale=3,
        shift="-1/2",
    )
    est = sample_trace_moments(spec, 3)
    exact = predicted_moments(spec, 3)
    # 3 B - 1/2 with B = +-1: moments of {-7/2, 5/2} with equal weight
    assert exact.values == (F(-1, 2), F(37, 4), F(-109, 8))
    for got, want in zip(est.means, exact.values):
        assert abs(got - float(want)) < 1e-9


def test_matched_model_for_free_id_law():
    # the zero-drift pair with a single jump atom has the same law as an
    # affinely mapped wishart matrix; check moments end to end
    pair = LevyPair(0, Measure.discrete([(1, 6)]))
    params = shifted_poisson_parameters(pair)
    assert params == {"scale": 1, "rate": 12, "shift": -6}
    spec = MatrixEnsembleSpec(
        kind="wishart",
        dim=150,
        rate=params["rate"],
        scale=params["scale"],
        shift=params["shift"],
        trials=20,
        seed=99,
    )
    exact = moments_of_free_id(pair, 4)
    assert predicted_moments(spec, 4).values == exact.values
    report = compare_to_prediction(sample_trace_moments(spec, 4), exact)
    assert all(r["within"] for r in report)


def test_estimate_json_shape():
    est = sample_trace_moments(MatrixEnsembleSpec(kind="gue", dim=20, trials=3), 2)
    data = est.to_json()
    assert data["dim"] == 20 and data["trials"] == 3
    assert data["orders"] == [1, 2] and len(data["means"]) == 2


def test_compare_needs_enough_orders():
    est = sample_trace_moments(MatrixEnsembleSpec(kind="gue", dim=20, trials=2), 3)
    with pytest.raises(ValidationError):
        compare_to_prediction(est, MomentSequence((F(0), F(1))))


# --------------------------------------------------------------------- budget


def test_budget_guard():
    spec = MatrixEnsembleSpec(kind="gue", dim=2000, trials=500)
    with pytest.raises(BudgetError):
        sample_trace_moments(spec, 6)
    tiny = MatrixEnsembleSpec(kind="gue", dim=8, trials=2)
    with pytest.raises(BudgetError):
        sample_trace_moments(tiny, 2, budget=10)
    assert sample_trace_moments(tiny, 2, budget=float("inf")).p == 2


# ----------------------------------------------------------------------- JSON


def test_spec_json_round_trip():
    specs = [
        MatrixEnsembleSpec(kind="gue", dim=30, trials=5, seed=2),
        MatrixEnsembleSpec(kind="wishart", dim=30, rate="3/2", scale=2, shift="-1/3"),
        bernoulli_diag(16, trials=2),
        MatrixEnsembleSpec(
            kind="free_sum", dim=12, parts=(bernoulli_diag(12), bernoulli_diag(12))
        ),
    ]
    for spec in specs:
        assert ensemble_spec_from_json(ensemble_spec_to_json(spec)) == spec


def test_spec_json_rejects_junk():
    with pytest.raises(ValidationError):
        ensemble_spec_from_json({"kind": "gue"})
    with pytest.raises(ValidationError):
        ensemble_spec_from_json({"kind": "gue", "dim": 10, "flavor": "mild"})
    with pytest.raises(ValidationError):
        ensemble_spec_from_json([1, 2])


def _matched_spectrum_min(pair: LevyPair, dim: int, trials: int, seed: int) -> float:
    params = shifted_poisson_parameters(pair)
    spec = MatrixEnsembleSpec(
        kind="wishart",
        dim=dim,
        rate=params["rate"],
        scale=params["scale"],
        shift=params["shift"],
        trials=trials,
        seed=seed,
    )
    smallest = float("inf")
    for child in np.random.SeedSequence(seed).spawn(trials):
        h = sample_matrix(spec, np.random.default_rng(child))
        smallest = min(smallest, float(np.linalg.eigvalsh(h).min()))
    return smallest


def test_matched_spectrum_soft_positivity():
    # (0, 6*delta_1): exact support edge 7 - 4*sqrt(3) ~ +0.07, so the
    # sampled spectrum should sit above -0.15 even with finite-size
    # fluctuation below the edge
    smallest = _matched_spectrum_min(LevyPair(0, Measure.discrete([(1, 6)])), 200, 5, 31)
    assert smallest >= -0.15


def test_positive_jumps_do_not_imply_nonnegative_law():
    # (0, delta_1): the exact law has support edge 2 - 2*sqrt(2) ~ -0.83,
    # so a positive jump measure alone does not give a law on [0, inf);
    # the soft positivity check above is scoped to pairs whose exact edge
    # is nonnegative
    smallest = _matched_spectrum_min(LevyPair(0, Measure.discrete([(1, 1)])), 200, 5, 32)
    assert smallest < -0.5
