"""Measures: exact moments, Cauchy transforms, truncation, JSON."""

from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freemoments.cumulants import CumulantSequence, moments_from_free_cumulants
from freemoments.errors import (
    DomainError,
    MomentDoesNotExistError,
    UnsupportedOperationError,
    ValidationError,
)
from freemoments.measures import (
    Measure,
    Window,
    cauchy_transform,
    cauchy_transform_derivative,
    cauchy_transform_exact,
    measure_from_json,
    measure_to_json,
    moments,
    numeric_moment,
    truncate_measure,
)

F = Fraction


@pytest.fixture(autouse=True)
def _enough_digits():
    # reference values below are computed inline; keep them well above the
    # precision the library itself is asked for
    with mp.workdps(40):
        yield


# ---------------------------------------------------------------- validation


def test_discrete_sorted_and_mass():
    mu = Measure.discrete([(2, "1/3"), (-1, F(2, 3))])
    assert mu.atoms == ((F(-1), F(2, 3)), (F(2), F(1, 3)))
    assert mu.mass == 1


def test_discrete_rejects_duplicates_and_bad_weights():
    with pytest.raises(ValidationError):
        Measure.discrete([(1, 1), (1, 2)])
    with pytest.raises(ValidationError):
        Measure.discrete([(0, 0)])
    with pytest.raises(ValidationError):
        Measure.discrete([(0, -1)])


def test_floats_rejected_everywhere():
    with pytest.raises(ValidationError):
        Measure.discrete([(0.5, 1)])
    with pytest.raises(ValidationError):
        Measure.semicircle(center=0.0, radius=2)
    with pytest.raises(ValidationError):
        Measure.semicircle(mass=1.5)


def test_density_param_validation():
    with pytest.raises(ValidationError):
        Measure(kind="density", density="gaussian", params=(("s", 1),))
    with pytest.raises(ValidationError):
        Measure.semicircle(radius=0)
    with pytest.raises(ValidationError):
        Measure.marchenko_pastur(rate="1/2")
    with pytest.raises(ValidationError):
        Measure.uniform(1, 1)
    with pytest.raises(ValidationError):
        Measure.cauchy(scale=0)
    with pytest.raises(ValidationError):
        Measure(kind="blob")


def test_support_radius():
    assert Measure.semicircle(1, 2).support_radius() == 3
    assert Measure.uniform(-3, 1).support_radius() == 3
    assert Measure.cauchy().support_radius() is None
    assert Measure.discrete([(-5, 1), (2, 1)]).support_radius() == 5
    r = Measure.marchenko_pastur(1).support_radius()
    assert abs(r - 4) < mp.mpf(10) ** -20


def test_scaled():
    mu = Measure.semicircle(0, 2).scaled(3)
    assert mu.mass == 3
    assert moments(mu, 2)[2] == 3
    nu = Measure.dirac(2).scaled("1/2")
    assert nu.atoms == ((F(2), F(1, 2)),)
    with pytest.raises(ValidationError):
        mu.scaled(0)


# ------------------------------------------------------------------- moments


def test_semicircle_moments_are_catalan():
    m = moments(Measure.semicircle(0, 2), 8)
    assert m.values == (0, 1, 0, 2, 0, 5, 0, 14)


def test_mp_moments_rate_one_are_catalan():
    m = moments(Measure.marchenko_pastur(1), 6)
    assert m.values == (1, 2, 5, 14, 42, 132)


def test_mp_moments_rate_two():
    assert moments(Measure.marchenko_pastur(2), 3).values == (2, 6, 22)


def test_mp_moments_match_constant_free_cumulants():
    # this law is the one whose free cumulants are all equal to the rate
    for rate in (F(1), F(2), F(7, 4)):
        k = CumulantSequence((rate,) * 8, kind="free")
        assert moments(Measure.marchenko_pastur(rate), 8) == moments_from_free_cumulants(k)


def test_semicircle_matches_quadratic_free_cumulants():
    k = CumulantSequence((F(1), F(9, 4), 0, 0, 0, 0), kind="free")
    assert moments(Measure.semicircle(1, 3), 6) == moments_from_free_cumulants(k)


def test_uniform_moments():
    m = moments(Measure.uniform(0, 1), 4)
    assert m.values == (F(1, 2), F(1, 3), F(1, 4), F(1, 5))


def test_discrete_moments():
    m = moments(Measure.discrete([(-1, "1/2"), (1, "1/2")]), 4)
    assert m.values == (0, 1, 0, 1)


def test_cauchy_moments_do_not_exist():
    with pytest.raises(MomentDoesNotExistError):
        moments(Measure.cauchy(), 1)
    assert moments(Measure.cauchy(), 0).p == 0


@pytest.mark.parametrize(
    "mu",
    [
        Measure.semicircle(0, 2),
        Measure.semicircle(-1, "3/2"),
        Measure.marchenko_pastur(1),
        Measure.marchenko_pastur("5/2"),
        Measure.uniform("-1/2", 3),
    ],
    ids=["sc", "sc-shift", "mp1", "mp52", "unif"],
)
def test_closed_moments_match_quadrature(mu):
    exact = moments(mu, 8)
    for k in range(1, 9):
        num = numeric_moment(mu, k, dps=30)
        target = mp.mpf(exact[k].numerator) / exact[k].denominator
        assert abs(num - target) <= 1e-10 * (1 + abs(target))


# ---------------------------------------------------------- Cauchy transform


def close(a, b, tol):
    return abs(a - b) <= tol


def test_dirac_transform():
    g = cauchy_transform(Measure.dirac(0), 1j)
    assert close(g, mp.mpc(0, -1), 1e-25)


def test_cauchy_density_transform():
    # 1/(z + i*scale) up to centering
    mu = Measure.cauchy(0, 1)
    for y in (1, 2, 10):
        g = cauchy_transform(mu, mp.mpc(0, y))
        assert close(g, mp.mpc(0, -1) / (y + 1), 1e-25)
    g = cauchy_transform(Measure.cauchy(2, "1/2"), mp.mpc(1, 1))
    assert close(g, 1 / mp.mpc(-1, mp.mpf(3) / 2), 1e-25)


def test_semicircle_transform_pinned():
    mu = Measure.semicircle(0, 2)
    g = cauchy_transform(mu, mp.mpc(0, 2), dps=30)
    assert close(g, mp.mpc(0, 1) * (1 - mp.sqrt(2)), 1e-12)
    g3 = cauchy_transform(mu, 3, dps=30)
    assert close(g3, (3 - mp.sqrt(5)) / 2, 1e-25)
    assert abs(g3.imag) == 0


def test_semicircle_transform_vs_quadrature():
    # closed form against direct integration of the density
    mu = Measure.semicircle("1/2", 3, mass="2/3")
    for z in (mp.mpc(0, 1), mp.mpc(2, 0.25), mp.mpc(-4, 5), mp.mpc(7, 0)):
        closed = cauchy_transform(mu, z, dps=30)
        with mp.workdps(45):
            r = mp.mpf(3)
            c = mp.mpf(1) / 2

            def f(theta):
                x = c + r * mp.sin(theta)
                return 2 / mp.pi * mp.cos(theta) ** 2 / (z - x)

            direct = mp.mpf(2) / 3 * mp.quad(f, [-mp.pi / 2, mp.pi / 2])
        assert close(closed, direct, 1e-25)


def test_mp_transform_vs_closed_form():
    # (z + 1 - rate - sqrt(z-a) sqrt(z-b)) / (2 z)
    for rate_q in (F(1), F(2), F(5, 2)):
        mu = Measure.marchenko_pastur(rate_q)
        rate = mp.mpf(rate_q.numerator) / rate_q.denominator
        a, b = (1 - mp.sqrt(rate)) ** 2, (1 + mp.sqrt(rate)) ** 2
        for z in (mp.mpc(2, 1), mp.mpc(-1, 0.5), mp.mpc(0, 3), b + 2):
            want = (z + 1 - rate - mp.sqrt(z - a) * mp.sqrt(z - b)) / (2 * z)
            got = cauchy_transform(mu, z, dps=30)
            assert close(got, want, 1e-20)


def test_uniform_transform_vs_log_oracle():
    mu = Measure.uniform(-1, 2)
    for z in (mp.mpc(0, 1), mp.mpc(3, 2), mp.mpc(-5, "0.1")):
        want = (mp.log(z + 1) - mp.log(z - 2)) / 3
        got = cauchy_transform(mu, z, dps=30)
        assert close(got, want, 1e-20)


def test_herglotz_sign_on_grid():
    candidates = [
        Measure.semicircle(0, 2),
        Measure.marchenko_pastur(2),
        Measure.uniform(0, 1),
        Measure.cauchy(),
        Measure.discrete([(-1, 1), (3, "1/2")]),
    ]
    points = [mp.mpc(x, y) for x in (-2, 0, 0.5, 3) for y in (0.25, 1, 10)]
    for mu in candidates:
        for z in points:
            assert cauchy_transform(mu, z).imag < 0


def test_mass_recovered_at_infinity():
    for mu in (
        Measure.semicircle(0, 2),
        Measure.marchenko_pastur(2),
        Measure.cauchy(),
        Measure.discrete([(-1, 2), (5, 1)]),
        Measure.semicircle(0, 2, mass="7/2"),
    ):
        m1 = 0 if mu.density == "cauchy" else float(moments(mu, 1)[1])
        for y in (1e2, 1e3, 1e4):
            val = mp.mpc(0, y) * cauchy_transform(mu, mp.mpc(0, y))
            assert abs(val - float(mu.mass)) <= 10 * (1 + abs(m1)) / y


def test_lower_half_plane_reflection():
    # compactly supported: G(conj z) = conj G(z), reachable outside the disk
    mu = Measure.semicircle(0, 2)
    z = mp.mpc(3, -1)
    assert close(cauchy_transform(mu, z), mp.conj(cauchy_transform(mu, mp.conj(z))), 1e-25)


def test_domain_errors():
    mu = Measure.semicircle(0, 2)
    with pytest.raises(DomainError):
        cauchy_transform(mu, mp.mpc(0, -1))  # inside the disk, lower half
    with pytest.raises(DomainError):
        cauchy_transform(mu, 1)  # real, inside the disk
    with pytest.raises(DomainError):
        cauchy_transform(Measure.cauchy(), mp.mpc(5, -1))  # no escape region
    with pytest.raises(DomainError):
        cauchy_transform(Measure.dirac(2), 2)  # at the atom


def test_derivative_discrete_exact_form():
    mu = Measure.discrete([(-1, "1/2"), (2, "3/2")])
    z = mp.mpc(1, 1)
    want = -mp.mpf(1) / 2 * (z + 1) ** -2 - mp.mpf(3) / 2 * (z - 2) ** -2
    assert close(cauchy_transform_derivative(mu, z), want, 1e-25)


@pytest.mark.parametrize(
    "mu",
    [
        Measure.semicircle(0, 2),
        Measure.marchenko_pastur(2),
        Measure.uniform(-1, 2),
        Measure.cauchy(1, 2),
    ],
    ids=["sc", "mp", "unif", "cauchy"],
)
def test_derivative_matches_difference_quotient(mu):
    z = mp.mpc(0.5, 1.5)
    with mp.workdps(40):
        h = mp.mpf(10) ** -10
        diff = (
            cauchy_transform(mu, z + h, dps=40) - cauchy_transform(mu, z - h, dps=40)
        ) / (2 * h)
    got = cauchy_transform_derivative(mu, z, dps=40)
    assert close(got, diff, 1e-15)


@given(
    atoms=st.lists(
        st.tuples(
            st.integers(min_value=-5, max_value=5),
            st.fractions(min_value=F(1, 4), max_value=F(3)),
        ),
        min_size=1,
        max_size=4,
        unique_by=lambda a: a[0],
    ),
    re=st.fractions(min_value=F(-3), max_value=F(3)),
    im=st.fractions(min_value=F(1, 2), max_value=F(4)),
)
@settings(max_examples=60, deadline=None)
def test_exact_discrete_transform_matches_mpc(atoms, re, im):
    mu = Measure.discrete(atoms)
    ere, eim = cauchy_transform_exact(mu, re, im)
    g = cauchy_transform(mu, (str(re), str(im)), dps=35)
    target = mp.mpc(mp.mpf(ere.numerator) / ere.denominator, mp.mpf(eim.numerator) / eim.denominator)
    assert close(g, target, 1e-28)
    assert eim < 0


def test_exact_transform_needs_discrete():
    with pytest.raises(UnsupportedOperationError):
        cauchy_transform_exact(Measure.semicircle(0, 2), F(0), F(1))


# ---------------------------------------------------------------- truncation


def test_truncate_half_open():
    mu = Measure.discrete([(0, 1), (1, 2), (2, 3)])
    out = truncate_measure(mu, Window(lo=1, hi=2))
    assert out.atoms == ((F(1), F(2)),)


def test_truncate_open_ray():
    mu = Measure.discrete([(1, 1), (2, 1)])
    out = truncate_measure(mu, Window(lo=1, lo_closed=False))
    assert out.atoms == ((F(2), F(1)),)


def test_truncate_closed_endpoints():
    mu = Measure.discrete([(0, 1), (5, 1)])
    out = truncate_measure(mu, Window(lo=0, hi=5, hi_closed=True))
    assert out.mass == 2


def test_truncate_to_empty_and_density_rejected():
    mu = Measure.discrete([(0, 1)])
    out = truncate_measure(mu, Window(lo=1))
    assert out.atoms == () and out.mass == 0
    with pytest.raises(UnsupportedOperationError):
        truncate_measure(Measure.semicircle(0, 2), Window())
    with pytest.raises(ValidationError):
        Window(lo=2, hi=1)


@given(
    atoms=st.lists(
        st.tuples(
            st.integers(min_value=-6, max_value=6),
            st.fractions(min_value=F(1, 3), max_value=F(2)),
        ),
        min_size=1,
        max_size=5,
        unique_by=lambda a: a[0],
    ),
    cut=st.integers(min_value=-6, max_value=6),
)
@settings(max_examples=50, deadline=None)
def test_truncation_splits_mass(atoms, cut):
    mu = Measure.discrete(atoms)
    left = truncate_measure(mu, Window(hi=cut, hi_closed=False))
    right = truncate_measure(mu, Window(lo=cut, lo_closed=True))
    assert left.mass + right.mass == mu.mass


# ---------------------------------------------------------------------- JSON


def test_json_round_trip_discrete():
    mu = Measure.discrete([("-1/3", "1/2"), (4, "1/2")])
    data = measure_to_json(mu)
    assert data == {"kind": "discrete", "atoms": [["-1/3", "1/2"], ["4", "1/2"]]}
    assert measure_from_json(data) == mu


def test_json_round_trip_density():
    mu = Measure.marchenko_pastur("3/2", mass=2)
    data = measure_to_json(mu)
    assert data == {
        "kind": "density",
        "name": "marchenko_pastur",
        "params": {"rate": "3/2"},
        "mass": "2",
    }
    assert measure_from_json(data) == mu


def test_json_rejects_floats_and_junk():
    with pytest.raises(ValidationError):
        measure_from_json({"kind": "discrete", "atoms": [[0.5, 1]]})
    with pytest.raises(ValidationError):
        measure_from_json({"kind": "discrete", "atoms": [[1, 1]], "mass": "2"})
    with pytest.raises(ValidationError):
        measure_from_json({"kind": "density", "name": "semicircle"})
    with pytest.raises(ValidationError):
        measure_from_json(["not", "a", "measure"])
    with pytest.raises(ValidationError):
        measure_from_json({"kind": "spectral"})
