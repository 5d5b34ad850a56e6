import math

import numpy as np
import pytest
from scipy import linalg

from conftest import GAMMA_I, NA_STATIONARY_F01
from parametric_emission import (
    AccuracyError,
    BromwichConfig,
    ConfigurationError,
    ModelParams,
    ParameterError,
    PoleError,
    coefficient_laplace,
    coefficient_set,
    commutator_check,
    green,
    invert_laplace,
    photon_number_density,
    photon_number_oscillator,
)
from parametric_emission.dynamics import COEFFICIENTS, abscissa, bromwich, photon_density_profile
from parametric_emission.model import coupling_g


def decoupled_propagator(p, t):
    """exp(-i K t) for the z-independent 2x2 generator."""
    k = np.array([[p.delta0, p.f0], [-p.f0, -p.delta0]])
    return linalg.expm(-1j * k * t)


# --- Laplace-domain closed forms -------------------------------------------

def test_alpha_tilde_is_f0_green(rng, unstable):
    for _ in range(10):
        z = complex(rng.uniform(-2, 2), rng.uniform(0.05, 2))
        assert coefficient_laplace("alphaTilde", z, unstable) == pytest.approx(unstable.f0 * green(z, unstable),
                                                                              rel=1e-14)


def test_all_eight_forms(rng):
    p = ModelParams(0.17, 0.13, 0.31, deltaB=0.05)
    z = 0.21 + 0.37j
    d, d2 = 0.3, -0.45
    G = green(z, p)
    from parametric_emission import self_energy

    Q = z + p.delta0 + self_energy(-z, "first", p)
    g, g2 = coupling_g(d, p), coupling_g(d2, p)
    expected = {
        "alpha": G * Q,
        "alphaTilde": p.f0 * G,
        "beta": G * Q * g / (z - d),
        "betaTilde": -p.f0 * G * g / (z + d),
        "A": G * Q * g / (z - d),
        "ATilde": p.f0 * G * g / (z - d),
        "C": G * Q * g * g2 / ((z - d) * (z - d2)),
        "CTilde": -p.f0 * G * g * g2 / ((z - d) * (z + d2)),
    }
    for name in COEFFICIENTS:
        val = coefficient_laplace(name, z, p, delta=d if name not in ("alpha", "alphaTilde") else None,
                                  delta_prime=d2 if name in ("C", "CTilde") else None)
        assert val == pytest.approx(expected[name], rel=1e-13), name


def test_no_drive_kills_pair_terms():
    p = ModelParams(0.2, 0.0, 0.3)
    z = 0.1 + 0.4j
    assert coefficient_laplace("alphaTilde", z, p) == 0
    assert coefficient_laplace("ATilde", z, p, delta=0.3) == 0
    assert coefficient_laplace("CTilde", z, p, delta=0.3, delta_prime=-0.2) == 0


def test_decoupled_reductions():
    p = ModelParams(0.4, 0.2, 0.0)
    z = 0.3 + 0.2j
    for name in ("beta", "betaTilde", "A", "ATilde"):
        assert coefficient_laplace(name, z, p, delta=0.1) == 0
    for name in ("C", "CTilde"):
        assert coefficient_laplace(name, z, p, delta=0.1, delta_prime=0.2) == 0
    assert coefficient_laplace("alpha", z, p) == pytest.approx((z + 0.4) / (z**2 - 0.16 + 0.04), rel=1e-14)


def test_array_frequencies_broadcast():
    p = ModelParams(0.1, 0.2, 0.3)
    d = np.linspace(-0.9, 0.9, 5)
    out = coefficient_laplace("CTilde", 0.2 + 0.3j, p, delta=d[:, None], delta_prime=d[None, :])
    assert out.shape == (5, 5)
    assert out[1, 3] == pytest.approx(coefficient_laplace("CTilde", 0.2 + 0.3j, p, delta=d[1], delta_prime=d[3]))


def test_pole_errors():
    p = ModelParams(0.1, 0.2, 0.3)
    with pytest.raises(PoleError):
        coefficient_laplace("beta", 0.3 + 1e-14j, p, delta=0.3)
    with pytest.raises(PoleError):
        coefficient_laplace("betaTilde", -0.3, p, delta=0.3)
    with pytest.raises(PoleError):
        coefficient_laplace("alpha", 1j * GAMMA_I, ModelParams(0.0, 0.2, 0.3))
    with pytest.raises(ParameterError):
        coefficient_laplace("beta", 0.3j, p)
    with pytest.raises(ParameterError):
        coefficient_laplace("gamma", 0.3j, p)


# --- inversion ---------------------------------------------------------------

def test_initial_conditions(unstable):
    assert invert_laplace("alpha", 0.0, unstable)[0] == pytest.approx(1.0, abs=1e-8)
    assert abs(invert_laplace("alphaTilde", 0.0, unstable)[0]) < 1e-8
    vals, _ = invert_laplace("betaTilde", 0.0, unstable, delta=np.array([-0.5, 0.2]))
    assert np.all(np.abs(vals) < 1e-8)
    cs = coefficient_set([0.0, 1.0], unstable)
    assert cs.alpha[0] == 1 and cs.alphaTilde[0] == 0
    assert np.all(cs.beta[0] == 0) and np.all(cs.betaTilde[0] == 0)


@pytest.mark.parametrize("delta0", [0.0, 0.15, 0.5])
def test_decoupled_matches_matrix_exponential(delta0):
    p = ModelParams(delta0, 0.2, 0.0)
    for t in (0.7, 5.0, 20.0):
        u = decoupled_propagator(p, t)
        a, ea = invert_laplace("alpha", t, p)
        at, eat = invert_laplace("alphaTilde", t, p)
        assert a == pytest.approx(u[0, 0], abs=1e-8 * max(1, abs(u[0, 0])))
        assert at == pytest.approx(u[0, 1], abs=1e-8 * max(1, abs(u[0, 1])))
        assert ea < 1e-6 * max(1, abs(u[0, 0]))


def test_decoupled_squeezing_number():
    p = ModelParams(0.0, 0.2, 0.0)
    for t in (1.0, 10.0, 30.0):
        at, _ = invert_laplace("alphaTilde", t, p)
        assert abs(at) ** 2 == pytest.approx(math.sinh(0.2 * t) ** 2, rel=1e-8)
        assert photon_number_oscillator(t, p) == pytest.approx(math.sinh(0.2 * t) ** 2, rel=1e-8)


def test_stable_alpha_tilde_decays(stable):
    assert abs(invert_laplace("alphaTilde", 300.0, stable)[0]) < 1e-4
    assert abs(invert_laplace("alphaTilde", 300.0, stable)[0]) < abs(invert_laplace("alphaTilde", 50.0, stable)[0])


def test_hermitian_pairing(unstable):
    # transform of alpha(t)* is -conj(alpha_bar(-z*))
    def conj_kernel(z):
        vals = [-np.conj(coefficient_laplace("alpha", -np.conj(x), unstable)) for x in z]
        return np.asarray(vals)[:, None]

    for t in (3.0, 40.0):
        cfg = BromwichConfig()
        eta = cfg.contour_height(unstable, t)
        val, _ = bromwich(conj_kernel, t, eta, 2.0, gap=eta - abscissa(unstable), cfg=cfg)
        ref, _ = invert_laplace("alpha", t, unstable)
        assert val[0] == pytest.approx(np.conj(ref), rel=1e-7)


def test_photon_number_zero_at_start(unstable):
    assert photon_number_oscillator(0.0, unstable) == 0.0
    assert photon_number_density(0.2, 0.0, unstable) == 0.0


def test_density_without_drive():
    p = ModelParams(0.1, 0.0, 0.3)
    assert photon_number_density(0.2, 10.0, p) == pytest.approx(0.0, abs=1e-12)
    assert photon_number_oscillator(10.0, p) == pytest.approx(0.0, abs=1e-12)


def test_density_profile_matches_pointwise(stable):
    d = np.array([-0.6, 0.0, 0.35])
    prof = photon_density_profile(d, 40.0, stable)
    for x, v in zip(d, prof):
        assert v == pytest.approx(photon_number_density(x, 40.0, stable), rel=1e-6)
    assert np.all(prof >= 0)


def test_density_outside_band_rejected(stable):
    with pytest.raises(ParameterError):
        photon_number_density(1.2, 10.0, stable)


def test_growth_slope(unstable):
    t = np.array([100.0, 200.0])
    n = np.array([photon_number_oscillator(x, unstable) for x in t])
    slope = np.diff(np.log(n))[0] / 100.0
    assert slope == pytest.approx(2 * GAMMA_I, rel=0.03)


def test_stationary_plateau(stable):
    assert photon_number_oscillator(300.0, stable) == pytest.approx(NA_STATIONARY_F01, rel=1e-6)


@pytest.mark.parametrize("t", [0.5, 5.0, 50.0])
@pytest.mark.parametrize("which", ["stable", "unstable"])
def test_commutator_conservation(t, which, request):
    p = request.getfixturevalue(which)
    assert abs(commutator_check(t, p)) < 1e-6


def test_coefficient_set_rows(stable):
    cs = coefficient_set([0.0, 10.0, 20.0], stable)
    rows = cs.rows()
    assert len(rows) == 3 and rows[0] == (0.0, 0.0, 0.0, 0.0)
    for t, n_a, n_tot, comm in rows[1:]:
        assert 0 < n_a < n_tot
        assert abs(comm) < 1e-6
    assert cs.beta.shape == (3, cs.deltas.size)


def test_oracle_equivalence(stable, unstable, stable_oracle, unstable_oracle):
    times = np.array([5.0, 40.0, 120.0])
    for p, orc in ((stable, stable_oracle), (unstable, unstable_oracle)):
        lap = coefficient_set(times, p).n_a
        ref = orc.photon_number_oscillator(times)
        assert np.all(np.abs(lap - ref) <= np.maximum(1e-3, 0.01 * ref))


def test_config_validation(unstable):
    with pytest.raises(ConfigurationError):
        BromwichConfig(eta=0.01).contour_height(unstable, 10.0)
    with pytest.raises(ConfigurationError):
        BromwichConfig(eta=-1.0)
    with pytest.raises(ConfigurationError):
        BromwichConfig(atol=0.0, rtol=0.0)
    assert BromwichConfig().contour_height(unstable, 1.0) == pytest.approx(GAMMA_I + 0.5, abs=1e-10)


def test_accuracy_error_carries_estimate(stable):
    with pytest.raises(AccuracyError) as info:
        invert_laplace("alpha", 50.0, stable, BromwichConfig(atol=1e-30, rtol=0.0))
    assert info.value.estimate[0] == pytest.approx(invert_laplace("alpha", 50.0, stable)[0], abs=1e-9)
