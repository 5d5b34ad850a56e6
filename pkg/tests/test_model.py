import math

import numpy as np
import pytest
from scipy import integrate

from parametric_emission import ConfigurationError, ModelParams, ParameterError
from parametric_emission.model import (
    band_nodes,
    coupling_g,
    coupling_g_squared,
    dispersion_omega_k,
    from_band_units,
    rest_frame_energy,
)


def test_coupling_at_band_centre():
    p = ModelParams(0.0, 0.2, 0.3)
    assert coupling_g(0.0, p) == pytest.approx(0.3 * math.sqrt(2 / math.pi), rel=1e-15)
    assert coupling_g(0.0, p) == pytest.approx(0.23937, abs=1e-5)


@pytest.mark.parametrize("edge", [-1.0, 1.0])
def test_coupling_vanishes_at_edges(edge):
    p = ModelParams(0.0, 0.2, 0.3)
    assert coupling_g(edge, p) == 0.0
    assert coupling_g(edge * (1 + 1e-16), p) == 0.0


def test_coupling_zero_outside_band():
    p = ModelParams(0.0, 0.2, 0.3, deltaB=0.4)
    assert np.all(coupling_g(np.array([-0.61, 1.41, 5.0]), p) == 0.0)


def test_coupling_continuous_at_edge():
    p = ModelParams(0.0, 0.2, 0.3)
    assert coupling_g(1 - 1e-12, p) < 1e-3


def test_coupling_squared_integrates_to_g0_squared():
    p = ModelParams(0.0, 0.2, 0.37, bandB=1.3, deltaB=-0.2)
    val, _ = integrate.quad(lambda d: coupling_g(d, p) ** 2, -1.5, 1.1, epsabs=1e-13, limit=200)
    assert val == pytest.approx(p.g0**2, rel=1e-9)
    assert coupling_g_squared(0.3, p) == pytest.approx(coupling_g(0.3, p) ** 2, rel=1e-14)


def test_coupling_even_about_band_centre(rng):
    p = ModelParams(0.0, 0.2, 0.3, deltaB=0.25)
    x = rng.uniform(0, 1, 50)
    assert np.allclose(coupling_g(p.deltaB + x, p), coupling_g(p.deltaB - x, p), rtol=1e-14)


def test_dispersion_values():
    p = ModelParams(0.0, 0.2, 0.3)
    assert dispersion_omega_k(math.pi / 2, p) == pytest.approx(0.0, abs=1e-16)
    assert dispersion_omega_k(2 * math.pi / 3, p) == pytest.approx(0.5, rel=1e-15)
    assert dispersion_omega_k(1e-9, p) == pytest.approx(-1.0, abs=1e-15)
    k = np.linspace(0.01, 3.13, 200)
    assert np.all(np.diff(dispersion_omega_k(k, p)) > 0)


@pytest.mark.parametrize("k", [0.0, math.pi, -0.1, 4.0])
def test_dispersion_domain(k):
    with pytest.raises(ParameterError):
        dispersion_omega_k(k, ModelParams(0.0, 0.2, 0.3))


def test_mode_measure_identity():
    # with D = omega_k, int_0^pi g(omega_k)^2 B sin k dk = int g^2 dD
    p = ModelParams(0.0, 0.2, 0.3, deltaB=0.1)
    lhs, _ = integrate.quad(lambda k: coupling_g(dispersion_omega_k(k, p), p) ** 2 * p.bandB * math.sin(k),
                            1e-12, math.pi - 1e-12, epsabs=1e-14)
    assert lhs == pytest.approx(p.g0**2, rel=1e-9)


def test_rest_frame_energy():
    p = ModelParams(0.0, 0.2, 0.3, omegaDrive=2.0)
    assert rest_frame_energy(0.0, p) == 0.0
    assert rest_frame_energy(4.0, p) == 4.0
    with pytest.raises(ConfigurationError):
        rest_frame_energy(1.0, ModelParams(0.0, 0.2, 0.3))


def test_rest_frame_energy_from_lattice_numbers(stable_oracle, stable):
    from parametric_emission import photon_numbers

    n_total = photon_numbers(stable_oracle.state(20.0, full=True))[2]
    p = stable.replace(omegaDrive=2.0)
    assert rest_frame_energy(n_total, p) == pytest.approx(n_total)


def test_invalid_parameters():
    with pytest.raises(ParameterError):
        ModelParams(0.0, 0.2, 0.3, bandB=0.0)
    with pytest.raises(ParameterError):
        ModelParams(0.0, -0.1, 0.3)
    with pytest.raises(ParameterError):
        ModelParams(0.0, 0.1, -0.3)
    with pytest.raises(ParameterError):
        ModelParams(float("nan"), 0.1, 0.3)


def test_unit_round_trip():
    p = ModelParams(0.37, 0.11, 0.29, bandB=2.5, deltaB=-0.3, omegaDrive=7.0)
    scaled, s = p.in_band_units()
    assert scaled.bandB == 1.0
    assert from_band_units(scaled, s) == p


def test_dict_round_trip():
    p = ModelParams(0.1, 0.2, 0.3, deltaB=0.05)
    d = p.to_dict()
    assert "omegaDrive" not in d
    assert ModelParams.from_dict(d) == p
    assert ModelParams.from_dict({k: str(v) for k, v in d.items()}) == p
    with pytest.raises(ConfigurationError):
        ModelParams.from_dict({"delta0": 0, "f0": 0.1, "g0": 0.3, "bogus": 1})


def test_band_nodes_exact_for_polynomials():
    p = ModelParams(0.0, 0.2, 0.3, bandB=0.8, deltaB=0.2)
    nodes, w = band_nodes(p, 20)
    ref, _ = integrate.quad(lambda d: coupling_g_squared(d, p) * d**5, -0.6, 1.0, epsabs=1e-15)
    assert float(w @ nodes**5) == pytest.approx(ref, rel=1e-12)
