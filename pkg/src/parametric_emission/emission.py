"""Photon emission observables in the stationary and the unstable regime.

Stationary quantities are band integrals of ``|G(D + i0)|**2``, where ``i0``
is realised as ``i * eps`` with ``eps = 1e-9 B`` and a Richardson step at
``eps / 10``.  The unstable-regime spectrum is estimated from time evolution
and fitted by ``K g(D)**2 / (D**2 + gamma**2)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, interpolate, optimize, signal

from ._quadrature import gauss_legendre_theta
from .analytic import FIRST_SHEET, SECOND_SHEET
from .dynamics import BromwichConfig, _green_parts, photon_density_profile
from .errors import ConvergenceError, HorizonError, ParameterError, RegimeError
from .model import ModelParams, band_nodes, coupling_g_squared
from .oracle import LatticeConfig, LatticeOracle
from .spectral import find_eigenfrequencies, instability_rate, threshold_detuning

EPS_REL = 1e-9
FLUX_AGREEMENT = 1e-8


class SpectrumKind(enum.Enum):
    STATIONARY = "StationaryFormula"
    UNSTABLE = "UnstableLimit"
    ORACLE = "OracleEstimate"


@dataclass(frozen=True)
class Spectrum:
    """Tabulated emission spectrum with its provenance."""

    deltas: np.ndarray
    values: np.ndarray
    kind: SpectrumKind
    params: ModelParams
    flags: frozenset = field(default_factory=frozenset)
    source: str = "formula"

    def rows(self):
        return [(float(d), float(v), self.kind.value) for d, v in zip(self.deltas, self.values)]

    def peaks(self) -> np.ndarray:
        """Local maxima, refined by a parabola through neighbouring samples."""
        v = self.values
        idx, _ = signal.find_peaks(v)
        out = []
        for i in idx:
            x0, x1, x2 = self.deltas[i - 1:i + 2]
            y0, y1, y2 = v[i - 1:i + 2]
            den = (x0 - x1) * (x0 - x2) * (x1 - x2)
            a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den
            b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / den
            out.append(-b / (2 * a) if a < 0 else x1)
        return np.array(out)


def _require_stable(p: ModelParams):
    rate = instability_rate(p)
    if rate is not None:
        raise RegimeError(f"parameters are unstable (growth rate {rate:.6g}); stationary formulas do not apply")


def _oscillatory_flag(p: ModelParams) -> frozenset:
    roots = find_eigenfrequencies(p, FIRST_SHEET)
    if any(abs(r.z.imag) < 1e-9 for r in roots):
        return frozenset({"oscillatory_component_present"})
    return frozenset()


def green_from_above(deltas, p: ModelParams) -> np.ndarray:
    """``G(D + i0)`` on the first sheet, Richardson-extrapolated in ``eps``.

    Raises
    ------
    ConvergenceError
        If the two ``eps`` evaluations disagree by more than ``1e-4``
        relative, i.e. a pole sits on the real axis.  (Square-root edge
        behaviour alone moves ``G`` by far less.)
    """
    d = np.asarray(deltas, dtype=float)
    eps = EPS_REL * p.bandB

    g1 = _green_parts(d + 1j * eps, p)[0]
    g2 = _green_parts(d + 0.1j * eps, p)[0]
    if np.any(np.abs(g1 - g2) > 1e-4 * np.maximum(np.abs(g2), 1e-300)):
        raise ConvergenceError("G(D + i0) does not converge: a pole lies on the real axis")
    return g2 + (g2 - g1) / 9.0


def stationary_photon_number(p: ModelParams, *, rtol: float = 1e-12, max_nodes: int = 1 << 16) -> float:
    """Long-time oscillator photon number ``f0**2 int g**2 |G(D + i0)|**2 dD``.

    Chebyshev quadrature in ``theta``; the node count doubles until two
    successive estimates agree to ``rtol``.
    """
    _require_stable(p)
    if p.f0 == 0 or p.g0 == 0:
        return 0.0
    n = 128
    prev = None
    while n <= max_nodes:
        nodes, w = band_nodes(p, n)
        val = p.f0**2 * float(w @ np.abs(green_from_above(nodes, p)) ** 2)
        if prev is not None and abs(val - prev) <= rtol * abs(val):
            return val
        prev = val
        n *= 2
    raise ConvergenceError("stationary photon number did not converge")


def _spectrum_values(d, p):
    d = np.asarray(d, dtype=float)
    weight = coupling_g_squared(d, p) * coupling_g_squared(-d, p)
    out = np.zeros(d.shape)
    inside = weight > 0
    if np.any(inside):
        out[inside] = 2 * math.pi * p.f0**2 * weight[inside] * np.abs(green_from_above(d[inside], p)) ** 2
    return out


def emission_spectrum_stationary(deltas, p: ModelParams) -> Spectrum:
    """``F(D) = 2 pi f0**2 g(D)**2 g(-D)**2 |G(D + i0)|**2`` on ``deltas``."""
    _require_stable(p)
    d = np.asarray(deltas, dtype=float)
    return Spectrum(d, _spectrum_values(d, p), SpectrumKind.STATIONARY, p, _oscillatory_flag(p))


def _pair_window(p: ModelParams) -> float:
    """Half-width of the frequency window where both pair partners fit in the band."""
    return max(0.0, p.bandB - abs(p.deltaB))


def photon_flux_stationary(p: ModelParams, *, return_both: bool = False):
    """Constant part of the emitted flux, ``int F(D) dD``.

    Computed twice: with Gauss-Legendre nodes in ``D = W cos(theta)`` and with
    adaptive quadrature in ``D``.

    Raises
    ------
    ConvergenceError
        If the two evaluations differ by more than ``1e-8`` relative.
    """
    _require_stable(p)
    half = _pair_window(p)
    if p.f0 == 0 or p.g0 == 0 or half == 0:
        return (0.0, 0.0) if return_both else 0.0
    n = 256
    prev = None
    while True:
        th, w = gauss_legendre_theta(n)
        theta_val = float(w @ (_spectrum_values(half * np.cos(th), p) * half * np.sin(th)))
        if prev is not None and abs(theta_val - prev) <= 1e-13 * abs(theta_val):
            break
        prev = theta_val
        n *= 2
        if n > 1 << 15:
            break
    direct, _ = integrate.quad(lambda x: float(_spectrum_values(np.array([x]), p)[0]), -half, half,
                               epsabs=0.0, epsrel=1e-12, limit=1000)
    if abs(theta_val - direct) > FLUX_AGREEMENT * abs(theta_val):
        raise ConvergenceError(f"flux evaluations disagree: {theta_val!r} vs {direct!r}")
    return (theta_val, direct) if return_both else theta_val


def lorentzian_fit(deltas, values, p: ModelParams, gamma0: float, centre: float = 0.0):
    """Fit ``K g(D)**2 / ((D - centre)**2 + gamma**2)`` in log space; returns ``(gamma, K)``."""
    d = np.asarray(deltas, dtype=float)
    v = np.asarray(values, dtype=float)
    g2 = coupling_g_squared(d, p)
    mask = (v > 0) & (g2 > 0)
    if mask.sum() < 3:
        raise ConvergenceError("not enough positive samples for the Lorentzian fit")
    d, v, g2 = d[mask], v[mask], g2[mask]

    def resid(x):
        log_k, gam = x
        return log_k + np.log(g2) - np.log((d - centre) ** 2 + gam**2) - np.log(v)

    k0 = math.log(v.max() / g2[np.argmax(v)] * gamma0**2)
    sol = optimize.least_squares(resid, [k0, gamma0], x_scale=[1.0, gamma0])
    if not sol.success:
        raise ConvergenceError(f"Lorentzian fit failed: {sol.message}")
    return abs(float(sol.x[1])), math.exp(sol.x[0])


def _density(deltas, t, p, backend, lattice, bromwich):
    if backend == "oracle":
        oracle = LatticeOracle(p, lattice)
        if t > oracle.horizon:
            raise HorizonError(f"t={t} exceeds the reflection horizon {oracle.horizon:.1f}")
        omega, dens = oracle.mode_density(t)
        return interpolate.CubicSpline(omega, dens)(deltas)
    if backend == "laplace":
        return photon_density_profile(deltas, t, p, bromwich)
    raise ParameterError(f"unknown backend {backend!r}")


def emission_spectrum_unstable(deltas, p: ModelParams, t_probe: float = 200.0, *,
                               backend: str = "oracle", lattice: LatticeConfig = LatticeConfig(),
                               bromwich: Optional[BromwichConfig] = None, fit_window: float = 5.0):
    """Exponentially growing part of the emission, ``density * exp(-2 gamma_I t)``.

    Returns ``(Spectrum, gamma_fit)`` where the Lorentzian width is fitted
    over ``|D - centre| < fit_window * gamma_I``.

    Raises
    ------
    RegimeError
        For stable parameters.
    HorizonError
        If ``t_probe`` lies beyond the lattice's reflection horizon.
    """
    pole = growing_pole(p)
    if pole is None:
        raise RegimeError("emission_spectrum_unstable needs unstable parameters")
    gamma, centre = pole.imag, pole.real
    d = np.asarray(deltas, dtype=float)
    dens = _density(d, t_probe, p, backend, lattice, bromwich)
    values = np.clip(dens, 0.0, None) * math.exp(-2 * gamma * t_probe)
    spectrum = Spectrum(d, values, SpectrumKind.UNSTABLE, p, frozenset(), backend)
    window = np.abs(d - centre) < fit_window * gamma
    gamma_fit, _ = lorentzian_fit(d[window], values[window], p, gamma, centre)
    return spectrum, gamma_fit


def emission_spectrum_from_dynamics(deltas, p: ModelParams, t: float, *, backend: str = "oracle",
                                    lattice: LatticeConfig = LatticeConfig(),
                                    bromwich: Optional[BromwichConfig] = None) -> Spectrum:
    """Finite-time estimate ``density(D, t) / t`` of the stationary spectrum."""
    _require_stable(p)
    if not t > 0:
        raise ParameterError("t must be positive")
    d = np.asarray(deltas, dtype=float)
    dens = _density(d, t, p, backend, lattice, bromwich)
    return Spectrum(d, np.clip(dens, 0.0, None) / t, SpectrumKind.ORACLE, p, _oscillatory_flag(p), backend)


def growing_pole(p: ModelParams) -> Optional[complex]:
    """First-sheet eigenfrequency with the largest positive imaginary part."""
    rate = instability_rate(p)
    if rate is None:
        return None
    roots = [r.z for r in find_eigenfrequencies(p, FIRST_SHEET) if r.z.imag > 0]
    return max(roots, key=lambda z: (z.imag, -abs(z.real)))


def second_sheet_poles(p: ModelParams):
    """Second-sheet eigenfrequencies in the lower half plane (resonances)."""
    return [r for r in find_eigenfrequencies(p, SECOND_SHEET) if r.z.imag < 0]


def summary(p: ModelParams) -> dict:
    """Headline numbers: stationary photon number, flux, growth rate, threshold."""
    gamma = instability_rate(p)
    stable = gamma is None
    return {
        "n_a_stationary": stationary_photon_number(p) if stable else None,
        "flux": photon_flux_stationary(p) if stable else None,
        "gamma_I": gamma,
        "threshold": threshold_detuning(p),
    }
