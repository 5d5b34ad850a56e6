"""Oscillator photon number in the unstable and the stable regime.

The Laplace-inversion backend and the finite-lattice integrator are run side
by side.  Near resonance with f0 = 0.2 the photon number grows like
exp(2 gamma_I t); with f0 = 0.1 it settles at the value predicted by the
stationary formula while the chain keeps filling up linearly in time.
Takes about a minute.
"""
import numpy as np

from parametric_emission import LatticeOracle, ModelParams, coefficient_set, instability_rate
from parametric_emission.emission import stationary_photon_number

TIMES = np.linspace(0.0, 300.0, 7)


def table(p):
    lap = coefficient_set(TIMES, p)
    orc = LatticeOracle(p).photon_number_oscillator(TIMES)
    print(f"{'t':>6} {'N_a laplace':>16} {'N_a lattice':>16} {'N_total':>14}")
    for t, a, b, tot in zip(TIMES, lap.n_a, orc, lap.n_total):
        print(f"{t:6.0f} {a:16.8g} {b:16.8g} {tot:14.6g}")


if __name__ == "__main__":
    unstable = ModelParams(0.0, 0.2, 0.3)
    gamma = instability_rate(unstable)
    print(f"unstable case, gamma_I = {gamma:.8f}")
    table(unstable)
    stable = ModelParams(0.0, 0.1, 0.3)
    print(f"\nstable case, stationary N_a = {stationary_photon_number(stable):.8f}")
    table(stable)
