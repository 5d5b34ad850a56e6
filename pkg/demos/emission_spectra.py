"""Emission spectra on both sides of the parametric bifurcation.

Below the bifurcation detuning the spectrum has one peak at zero; beyond it
the peak splits in two, following the real parts of the second-sheet poles.
The integrated spectrum equals the photon flux measured far down the chain.
"""
import numpy as np

from parametric_emission import LatticeOracle, ModelParams, emission_spectrum_stationary, photon_flux_stationary
from parametric_emission.emission import second_sheet_poles, stationary_photon_number

GRID = np.linspace(-1.0, 1.0, 2001)

if __name__ == "__main__":
    for d0 in (0.15, 0.3):
        p = ModelParams(d0, 0.2, 0.3)
        spectrum = emission_spectrum_stationary(GRID, p)
        poles = ", ".join(f"{r.z.real:+.4f}{r.z.imag:+.4f}i" for r in second_sheet_poles(p))
        print(f"delta0 = {d0}: N_a = {stationary_photon_number(p):.5f}, peaks at "
              f"{np.round(spectrum.peaks(), 5).tolist()}, second-sheet poles {poles}")

    p = ModelParams(0.0, 0.1, 0.3)
    flux = photon_flux_stationary(p)
    plateau = LatticeOracle(p).flux(np.linspace(150.0, 300.0, 16), 100).mean()
    print(f"\nflux from the spectrum {flux:.6f}, measured on the lattice {plateau:.6f}")
