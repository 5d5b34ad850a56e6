"""Finite-lattice reference integrator.

The continuum is replaced by a chain of ``N`` sites with hopping ``-B/2``
and on-site energy ``deltaB``; the oscillator couples to site 1 with ``g0``.
Operators are ordered ``X = (a, b_1..b_N, a^dagger, b_1^dagger..b_N^dagger)``
and obey ``i dX/dt = K X`` with

    K = [[H, F], [-F, -H]],   F = diag(f0, 0, ..., 0).

A Heisenberg operator ``O(t) = sum_j c_j(t) X_j`` therefore has coefficient
row ``c(t) = c(0) exp(-i K t)``.  Vacuum expectations only involve the
creation-operator columns of these rows.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse

from .errors import HorizonError, ParameterError
from .model import ModelParams

_EIGEN_RECON_TOL = 1e-8


class Integrator(enum.Enum):
    EIGEN = "MatrixExponentialEigen"
    RK4 = "RK4"


@dataclass(frozen=True)
class LatticeConfig:
    """Lattice size and time stepping.

    Results are certified only before the fastest emitted wave packet can
    travel to the far end of the chain and back, roughly ``0.8 N / B``.
    """

    n_sites: int = 512
    integrator: Integrator = Integrator.EIGEN
    dt: float = 0.01
    safety: float = 0.8

    def __post_init__(self):
        if self.n_sites < 64:
            raise ParameterError("n_sites must be at least 64")
        if not self.dt > 0:
            raise ParameterError("dt must be positive")
        if isinstance(self.integrator, str):
            key = self.integrator.lower()
            lookup = {"eigen": Integrator.EIGEN, "matrixexponentialeigen": Integrator.EIGEN, "rk4": Integrator.RK4}
            if key not in lookup:
                raise ParameterError(f"unknown integrator {self.integrator!r}")
            object.__setattr__(self, "integrator", lookup[key])

    def reflection_horizon(self, p: ModelParams) -> float:
        return self.safety * self.n_sites / p.bandB

    @property
    def norm_tolerance(self) -> float:
        return 1e-9 if self.integrator is Integrator.EIGEN else 1e-6


def build_generator(p: ModelParams, cfg: LatticeConfig = LatticeConfig()) -> np.ndarray:
    """Dense ``2(N+1) x 2(N+1)`` generator ``K`` of the coefficient dynamics."""
    n = cfg.n_sites + 1
    h = np.zeros((n, n))
    h[0, 0] = p.delta0
    h[0, 1] = h[1, 0] = p.g0
    idx = np.arange(1, n)
    h[idx, idx] = p.deltaB
    h[idx[:-1], idx[1:]] = h[idx[1:], idx[:-1]] = -0.5 * p.bandB
    f = np.zeros((n, n))
    f[0, 0] = p.f0
    return np.block([[h, f], [-f, -h]]).astype(complex)


def symplectic_metric(n_sites: int) -> np.ndarray:
    """``diag(+1 on annihilators, -1 on creators)``; ``K = eta K^dagger eta``."""
    n = n_sites + 1
    return np.concatenate([np.ones(n), -np.ones(n)])


def chain_modes(p: ModelParams, n_sites: int):
    """Standing-wave basis ``(k_m, omega_m, S)`` with ``b_m = S @ b_sites``."""
    m = np.arange(1, n_sites + 1)
    k = m * math.pi / (n_sites + 1)
    s = math.sqrt(2.0 / (n_sites + 1)) * np.sin(np.outer(k, m))
    return k, p.deltaB - p.bandB * np.cos(k), s


@dataclass(frozen=True)
class OracleState:
    """Coefficient row of ``a(t)`` (and optionally of every ``b_n(t)``).

    ``row`` has length ``2(N+1)`` in the ordering
    ``(alpha, beta_1..beta_N, alphaTilde, betaTilde_1..betaTilde_N)``.
    ``sites`` holds the ``N`` rows of ``b_n(t)`` when requested.
    """

    t: float
    row: np.ndarray
    sites: Optional[np.ndarray] = None

    @property
    def n_sites(self) -> int:
        return self.row.size // 2 - 1

    @property
    def alpha(self) -> complex:
        return complex(self.row[0])

    @property
    def alphaTilde(self) -> complex:
        return complex(self.row[self.n_sites + 1])

    @property
    def beta(self) -> np.ndarray:
        return self.row[1:self.n_sites + 1]

    @property
    def betaTilde(self) -> np.ndarray:
        return self.row[self.n_sites + 2:]

    def symplectic_norm(self) -> float:
        n = self.n_sites + 1
        return float(np.sum(np.abs(self.row[:n]) ** 2) - np.sum(np.abs(self.row[n:]) ** 2))

    def norm_defect(self) -> float:
        """Relative violation of the unit symplectic norm.

        Growing rows carry large, cancelling annihilator and creator parts, so
        the defect is measured relative to their size.
        """
        return abs(self.symplectic_norm() - 1.0) / max(1.0, float(np.sum(np.abs(self.row) ** 2)))


class LatticeOracle:
    """Evolves coefficient rows for one parameter set.

    The eigendecomposition (or sparse generator for RK4) is computed once and
    reused for every time and every requested row combination.
    """

    def __init__(self, p: ModelParams, cfg: LatticeConfig = LatticeConfig(), *, strict: bool = True):
        self.p = p
        self.cfg = cfg
        self.strict = strict
        self.n = cfg.n_sites + 1
        self.generator = build_generator(p, cfg)
        self._integrator = cfg.integrator
        self._eig = None
        if self._integrator is Integrator.EIGEN:
            self._eig = self._decompose()
        if self._integrator is Integrator.RK4:
            self._sparse = sparse.csr_matrix(self.generator)

    def _decompose(self):
        lam, vec = np.linalg.eig(self.generator)
        try:
            inv = np.linalg.inv(vec)
        except np.linalg.LinAlgError:
            inv = None
        if inv is not None:
            recon = np.max(np.abs((vec * lam) @ inv - self.generator))
            if np.isfinite(recon) and recon < _EIGEN_RECON_TOL * max(1.0, np.max(np.abs(lam))):
                return lam, vec, inv
        warnings.warn("eigendecomposition of the lattice generator is ill-conditioned; using RK4",
                      RuntimeWarning, stacklevel=3)
        self._integrator = Integrator.RK4
        self._sparse = sparse.csr_matrix(self.generator)
        return None

    @property
    def horizon(self) -> float:
        return self.cfg.reflection_horizon(self.p)

    def _check_time(self, t):
        if t < 0:
            raise ParameterError("t must be non-negative")
        if self.strict and t > self.horizon:
            raise HorizonError(f"t={t} exceeds the reflection horizon {self.horizon:.1f}")

    def evolve_rows(self, rows0: np.ndarray, t: float) -> np.ndarray:
        """``rows0 @ exp(-i K t)`` for a ``(r, 2(N+1))`` block of initial rows."""
        self._check_time(t)
        rows0 = np.atleast_2d(np.asarray(rows0, dtype=complex))
        if t == 0:
            return rows0.copy()
        if self._eig is not None:
            lam, vec, inv = self._eig
            return ((rows0 @ vec) * np.exp(-1j * lam * t)) @ inv
        return self._rk4(rows0, t)

    def _rk4(self, rows, t):
        steps = max(1, int(math.ceil(t / self.cfg.dt)))
        h = t / steps
        kt = self._sparse.T.tocsr()

        def deriv(r):
            # row' = -i row K  <=>  r'^T = -i K^T r^T
            return -1j * (kt @ r.T).T

        r = rows.copy()
        for _ in range(steps):
            k1 = deriv(r)
            k2 = deriv(r + 0.5 * h * k1)
            k3 = deriv(r + 0.5 * h * k2)
            k4 = deriv(r + h * k3)
            r = r + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        return r

    def site_rows(self, combos: np.ndarray, t: float) -> np.ndarray:
        """Rows of ``sum_n combos[r, n] b_n(t)`` for site combinations."""
        combos = np.atleast_2d(combos)
        init = np.zeros((combos.shape[0], 2 * self.n), dtype=complex)
        init[:, 1:self.n] = combos
        return self.evolve_rows(init, t)

    def state(self, t: float, full: bool = False) -> OracleState:
        init = np.zeros((1, 2 * self.n), dtype=complex)
        init[0, 0] = 1.0
        row = self.evolve_rows(init, t)[0]
        sites = self.site_rows(np.eye(self.n - 1), t) if full else None
        st = OracleState(float(t), row, sites)
        if st.norm_defect() > self.cfg.norm_tolerance:
            warnings.warn(f"symplectic norm defect {st.norm_defect():.2e} at t={t}", RuntimeWarning, stacklevel=2)
        return st

    def photon_number_oscillator(self, times) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        out = np.empty(times.size)
        for i, t in enumerate(times):
            st = self.state(t)
            out[i] = np.sum(np.abs(st.row[self.n:]) ** 2)
        return out

    def mode_density(self, t: float):
        """Photon number per unit frequency on the chain's standing-wave modes.

        Returns ``(omega_m, density)`` with ``density = n_m / (dk B sin k_m)``.
        """
        k, omega, s = chain_modes(self.p, self.n - 1)
        rows = self.site_rows(s, t)
        n_m = np.sum(np.abs(rows[:, self.n:]) ** 2, axis=1)
        dk = math.pi / self.n
        return omega, n_m / (dk * self.p.bandB * np.sin(k))

    def right_mover_combos(self, sites) -> np.ndarray:
        """Site-basis rows of the right-moving parts ``b_n^->``."""
        k, _, s = chain_modes(self.p, self.n - 1)
        sites = np.atleast_1d(sites)
        phase = np.exp(1j * np.outer(sites, k))
        return (-1j / math.sqrt(2.0 * self.n)) * (phase @ s)

    def flux(self, times, site: int, right_movers: bool = True) -> np.ndarray:
        """Expectation of the current from ``site`` to ``site + 1``.

        With ``right_movers`` the operators are projected onto the right-moving
        parts; otherwise the full two-point current is used, which agrees until
        reflected waves return.
        """
        if not 1 <= site < self.n - 1:
            raise ParameterError(f"site must satisfy 1 <= n < {self.n - 1}")
        if right_movers:
            combos = self.right_mover_combos([site, site + 1])
        else:
            combos = np.zeros((2, self.n - 1), dtype=complex)
            combos[0, site - 1] = combos[1, site] = 1.0
        times = np.atleast_1d(np.asarray(times, dtype=float))
        out = np.empty(times.size)
        for i, t in enumerate(times):
            r = self.site_rows(combos, t)[:, self.n:]
            x = np.vdot(r[1], r[0])
            out[i] = -self.p.bandB * x.imag
        return out


def evolve(state0, t: float, p: ModelParams, cfg: LatticeConfig = LatticeConfig(),
           oracle: Optional[LatticeOracle] = None) -> OracleState:
    """Propagate a coefficient row (or :class:`OracleState`) to time ``t``."""
    oracle = oracle or LatticeOracle(p, cfg)
    row0 = state0.row if isinstance(state0, OracleState) else np.asarray(state0, dtype=complex)
    t0 = state0.t if isinstance(state0, OracleState) else 0.0
    row = oracle.evolve_rows(row0, t - t0 if t >= t0 else t)[0]
    return OracleState(float(t), row)


def photon_numbers(state: OracleState):
    """``(n_a, per-site numbers, n_total)`` for a state evolved with ``full=True``."""
    n = state.n_sites + 1
    n_a = float(np.sum(np.abs(state.row[n:]) ** 2))
    if state.sites is None:
        raise ParameterError("state has no site rows; evolve with full=True")
    profile = np.sum(np.abs(state.sites[:, n:]) ** 2, axis=1)
    return n_a, profile, n_a + float(profile.sum())
