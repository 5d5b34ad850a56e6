"""Time-domain Bogoliubov coefficients from their Laplace transforms.

With the transform convention used throughout, a simple pole ``c/(z - p)``
inverts to ``c * exp(-i p t)``, so the Bromwich line runs above every
first-sheet singularity.  The line integral is evaluated on a horizontal
contour ``Im z = eta``:

* the asymptotic tail of the transform is fitted by a few synthetic poles
  below the real axis (matching its Laurent coefficients at infinity), whose
  inverse is added in closed form;
* the remainder decays like ``|z|**-(K+1)`` and is integrated with composite
  Gauss-Kronrod panels narrow enough to resolve ``exp(-i x t)``.

Band integrals use the Chebyshev substitution ``Delta = deltaB + B cos(theta)``
so the ``g(Delta)**2`` weight is absorbed exactly.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._quadrature import GK15_GAUSS, GK15_KRONROD, gk15_panels
from .analytic import FIRST_SHEET, ComplexPoint, SheetSelector, _branch_root
from .errors import AccuracyError, ConfigurationError, ParameterError, PoleError
from .model import ModelParams, band_nodes, coupling_g
from .spectral import instability_rate

COEFFICIENTS = ("alpha", "alphaTilde", "beta", "betaTilde", "A", "ATilde", "C", "CTilde")
_ONE_FREQ = {"beta", "betaTilde", "A", "ATilde"}
_TWO_FREQ = {"C", "CTilde"}
_POLE_GAP = 1e-12
# cap on evaluated (node x column) entries per chunk
_CHUNK = 4_000_000


@dataclass(frozen=True)
class BromwichConfig:
    """Settings for the numerical inverse Laplace transform.

    Parameters
    ----------
    eta : float, optional
        Height of the integration line.  By default it sits ``min(B/2, 1/t)``
        above the largest first-sheet growth rate, which keeps the
        ``exp(eta t)`` amplification of rounding errors bounded.
    half_width : float, optional
        Fixed truncation half-width; chosen from the tail estimate if omitted.
    atol, rtol : float
        Target error ``atol + rtol * max|value|`` per batch.
    terms : int
        Number of synthetic poles used for the asymptotic subtraction.
    circle_points : int
        Samples on the circle used to extract Laurent coefficients.
    max_refine : int
        Panel halvings attempted before giving up.
    max_half_width : float
        Upper bound on the truncation half-width, in units of ``B``.
    """

    eta: Optional[float] = None
    half_width: Optional[float] = None
    atol: float = 1e-10
    rtol: float = 1e-8
    terms: int = 6
    circle_points: int = 256
    max_refine: int = 4
    max_half_width: float = 400.0

    def __post_init__(self):
        if self.eta is not None and not self.eta > 0:
            raise ConfigurationError("eta must be positive")
        if self.half_width is not None and not self.half_width > 0:
            raise ConfigurationError("half_width must be positive")
        if self.atol < 0 or self.rtol < 0 or self.atol + self.rtol == 0:
            raise ConfigurationError("tolerances must be non-negative and not both zero")
        if self.terms < 1 or self.circle_points < 4 * (self.terms + 2):
            raise ConfigurationError("need terms >= 1 and enough circle points")

    def contour_height(self, p: ModelParams, t: float) -> float:
        sigma0 = abscissa(p)
        if self.eta is not None:
            if self.eta <= sigma0:
                raise ConfigurationError(
                    f"eta={self.eta} does not exceed the growth rate {sigma0}")
            return self.eta
        return sigma0 + (0.5 * p.bandB if t <= 0 else min(0.5 * p.bandB, 1.0 / t))


@functools.lru_cache(maxsize=64)
def abscissa(p: ModelParams) -> float:
    """Largest first-sheet growth rate, or 0 for a stable system."""
    rate = instability_rate(p)
    return 0.0 if rate is None else rate


def _feature_radius(p: ModelParams) -> float:
    return abs(p.deltaB) + p.bandB + abs(p.delta0) + p.f0 + p.g0


# ---------------------------------------------------------------------------
# Laplace transforms

def _green_parts(z, p: ModelParams, sheet: SheetSelector = FIRST_SHEET):
    """``G(z)`` and ``z + delta0 + Sigma(-z)`` without pole guards."""
    z = np.asarray(z, dtype=complex)
    if p.g0 == 0:
        sp = sm = 0.0
    else:
        c2 = 2.0 * p.coupling_ratio
        zp = z - p.deltaB
        sp = c2 * (zp - _branch_root(zp, p.bandB, sheet.plus, check=False))
        zm = -z - p.deltaB
        sm = c2 * (zm - _branch_root(zm, p.bandB, sheet.minus, check=False))
    q = z + p.delta0 + sm
    return 1.0 / ((z - p.delta0 - sp) * q + p.f0**2), q


def _kernel(name, z, p, delta=None, delta_prime=None, with_g=True, sheet=FIRST_SHEET):
    """Transform ``name`` at ``z`` (shape (m,)) for frequency columns -> (m, k)."""
    g, q = _green_parts(z, p, sheet)
    g = g[:, None]
    q = q[:, None]
    z = np.asarray(z, dtype=complex)[:, None]
    if name == "alphaTilde":
        return p.f0 * g
    if name == "alpha":
        return g * q
    d = np.atleast_1d(np.asarray(delta, dtype=float))[None, :]
    gd = coupling_g(d, p) if with_g else 1.0
    if name in ("beta", "A"):
        return g * q * gd / (z - d)
    if name == "betaTilde":
        return -p.f0 * g * gd / (z + d)
    if name == "ATilde":
        return p.f0 * g * gd / (z - d)
    d2 = np.atleast_1d(np.asarray(delta_prime, dtype=float))[None, :]
    gd2 = coupling_g(d2, p) if with_g else 1.0
    if name == "C":
        return g * q * gd * gd2 / ((z - d) * (z - d2))
    if name == "CTilde":
        return -p.f0 * g * gd * gd2 / ((z - d) * (z + d2))
    raise ParameterError(f"unknown coefficient {name!r}; expected one of {COEFFICIENTS}")


def _check_args(name, delta, delta_prime):
    if name not in COEFFICIENTS:
        raise ParameterError(f"unknown coefficient {name!r}; expected one of {COEFFICIENTS}")
    if name in _ONE_FREQ | _TWO_FREQ and delta is None:
        raise ParameterError(f"{name} needs a frequency delta")
    if name in _TWO_FREQ and delta_prime is None:
        raise ParameterError(f"{name} needs a second frequency delta_prime")


def coefficient_laplace(name: str, z, p: ModelParams, delta=None, delta_prime=None,
                        sheet: Optional[SheetSelector] = None):
    """Closed-form Laplace transform of one Bogoliubov coefficient.

    Parameters
    ----------
    name : str
        One of ``COEFFICIENTS``.
    z : complex or ComplexPoint
        Evaluation point; a bare number uses the first sheet unless ``sheet``
        is given.
    delta, delta_prime : float or array, optional
        Continuum frequencies for the one- and two-frequency coefficients;
        arrays broadcast together.

    Raises
    ------
    PoleError
        Within ``1e-12`` of a pole of ``G`` or of a ``1/(z -/+ Delta)`` factor.
    """
    _check_args(name, delta, delta_prime)
    if isinstance(z, ComplexPoint):
        z, sheet = z.z, z.sheet
    sheet = sheet or FIRST_SHEET
    z = complex(z)
    poles = []
    if delta is not None:
        poles.append(-np.asarray(delta, float) if name == "betaTilde" else np.asarray(delta, float))
    if delta_prime is not None:
        poles.append(-np.asarray(delta_prime, float) if name == "CTilde" else np.asarray(delta_prime, float))
    for pole in poles:
        if np.any(np.abs(z - pole) < _POLE_GAP):
            raise PoleError(f"{name} evaluated on the pole z={z}", location=z)
    ginv = 1.0 / _green_parts(np.array([z]), p, sheet)[0][0]
    if abs(ginv) < _POLE_GAP:
        raise PoleError(f"Green function pole at z={z}", location=z)
    shape = np.broadcast(*(np.asarray(x, float) for x in (delta, delta_prime) if x is not None)).shape \
        if delta is not None else ()
    d = None if delta is None else np.broadcast_to(np.asarray(delta, float), shape).ravel()
    d2 = None if delta_prime is None else np.broadcast_to(np.asarray(delta_prime, float), shape).ravel()
    out = _kernel(name, np.array([z]), p, d, d2, sheet=sheet)[0]
    return complex(out[0]) if shape == () else out.reshape(shape)


# ---------------------------------------------------------------------------
# Bromwich inversion

def _laurent(func, radius, n_coef, n_points):
    """Coefficients ``a_1..a_n`` of ``func(z) = sum a_k z**-k`` at infinity."""
    theta = 2.0 * math.pi * np.arange(n_points) / n_points
    z = radius * np.exp(1j * theta)
    vals = func(z)
    powers = z[:, None] ** np.arange(1, n_coef + 1)[None, :]
    return (powers.T @ vals) / n_points


def _panel_edges(lo, hi, h):
    n = max(1, int(math.ceil((hi - lo) / h - 1e-9)))
    return np.linspace(lo, hi, n + 1)


def bromwich(func, t: float, eta: float, feature_radius: float, *, gap: float,
             cfg: BromwichConfig = BromwichConfig(), scale: float = 1.0):
    """Inverse Laplace transform of a batch of transforms at time ``t``.

    Parameters
    ----------
    func : callable
        Maps a 1-D array of ``z`` on the line to an ``(m, k)`` array.
    eta : float
        Height of the integration line.
    feature_radius : float
        Radius enclosing every singularity of ``func``.
    gap : float
        Distance from the line to the closest singularity; sets the panel
        width near the real-axis features.
    scale : float
        Frequency unit (the half bandwidth).

    Returns
    -------
    values, errors : ndarray
        Shape ``(k,)`` each.

    Raises
    ------
    AccuracyError
        When ``atol + rtol * max|value|`` is not met after ``cfg.max_refine``
        panel halvings; ``estimate`` carries the best values.
    """
    if t < 0:
        raise ParameterError("t must be non-negative")
    K = cfg.terms
    r_model = feature_radius
    coef = _laurent(func, 2.0 * feature_radius, K + 1, cfg.circle_points)  # (K+1, k)
    poles = r_model * np.exp(-1j * np.linspace(math.pi / 6, 5 * math.pi / 6, K))
    vander = poles[None, :] ** np.arange(K)[:, None]
    cj = np.linalg.solve(vander, coef[:K])  # (K, k)
    defect = coef[K] - (poles**K) @ cj
    growth = math.exp(eta * t)
    closed = np.exp(-1j * poles * t) @ cj
    near = feature_radius + scale
    osc = math.pi / (4 * t) if t > 0 else math.inf
    k = cj.shape[1]

    def integrate(edges):
        x, hw = gk15_panels(edges)
        per = max(1, _CHUNK // (15 * max(k, 1)))
        int_k = np.zeros(k, dtype=complex)
        err = np.zeros(k)
        for s in range(0, x.shape[0], per):
            xs = x[s:s + per]
            ws = hw[s:s + per, None]
            z = (xs + 1j * eta).ravel()
            resid = func(z) - (1.0 / (z[:, None] - poles[None, :])) @ cj
            f = np.exp(-1j * xs * t)[..., None] * resid.reshape(xs.shape + (k,))
            kr = np.einsum("n,pnk->pk", GK15_KRONROD, f) * ws
            ga = np.einsum("n,pnk->pk", GK15_GAUSS, f) * ws
            int_k += kr.sum(axis=0)
            err += np.abs(kr - ga).sum(axis=0)
        return closed + 1j / (2 * math.pi) * growth * int_k, growth / (2 * math.pi) * err

    def near_edges(h):
        return _panel_edges(-near, near, h)

    if cfg.half_width is not None:
        half = cfg.half_width
    else:
        # the near-field integral fixes the magnitude the tolerance refers to
        rough, _ = integrate(near_edges(min(osc, gap / 2, 0.05 * scale)))
        # leave most of the error budget to the quadrature
        target0 = 0.1 * (cfg.atol + cfg.rtol * np.max(np.abs(rough)))
        need = (np.max(np.abs(defect)) * growth / (math.pi * K * target0)) ** (1.0 / K)
        half = min(max(near + scale, 3.0 * feature_radius, need), cfg.max_half_width * scale)
    tail = growth / (math.pi * K) * np.abs(defect) / half**K

    best = None
    for level in range(cfg.max_refine + 1):
        shrink = 0.5**level
        h_near = shrink * min(osc, gap / 2, 0.05 * scale)
        h_far = shrink * min(osc, 0.5 * scale)
        if half > near:
            edges = np.concatenate([
                _panel_edges(-half, -near, h_far)[:-1],
                near_edges(h_near)[:-1],
                _panel_edges(near, half, h_far)])
        else:
            edges = _panel_edges(-half, half, h_near)
        values, errors = integrate(edges)
        errors = errors + tail
        best = (values, errors)
        target = cfg.atol + cfg.rtol * np.max(np.abs(values))
        if np.all(errors <= target):
            return values, errors
        if np.any(tail > target):
            break
    raise AccuracyError(
        f"Bromwich inversion at t={t} missed its tolerance (error {np.max(best[1]):.3g})",
        estimate=best[0], error=best[1])


def _invert(kernel, t, p, cfg):
    eta = cfg.contour_height(p, t)
    gap = eta - abscissa(p)
    return bromwich(kernel, t, eta, _feature_radius(p), gap=gap, cfg=cfg, scale=p.bandB)


def invert_laplace(name: str, t: float, p: ModelParams, cfg: Optional[BromwichConfig] = None,
                   delta=None, delta_prime=None):
    """Time-domain coefficient ``name(t)`` with an error estimate.

    ``delta``/``delta_prime`` may be arrays (broadcast together); the
    inversion is then batched and ``(values, errors)`` arrays are returned.
    """
    _check_args(name, delta, delta_prime)
    cfg = cfg or BromwichConfig()
    if delta is None:
        shape = ()
        d = d2 = None
    else:
        arrays = [np.asarray(x, float) for x in (delta, delta_prime) if x is not None]
        shape = np.broadcast(*arrays).shape
        d = np.broadcast_to(np.asarray(delta, float), shape).ravel()
        d2 = None if delta_prime is None else np.broadcast_to(np.asarray(delta_prime, float), shape).ravel()
    vals, errs = _invert(lambda z: _kernel(name, z, p, d, d2), float(t), p, cfg)
    if shape == ():
        return complex(vals[0]), float(errs[0])
    return vals.reshape(shape), errs.reshape(shape)


# ---------------------------------------------------------------------------
# band-resolved quantities

def default_band_nodes(p: ModelParams, t: float) -> int:
    """Chebyshev nodes needed to resolve ``exp(i Delta t)`` across the band."""
    return int(math.ceil(1.2 * p.bandB * t)) + 64


@dataclass
class BandFields:
    """Inverted g-stripped band transforms at one time.

    ``u = L^-1[G/(z-D)]``, ``v = L^-1[G/(z+D)]``, ``w = L^-1[G/(z-D)**2]`` and
    ``s = L^-1[G (z+d0+Sigma(-z))/(z-D)]`` on the Chebyshev nodes ``deltas``
    with ``g**2``-weights ``gweights``.
    """

    t: float
    deltas: np.ndarray
    gweights: np.ndarray
    alpha: complex
    alpha_tilde: complex
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    s: np.ndarray
    error: float


def band_fields(t: float, p: ModelParams, cfg: Optional[BromwichConfig] = None,
                n_band: Optional[int] = None, need=("u", "v", "w", "s")) -> BandFields:
    """Batch-invert every one-frequency transform needed for band integrals."""
    cfg = cfg or BromwichConfig()
    n = n_band or default_band_nodes(p, t)
    if p.g0 == 0:
        nodes = np.zeros(0)
        gw = np.zeros(0)
    else:
        nodes, gw = band_nodes(p, n)
    m = nodes.size
    parts = [name for name in ("u", "v", "w", "s") if name in need]

    def kernel(z):
        g, q = _green_parts(z, p)
        zc = z[:, None]
        cols = [g[:, None], (g * q)[:, None]]
        d = nodes[None, :]
        for name in parts:
            if name == "u":
                cols.append(g[:, None] / (zc - d))
            elif name == "v":
                cols.append(g[:, None] / (zc + d))
            elif name == "w":
                cols.append(g[:, None] / (zc - d) ** 2)
            else:
                cols.append((g * q)[:, None] / (zc - d))
        return np.concatenate(cols, axis=1)

    vals, errs = _invert(kernel, float(t), p, cfg)
    out = {"u": None, "v": None, "w": None, "s": None}
    for i, name in enumerate(parts):
        out[name] = vals[2 + i * m: 2 + (i + 1) * m]
    return BandFields(float(t), nodes, gw, complex(vals[1]), complex(p.f0 * vals[0]),
                      out["u"], out["v"], out["w"], out["s"], float(np.max(errs)))


def _ctilde_rows(bf: BandFields, rows, p: ModelParams):
    """``C~(D_i, D_j)/(g_i g_j)`` for node rows ``rows`` against all nodes."""
    di = bf.deltas[rows][:, None]
    dj = bf.deltas[None, :]
    den = di + dj
    close = np.abs(den) < 1e-6 * p.bandB
    safe = np.where(close, 1.0, den)
    diff = (bf.u[rows][:, None] - bf.v[None, :]) / safe
    diff = np.where(close, bf.w[rows][:, None], diff)
    return -p.f0 * diff


def photon_number_oscillator(t: float, p: ModelParams, cfg: Optional[BromwichConfig] = None,
                             n_band: Optional[int] = None) -> float:
    """Oscillator photon number ``|alpha~|**2 + int |beta~|**2`` from the vacuum."""
    if t == 0:
        return 0.0
    bf = band_fields(t, p, cfg, n_band, need=("v",))
    n_a = abs(bf.alpha_tilde) ** 2
    if bf.deltas.size:
        n_a += p.f0**2 * float(bf.gweights @ np.abs(bf.v) ** 2)
    return float(n_a)


def photon_number_density(delta: float, t: float, p: ModelParams,
                          cfg: Optional[BromwichConfig] = None, n_band: Optional[int] = None) -> float:
    """Continuum photon density ``|A~(D;t)|**2 + int dD' |C~(D,D';t)|**2``."""
    if not abs(delta - p.deltaB) < p.bandB:
        raise ParameterError("delta must lie strictly inside the band")
    if t == 0 or p.f0 == 0 or p.g0 == 0:
        return 0.0
    cfg = cfg or BromwichConfig()
    n = n_band or default_band_nodes(p, t)
    nodes, gw = band_nodes(p, n)
    gd = coupling_g(delta, p)

    def kernel(z):
        g, _ = _green_parts(z, p)
        a = g / (z - delta)
        return np.concatenate([a[:, None], a[:, None] / (z[:, None] + nodes[None, :])], axis=1)

    vals, _ = _invert(kernel, float(t), p, cfg)
    return float(p.f0**2 * gd**2 * (abs(vals[0]) ** 2 + gw @ np.abs(vals[1:]) ** 2))


def photon_density_profile(deltas, t: float, p: ModelParams, cfg: Optional[BromwichConfig] = None,
                           n_band: Optional[int] = None) -> np.ndarray:
    """Photon density at many in-band frequencies from one batched inversion.

    Uses ``1/((z-D)(z+D')) = [1/(z-D) - 1/(z+D')]/(D+D')`` so only
    one-frequency transforms are inverted; near ``D' = -D`` the quotient is
    replaced by the derivative transform ``G/(z-D)**2``.
    """
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    if np.any(np.abs(deltas - p.deltaB) >= p.bandB):
        raise ParameterError("all deltas must lie strictly inside the band")
    if t == 0 or p.f0 == 0 or p.g0 == 0:
        return np.zeros(deltas.size)
    cfg = cfg or BromwichConfig()
    n = n_band or default_band_nodes(p, t)
    nodes, gw = band_nodes(p, n)
    m = deltas.size

    def kernel(z):
        g, _ = _green_parts(z, p)
        zc = z[:, None]
        a = g[:, None] / (zc - deltas[None, :])
        return np.concatenate([a, a / (zc - deltas[None, :]), g[:, None] / (zc + nodes[None, :])], axis=1)

    vals, _ = _invert(kernel, float(t), p, cfg)
    u, w, v = vals[:m], vals[m:2 * m], vals[2 * m:]
    den = deltas[:, None] + nodes[None, :]
    close = np.abs(den) < 1e-6 * p.bandB
    quot = np.where(close, w[:, None], (u[:, None] - v[None, :]) / np.where(close, 1.0, den))
    inner = np.abs(u) ** 2 + np.abs(quot) ** 2 @ gw
    return p.f0**2 * coupling_g(deltas, p) ** 2 * inner


def band_densities(bf: BandFields, p: ModelParams) -> np.ndarray:
    """Photon density on every band node, from one :class:`BandFields`."""
    if bf.deltas.size == 0 or p.f0 == 0:
        return np.zeros(bf.deltas.size)
    g2 = p.f0**2 * np.abs(bf.u) ** 2
    rows = np.arange(bf.deltas.size)
    out = np.empty(bf.deltas.size)
    step = max(1, 2_000_000 // bf.deltas.size)
    for s in range(0, rows.size, step):
        r = rows[s:s + step]
        c = _ctilde_rows(bf, r, p)
        out[r] = g2[r] + np.abs(c) ** 2 @ bf.gweights
    gsq = (2.0 / math.pi) * p.coupling_ratio * np.sqrt(np.clip(p.bandB**2 - (bf.deltas - p.deltaB) ** 2, 0, None))
    return gsq * out


def commutator_value(bf: BandFields, p: ModelParams) -> float:
    """``|alpha|**2 - |alpha~|**2 + int (|beta|**2 - |beta~|**2)``; equals 1."""
    val = abs(bf.alpha) ** 2 - abs(bf.alpha_tilde) ** 2
    if bf.deltas.size:
        val += float(bf.gweights @ (np.abs(bf.s) ** 2 - p.f0**2 * np.abs(bf.v) ** 2))
    return float(val)


def commutator_check(t: float, p: ModelParams, cfg: Optional[BromwichConfig] = None,
                     n_band: Optional[int] = None) -> float:
    """Deviation of the equal-time commutator ``[a(t), a(t)^dagger]`` from one."""
    if t == 0:
        return 0.0
    bf = band_fields(t, p, cfg, n_band, need=("v", "s"))
    return commutator_value(bf, p) - 1.0


@dataclass
class CoefficientSet:
    """Bogoliubov coefficients sampled on a time grid.

    ``beta`` and ``betaTilde`` have shape ``(len(times), len(deltas))``;
    ``weights`` integrate plain functions of ``Delta`` over the band.
    """

    times: np.ndarray
    deltas: np.ndarray
    weights: np.ndarray
    alpha: np.ndarray
    alphaTilde: np.ndarray
    beta: np.ndarray
    betaTilde: np.ndarray
    n_a: np.ndarray
    n_total: np.ndarray
    commutator: np.ndarray
    error: np.ndarray

    def rows(self):
        """``(t, n_a, n_total, commutator_check)`` tuples."""
        return list(zip(self.times, self.n_a, self.n_total, self.commutator - 1.0))


def coefficient_set(times, p: ModelParams, cfg: Optional[BromwichConfig] = None,
                    n_band: Optional[int] = None) -> CoefficientSet:
    """Evaluate the oscillator coefficients and photon numbers on ``times``.

    A single band grid (sized for the latest time) is used for all samples.
    """
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ParameterError("times must be non-negative")
    n = n_band or default_band_nodes(p, float(times.max(initial=0.0)))
    nodes, gw = band_nodes(p, n) if p.g0 > 0 else (np.zeros(0), np.zeros(0))
    theta = np.arange(1, n + 1) * math.pi / (n + 1)
    plain_w = (p.bandB * math.pi / (n + 1)) * np.sin(theta) if p.g0 > 0 else np.zeros(0)
    gvals = coupling_g(nodes, p)
    nt = times.size
    alpha = np.empty(nt, complex)
    alpha_t = np.empty(nt, complex)
    beta = np.empty((nt, nodes.size), complex)
    beta_t = np.empty((nt, nodes.size), complex)
    n_a = np.empty(nt)
    n_tot = np.empty(nt)
    comm = np.empty(nt)
    errs = np.empty(nt)
    for i, t in enumerate(times):
        if t == 0:
            alpha[i], alpha_t[i] = 1.0, 0.0
            beta[i] = beta_t[i] = 0.0
            n_a[i] = n_tot[i] = 0.0
            comm[i] = 1.0
            errs[i] = 0.0
            continue
        bf = band_fields(t, p, cfg, n)
        alpha[i], alpha_t[i] = bf.alpha, bf.alpha_tilde
        beta[i] = gvals * bf.s
        beta_t[i] = -p.f0 * gvals * bf.v
        n_a[i] = abs(bf.alpha_tilde) ** 2 + (p.f0**2 * float(gw @ np.abs(bf.v) ** 2) if nodes.size else 0.0)
        n_tot[i] = n_a[i] + (float(plain_w @ band_densities(bf, p)) if nodes.size else 0.0)
        comm[i] = commutator_value(bf, p)
        errs[i] = bf.error
    return CoefficientSet(times, nodes, plain_w, alpha, alpha_t, beta, beta_t, n_a, n_tot, comm, errs)
