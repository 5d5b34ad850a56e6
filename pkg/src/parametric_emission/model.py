"""Physical parameters of the driven oscillator and its photonic-crystal continuum.

All frequencies live in the frame rotating at half the drive frequency, so a
detuning ``delta0`` is the oscillator frequency minus ``Omega/2`` and
``deltaB`` is the band centre minus ``Omega/2``.  Computations are carried out
in whatever unit the caller picks; :meth:`ModelParams.in_band_units` rescales
to the usual convention ``bandB = 1``.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .errors import ConfigurationError, ParameterError

#: Keys of the flat key/value representation, in output order.
PARAM_KEYS = ("delta0", "f0", "g0", "bandB", "deltaB", "omegaDrive")

_EDGE_CLAMP = 1e-14


@dataclass(frozen=True)
class ModelParams:
    """Rotating-frame parameters.

    Parameters
    ----------
    delta0 : float
        Oscillator detuning from parametric resonance.
    f0 : float
        Strength of the parametric (pair-creating) drive, ``f0 >= 0``.
    g0 : float
        Oscillator to first-lattice-site hopping.  ``g0 = 0`` gives the
        decoupled oscillator.
    bandB : float
        Half bandwidth of the photonic band, ``> 0``.
    deltaB : float
        Detuning of the band centre.
    omegaDrive : float, optional
        Rest-frame drive frequency; only used for energy bookkeeping.
    """

    delta0: float
    f0: float
    g0: float
    bandB: float = 1.0
    deltaB: float = 0.0
    omegaDrive: Optional[float] = None
    # set by in_band_units so that from_band_units inverts without rounding;
    # replace() drops it because it is not an init field
    _unscaled: Optional["ModelParams"] = field(default=None, init=False, compare=False, repr=False)

    def __post_init__(self):
        for name in ("delta0", "f0", "g0", "bandB", "deltaB"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.bandB <= 0:
            raise ParameterError("bandB must be positive")
        if self.g0 < 0:
            raise ParameterError("g0 must be non-negative")
        if self.f0 < 0:
            raise ParameterError("f0 must be non-negative")
        if self.omegaDrive is not None:
            if not (math.isfinite(self.omegaDrive) and self.omegaDrive > 0):
                raise ParameterError("omegaDrive must be a positive number")
            object.__setattr__(self, "omegaDrive", float(self.omegaDrive))

    @property
    def coupling_ratio(self) -> float:
        """``(g0 / B)**2``, the dimensionless weight of the self-energy."""
        return (self.g0 / self.bandB) ** 2

    @property
    def band_edges(self) -> tuple:
        return (self.deltaB - self.bandB, self.deltaB + self.bandB)

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def in_band_units(self) -> tuple:
        """Return ``(params_with_B_equal_1, scale)`` where ``scale`` is the old B."""
        s = self.bandB
        scaled = ModelParams(
            delta0=self.delta0 / s,
            f0=self.f0 / s,
            g0=self.g0 / s,
            bandB=1.0,
            deltaB=self.deltaB / s,
            omegaDrive=None if self.omegaDrive is None else self.omegaDrive / s,
        )
        object.__setattr__(scaled, "_unscaled", self)
        return scaled, s

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in PARAM_KEYS}
        if out["omegaDrive"] is None:
            del out["omegaDrive"]
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "ModelParams":
        unknown = set(data) - set(PARAM_KEYS)
        if unknown:
            raise ConfigurationError(f"unknown parameter keys: {sorted(unknown)}")
        missing = {"delta0", "f0", "g0"} - set(data)
        if missing:
            raise ConfigurationError(f"missing parameter keys: {sorted(missing)}")
        kwargs = {}
        for k, v in data.items():
            if v is None or (isinstance(v, str) and v.strip().lower() in ("", "none")):
                if k != "omegaDrive":
                    raise ConfigurationError(f"{k} may not be empty")
                kwargs[k] = None
            else:
                try:
                    kwargs[k] = float(v)
                except (TypeError, ValueError) as exc:
                    raise ConfigurationError(f"{k}={v!r} is not a number") from exc
        return cls(**kwargs)


def from_band_units(p: ModelParams, scale: float) -> ModelParams:
    """Inverse of :meth:`ModelParams.in_band_units`, exact for unmodified results."""
    if p._unscaled is not None and p._unscaled.bandB == scale:
        return p._unscaled
    return ModelParams(
        delta0=p.delta0 * scale,
        f0=p.f0 * scale,
        g0=p.g0 * scale,
        bandB=p.bandB * scale,
        deltaB=p.deltaB * scale,
        omegaDrive=None if p.omegaDrive is None else p.omegaDrive * scale,
    )


def coupling_g(delta, p: ModelParams):
    """Oscillator-continuum coupling ``g(delta)`` for the semi-infinite chain.

    Equal to ``(g0/B) sqrt(2/pi) (B**2 - (delta-deltaB)**2)**(1/4)`` inside the
    band and exactly zero outside.  Works elementwise on arrays.
    """
    d = np.asarray(delta, dtype=float)
    x = p.bandB**2 - (d - p.deltaB) ** 2
    # rounding at the band edge can leave a tiny negative argument
    x = np.where((x < 0) & (x > -_EDGE_CLAMP * p.bandB**2), 0.0, x)
    inside = x > 0
    val = np.where(inside, np.sqrt(np.sqrt(np.where(inside, x, 0.0))), 0.0)
    out = (p.g0 / p.bandB) * math.sqrt(2.0 / math.pi) * val
    return out if out.ndim else float(out)


def coupling_g_squared(delta, p: ModelParams):
    """``g(delta)**2``, computed without the fourth root."""
    d = np.asarray(delta, dtype=float)
    x = p.bandB**2 - (d - p.deltaB) ** 2
    out = (2.0 / math.pi) * p.coupling_ratio * np.sqrt(np.clip(x, 0.0, None))
    return out if out.ndim else float(out)


def dispersion_omega_k(k, p: ModelParams):
    """Rotating-frame lattice dispersion ``deltaB - B cos k`` for ``0 < k < pi``."""
    k_arr = np.asarray(k, dtype=float)
    if np.any((k_arr <= 0) | (k_arr >= math.pi)):
        raise ParameterError("wave number must lie strictly inside (0, pi)")
    out = p.deltaB - p.bandB * np.cos(k_arr)
    return out if out.ndim else float(out)


def rest_frame_energy(n_total: float, p: ModelParams) -> float:
    """Rest-frame energy of a state grown from the vacuum.

    The rotating-frame part is the conserved vacuum value, zero with normal
    ordering, so only ``(Omega/2) * n_total`` remains.
    """
    if p.omegaDrive is None:
        raise ConfigurationError("rest_frame_energy needs omegaDrive")
    if n_total < 0:
        raise ParameterError("photon number must be non-negative")
    return 0.5 * p.omegaDrive * n_total


def band_nodes(p: ModelParams, n: int):
    """Nodes and weights for ``int g(D)**2 h(D) dD`` over the band.

    With ``D = deltaB + B cos(theta)`` the weight ``g**2 dD`` becomes
    ``(2 g0**2 / pi) sin(theta)**2 dtheta``; the Gauss rule for that weight
    (Chebyshev of the second kind) is exact for polynomials in ``D`` up to
    degree ``2n - 1``.
    """
    if n < 1:
        raise ParameterError("need at least one node")
    j = np.arange(1, n + 1)
    theta = j * math.pi / (n + 1)
    nodes = p.deltaB + p.bandB * np.cos(theta)
    weights = (2.0 * p.g0**2 / math.pi) * (math.pi / (n + 1)) * np.sin(theta) ** 2
    return nodes, weights
