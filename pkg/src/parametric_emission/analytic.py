"""Sheet-resolved self-energy, effective Liouvillian and Green function.

The self-energy of the semicircular continuum is two-valued,

    Sigma(z) = 2 (g0/B)**2 [zeta -/+ sqrt(zeta**2 - B**2)],  zeta = z - deltaB,

with the first-sheet square root picked by ``|zeta - sqrt(...)| < B``.  The
Green function contains both ``Sigma(z)`` and ``Sigma(-z)``; their branches
are chosen independently through a :class:`SheetSelector`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import BranchPointError, ParameterError, PoleError
from .model import ModelParams

# relative gap treated as a tie in the branch predicate (z on the cut)
_TIE = 1e-13
_BRANCH_TOL = 1e-14
_POLE_TOL = 1e-15


class Sheet(enum.Enum):
    FIRST = "First"
    SECOND = "Second"

    def flipped(self) -> "Sheet":
        return Sheet.SECOND if self is Sheet.FIRST else Sheet.FIRST


@dataclass(frozen=True)
class SheetSelector:
    """Branches of ``Sigma(z)`` (``plus``) and ``Sigma(-z)`` (``minus``)."""

    plus: Sheet = Sheet.FIRST
    minus: Sheet = Sheet.FIRST

    @property
    def is_first(self) -> bool:
        return self.plus is Sheet.FIRST and self.minus is Sheet.FIRST

    def mirrored(self) -> "SheetSelector":
        """Selector under which ``-z`` reproduces the same Green function."""
        return SheetSelector(self.minus, self.plus)

    def conjugated(self) -> "SheetSelector":
        # Sigma on either branch obeys Sigma(z*) = Sigma(z)* for real deltaB
        return self

    def label(self) -> str:
        return f"{self.plus.value}/{self.minus.value}"

    @classmethod
    def continued_from_above(cls, z: complex, p: ModelParams) -> "SheetSelector":
        """Sheets reached from the upper half plane by going straight down to z.

        A factor switches to the second sheet only when ``z`` lies below the
        real axis with ``Re z`` inside that factor's cut.
        """
        z = complex(z)
        if z.imag >= 0:
            return FIRST_SHEET
        b = p.bandB
        plus = Sheet.SECOND if abs(z.real - p.deltaB) < b else Sheet.FIRST
        minus = Sheet.SECOND if abs(-z.real - p.deltaB) < b else Sheet.FIRST
        return cls(plus, minus)


FIRST_SHEET = SheetSelector(Sheet.FIRST, Sheet.FIRST)
SECOND_SHEET = SheetSelector(Sheet.SECOND, Sheet.SECOND)
ALL_SHEETS = (
    FIRST_SHEET,
    SECOND_SHEET,
    SheetSelector(Sheet.FIRST, Sheet.SECOND),
    SheetSelector(Sheet.SECOND, Sheet.FIRST),
)


@dataclass(frozen=True)
class ComplexPoint:
    """A point of the Riemann surface: a frequency plus the branches used."""

    z: complex
    sheet: SheetSelector = FIRST_SHEET

    def mirrored(self) -> "ComplexPoint":
        return ComplexPoint(-self.z, self.sheet.mirrored())

    def conjugated(self) -> "ComplexPoint":
        return ComplexPoint(complex(self.z).conjugate(), self.sheet.conjugated())


def reachable_sheets(p: ModelParams) -> tuple:
    """Sheet selectors connected to the physical sheet by analytic continuation.

    With ``deltaB = 0`` both factors share their cut and branch points, so
    their branches always flip together.
    """
    if p.g0 == 0:
        return (FIRST_SHEET,)
    if p.deltaB == 0:
        return (FIRST_SHEET, SECOND_SHEET)
    return ALL_SHEETS


def _as_sheet(sheet) -> Sheet:
    if isinstance(sheet, Sheet):
        return sheet
    if isinstance(sheet, str):
        key = sheet.strip().lower()
        if key in ("first", "1", "i"):
            return Sheet.FIRST
        if key in ("second", "2", "ii"):
            return Sheet.SECOND
    raise ParameterError(f"unknown sheet {sheet!r}")


def _branch_root(zeta, bandB, sheet: Sheet, check=True):
    """Square root ``sigma`` with ``Sigma = 2c (zeta - sigma)`` on ``sheet``."""
    zeta = np.asarray(zeta, dtype=complex)
    if check and np.any(
        (np.abs(zeta - bandB) <= _BRANCH_TOL * bandB)
        | (np.abs(zeta + bandB) <= _BRANCH_TOL * bandB)
    ):
        raise BranchPointError("self-energy evaluated at a band-edge branch point")
    # product form: cut exactly on [-B, B], limit from above for zeta on the cut
    s = np.sqrt(zeta - bandB) * np.sqrt(zeta + bandB)
    lo = np.abs(zeta - s)
    hi = np.abs(zeta + s)
    tie = np.abs(lo - hi) <= _TIE * (lo + hi)
    first = np.where(tie | (lo < hi), s, -s)
    return first if sheet is Sheet.FIRST else -first


def self_energy(z, sheet, p: ModelParams):
    """Closed-form self-energy on the requested branch (elementwise)."""
    sheet = _as_sheet(sheet)
    z_arr = np.asarray(z, dtype=complex)
    if p.g0 == 0:
        out = np.zeros_like(z_arr)
    else:
        zeta = z_arr - p.deltaB
        sigma = _branch_root(zeta, p.bandB, sheet)
        out = 2.0 * p.coupling_ratio * (zeta - sigma)
    return out if out.ndim else complex(out)


def self_energy_derivative(z, sheet, p: ModelParams):
    """``d Sigma / dz`` on the requested branch."""
    sheet = _as_sheet(sheet)
    z_arr = np.asarray(z, dtype=complex)
    if p.g0 == 0:
        out = np.zeros_like(z_arr)
    else:
        zeta = z_arr - p.deltaB
        sigma = _branch_root(zeta, p.bandB, sheet)
        out = 2.0 * p.coupling_ratio * (1.0 - zeta / sigma)
    return out if out.ndim else complex(out)


def self_energy_quadrature(z: complex, p: ModelParams, *, epsabs=1e-13, epsrel=1e-12) -> complex:
    """First-sheet self-energy from its defining band integral.

    Integrates ``g(D)**2 / (z - D)`` after the substitution
    ``D = deltaB + B cos(theta)``.  Independent of the closed form and used to
    check it.
    """
    z = complex(z)
    lo, hi = p.band_edges
    if z.imag == 0 and lo <= z.real <= hi:
        raise ParameterError("z on the cut: principal values are not supported, offset by +/- i eps")
    if p.g0 == 0:
        return 0j
    pref = 2.0 * p.g0**2 / math.pi

    def integrand(theta, part):
        d = p.deltaB + p.bandB * math.cos(theta)
        val = math.sin(theta) ** 2 / (z - d)
        return val.real if part == 0 else val.imag

    pts = None
    if lo < z.real < hi:
        pts = [math.acos((z.real - p.deltaB) / p.bandB)]
    re, _ = integrate.quad(integrand, 0.0, math.pi, args=(0,), epsabs=epsabs, epsrel=epsrel, limit=400, points=pts)
    im, _ = integrate.quad(integrand, 0.0, math.pi, args=(1,), epsabs=epsabs, epsrel=epsrel, limit=400, points=pts)
    return pref * complex(re, im)


def _unpack(point, sheet):
    if isinstance(point, ComplexPoint):
        return point.z, point.sheet
    return point, FIRST_SHEET if sheet is None else sheet


def effective_liouvillian(point, p: ModelParams, sheet: SheetSelector = None):
    """2x2 matrix ``[[d0 + Sigma(z), f0], [-f0, -d0 - Sigma(-z)]]``.

    Accepts a :class:`ComplexPoint` or a bare ``z`` (first sheet unless
    ``sheet`` is given).  Array ``z`` returns shape ``z.shape + (2, 2)``.
    """
    z, sheet = _unpack(point, sheet)
    z = np.asarray(z, dtype=complex)
    sp = self_energy(z, sheet.plus, p)
    sm = self_energy(-z, sheet.minus, p)
    out = np.empty(z.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = p.delta0 + sp
    out[..., 0, 1] = p.f0
    out[..., 1, 0] = -p.f0
    out[..., 1, 1] = -p.delta0 - sm
    return out


def green_inverse(point, p: ModelParams, sheet: SheetSelector = None):
    """``det[z I - L_eff(z)] = [z - d0 - Sigma(z)][z + d0 + Sigma(-z)] + f0**2``."""
    z, sheet = _unpack(point, sheet)
    z_arr = np.asarray(z, dtype=complex)
    sp = self_energy(z_arr, sheet.plus, p)
    sm = self_energy(-z_arr, sheet.minus, p)
    out = (z_arr - p.delta0 - sp) * (z_arr + p.delta0 + sm) + p.f0**2
    return out if np.ndim(out) else complex(out)


def green_inverse_derivative(point, p: ModelParams, sheet: SheetSelector = None):
    """Analytic ``d/dz`` of :func:`green_inverse` on fixed sheets."""
    z, sheet = _unpack(point, sheet)
    z_arr = np.asarray(z, dtype=complex)
    sp = self_energy(z_arr, sheet.plus, p)
    sm = self_energy(-z_arr, sheet.minus, p)
    dsp = self_energy_derivative(z_arr, sheet.plus, p)
    # d/dz Sigma(-z) = -Sigma'(-z)
    dsm = -self_energy_derivative(-z_arr, sheet.minus, p)
    out = (1.0 - dsp) * (z_arr + p.delta0 + sm) + (z_arr - p.delta0 - sp) * (1.0 + dsm)
    return out if np.ndim(out) else complex(out)


def green(point, p: ModelParams, sheet: SheetSelector = None):
    """Green function ``G(z) = 1 / green_inverse(z)``.

    Raises :class:`PoleError` (with the offending location) when the inverse
    vanishes.
    """
    z, sheet = _unpack(point, sheet)
    inv = np.asarray(green_inverse(z, p, sheet))
    scale = 1.0 + np.abs(np.asarray(z, dtype=complex)) ** 2
    bad = np.abs(inv) <= _POLE_TOL * scale
    if np.any(bad):
        loc = np.asarray(z, dtype=complex)[bad] if np.ndim(z) else complex(z)
        raise PoleError(f"Green function pole at z={loc}", location=loc)
    out = 1.0 / inv
    return out if out.ndim else complex(out)
