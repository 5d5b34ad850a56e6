"""Complex eigenfrequencies: zeros of the inverse Green function on each sheet.

Zeros are located by counting the winding of ``green_inverse`` around
rectangles (argument principle), subdividing until each cell holds a single
zero, and polishing with Newton's method.  Parameter sweeps continue each
zero with a secant predictor, re-solve with Newton on every reachable sheet
and assign the candidates to tracks by minimum-distance matching.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy import optimize

from .analytic import (
    FIRST_SHEET,
    SheetSelector,
    _branch_root,
    reachable_sheets,
)
from .errors import ConvergenceError, ParameterError, TrackBreakError
from .model import ModelParams

ROOT_TOL = 1e-10
REAL_TOL = 1e-9
NEWTON_TOL = 1e-12
MAX_DEPTH = 40
CUT_GAP = 1e-6
COALESCENCE_TOL = 1e-4


class Classification(enum.Enum):
    REAL_FIRST = "RealFirstSheet"
    REAL_SECOND = "RealSecondSheet"
    COMPLEX_FIRST = "ComplexFirstSheet"
    COMPLEX_SECOND = "ComplexSecondSheet"


class Event(enum.Enum):
    EXCEPTIONAL_POINT = "ExceptionalPoint"
    SHEET_CROSSING = "SheetCrossing"
    REAL_AXIS_CROSSING = "RealAxisCrossing"


@dataclass(frozen=True)
class Rectangle:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_max > self.re_min and self.im_max > self.im_min):
            raise ParameterError("degenerate rectangle")

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    @property
    def diameter(self) -> float:
        return math.hypot(self.re_max - self.re_min, self.im_max - self.im_min)

    def contains(self, z: complex, pad: float = 0.0) -> bool:
        return (
            self.re_min - pad <= z.real <= self.re_max + pad
            and self.im_min - pad <= z.imag <= self.im_max + pad
        )

    def split(self, frac: float = 0.5):
        """Halve along the longer side at fraction ``frac``."""
        w = self.re_max - self.re_min
        h = self.im_max - self.im_min
        if w >= h:
            x = self.re_min + frac * w
            return (Rectangle(self.re_min, x, self.im_min, self.im_max),
                    Rectangle(x, self.re_max, self.im_min, self.im_max))
        y = self.im_min + frac * h
        return (Rectangle(self.re_min, self.re_max, self.im_min, y),
                Rectangle(self.re_min, self.re_max, y, self.im_max))


@dataclass(frozen=True)
class EigenRecord:
    """One zero of the inverse Green function."""

    z: complex
    sheet: SheetSelector
    classification: Classification
    residue: complex
    quartet_id: str
    multiplicity: int = 1

    @property
    def is_first_sheet(self) -> bool:
        return self.sheet.is_first


@dataclass(frozen=True)
class TrackEvent:
    value: float
    kind: Event
    z: complex


@dataclass
class BranchTrack:
    """Samples of one continued eigenfrequency along a parameter axis."""

    branch_id: int
    parameter: str
    samples: List[tuple] = field(default_factory=list)
    events: List[TrackEvent] = field(default_factory=list)

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.samples])

    @property
    def z(self) -> np.ndarray:
        return np.array([r.z for _, r in self.samples])


# ---------------------------------------------------------------------------
# evaluation helpers (no branch-point guard: used inside iterations)

def _d_and_derivative(z, p: ModelParams, sheet: SheetSelector):
    z = np.asarray(z, dtype=complex)
    c2 = 2.0 * p.coupling_ratio
    if p.g0 == 0:
        sp = sm = dsp = dsm = 0.0
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            zp = z - p.deltaB
            sig_p = _branch_root(zp, p.bandB, sheet.plus, check=False)
            sp = c2 * (zp - sig_p)
            dsp = c2 * (1.0 - zp / sig_p)
            zm = -z - p.deltaB
            sig_m = _branch_root(zm, p.bandB, sheet.minus, check=False)
            sm = c2 * (zm - sig_m)
            dsm = -c2 * (1.0 - zm / sig_m)
    left = z - p.delta0 - sp
    right = z + p.delta0 + sm
    d = left * right + p.f0**2
    dd = (1.0 - dsp) * right + left * (1.0 + dsm)
    return d, dd


def _root_tol(z) -> float:
    return ROOT_TOL * max(1.0, abs(z) ** 2)


def _newton(seeds, p: ModelParams, sheet: SheetSelector, maxiter: int = 60):
    """Vectorised Newton iteration; returns (roots, converged_mask)."""
    z = np.array(seeds, dtype=complex, ndmin=1)
    done = np.zeros(z.shape, dtype=bool)
    for _ in range(maxiter):
        d, dd = _d_and_derivative(z, p, sheet)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(done, 0.0, d / dd)
        bad = ~np.isfinite(step)
        step[bad] = 0.0
        z = z - step
        small = np.abs(step) <= NEWTON_TOL * np.maximum(1.0, np.abs(z))
        done |= small & ~bad
        if done.all():
            break
    d, _ = _d_and_derivative(z, p, sheet)
    ok = done & np.isfinite(z) & (np.abs(d) <= ROOT_TOL * np.maximum(1.0, np.abs(z) ** 2))
    return z, ok


def _classify(z: complex, sheet: SheetSelector) -> Classification:
    real = abs(z.imag) < REAL_TOL
    if sheet.is_first:
        return Classification.REAL_FIRST if real else Classification.COMPLEX_FIRST
    return Classification.REAL_SECOND if real else Classification.COMPLEX_SECOND


def quartet_key(z: complex, sheet: SheetSelector) -> str:
    """Label shared by ``z``, ``-z``, ``z*`` and ``-z*`` (on their sheets)."""
    labels = sorted([sheet.plus.value, sheet.minus.value])
    return f"q[{abs(z.real):.8f},{abs(z.imag):.8f}|{labels[0]}/{labels[1]}]"


def make_record(z: complex, p: ModelParams, sheet: SheetSelector, multiplicity: int = 1) -> EigenRecord:
    z = complex(z)
    _, dd = _d_and_derivative(z, p, sheet)
    dd = complex(dd)
    residue = 1.0 / dd if abs(dd) > 1e-12 else complex("nan")
    return EigenRecord(z, sheet, _classify(z, sheet), residue, quartet_key(z, sheet), multiplicity)


# ---------------------------------------------------------------------------
# argument principle

class _BoundaryHit(Exception):
    pass


def _edge_points(a: complex, b: complex, n: int) -> np.ndarray:
    return a + (b - a) * np.linspace(0.0, 1.0, n)


def winding_number(func, rect: Rectangle, *, n0: int = 24, max_passes: int = 60) -> int:
    """Winding number of ``func`` around ``rect`` by adaptive phase tracking.

    Boundary samples are refined until consecutive values differ in phase by
    less than pi/6 and in modulus by less than a factor e.  Raises
    ``_BoundaryHit`` when the boundary passes (numerically) through a zero.
    """
    corners = [complex(rect.re_min, rect.im_min), complex(rect.re_max, rect.im_min),
               complex(rect.re_max, rect.im_max), complex(rect.re_min, rect.im_max)]
    pts = np.concatenate([_edge_points(corners[i], corners[(i + 1) % 4], n0)[:-1] for i in range(4)])
    pts = np.append(pts, pts[0])
    vals = np.asarray(func(pts), dtype=complex)
    scale = rect.diameter
    for _ in range(max_passes):
        if np.any(vals == 0) or not np.all(np.isfinite(vals)):
            raise _BoundaryHit
        ratio = vals[1:] / vals[:-1]
        bad = (np.abs(np.angle(ratio)) > math.pi / 6) | (np.abs(np.log(np.abs(ratio))) > 1.0)
        if not bad.any():
            return int(round(np.sum(np.angle(ratio)) / (2 * math.pi)))
        idx = np.nonzero(bad)[0]
        if np.min(np.abs(pts[idx + 1] - pts[idx])) < 1e-15 * max(scale, 1.0):
            raise _BoundaryHit
        mids = 0.5 * (pts[idx] + pts[idx + 1])
        mvals = np.asarray(func(mids), dtype=complex)
        pts = np.insert(pts, idx + 1, mids)
        vals = np.insert(vals, idx + 1, mvals)
    raise _BoundaryHit


def _cuts(p: ModelParams):
    """Real-axis intervals where Sigma(z) or Sigma(-z) jumps."""
    if p.g0 == 0:
        return []
    b, d = p.bandB, p.deltaB
    segs = sorted([(d - b, d + b), (-d - b, -d + b)])
    merged = [list(segs[0])]
    for lo, hi in segs[1:]:
        if lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [tuple(s) for s in merged]


def admissible_cells(rect: Rectangle, p: ModelParams, gap: float = CUT_GAP) -> List[Rectangle]:
    """Split ``rect`` so no cell contains or touches a branch cut."""
    cuts = _cuts(p)
    if not cuts or rect.im_min >= gap or rect.im_max <= -gap:
        return [rect]
    cells = []
    if rect.im_max > gap:
        cells.append(Rectangle(rect.re_min, rect.re_max, max(gap, rect.im_min), rect.im_max))
    if rect.im_min < -gap:
        cells.append(Rectangle(rect.re_min, rect.re_max, rect.im_min, min(-gap, rect.im_max)))
    lo_y, hi_y = max(-gap, rect.im_min), min(gap, rect.im_max)
    x = rect.re_min
    for lo, hi in cuts:
        a, b = lo - gap, hi + gap
        if a > x:
            right = min(a, rect.re_max)
            if right > x:
                cells.append(Rectangle(x, right, lo_y, hi_y))
        x = max(x, b)
        if x >= rect.re_max:
            break
    if x < rect.re_max:
        cells.append(Rectangle(x, rect.re_max, lo_y, hi_y))
    return cells


def default_search_box(p: ModelParams) -> Rectangle:
    half_re = p.bandB + abs(p.deltaB) + abs(p.delta0) + p.f0 + p.bandB
    half_im = p.f0 + p.bandB
    return Rectangle(-half_re, half_re, -half_im, half_im)


def _search_cell(func, newton, cell: Rectangle, winding: int, depth: int, out: list):
    if winding == 0:
        return
    if winding == 1 or depth >= MAX_DEPTH or cell.diameter < 1e-13:
        z, ok = newton(cell.center)
        if ok and cell.contains(z, pad=1e-9 * max(1.0, cell.diameter)):
            out.append((z, winding))
            return
        if depth >= MAX_DEPTH or cell.diameter < 1e-13:
            if winding > 1:
                # unresolved cluster (double root at an exceptional point)
                out.append((z if ok else cell.center, winding))
                return
            raise ConvergenceError(f"Newton failed inside a cell with winding 1 at {cell}")
    children = None
    for frac in (0.5, 0.5 + 0.0731, 0.5 - 0.0613, 0.5 + 0.1372):
        try:
            kids = cell.split(frac)
            windings = [winding_number(func, k) for k in kids]
        except _BoundaryHit:
            continue
        children = list(zip(kids, windings))
        break
    if children is None:
        raise ConvergenceError(f"could not subdivide {cell} without hitting a zero")
    if sum(w for _, w in children) != winding:
        raise ConvergenceError(f"winding mismatch while subdividing {cell}")
    for kid, w in children:
        _search_cell(func, newton, kid, w, depth + 1, out)


def find_eigenfrequencies(p: ModelParams, sheet: SheetSelector = FIRST_SHEET,
                          search: Optional[Rectangle] = None) -> List[EigenRecord]:
    """All zeros of ``green_inverse`` on ``sheet`` inside ``search``.

    The rectangle is first cut into pieces that avoid the branch cuts by
    ``CUT_GAP``; zeros inside that gap along a cut cannot be represented on a
    single sheet and are not reported.

    Raises
    ------
    ConvergenceError
        If the number of polished roots disagrees with the winding count.
    """
    search = search or default_search_box(p)

    def func(z):
        return _d_and_derivative(z, p, sheet)[0]

    def newton(z0):
        z, ok = _newton([z0], p, sheet)
        return complex(z[0]), bool(ok[0])

    found = []
    expected = 0
    for cell in admissible_cells(search, p):
        w = None
        for shrink in (0.0, 1e-9, 3.7e-9, 1.3e-8):
            c = cell if shrink == 0 else Rectangle(cell.re_min + shrink, cell.re_max - shrink,
                                                    cell.im_min + shrink * (cell.im_min != -cell.im_max),
                                                    cell.im_max - shrink * (cell.im_min != -cell.im_max))
            try:
                w = winding_number(func, c)
                cell = c
                break
            except _BoundaryHit:
                continue
        if w is None:
            raise ConvergenceError(f"search boundary passes through a zero: {cell}")
        if w < 0:
            raise ConvergenceError(f"negative winding {w} (pole inside {cell})")
        expected += w
        _search_cell(func, newton, cell, w, 0, found)
    if sum(m for _, m in found) != expected:
        raise ConvergenceError("root count does not match the winding number")
    records = [make_record(z, p, sheet, m) for z, m in found]
    records.sort(key=lambda r: (round(r.z.real, 9), round(r.z.imag, 9)))
    return records


def all_eigenfrequencies(p: ModelParams, sheets: Optional[Sequence[SheetSelector]] = None,
                         search: Optional[Rectangle] = None) -> List[EigenRecord]:
    """Zeros on every sheet connected to the physical one (or ``sheets``)."""
    out = []
    for s in sheets or reachable_sheets(p):
        out.extend(find_eigenfrequencies(p, s, search))
    return out


def quartet_partners(record: EigenRecord) -> list:
    """``(z, sheet)`` pairs for -z, z* and -z* implied by the symmetries."""
    z, s = record.z, record.sheet
    return [(-z, s.mirrored()), (z.conjugate(), s.conjugated()), (-z.conjugate(), s.mirrored().conjugated())]


def instability_rate(p: ModelParams, search: Optional[Rectangle] = None) -> Optional[float]:
    """Largest positive imaginary part among first-sheet zeros, else ``None``."""
    box = search or default_search_box(p)
    upper = Rectangle(box.re_min, box.re_max, CUT_GAP, box.im_max)
    roots = find_eigenfrequencies(p, FIRST_SHEET, upper)
    rates = [r.z.imag for r in roots if r.z.imag > REAL_TOL]
    return max(rates) if rates else None


def threshold_detuning(p: ModelParams) -> Optional[float]:
    """Detuning below which a first-sheet zero sits in the upper half plane.

    Closed form ``sqrt(f0**2 - 4 g0**4 / B**2)`` (zero crossing at the band
    centre, valid for ``deltaB = 0``); ``None`` when the drive never wins.
    For ``deltaB != 0`` the instability window is no longer symmetric; the
    crossing on the positive-detuning side is located numerically instead.
    """
    disc = p.f0**2 - 4.0 * p.g0**4 / p.bandB**2
    if p.deltaB != 0:
        return locate_threshold_crossing(p) if p.f0 > 0 else None
    if disc <= 0:
        return None
    return math.sqrt(disc)


# ---------------------------------------------------------------------------
# continuation

def _type(z: complex) -> str:
    if abs(z.imag) < REAL_TOL:
        return "real"
    if abs(z.real) < REAL_TOL:
        return "imag"
    return "complex"


def _cut_contains(x: float, p: ModelParams, factor: str) -> bool:
    if factor == "plus":
        return abs(x - p.deltaB) < p.bandB
    return abs(-x - p.deltaB) < p.bandB


def _branch_points(p: ModelParams, factor: str):
    lo, hi = p.deltaB - p.bandB, p.deltaB + p.bandB
    return (lo, hi) if factor == "plus" else (-hi, -lo)


def _seg_point_distance(a: complex, b: complex, c: complex) -> float:
    ab = b - a
    if ab == 0:
        return abs(c - a)
    t = ((c - a) * ab.conjugate()).real / abs(ab) ** 2
    t = min(1.0, max(0.0, t))
    return abs(a + t * ab - c)


def _crosses_cut(a: complex, b: complex, p: ModelParams, factor: str) -> bool:
    if a.imag * b.imag >= 0:
        return False
    t = a.imag / (a.imag - b.imag)
    x = a.real + t * (b.real - a.real)
    return _cut_contains(x, p, factor)


def _admissible(a: complex, sa: SheetSelector, b: complex, sb: SheetSelector,
                p: ModelParams, radius: float) -> bool:
    for factor in ("plus", "minus"):
        old, new = getattr(sa, factor), getattr(sb, factor)
        crossed = _crosses_cut(a, b, p, factor)
        near_bp = any(_seg_point_distance(a, b, bp) < radius for bp in _branch_points(p, factor))
        if crossed and old is new:
            return False
        if old is not new and not (crossed or near_bp):
            return False
    return True


def locate_exceptional_point(p: ModelParams, sheet: SheetSelector, z0: complex,
                             value0: float, parameter: str = "delta0"):
    """Refine a double zero: solve ``D = dD/dz = 0`` in ``(z, parameter)``.

    Returns ``(value, z, |dD/dz|)`` or ``None`` if no double root is found.
    """
    def resid(x):
        q = p.replace(**{parameter: x[2]})
        d, dd = _d_and_derivative(complex(x[0], x[1]), q, sheet)
        d, dd = complex(d), complex(dd)
        return [d.real, d.imag, dd.real, dd.imag]

    try:
        sol = optimize.least_squares(resid, [z0.real, z0.imag, value0], xtol=1e-15, ftol=1e-15, gtol=1e-15)
    except (ValueError, FloatingPointError):
        return None
    r = np.asarray(sol.fun)
    z = complex(sol.x[0], sol.x[1])
    if math.hypot(r[0], r[1]) > 1e-9 or math.hypot(r[2], r[3]) > 1e-5:
        return None
    return float(sol.x[2]), z, math.hypot(r[2], r[3])


def sweep_branches(p: ModelParams, delta0_range=(-2.0, 2.0), step: float = 1e-2,
                   min_step: float = 1e-7, parameter: str = "delta0",
                   sheets: Optional[Sequence[SheetSelector]] = None,
                   search: Optional[Rectangle] = None) -> List[BranchTrack]:
    """Continue every eigenfrequency along ``parameter`` over ``delta0_range``.

    The initial set comes from :func:`all_eigenfrequencies` at the start
    value.  Each step predicts by secant extrapolation, re-solves with Newton
    on all reachable sheets, and matches candidates to tracks with the
    Hungarian algorithm under sheet-consistency rules (a branch flips only
    when its cut is crossed or the path passes its branch point).  Failed
    steps are halved down to ``min_step``.

    Raises
    ------
    TrackBreakError
        When a step cannot be completed at the minimum step size.
    """
    start, stop = map(float, delta0_range)
    direction = 1.0 if stop >= start else -1.0
    sheets = tuple(sheets or reachable_sheets(p))
    q = start
    p0 = p.replace(**{parameter: q})
    init = all_eigenfrequencies(p0, sheets, search)
    if not init:
        raise ConvergenceError("no eigenfrequencies at the start of the sweep")
    tracks = [BranchTrack(i, parameter) for i in range(len(init))]
    for t, r in zip(tracks, init):
        t.samples.append((q, r))
    prev_z = [None] * len(init)
    h = step
    h_prev = step
    scale = p.bandB

    while direction * (stop - q) > 1e-12 * max(1.0, abs(stop)):
        h = min(h, abs(stop - q))
        q_new = q + direction * h
        p_new = p.replace(**{parameter: q_new})
        cur = [t.samples[-1][1] for t in tracks]
        preds = []
        for i, r in enumerate(cur):
            if prev_z[i] is None:
                preds.append(r.z)
            else:
                preds.append(r.z + (r.z - prev_z[i]) * (h / h_prev))
        # candidate roots from several seeds on every sheet
        motion = [abs(r.z - prev_z[i]) if prev_z[i] is not None else h for i, r in enumerate(cur)]
        seeds = []
        for i, zp in enumerate(preds):
            d = max(motion[i], h, 1e-6)
            seeds += [zp, zp.conjugate(), zp + 1j * d, zp - 1j * d, zp + d, zp - d]
        cands = []
        for s in sheets:
            zs, ok = _newton(seeds, p_new, s)
            for z in zs[ok]:
                z = complex(z)
                if not any(cs is s and abs(cz - z) < 1e-9 * max(1.0, abs(z)) for cz, cs in cands):
                    cands.append((z, s))
        accepted = False
        if len(cands) >= len(tracks):
            big = 1e6
            cost = np.full((len(tracks), len(cands)), big)
            for i, r in enumerate(cur):
                radius = max(4 * abs(preds[i] - r.z), 4 * motion[i], 1e-3 * scale)
                for j, (z, s) in enumerate(cands):
                    if _admissible(r.z, r.sheet, z, s, p_new, radius):
                        cost[i, j] = abs(z - preds[i])
            rows, cols = optimize.linear_sum_assignment(cost)
            assigned = cost[rows, cols]
            tau = np.array([4 * motion[i] * (h / h_prev) + 4 * h * scale + 1e-9 for i in rows])
            feasible = np.all(assigned < big)
            smooth = feasible and np.all(assigned <= tau)
            if smooth or (feasible and h <= min_step * 1.0000001):
                accepted = True
        if not accepted:
            if h <= min_step * 1.0000001:
                last = [(t.branch_id, t.samples[-1]) for t in tracks]
                raise TrackBreakError(f"continuation stalled at {parameter}={q}", last_sample=last)
            h = max(h / 2, min_step)
            continue
        forced = not smooth
        new_records = []
        for i, j in zip(rows, cols):
            z, s = cands[j]
            new_records.append((i, make_record(z, p_new, s)))
        new_records.sort()
        for i, rec in new_records:
            old = cur[i]
            t = tracks[i]
            if rec.sheet != old.sheet:
                t.events.append(TrackEvent(q_new, Event.SHEET_CROSSING, rec.z))
            if old.z.imag * rec.z.imag < 0 and min(abs(old.z.imag), abs(rec.z.imag)) > REAL_TOL:
                frac = old.z.imag / (old.z.imag - rec.z.imag)
                zc = old.z + frac * (rec.z - old.z)
                qc = q + direction * h * frac
                try:
                    x, qr = refine_real_axis_crossing(p, zc.real, qc, parameter)
                    if min(q, q_new) <= qr <= max(q, q_new):
                        zc, qc = complex(x, 0.0), qr
                except ConvergenceError:
                    pass
                t.events.append(TrackEvent(qc, Event.REAL_AXIS_CROSSING, complex(zc.real, 0.0)))
            t.samples.append((q_new, rec))
        _detect_exceptional_points(tracks, cur, [r for _, r in new_records], p, parameter, q, q_new, forced)
        for i, r in enumerate(cur):
            prev_z[i] = r.z
        q = q_new
        h_prev = h
        h = min(step, 2 * h)
    return tracks


def _detect_exceptional_points(tracks, old, new, p, parameter, q_old, q_new, forced):
    n = len(tracks)
    for i in range(n):
        for j in range(i + 1, n):
            if new[i].sheet != new[j].sheet:
                continue
            close = abs(new[i].z - new[j].z) < COALESCENCE_TOL or abs(old[i].z - old[j].z) < COALESCENCE_TOL
            type_change = (_type(old[i].z) != _type(new[i].z) and _type(old[j].z) != _type(new[j].z)
                           and old[i].sheet == new[i].sheet and old[j].sheet == new[j].sheet)
            if not (close or type_change or (forced and abs(new[i].z - new[j].z) < 1e-2)):
                continue
            seed = 0.5 * (old[i].z + old[j].z)
            if _type(seed) == "complex":
                seed = 0.25 * (old[i].z + old[j].z + new[i].z + new[j].z)
            hit = locate_exceptional_point(p, new[i].sheet, seed, 0.5 * (q_old + q_new), parameter)
            if hit is None:
                continue
            value, z, _ = hit
            lo, hi = sorted((q_old, q_new))
            width = hi - lo
            if not (lo - width <= value <= hi + width):
                continue
            ev = TrackEvent(value, Event.EXCEPTIONAL_POINT, z)
            for k in (i, j):
                if not any(e.kind is Event.EXCEPTIONAL_POINT and abs(e.value - value) < 1e-6
                           for e in tracks[k].events):
                    tracks[k].events.append(ev)


def events(tracks: Sequence[BranchTrack]) -> List[tuple]:
    """Flattened ``(value, branch_id, TrackEvent)`` list sorted by value."""
    out = [(e.value, t.branch_id, e) for t in tracks for e in t.events]
    out.sort(key=lambda x: (x[0], x[1], x[2].kind.value))
    return out


def refine_real_axis_crossing(p: ModelParams, x0: float, value0: float,
                              parameter: str = "delta0") -> tuple:
    """Solve ``D(x + i0; first sheet) = 0`` for real ``(x, parameter)``."""
    eps = 1e-13 * p.bandB

    def resid(v):
        q = p.replace(**{parameter: v[1]})
        d, _ = _d_and_derivative(complex(v[0], eps), q, FIRST_SHEET)
        d = complex(d)
        return [d.real, d.imag]

    sol = optimize.root(resid, [x0, value0], method="hybr", options={"xtol": 1e-14})
    if not sol.success or math.hypot(*sol.fun) > 1e-10:
        raise ConvergenceError(f"real-axis crossing refinement failed: {sol.message}")
    return float(sol.x[0]), float(sol.x[1])


def locate_threshold_crossing(p: ModelParams, span: Optional[tuple] = None, step: float = 1e-2) -> Optional[float]:
    """Threshold detuning from the sweep: where a zero crosses into the first sheet.

    Sweeps ``delta0`` from 0 outwards over ``span`` (default up to
    ``f0 + B/2``), takes the first ``RealAxisCrossing`` event and refines it
    with :func:`refine_real_axis_crossing`.  Returns ``|delta0|`` or ``None``.
    """
    span = span or (0.0, p.f0 + 0.5 * p.bandB)
    tracks = sweep_branches(p, span, step=step)
    hits = [(e.value, e.z) for t in tracks for e in t.events if e.kind is Event.REAL_AXIS_CROSSING]
    if not hits:
        return None
    hits.sort(key=lambda h: abs(h[0] - span[0]))
    value, z = hits[0]
    _, q = refine_real_axis_crossing(p, z.real, value)
    return abs(q)
