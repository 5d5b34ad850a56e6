"""Command-line front end.

Examples
--------
    parametric-emission threshold --set f0=0.2 --set g0=0.3
    parametric-emission sweep --figure 2 --out results --format svg
    parametric-emission evolve --figure 6 --backend both
"""
from __future__ import annotations

import argparse
import enum
import json
import sys
import traceback
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from .dynamics import BromwichConfig, coefficient_set
from .emission import (
    emission_spectrum_from_dynamics,
    emission_spectrum_stationary,
    emission_spectrum_unstable,
    photon_flux_stationary,
    summary,
)
from .errors import (
    AccuracyError,
    ConfigurationError,
    ConvergenceError,
    HorizonError,
    ParameterError,
    RegimeError,
)
from .io import line_plot, parse_overrides, read_config, write_csv, write_json
from .model import PARAM_KEYS, ModelParams
from .oracle import LatticeConfig, LatticeOracle, photon_numbers
from .spectral import all_eigenfrequencies, events, instability_rate, locate_threshold_crossing, sweep_branches

EXIT_OK, EXIT_USAGE, EXIT_CONVERGENCE = 0, 2, 3


class Command(enum.Enum):
    EIGS = "eigs"
    SWEEP = "sweep"
    EVOLVE = "evolve"
    SPECTRUM = "spectrum"
    FLUX = "flux"
    THRESHOLD = "threshold"
    FEXP = "fexp"


MODEL_DEFAULTS = {"delta0": "0", "f0": "0.2", "g0": "0.3", "bandB": "1", "deltaB": "0"}

RUN_DEFAULTS = {
    "delta0_min": -2.0,
    "delta0_max": 2.0,
    "step": 0.01,
    "t_max": 100.0,
    "t_count": 21,
    "delta_count": 201,
    "n_sites": 512,
    "integrator": "eigen",
    "t_probe": 200.0,
    "site": 100,
    "fit_window": 5.0,
    "atol": 1e-10,
    "rtol": 1e-8,
    "delta0_list": "",
}
_INT_KEYS = {"t_count", "delta_count", "n_sites", "site"}
_STR_KEYS = {"integrator", "delta0_list"}

# figure presets: (command, shared keys, detunings drawn as separate series)
PRESETS = {
    1: (Command.SWEEP, {"g0": "0", "f0": "0.2", "deltaB": "0", "delta0_min": "-2", "delta0_max": "2"}, None),
    2: (Command.SWEEP, {"g0": "0.3", "f0": "0.2", "deltaB": "0", "delta0_min": "-2", "delta0_max": "2"}, None),
    3: (Command.SWEEP, {"g0": "0.3", "f0": "0.1", "deltaB": "0", "delta0_min": "-2", "delta0_max": "2"}, None),
    4: (Command.EVOLVE, {"delta0": "0", "deltaB": "0", "g0": "0.3", "f0": "0.2", "t_max": "300", "t_count": "31"}, None),
    5: (Command.FEXP, {"delta0": "0", "deltaB": "0", "g0": "0.3", "f0": "0.2", "t_probe": "200"}, None),
    6: (Command.EVOLVE, {"delta0": "0", "deltaB": "0", "g0": "0.3", "f0": "0.1", "t_max": "300", "t_count": "31"}, None),
    7: (Command.SPECTRUM, {"delta0": "0", "deltaB": "0", "g0": "0.3", "f0": "0.1"}, None),
    8: (Command.EVOLVE, {"deltaB": "0", "g0": "0.3", "f0": "0.2", "t_max": "300", "t_count": "31"}, "0.15,0.3"),
    9: (Command.SPECTRUM, {"deltaB": "0", "g0": "0.3", "f0": "0.2"}, "0.15,0.3"),
}


@dataclass
class RunConfig:
    """Everything one CLI invocation needs."""

    command: Command
    params: ModelParams
    settings: dict
    backend: Optional[str] = None
    out: Path = Path(".")
    fmt: str = "csv"
    series: List[float] = field(default_factory=list)
    figure: Optional[int] = None

    def __post_init__(self):
        s = self.settings
        if s["t_count"] < 2 or s["delta_count"] < 2:
            raise ConfigurationError("grid counts must be at least 2")
        if not s["delta0_max"] > s["delta0_min"]:
            raise ConfigurationError("delta0_max must exceed delta0_min")
        if not s["t_max"] > 0 or not s["step"] > 0:
            raise ConfigurationError("t_max and step must be positive")

    def lattice(self) -> LatticeConfig:
        return LatticeConfig(n_sites=self.settings["n_sites"], integrator=self.settings["integrator"])

    def bromwich(self) -> BromwichConfig:
        return BromwichConfig(atol=self.settings["atol"], rtol=self.settings["rtol"])

    def param_sets(self):
        if not self.series:
            return [("", self.params)]
        return [(f"_delta0_{d:g}", self.params.replace(delta0=d)) for d in self.series]


def build_config(command: str, *, config_path=None, overrides=None, figure=None,
                 backend=None, out=".", fmt="csv") -> RunConfig:
    cmd = Command(command)
    values = dict(MODEL_DEFAULTS)
    series = None
    if figure is not None:
        if figure not in PRESETS:
            raise ConfigurationError(f"no preset for figure {figure}; choose 1-9")
        preset_cmd, preset, series = PRESETS[figure]
        if preset_cmd is not cmd:
            raise ConfigurationError(f"figure {figure} is produced by '{preset_cmd.value}', not '{cmd.value}'")
        values.update(preset)
    if config_path:
        values.update(read_config(config_path))
    values.update(overrides or {})
    if values.get("delta0_list"):
        series = values["delta0_list"]
    unknown = set(values) - set(PARAM_KEYS) - set(RUN_DEFAULTS)
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    params = ModelParams.from_dict({k: v for k, v in values.items() if k in PARAM_KEYS})
    settings = dict(RUN_DEFAULTS)
    for key in RUN_DEFAULTS:
        if key in values:
            raw = values[key]
            try:
                if key in _STR_KEYS:
                    settings[key] = str(raw)
                elif key in _INT_KEYS:
                    settings[key] = int(float(raw))
                else:
                    settings[key] = float(raw)
            except ValueError as exc:
                raise ConfigurationError(f"{key}={raw!r} is not a number") from exc
    try:
        series_vals = [float(x) for x in series.split(",") if x.strip()] if series else []
    except ValueError as exc:
        raise ConfigurationError(f"bad detuning list {series!r}") from exc
    if backend not in (None, "laplace", "oracle", "both"):
        raise ConfigurationError(f"unknown backend {backend!r}")
    if fmt not in ("csv", "json", "svg"):
        raise ConfigurationError(f"unknown format {fmt!r}")
    out = Path(out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigurationError(f"output directory {out} is not writable: {exc}") from exc
    return RunConfig(cmd, params, settings, backend, out, fmt, series_vals, figure)


# ---------------------------------------------------------------------------
# table emitters

def _emit(cfg: RunConfig, stem: str, header, rows, plot=None) -> List[Path]:
    """Write rows as CSV (or JSON); with ``svg`` also draw ``plot``."""
    rows = list(rows)
    files = []
    if cfg.fmt == "json":
        files.append(write_json(cfg.out / f"{stem}.json", [dict(zip(header, r)) for r in rows]))
    else:
        files.append(write_csv(cfg.out / f"{stem}.csv", header, rows))
    if cfg.fmt == "svg" and plot is not None:
        files.append(plot(cfg.out / f"{stem}.svg"))
    return files


def _time_grid(cfg: RunConfig) -> np.ndarray:
    return np.linspace(0.0, cfg.settings["t_max"], cfg.settings["t_count"])


def _delta_grid(cfg: RunConfig, p: ModelParams) -> np.ndarray:
    half = max(p.bandB - abs(p.deltaB), 0.0)
    return np.linspace(-half, half, cfg.settings["delta_count"])


def run_eigs(cfg: RunConfig) -> List[Path]:
    files = []
    header = ("re_z", "im_z", "sheet_plus", "sheet_minus", "classification", "re_residue", "im_residue",
              "quartet_id")
    for tag, p in cfg.param_sets():
        rows = [(r.z.real, r.z.imag, r.sheet.plus.value, r.sheet.minus.value, r.classification.value,
                 r.residue.real, r.residue.imag, r.quartet_id) for r in all_eigenfrequencies(p)]
        files += _emit(cfg, f"eigs{tag}", header, rows)
    return files


def run_sweep(cfg: RunConfig) -> List[Path]:
    s = cfg.settings
    files = []
    for tag, p in cfg.param_sets():
        tracks = sweep_branches(p, (s["delta0_min"], s["delta0_max"]), step=s["step"])
        rows = []
        for tr in tracks:
            for value, rec in tr.samples:
                rows.append((value, tr.branch_id, rec.z.real, rec.z.imag, rec.sheet.plus.value,
                             rec.sheet.minus.value, rec.classification.value))
        rows.sort(key=lambda r: (r[0], r[1]))

        def plot(path, part, tracks=tracks):
            series = [(f"branch {t.branch_id}", t.values, getattr(t.z, part)) for t in tracks]
            return line_plot(path, series, xlabel="delta0", ylabel=f"{part} z")

        files += _emit(cfg, f"sweep{tag}", ("delta0", "branch_id", "re_z", "im_z", "sheet_plus", "sheet_minus",
                                              "classification"), rows, lambda path: plot(path, "real"))
        if cfg.fmt == "svg":
            files.append(plot(cfg.out / f"sweep{tag}_im.svg", "imag"))
        ev_rows = _unique_events(events(tracks))
        files += _emit(cfg, f"events{tag}", ("delta0", "event", "re_z", "im_z"), ev_rows)
    return files


def _unique_events(evs):
    """One row per physical event; partner branches report the same point."""
    seen, rows = set(), []
    for v, _, e in evs:
        key = (round(v, 6), e.kind.value, round(e.z.real, 6), round(e.z.imag, 6) + 0.0)
        if key not in seen:
            seen.add(key)
            rows.append((v, e.kind.value, e.z.real, e.z.imag))
    return rows


def _laplace_series(p: ModelParams, times, cfg: RunConfig):
    cs = coefficient_set(times, p, cfg.bromwich())
    return [tuple(map(float, r)) for r in cs.rows()]


def _oracle_series(p: ModelParams, times, cfg: RunConfig):
    oracle = LatticeOracle(p, cfg.lattice())
    rows = []
    for t in times:
        st = oracle.state(float(t), full=True)
        n_a, _, n_tot = photon_numbers(st)
        rows.append((float(t), n_a, n_tot, st.symplectic_norm() - 1.0))
    return rows


def run_evolve(cfg: RunConfig) -> List[Path]:
    times = _time_grid(cfg)
    backend = cfg.backend or "laplace"
    header = ("t", "n_a", "n_total", "commutator_check")
    files = []
    for tag, p in cfg.param_sets():
        results = {}
        if backend in ("laplace", "both"):
            results["laplace"] = _laplace_series(p, times, cfg)
        if backend in ("oracle", "both"):
            results["oracle"] = _oracle_series(p, times, cfg)
        for name, rows in results.items():
            stem = f"timeseries{tag}" if backend != "both" else f"timeseries{tag}_{name}"

            def plot(path, rows=rows):
                arr = np.array(rows)
                return line_plot(path, [("n_a", arr[:, 0], arr[:, 1])], xlabel="t", ylabel="photon number",
                                 logy=True)

            files += _emit(cfg, stem, header, rows, plot)
        if backend == "both":
            a = np.array(results["laplace"])
            b = np.array(results["oracle"])
            files.append(write_json(cfg.out / f"diff{tag}.json", {
                "max_rel_dev_n_a": _max_rel(a[:, 1], b[:, 1]),
                "max_rel_dev_n_total": _max_rel(a[:, 2], b[:, 2]),
                "times": list(map(float, times)),
            }))
    return files


def _max_rel(a, b) -> float:
    scale = np.maximum(np.abs(b), 1e-3)
    return float(np.max(np.abs(a - b) / scale))


def run_spectrum(cfg: RunConfig) -> List[Path]:
    files = []
    header = ("delta", "value", "kind")
    for tag, p in cfg.param_sets():
        grid = _delta_grid(cfg, p)
        spectra = [("formula", emission_spectrum_stationary(grid, p))]
        inner = grid[1:-1]
        for name in ("laplace", "oracle"):
            if cfg.backend in (name, "both"):
                spectra.append((name, emission_spectrum_from_dynamics(
                    inner, p, cfg.settings["t_probe"], backend=name, lattice=cfg.lattice(),
                    bromwich=cfg.bromwich())))
        rows = [r for _, sp in spectra for r in sp.rows()]

        def plot(path, spectra=spectra):
            return line_plot(path, [(n, sp.deltas, sp.values) for n, sp in spectra], xlabel="Delta",
                             ylabel="F(Delta)")

        files += _emit(cfg, f"spectrum{tag}", header, rows, plot)
    return files


def run_flux(cfg: RunConfig) -> List[Path]:
    files = []
    for tag, p in cfg.param_sets():
        oracle = LatticeOracle(p, cfg.lattice())
        times = _time_grid(cfg)
        flux = oracle.flux(times, cfg.settings["site"])
        rows = list(zip(times, flux))

        def plot(path, rows=rows):
            arr = np.array(rows)
            return line_plot(path, [("oracle", arr[:, 0], arr[:, 1])], xlabel="t", ylabel="flux")

        files += _emit(cfg, f"flux{tag}", ("t", "flux"), rows, plot)
        theta_val, direct = photon_flux_stationary(p, return_both=True)
        files.append(write_json(cfg.out / f"flux_summary{tag}.json", {
            "flux": theta_val, "flux_integral_of_spectrum": direct,
            "oracle_plateau": float(np.mean(flux[len(flux) // 2:])), "site": cfg.settings["site"]}))
    return files


def run_threshold(cfg: RunConfig) -> List[Path]:
    files = []
    for tag, p in cfg.param_sets():
        data = summary(p)
        crossing = None
        if data["threshold"] is not None and p.deltaB == 0:
            crossing = locate_threshold_crossing(p)
        data["threshold_sweep"] = crossing
        data["params"] = p.to_dict()
        files.append(write_json(cfg.out / f"summary{tag}.json", data))
    return files


def run_fexp(cfg: RunConfig) -> List[Path]:
    files = []
    for tag, p in cfg.param_sets():
        gamma = instability_rate(p)
        if gamma is None:
            raise RegimeError("fexp needs unstable parameters")
        grid = np.linspace(-10 * gamma, 10 * gamma, cfg.settings["delta_count"])
        grid = grid[np.abs(grid - p.deltaB) < p.bandB]
        spectrum, gamma_fit = emission_spectrum_unstable(grid, p, cfg.settings["t_probe"],
                                                     backend=cfg.backend or "oracle", lattice=cfg.lattice(),
                                                     bromwich=cfg.bromwich(),
                                                     fit_window=cfg.settings["fit_window"])

        def plot(path, spectrum=spectrum):
            return line_plot(path, [("F_exp", spectrum.deltas, spectrum.values)], xlabel="Delta", ylabel="F_exp")

        files += _emit(cfg, f"fexp{tag}", ("delta", "value", "kind"), spectrum.rows(), plot)
        files.append(write_json(cfg.out / f"fexp_summary{tag}.json", {"gamma_I": gamma, "gamma_fit": gamma_fit}))
    return files


RUNNERS = {
    Command.EIGS: run_eigs,
    Command.SWEEP: run_sweep,
    Command.EVOLVE: run_evolve,
    Command.SPECTRUM: run_spectrum,
    Command.FLUX: run_flux,
    Command.THRESHOLD: run_threshold,
    Command.FEXP: run_fexp,
}


def run(cfg: RunConfig) -> List[Path]:
    return RUNNERS[cfg.command](cfg)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parametric-emission",
                                     description="Spectra and photon emission of a parametric oscillator "
                                                 "coupled to a photonic band.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in Command:
        sp = sub.add_parser(cmd.value)
        sp.add_argument("--config", metavar="PATH")
        sp.add_argument("--set", dest="overrides", action="append", default=[], metavar="K=V")
        sp.add_argument("--figure", type=int, metavar="N")
        sp.add_argument("--backend", choices=("laplace", "oracle", "both"))
        sp.add_argument("--oracle", action="store_true", help="shorthand for --backend oracle")
        sp.add_argument("--out", default=".", metavar="DIR")
        sp.add_argument("--format", dest="fmt", choices=("csv", "json", "svg"), default="csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    backend = "oracle" if args.oracle and args.backend is None else args.backend
    try:
        cfg = build_config(args.command, config_path=args.config, overrides=parse_overrides(args.overrides),
                           figure=args.figure, backend=backend, out=args.out, fmt=args.fmt)
        files = run(cfg)
    except (ConfigurationError, ParameterError, RegimeError, HorizonError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, AccuracyError) as exc:
        diag = {"error": type(exc).__name__, "message": str(exc),
                "traceback": traceback.format_exc().splitlines()[-6:]}
        if isinstance(exc, AccuracyError):
            diag["error_estimate"] = None if exc.error is None else np.max(exc.error).item()
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "diagnostic.json", diag)
        print(json.dumps(diag, indent=2), file=sys.stderr)
        return EXIT_CONVERGENCE
    for f in files:
        print(f)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
