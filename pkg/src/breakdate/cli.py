"""Command-line interface: ``breakdate {estimate,confset,density,mc}``.

Exit codes: 0 success, 2 input/output error, 3 invalid input or
options, 4 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from pathlib import Path

import numpy as np
from scipy import signal

from .breakscan import scan_break, two_step_predictable
from .confsets import bai_confidence_interval, full_range_set, hdr_confidence_set, kde
from .core import (
    BreakdateError,
    DegenerateDesign,
    DegenerateDomain,
    InvalidData,
    InvalidSpec,
    ModelSpec,
    TimeSeriesDataset,
    Unsupported,
    WeakIdentification,
)
from .dgp import MODELS, DgpSpec
from .limitsim import LimitSimConfig, simulate_general, simulate_stationary
from .mcharness import McCell, run_cell
from .plugin import PluginParams, compute_plugins

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_DEGENERATE = 0, 2, 3, 4

# option name -> (type, default); shared by flags and the config file
OPTIONS = {
    "input": (str, None),
    "output": (str, None),
    "trim": (float, 0.15),
    "pi": (float, 0.05),
    "span": (float, None),
    "alpha": (float, 0.05),
    "seed": (int, None),
    "n_draws": (int, 10000),
    "n_grid": (int, 2000),
    "method": (str, "hdr,bai"),
    "mode": (str, "stationary"),
    "units": (str, "rho"),
    "predictable": (bool, False),
    "lrv": (bool, False),
    "draws_out": (str, None),
    "rho2": (float, None),
    "lambda0": (str, None),
    "xi1": (float, 1.0),
    "xi2": (float, 1.0),
    "n_points": (int, 512),
    "model": (str, None),
    "delta": (str, None),
    "T": (int, 100),
    "reps": (int, 2000),
    "workers": (int, 1),
    "json_out": (str, None),
}


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _bool(v):
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment, dashes equal underscores."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read config {path}: {exc}") from exc
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(EXIT_INVALID, f"{path}:{n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file, ``BREAKDATE_SEED`` and flags (flags win)."""
    conf = read_config(args.config) if args.config else {}
    unknown = set(conf) - set(OPTIONS)
    if unknown:
        raise CliError(EXIT_INVALID, f"unknown config keys: {sorted(unknown)}")
    cfg = {}
    for name, (typ, default) in OPTIONS.items():
        flag = getattr(args, name, None)
        value = flag if flag is not None else conf.get(name, default)
        if name == "seed" and value is None:
            value = os.environ.get("BREAKDATE_SEED", 0)
        if value is not None:
            try:
                value = _bool(value) if typ is bool else typ(value)
            except ValueError as exc:
                raise CliError(EXIT_INVALID, f"bad value for {name}: {exc}") from exc
        cfg[name] = value
    return cfg


_COL = re.compile(r"^(y|d\d+|z\d+)$")


def read_csv(path, span=None) -> TimeSeriesDataset:
    """Load ``y, d1..dq, z1..zp`` with a header row."""
    if path is None:
        raise CliError(EXIT_INVALID, "an input CSV is required (--input)")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from exc
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise CliError(EXIT_INVALID, f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "y" or not all(_COL.match(h) for h in header):
        raise CliError(EXIT_INVALID, f"{path}: header must be y[,d1..dq][,z1..zp]")
    d_cols = [i for i, h in enumerate(header) if h.startswith("d")]
    z_cols = [i for i, h in enumerate(header) if h.startswith("z")]
    if not z_cols:
        raise CliError(EXIT_INVALID, f"{path}: at least one z column is required")
    body = [r for r in rows[1:] if any(c.strip() for c in r)]
    try:
        a = np.array([[float(c) for c in r] for r in body])
    except ValueError as exc:
        raise CliError(EXIT_INVALID, f"{path}: non-numeric entry ({exc})") from exc
    if a.ndim != 2 or a.shape[1] != len(header):
        raise CliError(EXIT_INVALID, f"{path}: ragged rows")
    try:
        return TimeSeriesDataset(a[:, 0], a[:, d_cols], a[:, z_cols], N=span or 1.0)
    except InvalidData as exc:
        raise CliError(EXIT_INVALID, f"{path}: {exc}") from exc


def _emit(text: str, path):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def _finite(obj):
    """Non-finite numbers become ``null`` so reports stay strict JSON."""
    if isinstance(obj, float):
        return obj if np.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def _json(obj) -> str:
    return json.dumps(_finite(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _floats(a):
    return [float(v) for v in np.atleast_1d(a)]


def _estimate(cfg, data):
    spec = ModelSpec(trim=cfg["trim"], pi=cfg["pi"], has_predictable=cfg["predictable"])
    return two_step_predictable(data, spec) if cfg["predictable"] else scan_break(data, spec)


def _plugins(cfg, data, est):
    try:
        return compute_plugins(data, est, lrv=cfg["lrv"]), None
    except WeakIdentification as exc:
        return None, str(exc)


def _plugin_dict(p: PluginParams | None):
    if p is None:
        return None
    return {k: getattr(p, k) for k in ("xi1", "xi2", "rho", "vartheta", "sigma_bar_sq", "lambda_hat")}


def _estimate_report(data, est, params, weak):
    r = {
        "T": data.T,
        "t_hat": est.t_hat,
        "lambda_hat": est.lambda_hat,
        "beta_hat": _floats(est.beta_hat),
        "delta_hat": _floats(est.delta_hat),
        "ssr": est.ssr,
        "plugins": _plugin_dict(params),
        "weak_identification": weak is not None,
    }
    if est.predictable_coeffs is not None:
        r["predictable_coeffs"] = dict(zip(("mu1", "alpha1", "mu2", "alpha2"), est.predictable_coeffs))
    return r


def cmd_estimate(cfg) -> int:
    data = read_csv(cfg["input"], cfg["span"])
    est = _estimate(cfg, data)
    params, weak = _plugins(cfg, data, est)
    _emit(_json(_estimate_report(data, est, params, weak)), cfg["output"])
    return EXIT_OK


def _methods(cfg):
    methods = [m.strip() for m in cfg["method"].split(",") if m.strip()]
    bad = set(methods) - {"hdr", "bai"}
    if bad or not methods:
        raise CliError(EXIT_INVALID, f"unknown method(s): {sorted(bad) or cfg['method']}")
    return methods


def cmd_confset(cfg) -> int:
    methods = _methods(cfg)
    if not 0 < cfg["alpha"] < 1:
        raise CliError(EXIT_INVALID, "alpha must lie in (0, 1)")
    if cfg["mode"] not in ("stationary", "general"):
        raise CliError(EXIT_INVALID, "mode must be stationary or general")
    data = read_csv(cfg["input"], cfg["span"])
    est = _estimate(cfg, data)
    params, weak = _plugins(cfg, data, est)
    report = _estimate_report(data, est, params, weak)
    sets = {}
    for m in methods:
        if m == "bai":
            cs = bai_confidence_interval(est, data, cfg["alpha"], lrv=cfg["lrv"])
        elif params is None:
            from .confsets import default_edge

            cs = full_range_set(data.T, default_edge(est), 1 - cfg["alpha"], "hdr")
        else:
            sim = LimitSimConfig(n_draws=cfg["n_draws"], n_grid=cfg["n_grid"], pi=cfg["pi"],
                                 seed=cfg["seed"], units=cfg["units"])
            if cfg["mode"] == "general":
                draws = simulate_general(data, est, sim, params=params, lrv=cfg["lrv"])
            else:
                draws = simulate_stationary(params, sim)
            cs = hdr_confidence_set(draws, est, params, cfg["alpha"], data.T)
            if cfg["draws_out"]:
                try:
                    draws.to_csv(cfg["draws_out"])
                except OSError as exc:
                    raise CliError(EXIT_IO, f"cannot write {cfg['draws_out']}: {exc}") from exc
                report["draws_path"] = cfg["draws_out"]
            report["domain"] = [draws.domain_lo, draws.domain_hi]
        sets[m] = cs.to_dict()
    report["confidence_sets"] = sets
    report["alpha"] = cfg["alpha"]
    _emit(_json(report), cfg["output"])
    return EXIT_OK


def density_grid(rho2, lambda0, xi1=1.0, xi2=1.0, pi=0.05, span=100.0,
                 n_draws=10000, n_grid=2000, seed=0, n_points=512):
    """Evaluation grid of the limit density for given population values.

    The domain is ``span * rho2 * [pi - lambda0, 1 - pi - lambda0]``;
    the density is a boundary-reflected KDE of simulated draws so it
    integrates to one over the domain.

    Returns
    -------
    x, f : ndarray
    draws : LimitDraws
    """
    params = PluginParams(xi1, xi2, rho2, rho2, 1.0, lambda0, h=1.0, N=span, T=1)
    cfg = LimitSimConfig(n_draws=n_draws, n_grid=n_grid, pi=pi, N=span, seed=seed, units="vartheta")
    draws = simulate_stationary(params, cfg)
    dens = kde(draws, min_draws=1)
    lo, hi = draws.domain_lo, draws.domain_hi
    x = np.linspace(lo, hi, n_points)
    f = dens.eval(x) + dens.eval(2 * lo - x) + dens.eval(2 * hi - x)
    return x, f, draws


def density_modes(f, prominence: float = 0.02) -> np.ndarray:
    """Indices of local maxima of a gridded density.

    Endpoints count as maxima; bumps less prominent than ``prominence``
    times the peak height (kernel noise in sparse tails) are ignored.
    """
    f = np.asarray(f, dtype=float)
    peaks, _ = signal.find_peaks(np.r_[0.0, f, 0.0], prominence=prominence * f.max())
    return peaks - 1


def cmd_density(cfg) -> int:
    if cfg["rho2"] is None or cfg["lambda0"] is None:
        raise CliError(EXIT_INVALID, "--rho2 and --lambda0 are required")
    try:
        lam = float(cfg["lambda0"])
    except ValueError as exc:
        raise CliError(EXIT_INVALID, f"bad lambda0: {exc}") from exc
    if not cfg["rho2"] > 0:
        raise CliError(EXIT_DEGENERATE, "rho2 must be positive")
    if cfg["n_points"] < 2:
        raise CliError(EXIT_INVALID, "n_points must be at least 2")
    x, f, _ = density_grid(cfg["rho2"], lam, cfg["xi1"], cfg["xi2"], cfg["pi"],
                           cfg["span"] or 100.0, cfg["n_draws"], cfg["n_grid"],
                           cfg["seed"], cfg["n_points"])
    buf = io.StringIO()
    buf.write("x,density\n")
    for a, b in zip(x, f):
        buf.write(f"{a!r},{b!r}\n")
    _emit(buf.getvalue(), cfg["output"])
    return EXIT_OK


MC_FIELDS = ("model", "T", "lambda0", "delta0", "method", "reps", "seed",
             "coverage", "avg_length", "supw_rejection", "failures", "weak")


def _csv_list(s, name):
    try:
        return [float(v) for v in str(s).split(",") if v.strip()]
    except ValueError as exc:
        raise CliError(EXIT_INVALID, f"bad {name} list: {exc}") from exc


def _done_keys(path):
    if path is None or not Path(path).exists():
        return set()
    with open(path, newline="") as fh:
        return {(r["model"], int(r["T"]), float(r["lambda0"]), float(r["delta0"]),
                 int(r["reps"]), int(r["seed"])) for r in csv.DictReader(fh)}


def cmd_mc(cfg) -> int:
    model = cfg["model"]
    if model not in MODELS:
        raise CliError(EXIT_INVALID, f"unknown model {model!r}; expected one of {MODELS}")
    if cfg["reps"] < 1:
        raise CliError(EXIT_INVALID, "reps must be positive")
    if cfg["workers"] < 1:
        raise CliError(EXIT_INVALID, "workers must be positive")
    methods = tuple(_methods(cfg))
    deltas = _csv_list(cfg["delta"] or "1", "delta")
    lambdas = _csv_list(cfg["lambda0"] or "0.5", "lambda0")
    out = cfg["output"]
    done = _done_keys(out)
    cells = []
    try:
        for lam in lambdas:
            for d in deltas:
                cells.append(McCell(DgpSpec(model, cfg["T"], lam, d, cfg["seed"]), methods,
                                    cfg["reps"], cfg["alpha"], cfg["n_draws"], cfg["n_grid"],
                                    cfg["pi"], cfg["trim"], cfg["units"]))
    except InvalidSpec as exc:
        raise CliError(EXIT_INVALID, str(exc)) from exc
    rows = []
    new_file = out is None or not Path(out).exists()
    fh = sys.stdout if out is None else open(out, "a", newline="")
    try:
        writer = csv.DictWriter(fh, MC_FIELDS)
        if new_file:
            writer.writeheader()
        for cell in cells:
            if cell.key() in done:
                continue
            run_cell(cell, workers=cfg["workers"])
            for r in cell.rows():
                writer.writerow(r)
                rows.append(r)
            fh.flush()
    finally:
        if fh is not sys.stdout:
            fh.close()
    if cfg["json_out"]:
        _emit(_json(rows), cfg["json_out"])
    return EXIT_OK


COMMANDS = {"estimate": cmd_estimate, "confset": cmd_confset,
            "density": cmd_density, "mc": cmd_mc}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="breakdate", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; flags take precedence")
    common.add_argument("-o", "--output")
    common.add_argument("--seed", type=str)
    common.add_argument("--trim", type=str, help="estimation trimming")
    common.add_argument("--pi", type=str, help="limit-law trimming")
    common.add_argument("--alpha", type=str)
    common.add_argument("--n-draws", dest="n_draws", type=str)
    common.add_argument("--n-grid", dest="n_grid", type=str)
    common.add_argument("--units", choices=("rho", "vartheta"))
    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("-i", "--input")
    data.add_argument("--span", type=str, help="time span N")
    data.add_argument("--predictable", action="store_const", const="true",
                      help="two-step estimator (constant and lagged y)")
    data.add_argument("--lrv", action="store_const", const="true",
                      help="long-run variances for serially correlated errors")

    sub.add_parser("estimate", parents=[common, data], help="least-squares break date")
    p = sub.add_parser("confset", parents=[common, data], help="confidence sets")
    p.add_argument("--method", help="comma list of hdr, bai")
    p.add_argument("--mode", choices=("stationary", "general"))
    p.add_argument("--draws-out", dest="draws_out")
    p = sub.add_parser("density", parents=[common], help="limit density on a grid")
    p.add_argument("--rho2", type=str)
    p.add_argument("--lambda0", type=str)
    p.add_argument("--xi1", type=str)
    p.add_argument("--xi2", type=str)
    p.add_argument("--span", type=str, help="time span N (default 100)")
    p.add_argument("--n-points", dest="n_points", type=str)
    p = sub.add_parser("mc", parents=[common], help="Monte Carlo table cells")
    p.add_argument("--model")
    p.add_argument("--delta", help="comma list of break sizes")
    p.add_argument("--lambda0", help="comma list of break fractions")
    p.add_argument("--T", dest="T", type=str)
    p.add_argument("--reps", type=str)
    p.add_argument("--workers", type=str)
    p.add_argument("--method", help="comma list of hdr, bai")
    p.add_argument("--json", dest="json_out")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except CliError as exc:
        print(f"breakdate: {exc}", file=sys.stderr)
        return exc.code
    except (DegenerateDesign, DegenerateDomain) as exc:
        print(f"breakdate: degenerate problem: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (InvalidData, InvalidSpec, Unsupported) as exc:
        print(f"breakdate: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BreakdateError as exc:
        print(f"breakdate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
