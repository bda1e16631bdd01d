"""Command line front end.

Exit codes: 0 success, 2 usage or parse error, 3 numeric failure.
Values may also come from a flat ``key = value`` config file (``#``
comments allowed) given with ``--config``; flags win over the file.
"""

from __future__ import annotations

import argparse
import io
import logging
import math
import sys
from pathlib import Path

from . import baseline, csvio
from . import detector as det
from . import experiments as ex
from . import mcsim
from .fading import SignalBand, parse_fading
from .gnormal import GNormalParams, NumericalError

log = logging.getLogger("gsense")

EXIT_USAGE = 2
EXIT_NUMERIC = 3

# flag name -> config-file key (same spelling with underscores)
_KEYS = ("noise", "band", "fading", "n", "p", "beta", "auto_beta", "snr_db", "trials", "seed", "out",
         "workers", "signal_model", "lam", "plot", "calibrate", "roc_snr_db", "roc_points", "objective")


class UsageError(Exception):
    pass


def parse_pair(text: str, flag: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"{flag}: expected 'lo,hi', got {text!r}")
    vals = []
    col = 1
    for part in parts:
        try:
            vals.append(float(part))
        except ValueError:
            raise UsageError(f"{flag}: column {col}: {part!r} is not a number") from None
        col += len(part) + 1
    return vals[0], vals[1]


def parse_range(text: str, flag: str = "--snr-db") -> list[float]:
    """``start:stop:step`` (stop inclusive), or a comma-separated list, or one value."""
    if ":" not in text:
        return [float(x) for x in _numbers(text, flag)]
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"{flag}: expected start:stop:step, got {text!r}")
    start, stop, step = _numbers(",".join(parts), flag)
    if step <= 0 or stop < start:
        raise UsageError(f"{flag}: need step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def _numbers(text, flag):
    out, col = [], 1
    for part in text.split(","):
        try:
            out.append(float(part))
        except ValueError:
            raise UsageError(f"{flag}: column {col}: {part!r} is not a number") from None
        col += len(part) + 1
    return out


def read_config(path: str) -> dict:
    cfg = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            if "=" not in line:
                col = len(raw) - len(raw.lstrip()) + 1
                raise UsageError(f"{path}:{lineno}:{col}: expected 'key = value'")
            raw_key, _, value = line.partition("=")
            key = raw_key.strip().replace("-", "_")
            if key not in _KEYS:
                col = len(raw_key) - len(raw_key.lstrip()) + 1
                raise UsageError(f"{path}:{lineno}:{col}: unknown key {key!r}")
            cfg[key] = value.strip()
    return cfg


def _common(p: argparse.ArgumentParser, *, snr=False, mc=False):
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--noise", help="sigma_lo,sigma_hi")
    p.add_argument("--band", help="sx_lo,sx_hi (signal magnitude band)")
    p.add_argument("--fading", help="e.g. constant:eps=1, rayleigh:sigma=1, rician:sigma=1,v=1, nakagami:m=2,omega=1")
    p.add_argument("--n", help="sample count (comma list allowed where a sweep makes sense)")
    p.add_argument("--p", help="target missed-detection level")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--beta", help="Chernoff parameter")
    g.add_argument("--auto-beta", action="store_const", const="true", default=None, help="choose beta by optimisation")
    p.add_argument("--objective", help="min_fa_bound (default) or max_decay_magnitude")
    p.add_argument("--out", help="output directory")
    p.add_argument("--workers", help="threads for sweep points / MC blocks")
    if snr:
        p.add_argument("--snr-db", help="start:stop:step or comma list")
    if mc:
        p.add_argument("--trials")
        p.add_argument("--seed")
        p.add_argument("--lambda", dest="lam", help="threshold (default: worst-case threshold)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gsense", description="Energy detection bounds under G-normal noise.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    _common(sub.add_parser("bounds", help="one BoundReport row"))
    _common(sub.add_parser("sweep", help="BoundReport rows over SNR and n"), snr=True)
    roc = sub.add_parser("roc", help="(md bound, fa bound) along a threshold sweep")
    _common(roc)
    roc.add_argument("--roc-snr-db")
    roc.add_argument("--roc-points")
    _common(sub.add_parser("mc", help="Monte Carlo domination check over the default scenarios"), mc=True)
    b = sub.add_parser("baseline", help="classical signal-model false-alarm curve")
    _common(b, snr=True)
    b.add_argument("--signal-model", help="|".join(baseline.SIGNAL_MODELS))
    for name in ("fig1a", "fig1b", "fig2", "fig3"):
        f = sub.add_parser(name, help=f"reproduce {name}")
        _common(f, snr=True)
        f.add_argument("--seed")
        f.add_argument("--plot", action="store_const", const="true", default=None)
        f.add_argument("--calibrate", action="store_const", const="true", default=None,
                       help="pick n to match the -3 dB anchors (fig1a/fig1b)")
        f.add_argument("--roc-snr-db")
        f.add_argument("--roc-points")
    return parser


def _merged(args) -> dict:
    vals = read_config(args.config) if getattr(args, "config", None) else {}
    for k in _KEYS:
        v = getattr(args, k, None)
        if v is not None:
            vals[k] = v
    return vals


def _need(vals, *keys):
    missing = [k for k in keys if k not in vals]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _num(vals, key, kind=float):
    try:
        return kind(vals[key])
    except ValueError:
        raise UsageError(f"--{key.replace('_', '-')}: {vals[key]!r} is not a valid {kind.__name__}") from None


def _ints(vals, key):
    try:
        return [int(x) for x in str(vals[key]).split(",")]
    except ValueError:
        raise UsageError(f"--{key}: expected integer(s), got {vals[key]!r}") from None


def _truthy(v) -> bool:
    return str(v).lower() in ("1", "true", "yes", "on")


def _detector_cfg(vals, n=None, band=None) -> det.DetectorConfig:
    noise = GNormalParams(*parse_pair(vals["noise"], "--noise"))
    if band is None:
        band = SignalBand(*parse_pair(vals["band"], "--band"))
    fading = parse_fading(vals["fading"])
    beta = _num(vals, "beta") if "beta" in vals and not _truthy(vals.get("auto_beta", "")) else 1.0
    return det.DetectorConfig(n if n is not None else _ints(vals, "n")[0], _num(vals, "p"), beta, noise, band, fading)


def _auto_beta(cfg: det.DetectorConfig, objective: str) -> tuple[det.DetectorConfig, str]:
    try:
        return cfg.with_beta(det.optimize_beta(cfg, objective)), ""
    except det.NoAdmissibleBeta:
        return cfg.with_beta(1.0), "no admissible beta (lambda <= n sigma_hi^2 for all beta); beta=1 used"


def _report(vals, n=None, band=None) -> det.BoundReport:
    cfg = _detector_cfg(vals, n, band)
    warning = ""
    if _truthy(vals.get("auto_beta", "")):
        cfg, warning = _auto_beta(cfg, vals.get("objective", "min_fa_bound"))
    elif "beta" not in vals:
        raise UsageError("one of --beta or --auto-beta is required")
    return det.bound_report(cfg, warning=warning)


REPORT_FIELDS = det.CSV_FIELDS + ("warning",)


def _emit(text: str, vals: dict, name: str):
    sys.stdout.write(text)
    if "out" in vals:
        out = Path(vals["out"])
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)


def cmd_bounds(vals) -> int:
    _need(vals, "fading", "noise", "band", "n", "p")
    rep = _report(vals)
    row = rep.row() | {"warning": rep.warning}
    if rep.warning:
        log.warning(rep.warning)
    _emit(csvio.dumps(REPORT_FIELDS, [row]), vals, "bounds.csv")
    return 0


def cmd_sweep(vals) -> int:
    _need(vals, "fading", "noise", "n", "p", "snr_db")
    noise = GNormalParams(*parse_pair(vals["noise"], "--noise"))
    rows = []
    for n in _ints(vals, "n"):
        for s in parse_range(vals["snr_db"]):
            _, band = ex.snr_mapping(s, noise)
            rep = _report(vals, n, band)
            rows.append({"snr_db": s} | rep.row() | {"warning": rep.warning})
    _emit(csvio.dumps(("snr_db",) + REPORT_FIELDS, rows), vals, "sweep.csv")
    return 0


def cmd_roc(vals) -> int:
    _need(vals, "fading", "noise", "n", "p")
    noise = GNormalParams(*parse_pair(vals["noise"], "--noise"))
    cfg = ex.ExperimentConfig(
        experiment="fig3", n_values=_ints(vals, "n"), p=_num(vals, "p"),
        sigma_lower=noise.sigma_lower, noise_ratio=noise.sigma_upper / noise.sigma_lower,
        fading=vals["fading"], beta=None if _truthy(vals.get("auto_beta", "")) or "beta" not in vals else _num(vals, "beta"),
        roc_snr_db=_num(vals, "roc_snr_db") if "roc_snr_db" in vals else 0.0,
        roc_points=_num(vals, "roc_points", int) if "roc_points" in vals else 201,
    )
    fields, rows, _ = ex.roc_rows(cfg, cfg.n_values[0])
    _emit(csvio.dumps(fields, rows), vals, "roc.csv")
    return 0


def cmd_mc(vals) -> int:
    _need(vals, "fading", "noise", "band", "n", "p")
    rep = _report(vals)
    lam = _num(vals, "lam") if "lam" in vals else rep.lam
    trials = _num(vals, "trials", int) if "trials" in vals else 100_000
    seed = _num(vals, "seed", int) if "seed" in vals else 0
    workers = _num(vals, "workers", int) if "workers" in vals else 1
    res = mcsim.scenario_sweep(rep.cfg, lam, None, trials, seed, workers)
    buf = io.StringIO()
    mcsim.write_sweep_csv(res, buf)
    _emit(buf.getvalue(), vals, "mc.csv")
    if not res.all_dominated:
        log.warning("some empirical rate exceeds its analytic bound by more than 3 stderr")
    return 0


def cmd_baseline(vals) -> int:
    _need(vals, "n", "p", "snr_db")
    key = vals.get("signal_model", "dtv")
    if key not in baseline.SIGNAL_MODELS:
        raise UsageError(f"--signal-model: unknown {key!r}; choose from {'|'.join(baseline.SIGNAL_MODELS)}")
    model = baseline.SIGNAL_MODELS[key]
    n, p = _ints(vals, "n")[0], _num(vals, "p")
    rows = []
    for s in parse_range(vals["snr_db"]):
        g0 = 10.0 ** (s / 10.0)
        dist = baseline.SnrDistribution.for_signal(g0, model, n)
        rows.append({
            "snr_db": s, "gamma0": g0, "sigma_gamma": dist.sigma_gamma, "kappa": dist.kappa,
            "gaussian_fa": baseline.classical_fa_at_md(g0, n, p, 1.0),
            "averaged_fa": baseline.signal_model_fa_curve(g0, model, n, p),
        })
    _emit(csvio.dumps(["snr_db", "gamma0", "sigma_gamma", "kappa", "gaussian_fa", "averaged_fa"], rows), vals,
          f"baseline_{key}.csv")
    return 0


def cmd_figure(name, vals) -> int:
    kw = {"experiment": name}
    if "snr_db" in vals:
        kw["snr_db"] = parse_range(vals["snr_db"])
    if "n" in vals:
        kw["n_values"] = _ints(vals, "n")
    elif name == "fig2":
        kw["n_values"] = [100, 1000]
    if "p" in vals:
        kw["p"] = _num(vals, "p")
    if "noise" in vals:
        lo, hi = parse_pair(vals["noise"], "--noise")
        kw["sigma_lower"], kw["noise_ratio"] = lo, hi / lo
    if "fading" in vals:
        parse_fading(vals["fading"])
        kw["fading"] = vals["fading"]
    if "beta" in vals and not _truthy(vals.get("auto_beta", "")):
        kw["beta"] = _num(vals, "beta")
    for key, kind in (("seed", int), ("workers", int), ("roc_snr_db", float), ("roc_points", int)):
        if key in vals:
            kw[key] = _num(vals, key, kind)
    kw["out"] = vals.get("out", f"out/{name}")
    kw["plot"] = _truthy(vals.get("plot", ""))
    kw["calibrate"] = _truthy(vals.get("calibrate", ""))
    manifest = ex.run_experiment(ex.ExperimentConfig(**kw))
    print(f"wrote {', '.join(manifest['files'])} to {kw['out']}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        vals = _merged(args)
        cmd = args.command
        if cmd == "bounds":
            return cmd_bounds(vals)
        if cmd == "sweep":
            return cmd_sweep(vals)
        if cmd == "roc":
            return cmd_roc(vals)
        if cmd == "mc":
            return cmd_mc(vals)
        if cmd == "baseline":
            return cmd_baseline(vals)
        return cmd_figure(cmd, vals)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"gsense {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, OverflowError, FloatingPointError) as e:
        print(f"gsense {args.command}: numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as e:
        print(f"gsense {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
