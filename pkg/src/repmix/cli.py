"""Command-line front end: ``repmix {analyze,bf,tipping,grid} DATASET``.

Exit codes: 0 success, 2 invalid input or options, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .bayes_factors import bf_01_mixture, bf_01_replication, bf_dc_beta, bf_dc_point
from .mixture import VagueComponent, build_prior, empirical_bayes_weight, update_fixed
from .numerics import NumericError
from .random_weight import (
    BetaWeightPrior,
    effect_marginal_posterior,
    joint_posterior_density,
    weight_marginal_posterior,
)
from .studies import DatasetError, ReplicationSet, parse_dataset
from .summaries import (
    density_grid,
    hpdi,
    hpdi_trace,
    mode_count,
    posterior_quantile,
    tipping_point,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3

TAU2_ENV = "REPMIX_DEFAULT_TAU2"
GRID_TARGETS = ("effect_posterior", "weight_posterior", "joint_posterior")
DEFAULT_CURVE_WEIGHTS = (0.0, 0.25, 0.5, 0.75, 1.0)


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class AnalysisConfig:
    mu: float = 0.0
    tau2: float = 2.0
    weight_mode: str = "beta"  # "fixed", "beta" or "empirical_bayes"
    omega: Optional[float] = None
    eta: float = 1.0
    nu: float = 1.0
    nu_dc: float = 2.0
    level: float = 0.95
    pooling: str = "both"  # "per_replication", "pooled" or "both"
    round_pooled: bool = False
    output_format: str = "table"
    force_interval: bool = False

    def __post_init__(self):
        if self.weight_mode not in ("fixed", "beta", "empirical_bayes"):
            raise UsageError(f"weight: unknown mode {self.weight_mode!r}")
        if self.weight_mode == "fixed" and not (
            self.omega is not None and 0.0 <= self.omega <= 1.0
        ):
            raise UsageError(f"weight: must lie in [0, 1], got {self.omega!r}")
        for name in ("eta", "nu", "nu_dc", "tau2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise UsageError(f"{name}: must be positive, got {v!r}")
        if not math.isfinite(self.mu):
            raise UsageError("mu: must be finite")
        if not 0.0 < self.level < 1.0:
            raise UsageError(f"level: must lie in (0, 1), got {self.level!r}")

    @property
    def vague(self) -> VagueComponent:
        return VagueComponent(self.mu, self.tau2)

    @property
    def beta(self) -> BetaWeightPrior:
        return BetaWeightPrior(self.eta, self.nu)

    def to_dict(self):
        out = {"mu": self.mu, "tau2": self.tau2, "weight_mode": self.weight_mode}
        if self.weight_mode == "fixed":
            out["omega"] = self.omega
        if self.weight_mode == "beta":
            out["eta"] = self.eta
            out["nu"] = self.nu
        out.update(
            nu_dc=self.nu_dc,
            level=self.level,
            pooling=self.pooling,
            round_pooled=self.round_pooled,
        )
        return out


def _targets(data: ReplicationSet, cfg: AnalysisConfig):
    rows = []
    if cfg.pooling in ("per_replication", "both"):
        rows.extend(data.replications)
    if cfg.pooling in ("pooled", "both"):
        rows.append(data.pooled(round_digits=2 if cfg.round_pooled else None))
    return rows


def _study_fields(s):
    out = {"label": s.label, "estimate": s.estimate, "std_error": s.std_error}
    if s.scale is not None:
        out["scale"] = s.scale
    return out


def _mixture_dict(m):
    return {
        "weight": m.weight_informative,
        "m1": m.mean_informative,
        "v1": m.var_informative,
        "m2": m.mean_vague,
        "v2": m.var_vague,
    }


def _hpdi(post, cfg):
    region = hpdi(post, cfg.level)
    if cfg.force_interval and len(region.intervals) > 1:
        print("warning: disjoint HPD region replaced by its convex hull", file=sys.stderr)
        region = region.hull()
    return region


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def run_analyze(cfg: AnalysisConfig, data: ReplicationSet) -> dict:
    rows = []
    for rep in _targets(data, cfg):
        row = _study_fields(rep)
        if cfg.weight_mode == "beta":
            prior_weight = cfg.beta.mean
            post = effect_marginal_posterior(rep, data.original, cfg.vague, cfg.beta)
        else:
            if cfg.weight_mode == "empirical_bayes":
                eb = empirical_bayes_weight(rep, data.original, cfg.vague)
                prior_weight = eb.omega_hat
                row["empirical_bayes"] = {"omega_hat": eb.omega_hat, "tie": eb.tie}
            else:
                prior_weight = cfg.omega
            post = update_fixed(build_prior(data.original, cfg.vague, prior_weight), rep)
        row["prior_weight"] = prior_weight
        row["posterior"] = _mixture_dict(post)
        row["mean"] = post.mean()
        row["median"] = posterior_quantile(post, 0.5)
        row["hpdi"] = _hpdi(post, cfg).to_dict()
        row["modes"] = mode_count(post)
        if cfg.weight_mode == "beta":
            wp = weight_marginal_posterior(rep, data.original, cfg.vague, cfg.beta)
            row["weight_posterior"] = {
                "eta": wp.eta,
                "nu": wp.nu,
                "mean": wp.mean(),
                "median": wp.quantile(0.5),
                "density_at_0": float(wp.pdf(0.0)),
                "density_at_1": float(wp.pdf(1.0)),
            }
        rows.append(row)
    return {"command": "analyze", "config": cfg.to_dict(), "rows": rows}


def run_bf(cfg: AnalysisConfig, data: ReplicationSet) -> dict:
    rows = []
    o, vague = data.original, cfg.vague
    for rep in _targets(data, cfg):
        row = _study_fields(rep)
        row["bf_dc_point"] = bf_dc_point(rep, o, vague).to_dict()
        row["bf_dc_beta"] = bf_dc_beta(rep, o, vague, BetaWeightPrior(1.0, cfg.nu_dc)).to_dict()
        row["bf_01_mixture"] = bf_01_mixture(rep, o, vague, cfg.beta).to_dict()
        row["bf_01_replication"] = bf_01_replication(rep, o).to_dict()
        rows.append(row)
    return {"command": "bf", "config": cfg.to_dict(), "rows": rows}


def run_tipping(cfg: AnalysisConfig, data: ReplicationSet, threshold: float = 0.0) -> dict:
    rows = []
    omegas = np.linspace(0.0, 1.0, 101)
    for rep in _targets(data, cfg):
        row = _study_fields(rep)
        tp = tipping_point(data.original, rep, cfg.vague, cfg.level, threshold)
        row["omega_star"] = tp.omega_star
        row["regime"] = tp.regime
        row["crossings"] = list(tp.crossings)
        row["monotone"] = tp.monotone
        trace = []
        for t in hpdi_trace(data.original, rep, cfg.vague, cfg.level, omegas):
            region = t.hpdi.hull() if cfg.force_interval else t.hpdi
            trace.append({
                "omega": t.omega,
                "median": t.median,
                "intervals": [[lo, hi] for lo, hi in region.intervals],
            })
        row["trace"] = trace
        rows.append(row)
    return {"command": "tipping", "config": cfg.to_dict(), "threshold": threshold, "rows": rows}


def run_grid(cfg: AnalysisConfig, data: ReplicationSet, target: str = "effect_posterior",
             weights=None, n_theta: int = 201, n_omega: int = 101,
             theta_min: Optional[float] = None, theta_max: Optional[float] = None) -> dict:
    if target not in GRID_TARGETS:
        raise UsageError(f"target: unknown grid target {target!r}")
    if n_theta < 2 or n_omega < 2:
        raise UsageError("grid resolution must be at least 2")
    o, vague = data.original, cfg.vague
    curves = []
    for rep in _targets(data, cfg):
        if target == "effect_posterior":
            ws = DEFAULT_CURVE_WEIGHTS if weights is None else weights
            posts = [(f"omega={w:g}", update_fixed(build_prior(o, vague, w), rep), w) for w in ws]
            lo = theta_min if theta_min is not None else min(p.span()[0] for _, p, _ in posts)
            hi = theta_max if theta_max is not None else max(p.span()[1] for _, p, _ in posts)
            for name, post, w in posts:
                g = density_grid(post, lo, hi, n_theta, {"omega": w, "mu": cfg.mu, "tau2": cfg.tau2,
                                                         "original": o.label, "replication": rep.label})
                curves.append({"label": rep.label, "curve": name, "metadata": g.metadata,
                               "theta": g.theta.tolist(), "density": g.density.tolist()})
        elif target == "weight_posterior":
            wp = weight_marginal_posterior(rep, o, vague, cfg.beta)
            w = np.linspace(0.0, 1.0, n_omega)
            curves.append({
                "label": rep.label,
                "curve": f"Beta({cfg.eta:g},{cfg.nu:g})",
                "metadata": {"eta": cfg.eta, "nu": cfg.nu, "mu": cfg.mu, "tau2": cfg.tau2,
                             "original": o.label, "replication": rep.label},
                "omega": w.tolist(),
                "density": wp.pdf(w).tolist(),
            })
        else:
            post = effect_marginal_posterior(rep, o, vague, cfg.beta)
            a, b = post.span()
            lo = theta_min if theta_min is not None else a
            hi = theta_max if theta_max is not None else b
            theta = np.linspace(lo, hi, n_theta)
            w = np.linspace(0.0, 1.0, n_omega)
            dens = joint_posterior_density(theta[:, None], w[None, :], rep, o, vague, cfg.beta)
            curves.append({
                "label": rep.label,
                "curve": "joint",
                "metadata": {"eta": cfg.eta, "nu": cfg.nu, "mu": cfg.mu, "tau2": cfg.tau2,
                             "original": o.label, "replication": rep.label},
                "theta": theta.tolist(),
                "omega": w.tolist(),
                "density": dens.tolist(),
            })
    return {"command": "grid", "target": target, "config": cfg.to_dict(), "curves": curves}


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def _fmt(x, digits=4):
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.{digits}f}"
    return str(x)


def _intervals_text(intervals):
    return " U ".join(f"[{lo:.3f}, {hi:.3f}]" for lo, hi in intervals)


def _table(header, rows):
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) for i, h in enumerate(header)]
    lines = ["  ".join(str(h).rjust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(str(c).rjust(w) for c, w in zip(r, widths)))
    return "\n".join(lines) + "\n"


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(c) if isinstance(c, float) else ("" if c is None else c) for c in r])
    return buf.getvalue()


def _rows_for(report, kind):
    """Flatten a report into (header, rows) for ``kind`` in {"table", "csv"}."""
    cmd = report["command"]
    table = kind == "table"
    if cmd == "analyze":
        header = ["label", "estimate", "std_error", "omega", "omega_post", "m1", "v1", "m2", "v2",
                  "median"]
        rows = []
        for r in report["rows"]:
            p = r["posterior"]
            base = [r["label"], r["estimate"], r["std_error"], r["prior_weight"], p["weight"],
                    p["m1"], p["v1"], p["m2"], p["v2"], r["median"]]
            ints = r["hpdi"]["intervals"]
            if table:
                rows.append([base[0]] + [_fmt(x) for x in base[1:]] +
                            [_intervals_text(ints), r["modes"]])
            else:
                flat = [x for iv in ints for x in iv] + [None] * (4 - 2 * len(ints))
                rows.append(base + flat + [r["modes"]])
        if table:
            header = header + [f"HPDI {report['config']['level']:g}", "modes"]
        else:
            header = header + ["hpdi_lo_1", "hpdi_hi_1", "hpdi_lo_2", "hpdi_hi_2", "modes"]
        return header, rows
    if cmd == "bf":
        nu_dc = report["config"]["nu_dc"]
        keys = ["bf_dc_point", "bf_dc_beta", "bf_01_mixture", "bf_01_replication"]
        if table:
            cfg = report["config"]
            header = ["Replication", "theta_r", "sigma_r", "BFdc(w=0)", f"BFdc(Beta(1,{nu_dc:g}))",
                      f"BF01(Beta({cfg.get('eta', 1):g},{cfg.get('nu', 1):g}))", "BF01(w=1)"]
            rows = [[r["label"], f"{r['estimate']:.2f}", f"{r['std_error']:.2f}"] +
                    [r[k]["formatted"] for k in keys] for r in report["rows"]]
        else:
            header = ["label", "estimate", "std_error"] + [f"{k}{s}" for k in keys
                                                           for s in ("", "_formatted")]
            rows = [[r["label"], r["estimate"], r["std_error"]] +
                    [v for k in keys for v in (r[k]["value"], r[k]["formatted"])]
                    for r in report["rows"]]
        return header, rows
    if cmd == "tipping":
        if table:
            header = ["label", "estimate", "std_error", "omega_star", "regime", "HPDI at omega=0"]
            rows = [[r["label"], _fmt(r["estimate"], 2), _fmt(r["std_error"], 2),
                     _fmt(r["omega_star"]), r["regime"],
                     _intervals_text(r["trace"][0]["intervals"])] for r in report["rows"]]
        else:
            header = ["label", "omega", "median", "lo_1", "hi_1", "lo_2", "hi_2"]
            rows = []
            for r in report["rows"]:
                for t in r["trace"]:
                    flat = [x for iv in t["intervals"] for x in iv]
                    flat += [None] * (4 - len(flat))
                    rows.append([r["label"], t["omega"], t["median"]] + flat)
        return header, rows
    # grid
    target = report["target"]
    rows = []
    if target == "effect_posterior":
        header = ["label", "curve", "theta", "density"]
        for c in report["curves"]:
            rows.extend([c["label"], c["curve"], t, d] for t, d in zip(c["theta"], c["density"]))
    elif target == "weight_posterior":
        header = ["label", "omega", "density"]
        for c in report["curves"]:
            rows.extend([c["label"], w, d] for w, d in zip(c["omega"], c["density"]))
    else:
        header = ["label", "theta", "omega", "density"]
        for c in report["curves"]:
            for i, t in enumerate(c["theta"]):
                rows.extend([c["label"], t, w, c["density"][i][j]] for j, w in enumerate(c["omega"]))
    return header, rows


def render(report: dict, output_format: str) -> str:
    if output_format == "json":
        return json.dumps(report, indent=2, allow_nan=False) + "\n"
    if output_format == "csv" or report["command"] == "grid":
        return _csv(*_rows_for(report, "csv"))
    if output_format == "table":
        return _table(*_rows_for(report, "table"))
    raise UsageError(f"format: unknown output format {output_format!r}")


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


def _default_tau2():
    raw = os.environ.get(TAU2_ENV)
    if raw is None or raw.strip() == "":
        return 2.0
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{TAU2_ENV}: not a number: {raw!r}") from None


def _weights_list(text):
    try:
        out = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid weight list {text!r}") from None
    if not out or any(not 0 <= w <= 1 for w in out):
        raise argparse.ArgumentTypeError("weights must lie in [0, 1]")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("dataset", help="dataset file (CSV or JSON), or '-' for stdin")
    common.add_argument("--input-format", choices=("auto", "csv", "json"), default="auto")
    common.add_argument("--mu", type=float, default=0.0, help="vague component mean")
    common.add_argument("--tau2", type=float, default=None,
                        help=f"vague component variance (default 2, or ${TAU2_ENV})")
    common.add_argument("--weight", default=None,
                        help="fixed weight in [0, 1], 'eb' for empirical Bayes, or 'beta'")
    common.add_argument("--eta", type=float, default=None, help="Beta prior shape eta (default 1)")
    common.add_argument("--nu", type=float, default=None, help="Beta prior shape nu (default 1)")
    common.add_argument("--nu-dc", type=float, default=2.0,
                        help="nu of the Beta(1, nu) discounting hypothesis (default 2)")
    common.add_argument("--level", type=float, default=0.95)
    pooling = common.add_mutually_exclusive_group()
    pooling.add_argument("--pooled", dest="pooling", action="store_const", const="pooled")
    pooling.add_argument("--per-rep", dest="pooling", action="store_const", const="per_replication")
    pooling.add_argument("--both", dest="pooling", action="store_const", const="both")
    common.add_argument("--round-pooled", action="store_true",
                        help="round the pooled estimate and standard error to 2 decimals")
    common.add_argument("--format", dest="output_format", choices=("table", "csv", "json"),
                        default="table")
    common.add_argument("--force-interval", action="store_true",
                        help="report the convex hull of a disjoint HPD region")
    common.add_argument("--out", default=None, help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="repmix", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="posterior summaries per replication")
    sub.add_parser("bf", parents=[common], help="Bayes factors for the weight and the effect")
    tip = sub.add_parser("tipping", parents=[common], help="tipping-point analysis over the weight")
    tip.add_argument("--threshold", type=float, default=0.0)
    grid = sub.add_parser("grid", parents=[common], help="density grids for plotting")
    grid.add_argument("--target", choices=GRID_TARGETS, default="effect_posterior")
    grid.add_argument("--weights", type=_weights_list, default=None,
                      help="comma-separated fixed weights for effect_posterior curves")
    grid.add_argument("--n-theta", type=int, default=201)
    grid.add_argument("--n-omega", type=int, default=101)
    grid.add_argument("--theta-min", type=float, default=None)
    grid.add_argument("--theta-max", type=float, default=None)
    return parser


def config_from_args(args) -> AnalysisConfig:
    tau2 = args.tau2 if args.tau2 is not None else _default_tau2()
    weight = args.weight
    omega = None
    if weight is None or weight.lower() == "beta":
        mode = "beta"
    elif weight.lower() in ("eb", "empirical_bayes"):
        mode = "empirical_bayes"
    else:
        mode = "fixed"
        try:
            omega = float(weight)
        except ValueError:
            raise UsageError(f"weight: expected a number, 'eb' or 'beta', got {weight!r}") from None
    return AnalysisConfig(
        mu=args.mu,
        tau2=tau2,
        weight_mode=mode,
        omega=omega,
        eta=1.0 if args.eta is None else args.eta,
        nu=1.0 if args.nu is None else args.nu,
        nu_dc=args.nu_dc,
        level=args.level,
        pooling=args.pooling or "both",
        round_pooled=args.round_pooled,
        output_format=args.output_format,
        force_interval=args.force_interval,
    )


def _read_dataset(path, fmt, stdin=None):
    if path == "-":
        stream = stdin if stdin is not None else sys.stdin.buffer
        raw = stream.read()
    else:
        try:
            with open(path, "rb") as fh:
                raw = fh.read()
        except OSError as exc:
            raise UsageError(f"dataset: cannot read {path!r}: {exc.strerror}") from None
    if isinstance(raw, str):
        raw = raw.encode("utf-8")
    if fmt == "auto":
        if path.lower().endswith(".json"):
            fmt = "json"
        elif path.lower().endswith(".csv"):
            fmt = "csv"
        else:
            fmt = "json" if raw.lstrip().startswith(b"{") else "csv"
    return parse_dataset(raw, fmt)


def main(argv=None, stdin=None, stdout=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        data = _read_dataset(args.dataset, args.input_format, stdin)
        if args.command == "analyze":
            report = run_analyze(cfg, data)
        elif args.command == "bf":
            report = run_bf(cfg, data)
        elif args.command == "tipping":
            report = run_tipping(cfg, data, args.threshold)
        else:
            report = run_grid(cfg, data, args.target, args.weights, args.n_theta, args.n_omega,
                              args.theta_min, args.theta_max)
        text = render(report, cfg.output_format)
    except NumericError as exc:
        print(f"repmix: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DatasetError, UsageError, ValueError) as exc:
        print(f"repmix: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
