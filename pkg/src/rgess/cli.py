"""Command-line front end.

``rgess run <config>`` executes an experiment and writes trace, mixture and
summary CSVs; ``rgess report <dir>`` recomputes the diagnostics from the CSVs
alone; ``rgess fit <csv>`` exposes the mixture fitters on a standalone sample
file. ``<config>`` is a path or the name of a bundled preset.

Exit codes: 0 success, 1 configuration/validation error (nothing written),
2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from importlib import resources

import numpy as np

from . import adaptation as ad
from . import targets as tg
from .adaptation import AdaptationConfig, LearningRateSchedule, Scheme
from .config import (
    ConfigError,
    ExperimentConfig,
    build_experiment,
    load_config_file,
    parse_config_text,
    serialize_config,
)
from .diagnostics import (
    accuracy,
    mode_coverage,
    posterior_mean,
    read_mixtures_csv,
    read_trace_csv,
    rejection_rate_series,
    write_mixtures_csv,
    write_trace_csv,
)
from .runner import RunError, run

__all__ = ["main", "cmd_run", "cmd_report", "cmd_fit"]


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def resolve_config_source(name: str) -> dict:
    """Load a config from a path, or from the bundled presets by name."""
    if os.path.exists(name):
        return load_config_file(name)
    preset = resources.files("rgess").joinpath("presets", f"{name}.cfg")
    if preset.is_file():
        return parse_config_text(preset.read_text(encoding="utf-8"), origin=name)
    raise ConfigError(f"no such config file or preset: {name}")


def available_presets() -> list:
    root = resources.files("rgess").joinpath("presets")
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def build_target(exp: ExperimentConfig):
    """Instantiate the configured target; returns (TargetDensity, extras)."""
    kind = exp.target_kind
    if kind == "gauss_mix":
        return tg.gauss_mix_target().as_target_density(), {}
    if kind == "litter":
        return tg.embedded_litter_data().as_target_density(), {}
    if kind == "logistic_synth":
        dataset, beta_star = tg.make_synthetic_logistic(
            n_train=exp.value("target.n_train"),
            n_test=exp.value("target.n_test"),
            dim=exp.value("target.n_features"),
            seed=exp.value("target.seed"),
            beta_scale=exp.value("target.beta_scale"),
        )
        target = dataset.training_target().as_target_density()
        return target, {"dataset": dataset, "beta_star": beta_star}
    dataset = tg.load_covtype(
        exp.value("target.path"),
        n_select=exp.value("target.n_select"),
        n_features=exp.value("target.n_features"),
        train_fraction=exp.value("target.train_fraction"),
        seed=exp.value("target.seed"),
        header=exp.value("target.header"),
    )
    return dataset.training_target().as_target_density(), {"dataset": dataset}


def compute_summary_rows(traces, exp: ExperimentConfig, window: int, extras: dict):
    """Diagnostic rows recomputable from traces plus the experiment config."""
    burn_in = exp.run_config.burn_in
    rows = [("rejection_window", "", str(window))]
    for idx, value in enumerate(rejection_rate_series(traces, window)):
        rows.append(("rejection_rate", str(idx), _fmt(value)))
    all_rej = [rec.rejections for chain in traces for rec in chain]
    rows.append(("mean_rejections_per_iteration", "", _fmt(float(np.mean(all_rej)))))
    beta_hat = posterior_mean(traces, burn_in=burn_in, thinning=1)
    for idx, value in enumerate(beta_hat):
        rows.append(("posterior_mean", str(idx), _fmt(value)))
    if exp.mode_spec is not None:
        for idx, value in enumerate(mode_coverage(traces, exp.mode_spec, burn_in)):
            rows.append(("mode_coverage", str(idx), _fmt(value)))
    dataset = extras.get("dataset")
    if dataset is not None and dataset.test_x.shape[0] > 0:
        rows.append(("accuracy", "", _fmt(accuracy(beta_hat, dataset))))
    return rows


def _write_rows(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "key", "value"])
        writer.writerows(rows)


def cmd_run(args) -> int:
    try:
        entries = resolve_config_source(args.config)
        for override in args.set or []:
            if "=" not in override:
                raise ConfigError(f"--set expects key=value, got {override!r}")
            text = override.replace("=", " = ", 1)
            entries.update(parse_config_text(text, origin="--set"))
        if args.out is not None:
            entries["output.dir"] = args.out
        exp = build_experiment(entries)
        target, extras = build_target(exp)
    except (ConfigError, ValueError) as exc:
        return _fail(str(exc), 1)

    try:
        out_dir = exp.output_dir
        os.makedirs(out_dir, exist_ok=True)
        result = run(exp.run_config, target)
        write_trace_csv(
            result.traces,
            result.mixture_history,
            os.path.join(out_dir, "trace.csv"),
            mixtures_path=os.path.join(out_dir, "mixtures.csv"),
        )
        rows = compute_summary_rows(result.traces, exp, exp.report_window, extras)
        _write_rows(rows, os.path.join(out_dir, "summary.csv"))
        with open(os.path.join(out_dir, "config.cfg"), "w", encoding="utf-8") as fh:
            fh.write(serialize_config(exp.entries))
    except RunError as exc:
        return _fail(str(exc), 2)
    except Exception as exc:  # noqa: BLE001 - surfaced as a runtime failure
        return _fail(f"run failed: {exc}", 2)
    print(f"wrote trace.csv, mixtures.csv, summary.csv to {out_dir}")
    return 0


def cmd_report(args) -> int:
    trace_path = os.path.join(args.trace_dir, "trace.csv")
    config_path = os.path.join(args.trace_dir, "config.cfg")
    for path in (trace_path, config_path):
        if not os.path.exists(path):
            return _fail(f"missing required file: {path}", 1)
    try:
        entries = load_config_file(config_path)
        exp = build_experiment(entries)
        traces, _history = read_trace_csv(
            trace_path, mixtures_path=os.path.join(args.trace_dir, "mixtures.csv")
        )
        _target, extras = build_target(exp)
        window = args.window if args.window is not None else exp.report_window
        if window < 1:
            raise ConfigError(f"window must be >= 1, got {window}")
        rows = compute_summary_rows(traces, exp, window, extras)
    except (ConfigError, ValueError) as exc:
        return _fail(str(exc), 1)
    _write_rows(rows, os.path.join(args.trace_dir, "report.csv"))
    print(f"wrote report.csv to {args.trace_dir}")
    return 0


def _read_samples_csv(path) -> np.ndarray:
    rows = []
    try:
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row:
                    continue
                try:
                    rows.append([float(v) for v in row])
                except ValueError:
                    if lineno == 1:  # tolerate a header line
                        continue
                    raise ValueError(f"{path}:{lineno}: malformed sample row") from None
    except OSError as exc:
        raise ValueError(f"cannot read samples CSV {path}: {exc}") from exc
    if not rows:
        raise ValueError(f"{path}: no sample rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: inconsistent row widths {sorted(widths)}")
    return np.asarray(rows)


def cmd_fit(args) -> int:
    try:
        scheme = Scheme(args.scheme)
        samples = _read_samples_csv(args.samples)
        rng = np.random.default_rng(args.seed)
        config = AdaptationConfig(
            scheme=scheme,
            components=args.components,
            reg_radius=args.reg_radius,
            em_max_iters=args.max_iters,
            em_tol=args.tol,
            fixed_dof=args.fixed_dof,
            learning_rate=LearningRateSchedule(c=args.sa_c, n0=args.sa_n0),
        )
        if scheme is Scheme.SA_GMM:
            if args.init is None:
                raise ConfigError("sa_gmm needs --init with a starting mixture CSV")
            history = read_mixtures_csv(args.init)
            if not history:
                raise ConfigError(f"{args.init}: no mixture rows")
            mixture = history[-1][1]
            if mixture.kind != "gaussian":
                raise ConfigError("sa_gmm requires a Gaussian starting mixture")
            out_history = []
            for step in range(1, args.sa_steps + 1):
                rate = config.learning_rate.rate(step)
                mixture = ad.sa_gmm_update(mixture, samples, rate, config.reg_radius)
                out_history.append((step, mixture))
            if not out_history:
                out_history = [(0, mixture)]
        else:
            fitters = {
                Scheme.EM_GMM: ad.em_gmm_fit,
                Scheme.VI_GMM: ad.vi_gmm_fit,
                Scheme.EM_TMM: ad.em_tmm_fit,
            }
            fit = fitters[scheme](samples, args.components, config, rng)
            out_history = [(0, fit.mixture)]
    except (ConfigError, ValueError, np.linalg.LinAlgError) as exc:
        return _fail(str(exc), 1)
    write_mixtures_csv(out_history, args.out)
    print(f"wrote fitted mixture to {args.out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rgess",
        description="Regional generalized elliptical slice sampling experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config or preset")
    p_run.add_argument("config", help="config path or preset name "
                                      f"(presets: {', '.join(available_presets()) or 'none'})")
    p_run.add_argument("--out", help="output directory (overrides output.dir)")
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config key; repeatable")
    p_run.set_defaults(func=cmd_run)

    p_rep = sub.add_parser("report", help="recompute diagnostics from trace CSVs")
    p_rep.add_argument("trace_dir")
    p_rep.add_argument("--window", type=int, default=None,
                       help="rejection-rate window size")
    p_rep.set_defaults(func=cmd_report)

    p_fit = sub.add_parser("fit", help="fit a mixture to a CSV of sample vectors")
    p_fit.add_argument("samples", help="CSV of D-vectors, one per row")
    p_fit.add_argument("--scheme", required=True,
                       choices=[s.value for s in Scheme])
    p_fit.add_argument("--components", "-M", type=int, required=True)
    p_fit.add_argument("--out", default="mixture.csv")
    p_fit.add_argument("--reg-radius", type=float, default=0.0)
    p_fit.add_argument("--max-iters", type=int, default=100)
    p_fit.add_argument("--tol", type=float, default=1e-6)
    p_fit.add_argument("--seed", type=int, default=0)
    p_fit.add_argument("--fixed-dof", type=float, default=None)
    p_fit.add_argument("--init", help="starting mixture CSV (sa_gmm only)")
    p_fit.add_argument("--sa-steps", type=int, default=1)
    p_fit.add_argument("--sa-c", type=float, default=0.5)
    p_fit.add_argument("--sa-n0", type=int, default=10)
    p_fit.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
