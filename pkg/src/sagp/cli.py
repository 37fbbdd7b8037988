"""Command line: ``sagp simulate | fit | predict | report``.

Exit status is 0 on success, 2 for bad arguments or unusable input files,
and 1 for I/O and numerical failures.
"""

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import tracestore
from .data import DataError, read_dataset, read_table, write_dataset
from .heatmap import write_heatmap
from .kernel import NumericalError
from .pipeline import build_report, fit_dataset, predict_dataset, split_rows
from .sampler import RunConfig
from .simulate import SimSpec, generate

log = logging.getLogger("sagp")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad flags or inputs; mapped to exit status 2."""


def _bool(text):
    low = text.strip().lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def _fraction(text):
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return v


def _truth_path(data_path):
    root, _ = os.path.splitext(data_path)
    return root + ".truth.json"


# -- simulate ----------------------------------------------------------------


def cmd_simulate(args):
    try:
        spec = SimSpec(args.dataset, args.interaction, n=args.n, p=args.p, sigma2=args.sigma2, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    X, y, _, true_vars, true_pairs = generate(spec)
    out = args.out or f"dataset{spec.dataset_id}{'_int' if spec.interaction else ''}_seed{spec.seed}.csv"
    write_dataset(out, X, y)
    sidecar = {
        "dataset": spec.dataset_id,
        "interaction": spec.interaction,
        "n": int(X.shape[0]),
        "p": int(X.shape[1]),
        "sigma2": spec.sigma2,
        "seed": spec.seed,
        "signals": [int(j) + 1 for j in true_vars],
        "pairs": [[int(a) + 1, int(b) + 1] for a, b in true_pairs],
    }
    truth = _truth_path(out)
    with open(truth, "w") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")
    print(out)
    print(truth)


# -- fit ---------------------------------------------------------------------


def _config_from_args(args):
    try:
        return RunConfig(
            k=args.k,
            iterations=args.iterations,
            burn_in=args.burn_in,
            sigma2=args.sigma2,
            sigma2_mode=args.sigma2_mode,
            cv_every=args.cv_every,
            seed=args.seed,
            thread_count=args.threads,
            inclusion_threshold=args.inclusion_threshold,
            interaction_threshold=args.interaction_threshold,
            ranking_statistic=args.ranking_statistic,
            kappa_log_step=args.kappa_log_step,
            scale_log_step=args.scale_log_step,
            kappa_target=args.kappa_target,
            selection_scale=args.selection_scale,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_fit(args):
    cfg = _config_from_args(args)
    ds = read_dataset(args.data, args.response)
    if ds.n < 2:
        raise UsageError(f"{args.data}: need at least two rows")
    os.makedirs(args.out, exist_ok=True)
    if args.split is not None:
        try:
            train, held = split_rows(ds.n, args.split, args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        train_path = os.path.join(args.out, "train.csv")
        write_dataset(train_path, ds.X[train], ds.y[train], ds.names, ds.response)
        write_dataset(os.path.join(args.out, "heldout.csv"), ds.X[held], ds.y[held], ds.names, ds.response)
        ds = ds.subset(train)
        data_file = train_path
    else:
        data_file = args.data

    def progress(t):
        if (t + 1) % 100 == 0:
            log.info("iteration %d / %d", t + 1, cfg.iterations)

    res = fit_dataset(ds, cfg, progress=progress)
    in_band = (res.kappa_accept >= 0.15) & (res.kappa_accept <= 0.45)
    summary = {
        "backend": res.extra.get("backend"),
        "seconds": round(res.seconds, 3),
        "numerical_rejections": res.failures,
        "kappa_acceptance_mean": float(np.mean(res.kappa_accept)),
        "kappa_acceptance_in_band": float(np.mean(in_band)),
        "psi_acceptance_mean": float(np.mean(res.psi_accept)),
        "tau_acceptance_mean": float(np.mean(res.tau_accept)),
        "final_weights": res.trace.weight[-1].tolist(),
        "final_signs": res.trace.sign[-1].tolist(),
        "final_lambda": float(res.trace.lam[-1]),
    }
    meta = {
        "data_file": os.path.abspath(data_file),
        "response": ds.response,
        "names": ds.names,
        "y_center": ds.y_center,
        "y_scale": ds.y_scale,
    }
    tracestore.write_trace(args.out, res.trace, cfg, data_meta=meta, summary=summary)
    print(args.out)


# -- predict -----------------------------------------------------------------


def _training_data(man, override):
    path = override or man.get("data_file")
    if not path:
        raise UsageError("trace manifest names no training data; pass --data")
    return read_dataset(path, man.get("response", "y"))


def cmd_predict(args):
    trace, cfg, man = tracestore.read_trace(args.trace)
    ds = _training_data(man, args.data)
    if ds.p != man["p"] or ds.n != man["n"]:
        raise UsageError(f"training data is {ds.n}x{ds.p}, trace expects {man['n']}x{man['p']}")
    header, M = read_table(args.new)
    predictors = [h for h in header if h != ds.response]
    if sorted(predictors) != sorted(ds.names):
        raise UsageError(f"{args.new}: expected predictor columns {ds.names}, found {predictors}")
    X_new = M[:, [header.index(c) for c in ds.names]]
    observed = M[:, header.index(ds.response)] if ds.response in header else None
    pred = predict_dataset(trace, cfg, ds, X_new) if X_new.shape[0] else np.empty(0)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["prediction"] + (["observed"] if observed is not None else []))
        for i, v in enumerate(pred):
            w.writerow([repr(float(v))] + ([repr(float(observed[i]))] if observed is not None else []))
    print(args.out)


# -- report ------------------------------------------------------------------


def _read_truth(path, p):
    with open(path) as fh:
        try:
            side = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: not valid JSON ({exc})") from None
    try:
        signals = [int(j) - 1 for j in side["signals"]]
    except (KeyError, TypeError, ValueError):
        raise UsageError(f"{path}: truth sidecar needs a 'signals' list") from None
    if any(j < 0 or j >= p for j in signals):
        raise UsageError(f"{path}: signal index outside 1..{p}")
    return signals


def cmd_report(args):
    trace, cfg, man = tracestore.read_trace(args.trace)
    p = man["p"]
    names = man.get("names") or [f"x{j + 1}" for j in range(p)]
    truth = _read_truth(args.truth, p) if args.truth else None
    rep = build_report(
        trace,
        cfg,
        truth=truth,
        statistic=args.ranking_statistic,
        inclusion_threshold=args.inclusion_threshold,
        interaction_threshold=args.interaction_threshold,
        scale=args.selection_scale,
    )
    os.makedirs(args.out_dir, exist_ok=True)

    with open(os.path.join(args.out_dir, "inclusion.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variable", "probability", "selected"])
        sel = set(rep.selected.tolist())
        for j in range(p):
            w.writerow([names[j], repr(float(rep.analysis.inclusion[j])), int(j in sel)])
    M = rep.analysis.interaction
    with open(os.path.join(args.out_dir, "interaction.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variable"] + names)
        for j in range(p):
            w.writerow([names[j]] + [repr(float(v)) for v in M[j]])
    with open(os.path.join(args.out_dir, "pairs.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variable_a", "variable_b", "probability"])
        for a, b in rep.pairs:
            w.writerow([names[a], names[b], repr(float(M[a, b]))])
    if not args.no_heatmap:
        write_heatmap(os.path.join(args.out_dir, "heatmap.svg"), M, names)

    print("selected: " + (", ".join(names[j] for j in rep.selected) or "(none)"))
    print("active components: " + (", ".join(str(l + 1) for l in rep.analysis.active_functions) or "(none)"))
    if rep.rates is not None:
        fnr = f"{rep.rates.fnr:.4f}" if rep.rates.fnr_defined else "undefined"
        print(f"FPR {rep.rates.fpr:.4f} FNR {fnr}")


# -- parser ------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="sagp", description="Sparse additive Gaussian process with soft interactions.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="generate a simulation dataset and its truth sidecar")
    s.add_argument("--dataset", type=int, choices=[1, 2, 3, 4], required=True)
    s.add_argument("--interaction", type=_bool, default=False, help="add pairwise product terms (true/false)")
    s.add_argument("--n", type=_positive_int, default=None, help="rows (default per dataset)")
    s.add_argument("--p", type=_positive_int, default=None, help="columns (default per dataset)")
    s.add_argument("--sigma2", type=float, default=0.02)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None, help="CSV path; the sidecar goes next to it as *.truth.json")
    s.set_defaults(func=cmd_simulate)

    d = RunConfig()
    f = sub.add_parser("fit", help="run the sampler and write a trace directory")
    f.add_argument("--data", required=True, help="CSV with a header row")
    f.add_argument("--response", default="y", help="response column name")
    f.add_argument("--out", required=True, help="run directory")
    f.add_argument("--k", type=_positive_int, default=d.k, help="number of additive components")
    f.add_argument("--iterations", type=_positive_int, default=d.iterations)
    f.add_argument("--burn-in", type=int, default=d.burn_in, help="sweeps discarded from summaries; steps adapt only here")
    f.add_argument("--sigma2", type=float, default=d.sigma2, help="noise variance in response units")
    f.add_argument("--sigma2-mode", choices=["fixed", "empirical"], default=d.sigma2_mode, help="empirical re-estimates noise from the residual each sweep")
    f.add_argument("--cv-every", type=_positive_int, default=d.cv_every, help="sweeps between lasso cross-validations")
    f.add_argument("--seed", type=int, default=d.seed)
    f.add_argument("--threads", type=_positive_int, default=d.thread_count, help="BLAS thread cap")
    f.add_argument("--inclusion-threshold", type=_fraction, default=d.inclusion_threshold)
    f.add_argument("--interaction-threshold", type=_fraction, default=d.interaction_threshold)
    f.add_argument("--ranking-statistic", choices=["median", "mean"], default=d.ranking_statistic, help="trace summary used to rank variables")
    f.add_argument("--kappa-log-step", type=float, default=d.kappa_log_step, help="initial log-scale proposal sd for kappa")
    f.add_argument("--scale-log-step", type=float, default=d.scale_log_step, help="initial log-scale proposal sd for tau and psi")
    f.add_argument("--kappa-target", choices=["residual", "response"], default=d.kappa_target, help="vector the kappa likelihood is evaluated on")
    f.add_argument("--selection-scale", choices=["sqrt", "raw"], default=d.selection_scale, help="transform of kappa before 2-means")
    f.add_argument("--split", type=float, default=None, help="training fraction; the rest is written to heldout.csv")
    f.set_defaults(func=cmd_fit)

    pr = sub.add_parser("predict", help="posterior-mean predictions for new rows")
    pr.add_argument("--trace", required=True, help="run directory written by fit")
    pr.add_argument("--data", default=None, help="training CSV (defaults to the one recorded in the trace)")
    pr.add_argument("--new", required=True, help="CSV of rows to predict; predictors matched by name")
    pr.add_argument("--out", required=True, help="output CSV")
    pr.set_defaults(func=cmd_predict)

    r = sub.add_parser("report", help="inclusion and interaction probabilities from a trace")
    r.add_argument("--trace", required=True, help="run directory written by fit")
    r.add_argument("--out-dir", required=True)
    r.add_argument("--truth", default=None, help="truth sidecar written by simulate")
    r.add_argument("--inclusion-threshold", type=float, default=None, help="override the value stored with the trace")
    r.add_argument("--interaction-threshold", type=float, default=None, help="pairs at or above this are listed")
    r.add_argument("--ranking-statistic", choices=["median", "mean"], default=None)
    r.add_argument("--selection-scale", choices=["sqrt", "raw"], default=None)
    r.add_argument("--no-heatmap", action="store_true")
    r.set_defaults(func=cmd_report)
    return ap


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad flags
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        args.func(args)
    except (UsageError, DataError) as exc:
        print(f"sagp {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, OSError) as exc:
        print(f"sagp {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
