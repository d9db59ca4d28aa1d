"""Command-line entry point: ``reasonpath <subcommand> ...``.

Exit codes: 0 success, 1 data/validation error, 2 config/usage error,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from . import experiment, synth, trace_model
from .config import ConfigError, ExperimentConfig
from .embedding import EmbeddingError, Scheme, build_vocabulary
from .metrics import Confusion, confusion, safe_auc
from .nn import NumericError, grad_check
from .nn.checkpoint import CheckpointError
from .nn.checkpoint import load as load_checkpoint
from .nn.checkpoint import save as save_checkpoint

log = logging.getLogger("reasonpath")

EXIT_OK, EXIT_DATA, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
GRADCHECK_TOL = 1e-4
SEED_ENV = "LACHESIS_SEED"


def _seed(args, config_seed=None) -> int:
    if args.seed is not None:
        return args.seed
    if config_seed is not None:
        return config_seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV}={env!r} is not an integer") from None
    return 0


def _out_dir(path) -> Path | None:
    if path is None:
        return None
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _fmt(x) -> str:
    return "-" if x is None else f"{x:.4f}"


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


# -- subcommands -------------------------------------------------------------


def cmd_validate(args) -> int:
    ds = trace_model.ingest(args.traces)
    n_pos = sum(trace_model.label(b) for b in ds.bugs)
    print(f"{len(ds)} bugs OK (R={ds.header.R}, N={ds.header.N}, {n_pos} labeled correct)")
    return EXIT_OK


def cmd_synth(args) -> int:
    raw = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read synth config: {exc}") from exc
    try:
        cfg = synth.SynthConfig(**{**raw, "seed": _seed(args, raw.get("seed"))})
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    out = _out_dir(args.out or ".")
    ds = synth.generate(cfg)
    trace_model.write(ds, out / "traces.json")
    print(f"wrote {len(ds)} bugs to {out / 'traces.json'} (positive rate {synth.positive_rate(ds):.4f})")
    return EXIT_OK


def _experiment_config(args) -> ExperimentConfig:
    raw = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    if args.model:
        raw["model"] = args.model
        raw.pop("representation", None)
        hp = dict(raw.get("hyperparameters") or {})
        hp.pop("model", None)
        raw["hyperparameters"] = hp
    if args.scheme:
        raw["scheme"] = args.scheme
    if args.epoch_selection:
        raw["epoch_selection"] = args.epoch_selection
    if args.threshold is not None:
        raw["threshold"] = args.threshold
    raw["seed"] = _seed(args, raw.get("seed"))
    return ExperimentConfig.from_dict(raw)


def _method_name(config) -> str:
    return f"{config.model.value}-{config.scheme.value}"


def cmd_train(args) -> int:
    config = _experiment_config(args)
    ds = trace_model.ingest(args.traces)
    data = experiment.prepare_data(ds.bugs, config.scheme, config.model, ds.header.N)
    report = experiment.run_experiment(config, ds.bugs, ds.header.N, jobs=args.jobs, data=data)
    out = _out_dir(args.out)
    method = _method_name(config)
    agg = report["aggregate"]
    print(f"{method}: " + "  ".join(f"{k} {_fmt(agg[k])}" for k in experiment.METRIC_NAMES))
    if out is None:
        return EXIT_OK
    (out / "metrics.json").write_text(experiment.dumps_report(report), encoding="utf-8")
    rows = [[method, f["fold"], *(f[k] for k in experiment.METRIC_NAMES)] for f in report["folds"]]
    rows.append([method, "mean", *(agg[k] for k in experiment.METRIC_NAMES)])
    rows.append([method, "pooled", *(report["pooled"][k] for k in experiment.METRIC_NAMES)])
    _write_csv(out / "metrics.csv", ["method", "fold", *experiment.METRIC_NAMES],
               [["" if v is None else v for v in r] for r in rows])
    roc_rows = [[f["fold"], fpr, tpr, "inf" if thr is None else thr]
                for f in report["folds"] if f["roc_points"] for fpr, tpr, thr in f["roc_points"]]
    _write_csv(out / "roc.csv", ["fold", "fpr", "tpr", "threshold"], roc_rows)
    model = experiment.train_full(config, data)
    save_checkpoint(out / "checkpoint.json", model, config.hyperparameters, config.scheme, data.vocab_width, data.N)
    print(f"wrote metrics.json, metrics.csv, roc.csv, checkpoint.json to {out}")
    return EXIT_OK


def _score_with_checkpoint(args, bugs, labels):
    model, hp, scheme, width, N = load_checkpoint(args.checkpoint)
    vocab = build_vocabulary(bugs, width=width)
    data = experiment.prepare_data(bugs, scheme, hp.model, N, vocab=vocab, labels=labels)
    if data.input_dim != model.input_dim:
        raise CheckpointError(f"traces give input width {data.input_dim}, checkpoint expects {model.input_dim}")
    return experiment.score(model, data.inputs), scheme


def _report_scores(args, bugs, scores, labels, extra: dict) -> int:
    threshold = args.threshold if args.threshold is not None else 0.5
    c: Confusion = confusion(scores, labels, threshold)
    auc = safe_auc(scores, labels)
    summary = {**extra, "n_bugs": len(bugs), "threshold": threshold, "accuracy": c.accuracy,
               "roc_auc": auc, "precision": c.precision, "recall": c.recall}
    print(f"{len(bugs)} bugs scored: accuracy {_fmt(c.accuracy)}  roc_auc {_fmt(auc)}  "
          f"precision {_fmt(c.precision)}  recall {_fmt(c.recall)}")
    out = _out_dir(args.out)
    if out is not None:
        _write_csv(out / "scores.csv", ["bug_id", "score", "label", "predicted"],
                   [[b.bug_id, float(s), int(y), int(s >= threshold)] for b, s, y in zip(bugs, scores, labels)])
        (out / "eval.json").write_text(json.dumps(summary, indent=1) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_eval(args) -> int:
    ds = trace_model.ingest(args.traces)
    labels = trace_model.labels(ds.bugs)
    scores, scheme = _score_with_checkpoint(args, ds.bugs, labels)
    return _report_scores(args, ds.bugs, scores, labels, {"mode": "full", "scheme": scheme.value})


def predict_prefix(checkpoint, bugs, t: int):
    """Score bugs from the first ``t`` steps of each run; answers are never consulted."""
    model, hp, scheme, width, N = load_checkpoint(checkpoint)
    if scheme not in (Scheme.F, Scheme.FA):
        raise ConfigError(f"prefix prediction needs scheme f or fa, checkpoint uses {scheme.value}")
    if not 0 <= t <= N:
        raise ConfigError(f"--prefix-steps {t} outside [0, {N}]")
    prefixes = [trace_model.truncate(b, t, N) for b in bugs]
    vocab = build_vocabulary(prefixes, width=width)
    data = experiment.prepare_data(prefixes, scheme, hp.model, N, vocab=vocab, labels=[False] * len(prefixes))
    if data.input_dim != model.input_dim:
        raise CheckpointError(f"traces give input width {data.input_dim}, checkpoint expects {model.input_dim}")
    return experiment.score(model, data.inputs), scheme


def cmd_predict(args) -> int:
    ds = trace_model.ingest(args.traces)
    scores, scheme = predict_prefix(args.checkpoint, ds.bugs, args.prefix_steps)
    # Labels come from the completed traces and are used for reporting only.
    labels = trace_model.labels(ds.bugs)
    return _report_scores(args, ds.bugs, scores, labels,
                          {"mode": "prefix", "prefix_steps": args.prefix_steps, "scheme": scheme.value})


def cmd_baseline(args) -> int:
    ds = trace_model.ingest(args.traces)
    threshold = args.threshold if args.threshold is not None else 0.5
    rep = experiment.baseline_report(ds.bugs, threshold)
    rows = [("AutoFL Conf.", rep["confidence"]), ("Baseline", rep["all_positive"])]
    print(f"{'Method':<14}{'Accuracy':>10}{'ROC-AUC':>10}{'Precision':>11}{'Recall':>9}")
    for name, r in rows:
        print(f"{name:<14}{_fmt(r['accuracy']):>10}{_fmt(r['roc_auc']):>10}{_fmt(r['precision']):>11}{_fmt(r['recall']):>9}")
    out = _out_dir(args.out)
    if out is not None:
        (out / "baseline.json").write_text(experiment.dumps_report(rep), encoding="utf-8")
        _write_csv(out / "baseline.csv", ["method", *experiment.METRIC_NAMES],
                   [[n, *("" if r[k] is None else r[k] for k in experiment.METRIC_NAMES)] for n, r in rows])
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    seed = _seed(args)
    kinds = [args.model] if args.model else ["lstm", "gcn"]
    worst = 0.0
    for kind in kinds:
        for k in range(args.configs):
            rep = grad_check(kind, hidden_dim=4, layers=1 + k % 3, seed=seed + k)
            worst = max(worst, rep.max_rel_error)
            print(f"{kind} config {k} (layers {1 + k % 3}, hidden 4): max relative error {rep.max_rel_error:.3e}")
    if worst >= GRADCHECK_TOL:
        print(f"gradient check FAILED: {worst:.3e} >= {GRADCHECK_TOL:g}")
        return EXIT_NUMERIC
    print(f"gradient check passed: {worst:.3e} < {GRADCHECK_TOL:g}")
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reasonpath", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def seed_flag(sp):
        sp.add_argument("--seed", type=int, help=f"random seed (fallback: config file, then ${SEED_ENV}, then 0)")

    sp = sub.add_parser("validate", help="check a trace file against the schema and invariants")
    sp.add_argument("traces", help="trace JSON file")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("synth", help="generate a synthetic trace file")
    sp.add_argument("--config", help="JSON file with SynthConfig fields")
    sp.add_argument("--out", help="output directory (writes traces.json)")
    seed_flag(sp)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("train", help="cross-validate a model, then fit a checkpoint on all bugs")
    sp.add_argument("--config", help="JSON file with ExperimentConfig fields")
    sp.add_argument("--traces", required=True, help="trace JSON file")
    sp.add_argument("--out", help="output directory for metrics and checkpoint")
    sp.add_argument("--model", choices=["lstm", "gcn"], help="model family (selects the tuned preset)")
    sp.add_argument("--scheme", choices=["s", "f", "fa", "faa"], help="step embedding scheme")
    sp.add_argument("--epoch-selection", choices=["paper", "final"],
                    help="report the peak-test-accuracy epoch (paper) or the last epoch (final)")
    sp.add_argument("--threshold", type=float, help="decision threshold on sigmoid scores (default 0.5)")
    sp.add_argument("--jobs", type=int, default=1, help="folds trained in parallel (default 1)")
    seed_flag(sp)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("eval", help="score traces with a trained checkpoint")
    sp.add_argument("--checkpoint", required=True, help="checkpoint.json written by train")
    sp.add_argument("--traces", required=True, help="trace JSON file")
    sp.add_argument("--threshold", type=float, help="decision threshold (default 0.5)")
    sp.add_argument("--out", help="output directory for scores.csv and eval.json")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("baseline", help="voting-confidence and all-positive baseline rows")
    sp.add_argument("--traces", required=True, help="trace JSON file")
    sp.add_argument("--threshold", type=float, help="confidence threshold (default 0.5)")
    sp.add_argument("--out", help="output directory for baseline.json and baseline.csv")
    sp.set_defaults(func=cmd_baseline)

    sp = sub.add_parser("gradcheck", help="compare analytic and finite-difference gradients")
    sp.add_argument("--model", choices=["lstm", "gcn"], help="model family (default: both)")
    sp.add_argument("--configs", type=int, default=5, help="seeded small configurations per model (default 5)")
    seed_flag(sp)
    sp.set_defaults(func=cmd_gradcheck)

    sp = sub.add_parser("predict", help="score traces truncated to their first steps")
    sp.add_argument("--checkpoint", required=True, help="checkpoint trained with scheme f or fa")
    sp.add_argument("--traces", required=True, help="trace JSON file")
    sp.add_argument("--prefix-steps", type=int, required=True, help="steps kept per run")
    sp.add_argument("--threshold", type=float, help="decision threshold (default 0.5)")
    sp.add_argument("--out", help="output directory for scores.csv and eval.json")
    sp.set_defaults(func=cmd_predict)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (trace_model.TraceError, experiment.RepresentationError, EmbeddingError,
            CheckpointError, OSError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
