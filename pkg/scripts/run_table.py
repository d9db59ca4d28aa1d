"""Cross-validate every model/scheme preset on one trace file and print a comparison table.

    python scripts/run_table.py --traces traces.json --out results/
    python scripts/run_table.py --synth 300 --rows gcn-fa,gcn-faa --out results/

Writes one metrics JSON per row plus ``table.csv``. Without ``--traces`` a
synthetic dataset is generated with default generator settings.
"""

import argparse
import csv
import time
from pathlib import Path

from reasonpath import trace_model as tm
from reasonpath.config import PRESETS, ExperimentConfig
from reasonpath.experiment import baseline_report, dumps_report, run_experiment
from reasonpath.synth import SynthConfig, generate


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--traces", type=Path, help="trace JSON file")
    ap.add_argument("--synth", type=int, default=300, help="synthetic bug count when --traces is absent")
    ap.add_argument("--rows", default=",".join(f"{m.value}-{s.value}" for m, s in PRESETS),
                    help="comma list of model-scheme rows, e.g. gcn-fa,lstm-f")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1, help="parallel folds per row")
    ap.add_argument("--epoch-selection", default="paper_peak_test", choices=["paper_peak_test", "final_epoch"])
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()

    ds = tm.ingest(args.traces) if args.traces else generate(SynthConfig(n_bugs=args.synth, seed=args.seed))
    args.out.mkdir(parents=True, exist_ok=True)

    rows = []
    base = baseline_report(ds.bugs)
    for name, key in (("confidence", "confidence"), ("all-positive", "all_positive")):
        rows.append({"method": name, **{k: base[key][k] for k in ("accuracy", "roc_auc", "precision", "recall")},
                     "seconds": 0.0})

    for row in args.rows.split(","):
        model, scheme = row.strip().split("-")
        cfg = ExperimentConfig.from_dict({"model": model, "scheme": scheme, "seed": args.seed,
                                          "epoch_selection": args.epoch_selection})
        start = time.perf_counter()
        rep = run_experiment(cfg, ds.bugs, ds.header.N, jobs=args.jobs)
        elapsed = time.perf_counter() - start
        (args.out / f"{row}.json").write_text(dumps_report(rep))
        agg = rep["aggregate"]
        rows.append({"method": row, **{k: agg[k] for k in ("accuracy", "roc_auc", "precision", "recall")},
                     "seconds": round(elapsed, 1)})
        print(f"{row:10} acc {agg['accuracy']:.4f}  prec {agg['precision']:.4f}  "
              f"rec {agg['recall']:.4f}  ({elapsed:.0f}s)", flush=True)

    with open(args.out / "table.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    print()
    for r in rows:
        cells = ["   n/a" if r[k] is None else f"{r[k]:.4f}" for k in ("accuracy", "roc_auc", "precision", "recall")]
        print(f"{r['method']:14}" + "  ".join(cells))


if __name__ == "__main__":
    main()
