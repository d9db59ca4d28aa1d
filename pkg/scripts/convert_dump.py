"""Convert a directory of per-run chat logs into a reasonpath trace file.

Best-effort adapter, not part of the package API. The expected layout is

    DUMP/<run_name>/<dataset>/<bug_id>.json      (one directory per repeated run)

where each log is a JSON object with

    "messages": chat transcript; assistant messages may carry
                {"function_call": {"name": str, "arguments": str-encoded JSON}}
                and the following {"role": "function", "content": str} message is its result
    "buggy_methods": list of method signatures (the final answer), optional
    "ground_truth": str (optional; else taken from --ground-truth)

Tool names are mapped to indices 0-4 by ``--functions`` (order matters). A call
counts as unresolved when its result matches ``--unresolved`` (regex). Bugs with
fewer than R logs get empty runs appended; runs longer than N are truncated
(``--strict`` makes both an error instead). Adjust the field names below if the
dump differs.

    python scripts/convert_dump.py DUMP out.json --functions a,b,c,d,e --N 10
"""

import argparse
import json
import re
import sys
from pathlib import Path

from reasonpath import trace_model as tm

ANSWER_KEYS = ("buggy_methods", "answer")
ARGUMENT_KEYS = ("signature", "method_name", "class_name", "name")


def _argument(raw: str | None) -> str | None:
    if not raw:
        return None
    try:
        parsed = json.loads(raw)
    except json.JSONDecodeError:
        return raw.strip() or None
    if isinstance(parsed, dict):
        for key in ARGUMENT_KEYS:
            if parsed.get(key):
                return str(parsed[key])
        return json.dumps(parsed, sort_keys=True) if parsed else None
    return str(parsed)


def convert_log(log: dict, functions: dict[str, int], unresolved: re.Pattern, N: int, strict: bool):
    steps = []
    messages = log.get("messages", [])
    for i, msg in enumerate(messages):
        fc = msg.get("function_call")
        if not fc:
            continue
        if fc["name"] not in functions:
            raise ValueError(f"unknown tool {fc['name']!r}; pass it in --functions")
        result = messages[i + 1].get("content", "") if i + 1 < len(messages) else ""
        arg = _argument(fc.get("arguments"))
        steps.append({"function": functions[fc["name"]], "argument": arg,
                      "resolved": arg is None or not unresolved.search(result or "")})
    if len(steps) > N:
        if strict:
            raise ValueError(f"{len(steps)} steps exceeds N={N}")
        steps = steps[:N]
    answer = next((log[k] for k in ANSWER_KEYS if k in log), [])
    return {"steps": steps, "answer": sorted(set(map(str, answer)))}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("dump", type=Path)
    ap.add_argument("out", type=Path)
    ap.add_argument("--functions", required=True, help="comma list of the five tool names, index order")
    ap.add_argument("--N", type=int, default=10, help="maximum steps per run")
    ap.add_argument("--unresolved", default=r"(?i)\b(not found|no such|error)\b",
                    help="regex on a tool result marking the call unresolved")
    ap.add_argument("--ground-truth", type=Path, help="JSON map bug_id -> faulty method signature")
    ap.add_argument("--strict", action="store_true", help="fail on missing runs or overlong runs")
    args = ap.parse_args(argv)

    names = [n.strip() for n in args.functions.split(",")]
    if len(names) != 5:
        ap.error("--functions needs exactly five names")
    functions = {n: i for i, n in enumerate(names)}
    truth = json.loads(args.ground_truth.read_text()) if args.ground_truth else {}
    pattern = re.compile(args.unresolved)

    run_dirs = sorted(p for p in args.dump.iterdir() if p.is_dir())
    R = len(run_dirs)
    bugs: dict[str, dict] = {}
    for r, run_dir in enumerate(run_dirs):
        for path in sorted(run_dir.glob("*/*.json")):
            bug_id, dataset = path.stem, path.parent.name.lower()
            log = json.loads(path.read_text())
            entry = bugs.setdefault(bug_id, {"bug_id": bug_id, "dataset": dataset,
                                             "ground_truth": log.get("ground_truth") or truth.get(bug_id),
                                             "runs": [None] * R})
            entry["runs"][r] = convert_log(log, functions, pattern, args.N, args.strict)

    out = []
    for bug_id in sorted(bugs):
        entry = bugs[bug_id]
        if entry["ground_truth"] is None:
            print(f"skipping {bug_id}: no ground truth", file=sys.stderr)
            continue
        if None in entry["runs"]:
            if args.strict:
                raise SystemExit(f"{bug_id}: missing runs")
            entry["runs"] = [r or {"steps": [], "answer": []} for r in entry["runs"]]
        out.append(entry)

    doc = {"R": R, "N": args.N, "functions": functions, "bugs": out}
    ds = tm.parse(doc)  # validates before writing
    tm.write(ds, args.out)
    print(f"wrote {len(ds.bugs)} bugs, R={R}, N={args.N} to {args.out}")


if __name__ == "__main__":
    main()
