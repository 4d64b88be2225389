"""Analyze the shipped corpus and write per-germ reports plus a summary table.

    python3 scripts/run_corpus.py --out results/ --seed 42 --jobs 4
"""

import argparse
import json
from pathlib import Path

from realmilnor.analysis import Options, dumps, run_corpus, summary_row, summary_table
from realmilnor.numeric import NumericConfig

CORPUS = Path(__file__).resolve().parents[1] / "src" / "realmilnor" / "corpus"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--corpus", default=str(CORPUS))
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    options = Options(numeric=NumericConfig(seed=args.seed))
    reports, code = run_corpus(args.corpus, options, jobs=args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for rep in reports:
        (out / f"{Path(rep['germ']['source']).stem}.report.json").write_text(dumps(rep))
    rows = [summary_row(r) for r in reports]
    (out / "summary.json").write_text(json.dumps(rows, indent=2, sort_keys=True) + "\n")
    table = summary_table(rows)
    (out / "summary.txt").write_text(table)
    print(table, end="")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
