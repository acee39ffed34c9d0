"""Run every verification suite and write a JSON report."""

import argparse
import json
import sys
from pathlib import Path

from phasestar.config import RunConfig
from phasestar.parsefmt import GRAMMAR_VERSION
from phasestar.verify import run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results/suites.json"))
    ap.add_argument("--seed", type=int, default=RunConfig.seed)
    ap.add_argument("--order", type=int, default=10)
    args = ap.parse_args()

    cfg = RunConfig(order=args.order, seed=args.seed)
    results = run_suite("all", cfg)
    for r in results:
        print(f"{r.status:4} {r.check_id:40} {r.runtime_ms:9.1f} ms  {r.detail}")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps({
        "grammar": GRAMMAR_VERSION,
        "config": cfg.as_dict(),
        "checks": [r.as_dict() | {"data": r.data} for r in results],
    }, indent=2, default=str))
    print(f"wrote {args.out}")
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
