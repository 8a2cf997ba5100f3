#!/usr/bin/env python3
"""Run the verification suite and write JSON and CSV reports."""

import argparse
import json
import sys
from pathlib import Path

from localmorrey.suite import VerifyConfig, manifest_complete, verify_suite


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", type=Path, help="JSON file with suite settings")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("reports"))
    ap.add_argument("--quiet", action="store_true")
    args = ap.parse_args(argv)

    data = json.loads(args.config.read_text()) if args.config else {}
    cfg = VerifyConfig.from_json({**data, "seed": args.seed})

    def show(rec):
        if not args.quiet:
            print(f"{rec.status:4s}  {rec.name}  {rec.case}", flush=True)

    report = verify_suite(cfg, progress=None if args.quiet else show)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / f"verify_seed{args.seed}.json").write_text(report.to_json())
    (args.out / f"verify_seed{args.seed}.csv").write_text(report.to_csv())
    print(json.dumps({"summary": report.summary(), "manifest_complete": manifest_complete(report)}))
    return 0 if report.ok else 3


if __name__ == "__main__":
    sys.exit(main())
