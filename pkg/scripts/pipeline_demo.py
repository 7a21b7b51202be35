"""Run every CLI stage on bundled synthetic data.

    python3 scripts/pipeline_demo.py --config configs/smoke.json --out runs/smoke
"""
import argparse
import sys
from pathlib import Path

from rollcast import cli

STAGES = ("preprocess", "diagnose", "gridsearch", "fit", "forecast", "evaluate")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="configs/smoke.json")
    ap.add_argument("--out", default="runs/demo")
    ap.add_argument("--seed", default="0")
    args = ap.parse_args()
    out = Path(args.out)
    common = ["--config", args.config, "--seed", args.seed]
    code = cli.main(["synth", *common, "--out", str(out)])
    if code:
        return code
    raw = str(out / "synthetic.json")
    worst = 0
    for stage in STAGES:
        print(f"== {stage}", flush=True)
        code = cli.main([stage, raw, *common, "--out", str(out / stage if stage != "forecast" else out / "fit")])
        print(f"   exit {code}")
        if code == 2:
            return code
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
