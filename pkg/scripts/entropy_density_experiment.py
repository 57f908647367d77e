#!/usr/bin/env python3
"""Entropy density of ergodic measures on the full 2-shift: approximate the
mixture (1/2) B(0.9) + (1/2) B(0.1) by an ergodic block-chain measure at a
sweep of tolerances eta, reporting the weak* distance, the entropy match,
and the gluing count certificate for each."""

import argparse
import json
import os
import sys

from thermoflow.cli import main as cli_main

FULL2 = {"symbols": ["0", "1"], "transitions": [[1, 1], [1, 1]]}


def run(out_dir: str, etas, seed: int) -> int:
    os.makedirs(out_dir, exist_ok=True)
    sft = os.path.join(out_dir, "full2.json")
    with open(sft, "w") as f:
        json.dump(FULL2, f, indent=2)
    for eta in etas:
        sub = os.path.join(out_dir, f"eta_{eta:g}")
        print(f"== eta = {eta:g} ==")
        code = cli_main(["entropy-dense", "--sft", sft,
                         "--eta", str(eta), "--seed", str(seed),
                         "--out", sub])
        if code != 0:
            return code
        print(f"   artifact: {sub}/entropy_dense.json")
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/entropy_density")
    ap.add_argument("--etas", default="0.1,0.05,0.02")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    etas = [float(x) for x in args.etas.split(",") if x.strip()]
    sys.exit(run(args.out, etas, args.seed))
