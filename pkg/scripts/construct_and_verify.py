#!/usr/bin/env python3
"""Build a grid of cubature formulas and verify each one.

Example:

    python scripts/construct_and_verify.py --fields R C --m-max 4 --p-max 10
    python scripts/construct_and_verify.py --fields H --m-max 3 --p-max 8 \
        --out-dir /tmp/formulas --samples 2048
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import projcub as pc


@dataclass
class SweepConfig:
    fields: list[str] = field(default_factory=lambda: ["R", "C", "H"])
    m_min: int = 2
    m_max: int = 4
    p_min: int = 4
    p_max: int = 10
    samples: int = 512
    seed: int = 0
    cap: int = 1_000_000
    out_dir: Path | None = None


def parse_args(argv=None) -> SweepConfig:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fields", nargs="+", default=["R", "C", "H"],
                    choices=["R", "C", "H"])
    ap.add_argument("--m-min", type=int, default=2)
    ap.add_argument("--m-max", type=int, default=4)
    ap.add_argument("--p-min", type=int, default=4)
    ap.add_argument("--p-max", type=int, default=10)
    ap.add_argument("--samples", type=int, default=512,
                    help="random verification directions per formula")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cap", type=int, default=1_000_000,
                    help="skip combinations predicted to exceed this node count")
    ap.add_argument("--out-dir", type=Path, default=None,
                    help="write each formula as JSON into this directory")
    a = ap.parse_args(argv)
    return SweepConfig(a.fields, a.m_min, a.m_max, a.p_min, a.p_max,
                       a.samples, a.seed, a.cap, a.out_dir)


def main(argv=None) -> int:
    cfg = parse_args(argv)
    if cfg.out_dir is not None:
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
    header = f"{'field':>5} {'m':>3} {'p':>3} {'nodes':>9} {'residual':>10} {'gap':>10} {'time':>7}  status"
    print(header)
    print("-" * len(header))
    any_fail = False
    for name in cfg.fields:
        for m in range(cfg.m_min, cfg.m_max + 1):
            for p in range(cfg.p_min, cfg.p_max + 1, 2):
                t0 = time.perf_counter()
                try:
                    f = pc.construct(name, m, p, cap=cfg.cap)
                except pc.NodeBudgetError:
                    print(f"{name:>5} {m:>3} {p:>3} {'-':>9} {'-':>10} {'-':>10} {'-':>7}  over cap")
                    continue
                rep = pc.check(f, samples=cfg.samples, seed=cfg.seed)
                dt = time.perf_counter() - t0
                gap = ("inf" if rep.min_projective_gap == float("inf")
                       else f"{rep.min_projective_gap:.2e}")
                status = "ok" if rep.passed else "FAIL " + "; ".join(rep.failures())
                any_fail = any_fail or not rep.passed
                print(f"{name:>5} {m:>3} {p:>3} {f.n:>9} "
                      f"{rep.max_rel_residual:>10.2e} {gap:>10} {dt:>6.2f}s  {status}")
                if cfg.out_dir is not None:
                    pc.write_formula(f, cfg.out_dir / f"{name}_m{m}_p{p}.json")
    return 1 if any_fail else 0


if __name__ == "__main__":
    sys.exit(main())
