"""Print exceedance-probability tables for the two renewal regimes.

Case 1 (finite variance) under the C modulus should fade as delta shrinks;
case 2 (Pareto 0.7) under the M1 modulus should not.  Settings come from the
[probe.tightness] sections of configs/case1.cfg and configs/case2.cfg.
"""

import argparse
from pathlib import Path

from cadlag_lab.config import load_config
from cadlag_lab.lab import tightness_table

ROOT = Path(__file__).resolve().parents[1]


def table(cfg_name, workers):
    cfg, probes, _ = load_config(ROOT / "configs" / cfg_name)
    kw = dict(probes["tightness"])
    kind, deltas, ns, eps = kw.pop("kind"), kw.pop("deltas"), kw.pop("n_grid"), kw.pop("eps")
    rep = tightness_table(cfg, kind, deltas, ns, eps, workers=workers, **kw)
    stat = f"P(omega_{kind}>eps)"
    print(f"\n{cfg_name}: {stat}, eps={eps}, reps={kw.get('reps', 200)}")
    print("n \\ delta " + "".join(f"{d:>9g}" for d in deltas))
    for n in ns:
        print(f"{n:<10d}" + "".join(f"{rep.value(stat, n=n, delta=d):9.3f}" for d in deltas))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    table("case1.cfg", args.workers)
    table("case2.cfg", args.workers)


if __name__ == "__main__":
    main()
