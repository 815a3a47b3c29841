"""Run every probe declared in the frozen configs through the CLI.

    python scripts/run_probes.py [--out runs] [--only case2.cfg] [--workers 4]

Each (config, probe) pair gets its own output directory with CSV, JSON and a
manifest.  A one-line status per probe is printed at the end.
"""

import argparse
import time
from pathlib import Path

from cadlag_lab.cli import run
from cadlag_lab.config import load_config

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="runs")
    ap.add_argument("--only", default=None, help="restrict to one config file name")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    rows = []
    for cfg_path in sorted((ROOT / "configs").glob("*.cfg")):
        if args.only and cfg_path.name != args.only:
            continue
        _, probes, _ = load_config(cfg_path)
        for name in probes:
            out = Path(args.out) / cfg_path.stem / name
            t0 = time.perf_counter()
            rc = run(["probe", "--config", str(cfg_path), "--name", name, "--out", str(out),
                      "--workers", str(args.workers)])
            rows.append((cfg_path.stem, name, rc, time.perf_counter() - t0))
    print(f"{'config':<12}{'probe':<16}{'status':<8}seconds")
    for cfg, name, rc, secs in rows:
        status = {0: "pass", 1: "FAIL"}.get(rc, "error")
        print(f"{cfg:<12}{name:<16}{status:<8}{secs:8.1f}")


if __name__ == "__main__":
    main()
