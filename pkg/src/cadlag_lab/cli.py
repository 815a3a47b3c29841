"""Command-line front end.

    cadlag-lab simulate --config case1.cfg --out runs/sim
    cadlag-lab probe --name sigma_tilde --config case1.cfg --out runs/st
    cadlag-lab cv --v gaussian-centered --tol 1e-8
    cadlag-lab selftest

Exit status: 0 when every declared threshold passes, 1 on a threshold
failure, 2 on a bad config or invocation.  Any flag can also be given as an
environment variable ``CADLAB_<FLAG>`` (e.g. ``CADLAB_SEED``); flags win.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime as _dt
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import lab as L
from .config import load_config
from .errors import LabError
from .paths import evaluate, to_json
from .simulators import CvMethod, Scenario, cv_quadrature, named_potential, simulate_scenario, substream
from .topology import L2wTruncation

ENV_PREFIX = "CADLAB_"


def _env(name, default=None):
    return os.environ.get(ENV_PREFIX + name.upper(), default)


def _parser():
    p = argparse.ArgumentParser(prog="cadlag-lab", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, need_config=True):
        sp.add_argument("--config", default=_env("config"), required=need_config and _env("config") is None)
        sp.add_argument("--seed", type=int, default=_env("seed"))
        sp.add_argument("--workers", type=int, default=int(_env("workers", 1)))
        sp.add_argument("--out", default=_env("out", "out"))

    sim = sub.add_parser("simulate", help="sample scenario paths")
    common(sim)
    sim.add_argument("--reps", type=int, default=int(_env("reps", 1)))
    pr = sub.add_parser("probe", help="run one named probe")
    common(pr)
    pr.add_argument("--name", default=_env("name"), required=_env("name") is None,
                    choices=sorted(L.PROBE_IDS))
    cv = sub.add_parser("cv", help="occupation constant by both radial formulas")
    cv.add_argument("--v", default=_env("v", "gaussian-centered"))
    cv.add_argument("--tol", type=float, default=float(_env("tol", 1e-8)))
    sub.add_parser("selftest", help="run the built-in example and invariant checks")
    return p


def run(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:   # argparse exits 2 on bad usage, 0 on --help
        return int(exc.code or 0)
    try:
        if args.command == "cv":
            return _cv(args)
        if args.command == "selftest":
            from .selftest import run_all
            return 0 if run_all(lambda s: print(s)) else 1
        cfg, probes, echo = load_config(args.config)
        if args.seed is not None:
            if cfg is None:
                raise LabError("CONFIG_PARSE", "--seed needs a [scenario] section")
            cfg = dataclasses.replace(cfg, seed=args.seed)
        if args.command == "simulate":
            return _simulate(args, cfg, echo)
        return _probe(args, cfg, probes, echo)
    except LabError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2 if exc.code in ("CONFIG_PARSE", "CONFIG_INVALID", "REDUCIBLE_CHAIN", "NOT_CENTERED") else 1


def main():
    sys.exit(run())


# --------------------------------------------------------------------------


def _cv(args):
    pot = named_potential(args.v)
    g = cv_quadrature(pot, CvMethod.GRADIENT, args.tol)
    k = cv_quadrature(pot, CvMethod.LOGKERNEL, args.tol)
    gap = abs(g - k)
    print(f"GRADIENT  {g:.15g}")
    print(f"LOGKERNEL {k:.15g}")
    print(f"gap       {gap:.3e}")
    return 0 if gap <= 2 * args.tol else 1


def _write_manifest(out: Path, args, cfg, echo, files):
    doc = {
        "tool": "cadlag_lab",
        "version": __version__,
        "command": args.command,
        "seed": None if cfg is None else cfg.seed,
        "config": echo,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "files": [{"name": f, "sha256": hashlib.sha256((out / f).read_bytes()).hexdigest()}
                  for f in sorted(files)],
    }
    (out / "manifest.json").write_text(json.dumps(doc, indent=1, sort_keys=True, default=str) + "\n")


def _simulate(args, cfg, echo):
    if cfg is None:
        raise LabError("CONFIG_PARSE", "simulate needs a [scenario] section")
    if cfg.scenario is Scenario.OCCUPATION_PLANAR:
        raise LabError("CONFIG_INVALID", "simulate supports renewal scenarios; use the occupation probe")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    grid = np.arange(0.0, cfg.T + 1e-12, cfg.grid_step)
    grid[-1] = min(grid[-1], cfg.T)
    rows = []
    for r in range(args.reps):
        s = simulate_scenario(cfg, substream(cfg.seed, 0, 0, r))
        for name in ("M", "A", "W", "X", "centered"):
            fn = f"rep{r:04d}_{name}.json"
            (out / fn).write_text(to_json(getattr(s, name)) + "\n")
            files.append(fn)
        cols = [evaluate(getattr(s, nm), grid)[:, 0] for nm in ("M", "A", "W", "X", "centered")]
        rows.extend([r, t, *vals] for t, *vals in zip(grid, *cols))
    with open(out / "grid.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rep", "t", "M", "A", "W", "X", "centered"])
        w.writerows([[row[0], *map(repr, map(float, row[1:]))] for row in rows])
    files.append("grid.csv")
    _write_manifest(out, args, cfg, echo, files)
    return 0


def _probe(args, cfg, probes, echo):
    name = args.name
    kw = dict(probes.get(name, {}))
    w = args.workers
    needs_cfg = name not in ("l2w_sine", "occupation")
    if needs_cfg and cfg is None:
        raise LabError("CONFIG_PARSE", f"probe {name} needs a [scenario] section")
    trunc = L2wTruncation(kw.pop("K", 12), kw.pop("L", 8), kw.pop("quad_tol", 1e-10)) \
        if name in ("l2w", "l2w_sine") else None
    try:
        if name == "tightness":
            rep = L.tightness_table(cfg, kw.pop("kind", "M1"), kw.pop("deltas"), kw.pop("n_grid"),
                                    kw.pop("eps"), workers=w, **kw)
        elif name == "fdd":
            rep = L.fdd_probe(cfg, kw.pop("times"), kw.pop("n_grid"), kw.pop("reps"), workers=w, **kw)
        elif name == "compensator":
            rep = L.compensator_probe(cfg, kw.pop("t_grid"), kw.pop("n_grid"), kw.pop("reps"), workers=w)
        elif name == "l2w":
            if "pairs" in kw:
                kw["pairs"] = [tuple(p) for p in kw["pairs"]]
            rep = L.l2w_probe(cfg, kw.pop("n_grid"), kw.pop("reps"), trunc, workers=w, **kw)
        elif name == "l2w_sine":
            if "band" in kw:
                kw["band"] = tuple(kw["band"])
            rep = L.l2w_sine_probe(trunc=trunc, **kw)
        elif name == "lenglart":
            rep = L.lenglart_probe(cfg, kw.pop("reps"), kw.pop("eps_grid"), kw.pop("eta_grid"),
                                   workers=w, **kw)
        elif name == "sigma_tilde":
            rep = L.sigma_tilde_probe(cfg, kw.pop("reps", 10000), workers=w, **kw)
        elif name == "occupation":
            pot = named_potential(cfg.potential if cfg else "gaussian-centered")
            seed = cfg.seed if cfg else (args.seed or 0)
            rep = L.occupation_probe(pot, kw.pop("n_grid"), kw.pop("reps"), kw.pop("step"), seed=seed,
                                     workers=w, **kw)
        else:
            rep = L.grid_increment_probe(cfg, kw.pop("k_grid"), kw.pop("reps"), workers=w)
    except KeyError as exc:
        raise LabError("CONFIG_PARSE", f"[probe.{name}] missing key {exc}") from None
    except TypeError as exc:
        raise LabError("CONFIG_PARSE", f"[probe.{name}] {exc}") from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{name}.csv").write_text(rep.to_csv())
    (out / f"{name}.json").write_text(rep.to_json() + "\n")
    _write_manifest(out, args, cfg, echo, [f"{name}.csv", f"{name}.json"])
    status = "pass" if rep.passed else "FAIL"
    print(f"{name}: {status} ({sum(c.passed is False for c in rep.cells)} failing cells)")
    return 0 if rep.passed else 1
