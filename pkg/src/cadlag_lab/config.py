"""INI-style experiment configs with JSON-typed values.

    [scenario]
    scenario = "RENEWAL_FINITE_VAR"
    n = 10000
    seed = 7

    [dist]
    kind = "exponential"
    param = 1.0

    [chain]
    P = [[0.5, 0.5], [0.5, 0.5]]
    V0 = [0, 2]

    [probe.sigma_tilde]
    reps = 10000

Unknown sections or keys raise ``LabError("CONFIG_PARSE")``: a typo must not
silently fall back to a default.
"""

from __future__ import annotations

import configparser
import json

from .errors import LabError
from .simulators import ChainSpec, InterarrivalDist, ScenarioConfig

SCENARIO_KEYS = {"scenario", "n", "T", "grid_step", "seed", "potential"}
DIST_KEYS = {"kind", "param"}
CHAIN_KEYS = {"P", "V0", "initial"}

PROBE_KEYS = {
    "tightness": {"kind", "deltas", "n_grid", "eps", "T", "reps", "target", "final_floor"},
    "fdd": {"times", "n_grid", "reps", "target", "threshold"},
    "compensator": {"t_grid", "n_grid", "reps"},
    "l2w": {"n_grid", "reps", "K", "L", "quad_tol", "pairs", "threshold", "quantile", "norm_tol"},
    "l2w_sine": {"freqs", "K", "L", "quad_tol", "T", "step", "final_max", "band"},
    "lenglart": {"reps", "eps_grid", "eta_grid", "tau"},
    "sigma_tilde": {"reps", "n", "sigma_tilde2", "threshold"},
    "occupation": {"n_grid", "reps", "step", "t2", "final_max"},
    "grid_increment": {"k_grid", "reps"},
}


def _section(parser, name, allowed):
    if not parser.has_section(name):
        return {}
    out = {}
    for key, raw in parser.items(name):
        if key not in allowed:
            raise LabError("CONFIG_PARSE", f"unknown key {key!r} in [{name}]")
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise LabError("CONFIG_PARSE", f"[{name}] {key}: {exc}") from None
    return out


def parse_config(text: str):
    """Return ``(scenario_or_None, {probe_name: kwargs}, echo)``."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise LabError("CONFIG_PARSE", str(exc)) from None
    for sec in parser.sections():
        if sec in ("scenario", "dist", "chain"):
            continue
        if not (sec.startswith("probe.") and sec[6:] in PROBE_KEYS):
            raise LabError("CONFIG_PARSE", f"unknown section [{sec}]")
    scen = _section(parser, "scenario", SCENARIO_KEYS)
    dist = _section(parser, "dist", DIST_KEYS)
    chain = _section(parser, "chain", CHAIN_KEYS)
    probes = {sec[6:]: _section(parser, sec, PROBE_KEYS[sec[6:]])
              for sec in parser.sections() if sec.startswith("probe.")}
    echo = {"scenario": scen, "dist": dist, "chain": chain,
            **{f"probe.{k}": v for k, v in probes.items()}}
    cfg = None
    if scen:
        try:
            cfg = ScenarioConfig(
                scenario=scen["scenario"], n=int(scen.get("n", 1000)), T=float(scen.get("T", 1.0)),
                grid_step=float(scen.get("grid_step", 0.01)),
                dist=InterarrivalDist(**dist) if dist else InterarrivalDist.exponential(),
                chain=ChainSpec(**chain) if chain else None,
                seed=int(scen.get("seed", 0)),
                potential=scen.get("potential", "gaussian-centered"))
        except KeyError as exc:
            raise LabError("CONFIG_PARSE", f"missing key {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, LabError):
                raise
            raise LabError("CONFIG_PARSE", str(exc)) from None
    return cfg, probes, echo


def load_config(path):
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise LabError("CONFIG_PARSE", str(exc)) from None
