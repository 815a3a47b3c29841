"""Monte Carlo probes that turn limit statements into tables with standard errors.

Every probe draws replication ``r`` of cell ``c`` from
``substream(seed, PROBE_IDS[name], c, r)``, so a report is reproducible from
its manifest and does not depend on the worker count.  Convergence without a
closed-form limit is checked as a Cauchy criterion: two-sample KS between
consecutive values of a geometric ``n`` grid.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .errors import LabError
from .paths import (CadlagPath, Mode, evaluate, integrate, l2_norm_sq, make_path, max_jump,
                    running_sup_norm, scale)
from .simulators import (CvMethod, RadialPotential, Scenario, ScenarioConfig, compensator_of,
                         cv_quadrature, draw_renewal, build_scenario, occupation_integrals,
                         renewal_arrivals, chain_states, counting_path, solve_poisson, substream)
from .topology import (L2wTruncation, ModulusKind, grid_increment_max, l2w_distance,
                       oscillation_modulus, oscillation_moduli, weak_inner_matrix)

PROBE_IDS = {"tightness": 1, "fdd": 2, "compensator": 3, "l2w": 4, "lenglart": 5,
             "sigma_tilde": 6, "occupation": 7, "grid_increment": 8, "l2w_sine": 9}

KS_NULL_SD = 0.2605   # sd of the Kolmogorov limit law


# --------------------------------------------------------------------------
# empirical distributions


class EmpiricalDistribution:
    __slots__ = ("values",)

    def __init__(self, sample):
        v = np.sort(np.asarray(sample, dtype=float).ravel())
        if v.size == 0:
            raise LabError("EMPTY_SAMPLE", "empirical distribution needs at least one value")
        if not np.all(np.isfinite(v)):
            raise LabError("NONFINITE_VALUE", "sample contains NaN or inf")
        v.flags.writeable = False
        self.values = v

    @property
    def count(self) -> int:
        return self.values.size

    def cdf(self, x):
        return np.searchsorted(self.values, x, side="right") / self.count

    def quantile(self, q: float) -> float:
        return float(np.quantile(self.values, q))

    def mean(self) -> float:
        return math.fsum(self.values) / self.count


def _as_emp(a):
    return a if isinstance(a, EmpiricalDistribution) else EmpiricalDistribution(a)


def ks_distance(a, b) -> float:
    """Sup distance between two empirical CDFs.

    Both CDFs are right-continuous steps that only move at pooled sample
    points, so the sup is attained at one of them.
    """
    a, b = _as_emp(a), _as_emp(b)
    z = np.concatenate([a.values, b.values])
    return float(np.abs(a.cdf(z) - b.cdf(z)).max())


def ks_to_cdf(a, cdf) -> float:
    """One-sample KS distance to a continuous CDF."""
    a = _as_emp(a)
    F = np.asarray(cdf(a.values), dtype=float)
    i = np.arange(1, a.count + 1)
    return float(max((i / a.count - F).max(), (F - (i - 1) / a.count).max()))


def ks_band(m: int, n: int | None = None, level_coef: float = 1.36) -> float:
    """Asymptotic 95% two-sample KS band, rounded up to two decimals."""
    n = m if n is None else n
    return math.ceil(100 * level_coef * math.sqrt(1 / m + 1 / n)) / 100


def ks_stderr(m: int, n: int | None = None) -> float:
    """Null-scale standard error of a KS statistic."""
    return KS_NULL_SD * (math.sqrt(1 / m + 1 / n) if n else math.sqrt(1 / m))


# --------------------------------------------------------------------------
# reports


@dataclass
class ProbeCell:
    coords: dict
    statistic: str
    estimate: float
    stderr: float
    threshold: float | None = None
    passed: bool | None = None


@dataclass
class ProbeReport:
    probe: str
    axes: dict
    cells: list = field(default_factory=list)
    manifest: dict = field(default_factory=dict)

    def add(self, coords, statistic, estimate, stderr, threshold=None, passed=None):
        cell = ProbeCell(dict(coords), statistic, float(estimate), float(stderr),
                         None if threshold is None else float(threshold),
                         None if passed is None else bool(passed))
        self.cells.append(cell)
        return cell

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.cells)

    def select(self, statistic=None, **coords):
        out = []
        for c in self.cells:
            if statistic is not None and c.statistic != statistic:
                continue
            if all(c.coords.get(k) == v for k, v in coords.items()):
                out.append(c)
        return out

    def value(self, statistic, **coords) -> float:
        hits = self.select(statistic, **coords)
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} cells match {statistic} {coords}")
        return hits[0].estimate

    def to_csv(self) -> str:
        keys = []
        for c in self.cells:
            keys.extend(k for k in c.coords if k not in keys)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["probe", *keys, "statistic", "estimate", "stderr", "threshold", "pass"])
        for c in self.cells:
            w.writerow([self.probe, *[_fmt(c.coords.get(k, "")) for k in keys], c.statistic,
                        repr(c.estimate), repr(c.stderr),
                        "" if c.threshold is None else repr(c.threshold),
                        "" if c.passed is None else int(c.passed)])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"probe": self.probe, "axes": self.axes, "passed": self.passed,
               "cells": [asdict(c) for c in self.cells], "manifest": self.manifest}
        return json.dumps(doc, indent=1, sort_keys=True, default=_jsonable)


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


# --------------------------------------------------------------------------
# replication plumbing


def _map(fn, tasks, workers: int = 1):
    tasks = list(tasks)
    if workers <= 1 or len(tasks) < 2:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(tasks) // (8 * workers))
        return list(pool.map(fn, *zip(*tasks), chunksize=chunk))


def _rng(cfg_seed, probe, cell, rep):
    return substream(cfg_seed, PROBE_IDS[probe], cell, rep)


def _scenario(cfg, probe, cell, rep, sol):
    return build_scenario(cfg, draw_renewal(cfg, _rng(cfg.seed, probe, cell, rep), sol))


def _renewal_only(cfg):
    if cfg.scenario is Scenario.OCCUPATION_PLANAR:
        raise LabError("CONFIG_INVALID", "probe needs a renewal scenario")


def _pick(sample, target):
    try:
        return getattr(sample, target)
    except AttributeError:
        raise LabError("CONFIG_INVALID", f"unknown target path {target!r}") from None


# --------------------------------------------------------------------------
# tightness of moduli


def _tight_rep(cfg, kind, deltas, target, cell, rep, sol):
    path = _pick(_scenario(cfg, "tightness", cell, rep, sol), target)
    return oscillation_moduli(path, kind, deltas, cfg.T)


def tightness_table(cfg: ScenarioConfig, kind, delta_grid, n_grid, eps: float, T: float | None = None,
                    reps: int = 200, target: str = "M", final_floor: float | None = None,
                    workers: int = 1) -> ProbeReport:
    """Cell ``(n, delta)``: estimate of ``P(omega(X_n, delta, T) > eps)`` with binomial SE.

    With ``final_floor`` the cell at the smallest delta and largest n must
    reach at least that level (persistence of a non-vanishing modulus).
    """
    _renewal_only(cfg)
    kind = ModulusKind(kind)
    if reps < 100 or not len(delta_grid) or not len(n_grid):
        raise LabError("CONFIG_INVALID", "tightness needs nonempty grids and reps >= 100")
    T = cfg.T if T is None else T
    deltas = np.asarray(delta_grid, dtype=float)
    sol = solve_poisson(cfg.chain)
    rep = ProbeReport("tightness", {"n": list(n_grid), "delta": deltas.tolist()},
                      manifest=_manifest(cfg, kind=kind.value, eps=eps, T=T, reps=reps, target=target))
    for ci, n in enumerate(n_grid):
        c = _with(cfg, n=n, T=T)
        mods = np.array(_map(_tight_rep, [(c, kind, deltas, target, ci, r, sol) for r in range(reps)],
                             workers))
        p = (mods > eps).mean(axis=0)
        for d, pk in zip(deltas, p):
            rep.add({"n": n, "delta": float(d)}, f"P(omega_{kind.value}>eps)", pk,
                    math.sqrt(pk * (1 - pk) / reps))
    if final_floor is not None:
        last = rep.select(n=n_grid[-1], delta=float(deltas.min()))[0]
        rep.add({"n": n_grid[-1], "delta": float(deltas.min())}, "floor_check", last.estimate,
                last.stderr, final_floor, last.estimate >= final_floor)
    return rep


def _with(cfg, n=None, T=None):
    return ScenarioConfig(cfg.scenario, cfg.n if n is None else n, cfg.T if T is None else T,
                          min(cfg.grid_step, 0.5 * (cfg.T if T is None else T)), cfg.dist,
                          cfg.chain, cfg.seed, cfg.potential)


# --------------------------------------------------------------------------
# finite-dimensional distributions


def _fdd_rep(cfg, times, integrated, cell, rep, sol):
    M = _scenario(cfg, "fdd", cell, rep, sol).M
    return integrate(M, times)[:, 0] if integrated else evaluate(M, times)[:, 0]


def fdd_probe(cfg: ScenarioConfig, times, n_grid, reps: int, target: str = "INTEGRATED",
              threshold: float = 0.03, workers: int = 1) -> ProbeReport:
    """Cauchy check of the joint law of ``I(M_n)`` (or ``M_n``) at ``times`` across n.

    Per pair of consecutive n: KS per coordinate and KS of one fixed random
    linear combination (coefficients drawn once from the seed).
    """
    _renewal_only(cfg)
    target = target.upper()
    if target not in ("INTEGRATED", "RAW"):
        raise LabError("CONFIG_INVALID", f"unknown fdd target {target}")
    times = np.asarray(times, dtype=float)
    if np.any(times < 0) or np.any(times > cfg.T) or len(n_grid) < 2:
        raise LabError("CONFIG_INVALID", "times must lie in [0, T] and n_grid needs two values")
    coef = substream(cfg.seed, PROBE_IDS["fdd"], 1 << 30).standard_normal(times.size)
    coef /= np.linalg.norm(coef)
    sol = solve_poisson(cfg.chain)
    samples = []
    for ci, n in enumerate(n_grid):
        c = _with(cfg, n=n)
        samples.append(np.array(_map(_fdd_rep, [(c, times, target == "INTEGRATED", ci, r, sol)
                                                for r in range(reps)], workers)))
    rep = ProbeReport("fdd", {"n": list(n_grid), "t": times.tolist()},
                      manifest=_manifest(cfg, target=target, reps=reps, coef=coef.tolist()))
    se = ks_stderr(reps, reps)
    for a, b, na, nb in zip(samples, samples[1:], n_grid, n_grid[1:]):
        for j, t in enumerate(times):
            ks = ks_distance(a[:, j], b[:, j])
            rep.add({"n": na, "n_next": nb, "t": float(t)}, "ks", ks, se, threshold, ks <= threshold)
        ks = ks_distance(a @ coef, b @ coef)
        rep.add({"n": na, "n_next": nb, "t": "combo"}, "ks", ks, se, threshold, ks <= threshold)
    return rep


# --------------------------------------------------------------------------
# compensator means


def _comp_rep(cfg, t_grid, cell, rep):
    rng = _rng(cfg.seed, "compensator", cell, rep)
    A = counting_path(renewal_arrivals(cfg.dist, cfg.time_scale * cfg.T, rng), cfg.time_scale, 1.0 / cfg.n, cfg.T)
    comp = compensator_of(A)
    if np.max(t_grid) > comp.horizon:
        raise LabError("CONFIG_INVALID", f"t={np.max(t_grid)} beyond observed range {comp.horizon}; raise T")
    return evaluate(comp, t_grid)[:, 0]


def compensator_probe(cfg: ScenarioConfig, t_grid, n_grid, reps: int, workers: int = 1) -> ProbeReport:
    """Mean of ``A_n o tau_n`` at each t; passes if ``mean - t`` lies in
    ``[-2 SE, 1/n + 2 SE]`` (1/n is the staircase overshoot bound)."""
    _renewal_only(cfg)
    if not len(t_grid) or not len(n_grid) or reps < 2:
        raise LabError("CONFIG_INVALID", "compensator probe needs grids and reps >= 2")
    t_grid = np.asarray(t_grid, dtype=float)
    rep = ProbeReport("compensator", {"n": list(n_grid), "t": t_grid.tolist()},
                      manifest=_manifest(cfg, reps=reps))
    for ci, n in enumerate(n_grid):
        c = _with(cfg, n=n)
        vals = np.array(_map(_comp_rep, [(c, t_grid, ci, r) for r in range(reps)], workers))
        for j, t in enumerate(t_grid):
            m = math.fsum(vals[:, j]) / reps
            se = float(vals[:, j].std(ddof=1) / math.sqrt(reps))
            gap = m - t
            ok = -2 * se - 1e-12 <= gap <= 1.0 / n + 2 * se + 1e-12
            rep.add({"n": n, "t": float(t)}, "mean-t", gap, se, 1.0 / n, ok)
    return rep


# --------------------------------------------------------------------------
# weak-topology probes


def _l2w_rep(cfg, kmax, lmax, quad_tol, cell, rep, sol):
    M = _scenario(cfg, "l2w", cell, rep, sol).M
    return l2_norm_sq(M, cfg.T), weak_inner_matrix(M, kmax, lmax, quad_tol)


def _quantile_se(x, q):
    """Half-width of the distribution-free order-statistic interval for a quantile."""
    x = np.sort(x)
    m = x.size
    h = math.sqrt(m * q * (1 - q))
    lo = int(max(0, math.floor(q * m - h)))
    hi = int(min(m - 1, math.ceil(q * m + h)))
    return 0.5 * (x[hi] - x[lo])


def l2w_probe(cfg: ScenarioConfig, n_grid, reps: int, trunc: L2wTruncation = L2wTruncation(),
              pairs=((0, 1), (0, 2), (1, 1), (1, 2), (2, 1), (2, 2)), threshold: float = 0.03,
              quantile: float = 0.99, norm_tol: float = 0.25, workers: int = 1) -> ProbeReport:
    """Norm tightness and weak-coordinate Cauchy check for ``M_n``.

    (i) the ``quantile`` of ``|M_n|_T^2`` may change by at most ``norm_tol``
    (relative) between consecutive n; (ii) for each ``(k, l)`` in ``pairs``
    the KS distance of ``int_0^l M_n h_k`` across consecutive n is at most
    ``threshold``.
    """
    _renewal_only(cfg)
    kmax = max(k for k, _ in pairs) + 1
    lmax = max(l for _, l in pairs)
    if kmax > trunc.K or lmax > trunc.L or lmax > cfg.T or len(n_grid) < 2:
        raise LabError("CONFIG_INVALID", "pairs must fit the truncation and the horizon")
    sol = solve_poisson(cfg.chain)
    norms, inner = [], []
    for ci, n in enumerate(n_grid):
        c = _with(cfg, n=n)
        out = _map(_l2w_rep, [(c, kmax, lmax, trunc.quad_tol, ci, r, sol) for r in range(reps)], workers)
        norms.append(np.array([o[0] for o in out]))
        inner.append(np.array([o[1] for o in out]))
    rep = ProbeReport("l2w", {"n": list(n_grid), "pairs": [list(p) for p in pairs]},
                      manifest=_manifest(cfg, reps=reps, K=trunc.K, L=trunc.L, quad_tol=trunc.quad_tol,
                                         quantile=quantile, norm_tol=norm_tol))
    qs = [float(np.quantile(x, quantile)) for x in norms]
    for n, x, q in zip(n_grid, norms, qs):
        rep.add({"n": n}, f"norm_sq_q{quantile:g}", q, _quantile_se(x, quantile))
    for i in range(len(n_grid) - 1):
        rel = abs(qs[i + 1] - qs[i]) / qs[i] if qs[i] > 0 else 0.0
        rep.add({"n": n_grid[i], "n_next": n_grid[i + 1]}, "norm_q_rel_change", rel, 0.0,
                norm_tol, rel <= norm_tol)
        for k, l in pairs:
            a, b = inner[i][:, k, l - 1], inner[i + 1][:, k, l - 1]
            ks = ks_distance(a, b)
            rep.add({"n": n_grid[i], "n_next": n_grid[i + 1], "k": k, "l": l}, "ks", ks,
                    ks_stderr(reps, reps), threshold, ks <= threshold)
    return rep


def sine_path(freq: float, horizon: float, step: float = 1e-3) -> CadlagPath:
    m = int(round(horizon / step))
    t = np.linspace(0.0, horizon, m + 1)
    return make_path(t, np.sin(freq * t), Mode.LINEAR, horizon)


def l2w_sine_probe(freqs=(1, 4, 16, 64), trunc: L2wTruncation = L2wTruncation(), T: float = 1.0,
                   step: float = 1e-3, final_max: float = 0.02, band=(0.45, 0.55)) -> ProbeReport:
    """Weak-not-strong check on ``sin(n t)``: weak distance to 0 shrinks, L2 norm does not."""
    rep = ProbeReport("l2w_sine", {"n": list(freqs)},
                      manifest={"K": trunc.K, "L": trunc.L, "quad_tol": trunc.quad_tol, "T": T,
                                "step": step, "final_max": final_max, "band": list(band)})
    zero = make_path([0.0], [0.0], Mode.STEP, trunc.L)
    d_prev = math.inf
    for i, n in enumerate(freqs):
        x = sine_path(n, max(trunc.L, T), step)
        d, tail = l2w_distance(x, zero, trunc)
        last = i == len(freqs) - 1
        ok = d < d_prev and (d <= final_max if last else True)
        rep.add({"n": n}, "d_trunc", d, tail, final_max if last else None, ok)
        nsq = l2_norm_sq(x, T)
        rep.add({"n": n}, "norm_sq", nsq, 0.0, band[0], band[0] <= nsq <= band[1])
        d_prev = d
    return rep


# --------------------------------------------------------------------------
# Lenglart domination


def lenglart_check(X_paths, Y_paths, eps_grid, eta_grid, tau: float) -> ProbeReport:
    """Empirical ``P(sup_{s<=tau}|X| >= eps) <= eta/eps + P(Y(tau) >= eta)`` per cell."""
    if len(X_paths) != len(Y_paths) or not len(X_paths):
        raise LabError("CONFIG_INVALID", "need equally many X and Y paths")
    m = len(X_paths)
    sups = np.array([running_sup_norm(x, tau) for x in X_paths])
    ytau = np.array([float(evaluate(y, tau)[0]) for y in Y_paths])
    rep = ProbeReport("lenglart", {"eps": list(eps_grid), "eta": list(eta_grid)},
                      manifest={"tau": tau, "paths": m})
    for eps in eps_grid:
        lhs = float((sups >= eps).mean())
        for eta in eta_grid:
            py = float((ytau >= eta).mean())
            rhs = eta / eps + py
            se = math.sqrt((lhs * (1 - lhs) + py * (1 - py)) / m)
            viol = lhs - rhs
            rep.add({"eps": float(eps), "eta": float(eta)}, "lhs-rhs", viol, se, 0.0,
                    viol <= 2 * se)
    return rep


def _lenglart_rep(cfg, tau, cell, rep, sol):
    s = _scenario(cfg, "lenglart", cell, rep, sol)
    M = s.M
    X = make_path(M.times, M.values ** 2, Mode.STEP, M.horizon)
    comp = compensator_of(s.A)
    if tau > comp.horizon:
        raise LabError("CONFIG_INVALID", "tau beyond compensator range; raise T")
    return X, scale(comp, 4.0)


def lenglart_probe(cfg: ScenarioConfig, reps: int, eps_grid, eta_grid, tau: float = 1.0,
                   workers: int = 1) -> ProbeReport:
    """Lenglart check with ``X = M_n^2`` and ``Y = 4 A_n o tau_n``."""
    _renewal_only(cfg)
    if tau > cfg.T:
        raise LabError("CONFIG_INVALID", "tau must not exceed T")
    sol = solve_poisson(cfg.chain)
    pairs = _map(_lenglart_rep, [(cfg, tau, 0, r, sol) for r in range(reps)], workers)
    rep = lenglart_check([p[0] for p in pairs], [p[1] for p in pairs], eps_grid, eta_grid, tau)
    rep.manifest.update(_manifest(cfg, reps=reps))
    return rep


# --------------------------------------------------------------------------
# corrected renewal CLT constant


def sigma_tilde_sq(sigma2: float, mu: float, mean: float, var: float) -> float:
    """``sigma^2 / c1 + mu^2 sigma1^2 / c1^3`` with ``c1`` the interarrival mean."""
    return sigma2 / mean + mu * mu * var / mean**3


def _sigma_rep(cfg, cell, rep, sol):
    rng = _rng(cfg.seed, "sigma_tilde", cell, rep)
    N = renewal_arrivals(cfg.dist, float(cfg.n), rng).size
    states = chain_states(cfg.chain, N, rng, sol.pi)
    X = math.fsum(cfg.chain.V0[states[1:]])
    return math.sqrt(cfg.n) * (X / cfg.n - sol.mu / cfg.dist.mean)


def sigma_tilde_probe(cfg: ScenarioConfig, reps: int, n: int | None = None,
                      sigma_tilde2: float | None = None, threshold: float = 0.03,
                      workers: int = 1) -> ProbeReport:
    """KS distance of ``sqrt(n)(X_n/n - mu/c1)`` to ``N(0, sigma_tilde^2)``.

    ``sigma_tilde2`` overrides the plug-in constant (used to show that a wrong
    constant is rejected).
    """
    if cfg.scenario is not Scenario.RENEWAL_FINITE_VAR:
        raise LabError("CONFIG_INVALID", "sigma_tilde probe is for the finite-variance case")
    n = cfg.n if n is None else n
    c = _with(cfg, n=n)
    sol = solve_poisson(cfg.chain)
    plug = sigma_tilde_sq(sol.sigma2, sol.mu, cfg.dist.mean, cfg.dist.variance)
    s2 = plug if sigma_tilde2 is None else float(sigma_tilde2)
    if not s2 > 0:
        raise LabError("CONFIG_INVALID", "limit variance must be positive")
    vals = np.array(_map(_sigma_rep, [(c, 0, r, sol) for r in range(reps)], workers))
    ks = ks_to_cdf(vals, stats.norm(scale=math.sqrt(s2)).cdf)
    rep = ProbeReport("sigma_tilde", {"n": [n]},
                      manifest=_manifest(cfg, reps=reps, n=n, sigma_tilde2=s2, plug_in=plug))
    rep.add({"n": n}, "sigma_tilde2_used", s2, 0.0)
    rep.add({"n": n}, "sample_var", float(vals.var(ddof=1)), float(vals.var(ddof=1) * math.sqrt(2 / (reps - 1))))
    rep.add({"n": n}, "ks_normal", ks, ks_stderr(reps), threshold, ks <= threshold)
    return rep


# --------------------------------------------------------------------------
# grid increments on counting paths


def _grid_rep(cfg, k_grid, cell, rep):
    rng = _rng(cfg.seed, "grid_increment", cell, rep)
    A = counting_path(renewal_arrivals(cfg.dist, cfg.time_scale * cfg.T, rng), cfg.time_scale, 1.0 / cfg.n, cfg.T)
    D = [grid_increment_max(A, k, cfg.T) for k in k_grid]
    omega = [oscillation_modulus(A, ModulusKind.J1, cfg.T / k, cfg.T) for k in k_grid]
    half = [oscillation_modulus(A, ModulusKind.J1, cfg.T / (2 * k), cfg.T) for k in k_grid]
    return D, max_jump(A, cfg.T), omega, half


def grid_increment_probe(cfg: ScenarioConfig, k_grid, reps: int, workers: int = 1) -> ProbeReport:
    """Per counting path ``A_n``: ``D(A_n, k, T)`` on a grid of k, the largest
    jump, and the two J1 moduli that bracket D in the monotone case."""
    _renewal_only(cfg)
    out = _map(_grid_rep, [(cfg, list(k_grid), 0, r) for r in range(reps)], workers)
    rep = ProbeReport("grid_increment", {"k": list(k_grid), "path": reps}, manifest=_manifest(cfg, reps=reps))
    for r, (D, J, om, half) in enumerate(out):
        mono = all(b >= a - 1e-12 for a, b in zip(D, D[1:]))
        rep.add({"path": r}, "D_nondecreasing", float(mono), 0.0, None, mono)
        gap = abs(D[-1] - J)
        rep.add({"path": r}, "D_kmax-max_jump", gap, 0.0, 1e-12, gap <= 1e-12)
        for k, d, o, h in zip(k_grid, D, om, half):
            rep.add({"path": r, "k": k}, "D", d, 0.0)
            rep.add({"path": r, "k": k}, "omega_J1(T/k)", o, 0.0)
            rep.add({"path": r, "k": k}, "half_omega_J1(T/2k)-D", 0.5 * h - d, 0.0, 0.0, 0.5 * h <= d + 1e-12)
    return rep


# --------------------------------------------------------------------------
# planar occupation times


def _occ_rep(potential, step, marks, seed, rep):
    return occupation_integrals(potential, step, marks, substream(seed, PROBE_IDS["occupation"], 0, rep))


def occupation_probe(potential: RadialPotential, n_grid, reps: int, step: float, seed: int = 0,
                     t2: float = 2.0, cv_tol: float = 1e-8, final_max: float | None = None,
                     workers: int = 1) -> ProbeReport:
    """KS of ``A_n(1)`` to the exponential law with mean ``c_V / 2 pi``, per n.

    All n share one Brownian path per replication (common random numbers):
    ``A_n(t)`` only needs the integral up to Brownian time ``n t``.  Also
    reports ``KS(A_n(1), A_n(t2))``, which vanishes in the limit.
    """
    n_grid = [float(n) for n in n_grid]
    if min(n_grid) < math.e or reps < 2:
        raise LabError("CONFIG_INVALID", "need n >= e and reps >= 2")
    cv = cv_quadrature(potential, CvMethod.GRADIENT, cv_tol)
    mean = cv / (2 * math.pi)
    marks = np.array([n * t for n in n_grid for t in (1.0, t2)])
    raw = np.array(_map(_occ_rep, [(potential, step, marks, seed, r) for r in range(reps)], workers))
    rep = ProbeReport("occupation", {"n": n_grid},
                      manifest={"potential": potential.name, "reps": reps, "step": step, "seed": seed,
                                "t2": t2, "c_V": cv, "target_mean": mean})
    for i, n in enumerate(n_grid):
        a1 = raw[:, 2 * i] / math.log(n)
        a2 = raw[:, 2 * i + 1] / math.log(n)
        rep.add({"n": n}, "mean_A(1)", a1.mean(), a1.std(ddof=1) / math.sqrt(reps), mean)
        if mean > 0:
            ks = ks_to_cdf(a1, stats.expon(scale=mean).cdf)
            last = i == len(n_grid) - 1 and final_max is not None
            rep.add({"n": n}, "ks_exponential", ks, ks_stderr(reps), final_max if last else None,
                    (ks <= final_max) if last else None)
        else:
            rep.add({"n": n}, "max_A(1)", float(np.abs(a1).max()), 0.0)
        rep.add({"n": n}, "ks_flatness", ks_distance(a1, a2) if mean > 0 else 0.0, ks_stderr(reps, reps))
    if mean > 0 and len(n_grid) > 1:
        ks = [c.estimate for c in rep.select("ks_exponential")]
        down = all(b < a for a, b in zip(ks, ks[1:]))
        rep.add({"n": "all"}, "ks_decreasing", float(down), 0.0, None, down)
    return rep


# --------------------------------------------------------------------------


def _manifest(cfg: ScenarioConfig, **extra):
    return {"config": cfg.to_dict(), "seed": cfg.seed, **extra}
