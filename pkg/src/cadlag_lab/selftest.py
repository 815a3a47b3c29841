"""Fast built-in checks run by ``cadlag-lab selftest``.

Each check returns True on success.  The set mirrors the documented examples
of every operation plus a handful of randomized invariants at small sizes.
"""

import math

import numpy as np

from . import paths as P
from . import topology as Tp
from . import simulators as S
from . import lab as L
from .errors import LabError


def _raises(code, fn, *a):
    try:
        fn(*a)
    except LabError as exc:
        return exc.code == code
    return False


def _close(a, b, tol=1e-12):
    return bool(np.all(np.abs(np.asarray(a, float) - np.asarray(b, float)) <= tol))


def check_paths():
    x = P.make_path([0, 1, 1.5], [0, 0, 2], "STEP", 2)
    jump = P.make_path([0, 1], [0, 5], "STEP", 2)
    r = P.make_path([0, 1], [0, 1], "LINEAR", 2)
    ind = P.make_path([0, 1], [0, 1], "STEP", 4)
    ok = [
        list(x.times) == [0, 1.5],
        _close(jump.at(1.0), 5) and _close(jump.at(0.999), 0),
        _close(P.left_limit(jump, 1.0), 0) and _raises("OUT_OF_DOMAIN", P.left_limit, jump, 0.0),
        _close(r.at([0.25, 1.5]), [0.25, 1.0]),
        _close(P.integrate(ind, 3.0), 2) and _close(P.l2_norm_sq(ind, 3.0), 2),
        _close(P.l2_norm_sq(r, 1.0), 1 / 3),
        _close(P.combine(1, ind, -1, P.ramp(2)).at(1.5), -0.5),
        P.from_json(P.to_json(x)) == x,
    ]
    A = P.from_segments([0, 1, 3], [0, 1, 3], [0, 1, 0], 3)
    tau = P.inverse(A)
    ok.append(_close(tau.at([0, 0.5, 1, 2]), [1, 1, 1, 2]))
    c = P.compose(ind, P.make_path([0, 2], [0, 4], "LINEAR", 2))
    ok.append(list(c.times) == [0, 0.5] and _close(c.values[:, 0], [0, 1]))
    return all(ok)


def check_topology():
    ind = P.make_path([0, 1], [0, 1], "STEP", 2)
    spike = P.make_path([0, 1, 1.1], [0, 1, 0], "STEP", 2)
    ok = [
        Tp.triple_distance("M1", 0, 3, 2) == 1 and Tp.triple_distance("C", 0, 3, 2) == 2,
        Tp.triple_distance("M1", [0, 0], [1, 1], [2, 0]) == 1,
        Tp.oscillation_modulus(ind, "M1", 0.5, 2) == 0 and Tp.oscillation_modulus(ind, "C", 0.5, 2) == 1,
        Tp.oscillation_modulus(spike, "J1", 0.2, 2) == 1 == Tp.oscillation_modulus(spike, "M1", 0.2, 2),
        Tp.grid_increment_max(ind, 7, 2) == 1,
        Tp.jump_bound_check(P.make_path(np.arange(11.0), np.arange(11.0), "STEP", 10), 0.5, 10) == (0, 0),
        abs(Tp.hermite_eval(0, 0.0) - math.pi ** -0.25) < 1e-15,
        Tp.l2w_distance(ind, ind, Tp.L2wTruncation(4, 2))[0] == 0.0,
    ]
    t = np.linspace(-12, 12, 24001)
    ok.append(np.abs(Tp.hermite_table(51, t)).max() <= math.pi ** -0.25 + 1e-10)
    return all(ok)


def check_simulators():
    sol = S.solve_poisson(S.ChainSpec([[0, 1], [1, 0]], [1, -1]))
    ok = [_close(sol.f, [0.5, -0.5]) and sol.sigma2 < 1e-20,
          abs(S.solve_poisson(S.ChainSpec([[0.9, 0.1], [0.1, 0.9]], [1, -1])).sigma2 - 9) < 1e-9,
          _raises("REDUCIBLE_CHAIN", S.ChainSpec, [[1, 0], [0, 1]], [0, 1])]
    N = S.renewal_path(S.InterarrivalDist.deterministic(1), 5.5, S.substream(0))
    ok.append(_close(N.at([0.5, 1, 5.5]), [0, 1, 5]))
    pot = S.named_potential("gaussian-centered")
    g = S.cv_quadrature(pot, "GRADIENT", 1e-9)
    lk = S.cv_quadrature(pot, "LOGKERNEL", 1e-9)
    ok.append(abs(g - math.pi / 4) < 1e-8 and abs(lk - math.pi / 4) < 1e-8)
    a = S.occupation_path(50, 0.05, pot, S.substream(0, 1), T=1.0, record_every=10)
    ok.append(a.at(0.0) == 0 and np.all(np.diff(a.values[:, 0]) >= 0))
    return all(ok)


def check_invariants(instances=50, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(instances):
        m = int(rng.integers(1, 12))
        t = np.concatenate(([0.0], np.sort(rng.choice(np.arange(1, 200), m, replace=False)) / 100))
        v = np.cumsum(rng.integers(1, 4, m + 1)) / 4.0
        A = P.make_path(t, v, "STEP", 2.5)
        if not P.inverse(P.inverse(A)) == A:
            return False
        x = P.make_path(t, rng.normal(size=m + 1), "STEP", 2.5)
        for d in (0.05, 0.3):
            if Tp.oscillation_modulus(x, "M1", d, 2.5) > Tp.oscillation_modulus(x, "J1", d, 2.5) + 1e-12:
                return False
        if Tp.oscillation_modulus(A, "M1", 0.3, 2.5) != 0:
            return False
    return True


def check_lab():
    ok = [L.ks_distance([0.0], [1.0]) == 1.0, L.ks_distance([1, 2, 3], [3, 2, 1]) == 0.0]
    ch = S.ChainSpec.iid([0.5, 0.5], [0, 0])
    cfg = S.ScenarioConfig("RENEWAL_FINITE_VAR", 50, 3.0, 0.1, S.InterarrivalDist.deterministic(1), ch, seed=1)
    rep = L.compensator_probe(cfg, [0.5, 1.0], [50], 3)
    ok.append(rep.passed and _close([c.estimate for c in rep.cells], [1 / 50, 1 / 50], 1e-12))
    return all(ok)


CHECKS = {
    "paths": check_paths,
    "topology": check_topology,
    "simulators": check_simulators,
    "invariants": check_invariants,
    "lab": check_lab,
}


def run_all(report=print):
    ok = True
    for name, fn in CHECKS.items():
        try:
            res = bool(fn())
        except Exception as exc:  # a crash is a failure, not an abort
            res = False
            report(f"{name}: error {exc!r}")
        report(f"{name}: {'pass' if res else 'FAIL'}")
        ok &= res
    return ok
