"""Random path generators: Brownian motion, renewal counts, Markov-chain
martingales, scaled renewal scenarios and planar occupation times, plus the
two radial quadratures for the occupation-time constant.

Randomness always comes from :func:`substream`, a Philox generator keyed by
``(seed, *key)``, so any replication can be regenerated on its own.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numba
import numpy as np
from scipy import integrate as spi
from scipy.interpolate import CubicSpline
from scipy.sparse.csgraph import connected_components

from .errors import LabError
from .paths import (CadlagPath, Mode, MonotonePath, combine, compose,
                    inverse, make_path, ramp)


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent counter-based generator for ``(seed, key...)``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


# --------------------------------------------------------------------------
# interarrival laws


class DistKind(str, enum.Enum):
    EXPONENTIAL = "exponential"
    DETERMINISTIC = "deterministic"
    PARETO = "pareto"


@dataclass(frozen=True)
class InterarrivalDist:
    """Positive interarrival law.

    ``param`` is the rate for exponential, the constant for deterministic and
    the tail index for Pareto (``P(tau > x) = x**-alpha`` for ``x >= 1``).
    """

    kind: DistKind
    param: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", DistKind(self.kind))
        if not (self.param > 0 and math.isfinite(self.param)):
            raise LabError("CONFIG_INVALID", f"{self.kind.value} parameter must be positive")

    @classmethod
    def exponential(cls, rate=1.0):
        return cls(DistKind.EXPONENTIAL, rate)

    @classmethod
    def deterministic(cls, c=1.0):
        return cls(DistKind.DETERMINISTIC, c)

    @classmethod
    def pareto(cls, alpha):
        return cls(DistKind.PARETO, alpha)

    @property
    def alpha(self) -> Optional[float]:
        return self.param if self.kind is DistKind.PARETO else None

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind is DistKind.EXPONENTIAL:
            return rng.exponential(1.0 / self.param, size)
        if self.kind is DistKind.DETERMINISTIC:
            return np.full(size, float(self.param))
        return (1.0 - rng.random(size)) ** (-1.0 / self.param)

    @property
    def mean(self) -> float:
        if self.kind is DistKind.EXPONENTIAL:
            return 1.0 / self.param
        if self.kind is DistKind.DETERMINISTIC:
            return float(self.param)
        return self.param / (self.param - 1.0) if self.param > 1 else math.inf

    @property
    def variance(self) -> float:
        if self.kind is DistKind.EXPONENTIAL:
            return 1.0 / self.param**2
        if self.kind is DistKind.DETERMINISTIC:
            return 0.0
        a = self.param
        return a / ((a - 1.0) ** 2 * (a - 2.0)) if a > 2 else math.inf

    def to_dict(self):
        return {"kind": self.kind.value, "param": self.param}


def renewal_arrivals(dist: InterarrivalDist, horizon: float, rng) -> np.ndarray:
    """Partial sums ``S_1 < S_2 < ...`` that fall in ``[0, horizon]``."""
    if dist.kind is DistKind.DETERMINISTIC:
        c = dist.param
        return c * np.arange(1, int(math.floor(horizon / c + 1e-12)) + 1)
    if dist.mean < math.inf:
        guess = horizon / dist.mean
    else:
        guess = horizon ** dist.param
    chunk = int(min(max(64, 1.1 * guess + 4 * math.sqrt(guess + 1)), 1 << 22))
    parts, last = [], 0.0
    while True:
        s = last + np.cumsum(dist.sample(rng, chunk))
        if s[-1] > horizon:
            parts.append(s[: np.searchsorted(s, horizon, side="right")])
            break
        parts.append(s)
        last = s[-1]
        chunk = min(chunk * 2, 1 << 22)
    return np.concatenate(parts)


def counting_path(arrivals, time_scale, height, horizon) -> MonotonePath:
    """STEP path ``t -> height * #{k : S_k <= time_scale * t}`` on ``[0, horizon]``."""
    t, counts = np.unique(arrivals / time_scale, return_counts=True)
    start = 0
    if t.size and t[0] == 0.0:
        start = counts[0]
        t, counts = t[1:], counts[1:]
    times = np.concatenate(([0.0], t))
    values = height * np.concatenate(([start], start + np.cumsum(counts)))
    return MonotonePath(times, values[:, None], np.zeros((times.size, 1)), horizon, Mode.STEP)


def renewal_path(dist: InterarrivalDist, horizon: float, rng) -> MonotonePath:
    """Counting process ``N_t = #{k : S_k <= t}`` as a STEP path."""
    if not horizon > 0:
        raise LabError("CONFIG_INVALID", "horizon must be positive")
    return counting_path(renewal_arrivals(dist, horizon, rng), 1.0, 1.0, horizon)


def brownian_path(horizon: float, step: float, dim: int, rng) -> CadlagPath:
    """Brownian motion sampled at multiples of ``step``, linearly interpolated."""
    if not step > 0:
        raise LabError("BAD_STEP", f"step must be positive, got {step}")
    if dim not in (1, 2):
        raise LabError("DIM_MISMATCH", "dimension must be 1 or 2")
    n = int(math.floor(horizon / step + 1e-9))
    times = step * np.arange(n + 1)
    if horizon - times[-1] > 1e-12 * max(1.0, horizon):
        times = np.append(times, horizon)
    else:
        times[-1] = horizon
    dt = np.diff(times)
    inc = rng.standard_normal((dt.size, dim)) * np.sqrt(dt)[:, None]
    values = np.vstack([np.zeros((1, dim)), np.cumsum(inc, axis=0)])
    return make_path(times, values, Mode.LINEAR, horizon)


# --------------------------------------------------------------------------
# Markov chains and the Poisson equation


@dataclass(frozen=True)
class ChainSpec:
    P: np.ndarray
    V0: np.ndarray
    initial: Optional[np.ndarray] = None   # None means the stationary law

    def __post_init__(self):
        P = np.array(self.P, dtype=float)
        V0 = np.array(self.V0, dtype=float).ravel()
        if P.ndim != 2 or P.shape[0] != P.shape[1] or V0.size != P.shape[0]:
            raise LabError("CONFIG_INVALID", "P must be square and match V0")
        if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1.0) > 1e-12):
            raise LabError("CONFIG_INVALID", "rows of P must be probability vectors")
        ncomp, _ = connected_components(P > 0, directed=True, connection="strong")
        if ncomp != 1:
            raise LabError("REDUCIBLE_CHAIN", f"{ncomp} communicating classes")
        P.flags.writeable = False
        V0.flags.writeable = False
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "V0", V0)
        if self.initial is not None:
            init = np.array(self.initial, dtype=float).ravel()
            if init.size != V0.size or abs(init.sum() - 1) > 1e-12 or np.any(init < 0):
                raise LabError("CONFIG_INVALID", "bad initial distribution")
            object.__setattr__(self, "initial", init)

    @property
    def size(self) -> int:
        return self.V0.size

    @classmethod
    def iid(cls, probs, V0):
        probs = np.asarray(probs, dtype=float)
        return cls(np.tile(probs, (probs.size, 1)), V0)

    def to_dict(self):
        d = {"P": self.P.tolist(), "V0": self.V0.tolist()}
        if self.initial is not None:
            d["initial"] = self.initial.tolist()
        return d


@dataclass(frozen=True)
class PoissonSolution:
    pi: np.ndarray
    mu: float
    f: np.ndarray
    Pf: np.ndarray
    sigma2: float


def stationary_distribution(P) -> np.ndarray:
    """Grassmann-Taksar-Heyman elimination; no subtractions, so no cancellation."""
    A = np.array(P, dtype=float)
    n = A.shape[0]
    for k in range(n - 1, 0, -1):
        s = A[k, :k].sum()
        A[:k, k] /= s
        A[:k, :k] += np.outer(A[:k, k], A[k, :k])
    pi = np.zeros(n)
    pi[0] = 1.0
    for k in range(1, n):
        pi[k] = pi[:k] @ A[:k, k]
    return pi / pi.sum()


def solve_poisson(chain: ChainSpec) -> PoissonSolution:
    """Solve ``(I - P) f = V0 - mu`` with ``pi . f = 0``."""
    P = chain.P
    n = chain.size
    pi = stationary_distribution(P)
    mu = float(pi @ chain.V0)
    V = chain.V0 - mu
    Z = np.eye(n) - P + np.outer(np.ones(n), pi)
    try:
        f = np.linalg.solve(Z, V)
    except np.linalg.LinAlgError as exc:
        raise LabError("SINGULAR_SYSTEM", str(exc)) from None
    if np.abs(f - P @ f - V).max() > 1e-10 or abs(pi @ f) > 1e-10:
        raise LabError("SINGULAR_SYSTEM", "Poisson residual above 1e-10")
    Pf = P @ f
    sigma2 = float(pi @ (P * (f[None, :] - Pf[:, None]) ** 2).sum(axis=1))
    for a in (pi, f, Pf):
        a.flags.writeable = False
    return PoissonSolution(pi, mu, f, Pf, max(sigma2, 0.0))


@numba.njit(cache=True)
def _walk(cum, start_cum, u):
    n = u.shape[0]
    s = cum.shape[0]
    out = np.empty(n, dtype=np.int64)
    state = 0
    while state < s - 1 and u[0] >= start_cum[state]:
        state += 1
    out[0] = state
    for k in range(1, n):
        row = cum[state]
        j = 0
        while j < s - 1 and u[k] >= row[j]:
            j += 1
        state = j
        out[k] = state
    return out


def chain_states(chain: ChainSpec, steps: int, rng, pi=None) -> np.ndarray:
    """``xi_0, ..., xi_steps`` by inverse-CDF sampling on cumulative rows."""
    init = chain.initial if chain.initial is not None else (
        pi if pi is not None else stationary_distribution(chain.P))
    return _walk(np.cumsum(chain.P, axis=1), np.cumsum(init), rng.random(steps + 1))


def martingale_increments(sol: PoissonSolution, states) -> np.ndarray:
    """``Y_k = f(xi_k) - Pf(xi_{k-1})`` for ``k = 1..len(states)-1``."""
    return sol.f[states[1:]] - sol.Pf[states[:-1]]


def _partial_sum_path(increments, n, scale, horizon) -> CadlagPath:
    k = increments.size
    times = np.arange(k + 1) / n
    values = np.concatenate(([0.0], np.cumsum(increments))) * scale
    return make_path(times, values, Mode.STEP, max(horizon, times[-1]))


def chain_martingale_path(chain: ChainSpec, n: int, horizon: float, rng,
                          sol: PoissonSolution | None = None) -> CadlagPath:
    """``t -> (sigma sqrt n)^-1 sum_{k <= nt} Y_k`` as a STEP path."""
    sol = sol or solve_poisson(chain)
    if sol.sigma2 <= 1e-14:
        raise LabError("ZERO_VARIANCE", "martingale increments have zero variance")
    steps = int(math.floor(n * horizon + 1e-9))
    Y = martingale_increments(sol, chain_states(chain, steps, rng, sol.pi))
    return _partial_sum_path(Y, n, 1.0 / math.sqrt(sol.sigma2 * n), horizon)


# --------------------------------------------------------------------------
# scenarios


class Scenario(str, enum.Enum):
    RENEWAL_FINITE_VAR = "RENEWAL_FINITE_VAR"
    RENEWAL_STABLE_SUB1 = "RENEWAL_STABLE_SUB1"
    RENEWAL_STABLE_12 = "RENEWAL_STABLE_12"
    OCCUPATION_PLANAR = "OCCUPATION_PLANAR"


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: Scenario
    n: int
    T: float = 1.0
    grid_step: float = 0.01
    dist: InterarrivalDist = field(default_factory=InterarrivalDist.exponential)
    chain: Optional[ChainSpec] = None
    seed: int = 0
    potential: str = "gaussian-centered"

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        if self.n < 1 or not self.T > 0:
            raise LabError("CONFIG_INVALID", "need n >= 1 and T > 0")
        if not (0 < self.grid_step < self.T):
            raise LabError("CONFIG_INVALID", "grid_step must lie in (0, T)")
        if not (0 <= self.seed < 2**64):
            raise LabError("CONFIG_INVALID", "seed must be a 64-bit unsigned integer")
        a = self.dist.alpha
        sc = self.scenario
        if sc is Scenario.RENEWAL_STABLE_SUB1 and not (a is not None and 0 < a < 1):
            raise LabError("CONFIG_INVALID", "sub-1 stable case needs Pareto alpha in (0, 1)")
        if sc is Scenario.RENEWAL_STABLE_12 and not (a is not None and 1 < a < 2):
            raise LabError("CONFIG_INVALID", "stable (1,2) case needs Pareto alpha in (1, 2)")
        if sc is Scenario.RENEWAL_FINITE_VAR and not math.isfinite(self.dist.variance):
            raise LabError("CONFIG_INVALID", "finite-variance case needs finite interarrival variance")
        if sc is not Scenario.OCCUPATION_PLANAR and self.chain is None:
            raise LabError("CONFIG_INVALID", "renewal scenarios need a chain")

    @property
    def time_scale(self) -> float:
        """``a_n``: real time that maps to unit scaled time."""
        if self.scenario is Scenario.RENEWAL_STABLE_SUB1:
            return self.n ** (1.0 / self.dist.alpha)
        return float(self.n)

    def with_n(self, n: int) -> "ScenarioConfig":
        return ScenarioConfig(self.scenario, n, self.T, self.grid_step, self.dist, self.chain,
                              self.seed, self.potential)

    def to_dict(self):
        return {"scenario": self.scenario.value, "n": self.n, "T": self.T,
                "grid_step": self.grid_step, "dist": self.dist.to_dict(),
                "chain": None if self.chain is None else self.chain.to_dict(),
                "seed": self.seed, "potential": self.potential}


@dataclass
class RenewalDraw:
    """Raw randomness of one replication: arrival times and chain states."""
    arrivals: np.ndarray      # S_k in real time, k = 1..N
    states: np.ndarray        # xi_0..xi_K with K >= N
    sol: PoissonSolution


def draw_renewal(cfg: ScenarioConfig, rng, sol: PoissonSolution | None = None) -> RenewalDraw:
    """Arrivals first, then enough chain steps for both ``W_n`` on ``[0, T]`` and ``M_n``."""
    if cfg.scenario is Scenario.OCCUPATION_PLANAR:
        raise LabError("CONFIG_INVALID", "occupation scenario has no renewal draw")
    sol = sol or solve_poisson(cfg.chain)
    arrivals = renewal_arrivals(cfg.dist, cfg.time_scale * cfg.T, rng)
    steps = max(arrivals.size, int(math.floor(cfg.n * cfg.T + 1e-9)))
    states = chain_states(cfg.chain, steps, rng, sol.pi)
    return RenewalDraw(arrivals, states, sol)


@dataclass
class ScenarioSample:
    M: CadlagPath
    A: MonotonePath
    W: CadlagPath
    X: CadlagPath             # X at scaled time: sum_{k <= N_{a_n t}} V0(xi_k) / n
    centered: CadlagPath


def build_scenario(cfg: ScenarioConfig, draw: RenewalDraw) -> ScenarioSample:
    n, T = cfg.n, cfg.T
    sol = draw.sol
    A = counting_path(draw.arrivals, cfg.time_scale, 1.0 / n, T)
    if sol.sigma2 > 1e-14:
        scale = 1.0 / math.sqrt(sol.sigma2 * n)
    else:
        scale = 0.0
    Y = martingale_increments(sol, draw.states)
    W = _partial_sum_path(Y, n, scale, T)
    M = compose(W, A)
    N = draw.arrivals.size
    V0 = cfg.chain.V0[draw.states[1:N + 1]]
    X = _partial_sum_path(V0, n, 1.0 / n, T)
    X = compose(X, A)
    centered = centered_process(cfg, X, sol)
    return ScenarioSample(M, A, W, X, centered)


def centered_process(cfg: ScenarioConfig, X: CadlagPath, sol: PoissonSolution) -> CadlagPath:
    """Case-specific fluctuation of ``X_{a_n t}/n`` around its drift."""
    n, T = cfg.n, cfg.T
    if cfg.scenario is Scenario.RENEWAL_FINITE_VAR:
        return combine(math.sqrt(n), X, -math.sqrt(n) * sol.mu / cfg.dist.mean, ramp(T))
    if cfg.scenario is Scenario.RENEWAL_STABLE_12:
        f = n ** (1.0 - 1.0 / cfg.dist.alpha)
        return combine(f, X, -f * sol.mu / cfg.dist.mean, ramp(T))
    return X


def simulate_scenario(cfg: ScenarioConfig, rng, sol: PoissonSolution | None = None) -> ScenarioSample:
    return build_scenario(cfg, draw_renewal(cfg, rng, sol))


def scenario_triplet(cfg: ScenarioConfig, rng):
    s = simulate_scenario(cfg, rng)
    return s.M, s.A, s.W


def compensator_of(A: MonotonePath) -> MonotonePath:
    return MonotonePath.from_path(compose(A, inverse(A)))


def compensator_path(cfg: ScenarioConfig, rng) -> MonotonePath:
    """``A_n o tau_n`` for one draw of the counting path of ``cfg``."""
    if cfg.scenario is Scenario.OCCUPATION_PLANAR:
        raise LabError("CONFIG_INVALID", "compensator needs a renewal scenario")
    arrivals = renewal_arrivals(cfg.dist, cfg.time_scale * cfg.T, rng)
    return compensator_of(counting_path(arrivals, cfg.time_scale, 1.0 / cfg.n, cfg.T))


# --------------------------------------------------------------------------
# radial potentials and planar occupation times


class CvMethod(str, enum.Enum):
    GRADIENT = "GRADIENT"
    LOGKERNEL = "LOGKERNEL"


class RadialPotential:
    """Centered radial profile ``v`` with its tail moment ``g(r) = int_r^inf s v(s) ds``.

    ``g`` is tabulated on a grid of spacing ``h`` by 8-point Gauss-Legendre
    per cell; beyond ``support`` the profile is treated as zero.
    """

    def __init__(self, v: Callable, name: str = "custom", support: float = 12.0,
                 h: float = 1e-3, check_tol: float = 1e-8):
        self.v = v
        self.name = name
        self.support = float(support)
        centre, _ = spi.quad(lambda r: r * v(r), 0.0, self.support, limit=400,
                             epsabs=1e-13, epsrel=1e-13)
        if abs(centre) > check_tol:
            raise LabError("NOT_CENTERED", f"int r v(r) dr = {centre:.3e}")
        n = int(math.ceil(self.support / h))
        self.r = np.linspace(0.0, self.support, n + 1)
        nodes, w = np.polynomial.legendre.leggauss(8)
        lo, hi = self.r[:-1], self.r[1:]
        s = 0.5 * (hi - lo)[:, None] * nodes + 0.5 * (hi + lo)[:, None]
        cell = (0.5 * (hi - lo)[:, None] * w * s * np.vectorize(v, otypes=[float])(s)).sum(axis=1)
        # centering makes the tail integral equal minus the head integral
        self.g_table = -np.concatenate(([0.0], np.cumsum(cell)))
        self.g_table[-1] = 0.0
        self._spline = CubicSpline(self.r, self.g_table)
        with np.errstate(divide="ignore", invalid="ignore"):
            gs = np.where(self.r > 0, (2.0 * self.g_table / self.r) ** 2, 0.0)
        self.grad_sq_table = np.ascontiguousarray(gs)
        self.h = float(self.r[1] - self.r[0])

    def g(self, r):
        r = np.asarray(r, dtype=float)
        out = np.where(r >= self.support, 0.0, self._spline(np.clip(r, 0.0, self.support)))
        return float(out) if out.ndim == 0 else out

    def grad_sq(self, r):
        """``|grad F|^2 = (2 g(r) / r)^2`` at radius ``r``."""
        r = np.asarray(r, dtype=float)
        return np.interp(r, self.r, self.grad_sq_table, right=0.0)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.g_table)

    def __repr__(self):
        return f"RadialPotential({self.name!r})"


def _quartic(r):
    return (1.0 - r * r) * (1.0 - 3.0 * r * r) if r < 1.0 else 0.0


POTENTIALS = {
    "gaussian-centered": (lambda r: (1.0 - r * r) * math.exp(-r * r), 12.0),
    "gaussian-wide": (lambda r: (2.0 - r * r) * math.exp(-0.5 * r * r), 16.0),
    "gaussian-difference": (lambda r: math.exp(-r * r) - 2.0 * math.exp(-2.0 * r * r), 12.0),
    "compact-quartic": (_quartic, 1.0),
    "zero": (lambda r: 0.0, 1.0),
}


def named_potential(name: str) -> RadialPotential:
    if name not in POTENTIALS:
        raise LabError("CONFIG_INVALID", f"unknown potential {name!r}; known: {sorted(POTENTIALS)}")
    v, support = POTENTIALS[name]
    return RadialPotential(v, name, support)


def cv_quadrature(potential: RadialPotential, method=CvMethod.GRADIENT, tol: float = 1e-8) -> float:
    """Occupation-time constant from either radial formula.

    GRADIENT: ``8 pi int_0^inf g(r)^2 / r dr`` with ``g`` recomputed by
    adaptive quadrature (not from the table).
    LOGKERNEL: ``-8 pi int int r a v(r) v(a) log max(r, a)``, integrated over
    the triangle ``r < a`` and doubled.
    """
    method = CvMethod(method)
    v, R = potential.v, potential.support
    eps = tol / (64 * math.pi)
    if method is CvMethod.GRADIENT:
        def g(r):
            val, _ = spi.quad(lambda s: s * v(s), r, R, epsabs=eps * 1e-2, epsrel=1e-13, limit=200)
            return val
        head = lambda r: g(r) ** 2 / r if r > 0 else 0.0
        val, err = spi.quad(head, 0.0, R, epsabs=eps, epsrel=1e-13, limit=400)
        total, total_err = 8 * math.pi * val, 8 * math.pi * err
    else:
        f = lambda r, a: r * a * v(r) * v(a) * math.log(a) if a > 0 else 0.0
        val, err = spi.dblquad(f, 0.0, R, 0.0, lambda a: a, epsabs=eps, epsrel=1e-13)
        total, total_err = -16 * math.pi * val, 16 * math.pi * err
    if not (total_err <= tol and math.isfinite(total)):
        raise LabError("QUADRATURE_NONCONVERGED", f"{method.value}: error estimate {total_err:.2e} > {tol:.2e}")
    return total


@numba.njit(cache=True)
def _occupation_kernel(z, x, y, acc, count, step, grad_sq, inv_h, marks, out, mark_pos):
    """Advance the Euler walk over one chunk of normals, recording at marks."""
    sd = math.sqrt(step)
    nr = grad_sq.shape[0]
    for i in range(z.shape[0]):
        r = math.sqrt(x * x + y * y) * inv_h
        j = int(r)
        if j < nr - 1:
            w = r - j
            acc += ((1.0 - w) * grad_sq[j] + w * grad_sq[j + 1]) * step
        count += 1
        x += sd * z[i, 0]
        y += sd * z[i, 1]
        while mark_pos < marks.shape[0] and marks[mark_pos] == count:
            out[mark_pos] = acc
            mark_pos += 1
    return x, y, acc, count, mark_pos


def occupation_integrals(potential: RadialPotential, step: float, brownian_times, rng,
                         chunk: int = 1 << 20) -> np.ndarray:
    """``int_0^s |grad F(B_u)|^2 du`` for each ``s`` in ``brownian_times``, one path.

    Left-point Riemann sum along an Euler planar Brownian path started at 0.
    Times are rounded to whole steps.
    """
    if not step > 0:
        raise LabError("BAD_STEP", f"step must be positive, got {step}")
    s = np.asarray(brownian_times, dtype=float)
    marks = np.rint(s / step).astype(np.int64)
    order = np.argsort(marks, kind="stable")
    sorted_marks = marks[order]
    out = np.zeros(marks.size)
    if potential.is_zero:
        return out
    total = int(sorted_marks[-1]) if marks.size else 0
    x = y = acc = 0.0
    count = 0
    pos = 0
    while pos < marks.size and sorted_marks[pos] == 0:
        pos += 1
    done = 0
    while done < total:
        m = min(chunk, total - done)
        z = rng.standard_normal((m, 2))
        x, y, acc, count, pos = _occupation_kernel(z, x, y, acc, count, step,
                                                   potential.grad_sq_table, 1.0 / potential.h,
                                                   sorted_marks, out, pos)
        done += m
    res = np.empty_like(out)
    res[order] = out
    return res


def occupation_path(n: float, step: float, potential: RadialPotential, rng,
                    T: float = 1.0, record_every: int = 1) -> MonotonePath:
    """``A_n(t) = (log n)^-1 int_0^{nt} |grad F(B_s)|^2 ds`` on ``[0, T]``.

    Recorded every ``record_every`` Euler steps and interpolated linearly in
    between, so the path is nondecreasing and starts at 0.
    """
    if not n >= math.e:
        raise LabError("CONFIG_INVALID", "need n >= e so that log n >= 1")
    if not step > 0 or record_every < 1:
        raise LabError("BAD_STEP", f"step must be positive, got {step}")
    total = int(round(n * T / step))
    marks = np.unique(np.append(np.arange(0, total + 1, record_every), total))
    vals = occupation_integrals(potential, step, marks * step, rng) / math.log(n)
    times = marks * step / n
    times[-1] = T
    vals = np.maximum.accumulate(vals)
    return MonotonePath.from_path(make_path(times, vals, Mode.LINEAR, T))
