"""Oscillation moduli, grid increments and the Hermite-weighted weak metric."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numba
import numpy as np

from .errors import LabError
from .paths import CadlagPath, Mode, MonotonePath, evaluate

WINDOW_TOL = 1e-12
PI_QUARTER = math.pi ** -0.25


class ModulusKind(str, enum.Enum):
    C = "C"
    J1 = "J1"
    M1 = "M1"


@dataclass(frozen=True)
class L2wTruncation:
    K: int = 12          # Hermite indices 0..K-1
    L: int = 8           # interval indices 1..L
    quad_tol: float = 1e-10

    def __post_init__(self):
        if self.K < 1 or self.L < 1 or not self.quad_tol > 0:
            raise LabError("CONFIG_INVALID", f"bad truncation {self}")

    @property
    def tail_bound(self) -> float:
        return 2.0 ** -self.K + 2.0 ** -self.L


# --------------------------------------------------------------------------
# triple distances


def triple_distance(kind, x1, x2, x3) -> float:
    kind = ModulusKind(kind)
    x1, x2, x3 = (np.atleast_1d(np.asarray(v, dtype=float)) for v in (x1, x2, x3))
    if not (x1.shape == x2.shape == x3.shape):
        raise LabError("DIM_MISMATCH", "triple entries differ in dimension")
    if kind is ModulusKind.C:
        return float(np.linalg.norm(x3 - x1))
    if kind is ModulusKind.J1:
        return float(min(np.linalg.norm(x2 - x1), np.linalg.norm(x2 - x3)))
    seg = x3 - x1
    den = float(seg @ seg)
    lam = 0.0 if den == 0.0 else min(1.0, max(0.0, float((x2 - x1) @ seg) / den))
    return float(np.linalg.norm(x2 - (x1 + lam * seg)))


# --------------------------------------------------------------------------
# modulus kernels
#
# Cells are indexed 0..n-1.  A cell is either a constant segment of a STEP
# path or a single sample point.  Cells i <= k can host t1 and t3 with
# t3 - t1 < delta iff early[k] - late[i] < delta; kmax[i] is the last such k.


@numba.njit(cache=True)
def _c_scan_1d(v, kmax):
    best = 0.0
    for i in range(v.shape[0]):
        hi = v[i]
        lo = v[i]
        for k in range(i + 1, kmax[i] + 1):
            if v[k] > hi:
                hi = v[k]
            elif v[k] < lo:
                lo = v[k]
        d = max(hi - v[i], v[i] - lo)
        if d > best:
            best = d
    return best


@numba.njit(cache=True)
def _m1_scan_1d(v, kmax):
    best = 0.0
    for i in range(v.shape[0]):
        hi = v[i]
        lo = v[i]
        for k in range(i + 1, kmax[i] + 1):
            vk = v[k]
            # extremes of the middle value range over j in [i, k]
            top = max(v[i], vk)
            bot = min(v[i], vk)
            d = max(hi - top, bot - lo)
            if d > best:
                best = d
            if vk > hi:
                hi = vk
            elif vk < lo:
                lo = vk
    return best


@numba.njit(cache=True)
def _j1_scan(v, kmax, imin):
    # v has shape (n, d); for each middle cell j look left over i and right over k
    n = v.shape[0]
    d = v.shape[1]
    best = 0.0
    right = np.zeros(n)
    for j in range(n):
        kend = kmax[j]
        run = 0.0
        for k in range(j, kend + 1):
            s = 0.0
            for c in range(d):
                s += (v[k, c] - v[j, c]) ** 2
            s = math.sqrt(s)
            if s > run:
                run = s
            right[k] = run
        if run <= best:
            continue
        for i in range(j - 1, imin[j] - 1, -1):
            s = 0.0
            for c in range(d):
                s += (v[i, c] - v[j, c]) ** 2
            s = math.sqrt(s)
            if s <= best:
                continue
            r = right[kmax[i]]
            m = s if s < r else r
            if m > best:
                best = m
    return best


@numba.njit(cache=True)
def _c_scan_nd(v, kmax):
    best = 0.0
    n, d = v.shape
    for i in range(n):
        for k in range(i + 1, kmax[i] + 1):
            s = 0.0
            for c in range(d):
                s += (v[k, c] - v[i, c]) ** 2
            if s > best:
                best = s
    return math.sqrt(best)


@numba.njit(cache=True)
def _m1_scan_nd(v, kmax):
    best = 0.0
    n, d = v.shape
    for i in range(n):
        for k in range(i + 1, kmax[i] + 1):
            den = 0.0
            for c in range(d):
                den += (v[k, c] - v[i, c]) ** 2
            for j in range(i + 1, k):
                dot = 0.0
                for c in range(d):
                    dot += (v[j, c] - v[i, c]) * (v[k, c] - v[i, c])
                lam = 0.0
                if den > 0.0:
                    lam = min(1.0, max(0.0, dot / den))
                s = 0.0
                for c in range(d):
                    s += (v[j, c] - v[i, c] - lam * (v[k, c] - v[i, c])) ** 2
                if s > best:
                    best = s
    return math.sqrt(best)


def _cells(x: CadlagPath, T: float, delta: float, refine: int):
    """Cell values with their earliest and latest usable times on [0, T]."""
    if x.mode is Mode.STEP:
        keep = x.times <= T
        early = x.times[keep]
        late = np.append(early[1:], T)
        return x.values[keep], early, late, True
    step = delta / refine
    n = max(1, int(math.ceil(T / step)))
    grid = np.union1d(np.linspace(0.0, T, n + 1), x.times[x.times <= T])
    return evaluate(x, grid), grid, grid, False


def _window_ends(early, late, delta):
    kmax = np.searchsorted(early, late + (delta - WINDOW_TOL), side="right") - 1
    return np.maximum(kmax, np.arange(early.size))


def _check_args(x, delta, T):
    if not delta > 0:
        raise LabError("BAD_DELTA", f"delta must be positive, got {delta}")
    if T < 0 or T > x.horizon:
        raise LabError("OUT_OF_DOMAIN", f"T={T} outside [0, {x.horizon}]")


def _modulus_from_cells(v, early, late, kind, delta):
    kmax = _window_ends(early, late, delta)
    if kind is ModulusKind.J1:
        imin = np.searchsorted(kmax, np.arange(kmax.size), side="left")
        return _j1_scan(v, kmax, imin)
    if v.shape[1] == 1:
        scan = _c_scan_1d if kind is ModulusKind.C else _m1_scan_1d
        return scan(np.ascontiguousarray(v[:, 0]), kmax)
    scan = _c_scan_nd if kind is ModulusKind.C else _m1_scan_nd
    return scan(v, kmax)


def oscillation_modulus(x: CadlagPath, kind, delta: float, T: float, refine: int = 8) -> float:
    """``sup H(x(t1), x(t2), x(t3))`` over ``0 <= t1 < t2 < t3 <= T``, ``t3 - t1 < delta``.

    Exact for STEP paths.  Other paths are sampled on a grid of step
    ``delta / refine`` merged with their breakpoints; see :func:`modulus_is_exact`.
    """
    kind = ModulusKind(kind)
    _check_args(x, delta, T)
    v, early, late, _ = _cells(x, T, delta, refine)
    return float(_modulus_from_cells(np.ascontiguousarray(v), early, late, kind, delta))


def oscillation_moduli(x: CadlagPath, kind, deltas, T: float, refine: int = 8) -> np.ndarray:
    """Vectorised :func:`oscillation_modulus` over several window sizes."""
    kind = ModulusKind(kind)
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    out = np.empty(deltas.size)
    if x.mode is Mode.STEP:
        for d in deltas:
            _check_args(x, d, T)
        v, early, late, _ = _cells(x, T, 1.0, refine)
        v = np.ascontiguousarray(v)
        for n, d in enumerate(deltas):
            out[n] = _modulus_from_cells(v, early, late, kind, d)
        return out
    for n, d in enumerate(deltas):
        out[n] = oscillation_modulus(x, kind, d, T, refine)
    return out


def modulus_is_exact(x: CadlagPath) -> bool:
    return x.mode is Mode.STEP


def modulus_rows(x: CadlagPath, kinds, deltas, T: float, refine: int = 8):
    exact = modulus_is_exact(x)
    rows = []
    for kind in kinds:
        vals = oscillation_moduli(x, kind, deltas, T, refine)
        for d, val in zip(np.atleast_1d(deltas), vals):
            rows.append({"kind": ModulusKind(kind).value, "delta": float(d), "T": float(T),
                         "value": float(val), "exact_flag": int(exact)})
    return rows


def write_modulus_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["kind", "delta", "T", "value", "exact_flag"])
        w.writeheader()
        for r in rows:
            w.writerow({**r, "delta": repr(r["delta"]), "T": repr(r["T"]), "value": repr(r["value"])})


# --------------------------------------------------------------------------
# grid increments


def grid_increment_max(x: CadlagPath, k: int, T: float) -> float:
    """``max_{1<=r<=k} |x(rT/k) - x((r-1)T/k)|``."""
    if k < 1:
        raise LabError("CONFIG_INVALID", "k must be at least 1")
    if T < 0 or T > x.horizon:
        raise LabError("OUT_OF_DOMAIN", f"T={T} outside [0, {x.horizon}]")
    grid = T * (np.arange(k + 1) / k)
    vals = evaluate(x, grid)
    return float(np.linalg.norm(np.diff(vals, axis=0), axis=1).max())


def jump_bound_check(x: MonotonePath, delta: float, T: float):
    """Both sides of the monotone-path bound on the J1 modulus.

    ``lhs = omega_J1(x, delta, T)`` and
    ``rhs = sup_{delta<=t<=T-delta} min(x(t) - x(t-delta), x(t+delta) - x(t))``.
    The right side is piecewise constant for STEP paths, changing only at
    breakpoints shifted by 0 or +-delta, so evaluating there is exact.
    """
    x = MonotonePath.from_path(x)
    if not (0 < delta < T / 2):
        raise LabError("BAD_DELTA", f"need 0 < delta < T/2, got delta={delta}, T={T}")
    if T > x.horizon:
        raise LabError("OUT_OF_DOMAIN", f"T={T} beyond horizon {x.horizon}")
    lhs = oscillation_modulus(x, ModulusKind.J1, delta, T)
    tb = x.times[x.times <= T]
    cand = np.concatenate([tb, tb - delta, tb + delta, [delta, T - delta]])
    if x.mode is not Mode.STEP:
        cand = np.concatenate([cand, np.linspace(delta, T - delta, 8 * int(math.ceil(T / delta)) + 1)])
    cand = np.unique(cand[(cand >= delta) & (cand <= T - delta)])
    f = lambda t: evaluate(x, t)[:, 0]
    mid = f(cand)
    rhs = np.minimum(mid - f(cand - delta), f(cand + delta) - mid).max()
    return float(lhs), float(rhs)


# --------------------------------------------------------------------------
# Hermite functions


def hermite_table(kmax: int, t) -> np.ndarray:
    """Rows ``h_0..h_{kmax-1}`` evaluated at ``t`` by the three-term recurrence."""
    t = np.asarray(t, dtype=float)
    out = np.empty((max(kmax, 1),) + t.shape)
    out[0] = PI_QUARTER * np.exp(-0.5 * t * t)
    if kmax > 1:
        out[1] = math.sqrt(2.0) * t * out[0]
    for k in range(1, kmax - 1):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * t * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out[:kmax]


def hermite_eval(k: int, t):
    if k < 0:
        raise LabError("CONFIG_INVALID", "Hermite index must be nonnegative")
    val = hermite_table(k + 1, t)[k]
    return float(val) if np.ndim(val) == 0 else val


# --------------------------------------------------------------------------
# weak inner products


_GL = {p: np.polynomial.legendre.leggauss(p) for p in (8, 12)}


@lru_cache(maxsize=64)
def _panel_error(kmax: int, spacing: float, span: int) -> float:
    """Order-8 vs order-12 discrepancy for ``t^e h_k`` on uniform panels (e = 0, 1)."""
    edges = np.arange(0.0, span + spacing / 2, spacing)
    lo, hi = edges[:-1], edges[1:]
    res = []
    for p in (8, 12):
        nodes, w = _GL[p]
        t = (0.5 * (hi - lo))[:, None] * nodes + (0.5 * (hi + lo))[:, None]
        ww = (0.5 * (hi - lo))[:, None] * w
        h = hermite_table(kmax, t)
        res.append(np.stack([(h * ww).sum(-1), (h * t * ww).sum(-1)]))
    return float(np.abs(res[0] - res[1]).max())


def _choose_spacing(kmax: int, span: int, scale: float, tol: float) -> float:
    spacing = 1.0 / (kmax + 1)
    for _ in range(12):
        if scale * span * _panel_error(kmax, spacing, span) <= tol:
            return spacing
        spacing /= 2
    raise LabError("QUADRATURE_NONCONVERGED", f"weak inner products did not reach tol={tol}")


def weak_inner_matrix(x: CadlagPath, kmax: int, lmax: int, quad_tol: float = 1e-10) -> np.ndarray:
    """``out[k, l-1] = int_0^l x(t) h_k(t) dt`` for ``k < kmax``, ``1 <= l <= lmax``.

    Composite order-8 Gauss-Legendre on panels cut at every breakpoint, every
    integer and a uniform grid fine enough that the per-panel error against an
    order-12 rule stays below ``quad_tol`` after scaling by ``sup |x|``.
    Multi-dimensional paths return an extra trailing coordinate axis.
    """
    if lmax > x.horizon + 1e-12:
        raise LabError("OUT_OF_DOMAIN", f"interval {lmax} beyond horizon {x.horizon}")
    scale = float(np.abs(x.values).max(initial=0.0)) + float(np.abs(x.slopes).max(initial=0.0)) * lmax
    if scale == 0.0:
        out = np.zeros((kmax, lmax, x.dim))
        return out[..., 0] if x.dim == 1 else out
    spacing = _choose_spacing(kmax, lmax, scale, quad_tol)
    n = int(round(lmax / spacing))
    edges = np.union1d(np.linspace(0.0, float(lmax), n + 1), x.times[x.times < lmax])
    lo, hi = edges[:-1], edges[1:]
    nodes, w = _GL[8]
    half = 0.5 * (hi - lo)
    t = half[:, None] * nodes + (0.5 * (hi + lo))[:, None]
    seg = np.searchsorted(x.times, lo, side="right") - 1
    xv = x.values[seg][:, None, :] + x.slopes[seg][:, None, :] * (t - x.times[seg][:, None])[..., None]
    h = hermite_table(kmax, t)                                    # (kmax, panels, p)
    wx = xv * (half[:, None] * w)[..., None]                      # (panels, p, d)
    per_panel = np.einsum("kpq,pqd->kpd", h, wx)                  # (kmax, panels, d)
    # integer ends are panel edges, so cumulative sums at those edges give each l
    csum = np.cumsum(per_panel, axis=1)
    ends = np.searchsorted(hi, np.arange(1, lmax + 1) - 1e-12, side="left")
    out = csum[:, ends, :]
    return out[..., 0] if x.dim == 1 else out


def weak_inner(x: CadlagPath, k: int, l: int, quad_tol: float = 1e-10):
    """``int_0^l x(t) h_k(t) dt``."""
    if l < 1 or k < 0:
        raise LabError("CONFIG_INVALID", "need k >= 0 and l >= 1")
    return weak_inner_matrix(x, k + 1, l, quad_tol)[k, l - 1]


def l2w_distance(x: CadlagPath, y: CadlagPath, trunc: L2wTruncation = L2wTruncation()):
    """Truncated weak metric and its tail bound ``2^-K + 2^-L``.

    Terms are accumulated in a fixed order (ascending l, then k) with
    compensated summation.
    """
    if x.dim != y.dim:
        raise LabError("DIM_MISMATCH", "paths differ in dimension")
    if min(x.horizon, y.horizon) < trunc.L:
        raise LabError("OUT_OF_DOMAIN", f"paths must cover [0, {trunc.L}]")
    if x == y:
        return 0.0, trunc.tail_bound
    from .paths import combine
    diff = combine(1.0, x, -1.0, y)
    ip = weak_inner_matrix(diff, trunc.K, trunc.L, trunc.quad_tol)
    if ip.ndim == 3:
        ip = np.linalg.norm(ip, axis=-1)
    terms = []
    for l in range(1, trunc.L + 1):
        for k in range(trunc.K):
            terms.append(2.0 ** -(k + l + 1) * min(1.0, abs(ip[k, l - 1])))
    return math.fsum(terms), trunc.tail_bound
