"""Exact finite-breakpoint càdlàg paths.

A path is stored as breakpoints ``0 = t_0 < ... < t_m <= horizon`` with, for
every segment ``[t_i, t_{i+1})``, the right value ``v_i`` and a slope ``s_i``:

    x(t) = v_i + s_i * (t - t_i)

The last segment ``[t_m, horizon]`` always has slope zero.  STEP paths have
all slopes zero, LINEAR paths are continuous, and anything else (e.g. a STEP
path minus a ramp) is PIECEWISE.  Every operator below is exact on this
representation; nothing resamples.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .errors import LabError

MERGE_TOL = 1e-12


class Mode(str, enum.Enum):
    STEP = "STEP"
    LINEAR = "LINEAR"
    PIECEWISE = "PIECEWISE"


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


class CadlagPath:
    """Right-continuous piecewise-linear path with finitely many breakpoints.

    Instances are immutable; build them with :func:`make_path` or
    :func:`from_segments` rather than calling the constructor directly.
    """

    __slots__ = ("times", "values", "slopes", "horizon", "mode")

    def __init__(self, times, values, slopes, horizon, mode):
        self.times = _frozen(times)
        self.values = _frozen(values)
        self.slopes = _frozen(slopes)
        self.horizon = float(horizon)
        self.mode = Mode(mode)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def n_breakpoints(self) -> int:
        return self.times.shape[0]

    def at(self, t):
        """Evaluate, dropping the coordinate axis for one-dimensional paths."""
        out = evaluate(self, t)
        return out[..., 0] if self.dim == 1 else out

    def jumps(self):
        """Jump vectors ``x(t_j) - x(t_j-)`` at breakpoints ``t_1..t_m``."""
        dt = np.diff(self.times)[:, None]
        return self.values[1:] - (self.values[:-1] + self.slopes[:-1] * dt)

    def __repr__(self):
        return (f"{type(self).__name__}(mode={self.mode.value}, dim={self.dim}, "
                f"breakpoints={self.n_breakpoints}, horizon={self.horizon:g})")

    def __eq__(self, other):
        if not isinstance(other, CadlagPath):
            return NotImplemented
        return (self.horizon == other.horizon and self.mode == other.mode
                and np.array_equal(self.times, other.times)
                and np.array_equal(self.values, other.values)
                and np.array_equal(self.slopes, other.slopes))

    __hash__ = None


class MonotonePath(CadlagPath):
    """Nondecreasing, nonnegative one-dimensional path (an element of D-up)."""

    __slots__ = ()

    @classmethod
    def from_path(cls, x: CadlagPath) -> "MonotonePath":
        if isinstance(x, MonotonePath):
            return x
        if x.dim != 1:
            raise LabError("NOT_MONOTONE", "monotone paths are one-dimensional")
        if x.values[0, 0] < -MERGE_TOL:
            raise LabError("NOT_MONOTONE", "path starts below zero")
        if np.any(x.slopes < -MERGE_TOL) or np.any(x.jumps() < -MERGE_TOL):
            raise LabError("NOT_MONOTONE", "path decreases somewhere")
        return cls(x.times, x.values, x.slopes, x.horizon, x.mode)


# --------------------------------------------------------------------------
# construction


def _as_values(values, n):
    v = np.asarray(values, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    if v.ndim != 2 or v.shape[0] != n:
        raise LabError("LENGTH_MISMATCH", f"{v.shape[0] if v.ndim else 0} values for {n} times")
    return v


def _check_times(times, horizon):
    t = np.asarray(times, dtype=float).ravel()
    if t.size == 0 or t[0] != 0.0:
        raise LabError("NON_MONOTONE_TIMES", "first breakpoint must be 0")
    if not np.all(np.isfinite(t)) or not np.isfinite(horizon):
        raise LabError("NONFINITE_VALUE", "times and horizon must be finite")
    if np.any(np.diff(t) <= 0):
        raise LabError("NON_MONOTONE_TIMES", "breakpoints must be strictly increasing")
    if horizon < t[-1]:
        raise LabError("NON_MONOTONE_TIMES", "horizon precedes the last breakpoint")
    return t


def _classify(values, slopes, times):
    if not np.any(slopes):
        return Mode.STEP
    dt = np.diff(times)[:, None]
    gaps = values[1:] - (values[:-1] + slopes[:-1] * dt)
    if np.all(np.abs(gaps) <= MERGE_TOL):
        return Mode.LINEAR
    return Mode.PIECEWISE


def _canonical(times, values, slopes, horizon, mode=None, cls=CadlagPath):
    """Drop breakpoints across which the path continues unchanged."""
    if len(times) > 1:
        dt = np.diff(times)[:, None]
        cont = np.all(np.abs(values[1:] - (values[:-1] + slopes[:-1] * dt)) <= MERGE_TOL, axis=1)
        same = np.all(np.abs(slopes[1:] - slopes[:-1]) <= MERGE_TOL, axis=1)
        keep = np.concatenate(([True], ~(cont & same)))
        times, values, slopes = times[keep], values[keep], slopes[keep]
    if mode is None:
        mode = _classify(values, slopes, times)
    return cls(times, values, slopes, horizon, mode)


def make_path(times, values, mode=Mode.STEP, horizon=None) -> CadlagPath:
    """Build a canonical STEP or LINEAR path from breakpoints and values.

    ``values`` may be a flat sequence (scalar path) or an ``(m+1, d)`` array.
    Under STEP, consecutive equal values are merged; under LINEAR the path
    interpolates the points and is constant after the last one.
    """
    mode = Mode(mode)
    t_raw = np.asarray(times, dtype=float).ravel()
    horizon = float(t_raw[-1]) if horizon is None and t_raw.size else horizon
    t = _check_times(t_raw, float(horizon))
    v = _as_values(values, t.size)
    if not np.all(np.isfinite(v)):
        raise LabError("NONFINITE_VALUE", "path values must be finite")
    slopes = np.zeros_like(v)
    if mode is Mode.LINEAR:
        slopes[:-1] = np.diff(v, axis=0) / np.diff(t)[:, None]
    elif mode is Mode.PIECEWISE:
        raise LabError("CONFIG_INVALID", "use from_segments for PIECEWISE paths")
    return _canonical(t, v, slopes, float(horizon), mode)


def from_segments(times, values, slopes, horizon, cls=CadlagPath) -> CadlagPath:
    """Build a path from per-segment right values and slopes (any mode)."""
    t = _check_times(times, float(horizon))
    v = _as_values(values, t.size)
    s = _as_values(slopes, t.size).copy()
    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(s))):
        raise LabError("NONFINITE_VALUE", "path values must be finite")
    s[-1] = 0.0
    return _canonical(t, v, s, float(horizon), cls=cls)


def constant_path(value, horizon) -> CadlagPath:
    return make_path([0.0], [value], Mode.STEP, horizon)


def ramp(horizon, slope=1.0) -> CadlagPath:
    """``t -> slope * t`` on ``[0, horizon]``."""
    return make_path([0.0, horizon], [0.0, slope * horizon], Mode.LINEAR, horizon)


# --------------------------------------------------------------------------
# evaluation


def _check_domain(x, t, lo_open=False):
    t = np.asarray(t, dtype=float)
    bad = (t <= 0) if lo_open else (t < 0)
    if np.any(bad) or np.any(t > x.horizon) or not np.all(np.isfinite(t)):
        raise LabError("OUT_OF_DOMAIN", f"time outside {'(' if lo_open else '['}0, {x.horizon}]")
    return t


def _segment(x, t, side="right"):
    return np.searchsorted(x.times, t, side=side) - 1


def evaluate(x: CadlagPath, t):
    """Right-continuous value ``x(t)``: shape ``(d,)`` for scalar t, else ``(n, d)``."""
    t = _check_domain(x, t)
    i = _segment(x, t)
    return x.values[i] + x.slopes[i] * (t - x.times[i])[..., None]


def left_limit(x: CadlagPath, t):
    """``lim_{s -> t-} x(s)``; undefined at ``t = 0``."""
    t = _check_domain(x, t, lo_open=True)
    i = _segment(x, t, side="left")
    return x.values[i] + x.slopes[i] * (t - x.times[i])[..., None]


def _value_and_slope(x, t):
    i = _segment(x, t)
    return x.values[i] + x.slopes[i] * (t - x.times[i])[..., None], x.slopes[i]


def max_jump(x: CadlagPath, T: float) -> float:
    """Largest jump norm ``sup_{0<s<=T} |x(s) - x(s-)|``."""
    _check_domain(x, T)
    j = np.linalg.norm(x.jumps(), axis=1)[x.times[1:] <= T]
    return float(j.max()) if j.size else 0.0


def running_sup_norm(x: CadlagPath, T: float) -> float:
    """``sup_{s<=T} |x(s)|`` (exact: extrema sit at breakpoints, left limits or T)."""
    _check_domain(x, T)
    inside = x.times <= T
    cand = [x.values[inside], evaluate(x, T)[None, :]]
    if x.n_breakpoints > 1:
        cand.append(left_limit(x, x.times[1:][x.times[1:] <= T]))
    return float(max(np.linalg.norm(c, axis=1).max(initial=0.0) for c in cand))


# --------------------------------------------------------------------------
# integrals


def _cumulative(x):
    dt = np.diff(x.times)[:, None]
    seg = x.values[:-1] * dt + 0.5 * x.slopes[:-1] * dt**2
    return np.vstack([np.zeros((1, x.dim)), np.cumsum(seg, axis=0)])


def integrate(x: CadlagPath, t):
    """``int_0^t x(s) ds`` per coordinate, exact on every segment."""
    t = _check_domain(x, t)
    i = _segment(x, t)
    u = (t - x.times[i])[..., None]
    return _cumulative(x)[i] + x.values[i] * u + 0.5 * x.slopes[i] * u**2


def integral_path(x: CadlagPath, T: float) -> CadlagPath:
    """Running integral on ``[0, T]`` as a LINEAR path through its breakpoint values.

    Exact everywhere for STEP input; for sloped input it is exact at the
    breakpoints and interpolates linearly in between.
    """
    _check_domain(x, T)
    knots = np.union1d(x.times[x.times <= T], [T])
    return make_path(knots, integrate(x, knots), Mode.LINEAR, T)


def l2_norm_sq(x: CadlagPath, T: float) -> float:
    """``int_0^T |x(t)|^2 dt`` in closed form (quadratic pieces for sloped segments)."""
    _check_domain(x, T)
    ends = np.minimum(np.append(x.times[1:], x.horizon), T)
    L = np.clip(ends - x.times, 0.0, None)[:, None]
    v, s = x.values, x.slopes
    terms = v * v * L + v * s * L**2 + s * s * L**3 / 3.0
    return float(np.sum(terms))


# --------------------------------------------------------------------------
# algebra


def combine(a: float, x: CadlagPath, b: float, y: CadlagPath) -> CadlagPath:
    """Pointwise ``a x + b y`` on the common refinement of breakpoints."""
    if x.dim != y.dim:
        raise LabError("DIM_MISMATCH", f"dimensions {x.dim} and {y.dim}")
    horizon = min(x.horizon, y.horizon)
    t = np.union1d(x.times[x.times <= horizon], y.times[y.times <= horizon])
    vx, sx = _value_and_slope(x, t)
    vy, sy = _value_and_slope(y, t)
    values, slopes = a * vx + b * vy, a * sx + b * sy
    slopes[-1] = 0.0
    mode = None
    if x.mode is Mode.STEP and y.mode is Mode.STEP:
        mode = Mode.STEP
    return _canonical(t, values, slopes, horizon, mode)


def scale(x: CadlagPath, a: float) -> CadlagPath:
    return _canonical(x.times.copy(), a * x.values, a * x.slopes, x.horizon, x.mode)


def inverse(A: CadlagPath) -> MonotonePath:
    """First-passage inverse ``tau(s) = inf{t >= 0 : A(t) > s}``.

    The result lives on ``[0, A(horizon)]``.  At ``s = A(horizon)`` the true
    value lies at or beyond the simulated horizon; it is clamped to
    ``horizon``, which makes ``inverse(inverse(A)) == A`` hold exactly on
    D-up-zero staircases.
    """
    A = MonotonePath.from_path(A)
    t, v, s = A.times, A.values[:, 0], A.slopes[:, 0]
    ends = np.append(t[1:], A.horizon)
    lefts = v + s * (ends - t)          # A(t_{i+1}-)
    rising = s > MERGE_TOL
    rate = np.where(rising, 1.0 / np.where(rising, s, 1.0), 0.0)

    # one breakpoint per segment, one per upward jump; interleave in s-order
    seg_s, seg_tau, seg_slope = v, np.where(rising, t, ends), rate
    m = t.size
    jump_here = np.zeros(m, dtype=bool)
    jump_here[:-1] = v[1:] > lefts[:-1] + MERGE_TOL
    S = np.empty(2 * m)
    TAU = np.empty(2 * m)
    SL = np.zeros(2 * m)
    S[0::2], TAU[0::2], SL[0::2] = seg_s, seg_tau, seg_slope
    S[1::2], TAU[1::2] = lefts, ends
    keep = np.ones(2 * m, dtype=bool)
    keep[1::2] = jump_here
    S, TAU, SL = S[keep], TAU[keep], SL[keep]
    if v[0] > MERGE_TOL:
        S, TAU, SL = np.concatenate(([0.0], S)), np.concatenate(([0.0], TAU)), np.concatenate(([0.0], SL))
    # several pieces may start at the same level; the last one defines tau there
    last = np.append(np.diff(S) > MERGE_TOL, True)
    S, TAU, SL = S[last], TAU[last], SL[last]
    S[0] = 0.0
    top = float(v[-1])
    TAU = np.minimum(TAU, A.horizon)
    return from_segments(S, TAU, SL, max(top, S[-1]), cls=MonotonePath)


def compose(x: CadlagPath, y: CadlagPath) -> CadlagPath:
    """Time change ``(x o y)(t) = x(y(t))`` for nondecreasing ``y``.

    Output breakpoints are those of ``y`` plus, inside every rising segment
    of ``y``, the preimages of the breakpoints of ``x``.
    """
    y = MonotonePath.from_path(y)
    top = float(y.values[-1, 0])
    if top > x.horizon + MERGE_TOL:
        raise LabError("RANGE_MISMATCH", f"y reaches {top} beyond x horizon {x.horizon}")
    t, a, s = y.times, np.minimum(y.values[:, 0], x.horizon), y.slopes[:, 0]
    ends = np.append(t[1:], y.horizon)
    b = np.minimum(a + s * (ends - t), x.horizon)
    rising = s > 0

    lo = np.searchsorted(x.times, a, side="right")
    hi = np.searchsorted(x.times, b, side="left")
    counts = np.where(rising, np.maximum(hi - lo, 0), 0)
    total = counts.sum()
    owner = np.repeat(np.arange(t.size), counts)
    offset = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    u = x.times[lo[owner] + offset]
    pre = t[owner] + (u - a[owner]) / s[owner]
    # a preimage within rounding of a segment end would shadow a jump of y
    inside = (pre > t[owner] + MERGE_TOL) & (pre < ends[owner] - MERGE_TOL)
    owner, u, pre = owner[inside], u[inside], pre[inside]

    times = np.concatenate([t, pre])
    levels = np.concatenate([a, u])
    rates = np.concatenate([s, s[owner]])
    order = np.argsort(times, kind="stable")
    times, levels, rates = times[order], levels[order], rates[order]
    vx, sx = _value_and_slope(x, levels)
    return _canonical(times, vx, sx * rates[:, None], y.horizon)


# --------------------------------------------------------------------------
# serialization


def to_json(x: CadlagPath) -> str:
    doc = {
        "mode": x.mode.value,
        "horizon": x.horizon,
        "breakpoints": x.times.tolist(),
        "values": x.values.tolist(),
    }
    if x.mode is Mode.PIECEWISE:
        doc["slopes"] = x.slopes.tolist()
    return json.dumps(doc)


def from_json(text: str) -> CadlagPath:
    doc = json.loads(text)
    mode = Mode(doc["mode"])
    times = np.asarray(doc["breakpoints"], dtype=float)
    values = np.asarray(doc["values"], dtype=float)
    if mode is Mode.PIECEWISE:
        slopes = np.asarray(doc["slopes"], dtype=float)
    else:
        slopes = np.zeros_like(values)
        if mode is Mode.LINEAR and len(times) > 1:
            slopes[:-1] = np.diff(values, axis=0) / np.diff(times)[:, None]
    _check_times(times, doc["horizon"])
    return CadlagPath(times, values, slopes, doc["horizon"], mode)
