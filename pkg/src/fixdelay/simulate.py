"""Integration of the variable-delay system and its fixed-delay image.

Both systems use classical fixed-step RK4 with cubic Hermite dense output.
The variable-delay system reads x(t - tau(t)) from the initial history when
the argument is non-positive and from the dense output otherwise; the
fixed-delay image reads exactly at lambda - tau* and scales both matrices by
the transform gain h'(lambda), which is evaluated fresh (never interpolated)
at every stage point.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .delays import DelaySpec, theta_inverse, validate_delay
from .errors import ConfigError, DelayBeyondHistory, DomainMismatch, FixdelayError
from .transform import TimeTransform

@dataclass(frozen=True)
class HistoryFunction:
    """Initial-segment catalog: constant, polynomial-in-t or sinusoidal vector."""

    kind: str
    params: dict

    @staticmethod
    def constant(value) -> "HistoryFunction":
        return HistoryFunction("constant", {"value": np.atleast_1d(np.asarray(value, dtype=float))})

    @staticmethod
    def polynomial(coeffs) -> "HistoryFunction":
        # coeffs[k] is the vector coefficient of t^k
        arr = np.atleast_2d(np.asarray(coeffs, dtype=float))
        return HistoryFunction("polynomial", {"coeffs": arr})

    @staticmethod
    def sinusoidal(amplitude, omega, phase, offset) -> "HistoryFunction":
        return HistoryFunction("sinusoidal", {
            "amplitude": np.atleast_1d(np.asarray(amplitude, dtype=float)),
            "omega": float(omega), "phase": float(phase),
            "offset": np.atleast_1d(np.asarray(offset, dtype=float))})

    @property
    def dim(self) -> int:
        if self.kind == "constant":
            return self.params["value"].shape[0]
        if self.kind == "polynomial":
            return self.params["coeffs"].shape[1]
        return self.params["amplitude"].shape[0]

    def value(self, t: float) -> np.ndarray:
        if self.kind == "constant":
            return self.params["value"].copy()
        if self.kind == "polynomial":
            out = np.zeros(self.dim)
            for row in self.params["coeffs"][::-1]:
                out = out * t + row
            return out
        p = self.params
        return p["amplitude"] * np.sin(p["omega"] * t + p["phase"]) + p["offset"]

    def derivative(self, t: float) -> np.ndarray:
        if self.kind == "constant":
            return np.zeros(self.dim)
        if self.kind == "polynomial":
            coeffs = self.params["coeffs"]
            out = np.zeros(self.dim)
            for k in range(coeffs.shape[0] - 1, 0, -1):
                out = out * t + k * coeffs[k]
            return out
        p = self.params
        return p["amplitude"] * p["omega"] * np.cos(p["omega"] * t + p["phase"])

    @staticmethod
    def from_dict(d: dict) -> "HistoryFunction":
        kind = d.get("kind")
        keys = set(d) - {"kind"}
        if kind == "constant":
            if keys != {"value"}:
                raise ConfigError(f"history kind 'constant' takes key 'value', got {sorted(keys)}")
            return HistoryFunction.constant(d["value"])
        if kind == "polynomial":
            if keys != {"coeffs"}:
                raise ConfigError(f"history kind 'polynomial' takes key 'coeffs', got {sorted(keys)}")
            return HistoryFunction.polynomial(d["coeffs"])
        if kind == "sinusoidal":
            if keys != {"amplitude", "omega", "phase", "offset"}:
                raise ConfigError("history kind 'sinusoidal' takes keys "
                                  f"amplitude/omega/phase/offset, got {sorted(keys)}")
            return HistoryFunction.sinusoidal(d["amplitude"], d["omega"], d["phase"], d["offset"])
        raise ConfigError(f"unknown history kind {kind!r}")

@dataclass(frozen=True)
class LinearDDE:
    """x'(t) = A0 x(t) + A1 x(t - tau(t)) with initial function on [-tau(0), 0]."""

    a0: np.ndarray
    a1: np.ndarray
    history: HistoryFunction

    def __post_init__(self):
        a0 = np.atleast_2d(np.asarray(self.a0, dtype=float))
        a1 = np.atleast_2d(np.asarray(self.a1, dtype=float))
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "a1", a1)
        n = a0.shape[0]
        if a0.shape != (n, n) or a1.shape != (n, n):
            raise ValueError("A0 and A1 must be square and of equal dimension")
        if self.history.dim != n:
            raise ValueError("history dimension does not match the matrices")

    @property
    def dim(self) -> int:
        return self.a0.shape[0]


class Trajectory:
    """Time-stamped samples with per-step cubic Hermite dense output.

    axis is "t" for the original clock and "lambda" for the transformed one.
    Nodes reproduce exactly; queries between nodes interpolate the cubic
    matching values and derivatives at both ends.
    """

    def __init__(self, times, states, derivs, axis: str = "t"):
        self.times = np.asarray(times, dtype=float)
        self.states = np.asarray(states, dtype=float)
        self.derivs = np.asarray(derivs, dtype=float)
        if not np.all(np.diff(self.times) > 0):
            raise ValueError("time stamps must be strictly increasing")
        self.axis = axis

    @property
    def t0(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def at(self, t: float, extrapolate: float = 0.0) -> np.ndarray:
        """Dense-output evaluation; extrapolate widens the right edge."""
        times = self.times
        if t < times[0] or t > times[-1] + extrapolate:
            raise DomainMismatch(f"query {t} outside trajectory [{times[0]}, {times[-1]}]")
        i = bisect_right(times, t) - 1
        if i >= len(times) - 1:
            i = len(times) - 2
        if i < 0:
            i = 0
        t0, t1 = times[i], times[i + 1]
        dt = t1 - t0
        s = (t - t0) / dt
        s2, s3 = s * s, s * s * s
        h00 = 2 * s3 - 3 * s2 + 1
        h10 = s3 - 2 * s2 + s
        h01 = -2 * s3 + 3 * s2
        h11 = s3 - s2
        return (h00 * self.states[i] + h01 * self.states[i + 1]
                + dt * (h10 * self.derivs[i] + h11 * self.derivs[i + 1]))

    def write_csv(self, path) -> None:
        label = "t" if self.axis == "t" else "lambda"
        cols = ",".join(f"x_{j+1}" for j in range(self.dim))
        with open(path, "w") as fh:
            fh.write(f"{label},{cols}\n")
            for t, row in zip(self.times, self.states):
                fh.write(f"{t:.17g}," + ",".join(f"{v:.17g}" for v in row) + "\n")


class _GrowingHermite:
    """Dense output over completed steps, extrapolating at most one step right."""

    def __init__(self, dt):
        self.ts = []
        self.xs = []
        self.ms = []
        self.dt = dt

    def push(self, t, x, m):
        self.ts.append(t)
        self.xs.append(np.asarray(x, dtype=float))
        self.ms.append(np.asarray(m, dtype=float))

    def eval(self, t):
        ts = self.ts
        if len(ts) < 2:
            raise DomainMismatch(
                "delayed read falls inside the first integration step; "
                "reduce the step below the minimum delay")
        i = bisect_right(ts, t) - 1
        if i >= len(ts) - 1:
            i = len(ts) - 2  # right extrapolation from the last completed step
        if i < 0:
            i = 0
        t0, t1 = ts[i], ts[i + 1]
        dt = t1 - t0
        s = (t - t0) / dt
        s2, s3 = s * s, s * s * s
        return ((2 * s3 - 3 * s2 + 1) * self.xs[i] + (-2 * s3 + 3 * s2) * self.xs[i + 1]
                + dt * ((s3 - 2 * s2 + s) * self.ms[i] + (s3 - s2) * self.ms[i + 1]))


def _with_history(traj_times, traj_states, traj_derivs, history, t_hist_start, dt, dim):
    """Prepend sampled history so the exported trajectory covers it."""
    if t_hist_start >= 0.0:
        return traj_times, traj_states, traj_derivs
    n_hist = max(int(np.ceil(-t_hist_start / dt)), 1)
    th = np.linspace(t_hist_start, 0.0, n_hist + 1)[:-1]
    hs = np.array([history.value(t) for t in th]).reshape(len(th), dim)
    hd = np.array([history.derivative(t) for t in th]).reshape(len(th), dim)
    return (np.concatenate([th, traj_times]),
            np.vstack([hs, traj_states]),
            np.vstack([hd, traj_derivs]))


def _aligned_grid(t_end: float, dt: float, breakpoints) -> np.ndarray:
    """Uniform nodes on [0, t_end] merged with breakpoint times.

    Derivative discontinuities propagate from t = 0 through the delayed
    reads; landing a node exactly on each one keeps the integrator at its
    smooth-solution order instead of smearing O(dt^2) error across the kink.
    """
    n_steps = int(round(t_end / dt))
    nodes = dt * np.arange(n_steps + 1)
    if nodes[-1] < t_end:
        nodes = np.append(nodes, t_end)
    bps = np.asarray([b for b in breakpoints if 0.0 < b < t_end], dtype=float)
    if bps.size:
        grid = np.union1d(nodes, bps)
        # drop near-duplicates so step sizes stay bounded away from zero
        keep = np.concatenate([[True], np.diff(grid) > 1e-9 * dt])
        grid = grid[keep]
        if grid[-1] < t_end:
            grid = np.append(grid, t_end)
        return grid
    return nodes


def breakpoint_chain(delay: DelaySpec, t_end: float, tol: float = 1e-12) -> list:
    """Times where the initial kink re-enters through the delayed read:
    t_0 = 0, theta(t_{k+1}) = t_k.

    Alignment is an accuracy aid, so a delay the lag inversion cannot handle
    yields an empty chain instead of an error; the integrator then reports
    the actual failure (e.g. a read before the history) itself.
    """
    chain = []
    t = 0.0
    try:
        for _ in range(100_000):
            t = theta_inverse(delay, t, tol=tol, max_iter=100)
            if t >= t_end:
                break
            chain.append(t)
    except FixdelayError:
        return []
    return chain


def simulate_varying(dde: LinearDDE, delay: DelaySpec, t_end: float, dt: float,
                     check_delay: bool = True) -> Trajectory:
    """Integrate the time-varying-delay system on [0, t_end].

    Step boundaries are aligned to the propagated-discontinuity chain.  The
    returned trajectory also covers the history on [-tau(0), 0].  Raises
    DelayBeyondHistory if some read t - tau(t) precedes -tau(0).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if check_delay:
        report = validate_delay(delay, (0.0, t_end), max(int(t_end / dt) // 10, 100))
        if not report.passed:
            raise ValueError(f"delay assumptions fail on [0, {t_end}]: {report.to_dict()}")
    tau0 = float(delay.tau(0.0))
    grid = _aligned_grid(t_end, dt, breakpoint_chain(delay, t_end))
    dense_box = {}

    def delayed_state(t):
        s = t - float(delay.tau(t))
        if s <= 0.0:
            if s < -tau0 - 1e-12:
                raise DelayBeyondHistory(f"read at {s} precedes history start {-tau0}")
            return dde.history.value(max(s, -tau0))
        return dense_box["d"].eval(s)

    def rhs(t, x):
        return dde.a0 @ x + dde.a1 @ delayed_state(t)

    x0 = dde.history.value(0.0)
    states, derivs, _ = _rk4_dense(rhs, grid, x0, dde.dim, dense_box)
    ts, ss, ds = _with_history(grid, states, derivs, dde.history, -tau0, dt, dde.dim)
    return Trajectory(ts, ss, ds, axis="t")


def _rk4_dense(rhs, grid, x0, dim, dense_box):
    """RK4 over an arbitrary node grid, recording dense output as it goes.

    The growing interpolant is installed in dense_box before the first step
    so the rhs closure can read delayed states from it.
    """
    dense = _GrowingHermite(float(np.min(np.diff(grid))))
    dense_box["d"] = dense
    states = np.empty((len(grid), dim))
    derivs = np.empty_like(states)
    x = np.asarray(x0, dtype=float).copy()
    states[0] = x
    derivs[0] = rhs(grid[0], x)
    dense.push(grid[0], x, derivs[0])
    for i in range(len(grid) - 1):
        t = grid[i]
        hstep = grid[i + 1] - t
        k1 = derivs[i]
        k2 = rhs(t + 0.5 * hstep, x + 0.5 * hstep * k1)
        k3 = rhs(t + 0.5 * hstep, x + 0.5 * hstep * k2)
        k4 = rhs(grid[i + 1], x + hstep * k3)
        x = x + (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        m = rhs(grid[i + 1], x)
        dense.push(grid[i + 1], x, m)
        states[i + 1] = x
        derivs[i + 1] = m
    return states, derivs, dense


def simulate_fixed(dde: LinearDDE, tt: TimeTransform, lambda_end: float, dlambda: float) -> Trajectory:
    """Integrate the fixed-delay image: xbar'(lam) = h'(lam)[A0 xbar + A1 xbar(lam - tau*)].

    The initial segment is xbar(lam) = history(h(lam)) on [-tau*, 0]; the gain
    h' is batch-evaluated exactly at every node and half-step point.
    """
    if dlambda <= 0:
        raise ValueError("dlambda must be positive")
    ts = tt.tau_star
    # the gain h' has kinks at multiples of tau*; align nodes there
    kinks = ts * np.arange(1, int(np.floor(lambda_end / ts)) + 1)
    grid = _aligned_grid(lambda_end, dlambda, kinks)
    half = grid[:-1] + 0.5 * np.diff(grid)
    stage_points = np.union1d(grid, half)
    _, hp_stage = tt.eval_h_many(stage_points)
    gain = dict(zip(stage_points.tolist(), hp_stage.tolist()))

    # history on [-tau*, 0] through the transform: precompute h exactly at the
    # delayed-stage points (stage - tau*) so no interpolation enters; anything
    # off that grid falls back to an exact scalar evaluation
    hist_points = stage_points - ts
    hist_points = np.append(hist_points[hist_points <= 0.0], [-ts, 0.0])
    h_at = dict(zip(hist_points.tolist(), tt.eval_h_many(hist_points)[0].tolist()))

    def xbar_history(lam):
        hval = h_at.get(lam)
        if hval is None:
            hval = float(tt.eval_h(max(lam, -ts)))
        return dde.history.value(hval)

    dense_box = {}

    def delayed_state(lam):
        s = lam - ts
        if s <= 0.0:
            return xbar_history(max(s, -ts))
        return dense_box["d"].eval(s)

    def rhs(lam, x):
        g = gain.get(lam)
        if g is None:
            g = float(tt.eval_h_prime(lam))
        return g * (dde.a0 @ x + dde.a1 @ delayed_state(lam))

    x0 = dde.history.value(float(tt.eval_h(0.0)))
    states, derivs, _ = _rk4_dense(rhs, grid, x0, dde.dim, dense_box)

    # prepend the transformed history for export
    hist_grid = np.linspace(-ts, 0.0, max(int(round(ts / dlambda)), 4) + 1)[:-1]
    h_hist, hp_hist = tt.eval_h_many(hist_grid)
    hs = np.array([dde.history.value(v) for v in h_hist]).reshape(-1, dde.dim)
    hd = np.empty_like(hs)
    for j in range(len(hist_grid)):
        hd[j] = dde.history.derivative(float(h_hist[j])) * hp_hist[j]
    return Trajectory(np.concatenate([hist_grid, grid]),
                      np.vstack([hs, states]),
                      np.vstack([hd, derivs]), axis="lambda")


def equivalence_error(x_traj: Trajectory, xbar_traj: Trajectory, tt: TimeTransform,
                      n_check: int = 500) -> float:
    """max over lambda samples of ||x(h(lambda)) - xbar(lambda)||_inf.

    Samples are uniform over the transformed trajectory's forward range;
    raises DomainMismatch if the original trajectory does not cover h(lambda).
    """
    if x_traj.axis != "t" or xbar_traj.axis != "lambda":
        raise DomainMismatch("expected an original-time and a transformed trajectory")
    lam_end = xbar_traj.t_end
    lams = np.linspace(0.0, lam_end, n_check)
    hvals, _ = tt.eval_h_many(lams)
    if hvals[-1] > x_traj.t_end + 1e-12:
        raise DomainMismatch(
            f"original trajectory ends at {x_traj.t_end} but h(lambda_end) = {hvals[-1]}")
    worst = 0.0
    for lam, hval in zip(lams, hvals):
        diff = x_traj.at(min(hval, x_traj.t_end)) - xbar_traj.at(lam)
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst
