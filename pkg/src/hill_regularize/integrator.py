"""Adaptive Dormand-Prince 5(4) integration with dense output and events.

Error control uses the RMS of ``err_i / (abs_tol + rel_tol * |y_i|)``.  Dense
output is the free fourth-order interpolant of the pair.  Events are located
by bisection on the interpolant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional, Sequence

import numpy as np

from .errors import HillError, OutOfSpan, StepSizeUnderflow

# Dormand-Prince 5(4) tableau
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# difference between the 5th and embedded 4th order weights, 7 stages (FSAL)
E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)
# interpolant coefficients (Shampine), columns multiply s, s^2, s^3, s^4
P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)
ORDER = 5
SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
MAX_REJECTS = 20
UNDERFLOW = 1e-14

Direction = Literal["any", "rising", "falling"]


@dataclass
class EventSpec:
    """Scalar event ``g(t, y) = 0``.

    ``direction`` selects sign changes from negative to positive (``rising``),
    positive to negative (``falling``) or both.
    """

    event_function: Callable[[float, np.ndarray], float]
    direction: Direction = "any"
    terminal: bool = False
    refine_tol: float = 1e-12
    name: str = ""

    def __post_init__(self):
        if not self.refine_tol > 0:
            raise ValueError("refine_tol must be positive")
        if self.direction not in ("any", "rising", "falling"):
            raise ValueError(f"bad event direction {self.direction!r}")


@dataclass(frozen=True)
class EventRecord:
    index: int
    name: str
    t: float
    state: np.ndarray
    value: float


@dataclass
class Trajectory:
    """Accepted-step samples plus the per-step interpolation data."""

    t: np.ndarray
    y: np.ndarray
    accepted_steps: int = 0
    rejected_steps: int = 0
    events: list = field(default_factory=list)
    terminated_by: Optional[str] = None
    _stages: list = field(default_factory=list, repr=False)

    @property
    def samples(self):
        return list(zip(self.t.tolist(), self.y))

    @property
    def t_final(self) -> float:
        return float(self.t[-1])

    @property
    def y_final(self) -> np.ndarray:
        return self.y[-1]

    def __call__(self, t: float) -> np.ndarray:
        return dense_eval(self, t)


def _interp(y0, h, K, s):
    Q = K.T @ P
    return y0 + h * (Q @ np.array([s, s * s, s**3, s**4]))


def dense_eval(trajectory: Trajectory, t: float) -> np.ndarray:
    """Evaluate the interpolant at ``t`` inside the integrated span."""
    ts = trajectory.t
    lo, hi = (ts[0], ts[-1]) if ts[-1] >= ts[0] else (ts[-1], ts[0])
    if not lo <= t <= hi:
        raise OutOfSpan(f"t={t!r} outside [{lo!r}, {hi!r}]")
    if t == ts[0]:
        return trajectory.y[0].copy()
    forward = ts[-1] >= ts[0]
    if forward:
        i = int(np.searchsorted(ts, t, side="left")) - 1
    else:
        i = int(np.searchsorted(-ts, -t, side="left")) - 1
    i = min(max(i, 0), len(ts) - 2)
    if t == ts[i + 1]:
        return trajectory.y[i + 1].copy()
    # a step cut short by a terminal event keeps its full-step interpolant
    h, K = trajectory._stages[i]
    return _interp(trajectory.y[i], h, K, (t - ts[i]) / h)


def _rms_norm(x):
    return math.sqrt(float(np.dot(x, x)) / x.size)


def _initial_step(f, t0, y0, f0, direction, rel_tol, abs_tol, span):
    scale = abs_tol + np.abs(y0) * rel_tol
    d0 = _rms_norm(y0 / scale)
    d1 = _rms_norm(f0 / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + direction * h0 * f0
    f1 = f(t0 + direction * h0, y1)
    d2 = _rms_norm((f1 - f0) / scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / ORDER)
    return min(100 * h0, h1, span)


def _bisect_event(ev, g_lo, t_lo, t_hi, y0, h, K, t_step):
    """Shrink ``[t_lo, t_hi]`` around the sign change of ``g``."""
    for _ in range(200):
        if abs(t_hi - t_lo) <= ev.refine_tol:
            break
        t_mid = 0.5 * (t_lo + t_hi)
        y_mid = _interp(y0, h, K, (t_mid - t_step) / h)
        g_mid = ev.event_function(t_mid, y_mid)
        if g_mid == 0.0:
            return t_mid, y_mid, g_mid
        if (g_mid > 0) == (g_lo > 0):
            t_lo, g_lo = t_mid, g_mid
        else:
            t_hi = t_mid
    t_ev = t_hi
    y_ev = _interp(y0, h, K, (t_ev - t_step) / h)
    return t_ev, y_ev, ev.event_function(t_ev, y_ev)


def _crossed(ev, g0, g1):
    if ev.direction in ("any", "rising") and g0 < 0 <= g1:
        return True
    if ev.direction in ("any", "falling") and g0 > 0 >= g1:
        return True
    return False


def integrate(
    field: Callable[[float, np.ndarray], np.ndarray],
    state0: Sequence[float],
    t_span: tuple[float, float],
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
    events: Sequence[EventSpec] = (),
    first_step: Optional[float] = None,
    max_steps: int = 1_000_000,
) -> Trajectory:
    """Integrate ``y' = field(t, y)`` over ``t_span``.

    Returns a :class:`Trajectory`; detected events are in ``trajectory.events``
    and a terminal event ends the run at the event time.

    Raises
    ------
    StepSizeUnderflow
        When the step falls below ``1e-14 * |t1 - t0|`` or
        more than 20 consecutive trials are rejected.  The partial trajectory
        is attached to the exception.
    """
    if not (rel_tol > 0 and abs_tol > 0):
        raise ValueError("tolerances must be positive")
    t0, t1 = float(t_span[0]), float(t_span[1])
    y = np.array(state0, dtype=float)
    span = abs(t1 - t0)
    ts, ys, stages = [t0], [y.copy()], []
    traj = Trajectory(np.array(ts), np.array(ys))
    if span == 0.0:
        return traj

    direction = 1.0 if t1 > t0 else -1.0
    user_field = field

    def field(t, y):
        try:
            return user_field(t, y)
        except HillError as exc:
            # hand the caller everything accepted so far
            if getattr(exc, "trajectory", None) is None:
                exc.trajectory = _finish()
            raise

    f0 = np.asarray(field(t0, y), dtype=float)
    h_abs = abs(first_step) if first_step else _initial_step(
        field, t0, y, f0, direction, rel_tol, abs_tol, span
    )
    h_min = UNDERFLOW * span
    n = y.size
    K = np.empty((7, n))
    g_prev = [ev.event_function(t0, y) for ev in events]
    t = t0
    accepted = rejected = 0
    terminated_by = None
    event_records = []

    def _finish():
        traj.t = np.array(ts)
        traj.y = np.array(ys)
        traj._stages = stages
        traj.accepted_steps = accepted
        traj.rejected_steps = rejected
        traj.events = event_records
        traj.terminated_by = terminated_by
        return traj

    while direction * (t1 - t) > 0:
        if accepted >= max_steps:
            _finish()
            raise StepSizeUnderflow(f"exceeded {max_steps} steps", t, traj)
        tries = 0
        while True:
            if h_abs < h_min:
                _finish()
                raise StepSizeUnderflow(f"step size {h_abs:.3e} underflow at t={t!r}", t, traj)
            h_abs = min(h_abs, abs(t1 - t))
            h = direction * h_abs
            t_new = t + h
            if direction * (t_new - t1) > 0 or abs(t1 - t_new) < 1e-14 * span:
                t_new = t1
                h = t_new - t
            K[0] = f0
            for s in range(1, 6):
                K[s] = field(t + C[s] * h, y + h * (A[s] @ K[:s]))
            y_new = y + h * (B @ K[:6])
            f_new = np.asarray(field(t_new, y_new), dtype=float)
            K[6] = f_new
            scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            err = _rms_norm(h * (E @ K) / scale)
            if not math.isfinite(err) or not np.all(np.isfinite(y_new)):
                err = math.inf
            if err <= 1.0:
                factor = MAX_FACTOR if err == 0 else min(MAX_FACTOR, SAFETY * err ** (-1 / ORDER))
                if tries:
                    factor = min(1.0, factor)
                break
            rejected += 1
            tries += 1
            if tries > MAX_REJECTS:
                _finish()
                raise StepSizeUnderflow(f"{tries} consecutive rejections at t={t!r}", t, traj)
            factor = MIN_FACTOR if not math.isfinite(err) else max(MIN_FACTOR, SAFETY * err ** (-1 / ORDER))
            h_abs *= factor

        accepted += 1
        K_step = K.copy()
        stop_at = None
        for i, ev in enumerate(events):
            g_new = ev.event_function(t_new, y_new)
            if _crossed(ev, g_prev[i], g_new):
                t_ev, y_ev, g_ev = _bisect_event(ev, g_prev[i], t, t_new, y, h, K_step, t)
                event_records.append(EventRecord(i, ev.name, t_ev, y_ev, g_ev))
                if ev.terminal and (stop_at is None or direction * (t_ev - stop_at[0]) < 0):
                    stop_at = (t_ev, y_ev, ev.name or str(i))
            g_prev[i] = g_new

        if stop_at is not None:
            t_ev, y_ev, label = stop_at
            # keep only events up to the terminal time
            event_records = [e for e in event_records if direction * (e.t - t_ev) <= 0]
            if t_ev != t:
                ts.append(t_ev)
                ys.append(y_ev)
                stages.append((h, K_step))
            terminated_by = label
            break

        ts.append(t_new)
        ys.append(y_new.copy())
        stages.append((h, K_step))
        t, y, f0 = t_new, y_new, f_new
        h_abs *= factor

    return _finish()



COLLISION_ASYMPTOTIC = "collision-asymptotic"
ESCAPED = "escaped"
TIMED_OUT = "timed-out"


@dataclass
class CollisionRun:
    """Regularized trajectory with its collision verdict.

    ``verdict_thresholds`` records the engineering choices behind the verdict;
    the rate of approach to the collision manifold is not known analytically.
    """

    trajectory: Trajectory
    verdict: str
    physical_time: np.ndarray
    verdict_thresholds: dict

    @property
    def final_state(self):
        from .mcgehee import McGeheeState

        return McGeheeState.from_array(self.trajectory.y_final, self.trajectory.t_final)

    @property
    def t_star(self) -> float:
        return float(self.physical_time[-1])


def integrate_to_collision(
    params,
    state0,
    tau_max: float,
    r_floor: float = 1e-8,
    r_ceiling: float = 1e3,
    rel_tol: float = 1e-12,
    abs_tol: float = 1e-12,
    window: float = 0.1,
) -> CollisionRun:
    """Follow the regularized flow from ``state0`` for ``tau`` in ``[0, tau_max]``.

    The verdict is ``escaped`` when ``r`` reaches ``r_ceiling``.  It is
    ``collision-asymptotic`` when the final ``r`` is below ``r_floor``,
    ``r`` is still decreasing, and the distance to the collision manifold
    shrank over the last ``window`` fraction of the samples.  Anything else is
    ``timed-out``.
    """
    from .collision import collision_distance
    from .mcgehee import make_regularized_field, recover_physical_time

    if not r_floor > 0:
        raise ValueError("r_floor must be positive")
    field = make_regularized_field(params)
    escape = EventSpec(lambda tau, y: y[0] - r_ceiling, "rising", True, name=ESCAPED)
    y0 = np.array([state0.r, state0.theta, state0.v, state0.w], dtype=float)
    tau0 = state0.tau
    traj = integrate(field, y0, (tau0, tau0 + tau_max), rel_tol, abs_tol, events=[escape])
    t_phys = recover_physical_time(np.column_stack([traj.t, np.abs(traj.y[:, 0])]))

    thresholds = {"r_floor": r_floor, "r_ceiling": r_ceiling, "window": window}
    if traj.terminated_by == ESCAPED:
        verdict = ESCAPED
    else:
        r, _, v, w = traj.y_final
        r_rate = field(traj.t_final, traj.y_final)[0]
        n = len(traj.t)
        start = max(0, min(n - 2, int(math.floor((1.0 - window) * (n - 1)))))
        c = params.c
        d_start = collision_distance(abs(traj.y[start, 0]), traj.y[start, 2], traj.y[start, 3], c)
        d_end = collision_distance(abs(r), v, w, c)
        approaching = d_end < d_start or d_end == 0.0
        if abs(r) < r_floor and r_rate < 0 and approaching:
            verdict = COLLISION_ASYMPTOTIC
        else:
            verdict = TIMED_OUT
    return CollisionRun(traj, verdict, t_phys, thresholds)
