"""Adaptive Dormand-Prince 5(4) integrator for small dense ODE systems.

Plain explicit Runge-Kutta with an embedded 4th-order error estimate and
standard step-size control.  The system sizes in this package are tiny
(vectorized density matrices, <= a few hundred components), so robustness
and transparency beat sophistication; no dense output, steps are clipped
to land exactly on the requested output times.

Works on real or complex state vectors.
"""

from __future__ import annotations

import numpy as np

# Dormand-Prince 5(4) tableau (FSAL). Rows of A, nodes c, 5th-order weights
# b5 and the embedded 4th-order weights b4.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
                187 / 2100, 1 / 40])
_E = _B5 - _B4

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


class IntegrationError(RuntimeError):
    """Raised when the step budget is exhausted before reaching the horizon.

    ``last_time`` holds the last time the integrator reached successfully.
    """

    def __init__(self, message: str, last_time: float):
        super().__init__(message)
        self.last_time = last_time


def _step(rhs, t, y, h, k1):
    """One DP5 step. Returns (y5, error_vector, k_last) with k_last = f(t+h, y5)."""
    k = [k1]
    for i in range(1, 7):
        yi = y + h * sum(a * ki for a, ki in zip(_A[i], k))
        k.append(rhs(t + _C[i] * h, yi))
    y5 = y + h * sum(b * ki for b, ki in zip(_B5[:6], k[:6]))
    # k[6] was evaluated at y5 already (FSAL structure of the tableau)
    err = h * sum(e * ki for e, ki in zip(_E, k))
    return y5, err, k[6]


def _error_norm(err, y_old, y_new, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y_old), np.abs(y_new))
    return float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))


def _initial_step(rhs, t0, y0, f0, t_span, rtol, atol):
    scale = atol + rtol * np.abs(y0)
    d0 = float(np.sqrt(np.mean(np.abs(y0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean(np.abs(f0 / scale) ** 2)))
    h0 = 1e-6 * t_span if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, t_span)
    f1 = rhs(t0 + h0, y0 + h0 * f0)
    d2 = float(np.sqrt(np.mean(np.abs((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6 * t_span, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1, t_span)


def integrate_adaptive(rhs, y0, t_grid, rtol=1e-8, atol=None,
                       max_steps=1_000_000, first_step=None):
    """Integrate y' = rhs(t, y) and return the states at each t_grid point.

    t_grid must be non-decreasing and start at the initial time; the state
    y0 belongs to t_grid[0].  atol defaults to rtol * 1e-3 on a unit-scale
    state (density-matrix entries are O(1)).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 1:
        raise ValueError("t_grid must be a 1-D sequence of times")
    if np.any(np.diff(t_grid) < 0):
        raise ValueError("t_grid must be non-decreasing")
    if atol is None:
        atol = 1e-3 * rtol

    y = np.array(y0)
    out = np.empty((len(t_grid),) + y.shape, dtype=y.dtype)
    out[0] = y
    if len(t_grid) == 1:
        return out

    t = float(t_grid[0])
    t_end = float(t_grid[-1])
    f = rhs(t, y)
    h = first_step or _initial_step(rhs, t, y, f, t_end - t, rtol, atol)

    next_out = 1
    # fill any duplicate leading output times
    while next_out < len(t_grid) and t_grid[next_out] <= t:
        out[next_out] = y
        next_out += 1

    n_steps = 0
    while next_out < len(t_grid):
        if n_steps >= max_steps:
            raise IntegrationError(
                f"step budget of {max_steps} exhausted at t = {t:.6e} "
                f"(target {t_end:.6e}); tolerance rtol={rtol} not achievable",
                last_time=t)
        h = min(h, t_end - t)
        h_try = min(h, float(t_grid[next_out]) - t)
        clipped = h_try < h * (1.0 - 1e-12)
        y_new, err, f_new = _step(rhs, t, y, h_try, f)
        n_steps += 1
        norm = _error_norm(err, y, y_new, rtol, atol)
        if norm <= 1.0:
            t += h_try
            y = y_new
            f = f_new
            while next_out < len(t_grid) and t_grid[next_out] <= t * (1 + 1e-15) + 1e-300:
                out[next_out] = y
                next_out += 1
            if not clipped:
                factor = _MAX_FACTOR if norm == 0.0 else min(
                    _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * norm ** -0.2))
                h = h_try * factor
            # a step clipped onto an output time says nothing about the
            # natural step size; keep h unchanged in that case
        else:
            h = h_try * max(_MIN_FACTOR, _SAFETY * norm ** -0.2)
            if not np.isfinite(norm) or h <= 1e-15 * max(abs(t), 1e-30):
                raise IntegrationError(
                    f"step size underflow at t = {t:.6e}", last_time=t)
    return out


def integrate_fixed(rhs, y0, t_grid, dt, max_steps=10_000_000):
    """Fixed-step DP5 sweep (no error control), clipped onto t_grid points."""
    if not (dt > 0.0):
        raise ValueError("dt must be > 0")
    t_grid = np.asarray(t_grid, dtype=float)
    y = np.array(y0)
    out = np.empty((len(t_grid),) + y.shape, dtype=y.dtype)
    out[0] = y
    t = float(t_grid[0])
    f = rhs(t, y)
    n_steps = 0
    for j in range(1, len(t_grid)):
        target = float(t_grid[j])
        while t < target * (1 - 1e-15):
            if n_steps >= max_steps:
                raise IntegrationError(
                    f"fixed-step budget of {max_steps} exhausted at t = {t:.6e}",
                    last_time=t)
            h = min(dt, target - t)
            y, _, f = _step(rhs, t, y, h, f)
            t += h
            n_steps += 1
        out[j] = y
    return out
