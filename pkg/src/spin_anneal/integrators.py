"""Generic fixed-step time steppers.

These are the reference steppers used by tests and by the pure-python solver
fallback; the compiled kernels hand-roll the same stage structure.
"""

from __future__ import annotations

import numpy as np

from .errors import DivergenceError


def _check_finite(y: np.ndarray, t: float):
    if not np.all(np.isfinite(y)):
        raise DivergenceError(f"non-finite state at t={t:g}")


def rk4_step(f, y: np.ndarray, t: float, dt: float) -> np.ndarray:
    """Classical fourth-order Runge-Kutta update with fixed step dt."""
    k1 = f(t, y)
    k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = f(t + dt, y + dt * k3)
    out = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    _check_finite(out, t + dt)
    return out


def em_step(f, sigma, y: np.ndarray, t: float, dt: float, rng=None) -> np.ndarray:
    """Euler-Maruyama update y + f dt + sigma sqrt(dt) xi.

    sigma may be a scalar or a per-component array; sigma = 0 reduces bitwise
    to the explicit Euler step (no random draw is consumed).
    """
    out = y + dt * f(t, y)
    if np.any(np.asarray(sigma) != 0.0):
        out = out + np.asarray(sigma) * np.sqrt(dt) * rng.standard_normal(y.shape)
    _check_finite(out, t + dt)
    return out


def gain_feedback_step(gamma: np.ndarray, x: np.ndarray, eps: float, dt: float) -> np.ndarray:
    """One explicit-Euler update of the per-spin gain feedback
    gamma_i <- gamma_i + eps (1 - |x_i|^2) dt.

    Inside the solvers this feedback is integrated jointly with the state by
    RK4; this standalone form exposes the update law itself.
    """
    x = np.asarray(x, dtype=np.float64)
    sq = (x * x).sum(axis=-1) if x.ndim == 2 else x * x
    return gamma + eps * (1.0 - sq) * dt
