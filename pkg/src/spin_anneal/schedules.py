"""Annealing schedules shared by the solvers.

Every schedule is a pure function of time and its parameters.  Solvers
integrate with fixed-step RK4, so each schedule is sampled on a half-step
grid t_k = k*dt/2 (k = 0..2*n_steps) once per run; both kernel backends
consume the same sampled array.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

log = logging.getLogger(__name__)


def tanh_pump(t, p0: float, eps: float):
    """General pumping scheme p(t) = (1 - p0) tanh(eps t) + p0; p(0) = p0 and
    p -> 1 as t grows."""
    return (1.0 - p0) * np.tanh(eps * np.asarray(t, dtype=np.float64)) + p0


def linear_ramp(t, rate: float):
    """P(t) = rate * t, the growing collinearity-penalty ramp."""
    return rate * np.asarray(t, dtype=np.float64)


def linear_interp(t, T: float):
    """Interpolation pair A(t) = 1 - t/T, B(t) = t/T with A + B = 1.

    Times outside [0, T] are clamped (and logged) so evaluation is total.
    """
    if T <= 0:
        raise ValidationError(f"horizon T must be positive, got {T}")
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0.0) or np.any(t > T):
        log.warning("linear_interp time outside [0, %s]; clamping", T)
        t = np.clip(t, 0.0, T)
    B = t / T
    return 1.0 - B, B


def beta_decay(t, beta0: float, T: float):
    """Annealed anti-damping amplitude beta(t) = beta0 (1 - t/T)."""
    if T <= 0:
        raise ValidationError(f"horizon T must be positive, got {T}")
    return beta0 * (1.0 - np.asarray(t, dtype=np.float64) / T)


def half_step_times(n_steps: int, dt: float) -> np.ndarray:
    """Grid t_k = k*dt/2 covering every RK4 stage time of a run."""
    if n_steps < 1 or dt <= 0:
        raise ValidationError(f"need n_steps >= 1 and dt > 0, got {n_steps}, {dt}")
    return np.arange(2 * n_steps + 1, dtype=np.float64) * (dt / 2.0)


@dataclass
class Schedule:
    """A named schedule with its parameters, samplable on the RK4 grid.

    kinds: constant, linear_ramp(rate), tanh_pump(p0, eps),
    linear_interp(T) [value = B(t)], beta_decay(beta0, T).
    """

    kind: str
    params: dict = field(default_factory=dict)

    def sample(self, t):
        if self.kind == "constant":
            return np.full_like(np.asarray(t, dtype=np.float64), self.params["value"])
        if self.kind == "linear_ramp":
            return linear_ramp(t, self.params["rate"])
        if self.kind == "tanh_pump":
            return tanh_pump(t, self.params["p0"], self.params["eps"])
        if self.kind == "linear_interp":
            return linear_interp(t, self.params["T"])[1]
        if self.kind == "beta_decay":
            return beta_decay(t, self.params["beta0"], self.params["T"])
        raise ValidationError(f"unknown schedule kind {self.kind!r}")

    def sample_half_grid(self, n_steps: int, dt: float) -> np.ndarray:
        return np.ascontiguousarray(self.sample(half_step_times(n_steps, dt)))
