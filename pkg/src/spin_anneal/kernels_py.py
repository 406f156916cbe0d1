"""Pure-numpy integration kernels (fallback backend).

Each function advances one solver trajectory in place and mirrors the
compiled kernels in spin_anneal._kernels stage for stage: same RK4 stage
structure, same post-step maps, same divergence checks and trajectory
recording points.  Schedules arrive pre-sampled on the half-step grid
(index 2*j is step time, 2*j+1 the midpoint), so both backends consume
identical schedule values.  Floating-point results can differ from the
compiled backend only through summation order inside matrix products.

Return value is (status, steps_completed); status 0 is success, 1 means a
state component exceeded the divergence bound (NaN counts as divergent).
"""

from __future__ import annotations

import numpy as np

COMPILED = False


def _diverged(arr: np.ndarray, bound: float) -> bool:
    m = float(np.max(np.abs(arr)))
    return not (m <= bound)


class _Recorder:
    def __init__(self, record_steps, traj):
        self.steps = record_steps
        self.traj = traj
        self.ptr = 0

    def maybe(self, step, *arrays):
        if self.steps is None or self.ptr >= len(self.steps):
            return
        if self.steps[self.ptr] == step:
            self.traj[self.ptr] = np.concatenate([a.ravel() for a in arrays])
            self.ptr += 1


def visa_integrate(W, x, gamma, alpha, eps, p_half, dt, n_steps, bound,
                   record_steps=None, traj=None):
    """Joint RK4 of the 3-vector soft spins and their per-spin gain feedback.

    dx_i/dt = alpha x_i (gamma_i - |x_i|^2) + (W x)_i
              - 2 P(t) (x_i sum_j |x_j|^2 - sum_j x_j (x_i . x_j))
    dgamma_i/dt = eps (1 - |x_i|^2)
    """
    rec = _Recorder(record_steps, traj)

    def rhs(xs, gs, P):
        sq = np.einsum("ij,ij->i", xs, xs)
        fx = alpha * (gs - sq)[:, None] * xs + W @ xs
        if P != 0.0:
            fx -= 2.0 * P * (sq.sum() * xs - xs @ (xs.T @ xs))
        return fx, eps * (1.0 - sq)

    h = dt / 2.0
    for step in range(n_steps):
        rec.maybe(step, x, gamma)
        P0, Pm, P1 = p_half[2 * step], p_half[2 * step + 1], p_half[2 * step + 2]
        k1x, k1g = rhs(x, gamma, P0)
        k2x, k2g = rhs(x + h * k1x, gamma + h * k1g, Pm)
        k3x, k3g = rhs(x + h * k2x, gamma + h * k2g, Pm)
        k4x, k4g = rhs(x + dt * k3x, gamma + dt * k3g, P1)
        x += (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        gamma += (dt / 6.0) * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
        if _diverged(x, bound):
            return 1, step + 1
    rec.maybe(n_steps, x, gamma)
    return 0, n_steps


def cim_integrate(W, x, alpha, p_half, delta, floor, dt, n_steps, bound,
                  record_steps=None, traj=None):
    """RK4 of dx_i/dt = p(t) x_i - x_i^3 + alpha (W x)_i.

    With delta > 0 the manifold-reduction pull
    x_i <- (1 - delta) x_i + delta R sign(x_i), R = mean(x^2), is applied
    after each step; components with |x_i| below the floor are left alone.
    """
    rec = _Recorder(record_steps, traj)
    h = dt / 2.0

    def rhs(xs, p):
        return p * xs - xs ** 3 + alpha * (W @ xs)

    for step in range(n_steps):
        rec.maybe(step, x)
        p0, pm, p1 = p_half[2 * step], p_half[2 * step + 1], p_half[2 * step + 2]
        k1 = rhs(x, p0)
        k2 = rhs(x + h * k1, pm)
        k3 = rhs(x + h * k2, pm)
        k4 = rhs(x + dt * k3, p1)
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if delta > 0.0:
            R = float(np.mean(x * x))
            mask = np.abs(x) > floor
            x[mask] = (1.0 - delta) * x[mask] + delta * R * np.sign(x[mask])
        if _diverged(x, bound):
            return 1, step + 1
    rec.maybe(n_steps, x)
    return 0, n_steps


def meht_integrate(W, x, v, alpha, mass, damping, beta_half, clip, dt, n_steps,
                   bound, record_steps=None, traj=None):
    """Momentum Hopfield-Tank dynamics with tanh activation.

    mass > 0:  dx/dt = v,  m dv/dt = beta(t) x + alpha W tanh(x) - damping v
    mass = 0:  first-order limit  damping dx/dt = beta(t) x + alpha W tanh(x)

    With clip enabled, any |x_i| > 1 is snapped to sign(x_i) after each step.
    """
    rec = _Recorder(record_steps, traj)
    h = dt / 2.0
    first_order = mass == 0.0

    def rhs(xs, vs, beta):
        drive = beta * xs + alpha * (W @ np.tanh(xs))
        if first_order:
            return drive / damping, None
        return vs, (drive - damping * vs) / mass

    for step in range(n_steps):
        rec.maybe(step, x, v)
        b0, bm, b1 = beta_half[2 * step], beta_half[2 * step + 1], beta_half[2 * step + 2]
        k1x, k1v = rhs(x, v, b0)
        if first_order:
            k2x, _ = rhs(x + h * k1x, None, bm)
            k3x, _ = rhs(x + h * k2x, None, bm)
            k4x, _ = rhs(x + dt * k3x, None, b1)
            x += (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        else:
            k2x, k2v = rhs(x + h * k1x, v + h * k1v, bm)
            k3x, k3v = rhs(x + h * k2x, v + h * k2v, bm)
            k4x, k4v = rhs(x + dt * k3x, v + dt * k3v, b1)
            x += (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            v += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if clip:
            mask = np.abs(x) > 1.0
            x[mask] = np.where(x[mask] >= 0.0, 1.0, -1.0)
        if _diverged(x, bound):
            return 1, step + 1
    rec.maybe(n_steps, x, v)
    return 0, n_steps


def _svl_grad(W, theta, A, B):
    return A * np.sin(theta) - B * np.cos(theta) * (W @ np.sin(theta))


def svl_integrate(W, theta, v, alpha, mass, damping, a_half, b_half, noise, dt,
                  n_steps, bound, record_steps=None, traj=None):
    """Spin-vector Langevin dynamics on angles theta with velocities v.

    dtheta/dt = v,  m dv/dt = -damping v - alpha dH/dtheta - xi
    dH/dtheta_i = A(t) sin(theta_i) - B(t) cos(theta_i) (W sin(theta))_i

    noise, when given, holds the pre-scaled increments sigma sqrt(dt) xi per
    step and the update switches from RK4 to Euler-Maruyama.  The divergence
    guard watches the velocities.
    """
    rec = _Recorder(record_steps, traj)
    h = dt / 2.0
    for step in range(n_steps):
        rec.maybe(step, theta, v)
        A0, Am, A1 = a_half[2 * step], a_half[2 * step + 1], a_half[2 * step + 2]
        B0, Bm, B1 = b_half[2 * step], b_half[2 * step + 1], b_half[2 * step + 2]
        if noise is not None:
            fv = -(damping * v + alpha * _svl_grad(W, theta, A0, B0)) / mass
            theta += dt * v
            v += dt * fv + noise[step] / mass
        else:
            k1t = v
            k1v = -(damping * v + alpha * _svl_grad(W, theta, A0, B0)) / mass
            t2, v2 = theta + h * k1t, v + h * k1v
            k2v = -(damping * v2 + alpha * _svl_grad(W, t2, Am, Bm)) / mass
            t3, v3 = theta + h * v2, v + h * k2v
            k3v = -(damping * v3 + alpha * _svl_grad(W, t3, Am, Bm)) / mass
            t4, v4 = theta + dt * v3, v + dt * k3v
            k4v = -(damping * v4 + alpha * _svl_grad(W, t4, A1, B1)) / mass
            theta += (dt / 6.0) * (k1t + 2.0 * v2 + 2.0 * v3 + v4)
            v += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if _diverged(v, bound):
            return 1, step + 1
    rec.maybe(n_steps, theta, v)
    return 0, n_steps
