import numpy as np
import pytest

import spin_anneal as sa
from spin_anneal.solvers import (
    SolverConfig,
    bfgs_relaxation_energy,
    bfgs_relaxation_grad,
    cim_energy,
    meht_energy,
    svl_hamiltonian,
    visa_energy,
    visa_rhs,
)


def fd_grad(f, x, h=1e-6):
    g = np.zeros_like(x)
    for idx in np.ndindex(*x.shape):
        xp, xm = x.copy(), x.copy()
        xp[idx] += h
        xm[idx] -= h
        g[idx] = (f(xp) - f(xm)) / (2 * h)
    return g


# ---------------------------------------------------------------------------
# vector annealer energy / gradient
# ---------------------------------------------------------------------------

def test_visa_energy_origin(mobius8):
    e = visa_energy(np.zeros((8, 3)), -0.5, 1.0, 4.0, mobius8)
    assert e == pytest.approx(2.0, abs=1e-14)


def test_visa_energy_two_spin_minimizer():
    cm = sa.CouplingMatrix(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    x1 = np.array([1.0, -1.0, 0.0]) / np.sqrt(2)
    X = np.vstack([x1, -x1])
    e = visa_energy(X, 1.0, 0.7, 4.0, cm)
    assert e == pytest.approx(-1.0, abs=1e-14)


def test_visa_energy_collinear_no_penalty(mobius8, rng):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    amps = rng.uniform(-2, 2, 8)
    X = amps[:, None] * axis
    e0 = visa_energy(X, 0.3, 0.0, 4.0, mobius8)
    e1 = visa_energy(X, 0.3, 5.0, 4.0, mobius8)
    assert e0 == pytest.approx(e1, abs=1e-12)


def test_visa_rhs_matches_finite_differences(mobius8, rng):
    for _ in range(5):
        X = rng.uniform(-1, 1, (8, 3))
        gam = rng.uniform(-0.5, 1.0, 8)
        P = rng.uniform(0.0, 2.0)
        r = visa_rhs(X, gam, P, 4.0, mobius8)
        fd = -fd_grad(lambda y: visa_energy(y, gam, P, 4.0, mobius8), X)
        assert np.max(np.abs(r - fd)) / np.max(np.abs(fd)) < 1e-6


def test_visa_rhs_zero_at_origin(mobius8):
    assert np.all(visa_rhs(np.zeros((8, 3)), -0.5, 0.3, 4.0, mobius8) == 0.0)


def test_visa_planar_invariance(mobius8, rng):
    # without the penalty, a state confined to one component stays there
    X = np.zeros((8, 3))
    X[:, 0] = rng.uniform(-1, 1, 8)
    r = visa_rhs(X, 0.2, 0.0, 4.0, mobius8)
    assert np.all(r[:, 1:] == 0.0)


def test_visa_run_embedding_consistency(mobius8, rng):
    # planar init with P = 0 never leaves the first component
    x0 = np.zeros((8, 3))
    x0[:, 0] = rng.uniform(-0.01, 0.01, 8)
    cfg = SolverConfig(solver="visa", p_rate=0.0, n_steps=500, seed=0)
    r = sa.visa_run(mobius8, cfg, x0=x0, reference_energy=None)
    assert r.trajectory is None
    cfg = cfg.with_updates(traj_stride=500)
    r = sa.visa_run(mobius8, cfg, x0=x0)
    final = r.trajectory.states[-1][:24].reshape(8, 3)
    assert np.all(final[:, 1:] == 0.0)


def test_visa_matched_init_keeps_transverse_equality(mobius8):
    cfg = SolverConfig(solver="visa", init_mode="matched", n_steps=300,
                       seed=5, traj_stride=300)
    r = sa.visa_run(mobius8, cfg)
    final = r.trajectory.states[-1][:24].reshape(8, 3)
    assert np.array_equal(final[:, 1], final[:, 2])


def test_visa_run_feedback_convergence(mobius8):
    cfg = SolverConfig(solver="visa", n_steps=5000, p_rate=0.002, seed=2,
                       traj_stride=5000)
    r = sa.visa_run(mobius8, cfg)
    X = r.trajectory.states[-1][:24].reshape(8, 3)
    sq = np.einsum("ij,ij->i", X, X)
    assert np.max(np.abs(1.0 - sq)) <= 0.05


def test_visa_run_collinear_at_ramp_end(mobius8):
    cfg = SolverConfig(solver="visa", n_steps=5000, p_rate=0.002, seed=2,
                       traj_stride=5000)
    r = sa.visa_run(mobius8, cfg)
    X = r.trajectory.states[-1][:24].reshape(8, 3)
    norms = np.linalg.norm(X, axis=1)
    U = X / norms[:, None]
    cross = np.abs(np.sin(np.arccos(np.clip(np.abs(U @ U.T), 0, 1))))
    assert np.max(cross) <= 0.1


def test_visa_run_deterministic(mobius8):
    cfg = SolverConfig(solver="visa", n_steps=500, seed=11)
    a = sa.visa_run(mobius8, cfg)
    b = sa.visa_run(mobius8, cfg)
    assert a.energy == b.energy
    assert np.array_equal(a.spins, b.spins)


def test_visa_divergence_guard(mobius8):
    cfg = SolverConfig(solver="visa", p_rate=1.0, n_steps=4000, seed=0)
    with pytest.raises(sa.DivergenceError):
        sa.visa_run(mobius8, cfg)


# ---------------------------------------------------------------------------
# scalar pump solvers
# ---------------------------------------------------------------------------

def test_cim_decoupled_pitchfork():
    cm = sa.CouplingMatrix(np.zeros((6, 6)))
    cfg = SolverConfig(solver="cim", seed=3, n_steps=15000)
    r = sa.cim_run(cm, cfg, x0=np.linspace(-0.01, 0.01, 6) + 0.003)
    # p(T) ~ 1, so each amplitude sits near +-sqrt(p) = +-1
    assert r.trajectory is None
    cfg = cfg.with_updates(traj_stride=15000)
    r = sa.cim_run(cm, cfg, x0=np.linspace(-0.01, 0.01, 6) + 0.003)
    x = r.trajectory.states[-1]
    assert np.allclose(np.abs(x), 1.0, atol=0.01)


def test_cim_energy_nonincreasing_frozen_pump(mobius8):
    # p0 = 1 makes the tanh pump exactly constant
    cfg = SolverConfig(solver="cim", p0=1.0, n_steps=2000, seed=4,
                       init_scale=0.5, traj_stride=1)
    r = sa.cim_run(mobius8, cfg)
    e = np.array([cim_energy(row, 1.0, 1.0, mobius8) for row in r.trajectory.states])
    assert np.max(np.diff(e)) <= 1e-8


def test_cim_trap_in_hard_region():
    cm = sa.mobius_ladder(8, 0.35)
    trapped = 0
    for seed in range(20):
        cfg = SolverConfig(solver="cim", p0=0.35 - 2.0, seed=seed)
        r = sa.cim_run(cm, cfg)
        trapped += abs(r.energy - (-4 - 4 * 0.35)) < 1e-9
    assert trapped >= 18


def test_mrcim_unit_amplitudes_fixed_point():
    cm = sa.CouplingMatrix(np.zeros((4, 4)))
    x0 = np.array([1.0, -1.0, 1.0, 1.0])
    cfg = SolverConfig(solver="mrcim", p0=1.0, delta=0.3, n_steps=1, seed=0,
                       traj_stride=1)
    r = sa.mr_cim_run(cm, cfg, x0=x0)
    assert np.allclose(r.trajectory.states[-1], x0, atol=1e-12)


def test_mrcim_printed_map_contracts_spread():
    x = np.array([2.0, 0.5])
    R = np.mean(x ** 2)
    for delta in (0.1, 0.5, 0.9):
        mapped = (1 - delta) * x + delta * R * np.sign(x)
        assert abs(mapped[0]) - abs(mapped[1]) < abs(x[0]) - abs(x[1])


def test_mrcim_delta_to_zero_matches_cim(mobius8):
    base = dict(p0=-1.6, n_steps=200, seed=6, traj_stride=200)
    r_cim = sa.cim_run(mobius8, SolverConfig(solver="cim", **base))
    r_mr = sa.mr_cim_run(mobius8, SolverConfig(solver="mrcim", delta=1e-6, **base))
    a = r_cim.trajectory.states[-1]
    b = r_mr.trajectory.states[-1]
    assert np.max(np.abs(a - b)) < 1e-3


def test_mrcim_delta_validation():
    with pytest.raises(sa.ValidationError):
        SolverConfig(solver="mrcim", delta=1.5)


# ---------------------------------------------------------------------------
# momentum Hopfield-Tank
# ---------------------------------------------------------------------------

def test_meht_finds_uniform_ladder_ground():
    cm = sa.mobius_ladder(8, 1.0)
    cfg = SolverConfig(solver="meht", mass=1.0, damping=0.7, beta0=1.5,
                       n_steps=1000, seed=1)
    r = sa.me_ht_run(cm, cfg)
    assert r.energy == pytest.approx(-8.0, abs=1e-12)


def test_meht_free_decay():
    # no anti-damping, no couplings: forces vanish, so the motion is pure
    # dissipation; velocities decay and positions drift by at most v0/damping
    cm = sa.CouplingMatrix(np.zeros((5, 5)))
    cfg = SolverConfig(solver="meht", beta0=0.0, n_steps=2000, seed=2,
                       damping=0.7, init_scale=0.5, traj_stride=2000)
    v0 = np.full(5, 0.3)
    r = sa.me_ht_run(cm, cfg, v0=v0)
    x, v = r.trajectory.states[-1][:5], r.trajectory.states[-1][5:]
    assert np.max(np.abs(v)) < 1e-12
    x0 = sa.solvers.make_rng(2).uniform(-0.5, 0.5, 5)
    assert np.allclose(x, x0 + v0 / 0.7, atol=1e-9)


def test_meht_small_mass_approaches_first_order(mobius8):
    # overdamped limit: m << damping makes the velocity slave to the drive,
    # approaching the first-order flow linearly in m on a smooth segment
    # (dt shrinks with m to keep the fast velocity relaxation stable)
    x0 = sa.solvers.make_rng(3).uniform(-0.3, 0.3, 8)
    kw = dict(damping=1.0, beta0=1.0, seed=3, clip=False)
    r0 = sa.me_ht_run(mobius8, SolverConfig(
        solver="meht", mass=0.0, n_steps=100, dt=0.01, traj_stride=100, **kw), x0=x0)
    a = r0.trajectory.states[-1][:8]
    devs = []
    for m, dt in ((0.01, 0.001), (0.003, 0.0003)):
        steps = int(round(1.0 / dt))
        r1 = sa.me_ht_run(mobius8, SolverConfig(
            solver="meht", mass=m, n_steps=steps, dt=dt, traj_stride=steps, **kw), x0=x0)
        devs.append(np.max(np.abs(a - r1.trajectory.states[-1][:8])))
    assert devs[1] < devs[0]
    assert devs[1] / np.max(np.abs(a)) < 0.03


def test_meht_first_order_energy_monotone(mobius8):
    cfg = SolverConfig(solver="meht", mass=0.0, beta0=0.0, damping=0.7,
                       n_steps=1000, seed=5, clip=False, init_scale=0.3,
                       traj_stride=1)
    r = sa.me_ht_run(mobius8, cfg)
    alpha = 2.5 / mobius8.lambda_max()
    e = np.array([meht_energy(row[:8], None, 0.0, alpha, 0.0, mobius8)
                  for row in r.trajectory.states])
    assert np.max(np.diff(e)) <= 1e-8


def test_meht_clipping_bounds_amplitudes():
    cm = sa.mobius_ladder(8, 1.0)
    cfg = SolverConfig(solver="meht", n_steps=500, seed=7, traj_stride=1)
    r = sa.me_ht_run(cm, cfg)
    xs = r.trajectory.states[:, :8]
    assert np.max(np.abs(xs)) <= 1.0 + 1e-12


# ---------------------------------------------------------------------------
# spin-vector Langevin
# ---------------------------------------------------------------------------

def test_svl_gradient_stationary_at_zero():
    theta = np.zeros(8)
    # A=1, B=0: gradient reduces to A sin(theta) = 0 at theta = 0
    cm = sa.mobius_ladder(8, 1.0)
    g = 1.0 * np.sin(theta) - 0.0 * np.cos(theta) * (cm.weights @ np.sin(theta))
    assert np.all(g == 0.0)


def test_svl_noiseless_anneal_trace():
    cm = sa.mobius_ladder(8, 1.0)
    cfg = SolverConfig(solver="svl", sigma=0.0, damping=1.0, n_steps=1000,
                       seed=4, traj_stride=20)
    r = sa.svl_run(cm, cfg)
    assert r.energy == pytest.approx(-8.0, abs=1e-12)
    h = r.trajectory.solver_energies
    assert h[0] > h.min()               # decreases initially
    assert np.any(np.diff(h) > 0)       # rises mid-anneal
    assert h[-1] == pytest.approx(-8.0, abs=0.01)


def test_svl_seeded_noise_reproducible():
    cm = sa.mobius_ladder(8, 0.5)
    cfg = SolverConfig(solver="svl", sigma=0.1, seed=9, n_steps=400)
    a = sa.svl_run(cm, cfg)
    b = sa.svl_run(cm, cfg)
    assert np.array_equal(a.spins, b.spins) and a.energy == b.energy


def test_svl_interpolated_hamiltonian_endpoints():
    cm = sa.mobius_ladder(8, 1.0)
    theta = np.full(8, 0.0)
    assert svl_hamiltonian(theta, 1.0, 0.0, cm) == pytest.approx(-8.0)
    s1 = sa.reference_states(8, "S1").astype(float)
    theta = np.pi / 2 * s1
    assert svl_hamiltonian(theta, 0.0, 1.0, cm) == pytest.approx(-8.0, abs=1e-12)


# ---------------------------------------------------------------------------
# quasi-Newton baseline
# ---------------------------------------------------------------------------

def test_bfgs_decoupled_wells():
    cm = sa.CouplingMatrix(np.zeros((10, 10)))
    r = sa.bfgs_run(cm, SolverConfig(solver="bfgs", seed=3))
    assert r.energy == 0.0
    assert set(np.unique(r.spins)) <= {-1, 1}


def test_bfgs_gradient_matches_fd(rng):
    cm = sa.sk_instance(6, seed=8)
    x = rng.uniform(-1, 1, 6)
    g = bfgs_relaxation_grad(x, cm)
    fd = fd_grad(lambda y: bfgs_relaxation_energy(y, cm), x)
    assert np.max(np.abs(g - fd)) / np.max(np.abs(fd)) < 1e-6


def test_bfgs_deterministic():
    cm = sa.sk_instance(10, seed=2)
    a = sa.bfgs_run(cm, SolverConfig(solver="bfgs", seed=5))
    b = sa.bfgs_run(cm, SolverConfig(solver="bfgs", seed=5))
    assert a.energy == b.energy


# ---------------------------------------------------------------------------
# shared contract
# ---------------------------------------------------------------------------

def test_result_energy_matches_spins(mobius8):
    for solver in ("visa", "cim", "mrcim", "meht", "svl", "bfgs"):
        cfg = SolverConfig(solver=solver, seed=1, n_steps=200)
        r = sa.run(mobius8, cfg)
        assert r.energy == sa.ising_energy(mobius8, r.spins)
        assert r.solver == solver


def test_success_flag(mobius8):
    cfg = SolverConfig(solver="cim", p0=0.4 - 2.0, seed=0)
    r = sa.cim_run(mobius8, cfg, reference_energy=-5.6)
    assert r.success is True
    r = sa.cim_run(mobius8, cfg, reference_energy=-6.4)
    assert r.success is False
    r = sa.cim_run(mobius8, cfg)
    assert r.success is None


def test_config_validation():
    with pytest.raises(sa.ValidationError):
        SolverConfig(solver="nope")
    with pytest.raises(sa.ValidationError):
        SolverConfig(solver="visa", dt=0.0)
    with pytest.raises(sa.ValidationError):
        SolverConfig(solver="svl", sigma=-1.0)
    with pytest.raises(sa.ValidationError):
        SolverConfig(solver="svl", mass=0.0)


def test_visa_frozen_energy_monotone(mobius8):
    # eps = 0 and zero ramp freeze the schedules; gradient flow then
    # dissipates the soft-spin energy monotonically
    from spin_anneal import backend
    from spin_anneal.solvers import make_rng
    rng = make_rng(10)
    x = rng.uniform(-0.5, 0.5, (8, 3))
    gam = np.full(8, 0.5)
    steps = 2000
    p_half = np.full(2 * steps + 1, 0.5)
    rec = np.arange(steps + 1, dtype=np.int64)
    traj = np.empty((steps + 1, 32))
    status, _ = backend.visa_integrate(mobius8.weights, x, gam, 4.0, 0.0,
                                       p_half, 0.1, steps, 1e3, rec, traj)
    assert status == 0
    e = np.array([visa_energy(row[:24].reshape(8, 3), row[24:], 0.5, 4.0, mobius8)
                  for row in traj])
    assert np.max(np.diff(e)) <= 1e-8
