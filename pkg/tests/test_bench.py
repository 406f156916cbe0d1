import json
import math

import numpy as np
import pytest

import spin_anneal as sa
from spin_anneal.bench import (
    SweepSpec,
    grid_search,
    ground_state_probability,
    quality_improvement,
    random_benchmark,
    run_seed,
    sweep,
    sweep_markers,
    write_sweep_csv,
)
from spin_anneal.solvers import SolverConfig

FAST_CIM = dict(n_steps=2000, eps=0.02)  # shortened pump for test speed


def test_run_seed_stable_and_distinct():
    a = run_seed(7, 1, "visa", 3)
    b = run_seed(7, 1, "visa", 3)
    assert a.entropy == b.entropy
    keys = {tuple(run_seed(7, i, s, r).entropy)
            for i in range(2) for s in ("visa", "cim") for r in range(3)}
    assert len(keys) == 12


def test_gsp_always_succeeding_solver():
    # two ferromagnetically coupled spins: every bfgs start finds the optimum
    cm = sa.CouplingMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
    cfg = SolverConfig(solver="bfgs")
    p = ground_state_probability(cm, cfg, runs=20, reference_energy=-1.0)
    assert p == 1.0


def test_gsp_deterministic_across_threads(mobius8):
    cfg = SolverConfig(solver="cim", p0=-1.6, **FAST_CIM)
    a = ground_state_probability(mobius8, cfg, 30, -5.6, base_seed=5, threads=1)
    b = ground_state_probability(mobius8, cfg, 30, -5.6, base_seed=5, threads=4)
    assert a == b


def test_gsp_validation(mobius8):
    with pytest.raises(sa.ValidationError):
        ground_state_probability(mobius8, SolverConfig(solver="cim"), 0, -5.6)


def test_sweep_spec_validation():
    cfgs = {"cim": SolverConfig(solver="cim")}
    with pytest.raises(sa.ValidationError):
        SweepSpec("mobius", 8, "J", [], cfgs)
    with pytest.raises(sa.ValidationError):
        SweepSpec("mobius", 8, "J", [0.4], {})
    with pytest.raises(sa.ValidationError):
        SweepSpec("mobius", 8, "J", [0.4], {"bogus": SolverConfig(solver="cim")})


def test_sweep_markers_machine_precision():
    spec = SweepSpec("mobius", 8, "J", [0.4],
                     {"cim": SolverConfig(solver="cim")})
    markers = sweep_markers(spec)
    assert markers["J_crit"] == 0.5
    assert markers["J_e"] == 1.0 - math.cos(2.0 * math.pi / 8.0)


def test_sweep_markers_jg_lines():
    spec = SweepSpec("jg", 8, "J", [0.0], {"cim": SolverConfig(solver="cim")},
                     fixed={"G": 0.5, "k": 2})
    markers = sweep_markers(spec)
    # energy line J = 1/2 - G at G = 0.5 crosses at J = 0
    assert markers["energy:E0=E1"] == pytest.approx(0.0, abs=1e-15)
    assert markers["eigenvalue:l4=l5"] == pytest.approx(0.5 - math.sqrt(2) / 2, abs=1e-15)


def test_sweep_rows_and_reference(mobius8):
    spec = SweepSpec("mobius", 8, "J", [0.2, 0.6],
                     {"cim": SolverConfig(solver="cim", **FAST_CIM)},
                     runs_per_point=10, base_seed=3)
    rows, markers = sweep(spec)
    assert len(rows) == 2
    for value, solver, p, runs, ref in rows:
        assert solver == "cim" and runs == 10
        assert 0.0 <= p <= 1.0
        expected = min((value - 2) * 4, -4 - 4 * value)
        assert ref == pytest.approx(expected, abs=1e-12)
    # easy regions: the scalar solver succeeds on both sides of the crossing
    assert rows[0][2] == 1.0 and rows[1][2] == 1.0


def test_sweep_csv_determinism_across_threads(tmp_path, mobius8):
    spec = SweepSpec("mobius", 8, "J", [0.2, 0.4],
                     {"cim": SolverConfig(solver="cim", **FAST_CIM),
                      "bfgs": SolverConfig(solver="bfgs")},
                     runs_per_point=12, base_seed=11)
    rows1, _ = sweep(spec, threads=1)
    rows4, _ = sweep(spec, threads=4)
    p1, p4 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_sweep_csv(p1, rows1)
    write_sweep_csv(p4, rows4)
    assert p1.read_bytes() == p4.read_bytes()
    header = p1.read_text().splitlines()[0]
    assert header == "param,solver,p_gs,runs,reference_energy"


def test_random_benchmark_oracle_gaps():
    solvers = {"cim": SolverConfig(solver="cim", alpha="auto", **FAST_CIM),
               "bfgs": SolverConfig(solver="bfgs")}
    report = random_benchmark("sk", 10, 5, solvers, base_seed=2,
                              reference_mode="oracle")
    assert report.schema == 1
    assert len(report.records) == 10
    for r in report.records:
        assert r.proximity_gap is not None
        assert r.proximity_gap <= 1.0 + 1e-12
        opt = abs(r.best_energy - r.reference_energy) < 1e-9
        assert opt == (abs(r.proximity_gap - 1.0) < 1e-12)


def test_random_benchmark_best_found_and_improvements():
    solvers = {"visa": SolverConfig(solver="visa", coupling_scale="auto",
                                    p_rate=0.5 / 200, n_steps=2000),
               "cim": SolverConfig(solver="cim", alpha="auto", **FAST_CIM)}
    report = random_benchmark("3reg", 12, 3, solvers, base_seed=4,
                              reference_mode="best_found")
    for r in report.records:
        assert r.proximity_gap <= 1.0 + 1e-12
    assert len(report.quality_improvements) == 3
    payload = json.loads(report.to_json())
    assert payload["schema"] == 1
    assert payload["objective_convention"] == "negated_ising_energy"


def test_random_benchmark_threads_deterministic():
    solvers = {"bfgs": SolverConfig(solver="bfgs")}
    a = random_benchmark("sk", 8, 4, solvers, base_seed=6, reference_mode="oracle")
    b = random_benchmark("sk", 8, 4, solvers, base_seed=6, reference_mode="oracle",
                         threads=3)
    for ra, rb in zip(a.records, b.records):
        assert (ra.instance_id, ra.solver, ra.best_energy) == (rb.instance_id, rb.solver, rb.best_energy)


def test_random_benchmark_validation(tmp_path):
    cfgs = {"bfgs": SolverConfig(solver="bfgs")}
    with pytest.raises(sa.ValidationError):
        random_benchmark("sk", 30, 2, cfgs, reference_mode="oracle")
    with pytest.raises(sa.ValidationError):
        random_benchmark("sk", 8, 2, cfgs, reference_mode="file")
    ref = tmp_path / "refs.json"
    ref.write_text(json.dumps({"0": -5.0}))
    with pytest.raises(sa.ValidationError):
        random_benchmark("sk", 8, 2, cfgs, reference_mode="file", reference_file=ref)


def test_easy_hard_easy_transition_on_jg_line():
    # k=2, G=0.5: the scalar pump solver succeeds outside the
    # eigenvalue-mismatch band and collapses inside it
    probs = {}
    for J in (-0.45, -0.1, 0.3):
        cm = sa.jg_cyclic(8, J, 0.5, 2)
        _, ref = sa.brute_force_ground(cm)
        cfg = SolverConfig(solver="cim", eps=0.003, p0=J - 2.0, alpha=1.0,
                           n_steps=15000)
        probs[J] = ground_state_probability(cm, cfg, 40, ref, base_seed=7)
    assert probs[-0.45] >= 0.9
    assert probs[-0.1] <= 0.1
    assert probs[0.3] >= 0.9


def test_quality_improvement_arithmetic():
    assert quality_improvement(10.0, 9.0) == pytest.approx(0.1)
    assert quality_improvement(5.0, 5.0) == 0.0
    assert quality_improvement(10.0, 11.0) < 0.0
    assert math.isnan(quality_improvement(0.0, 1.0))


def test_grid_search(mobius8):
    base = SolverConfig(solver="cim", p0=-1.8, **FAST_CIM)
    table = grid_search(mobius8, base, "p0", [-1.8, -1.6], runs=5,
                        reference_energy=-6.4, base_seed=1)
    assert len(table) == 2
    assert all(0.0 <= p <= 1.0 for _, p in table)
