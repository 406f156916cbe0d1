import math

import numpy as np
import pytest

import spin_anneal as sa

SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# graph constructors
# ---------------------------------------------------------------------------

def test_mobius_row_structure():
    cm = sa.mobius_ladder(8, 0.4)
    row = cm.weights[0]
    assert row[1] == -1.0 and row[7] == -1.0
    assert row[4] == -0.4
    assert np.all(row[[0, 2, 3, 5, 6]] == 0.0)


def test_mobius_4cycle_at_zero_cross():
    cm = sa.mobius_ladder(4, 0.0)
    deg = (cm.weights != 0).sum(axis=1)
    assert np.all(deg == 2)
    assert np.all(cm.weights[cm.weights != 0] == -1.0)


def test_mobius_uniform_antiferromagnet():
    cm = sa.mobius_ladder(8, 1.0)
    deg = (cm.weights != 0).sum(axis=1)
    assert np.all(deg == 3)
    assert np.all(cm.weights[cm.weights != 0] == -1.0)


def test_mobius_validation():
    with pytest.raises(sa.ValidationError):
        sa.mobius_ladder(7, 0.5)
    with pytest.raises(sa.ValidationError):
        sa.mobius_ladder(2, 0.5)


def test_jg_zero_g_degenerates_to_mobius():
    a = sa.jg_cyclic(8, 0.3, 0.0, 2)
    b = sa.mobius_ladder(8, 0.3)
    assert np.array_equal(a.weights, b.weights)


def test_jg_vertex_neighborhood():
    cm = sa.jg_cyclic(8, 0.5, 0.5, 2)
    row = cm.weights[0]
    assert row[1] == -1.0 and row[7] == -1.0
    assert row[2] == -0.5 and row[6] == -0.5
    assert row[4] == -0.5
    assert row[3] == 0.0 and row[5] == 0.0
    deg = (cm.weights != 0).sum(axis=1)
    assert np.all(deg == 5)


def test_jg_k_validation():
    with pytest.raises(sa.ValidationError):
        sa.jg_cyclic(8, 0.1, 0.1, 5)
    with pytest.raises(sa.ValidationError):
        sa.jg_cyclic(8, 0.1, 0.1, 1)


def test_sk_deterministic_and_symmetric():
    a = sa.sk_instance(100, seed=7)
    b = sa.sk_instance(100, seed=7)
    assert np.array_equal(a.weights, b.weights)
    assert np.array_equal(a.weights, a.weights.T)
    assert np.all(np.diag(a.weights) == 0.0)


def test_sk_mean_bound():
    n = 100
    cm = sa.sk_instance(n, seed=3)
    iu = np.triu_indices(n, k=1)
    vals = cm.weights[iu]
    assert abs(vals.mean()) < 4.0 / math.sqrt(n * (n - 1) / 2)


def test_sk_two_spins():
    cm = sa.sk_instance(2, seed=5)
    assert cm.weights[0, 1] == cm.weights[1, 0] != 0.0


def test_three_regular_degree_and_determinism():
    a = sa.three_regular_instance(100, seed=11)
    b = sa.three_regular_instance(100, seed=11)
    assert np.array_equal(a.weights, b.weights)
    assert np.all((a.weights != 0).sum(axis=1) == 3)


def test_three_regular_n4_is_k4():
    cm = sa.three_regular_instance(4, seed=2)
    assert np.all((cm.weights != 0).sum(axis=1) == 3)
    # only 3-regular simple graph on 4 vertices is the complete graph
    off = cm.weights[np.triu_indices(4, k=1)]
    assert np.all(off != 0.0)


# ---------------------------------------------------------------------------
# spectra and closed forms
# ---------------------------------------------------------------------------

def test_circulant_eigenvalues_mobius():
    cm = sa.mobius_ladder(8, 0.4)
    lam = sa.circulant_eigenvalues(cm.weights[0])
    assert lam[3] == pytest.approx(2.0 - 0.4, abs=1e-14)        # mode 4
    assert lam[2] == pytest.approx(SQRT2 + 0.4, abs=1e-12)      # mode 3


def test_circulant_eigenvalues_zero_row():
    assert np.all(sa.circulant_eigenvalues(np.zeros(6)) == 0.0)


def test_circulant_matches_dense_spectrum(rng):
    for n in (8, 12, 16, 32, 64):
        for _ in range(5):
            J, G = rng.uniform(-1, 1, 2)
            k = int(rng.integers(2, n // 2))
            cm = sa.jg_cyclic(n, J, G, k)
            lam = np.sort(sa.circulant_eigenvalues(cm.weights[0]))
            dense = np.sort(np.linalg.eigvalsh(cm.weights))
            assert np.max(np.abs(lam - dense)) < 1e-10


def test_mobius_thresholds():
    th = sa.mobius_thresholds(8)
    assert th["J_crit"] == 0.5
    assert th["J_e"] == pytest.approx(1.0 - SQRT2 / 2.0, abs=1e-15)
    with pytest.raises(sa.ValidationError):
        sa.mobius_thresholds(10)  # n/2 odd


def test_thresholds_ordering_large_n():
    for n in range(8, 129, 4):
        th = sa.mobius_thresholds(n)
        assert 0.0 < th["J_e"] < th["J_crit"]
    assert sa.mobius_thresholds(128)["J_e"] < 0.01


def test_eigenvalue_gap():
    assert sa.eigenvalue_gap(8, 0.4) == pytest.approx(SQRT2 - 1.2, abs=1e-14)
    assert sa.eigenvalue_gap(8, 1.0 - SQRT2 / 2.0) == pytest.approx(0.0, abs=1e-14)
    assert sa.eigenvalue_gap(8, 0.45) == pytest.approx(SQRT2 - 1.1, abs=1e-14)


def test_gap_sign_matches_threshold(rng):
    th = sa.mobius_thresholds(8)
    for J in rng.uniform(0, 1, 50):
        gap = sa.eigenvalue_gap(8, J)
        assert np.sign(gap) == np.sign(J - th["J_e"]) or gap == 0.0


def test_gap_equals_spectral_difference(rng):
    for J in rng.uniform(0, 1, 10):
        lam = sa.circulant_eigenvalues(sa.mobius_ladder(8, J).weights[0])
        assert sa.eigenvalue_gap(8, J) == pytest.approx(lam[2] - lam[3], abs=1e-12)


def test_reference_energies_examples():
    e = sa.jg_reference_energies(8, 0.5, 0.5, 2)
    assert e["E1"] == pytest.approx(-6.0, abs=1e-13)
    e = sa.jg_reference_energies(8, 0.5, 0.0, 2)
    assert e["E0"] == pytest.approx(-6.0, abs=1e-13)
    assert e["E0"] == pytest.approx(e["E1"], abs=1e-13)  # crossing at J_crit


def test_reference_energies_match_direct_evaluation(rng):
    for k in (2, 3):
        for _ in range(100):
            J, G = rng.uniform(-1, 1, 2)
            cm = sa.jg_cyclic(8, J, G, k)
            e = sa.jg_reference_energies(8, J, G, k)
            for i in range(4):
                s = sa.reference_states(8, f"S{i}")
                assert abs(e[f"E{i}"] - sa.ising_energy(cm, s)) < 1e-12


def test_mobius_e0_matches_oracle(rng):
    for J in (0.2, 0.4, 0.6):
        cm = sa.mobius_ladder(8, J)
        _, ground = sa.brute_force_ground(cm)
        e0 = (J - 2.0) * 4.0
        e1 = -4.0 - 4.0 * J
        assert ground == pytest.approx(min(e0, e1), abs=1e-12)


def test_boundaries_k2():
    lines = sa.jg_boundaries(2)
    kinds = {(l.kind, l.label) for l in lines}
    assert ("energy", "E0=E2") in kinds
    g_half = [l for l in lines if l.kind == "energy" and l.label == "E0=E2"][0]
    assert g_half.a == 0.0 and g_half.b == 1.0 and g_half.c == 0.5


def test_boundaries_k3_includes_j_zero():
    lines = sa.jg_boundaries(3)
    jz = [l for l in lines if l.label == "E1=E3"][0]
    assert jz.a == 1.0 and jz.b == 0.0 and jz.c == 0.0
    with pytest.raises(sa.ValidationError):
        sa.jg_boundaries(4)


def test_boundary_point_energy_crossing():
    # (J, G) = (0, 0.5) lies on the k=2 energy boundary E0 = E2
    e = sa.jg_reference_energies(8, 0.0, 0.5, 2)
    assert abs(e["E0"] - e["E2"]) < 1e-12


def test_energy_boundaries_reproduce_crossings(rng):
    # points on each energy line have the corresponding closed forms equal
    for k in (2, 3):
        for line in sa.jg_boundaries(k):
            if line.kind != "energy":
                continue
            a_lab, b_lab = line.label.split("=")
            for _ in range(5):
                if line.a != 0.0:
                    G = float(rng.uniform(-1, 1))
                    J = (line.c - line.b * G) / line.a
                else:
                    J = float(rng.uniform(-1, 1))
                    G = line.c / line.b
                e = sa.jg_reference_energies(8, J, G, k)
                assert abs(e[a_lab] - e[b_lab]) < 1e-10


def test_eigenvalue_boundaries_reproduce_crossings():
    # n=8, k=2: modes 4, 5, 6 from the closed form
    def lam(n_mode, J, G, k):
        return (-2.0 * math.cos(2 * math.pi * n_mode / 8) - J * (-1.0) ** n_mode
                - 2.0 * G * math.cos(2 * math.pi * k * n_mode / 8))
    for line, pair in [(("eigenvalue", "l4=l5"), (4, 5)),
                       (("eigenvalue", "l5=l6"), (5, 6)),
                       (("eigenvalue", "l4=l6"), (4, 6))]:
        bl = [l for l in sa.jg_boundaries(2) if (l.kind, l.label) == line][0]
        G = 0.25 if bl.a != 0.0 else bl.c / bl.b
        J = (bl.c - bl.b * G) / bl.a if bl.a != 0.0 else 0.3
        assert lam(pair[0], J, G, 2) == pytest.approx(lam(pair[1], J, G, 2), abs=1e-12)


# ---------------------------------------------------------------------------
# invariants and file format
# ---------------------------------------------------------------------------

def test_generators_exactly_symmetric():
    mats = [
        sa.mobius_ladder(12, 0.7),
        sa.jg_cyclic(12, -0.3, 0.8, 4),
        sa.sk_instance(30, seed=1),
        sa.three_regular_instance(30, seed=1),
    ]
    for cm in mats:
        assert np.array_equal(cm.weights, cm.weights.T)
        assert np.all(np.diag(cm.weights) == 0.0)


def test_coupling_matrix_validation():
    with pytest.raises(sa.ValidationError):
        sa.CouplingMatrix(np.array([[0.0, 1.0], [0.5, 0.0]]))
    with pytest.raises(sa.ValidationError):
        sa.CouplingMatrix(np.array([[1.0, 0.5], [0.5, 0.0]]))


def test_matrix_file_roundtrip(tmp_path):
    cm = sa.sk_instance(12, seed=9)
    cm.field[3] = 0.25
    path = tmp_path / "m.txt"
    sa.save_coupling(path, cm)
    back = sa.load_coupling(path)
    assert np.array_equal(back.weights, cm.weights)
    assert np.array_equal(back.field, cm.field)


def test_matrix_file_validation(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("N 4\n0 0 1.0\n")
    with pytest.raises(sa.ValidationError):
        sa.load_coupling(p)
    p.write_text("N 4\n0 1 1.0\n0 1 2.0\n")
    with pytest.raises(sa.ValidationError):
        sa.load_coupling(p)
    p.write_text("hello\n")
    with pytest.raises(sa.ValidationError):
        sa.load_coupling(p)
