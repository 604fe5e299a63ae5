import math

import numpy as np
import pytest

import entlab


def test_entropies_and_norms():
    rho = np.eye(4) / 4.0
    assert entlab.von_neumann_entropy(rho) == pytest.approx(math.log(4.0), abs=1e-12)
    assert entlab.binary_entropy(0.5) == pytest.approx(math.log(2.0), abs=1e-12)
    z = entlab.pauli("Z")
    assert entlab.trace_norm(z) == pytest.approx(2.0, abs=1e-12)
    assert entlab.operator_norm(z) == pytest.approx(1.0, abs=1e-12)


def test_tensor_structure_and_reduction():
    x = entlab.pauli("X")
    z = entlab.pauli("Z")
    xz = entlab.tensor_product(x, z)
    assert xz.shape == (4, 4)
    bell = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / math.sqrt(2.0)
    rho_a = entlab.reduced_density(bell, [2, 2], [0])
    assert np.allclose(rho_a, np.eye(2) / 2.0)
    assert entlab.subsystem_entropy(bell, [2, 2], [0]) == pytest.approx(
        math.log(2.0), abs=1e-12
    )


def test_seeded_rng_reproducible():
    a = entlab.Rng(3).hermitian(4, True)
    b = entlab.Rng(3).hermitian(4, True)
    assert np.array_equal(a, b)
    rho = entlab.Rng(5).density(6, 6)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)


def test_commutator_ratio_scan():
    report = entlab.ratio_scan([2, 4], [0.5, 0.1], samples=25, seed=7)
    assert len(report["cells"]) == 4
    assert report["hard_violations"] == 0
    assert report["global_max"] <= report["soft_c"]
    w = report["witness"]
    assert w["a"].shape == (w["dim"], w["dim"])


def test_rates_cross_check():
    rng = entlab.Rng(11)
    psi = rng.pure_state(9)
    h = rng.hermitian(9, True)
    gamma = entlab.entangling_rate(psi, [1, 3, 3, 1], h)
    ens = entlab.entangling_extension(psi, [3, 3])
    assert 9.0 * entlab.mixing_rate(ens, h) == pytest.approx(gamma, abs=1e-9)


def test_optimizer_reaches_known_value():
    h = entlab.tensor_product(entlab.pauli("Z"), entlab.pauli("Z"))
    best = entlab.maximize_entangling_rate([1, 2, 2, 1], h, restarts=6, seed=2)
    assert best["value"] / math.log(2.0) >= 1.85
    assert best["value"] <= entlab.incremental_entangling_factor(2.0)


def test_lattice_and_boundary():
    t = entlab.Torus(1, 10)
    assert t.site_count() == 10
    assert t.distance(0, 7) == 3
    region = entlab.parse_region(t, "0..4")
    assert entlab.boundary_and_area(t, region)["area"] == 2
    profile = entlab.boundary_profile(t, region)
    assert all(c <= cap for c, cap in zip(profile["counts"], profile["cap"]))


def test_hamiltonian_presets_and_gap():
    t = entlab.Torus(1, 4)
    pot = entlab.preset_potential("tfim", t, j=1.0, g=2.0)
    h = pot.assemble()
    assert np.allclose(h, h.conj().T)
    gap = entlab.spectral_gap(h)
    assert gap["gap"] > 0.5
    assert entlab.interaction_strength(pot, 1.0) == pytest.approx(
        2.0 + 4.0 * math.e, abs=1e-12
    )


def test_light_cone_scan_clean():
    t = entlab.Torus(1, 6)
    pot = entlab.preset_potential("tfim", t, j=1.0, g=2.0)
    grid = [0.05 * k for k in range(5)]
    report = entlab.lr_check(pot, [0], entlab.pauli("X"), [3], entlab.pauli("Z"), grid, 1.0)
    assert report["dist"] == 3
    assert report["violations"] == 0
    assert report["max_ratio"] <= 1.0


def test_filter_and_transport():
    f = entlab.build_filter(1.0, 6.0)
    assert f.weight(2.0) == pytest.approx(-0.5, abs=1e-15)
    assert f.weight(0.0) == 0.0
    assert f.time_profile(0.0) == 0.0

    path = entlab.tfim_path(entlab.Torus(1, 4), 1.0, 2.0, 1.5)
    result = entlab.transport(path, f, [0, 1], steps=16)
    assert not result["aborted"]
    assert result["fidelity_final"] >= 0.999
    assert result["rate_violations"] == 0
    assert abs(result["entropy_change"]) <= result["constant_c"] * result["area"]


def test_fermion_mapping():
    c0 = entlab.jw_annihilator(3, 0)
    c2 = entlab.jw_annihilator(3, 2)
    anti = c0 @ c2.conj().T + c2.conj().T @ c0
    assert np.linalg.norm(anti) <= 1e-14
    h = entlab.hopping_hamiltonian(4, [(0, 1), (1, 2), (2, 3)], 1.0)
    vals, _ = entlab.eigh(h)
    assert vals[0] == pytest.approx(-math.sqrt(5.0), abs=1e-10)


def test_errors_surface_as_lab_error():
    with pytest.raises(entlab.LabError):
        entlab.build_filter(1.0, 500.0)
    with pytest.raises(entlab.LabError):
        entlab.Torus(0, 4)
