"""Entropy, concurrence, classical correlation and discord checks.

Expected values are either hand-derived (binary entropies, pure-state
concurrence 2|c1 c2|, Werner-state concurrence) or exact by construction
(Bell states, classical mixtures, product states).
"""

import numpy as np
import pytest

from cavityqed.linalg import partial_trace
from cavityqed.measures import (
    CorrelationReport,
    classical_correlation,
    concurrence,
    conditional_ensemble,
    discord,
    mutual_information,
    projective_basis,
    von_neumann_entropy,
)


def binary_entropy(p):
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p)


def alpha_state(alpha):
    """cos(a)|01> + sin(a)|10> as a density matrix."""
    v = np.zeros(4, dtype=complex)
    v[1], v[2] = np.cos(alpha), np.sin(alpha)
    return np.outer(v, v.conj())


BELL = alpha_state(np.pi / 4)
CLASSICAL_MIX = np.diag([0.5, 0.0, 0.0, 0.5]).astype(complex)


def random_density(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# --------------------------------------------------------------------------
# entropy


def test_entropy_of_pure_projector_is_zero():
    s = von_neumann_entropy(np.diag([0.0, 1.0, 0.0, 0.0]).astype(complex))
    assert s == 0.0


def test_entropy_of_maximally_mixed_states():
    assert von_neumann_entropy(np.eye(2, dtype=complex) / 2) == pytest.approx(1.0, abs=1e-12)
    assert von_neumann_entropy(np.eye(4, dtype=complex) / 4) == pytest.approx(2.0, abs=1e-12)
    assert von_neumann_entropy(np.eye(8, dtype=complex) / 8) == pytest.approx(3.0, abs=1e-12)


def test_entropy_two_level_value():
    # eigenvalues (cos^2(pi/12), sin^2(pi/12)); hand-evaluated binary entropy
    c2 = np.cos(np.pi / 12) ** 2
    rho = np.diag([c2, 1.0 - c2]).astype(complex)
    assert von_neumann_entropy(rho) == pytest.approx(0.35457890266526954, abs=1e-12)
    assert von_neumann_entropy(rho) == pytest.approx(binary_entropy(c2), abs=1e-12)


def test_entropy_unitary_invariance():
    rng = np.random.default_rng(5)
    for _ in range(20):
        rho = random_density(rng, 4)
        u = random_unitary(rng, 4)
        s1 = von_neumann_entropy(rho)
        s2 = von_neumann_entropy(u @ rho @ u.conj().T)
        assert abs(s1 - s2) < 1e-9


def test_entropy_input_validation():
    bad = np.zeros((2, 2), dtype=complex)
    bad[0, 1] = 1.0
    bad[0, 0] = 1.0
    with pytest.raises(ValueError, match="Hermitian"):
        von_neumann_entropy(bad)
    with pytest.raises(ValueError, match="trace"):
        von_neumann_entropy(np.eye(2, dtype=complex))


def test_entropy_clamps_tiny_negatives_and_rejects_large_ones():
    nearly = np.diag([1.0 + 5e-11, -5e-11]).astype(complex)
    assert von_neumann_entropy(nearly) == pytest.approx(0.0, abs=1e-9)
    corrupt = np.diag([1.001, -0.001]).astype(complex)
    with pytest.raises(ValueError, match="corrupt"):
        von_neumann_entropy(corrupt)
    # a wider floor admits integrator-scale negativity
    assert von_neumann_entropy(corrupt, clamp_floor=-1e-2) == pytest.approx(0.0, abs=1e-2)


# --------------------------------------------------------------------------
# concurrence


def test_concurrence_product_state_is_zero():
    assert concurrence(np.diag([0.0, 1.0, 0.0, 0.0]).astype(complex)) == 0.0


def test_concurrence_bell_state_is_one():
    assert concurrence(BELL) == pytest.approx(1.0, abs=1e-10)


def test_concurrence_pure_superposition_values():
    for alpha in (0.0, np.pi / 12, np.pi / 6, 0.3, 0.55, np.pi / 4):
        # pure-state concurrence 2|c01 c10| = sin(2 alpha)
        assert concurrence(alpha_state(alpha)) == pytest.approx(np.sin(2 * alpha), abs=1e-9)


def test_concurrence_werner_states():
    # p |Bell><Bell| + (1-p) I/4 has concurrence max(0, (3p-1)/2)
    eye = np.eye(4, dtype=complex) / 4
    for p, expected in ((0.8, 0.7), (0.6, 0.4), (0.25, 0.0), (1.0 / 3.0, 0.0)):
        rho = p * BELL + (1.0 - p) * eye
        assert concurrence(rho) == pytest.approx(expected, abs=1e-9)


def test_concurrence_local_unitary_invariance():
    rng = np.random.default_rng(17)
    for _ in range(30):
        rho = random_density(rng, 4)
        u = np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
        c1 = concurrence(rho)
        c2 = concurrence(u @ rho @ u.conj().T)
        assert abs(c1 - c2) < 1e-8


def test_concurrence_dimension_guard():
    with pytest.raises(ValueError, match="4x4"):
        concurrence(np.eye(8, dtype=complex) / 8)


# --------------------------------------------------------------------------
# measurement bases


def test_computational_basis_projectors():
    basis = projective_basis(0.0, 0.0)
    assert np.allclose(basis.projectors[0], np.diag([1.0, 0.0]), atol=1e-15)
    assert np.allclose(basis.projectors[1], np.diag([0.0, 1.0]), atol=1e-15)


def test_hadamard_basis_projectors():
    basis = projective_basis(np.pi / 4, 0.0)
    plus = 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]])
    minus = 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]])
    assert np.allclose(basis.projectors[0], plus, atol=1e-12)
    assert np.allclose(basis.projectors[1], minus, atol=1e-12)


def test_generic_basis_is_projective_and_complete():
    basis = projective_basis(np.pi / 6, np.pi / 3)
    p0, p1 = basis.projectors
    assert np.allclose(p0 + p1, np.eye(2), atol=1e-12)
    assert np.allclose(p0 @ p0, p0, atol=1e-12)
    assert np.allclose(p1 @ p1, p1, atol=1e-12)
    assert np.allclose(p0 @ p1, 0.0, atol=1e-12)
    assert np.allclose(p0, p0.conj().T, atol=1e-15)


def test_basis_parameter_ranges():
    with pytest.raises(ValueError, match="theta"):
        projective_basis(2.0, 0.0)
    with pytest.raises(ValueError, match="phi"):
        projective_basis(0.3, 7.0)


# --------------------------------------------------------------------------
# conditional ensembles


def test_conditional_ensemble_product_state():
    rng = np.random.default_rng(2)
    sigma = random_density(rng, 2)
    rho = np.kron(np.diag([1.0, 0.0]).astype(complex), sigma)
    (p0, s0), (p1, s1) = conditional_ensemble(rho, projective_basis(0.0, 0.0))
    assert p0 == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(s0, sigma, atol=1e-12)
    assert p1 == pytest.approx(0.0, abs=1e-12)
    assert s1 is None


def test_conditional_ensemble_bell_computational():
    (p0, s0), (p1, s1) = conditional_ensemble(BELL, projective_basis(0.0, 0.0))
    assert p0 == pytest.approx(0.5, abs=1e-12)
    assert p1 == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(s0, np.diag([0.0, 1.0]), atol=1e-12)
    assert np.allclose(s1, np.diag([1.0, 0.0]), atol=1e-12)


def test_conditional_ensemble_bell_rotated_stays_pure():
    outcomes = conditional_ensemble(BELL, projective_basis(np.pi / 4, 0.0))
    for p, sigma in outcomes:
        assert p == pytest.approx(0.5, abs=1e-12)
        purity = np.trace(sigma @ sigma).real
        assert purity == pytest.approx(1.0, abs=1e-12)


def test_conditional_ensemble_measured_b():
    rng = np.random.default_rng(9)
    sigma = random_density(rng, 2)
    rho = np.kron(sigma, np.diag([0.0, 1.0]).astype(complex))
    (p0, s0), (p1, s1) = conditional_ensemble(rho, projective_basis(0.0, 0.0), measured="B")
    assert p0 == pytest.approx(0.0, abs=1e-12)
    assert s0 is None
    assert p1 == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(s1, sigma, atol=1e-12)


def test_conditional_ensemble_wide_unmeasured_side():
    vec = np.zeros(8, dtype=complex)
    vec[5] = 1.0  # |1>x|01> on a (2,4) split
    rho = np.outer(vec, vec.conj())
    (p0, s0), (p1, s1) = conditional_ensemble(rho, projective_basis(0.0, 0.0), split=(2, 4))
    assert p0 == pytest.approx(0.0, abs=1e-12)
    assert p1 == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(s1, np.diag([0.0, 1.0, 0.0, 0.0]), atol=1e-12)


def test_conditional_ensemble_guards():
    with pytest.raises(ValueError, match="2-dimensional"):
        conditional_ensemble(
            np.eye(8, dtype=complex) / 8, projective_basis(0.0, 0.0), split=(4, 2)
        )
    with pytest.raises(ValueError, match="split"):
        conditional_ensemble(np.eye(4, dtype=complex) / 4, projective_basis(0.0, 0.0), split=(3, 2))


# --------------------------------------------------------------------------
# mutual information and classical correlation


def test_mutual_information_product_state_is_zero():
    rng = np.random.default_rng(3)
    rho = np.kron(random_density(rng, 2), random_density(rng, 2))
    assert mutual_information(rho) == pytest.approx(0.0, abs=1e-10)


def test_mutual_information_bell_is_two():
    assert mutual_information(BELL) == pytest.approx(2.0, abs=1e-12)


def test_mutual_information_maximally_mixed_is_zero():
    assert mutual_information(np.eye(4, dtype=complex) / 4) == pytest.approx(0.0, abs=1e-12)


def test_classical_correlation_product_state():
    rng = np.random.default_rng(4)
    rho = np.kron(random_density(rng, 2), random_density(rng, 2))
    j, _ = classical_correlation(rho)
    assert j == pytest.approx(0.0, abs=1e-9)


def test_classical_correlation_bell():
    j, _ = classical_correlation(BELL)
    assert j == pytest.approx(1.0, abs=1e-12)


def test_classical_correlation_classical_mixture():
    j, (theta, _) = classical_correlation(CLASSICAL_MIX)
    assert j == pytest.approx(1.0, abs=1e-12)
    assert min(abs(theta - 0.0), abs(theta - np.pi / 2)) < 1e-12


def test_classical_correlation_biased_mixture():
    rho = np.diag([0.7, 0.0, 0.0, 0.3]).astype(complex)
    j, (theta, _) = classical_correlation(rho)
    # computational readout extracts the full S(B) = h(0.3)
    assert j == pytest.approx(binary_entropy(0.3), abs=1e-12)
    assert min(abs(theta - 0.0), abs(theta - np.pi / 2)) < 1e-12


def test_refinement_never_underperforms_the_grid():
    from cavityqed.measures import _conditional_entropy_batch

    rng = np.random.default_rng(6)
    thetas = np.linspace(0.0, np.pi / 2, 65)
    phis = np.linspace(0.0, 2.0 * np.pi, 129)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    for _ in range(5):
        rho = random_density(rng, 4)
        grid_min = float(
            _conditional_entropy_batch(
                rho.reshape(2, 2, 2, 2), tt.ravel(), pp.ravel(), "A", -1e-10
            ).min()
        )
        s_b = von_neumann_entropy(partial_trace(rho, (2, 2), keep="B"))
        j, _ = classical_correlation(rho)
        assert j >= s_b - grid_min - 1e-12


# --------------------------------------------------------------------------
# discord


def test_discord_classical_mixture_is_zero():
    report = discord(CLASSICAL_MIX)
    assert report.discord == pytest.approx(0.0, abs=1e-6)
    assert report.mutual_info == pytest.approx(1.0, abs=1e-12)
    assert report.classical_corr == pytest.approx(1.0, abs=1e-6)


def test_discord_bell_state():
    report = discord(BELL)
    assert report.discord == pytest.approx(1.0, abs=1e-6)
    assert report.s_a == pytest.approx(1.0, abs=1e-12)
    assert report.concurrence == pytest.approx(1.0, abs=1e-6)
    assert report.mutual_info == pytest.approx(2.0, abs=1e-12)


def test_discord_equals_entanglement_entropy_for_pure_states():
    for alpha in (0.0, np.pi / 12, np.pi / 6, 0.3, 0.6, np.pi / 4):
        rho = alpha_state(alpha)
        expected = binary_entropy(np.cos(alpha) ** 2)
        for side in ("A", "B"):
            report = discord(rho, measured=side)
            assert abs(report.discord - expected) < 1e-6


def test_discord_random_state_bounds():
    rng = np.random.default_rng(8)
    for _ in range(50):
        rho = random_density(rng, 4)
        report = discord(rho)
        assert report.discord >= -1e-7
        assert report.discord <= report.s_a + 1e-6
        assert report.classical_corr <= report.mutual_info + 1e-9
        assert report.concurrence is not None
        report.validate()


def test_discord_wide_partner_side():
    rng = np.random.default_rng(10)
    rho = random_density(rng, 8)
    report = discord(rho, split=(2, 4))
    assert report.concurrence is None
    assert report.discord >= -1e-7
    assert report.discord <= report.s_a + 1e-6
    with pytest.raises(ValueError, match="2-dimensional"):
        discord(rho, split=(2, 4), measured="B")


def test_pure_global_state_has_equal_marginal_entropies():
    rng = np.random.default_rng(12)
    for dims in ((2, 2), (2, 4)):
        dim = dims[0] * dims[1]
        for _ in range(10):
            v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            v /= np.linalg.norm(v)
            rho = np.outer(v, v.conj())
            s_a = von_neumann_entropy(partial_trace(rho, dims, keep="A"))
            s_b = von_neumann_entropy(partial_trace(rho, dims, keep="B"))
            assert abs(s_a - s_b) < 1e-9


def test_report_validation_catches_inconsistencies():
    good = discord(BELL)
    broken = CorrelationReport(
        s_a=good.s_a,
        s_b=good.s_b,
        s_ab=good.s_ab,
        concurrence=good.concurrence,
        mutual_info=good.mutual_info + 1e-3,
        classical_corr=good.classical_corr,
        discord=good.discord,
        argmax_basis=good.argmax_basis,
        measured=good.measured,
    )
    with pytest.raises(ValueError, match="entropy identity"):
        broken.validate()
    negative = CorrelationReport(
        s_a=0.5,
        s_b=0.5,
        s_ab=0.2,
        concurrence=None,
        mutual_info=0.8,
        classical_corr=1.0,
        discord=-0.2,
        argmax_basis=(0.0, 0.0),
        measured="A",
    )
    with pytest.raises(ValueError, match="discord"):
        negative.validate()
