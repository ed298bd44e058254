import logging
import math

import numpy as np
import pytest

from tomoportrait.probcore import InvariantError, is_prob_vector, is_stochastic
from tomoportrait.quantum import (
    DensityMatrix,
    Direction,
    bell_state,
    bell_state_tomogram_closed_form,
    bipartite_tomogram,
    local_unitary,
    maximally_mixed,
    qubit_qutrit_state,
    qubit_qutrit_tomogram_closed_form,
    qubit_unitary,
    qutrit_unitary,
    random_density_matrix,
    random_direction,
    random_pure_density,
    tomogram,
    two_qutrit_state,
    two_qutrit_tomogram_closed_form,
)

H = math.pi / 2


def test_direction_unit_vector(rng):
    for _ in range(100):
        d = random_direction(rng)
        assert np.linalg.norm(d.vector) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(Direction(H, 0).vector, [1, 0, 0], atol=1e-15)
    assert Direction.from_degrees(90, 180).phi == pytest.approx(math.pi)


def test_direction_normalized_keeps_axis(rng):
    for _ in range(100):
        d = Direction(rng.uniform(-20, 20), rng.uniform(-20, 20))
        n = d.normalized()
        assert 0 <= n.theta <= math.pi and 0 <= n.phi < 2 * math.pi
        np.testing.assert_allclose(n.vector, d.vector, atol=1e-12)


# --- unitaries ---------------------------------------------------------------


def test_qubit_unitary_identity():
    np.testing.assert_allclose(qubit_unitary(Direction(0, 0, 0)), np.eye(2), atol=1e-15)


def test_qubit_unitary_flip():
    np.testing.assert_allclose(np.abs(qubit_unitary(Direction(math.pi, 0.3, 1.1))), [[0, 1], [1, 0]], atol=1e-15)


def test_qubit_unitary_entries():
    t, f, s = 0.7, 1.3, -0.4
    u = qubit_unitary(Direction(t, f, s))
    assert u[0, 0] == pytest.approx(math.cos(t / 2) * np.exp(1j * (f + s) / 2))
    assert u[0, 1] == pytest.approx(math.sin(t / 2) * np.exp(1j * (f - s) / 2))
    assert u[1, 0] == pytest.approx(-math.sin(t / 2) * np.exp(-1j * (f - s) / 2))
    assert u[1, 1] == pytest.approx(math.cos(t / 2) * np.exp(-1j * (f + s) / 2))
    v = qubit_unitary(Direction(t, f), "zxz")
    assert v[0, 1] == pytest.approx(1j * np.exp(1j * f / 2) * math.sin(t / 2))
    assert v[1, 0] == pytest.approx(1j * np.exp(-1j * f / 2) * math.sin(t / 2))


@pytest.mark.parametrize("conv", ["zyz", "zxz"])
def test_qubit_unitary_unitary(rng, conv):
    for _ in range(50):
        u = qubit_unitary(Direction(*rng.uniform(-7, 7, 3)), conv)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-12)


def test_qubit_unitary_unknown_convention():
    with pytest.raises(ValueError, match="convention"):
        qubit_unitary(Direction(0, 0), "xyz")


def test_qutrit_unitary_identity():
    np.testing.assert_allclose(qutrit_unitary(Direction(0, 0)), np.eye(3), atol=1e-15)


def test_qutrit_unitary_quarter_turn():
    v = qutrit_unitary(Direction(H, 0))
    assert abs(v[0, 1]) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert v[1, 1] == pytest.approx(0, abs=1e-15)


def test_qutrit_unitary_unitary(rng):
    for _ in range(50):
        v = qutrit_unitary(Direction(*rng.uniform(-7, 7, 2)))
        np.testing.assert_allclose(np.linalg.norm(v, axis=1), 1, atol=1e-12)
        np.testing.assert_allclose(v @ v.conj().T, np.eye(3), atol=1e-12)


def test_no_builtin_unitary_for_four_levels():
    with pytest.raises(ValueError, match="no built-in"):
        local_unitary(Direction(0, 0), 4)


# --- density matrices --------------------------------------------------------


def test_density_matrix_rejects_negative_eigenvalue():
    with pytest.raises(InvariantError, match="eigenvalue below tolerance"):
        DensityMatrix([[1.2, 0], [0, -0.2]])


def test_density_matrix_rejects_bad_trace():
    with pytest.raises(InvariantError, match="trace"):
        DensityMatrix(np.eye(2))


def test_density_matrix_rejects_bad_dims():
    with pytest.raises(InvariantError, match="dims"):
        DensityMatrix(np.eye(4) / 4, (2, 3))


def test_density_matrix_symmetrizes_with_warning(caplog):
    rho = np.array([[0.5, 0.1 + 1e-6], [0.1, 0.5]])
    with caplog.at_level(logging.WARNING):
        dm = DensityMatrix(rho)
    assert "symmetrized" in caplog.text
    np.testing.assert_allclose(dm.data, dm.data.conj().T, atol=0)
    assert dm.data.flags.writeable is False


def test_density_matrix_small_roundoff_is_silent(caplog):
    with caplog.at_level(logging.WARNING):
        DensityMatrix([[0.5, 0.1 + 1e-13], [0.1, 0.5]])
    assert caplog.text == ""


# --- tomograms ---------------------------------------------------------------


def test_tomogram_basis_state():
    np.testing.assert_array_equal(tomogram(np.diag([1.0, 0.0]), np.eye(2)), [1, 0])


def test_tomogram_rejects_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        tomogram(np.eye(2) / 2, np.eye(3))
    with pytest.raises(InvariantError, match="unitar"):
        tomogram(np.eye(2) / 2, [[1, 1], [0, 1]])


def test_bell_tomogram_quarter_turns():
    u = np.kron(qubit_unitary(Direction(H, 0)), qubit_unitary(Direction(H, 0)))
    np.testing.assert_allclose(tomogram(bell_state(), u), [0.5, 0, 0, 0.5], atol=1e-15)


def test_pure_qubit_diagonal(rng):
    for _ in range(20):
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        nrm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        a, b = a / nrm, b / nrm
        rho = DensityMatrix.from_pure([a, b])
        np.testing.assert_allclose(tomogram(rho, np.eye(2)), [abs(a) ** 2, abs(b) ** 2], atol=1e-15)


def test_qubit_qutrit_identity_directions():
    t = bipartite_tomogram(qubit_qutrit_state(), Direction(0, 0), Direction(0, 0))
    np.testing.assert_allclose(t.probabilities, [0.5, 0, 0, 0, 0, 0.5], atol=1e-15)
    np.testing.assert_allclose(t.marginal(0), [0.5, 0.5], atol=1e-15)


def test_two_qutrit_identity_directions():
    t = bipartite_tomogram(two_qutrit_state(), Direction(0, 0), Direction(0, 0))
    expected = np.zeros(9)
    expected[[0, 4, 8]] = 1 / 3
    np.testing.assert_allclose(t.probabilities, expected, atol=1e-15)


def test_bipartite_requires_dims_or_unitaries():
    rho = np.eye(16) / 16
    with pytest.raises(ValueError, match="dims are required"):
        bipartite_tomogram(rho, Direction(0, 0), Direction(0, 0))
    with pytest.raises(ValueError, match="no built-in"):
        bipartite_tomogram(rho, Direction(0, 0), Direction(0, 0), (4, 4))
    t = bipartite_tomogram(rho, Direction(0, 0), Direction(0, 0), (4, 4), unitaries=(np.eye(4), np.eye(4)))
    np.testing.assert_allclose(t.probabilities, np.full(16, 1 / 16), atol=1e-15)


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_product_state_factorizes(rng, dims):
    for _ in range(20):
        ra, rb = random_density_matrix(dims[0], rng), random_density_matrix(dims[1], rng)
        d1, d2 = random_direction(rng), random_direction(rng)
        t = bipartite_tomogram(DensityMatrix(np.kron(ra, rb), dims), d1, d2)
        w1 = tomogram(ra, local_unitary(d1, dims[0]))
        w2 = tomogram(rb, local_unitary(d2, dims[1]))
        np.testing.assert_allclose(t.probabilities, np.outer(w1, w2).ravel(), atol=1e-12)


def test_maximally_mixed_is_uniform(rng):
    t = bipartite_tomogram(maximally_mixed((3, 3)), random_direction(rng), random_direction(rng))
    np.testing.assert_allclose(t.probabilities, np.full(9, 1 / 9), atol=1e-15)


# --- closed forms ------------------------------------------------------------


def test_bell_closed_form_examples():
    np.testing.assert_allclose(bell_state_tomogram_closed_form(Direction(0, 0), Direction(0, 0)), [0.5, 0, 0, 0.5], atol=1e-15)
    np.testing.assert_allclose(bell_state_tomogram_closed_form(Direction(H, 0), Direction(H, 0)), [0.5, 0, 0, 0.5], atol=1e-15)
    np.testing.assert_allclose(
        bell_state_tomogram_closed_form(Direction(H, 0.3), Direction(H, H - 0.3)), [0.25] * 4, atol=1e-15
    )


def test_bell_closed_form_matches_pipeline(rng):
    rho = bell_state()
    for _ in range(500):
        d1, d2 = random_direction(rng), random_direction(rng)
        w = bipartite_tomogram(rho, d1, d2).probabilities
        np.testing.assert_allclose(bell_state_tomogram_closed_form(d1, d2), w, atol=1e-10)
        # symmetry confirmed from the matrix itself, not assumed
        assert w[0] == pytest.approx(w[3], abs=1e-12)
        assert w[1] == pytest.approx(w[2], abs=1e-12)


def test_qubit_qutrit_closed_form_matches_pipeline(rng):
    rho = qubit_qutrit_state()
    for _ in range(500):
        d1, d2 = random_direction(rng), random_direction(rng)
        w = bipartite_tomogram(rho, d1, d2, convention="zxz").probabilities
        np.testing.assert_allclose(qubit_qutrit_tomogram_closed_form(d1, d2), w, atol=1e-10)


def test_two_qutrit_closed_form_matches_pipeline(rng):
    rho = two_qutrit_state()
    for _ in range(500):
        d1, d2 = random_direction(rng), random_direction(rng)
        w = bipartite_tomogram(rho, d1, d2).probabilities
        np.testing.assert_allclose(two_qutrit_tomogram_closed_form(d1, d2), w, atol=1e-10)


# --- invariants --------------------------------------------------------------


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3)])
@pytest.mark.parametrize("conv", ["zyz", "zxz"])
def test_psi_independence_and_normalization(rng, dims, conv):
    for _ in range(200):
        rho = DensityMatrix(random_density_matrix(dims[0] * dims[1], rng), dims)
        t1, t2 = rng.uniform(0, math.pi, 2)
        f1, f2 = rng.uniform(0, 2 * math.pi, 2)
        psi = rng.uniform(-math.pi, math.pi, 4)
        a = bipartite_tomogram(rho, Direction(t1, f1, psi[0]), Direction(t2, f2, psi[1]), convention=conv)
        b = bipartite_tomogram(rho, Direction(t1, f1, psi[2]), Direction(t2, f2, psi[3]), convention=conv)
        np.testing.assert_allclose(a.probabilities, b.probabilities, atol=1e-12)
        assert a.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
        assert is_prob_vector(a.marginal(0)) and is_prob_vector(a.marginal(1))


def test_two_direction_matrix_is_stochastic(rng):
    for _ in range(50):
        rho = random_pure_density(2, rng)
        p = tomogram(rho, qubit_unitary(random_direction(rng)))[0]
        q = tomogram(rho, qubit_unitary(random_direction(rng)))[0]
        assert is_stochastic([[p, q], [1 - p, 1 - q]])
