import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import crandn
from ybmap.errors import DegeneratePairing, NotAProjector, NotComplementary, RankMismatch
from ybmap.linalg import (
    ProjectorState,
    Subspace,
    numeric_image,
    numeric_kernel,
    orthogonal_projector,
    pairing,
    principal_angles,
    projector_from_pair,
    projector_from_subspaces,
    random_projector,
    random_subspace,
)

IDEM_TOL = 1e-10


def test_pairing_examples():
    assert pairing([1, 0], [0, 1]) == 0
    assert pairing([1, 1], [2, 0]) == 2
    # bilinear: i*i + 1*1 = 0, a sesquilinear product would give 2
    assert pairing([1j, 1], [1j, 1]) == 0


def test_pairing_length_mismatch():
    with pytest.raises(ValueError):
        pairing([1, 2], [1, 2, 3])


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        pairing([np.nan, 1], [1, 1])
    with pytest.raises(ValueError):
        ProjectorState.from_matrix([[np.inf, 0], [0, 0]])


def test_projector_from_pair_examples():
    assert np.allclose(projector_from_pair([2], [3]).matrix, [[1]])
    assert np.allclose(projector_from_pair([1, 0], [1, 0]).matrix, [[1, 0], [0, 0]])
    p = projector_from_pair([1, 1], [2, 0])
    expected = np.outer([1, 1], [2, 0]) / 2
    assert np.allclose(p.matrix, [[1, 0], [1, 0]])
    assert np.allclose(expected, [[1, 0], [1, 0]])
    assert np.allclose(p.matrix @ p.matrix, p.matrix)
    assert p.rank == 1


def test_projector_from_pair_degenerate():
    with pytest.raises(DegeneratePairing):
        projector_from_pair([1, 0], [0, 1])


def _solve_projector(image_vecs, kernel_vecs):
    """Oracle: solve P v = v, P w = 0 entrywise as a linear system in n^2 unknowns."""
    n = len(image_vecs[0])
    rows, rhs = [], []
    for v, target in [(v, v) for v in image_vecs] + [(w, np.zeros(n)) for w in kernel_vecs]:
        v = np.asarray(v, complex)
        # (P v)_i = sum_j P_ij v_j with P flattened row-major
        block = np.kron(np.eye(n), v[None, :])
        rows.append(block)
        rhs.append(np.asarray(target, complex))
    sol = np.linalg.solve(np.vstack(rows), np.concatenate(rhs))
    return sol.reshape(n, n)


def test_projector_from_subspaces_examples():
    e1, e2 = [1, 0], [0, 1]
    p = projector_from_subspaces(Subspace.span(e1), Subspace.span(e2))
    assert np.allclose(p.matrix, np.diag([1, 0]))
    p = projector_from_subspaces(Subspace.span([1, 1]), Subspace.span([0, 1]))
    oracle = _solve_projector([[1, 1]], [[0, 1]])
    assert np.allclose(oracle, [[1, 0], [1, 0]])
    assert np.allclose(p.matrix, oracle, atol=1e-14)
    with pytest.raises(NotComplementary):
        projector_from_subspaces(Subspace.span([1, 0]), Subspace.span([1, 0]))


def test_projector_from_subspaces_dimension_mismatch():
    with pytest.raises(NotComplementary):
        projector_from_subspaces(Subspace.span([1, 0, 0]), Subspace.span([0, 1, 0]))


def test_orthogonal_projector_examples():
    assert np.allclose(orthogonal_projector(Subspace.span([1, 0])).matrix, np.diag([1, 0]))
    b = np.array([[1.0], [1.0]])
    normal_eq = b @ np.linalg.inv(b.T @ b) @ b.T
    assert np.allclose(normal_eq, 0.5 * np.ones((2, 2)))
    p = orthogonal_projector(Subspace.span([1, 1]))
    assert np.allclose(p.matrix, normal_eq)
    assert p.hermitian
    assert np.allclose(orthogonal_projector(Subspace.whole(3)).matrix, np.eye(3))


def test_orthogonal_projector_rank_deficient():
    with pytest.raises(RankMismatch):
        orthogonal_projector(np.array([[1.0, 2.0], [1.0, 2.0]]))


def test_numeric_kernel_image_examples():
    z = np.zeros((2, 2))
    assert numeric_kernel(z).dim == 2
    assert numeric_image(z).dim == 0
    d = np.diag([1.0, 0.0])
    assert numeric_kernel(d).same_as(Subspace.span([0, 1]))
    assert numeric_image(d).same_as(Subspace.span([1, 0]))
    ones = np.ones((2, 2))
    # eigenvectors by hand: (1,1) with eigenvalue 2, (1,-1) with eigenvalue 0
    assert numeric_kernel(ones).same_as(Subspace.span([1, -1]))
    assert numeric_image(ones).same_as(Subspace.span([1, 1]))


def test_numeric_kernel_with_expected_dimension(rng):
    a = crandn(rng, 5, 3) @ crandn(rng, 3, 5)
    assert numeric_kernel(a, dim=2).dim == 2
    with pytest.raises(RankMismatch):
        numeric_kernel(a, dim=1)


def test_principal_angles_known_values():
    a = Subspace.span([1, 0]).basis
    for theta in (1e-9, 1e-4, 0.3, np.pi / 2 - 1e-6):
        b = Subspace.span([np.cos(theta), np.sin(theta)]).basis
        assert principal_angles(a, b)[0] == pytest.approx(theta, rel=1e-6)


def test_subspace_distance_basis_independent(rng):
    s = random_subspace(rng, 5, 2)
    mixed = Subspace.from_columns(s.basis @ crandn(rng, 2, 2))
    assert s.distance(mixed) < 1e-12
    assert s.distance(random_subspace(rng, 5, 3)) == pytest.approx(np.pi / 2)


def test_from_matrix_rejects_non_projector():
    with pytest.raises(NotAProjector):
        ProjectorState.from_matrix(2 * np.eye(2))


def test_zero_and_identity_admitted():
    for p in (ProjectorState.zero(3), ProjectorState.identity(3)):
        q = ProjectorState.from_matrix(p.matrix)
        assert q.rank == p.rank
        assert q.hermitian


def test_states_are_immutable(rng):
    p = random_projector(rng, 3, 1)
    with pytest.raises(ValueError):
        p.matrix[0, 0] = 5


def _random_case(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    k = int(rng.integers(0, n + 1))
    return rng, n, k


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_projector_invariants(seed):
    rng, n, k = _random_case(seed)
    p = random_projector(rng, n, k, max_condition=1e3)
    m = p.matrix
    assert np.linalg.norm(m @ m - m) <= IDEM_TOL * (1 + np.linalg.norm(m))
    assert p.rank == p.image.dim == k
    assert p.kernel.dim == n - k
    assert abs(np.trace(m) - k) <= IDEM_TOL * n
    stacked = np.hstack([p.image.basis, p.kernel.basis])
    assert np.linalg.matrix_rank(stacked) == n
    again = projector_from_subspaces(p.image, p.kernel)
    assert np.linalg.norm(again.matrix - m) <= IDEM_TOL * (1 + np.linalg.norm(m))
    parsed = ProjectorState.from_matrix(m)
    assert parsed.rank == k
    assert parsed.image.same_as(p.image) and parsed.kernel.same_as(p.kernel)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pair_projector_matches_subspace_construction(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 8))
    xi, eta = crandn(rng, n), crandn(rng, n)
    p = projector_from_pair(xi, eta)
    annihilator = numeric_kernel(eta[None, :], dim=n - 1)
    q = projector_from_subspaces(Subspace.span(xi), annihilator)
    assert np.linalg.norm(p.matrix - q.matrix) <= IDEM_TOL * (1 + np.linalg.norm(p.matrix))
    assert p.kernel.same_as(annihilator)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_orthogonal_projector_properties(seed):
    rng, n, k = _random_case(seed)
    p = orthogonal_projector(random_subspace(rng, n, k))
    m = p.matrix
    assert np.linalg.norm(m - m.conj().T) <= IDEM_TOL
    assert np.linalg.norm(m @ (np.eye(n) - m)) <= IDEM_TOL
    assert p.kernel.distance(p.image.orthogonal_complement()) < 1e-12 or k in (0, n)
