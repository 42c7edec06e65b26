"""Dense complex linear algebra: pairings, subspaces and projectors.

Every matrix is stored as ``complex128``.  Subspaces carry an orthonormal
basis so that comparisons go through principal angles rather than raw
columns.  The pairing between vectors and covectors is bilinear; the
Hermitian inner product is only used for orthogonal projectors and for
canonicalizing bases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePairing, NotAProjector, NotComplementary, RankMismatch

RANK_TOL = 1e-10
IDEM_TOL = 1e-10
ANGLE_TOL = 1e-8
PAIRING_TOL = 1e-12


def as_vector(x):
    v = np.asarray(x, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"expected a non-empty 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def as_matrix(m, square=True):
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


def pairing(xi, eta):
    """Canonical pairing ``sum_i xi_i eta_i`` of a vector with a covector (no conjugation)."""
    xi = as_vector(xi)
    eta = as_vector(eta)
    if xi.shape != eta.shape:
        raise ValueError(f"length mismatch: {xi.size} vs {eta.size}")
    return complex(np.sum(xi * eta))


def _numeric_rank(s, rank_tol):
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rank_tol * s[0]))


def _checked_rank(s, rank_tol, expected):
    """Numeric rank, overridden by ``expected`` when the singular gap still supports it."""
    found = _numeric_rank(s, rank_tol)
    if expected is None or expected == found:
        return found
    smax = s[0] if s.size else 0.0
    # the cut must still separate "large" from "small" singular values
    kept_ok = expected == 0 or s[expected - 1] > np.sqrt(rank_tol) * smax
    dropped_ok = expected >= s.size or s[expected] <= np.sqrt(rank_tol) * smax
    if not (kept_ok and dropped_ok):
        raise RankMismatch(f"expected rank {expected}, singular values give {found}: {s}")
    return expected


def numeric_kernel(m, rank_tol=RANK_TOL, dim=None):
    """Orthonormal basis of the numeric null space of ``m``.

    If ``dim`` is given, exactly that many right singular directions are
    taken, provided the singular spectrum has a gap at that position.
    """
    m = as_matrix(m, square=False)
    _, s, vh = np.linalg.svd(m)
    s_full = np.zeros(m.shape[1])
    s_full[: s.size] = s
    ncols = m.shape[1]
    rank = _checked_rank(s_full, rank_tol, None if dim is None else ncols - dim)
    return Subspace(vh[rank:].conj().T)


def numeric_image(m, rank_tol=RANK_TOL, dim=None):
    """Orthonormal basis of the numeric column space of ``m``."""
    m = as_matrix(m, square=False)
    u, s, _ = np.linalg.svd(m)
    rank = _checked_rank(s, rank_tol, dim)
    return Subspace(u[:, :rank])


def orthonormalize(columns, rank_tol=RANK_TOL, dim=None):
    """Orthonormal basis for the span of ``columns`` (n x m array)."""
    a = as_matrix(columns, square=False)
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], 0), complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    rank = _checked_rank(s, rank_tol, dim)
    return u[:, :rank]


def principal_angles(a, b):
    """Principal angles between spans of orthonormal bases ``a`` and ``b`` (ascending).

    Small angles come from sines, large ones from cosines, so both ends
    are resolved to working precision.
    """
    k = min(a.shape[1], b.shape[1])
    if k == 0:
        return np.zeros(0)
    cos = np.linalg.svd(a.conj().T @ b, compute_uv=False)[:k]
    cos = np.clip(cos, 0.0, 1.0)
    if a.shape[1] <= b.shape[1]:
        resid = a - b @ (b.conj().T @ a)
    else:
        resid = b - a @ (a.conj().T @ b)
    sin = np.sort(np.linalg.svd(resid, compute_uv=False))[:k]
    sin = np.clip(sin, 0.0, 1.0)
    from_cos = np.arccos(cos)[::-1]
    from_sin = np.arcsin(sin)
    return np.where(from_sin < np.pi / 4, from_sin, from_cos)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of C^n held as an orthonormal n x k basis."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 2:
            raise ValueError("basis must be an n x k array")
        object.__setattr__(self, "basis", _frozen(b))

    @classmethod
    def from_columns(cls, columns, rank_tol=RANK_TOL, dim=None):
        """Build from arbitrary columns; fails if they are numerically dependent."""
        a = as_matrix(columns, square=False)
        q = orthonormalize(a, rank_tol, dim)
        if dim is None and q.shape[1] != a.shape[1]:
            raise RankMismatch(f"columns have numeric rank {q.shape[1]} < {a.shape[1]}")
        return cls(q)

    @classmethod
    def span(cls, *vectors, rank_tol=RANK_TOL):
        cols = np.column_stack([as_vector(v) for v in vectors])
        return cls.from_columns(cols, rank_tol)

    @classmethod
    def zero(cls, n):
        return cls(np.zeros((n, 0), complex))

    @classmethod
    def whole(cls, n):
        return cls(np.eye(n, dtype=complex))

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def orthogonal_complement(self):
        if self.dim == 0:
            return Subspace.whole(self.ambient_dim)
        u, _, _ = np.linalg.svd(self.basis)
        return Subspace(u[:, self.dim:])

    def transformed(self, m, rank_tol=RANK_TOL):
        """Image of this subspace under the linear map ``m``; dimension must survive."""
        cols = as_matrix(m) @ self.basis
        return Subspace(orthonormalize(cols, rank_tol, dim=self.dim))

    def distance(self, other):
        """Largest principal angle; pi/2 when dimensions differ."""
        if self.ambient_dim != other.ambient_dim or self.dim != other.dim:
            return np.pi / 2
        angles = principal_angles(self.basis, other.basis)
        return float(angles.max()) if angles.size else 0.0

    def same_as(self, other, angle_tol=ANGLE_TOL):
        return self.distance(other) <= angle_tol

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


@dataclass(frozen=True, eq=False)
class ProjectorState:
    """Idempotent n x n matrix together with its kernel and image."""

    matrix: np.ndarray
    rank: int
    kernel: Subspace
    image: Subspace
    hermitian: bool = False

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    @classmethod
    def from_matrix(cls, m, idem_tol=IDEM_TOL, rank_tol=RANK_TOL, hermitian=None):
        """Validate ``m`` as a projector and read off its kernel and image.

        ``hermitian=None`` detects self-adjointness from the matrix.
        """
        p = as_matrix(m)
        n = p.shape[0]
        scale = 1.0 + np.linalg.norm(p)
        defect = np.linalg.norm(p @ p - p)
        if defect > idem_tol * scale:
            raise NotAProjector(f"||P^2 - P||_F = {defect:.3e}")
        rank = int(round(np.trace(p).real))
        if not 0 <= rank <= n:
            raise NotAProjector(f"trace {np.trace(p)} is not a rank")
        u, s, vh = np.linalg.svd(p)
        rank = _checked_rank(s, rank_tol, rank)
        herm_defect = np.linalg.norm(p - p.conj().T)
        if hermitian is None:
            hermitian = bool(herm_defect <= idem_tol * scale)
        elif hermitian and herm_defect > idem_tol * scale:
            raise NotAProjector(f"||P - P*||_F = {herm_defect:.3e} for a hermitian projector")
        if hermitian:
            p = (p + p.conj().T) / 2
        return cls(p, rank, Subspace(vh[rank:].conj().T), Subspace(u[:, :rank]), hermitian)

    @classmethod
    def zero(cls, n):
        return cls(np.zeros((n, n), complex), 0, Subspace.whole(n), Subspace.zero(n), True)

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n, dtype=complex), n, Subspace.zero(n), Subspace.whole(n), True)

    @property
    def ambient_dim(self):
        return self.matrix.shape[0]

    def idempotency_defect(self):
        p = self.matrix
        return float(np.linalg.norm(p @ p - p))

    def distance(self, other):
        """Largest principal angle between images plus that between kernels."""
        if self.ambient_dim != other.ambient_dim or self.rank != other.rank:
            return np.pi
        return self.image.distance(other.image) + self.kernel.distance(other.kernel)

    def __repr__(self):
        return (f"ProjectorState(rank={self.rank}, ambient_dim={self.ambient_dim}, "
                f"hermitian={self.hermitian})")


def projector_from_subspaces(image, kernel, rank_tol=RANK_TOL, hermitian=False):
    """The projector with range ``image`` along ``kernel``."""
    n = image.ambient_dim
    if kernel.ambient_dim != n:
        raise ValueError("image and kernel live in different spaces")
    k = image.dim
    if k + kernel.dim != n:
        raise NotComplementary(f"dimensions {k} + {kernel.dim} != {n}")
    if k == 0:
        return ProjectorState.zero(n)
    if k == n:
        return ProjectorState.identity(n)
    stacked = np.hstack([image.basis, kernel.basis])
    s = np.linalg.svd(stacked, compute_uv=False)
    cond = s[0] / s[-1] if s[-1] > 0 else np.inf
    if s[-1] <= rank_tol * s[0]:
        raise NotComplementary(
            f"image and kernel are not complementary (condition {cond:.3e})", condition=cond)
    coords = np.linalg.solve(stacked, np.eye(n))
    p = image.basis @ coords[:k]
    if hermitian:
        p = (p + p.conj().T) / 2
    return ProjectorState(p, k, kernel, image, hermitian)


def projector_from_pair(xi, eta, pairing_tol=PAIRING_TOL):
    """Rank-one projector ``xi (x) eta / (xi, eta)``."""
    xi = as_vector(xi)
    eta = as_vector(eta)
    c = pairing(xi, eta)
    if abs(c) <= pairing_tol * np.linalg.norm(xi) * np.linalg.norm(eta) or c == 0:
        raise DegeneratePairing(f"(xi, eta) = {c} is numerically zero")
    p = np.outer(xi, eta) / c
    image = Subspace(xi[:, None] / np.linalg.norm(xi))
    # kernel = {v : (v, eta) = 0}, the orthogonal complement of conj(eta)
    kernel = Subspace(eta.conj()[:, None] / np.linalg.norm(eta)).orthogonal_complement()
    return ProjectorState(p, 1, kernel, image, False)


def orthogonal_projector(image, rank_tol=RANK_TOL):
    """Hermitian projector onto ``image``."""
    if not isinstance(image, Subspace):
        image = Subspace.from_columns(image, rank_tol)
    n = image.ambient_dim
    q = image.basis
    if q.shape[1] and not np.allclose(q.conj().T @ q, np.eye(q.shape[1]), atol=1e-12):
        q = orthonormalize(q, rank_tol, dim=q.shape[1])
        image = Subspace(q)
    p = q @ q.conj().T
    p = (p + p.conj().T) / 2
    return ProjectorState(p, image.dim, image.orthogonal_complement(), image, True)


def random_subspace(rng, n, k, real=False):
    """Gaussian random k-dimensional subspace of C^n (or R^n)."""
    a = rng.standard_normal((n, k))
    if not real:
        a = a + 1j * rng.standard_normal((n, k))
    return Subspace(orthonormalize(a, dim=k))


def random_projector(rng, n, k, hermitian=False, real=False, max_condition=None):
    """Random rank-k projector; oblique unless ``hermitian``.

    ``max_condition`` bounds the condition number of the stacked
    image/kernel basis by rejection.
    """
    image = random_subspace(rng, n, k, real)
    if hermitian:
        return orthogonal_projector(image)
    while True:
        kernel = random_subspace(rng, n, n - k, real)
        if max_condition is None or k in (0, n):
            break
        s = np.linalg.svd(np.hstack([image.basis, kernel.basis]), compute_uv=False)
        if s[0] <= max_condition * s[-1]:
            break
    return projector_from_subspaces(image, kernel)
