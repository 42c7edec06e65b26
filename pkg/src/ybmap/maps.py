"""Closed-form Yang-Baxter maps from matrix soliton collisions.

Orientation is fixed once: ``R(l1, l2)(x1, x2) = (x1~, x2~)`` with the
Lax factors related by ``A(x1, l1) A(x2, l2) = A(x2~, l2) A(x1~, l1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePairing, NotComplementary, ParameterCollision
from .linalg import (
    IDEM_TOL,
    PAIRING_TOL,
    RANK_TOL,
    ProjectorState,
    Subspace,
    as_vector,
    orthogonal_projector,
    pairing,
    projector_from_pair,
    projector_from_subspaces,
)

PARAM_TOL = 1e-12


def check_parameters(l1, l2, param_tol=PARAM_TOL):
    """Raise ParameterCollision when ``l1 = +-l2`` to relative precision ``param_tol``."""
    scale = abs(l1) + abs(l2)
    if abs(l1 - l2) <= param_tol * scale:
        raise ParameterCollision(f"parameter collision: lambda1 = lambda2 = {l1}")
    if abs(l1 + l2) <= param_tol * scale:
        raise ParameterCollision(f"parameter collision: lambda1 = -lambda2 = {l1}")


def _is_real(x):
    return complex(x).imag == 0.0


@dataclass(frozen=True, eq=False)
class Polarization:
    """Rank-one soliton amplitude: vector ``xi``, covector ``eta``, velocity ``lam``."""

    xi: np.ndarray
    eta: np.ndarray
    lam: complex

    def __post_init__(self):
        xi = as_vector(self.xi).copy()
        eta = as_vector(self.eta).copy()
        if xi.shape != eta.shape:
            raise ValueError("xi and eta have different lengths")
        lam = complex(self.lam)
        if lam == 0 or not np.isfinite(lam):
            raise ValueError("lambda must be finite and nonzero")
        c = pairing(xi, eta)
        if c == 0 or abs(c) <= PAIRING_TOL * np.linalg.norm(xi) * np.linalg.norm(eta):
            raise DegeneratePairing(f"(xi, eta) = {c} is numerically zero")
        xi.flags.writeable = False
        eta.flags.writeable = False
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "lam", lam)

    @property
    def dim(self):
        return self.xi.size

    def projector(self):
        return projector_from_pair(self.xi, self.eta)


def vector_soliton_map(l1, xi1, eta1, l2, xi2, eta2, param_tol=PARAM_TOL):
    """Polarization change of two rank-one solitons after their collision.

    Returns ``(xi1~, eta1~, xi2~, eta2~)``.
    """
    check_parameters(l1, l2, param_tol)
    xi1, eta1, xi2, eta2 = (as_vector(v) for v in (xi1, eta1, xi2, eta2))
    p11 = pairing(xi1, eta1)
    p22 = pairing(xi2, eta2)
    for c, x, e in ((p11, xi1, eta1), (p22, xi2, eta2)):
        if c == 0 or abs(c) <= PAIRING_TOL * np.linalg.norm(x) * np.linalg.norm(e):
            raise DegeneratePairing(f"(xi, eta) = {c} is numerically zero")
    p12 = pairing(xi1, eta2)
    p21 = pairing(xi2, eta1)
    a = 2 * l2 / ((l1 - l2) * p22)
    b = 2 * l1 / ((l2 - l1) * p11)
    return (xi1 + a * p12 * xi2,
            eta1 + a * p21 * eta2,
            xi2 + b * p21 * xi1,
            eta2 + b * p12 * eta1)


def polarization_map(p1, p2, param_tol=PARAM_TOL):
    """``vector_soliton_map`` on Polarization records; velocities are kept."""
    x1, e1, x2, e2 = vector_soliton_map(p1.lam, p1.xi, p1.eta, p2.lam, p2.xi, p2.eta, param_tol)
    return Polarization(x1, e1, p1.lam), Polarization(x2, e2, p2.lam)


def _transform(space, m, label, rank_tol):
    try:
        return space.transformed(m, rank_tol)
    except Exception as exc:
        raise NotComplementary(f"{label} lost dimension under the update: {exc}") from exc


def projector_map(l1, p1, l2, p2, rank_tol=RANK_TOL, idem_tol=IDEM_TOL, param_tol=PARAM_TOL):
    """Yang-Baxter map on pairs of projectors via kernel and image updates.

    Ranks of the two projectors may differ.  When both inputs are
    Hermitian and both parameters real the outputs are re-symmetrized
    and flagged Hermitian.
    """
    check_parameters(l1, l2, param_tol)
    n = p1.ambient_dim
    if p2.ambient_dim != n:
        raise ValueError("projectors act on spaces of different dimension")
    eye = np.eye(n)
    m1, m2 = p1.matrix, p2.matrix
    k1 = _transform(p1.kernel, eye - 2 * l2 / (l1 + l2) * m2, "kernel 1", rank_tol)
    i1 = _transform(p1.image, eye + 2 * l2 / (l1 - l2) * m2, "image 1", rank_tol)
    k2 = _transform(p2.kernel, eye - 2 * l1 / (l1 + l2) * m1, "kernel 2", rank_tol)
    i2 = _transform(p2.image, eye + 2 * l1 / (l2 - l1) * m1, "image 2", rank_tol)
    hermitian = p1.hermitian and p2.hermitian and _is_real(l1) and _is_real(l2)
    out = []
    for image, kernel, label in ((i1, k1, "1"), (i2, k2, "2")):
        try:
            q = projector_from_subspaces(image, kernel, rank_tol)
        except NotComplementary as exc:
            raise NotComplementary(f"updated projector {label}: {exc}", exc.condition) from exc
        if hermitian:
            m = q.matrix
            scale = 1.0 + np.linalg.norm(m)
            if np.linalg.norm(m - m.conj().T) <= idem_tol * scale:
                q = ProjectorState((m + m.conj().T) / 2, q.rank, q.kernel, q.image, True)
        out.append(q)
    return out[0], out[1]


def grassmannian_map(l1, s1, l2, s2, rank_tol=RANK_TOL, param_tol=PARAM_TOL):
    """Yang-Baxter map on G(k1, n) x G(k2, n) for real parameters.

    Returns the updated subspaces with orthonormal bases.
    """
    for lam in (l1, l2):
        if not _is_real(lam):
            raise ValueError(f"grassmannian map needs real parameters, got {lam}")
    l1, l2 = complex(l1).real, complex(l2).real
    check_parameters(l1, l2, param_tol)
    n = s1.ambient_dim
    if s2.ambient_dim != n:
        raise ValueError("subspaces live in spaces of different dimension")
    q1 = orthogonal_projector(s1).matrix
    q2 = orthogonal_projector(s2).matrix
    eye = np.eye(n)
    t1 = _transform(s1, eye + 2 * l2 / (l1 - l2) * q2, "subspace 1", rank_tol)
    t2 = _transform(s2, eye + 2 * l1 / (l2 - l1) * q1, "subspace 2", rank_tol)
    return t1, t2


@dataclass(frozen=True, eq=False)
class MapResult:
    """Outcome of one collision with its refactorization certificate.

    ``states`` has the type of the inputs (Polarization, ProjectorState or
    Subspace); ``projectors`` are the corresponding Lax projectors.
    ``residual`` is the largest relative refactorization residual over
    the sampled spectral parameters.
    """

    states: tuple
    projectors: tuple
    lambdas: tuple
    residual: float


def as_projector(state):
    if isinstance(state, ProjectorState):
        return state
    if isinstance(state, Polarization):
        return state.projector()
    if isinstance(state, Subspace):
        return orthogonal_projector(state)
    raise TypeError(f"cannot build a projector from {type(state).__name__}")


def apply_map(l1, s1, l2, s2, **kwargs):
    """Dispatch to the map matching the state type."""
    if isinstance(s1, Polarization):
        p1 = Polarization(s1.xi, s1.eta, l1)
        p2 = Polarization(s2.xi, s2.eta, l2)
        return polarization_map(p1, p2, kwargs.get("param_tol", PARAM_TOL))
    if isinstance(s1, Subspace):
        return grassmannian_map(l1, s1, l2, s2, **kwargs)
    return projector_map(l1, s1, l2, s2, **kwargs)


def collide(l1, s1, l2, s2, grid=None, **kwargs):
    """Apply the appropriate map and certify it against the Lax factorization."""
    from .lax import default_grid, verify_refactorization

    t1, t2 = apply_map(l1, s1, l2, s2, **kwargs)
    before = (as_projector(s1), as_projector(s2))
    after = (as_projector(t1), as_projector(t2))
    if grid is None:
        grid = default_grid([l1, l2])
    residual = verify_refactorization(l1, before[0], l2, before[1], after[0], after[1], grid)
    return MapResult((t1, t2), after, (complex(l1), complex(l2)), residual)
