"""Lax matrices ``A(P, lam; zeta) = I + 2 lam / (zeta - lam) P`` and refactorization.

``refactorize_numeric`` solves the two-factor refactorization problem
from kernels and images of the polynomial product at its zeros; it
never touches the closed-form update rules in :mod:`ybmap.maps` and so
serves as an independent oracle for them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PoleEvaluation
from .linalg import RANK_TOL, IDEM_TOL, ProjectorState, numeric_image, numeric_kernel, projector_from_subspaces
from .maps import PARAM_TOL, check_parameters


@dataclass(frozen=True, eq=False)
class LaxSpec:
    projector: ProjectorState
    lam: complex

    def __post_init__(self):
        lam = complex(self.lam)
        if lam == 0 or not np.isfinite(lam):
            raise ValueError("lambda must be finite and nonzero")
        object.__setattr__(self, "lam", lam)

    def __call__(self, zeta):
        return lax_eval(self, zeta)


def _unpack(spec):
    if isinstance(spec, LaxSpec):
        return spec.projector, spec.lam
    p, lam = spec
    return p, complex(lam)


def _matrix(p):
    return p.matrix if isinstance(p, ProjectorState) else np.asarray(p, dtype=complex)


def _check_pole(zeta, pole, pole_margin):
    if pole_margin is None:
        pole_margin = 1e-12 * max(1.0, abs(pole))
    if abs(zeta - pole) <= pole_margin:
        raise PoleEvaluation(f"zeta = {zeta} is within {pole_margin:g} of the pole {pole}")


def lax_eval(spec, zeta, pole_margin=None):
    """``I + 2 lam / (zeta - lam) P``; ``spec`` is a LaxSpec or a ``(P, lam)`` pair."""
    p, lam = _unpack(spec)
    m = _matrix(p)
    zeta = complex(zeta)
    _check_pole(zeta, lam, pole_margin)
    return np.eye(m.shape[0]) + (2 * lam / (zeta - lam)) * m


def lax_inverse(spec, zeta, pole_margin=None):
    """Inverse of ``lax_eval``, obtained by flipping the sign of ``lam``."""
    p, lam = _unpack(spec)
    _check_pole(complex(zeta), lam, pole_margin)
    return lax_eval((p, -lam), zeta, pole_margin)


def lax_polynomial(p, lam, zeta):
    """``(zeta - lam) A(P, lam; zeta) = (zeta - lam) I + 2 lam P``."""
    m = _matrix(p)
    return (zeta - lam) * np.eye(m.shape[0]) + 2 * lam * m


@dataclass(frozen=True)
class ZetaGrid:
    """Spectral-parameter samples kept away from the poles ``+-lam_i``."""

    points: tuple
    pole_margin: float

    def check(self, lambdas):
        for z in self.points:
            for lam in lambdas:
                for pole in (lam, -lam):
                    if abs(z - pole) < self.pole_margin:
                        raise PoleEvaluation(f"grid point {z} within {self.pole_margin:g} of pole {pole}")

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def default_grid(lambdas, size=16, seed=0, pole_margin=None):
    """``size`` points on the circle of radius ``2 max|lam|``, angle-jittered by ``seed``."""
    mods = [abs(complex(l)) for l in lambdas if complex(l) != 0]
    radius = 2 * max(mods) if mods else 2.0
    if pole_margin is None:
        pole_margin = 0.1 * min(mods) if mods else 0.1
    rng = np.random.default_rng([seed, size])
    step = 2 * np.pi / size
    angles = step * (np.arange(size) + 0.5 + 0.4 * rng.uniform(-1, 1, size))
    pts = tuple(complex(z) for z in radius * np.exp(1j * angles))
    grid = ZetaGrid(pts, float(pole_margin))
    grid.check([complex(l) for l in lambdas])
    return grid


def verify_refactorization(l1, p1, l2, p2, q1, q2, grid):
    """Largest relative residual of ``A(p1,l1)A(p2,l2) - A(q2,l2)A(q1,l1)`` over ``grid``."""
    grid.check([complex(l1), complex(l2)])
    worst = 0.0
    for z in grid:
        lhs = lax_eval((p1, l1), z) @ lax_eval((p2, l2), z)
        rhs = lax_eval((q2, l2), z) @ lax_eval((q1, l1), z)
        worst = max(worst, np.linalg.norm(lhs - rhs) / (1 + np.linalg.norm(lhs)))
    return float(worst)


def refactorize_numeric(l1, p1, l2, p2, rank_tol=RANK_TOL, idem_tol=IDEM_TOL, param_tol=PARAM_TOL):
    """Solve ``A(p1,l1)A(p2,l2) = A(q2,l2)A(q1,l1)`` for ``(q1, q2)``.

    At ``zeta = l1`` the right-hand side has kernel ``ker q1``; at
    ``zeta = l2`` its image is ``im q2``.  Inverting both sides turns
    the factors into ``A(., -l)`` and the zeros at ``-l1``, ``-l2`` give
    ``im q1`` and ``ker q2``.  Subspace dimensions are fixed by the input
    ranks.
    """
    check_parameters(l1, l2, param_tol)
    l1, l2 = complex(l1), complex(l2)
    n = p1.ambient_dim
    k1, k2 = p1.rank, p2.rank

    def forward(z):
        return lax_polynomial(p1, l1, z) @ lax_polynomial(p2, l2, z)

    def backward(z):
        return lax_polynomial(p2, -l2, z) @ lax_polynomial(p1, -l1, z)

    ker1 = numeric_kernel(forward(l1), rank_tol, dim=n - k1)
    im2 = numeric_image(forward(l2), rank_tol, dim=k2)
    im1 = numeric_image(backward(-l1), rank_tol, dim=k1)
    ker2 = numeric_kernel(backward(-l2), rank_tol, dim=n - k2)
    hermitian = p1.hermitian and p2.hermitian and l1.imag == 0 and l2.imag == 0
    out = []
    for image, kernel in ((im1, ker1), (im2, ker2)):
        q = projector_from_subspaces(image, kernel, rank_tol)
        if hermitian:
            m = q.matrix
            if np.linalg.norm(m - m.conj().T) <= idem_tol * (1 + np.linalg.norm(m)):
                q = ProjectorState((m + m.conj().T) / 2, q.rank, q.kernel, q.image, True)
        out.append(q)
    return out[0], out[1]
