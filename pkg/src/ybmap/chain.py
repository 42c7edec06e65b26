"""Periodic chains of Lax factors and their transfer-map dynamics.

The monodromy of a chain is ``M(zeta) = A(P_1, l_1) A(P_2, l_2) ... A(P_N, l_N)``.
One transfer step carries site 1 through all the others by pairwise
refactorization::

    A(y, l_1) A(P_k, l_k) = A(P_k~, l_k) A(y', l_1),   k = 2..N

and returns ``(y_final, P_2~, ..., P_N~)`` with the parameters in their
original order.  The new monodromy is ``C M C^-1`` with
``C = A(y_final, l_1)``, so the characteristic polynomial of ``M(zeta)``
is conserved at every ``zeta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import io
from .errors import YBMapError
from .lax import ZetaGrid, default_grid, lax_eval
from .linalg import ProjectorState, random_projector
from .maps import projector_map


@dataclass(frozen=True, eq=False)
class Chain:
    sites: tuple
    ambient_dim: int

    def __post_init__(self):
        sites = tuple((p, complex(lam)) for p, lam in self.sites)
        for i, (p, _) in enumerate(sites):
            if p.ambient_dim != self.ambient_dim:
                raise ValueError(f"site {i + 1} has dimension {p.ambient_dim}, chain has {self.ambient_dim}")
        object.__setattr__(self, "sites", sites)

    def __len__(self):
        return len(self.sites)

    @property
    def lambdas(self):
        return [lam for _, lam in self.sites]

    @property
    def projectors(self):
        return [p for p, _ in self.sites]

    def to_json(self):
        return {"ambient_dim": self.ambient_dim,
                "sites": [{"lambda": io.encode_complex(lam), "projector": io.encode_matrix(p.matrix)}
                          for p, lam in self.sites]}

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or "ambient_dim" not in obj or "sites" not in obj:
            raise io.InputError('chain needs "ambient_dim" and "sites"')
        n = obj["ambient_dim"]
        if not isinstance(n, int) or n < 1:
            raise io.InputError("ambient_dim must be a positive integer", "ambient_dim")
        if not isinstance(obj["sites"], list):
            raise io.InputError("sites must be a list", "sites")
        sites = []
        for i, rec in enumerate(obj["sites"]):
            state, lam = io.decode_state(rec, f"sites[{i}]")
            if not isinstance(state, ProjectorState):
                raise io.InputError("chain sites must hold projectors", f"sites[{i}]")
            if state.ambient_dim != n:
                raise io.InputError(f"projector is not {n} x {n}", f"sites[{i}].projector")
            sites.append((state, lam))
        return cls(tuple(sites), n)


def monodromy(chain, zeta):
    """Ordered product of the site Lax matrices at ``zeta``."""
    m = np.eye(chain.ambient_dim, dtype=complex)
    for p, lam in chain.sites:
        m = m @ lax_eval((p, lam), zeta)
    return m


def transfer_map(chain):
    """Sweep site 1 through the chain; see the module docstring."""
    if len(chain) <= 1:
        return chain
    y, l1 = chain.sites[0]
    new_sites = []
    for k, (p, lam) in enumerate(chain.sites[1:], start=2):
        try:
            y, pk = projector_map(l1, y, lam, p)
        except YBMapError as exc:
            raise type(exc)(f"site {k}: {exc}") from exc
        new_sites.append((pk, lam))
    return Chain(((y, l1), *new_sites), chain.ambient_dim)


def char_coefficients(m):
    """Coefficients of the monic characteristic polynomial, leading term first."""
    return np.poly(m).astype(complex)


def spectral_invariants(chain, grid):
    """Characteristic coefficients of ``M(zeta_j)``, one row per grid point."""
    grid.check(chain.lambdas)
    return np.array([char_coefficients(monodromy(chain, z)) for z in grid])


def determinant_formula(chain, zeta):
    """``prod_i ((zeta + l_i) / (zeta - l_i)) ** rank_i``."""
    out = 1.0 + 0j
    for p, lam in chain.sites:
        out *= ((zeta + lam) / (zeta - lam)) ** p.rank
    return out


def invariant_drift(current, reference):
    """Largest coefficient change relative to ``1 + |reference|``."""
    return float(np.max(np.abs(current - reference) / (1 + np.abs(reference))))


@dataclass
class Trajectory:
    chains: list
    drifts: list = field(default_factory=list)
    det_errors: list = field(default_factory=list)

    @property
    def max_drift(self):
        return max(self.drifts) if self.drifts else 0.0

    def records(self):
        """One JSON-ready record per step."""
        return [{"step": i, "drift": d, "det_error": e, "chain": c.to_json()}
                for i, (c, d, e) in enumerate(zip(self.chains, self.drifts, self.det_errors))]


def _det_error(chain, grid):
    worst = 0.0
    for z in grid:
        expected = determinant_formula(chain, z)
        got = np.linalg.det(monodromy(chain, z))
        worst = max(worst, abs(got - expected) / abs(expected))
    return float(worst)


def iterate(chain, steps, grid=None):
    """Apply ``transfer_map`` ``steps`` times, tracking invariant drift against step 0."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if grid is None:
        grid = default_grid(chain.lambdas, size=8)
    reference = spectral_invariants(chain, grid)
    traj = Trajectory([chain], [0.0], [_det_error(chain, grid)])
    for step in range(1, steps + 1):
        try:
            chain = transfer_map(chain)
        except YBMapError as exc:
            raise type(exc)(f"step {step}: {exc}") from exc
        traj.chains.append(chain)
        traj.drifts.append(invariant_drift(spectral_invariants(chain, grid), reference))
        traj.det_errors.append(_det_error(chain, grid))
    return traj


def random_chain(rng, sites, n, ranks=None, hermitian=False, real_lambdas=False,
                 max_condition=1e2):
    """Chain with separated parameters (``|l_i -+ l_j| >= 0.1``) and random projectors."""
    from .verify import sample_lambdas

    lams = sample_lambdas(rng, sites, real=real_lambdas)
    if ranks is None:
        ranks = [int(rng.integers(1, n)) if n > 1 else 1 for _ in range(sites)]
    ps = [random_projector(rng, n, k, hermitian=hermitian, max_condition=max_condition) for k in ranks]
    return Chain(tuple(zip(ps, lams)), n)


__all__ = [
    "Chain", "Trajectory", "ZetaGrid", "char_coefficients", "determinant_formula",
    "invariant_drift", "iterate", "monodromy", "random_chain", "spectral_invariants",
    "transfer_map",
]
