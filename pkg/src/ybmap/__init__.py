"""Yang-Baxter maps from matrix KdV soliton collisions."""

from .chain import Chain, iterate, monodromy, spectral_invariants, transfer_map
from .errors import (
    DegeneratePairing,
    NotAProjector,
    NotComplementary,
    ParameterCollision,
    PoleEvaluation,
    RankMismatch,
    YBMapError,
)
from .kdv import kdv_residual, soliton_field
from .lax import LaxSpec, ZetaGrid, default_grid, lax_eval, lax_inverse, refactorize_numeric, verify_refactorization
from .linalg import (
    ProjectorState,
    Subspace,
    numeric_image,
    numeric_kernel,
    orthogonal_projector,
    pairing,
    projector_from_pair,
    projector_from_subspaces,
)
from .maps import MapResult, Polarization, collide, grassmannian_map, projector_map, vector_soliton_map
from .verify import VerificationReport, check_reversibility, check_yang_baxter

__version__ = "0.1.0"
