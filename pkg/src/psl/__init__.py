"""Support and Lagrangian checks for p-curvature, q-difference N-curvature and cluster data."""

__version__ = "0.1.0"

from .errors import PslError, InputError, UnsupportedMode  # noqa: E402
from .rings import construct_ring  # noqa: E402
from .multipoly import PolyRing, PolyMatrix, LaurentPoly, RatFunc  # noqa: E402
from .psupport import (  # noqa: E402
    PoissonStructure,
    SupportIdeal,
    groebner_basis,
    krull_dimension,
    lagrangian_certificate,
    poisson_bracket,
)
from .dmod import Connection, check_flat, check_lift, eigenvalue_forms, p_curvature, is_lagrangian_differential  # noqa: E402
from .qmod import QConnection, QuantumTorus, SymplecticMatrix, bernstein_step, n_curvature, is_lagrangian_q, sp_twist  # noqa: E402
from .cluster import Seed, CompatiblePair, check_compatible, isogeny_decomposition, mutate_pair, mutate_seed  # noqa: E402
from .tasks import run_task  # noqa: E402

__all__ = [
    "PslError", "InputError", "UnsupportedMode", "construct_ring",
    "PolyRing", "PolyMatrix", "LaurentPoly", "RatFunc",
    "PoissonStructure", "SupportIdeal", "groebner_basis", "krull_dimension", "lagrangian_certificate",
    "poisson_bracket", "Connection", "check_flat", "check_lift", "eigenvalue_forms", "p_curvature",
    "is_lagrangian_differential", "QConnection", "QuantumTorus", "SymplecticMatrix", "bernstein_step",
    "n_curvature", "is_lagrangian_q", "sp_twist", "Seed", "CompatiblePair", "check_compatible",
    "isogeny_decomposition", "mutate_pair", "mutate_seed", "run_task",
]
