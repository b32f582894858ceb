"""Bockstein homomorphisms of maps between free Z/p^2-modules.

Exact linear algebra over Z/p and Z/p^2, the snake-lemma construction of
``beta: ker psi -> coker psi`` and tools that count, enumerate and sample the
Bocksteins induced by lifts of a fixed ``psi``.
"""

from .core import (
    BocksteinMatrix,
    GammaContext,
    NotInCoset,
    b_map,
    bockstein_of,
    construct_phi_for,
    gamma_context,
)
from .distribution import (
    CountReport,
    FiberCensus,
    JointTable,
    SampleReport,
    count_report,
    exhaustive_census,
    joint_census,
    sample_conditional,
    sample_unconditional,
)
from .field_linalg import (
    KernelCokernelFrame,
    MatrixModP,
    Prime,
    RrefResult,
    coker_frame,
    coker_project,
    kernel_basis,
    rref,
)
from .module_linalg import (
    BudgetExceeded,
    MatrixModP2,
    build_phi0,
    canonical_lift,
    enumerate_L0,
    enumerate_L_psi,
    reduce_mod_p,
)

__version__ = "0.1.0"
