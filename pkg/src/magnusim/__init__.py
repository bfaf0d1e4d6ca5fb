"""magnusim: compiles evolution under a perturbed geometrically local lattice
Hamiltonian into Pauli-rotation circuits via classically computed,
light-cone-truncated interaction-frame Magnus generators, and verifies every
stage against a dense exact-evolution reference.
"""

__version__ = "0.1.0"

from .pauli import (  # noqa: F401
    DROP_TOL,
    PauliSum,
    PauliTerm,
    add,
    adjoint,
    commutator,
    is_anti_hermitian,
    is_hermitian,
    multiply,
    multiply_sums,
    scale,
)
from .model import (  # noqa: F401
    Lattice1D,
    LocalHamiltonian,
    LocalTerm,
    build_xy_disordered,
    effective_degree,
    interaction_range,
    load_hamiltonian,
    save_hamiltonian,
)
from .lightcone import Restriction, choose_radius, measure_truncation_error, restrict  # noqa: F401
from .magnus import MagnusPlan, QuadratureRule, build_plan, conjugate_in_frame, omega1, omega2  # noqa: F401
from .circuit import (  # noqa: F401
    CircuitIR,
    FrameOp,
    GateCount,
    PauliRotation,
    choose_steps,
    compile_step,
    expand_elementary,
    pretrotterize_frames,
    realize,
    suzuki,
    trotter1,
    trotter2,
)
from .oracle import (  # noqa: F401
    dense,
    exact_evolution,
    exp_generator,
    magnus_log_reference,
    pauli_decompose,
    spectral_distance,
    top_singular_value,
)
