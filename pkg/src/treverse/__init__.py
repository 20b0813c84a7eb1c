"""Generalized time-reversal operations for magnetized classical and
quantum systems: enumeration, field compatibility, spin lifts, canonical
correlators, and desk-scale molecular-dynamics verification."""

from .phasespace import (
    PhasePoint,
    SymplecticForm,
    TimeReversalOp,
    angular_momentum,
    apply,
    is_antisymplectic,
    is_involution,
    is_orthogonal,
    reverses_angular_momentum,
)
from .enumeration import (
    CapExceeded,
    ConjClass,
    EnumerationReport,
    NoAntisymmetricFamily,
    YoungTableau,
    class_size,
    classes_for,
    count_antisymmetric,
    count_binary,
    enumerate_antisymmetric,
    enumerate_binary,
    single_particle_catalog,
)
from .fields import (
    CompatReport,
    FieldSpec,
    GaugeChoice,
    InvalidOperation,
    builtin_fields,
    check_A_compat,
    check_B_compat,
    continuous_family,
    eval_field,
    find_compatible,
    species_block_constraint,
    vector_potential,
)
from .spin import (
    SU2Element,
    catalog_spin_ops,
    check_su2_preservation,
    conjugation_identity_check,
    pauli,
    so3_to_su2,
    spin_lift,
    su2_to_so3,
    verify_spin_coupling,
)
from .kubo import (
    Observable,
    SignatureError,
    SpinSystem,
    SpinTimeReversal,
    ThermalState,
    canonical_correlator,
    tr_commutes,
    verify_kubo_symmetry,
)
from .md import (
    CorrelatorEstimate,
    DiffusionTensor,
    SimConfig,
    antisymmetry_check,
    casimir_check,
    conjugacy_check,
    diffusion_tensor,
    init_state,
    step,
    vanishing_correlator_check,
    velocity_correlator,
)

__version__ = "0.1.0"
