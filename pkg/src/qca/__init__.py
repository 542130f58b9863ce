"""Quantum cellular automata on Abelian Cayley graphs.

Chiral (Weyl-type), mass-coupled (Dirac-type) and two-field electromagnetic
lattice dynamics: closed-form step operators, dispersion and group velocity,
interpolating Hamiltonians and their small wave-vector limits, exact
spectral evolution with a direct-sum oracle, coset tiling, and an exact
few-mode Fock oracle for the pair-operator statistics.
"""

from .automaton import (
    AutomatonDescriptor,
    IsotropyGroup,
    TransitionRule,
    assemble_k_operator,
    check_covariance,
    check_unitarity_conditions,
    extract_transition_matrices,
    spectrum,
)
from .cayley import (
    BrillouinZone,
    CayleyPresentation,
    Generator,
    TilingMap,
    build_presentation,
    make_tiling,
    reduce_to_zone,
    word_metric,
)
from .catalog import build_descriptor, builtin_names, validate_descriptor
from .dirac import (
    DiracDescriptor,
    coupling_unitarity_residual,
    dirac_dispersion,
    dirac_interpolating_hamiltonian,
    dirac_matrix,
    dirac_small_k_hamiltonian,
    uniqueness_probe,
)
from .evolution import (
    FieldState,
    LatticeSpec,
    WavePacketSpec,
    apply_tiling,
    make_packet,
    measure_packet_velocity,
    step_direct,
    step_spectral,
    tile_descriptor,
)
from .fock import FockOracle, fock_commutator_deviation
from .maxwell import (
    TwoFieldState,
    angular_momentum_identity_residual,
    bilinear_G,
    maxwell_residual,
    mode_maxwell_residual,
    polarization_basis,
    transverse_project,
)
from .weyl import (
    DispersionSample,
    WeylVariant,
    dispersion,
    interpolating_hamiltonian,
    small_k_hamiltonian,
    weyl_matrix,
)

__version__ = "0.1.0"
