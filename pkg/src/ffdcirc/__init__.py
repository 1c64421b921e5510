"""Quantum circuits with hidden free-fermion spectra.

Exact Pauli-string algebra, bond-algebra representations, circuit assembly,
a spectral counting test for free-fermionic spectra, transfer-matrix
factorizations into local gates, and the generalized three-family chain.
"""

__version__ = "0.1.0"

from .algebras import (
    AlgebraWord,
    RepKind,
    Representation,
    boundary_operator,
    build_representation,
    central_elements,
    normal_order,
    transpose_sign,
    verify_relations,
)
from .circuits import (
    CircuitGeometry,
    Gate,
    assemble,
    gate_unitary,
    named_geometry,
    parse_geometry,
    simplify,
)
from .genmodel import (
    GenAngles,
    GenCouplings,
    check_angle_constraint,
    gen_angles,
    gen_char_polys,
    gen_factor_G,
    gen_hamiltonian,
    gen_operators,
    gen_quasi_energies,
    gen_transfer,
    gen_unitary_circuit,
    verify_gen_commutation,
)
from .pauli import PauliString
from .spectral import (
    SpectralSignature,
    Verdict,
    classify,
    cluster_distinct,
    eigenphases,
    extract_modes,
    ratio_signature,
)
from .transfer import (
    CharPolynomial,
    QuasiEnergySet,
    StaircaseAngles,
    char_poly,
    charge,
    couplings_from_angles,
    fermion_ops,
    g1_commuting_charge,
    hamiltonian,
    hermitian_staircase,
    homogeneous_commuting_H,
    ising_charge,
    ladder_oracle,
    predicted_phases,
    quasi_energies,
    transfer_dense,
    unitary_angles_from_couplings,
    unitary_staircase,
)

__all__ = [
    "AlgebraWord",
    "CharPolynomial",
    "CircuitGeometry",
    "Gate",
    "GenAngles",
    "GenCouplings",
    "PauliString",
    "QuasiEnergySet",
    "RepKind",
    "Representation",
    "SpectralSignature",
    "StaircaseAngles",
    "Verdict",
    "assemble",
    "boundary_operator",
    "build_representation",
    "central_elements",
    "char_poly",
    "charge",
    "check_angle_constraint",
    "classify",
    "cluster_distinct",
    "couplings_from_angles",
    "eigenphases",
    "extract_modes",
    "fermion_ops",
    "g1_commuting_charge",
    "gate_unitary",
    "gen_angles",
    "gen_char_polys",
    "gen_factor_G",
    "gen_hamiltonian",
    "gen_operators",
    "gen_quasi_energies",
    "gen_transfer",
    "gen_unitary_circuit",
    "hamiltonian",
    "hermitian_staircase",
    "homogeneous_commuting_H",
    "ising_charge",
    "ladder_oracle",
    "named_geometry",
    "normal_order",
    "parse_geometry",
    "predicted_phases",
    "quasi_energies",
    "ratio_signature",
    "simplify",
    "transfer_dense",
    "transpose_sign",
    "unitary_angles_from_couplings",
    "unitary_staircase",
    "verify_gen_commutation",
    "verify_relations",
]
