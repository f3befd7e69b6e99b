//! Generalized quantum mechanics for finite-dimensional closed systems.
//!
//! The crate builds history class operators from Heisenberg-picture
//! projectors, computes decoherence functionals both from operators and from
//! an explicit sum over lattice paths, checks the four defining conditions
//! (Hermiticity, normalization, positivity, superposition), and decides
//! decoherence under medium, weak and linear-positivity criteria.

pub mod coarse;
pub mod decoherence;
pub mod error;
pub mod hilbert;
pub mod histories;
pub mod pathsum;
pub mod random;
pub mod records;

pub use coarse::{Cells, CoarseGrainingMap};
pub use decoherence::{
    build_decoherence_functional, check_axioms, coarse_grain_d, decide, linear_positivity_probs,
    AxiomReport, CoarseGrainable, Criterion, DecoherenceMatrix, DecoherenceVerdict, Probability,
    Provenance,
};
pub use error::{Error, Result};
pub use hilbert::{
    evolution_operator, heisenberg_projector, validate_family, CMatrix, CVector, DensityState,
    FamilyReport, Hamiltonian, HilbertSpace, ProjectionFamily, Projector, Tolerances,
};
pub use histories::{CoarseOperators, HistoryGrid, HistoryIndex};
pub use pathsum::{
    build_d_pathsum, operator_equivalence_oracle, path_amplitude, predicate_partition, region_grid,
    region_partition, FinePath, LatticeModel, PathPartition, PathSumSet, RegionSets,
};
pub use records::{branch_records, branch_vectors, BranchRecord};

pub use num_complex::Complex64;
