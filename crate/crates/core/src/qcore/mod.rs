//! Dense statevector kernel.
//!
//! Qubits are 0-based and qubit 0 is the most significant bit of a basis
//! index: `|i₀ i₁ … i_{n−1}⟩` has index `Σ i_k 2^{n−1−k}`. Everything
//! downstream depends on this ordering.

mod density;
mod family;
mod local;
mod state;

pub use density::{complement, cut_entropy, entropy_bits, reduced_density, DensityMatrix, ENTROPY_CUTOFF};
pub(crate) use density::normalize_subset;
pub use family::{
    adjacency_from_edges, flat_phase, graph_table, make_family, random_state, weighted_graph_table, Family,
};
pub use local::{gates, LocalUnitarySet, LOCAL_UNITARY_TOL};
pub(crate) use state::apply_mat2;
pub use state::{site_bit, site_mask, unitarity_deviation, StateVector, NORM_TOL, UNITARY_TOL};
