//! Locally maximally entanglable (LME) states.
//!
//! An n-qubit state is LME when one controlled operation per qubit onto a
//! fresh ancilla can make system and ancillas maximally entangled. Exactly the
//! states that local unitaries bring to a flat-modulus form
//! `2^{−n/2} Σ e^{iα(i)} |i⟩` have this property. This crate decides
//! membership, produces the flat form and its phase-gate circuit, builds the
//! commuting stabilizers, and simulates the protocols that use these states.
//!
//! Everything numeric is generic over [`scalar::Real`]; the aliases below fix
//! it to `f64`.

pub mod certifier;
pub mod chart;
pub mod error;
pub mod io;
pub mod optimize;
pub mod phasecompiler;
pub mod protosim;
pub mod qcore;
pub mod scalar;
pub mod stabgen;
pub mod tracedecomp;

pub use error::{LmeError, Result};

pub type State = qcore::StateVector<f64>;
pub type Locals = qcore::LocalUnitarySet<f64>;
pub type Density = qcore::DensityMatrix<f64>;
pub type Table = phasecompiler::PhaseTable<f64>;
pub type Circuit = phasecompiler::PhaseCircuit<f64>;
pub type TraceForm = tracedecomp::TraceDecomposition<f64>;
pub type Report = certifier::CertificationReport<f64>;
pub type Config = certifier::CertifierConfig<f64>;
pub type Stabilizers = stabgen::StabilizerSet<f64>;
pub type Ensemble = protosim::EncodingEnsemble<f64>;
