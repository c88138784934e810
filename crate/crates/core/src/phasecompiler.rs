//! Flat-phase tables and their decomposition into generalized phase gates.
//!
//! A table `α` over `{0,1}^n` is multilinear on Boolean inputs, so it has a
//! unique expansion `α(i) = Σ_{S≠∅} φ_S Π_{k∈S} i_k (mod 2π)`. Each term is a
//! phase gate that multiplies the all-ones configuration of `S` by `e^{iφ_S}`;
//! the coefficients come from Möbius inversion over the subset lattice.

use crate::error::{LmeError, Result};
use crate::qcore::{site_mask, StateVector};
use crate::scalar::{arg, circular_distance, cis, lit, to_f64, wrap_phase, Real};

/// Phases within this distance of `0 (mod 2π)` are treated as zero.
pub const PHASE_TOL: f64 = 1e-10;

/// Modulus tolerance accepted by [`extract_phase_table`].
pub const FLAT_TOL: f64 = 1e-9;

/// `2^n` phases in `[0, 2π)` with the all-zeros entry fixed to 0.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseTable<T: Real> {
    n: usize,
    alpha: Vec<T>,
}

impl<T: Real> PhaseTable<T> {
    /// Builds a table from arbitrary real phases: the global phase is removed
    /// by subtracting `alpha[0]` and every entry is reduced into `[0, 2π)`.
    pub fn from_phases(n: usize, alpha: Vec<T>) -> Result<Self> {
        if n == 0 {
            return Err(LmeError::NoQubits);
        }
        if n >= usize::BITS as usize - 1 || alpha.len() != 1 << n {
            return Err(LmeError::MalformedTable(format!(
                "expected {} phases for {n} qubits, got {}",
                1u128 << n.min(100),
                alpha.len()
            )));
        }
        if let Some(pos) = alpha.iter().position(|a| !a.is_finite()) {
            return Err(LmeError::MalformedTable(format!("phase {pos} is not finite")));
        }
        let g = alpha[0];
        let alpha = alpha.into_iter().map(|a| wrap_phase(a - g)).collect();
        Ok(Self { n, alpha })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_phases(n, vec![T::zero(); 1usize << n.min(usize::BITS as usize - 2)])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    /// Phase of basis index `idx`.
    #[inline]
    pub fn at(&self, idx: usize) -> T {
        self.alpha[idx]
    }

    /// Largest circular distance between corresponding entries.
    pub fn max_distance(&self, other: &Self) -> T {
        self.alpha
            .iter()
            .zip(&other.alpha)
            .map(|(a, b)| circular_distance(*a - *b, T::two_pi()))
            .fold(T::zero(), |m, d| m.max(d))
    }
}

/// Diagonal gate multiplying the all-ones configuration of `qubits` by `e^{iφ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseGate<T: Real> {
    /// Sorted, 0-based.
    pub qubits: Vec<usize>,
    pub phase: T,
}

impl<T: Real> PhaseGate<T> {
    fn mask(&self, n: usize) -> usize {
        self.qubits.iter().fold(0, |m, &q| m | site_mask(n, q))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseCircuit<T: Real> {
    n: usize,
    gates: Vec<PhaseGate<T>>,
}

impl<T: Real> PhaseCircuit<T> {
    /// Validates gates: nonempty in-range subsets, no repeated subset, phases
    /// reduced into `[0, 2π)` and nonzero there.
    pub fn new(n: usize, gates: Vec<PhaseGate<T>>) -> Result<Self> {
        if n == 0 {
            return Err(LmeError::NoQubits);
        }
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(gates.len());
        for mut g in gates {
            if g.qubits.is_empty() {
                return Err(LmeError::MalformedCircuit("gate with empty qubit set".into()));
            }
            g.qubits.sort_unstable();
            g.qubits.dedup();
            if let Some(&q) = g.qubits.iter().find(|&&q| q >= n) {
                return Err(LmeError::MalformedCircuit(format!("qubit {q} out of range for {n} qubits")));
            }
            if !g.phase.is_finite() {
                return Err(LmeError::MalformedCircuit("non-finite phase".into()));
            }
            g.phase = wrap_phase(g.phase);
            if circular_distance(g.phase, T::two_pi()) < lit(PHASE_TOL) {
                return Err(LmeError::MalformedCircuit(format!("zero phase on {:?}", g.qubits)));
            }
            if !seen.insert(g.qubits.clone()) {
                return Err(LmeError::MalformedCircuit(format!("repeated subset {:?}", g.qubits)));
            }
            out.push(g);
        }
        Ok(Self { n, gates: out })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn gates(&self) -> &[PhaseGate<T>] {
        &self.gates
    }

    /// Appends a gate, e.g. `({j, n}, π)` after widening the register to
    /// attach a new qubit to qubit `j` through a controlled-Z.
    pub fn with_qubits(&self, n: usize) -> Result<Self> {
        if n < self.n {
            return Err(LmeError::MalformedCircuit("cannot shrink a circuit".into()));
        }
        Ok(Self { n, gates: self.gates.clone() })
    }

    pub fn push(&mut self, gate: PhaseGate<T>) -> Result<()> {
        let mut gates = std::mem::take(&mut self.gates);
        gates.push(gate);
        *self = Self::new(self.n, gates)?;
        Ok(())
    }
}

/// Reads the gauge-fixed phases off a flat state.
pub fn extract_phase_table<T: Real>(state: &StateVector<T>) -> Result<PhaseTable<T>> {
    let dev = state.flatness_deviation();
    if dev > lit(FLAT_TOL) {
        return Err(LmeError::NotFlat { max_deviation: to_f64(dev) });
    }
    let a0 = state.amplitudes()[0].conj();
    let alpha = state.amplitudes().iter().map(|a| arg(*a * a0)).collect();
    PhaseTable::from_phases(state.n(), alpha)
}

/// Möbius inversion of the table over the subset lattice.
///
/// Gates come out ordered by subset size, then lexicographically; phases
/// within [`PHASE_TOL`] of zero are dropped.
pub fn moebius_decompose<T: Real>(table: &PhaseTable<T>) -> PhaseCircuit<T> {
    let n = table.n();
    let mut coeff = table.alpha().to_vec();
    for b in 0..n {
        let bit = 1usize << b;
        for m in 0..coeff.len() {
            if m & bit != 0 {
                coeff[m] = wrap_phase(coeff[m] - coeff[m ^ bit]);
            }
        }
    }
    let mut gates: Vec<PhaseGate<T>> = coeff
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &phi)| circular_distance(phi, T::two_pi()) >= lit(PHASE_TOL))
        .map(|(mask, &phase)| PhaseGate { qubits: mask_to_qubits(n, mask), phase })
        .collect();
    gates.sort_by(|a, b| a.qubits.len().cmp(&b.qubits.len()).then_with(|| a.qubits.cmp(&b.qubits)));
    PhaseCircuit { n, gates }
}

/// Zeta transform: `α(i) = Σ_{S ⊆ supp(i)} φ_S (mod 2π)`.
pub fn evaluate_circuit<T: Real>(circuit: &PhaseCircuit<T>) -> PhaseTable<T> {
    let n = circuit.n();
    let mut acc = vec![T::zero(); 1 << n];
    for g in circuit.gates() {
        let m = g.mask(n);
        acc[m] = wrap_phase(acc[m] + g.phase);
    }
    for b in 0..n {
        let bit = 1usize << b;
        for m in 0..acc.len() {
            if m & bit != 0 {
                acc[m] = wrap_phase(acc[m] + acc[m ^ bit]);
            }
        }
    }
    PhaseTable { n, alpha: acc }
}

/// Largest gate size; 0 for the empty circuit.
pub fn interaction_degree<T: Real>(circuit: &PhaseCircuit<T>) -> usize {
    circuit.gates().iter().map(|g| g.qubits.len()).max().unwrap_or(0)
}

/// Applies every gate of the circuit to `|+⟩^{⊗n}`.
pub fn prepare_state<T: Real>(circuit: &PhaseCircuit<T>) -> StateVector<T> {
    let n = circuit.n();
    let mut amps = StateVector::<T>::plus(n).expect("n ≥ 1").into_amplitudes();
    for g in circuit.gates() {
        let m = g.mask(n);
        let z = cis(g.phase);
        for (idx, a) in amps.iter_mut().enumerate() {
            if idx & m == m {
                *a *= z;
            }
        }
    }
    StateVector::from_raw(n, amps)
}

fn mask_to_qubits(n: usize, mask: usize) -> Vec<usize> {
    (0..n).filter(|&q| mask & site_mask(n, q) != 0).collect()
}
