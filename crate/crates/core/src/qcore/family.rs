use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{LmeError, Result};
use crate::phasecompiler::PhaseTable;
use crate::qcore::state::{site_bit, StateVector};
use crate::scalar::{cis, cplx, czero, lit, Real};

/// Named state families.
#[derive(Clone, Debug, PartialEq)]
pub enum Family<T: Real> {
    /// `(|0…0⟩ + |1…1⟩)/√2`.
    Ghz,
    /// Uniform superposition of the weight-one bitstrings.
    W,
    /// `|+⟩^{⊗n}`.
    Plus,
    /// Graph state of a 0/1 adjacency matrix.
    Graph(Vec<Vec<u8>>),
    /// Weighted graph state with phases `π iᵀΓi`.
    WeightedGraph(Vec<Vec<T>>),
    /// `2^{−n/2} Σ e^{iα(i)} |i⟩`.
    FlatPhase(PhaseTable<T>),
    /// Haar-random state from normalized complex Gaussian amplitudes.
    Random { seed: u64 },
}

pub fn make_family<T: Real>(kind: &Family<T>, n: usize) -> Result<StateVector<T>> {
    if n == 0 {
        return Err(LmeError::NoQubits);
    }
    match kind {
        Family::Ghz => {
            let h = T::one() / lit::<T>(2.0).sqrt();
            let mut amps = vec![czero(); 1 << n];
            amps[0] = cplx(h, T::zero());
            amps[(1 << n) - 1] += cplx(h, T::zero());
            StateVector::normalized(n, amps)
        }
        Family::W => {
            let a = T::one() / lit::<T>(n as f64).sqrt();
            let mut amps = vec![czero(); 1 << n];
            for k in 0..n {
                amps[1 << k] = cplx(a, T::zero());
            }
            StateVector::new(n, amps)
        }
        Family::Plus => StateVector::plus(n),
        Family::Graph(adj) => flat_phase(&graph_table(n, adj)?),
        Family::WeightedGraph(gamma) => flat_phase(&weighted_graph_table(n, gamma)?),
        Family::FlatPhase(table) => {
            if table.n() != n {
                return Err(LmeError::MalformedTable(format!(
                    "table describes {} qubits, requested {n}",
                    table.n()
                )));
            }
            flat_phase(table)
        }
        Family::Random { seed } => Ok(random_state(n, *seed)),
    }
}

/// Flat-phase state `2^{−n/2} Σ e^{iα(i)} |i⟩`.
pub fn flat_phase<T: Real>(table: &PhaseTable<T>) -> Result<StateVector<T>> {
    let a = T::one() / lit::<T>(table.alpha().len() as f64).sqrt();
    let amps = table.alpha().iter().map(|&p| cis(p).scale(a)).collect();
    StateVector::new(table.n(), amps)
}

/// Haar-distributed state, deterministic in `seed`.
pub fn random_state<T: Real>(n: usize, seed: u64) -> StateVector<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<Complex<T>> = (0..1usize << n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            cplx(lit(re), lit(im))
        })
        .collect();
    StateVector::normalized(n, amps).expect("gaussian vector is nonzero")
}

/// Adjacency matrix from an edge list of 0-based qubit pairs.
pub fn adjacency_from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Vec<Vec<u8>>> {
    let mut adj = vec![vec![0u8; n]; n];
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(LmeError::MalformedAdjacency(format!("edge ({a}, {b}) out of range")));
        }
        if a == b {
            return Err(LmeError::MalformedAdjacency(format!("self-loop on qubit {a}")));
        }
        adj[a][b] = 1;
        adj[b][a] = 1;
    }
    Ok(adj)
}

fn check_square<X: Copy + PartialEq>(n: usize, m: &[Vec<X>], zero: X) -> Result<()> {
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(LmeError::MalformedAdjacency(format!("expected a {n}×{n} matrix")));
    }
    for j in 0..n {
        if m[j][j] != zero {
            return Err(LmeError::MalformedAdjacency(format!("nonzero diagonal at {j}")));
        }
        for k in 0..j {
            if m[j][k] != m[k][j] {
                return Err(LmeError::MalformedAdjacency(format!("asymmetric at ({j}, {k})")));
            }
        }
    }
    Ok(())
}

/// Phases of a graph state: `α(i) = π Σ_{j<k} Γ_jk i_j i_k`.
///
/// Each edge contributes one controlled-Z, so a single edge puts `π` on `|11⟩`.
pub fn graph_table<T: Real>(n: usize, adj: &[Vec<u8>]) -> Result<PhaseTable<T>> {
    check_square(n, adj, 0u8)?;
    if adj.iter().flatten().any(|&x| x > 1) {
        return Err(LmeError::MalformedAdjacency("entries must be 0 or 1".into()));
    }
    let alpha = (0..1usize << n)
        .map(|idx| {
            let mut count = 0u32;
            for j in 0..n {
                for k in j + 1..n {
                    if adj[j][k] == 1 && site_bit(n, idx, j) == 1 && site_bit(n, idx, k) == 1 {
                        count += 1;
                    }
                }
            }
            T::pi() * lit((count % 2) as f64)
        })
        .collect();
    PhaseTable::from_phases(n, alpha)
}

/// Phases of a weighted graph state: `α(i) = π iᵀΓi` over both orderings of
/// each pair, so an edge of weight `w` carries the two-body phase `2πw`.
pub fn weighted_graph_table<T: Real>(n: usize, gamma: &[Vec<T>]) -> Result<PhaseTable<T>> {
    check_square(n, gamma, T::zero())?;
    let alpha = (0..1usize << n)
        .map(|idx| {
            let mut s = T::zero();
            for j in 0..n {
                for k in 0..n {
                    if site_bit(n, idx, j) == 1 && site_bit(n, idx, k) == 1 {
                        s += gamma[j][k];
                    }
                }
            }
            T::pi() * s
        })
        .collect();
    PhaseTable::from_phases(n, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w3_amplitudes() {
        let w = make_family::<f64>(&Family::W, 3).unwrap();
        let a = 1.0 / 3f64.sqrt();
        for (idx, amp) in w.amplitudes().iter().enumerate() {
            let expected = if [0b001, 0b010, 0b100].contains(&idx) { a } else { 0.0 };
            assert!((amp.re - expected).abs() < 1e-15 && amp.im == 0.0);
        }
    }

    #[test]
    fn single_edge_graph_phases() {
        let adj = adjacency_from_edges(2, &[(0, 1)]).unwrap();
        let t = graph_table::<f64>(2, &adj).unwrap();
        assert_eq!(t.alpha()[..3], [0.0, 0.0, 0.0]);
        assert!((t.alpha()[3] - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn zero_table_is_plus_state() {
        let t = PhaseTable::<f64>::zeros(3).unwrap();
        let s = make_family(&Family::FlatPhase(t), 3).unwrap();
        assert_eq!(s, StateVector::plus(3).unwrap());
    }

    #[test]
    fn random_is_reproducible_and_normalized() {
        let a = make_family::<f64>(&Family::Random { seed: 7 }, 4).unwrap();
        let b = make_family::<f64>(&Family::Random { seed: 7 }, 4).unwrap();
        let c = make_family::<f64>(&Family::Random { seed: 8 }, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!((a.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn malformed_inputs_rejected() {
        assert!(graph_table::<f64>(2, &[vec![1, 0], vec![0, 0]]).is_err());
        assert!(graph_table::<f64>(2, &[vec![0, 1], vec![0, 0]]).is_err());
        assert!(weighted_graph_table::<f64>(2, &[vec![0.0, 0.1]]).is_err());
        assert!(adjacency_from_edges(2, &[(0, 2)]).is_err());
        let t = PhaseTable::<f64>::zeros(2).unwrap();
        assert!(make_family(&Family::FlatPhase(t), 3).is_err());
    }

    #[test]
    fn weighted_graph_at_half_weight_is_graph_state() {
        let g = make_family::<f64>(&Family::WeightedGraph(vec![vec![0.0, 0.5], vec![0.5, 0.0]]), 2).unwrap();
        let adj = adjacency_from_edges(2, &[(0, 1)]).unwrap();
        let h = make_family::<f64>(&Family::Graph(adj), 2).unwrap();
        assert!((g.overlap(&h) - 1.0).abs() < 1e-14);
    }
}
