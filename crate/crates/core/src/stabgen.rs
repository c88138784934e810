//! Generalized stabilizers `W_k = U_ph X_k U_ph†` of flat-phase states.
//!
//! `W_k` only flips qubit `k`, picking up `e^{iβ_k}` on `|0⟩⟨1|_k` where
//! `β_k = α(…0_k…) − α(…1_k…)` depends on the other qubits. The `W_k` commute
//! and fix `Ψ`, and `2^{−n} Σ_i W^i = |Ψ⟩⟨Ψ|`. The group sum without the
//! `2^{−n}` has trace `2^n`, so the normalized projector is the correct one.

use crate::error::{LmeError, Result};
use crate::phasecompiler::PhaseTable;
use crate::qcore::{flat_phase, gates, site_mask};
use crate::scalar::{cis, czero, identity, lit, max_abs_diff, modulus, wrap_phase, circular_distance, CMatrix, Mat2, Real};

/// Dense `2^n × 2^n` operators are built up to this size.
pub const MAX_STABILIZER_QUBITS: usize = 10;

/// Allowed gap between the explicit and the conjugation construction.
pub const DUAL_TOL: f64 = 1e-12;

/// Tolerance on mixed second differences of `β`.
pub const FACTOR_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct StabilizerSet<T: Real> {
    table: PhaseTable<T>,
    ops: Vec<CMatrix<T>>,
    beta: Vec<Vec<T>>,
}

impl<T: Real> StabilizerSet<T> {
    pub fn n(&self) -> usize {
        self.table.n()
    }

    pub fn table(&self) -> &PhaseTable<T> {
        &self.table
    }

    pub fn ops(&self) -> &[CMatrix<T>] {
        &self.ops
    }

    /// `β_k` indexed by the other qubits in site order, lowest site most significant.
    pub fn beta(&self, k: usize) -> &[T] {
        &self.beta[k]
    }
}

/// Basis index with bit `k` (site order) inserted into the `(n−1)`-bit `rest`.
fn insert_bit(n: usize, k: usize, rest: usize, bit: usize) -> usize {
    let low_width = n - 1 - k;
    let low = rest & ((1 << low_width) - 1);
    let high = rest >> low_width;
    (high << (low_width + 1)) | (bit << low_width) | low
}

fn beta_table<T: Real>(table: &PhaseTable<T>, k: usize) -> Vec<T> {
    let n = table.n();
    (0..1usize << (n - 1))
        .map(|r| wrap_phase(table.at(insert_bit(n, k, r, 0)) - table.at(insert_bit(n, k, r, 1))))
        .collect()
}

fn explicit_form<T: Real>(n: usize, k: usize, beta: &[T]) -> CMatrix<T> {
    let dim = 1usize << n;
    let mut w = CMatrix::from_element(dim, dim, czero());
    for (r, &b) in beta.iter().enumerate() {
        let x0 = insert_bit(n, k, r, 0);
        let x1 = insert_bit(n, k, r, 1);
        w[(x0, x1)] = cis(b);
        w[(x1, x0)] = cis(-b);
    }
    w
}

/// `U_ph X_k U_ph†` computed by matrix products.
pub fn conjugation_form<T: Real>(table: &PhaseTable<T>, k: usize) -> Result<CMatrix<T>> {
    let n = table.n();
    if k >= n {
        return Err(LmeError::SiteOutOfRange { site: k, n });
    }
    check_size(n)?;
    let dim = 1usize << n;
    let uph = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(dim, table.alpha().iter().map(|&a| cis(a))));
    let mut xk = CMatrix::from_element(dim, dim, czero());
    let m = site_mask(n, k);
    for x in 0..dim {
        xk[(x ^ m, x)] = crate::scalar::cone();
    }
    Ok(&uph * xk * uph.adjoint())
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_STABILIZER_QUBITS {
        return Err(LmeError::SizeLimit { qubits: n, limit: MAX_STABILIZER_QUBITS });
    }
    Ok(())
}

/// Builds every `W_k` from `β_k` and cross-checks it against the conjugation
/// definition.
pub fn build_stabilizers<T: Real>(table: &PhaseTable<T>) -> Result<StabilizerSet<T>> {
    let n = table.n();
    check_size(n)?;
    let mut ops = Vec::with_capacity(n);
    let mut betas = Vec::with_capacity(n);
    for k in 0..n {
        let beta = beta_table(table, k);
        let w = explicit_form(n, k, &beta);
        let dev = max_abs_diff(&w, &conjugation_form(table, k)?);
        if dev > lit(DUAL_TOL) {
            return Err(LmeError::InvariantViolation(format!(
                "stabilizer {k}: explicit and conjugated forms differ by {:.3e}",
                crate::scalar::to_f64(dev)
            )));
        }
        ops.push(w);
        betas.push(beta);
    }
    Ok(StabilizerSet { table: table.clone(), ops, beta: betas })
}

/// `2^{−n} Σ_i W₁^{i₁}⋯W_n^{i_n}`, evaluated as `Π_k (1 + W_k)/2` (which
/// expands to exactly that ordered sum).
pub fn stabilizer_group_projector<T: Real>(s: &StabilizerSet<T>) -> CMatrix<T> {
    let dim = 1usize << s.n();
    let half: T = lit(0.5);
    s.ops.iter().fold(identity(dim), |acc, w| {
        let factor = (identity::<T>(dim) + w).map(|z| z * half);
        acc * factor
    })
}

/// Largest entry of `2^{−n} Σ W − |Ψ⟩⟨Ψ|`.
pub fn projector_deviation<T: Real>(s: &StabilizerSet<T>) -> Result<T> {
    let psi = flat_phase(&s.table)?;
    let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
    Ok(max_abs_diff(&stabilizer_group_projector(s), &(&v * v.adjoint())))
}

/// `H = 1 − 2^{−n} Σ W`.
pub fn parent_hamiltonian<T: Real>(s: &StabilizerSet<T>) -> CMatrix<T> {
    identity::<T>(1 << s.n()) - stabilizer_group_projector(s)
}

#[derive(Clone, Debug)]
pub struct HamiltonianSpectrum<T> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    pub gap: T,
    /// `|⟨Ψ|ground⟩|`.
    pub ground_overlap: T,
}

pub fn hamiltonian_spectrum<T: Real>(s: &StabilizerSet<T>) -> Result<HamiltonianSpectrum<T>> {
    let eig = parent_hamiltonian(s).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues: Vec<T> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let psi = flat_phase(&s.table)?;
    let ground = eig.eigenvectors.column(order[0]);
    let ip = psi.amplitudes().iter().zip(ground.iter()).fold(czero::<T>(), |acc, (a, g)| acc + a.conj() * *g);
    let gap = if eigenvalues.len() > 1 { eigenvalues[1] - eigenvalues[0] } else { T::zero() };
    Ok(HamiltonianSpectrum { eigenvalues, gap, ground_overlap: modulus(ip) })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Factorization<T: Real> {
    /// `e^{iβ} = e^{iβ₀} Π_l e^{i f_l(i_l)}` with `f_l(0) = 0`.
    Local(LocalFactors<T>),
    /// Mixed second difference on `sites` reaches `violation` (distance from 2πℤ).
    Nonlocal { sites: (usize, usize), violation: T },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalFactors<T: Real> {
    pub site: usize,
    pub offset: T,
    /// `(l, f_l(1))` for every `l ≠ site`.
    pub f: Vec<(usize, T)>,
    /// Per-site factors of `W_k`, when it is a tensor product: this needs each
    /// `f_l(1) ∈ {0, π}`, giving `V_l ∈ {1, Z}` and a phased X at `site`.
    pub tensor_factors: Option<Vec<Mat2<T>>>,
}

/// Decides whether `β_k` is a sum of single-site functions.
pub fn factorization_check<T: Real>(s: &StabilizerSet<T>, k: usize) -> Result<Factorization<T>> {
    let n = s.n();
    if k >= n {
        return Err(LmeError::SiteOutOfRange { site: k, n });
    }
    let beta = &s.beta[k];
    let others: Vec<usize> = (0..n).filter(|&l| l != k).collect();
    let m = others.len();
    let bit = |pos: usize| 1usize << (m - 1 - pos);
    let two_pi = T::two_pi();
    let tol: T = lit(FACTOR_TOL);

    let mut worst = (T::zero(), (0, 0));
    for p in 0..m {
        for q in p + 1..m {
            let (bp, bq) = (bit(p), bit(q));
            for r in 0..beta.len() {
                if r & (bp | bq) != 0 {
                    continue;
                }
                let d = beta[r | bp | bq] - beta[r | bp] - beta[r | bq] + beta[r];
                let v = circular_distance(d, two_pi);
                if v > worst.0 {
                    worst = (v, (others[p], others[q]));
                }
            }
        }
    }
    if worst.0 > tol {
        return Ok(Factorization::Nonlocal { sites: worst.1, violation: worst.0 });
    }

    let offset = beta[0];
    let f: Vec<(usize, T)> = (0..m).map(|p| (others[p], wrap_phase(beta[bit(p)] - offset))).collect();
    let pi = T::pi();
    let is_sign = |x: T| circular_distance(x, pi) < tol;
    let tensor_factors = if f.iter().all(|&(_, v)| is_sign(v)) {
        let mut mats = vec![gates::identity(); n];
        for &(l, v) in &f {
            if circular_distance(v - pi, two_pi) < tol {
                mats[l] = gates::z();
            }
        }
        mats[k] = gates::phased_x(offset);
        Some(mats)
    } else {
        None
    };
    Ok(Factorization::Local(LocalFactors { site: k, offset, f, tensor_factors }))
}
