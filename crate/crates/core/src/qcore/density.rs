use crate::error::{LmeError, Result};
use crate::qcore::state::{site_bit, StateVector};
use crate::scalar::{czero, lit, modulus, CMatrix, Real};

/// Eigenvalues below this contribute nothing to the entropy.
pub const ENTROPY_CUTOFF: f64 = 1e-14;

/// Reduced state of a subset of qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    sites: Vec<usize>,
    mat: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Number of qubits described.
    pub fn dims(&self) -> usize {
        self.sites.len()
    }

    /// Qubits of the parent state this matrix describes, ascending.
    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.mat
    }

    pub fn trace(&self) -> T {
        self.mat.diagonal().iter().fold(T::zero(), |s, d| s + d.re)
    }

    /// Eigenvalues in descending order, clamped into `[0, 1]`.
    pub fn eigenvalues(&self) -> Vec<T> {
        let mut ev: Vec<T> = self
            .mat
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .map(|x| x.max(T::zero()).min(T::one()))
            .collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }

    /// Smallest eigenvalue before clamping.
    pub fn min_eigenvalue(&self) -> T {
        self.mat
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(T::max_value().unwrap_or(T::one()), |m, x| m.min(*x))
    }

    /// Von Neumann entropy in bits.
    pub fn entropy_bits(&self) -> T {
        entropy_bits(&self.eigenvalues())
    }

    /// `max |ρ − ρ†|` entrywise.
    pub fn hermiticity_deviation(&self) -> T {
        let adj = self.mat.adjoint();
        crate::scalar::max_abs_diff(&self.mat, &adj)
    }

    /// Largest off-diagonal modulus.
    pub fn max_off_diagonal(&self) -> T {
        let d = self.mat.nrows();
        let mut m = T::zero();
        for r in 0..d {
            for c in 0..d {
                if r != c {
                    m = m.max(modulus(self.mat[(r, c)]));
                }
            }
        }
        m
    }

    /// `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &Self) -> Result<T> {
        if self.mat.shape() != other.mat.shape() {
            return Err(LmeError::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.mat.shape(),
                other.mat.shape()
            )));
        }
        let diff = &self.mat - &other.mat;
        let s = diff
            .symmetric_eigenvalues()
            .iter()
            .fold(T::zero(), |acc, x| acc + x.abs());
        Ok(s / lit(2.0))
    }

    /// Operator-norm distance to `2^{−k}·1`.
    pub fn distance_from_maximally_mixed(&self) -> T {
        let d = self.mat.nrows();
        let mixed = T::one() / lit(d as f64);
        self.mat
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(T::zero(), |m, x| m.max((*x - mixed).abs()))
    }
}

/// `−Σ λ log₂ λ`, dropping eigenvalues below [`ENTROPY_CUTOFF`].
pub fn entropy_bits<T: Real>(spectrum: &[T]) -> T {
    let cut = lit::<T>(ENTROPY_CUTOFF);
    let ln2 = T::ln_2();
    spectrum
        .iter()
        .filter(|&&l| l >= cut)
        .fold(T::zero(), |s, &l| s - l * l.ln() / ln2)
}

/// Sorts and validates a qubit subset.
pub(crate) fn normalize_subset(n: usize, subset: &[usize]) -> Result<Vec<usize>> {
    if subset.is_empty() {
        return Err(LmeError::InvalidSubset("empty subset".into()));
    }
    let mut s = subset.to_vec();
    s.sort_unstable();
    for w in s.windows(2) {
        if w[0] == w[1] {
            return Err(LmeError::InvalidSubset(format!("qubit {} repeated", w[0])));
        }
    }
    if let Some(&last) = s.last() {
        if last >= n {
            return Err(LmeError::SiteOutOfRange { site: last, n });
        }
    }
    Ok(s)
}

/// Complement of a sorted subset within `0..n`.
pub fn complement(n: usize, subset: &[usize]) -> Vec<usize> {
    (0..n).filter(|k| !subset.contains(k)).collect()
}

/// Amplitudes rearranged as a `2^{|keep|} × 2^{n−|keep|}` matrix.
pub(crate) fn split_matrix<T: Real>(state: &StateVector<T>, keep: &[usize]) -> CMatrix<T> {
    let n = state.n();
    let rest = complement(n, keep);
    let mut m = CMatrix::<T>::from_element(1 << keep.len(), 1 << rest.len(), czero());
    for (idx, a) in state.amplitudes().iter().enumerate() {
        let row = keep.iter().fold(0, |r, &k| (r << 1) | site_bit(n, idx, k));
        let col = rest.iter().fold(0, |c, &k| (c << 1) | site_bit(n, idx, k));
        m[(row, col)] = *a;
    }
    m
}

/// Partial trace over every qubit outside `keep`.
///
/// The kept qubits are ordered ascending, the lowest index being the most
/// significant bit of the reduced basis.
pub fn reduced_density<T: Real>(state: &StateVector<T>, keep: &[usize]) -> Result<DensityMatrix<T>> {
    let keep = normalize_subset(state.n(), keep)?;
    let m = split_matrix(state, &keep);
    let mat = &m * m.adjoint();
    Ok(DensityMatrix { sites: keep, mat })
}

/// Entanglement entropy (bits) between `subset` and its complement.
pub fn cut_entropy<T: Real>(state: &StateVector<T>, subset: &[usize]) -> Result<T> {
    let keep = normalize_subset(state.n(), subset)?;
    if keep.len() == state.n() {
        return Err(LmeError::InvalidSubset("subset must be proper".into()));
    }
    Ok(reduced_density(state, &keep)?.entropy_bits())
}
