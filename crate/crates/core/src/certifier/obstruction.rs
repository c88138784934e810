//! Analytic non-LME certificate from pairwise phased-X correlators.
//!
//! On a nondegenerate site the only admissible witnesses are phased X
//! operators, so for every pair of such sites `⟨U_i(a) ⊗ U_j(b)⟩` must vanish
//! for some phases. The correlator is real and has the form
//! `A cos(a−b) + B sin(a−b) + C cos(a+b) + D sin(a+b)`. When `C = D = 0` it is
//! `R cos(a − b − φ)` and vanishes only on `a − b ≡ φ + π/2 (mod π)`. Three such
//! pairs on a triple `(i, j, k)` can hold simultaneously only if
//! `φ_ij + φ_jk − φ_ik ≡ π/2 (mod π)`; otherwise the state is not LME.

use nalgebra::{Matrix4, Vector4};

use crate::qcore::{gates, StateVector};
use crate::scalar::{circular_distance, Real};
use crate::tracedecomp::TraceDecomposition;

/// Fitted coefficients `(A, B, C, D)` of one pair correlator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairFit<T> {
    pub sites: (usize, usize),
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> PairFit<T> {
    /// True when only the difference terms survive and they do not vanish.
    pub fn is_difference_only(&self, tol: T) -> bool {
        self.c.abs() < tol && self.d.abs() < tol && (self.a * self.a + self.b * self.b).sqrt() > tol
    }

    /// `φ` in `R cos(a − b − φ)`.
    pub fn offset(&self) -> T {
        self.b.atan2(self.a)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Obstruction<T> {
    pub triple: (usize, usize, usize),
    /// Fits for the pairs `(i, j)`, `(j, k)`, `(i, k)`.
    pub fits: [PairFit<T>; 3],
    /// Distance of `φ_ij + φ_jk − φ_ik − π/2` from the nearest multiple of `π`.
    pub inconsistency: T,
}

/// Phase pairs at which the correlator is sampled; the 4×4 system they give is
/// well conditioned (it pairs `A ± C` and `D ± B`).
fn sample_points<T: Real>() -> [(T, T); 4] {
    let h = T::frac_pi_2();
    [(T::zero(), T::zero()), (h, h), (h, T::zero()), (T::zero(), h)]
}

/// Four-point fit of `⟨U_i(a) ⊗ U_j(b)⟩` on `state`.
pub fn fit_pair_correlator<T: Real>(state: &StateVector<T>, i: usize, j: usize) -> PairFit<T> {
    let n = state.n();
    let pts = sample_points::<T>();
    let mut m = Matrix4::<T>::zeros();
    let mut rhs = Vector4::<T>::zeros();
    for (row, &(a, b)) in pts.iter().enumerate() {
        m[(row, 0)] = (a - b).cos();
        m[(row, 1)] = (a - b).sin();
        m[(row, 2)] = (a + b).cos();
        m[(row, 3)] = (a + b).sin();
        let mut ops = vec![gates::identity::<T>(); n];
        ops[i] = gates::phased_x(a);
        ops[j] = gates::phased_x(b);
        rhs[row] = state.expectation(&ops).expect("operator count matches").re;
    }
    let sol = m.lu().solve(&rhs).expect("sample points give an invertible system");
    PairFit { sites: (i, j), a: sol[0], b: sol[1], c: sol[2], d: sol[3] }
}

/// Searches triples of nondegenerate sites for inconsistent pure-difference
/// correlators. Degenerate sites are skipped, since their witnesses are not
/// restricted to phased X. `None` is inconclusive.
pub fn pairwise_cosine_obstruction<T: Real>(
    td: &TraceDecomposition<T>,
    coeff_tol: T,
    angle_tol: T,
) -> Option<Obstruction<T>> {
    let sites: Vec<usize> = (0..td.n()).filter(|&k| !td.degenerate[k]).collect();
    if sites.len() < 3 {
        return None;
    }
    let mut fits = std::collections::HashMap::new();
    let mut fit = |i: usize, j: usize| *fits.entry((i, j)).or_insert_with(|| fit_pair_correlator(&td.state_t, i, j));
    let pi = T::pi();
    for (x, &i) in sites.iter().enumerate() {
        for (y, &j) in sites.iter().enumerate().skip(x + 1) {
            let fij = fit(i, j);
            if !fij.is_difference_only(coeff_tol) {
                continue;
            }
            for &k in sites.iter().skip(y + 1) {
                let fjk = fit(j, k);
                let fik = fit(i, k);
                if !(fjk.is_difference_only(coeff_tol) && fik.is_difference_only(coeff_tol)) {
                    continue;
                }
                let mismatch = fij.offset() + fjk.offset() - fik.offset() - T::frac_pi_2();
                let inconsistency = circular_distance(mismatch, pi);
                if inconsistency > angle_tol {
                    return Some(Obstruction { triple: (i, j, k), fits: [fij, fjk, fik], inconsistency });
                }
            }
        }
    }
    None
}
