//! Trace decomposition: local unitaries that make every single-qubit reduced
//! state diagonal with nonincreasing eigenvalues, so `⟨X_i⟩ = ⟨Y_i⟩ = 0`.

use num_complex::Complex;

use crate::phasecompiler::PhaseTable;
use crate::qcore::{flat_phase, gates, reduced_density, LocalUnitarySet, StateVector};
use crate::scalar::{cplx, lit, modulus, norm_sqr, Mat2, Real};

/// `|λ₁ − λ₂|` below this marks a reduced state as `½·1`.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Below this both `⟨X_i⟩` and `⟨Y_i⟩` count as zero in [`flat_to_trace`].
const BLOCH_ZERO: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct TraceDecomposition<T: Real> {
    /// `locals · input`.
    pub state_t: StateVector<T>,
    pub locals: LocalUnitarySet<T>,
    /// `(λ₁, λ₂)` per qubit with `λ₁ ≥ λ₂`.
    pub spectra: Vec<(T, T)>,
    /// `true` where the reduced state is proportional to the identity.
    pub degenerate: Vec<bool>,
}

impl<T: Real> TraceDecomposition<T> {
    pub fn n(&self) -> usize {
        self.spectra.len()
    }

    pub fn all_nondegenerate(&self) -> bool {
        self.degenerate.iter().all(|d| !d)
    }
}

/// Multiplies a vector by the phase making its first nonzero entry real positive.
fn fix_phase<T: Real>(v: [Complex<T>; 2]) -> [Complex<T>; 2] {
    let eps = lit::<T>(1e-14);
    let lead = if modulus(v[0]) > eps { v[0] } else { v[1] };
    let m = modulus(lead);
    if m <= T::zero() {
        return v;
    }
    let ph = lead.conj().unscale(m);
    [v[0] * ph, v[1] * ph]
}

/// Spectral data of a 2×2 Hermitian matrix `[[a, b], [b*, d]]`: eigenvalues
/// `λ₁ ≥ λ₂` and the unitary `U` with `U ρ U† = diag(λ₁, λ₂)`.
fn diagonalize_qubit<T: Real>(a: T, d: T, b: Complex<T>) -> ((T, T), Mat2<T>, bool) {
    let two = lit::<T>(2.0);
    let mean = (a + d) / two;
    let half = (a - d) / two;
    let r = (half * half + norm_sqr(b)).sqrt();
    let (l1, l2) = (mean + r, mean - r);
    if two * r < lit(DEGENERACY_TOL) {
        return ((l1, l2), Mat2::identity(), true);
    }
    let c1 = [b, cplx(l1 - a, T::zero())];
    let c2 = [cplx(l1 - d, T::zero()), b.conj()];
    let pick = if norm_sqr(c1[0]) + norm_sqr(c1[1]) >= norm_sqr(c2[0]) + norm_sqr(c2[1]) {
        c1
    } else {
        c2
    };
    let nrm = (norm_sqr(pick[0]) + norm_sqr(pick[1])).sqrt();
    let v1 = fix_phase([pick[0].unscale(nrm), pick[1].unscale(nrm)]);
    let v2 = fix_phase([-v1[1].conj(), v1[0].conj()]);
    // Rows of U are the conjugated eigenvectors.
    let u = Mat2::new(v1[0].conj(), v1[1].conj(), v2[0].conj(), v2[1].conj());
    ((l1, l2), u, false)
}

pub fn trace_decompose<T: Real>(state: &StateVector<T>) -> TraceDecomposition<T> {
    let n = state.n();
    let mut spectra = Vec::with_capacity(n);
    let mut degenerate = Vec::with_capacity(n);
    let mut mats = Vec::with_capacity(n);
    for site in 0..n {
        let rho = reduced_density(state, &[site]).expect("site in range");
        let m = rho.matrix();
        let (sp, u, deg) = diagonalize_qubit(m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
        spectra.push(sp);
        degenerate.push(deg);
        mats.push(u);
    }
    let locals = LocalUnitarySet::from_trusted(mats);
    let state_t = state.apply_locals(&locals).expect("matching size");
    TraceDecomposition { state_t, locals, spectra, degenerate }
}

/// Local unitaries `H·U_i` taking the flat state of `table` into trace form,
/// with `U_i = diag(e^{ix_i}, 1)` and `cot x_i = ⟨X_i⟩/⟨Y_i⟩`.
///
/// The branch of `x_i` is the one leaving the larger eigenvalue on `|0⟩`.
/// When `⟨X_i⟩ = ⟨Y_i⟩ = 0` the reduced state is already `½·1` and `x_i = 0`;
/// any value would keep it diagonal.
pub fn flat_to_trace<T: Real>(table: &PhaseTable<T>) -> LocalUnitarySet<T> {
    let psi = flat_phase(table).expect("tables always give normalized states");
    let zero = lit::<T>(BLOCH_ZERO);
    let mats = (0..psi.n())
        .map(|site| {
            let ex = psi.expectation_at(site, &gates::x()).expect("site in range").re;
            let ey = psi.expectation_at(site, &gates::y()).expect("site in range").re;
            let x = if ex.abs() < zero && ey.abs() < zero { T::zero() } else { ey.atan2(ex) };
            gates::hadamard() * gates::phase_on_zero(x)
        })
        .collect();
    LocalUnitarySet::from_trusted(mats)
}

/// `max_i (|⟨X_i⟩| + |⟨Y_i⟩|)`.
pub fn max_transverse_bloch<T: Real>(state: &StateVector<T>) -> T {
    (0..state.n())
        .map(|site| {
            let ex = state.expectation_at(site, &gates::x()).expect("site in range");
            let ey = state.expectation_at(site, &gates::y()).expect("site in range");
            modulus(ex) + modulus(ey)
        })
        .fold(T::zero(), |m, v| m.max(v))
}

/// Checks the decomposition's invariants and returns the worst violation.
pub fn invariant_residual<T: Real>(input: &StateVector<T>, td: &TraceDecomposition<T>) -> T {
    let mut worst = T::zero();
    for (site, &(l1, l2)) in td.spectra.iter().enumerate() {
        let rho = reduced_density(&td.state_t, &[site]).expect("site in range");
        let m = rho.matrix();
        worst = worst.max(modulus(m[(0, 1)]));
        worst = worst.max((m[(0, 0)].re - l1).abs());
        worst = worst.max((m[(1, 1)].re - l2).abs());
        if l1 < l2 {
            worst = worst.max(l2 - l1);
        }
    }
    let again = input.apply_locals(&td.locals).expect("matching size");
    let rebuild = again
        .amplitudes()
        .iter()
        .zip(td.state_t.amplitudes())
        .map(|(a, b)| modulus(*a - *b))
        .fold(T::zero(), |m, v| m.max(v));
    worst.max(rebuild)
}
