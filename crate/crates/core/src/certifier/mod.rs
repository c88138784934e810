//! LME certification.
//!
//! A state is LME iff local unitaries make all of its computational-basis
//! amplitudes equal in modulus, iff there are local unitaries `U_k` with
//! `{U^i|Ψ⟩}` an orthonormal basis. The pipeline:
//!
//! 1. trace-decompose the state;
//! 2. on nondegenerate sites look for the pairwise-cosine obstruction, the only
//!    route to a `NOT_LME` verdict;
//! 3. if every site is nondegenerate, search the torus of phased-X witnesses;
//! 4. otherwise, or if that fails, minimize the flatness objective over local
//!    unitaries from many seeded starts;
//! 5. re-verify every positive result by applying the witnesses directly.
//!
//! Optimization failure never yields `NOT_LME`; it yields `UNDETERMINED`.

mod obstruction;
mod phased;

pub use obstruction::{fit_pair_correlator, pairwise_cosine_obstruction, Obstruction, PairFit};

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;

use crate::chart::{random_su2_angles, su2, su2_angles};
use crate::error::{LmeError, Result};
use crate::optimize::{levenberg_marquardt, restart_rng, LmOptions};
use crate::qcore::{apply_mat2, gates, LocalUnitarySet, StateVector};
use crate::scalar::{czero, lit, modulus, norm_sqr, CMatrix, Mat2, Real};
use crate::tracedecomp::{trace_decompose, TraceDecomposition};
use phased::PhasedCorrelators;

/// Largest torus grid evaluated exhaustively (`32⁴`).
pub const GRID_CAP: usize = 1 << 20;

/// Restarts evaluated together; early exit happens between batches.
const BATCH: usize = 8;

/// Grid points handed to local refinement.
const REFINE_STARTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Lme,
    NotLme,
    Undetermined,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Lme => "LME",
            Verdict::NotLme => "NOT_LME",
            Verdict::Undetermined => "UNDETERMINED",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    AnalyticNondegenerate,
    Obstruction,
    Optimization,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::AnalyticNondegenerate => "analytic_nondegenerate",
            Method::Obstruction => "obstruction",
            Method::Optimization => "optimization",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertifierConfig<T> {
    /// Search residual required for a positive verdict.
    pub cert_tol: T,
    /// Independent re-verification threshold.
    pub verify_tol: T,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Grid points per phase on the nondegenerate torus.
    pub torus_grid: usize,
    /// Coefficient threshold for the obstruction's pure-cosine test.
    pub obstruction_tol: T,
    /// Angle threshold for the obstruction's consistency test.
    pub angle_tol: T,
}

impl<T: Real> Default for CertifierConfig<T> {
    fn default() -> Self {
        Self {
            cert_tol: lit(1e-9),
            verify_tol: lit(1e-8),
            restarts: 64,
            max_iters: 200,
            seed: 0,
            torus_grid: 32,
            obstruction_tol: lit(1e-10),
            angle_tol: lit(1e-6),
        }
    }
}

impl<T: Real> CertifierConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.cert_tol > T::zero()) || !(self.verify_tol > T::zero()) {
            return Err(LmeError::InvalidConfig("tolerances must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(LmeError::InvalidConfig("restarts must be at least 1".into()));
        }
        if self.torus_grid == 0 {
            return Err(LmeError::InvalidConfig("torus grid must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct CertificationReport<T: Real> {
    pub verdict: Verdict,
    pub method: Method,
    /// `V` with `V·Ψ` flat.
    pub flattener: Option<LocalUnitarySet<T>>,
    /// `U` with `{U^i Ψ}` orthonormal; `U_k = V_k† Z V_k`.
    pub witness: Option<LocalUnitarySet<T>>,
    pub flatness_residual: T,
    pub orthogonality_residual: T,
    pub restarts_used: usize,
    pub obstruction: Option<Obstruction<T>>,
    /// Phased-X phases on the trace form, when the analytic path ran.
    pub torus_phases: Option<Vec<T>>,
}

/// `Σ_i (|c_i|² − 2^{−n})²` with `c = locals·state`; zero iff `locals` flattens.
pub fn flatness_objective<T: Real>(state: &StateVector<T>, locals: &LocalUnitarySet<T>) -> Result<T> {
    let c = state.apply_locals(locals)?;
    Ok(flatness_of(c.amplitudes()))
}

fn flatness_of<T: Real>(amps: &[Complex<T>]) -> T {
    let flat = T::one() / lit(amps.len() as f64);
    amps.iter().fold(T::zero(), |s, a| {
        let d = norm_sqr(*a) - flat;
        s + d * d
    })
}

/// `max_{i≠0} |⟨Ψ| U₀^{i₀} ⊗ … ⊗ U_{n−1}^{i_{n−1}} |Ψ⟩|`, by direct application.
pub fn orthogonality_residual<T: Real>(state: &StateVector<T>, u: &LocalUnitarySet<T>) -> Result<T> {
    if u.n() != state.n() {
        return Err(LmeError::DimensionMismatch(format!("{} witnesses for {} qubits", u.n(), state.n())));
    }
    let mut worst = T::zero();
    let psi = state.amplitudes();
    let mut visit = |v: &[Complex<T>]| {
        let ip = psi.iter().zip(v).fold(czero::<T>(), |acc, (a, b)| acc + a.conj() * *b);
        worst = worst.max(modulus(ip));
    };
    walk_subsets(state, u.mats(), 0, psi.to_vec(), &mut visit);
    Ok(worst)
}

/// Depth-first enumeration of `U^i Ψ` over nonempty `i`.
fn walk_subsets<T: Real, F: FnMut(&[Complex<T>])>(
    state: &StateVector<T>,
    mats: &[Mat2<T>],
    start: usize,
    current: Vec<Complex<T>>,
    visit: &mut F,
) {
    for k in start..mats.len() {
        let mut next = current.clone();
        apply_mat2(&mut next, state.n(), k, &mats[k]);
        visit(&next);
        walk_subsets(state, mats, k + 1, next, visit);
    }
}

/// Gram matrix of the `2^n` states `U^i Ψ`, basis index order.
pub fn witness_gram<T: Real>(state: &StateVector<T>, u: &LocalUnitarySet<T>) -> Result<CMatrix<T>> {
    let n = state.n();
    if u.n() != n {
        return Err(LmeError::DimensionMismatch(format!("{} witnesses for {n} qubits", u.n())));
    }
    let dim = state.dim();
    let mut vecs = Vec::with_capacity(dim);
    for idx in 0..dim {
        let mut v = state.amplitudes().to_vec();
        for k in 0..n {
            if crate::qcore::site_bit(n, idx, k) == 1 {
                apply_mat2(&mut v, n, k, &u.mats()[k]);
            }
        }
        vecs.push(v);
    }
    Ok(CMatrix::from_fn(dim, dim, |r, c| {
        vecs[r].iter().zip(&vecs[c]).fold(czero(), |acc, (a, b)| acc + a.conj() * *b)
    }))
}

/// Witnesses `U_k = V_k† Z V_k` induced by a flattener.
pub fn witness_from_flattener<T: Real>(v: &LocalUnitarySet<T>) -> LocalUnitarySet<T> {
    LocalUnitarySet::from_trusted(vec![gates::z(); v.n()]).conjugate_by(v)
}

/// Runs restarts in fixed batches, stopping after the first batch with a
/// success. Picks the lowest residual, ties to the lowest index.
fn run_restarts<T, O, F>(count: usize, run: F) -> (O, usize)
where
    T: Real,
    O: Send + Clone + Outcome<T>,
    F: Fn(usize) -> O + Sync,
{
    let mut best: Option<(usize, O)> = None;
    let mut used = 0;
    let mut start = 0;
    while start < count {
        let end = (start + BATCH).min(count);
        let batch: Vec<(usize, O)> = (start..end).into_par_iter().map(|i| (i, run(i))).collect();
        used = end;
        let mut hit = false;
        for (i, o) in batch {
            hit |= o.success();
            let better = match &best {
                None => true,
                Some((bi, b)) => o.residual() < b.residual() || (o.residual() == b.residual() && i < *bi),
            };
            if better {
                best = Some((i, o));
            }
        }
        if hit {
            break;
        }
        start = end;
    }
    (best.expect("count ≥ 1").1, used)
}

trait Outcome<T> {
    fn residual(&self) -> T;
    fn success(&self) -> bool;
}

/// Result of the phased-X torus search.
#[derive(Clone, Debug)]
pub struct PhaseSearch<T> {
    pub phases: Vec<T>,
    /// `max_{i≠0} |⟨U^i⟩|` at `phases`.
    pub residual: T,
    pub success: bool,
    /// Local refinements or random restarts consumed.
    pub starts_used: usize,
}

impl<T: Real> Outcome<T> for PhaseSearch<T> {
    fn residual(&self) -> T {
        self.residual
    }
    fn success(&self) -> bool {
        self.success
    }
}

/// Searches phases `α` with `U_k = e^{iα_k Z/2} X e^{−iα_k Z/2}` making
/// `{U^i Ψ_t}` orthonormal, where `Ψ_t` is the trace form.
///
/// Requires every site to be nondegenerate: only then is the witness family
/// forced to be phased X. Up to [`GRID_CAP`] points the torus is scanned on a
/// `torus_grid^n` grid and the best points are refined; beyond that, seeded
/// random starts are refined. Failure is inconclusive.
pub fn nondegenerate_phase_search<T: Real>(td: &TraceDecomposition<T>, cfg: &CertifierConfig<T>) -> Result<PhaseSearch<T>> {
    cfg.validate()?;
    if !td.all_nondegenerate() {
        return Err(LmeError::InvalidConfig("phase search needs every reduced state nondegenerate".into()));
    }
    let n = td.n();
    let pc = PhasedCorrelators::new(&td.state_t);
    let lm = LmOptions { max_iters: cfg.max_iters, ..LmOptions::default() };
    let refine = |start: Vec<T>| -> PhaseSearch<T> {
        let res = levenberg_marquardt(|x: &[T]| pc.residual(x), start, &lm);
        let residual = pc.max_abs(&res.x);
        PhaseSearch { phases: res.x, residual, success: residual < cfg.cert_tol, starts_used: 1 }
    };

    let grid_points = cfg.torus_grid.checked_pow(n as u32).filter(|&g| g <= GRID_CAP);
    if grid_points.is_some() {
        let starts = grid_best(&pc, n, cfg.torus_grid);
        let mut best: Option<PhaseSearch<T>> = None;
        for (used, start) in starts.into_iter().enumerate() {
            let mut out = refine(start);
            out.starts_used = used + 1;
            let done = out.success;
            if best.as_ref().is_none_or(|b| out.residual < b.residual) {
                best = Some(out);
            }
            if done {
                break;
            }
        }
        let mut best = best.expect("grid is nonempty");
        best.success = best.residual < cfg.cert_tol;
        Ok(best)
    } else {
        let tau = std::f64::consts::TAU;
        let (mut best, used) = run_restarts(cfg.restarts, |i| {
            let mut rng = restart_rng(cfg.seed, i, 1);
            let start = (0..n).map(|_| lit::<T>(rng.random::<f64>() * tau)).collect();
            refine(start)
        });
        best.starts_used = used;
        Ok(best)
    }
}

/// Best [`REFINE_STARTS`] lattice points, best first.
fn grid_best<T: Real>(pc: &PhasedCorrelators<T>, n: usize, g: usize) -> Vec<Vec<T>> {
    let step = T::two_pi() / lit(g as f64);
    pc.grid_top(g, REFINE_STARTS)
        .into_iter()
        .map(|(_, index)| {
            let mut rem = index;
            let mut pt = vec![T::zero(); n];
            for k in (0..n).rev() {
                pt[k] = step * lit((rem % g) as f64);
                rem /= g;
            }
            pt
        })
        .collect()
}

#[derive(Clone, Debug)]
struct FlatSearch<T: Real> {
    flattener: LocalUnitarySet<T>,
    /// `max_{i≠0} |⟨Z^i⟩|` on the flattened state.
    z_residual: T,
    flatness: T,
    success: bool,
}

impl<T: Real> Outcome<T> for FlatSearch<T> {
    fn residual(&self) -> T {
        self.z_residual
    }
    fn success(&self) -> bool {
        self.success
    }
}

/// `max_{i≠0} |Σ_x |c_x|² (−1)^{i·x}|`, the Walsh transform of the moduli.
fn z_correlator_residual<T: Real>(amps: &[Complex<T>]) -> T {
    let mut w: Vec<T> = amps.iter().map(|a| norm_sqr(*a)).collect();
    let mut h = 1;
    while h < w.len() {
        for block in (0..w.len()).step_by(2 * h) {
            for j in block..block + h {
                let (a, b) = (w[j], w[j + h]);
                w[j] = a + b;
                w[j + h] = a - b;
            }
        }
        h *= 2;
    }
    w.iter().skip(1).fold(T::zero(), |m, v| m.max(v.abs()))
}

fn locals_from_params<T: Real>(phis: &[T], x: &[T]) -> Vec<Mat2<T>> {
    phis.iter()
        .enumerate()
        .map(|(k, &phi)| su2(x[2 * k], phi, x[2 * k + 1]))
        .collect()
}

/// Multi-start minimization of the flatness objective.
///
/// Each site uses the ZYZ chart `Rz(φ)Ry(θ)Rz(λ)`; `φ` only rephases rows, so
/// it is fixed by the start and `(θ, λ)` are optimized. Start 0 is the
/// identity. Odd starts put nondegenerate sites at `H·diag-phase·T_k`, the
/// shape every flattener of a nondegenerate site has in trace form; even
/// starts are Haar-random.
fn flatness_search<T: Real>(state: &StateVector<T>, td: &TraceDecomposition<T>, cfg: &CertifierConfig<T>) -> (FlatSearch<T>, usize) {
    let n = state.n();
    let lm = LmOptions { max_iters: cfg.max_iters, ..LmOptions::default() };
    let flat = T::one() / lit(state.dim() as f64);
    run_restarts(cfg.restarts, |i| {
        let mut rng = restart_rng(cfg.seed, i, 2);
        let mut phis = vec![T::zero(); n];
        let mut x0 = vec![T::zero(); 2 * n];
        if i > 0 {
            for k in 0..n {
                let (t, p, l) = if i % 2 == 1 && !td.degenerate[k] {
                    let theta = lit::<T>(rng.random::<f64>() * std::f64::consts::TAU);
                    su2_angles(&(gates::hadamard() * gates::phase_on_zero(theta) * td.locals.mats()[k]))
                } else {
                    random_su2_angles(&mut rng)
                };
                phis[k] = p;
                x0[2 * k] = t;
                x0[2 * k + 1] = l;
            }
        }
        let residual = |x: &[T]| -> Vec<T> {
            let mut amps = state.amplitudes().to_vec();
            for (k, m) in locals_from_params(&phis, x).iter().enumerate() {
                apply_mat2(&mut amps, n, k, m);
            }
            amps.iter().map(|a| norm_sqr(*a) - flat).collect()
        };
        let res = levenberg_marquardt(residual, x0, &lm);
        let flattener = LocalUnitarySet::from_trusted(locals_from_params(&phis, &res.x));
        let c = state.apply_locals(&flattener).expect("matching size");
        let z_residual = z_correlator_residual(c.amplitudes());
        FlatSearch {
            flattener,
            z_residual,
            flatness: flatness_of(c.amplitudes()),
            success: z_residual < cfg.cert_tol,
        }
    })
}

/// Full certification pipeline; see the module docs.
pub fn certify_lme<T: Real>(state: &StateVector<T>, cfg: &CertifierConfig<T>) -> Result<CertificationReport<T>> {
    cfg.validate()?;
    let td = trace_decompose(state);
    let n = state.n();

    let obstruction = pairwise_cosine_obstruction(&td, cfg.obstruction_tol, cfg.angle_tol);

    let mut best_flat: Option<T> = None;
    let mut best_orth = T::max_value().unwrap_or(T::one());
    let mut torus_phases = None;
    let mut restarts_used = 0;

    if td.all_nondegenerate() {
        let search = nondegenerate_phase_search(&td, cfg)?;
        // V_k = H · e^{−iα_k Z/2} · T_k, so that V_k† Z V_k = T_k† U(α_k) T_k.
        let flattener = LocalUnitarySet::from_trusted(
            search
                .phases
                .iter()
                .zip(td.locals.mats())
                .map(|(&a, t)| gates::hadamard() * gates::rz(a) * t)
                .collect(),
        );
        let witness = witness_from_flattener(&flattener);
        let flatness = flatness_objective(state, &flattener)?;
        let orth = orthogonality_residual(state, &witness)?;
        restarts_used = search.starts_used;
        torus_phases = Some(search.phases.clone());
        if obstruction.is_some() {
            return Ok(CertificationReport {
                verdict: Verdict::NotLme,
                method: Method::Obstruction,
                flattener: None,
                witness: None,
                flatness_residual: flatness,
                orthogonality_residual: orth,
                restarts_used,
                obstruction,
                torus_phases,
            });
        }
        if search.success && orth < cfg.verify_tol {
            return Ok(CertificationReport {
                verdict: Verdict::Lme,
                method: Method::AnalyticNondegenerate,
                flattener: Some(flattener),
                witness: Some(witness),
                flatness_residual: flatness,
                orthogonality_residual: orth,
                restarts_used,
                obstruction: None,
                torus_phases,
            });
        }
        best_orth = orth;
        best_flat = Some(flatness);
    } else if obstruction.is_some() {
        let flatness = flatness_objective(state, &LocalUnitarySet::identity(n))?;
        let orth = orthogonality_residual(state, &witness_from_flattener(&LocalUnitarySet::identity(n)))?;
        return Ok(CertificationReport {
            verdict: Verdict::NotLme,
            method: Method::Obstruction,
            flattener: None,
            witness: None,
            flatness_residual: flatness,
            orthogonality_residual: orth,
            restarts_used: 0,
            obstruction,
            torus_phases: None,
        });
    }

    let (found, used) = flatness_search(state, &td, cfg);
    restarts_used += used;
    let witness = witness_from_flattener(&found.flattener);
    let orth = orthogonality_residual(state, &witness)?;
    if found.success && orth < cfg.verify_tol {
        return Ok(CertificationReport {
            verdict: Verdict::Lme,
            method: Method::Optimization,
            flattener: Some(found.flattener),
            witness: Some(witness),
            flatness_residual: found.flatness,
            orthogonality_residual: orth,
            restarts_used,
            obstruction: None,
            torus_phases,
        });
    }
    let (flatness, orth) = match best_flat {
        Some(fl) if best_orth < orth => (fl, best_orth),
        _ => (found.flatness, orth),
    };
    Ok(CertificationReport {
        verdict: Verdict::Undetermined,
        method: Method::Optimization,
        flattener: None,
        witness: None,
        flatness_residual: flatness,
        orthogonality_residual: orth,
        restarts_used,
        obstruction: None,
        torus_phases,
    })
}
