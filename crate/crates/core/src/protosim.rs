//! Protocol simulations on system + ancilla registers.
//!
//! With `n` system qubits the joint register has `2n` qubits: system sites
//! `0..n` followed by ancilla sites `n..2n`, ancilla `n + l` paired with
//! system site `l`. Ancillas start in `|+⟩`.

use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;

use crate::chart::{su4, two_qubit_paulis, SU4_DIM};
use crate::error::{LmeError, Result};
use crate::optimize::{minimize_bfgs, restart_rng, BfgsOptions};
use crate::phasecompiler::{PhaseTable, FLAT_TOL};
use crate::qcore::{
    cut_entropy, gates, make_family, normalize_subset, reduced_density, site_mask, unitarity_deviation,
    DensityMatrix, Family, StateVector,
};
use crate::scalar::{cis, czero, kron_all, lit, to_f64, CMatrix, Mat2, Real};

/// Dense limit for the joint register.
pub const MAX_JOINT_QUBITS: usize = 22;

/// `|S − n|` below this counts as maximal entanglement.
pub const MAXIMAL_TOL: f64 = 1e-8;

const SPEC_UNITARY_TOL: f64 = 1e-12;

/// Per-site controlled gates `C_l = U_l⁰ ⊗ |0⟩⟨0| + U_l¹ ⊗ |1⟩⟨1|`.
#[derive(Clone, Debug)]
pub struct ControlledGateSpec<T: Real> {
    pairs: Vec<(Mat2<T>, Mat2<T>)>,
}

impl<T: Real> ControlledGateSpec<T> {
    pub fn new(pairs: Vec<(Mat2<T>, Mat2<T>)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(LmeError::NoQubits);
        }
        for (u0, u1) in &pairs {
            let dev = unitarity_deviation(u0).max(unitarity_deviation(u1));
            if dev > lit(SPEC_UNITARY_TOL) {
                return Err(LmeError::NotUnitary { deviation: to_f64(dev) });
            }
        }
        Ok(Self { pairs })
    }

    /// `U⁰ = 1`, `U¹ = Z` everywhere.
    pub fn pi_phase(n: usize) -> Result<Self> {
        Self::new(vec![(gates::identity(), gates::z()); n])
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(vec![(gates::identity(), gates::identity()); n])
    }

    /// `U⁰ = 1`, `U¹ = U_l`.
    pub fn from_witness(u: &[Mat2<T>]) -> Result<Self> {
        Self::new(u.iter().map(|m| (gates::identity(), *m)).collect())
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(Mat2<T>, Mat2<T>)] {
        &self.pairs
    }
}

/// `Ψ ⊗ |+⟩^{⊗n}` on the joint register.
fn with_plus_ancillas<T: Real>(state: &StateVector<T>) -> Result<StateVector<T>> {
    let n = state.n();
    if 2 * n > MAX_JOINT_QUBITS {
        return Err(LmeError::SizeLimit { qubits: 2 * n, limit: MAX_JOINT_QUBITS });
    }
    Ok(state.tensor(&StateVector::plus(n)?))
}

/// Applies `U⁰` or `U¹` to system `site` depending on the paired ancilla bit.
fn apply_controlled<T: Real>(amps: &mut [num_complex::Complex<T>], n: usize, site: usize, u0: &Mat2<T>, u1: &Mat2<T>) {
    let total = 2 * n;
    let sm = site_mask(total, site);
    let am = site_mask(total, n + site);
    for x in 0..amps.len() {
        if x & sm != 0 {
            continue;
        }
        let u = if x & am == 0 { u0 } else { u1 };
        let (a, b) = (amps[x], amps[x | sm]);
        amps[x] = u[(0, 0)] * a + u[(0, 1)] * b;
        amps[x | sm] = u[(1, 0)] * a + u[(1, 1)] * b;
    }
}

/// `C₁ ⊗ ⋯ ⊗ C_n |Ψ⟩|+⟩^{⊗n}`.
pub fn entangle_ancillas<T: Real>(state: &StateVector<T>, spec: &ControlledGateSpec<T>) -> Result<StateVector<T>> {
    let n = state.n();
    if spec.n() != n {
        return Err(LmeError::DimensionMismatch(format!("{} controlled gates for {n} qubits", spec.n())));
    }
    let joint = with_plus_ancillas(state)?;
    let mut amps = joint.into_amplitudes();
    for (l, (u0, u1)) in spec.pairs.iter().enumerate() {
        apply_controlled(&mut amps, n, l, u0, u1);
    }
    Ok(StateVector::from_raw(2 * n, amps))
}

#[derive(Clone, Debug)]
pub struct MaximalityReport<T> {
    /// Entropy of the system half, in bits.
    pub entropy_bits: T,
    /// `‖ρ_system − 2^{−n}·1‖` in operator norm.
    pub mixedness_deviation: T,
    pub maximal: bool,
}

/// Entanglement across the system/ancilla cut of a joint register.
pub fn verify_maximal<T: Real>(joint: &StateVector<T>) -> Result<MaximalityReport<T>> {
    let total = joint.n();
    if total % 2 != 0 {
        return Err(LmeError::OddQubitCount(total));
    }
    let n = total / 2;
    let system: Vec<usize> = (0..n).collect();
    let rho = reduced_density(joint, &system)?;
    let entropy = rho.entropy_bits();
    let dev = rho.distance_from_maximally_mixed();
    Ok(MaximalityReport {
        entropy_bits: entropy,
        mixedness_deviation: dev,
        maximal: (entropy - lit(n as f64)).abs() < lit(MAXIMAL_TOL),
    })
}

/// Best cut entropy over the phased-X controlled specs `U¹_l = U(α_l)` on a
/// `grid^n` lattice; returns the entropy and its phases.
pub fn phased_x_grid_max<T: Real>(state: &StateVector<T>, grid: usize) -> Result<(T, Vec<T>)> {
    let n = state.n();
    if grid == 0 {
        return Err(LmeError::InvalidConfig("grid must be at least 1".into()));
    }
    let total = grid
        .checked_pow(n as u32)
        .filter(|&g| g <= 1 << 22)
        .ok_or_else(|| LmeError::InvalidConfig(format!("{grid}^{n} grid points is too many")))?;
    let step = T::two_pi() / lit(grid as f64);
    let system: Vec<usize> = (0..n).collect();
    let phases_of = |mut idx: usize| {
        let mut a = vec![T::zero(); n];
        for k in (0..n).rev() {
            a[k] = step * lit((idx % grid) as f64);
            idx /= grid;
        }
        a
    };
    let best = (0..total)
        .into_par_iter()
        .map(|idx| {
            let u: Vec<Mat2<T>> = phases_of(idx).into_iter().map(gates::phased_x).collect();
            let spec = ControlledGateSpec::from_witness(&u)?;
            let s = cut_entropy(&entangle_ancillas(state, &spec)?, &system)?;
            Ok((s, idx))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(None::<(T, usize)>, |acc, (s, i)| match acc {
            Some((bs, _)) if bs >= s => acc,
            _ => Some((s, i)),
        })
        .expect("grid is nonempty");
    Ok((best.0, phases_of(best.1)))
}

/// `Z^{b₁} ⊗ ⋯ ⊗ Z^{b_n} |base⟩`, as a sign per basis state.
fn apply_z_pattern<T: Real>(base: &StateVector<T>, pattern: usize) -> StateVector<T> {
    let amps = base
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(x, a)| if (x & pattern).count_ones() % 2 == 1 { -*a } else { *a })
        .collect();
    StateVector::from_raw(base.n(), amps)
}

fn check_flat<T: Real>(base: &StateVector<T>) -> Result<()> {
    let dev = base.flatness_deviation();
    if dev > lit(FLAT_TOL) {
        return Err(LmeError::NotFlat { max_deviation: to_f64(dev) });
    }
    Ok(())
}

fn bits_to_pattern(n: usize, bits: &[u8]) -> Result<usize> {
    if bits.len() != n {
        return Err(LmeError::LengthMismatch { len: bits.len(), expected: n });
    }
    bits.iter().enumerate().try_fold(0usize, |acc, (k, &b)| match b {
        0 => Ok(acc),
        1 => Ok(acc | site_mask(n, k)),
        _ => Err(LmeError::InvalidConfig(format!("bit {k} is {b}, expected 0 or 1"))),
    })
}

/// Each party `k` applies `Z^{bits[k]}` to its qubit of a flat state.
pub fn encode_bits<T: Real>(base: &StateVector<T>, bits: &[u8]) -> Result<StateVector<T>> {
    check_flat(base)?;
    Ok(apply_z_pattern(base, bits_to_pattern(base.n(), bits)?))
}

/// All `2^n` encodings of a flat state.
#[derive(Clone, Debug)]
pub struct EncodingEnsemble<T: Real> {
    base: StateVector<T>,
    /// Indexed by bitstring, party 0 most significant.
    states: Vec<StateVector<T>>,
}

impl<T: Real> EncodingEnsemble<T> {
    pub fn base(&self) -> &StateVector<T> {
        &self.base
    }

    pub fn states(&self) -> &[StateVector<T>] {
        &self.states
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn gram(&self) -> CMatrix<T> {
        let m = self.states.len();
        CMatrix::from_fn(m, m, |r, c| self.states[r].inner(&self.states[c]))
    }

    pub fn gram_max_off_diagonal(&self) -> T {
        let g = self.gram();
        let mut worst = T::zero();
        for r in 0..g.nrows() {
            for c in 0..g.ncols() {
                if r != c {
                    worst = worst.max(crate::scalar::modulus(g[(r, c)]));
                }
            }
        }
        worst
    }

    /// Numerical rank of the Gram matrix at threshold `tol`.
    pub fn gram_rank(&self, tol: T) -> usize {
        self.gram().symmetric_eigenvalues().iter().filter(|e| e.abs() > tol).count()
    }
}

pub fn build_ensemble<T: Real>(base: &StateVector<T>) -> Result<EncodingEnsemble<T>> {
    check_flat(base)?;
    let states = (0..base.dim()).map(|p| apply_z_pattern(base, p)).collect();
    Ok(EncodingEnsemble { base: base.clone(), states })
}

/// Trace distance between the `subset` marginals of encodings `b` and `b2`.
pub fn marginal_distance<T: Real>(ensemble: &EncodingEnsemble<T>, subset: &[usize], b: usize, b2: usize) -> Result<T> {
    let m = ensemble.states.len();
    if b >= m || b2 >= m {
        return Err(LmeError::InvalidConfig(format!("bitstring index out of range for {} parties", ensemble.n())));
    }
    let r1 = reduced_density(&ensemble.states[b], subset)?;
    let r2 = reduced_density(&ensemble.states[b2], subset)?;
    r1.trace_distance(&r2)
}

/// Largest trace distance between `subset` marginals of encodings that agree
/// on `subset` and differ elsewhere. Zero means the parties in `subset`
/// learn nothing about the other parties' bits.
pub fn local_leak_check<T: Real>(ensemble: &EncodingEnsemble<T>, subset: &[usize]) -> Result<T> {
    let n = ensemble.n();
    let keep = normalize_subset(n, subset)?;
    if keep.len() == n {
        return Err(LmeError::InvalidSubset("subset must be proper".into()));
    }
    let amask = keep.iter().fold(0usize, |m, &k| m | site_mask(n, k));
    let marginals: Vec<DensityMatrix<T>> = ensemble
        .states
        .par_iter()
        .map(|s| reduced_density(s, &keep))
        .collect::<Result<_>>()?;
    let m = marginals.len();
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|b| (b + 1..m).map(move |c| (b, c)))
        .filter(|&(b, c)| (b ^ c) & amask == 0)
        .collect();
    pairs
        .par_iter()
        .map(|&(b, c)| marginals[b].trace_distance(&marginals[c]))
        .try_reduce(T::zero, |a, b| Ok(a.max(b)))
}

/// `U_Ψ = U_ph H^{⊗n}`, whose column `i` is `Z^i |Ψ⟩`.
pub fn jamiolkowski_unitary<T: Real>(table: &PhaseTable<T>) -> Result<CMatrix<T>> {
    let n = table.n();
    if n > MAX_JOINT_QUBITS / 2 {
        return Err(LmeError::SizeLimit { qubits: n, limit: MAX_JOINT_QUBITS / 2 });
    }
    let dim = 1usize << n;
    let uph = CMatrix::from_diagonal(&DVector::from_iterator(dim, table.alpha().iter().map(|&a| cis(a))));
    Ok(uph * kron_all(&vec![gates::hadamard(); n]))
}

/// `(U ⊗ 1) Σ_i |i⟩|i⟩ / 2^{n/2}` on the joint register.
///
/// With `U = U_Ψ` this equals `entangle_ancillas(Ψ, π-phase)` exactly: the
/// ancilla in `|+⟩` controlling `Z` leaves `Σ_a Z^a|Ψ⟩|a⟩ / 2^{n/2}`, so no
/// Hadamards on the ancilla register are needed.
pub fn choi_state<T: Real>(u: &CMatrix<T>) -> Result<StateVector<T>> {
    let dim = u.nrows();
    if dim != u.ncols() || !dim.is_power_of_two() || dim < 2 {
        return Err(LmeError::DimensionMismatch(format!("{}×{} is not a qubit operator", u.nrows(), u.ncols())));
    }
    let n = dim.trailing_zeros() as usize;
    if 2 * n > MAX_JOINT_QUBITS {
        return Err(LmeError::SizeLimit { qubits: 2 * n, limit: MAX_JOINT_QUBITS });
    }
    let scale: T = T::one() / lit::<T>(dim as f64).sqrt();
    let mut amps = vec![czero(); dim * dim];
    for x in 0..dim {
        for a in 0..dim {
            amps[(x << n) | a] = u[(x, a)] * scale;
        }
    }
    StateVector::normalized(2 * n, amps)
}

#[derive(Clone, Debug)]
pub struct LockDemoConfig {
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
}

impl Default for LockDemoConfig {
    fn default() -> Self {
        Self { seed: 0, restarts: 64, max_iters: 300 }
    }
}

#[derive(Clone, Debug)]
pub struct LockDemoReport<T> {
    /// Best system/ancilla entropy found over party 3's two-qubit gates.
    pub max_entropy: T,
    pub gap_from_3: T,
    /// Chart parameters of the best gate.
    pub best_params: Vec<T>,
    /// Entropy when party 3 does nothing.
    pub identity_entropy: T,
    /// Best entropy when every party uses a controlled phased X (24³ grid).
    pub phased_x_grid_max: T,
    pub seed: u64,
    pub restarts: usize,
}

/// Phased-X grid resolution used by the lock demo.
pub const LOCK_GRID: usize = 24;

/// W₃ with parties 0 and 1 applying controlled X and controlled Y to their
/// ancillas; party 2 applies an arbitrary two-qubit gate to its qubit and
/// ancilla. The entropy across the system/ancilla cut is maximized over that
/// gate by seeded multi-start BFGS. The result is a numerical bound, not a
/// proof.
pub fn third_party_lock_demo<T: Real>(cfg: &LockDemoConfig) -> Result<LockDemoReport<T>> {
    if cfg.restarts == 0 {
        return Err(LmeError::InvalidConfig("restarts must be at least 1".into()));
    }
    let w = make_family::<T>(&Family::W, 3)?;
    let spec = ControlledGateSpec::new(vec![
        (gates::identity(), gates::x()),
        (gates::identity(), gates::y()),
        (gates::identity(), gates::identity()),
    ])?;
    let base = entangle_ancillas(&w, &spec)?;
    let system = [0usize, 1, 2];
    let paulis = two_qubit_paulis::<T>();

    // Party 2 owns joint sites 2 and 5.
    let entropy_after = |params: &[T]| -> T {
        let mut p = [T::zero(); SU4_DIM];
        p.copy_from_slice(params);
        let g = su4(&p, &paulis);
        let mut amps = base.amplitudes().to_vec();
        apply_two_site(&mut amps, 6, 2, 5, &g);
        cut_entropy(&StateVector::from_raw(6, amps), &system).unwrap_or(T::zero())
    };

    let identity_entropy = cut_entropy(&base, &system)?;
    let opts = BfgsOptions { max_iters: cfg.max_iters, ..BfgsOptions::default() };
    let pi = std::f64::consts::PI;
    let runs: Vec<(T, Vec<T>)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = restart_rng(cfg.seed, i, 3);
            let x0: Vec<T> = (0..SU4_DIM).map(|_| lit(rng.random_range(-pi..pi))).collect();
            let res = minimize_bfgs(|x: &[T]| -entropy_after(x), x0, &opts);
            (-res.value, res.x)
        })
        .collect();
    let (max_entropy, best_params) = runs
        .into_iter()
        .fold(None::<(T, Vec<T>)>, |acc, (v, x)| match acc {
            Some((bv, _)) if bv >= v => acc,
            _ => Some((v, x)),
        })
        .expect("restarts ≥ 1");
    let (grid_max, _) = phased_x_grid_max(&w, LOCK_GRID)?;
    Ok(LockDemoReport {
        max_entropy,
        gap_from_3: lit::<T>(3.0) - max_entropy,
        best_params,
        identity_entropy,
        phased_x_grid_max: grid_max,
        seed: cfg.seed,
        restarts: cfg.restarts,
    })
}

/// Applies a 4×4 gate to sites `(a, b)`, `a` the more significant factor.
fn apply_two_site<T: Real>(amps: &mut [num_complex::Complex<T>], n: usize, a: usize, b: usize, g: &CMatrix<T>) {
    let (ma, mb) = (site_mask(n, a), site_mask(n, b));
    for x in 0..amps.len() {
        if x & (ma | mb) != 0 {
            continue;
        }
        let idx = [x, x | mb, x | ma, x | ma | mb];
        let v = idx.map(|i| amps[i]);
        for (r, &i) in idx.iter().enumerate() {
            amps[i] = (0..4).fold(czero(), |s, c| s + g[(r, c)] * v[c]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasecompiler::PhaseTable;
    use crate::qcore::{adjacency_from_edges, flat_phase, graph_table};
    use crate::scalar::max_abs_diff;
    use rand::SeedableRng;

    fn random_table(n: usize, seed: u64) -> PhaseTable<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        PhaseTable::from_phases(n, (0..1 << n).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect()).unwrap()
    }

    fn system(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    #[test]
    fn identity_spec_gives_product() {
        let psi = flat_phase(&random_table(3, 1)).unwrap();
        let joint = entangle_ancillas(&psi, &ControlledGateSpec::identity(3).unwrap()).unwrap();
        let expected = psi.tensor(&StateVector::plus(3).unwrap());
        assert!(joint.overlap(&expected) > 1.0 - 1e-14);
        let rep = verify_maximal(&joint).unwrap();
        assert!(rep.entropy_bits.abs() < 1e-10);
        assert!(!rep.maximal);
    }

    #[test]
    fn pi_phase_maximally_entangles_flat_states() {
        for n in 1..=4 {
            let psi = flat_phase(&random_table(n, n as u64)).unwrap();
            let joint = entangle_ancillas(&psi, &ControlledGateSpec::pi_phase(n).unwrap()).unwrap();
            let rep = verify_maximal(&joint).unwrap();
            assert!(rep.maximal, "n={n} entropy {}", rep.entropy_bits);
            assert!(rep.mixedness_deviation < 1e-8);
        }
    }

    #[test]
    fn plus_state_pairs_up() {
        let joint = entangle_ancillas(&StateVector::<f64>::plus(3).unwrap(), &ControlledGateSpec::pi_phase(3).unwrap()).unwrap();
        // Each (system l, ancilla l) pair is a maximally entangled two-qubit state.
        for l in 0..3 {
            assert!((cut_entropy(&joint, &[l]).unwrap() - 1.0).abs() < 1e-12);
            let pair = reduced_density(&joint, &[l, 3 + l]).unwrap();
            assert!(pair.entropy_bits().abs() < 1e-10);
        }
        assert!((cut_entropy(&joint, &system(3)).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn odd_register_rejected() {
        assert!(matches!(verify_maximal(&StateVector::<f64>::zero(3).unwrap()), Err(LmeError::OddQubitCount(3))));
    }

    #[test]
    fn w_state_phased_x_grid_stays_below_three() {
        let w = make_family::<f64>(&Family::W, 3).unwrap();
        let (best, _) = phased_x_grid_max(&w, 8).unwrap();
        assert!(best < 3.0 - 1e-3, "{best}");
    }

    #[test]
    fn encoding_examples() {
        let adj = adjacency_from_edges(2, &[(0, 1)]).unwrap();
        let psi = flat_phase(&graph_table::<f64>(2, &adj).unwrap()).unwrap();
        assert!(encode_bits(&psi, &[0, 0]).unwrap().overlap(&psi) > 1.0 - 1e-15);
        let ens = build_ensemble(&psi).unwrap();
        assert!(max_abs_diff(&ens.gram(), &CMatrix::identity(4, 4)) < 1e-14);

        let psi3 = flat_phase(&random_table(3, 9)).unwrap();
        let ens3 = build_ensemble(&psi3).unwrap();
        assert!(ens3.gram_max_off_diagonal() < 1e-12);
        assert_eq!(ens3.gram_rank(1e-9), 8);
        let via_bits = encode_bits(&psi3, &[1, 0, 1]).unwrap();
        assert!(via_bits.overlap(&ens3.states()[0b101]) > 1.0 - 1e-15);
    }

    #[test]
    fn encoding_rejects_non_flat_and_bad_bits() {
        let z = StateVector::<f64>::zero(2).unwrap();
        assert!(matches!(build_ensemble(&z), Err(LmeError::NotFlat { .. })));
        let p = StateVector::<f64>::plus(2).unwrap();
        assert!(encode_bits(&p, &[1]).is_err());
        assert!(encode_bits(&p, &[1, 2]).is_err());
    }

    #[test]
    fn leak_is_zero_but_own_bits_are_visible() {
        let adj = adjacency_from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let ens = build_ensemble(&flat_phase(&graph_table::<f64>(3, &adj).unwrap()).unwrap()).unwrap();
        assert!(local_leak_check(&ens, &[0]).unwrap() < 1e-12);
        assert!(local_leak_check(&ens, &[0, 1]).unwrap() < 1e-12);
        assert!(local_leak_check(&ens, &[0, 1, 2]).is_err());

        let plus = build_ensemble(&StateVector::<f64>::plus(1).unwrap()).unwrap();
        assert!((marginal_distance(&plus, &[0], 0, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jamiolkowski_examples() {
        let h2 = kron_all(&[gates::hadamard::<f64>(), gates::hadamard()]);
        let u0 = jamiolkowski_unitary(&PhaseTable::<f64>::zeros(2).unwrap()).unwrap();
        assert!(max_abs_diff(&u0, &h2) < 1e-15);

        let adj = adjacency_from_edges(2, &[(0, 1)]).unwrap();
        let t = graph_table::<f64>(2, &adj).unwrap();
        let u = jamiolkowski_unitary(&t).unwrap();
        let cz = CMatrix::from_diagonal(&DVector::from_vec(vec![
            num_complex::Complex::new(1.0, 0.0),
            num_complex::Complex::new(1.0, 0.0),
            num_complex::Complex::new(1.0, 0.0),
            num_complex::Complex::new(-1.0, 0.0),
        ]));
        assert!(max_abs_diff(&u, &(cz * h2)) < 1e-15);
        let ens = build_ensemble(&flat_phase(&t).unwrap()).unwrap();
        for (i, s) in ens.states().iter().enumerate() {
            let col: Vec<_> = u.column(i).iter().copied().collect();
            let diff = col.iter().zip(s.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(diff < 1e-12);
        }
    }

    #[test]
    fn jamiolkowski_matches_entangling() {
        let t = random_table(3, 4);
        let u = jamiolkowski_unitary(&t).unwrap();
        assert!(max_abs_diff(&(u.adjoint() * &u), &CMatrix::identity(8, 8)) < 1e-12);
        let choi = choi_state(&u).unwrap();
        let ent = entangle_ancillas(&flat_phase(&t).unwrap(), &ControlledGateSpec::pi_phase(3).unwrap()).unwrap();
        let diff = choi
            .amplitudes()
            .iter()
            .zip(ent.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn two_site_gate_matches_kron() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let p: [f64; SU4_DIM] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let g = su4(&p, &two_qubit_paulis());
        let s = crate::qcore::random_state::<f64>(2, 3);
        let mut amps = s.amplitudes().to_vec();
        apply_two_site(&mut amps, 2, 0, 1, &g);
        let direct = &g * DVector::from_column_slice(s.amplitudes());
        let diff = amps.iter().zip(direct.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-14);
    }

    #[test]
    fn lock_demo_small() {
        let cfg = LockDemoConfig { seed: 1, restarts: 4, max_iters: 100 };
        let r = third_party_lock_demo::<f64>(&cfg).unwrap();
        assert!(r.identity_entropy < 3.0);
        assert!(r.max_entropy >= r.identity_entropy - 1e-9);
        assert!(r.max_entropy < 3.0);
    }
}
