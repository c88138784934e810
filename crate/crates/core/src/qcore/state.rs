use num_complex::Complex;

use crate::error::{LmeError, Result};
use crate::qcore::LocalUnitarySet;
use crate::scalar::{cone, czero, lit, modulus, norm_sqr, to_f64, Mat2, Real};

/// Tolerance on `Σ|amps|² = 1` accepted by [`StateVector::new`].
pub const NORM_TOL: f64 = 1e-12;

/// Largest deviation from unitarity accepted by [`StateVector::apply_local`].
pub const UNITARY_TOL: f64 = 1e-10;

pub(crate) fn scaled_tol<T: Real>(tol: f64) -> T {
    let floor = T::default_epsilon() * lit(1e3);
    lit::<T>(tol).max(floor)
}

/// Bit mask of qubit `site` (0-based) in an `n`-qubit basis index.
///
/// Qubit 0 is the most significant bit, so basis index `i` reads as the
/// bitstring `i₀ i₁ … i_{n−1}` from left to right.
#[inline]
pub fn site_mask(n: usize, site: usize) -> usize {
    1usize << (n - 1 - site)
}

/// Value of qubit `site` in basis index `index`.
#[inline]
pub fn site_bit(n: usize, index: usize, site: usize) -> usize {
    (index >> (n - 1 - site)) & 1
}

/// Normalized pure state of `n` qubits over the computational basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    n: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Wraps an amplitude vector, checking length and normalization.
    pub fn new(n: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        check_len(n, amps.len())?;
        let ns: T = amps.iter().map(|a| norm_sqr(*a)).fold(T::zero(), |s, x| s + x);
        if (ns - T::one()).abs() > scaled_tol(NORM_TOL) {
            return Err(LmeError::NotNormalized { norm_sqr: to_f64(ns) });
        }
        Ok(Self { n, amps })
    }

    /// Wraps an amplitude vector after rescaling it to unit norm.
    pub fn normalized(n: usize, mut amps: Vec<Complex<T>>) -> Result<Self> {
        check_len(n, amps.len())?;
        let ns: T = amps.iter().map(|a| norm_sqr(*a)).fold(T::zero(), |s, x| s + x);
        if ns <= T::zero() {
            return Err(LmeError::NotNormalized { norm_sqr: 0.0 });
        }
        let s = T::one() / ns.sqrt();
        for a in &mut amps {
            *a = a.scale(s);
        }
        Ok(Self { n, amps })
    }

    pub(crate) fn from_raw(n: usize, amps: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n);
        Self { n, amps }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_len(n, 1 << n.min(63))?;
        if index >= 1 << n {
            return Err(LmeError::InvalidSubset(format!("basis index {index} out of range")));
        }
        let mut amps = vec![czero(); 1 << n];
        amps[index] = cone();
        Ok(Self { n, amps })
    }

    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    /// `|+⟩^{⊗n}`.
    pub fn plus(n: usize) -> Result<Self> {
        check_len(n, 1 << n.min(63))?;
        let a = T::one() / lit::<T>((1u64 << n) as f64).sqrt();
        Ok(Self { n, amps: vec![Complex::new(a, T::zero()); 1 << n] })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| norm_sqr(*a)).fold(T::zero(), |s, x| s + x)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(czero(), |acc, (a, b)| acc + a.conj() * *b)
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn overlap(&self, other: &Self) -> T {
        modulus(self.inner(other))
    }

    /// Applies a single-qubit unitary to `site`.
    pub fn apply_local(&self, site: usize, u: &Mat2<T>) -> Result<Self> {
        self.check_site(site)?;
        let dev = unitarity_deviation(u);
        if dev > scaled_tol(UNITARY_TOL) {
            return Err(LmeError::NotUnitary { deviation: to_f64(dev) });
        }
        let mut out = self.clone();
        apply_mat2(&mut out.amps, self.n, site, u);
        Ok(out)
    }

    /// Applies `U₀ ⊗ … ⊗ U_{n−1}`.
    pub fn apply_locals(&self, locals: &LocalUnitarySet<T>) -> Result<Self> {
        if locals.n() != self.n {
            return Err(LmeError::DimensionMismatch(format!(
                "{} local operators for {} qubits",
                locals.n(),
                self.n
            )));
        }
        let mut out = self.clone();
        for (site, u) in locals.mats().iter().enumerate() {
            apply_mat2(&mut out.amps, self.n, site, u);
        }
        Ok(out)
    }

    /// `⟨Ψ| op₀ ⊗ … ⊗ op_{n−1} |Ψ⟩`; operators need not be unitary.
    pub fn expectation(&self, ops: &[Mat2<T>]) -> Result<Complex<T>> {
        if ops.len() != self.n {
            return Err(LmeError::DimensionMismatch(format!(
                "{} operators for {} qubits",
                ops.len(),
                self.n
            )));
        }
        let mut phi = self.amps.clone();
        for (site, op) in ops.iter().enumerate() {
            apply_mat2(&mut phi, self.n, site, op);
        }
        Ok(self
            .amps
            .iter()
            .zip(&phi)
            .fold(czero(), |acc, (a, b)| acc + a.conj() * *b))
    }

    /// Expectation of a single operator on one site, identity elsewhere.
    pub fn expectation_at(&self, site: usize, op: &Mat2<T>) -> Result<Complex<T>> {
        self.check_site(site)?;
        let mut phi = self.amps.clone();
        apply_mat2(&mut phi, self.n, site, op);
        Ok(self
            .amps
            .iter()
            .zip(&phi)
            .fold(czero(), |acc, (a, b)| acc + a.conj() * *b))
    }

    /// Tensor product `self ⊗ other`, `self` on the leading qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(*a * *b);
            }
        }
        Self { n: self.n + other.n, amps }
    }

    /// Largest deviation of any `|amp|` from the flat value `2^{−n/2}`.
    pub fn flatness_deviation(&self) -> T {
        let flat = T::one() / lit::<T>(self.dim() as f64).sqrt();
        self.amps
            .iter()
            .map(|a| (modulus(*a) - flat).abs())
            .fold(T::zero(), |m, v| m.max(v))
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n {
            Err(LmeError::SiteOutOfRange { site, n: self.n })
        } else {
            Ok(())
        }
    }
}

fn check_len(n: usize, len: usize) -> Result<()> {
    if n == 0 {
        return Err(LmeError::NoQubits);
    }
    if n >= usize::BITS as usize - 1 {
        return Err(LmeError::SizeLimit { qubits: n, limit: usize::BITS as usize - 2 });
    }
    let expected = 1usize << n;
    if len != expected {
        return Err(LmeError::LengthMismatch { len, expected });
    }
    Ok(())
}

/// `max |(U U†)_{rc} − δ_{rc}|`.
pub fn unitarity_deviation<T: Real>(u: &Mat2<T>) -> T {
    let p = u * u.adjoint();
    let mut dev = T::zero();
    for r in 0..2 {
        for c in 0..2 {
            let target = if r == c { cone() } else { czero() };
            dev = dev.max(modulus(p[(r, c)] - target));
        }
    }
    dev
}

/// In-place application of a 2×2 operator to one qubit of a raw amplitude buffer.
pub(crate) fn apply_mat2<T: Real>(amps: &mut [Complex<T>], n: usize, site: usize, u: &Mat2<T>) {
    let mask = site_mask(n, site);
    let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    for i in 0..amps.len() {
        if i & mask == 0 {
            let j = i | mask;
            let a0 = amps[i];
            let a1 = amps[j];
            amps[i] = u00 * a0 + u01 * a1;
            amps[j] = u10 * a0 + u11 * a1;
        }
    }
}
