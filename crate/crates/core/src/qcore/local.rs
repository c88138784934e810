use crate::error::{LmeError, Result};
use crate::qcore::state::{scaled_tol, unitarity_deviation};
use crate::scalar::{to_f64, Mat2, Real};

/// Tolerance on `U U† = 1` for every member of a [`LocalUnitarySet`].
pub const LOCAL_UNITARY_TOL: f64 = 1e-12;

/// One 2×2 unitary per qubit, i.e. the product operation `U₀ ⊗ … ⊗ U_{n−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalUnitarySet<T: Real> {
    mats: Vec<Mat2<T>>,
}

impl<T: Real> LocalUnitarySet<T> {
    pub fn new(mats: Vec<Mat2<T>>) -> Result<Self> {
        if mats.is_empty() {
            return Err(LmeError::NoQubits);
        }
        for m in &mats {
            let dev = unitarity_deviation(m);
            if dev > scaled_tol(LOCAL_UNITARY_TOL) {
                return Err(LmeError::NotUnitary { deviation: to_f64(dev) });
            }
        }
        Ok(Self { mats })
    }

    /// Builds the set without the unitarity check; callers guarantee it.
    pub(crate) fn from_trusted(mats: Vec<Mat2<T>>) -> Self {
        Self { mats }
    }

    pub fn identity(n: usize) -> Self {
        Self { mats: vec![Mat2::identity(); n] }
    }

    pub fn uniform(n: usize, u: Mat2<T>) -> Result<Self> {
        Self::new(vec![u; n])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.mats.len()
    }

    #[inline]
    pub fn mats(&self) -> &[Mat2<T>] {
        &self.mats
    }

    pub fn get(&self, site: usize) -> Option<&Mat2<T>> {
        self.mats.get(site)
    }

    /// Sitewise adjoint.
    pub fn adjoint(&self) -> Self {
        Self { mats: self.mats.iter().map(|m| m.adjoint()).collect() }
    }

    /// Sitewise product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(LmeError::DimensionMismatch(format!(
                "composing {} and {} local operators",
                self.n(),
                other.n()
            )));
        }
        Ok(Self { mats: self.mats.iter().zip(&other.mats).map(|(a, b)| a * b).collect() })
    }

    /// Sitewise conjugation `V_k† M V_k`, used to carry witnesses between frames.
    pub fn conjugate_by(&self, frame: &Self) -> Self {
        Self {
            mats: self
                .mats
                .iter()
                .zip(&frame.mats)
                .map(|(m, v)| v.adjoint() * m * v)
                .collect(),
        }
    }

    /// Worst unitarity deviation over all sites.
    pub fn max_unitarity_deviation(&self) -> T {
        self.mats.iter().map(unitarity_deviation).fold(T::zero(), |a, b| a.max(b))
    }
}

/// Standard single-qubit operators.
pub mod gates {
    use crate::scalar::{cis, cone, cplx, czero, lit, Mat2, Real};

    pub fn identity<T: Real>() -> Mat2<T> {
        Mat2::identity()
    }

    pub fn x<T: Real>() -> Mat2<T> {
        Mat2::new(czero(), cone(), cone(), czero())
    }

    pub fn y<T: Real>() -> Mat2<T> {
        let i = cplx(T::zero(), T::one());
        Mat2::new(czero(), -i, i, czero())
    }

    pub fn z<T: Real>() -> Mat2<T> {
        Mat2::new(cone(), czero(), czero(), -cone())
    }

    pub fn hadamard<T: Real>() -> Mat2<T> {
        let h = cplx(T::one() / lit::<T>(2.0).sqrt(), T::zero());
        Mat2::new(h, h, h, -h)
    }

    /// `diag(1, e^{iθ})`.
    pub fn phase<T: Real>(theta: T) -> Mat2<T> {
        Mat2::new(cone(), czero(), czero(), cis(theta))
    }

    /// `diag(e^{iθ}, 1)`: phase on `|0⟩`.
    pub fn phase_on_zero<T: Real>(theta: T) -> Mat2<T> {
        Mat2::new(cis(theta), czero(), czero(), cone())
    }

    /// `e^{−iθZ/2} = diag(e^{−iθ/2}, e^{iθ/2})`.
    pub fn rz<T: Real>(theta: T) -> Mat2<T> {
        let h = theta / lit(2.0);
        Mat2::new(cis(-h), czero(), czero(), cis(h))
    }

    /// `e^{−iθY/2}`.
    pub fn ry<T: Real>(theta: T) -> Mat2<T> {
        let h = theta / lit(2.0);
        let (c, s) = (cplx(h.cos(), T::zero()), cplx(h.sin(), T::zero()));
        Mat2::new(c, -s, s, c)
    }

    /// Phased X, `e^{iαZ/2} X e^{−iαZ/2} = [[0, e^{iα}], [e^{−iα}, 0]]`.
    ///
    /// `α = 0` gives `X`, `α = −π/2` gives `Y`.
    pub fn phased_x<T: Real>(alpha: T) -> Mat2<T> {
        Mat2::new(czero(), cis(alpha), cis(-alpha), czero())
    }
}
