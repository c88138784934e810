//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All math is written against [`Real`], which both `f32` and `f64` satisfy.
//! Default tolerances are sized for `f64`; single precision works for the
//! algebraic parts (tables, circuits, state construction) but will not reach
//! the certification thresholds.

use nalgebra::{DMatrix, Matrix2, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar used throughout the crate.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Default {}

impl<T> Real for T where T: RealField + Copy + FromPrimitive + ToPrimitive + Default {}

/// Dense complex matrix.
pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Single-qubit operator.
pub type Mat2<T> = Matrix2<Complex<T>>;

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

#[inline]
pub fn norm_sqr<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}

#[inline]
pub fn modulus<T: Real>(z: Complex<T>) -> T {
    norm_sqr(z).sqrt()
}

#[inline]
pub fn arg<T: Real>(z: Complex<T>) -> T {
    z.im.atan2(z.re)
}

/// Reduces a phase into `[0, 2π)`.
pub fn wrap_phase<T: Real>(x: T) -> T {
    let tau = T::two_pi();
    let mut r = x % tau;
    if r < T::zero() {
        r += tau;
    }
    if r >= tau {
        r = T::zero();
    }
    r
}

/// Distance from `x` to the nearest multiple of `period`.
pub fn circular_distance<T: Real>(x: T, period: T) -> T {
    let r = x % period;
    let r = if r < T::zero() { r + period } else { r };
    r.min(period - r)
}

/// Largest entrywise modulus of `a − b`.
pub fn max_abs_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| modulus(*x - *y))
        .fold(T::zero(), |m, v| m.max(v))
}

/// Identity matrix of dimension `dim`.
pub fn identity<T: Real>(dim: usize) -> CMatrix<T> {
    CMatrix::<T>::identity(dim, dim)
}

/// Converts a 2×2 operator into a dynamically sized matrix.
pub fn mat2_to_dyn<T: Real>(m: &Mat2<T>) -> CMatrix<T> {
    CMatrix::from_fn(2, 2, |r, c| m[(r, c)])
}

/// Kronecker product of a list of 2×2 operators, first factor most significant.
pub fn kron_all<T: Real>(ops: &[Mat2<T>]) -> CMatrix<T> {
    let mut acc = identity::<T>(1);
    for op in ops {
        acc = acc.kronecker(&mat2_to_dyn(op));
    }
    acc
}
