//! Smooth coordinate charts on SU(2) and SU(4).
//!
//! SU(2) uses ZYZ Euler angles, `U(θ, φ, λ) = Rz(φ)·Ry(θ)·Rz(λ)` with
//! `Rz(a) = e^{−iaZ/2}` and `Ry(a) = e^{−iaY/2}`. The leading `Rz(φ)` is
//! diagonal, so it never changes computational-basis moduli; searches that
//! only care about moduli fix `φ` and move `(θ, λ)`.
//!
//! SU(4) uses the exponential chart `G(t) = exp(i Σ_k t_k P_k)` over the 15
//! non-identity two-qubit Pauli products `P_k`.

use rand::Rng;

use crate::qcore::gates;
use crate::scalar::{arg, cis, cplx, czero, kron_all, lit, modulus, CMatrix, Mat2, Real};

pub fn su2<T: Real>(theta: T, phi: T, lambda: T) -> Mat2<T> {
    gates::rz(phi) * gates::ry(theta) * gates::rz(lambda)
}

/// ZYZ angles `(θ, φ, λ)` reproducing `u` up to a global phase.
pub fn su2_angles<T: Real>(u: &Mat2<T>) -> (T, T, T) {
    let two = lit::<T>(2.0);
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let g = cis(-arg(det) / two);
    let a = u[(0, 0)] * g;
    let b = u[(1, 0)] * g;
    let theta = two * modulus(b).atan2(modulus(a));
    let eps = lit::<T>(1e-14);
    let (sum, diff) = match (modulus(a) > eps, modulus(b) > eps) {
        (true, true) => (-two * arg(a), two * arg(b)),
        (true, false) => (-two * arg(a), T::zero()),
        (false, _) => (T::zero(), two * arg(b)),
    };
    // φ + λ = sum, φ − λ = diff
    (theta, (sum + diff) / two, (sum - diff) / two)
}

/// Haar-random ZYZ angles.
pub fn random_su2_angles<T: Real, R: Rng + ?Sized>(rng: &mut R) -> (T, T, T) {
    let tau = std::f64::consts::TAU;
    let u: f64 = rng.random();
    let theta = (1.0 - 2.0 * u).acos();
    (lit(theta), lit(rng.random::<f64>() * tau), lit(rng.random::<f64>() * tau))
}

/// Number of real coordinates of the SU(4) chart.
pub const SU4_DIM: usize = 15;

/// The 15 two-qubit Pauli products, skipping `1⊗1`.
pub fn two_qubit_paulis<T: Real>() -> Vec<CMatrix<T>> {
    let single = [gates::identity::<T>(), gates::x(), gates::y(), gates::z()];
    let mut out = Vec::with_capacity(SU4_DIM);
    for (i, a) in single.iter().enumerate() {
        for (j, b) in single.iter().enumerate() {
            if i == 0 && j == 0 {
                continue;
            }
            out.push(kron_all(&[*a, *b]));
        }
    }
    out
}

/// `exp(i Σ t_k P_k)`, computed from the eigendecomposition of the generator.
pub fn su4<T: Real>(params: &[T; SU4_DIM], paulis: &[CMatrix<T>]) -> CMatrix<T> {
    let mut h = CMatrix::<T>::from_element(4, 4, czero());
    for (t, p) in params.iter().zip(paulis) {
        h += p * cplx(*t, T::zero());
    }
    let eig = h.symmetric_eigen();
    let v = &eig.eigenvectors;
    let d = CMatrix::<T>::from_diagonal(&eig.eigenvalues.map(|l| cis(l)));
    v * d * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::unitarity_deviation;
    use crate::scalar::{identity, max_abs_diff};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn phase_free_distance(a: &Mat2<f64>, b: &Mat2<f64>) -> f64 {
        let ip = (a.adjoint() * b).trace();
        let g = ip / ip.norm();
        (a * g - b).norm()
    }

    #[test]
    fn su2_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (t, p, l) = random_su2_angles::<f64, _>(&mut rng);
            let u = su2(t, p, l);
            assert!(unitarity_deviation(&u) < 1e-12);
            let (t2, p2, l2) = su2_angles(&u);
            assert!(phase_free_distance(&u, &su2(t2, p2, l2)) < 1e-12);
        }
        for m in [gates::hadamard::<f64>(), gates::x(), gates::y(), gates::z(), gates::phase(0.4)] {
            let (t, p, l) = su2_angles(&m);
            assert!(phase_free_distance(&m, &su2(t, p, l)) < 1e-12);
        }
    }

    #[test]
    fn su4_is_special_unitary() {
        let paulis = two_qubit_paulis::<f64>();
        assert_eq!(paulis.len(), SU4_DIM);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let mut p = [0.0; SU4_DIM];
            for x in &mut p {
                *x = rng.random::<f64>() * 4.0 - 2.0;
            }
            let g = su4(&p, &paulis);
            let id = identity::<f64>(4);
            assert!(max_abs_diff(&(&g * g.adjoint()), &id) < 1e-12);
            assert!((g.determinant() - cplx(1.0, 0.0)).norm() < 1e-10);
        }
        let g0 = su4(&[0.0; SU4_DIM], &paulis);
        assert!(max_abs_diff(&g0, &identity(4)) < 1e-15);
    }

    #[test]
    fn su4_single_generator_matches_closed_form() {
        // exp(i t Z⊗Z) = cos t · 1 + i sin t · Z⊗Z
        let paulis = two_qubit_paulis::<f64>();
        let mut p = [0.0; SU4_DIM];
        p[14] = 0.3;
        let g = su4(&p, &paulis);
        let expected = identity::<f64>(4) * cplx(0.3f64.cos(), 0.0) + &paulis[14] * cplx(0.0, 0.3f64.sin());
        assert!(max_abs_diff(&g, &expected) < 1e-14);
    }
}
