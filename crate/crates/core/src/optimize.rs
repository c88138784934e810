//! Small dense local optimizers with finite-difference derivatives.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::{lit, Real};

#[derive(Clone, Debug)]
pub struct LmOptions<T> {
    pub max_iters: usize,
    /// Stop once `Σ r² ≤ target`.
    pub target: T,
    /// Relative step-size floor.
    pub xtol: T,
}

impl<T: Real> Default for LmOptions<T> {
    fn default() -> Self {
        Self { max_iters: 200, target: lit(1e-30), xtol: lit(1e-15) }
    }
}

#[derive(Clone, Debug)]
pub struct LmResult<T> {
    pub x: Vec<T>,
    /// `Σ r²` at `x`.
    pub cost: T,
    pub iters: usize,
}

/// Generator for restart `index` of a seeded multi-start run. Restarts get
/// disjoint segments of one ChaCha stream, so they are independent of
/// evaluation order.
pub fn restart_rng(seed: u64, index: usize, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos((index as u128) << 20);
    rng
}

fn sum_sq<T: Real>(r: &[T]) -> T {
    r.iter().fold(T::zero(), |s, v| s + *v * *v)
}

/// Central-difference Jacobian, `residuals × params`.
fn jacobian<T: Real, F: Fn(&[T]) -> Vec<T>>(f: &F, x: &[T], m: usize) -> DMatrix<T> {
    let h0 = T::default_epsilon().powf(lit(1.0 / 3.0));
    let mut jac = DMatrix::<T>::zeros(m, x.len());
    let mut xp = x.to_vec();
    for j in 0..x.len() {
        let h = h0 * (T::one() + x[j].abs());
        xp[j] = x[j] + h;
        let rp = f(&xp);
        xp[j] = x[j] - h;
        let rm = f(&xp);
        xp[j] = x[j];
        let inv = T::one() / (h + h);
        for i in 0..m {
            jac[(i, j)] = (rp[i] - rm[i]) * inv;
        }
    }
    jac
}

/// Levenberg–Marquardt on the residual vector `f(x)`.
///
/// Built for zero-residual problems: near a root the damped Gauss–Newton
/// step converges to machine precision even with an approximate Jacobian.
pub fn levenberg_marquardt<T: Real, F: Fn(&[T]) -> Vec<T>>(f: F, x0: Vec<T>, opts: &LmOptions<T>) -> LmResult<T> {
    let mut x = x0;
    let mut r = f(&x);
    let m = r.len();
    let mut cost = sum_sq(&r);
    let mut mu: Option<T> = None;
    let mut nu = lit::<T>(2.0);
    let mut iters = 0;
    while iters < opts.max_iters && cost > opts.target {
        iters += 1;
        let jac = jacobian(&f, &x, m);
        let jt = jac.transpose();
        let a = &jt * &jac;
        let g = &jt * DVector::from_column_slice(&r);
        let mu_v = *mu.get_or_insert_with(|| {
            let dmax = a.diagonal().iter().fold(T::zero(), |s, v| s.max(*v));
            lit::<T>(1e-3) * dmax.max(lit(1e-12))
        });
        let mut mu_v = mu_v;
        let mut accepted = false;
        let mut step_norm = T::zero();
        for _ in 0..60 {
            let mut damped = a.clone();
            for k in 0..damped.nrows() {
                damped[(k, k)] += mu_v;
            }
            let Some(chol) = damped.cholesky() else {
                mu_v *= nu;
                nu *= lit(2.0);
                continue;
            };
            let delta = chol.solve(&(-&g));
            let trial: Vec<T> = x.iter().zip(delta.iter()).map(|(a, d)| *a + *d).collect();
            let r_new = f(&trial);
            let cost_new = sum_sq(&r_new);
            if cost_new.is_finite() && cost_new < cost {
                let predicted = -(delta.dot(&g) * lit(2.0)) - (&a * &delta).dot(&delta);
                let rho = if predicted > T::zero() { (cost - cost_new) / predicted } else { T::zero() };
                let t = lit::<T>(2.0) * rho - T::one();
                mu_v *= (T::one() - t * t * t).max(lit(1.0 / 3.0));
                nu = lit(2.0);
                step_norm = delta.norm();
                x = trial;
                r = r_new;
                cost = cost_new;
                accepted = true;
                break;
            }
            mu_v *= nu;
            nu *= lit(2.0);
            if mu_v > lit(1e20) {
                break;
            }
        }
        mu = Some(mu_v);
        if !accepted {
            break;
        }
        let xnorm = x.iter().fold(T::zero(), |s, v| s + *v * *v).sqrt();
        if step_norm <= opts.xtol * (xnorm + opts.xtol) {
            break;
        }
    }
    LmResult { x, cost, iters }
}

#[derive(Clone, Debug)]
pub struct BfgsOptions<T> {
    pub max_iters: usize,
    /// Stop when the gradient's max-norm falls below this.
    pub gtol: T,
}

impl<T: Real> Default for BfgsOptions<T> {
    fn default() -> Self {
        Self { max_iters: 300, gtol: lit(1e-7) }
    }
}

#[derive(Clone, Debug)]
pub struct MinResult<T> {
    pub x: Vec<T>,
    pub value: T,
    pub iters: usize,
}

fn gradient<T: Real, F: Fn(&[T]) -> T>(f: &F, x: &[T]) -> DVector<T> {
    let h0 = T::default_epsilon().powf(lit(1.0 / 3.0));
    let mut xp = x.to_vec();
    DVector::from_iterator(
        x.len(),
        (0..x.len()).map(|j| {
            let h = h0 * (T::one() + x[j].abs());
            xp[j] = x[j] + h;
            let fp = f(&xp);
            xp[j] = x[j] - h;
            let fm = f(&xp);
            xp[j] = x[j];
            (fp - fm) / (h + h)
        }),
    )
}

/// Quasi-Newton minimization with a backtracking Armijo line search.
pub fn minimize_bfgs<T: Real, F: Fn(&[T]) -> T>(f: F, x0: Vec<T>, opts: &BfgsOptions<T>) -> MinResult<T> {
    let d = x0.len();
    let mut x = DVector::from_vec(x0);
    let mut fx = f(x.as_slice());
    let mut g = gradient(&f, x.as_slice());
    let mut hinv = DMatrix::<T>::identity(d, d);
    let mut iters = 0;
    while iters < opts.max_iters {
        if g.amax() < opts.gtol {
            break;
        }
        iters += 1;
        let mut p = -(&hinv * &g);
        let mut slope = p.dot(&g);
        if slope >= T::zero() {
            hinv = DMatrix::identity(d, d);
            p = -g.clone();
            slope = p.dot(&g);
        }
        let mut step = T::one();
        let c1 = lit::<T>(1e-4);
        let mut next = None;
        for _ in 0..40 {
            let xn = &x + &p * step;
            let fxn = f(xn.as_slice());
            if fxn.is_finite() && fxn <= fx + c1 * step * slope {
                next = Some((xn, fxn));
                break;
            }
            step *= lit(0.5);
        }
        let Some((xn, fxn)) = next else { break };
        let gn = gradient(&f, xn.as_slice());
        let s = &xn - &x;
        let y = &gn - &g;
        let sy = s.dot(&y);
        if sy > T::default_epsilon() * s.norm() * y.norm() {
            let rho = T::one() / sy;
            let id = DMatrix::<T>::identity(d, d);
            let left = &id - &s * y.transpose() * rho;
            let right = &id - &y * s.transpose() * rho;
            hinv = &left * &hinv * &right + &s * s.transpose() * rho;
        }
        let improvement = fx - fxn;
        x = xn;
        fx = fxn;
        g = gn;
        if improvement.abs() <= T::default_epsilon() * (T::one() + fx.abs()) {
            break;
        }
    }
    MinResult { x: x.as_slice().to_vec(), value: fx, iters }
}
