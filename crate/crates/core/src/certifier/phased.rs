//! Correlators `⟨U^i⟩` for phased-X witnesses `U_k(α_k) = [[0, e^{iα_k}], [e^{−iα_k}, 0]]`
//! as explicit trigonometric polynomials in the phases.
//!
//! `U_k` sends `|0⟩ → e^{−iα_k}|1⟩` and `|1⟩ → e^{iα_k}|0⟩`, so
//! `⟨Ψ|U^i|Ψ⟩ = Σ_x ψ*_{x⊕i} ψ_x Π_{k∈i} e^{±iα_k}` with the sign set by `x_k`.
//! Grouping `x` by its restriction to `i` leaves `2^{|i|}` coefficients per
//! mask, `3^n` in total.

use num_complex::Complex;

use crate::qcore::{site_mask, StateVector};
use crate::scalar::{cis, czero, norm_sqr, Real};

pub(crate) struct PhasedCorrelators<T: Real> {
    n: usize,
    /// Per nonzero mask: `(pattern, coefficient)`; pattern bits mark sites in state `|1⟩`.
    terms: Vec<(usize, Vec<(usize, Complex<T>)>)>,
}

impl<T: Real> PhasedCorrelators<T> {
    pub(crate) fn new(state: &StateVector<T>) -> Self {
        let n = state.n();
        let psi = state.amplitudes();
        let dim = psi.len();
        let mut terms = Vec::with_capacity(dim - 1);
        for mask in 1..dim {
            let mut coeffs: Vec<(usize, Complex<T>)> = Vec::new();
            let mut acc = std::collections::BTreeMap::<usize, Complex<T>>::new();
            for (x, a) in psi.iter().enumerate() {
                let c = psi[x ^ mask].conj() * *a;
                *acc.entry(x & mask).or_insert_with(czero) += c;
            }
            for (p, c) in acc {
                if norm_sqr(c) > T::zero() {
                    coeffs.push((p, c));
                }
            }
            terms.push((mask, coeffs));
        }
        Self { n, terms }
    }

    /// All `2^n − 1` correlators at the given phases (index `mask − 1`).
    pub(crate) fn evaluate(&self, phases: &[T]) -> Vec<Complex<T>> {
        let e: Vec<Complex<T>> = phases.iter().map(|&a| cis(a)).collect();
        self.evaluate_with(&e)
    }

    /// Same as [`Self::evaluate`] with precomputed `e^{iα_k}`.
    pub(crate) fn evaluate_with(&self, e: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.n;
        self.terms
            .iter()
            .map(|(mask, coeffs)| {
                coeffs.iter().fold(czero(), |acc, &(p, c)| {
                    let mut f = c;
                    for (k, ek) in e.iter().enumerate() {
                        let bit = site_mask(n, k);
                        if mask & bit != 0 {
                            f *= if p & bit != 0 { *ek } else { ek.conj() };
                        }
                    }
                    acc + f
                })
            })
            .collect()
    }

    /// `Σ_i |⟨U^i⟩|²`.
    #[cfg(test)]
    pub(crate) fn sum_sq_with(&self, e: &[Complex<T>]) -> T {
        self.evaluate_with(e).iter().fold(T::zero(), |s, z| s + norm_sqr(*z))
    }

    /// `max_i |⟨U^i⟩|`.
    pub(crate) fn max_abs(&self, phases: &[T]) -> T {
        self.evaluate(phases)
            .iter()
            .fold(T::zero(), |m, z| m.max(norm_sqr(*z).sqrt()))
    }

    /// Scores `Σ_i |⟨U^i⟩|²` on the lattice `α_k = 2π j_k / g` and keeps the
    /// `keep` lowest `(score, index)` pairs, index `j` read base `g` with site 0
    /// most significant; ties go to the lower index.
    ///
    /// On the lattice every phase product is a root of unity looked up by an
    /// integer exponent, and the last site is handled in closed form:
    /// each correlator is `a₀ + a₊ e^{iα} + a₋ e^{−iα}` in its phase.
    pub(crate) fn grid_top(&self, g: usize, keep: usize) -> Vec<(T, usize)> {
        use rayon::prelude::*;
        let n = self.n;
        let last = n - 1;
        let last_bit = site_mask(n, last);
        let step = T::two_pi() / crate::scalar::lit(g as f64);
        let roots: Vec<Complex<T>> = (0..g).map(|j| cis(step * crate::scalar::lit(j as f64))).collect();
        // Per mask: (signs on sites before `last`, sign on `last`, coefficient).
        let compiled: Vec<Vec<(Vec<(usize, i64)>, i64, Complex<T>)>> = self
            .terms
            .iter()
            .map(|(mask, coeffs)| {
                coeffs
                    .iter()
                    .map(|&(p, c)| {
                        let sign = |k: usize| if p & site_mask(n, k) != 0 { 1 } else { -1 };
                        let rest = (0..last).filter(|&k| mask & site_mask(n, k) != 0).map(|k| (k, sign(k))).collect();
                        let s_last = if mask & last_bit != 0 { sign(last) } else { 0 };
                        (rest, s_last, c)
                    })
                    .collect()
            })
            .collect();
        let outer = g.pow(last as u32);
        let heads = if last == 0 { 1 } else { g };
        let per_head = outer / heads;
        let gi = g as i64;
        let mut all: Vec<(T, usize)> = (0..heads)
            .into_par_iter()
            .flat_map_iter(|head| {
                let mut top: Vec<(T, usize)> = Vec::with_capacity(keep + 1);
                let mut digits = vec![0i64; last];
                let mut scores = vec![T::zero(); g];
                let mut split = vec![[czero::<T>(); 3]; compiled.len()];
                for r in head * per_head..(head + 1) * per_head {
                    let mut rem = r;
                    for k in (0..last).rev() {
                        digits[k] = (rem % g) as i64;
                        rem /= g;
                    }
                    for (slot, terms) in split.iter_mut().zip(&compiled) {
                        *slot = [czero(); 3];
                        for (rest, s_last, c) in terms {
                            let e: i64 = rest.iter().map(|&(k, s)| s * digits[k]).sum();
                            slot[(s_last + 1) as usize] += *c * roots[e.rem_euclid(gi) as usize];
                        }
                    }
                    for (j, score) in scores.iter_mut().enumerate() {
                        let (w, wc) = (roots[j], roots[j].conj());
                        *score = split
                            .iter()
                            .fold(T::zero(), |acc, [m, z, p]| acc + norm_sqr(*z + *p * w + *m * wc));
                    }
                    for (j, &score) in scores.iter().enumerate() {
                        let index = r * g + j;
                        if top.len() < keep || score < top[top.len() - 1].0 {
                            let pos = top.partition_point(|(s, i)| *s < score || (*s == score && *i < index));
                            top.insert(pos, (score, index));
                            top.truncate(keep);
                        }
                    }
                }
                top
            })
            .collect();
        all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
        all.truncate(keep);
        all
    }

    /// Real and imaginary parts stacked, as a least-squares residual.
    pub(crate) fn residual(&self, phases: &[T]) -> Vec<T> {
        self.evaluate(phases).iter().flat_map(|z| [z.re, z.im]).collect()
    }
}
