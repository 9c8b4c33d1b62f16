//! Symmetric eigensolvers used by the bound-state code.
//!
//! [`SymTridiagonal`] handles radial problems exactly: Sturm-sequence
//! bisection for eigenvalues, inverse iteration for eigenvectors.
//! [`lanczos_smallest`] is the matrix-free solver for cartesian grids. It
//! finds one eigenpair at a time and locks it, so degenerate levels come out
//! with their full multiplicity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    /// `off[i]` couples rows i and i+1.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal must be one shorter");
        SymTridiagonal { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        (0..n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let radius = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            (lo.min(self.diag[i] - radius), hi.max(self.diag[i] + radius))
        })
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.dim() {
            let coupling = if i > 0 { self.off[i - 1] * self.off[i - 1] / q } else { 0.0 };
            q = self.diag[i] - x - coupling;
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `index`-th smallest eigenvalue (0-based), bisected to machine precision.
    pub fn eigenvalue(&self, index: usize) -> f64 {
        assert!(index < self.dim());
        let (mut lo, mut hi) = self.gershgorin();
        let pad = f64::EPSILON * (lo.abs().max(hi.abs()) + 1.0);
        lo -= pad;
        hi += pad;
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return mid;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    pub fn lowest_eigenvalues(&self, count: usize) -> Vec<f64> {
        (0..count.min(self.dim())).map(|k| self.eigenvalue(k)).collect()
    }

    /// Unit eigenvector for an (accurate) eigenvalue by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        let lu = ShiftedLu::factor(self, lambda);
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 101) as f64 / 101.0).collect();
        for _ in 0..3 {
            x = lu.solve(&x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        // fix the overall sign so the first significant component is positive
        if let Some(first) = x.iter().find(|v| v.abs() > 1e-8) {
            if *first < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
        }
        x
    }

    /// Lowest `count` eigenpairs, ascending.
    pub fn lowest_eigenpairs(&self, count: usize) -> Vec<(f64, Vec<f64>)> {
        let values = self.lowest_eigenvalues(count);
        let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(values.len());
        for (k, lambda) in values.iter().enumerate() {
            let mut v = self.eigenvector(*lambda);
            // near-degenerate neighbours: keep the set orthonormal
            for (mu, w) in &pairs {
                if (mu - lambda).abs() < 1e-10 * (1.0 + lambda.abs()) {
                    let overlap: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(w).for_each(|(a, b)| *a -= overlap * b);
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            debug_assert!(k == pairs.len());
            pairs.push((*lambda, v));
        }
        pairs
    }
}

/// LU of T − σI with partial pivoting; U has two super-diagonals.
struct ShiftedLu {
    lower: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &SymTridiagonal, sigma: f64) -> Self {
        let n = t.dim();
        let scale = t.gershgorin().1.abs().max(t.gershgorin().0.abs()).max(1.0);
        let floor = f64::EPSILON * scale;
        let mut d: Vec<f64> = t.diag.iter().map(|x| x - sigma).collect();
        let mut du = t.off.clone();
        let mut dl = t.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut lower = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = floor;
                }
                let f = dl[i] / d[i];
                lower[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                swapped[i] = true;
                let f = d[i] / dl[i];
                lower[i] = f;
                d[i] = dl[i];
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
            }
            dl[i] = 0.0;
        }
        if let Some(last) = d.last_mut() {
            if last.abs() < floor {
                *last = floor;
            }
        }
        for v in d.iter_mut() {
            if *v == 0.0 {
                *v = floor;
            }
        }
        ShiftedLu {
            lower,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut x = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= self.lower[i] * x[i];
        }
        for i in (0..n).rev() {
            let mut v = x[i];
            if i + 1 < n {
                v -= self.du[i] * x[i + 1];
            }
            if i + 2 < n {
                v -= self.du2[i] * x[i + 2];
            }
            x[i] = v / self.d[i];
        }
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Ritz residual tolerance relative to max(1, |θ|).
    pub tolerance: f64,
    pub max_krylov: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tolerance: 1e-10,
            max_krylov: 300,
            max_restarts: 20,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(v, q);
            v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
        }
    }
}

/// Smallest `count` eigenpairs of a symmetric operator.
pub fn lanczos_smallest(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    dim: usize,
    count: usize,
    options: &LanczosOptions,
) -> Result<Vec<Eigenpair>> {
    if count > dim {
        return Err(Error::InvalidParameter {
            name: "count",
            reason: format!("asked for {count} eigenpairs of a {dim}-dimensional operator"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut locked: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut pairs = Vec::with_capacity(count);

    for _ in 0..count {
        let mut start: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut total_iterations = 0;
        let mut best: Option<Eigenpair> = None;
        for _restart in 0..=options.max_restarts {
            orthogonalize(&mut start, &locked);
            let n0 = norm(&start);
            start.iter_mut().for_each(|x| *x /= n0);

            let m_max = options.max_krylov.min(dim - locked.len());
            let mut basis: Vec<Vec<f64>> = vec![start.clone()];
            let mut alpha = Vec::with_capacity(m_max);
            let mut beta: Vec<f64> = Vec::with_capacity(m_max);
            let mut outcome = None;
            for j in 0..m_max {
                let mut w = apply(&basis[j]);
                total_iterations += 1;
                let a = dot(&w, &basis[j]);
                alpha.push(a);
                orthogonalize(&mut w, &locked);
                orthogonalize(&mut w, &basis);
                let b = norm(&w);
                let exhausted = b < 1e-14 * (1.0 + a.abs());
                let check = exhausted || j + 1 == m_max || j % 5 == 4;
                if check {
                    let t = SymTridiagonal::new(alpha.clone(), beta.clone());
                    let theta = t.eigenvalue(0);
                    let s = t.eigenvector(theta);
                    let estimate = b * s.last().map_or(0.0, |x| x.abs());
                    if exhausted || estimate < options.tolerance * theta.abs().max(1.0) || j + 1 == m_max {
                        let mut y = vec![0.0; dim];
                        for (coef, q) in s.iter().zip(&basis) {
                            y.iter_mut().zip(q).for_each(|(yi, qi)| *yi += coef * qi);
                        }
                        orthogonalize(&mut y, &locked);
                        let ny = norm(&y);
                        y.iter_mut().for_each(|x| *x /= ny);
                        let hy = apply(&y);
                        let rayleigh = dot(&y, &hy);
                        let residual = norm(
                            &hy.iter().zip(&y).map(|(h, v)| h - rayleigh * v).collect::<Vec<_>>(),
                        );
                        outcome = Some(Eigenpair {
                            value: rayleigh,
                            vector: y,
                            residual,
                            iterations: total_iterations,
                        });
                        break;
                    }
                }
                beta.push(b);
                basis.push(w.iter().map(|x| x / b).collect());
            }
            let pair = outcome.expect("loop always produces a Ritz pair");
            let done = pair.residual < options.tolerance * pair.value.abs().max(1.0);
            start = pair.vector.clone();
            best = Some(pair);
            if done {
                break;
            }
        }
        let pair = best.expect("at least one restart");
        locked.push(pair.vector.clone());
        pairs.push(pair);
    }
    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn dense(t: &SymTridiagonal) -> DMatrix<f64> {
        let n = t.dim();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                t.diag[i]
            } else if i + 1 == j {
                t.off[i]
            } else if j + 1 == i {
                t.off[j]
            } else {
                0.0
            }
        })
    }

    fn sample() -> SymTridiagonal {
        let n = 40;
        let diag = (0..n).map(|i| ((i * 13) % 7) as f64 - 2.0 + 0.01 * i as f64).collect();
        let off = (0..n - 1).map(|i| 0.5 + ((i * 5) % 3) as f64 * 0.25).collect();
        SymTridiagonal::new(diag, off)
    }

    #[test]
    fn bisection_agrees_with_dense_solver() {
        let t = sample();
        let mut reference: Vec<f64> = dense(&t).symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (k, expected) in reference.iter().enumerate().take(10) {
            assert!((t.eigenvalue(k) - expected).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn inverse_iteration_gives_small_residual() {
        let t = sample();
        for (lambda, v) in t.lowest_eigenpairs(5) {
            let tv = t.apply(&v);
            let r: f64 = tv.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
            assert!(r < 1e-10, "residual {r}");
            assert!((norm(&v) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn free_particle_box_spectrum() {
        // −u''/2 with Dirichlet ends: (1 − cos(kπ/(N+1)))/h²
        let n = 200;
        let h = 0.05;
        let t = SymTridiagonal::new(vec![1.0 / (h * h); n], vec![-0.5 / (h * h); n - 1]);
        for k in 0..4 {
            let exact = (1.0 - ((k + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos()) / (h * h);
            assert!((t.eigenvalue(k) - exact).abs() < 1e-10 * exact.max(1.0));
        }
    }

    #[test]
    fn lanczos_recovers_degenerate_levels() {
        // block diagonal: two identical copies of the sample matrix
        let t = sample();
        let n = t.dim();
        let apply = |x: &[f64]| {
            let mut y = t.apply(&x[..n]);
            y.extend(t.apply(&x[n..]));
            y
        };
        let pairs = lanczos_smallest(apply, 2 * n, 4, &LanczosOptions::default()).unwrap();
        let expected = t.lowest_eigenvalues(2);
        let got: Vec<f64> = pairs.iter().map(|p| p.value).collect();
        for (g, e) in got.iter().zip([expected[0], expected[0], expected[1], expected[1]]) {
            assert!((g - e).abs() < 1e-9, "{got:?} vs {expected:?}");
        }
        for p in &pairs {
            assert!(p.residual < 1e-9);
        }
    }

    #[test]
    fn lanczos_rejects_oversized_request() {
        assert!(lanczos_smallest(|x: &[f64]| x.to_vec(), 3, 4, &LanczosOptions::default()).is_err());
    }
}
