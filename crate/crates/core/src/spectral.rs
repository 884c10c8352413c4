//! Leading Laplacian eigenvector, used as an initial point and as the
//! spectral-rounding baseline.
//!
//! The solver is block power iteration: a small orthonormal block is pushed
//! through `L` repeatedly and the leading vector is extracted by a
//! Rayleigh-Ritz step on the block. With block size 1 this is the plain power
//! method; the extra columns keep convergence fast when the top of the
//! spectrum is nearly degenerate.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::graph::{laplacian_apply_into, Cut, Graph};
use crate::rng::SolverRng;

pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-8;
pub const BLOCK_SIZE: usize = 8;

pub fn default_max_iters(n: usize) -> usize {
    10 * n + 1000
}

#[derive(Clone, Debug, PartialEq)]
pub struct Eigenpair {
    /// Unit 2-norm eigenvector.
    pub vector: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Modified Gram-Schmidt; columns that collapse are redrawn at random.
fn orthonormalize(cols: &mut [Vec<f64>], rng: &mut SolverRng) {
    for k in 0..cols.len() {
        for _attempt in 0..8 {
            let scale = norm(&cols[k]).max(f64::MIN_POSITIVE);
            for _pass in 0..2 {
                for j in 0..k {
                    let (head, tail) = cols.split_at_mut(k);
                    let c = dot(&head[j], &tail[0]);
                    for (t, h) in tail[0].iter_mut().zip(&head[j]) {
                        *t -= c * h;
                    }
                }
            }
            let nk = norm(&cols[k]);
            if nk > 1e-10 * scale {
                for t in &mut cols[k] {
                    *t /= nk;
                }
                break;
            }
            for t in &mut cols[k] {
                *t = rng.random_range(-1.0..1.0);
            }
        }
    }
}

/// Leading eigenpair of `L` from a seeded random start block, stopping once
/// `|Lx - lambda x|_2 <= tol * lambda`.
pub fn max_laplacian_eigenvector(g: &Graph, tol: f64, max_iters: usize, seed: u64) -> Result<Eigenpair> {
    check_args(g, tol, max_iters)?;
    block_power(g.n(), |x, y| laplacian_apply_into(g, x, y), tol, max_iters, seed)
}

/// Leading eigenpair of the normalized Laplacian `D^-1/2 L D^-1/2`, with the
/// same stopping rule. Isolated vertices contribute zero rows.
pub fn max_normalized_laplacian_eigenvector(g: &Graph, tol: f64, max_iters: usize, seed: u64) -> Result<Eigenpair> {
    check_args(g, tol, max_iters)?;
    let inv_sqrt: Vec<f64> = g
        .degrees_w()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();
    let mut scaled = vec![0.0; g.n()];
    let op = |x: &[f64], y: &mut [f64]| {
        for ((s, v), c) in scaled.iter_mut().zip(x).zip(&inv_sqrt) {
            *s = v * c;
        }
        laplacian_apply_into(g, &scaled, y);
        for (v, c) in y.iter_mut().zip(&inv_sqrt) {
            *v *= c;
        }
    };
    block_power(g.n(), op, tol, max_iters, seed)
}

fn check_args(g: &Graph, tol: f64, max_iters: usize) -> Result<()> {
    if g.n() < 2 {
        return Err(Error::Argument("spectral initialization needs at least 2 vertices".into()));
    }
    if tol.is_nan() || tol <= 0.0 || max_iters == 0 {
        return Err(Error::Argument("tolerance and iteration cap must be positive".into()));
    }
    Ok(())
}

fn block_power(
    n: usize,
    mut op: impl FnMut(&[f64], &mut [f64]),
    tol: f64,
    max_iters: usize,
    seed: u64,
) -> Result<Eigenpair> {
    let b = n.min(BLOCK_SIZE);
    let mut rng = SolverRng::seed_from_u64(seed);
    let mut q: Vec<Vec<f64>> = (0..b)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    orthonormalize(&mut q, &mut rng);
    let mut lq = vec![vec![0.0; n]; b];
    let mut residual = f64::INFINITY;

    for it in 1..=max_iters {
        for (qk, lk) in q.iter().zip(lq.iter_mut()) {
            op(qk, lk);
        }
        let h = DMatrix::from_fn(b, b, |i, j| 0.5 * (dot(&q[i], &lq[j]) + dot(&q[j], &lq[i])));
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..b).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let combine = |basis: &[Vec<f64>], col: usize| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for (i, v) in basis.iter().enumerate() {
                let c = eig.eigenvectors[(i, col)];
                for (o, x) in out.iter_mut().zip(v) {
                    *o += c * x;
                }
            }
            out
        };

        let top = order[0];
        let lambda = eig.eigenvalues[top];
        let x = combine(&q, top);
        let lx = combine(&lq, top);
        residual = x
            .iter()
            .zip(&lx)
            .map(|(a, l)| (l - lambda * a).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol * lambda || (lambda <= 0.0 && residual == 0.0) {
            let nx = norm(&x);
            return Ok(Eigenpair {
                vector: x.iter().map(|v| v / nx).collect(),
                value: lambda.max(0.0),
                iterations: it,
                residual,
            });
        }
        q = order.iter().map(|&col| combine(&lq, col)).collect();
        orthonormalize(&mut q, &mut rng);
    }
    Err(Error::Convergence {
        iters: max_iters,
        residual,
    })
}

/// Rounds a vector by `sign(x_i)` with `sign(0) = +1`.
pub fn spectral_cut(g: &Graph, v: &[f64]) -> Result<Cut> {
    if v.len() != g.n() {
        return Err(Error::Argument(format!(
            "vector has length {}, graph has {} vertices",
            v.len(),
            g.n()
        )));
    }
    Cut::from_side(g, v.iter().map(|&t| if t >= 0.0 { 1 } else { -1 }).collect())
}
