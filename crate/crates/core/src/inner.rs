//! Closed-form solution of the inner subproblem
//!
//! ```text
//!     min_{|x|_p = 1}  r |x|_inf - (x, v),      0 <= r <= |v|_1
//! ```
//!
//! After sorting `|v|` in nonincreasing order the problem reduces to
//! minimizing `G(z) = (r - (z, |v|)) / |z|_p` over nonnegative, ordered `z`
//! with `z_1 = 1`. Three regimes arise:
//!
//! * `S1` (`r < |v|_1`, `1 < p < inf`): the unique minimizer is
//!   `z_i = min(1, a_i^(1/(p-1)))` with `a_i = m0 |v_i| / (sum_{j<=m0} |v_j| - r)`,
//!   where `m0` is the smallest `m` with `A(m) > r`.
//! * `S2` (`r < |v|_1`, `p = 1`): `z` is 1 on the first `m1` coordinates, 0
//!   after `m0`, and free in `[0, 1]` in between.
//! * `S3` (`r = |v|_1` or `p = inf`): any `x` with `x / |x|_inf in Sgn(v)`.
//!
//! `A(m) = sum_{j<=m} (|v_j| - |v_{m+1}|)` is the accumulation of increments.

use rand::Rng;

use crate::error::{Error, Result};
use crate::vectorspace::{sign, NormParam, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    S1,
    S2,
    S3,
}

/// Coordinates of the solution set that are not pinned down.
#[derive(Clone, Debug, PartialEq)]
pub enum FreeSet {
    None,
    /// Sorted positions `start..end` each free in `[0, 1]`.
    Block { start: usize, end: usize },
    /// Original indices with `v_i = 0`, each free in `[-1, 1]`.
    Zeros(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct InnerSolution {
    pub scenario: Scenario,
    pub p: NormParam,
    /// Indices sorting `|v|` nonincreasing; empty in `S3`, which needs no sort.
    pub perm: Vec<usize>,
    /// `sign(v)` with `sign(0) = 1`, original order.
    pub signs: Vec<f64>,
    /// Threshold index; `n` in `S3`.
    pub m0: usize,
    /// Last always-saturated index, `S2` only.
    pub m1: Option<usize>,
    /// `z` in sorted order; free coordinates hold 0.
    pub z_sorted: Vec<f64>,
    pub free: FreeSet,
    /// The minimum value `L(r, v)`.
    pub objective: f64,
}

/// `A(1..=n)` for a nonincreasing nonnegative sequence.
pub fn accumulation(v_abs_sorted: &[f64]) -> Result<Vec<f64>> {
    if v_abs_sorted.iter().any(|&a| a < 0.0 || !a.is_finite()) {
        return Err(Error::Argument("accumulation input must be finite and nonnegative".into()));
    }
    if v_abs_sorted.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Argument("accumulation input must be sorted nonincreasing".into()));
    }
    Ok(accumulate(v_abs_sorted))
}

fn accumulate(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut out = Vec::with_capacity(n);
    let mut prefix = 0.0;
    for m in 1..=n {
        prefix += a[m - 1];
        let next = if m < n { a[m] } else { 0.0 };
        out.push(prefix - m as f64 * next);
    }
    out
}

/// Solves the inner subproblem for `v`, `r` under the `p`-sphere.
///
/// `tol` is relative: the `S3` boundary test is
/// `|r - |v|_1| <= tol * max(1, |v|_1)`.
pub fn solve_inner(v: &[f64], r: f64, p: NormParam, tol: f64) -> Result<InnerSolution> {
    let n = v.len();
    if n == 0 {
        return Err(Error::Argument("empty vector".into()));
    }
    if !r.is_finite() || r < 0.0 {
        return Err(Error::Argument(format!("ratio must be nonnegative, got {r}")));
    }
    let l1: f64 = v.iter().map(|x| x.abs()).sum();
    let btol = tol * l1.max(1.0);
    if r > l1 + btol {
        return Err(Error::Precondition(format!(
            "ratio {r} exceeds |v|_1 = {l1}; the ascent bound was violated upstream"
        )));
    }
    let signs: Vec<f64> = v.iter().map(|&x| sign(x)).collect();

    if p == NormParam::Infinity || (r - l1).abs() <= btol {
        let zeros: Vec<usize> = (0..n).filter(|&i| v[i] == 0.0).collect();
        let free = if zeros.is_empty() {
            FreeSet::None
        } else {
            FreeSet::Zeros(zeros)
        };
        let vertex_norm = p.norm(&vec![1.0; n]);
        return Ok(InnerSolution {
            scenario: Scenario::S3,
            p,
            perm: Vec::new(),
            signs,
            m0: n,
            m1: None,
            z_sorted: Vec::new(),
            free,
            objective: (r - l1) / vertex_norm,
        });
    }

    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()));
    let mags: Vec<f64> = perm.iter().map(|&i| v[i].abs()).collect();
    let acc = accumulate(&mags);
    let mut prefix = vec![0.0; n + 1];
    for k in 0..n {
        prefix[k + 1] = prefix[k] + mags[k];
    }

    match p {
        NormParam::Finite(pv) => {
            // A(n) = |v|_1 > r here, so m0 exists
            let m0 = acc.iter().position(|&a| a > r).map_or(n, |k| k + 1);
            let alpha = prefix[m0] - r;
            let expo = 1.0 / (pv - 1.0);
            let z_sorted: Vec<f64> = mags
                .iter()
                .enumerate()
                .map(|(k, &a)| {
                    if k < m0 {
                        1.0
                    } else {
                        (m0 as f64 * a / alpha).powf(expo).min(1.0)
                    }
                })
                .collect();
            let dot: f64 = z_sorted.iter().zip(&mags).map(|(z, a)| z * a).sum();
            let objective = (r - dot) / p.norm(&z_sorted);
            Ok(InnerSolution {
                scenario: Scenario::S1,
                p,
                perm,
                signs,
                m0,
                m1: None,
                z_sorted,
                free: FreeSet::None,
                objective,
            })
        }
        NormParam::One => {
            let m0 = acc.iter().position(|&a| a > r + btol).map_or(n, |k| k + 1);
            // A(m - 1) < r, with A(0) = 0; r = 0 pins z_1 = 1 to keep z nonzero
            let m1 = (1..=n)
                .rev()
                .find(|&m| {
                    let prev = if m == 1 { 0.0 } else { acc[m - 2] };
                    prev < r - btol
                })
                .unwrap_or(1)
                .min(m0);
            let mut z_sorted = vec![0.0; n];
            z_sorted[..m1].fill(1.0);
            let free = if m1 < m0 {
                FreeSet::Block { start: m1, end: m0 }
            } else {
                FreeSet::None
            };
            let objective = (r - prefix[m1]) / m1 as f64;
            Ok(InnerSolution {
                scenario: Scenario::S2,
                p,
                perm,
                signs,
                m0,
                m1: Some(m1),
                z_sorted,
                free,
                objective,
            })
        }
        NormParam::Infinity => unreachable!("handled as S3"),
    }
}

impl InnerSolution {
    pub fn n(&self) -> usize {
        self.signs.len()
    }

    /// Draws a vertex of the solution set, scaled to unit inf-norm.
    ///
    /// Free coordinates independently take one of their two extreme values
    /// with probability 1/2 each; the draw order is the order of `free`.
    pub fn sample_direction<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self.scenario {
            Scenario::S3 => {
                let mut x = self.signs.clone();
                if let FreeSet::Zeros(idx) = &self.free {
                    for &i in idx {
                        x[i] = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    }
                }
                x
            }
            Scenario::S1 | Scenario::S2 => {
                let mut z = self.z_sorted.clone();
                if let FreeSet::Block { start, end } = self.free {
                    for zk in &mut z[start..end] {
                        *zk = if rng.random_bool(0.5) { 1.0 } else { 0.0 };
                    }
                }
                let mut x = vec![0.0; self.n()];
                for (k, &i) in self.perm.iter().enumerate() {
                    x[i] = self.signs[i] * z[k];
                }
                x
            }
        }
    }
}

/// Draws a vertex of the solution set, scaled to unit `p`-norm.
pub fn sample_vertex<R: Rng + ?Sized>(sol: &InnerSolution, rng: &mut R) -> StateVector {
    let mut x = sol.sample_direction(rng);
    let norm = sol.p.norm(&x);
    for v in &mut x {
        *v /= norm;
    }
    StateVector::new(x).expect("solution vertices are nonzero")
}
