//! Subgradient data for the total variation `I` and the ordered selection
//! `s^sigma`.
//!
//! For a point `x` the subdifferential projects onto the intervals
//! `[p_i - q_i, p_i + q_i]`, where `q_i` is the weight of edges to vertices on
//! the same level as `i` and `p_i` is the signed weight to everything else.
//! Sorting vertices by `(x_i, pbar_i)` and orienting every edge from the later
//! vertex to the earlier one picks a subgradient that certifies strict ascent
//! whenever any subgradient does.
//!
//! `s^sigma` depends only on the permutation, so reordering by adjacent swaps
//! updates it in O(1) per swap.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::vectorspace::{sign, StateVector};

#[derive(Clone, Debug, PartialEq)]
pub struct SubgradientContext {
    q: Vec<f64>,
    p: Vec<f64>,
    p_bar: Vec<f64>,
    sigma: Vec<usize>,
    sigma_inv: Vec<usize>,
    s: Vec<f64>,
}

#[inline]
fn signum0(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `(q, p)` for an inf-normalized point, ties tested exactly.
pub fn tie_weights(g: &Graph, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = g.n();
    let mut q = vec![0.0; n];
    let mut p = vec![0.0; n];
    for e in g.edges() {
        let d = x[e.u] - x[e.v];
        if d == 0.0 {
            q[e.u] += e.w;
            q[e.v] += e.w;
        } else {
            let s = signum0(d);
            p[e.u] += e.w * s;
            p[e.v] -= e.w * s;
        }
    }
    (q, p)
}

/// The boundary indicator `pbar` for an inf-normalized point.
///
/// Vertices at `+1` take `p - q`, vertices at `-1` take `p + q`, interior
/// vertices take `p + sign(p) q`.
pub fn boundary_indicator(x: &[f64], q: &[f64], p: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(q.iter().zip(p))
        .map(|(&xi, (&qi, &pi))| {
            if xi == 1.0 {
                pi - qi
            } else if xi == -1.0 {
                pi + qi
            } else {
                pi + sign(pi) * qi
            }
        })
        .collect()
}

#[inline]
pub(crate) fn key_cmp(x: &[f64], p_bar: &[f64], a: usize, b: usize) -> Ordering {
    x[a].total_cmp(&x[b])
        .then(p_bar[a].total_cmp(&p_bar[b]))
        .then(a.cmp(&b))
}

/// `s_i = sum_j w_ij sign(pos(i) - pos(j))` for a permutation given by its
/// inverse (`sigma_inv[v]` is the position of vertex `v`).
pub fn subgradient_for_order(g: &Graph, sigma_inv: &[usize]) -> Vec<f64> {
    let mut s = vec![0.0; g.n()];
    for e in g.edges() {
        let z = if sigma_inv[e.u] > sigma_inv[e.v] { 1.0 } else { -1.0 };
        s[e.u] += e.w * z;
        s[e.v] -= e.w * z;
    }
    s
}

/// True when `sigma` lists vertices in nondecreasing `(x, pbar)` order.
pub fn is_admissible_order(x: &[f64], p_bar: &[f64], sigma: &[usize]) -> bool {
    sigma.windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        x[a] < x[b] || (x[a] == x[b] && p_bar[a] <= p_bar[b])
    })
}

/// Builds `(q, p, pbar, sigma, s^sigma)` from scratch.
///
/// `x` is first rescaled to unit inf-norm and coordinates within `tie_tol` of
/// `+-1` are snapped onto the level sets; every later comparison is exact.
pub fn build_context(g: &Graph, x: &StateVector, tie_tol: f64) -> Result<SubgradientContext> {
    if x.len() != g.n() {
        return Err(Error::Argument(format!(
            "state has length {}, graph has {} vertices",
            x.len(),
            g.n()
        )));
    }
    let x = x.normalized(tie_tol);
    Ok(SubgradientContext::from_normalized(g, x.as_slice()))
}

impl SubgradientContext {
    pub(crate) fn from_normalized(g: &Graph, x: &[f64]) -> Self {
        let n = g.n();
        let (q, p) = tie_weights(g, x);
        let p_bar = boundary_indicator(x, &q, &p);
        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.sort_by(|&a, &b| key_cmp(x, &p_bar, a, b));
        let mut sigma_inv = vec![0; n];
        for (pos, &v) in sigma.iter().enumerate() {
            sigma_inv[v] = pos;
        }
        let s = subgradient_for_order(g, &sigma_inv);
        Self {
            q,
            p,
            p_bar,
            sigma,
            sigma_inv,
            s,
        }
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn p_bar(&self) -> &[f64] {
        &self.p_bar
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn sigma_inv(&self) -> &[usize] {
        &self.sigma_inv
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn s_l1(&self) -> f64 {
        self.s.iter().map(|v| v.abs()).sum()
    }

    /// Re-sorts `sigma` under new keys by adjacent swaps, adjusting `s` by
    /// `-+2w` whenever the swapped vertices share an edge of weight `w`.
    /// Returns the number of swaps.
    pub fn refresh(&mut self, g: &Graph, x: &[f64], p_bar_new: Vec<f64>) -> usize {
        debug_assert_eq!(p_bar_new.len(), g.n());
        self.p_bar = p_bar_new;
        let n = self.sigma.len();
        let mut swaps = 0;
        for i in 1..n {
            let mut j = i;
            while j > 0 && key_cmp(x, &self.p_bar, self.sigma[j], self.sigma[j - 1]).is_lt() {
                self.sigma.swap(j - 1, j);
                let front = self.sigma[j - 1];
                let back = self.sigma[j];
                self.sigma_inv[front] = j - 1;
                self.sigma_inv[back] = j;
                if let Some(w) = g.weight(front, back) {
                    self.s[front] -= 2.0 * w;
                    self.s[back] += 2.0 * w;
                }
                swaps += 1;
                j -= 1;
            }
        }
        swaps
    }

    /// Recomputes `pbar` from the maintained `(q, p)` and refreshes the order.
    pub fn refresh_from_state(&mut self, g: &Graph, x: &[f64]) -> usize {
        let p_bar = boundary_indicator(x, &self.q, &self.p);
        self.refresh(g, x, p_bar)
    }

    /// Moves coordinate `i` of `x` to `value`, updating `q` and `p` over the
    /// incident edges. Returns the change in `I`.
    pub(crate) fn move_coordinate(&mut self, g: &Graph, x: &mut [f64], i: usize, value: f64) -> f64 {
        let old = x[i];
        if old == value {
            return 0.0;
        }
        let mut d_i = 0.0;
        for (j, w) in g.neighbors(i) {
            let c = x[j];
            d_i += w * ((value - c).abs() - (old - c).abs());
            let dq = w * (f64::from(u8::from(value == c)) - f64::from(u8::from(old == c)));
            self.q[i] += dq;
            self.q[j] += dq;
            let dp = w * (signum0(value - c) - signum0(old - c));
            self.p[i] += dp;
            self.p[j] -= dp;
        }
        x[i] = value;
        d_i
    }

    /// `|s|_1 - r`. Zero marks the fixed point `x / |x|_inf in Sgn(s)`;
    /// a value below `-tol` means an upstream invariant broke.
    pub fn norm_gap(&self, r: f64, tol: f64) -> Result<f64> {
        let gap = self.s_l1() - r;
        if gap < -tol {
            return Err(Error::Internal(format!(
                "ratio {r} exceeds |s|_1 = {} by more than {tol}",
                self.s_l1()
            )));
        }
        Ok(gap)
    }
}

/// Displacement `sum_i |sigma_new(i) - sigma_old(i)| / 2n`.
pub fn displacement(old: &[usize], new: &[usize]) -> f64 {
    let n = old.len();
    if n == 0 {
        return 0.0;
    }
    let total: usize = old.iter().zip(new).map(|(&a, &b)| a.abs_diff(b)).sum();
    total as f64 / (2 * n) as f64
}
