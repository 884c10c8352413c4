//! Slow, independent reference computations used to validate the fast paths.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{Cut, Graph};
use crate::subgradient::{boundary_indicator, key_cmp, tie_weights};
use crate::vectorspace::NormParam;

pub const BRUTE_FORCE_MAX_N: usize = 24;
pub const MAX_TIE_EDGES: usize = 20;
pub const DENSE_EIGEN_MAX_N: usize = 4096;

/// Exhaustive max-cut by Gray-code enumeration with vertex 0 pinned to `+1`.
/// Among optimal cuts the first in Gray order is returned.
pub fn brute_force_maxcut(g: &Graph) -> Result<Cut> {
    let n = g.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::Refused(format!(
            "exhaustive search limited to {BRUTE_FORCE_MAX_N} vertices, got {n}"
        )));
    }
    if n == 0 {
        return Ok(Cut {
            side: Vec::new(),
            value: 0.0,
        });
    }
    let mut side = vec![1i8; n];
    let mut value = 0.0;
    let mut best = (0.0, 0u64);
    for k in 1u64..(1u64 << (n - 1)) {
        let v = k.trailing_zeros() as usize + 1;
        let sv = f64::from(side[v]);
        // edges to same-side neighbours become cut, opposite ones uncut
        let gain: f64 = g.neighbors(v).map(|(j, w)| w * sv * f64::from(side[j])).sum();
        value += gain;
        side[v] = -side[v];
        if value > best.0 {
            best = (value, k ^ (k >> 1));
        }
    }
    let side: Vec<i8> = (0..n)
        .map(|i| if i > 0 && best.1 >> (i - 1) & 1 == 1 { -1 } else { 1 })
        .collect();
    Cut::from_side(g, side)
}

/// Grid minimum of `G(z) = (r - (z, |v|)) / |z|_p` over nonincreasing
/// `z in [0, 1]^n` with `z_1 = 1`, `n <= 3`.
///
/// Restricting to that region loses nothing: `G` is invariant under positive
/// scaling, and pairing the largest `z` with the largest `|v|` can only lower
/// the numerator.
pub fn grid_inner_min(v: &[f64], r: f64, p: NormParam, step: f64) -> Result<f64> {
    let n = v.len();
    if n == 0 || n > 3 {
        return Err(Error::Refused(format!("grid oracle supports 1..=3 coordinates, got {n}")));
    }
    if !(step > 0.0 && step <= 1e-2) {
        return Err(Error::Argument(format!("grid step {step} outside (0, 0.01]")));
    }
    let mut a: Vec<f64> = v.iter().map(|t| t.abs()).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    let k = (1.0 / step).round() as usize;
    let grid: Vec<f64> = (0..=k).map(|i| i as f64 / k as f64).collect();
    let pow: Vec<f64> = match p {
        NormParam::Infinity => Vec::new(),
        _ => grid.iter().map(|t| t.powf(p.value())).collect(),
    };
    let norm = |idx: &[usize]| -> f64 {
        match p {
            NormParam::Infinity => 1.0,
            _ => (1.0 + idx.iter().map(|&i| pow[i]).sum::<f64>()).powf(1.0 / p.value()),
        }
    };
    let g = |idx: &[usize]| -> f64 {
        let dot = a[0] + idx.iter().zip(&a[1..]).map(|(&i, aj)| grid[i] * aj).sum::<f64>();
        (r - dot) / norm(idx)
    };
    let mut best = f64::INFINITY;
    match n {
        1 => best = g(&[]),
        2 => {
            for i in 0..=k {
                best = best.min(g(&[i]));
            }
        }
        _ => {
            for i in 0..=k {
                for j in 0..=i {
                    best = best.min(g(&[i, j]));
                }
            }
        }
    }
    Ok(best)
}

/// `max |s|_1` over the full subdifferential of `I` at `x`: every edge with
/// `x_i = x_j` (exact equality) contributes an independent `z_ij in [-1, 1]`,
/// and the maximum is attained at `z_ij = +-1`, enumerated exhaustively.
pub fn max_subgradient_l1(g: &Graph, x: &[f64]) -> Result<f64> {
    if x.len() != g.n() {
        return Err(Error::Argument(format!(
            "state has length {}, graph has {} vertices",
            x.len(),
            g.n()
        )));
    }
    let mut s = vec![0.0; g.n()];
    let mut ties = Vec::new();
    for e in g.edges() {
        let d = x[e.u] - x[e.v];
        if d == 0.0 {
            ties.push(*e);
        } else {
            let z = d.signum();
            s[e.u] += e.w * z;
            s[e.v] -= e.w * z;
        }
    }
    if ties.len() > MAX_TIE_EDGES {
        return Err(Error::Refused(format!(
            "{} tied edges exceed the enumeration limit of {MAX_TIE_EDGES}",
            ties.len()
        )));
    }
    // start with every tied edge at z = +1
    for e in &ties {
        s[e.u] += e.w;
        s[e.v] -= e.w;
    }
    let l1 = |s: &[f64]| s.iter().map(|t| t.abs()).sum::<f64>();
    let mut best = l1(&s);
    let mut z = vec![1.0; ties.len()];
    for k in 1u64..(1u64 << ties.len()) {
        let b = k.trailing_zeros() as usize;
        let e = ties[b];
        let delta = -2.0 * z[b] * e.w;
        s[e.u] += delta;
        s[e.v] -= delta;
        z[b] = -z[b];
        best = best.max(l1(&s));
    }
    Ok(best)
}

/// Every order in `Sigma(x)`: sorted by `(x, pbar)` with ties permuted
/// arbitrarily. `x` must already be inf-normalized. Refuses when the count
/// exceeds `limit`.
pub fn admissible_orders(g: &Graph, x: &[f64], limit: usize) -> Result<Vec<Vec<usize>>> {
    let (q, p) = tie_weights(g, x);
    let p_bar = boundary_indicator(x, &q, &p);
    let mut base: Vec<usize> = (0..x.len()).collect();
    base.sort_by(|&a, &b| key_cmp(x, &p_bar, a, b));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &base {
        match groups.last_mut() {
            Some(grp) if x[grp[0]] == x[i] && p_bar[grp[0]] == p_bar[i] => grp.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let mut count: usize = 1;
    for grp in &groups {
        for k in 1..=grp.len() {
            count = count.saturating_mul(k);
        }
    }
    if count > limit {
        return Err(Error::Refused(format!("{count} admissible orders exceed limit {limit}")));
    }
    let mut out = vec![Vec::with_capacity(x.len())];
    for grp in &groups {
        let perms = permutations(grp);
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for prefix in &out {
            for perm in &perms {
                let mut o = prefix.clone();
                o.extend_from_slice(perm);
                next.push(o);
            }
        }
        out = next;
    }
    Ok(out)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (k, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// All Laplacian eigenvalues in ascending order via a dense symmetric solve.
pub fn dense_laplacian_eigenvalues(g: &Graph) -> Result<Vec<f64>> {
    let n = g.n();
    if n > DENSE_EIGEN_MAX_N {
        return Err(Error::Refused(format!(
            "dense eigensolve limited to {DENSE_EIGEN_MAX_N} vertices, got {n}"
        )));
    }
    let mut l = DMatrix::<f64>::zeros(n, n);
    for e in g.edges() {
        l[(e.u, e.v)] -= e.w;
        l[(e.v, e.u)] -= e.w;
        l[(e.u, e.u)] += e.w;
        l[(e.v, e.v)] += e.w;
    }
    let mut vals: Vec<f64> = SymmetricEigen::new(l).eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}
