//! The simple iterative (SI) loop.
//!
//! Each step solves the inner subproblem for the current subgradient in
//! closed form, samples a vertex of its solution set, applies the coordinate
//! changes one at a time while updating `I`, `q` and `p` over the touched
//! edges only, and finally re-sorts the subgradient order by adjacent swaps.
//!
//! With integer weights every quantity the loop maintains is a sum of
//! integers, so at `p = inf` the whole trajectory is exact.

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Cut, Graph};
use crate::inner::{solve_inner, Scenario};
use crate::rng::SolverRng;
use crate::subgradient::{displacement, SubgradientContext};
use crate::vectorspace::{total_variation, NormParam, StateVector, DEFAULT_TIE_TOL};

/// Relative tolerance of the scenario-3 boundary test `r = |s|_1`.
pub const INNER_TOL: f64 = 1e-9;
/// Relative slack allowed before a decrease of `r` counts as a violation.
pub const MONOTONE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub p: NormParam,
    /// Number of iterations `T`.
    pub iters: usize,
    pub seed: u64,
    pub tie_tol: f64,
    pub record_metrics: bool,
    /// Stop once `r` has been unchanged for this many consecutive steps.
    pub stall_window: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            p: NormParam::Infinity,
            iters: 2000,
            seed: 0,
            tie_tol: DEFAULT_TIE_TOL,
            record_metrics: false,
            stall_window: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iters == 0 {
            return Err(Error::Argument("iteration count must be at least 1".into()));
        }
        if !(self.tie_tol >= 0.0 && self.tie_tol < 0.5) {
            return Err(Error::Argument(format!("tie tolerance {} out of range", self.tie_tol)));
        }
        if self.stall_window == Some(0) {
            return Err(Error::Argument("stall window must be positive".into()));
        }
        Ok(())
    }
}

/// Per-step cost quantities.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationMetrics {
    /// `n - m0(k)`.
    pub unsaturated: Vec<usize>,
    /// `delta_sigma(k)`.
    pub displacement: Vec<f64>,
    /// `|V(k)|`.
    pub changed: Vec<usize>,
}

impl IterationMetrics {
    pub fn len(&self) -> usize {
        self.changed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.changed.is_empty()
    }

    pub fn cost(&self, k: usize) -> f64 {
        self.unsaturated[k] as f64 + self.displacement[k] + self.changed[k] as f64
    }

    fn push(&mut self, info: &StepInfo) {
        self.unsaturated.push(info.unsaturated);
        self.displacement.push(info.displacement);
        self.changed.push(info.changed);
    }

    /// Means of `(n - m0)/n`, `delta_sigma/n`, `|V|/n`.
    pub fn normalized_means(&self, n: usize) -> MetricSummary {
        let len = self.len().max(1) as f64;
        let nf = n as f64;
        MetricSummary {
            unsaturated: self.unsaturated.iter().sum::<usize>() as f64 / len / nf,
            displacement: self.displacement.iter().sum::<f64>() / len / nf,
            changed: self.changed.iter().sum::<usize>() as f64 / len / nf,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub unsaturated: f64,
    pub displacement: f64,
    pub changed: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInfo {
    pub r_before: f64,
    pub r_after: f64,
    /// `|s^k|_1` of the subgradient the step started from.
    pub s_l1_before: f64,
    pub scenario: Scenario,
    pub unsaturated: usize,
    pub changed: usize,
    pub swaps: usize,
    pub displacement: f64,
}

/// Iterate `x^k` (unit inf-norm), its ratio `r^k` and subgradient data.
#[derive(Clone, Debug)]
pub struct SolverState {
    x: Vec<f64>,
    r: f64,
    ctx: SubgradientContext,
    k: usize,
    best_r: f64,
    best_x: Vec<f64>,
    tie_tol: f64,
    /// Number of coordinates strictly inside `(-1, 1)`.
    interior: usize,
}

pub fn init_state(g: &Graph, x0: &[f64], cfg: &SolverConfig) -> Result<SolverState> {
    cfg.validate()?;
    if x0.len() != g.n() {
        return Err(Error::Argument(format!(
            "initial vector has length {}, graph has {} vertices",
            x0.len(),
            g.n()
        )));
    }
    let x = StateVector::new(x0.to_vec())?.normalized(cfg.tie_tol).into_vec();
    let r = total_variation(g, &x);
    let ctx = SubgradientContext::from_normalized(g, &x);
    Ok(SolverState {
        interior: x.iter().filter(|v| v.abs() != 1.0).count(),
        best_x: x.clone(),
        best_r: r,
        x,
        r,
        ctx,
        k: 0,
        tie_tol: cfg.tie_tol,
    })
}

impl SolverState {
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn ctx(&self) -> &SubgradientContext {
        &self.ctx
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn best_r(&self) -> f64 {
        self.best_r
    }

    pub fn best_x(&self) -> &[f64] {
        &self.best_x
    }

    /// One SI iteration.
    pub fn step(&mut self, g: &Graph, p: NormParam, rng: &mut SolverRng) -> Result<StepInfo> {
        let r_before = self.r;
        let s_l1_before = self.ctx.s_l1();
        let sol = solve_inner(self.ctx.s(), self.r, p, INNER_TOL)?;
        let mut target = sol.sample_direction(rng);
        for v in &mut target {
            if (*v - 1.0).abs() <= self.tie_tol {
                *v = 1.0;
            } else if (*v + 1.0).abs() <= self.tie_tol {
                *v = -1.0;
            }
        }
        let (changed, swaps, disp) = self.transition(g, &target, true)?;
        self.k += 1;
        Ok(StepInfo {
            r_before,
            r_after: self.r,
            s_l1_before,
            scenario: sol.scenario,
            unsaturated: g.n() - sol.m0,
            changed,
            swaps,
            displacement: disp,
        })
    }

    /// Moves the iterate to `target` (unit inf-norm) coordinate by
    /// coordinate, then refreshes the subgradient order.
    ///
    /// When the iterate first becomes binary, `r` is recomputed once from
    /// scratch so that roundoff carried over from a continuous start does not
    /// survive into the (integer-valued) binary phase.
    pub(crate) fn transition(
        &mut self,
        g: &Graph,
        target: &[f64],
        enforce_ascent: bool,
    ) -> Result<(usize, usize, f64)> {
        let old_sigma_inv = self.ctx.sigma_inv().to_vec();
        let mut changed = 0;
        let mut d_i = 0.0;
        let was_interior = self.interior;
        for (i, &t) in target.iter().enumerate() {
            if self.x[i] != t {
                let before = self.x[i].abs() != 1.0;
                d_i += self.ctx.move_coordinate(g, &mut self.x, i, t);
                changed += 1;
                match (before, t.abs() != 1.0) {
                    (true, false) => self.interior -= 1,
                    (false, true) => self.interior += 1,
                    _ => {}
                }
            }
        }
        let r_next = if was_interior > 0 && self.interior == 0 {
            total_variation(g, &self.x)
        } else {
            self.r + d_i
        };
        if enforce_ascent && r_next < self.r - MONOTONE_TOL * self.r.abs().max(1.0) {
            return Err(Error::Internal(format!(
                "ratio decreased from {} to {r_next} at step {}",
                self.r,
                self.k + 1
            )));
        }
        self.r = r_next;
        let swaps = if changed > 0 {
            self.ctx.refresh_from_state(g, &self.x)
        } else {
            0
        };
        let disp = displacement(&old_sigma_inv, self.ctx.sigma_inv());
        if self.r > self.best_r {
            self.best_r = self.r;
            self.best_x.copy_from_slice(&self.x);
        }
        Ok((changed, swaps, disp))
    }
}

/// Outcome of a full SI run.
#[derive(Clone, Debug)]
pub struct SiRun {
    pub initial_r: f64,
    pub best_r: f64,
    pub best_x: Vec<f64>,
    pub final_x: Vec<f64>,
    /// Threshold-at-zero cut of `best_x`.
    pub cut: Cut,
    /// `r^0, r^1, ..., r^K`.
    pub r_trajectory: Vec<f64>,
    /// `|s^0|_1, ..., |s^K|_1`.
    pub s_l1_trajectory: Vec<f64>,
    pub metrics: Option<IterationMetrics>,
    pub iterations: usize,
}

pub fn run_si(g: &Graph, x0: &[f64], cfg: &SolverConfig) -> Result<SiRun> {
    let mut rng = SolverRng::seed_from_u64(cfg.seed);
    run_si_with_rng(g, x0, cfg, &mut rng)
}

pub fn run_si_with_rng(g: &Graph, x0: &[f64], cfg: &SolverConfig, rng: &mut SolverRng) -> Result<SiRun> {
    let mut state = init_state(g, x0, cfg)?;
    let mut r_trajectory = Vec::with_capacity(cfg.iters + 1);
    let mut s_l1_trajectory = Vec::with_capacity(cfg.iters + 1);
    r_trajectory.push(state.r);
    s_l1_trajectory.push(state.ctx.s_l1());
    let mut metrics = cfg.record_metrics.then(IterationMetrics::default);
    let mut unchanged = 0usize;

    for _ in 0..cfg.iters {
        let info = state.step(g, cfg.p, rng)?;
        r_trajectory.push(info.r_after);
        s_l1_trajectory.push(state.ctx.s_l1());
        if let Some(m) = metrics.as_mut() {
            m.push(&info);
        }
        if info.r_after == info.r_before {
            unchanged += 1;
        } else {
            unchanged = 0;
        }
        if cfg.stall_window.is_some_and(|w| unchanged >= w) {
            break;
        }
    }

    let cut = Cut::from_side(g, StateVector::new(state.best_x.clone())?.sign_pattern())?;
    Ok(SiRun {
        initial_r: r_trajectory[0],
        best_r: state.best_r,
        iterations: state.k,
        best_x: state.best_x,
        final_x: state.x,
        cut,
        r_trajectory,
        s_l1_trajectory,
        metrics,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Witness {
    /// A coordinate strictly inside `(-|x|_inf, |x|_inf)`.
    Interior(usize),
    /// The flip `T_i` with the largest increase of `F`.
    ImprovingFlip { vertex: usize, gain: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    pub is_local_optimum: bool,
    pub witness: Option<Witness>,
}

/// Checks membership in the flip-stable set: `F(T_i x) <= F(x) + 1e-9` for
/// every `i`. Only binary points (`S< = {}`) qualify.
pub fn certify_local_optimum(g: &Graph, x: &StateVector) -> Result<Certificate> {
    if x.len() != g.n() {
        return Err(Error::Argument(format!(
            "state has length {}, graph has {} vertices",
            x.len(),
            g.n()
        )));
    }
    let x = x.normalized(DEFAULT_TIE_TOL);
    let xs = x.as_slice();
    if let Some(i) = xs.iter().position(|v| v.abs() != 1.0) {
        return Ok(Certificate {
            is_local_optimum: false,
            witness: Some(Witness::Interior(i)),
        });
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, &xi) in xs.iter().enumerate() {
        let gain: f64 = g
            .neighbors(i)
            .map(|(j, w)| w * ((-xi - xs[j]).abs() - (xi - xs[j]).abs()))
            .sum();
        if gain > 1e-9 && best.is_none_or(|(_, b)| gain > b) {
            best = Some((i, gain));
        }
    }
    Ok(match best {
        Some((vertex, gain)) => Certificate {
            is_local_optimum: false,
            witness: Some(Witness::ImprovingFlip { vertex, gain }),
        },
        None => Certificate {
            is_local_optimum: true,
            witness: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_triples(3, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn path3() -> Graph {
        Graph::from_triples(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn cycle4() -> Graph {
        Graph::from_triples(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap()
    }

    fn cfg(p: NormParam, iters: usize, seed: u64) -> SolverConfig {
        SolverConfig {
            p,
            iters,
            seed,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn init_examples() {
        let g = triangle();
        let c = SolverConfig::default();
        let a = init_state(&g, &[1.0, 1.0, -1.0], &c).unwrap();
        let b = init_state(&g, &[2.0, 2.0, -2.0], &c).unwrap();
        assert_eq!(a.r(), 4.0);
        assert_eq!(a.x(), b.x());
        assert_eq!(a.r(), b.r());
        assert!(matches!(init_state(&g, &[0.0; 3], &c), Err(Error::Domain(_))));
    }

    #[test]
    fn path_strict_ascent_from_constant_state() {
        let g = path3();
        let mut state = init_state(&g, &[1.0, 1.0, 1.0], &SolverConfig::default()).unwrap();
        assert_eq!(state.r(), 0.0);
        let mut rng = SolverRng::seed_from_u64(1);
        let info = state.step(&g, NormParam::Infinity, &mut rng).unwrap();
        assert!(info.r_after >= 2.0);
        assert_eq!(info.scenario, Scenario::S3);
    }

    #[test]
    fn triangle_fixed_point_is_stationary_in_ratio() {
        let g = triangle();
        let mut state = init_state(&g, &[1.0, 1.0, -1.0], &SolverConfig::default()).unwrap();
        let mut rng = SolverRng::seed_from_u64(3);
        for _ in 0..10 {
            let info = state.step(&g, NormParam::Infinity, &mut rng).unwrap();
            assert_eq!(info.r_after, 4.0);
            assert_eq!(info.s_l1_before, 4.0);
        }
    }

    #[test]
    fn empty_change_set_keeps_state() {
        let g = Graph::from_triples(2, &[(0, 1, 1.0)]).unwrap();
        let mut state = init_state(&g, &[1.0, -1.0], &SolverConfig::default()).unwrap();
        let before = (state.r(), state.ctx().q().to_vec(), state.ctx().p().to_vec());
        let mut rng = SolverRng::seed_from_u64(0);
        let info = state.step(&g, NormParam::Infinity, &mut rng).unwrap();
        assert_eq!(info.changed, 0);
        assert_eq!(before, (state.r(), state.ctx().q().to_vec(), state.ctx().p().to_vec()));
    }

    #[test]
    fn small_graphs_reach_their_maxcut() {
        for seed in 0..10 {
            for x0 in [[1.0, 1.0, 1.0], [0.3, -0.2, 0.9]] {
                let run = run_si(&triangle(), &x0, &cfg(NormParam::Infinity, 50, seed)).unwrap();
                assert_eq!(run.cut.value, 2.0);
            }
            let run = run_si(&cycle4(), &[1.0, 1.0, 1.0, 1.0], &cfg(NormParam::Infinity, 50, seed))
                .unwrap();
            assert_eq!(run.cut.value, 4.0);
            let run = run_si(&cycle4(), &[0.1, 0.2, 0.3, 0.4], &cfg(NormParam::Finite(2.0), 50, seed))
                .unwrap();
            assert_eq!(run.cut.value, 4.0);
        }
    }

    #[test]
    fn trajectories_are_monotone_for_all_norms() {
        let g = Graph::from_triples(
            6,
            &[(0, 1, 2.0), (1, 2, 1.0), (2, 3, 3.0), (3, 4, 1.0), (4, 5, 2.0), (5, 0, 1.0), (0, 3, 1.0)],
        )
        .unwrap();
        for p in [NormParam::One, NormParam::Finite(1.5), NormParam::Finite(2.0), NormParam::Infinity] {
            let mut c = cfg(p, 100, 4);
            c.record_metrics = true;
            let run = run_si(&g, &[0.2, -0.1, 0.5, 0.0, 0.3, -0.4], &c).unwrap();
            for w in run.r_trajectory.windows(2) {
                assert!(w[1] >= w[0] - 1e-9, "{p}: {w:?}");
            }
            for (r, s) in run.r_trajectory.iter().zip(&run.s_l1_trajectory) {
                assert!(*r <= s + 1e-9);
            }
            let m = run.metrics.unwrap();
            assert_eq!(m.len(), 100);
            assert!(m.changed.iter().all(|&c| c <= g.n()));
        }
    }

    #[test]
    fn stall_window_stops_early() {
        let mut c = cfg(NormParam::Infinity, 1000, 0);
        c.stall_window = Some(5);
        let run = run_si(&triangle(), &[1.0, 1.0, -1.0], &c).unwrap();
        assert_eq!(run.iterations, 5);
        assert_eq!(run.r_trajectory.len(), 6);
    }

    #[test]
    fn certificate_examples() {
        let g = triangle();
        let cert = certify_local_optimum(&g, &StateVector::new(vec![1.0, 1.0, -1.0]).unwrap()).unwrap();
        assert!(cert.is_local_optimum);

        let cert = certify_local_optimum(&path3(), &StateVector::new(vec![1.0; 3]).unwrap()).unwrap();
        assert!(!cert.is_local_optimum);
        assert_eq!(cert.witness, Some(Witness::ImprovingFlip { vertex: 1, gain: 4.0 }));

        let cert = certify_local_optimum(&g, &StateVector::new(vec![1.0, 0.5, -1.0]).unwrap()).unwrap();
        assert_eq!(cert.witness, Some(Witness::Interior(1)));
    }

    #[test]
    fn zero_iterations_rejected() {
        assert!(run_si(&triangle(), &[1.0, 1.0, -1.0], &cfg(NormParam::Infinity, 0, 0)).is_err());
    }
}
