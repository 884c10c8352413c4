//! SI with random perturbation (SI-P).
//!
//! When the ratio has stalled for `t + 1` consecutive steps the iterate is
//! replaced by a random flip of its sign pattern, where coordinate `i` flips
//! with probability `exp(-beta |pbar_i|)`. The outer driver repeats batches
//! of `L` independent perturbed runs, warm-started from the incumbent, until
//! a batch fails to improve on it.

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Cut, Graph};
use crate::rng::SolverRng;
use crate::si::{init_state, SolverConfig, SolverState};
use crate::vectorspace::{NormParam, StateVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerturbConfig {
    /// Stall length `t`; a perturbation fires after `t + 1` equal steps.
    pub stall: usize,
    /// Perturbed runs per outer turn (`L`).
    pub restarts: usize,
    /// Iterations per perturbed run (`T`).
    pub iters: usize,
    /// `beta` is drawn uniformly from the open interval.
    pub beta_range: (f64, f64),
    pub max_outer: usize,
}

impl Default for PerturbConfig {
    fn default() -> Self {
        Self {
            stall: 3,
            restarts: 20,
            iters: 2000,
            beta_range: (0.0, 1.0),
            max_outer: 64,
        }
    }
}

impl PerturbConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.iters == 0 || self.max_outer == 0 {
            return Err(Error::Argument(
                "restarts, iterations and max_outer must all be positive".into(),
            ));
        }
        let (lo, hi) = self.beta_range;
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
            return Err(Error::Argument(format!("invalid beta range ({lo}, {hi})")));
        }
        Ok(())
    }

    fn draw_beta(&self, rng: &mut SolverRng) -> f64 {
        let (lo, hi) = self.beta_range;
        loop {
            let b = rng.random_range(lo..hi);
            if b > lo {
                return b;
            }
        }
    }
}

pub fn flip_probability(beta: f64, p_bar_i: f64) -> f64 {
    (-beta * p_bar_i.abs()).exp()
}

/// Flips each coordinate of the sign pattern of `x` independently with
/// probability `exp(-beta |pbar_i|)`.
pub fn perturb<R: Rng + ?Sized>(
    x: &StateVector,
    p_bar: &[f64],
    beta: f64,
    rng: &mut R,
) -> Result<StateVector> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Argument(format!("beta must be positive, got {beta}")));
    }
    if p_bar.len() != x.len() {
        return Err(Error::Argument(format!(
            "state has length {}, boundary indicator has {}",
            x.len(),
            p_bar.len()
        )));
    }
    let side: Vec<i8> = x
        .sign_pattern()
        .into_iter()
        .zip(p_bar)
        .map(|(s, &pb)| if rng.random::<f64>() < flip_probability(beta, pb) { -s } else { s })
        .collect();
    StateVector::from_signs(&side)
}

#[derive(Clone, Debug)]
pub struct PerturbedRun {
    pub beta: f64,
    pub r_opt: f64,
    pub x_opt: Vec<f64>,
    pub perturbations: usize,
    pub r_trajectory: Vec<f64>,
}

fn same_ratio(a: f64, b: f64, exact: bool) -> bool {
    if exact {
        a == b
    } else {
        (a - b).abs() <= 1e-9 * a.abs().max(1.0)
    }
}

/// One perturbed SI run of `pcfg.iters` steps. `cfg.iters` is ignored.
pub fn si_perturb(
    g: &Graph,
    x0: &[f64],
    cfg: &SolverConfig,
    pcfg: &PerturbConfig,
    beta: f64,
    rng: &mut SolverRng,
) -> Result<PerturbedRun> {
    pcfg.validate()?;
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Argument(format!("beta must be positive, got {beta}")));
    }
    let exact = cfg.p == NormParam::Infinity && g.has_integer_weights();
    let mut state: SolverState = init_state(g, x0, cfg)?;
    let mut r_opt = state.r();
    let mut x_opt = state.x().to_vec();
    let mut history = Vec::with_capacity(pcfg.iters + 1);
    history.push(state.r());
    let mut perturbations = 0;

    for k in 0..pcfg.iters {
        let x_k = StateVector::new(state.x().to_vec())?;
        let p_bar_k = state.ctx().p_bar().to_vec();
        state.step(g, cfg.p, rng)?;
        let r_next = state.r();
        if r_next > r_opt {
            r_opt = r_next;
            x_opt.copy_from_slice(state.x());
        }
        let stalled = k >= pcfg.stall
            && history[k - pcfg.stall..=k]
                .iter()
                .all(|&r| same_ratio(r, r_next, exact));
        if stalled {
            let target = perturb(&x_k, &p_bar_k, beta, rng)?;
            state.transition(g, target.as_slice(), false)?;
            perturbations += 1;
        }
        history.push(state.r());
    }

    Ok(PerturbedRun {
        beta,
        r_opt,
        x_opt,
        perturbations,
        r_trajectory: history,
    })
}

#[derive(Clone, Debug)]
pub struct SiPRun {
    pub initial_r: f64,
    pub best_r: f64,
    pub best_x: Vec<f64>,
    pub cut: Cut,
    /// Number of outer turns executed.
    pub count: usize,
    /// `count * L * T`.
    pub total_iterations: usize,
    /// Incumbent ratio after each turn.
    pub turn_best: Vec<f64>,
    pub perturbations: usize,
}

/// The outer SI-P driver. Runs within a turn execute in parallel; each uses
/// a seed drawn sequentially from the master stream, so results do not
/// depend on the thread count.
pub fn run_si_p(g: &Graph, x0: &[f64], cfg: &SolverConfig, pcfg: &PerturbConfig) -> Result<SiPRun> {
    cfg.validate()?;
    pcfg.validate()?;
    let first = init_state(g, x0, cfg)?;
    let initial_r = first.r();
    let mut best_r = initial_r;
    let mut best_x = first.x().to_vec();
    drop(first);

    let exact = cfg.p == NormParam::Infinity && g.has_integer_weights();
    let mut master = SolverRng::seed_from_u64(cfg.seed);
    let mut count = 0;
    let mut turn_best = Vec::new();
    let mut perturbations = 0;
    while count < pcfg.max_outer {
        count += 1;
        let draws: Vec<(f64, u64)> = (0..pcfg.restarts)
            .map(|_| (pcfg.draw_beta(&mut master), master.random::<u64>()))
            .collect();
        let start = best_x.clone();
        let runs = draws
            .par_iter()
            .map(|&(beta, seed)| {
                let mut rng = SolverRng::seed_from_u64(seed);
                si_perturb(g, &start, cfg, pcfg, beta, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        perturbations += runs.iter().map(|r| r.perturbations).sum::<usize>();
        let mut winner = &runs[0];
        for run in &runs[1..] {
            if run.r_opt > winner.r_opt {
                winner = run;
            }
        }
        let improved = winner.r_opt > best_r && !same_ratio(winner.r_opt, best_r, exact);
        if improved {
            best_r = winner.r_opt;
            best_x.clone_from(&winner.x_opt);
        }
        turn_best.push(best_r);
        if !improved {
            break;
        }
    }

    let cut = Cut::from_side(g, StateVector::new(best_x.clone())?.sign_pattern())?;
    Ok(SiPRun {
        initial_r,
        best_r,
        best_x,
        cut,
        count,
        total_iterations: count * pcfg.restarts * pcfg.iters,
        turn_best,
        perturbations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let t: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        Graph::from_triples(n, &t).unwrap()
    }

    #[test]
    fn flip_probability_examples() {
        assert_eq!(flip_probability(1.0, 0.0), 1.0);
        assert!((flip_probability(0.5, 2.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((flip_probability(0.5, -2.0) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn perturb_rejects_bad_beta() {
        let x = StateVector::new(vec![1.0, -1.0]).unwrap();
        let mut rng = SolverRng::seed_from_u64(0);
        assert!(perturb(&x, &[1.0, 1.0], 0.0, &mut rng).is_err());
        assert!(perturb(&x, &[1.0, 1.0], -1.0, &mut rng).is_err());
        assert!(perturb(&x, &[1.0], 0.5, &mut rng).is_err());
    }

    #[test]
    fn zero_indicator_flips_everything() {
        let x = StateVector::new(vec![1.0, -1.0, 1.0]).unwrap();
        let mut rng = SolverRng::seed_from_u64(0);
        let y = perturb(&x, &[0.0; 3], 0.7, &mut rng).unwrap();
        assert_eq!(y.as_slice(), &[-1.0, 1.0, -1.0]);
    }

    #[test]
    fn perturbation_fires_on_a_stall() {
        let g = cycle(4);
        let cfg = SolverConfig::default();
        let pcfg = PerturbConfig {
            iters: 20,
            ..PerturbConfig::default()
        };
        let mut rng = SolverRng::seed_from_u64(2);
        let run = si_perturb(&g, &[1.0, -1.0, 1.0, -1.0], &cfg, &pcfg, 0.5, &mut rng).unwrap();
        assert!(run.perturbations > 0);
        assert_eq!(run.r_opt, 8.0);
        assert_eq!(run.r_trajectory.len(), 21);
    }

    #[test]
    fn outer_loop_stops_when_nothing_improves() {
        let g = cycle(6);
        let cfg = SolverConfig::default();
        let pcfg = PerturbConfig {
            restarts: 4,
            iters: 30,
            ..PerturbConfig::default()
        };
        let run = run_si_p(&g, &[1.0, -1.0, 1.0, -1.0, 1.0, -1.0], &cfg, &pcfg).unwrap();
        assert_eq!(run.count, 1);
        assert_eq!(run.cut.value, 6.0);
        assert_eq!(run.total_iterations, 4 * 30);
    }

    #[test]
    fn outer_loop_is_seed_deterministic() {
        let g = cycle(9);
        let cfg = SolverConfig {
            seed: 11,
            ..SolverConfig::default()
        };
        let pcfg = PerturbConfig {
            restarts: 3,
            iters: 40,
            ..PerturbConfig::default()
        };
        let x0 = vec![0.5; 9];
        let a = run_si_p(&g, &x0, &cfg, &pcfg).unwrap();
        let b = run_si_p(&g, &x0, &cfg, &pcfg).unwrap();
        assert_eq!(a.best_x, b.best_x);
        assert_eq!(a.turn_best, b.turn_best);
    }
}
