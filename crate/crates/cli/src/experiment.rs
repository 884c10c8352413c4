//! Multi-run orchestration over graphs, norm parameters and seeds.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, Context};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use si_maxcut::spectral::{default_max_iters, DEFAULT_SPECTRAL_TOL};
use si_maxcut::{
    derive_seed, max_laplacian_eigenvector, max_normalized_laplacian_eigenvector, read_gset_file, run_si, run_si_p, spectral_cut, Graph, MetricSummary,
    NormParam, SolverConfig, StateVector,
};

use crate::config::{Algo, ExperimentConfig, Init};
use crate::data::{fetch_graph, graph_name, parse_checksums, resolve_graph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SipStats {
    pub t: usize,
    pub restarts: usize,
    pub beta_range: (f64, f64),
    pub count: usize,
    pub total_iterations: usize,
    pub perturbations: usize,
}

/// One line of `runs.jsonl`. Wall time is kept out so the file is
/// reproducible byte for byte; see `timings.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub graph: String,
    pub algo: String,
    pub p: Option<String>,
    pub run: usize,
    pub seed: u64,
    pub iters: usize,
    pub n: usize,
    pub m: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sip: Option<SipStats>,
    pub initial_cut: f64,
    pub final_cut: f64,
    pub best_r: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trajectory: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub metrics: Option<MetricSummary>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Timing {
    pub graph: String,
    pub algo: String,
    pub p: Option<String>,
    pub run: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub graph: String,
    pub message: String,
}

#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub records: Vec<RunRecord>,
    pub timings: Vec<Timing>,
    pub failures: Vec<Failure>,
}

struct LoadedGraph {
    name: String,
    graph: Graph,
    /// Shared starting point for spectral inits.
    x0: Option<Vec<f64>>,
}

fn load_graph(spec: &str, cfg: &ExperimentConfig) -> anyhow::Result<LoadedGraph> {
    let name = graph_name(spec);
    let dir = cfg.gset_dir();
    let path: PathBuf = match resolve_graph(spec, dir.as_deref()) {
        Some(p) => p,
        None if cfg.fetch => {
            let dir = dir.ok_or_else(|| anyhow!("--fetch needs --gset-dir or GSET_DIR"))?;
            let sums_path = cfg.checksums.as_ref().expect("validated");
            let sums = parse_checksums(&std::fs::read_to_string(sums_path)?)?;
            fetch_graph(&name, &cfg.fetch_base_url, &dir, &sums)?
        }
        None => {
            return Err(anyhow!(
                "graph `{spec}` not found (looked for a file and in {})",
                dir.map_or_else(|| "no G-set directory".to_string(), |d| d.display().to_string())
            ))
        }
    };
    let graph = read_gset_file(&path).with_context(|| format!("loading {}", path.display()))?;
    let needs_vector = cfg.algo == Algo::Sc || cfg.init != Init::Random;
    let x0 = if needs_vector {
        let solve = if cfg.init == Init::NormalizedSpectral {
            max_normalized_laplacian_eigenvector
        } else {
            max_laplacian_eigenvector
        };
        let eig = solve(&graph, DEFAULT_SPECTRAL_TOL, default_max_iters(graph.n()), cfg.seed)
            .with_context(|| format!("spectral initialization of {name}"))?;
        Some(match cfg.init {
            Init::SpectralRounded => eig.vector.iter().map(|&t| if t >= 0.0 { 1.0 } else { -1.0 }).collect(),
            _ => eig.vector,
        })
    } else {
        None
    };
    Ok(LoadedGraph { name, graph, x0 })
}

fn random_signs(n: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = si_maxcut::SolverRng::seed_from_u64(seed);
    (0..n).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect()
}

fn downsample(traj: &[f64], stride: usize) -> Option<Vec<f64>> {
    if stride == 0 {
        return None;
    }
    let mut out: Vec<f64> = traj.iter().step_by(stride).copied().collect();
    if !(traj.len() - 1).is_multiple_of(stride) {
        out.push(*traj.last().expect("trajectories are nonempty"));
    }
    Some(out)
}

fn initial_cut(g: &Graph, x0: &[f64]) -> anyhow::Result<f64> {
    Ok(spectral_cut(g, x0)?.value)
}

fn run_one(lg: &LoadedGraph, p: NormParam, run: usize, cfg: &ExperimentConfig) -> anyhow::Result<RunRecord> {
    let g = &lg.graph;
    let seed = derive_seed(cfg.seed, run as u64);
    let x0 = match &lg.x0 {
        Some(x) => x.clone(),
        None => random_signs(g.n(), derive_seed(seed, u64::MAX)),
    };
    let base = RunRecord {
        graph: lg.name.clone(),
        algo: cfg.algo.to_string(),
        p: Some(p.to_string()),
        run,
        seed,
        iters: cfg.iters,
        n: g.n(),
        m: g.m(),
        sip: None,
        initial_cut: initial_cut(g, &x0)?,
        final_cut: 0.0,
        best_r: 0.0,
        trajectory: None,
        metrics: None,
    };
    let solver = SolverConfig {
        p,
        iters: cfg.iters,
        seed,
        record_metrics: cfg.record_metrics,
        stall_window: cfg.early_stop,
        ..SolverConfig::default()
    };
    match cfg.algo {
        Algo::Si => {
            let out = run_si(g, &x0, &solver)?;
            Ok(RunRecord {
                final_cut: out.cut.value,
                best_r: out.best_r,
                trajectory: downsample(&out.r_trajectory, cfg.trajectory_stride),
                metrics: out.metrics.map(|m| m.normalized_means(g.n())),
                ..base
            })
        }
        Algo::Sip => {
            let pcfg = cfg.perturb_config();
            let out = run_si_p(g, &x0, &solver, &pcfg)?;
            Ok(RunRecord {
                final_cut: out.cut.value,
                best_r: out.best_r,
                trajectory: (cfg.trajectory_stride > 0).then(|| out.turn_best.clone()),
                sip: Some(SipStats {
                    t: pcfg.stall,
                    restarts: pcfg.restarts,
                    beta_range: pcfg.beta_range,
                    count: out.count,
                    total_iterations: out.total_iterations,
                    perturbations: out.perturbations,
                }),
                ..base
            })
        }
        Algo::Sc => {
            let cut = spectral_cut(g, &x0)?;
            let r = si_maxcut::eval_f(g, &StateVector::from_signs(&cut.side)?)?;
            Ok(RunRecord {
                p: None,
                iters: 0,
                final_cut: cut.value,
                best_r: r,
                ..base
            })
        }
    }
}

/// Runs every (graph, p, run) task of `cfg`. Missing or malformed graphs and
/// failing runs are reported in `failures` and do not stop the batch.
pub fn run_experiment(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .context("building worker pool")?;
    let mut outcome = Outcome::default();
    for spec in &cfg.graphs {
        let lg = match load_graph(spec, cfg) {
            Ok(lg) => lg,
            Err(e) => {
                outcome.failures.push(Failure {
                    graph: graph_name(spec),
                    message: format!("{e:#}"),
                });
                continue;
            }
        };
        let tasks: Vec<(NormParam, usize)> = match cfg.algo {
            Algo::Sc => vec![(NormParam::Infinity, 0)],
            _ => cfg
                .p
                .iter()
                .flat_map(|&p| (0..cfg.runs).map(move |r| (p, r)))
                .collect(),
        };
        let results: Vec<_> = pool.install(|| {
            tasks
                .par_iter()
                .map(|&(p, run)| {
                    let start = Instant::now();
                    let rec = run_one(&lg, p, run, cfg);
                    (p, run, rec, start.elapsed().as_secs_f64())
                })
                .collect()
        });
        for (p, run, rec, seconds) in results {
            match rec {
                Ok(rec) => {
                    outcome.timings.push(Timing {
                        graph: rec.graph.clone(),
                        algo: rec.algo.clone(),
                        p: rec.p.clone(),
                        run,
                        seconds,
                    });
                    outcome.records.push(rec);
                }
                Err(e) => outcome.failures.push(Failure {
                    graph: lg.name.clone(),
                    message: format!("p={p} run {run}: {e:#}"),
                }),
            }
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn downsampling_keeps_endpoints() {
        let t: Vec<f64> = (0..=10).map(f64::from).collect();
        assert_eq!(downsample(&t, 0), None);
        assert_eq!(downsample(&t, 1).unwrap().len(), 11);
        assert_eq!(downsample(&t, 4).unwrap(), vec![0.0, 4.0, 8.0, 10.0]);
        assert_eq!(downsample(&t, 5).unwrap(), vec![0.0, 5.0, 10.0]);
    }

    #[test]
    fn random_signs_are_seeded() {
        assert_eq!(random_signs(16, 3), random_signs(16, 3));
        assert!(random_signs(16, 3).iter().all(|v| v.abs() == 1.0));
    }
}
