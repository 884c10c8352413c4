use std::path::PathBuf;

use anyhow::Context;
use clap::Parser;

use crate::config::{parse_p_list, Algo, ExperimentConfig, Init};

#[derive(Debug, Parser)]
#[command(name = "si-maxcut", version, about = "Run the SI / SI-P max-cut solvers on G-set graphs")]
pub struct Args {
    /// TOML experiment file; flags given on the command line override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Graph file or G-set name (repeatable).
    #[arg(long = "graph", value_name = "PATH|NAME")]
    pub graphs: Vec<String>,
    /// Solver to run.
    #[arg(long, value_enum)]
    pub algo: Option<Algo>,
    /// Comma-separated norm parameters, e.g. `1,2,inf`.
    // spelled out so clap parses one comma list instead of a repeated flag
    #[arg(long, value_parser = parse_p_list)]
    pub p: Option<std::vec::Vec<si_maxcut::NormParam>>,
    /// Iterations per run (per perturbed run for SI-P).
    #[arg(long)]
    pub iters: Option<usize>,
    /// Independent runs per graph and p.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Master seed; run seeds are derived from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// SI-P stall length.
    #[arg(long)]
    pub t: Option<usize>,
    /// SI-P perturbed runs per outer turn.
    #[arg(long = "L", visible_alias = "restarts")]
    pub restarts: Option<usize>,
    /// Lower end of the SI-P perturbation strength range.
    #[arg(long)]
    pub beta_min: Option<f64>,
    /// Upper end of the SI-P perturbation strength range.
    #[arg(long)]
    pub beta_max: Option<f64>,
    /// Cap on SI-P outer turns.
    #[arg(long)]
    pub max_outer: Option<usize>,
    #[arg(long, value_enum)]
    pub init: Option<Init>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV of `graph,best_known`; defaults to the bundled G-set table.
    #[arg(long)]
    pub best_known: Option<PathBuf>,
    /// Directory holding G-set files; defaults to `$GSET_DIR`.
    #[arg(long)]
    pub gset_dir: Option<PathBuf>,
    /// Stop a run once the ratio is unchanged for this many steps.
    #[arg(long)]
    pub early_stop: Option<usize>,
    /// Keep every k-th trajectory entry in runs.jsonl (0 = none).
    #[arg(long)]
    pub trajectory_stride: Option<usize>,
    /// Record per-step cost metrics.
    #[arg(long)]
    pub metrics: bool,
    /// Download missing G-set files (requires --checksums).
    #[arg(long)]
    pub fetch: bool,
    /// Base URL for --fetch downloads.
    #[arg(long)]
    pub fetch_base_url: Option<String>,
    /// File of `sha256  name` lines used to verify downloads.
    #[arg(long)]
    pub checksums: Option<PathBuf>,
}

impl Args {
    pub fn into_config(self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_toml_file(path).context("loading experiment file")?,
            None => ExperimentConfig::default(),
        };
        if !self.graphs.is_empty() {
            cfg.graphs = self.graphs;
        }
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field { $target = v; })*
            };
        }
        set!(algo => cfg.algo, p => cfg.p, iters => cfg.iters, runs => cfg.runs, seed => cfg.seed,
             t => cfg.t, restarts => cfg.restarts, beta_min => cfg.beta_range.0,
             beta_max => cfg.beta_range.1, max_outer => cfg.max_outer, init => cfg.init,
             jobs => cfg.jobs, out => cfg.out, trajectory_stride => cfg.trajectory_stride,
             fetch_base_url => cfg.fetch_base_url);
        if self.best_known.is_some() {
            cfg.best_known = self.best_known;
        }
        if self.gset_dir.is_some() {
            cfg.gset_dir = self.gset_dir;
        }
        if self.early_stop.is_some() {
            cfg.early_stop = self.early_stop;
        }
        if self.checksums.is_some() {
            cfg.checksums = self.checksums;
        }
        cfg.record_metrics |= self.metrics;
        cfg.fetch |= self.fetch;
        cfg.validate()?;
        Ok(cfg)
    }
}
