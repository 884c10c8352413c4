use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use si_maxcut::NormParam;

pub const DEFAULT_FETCH_BASE: &str = "https://web.stanford.edu/~yyye/yyye/Gset/";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    /// Plain simple iteration.
    Si,
    /// Simple iteration with random perturbation and restarts.
    Sip,
    /// Spectral cut: sign-rounded Laplacian eigenvector.
    Sc,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Si => "SI",
            Self::Sip => "SI-P",
            Self::Sc => "SC",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    /// Leading Laplacian eigenvector, used as a continuous starting point.
    Spectral,
    /// The same eigenvector rounded to signs.
    SpectralRounded,
    /// Leading eigenvector of the normalized Laplacian `D^-1/2 L D^-1/2`.
    NormalizedSpectral,
    /// Uniform random signs drawn from each run's seed.
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graphs: Vec<String>,
    pub algo: Algo,
    pub p: Vec<NormParam>,
    pub iters: usize,
    pub runs: usize,
    pub seed: u64,
    /// Stall length before a perturbation fires.
    pub t: usize,
    /// Perturbed runs per outer turn.
    pub restarts: usize,
    pub beta_range: (f64, f64),
    pub max_outer: usize,
    pub init: Init,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub out: PathBuf,
    /// Overrides the bundled best-known table.
    pub best_known: Option<PathBuf>,
    /// Falls back to `$GSET_DIR` when unset.
    pub gset_dir: Option<PathBuf>,
    pub early_stop: Option<usize>,
    /// Keep every `k`-th trajectory entry in `runs.jsonl`; 0 drops trajectories.
    pub trajectory_stride: usize,
    pub record_metrics: bool,
    pub fetch: bool,
    pub fetch_base_url: String,
    /// `sha256  name` lines; required by `fetch`.
    pub checksums: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            graphs: Vec::new(),
            algo: Algo::Si,
            p: vec![NormParam::Infinity],
            iters: 2000,
            runs: 1,
            seed: 0,
            t: 3,
            restarts: 20,
            beta_range: (0.0, 1.0),
            max_outer: 64,
            init: Init::Spectral,
            jobs: 0,
            out: PathBuf::from("results"),
            best_known: None,
            gset_dir: None,
            early_stop: None,
            trajectory_stride: 0,
            record_metrics: false,
            fetch: false,
            fetch_base_url: DEFAULT_FETCH_BASE.to_string(),
            checksums: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.graphs.is_empty() {
            bail!("no graphs given");
        }
        if self.p.is_empty() {
            bail!("no norm parameter given");
        }
        if self.runs == 0 || self.iters == 0 {
            bail!("runs and iterations must be positive");
        }
        if self.fetch && self.checksums.is_none() {
            bail!("--fetch needs a checksum file (--checksums) to verify downloads");
        }
        self.perturb_config().validate()?;
        Ok(())
    }

    pub fn perturb_config(&self) -> si_maxcut::PerturbConfig {
        si_maxcut::PerturbConfig {
            stall: self.t,
            restarts: self.restarts,
            iters: self.iters,
            beta_range: self.beta_range,
            max_outer: self.max_outer,
        }
    }

    pub fn gset_dir(&self) -> Option<PathBuf> {
        self.gset_dir
            .clone()
            .or_else(|| std::env::var_os("GSET_DIR").map(PathBuf::from))
    }
}

/// Parses `1,2,inf` style lists.
pub fn parse_p_list(s: &str) -> anyhow::Result<Vec<NormParam>> {
    s.split(',')
        .map(|t| t.parse::<NormParam>().map_err(anyhow::Error::from))
        .collect()
}
