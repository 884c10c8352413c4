//! Max-cut through the continuous ratio `F(x) = I(x) / |x|_inf`, solved by a
//! simple iterative (SI) scheme whose inner subproblem has a closed form.
//!
//! ```
//! use si_maxcut::{run_si, Graph, SolverConfig};
//!
//! let g = Graph::from_triples(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap();
//! let run = run_si(&g, &[1.0, 1.0, 1.0, 1.0], &SolverConfig::default()).unwrap();
//! assert_eq!(run.cut.value, 4.0);
//! ```

pub mod error;
pub mod graph;
pub mod inner;
pub mod oracle;
pub mod perturb;
pub mod rng;
pub mod si;
pub mod spectral;
pub mod subgradient;
pub mod vectorspace;

pub use error::{Error, Result};
pub use graph::{cut_value, laplacian_apply, parse_gset, read_gset_file, Cut, Edge, Graph};
pub use inner::{accumulation, sample_vertex, solve_inner, FreeSet, InnerSolution, Scenario};
pub use perturb::{perturb, run_si_p, si_perturb, PerturbConfig, PerturbedRun, SiPRun};
pub use rng::{derive_seed, SolverRng};
pub use si::{
    certify_local_optimum, init_state, run_si, run_si_with_rng, Certificate, IterationMetrics, MetricSummary,
    SiRun, SolverConfig, SolverState, StepInfo, Witness,
};
pub use spectral::{max_laplacian_eigenvector, max_normalized_laplacian_eigenvector, spectral_cut, Eigenpair};
pub use subgradient::{build_context, SubgradientContext};
pub use vectorspace::{eval_f, eval_i, flip, level_sets, LevelSets, NormParam, StateVector};
