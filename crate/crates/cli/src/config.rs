use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SEED_ENV: &str = "SFL_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// Random accelerations, everything else at rest.
    RandomAccel,
    /// Unit velocity step on agent 1.
    Step,
}

/// Every parameter the subcommands read. Flags that a subcommand does not
/// use are still resolved and logged.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Graph family: ring-fuzz, path-fuzz, lattice-fuzz, directed-ring,
    /// directed-lattice, random-tree, random-planar, permutation-expander.
    #[arg(long, global = true)]
    pub family: Option<String>,

    /// Graph JSON file, used instead of --family/--N.
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,

    /// Network size; a comma list where a command takes several sizes.
    #[arg(long = "N", global = true, value_delimiter = ',')]
    pub n: Vec<usize>,

    /// Largest network size scanned.
    #[arg(long = "N-max", global = true, default_value_t = 1000)]
    pub n_max: usize,

    /// Integrator chain length n; must match the number of gains.
    #[arg(long = "n-order", global = true)]
    pub n_order: Option<usize>,

    /// Relative feedback gains a0,a1,...,a_{n-1}.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub gains: Vec<f64>,

    /// Absolute feedback gains a0,a1,...,a_{n-1}.
    #[arg(long = "abs-gains", global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub abs_gains: Vec<f64>,

    /// Neighborhood size q (even); a comma list for sweep-q.
    #[arg(long, global = true, value_delimiter = ',')]
    pub q: Vec<usize>,

    /// Lattice dimension.
    #[arg(long, global = true, default_value_t = 1)]
    pub d: usize,

    /// Lattice fuzz radius.
    #[arg(long, global = true, default_value_t = 1)]
    pub r: usize,

    /// Uniform edge weight.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub w: f64,

    /// Random edge weights drawn from [lo, hi] for random families.
    #[arg(long = "w-range", global = true, value_delimiter = ',', num_args = 2)]
    pub w_range: Vec<f64>,

    /// Directed lattice offsets as k:w pairs, e.g. -1:1,2:0.5.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub offsets: Vec<String>,

    /// Random permutations in the expander family.
    #[arg(long, global = true, default_value_t = 3)]
    pub perms: usize,

    /// Lattice side lengths for the fuzz-lattice decay fit.
    #[arg(long, global = true, value_delimiter = ',')]
    pub sides: Vec<usize>,

    /// Seed for random families and initial states (SFL_SEED overrides).
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Angle threshold in radians for angle-check.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub psi: f64,

    /// Largest real part flagged by angle-check.
    #[arg(long = "re-max", global = true, default_value_t = 0.1)]
    pub re_max: f64,

    /// Constant c in q = cN^{2/3}.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub c: f64,

    /// Smallest edge weight for the neighborhood-scaling certificate.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub wmin: f64,

    /// Relative tolerance of the neighborhood-scaling certificate.
    #[arg(long, global = true, default_value_t = 0.05)]
    pub tol: f64,

    /// Bound to check: planar, tree, grounded, fiedler-edge-connectivity,
    /// fuzz-lattice, neighborhood-scaling.
    #[arg(long, global = true)]
    pub bound: Option<String>,

    /// Leader node (1-based); selects the leader-follower system.
    #[arg(long, global = true)]
    pub leader: Option<usize>,

    /// Integration step.
    #[arg(long, global = true, default_value_t = 0.01)]
    pub h: f64,

    /// Integration horizon.
    #[arg(long, global = true, default_value_t = 300.0)]
    pub horizon: f64,

    /// Keep every k-th integration step.
    #[arg(long = "sample-every", global = true, default_value_t = 10)]
    pub sample_every: usize,

    /// Initial state for simulate.
    #[arg(long, global = true, value_enum, default_value_t = InitialState::RandomAccel)]
    pub init: InitialState,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output file (stdout when absent). The resolved config is written
    /// next to it as <out>.config.json.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Optional SVG line chart of the main series.
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,

    /// Worker threads for scans and sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

/// A subcommand with its resolved parameters; replaying it reproduces the
/// output bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: String,
    pub params: Params,
}

impl ExperimentConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }
}

/// Applies `SFL_SEED` when it is set.
pub fn resolve_seed(params: &mut Params) -> CliResult<()> {
    if let Ok(raw) = std::env::var(SEED_ENV) {
        params.seed = raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}={raw} is not an unsigned integer")))?;
    }
    Ok(())
}
