use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nmf_merge::{Algorithm, InitKind};

use crate::commands::SweepParameter;
use crate::error::{CliError, CliResult};
use crate::manifest::{ReportFormat, RunManifest, Source};

#[derive(Debug, Parser)]
#[command(name = "nmf-merge", version, about = "Over-complete NMF with greedy component merging")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Standard NMF from one initialization per seed.
    Factorize(RunArgs),
    /// Full merge pipeline per seed.
    Pipeline(RunArgs),
    /// Standard NMF against the pipeline from the same initialization.
    Compare(RunArgs),
    /// Subspace and permutation consistency across seeds.
    Consistency(RunArgs),
    /// Compare both methods over a grid of one parameter.
    Sweep(SweepArgs),
    /// Write a built-in fixture's X, W and H.
    ExportFixture(ExportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AlgorithmArg {
    Hals,
    Mu,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Hals => Algorithm::Hals,
            AlgorithmArg::Mu => Algorithm::Mu,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InitArg {
    Random,
    Nndsvd,
    Nndsvda,
    Nndsvdar,
}

impl From<InitArg> for InitKind {
    fn from(a: InitArg) -> Self {
        match a {
            InitArg::Random => InitKind::Random,
            InitArg::Nndsvd => InitKind::Nndsvd,
            InitArg::Nndsvda => InitKind::Nndsvda,
            InitArg::Nndsvdar => InitKind::Nndsvdar,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum FormatArg {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SweepParamArg {
    ExtraK,
    Tolerances,
    Rank,
}

impl From<SweepParamArg> for SweepParameter {
    fn from(a: SweepParamArg) -> Self {
        match a {
            SweepParamArg::ExtraK => SweepParameter::ExtraK,
            SweepParamArg::Tolerances => SweepParameter::Tolerances,
            SweepParamArg::Rank => SweepParameter::Rank,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum MatrixFormat {
    #[default]
    Csv,
    Mm,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// CSV or Matrix Market file holding a nonnegative matrix.
    #[arg(long, conflicts_with = "fixture", required_unless_present = "fixture")]
    pub input: Option<PathBuf>,
    /// Built-in data: appendix-a, planted-MxN-rR-sSEED or duplicates-MxN-rR-dD-sSEED.
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long)]
    pub rank: usize,
    #[arg(long)]
    pub extra_k: Option<usize>,
    /// Tolerance of the initial rank-(r-k) stage.
    #[arg(long)]
    pub eps1: Option<f64>,
    /// Tolerance of the over-complete stage.
    #[arg(long)]
    pub eps2: Option<f64>,
    /// Tolerance of the final stage and of standard NMF.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmArg>,
    #[arg(long, value_enum)]
    pub init: Option<InitArg>,
    /// Use seeds 0..N.
    #[arg(long, default_value_t = 1, conflicts_with = "seed_list")]
    pub seeds: u64,
    #[arg(long, value_delimiter = ',')]
    pub seed_list: Option<Vec<u64>>,
    /// Record objective traces under <out>/traces.
    #[arg(long)]
    pub trace: bool,
    #[arg(long, default_value_t = 1)]
    pub trace_stride: usize,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long, default_value = "nmf-merge-out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: FormatArg,
    /// Worker threads across seeds.
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum)]
    pub param: SweepParamArg,
    /// Comma-separated grid; defaults depend on the parameter.
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub fixture: String,
    #[arg(long, default_value = "nmf-merge-out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub matrix_format: MatrixFormat,
}

impl RunArgs {
    pub fn manifest(&self) -> CliResult<RunManifest> {
        let source = match (&self.input, &self.fixture) {
            (Some(p), None) => Source::Input(p.clone()),
            (None, Some(f)) => Source::Fixture(f.clone()),
            _ => return Err(CliError::Usage("give exactly one of --input and --fixture".into())),
        };
        let mut m = RunManifest::new(source, self.rank, self.out.clone());
        if let Some(k) = self.extra_k {
            m.extra_k = k;
        }
        if let Some(e) = self.eps1 {
            m.eps_initial = e;
        }
        if let Some(e) = self.eps2 {
            m.eps_overcomplete = e;
        }
        if let Some(e) = self.eps {
            m.eps_final = e;
        }
        if let Some(a) = self.algorithm {
            m.algorithm = a.into();
        }
        if let Some(i) = self.init {
            m.init = i.into();
        }
        if let Some(it) = self.max_iterations {
            m.max_iterations = it;
        }
        m.seeds = match &self.seed_list {
            Some(list) => list.clone(),
            None => (0..self.seeds).collect(),
        };
        m.seeds.sort_unstable();
        m.seeds.dedup();
        m.trace = self.trace;
        m.trace_stride = self.trace_stride;
        m.format = match self.format {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
        };
        m.parallel = self.parallel;
        m.validate()?;
        Ok(m)
    }
}
