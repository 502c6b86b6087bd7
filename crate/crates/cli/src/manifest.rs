use std::path::PathBuf;

use nmf_merge::fixtures::{appendix_a_fixture, planted_duplicates, random_planted};
use nmf_merge::pipeline::PipelineConfig;
use nmf_merge::{Algorithm, DataMatrix, InitKind, InitSpec, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::io::read_matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Fixture(String),
    Input(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

/// Everything that determines a command's results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub source: Source,
    pub rank: usize,
    pub extra_k: usize,
    pub eps_initial: f64,
    pub eps_overcomplete: f64,
    pub eps_final: f64,
    pub algorithm: Algorithm,
    pub init: InitKind,
    pub max_iterations: usize,
    /// Sorted, without duplicates.
    pub seeds: Vec<u64>,
    pub trace: bool,
    pub trace_stride: usize,
    pub format: ReportFormat,
    /// Worker threads. Results do not depend on it, so reports omit it.
    #[serde(skip, default = "one")]
    pub parallel: usize,
    #[serde(skip)]
    pub out_dir: PathBuf,
}

fn one() -> usize {
    1
}

impl RunManifest {
    /// Defaults for everything but the data source, rank and output directory.
    pub fn new(source: Source, rank: usize, out_dir: PathBuf) -> Self {
        let base = PipelineConfig::new(rank);
        Self {
            source,
            rank,
            extra_k: base.extra_k,
            eps_initial: base.eps_initial,
            eps_overcomplete: base.eps_overcomplete,
            eps_final: base.eps_final,
            algorithm: base.algorithm,
            init: InitKind::Random,
            max_iterations: base.max_iterations,
            seeds: vec![0],
            trace: false,
            trace_stride: 1,
            format: ReportFormat::Json,
            parallel: 1,
            out_dir,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.seeds.is_empty() {
            return Err(CliError::Usage("at least one seed is required".into()));
        }
        if self.rank == 0 || self.extra_k == 0 {
            return Err(CliError::Usage("rank and extra-k must be positive".into()));
        }
        if self.parallel == 0 {
            return Err(CliError::Usage("--parallel must be at least 1".into()));
        }
        self.pipeline_config(self.seeds[0]).validate()?;
        Ok(())
    }

    pub fn pipeline_config(&self, seed: u64) -> PipelineConfig {
        PipelineConfig {
            target_rank: self.rank,
            extra_k: self.extra_k,
            eps_initial: self.eps_initial,
            eps_overcomplete: self.eps_overcomplete,
            eps_final: self.eps_final,
            algorithm: self.algorithm,
            init: InitSpec { kind: self.init, seed },
            max_iterations: self.max_iterations,
            trace_stride: if self.trace { self.trace_stride.max(1) } else { 0 },
            ..PipelineConfig::new(self.rank)
        }
    }

    /// Standard NMF settings, stopped at the final tolerance.
    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            algorithm: self.algorithm,
            epsilon: self.eps_final,
            max_iterations: self.max_iterations,
            trace_stride: if self.trace { self.trace_stride.max(1) } else { 0 },
        }
    }

    pub fn load_data(&self) -> CliResult<DataMatrix> {
        match &self.source {
            Source::Input(path) => read_matrix(path),
            Source::Fixture(name) => Ok(fixture_by_name(name)?.x),
        }
    }
}

/// `appendix-a`, `planted-MxN-rR-sSEED` or `duplicates-MxN-rR-dD-sSEED`.
pub fn fixture_by_name(name: &str) -> CliResult<nmf_merge::fixtures::PlantedProblem> {
    let bad = || CliError::Usage(format!("unknown fixture {name:?}"));
    if name == "appendix-a" {
        return Ok(appendix_a_fixture());
    }
    let (kind, rest) = name.split_once('-').ok_or_else(bad)?;
    let parts: Vec<&str> = rest.split('-').collect();
    let (m, n) = parts.first().and_then(|d| d.split_once('x')).ok_or_else(bad)?;
    let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
    let tagged = |prefix: char, idx: usize| parts.get(idx).and_then(|p| p.strip_prefix(prefix)).ok_or_else(bad).and_then(num);
    let (m, n) = (num(m)? as usize, num(n)? as usize);
    let problem = match (kind, parts.len()) {
        ("planted", 3) => random_planted(m, n, tagged('r', 1)? as usize, tagged('s', 2)?)?,
        ("duplicates", 4) => planted_duplicates(m, n, tagged('r', 1)? as usize, tagged('d', 2)? as usize, tagged('s', 3)?)?,
        _ => return Err(bad()),
    };
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_names() {
        assert_eq!(fixture_by_name("appendix-a").unwrap().x.dim(), (8, 8));
        let p = fixture_by_name("planted-40x60-r5-s2").unwrap();
        assert_eq!((p.x.dim(), p.w_true.ncols()), ((40, 60), 5));
        let d = fixture_by_name("duplicates-10x12-r4-d1-s0").unwrap();
        assert_eq!(d.w_true.column(3), d.w_true.column(0));
        for bad in ["nope", "planted-40x60-r5", "planted-40-r5-s1", "planted-axb-r1-s1"] {
            assert!(fixture_by_name(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn manifest_round_trips() {
        let m = RunManifest::new(Source::Fixture("appendix-a".into()), 4, PathBuf::new());
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<RunManifest>(&text).unwrap(), m);
    }
}
