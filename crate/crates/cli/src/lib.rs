//! Command-line front end: data loading, run manifests, benchmark commands
//! and report writing.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
pub mod manifest;

use std::path::Path;

use args::{Command, ExportArgs, MatrixFormat};
use commands::{CommandOutput, SeedFailure};
use error::CliResult;
use manifest::{fixture_by_name, ReportFormat, RunManifest};

pub const REPORT_FILE: &str = "report.json";
pub const CSV_FILE: &str = "report.csv";
/// Wall-clock measurements live here so the report stays reproducible.
pub const TIMINGS_FILE: &str = "timings.json";
pub const TRACE_DIR: &str = "traces";

/// Runs one command and writes its outputs. Returns the seeds that failed.
pub fn run(command: &Command) -> CliResult<Vec<SeedFailure>> {
    let (manifest, output) = match command {
        Command::ExportFixture(a) => {
            export_fixture(a)?;
            return Ok(Vec::new());
        }
        Command::Factorize(a) => {
            let m = a.manifest()?;
            let x = m.load_data()?;
            let out = commands::factorize(&m, &x)?;
            (m, out)
        }
        Command::Pipeline(a) => {
            let m = a.manifest()?;
            let x = m.load_data()?;
            let out = commands::pipeline(&m, &x)?;
            (m, out)
        }
        Command::Compare(a) => {
            let m = a.manifest()?;
            let x = m.load_data()?;
            let out = commands::compare(&m, &x)?;
            (m, out)
        }
        Command::Consistency(a) => {
            let m = a.manifest()?;
            let x = m.load_data()?;
            let out = commands::consistency(&m, &x)?;
            (m, out)
        }
        Command::Sweep(a) => {
            let m = a.run.manifest()?;
            let x = m.load_data()?;
            let param = a.param.into();
            let values = a.values.clone().unwrap_or_else(|| commands::SweepParameter::default_values(param, &m));
            let out = commands::sweep(&m, &x, param, &values)?;
            (m, out)
        }
    };
    write_outputs(&manifest, &output)?;
    Ok(output.failures)
}

pub fn write_outputs(manifest: &RunManifest, output: &CommandOutput) -> CliResult<()> {
    let dir = &manifest.out_dir;
    io::write_text(&dir.join(REPORT_FILE), &pretty(&output.report)?)?;
    io::write_text(&dir.join(TIMINGS_FILE), &pretty(&output.timings)?)?;
    if manifest.format == ReportFormat::Csv {
        io::write_text(&dir.join(CSV_FILE), &output.csv)?;
    }
    for (name, text) in &output.traces {
        io::write_text(&dir.join(TRACE_DIR).join(name), text)?;
    }
    Ok(())
}

fn pretty(v: &serde_json::Value) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn export_fixture(a: &ExportArgs) -> CliResult<()> {
    let p = fixture_by_name(&a.fixture)?;
    let (ext, fmt): (&str, fn(ndarray::ArrayView2<'_, f64>) -> String) = match a.matrix_format {
        MatrixFormat::Csv => ("csv", io::format_csv),
        MatrixFormat::Mm => ("mtx", io::format_matrix_market),
    };
    let write = |name: &str, m: ndarray::ArrayView2<'_, f64>| io::write_text(&Path::new(&a.out).join(format!("{name}.{ext}")), &fmt(m));
    write("X", p.x.values())?;
    write("W", p.w_true.view())?;
    write("H", p.h_true.view())?;
    io::write_text(&a.out.join("README.txt"), &format!("{}\n", p.description))
}
