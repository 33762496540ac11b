//! Batch manifests: a TOML document with global output settings and one
//! `[[experiment]]` table per run (grammar in docs/manifest.md), plus the
//! dispatcher that executes them and emits JSON reports and CSV series.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{self, ExperimentConfig, ExperimentReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Json, OutputFormat::Csv]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    /// Output directory; overridable from the command line or environment.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub format: Vec<OutputFormat>,
    #[serde(default)]
    pub verbosity: u8,
    #[serde(default, rename = "experiment")]
    pub experiments: Vec<ExperimentConfig>,
}

/// Parses and validates a manifest. An empty file yields a manifest of zero
/// experiments. Unknown keys are rejected with the offending key name;
/// out-of-range values with the violated bound.
pub fn parse_manifest(path: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(path)?;
    let manifest: RunManifest =
        toml::from_str(&text).map_err(|e| Error::Manifest(e.to_string()))?;
    let mut seen = std::collections::BTreeSet::new();
    for cfg in &manifest.experiments {
        cfg.validate()?;
        if !seen.insert(cfg.name()) {
            return Err(Error::Manifest(format!(
                "duplicate experiment name '{}'; assign unique names",
                cfg.name()
            )));
        }
    }
    Ok(manifest)
}

#[derive(Debug, Clone)]
pub struct DispatchOptions {
    pub output: PathBuf,
    pub formats: Vec<OutputFormat>,
    pub seed_override: Option<u64>,
    pub verbosity: u8,
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

fn write_report_files(
    report: &mut ExperimentReport,
    dir: &Path,
    formats: &[OutputFormat],
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if formats.contains(&OutputFormat::Csv) {
        for k in 0..report.series_data.len() {
            let (label, rows) = &report.series_data[k];
            let file = format!("{}_{}.csv", sanitize(&report.name), sanitize(label));
            let path = dir.join(&file);
            let mut out = String::with_capacity(32 * rows.len() + 32);
            out.push_str("l,value,mode,multiplicity\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{:.17e},{},{}\n",
                    r.index, r.value, r.mode, r.multiplicity
                ));
            }
            fs::write(&path, out)?;
            report.series[k].csv = Some(file);
            written.push(path);
        }
    }
    if formats.contains(&OutputFormat::Json) {
        let path = dir.join(format!("{}.json", sanitize(&report.name)));
        let mut f = fs::File::create(&path)?;
        serde_json::to_writer_pretty(&mut f, report)?;
        f.write_all(b"\n")?;
        written.push(path);
    }
    Ok(written)
}

/// Runs every experiment in order, writing one JSON report and the series
/// CSVs per experiment. Experiment failures are recorded and the run
/// continues; I/O failures abort. Returns process exit status: 0 iff every
/// pass flag is true.
pub fn dispatch(manifest: &RunManifest, opts: &DispatchOptions) -> Result<i32> {
    fs::create_dir_all(&opts.output)?;
    // Probe writability up front so a bad output directory aborts cleanly.
    let probe = opts.output.join(".write_probe");
    fs::write(&probe, b"")
        .map_err(|e| Error::Manifest(format!("output dir not writable: {e}")))?;
    let _ = fs::remove_file(&probe);

    let mut all_pass = true;
    let mut summary: Vec<(String, String, f64)> = Vec::new();
    for cfg in &manifest.experiments {
        let mut cfg = cfg.clone();
        if let Some(seed) = opts.seed_override {
            cfg.seed = seed;
        }
        match experiments::run(&cfg) {
            Ok(mut report) => {
                write_report_files(&mut report, &opts.output, &opts.formats)?;
                if opts.verbosity > 0 {
                    for c in &report.criteria {
                        println!(
                            "  [{}] {} = {:.6e} ({})",
                            if c.pass { "pass" } else { "FAIL" },
                            c.name,
                            c.measured,
                            c.requirement
                        );
                    }
                }
                all_pass &= report.pass;
                summary.push((
                    report.name.clone(),
                    if report.pass { "pass" } else { "FAIL" }.into(),
                    report.wall_time_s,
                ));
            }
            Err(e) => {
                all_pass = false;
                summary.push((cfg.name(), format!("error: {e}"), 0.0));
            }
        }
    }
    println!("{:<24} {:<28} {:>9}", "experiment", "status", "wall [s]");
    for (name, status, wall) in &summary {
        println!("{name:<24} {status:<28} {wall:>9.2}");
    }
    Ok(if all_pass { 0 } else { 1 })
}
