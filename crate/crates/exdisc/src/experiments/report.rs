//! Machine-readable experiment reports: named criteria with measured values
//! and pass flags, plus the merged series backing them (emitted as CSV by the
//! dispatcher).

use std::time::Instant;

use serde::Serialize;

use super::config::{ExperimentConfig, ExperimentKind};
use crate::spectra::{SingularValueSeries, SpectrumReport};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub name: String,
    pub measured: f64,
    /// Human-readable bound, e.g. "< 1e-8" or "in [-2.15, -1.85]".
    pub requirement: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesRow {
    pub index: usize,
    pub value: f64,
    pub mode: usize,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesOut {
    pub label: String,
    pub rows: usize,
    /// Filled by the dispatcher when a CSV file is written.
    pub csv: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub name: String,
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
    pub pass: bool,
    pub wall_time_s: f64,
    pub series: Vec<SeriesOut>,
    #[serde(skip)]
    pub series_data: Vec<(String, Vec<SeriesRow>)>,
}

pub struct ReportBuilder {
    start: Instant,
    report: ExperimentReport,
}

impl ReportBuilder {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        ReportBuilder {
            start: Instant::now(),
            report: ExperimentReport {
                schema_version: REPORT_SCHEMA_VERSION,
                name: cfg.name(),
                kind: cfg.kind,
                config: cfg.clone(),
                seed: cfg.seed,
                criteria: Vec::new(),
                pass: true,
                wall_time_s: 0.0,
                series: Vec::new(),
                series_data: Vec::new(),
            },
        }
    }

    pub fn criterion(&mut self, name: &str, measured: f64, requirement: String, pass: bool) {
        self.report.criteria.push(CriterionResult {
            name: name.to_string(),
            measured,
            requirement,
            pass,
        });
    }

    pub fn series_sv(&mut self, s: &SingularValueSeries) {
        let rows: Vec<SeriesRow> = s
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| SeriesRow {
                index: i + 1,
                value: e.value,
                mode: e.mode,
                multiplicity: e.multiplicity,
            })
            .collect();
        self.push_series(&s.source, rows);
    }

    /// Spectrum entries up to `cap`, ascending.
    pub fn series_spectrum(&mut self, label: &str, rep: &SpectrumReport, cap: f64) {
        let rows: Vec<SeriesRow> = rep
            .entries
            .iter()
            .take_while(|e| e.value <= cap)
            .enumerate()
            .map(|(i, e)| SeriesRow {
                index: i + 1,
                value: e.value,
                mode: e.mode,
                multiplicity: e.multiplicity,
            })
            .collect();
        self.push_series(label, rows);
    }

    pub fn series_raw(&mut self, label: &str, rows: Vec<SeriesRow>) {
        self.push_series(label, rows);
    }

    fn push_series(&mut self, label: &str, rows: Vec<SeriesRow>) {
        self.report.series.push(SeriesOut {
            label: label.to_string(),
            rows: rows.len(),
            csv: None,
        });
        self.report.series_data.push((label.to_string(), rows));
    }

    pub fn finish(mut self) -> ExperimentReport {
        self.report.pass = self.report.criteria.iter().all(|c| c.pass);
        self.report.wall_time_s = self.start.elapsed().as_secs_f64();
        self.report
    }
}
