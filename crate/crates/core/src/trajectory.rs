//! JSONL run logs: one header line, one line per evaluated candidate, and an
//! optional closing summary. Plus dataset export.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use uuid::Uuid;

use crate::search::SearchConfig;

pub const ENGINE_VERSION: &str = concat!("axiomforge/", env!("CARGO_PKG_VERSION"));

/// First eight bytes of SHA-256, big-endian.
pub fn text_hash(text: &str) -> u64 {
    let digest = Sha256::digest(text.as_bytes());
    u64::from_be_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

pub fn hash_hex(hash: u64) -> String {
    format!("{hash:016x}")
}

pub fn now_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryHeader {
    pub run_id: Uuid,
    pub config: SearchConfig,
    pub original_domain_text: String,
    pub problem_text: String,
    pub corpus_domain_name: Option<String>,
    pub seed: u64,
    pub engine_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub step_id: u64,
    pub parent_id: Option<u64>,
    pub phase: String,
    /// Hex form of [`text_hash`] over `text`.
    pub hash: String,
    pub text: String,
    pub edit_description: String,
    pub plan_length: Option<usize>,
    pub regression_ok: bool,
    /// `None` when the score is not finite.
    pub score: Option<f64>,
    pub lev: usize,
    pub oracle_round: usize,
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub success: bool,
    pub best_step_id: Option<u64>,
    pub best_length: Option<usize>,
    pub explored: usize,
    pub oracle_calls: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Record {
    Header(TrajectoryHeader),
    Step(TrajectoryStep),
    Summary(RunSummary),
}

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("step {step} recorded after step {last}")]
    OutOfOrder { step: u64, last: u64 },
    #[error("step {step} names parent {parent}, which is not earlier")]
    BadParent { step: u64, parent: u64 },
    #[error("malformed trajectory {}:{line}: {message}", file.display())]
    MalformedTrajectory {
        file: PathBuf,
        line: usize,
        message: String,
    },
}

/// Receives steps as a search evaluates candidates.
pub trait StepSink {
    fn record(&mut self, step: TrajectoryStep) -> Result<(), TrajectoryError>;
}

fn check_order(last: Option<u64>, step: &TrajectoryStep) -> Result<(), TrajectoryError> {
    if let Some(last) = last {
        if step.step_id <= last {
            return Err(TrajectoryError::OutOfOrder {
                step: step.step_id,
                last,
            });
        }
    }
    if let Some(parent) = step.parent_id {
        if parent >= step.step_id {
            return Err(TrajectoryError::BadParent {
                step: step.step_id,
                parent,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Default, Clone)]
pub struct MemorySink {
    pub steps: Vec<TrajectoryStep>,
}

impl StepSink for MemorySink {
    fn record(&mut self, step: TrajectoryStep) -> Result<(), TrajectoryError> {
        check_order(self.steps.last().map(|s| s.step_id), &step)?;
        self.steps.push(step);
        Ok(())
    }
}

/// Append-only file writer; every record is flushed as it is written.
pub struct TrajectoryWriter {
    path: PathBuf,
    out: BufWriter<File>,
    last: Option<u64>,
}

impl TrajectoryWriter {
    pub fn create(path: impl AsRef<Path>, header: &TrajectoryHeader) -> Result<Self, TrajectoryError> {
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path).map_err(|source| TrajectoryError::Io {
            path: path.clone(),
            source,
        })?;
        let mut writer = Self {
            path,
            out: BufWriter::new(file),
            last: None,
        };
        writer.write(&Record::Header(header.clone()))?;
        Ok(writer)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn write(&mut self, record: &Record) -> Result<(), TrajectoryError> {
        let line = serde_json::to_string(record).expect("records serialize");
        writeln!(self.out, "{line}")
            .and_then(|_| self.out.flush())
            .map_err(|source| TrajectoryError::Io {
                path: self.path.clone(),
                source,
            })
    }

    pub fn finish(mut self, summary: &RunSummary) -> Result<(), TrajectoryError> {
        self.write(&Record::Summary(summary.clone()))
    }
}

impl StepSink for TrajectoryWriter {
    fn record(&mut self, step: TrajectoryStep) -> Result<(), TrajectoryError> {
        check_order(self.last, &step)?;
        self.last = Some(step.step_id);
        self.write(&Record::Step(step))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRun {
    pub header: TrajectoryHeader,
    pub steps: Vec<TrajectoryStep>,
    pub summary: Option<RunSummary>,
}

impl TrajectoryRun {
    pub fn hashes(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.hash.as_str()).collect()
    }

    fn records(&self) -> impl Iterator<Item = Record> + '_ {
        std::iter::once(Record::Header(self.header.clone()))
            .chain(self.steps.iter().cloned().map(Record::Step))
            .chain(self.summary.iter().cloned().map(Record::Summary))
    }
}

/// Reads every run in a file; a header line starts a new run.
pub fn read_trajectory(path: impl AsRef<Path>) -> Result<Vec<TrajectoryRun>, TrajectoryError> {
    let path = path.as_ref();
    let io = |source| TrajectoryError::Io {
        path: path.to_path_buf(),
        source,
    };
    let malformed = |line: usize, message: String| TrajectoryError::MalformedTrajectory {
        file: path.to_path_buf(),
        line,
        message,
    };
    let reader = BufReader::new(File::open(path).map_err(io)?);
    let mut runs: Vec<TrajectoryRun> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(io)?;
        let record: Record = serde_json::from_str(&line).map_err(|e| malformed(line_no, e.to_string()))?;
        match record {
            Record::Header(header) => runs.push(TrajectoryRun {
                header,
                steps: Vec::new(),
                summary: None,
            }),
            Record::Step(step) => {
                let run = runs
                    .last_mut()
                    .ok_or_else(|| malformed(line_no, "step before any header".into()))?;
                if run.summary.is_some() {
                    return Err(malformed(line_no, "step after summary".into()));
                }
                check_order(run.steps.last().map(|s| s.step_id), &step)
                    .map_err(|e| malformed(line_no, e.to_string()))?;
                run.steps.push(step);
            }
            Record::Summary(summary) => {
                let run = runs
                    .last_mut()
                    .ok_or_else(|| malformed(line_no, "summary before any header".into()))?;
                if run.summary.replace(summary).is_some() {
                    return Err(malformed(line_no, "second summary".into()));
                }
            }
        }
    }
    Ok(runs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum ExportFormat {
    Jsonl,
    CsvSummary,
}

/// Writes all runs in `paths` to `out`; returns the number of runs.
pub fn export<P: AsRef<Path>>(
    paths: &[P],
    out: impl AsRef<Path>,
    format: ExportFormat,
) -> Result<usize, TrajectoryError> {
    let mut runs = Vec::new();
    for p in paths {
        runs.extend(read_trajectory(p)?);
    }
    let out = out.as_ref();
    let io = |source| TrajectoryError::Io {
        path: out.to_path_buf(),
        source,
    };
    let file = File::create(out).map_err(io)?;
    match format {
        ExportFormat::Jsonl => {
            let mut w = BufWriter::new(file);
            for run in &runs {
                for record in run.records() {
                    writeln!(w, "{}", serde_json::to_string(&record).expect("records serialize")).map_err(io)?;
                }
            }
            w.flush().map_err(io)?;
        }
        ExportFormat::CsvSummary => {
            let mut w = csv::Writer::from_writer(file);
            let csv_err = |e: csv::Error| io(std::io::Error::other(e));
            w.write_record(["run-id", "algorithm", "success", "best-length", "steps", "oracle-calls"])
                .map_err(csv_err)?;
            for run in &runs {
                let s = run.summary.as_ref();
                w.write_record([
                    run.header.run_id.to_string(),
                    run.header.config.algorithm.to_string(),
                    s.is_some_and(|s| s.success).to_string(),
                    s.and_then(|s| s.best_length).map_or(String::new(), |l| l.to_string()),
                    run.steps.len().to_string(),
                    s.map_or(String::new(), |s| s.oracle_calls.to_string()),
                ])
                .map_err(csv_err)?;
            }
            w.flush().map_err(io)?;
        }
    }
    Ok(runs.len())
}
