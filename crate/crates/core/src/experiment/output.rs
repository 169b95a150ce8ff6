//! On-disk formats.
//!
//! A trace file is line-delimited JSON: one header line carrying the full
//! configuration, one line per slot, then one line per packet ledger entry.
//! Each line has a `type` field (`header`, `slot` or `packet`). A metrics
//! file is a single JSON object holding the configuration and a
//! [`RunSummary`].

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{attempts_stats, reset_stats, run_metrics, Metrics};
use crate::engine::RunConfig;
use crate::error::{ConfigError, Error, Result};
use crate::protocol::ProtocolKind;
use crate::trace::{PacketLedger, SlotRecord, Trace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub protocol: ProtocolKind,
    pub seed: u64,
    pub complete: bool,
    pub slots: u64,
    pub arrivals: u64,
    pub successes: u64,
    /// Live packets after the last slot.
    pub backlog: u64,
    pub metrics: Metrics,
    pub mean_attempts: f64,
    pub mean_resets: f64,
}

impl RunSummary {
    pub fn of(trace: &Trace) -> Self {
        RunSummary {
            protocol: trace.config.protocol,
            seed: trace.config.seed,
            complete: trace.complete,
            slots: trace.len(),
            arrivals: trace.arrivals(),
            successes: trace.successes(),
            backlog: trace.backlog(),
            metrics: run_metrics(trace),
            mean_attempts: attempts_stats(trace).mean,
            mean_resets: reset_stats(trace).mean,
        }
    }
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum LineOut<'a> {
    Header { config: &'a RunConfig, complete: bool },
    Slot(&'a SlotRecord),
    Packet(&'a PacketLedger),
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum LineIn {
    Header { config: RunConfig, complete: bool },
    Slot(SlotRecord),
    Packet(PacketLedger),
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

pub fn write_trace(trace: &Trace, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    let mut line = |value: &LineOut| -> Result<()> {
        serde_json::to_writer(&mut out, value)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))
    };
    line(&LineOut::Header {
        config: &trace.config,
        complete: trace.complete,
    })?;
    for record in &trace.records {
        line(&LineOut::Slot(record))?;
    }
    for entry in &trace.ledger {
        line(&LineOut::Packet(entry))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_trace(path: &Path) -> Result<Trace> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut header = None;
    let mut records = Vec::new();
    let mut ledger = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line)? {
            LineIn::Header { config, complete } => header = Some((config, complete)),
            LineIn::Slot(record) => records.push(record),
            LineIn::Packet(entry) => ledger.push(entry),
        }
    }
    let (config, complete) = header.ok_or_else(|| ConfigError::Parse {
        path: path.to_path_buf(),
        message: "trace has no header line".into(),
    })?;
    Ok(Trace {
        config,
        complete,
        records,
        ledger,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsFile {
    pub config: RunConfig,
    pub summary: RunSummary,
}

pub fn write_metrics(trace: &Trace, path: &Path) -> Result<MetricsFile> {
    let file = MetricsFile {
        config: trace.config.clone(),
        summary: RunSummary::of(trace),
    };
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, &file)?;
    out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))?;
    Ok(file)
}

/// Opens a CSV writer whose first lines are `# ` comments embedding
/// `config` as JSON.
pub(crate) fn csv_with_header(path: &Path, config: &impl Serialize) -> Result<csv::Writer<BufWriter<File>>> {
    let mut out = create(path)?;
    let json = serde_json::to_string(config)?;
    writeln!(out, "# rebackoff {}", env!("CARGO_PKG_VERSION")).map_err(|e| Error::io(path, e))?;
    writeln!(out, "# config: {json}").map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(out))
}

/// Reader for CSV files written by this crate; skips `#` comment lines.
pub(crate) fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file))
}

/// Formats an optional number as a CSV cell; `None` is an empty cell.
pub(crate) fn cell(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}
