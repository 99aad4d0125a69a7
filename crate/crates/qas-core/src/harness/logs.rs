//! Crash-safe episode logging and the run summary file.
//!
//! episodes.csv column order is fixed: `episode,num_gates,depth,num_2q,
//! fidelity_or_error,reward_sum,admissible,optimal,seconds`. Every row is
//! flushed as it is written so an interrupted run keeps its partial log.
//! With `log_timing` off (the default) the seconds column is a `0`
//! placeholder and the file is byte-identical across reruns of the same
//! (config, seed).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::run::{EpisodeRecord, RunSummary};
use super::HarnessError;

pub const CSV_HEADER: &str =
    "episode,num_gates,depth,num_2q,fidelity_or_error,reward_sum,admissible,optimal,seconds";

pub struct EpisodeCsvWriter {
    path: PathBuf,
    out: BufWriter<File>,
    log_timing: bool,
}

impl EpisodeCsvWriter {
    pub fn create(path: impl AsRef<Path>, log_timing: bool) -> Result<Self, HarnessError> {
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut writer = Self { path, out: BufWriter::new(file), log_timing };
        writer.line(CSV_HEADER)?;
        Ok(writer)
    }

    pub fn append(&mut self, r: &EpisodeRecord) -> Result<(), HarnessError> {
        let seconds = if self.log_timing { format!("{}", r.seconds) } else { "0".to_string() };
        let row = format!(
            "{},{},{},{},{},{},{},{},{}",
            r.episode,
            r.metrics.num_gates,
            r.metrics.depth,
            r.metrics.num_2q,
            r.terminal_value,
            r.reward_sum,
            r.admissible,
            r.optimal,
            seconds
        );
        self.line(&row)
    }

    fn line(&mut self, s: &str) -> Result<(), HarnessError> {
        let io_err = |source| HarnessError::Io { path: self.path.display().to_string(), source };
        self.out.write_all(s.as_bytes()).map_err(io_err)?;
        self.out.write_all(b"\n").map_err(io_err)?;
        self.out.flush().map_err(io_err)
    }
}

pub fn write_summary(summary: &RunSummary, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(summary)
        .map_err(|e| HarnessError::Config(vec![format!("summary serialization: {e}")]))?;
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_summary(path: impl AsRef<Path>) -> Result<RunSummary, HarnessError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text)
        .map_err(|e| HarnessError::Config(vec![format!("{}: {e}", path.display())]))
}
