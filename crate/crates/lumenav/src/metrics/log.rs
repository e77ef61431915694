//! Trajectory logs: one header record plus one record per step, JSONL on
//! disk.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::RewardBreakdown;
use crate::error::MetricsError;
use crate::geometry::TubeEnvironmentFile;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogHeader {
    pub width: usize,
    pub height: usize,
    /// Seconds of robot time per step.
    pub step_period_s: f64,
    pub seed: u64,
    pub config_hash: String,
    /// The environment the episode ran in, inlined for self-contained logs.
    pub env: TubeEnvironmentFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepRecord {
    /// Time at the end of the step, seconds.
    pub t: f64,
    pub tip_position: [f64; 3],
    pub quaternion_wxyz: [f64; 4],
    pub action: [f64; 3],
    pub reward: RewardBreakdown,
    pub u: f64,
    pub v: f64,
    /// Target-center distance over half-diagonal at the state acted on.
    pub rho: f64,
    /// Minimum wall clearance over tip and body, mm.
    pub clearance: f64,
    /// Whether forward translation was enabled this step.
    pub gated: bool,
    /// Whether this step counts as a collision event.
    pub collision: bool,
    pub done_reason: Option<String>,
}

#[derive(Debug, Clone)]
pub struct TrajectoryLog {
    pub header: LogHeader,
    pub steps: Vec<StepRecord>,
}

impl TrajectoryLog {
    pub fn write_jsonl(&self, path: &Path) -> Result<(), MetricsError> {
        let mut w = BufWriter::new(File::create(path)?);
        let header = serde_json::to_string(&self.header).expect("header serializes");
        writeln!(w, "{header}")?;
        for step in &self.steps {
            let line = serde_json::to_string(step).expect("step serializes");
            writeln!(w, "{line}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_jsonl(path: &Path) -> Result<TrajectoryLog, MetricsError> {
        let reader = BufReader::new(File::open(path)?);
        let mut lines = reader.lines();
        let header_line = lines.next().ok_or(MetricsError::MalformedLog {
            line: 1,
            reason: "empty file".into(),
        })??;
        let header: LogHeader =
            serde_json::from_str(&header_line).map_err(|e| MetricsError::MalformedLog {
                line: 1,
                reason: e.to_string(),
            })?;
        let mut steps = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let step: StepRecord =
                serde_json::from_str(&line).map_err(|e| MetricsError::MalformedLog {
                    line: i + 2,
                    reason: e.to_string(),
                })?;
            steps.push(step);
        }
        Ok(TrajectoryLog { header, steps })
    }
}
