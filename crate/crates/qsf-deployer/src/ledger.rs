//! Append-only JSONL deployment ledger.
//!
//! One full record snapshot per line, appended (and flushed to disk) on
//! every state change. Recovery folds the file: the last snapshot per id
//! wins, ordered by first appearance. Torn or corrupt trailing lines are
//! skipped so a crash mid-append cannot poison the store.

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::DeploymentRecord;

pub const LEDGER_FILE: &str = "deployments.jsonl";

#[derive(Debug)]
pub struct Ledger {
    path: PathBuf,
}

impl Ledger {
    pub fn new(state_dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(state_dir)?;
        Ok(Self {
            path: state_dir.join(LEDGER_FILE),
        })
    }

    /// Appends one snapshot and syncs it to disk before returning.
    pub fn append(&self, record: &DeploymentRecord) -> std::io::Result<()> {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        let line = serde_json::to_string(record).map_err(std::io::Error::other)?;
        writeln!(file, "{line}")?;
        file.sync_all()
    }

    /// Replays the ledger: last snapshot per id, in first-seen order.
    pub fn load(&self) -> std::io::Result<Vec<DeploymentRecord>> {
        if !self.path.exists() {
            return Ok(Vec::new());
        }
        let reader = BufReader::new(std::fs::File::open(&self.path)?);
        let mut order: Vec<String> = Vec::new();
        let mut latest: std::collections::BTreeMap<String, DeploymentRecord> = Default::default();
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<DeploymentRecord>(&line) {
                Ok(record) => {
                    if !latest.contains_key(&record.id) {
                        order.push(record.id.clone());
                    }
                    latest.insert(record.id.clone(), record);
                }
                Err(_) => continue, // torn write from a crash; ignore
            }
        }
        Ok(order
            .into_iter()
            .filter_map(|id| latest.remove(&id))
            .collect())
    }
}
