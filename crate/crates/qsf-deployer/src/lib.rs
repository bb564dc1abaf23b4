//! The Deployment API: fetch a contract by URL, generate its service
//! bundle, launch an instance on the first free port of the configured
//! range, and manage the deployment lifecycle.
//!
//! Every state change appends a full record snapshot to a JSONL ledger, so
//! a killed deployer restarts with its history intact: records that were
//! `running` or `deploying` in the dead process reload as `stopped`
//! (instances are never adopted) and their ports are free again.
//!
//! Port allocation, the record table and the ledger live behind one mutex —
//! a single serialization domain. Instance launch and shutdown happen
//! outside it so slow services never block the API.

pub mod api;
pub mod ledger;
pub mod ports;
pub mod supervisor;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use qsf_core::codegen::generate_bundle;
use qsf_core::diag::{DiagCode, Diagnostic};
use qsf_core::fetch::Fetcher;
use qsf_core::prng;

use ledger::Ledger;
use ports::{os_port_free, PortRegistry};
use supervisor::{InstanceHandle, InstanceSupervisor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeploymentStatus {
    Deploying,
    Running,
    Failed,
    Stopped,
}

/// One deployment, as stored, listed and returned over the API. Credentials
/// are consumed at launch time and never stored or serialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentRecord {
    pub id: String,
    pub spec_url: String,
    pub spec_fingerprint: Option<String>,
    /// Set while deploying/running; stopped records keep it as history,
    /// failed launches clear it (nothing ever listened there).
    pub port: Option<u16>,
    pub base_url: Option<String>,
    pub status: DeploymentStatus,
    /// Unix milliseconds; listing order.
    pub created_at: u64,
    pub endpoints: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Vec<Diagnostic>>,
}

#[derive(Debug, Error)]
pub enum DeployerError {
    #[error("no deployment with id {0:?}")]
    NotFound(String),
}

#[derive(Debug, Clone)]
pub struct DeployerConfig {
    pub port_range: (u16, u16),
    pub state_dir: PathBuf,
    pub advertise_host: String,
}

impl DeployerConfig {
    pub fn new(state_dir: impl Into<PathBuf>) -> Self {
        Self {
            port_range: (8000, 8999),
            state_dir: state_dir.into(),
            advertise_host: "127.0.0.1".to_string(),
        }
    }
}

struct DeployerState {
    registry: PortRegistry,
    records: Vec<DeploymentRecord>,
    ledger: Ledger,
}

impl DeployerState {
    fn find_mut(&mut self, id: &str) -> Option<&mut DeploymentRecord> {
        self.records.iter_mut().find(|r| r.id == id)
    }
}

pub struct Deployer {
    config: DeployerConfig,
    supervisor: Box<dyn InstanceSupervisor>,
    fetcher: Box<dyn Fetcher>,
    state: Mutex<DeployerState>,
    instances: Mutex<HashMap<String, InstanceHandle>>,
}

fn now_millis() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

impl Deployer {
    /// Opens (or creates) the state directory, replays the ledger, and marks
    /// any previously running or half-deployed records as stopped.
    pub fn open(
        config: DeployerConfig,
        supervisor: Box<dyn InstanceSupervisor>,
        fetcher: Box<dyn Fetcher>,
    ) -> std::io::Result<Self> {
        let ledger = Ledger::new(&config.state_dir)?;
        let mut records = ledger.load()?;
        for record in &mut records {
            if matches!(
                record.status,
                DeploymentStatus::Running | DeploymentStatus::Deploying
            ) {
                record.status = DeploymentStatus::Stopped;
                ledger.append(record)?;
            }
        }
        let registry = PortRegistry::new(config.port_range.0, config.port_range.1);
        Ok(Self {
            config,
            supervisor,
            fetcher,
            state: Mutex::new(DeployerState {
                registry,
                records,
                ledger,
            }),
            instances: Mutex::new(HashMap::new()),
        })
    }

    fn base_url(&self, port: u16) -> String {
        format!("http://{}:{}", self.config.advertise_host, port)
    }

    fn fresh_id(&self) -> String {
        format!("d-{:012x}", prng::fresh_seed() & 0xFFFF_FFFF_FFFF)
    }

    /// The full deployment flow. Failures never escape as errors: the
    /// returned record is `running` with a base URL, or `failed` with
    /// diagnostics — and a failed deploy leaves no port allocated.
    pub fn deploy(
        &self,
        spec_url: &str,
        credentials: &BTreeMap<String, String>,
    ) -> DeploymentRecord {
        let mut record = DeploymentRecord {
            id: self.fresh_id(),
            spec_url: spec_url.to_string(),
            spec_fingerprint: None,
            port: None,
            base_url: None,
            status: DeploymentStatus::Deploying,
            created_at: now_millis(),
            endpoints: Vec::new(),
            failure: None,
        };

        let source = match self.fetcher.fetch(spec_url) {
            Ok(text) => text,
            Err(e) => {
                return self.finish_failed(
                    record,
                    vec![Diagnostic::error(
                        DiagCode::QSF010,
                        "spec_url",
                        format!("cannot fetch contract: {e}"),
                    )],
                );
            }
        };

        let bundle = match generate_bundle(&source, self.fetcher.as_ref()) {
            Ok(bundle) => bundle,
            Err(diags) => return self.finish_failed(record, diags),
        };
        record.spec_fingerprint = Some(bundle.spec_fingerprint.clone());
        record.endpoints = bundle.manifest.iter().map(|e| e.path.clone()).collect();

        let port = match self.allocate_port() {
            Some(port) => port,
            None => {
                let (lo, hi) = self.config.port_range;
                return self.finish_failed(
                    record,
                    vec![Diagnostic::error(
                        DiagCode::QSF014,
                        "deployer.ports",
                        format!("no free port left in {lo}-{hi}"),
                    )],
                );
            }
        };
        record.port = Some(port);
        record.base_url = Some(self.base_url(port));

        // The deploying record becomes visible (and ledgered) before launch.
        {
            let mut state = self.state.lock().expect("deployer state");
            state.records.push(record.clone());
            let _ = state.ledger.append(&record);
        }

        match self.supervisor.launch(&bundle, port, credentials) {
            Ok(handle) => {
                let mut state = self.state.lock().expect("deployer state");
                self.instances
                    .lock()
                    .expect("instances")
                    .insert(record.id.clone(), handle);
                let stored = state.find_mut(&record.id).expect("record just pushed");
                stored.status = DeploymentStatus::Running;
                let snapshot = stored.clone();
                let _ = state.ledger.append(&snapshot);
                snapshot
            }
            Err(e) => {
                let mut state = self.state.lock().expect("deployer state");
                state.registry.release(port);
                let stored = state.find_mut(&record.id).expect("record just pushed");
                stored.status = DeploymentStatus::Failed;
                stored.port = None;
                stored.base_url = None;
                stored.failure = Some(vec![Diagnostic::error(
                    DiagCode::QSF015,
                    "deployer.launch",
                    format!("instance launch failed: {e}"),
                )]);
                let snapshot = stored.clone();
                let _ = state.ledger.append(&snapshot);
                snapshot
            }
        }
    }

    /// Registry reservation first (atomic), then OS probe; OS-occupied ports
    /// are skipped for this attempt and left unreserved for later ones.
    fn allocate_port(&self) -> Option<u16> {
        let mut skipped: BTreeSet<u16> = BTreeSet::new();
        loop {
            let candidate = {
                let mut state = self.state.lock().expect("deployer state");
                state.registry.reserve_lowest(&skipped)?
            };
            if os_port_free(candidate) {
                return Some(candidate);
            }
            let mut state = self.state.lock().expect("deployer state");
            state.registry.release(candidate);
            skipped.insert(candidate);
        }
    }

    fn finish_failed(
        &self,
        mut record: DeploymentRecord,
        diagnostics: Vec<Diagnostic>,
    ) -> DeploymentRecord {
        record.status = DeploymentStatus::Failed;
        record.port = None;
        record.base_url = None;
        record.failure = Some(diagnostics);
        let mut state = self.state.lock().expect("deployer state");
        state.records.push(record.clone());
        let _ = state.ledger.append(&record);
        record
    }

    /// Stops the instance, releases its port, marks the record stopped.
    /// Idempotent: tearing down a non-running record returns it unchanged.
    pub fn teardown(&self, id: &str) -> Result<DeploymentRecord, DeployerError> {
        let (record, handle) = {
            let mut state = self.state.lock().expect("deployer state");
            let record = state
                .find_mut(id)
                .ok_or_else(|| DeployerError::NotFound(id.to_string()))?;
            if record.status != DeploymentStatus::Running {
                return Ok(record.clone());
            }
            record.status = DeploymentStatus::Stopped;
            let snapshot = record.clone();
            let handle = self.instances.lock().expect("instances").remove(id);
            (snapshot, handle)
        };

        // Drain the instance outside the lock; the port is released only
        // once the listener is really gone so the next deploy can reuse it.
        if let Some(handle) = handle {
            handle.stop();
        }
        let mut state = self.state.lock().expect("deployer state");
        if let Some(port) = record.port {
            state.registry.release(port);
        }
        let _ = state.ledger.append(&record);
        Ok(record)
    }

    pub fn get(&self, id: &str) -> Result<DeploymentRecord, DeployerError> {
        let state = self.state.lock().expect("deployer state");
        state
            .records
            .iter()
            .find(|r| r.id == id)
            .cloned()
            .ok_or_else(|| DeployerError::NotFound(id.to_string()))
    }

    /// Consistent snapshot, ordered by creation.
    pub fn list(&self) -> Vec<DeploymentRecord> {
        self.state.lock().expect("deployer state").records.clone()
    }

    /// Ports currently reserved (= running deployments, when quiescent).
    pub fn allocated_ports(&self) -> usize {
        self.state
            .lock()
            .expect("deployer state")
            .registry
            .allocated_count()
    }

    /// Stops every running instance (process shutdown path).
    pub fn shutdown_all(&self) {
        let ids: Vec<String> = self
            .list()
            .into_iter()
            .filter(|r| r.status == DeploymentStatus::Running)
            .map(|r| r.id)
            .collect();
        for id in ids {
            let _ = self.teardown(&id);
        }
    }
}

/// Convenience constructor: in-process supervisor over a given fetcher.
pub fn local_deployer(
    config: DeployerConfig,
    fetcher: Box<dyn Fetcher>,
) -> std::io::Result<Deployer> {
    Deployer::open(config, Box::new(supervisor::InProcessSupervisor), fetcher)
}
