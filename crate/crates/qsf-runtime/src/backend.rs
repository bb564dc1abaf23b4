//! Execution backends behind one interface, so generated services run the
//! same way against the local simulator or a stand-in for a remote provider.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use qsf_core::circuit::{CircuitIR, MAX_SIM_QUBITS};
use qsf_core::sim::{self, ExecutionResult, LOCAL_BACKEND_ID};

pub const MOCK_BACKEND_ID: &str = "mock-remote";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BackendError {
    #[error("{0}")]
    Execution(String),
    #[error("invalid backend configuration: {0}")]
    Configuration(String),
}

/// One execution provider. Implementations must conserve shots: the counts
/// of a successful result always sum to the requested shot count.
pub trait Backend: Send + Sync {
    fn id(&self) -> &str;
    fn max_qubits(&self) -> usize;
    fn execute(
        &self,
        circuit: &CircuitIR,
        shots: u64,
        seed: u64,
    ) -> Result<ExecutionResult, BackendError>;
}

pub type BackendMap = BTreeMap<String, Arc<dyn Backend>>;

/// The deterministic statevector simulator from qsf-core.
#[derive(Debug, Default)]
pub struct LocalSimulatorBackend;

impl Backend for LocalSimulatorBackend {
    fn id(&self) -> &str {
        LOCAL_BACKEND_ID
    }

    fn max_qubits(&self) -> usize {
        MAX_SIM_QUBITS
    }

    fn execute(
        &self,
        circuit: &CircuitIR,
        shots: u64,
        seed: u64,
    ) -> Result<ExecutionResult, BackendError> {
        sim::sample_counts(circuit, shots, seed).map_err(|e| BackendError::Execution(e.to_string()))
    }
}

/// What the mock provider should do with execution requests.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum MockBehavior {
    /// Delegate to the local simulator, reporting itself as the backend.
    Simulate,
    /// Fail every execution with the given message.
    Fail { message: String },
    /// Return these counts verbatim (shots = their sum).
    Canned { counts: BTreeMap<String, u64> },
}

/// Stand-in for a cloud provider: deterministic, configurable, and able to
/// simulate auth by requiring a credential at construction time.
#[derive(Debug)]
pub struct MockRemoteBackend {
    behavior: MockBehavior,
}

impl MockRemoteBackend {
    pub fn new(behavior: MockBehavior) -> Self {
        Self { behavior }
    }

    /// Builds the mock from its credential secret, which doubles as its
    /// configuration: a JSON document like `{"mode":"simulate"}`,
    /// `{"mode":"fail","message":"…"}` or `{"mode":"canned","counts":{…}}`.
    pub fn from_credential(secret: &str) -> Result<Self, BackendError> {
        let behavior: MockBehavior = serde_json::from_str(secret)
            .map_err(|e| BackendError::Configuration(format!("mock-remote credential: {e}")))?;
        Ok(Self::new(behavior))
    }
}

impl Backend for MockRemoteBackend {
    fn id(&self) -> &str {
        MOCK_BACKEND_ID
    }

    fn max_qubits(&self) -> usize {
        MAX_SIM_QUBITS
    }

    fn execute(
        &self,
        circuit: &CircuitIR,
        shots: u64,
        seed: u64,
    ) -> Result<ExecutionResult, BackendError> {
        match &self.behavior {
            MockBehavior::Simulate => {
                let mut result = sim::sample_counts(circuit, shots, seed)
                    .map_err(|e| BackendError::Execution(e.to_string()))?;
                result.backend = MOCK_BACKEND_ID.to_string();
                Ok(result)
            }
            MockBehavior::Fail { message } => Err(BackendError::Execution(message.clone())),
            MockBehavior::Canned { counts } => {
                let shots = counts.values().sum();
                Ok(ExecutionResult {
                    counts: counts.clone(),
                    shots,
                    seed,
                    backend: MOCK_BACKEND_ID.to_string(),
                })
            }
        }
    }
}

/// The built-in backend set. `local-simulator` is always available;
/// `mock-remote` appears only when its credential was supplied (provider
/// auth, mock-style) and that credential parses as a behavior config.
pub fn standard_backends(
    credentials: &BTreeMap<String, String>,
) -> Result<BackendMap, BackendError> {
    let mut map: BackendMap = BTreeMap::new();
    map.insert(
        LOCAL_BACKEND_ID.to_string(),
        Arc::new(LocalSimulatorBackend),
    );
    if let Some(secret) = credentials.get(MOCK_BACKEND_ID) {
        map.insert(
            MOCK_BACKEND_ID.to_string(),
            Arc::new(MockRemoteBackend::from_credential(secret)?),
        );
    }
    Ok(map)
}
