//! Instance supervision: the seam standing in for a container engine.
//!
//! The in-process supervisor runs the runtime crate directly and is what
//! tests and the default deployer use. The external-command supervisor is a
//! documented template for wiring a real engine (Docker, systemd-run, …):
//! it spawns a configured command with the bundle directory and port
//! substituted, and kills the child on teardown. It is shipped as-is and
//! not exercised in CI.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Child, Command};

use thiserror::Error;

use qsf_core::codegen::{write_bundle_dir, ServiceBundle};
use qsf_runtime::{serve_bundle, standard_backends, RunningService};

#[derive(Debug, Error)]
pub enum LaunchError {
    #[error("backend construction failed: {0}")]
    Backend(String),
    #[error("service failed to start: {0}")]
    Serve(String),
}

/// A launched instance; stopping is infallible best-effort.
pub enum InstanceHandle {
    InProcess(RunningService),
    External(Child),
}

impl InstanceHandle {
    pub fn stop(self) {
        match self {
            InstanceHandle::InProcess(service) => service.shutdown(),
            InstanceHandle::External(mut child) => {
                let _ = child.kill();
                let _ = child.wait();
            }
        }
    }
}

/// Launches service instances for deployments.
pub trait InstanceSupervisor: Send + Sync {
    fn launch(
        &self,
        bundle: &ServiceBundle,
        port: u16,
        credentials: &BTreeMap<String, String>,
    ) -> Result<InstanceHandle, LaunchError>;
}

/// Runs the runtime module in this process — fully testable, no engine
/// required.
#[derive(Debug, Default)]
pub struct InProcessSupervisor;

impl InstanceSupervisor for InProcessSupervisor {
    fn launch(
        &self,
        bundle: &ServiceBundle,
        port: u16,
        credentials: &BTreeMap<String, String>,
    ) -> Result<InstanceHandle, LaunchError> {
        let backends =
            standard_backends(credentials).map_err(|e| LaunchError::Backend(e.to_string()))?;
        let service = serve_bundle(bundle.clone(), port, backends)
            .map_err(|e| LaunchError::Serve(e.to_string()))?;
        Ok(InstanceHandle::InProcess(service))
    }
}

/// Template supervisor for an external engine. The command line is given as
/// argv with `{port}` and `{bundle_dir}` placeholders, e.g.
/// `["docker", "run", "-p", "{port}:{port}", "-v", "{bundle_dir}:/bundle", "qsf-runtime-image"]`.
/// The bundle is written into a fresh directory under `work_dir` before the
/// command starts.
pub struct ExternalCommandSupervisor {
    pub argv: Vec<String>,
    pub work_dir: PathBuf,
}

impl InstanceSupervisor for ExternalCommandSupervisor {
    fn launch(
        &self,
        bundle: &ServiceBundle,
        port: u16,
        _credentials: &BTreeMap<String, String>,
    ) -> Result<InstanceHandle, LaunchError> {
        let bundle_dir = self.work_dir.join(format!("bundle-{port}"));
        write_bundle_dir(bundle, &bundle_dir).map_err(|e| LaunchError::Serve(e.to_string()))?;
        let substitute = |arg: &String| {
            arg.replace("{port}", &port.to_string())
                .replace("{bundle_dir}", &bundle_dir.to_string_lossy())
        };
        let (program, args) = self
            .argv
            .split_first()
            .ok_or_else(|| LaunchError::Serve("empty supervisor command".into()))?;
        let child = Command::new(substitute(program))
            .args(args.iter().map(substitute))
            .spawn()
            .map_err(|e| LaunchError::Serve(e.to_string()))?;
        Ok(InstanceHandle::External(child))
    }
}
