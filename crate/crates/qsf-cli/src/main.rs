//! `qsf` — the developer and CI entry point for the quantum service
//! pipeline: validate a contract, generate its service bundle, smoke-test
//! endpoints locally, deploy through a Deployment API, or run the whole
//! chain. See `docs/cli.md` for the frozen exit-code table.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit codes are part of the CLI contract (docs/cli.md).
pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_GENERATE: u8 = 3;
pub const EXIT_DEPLOY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qsf",
    version,
    about = "Quantum service pipeline: contract → bundle → deployment"
)]
struct Cli {
    /// Timeout in seconds for fetching contracts and circuit sources.
    #[arg(long, global = true, default_value_t = 10)]
    fetch_timeout: u64,

    /// Suppress progress chatter on standard error (diagnostics still print).
    #[arg(long, global = true, default_value_t = false)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and deep-validate a contract; exit 0 iff deploy-ready.
    Validate {
        /// Path or URL of the contract document.
        spec: String,
    },
    /// Generate the service bundle (manifest + emitted sources) into a directory.
    Generate {
        spec: String,
        /// Output directory; created on success, untouched on failure.
        #[arg(long)]
        out: std::path::PathBuf,
        /// Which artifacts to write.
        #[arg(long, value_enum, default_value_t = commands::EmitFilter::Bundle)]
        emit: commands::EmitFilter,
    },
    /// Execute one endpoint locally and print the execution result JSON.
    Simulate {
        spec: String,
        /// Endpoint path as declared in the contract (e.g. /bell).
        #[arg(long)]
        endpoint: String,
        /// Shots; defaults to the binding's default-shots.
        #[arg(long)]
        shots: Option<u64>,
        /// PRNG seed; fresh and echoed in the output when omitted.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Request a deployment from a running Deployment API.
    Deploy {
        /// Contract URL the deployer will fetch (http(s):// or file://).
        spec_url: String,
        #[arg(long)]
        deployer_url: String,
        /// JSON file mapping provider ids to secrets.
        #[arg(long)]
        credentials: Option<std::path::PathBuf>,
    },
    /// Multi-stage pipeline commands.
    #[command(subcommand)]
    Pipeline(PipelineCommand),
    /// Deployment API server commands.
    #[command(subcommand)]
    Deployer(DeployerCommand),
}

#[derive(Subcommand)]
enum PipelineCommand {
    /// validate → generate (dry run) → deploy; prints the service base URL.
    Run {
        spec: String,
        #[arg(long)]
        deployer_url: String,
        #[arg(long)]
        credentials: Option<std::path::PathBuf>,
    },
}

#[derive(Subcommand)]
enum DeployerCommand {
    /// Run the Deployment API server (blocks until killed).
    Serve(ServeArgs),
}

#[derive(Args)]
struct ServeArgs {
    /// Port for the Deployment API itself.
    #[arg(long, env = "QSF_PORT", default_value_t = 9000)]
    port: u16,
    /// Port range services are deployed into, e.g. 8000-8999.
    #[arg(long, env = "QSF_PORT_RANGE", default_value = "8000-8999")]
    port_range: String,
    /// Directory for the deployment ledger.
    #[arg(long, env = "QSF_STATE_DIR", default_value = "qsf-state")]
    state_dir: std::path::PathBuf,
    /// Host written into deployment base URLs.
    #[arg(long, env = "QSF_ADVERTISE_HOST", default_value = "127.0.0.1")]
    advertise_host: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Context {
        fetch_timeout: cli.fetch_timeout,
        quiet: cli.quiet,
    };
    let code = match cli.command {
        Command::Validate { spec } => commands::validate(&ctx, &spec),
        Command::Generate { spec, out, emit } => commands::generate(&ctx, &spec, &out, emit),
        Command::Simulate {
            spec,
            endpoint,
            shots,
            seed,
        } => commands::simulate(&ctx, &spec, &endpoint, shots, seed),
        Command::Deploy {
            spec_url,
            deployer_url,
            credentials,
        } => commands::deploy(&ctx, &spec_url, &deployer_url, credentials.as_deref()),
        Command::Pipeline(PipelineCommand::Run {
            spec,
            deployer_url,
            credentials,
        }) => commands::pipeline_run(&ctx, &spec, &deployer_url, credentials.as_deref()),
        Command::Deployer(DeployerCommand::Serve(args)) => commands::deployer_serve(
            &ctx,
            args.port,
            &args.port_range,
            &args.state_dir,
            &args.advertise_host,
        ),
    };
    ExitCode::from(code)
}
