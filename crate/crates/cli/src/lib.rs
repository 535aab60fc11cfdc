//! `tutorctl`: serve the tutor, manage projects, inspect logs and run the
//! oracle suites.
//!
//! Exit codes:
//!
//! | code | meaning                                                  |
//! |------|----------------------------------------------------------|
//! | 0    | success                                                  |
//! | 1    | `log validate` found corruption, or an oracle suite failed |
//! | 2    | bad input (`unknown-kb`, `unknown-kind`, usage errors)   |
//! | 3    | `not-possible`                                           |
//! | 4    | `not-found`                                              |
//! | 5    | `corrupt-log` outside `log validate`                     |
//! | 6    | `io` or `internal`                                       |
//! | 7    | `config`                                                 |

use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use project_store::{ProjectStore, StoreError};
use sitcalc::Reasoner;
use sitcalc_oracle::{conformance, dismissal_monotonicity, equivalence, memo_timing, memo_transparency, Subject};
use tutor_app::{load_app_config, AppConfig};
use tutor_server::{ApiError, AppState};

#[derive(Parser, Debug)]
#[command(name = "tutorctl", version, about = "Situation-calculus tutor operator tool")]
pub struct Cli {
    /// App config file.
    #[arg(long, global = true, env = "TUTOR_CONFIG", default_value = "config/stpa-demo/app.toml")]
    pub config: PathBuf,
    /// Data directory holding the project logs.
    #[arg(long, global = true, env = "TUTOR_DATA", default_value = "data")]
    pub data: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the HTTP server.
    Serve {
        /// Listen address; defaults to the config's `server.listen` or 127.0.0.1:8080.
        #[arg(long)]
        listen: Option<SocketAddr>,
    },
    /// Create or list projects.
    #[command(subcommand)]
    Project(ProjectCommand),
    /// Inspect project logs.
    #[command(subcommand)]
    Log(LogCommand),
    /// Demo applications built on the kernel alone.
    #[command(subcommand)]
    Demo(DemoCommand),
    /// Self checks.
    #[command(subcommand)]
    Check(CheckCommand),
}

#[derive(Subcommand, Debug)]
pub enum ProjectCommand {
    /// Create a project over an initial knowledge base; prints its id.
    New {
        #[arg(long, default_value = "stpa")]
        kb: String,
    },
    /// List project ids, one per line.
    List,
}

#[derive(Subcommand, Debug)]
pub enum LogCommand {
    /// Replay a log and print the situation digest and holding fluents.
    Replay {
        id: String,
        #[arg(long)]
        json: bool,
    },
    /// Check a log; exit 0 when it replays cleanly, 1 when corrupt.
    Validate { id: String },
}

#[derive(Subcommand, Debug)]
pub enum DemoCommand {
    /// Interactive to-do list: `add TASK`, `done TASK`, `list`, `quit`.
    Todo,
}

#[derive(Subcommand, Debug)]
pub enum CheckCommand {
    /// Run the brute-force oracle suites against the configured registry.
    Oracles {
        #[arg(long, default_value_t = 10_000)]
        cases: u64,
        #[arg(long, default_value_t = 1_000)]
        histories: u64,
        #[arg(long, default_value_t = 1_000)]
        suffixes: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        Self { code: e.exit_code(), message: format!("error: {e}") }
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        ApiError::from(e).into()
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self { code: 6, message: format!("error: io: {e}") }
    }
}

fn config(path: &Path) -> Result<AppConfig, Failure> {
    load_app_config(path).map_err(|e| Failure { code: 7, message: format!("error: config: {e}") })
}

fn store(cli: &Cli) -> Result<ProjectStore, Failure> {
    let c = config(&cli.config)?;
    let registry = c.registry().map_err(|e| Failure { code: 7, message: format!("error: config: {e}") })?;
    Ok(ProjectStore::open(&cli.data, Arc::new(Reasoner::new(Arc::new(registry))))?)
}

/// Runs a parsed command. `input` feeds `demo todo`.
pub fn run(cli: &Cli, input: impl BufRead, out: &mut impl Write) -> Result<(), Failure> {
    match &cli.command {
        Command::Serve { listen } => {
            let c = config(&cli.config)?;
            let addr = match listen {
                Some(a) => *a,
                None => c.server.listen.as_deref().unwrap_or("127.0.0.1:8080").parse().map_err(|e| Failure {
                    code: 7,
                    message: format!("error: config: server.listen: {e}"),
                })?,
            };
            let state = AppState::open(c, &cli.data)?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(tutor_server::serve(state, addr))?;
        }
        Command::Project(ProjectCommand::New { kb }) => {
            writeln!(out, "{}", store(cli)?.create_project(kb)?)?;
        }
        Command::Project(ProjectCommand::List) => {
            for id in store(cli)?.list_projects()? {
                writeln!(out, "{id}")?;
            }
        }
        Command::Log(LogCommand::Replay { id, json }) => {
            let st = store(cli)?;
            let info = st.info(id)?;
            let s = st.replay(id)?;
            let fluents = st.reasoner().holding_fluents(&s, None).map_err(ApiError::from)?;
            if *json {
                let v = serde_json::json!({
                    "project": info.id,
                    "kb": info.kb,
                    "length": s.depth(),
                    "digest": s.digest().to_string(),
                    "fluents": fluents,
                });
                writeln!(out, "{v}")?;
            } else {
                writeln!(out, "project {}", info.id)?;
                writeln!(out, "kb {}", info.kb)?;
                writeln!(out, "length {}", s.depth())?;
                writeln!(out, "digest {}", s.digest())?;
                for f in fluents {
                    writeln!(out, "{f}")?;
                }
            }
        }
        Command::Log(LogCommand::Validate { id }) => match store(cli)?.replay(id) {
            Ok(s) => writeln!(out, "ok {id} {} events", s.depth())?,
            Err(StoreError::CorruptLog { seq, message, .. }) => {
                return Err(Failure { code: 1, message: format!("error: corrupt-log (seq {seq}): {message}") })
            }
            Err(e) => return Err(e.into()),
        },
        Command::Demo(DemoCommand::Todo) => todo_demo::run_session(input, &mut *out)?,
        Command::Check(CheckCommand::Oracles { cases, histories, suffixes, seed }) => {
            let c = config(&cli.config)?;
            let subject =
                Subject::from_config(&c).map_err(|e| Failure { code: 7, message: format!("error: config: {e}") })?;
            let reports = [
                conformance(&subject, *cases, *seed),
                equivalence(&subject, *histories, 50, seed.wrapping_add(1)),
                memo_transparency(&subject, (*histories / 10).max(1), 50, seed.wrapping_add(2)),
                dismissal_monotonicity(&subject, *suffixes, seed.wrapping_add(3)),
            ];
            for r in &reports {
                writeln!(out, "{r}")?;
            }
            let t = memo_timing(&subject, 10_000, 1_000);
            writeln!(
                out,
                "INFO memo timing: {} queries on {} actions, cached {:?}, uncached {:?}, speedup {:.1}x, identical {}",
                t.queries,
                t.history,
                t.cached,
                t.uncached,
                t.speedup(),
                t.identical
            )?;
            if !reports.iter().all(|r| r.passed()) || !t.identical {
                return Err(Failure { code: 1, message: "error: oracle suites failed".into() });
            }
        }
    }
    Ok(())
}
