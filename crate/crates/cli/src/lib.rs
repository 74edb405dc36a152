//! Command-line front end for nabla-kit.
//!
//! [`run`] parses an argument list, executes one subcommand and returns the
//! process exit status: 0 on success or PASS, 1 on FAIL, 2 on usage and
//! input errors, 3 when a resource budget runs out. Output files are written
//! atomically, so an interrupted run leaves no partial artifacts.

pub mod acceptance;
mod commands;
pub mod corpus;
mod report;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use nabla_kit::cells::Flavor;
use nabla_kit::towers::{ExampleName, FamilyMode};
use nabla_kit::Budget;

pub use commands::render_grayson;
pub use report::RunReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] nabla_kit::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(nabla_kit::Error::Budget(_)) => EXIT_BUDGET,
            _ => EXIT_USAGE,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

impl From<io::Error> for CliError {
    fn from(source: io::Error) -> Self {
        CliError::Io { path: "<stdout>".into(), source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// What a successful command concluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Done,
    Pass,
    Fail,
}

#[derive(Debug, Parser)]
#[command(name = "nabla-kit", version, about = "Non-degenerate resolutions, collapse certificates and towers")]
pub struct Cli {
    /// Largest number of simplexes or cells one enumeration may produce.
    #[arg(long, global = true, value_name = "N")]
    pub budget_cells: Option<usize>,
    /// Wall-clock limit in milliseconds.
    #[arg(long, global = true, value_name = "MS")]
    pub budget_ms: Option<u64>,
    /// Write a JSON run report to PATH.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Read a complex and write its canonical listing.
    Build {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// List only maximal simplexes.
        #[arg(long)]
        maximal: bool,
    },
    /// Barycentric subdivision; vertex i is the i-th simplex of the input.
    Bary {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the vertex label table here.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Build the resolution and write hat, subdivision, embed and project files.
    Resolve {
        file: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: PathBuf,
        /// Also write the full product triangulation.
        #[arg(long)]
        boxtimes: bool,
    },
    /// Lift a simplicial map to a non-degenerate map between resolutions.
    Lift {
        map: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// List the cells of R(m,n) or Q(m,n) with their classification.
    Grayson {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "r")]
        flavor: Flavor,
    },
    /// Emit a collapse certificate for Q(m,n), or for a resolution when a complex is given.
    Collapse(CollapseArgs),
    /// Replay a certificate and report PASS or FAIL.
    VerifyCollapse {
        cert: PathBuf,
        /// Base complex, required for resolution certificates.
        #[arg(long)]
        complex: Option<PathBuf>,
        #[arg(long)]
        rel_subcomplex: Option<PathBuf>,
        /// Subcomplex a filtered certificate was restricted to.
        #[arg(long)]
        restrict: Option<PathBuf>,
    },
    /// Integer homology, one line per dimension.
    Homology { file: PathBuf },
    /// Tower tooling.
    Tower {
        #[command(subcommand)]
        cmd: TowerCommand,
    },
    /// Run the acceptance suite and print one verdict per criterion.
    Selftest,
}

#[derive(Debug, Args)]
pub struct CollapseArgs {
    /// Complex whose resolution is collapsed; without it the cell complex Q(m,n) is used.
    pub complex: Option<PathBuf>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: u32,
    /// Collapse Q(m,n) onto Q(m,F) instead of the terminal cell.
    #[arg(long, value_name = "F")]
    pub relative_floor: Option<u32>,
    /// Collapse onto the lower resolution of this subcomplex together with the embedded subdivision.
    #[arg(long, value_name = "PATH")]
    pub rel_subcomplex: Option<PathBuf>,
    /// Keep only the steps lying over this subcomplex.
    #[arg(long, value_name = "PATH")]
    pub restrict: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum TowerCommand {
    /// Generate one of the built-in example towers.
    Example {
        name: ExampleName,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 2)]
        prime: u32,
        #[arg(long, default_value_t = 1)]
        sphere_dim: u32,
        #[arg(long, default_value_t = 3)]
        cycle: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a subcomplex family against the bonds.
    Check {
        tower: PathBuf,
        #[arg(long)]
        mode: FamilyMode,
        #[arg(long, conflicts_with = "skeleta", required_unless_present = "skeleta")]
        family: Option<PathBuf>,
        /// Use the d-skeleta of the levels as the family.
        #[arg(long, value_name = "D", allow_negative_numbers = true)]
        skeleta: Option<isize>,
    },
    /// Replace every level by its resolution and every bond by its lift.
    Resolve {
        tower: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Restrict every level to its n-skeleton.
    Skeleton {
        tower: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        n: isize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Restrict every level to the image of the levels above it.
    Surjectivize {
        tower: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Follow a simplex down the tower.
    Trace {
        tower: PathBuf,
        #[arg(long)]
        level: usize,
        /// Simplex as `0,1,2` or `{0,1,2}`.
        #[arg(long)]
        simplex: String,
    },
}

/// Runs one command line. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{shown}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{shown}");
                    EXIT_USAGE
                }
            };
        }
    };

    let started = Instant::now();
    let budget = Budget::new(cli.budget_cells, cli.budget_ms.map(Duration::from_millis));
    let echo = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut ctx = Ctx { budget, out, report: RunReport::new(echo) };
    let code = match commands::dispatch(&cli.command, &mut ctx) {
        Ok(Verdict::Fail) => EXIT_FAIL,
        Ok(_) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            ctx.report.verdicts.push(match e.exit_code() {
                EXIT_BUDGET => "BUDGET".to_string(),
                _ => "ERROR".to_string(),
            });
            e.exit_code()
        }
    };
    let mut report = ctx.report;
    report.exit_code = code;
    report.timing_ms = started.elapsed().as_millis() as u64;
    if let Some(path) = &cli.report {
        if let Err(e) = write_atomic(path, &report.to_json()) {
            let _ = writeln!(err, "error: {e}");
            return if code == EXIT_OK { EXIT_USAGE } else { code };
        }
    }
    code
}

pub(crate) struct Ctx<'a> {
    pub budget: Budget,
    pub out: &'a mut dyn Write,
    pub report: RunReport,
}

/// Writes `contents` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
