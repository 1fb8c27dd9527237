//! Command-line parsing and resolution into a [`RunConfig`].
//!
//! Precedence: built-in defaults, then the `--config` file, then flags.

use crate::config::{
    parse_pair, parse_points, parse_rule, workers_from_env, DiagramSel, FileConfig, Format, RunConfig, Suite,
};
use crate::report::{emit_report, SuiteReport};
use crate::run::{current_tables, diagram_table, params_tables, poisson_table, run_with_tables};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use wsuper::exactnum::parse_rat;
use wsuper::exec::Exec;

#[derive(Debug, Parser)]
#[command(name = "wsuper", version, about = "Exact checks for the free-field realization of deformed W-superalgebras of type A(M,N)")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Key-value file with the same keys as the long flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for randomly drawn evaluation points.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand.
#[derive(Debug, Args, Default)]
pub struct Common {
    #[arg(long = "M", visible_alias = "m")]
    pub m: Option<usize>,
    #[arg(long = "N", visible_alias = "n")]
    pub n: Option<usize>,
    /// Series order and largest checked mode.
    #[arg(long = "K", visible_alias = "k")]
    pub k: Option<i64>,
    /// Largest total degree of a relation.
    #[arg(long)]
    pub cap: Option<u32>,
    /// Evaluation points `t:p:q`, comma separated.
    #[arg(long)]
    pub points: Option<String>,
    /// Number of extra evaluation points drawn from the seed.
    #[arg(long)]
    pub random_points: Option<usize>,
    /// Edge labelling rule: `epsilon` or `cardinality`.
    #[arg(long)]
    pub rule: Option<String>,
    /// Run on every reachable fundamental system.
    #[arg(long, conflicts_with = "index")]
    pub all: bool,
    /// Run on one system, by enumeration index.
    #[arg(long)]
    pub index: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List fundamental systems and check that `D(0,L)` is common to all.
    Diagram {
        #[command(flatten)]
        common: Common,
    },
    /// Print parameter tables and check their identities.
    Params {
        #[command(flatten)]
        common: Common,
        /// Number of `λ` modes shown.
        #[arg(long, default_value_t = 3)]
        modes: i64,
    },
    /// Print the weighted monomials of `T_1, …, T_degree`.
    Currents {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        degree: u32,
    },
    /// Run verification suites.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suites to run; repeatable. Default: all.
        #[arg(long, value_enum, value_delimiter = ',')]
        suite: Vec<Suite>,
        /// Relation `i,j`; repeatable. Default: every `i ≤ j` with `i + j ≤ cap`.
        #[arg(long, value_parser = parse_pair)]
        ij: Vec<(u32, u32)>,
    },
    /// Cross-check against a truncated Fock space.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Cutoff degree of the Fock space.
        #[arg(long)]
        degree: Option<u32>,
        /// Largest mode index compared.
        #[arg(long)]
        window: Option<u32>,
        /// Second index `j` of the `(1, j)` relation; repeatable.
        #[arg(long)]
        j: Vec<u32>,
    },
    /// Classical-limit structure constants and their numerical check.
    Poisson {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        max_ij: Option<u32>,
        #[arg(long)]
        modes: Option<i64>,
        /// `q^{1/2}` as a fraction.
        #[arg(long)]
        sqrt_q: Option<String>,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Diagram { common }
            | Command::Params { common, .. }
            | Command::Currents { common, .. }
            | Command::Verify { common, .. }
            | Command::Oracle { common, .. }
            | Command::Poisson { common, .. } => common,
        }
    }
}

/// Build the configuration: defaults, then the file, then the flags.
pub fn resolve(cli: &Cli) -> Result<RunConfig, String> {
    let mut c = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        FileConfig::parse(&text)?.apply(&mut c)?;
    }
    if let Some(f) = cli.format {
        c.format = f;
    }
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    let common = cli.command.common();
    if let Some(v) = common.m {
        c.m = v;
    }
    if let Some(v) = common.n {
        c.n = v;
    }
    if let Some(v) = common.k {
        c.k = v;
    }
    if let Some(v) = common.cap {
        c.cap = v;
    }
    if let Some(v) = &common.points {
        c.points = parse_points(v)?;
    }
    if let Some(v) = common.random_points {
        c.random_points = v;
    }
    if let Some(v) = &common.rule {
        c.rule = parse_rule(v)?;
    }
    if common.all {
        c.diagrams = DiagramSel::All;
    } else if let Some(k) = common.index {
        c.diagrams = DiagramSel::Index(k);
    }
    c.suites = match &cli.command {
        Command::Diagram { .. } => vec![Suite::Diagram],
        Command::Params { .. } => vec![Suite::Params],
        Command::Currents { .. } => vec![],
        Command::Verify { suite, ij, .. } => {
            if !ij.is_empty() {
                c.relations = ij.clone();
            }
            if suite.is_empty() {
                c.suites.clone()
            } else {
                suite.clone()
            }
        }
        Command::Oracle { degree, window, j, .. } => {
            if let Some(d) = degree {
                c.oracle_degree = *d;
                c.oracle_window = c.oracle_window.min(*d);
            }
            if let Some(w) = window {
                c.oracle_window = *w;
            }
            if !j.is_empty() {
                c.oracle_relations = j.clone();
            }
            vec![Suite::Oracle]
        }
        Command::Poisson { max_ij, modes, sqrt_q, .. } => {
            if let Some(v) = max_ij {
                c.poisson_max_ij = *v;
            }
            if let Some(v) = modes {
                c.poisson_modes = *v;
            }
            if let Some(v) = sqrt_q {
                c.poisson_sqrt_q = parse_rat(v).ok_or_else(|| format!("bad rational `{v}`"))?;
            }
            vec![Suite::Poisson]
        }
    };
    c.exec = match workers_from_env()? {
        Some(1) => Exec::Sequential,
        _ => Exec::Parallel,
    };
    Ok(c)
}

/// Run the parsed command to a report.
pub fn execute(cli: &Cli) -> Result<SuiteReport, String> {
    let mut c = resolve(cli)?;
    c.materialize_random_points();
    c.validate()?;
    let tables = match &cli.command {
        Command::Diagram { .. } => vec![diagram_table(&c)?],
        Command::Params { modes, .. } => params_tables(&c, *modes)?,
        Command::Currents { degree, .. } => current_tables(&c, *degree)?,
        Command::Poisson { .. } => vec![poisson_table(&c)?],
        _ => Vec::new(),
    };
    run_with_tables(&c, tables)
}

/// Parse, run and render; returns the output and the exit code.
/// Usage errors give exit code 2.
pub fn main_with_args<I, T>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (e.to_string(), code);
        }
    };
    match execute(&cli) {
        Ok(rep) => {
            let format = resolve(&cli).map(|c| c.format).unwrap_or_default();
            (emit_report(&rep, format), rep.exit_code())
        }
        Err(e) => (format!("error: {e}\n"), 2),
    }
}
