//! `ts-groups`: command-line front end for the `ts_groups` library.

mod commands;
mod input;
mod replay;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{Format, Timings};

#[derive(Debug, Parser)]
#[command(
    name = "ts-groups",
    version,
    about = "Traveling-salesman experiments on Cayley graphs"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    /// Re-verify the witnesses of a saved report.
    #[arg(long, value_name = "REPORT")]
    pub replay: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Args, Clone)]
pub struct Global {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output format; JSON when writing to a file, text on stdout.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Memory budget in MiB for ball and search enumeration.
    #[arg(long, global = true, env = "TS_GROUPS_BUDGET_MB")]
    pub budget_mb: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Square-free sequences.
    #[command(subcommand)]
    Seq(SeqCmd),
    /// Aperiodic tree labelings.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Shortest closed tour through a finite set.
    Tsp(TspArgs),
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Boundary and spanning-tree traversal of a box.
    Folner(FolnerArgs),
    #[command(subcommand)]
    Forest(ForestCmd),
    #[command(subcommand)]
    Property(PropertyCmd),
    #[command(subcommand)]
    Xi(XiCmd),
    #[command(subcommand)]
    Lemma5(Lemma5Cmd),
    #[command(subcommand)]
    Burnside(BurnsideCmd),
    /// Balanced power identities defeating the word-length property.
    Gnp(GnpArgs),
    /// Re-verify the witnesses of a saved report.
    Replay { report: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum SeqCmd {
    /// Prints the first `n` letters of a square-free word over `a, b, c`.
    Thue {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LabelMode {
    #[value(name = "3letter")]
    ThreeLetter,
    Adversarial,
}

#[derive(Debug, Subcommand)]
pub enum TreeCmd {
    /// Labels a tree and prints `edge_from edge_to token` rows.
    Label {
        #[arg(long, value_enum)]
        mode: LabelMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tree file (`id parent level` per line); a complete ternary tree otherwise.
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Tokens offered at every vertex in adversarial mode.
        #[arg(long, default_value_t = 4)]
        tokens: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct TspArgs {
    #[arg(long, default_value = "free:2")]
    pub group: String,
    #[arg(long)]
    pub set: PathBuf,
    /// Solve exactly (Held-Karp); a heuristic tour otherwise.
    #[arg(long)]
    pub exact: bool,
    /// When given, the set must be xi-related and `L'` is reported too.
    #[arg(long)]
    pub xi: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerKind {
    Chains,
    Boxes,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCmd {
    /// Samples xi-related sets and compares `L(S)` with `lambda |S|`.
    TsLambda {
        #[arg(long, default_value = "free:2")]
        group: String,
        #[arg(long)]
        xi: String,
        #[arg(long, default_value = "2")]
        lambda: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        max_size: usize,
        #[arg(long, value_enum, default_value_t = SamplerKind::Chains)]
        sampler: SamplerKind,
        #[arg(long, default_value_t = 4)]
        walk_len: usize,
        #[arg(long, default_value_t = 4)]
        chain_max: usize,
        #[arg(long, default_value_t = 1)]
        side_min: u64,
        #[arg(long, default_value_t = 3)]
        side_max: u64,
        /// Keep the raw samples instead of their revisions.
        #[arg(long)]
        unrevised: bool,
        #[arg(long)]
        no_lprime: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct FolnerArgs {
    /// Box side lengths; the group is `abelian:n` for `n` sides.
    #[arg(long, default_value = "4,4")]
    pub sides: String,
    #[arg(long, default_value = "1,0")]
    pub xi: String,
    /// Include the traversal itself in the report.
    #[arg(long)]
    pub path: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    P,
    P10,
}

#[derive(Debug, Subcommand)]
pub enum ForestCmd {
    /// Builds the tree forest of a revised xi-related set.
    Build {
        #[arg(long, value_enum, ignore_case = true)]
        mode: ModeArg,
        #[arg(long)]
        r: u64,
        #[arg(long, default_value = "free:2")]
        group: String,
        #[arg(long)]
        set: PathBuf,
        /// An element, or a file holding one.
        #[arg(long)]
        xi: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-checks every structural claim of a saved forest.
    Verify { forest: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum PropertyCmd {
    /// Searches for a sequence defeating the word-length property.
    Test {
        /// `P`, `P'`, `P10` or `P10'`.
        #[arg(long)]
        family: String,
        #[arg(long)]
        r: u64,
        #[arg(long, default_value = "free:2")]
        group: String,
        #[arg(long, conflicts_with = "xi_from_lemma4")]
        xi: Option<String>,
        /// Use the constructed `xi` (free groups only).
        #[arg(long)]
        xi_from_lemma4: bool,
        /// Build the constructed `xi` at the reduced desk scale.
        #[arg(long)]
        desk_scale: bool,
        /// Comma-separated `key=value` overrides: k_max, exhaustive_ball,
        /// exhaustive_k, max_nodes, samples.
        #[arg(long)]
        budget: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum XiCmd {
    /// Constructs `xi` and writes it as a one-line word file.
    Construct {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        desk_scale: bool,
        #[arg(long, default_value = "xi.word")]
        out: PathBuf,
        /// Where to write the construction report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Lemma5Cmd {
    /// Reduces `xi^e1 x_1 .. xi^ek x_k` and bounds its power order.
    Verify {
        #[arg(long)]
        xi: String,
        /// Word file, one `x_i` per line.
        #[arg(long)]
        xs: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        desk_scale: bool,
        /// Do not check the conditions on `xi`.
        #[arg(long)]
        waive_xi_check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum BurnsideCmd {
    /// Runs the whole chain on sampled inputs.
    Pipeline {
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        k_max: usize,
        #[arg(long)]
        desk_scale: bool,
        /// Break the end condition of `xi` to exercise the failure path.
        #[arg(long)]
        corrupt_ends: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct GnpArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub m: usize,
    /// Signed generator indices `u_1 .. u_2k`; searched for when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub us: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_nodes: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Exit status for an error anywhere in a command.
fn exit_code(err: &anyhow::Error) -> u8 {
    use ts_groups::Error;
    if let Some(e) = err.downcast_ref::<Error>() {
        return match e {
            Error::MalformedInput(_) | Error::Config(_) | Error::OutOfRange(_) => 2,
            Error::ResourceLimit { .. } => 3,
            Error::Precondition(_) | Error::DegenerateXi => 4,
            Error::Internal(_) => 5,
        };
    }
    if err.downcast_ref::<commands::CheckFailed>().is_some() {
        return 5;
    }
    // unreadable or unparsable input files
    2
}

fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.global.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    let mut timings = Timings::default();
    let (report, out) = match (cli.command, cli.replay) {
        (Some(_), Some(_)) => {
            return Err(ts_groups::Error::Config("--replay takes no subcommand".into()).into());
        }
        (Some(Command::Replay { report }), None) | (None, Some(report)) => {
            (replay::replay(&report, &cli.global, &mut timings)?, None)
        }
        (Some(cmd), None) => commands::dispatch(cmd, &cli.global, &mut timings)?,
        (None, None) => {
            use clap::CommandFactory;
            Cli::command().print_help()?;
            return Ok(());
        }
    };
    let format = cli
        .global
        .format
        .unwrap_or(if out.is_some() { Format::Json } else { Format::Text });
    report::write_or_print(&report.render(format, &timings)?, out.as_deref())?;
    if out.is_some() && format != Format::Text && !report.summary.is_empty() {
        eprintln!("{}", report.summary.trim_end());
    }
    if !report.ok {
        return Err(commands::CheckFailed(report.command.clone()).into());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    use super::*;

    #[test]
    fn command_tree_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn error_kinds_map_to_exit_codes() {
        use ts_groups::Error;
        let code = |e: Error| exit_code(&e.into());
        assert_eq!(code(Error::MalformedInput("x".into())), 2);
        assert_eq!(
            code(Error::ResourceLimit {
                what: "x".into(),
                best_upper: None
            }),
            3
        );
        assert_eq!(code(Error::DegenerateXi), 4);
        assert_eq!(code(Error::Internal("x".into())), 5);
        assert_eq!(exit_code(&commands::CheckFailed("x".into()).into()), 5);
    }
}
