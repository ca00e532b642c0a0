//! `foldchoice`: extract contacts from PDB files, rank interaction classes per
//! protein, aggregate profiles and audit aggregation rules.
//!
//! Exit codes: 0 success (findings such as cycles or failed axioms
//! included), 1 usage error, 2 input error, 3 search budget exceeded.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use foldchoice::{Combine, DistanceMode};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "foldchoice", version, about = "Preference aggregation over amino-acid interaction classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract residue contacts from PDB files into one CSV per protein
    Extract(ExtractArgs),
    /// Turn contact CSVs into per-protein utilities, rankings and a profile
    Rank(RankArgs),
    /// Aggregate a profile with one rule
    Aggregate(AggregateArgs),
    /// Search for axiom violations of a rule
    Audit(AuditArgs),
    /// Check a profile for single-peakedness and quasi-transitive majority
    Restrict(RestrictArgs),
    /// Generate a synthetic profile
    Synth(SynthArgs),
}

#[derive(Args, Serialize)]
pub struct ExtractArgs {
    /// PDB files, or directories scanned for *.pdb and *.ent
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Directory receiving <id>.contacts.csv files and summary.json
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Contact threshold in Ångström
    #[arg(long, default_value_t = 8.0)]
    pub tau: f64,
    /// Residue distance: c_alpha, centroid or heavy_min
    #[arg(long, default_value = "c_alpha")]
    pub distance_mode: DistanceMode,
    /// Minimum sequence separation within a chain
    #[arg(long, default_value_t = 3)]
    pub min_seq_separation: u32,
    /// Also pair residues from different chains
    #[arg(long)]
    pub cross_chain: bool,
    /// 20x20 CSV score table; every contact scores 1 when omitted
    #[arg(long)]
    pub score_table: Option<PathBuf>,
    /// Use table entries as they are instead of negating them
    #[arg(long)]
    pub no_negate: bool,
}

#[derive(Args, Serialize)]
pub struct RankArgs {
    /// Contact CSV files, or directories scanned for *.csv
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Class universe: classes-210 (with homopairs) or classes-190
    #[arg(long, default_value = "classes-210")]
    pub universe: String,
    /// How instance scores combine per class: sum, mean or count
    #[arg(long, default_value = "sum")]
    pub combine: Combine,
    /// Profile kind to emit: ordinal or utility
    #[arg(long, default_value = "ordinal")]
    pub mode: String,
    /// Utilities closer than this chain into one tier
    #[arg(long, default_value_t = 0.0)]
    pub tie_epsilon: f64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct AggregateArgs {
    /// Profile JSON file, or - for stdin
    pub profile: PathBuf,
    /// may, borda, kemeny, dictator[:k], utilitarian or mean-direction
    #[arg(long)]
    pub rule: String,
    /// Tie epsilon when an ordinal rule receives a utility profile
    #[arg(long, default_value_t = 0.0)]
    pub tie_epsilon: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct AuditArgs {
    /// Rule to audit
    #[arg(long)]
    pub rule: String,
    /// Comma-separated axioms, or one of: arrow, may, all
    #[arg(long, default_value = "arrow")]
    pub axioms: String,
    /// Number of classes
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    /// Number of individuals
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// exhaustive or sampled (direction rules are always sampled)
    #[arg(long, default_value = "exhaustive")]
    pub mode: String,
    /// strict, weak or grid; defaults to strict for ordinal rules and grid for utility rules
    #[arg(long)]
    pub domain: Option<String>,
    /// Comma-separated utility levels for the grid domain
    #[arg(long, default_value = "-1,-0.5,0,0.5,1")]
    pub grid: String,
    /// Sampled profiles (and coincidence checks)
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Half-width of the continuity probe
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct RestrictArgs {
    /// Profile JSON file, or - for stdin
    pub profile: PathBuf,
    /// Comma-separated classes to test as the axis, e.g. A-A,A-C,A-D
    #[arg(long)]
    pub axis: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct SynthArgs {
    /// condorcet, impartial-culture or single-peaked
    pub kind: String,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Extract(a) => commands::extract(a),
        Command::Rank(a) => commands::rank(a),
        Command::Aggregate(a) => commands::aggregate(a),
        Command::Audit(a) => commands::audit(a),
        Command::Restrict(a) => commands::restrict(a),
        Command::Synth(a) => commands::synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
