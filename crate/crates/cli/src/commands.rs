use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use foldchoice::axiom_audit::{self, AuditError, AuditResult, AxiomId, Domain, SearchSpace, DEFAULT_GRID};
use foldchoice::contacts::{extract_instances, load_score_table, read_instances_csv, write_instances_csv};
use foldchoice::domain_restrict::{is_single_peaked_on, restrict_report, Axis, RestrictReport, SinglePeakedReport};
use foldchoice::external_agg::{mean_direction, DirectionPoint, RuleHandle};
use foldchoice::internal_agg::{ordinal_from_utility, utility_from_instances};
use foldchoice::profiles::{generate, Mode, SynthKind, SynthSpec};
use foldchoice::structure_io::{parse_pdb, SkipCounts};
use foldchoice::{AggregationOutcome, ContactConfig, InteractionClass, NamedRule, Profile, RankingWithTies, Scorer, Universe};
use serde::Serialize;

use crate::{AggregateArgs, AuditArgs, ExtractArgs, RankArgs, RestrictArgs, SynthArgs};

const RULES: &str = "may, borda, kemeny, dictator[:k], utilitarian, mean-direction";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

type Result<T> = std::result::Result<T, CliError>;

/// Resolved invocation, embedded in every report.
#[derive(Serialize)]
struct Config<'a, A: Serialize> {
    command: &'static str,
    version: &'static str,
    #[serde(flatten)]
    args: &'a A,
}

fn config<'a, A: Serialize>(command: &'static str, args: &'a A) -> Config<'a, A> {
    Config {
        command,
        version: env!("CARGO_PKG_VERSION"),
        args,
    }
}

fn emit<T: Serialize>(out: Option<&Path>, report: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report).map_err(input)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(input),
    }
}

/// Files given directly, plus matching files inside given directories (sorted).
fn expand_inputs(inputs: &[PathBuf], extensions: &[&str]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for path in inputs {
        if path.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(path)
                .map_err(|e| input(format!("{}: {e}", path.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| {
                    p.is_file()
                        && p.extension()
                            .and_then(|x| x.to_str())
                            .is_some_and(|x| extensions.iter().any(|e| x.eq_ignore_ascii_case(e)))
                })
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(path.clone());
        }
    }
    if files.is_empty() {
        return Err(CliError::Input("no inputs".into()));
    }
    Ok(files)
}

fn stem(path: &Path) -> String {
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("input");
    let name = name.strip_suffix(".csv").unwrap_or(name);
    let name = name.strip_suffix(".contacts").unwrap_or(name);
    match name.rsplit_once('.') {
        Some((base, ext)) if ["pdb", "ent"].contains(&ext.to_ascii_lowercase().as_str()) => base.to_string(),
        _ => name.to_string(),
    }
}

#[derive(Serialize)]
struct ProteinSummary {
    id: String,
    source: PathBuf,
    residues: usize,
    instances: usize,
    skipped: SkipCounts,
    output: PathBuf,
}

#[derive(Serialize)]
struct Failure {
    source: PathBuf,
    error: String,
}

#[derive(Serialize)]
struct ExtractSummary<'a> {
    config: Config<'a, ExtractArgs>,
    proteins: Vec<ProteinSummary>,
    failures: Vec<Failure>,
}

fn extract_one(path: &Path, args: &ExtractArgs, cfg: &ContactConfig, scorer: &Scorer) -> Result<ProteinSummary> {
    let text = fs::read_to_string(path).map_err(input)?;
    let id = stem(path);
    let structure = parse_pdb(&text, &id).map_err(input)?;
    let instances = extract_instances(&structure, cfg, scorer).map_err(input)?;
    let output = args.out_dir.join(format!("{id}.contacts.csv"));
    let file = fs::File::create(&output).map_err(input)?;
    write_instances_csv(io::BufWriter::new(file), &instances).map_err(input)?;
    Ok(ProteinSummary {
        id,
        source: path.to_path_buf(),
        residues: structure.residue_count(),
        instances: instances.len(),
        skipped: structure.skipped,
        output,
    })
}

pub fn extract(args: ExtractArgs) -> Result<()> {
    let cfg = ContactConfig {
        threshold_tau: args.tau,
        mode: args.distance_mode,
        min_seq_separation: args.min_seq_separation,
        cross_chain: args.cross_chain,
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let scorer = match &args.score_table {
        Some(path) => {
            let f = fs::File::open(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
            load_score_table(f).map_err(input)?.with_negate(!args.no_negate)
        }
        None => Scorer::UnitCount,
    };
    let files = expand_inputs(&args.inputs, &["pdb", "ent"])?;
    fs::create_dir_all(&args.out_dir).map_err(|e| input(format!("{}: {e}", args.out_dir.display())))?;

    let mut proteins = Vec::new();
    let mut failures = Vec::new();
    for path in &files {
        match extract_one(path, &args, &cfg, &scorer) {
            Ok(s) => {
                println!("{}\t{} residues\t{} instances", s.id, s.residues, s.instances);
                proteins.push(s);
            }
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                failures.push(Failure {
                    source: path.clone(),
                    error: e.to_string(),
                });
            }
        }
    }
    let all_failed = proteins.is_empty();
    let summary = ExtractSummary {
        config: config("extract", &args),
        proteins,
        failures,
    };
    emit(Some(&args.out_dir.join("summary.json")), &summary)?;
    if all_failed {
        return Err(CliError::Input("every input failed".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct Individual {
    owner: String,
    utility: BTreeMap<InteractionClass, f64>,
    ranking: RankingWithTies,
}

#[derive(Serialize)]
struct RankReport<'a> {
    config: Config<'a, RankArgs>,
    individuals: Vec<Individual>,
    /// Only built for two or more individuals.
    profile: Option<Profile>,
}

pub fn rank(args: RankArgs) -> Result<()> {
    let mode = match args.mode.as_str() {
        "ordinal" => Mode::Ordinal,
        "utility" => Mode::Utility,
        other => return Err(CliError::Usage(format!("unknown mode {other:?} (expected ordinal or utility)"))),
    };
    let universe = Universe::from_id(&args.universe).map_err(|e| CliError::Usage(e.to_string()))?;
    let files = expand_inputs(&args.inputs, &["csv"])?;

    let mut vectors = Vec::new();
    let mut rankings = Vec::new();
    for path in &files {
        let f = fs::File::open(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
        let instances = read_instances_csv(f).map_err(|e| input(format!("{}: {e}", path.display())))?;
        let mut u = utility_from_instances(&instances, &universe, args.combine)
            .map_err(|e| input(format!("{}: {e}", path.display())))?;
        if u.owner.is_empty() {
            u.owner = stem(path);
        }
        let r = ordinal_from_utility(&u, args.tie_epsilon).map_err(|e| CliError::Usage(e.to_string()))?;
        vectors.push(u);
        rankings.push(r);
    }
    let profile = if vectors.len() >= 2 {
        let p = match mode {
            Mode::Ordinal => Profile::from_rankings(universe.clone(), &rankings),
            Mode::Utility => Profile::from_utility_vectors(&vectors),
        };
        Some(p.map_err(input)?)
    } else {
        None
    };
    let individuals = vectors
        .iter()
        .zip(rankings)
        .map(|(u, ranking)| Individual {
            owner: u.owner.clone(),
            utility: universe.classes().iter().copied().zip(u.values().iter().copied()).collect(),
            ranking,
        })
        .collect();
    let report = RankReport {
        config: config("rank", &args),
        individuals,
        profile,
    };
    emit(args.out.as_deref(), &report)
}

/// Reads a profile from a file or stdin. Accepts a bare profile or any object
/// with a `profile` field, such as a rank report.
fn load_profile(path: &Path) -> Result<Profile> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(input)?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?
    };
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    if let Some(inner) = value.get_mut("profile") {
        if inner.is_null() {
            return Err(CliError::Input(format!("{}: profile is null", path.display())));
        }
        value = inner.take();
    }
    serde_json::from_value(value).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn parse_rule(name: &str) -> Result<NamedRule> {
    name.parse()
        .map_err(|_| CliError::Usage(format!("unknown rule {name:?}; available: {RULES}")))
}

#[derive(Serialize)]
struct AggregateReport<'a> {
    config: Config<'a, AggregateArgs>,
    #[serde(flatten)]
    outcome: AggregateBody,
}

#[derive(Serialize)]
#[serde(untagged)]
enum AggregateBody {
    Relation(AggregationOutcome),
    Direction { rule: String, direction: DirectionPoint },
}

pub fn aggregate(args: AggregateArgs) -> Result<()> {
    let rule = parse_rule(&args.rule)?;
    let profile = load_profile(&args.profile)?;
    let outcome = match rule.handle() {
        RuleHandle::Direction(r) => AggregateBody::Direction {
            rule: r.name(),
            direction: mean_direction(&profile).map_err(input)?,
        },
        RuleHandle::Ordinal(_) if profile.mode() == Mode::Utility => {
            let p = profile.to_ordinal(args.tie_epsilon);
            AggregateBody::Relation(rule.apply(&p).map_err(input)?)
        }
        _ => AggregateBody::Relation(rule.apply(&profile).map_err(input)?),
    };
    let report = AggregateReport {
        config: config("aggregate", &args),
        outcome,
    };
    emit(args.out.as_deref(), &report)
}

#[derive(Serialize)]
struct AuditEntry {
    #[serde(flatten)]
    result: AuditResult,
    /// The witness (or its absence) re-checked by rerunning the rule.
    verified: bool,
}

#[derive(Serialize)]
struct OverBudget {
    axiom: AxiomId,
    estimate: u128,
    budget: u128,
}

#[derive(Serialize)]
struct ResolvedAudit {
    axioms: Vec<AxiomId>,
    space: SearchSpace,
}

#[derive(Serialize)]
struct AuditReport<'a> {
    config: Config<'a, AuditArgs>,
    resolved: ResolvedAudit,
    results: Vec<AuditEntry>,
    over_budget: Vec<OverBudget>,
    /// Arrow set only: true when every axiom passed an exhaustive search.
    contradiction: Option<bool>,
}

const MAY_SET: [AxiomId; 5] = [
    AxiomId::Unanimity,
    AxiomId::Anonymity,
    AxiomId::Neutrality,
    AxiomId::PositiveResponsiveness,
    AxiomId::MajorityCoincidence,
];

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let vals = s
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("bad --grid {s:?}: {e}")))?;
    if vals.is_empty() || vals.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Usage(format!("bad --grid {s:?}")));
    }
    Ok(vals)
}

fn audit_error(e: AuditError) -> CliError {
    match e {
        AuditError::Aggregation(_) | AuditError::Profile(_) => input(e),
        _ => CliError::Usage(e.to_string()),
    }
}

pub fn audit(args: AuditArgs) -> Result<()> {
    let named = parse_rule(&args.rule)?;
    let rule = named.handle();
    let is_direction = matches!(rule, RuleHandle::Direction(_));

    let (axioms, explicit): (Vec<AxiomId>, bool) = match args.axioms.as_str() {
        "arrow" => (AxiomId::ARROW.to_vec(), false),
        "may" => (MAY_SET.to_vec(), false),
        "all" => (AxiomId::ALL.to_vec(), false),
        list => (
            list.split(',')
                .map(|a| a.trim().parse::<AxiomId>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| CliError::Usage(e.to_string()))?,
            true,
        ),
    };

    let domain = if is_direction {
        Domain::Sphere { epsilon: args.epsilon }
    } else {
        match args.domain.as_deref() {
            Some("strict") => Domain::StrictOrders,
            Some("weak") => Domain::WeakOrders,
            Some("grid") => Domain::UtilityGrid {
                values: parse_grid(&args.grid)?,
            },
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "unknown domain {other:?} (expected strict, weak or grid)"
                )))
            }
            None => match rule {
                RuleHandle::Utility(_) => Domain::UtilityGrid {
                    values: parse_grid(&args.grid).unwrap_or_else(|_| DEFAULT_GRID.to_vec()),
                },
                _ => Domain::StrictOrders,
            },
        }
    };
    let space = match (args.mode.as_str(), is_direction) {
        (_, true) | ("sampled", _) => SearchSpace::sampled(args.m, args.n, args.trials, args.seed, domain),
        ("exhaustive", _) => SearchSpace::exhaustive(args.m, args.n, domain),
        (other, _) => {
            return Err(CliError::Usage(format!(
                "unknown mode {other:?} (expected exhaustive or sampled)"
            )))
        }
    };

    let mut resolved = Vec::new();
    let mut results = Vec::new();
    let mut over_budget = Vec::new();
    for axiom in axioms {
        match axiom_audit::audit(&rule, axiom, &space) {
            Ok(result) => {
                let verified = axiom_audit::verify(&rule, &result).map_err(audit_error)?;
                results.push(AuditEntry { result, verified });
            }
            Err(AuditError::InapplicableAxiom { .. }) if !explicit => continue,
            Err(AuditError::BudgetExceeded { estimate, budget }) => {
                over_budget.push(OverBudget { axiom, estimate, budget })
            }
            Err(e) => return Err(audit_error(e)),
        }
        resolved.push(axiom);
    }
    let contradiction = (args.axioms == "arrow" && space.is_exhaustive() && over_budget.is_empty())
        .then(|| results.iter().all(|r| !r.result.failed()));
    let budget_hit = !over_budget.is_empty();
    let report = AuditReport {
        config: config("audit", &args),
        resolved: ResolvedAudit {
            axioms: resolved,
            space,
        },
        results,
        over_budget,
        contradiction,
    };
    emit(args.out.as_deref(), &report)?;
    if budget_hit {
        return Err(CliError::Budget(
            "search budget exceeded for some axioms; report is partial".into(),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct RestrictOutput<'a> {
    config: Config<'a, RestrictArgs>,
    #[serde(flatten)]
    report: RestrictReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    axis_check: Option<SinglePeakedReport>,
}

pub fn restrict(args: RestrictArgs) -> Result<()> {
    let axis = match &args.axis {
        Some(s) => Some(Axis(
            s.split(',')
                .map(|c| c.parse::<InteractionClass>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| CliError::Usage(e.to_string()))?,
        )),
        None => None,
    };
    let profile = load_profile(&args.profile)?;
    let report = restrict_report(&profile).map_err(input)?;
    let axis_check = match &axis {
        Some(a) => Some(is_single_peaked_on(&profile, a).map_err(input)?),
        None => None,
    };
    let out = RestrictOutput {
        config: config("restrict", &args),
        report,
        axis_check,
    };
    emit(args.out.as_deref(), &out)
}

#[derive(Serialize)]
struct SynthOutput<'a> {
    config: Config<'a, SynthArgs>,
    #[serde(flatten)]
    profile: Profile,
}

pub fn synth(args: SynthArgs) -> Result<()> {
    let kind = match args.kind.as_str() {
        "condorcet" | "condorcet-cycle" => SynthKind::CondorcetCycle,
        "impartial-culture" => SynthKind::ImpartialCulture,
        "single-peaked" => SynthKind::SinglePeaked,
        other => {
            return Err(CliError::Usage(format!(
                "unknown kind {other:?} (expected condorcet, impartial-culture or single-peaked)"
            )))
        }
    };
    let spec = SynthSpec {
        kind,
        m: args.m,
        n: args.n,
        seed: args.seed,
    };
    let profile = generate(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
    let out = SynthOutput {
        config: config("synth", &args),
        profile,
    };
    emit(args.out.as_deref(), &out)
}

