//! The `fxp` command-line tool: one query per process, text or JSON reports.

pub mod args;
pub mod report;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::Path;

use clap::Parser;
use fxp_core::attribution::{audit_against, characteristic_value, ShapReport};
use fxp_core::explain::{default_order, one_axp_traced, one_cxp_traced, DeletionStep};
use fxp_core::format::{parse_instance, parse_model};
use fxp_core::rational::{self, Rational};
use fxp_core::semantics::expected_value_oracle;
use fxp_core::{
    enumerate_explanations, inflate, relevant_features, AdversarialQuery, AuditFlag, AuditReport, Epsilon, Error, FeatureSet, Norm,
    Problem, Restriction, ShapOptions, Similarity, Task, TreeModel, DEFAULT_BRUTE_CAP,
};
use serde::Serialize;

use crate::args::{AuditArgs, Cli, Command, EnumerateArgs, Format, InflateArgs, OrderedArgs, ProblemArgs, RobustArgs, ShapArgs, ValidateArgs};
use crate::report::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_CAP: i32 = 4;

/// Environment variable overriding the brute-force point cap.
pub const BRUTE_CAP_VAR: &str = "FXP_BRUTE_CAP";

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::Config(_) => EXIT_USAGE,
            Error::Syntax { .. } | Error::Model(_) | Error::Instance(_) | Error::Efficiency { .. } => EXIT_INVALID,
            Error::NoCxp | Error::EmptySet => EXIT_INFEASIBLE,
            Error::CapExceeded { .. } | Error::FeatureCapExceeded { .. } | Error::LimitReached(_) => EXIT_CAP,
        };
        let message = match &err {
            Error::Model(e) => format!("{err} [invariant: {}]", e.invariant()),
            _ => err.to_string(),
        };
        Failure { code, message }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Parses `args` (including the program name), runs the query and writes the
/// report to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = brute_cap().and_then(|cap| execute(&cli.command, cap));
    match result {
        Ok(text) => match out.write_all(text.as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(_) => EXIT_USAGE,
        },
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.code
        }
    }
}

fn brute_cap() -> Outcome<u128> {
    match std::env::var(BRUTE_CAP_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| Failure::usage(format!("{BRUTE_CAP_VAR} must be a nonnegative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_BRUTE_CAP),
    }
}

/// Runs one parsed command with an explicit brute-force cap and returns the
/// report text.
pub fn execute(command: &Command, cap: u128) -> Outcome<String> {
    match command {
        Command::Axp(a) => explain_cmd(a, true),
        Command::Cxp(a) => explain_cmd(a, false),
        Command::Enumerate(a) => enumerate_cmd(a, false),
        Command::Relevancy(a) => enumerate_cmd(a, true),
        Command::Shap(a) => shap_cmd(a, cap),
        Command::Audit(a) => audit_cmd(a),
        Command::Inflate(a) => inflate_cmd(a),
        Command::Robust(a) => robust_cmd(a),
        Command::Validate(a) => validate_cmd(a, cap),
    }
}

fn read(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn load_model(path: &Path) -> Outcome<TreeModel> {
    parse_model(&read(path)?).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn parse_rational(flag: &str, text: &str) -> Outcome<Rational> {
    rational::parse(text).ok_or_else(|| Failure::usage(format!("{flag} expects p/q, got {text:?}")))
}

fn similarity_for(task: &Task, delta: Option<&str>, strict: bool, flags: (&str, &str)) -> Outcome<Similarity> {
    let (delta_flag, strict_flag) = flags;
    match task {
        Task::Classification { .. } => {
            if delta.is_some() || strict {
                return Err(Failure::usage(format!("{delta_flag} and {strict_flag} apply to regression models only")));
            }
            Ok(Similarity::ClassEquality)
        }
        Task::Regression => {
            let delta = match delta {
                Some(text) => parse_rational(delta_flag, text)?,
                None => rational::int(0),
            };
            if delta < rational::int(0) {
                return Err(Failure::usage(format!("{delta_flag} must be nonnegative")));
            }
            if strict && delta == rational::int(0) {
                return Err(Failure::usage(format!("{strict_flag} needs a positive {delta_flag}")));
            }
            Ok(Similarity::threshold(delta, strict))
        }
    }
}

/// A loaded model together with the sample and similarity from the flags.
struct Loaded {
    model: TreeModel,
    sample: fxp_core::Sample,
    similarity: Similarity,
    format: Format,
}

impl Loaded {
    fn new(args: &ProblemArgs) -> Outcome<Self> {
        let model = load_model(&args.model)?;
        let similarity = similarity_for(model.task(), args.delta.as_deref(), args.strict, ("--delta", "--strict"))?;
        let sample = parse_instance(&read(&args.instance)?, &model).map_err(|e| {
            let mut f = Failure::from(e);
            f.message = format!("{}: {}", args.instance.display(), f.message);
            f
        })?;
        Ok(Loaded { model, sample, similarity, format: args.format })
    }

    fn problem(&self) -> Outcome<Problem<'_>> {
        Ok(Problem::new(&self.model, self.sample.clone(), self.similarity.clone())?)
    }

    fn names(&self) -> Vec<String> {
        self.model.space().features().iter().map(|f| f.name().to_string()).collect()
    }

    fn emit<R: Serialize>(&self, record: &R, text: impl FnOnce(&[String]) -> String) -> Outcome<String> {
        match self.format {
            Format::Json => Ok(to_json(record)),
            Format::Text => Ok(text(&self.names())),
        }
    }
}

fn to_json<R: Serialize>(record: &R) -> String {
    let mut s = serde_json::to_string_pretty(record).expect("records serialize");
    s.push('\n');
    s
}

/// 1-based ids to a feature set, rejecting ids outside 1..=m.
fn feature_ids(flag: &str, ids: &[usize], m: usize) -> Outcome<FeatureSet> {
    if let Some(&bad) = ids.iter().find(|&&i| i == 0 || i > m) {
        return Err(Failure::usage(format!("{flag}: feature id {bad} is out of range 1..={m}")));
    }
    Ok(FeatureSet::from_ids(ids.iter().copied()))
}

fn order_from(flag: Option<&Vec<usize>>, problem: &Problem<'_>) -> Outcome<Vec<usize>> {
    match flag {
        None => Ok(default_order(problem)),
        Some(ids) => {
            let m = problem.m();
            let set = feature_ids("--order", ids, m)?;
            if ids.len() != m || set != problem.all() {
                return Err(Failure::usage(format!("--order must be a permutation of 1..={m}")));
            }
            Ok(ids.iter().map(|i| i - 1).collect())
        }
    }
}

fn trace_rows(trace: &[DeletionStep]) -> Vec<TraceRow> {
    trace
        .iter()
        .map(|s| TraceRow { current: s.current.ids(), dropped: s.dropped + 1, path: s.path.clone(), result: s.result.ids() })
        .collect()
}

fn explain_cmd(args: &OrderedArgs, abductive: bool) -> Outcome<String> {
    let loaded = Loaded::new(&args.problem)?;
    let problem = loaded.problem()?;
    let order = order_from(args.order.as_ref(), &problem)?;
    problem.reset_oracle_calls();
    let (explanation, trace) = if abductive { one_axp_traced(&problem, &order)? } else { one_cxp_traced(&problem, &order)? };
    let record = ExplanationRecord {
        kind: explanation.kind.to_string(),
        features: explanation.features.ids(),
        similarity: problem.similarity().to_string(),
        order: order.iter().map(|i| i + 1).collect(),
        oracle_calls: problem.oracle_calls(),
        fingerprint: explanation.fingerprint,
        trace: trace_rows(&trace),
    };
    loaded.emit(&record, |names| record.render(names))
}

fn sets(v: &[FeatureSet]) -> Vec<Vec<usize>> {
    v.iter().map(|s| s.ids()).collect()
}

fn enumerate_cmd(args: &EnumerateArgs, require_exhaustion: bool) -> Outcome<String> {
    let loaded = Loaded::new(&args.problem)?;
    let problem = loaded.problem()?;
    let record = if require_exhaustion {
        let r = relevant_features(&problem, args.limit)?;
        EnumerationRecord { axps: sets(&r.axps), cxps: sets(&r.cxps), relevant: r.relevant.ids(), necessary: r.necessary.ids(), exhausted: true }
    } else {
        let state = enumerate_explanations(&problem, args.limit);
        let relevant = state.axps.iter().fold(FeatureSet::EMPTY, |acc, x| acc.union(*x));
        let necessary = state.axps.iter().fold(problem.all(), |acc, x| acc.intersection(*x));
        EnumerationRecord {
            axps: sets(&state.axps),
            cxps: sets(&state.cxps),
            relevant: relevant.ids(),
            // Without any AXp the intersection is vacuous; report nothing.
            necessary: if state.axps.is_empty() { Vec::new() } else { necessary.ids() },
            exhausted: state.exhausted,
        }
    };
    loaded.emit(&record, |names| record.render(names, require_exhaustion))
}

fn flag_name(flag: AuditFlag) -> &'static str {
    match flag {
        AuditFlag::IrrelevantNonzero => "IrrelevantNonzero",
        AuditFlag::RelevantZero => "RelevantZero",
        AuditFlag::Consistent => "Consistent",
    }
}

fn audit_entries(report: &AuditReport, names: &[String]) -> Vec<AuditEntry> {
    report
        .findings
        .iter()
        .map(|f| AuditEntry {
            feature: names[f.feature].clone(),
            id: f.feature + 1,
            score: rational::render(&f.score),
            relevant: f.relevant,
            flag: flag_name(f.flag).to_string(),
        })
        .collect()
}

fn ledger_rows(shap: &ShapReport, names: &[String]) -> Option<Vec<LedgerRow>> {
    shap.ledger.as_ref().map(|ledger| {
        ledger
            .iter()
            .enumerate()
            .flat_map(|(i, rows)| {
                rows.iter().map(move |c| LedgerRow {
                    feature: names[i].clone(),
                    subset: c.subset.ids(),
                    delta: rational::render(&c.delta),
                    weight: rational::render(&c.weight),
                })
            })
            .collect()
    })
}

/// Recomputes cf on every subset by enumerating completions.
fn cross_check(problem: &Problem<'_>, cap: u128) -> Outcome<()> {
    for s in FeatureSet::all_subsets(problem.m()) {
        let brute = expected_value_oracle(problem.model(), &Restriction::new(s, problem.point()), cap)?;
        if brute != characteristic_value(problem, s) {
            return Err(Failure {
                code: EXIT_INVALID,
                message: format!("cross-check failed on {s}: brute force gives {}", rational::render(&brute)),
            });
        }
    }
    Ok(())
}

fn shap_cmd(args: &ShapArgs, cap: u128) -> Outcome<String> {
    let loaded = Loaded::new(&args.problem)?;
    let problem = loaded.problem()?;
    let names = loaded.names();
    let options = ShapOptions { max_features: args.max_features, ledger: args.ledger };
    let (shap, audit) = if args.no_audit {
        (fxp_core::shap_all(&problem, options)?, Vec::new())
    } else {
        let report = audit_against(&problem, &problem, options, args.limit)?;
        let entries = audit_entries(&report, &names);
        (report.shap, entries)
    };
    let cross = if args.cross_check {
        cross_check(&problem, cap)?;
        Some("ok".to_string())
    } else {
        None
    };
    let record = ShapRecord {
        scores: names.iter().cloned().zip(shap.scores.iter().map(rational::render)).collect(),
        baseline: rational::render(&shap.baseline),
        output: rational::render(&shap.full),
        efficiency_check: "ok".into(),
        audit,
        cross_check: cross,
        ledger: ledger_rows(&shap, &names),
    };
    loaded.emit(&record, |names| record.render(names))
}

fn audit_cmd(args: &AuditArgs) -> Outcome<String> {
    let mismatch_requested = args.relevancy_delta.is_some() || args.relevancy_strict;
    if mismatch_requested && !args.allow_similarity_mismatch {
        return Err(Failure::usage("--relevancy-delta/--relevancy-strict require --allow-similarity-mismatch"));
    }
    let loaded = Loaded::new(&args.problem)?;
    let problem = loaded.problem()?;
    let relevancy_problem = if mismatch_requested {
        let delta = args.relevancy_delta.as_deref().or(args.problem.delta.as_deref());
        let similarity = similarity_for(
            loaded.model.task(),
            delta,
            args.relevancy_strict,
            ("--relevancy-delta", "--relevancy-strict"),
        )?;
        problem.with_similarity(similarity)?
    } else {
        problem.with_similarity(problem.similarity().clone())?
    };
    let options = ShapOptions { max_features: args.max_features, ledger: false };
    let report = audit_against(&problem, &relevancy_problem, options, args.limit)?;
    let names = loaded.names();
    let record = AuditRecord {
        similarity: problem.similarity().to_string(),
        relevancy_similarity: report.similarity.to_string(),
        baseline: rational::render(&report.shap.baseline),
        efficiency_check: "ok".into(),
        axps: sets(&report.relevancy.axps),
        findings: audit_entries(&report, &names),
    };
    loaded.emit(&record, |names| record.render(names))
}

fn inflate_cmd(args: &InflateArgs) -> Outcome<String> {
    let loaded = Loaded::new(&args.problem)?;
    let problem = loaded.problem()?;
    let axp = match &args.features {
        Some(ids) => feature_ids("--features", ids, problem.m())?,
        None => {
            let order = order_from(args.order.as_ref(), &problem)?;
            one_axp_traced(&problem, &order)?.0.features
        }
    };
    let inflated = inflate(&problem, axp, None)?;
    let space = loaded.model.space();
    let record = InflateRecord {
        axp: axp.ids(),
        literals: inflated
            .literals
            .iter()
            .map(|(i, set)| LiteralRow {
                feature: space.feature(*i).name().to_string(),
                values: set.iter().map(|x| space.feature(*i).domain()[x].to_string()).collect(),
            })
            .collect(),
        output: loaded.model.render_output(&inflated.output),
        removable: inflated.removable.ids(),
        rule: inflated.render(&loaded.model),
    };
    loaded.emit(&record, |names| record.render(names))
}

fn robust_cmd(args: &RobustArgs) -> Outcome<String> {
    let norm: Norm = args.norm.parse().map_err(Failure::usage)?;
    let eps: Epsilon = args.eps.parse().map_err(Failure::usage)?;
    let loaded = Loaded::new(&args.problem)?;
    let problem = loaded.problem()?;
    let fixed = feature_ids("--fix", &args.fix, problem.m())?;
    let query = AdversarialQuery { norm, eps: eps.clone(), fixed };
    let witness = problem.find_adversarial_example(&query);
    let space = loaded.model.space();
    let record = RobustRecord {
        norm: norm.to_string(),
        eps: eps.to_string(),
        fixed: fixed.ids(),
        found: witness.is_some(),
        witness: witness.map(|w| WitnessRow {
            point: space.values_of(&w.point).iter().map(ToString::to_string).collect(),
            output: loaded.model.render_output(&w.output),
            distance: rational::render(&w.distance),
        }),
    };
    loaded.emit(&record, |names| record.render(names))
}

fn validate_cmd(args: &ValidateArgs, cap: u128) -> Outcome<String> {
    let model = load_model(&args.model)?;
    let space = model.space();
    let points = space.point_count();
    let mut partition_checked = false;
    if let Some(n) = points.filter(|&n| n <= cap) {
        let anchor = vec![0; space.len()];
        for x in space.points(&Restriction::new(FeatureSet::EMPTY, &anchor), n)? {
            let hits = model.paths().iter().filter(|p| p.contains_point(&x)).count();
            if hits != 1 {
                return Err(Failure {
                    code: EXIT_INVALID,
                    message: format!("point {} lies on {hits} paths [invariant: PathsPartition]", space.render_point(&x)),
                });
            }
        }
        partition_checked = true;
    }
    let instance_output = match &args.instance {
        Some(path) => {
            let sample = parse_instance(&read(path)?, &model).map_err(|e| {
                let mut f = Failure::from(e);
                f.message = format!("{}: {}", path.display(), f.message);
                f
            })?;
            Some(model.render_output(&sample.output))
        }
        None => None,
    };
    let record = ValidateRecord {
        valid: true,
        features: space.len(),
        nodes: model.nodes().len(),
        paths: model.paths().len(),
        points: points.map(|n| n.to_string()),
        partition_checked,
        instance_output,
    };
    Ok(match args.format {
        Format::Json => to_json(&record),
        Format::Text => record.render(),
    })
}
