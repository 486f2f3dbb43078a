//! The `digicat` command line.
//!
//! Exit codes: 0 success, 1 other errors, 2 parse errors, 3 invalid space or
//! map specifications, 4 verification failures, 5 oracle cap exceeded.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::homotopy::DEFAULT_BUDGET;
use crate::image::is_connected;
use crate::oracle::{exact_cat, exact_tc, OracleConfig, OracleResult};
use crate::planners::{plan, CoverDoc, CoverKind, PlanOptions, Schedule};
use crate::spaces::{NonSingularMap, Space};
use crate::verify::{certify, verify_document};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_UNVERIFIED: i32 = 4;
pub const EXIT_CAP: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "digicat", version, about = "Digital LS-category and topological complexity: covers, certificates, oracles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Homotopy search budget (visited maps per query).
    #[arg(long, global = true, env = "DIGICAT_BUDGET")]
    pub budget: Option<usize>,

    /// Oracle size cap (points for cat, product points for TC).
    #[arg(long, global = true, env = "DIGICAT_CAP")]
    pub cap: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a space and print its image.
    Space { spec: String },
    /// Build, verify and print a bound certificate.
    Plan {
        kind: KindArg,
        spec: String,
        /// JSON file with a non-singular map `{"components": [...]}`.
        #[arg(long)]
        theta: Option<PathBuf>,
        /// Build the TC cover from pairs of categorical pieces.
        #[arg(long)]
        doubled: bool,
        #[arg(long, default_value = "overlapped")]
        schedule: String,
    },
    /// Re-verify a cover or certificate JSON file.
    Verify { file: PathBuf },
    /// Exact invariant of a small space by brute force.
    Oracle { kind: KindArg, spec: String },
    /// Run a scenario file and print a table.
    Report { scenario: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Cat,
    Tc,
}

impl From<KindArg> for CoverKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Cat => CoverKind::Cat,
            KindArg::Tc => CoverKind::Tc,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Document(_) => EXIT_PARSE,
            Error::InvalidSpec(_) | Error::Theta(_) => EXIT_INVALID,
            Error::CapExceeded { .. } => EXIT_CAP,
            Error::Construction(_) => EXIT_UNVERIFIED,
            _ => EXIT_OTHER,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn parse_error(what: &Path, e: impl std::fmt::Display) -> CliError {
    CliError {
        code: EXIT_PARSE,
        message: format!("{}: {e}", what.display()),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError {
        code: EXIT_OTHER,
        message: format!("{}: {e}", path.display()),
    })
}

/// Rendered output plus exit code.
pub struct Outcome {
    pub code: i32,
    pub body: String,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

fn table(format: Format, header: &[&str], rows: &[Vec<String>]) -> String {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header).expect("in-memory write");
            for r in rows {
                w.write_record(r).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "| {} |", header.join(" | "));
            let _ = writeln!(s, "|{}", "---|".repeat(header.len()));
            for r in rows {
                let _ = writeln!(s, "| {} |", r.join(" | "));
            }
            s
        }
    }
}

impl Cli {
    fn budget(&self) -> usize {
        self.budget.unwrap_or(DEFAULT_BUDGET)
    }

    fn oracle_config(&self) -> OracleConfig {
        OracleConfig {
            cap: self.cap,
            budget: self.budget(),
        }
    }

    /// Runs the command and renders its output.
    pub fn execute(&self) -> Result<Outcome, CliError> {
        match &self.command {
            Command::Space { spec } => self.space(spec),
            Command::Plan {
                kind,
                spec,
                theta,
                doubled,
                schedule,
            } => self.plan(*kind, spec, theta.as_deref(), *doubled, schedule),
            Command::Verify { file } => self.verify(file),
            Command::Oracle { kind, spec } => self.oracle(*kind, spec),
            Command::Report { scenario } => self.report(scenario),
        }
    }

    fn space(&self, spec: &str) -> Result<Outcome, CliError> {
        let space: Space = spec.parse()?;
        let built = space.build()?;
        let doc = built.to_doc();
        let body = match self.format.unwrap_or(Format::Json) {
            Format::Json => json(&doc),
            f => {
                let classes = doc.quotient.as_ref().map_or("-".to_string(), |q| q.classes.len().to_string());
                table(
                    f,
                    &["space", "label", "points", "edges", "classes"],
                    &[vec![
                        space.to_string(),
                        doc.label.clone(),
                        doc.points.len().to_string(),
                        doc.edges.len().to_string(),
                        classes,
                    ]],
                )
            }
        };
        Ok(Outcome { code: EXIT_OK, body })
    }

    fn plan(
        &self,
        kind: KindArg,
        spec: &str,
        theta: Option<&Path>,
        doubled: bool,
        schedule: &str,
    ) -> Result<Outcome, CliError> {
        let space: Space = spec.parse()?;
        let schedule: Schedule = schedule.parse()?;
        let theta = match theta {
            Some(path) => {
                let map: NonSingularMap = serde_json::from_str(&read(path)?).map_err(|e| parse_error(path, e))?;
                let map = NonSingularMap::new(map.components)?;
                map.validate()?;
                Some(map)
            }
            None => None,
        };
        let opts = PlanOptions {
            theta,
            doubled,
            schedule,
            budget: self.budget(),
        };
        let cover = plan(&space, kind.into(), &opts)?;
        let cert = certify(&cover);
        let code = if cert.verified { EXIT_OK } else { EXIT_UNVERIFIED };
        let body = match self.format.unwrap_or(Format::Json) {
            Format::Json => json(&cert),
            f => check_table(f, &cert.report),
        };
        Ok(Outcome { code, body })
    }

    fn verify(&self, file: &Path) -> Result<Outcome, CliError> {
        let value: serde_json::Value = serde_json::from_str(&read(file)?).map_err(|e| parse_error(file, e))?;
        // a full certificate carries the cover under "cover"
        let value = match value.get("cover") {
            Some(inner) => inner.clone(),
            None => value,
        };
        let doc: CoverDoc = serde_json::from_value(value).map_err(|e| parse_error(file, e))?;
        let report = verify_document(doc)?;
        let code = if report.verified { EXIT_OK } else { EXIT_UNVERIFIED };
        let body = match self.format.unwrap_or(Format::Json) {
            Format::Json => json(&report),
            f => check_table(f, &report),
        };
        Ok(Outcome { code, body })
    }

    fn oracle(&self, kind: KindArg, spec: &str) -> Result<Outcome, CliError> {
        let space: Space = spec.parse()?;
        let built = space.build()?;
        let cfg = self.oracle_config();
        let result = match kind {
            KindArg::Cat => exact_cat(&built.image, &cfg)?,
            KindArg::Tc => exact_tc(&built.image, &cfg)?,
        };
        #[derive(Serialize)]
        struct Out<'a> {
            space: String,
            #[serde(flatten)]
            result: &'a OracleResult,
        }
        let body = match self.format.unwrap_or(Format::Json) {
            Format::Json => json(&Out {
                space: space.to_string(),
                result: &result,
            }),
            f => table(
                f,
                &["space", "invariant", "value", "queries", "inconclusive_queries"],
                &[vec![
                    space.to_string(),
                    result.invariant.to_string(),
                    result.value.describe(),
                    result.queries.to_string(),
                    result.inconclusive_queries.to_string(),
                ]],
            ),
        };
        Ok(Outcome { code: EXIT_OK, body })
    }

    fn report(&self, scenario: &Path) -> Result<Outcome, CliError> {
        let text = read(scenario)?;
        let parsed: Scenario = toml::from_str(&text).map_err(|e| parse_error(scenario, e))?;
        let rows = run_scenario(&parsed, self.budget(), &self.oracle_config())?;
        let body = match self.format.unwrap_or(Format::Md) {
            Format::Json => json(&ScenarioReport { rows: rows.clone() }),
            f => {
                let cells: Vec<Vec<String>> = rows.iter().map(ReportRow::cells).collect();
                table(f, &REPORT_HEADER, &cells)
            }
        };
        Ok(Outcome { code: EXIT_OK, body })
    }
}

fn check_table(format: Format, report: &crate::verify::Report) -> String {
    let rows: Vec<Vec<String>> = report
        .checks
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                if c.pass { "pass" } else { "fail" }.to_string(),
                c.failure_count.to_string(),
            ]
        })
        .collect();
    let mut s = table(format, &["check", "result", "failures"], &rows);
    if format == Format::Md {
        let _ = writeln!(s, "\nbound {}, verified: {}", report.bound, report.verified);
    }
    s
}

/// A scenario file: one `[[row]]` table per space.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub row: Vec<ScenarioRow>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioRow {
    pub space: String,
    #[serde(default)]
    pub plan: Vec<KindArg>,
    #[serde(default)]
    pub oracle: Vec<KindArg>,
    #[serde(default)]
    pub schedule: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PlanCell {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PlanCell {
    fn text(&self) -> String {
        match (self.bound, &self.error) {
            (Some(b), _) if self.verified => format!("{b} (verified)"),
            (Some(b), _) => format!("{b} (unverified)"),
            _ => "error".to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum OracleCell {
    Computed(OracleResult),
    OverCap {
        size: usize,
        cap: usize,
        lower: usize,
        upper: Option<usize>,
    },
}

impl OracleCell {
    fn text(&self) -> String {
        match self {
            OracleCell::Computed(r) => r.value.describe(),
            OracleCell::OverCap { .. } => "range".to_string(),
        }
    }

    fn exact(&self) -> Option<usize> {
        match self {
            OracleCell::Computed(r) => r.value.exact(),
            OracleCell::OverCap { .. } => None,
        }
    }

    fn lower(&self) -> Option<usize> {
        match self {
            OracleCell::Computed(r) => r.value.lower(),
            OracleCell::OverCap { lower, .. } => Some(*lower),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportRow {
    pub space: String,
    pub points: usize,
    pub connected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cat_plan: Option<PlanCell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tc_plan: Option<PlanCell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cat_oracle: Option<OracleCell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tc_oracle: Option<OracleCell>,
    /// `cat <= tc <= 2 cat`, when both oracle values are exact on a connected space.
    pub inequality: Option<bool>,
    /// Oracle lower bounds at most the verified planner bounds.
    pub bounds: Option<bool>,
}

const REPORT_HEADER: [&str; 8] = [
    "space",
    "points",
    "cat plan",
    "tc plan",
    "cat oracle",
    "tc oracle",
    "cat<=tc<=2cat",
    "oracle<=bound",
];

fn verdict(v: Option<bool>) -> String {
    match v {
        Some(true) => "holds",
        Some(false) => "FAILS",
        None => "n/a",
    }
    .to_string()
}

impl ReportRow {
    fn cells(&self) -> Vec<String> {
        let plan = |c: &Option<PlanCell>| c.as_ref().map_or("-".to_string(), PlanCell::text);
        let oracle = |c: &Option<OracleCell>| c.as_ref().map_or("-".to_string(), OracleCell::text);
        vec![
            self.space.clone(),
            self.points.to_string(),
            plan(&self.cat_plan),
            plan(&self.tc_plan),
            oracle(&self.cat_oracle),
            oracle(&self.tc_oracle),
            verdict(self.inequality),
            verdict(self.bounds),
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
struct ScenarioReport {
    rows: Vec<ReportRow>,
}

fn plan_cell(space: &Space, kind: CoverKind, opts: &PlanOptions) -> PlanCell {
    match plan(space, kind, opts) {
        Ok(cover) => {
            let cert = certify(&cover);
            PlanCell {
                bound: Some(cert.bound),
                verified: cert.verified,
                error: None,
            }
        }
        Err(e) => PlanCell {
            bound: None,
            verified: false,
            error: Some(e.to_string()),
        },
    }
}

fn oracle_cell(
    image: &std::sync::Arc<crate::image::DigitalImage>,
    kind: KindArg,
    cfg: &OracleConfig,
    verified_bound: Option<usize>,
) -> Result<OracleCell, CliError> {
    let result = match kind {
        KindArg::Cat => exact_cat(image, cfg),
        KindArg::Tc => exact_tc(image, cfg),
    };
    match result {
        Ok(r) => Ok(OracleCell::Computed(r)),
        Err(Error::CapExceeded { size, cap }) => Ok(OracleCell::OverCap {
            size,
            cap,
            lower: 0,
            upper: verified_bound,
        }),
        Err(e) => Err(e.into()),
    }
}

/// Evaluates every row of a scenario, in order.
pub fn run_scenario(scenario: &Scenario, budget: usize, cfg: &OracleConfig) -> Result<Vec<ReportRow>, CliError> {
    let mut rows = Vec::with_capacity(scenario.row.len());
    for row in &scenario.row {
        let space: Space = row.space.parse()?;
        let built = space.build()?;
        let schedule: Schedule = row.schedule.as_deref().unwrap_or("overlapped").parse()?;
        let opts = PlanOptions {
            schedule,
            budget,
            ..PlanOptions::default()
        };
        let cell_for = |k: KindArg| row.plan.contains(&k).then(|| plan_cell(&space, k.into(), &opts));
        let cat_plan = cell_for(KindArg::Cat);
        let tc_plan = cell_for(KindArg::Tc);
        let verified = |c: &Option<PlanCell>| c.as_ref().filter(|c| c.verified).and_then(|c| c.bound);

        let oracle_for = |k: KindArg, bound: Option<usize>| -> Result<Option<OracleCell>, CliError> {
            if row.oracle.contains(&k) {
                oracle_cell(&built.image, k, cfg, bound).map(Some)
            } else {
                Ok(None)
            }
        };
        let cat_oracle = oracle_for(KindArg::Cat, verified(&cat_plan))?;
        let tc_oracle = oracle_for(KindArg::Tc, verified(&tc_plan))?;

        let connected = is_connected(&built.image)?;
        let inequality = match (connected, cat_oracle.as_ref().and_then(OracleCell::exact), tc_oracle.as_ref().and_then(OracleCell::exact)) {
            (true, Some(c), Some(t)) => Some(c <= t && t <= 2 * c),
            _ => None,
        };
        let mut bounds = None;
        for (oracle, bound) in [(&cat_oracle, verified(&cat_plan)), (&tc_oracle, verified(&tc_plan))] {
            if let (Some(o), Some(b)) = (oracle, bound) {
                let ok = o.lower().is_some_and(|v| v <= b);
                bounds = Some(bounds.unwrap_or(true) && ok);
            }
        }
        rows.push(ReportRow {
            space: space.to_string(),
            points: built.image.len(),
            connected,
            cat_plan,
            tc_plan,
            cat_oracle,
            tc_oracle,
            inequality,
            bounds,
        });
    }
    Ok(rows)
}

/// Parses arguments, runs, writes output, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return EXIT_PARSE;
            }
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
    };
    let outcome = match cli.execute() {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            return e.code;
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.body) {
                let _ = writeln!(stderr, "error: {}: {e}", path.display());
                return EXIT_OTHER;
            }
        }
        None => {
            let _ = stdout.write_all(outcome.body.as_bytes());
        }
    }
    outcome.code
}

