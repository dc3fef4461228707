use std::io::Write;

use parahoric::verify::{Certificate, Verdict};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{CliError, RunConfig, EXIT_FAILED, EXIT_NOT_COMPUTED, EXIT_OK};
use crate::Format;

pub const ENGINE: &str = "parahoric";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Verified,
    Failed,
    NotComputed,
    NotApplicable,
    /// A typed computation result that asserts nothing.
    Computed,
}

impl From<Verdict> for Status {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Verified => Status::Verified,
            Verdict::Failed => Status::Failed,
            Verdict::NotComputed => Status::NotComputed,
            Verdict::NotApplicable => Status::NotApplicable,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Row {
    pub status: Status,
    pub body: Value,
}

impl Row {
    pub fn new(status: Status, body: impl Serialize) -> Self {
        Row { status, body: serde_json::to_value(body).expect("report rows serialize") }
    }

    pub fn certificate(c: &Certificate) -> Self {
        Row::new(c.verdict.into(), c)
    }

    pub fn not_computed(scope: Value, reason: impl std::fmt::Display) -> Self {
        Row::new(Status::NotComputed, json!({ "scope": scope, "reason": reason.to_string() }))
    }

    fn to_value(&self) -> Value {
        let mut v = self.body.clone();
        if let Value::Object(m) = &mut v {
            m.insert("status".into(), serde_json::to_value(self.status).unwrap());
        }
        v
    }
}

/// Rows of one command plus the table layout: `(header, JSON pointer)`.
pub struct Outcome {
    pub rows: Vec<Row>,
    pub columns: Vec<(&'static str, &'static str)>,
}

#[derive(Serialize)]
struct Conventions {
    numbering: &'static str,
    cartan_matrix: &'static str,
    root_order: &'static str,
    affine_node: usize,
    kac_coordinates: &'static str,
    characters: &'static str,
    order_polynomials: &'static str,
}

const CONVENTIONS: Conventions = Conventions {
    numbering: "bourbaki",
    cartan_matrix: "a[i][j] = <alpha_i, alpha_j^vee>",
    root_order: "positive roots by height then descending lexicographic; root N+k is minus root k",
    affine_node: parahoric::affine::AFFINE_NODE,
    kac_coordinates: "torsion points exp(2 pi i lambda/m), lambda in fundamental-coweight coordinates",
    characters: "basis dual to the cocharacter basis",
    order_polynomials: "c * q^a * prod Phi_m(q)^e_m",
};

#[derive(Serialize, Default)]
pub struct Summary {
    pub total: usize,
    pub verified: usize,
    pub failed: usize,
    pub not_computed: usize,
    pub not_applicable: usize,
    pub computed: usize,
    pub exit_code: u8,
}

impl Summary {
    fn of(rows: &[Row]) -> Self {
        let mut s = Summary { total: rows.len(), ..Default::default() };
        for r in rows {
            match r.status {
                Status::Verified => s.verified += 1,
                Status::Failed => s.failed += 1,
                Status::NotComputed => s.not_computed += 1,
                Status::NotApplicable => s.not_applicable += 1,
                Status::Computed => s.computed += 1,
            }
        }
        s.exit_code = if s.failed > 0 {
            EXIT_FAILED
        } else if s.not_computed > 0 {
            EXIT_NOT_COMPUTED
        } else {
            EXIT_OK
        };
        s
    }
}

#[derive(Serialize)]
struct Report<'a> {
    engine: &'static str,
    version: &'static str,
    conventions: Conventions,
    command: &'a str,
    config: &'a RunConfig,
    results: Vec<Value>,
    summary: Summary,
}

pub fn emit(config: &RunConfig, outcome: Outcome) -> Result<u8, CliError> {
    let summary = Summary::of(&outcome.rows);
    let code = summary.exit_code;
    let text = match config.format {
        Format::Json => {
            let report = Report {
                engine: ENGINE,
                version: parahoric::ENGINE_VERSION,
                conventions: CONVENTIONS,
                command: &config.command,
                config,
                results: outcome.rows.iter().map(Row::to_value).collect(),
                summary,
            };
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Table => table(config, &outcome, &summary),
    };
    match &config.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string()))?;
        }
    }
    Ok(code)
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => "-".into(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

fn table(config: &RunConfig, outcome: &Outcome, summary: &Summary) -> String {
    let mut columns = vec![("status", "/status")];
    columns.extend(outcome.columns.iter().copied());
    let mut grid: Vec<Vec<String>> = vec![columns.iter().map(|(h, _)| h.to_string()).collect()];
    for row in &outcome.rows {
        let v = row.to_value();
        grid.push(columns.iter().map(|(_, p)| cell(v.pointer(p))).collect());
    }
    let widths: Vec<usize> =
        (0..columns.len()).map(|c| grid.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
    let mut s = format!("{ENGINE} {}  {}\n", parahoric::ENGINE_VERSION, config.command);
    for r in &grid {
        let line: Vec<String> = r.iter().zip(&widths).map(|(x, w)| format!("{x:<w$}")).collect();
        s.push_str(line.join("  ").trim_end());
        s.push('\n');
    }
    s.push_str(&format!(
        "{} results: {} verified, {} failed, {} not computed, {} not applicable, {} computed; exit {}\n",
        summary.total,
        summary.verified,
        summary.failed,
        summary.not_computed,
        summary.not_applicable,
        summary.computed,
        summary.exit_code
    ));
    s
}
