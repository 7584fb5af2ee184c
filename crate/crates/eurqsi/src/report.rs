//! Serializable reports. JSON is canonical; CSV and the text table are projections.

use eurqsi_core::eur::{EurReport, FuzzSummary};
use eurqsi_core::gallery::GalleryLedger;
use eurqsi_core::qmat::CMatrix;
use eurqsi_core::simx::ExperimentResult;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Table,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Table => "txt",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LedgerRowJson {
    pub case: &'static str,
    pub quantity: String,
    pub expected: f64,
    pub computed: f64,
    pub residual: f64,
    pub class: &'static str,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExamplesReport {
    pub command: &'static str,
    pub pass: bool,
    pub tolerance_override: Option<f64>,
    pub cases: Vec<&'static str>,
    pub failures: usize,
    pub rows: Vec<LedgerRowJson>,
}

impl ExamplesReport {
    pub fn new(ledger: &GalleryLedger, tolerance_override: Option<f64>) -> Self {
        Self {
            command: "examples",
            pass: ledger.pass(),
            tolerance_override,
            cases: ledger.cases().iter().map(|c| c.as_str()).collect(),
            failures: ledger.failures().count(),
            rows: ledger
                .rows
                .iter()
                .map(|r| LedgerRowJson {
                    case: r.case.as_str(),
                    quantity: r.quantity.clone(),
                    expected: r.expected,
                    computed: r.computed,
                    residual: r.residual,
                    class: r.class.as_str(),
                    tolerance: r.tolerance,
                    pass: r.pass,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EurJson {
    pub relation: &'static str,
    pub h_xb: f64,
    pub h_zb: f64,
    pub h_ze: Option<f64>,
    pub h_ab: f64,
    pub c: f64,
    pub f: f64,
    pub neg_log_f: f64,
    pub lhs: f64,
    pub rhs_original: f64,
    pub rhs_refined: f64,
    pub slack_original: f64,
    pub slack_refined: f64,
}

impl From<&EurReport> for EurJson {
    fn from(r: &EurReport) -> Self {
        Self {
            relation: r.relation_id.as_str(),
            h_xb: r.h_xb,
            h_zb: r.h_zb,
            h_ze: r.h_ze,
            h_ab: r.h_ab,
            c: r.c,
            f: r.f,
            neg_log_f: r.reversal_penalty(),
            lhs: r.lhs,
            rhs_original: r.rhs_original,
            rhs_refined: r.rhs_refined,
            slack_original: r.slack_original,
            slack_refined: r.slack_refined,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub command: &'static str,
    pub scenario: String,
    pub name: String,
    pub tolerance: f64,
    pub pass: bool,
    pub report: EurJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzReport {
    pub command: &'static str,
    pub relation: &'static str,
    pub pvms: &'static str,
    pub trials: usize,
    pub dim: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub pass: bool,
    pub min_slack_original: f64,
    pub min_slack_refined: f64,
    pub max_refinement_excess: f64,
    pub worst_trial: usize,
    /// Seed of the worst trial's instance, for replay.
    pub worst_trial_seed: u64,
    pub worst_report: EurJson,
}

impl FuzzReport {
    pub fn new(s: &FuzzSummary, tolerance: f64, pass: bool) -> Self {
        Self {
            command: "fuzz",
            relation: s.config.relation.as_str(),
            pvms: s.config.pvms.as_str(),
            trials: s.config.trials,
            dim: s.config.dim_a,
            seed: s.config.seed,
            tolerance,
            pass,
            min_slack_original: s.min_slack_original,
            min_slack_refined: s.min_slack_refined,
            max_refinement_excess: s.max_refinement_excess,
            worst_trial: s.worst_trial,
            worst_trial_seed: s.worst_instance.seed,
            worst_report: EurJson::from(&s.worst_report),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OutcomeRow {
    pub outcome: String,
    pub count: u64,
    pub frequency: f64,
    pub stderr: f64,
    /// Exact probability under the simulated model.
    pub probability: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableJson {
    pub label: String,
    pub shots: u64,
    pub rows: Vec<OutcomeRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NoiseJson {
    pub depolarizing: f64,
    pub readout: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub command: &'static str,
    pub id: u8,
    pub shots: u64,
    pub seed: u64,
    pub rng: &'static str,
    pub noise: NoiseJson,
    pub tables: Vec<TableJson>,
    pub bloch: Option<[f64; 3]>,
    pub exact_fidelity: f64,
    pub estimated_fidelity: Option<Estimate>,
    /// Exact output state, rows of `[re, im]`.
    pub output_state: Vec<Vec<[f64; 2]>>,
}

pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

impl ExperimentReport {
    pub fn new(r: &ExperimentResult, exact_fidelity: f64) -> Self {
        let tables = r
            .tables
            .iter()
            .zip(&r.probabilities)
            .map(|(t, probs)| TableJson {
                label: t.label.clone(),
                shots: t.shots,
                rows: t
                    .outcomes
                    .iter()
                    .zip(t.frequencies().iter().zip(t.stderrs()))
                    .zip(t.counts.iter().zip(probs))
                    .map(|((o, (&f, se)), (&count, &p))| OutcomeRow {
                        outcome: o.clone(),
                        count,
                        frequency: f,
                        stderr: se,
                        probability: p,
                    })
                    .collect(),
            })
            .collect();
        Self {
            command: "experiment",
            id: r.id,
            shots: r.shots,
            seed: r.seed,
            rng: r.rng,
            noise: NoiseJson {
                depolarizing: r.noise.depolarizing_p,
                readout: r.noise.readout_flip,
            },
            tables,
            bloch: r.bloch,
            exact_fidelity,
            estimated_fidelity: r
                .estimated_fidelity()
                .map(|(value, stderr)| Estimate { value, stderr }),
            output_state: matrix_rows(r.output_state.matrix()),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn table_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        format!("{}\n", parts.join("  ").trim_end())
    };
    let mut out = line(&mut header.iter().copied());
    for r in rows {
        out.push_str(&line(&mut r.iter().map(String::as_str)));
    }
    out
}

fn render(format: Format, header: &[&str], rows: &[Vec<String>]) -> String {
    match format {
        Format::Csv => csv_string(header, rows),
        _ => table_string(header, rows),
    }
}

/// Shortest round-trip form, scientific outside `[1e-4, 1e15)`.
fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn render_examples(r: &ExamplesReport, format: Format) -> String {
    if format == Format::Json {
        return to_json(r);
    }
    let header = [
        "case",
        "quantity",
        "expected",
        "computed",
        "residual",
        "class",
        "tolerance",
        "pass",
    ];
    let rows: Vec<Vec<String>> = r
        .rows
        .iter()
        .map(|row| {
            vec![
                row.case.to_string(),
                row.quantity.clone(),
                num(row.expected),
                num(row.computed),
                num(row.residual),
                row.class.to_string(),
                num(row.tolerance),
                row.pass.to_string(),
            ]
        })
        .collect();
    render(format, &header, &rows)
}

const EUR_HEADER: [&str; 13] = [
    "relation",
    "h_xb",
    "h_zb",
    "h_ze",
    "h_ab",
    "c",
    "f",
    "neg_log_f",
    "lhs",
    "rhs_original",
    "rhs_refined",
    "slack_original",
    "slack_refined",
];

fn eur_cells(e: &EurJson) -> Vec<String> {
    vec![
        e.relation.to_string(),
        num(e.h_xb),
        num(e.h_zb),
        opt(e.h_ze),
        num(e.h_ab),
        num(e.c),
        num(e.f),
        num(e.neg_log_f),
        num(e.lhs),
        num(e.rhs_original),
        num(e.rhs_refined),
        num(e.slack_original),
        num(e.slack_refined),
    ]
}

pub fn render_check(r: &CheckReport, format: Format) -> String {
    match format {
        Format::Json => to_json(r),
        Format::Csv => {
            let mut header = vec!["name", "tolerance", "pass"];
            header.extend(EUR_HEADER);
            let mut cells = vec![r.name.clone(), num(r.tolerance), r.pass.to_string()];
            cells.extend(eur_cells(&r.report));
            csv_string(&header, &[cells])
        }
        Format::Table => {
            let mut rows = vec![
                vec!["name".to_string(), r.name.clone()],
                vec!["tolerance".to_string(), num(r.tolerance)],
                vec!["pass".to_string(), r.pass.to_string()],
            ];
            rows.extend(
                EUR_HEADER
                    .iter()
                    .zip(eur_cells(&r.report))
                    .map(|(k, v)| vec![k.to_string(), v]),
            );
            table_string(&["field", "value"], &rows)
        }
    }
}

pub fn render_fuzz(r: &FuzzReport, format: Format) -> String {
    let fields = [
        ("relation", r.relation.to_string()),
        ("pvms", r.pvms.to_string()),
        ("trials", r.trials.to_string()),
        ("dim", r.dim.to_string()),
        ("seed", r.seed.to_string()),
        ("tolerance", num(r.tolerance)),
        ("pass", r.pass.to_string()),
        ("min_slack_original", num(r.min_slack_original)),
        ("min_slack_refined", num(r.min_slack_refined)),
        ("max_refinement_excess", num(r.max_refinement_excess)),
        ("worst_trial", r.worst_trial.to_string()),
        ("worst_trial_seed", r.worst_trial_seed.to_string()),
    ];
    match format {
        Format::Json => to_json(r),
        Format::Csv => {
            let header: Vec<&str> = fields.iter().map(|f| f.0).collect();
            let cells: Vec<String> = fields.iter().map(|f| f.1.clone()).collect();
            csv_string(&header, &[cells])
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = fields
                .iter()
                .map(|(k, v)| vec![k.to_string(), v.clone()])
                .collect();
            table_string(&["field", "value"], &rows)
        }
    }
}

pub fn render_experiment(r: &ExperimentReport, format: Format) -> String {
    if format == Format::Json {
        return to_json(r);
    }
    let header = ["table", "outcome", "count", "frequency", "stderr"];
    let rows: Vec<Vec<String>> = r
        .tables
        .iter()
        .flat_map(|t| {
            t.rows.iter().map(move |row| {
                vec![
                    t.label.clone(),
                    row.outcome.clone(),
                    row.count.to_string(),
                    num(row.frequency),
                    num(row.stderr),
                ]
            })
        })
        .collect();
    let mut out = render(format, &header, &rows);
    if format == Format::Table {
        if let Some([x, y, z]) = r.bloch {
            out.push_str(&format!("bloch  ({x}, {y}, {z})\n"));
        }
        out.push_str(&format!("exact_fidelity  {}\n", r.exact_fidelity));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_aligns_columns() {
        let t = table_string(
            &["a", "long"],
            &[
                vec!["xyz".into(), "1".into()],
                vec!["q".into(), "22".into()],
            ],
        );
        assert_eq!(t, "a    long\nxyz  1\nq    22\n");
    }

    #[test]
    fn csv_quotes_when_needed() {
        let s = csv_string(&["k"], &[vec!["a,b".into()]]);
        assert_eq!(s, "k\n\"a,b\"\n");
    }

    #[test]
    fn small_numbers_use_exponents() {
        assert_eq!(num(2.5e-15), "2.5e-15");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-1.0), "-1");
    }

    #[test]
    fn json_round_trips_floats() {
        let x: f64 = 0.1 + 0.2;
        let back: f64 = serde_json::from_str(&to_json(&x)).unwrap();
        assert_eq!(back.to_bits(), x.to_bits());
    }
}
