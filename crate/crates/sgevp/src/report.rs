//! Output documents: JSON run traces, convergence and summary CSVs, and a
//! small SVG line plot.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sgevp_core::SolveTrace;

use crate::error::{CliError, CliResult};
use crate::run::{DatasetRecord, RunConfig, SolverKind};

pub const TRACE_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub t: usize,
    pub f: f64,
    pub r_t: f64,
    pub denom: f64,
    pub secs: f64,
    #[serde(rename = "B")]
    pub working_set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalRow {
    pub x: Vec<f64>,
    pub f: f64,
    pub reason: String,
}

/// One solver run, as written by `solve` and `bench`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub schema: u32,
    pub solver: SolverKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub s: usize,
    pub config: RunConfig,
    pub dataset: DatasetRecord,
    pub iterations: Vec<IterationRow>,
    #[serde(rename = "final")]
    pub final_state: FinalRow,
}

impl TraceDocument {
    pub fn new(config: &RunConfig, dataset: &DatasetRecord, s: usize, trace: &SolveTrace) -> Self {
        let iterations = trace
            .iterations
            .iter()
            .map(|r| IterationRow {
                t: r.t,
                f: r.objective,
                r_t: r.relative_decrease,
                denom: r.denominator,
                secs: r.seconds,
                working_set: r.working_set.clone(),
            })
            .collect();
        TraceDocument {
            schema: TRACE_SCHEMA,
            solver: config.solver,
            label: config.label().map(String::from),
            s,
            config: config.clone(),
            dataset: dataset.clone(),
            iterations,
            final_state: FinalRow { x: trace.x.clone(), f: trace.objective, reason: trace.termination.as_str().into() },
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("trace documents serialize");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> CliResult<Self> {
        let doc: TraceDocument = serde_json::from_slice(bytes).map_err(|e| CliError::Solution(e.to_string()))?;
        if doc.schema != TRACE_SCHEMA {
            return Err(CliError::Solution(format!("unsupported schema {}", doc.schema)));
        }
        Ok(doc)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&bytes)
    }
}

/// `iter,seconds,objective` per record.
pub fn convergence_csv(trace: &SolveTrace) -> Vec<u8> {
    let mut out = String::from("iter,seconds,objective\n");
    for r in &trace.iterations {
        writeln!(out, "{},{},{}", r.t, r.seconds, r.objective).expect("write to String");
    }
    out.into_bytes()
}

/// Final state of one (solver, s) run.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub solver: SolverKind,
    pub s: usize,
    pub objective: f64,
    pub iterations: usize,
    pub seconds: f64,
    pub termination: &'static str,
}

pub fn summary_csv(rows: &[SummaryRow]) -> Vec<u8> {
    let mut out = String::from("solver,s,objective,iterations,seconds,termination\n");
    for r in rows {
        writeln!(out, "{},{},{},{},{},{}", r.solver.name(), r.s, r.objective, r.iterations, r.seconds, r.termination)
            .expect("write to String");
    }
    out.into_bytes()
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

/// Objective against sparsity, one polyline per solver.
pub fn objective_svg(rows: &[SummaryRow], title: &str) -> String {
    let (w, h, margin) = (640.0, 420.0, 60.0);
    let mut solvers: Vec<SolverKind> = Vec::new();
    for r in rows {
        if !solvers.contains(&r.solver) {
            solvers.push(r.solver);
        }
    }
    let finite = rows.iter().filter(|r| r.objective.is_finite());
    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for r in finite {
        x_lo = x_lo.min(r.s as f64);
        x_hi = x_hi.max(r.s as f64);
        y_lo = y_lo.min(r.objective);
        y_hi = y_hi.max(r.objective);
    }
    if !x_lo.is_finite() {
        (x_lo, x_hi, y_lo, y_hi) = (0.0, 1.0, 0.0, 1.0);
    }
    if x_hi == x_lo {
        x_hi = x_lo + 1.0;
    }
    if y_hi == y_lo {
        y_hi = y_lo + 1.0;
    }
    let px = |s: f64| margin + (s - x_lo) / (x_hi - x_lo) * (w - 2.0 * margin);
    let py = |f: f64| h - margin - (f - y_lo) / (y_hi - y_lo) * (h - 2.0 * margin);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        svg,
        r#"<path d="M{m} {t} L{m} {b} L{r} {b}" stroke="black" fill="none"/>"#,
        m = margin,
        t = margin,
        b = h - margin,
        r = w - margin
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">s</text>"#, w / 2.0, h - 15.0);
    for (label, y) in [(y_hi, margin), (y_lo, h - margin)] {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="11">{label:.4}</text>"#, margin - 5.0, y + 4.0);
    }
    for (label, x) in [(x_lo, px(x_lo)), (x_hi, px(x_hi))] {
        let _ = writeln!(svg, r#"<text x="{x}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">{label}</text>"#, h - margin + 16.0);
    }
    for (n, solver) in solvers.iter().enumerate() {
        let color = PALETTE[n % PALETTE.len()];
        let mut pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.solver == *solver && r.objective.is_finite())
            .map(|r| (r.s as f64, r.objective))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let points: Vec<String> = pts.iter().map(|&(s, f)| format!("{:.2},{:.2}", px(s), py(f))).collect();
        let _ = writeln!(svg, r#"<polyline points="{}" stroke="{color}" stroke-width="2" fill="none"/>"#, points.join(" "));
        let ly = margin + 16.0 * n as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{ly}" font-family="sans-serif" font-size="12" fill="{color}">{}</text>"#,
            w - margin - 60.0,
            solver.name()
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
