//! Report envelopes and their CSV renderings.

use serde::{Deserialize, Serialize};
use threshold_core::dyadic_lift::{LiftReport, PoincareTrend};
use threshold_core::measure_family::{FamilyValidation, SStar};
use threshold_core::monte_carlo::Estimate;
use threshold_core::threshold_analysis::{PairSummary, RemarkCheck, SweepResult, ThresholdCheck, Window};
use threshold_core::{Inequality, PointReport, Status};

use crate::config::{Command, Defaults, RunConfig};
use crate::error::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub config: RunConfig,
    pub defaults: Defaults,
    pub family_validation: FamilyValidation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub metadata: Metadata,
    pub status: Status,
    pub result: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOutput {
    pub point: PointReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowOutcome {
    pub epsilon: f64,
    pub window: Option<Window>,
    /// Set when the curve does not cross `ε` or `1 − ε` on the grid.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub mode: String,
    pub grid_points: usize,
    pub resolution: f64,
    pub gamma_star: f64,
    pub eta_star: f64,
    pub s_star: SStar,
    pub pairs: PairSummary,
    pub windows: Vec<WindowOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub summary: SweepSummary,
    pub sweep: SweepResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftOutput {
    pub lift: LiftReport,
    pub trend: PoincareTrend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub grid_points: usize,
    pub resolution: f64,
    pub threshold: ThresholdCheck,
    pub remark: RemarkCheck,
    pub pairs: PairSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McOutput {
    pub t: f64,
    pub measure: Estimate,
    pub pivotal: Vec<Estimate>,
    /// Largest pivotal estimate.
    pub gamma_t: f64,
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Vacuous => "vacuous",
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new(header: &[&str]) -> Result<Self, LabError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).map_err(out_err)?;
        Ok(Self { writer })
    }

    fn row(&mut self, cells: Vec<String>) -> Result<(), LabError> {
        self.writer.write_record(cells).map_err(out_err)
    }

    fn finish(self) -> Result<String, LabError> {
        let bytes = self.writer.into_inner().map_err(|e| LabError::Output(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| LabError::Output(e.to_string()))
    }
}

fn out_err(e: csv::Error) -> LabError {
    LabError::Output(e.to_string())
}

/// CSV rendering of a command result.
pub trait Tabular {
    fn to_csv(&self) -> Result<String, LabError>;
}

impl Tabular for AnalyzeOutput {
    /// One row; `influence_j` and `pivotal_j` columns follow the scalars.
    fn to_csv(&self) -> Result<String, LabError> {
        let p = &self.point;
        let n = p.influences.len();
        let mut header: Vec<String> = [
            "t",
            "nu",
            "variance",
            "total_influence",
            "gamma_t",
            "gamma_t_star",
            "derivative",
            "s_t_star",
            "russo_lower_bound",
            "russo_status",
            "disj_residual",
            "disj_status",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        header.extend((0..n).map(|j| format!("influence_{j}")));
        header.extend((0..n).map(|j| format!("pivotal_{j}")));
        let refs: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut table = Table::new(&refs)?;
        let mut row = vec![
            p.t.to_string(),
            p.nu.to_string(),
            p.variance.to_string(),
            p.total_influence.to_string(),
            p.gamma_t.to_string(),
            p.gamma_t_star.to_string(),
            p.derivative.to_string(),
            p.s_t_star.to_string(),
            p.russo_lower_bound.to_string(),
            status_str(p.russo_status).into(),
            opt(p.disj_residual),
            status_str(p.disj_status).into(),
        ];
        row.extend(p.influences.iter().chain(&p.pivotal).map(f64::to_string));
        table.row(row)?;
        table.finish()
    }
}

impl Tabular for SweepOutput {
    /// One row per grid point. Exact-only columns are empty in Monte Carlo
    /// mode and the interval columns are empty in exact mode.
    fn to_csv(&self) -> Result<String, LabError> {
        let mut table = Table::new(&[
            "t",
            "nu",
            "nu_lo",
            "nu_hi",
            "gamma_t",
            "gamma_t_star",
            "s_t_star",
            "variance",
            "total_influence",
            "derivative",
            "russo_status",
            "disj_status",
        ])?;
        for p in &self.sweep.points {
            let exact = p.report.as_ref();
            let ci = p.estimates.as_ref().map(|e| e.nu.ci);
            table.row(vec![
                p.t.to_string(),
                p.nu.to_string(),
                opt(ci.map(|c| c.lo)),
                opt(ci.map(|c| c.hi)),
                p.gamma_t.to_string(),
                p.gamma_t_star.to_string(),
                p.s_t_star.to_string(),
                opt(exact.map(|r| r.variance)),
                opt(exact.map(|r| r.total_influence)),
                opt(exact.map(|r| r.derivative)),
                exact.map(|r| status_str(r.russo_status)).unwrap_or_default().into(),
                exact.map(|r| status_str(r.disj_status)).unwrap_or_default().into(),
            ])?;
        }
        table.finish()
    }
}

impl Tabular for LiftOutput {
    /// One row per digit depth `1..=m`.
    fn to_csv(&self) -> Result<String, LabError> {
        let mut table = Table::new(&[
            "m",
            "m1",
            "m2",
            "variance",
            "variance_gap",
            "fs_lower",
            "fs_residual",
            "fs_status",
        ])?;
        for s in &self.trend.steps {
            table.row(vec![
                s.m.to_string(),
                s.m1.to_string(),
                s.m2.to_string(),
                s.variance.to_string(),
                s.variance_gap.to_string(),
                s.check.lower.to_string(),
                s.check.residual.to_string(),
                status_str(s.check.status).into(),
            ])?;
        }
        table.finish()
    }
}

impl Tabular for VerifyOutput {
    /// One row per inequality.
    fn to_csv(&self) -> Result<String, LabError> {
        let mut table = Table::new(&["check", "t1", "t2", "lower", "upper", "residual", "status"])?;
        let (t1, t2) = (self.threshold.t1, self.threshold.t2);
        let mut add = |name: &str, a: f64, b: f64, c: &Inequality| {
            table.row(vec![
                name.into(),
                a.to_string(),
                b.to_string(),
                c.lower.to_string(),
                c.upper.to_string(),
                c.residual.to_string(),
                status_str(c.status).into(),
            ])
        };
        add("threshold_bound", t1, t2, &self.threshold.check)?;
        add("remark_gamma_vs_eta", t1, t2, &self.remark.gamma_vs_eta)?;
        add("remark_eta_chain", t1, t2, &self.remark.eta_chain)?;
        add("remark_lhs_vs_eta", t1, t2, &self.remark.lhs_vs_eta)?;
        if let Some(w) = self.pairs.worst {
            add("worst_pair", w.t1, w.t2, &w.check)?;
        }
        table.finish()
    }
}

impl Tabular for McOutput {
    /// One row per estimate.
    fn to_csv(&self) -> Result<String, LabError> {
        let mut table = Table::new(&[
            "quantity",
            "coord",
            "t",
            "value",
            "std_error",
            "ci_lo",
            "ci_hi",
            "level",
            "samples",
            "successes",
            "seed",
            "substream",
        ])?;
        let rows = std::iter::once(("measure", None, &self.measure))
            .chain(self.pivotal.iter().enumerate().map(|(j, e)| ("pivotal", Some(j), e)));
        for (name, coord, e) in rows {
            table.row(vec![
                name.into(),
                coord.map(|j| j.to_string()).unwrap_or_default(),
                self.t.to_string(),
                e.value.to_string(),
                e.std_error.to_string(),
                e.ci.lo.to_string(),
                e.ci.hi.to_string(),
                e.ci.level.to_string(),
                e.samples.to_string(),
                e.successes.to_string(),
                e.seed.to_string(),
                format!("{:016x}", e.substream.key),
            ])?;
        }
        table.finish()
    }
}
