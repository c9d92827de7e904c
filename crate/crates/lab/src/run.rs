//! Command execution.

use rayon::prelude::*;
use serde::Serialize;
use threshold_core::dyadic_lift::{lift_report, verify_modified_poincare};
use threshold_core::measure_family::validate_family;
use threshold_core::monte_carlo::{CoupledEstimator, CurveTally, Estimate, Estimator, McConfig, Tally, Target};
use threshold_core::product_space::find_monotone_violation;
use threshold_core::threshold_analysis::{
    check_grid, exact_point, pairs_from, threshold_window, uniform_grid, verify_all_pairs, verify_remark_bound,
    verify_threshold_bound, McPoint, PairSelection, PairSummary, SweepPoint, SweepResult,
};
use threshold_core::{ExactEngine, IncreasingEvent, MeasureFamily, Status};

use crate::config::{Command, Defaults, Format, RunConfig};
use crate::error::{InModule, LabError};
use crate::formats::{read_json, EventSpec, FamilySpec};
use crate::report::{
    AnalyzeOutput, LiftOutput, McOutput, Metadata, Report, SweepOutput, SweepSummary, Tabular, VerifyOutput,
    WindowOutcome,
};

/// Rendered output plus the verdict that decides the exit status.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub body: String,
    pub summary: String,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.status.is_fail() {
            2
        } else {
            0
        }
    }
}

struct Inputs {
    event: IncreasingEvent,
    family: MeasureFamily,
    metadata: Metadata,
}

fn load(config: &RunConfig) -> Result<Inputs, LabError> {
    let event_spec: EventSpec = read_json(&config.event)?;
    let family_spec: FamilySpec = read_json(&config.family)?;
    let event = event_spec.build().in_module("product_space")?;
    let family = family_spec.build().in_module("measure_family")?;
    if event.r() != family.r() {
        return Err(LabError::Validation {
            module: "product_space",
            message: format!("event has r={} but the family has r={}", event.r(), family.r()),
        });
    }
    let validation = validate_family(&family, config.grid_points);
    if !validation.passed() {
        let failed: Vec<String> = [
            &validation.pmf_valid,
            &validation.tails_strictly_increasing,
            &validation.lower_limit,
            &validation.upper_limit,
        ]
        .iter()
        .filter_map(|c| c.detail.clone())
        .collect();
        return Err(LabError::Validation {
            module: "measure_family",
            message: format!("family hypotheses fail: {}", failed.join("; ")),
        });
    }
    if event_spec.is_table() && !config.unchecked {
        if let Some(v) = find_monotone_violation(&event, config.cap).in_module("product_space")? {
            return Err(LabError::Validation {
                module: "product_space",
                message: format!(
                    "event is not increasing: raising coordinate {} of {:?} leaves it",
                    v.coord,
                    v.config.levels()
                ),
            });
        }
    }
    let metadata = Metadata {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: config.command,
        config: config.clone(),
        defaults: Defaults::default(),
        family_validation: validation,
    };
    Ok(Inputs {
        event,
        family,
        metadata,
    })
}

pub fn run(config: &RunConfig) -> Result<Outcome, LabError> {
    config.validate()?;
    let inputs = load(config)?;
    match config.command {
        Command::Analyze => analyze(config, inputs),
        Command::Sweep => sweep_cmd(config, inputs),
        Command::Lift => lift(config, inputs),
        Command::Verify => verify(config, inputs),
        Command::Mc => mc(config, inputs),
    }
}

fn render<T: Serialize + Tabular>(
    config: &RunConfig,
    metadata: Metadata,
    status: Status,
    result: T,
    summary: String,
) -> Result<Outcome, LabError> {
    let body = match config.format {
        Format::Csv => result.to_csv()?,
        Format::Json => {
            let report = Report {
                metadata,
                status,
                result,
            };
            let mut s = serde_json::to_string_pretty(&report).map_err(|e| LabError::Output(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    Ok(Outcome { status, body, summary })
}

fn required(v: Option<f64>, name: &str) -> Result<f64, LabError> {
    v.ok_or_else(|| LabError::Usage(format!("--{name} is required")))
}

fn analyze(config: &RunConfig, inputs: Inputs) -> Result<Outcome, LabError> {
    let t = required(config.t, "t")?;
    let engine = ExactEngine::new(&inputs.event, config.cap).in_module("exact_engine")?;
    let point = engine
        .point_report(&inputs.family, t, &config.tolerances)
        .in_module("exact_engine")?;
    let status = point.status();
    let summary = format!(
        "analyze t={t}: nu={:.6} I={:.6} gamma={:.6} derivative={:.6}; russo {:?}, variance bound {:?}",
        point.nu, point.total_influence, point.gamma_t, point.derivative, point.russo_status, point.disj_status
    );
    render(config, inputs.metadata, status, AnalyzeOutput { point }, summary)
}

fn mc_config(config: &RunConfig) -> McConfig {
    McConfig {
        samples: config.samples,
        seed: config.seed,
        level: config.confidence_level,
        ..McConfig::default()
    }
}

/// Runs every block in parallel and merges the tallies.
pub fn run_estimator(est: &Estimator<'_>) -> threshold_core::Result<Estimate> {
    let tallies: Vec<Tally> = (0..est.config().blocks())
        .into_par_iter()
        .map(|b| est.run_block(b))
        .collect();
    est.finish(tallies.into_iter().fold(Tally::default(), Tally::merge))
}

fn exact_points(
    event: &IncreasingEvent,
    family: &MeasureFamily,
    grid: &[f64],
    config: &RunConfig,
) -> Result<Vec<SweepPoint>, LabError> {
    let engine = ExactEngine::new(event, config.cap).in_module("exact_engine")?;
    grid.par_iter()
        .map(|&t| exact_point(&engine, family, t, &config.tolerances))
        .collect::<threshold_core::Result<Vec<_>>>()
        .in_module("exact_engine")
}

fn mc_points(
    event: &IncreasingEvent,
    family: &MeasureFamily,
    grid: &[f64],
    config: &RunConfig,
) -> Result<Vec<SweepPoint>, LabError> {
    let mc = mc_config(config);
    let coupled = CoupledEstimator::new(event, family, grid, mc).in_module("monte_carlo")?;
    let tallies: Vec<CurveTally> = (0..mc.blocks())
        .into_par_iter()
        .map(|b| coupled.run_block(b))
        .collect();
    let curve = coupled
        .finish(tallies.into_iter().fold(CurveTally::default(), CurveTally::merge))
        .in_module("monte_carlo")?;
    let n = event.n();
    let pivotal: Vec<Estimate> = (0..grid.len() * n)
        .into_par_iter()
        .map(|k| {
            let est = Estimator::new(event, family, grid[k / n], Target::Pivotal(k % n), mc)?;
            est.run()
        })
        .collect::<threshold_core::Result<Vec<_>>>()
        .in_module("monte_carlo")?;
    grid.iter()
        .zip(curve.estimates)
        .zip(pivotal.chunks(n))
        .map(|((&t, nu), piv)| {
            let s = family.pmf_at(t).in_module("measure_family")?.s_star();
            Ok(SweepPoint::from_estimates(
                t,
                s,
                McPoint {
                    nu,
                    pivotal: piv.to_vec(),
                },
            ))
        })
        .collect()
}

fn build_sweep(
    inputs: &Inputs,
    grid: &[f64],
    config: &RunConfig,
    monte_carlo: bool,
) -> Result<SweepResult, LabError> {
    check_grid(&inputs.family, grid).in_module("threshold_analysis")?;
    let points = if monte_carlo {
        mc_points(&inputs.event, &inputs.family, grid, config)?
    } else {
        exact_points(&inputs.event, &inputs.family, grid, config)?
    };
    SweepResult::assemble(&inputs.family, points, &config.tolerances).in_module("threshold_analysis")
}

fn check_pairs(sweep: &SweepResult, config: &RunConfig) -> PairSummary {
    match config.pairs {
        Some(count) => verify_all_pairs(
            sweep,
            PairSelection::Sampled {
                count,
                seed: config.seed,
            },
            &config.tolerances,
        ),
        None => {
            let parts: Vec<PairSummary> = (0..sweep.grid.len())
                .into_par_iter()
                .map(|i| pairs_from(sweep, i, &config.tolerances))
                .collect();
            parts.into_iter().fold(PairSummary::default(), PairSummary::merge)
        }
    }
}

fn default_grid(family: &MeasureFamily, points: usize) -> Vec<f64> {
    let (a, b) = family.interval();
    (0..points)
        .map(|i| a + (b - a) * (i + 1) as f64 / (points + 1) as f64)
        .collect()
}

fn sweep_cmd(config: &RunConfig, inputs: Inputs) -> Result<Outcome, LabError> {
    let grid = match (config.t1, config.t2) {
        (Some(a), Some(b)) => uniform_grid(a, b, config.grid_points).in_module("threshold_analysis")?,
        _ => default_grid(&inputs.family, config.grid_points),
    };
    let sweep = build_sweep(&inputs, &grid, config, config.monte_carlo_sweep)?;
    let pairs = check_pairs(&sweep, config);
    let windows: Vec<WindowOutcome> = config
        .epsilon
        .iter()
        .map(|&epsilon| match threshold_window(&sweep, epsilon, &config.tolerances) {
            Ok(w) => WindowOutcome {
                epsilon,
                window: Some(w),
                error: None,
            },
            Err(e) => WindowOutcome {
                epsilon,
                window: None,
                error: Some(format!("threshold_analysis: {e}")),
            },
        })
        .collect();
    // sampled sweeps only report the checks; noise must not read as a violation
    let status = if config.monte_carlo_sweep {
        Status::Vacuous
    } else {
        sweep
            .points
            .iter()
            .filter_map(|p| p.report.as_ref())
            .fold(pairs.status, |acc, r| acc.and(r.status()))
            .and(
                windows
                    .iter()
                    .filter_map(|w| w.window.and_then(|w| w.check))
                    .fold(Status::Vacuous, |acc, c| acc.and(c.status)),
            )
    };
    let mut summary = format!(
        "sweep over {} points: gamma_*={:.6} eta_*={:.6} S*={:.6}; {} pairs, {} failures",
        sweep.grid.len(),
        sweep.gamma_star,
        sweep.eta_star,
        sweep.s_star.value,
        pairs.checked,
        pairs.failures
    );
    for w in &windows {
        match (&w.window, &w.error) {
            (Some(win), _) => summary.push_str(&format!("; window(eps={}) width {:.6}", w.epsilon, win.width)),
            (None, Some(e)) => summary.push_str(&format!("; window(eps={}): {e}", w.epsilon)),
            _ => {}
        }
    }
    let out = SweepOutput {
        summary: SweepSummary {
            mode: if config.monte_carlo_sweep { "monte_carlo" } else { "exact" }.into(),
            grid_points: sweep.grid.len(),
            resolution: sweep.resolution,
            gamma_star: sweep.gamma_star,
            eta_star: sweep.eta_star,
            s_star: sweep.s_star,
            pairs,
            windows,
        },
        sweep,
    };
    render(config, inputs.metadata, status, out, summary)
}

fn lift(config: &RunConfig, inputs: Inputs) -> Result<Outcome, LabError> {
    let t = required(config.t, "t")?;
    let tol = &config.tolerances;
    let lift = lift_report(&inputs.event, &inputs.family, t, config.m_digits, config.cap, tol).in_module("dyadic_lift")?;
    let trend = verify_modified_poincare(&inputs.event, &inputs.family, t, config.m_digits, config.cap, tol)
        .in_module("dyadic_lift")?;
    let status = lift.fs.status.and(lift.bounds_status()).and(trend.status);
    let summary = format!(
        "lift t={t} m={}: M1={:.6} M2={:.6} V={:.6}; modified Poincare {:?} (residual {:.3e}); lift bounds {:?}",
        config.m_digits,
        lift.m1,
        lift.m2,
        lift.variance,
        lift.fs.status,
        lift.fs.residual,
        lift.bounds_status()
    );
    render(config, inputs.metadata, status, LiftOutput { lift, trend }, summary)
}

fn verify(config: &RunConfig, inputs: Inputs) -> Result<Outcome, LabError> {
    let (t1, t2) = (required(config.t1, "t1")?, required(config.t2, "t2")?);
    let grid = if t1 == t2 {
        vec![t1]
    } else {
        uniform_grid(t1, t2, config.grid_points).in_module("threshold_analysis")?
    };
    let sweep = build_sweep(&inputs, &grid, config, false)?;
    let tol = &config.tolerances;
    let threshold = verify_threshold_bound(&sweep, t1, t2, tol).in_module("threshold_analysis")?;
    let remark = verify_remark_bound(&sweep, t1, t2, tol).in_module("threshold_analysis")?;
    let pairs = check_pairs(&sweep, config);
    let status = threshold.check.status.and(remark.status).and(pairs.status);
    let summary = format!(
        "verify [{t1}, {t2}]: LHS={:.6} RHS={:.6} residual={:.6} ({:?}); remark {:?}; {} pairs, {} failures",
        threshold.lhs,
        threshold.rhs,
        threshold.check.residual,
        threshold.check.status,
        remark.status,
        pairs.checked,
        pairs.failures
    );
    let out = VerifyOutput {
        grid_points: sweep.grid.len(),
        resolution: sweep.resolution,
        threshold,
        remark,
        pairs,
    };
    render(config, inputs.metadata, status, out, summary)
}

fn mc(config: &RunConfig, inputs: Inputs) -> Result<Outcome, LabError> {
    let t = required(config.t, "t")?;
    let mc = mc_config(config);
    let (event, family) = (&inputs.event, &inputs.family);
    let measure = Estimator::new(event, family, t, Target::Measure, mc)
        .and_then(|e| run_estimator(&e))
        .in_module("monte_carlo")?;
    let pivotal = (0..event.n())
        .map(|j| Estimator::new(event, family, t, Target::Pivotal(j), mc).and_then(|e| run_estimator(&e)))
        .collect::<threshold_core::Result<Vec<_>>>()
        .in_module("monte_carlo")?;
    let gamma_t = pivotal.iter().map(|e| e.value).fold(0.0, f64::max);
    let summary = format!(
        "mc t={t}: nu ~ {:.6} [{:.6}, {:.6}] at {}; gamma ~ {:.6}; {} samples, seed {}",
        measure.value, measure.ci.lo, measure.ci.hi, measure.ci.level, gamma_t, measure.samples, measure.seed
    );
    let out = McOutput {
        t,
        measure,
        pivotal,
        gamma_t,
    };
    render(config, inputs.metadata, Status::Pass, out, summary)
}
