//! Parameter sweeps, threshold bounds and window widths.

use alloc::format;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_engine::{check_alphabet, gamma_star, ExactEngine, PointReport};
use crate::measure_family::{MeasureFamily, SStar};
use crate::monte_carlo::{coupled_measure_curve, estimate_pivotal, Estimate, McConfig};
use crate::product_space::IncreasingEvent;
use crate::verdict::{Inequality, Status, Tolerances};

/// `points` equally spaced values from `a` to `b` inclusive.
pub fn uniform_grid(a: f64, b: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(a < b) {
        return Err(Error::InvalidArgument(format!(
            "grid needs at least 2 points and a < b (got {points} on [{a}, {b}])"
        )));
    }
    let step = (b - a) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i + 1 == points { b } else { a + step * i as f64 })
        .collect())
}

/// Grid strictly increasing and inside the family's open interval.
pub fn check_grid(family: &MeasureFamily, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument(format!(
            "grid not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    grid.iter().try_for_each(|&t| family.check_domain(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SweepMode {
    Exact,
    MonteCarlo(McConfig),
}

/// Sampled quantities at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McPoint {
    pub nu: Estimate,
    pub pivotal: Vec<Estimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub t: f64,
    pub nu: f64,
    pub gamma_t: f64,
    pub gamma_t_star: f64,
    pub s_t_star: f64,
    /// Present in exact mode.
    pub report: Option<PointReport>,
    /// Present in Monte Carlo mode.
    pub estimates: Option<McPoint>,
}

impl SweepPoint {
    pub fn from_report(report: PointReport) -> Self {
        Self {
            t: report.t,
            nu: report.nu,
            gamma_t: report.gamma_t,
            gamma_t_star: report.gamma_t_star,
            s_t_star: report.s_t_star,
            report: Some(report),
            estimates: None,
        }
    }

    pub fn from_estimates(t: f64, s_t_star: f64, estimates: McPoint) -> Self {
        let gamma_t = estimates.pivotal.iter().map(|e| e.value).fold(0.0, f64::max);
        Self {
            t,
            nu: estimates.nu.value,
            gamma_t,
            gamma_t_star: gamma_star(gamma_t),
            s_t_star,
            report: None,
            estimates: Some(estimates),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub grid: Vec<f64>,
    pub points: Vec<SweepPoint>,
    /// `sup_t γ_t*` over the grid.
    pub gamma_star: f64,
    /// `sup_t γ_t` over the grid.
    pub eta_star: f64,
    /// `min_{t,k} S_{t,k}` over the grid.
    pub s_star: SStar,
    /// Largest grid spacing.
    pub resolution: f64,
}

impl SweepResult {
    /// Collects per-point results, enforcing a nondecreasing curve.
    pub fn assemble(family: &MeasureFamily, points: Vec<SweepPoint>, tol: &Tolerances) -> Result<Self> {
        let grid: Vec<f64> = points.iter().map(|p| p.t).collect();
        check_grid(family, &grid)?;
        if let Some(w) = points.windows(2).find(|w| w[1].nu < w[0].nu - tol.curve) {
            return Err(Error::NonMonotoneCurve {
                t_before: w[0].t,
                t_after: w[1].t,
                before: w[0].nu,
                after: w[1].nu,
            });
        }
        let mut s_star = SStar {
            value: f64::INFINITY,
            t: grid[0],
            k: 2,
        };
        for &t in &grid {
            let snap = family.pmf_at(t)?;
            for k in 2..=snap.r() {
                if snap.s(k) < s_star.value {
                    s_star = SStar { value: snap.s(k), t, k };
                }
            }
        }
        Ok(Self {
            gamma_star: points.iter().map(|p| p.gamma_t_star).fold(0.0, f64::max),
            eta_star: points.iter().map(|p| p.gamma_t).fold(0.0, f64::max),
            resolution: grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max),
            s_star,
            grid,
            points,
        })
    }

    pub fn nu(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.nu).collect()
    }

    /// Index of a grid value, matched to within `1e-12`.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        self.grid
            .iter()
            .position(|&g| (g - t).abs() <= 1e-12 * f64::max(1.0, t.abs()))
            .ok_or_else(|| Error::InvalidArgument(format!("t={t} is not a grid point")))
    }

    fn subgrid(&self, i1: usize, i2: usize) -> (f64, f64, f64) {
        let pts = &self.points[i1..=i2];
        (
            pts.iter().map(|p| p.gamma_t_star).fold(0.0, f64::max),
            pts.iter().map(|p| p.s_t_star).fold(f64::INFINITY, f64::min),
            pts.iter().map(|p| p.gamma_t).fold(0.0, f64::max),
        )
    }
}

/// Exact per-point analysis for a sweep.
pub fn exact_point(engine: &ExactEngine, family: &MeasureFamily, t: f64, tol: &Tolerances) -> Result<SweepPoint> {
    Ok(SweepPoint::from_report(engine.point_report(family, t, tol)?))
}

pub fn sweep(
    event: &IncreasingEvent,
    family: &MeasureFamily,
    grid: &[f64],
    mode: SweepMode,
    cap: u64,
    tol: &Tolerances,
) -> Result<SweepResult> {
    check_alphabet(event.shape(), family)?;
    check_grid(family, grid)?;
    let points = match mode {
        SweepMode::Exact => {
            let engine = ExactEngine::new(event, cap)?;
            grid.iter()
                .map(|&t| exact_point(&engine, family, t, tol))
                .collect::<Result<Vec<_>>>()?
        }
        SweepMode::MonteCarlo(config) => {
            let curve = coupled_measure_curve(event, family, grid, config)?;
            grid.iter()
                .zip(curve.estimates)
                .map(|(&t, nu)| {
                    let pivotal = (0..event.n())
                        .map(|j| estimate_pivotal(event, family, t, j, config))
                        .collect::<Result<Vec<_>>>()?;
                    let s = family.pmf_at(t)?.s_star();
                    Ok(SweepPoint::from_estimates(t, s, McPoint { nu, pivotal }))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    SweepResult::assemble(family, points, tol)
}

/// `ν_{t1}(1 − ν_{t2}) ≤ γ_*^{S*(t2 − t1)}` with `γ_*`, `S*` over `[t1, t2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCheck {
    pub t1: f64,
    pub t2: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub gamma_star: f64,
    pub s_star: f64,
    pub check: Inequality,
    pub resolution: f64,
}

fn threshold_check(sweep: &SweepResult, i1: usize, i2: usize, gamma: f64, s: f64, tol: f64) -> ThresholdCheck {
    let (t1, t2) = (sweep.grid[i1], sweep.grid[i2]);
    let lhs = sweep.points[i1].nu * (1.0 - sweep.points[i2].nu);
    let (rhs, check) = if i1 == i2 {
        (1.0, Inequality::check(lhs, 1.0, tol))
    } else {
        let rhs = libm::pow(gamma, s * (t2 - t1));
        let informative = gamma > 0.0 && gamma < 1.0 && s > 0.0;
        let check = if informative {
            Inequality::check(lhs, rhs, tol)
        } else {
            Inequality::vacuous(lhs, rhs)
        };
        (rhs, check)
    };
    ThresholdCheck {
        t1,
        t2,
        lhs,
        rhs,
        gamma_star: gamma,
        s_star: s,
        check,
        resolution: sweep.resolution,
    }
}

pub fn verify_threshold_bound(sweep: &SweepResult, t1: f64, t2: f64, tol: &Tolerances) -> Result<ThresholdCheck> {
    let (i1, i2) = ordered_pair(sweep, t1, t2)?;
    let (gamma, s, _) = sweep.subgrid(i1, i2);
    Ok(threshold_check(sweep, i1, i2, gamma, s, tol.inequality))
}

fn ordered_pair(sweep: &SweepResult, t1: f64, t2: f64) -> Result<(usize, usize)> {
    let (i1, i2) = (sweep.index_of(t1)?, sweep.index_of(t2)?);
    if i1 > i2 {
        return Err(Error::InvalidArgument(format!("t1={t1} exceeds t2={t2}")));
    }
    Ok((i1, i2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairSelection {
    All,
    Sampled { count: usize, seed: u64 },
}

/// Aggregate over many `(t1, t2)` threshold checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSummary {
    pub checked: u64,
    pub failures: u64,
    pub vacuous: u64,
    /// Smallest residual among informative checks.
    pub worst: Option<ThresholdCheck>,
    pub status: Status,
}

impl Default for PairSummary {
    fn default() -> Self {
        Self {
            checked: 0,
            failures: 0,
            vacuous: 0,
            worst: None,
            status: Status::Vacuous,
        }
    }
}

impl PairSummary {
    pub fn record(&mut self, c: ThresholdCheck) {
        self.checked += 1;
        match c.check.status {
            Status::Fail => self.failures += 1,
            Status::Vacuous => {
                self.vacuous += 1;
                return;
            }
            Status::Pass => {}
        }
        self.status = self.status.and(c.check.status);
        if self.worst.is_none_or(|w| c.check.residual < w.check.residual) {
            self.worst = Some(c);
        }
    }

    /// Order-independent up to ties in the worst residual.
    pub fn merge(mut self, other: PairSummary) -> PairSummary {
        self.checked += other.checked;
        self.failures += other.failures;
        self.vacuous += other.vacuous;
        self.status = self.status.and(other.status);
        if let Some(w) = other.worst {
            if self.worst.is_none_or(|s| w.check.residual < s.check.residual) {
                self.worst = Some(w);
            }
        }
        self
    }
}

/// Every pair `(grid[i1], grid[i2])` with `i2 > i1`, in `O(G)` using
/// running extrema.
pub fn pairs_from(sweep: &SweepResult, i1: usize, tol: &Tolerances) -> PairSummary {
    let mut summary = PairSummary::default();
    let mut gamma = sweep.points[i1].gamma_t_star;
    let mut s = sweep.points[i1].s_t_star;
    for i2 in i1 + 1..sweep.points.len() {
        gamma = gamma.max(sweep.points[i2].gamma_t_star);
        s = s.min(sweep.points[i2].s_t_star);
        summary.record(threshold_check(sweep, i1, i2, gamma, s, tol.inequality));
    }
    summary
}

pub fn verify_all_pairs(sweep: &SweepResult, selection: PairSelection, tol: &Tolerances) -> PairSummary {
    let g = sweep.points.len();
    match selection {
        PairSelection::All => (0..g).map(|i1| pairs_from(sweep, i1, tol)).fold(PairSummary::default(), PairSummary::merge),
        PairSelection::Sampled { count, seed } => {
            let mut summary = PairSummary::default();
            if g < 2 {
                return summary;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let a = (rng.next_u64() % g as u64) as usize;
                let mut b = (rng.next_u64() % (g as u64 - 1)) as usize;
                if b >= a {
                    b += 1;
                }
                let (i1, i2) = (a.min(b), a.max(b));
                let (gamma, s, _) = sweep.subgrid(i1, i2);
                summary.record(threshold_check(sweep, i1, i2, gamma, s, tol.inequality));
            }
            summary
        }
    }
}

/// Calculus bounds for `η ∈ (0, 1)`: `(γ*(η), η^{1−1/e}, η^{1/2})`.
pub fn remark_chain(eta: f64) -> (f64, f64, f64) {
    (
        gamma_star(eta),
        libm::pow(eta, 1.0 - (-1.0f64).exp()),
        libm::sqrt(eta),
    )
}

/// `γ_* ≤ η_*^{1−1/e} ≤ η_*^{1/2}` and `ν_{t1}(1 − ν_{t2}) ≤ η_*^{S*(t2−t1)/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemarkCheck {
    pub t1: f64,
    pub t2: f64,
    pub eta_star: f64,
    pub gamma_star: f64,
    pub s_star: f64,
    pub gamma_vs_eta: Inequality,
    pub eta_chain: Inequality,
    pub lhs_vs_eta: Inequality,
    pub status: Status,
    pub resolution: f64,
}

pub fn verify_remark_bound(sweep: &SweepResult, t1: f64, t2: f64, tol: &Tolerances) -> Result<RemarkCheck> {
    let (i1, i2) = ordered_pair(sweep, t1, t2)?;
    let (gamma, s, eta) = sweep.subgrid(i1, i2);
    let lhs = sweep.points[i1].nu * (1.0 - sweep.points[i2].nu);
    let (_, eta_pow, eta_sqrt) = remark_chain(eta);
    let rhs = libm::pow(eta, 0.5 * s * (sweep.grid[i2] - sweep.grid[i1]));
    let (gamma_vs_eta, eta_chain, lhs_vs_eta) = if eta > 0.0 && eta < 1.0 {
        (
            Inequality::check(gamma, eta_pow, tol.remark),
            Inequality::check(eta_pow, eta_sqrt, tol.remark),
            if s > 0.0 || i1 == i2 {
                Inequality::check(lhs, rhs, tol.inequality)
            } else {
                Inequality::vacuous(lhs, rhs)
            },
        )
    } else {
        (
            Inequality::vacuous(gamma, eta_pow),
            Inequality::vacuous(eta_pow, eta_sqrt),
            Inequality::vacuous(lhs, rhs),
        )
    };
    Ok(RemarkCheck {
        t1: sweep.grid[i1],
        t2: sweep.grid[i2],
        eta_star: eta,
        gamma_star: gamma,
        s_star: s,
        status: gamma_vs_eta.status.and(eta_chain.status).and(lhs_vs_eta.status),
        gamma_vs_eta,
        eta_chain,
        lhs_vs_eta,
        resolution: sweep.resolution,
    })
}

/// Where the curve rises from `ε` to `1 − ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub epsilon: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub width: f64,
    /// `2 log(1/ε) / (S*·log(1/γ_*))`; absent unless `γ_* ∈ (0, 1)` and `S* > 0`.
    pub bound_ceiling: Option<f64>,
    /// `log(1/(ε(1−ε))) / (S*·log(1/γ_*))`; informational only.
    pub symmetric_ceiling: Option<f64>,
    pub gamma_star: f64,
    pub s_star: f64,
    pub resolution: f64,
    /// `width ≤ bound_ceiling + resolution`; absent with the ceiling.
    pub check: Option<Inequality>,
}

/// First interpolated crossing of `level`, and the index of the grid point
/// at or above it.
fn crossing(sweep: &SweepResult, level: f64) -> Result<(f64, usize)> {
    let nu = sweep.nu();
    let k = nu.iter().position(|&v| v >= level).ok_or(Error::NoCrossing { level })?;
    if k == 0 {
        if nu[0] == level {
            return Ok((sweep.grid[0], 0));
        }
        return Err(Error::NoCrossing { level });
    }
    let (t0, t1) = (sweep.grid[k - 1], sweep.grid[k]);
    let (v0, v1) = (nu[k - 1], nu[k]);
    Ok((t0 + (level - v0) / (v1 - v0) * (t1 - t0), k))
}

pub fn threshold_window(sweep: &SweepResult, epsilon: f64, tol: &Tolerances) -> Result<Window> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidArgument(format!("epsilon={epsilon} outside (0, 1/2)")));
    }
    let (t_lo, k_lo) = crossing(sweep, epsilon)?;
    let (t_hi, k_hi) = crossing(sweep, 1.0 - epsilon)?;
    let (gamma, s, _) = sweep.subgrid(k_lo.saturating_sub(1), k_hi);
    let width = t_hi - t_lo;
    let informative = gamma > 0.0 && gamma < 1.0 && s > 0.0;
    let scale = s * libm::log(1.0 / gamma);
    let bound_ceiling = informative.then(|| 2.0 * libm::log(1.0 / epsilon) / scale);
    let symmetric_ceiling = informative.then(|| libm::log(1.0 / (epsilon * (1.0 - epsilon))) / scale);
    let check = bound_ceiling.map(|c| Inequality::check(width, c + sweep.resolution, tol.inequality));
    Ok(Window {
        epsilon,
        t_lo,
        t_hi,
        width,
        bound_ceiling,
        symmetric_ceiling,
        gamma_star: gamma,
        s_star: s,
        resolution: sweep.resolution,
        check,
    })
}
