//! Parametrized measures `t ↦ μ_t` on `{1,…,r}`.
//!
//! A family is described by its tails `G_k(t) = μ_t({k,…,r})` for
//! `k = 2,…,r` (with `G_1 ≡ 1` and `G_{r+1} ≡ 0`) and their derivatives
//! `S_{t,k} = dG_k/dt`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack for the pmf invariants of a snapshot.
pub const PMF_TOLERANCE: f64 = 1e-12;
/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Default number of grid points for infima over `t`.
pub const DEFAULT_GRID_POINTS: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference { step: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    /// `G_k(t) = t` for every `k ≥ 2`: all mass on levels 1 and `r`.
    Embedded,
    /// `G_k(t) = t^{α_k}`.
    Power { alpha: Vec<f64> },
    Tabulated(TabulatedTails),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedTails {
    t: Vec<f64>,
    tails: Vec<Vec<f64>>,
    splines: Vec<MonotoneCubic>,
}

impl TabulatedTails {
    pub fn grid(&self) -> &[f64] {
        &self.t
    }

    /// Row `k − 2` holds `G_k` on the grid.
    pub fn tails(&self) -> &[Vec<f64>] {
        &self.tails
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureFamily {
    r: u32,
    a: f64,
    b: f64,
    kind: FamilyKind,
    derivative: DerivativeMode,
}

impl MeasureFamily {
    pub fn embedded(r: u32) -> Result<Self> {
        check_r(r)?;
        Ok(Self {
            r,
            a: 0.0,
            b: 1.0,
            kind: FamilyKind::Embedded,
            derivative: DerivativeMode::Analytic,
        })
    }

    /// `alpha[k − 2]` is the exponent of `G_k`. The family hypotheses need
    /// `α_2 ≤ … ≤ α_r`; this is checked by [`validate_family`], not here.
    pub fn power(alpha: Vec<f64>) -> Result<Self> {
        let r = u32::try_from(alpha.len() + 1)
            .map_err(|_| Error::InvalidArgument("too many exponents".into()))?;
        check_r(r)?;
        if let Some(bad) = alpha.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "power exponents must be positive and finite, got {bad}"
            )));
        }
        Ok(Self {
            r,
            a: 0.0,
            b: 1.0,
            kind: FamilyKind::Power { alpha },
            derivative: DerivativeMode::Analytic,
        })
    }

    /// Tails given on a grid, interpolated by monotone cubic Hermite splines
    /// and differentiated by central differences. The grid must cover
    /// `[a, b]`.
    pub fn tabulated(r: u32, interval: (f64, f64), t: Vec<f64>, tails: Vec<Vec<f64>>) -> Result<Self> {
        check_r(r)?;
        let (a, b) = interval;
        check_interval(a, b)?;
        if t.len() < 2 {
            return Err(Error::InvalidArgument("tabulated grid needs at least 2 points".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) || t.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("tabulated grid must be strictly increasing".into()));
        }
        if t[0] > a || t[t.len() - 1] < b {
            return Err(Error::InvalidArgument(format!(
                "tabulated grid [{}, {}] does not cover the interval [{a}, {b}]",
                t[0],
                t[t.len() - 1]
            )));
        }
        if tails.len() != r as usize - 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} tail rows (k = 2..={r}), got {}",
                r - 1,
                tails.len()
            )));
        }
        if let Some(row) = tails.iter().position(|row| row.len() != t.len()) {
            return Err(Error::InvalidArgument(format!(
                "tail row for k={} has {} values, grid has {}",
                row + 2,
                tails[row].len(),
                t.len()
            )));
        }
        let splines = tails.iter().map(|row| MonotoneCubic::new(&t, row)).collect();
        Ok(Self {
            r,
            a,
            b,
            kind: FamilyKind::Tabulated(TabulatedTails { t, tails, splines }),
            derivative: DerivativeMode::FiniteDifference {
                step: DEFAULT_FD_STEP,
            },
        })
    }

    pub fn with_derivative_mode(mut self, mode: DerivativeMode) -> Result<Self> {
        if let DerivativeMode::FiniteDifference { step } = mode {
            if !(step.is_finite() && step > 0.0) {
                return Err(Error::InvalidArgument(format!("finite-difference step {step} must be positive")));
            }
        } else if matches!(self.kind, FamilyKind::Tabulated(_)) {
            return Err(Error::InvalidArgument("tabulated families have no analytic derivative".into()));
        }
        self.derivative = mode;
        Ok(self)
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn derivative_mode(&self) -> DerivativeMode {
        self.derivative
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.a && t < self.b
    }

    pub fn check_domain(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::Domain {
                t,
                a: self.a,
                b: self.b,
            })
        }
    }

    /// `G_k(t)` for `k` in `1..=r+1`, with no domain check.
    pub fn tail(&self, k: u32, t: f64) -> f64 {
        if k <= 1 {
            return 1.0;
        }
        if k > self.r {
            return 0.0;
        }
        match &self.kind {
            FamilyKind::Embedded => t,
            FamilyKind::Power { alpha } => libm::pow(t, alpha[k as usize - 2]),
            FamilyKind::Tabulated(tab) => tab.splines[k as usize - 2].eval(t),
        }
    }

    /// `S_{t,k} = dG_k/dt`; zero for `k = 1` and `k = r + 1`.
    pub fn tail_derivative(&self, k: u32, t: f64) -> f64 {
        if k <= 1 || k > self.r {
            return 0.0;
        }
        match self.derivative {
            DerivativeMode::Analytic => match &self.kind {
                FamilyKind::Embedded => 1.0,
                FamilyKind::Power { alpha } => {
                    let a = alpha[k as usize - 2];
                    a * libm::pow(t, a - 1.0)
                }
                FamilyKind::Tabulated(_) => unreachable!("tabulated families use finite differences"),
            },
            DerivativeMode::FiniteDifference { step } => self.tail_difference(k, t, step),
        }
    }

    /// Central difference of `G_k` at `t`, one-sided when the stencil would
    /// leave `(a, b)`.
    pub fn tail_difference(&self, k: u32, t: f64, h: f64) -> f64 {
        let g = |s: f64| self.tail(k, s);
        if t - h <= self.a {
            (g(t + h) - g(t)) / h
        } else if t + h >= self.b {
            (g(t) - g(t - h)) / h
        } else {
            central_difference(g, t, h)
        }
    }

    pub fn pmf_at(&self, t: f64) -> Result<PmfSnapshot> {
        self.check_domain(t)?;
        let r = self.r;
        let tails: Vec<f64> = (2..=r).map(|k| self.tail(k, t)).collect();
        let tail_derivatives: Vec<f64> = (2..=r).map(|k| self.tail_derivative(k, t)).collect();
        let g = |k: u32| match k {
            0 | 1 => 1.0,
            k if k > r => 0.0,
            k => tails[k as usize - 2],
        };
        let probs: Vec<f64> = (1..=r).map(|k| g(k) - g(k + 1)).collect();
        let snapshot = PmfSnapshot {
            t,
            probs,
            tails,
            tail_derivatives,
        };
        snapshot.validate()?;
        Ok(snapshot)
    }

    /// Minimum of `S_{t,k}` over `k ≥ 2` and a uniform grid on `[t1, t2]`.
    pub fn s_star_over(&self, t1: f64, t2: f64, grid_points: usize) -> Result<SStar> {
        self.check_domain(t1)?;
        self.check_domain(t2)?;
        if t1 > t2 {
            return Err(Error::InvalidArgument(format!("t1={t1} exceeds t2={t2}")));
        }
        if grid_points < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 points".into()));
        }
        let mut best = SStar {
            value: f64::INFINITY,
            t: t1,
            k: 2,
        };
        for i in 0..grid_points {
            let t = t1 + (t2 - t1) * i as f64 / (grid_points - 1) as f64;
            for k in 2..=self.r {
                let s = self.tail_derivative(k, t);
                if s < best.value {
                    best = SStar { value: s, t, k };
                }
            }
        }
        Ok(best)
    }
}

fn check_r(r: u32) -> Result<()> {
    if r < 2 || r > u32::from(u16::MAX) {
        return Err(Error::InvalidArgument(format!("alphabet size r={r} must be at least 2")));
    }
    Ok(())
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidArgument(format!("interval ({a}, {b}) must satisfy a < b")));
    }
    Ok(())
}

/// The law `μ_t` at one parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfSnapshot {
    pub t: f64,
    /// `p_1,…,p_r`.
    pub probs: Vec<f64>,
    /// `G_2,…,G_r`.
    pub tails: Vec<f64>,
    /// `S_{t,2},…,S_{t,r}`.
    pub tail_derivatives: Vec<f64>,
}

impl PmfSnapshot {
    pub fn r(&self) -> u32 {
        self.probs.len() as u32
    }

    /// `p_k` for `k` in `1..=r`.
    pub fn prob(&self, k: u32) -> f64 {
        self.probs[k as usize - 1]
    }

    /// `G_k` for `k` in `1..=r+1`.
    pub fn tail(&self, k: u32) -> f64 {
        match k {
            0 | 1 => 1.0,
            k if k > self.r() => 0.0,
            k => self.tails[k as usize - 2],
        }
    }

    /// `S_{t,k}` for `k` in `1..=r+1`.
    pub fn s(&self, k: u32) -> f64 {
        match k {
            0 | 1 => 0.0,
            k if k > self.r() => 0.0,
            k => self.tail_derivatives[k as usize - 2],
        }
    }

    /// `S_t* = min_{k ≥ 2} S_{t,k}`.
    pub fn s_star(&self) -> f64 {
        self.tail_derivatives.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `μ_t'(k) = S_{t,k} − S_{t,k+1}` for `k` in `1..=r`.
    pub fn level_derivatives(&self) -> Vec<f64> {
        (1..=self.r()).map(|k| self.s(k) - self.s(k + 1)).collect()
    }

    /// `c_i = μ_t({1,…,i}) = 1 − G_{i+1}` for `i` in `0..=r`.
    pub fn cumulative(&self, i: u32) -> f64 {
        1.0 - self.tail(i + 1)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.r();
        for k in 2..=r {
            let g = self.tail(k);
            if !g.is_finite() || g < -PMF_TOLERANCE {
                return Err(Error::Validation {
                    k,
                    reason: format!("tail G_{k} = {g} is not a probability"),
                });
            }
            if g > self.tail(k - 1) + PMF_TOLERANCE {
                return Err(Error::Validation {
                    k,
                    reason: format!("tail G_{k} = {g} exceeds G_{} = {}", k - 1, self.tail(k - 1)),
                });
            }
            let s = self.s(k);
            if !s.is_finite() || s < -PMF_TOLERANCE {
                return Err(Error::Validation {
                    k,
                    reason: format!("tail derivative S_{k} = {s} is negative"),
                });
            }
        }
        let total: f64 = self.probs.iter().sum();
        if (total - 1.0).abs() > PMF_TOLERANCE {
            return Err(Error::Validation {
                k: 1,
                reason: format!("probabilities sum to {total}"),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SStar {
    pub value: f64,
    /// Grid point attaining the minimum.
    pub t: f64,
    /// Level attaining the minimum.
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub passed: bool,
    pub detail: Option<String>,
}

impl HypothesisCheck {
    fn pass() -> Self {
        Self {
            passed: true,
            detail: None,
        }
    }

    fn fail(detail: String) -> Self {
        Self {
            passed: false,
            detail: Some(detail),
        }
    }
}

/// Result of checking the family hypotheses on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyValidation {
    pub grid_points: usize,
    pub pmf_valid: HypothesisCheck,
    pub tails_strictly_increasing: HypothesisCheck,
    /// `G_2(t) → 0` as `t → a`.
    pub lower_limit: HypothesisCheck,
    /// `G_r(t) → 1` as `t → b`.
    pub upper_limit: HypothesisCheck,
    /// Set when the grid minimum of `S_{t,k}` is zero within tolerance.
    /// Reported, not treated as a failure.
    pub degenerate_s_star: bool,
    pub min_tail_derivative: f64,
}

impl FamilyValidation {
    pub fn passed(&self) -> bool {
        self.pmf_valid.passed
            && self.tails_strictly_increasing.passed
            && self.lower_limit.passed
            && self.upper_limit.passed
    }
}

/// Tolerance for the boundary limits of the tails.
pub const BOUNDARY_TOLERANCE: f64 = 1e-3;

pub fn validate_family(family: &MeasureFamily, grid_points: usize) -> FamilyValidation {
    let grid_points = grid_points.max(2);
    let (a, b) = family.interval();
    let r = family.r();
    let grid: Vec<f64> = (0..grid_points)
        .map(|i| a + (b - a) * (i + 1) as f64 / (grid_points + 1) as f64)
        .collect();

    let mut pmf_valid = HypothesisCheck::pass();
    let mut min_s = f64::INFINITY;
    for &t in &grid {
        match family.pmf_at(t) {
            Ok(snap) => min_s = min_s.min(snap.s_star()),
            Err(e) => {
                pmf_valid = HypothesisCheck::fail(format!("t={t}: {e}"));
                break;
            }
        }
    }

    let mut increasing = HypothesisCheck::pass();
    'outer: for k in 2..=r {
        for w in grid.windows(2) {
            let (g0, g1) = (family.tail(k, w[0]), family.tail(k, w[1]));
            if !(g1 > g0) {
                increasing = HypothesisCheck::fail(format!(
                    "G_{k} does not increase between t={} ({g0}) and t={} ({g1})",
                    w[0], w[1]
                ));
                break 'outer;
            }
        }
    }

    let eps = 1e-6 * (b - a);
    let low = family.tail(2, a + eps);
    let lower_limit = if low.abs() < BOUNDARY_TOLERANCE {
        HypothesisCheck::pass()
    } else {
        HypothesisCheck::fail(format!("G_2(a+{eps}) = {low}, expected near 0"))
    };
    let high = family.tail(r, b - eps);
    let upper_limit = if high > 1.0 - BOUNDARY_TOLERANCE {
        HypothesisCheck::pass()
    } else {
        HypothesisCheck::fail(format!("G_{r}(b-{eps}) = {high}, expected near 1"))
    };

    if !min_s.is_finite() {
        min_s = (2..=r)
            .flat_map(|k| grid.iter().map(move |&t| (k, t)))
            .map(|(k, t)| family.tail_derivative(k, t))
            .fold(f64::INFINITY, f64::min);
    }

    FamilyValidation {
        grid_points,
        pmf_valid,
        tails_strictly_increasing: increasing,
        lower_limit,
        upper_limit,
        degenerate_s_star: min_s <= PMF_TOLERANCE,
        min_tail_derivative: min_s,
    }
}

pub fn central_difference(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (f(t + h) - f(t - h)) / (2.0 * h)
}

/// Central differences at `h` and `h/2` with their Richardson combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Richardson {
    pub coarse: f64,
    pub fine: f64,
    pub extrapolated: f64,
    /// `|fine − coarse|`, a proxy for the truncation error at `h`.
    pub discrepancy: f64,
}

pub fn richardson(f: impl Fn(f64) -> f64, t: f64, h: f64) -> Richardson {
    let coarse = central_difference(&f, t, h);
    let fine = central_difference(&f, t, h / 2.0);
    Richardson {
        coarse,
        fine,
        extrapolated: (4.0 * fine - coarse) / 3.0,
        discrepancy: (fine - coarse).abs(),
    }
}

/// Shape-preserving cubic Hermite interpolant (Fritsch–Carlson slopes).
/// Constant extrapolation outside the knots.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// `x` strictly increasing with at least two knots.
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        debug_assert!(n >= 2 && y.len() == n);
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut slopes = alloc::vec![0.0; n];
        if n == 2 {
            slopes[0] = delta[0];
            slopes[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                let (d0, d1) = (delta[i - 1], delta[i]);
                if d0 * d1 > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    slopes[i] = (w1 + w2) / (w1 / d0 + w2 / d1);
                }
            }
            slopes[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            slopes[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Self {
            x: x.to_vec(),
            y: y.to_vec(),
            slopes,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = self.x.partition_point(|&xi| xi <= t) - 1;
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.slopes[i] + h01 * self.y[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() || d0 == 0.0 {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}
