//! Binary-digit lift of each coordinate.
//!
//! Coordinate `j` is represented by `m` fair bits `x_{1,j},…,x_{m,j}` with
//! value `u_j = Σ_i x_{i,j} 2^{-i}` (digit 1 most significant), and mapped to
//! a level by the quantile map of `μ_t`. The lifted indicator is
//! `g(x) = f(F_t(u))`. For every digit `Δ_{i,j} g = g − E_{x_{i,j}} g`.
//!
//! All quantities are computed in the truncated model: the other
//! coordinates carry the exact law of `F_t` applied to `m`-digit uniforms,
//! so every inequality checked here is a statement about one finite
//! Bernoulli product space.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_engine::{check_alphabet, ExactEngine};
use crate::measure_family::{MeasureFamily, PmfSnapshot};
use crate::product_space::{checked_states, pow_saturating, IncreasingEvent, Level};
use crate::verdict::{Inequality, Status, Tolerances};

/// Largest supported digit depth.
pub const MAX_DIGITS: u32 = 52;

/// Level map `u ↦ i` with `c_{i−1} ≤ u < c_i`, `c_i = μ_t({1,…,i})`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileMap {
    /// `c_1,…,c_{r−1}`.
    cutoffs: Vec<f64>,
}

impl QuantileMap {
    pub fn new(snap: &PmfSnapshot) -> Self {
        Self {
            cutoffs: (1..snap.r()).map(|i| snap.cumulative(i)).collect(),
        }
    }

    pub fn r(&self) -> u32 {
        self.cutoffs.len() as u32 + 1
    }

    pub fn cutoffs(&self) -> &[f64] {
        &self.cutoffs
    }

    pub fn level(&self, u: f64) -> Result<Level> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::InvalidArgument(format!("uniform value {u} outside [0, 1)")));
        }
        Ok(self.level_unchecked(u))
    }

    /// `u` must lie in `[0, 1)`.
    #[inline]
    pub fn level_unchecked(&self, u: f64) -> Level {
        self.cutoffs.partition_point(|&c| c <= u) as Level + 1
    }
}

pub fn quantile_map(family: &MeasureFamily, t: f64, u: f64) -> Result<Level> {
    QuantileMap::new(&family.pmf_at(t)?).level(u)
}

/// `n` coordinates of `m` binary digits each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicPoint {
    m: u32,
    /// Per coordinate the integer `k = u·2^m`; digit `i` is bit `m − i`.
    numerators: Vec<u64>,
}

impl DyadicPoint {
    pub fn from_numerators(m: u32, numerators: Vec<u64>) -> Result<Self> {
        check_depth(m)?;
        if let Some(bad) = numerators.iter().find(|&&k| k >> m != 0) {
            return Err(Error::InvalidArgument(format!("numerator {bad} exceeds 2^{m}")));
        }
        Ok(Self { m, numerators })
    }

    /// `digits[j][i − 1]` is `x_{i,j}`.
    pub fn from_digits(m: u32, digits: &[Vec<u8>]) -> Result<Self> {
        check_depth(m)?;
        let mut numerators = Vec::with_capacity(digits.len());
        for row in digits {
            if row.len() != m as usize || row.iter().any(|&d| d > 1) {
                return Err(Error::InvalidArgument(format!("expected {m} binary digits per coordinate")));
            }
            numerators.push(row.iter().fold(0u64, |acc, &d| (acc << 1) | u64::from(d)));
        }
        Ok(Self { m, numerators })
    }

    pub fn depth(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.numerators.len()
    }

    /// `x_{i,j}` for `i` in `1..=m`.
    pub fn digit(&self, i: u32, j: usize) -> u8 {
        ((self.numerators[j] >> (self.m - i)) & 1) as u8
    }

    pub fn digits(&self, j: usize) -> Vec<u8> {
        (1..=self.m).map(|i| self.digit(i, j)).collect()
    }

    /// `u_j = Σ_i x_{i,j} 2^{-i}`.
    pub fn value(&self, j: usize) -> f64 {
        self.numerators[j] as f64 / libm::exp2(f64::from(self.m))
    }

    pub fn levels(&self, quantile: &QuantileMap) -> Vec<Level> {
        (0..self.n()).map(|j| quantile.level_unchecked(self.value(j))).collect()
    }
}

fn check_depth(m: u32) -> Result<()> {
    if m == 0 || m > MAX_DIGITS {
        return Err(Error::InvalidArgument(format!("digit depth m={m} outside 1..={MAX_DIGITS}")));
    }
    Ok(())
}

/// Law of `F_t` applied to a uniform `m`-digit value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedPushforward {
    pub t: f64,
    pub m: u32,
    /// `#{k < 2^m : c_{i−1} ≤ k/2^m < c_i}` per level.
    pub counts: Vec<u64>,
    /// `counts / 2^m`.
    pub q: Vec<f64>,
}

impl TruncatedPushforward {
    pub fn from_snapshot(snap: &PmfSnapshot, m: u32) -> Result<Self> {
        check_depth(m)?;
        let scale = libm::exp2(f64::from(m));
        let total = 1u64 << m;
        // number of grid points strictly below c
        let below = |c: f64| -> u64 { libm::ceil(c * scale).clamp(0.0, scale) as u64 };
        let r = snap.r();
        let counts: Vec<u64> = (1..=r)
            .map(|i| {
                let hi = if i == r { total } else { below(snap.cumulative(i)) };
                let lo = if i == 1 { 0 } else { below(snap.cumulative(i - 1)) };
                hi.saturating_sub(lo)
            })
            .collect();
        let q = counts.iter().map(|&c| c as f64 / scale).collect();
        Ok(Self {
            t: snap.t,
            m,
            counts,
            q,
        })
    }

    /// `Σ_i |q_i − p_i|`.
    pub fn l1_distance(&self, probs: &[f64]) -> f64 {
        self.q.iter().zip(probs).map(|(q, p)| (q - p).abs()).sum()
    }
}

pub fn truncated_pushforward(family: &MeasureFamily, t: f64, m: u32) -> Result<TruncatedPushforward> {
    TruncatedPushforward::from_snapshot(&family.pmf_at(t)?, m)
}

/// Lift of one event at fixed `(t, m)`.
#[derive(Debug, Clone)]
pub struct LiftEngine<'a> {
    engine: &'a ExactEngine,
    m: u32,
    pushforward: TruncatedPushforward,
    /// Per digit `i` (index `i − 1`), row-major `r × r` counts of digit
    /// settings where the pair `(x_{i,j}=0, x_{i,j}=1)` maps to levels `(a, b)`.
    pair_counts: Vec<Vec<u64>>,
}

impl<'a> LiftEngine<'a> {
    pub fn new(engine: &'a ExactEngine, snap: &PmfSnapshot, m: u32, cap: u64) -> Result<Self> {
        check_depth(m)?;
        let shape = engine.shape();
        if snap.r() != shape.r() {
            return Err(Error::InvalidArgument(format!(
                "measure has {} levels, event has r={}",
                snap.r(),
                shape.r()
            )));
        }
        let work = (1u128 << (m - 1)).saturating_mul(pow_saturating(shape.r(), shape.n() - 1));
        checked_states(work, cap)?;
        let quantile = QuantileMap::new(snap);
        let pushforward = TruncatedPushforward::from_snapshot(snap, m)?;
        let r = shape.r() as usize;
        let total = 1u64 << m;
        let scale = libm::exp2(f64::from(m));
        let levels: Vec<usize> = (0..total)
            .map(|k| usize::from(quantile.level_unchecked(k as f64 / scale)) - 1)
            .collect();
        let pair_counts = (1..=m)
            .map(|i| {
                let h = 1u64 << (m - i);
                let mut counts = vec![0u64; r * r];
                for k in (0..total).filter(|k| k & h == 0) {
                    let (a, b) = (levels[k as usize], levels[(k + h) as usize]);
                    counts[a * r + b] += 1;
                }
                counts
            })
            .collect();
        Ok(Self {
            engine,
            m,
            pushforward,
            pair_counts,
        })
    }

    pub fn pushforward(&self) -> &TruncatedPushforward {
        &self.pushforward
    }

    /// `E|Δ_{i,j} g|^p` for every digit `i` (index `i − 1`) of coordinate `j`.
    pub fn coordinate_moments(&self, j: usize, p: u32) -> Result<Vec<f64>> {
        if p == 0 {
            return Err(Error::InvalidArgument("moment order must be at least 1".into()));
        }
        let gaps = self.engine.level_gaps(j, &self.pushforward.q)?;
        // |Δ| = |g(1) − g(0)|/2 and the gap of an indicator is 0 or 1
        let scale = libm::exp2(-f64::from(p)) / libm::exp2(f64::from(self.m - 1));
        Ok(self
            .pair_counts
            .iter()
            .map(|counts| {
                let sum: f64 = counts.iter().zip(&gaps).map(|(&c, g)| c as f64 * g).sum();
                scale * sum
            })
            .collect())
    }

    pub fn delta_moment(&self, i: u32, j: usize, p: u32) -> Result<f64> {
        if i == 0 || i > self.m {
            return Err(Error::InvalidArgument(format!("digit {i} outside 1..={}", self.m)));
        }
        Ok(self.coordinate_moments(j, p)?[i as usize - 1])
    }

    pub fn report(&self, tol: &Tolerances) -> Result<LiftReport> {
        let n = self.engine.shape().n();
        let q = &self.pushforward.q;
        let mut abs_moments = vec![vec![0.0; n]; self.m as usize];
        let mut sq_moments = vec![vec![0.0; n]; self.m as usize];
        for j in 0..n {
            for (i, v) in self.coordinate_moments(j, 1)?.into_iter().enumerate() {
                abs_moments[i][j] = v;
            }
            for (i, v) in self.coordinate_moments(j, 2)?.into_iter().enumerate() {
                sq_moments[i][j] = v;
            }
        }
        let m1: f64 = abs_moments.iter().flatten().map(|v| v * v).sum();
        let m2: f64 = sq_moments.iter().flatten().sum();
        let nu = self.engine.measure(q)?;
        let variance = nu * (1.0 - nu);
        let sums = self.engine.all_coordinate_sums(q)?;
        let influences: Vec<f64> = sums.iter().map(|s| s.influence()).collect();
        let total_influence: f64 = influences.iter().sum();
        let pivotal: Vec<f64> = sums.iter().map(|s| s.pivotal).collect();
        let gamma = pivotal.iter().copied().fold(0.0, f64::max);

        let fs = fs_check(m1, m2, variance, tol.inequality);
        let m2_vs_influence = Inequality::check(m2, 0.5 * total_influence, tol.inequality);
        let mut abs_vs_pivotal = Inequality::check(0.0, 0.0, tol.inequality);
        let mut worst_digit = (1, 0);
        for (i, row) in abs_moments.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let check = Inequality::check(v, pivotal[j], tol.inequality);
                if check.residual < abs_vs_pivotal.residual || (i == 0 && j == 0) {
                    abs_vs_pivotal = check;
                    worst_digit = (i as u32 + 1, j);
                }
            }
        }
        let m1_vs_gamma_influence = Inequality::check(m1, gamma * total_influence, tol.inequality);

        Ok(LiftReport {
            t: self.pushforward.t,
            m: self.m,
            pushforward: q.clone(),
            abs_moments,
            sq_moments,
            m1,
            m2,
            nu,
            variance,
            influences,
            total_influence,
            pivotal,
            gamma,
            fs,
            m2_vs_influence,
            abs_vs_pivotal,
            worst_digit,
            m1_vs_gamma_influence,
        })
    }
}

/// `½V log(V/M_1) ≤ M_2`, vacuous when `V = 0` or `M_1 = 0`.
pub fn fs_check(m1: f64, m2: f64, variance: f64, tol: f64) -> Inequality {
    if variance <= 0.0 || m1 <= 0.0 {
        return Inequality::vacuous(0.0, m2);
    }
    Inequality::check(0.5 * variance * libm::log(variance / m1), m2, tol)
}

/// Digit moments and the truncated-model quantities at digit depth `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub t: f64,
    pub m: u32,
    /// Level law `q` of the truncated model.
    pub pushforward: Vec<f64>,
    /// `E|Δ_{i,j}|`, row `i − 1`, column `j`.
    pub abs_moments: Vec<Vec<f64>>,
    /// `E(Δ_{i,j}²)`, same layout.
    pub sq_moments: Vec<Vec<f64>>,
    /// `Σ_{i,j} (E|Δ_{i,j}|)²`.
    pub m1: f64,
    /// `Σ_{i,j} E(Δ_{i,j}²)`.
    pub m2: f64,
    pub nu: f64,
    /// `V^{(m)} = ν(1 − ν)` under `q`.
    pub variance: f64,
    pub influences: Vec<f64>,
    /// `I^{(m)}` under `q`.
    pub total_influence: f64,
    /// `ν^{(m)}(A_j)` under `q`.
    pub pivotal: Vec<f64>,
    /// `γ^{(m)} = max_j ν^{(m)}(A_j)`.
    pub gamma: f64,
    /// `½V log(V/M_1) ≤ M_2`.
    pub fs: Inequality,
    /// `M_2 ≤ ½I`.
    pub m2_vs_influence: Inequality,
    /// Tightest of `E|Δ_{i,j}| ≤ ν(A_j)` over all digits.
    pub abs_vs_pivotal: Inequality,
    /// `(i, j)` attaining `abs_vs_pivotal`.
    pub worst_digit: (u32, usize),
    /// `M_1 ≤ γ·I`.
    pub m1_vs_gamma_influence: Inequality,
}

impl LiftReport {
    pub fn bounds_status(&self) -> Status {
        self.m2_vs_influence
            .status
            .and(self.abs_vs_pivotal.status)
            .and(self.m1_vs_gamma_influence.status)
    }
}

fn lift_setup(event: &IncreasingEvent, family: &MeasureFamily, t: f64, cap: u64) -> Result<(ExactEngine, PmfSnapshot)> {
    check_alphabet(event.shape(), family)?;
    let snap = family.pmf_at(t)?;
    Ok((ExactEngine::new(event, cap)?, snap))
}

#[allow(clippy::too_many_arguments)]
pub fn delta_moment(
    event: &IncreasingEvent,
    family: &MeasureFamily,
    t: f64,
    m: u32,
    i: u32,
    j: usize,
    p: u32,
    cap: u64,
) -> Result<f64> {
    let (engine, snap) = lift_setup(event, family, t, cap)?;
    LiftEngine::new(&engine, &snap, m, cap)?.delta_moment(i, j, p)
}

pub fn lift_report(
    event: &IncreasingEvent,
    family: &MeasureFamily,
    t: f64,
    m: u32,
    cap: u64,
    tol: &Tolerances,
) -> Result<LiftReport> {
    let (engine, snap) = lift_setup(event, family, t, cap)?;
    LiftEngine::new(&engine, &snap, m, cap)?.report(tol)
}

pub fn verify_fs(
    event: &IncreasingEvent,
    family: &MeasureFamily,
    t: f64,
    m: u32,
    cap: u64,
    tol: &Tolerances,
) -> Result<Inequality> {
    Ok(lift_report(event, family, t, m, cap, tol)?.fs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftBounds {
    pub m2_vs_influence: Inequality,
    pub abs_vs_pivotal: Inequality,
    pub worst_digit: (u32, usize),
    pub m1_vs_gamma_influence: Inequality,
    pub status: Status,
}

pub fn verify_lift_bounds(
    event: &IncreasingEvent,
    family: &MeasureFamily,
    t: f64,
    m: u32,
    cap: u64,
    tol: &Tolerances,
) -> Result<LiftBounds> {
    let rep = lift_report(event, family, t, m, cap, tol)?;
    Ok(LiftBounds {
        m2_vs_influence: rep.m2_vs_influence,
        abs_vs_pivotal: rep.abs_vs_pivotal,
        worst_digit: rep.worst_digit,
        m1_vs_gamma_influence: rep.m1_vs_gamma_influence,
        status: rep.bounds_status(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareStep {
    pub m: u32,
    pub m1: f64,
    pub m2: f64,
    pub variance: f64,
    /// `|V^{(m)} − ν_t(1 − ν_t)|`.
    pub variance_gap: f64,
    pub check: Inequality,
}

/// The modified Poincaré check at every depth `1..=m_max`, with the trend of
/// the truncated functionals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareTrend {
    pub t: f64,
    pub steps: Vec<PoincareStep>,
    /// Untruncated `ν_t(1 − ν_t)`.
    pub limit_variance: f64,
    pub m1_nondecreasing: bool,
    pub m2_nondecreasing: bool,
    pub variance_gap_nonincreasing: bool,
    pub status: Status,
}

/// Slack for the trend comparisons across depths.
pub const TREND_TOLERANCE: f64 = 1e-12;

pub fn verify_modified_poincare(
    event: &IncreasingEvent,
    family: &MeasureFamily,
    t: f64,
    m_max: u32,
    cap: u64,
    tol: &Tolerances,
) -> Result<PoincareTrend> {
    check_depth(m_max)?;
    let (engine, snap) = lift_setup(event, family, t, cap)?;
    let nu = engine.measure(&snap.probs)?;
    let limit_variance = nu * (1.0 - nu);
    let mut steps = Vec::with_capacity(m_max as usize);
    for m in 1..=m_max {
        let rep = LiftEngine::new(&engine, &snap, m, cap)?.report(tol)?;
        steps.push(PoincareStep {
            m,
            m1: rep.m1,
            m2: rep.m2,
            variance: rep.variance,
            variance_gap: (rep.variance - limit_variance).abs(),
            check: rep.fs,
        });
    }
    let nondecreasing = |f: fn(&PoincareStep) -> f64| steps.windows(2).all(|w| f(&w[1]) >= f(&w[0]) - TREND_TOLERANCE);
    let m1_nondecreasing = nondecreasing(|s| s.m1);
    let m2_nondecreasing = nondecreasing(|s| s.m2);
    let variance_gap_nonincreasing = nondecreasing(|s| -s.variance_gap);
    let status = steps.iter().fold(Status::Vacuous, |acc, s| acc.and(s.check.status));
    Ok(PoincareTrend {
        t,
        steps,
        limit_variance,
        m1_nondecreasing,
        m2_nondecreasing,
        variance_gap_nonincreasing,
        status,
    })
}
