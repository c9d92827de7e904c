//! Exact event probabilities, influences, pivotal probabilities and the
//! Russo-type derivative by enumeration of `{1,…,r}^n`.
//!
//! The event is tabulated once; every quantity is then a weighted sum over
//! ranks. Weights `Π_j p_{x_j}` are maintained along the rank order as
//! suffix products, so each step costs O(1) amortized multiplications and no
//! divisions (levels of probability zero are common, e.g. the embedded
//! Bernoulli family).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure_family::{MeasureFamily, PmfSnapshot};
use crate::product_space::{find_monotone_violation, EventRepr, IncreasingEvent, Shape, TruthTable};
use crate::verdict::{Inequality, Status, Tolerances};

/// Visits every configuration of the coordinates other than `skip` in rank
/// order, with the rank of the configuration (coordinate `skip` at level 1)
/// and its product weight under `probs`.
pub(crate) fn for_each_weighted(
    shape: Shape,
    probs: &[f64],
    skip: Option<usize>,
    mut visit: impl FnMut(usize, f64),
) {
    let r = shape.r() as usize;
    debug_assert_eq!(probs.len(), r);
    let coords: Vec<usize> = (0..shape.n()).filter(|&c| Some(c) != skip).collect();
    let strides: Vec<usize> = coords.iter().map(|&c| shape.stride(c)).collect();
    let len = coords.len();
    let mut digits = vec![0usize; len];
    let mut suffix = vec![1.0; len + 1];
    for l in (0..len).rev() {
        suffix[l] = probs[0] * suffix[l + 1];
    }
    let mut rank = 0usize;
    loop {
        visit(rank, suffix[0]);
        let mut l = 0;
        loop {
            if l == len {
                return;
            }
            if digits[l] + 1 < r {
                digits[l] += 1;
                rank += strides[l];
                break;
            }
            rank -= digits[l] * strides[l];
            digits[l] = 0;
            l += 1;
        }
        suffix[l] = probs[digits[l]] * suffix[l + 1];
        for below in (0..l).rev() {
            suffix[below] = probs[0] * suffix[below + 1];
        }
    }
}

/// Sums over the coordinates other than `j` for one coordinate `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateSums {
    /// Entry `k − 1` is `∫ f(x|x_j = k) dν`.
    pub conditional: Vec<f64>,
    /// `ν(A_j)` with `A_j = {x ∈ A : f(x|x_j = 1) = 0}`.
    pub pivotal: f64,
}

impl CoordinateSums {
    /// `∫ f(x|x_j = r) − f(x|x_j = 1) dν`.
    pub fn influence(&self) -> f64 {
        self.conditional[self.conditional.len() - 1] - self.conditional[0]
    }
}

/// A tabulated event ready for repeated exact evaluation.
#[derive(Debug, Clone)]
pub struct ExactEngine {
    shape: Shape,
    table: TruthTable,
    /// Verified increasing, which allows the all-coordinates fast path.
    increasing: bool,
}

impl ExactEngine {
    pub fn new(event: &IncreasingEvent, cap: u64) -> Result<Self> {
        let increasing = match event.repr() {
            EventRepr::Table(_) => find_monotone_violation(event, cap)?.is_none(),
            _ => true,
        };
        Ok(Self {
            shape: event.shape(),
            table: event.tabulate(cap)?,
            increasing,
        })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn table(&self) -> &TruthTable {
        &self.table
    }

    fn check_probs(&self, probs: &[f64]) -> Result<()> {
        if probs.len() != self.shape.r() as usize {
            return Err(Error::InvalidArgument(format!(
                "measure has {} levels, event has r={}",
                probs.len(),
                self.shape.r()
            )));
        }
        Ok(())
    }

    fn check_coord(&self, j: usize) -> Result<()> {
        if j >= self.shape.n() {
            return Err(Error::CoordinateOutOfRange {
                coord: j,
                n: self.shape.n(),
            });
        }
        Ok(())
    }

    /// `Σ_x 1_A(x) Π_j p_{x_j}`.
    pub fn measure(&self, probs: &[f64]) -> Result<f64> {
        self.check_probs(probs)?;
        let mut total = 0.0;
        for_each_weighted(self.shape, probs, None, |rank, w| {
            if self.table.get(rank) {
                total += w;
            }
        });
        Ok(total)
    }

    pub fn coordinate_sums(&self, j: usize, probs: &[f64]) -> Result<CoordinateSums> {
        self.check_probs(probs)?;
        self.check_coord(j)?;
        let r = self.shape.r() as usize;
        let stride = self.shape.stride(j);
        let mut conditional = vec![0.0; r];
        let mut pivotal = 0.0;
        for_each_weighted(self.shape, probs, Some(j), |base, w| {
            let bottom = self.table.get(base);
            let mut up_mass = 0.0;
            for (k, cond) in conditional.iter_mut().enumerate() {
                if self.table.get(base + k * stride) {
                    *cond += w;
                    up_mass += probs[k];
                }
            }
            if !bottom {
                pivotal += w * up_mass;
            }
        });
        Ok(CoordinateSums {
            conditional,
            pivotal,
        })
    }

    /// Row-major `r × r` matrix of `Σ_{x_{-j}} w(x_{-j}) |f(x|x_j=a) − f(x|x_j=b)|`
    /// over levels `a, b`. For an indicator every power of the gap is the
    /// gap itself.
    pub fn level_gaps(&self, j: usize, probs: &[f64]) -> Result<Vec<f64>> {
        self.check_probs(probs)?;
        self.check_coord(j)?;
        let r = self.shape.r() as usize;
        let stride = self.shape.stride(j);
        let mut gaps = vec![0.0; r * r];
        let mut values = vec![false; r];
        for_each_weighted(self.shape, probs, Some(j), |base, w| {
            for (k, v) in values.iter_mut().enumerate() {
                *v = self.table.get(base + k * stride);
            }
            for a in 0..r {
                for b in 0..r {
                    if values[a] != values[b] {
                        gaps[a * r + b] += w;
                    }
                }
            }
        });
        Ok(gaps)
    }

    pub fn all_coordinate_sums(&self, probs: &[f64]) -> Result<Vec<CoordinateSums>> {
        self.check_probs(probs)?;
        if !self.increasing || self.shape.n() == 1 {
            return (0..self.shape.n()).map(|j| self.coordinate_sums(j, probs)).collect();
        }
        let mut conditionals = vec![Vec::new(); self.shape.n()];
        let coords: Vec<usize> = (0..self.shape.n()).collect();
        leave_one_out(|i| f64::from(u8::from(self.table.get(i))), &coords, probs, &mut conditionals);
        let nu: f64 = conditionals[0].iter().zip(probs).map(|(c, p)| c * p).sum();
        // for an increasing event A_j = A minus {x : f(x|x_j=1) = 1}
        Ok(conditionals
            .into_iter()
            .map(|conditional| CoordinateSums {
                pivotal: (nu - conditional[0]).max(0.0),
                conditional,
            })
            .collect())
    }

    pub fn point_report(&self, family: &MeasureFamily, t: f64, tol: &Tolerances) -> Result<PointReport> {
        check_alphabet(self.shape, family)?;
        let snap = family.pmf_at(t)?;
        let sums = self.all_coordinate_sums(&snap.probs)?;
        let nu = sums[0].conditional.iter().zip(&snap.probs).map(|(c, p)| c * p).sum();
        Ok(PointReport::assemble(&snap, nu, &sums, tol))
    }
}

/// Product weights over `dims` coordinates, first coordinate least significant.
fn product_weights(dims: usize, probs: &[f64]) -> Vec<f64> {
    let mut w = vec![1.0];
    for _ in 0..dims {
        w = probs.iter().flat_map(|&p| w.iter().map(move |&x| x * p)).collect();
    }
    w
}

/// For every coordinate in `coords` (the dimensions of `value`, least
/// significant first), the vector over its levels of `value` integrated
/// against the product weights of all other dimensions. Splitting the
/// dimensions in halves and contracting each half against the other keeps
/// the total cost linear in the array size.
fn leave_one_out(value: impl Fn(usize) -> f64, coords: &[usize], probs: &[f64], out: &mut [Vec<f64>]) {
    if let [j] = coords {
        out[*j] = (0..probs.len()).map(value).collect();
        return;
    }
    let (low, high) = coords.split_at(coords.len() / 2);
    let w_low = product_weights(low.len(), probs);
    let w_high = product_weights(high.len(), probs);
    let mut on_low = vec![0.0; w_low.len()];
    let mut on_high = vec![0.0; w_high.len()];
    for (h, (&wh, acc_h)) in w_high.iter().zip(on_high.iter_mut()).enumerate() {
        let base = h * w_low.len();
        for (l, (&wl, acc_l)) in w_low.iter().zip(on_low.iter_mut()).enumerate() {
            let v = value(base + l);
            *acc_l += wh * v;
            *acc_h += wl * v;
        }
    }
    leave_one_out_dense(&on_low, low, probs, out);
    leave_one_out_dense(&on_high, high, probs, out);
}

fn leave_one_out_dense(values: &[f64], coords: &[usize], probs: &[f64], out: &mut [Vec<f64>]) {
    leave_one_out(|i| values[i], coords, probs, out);
}

pub(crate) fn check_alphabet(shape: Shape, family: &MeasureFamily) -> Result<()> {
    if shape.r() != family.r() {
        return Err(Error::InvalidArgument(format!(
            "family has r={}, event has r={}",
            family.r(),
            shape.r()
        )));
    }
    Ok(())
}

/// `max{γ, γ log(1/γ)}`, zero at `γ = 0`.
pub fn gamma_star(gamma: f64) -> f64 {
    if gamma <= 0.0 {
        0.0
    } else {
        f64::max(gamma, gamma * libm::log(1.0 / gamma))
    }
}

/// Every scalar analysis at one parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub t: f64,
    /// `ν_t(A)`.
    pub nu: f64,
    /// `ν(1 − ν)`.
    pub variance: f64,
    pub influences: Vec<f64>,
    /// `I(f) = Σ_j Inf_j`.
    pub total_influence: f64,
    /// `ν_t(A_j)` per coordinate.
    pub pivotal: Vec<f64>,
    /// `max_j ν_t(A_j)`.
    pub gamma_t: f64,
    pub gamma_t_star: f64,
    /// `dν_t(A)/dt`.
    pub derivative: f64,
    /// `min_{k ≥ 2} S_{t,k}`.
    pub s_t_star: f64,
    /// `S_t*·I(f)`.
    pub russo_lower_bound: f64,
    pub russo_status: Status,
    /// `I(f) − Var·log(Var/(γ_t·I(f)))`; absent when vacuous.
    pub disj_residual: Option<f64>,
    pub disj_status: Status,
}

impl PointReport {
    pub(crate) fn assemble(snap: &PmfSnapshot, nu: f64, sums: &[CoordinateSums], tol: &Tolerances) -> Self {
        let level_derivs = snap.level_derivatives();
        let influences: Vec<f64> = sums.iter().map(CoordinateSums::influence).collect();
        let pivotal: Vec<f64> = sums.iter().map(|s| s.pivotal).collect();
        let derivative = sums
            .iter()
            .map(|s| {
                s.conditional
                    .iter()
                    .zip(&level_derivs)
                    .map(|(c, d)| c * d)
                    .sum::<f64>()
            })
            .sum();
        Self::from_parts(snap.t, nu, influences, pivotal, derivative, snap.s_star(), tol)
    }

    pub(crate) fn from_parts(
        t: f64,
        nu: f64,
        influences: Vec<f64>,
        pivotal: Vec<f64>,
        derivative: f64,
        s_t_star: f64,
        tol: &Tolerances,
    ) -> Self {
        let variance = nu * (1.0 - nu);
        let total_influence: f64 = influences.iter().sum();
        let gamma_t = pivotal.iter().copied().fold(0.0, f64::max);
        let russo_lower_bound = s_t_star * total_influence;
        let russo_status = Inequality::check(russo_lower_bound, derivative, tol.russo).status;
        let (disj_residual, disj_status) = match disj_check(variance, gamma_t, total_influence, tol.inequality) {
            Some(check) => (Some(check.residual), check.status),
            None => (None, Status::Vacuous),
        };
        Self {
            t,
            nu,
            variance,
            influences,
            total_influence,
            pivotal,
            gamma_t,
            gamma_t_star: gamma_star(gamma_t),
            derivative,
            s_t_star,
            russo_lower_bound,
            russo_status,
            disj_residual,
            disj_status,
        }
    }

    pub fn status(&self) -> Status {
        self.russo_status.and(self.disj_status)
    }
}

/// `Var·log(Var/(γ I)) ≤ I`, or `None` when `Var = 0` or `γ·I = 0`.
pub fn disj_check(variance: f64, gamma: f64, total_influence: f64, tol: f64) -> Option<Inequality> {
    let denom = gamma * total_influence;
    if variance <= 0.0 || denom <= 0.0 {
        return None;
    }
    let lower = variance * libm::log(variance / denom);
    Some(Inequality::check(lower, total_influence, tol))
}

fn engine_for(event: &IncreasingEvent, family: &MeasureFamily, cap: u64) -> Result<ExactEngine> {
    check_alphabet(event.shape(), family)?;
    ExactEngine::new(event, cap)
}

/// `ν_t(A)`.
pub fn measure_of_event(event: &IncreasingEvent, family: &MeasureFamily, t: f64, cap: u64) -> Result<f64> {
    let engine = engine_for(event, family, cap)?;
    engine.measure(&family.pmf_at(t)?.probs)
}

/// `Inf_j = ∫ f(x|x_j=r) − f(x|x_j=1) dν_t` for every `j`.
pub fn influence_vector(event: &IncreasingEvent, family: &MeasureFamily, t: f64, cap: u64) -> Result<Vec<f64>> {
    let engine = engine_for(event, family, cap)?;
    let snap = family.pmf_at(t)?;
    Ok(engine
        .all_coordinate_sums(&snap.probs)?
        .iter()
        .map(CoordinateSums::influence)
        .collect())
}

/// `ν_t(A_j)`.
pub fn pivotal_probability(
    event: &IncreasingEvent,
    family: &MeasureFamily,
    t: f64,
    j: usize,
    cap: u64,
) -> Result<f64> {
    let engine = engine_for(event, family, cap)?;
    Ok(engine.coordinate_sums(j, &family.pmf_at(t)?.probs)?.pivotal)
}

/// `(γ_t, γ_t*)`.
pub fn gamma_t(event: &IncreasingEvent, family: &MeasureFamily, t: f64, cap: u64) -> Result<(f64, f64)> {
    let engine = engine_for(event, family, cap)?;
    let snap = family.pmf_at(t)?;
    let gamma = engine
        .all_coordinate_sums(&snap.probs)?
        .iter()
        .map(|s| s.pivotal)
        .fold(0.0, f64::max);
    Ok((gamma, gamma_star(gamma)))
}

/// `dν_t(A)/dt = Σ_j ∫ Σ_k μ_t'(k) f(x|x_j=k) dν_t`.
pub fn russo_derivative_exact(event: &IncreasingEvent, family: &MeasureFamily, t: f64, cap: u64) -> Result<f64> {
    Ok(point_report(event, family, t, cap, &Tolerances::default())?.derivative)
}

pub fn point_report(
    event: &IncreasingEvent,
    family: &MeasureFamily,
    t: f64,
    cap: u64,
    tol: &Tolerances,
) -> Result<PointReport> {
    engine_for(event, family, cap)?.point_report(family, t, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product_space::{enumerate_configs, MonotoneClause};
    use crate::DEFAULT_ENUMERATION_CAP as CAP;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn maj3() -> IncreasingEvent {
        IncreasingEvent::majority(3, 2).unwrap()
    }

    fn emb2() -> MeasureFamily {
        MeasureFamily::embedded(2).unwrap()
    }

    #[test]
    fn weighted_enumeration_matches_direct_products() {
        let shape = Shape::new(3, 3).unwrap();
        let probs = [0.2, 0.0, 0.8];
        let mut seen = Vec::new();
        for_each_weighted(shape, &probs, None, |rank, w| seen.push((rank, w)));
        assert_eq!(seen.len(), 27);
        for (x, (rank, w)) in enumerate_configs(3, 3, CAP).unwrap().zip(&seen) {
            assert_eq!(shape.rank(&x).unwrap() as usize, *rank);
            let direct: f64 = x.levels().iter().map(|&l| probs[l as usize - 1]).product();
            assert!(close(direct, *w, 1e-15));
        }
        let mut skipped = Vec::new();
        for_each_weighted(shape, &probs, Some(1), |rank, _| skipped.push(rank));
        assert_eq!(skipped.len(), 9);
        assert!(skipped.iter().all(|rank| (rank / 3) % 3 == 0));
    }

    #[test]
    fn measure_examples() {
        let dict = IncreasingEvent::dictator(3, 2, 0).unwrap();
        assert!(close(measure_of_event(&dict, &emb2(), 0.37, CAP).unwrap(), 0.37, 1e-15));
        assert!(close(measure_of_event(&maj3(), &emb2(), 0.5, CAP).unwrap(), 0.5, 1e-15));
        // t³ + 3t²(1 − t) at 0.6
        assert!(close(measure_of_event(&maj3(), &emb2(), 0.6, CAP).unwrap(), 0.648, 1e-15));
    }

    #[test]
    fn influence_examples() {
        let dict = IncreasingEvent::dictator(3, 2, 0).unwrap();
        let inf = influence_vector(&dict, &emb2(), 0.3, CAP).unwrap();
        assert!(close(inf[0], 1.0, 1e-15));
        assert_eq!(&inf[1..], &[0.0, 0.0]);
        for inf in influence_vector(&maj3(), &emb2(), 0.5, CAP).unwrap() {
            assert!(close(inf, 0.5, 1e-15));
        }
        let full = IncreasingEvent::full(3, 2).unwrap();
        assert_eq!(influence_vector(&full, &emb2(), 0.5, CAP).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn pivotal_examples() {
        let dict = IncreasingEvent::dictator(3, 2, 0).unwrap();
        assert_eq!(pivotal_probability(&dict, &emb2(), 0.5, 0, CAP).unwrap(), 0.5);
        assert_eq!(pivotal_probability(&dict, &emb2(), 0.5, 1, CAP).unwrap(), 0.0);
        for j in 0..3 {
            assert!(close(pivotal_probability(&maj3(), &emb2(), 0.5, j, CAP).unwrap(), 0.25, 1e-15));
        }
        assert!(pivotal_probability(&maj3(), &emb2(), 0.5, 3, CAP).is_err());
    }

    #[test]
    fn gamma_examples() {
        let (g, gs) = gamma_t(&maj3(), &emb2(), 0.5, CAP).unwrap();
        assert!(close(g, 0.25, 1e-15));
        assert!(close(gs, 0.25 * libm::log(4.0), 1e-15));
        assert!(close(gs, 0.3466, 1e-4));
        let dict = IncreasingEvent::dictator(3, 2, 0).unwrap();
        let (g, gs) = gamma_t(&dict, &emb2(), 0.8, CAP).unwrap();
        assert!(close(g, 0.8, 1e-15));
        assert_eq!(gs, g);
        let empty = IncreasingEvent::empty(3, 2).unwrap();
        assert_eq!(gamma_t(&empty, &emb2(), 0.4, CAP).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn derivative_examples() {
        let dict = IncreasingEvent::dictator(3, 2, 0).unwrap();
        for t in [0.1, 0.5, 0.9] {
            assert!(close(russo_derivative_exact(&dict, &emb2(), t, CAP).unwrap(), 1.0, 1e-15));
        }
        assert!(close(russo_derivative_exact(&maj3(), &emb2(), 0.5, CAP).unwrap(), 1.5, 1e-15));
        let full = IncreasingEvent::full(3, 2).unwrap();
        assert_eq!(russo_derivative_exact(&full, &emb2(), 0.5, CAP).unwrap(), 0.0);
    }

    #[test]
    fn report_examples() {
        let tol = Tolerances::default();
        let rep = point_report(&maj3(), &emb2(), 0.5, CAP, &tol).unwrap();
        assert!(close(rep.total_influence, 1.5, 1e-15));
        assert!(close(rep.variance, 0.25, 1e-15));
        assert!(close(rep.gamma_t, 0.25, 1e-15));
        let rhs = 0.25 * libm::log(0.25 / (0.25 * 1.5));
        assert!(rhs < 0.0);
        assert!(close(rep.disj_residual.unwrap(), 1.5 - rhs, 1e-14));
        assert_eq!(rep.status(), Status::Pass);

        let dict = IncreasingEvent::dictator(2, 2, 1).unwrap();
        let rep = point_report(&dict, &emb2(), 0.3, CAP, &tol).unwrap();
        assert_eq!(rep.derivative, 1.0);
        assert_eq!(rep.russo_lower_bound, 1.0);
        assert_eq!(rep.russo_status, Status::Pass);

        let full = IncreasingEvent::full(2, 2).unwrap();
        let rep = point_report(&full, &emb2(), 0.3, CAP, &tol).unwrap();
        assert_eq!(rep.total_influence, 0.0);
        assert_eq!(rep.pivotal, vec![0.0, 0.0]);
        assert_eq!(rep.disj_status, Status::Vacuous);
        assert!(rep.disj_residual.is_none());
    }

    #[test]
    fn alphabet_mismatch() {
        let fam = MeasureFamily::embedded(3).unwrap();
        assert!(measure_of_event(&maj3(), &fam, 0.5, CAP).is_err());
    }

    #[test]
    fn capacity() {
        let big = IncreasingEvent::majority(30, 2).unwrap();
        assert!(matches!(measure_of_event(&big, &emb2(), 0.5, CAP), Err(Error::Capacity { .. })));
    }

    fn arb_case() -> impl Strategy<Value = (IncreasingEvent, MeasureFamily, f64)> {
        (1usize..=4, 2u32..=3, 0.05f64..0.95).prop_flat_map(|(n, r, t)| {
            let term = (0..n, 2..=r as u16);
            let clause = proptest::collection::vec(term, 1..=3);
            let alphas = proptest::collection::vec(1.0f64..3.0, r as usize - 1);
            (proptest::collection::vec(clause, 0..=4), alphas).prop_map(move |(clauses, mut alpha)| {
                let clauses = clauses.iter().map(|c| MonotoneClause::from_pairs(c)).collect();
                alpha.sort_by(f64::total_cmp);
                (
                    IncreasingEvent::dnf(n, r, clauses).unwrap(),
                    MeasureFamily::power(alpha).unwrap(),
                    t,
                )
            })
        })
    }

    proptest! {
        #[test]
        fn pivotal_below_influence((event, fam, t) in arb_case()) {
            let rep = point_report(&event, &fam, t, CAP, &Tolerances::default()).unwrap();
            prop_assert!((0.0..=1.0).contains(&rep.nu));
            for (p, i) in rep.pivotal.iter().zip(&rep.influences) {
                prop_assert!(*p >= -1e-15 && *p <= i + 1e-15 && *i <= 1.0 + 1e-15);
            }
            prop_assert_eq!(rep.russo_status, Status::Pass);
            prop_assert!(rep.disj_status != Status::Fail);
        }

        #[test]
        fn measure_nondecreasing_in_t((event, fam, t) in arb_case(), dt in 0.0f64..0.04) {
            let lo = measure_of_event(&event, &fam, t, CAP).unwrap();
            let hi = measure_of_event(&event, &fam, t + dt, CAP).unwrap();
            prop_assert!(hi >= lo - 1e-15);
        }

        #[test]
        fn contraction_matches_per_coordinate((event, fam, t) in arb_case()) {
            let engine = ExactEngine::new(&event, CAP).unwrap();
            let probs = fam.pmf_at(t).unwrap().probs;
            let fast = engine.all_coordinate_sums(&probs).unwrap();
            for (j, sums) in fast.iter().enumerate() {
                let direct = engine.coordinate_sums(j, &probs).unwrap();
                prop_assert!((sums.pivotal - direct.pivotal).abs() < 1e-14);
                for (a, b) in sums.conditional.iter().zip(&direct.conditional) {
                    prop_assert!((a - b).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn non_monotone_table_uses_direct_sums() {
        // x_0 = 1 only: decreasing in coordinate 0
        let table = TruthTable::from_fn(4, |i| i % 2 == 0);
        let event = IncreasingEvent::table(2, 2, table).unwrap();
        let engine = ExactEngine::new(&event, CAP).unwrap();
        let probs = [0.5, 0.5];
        let sums = engine.all_coordinate_sums(&probs).unwrap();
        assert_eq!(sums[0], engine.coordinate_sums(0, &probs).unwrap());
        assert_eq!(sums[0].pivotal, 0.0);
    }
}
