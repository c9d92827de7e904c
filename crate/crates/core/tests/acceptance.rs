//! Acceptance suite: one line per criterion, non-zero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use threshold_core::dyadic_lift::lift_report;
use threshold_core::measure_family::richardson;
use threshold_core::monte_carlo::{coupled_measure_curve, estimate_measure, McConfig};
use threshold_core::threshold_analysis::{
    sweep, threshold_window, uniform_grid, verify_all_pairs, verify_remark_bound, verify_threshold_bound,
    PairSelection, SweepMode, SweepResult,
};
use threshold_core::{ExactEngine, IncreasingEvent, MeasureFamily, Status, Tolerances, DEFAULT_ENUMERATION_CAP as CAP};

use common::{naive, random_dnf, random_law, rng, Dnf, Law};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

const SUITE_SEED: u64 = 20_240_601;
const FD_STEP: f64 = 1e-4;

fn suite() -> Vec<(Dnf, Law)> {
    let mut rng = rng(SUITE_SEED);
    (0..50)
        .map(|_| {
            let dnf = random_dnf(&mut rng, 4, 3);
            let law = random_law(&mut rng, dnf.r);
            (dnf, law)
        })
        .collect()
}

fn suite_grid() -> Vec<f64> {
    uniform_grid(0.05, 0.95, 20).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let tol = Tolerances::default();
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for (dnf, law) in suite() {
        let engine = ExactEngine::new(&dnf.event(), CAP).unwrap();
        let family = law.family();
        for t in suite_grid() {
            let rep = engine.point_report(&family, t, &tol).unwrap();
            let oracle = naive(|x| dnf.eval(x), dnf.n, &law, t);
            let diffs = [
                (rep.nu - oracle.nu).abs(),
                (rep.derivative - oracle.derivative).abs(),
            ];
            let vec_diff = rep
                .influences
                .iter()
                .zip(&oracle.influences)
                .chain(rep.pivotal.iter().zip(&oracle.pivotal))
                .map(|(a, b)| (a - b).abs());
            worst = diffs.into_iter().chain(vec_diff).fold(worst, f64::max);
            points += 1;
        }
    }
    outcome(
        worst <= 1e-12,
        format!("{points} (event, t) points, max |exact - naive| = {worst:.2e}"),
    )
}

fn russo_derivative() -> Outcome {
    let tol = Tolerances::default();
    let (mut worst_plain, mut worst_extrapolated, mut worst_r2) = (0.0f64, 0.0f64, 0.0f64);
    let mut r2_points = 0;
    for (dnf, law) in suite() {
        let engine = ExactEngine::new(&dnf.event(), CAP).unwrap();
        let family = law.family();
        let nu = |t: f64| engine.measure(&family.pmf_at(t).unwrap().probs).unwrap();
        for t in suite_grid() {
            let d = engine.point_report(&family, t, &tol).unwrap().derivative;
            let fd = richardson(nu, t, FD_STEP);
            // near t = 0 the derivative of a high-degree curve is tiny and the
            // O(h^2) truncation dominates a plain relative error
            worst_plain = worst_plain.max((d - fd.coarse).abs() / d.abs().max(1.0));
            let err = (d - fd.extrapolated).abs();
            worst_extrapolated = worst_extrapolated.max(if d == 0.0 { err } else { err / d.abs() });
            if matches!(law, Law::Embedded(2)) {
                let rep = engine.point_report(&family, t, &tol).unwrap();
                worst_r2 = worst_r2.max((rep.derivative - rep.total_influence).abs());
                r2_points += 1;
            }
        }
    }
    outcome(
        worst_plain < 1e-6 && worst_extrapolated < 1e-6 && worst_r2 <= 1e-12 && r2_points > 0,
        format!(
            "central difference (h = {FD_STEP:e}) error / max(|d|, 1) = {worst_plain:.2e}; \
             extrapolated (h, h/2) relative error = {worst_extrapolated:.2e}; \
             r = 2 embedded |dnu/dt - I| = {worst_r2:.2e} over {r2_points} points"
        ),
    )
}

fn pointwise_inequalities() -> Outcome {
    let tol = Tolerances::default();
    let (mut checked_russo, mut checked_disj, mut failures) = (0, 0, 0);
    for (dnf, law) in suite() {
        let engine = ExactEngine::new(&dnf.event(), CAP).unwrap();
        for t in suite_grid() {
            let rep = engine.point_report(&law.family(), t, &tol).unwrap();
            for status in [rep.russo_status, rep.disj_status] {
                failures += usize::from(status.is_fail());
            }
            checked_russo += usize::from(rep.russo_status != Status::Vacuous);
            checked_disj += usize::from(rep.disj_status != Status::Vacuous);
        }
    }
    outcome(
        failures == 0,
        format!("{checked_russo} derivative checks, {checked_disj} non-vacuous variance checks, {failures} failures"),
    )
}

fn lift_suite() -> Vec<(Dnf, Law, f64, u32)> {
    let mut rng = rng(SUITE_SEED + 1);
    (0..200)
        .map(|_| {
            let dnf = random_dnf(&mut rng, 3, 3);
            let law = random_law(&mut rng, dnf.r);
            let t = rng.random_range(0.05..0.95);
            let m = rng.random_range(1..=5);
            (dnf, law, t, m)
        })
        .collect()
}

fn fs_inequality() -> Outcome {
    let tol = Tolerances::default();
    let (mut pass, mut vacuous, mut worst) = (0, 0, f64::INFINITY);
    let cases = lift_suite();
    for (dnf, law, t, m) in &cases {
        let rep = lift_report(&dnf.event(), &law.family(), *t, *m, CAP, &tol).unwrap();
        match rep.fs.status {
            Status::Pass => {
                pass += 1;
                worst = worst.min(rep.fs.residual);
            }
            Status::Vacuous => vacuous += 1,
            Status::Fail => {}
        }
    }
    outcome(
        pass + vacuous == cases.len(),
        format!(
            "{} cases: {pass} pass, {vacuous} vacuous, min residual {worst:.3e}",
            cases.len()
        ),
    )
}

fn lift_bounds() -> Outcome {
    let tol = Tolerances::default();
    let cases = lift_suite();
    let (mut failures, mut worst_identity) = (0, 0.0f64);
    let mut min_residual = [f64::INFINITY; 3];
    for (dnf, law, t, m) in &cases {
        let rep = lift_report(&dnf.event(), &law.family(), *t, *m, CAP, &tol).unwrap();
        failures += usize::from(rep.bounds_status().is_fail());
        for (slot, check) in min_residual
            .iter_mut()
            .zip([rep.m2_vs_influence, rep.abs_vs_pivotal, rep.m1_vs_gamma_influence])
        {
            *slot = slot.min(check.residual);
        }
        for (a, s) in rep.abs_moments.iter().flatten().zip(rep.sq_moments.iter().flatten()) {
            worst_identity = worst_identity.max((s - 0.5 * a).abs());
        }
    }
    outcome(
        failures == 0 && worst_identity <= 1e-12,
        format!(
            "{} cases, {failures} failures; min residuals M2<=I/2 {:.2e}, E|D|<=nu(A_j) {:.2e}, M1<=gI {:.2e}; \
             max |E(D^2) - E|D|/2| = {worst_identity:.1e}",
            cases.len(),
            min_residual[0],
            min_residual[1],
            min_residual[2]
        ),
    )
}

fn bound_sweeps() -> Vec<(String, SweepResult)> {
    let tol = Tolerances::default();
    let grid = uniform_grid(0.125, 0.875, 101).unwrap();
    let families = [
        ("embedded r=2", MeasureFamily::embedded(2).unwrap()),
        ("power r=3 alpha=(1,2)", MeasureFamily::power(vec![1.0, 2.0]).unwrap()),
    ];
    let mut out = Vec::new();
    for (fname, family) in &families {
        let r = family.r();
        let events = [
            ("dictator", IncreasingEvent::dictator(1, r, 0).unwrap()),
            ("majority 2-of-3", IncreasingEvent::majority(3, r).unwrap()),
            ("majority 8-of-15", IncreasingEvent::majority(15, r).unwrap()),
            ("tribes 3x3", IncreasingEvent::tribes(3, 3, r).unwrap()),
        ];
        for (ename, event) in events {
            let s = sweep(&event, family, &grid, SweepMode::Exact, CAP, &tol).unwrap();
            out.push((format!("{ename} / {fname}"), s));
        }
    }
    out
}

fn threshold_bound(sweeps: &[(String, SweepResult)]) -> Outcome {
    let tol = Tolerances::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, s) in sweeps {
        let summary = verify_all_pairs(s, PairSelection::All, &tol);
        pass &= summary.failures == 0;
        let worst = summary.worst.unwrap();
        parts.push(format!(
            "{name}: {} pairs, worst residual {:.4} at ({:.4}, {:.4})",
            summary.checked, worst.check.residual, worst.t1, worst.t2
        ));
    }
    let dict = &sweeps[0].1;
    let c = verify_threshold_bound(dict, 0.2, 0.8, &tol).unwrap();
    let sig4 = |a: f64, b: f64| (a - b).abs() <= 5e-5 * b.abs();
    let dict_ok = sig4(c.lhs, 0.04) && sig4(c.rhs, 0.8747) && c.check.status == Status::Pass;
    parts.push(format!("dictator (0.2, 0.8): LHS {:.4} <= RHS {:.4}", c.lhs, c.rhs));
    outcome(pass && dict_ok, parts.join("; "))
}

fn remark_bound(sweeps: &[(String, SweepResult)]) -> Outcome {
    let tol = Tolerances::default();
    let (mut pairs, mut failures) = (0, 0);
    let mut chain_ok = true;
    for (_, s) in sweeps {
        let g = s.grid.len();
        let whole = verify_remark_bound(s, s.grid[0], s.grid[g - 1], &tol).unwrap();
        chain_ok &= !whole.gamma_vs_eta.status.is_fail() && !whole.eta_chain.status.is_fail();
        for i1 in 0..g {
            for i2 in i1..g {
                let rem = verify_remark_bound(s, s.grid[i1], s.grid[i2], &tol).unwrap();
                failures += usize::from(rem.status.is_fail());
                pairs += 1;
            }
        }
    }
    outcome(
        chain_ok && failures == 0,
        format!("{} sweeps, {pairs} pairs, {failures} failures", sweeps.len()),
    )
}

fn window_narrowing() -> Outcome {
    let tol = Tolerances::default();
    let family = MeasureFamily::embedded(2).unwrap();
    let grid = uniform_grid(0.005, 0.995, 199).unwrap();
    let mut widths = Vec::new();
    let mut within = true;
    for n in (3..=15).step_by(2) {
        let event = IncreasingEvent::k_of_n(n, 2, n / 2 + 1, 2).unwrap();
        let s = sweep(&event, &family, &grid, SweepMode::Exact, CAP, &tol).unwrap();
        let w = threshold_window(&s, 0.25, &tol).unwrap();
        within &= w.check.is_some_and(|c| c.status == Status::Pass);
        widths.push((n, w.width, w.bound_ceiling.unwrap_or(f64::NAN)));
    }
    let decreasing = widths.windows(2).all(|w| w[1].1 < w[0].1);
    let text: Vec<String> = widths
        .iter()
        .map(|(n, w, c)| format!("n={n}: {w:.4} (ceiling {c:.3})"))
        .collect();
    outcome(decreasing && within, text.join(", "))
}

fn monte_carlo_calibration() -> Outcome {
    let family = MeasureFamily::embedded(2).unwrap();
    let event = IncreasingEvent::majority(3, 2).unwrap();
    let exact = ExactEngine::new(&event, CAP)
        .unwrap()
        .measure(&family.pmf_at(0.6).unwrap().probs)
        .unwrap();
    let (mut covered, mut violations, mut samples) = (0, 0, 0);
    for seed in 0..100 {
        let config = McConfig::new(100_000, seed);
        let est = estimate_measure(&event, &family, 0.6, config).unwrap();
        covered += usize::from(est.ci.contains(exact));
        let curve = coupled_measure_curve(&event, &family, &[0.5, 0.6, 0.7], config).unwrap();
        violations += curve.violations;
        samples += curve.estimates[0].samples;
    }
    outcome(
        covered >= 95 && violations == 0 && (exact - 0.648).abs() < 1e-12,
        format!("99% Wilson interval covered {exact:.3} in {covered}/100 runs; {violations} coupling violations over {samples} coupled samples"),
    )
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            out.pass = false;
            out.detail.push_str(&format!("; exceeded {} s limit", limit.as_secs()));
        }
    }
    (out, elapsed)
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let mut results: Vec<(&str, (Outcome, Duration))> = vec![
        ("oracle equivalence", timed(secs(30), oracle_equivalence)),
        ("russo derivative", timed(None, russo_derivative)),
        ("pointwise inequalities", timed(None, pointwise_inequalities)),
        ("modified poincare", timed(secs(60), fs_inequality)),
        ("lift bounds", timed(None, lift_bounds)),
    ];
    let start = Instant::now();
    let sweeps = bound_sweeps();
    let sweep_time = start.elapsed();
    let (mut c6, d6) = timed(None, || threshold_bound(&sweeps));
    c6.detail.push_str(&format!("; sweeps took {:.1} s", sweep_time.as_secs_f64()));
    results.push(("threshold bound", (c6, d6 + sweep_time)));
    results.push(("remark bound", timed(None, || remark_bound(&sweeps))));
    results.push(("window narrowing", timed(secs(120), window_narrowing)));
    results.push(("monte carlo calibration", timed(None, monte_carlo_calibration)));

    let mut all = true;
    for (i, (name, (out, elapsed))) in results.iter().enumerate() {
        all &= out.pass;
        println!(
            "criterion {} {name}: {} ({:.2} s) {}",
            i + 1,
            if out.pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            out.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
