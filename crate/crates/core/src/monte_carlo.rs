//! Sampling estimators with Wilson intervals.
//!
//! Every estimator owns a substream keyed by `(seed, op, t, j)`. Samples are
//! drawn in fixed-size blocks; block `b` reads ChaCha stream `b` of that key,
//! so block tallies can be computed in any order and summed.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::dyadic_lift::QuantileMap;
use crate::error::{Error, Result};
use crate::exact_engine::check_alphabet;
use crate::measure_family::MeasureFamily;
use crate::product_space::{IncreasingEvent, Level, LevelConfig};
use crate::stats::{wilson_interval, Interval};

pub const MIN_SAMPLES: u64 = 100;
pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_LEVEL: f64 = 0.99;
pub const DEFAULT_BLOCK_SIZE: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    /// Confidence level of the reported interval.
    pub level: f64,
    pub block_size: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: 0,
            level: DEFAULT_LEVEL,
            block_size: DEFAULT_BLOCK_SIZE,
        }
    }
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "at least {MIN_SAMPLES} samples required, got {}",
                self.samples
            )));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidArgument(format!("confidence level {} outside (0, 1)", self.level)));
        }
        if self.block_size == 0 {
            return Err(Error::InvalidArgument("block size must be positive".into()));
        }
        Ok(())
    }

    pub fn blocks(&self) -> u64 {
        self.samples.div_ceil(self.block_size)
    }

    /// Number of samples in block `b`.
    pub fn block_len(&self, b: u64) -> u64 {
        let start = b * self.block_size;
        self.block_size.min(self.samples.saturating_sub(start))
    }
}

/// Identifies the random stream behind an estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Substream {
    pub op: String,
    pub t: f64,
    pub coord: Option<usize>,
    pub key: u64,
}

impl Substream {
    pub fn new(seed: u64, op: &str, t: f64, coord: Option<usize>) -> Self {
        let mut h = splitmix(seed);
        for b in op.bytes() {
            h = splitmix(h ^ u64::from(b));
        }
        h = splitmix(h ^ t.to_bits());
        h = splitmix(h ^ coord.map_or(u64::MAX, |j| j as u64));
        Self {
            op: op.into(),
            t,
            coord,
            key: h,
        }
    }

    /// Generator for block `b`.
    pub fn block_rng(&self, b: u64) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        let mut state = self.key;
        for chunk in seed.chunks_exact_mut(8) {
            state = splitmix(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(b);
        rng
    }
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform on `[0, 1)` with 53 random bits.
#[inline]
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws configurations from `ν_{t,n}` by pushing uniforms through the quantile map.
#[derive(Debug, Clone)]
pub struct Sampler {
    quantile: QuantileMap,
    n: usize,
}

impl Sampler {
    pub fn new(family: &MeasureFamily, t: f64, n: usize) -> Result<Self> {
        Ok(Self {
            quantile: QuantileMap::new(&family.pmf_at(t)?),
            n,
        })
    }

    pub fn quantile(&self) -> &QuantileMap {
        &self.quantile
    }

    pub fn fill(&self, rng: &mut impl RngCore, levels: &mut [Level]) {
        for x in levels.iter_mut() {
            *x = self.quantile.level_unchecked(uniform(rng));
        }
    }

    pub fn sample(&self, rng: &mut impl RngCore) -> LevelConfig {
        let mut levels = vec![1; self.n];
        self.fill(rng, &mut levels);
        LevelConfig::new(levels, self.quantile.r()).expect("quantile levels lie in 1..=r")
    }
}

pub fn sample_config(family: &MeasureFamily, t: f64, n: usize, rng: &mut impl RngCore) -> Result<LevelConfig> {
    Ok(Sampler::new(family, t, n)?.sample(rng))
}

/// Order-independent count pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub samples: u64,
    pub successes: u64,
}

impl Tally {
    pub fn merge(self, other: Tally) -> Tally {
        Tally {
            samples: self.samples + other.samples,
            successes: self.successes + other.successes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Measure,
    /// `x ∈ A` and `x` with coordinate `j` set to 1 is not in `A`.
    Pivotal(usize),
}

impl Target {
    fn op(&self) -> &'static str {
        match self {
            Target::Measure => "estimate_measure",
            Target::Pivotal(_) => "estimate_pivotal",
        }
    }

    fn coord(&self) -> Option<usize> {
        match self {
            Target::Measure => None,
            Target::Pivotal(j) => Some(*j),
        }
    }
}

/// A prepared estimator whose blocks may run on any thread.
#[derive(Debug, Clone)]
pub struct Estimator<'a> {
    event: &'a IncreasingEvent,
    sampler: Sampler,
    target: Target,
    config: McConfig,
    substream: Substream,
}

impl<'a> Estimator<'a> {
    pub fn new(event: &'a IncreasingEvent, family: &MeasureFamily, t: f64, target: Target, config: McConfig) -> Result<Self> {
        config.validate()?;
        check_alphabet(event.shape(), family)?;
        if let Target::Pivotal(j) = target {
            if j >= event.n() {
                return Err(Error::CoordinateOutOfRange { coord: j, n: event.n() });
            }
        }
        Ok(Self {
            event,
            sampler: Sampler::new(family, t, event.n())?,
            target,
            config,
            substream: Substream::new(config.seed, target.op(), t, target.coord()),
        })
    }

    pub fn config(&self) -> &McConfig {
        &self.config
    }

    pub fn substream(&self) -> &Substream {
        &self.substream
    }

    pub fn run_block(&self, b: u64) -> Tally {
        let len = self.config.block_len(b);
        if let Some(v) = self.constant() {
            return Tally {
                samples: len,
                successes: if v { len } else { 0 },
            };
        }
        let mut rng = self.substream.block_rng(b);
        let mut levels = vec![1; self.event.n()];
        let mut successes = 0;
        for _ in 0..len {
            self.sampler.fill(&mut rng, &mut levels);
            let hit = match self.target {
                Target::Measure => self.event.eval_levels(&levels),
                Target::Pivotal(j) => {
                    self.event.eval_levels(&levels) && {
                        levels[j] = 1;
                        !self.event.eval_levels(&levels)
                    }
                }
            };
            successes += u64::from(hit);
        }
        Tally { samples: len, successes }
    }

    /// Known value of the indicator when it does not depend on the sample.
    fn constant(&self) -> Option<bool> {
        let v = self.event.constant_value()?;
        Some(match self.target {
            Target::Measure => v,
            Target::Pivotal(_) => false,
        })
    }

    pub fn finish(&self, tally: Tally) -> Result<Estimate> {
        let value = tally.successes as f64 / tally.samples as f64;
        let (ci, std_error) = if self.constant().is_some() {
            (Interval { level: self.config.level, lo: value, hi: value }, 0.0)
        } else {
            let ci = wilson_interval(tally.successes, tally.samples, self.config.level)?;
            (ci, libm::sqrt(value * (1.0 - value) / tally.samples as f64))
        };
        Ok(Estimate {
            value,
            std_error,
            ci,
            samples: tally.samples,
            successes: tally.successes,
            seed: self.config.seed,
            substream: self.substream.clone(),
        })
    }

    pub fn run(&self) -> Result<Estimate> {
        let tally = (0..self.config.blocks()).map(|b| self.run_block(b)).fold(Tally::default(), Tally::merge);
        self.finish(tally)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub ci: Interval,
    pub samples: u64,
    pub successes: u64,
    pub seed: u64,
    pub substream: Substream,
}

pub fn estimate_measure(event: &IncreasingEvent, family: &MeasureFamily, t: f64, config: McConfig) -> Result<Estimate> {
    Estimator::new(event, family, t, Target::Measure, config)?.run()
}

pub fn estimate_pivotal(
    event: &IncreasingEvent,
    family: &MeasureFamily,
    t: f64,
    j: usize,
    config: McConfig,
) -> Result<Estimate> {
    Estimator::new(event, family, t, Target::Pivotal(j), config)?.run()
}

/// Block tallies of the common-random-numbers curve.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveTally {
    pub samples: u64,
    pub successes: Vec<u64>,
    /// Samples whose levels or indicator decreased somewhere along the grid.
    pub violations: u64,
}

impl CurveTally {
    pub fn merge(mut self, other: CurveTally) -> CurveTally {
        if self.successes.is_empty() {
            return other;
        }
        for (a, b) in self.successes.iter_mut().zip(&other.successes) {
            *a += b;
        }
        self.samples += other.samples;
        self.violations += other.violations;
        self
    }
}

/// `ν_t(A)` along a grid from shared uniforms.
#[derive(Debug, Clone)]
pub struct CoupledEstimator<'a> {
    event: &'a IncreasingEvent,
    grid: Vec<f64>,
    maps: Vec<QuantileMap>,
    config: McConfig,
    substream: Substream,
}

impl<'a> CoupledEstimator<'a> {
    pub fn new(event: &'a IncreasingEvent, family: &MeasureFamily, grid: &[f64], config: McConfig) -> Result<Self> {
        config.validate()?;
        check_alphabet(event.shape(), family)?;
        if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("grid must be nonempty and strictly increasing".into()));
        }
        let maps = grid
            .iter()
            .map(|&t| Ok(QuantileMap::new(&family.pmf_at(t)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            event,
            grid: grid.to_vec(),
            maps,
            config,
            substream: Substream::new(config.seed, "coupled_measure_curve", grid[0], None),
        })
    }

    pub fn config(&self) -> &McConfig {
        &self.config
    }

    pub fn run_block(&self, b: u64) -> CurveTally {
        let len = self.config.block_len(b);
        let n = self.event.n();
        let mut rng = self.substream.block_rng(b);
        let mut u = vec![0.0; n];
        let mut prev = vec![1 as Level; n];
        let mut levels = vec![1 as Level; n];
        let mut tally = CurveTally {
            samples: len,
            successes: vec![0; self.grid.len()],
            violations: 0,
        };
        for _ in 0..len {
            u.iter_mut().for_each(|x| *x = uniform(&mut rng));
            let mut prev_hit = false;
            let mut violated = false;
            for (k, map) in self.maps.iter().enumerate() {
                for (x, &v) in levels.iter_mut().zip(&u) {
                    *x = map.level_unchecked(v);
                }
                let hit = self.event.eval_levels(&levels);
                if k > 0 && (prev_hit && !hit || levels.iter().zip(&prev).any(|(a, b)| a < b)) {
                    violated = true;
                }
                tally.successes[k] += u64::from(hit);
                prev_hit = hit;
                prev.copy_from_slice(&levels);
            }
            tally.violations += u64::from(violated);
        }
        tally
    }

    pub fn finish(&self, tally: CurveTally) -> Result<CoupledCurve> {
        let estimates = tally
            .successes
            .iter()
            .map(|&s| {
                let value = s as f64 / tally.samples as f64;
                Ok(Estimate {
                    value,
                    std_error: libm::sqrt(value * (1.0 - value) / tally.samples as f64),
                    ci: wilson_interval(s, tally.samples, self.config.level)?,
                    samples: tally.samples,
                    successes: s,
                    seed: self.config.seed,
                    substream: self.substream.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CoupledCurve {
            grid: self.grid.clone(),
            estimates,
            violations: tally.violations,
        })
    }

    pub fn run(&self) -> Result<CoupledCurve> {
        let tally = (0..self.config.blocks())
            .map(|b| self.run_block(b))
            .fold(CurveTally::default(), CurveTally::merge);
        self.finish(tally)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledCurve {
    pub grid: Vec<f64>,
    pub estimates: Vec<Estimate>,
    pub violations: u64,
}

impl CoupledCurve {
    pub fn is_monotone(&self) -> bool {
        self.violations == 0 && self.estimates.windows(2).all(|w| w[0].successes <= w[1].successes)
    }
}

pub fn coupled_measure_curve(
    event: &IncreasingEvent,
    family: &MeasureFamily,
    grid: &[f64],
    config: McConfig,
) -> Result<CoupledCurve> {
    CoupledEstimator::new(event, family, grid, config)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_engine::{measure_of_event, pivotal_probability};
    use crate::DEFAULT_ENUMERATION_CAP as CAP;

    fn emb(r: u32) -> MeasureFamily {
        MeasureFamily::embedded(r).unwrap()
    }

    #[test]
    fn sampler_marginals() {
        let fam = MeasureFamily::power(vec![1.0, 2.0]).unwrap();
        let t = 0.6;
        let mut rng = Substream::new(7, "test", t, None).block_rng(0);
        let sampler = Sampler::new(&fam, t, 1).unwrap();
        let draws = 100_000;
        let top = (0..draws).filter(|_| sampler.sample(&mut rng).level(0) == 3).count() as u64;
        let ci = wilson_interval(top, draws, 0.99).unwrap();
        assert!(ci.contains(fam.tail(3, t)), "{ci:?}");
    }

    #[test]
    fn near_boundary_draws() {
        let eps = 1e-9;
        let mut rng = Substream::new(1, "test", eps, None).block_rng(0);
        let ones = (0..1000)
            .filter(|_| sample_config(&emb(2), eps, 3, &mut rng).unwrap().levels() == [1, 1, 1])
            .count();
        assert_eq!(ones, 1000);
        assert!(sample_config(&emb(2), 0.0, 3, &mut rng).is_err());
    }

    #[test]
    fn same_seed_same_sequence() {
        let s = Substream::new(42, "x", 0.5, Some(1));
        let a: Vec<u64> = (0..8).map({ let mut r = s.block_rng(3); move |_| r.next_u64() }).collect();
        let b: Vec<u64> = (0..8).map({ let mut r = s.block_rng(3); move |_| r.next_u64() }).collect();
        assert_eq!(a, b);
        let c: Vec<u64> = (0..8).map({ let mut r = s.block_rng(4); move |_| r.next_u64() }).collect();
        assert_ne!(a, c);
        assert_ne!(s.key, Substream::new(42, "x", 0.5, Some(2)).key);
        assert_ne!(s.key, Substream::new(42, "y", 0.5, Some(1)).key);
        assert_ne!(s.key, Substream::new(43, "x", 0.5, Some(1)).key);
    }

    #[test]
    fn majority_measure_and_pivotal() {
        let maj = IncreasingEvent::majority(3, 2).unwrap();
        let est = estimate_measure(&maj, &emb(2), 0.6, McConfig::new(100_000, 11)).unwrap();
        let exact = measure_of_event(&maj, &emb(2), 0.6, CAP).unwrap();
        assert!((exact - 0.648).abs() < 1e-12);
        assert!(est.ci.contains(exact), "{est:?}");
        assert!(est.ci.lo <= est.value && est.value <= est.ci.hi);

        let est = estimate_pivotal(&maj, &emb(2), 0.5, 0, McConfig::new(100_000, 12)).unwrap();
        assert!(est.ci.contains(0.25), "{est:?}");
    }

    #[test]
    fn constant_events() {
        let full = IncreasingEvent::full(4, 3).unwrap();
        let est = estimate_measure(&full, &emb(3), 0.3, McConfig::new(1000, 0)).unwrap();
        assert_eq!((est.value, est.ci.lo, est.ci.hi), (1.0, 1.0, 1.0));
        let empty = IncreasingEvent::empty(4, 3).unwrap();
        let est = estimate_measure(&empty, &emb(3), 0.3, McConfig::new(1000, 0)).unwrap();
        assert_eq!((est.value, est.ci.lo, est.ci.hi), (0.0, 0.0, 0.0));
        let dict = IncreasingEvent::dictator(3, 2, 0).unwrap();
        let est = estimate_pivotal(&dict, &emb(2), 0.5, 2, McConfig::new(1000, 0)).unwrap();
        assert_eq!(est.successes, 0);
    }

    #[test]
    fn tribes_against_enumeration() {
        let tribes = IncreasingEvent::tribes(3, 3, 2).unwrap();
        for j in [0, 4, 8] {
            let est = estimate_pivotal(&tribes, &emb(2), 0.5, j, McConfig::new(100_000, 3)).unwrap();
            let exact = pivotal_probability(&tribes, &emb(2), 0.5, j, CAP).unwrap();
            assert!(est.ci.contains(exact), "{est:?} vs {exact}");
        }
    }

    #[test]
    fn rejects_bad_config() {
        let maj = IncreasingEvent::majority(3, 2).unwrap();
        assert!(estimate_measure(&maj, &emb(2), 0.5, McConfig::new(99, 0)).is_err());
        assert!(estimate_pivotal(&maj, &emb(2), 0.5, 3, McConfig::new(100, 0)).is_err());
        let cfg = McConfig { level: 1.0, ..McConfig::default() };
        assert!(estimate_measure(&maj, &emb(2), 0.5, cfg).is_err());
    }

    #[test]
    fn block_order_does_not_matter() {
        let maj = IncreasingEvent::majority(5, 3).unwrap();
        let cfg = McConfig { samples: 10_000, seed: 5, level: 0.99, block_size: 333 };
        let est = Estimator::new(&maj, &emb(3), 0.45, Target::Measure, cfg).unwrap();
        let fwd = (0..cfg.blocks()).map(|b| est.run_block(b)).fold(Tally::default(), Tally::merge);
        let rev = (0..cfg.blocks()).rev().map(|b| est.run_block(b)).fold(Tally::default(), Tally::merge);
        assert_eq!(fwd, rev);
        assert_eq!(fwd.samples, 10_000);
    }

    #[test]
    fn interval_shrinks_with_samples() {
        let maj = IncreasingEvent::majority(3, 2).unwrap();
        let a = estimate_measure(&maj, &emb(2), 0.6, McConfig::new(10_000, 1)).unwrap();
        let b = estimate_measure(&maj, &emb(2), 0.6, McConfig::new(1_000_000, 1)).unwrap();
        let ratio = a.ci.width() / b.ci.width();
        assert!((ratio - 10.0).abs() < 1.0, "{ratio}");
    }

    #[test]
    fn coupled_curve_is_pathwise_monotone() {
        let ev = IncreasingEvent::tribes(2, 3, 3).unwrap();
        let fam = MeasureFamily::power(vec![1.0, 3.0]).unwrap();
        let grid: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
        let curve = coupled_measure_curve(&ev, &fam, &grid, McConfig::new(20_000, 9)).unwrap();
        assert_eq!(curve.violations, 0);
        assert!(curve.is_monotone());
        for (t, est) in grid.iter().zip(&curve.estimates) {
            let exact = measure_of_event(&ev, &fam, *t, CAP).unwrap();
            assert!((est.value - exact).abs() < 0.03);
        }
        assert!(coupled_measure_curve(&ev, &fam, &[0.5, 0.4], McConfig::new(100, 0)).is_err());
    }
}
