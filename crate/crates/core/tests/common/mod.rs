//! Brute-force reference implementations and random test cases.
//!
//! Nothing here calls into the library's enumeration code: configurations
//! are decoded with div/mod, events are evaluated clause by clause, and the
//! level laws are written out from their closed forms.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use threshold_core::product_space::{IncreasingEvent, MonotoneClause};
use threshold_core::MeasureFamily;

/// A monotone DNF kept in plain form: clauses of `(coord, min_level)`.
#[derive(Debug, Clone)]
pub struct Dnf {
    pub n: usize,
    pub r: u32,
    pub clauses: Vec<Vec<(usize, u16)>>,
}

impl Dnf {
    pub fn eval(&self, x: &[u16]) -> bool {
        self.clauses
            .iter()
            .any(|c| c.iter().all(|&(j, l)| x[j] >= l))
    }

    pub fn event(&self) -> IncreasingEvent {
        let clauses = self.clauses.iter().map(|c| MonotoneClause::from_pairs(c)).collect();
        IncreasingEvent::dnf(self.n, self.r, clauses).unwrap()
    }
}

/// Closed-form level law.
#[derive(Debug, Clone)]
pub enum Law {
    Embedded(u32),
    /// Exponents of `G_2, …, G_r`.
    Power(Vec<f64>),
}

impl Law {
    pub fn r(&self) -> u32 {
        match self {
            Law::Embedded(r) => *r,
            Law::Power(a) => a.len() as u32 + 1,
        }
    }

    pub fn family(&self) -> MeasureFamily {
        match self {
            Law::Embedded(r) => MeasureFamily::embedded(*r).unwrap(),
            Law::Power(a) => MeasureFamily::power(a.clone()).unwrap(),
        }
    }

    /// `(p_1..p_r, p_1'..p_r')`.
    pub fn pmf(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        match self {
            Law::Embedded(r) => {
                let r = *r as usize;
                let mut p = vec![0.0; r];
                let mut d = vec![0.0; r];
                p[0] = 1.0 - t;
                p[r - 1] = t;
                d[0] = -1.0;
                d[r - 1] = 1.0;
                (p, d)
            }
            Law::Power(a) => {
                let r = a.len() + 1;
                let tail = |k: usize| if k == 1 { 1.0 } else if k > r { 0.0 } else { t.powf(a[k - 2]) };
                let dtail = |k: usize| {
                    if k == 1 || k > r {
                        0.0
                    } else {
                        a[k - 2] * t.powf(a[k - 2] - 1.0)
                    }
                };
                let p = (1..=r).map(|k| tail(k) - tail(k + 1)).collect();
                let d = (1..=r).map(|k| dtail(k) - dtail(k + 1)).collect();
                (p, d)
            }
        }
    }
}

pub fn decode(mut rank: usize, n: usize, r: u32) -> Vec<u16> {
    (0..n)
        .map(|_| {
            let d = rank % r as usize;
            rank /= r as usize;
            d as u16 + 1
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Naive {
    pub nu: f64,
    pub influences: Vec<f64>,
    pub pivotal: Vec<f64>,
    pub derivative: f64,
}

/// Full `r^n` loops straight from the definitions.
pub fn naive(eval: impl Fn(&[u16]) -> bool, n: usize, law: &Law, t: f64) -> Naive {
    let r = law.r();
    let (p, d) = law.pmf(t);
    let states = (r as usize).pow(n as u32);
    let mut out = Naive {
        nu: 0.0,
        influences: vec![0.0; n],
        pivotal: vec![0.0; n],
        derivative: 0.0,
    };
    for rank in 0..states {
        let x = decode(rank, n, r);
        let w: f64 = x.iter().map(|&l| p[l as usize - 1]).product();
        let fx = eval(&x);
        if fx {
            out.nu += w;
            for j in 0..n {
                let rest: f64 = (0..n).filter(|&l| l != j).map(|l| p[x[l] as usize - 1]).product();
                out.derivative += d[x[j] as usize - 1] * rest;
            }
        }
        for j in 0..n {
            let mut y = x.clone();
            y[j] = r as u16;
            let top = eval(&y);
            y[j] = 1;
            let bottom = eval(&y);
            out.influences[j] += w * (f64::from(u8::from(top)) - f64::from(u8::from(bottom)));
            if fx && !bottom {
                out.pivotal[j] += w;
            }
        }
    }
    out
}

pub fn random_dnf(rng: &mut ChaCha8Rng, max_n: usize, max_r: u32) -> Dnf {
    let n = rng.random_range(1..=max_n);
    let r = rng.random_range(2..=max_r);
    let count = rng.random_range(0..=4);
    let clauses = (0..count)
        .map(|_| {
            let len = rng.random_range(1..=n);
            let mut coords: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                coords.swap(i, rng.random_range(0..=i));
            }
            coords[..len]
                .iter()
                .map(|&j| (j, rng.random_range(2..=r as u16)))
                .collect()
        })
        .collect();
    Dnf { n, r, clauses }
}

pub fn random_law(rng: &mut ChaCha8Rng, r: u32) -> Law {
    if rng.random_bool(0.5) {
        Law::Embedded(r)
    } else {
        let mut a: Vec<f64> = (0..r - 1).map(|_| rng.random_range(0.5..2.5)).collect();
        a.sort_by(f64::total_cmp);
        Law::Power(a)
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
