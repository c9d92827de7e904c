//! Configurations of `{1,…,r}^n` and increasing events on them.
//!
//! Configurations are ranked in mixed radix `r` with coordinate 0 as the
//! least significant digit; a truth table is a packed bitset indexed by that
//! rank.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A level in `{1,…,r}`.
pub type Level = u16;

/// One point of `{1,…,r}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelConfig {
    levels: Vec<Level>,
}

impl LevelConfig {
    pub fn new(levels: Vec<Level>, r: u32) -> Result<Self> {
        for (coord, &level) in levels.iter().enumerate() {
            if level == 0 || u32::from(level) > r {
                return Err(Error::LevelOutOfRange {
                    coord,
                    level: level.into(),
                    r,
                });
            }
        }
        Ok(Self { levels })
    }

    /// The all-ones configuration (every coordinate at the lowest level).
    pub fn bottom(n: usize) -> Self {
        Self { levels: vec![1; n] }
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, coord: usize) -> Level {
        self.levels[coord]
    }

    pub fn into_levels(self) -> Vec<Level> {
        self.levels
    }
}

/// Returns `x` with coordinate `coord` set to `level`; `x` is untouched.
pub fn flip_coordinate(x: &LevelConfig, coord: usize, level: Level, r: u32) -> Result<LevelConfig> {
    if coord >= x.len() {
        return Err(Error::CoordinateOutOfRange { coord, n: x.len() });
    }
    if level == 0 || u32::from(level) > r {
        return Err(Error::LevelOutOfRange {
            coord,
            level: level.into(),
            r,
        });
    }
    let mut levels = x.levels.clone();
    levels[coord] = level;
    Ok(LevelConfig { levels })
}

/// Dimensions `(n, r)` of a product space, with mixed-radix ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    n: usize,
    r: u32,
}

impl Shape {
    pub fn new(n: usize, r: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if r < 2 || r > u32::from(Level::MAX) {
            return Err(Error::InvalidArgument(format!(
                "alphabet size r={r} must lie in 2..={}",
                Level::MAX
            )));
        }
        Ok(Self { n, r })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// `r^n`, saturating at `u128::MAX`.
    pub fn size(&self) -> u128 {
        pow_saturating(self.r, self.n)
    }

    /// `r^n` as a `usize`, or a capacity error when it exceeds `cap`.
    pub fn checked_size(&self, cap: u64) -> Result<usize> {
        checked_states(self.size(), cap)
    }

    /// `r^coord`, the rank increment for raising `coord` by one level.
    pub fn stride(&self, coord: usize) -> usize {
        (self.r as usize).pow(coord as u32)
    }

    pub fn rank(&self, x: &LevelConfig) -> Result<u128> {
        self.conforms(x)?;
        let mut rank = 0u128;
        for &level in x.levels.iter().rev() {
            rank = rank * u128::from(self.r) + u128::from(level - 1);
        }
        Ok(rank)
    }

    pub fn unrank(&self, mut rank: u128) -> Result<LevelConfig> {
        if rank >= self.size() {
            return Err(Error::InvalidArgument(format!(
                "rank {rank} outside 0..{}",
                self.size()
            )));
        }
        let r = u128::from(self.r);
        let mut levels = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            levels.push((rank % r) as Level + 1);
            rank /= r;
        }
        Ok(LevelConfig { levels })
    }

    pub fn conforms(&self, x: &LevelConfig) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        for (coord, &level) in x.levels.iter().enumerate() {
            if level == 0 || u32::from(level) > self.r {
                return Err(Error::LevelOutOfRange {
                    coord,
                    level: level.into(),
                    r: self.r,
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn pow_saturating(base: u32, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = match acc.checked_mul(u128::from(base)) {
            Some(v) => v,
            None => return u128::MAX,
        };
    }
    acc
}

pub(crate) fn checked_states(required: u128, cap: u64) -> Result<usize> {
    if required > u128::from(cap) || required > usize::MAX as u128 {
        return Err(Error::Capacity { required, cap });
    }
    Ok(required as usize)
}

/// Packed bitset over ranks `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    len: usize,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut table = Self::zeros(len);
        for rank in 0..len {
            if f(rank) {
                table.set(rank, true);
            }
        }
        table
    }

    /// Bit `i` is bit `i % 8` of byte `i / 8`.
    pub fn from_bytes(len: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::InvalidEvent(format!(
                "table of {len} entries needs {} bytes, got {}",
                len.div_ceil(8),
                bytes.len()
            )));
        }
        let mut table = Self::zeros(len);
        for (i, &byte) in bytes.iter().enumerate() {
            table.words[i / 8] |= u64::from(byte) << (8 * (i % 8));
        }
        if !len.is_multiple_of(64) {
            let tail = table.words.last().copied().unwrap_or(0) >> (len % 64);
            if tail != 0 {
                return Err(Error::InvalidEvent("table has bits set beyond its length".into()));
            }
        }
        Ok(table)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        (0..self.len.div_ceil(8))
            .map(|i| (self.words[i / 8] >> (8 * (i % 8))) as u8)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, rank: usize) -> bool {
        debug_assert!(rank < self.len);
        (self.words[rank >> 6] >> (rank & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, rank: usize, value: bool) {
        let mask = 1u64 << (rank & 63);
        if value {
            self.words[rank >> 6] |= mask;
        } else {
            self.words[rank >> 6] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// One constraint `x_coord ≥ min_level` of a monotone clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClauseTerm {
    pub coord: usize,
    pub min_level: Level,
}

/// A conjunction of lower-bound constraints. The empty clause is always
/// satisfied.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MonotoneClause {
    terms: Vec<ClauseTerm>,
}

impl MonotoneClause {
    pub fn new(terms: Vec<ClauseTerm>) -> Self {
        Self { terms }
    }

    pub fn from_pairs(pairs: &[(usize, Level)]) -> Self {
        Self {
            terms: pairs
                .iter()
                .map(|&(coord, min_level)| ClauseTerm { coord, min_level })
                .collect(),
        }
    }

    pub fn terms(&self) -> &[ClauseTerm] {
        &self.terms
    }

    #[inline]
    pub fn satisfied(&self, levels: &[Level]) -> bool {
        self.terms.iter().all(|t| levels[t.coord] >= t.min_level)
    }

    fn validate(&self, shape: Shape) -> Result<()> {
        for t in &self.terms {
            if t.coord >= shape.n {
                return Err(Error::InvalidEvent(format!(
                    "clause coordinate {} outside 0..{}",
                    t.coord, shape.n
                )));
            }
            if t.min_level < 2 || u32::from(t.min_level) > shape.r {
                return Err(Error::InvalidEvent(format!(
                    "clause minimal level {} outside 2..={}",
                    t.min_level, shape.r
                )));
            }
        }
        Ok(())
    }
}

/// Named increasing events. Every `level` is the threshold a coordinate must
/// reach to count as "up".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// `x_coord ≥ level`.
    Dictator { coord: usize, level: Level },
    /// At least `k` coordinates at `level` or above.
    KOfN { k: usize, level: Level },
    /// `k = ⌊n/2⌋ + 1`.
    Majority { level: Level },
    /// OR over `blocks` consecutive blocks of size `block` of the AND of
    /// `x_j ≥ level` within the block; `n = block·blocks`.
    Tribes {
        block: usize,
        blocks: usize,
        level: Level,
    },
    Constant(bool),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventRepr {
    Table(TruthTable),
    Dnf(Vec<MonotoneClause>),
    Builtin(Builtin),
}

/// An indicator on `{1,…,r}^n`, expected to be coordinate-wise
/// nondecreasing. Truth tables can encode anything, so monotonicity is
/// established separately by [`check_monotone`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncreasingEvent {
    shape: Shape,
    repr: EventRepr,
}

impl IncreasingEvent {
    pub fn dnf(n: usize, r: u32, clauses: Vec<MonotoneClause>) -> Result<Self> {
        let shape = Shape::new(n, r)?;
        for clause in &clauses {
            clause.validate(shape)?;
        }
        Ok(Self {
            shape,
            repr: EventRepr::Dnf(clauses),
        })
    }

    pub fn table(n: usize, r: u32, table: TruthTable) -> Result<Self> {
        let shape = Shape::new(n, r)?;
        if shape.size() != table.len() as u128 {
            return Err(Error::InvalidEvent(format!(
                "table has {} entries, r^n = {}",
                table.len(),
                shape.size()
            )));
        }
        Ok(Self {
            shape,
            repr: EventRepr::Table(table),
        })
    }

    pub fn builtin(n: usize, r: u32, builtin: Builtin) -> Result<Self> {
        let shape = Shape::new(n, r)?;
        let check_level = |level: Level| {
            if level < 2 || u32::from(level) > r {
                Err(Error::InvalidEvent(format!("level {level} outside 2..={r}")))
            } else {
                Ok(())
            }
        };
        match builtin {
            Builtin::Dictator { coord, level } => {
                if coord >= n {
                    return Err(Error::CoordinateOutOfRange { coord, n });
                }
                check_level(level)?;
            }
            Builtin::KOfN { level, .. } | Builtin::Majority { level } => check_level(level)?,
            Builtin::Tribes {
                block,
                blocks,
                level,
            } => {
                if block == 0 || blocks == 0 || block.checked_mul(blocks) != Some(n) {
                    return Err(Error::InvalidEvent(format!(
                        "tribes {block}x{blocks} does not cover n={n} coordinates"
                    )));
                }
                check_level(level)?;
            }
            Builtin::Constant(_) => {}
        }
        Ok(Self {
            shape,
            repr: EventRepr::Builtin(builtin),
        })
    }

    /// `x_coord = r`.
    pub fn dictator(n: usize, r: u32, coord: usize) -> Result<Self> {
        Self::builtin(n, r, Builtin::Dictator { coord, level: top_level(r)? })
    }

    /// Strict majority of coordinates at level `r`.
    pub fn majority(n: usize, r: u32) -> Result<Self> {
        Self::builtin(n, r, Builtin::Majority { level: top_level(r)? })
    }

    pub fn k_of_n(n: usize, r: u32, k: usize, level: Level) -> Result<Self> {
        Self::builtin(n, r, Builtin::KOfN { k, level })
    }

    /// Tribes with every coordinate required at level `r`.
    pub fn tribes(block: usize, blocks: usize, r: u32) -> Result<Self> {
        Self::builtin(
            block * blocks,
            r,
            Builtin::Tribes {
                block,
                blocks,
                level: top_level(r)?,
            },
        )
    }

    pub fn full(n: usize, r: u32) -> Result<Self> {
        Self::builtin(n, r, Builtin::Constant(true))
    }

    pub fn empty(n: usize, r: u32) -> Result<Self> {
        Self::builtin(n, r, Builtin::Constant(false))
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn n(&self) -> usize {
        self.shape.n
    }

    pub fn r(&self) -> u32 {
        self.shape.r
    }

    pub fn repr(&self) -> &EventRepr {
        &self.repr
    }

    pub fn eval(&self, x: &LevelConfig) -> Result<bool> {
        self.shape.conforms(x)?;
        Ok(self.eval_levels(x.levels()))
    }

    /// Evaluates without validating `levels`; the caller guarantees they
    /// conform to the event's shape.
    #[inline]
    pub fn eval_levels(&self, levels: &[Level]) -> bool {
        debug_assert_eq!(levels.len(), self.shape.n);
        match &self.repr {
            EventRepr::Table(table) => {
                let r = self.shape.r as usize;
                let rank = levels
                    .iter()
                    .rev()
                    .fold(0usize, |acc, &l| acc * r + usize::from(l - 1));
                table.get(rank)
            }
            EventRepr::Dnf(clauses) => clauses.iter().any(|c| c.satisfied(levels)),
            EventRepr::Builtin(b) => match *b {
                Builtin::Dictator { coord, level } => levels[coord] >= level,
                Builtin::KOfN { k, level } => count_at_least(levels, level) >= k,
                Builtin::Majority { level } => count_at_least(levels, level) > levels.len() / 2,
                Builtin::Tribes { block, level, .. } => levels
                    .chunks(block)
                    .any(|tribe| tribe.iter().all(|&l| l >= level)),
                Builtin::Constant(value) => value,
            },
        }
    }

    /// The value of the event when it is constant by construction, without
    /// enumerating anything.
    pub fn constant_value(&self) -> Option<bool> {
        match &self.repr {
            EventRepr::Table(table) => match table.count_ones() {
                0 => Some(false),
                ones if ones == table.len() => Some(true),
                _ => None,
            },
            EventRepr::Dnf(clauses) => {
                if clauses.is_empty() {
                    Some(false)
                } else if clauses.iter().any(|c| c.terms.is_empty()) {
                    Some(true)
                } else {
                    None
                }
            }
            EventRepr::Builtin(b) => match *b {
                Builtin::KOfN { k: 0, .. } => Some(true),
                Builtin::KOfN { k, .. } if k > self.shape.n => Some(false),
                Builtin::Constant(value) => Some(value),
                _ => None,
            },
        }
    }

    /// Materializes the indicator as a truth table over all `r^n` ranks.
    pub fn tabulate(&self, cap: u64) -> Result<TruthTable> {
        if let EventRepr::Table(table) = &self.repr {
            return Ok(table.clone());
        }
        let len = self.shape.checked_size(cap)?;
        let mut table = TruthTable::zeros(len);
        let mut levels = vec![1 as Level; self.shape.n];
        let top = self.shape.r as Level;
        for rank in 0..len {
            if self.eval_levels(&levels) {
                table.set(rank, true);
            }
            advance(&mut levels, top);
        }
        Ok(table)
    }
}

fn top_level(r: u32) -> Result<Level> {
    Level::try_from(r).map_err(|_| Error::InvalidArgument(format!("r={r} too large")))
}

#[inline]
fn count_at_least(levels: &[Level], level: Level) -> usize {
    levels.iter().filter(|&&l| l >= level).count()
}

/// Steps `levels` to the next configuration in rank order, wrapping to the
/// bottom after the last one.
#[inline]
pub(crate) fn advance(levels: &mut [Level], top: Level) {
    for l in levels.iter_mut() {
        if *l < top {
            *l += 1;
            return;
        }
        *l = 1;
    }
}

/// A configuration `x` and coordinate `coord` with `x_coord < r` such that
/// raising `x_coord` by one level leaves the event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneViolation {
    pub config: LevelConfig,
    pub coord: usize,
}

/// Exhaustive search for a monotonicity violation.
pub fn find_monotone_violation(event: &IncreasingEvent, cap: u64) -> Result<Option<MonotoneViolation>> {
    let shape = event.shape();
    let table = event.tabulate(cap)?;
    let top = shape.r as Level;
    let mut levels = vec![1 as Level; shape.n];
    for rank in 0..table.len() {
        if table.get(rank) {
            let mut stride = 1usize;
            for coord in 0..shape.n {
                if levels[coord] < top && !table.get(rank + stride) {
                    return Ok(Some(MonotoneViolation {
                        config: LevelConfig {
                            levels: levels.clone(),
                        },
                        coord,
                    }));
                }
                stride *= shape.r as usize;
            }
        }
        advance(&mut levels, top);
    }
    Ok(None)
}

/// True iff raising any single coordinate never takes a configuration out
/// of the event.
pub fn check_monotone(event: &IncreasingEvent, cap: u64) -> Result<bool> {
    Ok(find_monotone_violation(event, cap)?.is_none())
}

/// All configurations of `{1,…,r}^n` in rank order.
pub fn enumerate_configs(n: usize, r: u32, cap: u64) -> Result<ConfigIter> {
    let shape = Shape::new(n, r)?;
    let total = shape.checked_size(cap)?;
    Ok(ConfigIter {
        next: vec![1; n],
        top: r as Level,
        remaining: total,
    })
}

#[derive(Debug, Clone)]
pub struct ConfigIter {
    next: Vec<Level>,
    top: Level,
    remaining: usize,
}

impl Iterator for ConfigIter {
    type Item = LevelConfig;

    fn next(&mut self) -> Option<LevelConfig> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let current = LevelConfig {
            levels: self.next.clone(),
        };
        advance(&mut self.next, self.top);
        Some(current)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for ConfigIter {}
