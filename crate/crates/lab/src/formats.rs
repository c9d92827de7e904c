//! JSON definitions of events and measure families.
//!
//! Events:
//!
//! ```json
//! {"kind": "dnf", "n": 3, "r": 2, "clauses": [[{"coord": 0, "level": 2}, {"coord": 1, "level": 2}]]}
//! {"kind": "table", "n": 2, "r": 2, "table": "CA=="}
//! {"kind": "builtin", "n": 3, "r": 2, "builtin": {"name": "majority"}}
//! ```
//!
//! Table bit `i` (the configuration of rank `i`, coordinate 0 least
//! significant) is bit `i % 8` of byte `i / 8`, base64 encoded.
//!
//! Families:
//!
//! ```json
//! {"kind": "embedded", "r": 3}
//! {"kind": "power", "alpha": [1.0, 2.0]}
//! {"kind": "tabulated", "r": 3, "interval": [0.0, 1.0], "t": [...], "tails": [[...], [...]]}
//! ```

use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use serde::{Deserialize, Serialize};
use threshold_core::measure_family::DerivativeMode;
use threshold_core::product_space::{Builtin, ClauseTerm, EventRepr, Level, TruthTable};
use threshold_core::{IncreasingEvent, MeasureFamily, MonotoneClause};

use crate::error::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EventSpec {
    Dnf {
        n: usize,
        r: u32,
        clauses: Vec<Vec<TermSpec>>,
    },
    Table {
        n: usize,
        r: u32,
        table: String,
    },
    Builtin {
        n: usize,
        r: u32,
        builtin: BuiltinSpec,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coord: usize,
    pub level: Level,
}

/// `level` defaults to `r` where optional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum BuiltinSpec {
    Dictator {
        #[serde(default)]
        coord: usize,
        level: Option<Level>,
    },
    KOfN {
        k: usize,
        level: Level,
    },
    Majority {
        level: Option<Level>,
    },
    Tribes {
        block: usize,
        blocks: usize,
        level: Option<Level>,
    },
    Constant {
        value: bool,
    },
}

impl EventSpec {
    pub fn build(&self) -> threshold_core::Result<IncreasingEvent> {
        match self {
            EventSpec::Dnf { n, r, clauses } => {
                let clauses = clauses
                    .iter()
                    .map(|c| {
                        MonotoneClause::new(
                            c.iter()
                                .map(|t| ClauseTerm {
                                    coord: t.coord,
                                    min_level: t.level,
                                })
                                .collect(),
                        )
                    })
                    .collect();
                IncreasingEvent::dnf(*n, *r, clauses)
            }
            EventSpec::Table { n, r, table } => {
                let bytes = STANDARD
                    .decode(table)
                    .map_err(|e| threshold_core::Error::InvalidEvent(format!("table is not base64: {e}")))?;
                let len = usize::try_from(threshold_core::product_space::Shape::new(*n, *r)?.size())
                    .map_err(|_| threshold_core::Error::InvalidEvent("table too large".into()))?;
                IncreasingEvent::table(*n, *r, TruthTable::from_bytes(len, &bytes)?)
            }
            EventSpec::Builtin { n, r, builtin } => {
                let top = u16::try_from(*r).unwrap_or(u16::MAX);
                let b = match *builtin {
                    BuiltinSpec::Dictator { coord, level } => Builtin::Dictator {
                        coord,
                        level: level.unwrap_or(top),
                    },
                    BuiltinSpec::KOfN { k, level } => Builtin::KOfN { k, level },
                    BuiltinSpec::Majority { level } => Builtin::Majority {
                        level: level.unwrap_or(top),
                    },
                    BuiltinSpec::Tribes { block, blocks, level } => Builtin::Tribes {
                        block,
                        blocks,
                        level: level.unwrap_or(top),
                    },
                    BuiltinSpec::Constant { value } => Builtin::Constant(value),
                };
                IncreasingEvent::builtin(*n, *r, b)
            }
        }
    }

    /// Inverse of [`EventSpec::build`] up to defaulted fields.
    pub fn from_event(event: &IncreasingEvent) -> Self {
        let (n, r) = (event.n(), event.r());
        match event.repr() {
            EventRepr::Dnf(clauses) => EventSpec::Dnf {
                n,
                r,
                clauses: clauses
                    .iter()
                    .map(|c| {
                        c.terms()
                            .iter()
                            .map(|t| TermSpec {
                                coord: t.coord,
                                level: t.min_level,
                            })
                            .collect()
                    })
                    .collect(),
            },
            EventRepr::Table(table) => EventSpec::Table {
                n,
                r,
                table: STANDARD.encode(table.to_bytes()),
            },
            EventRepr::Builtin(b) => EventSpec::Builtin {
                n,
                r,
                builtin: match *b {
                    Builtin::Dictator { coord, level } => BuiltinSpec::Dictator {
                        coord,
                        level: Some(level),
                    },
                    Builtin::KOfN { k, level } => BuiltinSpec::KOfN { k, level },
                    Builtin::Majority { level } => BuiltinSpec::Majority { level: Some(level) },
                    Builtin::Tribes { block, blocks, level } => BuiltinSpec::Tribes {
                        block,
                        blocks,
                        level: Some(level),
                    },
                    Builtin::Constant(value) => BuiltinSpec::Constant { value },
                },
            },
        }
    }

    pub fn is_table(&self) -> bool {
        matches!(self, EventSpec::Table { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Embedded {
        r: u32,
    },
    Power {
        alpha: Vec<f64>,
    },
    Tabulated {
        r: u32,
        interval: (f64, f64),
        t: Vec<f64>,
        /// Row `k − 2` holds `G_k` on the grid.
        tails: Vec<Vec<f64>>,
        /// Central-difference step; default 1e-4.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fd_step: Option<f64>,
    },
}

impl FamilySpec {
    pub fn build(&self) -> threshold_core::Result<MeasureFamily> {
        match self {
            FamilySpec::Embedded { r } => MeasureFamily::embedded(*r),
            FamilySpec::Power { alpha } => MeasureFamily::power(alpha.clone()),
            FamilySpec::Tabulated {
                r,
                interval,
                t,
                tails,
                fd_step,
            } => {
                let family = MeasureFamily::tabulated(*r, *interval, t.clone(), tails.clone())?;
                match fd_step {
                    Some(step) => family.with_derivative_mode(DerivativeMode::FiniteDifference { step: *step }),
                    None => Ok(family),
                }
            }
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, LabError> {
    let text = std::fs::read_to_string(path).map_err(|source| LabError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| LabError::Schema {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
