//! Seeded synthetic Selmer data and towers over r[Γ × H_n], with validators
//! for the axioms the downstream constructions rely on.
//!
//! Primes are labelled 0..s in their fixed order. A level n ⊆ 𝒫 is a bitmask.

mod datum;
mod tower;
mod validate;

pub use datum::{generate_selmer, EulerData, Params, Regime, SelmerDatum, Sparse};
pub use tower::{generate_tower, TowerDatum, TowerLifts};
pub use validate::{exact_at, validate, validate_tower, AxiomCheck, ValidationReport};

use serde::{Deserialize, Serialize};

pub const DATUM_SCHEMA: &str = "bidualkit-datum/1";

/// A level n ⊆ 𝒫, bit j set when the j-th prime divides n.
pub type Level = u32;

#[derive(Debug, thiserror::Error)]
pub enum SelmerError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("datum is not regular")]
    DatumNotRegular,
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Primes of a level, in order.
pub fn primes_of(n: Level) -> Vec<usize> {
    (0..32).filter(|&j| n & (1 << j) != 0).collect()
}

pub fn nu(n: Level) -> usize {
    n.count_ones() as usize
}

/// All levels of a prime set of size s, in increasing mask order.
pub fn all_levels(s: usize) -> Vec<Level> {
    (0..(1u32 << s)).collect()
}

pub fn divides(n: Level, m: Level) -> bool {
    n & !m == 0
}

pub fn level_name(n: Level) -> String {
    if n == 0 {
        return "1".into();
    }
    primes_of(n).iter().map(|q| format!("q{}", q + 1)).collect::<Vec<_>>().join("")
}

/// On-disk form: a Selmer datum and optionally the lifts of a tower over it.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DatumFile {
    pub schema: String,
    pub datum: SelmerDatum,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tower: Option<TowerLifts>,
}

impl DatumFile {
    pub fn new(datum: SelmerDatum, tower: Option<TowerLifts>) -> Self {
        DatumFile { schema: DATUM_SCHEMA.into(), datum, tower }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("datum serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, SelmerError> {
        let f: DatumFile = serde_json::from_str(s)?;
        if f.schema != DATUM_SCHEMA {
            return Err(SelmerError::Schema(format!("expected {DATUM_SCHEMA}, found {}", f.schema)));
        }
        f.datum.check_shape()?;
        if let Some(t) = &f.tower {
            t.check_shape(&f.datum)?;
        }
        Ok(f)
    }

    pub fn tower_datum(&self) -> Option<TowerDatum> {
        self.tower.as_ref().map(|l| TowerDatum::new(self.datum.clone(), l.clone()))
    }
}
