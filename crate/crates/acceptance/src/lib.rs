//! Published reference series and a small pass/fail record for the
//! acceptance runner.

use std::collections::BTreeMap;
use std::path::PathBuf;

/// Published yearly series keyed by name, then year.
pub type Published = BTreeMap<String, BTreeMap<i32, f64>>;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Reads `fixtures/published_series.csv` (`series,year,value`).
pub fn published() -> Published {
    let mut out = Published::new();
    let mut reader = csv::Reader::from_path(fixture_path("published_series.csv")).expect("published series fixture");
    for row in reader.deserialize::<(String, i32, f64)>() {
        let (series, year, value) = row.expect("malformed published series row");
        out.entry(series).or_default().insert(year, value);
    }
    out
}

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

pub fn relative_error(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs()
}
