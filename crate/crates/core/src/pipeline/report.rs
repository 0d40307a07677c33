//! Machine-readable results of a run.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::candidates::{BitBudget, CandidateBox};
use crate::numerics::{fraction_string, Enclosure};

/// Significant digits of every decimal in a report.
pub const DIGITS: usize = 25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub function: String,
    /// The endpoint expression as given.
    pub interval_end: String,
    /// The dyadic endpoint actually used, as a decimal.
    pub a: String,
    pub degree: usize,
    pub bits: Vec<i64>,
    pub precision: u32,
    pub lambda: Option<String>,
    pub minimax: Option<MinimaxReport>,
    pub hatp: Option<HatReport>,
    #[serde(rename = "box")]
    pub chebyshev_box: Option<BoxReport>,
    pub refined_box: Option<BoxReport>,
    pub pstar: Option<PstarReport>,
    /// `||f - p*|| / ||f - p̂||`.
    pub ratio: Option<f64>,
    /// `-log2(ratio)`.
    pub bits_saved: Option<f64>,
    pub timings: Vec<Timing>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimaxReport {
    /// Decimal coefficients, degree 0 first.
    pub coefficients: Vec<String>,
    pub epsilon: ErrorValue,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HatReport {
    pub coefficients: Vec<Coefficient>,
    pub epsilon_hat: ErrorValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PstarReport {
    pub coefficients: Vec<Coefficient>,
    pub error: ErrorValue,
    pub feasible: bool,
    pub checked: u64,
    pub pruned: String,
    /// The sampled constraints admitted nothing and the plain box was searched.
    pub unconstrained_fallback: bool,
}

/// An on-grid coefficient `numerator / 2^exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coefficient {
    pub numerator: String,
    pub exponent: i64,
    /// The same value as a reduced fraction.
    pub fraction: String,
}

/// A certified error: a decimal midpoint and the enclosure ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorValue {
    pub value: String,
    pub lo: String,
    pub hi: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxReport {
    pub degrees: Vec<BoxDegree>,
    pub total: String,
    /// Sample count and dyadic sampling endpoint, for a refined box.
    pub d: Option<u64>,
    pub a_sample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxDegree {
    pub lo: String,
    pub hi: String,
    pub count: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Per-degree counts of the refined box if there is one, else of the
    /// Chebyshev box.
    pub fn final_counts(&self) -> Option<Vec<String>> {
        let b = self.refined_box.as_ref().or(self.chebyshev_box.as_ref())?;
        Some(b.degrees.iter().map(|d| d.count.clone()).collect())
    }
}

impl Coefficient {
    pub fn new(c: &BigInt, m: i64, bits_value: &crate::numerics::Rational) -> Self {
        Coefficient { numerator: c.to_string(), exponent: m, fraction: fraction_string(bits_value) }
    }

    pub fn list(bits: &BitBudget, scaled: &[BigInt]) -> Vec<Self> {
        scaled.iter().enumerate().map(|(i, c)| Coefficient::new(c, bits.m(i), &bits.value(i, c))).collect()
    }
}

impl ErrorValue {
    pub fn new(e: &Enclosure) -> Self {
        ErrorValue { value: e.mid().to_decimal(DIGITS), lo: e.lo().to_decimal(DIGITS), hi: e.hi().to_decimal(DIGITS) }
    }
}

impl BoxReport {
    pub fn new(bx: &CandidateBox) -> Self {
        let degrees = (0..bx.len())
            .map(|i| BoxDegree {
                lo: fraction_string(&bx.lo_value(i)),
                hi: fraction_string(&bx.hi_value(i)),
                count: bx.count(i).to_string(),
            })
            .collect();
        BoxReport { degrees, total: bx.total().to_string(), d: None, a_sample: None }
    }
}
