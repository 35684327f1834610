//! Machine-readable run summaries.

use serde::Serialize;

use crate::error::Result;
use crate::hypergraph::{BMatchInstance, IntegralSolution};
use crate::packing::{ratio_or_one, Decomposition};
use crate::rational::{self, Rational};

/// Raw values of one run. Ratios are derived in [`SolveReport::view`], so
/// they always reflect the stored values.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub algorithm: String,
    pub lp_value: Rational,
    pub alpha: Option<Rational>,
    pub term_count: Option<usize>,
    pub best_value: Rational,
    pub best_solution: IntegralSolution,
    /// The approximation factor the run is certified against (ρ or 2k).
    pub bound: Rational,
    pub oracle_ilp: Option<Rational>,
    pub wall_time_us: Option<u128>,
}

/// Serialized form, in a stable field order with exact `p/q` rationals.
#[derive(Clone, Debug, Serialize)]
pub struct ReportView {
    pub algorithm: String,
    pub lp_value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub term_count: Option<usize>,
    pub best_value: String,
    pub best_solution: Vec<u64>,
    pub certified_ratio: String,
    pub bound: String,
    pub within_bound: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_ilp: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_ratio: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_us: Option<u128>,
}

impl SolveReport {
    /// Summary of a decomposition of `instance` whose best term is reported
    /// as-is.
    pub fn from_decomposition(
        algorithm: &str,
        instance: &BMatchInstance,
        decomposition: &Decomposition,
    ) -> Result<Self> {
        let (best_solution, best_value) = decomposition.best_term(&instance.w)?;
        Ok(Self {
            algorithm: algorithm.to_string(),
            lp_value: decomposition.lp.value.clone(),
            alpha: Some(decomposition.combination.alpha().clone()),
            term_count: Some(decomposition.combination.len()),
            best_value,
            best_solution,
            bound: decomposition.rho.clone(),
            oracle_ilp: None,
            wall_time_us: None,
        })
    }

    /// `LP / best`, with `0/0 = 1`.
    pub fn certified_ratio(&self) -> Result<Rational> {
        ratio_or_one(&self.lp_value, &self.best_value)
    }

    pub fn view(&self) -> Result<ReportView> {
        let ratio = self.certified_ratio()?;
        let oracle_ratio = self
            .oracle_ilp
            .as_ref()
            .map(|ilp| ratio_or_one(ilp, &self.best_value))
            .transpose()?;
        Ok(ReportView {
            algorithm: self.algorithm.clone(),
            lp_value: rational::format(&self.lp_value),
            alpha: self.alpha.as_ref().map(rational::format),
            term_count: self.term_count,
            best_value: rational::format(&self.best_value),
            best_solution: self.best_solution.multiplicities.clone(),
            within_bound: ratio <= self.bound,
            certified_ratio: rational::format(&ratio),
            bound: rational::format(&self.bound),
            oracle_ilp: self.oracle_ilp.as_ref().map(rational::format),
            oracle_ratio: oracle_ratio.as_ref().map(rational::format),
            wall_time_us: self.wall_time_us,
        })
    }
}
