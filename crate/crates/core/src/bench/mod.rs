//! Monte Carlo experiments comparing the recovery programs on synthetic
//! sparse signals with partial, noisy prior knowledge.

mod experiment;
pub mod generators;
mod output;
pub mod rng;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{Method, ModelError, GAMMA_SWEEP};

pub use experiment::{
    draw_trial, find_n_exact, run_experiment, set_size_stats, ExperimentResult, NExactResult, SetSizes, SummaryRow,
    TrialDraw, TrialRecord,
};
pub use generators::{gen_gaussian_matrix, gen_signal, gen_support, Scenario, SupportDraw};
pub use output::{write_n_exact_csv, write_outputs, write_summary_csv, write_trials_csv};
pub use rng::Rng;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("generated prior violates its error bound: {0}")]
    PriorViolation(ModelError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

fn default_methods() -> Vec<String> {
    ["bp", "modcs", "weighted_l1", "regmodbp"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

fn default_gammas() -> Vec<f64> {
    GAMMA_SWEEP.to_vec()
}

fn default_good_set_cap() -> usize {
    20
}

fn default_true() -> bool {
    true
}

/// `n_exact` search grid as fractions of `m`: 0.05, 0.06, ..., 0.50.
pub fn default_n_exact_grid() -> Vec<f64> {
    (5..=50).map(|p| p as f64 / 100.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Signal length.
    pub m: usize,
    /// `|N|`
    pub support_size: usize,
    /// `|Δ| = |Δ_e|`
    pub u: usize,
    /// Measurement counts to evaluate.
    #[serde(default)]
    pub n_values: Vec<usize>,
    /// Measurement counts as fractions of `m`, rounded to the nearest
    /// integer; appended after `n_values`.
    #[serde(default)]
    pub n_fractions: Vec<f64>,
    pub scenario: Scenario,
    pub trials: usize,
    pub seed: u64,
    /// Any of `bp`, `modcs`, `weighted_l1`, `regmodbp`.
    #[serde(default = "default_methods")]
    pub methods: Vec<String>,
    /// γ values tried for `weighted_l1`; the best by `p_exact` is reported.
    #[serde(default = "default_gammas")]
    pub gamma_sweep: Vec<f64>,
    /// Draw every matrix from one stream, so smaller `n` gets the leading
    /// rows (renormalized) of the larger matrices. Default: an independent
    /// stream per `n`.
    #[serde(default)]
    pub reuse_matrix: bool,
    /// Also search the `n_exact_grid` for the smallest all-exact `n`.
    #[serde(default)]
    pub n_exact_search: bool,
    #[serde(default = "default_n_exact_grid")]
    pub n_exact_grid: Vec<f64>,
    /// Record `|T_g|` and `|T_b|` per trial.
    #[serde(default = "default_true")]
    pub good_set_stats: bool,
    /// Skip the good-set search when `|T_a|` exceeds this.
    #[serde(default = "default_good_set_cap")]
    pub good_set_cap: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let err = |s: String| Err(BenchError::Config(s));
        if self.support_size + self.u > self.m {
            return err(format!(
                "support_size + u = {} exceeds m = {}",
                self.support_size + self.u,
                self.m
            ));
        }
        if self.u > self.support_size {
            return err(format!("u = {} exceeds support_size = {}", self.u, self.support_size));
        }
        if self.trials == 0 {
            return err("trials must be at least 1".into());
        }
        self.scenario.validate().map_err(BenchError::Config)?;
        for n in self.n_list() {
            if n == 0 || n > self.m {
                return err(format!("n = {n} outside 1..={}", self.m));
            }
        }
        for &f in &self.n_exact_grid {
            let n = (f * self.m as f64).round() as usize;
            if n == 0 || n > self.m {
                return err(format!("grid fraction {f} gives n = {n} outside 1..={}", self.m));
            }
        }
        if self.n_exact_grid.windows(2).any(|w| w[0] >= w[1]) {
            return err("n_exact_grid must be strictly ascending".into());
        }
        self.methods()?;
        Ok(())
    }

    /// All `n` values, in config order.
    pub fn n_list(&self) -> Vec<usize> {
        let mut v = self.n_values.clone();
        v.extend(self.n_fractions.iter().map(|f| (f * self.m as f64).round() as usize));
        v
    }

    /// Methods with `weighted_l1` expanded over the γ sweep.
    pub fn methods(&self) -> Result<Vec<Method>, BenchError> {
        let mut out = Vec::new();
        for name in &self.methods {
            match name.as_str() {
                "weighted_l1" => {
                    if self.gamma_sweep.is_empty() {
                        return Err(BenchError::Config("gamma_sweep is empty".into()));
                    }
                    for &gamma in &self.gamma_sweep {
                        if !(gamma > 0.0 && gamma.is_finite()) {
                            return Err(BenchError::Config(format!("gamma must be positive, got {gamma}")));
                        }
                        out.push(Method::WeightedL1 { gamma });
                    }
                }
                other => out.push(other.parse::<Method>().map_err(BenchError::Config)?),
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        serde_json::from_str(
            r#"{"m": 64, "support_size": 6, "u": 1, "n_fractions": [0.25],
                "scenario": {"type": "quantized_grid", "k": 2, "rho": 0.1},
                "trials": 5, "seed": 1}"#,
        )
        .unwrap()
    }

    #[test]
    fn defaults_fill_in() {
        let c = base();
        assert_eq!(c.n_list(), vec![16]);
        assert_eq!(c.methods().unwrap().len(), 3 + GAMMA_SWEEP.len());
        assert_eq!(c.good_set_cap, 20);
        assert!(!c.reuse_matrix);
        assert_eq!(c.n_exact_grid.len(), 46);
        c.validate().unwrap();
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut c = base();
        c.u = 7;
        assert!(c.validate().is_err());
        let mut c = base();
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = base();
        c.methods = vec!["lasso".into()];
        assert!(c.validate().is_err());
        let mut c = base();
        c.n_values = vec![65];
        assert!(c.validate().is_err());
    }

    #[test]
    fn scenario_tags() {
        let s: Scenario = serde_json::from_str(r#"{"type": "three_bit"}"#).unwrap();
        assert_eq!(s, Scenario::ThreeBit);
        let s: Scenario = serde_json::from_str(r#"{"type": "continuous", "rho": 0.1}"#).unwrap();
        assert_eq!(s.rho(), 0.1);
    }
}
