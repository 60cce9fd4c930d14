use rayon::prelude::*;
use serde::Serialize;

use super::generators::{gen_gaussian_matrix, gen_signal, gen_support, SupportDraw};
use super::rng::{Rng, DOMAIN_MATRIX, DOMAIN_TRIAL};
use super::{BenchError, ExperimentConfig};
use crate::certificates::{classify_active, default_active_tol, good_set_search, sign_vector};
use crate::linalg::{cholesky, norm2, DenseMatrix};
use crate::models::{is_exact, recover, relative_error, Method, PriorKnowledge, RecoveryInstance};

/// One trial's random draw. Depends only on `(seed, trial)`, so every `n`
/// and every method sees the same signals.
#[derive(Debug, Clone)]
pub struct TrialDraw {
    pub support: SupportDraw,
    pub x: Vec<f64>,
    pub prior: PriorKnowledge,
}

pub fn draw_trial(config: &ExperimentConfig, trial: usize) -> TrialDraw {
    let mut rng = Rng::stream(config.seed, DOMAIN_TRIAL, trial as u64);
    let support = gen_support(config.m, config.support_size, config.u, &mut rng);
    let (x, prior) = gen_signal(config.m, &support, &config.scenario, &mut rng);
    TrialDraw { support, x, prior }
}

fn matrix_for(config: &ExperimentConfig, n: usize) -> DenseMatrix {
    let index = if config.reuse_matrix { 0 } else { n as u64 };
    let mut rng = Rng::stream(config.seed, DOMAIN_MATRIX, index);
    gen_gaussian_matrix(n, config.m, &mut rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SetSizes {
    /// `|T_a|`
    pub ta: usize,
    /// `|T_g|`; `None` when the search was skipped or its precondition
    /// (independent columns on `T ∪ Δ`) fails.
    pub tg: Option<usize>,
    /// `|T_b| = |T| − |T_g|`
    pub tb: Option<usize>,
}

/// Active, good and bad set sizes for one trial. The good-set search runs
/// only when `A_{T∪Δ}` has a positive-definite Gram matrix and
/// `|T_a| ≤ cap`.
pub fn set_size_stats(a: &DenseMatrix, draw: &TrialDraw, search: bool, cap: usize) -> Result<SetSizes, BenchError> {
    let prior = &draw.prior;
    let partition = classify_active(&draw.x, prior, default_active_tol(prior.rho()))
        .map_err(|e| BenchError::Config(e.to_string()))?;
    let ta = partition.active().len();
    let k = prior.k();
    let mut sizes = SetSizes { ta, tg: None, tb: None };
    if !search || ta > cap {
        return Ok(sizes);
    }
    let support = prior.t().union(&draw.support.delta);
    let independent = a
        .submatrix_cols(&support)
        .ok()
        .is_some_and(|s| cholesky(&s.gram()).is_ok());
    if !independent {
        return Ok(sizes);
    }
    let tg = if ta == 0 {
        Some(0)
    } else {
        let sgn = sign_vector(&draw.x, &draw.support.delta);
        good_set_search(a, &partition, &draw.support.delta, &sgn)
            .ok()
            .map(|g| g.t_g().len())
    };
    sizes.tg = tg;
    sizes.tb = tg.map(|g| k - g);
    Ok(sizes)
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub method: &'static str,
    pub gamma: Option<f64>,
    pub n: usize,
    pub trial: usize,
    /// `None` when the solver failed.
    pub exact: Option<bool>,
    pub rel_err: f64,
    /// `‖x̂ − x‖₂²` and `‖x‖₂²`, for the aggregate error.
    pub err_sq: f64,
    pub x_sq: f64,
    pub sizes: SetSizes,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub method: &'static str,
    /// Reported γ for `weighted_l1` (best `p_exact` over the sweep).
    pub gamma: Option<f64>,
    pub n: usize,
    pub p_exact: f64,
    /// Mean over trials of `‖x̂ − x‖₂ / ‖x‖₂`.
    pub nrmse_mean: f64,
    /// `√(Σ ‖x̂ − x‖₂² / Σ ‖x‖₂²)`
    pub nrmse_agg: f64,
    pub mean_ta: f64,
    pub mean_tg: Option<f64>,
    pub mean_tb: Option<f64>,
    pub failures: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NExactResult {
    pub method: &'static str,
    pub gamma: Option<f64>,
    /// Smallest grid `n` at which every trial is exact.
    pub n_exact: Option<usize>,
    /// Grid fraction of `n_exact`.
    pub fraction: Option<f64>,
    /// Non-monotone observations above `n_exact`; informational only.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
    pub n_exact: Vec<NExactResult>,
    pub failures: usize,
}

fn gamma_of(m: Method) -> Option<f64> {
    match m {
        Method::WeightedL1 { gamma } => Some(gamma),
        _ => None,
    }
}

fn run_trial(
    config: &ExperimentConfig,
    a: &DenseMatrix,
    n: usize,
    trial: usize,
    methods: &[Method],
) -> Result<Vec<TrialRecord>, BenchError> {
    let draw = draw_trial(config, trial);
    let inst =
        RecoveryInstance::from_signal(a.clone(), draw.x.clone()).map_err(|e| BenchError::Config(e.to_string()))?;
    draw.prior.validate(&inst).map_err(BenchError::PriorViolation)?;
    let search = config.good_set_stats && config.scenario.has_active_constraints();
    let sizes = set_size_stats(a, &draw, search, config.good_set_cap)?;
    let x_sq = norm2(&draw.x).powi(2);
    let records = methods
        .iter()
        .map(|&method| {
            let base = TrialRecord {
                method: method.name(),
                gamma: gamma_of(method),
                n,
                trial,
                exact: None,
                rel_err: f64::NAN,
                err_sq: f64::NAN,
                x_sq,
                sizes,
                error: None,
            };
            match recover(&inst, &draw.prior, method).and_then(|xh| Ok((relative_error(&xh, &draw.x)?, xh))) {
                Ok((rel, xh)) => {
                    let err_sq: f64 = xh.iter().zip(&draw.x).map(|(p, q)| (p - q) * (p - q)).sum();
                    TrialRecord {
                        exact: Some(is_exact(&xh, &draw.x).unwrap_or(false)),
                        rel_err: rel,
                        err_sq,
                        ..base
                    }
                }
                Err(e) => TrialRecord {
                    error: Some(e.to_string()),
                    ..base
                },
            }
        })
        .collect();
    Ok(records)
}

fn summarize(records: &[&TrialRecord], method: &'static str, gamma: Option<f64>, n: usize) -> SummaryRow {
    let total = records.len() as f64;
    let ok: Vec<&&TrialRecord> = records.iter().filter(|r| r.exact.is_some()).collect();
    let exact = ok.iter().filter(|r| r.exact == Some(true)).count() as f64;
    let nrmse_mean = if ok.is_empty() {
        f64::NAN
    } else {
        ok.iter().map(|r| r.rel_err).sum::<f64>() / ok.len() as f64
    };
    let err: f64 = ok.iter().map(|r| r.err_sq).sum();
    let xs: f64 = ok.iter().map(|r| r.x_sq).sum();
    let mean_opt = |f: &dyn Fn(&TrialRecord) -> Option<usize>| {
        let vals: Vec<usize> = records.iter().filter_map(|r| f(r)).collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<usize>() as f64 / vals.len() as f64)
    };
    SummaryRow {
        method,
        gamma,
        n,
        p_exact: exact / total,
        nrmse_mean,
        nrmse_agg: (err / xs).sqrt(),
        mean_ta: records.iter().map(|r| r.sizes.ta as f64).sum::<f64>() / total,
        mean_tg: mean_opt(&|r| r.sizes.tg),
        mean_tb: mean_opt(&|r| r.sizes.tb),
        failures: records.len() - ok.len(),
    }
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, BenchError> {
    Ok(rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()?)
}

/// Runs every configured `(n, method)` cell, and the `n_exact` search when
/// enabled. `workers = None` uses all cores; the output does not depend on
/// it.
pub fn run_experiment(config: &ExperimentConfig, workers: Option<usize>) -> Result<ExperimentResult, BenchError> {
    config.validate()?;
    let methods = config.methods()?;
    pool(workers)?.install(|| {
        let mut records = Vec::new();
        let mut summary = Vec::new();
        for n in config.n_list() {
            let a = matrix_for(config, n);
            let per_trial: Vec<Vec<TrialRecord>> = (0..config.trials)
                .into_par_iter()
                .map(|t| run_trial(config, &a, n, t, &methods))
                .collect::<Result<_, _>>()?;
            for mi in 0..methods.len() {
                records.extend(per_trial.iter().map(|t| t[mi].clone()));
            }
            let block = &records[records.len() - methods.len() * config.trials..];
            summary.extend(summarize_block(block, &methods, n));
        }

        let mut n_exact = Vec::new();
        if config.n_exact_search {
            let mut done: Vec<&'static str> = Vec::new();
            for &method in &methods {
                if done.contains(&method.name()) {
                    continue;
                }
                done.push(method.name());
                let variants: Vec<Method> = methods.iter().copied().filter(|m| m.name() == method.name()).collect();
                // Later γ values only need to beat the best n found so far.
                let mut best: Option<NExactResult> = None;
                for v in variants {
                    let below = best.as_ref().and_then(|b| b.n_exact);
                    let r = find_n_exact_in_pool(config, v, below);
                    if best.is_none() || r.n_exact.is_some() {
                        best = Some(r);
                    }
                }
                n_exact.extend(best);
            }
        }

        let failures = records.iter().filter(|r| r.exact.is_none()).count();
        Ok(ExperimentResult {
            config: config.clone(),
            records,
            summary,
            n_exact,
            failures,
        })
    })
}

/// One summary row per method name; `weighted_l1` reports its best γ by
/// `p_exact`, ties going to the earlier sweep entry.
fn summarize_block(block: &[TrialRecord], methods: &[Method], n: usize) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = Vec::new();
    for &method in methods {
        let recs: Vec<&TrialRecord> = block
            .iter()
            .filter(|r| r.method == method.name() && r.gamma == gamma_of(method))
            .collect();
        let row = summarize(&recs, method.name(), gamma_of(method), n);
        match rows.iter_mut().find(|r| r.method == row.method) {
            Some(existing) => {
                if row.p_exact > existing.p_exact {
                    *existing = row;
                }
            }
            None => rows.push(row),
        }
    }
    rows
}

fn trial_is_exact(config: &ExperimentConfig, a: &DenseMatrix, trial: usize, method: Method) -> bool {
    let draw = draw_trial(config, trial);
    let Ok(inst) = RecoveryInstance::from_signal(a.clone(), draw.x.clone()) else {
        return false;
    };
    match recover(&inst, &draw.prior, method) {
        Ok(xh) => is_exact(&xh, &draw.x).unwrap_or(false),
        Err(_) => false,
    }
}

/// Scans grid points with `n < below` (all points when `below` is `None`).
fn find_n_exact_in_pool(config: &ExperimentConfig, method: Method, below: Option<usize>) -> NExactResult {
    let grid: Vec<(f64, usize)> = config
        .n_exact_grid
        .iter()
        .map(|&f| (f, (f * config.m as f64).round() as usize))
        .collect();
    let limit = below.unwrap_or(usize::MAX);
    let all_exact = |n: usize| {
        let a = matrix_for(config, n);
        (0..config.trials)
            .into_par_iter()
            .all(|t| trial_is_exact(config, &a, t, method))
    };
    let mut result = NExactResult {
        method: method.name(),
        gamma: gamma_of(method),
        n_exact: None,
        fraction: None,
        notes: Vec::new(),
    };
    for (idx, &(f, n)) in grid.iter().enumerate() {
        if n >= limit {
            break;
        }
        if !all_exact(n) {
            continue;
        }
        result.n_exact = Some(n);
        result.fraction = Some(f);
        for &(_, n2) in grid.iter().skip(idx + 1).take(2) {
            if n2 != n && !all_exact(n2) {
                result
                    .notes
                    .push(format!("all trials exact at n = {n} but not at n = {n2}"));
            }
        }
        break;
    }
    result
}

/// Smallest grid `n` at which every trial recovers exactly, scanning the
/// grid in ascending order.
pub fn find_n_exact(
    config: &ExperimentConfig,
    method: Method,
    workers: Option<usize>,
) -> Result<NExactResult, BenchError> {
    config.validate()?;
    Ok(pool(workers)?.install(|| find_n_exact_in_pool(config, method, None)))
}
