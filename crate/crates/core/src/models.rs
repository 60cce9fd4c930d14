//! Recovery problems and their reduction to linear programs.
//!
//! All four programs minimize a weighted ℓ1 norm subject to `Aβ = y`:
//!
//! | method        | weight on `T^c` | treatment of `β_T`            |
//! |---------------|-----------------|-------------------------------|
//! | `bp`          | 1               | weight 1                      |
//! | `modcs`       | 1               | free                          |
//! | `weighted_l1` | 1               | weight γ                      |
//! | `regmodbp`    | 1               | boxed to `[μ̂_i − ρ, μ̂_i + ρ]` |
//!
//! A penalized coordinate is split as `β_i = p_i − q_i` with `p, q ≥ 0`, so
//! the LP has exactly `n` equality rows and the box is a plain variable bound.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::io::{load_matrix, CsvError};
use crate::linalg::{norm2, DenseMatrix, IndexSet};
use crate::lp::{solve_lp_with, LpError, LpStatus, SimplexOptions, StandardLp};

/// Magnitudes below this are given sign 0.
pub const SIGN_ZERO_TOL: f64 = 1e-14;
/// Relative error below which a reconstruction counts as exact.
pub const EXACT_REL_TOL: f64 = 1e-5;
/// Weighted-ℓ1 γ values tried by default.
pub const GAMMA_SWEEP: [f64; 4] = [0.1, 0.05, 0.01, 0.001];

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("measurements do not match A·x_true (max deviation {0:e})")]
    InconsistentMeasurements(f64),
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("prior violates |x_i - mu_hat_i| <= rho at index {index} (gap {gap:e}, rho {rho})")]
    PriorViolation { index: usize, gap: f64, rho: f64 },
    #[error("gamma must be positive and finite, got {0}")]
    InvalidGamma(f64),
    #[error("true signal is zero; relative error undefined")]
    ZeroSignal,
    #[error("recovery LP is infeasible")]
    Infeasible,
    #[error("recovery LP reported unbounded (internal error)")]
    Unbounded,
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone)]
pub struct RecoveryInstance {
    a: DenseMatrix,
    y: Vec<f64>,
    x_true: Option<Vec<f64>>,
}

impl RecoveryInstance {
    pub fn new(a: DenseMatrix, y: Vec<f64>, x_true: Option<Vec<f64>>) -> Result<Self, ModelError> {
        if y.len() != a.rows() {
            return Err(ModelError::Dimension(format!(
                "y has length {} but A has {} rows",
                y.len(),
                a.rows()
            )));
        }
        if a.rows() == 0 {
            return Err(ModelError::Dimension("A has no rows".into()));
        }
        if let Some(x) = &x_true {
            if x.len() != a.cols() {
                return Err(ModelError::Dimension(format!(
                    "x_true has length {} but A has {} columns",
                    x.len(),
                    a.cols()
                )));
            }
            let ax = a.matvec(x);
            let dev = ax.iter().zip(&y).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
            let scale = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if dev > 1e-12 * scale {
                return Err(ModelError::InconsistentMeasurements(dev));
            }
        }
        Ok(RecoveryInstance { a, y, x_true })
    }

    /// Noise-free instance `y = A x`.
    pub fn from_signal(a: DenseMatrix, x: Vec<f64>) -> Result<Self, ModelError> {
        if x.len() != a.cols() {
            return Err(ModelError::Dimension(format!(
                "x has length {} but A has {} columns",
                x.len(),
                a.cols()
            )));
        }
        let y = a.matvec(&x);
        Self::new(a, y, Some(x))
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x_true(&self) -> Option<&[f64]> {
        self.x_true.as_deref()
    }

    /// Number of measurements.
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// Signal length.
    pub fn m(&self) -> usize {
        self.a.cols()
    }

    /// Support `N` of the true signal, empty if unknown.
    pub fn support(&self) -> IndexSet {
        match &self.x_true {
            Some(x) => x
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, _)| i)
                .collect(),
            None => IndexSet::empty(),
        }
    }
}

/// Partial support knowledge `T` with signal estimates `μ̂_T` and a bound
/// `ρ` on their error. `rho = ∞` means no bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorKnowledge {
    t: IndexSet,
    mu_hat: Vec<f64>,
    rho: f64,
}

impl PriorKnowledge {
    /// `mu_hat[k]` is the estimate for the `k`-th smallest index of `t`.
    pub fn new(t: IndexSet, mu_hat: Vec<f64>, rho: f64) -> Result<Self, ModelError> {
        if mu_hat.len() != t.len() {
            return Err(ModelError::InvalidPrior(format!(
                "mu_hat has length {} but T has {} entries",
                mu_hat.len(),
                t.len()
            )));
        }
        if rho.is_nan() || rho < 0.0 {
            return Err(ModelError::InvalidPrior(format!("rho must be nonnegative, got {rho}")));
        }
        if mu_hat.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::InvalidPrior("mu_hat has non-finite entries".into()));
        }
        Ok(PriorKnowledge { t, mu_hat, rho })
    }

    /// Support knowledge only, as used by mod-CS.
    pub fn support_only(t: IndexSet) -> Self {
        let k = t.len();
        PriorKnowledge {
            t,
            mu_hat: vec![0.0; k],
            rho: f64::INFINITY,
        }
    }

    /// Builds from unsorted `(index, estimate)` pairs.
    pub fn from_pairs(pairs: &[(usize, f64)], rho: f64) -> Result<Self, ModelError> {
        let mut p = pairs.to_vec();
        p.sort_by_key(|&(i, _)| i);
        if p.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(ModelError::InvalidPrior("T has repeated indices".into()));
        }
        let t: IndexSet = p.iter().map(|&(i, _)| i).collect();
        Self::new(t, p.into_iter().map(|(_, v)| v).collect(), rho)
    }

    pub fn t(&self) -> &IndexSet {
        &self.t
    }

    pub fn mu_hat(&self) -> &[f64] {
        &self.mu_hat
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self, ModelError> {
        Self::new(self.t.clone(), self.mu_hat.clone(), rho)
    }

    /// `k = |T|`
    pub fn k(&self) -> usize {
        self.t.len()
    }

    /// `μ̂` expanded to length `m`, zero off `T`.
    pub fn mu_hat_full(&self, m: usize) -> Vec<f64> {
        let mut out = vec![0.0; m];
        for (i, &v) in self.t.iter().zip(&self.mu_hat) {
            out[i] = v;
        }
        out
    }

    /// `Δ = N ∖ T`, the missed support.
    pub fn delta(&self, inst: &RecoveryInstance) -> IndexSet {
        inst.support().difference(&self.t)
    }

    /// `Δ_e = T ∖ N`, the wrongly included indices.
    pub fn delta_e(&self, inst: &RecoveryInstance) -> IndexSet {
        self.t.difference(&inst.support())
    }

    /// `u = |Δ|`
    pub fn u(&self, inst: &RecoveryInstance) -> usize {
        self.delta(inst).len()
    }

    /// Checks `T ⊆ [0, m)` and, when `x_true` is known, `‖x_T − μ̂_T‖_∞ ≤ ρ`
    /// up to `1e-9·max(1, ρ)`.
    pub fn validate(&self, inst: &RecoveryInstance) -> Result<(), ModelError> {
        if let Some(max) = self.t.max() {
            if max >= inst.m() {
                return Err(ModelError::InvalidPrior(format!(
                    "T contains index {max} but m = {}",
                    inst.m()
                )));
            }
        }
        if let (Some(x), true) = (inst.x_true(), self.rho.is_finite()) {
            let tol = 1e-9 * self.rho.max(1.0);
            for (i, &mu) in self.t.iter().zip(&self.mu_hat) {
                let gap = (x[i] - mu).abs();
                if gap > self.rho + tol {
                    return Err(ModelError::PriorViolation {
                        index: i,
                        gap,
                        rho: self.rho,
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Bp,
    ModCs,
    WeightedL1 { gamma: f64 },
    RegModBp,
}

impl Method {
    /// Name used in CSV output and on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Method::Bp => "bp",
            Method::ModCs => "modcs",
            Method::WeightedL1 { .. } => "weighted_l1",
            Method::RegModBp => "regmodbp",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::WeightedL1 { gamma } => write!(f, "weighted_l1(gamma={gamma})"),
            m => f.write_str(m.name()),
        }
    }
}

impl FromStr for Method {
    type Err = String;

    /// Accepts `bp`, `modcs`, `regmodbp`, `weighted_l1` (γ = 0.1) and
    /// `weighted_l1:<gamma>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bp" => Ok(Method::Bp),
            "modcs" => Ok(Method::ModCs),
            "regmodbp" => Ok(Method::RegModBp),
            "weighted_l1" => Ok(Method::WeightedL1 { gamma: GAMMA_SWEEP[0] }),
            _ => {
                if let Some(g) = s.strip_prefix("weighted_l1:") {
                    let gamma: f64 = g.parse().map_err(|_| format!("bad gamma {g:?}"))?;
                    if !(gamma > 0.0 && gamma.is_finite()) {
                        return Err(format!("gamma must be positive, got {gamma}"));
                    }
                    Ok(Method::WeightedL1 { gamma })
                } else {
                    Err(format!(
                        "unknown method {s:?} (expected bp, modcs, weighted_l1[:gamma], regmodbp)"
                    ))
                }
            }
        }
    }
}

/// An LP together with the map back to `β`.
#[derive(Debug, Clone)]
pub struct ReducedProgram {
    pub lp: StandardLp,
    /// `neg_col[i] = Some(j)` when `β_i = x_i − x_j`; otherwise `β_i = x_i`.
    neg_col: Vec<Option<usize>>,
}

impl ReducedProgram {
    pub fn extract_beta(&self, solution: &[f64]) -> Vec<f64> {
        self.neg_col
            .iter()
            .enumerate()
            .map(|(i, neg)| match neg {
                Some(j) => solution[i] - solution[*j],
                None => solution[i],
            })
            .collect()
    }
}

enum Coord {
    /// Penalized with the given positive weight.
    Weighted(f64),
    Free,
    Boxed(f64, f64),
}

fn build(inst: &RecoveryInstance, coord: impl Fn(usize) -> Coord) -> ReducedProgram {
    let (n, m) = inst.a().shape();
    let coords: Vec<Coord> = (0..m).map(&coord).collect();
    let splits: Vec<usize> = (0..m).filter(|&i| matches!(coords[i], Coord::Weighted(_))).collect();
    let total = m + splits.len();

    let mut objective = vec![0.0; total];
    let mut lower = vec![0.0; total];
    let mut upper = vec![f64::INFINITY; total];
    let mut neg_col = vec![None; m];
    for (i, c) in coords.iter().enumerate() {
        match *c {
            Coord::Weighted(w) => objective[i] = w,
            Coord::Free => lower[i] = f64::NEG_INFINITY,
            Coord::Boxed(l, u) => {
                lower[i] = l;
                upper[i] = u;
            }
        }
    }
    for (k, &i) in splits.iter().enumerate() {
        let j = m + k;
        objective[j] = objective[i];
        neg_col[i] = Some(j);
    }

    let a = inst.a();
    let mut data = Vec::with_capacity(n * total);
    for r in 0..n {
        let row = a.row(r);
        data.extend_from_slice(row);
        data.extend(splits.iter().map(|&i| -row[i]));
    }
    let a_eq = DenseMatrix::new(n, total, data).expect("finite entries");
    ReducedProgram {
        lp: StandardLp {
            objective,
            a_eq,
            b_eq: inst.y().to_vec(),
            lower,
            upper,
        },
        neg_col,
    }
}

/// `min ‖β‖₁ s.t. Aβ = y`
pub fn reduce_bp(inst: &RecoveryInstance) -> ReducedProgram {
    build(inst, |_| Coord::Weighted(1.0))
}

/// `min ‖β_{T^c}‖₁ s.t. Aβ = y`
pub fn reduce_modcs(inst: &RecoveryInstance, prior: &PriorKnowledge) -> Result<ReducedProgram, ModelError> {
    prior.validate(inst)?;
    let t = prior.t();
    Ok(build(inst, |i| {
        if t.contains(i) {
            Coord::Free
        } else {
            Coord::Weighted(1.0)
        }
    }))
}

/// `min ‖β_{T^c}‖₁ + γ‖β_T‖₁ s.t. Aβ = y`
pub fn reduce_weighted_l1(
    inst: &RecoveryInstance,
    prior: &PriorKnowledge,
    gamma: f64,
) -> Result<ReducedProgram, ModelError> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(ModelError::InvalidGamma(gamma));
    }
    prior.validate(inst)?;
    let t = prior.t();
    Ok(build(inst, |i| {
        Coord::Weighted(if t.contains(i) { gamma } else { 1.0 })
    }))
}

/// `min ‖β_{T^c}‖₁ s.t. Aβ = y, |β_i − μ̂_i| ≤ ρ for i ∈ T`
pub fn reduce_regmodbp(inst: &RecoveryInstance, prior: &PriorKnowledge) -> Result<ReducedProgram, ModelError> {
    prior.validate(inst)?;
    let mu = prior.mu_hat_full(inst.m());
    let (t, rho) = (prior.t(), prior.rho());
    Ok(build(inst, |i| {
        if !t.contains(i) {
            Coord::Weighted(1.0)
        } else if rho.is_finite() {
            Coord::Boxed(mu[i] - rho, mu[i] + rho)
        } else {
            Coord::Free
        }
    }))
}

pub fn reduce(inst: &RecoveryInstance, prior: &PriorKnowledge, method: Method) -> Result<ReducedProgram, ModelError> {
    match method {
        Method::Bp => Ok(reduce_bp(inst)),
        Method::ModCs => reduce_modcs(inst, prior),
        Method::WeightedL1 { gamma } => reduce_weighted_l1(inst, prior, gamma),
        Method::RegModBp => reduce_regmodbp(inst, prior),
    }
}

pub fn recover(inst: &RecoveryInstance, prior: &PriorKnowledge, method: Method) -> Result<Vec<f64>, ModelError> {
    recover_with(inst, prior, method, &SimplexOptions::default())
}

pub fn recover_with(
    inst: &RecoveryInstance,
    prior: &PriorKnowledge,
    method: Method,
    opts: &SimplexOptions,
) -> Result<Vec<f64>, ModelError> {
    let reduced = reduce(inst, prior, method)?;
    let out = solve_lp_with(&reduced.lp, opts)?;
    match out.status {
        LpStatus::Optimal => Ok(reduced.extract_beta(&out.solution)),
        LpStatus::Infeasible => Err(ModelError::Infeasible),
        LpStatus::Unbounded => Err(ModelError::Unbounded),
    }
}

/// Elementwise sign, with magnitudes below [`SIGN_ZERO_TOL`] mapped to 0.
pub fn sign_pattern(b: &[f64]) -> Vec<i8> {
    b.iter()
        .map(|&v| {
            if v.abs() < SIGN_ZERO_TOL {
                0
            } else if v > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

pub fn clip_0_7(b: &[f64]) -> Vec<f64> {
    b.iter().map(|&v| v.clamp(0.0, 7.0)).collect()
}

/// `‖x̂ − x‖₂ / ‖x‖₂`
pub fn relative_error(x_hat: &[f64], x: &[f64]) -> Result<f64, ModelError> {
    if x_hat.len() != x.len() {
        return Err(ModelError::Dimension(format!(
            "estimate has length {} but signal has {}",
            x_hat.len(),
            x.len()
        )));
    }
    let nx = norm2(x);
    if nx == 0.0 {
        return Err(ModelError::ZeroSignal);
    }
    let diff: Vec<f64> = x_hat.iter().zip(x).map(|(a, b)| a - b).collect();
    Ok(norm2(&diff) / nx)
}

pub fn is_exact(x_hat: &[f64], x: &[f64]) -> Result<bool, ModelError> {
    Ok(relative_error(x_hat, x)? < EXACT_REL_TOL)
}

/// On-disk instance description. `A` is a path to a CSV matrix, resolved
/// relative to the JSON file. `mu_hat[k]` pairs with `T[k]`; a missing or
/// null `rho` means no bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(rename = "A")]
    pub a: PathBuf,
    pub y: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_true: Option<Vec<f64>>,
    #[serde(rename = "T", default)]
    pub t: Vec<usize>,
    #[serde(default)]
    pub mu_hat: Vec<f64>,
    #[serde(default)]
    pub rho: Option<f64>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid instance JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot load matrix {path}: {source}")]
    Matrix { path: PathBuf, source: CsvError },
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl InstanceFile {
    pub fn into_problem(self, base_dir: &Path) -> Result<(RecoveryInstance, PriorKnowledge), LoadError> {
        let path = base_dir.join(&self.a);
        let a = load_matrix(&path).map_err(|source| LoadError::Matrix { path, source })?;
        let inst = RecoveryInstance::new(a, self.y, self.x_true)?;
        let mu_hat = if self.mu_hat.is_empty() && !self.t.is_empty() {
            vec![0.0; self.t.len()]
        } else {
            self.mu_hat
        };
        if mu_hat.len() != self.t.len() {
            return Err(ModelError::InvalidPrior(format!(
                "mu_hat has length {} but T has {} entries",
                mu_hat.len(),
                self.t.len()
            ))
            .into());
        }
        let pairs: Vec<(usize, f64)> = self.t.into_iter().zip(mu_hat).collect();
        let prior = PriorKnowledge::from_pairs(&pairs, self.rho.unwrap_or(f64::INFINITY))?;
        prior.validate(&inst)?;
        Ok((inst, prior))
    }
}

pub fn load_instance(path: &Path) -> Result<(RecoveryInstance, PriorKnowledge), LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: InstanceFile = serde_json::from_str(&text)?;
    file.into_problem(path.parent().unwrap_or(Path::new(".")))
}
