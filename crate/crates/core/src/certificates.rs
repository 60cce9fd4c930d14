//! Dual certificates for exact recovery by the box-constrained program.
//!
//! A signal `x` is the unique minimizer if the relevant columns are
//! independent and some `w` satisfies
//!
//! 1. `A_{T_in}'w = 0`, `A_{T_a+}'w ⪰ 0`, `A_{T_a−}'w ⪯ 0`
//! 2. `A_Δ'w = sgn(x_Δ)`
//! 3. `|A_j'w| < 1` for every `j ∉ T ∪ Δ`
//!
//! where `T_a±` are the prior coordinates whose box constraint is tight.
//! [`build_certificate`] constructs such a `w` as an alternating series of
//! projected interpolants and [`verify_lemma1`] checks the three conditions
//! numerically.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{cholesky, norm2, norm_inf, project_out, solve_spd, DenseMatrix, IndexSet, LinalgError};
use crate::models::{sign_pattern, PriorKnowledge};
use crate::rip::{a_fn, theorem1_conditions, ConditionReport, RipError, RipTable};

/// Margin required for the strict sign tests of the good-set search.
pub const STRICT_MARGIN: f64 = 1e-10;
/// Tolerance of the certificate verifier.
pub const VERIFY_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CertError {
    #[error("rho below tolerance: index {0} is active on both sides")]
    RhoBelowTolerance(usize),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("recovery conditions fail; use force mode to build anyway")]
    ConditionsFail(Box<ConditionReport>),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Rip(#[from] RipError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Split of the prior support `T` by which side of the box, if any, `x`
/// touches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivePartition {
    pub t_a_plus: IndexSet,
    pub t_a_minus: IndexSet,
    pub t_in: IndexSet,
}

impl ActivePartition {
    /// `T_a = T_a+ ∪ T_a−`
    pub fn active(&self) -> IndexSet {
        self.t_a_plus.union(&self.t_a_minus)
    }

    pub fn t(&self) -> IndexSet {
        self.active().union(&self.t_in)
    }
}

/// Default activity tolerance `1e-9 · max(1, ρ)`.
pub fn default_active_tol(rho: f64) -> f64 {
    1e-9 * rho.max(1.0)
}

/// `i ∈ T_a+` iff `x_i − μ̂_i = ρ` and `i ∈ T_a−` iff `x_i − μ̂_i = −ρ`, both
/// up to `tol`. With `ρ = ∞` nothing is active.
pub fn classify_active(x: &[f64], prior: &PriorKnowledge, tol: f64) -> Result<ActivePartition, CertError> {
    let rho = prior.rho();
    let (mut plus, mut minus, mut inner) = (Vec::new(), Vec::new(), Vec::new());
    for (i, &mu) in prior.t().iter().zip(prior.mu_hat()) {
        if !rho.is_finite() {
            inner.push(i);
            continue;
        }
        let d = x[i] - mu;
        let p = (d - rho).abs() <= tol;
        let q = (d + rho).abs() <= tol;
        match (p, q) {
            (true, true) => return Err(CertError::RhoBelowTolerance(i)),
            (true, false) => plus.push(i),
            (false, true) => minus.push(i),
            (false, false) => inner.push(i),
        }
    }
    Ok(ActivePartition {
        t_a_plus: IndexSet::new(plus),
        t_a_minus: IndexSet::new(minus),
        t_in: IndexSet::new(inner),
    })
}

/// `sgn(x_Δ)` as reals.
pub fn sign_vector(x: &[f64], delta: &IndexSet) -> Vec<f64> {
    let vals: Vec<f64> = delta.iter().map(|i| x[i]).collect();
    sign_pattern(&vals).into_iter().map(f64::from).collect()
}

fn gram_solve(g: DenseMatrix, rhs: &[f64], what: &str) -> Result<Vec<f64>, CertError> {
    let b = DenseMatrix::new(rhs.len(), 1, rhs.to_vec())?;
    match solve_spd(&g, &b) {
        Ok(z) => Ok(z.as_slice().to_vec()),
        Err(LinalgError::NotPositiveDefinite { .. }) | Err(LinalgError::SingularGram) => {
            Err(CertError::HypothesisViolated(format!("{what} Gram matrix is singular")))
        }
        Err(e) => Err(e.into()),
    }
}

/// `w̃ = M(S) A_D (A_D' M(S) A_D)^{-1} c`, so that `A_S'w̃ = 0` and
/// `A_D'w̃ = c`.
fn interpolant(a: &DenseMatrix, s: &IndexSet, d: &IndexSet, c: &[f64]) -> Result<Vec<f64>, CertError> {
    if d.is_empty() {
        return Ok(vec![0.0; a.rows()]);
    }
    let a_d = a.submatrix_cols(d)?;
    let ma = project_out(a, s, &a_d).map_err(|e| match e {
        LinalgError::SingularGram => {
            CertError::HypothesisViolated("columns indexed by the zero set are dependent".into())
        }
        other => other.into(),
    })?;
    let mut inner = a_d.tr_matmul(&ma)?;
    let k = inner.rows();
    for i in 0..k {
        for j in 0..i {
            let v = 0.5 * (inner[(i, j)] + inner[(j, i)]);
            inner[(i, j)] = v;
            inner[(j, i)] = v;
        }
    }
    let z = gram_solve(inner, c, "projected interpolation")?;
    Ok(ma.matvec(&z))
}

/// `w̃ = M(T_b) A_Δ (A_Δ' M(T_b) A_Δ)^{-1} sgn(x_Δ)`
pub fn lemma2_w(a: &DenseMatrix, t_b: &IndexSet, delta: &IndexSet, sgn: &[f64]) -> Result<Vec<f64>, CertError> {
    interpolant(a, t_b, delta, sgn)
}

/// Coordinates `j ∉ excluded` with `|A_j'w| > threshold`.
pub fn exceptional_set(a: &DenseMatrix, w: &[f64], excluded: &IndexSet, threshold: f64) -> IndexSet {
    let corr = a.tr_matvec(w);
    (0..a.cols())
        .filter(|&j| !excluded.contains(j) && corr[j].abs() > threshold)
        .collect()
}

fn corr_on(a: &DenseMatrix, w: &[f64], s: &IndexSet) -> Vec<f64> {
    s.iter().map(|j| a.col_dot(j, w)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Result {
    pub w: Vec<f64>,
    /// Exceptional set `E`, disjoint with `T ∪ T_d`.
    pub e: IndexSet,
    pub c_norm: f64,
    /// `a · ‖c‖₂ / √š`
    pub threshold: f64,
    /// `‖A_E'w̃‖₂`
    pub e_norm: f64,
    /// `max |A_j'w̃|` over `j ∉ T ∪ T_d ∪ E`
    pub off_max: f64,
    pub w_norm: f64,
}

/// `w̃ = M(T) A_{T_d} (A_{T_d}' M(T) A_{T_d})^{-1} c` and its exceptional set
/// `E = { j ∉ T ∪ T_d : |A_j'w̃| > a_coef · ‖c‖₂ / √š }`. The caller supplies
/// `a_coef = a_k(s, š)` for some `s ≥ |T_d|`.
pub fn lemma3_w(
    a: &DenseMatrix,
    t: &IndexSet,
    t_d: &IndexSet,
    c: &[f64],
    a_coef: f64,
    s_check: usize,
) -> Result<Lemma3Result, CertError> {
    if !t.is_disjoint(t_d) {
        return Err(CertError::HypothesisViolated("T_d must be disjoint with T".into()));
    }
    if c.len() != t_d.len() {
        return Err(CertError::HypothesisViolated(format!(
            "c has length {} but T_d has {} entries",
            c.len(),
            t_d.len()
        )));
    }
    if s_check == 0 {
        return Err(CertError::HypothesisViolated("s_check must be positive".into()));
    }
    let w = interpolant(a, t, t_d, c)?;
    let c_norm = norm2(c);
    let threshold = a_coef * c_norm / (s_check as f64).sqrt();
    let excluded = t.union(t_d);
    let e = exceptional_set(a, &w, &excluded, threshold);
    let e_norm = norm2(&corr_on(a, &w, &e));
    let off = excluded.union(&e);
    let corr = a.tr_matvec(&w);
    let off_max = (0..a.cols())
        .filter(|&j| !off.contains(j))
        .fold(0.0f64, |m, j| m.max(corr[j].abs()));
    let w_norm = norm2(&w);
    Ok(Lemma3Result {
        w,
        e,
        c_norm,
        threshold,
        e_norm,
        off_max,
        w_norm,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodSetResult {
    pub t_a_plus_g: IndexSet,
    pub t_a_minus_g: IndexSet,
    pub t_b: IndexSet,
    pub k_b: usize,
    /// Interpolant built with the selected `T_b`.
    pub w: Vec<f64>,
}

impl GoodSetResult {
    /// `T_g = T_a+g ∪ T_a−g`
    pub fn t_g(&self) -> IndexSet {
        self.t_a_plus_g.union(&self.t_a_minus_g)
    }
}

fn strict_signs(a: &DenseMatrix, w: &[f64], plus: &IndexSet, chosen: &[usize]) -> bool {
    chosen.iter().all(|&i| {
        let v = a.col_dot(i, w);
        if plus.contains(i) {
            v > STRICT_MARGIN
        } else {
            v < -STRICT_MARGIN
        }
    })
}

/// Largest `T_g ⊆ T_a` such that the interpolant built with
/// `T_b = T ∖ T_g` has `A_i'w > 0` on `T_g ∩ T_a+` and `A_i'w < 0` on
/// `T_g ∩ T_a−`. Candidates are tried by decreasing size and, within a
/// size, in lexicographic order of the sorted active list; the first pass
/// is returned.
pub fn good_set_search(
    a: &DenseMatrix,
    partition: &ActivePartition,
    delta: &IndexSet,
    sgn: &[f64],
) -> Result<GoodSetResult, CertError> {
    let t = partition.t();
    let active = partition.active();
    let list = active.as_slice();
    for size in (1..=list.len()).rev() {
        let total = crate::rip::binomial(list.len(), size) as u64;
        let found = (0..total)
            .into_par_iter()
            .map(|rank| {
                let pick = crate::rip::Combinations::from_rank(list.len(), size, rank as u128)
                    .next()
                    .expect("rank in range");
                let g: Vec<usize> = pick.iter().map(|&p| list[p]).collect();
                let t_b = t.difference(&IndexSet::new(g.clone()));
                match lemma2_w(a, &t_b, delta, sgn) {
                    Ok(w) if strict_signs(a, &w, &partition.t_a_plus, &g) => Some((g, t_b, w)),
                    _ => None,
                }
            })
            .find_first(|r| r.is_some())
            .flatten();
        if let Some((g, t_b, w)) = found {
            let g = IndexSet::new(g);
            return Ok(GoodSetResult {
                t_a_plus_g: g.intersection(&partition.t_a_plus),
                t_a_minus_g: g.intersection(&partition.t_a_minus),
                k_b: t_b.len(),
                t_b,
                w,
            });
        }
    }
    let w = lemma2_w(a, &t, delta, sgn)?;
    Ok(GoodSetResult {
        t_a_plus_g: IndexSet::empty(),
        t_a_minus_g: IndexSet::empty(),
        k_b: t.len(),
        t_b: t,
        w,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Check {
    pub name: String,
    /// `None` when the check is vacuous (empty index set).
    pub value: Option<f64>,
    pub requirement: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub checks: Vec<Lemma1Check>,
    pub pass: bool,
    /// `"certified"` or `"inconclusive"`; a failed check never implies the
    /// signal is not recoverable.
    pub verdict: String,
}

/// Numerically checks the three certificate conditions plus `δ_{k+u} < 1`.
/// When `delta_k_plus_u` is `None` the last check is replaced by a direct
/// positive-definiteness test of the Gram matrix of `A_{T∪Δ}`.
pub fn verify_lemma1(
    a: &DenseMatrix,
    w: &[f64],
    partition: &ActivePartition,
    delta: &IndexSet,
    sgn: &[f64],
    delta_k_plus_u: Option<f64>,
) -> Lemma1Report {
    let tol = VERIFY_TOL;
    let mut checks = Vec::new();

    let v_in = corr_on(a, w, &partition.t_in);
    let in_max = (!v_in.is_empty()).then(|| norm_inf(&v_in));
    checks.push(Lemma1Check {
        name: "max |A_i'w|, i in T_in".into(),
        value: in_max,
        requirement: format!("<= {tol:e}"),
        pass: in_max.map_or(true, |v| v <= tol),
    });

    let v_plus = corr_on(a, w, &partition.t_a_plus);
    let plus_min = v_plus.iter().copied().reduce(f64::min);
    checks.push(Lemma1Check {
        name: "min A_i'w, i in T_a+".into(),
        value: plus_min,
        requirement: format!(">= -{tol:e}"),
        pass: plus_min.map_or(true, |v| v >= -tol),
    });

    let v_minus = corr_on(a, w, &partition.t_a_minus);
    let minus_max = v_minus.iter().copied().reduce(f64::max);
    checks.push(Lemma1Check {
        name: "max A_i'w, i in T_a-".into(),
        value: minus_max,
        requirement: format!("<= {tol:e}"),
        pass: minus_max.map_or(true, |v| v <= tol),
    });

    let v_delta = corr_on(a, w, delta);
    let interp = (!delta.is_empty()).then(|| v_delta.iter().zip(sgn).fold(0.0f64, |m, (v, s)| m.max((v - s).abs())));
    checks.push(Lemma1Check {
        name: "max |A_i'w - sgn(x_i)|, i in Delta".into(),
        value: interp,
        requirement: format!("<= {tol:e}"),
        pass: interp.map_or(true, |v| v <= tol),
    });

    let t = partition.t();
    let support = t.union(delta);
    let off = support.complement(a.cols());
    let v_off = corr_on(a, w, &off);
    let off_max = (!v_off.is_empty()).then(|| norm_inf(&v_off));
    checks.push(Lemma1Check {
        name: "max |A_j'w|, j outside T and Delta".into(),
        value: off_max,
        requirement: format!("< 1 - {tol:e}"),
        pass: off_max.map_or(true, |v| v < 1.0 - tol),
    });

    match delta_k_plus_u {
        Some(d) => checks.push(Lemma1Check {
            name: "delta_{k+u}".into(),
            value: Some(d),
            requirement: "< 1".into(),
            pass: d < 1.0,
        }),
        None => {
            let (value, pass) = if support.is_empty() {
                (None, true)
            } else {
                let g = a.submatrix_cols(&support).map(|s| s.gram());
                match g {
                    Ok(g) => match cholesky(&g) {
                        Ok(ch) => (Some(ch.min_pivot() * ch.min_pivot()), true),
                        Err(_) => (Some(0.0), false),
                    },
                    Err(_) => (None, false),
                }
            };
            checks.push(Lemma1Check {
                name: "Gram of A on T and Delta positive definite (smallest squared pivot)".into(),
                value,
                requirement: "> 0".into(),
                pass,
            });
        }
    }

    let pass = checks.iter().all(|c| c.pass);
    Lemma1Report {
        checks,
        pass,
        verdict: if pass { "certified" } else { "inconclusive" }.into(),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CertificateOptions {
    pub max_iters: usize,
    /// Stop once a series term has norm below this.
    pub tol_series: f64,
    /// Build even when the recovery conditions fail, and report instead of
    /// erroring on a non-decaying series.
    pub force: bool,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions {
            max_iters: 200,
            tol_series: 1e-12,
            force: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub k: usize,
    pub u: usize,
    pub k_b: usize,
    pub conditions: ConditionReport,
    pub partition: ActivePartition,
    pub t_a_plus_g: IndexSet,
    pub t_a_minus_g: IndexSet,
    pub w: Vec<f64>,
    /// Number of nonzero series terms summed.
    pub series_terms: usize,
    /// `‖A_{T_{d,r}}'w_r‖₂` for each term.
    pub residual_norms: Vec<f64>,
    /// Set when the series was cut off without meeting its stopping rule or
    /// the decay bound failed (only possible in force mode).
    pub diagnostics: Vec<String>,
    pub lemma1: Lemma1Report,
}

/// Builds `w = Σ_r (−1)^{r−1} w_r`. The first term is the good-set
/// interpolant; each later term cancels the previous term on its
/// exceptional set `T_{d,r}` while staying orthogonal to `A_T` and zero on
/// `Δ`. The exceptional sets use `š = u`.
#[allow(clippy::too_many_arguments)]
pub fn build_certificate(
    a: &DenseMatrix,
    partition: &ActivePartition,
    good: &GoodSetResult,
    delta: &IndexSet,
    sgn: &[f64],
    table: &RipTable,
    opts: &CertificateOptions,
) -> Result<CertificateReport, CertError> {
    let t = partition.t();
    let (k, u, k_b) = (t.len(), delta.len(), good.k_b);
    let conditions = theorem1_conditions(table, k, u, k_b)?;
    if !conditions.pass && !opts.force {
        return Err(CertError::ConditionsFail(Box::new(conditions)));
    }
    let d_ku = table.delta(k + u)?;
    let mut diagnostics = Vec::new();
    let mut residual_norms = Vec::new();

    let mut w = vec![0.0; a.rows()];
    let mut series_terms = 0;
    if u > 0 {
        let a_first = a_fn(table, k_b, u, u)?;
        let a_iter = a_fn(table, k, 2 * u, u)?;
        let t_delta = t.union(delta);

        let mut w_r = lemma2_w(a, &good.t_b, delta, sgn)?;
        let mut t_dr = exceptional_set(a, &w_r, &t_delta, a_first);
        let mut sign = 1.0;
        let mut prev_norm = f64::INFINITY;
        let mut converged = false;
        for r in 1..=opts.max_iters {
            let c_r: Vec<f64> = corr_on(a, &w_r, &t_dr);
            let c_norm = norm2(&c_r);
            if r > 1 && c_norm > (a_iter + 1e-9) * prev_norm + 1e-14 {
                let msg = format!("term {r}: ‖A_Td'w‖ = {c_norm:e} exceeds {a_iter} times the previous {prev_norm:e}");
                if !opts.force {
                    return Err(CertError::InternalInconsistency(msg));
                }
                diagnostics.push(msg);
            }
            if t_dr.len() >= u {
                let msg = format!("term {r}: exceptional set has {} >= u entries", t_dr.len());
                if !opts.force {
                    return Err(CertError::InternalInconsistency(msg));
                }
                diagnostics.push(msg);
            }
            residual_norms.push(c_norm);
            for (wi, v) in w.iter_mut().zip(&w_r) {
                *wi += sign * v;
            }
            series_terms += 1;
            if t_dr.is_empty() || norm2(&w_r) < opts.tol_series {
                converged = true;
                break;
            }
            // Next term: zero on Δ, matches w_r on T_{d,r}, orthogonal to A_T.
            let t_d = delta.union(&t_dr);
            let c: Vec<f64> = t_d
                .iter()
                .map(|j| if delta.contains(j) { 0.0 } else { a.col_dot(j, &w_r) })
                .collect();
            let next = lemma3_w(a, &t, &t_d, &c, a_iter, u)?;
            prev_norm = c_norm;
            w_r = next.w;
            t_dr = next.e;
            sign = -sign;
        }
        if !converged {
            let msg = format!("series did not converge within {} terms", opts.max_iters);
            if !opts.force {
                return Err(CertError::InternalInconsistency(msg));
            }
            diagnostics.push(msg);
        }
    }

    let lemma1 = verify_lemma1(a, &w, partition, delta, sgn, Some(d_ku));
    Ok(CertificateReport {
        k,
        u,
        k_b,
        conditions,
        partition: partition.clone(),
        t_a_plus_g: good.t_a_plus_g.clone(),
        t_a_minus_g: good.t_a_minus_g.clone(),
        w,
        series_terms,
        residual_norms,
        diagnostics,
        lemma1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pseudo(n: usize, salt: f64) -> Vec<f64> {
        (0..n)
            .map(|i| (((i as f64 + salt) * 12.9898).sin() * 43758.5453).fract() * 2.0 - 1.0)
            .collect()
    }

    fn unit_columns(n: usize, m: usize, salt: f64) -> DenseMatrix {
        let mut a = DenseMatrix::new(n, m, pseudo(n * m, salt)).unwrap();
        for j in 0..m {
            let norm = norm2(&a.column(j));
            for i in 0..n {
                a[(i, j)] /= norm;
            }
        }
        a
    }

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::new(v.to_vec())
    }

    #[test]
    fn classify_quantized_edges() {
        let prior = PriorKnowledge::new(set(&[0, 1, 2]), vec![1.1, 0.9, 1.05], 0.1).unwrap();
        let x = [1.0, 1.0, 1.0, 0.0];
        let p = classify_active(&x, &prior, default_active_tol(0.1)).unwrap();
        assert_eq!(p.t_a_minus, set(&[0]));
        assert_eq!(p.t_a_plus, set(&[1]));
        assert_eq!(p.t_in, set(&[2]));
        assert_eq!(p.t(), set(&[0, 1, 2]));
    }

    #[test]
    fn zero_rho_is_ambiguous() {
        let prior = PriorKnowledge::new(set(&[0]), vec![1.0], 0.0).unwrap();
        assert!(matches!(
            classify_active(&[1.0], &prior, default_active_tol(0.0)),
            Err(CertError::RhoBelowTolerance(0))
        ));
    }

    #[test]
    fn unbounded_rho_has_no_active_set() {
        let prior = PriorKnowledge::support_only(set(&[0, 1]));
        let p = classify_active(&[1.0, 0.0], &prior, 1e-9).unwrap();
        assert!(p.active().is_empty());
        assert_eq!(p.t_in, set(&[0, 1]));
    }

    #[test]
    fn lemma2_orthonormal_delta() {
        let a = DenseMatrix::identity(5);
        let w = lemma2_w(&a, &IndexSet::empty(), &set(&[1, 3]), &[1.0, -1.0]).unwrap();
        assert_eq!(w, vec![0.0, 1.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn lemma2_interpolation_identities() {
        let a = unit_columns(8, 16, 0.7);
        let t_b = set(&[0, 4, 9]);
        let delta = set(&[2, 11]);
        let sgn = [1.0, -1.0];
        let w = lemma2_w(&a, &t_b, &delta, &sgn).unwrap();
        for j in t_b.iter() {
            assert!(a.col_dot(j, &w).abs() < 1e-10);
        }
        for (j, s) in delta.iter().zip(sgn) {
            assert!((a.col_dot(j, &w) - s).abs() < 1e-10);
        }
    }

    #[test]
    fn lemma3_zero_rhs_and_empty_t() {
        let a = unit_columns(6, 10, 1.9);
        let r = lemma3_w(&a, &set(&[0, 1]), &set(&[3, 4]), &[0.0, 0.0], 0.5, 1).unwrap();
        assert!(r.w.iter().all(|v| *v == 0.0));
        assert!(r.e.is_empty());

        let c = [0.3, -0.8];
        let r = lemma3_w(&a, &IndexSet::empty(), &set(&[3, 4]), &c, 0.5, 1).unwrap();
        let w2 = lemma2_w(&a, &IndexSet::empty(), &set(&[3, 4]), &c).unwrap();
        assert_eq!(r.w, w2);
    }

    #[test]
    fn good_set_single_candidate() {
        // T = {0, 1}, Δ = {2}. Column 0 correlates positively with column 2.
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 0.6, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.8, 1.0],
        ])
        .unwrap();
        let partition = ActivePartition {
            t_a_plus: set(&[0]),
            t_a_minus: IndexSet::empty(),
            t_in: set(&[1]),
        };
        let g = good_set_search(&a, &partition, &set(&[2]), &[1.0]).unwrap();
        assert_eq!(g.t_a_plus_g, set(&[0]));
        assert_eq!(g.k_b, 1);

        let none = ActivePartition {
            t_a_plus: IndexSet::empty(),
            t_a_minus: IndexSet::empty(),
            t_in: set(&[0, 1]),
        };
        let g = good_set_search(&a, &none, &set(&[2]), &[1.0]).unwrap();
        assert!(g.t_g().is_empty());
        assert_eq!(g.k_b, 2);
    }

    #[test]
    fn verifier_vacuous_and_direct_violation() {
        let a = DenseMatrix::identity(4);
        let partition = ActivePartition {
            t_a_plus: IndexSet::empty(),
            t_a_minus: IndexSet::empty(),
            t_in: set(&[0]),
        };
        let r = verify_lemma1(&a, &[0.0; 4], &partition, &IndexSet::empty(), &[], None);
        assert!(r.pass, "{r:?}");

        let mut w = vec![0.0; 4];
        w[3] = 5.0;
        let r = verify_lemma1(&a, &w, &partition, &IndexSet::empty(), &[], None);
        assert!(!r.pass);
        assert_eq!(r.verdict, "inconclusive");
        assert!(!r.checks[4].pass);
    }

    #[test]
    fn orthonormal_certificate_is_one_term() {
        let a = DenseMatrix::identity(6);
        let table = RipTable::build(&a, 6).unwrap();
        let partition = ActivePartition {
            t_a_plus: set(&[0]),
            t_a_minus: IndexSet::empty(),
            t_in: set(&[1]),
        };
        let delta = set(&[4]);
        let good = good_set_search(&a, &partition, &delta, &[1.0]).unwrap();
        let rep = build_certificate(&a, &partition, &good, &delta, &[1.0], &table, &Default::default()).unwrap();
        assert_eq!(rep.series_terms, 1);
        assert!(rep.lemma1.pass);
    }
}
