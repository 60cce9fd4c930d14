//! Exact restricted isometry and restricted orthogonality constants by
//! subset enumeration, and the derived quantities used by the recovery
//! conditions.
//!
//! For a matrix `A` with Gram `G = A'A`:
//!
//! * `δ_s = max_{|S|=s} max(λ_max(G_S) − 1, 1 − λ_min(G_S))`
//! * `θ_{s1,s2} = max ‖G_{T1,T2}‖` over disjoint `|T1| = s1`, `|T2| = s2`
//!
//! Both are nondecreasing in their orders, so the maxima over exact sizes
//! equal the maxima over sizes up to the order.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{sym_eigvals, DenseMatrix, LinalgError};

/// Largest column count accepted for exhaustive enumeration.
pub const MAX_ENUM_COLS: usize = 24;

/// Subsets handled by one parallel work item.
const CHUNK: u64 = 512;

#[derive(Debug, Error, PartialEq)]
pub enum RipError {
    #[error("enumeration too large: {cols} columns exceeds the cap of {cap} ({subsets} subsets to examine)")]
    EnumerationTooLarge { cols: usize, cap: usize, subsets: u128 },
    #[error("order {order} exceeds the {cols} available columns")]
    OrderTooLarge { order: usize, cols: usize },
    #[error("table has no entry for {0}")]
    MissingEntry(String),
    #[error("condition violated: {0}")]
    ConditionViolated(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Lexicographically ordered `k`-subsets of `0..n`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self::from_rank(n, k, 0)
    }

    /// Starts at the `rank`-th subset in lexicographic order.
    pub fn from_rank(n: usize, k: usize, rank: u128) -> Self {
        if k > n || rank >= binomial(n, k) {
            return Combinations { n, cur: None };
        }
        let mut out = Vec::with_capacity(k);
        let mut rank = rank;
        let mut next = 0;
        for slot in 0..k {
            let mut v = next;
            loop {
                let below = binomial(n - v - 1, k - slot - 1);
                if rank < below {
                    break;
                }
                rank -= below;
                v += 1;
            }
            out.push(v);
            next = v + 1;
        }
        Combinations { n, cur: Some(out) }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.cur.take()?;
        let k = cur.len();
        let mut nxt = cur.clone();
        let mut i = k;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if nxt[i] < self.n - k + i {
                nxt[i] += 1;
                for j in (i + 1)..k {
                    nxt[j] = nxt[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if advanced {
            self.cur = Some(nxt);
        }
        Some(cur)
    }
}

/// Maximum of `f` over all `k`-subsets of `0..n`, evaluated in parallel
/// over lexicographic rank ranges.
fn par_max_over_subsets<F>(n: usize, k: usize, f: F) -> Result<f64, RipError>
where
    F: Fn(&[usize]) -> Result<f64, RipError> + Sync,
{
    let total = binomial(n, k);
    let chunks = total.div_ceil(CHUNK as u128) as u64;
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c as u128 * CHUNK as u128;
            let mut best = 0.0f64;
            for s in Combinations::from_rank(n, k, start).take(CHUNK as usize) {
                best = best.max(f(&s)?);
            }
            Ok(best)
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

fn check_cap(cols: usize, subsets: u128) -> Result<(), RipError> {
    if cols > MAX_ENUM_COLS {
        return Err(RipError::EnumerationTooLarge {
            cols,
            cap: MAX_ENUM_COLS,
            subsets,
        });
    }
    Ok(())
}

/// `max(λ_max − 1, 1 − λ_min)` of a principal Gram block.
fn isometry_gap(g: &DenseMatrix, s: &[usize]) -> Result<f64, RipError> {
    let eig = sym_eigvals(&g.principal_submatrix(s))?;
    let (lo, hi) = (eig[0], eig[eig.len() - 1]);
    Ok((hi - 1.0).max(1.0 - lo).max(0.0))
}

/// `‖G_{T1,T2}‖₂`
fn block_norm(g: &DenseMatrix, t1: &[usize], t2: &[usize]) -> Result<f64, RipError> {
    let (r, c) = if t1.len() <= t2.len() { (t1, t2) } else { (t2, t1) };
    if r.len() == 1 {
        let i = r[0];
        return Ok(c.iter().map(|&j| g[(i, j)] * g[(i, j)]).sum::<f64>().sqrt());
    }
    // B B' for the short side.
    let mut bbt = DenseMatrix::zeros(r.len(), r.len());
    for (p, &i) in r.iter().enumerate() {
        for (q, &j) in r.iter().enumerate().skip(p) {
            let v: f64 = c.iter().map(|&l| g[(i, l)] * g[(j, l)]).sum();
            bbt[(p, q)] = v;
            bbt[(q, p)] = v;
        }
    }
    let eig = sym_eigvals(&bbt)?;
    Ok(eig[eig.len() - 1].max(0.0).sqrt())
}

/// Largest `‖G_{T1,T2}‖` over all splits of `u` into `|T1| = s1` and the rest.
fn best_split(g: &DenseMatrix, u: &[usize], s1: usize) -> Result<f64, RipError> {
    let mut best = 0.0f64;
    let mut t2 = Vec::with_capacity(u.len() - s1);
    for pick in Combinations::new(u.len(), s1) {
        let t1: Vec<usize> = pick.iter().map(|&p| u[p]).collect();
        t2.clear();
        let mut next = 0;
        for (p, &v) in u.iter().enumerate() {
            if next < pick.len() && pick[next] == p {
                next += 1;
            } else {
                t2.push(v);
            }
        }
        best = best.max(block_norm(g, &t1, &t2)?);
    }
    Ok(best)
}

/// Restricted isometry constant `δ_s`.
pub fn ric(a: &DenseMatrix, s: usize) -> Result<f64, RipError> {
    let m = a.cols();
    check_cap(m, binomial(m, s))?;
    if s > m {
        return Err(RipError::OrderTooLarge { order: s, cols: m });
    }
    if s == 0 {
        return Ok(0.0);
    }
    let g = a.gram();
    par_max_over_subsets(m, s, |set| isometry_gap(&g, set))
}

/// Restricted orthogonality constant `θ_{s1,s2}`.
pub fn roc(a: &DenseMatrix, s1: usize, s2: usize) -> Result<f64, RipError> {
    let m = a.cols();
    check_cap(m, binomial(m, s1 + s2))?;
    if s1 + s2 > m {
        return Err(RipError::OrderTooLarge {
            order: s1 + s2,
            cols: m,
        });
    }
    if s1 == 0 || s2 == 0 {
        return Ok(0.0);
    }
    let g = a.gram();
    let small = s1.min(s2);
    par_max_over_subsets(m, s1 + s2, |u| best_split(&g, u, small))
}

/// All `δ_s` for `s ≤ s_max` and `θ_{s1,s2}` for `s1 + s2 ≤ s_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipTable {
    pub fingerprint: u64,
    pub s_max: usize,
    /// `delta[s]`
    delta: Vec<f64>,
    /// `theta[s1][s2]`, filled for `s1 + s2 ≤ s_max`.
    theta: Vec<Vec<f64>>,
}

pub fn fingerprint(a: &DenseMatrix) -> u64 {
    let mut h = DefaultHasher::new();
    a.shape().hash(&mut h);
    for v in a.as_slice() {
        v.to_bits().hash(&mut h);
    }
    h.finish()
}

impl RipTable {
    /// Builds the table in one pass over all subsets of size `≤ s_max`:
    /// each subset contributes to `δ_{|U|}` and, through its two-block
    /// splits, to every `θ_{s1,|U|−s1}`.
    pub fn build(a: &DenseMatrix, s_max: usize) -> Result<Self, RipError> {
        let m = a.cols();
        let subsets: u128 = (1..=s_max.min(m)).map(|s| binomial(m, s)).sum();
        check_cap(m, subsets)?;
        if s_max > m {
            return Err(RipError::OrderTooLarge { order: s_max, cols: m });
        }
        let g = a.gram();
        let mut delta = vec![0.0; s_max + 1];
        let mut theta = vec![vec![0.0; s_max + 1]; s_max + 1];
        for s in 1..=s_max {
            let total = binomial(m, s);
            let chunks = total.div_ceil(CHUNK as u128) as u64;
            let half = s / 2;
            // Per chunk: [δ_s, θ_{1,s-1}, ..., θ_{half,s-half}].
            let best = (0..chunks)
                .into_par_iter()
                .map(|c| -> Result<Vec<f64>, RipError> {
                    let mut acc = vec![0.0f64; half + 1];
                    for u in Combinations::from_rank(m, s, c as u128 * CHUNK as u128).take(CHUNK as usize) {
                        acc[0] = acc[0].max(isometry_gap(&g, &u)?);
                        for s1 in 1..=half {
                            acc[s1] = acc[s1].max(best_split(&g, &u, s1)?);
                        }
                    }
                    Ok(acc)
                })
                .try_reduce(
                    || vec![0.0; half + 1],
                    |x, y| Ok(x.iter().zip(&y).map(|(p, q)| p.max(*q)).collect()),
                )?;
            delta[s] = best[0];
            for s1 in 1..=half {
                theta[s1][s - s1] = best[s1];
                theta[s - s1][s1] = best[s1];
            }
        }
        Ok(RipTable {
            fingerprint: fingerprint(a),
            s_max,
            delta,
            theta,
        })
    }

    pub fn delta(&self, s: usize) -> Result<f64, RipError> {
        self.delta
            .get(s)
            .copied()
            .ok_or_else(|| RipError::MissingEntry(format!("delta_{s} (table covers s <= {})", self.s_max)))
    }

    pub fn theta(&self, s1: usize, s2: usize) -> Result<f64, RipError> {
        if s1 + s2 > self.s_max {
            return Err(RipError::MissingEntry(format!(
                "theta_{{{s1},{s2}}} (table covers s1 + s2 <= {})",
                self.s_max
            )));
        }
        Ok(self.theta[s1][s2])
    }

    /// Rows `(kind, s1, s2, value)`; `s2` is empty for `delta` rows.
    pub fn rows(&self) -> Vec<(&'static str, usize, Option<usize>, f64)> {
        let mut out = Vec::new();
        for s in 1..=self.s_max {
            out.push(("delta", s, None, self.delta[s]));
        }
        for s1 in 1..=self.s_max {
            for s2 in 1..=self.s_max - s1 {
                out.push(("theta", s1, Some(s2), self.theta[s1][s2]));
            }
        }
        out
    }
}

/// Shared denominator `1 − δ_s − θ_{s,k}² / (1 − δ_k)`.
fn reduced_gap(table: &RipTable, k: usize, s: usize) -> Result<f64, RipError> {
    let dk = table.delta(k)?;
    if !(dk < 1.0) {
        return Err(RipError::ConditionViolated(format!("delta_{k} = {dk} >= 1")));
    }
    let t = table.theta(s, k)?;
    let den = 1.0 - table.delta(s)? - t * t / (1.0 - dk);
    if !(den > 0.0) {
        return Err(RipError::ConditionViolated(format!(
            "1 - delta_{s} - theta_{{{s},{k}}}^2/(1 - delta_{k}) = {den} <= 0"
        )));
    }
    Ok(den)
}

/// `a_k(s, š) = (θ_{š,s} + θ_{š,k} θ_{s,k} / (1 − δ_k)) / (1 − δ_s − θ_{s,k}² / (1 − δ_k))`
pub fn a_fn(table: &RipTable, k: usize, s: usize, s_check: usize) -> Result<f64, RipError> {
    let den = reduced_gap(table, k, s)?;
    let dk = table.delta(k)?;
    let num = table.theta(s_check, s)? + table.theta(s_check, k)? * table.theta(s, k)? / (1.0 - dk);
    Ok(num / den)
}

/// `K_k(u) = √(1 + δ_u) / (1 − δ_u − θ_{u,k}² / (1 − δ_k))`
pub fn k_fn(table: &RipTable, k: usize, u: usize) -> Result<f64, RipError> {
    let den = reduced_gap(table, k, u)?;
    Ok((1.0 + table.delta(u)?).sqrt() / den)
}

/// Smallest table order that covers every constant used by
/// [`theorem1_conditions`] for the given `k` and `u`.
pub fn required_order(k: usize, u: usize) -> usize {
    (k + 2 * u).max(3 * u).max(k + u)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    /// Left-hand side; `None` when it is undefined (a nonpositive
    /// denominator inside `a`).
    pub value: Option<f64>,
    pub threshold: f64,
    pub margin: Option<f64>,
    pub pass: bool,
}

impl ConditionCheck {
    fn below(name: &str, value: Option<f64>, threshold: f64) -> Self {
        let margin = value.map(|v| threshold - v);
        ConditionCheck {
            name: name.to_string(),
            value,
            threshold,
            margin,
            pass: margin.is_some_and(|m| m > 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub k: usize,
    pub u: usize,
    pub k_b: usize,
    pub checks: Vec<ConditionCheck>,
    pub pass: bool,
}

/// Evaluates, in order: `δ_{k+u} < 1`, `δ_{2u} + δ_k + θ_{k,2u}² < 1`, and
/// `a_k(2u,u) + a_{k_b}(u,u) < 1`.
pub fn theorem1_conditions(table: &RipTable, k: usize, u: usize, k_b: usize) -> Result<ConditionReport, RipError> {
    if k_b > k {
        return Err(RipError::ConditionViolated(format!("k_b = {k_b} exceeds k = {k}")));
    }
    // Every entry used below must exist; missing entries are an error, not
    // a failing condition.
    table.delta(k + u)?;
    table.theta(k, 2 * u)?;
    table.theta(u, 2 * u)?;

    let c1 = table.delta(k + u)?;
    let t = table.theta(k, 2 * u)?;
    let c2 = table.delta(2 * u)? + table.delta(k)? + t * t;
    let a1 = match a_fn(table, k, 2 * u, u) {
        Ok(v) => Some(v),
        Err(RipError::ConditionViolated(_)) => None,
        Err(e) => return Err(e),
    };
    let a2 = match a_fn(table, k_b, u, u) {
        Ok(v) => Some(v),
        Err(RipError::ConditionViolated(_)) => None,
        Err(e) => return Err(e),
    };
    let checks = vec![
        ConditionCheck::below("delta_{k+u}", Some(c1), 1.0),
        ConditionCheck::below("delta_{2u} + delta_k + theta_{k,2u}^2", Some(c2), 1.0),
        ConditionCheck::below("a_k(2u,u) + a_{k_b}(u,u)", a1.zip(a2).map(|(p, q)| p + q), 1.0),
    ];
    let pass = checks.iter().all(|c| c.pass);
    Ok(ConditionReport {
        k,
        u,
        k_b,
        checks,
        pass,
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
            let norm = a.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
            for i in 0..n {
                a[(i, j)] /= norm;
            }
        }
        a
    }

    #[test]
    fn combinations_enumerate_in_order() {
        let all: Vec<Vec<usize>> = Combinations::new(5, 3).collect();
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all[9], vec![2, 3, 4]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        for r in 0..10 {
            assert_eq!(Combinations::from_rank(5, 3, r).next().unwrap(), all[r as usize]);
        }
        assert_eq!(Combinations::new(3, 0).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(24, 12), 2_704_156);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
    }

    #[test]
    fn identity_has_zero_constants() {
        let a = DenseMatrix::identity(6);
        let t = RipTable::build(&a, 4).unwrap();
        for s in 0..=4 {
            assert_eq!(t.delta(s).unwrap(), 0.0);
        }
        assert_eq!(t.theta(2, 2).unwrap(), 0.0);
        assert_eq!(ric(&a, 3).unwrap(), 0.0);
    }

    #[test]
    fn two_columns_closed_form() {
        let c: f64 = 0.37;
        let a = DenseMatrix::from_rows(&[vec![1.0, c], vec![0.0, (1.0 - c * c).sqrt()]]).unwrap();
        assert!((ric(&a, 2).unwrap() - c).abs() < 1e-12);
        assert!((roc(&a, 1, 1).unwrap() - c).abs() < 1e-12);
    }

    #[test]
    fn order_two_matches_coherence() {
        let a = unit_columns(6, 10, 0.25);
        let g = a.gram();
        let mut coh = 0.0f64;
        for i in 0..10 {
            for j in (i + 1)..10 {
                coh = coh.max(g[(i, j)].abs());
            }
        }
        assert!((ric(&a, 2).unwrap() - coh).abs() < 1e-10);
        assert!((roc(&a, 1, 1).unwrap() - coh).abs() < 1e-10);
        assert!(ric(&a, 1).unwrap() < 1e-12);
    }

    #[test]
    fn table_agrees_with_direct_and_is_monotone() {
        let a = unit_columns(6, 10, 3.0);
        let t = RipTable::build(&a, 5).unwrap();
        for s in 1..=5 {
            assert!((t.delta(s).unwrap() - ric(&a, s).unwrap()).abs() < 1e-12);
            assert!(t.delta(s).unwrap() >= t.delta(s - 1).unwrap());
        }
        for s1 in 1..=4 {
            for s2 in 1..=(5 - s1) {
                let th = t.theta(s1, s2).unwrap();
                assert!((th - roc(&a, s1, s2).unwrap()).abs() < 1e-12);
                assert_eq!(th, t.theta(s2, s1).unwrap());
                if s1 + s2 < 5 {
                    assert!(t.theta(s1 + 1, s2).unwrap() >= th);
                }
            }
        }
        assert!(t.theta(1, 2).unwrap() >= t.theta(1, 1).unwrap());
        assert!(matches!(t.theta(3, 3), Err(RipError::MissingEntry(_))));
    }

    #[test]
    fn cap_names_binomial_count() {
        let a = DenseMatrix::zeros(2, 25);
        let err = ric(&a, 3).unwrap_err();
        assert_eq!(
            err,
            RipError::EnumerationTooLarge {
                cols: 25,
                cap: 24,
                subsets: 2300
            }
        );
        assert!(err.to_string().contains("2300"));
    }

    fn table_with(delta: Vec<f64>, theta_all: f64) -> RipTable {
        let s_max = delta.len() - 1;
        let mut theta = vec![vec![theta_all; s_max + 1]; s_max + 1];
        for i in 0..=s_max {
            theta[0][i] = 0.0;
            theta[i][0] = 0.0;
        }
        RipTable {
            fingerprint: 0,
            s_max,
            delta,
            theta,
        }
    }

    #[test]
    fn a_and_k_closed_forms() {
        let zero = table_with(vec![0.0; 7], 0.0);
        assert_eq!(a_fn(&zero, 2, 2, 1).unwrap(), 0.0);
        assert_eq!(k_fn(&zero, 2, 2).unwrap(), 1.0);

        let t = 0.2;
        let flat = table_with(vec![0.0; 7], t);
        assert!((a_fn(&flat, 2, 2, 1).unwrap() - t / (1.0 - t)).abs() < 1e-15);

        let mut d = vec![0.0; 7];
        d[2] = 0.5;
        let half = table_with(d, 0.0);
        assert!((k_fn(&half, 1, 2).unwrap() - 2.0 * 1.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn a_fn_second_code_path() {
        let a = unit_columns(8, 12, 7.0);
        let t = RipTable::build(&a, 4).unwrap();
        let (k, s, sc) = (2, 2, 1);
        let dk = ric(&a, k).unwrap();
        let ds = ric(&a, s).unwrap();
        let (t_sc_s, t_sc_k, t_s_k) = (roc(&a, sc, s).unwrap(), roc(&a, sc, k).unwrap(), roc(&a, s, k).unwrap());
        let direct = (t_sc_s + t_sc_k * t_s_k / (1.0 - dk)) / (1.0 - ds - t_s_k * t_s_k / (1.0 - dk));
        match a_fn(&t, k, s, sc) {
            Ok(v) => assert!((v - direct).abs() < 1e-12),
            Err(RipError::ConditionViolated(_)) => assert!(!(1.0 - ds - t_s_k * t_s_k / (1.0 - dk) > 0.0)),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn denominator_violation_is_error() {
        let mut d = vec![0.0; 7];
        d[2] = 1.0;
        let bad = table_with(d, 0.0);
        assert!(matches!(a_fn(&bad, 1, 2, 1), Err(RipError::ConditionViolated(_))));
        assert!(matches!(k_fn(&bad, 2, 1), Err(RipError::ConditionViolated(_))));
    }

    #[test]
    fn orthonormal_conditions_pass() {
        let t = RipTable::build(&DenseMatrix::identity(8), 6).unwrap();
        let r = theorem1_conditions(&t, 3, 1, 2).unwrap();
        assert!(r.pass);
        for c in &r.checks {
            assert_eq!(c.margin, Some(1.0));
        }
    }

    #[test]
    fn duplicated_column_fails_first_condition() {
        let mut a = unit_columns(6, 8, 1.5);
        for i in 0..6 {
            a[(i, 1)] = a[(i, 0)];
        }
        let t = RipTable::build(&a, 4).unwrap();
        let r = theorem1_conditions(&t, 2, 1, 2).unwrap();
        assert!(!r.checks[0].pass);
        assert!(!r.pass);
    }

    #[test]
    fn worst_case_good_set_matches_k() {
        let a = unit_columns(10, 12, 2.2);
        let t = RipTable::build(&a, 4).unwrap();
        let r = theorem1_conditions(&t, 2, 1, 2).unwrap();
        let direct = a_fn(&t, 2, 2, 1).ok().zip(a_fn(&t, 2, 1, 1).ok()).map(|(p, q)| p + q);
        assert_eq!(r.checks[2].value, direct);
    }
}
