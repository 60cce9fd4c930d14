//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use regmodbp::bench::Rng;
use regmodbp::certificates::{
    build_certificate, classify_active, default_active_tol, good_set_search, lemma3_w, sign_vector, ActivePartition,
    CertificateOptions,
};
use regmodbp::linalg::{DenseMatrix, IndexSet};
use regmodbp::models::{is_exact, recover, sign_pattern, Method, PriorKnowledge, RecoveryInstance};
use regmodbp::rip::{a_fn, k_fn, required_order, theorem1_conditions, RipTable};

pub const TEST_DOMAIN: u64 = 77;

pub fn rng(seed: u64, index: u64) -> Rng {
    Rng::stream(seed, TEST_DOMAIN, index)
}

pub fn gaussian(n: usize, m: usize, r: &mut Rng) -> DenseMatrix {
    let data: Vec<f64> = (0..n * m).map(|_| r.gaussian()).collect();
    DenseMatrix::new(n, m, data).unwrap()
}

pub fn unit_columns(a: &DenseMatrix) -> DenseMatrix {
    let cols: Vec<Vec<f64>> = (0..a.cols())
        .map(|j| {
            let c = a.column(j);
            let n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            c.iter().map(|v| v / n).collect()
        })
        .collect();
    DenseMatrix::from_columns(a.rows(), &cols).unwrap()
}

/// First `n` rows of a random `m × m` orthogonal matrix (modified
/// Gram–Schmidt on Gaussian rows), columns rescaled to unit norm.
pub fn partial_orthogonal(n: usize, m: usize, r: &mut Rng) -> DenseMatrix {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    while rows.len() < m {
        let mut v: Vec<f64> = (0..m).map(|_| r.gaussian()).collect();
        for q in &rows {
            let d: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= d * qi;
            }
        }
        let n2 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n2 > 1e-8 {
            rows.push(v.iter().map(|x| x / n2).collect());
        }
    }
    rows.truncate(n);
    unit_columns(&DenseMatrix::from_rows(&rows).unwrap())
}

/// Gaussian elimination with partial pivoting; `None` if singular.
pub fn solve_dense(mut g: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| g[i][c].abs().total_cmp(&g[j][c].abs()))?;
        if g[p][c].abs() < 1e-12 {
            return None;
        }
        g.swap(c, p);
        b.swap(c, p);
        for i in c + 1..n {
            let f = g[i][c] / g[c][c];
            for j in c..n {
                g[i][j] -= f * g[c][j];
            }
            b[i] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| g[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / g[i][i];
    }
    Some(x)
}

/// Least-squares fit of `y` on the columns `s`; returns coefficients and
/// residual norm.
pub fn lstsq(a: &DenseMatrix, s: &[usize], y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let g: Vec<Vec<f64>> = s
        .iter()
        .map(|&i| {
            s.iter()
                .map(|&j| (0..a.rows()).map(|r| a[(r, i)] * a[(r, j)]).sum())
                .collect()
        })
        .collect();
    let rhs: Vec<f64> = s
        .iter()
        .map(|&i| (0..a.rows()).map(|r| a[(r, i)] * y[r]).sum())
        .collect();
    let c = solve_dense(g, rhs)?;
    let res: f64 = (0..a.rows())
        .map(|r| {
            let fit: f64 = s.iter().zip(&c).map(|(&j, cj)| a[(r, j)] * cj).sum();
            (y[r] - fit).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    Some((c, res))
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Sparsest `β` with `Aβ = y`, searching supports of size `0..=max_k`;
/// returns its support, or `None` if no such support is found.
pub fn l0_oracle(a: &DenseMatrix, y: &[f64], max_k: usize) -> Option<Vec<usize>> {
    let scale = y.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    if y.iter().all(|v| v.abs() < 1e-12) {
        return Some(vec![]);
    }
    for k in 1..=max_k {
        for s in combinations(a.cols(), k) {
            if let Some((c, res)) = lstsq(a, &s, y) {
                if res < 1e-9 * scale && c.iter().all(|v| v.abs() > 1e-9) {
                    return Some(s);
                }
            }
        }
    }
    None
}

/// A small recovery problem with quantized prior knowledge, as used by the
/// certificate tests.
pub struct SmallInstance {
    pub a: DenseMatrix,
    pub x: Vec<f64>,
    pub prior: PriorKnowledge,
    pub delta: IndexSet,
    pub partition: ActivePartition,
    pub sgn: Vec<f64>,
}

/// `m ∈ 10..=14` columns and `n ∈ {m−3, .., m−1}` rows of a random
/// orthogonal matrix; `|T| ∈ 1..=3`, `|Δ| ∈ 0..=2`, at most one extra in
/// `T`; priors on a 5-level grid with `ρ = 0.1`, so constraints are often
/// active.
pub fn small_instance(r: &mut Rng) -> SmallInstance {
    let m = 10 + r.below(5) as usize;
    let n = m - 1 - r.below(3) as usize;
    let a = partial_orthogonal(n, m, r);
    let k = 1 + r.below(3) as usize;
    let u = r.below(3) as usize;
    let all: Vec<usize> = (0..m).collect();
    let picks = r.sample(&all, k + u);
    let t = IndexSet::new(picks[..k].to_vec());
    let delta = IndexSet::new(picks[k..].to_vec());
    let extras = if k > 1 && r.below(3) == 0 { 1 } else { 0 };
    let extra_set = IndexSet::new(t.as_slice()[..extras].to_vec());
    let rho = 0.1;
    let mut x = vec![0.0; m];
    for i in t.iter().filter(|i| !extra_set.contains(*i)) {
        x[i] = if r.below(2) == 0 { 1.0 } else { -1.0 };
    }
    for i in delta.iter() {
        let mag = 0.1 + 0.9 * r.next_f64();
        x[i] = if r.below(2) == 0 { mag } else { -mag };
    }
    let mu: Vec<f64> = t
        .iter()
        .map(|i| {
            let j = r.below(5) as i64 - 2;
            let nu = match j {
                2 => rho,
                -2 => -rho,
                j => j as f64 * rho / 2.0,
            };
            x[i] + nu
        })
        .collect();
    let prior = PriorKnowledge::new(t, mu, rho).unwrap();
    let partition = classify_active(&x, &prior, default_active_tol(rho)).unwrap();
    let sgn = sign_vector(&x, &delta);
    SmallInstance {
        a,
        x,
        prior,
        delta,
        partition,
        sgn,
    }
}

/// One BP-versus-oracle comparison: `n ∈ 6..=10`, `m ∈ 12..=16`, `|N| ∈ {1, 2}`.
/// Returns `(BP support, oracle support)` when BP is exact.
pub fn l0_case(seed: u64, index: u64) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut r = rng(seed, index);
    let n = 6 + r.below(5) as usize;
    let m = 12 + r.below(5) as usize;
    let k = 1 + r.below(2) as usize;
    let a = unit_columns(&gaussian(n, m, &mut r));
    let all: Vec<usize> = (0..m).collect();
    let mut x = vec![0.0; m];
    for i in r.sample(&all, k) {
        x[i] = (0.5 + r.next_f64()) * if r.below(2) == 0 { 1.0 } else { -1.0 };
    }
    let inst = RecoveryInstance::from_signal(a.clone(), x.clone()).unwrap();
    let x_hat = recover(&inst, &PriorKnowledge::support_only(IndexSet::empty()), Method::Bp).unwrap();
    if !is_exact(&x_hat, &x).unwrap() {
        return None;
    }
    let bp_support: Vec<usize> = sign_pattern(&x_hat)
        .iter()
        .enumerate()
        .filter(|(_, s)| **s != 0)
        .map(|(i, _)| i)
        .collect();
    let oracle = l0_oracle(&a, inst.y(), 2).expect("a 2-sparse solution exists");
    Some((bp_support, oracle))
}

/// Absolute allowance for rounding in the computed norms and constants.
const SLACK: f64 = 1e-12;

pub fn table_for(s: &SmallInstance) -> RipTable {
    let order = required_order(s.prior.k(), s.delta.len()).min(s.a.cols());
    RipTable::build(&s.a, order).unwrap()
}

/// `Some((exact, certified))` when the conditions pass, `None` otherwise.
pub fn soundness_case(s: &SmallInstance) -> Option<(bool, bool)> {
    let (k, u) = (s.prior.k(), s.delta.len());
    if required_order(k, u) > s.a.cols() {
        return None;
    }
    let table = table_for(s);
    let good = good_set_search(&s.a, &s.partition, &s.delta, &s.sgn).ok()?;
    let cond = theorem1_conditions(&table, k, u, good.k_b).ok()?;
    if !cond.pass {
        return None;
    }
    let inst = RecoveryInstance::from_signal(s.a.clone(), s.x.clone()).unwrap();
    let x_hat = recover(&inst, &s.prior, Method::RegModBp).unwrap();
    let exact = is_exact(&x_hat, &s.x).unwrap();
    let report = build_certificate(
        &s.a,
        &s.partition,
        &good,
        &s.delta,
        &s.sgn,
        &table,
        &CertificateOptions::default(),
    )
    .unwrap();
    Some((exact, report.lemma1.pass))
}

/// Checks `‖w̃‖₂ ≤ K‖c‖₂`, `‖A_E'w̃‖₂ ≤ a‖c‖₂` and `|E| < š` for the
/// interpolant on `(T_b, Δ)` with `c = sgn(x_Δ)` and for a random
/// right-hand side on a set disjoint with `T`. Returns the number of
/// interpolants checked and any violations.
pub fn bound_case(s: &SmallInstance, seed: u64) -> (usize, Vec<String>) {
    let (k, u) = (s.prior.k(), s.delta.len());
    if u == 0 || required_order(k, u) > s.a.cols() {
        return (0, vec![]);
    }
    let table = table_for(s);
    let mut checked = 0;
    let mut bad = Vec::new();
    let t = s.prior.t().clone();

    let mut check = |t: &IndexSet, t_d: &IndexSet, c: &[f64], s_check: usize| {
        let kk = t.len();
        let (Ok(a), Ok(kc)) = (a_fn(&table, kk, t_d.len(), s_check), k_fn(&table, kk, t_d.len())) else {
            return;
        };
        let r = lemma3_w(&s.a, t, t_d, c, a, s_check).unwrap();
        if r.w_norm > kc * r.c_norm + SLACK {
            bad.push(format!("‖w‖ = {} > {}", r.w_norm, kc * r.c_norm));
        }
        if r.e_norm > a * r.c_norm + SLACK {
            bad.push(format!("‖A_E'w‖ = {} > {}", r.e_norm, a * r.c_norm));
        }
        if r.e.len() >= s_check {
            bad.push(format!("|E| = {} >= {s_check}", r.e.len()));
        }
        checked += 1;
    };

    // Good-set interpolant, š = u.
    if let Ok(good) = good_set_search(&s.a, &s.partition, &s.delta, &s.sgn) {
        check(&good.t_b, &s.delta, &s.sgn, u);
    }
    check(&t, &s.delta, &s.sgn, u);

    // Random c on a set of size up to 2u outside T, š = u.
    let mut r = rng(seed, 1);
    let outside: Vec<usize> = t.complement(s.a.cols()).into_vec();
    let size = (1 + r.below(2 * u as u64) as usize).min(outside.len());
    let t_d = IndexSet::new(r.sample(&outside, size));
    let c: Vec<f64> = (0..size).map(|_| r.gaussian()).collect();
    check(&t, &t_d, &c, u);
    (checked, bad)
}
