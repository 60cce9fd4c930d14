mod common;

use common::{combinations, gaussian, lstsq, rng, unit_columns};
use proptest::prelude::*;
use regmodbp::linalg::{projector, sym_eigvals, DenseMatrix, IndexSet};
use regmodbp::rip::{ric, roc, RipTable};

/// `I − A_S (A_S'A_S)^{-1} A_S'` column by column: column `e` is the
/// least-squares residual of `e` on `A_S`.
fn projector_oracle(a: &DenseMatrix, s: &[usize]) -> DenseMatrix {
    let n = a.rows();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|e| {
            let mut y = vec![0.0; n];
            y[e] = 1.0;
            if s.is_empty() {
                return y;
            }
            let (c, _) = lstsq(a, s, &y).unwrap();
            (0..n)
                .map(|r| y[r] - s.iter().zip(&c).map(|(&j, cj)| a[(r, j)] * cj).sum::<f64>())
                .collect()
        })
        .collect();
    DenseMatrix::from_columns(n, &cols).unwrap()
}

/// `δ_s` by brute force over index lists from the oracle enumerator.
fn ric_oracle(a: &DenseMatrix, s: usize) -> f64 {
    let g = a.gram();
    combinations(a.cols(), s)
        .into_iter()
        .map(|idx| {
            let ev = sym_eigvals(&g.principal_submatrix(&idx)).unwrap();
            (1.0 - ev[0]).max(ev[ev.len() - 1] - 1.0)
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projector_matches_residual_oracle(seed in any::<u64>(), n in 4usize..9, extra in 0usize..6, k in 0usize..4) {
        let mut r = rng(seed, 0);
        let m = n + extra;
        let a = gaussian(n, m, &mut r);
        let all: Vec<usize> = (0..m).collect();
        let s = r.sample(&all, k.min(n - 1));
        let set = IndexSet::new(s.clone());
        let p = projector(&a, &set).unwrap();
        let mut sorted = s.clone();
        sorted.sort();
        let o = projector_oracle(&a, &sorted);
        prop_assert!(p.max_abs_diff(&o) < 1e-9);
        prop_assert!(p.matmul(&p).unwrap().max_abs_diff(&p) < 1e-10);
        prop_assert!(p.transpose().max_abs_diff(&p) < 1e-12);
        let a_s = a.submatrix_cols(&set).unwrap();
        prop_assert!(p.matmul(&a_s).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn ric_roc_monotone_and_match_oracle(seed in any::<u64>(), n in 3usize..7, m in 4usize..10) {
        let mut r = rng(seed, 1);
        let a = unit_columns(&gaussian(n, m, &mut r));
        let s_max = m.min(5);
        let table = RipTable::build(&a, s_max).unwrap();
        let mut prev = 0.0;
        for s in 1..=s_max {
            let d = table.delta(s).unwrap();
            prop_assert!(d >= prev - 1e-12);
            prop_assert!((d - ric_oracle(&a, s)).abs() < 1e-9);
            prev = d;
        }
        for s1 in 1..s_max {
            for s2 in 1..=s_max - s1 {
                let t = table.theta(s1, s2).unwrap();
                prop_assert!((t - table.theta(s2, s1).unwrap()).abs() < 1e-12);
                if s1 + s2 < s_max {
                    prop_assert!(table.theta(s1 + 1, s2).unwrap() >= t - 1e-12);
                }
                // θ_{s1,s2} ≤ δ_{s1+s2}
                prop_assert!(t <= table.delta(s1 + s2).unwrap() + 1e-12);
            }
        }
    }
}

#[test]
fn order_two_is_coherence() {
    for seed in 0..20 {
        let mut r = rng(seed, 2);
        let a = unit_columns(&gaussian(5, 9, &mut r));
        let mut mu: f64 = 0.0;
        for i in 0..9 {
            for j in i + 1..9 {
                let d: f64 = (0..5).map(|k| a[(k, i)] * a[(k, j)]).sum();
                mu = mu.max(d.abs());
            }
        }
        assert!((ric(&a, 2).unwrap() - mu).abs() < 1e-12);
        assert!((roc(&a, 1, 1).unwrap() - mu).abs() < 1e-12);
        assert!(ric(&a, 1).unwrap() < 1e-12);
    }
}
