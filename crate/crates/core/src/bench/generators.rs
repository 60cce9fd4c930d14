use serde::{Deserialize, Serialize};

use super::rng::Rng;
use crate::linalg::{DenseMatrix, IndexSet};
use crate::models::{clip_0_7, PriorKnowledge};

/// `n × m` matrix of i.i.d. standard normals (drawn row by row), each
/// column scaled to unit ℓ2 norm.
pub fn gen_gaussian_matrix(n: usize, m: usize, rng: &mut Rng) -> DenseMatrix {
    let mut data: Vec<f64> = (0..n * m).map(|_| rng.gaussian()).collect();
    for j in 0..m {
        let norm = (0..n).map(|i| data[i * m + j] * data[i * m + j]).sum::<f64>().sqrt();
        for i in 0..n {
            data[i * m + j] /= norm;
        }
    }
    DenseMatrix::new(n, m, data).expect("finite gaussian draws")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportDraw {
    /// True support `N`.
    pub n_set: IndexSet,
    /// Misses `Δ ⊆ N`.
    pub delta: IndexSet,
    /// Extras `Δ_e ⊆ N^c`.
    pub delta_e: IndexSet,
    /// Prior support `T = (N ∪ Δ_e) ∖ Δ`.
    pub t: IndexSet,
}

/// `N` uniform among `size_n`-subsets of `[0, m)`, `Δ` uniform among
/// `u`-subsets of `N`, `Δ_e` uniform among `u`-subsets of `N^c`.
pub fn gen_support(m: usize, size_n: usize, u: usize, rng: &mut Rng) -> SupportDraw {
    assert!(size_n + u <= m && u <= size_n, "need |N| + u <= m and u <= |N|");
    let all: Vec<usize> = (0..m).collect();
    let n_set = IndexSet::new(rng.sample(&all, size_n));
    let delta = IndexSet::new(rng.sample(n_set.as_slice(), u));
    let comp = n_set.complement(m);
    let delta_e = IndexSet::new(rng.sample(comp.as_slice(), u));
    let t = n_set.union(&delta_e).difference(&delta);
    SupportDraw {
        n_set,
        delta,
        delta_e,
        t,
    }
}

/// Signal and prior models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Scenario {
    /// `x = ±1` on `N ∩ T`, `±0.1` on `Δ`; prior error `j·ρ/K` with
    /// `j ∈ {−K..K}` on `T ∩ N` and `j ∈ ±{1..K}` on `Δ_e`.
    QuantizedGrid { k: u32, rho: f64 },
    /// `x ∈ {3..7}` on `N ∩ T`, `{1, 2}` on `Δ`; `μ̂ = clip(x + ν)` to
    /// `[0, 7]` with `ν ∈ {−2..2}` on `T ∩ N` and `{±1, ±2}` on `Δ_e`;
    /// `ρ = 2`.
    ThreeBit,
    /// Magnitudes as in the grid case; prior error uniform on `(−ρ, ρ)`.
    Continuous { rho: f64 },
}

impl Scenario {
    pub fn rho(&self) -> f64 {
        match *self {
            Scenario::QuantizedGrid { rho, .. } | Scenario::Continuous { rho } => rho,
            Scenario::ThreeBit => 2.0,
        }
    }

    pub fn with_rho(self, rho: f64) -> Self {
        match self {
            Scenario::QuantizedGrid { k, .. } => Scenario::QuantizedGrid { k, rho },
            Scenario::Continuous { .. } => Scenario::Continuous { rho },
            Scenario::ThreeBit => Scenario::ThreeBit,
        }
    }

    /// Whether box constraints can be tight with positive probability.
    pub fn has_active_constraints(&self) -> bool {
        !matches!(self, Scenario::Continuous { .. })
    }

    pub fn validate(&self) -> Result<(), String> {
        match *self {
            Scenario::QuantizedGrid { k, rho } => {
                if k == 0 {
                    return Err("quantized grid needs k >= 1".into());
                }
                if !(rho > 0.0 && rho.is_finite()) {
                    return Err(format!("rho must be positive, got {rho}"));
                }
            }
            Scenario::Continuous { rho } => {
                if !(rho > 0.0 && rho.is_finite()) {
                    return Err(format!("rho must be positive, got {rho}"));
                }
            }
            Scenario::ThreeBit => {}
        }
        Ok(())
    }
}

/// Draws `x` over `N` in ascending index order, then `ν` over `T` in
/// ascending order, and returns `x` with the prior `(T, μ̂_T, ρ)`.
pub fn gen_signal(m: usize, sup: &SupportDraw, scenario: &Scenario, rng: &mut Rng) -> (Vec<f64>, PriorKnowledge) {
    let mut x = vec![0.0; m];
    for i in sup.n_set.iter() {
        let missed = sup.delta.contains(i);
        x[i] = match scenario {
            Scenario::ThreeBit => {
                if missed {
                    1.0 + rng.below(2) as f64
                } else {
                    3.0 + rng.below(5) as f64
                }
            }
            _ => {
                let mag = if missed { 0.1 } else { 1.0 };
                if rng.below(2) == 0 {
                    mag
                } else {
                    -mag
                }
            }
        };
    }
    let mut mu = Vec::with_capacity(sup.t.len());
    for i in sup.t.iter() {
        let extra = sup.delta_e.contains(i);
        let v = match *scenario {
            Scenario::QuantizedGrid { k, rho } => {
                let k = k as i64;
                let j = if extra {
                    let mag = 1 + rng.below(k as u64) as i64;
                    if rng.below(2) == 0 {
                        mag
                    } else {
                        -mag
                    }
                } else {
                    rng.below(2 * k as u64 + 1) as i64 - k
                };
                let nu = if j == k {
                    rho
                } else if j == -k {
                    -rho
                } else {
                    j as f64 * rho / k as f64
                };
                x[i] + nu
            }
            Scenario::ThreeBit => {
                let nu = if extra {
                    rng.choose(&[-2.0, -1.0, 1.0, 2.0])
                } else {
                    rng.below(5) as f64 - 2.0
                };
                clip_0_7(&[x[i] + nu])[0]
            }
            Scenario::Continuous { rho } => x[i] + rng.uniform(-rho, rho),
        };
        mu.push(v);
    }
    let prior = PriorKnowledge::new(sup.t.clone(), mu, scenario.rho()).expect("valid generated prior");
    (x, prior)
}
