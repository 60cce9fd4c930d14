//! Dense linear programming in bounded standard form:
//!
//! ```text
//! minimize    c'x
//! subject to  A_eq x = b_eq
//!             lower <= x <= upper      (bounds may be infinite)
//! ```
//!
//! Solved by a two-phase revised primal simplex that treats bounds and free
//! variables natively.

mod dump;
mod simplex;

use thiserror::Error;

use crate::linalg::{DenseMatrix, LinalgError};

pub use dump::write_lp_text;
pub use simplex::{solve_lp_with, Pricing, SimplexOptions};

/// Pivot magnitude below which a column entry is treated as zero.
pub const PIVOT_TOL: f64 = 1e-10;
/// Primal feasibility and dual optimality tolerance.
pub const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("malformed LP: {0}")]
    Malformed(String),
    #[error("cycling suspected: iteration cap of {0} pivots exceeded")]
    CyclingSuspected(usize),
    #[error("basis factorization failed: {0}")]
    Factorization(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp {
    pub objective: Vec<f64>,
    pub a_eq: DenseMatrix,
    pub b_eq: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl StandardLp {
    pub fn new(
        objective: Vec<f64>,
        a_eq: DenseMatrix,
        b_eq: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self, LpError> {
        let lp = StandardLp {
            objective,
            a_eq,
            b_eq,
            lower,
            upper,
        };
        lp.validate()?;
        Ok(lp)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.b_eq.len()
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        if self.a_eq.rows() != self.b_eq.len() {
            return Err(LpError::Malformed(format!(
                "A_eq has {} rows but b_eq has length {}",
                self.a_eq.rows(),
                self.b_eq.len()
            )));
        }
        if self.a_eq.cols() != n || self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Malformed(format!(
                "column count mismatch: c {}, A_eq {}, lower {}, upper {}",
                n,
                self.a_eq.cols(),
                self.lower.len(),
                self.upper.len()
            )));
        }
        if self.objective.iter().chain(&self.b_eq).any(|v| !v.is_finite()) {
            return Err(LpError::Malformed("non-finite objective or rhs".into()));
        }
        for (j, (&l, &u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY || l > u {
                return Err(LpError::Malformed(format!("invalid bounds [{l}, {u}] on x{j}")));
            }
        }
        Ok(())
    }

    /// `‖A_eq x − b_eq‖_∞`
    pub fn equality_residual(&self, x: &[f64]) -> f64 {
        self.a_eq
            .matvec(x)
            .iter()
            .zip(&self.b_eq)
            .fold(0.0f64, |m, (ax, b)| m.max((ax - b).abs()))
    }

    /// Largest violation of the variable bounds.
    pub fn bound_violation(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .fold(0.0f64, |m, (&v, (&l, &u))| m.max(l - v).max(v - u))
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        crate::linalg::dot(&self.objective, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Primal point; empty unless `status == Optimal`.
    pub solution: Vec<f64>,
    pub objective: f64,
    /// Total simplex pivots (including bound flips) over both phases.
    pub iterations: usize,
    /// Equality-row multipliers `y = B^{-T} c_B` at the final basis; empty
    /// unless optimal.
    pub duals: Vec<f64>,
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Largest violation of the complementary-slackness sign conditions of
    /// the reduced costs `d = c − A'y` at the returned point. A variable
    /// strictly between its bounds must have `d_j = 0`; at its lower bound
    /// `d_j >= 0`; at its upper bound `d_j <= 0`.
    pub fn complementary_slackness_violation(&self, lp: &StandardLp) -> f64 {
        if !self.is_optimal() {
            return f64::INFINITY;
        }
        let aty = lp.a_eq.tr_matvec(&self.duals);
        let mut worst = 0.0f64;
        for j in 0..lp.num_vars() {
            let d = lp.objective[j] - aty[j];
            let x = self.solution[j];
            let (l, u) = (lp.lower[j], lp.upper[j]);
            let at_lower = l.is_finite() && (x - l).abs() <= FEAS_TOL * (1.0 + l.abs());
            let at_upper = u.is_finite() && (x - u).abs() <= FEAS_TOL * (1.0 + u.abs());
            let v = match (at_lower, at_upper) {
                (true, true) => 0.0,
                (true, false) => (-d).max(0.0),
                (false, true) => d.max(0.0),
                (false, false) => d.abs(),
            };
            worst = worst.max(v);
        }
        worst
    }
}

/// Solves with the default options (Bland's rule, refactor every 50 pivots).
pub fn solve_lp(lp: &StandardLp) -> Result<LpOutcome, LpError> {
    solve_lp_with(lp, &SimplexOptions::default())
}
