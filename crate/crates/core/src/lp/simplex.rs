use crate::linalg::{lu_inverse, DenseMatrix};

use super::{LpError, LpOutcome, LpStatus, StandardLp, FEAS_TOL, PIVOT_TOL};

/// Entering-variable selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pricing {
    /// Smallest-index eligible variable enters; smallest-index blocking
    /// variable leaves. Terminates on every input.
    Bland,
    /// Most negative reduced cost, switching to Bland's rule after a run of
    /// degenerate pivots.
    Dantzig,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub pricing: Pricing,
    pub max_pivots: usize,
    pub refactor_every: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            pricing: Pricing::Bland,
            max_pivots: 1_000_000,
            refactor_every: 50,
        }
    }
}

/// Consecutive degenerate pivots tolerated under Dantzig pricing before
/// falling back to Bland's rule for the rest of the phase.
const DEGENERATE_RUN_LIMIT: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Nonbasic free variable, held at its current value.
    Free,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted { degenerate: bool },
}

/// Working state of one solve. Columns `0..ns` are structural, `ns..ns+m`
/// are the phase-one artificials `sign_i · e_i`.
struct Simplex<'a> {
    lp: &'a StandardLp,
    m: usize,
    ns: usize,
    /// Structural columns, column-major.
    cols: Vec<f64>,
    art_sign: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    /// Explicit basis inverse, row-major `m × m`.
    binv: Vec<f64>,
    since_refactor: usize,
    pivots: usize,
    opts: SimplexOptions,
}

pub fn solve_lp_with(lp: &StandardLp, opts: &SimplexOptions) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let mut s = Simplex::new(lp, *opts);

    // Phase one: minimize the sum of artificials.
    s.set_phase_one_costs();
    match s.run()? {
        LpStatus::Optimal => {}
        // The phase-one objective is bounded below by zero.
        _ => unreachable!("phase one cannot be unbounded"),
    }
    s.refactor()?;
    let scale = 1.0 + lp.b_eq.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let art_max = (s.ns..s.ns + s.m).fold(0.0f64, |mx, j| mx.max(s.x[j]));
    if art_max > FEAS_TOL * scale {
        return Ok(LpOutcome {
            status: LpStatus::Infeasible,
            solution: Vec::new(),
            objective: f64::NAN,
            iterations: s.pivots,
            duals: Vec::new(),
        });
    }

    // Phase two: artificials are pinned to zero and can only leave the basis.
    for j in s.ns..s.ns + s.m {
        s.upper[j] = 0.0;
        if let VarState::AtUpper | VarState::AtLower = s.state[j] {
            s.x[j] = 0.0;
            s.state[j] = VarState::AtLower;
        }
    }
    s.set_phase_two_costs();
    let status = s.run()?;
    if status == LpStatus::Unbounded {
        return Ok(LpOutcome {
            status,
            solution: Vec::new(),
            objective: f64::NEG_INFINITY,
            iterations: s.pivots,
            duals: Vec::new(),
        });
    }
    s.refactor()?;
    let solution: Vec<f64> = s.x[..s.ns].to_vec();
    let duals = s.duals();
    Ok(LpOutcome {
        status: LpStatus::Optimal,
        objective: lp.objective_value(&solution),
        solution,
        iterations: s.pivots,
        duals,
    })
}

impl<'a> Simplex<'a> {
    fn new(lp: &'a StandardLp, opts: SimplexOptions) -> Self {
        let m = lp.num_rows();
        let ns = lp.num_vars();
        let mut cols = vec![0.0; m * ns];
        for i in 0..m {
            let row = lp.a_eq.row(i);
            for j in 0..ns {
                cols[j * m + i] = row[j];
            }
        }
        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        lower.extend(std::iter::repeat(0.0).take(m));
        upper.extend(std::iter::repeat(f64::INFINITY).take(m));

        let mut x = vec![0.0; ns + m];
        let mut state = vec![VarState::Free; ns + m];
        for j in 0..ns {
            if lower[j].is_finite() {
                x[j] = lower[j];
                state[j] = VarState::AtLower;
            } else if upper[j].is_finite() {
                x[j] = upper[j];
                state[j] = VarState::AtUpper;
            }
        }
        let mut residual = lp.b_eq.clone();
        for j in 0..ns {
            if x[j] != 0.0 {
                for i in 0..m {
                    residual[i] -= cols[j * m + i] * x[j];
                }
            }
        }
        let art_sign: Vec<f64> = residual.iter().map(|&r| if r >= 0.0 { 1.0 } else { -1.0 }).collect();
        let mut basis = Vec::with_capacity(m);
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            let j = ns + i;
            x[j] = residual[i].abs();
            state[j] = VarState::Basic(i);
            basis.push(j);
            binv[i * m + i] = art_sign[i];
        }
        Simplex {
            lp,
            m,
            ns,
            cols,
            art_sign,
            lower,
            upper,
            cost: vec![0.0; ns + m],
            x,
            state,
            basis,
            binv,
            since_refactor: 0,
            pivots: 0,
            opts,
        }
    }

    fn set_phase_one_costs(&mut self) {
        self.cost.iter_mut().for_each(|c| *c = 0.0);
        for j in self.ns..self.ns + self.m {
            self.cost[j] = 1.0;
        }
    }

    fn set_phase_two_costs(&mut self) {
        self.cost[..self.ns].copy_from_slice(&self.lp.objective);
        for j in self.ns..self.ns + self.m {
            self.cost[j] = 0.0;
        }
    }

    /// Column `j` of the working matrix, scattered into `out`.
    fn column_into(&self, j: usize, out: &mut [f64]) {
        if j < self.ns {
            out.copy_from_slice(&self.cols[j * self.m..(j + 1) * self.m]);
        } else {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[j - self.ns] = self.art_sign[j - self.ns];
        }
    }

    /// `y' = c_B' B^{-1}`
    fn duals(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &bj) in self.basis.iter().enumerate() {
            let cb = self.cost[bj];
            if cb == 0.0 {
                continue;
            }
            let row = &self.binv[i * m..(i + 1) * m];
            for (yk, &b) in y.iter_mut().zip(row) {
                *yk += cb * b;
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.ns {
            let col = &self.cols[j * self.m..(j + 1) * self.m];
            self.cost[j] - crate::linalg::dot(col, y)
        } else {
            let i = j - self.ns;
            self.cost[j] - y[i] * self.art_sign[i]
        }
    }

    /// Whether nonbasic `j` can improve the objective, and in which
    /// direction (+1 increase, -1 decrease).
    fn improving_direction(&self, j: usize, d: f64) -> Option<f64> {
        if self.lower[j] == self.upper[j] {
            return None;
        }
        match self.state[j] {
            VarState::Basic(_) => None,
            VarState::AtLower if d < -FEAS_TOL => Some(1.0),
            VarState::AtUpper if d > FEAS_TOL => Some(-1.0),
            VarState::Free if d.abs() > FEAS_TOL => Some(if d < 0.0 { 1.0 } else { -1.0 }),
            _ => None,
        }
    }

    fn choose_entering(&self, bland: bool) -> Option<(usize, f64)> {
        let y = self.duals();
        let n = self.ns + self.m;
        if bland {
            for j in 0..n {
                if let VarState::Basic(_) = self.state[j] {
                    continue;
                }
                let d = self.reduced_cost(j, &y);
                if let Some(dir) = self.improving_direction(j, d) {
                    return Some((j, dir));
                }
            }
            None
        } else {
            let mut best: Option<(usize, f64, f64)> = None;
            for j in 0..n {
                if let VarState::Basic(_) = self.state[j] {
                    continue;
                }
                let d = self.reduced_cost(j, &y);
                if let Some(dir) = self.improving_direction(j, d) {
                    if best.map_or(true, |(_, _, bd)| d.abs() > bd) {
                        best = Some((j, dir, d.abs()));
                    }
                }
            }
            best.map(|(j, dir, _)| (j, dir))
        }
    }

    fn run(&mut self) -> Result<LpStatus, LpError> {
        let mut degenerate_run = 0;
        let mut bland = self.opts.pricing == Pricing::Bland;
        loop {
            if self.pivots >= self.opts.max_pivots {
                return Err(LpError::CyclingSuspected(self.opts.max_pivots));
            }
            match self.step(bland)? {
                Step::Optimal => return Ok(LpStatus::Optimal),
                Step::Unbounded => return Ok(LpStatus::Unbounded),
                Step::Pivoted { degenerate } => {
                    if degenerate {
                        degenerate_run += 1;
                        if degenerate_run >= DEGENERATE_RUN_LIMIT {
                            bland = true;
                        }
                    } else {
                        degenerate_run = 0;
                    }
                }
            }
        }
    }

    fn step(&mut self, bland: bool) -> Result<Step, LpError> {
        let Some((enter, dir)) = self.choose_entering(bland) else {
            return Ok(Step::Optimal);
        };
        let m = self.m;
        let mut a = vec![0.0; m];
        self.column_into(enter, &mut a);
        let mut alpha = vec![0.0; m];
        for i in 0..m {
            alpha[i] = crate::linalg::dot(&self.binv[i * m..(i + 1) * m], &a);
        }

        // Ratio test. Basic x_B[i] moves by -dir * alpha[i] * t.
        let mut t_min = f64::INFINITY;
        let mut leave: Option<(usize, bool)> = None; // (row, hits_upper)
        for i in 0..m {
            let rate = -dir * alpha[i];
            if rate.abs() <= PIVOT_TOL {
                continue;
            }
            let bj = self.basis[i];
            let xb = self.x[bj];
            let (limit, hits_upper) = if rate < 0.0 {
                if !self.lower[bj].is_finite() {
                    continue;
                }
                ((xb - self.lower[bj]) / -rate, false)
            } else {
                if !self.upper[bj].is_finite() {
                    continue;
                }
                ((self.upper[bj] - xb) / rate, true)
            };
            let limit = limit.max(0.0);
            let better = match leave {
                None => true,
                Some((r, _)) => {
                    if limit < t_min - 1e-12 {
                        true
                    } else if limit <= t_min + 1e-12 {
                        if bland {
                            bj < self.basis[r]
                        } else {
                            alpha[i].abs() > alpha[r].abs()
                        }
                    } else {
                        false
                    }
                }
            };
            if better {
                t_min = if leave.is_none() { limit } else { t_min.min(limit) };
                leave = Some((i, hits_upper));
            }
        }

        let flip = self.upper[enter] - self.lower[enter];
        if flip.is_finite() && flip <= t_min {
            // Bound flip: the entering variable reaches its opposite bound first.
            let t = flip;
            self.x[enter] = if dir > 0.0 {
                self.upper[enter]
            } else {
                self.lower[enter]
            };
            self.state[enter] = if dir > 0.0 {
                VarState::AtUpper
            } else {
                VarState::AtLower
            };
            for i in 0..m {
                let bj = self.basis[i];
                self.x[bj] -= dir * t * alpha[i];
            }
            self.pivots += 1;
            return Ok(Step::Pivoted { degenerate: t == 0.0 });
        }

        let Some((r, hits_upper)) = leave else {
            return Ok(Step::Unbounded);
        };
        let t = t_min;

        self.x[enter] += dir * t;
        for i in 0..m {
            let bj = self.basis[i];
            self.x[bj] -= dir * t * alpha[i];
        }
        let out = self.basis[r];
        if hits_upper {
            self.x[out] = self.upper[out];
            self.state[out] = VarState::AtUpper;
        } else {
            self.x[out] = self.lower[out];
            self.state[out] = VarState::AtLower;
        }
        self.basis[r] = enter;
        self.state[enter] = VarState::Basic(r);

        let piv = alpha[r];
        {
            let (before, rest) = self.binv.split_at_mut(r * m);
            let (row_r, after) = rest.split_at_mut(m);
            row_r.iter_mut().for_each(|v| *v /= piv);
            for (i, row) in before.chunks_exact_mut(m).enumerate() {
                let f = alpha[i];
                if f != 0.0 {
                    row.iter_mut().zip(row_r.iter()).for_each(|(v, &p)| *v -= f * p);
                }
            }
            for (k, row) in after.chunks_exact_mut(m).enumerate() {
                let f = alpha[r + 1 + k];
                if f != 0.0 {
                    row.iter_mut().zip(row_r.iter()).for_each(|(v, &p)| *v -= f * p);
                }
            }
        }

        self.pivots += 1;
        self.since_refactor += 1;
        if self.since_refactor >= self.opts.refactor_every {
            self.refactor()?;
        }
        Ok(Step::Pivoted { degenerate: t == 0.0 })
    }

    /// Recomputes `B^{-1}` from scratch and the basic values from the
    /// nonbasic ones.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        self.since_refactor = 0;
        if m == 0 {
            return Ok(());
        }
        let mut b = DenseMatrix::zeros(m, m);
        let mut col = vec![0.0; m];
        for (c, &j) in self.basis.iter().enumerate() {
            self.column_into(j, &mut col);
            for i in 0..m {
                b[(i, c)] = col[i];
            }
        }
        let inv = lu_inverse(&b)?;
        self.binv.copy_from_slice(inv.as_slice());

        let mut rhs = self.lp.b_eq.clone();
        for j in 0..self.ns + self.m {
            if let VarState::Basic(_) = self.state[j] {
                continue;
            }
            if self.x[j] != 0.0 {
                self.column_into(j, &mut col);
                for i in 0..m {
                    rhs[i] -= col[i] * self.x[j];
                }
            }
        }
        for i in 0..m {
            let v = crate::linalg::dot(&self.binv[i * m..(i + 1) * m], &rhs);
            self.x[self.basis[i]] = v;
        }
        Ok(())
    }
}
