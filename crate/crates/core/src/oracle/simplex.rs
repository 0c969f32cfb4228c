//! Dense two-phase simplex for small linear programs
//!
//! maximize c·x  subject to  rows (≤ or ≥ b),  x ≥ 0.
//!
//! Bland's rule throughout, so degenerate problems cannot cycle.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    LessEq,
    GreaterEq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

/// Relative feasibility tolerance on right-hand sides.
pub const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;

struct Tableau {
    /// m constraint rows followed by the objective row; last column is rhs.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.t[r][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        self.t[row][col] = 1.0;
        let pivot_row = self.t[row].clone();
        for (r, line) in self.t.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let f = line[col];
            if f != 0.0 {
                for (v, pv) in line.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                line[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex on the objective stored in the last row, written as
    /// `z − Σ d_j x_j = value`, i.e. negative entries improve the objective.
    /// Only columns with `allowed[j]` may enter.
    fn optimize(&mut self, allowed: &[bool]) -> bool {
        let m = self.basis.len();
        loop {
            let obj = &self.t[m];
            let Some(enter) = (0..self.cols).find(|&j| allowed[j] && obj[j] < -PIVOT_TOL) else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..m {
                let a = self.t[r][enter];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r) / a;
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            let tol = 1e-12 * best.abs().max(1.0);
                            ratio < best - tol
                                || ((ratio - best).abs() <= tol && self.basis[r] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let leave = leave.map(|(r, _)| r);
            match leave {
                Some(r) => self.pivot(r, enter),
                None => return false,
            }
        }
    }
}

pub fn maximize(objective: &[f64], constraints: &[Constraint]) -> LpOutcome {
    let n = objective.len();
    let m = constraints.len();
    let scale = constraints
        .iter()
        .map(|c| c.rhs.abs())
        .fold(1.0f64, f64::max);

    // Normalize to non-negative right-hand sides.
    let rows: Vec<(Vec<f64>, Relation, f64)> = constraints
        .iter()
        .map(|c| {
            assert_eq!(c.coeffs.len(), n, "constraint width mismatch");
            if c.rhs < 0.0 {
                let flipped = match c.relation {
                    Relation::LessEq => Relation::GreaterEq,
                    Relation::GreaterEq => Relation::LessEq,
                };
                (c.coeffs.iter().map(|v| -v).collect(), flipped, -c.rhs)
            } else {
                (c.coeffs.clone(), c.relation, c.rhs)
            }
        })
        .collect();

    // Columns: originals, one slack/surplus per row, one artificial per ≥ row.
    let n_art = rows.iter().filter(|r| r.1 == Relation::GreaterEq).count();
    let cols = n + m + n_art;
    let mut t = vec![vec![0.0; cols + 1]; m + 1];
    let mut basis = vec![0; m];
    let mut art = n + m;
    let mut is_art = vec![false; cols];
    for (r, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        t[r][..n].copy_from_slice(coeffs);
        t[r][cols] = *rhs;
        match rel {
            Relation::LessEq => {
                t[r][n + r] = 1.0;
                basis[r] = n + r;
            }
            Relation::GreaterEq => {
                t[r][n + r] = -1.0;
                t[r][art] = 1.0;
                is_art[art] = true;
                basis[r] = art;
                art += 1;
            }
        }
    }
    let mut tab = Tableau { t, basis, cols };

    if n_art > 0 {
        // Phase 1: maximize −Σ artificials.
        for (v, &a) in tab.t[m].iter_mut().zip(&is_art) {
            *v = if a { 1.0 } else { 0.0 };
        }
        tab.t[m][cols] = 0.0;
        for r in 0..m {
            if is_art[tab.basis[r]] {
                let row = tab.t[r].clone();
                for (v, rv) in tab.t[m].iter_mut().zip(&row) {
                    *v -= rv;
                }
            }
        }
        tab.optimize(&vec![true; cols]);
        if -tab.t[m][cols] > FEAS_TOL * scale {
            return LpOutcome::Infeasible;
        }
        // Drive remaining (zero-valued) artificials out of the basis.
        for r in 0..m {
            if is_art[tab.basis[r]] {
                if let Some(j) = (0..cols).find(|&j| !is_art[j] && tab.t[r][j].abs() > PIVOT_TOL) {
                    tab.pivot(r, j);
                }
            }
        }
    }

    // Phase 2 objective row: z − c·x = 0, expressed in the current basis.
    for j in 0..=cols {
        tab.t[m][j] = 0.0;
    }
    for (j, &c) in objective.iter().enumerate() {
        tab.t[m][j] = -c;
    }
    for r in 0..m {
        let b = tab.basis[r];
        let f = tab.t[m][b];
        if f != 0.0 {
            let row = tab.t[r].clone();
            for (v, rv) in tab.t[m].iter_mut().zip(&row) {
                *v -= f * rv;
            }
        }
    }
    let allowed: Vec<bool> = (0..cols).map(|j| !is_art[j]).collect();
    if !tab.optimize(&allowed) {
        return LpOutcome::Unbounded;
    }

    let mut x = vec![0.0; n];
    for r in 0..m {
        if tab.basis[r] < n {
            x[tab.basis[r]] = tab.rhs(r).max(0.0);
        }
    }
    let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    LpOutcome::Optimal { x, value }
}
