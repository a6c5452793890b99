//! Dense two-phase simplex for `min cᵀx  s.t.  Ax = b, x ≥ 0`.
//!
//! Sized for the master problems of the decomposition searches (tens of rows,
//! up to a few thousand columns). Columns are passed column-major. Dantzig
//! pricing switches to Bland's rule after a run of degenerate pivots.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-11;
const DEGENERATE_RUN: usize = 50;

#[derive(Clone, Debug)]
pub(crate) struct LpSolution {
    pub x: Vec<f64>,
    #[allow(dead_code)] // read by tests and kept for diagnostics
    pub objective: f64,
    /// `y` with reduced costs `c_j − yᵀA_j ≥ 0` at optimality.
    pub duals: Vec<f64>,
}

struct Tableau {
    m: usize,
    /// real columns followed by one artificial per row
    width: usize,
    real: usize,
    t: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, j: usize) {
        let inv = 1.0 / self.t[r][j];
        for v in self.t[r].iter_mut() {
            *v *= inv;
        }
        self.rhs[r] *= inv;
        self.t[r][j] = 1.0;
        let prow = self.t[r].clone();
        let prhs = self.rhs[r];
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i][j];
            if f == 0.0 {
                continue;
            }
            for (v, p) in self.t[i].iter_mut().zip(&prow) {
                *v -= f * p;
            }
            self.t[i][j] = 0.0;
            self.rhs[i] -= f * prhs;
            if self.rhs[i] < 0.0 && self.rhs[i] > -1e-13 {
                self.rhs[i] = 0.0;
            }
        }
        self.basis[r] = j;
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (i, &bj) in self.basis.iter().enumerate() {
            let cb = cost[bj];
            if cb == 0.0 {
                continue;
            }
            for (dj, tij) in d.iter_mut().zip(&self.t[i]) {
                *dj -= cb * tij;
            }
        }
        d
    }

    /// Runs simplex iterations for `cost`; columns `≥ allowed` never enter.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<()> {
        let scale = cost.iter().fold(1.0f64, |s, c| s.max(c.abs()));
        let tol = COST_TOL * scale;
        let limit = 50 * (self.width + self.m) + 1000;
        let mut degenerate = 0usize;
        for _ in 0..limit {
            let d = self.reduced_costs(cost);
            let enter = if degenerate >= DEGENERATE_RUN {
                (0..allowed).find(|&j| d[j] < -tol)
            } else {
                (0..allowed)
                    .filter(|&j| d[j] < -tol)
                    .min_by(|&a, &b| d[a].total_cmp(&d[b]))
            };
            let Some(j) = enter else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.m {
                let a = self.t[r][j];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[r] / a;
                    let better = match best {
                        None => true,
                        Some((br, bv)) => {
                            ratio < bv - 1e-15
                                || (ratio <= bv + 1e-15 && self.basis[r] < self.basis[br])
                        }
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            let Some((r, ratio)) = best else {
                return Err(Error::Solver("linear program is unbounded".into()));
            };
            if ratio <= 1e-15 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, j);
        }
        Err(Error::Solver("simplex exceeded its iteration limit".into()))
    }
}

/// Solves `min cᵀx  s.t.  Σ_j x_j·columns[j] = b,  x ≥ 0`.
pub(crate) fn solve_lp(cost: &[f64], columns: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let m = b.len();
    let n = columns.len();
    if cost.len() != n || columns.iter().any(|c| c.len() != m) {
        return Err(Error::Solver("inconsistent linear program dimensions".into()));
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(Error::Solver("non-finite cost in linear program".into()));
    }
    let sign: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let width = n + m;
    let mut t = vec![vec![0.0; width]; m];
    for (j, col) in columns.iter().enumerate() {
        for i in 0..m {
            t[i][j] = sign[i] * col[i];
        }
    }
    for (i, row) in t.iter_mut().enumerate() {
        row[n + i] = 1.0;
    }
    let rhs: Vec<f64> = b.iter().zip(&sign).map(|(v, s)| v * s).collect();
    let mut tab = Tableau {
        m,
        width,
        real: n,
        t,
        rhs,
        basis: (n..n + m).collect(),
    };

    let mut phase1 = vec![0.0; width];
    for v in &mut phase1[n..] {
        *v = 1.0;
    }
    tab.optimize(&phase1, n)?;
    let infeasibility: f64 = tab
        .basis
        .iter()
        .zip(&tab.rhs)
        .filter(|(&j, _)| j >= n)
        .map(|(_, v)| *v)
        .sum();
    let total: f64 = b.iter().map(|v| v.abs()).sum();
    if infeasibility > 1e-9 * (1.0 + total) {
        return Err(Error::Solver(format!(
            "linear program infeasible (residual {infeasibility:.3e})"
        )));
    }
    // Drive zero-level artificials out; rows where that fails are redundant.
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(j) = (0..n).find(|&j| tab.t[r][j].abs() > 1e-9) {
                tab.pivot(r, j);
            }
        }
    }

    let mut phase2 = vec![0.0; width];
    phase2[..n].copy_from_slice(cost);
    tab.optimize(&phase2, tab.real)?;

    let mut x = vec![0.0; n];
    for (r, &j) in tab.basis.iter().enumerate() {
        if j < n {
            x[j] = tab.rhs[r].max(0.0);
        }
    }
    let objective = x.iter().zip(cost).map(|(a, c)| a * c).sum();
    // y_i = c_Bᵀ B⁻¹ e_i; B⁻¹ sits in the artificial block.
    let mut duals = vec![0.0; m];
    for (i, y) in duals.iter_mut().enumerate() {
        let mut s = 0.0;
        for r in 0..m {
            s += phase2[tab.basis[r]] * tab.t[r][n + i];
        }
        *y = s * sign[i];
    }
    Ok(LpSolution {
        x,
        objective,
        duals,
    })
}
