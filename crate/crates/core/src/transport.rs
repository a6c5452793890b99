//! Transportation problems over coupling sets.
//!
//! The solver is a primal network simplex on the bipartite transportation
//! graph. A basis is a spanning tree of `m + n − 1` cells; potentials are
//! recomputed on the tree after every pivot and the entering cell is chosen by
//! Bland's rule. Infinite costs are handled lexicographically: the primary
//! objective is the mass placed on infinite cells, the secondary objective is
//! the finite cost.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::dist::{FiniteDist, JointDist, SUPPORT_EPS};
use crate::error::{shape_err, Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const MARGINAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Min,
    Max,
}

/// A coupling with prescribed marginals and its objective value (nats).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    rows: usize,
    cols: usize,
    plan: Vec<f64>,
    /// `+∞` when every admissible plan is forced onto an infinite cell
    /// (or, for maximization, when any admissible plan can reach one).
    pub value: f64,
}

impl TransportPlan {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.plan[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.plan
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.plan.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.cols];
        for r in self.plan.chunks(self.cols) {
            for (a, v) in s.iter_mut().zip(r) {
                *a += v;
            }
        }
        s
    }

    /// `Σ plan · cost` over loaded cells; `+∞` if a loaded cell is infinite.
    pub fn cost_of(&self, cost: &[Vec<f64>]) -> f64 {
        let mut total = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let m = self.get(i, j);
                if m > 0.0 {
                    total += m * cost[i][j];
                }
            }
        }
        total
    }
}

/// Optimal plan plus dual potentials for the original orientation:
/// `row_pot[i] + col_pot[j]` bounds the cost from the objective's side
/// (≤ cost for min, ≥ cost for max) on every finite cell.
#[derive(Clone, Debug)]
pub(crate) struct Solved {
    pub plan: TransportPlan,
    pub row_pot: Vec<f64>,
    pub col_pot: Vec<f64>,
}

/// Solves the transportation problem `min|max Σ plan·cost` over couplings of
/// `p` and `q`.
pub fn solve_transport(
    cost: &[Vec<f64>],
    p: &FiniteDist,
    q: &FiniteDist,
    sense: Sense,
) -> Result<TransportPlan> {
    solve_transport_masses(cost, p.as_slice(), q.as_slice(), sense)
}

/// As [`solve_transport`], on raw marginal masses.
pub fn solve_transport_masses(
    cost: &[Vec<f64>],
    p: &[f64],
    q: &[f64],
    sense: Sense,
) -> Result<TransportPlan> {
    solve_with_duals(cost, p, q, sense).map(|s| s.plan)
}

pub(crate) fn solve_with_duals(
    cost: &[Vec<f64>],
    p: &[f64],
    q: &[f64],
    sense: Sense,
) -> Result<Solved> {
    let (m, n) = (p.len(), q.len());
    if cost.len() != m || cost.iter().any(|r| r.len() != n) {
        return Err(shape_err(
            format!("{m}x{n} cost"),
            format!("{}x{} cost", cost.len(), cost.first().map_or(0, Vec::len)),
        ));
    }
    if p.iter().chain(q).any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::MarginalMismatch("marginals must be finite and nonnegative".into()));
    }
    let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
    if (sp - sq).abs() > MARGINAL_TOL {
        return Err(Error::MarginalMismatch(format!(
            "row mass {sp} differs from column mass {sq}"
        )));
    }
    for row in cost {
        for &c in row {
            if c.is_nan() || c == f64::NEG_INFINITY {
                return Err(Error::Domain(format!("cost entry {c} not allowed")));
            }
        }
    }

    let rows: Vec<usize> = (0..m).filter(|&i| p[i] > 0.0).collect();
    let cols: Vec<usize> = (0..n).filter(|&j| q[j] > 0.0).collect();
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::MarginalMismatch("marginal without mass".into()));
    }

    // A sup over couplings is +∞ as soon as some coupling can load an
    // infinite cell; the independent coupling loads every cell of supp p × supp q.
    if sense == Sense::Max {
        let hit = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
            .find(|&(i, j)| cost[i][j] == f64::INFINITY);
        if hit.is_some() {
            let mut plan = vec![0.0; m * n];
            for &i in &rows {
                for &j in &cols {
                    plan[i * n + j] = p[i] * q[j] / sq;
                }
            }
            return Ok(Solved {
                plan: TransportPlan {
                    rows: m,
                    cols: n,
                    plan,
                    value: f64::INFINITY,
                },
                row_pot: vec![f64::INFINITY; m],
                col_pot: vec![0.0; n],
            });
        }
    }

    let sign = if sense == Sense::Max { -1.0 } else { 1.0 };
    let a: Vec<f64> = rows.iter().map(|&i| p[i]).collect();
    let scale = sp / sq;
    let b: Vec<f64> = cols.iter().map(|&j| q[j] * scale).collect();
    let mut forbidden = vec![0.0; rows.len() * cols.len()];
    let mut finite = vec![0.0; rows.len() * cols.len()];
    for (ri, &i) in rows.iter().enumerate() {
        for (cj, &j) in cols.iter().enumerate() {
            let c = cost[i][j];
            if c == f64::INFINITY {
                forbidden[ri * cols.len() + cj] = 1.0;
            } else {
                finite[ri * cols.len() + cj] = sign * c;
            }
        }
    }
    let mut simplex = NetworkSimplex::new(a, b, forbidden, finite);
    simplex.run()?;

    let (rm, cn) = (rows.len(), cols.len());
    let infeasible = simplex.primary_objective() > 1e-12;
    let mut plan = vec![0.0; m * n];
    let mut value = 0.0;
    for ri in 0..rm {
        for cj in 0..cn {
            let f = simplex.flow[ri * cn + cj];
            let (i, j) = (rows[ri], cols[cj]);
            plan[i * n + j] = f;
            if f > 0.0 && cost[i][j].is_finite() {
                value += f * cost[i][j];
            }
        }
    }
    if infeasible {
        value = f64::INFINITY;
    }

    let (u, v) = simplex.secondary_potentials();
    let mut row_pot = vec![0.0; m];
    let mut col_pot = vec![0.0; n];
    for (cj, &j) in cols.iter().enumerate() {
        col_pot[j] = sign * v[cj];
    }
    for (ri, &i) in rows.iter().enumerate() {
        row_pot[i] = sign * u[ri];
    }
    // Dual-feasible potentials for dropped symbols, against the massed ones.
    // For maximization an infinite cell forces an infinite potential.
    for i in (0..m).filter(|i| !rows.contains(i)) {
        row_pot[i] = dropped_potential(cols.iter().map(|&j| (cost[i][j], col_pot[j])), sense);
    }
    for j in (0..n).filter(|j| !cols.contains(j)) {
        col_pot[j] = dropped_potential(rows.iter().map(|&i| (cost[i][j], row_pot[i])), sense);
    }

    Ok(Solved {
        plan: TransportPlan {
            rows: m,
            cols: n,
            plan,
            value,
        },
        row_pot,
        col_pot,
    })
}

fn dropped_potential(cells: impl Iterator<Item = (f64, f64)>, sense: Sense) -> f64 {
    let mut best = match sense {
        Sense::Min => f64::INFINITY,
        Sense::Max => f64::NEG_INFINITY,
    };
    for (c, other) in cells {
        match sense {
            Sense::Min if c.is_finite() => best = best.min(c - other),
            Sense::Min => {}
            Sense::Max if c.is_finite() => best = best.max(c - other),
            Sense::Max => return f64::INFINITY,
        }
    }
    best
}

struct NetworkSimplex {
    m: usize,
    n: usize,
    flow: Vec<f64>,
    basic: Vec<bool>,
    primary: Vec<f64>,
    secondary: Vec<f64>,
    u1: Vec<f64>,
    v1: Vec<f64>,
    u2: Vec<f64>,
    v2: Vec<f64>,
    tol2: f64,
}

impl NetworkSimplex {
    fn new(a: Vec<f64>, b: Vec<f64>, primary: Vec<f64>, secondary: Vec<f64>) -> Self {
        let (m, n) = (a.len(), b.len());
        let mut flow = vec![0.0; m * n];
        let mut basic = vec![false; m * n];
        // Northwest corner: a staircase of exactly m + n − 1 cells.
        let (mut ra, mut cb) = (a, b);
        let (mut i, mut j) = (0, 0);
        while i < m && j < n {
            let t = ra[i].min(cb[j]);
            flow[i * n + j] = t;
            basic[i * n + j] = true;
            ra[i] -= t;
            cb[j] -= t;
            if i == m - 1 {
                j += 1;
            } else if j == n - 1 {
                i += 1;
            } else if ra[i] <= cb[j] {
                i += 1;
            } else {
                j += 1;
            }
        }
        let scale = secondary.iter().fold(1.0f64, |s, c| s.max(c.abs()));
        Self {
            m,
            n,
            flow,
            basic,
            primary,
            secondary,
            u1: vec![0.0; m],
            v1: vec![0.0; n],
            u2: vec![0.0; m],
            v2: vec![0.0; n],
            tol2: PIVOT_TOL * scale,
        }
    }

    fn primary_objective(&self) -> f64 {
        self.flow
            .iter()
            .zip(&self.primary)
            .map(|(f, c)| f * c)
            .sum()
    }

    fn secondary_potentials(&self) -> (Vec<f64>, Vec<f64>) {
        (self.u2.clone(), self.v2.clone())
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        // nodes: rows 0..m, cols m..m+n
        let mut adj = vec![Vec::new(); self.m + self.n];
        for i in 0..self.m {
            for j in 0..self.n {
                if self.basic[i * self.n + j] {
                    adj[i].push(self.m + j);
                    adj[self.m + j].push(i);
                }
            }
        }
        adj
    }

    fn potentials(&mut self, adj: &[Vec<usize>]) {
        let (m, n) = (self.m, self.n);
        let mut seen = vec![false; m + n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        self.u1[0] = 0.0;
        self.u2[0] = 0.0;
        while let Some(node) = queue.pop_front() {
            for &next in &adj[node] {
                if seen[next] {
                    continue;
                }
                seen[next] = true;
                if node < m {
                    let (i, j) = (node, next - m);
                    self.v1[j] = self.primary[i * n + j] - self.u1[i];
                    self.v2[j] = self.secondary[i * n + j] - self.u2[i];
                } else {
                    let (i, j) = (next, node - m);
                    self.u1[i] = self.primary[i * n + j] - self.v1[j];
                    self.u2[i] = self.secondary[i * n + j] - self.v2[j];
                }
                queue.push_back(next);
            }
        }
    }

    /// Bland's rule: first non-basic cell (row-major) with a lexicographically
    /// negative reduced cost.
    fn entering(&self) -> Option<usize> {
        let n = self.n;
        (0..self.m * n).find(|&k| {
            if self.basic[k] {
                return false;
            }
            let (i, j) = (k / n, k % n);
            let d1 = self.primary[k] - self.u1[i] - self.v1[j];
            if d1 < -PIVOT_TOL {
                return true;
            }
            if d1 > PIVOT_TOL {
                return false;
            }
            self.secondary[k] - self.u2[i] - self.v2[j] < -self.tol2
        })
    }

    /// Tree path from row node `i` to column node `m + j`, as cell indices.
    fn tree_path(&self, adj: &[Vec<usize>], i: usize, j: usize) -> Vec<usize> {
        let total = self.m + self.n;
        let target = self.m + j;
        let mut parent = vec![usize::MAX; total];
        parent[i] = i;
        let mut queue = VecDeque::from([i]);
        while let Some(node) = queue.pop_front() {
            if node == target {
                break;
            }
            for &next in &adj[node] {
                if parent[next] == usize::MAX {
                    parent[next] = node;
                    queue.push_back(next);
                }
            }
        }
        let mut cells = Vec::new();
        let mut node = target;
        while node != i {
            let prev = parent[node];
            let (r, c) = if node < self.m { (node, prev - self.m) } else { (prev, node - self.m) };
            cells.push(r * self.n + c);
            node = prev;
        }
        cells.reverse();
        cells
    }

    fn run(&mut self) -> Result<()> {
        let limit = 200 * (self.m + self.n) * (self.m + self.n) + 1000;
        for _ in 0..limit {
            let adj = self.adjacency();
            self.potentials(&adj);
            let Some(enter) = self.entering() else {
                return Ok(());
            };
            let (i, j) = (enter / self.n, enter % self.n);
            // Cycle: enter(+), then the tree path from row i to column j
            // alternates −, +, −, ... starting at the cell touching row i.
            let path = self.tree_path(&adj, i, j);
            let minus: Vec<usize> = path.iter().step_by(2).copied().collect();
            let plus: Vec<usize> = path.iter().skip(1).step_by(2).copied().collect();
            let theta = minus.iter().map(|&k| self.flow[k]).fold(f64::INFINITY, f64::min);
            let leave = *minus
                .iter()
                .filter(|&&k| self.flow[k] <= theta)
                .min()
                .expect("cycle has a minus cell");
            self.flow[enter] += theta;
            for &k in &plus {
                self.flow[k] += theta;
            }
            for &k in &minus {
                self.flow[k] = (self.flow[k] - theta).max(0.0);
            }
            self.flow[leave] = 0.0;
            self.basic[leave] = false;
            self.basic[enter] = true;
        }
        Err(Error::Solver("network simplex exceeded its pivot limit".into()))
    }
}

fn neg_log_cost(pi: &JointDist) -> Vec<Vec<f64>> {
    (0..pi.rows())
        .map(|x| {
            (0..pi.cols())
                .map(|y| {
                    let v = pi.get(x, y);
                    if v > SUPPORT_EPS {
                        -v.ln()
                    } else {
                        f64::INFINITY
                    }
                })
                .collect()
        })
        .collect()
}

/// Maximal cross-entropy `sup_{Q ∈ C(px, py)} Σ Q log 1/π` (nats).
pub fn max_cross_entropy(px: &FiniteDist, py: &FiniteDist, pi: &JointDist) -> Result<f64> {
    check_pair(px.len(), py.len(), pi)?;
    let cost = neg_log_cost(pi);
    Ok(solve_with_duals(&cost, px.as_slice(), py.as_slice(), Sense::Max)?.plan.value)
}

/// Cost matrix `−log π` shared across many cross-entropy evaluations.
#[derive(Clone, Debug)]
pub(crate) struct CrossEntropyCost {
    pub cost: Vec<Vec<f64>>,
}

impl CrossEntropyCost {
    pub fn new(pi: &JointDist) -> Self {
        Self {
            cost: neg_log_cost(pi),
        }
    }

    pub fn value(&self, px: &[f64], py: &[f64]) -> Result<f64> {
        Ok(solve_with_duals(&self.cost, px, py, Sense::Max)?.plan.value)
    }

    pub fn solve(&self, px: &[f64], py: &[f64]) -> Result<Solved> {
        solve_with_duals(&self.cost, px, py, Sense::Max)
    }
}

fn check_pair(nx: usize, ny: usize, pi: &JointDist) -> Result<()> {
    if nx != pi.rows() || ny != pi.cols() {
        return Err(shape_err(
            format!("{}x{}", pi.rows(), pi.cols()),
            format!("{nx}x{ny}"),
        ));
    }
    Ok(())
}

/// `min_{Q ∈ C(pw, pw)} Σ Q(w,w') cross[w][w']`.
pub fn min_expected_cross_entropy(pw: &FiniteDist, cross: &[Vec<f64>]) -> Result<TransportPlan> {
    solve_transport(cross, pw, pw, Sense::Min)
}

/// One step `i` (0-based) of a sequential coupling construction: for every
/// `w` and history `(x^{i}, y^{i})`, a coupling of the prescribed
/// next-symbol conditionals `P_{X_i|X^{i}W}` and `P_{Y_i|Y^{i}W}`.
///
/// Indexing: `px[w·|X|^i + x^i]`, `py[w·|Y|^i + y^i]`,
/// `q[(w·|X|^i + x^i)·|Y|^i + y^i]`, histories lexicographic.
#[derive(Clone, Debug)]
pub struct CouplingStep {
    pub x_card: usize,
    pub y_card: usize,
    pub w_card: usize,
    pub index: usize,
    pub px: Vec<FiniteDist>,
    pub py: Vec<FiniteDist>,
    pub q: Vec<JointDist>,
}

impl CouplingStep {
    fn x_hist(&self) -> usize {
        self.x_card.pow(self.index as u32)
    }

    fn y_hist(&self) -> usize {
        self.y_card.pow(self.index as u32)
    }

    fn validate(&self) -> Result<()> {
        let (xh, yh) = (self.x_hist(), self.y_hist());
        if self.px.len() != self.w_card * xh
            || self.py.len() != self.w_card * yh
            || self.q.len() != self.w_card * xh * yh
        {
            return Err(shape_err(
                format!("step {} tables for |W|={}", self.index, self.w_card),
                format!("{} / {} / {}", self.px.len(), self.py.len(), self.q.len()),
            ));
        }
        for w in 0..self.w_card {
            for xhist in 0..xh {
                for yhist in 0..yh {
                    let q = &self.q[(w * xh + xhist) * yh + yhist];
                    if q.rows() != self.x_card || q.cols() != self.y_card {
                        return Err(shape_err(
                            format!("{}x{}", self.x_card, self.y_card),
                            format!("{}x{}", q.rows(), q.cols()),
                        ));
                    }
                    let want_x = &self.px[w * xh + xhist];
                    let want_y = &self.py[w * yh + yhist];
                    let dx = crate::dist::tv_of(q.marginal_x().as_slice(), want_x.as_slice());
                    let dy = crate::dist::tv_of(q.marginal_y().as_slice(), want_y.as_slice());
                    if dx > 1e-12 || dy > 1e-12 {
                        return Err(Error::MarginalMismatch(format!(
                            "step {} coupling at w={w}, histories ({xhist},{yhist}) has marginal error {:.3e}",
                            self.index,
                            dx.max(dy)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Multiplies per-step conditional couplings into `Q_{X^n Y^n | W}`.
/// Output rows are indexed by `w`; a row is a pmf over `(x^n, y^n)` at index
/// `x^n · |Y|^n + y^n`.
pub fn compose_conditional_couplings(steps: &[CouplingStep]) -> Result<crate::dist::Channel> {
    let first = steps
        .first()
        .ok_or_else(|| Error::Domain("no coupling steps".into()))?;
    let (nx, ny, nw) = (first.x_card, first.y_card, first.w_card);
    for (i, s) in steps.iter().enumerate() {
        if s.index != i || s.x_card != nx || s.y_card != ny || s.w_card != nw {
            return Err(shape_err(
                format!("step {i} over ({nx},{ny},{nw})"),
                format!("step {} over ({},{},{})", s.index, s.x_card, s.y_card, s.w_card),
            ));
        }
        s.validate()?;
    }
    let mut rows = Vec::with_capacity(nw);
    for w in 0..nw {
        // joint over (x^i, y^i), index x^i · |Y|^i + y^i
        let mut cur = vec![1.0];
        let (mut xh, mut yh) = (1usize, 1usize);
        for s in steps {
            let (nxh, nyh) = (xh * nx, yh * ny);
            let mut next = vec![0.0; nxh * nyh];
            for xhist in 0..xh {
                for yhist in 0..yh {
                    let mass = cur[xhist * yh + yhist];
                    if mass == 0.0 {
                        continue;
                    }
                    let q = &s.q[(w * xh + xhist) * yh + yhist];
                    for x in 0..nx {
                        for y in 0..ny {
                            let v = q.get(x, y);
                            if v != 0.0 {
                                next[(xhist * nx + x) * nyh + yhist * ny + y] += mass * v;
                            }
                        }
                    }
                }
            }
            cur = next;
            xh = nxh;
            yh = nyh;
        }
        rows.push(FiniteDist::new(cur)?);
    }
    crate::dist::Channel::new(rows)
}

/// The prescribed `(P_{X^n|W}, P_{Y^n|W})` implied by the steps' conditionals.
pub fn prescribed_block_marginals(
    steps: &[CouplingStep],
) -> Result<(crate::dist::Channel, crate::dist::Channel)> {
    let first = steps
        .first()
        .ok_or_else(|| Error::Domain("no coupling steps".into()))?;
    let nw = first.w_card;
    let build = |card: usize, pick: &dyn Fn(&CouplingStep, usize) -> &FiniteDist| {
        let mut rows = Vec::with_capacity(nw);
        for w in 0..nw {
            let mut cur = vec![1.0];
            let mut hist = 1usize;
            for s in steps {
                let mut next = vec![0.0; hist * card];
                for h in 0..hist {
                    let cond = pick(s, w * hist + h);
                    for a in 0..card {
                        next[h * card + a] = cur[h] * cond.get(a);
                    }
                }
                cur = next;
                hist *= card;
            }
            rows.push(FiniteDist::new(cur)?);
        }
        crate::dist::Channel::new(rows)
    };
    let px = build(first.x_card, &|s, k| &s.px[k])?;
    let py = build(first.y_card, &|s, k| &s.py[k])?;
    Ok((px, py))
}

/// `X^n`- and `Y^n`-marginals of a composed conditional coupling.
pub fn block_marginals(
    coupling: &crate::dist::Channel,
    x_words: usize,
    y_words: usize,
) -> Result<(crate::dist::Channel, crate::dist::Channel)> {
    if coupling.outputs() != x_words * y_words {
        return Err(shape_err(x_words * y_words, coupling.outputs()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for row in coupling.rows() {
        let j = JointDist::new(x_words, y_words, row.as_slice().to_vec())?;
        xs.push(j.marginal_x());
        ys.push(j.marginal_y());
    }
    Ok((crate::dist::Channel::new(xs)?, crate::dist::Channel::new(ys)?))
}
