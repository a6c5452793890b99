//! Column generation over product components `p ⊗ q`.
//!
//! The master LP is `min Σ_j λ_j g(p_j, q_j)` subject to `Σ_j λ_j p_j ⊗ q_j = π`
//! on `supp π` and `λ ≥ 0`. Every column lives on a rectangle inside
//! `supp π`, so feasibility is exact and a basic solution uses at most
//! `|supp π|` components. Columns are priced by multi-start alternating
//! minimization of the reduced cost `g(p, q) − pᵀ N q`, where `N` holds the
//! LP duals.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use super::{
    objective_lb, objective_ub, objective_wyner, synthesis_error, BoundKind,
    BoundReport, Options, Witness, FEASIBILITY_TOL,
};
use crate::dist::{entropy_of, product_lift, Channel, Decomposition, FiniteDist, JointDist};
use crate::error::{Error, Result};
use crate::lp::solve_lp;
use crate::transport::CrossEntropyCost;

const PRICE_TOL: f64 = 1e-9;
const INNER_TOL: f64 = 1e-13;
const INNER_ITERS: usize = 2000;
const SAME_COLUMN: f64 = 1e-9;
const LB_POOL: usize = 40;

/// `supp π` as a cell list plus a membership mask.
pub(crate) struct Support {
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<(usize, usize)>,
    pub mask: Vec<bool>,
    pub target: Vec<f64>,
}

impl Support {
    pub fn new(pi: &JointDist) -> Self {
        let cells = pi.support();
        let mut mask = vec![false; pi.rows() * pi.cols()];
        for &(x, y) in &cells {
            mask[x * pi.cols() + y] = true;
        }
        let target = cells.iter().map(|&(x, y)| pi.get(x, y)).collect();
        Self {
            rows: pi.rows(),
            cols: pi.cols(),
            cells,
            mask,
            target,
        }
    }

    fn ok(&self, x: usize, y: usize) -> bool {
        self.mask[x * self.cols + y]
    }

    /// Rows compatible with every column carrying mass in `q`.
    fn rows_for(&self, q: &[f64]) -> Vec<bool> {
        (0..self.rows)
            .map(|x| (0..self.cols).all(|y| q[y] == 0.0 || self.ok(x, y)))
            .collect()
    }

    fn cols_for(&self, p: &[f64]) -> Vec<bool> {
        (0..self.cols)
            .map(|y| (0..self.rows).all(|x| p[x] == 0.0 || self.ok(x, y)))
            .collect()
    }

    pub fn entries(&self, p: &[f64], q: &[f64]) -> Vec<f64> {
        self.cells.iter().map(|&(x, y)| p[x] * q[y]).collect()
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Column {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub cost: f64,
}

impl Column {
    fn close_to(&self, other: &Column) -> bool {
        self.p
            .iter()
            .zip(&other.p)
            .chain(self.q.iter().zip(&other.q))
            .all(|(a, b)| (a - b).abs() < SAME_COLUMN)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Start {
    rows: Vec<bool>,
    cols: Vec<bool>,
    grow: bool,
    p0: Vec<f64>,
    q0: Vec<f64>,
}

/// Component cost `g(p, q)` and its pricing routine.
pub(crate) trait Pricing: Sync {
    fn cost(&self, p: &[f64], q: &[f64]) -> Result<f64>;

    /// Locally minimizes `g(p, q) − pᵀNq` from `start`; returns the column
    /// and its reduced cost.
    fn price(&self, sup: &Support, duals: &[f64], start: &Start) -> Result<(Column, f64)>;
}

fn gibbs(scores: &[f64], allowed: &[bool]) -> Vec<f64> {
    let m = scores
        .iter()
        .zip(allowed)
        .filter(|(_, &a)| a)
        .map(|(s, _)| *s)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = scores
        .iter()
        .zip(allowed)
        .map(|(s, &a)| if a { (s - m).exp() } else { 0.0 })
        .collect();
    let z: f64 = out.iter().sum();
    for v in &mut out {
        *v /= z;
    }
    out
}

fn n_times_q(sup: &Support, duals: &[f64], q: &[f64]) -> Vec<f64> {
    (0..sup.rows)
        .map(|x| (0..sup.cols).map(|y| duals[x * sup.cols + y] * q[y]).sum())
        .collect()
}

fn nt_times_p(sup: &Support, duals: &[f64], p: &[f64]) -> Vec<f64> {
    (0..sup.cols)
        .map(|y| (0..sup.rows).map(|x| duals[x * sup.cols + y] * p[x]).sum())
        .collect()
}

fn bilinear(sup: &Support, duals: &[f64], p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(n_times_q(sup, duals, q)).map(|(a, b)| a * b).sum()
}

/// `g = H(π) − H(p) − H(q)`: Wyner's `I(XY;W)` per component.
pub(crate) struct WynerPricing {
    h_pi: f64,
}

impl WynerPricing {
    pub fn new(pi: &JointDist) -> Self {
        Self {
            h_pi: entropy_of(pi.as_slice()),
        }
    }
}

impl Pricing for WynerPricing {
    fn cost(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        Ok(self.h_pi - entropy_of(p) - entropy_of(q))
    }

    fn price(&self, sup: &Support, duals: &[f64], start: &Start) -> Result<(Column, f64)> {
        // Ascent on F = H(p) + H(q) + pᵀNq; each half-step is an exact Gibbs maximizer.
        let mut q = start.q0.clone();
        let mut p = start.p0.clone();
        let mut prev = f64::NEG_INFINITY;
        for _ in 0..INNER_ITERS {
            let rows = if start.grow { sup.rows_for(&q) } else { start.rows.clone() };
            p = gibbs(&n_times_q(sup, duals, &q), &rows);
            let cols = if start.grow { sup.cols_for(&p) } else { start.cols.clone() };
            q = gibbs(&nt_times_p(sup, duals, &p), &cols);
            let f = entropy_of(&p) + entropy_of(&q) + bilinear(sup, duals, &p, &q);
            if f - prev < INNER_TOL * (1.0 + f.abs()) {
                break;
            }
            prev = f;
        }
        let cost = self.cost(&p, &q)?;
        let rc = cost - bilinear(sup, duals, &p, &q);
        Ok((Column { p, q, cost }, rc))
    }
}

/// `g = −H(p) − H(q) + 𝓗(p, q ‖ π)`: the upper-bound objective per component.
pub(crate) struct UbPricing {
    cross: CrossEntropyCost,
}

impl Pricing for UbPricing {
    fn cost(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        Ok(self.cross.value(p, q)? - entropy_of(p) - entropy_of(q))
    }

    fn price(&self, sup: &Support, duals: &[f64], start: &Start) -> Result<(Column, f64)> {
        // Descent on J = −H(p) − H(q) + φᵀp + ψᵀq − pᵀNq over (p, q, φ, ψ):
        // Gibbs steps in p and q, transport duals for (φ, ψ).
        let mut p = start.p0.clone();
        let mut q = start.q0.clone();
        let mut s = self.cross.solve(&p, &q)?;
        let objective = |p: &[f64], q: &[f64], h: f64| {
            h - entropy_of(p) - entropy_of(q) - bilinear(sup, duals, p, q)
        };
        let mut prev = objective(&p, &q, s.plan.value);
        for _ in 0..INNER_ITERS {
            let rows = if start.grow { sup.rows_for(&q) } else { start.rows.clone() };
            let score: Vec<f64> = n_times_q(sup, duals, &q)
                .iter()
                .zip(&s.row_pot)
                .map(|(a, phi)| a - phi)
                .collect();
            p = gibbs(&score, &rows);
            s = self.cross.solve(&p, &q)?;
            let cols = if start.grow { sup.cols_for(&p) } else { start.cols.clone() };
            let score: Vec<f64> = nt_times_p(sup, duals, &p)
                .iter()
                .zip(&s.col_pot)
                .map(|(a, psi)| a - psi)
                .collect();
            q = gibbs(&score, &cols);
            s = self.cross.solve(&p, &q)?;
            let j = objective(&p, &q, s.plan.value);
            if prev - j < INNER_TOL * (1.0 + j.abs()) {
                break;
            }
            prev = j;
        }
        let cost = s.plan.value - entropy_of(&p) - entropy_of(&q);
        let rc = cost - bilinear(sup, duals, &p, &q);
        Ok((Column { p, q, cost }, rc))
    }
}

fn dirichlet_on(mask: &[bool], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v: Vec<f64> = mask
        .iter()
        .map(|&m| if m { rng.sample::<f64, _>(Exp1) + 1e-300 } else { 0.0 })
        .collect();
    let z: f64 = v.iter().sum();
    for x in &mut v {
        *x /= z;
    }
    v
}

/// A random rectangle inside `supp π` grown from a random seed cell.
fn random_start(sup: &Support, rng: &mut ChaCha8Rng, grow: bool) -> Start {
    let (x0, y0) = sup.cells[rng.random_range(0..sup.cells.len())];
    let mut rows = vec![false; sup.rows];
    let mut cols = vec![false; sup.cols];
    rows[x0] = true;
    cols[y0] = true;
    let mut order: Vec<(bool, usize)> = (0..sup.rows)
        .map(|x| (true, x))
        .chain((0..sup.cols).map(|y| (false, y)))
        .collect();
    order.shuffle(rng);
    for (is_row, i) in order {
        if !rng.random_bool(0.5) {
            continue;
        }
        if is_row {
            if (0..sup.cols).all(|y| !cols[y] || sup.ok(i, y)) {
                rows[i] = true;
            }
        } else if (0..sup.rows).all(|x| !rows[x] || sup.ok(x, i)) {
            cols[i] = true;
        }
    }
    let p0 = dirichlet_on(&rows, rng);
    let q0 = dirichlet_on(&cols, rng);
    Start {
        rows,
        cols,
        grow,
        p0,
        q0,
    }
}

fn warm_start(col: &Column) -> Start {
    Start {
        rows: col.p.iter().map(|&v| v > 0.0).collect(),
        cols: col.q.iter().map(|&v| v > 0.0).collect(),
        grow: true,
        p0: col.p.clone(),
        q0: col.q.clone(),
    }
}

fn start_rng(seed: u64, round: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((round as u64) << 32) | index as u64);
    rng
}

pub(crate) struct ColgenResult {
    pub pool: Vec<Column>,
    pub weights: Vec<f64>,
    pub duals: Vec<f64>,
    pub converged: bool,
    pub starts_used: usize,
}

fn point_column(sup: &Support, x: usize, y: usize, pricing: &dyn Pricing) -> Result<Column> {
    let mut p = vec![0.0; sup.rows];
    let mut q = vec![0.0; sup.cols];
    p[x] = 1.0;
    q[y] = 1.0;
    let cost = pricing.cost(&p, &q)?;
    Ok(Column { p, q, cost })
}

fn solve_master(sup: &Support, pool: &[Column]) -> Result<(Vec<f64>, Vec<f64>)> {
    let columns: Vec<Vec<f64>> = pool.iter().map(|c| sup.entries(&c.p, &c.q)).collect();
    let costs: Vec<f64> = pool.iter().map(|c| c.cost).collect();
    let sol = solve_lp(&costs, &columns, &sup.target)?;
    let mut duals = vec![0.0; sup.rows * sup.cols];
    for (k, &(x, y)) in sup.cells.iter().enumerate() {
        duals[x * sup.cols + y] = sol.duals[k];
    }
    Ok((sol.x, duals))
}

pub(crate) fn column_generation(
    pi: &JointDist,
    pricing: &dyn Pricing,
    seeds: &[(Vec<f64>, Vec<f64>)],
    opts: &Options,
) -> Result<ColgenResult> {
    let sup = Support::new(pi);
    let mut pool = Vec::new();
    for &(x, y) in &sup.cells {
        pool.push(point_column(&sup, x, y, pricing)?);
    }
    let (mx, my) = (pi.marginal_x(), pi.marginal_y());
    let mut initial = vec![(mx.as_slice().to_vec(), my.as_slice().to_vec())];
    initial.extend_from_slice(seeds);
    for (p, q) in initial {
        let rect_ok = sup.cells.len() == sup.rows * sup.cols
            || (0..sup.rows).all(|x| {
                (0..sup.cols).all(|y| p[x] <= 0.0 || q[y] <= 0.0 || sup.ok(x, y))
            });
        if rect_ok {
            let cost = pricing.cost(&p, &q)?;
            pool.push(Column { p, q, cost });
        }
    }

    let starts = opts.starts.max(1);
    let max_new = (starts / 8).max(4);
    let mut converged = false;
    let mut starts_used = 0;
    let (mut weights, mut duals) = solve_master(&sup, &pool)?;
    for round in 0..opts.max_rounds {
        let active: Vec<&Column> = pool
            .iter()
            .zip(&weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(c, _)| c)
            .collect();
        let warm = active.len().min(starts / 4);
        let plans: Vec<Start> = (0..starts)
            .map(|i| {
                if i < warm {
                    warm_start(active[i])
                } else {
                    let mut rng = start_rng(opts.seed, round, i);
                    random_start(&sup, &mut rng, i % 2 == 0)
                }
            })
            .collect();
        starts_used += plans.len();
        let priced = opts.exec.map(&plans, |s| pricing.price(&sup, &duals, s));
        let mut found: Vec<(Column, f64)> = Vec::new();
        for r in priced {
            let (col, rc) = r?;
            if rc < -PRICE_TOL {
                found.push((col, rc));
            }
        }
        if found.is_empty() {
            converged = true;
            break;
        }
        // most negative first; ties keep start order
        found.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut added = 0;
        for (col, _) in found {
            if added == max_new {
                break;
            }
            if pool.iter().any(|c| c.close_to(&col)) {
                continue;
            }
            pool.push(col);
            added += 1;
        }
        if added == 0 {
            break;
        }
        (weights, duals) = solve_master(&sup, &pool)?;
    }
    Ok(ColgenResult {
        pool,
        weights,
        duals,
        converged,
        starts_used,
    })
}

pub(crate) fn decomposition_from(pool: &[Column], weights: &[f64]) -> Result<Decomposition> {
    let keep: Vec<usize> = (0..pool.len()).filter(|&j| weights[j] > 0.0).collect();
    if keep.is_empty() {
        return Err(Error::Solver("empty decomposition".into()));
    }
    let pw = FiniteDist::normalize(&keep.iter().map(|&j| weights[j]).collect::<Vec<_>>())?;
    let px = Channel::from_rows(&keep.iter().map(|&j| pool[j].p.clone()).collect::<Vec<_>>())?;
    let py = Channel::from_rows(&keep.iter().map(|&j| pool[j].q.clone()).collect::<Vec<_>>())?;
    Decomposition::new(pw, px, py)
}

fn report(
    pi: &JointDist,
    d: Decomposition,
    value: f64,
    run: &ColgenResult,
    opts: &Options,
    caveat: Option<String>,
) -> BoundReport {
    let mut notes: Vec<String> = caveat.into_iter().collect();
    let err = synthesis_error(pi, &d);
    let feasible = err <= FEASIBILITY_TOL;
    if !feasible {
        notes.push(format!("witness synthesis error {err:.3e} exceeds tolerance"));
    }
    let cap = opts.cap(pi);
    if d.w_card() > cap {
        notes.push(format!("witness uses |W| = {} > cap {cap}", d.w_card()));
    }
    if !run.converged {
        notes.push("column generation stopped with negative reduced costs remaining".into());
    }
    BoundReport {
        value,
        kind: BoundKind::HeuristicUpper,
        witness: Some(Witness::Decomposition(d)),
        starts_used: run.starts_used,
        converged: run.converged && feasible,
        caveat: if notes.is_empty() { None } else { Some(notes.join("; ")) },
        n: 1,
    }
}

/// Wyner's common information `min I(XY;W)` over decompositions of `π`.
pub fn wyner_ci(pi: &JointDist, opts: &Options) -> Result<BoundReport> {
    let pricing = WynerPricing::new(pi);
    let run = column_generation(pi, &pricing, &[], opts)?;
    let d = decomposition_from(&run.pool, &run.weights)?;
    let value = objective_wyner(&d);
    Ok(report(pi, d, value, &run, opts, None))
}

fn ub_run(pi: &JointDist, seeds: &[(Vec<f64>, Vec<f64>)], opts: &Options) -> Result<ColgenResult> {
    let pricing = UbPricing {
        cross: CrossEntropyCost::new(pi),
    };
    column_generation(pi, &pricing, seeds, opts)
}

fn ub_report(pi: &JointDist, run: &ColgenResult, opts: &Options) -> Result<BoundReport> {
    let d = decomposition_from(&run.pool, &run.weights)?;
    let value = objective_ub(pi, &d)?;
    Ok(report(pi, d, value, run, opts, None))
}

/// The single-letter upper bound `Γ^UB(π)` on the exact common information.
pub fn gamma_ub(pi: &JointDist, opts: &Options) -> Result<BoundReport> {
    let run = ub_run(pi, &[], opts)?;
    ub_report(pi, &run, opts)
}

/// The single-letter lower bound `Γ^LB(π)`. The outer infimum is searched
/// jointly with the coupling `Q_{WW'}` as one LP over the components found by
/// the `Γ^UB` search, so the value never exceeds `Γ^UB` on that pool; it is
/// an upper estimate of the true `Γ^LB`.
pub fn gamma_lb(pi: &JointDist, opts: &Options) -> Result<BoundReport> {
    let run = ub_run(pi, &[], opts)?;
    let sup = Support::new(pi);
    let cross = CrossEntropyCost::new(pi);

    // active columns first, then the most promising by reduced cost
    let mut order: Vec<usize> = (0..run.pool.len()).collect();
    let reduced = |j: usize| {
        let c = &run.pool[j];
        c.cost - bilinear(&sup, &run.duals, &c.p, &c.q)
    };
    order.sort_by(|&a, &b| {
        let ka = (run.weights[a] <= 0.0, reduced(a));
        let kb = (run.weights[b] <= 0.0, reduced(b));
        ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    let active = run.weights.iter().filter(|&&w| w > 0.0).count();
    order.truncate(active.max(LB_POOL.min(run.pool.len())));
    let cols: Vec<&Column> = order.iter().map(|&j| &run.pool[j]).collect();
    let k = cols.len();

    let mut cross_kk = vec![vec![f64::INFINITY; k]; k];
    for (a, ca) in cols.iter().enumerate() {
        for (b, cb) in cols.iter().enumerate() {
            cross_kk[a][b] = cross.value(&ca.p, &cb.q)?;
        }
    }
    // variables: λ_a (k), then Q_ab for finite cross entries
    let ncell = sup.cells.len();
    let rows = ncell + 2 * k;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut costs = Vec::new();
    for (a, c) in cols.iter().enumerate() {
        let mut v = sup.entries(&c.p, &c.q);
        v.resize(rows, 0.0);
        v[ncell + a] = -1.0;
        v[ncell + k + a] = -1.0;
        columns.push(v);
        costs.push(-entropy_of(&c.p) - entropy_of(&c.q));
    }
    let mut q_index = Vec::new();
    for a in 0..k {
        for b in 0..k {
            if cross_kk[a][b].is_finite() {
                let mut v = vec![0.0; rows];
                v[ncell + a] = 1.0;
                v[ncell + k + b] = 1.0;
                columns.push(v);
                costs.push(cross_kk[a][b]);
                q_index.push((a, b));
            }
        }
    }
    let mut rhs = sup.target.clone();
    rhs.resize(rows, 0.0);
    let sol = solve_lp(&costs, &columns, &rhs)?;
    let lambda = &sol.x[..k];
    let pool: Vec<Column> = cols.iter().map(|c| (*c).clone()).collect();
    let d = decomposition_from(&pool, lambda)?;
    let value = objective_lb(pi, &d)?;
    let mut rep = report(
        pi,
        d,
        value,
        &run,
        opts,
        Some("outer infimum is heuristic: value upper-bounds the true lower bound".into()),
    );
    rep.starts_used = run.starts_used;
    Ok(rep)
}

/// `Γ^UB(π^{⊗n})` for `n ∈ {1, 2}` and `|X|, |Y| ≤ 3`. The `n = 2` search is
/// seeded with the tensor square of the `n = 1` witness, so
/// the reported value never exceeds twice the single-letter one.
pub fn multiletter_gamma(pi: &JointDist, n: usize, opts: &Options) -> Result<BoundReport> {
    if !(1..=2).contains(&n) || pi.rows() > 3 || pi.cols() > 3 {
        return Err(Error::Budget(format!(
            "multiletter search supports n <= 2 and alphabets up to 3x3 (got n={n}, {}x{})",
            pi.rows(),
            pi.cols()
        )));
    }
    let single = gamma_ub(pi, opts)?;
    if n == 1 {
        return Ok(single);
    }
    let base = single
        .decomposition()
        .ok_or_else(|| Error::Solver("single-letter search returned no witness".into()))?;
    let lifted = base.product_lift(2, crate::dist::DEFAULT_CELL_BUDGET)?;
    let seeds: Vec<(Vec<f64>, Vec<f64>)> = (0..lifted.w_card())
        .map(|w| {
            (
                lifted.px_given_w().row(w).as_slice().to_vec(),
                lifted.py_given_w().row(w).as_slice().to_vec(),
            )
        })
        .collect();
    let pi2 = product_lift(pi, 2)?;
    let mut opts2 = opts.clone();
    if opts2.wmax.is_none() {
        opts2.wmax = Some(pi2.rows() * pi2.cols());
    }
    // The lifted witness alone is an LP-feasible solution of value 2Γ.
    let run = ub_run(&pi2, &seeds, &opts2)?;
    let mut rep = ub_report(&pi2, &run, &opts2)?;
    let lifted_value = objective_ub(&pi2, &lifted)?;
    if lifted_value < rep.value {
        rep.value = lifted_value;
        rep.witness = Some(Witness::Decomposition(lifted));
    }
    rep.starts_used += single.starts_used;
    rep.n = 2;
    Ok(rep)
}
