//! Independent reference implementations used to cross-check the library.
//! None of them call into the optimizers they check.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the simplex (normalized exponentials).
pub fn random_pmf(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

/// Optimal transport value by enumerating every basic solution: sets of
/// `m + n − 1` cells whose row/column equations have a unique solution.
pub fn transport_by_vertices(cost: &[Vec<f64>], p: &[f64], q: &[f64], maximize: bool) -> f64 {
    let (m, n) = (p.len(), q.len());
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let b = m + n - 1;
    let rhs: Vec<f64> = p.iter().chain(q).copied().collect();
    let mut best = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
    for subset in combinations(cells.len(), b) {
        let chosen: Vec<(usize, usize)> = subset.iter().map(|&k| cells[k]).collect();
        // equations: one per row and column, unknowns are the chosen cells
        let mut a = vec![vec![0.0; b + 1]; m + n];
        for (u, &(i, j)) in chosen.iter().enumerate() {
            a[i][u] = 1.0;
            a[m + j][u] = 1.0;
        }
        for (r, row) in a.iter_mut().enumerate() {
            row[b] = rhs[r];
        }
        let Some(x) = solve_unique(a, b) else { continue };
        if x.iter().any(|&v| v < -1e-12) {
            continue;
        }
        let value: f64 = chosen.iter().zip(&x).map(|(&(i, j), &v)| cost[i][j] * v.max(0.0)).sum();
        best = if maximize { best.max(value) } else { best.min(value) };
    }
    best
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Gauss–Jordan on an overdetermined augmented system; `None` unless the
/// unknowns are determined uniquely and every equation is satisfied.
fn solve_unique(mut a: Vec<Vec<f64>>, unknowns: usize) -> Option<Vec<f64>> {
    let rows = a.len();
    let mut r = 0;
    for c in 0..unknowns {
        let piv = (r..rows).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-12 {
            return None;
        }
        a.swap(r, piv);
        let d = a[r][c];
        for v in a[r].iter_mut() {
            *v /= d;
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0.0 {
                let f = a[i][c];
                for col in 0..=unknowns {
                    a[i][col] -= f * a[r][col];
                }
            }
        }
        r += 1;
    }
    if a[r..].iter().any(|row| row[unknowns].abs() > 1e-9) {
        return None;
    }
    Some((0..unknowns).map(|c| a[c][unknowns]).collect())
}

/// `min_{Q_X,Q_Y} log max Q_X Q_Y / π` over binary marginals, by a grid
/// refined around the incumbent.
pub fn g_infinity_grid_2x2(pi: [[f64; 2]; 2]) -> f64 {
    let eval = |s: f64, t: f64| {
        let qx = [s, 1.0 - s];
        let qy = [t, 1.0 - t];
        let mut worst = f64::NEG_INFINITY;
        for x in 0..2 {
            for y in 0..2 {
                let m = qx[x] * qy[y];
                if m > 0.0 {
                    let r = if pi[x][y] > 0.0 { (m / pi[x][y]).ln() } else { f64::INFINITY };
                    worst = worst.max(r);
                }
            }
        }
        worst
    };
    let (mut cs, mut ct, mut half) = (0.5, 0.5, 0.5);
    let mut best = f64::INFINITY;
    for _ in 0..12 {
        let steps = 40;
        let (mut bs, mut bt) = (cs, ct);
        for i in 0..=steps {
            for j in 0..=steps {
                let s = (cs - half + 2.0 * half * i as f64 / steps as f64).clamp(0.0, 1.0);
                let t = (ct - half + 2.0 * half * j as f64 / steps as f64).clamp(0.0, 1.0);
                let v = eval(s, t);
                if v < best {
                    best = v;
                    bs = s;
                    bt = t;
                }
            }
        }
        cs = bs;
        ct = bt;
        half *= 0.25;
    }
    best
}

/// `H₂(a)` in nats, written with `log₂` and rescaled.
fn binary_entropy_nats(a: f64) -> f64 {
    let bits = -a * a.log2() - (1.0 - a) * (1.0 - a).log2();
    bits * std::f64::consts::LN_2
}

/// The exact common information of the DSBS with crossover `p`, from `p` alone.
pub fn dsbs_exact_reference(p: f64) -> f64 {
    let a = (1.0 - (1.0 - 2.0 * p).sqrt()) / 2.0;
    let alpha0 = (1.0 - p) / 2.0;
    let beta0 = p / 2.0;
    -2.0 * binary_entropy_nats(a) - (1.0 - 2.0 * a) * alpha0.ln() - 2.0 * a * beta0.ln()
}

/// Wyner's common information of the DSBS as `I(XY;W)` of the binary
/// symmetric witness, by enumerating the eight cells of `P_{WXY}`.
pub fn dsbs_wyner_reference(p: f64) -> f64 {
    let a = (1.0 - (1.0 - 2.0 * p).sqrt()) / 2.0;
    let flip = |u: usize, v: usize| if u == v { 1.0 - a } else { a };
    let pxy = |x: usize, y: usize| (0..2).map(|w| 0.5 * flip(w, x) * flip(w, y)).sum::<f64>();
    let mut i = 0.0;
    for w in 0..2 {
        for x in 0..2 {
            for y in 0..2 {
                let joint = 0.5 * flip(w, x) * flip(w, y);
                if joint > 0.0 {
                    i += joint * (joint / (0.5 * pxy(x, y))).ln();
                }
            }
        }
    }
    i
}
