//! `G_∞(π) = min_{Q_X,Q_Y} D_∞(Q_X Q_Y ‖ π)`.
//!
//! With `a = log Q_X + t`, `b = log Q_Y − t` on a rectangle `S×T ⊆ supp π`,
//! `G_∞ = −log max (Σ_S e^a)(Σ_T e^b)` subject to `a(x) + b(y) ≤ log π(x,y)`.
//! The objective is convex and the feasible set is pointed once `a(x₀) = 0`,
//! so the maximum sits at a vertex: a spanning tree of tight cells. Small
//! supports are solved by enumerating those trees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BoundKind, BoundReport, Witness};
use crate::dist::{max_ratio, outer, Channel, Decomposition, FiniteDist, JointDist, SUPPORT_EPS};
use crate::error::Result;

const EXACT_MAX_SIDE: usize = 4;
const TIGHT_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub(crate) struct ProductFit {
    pub qx: Vec<f64>,
    pub qy: Vec<f64>,
    /// `D_∞(Q_X Q_Y ‖ π)`
    pub value: f64,
    pub exact: bool,
}

fn log_table(pi: &JointDist) -> Vec<Vec<f64>> {
    (0..pi.rows())
        .map(|x| {
            (0..pi.cols())
                .map(|y| {
                    let v = pi.get(x, y);
                    if v > SUPPORT_EPS {
                        v.ln()
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect()
        })
        .collect()
}

fn bits(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// Calls `f` on every `k`-subset of `0..n`, as sorted index lists.
fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Best vertex over all spanning trees of all support rectangles.
fn exact_fit(pi: &JointDist, rows: &[usize], cols: &[usize]) -> ProductFit {
    let c = log_table(pi);
    let (nr, nc) = (rows.len(), cols.len());
    let mut best = (0.0f64, Vec::new(), Vec::new());
    for smask in 1..(1usize << nr) {
        let s: Vec<usize> = bits(smask, nr).iter().map(|&i| rows[i]).collect();
        for tmask in 1..(1usize << nc) {
            let t: Vec<usize> = bits(tmask, nc).iter().map(|&j| cols[j]).collect();
            if s.iter().any(|&x| t.iter().any(|&y| c[x][y] == f64::NEG_INFINITY)) {
                continue;
            }
            let edges: Vec<(usize, usize)> = (0..s.len())
                .flat_map(|i| (0..t.len()).map(move |j| (i, j)))
                .collect();
            let nodes = s.len() + t.len();
            for_each_subset(edges.len(), nodes - 1, &mut |pick| {
                let mut parent: Vec<usize> = (0..nodes).collect();
                for &e in pick {
                    let (i, j) = edges[e];
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, s.len() + j));
                    if ri == rj {
                        return;
                    }
                    parent[ri] = rj;
                }
                // tight on the tree: a_i + b_j = c, gauge a_0 = 0
                let mut a = vec![f64::NAN; s.len()];
                let mut b = vec![f64::NAN; t.len()];
                a[0] = 0.0;
                let mut changed = true;
                while changed {
                    changed = false;
                    for &e in pick {
                        let (i, j) = edges[e];
                        let cij = c[s[i]][t[j]];
                        if !a[i].is_nan() && b[j].is_nan() {
                            b[j] = cij - a[i];
                            changed = true;
                        } else if a[i].is_nan() && !b[j].is_nan() {
                            a[i] = cij - b[j];
                            changed = true;
                        }
                    }
                }
                for i in 0..s.len() {
                    for j in 0..t.len() {
                        if a[i] + b[j] > c[s[i]][t[j]] + TIGHT_TOL {
                            return;
                        }
                    }
                }
                let sa: f64 = a.iter().map(|v| v.exp()).sum();
                let sb: f64 = b.iter().map(|v| v.exp()).sum();
                if sa * sb > best.0 {
                    let mut qx = vec![0.0; pi.rows()];
                    let mut qy = vec![0.0; pi.cols()];
                    for (i, &x) in s.iter().enumerate() {
                        qx[x] = a[i].exp() / sa;
                    }
                    for (j, &y) in t.iter().enumerate() {
                        qy[y] = b[j].exp() / sb;
                    }
                    best = (sa * sb, qx, qy);
                }
            });
        }
    }
    let (_, qx, qy) = best;
    let value = max_ratio(&outer(&qx, &qy), pi.as_slice()).ln();
    ProductFit {
        qx,
        qy,
        value,
        exact: true,
    }
}

/// For fixed `b` on `T`, the best `a(x) = min_T (log π − b)` on compatible rows.
fn score(c: &[Vec<f64>], t: &[usize], b: &[f64]) -> (f64, Vec<f64>) {
    let mut a = vec![f64::NEG_INFINITY; c.len()];
    for (x, row) in c.iter().enumerate() {
        let mut m = f64::INFINITY;
        for (k, &y) in t.iter().enumerate() {
            m = m.min(row[y] - b[k]);
        }
        a[x] = m;
    }
    let sa: f64 = a.iter().filter(|v| v.is_finite()).map(|v| v.exp()).sum();
    let sb: f64 = b.iter().map(|v| v.exp()).sum();
    (sa * sb, a)
}

/// Coordinate search over `b` for column sets drawn from the support.
fn heuristic_fit(pi: &JointDist, seed: u64) -> ProductFit {
    let c = log_table(pi);
    let cols: Vec<usize> = (0..pi.cols()).filter(|&y| pi.marginal_y().get(y) > SUPPORT_EPS).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<Vec<usize>> = cols.iter().map(|&y| vec![y]).collect();
    candidates.push(cols.clone());
    for _ in 0..32 {
        let t: Vec<usize> = cols.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        if !t.is_empty() {
            candidates.push(t);
        }
    }
    let mut best = (0.0f64, Vec::new(), Vec::new(), Vec::new());
    for t in candidates {
        let mut b: Vec<f64> = t.iter().map(|&y| pi.marginal_y().get(y).ln()).collect();
        let (mut cur, _) = score(&c, &t, &b);
        let mut step = 1.0;
        while step > 1e-10 {
            let mut improved = false;
            for k in 0..b.len() {
                for dir in [step, -step] {
                    b[k] += dir;
                    let (v, _) = score(&c, &t, &b);
                    if v > cur * (1.0 + 1e-15) {
                        cur = v;
                        improved = true;
                    } else {
                        b[k] -= dir;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if cur > best.0 {
            let (_, a) = score(&c, &t, &b);
            best = (cur, a, b, t);
        }
    }
    let (_, a, b, t) = best;
    let sa: f64 = a.iter().filter(|v| v.is_finite()).map(|v| v.exp()).sum();
    let sb: f64 = b.iter().map(|v| v.exp()).sum();
    let qx: Vec<f64> = a
        .iter()
        .map(|v| if v.is_finite() { v.exp() / sa } else { 0.0 })
        .collect();
    let mut qy = vec![0.0; pi.cols()];
    for (k, &y) in t.iter().enumerate() {
        qy[y] = b[k].exp() / sb;
    }
    let value = max_ratio(&outer(&qx, &qy), pi.as_slice()).ln();
    ProductFit {
        qx,
        qy,
        value,
        exact: false,
    }
}

pub(crate) fn best_product_fit(pi: &JointDist) -> ProductFit {
    let rows: Vec<usize> = (0..pi.rows()).filter(|&x| pi.marginal_x().get(x) > SUPPORT_EPS).collect();
    let cols: Vec<usize> = (0..pi.cols()).filter(|&y| pi.marginal_y().get(y) > SUPPORT_EPS).collect();
    if rows.len() <= EXACT_MAX_SIDE && cols.len() <= EXACT_MAX_SIDE {
        exact_fit(pi, &rows, &cols)
    } else {
        heuristic_fit(pi, 0)
    }
}

/// `π = e^{−ε} Q_X⊗Q_Y + Σ_cells r(x,y) δ_x⊗δ_y` with `r ≥ 0`.
pub(crate) fn mixture_decomposition(pi: &JointDist, fit: &ProductFit) -> Result<Decomposition> {
    let w0 = (-fit.value).exp();
    let mut weights = vec![w0];
    let mut px = vec![fit.qx.clone()];
    let mut py = vec![fit.qy.clone()];
    for (x, y) in pi.support() {
        let r = pi.get(x, y) - w0 * fit.qx[x] * fit.qy[y];
        if r > 1e-15 {
            weights.push(r);
            let mut p = vec![0.0; pi.rows()];
            let mut q = vec![0.0; pi.cols()];
            p[x] = 1.0;
            q[y] = 1.0;
            px.push(p);
            py.push(q);
        }
    }
    Decomposition::new(
        FiniteDist::normalize(&weights)?,
        Channel::from_rows(&px)?,
        Channel::from_rows(&py)?,
    )
}

/// `G_∞(π)`, certified exact when the pruned support fits in 4×4.
pub fn g_infinity(pi: &JointDist) -> Result<BoundReport> {
    let fit = best_product_fit(pi);
    Ok(BoundReport {
        value: fit.value,
        kind: if fit.exact {
            BoundKind::CertifiedExact
        } else {
            BoundKind::HeuristicUpper
        },
        witness: Some(Witness::ProductPair(
            FiniteDist::normalize(&fit.qx)?,
            FiniteDist::normalize(&fit.qy)?,
        )),
        starts_used: 1,
        converged: true,
        caveat: None,
        n: 1,
    })
}
