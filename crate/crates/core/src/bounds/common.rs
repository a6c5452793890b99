//! Common entropy `G = min H(W)`, common Rényi entropies `G_α = min H_α(W)`
//! and the nonnegative α-rank.
//!
//! All orders share one candidate pool of exact decompositions:
//! nonnegative factorizations of every rank up to `kmax` (HALS, multi-start),
//! the `W = X`, `W = Y` and `W = (X,Y)` decompositions, the `G_∞` mixture
//! witness, and LP vertices reached by successive linearization of
//! `H_α(λ)` over the component weights for `α ∈ {½, 1, 2, ∞}`. Each `G_α` is
//! the minimum of `H_α` over the pool, so the reported values are
//! nonincreasing in `α` by construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use super::colgen::{column_generation, decomposition_from, Column, Support, WynerPricing};
use super::ginf::{best_product_fit, mixture_decomposition};
use super::{synthesis_error, BoundKind, BoundReport, Options, Witness, FEASIBILITY_TOL};
use crate::dist::{renyi_entropy_of, Channel, Decomposition, FiniteDist, JointDist};
use crate::error::{Error, Result};
use crate::lp::solve_lp;

const HALS_ITERS: usize = 3000;
const EXACT_TV: f64 = 1e-9;
const LINEARIZE_ITERS: usize = 50;
const SMOOTH: f64 = 1e-9;
const MAX_INF_LPS: usize = 200;

/// The shared candidate pool for one distribution.
#[derive(Clone, Debug)]
pub struct CommonEntropyProfile {
    candidates: Vec<Decomposition>,
    rank: usize,
    g_inf: f64,
    g_inf_exact: bool,
    starts_used: usize,
}

fn rank_of(pi: &JointDist) -> usize {
    let mut a = pi.to_rows();
    let (m, n) = (pi.rows(), pi.cols());
    let tol = 1e-10 * pi.as_slice().iter().fold(0.0f64, |s, v| s.max(*v));
    let mut rank = 0;
    for c in 0..n {
        let Some(piv) = (rank..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())) else {
            break;
        };
        if a[piv][c].abs() <= tol {
            continue;
        }
        a.swap(rank, piv);
        for i in rank + 1..m {
            let f = a[i][c] / a[rank][c];
            for k in c..n {
                a[i][k] -= f * a[rank][k];
            }
        }
        rank += 1;
        if rank == m {
            break;
        }
    }
    rank
}

/// One HALS run for `π ≈ U Vᵀ` with `k` nonnegative rank-one terms.
fn hals(pi: &JointDist, k: usize, rng: &mut ChaCha8Rng) -> Option<Decomposition> {
    let (m, n) = (pi.rows(), pi.cols());
    let mut u: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..m).map(|_| rng.sample::<f64, _>(Exp1)).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect())
        .collect();
    let scale: f64 = (0..k)
        .map(|r| u[r].iter().sum::<f64>() * v[r].iter().sum::<f64>())
        .sum();
    for r in 0..k {
        for x in &mut u[r] {
            *x /= scale;
        }
    }
    // residual E = π − U Vᵀ
    let mut e: Vec<f64> = pi.as_slice().to_vec();
    for r in 0..k {
        for x in 0..m {
            for y in 0..n {
                e[x * n + y] -= u[r][x] * v[r][y];
            }
        }
    }
    for _ in 0..HALS_ITERS {
        for r in 0..k {
            // R = E + u_r v_rᵀ
            for x in 0..m {
                for y in 0..n {
                    e[x * n + y] += u[r][x] * v[r][y];
                }
            }
            let vv: f64 = v[r].iter().map(|a| a * a).sum();
            if vv > 0.0 {
                for x in 0..m {
                    let s: f64 = (0..n).map(|y| e[x * n + y] * v[r][y]).sum();
                    u[r][x] = (s / vv).max(0.0);
                }
            }
            let uu: f64 = u[r].iter().map(|a| a * a).sum();
            if uu > 0.0 {
                for y in 0..n {
                    let s: f64 = (0..m).map(|x| e[x * n + y] * u[r][x]).sum();
                    v[r][y] = (s / uu).max(0.0);
                }
            }
            for x in 0..m {
                for y in 0..n {
                    e[x * n + y] -= u[r][x] * v[r][y];
                }
            }
        }
        if e.iter().map(|a| a.abs()).sum::<f64>() < 1e-14 {
            break;
        }
    }
    let mut weights = Vec::new();
    let mut px = Vec::new();
    let mut py = Vec::new();
    for r in 0..k {
        let su: f64 = u[r].iter().sum();
        let sv: f64 = v[r].iter().sum();
        if su * sv <= 1e-15 {
            continue;
        }
        weights.push(su * sv);
        px.push(u[r].iter().map(|a| a / su).collect::<Vec<_>>());
        py.push(v[r].iter().map(|a| a / sv).collect::<Vec<_>>());
    }
    let d = Decomposition::new(
        FiniteDist::normalize(&weights).ok()?,
        Channel::from_rows(&px).ok()?,
        Channel::from_rows(&py).ok()?,
    )
    .ok()?;
    (synthesis_error(pi, &d) <= EXACT_TV).then_some(d)
}

fn conditional_on(pi: &JointDist, by_rows: bool) -> Result<Decomposition> {
    let j = if by_rows { pi.clone() } else { pi.transpose() };
    let m = j.marginal_x();
    let keep = m.support();
    let pw = FiniteDist::normalize(&keep.iter().map(|&x| m.get(x)).collect::<Vec<_>>())?;
    let point: Vec<Vec<f64>> = keep
        .iter()
        .map(|&x| {
            let mut v = vec![0.0; j.rows()];
            v[x] = 1.0;
            v
        })
        .collect();
    let cond: Vec<Vec<f64>> = keep
        .iter()
        .map(|&x| j.row(x).iter().map(|v| v / m.get(x)).collect())
        .collect();
    let (a, b) = (Channel::from_rows(&point)?, Channel::from_rows(&cond)?);
    if by_rows {
        Decomposition::new(pw, a, b)
    } else {
        Decomposition::new(pw, b, a)
    }
}

fn columns_of(d: &Decomposition) -> Vec<(Vec<f64>, Vec<f64>)> {
    (0..d.w_card())
        .map(|w| {
            (
                d.px_given_w().row(w).as_slice().to_vec(),
                d.py_given_w().row(w).as_slice().to_vec(),
            )
        })
        .collect()
}

/// Successive linearization of a concave (in the minimized sense) function
/// of the weights, from a random vertex.
fn linearize(
    sup: &Support,
    entries: &[Vec<f64>],
    gradient: &dyn Fn(f64) -> f64,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<f64>> {
    let mut cost: Vec<f64> = (0..entries.len()).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let mut lambda: Vec<f64> = Vec::new();
    for _ in 0..LINEARIZE_ITERS {
        let sol = solve_lp(&cost, entries, &sup.target).ok()?;
        let same = lambda.len() == sol.x.len()
            && lambda.iter().zip(&sol.x).all(|(a, b)| (a - b).abs() < 1e-12);
        lambda = sol.x;
        if same {
            break;
        }
        cost = lambda.iter().map(|&l| gradient(l)).collect();
    }
    Some(lambda)
}

impl CommonEntropyProfile {
    /// Builds the candidate pool for `pi` with factorization ranks up to `kmax`.
    pub fn new(pi: &JointDist, kmax: usize, opts: &Options) -> Result<Self> {
        if kmax == 0 {
            return Err(Error::Domain("kmax must be at least 1".into()));
        }
        let mut candidates = Vec::new();
        let mut starts_used = 0;
        candidates.push(Decomposition::copy_of(pi));
        candidates.push(conditional_on(pi, true)?);
        candidates.push(conditional_on(pi, false)?);

        let fit = best_product_fit(pi);
        let g_inf_witness = mixture_decomposition(pi, &fit)?;
        candidates.push(g_inf_witness.clone());

        let restarts = opts.starts.max(1);
        let ks = kmax.min(pi.support().len());
        for k in 1..=ks {
            let found = opts.exec.map_indices(restarts, |i| {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(((k as u64) << 32) | i as u64);
                hals(pi, k, &mut rng)
            });
            starts_used += restarts;
            candidates.extend(found.into_iter().flatten());
        }

        let wyner = column_generation(
            pi,
            &WynerPricing::new(pi),
            &[],
            &Options {
                max_rounds: opts.max_rounds.min(50),
                ..opts.clone()
            },
        )?;
        starts_used += wyner.starts_used;
        let sup = Support::new(pi);
        let mut pool: Vec<Column> = wyner.pool;
        for d in &candidates {
            for (p, q) in columns_of(d) {
                pool.push(Column { p, q, cost: 0.0 });
            }
        }
        let entries: Vec<Vec<f64>> = pool
            .iter()
            .map(|c| sup.entries(&c.p, &c.q))
            .collect();
        // Columns with mass off the support cannot enter an exact LP solution.
        let usable: Vec<usize> = (0..pool.len())
            .filter(|&j| {
                let inside: f64 = entries[j].iter().sum::<f64>();
                (1.0f64 - inside).abs() < 1e-12
            })
            .collect();
        let pool: Vec<Column> = usable.iter().map(|&j| pool[j].clone()).collect();
        let entries: Vec<Vec<f64>> = usable.iter().map(|&j| entries[j].clone()).collect();

        let gradients: [(u64, Box<dyn Fn(f64) -> f64 + Sync>); 3] = [
            (1, Box::new(|l: f64| (l + SMOOTH).powf(-0.5))),
            (2, Box::new(|l: f64| -(l + SMOOTH).ln() - 1.0)),
            (3, Box::new(|l: f64| -(l + SMOOTH))),
        ];
        let per_order = (restarts / 4).max(1);
        for (tag, g) in &gradients {
            let vertices = opts.exec.map_indices(per_order, |i| {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9);
                rng.set_stream((tag << 32) | i as u64);
                linearize(&sup, &entries, g.as_ref(), &mut rng)
            });
            starts_used += per_order;
            for lambda in vertices.into_iter().flatten() {
                if let Ok(d) = decomposition_from(&pool, &lambda) {
                    candidates.push(d);
                }
            }
        }
        // α = ∞: push each component's weight as high as feasibility allows.
        let inf_lps: Vec<usize> = (0..pool.len().min(MAX_INF_LPS)).collect();
        let vertices = opts.exec.map(&inf_lps, |&j| {
            let mut cost = vec![0.0; pool.len()];
            cost[j] = -1.0;
            solve_lp(&cost, &entries, &sup.target).ok().map(|s| s.x)
        });
        starts_used += inf_lps.len();
        for lambda in vertices.into_iter().flatten() {
            if let Ok(d) = decomposition_from(&pool, &lambda) {
                candidates.push(d);
            }
        }

        let candidates: Vec<Decomposition> = candidates
            .into_iter()
            .map(|d| d.pruned())
            .filter(|d| synthesis_error(pi, d) <= FEASIBILITY_TOL)
            .collect();
        Ok(Self {
            candidates,
            rank: rank_of(pi),
            g_inf: fit.value,
            g_inf_exact: fit.exact,
            starts_used,
        })
    }

    /// `min H_α(W)` over pool members with `|W| ≤ kmax`.
    pub fn g_alpha(&self, alpha: f64, kmax: usize) -> BoundReport {
        let best = self
            .candidates
            .iter()
            .filter(|d| d.w_card() <= kmax)
            .map(|d| (renyi_entropy_of(d.pw().as_slice(), alpha), d))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        let Some((value, d)) = best else {
            return BoundReport {
                value: f64::INFINITY,
                kind: BoundKind::HeuristicUpper,
                witness: None,
                starts_used: self.starts_used,
                converged: false,
                caveat: Some(format!("no exact decomposition with |W| <= {kmax} found")),
                n: 1,
            };
        };
        let certified = if alpha == 0.0 {
            d.w_card() == self.rank
        } else if alpha == f64::INFINITY {
            self.g_inf_exact && (value - self.g_inf).abs() <= 1e-12
        } else {
            value.abs() <= 1e-12
        };
        BoundReport {
            value,
            kind: if certified {
                BoundKind::CertifiedExact
            } else {
                BoundKind::HeuristicUpper
            },
            witness: Some(Witness::Decomposition(d.clone())),
            starts_used: self.starts_used,
            converged: true,
            caveat: None,
            n: 1,
        }
    }

    pub fn candidates(&self) -> &[Decomposition] {
        &self.candidates
    }
}

/// The common α-Rényi entropy `min H_α(W)` over decompositions with `|W| ≤ kmax`.
pub fn g_alpha(pi: &JointDist, alpha: f64, kmax: usize, opts: &Options) -> Result<BoundReport> {
    if alpha.is_nan() {
        return Err(Error::Domain("order must not be NaN".into()));
    }
    Ok(CommonEntropyProfile::new(pi, kmax, opts)?.g_alpha(alpha, kmax))
}

/// Common entropy `G(π) = min H(W)` over decompositions with `|W| ≤ kmax`.
pub fn common_entropy(pi: &JointDist, kmax: usize, opts: &Options) -> Result<BoundReport> {
    g_alpha(pi, 1.0, kmax, opts)
}

/// `exp G_α(A / ‖A‖₁)`; reported in the `value` field.
pub fn nonneg_alpha_rank(matrix: &[Vec<f64>], alpha: f64, opts: &Options) -> Result<BoundReport> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    let flat: Vec<f64> = matrix.iter().flatten().copied().collect();
    if flat.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidDistribution("matrix must be finite and nonnegative".into()));
    }
    if flat.iter().all(|v| *v == 0.0) {
        return Err(Error::Domain("zero matrix has no nonnegative rank".into()));
    }
    let (pi, _) = JointDist::normalize(rows, cols, &flat)?;
    let kmax = rows * cols;
    let mut rep = g_alpha(&pi, alpha, kmax, opts)?;
    rep.value = rep.value.exp();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> Options {
        Options::default().with_starts(8)
    }

    #[test]
    fn rank_examples() {
        let p = FiniteDist::new(vec![0.3, 0.7]).unwrap();
        assert_eq!(rank_of(&JointDist::product(&p, &p)), 1);
        let diag = JointDist::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert_eq!(rank_of(&diag), 2);
    }

    #[test]
    fn product_and_diagonal() {
        let p = FiniteDist::new(vec![0.3, 0.7]).unwrap();
        let prod = JointDist::product(&p, &p);
        let r = common_entropy(&prod, 4, &quick()).unwrap();
        assert!(r.value.abs() < 1e-12);
        let diag = JointDist::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let prof = CommonEntropyProfile::new(&diag, 4, &quick()).unwrap();
        for alpha in [0.0, 0.5, 1.0, 2.0, f64::INFINITY] {
            let r = prof.g_alpha(alpha, 4);
            assert!((r.value - 2f64.ln()).abs() < 1e-9, "alpha {alpha}: {}", r.value);
        }
        assert_eq!(prof.g_alpha(0.0, 4).kind, BoundKind::CertifiedExact);
    }

    #[test]
    fn monotone_in_order() {
        let pi = JointDist::from_rows(&[vec![0.3125, 0.1875], vec![0.1875, 0.3125]]).unwrap();
        let prof = CommonEntropyProfile::new(&pi, 4, &quick()).unwrap();
        let vals: Vec<f64> = [0.0, 0.5, 1.0, 2.0, f64::INFINITY]
            .iter()
            .map(|&a| prof.g_alpha(a, 4).value)
            .collect();
        for w in vals.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{vals:?}");
        }
        let inf = super::super::g_infinity(&pi).unwrap().value;
        assert!((vals[4] - inf).abs() < 1e-9);
    }

    #[test]
    fn nonneg_rank_examples() {
        let r = nonneg_alpha_rank(&[vec![1.0, 2.0], vec![2.0, 4.0]], 0.0, &quick()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = nonneg_alpha_rank(&[vec![1.0, 0.0], vec![0.0, 1.0]], 0.0, &quick()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
        let r = nonneg_alpha_rank(&[vec![1.0, 0.0], vec![0.0, 1.0]], f64::INFINITY, &quick()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
        assert!(nonneg_alpha_rank(&[vec![0.0]], 0.0, &quick()).is_err());
    }
}
