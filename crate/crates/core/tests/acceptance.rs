//! Acceptance suite: one PASS/FAIL line per criterion, with its tolerance and
//! wall-clock budget. Exits nonzero if any criterion fails.

mod oracles;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ci_core::bounds::{
    g_infinity, gamma_ub, multiletter_gamma, objective_ub, objective_wyner, wyner_ci, Options,
};
use ci_core::synthesis::{median, mixture_residual, CoveringRow};
use ci_core::transport::solve_transport_masses;
use ci_core::{
    dsbs_decomposition, dsbs_exact_ci, dsbs_joint, dsbs_wyner_ci, entropy, gaussian_exact_ub,
    gaussian_li_elgamal_ub, gaussian_wyner, mixture_lambda, mixture_split, product_lift,
    run_covering_experiment, synthesize, Channel, CoveringConfig, Decomposition, DsbsParams, Exec,
    FiniteDist, JointDist, Sense,
};
use oracles::{random_pmf, rng};
use rand::Rng;

/// Γ for the DSBS with a = 0.25, as stated to seven digits.
const GAMMA_DSBS: f64 = 0.293_893_3;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_dsbs_closed_forms() -> Outcome {
    let exact = dsbs_exact_ci(0.375).map_err(|e| e.to_string())?;
    let wyner = dsbs_wyner_ci(0.375).map_err(|e| e.to_string())?;
    ensure((exact - 0.293_893_3).abs() <= 1e-6, || format!("exact = {exact}"))?;
    ensure((wyner - 0.230_040_1).abs() <= 1e-6, || format!("wyner = {wyner}"))?;
    let mut worst = 0.0f64;
    for i in 1..=100 {
        let p = 0.5 * i as f64 / 101.0;
        let s = DsbsParams::new(p).unwrap();
        let a = s.a;
        let alpha0 = 0.5 * (a * a + (1.0 - a) * (1.0 - a));
        let beta0 = a * (1.0 - a);
        let gap = 2.0 * a * a * (alpha0 / beta0).ln();
        let d = dsbs_exact_ci(p).unwrap() - dsbs_wyner_ci(p).unwrap();
        worst = worst.max((d - gap).abs());
    }
    ensure(worst <= 1e-9, || format!("gap identity off by {worst:.3e}"))?;
    Ok(format!("exact={exact:.7} wyner={wyner:.7} gap-identity max err {worst:.1e}"))
}

fn c2_gamma_ub_dsbs() -> Outcome {
    let pi = dsbs_joint(0.375).unwrap();
    let rep = gamma_ub(&pi, &Options::default().with_starts(64)).map_err(|e| e.to_string())?;
    let d = rep.decomposition().ok_or("no witness")?;
    let recomputed = objective_ub(&pi, d).map_err(|e| e.to_string())?;
    let certified = objective_ub(&pi, &dsbs_decomposition(0.375).unwrap()).unwrap();
    ensure(rep.value <= GAMMA_DSBS + 1e-3, || format!("value {} too high", rep.value))?;
    ensure(recomputed >= GAMMA_DSBS - 1e-3, || format!("witness objective {recomputed} too low"))?;
    ensure((recomputed - rep.value).abs() < 1e-9, || "witness does not reproduce value".into())?;
    ensure((certified - GAMMA_DSBS).abs() < 1e-6, || format!("closed-form witness gives {certified}"))?;
    Ok(format!("gamma_ub={:.7} witness objective={recomputed:.7}", rep.value))
}

fn random_decomposition(r: &mut rand_chacha::ChaCha8Rng, k: usize) -> Decomposition {
    let w = r.random_range(1..=4);
    let rows = |r: &mut rand_chacha::ChaCha8Rng| {
        Channel::new((0..w).map(|_| FiniteDist::new(random_pmf(r, k)).unwrap()).collect()).unwrap()
    };
    let pw = FiniteDist::new(random_pmf(r, w)).unwrap();
    let cx = rows(r);
    let cy = rows(r);
    Decomposition::new(pw, cx, cy).unwrap()
}

fn c3_per_decomposition() -> Outcome {
    let mut r = rng(3);
    let mut slack = f64::INFINITY;
    for i in 0..200 {
        let d = random_decomposition(&mut r, 2 + i % 2);
        let pi = synthesize(&d);
        let ub = objective_ub(&pi, &d).map_err(|e| e.to_string())?;
        let mi = objective_wyner(&d);
        ensure(ub >= mi - 1e-9, || format!("instance {i}: {ub} < {mi}"))?;
        slack = slack.min(ub - mi);
    }
    Ok(format!("200 instances, min objective_UB - I = {slack:.3e}"))
}

fn c4_transport_oracle() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for i in 0..500 {
        let (m, n) = (r.random_range(1..=3), r.random_range(1..=3));
        let p = random_pmf(&mut r, m);
        let q = random_pmf(&mut r, n);
        let cost: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| r.random_range(-1.0..4.0)).collect())
            .collect();
        let (sense, max) = if i % 2 == 0 { (Sense::Min, false) } else { (Sense::Max, true) };
        let got = solve_transport_masses(&cost, &p, &q, sense).map_err(|e| e.to_string())?.value;
        let want = oracles::transport_by_vertices(&cost, &p, &q, max);
        worst = worst.max((got - want).abs());
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:.3e}"))?;
    Ok(format!("500 instances, max |simplex - oracle| = {worst:.1e}"))
}

fn c5_g_infinity_additivity() -> Outcome {
    let mut r = rng(5);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let v = random_pmf(&mut r, 4);
        let pi = JointDist::from_rows(&[vec![v[0], v[1]], vec![v[2], v[3]]]).unwrap();
        let one = g_infinity(&pi).map_err(|e| e.to_string())?.value;
        let two = g_infinity(&product_lift(&pi, 2).unwrap()).map_err(|e| e.to_string())?.value;
        worst = worst.max((two - 2.0 * one).abs());
    }
    ensure(worst <= 2e-4, || format!("max |G(pi x pi) - 2G(pi)| = {worst:.3e}"))?;
    Ok(format!("50 instances, max deviation {worst:.1e}"))
}

/// Is the bipartite graph of `mask` (rows vs columns) connected?
fn connected(mask: &[Vec<bool>]) -> bool {
    let (m, n) = (mask.len(), mask[0].len());
    let mut seen = vec![false; m + n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        let nbrs: Vec<usize> = if u < m {
            (0..n).filter(|&y| mask[u][y]).map(|y| m + y).collect()
        } else {
            (0..m).filter(|&x| mask[x][u - m]).collect()
        };
        for v in nbrs {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn random_pseudo_product(r: &mut rand_chacha::ChaCha8Rng) -> JointDist {
    let (m, n) = (r.random_range(2..=3), r.random_range(2..=3));
    let alpha: Vec<f64> = (0..m).map(|_| r.random_range(0.2..1.0)).collect();
    let beta: Vec<f64> = (0..n).map(|_| r.random_range(0.2..1.0)).collect();
    let mask = loop {
        let mask: Vec<Vec<bool>> = (0..m).map(|_| (0..n).map(|_| r.random_bool(0.7)).collect()).collect();
        if connected(&mask) {
            break mask;
        }
    };
    let w: Vec<f64> = (0..m)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .map(|(x, y)| if mask[x][y] { alpha[x] * beta[y] } else { 0.0 })
        .collect();
    JointDist::normalize(m, n, &w).unwrap().0
}

fn c6_condition_star() -> Outcome {
    let mut r = rng(6);
    let opts = Options::default();
    let mut worst = 0.0f64;
    for i in 0..20 {
        let pi = random_pseudo_product(&mut r);
        let ub = gamma_ub(&pi, &opts).map_err(|e| e.to_string())?.value;
        let wy = wyner_ci(&pi, &opts).map_err(|e| e.to_string())?.value;
        worst = worst.max((ub - wy).abs());
        ensure((ub - wy).abs() <= 2e-3, || format!("pseudo-product {i}: ub {ub} vs wyner {wy}"))?;
    }
    let mut worst_gap = 0.0f64;
    for p in [0.2, 0.3, 0.375, 0.45] {
        let pi = dsbs_joint(p).unwrap();
        let ub = gamma_ub(&pi, &opts).map_err(|e| e.to_string())?.value;
        let wy = wyner_ci(&pi, &opts).map_err(|e| e.to_string())?.value;
        let gap = dsbs_exact_ci(p).unwrap() - dsbs_wyner_ci(p).unwrap();
        worst_gap = worst_gap.max((ub - wy - gap).abs());
        ensure((ub - wy - gap).abs() <= 2e-3, || format!("DSBS p={p}: {} vs gap {gap}", ub - wy))?;
    }
    Ok(format!("pseudo-product max |ub - wyner| = {worst:.1e}; DSBS max gap error = {worst_gap:.1e}"))
}

fn c7_gaussian() -> Outcome {
    let mut worst = 0.0f64;
    let mut min_margin = f64::INFINITY;
    for i in 0..50 {
        let rho = i as f64 / 50.0;
        let w = gaussian_wyner(rho).unwrap();
        let e = gaussian_exact_ub(rho).unwrap();
        let l = gaussian_li_elgamal_ub(rho).unwrap();
        worst = worst.max((e - w - rho / (1.0 + rho)).abs());
        min_margin = min_margin.min(l - e);
    }
    ensure(worst <= 1e-12, || format!("gap identity off by {worst:.3e}"))?;
    ensure(min_margin >= 15.44, || format!("li_elgamal - exact_ub reaches {min_margin}"))?;
    Ok(format!("50 rho values, min li_elgamal - exact_ub = {min_margin:.4}"))
}

fn c8_splitting() -> Outcome {
    let mut r = rng(8);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let k = r.random_range(2..=6);
        let q = FiniteDist::new(random_pmf(&mut r, k)).unwrap();
        let p = FiniteDist::new(random_pmf(&mut r, k)).unwrap();
        let eps = ci_core::renyi_divergence(&p, &q, f64::INFINITY).unwrap() + 0.01;
        let res = mixture_split(&q, &p, eps).map_err(|e| e.to_string())?;
        let w = (-eps).exp();
        for i in 0..k {
            worst = worst.max((w * p.get(i) + (1.0 - w) * res.get(i) - q.get(i)).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("reconstruction error {worst:.3e}"))?;
    let mut tested = 0;
    while tested < 200 {
        let k = r.random_range(2..=5);
        let q = FiniteDist::new(random_pmf(&mut r, k)).unwrap();
        let p = FiniteDist::new(random_pmf(&mut r, k)).unwrap();
        let lam = mixture_lambda(&q, &p).unwrap();
        if !(lam > 1e-3 && lam < 1.0 - 1e-3) {
            continue;
        }
        tested += 1;
        let below = mixture_residual(&q, &p, lam - 1e-6).unwrap();
        let above = mixture_residual(&q, &p, lam + 1e-6).unwrap();
        ensure(below.iter().all(|&v| v >= 0.0), || format!("Λ - 1e-6 invalid at Λ = {lam}"))?;
        ensure(above.iter().any(|&v| v < 0.0), || format!("Λ + 1e-6 still valid at Λ = {lam}"))?;
    }
    Ok(format!("1000 splits, max cell error {worst:.1e}; 200 maximality checks"))
}

fn covering_rows(n: usize, eps: f64, seeds: u64) -> ci_core::Result<Vec<CoveringRow>> {
    let cfg = CoveringConfig {
        decomp: dsbs_decomposition(0.375).unwrap(),
        n,
        eps,
        rates: vec![GAMMA_DSBS - 0.25, GAMMA_DSBS, GAMMA_DSBS + 0.25, GAMMA_DSBS + 0.5],
        seeds: (0..seeds).collect(),
        exec: Exec::default(),
    };
    run_covering_experiment(&cfg)
}

fn medians(rows: &[CoveringRow]) -> Vec<f64> {
    let mut rates: Vec<f64> = rows.iter().map(|r| r.rate).collect();
    rates.dedup();
    rates
        .iter()
        .map(|&rate| {
            let v: Vec<f64> = rows.iter().filter(|r| r.rate == rate).map(|r| r.d_inf).collect();
            median(&v).unwrap()
        })
        .collect()
}

fn trend(n: usize, eps: f64) -> Outcome {
    let rows = covering_rows(n, eps, 32).map_err(|e| e.to_string())?;
    let again = covering_rows(n, eps, 32).map_err(|e| e.to_string())?;
    let bits = |rs: &[CoveringRow]| rs.iter().map(|r| (r.d_inf.to_bits(), r.realized_rate.to_bits())).collect::<Vec<_>>();
    ensure(bits(&rows) == bits(&again), || "rerun is not bit-identical".into())?;
    let m = medians(&rows);
    ensure(m.windows(2).all(|w| w[1] <= w[0]), || format!("medians {m:?} not nonincreasing"))?;
    Ok(format!("medians {:?}", m.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>()))
}

fn c9_covering_trend() -> Outcome {
    let spec = trend(6, 0.2);
    // the same experiment at the smallest blocklength whose conditional
    // shells are nonempty for ε = 0.2, reported for context only
    match trend(8, 0.2) {
        Ok(s) => println!("  info  [9] supplementary n=8, eps=0.2: {s}"),
        Err(e) => println!("  info  [9] supplementary n=8, eps=0.2 failed: {e}"),
    }
    spec.map(|s| format!("n=6, eps=0.2: {s}"))
        .map_err(|e| format!("n=6, eps=0.2: {e}"))
}

fn c10_exact_synthesis() -> Outcome {
    let mut worst = 0.0f64;
    for i in 1..100 {
        let p = 0.5 * i as f64 / 100.0;
        let s = synthesize(&dsbs_decomposition(p).unwrap());
        let j = dsbs_joint(p).unwrap();
        for (a, b) in s.as_slice().iter().zip(j.as_slice()) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst <= 1e-15, || format!("synthesis error {worst:.3e}"))?;
    let mut r = rng(10);
    let mut lift = 0.0f64;
    for _ in 0..20 {
        let v = random_pmf(&mut r, 6);
        let pi = JointDist::new(2, 3, v).unwrap();
        let h2 = entropy(&product_lift(&pi, 2).unwrap());
        lift = lift.max((h2 - 2.0 * entropy(&pi)).abs());
    }
    ensure(lift <= 1e-9, || format!("H(pi x pi) - 2H(pi) = {lift:.3e}"))?;
    Ok(format!("max cell error {worst:.1e}; lift entropy error {lift:.1e}"))
}

fn c11_multiletter() -> Outcome {
    let pi = dsbs_joint(0.375).unwrap();
    let opts = Options::default();
    let single = gamma_ub(&pi, &opts).map_err(|e| e.to_string())?.value;
    let two = multiletter_gamma(&pi, 2, &opts).map_err(|e| e.to_string())?;
    let d = two.decomposition().ok_or("no witness")?;
    let check = objective_ub(&product_lift(&pi, 2).unwrap(), d).map_err(|e| e.to_string())?;
    ensure((check - two.value).abs() < 1e-9, || "witness does not reproduce value".into())?;
    ensure(two.value / 2.0 <= single + 1e-3, || format!("{} / 2 > {single}", two.value))?;
    Ok(format!("gamma_2/2={:.7} gamma_ub={single:.7}", two.value / 2.0))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 11] = [
        (1, "DSBS closed forms", Duration::from_secs(1), c1_dsbs_closed_forms),
        (2, "gamma_ub reproduces the DSBS value", Duration::from_secs(30), c2_gamma_ub_dsbs),
        (3, "objective_UB >= I(XY;W) per decomposition", Duration::from_secs(10), c3_per_decomposition),
        (4, "network simplex vs vertex enumeration", Duration::from_secs(10), c4_transport_oracle),
        (5, "G_inf additivity", Duration::from_secs(60), c5_g_infinity_additivity),
        (6, "gamma_ub = wyner on pseudo-products; DSBS gap", Duration::from_secs(120), c6_condition_star),
        (7, "Gaussian comparison", Duration::from_secs(1), c7_gaussian),
        (8, "splitting exactness and maximality", Duration::from_secs(5), c8_splitting),
        (9, "covering trend, DSBS n=6", Duration::from_secs(300), c9_covering_trend),
        (10, "exact synthesis and product lift", Duration::from_secs(1), c10_exact_synthesis),
        (11, "multiletter subadditivity", Duration::from_secs(600), c11_multiletter),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; over budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS [{id}] {name} ({elapsed:.2?}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{id}] {name} ({elapsed:.2?}): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
