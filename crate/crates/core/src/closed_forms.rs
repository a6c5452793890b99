//! Closed forms for the doubly symmetric binary source and the bivariate
//! Gaussian source.
//!
//! The DSBS with crossover `p` is `[[α₀, β₀], [β₀, α₀]]` with `α₀ = (1−p)/2`
//! and `β₀ = p/2`. It is generated by `X = W ⊕ A`, `Y = W ⊕ B` with
//! `W ~ Bern(½)` and `A, B ~ Bern(a)` independent, `p = 2a(1−a)`.
//! The endpoints `p = 0` (diagonal source) and `p = ½` (independent source)
//! are accepted and evaluated through their limits.

use serde::{Deserialize, Serialize};

use crate::dist::{Channel, Decomposition, FiniteDist, JointDist};
use crate::error::{Error, Result};

/// `u log v` with the convention `0 log 0 = 0`.
fn xlogy(u: f64, v: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * v.ln()
    }
}

fn h2(a: f64) -> f64 {
    -xlogy(a, a) - xlogy(1.0 - a, 1.0 - a)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DsbsParams {
    /// crossover probability `P(X ≠ Y)`
    pub p: f64,
    /// component crossover, `a = (1 − √(1 − 2p))/2 ∈ [0, ½]`
    pub a: f64,
    pub alpha0: f64,
    pub beta0: f64,
}

impl DsbsParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::Domain(format!("DSBS crossover p = {p} must lie in [0, 1/2]")));
        }
        let a = if p == 0.5 {
            0.5
        } else {
            0.5 * (1.0 - (1.0 - 2.0 * p).sqrt())
        };
        Ok(Self {
            p,
            a,
            alpha0: 0.5 * (1.0 - p),
            beta0: 0.5 * p,
        })
    }

    /// The parameters whose component crossover is `a ∈ [0, ½]`.
    pub fn from_component(a: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&a) {
            return Err(Error::Domain(format!("component crossover a = {a} must lie in [0, 1/2]")));
        }
        let p = 2.0 * a * (1.0 - a);
        Ok(Self {
            p,
            a,
            alpha0: 0.5 * (1.0 - p),
            beta0: 0.5 * p,
        })
    }
}

pub fn dsbs_joint(p: f64) -> Result<JointDist> {
    let s = DsbsParams::new(p)?;
    JointDist::from_rows(&[vec![s.alpha0, s.beta0], vec![s.beta0, s.alpha0]])
}

/// `W ~ Bern(½)` with both channels flipping `W` with probability `a`.
pub fn dsbs_decomposition(p: f64) -> Result<Decomposition> {
    let a = DsbsParams::new(p)?.a;
    let flip = || Channel::from_rows(&[vec![1.0 - a, a], vec![a, 1.0 - a]]);
    Decomposition::new(FiniteDist::uniform(2)?, flip()?, flip()?)
}

/// `−2H₂(a) − (1−2a) log α₀ − 2a log β₀`, in nats.
pub fn dsbs_exact_ci(p: f64) -> Result<f64> {
    let s = DsbsParams::new(p)?;
    if s.a == 0.5 {
        return Ok(0.0);
    }
    let v = -2.0 * h2(s.a) - (1.0 - 2.0 * s.a) * s.alpha0.ln() - 2.0 * xlogy(s.a, s.beta0);
    Ok(v.max(0.0))
}

/// `−2H₂(a) − (1−p) log α₀ − p log β₀`, in nats.
pub fn dsbs_wyner_ci(p: f64) -> Result<f64> {
    let s = DsbsParams::new(p)?;
    if s.a == 0.5 {
        return Ok(0.0);
    }
    let v = -2.0 * h2(s.a) - (1.0 - s.p) * s.alpha0.ln() - xlogy(s.p, s.beta0);
    Ok(v.max(0.0))
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Domain(format!("correlation rho = {rho} must lie in [0, 1)")));
    }
    Ok(())
}

/// `½ log((1+ρ)/(1−ρ))`.
pub fn gaussian_wyner(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(0.5 * ((1.0 + rho) / (1.0 - rho)).ln())
}

/// `½ log((1+ρ)/(1−ρ)) + ρ/(1+ρ)`.
pub fn gaussian_exact_ub(rho: f64) -> Result<f64> {
    Ok(gaussian_wyner(rho)? + rho / (1.0 + rho))
}

/// `½ log(1/(1−ρ²)) + 24 log 2`, the dyadic-decomposition upper bound.
pub fn gaussian_li_elgamal_ub(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(-0.5 * (1.0 - rho * rho).ln() + 24.0 * std::f64::consts::LN_2)
}
