//! Common-information quantities of a joint pmf `π`: Wyner's common
//! information, the single-letter bounds `Γ^UB ≥ Γ^LB` on the exact common
//! information, common (Rényi) entropies, the nonnegative α-rank, and the
//! structural tests behind the equality `Γ^UB = C_Wyner`.
//!
//! Every optimizer returns a [`BoundReport`] whose witness reproduces the
//! reported value through the matching `objective_*` function.

mod colgen;
mod common;
mod ginf;
mod structure;

use serde::{Deserialize, Serialize};

use crate::dist::{entropy_of, synthesize, tv_of, Decomposition, FiniteDist, JointDist};
use crate::error::{shape_err, Error, Result};
use crate::par::Exec;
use crate::transport::{min_expected_cross_entropy, CrossEntropyCost};

pub use colgen::{gamma_lb, gamma_ub, multiletter_gamma, wyner_ci};
pub use common::{common_entropy, g_alpha, nonneg_alpha_rank, CommonEntropyProfile};
pub use ginf::g_infinity;
pub use structure::{check_condition_star, is_pseudo_product, ConditionStar, PseudoProduct};

/// Witnesses built from optimizer output must synthesize `π` this closely (TV).
pub const FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    CertifiedExact,
    HeuristicUpper,
    HeuristicLower,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::CertifiedExact => "certified-exact",
            BoundKind::HeuristicUpper => "heuristic-upper",
            BoundKind::HeuristicLower => "heuristic-lower",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Witness {
    Decomposition(Decomposition),
    ProductPair(FiniteDist, FiniteDist),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// nats; `+∞` when nothing feasible was found
    pub value: f64,
    pub kind: BoundKind,
    pub witness: Option<Witness>,
    pub starts_used: usize,
    pub converged: bool,
    pub caveat: Option<String>,
    /// blocklength the value refers to (divide by `n` for a per-letter rate)
    pub n: usize,
}

impl BoundReport {
    pub fn decomposition(&self) -> Option<&Decomposition> {
        match &self.witness {
            Some(Witness::Decomposition(d)) => Some(d),
            _ => None,
        }
    }
}

/// Settings shared by the multi-start optimizers.
#[derive(Clone, Debug)]
pub struct Options {
    /// pricing starts per column-generation round, and NMF restarts
    pub starts: usize,
    pub seed: u64,
    /// cap on `|W|`; `None` means `|X||Y|`
    pub wmax: Option<usize>,
    pub exec: Exec,
    pub max_rounds: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            starts: 64,
            seed: 0,
            wmax: None,
            exec: Exec::default(),
            max_rounds: 200,
        }
    }
}

impl Options {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_starts(mut self, starts: usize) -> Self {
        self.starts = starts;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_wmax(mut self, wmax: usize) -> Self {
        self.wmax = Some(wmax);
        self
    }

    pub(crate) fn cap(&self, pi: &JointDist) -> usize {
        self.wmax.unwrap_or(pi.rows() * pi.cols())
    }
}

fn check_decomposition(pi: &JointDist, d: &Decomposition) -> Result<()> {
    if d.x_card() != pi.rows() || d.y_card() != pi.cols() {
        return Err(shape_err(
            format!("{}x{}", pi.rows(), pi.cols()),
            format!("{}x{}", d.x_card(), d.y_card()),
        ));
    }
    Ok(())
}

/// `H(XY|W) = Σ_w P_W(w) (H(X|W=w) + H(Y|W=w))`.
pub fn conditional_entropy(d: &Decomposition) -> f64 {
    (0..d.w_card())
        .map(|w| {
            let pw = d.pw().get(w);
            if pw == 0.0 {
                0.0
            } else {
                pw * (entropy_of(d.px_given_w().row(w).as_slice())
                    + entropy_of(d.py_given_w().row(w).as_slice()))
            }
        })
        .sum()
}

/// `I(XY;W)` of the decomposition's own joint: `H(XY) − H(XY|W)`.
pub fn objective_wyner(d: &Decomposition) -> f64 {
    entropy_of(synthesize(d).as_slice()) - conditional_entropy(d)
}

fn cross_entropies(pi: &JointDist, d: &Decomposition) -> Result<Vec<f64>> {
    check_decomposition(pi, d)?;
    let cost = CrossEntropyCost::new(pi);
    (0..d.w_card())
        .map(|w| {
            cost.value(
                d.px_given_w().row(w).as_slice(),
                d.py_given_w().row(w).as_slice(),
            )
        })
        .collect()
}

/// `−H(XY|W) + Σ_w P_W(w) 𝓗(P_{X|W=w}, P_{Y|W=w} ‖ π)`.
pub fn objective_ub(pi: &JointDist, d: &Decomposition) -> Result<f64> {
    let cross = cross_entropies(pi, d)?;
    let mut total = -conditional_entropy(d);
    for (w, h) in cross.iter().enumerate() {
        let pw = d.pw().get(w);
        if pw > 0.0 {
            total += pw * h;
        }
    }
    Ok(total)
}

/// `−H(XY|W) + min_{Q ∈ C(P_W,P_W)} Σ Q(w,w') 𝓗(P_{X|W=w}, P_{Y|W=w'} ‖ π)`.
pub fn objective_lb(pi: &JointDist, d: &Decomposition) -> Result<f64> {
    check_decomposition(pi, d)?;
    let d = d.pruned();
    let cost = CrossEntropyCost::new(pi);
    let k = d.w_card();
    let mut cross = vec![vec![0.0; k]; k];
    for (w, row) in cross.iter_mut().enumerate() {
        for (v, cell) in row.iter_mut().enumerate() {
            *cell = cost.value(
                d.px_given_w().row(w).as_slice(),
                d.py_given_w().row(v).as_slice(),
            )?;
        }
    }
    let plan = min_expected_cross_entropy(d.pw(), &cross)?;
    Ok(plan.value - conditional_entropy(&d))
}

/// `−2H₂(½+θ) + log(1/α₀) + (1−2θ) log(α₀/β₀)` with `θ = √(α₀ − ¼)`, the
/// analytic lower-bound chain for the doubly symmetric binary source whose
/// component crossover is `a`.
pub fn dsbs_lb_analytic(a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 0.5) {
        return Err(Error::Domain(format!("crossover a = {a} must lie in (0, 1/2)")));
    }
    let alpha0 = 0.5 * (a * a + (1.0 - a) * (1.0 - a));
    let beta0 = a * (1.0 - a);
    let theta = (alpha0 - 0.25).max(0.0).sqrt();
    let h2 = |t: f64| entropy_of(&[t, 1.0 - t]);
    Ok(-2.0 * h2(0.5 + theta) + (1.0 / alpha0).ln() + (1.0 - 2.0 * theta) * (alpha0 / beta0).ln())
}

/// Confirms that `d` synthesizes `pi` within [`FEASIBILITY_TOL`].
pub(crate) fn synthesis_error(pi: &JointDist, d: &Decomposition) -> f64 {
    tv_of(synthesize(d).as_slice(), pi.as_slice())
}
