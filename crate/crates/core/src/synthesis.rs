//! Achievability schemes made executable at small blocklengths: mixture
//! splitting of a target around an approximate synthesizer, the
//! truncated-i.i.d. random codebook for distributed ∞-Rényi covering
//! (evaluated exactly by enumeration), and the rate accounting of the
//! variable-length exact-synthesis code built from them.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{
    check_same_shape, digits_of, entropy_of, max_ratio, product_lift, synthesize, Decomposition,
    JointDist, Pmf, SUPPORT_EPS,
};
use crate::error::{shape_err, Error, Result};
use crate::par::Exec;

/// Largest enumerated `|W|^n` for codebook construction.
pub const WORD_BUDGET: usize = 1 << 20;
/// Largest codebook size `round(e^{nR})`.
pub const CODEBOOK_BUDGET: usize = 1 << 16;
/// Largest enumerated `|X|^n |Y|^n` for the synthesized distribution.
pub const CELL_BUDGET: usize = 1 << 24;
/// Negative residual cells no smaller than this are rounding noise.
const CLAMP_TOL: f64 = 1e-12;

/// `Λ(q, p) = e^{−D_∞(p‖q)}`: the largest `λ` with `q − λp ≥ 0`, and 0 when
/// `supp p ⊄ supp q`.
pub fn mixture_lambda<P: Pmf + ?Sized>(q: &P, p: &P) -> Result<f64> {
    check_same_shape(q, p)?;
    let r = max_ratio(p.probs(), q.probs());
    Ok(if r.is_infinite() { 0.0 } else { 1.0 / r })
}

/// Raw cells of `(q − λp)/(1 − λ)`, unclamped; `λ < 1`.
pub fn mixture_residual<P: Pmf + ?Sized>(q: &P, p: &P, lambda: f64) -> Result<Vec<f64>> {
    check_same_shape(q, p)?;
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::Domain(format!("mixture weight {lambda} not in [0, 1)")));
    }
    Ok(q.probs()
        .iter()
        .zip(p.probs())
        .map(|(a, b)| (a - lambda * b) / (1.0 - lambda))
        .collect())
}

/// The residual `P̂ = (e^ε q − p)/(e^ε − 1)` of `q = e^{−ε} p + (1 − e^{−ε}) P̂`.
/// Requires `D_∞(p‖q) ≤ ε`, which is exactly nonnegativity of `P̂`.
pub fn mixture_split<P: Pmf>(q: &P, p: &P, eps: f64) -> Result<P> {
    check_same_shape(q, p)?;
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Domain(format!("splitting budget eps = {eps} must be positive")));
    }
    let scale = eps.exp();
    let denom = eps.exp_m1();
    let mut out = Vec::with_capacity(q.probs().len());
    for (&a, &b) in q.probs().iter().zip(p.probs()) {
        let v = (scale * a - b) / denom;
        if v < -CLAMP_TOL {
            let (worst, ratio) = argmax_ratio(p.probs(), q.probs());
            let cols = q.shape().1;
            let cell = if cols == 1 {
                format!("{worst}")
            } else {
                format!("({}, {})", worst / cols, worst % cols)
            };
            return Err(Error::Precondition(format!(
                "D_inf(p||q) = {:.6} exceeds eps = {eps:.6}; max ratio p/q = {ratio:.6} at cell {cell}",
                ratio.ln()
            )));
        }
        out.push(v.max(0.0));
    }
    q.with_probs(out)
}

fn argmax_ratio(p: &[f64], q: &[f64]) -> (usize, f64) {
    let mut best = (0, 0.0f64);
    for (i, (&a, &b)) in p.iter().zip(q).enumerate() {
        if a > SUPPORT_EPS {
            let r = if b <= 0.0 { f64::INFINITY } else { a / b };
            if r > best.1 {
                best = (i, r);
            }
        }
    }
    best
}

/// Per-symbol rate components of the exact-synthesis code that sends the
/// approximate code with probability `e^{−ε}` and otherwise describes a
/// residual sample with a fixed-length index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateBreakdown {
    /// `1/n`: the flag selecting the branch
    pub flag: f64,
    /// `e^{−ε} R`
    pub main: f64,
    /// `(1 − e^{−ε}) log |X||Y|`
    pub residual: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitCode {
    pub epsilon: f64,
    /// output distribution of the approximate synthesizer over `X^n × Y^n`
    pub p_main: JointDist,
    pub p_residual: JointDist,
    pub rate_breakdown: RateBreakdown,
}

impl SplitCode {
    /// Splits `target` (over `X^n × Y^n`) around `p_main`, whose code has
    /// per-symbol rate `rate_main`.
    pub fn new(target: &JointDist, p_main: JointDist, eps: f64, rate_main: f64, n: usize) -> Result<Self> {
        let p_residual = mixture_split(target, &p_main, eps)?;
        let per_letter_log = ((target.rows() * target.cols()) as f64).ln() / n as f64;
        let total = exact_synthesis_rate(rate_main, eps, n, per_letter_log)?;
        let w = (-eps).exp();
        Ok(Self {
            epsilon: eps,
            p_main,
            p_residual,
            rate_breakdown: RateBreakdown {
                flag: 1.0 / n as f64,
                main: w * rate_main,
                residual: (1.0 - w) * per_letter_log,
                total,
            },
        })
    }

    /// `e^{−ε} P_main + (1 − e^{−ε}) P̂`, which equals the target.
    pub fn reconstruct(&self) -> Vec<f64> {
        let w = (-self.epsilon).exp();
        self.p_main
            .as_slice()
            .iter()
            .zip(self.p_residual.as_slice())
            .map(|(a, b)| w * a + (1.0 - w) * b)
            .collect()
    }
}

/// `1/n + e^{−ε_n} R + (1 − e^{−ε_n}) log |X||Y|`; `ε_n = ∞` is allowed.
pub fn exact_synthesis_rate(rate_main: f64, eps_n: f64, n: usize, alphabet_product_log: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("blocklength must be positive".into()));
    }
    if eps_n.is_nan() || eps_n < 0.0 {
        return Err(Error::Domain(format!("eps_n = {eps_n} must be nonnegative")));
    }
    let w = (-eps_n).exp();
    Ok(1.0 / n as f64 + w * rate_main + (1.0 - w) * alphabet_product_log)
}

/// Counts of each symbol of `0..k` in `seq`; `None` if a symbol is out of range.
fn type_counts(seq: &[usize], k: usize) -> Option<Vec<usize>> {
    let mut c = vec![0usize; k];
    for &s in seq {
        *c.get_mut(s)? += 1;
    }
    Some(c)
}

/// `|T(x) − p(x)| ≤ ε p(x)` for every symbol, with `T(x) = count/n`.
/// Symbols of zero mass must therefore not occur.
fn counts_typical(counts: &[usize], n: usize, p: &[f64], eps: f64) -> bool {
    counts.iter().zip(p).all(|(&c, &px)| {
        if px <= SUPPORT_EPS {
            c == 0
        } else {
            // slack absorbs the rounding of c/n and ε·p only
            (c as f64 / n as f64 - px).abs() <= eps * px + 1e-12
        }
    })
}

/// Strong typicality of `seq` with respect to `p`.
pub fn is_strongly_typical(seq: &[usize], p: &dyn Pmf, eps: f64) -> bool {
    if seq.is_empty() {
        return false;
    }
    let probs = p.probs();
    match type_counts(seq, probs.len()) {
        Some(c) => counts_typical(&c, seq.len(), probs, eps),
        None => false,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    pub n: usize,
    /// requested rate, nats per symbol
    pub rate: f64,
    /// `log |words| / n`
    pub realized_rate: f64,
    pub eps: f64,
    pub seed: u64,
    pub words: Vec<Vec<usize>>,
}

/// `round(e^{nR})`, at least one.
pub fn codebook_size(n: usize, rate: f64) -> Result<usize> {
    let m = (n as f64 * rate).exp().round().max(1.0);
    if !m.is_finite() || m > CODEBOOK_BUDGET as f64 {
        return Err(Error::Budget(format!(
            "codebook size e^(nR) = e^{:.3} exceeds {CODEBOOK_BUDGET}",
            n as f64 * rate
        )));
    }
    Ok(m as usize)
}

fn checked_pow(base: usize, n: usize, budget: usize, what: &str) -> Result<usize> {
    match base.checked_pow(n as u32) {
        Some(v) if v <= budget => Ok(v),
        _ => Err(Error::Budget(format!("{what} {base}^{n} exceeds {budget}"))),
    }
}

/// Draws `round(e^{nR})` i.i.d. words from `Q_W^n` restricted to the strongly
/// typical set `T_{ε/2}(Q_W)` and renormalized.
pub fn build_truncated_codebook(
    decomp: &Decomposition,
    n: usize,
    eps: f64,
    rate: f64,
    seed: u64,
) -> Result<Codebook> {
    if n == 0 {
        return Err(Error::Domain("blocklength must be positive".into()));
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::Domain(format!("eps = {eps} must be nonnegative")));
    }
    let k = decomp.w_card();
    let total = checked_pow(k, n, WORD_BUDGET, "word space")?;
    let m = codebook_size(n, rate)?;
    let qw = decomp.pw().as_slice();
    let mut words = Vec::new();
    let mut weights = Vec::new();
    for idx in 0..total {
        let w = digits_of(idx, k, n);
        let c = type_counts(&w, k).expect("digits are in range");
        if counts_typical(&c, n, qw, eps / 2.0) {
            weights.push(w.iter().map(|&s| qw[s]).product::<f64>());
            words.push(w);
        }
    }
    if words.is_empty() {
        return Err(Error::EmptyTypicalSet(format!(
            "no word of length {n} is {}-strongly typical for Q_W = {qw:?}",
            eps / 2.0
        )));
    }
    let sampler = WeightedIndex::new(&weights).map_err(|e| Error::Solver(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = (0..m).map(|_| words[sampler.sample(&mut rng)].clone()).collect();
    Ok(Codebook {
        n,
        rate,
        realized_rate: (m as f64).ln() / n as f64,
        eps,
        seed,
        words: picked,
    })
}

/// `P_{X^n|W^n}(·|w^n) ∝ Q_{X|W}^n(·|w^n)` on the conditional shell
/// `{x^n : (w^n, x^n) ∈ T_ε(Q_WX)}`, over `X^n` in lexicographic order.
fn truncated_conditional(word: &[usize], pw: &[f64], channel: &crate::dist::Channel, eps: f64) -> Result<Vec<f64>> {
    let n = word.len();
    let (kw, kx) = (pw.len(), channel.outputs());
    let joint: Vec<f64> = (0..kw)
        .flat_map(|w| channel.row(w).as_slice().iter().map(move |&c| pw[w] * c))
        .collect();
    let total = checked_pow(kx, n, CELL_BUDGET, "output space")?;
    let mut out = vec![0.0; total];
    let mut mass = 0.0;
    let mut pair = vec![0usize; n];
    for (idx, cell) in out.iter_mut().enumerate() {
        let x = digits_of(idx, kx, n);
        let mut prob = 1.0;
        for i in 0..n {
            pair[i] = word[i] * kx + x[i];
            prob *= channel.row(word[i]).get(x[i]);
        }
        if prob == 0.0 {
            continue;
        }
        let c = type_counts(&pair, kw * kx).expect("pairs are in range");
        if counts_typical(&c, n, &joint, eps) {
            *cell = prob;
            mass += prob;
        }
    }
    if mass == 0.0 {
        return Err(Error::EmptyTypicalSet(format!(
            "conditional shell of codeword {word:?} is empty at n = {n}, eps = {eps}"
        )));
    }
    for v in &mut out {
        *v /= mass;
    }
    Ok(out)
}

fn check_codebook(cb: &Codebook, decomp: &Decomposition, n: usize) -> Result<()> {
    if cb.n != n {
        return Err(shape_err(format!("blocklength {n}"), format!("codebook of blocklength {}", cb.n)));
    }
    if let Some(w) = cb.words.iter().find(|w| w.len() != n || w.iter().any(|&s| s >= decomp.w_card())) {
        return Err(Error::InvalidDistribution(format!("codeword {w:?} is not a word of W^{n}")));
    }
    if cb.words.is_empty() {
        return Err(Error::InvalidDistribution("empty codebook".into()));
    }
    Ok(())
}

/// The exact output `(1/|M|) Σ_m P_{X^n|W^n}(·|w_m) ⊗ P_{Y^n|W^n}(·|w_m)`,
/// with conditionals truncated to the `ε` conditional typical shells.
pub fn synthesized_dist(cb: &Codebook, decomp: &Decomposition, n: usize, eps: f64) -> Result<JointDist> {
    check_codebook(cb, decomp, n)?;
    let rows = checked_pow(decomp.x_card(), n, CELL_BUDGET, "X^n")?;
    let cols = checked_pow(decomp.y_card(), n, CELL_BUDGET, "Y^n")?;
    if rows.checked_mul(cols).is_none_or(|c| c > CELL_BUDGET) {
        return Err(Error::Budget(format!("{rows} x {cols} cells exceed {CELL_BUDGET}")));
    }
    // multiplicities in sorted order make the sum independent of codeword order
    let mut mult: BTreeMap<&[usize], usize> = BTreeMap::new();
    for w in &cb.words {
        *mult.entry(w.as_slice()).or_default() += 1;
    }
    let pw = decomp.pw().as_slice();
    let m = cb.words.len() as f64;
    let mut data = vec![0.0; rows * cols];
    for (word, count) in mult {
        let px = truncated_conditional(word, pw, decomp.px_given_w(), eps)?;
        let py = truncated_conditional(word, pw, decomp.py_given_w(), eps)?;
        let weight = count as f64 / m;
        for (x, &a) in px.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let wa = weight * a;
            for (cell, &b) in data[x * cols..(x + 1) * cols].iter_mut().zip(&py) {
                *cell += wa * b;
            }
        }
    }
    JointDist::new(rows, cols, data)
}

/// `D_∞(P_{X^nY^n|C} ‖ target)` by enumeration; `+∞` when the output leaves
/// the target's support.
pub fn covering_dinf(cb: &Codebook, decomp: &Decomposition, n: usize, eps: f64, target: &JointDist) -> Result<f64> {
    let synth = synthesized_dist(cb, decomp, n, eps)?;
    check_same_shape(&synth, target)?;
    Ok(max_ratio(synth.as_slice(), target.as_slice()).ln().max(0.0))
}

#[derive(Clone, Debug)]
pub struct CoveringConfig {
    pub decomp: Decomposition,
    pub n: usize,
    pub eps: f64,
    pub rates: Vec<f64>,
    pub seeds: Vec<u64>,
    pub exec: Exec,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringRow {
    pub rate: f64,
    pub seed: u64,
    pub d_inf: f64,
    pub realized_rate: f64,
}

/// One row per `(rate, seed)`, rate-major. Runs are independent and the
/// output does not depend on the execution mode.
pub fn run_covering_experiment(cfg: &CoveringConfig) -> Result<Vec<CoveringRow>> {
    let target = product_lift(&synthesize(&cfg.decomp), cfg.n)?;
    let jobs: Vec<(f64, u64)> = cfg
        .rates
        .iter()
        .flat_map(|&r| cfg.seeds.iter().map(move |&s| (r, s)))
        .collect();
    cfg.exec
        .map(&jobs, |&(rate, seed)| {
            let cb = build_truncated_codebook(&cfg.decomp, cfg.n, cfg.eps, rate, seed)?;
            let d_inf = covering_dinf(&cb, &cfg.decomp, cfg.n, cfg.eps, &target)?;
            Ok(CoveringRow {
                rate,
                seed,
                d_inf,
                realized_rate: cb.realized_rate,
            })
        })
        .into_iter()
        .collect()
}

/// Median of the finite-or-infinite values (mean of the middle pair).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 || v[mid - 1] == v[mid] {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperblockReport {
    pub k: usize,
    pub n: usize,
    /// `R'`, nats per source symbol
    pub rate: f64,
    /// `M = round(e^{nkR'})`
    pub m: u64,
    pub realized_rate: f64,
    /// `H(W_k)`
    pub entropy: f64,
    /// `Q_{W^n}(A_ε)` under the untruncated product
    pub typical_mass: f64,
    /// `D_∞(P̃ ‖ Q_{W^n})`
    pub measured: f64,
    /// `log(1 + e^{n(H(W_k)+ε)}/M)`
    pub bound: f64,
    /// `D_∞(P̃ ‖ P_{W_k}^n)`
    pub measured_vs_iid: f64,
    /// `max |P̃ − Q_{W^n}|`, below `1/M`
    pub max_cell_error: f64,
}

/// Simulates `n` i.i.d. copies of the blocklength-`k` common variable `W_k`
/// with a uniform `M`-ary message: the weakly typical restriction
/// `Q_{W^n}` is quantized to multiples of `1/M` by largest remainder, and the
/// resulting `D_∞` is compared with `log(1 + e^{n(H+ε)}/M)`.
pub fn superblock_rate_check(decomp_k: &Decomposition, k: usize, n: usize, eps: f64, rate: f64) -> Result<SuperblockReport> {
    if k == 0 || n == 0 {
        return Err(Error::Domain("block lengths must be positive".into()));
    }
    if eps.is_nan() || eps <= 0.0 || !rate.is_finite() {
        return Err(Error::Domain(format!("need eps > 0 and finite rate, got eps = {eps}, rate = {rate}")));
    }
    let pw = decomp_k.pw().as_slice();
    let kw = pw.len();
    let total = checked_pow(kw, n, WORD_BUDGET, "superblock word space")?;
    let h = entropy_of(pw);
    let log_m = (n * k) as f64 * rate;
    if log_m > 50.0 * std::f64::consts::LN_2 {
        return Err(Error::Budget(format!("M = e^{log_m:.2} exceeds 2^50")));
    }
    let m = log_m.exp().round().max(1.0);

    let mut iid = vec![0.0; total];
    let mut q = vec![0.0; total];
    for (idx, (slot, qslot)) in iid.iter_mut().zip(q.iter_mut()).enumerate() {
        let mut lp = 0.0;
        for s in digits_of(idx, kw, n) {
            lp += if pw[s] > 0.0 { pw[s].ln() } else { f64::NEG_INFINITY };
        }
        *slot = lp.exp();
        if lp.is_finite() && (-lp / n as f64 - h).abs() <= eps {
            *qslot = *slot;
        }
    }
    let typical_mass: f64 = q.iter().sum();
    if typical_mass == 0.0 {
        return Err(Error::EmptyTypicalSet(format!(
            "no superblock of {n} words is {eps}-weakly typical"
        )));
    }
    for v in &mut q {
        *v /= typical_mass;
    }

    // largest remainder: floor everything, then hand out the deficit
    let mut counts: Vec<f64> = q.iter().map(|v| (m * v).floor()).collect();
    let deficit = (m - counts.iter().sum::<f64>()).round() as usize;
    let mut order: Vec<usize> = (0..total).filter(|&i| q[i] > 0.0).collect();
    order.sort_by(|&a, &b| {
        let ra = m * q[a] - counts[a];
        let rb = m * q[b] - counts[b];
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(deficit) {
        counts[i] += 1.0;
    }
    let p_tilde: Vec<f64> = counts.iter().map(|c| c / m).collect();

    let max_cell_error = p_tilde
        .iter()
        .zip(&q)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(SuperblockReport {
        k,
        n,
        rate,
        m: m as u64,
        realized_rate: m.ln() / (n * k) as f64,
        entropy: h,
        typical_mass,
        measured: max_ratio(&p_tilde, &q).ln().max(0.0),
        bound: ((n as f64 * (h + eps)).exp() / m).ln_1p(),
        measured_vs_iid: max_ratio(&p_tilde, &iid).ln().max(0.0),
        max_cell_error,
    })
}
