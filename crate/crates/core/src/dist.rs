//! Finite-alphabet probability types and the entropy / divergence functionals
//! built on them. All logarithms are natural (nats).

use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Error, Result};

/// Mass at or below this value is outside the support.
pub const SUPPORT_EPS: f64 = 1e-12;
/// Tolerated deviation of a total mass from one.
pub const SUM_TOL: f64 = 1e-9;
/// Default cell budget for enumerated product distributions.
pub const DEFAULT_CELL_BUDGET: usize = 1 << 24;

fn check_masses(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution("empty alphabet".into()));
    }
    if let Some((i, p)) = probs
        .iter()
        .enumerate()
        .find(|(_, p)| !p.is_finite() || **p < 0.0)
    {
        return Err(Error::InvalidDistribution(format!(
            "entry {i} is {p}, expected a finite nonnegative mass"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidDistribution(format!(
            "masses sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Anything that can be read as a flat probability vector.
pub trait Pmf {
    fn probs(&self) -> &[f64];
    /// `(rows, cols)`; a one-dimensional pmf reports `(len, 1)`.
    fn shape(&self) -> (usize, usize);
    /// A validated pmf of the same shape (labels kept) carrying `probs`.
    fn with_probs(&self, probs: Vec<f64>) -> Result<Self>
    where
        Self: Sized;
}

/// A probability mass function over an indexed finite alphabet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteDist {
    probs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl FiniteDist {
    /// Validates without renormalizing.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_masses(&probs)?;
        Ok(Self { probs, labels: None })
    }

    /// Scales nonnegative weights to unit mass. Used for ingestion only.
    pub fn normalize(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
            labels: None,
        })
    }

    pub fn point_mass(n: usize, at: usize) -> Result<Self> {
        if at >= n {
            return Err(Error::InvalidDistribution(format!(
                "point mass at {at} outside alphabet of size {n}"
            )));
        }
        let mut probs = vec![0.0; n];
        probs[at] = 1.0;
        Ok(Self { probs, labels: None })
    }

    /// `Bern(p)` as the pmf `[1 - p, p]` over `{0, 1}`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("Bernoulli parameter {p} not in [0,1]")));
        }
        Ok(Self {
            probs: vec![1.0 - p, p],
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.probs.len() {
            return Err(shape_err(self.probs.len(), labels.len()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn support(&self) -> Vec<usize> {
        support_of(&self.probs)
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }
}

impl Pmf for FiniteDist {
    fn probs(&self) -> &[f64] {
        &self.probs
    }
    fn shape(&self) -> (usize, usize) {
        (self.probs.len(), 1)
    }
    fn with_probs(&self, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != self.probs.len() {
            return Err(shape_err(self.probs.len(), probs.len()));
        }
        check_masses(&probs)?;
        Ok(Self {
            probs,
            labels: self.labels.clone(),
        })
    }
}

/// A joint pmf over `X × Y`, stored row-major (`x` indexes rows).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointDist {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y_labels: Option<Vec<String>>,
}

impl JointDist {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        if data.len() != rows * cols {
            return Err(shape_err(format!("{rows}x{cols}"), format!("{} cells", data.len())));
        }
        check_masses(&data)?;
        Ok(Self {
            rows,
            cols,
            data,
            x_labels: None,
            y_labels: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidDistribution("ragged matrix".into()));
        }
        Self::new(r, c, rows.concat())
    }

    /// Normalizes a nonnegative matrix; returns the distribution and the
    /// total mass it was divided by.
    pub fn normalize(rows: usize, cols: usize, weights: &[f64]) -> Result<(Self, f64)> {
        if weights.len() != rows * cols {
            return Err(shape_err(format!("{rows}x{cols}"), weights.len()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("matrix is zero".into()));
        }
        let data = weights.iter().map(|w| w / total).collect();
        Ok((Self::new(rows, cols, data)?, total))
    }

    /// The product pmf `p ⊗ q`.
    pub fn product(p: &FiniteDist, q: &FiniteDist) -> Self {
        let data = outer(p.as_slice(), q.as_slice());
        Self {
            rows: p.len(),
            cols: q.len(),
            data,
            x_labels: p.labels.clone(),
            y_labels: q.labels.clone(),
        }
    }

    pub fn with_labels(
        mut self,
        x_labels: Option<Vec<String>>,
        y_labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if let Some(l) = &x_labels {
            if l.len() != self.rows {
                return Err(shape_err(self.rows, l.len()));
            }
        }
        if let Some(l) = &y_labels {
            if l.len() != self.cols {
                return Err(shape_err(self.cols, l.len()));
            }
        }
        self.x_labels = x_labels;
        self.y_labels = y_labels;
        Ok(self)
    }

    pub fn x_labels(&self) -> Option<&[String]> {
        self.x_labels.as_deref()
    }

    pub fn y_labels(&self) -> Option<&[String]> {
        self.y_labels.as_deref()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.cols + y]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.cols..(x + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn marginal_x(&self) -> FiniteDist {
        let probs = self.data.chunks(self.cols).map(|r| r.iter().sum()).collect();
        FiniteDist {
            probs,
            labels: self.x_labels.clone(),
        }
    }

    pub fn marginal_y(&self) -> FiniteDist {
        let mut probs = vec![0.0; self.cols];
        for row in self.data.chunks(self.cols) {
            for (acc, v) in probs.iter_mut().zip(row) {
                *acc += v;
            }
        }
        FiniteDist {
            probs,
            labels: self.y_labels.clone(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![0.0; self.data.len()];
        for x in 0..self.rows {
            for y in 0..self.cols {
                data[y * self.rows + x] = self.get(x, y);
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
            x_labels: self.y_labels.clone(),
            y_labels: self.x_labels.clone(),
        }
    }

    /// Support cells as `(x, y)` pairs in row-major order.
    pub fn support(&self) -> Vec<(usize, usize)> {
        support_of(&self.data)
            .into_iter()
            .map(|i| (i / self.cols, i % self.cols))
            .collect()
    }

    #[inline]
    pub fn in_support(&self, x: usize, y: usize) -> bool {
        self.get(x, y) > SUPPORT_EPS
    }
}

impl Pmf for JointDist {
    fn probs(&self) -> &[f64] {
        &self.data
    }
    fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
    fn with_probs(&self, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != self.data.len() {
            return Err(shape_err(self.data.len(), probs.len()));
        }
        check_masses(&probs)?;
        Ok(Self {
            data: probs,
            ..self.clone()
        })
    }
}

/// A row-stochastic conditional pmf `P_{B|A}`: one row per conditioning symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    rows: Vec<FiniteDist>,
}

impl Channel {
    pub fn new(rows: Vec<FiniteDist>) -> Result<Self> {
        let width = rows
            .first()
            .map(FiniteDist::len)
            .ok_or_else(|| Error::InvalidDistribution("channel without rows".into()))?;
        if let Some(r) = rows.iter().find(|r| r.len() != width) {
            return Err(shape_err(width, r.len()));
        }
        Ok(Self { rows })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| FiniteDist::new(r.clone()))
                .collect::<Result<_>>()?,
        )
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, a: usize) -> &FiniteDist {
        &self.rows[a]
    }

    pub fn rows(&self) -> &[FiniteDist] {
        &self.rows
    }
}

/// A Markov factorization `X – W – Y`: `(P_W, P_{X|W}, P_{Y|W})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pw: FiniteDist,
    px_given_w: Channel,
    py_given_w: Channel,
}

impl Decomposition {
    pub fn new(pw: FiniteDist, px_given_w: Channel, py_given_w: Channel) -> Result<Self> {
        if px_given_w.inputs() != pw.len() || py_given_w.inputs() != pw.len() {
            return Err(shape_err(
                format!("{} rows in each channel", pw.len()),
                format!("{} and {}", px_given_w.inputs(), py_given_w.inputs()),
            ));
        }
        Ok(Self {
            pw,
            px_given_w,
            py_given_w,
        })
    }

    /// As [`Decomposition::new`], additionally enforcing `|W| <= cap`.
    pub fn with_cap(
        pw: FiniteDist,
        px_given_w: Channel,
        py_given_w: Channel,
        cap: usize,
    ) -> Result<Self> {
        if pw.len() > cap {
            return Err(Error::Budget(format!("|W| = {} exceeds cap {cap}", pw.len())));
        }
        Self::new(pw, px_given_w, py_given_w)
    }

    /// `W = (X, Y)`: one point-mass component per support cell of `pi`.
    pub fn copy_of(pi: &JointDist) -> Self {
        let cells = pi.support();
        let pw = FiniteDist {
            probs: cells.iter().map(|&(x, y)| pi.get(x, y)).collect(),
            labels: None,
        };
        let total: f64 = pw.probs.iter().sum();
        let pw = FiniteDist {
            probs: pw.probs.iter().map(|p| p / total).collect(),
            labels: None,
        };
        let px = cells
            .iter()
            .map(|&(x, _)| FiniteDist::point_mass(pi.rows(), x).expect("in range"))
            .collect();
        let py = cells
            .iter()
            .map(|&(_, y)| FiniteDist::point_mass(pi.cols(), y).expect("in range"))
            .collect();
        Self {
            pw,
            px_given_w: Channel { rows: px },
            py_given_w: Channel { rows: py },
        }
    }

    pub fn pw(&self) -> &FiniteDist {
        &self.pw
    }

    pub fn px_given_w(&self) -> &Channel {
        &self.px_given_w
    }

    pub fn py_given_w(&self) -> &Channel {
        &self.py_given_w
    }

    pub fn w_card(&self) -> usize {
        self.pw.len()
    }

    pub fn x_card(&self) -> usize {
        self.px_given_w.outputs()
    }

    pub fn y_card(&self) -> usize {
        self.py_given_w.outputs()
    }

    /// Drops components whose weight is outside the support of `P_W`.
    pub fn pruned(&self) -> Self {
        let keep = self.pw.support();
        let total: f64 = keep.iter().map(|&w| self.pw.get(w)).sum();
        Self {
            pw: FiniteDist {
                probs: keep.iter().map(|&w| self.pw.get(w) / total).collect(),
                labels: None,
            },
            px_given_w: Channel {
                rows: keep.iter().map(|&w| self.px_given_w.row(w).clone()).collect(),
            },
            py_given_w: Channel {
                rows: keep.iter().map(|&w| self.py_given_w.row(w).clone()).collect(),
            },
        }
    }

    /// The `n`-fold i.i.d. decomposition of `π^n` with `W^n` in lexicographic order.
    pub fn product_lift(&self, n: usize, budget: usize) -> Result<Self> {
        let w = self.w_card();
        let cells = (self.x_card().pow(n as u32) * self.y_card().pow(n as u32))
            .saturating_mul(w.pow(n as u32));
        if n == 0 || cells > budget {
            return Err(Error::Budget(format!(
                "lifting decomposition to n={n} needs {cells} cells (budget {budget})"
            )));
        }
        let pw = FiniteDist {
            probs: power_vec(self.pw.as_slice(), n),
            labels: None,
        };
        let lift = |ch: &Channel| -> Channel {
            let words = w.pow(n as u32);
            let rows = (0..words)
                .map(|idx| {
                    let digits = digits_of(idx, w, n);
                    let mut acc = vec![1.0];
                    for d in digits {
                        acc = outer(&acc, ch.row(d).as_slice());
                    }
                    FiniteDist { probs: acc, labels: None }
                })
                .collect();
            Channel { rows }
        };
        Ok(Self {
            pw,
            px_given_w: lift(&self.px_given_w),
            py_given_w: lift(&self.py_given_w),
        })
    }
}

pub(crate) fn support_of(p: &[f64]) -> Vec<usize> {
    p.iter()
        .enumerate()
        .filter(|(_, v)| **v > SUPPORT_EPS)
        .map(|(i, _)| i)
        .collect()
}

pub(crate) fn outer(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &u in a {
        out.extend(b.iter().map(|&v| u * v));
    }
    out
}

/// Base-`base` digits of `idx`, most significant first, `len` digits.
pub(crate) fn digits_of(mut idx: usize, base: usize, len: usize) -> Vec<usize> {
    let mut d = vec![0; len];
    for slot in d.iter_mut().rev() {
        *slot = idx % base;
        idx /= base;
    }
    d
}

fn power_vec(p: &[f64], n: usize) -> Vec<f64> {
    (1..n).fold(p.to_vec(), |acc, _| outer(&acc, p))
}

pub(crate) fn entropy_of(p: &[f64]) -> f64 {
    let h: f64 = p
        .iter()
        .filter(|&&v| v > SUPPORT_EPS)
        .map(|&v| -v * v.ln())
        .sum();
    h.max(0.0)
}

/// Shannon entropy `-Σ p log p` over the support.
pub fn entropy<P: Pmf + ?Sized>(p: &P) -> f64 {
    entropy_of(p.probs())
}

pub(crate) fn renyi_entropy_of(p: &[f64], alpha: f64) -> f64 {
    let supp: Vec<f64> = p.iter().copied().filter(|&v| v > SUPPORT_EPS).collect();
    if supp.is_empty() {
        return 0.0;
    }
    if alpha == 1.0 {
        return entropy_of(p);
    }
    if alpha == f64::INFINITY {
        return -supp.iter().copied().fold(0.0, f64::max).ln();
    }
    if alpha == f64::NEG_INFINITY {
        return -supp.iter().copied().fold(f64::INFINITY, f64::min).ln();
    }
    if alpha == 0.0 {
        return (supp.len() as f64).ln();
    }
    // log Σ p^α via log-sum-exp to survive large |α|.
    let logs: Vec<f64> = supp.iter().map(|v| alpha * v.ln()).collect();
    log_sum_exp(&logs) / (1.0 - alpha)
}

/// Rényi entropy of order `alpha ∈ [−∞, ∞]` with the continuous extensions
/// at `−∞`, `0`, `1` and `∞`.
pub fn renyi_entropy<P: Pmf + ?Sized>(p: &P, alpha: f64) -> f64 {
    renyi_entropy_of(p.probs(), alpha)
}

pub(crate) fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

pub(crate) fn check_same_shape<P: Pmf + ?Sized, Q: Pmf + ?Sized>(p: &P, q: &Q) -> Result<()> {
    if p.shape() != q.shape() {
        return Err(shape_err(format!("{:?}", p.shape()), format!("{:?}", q.shape())));
    }
    Ok(())
}

/// `max_{supp p} p/q`, or `+∞` when `p` is not absolutely continuous w.r.t. `q`.
pub(crate) fn max_ratio(p: &[f64], q: &[f64]) -> f64 {
    let mut best = 0.0f64;
    for (&a, &b) in p.iter().zip(q) {
        if a > SUPPORT_EPS {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            best = best.max(a / b);
        }
    }
    best
}

pub(crate) fn renyi_divergence_of(p: &[f64], q: &[f64], order: f64) -> f64 {
    let pairs: Vec<(f64, f64)> = p
        .iter()
        .zip(q)
        .filter(|(a, _)| **a > SUPPORT_EPS)
        .map(|(&a, &b)| (a, b))
        .collect();
    let abs_continuous = pairs.iter().all(|&(_, b)| b > SUPPORT_EPS);
    if order == f64::INFINITY {
        return max_ratio(p, q).ln();
    }
    if order == 0.0 {
        let mass: f64 = pairs.iter().map(|&(_, b)| b).sum();
        return if mass > 0.0 { (-mass.ln()).max(0.0) } else { f64::INFINITY };
    }
    if order == 1.0 {
        if !abs_continuous {
            return f64::INFINITY;
        }
        let kl: f64 = pairs.iter().map(|&(a, b)| a * (a / b).ln()).sum();
        return kl.max(0.0);
    }
    if order > 1.0 && !abs_continuous {
        return f64::INFINITY;
    }
    let s = order - 1.0;
    let logs: Vec<f64> = pairs
        .iter()
        .filter(|&&(_, b)| b > 0.0)
        .map(|&(a, b)| order * a.ln() - s * b.ln())
        .collect();
    let lse = log_sum_exp(&logs);
    if lse == f64::NEG_INFINITY {
        // Only reachable for order < 1 with disjoint supports.
        return f64::INFINITY;
    }
    (lse / s).max(0.0)
}

/// Rényi divergence `D_order(p‖q)` for `order ∈ [0, ∞]`; order 1 is the
/// relative entropy and order ∞ is `log max p/q`.
pub fn renyi_divergence<P: Pmf + ?Sized>(p: &P, q: &P, order: f64) -> Result<f64> {
    check_same_shape(p, q)?;
    if order.is_nan() || order < 0.0 {
        return Err(Error::Domain(format!("divergence order {order} not in [0, ∞]")));
    }
    Ok(renyi_divergence_of(p.probs(), q.probs(), order))
}

/// Relative entropy.
pub fn kl_divergence<P: Pmf + ?Sized>(p: &P, q: &P) -> Result<f64> {
    renyi_divergence(p, q, 1.0)
}

/// Total variation distance `½ Σ |p − q|`.
pub fn tv_distance<P: Pmf + ?Sized>(p: &P, q: &P) -> Result<f64> {
    check_same_shape(p, q)?;
    Ok(tv_of(p.probs(), q.probs()))
}

pub(crate) fn tv_of(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// `I(X;Y) = H(X) + H(Y) − H(X,Y)`.
pub fn mutual_information(j: &JointDist) -> f64 {
    let i = entropy(&j.marginal_x()) + entropy(&j.marginal_y()) - entropy(j);
    if i < 0.0 && i > -1e-12 {
        0.0
    } else {
        i
    }
}

/// The joint pmf `Σ_w P_W(w) P_{X|W}(·|w) ⊗ P_{Y|W}(·|w)`.
pub fn synthesize(d: &Decomposition) -> JointDist {
    let (nx, ny) = (d.x_card(), d.y_card());
    let mut data = vec![0.0; nx * ny];
    for w in 0..d.w_card() {
        let pw = d.pw.get(w);
        if pw == 0.0 {
            continue;
        }
        let px = d.px_given_w.row(w).as_slice();
        let py = d.py_given_w.row(w).as_slice();
        for (x, &a) in px.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let wa = pw * a;
            let row = &mut data[x * ny..(x + 1) * ny];
            for (cell, &b) in row.iter_mut().zip(py) {
                *cell += wa * b;
            }
        }
    }
    JointDist {
        rows: nx,
        cols: ny,
        data,
        x_labels: None,
        y_labels: None,
    }
}

/// The i.i.d. product `π^n` over `(X^n, Y^n)`, lexicographic in both axes.
pub fn product_lift(j: &JointDist, n: usize) -> Result<JointDist> {
    product_lift_with_budget(j, n, DEFAULT_CELL_BUDGET)
}

pub fn product_lift_with_budget(j: &JointDist, n: usize, budget: usize) -> Result<JointDist> {
    if n == 0 {
        return Err(Error::Domain("blocklength must be positive".into()));
    }
    let rows = j.rows.checked_pow(n as u32);
    let cols = j.cols.checked_pow(n as u32);
    let cells = rows.zip(cols).and_then(|(r, c)| r.checked_mul(c));
    match cells {
        Some(c) if c <= budget => {}
        _ => {
            return Err(Error::Budget(format!(
                "{}^{n} x {}^{n} cells exceed budget {budget}",
                j.rows, j.cols
            )))
        }
    }
    let mut cur = j.clone();
    for _ in 1..n {
        cur = kron(&cur, j);
    }
    cur.x_labels = None;
    cur.y_labels = None;
    Ok(cur)
}

/// Kronecker product `a ⊗ b` as a joint over `(X_a X_b, Y_a Y_b)`.
pub(crate) fn kron(a: &JointDist, b: &JointDist) -> JointDist {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut data = vec![0.0; rows * cols];
    for xa in 0..a.rows {
        for xb in 0..b.rows {
            let r = xa * b.rows + xb;
            for ya in 0..a.cols {
                let va = a.get(xa, ya);
                for yb in 0..b.cols {
                    data[r * cols + ya * b.cols + yb] = va * b.get(xb, yb);
                }
            }
        }
    }
    JointDist {
        rows,
        cols,
        data,
        x_labels: None,
        y_labels: None,
    }
}
