//! The `ci` command line: argument definitions and command execution.
//! Every command renders its result to a string so output is byte-for-byte
//! reproducible for a fixed argv.

pub mod distfile;
pub mod format;

use std::fmt::Write as _;
use std::path::PathBuf;

use ci_core::bounds::{
    check_condition_star, common_entropy, g_alpha, g_infinity, gamma_lb, gamma_ub,
    is_pseudo_product, multiletter_gamma, nonneg_alpha_rank, wyner_ci, BoundReport, Options,
    Witness,
};
use ci_core::synthesis::median;
use ci_core::{
    dsbs_decomposition, dsbs_exact_ci, dsbs_wyner_ci, entropy, gaussian_exact_ub,
    gaussian_li_elgamal_ub, gaussian_wyner, mutual_information, renyi_divergence, renyi_entropy,
    run_covering_experiment, superblock_rate_check, tv_distance, Channel, CoveringConfig,
    Decomposition, Error, Exec, FiniteDist, JointDist,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use distfile::DistFile;
use format::{sig7, Unit};

/// Exact, ∞-Rényi and Wyner common information of finite bivariate sources.
#[derive(Debug, Parser)]
#[command(name = "ci", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// optimizer starts per round (and factorization restarts)
    #[arg(long, global = true, default_value_t = 64)]
    pub starts: usize,
    /// cap on the common alphabet size |W|
    #[arg(long, global = true)]
    pub wmax: Option<usize>,
    /// report information quantities in bits
    #[arg(long, global = true)]
    pub bits: bool,
    /// worker threads (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    GammaUb,
    GammaLb,
    Wyner,
    Multiletter,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// closed forms for the doubly symmetric binary source
    Dsbs {
        #[arg(long)]
        p: f64,
    },
    /// closed-form bounds for the bivariate Gaussian source
    Gaussian {
        #[arg(long)]
        rho: f64,
    },
    /// numerical common-information bounds of a distribution file
    Bounds {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "gamma-ub")]
        quantity: Quantity,
        /// blocklength for `--quantity multiletter`
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// marginal, joint and Rényi entropies and the mutual information
    Entropy {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// divergences between two distribution files of equal shape
    Divergence {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
    },
    /// min over product pmfs of D_inf(Q_X Q_Y || pi)
    GInfinity {
        #[arg(long)]
        input: PathBuf,
    },
    /// common (Rényi) entropy
    CommonEntropy {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// largest common alphabet searched (default |X||Y|)
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// nonnegative alpha-rank of a nonnegative matrix
    Rank {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
    },
    /// pseudo-product test and condition (*) on the optimized Wyner witness
    ConditionStar {
        #[arg(long)]
        input: PathBuf,
    },
    /// CSV of the DSBS closed forms over a crossover grid
    SweepDsbs {
        #[arg(long, default_value_t = 0.01)]
        pmin: f64,
        #[arg(long, default_value_t = 0.49)]
        pmax: f64,
        #[arg(long, default_value_t = 49)]
        steps: usize,
    },
    /// CSV of the Gaussian bounds over a correlation grid
    SweepGaussian {
        #[arg(long, default_value_t = 0.0)]
        rmin: f64,
        #[arg(long, default_value_t = 0.98)]
        rmax: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// truncated-codebook covering experiment on the DSBS
    Covering {
        #[arg(long, default_value_t = 0.375)]
        p: f64,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        /// code rates in nats per symbol
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        rate: Vec<f64>,
        /// number of codebooks per rate, seeded `seed, seed+1, ...`
        #[arg(long, default_value_t = 32)]
        seeds: u64,
        /// append per-rate medians after the rows
        #[arg(long)]
        medians: bool,
    },
    /// near-uniform superblock quantization of a common-variable pmf
    Superblock {
        /// pmf of W_k, comma separated
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        pw: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// R' in nats per source symbol
        #[arg(long)]
        rate: f64,
    },
}

/// A failure with its process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn budget(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_BUDGET,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Budget(_) | Error::Solver(_) => CliError::budget(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

/// Rendered output. `incomplete` asks for exit code 3 after the output is
/// written (an optimizer stopped before convergence).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub incomplete: bool,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Self {
            text,
            incomplete: false,
        }
    }
}

fn load(path: &PathBuf) -> Result<JointDist, CliError> {
    let loaded = DistFile::read(path)?.load()?;
    if loaded.scale != 1.0 {
        eprintln!("note: {} normalized by its total mass {}", path.display(), sig7(loaded.scale));
    }
    Ok(loaded.dist)
}

fn options(c: &Common) -> Options {
    let mut o = Options::default().with_seed(c.seed).with_starts(c.starts.max(1));
    o.wmax = c.wmax;
    o
}

fn grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|i| if i + 1 == steps { hi } else { lo + (hi - lo) * i as f64 / (steps - 1) as f64 })
            .collect(),
    }
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| sig7(*x)).collect::<Vec<_>>().join(",")
}

fn render_report(out: &mut String, r: &BoundReport, unit: Unit) {
    let _ = writeln!(out, "value={}", unit.info(r.value));
    let _ = writeln!(out, "kind={}", r.kind.as_str());
    let _ = writeln!(out, "converged={}", r.converged);
    let _ = writeln!(out, "starts_used={}", r.starts_used);
    if r.n != 1 {
        let _ = writeln!(out, "n={}", r.n);
        let _ = writeln!(out, "per_letter={}", unit.info(r.value / r.n as f64));
    }
    match &r.witness {
        Some(Witness::Decomposition(d)) => {
            let _ = writeln!(out, "w_card={}", d.pruned().w_card());
        }
        Some(Witness::ProductPair(qx, qy)) => {
            let _ = writeln!(out, "qx={}", list(qx.as_slice()));
            let _ = writeln!(out, "qy={}", list(qy.as_slice()));
        }
        None => {}
    }
    if let Some(c) = &r.caveat {
        let _ = writeln!(out, "caveat={c}");
    }
    let _ = writeln!(out, "unit={}", unit.name());
}

fn report_output(r: &BoundReport, unit: Unit) -> Output {
    let mut text = String::new();
    render_report(&mut text, r, unit);
    Output {
        text,
        incomplete: !r.converged,
    }
}

/// Runs one parsed command.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let c = &cli.common;
    let unit = Unit::from_flag(c.bits);
    let mut out = String::new();
    match &cli.command {
        Command::Dsbs { p } => {
            let exact = dsbs_exact_ci(*p)?;
            let wyner = dsbs_wyner_ci(*p)?;
            let _ = writeln!(out, "exact={}", unit.info(exact));
            let _ = writeln!(out, "wyner={}", unit.info(wyner));
            let _ = writeln!(out, "gap={}", unit.info(exact - wyner));
            let _ = writeln!(out, "unit={}", unit.name());
        }
        Command::Gaussian { rho } => {
            let _ = writeln!(out, "wyner={}", unit.info(gaussian_wyner(*rho)?));
            let _ = writeln!(out, "exact_ub={}", unit.info(gaussian_exact_ub(*rho)?));
            let _ = writeln!(out, "li_elgamal={}", unit.info(gaussian_li_elgamal_ub(*rho)?));
            let _ = writeln!(out, "unit={}", unit.name());
        }
        Command::Bounds { input, quantity, n } => {
            let pi = load(input)?;
            let opts = options(c);
            let r = match quantity {
                Quantity::GammaUb => gamma_ub(&pi, &opts)?,
                Quantity::GammaLb => gamma_lb(&pi, &opts)?,
                Quantity::Wyner => wyner_ci(&pi, &opts)?,
                Quantity::Multiletter => multiletter_gamma(&pi, *n, &opts)?,
            };
            return Ok(report_output(&r, unit));
        }
        Command::Entropy { input, alpha } => {
            let pi = load(input)?;
            let _ = writeln!(out, "h_x={}", unit.info(entropy(&pi.marginal_x())));
            let _ = writeln!(out, "h_y={}", unit.info(entropy(&pi.marginal_y())));
            let _ = writeln!(out, "h_xy={}", unit.info(entropy(&pi)));
            let _ = writeln!(out, "mutual_information={}", unit.info(mutual_information(&pi)));
            if let Some(a) = alpha {
                if a.is_nan() || *a < 0.0 {
                    return Err(CliError::input(format!("--alpha {a} must be in [0, inf]")));
                }
                let _ = writeln!(out, "renyi_xy={}", unit.info(renyi_entropy(&pi, *a)));
            }
            let _ = writeln!(out, "unit={}", unit.name());
        }
        Command::Divergence { input, reference, alpha } => {
            let p = load(input)?;
            let q = load(reference)?;
            let _ = writeln!(out, "kl={}", unit.info(renyi_divergence(&p, &q, 1.0)?));
            let _ = writeln!(out, "renyi={}", unit.info(renyi_divergence(&p, &q, *alpha)?));
            let _ = writeln!(out, "d_inf={}", unit.info(renyi_divergence(&p, &q, f64::INFINITY)?));
            let _ = writeln!(out, "tv={}", sig7(tv_distance(&p, &q)?));
            let _ = writeln!(out, "unit={}", unit.name());
        }
        Command::GInfinity { input } => {
            return Ok(report_output(&g_infinity(&load(input)?)?, unit));
        }
        Command::CommonEntropy { input, alpha, kmax } => {
            let pi = load(input)?;
            let kmax = kmax.unwrap_or(pi.rows() * pi.cols());
            let opts = options(c);
            let r = if *alpha == 1.0 {
                common_entropy(&pi, kmax, &opts)?
            } else {
                g_alpha(&pi, *alpha, kmax, &opts)?
            };
            return Ok(report_output(&r, unit));
        }
        Command::Rank { input, alpha } => {
            let f = DistFile::read(input)?;
            let r = nonneg_alpha_rank(&f.matrix, *alpha, &options(c))?;
            // the rank itself is a count, never rescaled
            let _ = writeln!(out, "rank={}", sig7(r.value));
            let _ = writeln!(out, "kind={}", r.kind.as_str());
            let _ = writeln!(out, "converged={}", r.converged);
            return Ok(Output {
                text: out,
                incomplete: !r.converged,
            });
        }
        Command::ConditionStar { input } => {
            let pi = load(input)?;
            let pp = is_pseudo_product(&pi);
            let _ = writeln!(out, "pseudo_product={}", pp.holds);
            let _ = writeln!(out, "pseudo_product_defect={}", sig7(pp.max_defect));
            let opts = options(c);
            let wy = wyner_ci(&pi, &opts)?;
            let ub = gamma_ub(&pi, &opts)?;
            let d = wy.decomposition().ok_or_else(|| CliError::budget("no Wyner witness found"))?;
            let cs = check_condition_star(&pi, d)?;
            let _ = writeln!(out, "condition_star_on_witness={}", cs.holds);
            let _ = writeln!(out, "condition_star_max_error={}", sig7(cs.max_error));
            if let Some(w) = cs.first_violation {
                let _ = writeln!(out, "first_violation={w}");
            }
            let _ = writeln!(out, "wyner={}", unit.info(wy.value));
            let _ = writeln!(out, "gamma_ub={}", unit.info(ub.value));
            let _ = writeln!(out, "difference={}", unit.info(ub.value - wy.value));
            let _ = writeln!(out, "unit={}", unit.name());
            return Ok(Output {
                text: out,
                incomplete: !(wy.converged && ub.converged),
            });
        }
        Command::SweepDsbs { pmin, pmax, steps } => {
            if !(0.0 < *pmin && pmin < pmax && *pmax < 0.5) {
                return Err(CliError::input(format!(
                    "need 0 < pmin < pmax < 0.5, got pmin={pmin}, pmax={pmax}"
                )));
            }
            let _ = writeln!(out, "p,exact_ci,wyner_ci");
            for p in grid(*pmin, *pmax, *steps) {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    sig7(p),
                    unit.info(dsbs_exact_ci(p)?),
                    unit.info(dsbs_wyner_ci(p)?)
                );
            }
        }
        Command::SweepGaussian { rmin, rmax, steps } => {
            if !(0.0 <= *rmin && rmin < rmax && *rmax < 1.0) {
                return Err(CliError::input(format!(
                    "need 0 <= rmin < rmax < 1, got rmin={rmin}, rmax={rmax}"
                )));
            }
            let _ = writeln!(out, "rho,wyner,exact_ub,li_elgamal");
            for rho in grid(*rmin, *rmax, *steps) {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    sig7(rho),
                    unit.info(gaussian_wyner(rho)?),
                    unit.info(gaussian_exact_ub(rho)?),
                    unit.info(gaussian_li_elgamal_ub(rho)?)
                );
            }
        }
        Command::Covering { p, n, eps, rate, seeds, medians } => {
            let cfg = CoveringConfig {
                decomp: dsbs_decomposition(*p)?,
                n: *n,
                eps: *eps,
                rates: rate.clone(),
                seeds: (0..*seeds).map(|i| c.seed.wrapping_add(i)).collect(),
                exec: Exec::default(),
            };
            let rows = run_covering_experiment(&cfg)?;
            let _ = writeln!(out, "rate,seed,d_inf,realized_rate");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    sig7(r.rate),
                    r.seed,
                    unit.info(r.d_inf),
                    unit.info(r.realized_rate)
                );
            }
            if *medians {
                let _ = writeln!(out, "rate,median_d_inf");
                for &r in rate {
                    let v: Vec<f64> = rows.iter().filter(|row| row.rate == r).map(|row| row.d_inf).collect();
                    if let Some(m) = median(&v) {
                        let _ = writeln!(out, "{},{}", sig7(r), unit.info(m));
                    }
                }
            }
        }
        Command::Superblock { pw, k, n, eps, rate } => {
            let pw = FiniteDist::new(pw.clone())?;
            let kw = pw.len();
            let id = Channel::new((0..kw).map(|i| FiniteDist::point_mass(kw, i)).collect::<Result<_, _>>()?)?;
            let d = Decomposition::new(pw, id.clone(), id)?;
            let r = superblock_rate_check(&d, *k, *n, *eps, *rate)?;
            let _ = writeln!(out, "m={}", r.m);
            let _ = writeln!(out, "realized_rate={}", unit.info(r.realized_rate));
            let _ = writeln!(out, "entropy={}", unit.info(r.entropy));
            let _ = writeln!(out, "typical_mass={}", sig7(r.typical_mass));
            let _ = writeln!(out, "measured={}", unit.info(r.measured));
            let _ = writeln!(out, "bound={}", unit.info(r.bound));
            let _ = writeln!(out, "within_bound={}", r.measured <= r.bound);
            let _ = writeln!(out, "measured_vs_iid={}", unit.info(r.measured_vs_iid));
            let _ = writeln!(out, "max_cell_error={}", sig7(r.max_cell_error));
            let _ = writeln!(out, "unit={}", unit.name());
        }
    }
    Ok(out.into())
}
