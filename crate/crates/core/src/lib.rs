//! Exact, ∞-Rényi and Wyner common information of finite bivariate sources.
//!
//! All logarithms are natural (nats). `f64::INFINITY` stands for an infinite
//! divergence or cross-entropy and is never replaced by NaN.

pub mod dist;
pub mod bounds;
pub mod closed_forms;
pub mod error;
mod lp;
pub mod par;
pub mod synthesis;
pub mod transport;

pub use dist::{
    entropy, kl_divergence, mutual_information, product_lift, product_lift_with_budget,
    renyi_divergence, renyi_entropy, synthesize, tv_distance, Channel, Decomposition, FiniteDist,
    JointDist, Pmf,
};
pub use closed_forms::{
    dsbs_decomposition, dsbs_exact_ci, dsbs_joint, dsbs_wyner_ci, gaussian_exact_ub,
    gaussian_li_elgamal_ub, gaussian_wyner, DsbsParams,
};
pub use error::{Error, Result};
pub use par::Exec;
pub use synthesis::{
    build_truncated_codebook, covering_dinf, exact_synthesis_rate, is_strongly_typical,
    mixture_lambda, mixture_split, run_covering_experiment, superblock_rate_check,
    synthesized_dist, Codebook, CoveringConfig, CoveringRow, SplitCode, SuperblockReport,
};
pub use transport::{
    max_cross_entropy, min_expected_cross_entropy, solve_transport, Sense, TransportPlan,
};
