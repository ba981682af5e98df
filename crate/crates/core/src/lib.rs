//! Numerical library for robust principal-agent contracting.
//!
//! An agent evaluates contracts with an average-robust-control (ARC)
//! criterion: within each model of a communicated roadmap he applies a
//! multiplier (entropic) robustness adjustment with intensity `lambda`, then
//! averages across models under a trusted prior. This crate implements that
//! valuation engine and everything built on top of it:
//!
//! - [`entropic`]: certainty equivalents, worst-case tilted beliefs, ARC
//!   values, effective beliefs, and KL distortion costs, including the
//!   `lambda in {0, +inf}` endpoints.
//! - [`wage`]: the wage map `h = u^{-1}` and its inverse.
//! - [`static_contract`]: the one-shot wage-minimization problem with IR/IC
//!   constraints, plus comparative statics in `lambda` and in second-order
//!   dispersion of the prior.
//! - [`dynamics_state`]: two-period state evolution (Bayes posterior and
//!   log-likelihood-ratio intensity updates), the incentive gap and incentive
//!   capacity, and breakthrough-trap detection.
//! - [`dynamic_contract`]: the two-period contracting game solved by plan
//!   enumeration.
//! - [`interventions`]: coarse feedback design, screening at hiring, and
//!   post-success turnover.
//! - [`longrun`]: infinite-horizon path simulation, LLR statistics,
//!   truncated value recursions with contraction bounds, and the long-run
//!   innovation speed limit.
//! - [`extensions`]: endogenous roadmap design, three-outcome diagnostic
//!   milestones, and shirking-adjusted capacity.

pub mod dynamic_contract;
pub mod dynamics_state;
pub mod entropic;
pub mod error;
pub mod extensions;
pub mod interventions;
pub mod longrun;
pub mod opt;
pub mod rng;
pub mod static_contract;
pub mod wage;

pub use error::CoreError;
