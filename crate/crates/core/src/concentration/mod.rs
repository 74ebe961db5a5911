//! Suprema of centered PPP integrals: function classes, Monte-Carlo draws of
//! `Z = sup_s S_n(s)`, closed-form tail and log-Laplace bounds, and a verifier
//! comparing the two.

pub mod bounds;
pub mod class;
pub mod montecarlo;
pub mod verify;

pub use bounds::*;
pub use class::{centered_integral, wimpy_variance, FunctionClass, FunctionSpec};
pub use montecarlo::{mc_member_values, mc_sup_samples, sn_statistic, ZSamples};
pub use verify::{mgf_check, variance_check, verify_tails, ConcParams, Flag, MgfRow, TailReport};
