//! Equilibrium computations for two-player all-pay auctions preceded by a
//! take-it-or-leave-it bribe or request.
//!
//! The crate covers five building blocks:
//!
//! * [`dist`]: piecewise-polynomial type distributions on bounded supports,
//!   with quantiles, conditional truncations and the reciprocal-quantile
//!   integrals that drive every equilibrium formula.
//! * [`auction`]: Bayesian Nash equilibria of the continuation auction:
//!   closed forms under one-sided complete information and an ODE shooting
//!   solver for two continuous priors.
//! * [`bribing`]: rejection thresholds for off-path bribes, the optimal
//!   deviation bribe, the peace-implementability test, the security
//!   impossibility witness, and a verifier for two-bribe candidates.
//! * [`requesting`]: the mirrored model where the informed player demands a
//!   payment: rejection thresholds, the optimal off-path request, existence
//!   of robust peaceful equilibria, and peace security.
//! * [`oracle`]: brute-force validation via discretized games solved by
//!   fictitious play and grid re-derivations of thresholds.
//!
//! All computations are pure functions of immutable inputs and are safe to
//! call concurrently. The crate is `no_std` (with `alloc`); IO, file formats
//! and the command-line front end live in the companion `allpay-cli` crate.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` guards reject NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod auction;
pub mod bribing;
pub mod dist;
mod error;
mod math;
pub mod oracle;
pub mod requesting;

pub use auction::{
    payoff_sup, secret_best_response, solve, solve_one_sided, solve_two_sided, threshold_c,
    AuctionEq, Belief, BidCurve, Player,
};
pub use bribing::{
    deviation_payoff, implementability, lowest_type_deviation_payoff, optimal_bribe,
    rejection_threshold, security_witness, verify_two_bribe_candidate, ImplementabilityReport,
    RejectionReply, Scenario, SecurityWitness, TwoBribeVerdict,
};
pub use dist::{Dist, ExtReal, Piece};
pub use error::{Error, Result};
pub use requesting::{
    optimal_request, request_rejection_threshold, request_security, robust_peaceful_exists,
    robust_peaceful_exists_with_tol, RequestReply, RequestReport, SecurityConditions,
};
