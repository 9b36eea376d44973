//! The requesting model: player 1 demands a payment `r` in exchange for
//! exiting the conflict; a rejecting player 2 triggers the auction.
//!
//! Rejection sets are now lower intervals `[v2_lo, alpha2(r)]`: paying the
//! request is worthless to types below it. Under a point-mass belief `v1`,
//! a partial rejection pins the continuation's highest bid to `r` through
//! the indifference of the boundary type, which yields the zero-atom value
//! `c2 = 1 - r/v1` and the threshold equation
//!
//! ```text
//! v1 * ∫_{c2}^{1} ds / Ψ^{-1}(s | alpha2) = 1
//! ```
//!
//! where `Ψ(·|x)` conditions player 2's prior on `v2 <= x`. The integral is
//! monotone in `alpha2`, so the root is unique when it exists; otherwise the
//! reply is full rejection (the unconditioned auction) or, for requests at
//! or below `v2_lo`, full acceptance. Ties are resolved by
//! accept-when-indifferent, so `r = v2_lo` is accepted by every type.

use crate::auction::{self, AuctionEq, Player};
use crate::bribing::Scenario;
use crate::dist::{Dist, ExtReal};
use crate::math;
use crate::{Error, Result};
use alloc::vec::Vec;

const EQ_TOL: f64 = 1e-9;

/// Default tolerance on the knife-edge payoff equality required for a
/// robust peaceful equilibrium to exist.
pub const DEFAULT_COND_C_TOL: f64 = 1e-6;

/// Grid size for the request search before golden-section refinement.
const REQUEST_GRID: usize = 1000;

/// Player 2's consistent reply to an off-path request under a point-mass
/// belief about player 1.
#[derive(Debug, Clone)]
pub enum RequestReply {
    FullAcceptance,
    Partial { alpha2: f64, continuation: AuctionEq },
    FullRejection { continuation: AuctionEq },
}

impl RequestReply {
    /// Highest rejecting type mapped onto the support: `v2_lo` for full
    /// acceptance, `v2_hi` for full rejection.
    pub fn alpha2_clamped(&self, f2: &Dist) -> f64 {
        match self {
            RequestReply::FullAcceptance => f2.support_lo(),
            RequestReply::Partial { alpha2, .. } => *alpha2,
            RequestReply::FullRejection { .. } => f2.support_hi(),
        }
    }

    pub fn continuation(&self) -> Option<&AuctionEq> {
        match self {
            RequestReply::FullAcceptance => None,
            RequestReply::Partial { continuation, .. }
            | RequestReply::FullRejection { continuation } => Some(continuation),
        }
    }
}

/// Consistent reply to the request `r` under the belief that player 1's
/// type is `belief_v1`.
pub fn request_rejection_threshold(r: f64, belief_v1: f64, f2: &Dist) -> Result<RequestReply> {
    if r < 0.0 {
        return Err(Error::Precondition("request must be nonnegative"));
    }
    if !(belief_v1 > 0.0) {
        return Err(Error::Precondition("belief about player 1 must be positive"));
    }
    let v2_lo = f2.support_lo();
    let v2_hi = f2.support_hi();
    if r > belief_v1 {
        // paying more than the believed opponent type is never needed: the
        // zero-atom clamp forces full rejection
        let continuation = auction::solve_one_sided(belief_v1, f2, Player::One)?;
        return Ok(RequestReply::FullRejection { continuation });
    }
    if r <= v2_lo {
        return Ok(RequestReply::FullAcceptance);
    }
    let c2 = 1.0 - r / belief_v1;
    // g(alpha) = v1 * ∫_{c2}^1 (Ψ^{-1}(s|alpha))^{-1} ds - 1, decreasing in
    // alpha; positive at the bottom of the support since r > v2_lo
    let g = |alpha: f64| -> Result<f64> {
        let trunc = f2.truncate_above(alpha)?;
        Ok(match trunc.recip_quantile_integral(c2, 1.0)? {
            ExtReal::Infinite => f64::INFINITY,
            ExtReal::Finite(i) => belief_v1 * i - 1.0,
        })
    };
    if g(v2_hi)? >= 0.0 {
        let continuation = auction::solve_one_sided(belief_v1, f2, Player::One)?;
        return Ok(RequestReply::FullRejection { continuation });
    }
    // the bottom bracket stays a hair above v2_lo so the truncation keeps
    // positive mass
    let span = v2_hi - v2_lo;
    let mut lo = v2_lo + span * 1e-12;
    let mut hi = v2_hi;
    for _ in 0..90 {
        if hi - lo <= 1e-11 * (1.0 + v2_hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha2 = 0.5 * (lo + hi);
    let continuation = auction::solve_one_sided(belief_v1, &f2.truncate_above(alpha2)?, Player::One)?;
    Ok(RequestReply::Partial { alpha2, continuation })
}

/// Expected payoff of a player-1 type `v1` from the off-path request `r`
/// under the belief `δ_{v1}`: the acceptance share pays `r`, the rejection
/// share pays the continuation value `v1 - x_sigma`.
pub fn request_payoff(r: f64, v1: f64, f2: &Dist) -> Result<f64> {
    Ok(match request_rejection_threshold(r, v1, f2)? {
        RequestReply::FullAcceptance => r,
        RequestReply::Partial { alpha2, .. } => {
            let f = f2.cdf(alpha2);
            // partial rejection pins x_sigma = r
            f * (v1 - r) + (1.0 - f) * r
        }
        RequestReply::FullRejection { continuation } => v1 - continuation.x_sigma,
    })
}

/// Maximizes the top type's request payoff over `[v2_lo, x_sigma*]`, where
/// `x_sigma*` is the highest bid of the full-rejection auction against the
/// belief `δ_{v1_bar}`. Endpoints are included.
pub fn optimal_request(v1_bar: f64, f2: &Dist) -> Result<(f64, f64)> {
    let v2_lo = f2.support_lo();
    if !(v2_lo < v1_bar && v1_bar <= 2.0 * v2_lo + EQ_TOL) {
        return Err(Error::Precondition(
            "optimal request requires v2_lo < v1_bar <= 2 v2_lo",
        ));
    }
    let x_star = auction::solve_one_sided(v1_bar, f2, Player::One)?.x_sigma;
    if x_star <= v2_lo + EQ_TOL {
        return Ok((v2_lo, request_payoff(v2_lo, v1_bar, f2)?));
    }
    let payoff = |r: f64| request_payoff(r, v1_bar, f2);
    let n = REQUEST_GRID;
    let mut vals = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let r = v2_lo + (x_star - v2_lo) * k as f64 / n as f64;
        vals.push(payoff(r)?);
    }
    let mut order: Vec<usize> = (0..=n).collect();
    order.sort_by(|&a, &b| {
        vals[b]
            .partial_cmp(&vals[a])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let step = (x_star - v2_lo) / n as f64;
    let mut best_r = v2_lo;
    let mut best_v = f64::NEG_INFINITY;
    for &k in order.iter().take(3) {
        if vals[k] > best_v {
            best_v = vals[k];
            best_r = v2_lo + step * k as f64;
        }
        let lo = v2_lo + step * k.saturating_sub(1) as f64;
        let hi = v2_lo + step * (k + 1).min(n) as f64;
        let (r, v) = math::golden_max(|r| payoff(r).unwrap_or(f64::NEG_INFINITY), lo, hi, 1e-7);
        if v > best_v {
            best_v = v;
            best_r = r;
        }
    }
    Ok((best_r, best_v))
}

/// The two security tests of the requesting model.
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityConditions {
    /// `v2_lo * c1 = 0` where `c1` is player 1's atom against the belief
    /// that the rejecting player 2 is her highest type.
    pub player2_ok: bool,
    /// Whether the extra spread test applies (`v1_lo <= v2_lo`).
    pub gap_required: bool,
    /// `v1_hi - v1_lo <= v2_lo`, meaningful only when required.
    pub gap_ok: bool,
}

/// Certificate for existence and security of robust peaceful equilibria.
#[derive(Debug, Clone)]
pub struct RequestReport {
    /// `v2_lo < v1_hi <= 2 v2_lo`.
    pub cond_a: bool,
    /// `v2_lo * c1 = 0` against the lowest rejection belief.
    pub cond_b: bool,
    /// `|v2_lo - max_r payoff(r)|`; `None` when `cond_a` fails and the
    /// maximization domain is undefined.
    pub cond_c_residual: Option<f64>,
    /// Tolerance applied to the knife-edge equality.
    pub cond_c_tol: f64,
    pub exists: bool,
    /// The unique on-path request when an equilibrium exists: `v2_lo`.
    pub r_bar: f64,
    /// Argmax of the top type's off-path request payoff.
    pub r_star: Option<f64>,
    /// Highest bid of the full-rejection auction against `δ_{v1_hi}`.
    pub x_sigma_star: f64,
    pub securable: Option<bool>,
    pub security: Option<SecurityConditions>,
}

/// Existence test with the default knife-edge tolerance.
pub fn robust_peaceful_exists(s: &Scenario) -> Result<RequestReport> {
    robust_peaceful_exists_with_tol(s, DEFAULT_COND_C_TOL)
}

/// Existence of a robust peaceful equilibrium: support condition, zero
/// rejection payoff for the lowest type, and the knife-edge payoff equality
/// whose residual is reported alongside the verdict.
pub fn robust_peaceful_exists_with_tol(s: &Scenario, tol: f64) -> Result<RequestReport> {
    let v1_hi = s.v1_hi();
    let v2_lo = s.v2_lo();
    let cond_a = v2_lo < v1_hi && v1_hi <= 2.0 * v2_lo + EQ_TOL;
    let cond_b = if v2_lo == 0.0 {
        // zero factor: the product condition holds vacuously (cond_a is
        // necessarily false then, so this never certifies existence)
        true
    } else {
        v2_lo * auction::threshold_c(v2_lo, &s.f1)? <= EQ_TOL
    };
    let x_sigma_star = auction::solve_one_sided(v1_hi, &s.f2, Player::One)?.x_sigma;
    let (r_star, cond_c_residual) = if cond_a {
        let (r, p) = optimal_request(v1_hi, &s.f2)?;
        (Some(r), Some((p - v2_lo).abs()))
    } else {
        (None, None)
    };
    let exists = cond_a && cond_b && cond_c_residual.is_some_and(|res| res <= tol);
    Ok(RequestReport {
        cond_a,
        cond_b,
        cond_c_residual,
        cond_c_tol: tol,
        exists,
        r_bar: v2_lo,
        r_star,
        x_sigma_star,
        securable: None,
        security: None,
    })
}

/// Fills the security verdict of an existence report.
///
/// With `v1_lo > v2_lo` security is equivalent to the player-2 test alone;
/// otherwise the prior spread must also satisfy `v1_hi - v1_lo <= v2_lo`.
pub fn request_security(s: &Scenario, report: &RequestReport) -> Result<RequestReport> {
    if !report.exists {
        return Err(Error::Precondition(
            "security is defined only when a robust peaceful equilibrium exists",
        ));
    }
    let v2_lo = s.v2_lo();
    let player2_ok = if v2_lo == 0.0 {
        true
    } else {
        v2_lo * auction::threshold_c(s.v2_hi(), &s.f1)? <= EQ_TOL
    };
    let gap_required = s.v1_lo() <= v2_lo;
    let gap_ok = s.v1_hi() - s.v1_lo() <= v2_lo + EQ_TOL;
    let securable = player2_ok && (!gap_required || gap_ok);
    let mut out = report.clone();
    out.securable = Some(securable);
    out.security = Some(SecurityConditions {
        player2_ok,
        gap_required,
        gap_ok,
    });
    Ok(out)
}
