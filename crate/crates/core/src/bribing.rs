//! The bribing model: player 1 may offer a take-it-or-leave-it payment
//! before the auction; acceptance ends the game peacefully.
//!
//! Off-path bribes are evaluated under the extreme point-mass belief about
//! player 1 that the equilibrium analysis singles out: the lowest type
//! minimizes the rejection threshold, the highest type maximizes it. The
//! exported operations compute player 2's consistent reply to a bribe, the
//! deviating payoff of player 1's types, the optimal deviation bribe, the
//! peace-implementability certificate, the impossibility witness for peace
//! security, and a residual-based verifier for two-bribe candidates.

use crate::auction::{self, AuctionEq, Player};
use crate::dist::{Dist, ExtReal};
use crate::math;
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// Slack applied to conditions that are equalities or weak inequalities in
/// the theory.
const EQ_TOL: f64 = 1e-9;

/// Grid size for the bribe search before golden-section refinement.
const BRIBE_GRID: usize = 1000;

/// A pair of independent priors for the two players.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub f1: Dist,
    pub f2: Dist,
}

impl Scenario {
    pub fn new(f1: Dist, f2: Dist) -> Scenario {
        Scenario { f1, f2 }
    }

    pub fn v1_lo(&self) -> f64 {
        self.f1.support_lo()
    }

    pub fn v1_hi(&self) -> f64 {
        self.f1.support_hi()
    }

    pub fn v2_lo(&self) -> f64 {
        self.f2.support_lo()
    }

    pub fn v2_hi(&self) -> f64 {
        self.f2.support_hi()
    }
}

/// Player 2's consistent reply to an off-path bribe under a point-mass
/// belief about player 1.
///
/// Rejection sets are upper intervals `[a2, v2_hi]`; full acceptance is a
/// distinct variant rather than `a2 = v2_hi`, so "rejected with probability
/// zero" stays unambiguous.
#[derive(Debug, Clone)]
pub enum RejectionReply {
    FullAcceptance,
    Interval { a2: f64, continuation: AuctionEq },
}

impl RejectionReply {
    /// Probability that the bribe is accepted, i.e. `F2(a2)`.
    pub fn acceptance_probability(&self, f2: &Dist) -> f64 {
        match self {
            RejectionReply::FullAcceptance => 1.0,
            RejectionReply::Interval { a2, .. } => f2.cdf(*a2),
        }
    }

    pub fn a2(&self) -> Option<f64> {
        match self {
            RejectionReply::FullAcceptance => None,
            RejectionReply::Interval { a2, .. } => Some(*a2),
        }
    }
}

/// Lowest rejecting type for bribe `b` when player 2 believes player 1's
/// type is `belief_v1`.
///
/// The rejection set is empty iff `b > v2_hi - belief_v1`. At an interior
/// threshold, type `a2` is indifferent: `1 - b/a2 = belief_v1 * I2(a2)`
/// with the left side increasing and the right side decreasing in `a2`, so
/// the root is unique and bracketed bisection finds it. When even the
/// lowest type strictly prefers rejecting (`1 - b/v2_lo` above the right
/// side), the threshold sits at the bottom of the support.
pub fn rejection_threshold(b: f64, belief_v1: f64, f2: &Dist) -> Result<RejectionReply> {
    if b < 0.0 {
        return Err(Error::Precondition("bribe must be nonnegative"));
    }
    if !(belief_v1 > 0.0) {
        return Err(Error::Precondition("belief about player 1 must be positive"));
    }
    let lo = f2.support_lo();
    let hi = f2.support_hi();
    if b >= hi - belief_v1 - EQ_TOL {
        return Ok(RejectionReply::FullAcceptance);
    }
    // ratio b/a with the 0/0 corner read as 0
    let ratio = |a: f64| -> f64 {
        if b == 0.0 {
            0.0
        } else if a <= 0.0 {
            f64::INFINITY
        } else {
            b / a
        }
    };
    // g(a) = belief * I2(a) - (1 - b/a): positive at the bottom, negative at
    // the top whenever an interior root exists
    let g = |a: f64| -> Result<f64> {
        Ok(match f2.tail_recip_integral(a)? {
            ExtReal::Infinite => f64::INFINITY,
            ExtReal::Finite(i) => belief_v1 * i - (1.0 - ratio(a)),
        })
    };
    let corner = match f2.tail_recip_integral(lo)? {
        ExtReal::Infinite => false,
        ExtReal::Finite(i) => 1.0 - ratio(lo) > belief_v1 * i,
    };
    let a2 = if corner {
        lo
    } else {
        let mut a_lo = lo;
        let mut a_hi = hi - (hi - lo) * 1e-9;
        if !(g(a_hi)? <= 0.0) {
            // no interior crossing: rejection only at the very top, which is
            // a zero-probability event
            return Ok(RejectionReply::FullAcceptance);
        }
        for _ in 0..90 {
            if a_hi - a_lo <= 1e-11 * (1.0 + hi) {
                break;
            }
            let mid = 0.5 * (a_lo + a_hi);
            if g(mid)? > 0.0 {
                a_lo = mid;
            } else {
                a_hi = mid;
            }
        }
        0.5 * (a_lo + a_hi)
    };
    let continuation = auction::solve_one_sided(belief_v1, &f2.truncate_below(a2)?, Player::One)?;
    Ok(RejectionReply::Interval { a2, continuation })
}

/// Deviation payoff of player 1's lowest type from offering `b`:
/// `F2(a2(b)) * (v1_lo - b)` under the belief that minimizes it.
///
/// A zero-valuation lowest type has no continuation auction to induce; the
/// threshold degenerates to `a2 = b` (exactly the types who would lose by
/// paying more than their valuation reject) and the payoff to `-b F2(b)`.
pub fn lowest_type_deviation_payoff(b: f64, s: &Scenario) -> Result<f64> {
    if b < 0.0 {
        return Err(Error::Precondition("bribe must be nonnegative"));
    }
    if s.v1_lo() == 0.0 {
        return Ok(-b * s.f2.cdf(b));
    }
    let reply = rejection_threshold(b, s.v1_lo(), &s.f2)?;
    Ok(reply.acceptance_probability(&s.f2) * (s.v1_lo() - b))
}

/// Deviation payoff of type `v1` from offering `b` under the belief that
/// player 1 is the lowest type.
///
/// The acceptance branch pays `v1 - b`; the rejection branch pays the
/// secret-bidding value against the continuation built on the wrong belief.
pub fn deviation_payoff(v1: f64, b: f64, s: &Scenario) -> Result<f64> {
    if v1 < s.v1_lo() - EQ_TOL || v1 > s.v1_hi() + EQ_TOL {
        return Err(Error::Precondition("type outside player 1's support"));
    }
    match rejection_threshold(b, s.v1_lo(), &s.f2)? {
        RejectionReply::FullAcceptance => Ok(v1 - b),
        RejectionReply::Interval { a2, continuation } => {
            let accept = s.f2.cdf(a2);
            let (_, secret) =
                auction::secret_best_response(v1, &continuation, s.v1_lo(), Player::One);
            Ok(accept * (v1 - b) + (1.0 - accept) * secret)
        }
    }
}

/// Maximizes the lowest type's deviation payoff over bribes in
/// `[0, max(0, v2_hi - v1_lo)]`.
///
/// Dense grid scan followed by golden-section refinement of the top three
/// grid cells; grid order breaks ties, which keeps the result deterministic
/// when several stationary points compete.
pub fn optimal_bribe(s: &Scenario) -> Result<(f64, f64)> {
    if s.v1_lo() == 0.0 {
        // every positive bribe costs the zero type more than acceptance is
        // worth to him
        return Ok((0.0, 0.0));
    }
    let b_max = (s.v2_hi() - s.v1_lo()).max(0.0);
    if b_max == 0.0 {
        return Ok((0.0, lowest_type_deviation_payoff(0.0, s)?));
    }
    let payoff = |b: f64| lowest_type_deviation_payoff(b, s);
    let n = BRIBE_GRID;
    let mut vals = Vec::with_capacity(n + 1);
    for k in 0..=n {
        vals.push(payoff(b_max * k as f64 / n as f64)?);
    }
    let mut order: Vec<usize> = (0..=n).collect();
    order.sort_by(|&a, &b| {
        vals[b]
            .partial_cmp(&vals[a])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut best_b = 0.0;
    let mut best_v = f64::NEG_INFINITY;
    for &k in order.iter().take(3) {
        let lo = b_max * k.saturating_sub(1) as f64 / n as f64;
        let hi = b_max * (k + 1).min(n) as f64 / n as f64;
        let (b, v) = math::golden_max(|b| payoff(b).unwrap_or(f64::NEG_INFINITY), lo, hi, 1e-6);
        if v > best_v {
            best_v = v;
            best_b = b;
        }
        if vals[k] > best_v {
            best_v = vals[k];
            best_b = b_max * k as f64 / n as f64;
        }
    }
    Ok((best_b, best_v))
}

/// Certificate for the peace-implementability test.
///
/// Peace is implementable iff
/// `v2_hi * c1_bar + F2(a2(b*)) * (v1_lo - b*) <= v1_lo`,
/// in which case every pooled bribe in `bribe_interval` sustains a peaceful
/// equilibrium.
#[derive(Debug, Clone)]
pub struct ImplementabilityReport {
    /// Player 1's zero-bid atom when the rejecting player 2 is believed to
    /// be her highest type.
    pub c1_bar: f64,
    pub b_star: f64,
    /// Rejection threshold at the optimal bribe; `None` when `b*` is
    /// accepted in full.
    pub a2_at_bstar: Option<f64>,
    /// `F2(a2(b*)) * (v1_lo - b*)`.
    pub dev_payoff: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub implementable: bool,
    pub bribe_interval: Option<(f64, f64)>,
}

/// Runs the implementability test for a scenario.
pub fn implementability(s: &Scenario) -> Result<ImplementabilityReport> {
    let c1_bar = auction::threshold_c(s.v2_hi(), &s.f1)?;
    let (b_star, dev_payoff) = optimal_bribe(s)?;
    let a2_at_bstar = if s.v1_lo() == 0.0 {
        Some(b_star.min(s.v2_hi()))
    } else {
        rejection_threshold(b_star, s.v1_lo(), &s.f2)?.a2()
    };
    let lhs = s.v2_hi() * c1_bar + dev_payoff;
    let rhs = s.v1_lo();
    let implementable = lhs <= rhs + EQ_TOL;
    let bribe_interval = if implementable {
        Some((s.v2_hi() * c1_bar, s.v1_lo() - dev_payoff))
    } else {
        None
    };
    Ok(ImplementabilityReport {
        c1_bar,
        b_star,
        a2_at_bstar,
        dev_payoff,
        lhs,
        rhs,
        implementable,
        bribe_interval,
    })
}

/// Witness that no bribe can secure peace.
///
/// The only candidate securing bribe is the highest payoff player 2's top
/// type can reach after rejection, obtained when she is believed to be her
/// lowest type: `b_bar = v2_hi - v2_lo * (1 - c1)`. Any bribe strictly
/// between `max(v2_hi - v1_hi, 0)` and that candidate is accepted with
/// probability one under the belief that player 1 is his highest type, so
/// deviating to it profits player 1 and breaks security.
#[derive(Debug, Clone)]
pub struct SecurityWitness {
    /// `U2(v2_hi)` under the most favorable rejection belief.
    pub b_bar_candidate: f64,
    /// Lower end of the witness interval, `max(v2_hi - v1_hi, 0)`.
    pub lower_bound: f64,
    /// Midpoint of the witness interval.
    pub witness_bribe: f64,
    /// Whether the witness bribe is met with full acceptance under the
    /// belief that player 1 is his highest type.
    pub accepted_under_belief_v1bar: bool,
}

/// Computes the security-impossibility witness for a scenario.
pub fn security_witness(s: &Scenario) -> Result<SecurityWitness> {
    let v2_lo = s.v2_lo();
    let b_bar_candidate = if v2_lo > 0.0 {
        let eq = auction::solve_one_sided(v2_lo, &s.f1, Player::Two)?;
        let (_, payoff) = auction::secret_best_response(s.v2_hi(), &eq, v2_lo, Player::Two);
        payoff
    } else {
        // with a zero lowest type the continuation collapses and the top
        // type's payoff bound is her full valuation
        s.v2_hi()
    };
    let lower_bound = (s.v2_hi() - s.v1_hi()).max(0.0);
    if b_bar_candidate <= lower_bound + EQ_TOL {
        return Err(Error::InvariantViolation(
            "witness interval is empty; the continuation bound x < v1_hi failed numerically",
        ));
    }
    let witness_bribe = 0.5 * (lower_bound + b_bar_candidate);
    let accepted = matches!(
        rejection_threshold(witness_bribe, s.v1_hi(), &s.f2)?,
        RejectionReply::FullAcceptance
    );
    Ok(SecurityWitness {
        b_bar_candidate,
        lower_bound,
        witness_bribe,
        accepted_under_belief_v1bar: accepted,
    })
}

/// Residual report for a candidate non-peaceful equilibrium with two
/// on-path bribes.
#[derive(Debug, Clone)]
pub struct TwoBribeVerdict {
    /// (iii) the bribing function is nondecreasing: `b_low < b_high`.
    pub monotone_ok: bool,
    /// (i) the high bribe is accepted with probability one.
    pub high_accepted: bool,
    /// `b_high` minus the best rejection payoff of any type against the
    /// high-bribe belief (nonnegative when (i) holds).
    pub high_accept_margin: f64,
    /// (ii) cutoff-type indifference residual
    /// `|pi1(v1_cut | b_low) - (v1_cut - b_high)|`.
    pub cutoff_residual: f64,
    /// Lowest rejecting type against the low bribe.
    pub a2_low: f64,
    /// Highest bid of the low-bribe continuation auction.
    pub x_low: f64,
    /// Deviation payoff of the cutoff type from the low bribe.
    pub pi_cut: f64,
}

impl TwoBribeVerdict {
    /// All three checks at the given indifference tolerance.
    pub fn passes(&self, tol: f64) -> bool {
        self.monotone_ok && self.high_accepted && self.cutoff_residual <= tol
    }
}

/// Verifies a candidate two-bribe profile: types `[v1_lo, v1_cut]` offer
/// `b_low` (rejected with positive probability), types `[v1_cut, v1_hi]`
/// offer `b_high` (accepted with probability one).
///
/// Builds the on-path beliefs by truncating player 1's prior at the cutoff,
/// solves the low-bribe continuation with the two-sided solver, and reports
/// residuals; it never searches for equilibria.
pub fn verify_two_bribe_candidate(
    b_low: f64,
    b_high: f64,
    v1_cut: f64,
    s: &Scenario,
) -> Result<TwoBribeVerdict> {
    if b_low < 0.0 {
        return Err(Error::Precondition("bribes must be nonnegative"));
    }
    if b_low == b_high {
        return Err(Error::InvalidInput(format!(
            "degenerate menu: both bribes equal {b_low}"
        )));
    }
    if v1_cut <= s.v1_lo() || v1_cut >= s.v1_hi() {
        return Err(Error::Precondition(
            "cutoff type must lie strictly inside player 1's support",
        ));
    }
    let monotone_ok = b_low < b_high;

    // Low bribe: belief is F1 truncated to [v1_lo, v1_cut]; the lowest
    // rejecting type a2 satisfies c1(a2) * a2 = b_low, where c1 comes from
    // the two-sided continuation. c1(a2) * a2 is increasing in a2.
    let belief_low = s.f1.truncate_above(v1_cut)?;
    let v2_lo = s.v2_lo();
    let v2_hi = s.v2_hi();
    let span = v2_hi - v2_lo;
    let u2_of = |a2: f64| -> Result<(f64, AuctionEq)> {
        let eq = auction::solve_two_sided(&belief_low, &s.f2.truncate_below(a2)?)?;
        Ok((eq.c1 * a2, eq))
    };
    let a_lo = v2_lo + span * 1e-6;
    let a_hi = v2_hi - span * 1e-6;
    let (a2_low, low_eq) = if u2_of(a_lo)?.0 >= b_low {
        // even the lowest type strictly prefers rejecting
        let (_, eq) = u2_of(a_lo)?;
        (v2_lo, eq)
    } else if u2_of(a_hi)?.0 < b_low {
        return Err(Error::InvalidInput(format!(
            "low bribe {b_low} is accepted with probability one; no rejection threshold exists"
        )));
    } else {
        let mut lo = a_lo;
        let mut hi = a_hi;
        for _ in 0..40 {
            if hi - lo <= 1e-6 * (1.0 + v2_hi) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if u2_of(mid)?.0 < b_low {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a2 = 0.5 * (lo + hi);
        let (_, eq) = u2_of(a2)?;
        (a2, eq)
    };
    let accept_low = s.f2.cdf(a2_low);
    let pi_cut = accept_low * (v1_cut - b_low)
        + (1.0 - accept_low) * auction::payoff_sup(v1_cut, &low_eq.h2);
    let cutoff_residual = (pi_cut - (v1_cut - b_high)).abs();

    // High bribe: belief is F1 truncated to [v1_cut, v1_hi]; acceptance with
    // probability one requires that no rejecting type could earn more than
    // b_high, evaluated at the rejection belief most favorable to her.
    let belief_high = s.f1.truncate_below(v1_cut)?;
    let high_eq = auction::solve_one_sided(v2_hi, &belief_high, Player::Two)?;
    let mut best_reject = 0.0f64;
    for k in 0..=64 {
        let v2 = v2_lo + span * k as f64 / 64.0;
        best_reject = best_reject.max(auction::payoff_sup(v2, &high_eq.h1));
    }
    let high_accept_margin = b_high - best_reject;
    let high_accepted = high_accept_margin >= -EQ_TOL;

    Ok(TwoBribeVerdict {
        monotone_ok,
        high_accepted,
        high_accept_margin,
        cutoff_residual,
        a2_low,
        x_low: low_eq.x_sigma,
        pi_cut,
    })
}
