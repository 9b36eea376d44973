//! Bayesian Nash equilibria of the two-player all-pay continuation auction.
//!
//! Every BNE is summarized by the unique triple `(x_sigma, c1, c2)` together
//! with the bid-distribution curves `H1`, `H2` on `[0, x_sigma]`, where `c_i`
//! is player i's atom at the zero bid and `c1 * c2 = 0`.
//!
//! Two solvers are provided. [`solve_one_sided`] handles one-sided complete
//! information (one player's type is a known point mass) by closed form:
//! the opponent's curve is linear, `H_opp(b) = c_opp + b/v*`, and the known
//! player's curve integrates `1/F_opp^{-1}(y/v* + c_opp)`. [`solve_two_sided`]
//! integrates the coupled system
//!
//! ```text
//! H1'(b) = 1 / F2^{-1}(H2(b)),    H2'(b) = 1 / F1^{-1}(H1(b))
//! ```
//!
//! backward from `H1(x) = H2(x) = 1`, shooting on the highest bid `x` until
//! one curve lands at zero.

use crate::dist::{Dist, ExtReal};
use crate::math;
use crate::{Error, Result};
use alloc::vec::Vec;

/// Number of samples in a stored bid-distribution curve.
pub const CURVE_POINTS: usize = 2048;

/// Boundary slack for comparisons that are equalities in the theory.
const EQ_TOL: f64 = 1e-9;

/// Which player's type is commonly known in a one-sided auction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

/// A belief about an opponent's type: a Dirac point mass or a full prior.
#[derive(Debug, Clone)]
pub enum Belief {
    PointMass(f64),
    Prior(Dist),
}

/// A monotone bid-distribution curve sampled on a uniform grid over
/// `[0, x_max]` with linear interpolation between nodes.
#[derive(Debug, Clone)]
pub struct BidCurve {
    x_max: f64,
    values: Vec<f64>,
}

impl BidCurve {
    fn new(x_max: f64, values: Vec<f64>) -> Self {
        debug_assert!(values.len() >= 2);
        BidCurve { x_max, values }
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Bid at node `k`.
    pub fn beta(&self, k: usize) -> f64 {
        self.x_max * k as f64 / (self.values.len() - 1) as f64
    }

    /// Curve value at an arbitrary bid, clamped to `[0, x_max]`.
    pub fn eval(&self, beta: f64) -> f64 {
        if beta <= 0.0 {
            return self.values[0];
        }
        if beta >= self.x_max {
            return *self.values.last().expect("nonempty");
        }
        let step = self.x_max / (self.values.len() - 1) as f64;
        let t = beta / step;
        let k = (t as usize).min(self.values.len() - 2);
        let frac = t - k as f64;
        self.values[k] * (1.0 - frac) + self.values[k + 1] * frac
    }

    /// Atom at the zero bid.
    pub fn atom_at_zero(&self) -> f64 {
        self.values[0]
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0] - 1e-12)
    }
}

/// An all-pay auction BNE summary: highest bid, zero-bid atoms, and curves.
#[derive(Debug, Clone)]
pub struct AuctionEq {
    pub x_sigma: f64,
    pub c1: f64,
    pub c2: f64,
    pub h1: BidCurve,
    pub h2: BidCurve,
}

/// `inf { c in [0,1] : v * ∫_c^1 ds / F_opp^{-1}(s) <= 1 }`.
///
/// This is the opponent's zero-bid atom in the one-sided auction where `v`
/// is the known type; it is 0 when the full integral is already small
/// enough, and otherwise the unique interior solution of the boundary
/// condition. Nondecreasing in `v`.
pub fn threshold_c(v: f64, opp: &Dist) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::Precondition("known type must be positive"));
    }
    let feasible = |c: f64| -> Result<bool> {
        Ok(match opp.recip_quantile_integral(c, 1.0)? {
            ExtReal::Infinite => false,
            ExtReal::Finite(i) => v * i <= 1.0 + EQ_TOL,
        })
    };
    if feasible(0.0)? {
        return Ok(0.0);
    }
    // v * ∫_c^1 is continuous and decreasing in c, so the infimum is the
    // crossing point; predicate bisection to 1e-12 in c.
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..64 {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Solves the one-sided complete-information auction: `known_side`'s type is
/// the point mass `v_star`, the other player draws from `opp`.
pub fn solve_one_sided(v_star: f64, opp: &Dist, known_side: Player) -> Result<AuctionEq> {
    if !(v_star > 0.0) {
        return Err(Error::Precondition("known type must be positive"));
    }
    let c_opp = threshold_c(v_star, opp)?;
    let c_known = if c_opp > 0.0 {
        0.0
    } else {
        match opp.recip_quantile_integral(0.0, 1.0)? {
            ExtReal::Infinite => {
                return Err(Error::InvariantViolation(
                    "zero threshold with a divergent reciprocal integral",
                ))
            }
            ExtReal::Finite(i) => (1.0 - v_star * i).max(0.0),
        }
    };
    let x_sigma = v_star * (1.0 - c_opp);

    // Opponent's curve is exactly linear from c_opp to 1.
    let n = CURVE_POINTS;
    let mut opp_vals = Vec::with_capacity(n);
    for k in 0..n {
        let t = k as f64 / (n - 1) as f64;
        opp_vals.push(c_opp + (1.0 - c_opp) * t);
    }
    let h_opp = BidCurve::new(x_sigma, opp_vals);

    // Known player's curve accumulates ∫ dy / F_opp^{-1}(y/v* + c_opp).
    let mut known_vals = Vec::with_capacity(n);
    known_vals.push(c_known);
    let mut acc = c_known;
    let step = x_sigma / (n - 1) as f64;
    for k in 0..n - 1 {
        let a = step * k as f64;
        let b = step * (k + 1) as f64;
        acc += math::adaptive_quad(
            |y| 1.0 / opp.quantile_clamped(c_opp + y / v_star),
            a,
            b,
            1e-13,
            1e-12,
        )?;
        known_vals.push(acc.min(1.0));
    }
    let end = *known_vals.last().expect("nonempty");
    if (end - 1.0).abs() > 1e-7 {
        return Err(Error::Numeric {
            what: "one-sided curve does not reach 1 at the highest bid",
            lo: end,
            hi: 1.0,
        });
    }
    *known_vals.last_mut().expect("nonempty") = 1.0;
    let h_known = BidCurve::new(x_sigma, known_vals);

    Ok(match known_side {
        Player::One => AuctionEq {
            x_sigma,
            c1: c_known,
            c2: c_opp,
            h1: h_known,
            h2: h_opp,
        },
        Player::Two => AuctionEq {
            x_sigma,
            c1: c_opp,
            c2: c_known,
            h1: h_opp,
            h2: h_known,
        },
    })
}

/// Result of one backward pass of the coupled bid-distribution system.
struct Descent {
    h1_at_zero: f64,
    h2_at_zero: f64,
    samples: Option<(Vec<f64>, Vec<f64>)>,
}

fn integrate_down(f1: &Dist, f2: &Dist, x: f64, record: bool) -> Descent {
    let n = CURVE_POINTS;
    let mut h1 = 1.0;
    let mut h2 = 1.0;
    let mut s1 = Vec::new();
    let mut s2 = Vec::new();
    if record {
        s1 = alloc::vec![0.0; n];
        s2 = alloc::vec![0.0; n];
        s1[n - 1] = 1.0;
        s2[n - 1] = 1.0;
    }
    let grid_step = x / (n - 1) as f64;
    // per-step change of H capped to keep the stiff region accurate
    const H_CAP: f64 = 1e-3;
    let mut beta = x;
    let mut next_node = n - 1;
    let mut steps = 0usize;
    while beta > 0.0 {
        let target = if next_node == 0 {
            0.0
        } else {
            grid_step * (next_node - 1) as f64
        };
        let rhs = |a: f64, b: f64| -> (f64, f64) {
            (
                1.0 / f2.quantile_clamped(b),
                1.0 / f1.quantile_clamped(a),
            )
        };
        let (d1, d2) = rhs(h1, h2);
        let mut h = beta - target;
        let dmax = d1.max(d2);
        if dmax * h > H_CAP {
            h = H_CAP / dmax;
        }
        let (k1a, k1b) = (d1, d2);
        let (k2a, k2b) = rhs(h1 - 0.5 * h * k1a, h2 - 0.5 * h * k1b);
        let (k3a, k3b) = rhs(h1 - 0.5 * h * k2a, h2 - 0.5 * h * k2b);
        let (k4a, k4b) = rhs(h1 - h * k3a, h2 - h * k3b);
        h1 -= h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        h2 -= h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        beta -= h;
        if beta <= target + 1e-15 * x {
            beta = target;
            if record && next_node > 0 {
                s1[next_node - 1] = h1.clamp(0.0, 1.0);
                s2[next_node - 1] = h2.clamp(0.0, 1.0);
            }
            next_node = next_node.saturating_sub(1);
        }
        steps += 1;
        if h1 < -0.5 || h2 < -0.5 || steps > 4_000_000 {
            break;
        }
    }
    Descent {
        h1_at_zero: h1,
        h2_at_zero: h2,
        samples: if record { Some((s1, s2)) } else { None },
    }
}

/// Solves the auction with two continuous priors by shooting on the highest
/// bid: backward integration from `H1 = H2 = 1` and bisection on `x` until
/// `min(H1(0), H2(0)) = 0` within 1e-6 with the other atom in `[0, 1]`.
pub fn solve_two_sided(f1: &Dist, f2: &Dist) -> Result<AuctionEq> {
    if f1.support_lo() <= 0.0 && f2.support_lo() <= 0.0 {
        return Err(Error::Precondition(
            "at least one support infimum must be positive",
        ));
    }
    let mut lo = f1.support_lo().min(f2.support_lo());
    let mut hi = f1.support_hi().max(f2.support_hi());
    let m = |x: f64| {
        let d = integrate_down(f1, f2, x, false);
        d.h1_at_zero.min(d.h2_at_zero)
    };
    if m(hi) > 0.0 {
        return Err(Error::Numeric {
            what: "shooting bracket does not contain the highest bid",
            lo,
            hi,
        });
    }
    if lo > 0.0 && m(lo) < 0.0 {
        // highest bid sits below both support infima only in degenerate
        // cases; widen toward zero so the bracket is valid
        lo = 0.0;
    }
    for _ in 0..80 {
        if hi - lo <= 1e-8 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if m(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let d = integrate_down(f1, f2, x, true);
    let floor = d.h1_at_zero.min(d.h2_at_zero);
    if floor.abs() > 1e-6 {
        return Err(Error::Numeric {
            what: "shooting did not converge to a zero atom",
            lo,
            hi,
        });
    }
    let (mut s1, mut s2) = d.samples.expect("recorded");
    // the touching side lands at zero; on symmetric games both do
    let m = d.h1_at_zero.min(d.h2_at_zero);
    let c1 = if d.h1_at_zero <= m + 1e-9 {
        0.0
    } else {
        d.h1_at_zero.clamp(0.0, 1.0)
    };
    let c2 = if d.h2_at_zero <= m + 1e-9 {
        0.0
    } else {
        d.h2_at_zero.clamp(0.0, 1.0)
    };
    s1[0] = c1;
    s2[0] = c2;
    // enforce monotone tables against integrator round-off
    for k in 1..s1.len() {
        s1[k] = s1[k].max(s1[k - 1]);
        s2[k] = s2[k].max(s2[k - 1]);
    }
    Ok(AuctionEq {
        x_sigma: x,
        c1,
        c2,
        h1: BidCurve::new(x, s1),
        h2: BidCurve::new(x, s2),
    })
}

/// Dispatches on the belief pair: a point mass against a prior uses the
/// closed form, two priors use the shooting solver. Two point masses (or a
/// point mass treated as a degenerate prior) are rejected.
pub fn solve(belief1: &Belief, belief2: &Belief) -> Result<AuctionEq> {
    match (belief1, belief2) {
        (Belief::PointMass(v), Belief::Prior(d)) => solve_one_sided(*v, d, Player::One),
        (Belief::Prior(d), Belief::PointMass(v)) => solve_one_sided(*v, d, Player::Two),
        (Belief::Prior(d1), Belief::Prior(d2)) => solve_two_sided(d1, d2),
        (Belief::PointMass(_), Belief::PointMass(_)) => Err(Error::Precondition(
            "two point-mass beliefs do not induce a continuous auction",
        )),
    }
}

/// Supremum expected payoff of a type `v` bidding against the opponent curve:
/// `max_beta H_opp(beta) * v - beta`.
///
/// The curve is piecewise linear, so the maximum is attained at a node.
pub fn payoff_sup(v: f64, opp_curve: &BidCurve) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    let mut best = f64::NEG_INFINITY;
    for (k, h) in opp_curve.values().iter().enumerate() {
        let payoff = h * v - opp_curve.beta(k);
        if payoff > best {
            best = payoff;
        }
    }
    best.max(0.0)
}

/// Best response and payoff of a type `v` bidding secretly in a one-sided
/// BNE built on the belief that `known_side`'s type is `known_v`.
///
/// Types at or below the believed type bid zero (payoff `c_opp * v`, which
/// is 0 when the opponent has no atom); higher types bid the highest bid
/// `x_sigma` and win for sure.
pub fn secret_best_response(
    v: f64,
    eq: &AuctionEq,
    known_v: f64,
    known_side: Player,
) -> (f64, f64) {
    let c_opp = match known_side {
        Player::One => eq.c2,
        Player::Two => eq.c1,
    };
    if v > known_v {
        (eq.x_sigma, v - eq.x_sigma)
    } else {
        (0.0, c_opp * v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn u(lo: f64, hi: f64) -> Dist {
        Dist::uniform(lo, hi).unwrap()
    }

    #[test]
    fn threshold_examples() {
        // 100 * ln(1/c) / 100 = 1  =>  c = 1/e
        let c = threshold_c(100.0, &u(0.0, 100.0)).unwrap();
        assert_relative_eq!(c, (-1.0f64).exp(), max_relative = 1e-8);
        // 30 + 100 c = 130/e
        let c = threshold_c(100.0, &u(30.0, 130.0)).unwrap();
        assert_relative_eq!(c, (130.0 * (-1.0f64).exp() - 30.0) / 100.0, max_relative = 1e-8);
        // small v: full integral is already feasible
        assert_eq!(threshold_c(10.0, &u(30.0, 130.0)).unwrap(), 0.0);
        // monotone in v
        let mut prev = 0.0;
        for v in [40.0, 60.0, 80.0, 100.0, 120.0] {
            let c = threshold_c(v, &u(0.0, 100.0)).unwrap();
            assert!(c >= prev - 1e-12);
            prev = c;
        }
    }

    #[test]
    fn one_sided_point_mass_50_vs_uniform() {
        let eq = solve_one_sided(50.0, &u(0.0, 100.0), Player::One).unwrap();
        assert_relative_eq!(eq.c2, (-2.0f64).exp(), max_relative = 1e-7);
        assert_eq!(eq.c1, 0.0);
        assert_relative_eq!(eq.x_sigma, 50.0 * (1.0 - (-2.0f64).exp()), max_relative = 1e-7);
        assert!(eq.h1.is_nondecreasing() && eq.h2.is_nondecreasing());
        assert_relative_eq!(eq.h1.eval(eq.x_sigma), 1.0, epsilon = 1e-9);
        assert_relative_eq!(eq.h2.eval(eq.x_sigma), 1.0, epsilon = 1e-9);
        // x < v* iff the opponent atom is positive
        assert!(eq.x_sigma < 50.0 && eq.c2 > 0.0);
    }

    #[test]
    fn one_sided_no_atom_when_opponent_strong() {
        // 60 * ln(100/35)/65 < 1, so c_opp = 0 and x = v*
        let eq = solve_one_sided(60.0, &u(35.0, 100.0), Player::One).unwrap();
        assert_eq!(eq.c2, 0.0);
        assert_relative_eq!(eq.x_sigma, 60.0, max_relative = 1e-12);
        let i = u(35.0, 100.0)
            .recip_quantile_integral(0.0, 1.0)
            .unwrap()
            .finite()
            .unwrap();
        assert_relative_eq!(eq.c1, 1.0 - 60.0 * i, max_relative = 1e-8);
    }

    #[test]
    fn payoff_sup_examples() {
        assert_eq!(payoff_sup(0.0, &solve_one_sided(50.0, &u(0.0, 100.0), Player::One).unwrap().h2), 0.0);
        // v_bar2 = 100 against H1 of the one-sided auction with belief
        // v2 = 100: payoff is flat and equals 100/e
        let eq = solve_one_sided(100.0, &u(0.0, 100.0), Player::Two).unwrap();
        let p = payoff_sup(100.0, &eq.h1);
        assert_relative_eq!(p, 100.0 * (-1.0f64).exp(), max_relative = 1e-6);
        // a type above the known one best-responds with the top bid
        let eq = solve_one_sided(60.0, &u(35.0, 100.0), Player::One).unwrap();
        let p = payoff_sup(80.0, &eq.h2);
        assert_relative_eq!(p, 80.0 - eq.x_sigma, max_relative = 1e-9);
    }

    #[test]
    fn payoff_sup_slopes_within_unit() {
        let eq = solve_one_sided(50.0, &u(0.0, 100.0), Player::One).unwrap();
        let mut prev = payoff_sup(0.0, &eq.h2);
        for i in 1..=60 {
            let v = i as f64;
            let cur = payoff_sup(v, &eq.h2);
            let slope = cur - prev;
            assert!((-1e-9..=1.0 + 1e-6).contains(&slope), "slope {slope}");
            prev = cur;
        }
    }

    #[test]
    fn secret_best_response_branches() {
        let eq = solve_one_sided(50.0, &u(0.0, 100.0), Player::One).unwrap();
        // at the known type: bid zero, payoff c_opp * v
        let (bid, pay) = secret_best_response(50.0, &eq, 50.0, Player::One);
        assert_eq!(bid, 0.0);
        assert_relative_eq!(pay, eq.c2 * 50.0, max_relative = 1e-9);
        // above the known type: top bid, payoff v - x
        let (bid, pay) = secret_best_response(70.0, &eq, 50.0, Player::One);
        assert_relative_eq!(bid, eq.x_sigma, max_relative = 1e-12);
        assert_relative_eq!(pay, 70.0 - eq.x_sigma, max_relative = 1e-9);
        // no-atom case: v > known_v pays v - known_v
        let eq = solve_one_sided(60.0, &u(35.0, 100.0), Player::One).unwrap();
        let (_, pay) = secret_best_response(75.0, &eq, 60.0, Player::One);
        assert_relative_eq!(pay, 15.0, max_relative = 1e-9);
        let (_, pay) = secret_best_response(40.0, &eq, 60.0, Player::One);
        assert_eq!(pay, 0.0);
    }

    #[test]
    fn two_sided_symmetric_uniform() {
        let eq = solve_two_sided(&u(20.0, 120.0), &u(20.0, 120.0)).unwrap();
        assert!(eq.c1.min(eq.c2) <= 1e-9);
        assert!(eq.c1 <= 2e-3 && eq.c2 <= 2e-3, "c1={} c2={}", eq.c1, eq.c2);
        let n = eq.h1.values().len();
        for k in (0..n).step_by(64) {
            assert_relative_eq!(eq.h1.values()[k], eq.h2.values()[k], epsilon = 1e-6);
        }
        assert!(eq.h1.is_nondecreasing());
        assert!(eq.x_sigma >= 20.0 - 1e-6);
    }

    #[test]
    fn two_sided_asymmetric_matches_reference() {
        // cross-checked against an independent high-resolution shooting run
        let eq = solve_two_sided(&u(30.0, 130.0), &u(60.0, 100.0)).unwrap();
        assert_relative_eq!(eq.x_sigma, 77.321, max_relative = 2e-3);
        assert_relative_eq!(eq.c1, 0.0625, max_relative = 0.02);
        assert_eq!(eq.c2, 0.0);
        assert!(eq.c1 * eq.c2 <= 1e-9);
    }

    #[test]
    fn two_sided_narrow_prior_approaches_one_sided() {
        let eq2 = solve_two_sided(&u(49.98, 50.02), &u(30.0, 130.0)).unwrap();
        let eq1 = solve_one_sided(50.0, &u(30.0, 130.0), Player::One).unwrap();
        assert_relative_eq!(eq2.x_sigma, eq1.x_sigma, max_relative = 2e-3);
        let mut worst: f64 = 0.0;
        for i in 0..=100 {
            let b = eq1.x_sigma * i as f64 / 100.0;
            worst = worst.max((eq2.h1.eval(b) - eq1.h1.eval(b)).abs());
            worst = worst.max((eq2.h2.eval(b) - eq1.h2.eval(b)).abs());
        }
        assert!(worst <= 1e-3, "sup-norm gap {worst}");
    }

    #[test]
    fn solve_dispatch() {
        let b1 = Belief::PointMass(50.0);
        let b2 = Belief::Prior(u(0.0, 100.0));
        assert!(solve(&b1, &b2).is_ok());
        assert!(solve(&Belief::PointMass(1.0), &Belief::PointMass(2.0)).is_err());
    }

    #[test]
    fn two_sided_rejects_double_zero_support() {
        assert!(solve_two_sided(&u(0.0, 100.0), &u(0.0, 50.0)).is_err());
    }
}
