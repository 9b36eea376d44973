//! Cross-module invariant suite: every solved equilibrium satisfies the
//! structural identities, thresholds are monotone, and the bribing and
//! requesting layers agree with their independent re-derivations.

use allpay_core::{
    bribing, deviation_payoff, implementability, payoff_sup, rejection_threshold,
    request_rejection_threshold, solve_one_sided, solve_two_sided, Dist, Piece, Player,
    RejectionReply, Scenario,
};
use proptest::prelude::*;

fn u(lo: f64, hi: f64) -> Dist {
    Dist::uniform(lo, hi).unwrap()
}

fn kinked() -> Dist {
    Dist::from_pieces(vec![
        Piece::new(0.0, 30.0, vec![0.0, 0.0, 1.0 / 3000.0]),
        Piece::new(30.0, 100.0, vec![0.0, 0.01]),
    ])
    .unwrap()
}

fn check_eq_invariants(eq: &allpay_core::AuctionEq, min_inf: f64) {
    assert!(eq.c1 * eq.c2 <= 1e-9, "c1*c2 = {}", eq.c1 * eq.c2);
    assert!(eq.h1.is_nondecreasing());
    assert!(eq.h2.is_nondecreasing());
    assert!((eq.h1.eval(eq.x_sigma) - 1.0).abs() <= 1e-9);
    assert!((eq.h2.eval(eq.x_sigma) - 1.0).abs() <= 1e-9);
    assert!((eq.h1.atom_at_zero() - eq.c1).abs() <= 1e-12);
    assert!((eq.h2.atom_at_zero() - eq.c2).abs() <= 1e-12);
    assert!(eq.x_sigma >= min_inf - 1e-6, "x {} below {}", eq.x_sigma, min_inf);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn one_sided_equilibria_satisfy_identities(
        v in 5.0..120.0f64,
        lo in 0.0..50.0f64,
        width in 10.0..100.0f64,
    ) {
        let opp = u(lo, lo + width);
        let eq = solve_one_sided(v, &opp, Player::One).unwrap();
        check_eq_invariants(&eq, v.min(lo));
        // x < v* exactly when the opponent keeps an atom
        prop_assert_eq!(eq.x_sigma < v - 1e-12, eq.c2 > 0.0);
    }

    #[test]
    fn two_sided_equilibria_satisfy_identities(
        lo1 in 1.0..60.0f64,
        w1 in 10.0..100.0f64,
        lo2 in 1.0..60.0f64,
        w2 in 10.0..100.0f64,
    ) {
        let f1 = u(lo1, lo1 + w1);
        let f2 = u(lo2, lo2 + w2);
        let eq = solve_two_sided(&f1, &f2).unwrap();
        check_eq_invariants(&eq, lo1.min(lo2));
    }
}

#[test]
fn payoff_sup_is_convex_nondecreasing() {
    let eq = solve_one_sided(50.0, &u(0.0, 100.0), Player::One).unwrap();
    let h = 1.0;
    let mut prev_slope = -1e-9;
    for k in 0..80 {
        let v = k as f64 * h;
        let slope = (payoff_sup(v + h, &eq.h2) - payoff_sup(v, &eq.h2)) / h;
        assert!((-1e-9..=1.0 + 1e-6).contains(&slope), "slope {slope} at v={v}");
        assert!(slope >= prev_slope - 1e-7, "convexity broken at v={v}");
        prev_slope = slope;
    }
}

#[test]
fn interior_indifference_residual() {
    // at an interior threshold the boundary type's rejection value c1*a2
    // meets the bribe exactly
    for f2 in [u(0.0, 100.0), kinked(), u(20.0, 90.0)] {
        for k in 1..=20 {
            let b = (f2.support_hi() - 30.0) * k as f64 / 21.0;
            if let RejectionReply::Interval { a2, continuation } =
                rejection_threshold(b, 30.0, &f2).unwrap()
            {
                if a2 > f2.support_lo() + 1e-9 {
                    assert!(
                        (continuation.c1 * a2 - b).abs() <= 1e-6,
                        "residual {} at b={b}",
                        (continuation.c1 * a2 - b).abs()
                    );
                }
                assert!(continuation.c2.abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn rejection_threshold_monotone_on_grid() {
    for f2 in [u(0.0, 100.0), kinked()] {
        let mut prev = -1.0;
        for k in 0..100 {
            let b = 69.9 * k as f64 / 99.0;
            let a2 = rejection_threshold(b, 30.0, &f2)
                .unwrap()
                .a2()
                .expect("interior band");
            assert!(a2 >= prev - 1e-7, "a2({b}) = {a2} < {prev}");
            prev = a2;
        }
    }
}

#[test]
fn belief_monotonicity_at_point_masses() {
    // a2 grows with the believed player-1 type (rejection shrinks)
    let f2 = u(0.0, 100.0);
    for b in [5.0, 12.1762, 20.0] {
        let mut prev = -1.0;
        for k in 0..=20 {
            let v1 = 30.0 + 50.0 * k as f64 / 20.0;
            // full acceptance is the empty rejection set, i.e. the top
            let a2 = rejection_threshold(b, v1, &f2)
                .unwrap()
                .a2()
                .unwrap_or(f2.support_hi());
            assert!(a2 >= prev - 1e-7);
            prev = a2;
        }
    }
}

#[test]
fn deviation_slope_bounded_by_one() {
    let s = Scenario::new(u(30.0, 130.0), u(0.0, 100.0));
    for b in [0.0, 12.1762, 40.0] {
        let mut prev = deviation_payoff(30.0, b, &s).unwrap();
        for k in 1..=100 {
            let v1 = 30.0 + k as f64;
            let cur = deviation_payoff(v1, b, &s).unwrap();
            let slope = cur - prev;
            assert!((-1e-6..=1.0 + 1e-6).contains(&slope), "slope {slope} at b={b}");
            prev = cur;
        }
    }
}

#[test]
fn implementability_preserved_under_f1_dominance() {
    // a first-order dominant shift of player 1's prior (same support) never
    // breaks implementability: both terms of the test weakly fall
    let tilted = |lo: f64, hi: f64| {
        let w = hi - lo;
        // F(v) = ((v-lo)/w)^2, stochastically above the uniform
        Dist::from_pieces(vec![Piece::new(
            lo,
            hi,
            vec![lo * lo / (w * w), -2.0 * lo / (w * w), 1.0 / (w * w)],
        )])
        .unwrap()
    };
    for f2 in [u(0.0, 100.0), u(20.0, 90.0)] {
        for (lo, hi) in [(30.0, 130.0), (40.0, 90.0)] {
            let base = implementability(&Scenario::new(u(lo, hi), f2.clone())).unwrap();
            let dom = implementability(&Scenario::new(tilted(lo, hi), f2.clone())).unwrap();
            assert!(dom.c1_bar <= base.c1_bar + 1e-9);
            if base.implementable {
                assert!(dom.implementable, "dominance flipped the verdict at [{lo},{hi}]");
            }
        }
    }
}

#[test]
fn request_replies_pin_highest_bid() {
    let f2 = u(60.0, 100.0);
    for v1 in [70.0, 100.0, 119.0] {
        for k in 0..=50 {
            let r = 120.0 * k as f64 / 50.0;
            match request_rejection_threshold(r, v1, &f2).unwrap() {
                allpay_core::RequestReply::Partial { continuation, .. } => {
                    assert!((continuation.x_sigma - r).abs() <= 1e-6, "x != r at r={r}");
                }
                allpay_core::RequestReply::FullRejection { continuation } => {
                    assert!(continuation.x_sigma <= r + 1e-6, "x > r at r={r}");
                }
                allpay_core::RequestReply::FullAcceptance => {}
            }
        }
    }
}

#[test]
fn no_profitable_deviation_when_equilibrium_exists() {
    // with an existence certificate, no request on a dense grid pays the top
    // type more than the on-path request
    let s = Scenario::new(u(61.0, 100.0), u(60.0, 62.0));
    let rep = allpay_core::robust_peaceful_exists(&s).unwrap();
    assert!(rep.exists);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..=1000 {
        let r = s.f1.support_hi() * k as f64 / 1000.0;
        let pay = bribing_free_request_payoff(r, s.f1.support_hi(), &s.f2);
        worst = worst.max(pay);
    }
    assert!(worst <= 60.0 + 1e-6, "deviation pays {worst}");
}

fn bribing_free_request_payoff(r: f64, v1: f64, f2: &Dist) -> f64 {
    match request_rejection_threshold(r, v1, f2).unwrap() {
        allpay_core::RequestReply::FullAcceptance => r,
        allpay_core::RequestReply::Partial { alpha2, .. } => {
            let f = f2.cdf(alpha2);
            f * (v1 - r) + (1.0 - f) * r
        }
        allpay_core::RequestReply::FullRejection { continuation } => v1 - continuation.x_sigma,
    }
}

#[test]
fn two_sided_collapses_to_one_sided() {
    // shrinking one prior toward a point mass reproduces the closed form
    let f2 = u(30.0, 130.0);
    let one = solve_one_sided(50.0, &f2, Player::One).unwrap();
    let mut prev_gap = f64::INFINITY;
    for width in [4.0, 1.0, 0.04] {
        let f1 = u(50.0 - width / 2.0, 50.0 + width / 2.0);
        let two = solve_two_sided(&f1, &f2).unwrap();
        // top bids compared on the probability scale of the curves
        let mut gap: f64 = (two.x_sigma - one.x_sigma).abs() / one.x_sigma;
        for k in 0..=100 {
            let beta = one.x_sigma * k as f64 / 100.0;
            gap = gap.max((two.h1.eval(beta) - one.h1.eval(beta)).abs());
            gap = gap.max((two.h2.eval(beta) - one.h2.eval(beta)).abs());
        }
        assert!(gap <= prev_gap + 1e-9, "gap grew: {gap} > {prev_gap}");
        prev_gap = gap;
    }
    assert!(prev_gap <= 1e-3, "final sup-norm gap {prev_gap}");
}

#[test]
fn security_witness_on_randomized_families() {
    // deterministic pseudo-random sweep across uniform and kinked priors
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for case in 0..50 {
        let lo1 = next() * 60.0;
        let w1 = 10.0 + next() * 90.0;
        let lo2 = next() * 50.0;
        let w2 = 10.0 + next() * 80.0;
        let f1 = u(lo1, lo1 + w1);
        let f2 = if case % 2 == 0 {
            u(lo2, lo2 + w2)
        } else {
            // linear-quadratic mix keeps the same support
            let (a, b) = (lo2, lo2 + w2);
            let w = b - a;
            let theta = next();
            Dist::from_pieces(vec![Piece::new(
                a,
                b,
                vec![
                    -theta * a / w + (1.0 - theta) * a * a / (w * w),
                    theta / w - 2.0 * (1.0 - theta) * a / (w * w),
                    (1.0 - theta) / (w * w),
                ],
            )])
            .unwrap()
        };
        let s = Scenario::new(f1, f2);
        let w = bribing::security_witness(&s).unwrap();
        assert!(
            w.witness_bribe > w.lower_bound && w.witness_bribe < w.b_bar_candidate,
            "case {case}: witness {} not inside ({}, {})",
            w.witness_bribe,
            w.lower_bound,
            w.b_bar_candidate
        );
        assert!(w.accepted_under_belief_v1bar, "case {case}");
    }
}
