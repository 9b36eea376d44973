//! Subcommand bodies: solve, write reports and curves, print summaries.

use crate::report::{num, opt_num, provenance, write_csv, write_json};
use crate::scenario::{self, Options};
use crate::{AuctionArgs, CliError, CommonArgs};
use allpay_core::oracle::{self, DiscreteGame, TieRule, WeightedType};
use allpay_core::{
    bribing, implementability, request_rejection_threshold, requesting, security_witness,
    solve_one_sided, solve_two_sided, AuctionEq, Player, RejectionReply, RequestReply,
    Scenario,
};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

/// Effective settings after merging CLI flags with scenario-file options.
///
/// An explicitly provided flag wins; a flag left at its built-in default
/// yields to the scenario file.
struct Effective {
    out: PathBuf,
    grid_n: usize,
    tol: f64,
    reproducible: bool,
}

fn effective(args: &CommonArgs, opts: &Options) -> Effective {
    let grid_n = if args.grid_n != 200 {
        args.grid_n
    } else {
        opts.grid_n.unwrap_or(args.grid_n)
    };
    let tol = if (args.tol - 1e-6).abs() > 0.0 {
        args.tol
    } else {
        opts.tol.unwrap_or(args.tol)
    };
    let out = if args.out != Path::new(".") {
        args.out.clone()
    } else {
        opts.out_dir
            .as_ref()
            .map(PathBuf::from)
            .unwrap_or_else(|| args.out.clone())
    };
    Effective {
        out,
        grid_n,
        tol,
        reproducible: args.reproducible,
    }
}

fn scenario_block(s: &Scenario) -> Value {
    json!({
        "v1_lo": s.v1_lo(),
        "v1_hi": s.v1_hi(),
        "v2_lo": s.v2_lo(),
        "v2_hi": s.v2_hi(),
    })
}

fn support_line(s: &Scenario) -> String {
    format!(
        "f1 on [{}, {}], f2 on [{}, {}]",
        num(s.v1_lo()),
        num(s.v1_hi()),
        num(s.v2_lo()),
        num(s.v2_hi())
    )
}

pub fn cmd_bribing(args: &CommonArgs) -> Result<u8, CliError> {
    let (s, opts) = scenario::load(&args.scenario)?;
    let eff = effective(args, &opts);
    let rep = implementability(&s)?;
    let wit = security_witness(&s)?;

    let b_max = (s.v2_hi() - s.v1_lo()).max(0.0);
    let mut rows = Vec::with_capacity(eff.grid_n + 1);
    for k in 0..=eff.grid_n {
        let b = b_max * k as f64 / eff.grid_n as f64;
        let (kind, a2, payoff) = if s.v1_lo() == 0.0 {
            let a2 = b.min(s.v2_hi());
            (
                "interval",
                Some(a2),
                bribing::lowest_type_deviation_payoff(b, &s)?,
            )
        } else {
            match bribing::rejection_threshold(b, s.v1_lo(), &s.f2)? {
                RejectionReply::FullAcceptance => {
                    ("full_acceptance", None, s.v1_lo() - b)
                }
                RejectionReply::Interval { a2, .. } => (
                    "interval",
                    Some(a2),
                    s.f2.cdf(a2) * (s.v1_lo() - b),
                ),
            }
        };
        let a2_cell = a2.map(num).unwrap_or_default();
        rows.push(format!("{},{kind},{a2_cell},{}", num(b), num(payoff)));
    }
    write_csv(&eff.out, "bribing_curve.csv", "b,reply,a2,payoff", &rows)?;

    let value = json!({
        "implementability": {
            "c1_bar": rep.c1_bar,
            "b_star": rep.b_star,
            "a2_at_b_star": opt_num(rep.a2_at_bstar),
            "dev_payoff": rep.dev_payoff,
            "lhs": rep.lhs,
            "rhs": rep.rhs,
            "implementable": rep.implementable,
            "bribe_interval": rep.bribe_interval
                .map(|(lo, hi)| json!([lo, hi]))
                .unwrap_or(Value::Null),
        },
        "security": {
            "b_bar_candidate": wit.b_bar_candidate,
            "lower_bound": wit.lower_bound,
            "witness_bribe": wit.witness_bribe,
            "accepted_under_belief_v1bar": wit.accepted_under_belief_v1bar,
        },
        "scenario": scenario_block(&s),
        "provenance": provenance(eff.grid_n, eff.tol, eff.reproducible),
    });
    write_json(&eff.out, "bribing_report.json", &value)?;

    println!("bribing report ({})", support_line(&s));
    println!("  c1_bar          {}", num(rep.c1_bar));
    println!("  b_star          {}", num(rep.b_star));
    match rep.a2_at_bstar {
        Some(a2) => println!("  a2(b_star)      {}", num(a2)),
        None => println!("  a2(b_star)      full acceptance"),
    }
    println!("  dev_payoff      {}", num(rep.dev_payoff));
    println!("  lhs / rhs       {} / {}", num(rep.lhs), num(rep.rhs));
    println!("  implementable   {}", rep.implementable);
    if let Some((lo, hi)) = rep.bribe_interval {
        println!("  bribe interval  [{}, {}]", num(lo), num(hi));
    }
    println!("security witness");
    println!("  b_bar candidate {}", num(wit.b_bar_candidate));
    println!("  witness bribe   {}", num(wit.witness_bribe));
    println!("  accepted under belief v1_hi: {}", wit.accepted_under_belief_v1bar);
    Ok(0)
}

pub fn cmd_requesting(args: &CommonArgs) -> Result<u8, CliError> {
    let (s, opts) = scenario::load(&args.scenario)?;
    let eff = effective(args, &opts);
    let mut rep = requesting::robust_peaceful_exists_with_tol(&s, eff.tol)?;
    if rep.exists {
        rep = requesting::request_security(&s, &rep)?;
    }

    let mut rows = Vec::with_capacity(eff.grid_n + 1);
    for k in 0..=eff.grid_n {
        let r = s.v1_hi() * k as f64 / eff.grid_n as f64;
        let reply = request_rejection_threshold(r, s.v1_hi(), &s.f2)?;
        let (kind, alpha2, payoff) = match &reply {
            RequestReply::FullAcceptance => ("full_acceptance", None, r),
            RequestReply::Partial { alpha2, .. } => {
                let f = s.f2.cdf(*alpha2);
                (
                    "partial",
                    Some(*alpha2),
                    f * (s.v1_hi() - r) + (1.0 - f) * r,
                )
            }
            RequestReply::FullRejection { continuation } => {
                ("full_rejection", None, s.v1_hi() - continuation.x_sigma)
            }
        };
        let alpha_cell = alpha2.map(num).unwrap_or_default();
        rows.push(format!("{},{kind},{alpha_cell},{}", num(r), num(payoff)));
    }
    write_csv(&eff.out, "requesting_curve.csv", "r,reply,alpha2,payoff", &rows)?;

    let security = rep
        .security
        .as_ref()
        .map(|sec| {
            json!({
                "player2_ok": sec.player2_ok,
                "gap_required": sec.gap_required,
                "gap_ok": sec.gap_ok,
            })
        })
        .unwrap_or(Value::Null);
    let value = json!({
        "report": {
            "cond_a": rep.cond_a,
            "cond_b": rep.cond_b,
            "cond_c_residual": opt_num(rep.cond_c_residual),
            "cond_c_tol": rep.cond_c_tol,
            "exists": rep.exists,
            "r_bar": rep.r_bar,
            "r_star": opt_num(rep.r_star),
            "x_sigma_star": rep.x_sigma_star,
            "securable": rep.securable.map(|b| json!(b)).unwrap_or(Value::Null),
            "security": security,
        },
        "scenario": scenario_block(&s),
        "provenance": provenance(eff.grid_n, eff.tol, eff.reproducible),
    });
    write_json(&eff.out, "requesting_report.json", &value)?;

    println!("requesting report ({})", support_line(&s));
    println!("  cond_a          {}", rep.cond_a);
    println!("  cond_b          {}", rep.cond_b);
    match rep.cond_c_residual {
        Some(res) => println!("  cond_c residual {}", num(res)),
        None => println!("  cond_c residual n/a"),
    }
    println!("  exists          {}", rep.exists);
    println!("  r_bar           {}", num(rep.r_bar));
    if let Some(r_star) = rep.r_star {
        println!("  r_star          {}", num(r_star));
    }
    println!("  x_sigma_star    {}", num(rep.x_sigma_star));
    match rep.securable {
        Some(sec) => println!("  securable       {sec}"),
        None => println!("  securable       n/a"),
    }
    Ok(0)
}

pub fn cmd_auction(args: &AuctionArgs) -> Result<u8, CliError> {
    let (s, opts) = scenario::load(&args.common.scenario)?;
    let eff = effective(&args.common, &opts);
    let known_side = match args.known_side {
        1 => Player::One,
        2 => Player::Two,
        other => {
            return Err(CliError::Input(format!(
                "--known-side must be 1 or 2, got {other}"
            )))
        }
    };
    let (eq, mode) = match args.point_mass {
        Some(v) => {
            let opp = match known_side {
                Player::One => &s.f2,
                Player::Two => &s.f1,
            };
            (solve_one_sided(v, opp, known_side)?, "one_sided")
        }
        None => (solve_two_sided(&s.f1, &s.f2)?, "two_sided"),
    };

    let n = eq.h1.values().len();
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        rows.push(format!(
            "{},{},{}",
            num(eq.h1.beta(k)),
            num(eq.h1.values()[k]),
            num(eq.h2.values()[k])
        ));
    }
    write_csv(&eff.out, "auction_curves.csv", "beta,h1,h2", &rows)?;

    let oracle_metrics = if args.verify {
        Some(oracle_agreement(&s, &eq, args.point_mass, known_side, eff.grid_n)?)
    } else {
        None
    };
    let value = json!({
        "x_sigma": eq.x_sigma,
        "c1": eq.c1,
        "c2": eq.c2,
        "mode": mode,
        "point_mass": opt_num(args.point_mass),
        "known_side": if args.point_mass.is_some() { json!(args.known_side) } else { Value::Null },
        "oracle": oracle_metrics.clone().unwrap_or(Value::Null),
        "provenance": provenance(eff.grid_n, eff.tol, eff.reproducible),
    });
    write_json(&eff.out, "auction_summary.json", &value)?;

    println!("auction summary ({mode})");
    println!("  x_sigma {}", num(eq.x_sigma));
    println!("  c1      {}", num(eq.c1));
    println!("  c2      {}", num(eq.c2));
    if let Some(m) = oracle_metrics {
        println!(
            "  oracle  x_gap {} c1_gap {} c2_gap {} sup_norm {}",
            num(m["x_gap"].as_f64().unwrap_or(f64::NAN)),
            num(m["c1_gap"].as_f64().unwrap_or(f64::NAN)),
            num(m["c2_gap"].as_f64().unwrap_or(f64::NAN)),
            num(m["sup_norm"].as_f64().unwrap_or(f64::NAN)),
        );
    }
    Ok(0)
}

/// Fictitious-play cross-check of a solved equilibrium.
fn oracle_agreement(
    s: &Scenario,
    eq: &AuctionEq,
    point_mass: Option<f64>,
    known_side: Player,
    grid_n: usize,
) -> Result<Value, CliError> {
    let top = eq.x_sigma * 1.02;
    let bids = DiscreteGame::uniform_bids(top, (2 * grid_n + 1).max(201));
    let point = |v: f64| vec![WeightedType { value: v, weight: 1.0 }];
    let game = match (point_mass, known_side) {
        (Some(v), Player::One) => {
            DiscreteGame::new(point(v), oracle::discretize(&s.f2, grid_n)?, bids)?
        }
        (Some(v), Player::Two) => {
            DiscreteGame::new(oracle::discretize(&s.f1, grid_n)?, point(v), bids)?
        }
        (None, _) => DiscreteGame::new(
            oracle::discretize(&s.f1, grid_n)?,
            oracle::discretize(&s.f2, grid_n)?,
            bids,
        )?,
    };
    let out = oracle::fictitious_play(&game, 60_000, TieRule::CoinFlip)?;
    let mut sup: f64 = 0.0;
    for k in 0..=100 {
        let beta = eq.x_sigma * k as f64 / 100.0;
        sup = sup.max((oracle::empirical_cdf(&out.pmf1, game.bids(), beta) - eq.h1.eval(beta)).abs());
        sup = sup.max((oracle::empirical_cdf(&out.pmf2, game.bids(), beta) - eq.h2.eval(beta)).abs());
    }
    Ok(json!({
        "x_gap": (out.x_max - eq.x_sigma).abs(),
        "c1_gap": (out.c1 - eq.c1).abs(),
        "c2_gap": (out.c2 - eq.c2).abs(),
        "sup_norm": sup,
        "iterations": 60_000,
        "max_regret": out.max_regret,
    }))
}

struct Check {
    name: &'static str,
    ok: bool,
    detail: String,
}

pub fn cmd_verify(args: &CommonArgs) -> Result<u8, CliError> {
    let (s, opts) = scenario::load(&args.scenario)?;
    let eff = effective(args, &opts);
    let mut checks = Vec::new();
    run_invariant_suite(&s, eff.grid_n, eff.tol, &mut checks)?;

    let violations = checks.iter().filter(|c| !c.ok).count();
    let value = json!({
        "ok": violations == 0,
        "violations": violations,
        "checks": checks
            .iter()
            .map(|c| json!({ "check": c.name, "ok": c.ok, "detail": c.detail }))
            .collect::<Vec<_>>(),
        "provenance": provenance(eff.grid_n, eff.tol, eff.reproducible),
    });
    write_json(&eff.out, "verify_report.json", &value)?;

    // oracle refinement table: mean threshold gap at three grid sizes
    let mut rows = Vec::new();
    for n in [eff.grid_n / 2, eff.grid_n, eff.grid_n * 2] {
        let n = n.max(10);
        let gap = mean_threshold_gap(&s, n)?;
        rows.push(format!("{n},{}", num(gap)));
    }
    write_csv(
        &eff.out,
        "verify_convergence.csv",
        "grid_n,mean_threshold_gap",
        &rows,
    )?;

    for c in &checks {
        println!("{} {}: {}", if c.ok { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    println!(
        "{} checks, {} violation(s)",
        checks.len(),
        violations
    );
    Ok(if violations == 0 { 0 } else { 1 })
}

fn mean_threshold_gap(s: &Scenario, grid_n: usize) -> Result<f64, CliError> {
    if s.v1_lo() == 0.0 {
        return Ok(0.0);
    }
    let b_max = (s.v2_hi() - s.v1_lo()).max(0.0);
    let mut total = 0.0;
    let mut count = 0usize;
    for k in 1..=3 {
        let b = b_max * k as f64 / 4.0;
        let analytic = bribing::rejection_threshold(b, s.v1_lo(), &s.f2)?.a2();
        let brute = oracle::brute_threshold(b, s.v1_lo(), &s.f2, grid_n)?;
        if let (Some(a), Some(g)) = (analytic, brute) {
            total += (a - g).abs();
            count += 1;
        }
    }
    Ok(if count == 0 { 0.0 } else { total / count as f64 })
}

fn run_invariant_suite(
    s: &Scenario,
    grid_n: usize,
    tol: f64,
    checks: &mut Vec<Check>,
) -> Result<(), CliError> {
    let push = |checks: &mut Vec<Check>, name, ok, detail| {
        checks.push(Check { name, ok, detail });
    };

    // distributions: round-trip and truncation composition
    for (label, d) in [("f1", &s.f1), ("f2", &s.f2)] {
        let mut worst: f64 = 0.0;
        for k in 1..100 {
            let p = k as f64 / 100.0;
            let v = d.quantile(p).map_err(CliError::from)?;
            worst = worst.max((d.cdf(v) - p).abs());
        }
        push(
            checks,
            "cdf_quantile_roundtrip",
            worst <= 1e-9,
            format!("{label}: worst gap {}", num(worst)),
        );
    }
    {
        let d = &s.f2;
        let lo = d.support_lo();
        let hi = d.support_hi();
        let x = lo + 0.2 * (hi - lo);
        let y = lo + 0.45 * (hi - lo);
        let once = d.truncate_below(y).map_err(CliError::from)?;
        let twice = d
            .truncate_below(x)
            .and_then(|t| t.truncate_below(y))
            .map_err(CliError::from)?;
        let mut worst: f64 = 0.0;
        for k in 0..=40 {
            let v = y + (hi - y) * k as f64 / 40.0;
            worst = worst.max((once.cdf(v) - twice.cdf(v)).abs());
        }
        push(
            checks,
            "truncation_composes",
            worst <= 1e-9,
            format!("worst gap {}", num(worst)),
        );
    }
    {
        let d = &s.f2;
        let lo = d.support_lo();
        let hi = d.support_hi();
        let mut prev = f64::INFINITY;
        let mut ok = true;
        for k in 1..=12 {
            let x = lo + (hi - lo) * k as f64 / 13.0;
            let cur = d
                .tail_recip_integral(x)
                .map_err(CliError::from)?
                .finite()
                .unwrap_or(f64::INFINITY);
            if cur >= prev {
                ok = false;
            }
            prev = cur;
        }
        push(checks, "tail_integral_decreasing", ok, String::from("12-point grid"));
    }

    // auction identities on both one-sided continuations
    for (label, eq) in [
        ("G(F1, v2_hi)", solve_one_sided(s.v2_hi(), &s.f1, Player::Two)?),
        ("G(v1_hi, F2)", solve_one_sided(s.v1_hi(), &s.f2, Player::One)?),
    ] {
        let ok = eq.c1 * eq.c2 <= 1e-9
            && eq.h1.is_nondecreasing()
            && eq.h2.is_nondecreasing()
            && (eq.h1.eval(eq.x_sigma) - 1.0).abs() <= 1e-9
            && (eq.h2.eval(eq.x_sigma) - 1.0).abs() <= 1e-9;
        push(
            checks,
            "auction_identities",
            ok,
            format!("{label}: c1*c2 = {}", num(eq.c1 * eq.c2)),
        );
    }

    // bribing: threshold monotone in b, interior indifference residual
    if s.v1_lo() > 0.0 {
        let b_max = (s.v2_hi() - s.v1_lo()).max(0.0);
        if b_max > 0.0 {
            let mut prev = -1.0;
            let mut monotone = true;
            let mut worst_resid: f64 = 0.0;
            for k in 0..100 {
                let b = b_max * 0.999 * k as f64 / 99.0;
                match bribing::rejection_threshold(b, s.v1_lo(), &s.f2)? {
                    RejectionReply::Interval { a2, continuation } => {
                        if a2 < prev - 1e-7 {
                            monotone = false;
                        }
                        prev = a2;
                        if a2 > s.v2_lo() + 1e-9 {
                            worst_resid = worst_resid.max((continuation.c1 * a2 - b).abs());
                        }
                    }
                    RejectionReply::FullAcceptance => {}
                }
            }
            push(
                checks,
                "rejection_threshold_monotone",
                monotone,
                String::from("100-point bribe grid"),
            );
            push(
                checks,
                "interior_indifference",
                worst_resid <= tol,
                format!("worst residual {}", num(worst_resid)),
            );

            let mut worst_slope: f64 = 0.0;
            let b = 0.3 * b_max;
            let mut prev_pay = bribing::deviation_payoff(s.v1_lo(), b, s)?;
            let step = (s.v1_hi() - s.v1_lo()) / 50.0;
            let mut ok = true;
            for k in 1..=50 {
                let v1 = s.v1_lo() + step * k as f64;
                let cur = bribing::deviation_payoff(v1, b, s)?;
                let slope = (cur - prev_pay) / step;
                worst_slope = worst_slope.max(slope);
                if !(-1e-6..=1.0 + 1e-6).contains(&slope) {
                    ok = false;
                }
                prev_pay = cur;
            }
            push(
                checks,
                "deviation_slope_bounded",
                ok,
                format!("max slope {}", num(worst_slope)),
            );
        }

        // requesting: extreme-belief ordering of the rejection thresholds
        let mut ok = true;
        let mut worst: f64 = 0.0;
        for k in 0..100 {
            let r = s.v1_hi() * k as f64 / 99.0;
            let low = request_rejection_threshold(r, s.v1_lo(), &s.f2)?;
            let high = request_rejection_threshold(r, s.v1_hi(), &s.f2)?;
            let gap = low.alpha2_clamped(&s.f2) - high.alpha2_clamped(&s.f2);
            worst = worst.min(gap);
            if gap < -1e-7 {
                ok = false;
            }
        }
        push(
            checks,
            "belief_ordering_alpha2",
            ok,
            format!("min ordered gap {}", num(worst)),
        );

        // partial replies pin the continuation's top bid to the request
        let mut worst: f64 = 0.0;
        for k in 0..100 {
            let r = s.v1_hi() * k as f64 / 99.0;
            match request_rejection_threshold(r, s.v1_hi(), &s.f2)? {
                RequestReply::Partial { continuation, .. } => {
                    worst = worst.max((continuation.x_sigma - r).abs());
                }
                RequestReply::FullRejection { continuation } => {
                    worst = worst.max((continuation.x_sigma - r).max(0.0));
                }
                RequestReply::FullAcceptance => {}
            }
        }
        push(
            checks,
            "request_bid_pinned",
            worst <= tol,
            format!("worst |x - r| {}", num(worst)),
        );
    } else {
        push(
            checks,
            "rejection_threshold_monotone",
            true,
            String::from("skipped: zero lowest type uses the limit threshold a2 = b"),
        );
    }

    // oracle agreement at the configured grid
    if s.v1_lo() > 0.0 {
        let gap = mean_threshold_gap(s, grid_n)?;
        let step = (s.v2_hi() - s.v2_lo()) / grid_n as f64;
        push(
            checks,
            "oracle_threshold_agreement",
            gap <= 2.0 * step,
            format!("mean gap {} at grid {}", num(gap), grid_n),
        );
    }
    Ok(())
}
