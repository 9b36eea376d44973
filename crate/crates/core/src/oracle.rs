//! Brute-force validation: discretized games solved by fictitious play and
//! grid re-derivations of rejection thresholds.
//!
//! These routines certify the analytical solvers in tests. They share no
//! root-finding machinery with the modules they check: equilibria come from
//! damped best-response averaging on a finite bid grid, thresholds from a
//! plain scan over candidate types.

use crate::auction::{self, Player};
use crate::dist::Dist;
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// A type with its probability weight in a discretized prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedType {
    pub value: f64,
    pub weight: f64,
}

/// A finite two-player all-pay game: weighted type grids and a shared bid
/// grid that must start at zero.
#[derive(Debug, Clone)]
pub struct DiscreteGame {
    types1: Vec<WeightedType>,
    types2: Vec<WeightedType>,
    bids: Vec<f64>,
}

impl DiscreteGame {
    pub fn new(
        types1: Vec<WeightedType>,
        types2: Vec<WeightedType>,
        bids: Vec<f64>,
    ) -> Result<DiscreteGame> {
        for types in [&types1, &types2] {
            if types.is_empty() {
                return Err(Error::Precondition("empty type grid"));
            }
            let sum: f64 = types.iter().map(|t| t.weight).sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::Precondition("type weights must sum to 1"));
            }
            if types.iter().any(|t| t.weight < 0.0) {
                return Err(Error::Precondition("negative type weight"));
            }
            if types.windows(2).any(|w| w[1].value <= w[0].value) {
                return Err(Error::Precondition("type grid must be strictly increasing"));
            }
        }
        if bids.first() != Some(&0.0) {
            return Err(Error::Precondition("bid grid must start at 0"));
        }
        if bids.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Precondition("bid grid must be strictly increasing"));
        }
        Ok(DiscreteGame { types1, types2, bids })
    }

    /// Uniform bid grid on `[0, hi]` with `n` points.
    pub fn uniform_bids(hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| hi * k as f64 / (n - 1) as f64).collect()
    }

    pub fn bids(&self) -> &[f64] {
        &self.bids
    }

    pub fn types(&self, side: Player) -> &[WeightedType] {
        match side {
            Player::One => &self.types1,
            Player::Two => &self.types2,
        }
    }
}

/// `n` equal-probability quantile midpoints of `d`.
pub fn discretize(d: &Dist, n: usize) -> Result<Vec<WeightedType>> {
    if n < 2 {
        return Err(Error::Precondition("discretization needs at least 2 points"));
    }
    let mut types = Vec::with_capacity(n);
    for k in 1..=n {
        types.push(WeightedType {
            value: d.quantile((k as f64 - 0.5) / n as f64)?,
            weight: 1.0 / n as f64,
        });
    }
    Ok(types)
}

/// Tie handling at equal bids.
///
/// `CoinFlip` flips a fair coin at every tie and is the rule used for the
/// play dynamics: it is the only self-consistent finite-game rule, and on an
/// equilibrium profile the zero-tie event has probability `c1 * c2 = 0`, so
/// it measures the same summaries as the continuum convention.
///
/// `AtomAtZero` grants a zero bidder the opponent's full zero atom as win
/// probability: the continuum convention that prices the zero atom at
/// `c * v`. As a dynamic it makes "both players at zero" self-reinforcing
/// (each believes it wins for sure), so it is suited to payoff evaluation
/// against a fixed profile, not to the averaging loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieRule {
    AtomAtZero,
    CoinFlip,
}

/// Per-type mixed strategies over the bid grid.
#[derive(Debug, Clone)]
pub struct MixedProfile {
    pub strategies: Vec<Vec<f64>>,
}

/// Outcome of a fictitious-play run: per-type strategies, aggregate bid
/// PMFs, the empirical `(x, c1, c2)` summary, and per-type regrets.
#[derive(Debug, Clone)]
pub struct PlayOutcome {
    pub profile1: MixedProfile,
    pub profile2: MixedProfile,
    pub pmf1: Vec<f64>,
    pub pmf2: Vec<f64>,
    pub c1: f64,
    pub c2: f64,
    pub x_max: f64,
    pub regret1: Vec<f64>,
    pub regret2: Vec<f64>,
    pub max_regret: f64,
}

/// Win probabilities for every bid against an opponent PMF.
fn win_probs(pmf: &[f64], tie: TieRule, out: &mut [f64]) {
    let mut below = 0.0;
    for (j, &p) in pmf.iter().enumerate() {
        out[j] = match (j, tie) {
            (0, TieRule::AtomAtZero) => p,
            _ => below + 0.5 * p,
        };
        below += p;
    }
}

/// Best responses for all types at once.
///
/// The objective `v * win(b) - b` has increasing differences in `(v, b)`,
/// so the smallest argmax is nondecreasing in the type and divide and
/// conquer over the type range needs only `O((T + B) log T)` work.
fn best_responses(values: &[f64], win: &[f64], bids: &[f64], out: &mut [usize]) {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        values: &[f64],
        win: &[f64],
        bids: &[f64],
        out: &mut [usize],
        t_lo: usize,
        t_hi: usize,
        b_lo: usize,
        b_hi: usize,
    ) {
        if t_lo > t_hi {
            return;
        }
        let t_mid = (t_lo + t_hi) / 2;
        let v = values[t_mid];
        let mut best = b_lo;
        let mut best_val = f64::NEG_INFINITY;
        for b in b_lo..=b_hi {
            let val = v * win[b] - bids[b];
            if val > best_val {
                best_val = val;
                best = b;
            }
        }
        out[t_mid] = best;
        if t_mid > t_lo {
            rec(values, win, bids, out, t_lo, t_mid - 1, b_lo, best);
        }
        if t_mid < t_hi {
            rec(values, win, bids, out, t_mid + 1, t_hi, best, b_hi);
        }
    }
    if !values.is_empty() {
        rec(values, win, bids, out, 0, values.len() - 1, 0, bids.len() - 1);
    }
}

/// Damped fictitious play from uniform initial strategies.
///
/// Each iteration best-responds every type to the opponent's average
/// aggregate bid distribution and folds the response in with weight `1/t`.
/// The reported profile averages only the second half of the run; the
/// burn-in steers toward the quasi-equilibrium but would otherwise
/// contaminate the average. Convergence is not guaranteed; it surfaces as
/// the reported regret.
pub fn fictitious_play(g: &DiscreteGame, iters: usize, tie: TieRule) -> Result<PlayOutcome> {
    if iters < 1 {
        return Err(Error::Precondition("at least one iteration"));
    }
    let nb = g.bids.len();
    let v1: Vec<f64> = g.types1.iter().map(|t| t.value).collect();
    let v2: Vec<f64> = g.types2.iter().map(|t| t.value).collect();
    let w1: Vec<f64> = g.types1.iter().map(|t| t.weight).collect();
    let w2: Vec<f64> = g.types2.iter().map(|t| t.weight).collect();

    // average = sum of BR indicators over the run; only the counts need
    // updating per iteration
    let burn_in = 1;
    let mut counts1 = vec![vec![0u32; nb]; v1.len()];
    let mut counts2 = vec![vec![0u32; nb]; v2.len()];
    let mut pmf1 = vec![1.0 / nb as f64; nb];
    let mut pmf2 = vec![1.0 / nb as f64; nb];
    let mut win1 = vec![0.0; nb];
    let mut win2 = vec![0.0; nb];
    let mut br1 = vec![0usize; v1.len()];
    let mut br2 = vec![0usize; v2.len()];
    let mut add1 = vec![0.0; nb];
    let mut add2 = vec![0.0; nb];
    let mut counted = 0usize;

    for t in 1..iters {
        win_probs(&pmf2, tie, &mut win1);
        win_probs(&pmf1, tie, &mut win2);
        best_responses(&v1, &win1, &g.bids, &mut br1);
        best_responses(&v2, &win2, &g.bids, &mut br2);
        add1.iter_mut().for_each(|x| *x = 0.0);
        add2.iter_mut().for_each(|x| *x = 0.0);
        let record = t >= burn_in;
        for (i, &b) in br1.iter().enumerate() {
            if record {
                counts1[i][b] += 1;
            }
            add1[b] += w1[i];
        }
        for (i, &b) in br2.iter().enumerate() {
            if record {
                counts2[i][b] += 1;
            }
            add2[b] += w2[i];
        }
        if record {
            counted += 1;
        }
        let lam = 1.0 / (t + 1) as f64;
        for (p, &a) in pmf1.iter_mut().zip(&add1) {
            *p += lam * (a - *p);
        }
        for (p, &a) in pmf2.iter_mut().zip(&add2) {
            *p += lam * (a - *p);
        }
    }

    let counted = counted.max(1);
    let to_profile = |counts: &Vec<Vec<u32>>| -> MixedProfile {
        let strategies = counts
            .iter()
            .map(|c| {
                let mut s: Vec<f64> = c
                    .iter()
                    .map(|&k| (k as f64 + 1.0 / nb as f64) / counted as f64)
                    .collect();
                let sum: f64 = s.iter().sum();
                s.iter_mut().for_each(|x| *x /= sum);
                s
            })
            .collect();
        MixedProfile { strategies }
    };
    let profile1 = to_profile(&counts1);
    let profile2 = to_profile(&counts2);
    // aggregate tail-average PMFs for the summary statistics
    let aggregate = |profile: &MixedProfile, w: &[f64]| -> Vec<f64> {
        let mut pmf = vec![0.0; nb];
        for (strat, &weight) in profile.strategies.iter().zip(w) {
            for (j, &p) in strat.iter().enumerate() {
                pmf[j] += weight * p;
            }
        }
        pmf
    };
    let pmf1 = aggregate(&profile1, &w1);
    let pmf2 = aggregate(&profile2, &w2);

    // regret against the final aggregates
    win_probs(&pmf2, tie, &mut win1);
    win_probs(&pmf1, tie, &mut win2);
    let regret_of = |values: &[f64], profile: &MixedProfile, win: &[f64]| -> Vec<f64> {
        values
            .iter()
            .zip(&profile.strategies)
            .map(|(&v, strat)| {
                let mut best = f64::NEG_INFINITY;
                let mut actual = 0.0;
                for ((&w, &b), &p) in win.iter().zip(&g.bids).zip(strat) {
                    let pay = v * w - b;
                    best = best.max(pay);
                    actual += p * pay;
                }
                best - actual
            })
            .collect()
    };
    let regret1 = regret_of(&v1, &profile1, &win1);
    let regret2 = regret_of(&v2, &profile2, &win2);
    let max_regret = regret1
        .iter()
        .chain(&regret2)
        .fold(0.0f64, |acc, &r| acc.max(r));

    // empirical top of the common bid support: smoothing leaves ~1/counted
    // of stray mass, so read the top at a matching quantile rather than the
    // literal maximum
    let tail = (2.0 / counted as f64).max(1e-4);
    let top_of = |pmf: &[f64]| -> f64 {
        let mut acc = 0.0;
        for (&p, &b) in pmf.iter().zip(&g.bids) {
            acc += p;
            if acc >= 1.0 - tail {
                return b;
            }
        }
        *g.bids.last().expect("nonempty")
    };
    let x_max = top_of(&pmf1).max(top_of(&pmf2));

    Ok(PlayOutcome {
        c1: pmf1[0],
        c2: pmf2[0],
        x_max,
        profile1,
        profile2,
        pmf1,
        pmf2,
        regret1,
        regret2,
        max_regret,
    })
}

/// Aggregate empirical bid CDF of one side at a set of bids.
pub fn empirical_cdf(pmf: &[f64], bids: &[f64], at: f64) -> f64 {
    let mut acc = 0.0;
    for (j, &b) in bids.iter().enumerate() {
        if b > at {
            break;
        }
        acc += pmf[j];
    }
    acc.min(1.0)
}

/// Grid re-derivation of the bribing rejection threshold: scans candidate
/// thresholds, solves the one-sided continuation for each, and returns the
/// candidate whose indifference residual `|c1 * a2 - b|` is smallest.
///
/// Returns `None` when no candidate comes close to indifference, which is
/// the full-acceptance band.
pub fn brute_threshold(
    b: f64,
    belief_v1: f64,
    f2: &Dist,
    grid_n: usize,
) -> Result<Option<f64>> {
    if b < 0.0 || !(belief_v1 > 0.0) {
        return Err(Error::Precondition("bribe and belief must be nonnegative/positive"));
    }
    if grid_n < 2 {
        return Err(Error::Precondition("grid needs at least 2 points"));
    }
    let lo = f2.support_lo();
    let hi = f2.support_hi();
    let span = hi - lo;
    let step = span / grid_n as f64;
    let mut residuals = Vec::with_capacity(grid_n);
    let mut max_u2 = 0.0f64;
    for k in 0..grid_n {
        // stay strictly inside so the truncation keeps mass
        let a = lo + step * (k as f64 + 0.5);
        let eq = auction::solve_one_sided(belief_v1, &f2.truncate_below(a)?, Player::One)?;
        let u2 = eq.c1 * a;
        max_u2 = max_u2.max(u2);
        residuals.push((a, (u2 - b).abs()));
    }
    // corner: every type rejects because even the lowest strictly prefers to
    let corner_eq = auction::solve_one_sided(belief_v1, f2, Player::One)?;
    if corner_eq.c1 * lo > b {
        return Ok(Some(lo));
    }
    if b > max_u2 + 2.0 * step {
        return Ok(None);
    }
    // the zero bribe leaves a flat band of candidates that all meet the
    // indifference exactly; the canonical reply is the top of that band
    let best = residuals
        .iter()
        .map(|&(_, r)| r)
        .fold(f64::INFINITY, f64::min);
    Ok(residuals
        .iter()
        .rev()
        .find(|&&(_, r)| r <= best + 1e-12)
        .map(|&(a, _)| a))
}
