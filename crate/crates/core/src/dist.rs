//! Piecewise-polynomial type distributions on bounded supports.
//!
//! A [`Dist`] stores a CDF as ordered polynomial pieces. This covers the
//! uniform family exactly as well as kinked CDFs such as `v^2/3000` on
//! `[0,30]` glued to `v/100` on `[30,100]`; densities may jump at piece
//! boundaries, only the CDF itself must be continuous and strictly
//! increasing. Quantiles use per-piece closed forms up to degree two and
//! bracketed bisection above that.
//!
//! The reciprocal-quantile integral `∫ ds / F^{-1}(s)` is the workhorse of
//! every equilibrium boundary condition. It diverges exactly when the
//! integration range touches `s = 0` while the support starts at zero with a
//! positive density there; [`Dist::recip_quantile_integral`] detects that
//! case from the CDF's linear coefficient and reports [`ExtReal::Infinite`].

use crate::math;
use crate::{Error, Result};
use alloc::string::String;
use alloc::vec::Vec;

/// Tolerance for user-supplied pieces agreeing at shared endpoints.
const ADJACENCY_TOL: f64 = 1e-12;
/// Looser agreement tolerance for distributions produced by truncation.
const INTERNAL_ADJACENCY_TOL: f64 = 1e-9;
/// Linear CDF coefficients below this count as a zero density at the origin.
const DIVERGENCE_A1_TOL: f64 = 1e-14;
/// Absolute/relative quadrature targets for reciprocal-quantile integrals.
const QUAD_ABS_TOL: f64 = 1e-12;
const QUAD_REL_TOL: f64 = 1e-12;

/// A nonnegative extended real: either finite or `+∞`.
///
/// `+∞` absorbs addition and dominates every finite value in comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtReal::Infinite)
    }

    /// The finite value, if any.
    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(*v),
            ExtReal::Infinite => None,
        }
    }

}

impl core::ops::Add for ExtReal {
    type Output = ExtReal;

    fn add(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::Infinite,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::Finite(v)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        use core::cmp::Ordering;
        match (self, other) {
            (ExtReal::Infinite, ExtReal::Infinite) => Some(Ordering::Equal),
            (ExtReal::Infinite, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::Finite(_), ExtReal::Infinite) => Some(Ordering::Less),
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
        }
    }
}

/// One CDF segment: the polynomial `coeffs[0] + coeffs[1] v + ...` on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

impl Piece {
    pub fn new(lo: f64, hi: f64, coeffs: Vec<f64>) -> Self {
        Piece { lo, hi, coeffs }
    }

    fn eval(&self, v: f64) -> f64 {
        horner(&self.coeffs, v)
    }

    fn eval_density(&self, v: f64) -> f64 {
        let mut acc = 0.0;
        for j in (1..self.coeffs.len()).rev() {
            acc = acc * v + self.coeffs[j] * j as f64;
        }
        acc
    }

    /// Root of `P(v) = s` inside `[lo, hi]`; closed form up to degree two.
    fn quantile_in(&self, s: f64) -> f64 {
        let d = degree(&self.coeffs);
        let root = match d {
            0 => None,
            1 => Some(self.lo + (s - self.eval(self.lo)) / self.coeffs[1]),
            2 => quadratic_root(&self.coeffs, s, self.lo, self.hi),
            _ => None,
        };
        match root {
            Some(r) if r >= self.lo - 1e-9 && r <= self.hi + 1e-9 => clamp(r, self.lo, self.hi),
            _ => {
                // bracketed bisection to 1e-12 in v
                math::bisect_root(|v| self.eval(v) - s, self.lo, self.hi, 1e-12, "piece quantile")
                    .unwrap_or_else(|_| if s <= self.eval(self.lo) { self.lo } else { self.hi })
            }
        }
    }
}

fn horner(coeffs: &[f64], v: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * v + c;
    }
    acc
}

fn degree(coeffs: &[f64]) -> usize {
    coeffs
        .iter()
        .rposition(|&c| c != 0.0)
        .unwrap_or(0)
}

fn clamp(v: f64, lo: f64, hi: f64) -> f64 {
    v.max(lo).min(hi)
}

/// Stable quadratic solve for `a0 + a1 v + a2 v^2 = s`, root in `[lo, hi]`.
fn quadratic_root(coeffs: &[f64], s: f64, lo: f64, hi: f64) -> Option<f64> {
    let a2 = coeffs[2];
    let a1 = coeffs[1];
    let a0 = coeffs[0] - s;
    let disc = a1 * a1 - 4.0 * a2 * a0;
    if disc < 0.0 {
        return None;
    }
    let sq = math::sqrt(disc);
    let q = -0.5 * (a1 + a1.signum() * sq);
    let candidates = [
        if a2 != 0.0 { q / a2 } else { f64::NAN },
        if q != 0.0 { a0 / q } else { f64::NAN },
    ];
    let tol = 1e-9 * (1.0 + hi.abs());
    candidates
        .into_iter()
        .find(|r| r.is_finite() && *r >= lo - tol && *r <= hi + tol)
}

/// An atomless continuous type distribution on a bounded support.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist {
    pieces: Vec<Piece>,
}

impl Dist {
    /// Uniform distribution on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64) -> Result<Dist> {
        let w = hi - lo;
        Dist::from_pieces(alloc::vec![Piece::new(lo, hi, alloc::vec![-lo / w, 1.0 / w])])
    }

    /// Builds a distribution from ordered CDF pieces, validating that they
    /// form a continuous, strictly increasing CDF from 0 to 1.
    pub fn from_pieces(pieces: Vec<Piece>) -> Result<Dist> {
        Dist::build(pieces, ADJACENCY_TOL)
    }

    fn build(mut pieces: Vec<Piece>, adjacency_tol: f64) -> Result<Dist> {
        if pieces.is_empty() {
            return Err(Error::InvalidDistribution(String::from("no pieces")));
        }
        for p in &pieces {
            if !p.lo.is_finite() || !p.hi.is_finite() || p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidDistribution(String::from("non-finite data")));
            }
            if p.lo < 0.0 {
                return Err(Error::InvalidDistribution(String::from(
                    "support must be nonnegative",
                )));
            }
            if !(p.hi > p.lo) {
                return Err(Error::InvalidDistribution(String::from(
                    "piece has empty interior",
                )));
            }
            if p.coeffs.is_empty() {
                return Err(Error::InvalidDistribution(String::from("empty polynomial")));
            }
        }
        let scale = pieces.last().expect("nonempty").hi.max(1.0);
        for k in 1..pieces.len() {
            if (pieces[k].lo - pieces[k - 1].hi).abs() > 1e-9 * scale {
                return Err(Error::InvalidDistribution(String::from(
                    "pieces are not contiguous",
                )));
            }
            pieces[k].lo = pieces[k - 1].hi;
            let left = pieces[k - 1].eval(pieces[k - 1].hi);
            let right = pieces[k].eval(pieces[k].lo);
            if (left - right).abs() > adjacency_tol {
                return Err(Error::InvalidDistribution(String::from(
                    "adjacent pieces disagree at the shared endpoint",
                )));
            }
        }
        let first = pieces.first().expect("nonempty");
        let last = pieces.last().expect("nonempty");
        if first.eval(first.lo).abs() > adjacency_tol.max(1e-12) {
            return Err(Error::InvalidDistribution(String::from(
                "CDF does not start at 0",
            )));
        }
        if (last.eval(last.hi) - 1.0).abs() > adjacency_tol.max(1e-12) {
            return Err(Error::InvalidDistribution(String::from(
                "CDF does not end at 1",
            )));
        }
        for p in &pieces {
            let mut prev = p.eval(p.lo);
            for i in 1..=32 {
                let v = p.lo + (p.hi - p.lo) * i as f64 / 32.0;
                if p.eval_density(v) < -1e-12 {
                    return Err(Error::InvalidDistribution(String::from(
                        "density is negative",
                    )));
                }
                let cur = p.eval(v);
                if cur < prev - 1e-12 {
                    return Err(Error::InvalidDistribution(String::from(
                        "CDF is decreasing",
                    )));
                }
                prev = cur;
            }
            if !(p.eval(p.hi) > p.eval(p.lo)) {
                return Err(Error::InvalidDistribution(String::from(
                    "CDF is flat on a piece",
                )));
            }
        }
        Ok(Dist { pieces })
    }

    pub fn support_lo(&self) -> f64 {
        self.pieces.first().expect("nonempty").lo
    }

    pub fn support_hi(&self) -> f64 {
        self.pieces.last().expect("nonempty").hi
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// CDF value at `v`; clamps to 0 below the support and 1 above it.
    pub fn cdf(&self, v: f64) -> f64 {
        if v <= self.support_lo() {
            return 0.0;
        }
        if v >= self.support_hi() {
            return 1.0;
        }
        let idx = self.pieces.partition_point(|p| p.hi < v);
        let idx = idx.min(self.pieces.len() - 1);
        clamp(self.pieces[idx].eval(v), 0.0, 1.0)
    }

    /// Density at `v` (piecewise derivative of the CDF); 0 outside the support.
    pub fn pdf(&self, v: f64) -> f64 {
        if v < self.support_lo() || v > self.support_hi() {
            return 0.0;
        }
        let idx = self.pieces.partition_point(|p| p.hi < v);
        let idx = idx.min(self.pieces.len() - 1);
        self.pieces[idx].eval_density(v).max(0.0)
    }

    /// Generalized inverse: the smallest `v` in the support with `cdf(v) >= p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain("quantile probability outside [0, 1]"));
        }
        Ok(self.quantile_clamped(p))
    }

    pub(crate) fn quantile_clamped(&self, p: f64) -> f64 {
        let p = clamp(p, 0.0, 1.0);
        if p <= 0.0 {
            return self.support_lo();
        }
        if p >= 1.0 {
            return self.support_hi();
        }
        for piece in &self.pieces {
            if piece.eval(piece.hi) >= p {
                return piece.quantile_in(p);
            }
        }
        self.support_hi()
    }

    /// The distribution conditioned on `v >= x`: CDF `(F(v)-F(x))/(1-F(x))`.
    pub fn truncate_below(&self, x: f64) -> Result<Dist> {
        if x < self.support_lo() - 1e-12 {
            return Err(Error::Precondition("truncation point below the support"));
        }
        if x >= self.support_hi() {
            return Err(Error::DegenerateSupport(
                "conditioning on v >= x with x at or above the support top",
            ));
        }
        let x = x.max(self.support_lo());
        let q = self.cdf(x);
        let w = 1.0 - q;
        if w <= 1e-12 {
            return Err(Error::DegenerateSupport(
                "no mass above the truncation point",
            ));
        }
        let mut pieces = Vec::new();
        for p in &self.pieces {
            if p.hi <= x {
                continue;
            }
            let mut coeffs: Vec<f64> = p.coeffs.iter().map(|c| c / w).collect();
            coeffs[0] -= q / w;
            let mut np = Piece::new(p.lo.max(x), p.hi, coeffs);
            if pieces.is_empty() {
                // re-anchor against the cancellation in (F - q)/w
                let drift = np.eval(np.lo);
                np.coeffs[0] -= drift;
            }
            pieces.push(np);
        }
        // conditioning divides the CDF by w, so round-off grows by 1/w
        Dist::build(pieces, INTERNAL_ADJACENCY_TOL.max(1e-14 / w))
    }

    /// The distribution conditioned on `v <= x`: CDF `F(v)/F(x)`.
    pub fn truncate_above(&self, x: f64) -> Result<Dist> {
        if x > self.support_hi() + 1e-12 {
            return Err(Error::Precondition("truncation point above the support"));
        }
        let x = x.min(self.support_hi());
        let q = self.cdf(x);
        if q <= 1e-12 {
            return Err(Error::DegenerateSupport(
                "no mass below the truncation point",
            ));
        }
        let mut pieces = Vec::new();
        for p in &self.pieces {
            if p.lo >= x {
                break;
            }
            let coeffs: Vec<f64> = p.coeffs.iter().map(|c| c / q).collect();
            let mut np = Piece::new(p.lo, p.hi.min(x), coeffs);
            if pieces.is_empty() {
                let drift = np.eval(np.lo);
                np.coeffs[0] -= drift;
            }
            pieces.push(np);
        }
        Dist::build(pieces, INTERNAL_ADJACENCY_TOL.max(1e-14 / q))
    }

    /// `∫_{c_lo}^{c_hi} ds / F^{-1}(s)` by adaptive Gauss–Kronrod quadrature,
    /// split at piece boundaries.
    ///
    /// When the range touches `s = 0` on a support starting at zero, the
    /// integrand is singular. The first piece then decides convergence
    /// exactly: substituting `v = F^{-1}(s)` turns the head into
    /// `∫ f(v)/v dv`, which diverges iff the CDF has a positive linear
    /// coefficient at the origin and otherwise has the polynomial
    /// closed form `Σ_{j>=2} j/(j-1) · a_j · v^{j-1}`.
    pub fn recip_quantile_integral(&self, c_lo: f64, c_hi: f64) -> Result<ExtReal> {
        if !(0.0..=1.0).contains(&c_lo) || !(0.0..=1.0).contains(&c_hi) || c_lo > c_hi {
            return Err(Error::Domain(
                "integration bounds must satisfy 0 <= c_lo <= c_hi <= 1",
            ));
        }
        if c_lo == c_hi {
            return Ok(ExtReal::Finite(0.0));
        }
        let mut total = 0.0;
        let mut s_lo_piece;
        let mut s_hi_piece = 0.0;
        for (k, piece) in self.pieces.iter().enumerate() {
            s_lo_piece = if k == 0 { 0.0 } else { s_hi_piece };
            s_hi_piece = if k + 1 == self.pieces.len() {
                1.0
            } else {
                piece.eval(piece.hi)
            };
            let a = c_lo.max(s_lo_piece);
            let b = c_hi.min(s_hi_piece);
            if b <= a {
                continue;
            }
            if k == 0 && self.support_lo() == 0.0 && a == 0.0 {
                let a1 = piece.coeffs.get(1).copied().unwrap_or(0.0);
                if a1.abs() > DIVERGENCE_A1_TOL {
                    return Ok(ExtReal::Infinite);
                }
                let v_end = piece.quantile_in(b);
                let mut head = 0.0;
                let mut v_pow = v_end; // v_end^{j-1} for j = 2
                for j in 2..piece.coeffs.len() {
                    head += piece.coeffs[j] * j as f64 / (j as f64 - 1.0) * v_pow;
                    v_pow *= v_end;
                }
                total += head;
            } else {
                total += math::adaptive_quad(
                    |s| 1.0 / piece.quantile_in(s),
                    a,
                    b,
                    QUAD_ABS_TOL,
                    QUAD_REL_TOL,
                )?;
            }
        }
        Ok(ExtReal::Finite(total))
    }

    /// `∫_0^1 ds / Φ^{-1}(s|x)` where `Φ(·|x)` conditions on `v >= x`;
    /// finite whenever `x > 0`.
    pub fn tail_recip_integral(&self, x: f64) -> Result<ExtReal> {
        self.truncate_below(x)?.recip_quantile_integral(0.0, 1.0)
    }
}
