//! Scalar numerics shared by the solvers: root bracketing, golden-section
//! maximization and adaptive Gauss–Kronrod quadrature.

use crate::{Error, Result};
use alloc::vec::Vec;

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// Bisection for a root of `f` on `[lo, hi]`.
///
/// Requires a sign change over the bracket. Converges to `xtol` in the
/// abscissa; `f` need not be smooth, only sign-consistent.
pub(crate) fn bisect_root<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    what: &'static str,
) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Numeric { what, lo, hi });
    }
    let rising = flo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
///
/// Returns `(x_max, f_max)`; tolerance is on the abscissa.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    const RESP: f64 = 2.0 - 1.618_033_988_749_895; // 2 - phi
    let mut x1 = a + RESP * (b - a);
    let mut x2 = b - RESP * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (b - a).abs() <= xtol {
            break;
        }
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + RESP * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - RESP * (b - a);
            f2 = f(x2);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

// 15-point Gauss–Kronrod nodes and weights on [-1, 1] (7-point Gauss embedded).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

/// One 15-point Gauss–Kronrod panel; returns `(integral, error_estimate)`.
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

/// Adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`.
///
/// Worst-interval bisection until every panel meets its share of the
/// absolute/relative tolerance budget.
pub(crate) fn adaptive_quad<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (v0, e0) = qk15(&f, a, b);
    let mut panels: Vec<(f64, f64, f64, f64)> = alloc::vec![(a, b, v0, e0)];
    for _ in 0..2000 {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        // split the worst panel
        let (k, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap_or(core::cmp::Ordering::Equal))
            .expect("non-empty panel list");
        let (pa, pb, _, _) = panels.swap_remove(k);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            // interval at floating-point resolution; accept what we have
            let (v, e) = qk15(&f, pa, pb);
            panels.push((pa, pb, v, e));
            let total: f64 = panels.iter().map(|p| p.2).sum();
            return Ok(total);
        }
        let (v1, e1) = qk15(&f, pa, mid);
        let (v2, e2) = qk15(&f, mid, pb);
        panels.push((pa, mid, v1, e1));
        panels.push((mid, pb, v2, e2));
    }
    Err(Error::Numeric {
        what: "adaptive quadrature did not reach tolerance",
        lo: a,
        hi: b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quad_smooth() {
        let v = adaptive_quad(|x| x * x, 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert_relative_eq!(v, 1.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn quad_kinked() {
        let v = adaptive_quad(|x| (x - 0.3).abs(), 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert_relative_eq!(v, 0.5 * (0.09 + 0.49), max_relative = 1e-10);
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect_root(|x| x * x - 2.0, 0.0, 2.0, 1e-14, "sqrt2").unwrap();
        assert_relative_eq!(r, core::f64::consts::SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn bisect_rejects_no_sign_change() {
        assert!(bisect_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12, "none").is_err());
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(|x| -(x - 0.7) * (x - 0.7), 0.0, 2.0, 1e-10);
        assert_relative_eq!(x, 0.7, epsilon = 1e-8);
        assert!(v.abs() < 1e-15);
    }
}
