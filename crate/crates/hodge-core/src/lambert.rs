//! Floating-point validation layer on the Lambert curve x = y e^{-y}.
//! The exact objects (the xi family and the unstable generating functions)
//! have convergent series in the flat coordinate w, so evaluating both
//! sides numerically cross-checks the algebra against analysis with
//! explicit tail bounds.

use crate::error::{Error, Result};
use crate::xi::XiFamily;

/// A point on the Lambert curve, in all four coordinates used here:
/// the flat coordinate w, the rational coordinate t, and the curve
/// coordinates x = e^{-(w+1)}, y = (t - 1)/t = 1 - e^{-(w+1) + y}.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct LambertPoint {
    pub w: f64,
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// The building-block series S_n(w) = sum_{k >= 1} k^{k+n}/k! e^{-k(w+1)}.
/// S_0 = t - 1 and each step of the operator D raises n by one, so
/// S_n(w) = xi_n(t(w)) for n >= 0. Terms are generated by the ratio
/// term_{k+1}/term_k = (1 + 1/k)^{k+n} e^{-(w+1)}, which avoids k^k
/// overflow; summation stops once the geometric tail bound
/// term_k * q/(1 - q) with q = e^{max(n,0)/k - w} drops below `tol`.
pub fn series_sum(n: i64, w: f64, k_max: usize, tol: f64) -> Result<f64> {
    if w <= 0.0 {
        return Err(Error::InvalidInput(format!("series needs w > 0, got {w}")));
    }
    let x = (-(w + 1.0)).exp();
    let mut term = x; // k = 1 term: 1^{1+n}/1! x^1
    let mut sum = term;
    for k in 1..k_max {
        let kf = k as f64;
        term *= (1.0 + 1.0 / kf).powf(kf + n as f64) * x;
        sum += term;
        let q = ((n.max(0) as f64) / (kf + 1.0) - w).exp();
        if q < 1.0 && term * q / (1.0 - q) < tol {
            return Ok(sum);
        }
    }
    Err(Error::InvalidInput(format!(
        "series tail bound {tol} not reached within {k_max} terms (n = {n}, w = {w})"
    )))
}

/// Solve the curve for t at flat coordinate w > 0, through the convergent
/// series t = 1 + S_0(w).
pub fn t_of_w(w: f64, k_max: usize) -> Result<LambertPoint> {
    let s0 = series_sum(0, w, k_max, 1e-14)?;
    // y from s0 directly; (t - 1)/t through t would lose precision near t = 1
    Ok(LambertPoint {
        w,
        t: 1.0 + s0,
        x: (-(w + 1.0)).exp(),
        y: s0 / (1.0 + s0),
    })
}

/// The inverse map w(t) = -1/t - log(1 - 1/t), defined for t > 1.
pub fn w_of_t(t: f64) -> Result<f64> {
    if t <= 1.0 {
        return Err(Error::InvalidInput(format!("w(t) needs t > 1, got {t}")));
    }
    Ok(-1.0 / t - (1.0 - 1.0 / t).ln())
}

/// Relative error between the series S_n(w) and the polynomial xi_n
/// evaluated at t(w). The tail of the series must provably be below 1e-10,
/// otherwise the comparison is meaningless and an error is returned.
pub fn xi_series_check(n: usize, w: f64, k_max: usize, family: &XiFamily) -> Result<f64> {
    if n > 6 {
        return Err(Error::InvalidInput(format!(
            "xi series check supports n <= 6, got {n}"
        )));
    }
    if w < 0.5 {
        return Err(Error::InvalidInput(format!(
            "xi series check needs w >= 0.5 for fast convergence, got {w}"
        )));
    }
    let point = t_of_w(w, k_max)?;
    let series = series_sum(n as i64, w, k_max, 1e-10)?;
    let exact = family.xi(n).evaluate_f64(&[point.t])?;
    Ok((series - exact).abs() / exact.abs().max(f64::MIN_POSITIVE))
}

/// The constant term of the one-point unstable function: c = S_{-2}(0+),
/// summed with the polynomial-decay tail bound
/// sum_{k > K} k^{-5/2}/sqrt(2 pi) < (2/3) K^{-3/2}/sqrt(2 pi) < tol.
/// (The geometric bound is useless at w = 0 where the terms only decay
/// like k^{-5/2}.) Classically c = 1/2.
pub fn h01_constant(tol: f64) -> f64 {
    let sqrt_two_pi = (2.0 * std::f64::consts::PI).sqrt();
    let k_needed = (2.0 / (3.0 * tol * sqrt_two_pi)).powf(2.0 / 3.0).ceil() as usize;
    let x = (-1.0f64).exp();
    let mut term = x;
    let mut sum = term;
    for k in 1..k_needed {
        let kf = k as f64;
        term *= (1.0 + 1.0 / kf).powf(kf - 2.0) * x;
        sum += term;
    }
    sum
}

/// Which unstable generating function to compare.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum UnstableKind {
    H01,
    H02,
}

/// Series value, closed-form value, and their absolute difference.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct UnstableComparison {
    pub series: f64,
    pub closed: f64,
    pub abs_err: f64,
}

/// Compare an unstable generating function computed termwise against its
/// closed form on the curve:
///
///   H01(w) = S_{-2}(w) = c - 1/(2 t^2)  with c = S_{-2}(0+) = 1/2;
///   H02(w1, w2) = sum_{m1, m2 >= 1} (1/(m1 + m2))
///                 prod_i m_i^{m_i}/m_i! e^{-m_i (w_i + 1)}
///               = log((y1 - y2)/(x1 - x2)) - y1 - y2.
///
/// `w` carries one coordinate for H01 and two distinct coordinates for
/// H02; `k_max` caps the series index (per axis for H02).
pub fn unstable_eval(kind: UnstableKind, w: &[f64], k_max: usize) -> Result<UnstableComparison> {
    match kind {
        UnstableKind::H01 => {
            let [w0] = w else {
                return Err(Error::InvalidInput(
                    "H01 takes exactly one coordinate".to_string(),
                ));
            };
            let point = t_of_w(*w0, k_max)?;
            let series = series_sum(-2, *w0, k_max, 1e-10)?;
            let closed = h01_constant(1e-9) - 1.0 / (2.0 * point.t * point.t);
            Ok(UnstableComparison {
                series,
                closed,
                abs_err: (series - closed).abs(),
            })
        }
        UnstableKind::H02 => {
            let [w1, w2] = w else {
                return Err(Error::InvalidInput(
                    "H02 takes exactly two coordinates".to_string(),
                ));
            };
            if (w1 - w2).abs() < 1e-9 {
                return Err(Error::InvalidInput(
                    "H02 closed form needs distinct coordinates".to_string(),
                ));
            }
            let p1 = t_of_w(*w1, k_max)?;
            let p2 = t_of_w(*w2, k_max)?;
            let a1 = axis_terms(*w1, k_max);
            let a2 = axis_terms(*w2, k_max);
            let mut series = 0.0;
            for (m1, t1) in a1.iter().enumerate() {
                for (m2, t2) in a2.iter().enumerate() {
                    series += t1 * t2 / (m1 + m2 + 2) as f64;
                }
            }
            let closed = ((p1.y - p2.y) / (p1.x - p2.x)).ln() - p1.y - p2.y;
            Ok(UnstableComparison {
                series,
                closed,
                abs_err: (series - closed).abs(),
            })
        }
    }
}

/// m^m/m! e^{-m(w+1)} for m = 1..=k_max, by the same ratio iteration as
/// `series_sum`.
fn axis_terms(w: f64, k_max: usize) -> Vec<f64> {
    let x = (-(w + 1.0)).exp();
    let mut terms = Vec::with_capacity(k_max);
    let mut term = x;
    terms.push(term);
    for k in 1..k_max {
        let kf = k as f64;
        term *= (1.0 + 1.0 / kf).powf(kf) * x;
        terms.push(term);
    }
    terms
}

/// Relative error of the central difference -dS_n/dw against S_{n+1}.
/// The operator D is x d/dx on the series side and d/dw = -x d/dx, so the
/// two must agree up to O(h^2).
pub fn finite_difference_check(n: i64, w: f64, h: f64, k_max: usize) -> Result<f64> {
    let minus = series_sum(n, w - h, k_max, 1e-12)?;
    let plus = series_sum(n, w + h, k_max, 1e-12)?;
    let derivative = (minus - plus) / (2.0 * h);
    let target = series_sum(n + 1, w, k_max, 1e-12)?;
    Ok((derivative - target).abs() / target.abs().max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;

    const K: usize = 400;

    #[test]
    fn curve_relation() {
        for w in [0.5, 1.0, 2.0, 5.0] {
            let p = t_of_w(w, K).unwrap();
            assert!(
                (p.x - p.y * (-p.y).exp()).abs() < 1e-12,
                "x = y e^-y fails at w = {w}"
            );
        }
    }

    #[test]
    fn spot_values() {
        let p = t_of_w(1.0, 200).unwrap();
        assert!((p.x - p.y * (-p.y).exp()).abs() < 1e-12);
        assert!((p.t - 1.188487369433851).abs() < 1e-12);
        // deep in the asymptotic regime t - 1 is e^{-(w+1)} to leading order
        let far = t_of_w(20.0, K).unwrap();
        assert!((far.t - (1.0 + (-21.0f64).exp())).abs() < 1e-15);
        // w(2) = log 2 - 1/2 exactly
        assert!((w_of_t(2.0).unwrap() - (2.0f64.ln() - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        for w in [0.5, 1.0, 2.0, 5.0] {
            let p = t_of_w(w, K).unwrap();
            let back = w_of_t(p.t).unwrap();
            assert!((back - w).abs() < 1e-10, "round trip at w = {w}: {back}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(t_of_w(0.0, K).is_err());
        assert!(t_of_w(-1.0, K).is_err());
        assert!(w_of_t(1.0).is_err());
        assert!(w_of_t(0.5).is_err());
        // k_max too small for the tail bound to trigger
        assert!(series_sum(0, 0.5, 3, 1e-14).is_err());
    }

    #[test]
    fn xi_series_agreement() {
        let family = XiFamily::new();
        for n in 0..=4 {
            for w in [0.5, 1.0, 2.0] {
                let rel = xi_series_check(n, w, K, &family).unwrap();
                assert!(rel < 1e-8, "xi_{n} at w = {w}: rel err {rel}");
            }
        }
        assert!(xi_series_check(7, 1.0, K, &family).is_err());
        assert!(xi_series_check(2, 0.1, K, &family).is_err());
    }

    #[test]
    fn h01_constant_is_half() {
        let c = h01_constant(1e-9);
        assert!((c - 0.5).abs() < 1e-8, "c = {c}");
    }

    #[test]
    fn h01_series_vs_closed() {
        for w in [1.0, 2.0] {
            let cmp = unstable_eval(UnstableKind::H01, &[w], K).unwrap();
            assert!(cmp.abs_err < 1e-7, "H01 at w = {w}: {cmp:?}");
        }
    }

    #[test]
    fn h02_series_vs_closed() {
        let cmp = unstable_eval(UnstableKind::H02, &[1.0, 1.5], 60).unwrap();
        assert!(cmp.abs_err < 1e-8, "H02: {cmp:?}");
        assert!(unstable_eval(UnstableKind::H02, &[1.0, 1.0], 60).is_err());
        assert!(unstable_eval(UnstableKind::H02, &[1.0], 60).is_err());
    }

    #[test]
    fn derivative_identity() {
        for n in 0..=3 {
            let rel = finite_difference_check(n, 1.0, 1e-5, K).unwrap();
            assert!(rel < 1e-6, "derivative identity at n = {n}: rel err {rel}");
        }
    }
}
