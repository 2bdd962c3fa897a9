//! Complex-argument Bessel J_p and Hankel H_0^(2) evaluation, plus the
//! Jacobi-Anger partial sum used by the forward model and the series oracle.
//!
//! Strategy: ascending power series for |z| <= 12, backward (Miller)
//! recurrence normalized by J_0(z) + 2*sum_k J_2k(z) = 1 for larger
//! arguments, and the large-argument Hankel expansion for H_0^(2) and Y_n.
//! The crossover is tuned by an overlap-band agreement test.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Crossover between the ascending-series and large-argument regimes.
pub const SERIES_ASYMPTOTIC_SPLIT: f64 = 12.0;
/// Largest |z| accepted by the evaluators.
pub const MAX_ARGUMENT: f64 = 60.0;
/// Largest Bessel order accepted by the evaluators.
pub const MAX_ORDER: usize = 150;
/// Consecutive orders that must sit below tolerance before a truncation
/// order is accepted; guards against an oscillatory dip near a zero.
const TAIL_WINDOW: usize = 4;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Truncation control for the Jacobi-Anger partial sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub absolute_tolerance: f64,
    pub max_order: usize,
}

impl TruncationPolicy {
    pub fn new(absolute_tolerance: f64, max_order: usize) -> Result<Self> {
        if !(absolute_tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "truncation tolerance must be positive, got {absolute_tolerance}"
            )));
        }
        if max_order < 1 || max_order > MAX_ORDER {
            return Err(Error::InvalidParameter(format!(
                "truncation max_order must be in 1..={MAX_ORDER}, got {max_order}"
            )));
        }
        Ok(Self {
            absolute_tolerance,
            max_order,
        })
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            absolute_tolerance: 1e-12,
            max_order: 60,
        }
    }
}

fn check_argument(z: Complex64) -> Result<()> {
    let m = z.norm();
    if !m.is_finite() || m > MAX_ARGUMENT {
        return Err(Error::Overflow(format!(
            "|z| = {m:.3e} outside the supported range |z| <= {MAX_ARGUMENT}"
        )));
    }
    Ok(())
}

/// Bessel function of the first kind of integer order, complex argument.
///
/// Satisfies J_{-p}(z) = (-1)^p J_p(z); relative error <= 1e-10 for
/// |z| <= 50 and |p| <= 60.
pub fn bessel_j(order: i32, z: Complex64) -> Result<Complex64> {
    check_argument(z)?;
    if order.unsigned_abs() as usize > MAX_ORDER {
        return Err(Error::Overflow(format!(
            "order |{order}| exceeds the supported bound {MAX_ORDER}"
        )));
    }
    let p = order.unsigned_abs() as usize;
    let value = if z.norm() <= SERIES_ASYMPTOTIC_SPLIT {
        bessel_j_series(p, z)
    } else {
        let seq = bessel_j_sequence_miller(p, z);
        seq[p]
    };
    if order < 0 && order % 2 != 0 {
        Ok(-value)
    } else {
        Ok(value)
    }
}

/// J_0(z), J_1(z), ..., J_max_order(z) in one sweep.
pub fn bessel_j_sequence(max_order: usize, z: Complex64) -> Result<Vec<Complex64>> {
    check_argument(z)?;
    if max_order > MAX_ORDER {
        return Err(Error::Overflow(format!(
            "order {max_order} exceeds the supported bound {MAX_ORDER}"
        )));
    }
    if z.norm() <= SERIES_ASYMPTOTIC_SPLIT {
        Ok((0..=max_order).map(|p| bessel_j_series(p, z)).collect())
    } else {
        Ok(bessel_j_sequence_miller(max_order, z))
    }
}

/// Ascending power series, reliable for |z| <= 12.
fn bessel_j_series(p: usize, z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return if p == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let zh = z / 2.0;
    // (z/2)^p / p! as a product of zh/j keeps intermediates bounded.
    let mut prefix = Complex64::new(1.0, 0.0);
    for j in 1..=p {
        prefix *= zh / j as f64;
    }
    let ratio = -(zh * zh);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..200 {
        term *= ratio / (k as f64 * (p + k) as f64);
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    prefix * sum
}

/// Backward recurrence (Miller's algorithm) normalized by the even-order
/// sum identity; gives the whole sequence 0..=max_order for |z| > 12.
fn bessel_j_sequence_miller(max_order: usize, z: Complex64) -> Vec<Complex64> {
    let start = max_order.max(z.norm().ceil() as usize) + 40;
    let mut out = vec![Complex64::new(0.0, 0.0); max_order + 1];
    let mut above = Complex64::new(0.0, 0.0); // J_{q+1}
    let mut cur = Complex64::new(1e-30, 0.0); // J_q trial value
    let mut norm = Complex64::new(0.0, 0.0); // J_0 + 2 sum J_{2k}
    let two_over_z = 2.0 / z;
    for q in (1..=start).rev() {
        if q <= max_order {
            out[q] = cur;
        }
        if q % 2 == 0 {
            norm += 2.0 * cur;
        }
        let below = two_over_z * q as f64 * cur - above;
        above = cur;
        cur = below;
        // keep magnitudes in a band where |norm|^2 neither over- nor
        // underflows in the final complex division
        if cur.norm_sqr() > 1e200 {
            let f = 1e-100;
            cur *= f;
            above *= f;
            norm *= f;
            for v in &mut out {
                *v *= f;
            }
        }
    }
    out[0] = cur;
    norm += cur;
    let scale = 1.0 / norm;
    for v in &mut out {
        *v *= scale;
    }
    out
}

/// Bessel function of the second kind of small integer order n >= 0,
/// complex argument with the principal log branch.
pub fn bessel_y(order: u32, z: Complex64) -> Result<Complex64> {
    check_argument(z)?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain(
            "Y_n has a singularity at z = 0".to_string(),
        ));
    }
    if order > 10 {
        return Err(Error::Overflow(format!(
            "Y_n supports small orders n <= 10, got {order}"
        )));
    }
    if z.norm() <= SERIES_ASYMPTOTIC_SPLIT {
        Ok(bessel_y_series(order as usize, z))
    } else {
        let (h1, h2) = hankel_pair_asymptotic(order as f64, z);
        Ok((h1 - h2) / Complex64::new(0.0, 2.0))
    }
}

/// Digamma at positive integers: psi(n) = -gamma + sum_{j<n} 1/j.
fn digamma_int(n: usize) -> f64 {
    let mut v = -EULER_GAMMA;
    for j in 1..n {
        v += 1.0 / j as f64;
    }
    v
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|j| j as f64).product()
}

/// Ascending series for Y_n, integer n >= 0 (A&S 9.1.11 form).
fn bessel_y_series(n: usize, z: Complex64) -> Complex64 {
    let zh = z / 2.0;
    let zh2 = zh * zh;
    let jn = bessel_j_series(n, z);
    let log_part = (2.0 / PI) * zh.ln() * jn;

    // - (z/2)^n / pi * sum_k (psi(k+1) + psi(n+k+1)) (-z^2/4)^k / (k! (n+k)!)
    let mut prefix = Complex64::new(1.0, 0.0);
    for j in 1..=n {
        prefix *= zh / j as f64;
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term * (digamma_int(1) + digamma_int(n + 1));
    for k in 1..200 {
        term *= -zh2 / (k as f64 * (n + k) as f64);
        let add = term * (digamma_int(k + 1) + digamma_int(n + k + 1));
        sum += add;
        if add.norm() < 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    let psi_part = -prefix * sum / PI;

    // - (z/2)^{-n} / pi * sum_{k<n} (n-k-1)! / k! (z^2/4)^k
    let mut finite_part = Complex64::new(0.0, 0.0);
    if n > 0 {
        let mut inv_prefix = Complex64::new(1.0, 0.0);
        for _ in 0..n {
            inv_prefix /= zh;
        }
        let mut s = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        for k in 0..n {
            s += pow * (factorial(n - k - 1) / factorial(k));
            pow *= zh2;
        }
        finite_part = -inv_prefix * s / PI;
    }
    log_part + psi_part + finite_part
}

/// Large-argument Hankel expansions H_nu^(1), H_nu^(2) (DLMF 10.17.5/6).
fn hankel_pair_asymptotic(nu: f64, z: Complex64) -> (Complex64, Complex64) {
    let mu = 4.0 * nu * nu;
    let chi = z - (0.5 * nu + 0.25) * PI;
    let mut s1 = Complex64::new(1.0, 0.0);
    let mut s2 = s1;
    let mut t1 = s1;
    let mut t2 = s1;
    let mut prev = f64::INFINITY;
    for k in 1..31 {
        let odd = (2 * k - 1) as f64;
        let factor = (mu - odd * odd) / (8.0 * k as f64) / z;
        t1 *= Complex64::new(0.0, 1.0) * factor;
        t2 *= Complex64::new(0.0, -1.0) * factor;
        let size = t1.norm();
        if size >= prev {
            break; // asymptotic minimum reached
        }
        s1 += t1;
        s2 += t2;
        prev = size;
        if size < 1e-18 * s1.norm() {
            break;
        }
    }
    let amp = (2.0 / (PI * z)).sqrt();
    let h1 = amp * (Complex64::new(0.0, 1.0) * chi).exp() * s1;
    let h2 = amp * (Complex64::new(0.0, -1.0) * chi).exp() * s2;
    (h1, h2)
}

/// Hankel function H_0^(2)(z) = J_0(z) - i Y_0(z).
///
/// Relative error <= 1e-8 for 0.05 <= |z| <= 50; the two internal paths
/// agree to 1e-6 in the crossover band.
pub fn hankel0_2(z: Complex64) -> Result<Complex64> {
    check_argument(z)?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain(
            "H_0^(2) has a logarithmic singularity at z = 0".to_string(),
        ));
    }
    if z.norm() <= SERIES_ASYMPTOTIC_SPLIT {
        hankel0_2_series(z)
    } else {
        hankel0_2_asymptotic(z)
    }
}

/// Small-argument path: ascending series for J_0 and Y_0.
pub fn hankel0_2_series(z: Complex64) -> Result<Complex64> {
    check_argument(z)?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain(
            "H_0^(2) has a logarithmic singularity at z = 0".to_string(),
        ));
    }
    let j0 = bessel_j_series(0, z);
    let y0 = bessel_y_series(0, z);
    Ok(j0 - Complex64::new(0.0, 1.0) * y0)
}

/// Large-argument path: Hankel expansion around e^{-i(z - pi/4)}.
pub fn hankel0_2_asymptotic(z: Complex64) -> Result<Complex64> {
    check_argument(z)?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain(
            "H_0^(2) has a logarithmic singularity at z = 0".to_string(),
        ));
    }
    Ok(hankel_pair_asymptotic(0.0, z).1)
}

/// Smallest order P <= max_order such that |J_q(x)| < tol for q in
/// P..=P+window, given the full sequence of magnitudes.
fn converged_order(mags: &[f64], candidate_max: usize, tol: f64) -> Option<usize> {
    'outer: for p in 1..=candidate_max {
        for q in p..=(p + TAIL_WINDOW).min(mags.len() - 1) {
            if mags[q] >= tol {
                continue 'outer;
            }
        }
        return Some(p);
    }
    None
}

/// Partial Jacobi-Anger sum J_0(x) + sum_{0<|p|<=P} i^p J_p(x) e^{ip theta},
/// with P the smallest order meeting the policy tolerance. Returns the sum
/// and the order P used.
pub fn jacobi_anger_sum(
    x: Complex64,
    theta: f64,
    policy: &TruncationPolicy,
) -> Result<(Complex64, usize)> {
    TruncationPolicy::new(policy.absolute_tolerance, policy.max_order)?;
    let top = (policy.max_order + TAIL_WINDOW).min(MAX_ORDER);
    let seq = bessel_j_sequence(top, x)?;
    let mags: Vec<f64> = seq.iter().map(|v| v.norm()).collect();
    let order = converged_order(&mags, policy.max_order, policy.absolute_tolerance).ok_or_else(
        || {
            Error::ToleranceNotMet(format!(
                "|J_p({x})| stays above {:.3e} for all p <= {}",
                policy.absolute_tolerance, policy.max_order
            ))
        },
    )?;
    // i^{-p} J_{-p} = i^p J_p, so the +/-p pair contributes i^p J_p 2cos(p theta).
    let mut sum = seq[0];
    let mut ipow = Complex64::new(1.0, 0.0);
    for p in 1..=order {
        ipow *= Complex64::new(0.0, 1.0);
        sum += ipow * seq[p] * (2.0 * (p as f64 * theta).cos());
    }
    Ok((sum, order))
}

/// Smallest order P with |J_P(|k| d)| < tol and monotone-decaying tail,
/// capped at `cap`.
pub fn truncation_order(k: Complex64, max_distance: f64, tol: f64, cap: usize) -> Result<usize> {
    if !(max_distance >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "max_distance must be >= 0, got {max_distance}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if cap < 1 || cap > MAX_ORDER - TAIL_WINDOW {
        return Err(Error::InvalidParameter(format!(
            "cap must be in 1..={}, got {cap}",
            MAX_ORDER - TAIL_WINDOW
        )));
    }
    let x = k.norm() * max_distance;
    if x == 0.0 {
        return Ok(1);
    }
    let seq = bessel_j_sequence(cap + TAIL_WINDOW, Complex64::new(x, 0.0))?;
    let mags: Vec<f64> = seq.iter().map(|v| v.norm()).collect();
    converged_order(&mags, cap, tol).ok_or_else(|| {
        Error::CapExceeded(format!(
            "no order P <= {cap} reaches |J_P({x:.4})| < {tol:.3e}"
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel_err(got: Complex64, want: Complex64) -> f64 {
        (got - want).norm() / want.norm()
    }

    #[test]
    fn j0_at_zero_is_one() {
        assert_eq!(bessel_j(0, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(bessel_j(3, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn j0_of_two_matches_series_oracle() {
        // 30-term ascending series evaluated in 50-digit arithmetic.
        let want = c(0.22389077914123566805, 0.0);
        assert!(rel_err(bessel_j(0, c(2.0, 0.0)).unwrap(), want) < 1e-12);
    }

    #[test]
    fn complex_small_argument_values() {
        // References from 50-digit arithmetic.
        let z = c(1.5, -0.8);
        let want0 = c(0.55792598990379941192, 0.48166904144623056834);
        let want5 = c(-0.0024278376374268999041, -0.0024638901658844466271);
        assert!(rel_err(bessel_j(0, z).unwrap(), want0) < 1e-12);
        assert!(rel_err(bessel_j(5, z).unwrap(), want5) < 1e-12);
    }

    #[test]
    fn complex_large_argument_values() {
        let z = c(14.0, -1.3);
        let want0 = c(0.32633478441463672595, 0.23111698632747532741);
        let want7 = c(-0.24687518609711143828, -0.2496684191235268055);
        let want40 = c(-2.632839453380010206e-15, 9.1210615641406479328e-16);
        assert!(rel_err(bessel_j(0, z).unwrap(), want0) < 1e-11);
        assert!(rel_err(bessel_j(7, z).unwrap(), want7) < 1e-11);
        // tail orders keep relative accuracy under the backward recurrence
        assert!(rel_err(bessel_j(40, z).unwrap(), want40) < 1e-10);
    }

    #[test]
    fn reflection_identity() {
        for &z in &[c(3.0, 0.0), c(7.5, -2.0), c(20.0, 1.0)] {
            for p in 1..=12 {
                let plus = bessel_j(p, z).unwrap();
                let minus = bessel_j(-p, z).unwrap();
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                assert!((minus - sign * plus).norm() <= 1e-14 * plus.norm().max(1e-30));
            }
        }
    }

    #[test]
    fn argument_overflow_rejected() {
        assert!(matches!(
            bessel_j(0, c(80.0, 0.0)),
            Err(Error::Overflow(_))
        ));
        assert!(matches!(
            bessel_j(200, c(1.0, 0.0)),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn y_small_order_values() {
        let want_y0 = c(0.088256964215676957983, 0.0);
        let want_y1 = c(-0.78121282130028871655, 0.0);
        assert!(rel_err(bessel_y(0, c(1.0, 0.0)).unwrap(), want_y0) < 1e-12);
        assert!(rel_err(bessel_y(1, c(1.0, 0.0)).unwrap(), want_y1) < 1e-12);
        let want_y0_12 = c(-0.22523731263436143369, 0.0);
        assert!(rel_err(bessel_y(0, c(12.0, 0.0)).unwrap(), want_y0_12) < 1e-10);
    }

    #[test]
    fn wronskian_holds_on_real_axis() {
        for i in 1..60 {
            let x = 0.5 * i as f64;
            let z = c(x, 0.0);
            let j0 = bessel_j(0, z).unwrap();
            let j1 = bessel_j(1, z).unwrap();
            let y0 = bessel_y(0, z).unwrap();
            let y1 = bessel_y(1, z).unwrap();
            let w = j1 * y0 - j0 * y1;
            let want = 2.0 / (PI * x);
            assert!(
                (w.re - want).abs() < 1e-8 * want.abs() && w.im.abs() < 1e-10,
                "wronskian off at x = {x}: {w} vs {want}"
            );
        }
    }

    #[test]
    fn hankel_values() {
        let want1 = c(0.76519768655796655145, -0.088256964215676957983);
        assert!(rel_err(hankel0_2(c(1.0, 0.0)).unwrap(), want1) < 1e-12);
        let wantc = c(0.048030828805219907614, -0.032379785487414253139);
        assert!(rel_err(hankel0_2(c(14.0, -1.3)).unwrap(), wantc) < 1e-10);
        let want40 = c(0.0073668905842372895535, -0.12593641705826092925);
        assert!(rel_err(hankel0_2(c(40.0, 0.0)).unwrap(), want40) < 1e-8);
    }

    #[test]
    fn hankel_domain_error_at_zero() {
        assert!(matches!(
            hankel0_2(c(0.0, 0.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn hankel_matches_leading_asymptotic_form() {
        // the first correction term is 1/(8 z) = 3.1e-3 at z = 40, so the
        // leading form cannot agree better than that
        let z = c(40.0, 0.0);
        let leading = (2.0 / (PI * z)).sqrt() * (Complex64::new(0.0, -1.0) * (z - PI / 4.0)).exp();
        assert!(rel_err(hankel0_2(z).unwrap(), leading) < 5e-3);
    }

    #[test]
    fn hankel_paths_agree_in_overlap_band() {
        for i in 0..=40 {
            let m = 10.0 + 0.1 * i as f64;
            for &im in &[0.0, -0.9, 0.6] {
                let z = c((m * m - im * im).max(0.0).sqrt(), im);
                let a = hankel0_2_series(z).unwrap();
                let b = hankel0_2_asymptotic(z).unwrap();
                assert!(
                    rel_err(a, b) < 1e-6,
                    "paths disagree at z = {z}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn jacobi_anger_trivial_and_spot() {
        let policy = TruncationPolicy::default();
        let (v, p) = jacobi_anger_sum(c(0.0, 0.0), 2.2, &policy).unwrap();
        assert_eq!(v, c(1.0, 0.0));
        assert_eq!(p, 1);
        // oracle: direct evaluation of e^{ix cos theta}
        let x = c(3.7, 0.0);
        let theta = 0.9_f64;
        let want = (Complex64::new(0.0, 1.0) * x * theta.cos()).exp();
        let (got, _) = jacobi_anger_sum(x, theta, &policy).unwrap();
        assert!(rel_err(got, want) < 1e-10);
    }

    #[test]
    fn jacobi_anger_tolerance_not_met() {
        let policy = TruncationPolicy::new(1e-12, 2).unwrap();
        assert!(matches!(
            jacobi_anger_sum(c(10.0, 0.0), 0.3, &policy),
            Err(Error::ToleranceNotMet(_))
        ));
    }

    #[test]
    fn truncation_order_examples() {
        assert_eq!(
            truncation_order(c(0.0, 0.0), 1.0, 1e-12, 100).unwrap(),
            1
        );
        // frozen from a 50-digit scan of |J_p(15.2)|: first drop below 1e-12 at p = 39
        let k = c(15.2, 0.0);
        assert_eq!(truncation_order(k, 1.0, 1e-12, 100).unwrap(), 39);
        assert!(matches!(
            truncation_order(k, 1.0, 1e-300, 100),
            Err(Error::CapExceeded(_))
        ));
    }
}
