//! One-dimensional Hermite functions, Hermite and Laguerre polynomials, and
//! the closed-form half-line integrals built from them.
//!
//! The normalized functions are evaluated with the multiplicative three-term
//! recurrence
//!
//! ```text
//! h_{k+1}(t) = t √(2/(k+1)) h_k(t) − √(k/(k+1)) h_{k−1}(t)
//! ```
//!
//! seeded by `h_0(t) = π^{−1/4} e^{−t²/2}`. It never forms `2^k k!` and stays
//! bounded by about 1.1 for every degree. The derivative form of the same
//! recurrence and the creation/annihilation relations are checked as
//! properties in the tests.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::special::{binomial, ln_factorial, ln_gamma};

/// `π^{−1/4}`.
pub const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_5;

/// Normalization table up to a fixed maximum degree.
///
/// `c_k = (2^k k! √π)^{−1/2}` is stored as `ln c_k` so nothing overflows for
/// any degree a caller can afford to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteBasis {
    max_degree: usize,
    log_norm: Vec<f64>,
}

impl HermiteBasis {
    pub fn new(max_degree: usize) -> Self {
        let mut log_norm = Vec::with_capacity(max_degree + 1);
        let mut current = -0.25 * PI.ln();
        log_norm.push(current);
        for k in 0..max_degree {
            current -= 0.5 * (2.0 * (k + 1) as f64).ln();
            log_norm.push(current);
        }
        Self { max_degree, log_norm }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `ln c_k`.
    pub fn log_norm_const(&self, k: usize) -> Result<f64> {
        self.check_degree(k)?;
        Ok(self.log_norm[k])
    }

    pub fn check_degree(&self, k: usize) -> Result<()> {
        if k > self.max_degree {
            return Err(Error::Capacity {
                what: "Hermite degree",
                requested: k,
                limit: self.max_degree,
            });
        }
        Ok(())
    }

    /// `h_k(t)`.
    pub fn eval_h(&self, k: usize, t: f64) -> Result<f64> {
        self.check_degree(k)?;
        check_finite(t)?;
        let mut buf = vec![0.0; k + 1];
        fill_hermite_functions(t, &mut buf);
        Ok(buf[k])
    }

    /// `(h_0(t), …, h_{k_max}(t))` from one recurrence pass.
    pub fn eval_h_all(&self, k_max: usize, t: f64) -> Result<Vec<f64>> {
        self.check_degree(k_max)?;
        check_finite(t)?;
        let mut buf = vec![0.0; k_max + 1];
        fill_hermite_functions(t, &mut buf);
        Ok(buf)
    }
}

fn check_finite(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::input(format!("non-finite argument {t}")));
    }
    Ok(())
}

/// Fills `out[j] = h_j(t)` for `j < out.len()`. No validation; this is the
/// inner-loop kernel behind every Hermite evaluation in the crate.
#[inline]
pub fn fill_hermite_functions(t: f64, out: &mut [f64]) {
    let Some(first) = out.first_mut() else {
        return;
    };
    *first = PI_POW_NEG_QUARTER * (-0.5 * t * t).exp();
    if out.len() == 1 {
        return;
    }
    out[1] = std::f64::consts::SQRT_2 * t * out[0];
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        out[k + 1] = t * (2.0 / (kf + 1.0)).sqrt() * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

/// The physicists' Hermite polynomial `H_k(t)`, via
/// `H_{k+1} = 2t H_k − 2k H_{k−1}`.
pub fn eval_hermite_poly(k: usize, t: f64) -> Result<f64> {
    check_finite(t)?;
    let (mut prev, mut cur) = (1.0, 2.0 * t);
    if k == 0 {
        return Ok(prev);
    }
    for j in 1..k {
        let next = 2.0 * t * cur - 2.0 * j as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Degree, type exponent and decay rate of a Laguerre family member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreParams {
    degree: usize,
    type_exponent: f64,
    decay_rate: f64,
}

impl LaguerreParams {
    /// Requires `type_exponent > −1` and `decay_rate > 0`, which make
    /// `e^{−βu} u^α` integrable on the half line.
    pub fn new(degree: usize, type_exponent: f64, decay_rate: f64) -> Result<Self> {
        if !(type_exponent > -1.0) || !type_exponent.is_finite() {
            return Err(Error::input(format!(
                "Laguerre type exponent must exceed -1, got {type_exponent}"
            )));
        }
        if !(decay_rate > 0.0) || !decay_rate.is_finite() {
            return Err(Error::input(format!(
                "Laguerre decay rate must be positive, got {decay_rate}"
            )));
        }
        Ok(Self {
            degree,
            type_exponent,
            decay_rate,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn type_exponent(&self) -> f64 {
        self.type_exponent
    }

    pub fn decay_rate(&self) -> f64 {
        self.decay_rate
    }
}

/// `L_k^α(u)` by `(j+1) L_{j+1} = (2j+1+α−u) L_j − (j+α) L_{j−1}`.
pub fn eval_laguerre(p: &LaguerreParams, u: f64) -> Result<f64> {
    if !(u >= 0.0) || !u.is_finite() {
        return Err(Error::input(format!("Laguerre argument must be >= 0, got {u}")));
    }
    Ok(laguerre_unchecked(p.degree, p.type_exponent, u))
}

pub(crate) fn laguerre_unchecked(k: usize, alpha: f64, u: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 + alpha - u);
    if k == 0 {
        return prev;
    }
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + alpha - u) * cur - (jf + alpha) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `∫_0^∞ L_k^α(u) e^{−βu} du = Σ_{i≤k} C(α+i−1, i) (β−1)^{k−i} / β^{k−i+1}`.
pub fn laguerre_exp_integral(p: &LaguerreParams) -> f64 {
    let (k, alpha, beta) = (p.degree, p.type_exponent, p.decay_rate);
    let ratio = (beta - 1.0) / beta;
    // C(α+i−1, i) = Π_{j=1..i} (α+j−1)/j, accumulated alongside the sum.
    let mut coeff = 1.0;
    let mut sum = 0.0;
    for i in 0..=k {
        if i > 0 {
            coeff *= (alpha + i as f64 - 1.0) / i as f64;
        }
        let power = k - i;
        let geometric = if power == 0 { 1.0 } else { ratio.powi(power as i32) };
        sum += coeff * geometric / beta;
    }
    sum
}

/// `∫_0^∞ h_{2k}(t) dt = 2^{−k+½} π^{¼} Γ(2k) / (Γ(k) √((2k)!))`, with the
/// `k = 0` limit `Γ(2k)/Γ(k) → ½`.
pub fn half_line_integral_even(k: usize) -> f64 {
    let quarter_ln_pi = 0.25 * PI.ln();
    if k == 0 {
        return (quarter_ln_pi - 0.5 * LN_2).exp();
    }
    let kf = k as f64;
    let ln_value = (0.5 - kf) * LN_2 + quarter_ln_pi + ln_gamma(2.0 * kf) - ln_gamma(kf) - 0.5 * ln_factorial(2 * k);
    ln_value.exp()
}

/// `∫_0^∞ h_{2k+1}(t) dt = 2^{k+1} k! / √(2 (2k+1)! √π) · Σ_{i≤k} C(i−½, i)(−1)^i`.
pub fn half_line_integral_odd(k: usize) -> f64 {
    let kf = k as f64;
    let ln_prefactor = (kf + 1.0) * LN_2 + ln_factorial(k) - 0.5 * (LN_2 + ln_factorial(2 * k + 1) + 0.5 * PI.ln());
    let alternating: f64 = (0..=k)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(i as f64 - 0.5, i)
        })
        .sum();
    ln_prefactor.exp() * alternating
}

/// Which normalization of the odd Hermite/Laguerre relation to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaguerreHermiteForm {
    /// `H_{2k+1}(x) = (−1)^k 2^{2k+1} k! x L_k^{1/2}(x²)`.
    Corrected,
    /// The same relation with `2^{2k}` in place of `2^{2k+1}`; used as a
    /// negative control.
    Halved,
}

/// `max |H_{2k+1}(t) − (−1)^k 2^{2k+1} k! t L_k^{1/2}(t²)| / (1 + |H_{2k+1}(t)|)`
/// over the samples.
pub fn verify_laguerre_hermite_relation(k: usize, t_samples: &[f64]) -> Result<f64> {
    laguerre_hermite_residual(k, t_samples, LaguerreHermiteForm::Corrected)
}

pub fn laguerre_hermite_residual(k: usize, t_samples: &[f64], form: LaguerreHermiteForm) -> Result<f64> {
    let power = match form {
        LaguerreHermiteForm::Corrected => 2 * k + 1,
        LaguerreHermiteForm::Halved => 2 * k,
    };
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    // Exact in binary64 while 2^{2k+1} k! is representable.
    let scale = (1..=k).fold(2f64.powi(power as i32), |acc, j| acc * j as f64);
    let mut worst: f64 = 0.0;
    for &t in t_samples {
        let hermite = eval_hermite_poly(2 * k + 1, t)?;
        let laguerre = laguerre_unchecked(k, 0.5, t * t);
        let rhs = sign * scale * laguerre * t;
        worst = worst.max((hermite - rhs).abs() / (1.0 + hermite.abs()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn hermite_explicit(k: usize, x: f64) -> f64 {
        // Σ_i k!/(i!(k−2i)!) (−1)^i (2x)^{k−2i}
        let mut sum = 0.0;
        for i in 0..=k / 2 {
            let ln_c = ln_factorial(k) - ln_factorial(i) - ln_factorial(k - 2 * i);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * ln_c.exp() * (2.0 * x).powi((k - 2 * i) as i32);
        }
        sum
    }

    #[test]
    fn normalization_table() {
        let basis = HermiteBasis::new(200);
        assert_relative_eq!(
            basis.log_norm_const(0).unwrap().exp(),
            PI_POW_NEG_QUARTER,
            max_relative = 1e-15
        );
        for k in 0..200 {
            let step = basis.log_norm_const(k + 1).unwrap() - basis.log_norm_const(k).unwrap();
            let expected = -0.5 * (2.0 * (k + 1) as f64).ln();
            assert!((step - expected).abs() <= 1e-14 * expected.abs().max(1.0));
            assert!(basis.log_norm_const(k).unwrap().is_finite());
        }
        assert!(basis.log_norm_const(201).is_err());
    }

    #[test]
    fn point_values() {
        let basis = HermiteBasis::new(10);
        assert_relative_eq!(basis.eval_h(0, 0.0).unwrap(), 0.751_125_54, epsilon = 1e-8);
        assert_eq!(basis.eval_h(1, 0.0).unwrap(), 0.0);

        let c4 = basis.log_norm_const(4).unwrap().exp();
        let t: f64 = 0.7;
        let oracle = c4 * (16.0 * t.powi(4) - 48.0 * t * t + 12.0) * (-t * t / 2.0).exp();
        assert_relative_eq!(basis.eval_h(4, t).unwrap(), oracle, max_relative = 1e-12);
    }

    #[test]
    fn evaluation_errors() {
        let basis = HermiteBasis::new(4);
        assert!(matches!(basis.eval_h(5, 0.0), Err(Error::Capacity { .. })));
        assert!(matches!(basis.eval_h(1, f64::NAN), Err(Error::Input(_))));
        assert!(basis.eval_h_all(5, 1.0).is_err());
    }

    #[test]
    fn batched_evaluation_matches_single() {
        let basis = HermiteBasis::new(60);
        assert_eq!(basis.eval_h_all(0, 1.3).unwrap(), vec![basis.eval_h(0, 1.3).unwrap()]);
        let at_zero = basis.eval_h_all(5, 0.0).unwrap();
        for j in (1..=5).step_by(2) {
            assert_eq!(at_zero[j], 0.0);
        }
        let all = basis.eval_h_all(60, 6.0).unwrap();
        for (j, v) in all.iter().enumerate() {
            assert_eq!(*v, basis.eval_h(j, 6.0).unwrap());
            assert!(v.is_finite() && v.abs() < 1.0);
        }
    }

    #[test]
    fn large_degree_stays_bounded() {
        let basis = HermiteBasis::new(120);
        for &t in &[0.0, 3.3, 9.0, 15.5] {
            let all = basis.eval_h_all(120, t).unwrap();
            assert!(all.iter().all(|v| v.abs() <= 1.1));
        }
    }

    #[test]
    fn hermite_polynomials() {
        assert_eq!(eval_hermite_poly(1, 0.3).unwrap(), 0.6);
        assert_eq!(eval_hermite_poly(2, 1.0).unwrap(), 2.0);
        assert_eq!(eval_hermite_poly(3, 0.0).unwrap(), 0.0);
        for k in 0..12 {
            for &x in &[-1.7, -0.2, 0.0, 0.9, 2.4] {
                let explicit = hermite_explicit(k, x);
                let rec = eval_hermite_poly(k, x).unwrap();
                assert!((rec - explicit).abs() <= 1e-10 * (1.0 + explicit.abs()), "k={k} x={x}");
            }
        }
    }

    #[test]
    fn polynomial_times_envelope_is_function() {
        let basis = HermiteBasis::new(30);
        for k in 0..=30 {
            let c = basis.log_norm_const(k).unwrap();
            for i in 0..=40 {
                let t = -5.0 + 0.25 * i as f64 + 0.013;
                let h = basis.eval_h(k, t).unwrap();
                let via_poly = eval_hermite_poly(k, t).unwrap() * (c - t * t / 2.0).exp();
                // Relative to the local amplitude scale; pointwise relative
                // error is meaningless at the zeros.
                let scale = basis
                    .eval_h_all(k, t)
                    .unwrap()
                    .iter()
                    .fold(h.abs(), |m, v| m.max(v.abs()));
                assert!((h - via_poly).abs() <= 1e-10 * scale, "k={k} t={t}");
            }
        }
    }

    #[test]
    fn laguerre_values() {
        let p = LaguerreParams::new(0, 0.5, 1.0).unwrap();
        assert_eq!(eval_laguerre(&p, 3.7).unwrap(), 1.0);
        let p = LaguerreParams::new(1, 0.5, 1.0).unwrap();
        assert_eq!(eval_laguerre(&p, 0.0).unwrap(), 1.5);
        let p = LaguerreParams::new(2, 0.5, 1.0).unwrap();
        assert_relative_eq!(eval_laguerre(&p, 1.0).unwrap(), -0.125, epsilon = 1e-15);
        assert!(eval_laguerre(&p, -0.1).is_err());
        assert!(LaguerreParams::new(2, -1.0, 1.0).is_err());
        assert!(LaguerreParams::new(2, 0.0, 0.0).is_err());
    }

    #[test]
    fn laguerre_integral_simple_cases() {
        let p = LaguerreParams::new(0, 0.3, 2.0).unwrap();
        assert_relative_eq!(laguerre_exp_integral(&p), 0.5, epsilon = 1e-15);
        let p = LaguerreParams::new(1, 0.5, 1.0).unwrap();
        assert_relative_eq!(laguerre_exp_integral(&p), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn half_line_closed_forms() {
        assert_relative_eq!(
            half_line_integral_even(0),
            PI.powf(0.25) / 2f64.sqrt(),
            max_relative = 1e-15
        );
        assert_relative_eq!(half_line_integral_even(1), PI.powf(0.25) / 2.0, max_relative = 1e-14);
        assert!(half_line_integral_even(10) > 0.0);
        assert!(half_line_integral_even(10) < half_line_integral_even(1));
        assert_relative_eq!(
            half_line_integral_odd(0),
            2f64.sqrt() * PI_POW_NEG_QUARTER,
            max_relative = 1e-15
        );
    }

    #[test]
    fn laguerre_hermite_relation_and_control() {
        let samples: Vec<f64> = (0..41).map(|i| -4.0 + 0.2 * i as f64).collect();
        assert_eq!(verify_laguerre_hermite_relation(0, &[1.0]).unwrap(), 0.0);
        assert!(verify_laguerre_hermite_relation(1, &[1.0]).unwrap() <= 1e-12);
        for k in 0..=10 {
            assert!(verify_laguerre_hermite_relation(k, &samples).unwrap() <= 1e-10);
        }
        let dropped = laguerre_hermite_residual(1, &[1.0], LaguerreHermiteForm::Halved).unwrap();
        assert_relative_eq!(dropped, 2.0 / 5.0, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn parity(k in 0usize..80, t in -12.0f64..12.0) {
            let basis = HermiteBasis::new(80);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert_eq!(basis.eval_h(k, -t).unwrap(), sign * basis.eval_h(k, t).unwrap());
        }

        #[test]
        fn derivative_recurrence(k in 1usize..30, t in -6.0f64..6.0) {
            // h_{k+1} = −√(2/(k+1)) h_k' + √(k/(k+1)) h_{k−1}
            let basis = HermiteBasis::new(31);
            let step = 1e-5;
            let d = (basis.eval_h(k, t + step).unwrap() - basis.eval_h(k, t - step).unwrap()) / (2.0 * step);
            let kf = k as f64;
            let rhs = -(2.0 / (kf + 1.0)).sqrt() * d + (kf / (kf + 1.0)).sqrt() * basis.eval_h(k - 1, t).unwrap();
            prop_assert!((basis.eval_h(k + 1, t).unwrap() - rhs).abs() <= 1e-6);
        }

        #[test]
        fn creation_and_annihilation(k in 1usize..30, t in -6.0f64..6.0) {
            // Unnormalized h̃_k = h_k / c_k; work with ratios c_{k±1}/c_k to
            // keep every quantity unit-scale.
            let basis = HermiteBasis::new(31);
            let step = 1e-5;
            let h = |j: usize, x: f64| basis.eval_h(j, x).unwrap();
            let d = (h(k, t + step) - h(k, t - step)) / (2.0 * step);
            let kf = k as f64;
            // (−d/dx + x) h̃_k = h̃_{k+1}  ⇔  (−h_k' + x h_k) = h_{k+1} c_k / c_{k+1} = √(2(k+1)) h_{k+1}
            let creation = -d + t * h(k, t) - (2.0 * (kf + 1.0)).sqrt() * h(k + 1, t);
            // (d/dx + x) h̃_k = 2k h̃_{k−1}  ⇔  (h_k' + x h_k) = 2k c_k / c_{k−1} h_{k−1} = √(2k) h_{k−1}
            let annihilation = d + t * h(k, t) - (2.0 * kf).sqrt() * h(k - 1, t);
            prop_assert!(creation.abs() <= 1e-6 * (2.0 * kf + 2.0).sqrt());
            prop_assert!(annihilation.abs() <= 1e-6 * (2.0 * kf).sqrt());
        }
    }
}
