//! Log-gamma, generalized binomial coefficients, and exact rational
//! counterparts used to pin the closed forms down without rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `ln n!`.
pub fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Residual of the duplication formula `Γ(z+½) = 2^{1−2z} √π Γ(2z)/Γ(z)`,
/// compared in log space.
pub fn gamma_duplication_residual(z: f64) -> f64 {
    let lhs = ln_gamma(z + 0.5);
    let rhs =
        (1.0 - 2.0 * z) * std::f64::consts::LN_2 + 0.5 * std::f64::consts::PI.ln() + ln_gamma(2.0 * z) - ln_gamma(z);
    (lhs - rhs).abs()
}

/// Generalized binomial coefficient `C(a, i) = a(a−1)…(a−i+1)/i!`, built as a
/// running product so that alternating families keep their exact signs.
pub fn binomial(a: f64, i: usize) -> f64 {
    (0..i).fold(1.0, |term, j| term * (a - j as f64) / (j as f64 + 1.0))
}

/// Exact `C(a, i)` for rational `a`.
pub fn binomial_exact(a: &BigRational, i: usize) -> BigRational {
    let mut term = BigRational::one();
    for j in 0..i {
        let j = BigRational::from_integer(BigInt::from(j));
        term = term * (a - &j) / (j + BigRational::one());
    }
    term
}

/// `p/q` as an exact rational.
pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Floating residual of the reflection identity `C(a,k) = (−1)^k C(k−a−1,k)`.
pub fn binomial_reflection_residual(a: f64, k: usize) -> f64 {
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let lhs = binomial(a, k);
    let rhs = sign * binomial(k as f64 - a - 1.0, k);
    (lhs - rhs).abs() / lhs.abs().max(1.0)
}

/// The reflection identity in exact arithmetic.
pub fn binomial_reflection_exact(a: &BigRational, k: usize) -> bool {
    let shifted = BigRational::from_integer(BigInt::from(k)) - a - BigRational::one();
    let mut rhs = binomial_exact(&shifted, k);
    if k % 2 == 1 {
        rhs = -rhs;
    }
    binomial_exact(a, k) == rhs
}

/// Σ_{i≤k} C(a, i) exactly.
pub fn binomial_partial_sum_exact(a: &BigRational, k: usize) -> BigRational {
    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    for i in 0..=k {
        if i > 0 {
            let j = BigRational::from_integer(BigInt::from(i - 1));
            term = term * (a - &j) / (j + BigRational::one());
        }
        sum += &term;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplication_holds_on_sample_points() {
        for z in [0.5, 1.0, 2.5, 7.0, 15.0] {
            assert!(gamma_duplication_residual(z) <= 1e-12, "z = {z}");
        }
    }

    #[test]
    fn small_binomials() {
        assert_eq!(binomial(0.5, 0), 1.0);
        assert_eq!(binomial(0.5, 1), 0.5);
        assert_eq!(binomial(0.5, 2), -0.125);
        assert_eq!(binomial(-0.5, 2), 0.375);
        assert_eq!(binomial(5.0, 2), 10.0);
        assert_eq!(binomial(3.0, 5), 0.0);
    }

    #[test]
    fn exact_binomials_match_floats() {
        let half = rational(1, 2);
        assert_eq!(binomial_exact(&half, 2), rational(-1, 8));
        assert_eq!(binomial_exact(&rational(-1, 2), 3), rational(-5, 16));
        assert_eq!(binomial_partial_sum_exact(&half, 2), rational(11, 8));
    }

    #[test]
    fn reflection_for_half_integers() {
        for k in 0..=20 {
            for a in [rational(1, 2), rational(-1, 2)] {
                assert!(binomial_reflection_exact(&a, k), "k = {k}");
            }
            assert!(binomial_reflection_residual(0.5, k) <= 1e-14);
            assert!(binomial_reflection_residual(-0.5, k) <= 1e-14);
        }
    }
}
