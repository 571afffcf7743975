//! Antiderivatives of the Hermite functions and their exact `L²` norms.
//!
//! `X_{2k+1}(x) = ∫_{−∞}^x h_{2k+1}` and `X_{2k}(x) = ∫_{−∞}^x sign(t) h_{2k}(t) dt`.
//! The odd family telescopes into a finite Hermite sum,
//!
//! ```text
//! X_{2k+1} = Σ_{j≤k} e_j h_{2j},   e_k = −√(2/(2k+1)),   e_{j−1} = e_j √(2j/(2j−1)),
//! ```
//!
//! obtained by matching coefficients in `h_n' = √(n/2) h_{n−1} − √((n+1)/2) h_{n+1}`.
//! The even family has no such expansion and is integrated numerically.

use std::sync::OnceLock;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{fill_hermite_functions, half_line_integral_even};
use crate::quadrature::{compensated_sum, legendre_reference};
use crate::special::{binomial_partial_sum_exact, rational};

/// Largest half-degree `k` accepted by the functions in this module.
pub const MAX_HALF_DEGREE: usize = 1000;

const PANEL_WIDTH: f64 = 0.25;
const PANEL_NODES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Odd,
    Even,
}

/// `X_{2k+1}` or `X_{2k}` for a fixed `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntiderivativeSeries {
    pub parity: Parity,
    pub half_degree: usize,
    /// `(degree, coefficient)` pairs; empty for the even family.
    pub expansion: Vec<(usize, f64)>,
    pub quadrature_fallback: bool,
}

impl AntiderivativeSeries {
    pub fn new(parity: Parity, k: usize) -> Result<Self> {
        check_capacity(k)?;
        let expansion = match parity {
            Parity::Odd => x_odd_expansion(k)?,
            Parity::Even => Vec::new(),
        };
        Ok(Self {
            parity,
            half_degree: k,
            quadrature_fallback: parity == Parity::Even,
            expansion,
        })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self.parity {
            Parity::Odd => eval_expansion(&self.expansion, x),
            Parity::Even => x_even(self.half_degree, x),
        }
    }
}

fn check_capacity(k: usize) -> Result<()> {
    if k > MAX_HALF_DEGREE {
        return Err(Error::Capacity {
            what: "antiderivative half-degree",
            requested: k,
            limit: MAX_HALF_DEGREE,
        });
    }
    Ok(())
}

fn check_finite(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::input(format!("non-finite argument {x}")));
    }
    Ok(())
}

/// Truncation half-width for whole-line integrals at half-degree `k`.
pub fn truncation(k: usize) -> f64 {
    (2.0 * (2 * k + 1) as f64).sqrt() + 10.0
}

/// Coefficients `(2j, e_j)` of `X_{2k+1} = Σ_j e_j h_{2j}`.
pub fn x_odd_expansion(k: usize) -> Result<Vec<(usize, f64)>> {
    check_capacity(k)?;
    let mut coeffs = vec![0.0; k + 1];
    coeffs[k] = -(2.0 / (2 * k + 1) as f64).sqrt();
    for j in (1..=k).rev() {
        let jf = j as f64;
        coeffs[j - 1] = coeffs[j] * (2.0 * jf / (2.0 * jf - 1.0)).sqrt();
    }
    Ok(coeffs.into_iter().enumerate().map(|(j, c)| (2 * j, c)).collect())
}

fn eval_expansion(expansion: &[(usize, f64)], x: f64) -> Result<f64> {
    check_finite(x)?;
    let top = expansion.iter().map(|&(d, _)| d).max().unwrap_or(0);
    let mut h = vec![0.0; top + 1];
    fill_hermite_functions(x, &mut h);
    Ok(compensated_sum(expansion.iter().map(|&(d, c)| c * h[d])))
}

/// `X_{2k+1}(x)` through the finite Hermite expansion.
pub fn x_odd(k: usize, x: f64) -> Result<f64> {
    eval_expansion(&x_odd_expansion(k)?, x)
}

/// `X_{2k}(x) = −∫_{|x|}^∞ h_{2k}`, by panelized Gauss–Legendre.
pub fn x_even(k: usize, x: f64) -> Result<f64> {
    check_capacity(k)?;
    check_finite(x)?;
    let lo = x.abs();
    let hi = truncation(k).max(lo + 1.0);
    let panels = ((hi - lo) / PANEL_WIDTH).ceil() as usize;
    let (ref_x, ref_w) = legendre_reference(PANEL_NODES);
    let mut h = vec![0.0; 2 * k + 1];
    let width = (hi - lo) / panels as f64;
    let mut parts = Vec::with_capacity(panels * PANEL_NODES);
    for p in 0..panels {
        let a = lo + width * p as f64;
        for (t, w) in ref_x.iter().zip(&ref_w) {
            fill_hermite_functions(a + 0.5 * width * (t + 1.0), &mut h);
            parts.push(0.5 * width * w * h[2 * k]);
        }
    }
    Ok(-compensated_sum(parts))
}

/// Composite Gauss–Legendre nodes on `[lo, hi]` with the tail integrals
/// `∫_x^{hi} h_degree` at every node.
struct TailGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    tails: Vec<f64>,
}

fn tail_grid(degree: usize, lo: f64, hi: f64) -> TailGrid {
    let panels = ((hi - lo) / PANEL_WIDTH).ceil().max(1.0) as usize;
    let width = (hi - lo) / panels as f64;
    let (ref_x, ref_w) = legendre_reference(PANEL_NODES);
    let mut h = vec![0.0; degree + 1];
    let mut value = |t: f64| {
        fill_hermite_functions(t, &mut h);
        h[degree]
    };

    let mut panel_integrals = Vec::with_capacity(panels);
    for p in 0..panels {
        let a = lo + width * p as f64;
        panel_integrals.push(compensated_sum(
            ref_x
                .iter()
                .zip(&ref_w)
                .map(|(t, w)| 0.5 * width * w * value(a + 0.5 * width * (t + 1.0))),
        ));
    }
    // tail_after[p] = Σ_{q>p} panel_integrals[q]
    let mut tail_after = vec![0.0; panels];
    for p in (0..panels.saturating_sub(1)).rev() {
        tail_after[p] = compensated_sum([tail_after[p + 1], panel_integrals[p + 1]]);
    }

    let mut grid = TailGrid {
        nodes: Vec::with_capacity(panels * PANEL_NODES),
        weights: Vec::with_capacity(panels * PANEL_NODES),
        tails: Vec::with_capacity(panels * PANEL_NODES),
    };
    for p in 0..panels {
        let a = lo + width * p as f64;
        let b = a + width;
        for (t, w) in ref_x.iter().zip(&ref_w) {
            let x = a + 0.5 * width * (t + 1.0);
            let half = 0.5 * (b - x);
            let inner = compensated_sum(
                ref_x
                    .iter()
                    .zip(&ref_w)
                    .map(|(s, v)| half * v * value(x + half * (s + 1.0))),
            );
            grid.nodes.push(x);
            grid.weights.push(0.5 * width * w);
            grid.tails.push(inner + tail_after[p]);
        }
    }
    grid
}

/// `‖X_{2k+1}‖² = 2`.
pub fn norm_sq_odd_closed(_k: usize) -> f64 {
    2.0
}

/// Iterates `I_{2k+1} = 2/(2k+1) + (2k/(2k+1)) I_{2k−1}` from `I_1 = 2`.
pub fn norm_sq_odd_recursive(k: usize) -> f64 {
    let mut value = 2.0;
    for j in 1..=k {
        let denom = (2 * j + 1) as f64;
        value = 2.0 / denom + (2 * j) as f64 / denom * value;
    }
    value
}

/// `‖X_{2k+1}‖²` by cumulative quadrature of `h_{2k+1}`, independent of the
/// finite expansion.
pub fn norm_sq_odd_quadrature(k: usize) -> Result<f64> {
    check_capacity(k)?;
    let t = truncation(k);
    let grid = tail_grid(2 * k + 1, -t, t);
    // X_{2k+1}(x) = −∫_x^∞ h_{2k+1}, since the whole-line integral vanishes.
    Ok(compensated_sum(
        grid.weights.iter().zip(&grid.tails).map(|(w, v)| w * v * v),
    ))
}

/// Which generalized binomial row `C(±½, i)` to sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfSign {
    Plus,
    Minus,
}

impl HalfSign {
    fn value(self) -> f64 {
        match self {
            HalfSign::Plus => 0.5,
            HalfSign::Minus => -0.5,
        }
    }
}

/// `Σ_{i≤k} C(±½, i)` with terms generated multiplicatively.
pub fn partial_binomial_sum(k: usize, top: HalfSign) -> f64 {
    let a = top.value();
    let mut term = 1.0;
    let mut terms = Vec::with_capacity(k + 1);
    terms.push(term);
    for i in 0..k {
        term *= (a - i as f64) / (i as f64 + 1.0);
        terms.push(term);
    }
    compensated_sum(terms)
}

/// `‖X_{2k}‖² = 2(−1 + √2 Σ_{i≤k} C(½, i))`.
pub fn norm_sq_even_closed(k: usize) -> f64 {
    2.0 * (-1.0 + std::f64::consts::SQRT_2 * partial_binomial_sum(k, HalfSign::Plus))
}

/// `‖X_{2k}‖²` by cumulative quadrature.
pub fn norm_sq_even_quadrature(k: usize) -> Result<f64> {
    check_capacity(k)?;
    let grid = tail_grid(2 * k, 0.0, truncation(k));
    // X_{2k} is even and equals −tail on x ≥ 0.
    Ok(2.0 * compensated_sum(grid.weights.iter().zip(&grid.tails).map(|(w, v)| w * v * v)))
}

/// `V_0 = ‖X_0‖²/2`, by quadrature, after checking it against the closed form.
pub fn even_recursion_seed() -> Result<f64> {
    static SEED: OnceLock<std::result::Result<f64, Error>> = OnceLock::new();
    SEED.get_or_init(|| {
        let by_quadrature = 0.5 * norm_sq_even_quadrature(0)?;
        let by_closed_form = 0.5 * norm_sq_even_closed(0);
        if (by_quadrature - by_closed_form).abs() > 1e-13 {
            return Err(Error::Validation(format!(
                "V_0 disagrees: quadrature {by_quadrature}, closed form {by_closed_form}"
            )));
        }
        Ok(by_quadrature)
    })
    .clone()
}

/// Iterates `V_{2j+2} = −1/(2j+2) + (√2/(j+1)) Σ_{i≤j} C(−½, i) + ((2j+1)/(2j+2)) V_{2j}`
/// from the validated seed and returns `2 V_{2k}`.
pub fn norm_sq_even_recursive(k: usize) -> Result<f64> {
    let mut v = even_recursion_seed()?;
    let mut minus_sum = 0.0;
    let mut minus_term = 1.0;
    for j in 0..k {
        if j > 0 {
            minus_term *= (-0.5 - (j - 1) as f64) / j as f64;
        }
        minus_sum += minus_term;
        let jf = j as f64;
        v = -1.0 / (2.0 * jf + 2.0)
            + std::f64::consts::SQRT_2 / (jf + 1.0) * minus_sum
            + (2.0 * jf + 1.0) / (2.0 * jf + 2.0) * v;
    }
    Ok(2.0 * v)
}

/// `X_{2k}(0)² = ¼ (∫_ℝ h_{2k})²`.
pub fn x_even_at_zero_sq(k: usize) -> f64 {
    let whole_line = 2.0 * half_line_integral_even(k);
    0.25 * whole_line * whole_line
}

/// `X_{2k}(0)² · √(2k)`, bounded uniformly in `k ≥ 1`.
pub fn x_even_at_zero_sq_normalized(k: usize) -> f64 {
    x_even_at_zero_sq(k) * ((2 * k) as f64).sqrt()
}

/// `|(1/(k+1)) Σ_{i≤k} C(−½,i) + ((2k+1)/(2k+2)) Σ_{i≤k} C(½,i) − Σ_{i≤k+1} C(½,i)|`.
pub fn merge_identity_check(k: usize) -> f64 {
    let kf = k as f64;
    let lhs = partial_binomial_sum(k, HalfSign::Minus) / (kf + 1.0)
        + (2.0 * kf + 1.0) / (2.0 * kf + 2.0) * partial_binomial_sum(k, HalfSign::Plus);
    (lhs - partial_binomial_sum(k + 1, HalfSign::Plus)).abs()
}

/// The merge identity in exact rational arithmetic.
pub fn merge_identity_exact(k: usize) -> bool {
    let kk = k as i64;
    let lhs: BigRational = binomial_partial_sum_exact(&rational(-1, 2), k) * rational(1, kk + 1)
        + binomial_partial_sum_exact(&rational(1, 2), k) * rational(2 * kk + 1, 2 * kk + 2);
    lhs == binomial_partial_sum_exact(&rational(1, 2), k + 1)
}

/// `∫_ℝ h_{2k}(x) (∫_{−∞}^x h_{2k−1}) dx`, which vanishes because the inner
/// antiderivative is a Gaussian times a polynomial of degree `2k − 2`.
pub fn junk_orthogonality(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::input("junk orthogonality needs k >= 1"));
    }
    check_capacity(k)?;
    let t = truncation(k);
    let grid = tail_grid(2 * k - 1, -t, t);
    let mut h = vec![0.0; 2 * k + 1];
    Ok(-compensated_sum(
        grid.nodes
            .iter()
            .zip(&grid.weights)
            .zip(&grid.tails)
            .map(|((&x, &w), &tail)| {
                fill_hermite_functions(x, &mut h);
                w * h[2 * k] * tail
            }),
    ))
}

/// Which route filled a [`NormTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormSource {
    ClosedForm,
    Recursion,
    Quadrature,
}

/// `I_{2k+1} = ‖X_{2k+1}‖²` and `V_{2k} = ‖X_{2k}‖²/2` for `k ≤ k_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormTable {
    pub i_odd: Vec<f64>,
    pub v_even: Vec<f64>,
    pub source: NormSource,
}

impl NormTable {
    pub fn build(k_max: usize, source: NormSource) -> Result<Self> {
        check_capacity(k_max)?;
        let mut i_odd = Vec::with_capacity(k_max + 1);
        let mut v_even = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let (odd, even) = match source {
                NormSource::ClosedForm => (norm_sq_odd_closed(k), norm_sq_even_closed(k)),
                NormSource::Recursion => (norm_sq_odd_recursive(k), norm_sq_even_recursive(k)?),
                NormSource::Quadrature => (norm_sq_odd_quadrature(k)?, norm_sq_even_quadrature(k)?),
            };
            i_odd.push(odd);
            v_even.push(0.5 * even);
        }
        Ok(Self { i_odd, v_even, source })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::{half_line_integral_odd, HermiteBasis, PI_POW_NEG_QUARTER};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn odd_examples() {
        assert_relative_eq!(
            x_odd(0, 0.0).unwrap(),
            -SQRT_2 * PI_POW_NEG_QUARTER,
            max_relative = 1e-15
        );
        assert!(x_odd(0, 40.0).unwrap().abs() < 1e-300);
        for k in 0..=2 {
            assert!(x_odd(k, 8.0).unwrap().abs() <= 1e-10);
            assert!(x_odd(k, -8.0).unwrap().abs() <= 1e-10);
        }
        // Past the turning point the decay sets in for every degree.
        for k in 0..=40 {
            let t = truncation(k);
            assert!(x_odd(k, t).unwrap().abs() <= 1e-10, "k={k}");
            assert!(x_odd(k, -t).unwrap().abs() <= 1e-10, "k={k}");
        }
        assert!(matches!(x_odd(MAX_HALF_DEGREE + 1, 0.0), Err(Error::Capacity { .. })));
    }

    #[test]
    fn odd_expansion_matches_cumulative_quadrature() {
        // ∫_{−9}^{x} h_7 with fine Gauss–Legendre panels.
        let rule = crate::quadrature::gauss_legendre_panels(-9.0, 0.4, 200, 20).unwrap();
        let basis = HermiteBasis::new(7);
        let direct = rule.integrate(|t| basis.eval_h(7, t[0]).unwrap());
        assert!((x_odd(3, 0.4).unwrap() - direct).abs() <= 1e-9);

        for k in [1usize, 5, 12, 25] {
            let t = truncation(k);
            let grid = tail_grid(2 * k + 1, -t, t);
            for i in (0..grid.nodes.len()).step_by(97) {
                let via_expansion = x_odd(k, grid.nodes[i]).unwrap();
                assert!(
                    (via_expansion + grid.tails[i]).abs() <= 1e-11,
                    "k={k} x={}",
                    grid.nodes[i]
                );
            }
        }
    }

    #[test]
    fn odd_expansion_coefficients_square_sum_to_two() {
        for k in [0usize, 1, 7, 40, 300] {
            let s: f64 = x_odd_expansion(k).unwrap().iter().map(|(_, c)| c * c).sum();
            assert!((s - 2.0).abs() <= 1e-12, "k={k}");
        }
    }

    #[test]
    fn even_examples() {
        assert_relative_eq!(x_even(0, 0.0).unwrap(), -(PI.powf(0.25) / SQRT_2), max_relative = 1e-13);
        assert_eq!(x_even(2, -1.1).unwrap(), x_even(2, 1.1).unwrap());
        assert!(x_even(0, 30.0).unwrap().abs() < 1e-15);
        for k in 0..=10 {
            assert_relative_eq!(
                x_even(k, 0.0).unwrap(),
                -half_line_integral_even(k),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn half_line_closed_forms_match_quadrature() {
        for k in 0..=30 {
            let even = -x_even(k, 0.0).unwrap();
            assert_relative_eq!(half_line_integral_even(k), even, max_relative = 1e-10);
            let t = truncation(k);
            let grid = tail_grid(2 * k + 1, 0.0, t);
            let odd = grid.tails[0] + {
                // The first node is not at 0; add the piece [0, x_0].
                let rule = crate::quadrature::gauss_legendre_panels(0.0, grid.nodes[0], 1, 20).unwrap();
                let basis = HermiteBasis::new(2 * k + 1);
                rule.integrate(|x| basis.eval_h(2 * k + 1, x[0]).unwrap())
            };
            assert_relative_eq!(half_line_integral_odd(k), odd, max_relative = 1e-10);
        }
    }

    #[test]
    fn odd_norms() {
        assert_eq!(norm_sq_odd_closed(0), 2.0);
        assert_eq!(norm_sq_odd_closed(5), 2.0);
        assert_eq!(norm_sq_odd_recursive(0), 2.0);
        assert!((norm_sq_odd_recursive(1) - 2.0).abs() <= 1e-15);
        assert!((norm_sq_odd_recursive(25) - 2.0).abs() <= 1e-14);
        assert!((norm_sq_odd_quadrature(40).unwrap() - 2.0).abs() <= 1e-8);
        // h_80 reaches out to its turning point √161 ≈ 12.7, so the window
        // has to be the full truncation width rather than [−12, 12].
        let t = truncation(40);
        let rule = crate::quadrature::gauss_legendre_panels(-t, t, 192, 20).unwrap();
        let expansion = x_odd_expansion(40).unwrap();
        let via_expansion = rule.integrate(|x| eval_expansion(&expansion, x[0]).unwrap().powi(2));
        assert!((via_expansion - 2.0).abs() <= 1e-8, "{via_expansion}");
    }

    #[test]
    fn partial_sums() {
        assert_eq!(partial_binomial_sum(0, HalfSign::Plus), 1.0);
        assert_eq!(partial_binomial_sum(2, HalfSign::Plus), 11.0 / 8.0);
        let far = partial_binomial_sum(2000, HalfSign::Plus);
        assert!((far - SQRT_2).abs() <= 1e-3);
        let mut prev = partial_binomial_sum(1, HalfSign::Plus);
        for k in 2..200 {
            let cur = partial_binomial_sum(k, HalfSign::Plus);
            assert!((cur - SQRT_2).abs() < (prev - SQRT_2).abs());
            prev = cur;
        }
    }

    #[test]
    fn even_norm_values() {
        assert_relative_eq!(norm_sq_even_closed(0), 2.0 * (SQRT_2 - 1.0), max_relative = 1e-15);
        assert_relative_eq!(norm_sq_even_closed(1), 3.0 * SQRT_2 - 2.0, max_relative = 1e-15);
        let far = norm_sq_even_closed(200);
        assert!((far - 2.0).abs() <= 5e-3 && far <= 3.0);

        assert_relative_eq!(
            norm_sq_even_recursive(0).unwrap(),
            2.0 * (SQRT_2 - 1.0),
            max_relative = 1e-13
        );
        assert!((norm_sq_even_recursive(1).unwrap() - norm_sq_even_closed(1)).abs() <= 1e-13);
        assert!((norm_sq_even_recursive(50).unwrap() - norm_sq_even_closed(50)).abs() <= 1e-12);
    }

    #[test]
    fn even_norms_approach_two_with_shrinking_oscillation() {
        // The sequence alternates around 2; its distance to 2 shrinks
        // strictly from k = 1 on.
        let dist: Vec<f64> = (0..=200).map(|k| (norm_sq_even_closed(k) - 2.0).abs()).collect();
        for k in 2..=200 {
            assert!(dist[k] < dist[k - 1], "k={k}");
        }
        assert!(norm_sq_even_closed(1) > 2.0 && norm_sq_even_closed(2) < 2.0);
    }

    #[test]
    fn three_way_agreement_and_uniform_bound() {
        let mut worst: f64 = 0.0;
        for k in 0..=40 {
            let closed = norm_sq_even_closed(k);
            let rec = norm_sq_even_recursive(k).unwrap();
            let quad = norm_sq_even_quadrature(k).unwrap();
            assert!(
                (closed - rec).abs() <= 1e-8 && (closed - quad).abs() <= 1e-8,
                "even k={k}"
            );
            let odd_quad = norm_sq_odd_quadrature(k).unwrap();
            assert!((odd_quad - norm_sq_odd_recursive(k)).abs() <= 1e-8, "odd k={k}");
        }
        // X_0, …, X_60.
        for n in 0..=60usize {
            let v = if n % 2 == 0 {
                norm_sq_even_quadrature(n / 2).unwrap()
            } else {
                norm_sq_odd_quadrature(n / 2).unwrap()
            };
            worst = worst.max(v);
        }
        assert!(worst <= 3.01);
    }

    #[test]
    fn norm_tables() {
        let closed = NormTable::build(5, NormSource::ClosedForm).unwrap();
        assert!(closed.i_odd.iter().all(|&v| v == 2.0));
        assert!(closed.v_even.iter().all(|&v| 2.0 * v > 0.0 && 2.0 * v <= 3.0));
        let rec = NormTable::build(5, NormSource::Recursion).unwrap();
        for (a, b) in closed.v_even.iter().zip(&rec.v_even) {
            assert!((a - b).abs() <= 1e-13);
        }
    }

    #[test]
    fn value_at_origin() {
        assert_relative_eq!(x_even_at_zero_sq(0), PI.sqrt() / 2.0, max_relative = 1e-14);
        assert_relative_eq!(x_even_at_zero_sq(1), PI.sqrt() / 4.0, max_relative = 1e-14);
        assert!(x_even_at_zero_sq_normalized(30) <= 2.0);
        for k in 1..=200 {
            assert!(x_even_at_zero_sq_normalized(k) <= 2.0);
        }
        for k in 0..=8 {
            assert_relative_eq!(
                x_even(k, 0.0).unwrap().powi(2),
                x_even_at_zero_sq(k),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn merge_identity() {
        assert!(merge_identity_check(0) <= 1e-15);
        for k in 0..=100 {
            assert!(merge_identity_check(k) <= 1e-13, "k={k}");
        }
        for k in 0..=20 {
            assert!(merge_identity_exact(k), "k={k}");
        }
    }

    #[test]
    fn junk_is_orthogonal() {
        for k in 1..=20 {
            assert!(junk_orthogonality(k).unwrap().abs() <= 1e-9, "k={k}");
        }
    }

    proptest! {
        #[test]
        fn derivatives(k in 0usize..25, x in -6.0f64..6.0) {
            let step = 1e-5;
            let basis = HermiteBasis::new(2 * k + 1);
            let d_odd = (x_odd(k, x + step).unwrap() - x_odd(k, x - step).unwrap()) / (2.0 * step);
            prop_assert!((d_odd - basis.eval_h(2 * k + 1, x).unwrap()).abs() <= 1e-6);
            prop_assume!(x.abs() > 1e-3);
            let d_even = (x_even(k, x + step).unwrap() - x_even(k, x - step).unwrap()) / (2.0 * step);
            prop_assert!((d_even - x.signum() * basis.eval_h(2 * k, x).unwrap()).abs() <= 1e-6);
        }

        #[test]
        fn odd_antiderivative_is_even(k in 0usize..30, x in 0.0f64..8.0) {
            prop_assert!((x_odd(k, x).unwrap() - x_odd(k, -x).unwrap()).abs() <= 1e-14);
        }
    }
}
