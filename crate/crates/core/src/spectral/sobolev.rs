//! Hermite–Sobolev and Bessel-potential norms of a spectral state.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{tensor_hermite, PointTable, SpectralState};
use crate::error::{Error, Result};
use crate::quadrature::{compensated_sum, doubling_gate};

/// Extra Gauss–Hermite nodes per axis beyond `k_max + 1`, before scaling.
pub const BESSEL_EXTRA_NODES: usize = 120;

/// `‖(−Δ + |x|²)^{s/2} f‖ = (Σ (2|α| + n)^s |a_α|²)^{1/2}`.
pub fn hermite_sobolev_norm(state: &SpectralState, s: f64) -> Result<f64> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::input(format!("Sobolev order must be nonnegative, got {s}")));
    }
    let n = state.dim();
    Ok(compensated_sum(
        state
            .iter()
            .map(|(a, c)| ((2 * a.degree() + n) as f64).powf(s) * c.norm_sqr()),
    )
    .sqrt())
}

/// `‖(I − Δ)^{s/2} f‖ = (∫ (1 + |ξ|²)^s |f̂(ξ)|² dξ)^{1/2}`, with
/// `f̂ = Σ (−i)^{|α|} a_α Φ_α` integrated by tensor Gauss–Hermite.
///
/// The rule has `⌈(k_max + 1 + 120)·scale⌉` nodes per axis and is checked
/// against twice that; disagreement beyond `tol` is a tolerance error.
pub fn bessel_sobolev_norm(state: &SpectralState, s: f64, scale: f64, tol: f64) -> Result<f64> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::input(format!("Sobolev order must be nonnegative, got {s}")));
    }
    if state.dim() > 3 {
        return Err(Error::Capacity {
            what: "Bessel norm dimension",
            requested: state.dim(),
            limit: 3,
        });
    }
    if !(scale > 0.0) {
        return Err(Error::input("rule scale must be positive"));
    }
    let transformed = fourier_transform(state);
    let base = (state.k_max() + 1 + BESSEL_EXTRA_NODES) as f64;
    let value = doubling_gate("Bessel potential norm", tol, scale, |sc| {
        let m = (base * sc).ceil() as usize;
        bessel_sq_with(&transformed, s, m)
    })?;
    Ok(value.max(0.0).sqrt())
}

/// `f̂` as a state: `a_α ↦ (−i)^{|α|} a_α`.
pub fn fourier_transform(state: &SpectralState) -> SpectralState {
    let phases = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
    ];
    SpectralState::from_modes(
        state.dim(),
        state.iter().map(|(a, c)| (a.clone(), c * phases[a.degree() % 4])),
    )
    .expect("phase rotation keeps a valid state")
}

fn bessel_sq_with(transformed: &SpectralState, s: f64, m: usize) -> Result<f64> {
    let (nodes, weights) = tensor_hermite(transformed.dim(), m)?;
    let degree = transformed.iter().map(|(a, _)| a.max_component()).max().unwrap_or(0);
    let parts: Vec<f64> = nodes
        .par_iter()
        .zip(weights.par_iter())
        .map(|(xi, &w)| {
            let r2: f64 = xi.iter().map(|v| v * v).sum();
            w * (1.0 + r2).powf(s) * transformed.eval_with(&PointTable::new(xi, degree)).norm_sqr()
        })
        .collect();
    Ok(compensated_sum(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{enumerate_up_to, MultiIndex};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hermite_examples() {
        let mode = SpectralState::mode(MultiIndex::new([2, 1]));
        assert_relative_eq!(
            hermite_sobolev_norm(&mode, 1.5).unwrap(),
            8f64.powf(0.75),
            max_relative = 1e-15
        );
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let state = SpectralState::random(2, &enumerate_up_to(2, 5).unwrap(), &mut rng).unwrap();
        assert_relative_eq!(
            hermite_sobolev_norm(&state, 0.0).unwrap(),
            state.norm(),
            max_relative = 1e-15
        );
        let sum = SpectralState::from_modes(
            1,
            [
                (MultiIndex::new([0]), Complex64::new(1.0, 0.0)),
                (MultiIndex::new([2]), Complex64::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        assert_relative_eq!(
            hermite_sobolev_norm(&sum, 2.0).unwrap(),
            26f64.sqrt(),
            max_relative = 1e-15
        );
        assert!(hermite_sobolev_norm(&sum, -1.0).is_err());
    }

    #[test]
    fn bessel_examples() {
        let h0 = SpectralState::mode(MultiIndex::new([0]));
        assert_relative_eq!(
            bessel_sobolev_norm(&h0, 0.0, 1.0, 1e-12).unwrap(),
            1.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            bessel_sobolev_norm(&h0, 1.0, 1.0, 1e-12).unwrap(),
            1.5f64.sqrt(),
            max_relative = 1e-14
        );
        // ∫ (1 + ξ²)² h_0² = 1 + 1 + 3/4.
        assert_relative_eq!(
            bessel_sobolev_norm(&h0, 2.0, 1.0, 1e-12).unwrap(),
            2.75f64.sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn bessel_single_modes_at_integer_order() {
        // ∫ (1 + |ξ|²) |Φ_α|² = 1 + |α| + n/2.
        for n in 1..=2usize {
            for k in [0usize, 3, 10, 30] {
                let mut alpha = vec![0; n];
                alpha[0] = k;
                let mode = SpectralState::mode(MultiIndex::new(alpha));
                let expected = (1.0 + k as f64 + n as f64 / 2.0).sqrt();
                assert_relative_eq!(
                    bessel_sobolev_norm(&mode, 1.0, 1.0, 1e-10).unwrap(),
                    expected,
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn fractional_order_is_gated() {
        let mode = SpectralState::mode(MultiIndex::new([7, 2]));
        let half = bessel_sobolev_norm(&mode, 0.5, 1.0, 1e-8).unwrap();
        let one = bessel_sobolev_norm(&mode, 1.0, 1.0, 1e-8).unwrap();
        assert!(1.0 < half && half < one);
        // Interpolation: ‖·‖_{1/2}² ≤ ‖·‖_0 ‖·‖_1.
        assert!(half * half <= one * (1.0 + 1e-12));
    }

    #[test]
    fn transform_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let state = SpectralState::random(3, &enumerate_up_to(3, 4).unwrap(), &mut rng).unwrap();
        let t = fourier_transform(&state);
        assert_relative_eq!(t.norm(), state.norm(), max_relative = 1e-15);
        let back = fourier_transform(&fourier_transform(&fourier_transform(&t)));
        for (a, c) in state.iter() {
            assert!((back.coefficient(a) - c).norm() <= 1e-15);
        }
    }
}
