//! Time-averaged weighted functionals, eigenspace Gram matrices, and the
//! collapsed-variable trace.
//!
//! Distinct eigenvalues `2k + n` are integers, so over one period
//! `∫_0^{2π} |u(x,t)|² dt = 2π Σ_k |(P_k f)(x)|²` pointwise. Every weighted
//! space-time integral therefore reduces to a sum of static level integrals,
//! and those are computed with exact Gauss rules: generalized Laguerre in
//! `|x_W|²` for the weighted block of coordinates and Gauss–Hermite for the
//! rest.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{enumerate_multiindices, MultiIndex, PointTable, SpectralState};
use crate::error::{Error, Result};
use crate::quadrature::{compensated_sum, gauss_hermite, integrate_cyl_2d_truncated, singular_ball_rule, RuleSizes};

/// Rejects `(|W|, δ)` pairs for which `|x_W|^{−2δ}` is not locally
/// integrable against the level functions.
///
/// One weighted axis allows `δ < ½`, or `δ ≤ 1` when the state is odd in that
/// axis; two allow `δ < 1`; three or more allow `δ ≤ 1`.
pub fn check_admissible(weighted_axes: usize, delta: f64, odd_in_axis: bool) -> Result<()> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::input(format!("delta must be a nonnegative number, got {delta}")));
    }
    let ok = match weighted_axes {
        0 => return Err(Error::input("at least one weighted axis is required")),
        1 => delta < 0.5 || (odd_in_axis && delta <= 1.0),
        2 => delta < 1.0,
        _ => delta <= 1.0,
    };
    if !ok {
        return Err(Error::Inadmissible {
            dims: weighted_axes,
            delta,
        });
    }
    Ok(())
}

fn check_axes(n: usize, axes: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &a in axes {
        if a >= n || seen[a] {
            return Err(Error::input(format!(
                "invalid weighted axes {axes:?} for dimension {n}"
            )));
        }
        seen[a] = true;
    }
    Ok(())
}

/// Nodes and weights in `ℝⁿ` for `∫ G(x) |x_W|^{−2δ} dx` with
/// `G = e^{−|x|²}·(polynomial of degree ≤ 2k)`.
struct LevelRule {
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

fn level_rule(n: usize, k: usize, delta: f64, axes: &[usize], shift: usize, refine: usize) -> Result<LevelRule> {
    let ball = singular_ball_rule(axes.len(), delta, k, shift, refine)?;
    let free: Vec<usize> = (0..n).filter(|i| !axes.contains(i)).collect();
    let m = (k + 1) * refine.max(1);
    let gh = gauss_hermite(m)?;
    let free_count = m.pow(free.len() as u32);

    let mut nodes = Vec::with_capacity(ball.len() * free_count);
    let mut weights = Vec::with_capacity(ball.len() * free_count);
    let mut idx = vec![0usize; free.len()];
    for i in 0..ball.len() {
        let b = ball.node(i);
        idx.iter_mut().for_each(|v| *v = 0);
        for _ in 0..free_count {
            let mut x = vec![0.0; n];
            for (j, &axis) in axes.iter().enumerate() {
                x[axis] = b[j];
            }
            let mut w = ball.weights[i];
            for (j, &axis) in free.iter().enumerate() {
                x[axis] = gh.nodes[idx[j]];
                w *= gh.scaled_weights[idx[j]];
            }
            nodes.push(x);
            weights.push(w);
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < m {
                    break;
                }
                *slot = 0;
            }
        }
    }
    Ok(LevelRule { nodes, weights })
}

/// `∫ |Σ_{|α|=k} a_α Φ_α|² / |x_W|^{2δ} dx` for a state supported on level `k`.
///
/// `refine` multiplies every node count; any value ≥ 1 is exact in exact
/// arithmetic, so comparing 1 and 2 only measures rounding.
pub fn level_weighted_integral(level: &SpectralState, delta: f64, axes: &[usize], refine: usize) -> Result<f64> {
    let n = level.dim();
    check_axes(n, axes)?;
    let levels = level.levels();
    if levels.len() > 1 {
        return Err(Error::input("state spans more than one eigenlevel"));
    }
    let Some(&k) = levels.first() else {
        return Ok(0.0);
    };
    let odd = axes.len() == 1 && level.is_odd_in(axes[0]);
    check_admissible(axes.len(), delta, odd)?;
    let rule = level_rule(n, k, delta, axes, usize::from(odd), refine)?;
    let parts: Vec<f64> = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(x, &w)| w * level.eval_with(&PointTable::new(x, k)).norm_sqr())
        .collect();
    Ok(compensated_sum(parts))
}

/// `∫_0^{2π} ∫ |u(x,t)|² / |x_W|^{2δ} dx dt` for `u = e^{−itH} f`, evaluated as
/// `2π Σ_k ∫ |P_k f|² / |x_W|^{2δ}`.
pub fn time_avg_weighted(state: &SpectralState, delta: f64, axes: &[usize], refine: usize) -> Result<f64> {
    check_axes(state.dim(), axes)?;
    let odd = axes.len() == 1 && state.is_odd_in(axes[0]);
    check_admissible(axes.len(), delta, odd)?;
    let per_level = state
        .levels()
        .into_iter()
        .map(|k| level_weighted_integral(&state.project(k), delta, axes, refine))
        .collect::<Result<Vec<f64>>>()?;
    Ok(2.0 * PI * compensated_sum(per_level))
}

/// Gram matrix `G_{αβ} = ∫ Φ_α Φ_β / |x_W|^{2δ}` on one eigenlevel, stored as
/// blocks of indices sharing a parity pattern (the weight is even in every
/// coordinate, so other entries vanish).
#[derive(Debug, Clone)]
pub struct LevelGram {
    pub n: usize,
    pub k: usize,
    pub blocks: Vec<GramBlock>,
}

#[derive(Debug, Clone)]
pub struct GramBlock {
    pub indices: Vec<MultiIndex>,
    pub matrix: DMatrix<f64>,
}

pub fn level_gram(n: usize, k: usize, delta: f64, axes: &[usize], refine: usize) -> Result<LevelGram> {
    check_axes(n, axes)?;
    let mut by_parity: BTreeMap<u64, Vec<MultiIndex>> = BTreeMap::new();
    for a in enumerate_multiindices(n, k)? {
        by_parity.entry(a.parity_mask()).or_default().push(a);
    }
    let mut blocks = Vec::with_capacity(by_parity.len());
    for (_, indices) in by_parity {
        let odd = axes.len() == 1 && indices[0].0[axes[0]] % 2 == 1;
        check_admissible(axes.len(), delta, odd)?;
        let rule = level_rule(n, k, delta, axes, usize::from(odd), refine)?;
        let rows: Vec<Vec<f64>> = rule
            .nodes
            .par_iter()
            .zip(rule.weights.par_iter())
            .map(|(x, &w)| {
                let t = PointTable::new(x, k);
                let s = w.sqrt();
                indices.iter().map(|a| s * t.phi(a)).collect()
            })
            .collect();
        let b = DMatrix::from_fn(rows.len(), indices.len(), |i, j| rows[i][j]);
        let matrix = b.transpose() * &b;
        blocks.push(GramBlock { indices, matrix });
    }
    Ok(LevelGram { n, k, blocks })
}

impl LevelGram {
    pub fn size(&self) -> usize {
        self.blocks.iter().map(|b| b.indices.len()).sum()
    }

    /// `Σ_{αβ} conj(a_α) G_{αβ} a_β` for a state on this level.
    pub fn quadratic_form(&self, state: &SpectralState) -> f64 {
        let mut total = Vec::new();
        for block in &self.blocks {
            let a: Vec<Complex64> = block.indices.iter().map(|i| state.coefficient(i)).collect();
            for (i, ai) in a.iter().enumerate() {
                for (j, aj) in a.iter().enumerate() {
                    total.push((ai.conj() * aj).re * block.matrix[(i, j)]);
                }
            }
        }
        compensated_sum(total)
    }

    /// Largest singular value, by power iteration on `GᵀG` in each block.
    pub fn largest_singular_value(&self, seed: u64) -> Result<f64> {
        let mut best: f64 = 0.0;
        for (i, block) in self.blocks.iter().enumerate() {
            best = best.max(power_iteration(
                &block.matrix,
                seed.wrapping_add(i as u64),
                20_000,
                1e-13,
            )?);
        }
        Ok(best)
    }

    /// Largest eigenvalue from a dense symmetric eigensolver.
    pub fn largest_eigenvalue_dense(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| SymmetricEigen::new(b.matrix.clone()).eigenvalues.max())
            .fold(0.0, f64::max)
    }
}

/// `σ_max(M)` by power iteration on `MᵀM` from a seeded random start.
pub fn power_iteration(m: &DMatrix<f64>, seed: u64, max_iter: usize, tol: f64) -> Result<f64> {
    let dim = m.ncols();
    if dim == 0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DVector::from_fn(dim, |_, _| StandardNormal.sample(&mut rng));
    v /= v.norm();
    let mut previous = 0.0;
    for _ in 0..max_iter {
        let w = m.transpose() * (m * &v);
        let lambda = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        v = w / norm;
        if (lambda - previous).abs() <= tol * lambda.abs() {
            return Ok(lambda.max(0.0).sqrt());
        }
        previous = lambda;
    }
    Err(Error::NoConvergence { iterations: max_iter })
}

/// The level integral with the innermost disk of the polar rule removed,
/// for `n = 2` and any `δ ≥ 0`. With `δ = 1` it grows like the log of the
/// inverse cut-off radius whenever `P_k f(0) ≠ 0`.
pub fn truncated_level_integral_2d(level: &SpectralState, delta: f64, sizes: &RuleSizes) -> Result<f64> {
    if level.dim() != 2 {
        return Err(Error::input("the truncated polar functional is two-dimensional"));
    }
    let k = level.k_max();
    let radius = ((2 * k + 2) as f64).sqrt() + 10.0;
    integrate_cyl_2d_truncated(
        |r, phi| {
            let x = [r * phi.cos(), r * phi.sin()];
            level.eval_with(&PointTable::new(&x, k)).norm_sqr()
        },
        delta,
        radius,
        sizes,
    )
}

/// Largest total degree accepted by [`collapse_trace_norm`].
pub const COLLAPSE_MAX_LEVEL: usize = 4;

/// `∫_0^{2π} ∫_{ℝ³} |u(x,x,x,t)|² dx dt` for a nine-dimensional state,
/// level by level: `2π Σ_k ∫ |Σ_{|α|=k} a_α Φ_α(x,x,x)|² dx`.
///
/// `Φ_α(x,x,x)` decays like `e^{−3|x|²/2}`, so the Gauss–Hermite nodes are
/// scaled by `1/√3`.
pub fn collapse_trace_norm(state: &SpectralState, refine: usize) -> Result<f64> {
    if state.dim() != 9 {
        return Err(Error::input("the collapsed trace needs a nine-dimensional state"));
    }
    if state.k_max() > COLLAPSE_MAX_LEVEL {
        return Err(Error::Capacity {
            what: "collapse level",
            requested: state.k_max(),
            limit: COLLAPSE_MAX_LEVEL,
        });
    }
    let mut per_level = Vec::new();
    for k in state.levels() {
        per_level.push(collapse_level(&state.project(k), k, refine)?);
    }
    Ok(2.0 * PI * compensated_sum(per_level))
}

fn collapse_level(level: &SpectralState, k: usize, refine: usize) -> Result<f64> {
    let m = (k + 3) * refine.max(1);
    let gh = gauss_hermite(m)?;
    let s3 = 3f64.sqrt();
    let axis_nodes: Vec<f64> = gh.nodes.iter().map(|y| y / s3).collect();
    let axis_weights: Vec<f64> = gh.scaled_weights.iter().map(|w| w / s3).collect();
    let modes: Vec<(&MultiIndex, &Complex64)> = level.iter().collect();
    let mut points = Vec::with_capacity(m * m * m);
    for i in 0..m {
        for j in 0..m {
            for l in 0..m {
                points.push((
                    [axis_nodes[i], axis_nodes[j], axis_nodes[l]],
                    axis_weights[i] * axis_weights[j] * axis_weights[l],
                ));
            }
        }
    }
    let parts: Vec<f64> = points
        .par_iter()
        .map(|(x, w)| {
            let t = PointTable::new(x, k);
            let mut u = Complex64::new(0.0, 0.0);
            for (a, c) in &modes {
                let v: f64 = (0..3)
                    .map(|c3| t.h(c3, a.0[c3]) * t.h(c3, a.0[3 + c3]) * t.h(c3, a.0[6 + c3]))
                    .product();
                u += **c * v;
            }
            w * u.norm_sqr()
        })
        .collect();
    Ok(compensated_sum(parts))
}

/// `‖(−Δ + |x|²) f‖² = Σ (2|α| + n)² |a_α|²`.
pub fn oscillator_norm_sq(state: &SpectralState) -> f64 {
    let n = state.dim();
    compensated_sum(
        state
            .iter()
            .map(|(a, c)| ((2 * a.degree() + n) as f64).powi(2) * c.norm_sqr()),
    )
}
