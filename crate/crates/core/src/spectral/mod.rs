//! Tensor Hermite modes in `n` dimensions and the harmonic-oscillator
//! propagator acting on their coefficients.
//!
//! `Φ_α(x) = Π h_{α_i}(x_i)` satisfies `(−Δ + |x|²) Φ_α = (2|α| + n) Φ_α`, so the
//! solution of `i ∂_t u = (−Δ + |x|²) u` with `u(0) = Σ a_α Φ_α` is
//! `Σ e^{−i(2|α|+n)t} a_α Φ_α`.
//!
//! The Fourier transform convention is unitary in angular frequency,
//! `f̂(ξ) = (2π)^{−n/2} ∫ f(x) e^{−i x·ξ} dx`, under which `Φ̂_α = (−i)^{|α|} Φ_α`.

mod functional;
mod kernel;
mod sobolev;

pub use functional::*;
pub use kernel::*;
pub use sobolev::*;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::fill_hermite_functions;
use crate::quadrature::{compensated_sum, gauss_hermite};

/// Largest eigenspace the enumeration will materialize.
pub const MAX_LEVEL_SIZE: usize = 2_000_000;

/// Degrees `(α_1, …, α_n)`; ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn new(degrees: impl Into<Vec<usize>>) -> Self {
        Self(degrees.into())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α| = Σ α_i`.
    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn max_component(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Parity pattern as a bitmask: bit `i` set when `α_i` is odd.
    pub fn parity_mask(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0, |m, (i, &a)| if a % 2 == 1 { m | (1 << i) } else { m })
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// The eigenspace `{Φ_α : |α| = k}` in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenLevel {
    pub n: usize,
    pub k: usize,
    pub eigenvalue: usize,
    pub dimension_count: usize,
}

impl EigenLevel {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        Ok(Self {
            n,
            k,
            eigenvalue: 2 * k + n,
            dimension_count: level_size(n, k)?,
        })
    }
}

/// `C(k+n−1, n−1)`, or a capacity error if it exceeds [`MAX_LEVEL_SIZE`].
pub fn level_size(n: usize, k: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::input("dimension must be at least 1"));
    }
    let mut count: u128 = 1;
    for i in 1..n as u128 {
        count = count * (k as u128 + i) / i;
        if count > MAX_LEVEL_SIZE as u128 {
            return Err(Error::Capacity {
                what: "eigenspace size",
                requested: usize::try_from(count).unwrap_or(usize::MAX),
                limit: MAX_LEVEL_SIZE,
            });
        }
    }
    Ok(count as usize)
}

/// All `α` with `|α| = k`, in lexicographic order.
pub fn enumerate_multiindices(n: usize, k: usize) -> Result<Vec<MultiIndex>> {
    let size = level_size(n, k)?;
    let mut out = Vec::with_capacity(size);
    let mut current = vec![0usize; n];
    fill_indices(&mut current, 0, k, &mut out);
    Ok(out)
}

fn fill_indices(current: &mut Vec<usize>, pos: usize, remaining: usize, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for a in 0..=remaining {
        current[pos] = a;
        fill_indices(current, pos + 1, remaining - a, out);
    }
}

/// All `α` with `|α| ≤ k_max`, level by level.
pub fn enumerate_up_to(n: usize, k_max: usize) -> Result<Vec<MultiIndex>> {
    let mut out = Vec::new();
    for k in 0..=k_max {
        out.extend(enumerate_multiindices(n, k)?);
    }
    Ok(out)
}

/// Per-axis Hermite tables `h_j(x_i)`, `j ≤ degree`, at one point.
#[derive(Debug, Clone)]
pub(crate) struct PointTable {
    degree: usize,
    values: Vec<f64>,
}

impl PointTable {
    pub(crate) fn new(x: &[f64], degree: usize) -> Self {
        let mut values = vec![0.0; x.len() * (degree + 1)];
        for (i, &xi) in x.iter().enumerate() {
            fill_hermite_functions(xi, &mut values[i * (degree + 1)..(i + 1) * (degree + 1)]);
        }
        Self { degree, values }
    }

    #[inline]
    pub(crate) fn h(&self, axis: usize, j: usize) -> f64 {
        self.values[axis * (self.degree + 1) + j]
    }

    #[inline]
    pub(crate) fn phi(&self, alpha: &MultiIndex) -> f64 {
        alpha.0.iter().enumerate().map(|(i, &a)| self.h(i, a)).product()
    }
}

/// `Φ_α(x)`.
pub fn evaluate_phi(alpha: &MultiIndex, x: &[f64]) -> Result<f64> {
    if alpha.dim() != x.len() {
        return Err(Error::input(format!(
            "multi-index has {} components but the point has {}",
            alpha.dim(),
            x.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("non-finite point"));
    }
    Ok(PointTable::new(x, alpha.max_component()).phi(alpha))
}

/// Fourier–Hermite coefficients `a_α` of a function on `ℝⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "StateRecord", try_from = "StateRecord")]
pub struct SpectralState {
    n: usize,
    coefficients: BTreeMap<MultiIndex, Complex64>,
}

/// Wire form: `{ "n": …, "coefficients": [[[α…], re, im], …] }`.
#[derive(Serialize, Deserialize)]
struct StateRecord {
    n: usize,
    coefficients: Vec<(Vec<usize>, f64, f64)>,
}

impl From<SpectralState> for StateRecord {
    fn from(s: SpectralState) -> Self {
        Self {
            n: s.n,
            coefficients: s.coefficients.into_iter().map(|(a, c)| (a.0, c.re, c.im)).collect(),
        }
    }
}

impl TryFrom<StateRecord> for SpectralState {
    type Error = Error;

    fn try_from(r: StateRecord) -> Result<Self> {
        SpectralState::from_modes(
            r.n,
            r.coefficients
                .into_iter()
                .map(|(a, re, im)| (MultiIndex(a), Complex64::new(re, im))),
        )
    }
}

impl SpectralState {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            coefficients: BTreeMap::new(),
        }
    }

    /// Builds a state, summing repeated indices.
    pub fn from_modes(n: usize, modes: impl IntoIterator<Item = (MultiIndex, Complex64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("dimension must be at least 1"));
        }
        let mut coefficients = BTreeMap::new();
        for (alpha, c) in modes {
            if alpha.dim() != n {
                return Err(Error::input(format!("index {alpha} does not have {n} components")));
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::input(format!("non-finite coefficient at {alpha}")));
            }
            *coefficients.entry(alpha).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Ok(Self { n, coefficients })
    }

    /// A single normalized mode `Φ_α`.
    pub fn mode(alpha: MultiIndex) -> Self {
        let n = alpha.dim();
        let mut coefficients = BTreeMap::new();
        coefficients.insert(alpha, Complex64::new(1.0, 0.0));
        Self { n, coefficients }
    }

    /// Complex-Gaussian coefficients on `indices`, normalized to unit norm.
    pub fn random<R: Rng + ?Sized>(n: usize, indices: &[MultiIndex], rng: &mut R) -> Result<Self> {
        let modes: Vec<(MultiIndex, Complex64)> = indices
            .iter()
            .map(|a| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                (a.clone(), Complex64::new(re, im))
            })
            .collect();
        let state = Self::from_modes(n, modes)?;
        let norm = state.norm();
        if norm == 0.0 {
            return Err(Error::input("random state over an empty index set"));
        }
        Ok(state.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Largest `|α|` present.
    pub fn k_max(&self) -> usize {
        self.coefficients.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> Complex64 {
        self.coefficients.get(alpha).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coefficients.iter()
    }

    /// `Σ |a_α|²`.
    pub fn norm_sq(&self) -> f64 {
        compensated_sum(self.coefficients.values().map(|c| c.norm_sqr()))
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            n: self.n,
            coefficients: self.coefficients.iter().map(|(a, v)| (a.clone(), v * c)).collect(),
        }
    }

    /// Levels present in the state, ascending.
    pub fn levels(&self) -> Vec<usize> {
        let mut ks: Vec<usize> = self.coefficients.keys().map(MultiIndex::degree).collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    }

    /// `(P_k f)`: keeps `|α| = k`.
    pub fn project(&self, k: usize) -> Self {
        self.filter(|a| a.degree() == k)
    }

    fn filter(&self, keep: impl Fn(&MultiIndex) -> bool) -> Self {
        Self {
            n: self.n,
            coefficients: self
                .coefficients
                .iter()
                .filter(|(a, _)| keep(a))
                .map(|(a, c)| (a.clone(), *c))
                .collect(),
        }
    }

    /// `a_α ↦ e^{−i(2|α|+n)t} a_α`.
    pub fn propagate(&self, t: f64) -> Self {
        Self {
            n: self.n,
            coefficients: self
                .coefficients
                .iter()
                .map(|(a, c)| {
                    let lambda = (2 * a.degree() + self.n) as f64;
                    let phase = (lambda * t).rem_euclid(2.0 * PI);
                    (a.clone(), c * Complex64::from_polar(1.0, -phase))
                })
                .collect(),
        }
    }

    /// `(odd part, even part)` with respect to `x_axis ↦ −x_axis`.
    pub fn parity_decompose(&self, axis: usize) -> Result<(Self, Self)> {
        if axis >= self.n {
            return Err(Error::input(format!(
                "axis {axis} out of range for dimension {}",
                self.n
            )));
        }
        Ok((self.filter(|a| a.0[axis] % 2 == 1), self.filter(|a| a.0[axis] % 2 == 0)))
    }

    /// True if every mode is odd in `axis`.
    pub fn is_odd_in(&self, axis: usize) -> bool {
        self.coefficients
            .keys()
            .all(|a| a.0.get(axis).is_some_and(|d| d % 2 == 1))
    }

    /// `f(x) = Σ a_α Φ_α(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.n {
            return Err(Error::input(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.n
            )));
        }
        let degree = self
            .coefficients
            .keys()
            .map(MultiIndex::max_component)
            .max()
            .unwrap_or(0);
        let table = PointTable::new(x, degree);
        Ok(self.eval_with(&table))
    }

    pub(crate) fn eval_with(&self, table: &PointTable) -> Complex64 {
        let (mut re, mut im) = (0.0, 0.0);
        for (a, c) in &self.coefficients {
            let p = table.phi(a);
            re += c.re * p;
            im += c.im * p;
        }
        Complex64::new(re, im)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::input(format!("invalid state JSON: {e}")))
    }
}

/// Tensor Gauss–Hermite rule with `m` nodes per axis, as flat nodes and
/// envelope-scaled weights.
pub(crate) fn tensor_hermite(n: usize, m: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let rule = gauss_hermite(m)?;
    let total = m
        .checked_pow(n as u32)
        .filter(|&t| t <= 50_000_000)
        .ok_or(Error::Capacity {
            what: "tensor quadrature nodes",
            requested: usize::MAX,
            limit: 50_000_000,
        })?;
    let mut nodes = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        nodes.push(idx.iter().map(|&i| rule.nodes[i]).collect());
        weights.push(idx.iter().map(|&i| rule.scaled_weights[i]).product());
        for slot in idx.iter_mut().rev() {
            *slot += 1;
            if *slot < m {
                break;
            }
            *slot = 0;
        }
    }
    Ok((nodes, weights))
}

/// `a_α = ∫ f Φ_α` for `|α| ≤ k_max`, by tensor Gauss–Hermite.
///
/// The rule has `⌈(k_max + 2)·scale⌉` nodes per axis, exact when `f` is a
/// Hermite combination of degree up to `k_max + 2` or so. The computation is
/// repeated with twice the nodes and fails with a tolerance error if any
/// coefficient moves by more than `tol`.
pub fn coefficients_from_function<F>(f: F, n: usize, k_max: usize, scale: f64, tol: f64) -> Result<SpectralState>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let indices = enumerate_up_to(n, k_max)?;
    let m = (((k_max + 2) as f64) * scale.max(0.0)).ceil().max(1.0) as usize;
    let coarse = project_onto(&f, n, k_max, &indices, m)?;
    let fine = project_onto(&f, n, k_max, &indices, 2 * m)?;
    for (i, (c, g)) in coarse.iter().zip(&fine).enumerate() {
        if (c - g).norm() > tol {
            return Err(Error::Tolerance {
                what: format!("coefficient {}", indices[i]),
                coarse: c.norm(),
                fine: g.norm(),
                tolerance: tol,
            });
        }
    }
    SpectralState::from_modes(n, indices.into_iter().zip(fine))
}

fn project_onto<F>(f: &F, n: usize, k_max: usize, indices: &[MultiIndex], m: usize) -> Result<Vec<Complex64>>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let (nodes, weights) = tensor_hermite(n, m)?;
    // Scaled weights absorb the rule's e^{−|x|²}, so f·Φ_α is integrated as is.
    let samples: Vec<(PointTable, Complex64)> = nodes
        .par_iter()
        .zip(weights.par_iter())
        .map(|(x, &w)| (PointTable::new(x, k_max), f(x) * w))
        .collect();
    Ok(indices
        .par_iter()
        .map(|a| {
            let re = compensated_sum(samples.iter().map(|(t, fw)| fw.re * t.phi(a)));
            let im = compensated_sum(samples.iter().map(|(t, fw)| fw.im * t.phi(a)));
            Complex64::new(re, im)
        })
        .collect())
}
