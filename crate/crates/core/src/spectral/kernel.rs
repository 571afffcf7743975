//! Reproducing kernels `Φ_k(x, y) = Σ_{|α|=k} Φ_α(x) Φ_α(y)` of the eigenspaces.
//!
//! The sum over `α` factors axis by axis: with `c_i[j] = h_j(x_i) h_j(y_i)`,
//! `Φ_k(x, y)` is the degree-`k` coefficient of `Π_i (Σ_j c_i[j] z^j)`. That is
//! an `O(n k²)` convolution instead of a sum over `C(k+n−1, n−1)` terms.

use serde::{Deserialize, Serialize};

use super::{enumerate_multiindices, PointTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelQuery {
    pub n: usize,
    pub k: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl KernelQuery {
    pub fn new(n: usize, k: usize, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if n == 0 || x.len() != n || y.len() != n {
            return Err(Error::input(format!("kernel points must both have {n} coordinates")));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::input("non-finite kernel point"));
        }
        Ok(Self { n, k, x, y })
    }
}

/// `Φ_k(x, y)` by per-axis convolution.
pub fn projection_kernel(q: &KernelQuery) -> Result<f64> {
    let q = KernelQuery::new(q.n, q.k, q.x.clone(), q.y.clone())?;
    let tx = PointTable::new(&q.x, q.k);
    let ty = PointTable::new(&q.y, q.k);
    Ok(convolve_axes(q.n, q.k, |axis, j| tx.h(axis, j) * ty.h(axis, j)))
}

/// `Φ_k(x, x)`.
pub fn kernel_diagonal(n: usize, k: usize, x: &[f64]) -> Result<f64> {
    if x.len() != n {
        return Err(Error::input(format!("point must have {n} coordinates")));
    }
    let t = PointTable::new(x, k);
    Ok(convolve_axes(n, k, |axis, j| {
        let v = t.h(axis, j);
        v * v
    }))
}

fn convolve_axes(n: usize, k: usize, c: impl Fn(usize, usize) -> f64) -> f64 {
    let mut acc: Vec<f64> = (0..=k).map(|j| c(0, j)).collect();
    let mut next = vec![0.0; k + 1];
    for axis in 1..n {
        for m in 0..=k {
            next[m] = (0..=m).map(|j| acc[j] * c(axis, m - j)).sum();
        }
        std::mem::swap(&mut acc, &mut next);
    }
    acc[k]
}

/// `Φ_k(x, y)` by the explicit sum over the eigenspace. Used to validate the
/// convolution.
pub fn projection_kernel_brute(q: &KernelQuery) -> Result<f64> {
    let tx = PointTable::new(&q.x, q.k);
    let ty = PointTable::new(&q.y, q.k);
    Ok(enumerate_multiindices(q.n, q.k)?
        .iter()
        .map(|a| tx.phi(a) * ty.phi(a))
        .sum())
}

/// `max_{x ∈ grid} |Φ_k(x, x)| / k^{n/2 − 1}`.
pub fn kernel_diagonal_ratio(n: usize, k: usize, grid: &[Vec<f64>]) -> Result<f64> {
    if k == 0 {
        return Err(Error::input("the diagonal ratio needs k >= 1"));
    }
    let scale = (k as f64).powf(n as f64 / 2.0 - 1.0);
    let mut worst: f64 = 0.0;
    for x in grid {
        worst = worst.max(kernel_diagonal(n, k, x)?.abs());
    }
    Ok(worst / scale)
}

/// Rays from the origin out to `√(2k + n) + 4`, spaced `step` apart, along a
/// fixed set of directions that cover the symmetry-reduced sector.
pub fn kernel_scan_grid(n: usize, k: usize, step: f64) -> Result<Vec<Vec<f64>>> {
    let directions: Vec<Vec<f64>> = match n {
        1 => vec![vec![1.0]],
        2 => (0..=8)
            .map(|j| {
                let a = j as f64 * std::f64::consts::PI / 32.0;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => [
            [1.0, 0.0, 0.0],
            [2.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
            [2.0, 1.0, 1.0],
            [3.0, 2.0, 1.0],
            [1.0, 1.0, 1.0],
            [3.0, 1.0, 0.0],
            [4.0, 2.0, 1.0],
        ]
        .iter()
        .map(|d| {
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            d.iter().map(|v| v / norm).collect()
        })
        .collect(),
        _ => {
            return Err(Error::Capacity {
                what: "kernel scan dimension",
                requested: n,
                limit: 3,
            })
        }
    };
    if !(step > 0.0) {
        return Err(Error::input("grid step must be positive"));
    }
    let radius = ((2 * k + n) as f64).sqrt() + 4.0;
    let steps = (radius / step).ceil() as usize;
    let mut grid = Vec::with_capacity(directions.len() * (steps + 1));
    for d in &directions {
        for i in 0..=steps {
            let r = i as f64 * step;
            grid.push(d.iter().map(|v| v * r).collect());
        }
    }
    Ok(grid)
}
