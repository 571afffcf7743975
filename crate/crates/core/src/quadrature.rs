//! Gauss rules from three-term recurrences, panelized and radial composites,
//! and the singular-weight integrators built on them.
//!
//! Every Gauss rule is produced the same way: Golub–Welsch eigenvalues of the
//! Jacobi matrix as starting points, a few Newton steps on the orthonormal
//! recurrence, and weights from the Christoffel function
//! `w_i = 1 / Σ_j p_j(x_i)²`. The recurrence is carried with an envelope
//! factor `e^{−φ(x)}` (`φ = x²/2` for Hermite, `x/2` for Laguerre) so nothing
//! overflows at the outer nodes, and the same factor yields the scaled weights
//! `w_i e^{2φ(x_i)}` directly.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    GaussHermite,
    GaussLegendrePanels,
    GaussLaguerre,
    GaussJacobi,
    /// Two-sided radial rule on the line for `|x|^{−2δ}` weights.
    RadialLine1d,
    RadialPolar2d,
    RadialSpherical3d,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    RealLine,
    HalfLine,
    Interval {
        lower: f64,
        upper: f64,
        panels: usize,
    },
    /// Whole space in polar form; `radius` is `None` for the exact
    /// Laguerre-based rules.
    Radial {
        radius: Option<f64>,
        panels: usize,
    },
}

/// Nodes and weights, with nodes stored flat (`dim` coordinates each).
///
/// `scaled_weights` equal `weights · e^{2φ(x)}` for the envelope of the rule
/// family: `e^{x²}` for Hermite, `e^{s}` for Laguerre, `1` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub dim: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub scaled_weights: Vec<f64>,
    pub domain: Domain,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    /// `Σ w_i f(x_i)` with compensated summation.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        compensated_sum((0..self.len()).map(|i| self.weights[i] * f(self.node(i))))
    }

    /// `Σ w_i e^{2φ(x_i)} g(x_i)`: integrates `g` itself rather than `g`
    /// divided by the weight function.
    pub fn integrate_scaled(&self, g: impl Fn(&[f64]) -> f64) -> f64 {
        compensated_sum((0..self.len()).map(|i| self.scaled_weights[i] * g(self.node(i))))
    }
}

/// Neumaier's compensated sum. Used for every reduction so that results do
/// not depend on how work was partitioned.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

struct Recurrence<A, B, E> {
    /// Diagonal `a_j`.
    alpha: A,
    /// Squared off-diagonal `b_j` for `j ≥ 1`.
    beta: B,
    /// `∫ weight`.
    mu0: f64,
    /// Envelope exponent `φ(x)`.
    envelope: E,
}

fn gauss_from_recurrence<A, B, E>(m: usize, rec: &Recurrence<A, B, E>) -> (Vec<f64>, Vec<f64>, Vec<f64>)
where
    A: Fn(usize) -> f64,
    B: Fn(usize) -> f64,
    E: Fn(f64) -> f64,
{
    let mut jacobi = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        jacobi[(j, j)] = (rec.alpha)(j);
        if j + 1 < m {
            let off = (rec.beta)(j + 1).sqrt();
            jacobi[(j, j + 1)] = off;
            jacobi[(j + 1, j)] = off;
        }
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.total_cmp(b));

    let sqrt_beta: Vec<f64> = (0..=m)
        .map(|j| if j == 0 { 0.0 } else { (rec.beta)(j).sqrt() })
        .collect();
    let alpha: Vec<f64> = (0..m).map(|j| (rec.alpha)(j)).collect();
    let p0 = 1.0 / rec.mu0.sqrt();

    // Returns (q_m, q_m', Σ_{j<m} q_j²) with q_j = p_j e^{−φ(x)}.
    let evaluate = |x: f64| {
        let scale = p0 * (-(rec.envelope)(x)).exp();
        let (mut prev, mut cur) = (0.0, scale);
        let (mut dprev, mut dcur) = (0.0, 0.0);
        let mut christoffel = 0.0;
        for j in 0..m {
            christoffel += cur * cur;
            let next = ((x - alpha[j]) * cur - sqrt_beta[j] * prev) / sqrt_beta[j + 1];
            let dnext = (cur + (x - alpha[j]) * dcur - sqrt_beta[j] * dprev) / sqrt_beta[j + 1];
            prev = cur;
            cur = next;
            dprev = dcur;
            dcur = dnext;
        }
        (cur, dcur, christoffel)
    };

    let mut weights = Vec::with_capacity(m);
    let mut scaled = Vec::with_capacity(m);
    for x in nodes.iter_mut() {
        for _ in 0..10 {
            let (q, dq, _) = evaluate(*x);
            if dq == 0.0 || !dq.is_finite() {
                break;
            }
            let step = q / dq;
            *x -= step;
            if step.abs() <= 1e-15 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, _, christoffel) = evaluate(*x);
        scaled.push(1.0 / christoffel);
        weights.push((-2.0 * (rec.envelope)(*x)).exp() / christoffel);
    }
    (nodes, weights, scaled)
}

/// Forces exact mirror symmetry on a rule for an even weight.
fn symmetrize(nodes: &mut [f64], weights: &mut [f64], scaled: &mut [f64]) {
    let m = nodes.len();
    for i in 0..m / 2 {
        let j = m - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
        for w in [&mut *weights, &mut *scaled] {
            let avg = 0.5 * (w[i] + w[j]);
            w[i] = avg;
            w[j] = avg;
        }
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
}

fn require_nodes(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::input("a Gauss rule needs at least one node"));
    }
    Ok(())
}

/// Gauss–Legendre on `[−1, 1]`.
pub fn gauss_legendre(m: usize) -> Result<QuadratureRule> {
    gauss_legendre_panels(-1.0, 1.0, 1, m)
}

/// Composite Gauss–Legendre with `panels` equal panels on `[lower, upper]`.
pub fn gauss_legendre_panels(lower: f64, upper: f64, panels: usize, m: usize) -> Result<QuadratureRule> {
    require_nodes(m)?;
    if panels == 0 || !(upper > lower) || !lower.is_finite() || !upper.is_finite() {
        return Err(Error::input(format!(
            "invalid panel layout [{lower}, {upper}] with {panels} panels"
        )));
    }
    let (ref_nodes, ref_weights) = legendre_reference(m);
    let width = (upper - lower) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * m);
    let mut weights = Vec::with_capacity(panels * m);
    for p in 0..panels {
        let a = lower + width * p as f64;
        for (x, w) in ref_nodes.iter().zip(&ref_weights) {
            nodes.push(a + 0.5 * width * (x + 1.0));
            weights.push(0.5 * width * w);
        }
    }
    Ok(QuadratureRule {
        kind: RuleKind::GaussLegendrePanels,
        dim: 1,
        scaled_weights: weights.clone(),
        nodes,
        weights,
        domain: Domain::Interval { lower, upper, panels },
    })
}

/// Reference Legendre nodes and weights on `[−1, 1]`.
pub(crate) fn legendre_reference(m: usize) -> (Vec<f64>, Vec<f64>) {
    let rec = Recurrence {
        alpha: |_| 0.0,
        beta: |j: usize| {
            let j = j as f64;
            j * j / (4.0 * j * j - 1.0)
        },
        mu0: 2.0,
        envelope: |_| 0.0,
    };
    let (mut nodes, mut weights, mut scaled) = gauss_from_recurrence(m, &rec);
    symmetrize(&mut nodes, &mut weights, &mut scaled);
    (nodes, weights)
}

/// Gauss–Hermite for the weight `e^{−x²}` on the real line.
pub fn gauss_hermite(m: usize) -> Result<QuadratureRule> {
    require_nodes(m)?;
    let rec = Recurrence {
        alpha: |_| 0.0,
        beta: |j: usize| 0.5 * j as f64,
        mu0: PI.sqrt(),
        envelope: |x: f64| 0.5 * x * x,
    };
    let (mut nodes, mut weights, mut scaled) = gauss_from_recurrence(m, &rec);
    symmetrize(&mut nodes, &mut weights, &mut scaled);
    Ok(QuadratureRule {
        kind: RuleKind::GaussHermite,
        dim: 1,
        nodes,
        weights,
        scaled_weights: scaled,
        domain: Domain::RealLine,
    })
}

/// Generalized Gauss–Laguerre for `s^a e^{−s}` on `[0, ∞)`, `a > −1`.
pub fn gauss_laguerre(m: usize, a: f64) -> Result<QuadratureRule> {
    require_nodes(m)?;
    if !(a > -1.0) || !a.is_finite() {
        return Err(Error::input(format!("Laguerre exponent must exceed -1, got {a}")));
    }
    let rec = Recurrence {
        alpha: |j: usize| 2.0 * j as f64 + a + 1.0,
        beta: |j: usize| j as f64 * (j as f64 + a),
        mu0: ln_gamma(a + 1.0).exp(),
        envelope: |s: f64| 0.5 * s,
    };
    let (nodes, weights, scaled) = gauss_from_recurrence(m, &rec);
    Ok(QuadratureRule {
        kind: RuleKind::GaussLaguerre,
        dim: 1,
        nodes,
        weights,
        scaled_weights: scaled,
        domain: Domain::HalfLine,
    })
}

/// Gauss–Jacobi for `(1−x)^a (1+x)^b` on `[−1, 1]`, `a, b > −1`.
pub fn gauss_jacobi(m: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    require_nodes(m)?;
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::input(format!("Jacobi exponents must exceed -1, got ({a}, {b})")));
    }
    let ab = a + b;
    let rec = Recurrence {
        alpha: |j: usize| {
            if j == 0 {
                (b - a) / (ab + 2.0)
            } else {
                let s = 2.0 * j as f64 + ab;
                (b * b - a * a) / (s * (s + 2.0))
            }
        },
        beta: |j: usize| {
            let jf = j as f64;
            if j == 1 {
                // The general formula is 0/0 when a + b = −1.
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let s = 2.0 * jf + ab;
                4.0 * jf * (jf + a) * (jf + b) * (jf + ab) / (s * s * (s + 1.0) * (s - 1.0))
            }
        },
        mu0: ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(ab + 2.0)).exp(),
        envelope: |_| 0.0,
    };
    let (nodes, weights, scaled) = gauss_from_recurrence(m, &rec);
    Ok(QuadratureRule {
        kind: RuleKind::GaussJacobi,
        dim: 1,
        nodes,
        weights,
        scaled_weights: scaled,
        domain: Domain::Interval {
            lower: -1.0,
            upper: 1.0,
            panels: 1,
        },
    })
}

/// Node counts for the composite radial/angular rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSizes {
    pub radial_panels: usize,
    pub radial_nodes: usize,
    /// Geometric halvings of the innermost panel.
    pub radial_layers: usize,
    /// Gauss–Legendre nodes in `cos θ`.
    pub polar_nodes: usize,
    /// Trapezoid nodes in `φ`.
    pub azimuth_nodes: usize,
}

impl Default for RuleSizes {
    fn default() -> Self {
        Self {
            radial_panels: 400,
            radial_nodes: 16,
            radial_layers: 8,
            polar_nodes: 64,
            azimuth_nodes: 64,
        }
    }
}

impl RuleSizes {
    /// Multiplies every count except the per-panel order by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = |n: usize| ((n as f64 * factor).round() as usize).max(1);
        Self {
            radial_panels: s(self.radial_panels),
            radial_nodes: self.radial_nodes,
            radial_layers: s(self.radial_layers),
            polar_nodes: s(self.polar_nodes),
            azimuth_nodes: s(self.azimuth_nodes),
        }
    }

    pub fn doubled(&self) -> Self {
        self.scaled(2.0)
    }
}

/// One-dimensional rule for `∫_0^R r^γ g(r) dr`.
///
/// `[0, R]` is split into equal panels; the first panel is further split
/// geometrically toward the origin, and the innermost piece is handled by
/// Gauss–Jacobi with the `r^γ` factor built in. Weights include `r^γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Radius of the innermost disk, or `None` if it is covered.
    pub excluded_radius: Option<f64>,
}

impl RadialRule {
    pub fn new(radius: f64, gamma: f64, sizes: &RuleSizes) -> Result<Self> {
        if !(gamma > -1.0) {
            return Err(Error::input(format!("r^{gamma} is not integrable at the origin")));
        }
        Self::build(radius, gamma, sizes, true)
    }

    /// Like [`RadialRule::new`] but leaves out the innermost disk. Used to
    /// watch a non-integrable weight diverge as the rule is refined.
    pub fn truncated(radius: f64, gamma: f64, sizes: &RuleSizes) -> Result<Self> {
        Self::build(radius, gamma, sizes, false)
    }

    fn build(radius: f64, gamma: f64, sizes: &RuleSizes, with_core: bool) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::input(format!("radius must be positive, got {radius}")));
        }
        if sizes.radial_panels == 0 || sizes.radial_nodes == 0 {
            return Err(Error::input("radial rule needs panels and nodes"));
        }
        let (ref_x, ref_w) = legendre_reference(sizes.radial_nodes);
        let width = radius / sizes.radial_panels as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let push_panel = |a: f64, b: f64, nodes: &mut Vec<f64>, weights: &mut Vec<f64>| {
            let half = 0.5 * (b - a);
            for (x, w) in ref_x.iter().zip(&ref_w) {
                let r = a + half * (x + 1.0);
                nodes.push(r);
                weights.push(half * w * r.powf(gamma));
            }
        };

        let core = width * 0.5f64.powi(sizes.radial_layers as i32);
        if with_core {
            let jacobi = gauss_jacobi(sizes.radial_nodes, 0.0, gamma)?;
            let half = 0.5 * core;
            let factor = half.powf(gamma + 1.0);
            for (x, w) in jacobi.nodes.iter().zip(&jacobi.weights) {
                nodes.push(half * (x + 1.0));
                weights.push(factor * w);
            }
        }
        let mut lo = core;
        for _ in 0..sizes.radial_layers {
            push_panel(lo, 2.0 * lo, &mut nodes, &mut weights);
            lo *= 2.0;
        }
        for p in 1..sizes.radial_panels {
            push_panel(width * p as f64, width * (p + 1) as f64, &mut nodes, &mut weights);
        }
        Ok(Self {
            nodes,
            weights,
            excluded_radius: (!with_core).then_some(core),
        })
    }
}

fn check_delta(delta: f64, upper_inclusive: bool) -> Result<()> {
    let ok = delta >= 0.0 && if upper_inclusive { delta <= 1.0 } else { delta < 1.0 };
    if !ok {
        let range = if upper_inclusive { "[0, 1]" } else { "[0, 1)" };
        return Err(Error::input(format!("delta must lie in {range}, got {delta}")));
    }
    Ok(())
}

fn azimuth_nodes(n: usize) -> Vec<f64> {
    let step = 2.0 * PI / n as f64;
    (0..n).map(|j| (j as f64 + 0.5) * step).collect()
}

/// Sums `weight_i · inner(node_i)` over radial nodes in parallel, reducing
/// in node order.
fn radial_reduce(rule: &RadialRule, inner: impl Fn(f64) -> f64 + Sync) -> f64 {
    let parts: Vec<f64> = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(&r, &w)| w * inner(r))
        .collect();
    compensated_sum(parts)
}

/// `∫_{|x|<R} F(x) / |x|^{2δ} dx` in three dimensions, with `F` given as a
/// function of `(r, cos θ, φ)`. The Jacobian `r^{2−2δ}` is absorbed into the
/// radial rule; the angles use Gauss–Legendre in `cos θ` and the trapezoid
/// rule in `φ`.
pub fn integrate_radial_3d<F>(f: F, delta: f64, radius: f64, sizes: &RuleSizes) -> Result<f64>
where
    F: Fn(f64, f64, f64) -> f64 + Sync,
{
    check_delta(delta, true)?;
    let rule = RadialRule::new(radius, 2.0 - 2.0 * delta, sizes)?;
    Ok(integrate_spherical_with(&rule, f, sizes))
}

fn integrate_spherical_with<F>(rule: &RadialRule, f: F, sizes: &RuleSizes) -> f64
where
    F: Fn(f64, f64, f64) -> f64 + Sync,
{
    let (cos_nodes, cos_weights) = legendre_reference(sizes.polar_nodes.max(1));
    let phis = azimuth_nodes(sizes.azimuth_nodes.max(1));
    let phi_weight = 2.0 * PI / phis.len() as f64;
    radial_reduce(rule, |r| {
        compensated_sum(cos_nodes.iter().zip(&cos_weights).flat_map(|(&c, &wc)| {
            let f = &f;
            phis.iter().map(move |&phi| wc * phi_weight * f(r, c, phi))
        }))
    })
}

/// `∫_{|x|<R} F(x) / |x|^{2δ} dx` in two dimensions, `F` given as a function
/// of `(r, φ)`. Only `δ < 1` is integrable.
pub fn integrate_cyl_2d<F>(f: F, delta: f64, radius: f64, sizes: &RuleSizes) -> Result<f64>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    check_delta(delta, false)?;
    let rule = RadialRule::new(radius, 1.0 - 2.0 * delta, sizes)?;
    Ok(integrate_polar_with(&rule, f, sizes))
}

/// The two-dimensional integral with the innermost disk of radius
/// `R/P · 2^{−L}` removed, for any `δ ≥ 0`. For `δ ≥ 1` its value grows
/// without bound as the layer count increases.
pub fn integrate_cyl_2d_truncated<F>(f: F, delta: f64, radius: f64, sizes: &RuleSizes) -> Result<f64>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::input(format!("delta must be nonnegative, got {delta}")));
    }
    let rule = RadialRule::truncated(radius, 1.0 - 2.0 * delta, sizes)?;
    Ok(integrate_polar_with(&rule, f, sizes))
}

fn integrate_polar_with<F>(rule: &RadialRule, f: F, sizes: &RuleSizes) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let phis = azimuth_nodes(sizes.azimuth_nodes.max(1));
    let phi_weight = 2.0 * PI / phis.len() as f64;
    radial_reduce(rule, |r| {
        compensated_sum(phis.iter().map(|&phi| phi_weight * f(r, phi)))
    })
}

/// Exact rule for `∫_{ℝ^d} G(x) |x|^{−2δ} dx` when `G = e^{−|x|²} · p(x)` with
/// `p` a polynomial of degree at most `2·degree`, `d ∈ {1, 2, 3}`.
///
/// In `s = |x|²` the radial part is `½ ∫ s^{(d−2)/2−δ} e^{−s} Q(s) ds` with `Q`
/// the spherical average of `p`, which generalized Gauss–Laguerre integrates
/// exactly. `shift = 1` declares that `Q(s)` vanishes at `s = 0` (for
/// example `p` odd in the single weighted coordinate), which lets
/// `s^{−½−δ}` be handled for `δ ≤ 1` in one dimension. Weights apply to `G`
/// itself.
pub fn singular_ball_rule(d: usize, delta: f64, degree: usize, shift: usize, refine: usize) -> Result<QuadratureRule> {
    if !(1..=3).contains(&d) {
        return Err(Error::Capacity {
            what: "weighted axes in the singular rule",
            requested: d,
            limit: 3,
        });
    }
    let a = (d as f64 - 2.0) / 2.0 - delta + shift as f64;
    if !(a > -1.0) || !delta.is_finite() {
        return Err(Error::Inadmissible { dims: d, delta });
    }
    let refine = refine.max(1);
    let n_r = (degree / 2 + 2) * refine;
    let radial = gauss_laguerre(n_r, a)?;
    let radial_weights: Vec<f64> = radial
        .nodes
        .iter()
        .zip(&radial.scaled_weights)
        .map(|(&s, &w)| 0.5 * w * s.powi(-(shift as i32)))
        .collect();

    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let kind = match d {
        1 => {
            for (&s, &w) in radial.nodes.iter().zip(&radial_weights) {
                let r = s.sqrt();
                nodes.extend([r, -r]);
                weights.extend([w, w]);
            }
            RuleKind::RadialLine1d
        }
        2 => {
            let phis = azimuth_nodes(2 * (degree + 1) * refine);
            let wphi = 2.0 * PI / phis.len() as f64;
            for (&s, &w) in radial.nodes.iter().zip(&radial_weights) {
                let r = s.sqrt();
                for &phi in &phis {
                    nodes.extend([r * phi.cos(), r * phi.sin()]);
                    weights.push(w * wphi);
                }
            }
            RuleKind::RadialPolar2d
        }
        _ => {
            let (cos_nodes, cos_weights) = legendre_reference((degree + 1) * refine);
            let phis = azimuth_nodes(2 * (degree + 1) * refine);
            let wphi = 2.0 * PI / phis.len() as f64;
            for (&s, &w) in radial.nodes.iter().zip(&radial_weights) {
                let r = s.sqrt();
                for (&c, &wc) in cos_nodes.iter().zip(&cos_weights) {
                    let sin = (1.0 - c * c).max(0.0).sqrt();
                    for &phi in &phis {
                        nodes.extend([r * sin * phi.cos(), r * sin * phi.sin(), r * c]);
                        weights.push(w * wc * wphi);
                    }
                }
            }
            RuleKind::RadialSpherical3d
        }
    };
    Ok(QuadratureRule {
        kind,
        dim: d,
        scaled_weights: weights.clone(),
        nodes,
        weights,
        domain: Domain::Radial {
            radius: None,
            panels: 1,
        },
    })
}

/// Runs `compute` at `scale` and `2·scale`; returns the finer value, or a
/// tolerance error if the two differ by more than `tolerance` relative to
/// `max(1, |fine|)`.
pub fn doubling_gate(what: &str, tolerance: f64, scale: f64, compute: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let coarse = compute(scale)?;
    let fine = compute(2.0 * scale)?;
    if !((coarse - fine).abs() <= tolerance * fine.abs().max(1.0)) {
        return Err(Error::Tolerance {
            what: what.to_string(),
            coarse,
            fine,
            tolerance,
        });
    }
    Ok(fine)
}
