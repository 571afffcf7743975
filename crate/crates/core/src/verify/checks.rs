use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EstimateId, EstimateReport, ReportBuilder, ScanConfig};
use crate::antideriv::{
    junk_orthogonality, merge_identity_exact, norm_sq_even_closed, norm_sq_even_quadrature, norm_sq_even_recursive,
    norm_sq_odd_closed, norm_sq_odd_quadrature, norm_sq_odd_recursive,
};
use crate::error::{Error, Result};
use crate::hermite::{
    fill_hermite_functions, laguerre_exp_integral, laguerre_hermite_residual, verify_laguerre_hermite_relation,
    LaguerreHermiteForm, LaguerreParams,
};
use crate::quadrature::{compensated_sum, doubling_gate, gauss_legendre_panels, integrate_radial_3d, RuleSizes};
use crate::special::{binomial_reflection_exact, gamma_duplication_residual, rational};
use crate::spectral::{
    bessel_sobolev_norm, check_admissible, collapse_trace_norm, enumerate_multiindices, enumerate_up_to,
    hermite_sobolev_norm, kernel_diagonal, kernel_diagonal_ratio, kernel_scan_grid, level_gram,
    level_weighted_integral, oscillator_norm_sq, time_avg_weighted, truncated_level_integral_2d, MultiIndex,
    SpectralState, COLLAPSE_MAX_LEVEL,
};

/// Relative tolerance for refine-versus-double comparisons of exact rules.
const EXACT_GATE: f64 = 1e-9;

fn exact_gated(what: &str, refine: usize, compute: impl Fn(usize) -> Result<f64>) -> Result<f64> {
    doubling_gate(what, EXACT_GATE, refine as f64, |r| compute(r as usize))
}

/// One named check with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum CheckSpec {
    AntiderivNorms,
    AppendixIdentities,
    OddIdentity,
    Radial3dIdentity,
    Kato { n: usize, delta: f64, axes: Vec<usize> },
    KatoNegativeControl,
    OperatorNorm { n: usize, delta: f64 },
    KernelBound { n: usize },
    Morawetz2d,
    Even3d,
    HermiteSobolev { n: usize, s: f64 },
    Collapse9d,
}

impl CheckSpec {
    pub fn run(&self, cfg: &ScanConfig) -> Result<EstimateReport> {
        cfg.validate()?;
        match self {
            CheckSpec::AntiderivNorms => check_antideriv_norms(cfg),
            CheckSpec::AppendixIdentities => check_appendix_identities(cfg),
            CheckSpec::OddIdentity => check_odd_identity(cfg),
            CheckSpec::Radial3dIdentity => check_radial_3d_identity(cfg),
            CheckSpec::Kato { n, delta, axes } => check_kato(cfg, *n, *delta, axes),
            CheckSpec::KatoNegativeControl => check_kato_negative_control(cfg),
            CheckSpec::OperatorNorm { n, delta } => check_operator_norm(cfg, *n, *delta),
            CheckSpec::KernelBound { n } => check_kernel_bound(cfg, *n),
            CheckSpec::Morawetz2d => check_morawetz_2d(cfg),
            CheckSpec::Even3d => check_even_3d(cfg),
            CheckSpec::HermiteSobolev { n, s } => check_hermite_sobolev(cfg, *n, *s),
            CheckSpec::Collapse9d => check_collapse_9d(cfg),
        }
    }

    /// Level cut-off used when the configuration leaves it open.
    pub fn default_k_max(&self) -> usize {
        match self {
            CheckSpec::AntiderivNorms => 40,
            CheckSpec::AppendixIdentities => 20,
            CheckSpec::OddIdentity | CheckSpec::Radial3dIdentity => 20,
            CheckSpec::Kato { .. } | CheckSpec::OperatorNorm { .. } => 20,
            CheckSpec::KatoNegativeControl => 0,
            CheckSpec::KernelBound { n } => {
                if *n == 2 {
                    40
                } else {
                    30
                }
            }
            CheckSpec::Morawetz2d | CheckSpec::Even3d => 20,
            CheckSpec::HermiteSobolev { .. } => 30,
            CheckSpec::Collapse9d => 3,
        }
    }
}

fn all_axes(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Closed form, recursion and quadrature of the antiderivative norms.
pub fn check_antideriv_norms(cfg: &ScanConfig) -> Result<EstimateReport> {
    let k_max = cfg.k_max_or(40);
    let tol = cfg.tol_or(1e-8);
    let mut b = ReportBuilder::new("antiderivative norms", EstimateId::AntiderivNorms, cfg, tol);
    b.param("k_max", k_max);

    let rows: Vec<(f64, f64, f64, f64, f64, f64)> = (0..=k_max)
        .into_par_iter()
        .map(|k| {
            Ok((
                norm_sq_odd_closed(k),
                norm_sq_odd_recursive(k),
                norm_sq_odd_quadrature(k)?,
                norm_sq_even_closed(k),
                norm_sq_even_recursive(k)?,
                norm_sq_even_quadrature(k)?,
            ))
        })
        .collect::<Result<_>>()?;

    let spread = |a: f64, b: f64, c: f64| (a - b).abs().max((a - c).abs()).max((b - c).abs());
    let mut even_max: f64 = 0.0;
    for (k, &(oc, or, oq, ec, er, eq)) in rows.iter().enumerate() {
        b.sample(
            format!("odd k={k}"),
            oq,
            tol,
            spread(oc, or, oq) <= tol && (oq - 2.0).abs() <= tol,
        );
        b.sample(format!("even k={k}"), eq, tol, spread(ec, er, eq) <= tol && eq <= 3.0);
        even_max = even_max.max(ec).max(er).max(eq);
    }
    b.condition("even norms at most 3", even_max, 3.0, even_max <= 3.0);
    if k_max >= 40 {
        let gap = (rows[40].5 - 2.0).abs();
        b.condition("even norm at k=40 within 0.05 of 2", gap, 0.05, gap <= 0.05);
    }
    let merge_failures = (0..=k_max.min(20)).filter(|&k| !merge_identity_exact(k)).count();
    b.condition(
        "merge identity failures (exact)",
        merge_failures as f64,
        0.0,
        merge_failures == 0,
    );
    Ok(b.finish())
}

/// Laguerre–Hermite relation (and its halved control), the Laguerre exponential
/// integral, gamma duplication, binomial reflection and junk orthogonality.
pub fn check_appendix_identities(cfg: &ScanConfig) -> Result<EstimateReport> {
    let k_max = cfg.k_max_or(20);
    let mut b = ReportBuilder::new(
        "special-function identities",
        EstimateId::AppendixIdentities,
        cfg,
        1e-10,
    );
    b.param("k_max", k_max);

    let ts: Vec<f64> = (0..=24).map(|i| -3.0 + 0.25 * i as f64).collect();
    for k in 0..=10 {
        let r = verify_laguerre_hermite_relation(k, &ts)?;
        b.at_most(format!("laguerre-hermite k={k}"), r, 1e-10);
    }
    let control = laguerre_hermite_residual(1, &[1.0], LaguerreHermiteForm::Halved)?;
    b.sample("laguerre-hermite halved control k=1", control, 0.3, control >= 0.3);

    for &(k, alpha, beta) in &[
        (1usize, 0.5, 1.0),
        (3, 0.5, 2.0),
        (5, 1.5, 0.7),
        (8, 0.5, 3.0),
        (10, 2.0, 1.5),
    ] {
        let p = LaguerreParams::new(k, alpha, beta)?;
        let exact = laguerre_exp_integral(&p);
        let upper = 60.0 / beta + 4.0 * k as f64;
        let rule = gauss_legendre_panels(0.0, upper, (4.0 * upper).ceil() as usize, 20)?;
        let quad = compensated_sum(
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&u, &w)| w * crate::hermite::eval_laguerre(&p, u).unwrap_or(f64::NAN) * (-beta * u).exp()),
        );
        let rel = (quad - exact).abs() / exact.abs();
        b.at_most(format!("laguerre integral k={k} alpha={alpha} beta={beta}"), rel, 1e-9);
    }

    for &z in &[0.5, 1.0, 1.5, 2.25, 7.3, 20.0, 55.5] {
        b.at_most(format!("gamma duplication z={z}"), gamma_duplication_residual(z), 1e-12);
    }

    let tops = [rational(1, 2), rational(-1, 2), rational(1, 3), rational(5, 2)];
    let reflection_failures = (0..=k_max)
        .flat_map(|k| tops.iter().map(move |a| (k, a)))
        .filter(|(k, a)| !binomial_reflection_exact(a, *k))
        .count();
    b.sample(
        "binomial reflection failures (exact)",
        reflection_failures as f64,
        0.0,
        reflection_failures == 0,
    );
    let merge_failures = (0..=k_max).filter(|&k| !merge_identity_exact(k)).count();
    b.sample(
        "merge identity failures (exact)",
        merge_failures as f64,
        0.0,
        merge_failures == 0,
    );

    for k in 1..=10 {
        b.at_most(format!("junk orthogonality k={k}"), junk_orthogonality(k)?.abs(), 1e-10);
    }
    Ok(b.finish())
}

fn odd_indices(k_max: usize) -> Vec<MultiIndex> {
    (0..=k_max).map(|j| MultiIndex::new([2 * j + 1])).collect()
}

/// `∫∫ |u|²/x² = 4π‖g‖²` for odd `g` on the line, and `∫|P g|²/x² = 2|a|²` per level.
pub fn check_odd_identity(cfg: &ScanConfig) -> Result<EstimateReport> {
    let k_max = cfg.k_max_or(20);
    let tol = cfg.tol_or(1e-7);
    let level_tol = 1e-9;
    let refine = cfg.refine();
    let mut b = ReportBuilder::new("odd 1d identity", EstimateId::OddIdentity, cfg, tol);
    b.param("n", 1)
        .param("delta", 1.0)
        .param("k_max", k_max)
        .param("max_mode", 2 * k_max + 1);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut states = vec![("g=h_1".to_string(), SpectralState::mode(MultiIndex::new([1])))];
    for t in 0..cfg.trials {
        states.push((
            format!("trial {t}"),
            SpectralState::random(1, &odd_indices(k_max), &mut rng)?,
        ));
    }

    let mut worst_level: f64 = 0.0;
    for (label, state) in &states {
        let value = exact_gated("odd functional", refine, |r| time_avg_weighted(state, 1.0, &[0], r));
        if let Some(v) = b.gate(value)? {
            b.equal(label.clone(), v / state.norm_sq(), 4.0 * PI, tol, 4.0 * PI);
        }
        for k in state.levels() {
            let level = state.project(k);
            let a2 = level.norm_sq();
            let value = level_weighted_integral(&level, 1.0, &[0], refine)?;
            worst_level = worst_level.max((value - 2.0 * a2).abs());
        }
    }
    b.condition(
        "per-level |value - 2|a|^2|",
        worst_level,
        level_tol,
        worst_level <= level_tol,
    );
    Ok(b.finish())
}

/// `ψ(x) = g(|x|)/(c|x|)` has `‖ψ‖_{L²(ℝ³)} = ‖g‖_{L²(ℝ)}` when `c = √(2π)`
/// and `g` is odd.
pub fn radial_correspondence_constant() -> f64 {
    (2.0 * PI).sqrt()
}

/// `∫_{ℝ³} F_g(|x|) |x|^{−2δ} dx` with `F_g(r) = Σ_j |a_j|² h_{2j+1}(r)² / (c² r²)`,
/// the level-diagonal density of the 3D state built from `g`.
fn radial_functional(state: &SpectralState, delta: f64, sizes: &RuleSizes) -> Result<f64> {
    let degree = 2 * state.k_max() + 1;
    let radius = ((2 * degree + 1) as f64).sqrt() + 10.0;
    let weights: Vec<(usize, f64)> = state.iter().map(|(a, c)| (a.0[0], c.norm_sqr())).collect();
    let c2 = radial_correspondence_constant().powi(2);
    let sizes = RuleSizes {
        polar_nodes: 1,
        azimuth_nodes: 1,
        ..*sizes
    };
    integrate_radial_3d(
        |r, _, _| {
            let mut h = vec![0.0; degree + 1];
            fill_hermite_functions(r, &mut h);
            weights.iter().map(|&(j, w)| w * h[j] * h[j]).sum::<f64>() / (c2 * r * r)
        },
        delta,
        radius,
        &sizes,
    )
}

/// The odd identity again, computed in three dimensions through the radial
/// correspondence.
pub fn check_radial_3d_identity(cfg: &ScanConfig) -> Result<EstimateReport> {
    let k_max = cfg.k_max_or(20);
    let tol = cfg.tol_or(1e-6);
    let mut b = ReportBuilder::new("3d radial identity", EstimateId::Radial3dIdentity, cfg, tol);
    b.param("n", 3).param("delta", 1.0).param("k_max", k_max);
    b.param("correspondence_constant", radial_correspondence_constant());
    let sizes = cfg.sizes();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut states = vec![("g=h_1".to_string(), SpectralState::mode(MultiIndex::new([1])))];
    for t in 0..cfg.trials {
        states.push((
            format!("trial {t}"),
            SpectralState::random(1, &odd_indices(k_max), &mut rng)?,
        ));
    }

    let mut worst_norm: f64 = 0.0;
    for (label, state) in &states {
        // The correspondence must preserve norms before the identity means anything.
        let psi_sq = radial_functional(state, 0.0, &sizes)?;
        let mismatch = (psi_sq - state.norm_sq()).abs() / state.norm_sq();
        if mismatch > 1e-10 {
            return Err(Error::Validation(format!(
                "radial correspondence: ‖ψ‖² = {psi_sq} but ‖g‖² = {} ({label})",
                state.norm_sq()
            )));
        }
        worst_norm = worst_norm.max(mismatch);
        let value = doubling_gate("3d radial functional", 1e-9, 1.0, |s| {
            Ok(2.0 * PI * radial_functional(state, 1.0, &sizes.scaled(s))?)
        });
        if let Some(v) = b.gate(value)? {
            b.equal(label.clone(), v / psi_sq, 4.0 * PI, tol, 4.0 * PI);
        }
    }
    b.condition("correspondence |‖ψ‖²/‖g‖² - 1|", worst_norm, 1e-10, worst_norm <= 1e-10);
    Ok(b.finish())
}

/// Per-level Kato constants `2π λ_max(G_k)`, where `G_k` is the weighted Gram
/// matrix of level `k`; `λ_max` is the supremum over unit states on the level.
pub fn check_kato(cfg: &ScanConfig, n: usize, delta: f64, axes: &[usize]) -> Result<EstimateReport> {
    if n == 0 || axes.is_empty() || axes.iter().any(|&a| a >= n) {
        return Err(Error::input(format!("invalid axes {axes:?} for dimension {n}")));
    }
    check_admissible(axes.len(), delta, false)?;
    let k_max = cfg.k_max_or(20);
    let bound = cfg.bound();
    let refine = cfg.refine();
    let mut b = ReportBuilder::new(format!("kato n={n} delta={delta}"), EstimateId::KatoNd, cfg, bound);
    b.param("n", n)
        .param("delta", delta)
        .param("axes", axes.to_vec())
        .param("k_max", k_max);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ks = Vec::new();
    let mut ratios = Vec::new();
    let mut worst_random: f64 = 0.0;
    let mut worst_dense: f64 = 0.0;
    for k in 0..=k_max {
        let gram = level_gram(n, k, delta, axes, refine)?;
        let value = exact_gated("level Gram maximum", refine, |r| {
            let g = if r == refine {
                gram.clone()
            } else {
                level_gram(n, k, delta, axes, r)?
            };
            g.largest_singular_value(cfg.seed)
        });
        let Some(s_k) = b.gate(value)? else { continue };
        worst_dense = worst_dense.max((s_k - gram.largest_eigenvalue_dense()).abs() / s_k.max(1e-300));
        let indices = enumerate_multiindices(n, k)?;
        for _ in 0..cfg.trials {
            let f = SpectralState::random(n, &indices, &mut rng)?;
            worst_random = worst_random.max(gram.quadratic_form(&f) / s_k);
        }
        b.at_most(format!("k={k}"), 2.0 * PI * s_k, bound);
        ks.push(k);
        ratios.push(2.0 * PI * s_k);
    }
    b.trend("kato ratio", &ks, &ratios);
    b.condition(
        "random states over level maximum",
        worst_random,
        1.0 + 1e-9,
        worst_random <= 1.0 + 1e-9,
    );
    b.condition(
        "power iteration vs dense eigensolver",
        worst_dense,
        1e-8,
        worst_dense <= 1e-8,
    );
    Ok(b.finish())
}

/// The `n = 2`, `δ = 1` functional with the innermost disk removed, under two
/// successive doublings of the rule. Passing means the value at least
/// doubled, i.e. the divergence was observed.
pub fn check_kato_negative_control(cfg: &ScanConfig) -> Result<EstimateReport> {
    let mut b = ReportBuilder::new("kato negative control n=2 delta=1", EstimateId::KatoNd, cfg, 2.0);
    b.param("n", 2).param("delta", 1.0).param("negative_control", true);
    let state = SpectralState::mode(MultiIndex::new([0, 0]));
    b.param("state", "Phi_(0,0)");
    let base = RuleSizes {
        radial_panels: ((100.0 * cfg.rule_scale).round() as usize).max(1),
        radial_nodes: 16,
        radial_layers: 8,
        polar_nodes: 1,
        azimuth_nodes: 8,
    };
    let v0 = truncated_level_integral_2d(&state, 1.0, &base)?;
    let v1 = truncated_level_integral_2d(&state, 1.0, &base.doubled())?;
    let v2 = truncated_level_integral_2d(&state, 1.0, &base.doubled().doubled())?;
    b.sample("growth after 0 doublings", 1.0, 2.0, true);
    b.sample("growth after 1 doubling", v1 / v0, 2.0, v1 > v0);
    b.sample("growth after 2 doublings", v2 / v0, 2.0, v2 >= 2.0 * v0);
    b.param("values", vec![v0, v1, v2]);
    Ok(b.finish())
}

/// Norms of the singularized projection on level `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorNorms {
    /// `σ_max` of `M_{αβ} = ∫ Φ_α Φ_β |x|^{−δ}`.
    pub compressed: f64,
    /// `‖ |x|^{−δ} P_k ‖ = √λ_max(∫ Φ_α Φ_β |x|^{−2δ})`.
    pub one_sided: f64,
    /// `‖ |x|^{−δ} P_k |y|^{−δ} ‖ = λ_max(∫ Φ_α Φ_β |x|^{−2δ})`.
    pub two_sided: f64,
}

pub fn operator_norm_singular_kernel(
    n: usize,
    delta: f64,
    k: usize,
    refine: usize,
    seed: u64,
) -> Result<OperatorNorms> {
    let axes = all_axes(n);
    let compressed = level_gram(n, k, delta / 2.0, &axes, refine)?.largest_singular_value(seed)?;
    let two_sided = level_gram(n, k, delta, &axes, refine)?.largest_singular_value(seed)?;
    Ok(OperatorNorms {
        compressed,
        one_sided: two_sided.sqrt(),
        two_sided,
    })
}

pub fn check_operator_norm(cfg: &ScanConfig, n: usize, delta: f64) -> Result<EstimateReport> {
    check_admissible(n, delta, false)?;
    let k_max = cfg.k_max_or(20);
    let bound = cfg.bound();
    let refine = cfg.refine();
    let mut b = ReportBuilder::new(
        format!("singular kernel norms n={n} delta={delta}"),
        EstimateId::OperatorNorm,
        cfg,
        bound,
    );
    b.param("n", n).param("delta", delta).param("k_max", k_max);

    let mut ks = Vec::new();
    let (mut compressed, mut two_sided) = (Vec::new(), Vec::new());
    for k in 0..=k_max {
        let value = doubling_gate("singular kernel norm", EXACT_GATE, refine as f64, |r| {
            Ok(operator_norm_singular_kernel(n, delta, k, r as usize, cfg.seed)?.compressed)
        });
        let Some(c) = b.gate(value)? else { continue };
        let norms = operator_norm_singular_kernel(n, delta, k, refine, cfg.seed)?;
        b.at_most(format!("k={k} compressed"), c, bound);
        b.at_most(format!("k={k} two-sided"), norms.two_sided, bound);
        ks.push(k);
        compressed.push(c);
        two_sided.push(norms.two_sided);
        if k == 0 && n == 3 && delta == 1.0 {
            let gap = (c - 2.0 / PI.sqrt()).abs();
            b.condition("k=0 compressed norm vs 2/sqrt(pi)", gap, 1e-8, gap <= 1e-8);
        }
    }
    b.trend("compressed norm", &ks, &compressed);
    b.trend("two-sided norm", &ks, &two_sided);
    Ok(b.finish())
}

/// `max_x |Φ_k(x,x)| / k^{n/2−1}` along rays through and past the turning point.
pub fn check_kernel_bound(cfg: &ScanConfig, n: usize) -> Result<EstimateReport> {
    if !(2..=3).contains(&n) {
        return Err(Error::input(format!(
            "the diagonal bound is scanned for n = 2 or 3, got {n}"
        )));
    }
    let k_max = cfg.k_max_or(if n == 2 { 40 } else { 30 });
    let bound = cfg.bound();
    let step = 0.01 / cfg.rule_scale;
    let mut b = ReportBuilder::new(format!("kernel diagonal n={n}"), EstimateId::KernelBound, cfg, bound);
    b.param("n", n).param("k_max", k_max).param("grid_step", step);

    let ks: Vec<usize> = (1..=k_max).collect();
    let ratios: Vec<f64> = ks
        .par_iter()
        .map(|&k| kernel_diagonal_ratio(n, k, &kernel_scan_grid(n, k, step)?))
        .collect::<Result<_>>()?;
    for (&k, &r) in ks.iter().zip(&ratios) {
        b.at_most(format!("k={k}"), r, bound);
    }
    b.trend("diagonal ratio", &ks, &ratios);
    let far = ((2 * 4 + n) as f64).sqrt() + 8.0;
    let x: Vec<f64> = vec![far / (n as f64).sqrt(); n];
    let tail = kernel_diagonal(n, 4, &x)?.abs();
    b.condition("|Phi_4(x,x)| beyond the turning point", tail, 1e-12, tail <= 1e-12);
    Ok(b.finish())
}

/// `sup_x 2π Σ_k |P_k f(x)|² / ‖f‖²` over a square grid in the plane.
pub fn check_morawetz_2d(cfg: &ScanConfig) -> Result<EstimateReport> {
    let k_max = cfg.k_max_or(20);
    let bound = cfg.bound();
    let step = 0.25 / cfg.rule_scale;
    let half_width = ((2 * k_max + 2) as f64).sqrt() + 3.0;
    let mut b = ReportBuilder::new("morawetz 2d", EstimateId::Morawetz2d, cfg, bound);
    b.param("n", 2)
        .param("k_max", k_max)
        .param("grid_step", step)
        .param("half_width", half_width);

    let steps = (half_width / step).ceil() as i64;
    let grid: Vec<[f64; 2]> = (-steps..=steps)
        .flat_map(|i| (-steps..=steps).map(move |j| [i as f64 * step, j as f64 * step]))
        .collect();

    let origin = morawetz_density(&SpectralState::mode(MultiIndex::new([0, 0])), &[0.0, 0.0]);
    b.equal("f=Phi_(0,0) at x=0", origin, 2.0, 1e-12, 2.0);

    let indices = enumerate_up_to(2, k_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut lowest = f64::INFINITY;
    for t in 0..cfg.trials {
        let f = SpectralState::random(2, &indices, &mut rng)?;
        let values: Vec<f64> = grid.par_iter().map(|x| morawetz_density(&f, x)).collect();
        let sup = values.iter().copied().fold(0.0, f64::max);
        lowest = lowest.min(values.iter().copied().fold(f64::INFINITY, f64::min));
        b.at_most(format!("trial {t}"), sup / f.norm_sq(), bound);
    }
    b.condition("minimum density", lowest, 0.0, lowest >= 0.0);
    Ok(b.finish())
}

/// `∫_0^{2π} |u(x,t)|² dt = 2π Σ_k |(P_k f)(x)|²`.
pub fn morawetz_density(f: &SpectralState, x: &[f64]) -> f64 {
    let degree = f.k_max();
    let mut h = vec![vec![0.0; degree + 1]; x.len()];
    for (axis, &xi) in x.iter().enumerate() {
        fill_hermite_functions(xi, &mut h[axis]);
    }
    let mut per_level = vec![Complex64::new(0.0, 0.0); degree + 1];
    for (a, c) in f.iter() {
        let phi: f64 = a.0.iter().enumerate().map(|(i, &j)| h[i][j]).product();
        per_level[a.degree()] += c * phi;
    }
    2.0 * PI * compensated_sum(per_level.iter().map(|v| v.norm_sqr()))
}

/// Rejects states with any odd index; those coefficients vanish for data even
/// in every coordinate.
pub fn require_fully_even(state: &SpectralState) -> Result<()> {
    match state
        .iter()
        .find(|(a, c)| a.0.iter().any(|d| d % 2 == 1) && c.norm() != 0.0)
    {
        Some((a, _)) => Err(Error::input(format!(
            "coefficient at {a} must vanish for a fully even state"
        ))),
        None => Ok(()),
    }
}

/// Number of fully even `α ∈ ℕ³` with `|α| = k` outside the three sets
/// `{2α_i ≥ Σ_{j≠i} α_j}`.
pub fn index_cover_misses(k: usize) -> Result<usize> {
    Ok(enumerate_multiindices(3, k)?
        .iter()
        .filter(|a| a.0.iter().all(|d| d % 2 == 0))
        .filter(|a| {
            let total: usize = a.0.iter().sum();
            !a.0.iter().any(|&ai| 2 * ai >= total - ai)
        })
        .count())
}

pub fn check_even_3d(cfg: &ScanConfig) -> Result<EstimateReport> {
    let k_max = cfg.k_max_or(20);
    let bound = cfg.bound();
    let refine = cfg.refine();
    let axes = all_axes(3);
    let mut b = ReportBuilder::new("even 3d estimate", EstimateId::Even3d, cfg, bound);
    b.param("n", 3).param("delta", 1.0).param("k_max", k_max);

    let phi0 = SpectralState::mode(MultiIndex::new([0, 0, 0]));
    let v = time_avg_weighted(&phi0, 1.0, &axes, refine)?;
    b.equal("d=Phi_0", v, 4.0 * PI, 1e-9, 4.0 * PI);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let a0 = SpectralState::random(3, &[MultiIndex::new([0, 0, 0])], &mut rng)?.scale(Complex64::new(1.7, 0.0));
    let p0 = level_weighted_integral(&a0, 1.0, &axes, refine)?;
    let gap = (p0 - 2.0 * a0.norm_sq()).abs();
    b.condition("P_0 endpoint |value - 2|a_0|^2|", gap, 1e-9, gap <= 1e-9);

    let even: Vec<MultiIndex> = enumerate_up_to(3, k_max)?
        .into_iter()
        .filter(|a| a.0.iter().all(|d| d % 2 == 0))
        .collect();
    for t in 0..cfg.trials {
        let d = SpectralState::random(3, &even, &mut rng)?;
        require_fully_even(&d)?;
        let value = exact_gated("even 3d functional", refine, |r| time_avg_weighted(&d, 1.0, &axes, r));
        if let Some(v) = b.gate(value)? {
            b.at_most(format!("trial {t}"), v / d.norm_sq(), bound);
        }
    }
    let misses: usize = (0..=40).map(index_cover_misses).sum::<Result<usize>>()?;
    b.condition("index cover misses for k <= 40", misses as f64, 0.0, misses == 0);
    Ok(b.finish())
}

/// `‖(I−Δ)^{s/2} f‖ / ‖(−Δ+|x|²)^{s/2} f‖` over single modes and random states.
pub fn check_hermite_sobolev(cfg: &ScanConfig, n: usize, s: f64) -> Result<EstimateReport> {
    if !(1..=2).contains(&n) {
        return Err(Error::input(format!(
            "the Sobolev comparison runs for n = 1 or 2, got {n}"
        )));
    }
    let k_max = cfg.k_max_or(30);
    let bound = cfg.bound();
    let tol = cfg.tol_or(1e-8);
    let mut b = ReportBuilder::new(
        format!("hermite sobolev n={n} s={s}"),
        EstimateId::HermiteSobolev,
        cfg,
        bound,
    );
    b.param("n", n)
        .param("s", s)
        .param("k_max", k_max)
        .param("gate_tolerance", tol);

    let ratio = |f: &SpectralState| -> Result<f64> {
        Ok(bessel_sobolev_norm(f, s, cfg.rule_scale, tol)? / hermite_sobolev_norm(f, s)?)
    };

    let mut ks = Vec::new();
    let mut level_sup = Vec::new();
    for k in 0..=k_max {
        let modes = enumerate_multiindices(n, k)?;
        let values: Vec<Result<f64>> = modes
            .par_iter()
            .map(|a| ratio(&SpectralState::mode(a.clone())))
            .collect();
        let mut sup: f64 = 0.0;
        for (a, v) in modes.iter().zip(values) {
            if let Some(v) = b.gate(v)? {
                b.at_most(format!("mode {a}"), v, bound);
                sup = sup.max(v);
            }
        }
        ks.push(k);
        level_sup.push(sup);
    }
    b.trend("single-mode ratio", &ks, &level_sup);

    let indices = enumerate_up_to(n, k_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for t in 0..cfg.trials {
        let f = SpectralState::random(n, &indices, &mut rng)?;
        if let Some(v) = b.gate(ratio(&f))? {
            b.at_most(format!("trial {t}"), v, bound);
        }
    }
    Ok(b.finish())
}

/// `2π·3^{−3/2}·π^{−3}`, the collapsed trace of `Φ_0` in nine dimensions.
pub fn collapse_gaussian_value() -> f64 {
    2.0 * PI * 3f64.powf(-1.5) * PI.powi(-3)
}

pub fn check_collapse_9d(cfg: &ScanConfig) -> Result<EstimateReport> {
    let k_max = cfg.k_max_or(3);
    if k_max > COLLAPSE_MAX_LEVEL {
        return Err(Error::Capacity {
            what: "collapse level",
            requested: k_max,
            limit: COLLAPSE_MAX_LEVEL,
        });
    }
    let bound = cfg.bound();
    let refine = cfg.refine();
    let mut b = ReportBuilder::new("collapse 9d", EstimateId::Collapse9d, cfg, bound);
    b.param("n", 9).param("k_max", k_max);

    let phi0 = SpectralState::mode(MultiIndex::new([0; 9]));
    let v = collapse_trace_norm(&phi0, refine)? / oscillator_norm_sq(&phi0);
    let expected = collapse_gaussian_value() / 81.0;
    b.equal("f=Phi_0", v, expected, 1e-8, expected);

    let indices = enumerate_up_to(9, k_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for t in 0..cfg.trials {
        let f = SpectralState::random(9, &indices, &mut rng)?;
        let value = exact_gated("collapsed trace", refine, |r| collapse_trace_norm(&f, r));
        if let Some(v) = b.gate(value)? {
            b.at_most(format!("trial {t}"), v / oscillator_norm_sq(&f), bound);
        }
    }
    Ok(b.finish())
}
