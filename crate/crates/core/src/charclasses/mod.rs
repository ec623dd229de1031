//! Characteristic-class densities reduced to radial integrals.
//!
//! The metric family is invariant under rotations of `ℝ³` and translations of
//! `τ`, so `tr R∧R` is constant on each level set `{r = const}`. The density is
//! sampled at a few angular positions, checked for isotropy and multiplied by
//! the level-set volume `8π²r²` of the Cartesian chart.

pub mod quadrature;

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

pub use quadrature::{
    gauss_legendre, integrate_radial, pairwise_sum, tanh_sinh, QuadratureSpec, RadialDensity, RadialExtent, RadialGrid,
    RadialIntegral, RadialSample, Scheme,
};

use crate::error::{Error, Refinement, Result};
use crate::geometry::{curvature_of, Differentiation, MetricField, Point};

/// `ρ(r) = level-set volume × density / 192π² = r²/24 × density`.
const PONTRYAGIN_RADIAL_FACTOR: f64 = 1.0 / 24.0;

/// Safety factor applied to the fitted tail majorant.
const TAIL_SAFETY: f64 = 2.0;

/// Deterministic `(θ, φ, τ)` sample positions, away from the `x3` axis.
pub fn angular_samples(n: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let c = 0.9 * (1.0 - 2.0 * (i as f64 + 0.5) / n as f64);
            let phi = (golden * i as f64).rem_euclid(2.0 * PI);
            let tau = (2.0 * PI * (0.1 + 0.618_033_988_749_895 * i as f64)).rem_euclid(2.0 * PI);
            [c.acos(), phi, tau]
        })
        .collect()
}

/// Mean of `values` and their spread relative to `|mean| + scale`.
pub(crate) fn isotropy(values: &[f64], scale: f64) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let denom = mean.abs() + scale;
    let residual = if denom > 0.0 { (hi - lo) / denom } else { 0.0 };
    (mean, residual)
}

/// Radial Pontryagin density and its isotropy residual at radius `r`.
pub fn pontryagin_sample<M: MetricField>(metric: &M, r: f64, quad: &QuadratureSpec) -> Result<(f64, f64)> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radial density needs 0 < r < ∞, got r = {r}")));
    }
    let mut values = Vec::with_capacity(quad.n_ang);
    let mut scales = Vec::with_capacity(quad.n_ang);
    for [theta, phi, tau] in angular_samples(quad.n_ang) {
        let p = Point::from_polar(r, theta, phi, tau);
        let c = curvature_of(metric, p.coords(), Differentiation::Dual)?;
        values.push(c.pontryagin_density());
        scales.push(c.kretschmann() * c.volume_density);
    }
    let scale = pairwise_sum(&scales) / scales.len() as f64;
    let (mean, residual) = isotropy(&values, scale);
    if residual > quad.tol {
        return Err(Error::Symmetry { r, residual, tol: quad.tol });
    }
    Ok((mean * r * r * PONTRYAGIN_RADIAL_FACTOR, residual))
}

/// `ρ(r)` with `(1/192π²)∫ tr R∧R = ∫ρ(r) dr`.
pub fn pontryagin_density<M: MetricField>(metric: &M, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    pontryagin_sample(metric, r, quad).map(|(rho, _)| rho)
}

/// Samples the Pontryagin density on the radial grids of `quad`.
pub fn pontryagin_radial<M: MetricField>(metric: &M, quad: &QuadratureSpec) -> Result<RadialDensity> {
    let bps = metric.radial_breakpoints();
    let r_max = quad.resolve_r_max(&bps, false);
    RadialDensity::sample(quad, r_max, &bps, |r| pontryagin_sample(metric, r, quad))
}

/// Result of `(1/192π²)∫ tr R∧R`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PontryaginIntegral {
    pub value: f64,
    pub error_estimate: f64,
    /// Bound on the neglected integral beyond `r_max` (zero for an infinite grid).
    pub tail_bound: f64,
    /// Estimate `r_min·|ρ(r_min)|` of the omitted core `[0, r_min]`.
    pub core_bound: f64,
    pub r_max: f64,
    pub nodes: usize,
    pub max_isotropy_residual: f64,
    pub history: Vec<Refinement>,
}

fn tail_for<M: MetricField>(metric: &M, r_max: f64, quad: &QuadratureSpec) -> Result<f64> {
    if r_max.is_infinite() {
        Ok(0.0)
    } else {
        cs_tail_bound(metric, r_max, quad)
    }
}

/// Integrates the Pontryagin density and certifies the truncation.
pub fn pontryagin_integral<M: MetricField>(metric: &M, quad: &QuadratureSpec) -> Result<PontryaginIntegral> {
    let rho = pontryagin_radial(metric, quad)?;
    let res = integrate_radial(&rho, quad)?;
    let tail_bound = tail_for(metric, rho.r_max, quad)?;
    if tail_bound > quad.tol {
        return Err(Error::Convergence { error_estimate: tail_bound, tol: quad.tol, history: res.history });
    }
    let core_bound = quad.r_min * pontryagin_density(metric, quad.r_min, quad)?.abs();
    Ok(PontryaginIntegral {
        value: res.value,
        error_estimate: res.error_estimate,
        tail_bound,
        core_bound,
        r_max: rho.r_max,
        nodes: res.nodes,
        max_isotropy_residual: rho.max_isotropy_residual(),
        history: res.history,
    })
}

/// Upper bound on `|∫_{r_cut}^∞ ρ dr|` from a power-law fit `|ρ| ≈ C r^{−α}` of
/// samples on `[r_cut, 4 r_cut]`, i.e. an exponential fit in `y = ln r`.
pub fn cs_tail_bound<M: MetricField>(metric: &M, r_cut: f64, quad: &QuadratureSpec) -> Result<f64> {
    let outer = metric.radial_breakpoints().into_iter().fold(0.0, f64::max);
    if !(r_cut > outer && r_cut.is_finite()) {
        return Err(Error::Domain(format!("tail cut r = {r_cut} must lie beyond the modified region (r > {outer})")));
    }
    let samples: Vec<(f64, f64)> = (0..5)
        .map(|k| {
            let r = r_cut * 2f64.powf(0.5 * k as f64);
            pontryagin_density(metric, r, quad).map(|rho| (r, rho))
        })
        .collect::<Result<_>>()?;
    power_law_tail(&samples)
}

/// Tail bound for samples `(r_k, ρ_k)` with `r_0` the cut radius.
pub(crate) fn power_law_tail(samples: &[(f64, f64)]) -> Result<f64> {
    const ZERO: f64 = 1e-300;
    if samples.iter().all(|&(_, v)| v.abs() < ZERO) {
        return Ok(0.0);
    }
    if samples.iter().any(|&(_, v)| v.abs() < ZERO) {
        return Err(Error::TailUnavailable("density vanishes at some but not all tail samples".into()));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(r, v)| (r.ln(), v.abs().ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let alpha = -sxy / sxx;
    if !(alpha > 1.0 + 1e-3) {
        return Err(Error::TailUnavailable(format!(
            "fitted decay exponent {alpha:.4} does not give an integrable tail"
        )));
    }
    let c = samples.iter().map(|&(r, v)| v.abs() * r.powf(alpha)).fold(0.0, f64::max);
    let r_cut = samples[0].0;
    Ok(TAIL_SAFETY * c * r_cut.powf(1.0 - alpha) / (alpha - 1.0))
}

/// One row of a grid-refinement table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N_r")]
    pub n_r: usize,
    pub value: f64,
    pub error_estimate: f64,
    pub tail_bound: f64,
}

/// Pontryagin integral at each grid size, without applying the tolerance.
pub fn convergence_table<M: MetricField>(
    metric: &M,
    quad: &QuadratureSpec,
    sizes: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    let bps = metric.radial_breakpoints();
    let r_max = quad.resolve_r_max(&bps, false);
    let tail_bound = tail_for(metric, r_max, quad)?;
    sizes
        .iter()
        .map(|&n| {
            let q = quad.with_nodes(n);
            let rho = pontryagin_radial(metric, &q)?;
            let est = rho.estimate();
            Ok(ConvergenceRow { n_r: est.nodes, value: est.value, error_estimate: est.error_estimate, tail_bound })
        })
        .collect()
}

pub(crate) fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().delimiter(b',').terminator(csv::Terminator::Any(b'\n')).has_headers(true).from_writer(w)
}

/// Writes rows as CSV with columns `N_r,value,error_estimate,tail_bound`.
pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], w: W) -> Result<()> {
    let mut out = csv_writer(w);
    if rows.is_empty() {
        out.write_record(["N_r", "value", "error_estimate", "tail_bound"]).map_err(csv_error)?;
    }
    for row in rows {
        out.serialize(row).map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Consistency(format!("csv serialization: {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BlendKind, BlendProfile, FlatMetric, MetricSpec, MetricVariant};
    use approx::assert_relative_eq;

    fn exact_d() -> MetricSpec {
        MetricSpec::new(MetricVariant::ExactD)
    }

    #[test]
    fn taub_nut_density_matches_closed_form() {
        let quad = QuadratureSpec::default();
        for r in [0.05, 0.5, 1.0, 3.0, 12.0] {
            let rho = pontryagin_density(&MetricSpec::taub_nut(), r, &quad).unwrap();
            assert_relative_eq!(rho, 4.0 * r / (2.0 * r + 1.0).powi(5), max_relative = 1e-10);
        }
    }

    #[test]
    fn exact_d_end_density_decays_exponentially_in_y() {
        let quad = QuadratureSpec::default();
        let spec = exact_d();
        let ys = [2.0f64, 2.5, 3.0, 3.5];
        let ln_rho: Vec<f64> =
            ys.iter().map(|&y| pontryagin_density(&spec, y.exp(), &quad).unwrap().abs().ln()).collect();
        for w in ln_rho.windows(2) {
            // per unit r the density falls like e^{−5y}
            assert_relative_eq!((w[1] - w[0]) / 0.5, -5.0, epsilon = 1e-8);
        }
        assert_relative_eq!(pontryagin_density(&spec, 10.0, &quad).unwrap(), -1.0 / (48.0 * 1e5), max_relative = 1e-9);
    }

    #[test]
    fn flat_metric_has_zero_density_and_tail() {
        let quad = QuadratureSpec::default();
        for r in [0.1, 1.0, 50.0] {
            assert_eq!(pontryagin_density(&FlatMetric, r, &quad).unwrap(), 0.0);
        }
        assert_eq!(cs_tail_bound(&FlatMetric, 80.0, &quad).unwrap(), 0.0);
    }

    #[test]
    fn exact_d_integral_is_one_twelfth() {
        let quad = QuadratureSpec::default();
        // the core [0, r_min] is Taub-NUT and contributes 2r_min² to leading order
        let anti = |r: f64| -1.0 / (3.0 * (2.0 * r + 1.0).powi(3)) + 1.0 / (4.0 * (2.0 * r + 1.0).powi(4));
        let core = anti(quad.r_min) - anti(0.0);
        for kind in [BlendKind::Quintic, BlendKind::Septic] {
            let spec = exact_d().with_blend(BlendProfile { kind, ..Default::default() });
            let res = pontryagin_integral(&spec, &quad).unwrap();
            assert!((res.value + core - 1.0 / 12.0).abs() < 1e-9, "{kind:?}: {}", res.value);
            assert!(res.error_estimate < 1e-9);
        }
    }

    #[test]
    fn exact_d_pieces_match_oracle() {
        // independent symbolic evaluation of the blended density
        let spec = exact_d();
        let quad = QuadratureSpec { r_min: 2.0, r_max: RadialExtent::Finite(4.0), ..Default::default() };
        let rho = RadialDensity::sample(&quad, 4.0, &spec.radial_breakpoints(), |r| pontryagin_sample(&spec, r, &quad))
            .unwrap();
        let res = integrate_radial(&rho, &quad).unwrap();
        assert_relative_eq!(res.value, 0.002_287_011_7, epsilon = 1e-9);
    }

    #[test]
    fn tail_bound_is_small_and_monotone() {
        let quad = QuadratureSpec::default();
        let spec = exact_d();
        let b80 = cs_tail_bound(&spec, 80.0, &quad).unwrap();
        assert!(b80 < 1e-4);
        // true tail is 1/(192 r⁴)
        assert!(b80 >= 1.0 / (192.0 * 80f64.powi(4)));
        let mut last = f64::INFINITY;
        for r in [5.0, 10.0, 20.0, 40.0, 80.0] {
            let b = cs_tail_bound(&spec, r, &quad).unwrap();
            assert!(b < last);
            last = b;
        }
    }

    #[test]
    fn tail_bound_rejects_cut_inside_blend() {
        assert!(matches!(cs_tail_bound(&exact_d(), 3.0, &QuadratureSpec::default()), Err(Error::Domain(_))));
    }

    #[test]
    fn non_decaying_tail_is_unavailable() {
        let samples: Vec<(f64, f64)> = [1.0, 2.0, 4.0].iter().map(|&r| (r, 1.0 / r)).collect();
        assert!(matches!(power_law_tail(&samples), Err(Error::TailUnavailable(_))));
    }

    #[test]
    fn isotropy_holds_for_all_variants() {
        let quad = QuadratureSpec { tol: 1e-9, ..Default::default() };
        for v in [
            MetricVariant::TaubNut,
            MetricVariant::Conformal,
            MetricVariant::Homotopy { t: 0.4 },
            MetricVariant::ExactD,
        ] {
            for r in [0.7, 2.5, 3.3, 9.0] {
                let (_, res) = pontryagin_sample(&MetricSpec::new(v), r, &quad).unwrap();
                assert!(res < 1e-9, "{v:?} at r = {r}: {res}");
            }
        }
    }

    #[test]
    fn angular_samples_avoid_axis() {
        for [theta, _, tau] in angular_samples(16) {
            assert!(theta.sin() > 0.4);
            assert!((0.0..2.0 * PI).contains(&tau));
        }
    }

    #[test]
    fn convergence_csv_layout() {
        let rows = [ConvergenceRow { n_r: 32, value: 0.5, error_estimate: 1e-3, tail_bound: 0.0 }];
        let mut buf = Vec::new();
        write_convergence_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "N_r,value,error_estimate,tail_bound\n32,0.5,0.001,0.0\n");
    }
}
