//! Pointwise consistency residuals of the Taub-NUT geometry.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use super::{curvature_at, d_omega, levi3, metric_at, star3_dv, Differentiation, Gauge, MetricSpec, Point};
use crate::charclasses::gauss_legendre;
use crate::error::Result;

/// Relative step of the central-difference curvature evaluation.
pub const CENTRAL_STEP: f64 = 1e-4;

/// Admissible `‖Ric‖` of a central-difference evaluation with step `h` at radius `r`.
///
/// Truncation is `O(h²)` relative to the curvature scale `‖Riem‖/r²` of the
/// fourth derivatives, round-off is `O(ε‖g‖/h²)`; the bound is ten times their sum.
pub fn central_difference_bound(h: f64, r: f64, riemann_norm: f64, g_max: f64) -> f64 {
    10.0 * (h * h * riemann_norm / (r * r) + f64::EPSILON * g_max / (h * h))
}

/// All pointwise residuals at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointResiduals {
    pub r: f64,
    /// `‖Ric‖` from central differences with `h = 10⁻⁴ r`.
    pub ricci_central: f64,
    pub ricci_central_bound: f64,
    /// `‖Ric‖` from hyper-dual derivatives.
    pub ricci_dual: f64,
    pub riemann_norm: f64,
    /// `max |⋆⋆F − F|` over a basis of two-forms.
    pub hodge_involution: f64,
    /// `max |frameᵀ g frame − I|`.
    pub frame: f64,
    /// `max |dω − ⋆₃dV|`.
    pub d_omega_star_dv: f64,
}

/// `max |⋆⋆e − e|` over the coordinate basis two-forms `e = dx^i∧dx^j`.
pub fn hodge_involution_residual(spec: &MetricSpec, p: &Point) -> Result<f64> {
    let s = metric_at(spec, p)?;
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            let mut e = Matrix4::zeros();
            e[(i, j)] = 1.0;
            e[(j, i)] = -1.0;
            let ss = super::hodge_star(&s, &super::hodge_star(&s, &e));
            worst = worst.max((ss - e).amax());
        }
    }
    Ok(worst)
}

/// Residuals of the Taub-NUT metric (`spec` fixes mass and blend) at `p`.
pub fn point_residuals(spec: &MetricSpec, p: &Point) -> Result<PointResiduals> {
    let r = p.require_off_nut()?;
    let spec = spec.with_gauge(Gauge::regular_at(p));
    let h = CENTRAL_STEP * r;
    let fd = curvature_at(&spec, p, Differentiation::Central { h })?;
    let exact = curvature_at(&spec, p, Differentiation::Dual)?;
    let s = metric_at(&spec, p)?;
    let dw = d_omega(p, spec.gauge)?;
    let sv = star3_dv(p)?;
    let mut dres: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            dres = dres.max((dw[i][j] - sv[i][j]).abs());
        }
    }
    Ok(PointResiduals {
        r,
        ricci_central: fd.ricci_norm(),
        ricci_central_bound: central_difference_bound(h, r, exact.riemann_norm(), s.g.amax()),
        ricci_dual: exact.ricci_norm(),
        riemann_norm: exact.riemann_norm(),
        hodge_involution: hodge_involution_residual(&spec, p)?,
        frame: s.frame_residual(),
        d_omega_star_dv: dres,
    })
}

/// `∮ dω` over the coordinate sphere of the given radius, by an `n × 2n`
/// Gauss-Legendre × trapezoid product rule in `(cos θ, φ)`.
pub fn sphere_flux(radius: f64, n: usize) -> Result<f64> {
    let (xs, ws) = gauss_legendre(n);
    let n_phi = 2 * n;
    let dphi = std::f64::consts::TAU / n_phi as f64;
    let mut terms = Vec::with_capacity(n * n_phi);
    for (&c, &w) in xs.iter().zip(&ws) {
        let theta = c.acos();
        for k in 0..n_phi {
            let phi = (k as f64 + 0.5) * dphi;
            let p = Point::from_polar(radius, theta, phi, 0.0);
            let d = d_omega(&p, Gauge::regular_at(&p))?;
            // B_k = ½ ε_kij (dω)_ij, integrated against n dA = r² n dcosθ dφ
            let n_vec = [p.x1 / radius, p.x2 / radius, p.x3 / radius];
            let mut flux = 0.0;
            for (kk, nk) in n_vec.iter().enumerate() {
                for i in 0..3 {
                    for j in 0..3 {
                        flux += 0.5 * levi3(kk, i, j) * d[i][j] * nk;
                    }
                }
            }
            terms.push(flux * radius * radius * w * dphi);
        }
    }
    Ok(crate::charclasses::pairwise_sum(&terms))
}
