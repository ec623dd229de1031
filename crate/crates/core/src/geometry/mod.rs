//! Coordinates, the Taub-NUT metric family, pointwise curvature and the Hodge star.
//!
//! All tensors are expressed in the Cartesian chart `(x1, x2, x3, τ)` with
//! orientation `dx1∧dx2∧dx3∧dτ`. The connection one-form `ω` of the circle
//! fibration (with `dω = ⋆₃dV`) depends on a choice of [`Gauge`].

pub mod checks;
mod curvature;
mod hodge;
mod metric;

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::scalar::{Dual, Scalar};

pub use curvature::{curvature_at, curvature_of, CurvatureSample, Differentiation, PAIRS};
pub use hodge::{hodge_star, levi_civita, two_form_norm, wedge_density};
pub use metric::{
    metric_at, metric_log_polar, sample_field, BlendKind, BlendProfile, FlatMetric, MetricField, MetricSample,
    MetricSpec, MetricVariant,
};

/// Relative distance `ρ/r` below which a point is treated as lying on a gauge axis.
pub const AXIS_TOL: f64 = 1e-8;

/// A point of Taub-NUT in Cartesian coordinates with the fibre angle wrapped to `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub tau: f64,
}

impl Point {
    pub fn new(x1: f64, x2: f64, x3: f64, tau: f64) -> Self {
        Self { x1, x2, x3, tau: tau.rem_euclid(TAU) }
    }

    pub fn from_polar(r: f64, theta: f64, phi: f64, tau: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::new(r * st * cp, r * st * sp, r * ct, tau)
    }

    pub fn r(&self) -> f64 {
        (self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3).sqrt()
    }

    /// `(r, θ, φ)` with `θ ∈ [0, π]`, `φ ∈ (-π, π]`.
    pub fn polar(&self) -> (f64, f64, f64) {
        let r = self.r();
        let theta = if r > 0.0 { (self.x3 / r).clamp(-1.0, 1.0).acos() } else { 0.0 };
        (r, theta, self.x2.atan2(self.x1))
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.x1, self.x2, self.x3, self.tau]
    }

    pub(crate) fn require_off_nut(&self) -> Result<f64> {
        let r = self.r();
        if r > 0.0 && r.is_finite() {
            Ok(r)
        } else {
            Err(Error::Domain(format!("tensor evaluation needs 0 < r < ∞, got r = {r}")))
        }
    }
}

/// Gauge (chart) for the monopole one-form `ω`.
///
/// `Symmetric` is `ω = ½ cosθ dφ` and is singular along the whole `x3` axis.
/// `North = ω − ½dφ` is regular on the positive half axis and `South = ω + ½dφ`
/// on the negative half axis. All three share `dω = −½ sinθ dθ∧dφ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    #[default]
    Symmetric,
    North,
    South,
}

impl Gauge {
    /// The hemisphere chart that is regular at `p`.
    pub fn regular_at(p: &Point) -> Gauge {
        if p.x3 >= 0.0 {
            Gauge::North
        } else {
            Gauge::South
        }
    }

    fn name(self) -> &'static str {
        match self {
            Gauge::Symmetric => "symmetric",
            Gauge::North => "north",
            Gauge::South => "south",
        }
    }

    /// Rejects points on this gauge's Dirac string.
    pub fn check(self, x: [f64; 3]) -> Result<()> {
        let rho = x[0].hypot(x[1]);
        let r = (rho * rho + x[2] * x[2]).sqrt();
        if rho > AXIS_TOL * r {
            return Ok(());
        }
        let bad = match self {
            Gauge::Symmetric => true,
            Gauge::North => x[2] < 0.0,
            Gauge::South => x[2] > 0.0,
        };
        if bad {
            let suggested = if x[2] >= 0.0 { Gauge::North } else { Gauge::South };
            Err(Error::Chart { gauge: self.name(), suggested: suggested.name() })
        } else {
            Ok(())
        }
    }

    /// Cartesian components `(ω₁, ω₂, ω₃)`; callers must have run [`Gauge::check`].
    pub fn omega<S: Scalar>(self, x: &[S; 3]) -> [S; 3] {
        let [x1, x2, x3] = *x;
        let r = (x1 * x1 + x2 * x2 + x3 * x3).sqrt();
        // ω = c (x1 dx2 − x2 dx1)
        let c = match self {
            Gauge::Symmetric => (x3 / r) / (x1 * x1 + x2 * x2) * S::constant(0.5),
            Gauge::North => -(r * (r + x3)).recip().scale(0.5),
            Gauge::South => (r * (r - x3)).recip().scale(0.5),
        };
        [-c * x2, c * x1, S::constant(0.0)]
    }
}

/// Harmonic potential and monopole one-form at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialSample {
    pub v: f64,
    pub omega: [f64; 3],
}

/// `V = l + 1/(2r)`.
pub fn potential<S: Scalar>(mass: f64, r: S) -> S {
    S::constant(mass) + r.scale(2.0).recip()
}

/// `V` (with `l = 1`) and the Cartesian components of `ω` in `gauge`.
pub fn potential_and_omega(p: &Point, gauge: Gauge) -> Result<PotentialSample> {
    let r = p.require_off_nut()?;
    let x = [p.x1, p.x2, p.x3];
    gauge.check(x)?;
    Ok(PotentialSample { v: potential(1.0, r), omega: gauge.omega(&x) })
}

/// Exterior derivative of `ω` by dual-number differentiation, as the antisymmetric
/// matrix `(dω)_ij = ∂_i ω_j − ∂_j ω_i`.
pub fn d_omega(p: &Point, gauge: Gauge) -> Result<[[f64; 3]; 3]> {
    p.require_off_nut()?;
    let x = [p.x1, p.x2, p.x3];
    gauge.check(x)?;
    let mut jac = [[0.0; 3]; 3]; // jac[i][j] = ∂_i ω_j
    for (i, row) in jac.iter_mut().enumerate() {
        let mut xd = x.map(Dual::constant);
        xd[i].eps = 1.0;
        let w = gauge.omega(&xd);
        for j in 0..3 {
            row[j] = w[j].eps;
        }
    }
    let mut d = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            d[i][j] = jac[i][j] - jac[j][i];
        }
    }
    Ok(d)
}

/// `⋆₃dV` as an antisymmetric matrix, with `dV` from dual-number differentiation of `V`.
pub fn star3_dv(p: &Point) -> Result<[[f64; 3]; 3]> {
    p.require_off_nut()?;
    let x = [p.x1, p.x2, p.x3];
    let mut grad = [0.0; 3];
    for (i, gi) in grad.iter_mut().enumerate() {
        let mut xd = x.map(Dual::constant);
        xd[i].eps = 1.0;
        let r = (xd[0] * xd[0] + xd[1] * xd[1] + xd[2] * xd[2]).sqrt();
        *gi = potential(1.0, r).eps;
    }
    // (⋆₃ dV)_jk = ε_ijk ∂_i V
    let mut s = [[0.0; 3]; 3];
    for (i, gi) in grad.iter().enumerate() {
        for j in 0..3 {
            for k in 0..3 {
                s[j][k] += levi3(i, j, k) * gi;
            }
        }
    }
    Ok(s)
}

pub(crate) fn levi3(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn potential_at_half() {
        let p = Point::from_polar(0.5, 1.0, 0.3, 0.0);
        let s = potential_and_omega(&p, Gauge::Symmetric).unwrap();
        assert_relative_eq!(s.v, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn omega_vanishes_on_equator() {
        let p = Point::from_polar(1.7, PI / 2.0, 0.9, 0.0);
        let s = potential_and_omega(&p, Gauge::Symmetric).unwrap();
        for w in s.omega {
            assert!(w.abs() < 1e-16);
        }
    }

    #[test]
    fn symmetric_gauge_is_half_cos_theta_dphi() {
        let (r, th, ph) = (2.0, 0.7, -1.1);
        let p = Point::from_polar(r, th, ph, 0.0);
        let w = potential_and_omega(&p, Gauge::Symmetric).unwrap().omega;
        // contract with ∂/∂φ = (−y, x, 0)
        let w_phi = -w[0] * p.x2 + w[1] * p.x1;
        assert_relative_eq!(w_phi, 0.5 * th.cos(), epsilon = 1e-14);
        // ∂/∂θ and ∂/∂r components vanish
        let w_r = (w[0] * p.x1 + w[1] * p.x2 + w[2] * p.x3) / r;
        assert!(w_r.abs() < 1e-15);
    }

    #[test]
    fn hemisphere_gauges_differ_by_half_dphi() {
        let p = Point::from_polar(1.3, 1.2, 0.4, 0.0);
        let ws = potential_and_omega(&p, Gauge::Symmetric).unwrap().omega;
        let wn = potential_and_omega(&p, Gauge::North).unwrap().omega;
        let wsouth = potential_and_omega(&p, Gauge::South).unwrap().omega;
        let rho2 = p.x1 * p.x1 + p.x2 * p.x2;
        let dphi = [-p.x2 / rho2, p.x1 / rho2, 0.0];
        for i in 0..3 {
            assert_relative_eq!(ws[i] - wn[i], 0.5 * dphi[i], epsilon = 1e-14);
            assert_relative_eq!(wsouth[i] - ws[i], 0.5 * dphi[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn axis_points_need_the_other_chart() {
        let north_pole = Point::new(0.0, 0.0, 2.0, 0.0);
        let south_pole = Point::new(0.0, 0.0, -2.0, 0.0);
        assert!(matches!(
            potential_and_omega(&north_pole, Gauge::Symmetric),
            Err(Error::Chart { suggested: "north", .. })
        ));
        assert!(potential_and_omega(&north_pole, Gauge::North).is_ok());
        assert!(matches!(potential_and_omega(&north_pole, Gauge::South), Err(Error::Chart { .. })));
        assert!(potential_and_omega(&south_pole, Gauge::South).is_ok());
        assert_eq!(Gauge::regular_at(&south_pole), Gauge::South);
    }

    #[test]
    fn nut_is_excluded() {
        let p = Point::new(0.0, 0.0, 0.0, 1.0);
        assert!(matches!(potential_and_omega(&p, Gauge::North), Err(Error::Domain(_))));
    }

    #[test]
    fn tau_wraps() {
        let p = Point::new(1.0, 0.0, 0.0, -0.5);
        assert_relative_eq!(p.tau, TAU - 0.5);
        assert!(Point::new(1.0, 0.0, 0.0, 7.0).tau < TAU);
    }

    #[test]
    fn d_omega_matches_star_dv_in_all_gauges() {
        let p = Point::from_polar(0.8, 0.6, 2.2, 0.0);
        let s = star3_dv(&p).unwrap();
        for g in [Gauge::Symmetric, Gauge::North, Gauge::South] {
            let d = d_omega(&p, g).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert_relative_eq!(d[i][j], s[i][j], epsilon = 1e-13);
                }
            }
        }
    }
}
