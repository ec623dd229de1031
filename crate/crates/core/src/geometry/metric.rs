use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use super::{potential, Gauge, Point};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Smooth step used to interpolate between the Taub-NUT core and the modified end.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlendKind {
    /// `6s⁵ − 15s⁴ + 10s³`, C².
    #[default]
    Quintic,
    /// `−20s⁷ + 70s⁶ − 84s⁵ + 35s⁴`, C³.
    Septic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlendProfile {
    pub r_in: f64,
    pub r_out: f64,
    #[serde(default)]
    pub kind: BlendKind,
}

impl Default for BlendProfile {
    fn default() -> Self {
        Self { r_in: 2.0, r_out: 4.0, kind: BlendKind::Quintic }
    }
}

impl BlendProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_in > 0.0 && self.r_out > self.r_in && self.r_out.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "blend needs 0 < r_in < r_out < ∞, got r_in = {}, r_out = {}",
                self.r_in, self.r_out
            )));
        }
        Ok(())
    }

    /// Blend weight `b(r)`: 0 for `r ≤ r_in`, 1 for `r ≥ r_out`.
    pub fn weight<S: Scalar>(&self, r: S) -> S {
        let s = (r - S::constant(self.r_in)).scale(1.0 / (self.r_out - self.r_in));
        match self.kind {
            BlendKind::Quintic => {
                let s3 = s * s * s;
                s3 * (S::constant(10.0) + s * (S::constant(-15.0) + s.scale(6.0)))
            }
            BlendKind::Septic => {
                let s4 = s * s * s * s;
                s4 * (S::constant(35.0) + s * (S::constant(-84.0) + s * (S::constant(70.0) + s.scale(-20.0))))
            }
        }
    }
}

/// Member of the metric family used along the deformation to an exact d-metric.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum MetricVariant {
    /// `V dx² + V⁻¹(dτ + ω)²`.
    TaubNut,
    /// The Taub-NUT metric rescaled by `(V r²)^(−b(r))`; equals
    /// `dy² + g_S² + (dτ+ω)²/(V² e^{2y})` for `r ≥ r_out`.
    Conformal,
    /// Conformal metric with `V` replaced by `V_t = l + t/(2r)` in the fibre factor.
    Homotopy { t: f64 },
    /// `t = 0` end of the homotopy: `dy² + g_S² + e^{−2y}(dτ+ω)²/l²` for `r ≥ r_out`.
    #[default]
    ExactD,
}

/// Selects and parameterizes a metric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    #[serde(flatten)]
    pub variant: MetricVariant,
    #[serde(default)]
    pub blend: BlendProfile,
    /// Asymptotic value `l` of the harmonic function `V`.
    #[serde(default = "default_mass")]
    pub mass: f64,
    #[serde(default)]
    pub gauge: Gauge,
}

fn default_mass() -> f64 {
    1.0
}

impl Default for MetricSpec {
    fn default() -> Self {
        Self::new(MetricVariant::ExactD)
    }
}

impl MetricSpec {
    pub fn new(variant: MetricVariant) -> Self {
        Self { variant, blend: BlendProfile::default(), mass: 1.0, gauge: Gauge::Symmetric }
    }

    pub fn taub_nut() -> Self {
        Self::new(MetricVariant::TaubNut)
    }

    pub fn with_blend(mut self, blend: BlendProfile) -> Self {
        self.blend = blend;
        self
    }

    pub fn with_gauge(mut self, gauge: Gauge) -> Self {
        self.gauge = gauge;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.blend.validate()?;
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::InvalidSpec(format!("mass parameter must be positive, got {}", self.mass)));
        }
        if let MetricVariant::Homotopy { t } = self.variant {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::InvalidSpec(format!("homotopy parameter t must lie in [0, 1], got {t}")));
            }
        }
        Ok(())
    }

    /// Coefficients `(A, B)` of `g = A dx² + B (dτ + ω)²` at radius `r`.
    pub fn warp<S: Scalar>(&self, r: S) -> (S, S) {
        let v = potential(self.mass, r);
        // V_t in the fibre factor
        let vt = match self.variant {
            MetricVariant::TaubNut => return (v, v.recip()),
            MetricVariant::Conformal => v,
            MetricVariant::Homotopy { t } => S::constant(self.mass) + r.scale(2.0).recip().scale(t),
            MetricVariant::ExactD => S::constant(self.mass),
        };
        let rv = r.re();
        if rv <= self.blend.r_in {
            (v, v.recip())
        } else if rv >= self.blend.r_out {
            let inv_r2 = (r * r).recip();
            (inv_r2, inv_r2 / (vt * vt))
        } else {
            let b = self.blend.weight(r);
            let one = S::constant(1.0);
            let ln_v = v.ln();
            let ln_r = r.ln();
            let ln_a = (one - b) * ln_v - b.scale(2.0) * ln_r;
            let ln_b = -(one - b) * ln_v - b.scale(2.0) * (vt * r).ln();
            (ln_a.exp(), ln_b.exp())
        }
    }
}

/// A metric given in closed form on the Cartesian chart `(x1, x2, x3, τ)`.
pub trait MetricField: Sync {
    fn components<S: Scalar>(&self, x: &[S; 4]) -> Result<[[S; 4]; 4]>;

    /// Radii where the metric is only finitely differentiable.
    fn radial_breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl MetricField for MetricSpec {
    fn components<S: Scalar>(&self, x: &[S; 4]) -> Result<[[S; 4]; 4]> {
        let xs = [x[0], x[1], x[2]];
        let xr = [x[0].re(), x[1].re(), x[2].re()];
        let r = (xs[0] * xs[0] + xs[1] * xs[1] + xs[2] * xs[2]).sqrt();
        if !(r.re() > 0.0) {
            return Err(Error::Domain("metric evaluation at the nut r = 0".into()));
        }
        self.gauge.check(xr)?;
        let (a, b) = self.warp(r);
        let w = self.gauge.omega(&xs);
        let zero = S::constant(0.0);
        let mut g = [[zero; 4]; 4];
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] = b * w[i] * w[j];
            }
            g[i][i] = g[i][i] + a;
            g[i][3] = b * w[i];
            g[3][i] = g[i][3];
        }
        g[3][3] = b;
        Ok(g)
    }

    fn radial_breakpoints(&self) -> Vec<f64> {
        match self.variant {
            MetricVariant::TaubNut => Vec::new(),
            _ => vec![self.blend.r_in, self.blend.r_out],
        }
    }
}

/// Euclidean `ℝ³ × S¹`, used as a zero-curvature control.
#[derive(Clone, Copy, Debug, Default)]
pub struct FlatMetric;

impl MetricField for FlatMetric {
    fn components<S: Scalar>(&self, _x: &[S; 4]) -> Result<[[S; 4]; 4]> {
        let mut g = [[S::constant(0.0); 4]; 4];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = S::constant(1.0);
        }
        Ok(g)
    }
}

/// Coordinate metric and an oriented orthonormal frame at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricSample {
    /// Components in the `(dx1, dx2, dx3, dτ)` basis.
    pub g: Matrix4<f64>,
    /// Columns are frame vectors: `frameᵀ · g · frame = I`, `det frame > 0`.
    pub frame: Matrix4<f64>,
}

impl MetricSample {
    pub fn from_matrix(g: Matrix4<f64>) -> Result<Self> {
        let chol = g.cholesky().ok_or_else(|| Error::Consistency(format!("metric is not positive definite: {g}")))?;
        let l = chol.l();
        let frame = l.try_inverse().ok_or_else(|| Error::Consistency("singular Cholesky factor".into()))?.transpose();
        Ok(Self { g, frame })
    }

    pub fn inverse(&self) -> Matrix4<f64> {
        self.frame * self.frame.transpose()
    }

    /// `√det g`, the coordinate density of the Riemannian volume form.
    pub fn volume_density(&self) -> f64 {
        1.0 / self.frame.determinant()
    }

    /// `max |frameᵀ g frame − I|`.
    pub fn frame_residual(&self) -> f64 {
        (self.frame.transpose() * self.g * self.frame - Matrix4::identity()).amax()
    }
}

/// Evaluate any closed-form metric at Cartesian coordinates.
pub fn sample_field<M: MetricField>(metric: &M, x: [f64; 4]) -> Result<MetricSample> {
    let g = metric.components(&x)?;
    MetricSample::from_matrix(Matrix4::from_fn(|i, j| g[i][j]))
}

pub fn metric_at(spec: &MetricSpec, p: &Point) -> Result<MetricSample> {
    p.require_off_nut()?;
    sample_field(spec, p.coords())
}

/// The metric pulled back to the chart `(y, θ, φ, τ)` with `r = e^y`.
pub fn metric_log_polar(spec: &MetricSpec, p: &Point) -> Result<Matrix4<f64>> {
    let s = metric_at(spec, p)?;
    let (r, th, ph) = p.polar();
    let (st, ct) = th.sin_cos();
    let (sp, cp) = ph.sin_cos();
    // columns: ∂x/∂y, ∂x/∂θ, ∂x/∂φ, ∂x/∂τ
    let j = Matrix4::new(
        r * st * cp,
        r * ct * cp,
        -r * st * sp,
        0.0,
        r * st * sp,
        r * ct * sp,
        r * st * cp,
        0.0,
        r * ct,
        -r * st,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        1.0,
    );
    Ok(j.transpose() * s.g * j)
}
