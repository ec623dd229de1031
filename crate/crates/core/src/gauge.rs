//! Diagonal model instantons on Taub-NUT.
//!
//! Each channel is a `u(1)` connection `a = −i α` with
//!
//! ```text
//! α = h(r)(dτ + ω) − m ω,    h = (λ + m/(2r)) / V,
//! ```
//!
//! on `g_TN` with `l = 1`. Since `h = m − (m − λ)/V`, the field strength is
//! `(λ − m) d((dτ + ω)/V)`, a multiple of the square-integrable harmonic
//! two-form of Taub-NUT. At infinity `α → λ(dτ + ω) + η` with `η = −mω`, a
//! connection on the line bundle `W` over the sphere at infinity.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::charclasses::{angular_samples, isotropy, pairwise_sum, ConvergenceRow, QuadratureSpec, RadialDensity};
use crate::error::{Error, Result};
use crate::geometry::{
    hodge_star, levi3, metric_at, potential, two_form_norm, wedge_density, Gauge, MetricSpec, Point,
};
use crate::scalar::{Dual, Scalar};

/// Default genericity tolerance: `dist(λ, ℤ)` must be at least this.
pub const LAMBDA_TOL: f64 = 1e-6;

/// Radii splitting the bulk integration; the last segment runs to infinity.
const BULK_BREAKPOINTS: [f64; 3] = [0.5, 2.0, 8.0];

/// One diagonal summand of the instanton.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstantonChannel {
    /// Holonomy eigenvalue `λ`.
    pub lambda: f64,
    /// Coefficient `m` of `1/(2r)` in the fibre component.
    pub mcharge: f64,
    /// Chern number `(1/2πi)∮ F^W` of the boundary line bundle.
    pub chern: i64,
}

impl InstantonChannel {
    pub fn new(lambda: f64, mcharge: f64, chern: i64) -> Self {
        Self { lambda, mcharge, chern }
    }

    /// The model channel, whose boundary line bundle has `η = −mω` and Chern number `−m`.
    pub fn model(lambda: f64, m: i64) -> Self {
        Self::new(lambda, m as f64, -m)
    }

    /// `(1/2πi)∮ F^E` over the sphere at infinity: `λ + chern`.
    ///
    /// The `λ(dτ + ω)` part of the boundary connection contributes `λ∮dω/(−2π) = λ`.
    pub fn flux(&self) -> f64 {
        self.lambda + self.chern as f64
    }

    /// `dist(λ, ℤ)`.
    pub fn integer_distance(&self) -> f64 {
        let f = self.lambda - self.lambda.floor();
        f.min(1.0 - f)
    }

    fn check(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.mcharge.is_finite()) {
            return Err(Error::InvalidSpec(format!("channel parameters must be finite: {self:?}")));
        }
        Ok(())
    }

    /// `h(r) = (2λr + m)/(2r + 1)` and `h′(r)`.
    fn profile<S: Scalar>(&self, r: S) -> (S, S) {
        let v = potential(1.0, r);
        let h = (S::constant(self.lambda) + r.scale(2.0).recip().scale(self.mcharge)) / v;
        let q = r.scale(2.0) + S::constant(1.0);
        let dh = (q * q).recip().scale(2.0 * (self.lambda - self.mcharge));
        (h, dh)
    }
}

/// A diagonal model instanton.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstantonData {
    pub channels: Vec<InstantonChannel>,
}

impl InstantonData {
    pub fn new(channels: Vec<InstantonChannel>) -> Result<Self> {
        let data = Self { channels };
        data.validate()?;
        Ok(data)
    }

    /// Model channels `(λ_j, m_j)`.
    pub fn model(params: &[(f64, i64)]) -> Result<Self> {
        Self::new(params.iter().map(|&(l, m)| InstantonChannel::model(l, m)).collect())
    }

    pub fn rank(&self) -> usize {
        self.channels.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels.is_empty() {
            return Err(Error::InvalidSpec("an instanton needs at least one channel".into()));
        }
        for ch in &self.channels {
            ch.check()?;
        }
        for (i, a) in self.channels.iter().enumerate() {
            for (j, b) in self.channels.iter().enumerate().skip(i + 1) {
                if a.lambda == b.lambda {
                    return Err(Error::InvalidSpec(format!(
                        "holonomy eigenvalues must be pairwise distinct: channels {i} and {j} share λ = {}",
                        a.lambda
                    )));
                }
            }
        }
        Ok(())
    }

    /// Concatenation of two instantons (direct sum of bundles).
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let mut channels = self.channels.clone();
        channels.extend_from_slice(&other.channels);
        Self::new(channels)
    }
}

/// Real coefficients `α_μ` of `a = −i α` in the chart `(x1, x2, x3, τ)`.
pub fn potential_components<S: Scalar>(ch: &InstantonChannel, gauge: Gauge, x: &[S; 4]) -> [S; 4] {
    let xs = [x[0], x[1], x[2]];
    let r = (xs[0] * xs[0] + xs[1] * xs[1] + xs[2] * xs[2]).sqrt();
    let (h, _) = ch.profile(r);
    let w = gauge.omega(&xs);
    let c = h - S::constant(ch.mcharge);
    [c * w[0], c * w[1], c * w[2], h]
}

/// Closed-form `f = dα` as an antisymmetric matrix `f_μν`.
pub fn field_components<S: Scalar>(ch: &InstantonChannel, gauge: Gauge, x: &[S; 4]) -> [[S; 4]; 4] {
    let xs = [x[0], x[1], x[2]];
    let r = (xs[0] * xs[0] + xs[1] * xs[1] + xs[2] * xs[2]).sqrt();
    let (h, dh) = ch.profile(r);
    let w = gauge.omega(&xs);
    let c = h - S::constant(ch.mcharge);
    let zero = S::constant(0.0);
    // ∂_i h = h′ x_i / r;  (dω)_jk = ε_ijk ∂_i V with ∂_i V = −x_i/(2r³)
    let grad_h = xs.map(|xi| dh * xi / r);
    let grad_v = xs.map(|xi| -xi / (r * r * r).scale(2.0));
    let mut f = [[zero; 4]; 4];
    for j in 0..3 {
        for k in 0..3 {
            if j == k {
                continue;
            }
            let mut dw = zero;
            for (i, gv) in grad_v.iter().enumerate() {
                let e = levi3(i, j, k);
                if e != 0.0 {
                    dw = dw + gv.scale(e);
                }
            }
            f[j][k] = grad_h[j] * w[k] - grad_h[k] * w[j] + c * dw;
        }
        f[j][3] = grad_h[j];
        f[3][j] = -grad_h[j];
    }
    f
}

/// Which duality the field strength realizes with respect to `⋆_TN`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Duality {
    AntiSelfDual,
    SelfDual,
    /// `F = 0`.
    Flat,
    Neither,
}

/// Field strength `F = −i f` at a point with its duality defects on `g_TN`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldStrengthSample {
    /// Real coefficients `f_μν`.
    pub f: Matrix4<f64>,
    pub norm: f64,
    /// `‖F + ⋆F‖`
    pub asd_defect: f64,
    /// `‖F − ⋆F‖`
    pub sd_defect: f64,
    /// `max |∂_[λ f_μν]|` from dual-number differentiation.
    pub closure_residual: f64,
}

impl FieldStrengthSample {
    /// Duality type with relative tolerance `tol`.
    pub fn duality(&self, tol: f64) -> Duality {
        if self.norm == 0.0 {
            Duality::Flat
        } else if self.asd_defect <= tol * self.norm {
            Duality::AntiSelfDual
        } else if self.sd_defect <= tol * self.norm {
            Duality::SelfDual
        } else {
            Duality::Neither
        }
    }

    /// `min(‖F + ⋆F‖, ‖F − ⋆F‖) / ‖F‖`, zero for a flat field.
    pub fn relative_defect(&self) -> f64 {
        if self.norm == 0.0 {
            0.0
        } else {
            self.asd_defect.min(self.sd_defect) / self.norm
        }
    }
}

fn gauge_for(p: &Point) -> Gauge {
    let (_, theta, _) = p.polar();
    if theta.sin() > 0.1 {
        Gauge::Symmetric
    } else {
        Gauge::regular_at(p)
    }
}

/// Connection `a = −i α` at `p`, returned as the real coefficients `α_μ`.
pub fn model_connection_at(ch: &InstantonChannel, p: &Point, gauge: Gauge) -> Result<[f64; 4]> {
    p.require_off_nut()?;
    gauge.check([p.x1, p.x2, p.x3])?;
    Ok(potential_components(ch, gauge, &p.coords()))
}

/// Field strength and duality diagnostics at `p`.
pub fn field_strength_at(ch: &InstantonChannel, p: &Point, gauge: Gauge) -> Result<FieldStrengthSample> {
    p.require_off_nut()?;
    let x = p.coords();
    gauge.check([x[0], x[1], x[2]])?;
    let fa = field_components(ch, gauge, &x);
    let f = Matrix4::from_fn(|i, j| fa[i][j]);

    let mut df = [[[0.0; 4]; 4]; 4]; // df[k][i][j] = ∂_k f_ij
    for (k, slot) in df.iter_mut().enumerate() {
        let mut xd = x.map(Dual::constant);
        xd[k].eps = 1.0;
        let fd = field_components(ch, gauge, &xd);
        for i in 0..4 {
            for j in 0..4 {
                slot[i][j] = fd[i][j].eps;
            }
        }
    }
    let mut closure_residual: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let s = df[a][b][c] + df[b][c][a] + df[c][a][b];
                closure_residual = closure_residual.max(s.abs());
            }
        }
    }

    let sample = metric_at(&MetricSpec::taub_nut().with_gauge(gauge), p)?;
    let star = hodge_star(&sample, &f);
    Ok(FieldStrengthSample {
        norm: two_form_norm(&sample, &f),
        asd_defect: two_form_norm(&sample, &(f + star)),
        sd_defect: two_form_norm(&sample, &(f - star)),
        closure_residual,
        f,
    })
}

/// Field strength in a chart that is regular at `p`.
pub fn field_strength_auto(ch: &InstantonChannel, p: &Point) -> Result<FieldStrengthSample> {
    field_strength_at(ch, p, gauge_for(p))
}

/// `−(1/8π²)∫ tr F∧F` over Taub-NUT.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BulkAction {
    pub value: f64,
    /// Quadrature error estimate plus `core_bound`.
    pub error_estimate: f64,
    /// `r_min·|ρ(r_min)|`, bounding the omitted `[0, r_min]` where `ρ` is linear in `r`.
    pub core_bound: f64,
    pub nodes: usize,
    pub r_max: f64,
}

/// Radial density of `−(1/8π²) tr F∧F` at `r` summed over channels, with its
/// isotropy residual.
pub fn bulk_sample(data: &InstantonData, r: f64, quad: &QuadratureSpec) -> Result<(f64, f64)> {
    let mut values = Vec::with_capacity(quad.n_ang);
    let mut scales = Vec::with_capacity(quad.n_ang);
    for [theta, phi, tau] in angular_samples(quad.n_ang) {
        let p = Point::from_polar(r, theta, phi, tau);
        let gauge = gauge_for(&p);
        p.require_off_nut()?;
        let mut dens = Vec::with_capacity(data.rank());
        let mut mags = Vec::with_capacity(data.rank());
        for ch in &data.channels {
            let fa = field_components(ch, gauge, &p.coords());
            let f = Matrix4::from_fn(|i, j| fa[i][j]);
            // tr F∧F = −f∧f for F = −i f
            dens.push(wedge_density(&f, &f));
            mags.push(f.norm_squared());
        }
        values.push(pairwise_sum(&dens));
        scales.push(pairwise_sum(&mags));
    }
    let scale = pairwise_sum(&scales) / scales.len() as f64;
    let (mean, residual) = isotropy(&values, scale);
    if residual > quad.tol {
        return Err(Error::Symmetry { r, residual, tol: quad.tol });
    }
    // level set volume 8π²r² cancels the 1/8π²
    Ok((mean * r * r, residual))
}

/// Bulk action by radial quadrature; `Auto` extent integrates to infinity.
pub fn bulk_action(data: &InstantonData, quad: &QuadratureSpec) -> Result<BulkAction> {
    data.validate()?;
    let r_max = quad.resolve_r_max(&BULK_BREAKPOINTS, true);
    let rho = RadialDensity::sample(quad, r_max, &BULK_BREAKPOINTS, |r| bulk_sample(data, r, quad))?;
    let res = crate::charclasses::integrate_radial(&rho, quad)?;
    let core_bound = quad.r_min * bulk_sample(data, quad.r_min, quad)?.0.abs();
    Ok(BulkAction {
        value: res.value,
        error_estimate: res.error_estimate + core_bound,
        core_bound,
        nodes: res.nodes,
        r_max,
    })
}

/// Bulk action at each grid size, without applying the tolerance.
pub fn bulk_convergence(data: &InstantonData, quad: &QuadratureSpec, sizes: &[usize]) -> Result<Vec<ConvergenceRow>> {
    data.validate()?;
    let r_max = quad.resolve_r_max(&BULK_BREAKPOINTS, true);
    sizes
        .iter()
        .map(|&n| {
            let q = quad.with_nodes(n);
            let est = RadialDensity::sample(&q, r_max, &BULK_BREAKPOINTS, |r| bulk_sample(data, r, &q))?.estimate();
            Ok(ConvergenceRow { n_r: est.nodes, value: est.value, error_estimate: est.error_estimate, tail_bound: 0.0 })
        })
        .collect()
}

/// Closed form of the bulk action of a model channel on `[0, ∞)`: `−(λ − m)²/2`.
pub fn bulk_closed_form(ch: &InstantonChannel) -> f64 {
    -0.5 * (ch.lambda - ch.mcharge).powi(2)
}

/// Boundary data feeding the η̂ and index formulas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    /// `{λ_j} ∈ (0, 1)`.
    pub lambdas_mod1: Vec<f64>,
    pub cherns: Vec<i64>,
    /// `(1/2πi)∮ F^{E_j} = λ_j + c_j`.
    pub fluxes: Vec<f64>,
    /// Spectral gap `½ min_j dist(λ_j, ℤ)`.
    pub delta: f64,
}

/// Reduces the holonomies, checks genericity and computes the spectral gap.
pub fn boundary_data(data: &InstantonData) -> Result<BoundaryData> {
    boundary_data_with_tol(data, LAMBDA_TOL)
}

pub fn boundary_data_with_tol(data: &InstantonData, lambda_tol: f64) -> Result<BoundaryData> {
    data.validate()?;
    let mut min_dist = f64::INFINITY;
    for (channel, ch) in data.channels.iter().enumerate() {
        let d = ch.integer_distance();
        if d < lambda_tol {
            return Err(Error::Genericity { channel, lambda: ch.lambda, tol: lambda_tol });
        }
        min_dist = min_dist.min(d);
    }
    Ok(BoundaryData {
        lambdas_mod1: data.channels.iter().map(|c| c.lambda - c.lambda.floor()).collect(),
        cherns: data.channels.iter().map(|c| c.chern).collect(),
        fluxes: data.channels.iter().map(InstantonChannel::flux).collect(),
        delta: 0.5 * min_dist,
    })
}

/// Duality types observed at `points` for every channel; a consistent model
/// realizes one type (ignoring flat channels).
pub fn duality_survey(data: &InstantonData, points: &[Point], tol: f64) -> Result<Duality> {
    let mut seen: Option<Duality> = None;
    for ch in &data.channels {
        for p in points {
            let d = field_strength_auto(ch, p)?.duality(tol);
            match (d, seen) {
                (Duality::Flat, _) => {}
                (_, None) => seen = Some(d),
                (_, Some(s)) if s == d => {}
                _ => return Ok(Duality::Neither),
            }
        }
    }
    Ok(seen.unwrap_or(Duality::Flat))
}
