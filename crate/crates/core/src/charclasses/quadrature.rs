use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Refinement, Result};

/// Points per Gauss-Legendre panel.
pub const PANEL_ORDER: usize = 8;

/// Outer radius used when a field has no breakpoints.
const REFERENCE_RADIUS: f64 = 4.0;

/// Default truncation radius is this multiple of the outermost breakpoint.
pub const R_MAX_FACTOR: f64 = 20.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    GaussLegendre,
    TanhSinh,
}

/// Upper end of the radial integration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExtentRepr", into = "ExtentRepr")]
pub enum RadialExtent {
    /// `20 ×` the outermost breakpoint for curvature densities; infinity for gauge densities.
    #[default]
    Auto,
    Finite(f64),
    Infinite,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExtentRepr {
    Number(f64),
    Word(String),
}

impl TryFrom<ExtentRepr> for RadialExtent {
    type Error = String;
    fn try_from(v: ExtentRepr) -> std::result::Result<Self, String> {
        match v {
            ExtentRepr::Number(x) => Ok(RadialExtent::Finite(x)),
            ExtentRepr::Word(w) => match w.as_str() {
                "auto" => Ok(RadialExtent::Auto),
                "infinity" | "inf" => Ok(RadialExtent::Infinite),
                other => Err(format!("r_max must be a number, \"auto\" or \"infinity\", got {other:?}")),
            },
        }
    }
}

impl From<RadialExtent> for ExtentRepr {
    fn from(v: RadialExtent) -> Self {
        match v {
            RadialExtent::Auto => ExtentRepr::Word("auto".into()),
            RadialExtent::Finite(x) => ExtentRepr::Number(x),
            RadialExtent::Infinite => ExtentRepr::Word("infinity".into()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub r_min: f64,
    pub r_max: RadialExtent,
    /// Radial nodes of the fine grid; the error estimate uses a grid with half as many.
    pub n_r: usize,
    /// Angular samples per radius for the isotropy check.
    pub n_ang: usize,
    pub scheme: Scheme,
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { r_min: 1e-4, r_max: RadialExtent::Auto, n_r: 256, n_ang: 8, scheme: Scheme::GaussLegendre, tol: 1e-6 }
    }
}

impl QuadratureSpec {
    pub fn with_nodes(mut self, n_r: usize) -> Self {
        self.n_r = n_r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_min.is_finite()) {
            return Err(Error::InvalidSpec(format!("r_min must be positive, got {}", self.r_min)));
        }
        if let RadialExtent::Finite(r) = self.r_max {
            if !(r > self.r_min && r.is_finite()) {
                return Err(Error::InvalidSpec(format!("r_max = {r} must exceed r_min = {}", self.r_min)));
            }
        }
        if self.n_r < 16 {
            return Err(Error::InvalidSpec(format!("n_r must be at least 16, got {}", self.n_r)));
        }
        if self.n_ang == 0 {
            return Err(Error::InvalidSpec("n_ang must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidSpec(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    /// Upper limit for a field with the given breakpoints; `auto_infinite` selects
    /// what `Auto` means.
    pub fn resolve_r_max(&self, breakpoints: &[f64], auto_infinite: bool) -> f64 {
        match self.r_max {
            RadialExtent::Finite(r) => r,
            RadialExtent::Infinite => f64::INFINITY,
            RadialExtent::Auto if auto_infinite => f64::INFINITY,
            RadialExtent::Auto => {
                let outer = breakpoints.iter().copied().fold(REFERENCE_RADIUS, f64::max);
                R_MAX_FACTOR * outer
            }
        }
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Tanh-sinh rule on `[-1, 1]` with `2·half + 1` nodes spanning `|t| ≤ t_max`.
///
/// Returns `(1 + x, 1 − x, w)` so that maps singular at an endpoint never see
/// a rounded-off endpoint.
pub fn tanh_sinh(half: usize, t_max: f64) -> Vec<(f64, f64, f64)> {
    let h = t_max / half as f64;
    (0..=2 * half)
        .map(|k| {
            let t = (k as f64 - half as f64) * h;
            let y = FRAC_PI_2 * t.sinh();
            let ey = (-2.0 * y.abs()).exp();
            // 1 − tanh|y| = 2e^{−2|y|}/(1 + e^{−2|y|})
            let small = 2.0 * ey / (1.0 + ey);
            let big = 2.0 - small;
            let (lo, hi) = if y >= 0.0 { (big, small) } else { (small, big) };
            let c = y.cosh();
            let w = h * FRAC_PI_2 * t.cosh() / (c * c);
            (lo, hi, w)
        })
        .collect()
}

const TANH_SINH_TMAX: f64 = 4.0;

#[derive(Clone, Copy, Debug)]
enum Map {
    /// `r = u`
    Linear,
    /// `r = e^u`
    Log,
    /// `r = 1/u`, `u ∈ (0, 1/a]`
    Inverse,
}

impl Map {
    fn apply(self, u: f64) -> (f64, f64) {
        match self {
            Map::Linear => (u, 1.0),
            Map::Log => {
                let r = u.exp();
                (r, r)
            }
            Map::Inverse => (1.0 / u, 1.0 / (u * u)),
        }
    }
}

struct Segment {
    map: Map,
    u0: f64,
    u1: f64,
}

/// Quadrature nodes on `[a, b]` (or `[a, ∞)`) with panels split at breakpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RadialGrid {
    /// Builds a grid of roughly `n` nodes.
    ///
    /// Segments between breakpoints get uniform panels; the segment beyond the last
    /// breakpoint is log-spaced, and an infinite end is mapped by `r = 1/u`.
    pub fn build(a: f64, b: f64, breakpoints: &[f64], n: usize, scheme: Scheme) -> Result<Self> {
        if !(a >= 0.0 && b > a) {
            return Err(Error::InvalidSpec(format!("empty radial interval [{a}, {b}]")));
        }
        let mut pts = vec![a];
        let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&p| p > a && p < b).collect();
        inner.sort_by(f64::total_cmp);
        let outer_from_breakpoint = !inner.is_empty();
        pts.extend(inner);
        pts.push(b);

        let nseg = pts.len() - 1;
        let segments: Vec<Segment> = (0..nseg)
            .map(|i| {
                let (lo, hi) = (pts[i], pts[i + 1]);
                let last = i + 1 == nseg;
                if hi.is_infinite() {
                    Segment { map: Map::Inverse, u0: 0.0, u1: 1.0 / lo }
                } else if last && outer_from_breakpoint && hi / lo > 4.0 {
                    Segment { map: Map::Log, u0: lo.ln(), u1: hi.ln() }
                } else {
                    Segment { map: Map::Linear, u0: lo, u1: hi }
                }
            })
            .collect();

        let mut nodes = Vec::with_capacity(n + PANEL_ORDER);
        let mut weights = Vec::with_capacity(n + PANEL_ORDER);
        match scheme {
            Scheme::GaussLegendre => {
                let (gx, gw) = gauss_legendre(PANEL_ORDER);
                let panels = (n / PANEL_ORDER).max(nseg);
                for (i, seg) in segments.iter().enumerate() {
                    let count = panels / nseg + usize::from(i < panels % nseg);
                    let du = (seg.u1 - seg.u0) / count as f64;
                    for p in 0..count {
                        let lo = seg.u0 + p as f64 * du;
                        for (x, w) in gx.iter().zip(&gw) {
                            let u = lo + 0.5 * du * (x + 1.0);
                            let (r, jac) = seg.map.apply(u);
                            nodes.push(r);
                            weights.push(0.5 * du * w * jac);
                        }
                    }
                }
            }
            Scheme::TanhSinh => {
                let per = (n / nseg).max(5);
                let half = (per - 1) / 2;
                let rule = tanh_sinh(half, TANH_SINH_TMAX);
                for seg in &segments {
                    let len = seg.u1 - seg.u0;
                    for &(lo, hi, w) in &rule {
                        // measure from the nearer endpoint to keep tiny offsets exact
                        let u = if lo <= hi { seg.u0 + 0.5 * len * lo } else { seg.u1 - 0.5 * len * hi };
                        let (r, jac) = seg.map.apply(u);
                        if !r.is_finite() || w == 0.0 {
                            continue;
                        }
                        nodes.push(r);
                        weights.push(0.5 * len * w * jac);
                    }
                }
            }
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Left-to-right pairwise summation; the association order depends only on the length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        xs.iter().fold(0.0, |acc, x| acc + x)
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// A density value at one radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialSample {
    pub r: f64,
    pub weight: f64,
    pub value: f64,
    /// Relative spread over the angular samples at this radius.
    pub isotropy: f64,
}

/// A radial density sampled on a fine grid and on its half-size companion.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialDensity {
    pub r_min: f64,
    pub r_max: f64,
    pub fine: Vec<RadialSample>,
    pub coarse: Vec<RadialSample>,
}

impl RadialDensity {
    /// Samples `f(r) -> (ρ, isotropy residual)` on both grids, in parallel with
    /// results kept in node order.
    pub fn sample<F>(quad: &QuadratureSpec, r_max: f64, breakpoints: &[f64], f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<(f64, f64)> + Sync,
    {
        quad.validate()?;
        let eval = |grid: RadialGrid| -> Result<Vec<RadialSample>> {
            grid.nodes
                .par_iter()
                .zip(grid.weights.par_iter())
                .map(|(&r, &weight)| {
                    let (value, isotropy) = f(r)?;
                    if !value.is_finite() {
                        return Err(Error::Consistency(format!("density is not finite at r = {r}")));
                    }
                    Ok(RadialSample { r, weight, value, isotropy })
                })
                .collect()
        };
        let fine = eval(RadialGrid::build(quad.r_min, r_max, breakpoints, quad.n_r, quad.scheme)?)?;
        let coarse = eval(RadialGrid::build(quad.r_min, r_max, breakpoints, quad.n_r / 2, quad.scheme)?)?;
        Ok(Self { r_min: quad.r_min, r_max, fine, coarse })
    }

    /// Samples a plain function with no angular structure.
    pub fn from_fn<F>(quad: &QuadratureSpec, r_max: f64, breakpoints: &[f64], f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        Self::sample(quad, r_max, breakpoints, |r| Ok((f(r), 0.0)))
    }

    pub fn max_isotropy_residual(&self) -> f64 {
        self.fine.iter().chain(&self.coarse).map(|s| s.isotropy).fold(0.0, f64::max)
    }
}

fn weighted_sum(samples: &[RadialSample]) -> f64 {
    let terms: Vec<f64> = samples.iter().map(|s| s.weight * s.value).collect();
    pairwise_sum(&terms)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialIntegral {
    pub value: f64,
    pub error_estimate: f64,
    pub nodes: usize,
    pub history: Vec<Refinement>,
}

impl RadialDensity {
    /// Fine-grid value with the fine/coarse difference as error estimate.
    pub fn estimate(&self) -> RadialIntegral {
        let fine = weighted_sum(&self.fine);
        let coarse = weighted_sum(&self.coarse);
        RadialIntegral {
            value: fine,
            error_estimate: (fine - coarse).abs(),
            nodes: self.fine.len(),
            history: vec![
                Refinement { nodes: self.coarse.len(), value: coarse },
                Refinement { nodes: self.fine.len(), value: fine },
            ],
        }
    }
}

/// Integrates a sampled density and enforces the tolerance of `quad`.
pub fn integrate_radial(rho: &RadialDensity, quad: &QuadratureSpec) -> Result<RadialIntegral> {
    let est = rho.estimate();
    if est.error_estimate > quad.tol {
        return Err(Error::Convergence { error_estimate: est.error_estimate, tol: quad.tol, history: est.history });
    }
    Ok(est)
}
