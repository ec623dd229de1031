//! The boundary Dirac family on the Hopf fibration and its η̂-form.
//!
//! On the circle fibre the family `−i(∂_τ − iλ)` has spectrum `{k − λ}`. The
//! η̂-form over the base `S²` has a degree-0 part and a multiple of the volume
//! form; both are carried by [`FormScalar`]. Three routes evaluate it:
//!
//! - [`eta_mode_sum`]: the heat-kernel integral over `u` of the Fourier mode sum
//!   with the curvature `R = −½ vol` inserted as a nilpotent shift,
//! - [`eta_poisson`]: the Poisson-dual sine and cosine series, Abel regularized,
//! - [`eta_bernoulli`]: the Bernoulli closed form `({λ} − ½, B₂({λ})/4)`.

mod form;

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use form::FormScalar;

use crate::charclasses::{csv_error, csv_writer, pairwise_sum, tanh_sinh};
use crate::error::{Error, Result};
use crate::gauge::{boundary_data, InstantonData, LAMBDA_TOL};

/// Cutoffs and tolerances for the series routes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeriesSpec {
    /// Minimum Fourier cutoff; the mode sum widens it where the heat kernel is wide.
    pub k_cutoff: usize,
    /// Minimum number of Poisson terms per Abel level.
    pub p_cutoff: usize,
    pub u_min: f64,
    pub u_max: f64,
    /// Tanh-sinh half-width (nodes per side) of the `u` rule; rounded up to even.
    pub u_nodes: usize,
    pub tol: f64,
}

impl Default for SeriesSpec {
    fn default() -> Self {
        Self { k_cutoff: 50, p_cutoff: 1000, u_min: 1e-4, u_max: 1e4, u_nodes: 400, tol: 1e-8 }
    }
}

impl SeriesSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidSpec(m));
        if self.k_cutoff < 50 {
            return fail(format!("k_cutoff must be at least 50, got {}", self.k_cutoff));
        }
        if self.p_cutoff < 20 {
            return fail(format!("p_cutoff must be at least 20, got {}", self.p_cutoff));
        }
        if !(self.u_min > 0.0 && self.u_min < 1e-3) {
            return fail(format!("u_min must lie in (0, 1e-3), got {}", self.u_min));
        }
        if !(self.u_max > 1e3 && self.u_max.is_finite()) {
            return fail(format!("u_max must exceed 1e3, got {}", self.u_max));
        }
        if self.u_nodes < 16 {
            return fail(format!("u_nodes must be at least 16, got {}", self.u_nodes));
        }
        if !(self.tol > 0.0) {
            return fail(format!("tolerance must be positive, got {}", self.tol));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    ModeSum,
    Poisson,
    Bernoulli,
}

impl Route {
    pub const ALL: [Route; 3] = [Route::ModeSum, Route::Poisson, Route::Bernoulli];

    pub fn name(self) -> &'static str {
        match self {
            Route::ModeSum => "mode_sum",
            Route::Poisson => "poisson",
            Route::Bernoulli => "bernoulli",
        }
    }
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn check_generic(lambda: f64) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(Error::InvalidSpec(format!("λ must be finite, got {lambda}")));
    }
    let mu = lambda - lambda.floor();
    if mu.min(1.0 - mu) < LAMBDA_TOL {
        return Err(Error::Genericity { channel: 0, lambda, tol: LAMBDA_TOL });
    }
    Ok(mu)
}

/// Eigenvalues `k − λ` for `|k| ≤ K`, ascending.
pub fn vertical_spectrum(lambda: f64, k: usize) -> Result<Vec<f64>> {
    check_generic(lambda)?;
    let k = k as i64;
    Ok((-k..=k).map(|j| j as f64 - lambda).collect())
}

/// `B₂(μ) = μ² − μ + 1/6`.
pub fn bernoulli2(mu: f64) -> f64 {
    mu * mu - mu + 1.0 / 6.0
}

/// Closed form: `a0 = {λ} − ½`, `a2 = B₂({λ})/4`.
pub fn eta_bernoulli(lambda: f64) -> Result<FormScalar> {
    let mu = check_generic(lambda)?;
    Ok(FormScalar::new(mu - 0.5, 0.25 * bernoulli2(mu)))
}

/// A route value with its error estimate (componentwise).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteValue {
    pub value: FormScalar,
    pub error: FormScalar,
}

fn mode_sums(lambda: f64, u: f64, k_min: usize) -> (f64, f64) {
    let kmax = (k_min as f64).max((lambda.abs() + 9.0 / u.sqrt()).ceil()) as i64;
    let mut s0 = Vec::with_capacity(2 * kmax as usize + 1);
    let mut s2 = Vec::with_capacity(2 * kmax as usize + 1);
    for k in -kmax..=kmax {
        let x = k as f64 - lambda;
        let ux2 = u * x * x;
        let e = (-ux2).exp();
        s0.push(x * e);
        s2.push((1.0 - 2.0 * ux2) * e);
    }
    (pairwise_sum(&s0), pairwise_sum(&s2) / (8.0 * u))
}

/// Bounds on the neglected `u < u_min` and `u > u_max` parts of both components.
fn mode_sum_tails(lambda: f64, s: &SeriesSpec) -> (f64, f64) {
    let kernel = |u: f64| 1.0 / (2.0 * (PI * u).sqrt());

    // Poisson-dual sides are O(u^{-3/2} e^{−π²/u}), increasing on (0, u_min]
    let u0 = s.u_min;
    let dual = 8.0 * PI.powf(2.5) * u0.powf(-1.5) * (-PI * PI / u0).exp();
    let small0 = u0 * kernel(u0) * dual;
    let small2 = u0 * kernel(u0) * dual / (8.0 * u0);

    // for u ≥ U every term decays at least like e^{−(u−U)x²}
    let big_u = s.u_max;
    let kmax = (s.k_cutoff as i64).max(lambda.abs().ceil() as i64 + 60);
    let mut t0 = 0.0;
    let mut t2 = 0.0;
    for k in -kmax..=kmax {
        let x = (k as f64 - lambda).abs();
        t0 += x * (-big_u * x * x).exp() / (x * x);
        t2 += 2.0 * (-0.5 * big_u * x * x).exp() * 2.0 / (x * x);
    }
    let large0 = kernel(big_u) * t0;
    let large2 = t2 / (16.0 * PI.sqrt() * big_u.powf(1.5));
    (small0 + large0, small2 + large2)
}

/// The mode-sum route: `(1/√π)∫₀^∞ Σ_k X e^{−uX²} du/(2√u)` with `X = (k − λ) + i vol/(8u)`.
pub fn eta_mode_sum_detailed(lambda: f64, s: &SeriesSpec) -> Result<RouteValue> {
    check_generic(lambda)?;
    s.validate()?;
    let half = s.u_nodes + s.u_nodes % 2;
    let rule = tanh_sinh(half, 4.0);
    let (t0, t1) = (s.u_min.ln(), s.u_max.ln());
    let len = t1 - t0;
    let terms: Vec<(f64, f64, bool)> = rule
        .par_iter()
        .enumerate()
        .map(|(i, &(lo, hi, w))| {
            let t = if lo <= hi { t0 + 0.5 * len * lo } else { t1 - 0.5 * len * hi };
            let u = t.exp();
            let (a0, a2) = mode_sums(lambda, u, s.k_cutoff);
            // du = u dt, kernel 1/(2√(πu))
            let jac = 0.5 * len * w * u / (2.0 * (PI * u).sqrt());
            (jac * a0, jac * a2, i % 2 == 0)
        })
        .collect();
    let fine0: Vec<f64> = terms.iter().map(|t| t.0).collect();
    let fine2: Vec<f64> = terms.iter().map(|t| t.1).collect();
    let coarse0: Vec<f64> = terms.iter().filter(|t| t.2).map(|t| 2.0 * t.0).collect();
    let coarse2: Vec<f64> = terms.iter().filter(|t| t.2).map(|t| 2.0 * t.1).collect();
    let value = FormScalar::new(pairwise_sum(&fine0), pairwise_sum(&fine2));
    let quad = FormScalar::new((value.a0 - pairwise_sum(&coarse0)).abs(), (value.a2 - pairwise_sum(&coarse2)).abs());
    let (tail0, tail2) = mode_sum_tails(lambda, s);
    let error = FormScalar::new(quad.a0 + tail0, quad.a2 + tail2);
    if error.a0.max(error.a2) > s.tol {
        return Err(Error::SeriesNonConvergence {
            lambda,
            quadrature: quad.a0.max(quad.a2),
            tail: tail0.max(tail2),
            tol: s.tol,
        });
    }
    Ok(RouteValue { value, error })
}

pub fn eta_mode_sum(lambda: f64, s: &SeriesSpec) -> Result<FormScalar> {
    eta_mode_sum_detailed(lambda, s).map(|r| r.value)
}

/// `(sin 2πx, cos 2πx)` with exact zeros at half and quarter periods.
fn sincos_2pi(x: f64) -> (f64, f64) {
    // reduce to [−½, ½), then fold into [−¼, ¼] by reflection
    let y = x - x.round();
    let (z, sign_c) = if y > 0.25 {
        (0.5 - y, -1.0)
    } else if y < -0.25 {
        (-0.5 - y, -1.0)
    } else {
        (y, 1.0)
    };
    let c = (2.0 * PI * (0.25 - z.abs())).sin();
    ((2.0 * PI * z).sin(), sign_c * c)
}

/// Abel sums `Σ_{p≥1} q^p sin(2πpλ)/p` and `Σ q^p cos(2πpλ)/p²` with `q = 1 − h`.
fn abel_sums(lambda: f64, h: f64, p_min: usize) -> (f64, f64) {
    let q = 1.0 - h;
    let p_max = p_min.max((40.0 / h).ceil() as usize);
    let mut sines = Vec::with_capacity(p_max);
    let mut cosines = Vec::with_capacity(p_max);
    let mut qp = 1.0;
    for p in 1..=p_max {
        qp *= q;
        let pf = p as f64;
        let (sn, cs) = sincos_2pi(pf * lambda);
        sines.push(qp * sn / pf);
        cosines.push(qp * cs / (pf * pf));
    }
    (pairwise_sum(&sines), pairwise_sum(&cosines))
}

/// Neville extrapolation to `h = 0`; returns the value and the change of the last step.
fn extrapolate(hs: &[f64], vals: &[f64]) -> (f64, f64) {
    let n = hs.len();
    let mut t = vals.to_vec();
    let mut prev = t[n - 1];
    let mut last = t[n - 1];
    for m in 1..n {
        for i in 0..n - m {
            t[i] = (hs[i] * t[i + 1] - hs[i + m] * t[i]) / (hs[i] - hs[i + m]);
        }
        prev = last;
        last = t[0];
    }
    (last, (last - prev).abs())
}

/// The Poisson-dual route: `a0 = −Σ sin(2πpλ)/(πp)`, `a2 = ¼Σ cos(2πpλ)/(π²p²)`,
/// Abel-regularized with `q → 1` extrapolation.
pub fn eta_poisson_detailed(lambda: f64, s: &SeriesSpec) -> Result<RouteValue> {
    check_generic(lambda)?;
    s.validate()?;
    let hs: Vec<f64> = (0..6).map(|j| 1.0 / (32.0 * 2f64.powi(j))).collect();
    let sums: Vec<(f64, f64)> = hs.par_iter().map(|&h| abel_sums(lambda, h, s.p_cutoff)).collect();
    let sin: Vec<f64> = sums.iter().map(|s| s.0).collect();
    let cos: Vec<f64> = sums.iter().map(|s| s.1).collect();
    let (sv, se) = extrapolate(&hs, &sin);
    let (cv, ce) = extrapolate(&hs, &cos);
    Ok(RouteValue {
        value: FormScalar::new(-sv / PI, 0.25 * cv / (PI * PI)),
        error: FormScalar::new(se / PI, 0.25 * ce / (PI * PI)),
    })
}

pub fn eta_poisson(lambda: f64, s: &SeriesSpec) -> Result<FormScalar> {
    eta_poisson_detailed(lambda, s).map(|r| r.value)
}

/// Plain partial sums of the Poisson series up to `p`, without regularization.
pub fn poisson_partial_sums(lambda: f64, p: usize) -> FormScalar {
    let mut s = 0.0;
    let mut c = 0.0;
    for k in 1..=p {
        let kf = k as f64;
        let (sn, cs) = sincos_2pi(kf * lambda);
        s += sn / kf;
        c += cs / (kf * kf);
    }
    FormScalar::new(-s / PI, 0.25 * c / (PI * PI))
}

pub fn eta_route(lambda: f64, route: Route, s: &SeriesSpec) -> Result<RouteValue> {
    match route {
        Route::ModeSum => eta_mode_sum_detailed(lambda, s),
        Route::Poisson => eta_poisson_detailed(lambda, s),
        Route::Bernoulli => {
            Ok(RouteValue { value: eta_bernoulli(lambda)?, error: FormScalar::new(f64::EPSILON, f64::EPSILON) })
        }
    }
}

/// Boundary data of one channel as consumed by the η̂ integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryChannel {
    pub lambda: f64,
    /// `(1/2πi)∮ F^E` over the sphere at infinity.
    pub flux: f64,
}

impl BoundaryChannel {
    pub fn new(lambda: f64, flux: f64) -> Self {
        Self { lambda, flux }
    }
}

/// Boundary channels of an instanton.
pub fn boundary_channels(data: &InstantonData) -> Result<Vec<BoundaryChannel>> {
    let bd = boundary_data(data)?;
    Ok(data.channels.iter().zip(&bd.fluxes).map(|(c, &flux)| BoundaryChannel::new(c.lambda, flux)).collect())
}

/// `(1/2πi)∮ η̂ ∧ e^{−F^E}` for one channel: `2 a2 − a0 Φ`.
pub fn channel_integral(eta: FormScalar, flux: f64) -> f64 {
    2.0 * eta.a2 - eta.a0 * flux
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaResult {
    pub route: Route,
    pub channels: Vec<FormScalar>,
    /// Integral over the sphere at infinity, summed over channels.
    pub integrated: f64,
    pub error_estimate: f64,
}

pub fn eta_integral(channels: &[BoundaryChannel], route: Route, s: &SeriesSpec) -> Result<EtaResult> {
    let mut forms = Vec::with_capacity(channels.len());
    let mut parts = Vec::with_capacity(channels.len());
    let mut errs = Vec::with_capacity(channels.len());
    for (j, ch) in channels.iter().enumerate() {
        let rv = eta_route(ch.lambda, route, s).map_err(|e| match e {
            Error::Genericity { lambda, tol, .. } => Error::Genericity { channel: j, lambda, tol },
            other => other,
        })?;
        forms.push(rv.value);
        parts.push(channel_integral(rv.value, ch.flux));
        errs.push(2.0 * rv.error.a2 + rv.error.a0 * ch.flux.abs());
    }
    Ok(EtaResult { route, channels: forms, integrated: pairwise_sum(&parts), error_estimate: pairwise_sum(&errs) })
}

/// η̂ integral for an instanton, with fluxes from its boundary data.
pub fn eta_integral_for(data: &InstantonData, route: Route, s: &SeriesSpec) -> Result<EtaResult> {
    eta_integral(&boundary_channels(data)?, route, s)
}

/// Both sides of `Σ_k (k+a) e^{−4π²s(k+a)²} = Σ_{p≥1} 2p sin(2πpa) (4πs)^{−3/2} e^{−p²/(4s)}`.
pub fn poisson_check(a: f64, s_param: f64, k: usize, p: usize) -> Result<(f64, f64)> {
    if !(s_param > 0.0 && s_param.is_finite()) {
        return Err(Error::InvalidSpec(format!("s must be positive, got {s_param}")));
    }
    let k = k as i64;
    let lhs: Vec<f64> = (-k..=k)
        .map(|j| {
            let x = j as f64 + a;
            x * (-4.0 * PI * PI * s_param * x * x).exp()
        })
        .collect();
    let pref = (4.0 * PI * s_param).powf(-1.5);
    let rhs: Vec<f64> = (1..=p)
        .map(|q| {
            let qf = q as f64;
            2.0 * qf * sincos_2pi(qf * a).0 * pref * (-qf * qf / (4.0 * s_param)).exp()
        })
        .collect();
    Ok((pairwise_sum(&lhs), pairwise_sum(&rhs)))
}

/// One row of the route-comparison table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaRow {
    pub lambda: f64,
    pub route: Route,
    pub a0: f64,
    pub a2coeff: f64,
    /// Per-channel contribution `2 a2 − a0 Φ`.
    pub integrated: f64,
    pub error: f64,
}

/// Evaluates every requested route for every channel.
pub fn route_table(channels: &[BoundaryChannel], routes: &[Route], s: &SeriesSpec) -> Result<Vec<EtaRow>> {
    let mut rows = Vec::new();
    for ch in channels {
        for &route in routes {
            let rv = eta_route(ch.lambda, route, s)?;
            rows.push(EtaRow {
                lambda: ch.lambda,
                route,
                a0: rv.value.a0,
                a2coeff: rv.value.a2,
                integrated: channel_integral(rv.value, ch.flux),
                error: rv.error.a0.max(rv.error.a2),
            });
        }
    }
    Ok(rows)
}

/// Writes rows as CSV with columns `lambda,route,a0,a2coeff,integrated,error`.
pub fn write_eta_csv<W: Write>(rows: &[EtaRow], w: W) -> Result<()> {
    let mut out = csv_writer(w);
    if rows.is_empty() {
        out.write_record(["lambda", "route", "a0", "a2coeff", "integrated", "error"]).map_err(csv_error)?;
    }
    for row in rows {
        out.serialize(row).map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const LAMBDAS: [f64; 5] = [0.1, 0.25, 0.4, 0.6, 0.9];

    #[test]
    fn reduced_trig_matches_std() {
        for x in [0.0, 0.1, 0.25, 0.3, 0.5, 0.77, 1.5, -0.4, 12.345] {
            let (s, c) = sincos_2pi(x);
            assert!((s - (2.0 * PI * x).sin()).abs() < 1e-13);
            assert!((c - (2.0 * PI * x).cos()).abs() < 1e-13);
        }
        assert_eq!(sincos_2pi(0.5).0, 0.0);
        assert_eq!(sincos_2pi(7.5).0, 0.0);
        assert_eq!(sincos_2pi(0.25).1, 0.0);
    }

    #[test]
    fn spectrum_examples() {
        assert_eq!(vertical_spectrum(0.25, 1).unwrap(), vec![-1.25, -0.25, 0.75]);
        let s = vertical_spectrum(0.25, 50).unwrap();
        assert_eq!(s.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min), 0.25);
        // λ + 1 shifts the window by one index
        let a = vertical_spectrum(0.25, 5).unwrap();
        let b = vertical_spectrum(1.25, 5).unwrap();
        assert_eq!(&a[..10], &b[1..]);
        assert!(vertical_spectrum(3.0, 4).is_err());
    }

    #[test]
    fn bernoulli_examples() {
        let e = eta_bernoulli(0.5).unwrap();
        assert_eq!(e.a0, 0.0);
        assert_relative_eq!(4.0 * e.a2, -1.0 / 12.0, epsilon = 1e-16);
        let e = eta_bernoulli(0.25).unwrap();
        assert_eq!(e.a0, -0.25);
        assert_relative_eq!(4.0 * e.a2, -1.0 / 48.0, epsilon = 1e-16);
        assert_eq!(eta_bernoulli(1.25).unwrap(), e);
        assert!(matches!(eta_bernoulli(2.0), Err(Error::Genericity { .. })));
    }

    #[test]
    fn mode_sum_agrees_with_bernoulli() {
        let s = SeriesSpec::default();
        for l in LAMBDAS {
            let m = eta_mode_sum_detailed(l, &s).unwrap();
            let b = eta_bernoulli(l).unwrap();
            assert!((m.value.a0 - b.a0).abs() < 1e-9, "λ = {l}: {:?} vs {b:?}", m.value);
            assert!((m.value.a2 - b.a2).abs() < 1e-9, "λ = {l}: {:?} vs {b:?}", m.value);
            assert!(m.error.a0 < 1e-8 && m.error.a2 < 1e-8);
        }
        assert!(eta_mode_sum(0.5, &s).unwrap().a0.abs() < 1e-12);
    }

    #[test]
    fn poisson_agrees_with_bernoulli() {
        let s = SeriesSpec::default();
        for l in LAMBDAS {
            let p = eta_poisson_detailed(l, &s).unwrap();
            let b = eta_bernoulli(l).unwrap();
            assert!((p.value.a0 - b.a0).abs() < 1e-9, "λ = {l}: {:?} vs {b:?}", p.value);
            assert!((p.value.a2 - b.a2).abs() < 1e-9, "λ = {l}: {:?} vs {b:?}", p.value);
        }
        assert_eq!(eta_poisson(0.5, &s).unwrap().a0, 0.0);
    }

    #[test]
    fn basel_sum_at_zero() {
        // ¼ Σ 1/(π²p²) = 1/24
        let e = poisson_partial_sums(0.0, 200_000);
        assert_relative_eq!(e.a2, 1.0 / 24.0, epsilon = 1e-6);
    }

    #[test]
    fn partial_sums_oscillate_about_the_limit() {
        let b = eta_bernoulli(0.25).unwrap();
        let e = poisson_partial_sums(0.25, 1000);
        assert!((e.a0 - b.a0).abs() < 1e-3);
    }

    #[test]
    fn reflection_symmetry() {
        let s = SeriesSpec::default();
        for l in LAMBDAS {
            for route in Route::ALL {
                let a = eta_route(l, route, &s).unwrap().value;
                let b = eta_route(1.0 - l, route, &s).unwrap().value;
                assert!((a.a0 + b.a0).abs() < 1e-9, "{route}: {l}");
                assert!((a.a2 - b.a2).abs() < 1e-9, "{route}: {l}");
            }
        }
    }

    #[test]
    fn integral_examples() {
        let s = SeriesSpec::default();
        let r = eta_integral(&[BoundaryChannel::new(0.25, 0.0)], Route::Bernoulli, &s).unwrap();
        assert_relative_eq!(r.integrated, -1.0 / 96.0, epsilon = 1e-15);
        let r = eta_integral(&[BoundaryChannel::new(0.5, 3.0)], Route::Bernoulli, &s).unwrap();
        assert_relative_eq!(r.integrated, -1.0 / 24.0, epsilon = 1e-15);
        let chans = [BoundaryChannel::new(0.25, 1.0), BoundaryChannel::new(0.75, -1.0)];
        for route in Route::ALL {
            let r = eta_integral(&chans, route, &s).unwrap();
            assert_relative_eq!(r.integrated, 0.5 - 1.0 / 48.0, epsilon = 1e-8);
        }
        let r = eta_integral(&[BoundaryChannel::new(0.25, 0.0)], Route::ModeSum, &s).unwrap();
        assert_relative_eq!(r.integrated, -1.0 / 96.0, epsilon = 1e-8);
    }

    #[test]
    fn genericity_error_names_channel() {
        let chans = [BoundaryChannel::new(0.25, 0.0), BoundaryChannel::new(1.0, 0.0)];
        match eta_integral(&chans, Route::Bernoulli, &SeriesSpec::default()) {
            Err(Error::Genericity { channel, .. }) => assert_eq!(channel, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn poisson_identity_examples() {
        let (l, r) = poisson_check(0.0, 0.3, 50, 20).unwrap();
        assert!(l.abs() < 1e-15 && r == 0.0);
        let (l, r) = poisson_check(0.25, 0.02, 50, 20).unwrap();
        assert!((l - r).abs() < 1e-10);
        let (l2, r2) = poisson_check(1.25, 0.02, 50, 20).unwrap();
        assert!((l - l2).abs() < 1e-12 && (r - r2).abs() < 1e-12);
    }

    #[test]
    fn series_spec_limits() {
        assert!(SeriesSpec { k_cutoff: 10, ..Default::default() }.validate().is_err());
        assert!(SeriesSpec { p_cutoff: 10, ..Default::default() }.validate().is_err());
        assert!(SeriesSpec { u_min: 1e-2, ..Default::default() }.validate().is_err());
        assert!(SeriesSpec { u_max: 100.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn eta_csv_layout() {
        let rows =
            [EtaRow { lambda: 0.5, route: Route::Bernoulli, a0: 0.0, a2coeff: -0.25, integrated: 1.5, error: 0.0 }];
        let mut buf = Vec::new();
        write_eta_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "lambda,route,a0,a2coeff,integrated,error\n0.5,bernoulli,0.0,-0.25,1.5,0.0\n"
        );
    }
}
