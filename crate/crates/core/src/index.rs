//! Assembly of the L²-index from bulk, gravitational and boundary terms.
//!
//! Two algebraically equivalent forms are evaluated and compared:
//!
//! ```text
//! ind = bulk + m·(1/192π²)∫tr R∧R − (1/2πi)∮η̂
//! ind = bulk + Σ_j ({λ_j} − ½) Φ_j − ½ Σ_j ({λ_j}² − {λ_j})
//! ```
//!
//! where `Φ_j` is the boundary flux of channel `j`. The `m/12` from the curvature
//! cancels the constant `m/2 · 1/6` inside the η̂ term.

use serde::{Deserialize, Serialize};

use crate::charclasses::{pairwise_sum, pontryagin_integral, QuadratureSpec};
use crate::error::{Error, Result};
use crate::eta::{boundary_channels, eta_integral, BoundaryChannel, Route, SeriesSpec};
use crate::gauge::{boundary_data, bulk_action, InstantonData, LAMBDA_TOL};
use crate::geometry::MetricSpec;

/// Version of the JSON layout of [`IndexReport`].
pub const SCHEMA_VERSION: u32 = 1;

/// Absolute part of the tolerance in the cancellation check.
pub const CANCELLATION_TOL: f64 = 1e-9;

/// Default integrality tolerance.
pub const INTEGRALITY_TOL: f64 = 1e-3;

/// The gravitational constant `(1/192π²)∫ tr R∧R` of the exact d-metric.
pub const GRAV_LEMMA: f64 = 1.0 / 12.0;

/// How the gravitational term is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GravMode {
    /// Use the constant `1/12`.
    Lemma,
    /// Integrate the Pontryagin density of the configured metric.
    #[default]
    Numeric,
}

impl std::str::FromStr for GravMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lemma" => Ok(GravMode::Lemma),
            "numeric" => Ok(GravMode::Numeric),
            _ => Err(format!("unknown grav mode {s:?} (expected lemma or numeric)")),
        }
    }
}

/// Per-channel record in the report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub lambda: f64,
    pub lambda_mod1: f64,
    pub mcharge: f64,
    pub chern: i64,
    pub flux: f64,
}

/// Everything that went into an index evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub schema_version: u32,
    pub rank: usize,
    pub channels: Vec<ChannelReport>,
    pub spectral_gap: f64,
    pub bulk: f64,
    pub bulk_error: f64,
    pub grav_mode: GravMode,
    pub grav: f64,
    pub grav_error: f64,
    pub route: Route,
    pub eta_contribution: f64,
    pub eta_error: f64,
    /// `bulk + grav − eta_contribution`.
    pub index_value: f64,
    /// The closed formula evaluated with the same bulk.
    pub closed_formula: f64,
    pub cancellation_diff: f64,
    pub cancellation_tol: f64,
    pub nearest_integer: i64,
    pub integrality_defect: f64,
    pub integrality_tol: f64,
    pub integral: bool,
    pub metric: MetricSpec,
    pub quadrature: QuadratureSpec,
    pub series: SeriesSpec,
    /// The same assembly repeated with other η̂ routes, if requested.
    #[serde(default)]
    pub route_checks: Vec<RouteCheck>,
}

/// Index recomputed with an alternative η̂ route.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteCheck {
    pub route: Route,
    pub eta_contribution: f64,
    pub eta_error: f64,
    pub index_value: f64,
    /// `|index_value − report.index_value|`.
    pub diff: f64,
    pub agrees: bool,
}

fn fractional(lambda: f64, channel: usize) -> Result<f64> {
    let mu = lambda - lambda.floor();
    if !lambda.is_finite() || mu.min(1.0 - mu) < LAMBDA_TOL {
        return Err(Error::Genericity { channel, lambda, tol: LAMBDA_TOL });
    }
    Ok(mu)
}

/// `bulk + Σ({λ_j} − ½)Φ_j − ½Σ({λ_j}² − {λ_j})`.
pub fn index_formula(channels: &[BoundaryChannel], bulk: f64) -> Result<f64> {
    let mut terms = Vec::with_capacity(2 * channels.len() + 1);
    terms.push(bulk);
    for (j, ch) in channels.iter().enumerate() {
        let mu = fractional(ch.lambda, j)?;
        terms.push((mu - 0.5) * ch.flux);
        terms.push(-0.5 * (mu * mu - mu));
    }
    Ok(pairwise_sum(&terms))
}

/// [`index_formula`] with fluxes taken from the instanton's boundary data.
pub fn index_formula_for(data: &InstantonData, bulk: f64) -> Result<f64> {
    index_formula(&boundary_channels(data)?, bulk)
}

/// Nearest integer (ties to even), the distance to it, and whether it is within `tol`.
pub fn integrality_check(value: f64, tol: f64) -> Result<(i64, f64, bool)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidSpec(format!("integrality tolerance must be positive, got {tol}")));
    }
    if !value.is_finite() {
        return Err(Error::Domain(format!("index value is not finite: {value}")));
    }
    let nearest = value.round_ties_even();
    let defect = (value - nearest).abs();
    Ok((nearest as i64, defect, defect <= tol))
}

/// Options for [`assemble`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssembleOptions {
    pub grav: GravMode,
    pub route: Route,
    pub metric: MetricSpec,
    pub quadrature: QuadratureSpec,
    pub series: SeriesSpec,
    pub integrality_tol: f64,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        Self {
            grav: GravMode::Numeric,
            route: Route::Bernoulli,
            metric: MetricSpec::default(),
            quadrature: QuadratureSpec::default(),
            series: SeriesSpec::default(),
            integrality_tol: INTEGRALITY_TOL,
        }
    }
}

/// Gravitational constant and its error for one unit of rank.
pub fn gravitational_term(mode: GravMode, metric: &MetricSpec, quad: &QuadratureSpec) -> Result<(f64, f64)> {
    match mode {
        GravMode::Lemma => Ok((GRAV_LEMMA, 0.0)),
        GravMode::Numeric => {
            metric.validate()?;
            let p = pontryagin_integral(metric, quad)?;
            Ok((p.value, p.error_estimate + p.tail_bound + p.core_bound))
        }
    }
}

/// Computes every contribution and checks the two forms of the index against each other.
pub fn assemble(data: &InstantonData, opts: &AssembleOptions) -> Result<IndexReport> {
    let bd = boundary_data(data)?;
    let channels = boundary_channels(data)?;
    let m = data.rank() as f64;

    let bulk = bulk_action(data, &opts.quadrature)?;
    let (g1, g1_err) = gravitational_term(opts.grav, &opts.metric, &opts.quadrature)?;
    let grav = m * g1;
    let grav_error = m * g1_err;
    let eta = eta_integral(&channels, opts.route, &opts.series)?;

    let index_value = bulk.value + grav - eta.integrated;
    let closed_formula = index_formula(&channels, bulk.value)?;
    let cancellation_diff = (index_value - closed_formula).abs();
    let cancellation_tol = CANCELLATION_TOL + grav_error + eta.error_estimate;
    if cancellation_diff > cancellation_tol {
        return Err(Error::Cancellation {
            assembled: index_value,
            closed: closed_formula,
            diff: cancellation_diff,
            tol: cancellation_tol,
        });
    }
    let (nearest_integer, integrality_defect, integral) = integrality_check(index_value, opts.integrality_tol)?;

    Ok(IndexReport {
        schema_version: SCHEMA_VERSION,
        rank: data.rank(),
        channels: data
            .channels
            .iter()
            .zip(&bd.lambdas_mod1)
            .zip(&bd.fluxes)
            .map(|((c, &mu), &flux)| ChannelReport {
                lambda: c.lambda,
                lambda_mod1: mu,
                mcharge: c.mcharge,
                chern: c.chern,
                flux,
            })
            .collect(),
        spectral_gap: bd.delta,
        bulk: bulk.value,
        bulk_error: bulk.error_estimate,
        grav_mode: opts.grav,
        grav,
        grav_error,
        route: opts.route,
        eta_contribution: eta.integrated,
        eta_error: eta.error_estimate,
        index_value,
        closed_formula,
        cancellation_diff,
        cancellation_tol,
        nearest_integer,
        integrality_defect,
        integrality_tol: opts.integrality_tol,
        integral,
        metric: opts.metric,
        quadrature: opts.quadrature,
        series: opts.series,
        route_checks: Vec::new(),
    })
}

/// Re-evaluates the η̂ term of `report` by each route and records the resulting
/// index. Agreement means a difference within `CANCELLATION_TOL` plus both η̂ errors.
pub fn cross_check_routes(report: &mut IndexReport, data: &InstantonData, routes: &[Route]) -> Result<()> {
    let channels = boundary_channels(data)?;
    let base = report.bulk + report.grav;
    for &route in routes {
        let eta = eta_integral(&channels, route, &report.series)?;
        let index_value = base - eta.integrated;
        let diff = (index_value - report.index_value).abs();
        report.route_checks.push(RouteCheck {
            route,
            eta_contribution: eta.integrated,
            eta_error: eta.error_estimate,
            index_value,
            diff,
            agrees: diff <= CANCELLATION_TOL + eta.error_estimate + report.eta_error,
        });
    }
    Ok(())
}
