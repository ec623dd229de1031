use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::charclasses::QuadratureSpec;
use crate::error::{Error, Result};
use crate::eta::{Route, SeriesSpec};
use crate::gauge::{InstantonChannel, InstantonData};
use crate::geometry::MetricSpec;
use crate::index::{GravMode, INTEGRALITY_TOL};

/// Verification workflow.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Index,
    Eta,
    GeometryCheck,
    Pontryagin,
    Convergence,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Index => "index",
            Mode::Eta => "eta",
            Mode::GeometryCheck => "geometry-check",
            Mode::Pontryagin => "pontryagin",
            Mode::Convergence => "convergence",
        }
    }
}

/// Which η̂ routes to evaluate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RouteChoice {
    #[value(name = "mode_sum")]
    ModeSum,
    Poisson,
    Bernoulli,
    #[default]
    All,
}

impl RouteChoice {
    pub fn routes(self) -> Vec<Route> {
        match self {
            RouteChoice::ModeSum => vec![Route::ModeSum],
            RouteChoice::Poisson => vec![Route::Poisson],
            RouteChoice::Bernoulli => vec![Route::Bernoulli],
            RouteChoice::All => Route::ALL.to_vec(),
        }
    }

    /// Route whose value goes into the index report; the rest are cross-checks.
    pub fn primary(self) -> Route {
        match self {
            RouteChoice::ModeSum => Route::ModeSum,
            RouteChoice::Poisson => Route::Poisson,
            RouteChoice::Bernoulli | RouteChoice::All => Route::Bernoulli,
        }
    }
}

/// Instanton section: explicit channels or model pairs `[λ, m]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstantonInput {
    Channels { channels: Vec<InstantonChannel> },
    Model { model: Vec<(f64, i64)> },
}

impl InstantonInput {
    pub fn to_data(&self) -> Result<InstantonData> {
        match self {
            InstantonInput::Channels { channels } => InstantonData::new(channels.clone()),
            InstantonInput::Model { model } => InstantonData::model(model),
        }
    }
}

impl From<&InstantonData> for InstantonInput {
    fn from(d: &InstantonData) -> Self {
        InstantonInput::Channels { channels: d.channels.clone() }
    }
}

/// Sample points and sphere radii for `geometry-check`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub points: usize,
    pub seed: u64,
    /// Radii are drawn uniformly from `[r_range[0], r_range[1]]`.
    pub r_range: [f64; 2],
    pub flux_radii: Vec<f64>,
    /// Gauss-Legendre nodes in `cos θ` for the sphere integrals.
    pub flux_nodes: usize,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self { points: 50, seed: 7, r_range: [0.3, 10.0], flux_radii: vec![0.3, 1.0, 10.0], flux_nodes: 32 }
    }
}

/// `(a, s)` grid of the Poisson summation check in `eta` mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoissonGrid {
    pub a: Vec<f64>,
    pub s: Vec<f64>,
}

impl Default for PoissonGrid {
    fn default() -> Self {
        Self { a: vec![0.1, 0.25, 0.5 - 1e-3], s: vec![0.01, 0.1, 1.0] }
    }
}

/// Output directory and file names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub summary: String,
    pub index_report: String,
    pub eta_table: String,
    pub poisson_table: String,
    pub geometry_table: String,
    pub pontryagin_table: String,
    pub convergence_table: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("tn-index-out"),
            summary: "summary.json".into(),
            index_report: "index_report.json".into(),
            eta_table: "eta_routes.csv".into(),
            poisson_table: "poisson_identity.csv".into(),
            geometry_table: "geometry_residuals.csv".into(),
            pontryagin_table: "pontryagin_convergence.csv".into(),
            convergence_table: "convergence_sweep.csv".into(),
        }
    }
}

impl OutputConfig {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }
}

/// A complete run description; every section has defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    /// Required by `index` and `eta`; optional for `geometry-check` and `convergence`.
    pub instanton: Option<InstantonInput>,
    pub metric: MetricSpec,
    pub quad: QuadratureSpec,
    pub series: SeriesSpec,
    pub grav: GravMode,
    pub route: RouteChoice,
    /// Mode tolerance; see [`RunConfig::tolerance`] for the defaults.
    pub tol: Option<f64>,
    /// Grid sizes of the refinement tables.
    pub sizes: Vec<usize>,
    pub geometry: GeometryConfig,
    pub poisson: PoissonGrid,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Index,
            instanton: None,
            metric: MetricSpec::default(),
            quad: QuadratureSpec::default(),
            series: SeriesSpec::default(),
            grav: GravMode::Numeric,
            route: RouteChoice::All,
            tol: None,
            sizes: vec![32, 64, 128, 256],
            geometry: GeometryConfig::default(),
            poisson: PoissonGrid::default(),
            output: OutputConfig::default(),
        }
    }
}

/// Default route-agreement tolerance of `eta` mode.
pub const ROUTE_TOL: f64 = 1e-6;

/// Default tolerance of `pontryagin` and `convergence` against their references.
pub const TARGET_TOL: f64 = 1e-3;

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// `tol` if set, otherwise the mode default: integrality for `index`,
    /// route agreement for `eta`, distance to the reference for `pontryagin`
    /// and `convergence`. `geometry-check` uses fixed bounds.
    pub fn tolerance(&self) -> f64 {
        self.tol.unwrap_or(match self.mode {
            Mode::Index => INTEGRALITY_TOL,
            Mode::Eta => ROUTE_TOL,
            Mode::GeometryCheck | Mode::Pontryagin | Mode::Convergence => TARGET_TOL,
        })
    }

    pub fn instanton_data(&self) -> Result<Option<InstantonData>> {
        self.instanton.as_ref().map(InstantonInput::to_data).transpose()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidSpec(m));
        self.metric.validate()?;
        self.quad.validate()?;
        self.series.validate()?;
        let tol = self.tolerance();
        if !(tol > 0.0 && tol.is_finite()) {
            return fail(format!("tol must be positive and finite, got {tol}"));
        }
        if matches!(self.mode, Mode::Index | Mode::Eta) && self.instanton.is_none() {
            return fail(format!("mode {} needs an instanton section", self.mode.name()));
        }
        self.instanton_data()?;
        if matches!(self.mode, Mode::Pontryagin | Mode::Convergence) {
            if self.sizes.is_empty() {
                return fail("sizes must not be empty".into());
            }
            if let Some(&n) = self.sizes.iter().find(|&&n| n < 16) {
                return fail(format!("grid sizes must be at least 16, got {n}"));
            }
        }
        let g = &self.geometry;
        if g.points == 0 {
            return fail("geometry.points must be at least 1".into());
        }
        let [lo, hi] = g.r_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return fail(format!("geometry.r_range must satisfy 0 < lo ≤ hi < ∞, got [{lo}, {hi}]"));
        }
        if g.flux_radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
            return fail("geometry.flux_radii must be positive".into());
        }
        if g.flux_nodes < 2 {
            return fail("geometry.flux_nodes must be at least 2".into());
        }
        let p = &self.poisson;
        if p.s.iter().any(|&s| !(s > 0.0 && s.is_finite())) || p.a.iter().any(|a| !a.is_finite()) {
            return fail("poisson grid needs finite a and positive s".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn model_shorthand_and_explicit_channels() {
        let c = RunConfig::from_json(r#"{"mode": "eta", "instanton": {"model": [[0.25, 1], [0.6, -2]]}}"#).unwrap();
        let d = c.instanton_data().unwrap().unwrap();
        assert_eq!(d.channels[1], InstantonChannel::model(0.6, -2));
        let c = RunConfig::from_json(r#"{"instanton": {"channels": [{"lambda": 0.3, "mcharge": 0.3, "chern": 0}]}}"#)
            .unwrap();
        assert_eq!(c.instanton_data().unwrap().unwrap().rank(), 1);
    }

    #[test]
    fn unknown_fields_and_modes_are_parse_errors() {
        assert!(matches!(RunConfig::from_json(r#"{"mdoe": "eta"}"#), Err(Error::Json(_))));
        assert!(matches!(RunConfig::from_json(r#"{"mode": "eat"}"#), Err(Error::Json(_))));
        let c = RunConfig::from_json(r#"{"mode": "geometry-check"}"#).unwrap();
        assert_eq!(c.mode, Mode::GeometryCheck);
    }

    #[test]
    fn validation_catches_missing_sections_and_ranges() {
        let c = RunConfig::default();
        assert!(matches!(c.validate(), Err(Error::InvalidSpec(_))));
        let c = RunConfig { mode: Mode::Pontryagin, sizes: vec![8], ..Default::default() };
        assert!(matches!(c.validate(), Err(Error::InvalidSpec(_))));
        let c = RunConfig { mode: Mode::Pontryagin, tol: Some(-1.0), ..Default::default() };
        assert!(c.validate().is_err());
        assert!(RunConfig { mode: Mode::Pontryagin, ..Default::default() }.validate().is_ok());
    }
}
