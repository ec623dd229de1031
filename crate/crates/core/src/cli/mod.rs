//! Configuration, run orchestration and report emission for `tn-index`.
//!
//! A run reads one JSON [`RunConfig`], executes the selected [`Mode`] and writes
//! its tables plus a `summary.json` listing every assertion. The process exits
//! with 0 when all assertions pass, 1 on a numerical failure or a failed
//! assertion, 2 on a parse error and 3 on a validation error. Errors are
//! reported on stderr as one JSON object `{"kind": ..., "message": ...}`.

mod config;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use config::{
    GeometryConfig, InstantonInput, Mode, OutputConfig, PoissonGrid, RouteChoice, RunConfig, ROUTE_TOL, TARGET_TOL,
};

use crate::charclasses::{convergence_table, csv_error, csv_writer, write_convergence_csv, ConvergenceRow};
use crate::error::{Error, Result};
use crate::eta::{boundary_channels, eta_bernoulli, poisson_check, route_table, write_eta_csv, Route};
use crate::gauge::{bulk_closed_form, bulk_convergence, field_strength_auto, Duality, InstantonData};
use crate::geometry::checks::{point_residuals, sphere_flux};
use crate::geometry::{MetricSpec, MetricVariant, Point};
use crate::index::{assemble, cross_check_routes, AssembleOptions, GRAV_LEMMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

/// Version of the summary, report and CSV layouts.
pub const SCHEMA_VERSION: u32 = crate::index::SCHEMA_VERSION;

/// Bound on `|lhs − rhs|` of the Poisson summation check.
pub const POISSON_TOL: f64 = 1e-10;
/// Bound on `max |⋆⋆e − e|`.
pub const HODGE_TOL: f64 = 1e-12;
/// Bound on the orthonormal-frame residual.
pub const FRAME_TOL: f64 = 1e-12;
/// Bound on `‖Ric‖` from exact derivatives.
pub const RICCI_DUAL_TOL: f64 = 1e-10;
/// Bound on `max |dω − ⋆₃dV|`.
pub const D_OMEGA_TOL: f64 = 1e-10;
/// Bound on `|∮dω + 2π|`.
pub const FLUX_TOL: f64 = 1e-6;
/// Bound on the relative duality defect of model fields.
pub const DUALITY_TOL: f64 = 1e-8;

/// One checked inequality `value ≤ bound` (or a boolean condition encoded as 0/1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Assertion {
    fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, pass: value <= bound }
    }

    fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), value: if ok { 0.0 } else { 1.0 }, bound: 0.0, pass: ok }
    }
}

/// Contents of `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub mode: Mode,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
    /// File names written, relative to the output directory.
    pub outputs: Vec<String>,
}

impl RunSummary {
    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.pass)
    }
}

/// Row of the `geometry-check` residual table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryRow {
    pub check: String,
    pub point: Option<usize>,
    pub r: f64,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub tau: Option<f64>,
    pub residual: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Row of the Poisson identity table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonRow {
    pub a: f64,
    pub s: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
}

/// Row of the `convergence` sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub quantity: String,
    #[serde(rename = "N_r")]
    pub n_r: usize,
    pub value: f64,
    pub error_estimate: f64,
    pub reference: f64,
    pub abs_error: f64,
}

/// Writes any serializable rows as CSV; the header is emitted even for no rows.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], header: &[&str], w: W) -> Result<()> {
    let mut out = csv_writer(w);
    if rows.is_empty() {
        out.write_record(header).map_err(csv_error)?;
    }
    for row in rows {
        out.serialize(row).map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

struct Outputs<'a> {
    cfg: &'a OutputConfig,
    written: Vec<String>,
}

impl<'a> Outputs<'a> {
    fn new(cfg: &'a OutputConfig) -> Result<Self> {
        fs::create_dir_all(&cfg.dir)?;
        Ok(Self { cfg, written: Vec::new() })
    }

    fn bytes(&mut self, name: &str, data: &[u8]) -> Result<()> {
        fs::write(self.cfg.path(name), data)?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.bytes(name, text.as_bytes())
    }

    fn csv<T: Serialize>(&mut self, name: &str, rows: &[T], header: &[&str]) -> Result<()> {
        let mut buf = Vec::new();
        write_csv(rows, header, &mut buf)?;
        self.bytes(name, &buf)
    }
}

/// Validates `config`, executes its mode and writes the outputs.
///
/// Returns the summary whether or not the assertions pass; numerical failures
/// that prevent a result are returned as errors.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let mut out = Outputs::new(&config.output)?;
    let assertions = match config.mode {
        Mode::Index => run_index(config, &mut out)?,
        Mode::Eta => run_eta(config, &mut out)?,
        Mode::GeometryCheck => run_geometry(config, &mut out)?,
        Mode::Pontryagin => run_pontryagin(config, &mut out)?,
        Mode::Convergence => run_convergence(config, &mut out)?,
    };
    let mut summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        mode: config.mode,
        passed: assertions.iter().all(|a| a.pass),
        assertions,
        outputs: out.written.clone(),
    };
    summary.outputs.push(config.output.summary.clone());
    out.json(&config.output.summary, &summary)?;
    Ok(summary)
}

fn required_instanton(config: &RunConfig) -> Result<InstantonData> {
    config
        .instanton_data()?
        .ok_or_else(|| Error::InvalidSpec(format!("mode {} needs an instanton section", config.mode.name())))
}

fn run_index(config: &RunConfig, out: &mut Outputs) -> Result<Vec<Assertion>> {
    let data = required_instanton(config)?;
    let opts = AssembleOptions {
        grav: config.grav,
        route: config.route.primary(),
        metric: config.metric,
        quadrature: config.quad,
        series: config.series,
        integrality_tol: config.tolerance(),
    };
    let mut report = assemble(&data, &opts)?;
    let others: Vec<Route> = config.route.routes().into_iter().filter(|&r| r != opts.route).collect();
    cross_check_routes(&mut report, &data, &others)?;

    let mut a = vec![
        Assertion::at_most("cancellation", report.cancellation_diff, report.cancellation_tol),
        Assertion::at_most("integrality", report.integrality_defect, report.integrality_tol),
    ];
    for c in &report.route_checks {
        a.push(Assertion::at_most(
            format!("route_agreement[{}]", c.route),
            c.diff,
            crate::index::CANCELLATION_TOL + c.eta_error + report.eta_error,
        ));
    }
    out.json(&config.output.index_report, &report)?;
    Ok(a)
}

fn run_eta(config: &RunConfig, out: &mut Outputs) -> Result<Vec<Assertion>> {
    let data = required_instanton(config)?;
    let channels = boundary_channels(&data)?;
    let routes = config.route.routes();
    let rows = route_table(&channels, &routes, &config.series)?;
    let tol = config.tolerance();
    let mut a = Vec::new();
    for row in rows.iter().filter(|r| r.route != Route::Bernoulli) {
        let exact = eta_bernoulli(row.lambda)?;
        let diff = (row.a0 - exact.a0).abs().max((row.a2coeff - exact.a2).abs());
        a.push(Assertion::at_most(format!("route_agreement[{}, λ={}]", row.route, row.lambda), diff, tol));
    }
    let mut buf = Vec::new();
    write_eta_csv(&rows, &mut buf)?;
    out.bytes(&config.output.eta_table, &buf)?;

    let mut prow = Vec::new();
    for &av in &config.poisson.a {
        for &sv in &config.poisson.s {
            let (lhs, rhs) = poisson_check(av, sv, config.series.k_cutoff, config.series.p_cutoff)?;
            let abs_diff = (lhs - rhs).abs();
            a.push(Assertion::at_most(format!("poisson_identity[a={av}, s={sv}]"), abs_diff, POISSON_TOL));
            prow.push(PoissonRow { a: av, s: sv, lhs, rhs, abs_diff });
        }
    }
    out.csv(&config.output.poisson_table, &prow, &["a", "s", "lhs", "rhs", "abs_diff"])?;
    Ok(a)
}

/// Deterministic sample points with `r` uniform in `r_range`, `cos θ`, `φ`
/// and `τ` uniform.
pub fn sample_points(g: &GeometryConfig) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let [lo, hi] = g.r_range;
    (0..g.points)
        .map(|_| {
            let r = if hi > lo { rng.gen_range(lo..hi) } else { lo };
            let theta = rng.gen_range(-1.0f64..1.0).acos();
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let tau = rng.gen_range(0.0..std::f64::consts::TAU);
            Point::from_polar(r, theta, phi, tau)
        })
        .collect()
}

fn run_geometry(config: &RunConfig, out: &mut Outputs) -> Result<Vec<Assertion>> {
    let spec = MetricSpec { variant: MetricVariant::TaubNut, ..config.metric };
    let points = sample_points(&config.geometry);
    let mut rows = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let (r, theta, phi) = p.polar();
        let res = point_residuals(&spec, p)?;
        let mut push = |check: &str, residual: f64, bound: f64| {
            rows.push(GeometryRow {
                check: check.into(),
                point: Some(i),
                r,
                theta: Some(theta),
                phi: Some(phi),
                tau: Some(p.tau),
                residual,
                bound,
                pass: residual < bound,
            })
        };
        push("ricci_central", res.ricci_central, res.ricci_central_bound);
        push("ricci_dual", res.ricci_dual, RICCI_DUAL_TOL);
        push("hodge_involution", res.hodge_involution, HODGE_TOL);
        push("frame", res.frame, FRAME_TOL);
        push("d_omega_star_dv", res.d_omega_star_dv, D_OMEGA_TOL);
    }
    for &radius in &config.geometry.flux_radii {
        let flux = sphere_flux(radius, config.geometry.flux_nodes)?;
        let residual = (flux + std::f64::consts::TAU).abs();
        rows.push(GeometryRow {
            check: "sphere_flux".into(),
            point: None,
            r: radius,
            theta: None,
            phi: None,
            tau: None,
            residual,
            bound: FLUX_TOL,
            pass: residual < FLUX_TOL,
        });
    }

    let mut a = Vec::new();
    for check in ["ricci_central", "ricci_dual", "hodge_involution", "frame", "d_omega_star_dv", "sphere_flux"] {
        let sel: Vec<&GeometryRow> = rows.iter().filter(|r| r.check == check).collect();
        if sel.is_empty() {
            continue;
        }
        // worst ratio to its own bound
        let worst = sel.iter().map(|r| r.residual / r.bound).fold(0.0, f64::max);
        a.push(Assertion::at_most(format!("{check} (max residual/bound)"), worst, 1.0));
        let all = sel.iter().all(|r| r.pass);
        if !all {
            a.push(Assertion::holds(format!("{check} at every sample"), false));
        }
    }

    if let Some(data) = config.instanton_data()? {
        for (j, ch) in data.channels.iter().enumerate() {
            let mut kinds = Vec::new();
            for (i, p) in points.iter().enumerate() {
                let fs = field_strength_auto(ch, p)?;
                let (r, theta, phi) = p.polar();
                let defect = fs.relative_defect();
                rows.push(GeometryRow {
                    check: format!("duality[{j}]"),
                    point: Some(i),
                    r,
                    theta: Some(theta),
                    phi: Some(phi),
                    tau: Some(p.tau),
                    residual: defect,
                    bound: DUALITY_TOL,
                    pass: defect < DUALITY_TOL,
                });
                kinds.push(fs.duality(DUALITY_TOL));
            }
            let worst =
                rows.iter().filter(|r| r.check == format!("duality[{j}]")).map(|r| r.residual).fold(0.0, f64::max);
            a.push(Assertion::at_most(format!("duality[{j}] max relative defect"), worst, DUALITY_TOL));
            let constant = kinds.windows(2).all(|w| w[0] == w[1]) && kinds.first() != Some(&Duality::Neither);
            a.push(Assertion::holds(format!("duality[{j}] type constant ({:?})", kinds[0]), constant));
        }
    }

    out.csv(
        &config.output.geometry_table,
        &rows,
        &["check", "point", "r", "theta", "phi", "tau", "residual", "bound", "pass"],
    )?;
    Ok(a)
}

fn pontryagin_rows(config: &RunConfig) -> Result<Vec<ConvergenceRow>> {
    convergence_table(&config.metric, &config.quad, &config.sizes)
}

fn run_pontryagin(config: &RunConfig, out: &mut Outputs) -> Result<Vec<Assertion>> {
    let rows = pontryagin_rows(config)?;
    let last = rows.last().copied().ok_or_else(|| Error::InvalidSpec("sizes must not be empty".into()))?;
    let a = vec![
        Assertion::at_most("|value - 1/12| at the finest grid", (last.value - GRAV_LEMMA).abs(), config.tolerance()),
        Assertion::at_most("tail bound", last.tail_bound, config.quad.tol),
    ];
    let mut buf = Vec::new();
    write_convergence_csv(&rows, &mut buf)?;
    out.bytes(&config.output.pontryagin_table, &buf)?;
    Ok(a)
}

fn sweep_rows(quantity: &str, rows: &[ConvergenceRow], reference: f64) -> Vec<SweepRow> {
    rows.iter()
        .map(|r| SweepRow {
            quantity: quantity.into(),
            n_r: r.n_r,
            value: r.value,
            error_estimate: r.error_estimate,
            reference,
            abs_error: (r.value - reference).abs(),
        })
        .collect()
}

fn run_convergence(config: &RunConfig, out: &mut Outputs) -> Result<Vec<Assertion>> {
    let mut rows = sweep_rows("pontryagin", &pontryagin_rows(config)?, GRAV_LEMMA);
    if let Some(data) = config.instanton_data()? {
        let reference = data.channels.iter().map(bulk_closed_form).sum();
        rows.extend(sweep_rows("bulk", &bulk_convergence(&data, &config.quad, &config.sizes)?, reference));
    }
    let mut a = Vec::new();
    for q in ["pontryagin", "bulk"] {
        if let Some(last) = rows.iter().rfind(|r| r.quantity == q) {
            a.push(Assertion::at_most(
                format!("{q} |value - reference| at the finest grid"),
                last.abs_error,
                config.tolerance(),
            ));
        }
    }
    out.csv(
        &config.output.convergence_table,
        &rows,
        &["quantity", "N_r", "value", "error_estimate", "reference", "abs_error"],
    )?;
    Ok(a)
}

/// Command-line flags; each overrides the corresponding config field.
#[derive(Debug, Parser)]
#[command(name = "tn-index", version, about = "Index-formula verification on Taub-NUT space")]
pub struct Args {
    /// JSON run configuration; defaults are used when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Gravitational term: `lemma` (constant 1/12) or `numeric`.
    #[arg(long)]
    pub grav: Option<crate::index::GravMode>,
    #[arg(long, value_enum)]
    pub route: Option<RouteChoice>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Mode tolerance.
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    /// Worker threads (falls back to TN_INDEX_THREADS, then all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Args {
    /// Loads the config file (if any) and applies the flag overrides.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(m) = self.mode {
            cfg.mode = m;
        }
        if let Some(g) = self.grav {
            cfg.grav = g;
        }
        if let Some(r) = self.route {
            cfg.route = r;
        }
        if let Some(o) = &self.out {
            cfg.output.dir = o.clone();
        }
        if self.tol.is_some() {
            cfg.tol = self.tol;
        }
        Ok(cfg)
    }
}

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Json(_) => EXIT_PARSE,
        Error::InvalidSpec(_) | Error::Genericity { .. } => EXIT_VALIDATION,
        _ => EXIT_NUMERICAL,
    }
}

/// The `{"kind", "message"}` object written to stderr.
pub fn error_json(kind: &str, message: &str) -> String {
    serde_json::json!({ "kind": kind, "message": message }).to_string()
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var("TN_INDEX_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidSpec(format!("TN_INDEX_THREADS must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn run_with_threads(cfg: &RunConfig, threads: Option<usize>) -> Result<RunSummary> {
    match threads {
        None => run(cfg),
        Some(0) => Err(Error::InvalidSpec("thread count must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Consistency(format!("thread pool: {e}")))?;
            pool.install(|| run(cfg))
        }
    }
}

/// Full command-line entry point; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            eprintln!("{}", error_json("parse", e.to_string().trim()));
            return EXIT_PARSE;
        }
    };
    let cfg = match args.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}", error_json(e.kind(), &e.to_string()));
            // an unreadable config file is an ingestion failure
            return if matches!(e, Error::Io(_)) { EXIT_PARSE } else { exit_code(&e) };
        }
    };
    let result = thread_count(args.threads).and_then(|t| run_with_threads(&cfg, t));
    match result {
        Ok(summary) if summary.passed => EXIT_OK,
        Ok(summary) => {
            let failed: Vec<&str> = summary.failures().map(|a| a.name.as_str()).collect();
            eprintln!("{}", error_json("assertion", &format!("failed: {}", failed.join("; "))));
            EXIT_NUMERICAL
        }
        Err(e) => {
            eprintln!("{}", error_json(e.kind(), &e.to_string()));
            exit_code(&e)
        }
    }
}
