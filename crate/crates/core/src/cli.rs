//! Batch front end: `construct`, `verify`, `sweep` and `focal` over a JSON
//! scene file.
//!
//! ```json
//! {
//!   "m1": { "space": { "kind": "sphere", "dim": 2, "curvature": 1.0 },
//!           "seed":  { "kind": "geodesic_sphere", "radius": 0.5 } },
//!   "m2": { "space": { "kind": "hyperbolic", "dim": 2, "curvature": -1.0 },
//!           "seed":  { "kind": "horosphere" } },
//!   "curve": { "kind": "circle", "r": 0.1 },
//!   "rng_seed": 7
//! }
//! ```
//!
//! A seed may also be `{ "kind": "constructed", "scene": { "m1": …, "m2": …,
//! "curve": … } }` or `{ "kind": "scene_file", "path": "other.json" }`; the
//! factor `space` is then omitted. Exit codes: 0 success, 1 invalid input,
//! 2 failed verification.

use std::f64::consts::TAU;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::{focal_table, ConstructedHypersurface, CurveKind, ProfileCurve, SpectrumRow};
use crate::error::Error;
use crate::hypersurface::{Hypersurface, SurfacePoint};
use crate::oracle::{verify_point, ComparisonReport, DEFAULT_STEP, DEFAULT_TOL};
use crate::spaceform::{Space, SpaceForm};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceDesc {
    Sphere { dim: usize, curvature: f64 },
    Hyperbolic { dim: usize, curvature: f64 },
    Euclidean { dim: usize },
    Product { factors: Vec<SpaceDesc> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeedDesc {
    GeodesicSphere {
        radius: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    Horosphere {
        #[serde(default)]
        direction: Option<Vec<f64>>,
    },
    Equidistant {
        distance: f64,
        #[serde(default)]
        normal: Option<Vec<f64>>,
    },
    Equator {
        #[serde(default)]
        normal: Option<Vec<f64>>,
    },
    Constructed { scene: Box<SceneDesc> },
    SceneFile { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDesc {
    #[serde(default)]
    pub space: Option<SpaceDesc>,
    pub seed: SeedDesc,
    /// Flip the seed's unit normal.
    #[serde(default)]
    pub reversed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDesc {
    pub m1: FactorDesc,
    pub m2: FactorDesc,
    pub curve: CurveKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleCounts {
    /// Random base points `(p1, p2)` for `verify`.
    pub points: usize,
    /// Uniform θ samples for `verify` and `sweep`.
    pub thetas: usize,
    /// Random seed points per factor for the admissible radius.
    pub focal: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        SampleCounts {
            points: 5,
            thetas: 64,
            focal: crate::construct::DEFAULT_FOCAL_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Eigenvalue and commutator tolerance for oracle comparisons.
    pub shape: f64,
    /// Finite-difference step.
    pub step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            shape: DEFAULT_TOL,
            step: DEFAULT_STEP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub m1: FactorDesc,
    pub m2: FactorDesc,
    pub curve: CurveKind,
    #[serde(default)]
    pub samples: SampleCounts,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub rng_seed: u64,
    /// Add finite-difference columns to `sweep`.
    #[serde(default)]
    pub sweep_verify: bool,
    /// Output directory when `--out` is not given.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl SceneConfig {
    pub fn scene(&self) -> SceneDesc {
        SceneDesc {
            m1: self.m1.clone(),
            m2: self.m2.clone(),
            curve: self.curve.clone(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
        let cfg: SceneConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Invalid(format!("bad config {}: {e}", path.display())))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        for (name, v) in [("tolerances.shape", self.tolerances.shape), ("tolerances.step", self.tolerances.step)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.samples.thetas == 0 {
            return Err(CliError::Invalid("samples.thetas must be positive".into()));
        }
        Ok(())
    }
}

/// Failure classes mapped to exit codes 1 and 2.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Invalid(String),
    VerificationFailed(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::VerificationFailed(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::VerificationFailed(_) => 2,
        }
    }
}

fn io_err(e: impl fmt::Display) -> CliError {
    CliError::Invalid(format!("output error: {e}"))
}

pub fn build_space(desc: &SpaceDesc) -> Result<Space, Error> {
    Ok(match desc {
        SpaceDesc::Sphere { dim, curvature } => Space::Form(SpaceForm::sphere(*dim, *curvature)?),
        SpaceDesc::Hyperbolic { dim, curvature } => Space::Form(SpaceForm::hyperbolic(*dim, *curvature)?),
        SpaceDesc::Euclidean { dim } => Space::Form(SpaceForm::euclidean(*dim)?),
        SpaceDesc::Product { factors } => Space::product(factors.iter().map(build_space).collect::<Result<_, _>>()?)?,
    })
}

fn build_seed(desc: &FactorDesc, base_dir: &Path, depth: usize) -> Result<Hypersurface, CliError> {
    let form = || -> Result<SpaceForm, CliError> {
        match desc.space.as_ref().map(build_space).transpose()? {
            Some(Space::Form(f)) => Ok(f),
            Some(Space::Product(_)) => Err(CliError::Invalid(
                "closed-form seeds live in a single space form; use a constructed seed for products".into(),
            )),
            None => Err(CliError::Invalid("seed needs a `space`".into())),
        }
    };
    let vector = |v: &Option<Vec<f64>>| v.as_ref().map(|x| DVector::from_vec(x.clone()));
    let no_space = || -> Result<(), CliError> {
        if desc.space.is_some() {
            return Err(CliError::Invalid(
                "constructed seeds take their space from the nested scene; drop `space`".into(),
            ));
        }
        Ok(())
    };
    let h = match &desc.seed {
        SeedDesc::GeodesicSphere { radius, center } => Hypersurface::geodesic_sphere(form()?, vector(center), *radius)?,
        SeedDesc::Horosphere { direction } => Hypersurface::horosphere(form()?, vector(direction))?,
        SeedDesc::Equidistant { distance, normal } => Hypersurface::equidistant(form()?, vector(normal), *distance)?,
        SeedDesc::Equator { normal } => Hypersurface::equator(form()?, vector(normal))?,
        SeedDesc::Constructed { scene } => {
            no_space()?;
            build_scene_at(scene, base_dir, depth + 1, crate::construct::DEFAULT_FOCAL_SAMPLES)?.as_hypersurface()
        }
        SeedDesc::SceneFile { path } => {
            no_space()?;
            let full = base_dir.join(path);
            let cfg = SceneConfig::load(&full)?;
            let dir = full.parent().map(Path::to_path_buf).unwrap_or_default();
            build_scene_at(&cfg.scene(), &dir, depth + 1, cfg.samples.focal)?.as_hypersurface()
        }
    };
    Ok(if desc.reversed { h.reversed() } else { h })
}

fn build_scene_at(
    scene: &SceneDesc,
    base_dir: &Path,
    depth: usize,
    focal_samples: usize,
) -> Result<ConstructedHypersurface, CliError> {
    if depth > 8 {
        return Err(CliError::Invalid("scene nesting deeper than 8 levels".into()));
    }
    let m1 = build_seed(&scene.m1, base_dir, depth)?;
    let m2 = build_seed(&scene.m2, base_dir, depth)?;
    let curve = ProfileCurve::new(scene.curve.clone())?;
    Ok(ConstructedHypersurface::with_focal_samples(m1, m2, curve, focal_samples)?)
}

/// Builds and validates a scene; relative scene-file paths resolve against
/// `base_dir`.
pub fn build_scene(scene: &SceneDesc, base_dir: &Path, focal_samples: usize) -> Result<ConstructedHypersurface, CliError> {
    build_scene_at(scene, base_dir, 0, focal_samples)
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn theta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}

/// Independent stream per base-point sample.
fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

struct Csv {
    writer: csv::Writer<Vec<u8>>,
}

impl Csv {
    fn new(header: &[String]) -> Result<Self, CliError> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(header).map_err(io_err)?;
        Ok(Csv { writer })
    }

    fn row(&mut self, fields: Vec<String>) -> Result<(), CliError> {
        self.writer.write_record(fields).map_err(io_err)
    }

    fn save(self, dir: Option<&Path>, name: &str) -> Result<Option<PathBuf>, CliError> {
        let bytes = self.writer.into_inner().map_err(io_err)?;
        match dir {
            Some(d) => {
                std::fs::create_dir_all(d).map_err(io_err)?;
                let path = d.join(name);
                std::fs::write(&path, bytes).map_err(io_err)?;
                Ok(Some(path))
            }
            None => Ok(None),
        }
    }
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Parser)]
#[command(name = "curvadapt", version, about = "Curvature-adapted tube hypersurfaces: construct, verify, sweep")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the scene, check admissibility, print the spectra at θ = 0.
    Construct(CommonArgs),
    /// Compare closed-form spectra with finite differences at sampled points.
    Verify(CommonArgs),
    /// Product angle and spectra along a θ sweep at the reference point.
    Sweep(CommonArgs),
    /// Focal radii of both seeds and the admissible curve radius.
    Focal(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scene configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for CSV files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct Context {
    cfg: SceneConfig,
    base_dir: PathBuf,
    out: Option<PathBuf>,
}

impl Context {
    fn load(args: &CommonArgs) -> Result<Self, CliError> {
        let cfg = SceneConfig::load(&args.config)?;
        let base_dir = args.config.parent().map(Path::to_path_buf).unwrap_or_default();
        let out = args.out.clone().or_else(|| cfg.out_dir.as_ref().map(|d| base_dir.join(d)));
        Ok(Context { cfg, base_dir, out })
    }

    fn scene(&self) -> Result<ConstructedHypersurface, CliError> {
        build_scene(&self.cfg.scene(), &self.base_dir, self.cfg.samples.focal)
    }
}

fn spectra_rows(c: &ConstructedHypersurface, p1: &SurfacePoint, p2: &SurfacePoint, theta: f64) -> Result<Vec<(SpectrumRow, f64)>, CliError> {
    let shape = c.shape_spectrum(p1, p2, theta)?;
    let nj = c.normal_jacobi_spectrum(p1, p2, theta)?;
    Ok(shape.into_iter().zip(nj).map(|(s, n)| (s, n.value)).collect())
}

pub fn cmd_construct(args: &CommonArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ctx = Context::load(args)?;
    let c = ctx.scene()?;
    let d = c.diagnostics().expect("validated scene has diagnostics");
    let (p1, p2) = (c.m1().reference_point(), c.m2().reference_point());
    let rows = spectra_rows(&c, &p1, &p2, 0.0)?;
    writeln!(out, "ambient dimension: {}", c.ambient().dim()).map_err(io_err)?;
    writeln!(out, "hypersurface dimension: {}", c.ambient().dim() - 1).map_err(io_err)?;
    writeln!(out, "max |u|: {}", fmt_f64(d.max_radius)).map_err(io_err)?;
    writeln!(out, "admissible radius: {}", fmt_f64(d.admissible_radius)).map_err(io_err)?;
    writeln!(out, "margin: {}", fmt_f64(d.margin)).map_err(io_err)?;
    writeln!(out, "winding number: {}", d.winding).map_err(io_err)?;
    writeln!(out, "spectra at theta = 0 (reference point):").map_err(io_err)?;
    writeln!(out, "row,lambda,mu,multiplicity").map_err(io_err)?;
    let mut csv = Csv::new(&header(&["row", "lambda", "mu", "multiplicity", "rng_seed"]))?;
    for (r, mu) in &rows {
        writeln!(out, "{},{},{},{}", r.label, fmt_f64(r.value), fmt_f64(*mu), r.multiplicity).map_err(io_err)?;
        csv.row(vec![
            r.label.to_string(),
            fmt_f64(r.value),
            fmt_f64(*mu),
            r.multiplicity.to_string(),
            ctx.cfg.rng_seed.to_string(),
        ])?;
    }
    csv.save(ctx.out.as_deref(), "construct.csv")?;
    Ok(())
}

fn sample_points(h: &Hypersurface, cfg: &SceneConfig) -> Vec<SurfacePoint> {
    (0..cfg.samples.points)
        .map(|i| {
            let mut rng = sample_rng(cfg.rng_seed, i as u64);
            h.sample_point(&mut rng)
        })
        .collect()
}

fn with_theta(p: &SurfacePoint, theta: f64) -> SurfacePoint {
    match p {
        SurfacePoint::Tube(t) => SurfacePoint::tube(t.p1.clone(), t.p2.clone(), theta),
        other => other.clone(),
    }
}

pub fn cmd_verify(args: &CommonArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ctx = Context::load(args)?;
    let h = ctx.scene()?.as_hypersurface();
    let tol = ctx.cfg.tolerances;
    let thetas = theta_grid(ctx.cfg.samples.thetas);
    let tasks: Vec<(usize, usize, SurfacePoint)> = sample_points(&h, &ctx.cfg)
        .iter()
        .enumerate()
        .flat_map(|(i, p)| thetas.iter().enumerate().map(move |(j, t)| (i, j, with_theta(p, *t))))
        .collect();
    let reports: Vec<Result<ComparisonReport, Error>> = tasks
        .par_iter()
        .map(|(_, _, p)| verify_point(&h, p, tol.step, tol.shape))
        .collect();
    let mut csv = Csv::new(&header(&[
        "sample",
        "theta",
        "pair",
        "lambda_closed",
        "lambda_fd",
        "mu_closed",
        "mu_fd",
        "abs_err",
        "commutator",
        "pass",
        "rng_seed",
    ]))?;
    let (mut failed, mut worst, mut worst_comm) = (0usize, 0.0f64, 0.0f64);
    let mut first_error = None;
    for ((i, j, _), rep) in tasks.iter().zip(&reports) {
        let theta = fmt_f64(thetas[*j]);
        match rep {
            Ok(rep) => {
                worst = worst.max(rep.max_error);
                worst_comm = worst_comm.max(rep.commutator_residual);
                if !rep.pass {
                    failed += 1;
                }
                for (k, r) in rep.rows.iter().enumerate() {
                    csv.row(vec![
                        i.to_string(),
                        theta.clone(),
                        k.to_string(),
                        fmt_f64(r.closed_lambda),
                        fmt_f64(r.numeric_lambda),
                        fmt_f64(r.closed_mu),
                        fmt_f64(r.numeric_mu),
                        fmt_f64(r.abs_error),
                        fmt_f64(rep.commutator_residual),
                        rep.pass.to_string(),
                        ctx.cfg.rng_seed.to_string(),
                    ])?;
                }
            }
            Err(e) => {
                failed += 1;
                first_error.get_or_insert_with(|| e.to_string());
                csv.row(vec![
                    i.to_string(),
                    theta,
                    "error".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    "false".into(),
                    ctx.cfg.rng_seed.to_string(),
                ])?;
            }
        }
    }
    csv.save(ctx.out.as_deref(), "verify.csv")?;
    writeln!(
        out,
        "verified {} samples: {} failed, max eigenvalue error {}, max commutator {}, tol {}, h {}",
        tasks.len(),
        failed,
        fmt_f64(worst),
        fmt_f64(worst_comm),
        fmt_f64(tol.shape),
        fmt_f64(tol.step)
    )
    .map_err(io_err)?;
    if failed > 0 {
        return Err(CliError::VerificationFailed(match first_error {
            Some(e) => format!("{failed} of {} samples failed (first error: {e})", tasks.len()),
            None => format!("{failed} of {} samples exceed tolerance {}", tasks.len(), tol.shape),
        }));
    }
    Ok(())
}

/// Assigns each table row the unused comparison row nearest in `(λ, μ)`.
fn match_rows(rows: &[(SpectrumRow, f64)], rep: &ComparisonReport) -> Vec<(f64, f64)> {
    let mut used = vec![false; rep.rows.len()];
    rows.iter()
        .map(|(r, mu)| {
            let best = rep
                .rows
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .min_by(|(_, a), (_, b)| {
                    let da = (a.closed_lambda - r.value).abs() + (a.closed_mu - mu).abs();
                    let db = (b.closed_lambda - r.value).abs() + (b.closed_mu - mu).abs();
                    da.total_cmp(&db)
                })
                .map(|(k, _)| k);
            match best {
                Some(k) => {
                    used[k] = true;
                    (rep.rows[k].numeric_lambda, (rep.rows[k].numeric_lambda - r.value).abs())
                }
                None => (f64::NAN, f64::NAN),
            }
        })
        .collect()
}

pub fn cmd_sweep(args: &CommonArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ctx = Context::load(args)?;
    let c = ctx.scene()?;
    let h = c.clone().as_hypersurface();
    let (p1, p2) = (c.m1().reference_point(), c.m2().reference_point());
    let thetas = theta_grid(ctx.cfg.samples.thetas);
    let tol = ctx.cfg.tolerances;
    let verify = ctx.cfg.sweep_verify;
    type SweepRow = (f64, f64, Vec<(SpectrumRow, f64)>, Option<Vec<(f64, f64)>>);
    let rows: Vec<Result<SweepRow, CliError>> = thetas
        .par_iter()
        .map(|&t| {
            let rows = spectra_rows(&c, &p1, &p2, t)?;
            let via_p = c.product_angle_via_structure(&p1, &p2, t)?;
            let fd = if verify {
                let rep = verify_point(&h, &SurfacePoint::tube(p1.clone(), p2.clone(), t), tol.step, tol.shape)
                    .map_err(|e| CliError::VerificationFailed(e.to_string()))?;
                Some(match_rows(&rows, &rep))
            } else {
                None
            };
            Ok((c.product_angle(t), via_p, rows, fd))
        })
        .collect();
    let rows: Vec<SweepRow> = rows.into_iter().collect::<Result<_, _>>()?;
    let labels: Vec<String> = rows.first().map(|r| r.2.iter().map(|(s, _)| s.label.to_string()).collect()).unwrap_or_default();
    let mut cols = header(&["theta", "C_formula", "C_via_P"]);
    for l in &labels {
        cols.push(format!("lambda_closed_{l}"));
        cols.push(format!("mu_closed_{l}"));
        if verify {
            cols.push(format!("lambda_fd_{l}"));
            cols.push(format!("err_{l}"));
        }
    }
    cols.push("rng_seed".into());
    let mut csv = Csv::new(&cols)?;
    let mut worst: f64 = 0.0;
    for (t, (cf, cp, spec, fd)) in thetas.iter().zip(&rows) {
        let mut fields = vec![fmt_f64(*t), fmt_f64(*cf), fmt_f64(*cp)];
        for (k, (s, mu)) in spec.iter().enumerate() {
            fields.push(fmt_f64(s.value));
            fields.push(fmt_f64(*mu));
            if let Some(fd) = fd {
                fields.push(fmt_f64(fd[k].0));
                fields.push(fmt_f64(fd[k].1));
                worst = worst.max(fd[k].1);
            }
        }
        fields.push(ctx.cfg.rng_seed.to_string());
        csv.row(fields)?;
    }
    let path = csv.save(ctx.out.as_deref(), "sweep.csv")?;
    writeln!(
        out,
        "swept {} theta samples{}",
        thetas.len(),
        path.map(|p| format!(" -> {}", p.display())).unwrap_or_default()
    )
    .map_err(io_err)?;
    if verify {
        writeln!(out, "max |lambda_fd - lambda_closed|: {}", fmt_f64(worst)).map_err(io_err)?;
        if !(worst <= tol.shape) {
            return Err(CliError::VerificationFailed(format!(
                "sweep eigenvalue error {worst:e} exceeds tolerance {}",
                tol.shape
            )));
        }
    }
    Ok(())
}

pub fn cmd_focal(args: &CommonArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ctx = Context::load(args)?;
    let scene = ctx.cfg.scene();
    let m1 = build_seed(&scene.m1, &ctx.base_dir, 0)?;
    let m2 = build_seed(&scene.m2, &ctx.base_dir, 0)?;
    let report = focal_table(&m1, &m2, ctx.cfg.samples.focal)?;
    let mut csv = Csv::new(&header(&["factor", "sample", "lambda", "mu", "multiplicity", "focal_radius", "rng_seed"]))?;
    writeln!(out, "factor,sample,lambda,mu,multiplicity,focal_radius").map_err(io_err)?;
    for r in &report.rows {
        let fields = vec![
            r.factor.to_string(),
            r.sample.to_string(),
            fmt_f64(r.lambda),
            fmt_f64(r.mu),
            r.multiplicity.to_string(),
            fmt_f64(r.focal_radius),
        ];
        writeln!(out, "{}", fields.join(",")).map_err(io_err)?;
        let mut with_seed = fields;
        with_seed.push(ctx.cfg.rng_seed.to_string());
        csv.row(with_seed)?;
    }
    writeln!(out, "focal bound: {}", fmt_f64(report.focal_bound)).map_err(io_err)?;
    writeln!(out, "admissible radius: {}", fmt_f64(report.admissible_radius)).map_err(io_err)?;
    csv.save(ctx.out.as_deref(), "focal.csv")?;
    Ok(())
}

/// Runs a parsed command, printing results to `out` and errors to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match &cli.command {
        Command::Construct(a) => cmd_construct(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Focal(a) => cmd_focal(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code)
}
