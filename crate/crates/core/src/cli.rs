//! `qgame` command line: `solve`, `oracle` and `landscape` over a game file.
//!
//! Game files are TOML:
//!
//! ```toml
//! c = [1.0, 0.0, 2.0, 3.0]   # required, four nonnegative payoffs
//! theta = 0.7853981633974483 # optional, radians, with tau
//! tau = 0.7853981633974483
//!
//! [grid]                      # optional oracle grid
//! resolution = 720
//! epsilon = 0.05
//! ```
//!
//! Exit codes: 0 success, 2 input error, 3 angles underdetermined, 4 output
//! failure.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra2::{Mat2, Vec2};
use crate::equilibrium::{
    check_criterion, eigen_angle, eigen_angle_cosine, solve, EquilibriumCertificate,
    GameClassification, Tag,
};
use crate::oracle::{grid_nash, torus_distance, Cluster, GridNash, GridSpec, OracleEquilibrium};
use crate::quantum_model::{build_pay_operator, expectation, AngularParams, PayCoefficients, StrategyAngles};
use crate::reduction::{g_payoff, reduce, strategy_angle, ReducedGame, TorusPoint, TOL_ANGLE_EQ};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ANGLES: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub const DEFAULT_RESOLUTION: usize = 360;

/// Clusters must sit within this many grid steps of a certificate to count as agreeing.
const AGREEMENT_STEPS: f64 = 2.0;

#[derive(Debug, Parser)]
#[command(name = "qgame", version, about = "Nash equilibria of a two-player antagonistic quantum game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the game and construct its eigenequilibria
    Solve { path: PathBuf },
    /// Brute-force ε-equilibrium search on the torus grid
    Oracle {
        path: PathBuf,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Dump g and ⟨H⟩ over the torus grid as CSV
    Landscape {
        path: PathBuf,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    AnglesUnderdetermined(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::AnglesUnderdetermined(_) => EXIT_ANGLES,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGameFile {
    c: Vec<f64>,
    theta: Option<f64>,
    tau: Option<f64>,
    grid: Option<RawGrid>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    resolution: Option<usize>,
    epsilon: Option<f64>,
}

/// A validated game file.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpecFile {
    pub coefficients: PayCoefficients,
    pub angles: Option<AngularParams>,
    pub resolution: Option<usize>,
    pub epsilon: Option<f64>,
}

impl GameSpecFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawGameFile = toml::from_str(text).map_err(|e| CliError::Input(e.message().to_string()))?;
        let c: [f64; 4] = raw
            .c
            .as_slice()
            .try_into()
            .map_err(|_| CliError::Input(format!("expected 4 coefficients, got {}", raw.c.len())))?;
        let coefficients = PayCoefficients::new(c).map_err(|e| CliError::Input(e.to_string()))?;
        let angles = match (raw.theta, raw.tau) {
            (None, None) => None,
            (Some(theta), Some(tau)) => {
                Some(AngularParams::new(theta, tau).map_err(|e| CliError::Input(e.to_string()))?)
            }
            _ => return Err(CliError::Input("theta and tau must be given together".into())),
        };
        let (resolution, epsilon) = match raw.grid {
            Some(g) => (g.resolution, g.epsilon),
            None => (None, None),
        };
        Ok(Self { coefficients, angles, resolution, epsilon })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputEcho {
    pub c: [f64; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Derived {
    pub omega: Vec2,
    pub n: f64,
    pub m: f64,
    pub trace_c: f64,
    pub delta: f64,
    pub cos_two_theta_star: Option<f64>,
    pub theta_star: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReducedReport {
    pub theta: f64,
    pub tau: f64,
    pub a: Mat2,
    pub u: Vec2,
    pub v: Vec2,
}

impl From<&ReducedGame> for ReducedReport {
    fn from(rg: &ReducedGame) -> Self {
        Self { theta: rg.theta, tau: rg.tau, a: rg.a, u: rg.u, v: rg.v }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub x: TorusPoint,
    pub y: TorusPoint,
    pub lambda: f64,
    pub mu: f64,
    pub residual_x: f64,
    pub residual_y: f64,
    pub g: f64,
    pub h: f64,
    /// Quantum strategy angles realizing `x` and `y`.
    pub alpha: f64,
    pub beta: f64,
}

impl CertificateReport {
    fn new(cert: &EquilibriumCertificate, theta: f64) -> Self {
        Self {
            x: cert.x,
            y: cert.y,
            lambda: cert.lambda,
            mu: cert.mu,
            residual_x: cert.residual_x,
            residual_y: cert.residual_y,
            g: cert.game_value_g,
            h: cert.game_value_h,
            alpha: strategy_angle(&cert.x, theta),
            beta: strategy_angle(&cert.y, theta),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub tag: Tag,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec2>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_eig: Option<f64>,
    /// `⟨Az, z⟩`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_norm_cubed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub common_eigen_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduced: Option<ReducedReport>,
}

impl From<&GameClassification> for ClassificationReport {
    fn from(gc: &GameClassification) -> Self {
        let mut report = ClassificationReport {
            tag: gc.tag(),
            theta_star: None,
            z: None,
            alpha_eig: None,
            s: None,
            z_norm_cubed: None,
            common_eigen_residual: None,
            reduced: None,
        };
        if let GameClassification::NotCommonEigenvector { theta_star, residual } = gc {
            report.theta_star = Some(*theta_star);
            report.common_eigen_residual = Some(*residual);
        }
        if let Some(a) = gc.analysis() {
            report.theta_star = Some(a.theta_star);
            report.z = Some(a.z);
            report.alpha_eig = Some(a.alpha_eig);
            report.s = Some(a.s);
            report.z_norm_cubed = Some(a.z_norm_cubed);
            report.reduced = Some((&a.reduced).into());
        }
        report
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridPointReport {
    pub i: usize,
    pub j: usize,
    pub x: TorusPoint,
    pub y: TorusPoint,
    pub g: f64,
    pub gap_x: f64,
    pub gap_y: f64,
    pub continuum_gap: f64,
    /// `"pass"` or the exact-criterion rejection.
    pub criterion: String,
}

impl GridPointReport {
    fn new(rg: &ReducedGame, p: &OracleEquilibrium) -> Self {
        let criterion = match check_criterion(rg, &p.x, &p.y) {
            Ok(_) => "pass".to_string(),
            Err(r) => r.to_string(),
        };
        Self {
            i: p.i,
            j: p.j,
            x: p.x,
            y: p.y,
            g: p.g_value,
            gap_x: p.deviation_gap_x,
            gap_y: p.deviation_gap_y,
            continuum_gap: p.continuum_gap,
            criterion,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterReport {
    pub size: usize,
    pub first: GridPointReport,
    pub best: GridPointReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub theta: f64,
    pub tau: f64,
    /// `"input"` or `"eigen_angle"`.
    pub angles_from: &'static str,
    pub resolution: usize,
    pub epsilon: f64,
    pub raw_hits: usize,
    pub clusters: Vec<ClusterReport>,
    /// `None` when the analytic side makes no prediction at these angles.
    pub agreement: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: InputEcho,
    pub derived: Derived,
    pub classification: ClassificationReport,
    pub certificates: Vec<CertificateReport>,
    pub oracle: Option<OracleReport>,
    pub timing: Timing,
}

fn derived(c: &PayCoefficients) -> Derived {
    Derived {
        omega: c.omega(),
        n: c.n(),
        m: c.m(),
        trace_c: c.trace_c(),
        delta: c.delta(),
        cos_two_theta_star: eigen_angle_cosine(c),
        theta_star: eigen_angle(c).ok(),
    }
}

fn report(
    command: &'static str,
    spec: &GameSpecFile,
    grid: Option<GridSpec>,
    classification: &GameClassification,
    oracle: Option<OracleReport>,
    started: Instant,
) -> AnalysisReport {
    let theta = classification.analysis().map(|a| a.theta_star).unwrap_or_default();
    AnalysisReport {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        input: InputEcho {
            c: spec.coefficients.as_array(),
            theta: spec.angles.map(|a| a.theta()),
            tau: spec.angles.map(|a| a.tau()),
            grid,
        },
        derived: derived(&spec.coefficients),
        classification: classification.into(),
        certificates: classification.certificates().iter().map(|c| CertificateReport::new(c, theta)).collect(),
        oracle,
        timing: Timing { elapsed_ms: (started.elapsed().as_secs_f64() * 1e6).round() / 1e3 },
    }
}

pub fn cmd_solve(path: &Path) -> Result<AnalysisReport, CliError> {
    let started = Instant::now();
    let spec = GameSpecFile::load(path)?;
    let classification = solve(&spec.coefficients);
    Ok(report("solve", &spec, None, &classification, None, started))
}

/// Angles from the file, else the eigen-angle.
fn resolve_angles(spec: &GameSpecFile) -> Result<(AngularParams, &'static str), CliError> {
    if let Some(a) = spec.angles {
        return Ok((a, "input"));
    }
    match eigen_angle(&spec.coefficients) {
        Ok(theta) => Ok((AngularParams::symmetric(theta).expect("eigen-angle lies in (0, pi/2)"), "eigen_angle")),
        Err(e) => Err(CliError::AnglesUnderdetermined(format!(
            "angles underdetermined: {e}; supply theta and tau in the game file"
        ))),
    }
}

fn resolve_grid(spec: &GameSpecFile, resolution: Option<usize>, epsilon: Option<f64>) -> Result<GridSpec, CliError> {
    let n = resolution.or(spec.resolution).unwrap_or(DEFAULT_RESOLUTION);
    let grid = match epsilon.or(spec.epsilon) {
        Some(eps) => GridSpec::new(n, eps),
        None => GridSpec::with_default_epsilon(n, spec.coefficients.total()),
    };
    grid.map_err(|e| CliError::Input(e.to_string()))
}

fn cluster_near(cluster: &Cluster, cert: &EquilibriumCertificate, step: f64) -> bool {
    torus_distance(&cluster.best.x, &cluster.best.y, &cert.x, &cert.y) <= AGREEMENT_STEPS * step
}

/// Does the grid search confirm the analytic classification?
pub fn oracle_agreement(
    classification: &GameClassification,
    rg: &ReducedGame,
    found: &GridNash,
) -> Option<bool> {
    let step = found.spec.step();
    let at_eigen_angle = |theta_star: f64| {
        (rg.theta - theta_star).abs() <= TOL_ANGLE_EQ && (rg.tau - theta_star).abs() <= TOL_ANGLE_EQ
    };
    match classification {
        GameClassification::NoOmega => {
            Some(found.hits.iter().all(|h| check_criterion(rg, &h.x, &h.y).is_err()))
        }
        GameClassification::UniqueEigen { analysis, certificate } if at_eigen_angle(analysis.theta_star) => {
            Some(found.clusters.len() == 1 && cluster_near(&found.clusters[0], certificate, step))
        }
        GameClassification::DualEigen { analysis, certificates: [a, b] } if at_eigen_angle(analysis.theta_star) => {
            let [c0, c1] = match found.clusters.as_slice() {
                [c0, c1] => [c0, c1],
                _ => return Some(false),
            };
            Some(
                (cluster_near(c0, a, step) && cluster_near(c1, b, step))
                    || (cluster_near(c0, b, step) && cluster_near(c1, a, step)),
            )
        }
        _ => None,
    }
}

pub fn cmd_oracle(path: &Path, resolution: Option<usize>, epsilon: Option<f64>) -> Result<AnalysisReport, CliError> {
    let started = Instant::now();
    let spec = GameSpecFile::load(path)?;
    let grid = resolve_grid(&spec, resolution, epsilon)?;
    let (angles, angles_from) = resolve_angles(&spec)?;
    let classification = solve(&spec.coefficients);

    let mut rg = reduce(&spec.coefficients, &angles);
    if let Some(a) = classification.analysis() {
        if angles_from == "eigen_angle" {
            // identical matrix to the one the certificates were checked against
            rg = a.reduced;
        }
    }
    let found = grid_nash(&rg, &grid);
    let agreement = oracle_agreement(&classification, &rg, &found);
    let oracle = OracleReport {
        theta: angles.theta(),
        tau: angles.tau(),
        angles_from,
        resolution: grid.resolution,
        epsilon: grid.epsilon,
        raw_hits: found.hits.len(),
        clusters: found
            .clusters
            .iter()
            .map(|c| ClusterReport {
                size: c.size,
                first: GridPointReport::new(&rg, &c.first),
                best: GridPointReport::new(&rg, &c.best),
            })
            .collect(),
        agreement,
    };
    Ok(report("oracle", &spec, Some(grid), &classification, Some(oracle), started))
}

/// 12 significant digits.
fn sig12(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn write_landscape(
    c: &PayCoefficients,
    angles: &AngularParams,
    resolution: usize,
    out: &mut dyn Write,
) -> io::Result<()> {
    let rg = reduce(c, angles);
    let h_op = build_pay_operator(c, angles);
    writeln!(out, "phi_x,phi_y,g,H")?;
    for kx in 0..resolution {
        let phi_x = crate::oracle::grid_angle(kx, resolution);
        let x = TorusPoint::from_angle(phi_x);
        for ky in 0..resolution {
            let phi_y = crate::oracle::grid_angle(ky, resolution);
            let y = TorusPoint::from_angle(phi_y);
            let g = g_payoff(&rg, &x, &y);
            let s = StrategyAngles::new(strategy_angle(&x, rg.theta), strategy_angle(&y, rg.tau));
            let h = expectation(&h_op, &s);
            writeln!(out, "{},{},{},{}", sig12(phi_x), sig12(phi_y), sig12(g), sig12(h))?;
        }
    }
    Ok(())
}

pub fn cmd_landscape(
    path: &Path,
    resolution: Option<usize>,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let spec = GameSpecFile::load(path)?;
    let grid = resolve_grid(&spec, resolution, None)?;
    let (angles, _) = resolve_angles(&spec)?;
    let io_err = |e: io::Error| CliError::Io(format!("cannot write landscape: {e}"));
    match out {
        Some(p) => {
            let file = fs::File::create(p).map_err(|e| CliError::Io(format!("cannot create {}: {e}", p.display())))?;
            let mut w = io::BufWriter::new(file);
            write_landscape(&spec.coefficients, &angles, grid.resolution, &mut w).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
        None => write_landscape(&spec.coefficients, &angles, grid.resolution, stdout).map_err(io_err),
    }
}

fn emit(report: &AnalysisReport, stdout: &mut dyn Write) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    writeln!(stdout, "{text}").map_err(|e| CliError::Io(e.to_string()))
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_INPUT;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    let result = match cli.command {
        Command::Solve { path } => cmd_solve(&path).and_then(|r| emit(&r, stdout)),
        Command::Oracle { path, resolution, epsilon } => {
            cmd_oracle(&path, resolution, epsilon).and_then(|r| emit(&r, stdout))
        }
        Command::Landscape { path, resolution, out } => cmd_landscape(&path, resolution, out.as_deref(), stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
