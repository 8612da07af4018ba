//! Command-line front end: `coeffs`, `observables`, `evolve` and `verify`.
//!
//! Every command renders its whole report in memory and writes it once, to
//! standard output or `--out`. Exit codes: 0 success, 1 verification
//! failure, 2 usage or invalid configuration, 3 I/O failure.

pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dynamics::{evolve_closed_form, evolve_spectral, phase_aligned_max_error, trace_orbit};
use crate::expansion::{build_table, CoefficientTable};
use crate::observables::{closed_form_energy, closed_form_lz, compute_report, partial_moment_identities, MomentIdentities};
use crate::states::{classical_center, energy, to_dimensionless, Chirality, Grid2D, PacketParams, PhysicalUnits, DEFAULT_GRID_POINTS, GRID_MARGIN};
use output::{fmt_real, to_json, Csv, Real};
use verify::{Check, TargetConfig, VerifySuite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const MIN_GRID_POINTS: usize = 33;

/// Lower bound on the tolerance used by `observables`.
pub const OBSERVABLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "coherent2d", version, about = "Coherent states of the 2D isotropic oscillator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Coeffs,
    Observables,
    Evolve,
    Verify,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expansion coefficients C_{m n_r} sorted by (N, m).
    Coeffs(RunArgs),
    /// Table-summed moments against their closed forms.
    Observables(RunArgs),
    /// Centroid, variances and spectral error along one orbit.
    Evolve(RunArgs),
    /// Closed forms against independent oracles; exit 1 on any failure.
    Verify(RunArgs),
}

impl Command {
    fn split(self) -> (CommandKind, RunArgs) {
        match self {
            Command::Coeffs(a) => (CommandKind::Coeffs, a),
            Command::Observables(a) => (CommandKind::Observables, a),
            Command::Evolve(a) => (CommandKind::Evolve, a),
            Command::Verify(a) => (CommandKind::Verify, a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

const PHYSICAL: [&str; 5] = ["mass", "omega", "hbar", "x0", "y0"];

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Dimensionless x amplitude ξ₀ = αx₀ (default 0).
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = PHYSICAL)]
    pub xi0: Option<f64>,
    /// Dimensionless y amplitude η₀ = αy₀ (default 0).
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = PHYSICAL)]
    pub eta0: Option<f64>,
    #[arg(long, default_value = "retarded", value_parser = ["retarded", "advanced"])]
    pub chirality: String,
    /// Largest principal number N kept in the table (default: automatic).
    #[arg(long)]
    pub nmax: Option<u32>,
    /// Grid half width in ξ and η (default max(ξ₀, η₀) + 6).
    #[arg(long, allow_hyphen_values = true)]
    pub grid_half_width: Option<f64>,
    /// Points per axis; odd and at least 33.
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Length of the sampled time window (default one period, 2π/ω).
    #[arg(long, allow_hyphen_values = true)]
    pub tmax: Option<f64>,
    /// Number of sample times t_k = k·tmax/tsteps, k < tsteps.
    #[arg(long, default_value_t = 64)]
    pub tsteps: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Output file (default standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Particle mass M.
    #[arg(long, allow_hyphen_values = true)]
    pub mass: Option<f64>,
    /// Angular frequency ω.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Reduced Planck constant ħ.
    #[arg(long, allow_hyphen_values = true)]
    pub hbar: Option<f64>,
    /// Physical x amplitude x₀.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    /// Physical y amplitude y₀.
    #[arg(long, allow_hyphen_values = true)]
    pub y0: Option<f64>,
}

/// Validated settings shared by all commands. `t_max` is in the caller's
/// time unit; multiply by `params.omega` for dimensionless time.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: PacketParams,
    pub n_max: Option<u32>,
    pub grid_half_width: f64,
    pub grid_points: usize,
    pub t_max: f64,
    pub t_steps: usize,
    pub format: Format,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_args(args: &RunArgs) -> Result<Self, String> {
        let chirality: Chirality = args.chirality.parse()?;
        let physical = [args.mass, args.omega, args.hbar, args.x0, args.y0].iter().any(Option::is_some);
        let params = if physical {
            to_dimensionless(&PhysicalUnits {
                mass: args.mass.unwrap_or(1.0),
                omega: args.omega.unwrap_or(1.0),
                hbar: args.hbar.unwrap_or(1.0),
                x0: args.x0.unwrap_or(0.0),
                y0: args.y0.unwrap_or(0.0),
            })
        } else {
            PacketParams::new(args.xi0.unwrap_or(0.0), args.eta0.unwrap_or(0.0))
        }
        .map_err(|e| e.to_string())?
        .with_chirality(chirality);

        if args.grid_points < MIN_GRID_POINTS || args.grid_points.is_multiple_of(2) {
            return Err(format!(
                "--grid-points must be odd and at least {MIN_GRID_POINTS}, got {}",
                args.grid_points
            ));
        }
        if args.tsteps < 1 {
            return Err("--tsteps must be at least 1".into());
        }
        let grid_half_width = args.grid_half_width.unwrap_or(params.max_amplitude() + GRID_MARGIN);
        if !(grid_half_width.is_finite() && grid_half_width > 0.0) {
            return Err(format!("--grid-half-width must be positive, got {grid_half_width}"));
        }
        let t_max = args.tmax.unwrap_or(2.0 * PI / params.omega);
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(format!("--tmax must be positive, got {t_max}"));
        }
        Ok(Self {
            params,
            n_max: args.nmax,
            grid_half_width,
            grid_points: args.grid_points,
            t_max,
            t_steps: args.tsteps,
            format: args.format,
            output_path: args.out.clone(),
        })
    }

    /// Sample times in the caller's unit.
    pub fn times(&self) -> Vec<f64> {
        (0..self.t_steps)
            .map(|k| self.t_max * k as f64 / self.t_steps as f64)
            .collect()
    }

    pub fn grid(&self) -> Result<Grid2D, String> {
        Grid2D::centered(self.grid_half_width, self.grid_points).map_err(|e| e.to_string())
    }

    pub fn target(&self) -> TargetConfig {
        TargetConfig {
            params: self.params,
            n_max: self.n_max,
            grid_half_width: self.grid_half_width,
            grid_points: self.grid_points,
            t_max: self.t_max * self.params.omega,
            t_steps: self.t_steps,
        }
    }
}

/// Rendered report plus the exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, code: EXIT_OK }
    }
}

#[derive(Serialize)]
struct ParamsJson {
    xi0: Real,
    eta0: Real,
    chirality: Chirality,
}

impl ParamsJson {
    fn of(p: &PacketParams) -> Self {
        Self {
            xi0: Real(p.xi0),
            eta0: Real(p.eta0),
            chirality: p.chirality,
        }
    }
}

fn table(config: &RunConfig) -> Result<CoefficientTable, String> {
    build_table(&config.params, config.n_max).map_err(|e| e.to_string())
}

pub fn cmd_coeffs(config: &RunConfig) -> Result<Outcome, String> {
    #[derive(Serialize)]
    struct Entry {
        m: i32,
        n_r: u32,
        principal: u32,
        c: Real,
        abs2: Real,
        energy: Real,
    }
    #[derive(Serialize)]
    struct Doc {
        params: ParamsJson,
        n_max: u32,
        entries: Vec<Entry>,
        sum_abs2: Real,
        tail_mass: Real,
    }

    let table = table(config)?;
    let text = match config.format {
        Format::Csv => {
            let mut csv = Csv::new(&["m", "n_r", "N", "C", "|C|^2", "energy"]);
            for (mode, c) in table.iter() {
                csv.row([
                    mode.m.to_string(),
                    mode.n_r.to_string(),
                    mode.principal().to_string(),
                    fmt_real(c),
                    fmt_real(c * c),
                    fmt_real(energy(mode)),
                ]);
            }
            csv.comment(&format!(
                "sum_abs2={},tail_mass={}",
                fmt_real(table.sum_squares()),
                fmt_real(table.tail_mass)
            ));
            csv.finish()
        }
        Format::Json => to_json(&Doc {
            params: ParamsJson::of(&config.params),
            n_max: table.n_max,
            entries: table
                .iter()
                .map(|(mode, c)| Entry {
                    m: mode.m,
                    n_r: mode.n_r,
                    principal: mode.principal(),
                    c: Real(c),
                    abs2: Real(c * c),
                    energy: Real(energy(mode)),
                })
                .collect(),
            sum_abs2: Real(table.sum_squares()),
            tail_mass: Real(table.tail_mass),
        }),
    };
    Ok(Outcome::ok(text))
}

struct Quantity {
    name: &'static str,
    value: f64,
    closed_form: Option<f64>,
}

impl Quantity {
    fn new(name: &'static str, value: f64, closed_form: Option<f64>) -> Self {
        Self { name, value, closed_form }
    }

    fn abs_diff(&self) -> Option<f64> {
        self.closed_form.map(|c| (self.value - c).abs())
    }
}

pub fn cmd_observables(config: &RunConfig) -> Result<Outcome, String> {
    #[derive(Serialize)]
    struct Row {
        quantity: &'static str,
        value: Real,
        closed_form: Option<Real>,
        abs_diff: Option<Real>,
    }
    #[derive(Serialize)]
    struct Doc {
        params: ParamsJson,
        n_max: u32,
        tail_mass: Real,
        tolerance: Real,
        passed: bool,
        quantities: Vec<Row>,
    }

    let p = config.params;
    let table = table(config)?;
    let report = compute_report(&table).map_err(|e| e.to_string())?;
    let mut rows = vec![
        Quantity::new("mean_m", report.mean_m, Some(closed_form_lz(&p))),
        Quantity::new("mean_abs_m", report.mean_abs_m, None),
        Quantity::new("mean_nr", report.mean_nr, None),
        Quantity::new("mean_lz", report.mean_lz, Some(closed_form_lz(&p))),
        Quantity::new("mean_energy", report.mean_energy, Some(closed_form_energy(&p))),
        Quantity::new("norm_deficit", report.norm_deficit, Some(table.tail_mass)),
        Quantity::new("nr_nonneg_m", report.partials.nr_nonneg_m, None),
        Quantity::new("nr_neg_m", report.partials.nr_neg_m, None),
        Quantity::new("m_plus_nr_nonneg_m", report.partials.m_plus_nr_nonneg_m, None),
        Quantity::new("neg_m_plus_nr_neg_m", report.partials.neg_m_plus_nr_neg_m, None),
    ];
    if let Ok(ids) = partial_moment_identities(&table) {
        let want = MomentIdentities::expected(&p);
        rows.extend([
            Quantity::new("identity_a2", ids.lhs18, Some(want.lhs18)),
            Quantity::new("identity_b2", ids.lhs19, Some(want.lhs19)),
            Quantity::new("identity_sum", ids.lhs20, Some(want.lhs20)),
            Quantity::new("identity_difference", ids.lhs21, Some(want.lhs21)),
        ]);
    }
    let tolerance = OBSERVABLE_TOLERANCE.max(10.0 * table.tail_mass);
    let passed = rows.iter().all(|q| q.abs_diff().is_none_or(|d| d <= tolerance));
    let opt = |x: Option<f64>| x.map(fmt_real).unwrap_or_default();
    let text = match config.format {
        Format::Csv => {
            let mut csv = Csv::new(&["quantity", "value", "closed_form", "abs_diff"]);
            for q in &rows {
                csv.row([q.name.to_string(), fmt_real(q.value), opt(q.closed_form), opt(q.abs_diff())]);
            }
            csv.comment(&format!(
                "n_max={},tail_mass={},tolerance={},status={}",
                table.n_max,
                fmt_real(table.tail_mass),
                fmt_real(tolerance),
                if passed { "PASS" } else { "FAIL" }
            ));
            csv.finish()
        }
        Format::Json => to_json(&Doc {
            params: ParamsJson::of(&p),
            n_max: table.n_max,
            tail_mass: Real(table.tail_mass),
            tolerance: Real(tolerance),
            passed,
            quantities: rows
                .iter()
                .map(|q| Row {
                    quantity: q.name,
                    value: Real(q.value),
                    closed_form: q.closed_form.map(Real),
                    abs_diff: q.abs_diff().map(Real),
                })
                .collect(),
        }),
    };
    Ok(Outcome {
        text,
        code: if passed { EXIT_OK } else { EXIT_VERIFY },
    })
}

pub fn cmd_evolve(config: &RunConfig) -> Result<Outcome, String> {
    #[derive(Serialize)]
    struct Row {
        t: Real,
        centroid_xi: Real,
        centroid_eta: Real,
        classical_xi: Real,
        classical_eta: Real,
        var_xi: Real,
        var_eta: Real,
        norm: Real,
        spectral_max_err: Real,
    }
    #[derive(Serialize)]
    struct Doc {
        params: ParamsJson,
        n_max: u32,
        tail_mass: Real,
        samples: Vec<Row>,
    }

    let p = config.params;
    let grid = config.grid()?;
    let table = table(config)?;
    let times = config.times();
    let tau: Vec<f64> = times.iter().map(|t| t * p.omega).collect();
    let samples = trace_orbit(&p, &tau, &grid).map_err(|e| e.to_string())?;
    let rows: Vec<Row> = times
        .iter()
        .zip(&samples)
        .map(|(&t, s)| {
            let (cx, cy) = classical_center(&p, s.t);
            let spectral = evolve_spectral(&table, grid.clone(), s.t);
            let closed = evolve_closed_form(&p, grid.clone(), s.t);
            Row {
                t: Real(t),
                centroid_xi: Real(s.centroid_xi),
                centroid_eta: Real(s.centroid_eta),
                classical_xi: Real(cx),
                classical_eta: Real(cy),
                var_xi: Real(s.var_xi),
                var_eta: Real(s.var_eta),
                norm: Real(s.norm),
                spectral_max_err: Real(phase_aligned_max_error(&spectral, &closed)),
            }
        })
        .collect();
    let text = match config.format {
        Format::Csv => {
            let mut csv = Csv::new(&[
                "t",
                "centroid_xi",
                "centroid_eta",
                "classical_xi",
                "classical_eta",
                "var_xi",
                "var_eta",
                "norm",
                "spectral_max_err",
            ]);
            for r in &rows {
                csv.row(
                    [r.t, r.centroid_xi, r.centroid_eta, r.classical_xi, r.classical_eta, r.var_xi, r.var_eta, r.norm, r.spectral_max_err]
                        .map(|x| fmt_real(x.0)),
                );
            }
            csv.finish()
        }
        Format::Json => to_json(&Doc {
            params: ParamsJson::of(&p),
            n_max: table.n_max,
            tail_mass: Real(table.tail_mass),
            samples: rows,
        }),
    };
    Ok(Outcome::ok(text))
}

/// Renders a list of checks; exit 1 unless every check passed.
pub fn render_checks(checks: &[Check], format: Format) -> Outcome {
    #[derive(Serialize)]
    struct Row<'a> {
        check: &'a str,
        status: &'static str,
        residual: Real,
        tolerance: Real,
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        passed: bool,
        checks: Vec<Row<'a>>,
    }

    let status = |c: &Check| if c.passed { "PASS" } else { "FAIL" };
    let failed = checks.iter().filter(|c| !c.passed).count();
    let text = match format {
        Format::Csv => {
            let mut csv = Csv::new(&["check", "status", "residual", "tolerance"]);
            for c in checks {
                csv.row([c.name.clone(), status(c).into(), fmt_real(c.residual), fmt_real(c.tolerance)]);
            }
            csv.comment(&format!("{} of {} checks passed", checks.len() - failed, checks.len()));
            csv.finish()
        }
        Format::Json => to_json(&Doc {
            passed: failed == 0,
            checks: checks
                .iter()
                .map(|c| Row {
                    check: &c.name,
                    status: status(c),
                    residual: Real(c.residual),
                    tolerance: Real(c.tolerance),
                })
                .collect(),
        }),
    };
    Outcome {
        text,
        code: if failed == 0 { EXIT_OK } else { EXIT_VERIFY },
    }
}

pub fn cmd_verify(config: &RunConfig, suite: &VerifySuite) -> Outcome {
    render_checks(&suite.run(&config.target()), config.format)
}

pub fn execute(kind: CommandKind, config: &RunConfig) -> Result<Outcome, String> {
    match kind {
        CommandKind::Coeffs => cmd_coeffs(config),
        CommandKind::Observables => cmd_observables(config),
        CommandKind::Evolve => cmd_evolve(config),
        CommandKind::Verify => Ok(cmd_verify(config, &VerifySuite::default())),
    }
}

/// Parses `args` (including the program name), runs the command and
/// writes its report. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };
    let (kind, args) = cli.command.split();
    let outcome = match RunConfig::from_args(&args).and_then(|config| execute(kind, &config).map(|o| (config, o))) {
        Ok(x) => x,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let (config, outcome) = outcome;
    let written = match &config.output_path {
        Some(path) => std::fs::write(path, &outcome.text).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout
            .write_all(outcome.text.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => outcome.code,
        Err(msg) => {
            let _ = writeln!(stderr, "error: cannot write output: {msg}");
            EXIT_IO
        }
    }
}
