//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{Method, RunConfig, TEMPLATE};
use crate::error::{Error, Result};
use crate::frame::{
    constant_tangent_field, immersion_closed_form, immersion_quadrature, integrate_frame, tangent_field, GridSpec,
    PathOrder, Representation, SurfaceGrid, TangentField,
};
use crate::geometry::{tangent_at, umbilic_locus, CurvatureField, NodeGeometry};
use crate::laxpair::LaxPair;
use crate::mesh;
use crate::painleve::fmt17;
use crate::verify::{self, Suite};

#[derive(Parser, Debug)]
#[command(name = "soliton", version, about = "Soliton surfaces from Lax pairs of Painleve equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate or evaluate the Painleve solution; writes trajectory.csv
    Solve(RunArgs),
    /// Build the surface; writes surface.obj and surface.csv
    Surface(RunArgs),
    /// Fundamental forms and curvatures on the grid; writes geometry.csv
    Geometry(RunArgs),
    /// Umbilic points (H^2 = K) on the grid; writes umbilic.csv
    Umbilic(RunArgs),
    /// Run the built-in checks
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
    },
    /// Print a configuration file
    Template {
        #[arg(long)]
        preset: Option<String>,
    },
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output.dir)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Algebra,
    Zcc,
    Symmetry,
    Frame,
    Geometry,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Algebra => Suite::Algebra,
            SuiteArg::Zcc => Suite::Zcc,
            SuiteArg::Symmetry => Suite::Symmetry,
            SuiteArg::Frame => Suite::Frame,
            SuiteArg::Geometry => Suite::Geometry,
            SuiteArg::All => Suite::All,
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_POLE: i32 = 3;
pub const EXIT_NOT_CLOSED: i32 = 4;

/// Exit status for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::PoleEncountered(_) | Error::FrameOverflow { .. } | Error::StepSizeUnderflow { .. } => EXIT_POLE,
        Error::NonClosedForm { .. } | Error::AsymmetricMixedDerivatives(_) => EXIT_NOT_CLOSED,
        Error::Io(_) => EXIT_FAILED,
        _ => EXIT_INPUT,
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Verify { suite } => cmd_verify(suite.into()),
        Command::Template { preset } => cmd_template(preset.as_deref()),
        Command::Solve(a) => report(a, cmd_solve),
        Command::Surface(a) => report(a, cmd_surface),
        Command::Geometry(a) => report(a, cmd_geometry),
        Command::Umbilic(a) => report(a, cmd_umbilic),
    }
}

fn report(args: RunArgs, f: fn(&RunConfig, &Path) -> Result<Vec<PathBuf>>) -> i32 {
    let outcome = RunConfig::load(&args.config).and_then(|cfg| {
        let dir = args.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
        std::fs::create_dir_all(&dir)?;
        f(&cfg, &dir)
    });
    match outcome {
        Ok(files) => {
            for p in files {
                println!("wrote {}", p.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn cmd_template(preset: Option<&str>) -> i32 {
    match preset {
        None => {
            print!("{TEMPLATE}");
            EXIT_OK
        }
        Some(name) => match crate::config::preset(name) {
            Some(text) => {
                print!("{text}");
                EXIT_OK
            }
            None => {
                eprintln!("error: unknown preset {name:?} (known: fig1, fig2)");
                EXIT_INPUT
            }
        },
    }
}

fn cmd_verify(suite: Suite) -> i32 {
    let checks = verify::run(suite);
    let mut out = std::io::stdout().lock();
    for c in &checks {
        let _ = writeln!(out, "{c}");
    }
    if checks.iter().all(|c| c.passed()) {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn cmd_solve(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let tr = cfg.trajectory()?;
    let path = dir.join("trajectory.csv");
    let mut w = create(&path)?;
    tr.write_csv(&mut w)?;
    w.flush()?;
    match tr.pole_flag() {
        Some(t) => Err(Error::PoleEncountered(t)),
        None => Ok(vec![path]),
    }
}

pub fn build_surface(cfg: &RunConfig) -> Result<SurfaceGrid> {
    let spec = cfg.grid_spec()?;
    let host = cfg.host()?;
    let pair = LaxPair::new(host.params())?;
    let tol = cfg.tolerances();
    let choice = cfg.choice();
    let quadrature = cfg.custom_tangents().is_some() || choice.alpha[5] != 0.0 || cfg.symmetry.method == Method::Quadrature;
    if quadrature && cfg.representation() == Representation::MovingFrame {
        return Err(Error::Config("representation = \"moving_frame\" needs method = \"closed_form\"".into()));
    }
    if !quadrature && cfg.representation() == Representation::MovingFrame {
        return immersion_closed_form(None, &pair, &host, &spec, &choice);
    }
    let frame = integrate_frame(&pair, &host, &spec, tol, PathOrder::TimeFirst)?;
    if !quadrature {
        return immersion_closed_form(Some(&frame), &pair, &host, &spec, &choice);
    }
    let field = match cfg.custom_tangents() {
        Some((a, b)) => constant_tangent_field(&pair, &host, &spec, a, b)?,
        None => tangent_field(&pair, &host, &spec, &choice, cfg.r_solution(&host)?.as_ref())?,
    };
    immersion_quadrature(&frame, &field)
}

fn cmd_surface(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let surface = build_surface(cfg)?;
    let obj = dir.join("surface.obj");
    let csv = dir.join("surface.csv");
    let mut w = create(&obj)?;
    mesh::write_obj(&surface, &mut w)?;
    w.flush()?;
    let mut w = create(&csv)?;
    mesh::write_csv(&surface, &mut w)?;
    w.flush()?;
    Ok(vec![obj, csv])
}

fn tangents(cfg: &RunConfig) -> Result<(GridSpec, Vec<Option<TangentField>>)> {
    let spec = cfg.grid_spec()?;
    spec.validate()?;
    let host = cfg.host()?;
    let pair = LaxPair::new(host.params())?;
    let field = match cfg.custom_tangents() {
        Some((a, b)) => constant_tangent_field(&pair, &host, &spec, a, b)?,
        None => tangent_field(&pair, &host, &spec, &cfg.choice(), cfg.r_solution(&host)?.as_ref())?,
    };
    Ok((spec, field))
}

/// Forms and curvatures on the configured grid (no wave function needed).
pub fn build_geometry(cfg: &RunConfig) -> Result<CurvatureField> {
    let (spec, field) = tangents(cfg)?;
    CurvatureField::from_tangents(&spec, &field)
}

fn cmd_geometry(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let geometry = build_geometry(cfg)?;
    let path = dir.join("geometry.csv");
    let mut w = create(&path)?;
    geometry.write_csv(&mut w)?;
    w.flush()?;
    Ok(vec![path])
}

fn cmd_umbilic(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let geometry = build_geometry(cfg)?;
    let host = cfg.host()?;
    let pair = LaxPair::new(host.params())?;
    let choice = cfg.choice();
    let r = cfg.r_solution(&host)?;
    let custom = cfg.custom_tangents().is_some();
    let measure = |t: f64, l: f64| {
        if custom {
            return None;
        }
        let tf = tangent_at(&pair, &host, &choice, r.as_ref(), t, l).ok()?;
        NodeGeometry::from_tangent(&tf).ok()?.umbilic_measure()
    };
    let points = umbilic_locus(&geometry, measure);
    let path = dir.join("umbilic.csv");
    let mut w = create(&path)?;
    writeln!(w, "t,lambda")?;
    for (t, l) in points {
        writeln!(w, "{},{}", fmt17(t), fmt17(l))?;
    }
    w.flush()?;
    Ok(vec![path])
}
