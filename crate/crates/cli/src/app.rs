//! Argument parsing and command dispatch for the `dhstab` binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use dhstab::nearstab::{GEN_DELTA, GEN_EPS};
use dhstab::regions::raster;
use dhstab::{
    certify_stability, compose, gen_instance, is_stable_eig, solve_nearest, Catalog, CertifyOutcome, Complex64,
    ConicConfig, DMatrix, Mode, NearStabConfig, Region, Scalar, Window,
};

use crate::complex::parse_complex_literal;
use crate::error::{CliError, CliResult, EXIT_OK, EXIT_UNSTABLE};
use crate::matio::{read_matrix, write_matrix, MatrixData};
use crate::plot::{auto_window, eigen_csv, raster_csv, render_svg, Series};
use crate::report::{
    write_toml, Artifacts, CertificateEntry, CheckReport, EigenEntry, GenReport, GroundTruth, NearestConfig, RunReport,
};
use crate::spec::load_region;

#[derive(Debug, Parser)]
#[command(name = "dhstab", version, about = "Region stability checks and nearest stable matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect the region catalog and evaluate region specs.
    #[command(subcommand)]
    Regions(RegionsCommand),
    /// Eigenvalue stability verdict, optionally with an LMI certificate.
    Check(CheckArgs),
    /// Nearest region-stable matrix in Frobenius norm.
    Nearest(NearestArgs),
    /// Random region-stable matrix plus Gaussian noise.
    Gen(GenArgs),
    /// SVG scatter of eigenvalues over the shaded region.
    PlotEigs(PlotArgs),
}

#[derive(Debug, Subcommand)]
pub enum RegionsCommand {
    /// List node kinds and their parameters.
    List,
    /// Membership margins at given points.
    Eval {
        #[arg(long)]
        region: PathBuf,
        /// Complex literal such as `-1+3i`; may be repeated.
        #[arg(long = "point", required = true, allow_hyphen_values = true)]
        points: Vec<String>,
    },
    /// Margins on a grid, as CSV.
    Raster {
        #[arg(long)]
        region: PathBuf,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Window,
        #[arg(long, value_parser = parse_resolution, default_value = "101,101")]
        resolution: (usize, usize),
        /// Output CSV; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Matrix file (`.mtx` MatrixMarket array, or real `.csv`).
    #[arg(long)]
    pub matrix: PathBuf,
    /// Region spec (TOML).
    #[arg(long)]
    pub region: PathBuf,
    /// Also search for an LMI certificate.
    #[arg(long)]
    pub certificate: bool,
    /// Write a TOML report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NearestArgs {
    /// Matrix file (`.mtx` MatrixMarket array, or real `.csv`).
    #[arg(long)]
    pub matrix: PathBuf,
    /// Region spec (TOML).
    #[arg(long)]
    pub region: PathBuf,
    /// Output matrix file (`.mtx` or `.csv`).
    #[arg(long)]
    pub out: PathBuf,
    /// Write a TOML run report.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Maximum number of outer iterations.
    #[arg(long, default_value_t = 500)]
    pub maxit: usize,
    /// Relative objective improvement below which the solver stops.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// LMI margin; defaults to `1e-6 (1 + ||A||_F)`.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Lower bound on the eigenvalues of `P`.
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    /// Outer iterations between `(J, R)` re-optimizations; 0 disables them.
    #[arg(long, default_value_t = 10)]
    pub refine_period: usize,
    /// Also write an eigenvalue plot of the input and the result.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Plot window `xmin,xmax,ymin,ymax`; fitted to the data when omitted.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: Option<Window>,
    /// Raster nodes `nx,ny` (or a single `n`).
    #[arg(long, value_parser = parse_resolution, default_value = "300,300")]
    pub resolution: (usize, usize),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Region spec (TOML).
    #[arg(long)]
    pub region: PathBuf,
    /// Matrix size.
    #[arg(long)]
    pub n: usize,
    /// Noise-to-signal ratio of the added Gaussian noise.
    #[arg(long, default_value_t = 1.0)]
    pub eps_noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output matrix file; ground-truth factors are written next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Metadata document; defaults to `<out stem>.meta.toml`.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Draw complex entries (implied by extended regions).
    #[arg(long)]
    pub complex: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Matrix files, one marker series each; may be repeated or omitted.
    #[arg(long = "matrix")]
    pub matrices: Vec<PathBuf>,
    /// Region spec (TOML).
    #[arg(long)]
    pub region: PathBuf,
    /// Plot window `xmin,xmax,ymin,ymax`; fitted to the data when omitted.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: Option<Window>,
    /// Raster nodes `nx,ny` (or a single `n`).
    #[arg(long, value_parser = parse_resolution, default_value = "300,300")]
    pub resolution: (usize, usize),
    /// Output SVG.
    #[arg(long)]
    pub out: PathBuf,
    /// Prefix for `<prefix>_eigs.csv` and `<prefix>_raster.csv`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// `xmin,xmax,ymin,ymax`.
pub fn parse_window(s: &str) -> Result<Window, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number '{}' in window", t.trim())))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [a, b, c, d] => Window::new(a, b, c, d).map_err(|e| e.to_string()),
        _ => Err("window must be xmin,xmax,ymin,ymax".into()),
    }
}

/// `nx,ny`, or a single count for a square grid.
pub fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    let v: Vec<usize> = s
        .split([',', 'x'])
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad count '{}' in resolution", t.trim())))
        .collect::<Result<_, _>>()?;
    let (nx, ny) = match v[..] {
        [n] => (n, n),
        [nx, ny] => (nx, ny),
        _ => return Err("resolution must be nx,ny".into()),
    };
    if nx < 2 || ny < 2 {
        return Err("resolution must be at least 2 in each direction".into());
    }
    Ok((nx, ny))
}

/// Runs a parsed command, printing errors to standard error. Returns the
/// process exit status.
pub fn run(cli: Cli, out: &mut dyn Write) -> u8 {
    let result = match cli.command {
        Command::Regions(cmd) => cmd_regions(cmd, out),
        Command::Check(args) => cmd_check(&args, out),
        Command::Nearest(args) => cmd_nearest(&args, out),
        Command::Gen(args) => cmd_gen(&args, out),
        Command::PlotEigs(args) => cmd_plot(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(out: &mut dyn Write, text: std::fmt::Arguments<'_>) -> CliResult<()> {
    out.write_fmt(text)
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => { emit($out, format_args!($($arg)*)) };
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn to_data<T: Scalar>(m: &DMatrix<T>) -> MatrixData {
    if T::IS_COMPLEX {
        MatrixData::Complex(m.map(|x| x.to_c64()))
    } else {
        MatrixData::Real(m.map(|x| x.to_c64().re))
    }
}

fn eigenvalues(m: &MatrixData) -> CliResult<Vec<Complex64>> {
    Ok(match m {
        MatrixData::Real(a) => dhstab::linalg::general_eig(a)?.values,
        MatrixData::Complex(a) => dhstab::linalg::general_eig(a)?.values,
    })
}

fn square(m: &MatrixData, path: &Path) -> CliResult<usize> {
    match m.shape() {
        (r, c) if r == c => Ok(r),
        (r, c) => Err(CliError::Input(format!("{}: matrix must be square, got {r}x{c}", path.display()))),
    }
}

fn cmd_regions(cmd: RegionsCommand, out: &mut dyn Write) -> CliResult<u8> {
    match cmd {
        RegionsCommand::List => {
            let samples = [
                Catalog::LeftConic { a: 0.0, theta: 0.0 },
                Catalog::RightConic { a: 0.0, theta: 0.0 },
                Catalog::Disk { q: 0.0, r: 0.0 },
                Catalog::VerticalStrip { h: 0.0, k: 0.0 },
                Catalog::LeftHalfPlane { k: 0.0 },
                Catalog::RightHalfPlane { h: 0.0 },
                Catalog::Ellipse { q_e: 0.0, a_e: 0.0, b_e: 0.0 },
                Catalog::LeftParabola { q_p: 0.0, c_p: 0.0 },
                Catalog::RightParabola { q_p: 0.0, c_p: 0.0 },
                Catalog::LeftHyperbola { a_h: 0.0, b_h: 0.0 },
                Catalog::RightHyperbola { a_h: 0.0, b_h: 0.0 },
                Catalog::HorizontalStrip { w: 0.0 },
            ];
            for kind in samples {
                let names: Vec<&str> = kind.params().iter().map(|(n, _)| *n).collect();
                say!(out, "{:<18} {}", kind.identifier(), names.join(" "))?;
            }
            say!(out, "hurwitz")?;
            say!(out, "schur")?;
            say!(out, "{:<18} b c [mode]", "custom")?;
            say!(out, "{:<18} members", "intersection")?;
            say!(out, "{:<18} alpha base", "translate")?;
            say!(out, "{:<18} alpha base", "scale_rotate")?;
            Ok(EXIT_OK)
        }
        RegionsCommand::Eval { region, points } => {
            let (_, region) = load_region(&region)?;
            for p in &points {
                let z = parse_complex_literal(p).map_err(|e| CliError::Input(e.to_string()))?;
                let m = region.membership_margin(z);
                say!(out, "{p}\t{m:e}\t{}", if m < 0.0 { "inside" } else { "outside" })?;
            }
            Ok(EXIT_OK)
        }
        RegionsCommand::Raster { region, window, resolution, out: path } => {
            let (_, region) = load_region(&region)?;
            let r = raster(&region, window, resolution.0, resolution.1)?;
            let text = raster_csv(&r);
            match path {
                Some(p) => write_text(&p, &text)?,
                None => out.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))?,
            }
            Ok(EXIT_OK)
        }
    }
}

fn certificate_entry<T: Scalar>(region: &Region, a: &DMatrix<T>, stable: bool) -> CliResult<CertificateEntry> {
    let outcome = certify_stability(region, a, &ConicConfig::default())?;
    Ok(match outcome {
        CertifyOutcome::Certified(cert) => CertificateEntry {
            status: "certified".into(),
            delta: Some(cert.delta),
            reason: None,
            diagnostic: (!stable).then(|| "certificate found for a matrix the eigenvalue test rejects".into()),
        },
        CertifyOutcome::Infeasible(rep) => CertificateEntry {
            status: "infeasible".into(),
            delta: None,
            reason: Some(format!("{:?}", rep.reason)),
            diagnostic: stable.then(|| "no certificate found although all eigenvalues are inside; the eigenvalue test prevails".into()),
        },
    })
}

fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> CliResult<u8> {
    let a = read_matrix(&args.matrix)?;
    square(&a, &args.matrix)?;
    let (spec, region) = load_region(&args.region)?;
    let verdict = match &a {
        MatrixData::Real(m) => is_stable_eig(&region, m)?,
        MatrixData::Complex(m) => is_stable_eig(&region, m)?,
    };
    for (z, m) in verdict.eigenvalues.iter().zip(&verdict.margins) {
        say!(out, "eigenvalue {:>+16.10} {:>+16.10}i  margin {m:>+.4e}", z.re, z.im)?;
    }
    let label = if verdict.stable { "stable" } else { "unstable" };
    say!(out, "verdict: {label} (worst margin {:e})", verdict.worst_margin)?;

    let certificate = if args.certificate {
        let entry = match (&a, region.mode()) {
            (MatrixData::Real(m), Mode::Real) => certificate_entry(&region, m, verdict.stable)?,
            _ => certificate_entry(&region, &a.to_complex(), verdict.stable)?,
        };
        match entry.delta {
            Some(d) => say!(out, "certificate: found, delta = {d:e}")?,
            None => say!(out, "certificate: not found ({})", entry.reason.as_deref().unwrap_or("unknown"))?,
        }
        if let Some(d) = &entry.diagnostic {
            say!(out, "diagnostic: {d}")?;
        }
        Some(entry)
    } else {
        None
    };

    if let Some(path) = &args.report {
        let report = CheckReport {
            command: "check".into(),
            matrix: args.matrix.display().to_string(),
            verdict: label.into(),
            worst_margin: verdict.worst_margin,
            eigenvalues: verdict
                .eigenvalues
                .iter()
                .zip(&verdict.margins)
                .map(|(z, &margin)| EigenEntry { re: z.re, im: z.im, margin })
                .collect(),
            certificate,
            region: spec,
        };
        write_toml(path, &report)?;
    }
    Ok(if verdict.stable { EXIT_OK } else { EXIT_UNSTABLE })
}

struct NearestOutcome {
    a_tilde: MatrixData,
    relative_error: f64,
    stability_margin: f64,
    iterations: usize,
    wall_time: f64,
    trajectory: Vec<f64>,
    delta: f64,
}

fn solve_typed<T: Scalar>(a: &DMatrix<T>, region: &Region, cfg: &NearStabConfig) -> CliResult<NearestOutcome> {
    let res = solve_nearest(a, region, cfg)?;
    Ok(NearestOutcome {
        a_tilde: to_data(&res.a_tilde),
        relative_error: res.relative_error,
        stability_margin: res.stability_margin,
        iterations: res.iterations,
        wall_time: res.wall_time,
        trajectory: res.objective_trajectory,
        delta: cfg.delta_for(a),
    })
}

fn cmd_nearest(args: &NearestArgs, out: &mut dyn Write) -> CliResult<u8> {
    let a = read_matrix(&args.matrix)?;
    square(&a, &args.matrix)?;
    let (spec, region) = load_region(&args.region)?;
    let cfg = NearStabConfig {
        max_outer_iterations: args.maxit,
        rel_improvement_tol: args.tol,
        delta: args.delta,
        eps: args.eps,
        refine_period: args.refine_period,
        ..NearStabConfig::default()
    };
    cfg.validate()?;

    let outcome = match (&a, region.mode()) {
        (MatrixData::Real(m), Mode::Real) => solve_typed(m, &region, &cfg),
        _ => solve_typed(&a.to_complex(), &region, &cfg),
    };

    let mut report = RunReport {
        command: "nearest".into(),
        status: "ok".into(),
        error: None,
        matrix: args.matrix.display().to_string(),
        relative_error: None,
        stability_margin: None,
        iterations: None,
        wall_time: None,
        config: NearestConfig {
            max_outer_iterations: cfg.max_outer_iterations,
            rel_improvement_tol: cfg.rel_improvement_tol,
            delta: cfg.delta.unwrap_or(1e-6 * (1.0 + a.fro())),
            eps: cfg.eps,
            refine_period: cfg.refine_period,
        },
        artifacts: Artifacts::default(),
        objective_trajectory: Vec::new(),
        region: spec,
    };

    let res = match outcome {
        Ok(res) => res,
        Err(e) => {
            report.status = "failed".into();
            report.error = Some(e.to_string());
            if let Some(path) = &args.report {
                write_toml(path, &report)?;
            }
            return Err(match e {
                CliError::Core(inner) => CliError::Solver(inner.to_string()),
                other => other,
            });
        }
    };

    write_matrix(&args.out, &res.a_tilde)?;
    report.artifacts.matrix = Some(args.out.display().to_string());
    if let Some(plot) = &args.plot {
        let series = vec![
            Series { label: "A".into(), points: eigenvalues(&a)? },
            Series { label: "A_tilde".into(), points: eigenvalues(&res.a_tilde)? },
        ];
        write_plot(&region, &series, args.window, args.resolution, plot, None)?;
        report.artifacts.plot = Some(plot.display().to_string());
    }
    report.relative_error = Some(res.relative_error);
    report.stability_margin = Some(res.stability_margin);
    report.iterations = Some(res.iterations);
    report.wall_time = Some(res.wall_time);
    report.config.delta = res.delta;
    report.objective_trajectory = res.trajectory;
    if let Some(path) = &args.report {
        write_toml(path, &report)?;
    }
    say!(
        out,
        "relative error {:.6e}, stability margin {:.3e}, {} iterations, {:.2} s",
        res.relative_error,
        res.stability_margin,
        res.iterations,
        res.wall_time
    )?;
    Ok(EXIT_OK)
}

fn sibling(out: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("matrix");
    out.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn gen_typed<T: Scalar>(args: &GenArgs, region: &Region) -> CliResult<(MatrixData, [MatrixData; 4])> {
    let inst = gen_instance::<T>(region, args.n, args.eps_noise, args.seed, &ConicConfig::default())?;
    let t = inst.ground_truth.expect("generated instances carry their triplet");
    let clean = compose(&t)?;
    Ok((to_data(&inst.a), [to_data(&t.j), to_data(&t.r), to_data(&t.p), to_data(&clean)]))
}

fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> CliResult<u8> {
    let (spec, region) = load_region(&args.region)?;
    let complex = args.complex || region.mode() == Mode::Extended;
    let (a, truth) = if complex { gen_typed::<Complex64>(args, &region)? } else { gen_typed::<f64>(args, &region)? };

    let ext = match (&a, crate::matio::FileFormat::for_path(&args.out)) {
        (MatrixData::Real(_), crate::matio::FileFormat::Csv) => "csv",
        _ => "mtx",
    };
    write_matrix(&args.out, &a)?;
    let names = ["J", "R", "P", "clean"].map(|s| sibling(&args.out, &format!(".{s}"), ext));
    for (m, path) in truth.iter().zip(&names) {
        write_matrix(path, m)?;
    }
    let meta = args.report.clone().unwrap_or_else(|| sibling(&args.out, ".meta", "toml"));
    let display = |p: &PathBuf| p.display().to_string();
    write_toml(
        &meta,
        &GenReport {
            command: "gen".into(),
            matrix: display(&args.out),
            n: args.n,
            eps_noise: args.eps_noise,
            seed: args.seed,
            complex,
            rng: "ChaCha8 (rand_chacha, seed_from_u64) with ziggurat standard normals (rand_distr)".into(),
            gen_delta: GEN_DELTA,
            gen_eps: GEN_EPS,
            ground_truth: GroundTruth {
                j: display(&names[0]),
                r: display(&names[1]),
                p: display(&names[2]),
                clean: display(&names[3]),
            },
            region: spec,
        },
    )?;
    say!(out, "wrote {} (seed {}, noise {})", args.out.display(), args.seed, args.eps_noise)?;
    Ok(EXIT_OK)
}

fn write_plot(
    region: &Region,
    series: &[Series],
    window: Option<Window>,
    resolution: (usize, usize),
    path: &Path,
    csv_prefix: Option<&Path>,
) -> CliResult<()> {
    let all: Vec<Complex64> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    let window = window.unwrap_or_else(|| auto_window(&all));
    let r = raster(region, window, resolution.0, resolution.1)?;
    write_text(path, &render_svg(region, &r, series))?;
    if let Some(prefix) = csv_prefix {
        write_text(&sibling(prefix, "_eigs", "csv"), &eigen_csv(region, series))?;
        write_text(&sibling(prefix, "_raster", "csv"), &raster_csv(&r))?;
    }
    Ok(())
}

fn cmd_plot(args: &PlotArgs, out: &mut dyn Write) -> CliResult<u8> {
    let (_, region) = load_region(&args.region)?;
    let mut series = Vec::new();
    for path in &args.matrices {
        let m = read_matrix(path)?;
        square(&m, path)?;
        let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("matrix").to_string();
        series.push(Series { label, points: eigenvalues(&m)? });
    }
    write_plot(&region, &series, args.window, args.resolution, &args.out, args.csv.as_deref())?;
    say!(out, "wrote {}", args.out.display())?;
    Ok(EXIT_OK)
}
