//! `planar`: build normed-plane models from spec files, classify them,
//! compute moduli and orbits, and reproduce the gallery checks.
//!
//! Exit status: 0 on success, 1 when a reproduced assertion fails,
//! 2 on bad usage or unreadable input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use planar_norms::classify::classify;
use planar_norms::curvature::profile;
use planar_norms::curve_builder::{build_nobst, k_at_one_series, nobst_witness, DEFAULT_DEPTH};
use planar_norms::geometry::Vec2;
use planar_norms::moduli::{delta_grid, power2_fit, uc_curve, ModulusCurve, UC_SWEEP};
use planar_norms::report::Report;
use planar_norms::reproduce;
use planar_norms::semigroup::{orbit_map, ContractionCertificate};
use planar_norms::spec_file::ModelSpec;
use planar_norms::svg::{render, Overlay};
use planar_norms::tangency::{tangency_report, TangencyReport};
use planar_norms::{Error, NormModel};

#[derive(Parser)]
#[command(name = "planar", version, about = "Numerical laboratory for normed planes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full ST / BST / UMST verdict as JSON.
    Classify { model: PathBuf },
    /// Curvature profile as CSV plus an SVG of the sphere.
    Curvature {
        model: PathBuf,
        /// Number of sample angles.
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the sphere SVG here (default: `<model>.svg`).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Modulus of uniform convexity on an ε grid, as JSON (or CSV).
    Moduli {
        model: PathBuf,
        /// Comma-separated ε values in (0, 2].
        #[arg(long, value_delimiter = ',')]
        eps_grid: Option<Vec<f64>>,
        #[arg(long)]
        csv: bool,
    },
    /// Contractive map between two sphere points, or the obstruction.
    Orbit {
        model: PathBuf,
        /// Polar angle of the source point.
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        /// Polar angle of the target point.
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
    },
    /// Build the staircase-curvature model and report its witnesses.
    BuildNobst {
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: u32,
        /// Save the model (explicit arcs) as a spec file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Save the curve samples as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// SVG of the unit sphere with optional overlays.
    Render {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = OverlayArg::None)]
        overlay: OverlayArg,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named gallery check and print PASS/FAIL per assertion.
    Reproduce {
        #[arg(value_enum)]
        name: Reproduction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OverlayArg {
    None,
    Discs,
    Ellipses,
}

#[derive(Clone, Copy, ValueEnum)]
enum Reproduction {
    Figure1,
    L1Orbits,
    QuadrantMix,
    GrandpaPig,
    Splicing,
    Nobst,
}

impl Reproduction {
    fn name(self) -> &'static str {
        match self {
            Reproduction::Figure1 => "figure1",
            Reproduction::L1Orbits => "l1-orbits",
            Reproduction::QuadrantMix => "quadrant-mix",
            Reproduction::GrandpaPig => "grandpa-pig",
            Reproduction::Splicing => "splicing",
            Reproduction::Nobst => "nobst",
        }
    }
}

#[derive(Serialize)]
struct CurvatureSummary {
    samples: usize,
    kappa_min: f64,
    kappa_max: f64,
    csv: Option<String>,
    svg: String,
}

#[derive(Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
enum OrbitOutcome {
    Certificate { certificate: ContractionCertificate },
    Obstruction { from_tangency: TangencyReport, to_tangency: TangencyReport },
}

#[derive(Serialize)]
struct OrbitResult {
    from: Vec2,
    to: Vec2,
    #[serde(flatten)]
    outcome: OrbitOutcome,
}

#[derive(Serialize)]
struct NobstSummary {
    depth: u32,
    k_at_one: f64,
    k_at_one_series: f64,
    endpoint: Vec2,
    end_heading: f64,
    witnesses: Vec<(u32, f64)>,
}

fn load(path: &Path) -> Result<(ModelSpec, NormModel), Error> {
    let spec = ModelSpec::load(path)?;
    let model = spec.build()?;
    Ok((spec, model))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Classify { model } => {
            let (spec, m) = load(&model)?;
            println!("{}", Report::new("classify", Some(spec), classify(&m)).to_json());
        }
        Command::Curvature { model, samples, csv, svg } => {
            if samples == 0 {
                return Err(Error::BadParameter("--samples must be positive".into()));
            }
            let (spec, m) = load(&model)?;
            let prof = profile(&m, samples);
            let svg_path = svg.unwrap_or_else(|| model.with_extension("svg"));
            write(&svg_path, &render(&m, Overlay::None, &[]))?;
            match &csv {
                Some(p) => {
                    write(p, &prof.to_csv())?;
                    let summary = CurvatureSummary {
                        samples,
                        kappa_min: prof.kappa_min,
                        kappa_max: prof.kappa_max,
                        csv: Some(p.display().to_string()),
                        svg: svg_path.display().to_string(),
                    };
                    println!("{}", Report::new("curvature", Some(spec), summary).to_json());
                }
                None => print!("{}", prof.to_csv()),
            }
        }
        Command::Moduli { model, eps_grid, csv } => {
            let (spec, m) = load(&model)?;
            let grid = eps_grid.unwrap_or_else(delta_grid);
            if grid.is_empty() {
                return Err(Error::BadParameter("--eps-grid is empty".into()));
            }
            let curve: ModulusCurve = uc_curve(&m, &grid, UC_SWEEP)?;
            debug_assert_eq!(curve.power2_coeff, power2_fit(&curve));
            if csv {
                print!("{}", curve.to_csv());
            } else {
                println!("{}", Report::new("moduli", Some(spec), curve).to_json());
            }
        }
        Command::Orbit { model, from, to } => {
            let (spec, m) = load(&model)?;
            let (x, y) = (m.sphere_point(from), m.sphere_point(to));
            let outcome = match orbit_map(&m, &x, &y) {
                Some(certificate) => OrbitOutcome::Certificate { certificate },
                None => OrbitOutcome::Obstruction {
                    from_tangency: tangency_report(&m, &x),
                    to_tangency: tangency_report(&m, &y),
                },
            };
            let result = OrbitResult {
                from: x.point,
                to: y.point,
                outcome,
            };
            println!("{}", Report::new("orbit", Some(spec), result).to_json());
        }
        Command::BuildNobst { depth, out, csv } => {
            let build = build_nobst(depth)?;
            if let Some(p) = &out {
                write(p, &build.model.explicit_spec().to_toml_string()?)?;
            }
            if let Some(p) = &csv {
                write(p, &build.curve.to_csv())?;
            }
            let ns: Vec<u32> = (0..=depth.min(8)).collect();
            let summary = NobstSummary {
                depth,
                k_at_one: build.k.integral(1.0)?,
                k_at_one_series: k_at_one_series(depth),
                endpoint: build.curve.endpoint,
                end_heading: build.curve.end_heading,
                witnesses: nobst_witness(&build, &ns)?,
            };
            println!("{}", Report::new("build-nobst", Some(ModelSpec::Nobst { depth }), summary).to_json());
        }
        Command::Render { model, overlay, out } => {
            let (_, m) = load(&model)?;
            let overlay = match overlay {
                OverlayArg::None => Overlay::None,
                OverlayArg::Discs => Overlay::Discs,
                OverlayArg::Ellipses => Overlay::Ellipses,
            };
            let svg = render(&m, overlay, &[]);
            match out {
                Some(p) => write(&p, &svg)?,
                None => print!("{svg}"),
            }
        }
        Command::Reproduce { name } => {
            let checks = reproduce::run(name.name()).expect("every variant is a known reproduction");
            for c in &checks {
                println!("{c}");
            }
            if checks.iter().any(|c| !c.pass) {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
