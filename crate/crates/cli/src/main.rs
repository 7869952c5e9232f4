//! Command-line frontend: parses model documents, drives the engine, and
//! emits human-readable or JSON reports.
//!
//! Exit codes: 0 on success, 1 on model validation failures or operation
//! errors (including failed theorem validators), 2 on usage errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nefkit::analysis::{bpf_certificate, divisor_report, BpfHypotheses};
use nefkit::error::Error;
use nefkit::mmp::{run_mmp, validate_length_bounds, MmpConfig, MmpMode};
use nefkit::model::{parse_divisor_expr, parse_model_file, ModelDocument};
use nefkit::polytope::{decompose_boundary, length_constant, nef_polytope, BoundaryCube};
use nefkit::rational::Rational;
use nefkit::report::{
    AnalyzeReport, DecompositionView, GraphCheck, LcStructureEntry, LcStructureReport, MmpReport,
    PolytopeReport, Report, SingularityEntry, SingularityReport, ValidateReport,
};
use nefkit::singularities::{
    discrepancies, fundamental_cycle, is_minimal_resolution, lc_contraction_sequence,
};
use nefkit::surface::{validate_model, Boundary, BoundaryMode, FieldTag, SurfaceModel};

#[derive(Parser)]
#[command(name = "nefkit", version, about = "Exact intersection theory and minimal model programs for normal surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model document against every structural and semantic invariant.
    Validate(CommonArgs),
    /// Solve discrepancies and classify the singularities of the resolution graphs.
    ClassifySingularity(ClassifyArgs),
    /// Run the minimal model program and classify the end state.
    MmpRun(MmpArgs),
    /// Compute the nef-boundary polytope over the boundary cube.
    NefPolytope(PolytopeArgs),
    /// Divisor certificates: nef/big tests, degree-zero locus, Euler characteristic.
    Analyze(AnalyzeArgs),
    /// Run the lc one-curve contraction structure sequence per graph.
    LcStructure(ClassifyArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Model document path.
    input: PathBuf,
    /// Emit the machine-readable JSON report instead of tables.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    input: PathBuf,
    #[arg(long)]
    json: bool,
    /// Restrict to one named resolution graph.
    #[arg(long)]
    graph: Option<String>,
    /// Print the DOT export of the selected graphs and exit.
    #[arg(long)]
    dot: bool,
}

#[derive(Args)]
struct MmpArgs {
    input: PathBuf,
    #[arg(long)]
    json: bool,
    #[arg(long, value_enum, default_value_t = ModeArg::Qf)]
    mode: ModeArg,
    /// Contract only vertical curves and classify relative to the fibration.
    #[arg(long)]
    relative: bool,
    /// Step cap; defaults to the catalog size, which always suffices.
    #[arg(long)]
    max_steps: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Qf,
    Fp,
    Lc,
}

impl From<ModeArg> for MmpMode {
    fn from(m: ModeArg) -> MmpMode {
        match m {
            ModeArg::Qf => MmpMode::Qf,
            ModeArg::Fp => MmpMode::Fp,
            ModeArg::Lc => MmpMode::Lc,
        }
    }
}

#[derive(Args)]
struct PolytopeArgs {
    input: PathBuf,
    #[arg(long)]
    json: bool,
    /// Comma-separated curve ids to constrain against; defaults to the
    /// whole catalog.
    #[arg(long, value_delimiter = ',')]
    curves: Vec<String>,
    /// Decompose the document's boundary as a convex combination of vertices.
    #[arg(long)]
    decompose: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    input: PathBuf,
    #[arg(long)]
    json: bool,
    /// Divisor as comma-separated `id=p/q` terms (`K` addresses the
    /// canonical class); defaults to K plus the document boundary.
    #[arg(long)]
    divisor: Option<String>,
    /// Also run the basepoint-freeness hypothesis check on the divisor.
    #[arg(long)]
    bpf: bool,
    /// Declare the divisor Cartier for the certificate.
    #[arg(long)]
    cartier: bool,
    /// Declare D - (K+Delta) semi-ample instead of checking nef-and-big.
    #[arg(long)]
    semi_ample: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load(path: &Path) -> Result<(ModelDocument, SurfaceModel, Boundary), Error> {
    let doc = parse_model_file(path)?;
    let (model, boundary) = doc.to_surface_model()?;
    Ok((doc, model, boundary))
}

/// Boundary-range policy outside an explicit MMP mode: coefficients above 1
/// are meaningful only over fbar_p.
fn default_boundary_mode(model: &SurfaceModel) -> BoundaryMode {
    match model.field {
        FieldTag::FbarP => BoundaryMode::Unrestricted,
        FieldTag::Generic => BoundaryMode::Boundary,
    }
}

fn emit(report: &Report, json: bool) {
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{report}");
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Validate(args) => {
            let (doc, model, boundary) = load(&args.input)?;
            let validation = validate_model(&model, &boundary, default_boundary_mode(&model));
            let graphs = doc
                .to_graphs()?
                .iter()
                .map(|g| GraphCheck {
                    name: g.name.clone(),
                    negative_definite: g.gram().is_negative_definite(),
                })
                .collect::<Vec<_>>();
            let ok = validation.is_clean() && graphs.iter().all(|g| g.negative_definite);
            let report = Report::Validate(ValidateReport {
                model: model.name.clone(),
                report: validation,
                graphs,
                ok,
            });
            emit(&report, args.json);
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::ClassifySingularity(args) => {
            let (doc, model, _) = load(&args.input)?;
            let graphs = select_graphs(&doc, args.graph.as_deref())?;
            if args.dot {
                for g in &graphs {
                    print!("{}", g.to_dot());
                }
                return Ok(ExitCode::SUCCESS);
            }
            let mut entries = Vec::new();
            for g in &graphs {
                let disc = discrepancies(g)?;
                let minimal = is_minimal_resolution(g)?;
                let cycle = if g.is_connected() {
                    Some(fundamental_cycle(g)?)
                } else {
                    None
                };
                entries.push(SingularityEntry {
                    graph: g.name.clone(),
                    discrepancies: disc,
                    minimal_resolution: minimal.is_minimal,
                    fundamental_cycle: cycle,
                });
            }
            let report = Report::ClassifySingularity(SingularityReport {
                model: model.name.clone(),
                entries,
            });
            emit(&report, args.json);
            Ok(ExitCode::SUCCESS)
        }
        Command::MmpRun(args) => {
            let (_, model, boundary) = load(&args.input)?;
            let cfg = MmpConfig {
                mode: args.mode.into(),
                relative: args.relative,
                max_steps: args.max_steps,
            };
            let run = run_mmp(&model, &boundary, &cfg)?;
            let length_bounds = match cfg.mode.boundary_mode() {
                BoundaryMode::Boundary => Some(validate_length_bounds(&run)?),
                BoundaryMode::Unrestricted => None,
            };
            let ok = run.all_validators_passed()
                && length_bounds.as_ref().is_none_or(|lb| lb.passed);
            let report = Report::MmpRun(MmpReport::from_run(&model.name, &run, length_bounds));
            emit(&report, args.json);
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::NefPolytope(args) => {
            let (_, model, boundary) = load(&args.input)?;
            let cube = BoundaryCube::from_boundary(&boundary)?;
            let curve_set: Vec<String> = if args.curves.is_empty() {
                model.curves.iter().map(|c| c.id.clone()).collect()
            } else {
                args.curves.clone()
            };
            let polytope = nef_polytope(&model, &cube, &curve_set)?;
            let m_constant = length_constant(&model, &cube)?;
            let decomposition = if args.decompose {
                let terms = decompose_boundary(&boundary, &polytope)?;
                Some(DecompositionView::new(terms))
            } else {
                None
            };
            let report = Report::NefPolytope(PolytopeReport {
                model: model.name.clone(),
                curve_set,
                length_constant: m_constant,
                polytope,
                decomposition,
            });
            emit(&report, args.json);
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze(args) => {
            let (_, model, boundary) = load(&args.input)?;
            let (class, shown) = match &args.divisor {
                Some(expr) => parse_divisor_expr(&model, expr)?,
                None => {
                    let class = model.log_canonical_class(&boundary)?;
                    let mut shown = BTreeMap::new();
                    shown.insert("K".to_string(), Rational::one());
                    for (id, c) in &boundary.coefficients {
                        shown.insert(id.clone(), c.clone());
                    }
                    (class, shown)
                }
            };
            let report_data = divisor_report(&model, &class)?;
            let bpf = if args.bpf {
                Some(bpf_certificate(
                    &model,
                    &boundary,
                    &class,
                    BpfHypotheses {
                        cartier_declared: args.cartier,
                        semi_ample_declared: args.semi_ample,
                    },
                )?)
            } else {
                None
            };
            let report = Report::Analyze(AnalyzeReport {
                model: model.name.clone(),
                divisor: shown,
                report: report_data,
                bpf,
            });
            emit(&report, args.json);
            Ok(ExitCode::SUCCESS)
        }
        Command::LcStructure(args) => {
            let (doc, model, _) = load(&args.input)?;
            let graphs = select_graphs(&doc, args.graph.as_deref())?;
            if args.dot {
                for g in &graphs {
                    print!("{}", g.to_dot());
                }
                return Ok(ExitCode::SUCCESS);
            }
            let mut entries = Vec::new();
            for g in &graphs {
                let structure = lc_contraction_sequence(g)?;
                entries.push(LcStructureEntry {
                    graph: g.name.clone(),
                    structure,
                });
            }
            let report = Report::LcStructure(LcStructureReport {
                model: model.name.clone(),
                entries,
            });
            emit(&report, args.json);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn select_graphs(
    doc: &ModelDocument,
    name: Option<&str>,
) -> Result<Vec<nefkit::singularities::ResolutionGraph>, Error> {
    match name {
        Some(n) => Ok(vec![doc.graph(n)?]),
        None => {
            let graphs = doc.to_graphs()?;
            if graphs.is_empty() {
                return Err(Error::Config(
                    "document contains no resolution graphs".into(),
                ));
            }
            Ok(graphs)
        }
    }
}
