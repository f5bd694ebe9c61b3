//! Command-line interface: state generation, bound evaluation, detector
//! comparison, threshold scanning, and randomized verification suites.
//!
//! Exit codes: 0 success, 2 detector/property failure, 3 input error,
//! 4 numerical-contract violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use taubound::analysis::{
    self, criteria_compare, distill_flag, render_bound_table, render_criteria_table,
    threshold_scan, verify_suite, with_provenance, Detector,
};
use taubound::states::{
    load_operator_from_path, load_state_from_path, save_state_to_path, Family, State, StateFamily,
};
use taubound::tensor::{CMatrix, DimList};
use taubound::{tau_2, tau_n, Error};

#[derive(Parser)]
#[command(
    name = "taubound",
    version,
    about = "Lower bounds on multipartite concurrence and comparison separability criteria"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a named state and write it to a state file.
    Gen(GenArgs),
    /// Evaluate the concurrence lower bound on a state file.
    Bound(BoundArgs),
    /// Run all applicable entanglement detectors on a state file.
    Criteria(CriteriaArgs),
    /// Bisect the detection threshold of a p-parameterized family.
    Scan(ScanArgs),
    /// Run a randomized verification suite.
    Verify(VerifyArgs),
    /// Flag distillable bipartite entanglement in a tripartite pure state.
    Distill(DistillArgs),
}

#[derive(Args)]
struct DistillArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenArgs {
    /// ghz | w | wmix | ghzmix | product | bell | haar
    #[arg(long)]
    family: String,
    /// Comma-separated subsystem dimensions, e.g. 2,2,2
    #[arg(long)]
    dims: String,
    /// Mixing parameter for wmix/ghzmix
    #[arg(long)]
    p: Option<f64>,
    /// RNG seed (haar family)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    state: PathBuf,
    /// tau2 | tau3 | taun
    #[arg(long, default_value = "taun")]
    method: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CriteriaArgs {
    #[arg(long)]
    state: PathBuf,
    /// Hermitian operator in the state file format (kind density)
    #[arg(long)]
    witness: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ScanArgs {
    /// wmix | ghzmix
    #[arg(long)]
    family: String,
    /// tau3 | kf | witness
    #[arg(long)]
    detector: String,
    /// Bisection tolerance on p
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long)]
    witness: Option<PathBuf>,
    /// CSV output: one row per evaluation plus a summary row
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// thm3 | pure-identity | separable-zero | ppt-zero | ckw-identity | rank4
    #[arg(long)]
    property: String,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

fn parse_dims(spec: &str) -> Result<DimList, Error> {
    let dims = spec
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("bad dimension token '{t}'")))
        })
        .collect::<Result<Vec<usize>, Error>>()?;
    DimList::new(dims)
}

fn load_witness(path: &std::path::Path, dim: usize) -> Result<CMatrix, Error> {
    let (op, dims) = load_operator_from_path(path)?;
    if dims.total() != dim {
        return Err(Error::DimensionMismatch(format!(
            "witness dimension {} does not match state dimension {}",
            dims.total(),
            dim
        )));
    }
    Ok(op)
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Gen(args) => {
            let dims = parse_dims(&args.dims)?;
            let family: Family = args.family.parse()?;
            let spec = StateFamily::new(family, args.p, dims)?;
            let state = spec.build(args.seed)?;
            save_state_to_path(&args.out, &state)?;
            println!(
                "wrote {} state ({}) to {}",
                family,
                match &state {
                    State::Pure(_) => "pure",
                    State::Density(_) => "density",
                },
                args.out.display()
            );
            Ok(0)
        }
        Command::Bound(args) => {
            let state = load_state_from_path(&args.state)?;
            let rho = state.density();
            let n = rho.dims().n_parties();
            let report = match args.method.as_str() {
                "tau2" => tau_2(&rho)?,
                "tau3" => {
                    if n != 3 {
                        return Err(Error::InvalidParameter(format!(
                            "tau3 needs a tripartite state, got {n} parties"
                        )));
                    }
                    tau_n(&rho)?
                }
                "taun" => tau_n(&rho)?,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown method '{other}' (expected tau2|tau3|taun)"
                    )))
                }
            };
            if args.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&with_provenance(&report, None))
                        .expect("report serialization")
                );
            } else {
                print!("{}", render_bound_table(&report));
            }
            Ok(0)
        }
        Command::Criteria(args) => {
            let state = load_state_from_path(&args.state)?;
            let rho = state.density();
            let witness = args
                .witness
                .as_ref()
                .map(|p| load_witness(p, rho.dim()))
                .transpose()?;
            let report = criteria_compare(&rho, witness.as_ref())?;
            if args.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&with_provenance(&report, None))
                        .expect("report serialization")
                );
            } else {
                print!("{}", render_criteria_table(&report));
            }
            Ok(0)
        }
        Command::Scan(args) => {
            let family: Family = args.family.parse()?;
            if !matches!(family, Family::WMix | Family::GhzMix) {
                return Err(Error::InvalidParameter(format!(
                    "scan supports the wmix and ghzmix families, got '{family}'"
                )));
            }
            let spec = StateFamily::new(family, Some(0.0), DimList::uniform(2, 3)?)?;
            let detector = match args.detector.as_str() {
                "tau3" => Detector::Tau3,
                "kf" => Detector::Kf,
                "witness" => {
                    let path = args.witness.as_ref().ok_or_else(|| {
                        Error::InvalidParameter("the witness detector needs --witness FILE".into())
                    })?;
                    Detector::Witness(load_witness(path, 8)?)
                }
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown detector '{other}' (expected tau3|kf|witness)"
                    )))
                }
            };
            let scan = threshold_scan(&spec, &detector, args.tol)?;
            let mut file = std::io::BufWriter::new(std::fs::File::create(&args.out)?);
            analysis::write_scan_csv(&mut file, &scan)?;
            if args.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&scan).expect("scan serialization")
                );
            } else {
                println!(
                    "{} / {}: threshold p* = {:.6} (bracket width {:.2e}, {} bisection steps, {} evaluations)",
                    scan.family,
                    scan.detector,
                    scan.p_star,
                    scan.bracket_width,
                    scan.iterations,
                    scan.evaluations.len()
                );
                println!("evaluations written to {}", args.out.display());
            }
            Ok(0)
        }
        Command::Verify(args) => {
            let result = verify_suite(&args.property, args.trials, args.seed)?;
            if args.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&with_provenance(&result, Some(args.seed)))
                        .expect("result serialization")
                );
            } else {
                println!(
                    "{}: {} ({}; tolerance {:.1e}, {} trials, seed {})",
                    result.property,
                    if result.pass { "PASS" } else { "FAIL" },
                    result.detail,
                    result.tolerance,
                    result.trials,
                    result.seed
                );
            }
            Ok(if result.pass { 0 } else { 2 })
        }
        Command::Distill(args) => {
            let state = load_state_from_path(&args.state)?;
            let psi = match state {
                State::Pure(psi) => psi,
                State::Density(_) => {
                    return Err(Error::InvalidParameter(
                        "the distillability flag needs a pure state file".into(),
                    ))
                }
            };
            let report = distill_flag(&psi)?;
            if args.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&with_provenance(&report, None))
                        .expect("report serialization")
                );
            } else {
                println!(
                    "reduction tau_2: (12) = {:.9e}, (13) = {:.9e}, (23) = {:.9e}",
                    report.reduction_tau2[0], report.reduction_tau2[1], report.reduction_tau2[2]
                );
                println!(
                    "{}",
                    if report.distillable {
                        "distillable: at least two reductions carry bipartite entanglement"
                    } else {
                        "not flagged: fewer than two reductions carry bipartite entanglement"
                    }
                );
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
