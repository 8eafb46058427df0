//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a checked property does not hold, 2 bad input.

pub mod document;
pub mod report;
pub mod sweep;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::discrimination::{conclusively_identifiable, NonlocalityLabel};
use crate::ensemble::OrthogonalSet;
use crate::error::Error;
use crate::oracle::GridSpec;
use crate::qstate::bell;
use crate::ueb::{self, generate_eq1, generate_eq2, GeneratorParams};
use crate::verify::{self, LambdaGrid, Suite, VerifyConfig, DEFAULT_SEED};

use document::{DocumentError, EnsembleDocument, ToleranceOverrides};
use report::{fmt_amplitudes, ClassifyReport};
use sweep::Family;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// `printf("%.12g")`.
pub fn fmt_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (11 - exp) as usize))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "qlocc",
    version,
    about = "Conclusive LOCC discrimination of two-qubit orthogonal ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the ensemble in a JSON document.
    Classify {
        input: PathBuf,
        /// Override a tolerance: eps_norm, eps_zero, eps_orth or tau_overlap.
        #[arg(long = "tolerance", value_name = "NAME=VALUE")]
        tolerances: Vec<String>,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a generator family over a parameter grid and write CSV.
    Sweep {
        #[arg(long, value_enum)]
        family: SweepFamily,
        /// lo:hi:steps
        #[arg(long, default_value = "0.05:0.95:19")]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a trit on the first-family states and report what LOCC can recover.
    DemoTrit {
        #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
        lambda1: f64,
        #[arg(long, default_value_t = 0.4, allow_negative_numbers = true)]
        lambda3: f64,
    },
    /// Run the property suites.
    Verify {
        /// Suite to run; repeatable. Defaults to every suite except `hierarchy`.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Samples per randomized suite.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// lo:hi:steps for the parameter-grid suites.
        #[arg(long, default_value = "0.05:0.95:19")]
        grid: String,
        /// Angles per axis of the oracle's coarse grid.
        #[arg(long, default_value_t = GridSpec::default().resolution)]
        oracle_resolution: usize,
    },
    /// Write a fixture document.
    Generate {
        #[arg(value_enum)]
        family: GenerateFamily,
        #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
        lambda1: f64,
        #[arg(long, default_value_t = 0.4, allow_negative_numbers = true)]
        lambda3: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SweepFamily {
    Eq1,
    Eq2,
    /// Both families joined on λ1.
    Joined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenerateFamily {
    Eq1,
    Eq2,
    BellTriple,
    RandomMet,
    BellBasis,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Document(#[from] DocumentError),
    #[error("{0}")]
    Library(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(
                Error::InternalContradiction(_) | Error::ResolutionTooCoarse { .. },
            ) => EXIT_VIOLATION,
            _ => EXIT_INPUT,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Classify {
            input,
            tolerances,
            json,
            out: path,
        } => {
            let mut overrides = ToleranceOverrides::default();
            for t in &tolerances {
                overrides.set_from_flag(t)?;
            }
            let text = fs::read_to_string(&input).map_err(io_err(&input))?;
            let doc = EnsembleDocument::parse(&text)?;
            let set = doc.to_set(&overrides)?;
            let report = ClassifyReport::build(&set, Some(&doc))?;
            let body = if json {
                report.to_json()
            } else {
                report.to_text()
            };
            emit(&body, path.as_deref(), out)?;
            Ok(if report.matches_declared() == Some(false) {
                EXIT_VIOLATION
            } else {
                EXIT_OK
            })
        }
        Command::Sweep {
            family,
            grid,
            out: path,
        } => {
            let grid = LambdaGrid::parse(&grid)?;
            let mut csv = Vec::new();
            let (summary, ok) = match family {
                SweepFamily::Eq1 | SweepFamily::Eq2 => {
                    let fam = if matches!(family, SweepFamily::Eq1) {
                        Family::Eq1
                    } else {
                        Family::Eq2
                    };
                    let records = sweep::sweep(fam, &grid)?;
                    sweep::write_csv(&records, &mut csv).expect("writing to memory");
                    let name = if fam == Family::Eq1 { "eq1" } else { "eq2" };
                    match sweep::uniform_class(&records) {
                        Some(c) => (
                            format!("{name}: {} points, class {c} at every point", records.len()),
                            true,
                        ),
                        None => (
                            format!("{name}: {} points, class NOT uniform", records.len()),
                            false,
                        ),
                    }
                }
                SweepFamily::Joined => {
                    let joined = sweep::join(
                        &sweep::sweep(Family::Eq1, &grid)?,
                        &sweep::sweep(Family::Eq2, &grid)?,
                    );
                    sweep::write_joined_csv(&joined, &mut csv).expect("writing to memory");
                    let higher = joined.iter().filter(|r| r.eq2_higher_class()).count();
                    let less = joined.iter().filter(|r| r.eq2_less_entangled()).count();
                    let n = joined.len();
                    (
                        format!(
                            "joined: {n} rows; eq2 class higher: {higher}/{n}; eq2 average entanglement lower: {less}/{n}"
                        ),
                        higher == n && less == n,
                    )
                }
            };
            let csv = String::from_utf8(csv).expect("utf-8 csv");
            emit(&csv, path.as_deref(), out)?;
            let sink: &mut dyn Write = if path.is_some() { out } else { err };
            let _ = writeln!(sink, "{summary}");
            Ok(if ok { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::DemoTrit { lambda1, lambda3 } => {
            let text = demo_trit(lambda1, lambda3)?;
            emit(&text, None, out)?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            suites,
            count,
            seed,
            grid,
            oracle_resolution,
        } => {
            let suites = if suites.is_empty() {
                Suite::defaults()
            } else {
                suites
                    .iter()
                    .map(|s| {
                        Suite::from_name(s)
                            .ok_or_else(|| CliError::Usage(format!("unknown suite '{s}'")))
                    })
                    .collect::<Result<Vec<_>, _>>()?
            };
            let cfg = VerifyConfig {
                seed,
                count,
                grid: LambdaGrid::parse(&grid)?,
                oracle: GridSpec {
                    resolution: oracle_resolution,
                    ..GridSpec::default()
                },
            };
            cfg.oracle.validate()?;
            let mut failed = 0;
            for s in suites {
                let r = verify::run_suite(s, &cfg)?;
                failed += usize::from(!r.ok());
                let _ = writeln!(out, "{r}");
            }
            if failed == 0 {
                let _ = writeln!(out, "all suites passed");
                Ok(EXIT_OK)
            } else {
                let _ = writeln!(out, "{failed} suite(s) failed");
                Ok(EXIT_VIOLATION)
            }
        }
        Command::Generate {
            family,
            lambda1,
            lambda3,
            seed,
            out: path,
        } => {
            let doc = generate(family, lambda1, lambda3, seed)?;
            emit(&doc.to_json(), path.as_deref(), out)?;
            Ok(EXIT_OK)
        }
    }
}

fn emit(body: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, body).map_err(io_err(p)),
        None => out
            .write_all(body.as_bytes())
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

fn labelled(set: OrthogonalSet, labels: &[&str], class: NonlocalityLabel) -> EnsembleDocument {
    EnsembleDocument::from_set(
        &set,
        Some(labels.iter().map(|s| s.to_string()).collect()),
        Some(class.to_string()),
    )
}

/// Fixture document with the class its family is known to have.
pub fn generate(
    family: GenerateFamily,
    lambda1: f64,
    lambda3: f64,
    seed: u64,
) -> crate::Result<EnsembleDocument> {
    Ok(match family {
        GenerateFamily::Eq1 => labelled(
            generate_eq1(GeneratorParams::new(lambda1, lambda3)?),
            &["psi1", "psi2", "psi3"],
            NonlocalityLabel::OneUnidentifiable,
        ),
        GenerateFamily::Eq2 => labelled(
            generate_eq2(lambda1)?,
            &["Psi1", "Psi2", "Psi3"],
            NonlocalityLabel::TwoUnidentifiable,
        ),
        GenerateFamily::BellTriple => labelled(
            OrthogonalSet::new(vec![bell::phi_plus(), bell::phi_minus(), bell::psi_plus()])?,
            &["phi+", "phi-", "psi+"],
            NonlocalityLabel::ConclusiveOnly,
        ),
        GenerateFamily::RandomMet => labelled(
            ueb::random_max_entangled_triple(seed),
            &["phi1", "phi2", "phi3"],
            NonlocalityLabel::ConclusiveOnly,
        ),
        GenerateFamily::BellBasis => labelled(
            OrthogonalSet::new(vec![
                bell::phi_plus(),
                bell::phi_minus(),
                bell::psi_plus(),
                bell::psi_minus(),
            ])?,
            &["phi+", "phi-", "psi+", "psi-"],
            NonlocalityLabel::CompleteBasis(4),
        ),
    })
}

/// Trit value `t` is sent as the `t`-th first-family state; a value is
/// recoverable when its state is conclusively identifiable by LOCC.
pub fn demo_trit(lambda1: f64, lambda3: f64) -> crate::Result<String> {
    let params = GeneratorParams::new(lambda1, lambda3)?;
    let set = generate_eq1(params);
    let mut text = String::new();
    let mut verdicts = Vec::new();
    for t in 0..3 {
        let id = conclusively_identifiable(&set, t)?;
        let state = document::amplitudes_of(&set.states()[t]);
        let verdict = if id.identifiable {
            "recoverable"
        } else {
            "protected"
        };
        text += &format!(
            "trit {t} -> psi{} {}: {verdict}\n",
            t + 1,
            fmt_amplitudes(&state)
        );
        match id.witness.filter(|_| id.identifiable) {
            Some(w) => {
                text += &format!(
                    "  witness {} overlap {}\n",
                    fmt_amplitudes(&document::amplitudes_of(&w.state)),
                    fmt_g12(w.overlap)
                )
            }
            None => {
                text += "  no product state is orthogonal to the other two and overlaps this one\n"
            }
        }
        verdicts.push(format!("trit {t}: {verdict}"));
    }
    for w in params.eq1_warnings() {
        text += &format!("warning: {w}\n");
    }
    text += &verdicts.join("; ");
    text.push('\n');
    Ok(text)
}
