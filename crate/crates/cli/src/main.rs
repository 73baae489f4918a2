//! Command-line front end. JSON on stdout is the contract; `--format text`
//! flattens the same document into `key: value` lines.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use cusped_zeta::alexander::alexander_of;
use cusped_zeta::cuspterms::{
    epstein, epstein_residue_and_constant, identity_lprime, lattice_from_json, scattering_lprime, threshold_lprime,
    unipotent_lprime, ScatteringPoles, UnipotentCase,
};
use cusped_zeta::par::{configure_threads, Execution};
use cusped_zeta::presentation::{parse_presentation, peripheral_trivial, PresentationFile};
use cusped_zeta::ruelle::{euler_product, fried_residual, log_derivative_series, log_euler_product};
use cusped_zeta::spectrum::{enumerate_classes, EnumerationOptions, GeneratorSet, Spectrum};
use cusped_zeta::verdict::{l2_betti, main_conjecture_report};
use cusped_zeta::{selftest, Error, ErrorKind};

const EXIT_USAGE: u8 = 64;
const EXIT_VALIDATION: u8 = 65;
const EXIT_COMPUTATION: u8 = 70;
const EXIT_CHECK_FAILED: u8 = 1;

#[derive(Parser)]
#[command(name = "cusped-zeta", version, about = "Twisted Alexander and Ruelle zeta computations for one-cusped hyperbolic 3-manifolds")]
struct Cli {
    /// output format
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// write to this file instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// run every computation on one thread
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Twisted Alexander invariant of a presentation file
    Alexander { pres: PathBuf },
    /// Twisted Betti numbers h0, h1 and whether rho is trivial on the cusp
    Betti { pres: PathBuf },
    /// Length spectra
    #[command(subcommand)]
    Spectrum(SpectrumCommand),
    /// Ruelle L-function data
    #[command(subcommand)]
    Ruelle(RuelleCommand),
    /// Factorization of the Ruelle product into Selberg products
    #[command(subcommand)]
    Fried(FriedCommand),
    /// Closed-form transforms of the trace-formula terms
    #[command(subcommand)]
    Terms(TermsCommand),
    /// Epstein L-function of a cusp lattice
    Epstein {
        lattice: PathBuf,
        /// evaluation point; without it, print the residue and constant at s = 0
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
    },
    /// Compare the predicted Ruelle order with the Alexander side
    Verify { pres: PathBuf },
    /// Run the randomized property suites
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum SpectrumCommand {
    /// Enumerate closed geodesics from generator matrices
    Enumerate {
        matrices: PathBuf,
        #[arg(long)]
        max_word_len: usize,
        /// length cutoff; unbounded when omitted
        #[arg(long)]
        cutoff: Option<f64>,
        /// replace the character, e.g. "n=5: 1 1"
        #[arg(long)]
        character: Option<String>,
    },
}

#[derive(Args)]
struct SpectrumAt {
    spectrum: PathBuf,
    /// "re" or "re,im"
    #[arg(long, allow_hyphen_values = true)]
    z: String,
}

#[derive(Subcommand)]
enum RuelleCommand {
    /// Euler product, its logarithm and log-derivative at z
    Eval(SpectrumAt),
}

#[derive(Subcommand)]
enum FriedCommand {
    /// Residual of the factorization at z against its tail bound
    Check(SpectrumAt),
}

#[derive(Clone, Copy, ValueEnum)]
enum Restriction {
    Trivial,
    Nontrivial,
}

#[derive(Subcommand)]
enum TermsCommand {
    /// Identity contributions for a given volume
    Identity {
        #[arg(long)]
        volume: f64,
    },
    /// Unipotent contributions
    Unipotent {
        #[arg(long)]
        covolume: f64,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, value_enum)]
        restriction: Restriction,
    },
    /// Threshold term
    Threshold,
    /// Scattering contributions from a pole file
    Scattering { poles: PathBuf },
}

enum Failure {
    Usage(String),
    Input(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

macro_rules! core {
    ($e:expr) => {
        $e.map_err(|e| Failure::Core(Error::from(e)))
    };
}

struct Outcome {
    body: String,
    code: u8,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Outcome { body, code: 0 }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {}", path.display(), e)))
}

fn presentation(path: &Path) -> Result<PresentationFile, Failure> {
    core!(parse_presentation(&read(path)?))
}

fn parse_z(s: &str) -> Result<Complex64, Failure> {
    let bad = || Failure::Usage(format!("expected \"re\" or \"re,im\", got {:?}", s));
    let mut parts = s.split(',').map(|p| p.trim().parse::<f64>());
    let re = parts.next().ok_or_else(bad)?.map_err(|_| bad())?;
    let im = match parts.next() {
        Some(p) => p.map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

/// "n=5: 1 1" gives rho(g_i) = exp(2 pi i e_i / n).
fn parse_character(s: &str, generators: usize) -> Result<Vec<Complex64>, Failure> {
    let bad = |why: &str| Failure::Usage(format!("character {:?}: {}", s, why));
    let (head, tail) = s.split_once(':').ok_or_else(|| bad("expected \"n=<int>: e1 e2 ...\""))?;
    let n: u32 = head
        .trim()
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| bad("modulus must be a positive integer"))?;
    let exps: Vec<i64> = tail.split_whitespace().map(|e| e.parse()).collect::<Result<_, _>>().map_err(|_| bad("exponents must be integers"))?;
    if exps.len() != generators {
        return Err(bad(&format!("{} exponents for {} generators", exps.len(), generators)));
    }
    Ok(exps.iter().map(|&e| Complex64::from_polar(1.0, 2.0 * PI * e.rem_euclid(n as i64) as f64 / n as f64)).collect())
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn complex(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match &cli.command {
        Command::Alexander { pres } => {
            let f = presentation(pres)?;
            Ok(Outcome::ok(to_json(&core!(alexander_of(&f))?)))
        }
        Command::Betti { pres } => {
            let f = presentation(pres)?;
            let a = core!(alexander_of(&f))?;
            let delta = core!(peripheral_trivial(&f.presentation, &f.character))?;
            let (beta0, beta1) = core!(l2_betti(a.h0, a.h1, delta))?;
            Ok(Outcome::ok(to_json(&json!({
                "h0": a.h0, "h1": a.h1, "deltaRho": delta, "beta0": beta0, "beta1": beta1
            }))))
        }
        Command::Spectrum(SpectrumCommand::Enumerate { matrices, max_word_len, cutoff, character }) => {
            let mut gens = core!(GeneratorSet::from_json(&read(matrices)?))?;
            if let Some(c) = character {
                gens.rho = parse_character(c, gens.matrices.len())?;
            }
            let cutoff = cutoff.unwrap_or(f64::INFINITY);
            if !(cutoff > 0.0) {
                return Err(Failure::Usage(format!("cutoff must be positive, got {}", cutoff)));
            }
            let mut opts = EnumerationOptions::new(*max_word_len, cutoff);
            opts.execution = exec;
            let s = enumerate_classes(&gens, &opts);
            for w in &s.warnings {
                eprintln!("warning: {}", w);
            }
            Ok(Outcome::ok(s.to_csv()))
        }
        Command::Ruelle(RuelleCommand::Eval(at)) => {
            let s = core!(Spectrum::from_csv(&read(&at.spectrum)?))?;
            let z = parse_z(&at.z)?;
            let v = json!({
                "z": complex(z),
                "logEulerProduct": core!(log_euler_product(&s, z))?,
                "eulerProduct": core!(euler_product(&s, z))?,
                "logDerivative": core!(log_derivative_series(&s, z))?,
            });
            Ok(Outcome::ok(to_json(&v)))
        }
        Command::Fried(FriedCommand::Check(at)) => {
            let s = core!(Spectrum::from_csv(&read(&at.spectrum)?))?;
            let z = parse_z(&at.z)?;
            let r = core!(fried_residual(&s, z))?;
            let within = r.residual <= r.tail_bound;
            let v = json!({"z": complex(z), "result": r, "withinTailBound": within});
            Ok(Outcome { body: to_json(&v), code: if within { 0 } else { EXIT_CHECK_FAILED } })
        }
        Command::Terms(t) => {
            let v = match t {
                TermsCommand::Identity { volume } => {
                    let (m0, m1) = core!(identity_lprime(*volume))?;
                    json!({"j0": m0.to_json(), "j1": m1.to_json()})
                }
                TermsCommand::Unipotent { covolume, c, restriction } => {
                    if !(*covolume > 0.0 && covolume.is_finite() && c.is_finite()) {
                        return Err(Failure::Usage("covolume must be positive and c finite".into()));
                    }
                    let case = match restriction {
                        Restriction::Trivial => UnipotentCase::TrivialRestriction { covolume: *covolume, c: *c },
                        Restriction::Nontrivial => UnipotentCase::NontrivialRestriction { covolume: *covolume, c: *c },
                    };
                    let u = unipotent_lprime(case);
                    json!({"j0": u.u0_shifted.to_json(), "j1": u.u1.to_json(), "combination": u.combination.to_json()})
                }
                TermsCommand::Threshold => threshold_lprime().to_json(),
                TermsCommand::Scattering { poles } => {
                    let p = core!(ScatteringPoles::from_json(&read(poles)?))?;
                    let (m0, m1) = core!(scattering_lprime(&p))?;
                    json!({"j0": m0.to_json(), "j1": m1.to_json()})
                }
            };
            Ok(Outcome::ok(to_json(&v)))
        }
        Command::Epstein { lattice, s } => {
            let (l, chi) = core!(lattice_from_json(&read(lattice)?))?;
            let v = match s {
                Some(s) => {
                    let s = parse_z(s)?;
                    json!({"s": complex(s), "value": complex(core!(epstein(&l, &chi, s))?)})
                }
                None => serde_json::to_value(core!(epstein_residue_and_constant(&l, &chi))?).expect("serializable"),
            };
            Ok(Outcome::ok(to_json(&v)))
        }
        Command::Verify { pres } => {
            let f = presentation(pres)?;
            let r = core!(main_conjecture_report(&f))?;
            Ok(Outcome { body: r.to_json(), code: r.exit_code() as u8 })
        }
        Command::Selftest { seed } => {
            let results = selftest::run_all(*seed);
            let ok = results.iter().all(|r| r.passed);
            Ok(Outcome { body: to_json(&results), code: if ok { 0 } else { EXIT_CHECK_FAILED } })
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&if prefix.is_empty() { k.clone() } else { format!("{}.{}", prefix, k) }, x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{}[{}]", prefix, i), x, out);
            }
            if a.is_empty() {
                out.push_str(&format!("{}: []\n", prefix));
            }
        }
        Value::String(s) => out.push_str(&format!("{}: {}\n", prefix, s)),
        x => out.push_str(&format!("{}: {}\n", prefix, x)),
    }
}

fn render(body: String, format: Format) -> String {
    let mut body = match (format, serde_json::from_str::<Value>(&body)) {
        (Format::Text, Ok(v)) => {
            let mut s = String::new();
            flatten("", &v, &mut s);
            s
        }
        _ => body,
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    body
}

fn configure_from_env() -> Result<(), Failure> {
    match std::env::var("CUSPED_ZETA_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                configure_threads(n);
                Ok(())
            }
            _ => Err(Failure::Usage(format!("CUSPED_ZETA_THREADS must be a positive integer, got {:?}", v))),
        },
        Err(_) => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = configure_from_env().and_then(|_| run(&cli));
    match result {
        Ok(o) => {
            let text = render(o.body, cli.format);
            let written = match &cli.output {
                Some(p) => fs::write(p, &text),
                None => std::io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {}", e);
                return ExitCode::from(EXIT_VALIDATION);
            }
            ExitCode::from(o.code)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {}", m);
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {}", m);
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {}", e);
            ExitCode::from(match e.kind() {
                ErrorKind::Validation => EXIT_VALIDATION,
                ErrorKind::Computation => EXIT_COMPUTATION,
            })
        }
    }
}
