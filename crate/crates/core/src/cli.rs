//! Command-line front end. Every invocation produces one [`Report`]:
//!
//! ```json
//! {"status": "ok", "payload": {...}, "diagnostics": [...]}
//! {"status": "error", "error": {"code": "...", "message": "..."}, "diagnostics": [...]}
//! ```
//!
//! Exit codes: 0 on success, 1 on domain errors, 2 on usage, I/O or parse errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::classify::{solve_k0, solve_k1, solve_k2};
use crate::error::Error;
use crate::functional::MomentFunctional;
use crate::mps::{fixed_point_check, generate, StructureCoeffs};
use crate::operator::OperatorJ;
use crate::polyalg::{QPoly, Rat};
use crate::twoortho::{
    build_matrix_pearson, dual_pair_expressions_check, dual_recurrence_check, find_appell_2ortho,
    to_dual_expressions, verify_matrix_pearson, Seeds,
};

#[derive(Parser, Debug)]
#[command(name = "lowerop", version, about = "Exact calculus for degree-nonincreasing operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Largest horizon accepted for operators and `--N`.
    #[arg(long, global = true, env = "LOWEROP_MAX_N", default_value_t = 64)]
    pub max_n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Canonical coefficients from an operator file or from the images of x^n.
    Canon {
        #[arg(long = "in", conflicts_with = "images")]
        input: Option<PathBuf>,
        /// JSON array of polynomials `J(x^0), J(x^1), …`.
        #[arg(long)]
        images: Option<PathBuf>,
    },
    /// `J(p)` for a polynomial, or the transpose action on a functional.
    Apply {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, conflicts_with = "functional", required_unless_present = "functional")]
        poly: Option<PathBuf>,
        #[arg(long)]
        functional: Option<PathBuf>,
    },
    /// `J_1 ∘ J_2` from two `--in` operators, outer first.
    Compose {
        #[arg(long = "in", num_args = 1, required = true)]
        input: Vec<PathBuf>,
    },
    /// Inverse of an isomorphism (λ_n^[0] != 0 through the horizon).
    Invert {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Lowering order `k` and the normalization scalars `λ`.
    Order {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Fixed-point solver for three-term operators, `k ∈ {0, 1, 2}`.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        /// Forces the order instead of detecting it.
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=2))]
        k: Option<u8>,
        #[command(flatten)]
        horizon: HorizonArg,
    },
    /// Both sides of the fixed-point equivalence for a structure file.
    VerifyFixedPoint {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long = "N", value_parser = clap::value_parser!(u64).range(1..))]
        n: Option<u64>,
    },
    /// Two-orthogonal fixed point of an order-one operator and its matrix Pearson relation.
    TwoOrtho {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        horizon: HorizonArg,
        /// `β_0,α_1,γ_1`.
        #[arg(long, default_value = "0,1,1")]
        seeds: String,
    },
}

#[derive(Args, Debug)]
pub struct HorizonArg {
    #[arg(long = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorBody>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug)]
enum Failure {
    Domain(Error),
    Usage(String),
    Io(String),
    Parse(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Domain(Error::Parse(_)) => 2,
            Failure::Domain(_) => 1,
            _ => 2,
        }
    }

    fn body(&self) -> ErrorBody {
        let (code, message) = match self {
            Failure::Domain(e) => (e.code(), e.to_string()),
            Failure::Usage(m) => ("Usage", m.clone()),
            Failure::Io(m) => ("Io", m.clone()),
            Failure::Parse(m) => ("Parse", m.clone()),
        };
        ErrorBody {
            code: code.to_string(),
            message,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

/// What the binary prints and returns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome {
                    exit_code: 0,
                    stdout: e.to_string(),
                };
            }
            let report = error_report(&Failure::Usage(e.render().to_string()), Vec::new());
            return Outcome {
                exit_code: 2,
                stdout: render(&report, Format::Json),
            };
        }
    };
    let mut diagnostics = Vec::new();
    let (report, code) = match dispatch(&cli, &mut diagnostics) {
        Ok(payload) => (
            Report {
                status: Status::Ok,
                payload: Some(payload),
                error: None,
                diagnostics,
            },
            0,
        ),
        Err(f) => (error_report(&f, diagnostics), f.exit_code()),
    };
    let text = render(&report, cli.format);
    match &cli.out {
        None => Outcome {
            exit_code: code,
            stdout: text,
        },
        Some(path) => match fs::write(path, &text) {
            Ok(()) => Outcome {
                exit_code: code,
                stdout: String::new(),
            },
            Err(e) => {
                let f = Failure::Io(format!("{}: {e}", path.display()));
                Outcome {
                    exit_code: 2,
                    stdout: render(&error_report(&f, Vec::new()), cli.format),
                }
            }
        },
    }
}

fn error_report(f: &Failure, diagnostics: Vec<String>) -> Report {
    Report {
        status: Status::Error,
        payload: None,
        error: Some(f.body()),
        diagnostics,
    }
}

/// Pretty JSON with a trailing newline, or a flat `key: value` listing.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report is plain JSON");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = format!("status: {}\n", if report.status == Status::Ok { "ok" } else { "error" });
            if let Some(e) = &report.error {
                s += &format!("error: {} ({})\n", e.code, e.message);
            }
            if let Some(Value::Object(map)) = &report.payload {
                for (k, v) in map {
                    s += &format!("{k}: {v}\n");
                }
            }
            for d in &report.diagnostics {
                s += &format!("note: {d}\n");
            }
            s
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn load_operator(path: &Path, cap: usize) -> Result<OperatorJ, Failure> {
    let j: OperatorJ = read_json(path)?;
    if j.horizon() > cap {
        return Err(Failure::Usage(format!(
            "{}: horizon {} exceeds LOWEROP_MAX_N = {cap}",
            path.display(),
            j.horizon()
        )));
    }
    Ok(j)
}

fn capped(n: u64, cap: usize) -> Result<usize, Failure> {
    match usize::try_from(n) {
        Ok(n) if n <= cap => Ok(n),
        _ => Err(Failure::Usage(format!("N = {n} exceeds LOWEROP_MAX_N = {cap}"))),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ImagesFile {
    Bare(Vec<QPoly>),
    Wrapped { images: Vec<QPoly> },
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize to JSON")
}

fn parse_seeds(s: &str) -> Result<Seeds, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [b0, a1, g1] = parts.as_slice() else {
        return Err(Failure::Usage(format!("--seeds expects three values b0,a1,g1, got {s:?}")));
    };
    let parse = |x: &str| x.parse::<Rat>().map_err(|e| Failure::Usage(format!("--seeds: {e}")));
    Ok(Seeds {
        beta0: parse(b0)?,
        alpha1: parse(a1)?,
        gamma1: parse(g1)?,
    })
}

fn dispatch(cli: &Cli, diagnostics: &mut Vec<String>) -> Result<Value, Failure> {
    let cap = cli.max_n;
    match &cli.command {
        Command::Canon { input, images } => {
            let j = match (input, images) {
                (Some(p), _) => load_operator(p, cap)?,
                (None, Some(p)) => {
                    let imgs = match read_json::<ImagesFile>(p)? {
                        ImagesFile::Bare(v) | ImagesFile::Wrapped { images: v } => v,
                    };
                    if imgs.len() > cap + 1 {
                        return Err(Failure::Usage(format!("{} images exceed LOWEROP_MAX_N = {cap}", imgs.len())));
                    }
                    OperatorJ::from_images(&imgs)?
                }
                (None, None) => return Err(Failure::Usage("canon needs --in or --images".into())),
            };
            diagnostics.push(format!("exact through degree N = {}", j.horizon()));
            Ok(to_value(&j))
        }
        Command::Apply { input, poly, functional } => {
            let j = load_operator(input, cap)?;
            if let Some(p) = poly {
                let p: QPoly = read_json(p)?;
                Ok(json!({ "image": j.apply(&p)? }))
            } else {
                let u: MomentFunctional = read_json(functional.as_ref().expect("clap requires one"))?;
                let image = u.transpose_apply(&j)?;
                diagnostics.push(format!("moments known through {}", image.horizon()));
                Ok(json!({ "functional": image }))
            }
        }
        Command::Compose { input } => {
            let [outer, inner] = input.as_slice() else {
                return Err(Failure::Usage("compose needs exactly two --in operators".into()));
            };
            let (outer, inner) = (load_operator(outer, cap)?, load_operator(inner, cap)?);
            let c = outer.compose(&inner);
            diagnostics.push(format!("exact through degree N = {}", c.horizon()));
            Ok(to_value(&c))
        }
        Command::Invert { input } => {
            let inv = load_operator(input, cap)?.invert()?;
            diagnostics.push(format!("exact through degree N = {}", inv.horizon()));
            Ok(to_value(&inv))
        }
        Command::Order { input } => {
            let profile = load_operator(input, cap)?.lowering_order()?;
            diagnostics.push(format!("lambda certified nonzero through index {}", profile.horizon));
            Ok(json!({ "k": profile.order, "lambdas": profile.lambdas, "horizon": profile.horizon }))
        }
        Command::Solve { input, k, horizon } => {
            let j = load_operator(input, cap)?;
            let n = capped(horizon.n, cap)?;
            let k = match k {
                Some(k) => *k as usize,
                None => {
                    let k = detect_order(&j)?;
                    diagnostics.push(format!("detected k = {k}"));
                    k
                }
            };
            let (solution, mps, lambdas, notes) = match k {
                0 => {
                    let (rep, mps, l) = solve_k0(&j, n)?;
                    let notes = rep.notes.clone();
                    (to_value(&rep), mps, l, notes)
                }
                1 => {
                    let (sol, mps, l) = solve_k1(&j, n)?;
                    let notes = sol.notes.clone();
                    (to_value(&sol), mps, l, notes)
                }
                _ => {
                    let (sol, mps, l) = solve_k2(&j, n)?;
                    let notes = sol.notes.clone();
                    (to_value(&sol), mps, l, notes)
                }
            };
            diagnostics.extend(notes);
            diagnostics.push(format!("sequence exact through degree {}", mps.horizon()));
            Ok(json!({
                "k": k,
                "solution": solution,
                "lambdas": lambdas,
                "structure": mps.structure,
                "polys": mps.polys,
            }))
        }
        Command::VerifyFixedPoint { input, structure, n } => {
            let j = load_operator(input, cap)?;
            let s: StructureCoeffs = read_json(structure)?;
            let n = match n {
                Some(n) => capped(*n, cap)?,
                None => s.max_degree().min(cap),
            };
            if j.horizon() < n {
                diagnostics.push(format!(
                    "operator horizon {} is below N = {n}; checked on the operator horizon",
                    j.horizon()
                ));
            }
            let verdict = fixed_point_check(&generate(&s, n)?, &j)?;
            Ok(to_value(&verdict))
        }
        Command::TwoOrtho { input, horizon, seeds } => {
            let j = load_operator(input, cap)?;
            let n = capped(horizon.n, cap)?;
            let seeds = parse_seeds(seeds)?;
            let t = find_appell_2ortho(&j, n, &seeds)?;
            let mp = build_matrix_pearson(&t, &j)?;
            let pearson = verify_matrix_pearson(&t, &mp, &j)?;
            diagnostics.push(format!("sequence exact through degree {}", t.mps.horizon()));
            Ok(json!({
                "structure": t.structure,
                "expressions": to_dual_expressions(&t)?,
                "matrix_pearson": mp,
                "checks": {
                    "dual_recurrence": dual_recurrence_check(&t),
                    "dual_pair_expressions": dual_pair_expressions_check(&t)?,
                    "degree_bounds": mp.degree_bounds_hold(),
                    "matrix_pearson": pearson,
                },
            }))
        }
    }
}

fn detect_order(j: &OperatorJ) -> Result<usize, Failure> {
    match j.lowering_order() {
        Ok(p) => Ok(p.order),
        // degree-preserving operators such as xD may have λ_0 = 0
        Err(_) if (0..=2).all(|nu| j.coeff(nu).degree_at_most(nu as isize)) && !j.entry(1, 1).is_zero() => Ok(0),
        Err(e) => Err(e.into()),
    }
}
