//! `torsionkit` command-line driver. One JSON document per invocation on
//! stdout, a one-line summary on stderr.
//!
//! Exit codes: 0 success, 1 identity verified unequal, 2 usage or input error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use torsionkit::complex::{vectors_to_json, BasedChainComplex, ComplexJson, GradedBases};
use torsionkit::formulas::{self, VerificationReport};
use torsionkit::par::Execution;
use torsionkit::surf::{self, SurfaceComplex, SurfaceJson};
use torsionkit::torsion::{random_choices, torsion, torsion_default};

const DEFAULT_TRIALS: usize = 25;

#[derive(Parser)]
#[command(name = "torsionkit", version, about = "Exact Reidemeister-Franz torsion of surfaces built from pants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the cell structure of `Σ_{g,n}` (`build g n`) or of a named piece
    /// (`circle`, `cylinder`, `pants`, `double-pants`).
    Build {
        #[arg(num_args = 1..=2, required = true)]
        args: Vec<String>,
    },
    /// Betti numbers and homology representatives of a file or of `Σ_{g,n}`.
    Homology {
        #[arg(num_args = 1..=2, required = true)]
        args: Vec<String>,
    },
    /// Torsion with default choices and with seeded random choices.
    Torsion {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Pants decomposition of `Σ_{g,n}`.
    Decompose { g: usize, n: usize },
    /// Check an identity: `thm1`, `thm2 g n`, `case3 g`, `mv g n`, `independence <file>`.
    Verify {
        identity: String,
        args: Vec<String>,
        /// Number of random trials (default from TORSIONKIT_TRIALS, else 25).
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

enum Output {
    Document(Value, String),
    Report(VerificationReport),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Output::Document(doc, summary)) => {
            println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
            eprintln!("{summary}");
            ExitCode::SUCCESS
        }
        Ok(Output::Report(report)) => {
            println!("{}", report.to_json_string());
            let verdict = if report.equal { "equal" } else { "NOT equal" };
            eprintln!("{}: lhs = {}, rhs = {}, {verdict}", report.identity, report.lhs, report.rhs);
            if report.equal {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_num(s: &str, what: &str) -> Result<usize, Failure> {
    s.parse().map_err(|_| Failure(format!("{what} must be a non-negative integer, got {s:?}")))
}

fn two_numbers(args: &[String]) -> Result<(usize, usize), Failure> {
    match args {
        [g, n] => Ok((parse_num(g, "g")?, parse_num(n, "n")?)),
        _ => Err(Failure("expected two integers g n".into())),
    }
}

fn named_surface(name: &str) -> Result<SurfaceComplex, Failure> {
    match name {
        "circle" => Ok(surf::circle()),
        "cylinder" => Ok(surf::cylinder()),
        "pants" => Ok(surf::pants()),
        "double-pants" => Ok(surf::double(&surf::pants())?.0),
        other => Err(Failure(format!("unknown surface {other:?}"))),
    }
}

fn surface_from_args(args: &[String]) -> Result<SurfaceComplex, Failure> {
    match args {
        [name] => named_surface(name),
        _ => {
            let (g, n) = two_numbers(args)?;
            Ok(surf::surface(g, n)?.0)
        }
    }
}

/// Reads a surface JSON (as written by `build`) or a bare complex JSON.
fn read_complex(path: &Path) -> Result<BasedChainComplex, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    if value.get("faces").is_some() {
        let s: SurfaceJson = serde_json::from_value(value)?;
        return Ok(SurfaceComplex::from_json(&s)?.complex().clone());
    }
    let c: ComplexJson = serde_json::from_value(value)?;
    let complex = BasedChainComplex::from_json(&c)?;
    complex.validate()?;
    Ok(complex)
}

fn homology_document(c: &BasedChainComplex) -> Value {
    let h = c.homology();
    json!({
        "dims": c.dims(),
        "betti": h.betti(),
        "euler_characteristic": c.euler_characteristic(),
        "representatives": h.degrees.iter().map(|d| vectors_to_json(&d.representatives)).collect::<Vec<_>>(),
    })
}

fn trials(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var("TORSIONKIT_TRIALS") {
        Ok(v) => parse_num(&v, "TORSIONKIT_TRIALS"),
        Err(_) => Ok(DEFAULT_TRIALS),
    }
}

fn run(command: Command) -> Result<Output, Failure> {
    match command {
        Command::Build { args } => {
            let s = surface_from_args(&args)?;
            let summary = format!(
                "genus {}, {} boundary circles, cells {:?}",
                s.genus(),
                s.boundary_circles().len(),
                s.complex().dims()
            );
            Ok(Output::Document(serde_json::to_value(s.to_json())?, summary))
        }
        Command::Homology { args } => {
            let c = match args.as_slice() {
                [one] if Path::new(one).exists() => read_complex(Path::new(one))?,
                _ => surface_from_args(&args)?.complex().clone(),
            };
            let doc = homology_document(&c);
            let summary = format!("betti {:?}", c.homology().betti());
            Ok(Output::Document(doc, summary))
        }
        Command::Torsion { file, seed } => {
            let c = read_complex(&file)?;
            let h = c.homology();
            let hb = GradedBases::canonical(&h);
            let default = torsion_default(&c, &hb)?;
            let seeded = torsion(&c, &hb, &random_choices(&c, &h, seed))?;
            let summary = format!("|torsion| = {}", default.report().abs);
            let doc = json!({
                "betti": h.betti(),
                "default": default.report(),
                "seed": seed,
                "seeded": seeded.report(),
            });
            Ok(Output::Document(doc, summary))
        }
        Command::Decompose { g, n } => {
            let d = surf::pants_decomposition(g, n)?;
            let summary = format!("{} pants, {} cutting circles", d.piece_count(), d.cutting_circles.len());
            Ok(Output::Document(serde_json::to_value(d)?, summary))
        }
        Command::Verify { identity, args, trials: t, seed } => {
            let report = match (identity.as_str(), args.as_slice()) {
                ("thm1", []) => formulas::thm1_verify()?,
                ("thm2", rest) => {
                    let (g, n) = two_numbers(rest)?;
                    formulas::thm2_verify(g, n, seed)?
                }
                ("case3", [g]) => formulas::case3_verify(parse_num(g, "g")?)?,
                ("mv", rest) => {
                    let (g, n) = two_numbers(rest)?;
                    formulas::mv_verify(g, n)?
                }
                ("independence", [file]) => {
                    let c = read_complex(Path::new(file))?;
                    let hb = GradedBases::canonical(&c.homology());
                    formulas::independence_verify(&c, &hb, trials(t)?, seed, Execution::Parallel)?
                }
                (other, rest) => {
                    return Err(Failure(format!("cannot verify {other:?} with arguments {rest:?}")));
                }
            };
            Ok(Output::Report(report))
        }
    }
}
