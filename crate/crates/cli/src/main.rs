//! Batch front end: parse and serialize diagram files, validate them, compute
//! classes, apply the phi-construction and the resolution chain, generate
//! seeded instances, and run the self-test suite.
//!
//! Exit codes: 0 success, 1 validation/check failure, 2 internal invariant
//! violation, 3 parse or I/O error.

mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use k1wb_core::diagrams::dses_type;
use k1wb_core::gen::{self, GenConfig, Rng64, Strategy};
use k1wb_core::k1::{check_relation_3x3, dses_class_free, dses_class_general};
use k1wb_core::linalg::BaseRing;
use k1wb_core::resolution::{phi_auto, varphi};
use k1wb_core::{selftest, Error};

use workspace::{parse, serialize, Workspace};

const EXIT_CHECK: u8 = 1;
const EXIT_FAULT: u8 = 2;
const EXIT_PARSE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "k1wb",
    about = "workbench for double short exact sequences and their classes",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every entity in a file; exit 0 only if all are valid.
    Validate { file: PathBuf },
    /// Print the class of a named double sequence.
    Class {
        file: PathBuf,
        #[arg(long)]
        dses: String,
        /// Route through the resolution chain regardless of the objects.
        #[arg(long)]
        general: bool,
    },
    /// Apply the phi-construction to a named double sequence.
    Phi {
        file: PathBuf,
        #[arg(long)]
        dses: String,
        /// Write the output sequence and its witness diagram here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Apply the threefold resolution chain to a named double sequence.
    Resolve {
        file: PathBuf,
        #[arg(long)]
        dses: String,
        #[arg(long)]
        emit: PathBuf,
    },
    /// Validate a named 3x3 diagram and check the defining class relation.
    Check3x3 {
        file: PathBuf,
        #[arg(long)]
        diagram: String,
    },
    /// Generate a seeded value and write it as a workspace file.
    Gen(GenArgs),
    /// Run the acceptance suite.
    Selftest {
        /// Base sample count; 100 reproduces the reference counts.
        #[arg(long, default_value_t = 100)]
        cases: usize,
        /// Seed; defaults to K1WB_SEED from the environment, then 7.
        #[arg(long)]
        seed: Option<u64>,
        /// One JSON record per check instead of text lines.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct GenArgs {
    /// Base ring: `Z` or `gf<p>` for a prime p.
    #[arg(long)]
    ring: String,
    /// One of: dses, dses-general, 3x3-a, 3x3-b, 3x3-c, 3x3-d.
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    emit: PathBuf,
}

fn parse_ring(text: &str) -> Result<BaseRing, String> {
    if text == "Z" {
        return Ok(BaseRing::Integers);
    }
    if let Some(p) = text.strip_prefix("gf") {
        let p: u64 = p.parse().map_err(|_| format!("bad ring {text}"))?;
        return BaseRing::prime_field(p).map_err(|e| e.to_string());
    }
    Err(format!("bad ring {text}; expected Z or gf<p>"))
}

fn load(path: &PathBuf) -> Result<Workspace, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_PARSE
    })?;
    parse(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_PARSE
    })
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), u8> {
    std::fs::write(path, text).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        EXIT_PARSE
    })
}

/// Map library errors onto exit codes: construction faults are internal
/// invariant violations, everything else is a check failure on the data.
fn code_for(e: &Error) -> u8 {
    match e {
        Error::ConstructionFault(_) => EXIT_FAULT,
        _ => EXIT_CHECK,
    }
}

fn get_dses<'w>(ws: &'w Workspace, name: &str) -> Result<&'w k1wb_core::diagrams::DoubleSes, u8> {
    let d = ws.dses.get(name).ok_or_else(|| {
        eprintln!("error: no double sequence named {name}");
        EXIT_PARSE
    })?;
    let report = k1wb_core::diagrams::validate_dses(d);
    if !report.is_valid() {
        eprint!("{report}");
        return Err(EXIT_CHECK);
    }
    Ok(d)
}

fn run() -> u8 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { 0 };
        }
    };
    match cli.command {
        Command::Validate { file } => {
            let ws = match load(&file) {
                Ok(w) => w,
                Err(c) => return c,
            };
            let report = ws.validate();
            if report.is_valid() {
                println!(
                    "ok: {} objects, {} morphisms, {} dses, {} diagrams",
                    ws.objects.len(),
                    ws.morphisms.len(),
                    ws.dses.len(),
                    ws.diagrams.len()
                );
                0
            } else {
                print!("{report}");
                EXIT_CHECK
            }
        }
        Command::Class {
            file,
            dses,
            general,
        } => {
            let ws = match load(&file) {
                Ok(w) => w,
                Err(c) => return c,
            };
            let d = match get_dses(&ws, &dses) {
                Ok(d) => d,
                Err(c) => return c,
            };
            let result = if general {
                dses_class_general(d)
            } else {
                dses_class_free(d)
            };
            match result {
                Ok(c) => {
                    println!("{c}");
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    code_for(&e)
                }
            }
        }
        Command::Phi { file, dses, emit } => {
            let ws = match load(&file) {
                Ok(w) => w,
                Err(c) => return c,
            };
            let d = match get_dses(&ws, &dses) {
                Ok(d) => d,
                Err(c) => return c,
            };
            match phi_auto(d) {
                Ok(r) => {
                    println!(
                        "phi({dses}): type {} -> type {}",
                        dses_type(d),
                        dses_type(&r.output)
                    );
                    if let Some(path) = emit {
                        let mut out = Workspace::new(d.ring());
                        out.insert_dses("phi_out", &r.output);
                        out.insert_diagram("phi_witness", &r.witness3x3);
                        if let Err(c) = write_file(&path, &serialize(&out)) {
                            return c;
                        }
                    }
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    code_for(&e)
                }
            }
        }
        Command::Resolve { file, dses, emit } => {
            let ws = match load(&file) {
                Ok(w) => w,
                Err(c) => return c,
            };
            let d = match get_dses(&ws, &dses) {
                Ok(d) => d,
                Err(c) => return c,
            };
            let resolved = match varphi(d) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return code_for(&e);
                }
            };
            let class = match dses_class_free(&resolved) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return code_for(&e);
                }
            };
            println!(
                "resolved {dses}: type {}, class {class}",
                dses_type(&resolved)
            );
            let mut out = Workspace::new(d.ring());
            out.insert_dses("resolved", &resolved);
            if let Err(c) = write_file(&emit, &serialize(&out)) {
                return c;
            }
            0
        }
        Command::Check3x3 { file, diagram } => {
            let ws = match load(&file) {
                Ok(w) => w,
                Err(c) => return c,
            };
            let t = match ws.diagrams.get(&diagram) {
                Some(t) => t,
                None => {
                    eprintln!("error: no diagram named {diagram}");
                    return EXIT_PARSE;
                }
            };
            let report = k1wb_core::diagrams::validate_3x3(t);
            if !report.is_valid() {
                print!("{report}");
                return EXIT_CHECK;
            }
            match check_relation_3x3(t) {
                Ok(true) => {
                    println!("ok: diagram valid, class relation holds");
                    0
                }
                Ok(false) => {
                    println!("class relation fails");
                    EXIT_CHECK
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    code_for(&e)
                }
            }
        }
        Command::Gen(args) => {
            let ring = match parse_ring(&args.ring) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_PARSE;
                }
            };
            let cfg = GenConfig::new(ring, args.seed);
            let mut out = Workspace::new(ring);
            match args.kind.as_str() {
                "dses" => {
                    let mut rng = Rng64::stream(args.seed, 0);
                    let r1 = 1 + rng.below(2);
                    let r2 = 1 + rng.below(2);
                    out.insert_dses("gen", &gen::random_free_dses(&cfg, 1, r1, r2));
                }
                "dses-general" => {
                    if ring != BaseRing::Integers {
                        eprintln!("error: dses-general requires --ring Z");
                        return EXIT_CHECK;
                    }
                    out.insert_dses("gen", &gen::random_general_dses(&cfg, 1));
                }
                kind if kind.starts_with("3x3-") => {
                    let strategy = match &kind[4..] {
                        "a" => Strategy::A,
                        "b" => Strategy::B,
                        "c" => Strategy::C,
                        "d" => Strategy::D,
                        other => {
                            eprintln!("error: unknown strategy {other}");
                            return EXIT_PARSE;
                        }
                    };
                    out.insert_diagram("gen", &gen::random_3x3(&cfg, 1, strategy));
                }
                other => {
                    eprintln!("error: unknown kind {other}");
                    return EXIT_PARSE;
                }
            }
            if let Err(c) = write_file(&args.emit, &serialize(&out)) {
                return c;
            }
            println!("wrote {}", args.emit.display());
            0
        }
        Command::Selftest { cases, seed, json } => {
            let seed = seed
                .or_else(|| std::env::var("K1WB_SEED").ok().and_then(|s| s.parse().ok()))
                .unwrap_or(7);
            let outcomes = selftest::run_all(cases, seed);
            let mut all_ok = true;
            if json {
                let records: Vec<serde_json::Value> = outcomes
                    .iter()
                    .map(|o| {
                        serde_json::json!({
                            "id": o.id,
                            "status": if o.passed { "pass" } else { "fail" },
                            "details": o.details,
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&records).unwrap());
            }
            for o in &outcomes {
                if !json {
                    println!(
                        "{} {}: {}",
                        if o.passed { "PASS" } else { "FAIL" },
                        o.id,
                        o.details
                    );
                }
                all_ok &= o.passed;
            }
            if all_ok {
                0
            } else {
                EXIT_CHECK
            }
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run())
}
