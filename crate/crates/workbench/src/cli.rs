//! Argument parsing, report printing and exit codes for the `katetov` binary.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use katetov_core::construction::PartitionData;
use katetov_core::ideals::IdealSpec;
use katetov_core::DescribedSet;
use serde::de::DeserializeOwned;
use serde_json::json;

use crate::certificate::{Certificate, Certifier};
use crate::request::{Claim, Request, RunError};
use crate::scenario::{Scenario, Setup};
use crate::suite;

#[derive(Parser, Debug)]
#[command(name = "katetov", version, about = "Exact finite checks for Katětov reductions between ideals on ω")]
struct Cli {
    /// Write a replayable certificate of the run here.
    #[arg(long, global = true, value_name = "PATH")]
    certificate: Option<PathBuf>,
    /// Seed for randomised checks; recorded in every certificate.
    #[arg(long, global = true, default_value_t = suite::DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

/// JSON arguments are inline JSON, `@FILE`, or a path to an existing file.
#[derive(Subcommand, Debug)]
enum Command {
    /// Build the greedy interval partition and verify its three conditions.
    Construct {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        depth: u64,
    },
    /// Verify a partition read from a file.
    VerifyConstruction {
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
    },
    /// Exact weights `w_S(m)` and their total.
    Weights {
        #[arg(long, value_name = "JSON")]
        set: String,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        depth: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        elements: Vec<u64>,
    },
    /// Membership and positivity of a described set in an ideal.
    Membership {
        /// An ideal name such as `sum-harmonic`, or its JSON.
        #[arg(long)]
        ideal: String,
        #[arg(long, value_name = "JSON")]
        set: String,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        horizon: u64,
    },
    /// Least vertex set whose pairs all lie in the set.
    RamseySearch {
        #[arg(long, value_name = "JSON")]
        set: String,
        #[arg(long)]
        size: usize,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        horizon: u64,
    },
    /// Least sequence whose finite sums all lie in the set.
    HindmanSearch {
        #[arg(long, value_name = "JSON")]
        set: String,
        #[arg(long)]
        size: usize,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        horizon: u64,
    },
    /// Run a bundled or file scenario; tree scenarios are labelled instead and take no stages.
    ///
    /// Collision scenarios default to the stage count they declare.
    Diagonalize {
        #[arg(long)]
        scenario: String,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        stages: Option<u64>,
    },
    /// Check a reduction claim: a Katětov map, a subset of summable ideals, or a tree witness.
    CheckReduction {
        #[arg(long, value_name = "JSON")]
        claim: String,
    },
    /// Recompute a certificate and compare it field by field.
    Certify {
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
    },
    /// Run the acceptance criteria.
    Suite {
        /// Comma-separated criterion numbers.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u8>>,
        /// Write each criterion's certificates here.
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
    /// List the bundled scenarios.
    Scenarios,
}

fn usage(m: impl Into<String>) -> RunError {
    RunError::Usage(m.into())
}

fn read_text(path: &Path) -> Result<String, RunError> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn json_arg<T: DeserializeOwned>(what: &str, arg: &str) -> Result<T, RunError> {
    let text = if let Some(p) = arg.strip_prefix('@') {
        read_text(Path::new(p))?
    } else if !arg.trim_start().starts_with(['{', '[', '"']) && Path::new(arg).is_file() {
        read_text(Path::new(arg))?
    } else {
        arg.to_string()
    };
    serde_json::from_str(&text).map_err(|e| usage(format!("--{what}: {e}")))
}

fn ideal_arg(arg: &str) -> Result<IdealSpec, RunError> {
    if arg.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
        serde_json::from_value(json!({ "ideal": arg })).map_err(|e| usage(format!("--ideal: {e}")))
    } else {
        json_arg("ideal", arg)
    }
}

fn scenario_arg(arg: &str) -> Result<Scenario, RunError> {
    Scenario::load(arg).map_err(|e| usage(e.to_string()))
}

fn request_of(cmd: &Command) -> Result<Request, RunError> {
    Ok(match cmd {
        Command::Construct { depth } => Request::Construct { depth: *depth as usize },
        Command::VerifyConstruction { input } => {
            let text = read_text(input)?;
            // Also accept the report printed by `construct`, which wraps the partition.
            let partition: PartitionData = serde_json::from_str(&text)
                .or_else(|_| {
                    let v: serde_json::Value = serde_json::from_str(&text)?;
                    serde_json::from_value(v["result"]["partition"].clone())
                })
                .map_err(|e| usage(format!("{}: {e}", input.display())))?;
            Request::VerifyConstruction { partition }
        }
        Command::Weights { set, depth, elements } => {
            Request::Weights { set: json_arg::<DescribedSet>("set", set)?, depth: *depth as usize, elements: elements.clone() }
        }
        Command::Membership { ideal, set, horizon } => {
            Request::Membership { ideal: ideal_arg(ideal)?, set: json_arg("set", set)?, horizon: *horizon }
        }
        Command::RamseySearch { set, size, horizon } => {
            Request::RamseySearch { set: json_arg("set", set)?, size: *size, horizon: *horizon }
        }
        Command::HindmanSearch { set, size, horizon } => {
            Request::HindmanSearch { set: json_arg("set", set)?, size: *size, horizon: *horizon }
        }
        Command::Diagonalize { scenario, stages } => {
            let s = scenario_arg(scenario)?;
            match (&s.setup, stages) {
                (Setup::Tree(_), _) => Request::Labelling { scenario: s },
                (_, Some(k)) => Request::Diagonalize { scenario: s, stages: *k },
                (Setup::Collision(c), None) => Request::Diagonalize { stages: c.stages, scenario: s },
                (_, None) => return Err(usage(format!("{} needs --stages", s.name))),
            }
        }
        Command::CheckReduction { claim } => Request::CheckReduction { claim: json_arg::<Claim>("claim", claim)? },
        Command::Certify { .. } | Command::Suite { .. } | Command::Scenarios => unreachable!("not a computation"),
    })
}

fn print(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serialise"));
}

fn fail(e: &RunError) -> i32 {
    eprintln!("katetov: {e}");
    e.exit_code()
}

fn write_certificate(path: &Path, c: &Certificate) -> Result<(), RunError> {
    std::fs::write(path, c.to_json()).map_err(|e| RunError::Failed(format!("{}: {e}", path.display())))
}

fn compute(cli: &Cli) -> i32 {
    let request = match request_of(&cli.command) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let e = match request.execute(cli.seed) {
        Ok(e) => e,
        Err(e) => return fail(&e),
    };
    let cert = Certificate::issue(&request, cli.seed, &e);
    if let Some(path) = &cli.certificate {
        if let Err(err) = write_certificate(path, &cert) {
            return fail(&err);
        }
    }
    print(&json!({
        "command": cert.request["command"],
        "passed": e.passed,
        "seed": cli.seed,
        "request_sha256": cert.request_sha256,
        "assumption_count": e.assumptions.len(),
        "assumptions": e.assumptions,
        "result": e.result,
    }));
    if e.passed {
        0
    } else {
        1
    }
}

fn certify(input: &Path) -> i32 {
    let text = match read_text(input) {
        Ok(t) => t,
        Err(e) => return fail(&e),
    };
    let mut c = Certifier::new();
    match c.certify_text(&text) {
        Ok(cert) => {
            print(&json!({
                "certified": true,
                "command": cert.request["command"],
                "passed": cert.passed,
                "assumption_count": cert.assumptions.len(),
                "assumptions": cert.assumptions,
            }));
            0
        }
        Err(r) => {
            print(&json!({ "certified": false, "reason": r.to_string() }));
            eprintln!("katetov: {r}");
            r.exit_code()
        }
    }
}

fn run_suite(seed: u64, only: Option<&[u8]>, out_dir: Option<&Path>) -> i32 {
    if let Some(bad) = only.and_then(|o| o.iter().find(|n| !(1..=11).contains(*n))) {
        return fail(&usage(format!("no criterion {bad}")));
    }
    let reports = suite::run(seed, only, |r| println!("{}", r.line()));
    if let Some(dir) = out_dir {
        match suite::write_certificates(&reports, dir) {
            Ok(n) => println!("wrote {n} certificates to {}", dir.display()),
            Err(e) => return fail(&RunError::Failed(format!("{}: {e}", dir.display()))),
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed", reports.len() - failed, reports.len());
    i32::from(failed > 0)
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match &cli.command {
        Command::Certify { input } => certify(input),
        Command::Suite { only, out_dir } => run_suite(cli.seed, only.as_deref(), out_dir.as_deref()),
        Command::Scenarios => {
            for (name, _) in crate::scenario::BUNDLED {
                let s = Scenario::bundled(name).expect("bundled");
                println!("{name:20} {}", s.description);
            }
            0
        }
        _ => compute(&cli),
    }
}
