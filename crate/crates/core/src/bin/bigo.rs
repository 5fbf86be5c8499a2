//! Command line front end. Exit codes: 0 valid, 1 invalid, 2 error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bigo::fuzz::{self, FuzzProfile};
use bigo::oracle::Reading;
use bigo::problem::{parse_problem, Problem};
use bigo::report::{self, TreeReport, VerdictReport};
use bigo::selftest;

#[derive(Parser)]
#[command(
    name = "bigo",
    version,
    about = "Decide linear big O entailments",
    after_help = "Without a subcommand, `check` is assumed. Problem files default to \
                  `theory signed`; the reading defaults to pointwise, except for the \
                  growth theory, which is always read eventually."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a problem file and print the verdict.
    Check(CheckArgs),
    /// Decide random problems and cross-check every verdict.
    Fuzz(FuzzArgs),
    /// Run the axiom and duality suites.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ReadingArg {
    Pointwise,
    Eventually,
}

#[derive(Args)]
struct CheckArgs {
    /// Problem file.
    file: PathBuf,
    #[arg(long, value_enum)]
    reading: Option<ReadingArg>,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
    /// Seed for the random search run against valid verdicts.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Check a saved JSON report against the problem instead of deciding it.
    #[arg(long, value_name = "FILE")]
    verify_only: Option<PathBuf>,
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 100)]
    count: u64,
    /// core, signed, with-one or growth.
    #[arg(long, default_value = "core")]
    profile: FuzzProfile,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Random instances per axiom scheme.
    #[arg(long, default_value_t = 20)]
    instances: usize,
    /// Random matrices in the duality suite.
    #[arg(long, default_value_t = 500)]
    matrices: usize,
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn load(args: &CheckArgs) -> Result<Problem, String> {
    let text = std::fs::read_to_string(&args.file).map_err(|e| format!("{}: {e}", args.file.display()))?;
    let p = parse_problem(&text).map_err(|e| format!("{}:{e}", args.file.display()))?;
    match args.reading {
        None => Ok(p),
        Some(r) => p
            .with_reading(match r {
                ReadingArg::Pointwise => Reading::Pointwise,
                ReadingArg::Eventually => Reading::Eventually,
            })
            .map_err(|e| e.to_string()),
    }
}

fn print_report(r: &VerdictReport, json: bool) {
    if json {
        println!("{}", r.to_json());
        return;
    }
    println!("{} ({:.3} ms)", r.verdict, r.ms);
    if let Some(c) = &r.certificate {
        for p in &c.proofs {
            let branch = match p.branch.as_deref() {
                Some(b) if !b.is_empty() => format!(" [{b}]"),
                _ => String::new(),
            };
            let how = match &p.tree {
                TreeReport::Leaf { coefficients, .. } => format!("coefficients ({})", coefficients.join(", ")),
                TreeReport::Split { var, .. } => format!("case split on {var}"),
            };
            println!("  obligation {}{branch}: disjunct {}, {how}", p.obligation, p.disjunct);
        }
    }
    if let Some(cx) = &r.counterexample {
        println!("  domain size {}, basis ({})", cx.domain_size, cx.basis.join(", "));
        for (a, pts) in &cx.values {
            let pts: Vec<String> = pts.iter().map(|p| format!("[{}]", p.join(", "))).collect();
            println!("  {a} = {}", pts.join(" "));
        }
    }
}

fn check(args: CheckArgs) -> ExitCode {
    let problem = match load(&args) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let code = |r: &VerdictReport| ExitCode::from(if r.is_valid() { 0 } else { 1 });
    if let Some(path) = &args.verify_only {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(format!("{}: {e}", path.display())),
        };
        let r = match VerdictReport::from_json(&text) {
            Ok(r) => r,
            Err(e) => return fail(format!("{}: {e}", path.display())),
        };
        if !report::verify(&r, &problem) {
            return fail("report does not verify");
        }
        println!("verified {}", r.verdict);
        return code(&r);
    }
    match report::run_seeded(&problem, args.seed) {
        Ok(r) => {
            print_report(&r, args.json);
            code(&r)
        }
        Err(e) => fail(e),
    }
}

fn run_fuzz(args: FuzzArgs) -> ExitCode {
    let s = fuzz::fuzz(args.profile, args.count, args.seed);
    if args.json {
        let failures: Vec<serde_json::Value> = s
            .failures
            .iter()
            .map(|(i, p, e)| serde_json::json!({"index": i, "problem": p, "error": e}))
            .collect();
        let out = serde_json::json!({
            "profile": args.profile.to_string(),
            "seed": args.seed,
            "count": args.count,
            "valid": s.valid,
            "invalid": s.invalid,
            "failures": failures,
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    } else {
        println!(
            "{} problems ({}), seed {}: {} valid, {} invalid, {} failures",
            args.count,
            args.profile,
            args.seed,
            s.valid,
            s.invalid,
            s.failures.len()
        );
        for (i, p, e) in &s.failures {
            println!("--- #{i}: {e}\n{p}");
        }
    }
    ExitCode::from(if s.failures.is_empty() { 0 } else { 2 })
}

fn run_selftest(args: SelftestArgs) -> ExitCode {
    let mut checks = selftest::axiom_suite(args.seed, args.instances);
    checks.extend(selftest::duality_suite(args.seed, args.matrices));
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
    for c in &failed {
        println!("FAIL {}: {}", c.name, c.detail);
    }
    println!("{} checks, {} failed", checks.len(), failed.len());
    ExitCode::from(if failed.is_empty() { 0 } else { 2 })
}

fn main() -> ExitCode {
    let mut argv: Vec<String> = std::env::args().collect();
    let known = ["check", "fuzz", "selftest", "help", "-h", "--help", "-V", "--version"];
    if argv.len() > 1 && !known.contains(&argv[1].as_str()) {
        argv.insert(1, "check".into());
    }
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Check(a) => check(a),
        Command::Fuzz(a) => run_fuzz(a),
        Command::Selftest(a) => run_selftest(a),
    }
}
