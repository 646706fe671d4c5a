//! Batch front end: lint, check, traces, synth, validate.
//!
//! Results go to stdout, diagnostics to stderr. Exit codes: 0 success or
//! valid, 1 malformed or invalid, 2 usage or parse error, 3 resource cap.

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tpv_core::msc::{format_trace, MscDocument, MscError};
use tpv_core::semantics::{PurposeSemantics, SemanticsError, VerdictIssue};
use tpv_core::testcase::TestCaseError;
use tpv_core::validator::{self, ValidatorError};
use tpv_core::wellformed::{self, WellFormednessReport};
use tpv_core::{Caps, TestCase};
use tpv_core::pomset::PomsetError;

#[derive(Parser)]
#[command(
    name = "tpv",
    version,
    about = "Test purpose toolkit: MSC-style purposes, pomset semantics, test case validation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cap on linearizations enumerated per behavior.
    #[arg(long = "max-lin", global = true, value_name = "N")]
    max_lin: Option<usize>,
    /// Cap on observable trace length.
    #[arg(long = "max-len", global = true, value_name = "N")]
    max_len: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and desugar a purpose, printing the normalized document.
    Lint { purpose: String },
    /// Decide well-formedness and report every violation.
    Check { purpose: String },
    /// Print the complete observable traces with their verdicts.
    Traces { purpose: String },
    /// Synthesize the canonical valid test case of a well-formed purpose.
    Synth { purpose: String },
    /// Run a test case table against a purpose.
    Validate { purpose: String, testcase: String },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<MscError> for Failure {
    fn from(e: MscError) -> Failure {
        let code = match e {
            MscError::Syntax { .. } => 2,
            MscError::Semantic(_) => 1,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<SemanticsError> for Failure {
    fn from(e: SemanticsError) -> Failure {
        let code = match &e {
            SemanticsError::Msc(MscError::Syntax { .. }) => 2,
            SemanticsError::Pomset(PomsetError::ResourceExceeded { .. }) => 3,
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<TestCaseError> for Failure {
    fn from(e: TestCaseError) -> Failure {
        let code = match &e {
            TestCaseError::Syntax { .. } => 2,
            TestCaseError::Resource { .. } => 3,
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<ValidatorError> for Failure {
    fn from(e: ValidatorError) -> Failure {
        match e {
            ValidatorError::Semantics(inner) => inner.into(),
            ValidatorError::TestCase(inner) => inner.into(),
            other => Failure::new(1, other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let caps = Caps {
        max_linearizations: cli.max_lin.unwrap_or(Caps::default().max_linearizations),
        max_trace_len: cli.max_len.unwrap_or(Caps::default().max_trace_len),
    };
    if caps.max_linearizations == 0 || caps.max_trace_len == 0 {
        eprintln!("error: resource caps must be positive");
        return ExitCode::from(2);
    }
    let result = match &cli.command {
        Command::Lint { purpose } => lint(purpose),
        Command::Check { purpose } => check(purpose, cli.format, &caps),
        Command::Traces { purpose } => traces(purpose, cli.format, &caps),
        Command::Synth { purpose } => synth(purpose, &caps),
        Command::Validate { purpose, testcase } => {
            validate(purpose, testcase, cli.format, &caps)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::new(2, format!("cannot read standard input: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::new(2, format!("cannot read {path}: {e}")))
    }
}

fn load_purpose(path: &str) -> Result<MscDocument, Failure> {
    let text = read_input(path)?;
    let doc = MscDocument::parse(&text)?;
    Ok(doc.desugar()?)
}

fn lint(path: &str) -> Result<u8, Failure> {
    let doc = load_purpose(path)?;
    print!("{}", doc.pretty());
    Ok(0)
}

fn check(path: &str, format: Format, caps: &Caps) -> Result<u8, Failure> {
    let doc = load_purpose(path)?;
    let sem = PurposeSemantics::build(&doc)?;
    let report = wellformed::check(&sem, caps)?;
    print_report(&sem.name, &report, format);
    Ok(if report.well_formed { 0 } else { 1 })
}

fn branches(s: &std::collections::BTreeSet<usize>) -> String {
    let items: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    items.join(",")
}

fn print_report(name: &str, report: &WellFormednessReport, format: Format) {
    match format {
        Format::Records => {
            println!(
                "RESULT {}",
                if report.well_formed {
                    "well-formed"
                } else {
                    "malformed"
                }
            );
            for v in &report.wf1_violations {
                println!(
                    "WF1 AT {} BRANCHES {}/{}",
                    format_trace(&v.witness),
                    branches(&v.left_paths),
                    branches(&v.right_paths)
                );
            }
            for issue in &report.verdict_conflicts {
                match issue {
                    VerdictIssue::Conflict {
                        trace,
                        first,
                        second,
                    } => {
                        println!(
                            "WF1 AT {} BRANCHES {}/{}",
                            format_trace(trace),
                            first.0,
                            second.0
                        );
                    }
                    other => println!("VERDICT AT {}", format_trace(other.trace())),
                }
            }
            for cp in &report.wf2_violations {
                println!(
                    "WF2 AT {} ON {} {} BRANCHES {}/{}",
                    format_trace(&cp.trace),
                    cp.actions.0,
                    cp.actions.1,
                    branches(&cp.left),
                    branches(&cp.right)
                );
            }
        }
        Format::Text => {
            if report.well_formed {
                println!("purpose {name}: well-formed");
                return;
            }
            println!("purpose {name}: malformed");
            for v in &report.wf1_violations {
                println!(
                    "  WF1 violation: trace {} is an observation of two distinct behaviors",
                    format_trace(&v.witness)
                );
            }
            for issue in &report.verdict_conflicts {
                match issue {
                    VerdictIssue::Conflict {
                        trace,
                        first,
                        second,
                    } => println!(
                        "  WF1 violation: trace {} completes with verdicts {} and {}",
                        format_trace(trace),
                        first.1,
                        second.1
                    ),
                    other => println!("  verdict assignment violation: {other}"),
                }
            }
            for cp in &report.wf2_violations {
                println!(
                    "  WF2 violation: after {} the choice between {} and {} is not resolved by the SUT",
                    format_trace(&cp.trace),
                    cp.actions.0,
                    cp.actions.1
                );
            }
        }
    }
}

fn traces(path: &str, format: Format, caps: &Caps) -> Result<u8, Failure> {
    let doc = load_purpose(path)?;
    let sem = PurposeSemantics::build(&doc)?;
    let trie = sem.language(caps)?;
    for (trace, verdict) in trie.complete_traces() {
        match format {
            Format::Records => println!("TRACE {verdict} {}", format_trace(&trace)),
            Format::Text => println!("{verdict}: {}", format_trace(&trace)),
        }
    }
    Ok(0)
}

fn synth(path: &str, caps: &Caps) -> Result<u8, Failure> {
    let doc = load_purpose(path)?;
    let sem = PurposeSemantics::build(&doc)?;
    let ts = validator::synthesize(&sem, caps)?;
    print!("{}", ts.serialize());
    Ok(0)
}

fn validate(
    purpose_path: &str,
    testcase_path: &str,
    format: Format,
    caps: &Caps,
) -> Result<u8, Failure> {
    let doc = load_purpose(purpose_path)?;
    let sem = PurposeSemantics::build(&doc)?;
    let wf = wellformed::check(&sem, caps)?;
    if !wf.well_formed {
        return Err(Failure::new(
            1,
            format!("purpose {} is malformed; validation is undefined", sem.name),
        ));
    }
    let trie = sem.language(caps)?;
    let ts = TestCase::parse(&read_input(testcase_path)?)?;
    let report = validator::valid(&trie, &ts);
    match format {
        Format::Records => {
            println!("RESULT {}", if report.valid { "valid" } else { "invalid" });
            if let Some(f) = &report.failure {
                println!("FAIL {} AT {}", f.reason, format_trace(&f.trace));
            }
            println!("CALLS {}", report.visited);
        }
        Format::Text => {
            if report.valid {
                println!(
                    "test case {} is valid for purpose {} ({} positions evaluated)",
                    ts.name, sem.name, report.visited
                );
            } else {
                let f = report.failure.as_ref().expect("invalid reports carry a failure");
                println!(
                    "test case {} is invalid for purpose {}: {} at {}",
                    ts.name,
                    sem.name,
                    f.reason,
                    format_trace(&f.trace)
                );
            }
        }
    }
    Ok(if report.valid { 0 } else { 1 })
}
