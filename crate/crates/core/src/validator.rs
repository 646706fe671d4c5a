//! Deciding whether a test case is able to drive every complete behavior
//! of a purpose to its prescribed verdict, no matter how the system under
//! test resolves concurrency. The decision procedure recurses over the
//! observable language; two independent characterizations (run coverage and
//! the equivalence-class formulation) back it in the test suites, and
//! simple mutation helpers produce invalid neighbors of a valid table.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::msc::{format_trace, Action, Dir, Trace, Verdict};
use crate::semantics::{LanguageTrie, PurposeSemantics, SemanticsError};
use crate::testcase::{equiv_class, Response, TestCase, TestCaseError, DEFAULT_EQUIV_CAP};
use crate::wellformed;
use crate::Caps;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidatorError {
    #[error("purpose {name} is not well-formed; no valid test case exists")]
    NotWellFormed { name: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    TestCase(#[from] TestCaseError),
}

/// Why a test case fails to be valid, at the first trace showing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    /// The table has no entry for a reachable trace.
    Undefined,
    /// The table stops with a verdict the purpose does not assign here.
    WrongVerdict,
    /// The table waits although no response can arrive.
    QuiescentNoReceives,
    /// The table sends a stimulus the purpose does not allow here.
    IllegalSend,
}

impl FailureReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            FailureReason::Undefined => "undefined",
            FailureReason::WrongVerdict => "wrong_verdict",
            FailureReason::QuiescentNoReceives => "quiescent_no_receives",
            FailureReason::IllegalSend => "illegal_send",
        }
    }
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationFailure {
    pub trace: Trace,
    pub reason: FailureReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub valid: bool,
    pub failure: Option<ValidationFailure>,
    /// Number of language positions the decision procedure evaluated.
    pub visited: usize,
}

/// Decides validity from the empty trace: at every reachable position the
/// table must either send a legal stimulus, wait where responses can
/// arrive (and survive all of them), or stop with the purpose's verdict.
pub fn valid(trie: &LanguageTrie, ts: &TestCase) -> ValidationReport {
    run_valid(trie, ts, LanguageTrie::ROOT, &mut Vec::new())
}

/// Same decision from a given position in the language.
pub fn valid_from(
    trie: &LanguageTrie,
    ts: &TestCase,
    from: &[Action],
) -> Result<ValidationReport, ValidatorError> {
    let node = trie.node_id(from).ok_or_else(|| ValidatorError::Precondition(format!(
        "trace {} is not in the observable language",
        format_trace(from)
    )))?;
    Ok(run_valid(trie, ts, node, &mut from.to_vec()))
}

fn run_valid(
    trie: &LanguageTrie,
    ts: &TestCase,
    node: usize,
    trace: &mut Trace,
) -> ValidationReport {
    let mut visited = 0usize;
    let failure = go(trie, ts, node, trace, &mut visited).err();
    ValidationReport {
        valid: failure.is_none(),
        failure,
        visited,
    }
}

fn go(
    trie: &LanguageTrie,
    ts: &TestCase,
    node: usize,
    trace: &mut Trace,
    visited: &mut usize,
) -> Result<(), ValidationFailure> {
    *visited += 1;
    let fail = |reason| ValidationFailure {
        trace: trace.clone(),
        reason,
    };
    match ts.response(trace) {
        None => Err(fail(FailureReason::Undefined)),
        Some(Response::Verdict(v)) => {
            if trie.node(node).verdict() == Some(*v) {
                Ok(())
            } else {
                Err(fail(FailureReason::WrongVerdict))
            }
        }
        Some(Response::Quiet) => {
            let receives: Vec<(Action, usize)> = trie
                .node(node)
                .children
                .iter()
                .filter(|(a, _)| a.dir == Dir::Receive)
                .map(|(a, &n)| (a.clone(), n))
                .collect();
            if receives.is_empty() {
                return Err(fail(FailureReason::QuiescentNoReceives));
            }
            for (a, next) in receives {
                trace.push(a);
                let r = go(trie, ts, next, trace, visited);
                trace.pop();
                r?;
            }
            Ok(())
        }
        Some(Response::Send(a)) => match trie.node(node).children.get(a) {
            None => Err(fail(FailureReason::IllegalSend)),
            Some(&next) => {
                trace.push(a.clone());
                let r = go(trie, ts, next, trace, visited);
                trace.pop();
                r
            }
        },
    }
}

/// Builds the canonical valid test case of a well-formed purpose: stop with
/// the verdict where the language ends, wait wherever only responses are
/// enabled, otherwise send the least enabled stimulus.
pub fn synthesize(sem: &PurposeSemantics, caps: &Caps) -> Result<TestCase, ValidatorError> {
    let report = wellformed::check(sem, caps)?;
    if !report.well_formed {
        return Err(ValidatorError::NotWellFormed {
            name: sem.name.clone(),
        });
    }
    let trie = sem.language(caps)?;
    let mut entries: Vec<(Trace, Response)> = Vec::new();
    build(&trie, LanguageTrie::ROOT, &mut Vec::new(), &mut entries);
    Ok(TestCase::new(format!("{}_test", sem.name), entries)
        .expect("synthesis visits each trace once and stops at verdicts"))
}

fn build(
    trie: &LanguageTrie,
    node: usize,
    trace: &mut Trace,
    entries: &mut Vec<(Trace, Response)>,
) {
    let n = trie.node(node);
    if n.children.is_empty() {
        let v = n.verdict().expect("well-formed languages end in verdicts");
        entries.push((trace.clone(), Response::Verdict(v)));
        return;
    }
    let first_send = n
        .children
        .iter()
        .find(|(a, _)| a.dir == Dir::Send)
        .map(|(a, &next)| (a.clone(), next));
    match first_send {
        Some((a, next)) => {
            entries.push((trace.clone(), Response::Send(a.clone())));
            trace.push(a);
            build(trie, next, trace, entries);
            trace.pop();
        }
        None => {
            entries.push((trace.clone(), Response::Quiet));
            let children: Vec<(Action, usize)> = n
                .children
                .iter()
                .map(|(a, &next)| (a.clone(), next))
                .collect();
            for (a, next) in children {
                trace.push(a);
                build(trie, next, trace, entries);
                trace.pop();
            }
        }
    }
}

/// Run-coverage characterization of validity, computed independently of
/// [`valid`]: every complete behavior must be validated by some complete
/// run of the table that stays in the language, carries the same actions
/// with the same response order, and ends in the prescribed verdict.
/// Returns the first uncovered complete trace as witness.
pub fn oracle_valid(
    sem: &PurposeSemantics,
    trie: &LanguageTrie,
    ts: &TestCase,
) -> (bool, Option<Trace>) {
    let runs: Vec<(Trace, Verdict)> = ts
        .test_language(&sem.obs_rec)
        .into_iter()
        .filter_map(|(t, v)| v.map(|v| (t, v)))
        .collect();
    for (sigma, want) in trie.complete_traces() {
        let mut sorted_sigma = sigma.clone();
        sorted_sigma.sort();
        let receives: Vec<&Action> = sigma.iter().filter(|a| a.dir == Dir::Receive).collect();
        let covered = runs.iter().any(|(rho, got)| {
            if *got != want || !trie.contains(rho) {
                return false;
            }
            let mut sorted_rho = rho.clone();
            sorted_rho.sort();
            let rho_receives: Vec<&Action> =
                rho.iter().filter(|a| a.dir == Dir::Receive).collect();
            sorted_rho == sorted_sigma && rho_receives == receives
        });
        if !covered {
            return (false, Some(sigma));
        }
    }
    (true, None)
}

/// Equivalence-class characterization of validity: the table must agree
/// with the purpose's verdicts wherever their languages overlap, and must
/// be able to produce a representative of every complete behavior's
/// observational equivalence class. Returns the first witness trace
/// breaking either condition.
pub fn definition_valid(
    sem: &PurposeSemantics,
    trie: &LanguageTrie,
    ts: &TestCase,
) -> Result<(bool, Option<Trace>), ValidatorError> {
    let test_lang: BTreeMap<Trace, Option<Verdict>> = ts.test_language(&sem.obs_rec);
    let purpose_lang: BTreeSet<Trace> = trie.all_traces().into_iter().collect();
    for (sigma, ver_ts) in &test_lang {
        if !purpose_lang.contains(sigma) {
            continue;
        }
        let ver_m = trie.verdict_of(sigma)?;
        if *ver_ts != ver_m {
            return Ok((false, Some(sigma.clone())));
        }
    }
    for (sigma, _) in trie.complete_traces() {
        let class = equiv_class(&sigma, &purpose_lang, DEFAULT_EQUIV_CAP)?;
        if !class.iter().any(|rho| test_lang.contains_key(rho)) {
            return Ok((false, Some(sigma)));
        }
    }
    Ok((true, None))
}

/// Small, deterministic edits that break a test case in a specific way.
pub mod mutate {
    use super::*;

    /// Swaps pass and fail verdicts; any reachable verdict entry then
    /// disagrees with the purpose.
    pub fn swap_verdicts(ts: &TestCase) -> TestCase {
        let entries = ts.entries().map(|(t, r)| {
            let r = match r {
                Response::Verdict(Verdict::Pass) => Response::Verdict(Verdict::Fail),
                Response::Verdict(Verdict::Fail) => Response::Verdict(Verdict::Pass),
                other => other.clone(),
            };
            (t.clone(), r)
        });
        TestCase::new(format!("{}_swapped", ts.name), entries.collect::<Vec<_>>())
            .expect("swapping verdicts keeps the table shape")
    }

    /// Removes the entry for one trace, leaving it undefined.
    pub fn delete_entry(ts: &TestCase, trace: &[Action]) -> Option<TestCase> {
        ts.response(trace)?;
        let entries: Vec<(Trace, Response)> = ts
            .entries()
            .filter(|(t, _)| t.as_slice() != trace)
            .map(|(t, r)| (t.clone(), r.clone()))
            .collect();
        Some(
            TestCase::new(format!("{}_deleted", ts.name), entries)
                .expect("removing an entry keeps the table shape"),
        )
    }

    /// Replaces the first quiescent entry with a stimulus the purpose does
    /// not enable there.
    pub fn quiet_to_illegal_send(
        ts: &TestCase,
        sem: &PurposeSemantics,
        trie: &LanguageTrie,
    ) -> Option<TestCase> {
        let (at, _) = ts
            .entries()
            .find(|(_, r)| matches!(r, Response::Quiet))?;
        let at = at.clone();
        let enabled = trie.en(&at).unwrap_or_default();
        let bad = sem
            .obs_send
            .iter()
            .find(|a| !enabled.contains(*a))
            .cloned()
            .unwrap_or_else(|| {
                let from = sem.ports.iter().next().expect("purposes have a port");
                let to = sem.suts.iter().next().expect("purposes have a sut");
                Action::send(from, to, "zz")
            });
        let entries: Vec<(Trace, Response)> = ts
            .entries()
            .map(|(t, r)| {
                if *t == at {
                    (t.clone(), Response::Send(bad.clone()))
                } else {
                    (t.clone(), r.clone())
                }
            })
            .collect();
        Some(
            TestCase::new(format!("{}_impatient", ts.name), entries)
                .expect("replacing a response keeps the table shape"),
        )
    }

    /// Renames the message of the first stimulus entry, making it foreign
    /// to the purpose's alphabet.
    pub fn redirect_send(ts: &TestCase) -> Option<TestCase> {
        let (at, a) = ts.entries().find_map(|(t, r)| match r {
            Response::Send(a) => Some((t.clone(), a.clone())),
            _ => None,
        })?;
        let mut bad = a;
        bad.msg.push('x');
        let entries: Vec<(Trace, Response)> = ts
            .entries()
            .map(|(t, r)| {
                if *t == at {
                    (t.clone(), Response::Send(bad.clone()))
                } else {
                    (t.clone(), r.clone())
                }
            })
            .collect();
        Some(
            TestCase::new(format!("{}_redirected", ts.name), entries)
                .expect("replacing a response keeps the table shape"),
        )
    }
}
