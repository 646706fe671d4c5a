//! Deterministic test cases: finite tables from observed traces to the
//! tester's next move (send a stimulus, stay quiet and collect responses,
//! or stop with a verdict), plus the trace language a table can produce
//! and the observational equivalence classes used to compare test runs
//! against purpose behaviors.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::msc::{format_trace, Action, Dir, Trace, Verdict};

/// Cap on the trace length [`equiv_class`] will expand.
pub const DEFAULT_EQUIV_CAP: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TestCaseError {
    #[error("test case syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("duplicate entry for trace {}", format_trace(trace))]
    DuplicateEntry { trace: Trace },
    #[error("entry for {} extends {}, which already carries a verdict",
        format_trace(entry), format_trace(verdict_trace))]
    EntryAfterVerdict {
        verdict_trace: Trace,
        entry: Trace,
    },
    #[error("trace of length {len} exceeds the equivalence expansion cap {limit}")]
    Resource { len: usize, limit: usize },
}

/// The tester's reaction to having observed a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Response {
    /// Send this stimulus next.
    Send(Action),
    /// Send nothing; wait for responses.
    Quiet,
    /// Stop and assign the verdict.
    Verdict(Verdict),
}

/// A deterministic test case: a finite partial map from traces to
/// responses. Entries never extend a trace that already carries a verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCase {
    pub name: String,
    table: BTreeMap<Trace, Response>,
}

impl TestCase {
    pub fn new(
        name: impl Into<String>,
        entries: impl IntoIterator<Item = (Trace, Response)>,
    ) -> Result<TestCase, TestCaseError> {
        let mut table = BTreeMap::new();
        for (trace, response) in entries {
            if table.insert(trace.clone(), response).is_some() {
                return Err(TestCaseError::DuplicateEntry { trace });
            }
        }
        for trace in table.keys() {
            for cut in 0..trace.len() {
                if let Some(Response::Verdict(_)) = table.get(&trace[..cut]) {
                    return Err(TestCaseError::EntryAfterVerdict {
                        verdict_trace: trace[..cut].to_vec(),
                        entry: trace.clone(),
                    });
                }
            }
        }
        Ok(TestCase {
            name: name.into(),
            table,
        })
    }

    pub fn response(&self, trace: &[Action]) -> Option<&Response> {
        self.table.get(trace)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Trace, &Response)> {
        self.table.iter()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// The actions the tester may observe next after `trace`: the sent
    /// stimulus, or any response in `obs_rec` while staying quiet. Verdicts
    /// and missing entries enable nothing.
    pub fn step(&self, trace: &[Action], obs_rec: &BTreeSet<Action>) -> BTreeSet<Action> {
        match self.table.get(trace) {
            Some(Response::Send(a)) => [a.clone()].into_iter().collect(),
            Some(Response::Quiet) => obs_rec.clone(),
            Some(Response::Verdict(_)) | None => BTreeSet::new(),
        }
    }

    /// Every trace a run of this test case can produce, with the verdict it
    /// ends in if its entry is one. The empty trace is always producible.
    pub fn test_language(&self, obs_rec: &BTreeSet<Action>) -> BTreeMap<Trace, Option<Verdict>> {
        let mut out: BTreeMap<Trace, Option<Verdict>> = BTreeMap::new();
        let mut work = vec![Vec::new()];
        while let Some(trace) = work.pop() {
            if out.contains_key(&trace) {
                continue;
            }
            let verdict = match self.table.get(&trace) {
                Some(Response::Verdict(v)) => Some(*v),
                _ => None,
            };
            for a in self.step(&trace, obs_rec) {
                let mut next = trace.clone();
                next.push(a);
                work.push(next);
            }
            out.insert(trace, verdict);
        }
        out
    }

    /// Renders the table in the line format [`parse`](Self::parse) reads.
    pub fn serialize(&self) -> String {
        let mut out = format!("testcase {}\n", self.name);
        for (trace, response) in &self.table {
            let rhs = match response {
                Response::Send(a) => a.to_string(),
                Response::Quiet => "quiet".to_string(),
                Response::Verdict(v) => v.to_string(),
            };
            out.push_str(&format!("{} => {}\n", format_trace(trace), rhs));
        }
        out
    }

    /// Parses the line format: a `testcase <name>` header, then one
    /// `<trace> => <response>` entry per line. `-` is the empty trace,
    /// `quiet` the quiescent response; `#` starts a comment.
    pub fn parse(text: &str) -> Result<TestCase, TestCaseError> {
        let err = |line: usize, message: String| TestCaseError::Syntax { line, message };
        let mut name = None;
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = match raw.find('#') {
                Some(cut) => &raw[..cut],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if name.is_none() {
                let rest = line
                    .strip_prefix("testcase")
                    .ok_or_else(|| err(lineno, "expected testcase header".into()))?;
                let n = rest.trim();
                if n.is_empty() || n.contains(char::is_whitespace) {
                    return Err(err(lineno, "expected a single test case name".into()));
                }
                name = Some(n.to_string());
                continue;
            }
            let (lhs, rhs) = line
                .split_once("=>")
                .ok_or_else(|| err(lineno, "expected <trace> => <response>".into()))?;
            let lhs = lhs.trim();
            let trace = if lhs == "-" {
                Vec::new()
            } else {
                lhs.split_whitespace()
                    .map(|tok| Action::parse(tok).map_err(|m| err(lineno, m)))
                    .collect::<Result<Trace, _>>()?
            };
            let rhs = rhs.trim();
            let response = match rhs {
                "quiet" => Response::Quiet,
                "pass" => Response::Verdict(Verdict::Pass),
                "fail" => Response::Verdict(Verdict::Fail),
                "inconc" => Response::Verdict(Verdict::Inconc),
                tok => Response::Send(Action::parse(tok).map_err(|m| err(lineno, m))?),
            };
            entries.push((trace, response));
        }
        let name = name.ok_or_else(|| err(1, "missing testcase header".into()))?;
        TestCase::new(name, entries)
    }
}

/// The observational equivalence class of `sigma` within the string set
/// `language`: members of the language over the same action multiset whose
/// response subsequence (receives, in order) equals that of `sigma`.
/// Stimuli commute freely; responses stay fixed.
pub fn equiv_class(
    sigma: &[Action],
    language: &BTreeSet<Trace>,
    max_len: usize,
) -> Result<BTreeSet<Trace>, TestCaseError> {
    if sigma.len() > max_len {
        return Err(TestCaseError::Resource {
            len: sigma.len(),
            limit: max_len,
        });
    }
    // grow candidates left to right, pruning by the language's prefixes
    let mut prefixes: BTreeSet<&[Action]> = BTreeSet::new();
    for t in language {
        for cut in 0..=t.len() {
            prefixes.insert(&t[..cut]);
        }
    }
    let receives: Vec<Action> = sigma
        .iter()
        .filter(|a| a.dir == Dir::Receive)
        .cloned()
        .collect();
    let mut sends: Vec<Action> = sigma
        .iter()
        .filter(|a| a.dir == Dir::Send)
        .cloned()
        .collect();
    sends.sort();
    let mut out = BTreeSet::new();
    let mut current: Trace = Vec::new();
    grow(
        &receives,
        0,
        &mut sends,
        &mut current,
        &prefixes,
        language,
        &mut out,
    );
    Ok(out)
}

fn grow(
    receives: &[Action],
    next_receive: usize,
    sends: &mut Vec<Action>,
    current: &mut Trace,
    prefixes: &BTreeSet<&[Action]>,
    language: &BTreeSet<Trace>,
    out: &mut BTreeSet<Trace>,
) {
    if !prefixes.contains(current.as_slice()) {
        return;
    }
    if next_receive == receives.len() && sends.is_empty() {
        if language.contains(current) {
            out.insert(current.clone());
        }
        return;
    }
    if next_receive < receives.len() {
        current.push(receives[next_receive].clone());
        grow(
            receives,
            next_receive + 1,
            sends,
            current,
            prefixes,
            language,
            out,
        );
        current.pop();
    }
    for i in 0..sends.len() {
        if i > 0 && sends[i] == sends[i - 1] {
            continue;
        }
        let a = sends.remove(i);
        current.push(a.clone());
        grow(
            receives,
            next_receive,
            sends,
            current,
            prefixes,
            language,
            out,
        );
        current.pop();
        sends.insert(i, a);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn act(s: &str) -> Action {
        Action::parse(s).unwrap()
    }

    fn trace(s: &str) -> Trace {
        if s == "-" {
            Vec::new()
        } else {
            s.split_whitespace().map(act).collect()
        }
    }

    fn sample() -> TestCase {
        TestCase::new(
            "t",
            vec![
                (trace("-"), Response::Send(act("!(p,r)a"))),
                (trace("!(p,r)a"), Response::Quiet),
                (trace("!(p,r)a ?(r,p)b"), Response::Verdict(Verdict::Pass)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn step_follows_the_table() {
        let ts = sample();
        let obs_rec: BTreeSet<Action> = [act("?(r,p)b"), act("?(r,q)c")].into_iter().collect();
        assert_eq!(
            ts.step(&trace("-"), &obs_rec),
            [act("!(p,r)a")].into_iter().collect()
        );
        assert_eq!(ts.step(&trace("!(p,r)a"), &obs_rec), obs_rec);
        assert!(ts.step(&trace("!(p,r)a ?(r,p)b"), &obs_rec).is_empty());
        assert!(ts.step(&trace("?(r,p)b"), &obs_rec).is_empty());
    }

    #[test]
    fn test_language_explores_quiet_branches() {
        let ts = sample();
        let obs_rec: BTreeSet<Action> = [act("?(r,p)b"), act("?(r,q)c")].into_iter().collect();
        let lang = ts.test_language(&obs_rec);
        let rendered: Vec<String> = lang.keys().map(|t| format_trace(t)).collect();
        assert_eq!(
            rendered,
            [
                "-",
                "!(p,r)a",
                "!(p,r)a ?(r,p)b",
                "!(p,r)a ?(r,q)c",
            ]
        );
        assert_eq!(lang[&trace("!(p,r)a ?(r,p)b")], Some(Verdict::Pass));
        assert_eq!(lang[&trace("!(p,r)a ?(r,q)c")], None);
        assert_eq!(lang[&trace("-")], None);
    }

    #[test]
    fn rejects_duplicate_entries() {
        let err = TestCase::new(
            "t",
            vec![
                (trace("-"), Response::Quiet),
                (trace("-"), Response::Verdict(Verdict::Pass)),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, TestCaseError::DuplicateEntry { .. }));
    }

    #[test]
    fn rejects_entries_after_verdicts() {
        let err = TestCase::new(
            "t",
            vec![
                (trace("-"), Response::Verdict(Verdict::Pass)),
                (trace("!(p,r)a"), Response::Quiet),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, TestCaseError::EntryAfterVerdict { .. }));
    }

    #[test]
    fn parse_serialize_roundtrip() {
        let ts = sample();
        let text = ts.serialize();
        assert_eq!(TestCase::parse(&text).unwrap(), ts);
        // header first, empty trace as -, one entry per line
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("testcase t"));
        assert_eq!(lines.next(), Some("- => !(p,r)a"));
    }

    #[test]
    fn parse_accepts_comments_and_blanks() {
        let ts = TestCase::parse(
            "# demo\n\ntestcase demo\n- => quiet # wait\n?(r,p)b => pass\n",
        )
        .unwrap();
        assert_eq!(ts.name, "demo");
        assert_eq!(ts.len(), 2);
        assert_eq!(
            ts.response(&trace("?(r,p)b")),
            Some(&Response::Verdict(Verdict::Pass))
        );
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = TestCase::parse("testcase t\n- => quiet\nbogus line\n").unwrap_err();
        assert!(matches!(err, TestCaseError::Syntax { line: 3, .. }));
        let err = TestCase::parse("- => quiet\n").unwrap_err();
        assert!(matches!(err, TestCaseError::Syntax { line: 1, .. }));
    }

    #[test]
    fn equiv_class_commutes_sends_only() {
        // language: both stimulus orders, then a fixed response chain
        let l: BTreeSet<Trace> = [
            trace("!(p,r)a !(q,r)a ?(r,p)b"),
            trace("!(q,r)a !(p,r)a ?(r,p)b"),
        ]
        .into_iter()
        .collect();
        let class = equiv_class(
            &trace("!(p,r)a !(q,r)a ?(r,p)b"),
            &l,
            DEFAULT_EQUIV_CAP,
        )
        .unwrap();
        assert_eq!(class, l);
        // receives must keep their order and position relative to content
        let l2: BTreeSet<Trace> = [trace("?(r,p)b !(p,r)a"), trace("!(p,r)a ?(r,p)b")]
            .into_iter()
            .collect();
        let class = equiv_class(&trace("?(r,p)b !(p,r)a"), &l2, DEFAULT_EQUIV_CAP).unwrap();
        // the send may move, the receive subsequence is unchanged either way
        assert_eq!(class, l2);
    }

    #[test]
    fn equiv_class_filters_by_language() {
        let l: BTreeSet<Trace> = [trace("!(p,r)a !(q,r)a")].into_iter().collect();
        let class = equiv_class(&trace("!(q,r)a !(p,r)a"), &l, DEFAULT_EQUIV_CAP).unwrap();
        assert_eq!(class, l);
        let class = equiv_class(&trace("!(p,r)a !(p,r)a"), &l, DEFAULT_EQUIV_CAP).unwrap();
        assert!(class.is_empty());
    }

    #[test]
    fn equiv_class_caps_length() {
        let long: Trace = (0..11).map(|_| act("!(p,r)a")).collect();
        let err = equiv_class(&long, &BTreeSet::new(), DEFAULT_EQUIV_CAP).unwrap_err();
        assert!(matches!(err, TestCaseError::Resource { limit: 10, .. }));
    }
}
