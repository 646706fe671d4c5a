//! From documents to behavior: each alternative path denotes a pomset over
//! its events (weak sequential composition under the communication
//! dependence), and the tester-visible restriction of those pomsets induces
//! a prefix-closed trace language with verdicts, stored as a trie.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::msc::{Action, Dir, MscDocument, MscError, Trace, Verdict};
use crate::pomset::{Dependence, Pomset, PomsetError};
use crate::Caps;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error(transparent)]
    Msc(#[from] MscError),
    #[error("verdict conflict on trace {}: path {} says {} but path {} says {}",
        crate::msc::format_trace(trace), first.0, first.1, second.0, second.1)]
    VerdictConflict {
        trace: Trace,
        first: (usize, Verdict),
        second: (usize, Verdict),
    },
    #[error("behavior of path {path} is not closed under the communication dependence")]
    Inconsistent { path: usize },
    #[error("trace {} is not in the observable language", crate::msc::format_trace(trace))]
    NotInLanguage { trace: Trace },
    #[error("trace {} is ambiguous: distinct partial orders share it", crate::msc::format_trace(trace))]
    Ambiguous { trace: Trace },
    #[error(transparent)]
    Pomset(#[from] PomsetError),
}

/// One resolved alternative: its full (SUT events included) pomset and the
/// verdict its completion assigns.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalBehavior {
    pub pomset: Pomset<Action>,
    pub verdict: Verdict,
}

/// The behavioral denotation of a test purpose.
#[derive(Debug, Clone)]
pub struct PurposeSemantics {
    pub name: String,
    pub ports: BTreeSet<String>,
    pub suts: BTreeSet<String>,
    pub alphabet: BTreeSet<Action>,
    /// Observable sends: tester-to-SUT stimuli located on a port.
    pub obs_send: BTreeSet<Action>,
    /// Observable receives: responses located on a port.
    pub obs_rec: BTreeSet<Action>,
    pub maximals: Vec<MaximalBehavior>,
    pub dependence: Dependence<Action>,
}

impl PurposeSemantics {
    /// Builds the semantics of a desugared document. Each alternative path
    /// becomes one maximal pomset: its events in document order, ordered
    /// exactly where their labels are dependent (transitively closed), which
    /// equals folding the events with weak sequential composition.
    pub fn build(doc: &MscDocument) -> Result<PurposeSemantics, SemanticsError> {
        let paths = doc.paths()?;
        let dependence = doc.communication_dependence()?;
        let ports = doc.ports();
        let suts = doc.suts();
        let mut maximals = Vec::new();
        for (k, path) in paths.iter().enumerate() {
            let labels: Vec<Action> = path.events.iter().map(|e| e.action.clone()).collect();
            let mut lt = Vec::new();
            for i in 0..labels.len() {
                for j in i + 1..labels.len() {
                    if dependence.dependent(&labels[i], &labels[j]) {
                        lt.push((i, j));
                    }
                }
            }
            let pomset = Pomset::new(labels, lt).expect("forward edges cannot form a cycle");
            check_closed(&pomset, &dependence).map_err(|_| SemanticsError::Inconsistent { path: k })?;
            maximals.push(MaximalBehavior {
                pomset,
                verdict: path.verdict,
            });
        }
        let alphabet: BTreeSet<Action> = maximals
            .iter()
            .flat_map(|m| m.pomset.rep().labels().iter().cloned())
            .collect();
        let observable = |a: &Action| ports.contains(a.ins());
        let obs_send = alphabet
            .iter()
            .filter(|a| a.dir == Dir::Send && observable(a))
            .cloned()
            .collect();
        let obs_rec = alphabet
            .iter()
            .filter(|a| a.dir == Dir::Receive && observable(a))
            .cloned()
            .collect();
        Ok(PurposeSemantics {
            name: doc.name.clone(),
            ports,
            suts,
            alphabet,
            obs_send,
            obs_rec,
            maximals,
            dependence,
        })
    }

    /// All tester-visible actions.
    pub fn observables(&self) -> BTreeSet<Action> {
        self.obs_send.union(&self.obs_rec).cloned().collect()
    }

    /// The tester-visible part of a behavior.
    pub fn obs_restrict(&self, x: &Pomset<Action>) -> Pomset<Action> {
        x.restrict(&self.observables())
    }

    /// Observable restriction of the k-th maximal behavior.
    pub fn maximal_obs(&self, k: usize) -> Pomset<Action> {
        self.obs_restrict(&self.maximals[k].pomset)
    }

    /// The observable traces of one behavior: linearizations of its
    /// tester-visible restriction.
    pub fn obs_traces(
        &self,
        x: &Pomset<Action>,
        caps: &Caps,
    ) -> Result<BTreeSet<Trace>, SemanticsError> {
        let r = self.obs_restrict(x);
        if r.len() > caps.max_trace_len {
            return Err(PomsetError::ResourceExceeded {
                limit: caps.max_trace_len,
            }
            .into());
        }
        Ok(r.linearizations_with_cap(caps.max_linearizations)?)
    }

    /// The observable language with verdicts. Errors on the first verdict
    /// conflict (two alternatives completing the same trace with different
    /// verdicts).
    pub fn language(&self, caps: &Caps) -> Result<LanguageTrie, SemanticsError> {
        let (trie, issues) = self.language_lenient(caps)?;
        for issue in issues {
            if let VerdictIssue::Conflict {
                trace,
                first,
                second,
            } = issue
            {
                return Err(SemanticsError::VerdictConflict {
                    trace,
                    first,
                    second,
                });
            }
        }
        Ok(trie)
    }

    /// Like [`language`](Self::language) but collects verdict conflicts
    /// instead of failing, keeping the first verdict per trace. The
    /// well-formedness checker reports them.
    pub fn language_lenient(
        &self,
        caps: &Caps,
    ) -> Result<(LanguageTrie, Vec<VerdictIssue>), SemanticsError> {
        let mut trie = LanguageTrie::new();
        let mut issues = Vec::new();
        let mut conflicted: BTreeSet<usize> = BTreeSet::new();
        for (k, m) in self.maximals.iter().enumerate() {
            let r = self.obs_restrict(&m.pomset);
            if r.len() > caps.max_trace_len {
                return Err(PomsetError::ResourceExceeded {
                    limit: caps.max_trace_len,
                }
                .into());
            }
            for lin in r.linearizations_with_cap(caps.max_linearizations)? {
                let node = trie.insert_trace(&lin, k);
                if let Some(first) = trie.mark_complete(node, k, m.verdict) {
                    if conflicted.insert(node) {
                        issues.push(VerdictIssue::Conflict {
                            trace: lin,
                            first,
                            second: (k, m.verdict),
                        });
                    }
                }
            }
        }
        Ok((trie, issues))
    }

    /// The distinct partial orders an observable trace may stand for, with
    /// the alternatives producing each: for every maximal behavior, the ways
    /// of matching the trace onto a downward-closed part of its observable
    /// restriction, grouped up to isomorphism.
    pub fn delin_candidates(&self, trace: &[Action]) -> Vec<(Pomset<Action>, BTreeSet<usize>)> {
        let mut classes: Vec<(Pomset<Action>, BTreeSet<usize>)> = Vec::new();
        for k in 0..self.maximals.len() {
            let r = self.maximal_obs(k);
            for events in matchings(&r, trace) {
                let induced = Pomset::from(r.rep().induced(&events));
                match classes.iter_mut().find(|(p, _)| *p == induced) {
                    Some((_, paths)) => {
                        paths.insert(k);
                    }
                    None => {
                        let mut paths = BTreeSet::new();
                        paths.insert(k);
                        classes.push((induced, paths));
                    }
                }
            }
        }
        classes
    }

    /// Delinearization: the unique partial order an observable trace stands
    /// for. Undefined outside the language; ambiguity means the purpose
    /// violates observable determinism.
    pub fn delin(&self, trace: &[Action]) -> Result<Pomset<Action>, SemanticsError> {
        let mut classes = self.delin_candidates(trace);
        match classes.len() {
            0 => Err(SemanticsError::NotInLanguage {
                trace: trace.to_vec(),
            }),
            1 => Ok(classes.remove(0).0),
            _ => Err(SemanticsError::Ambiguous {
                trace: trace.to_vec(),
            }),
        }
    }
}

/// All event sets of `p` that some matching of `trace` consumes: events are
/// taken label by label, each only once its predecessors are taken, so every
/// returned set is downward closed and induces a pomset the trace
/// linearizes.
fn matchings(p: &Pomset<Action>, trace: &[Action]) -> BTreeSet<Vec<usize>> {
    fn rec(
        p: &Pomset<Action>,
        trace: &[Action],
        pos: usize,
        used: &mut Vec<bool>,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        if pos == trace.len() {
            let mut set: Vec<usize> = (0..p.len()).filter(|&e| used[e]).collect();
            set.sort_unstable();
            out.insert(set);
            return;
        }
        for e in 0..p.len() {
            if used[e] || *p.rep().label(e) != trace[pos] {
                continue;
            }
            if (0..p.len()).any(|d| p.rep().lt(d, e) && !used[d]) {
                continue;
            }
            used[e] = true;
            rec(p, trace, pos + 1, used, out);
            used[e] = false;
        }
    }
    let mut out = BTreeSet::new();
    if trace.len() <= p.len() {
        let mut used = vec![false; p.len()];
        rec(p, trace, 0, &mut used, &mut out);
    }
    out
}

/// Defense for the construction invariant: every behavior must already
/// carry all dependence-induced order (no two dependent events concurrent)
/// and no order beyond its transitive hull.
fn check_closed(p: &Pomset<Action>, d: &Dependence<Action>) -> Result<(), ()> {
    if !p.is_consistent(d) {
        return Err(());
    }
    if p.unsequentialize(d) != *p {
        return Err(());
    }
    Ok(())
}

/// A problem with the verdict labeling of the observable language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerdictIssue {
    /// Two alternatives complete the same trace with different verdicts.
    Conflict {
        trace: Trace,
        first: (usize, Verdict),
        second: (usize, Verdict),
    },
    /// A trace carries a final verdict but extends further: the tester
    /// could stop early or late.
    FinalNotMaximal { trace: Trace, verdict: Verdict },
    /// A maximal trace carries no verdict.
    MissingVerdict { trace: Trace },
}

impl VerdictIssue {
    pub fn trace(&self) -> &Trace {
        match self {
            VerdictIssue::Conflict { trace, .. } => trace,
            VerdictIssue::FinalNotMaximal { trace, .. } => trace,
            VerdictIssue::MissingVerdict { trace } => trace,
        }
    }
}

impl std::fmt::Display for VerdictIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VerdictIssue::Conflict {
                trace,
                first,
                second,
            } => write!(
                f,
                "verdict conflict on trace {}: path {} says {} but path {} says {}",
                crate::msc::format_trace(trace),
                first.0,
                first.1,
                second.0,
                second.1
            ),
            VerdictIssue::FinalNotMaximal { trace, verdict } => write!(
                f,
                "trace {} carries verdict {} but extends further",
                crate::msc::format_trace(trace),
                verdict
            ),
            VerdictIssue::MissingVerdict { trace } => write!(
                f,
                "maximal trace {} carries no verdict",
                crate::msc::format_trace(trace)
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrieNode {
    pub children: BTreeMap<Action, usize>,
    /// Alternatives whose observable behavior passes through this trace.
    pub paths: BTreeSet<usize>,
    /// Alternatives this trace is a complete behavior of.
    pub complete_for: BTreeSet<usize>,
    verdict: Option<(usize, Verdict)>,
}

impl TrieNode {
    pub fn verdict(&self) -> Option<Verdict> {
        self.verdict.map(|(_, v)| v)
    }
}

/// The observable language as a prefix tree. Node 0 is the empty trace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LanguageTrie {
    nodes: Vec<TrieNode>,
}

impl LanguageTrie {
    pub fn new() -> LanguageTrie {
        LanguageTrie {
            nodes: vec![TrieNode::default()],
        }
    }

    pub const ROOT: usize = 0;

    pub fn node(&self, id: usize) -> &TrieNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1 && self.nodes[0].children.is_empty()
    }

    /// Inserts a trace (and so all its prefixes) for the given alternative;
    /// returns the final node.
    pub fn insert_trace(&mut self, trace: &[Action], path: usize) -> usize {
        let mut at = Self::ROOT;
        self.nodes[at].paths.insert(path);
        for a in trace {
            let next = match self.nodes[at].children.get(a) {
                Some(&n) => n,
                None => {
                    let n = self.nodes.len();
                    self.nodes.push(TrieNode::default());
                    self.nodes[at].children.insert(a.clone(), n);
                    n
                }
            };
            self.nodes[next].paths.insert(path);
            at = next;
        }
        at
    }

    /// Marks a node as a complete behavior of `path` with the given verdict.
    /// The first verdict sticks; a later disagreeing one is returned.
    pub fn mark_complete(
        &mut self,
        node: usize,
        path: usize,
        verdict: Verdict,
    ) -> Option<(usize, Verdict)> {
        self.nodes[node].complete_for.insert(path);
        match self.nodes[node].verdict {
            None => {
                self.nodes[node].verdict = Some((path, verdict));
                None
            }
            Some(first) if first.1 != verdict => Some(first),
            Some(_) => None,
        }
    }

    pub fn node_id(&self, trace: &[Action]) -> Option<usize> {
        let mut at = Self::ROOT;
        for a in trace {
            at = *self.nodes[at].children.get(a)?;
        }
        Some(at)
    }

    pub fn contains(&self, trace: &[Action]) -> bool {
        self.node_id(trace).is_some()
    }

    /// The actions enabled after a trace; `None` outside the language.
    pub fn en(&self, trace: &[Action]) -> Option<BTreeSet<Action>> {
        self.node_id(trace)
            .map(|id| self.nodes[id].children.keys().cloned().collect())
    }

    /// The verdict assigned to a trace, if it is complete for some
    /// alternative.
    pub fn verdict_of(&self, trace: &[Action]) -> Result<Option<Verdict>, SemanticsError> {
        match self.node_id(trace) {
            Some(id) => Ok(self.nodes[id].verdict()),
            None => Err(SemanticsError::NotInLanguage {
                trace: trace.to_vec(),
            }),
        }
    }

    /// Every trace in the language, shortest first within each branch
    /// (preorder over sorted children). Includes the empty trace.
    pub fn all_traces(&self) -> Vec<Trace> {
        let mut out = Vec::new();
        self.walk(Self::ROOT, &mut Vec::new(), &mut |trace, _| {
            out.push(trace.to_vec());
        });
        out
    }

    pub fn complete_traces(&self) -> Vec<(Trace, Verdict)> {
        let mut out = Vec::new();
        self.walk(Self::ROOT, &mut Vec::new(), &mut |trace, node: &TrieNode| {
            if let Some(v) = node.verdict() {
                out.push((trace.to_vec(), v));
            }
        });
        out
    }

    /// Traces whose verdict labeling is unusable for testing: final
    /// verdicts on non-maximal traces, maximal traces with no verdict.
    pub fn assignment_violations(&self) -> Vec<VerdictIssue> {
        let mut out = Vec::new();
        self.walk(Self::ROOT, &mut Vec::new(), &mut |trace, node: &TrieNode| {
            match node.verdict() {
                Some(v) if !node.children.is_empty() => out.push(VerdictIssue::FinalNotMaximal {
                    trace: trace.to_vec(),
                    verdict: v,
                }),
                None if node.children.is_empty() => out.push(VerdictIssue::MissingVerdict {
                    trace: trace.to_vec(),
                }),
                _ => {}
            }
        });
        out
    }

    fn walk(
        &self,
        at: usize,
        prefix: &mut Vec<Action>,
        visit: &mut impl FnMut(&[Action], &TrieNode),
    ) {
        visit(prefix, &self.nodes[at]);
        let children: Vec<(Action, usize)> = self.nodes[at]
            .children
            .iter()
            .map(|(a, &n)| (a.clone(), n))
            .collect();
        for (a, n) in children {
            prefix.push(a);
            self.walk(n, prefix, visit);
            prefix.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::msc::format_trace;

    const M3: &str = "\
msc m3
inst p port   inst q port   inst r sut
coregion r { msg a from p to r   msg a from q to r }
alt {
  { msg b from r to p   order p -> q   msg b from r to q   verdict pass }
  { msg b from r to q   order q -> p   msg b from r to p   verdict fail }
}
";

    fn m3() -> PurposeSemantics {
        let doc = MscDocument::parse(M3).unwrap().desugar().unwrap();
        PurposeSemantics::build(&doc).unwrap()
    }

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

    #[test]
    fn m3_has_two_maximals_of_ten_events() {
        let sem = m3();
        assert_eq!(sem.maximals.len(), 2);
        for m in &sem.maximals {
            assert_eq!(m.pomset.len(), 10);
        }
        assert_eq!(sem.maximals[0].verdict, Verdict::Pass);
        assert_eq!(sem.maximals[1].verdict, Verdict::Fail);
        assert_eq!(sem.alphabet.len(), 12);
    }

    #[test]
    fn m3_observables_split() {
        let sem = m3();
        let send: Vec<String> = sem.obs_send.iter().map(Action::to_string).collect();
        assert_eq!(send, ["!(p,q)0", "!(p,r)a", "!(q,p)0", "!(q,r)a"]);
        let rec: Vec<String> = sem.obs_rec.iter().map(Action::to_string).collect();
        assert_eq!(rec, ["?(p,q)0", "?(q,p)0", "?(r,p)b", "?(r,q)b"]);
    }

    #[test]
    fn m3_first_maximal_obs_is_two_sends_below_a_chain() {
        let sem = m3();
        // two concurrent stimuli, then a four-step chain observed in order
        let expected = Pomset::new(
            vec![
                act("!(p,r)a"),
                act("!(q,r)a"),
                act("?(r,p)b"),
                act("!(p,q)0"),
                act("?(p,q)0"),
                act("?(r,q)b"),
            ],
            vec![(0, 2), (1, 2), (2, 3), (3, 4), (4, 5)],
        )
        .unwrap();
        assert_eq!(sem.maximal_obs(0), expected);
    }

    #[test]
    fn m3_obs_traces_of_first_maximal() {
        let sem = m3();
        let traces = sem
            .obs_traces(&sem.maximals[0].pomset, &Caps::default())
            .unwrap();
        let rendered: Vec<String> = traces.iter().map(|t| format_trace(t)).collect();
        assert_eq!(
            rendered,
            [
                "!(p,r)a !(q,r)a ?(r,p)b !(p,q)0 ?(p,q)0 ?(r,q)b",
                "!(q,r)a !(p,r)a ?(r,p)b !(p,q)0 ?(p,q)0 ?(r,q)b",
            ]
        );
    }

    #[test]
    fn m3_language_shape() {
        let sem = m3();
        let trie = sem.language(&Caps::default()).unwrap();
        assert_eq!(trie.len(), 21);
        let complete = trie.complete_traces();
        assert_eq!(complete.len(), 4);
        assert!(complete.iter().all(|(t, _)| t.len() == 6));
        assert_eq!(
            complete
                .iter()
                .filter(|(_, v)| *v == Verdict::Pass)
                .count(),
            2
        );
        let all = trie.all_traces();
        assert_eq!(all.len(), 21);
        assert!(trie.assignment_violations().is_empty());
    }

    #[test]
    fn m3_enabled_actions() {
        let sem = m3();
        let trie = sem.language(&Caps::default()).unwrap();
        let en0: Vec<String> = trie
            .en(&trace("-"))
            .unwrap()
            .iter()
            .map(Action::to_string)
            .collect();
        assert_eq!(en0, ["!(p,r)a", "!(q,r)a"]);
        let en2: Vec<String> = trie
            .en(&trace("!(p,r)a !(q,r)a"))
            .unwrap()
            .iter()
            .map(Action::to_string)
            .collect();
        assert_eq!(en2, ["?(r,p)b", "?(r,q)b"]);
        assert_eq!(trie.en(&trace("?(r,p)b")), None);
    }

    #[test]
    fn m3_verdicts_along_traces() {
        let sem = m3();
        let trie = sem.language(&Caps::default()).unwrap();
        let pass = trace("!(p,r)a !(q,r)a ?(r,p)b !(p,q)0 ?(p,q)0 ?(r,q)b");
        let fail = trace("!(q,r)a !(p,r)a ?(r,q)b !(q,p)0 ?(q,p)0 ?(r,p)b");
        assert_eq!(trie.verdict_of(&pass).unwrap(), Some(Verdict::Pass));
        assert_eq!(trie.verdict_of(&fail).unwrap(), Some(Verdict::Fail));
        assert_eq!(trie.verdict_of(&pass[..3]).unwrap(), None);
        assert!(trie.verdict_of(&trace("?(r,p)b")).is_err());
    }

    #[test]
    fn m3_delin_of_the_send_prefix() {
        let sem = m3();
        let p = sem.delin(&trace("!(p,r)a !(q,r)a")).unwrap();
        // the two stimuli are concurrent no matter the order observed
        let antichain = Pomset::new(vec![act("!(p,r)a"), act("!(q,r)a")], vec![]).unwrap();
        assert_eq!(p, antichain);
        assert_eq!(sem.delin(&trace("!(q,r)a !(p,r)a")).unwrap(), antichain);
        let classes = sem.delin_candidates(&trace("!(p,r)a !(q,r)a"));
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].1, [0usize, 1].into_iter().collect());
    }

    #[test]
    fn delin_rejects_foreign_traces() {
        let sem = m3();
        assert!(matches!(
            sem.delin(&trace("?(r,p)b")),
            Err(SemanticsError::NotInLanguage { .. })
        ));
    }

    // Two alternatives race a stimulus against a response: observing the
    // stimulus first cannot tell the sequenced behavior from the concurrent
    // one, so the trace stands for two distinct partial orders.
    const RACY: &str = "\
msc racy
inst p port   inst q port   inst r sut
alt {
  { msg a from p to r   msg b from r to q   verdict pass }
  { msg b from r to q   msg a from p to r   verdict fail }
}
";

    #[test]
    fn racy_delin_is_ambiguous() {
        let doc = MscDocument::parse(RACY).unwrap().desugar().unwrap();
        let sem = PurposeSemantics::build(&doc).unwrap();
        let t = trace("!(p,r)a ?(r,q)b");
        let classes = sem.delin_candidates(&t);
        assert_eq!(classes.len(), 2);
        assert!(matches!(
            sem.delin(&t),
            Err(SemanticsError::Ambiguous { .. })
        ));
        // the reversed order only fits the concurrent alternative
        let classes = sem.delin_candidates(&trace("?(r,q)b !(p,r)a"));
        assert_eq!(classes.len(), 1);
    }

    #[test]
    fn racy_language_reports_verdict_conflict() {
        let doc = MscDocument::parse(RACY).unwrap().desugar().unwrap();
        let sem = PurposeSemantics::build(&doc).unwrap();
        let err = sem.language(&Caps::default()).unwrap_err();
        match err {
            SemanticsError::VerdictConflict {
                trace: t,
                first,
                second,
            } => {
                assert_eq!(format_trace(&t), "!(p,r)a ?(r,q)b");
                assert_eq!(first, (0, Verdict::Pass));
                assert_eq!(second, (1, Verdict::Fail));
            }
            other => panic!("expected verdict conflict, got {other:?}"),
        }
        let (_, issues) = sem.language_lenient(&Caps::default()).unwrap();
        assert_eq!(issues.len(), 1);
    }

    #[test]
    fn trie_detects_interior_final_verdicts() {
        let mut trie = LanguageTrie::new();
        let a = vec![act("?(r,p)a")];
        let ab = vec![act("?(r,p)a"), act("?(r,p)b")];
        let na = trie.insert_trace(&a, 0);
        assert!(trie.mark_complete(na, 0, Verdict::Pass).is_none());
        let nab = trie.insert_trace(&ab, 1);
        assert!(trie.mark_complete(nab, 1, Verdict::Fail).is_none());
        let issues = trie.assignment_violations();
        assert_eq!(issues.len(), 1);
        assert!(matches!(
            &issues[0],
            VerdictIssue::FinalNotMaximal { trace, verdict: Verdict::Pass } if *trace == a
        ));
    }

    #[test]
    fn trie_missing_verdict_detection() {
        let mut trie = LanguageTrie::new();
        trie.insert_trace(&trace("!(p,r)a"), 0);
        let issues = trie.assignment_violations();
        assert_eq!(issues.len(), 1);
        assert!(matches!(&issues[0], VerdictIssue::MissingVerdict { .. }));
    }

    #[test]
    fn consistency_guard_rejects_open_behavior() {
        // two equal labels left concurrent: dependence demands an order
        let p = Pomset::new(vec![act("!(p,r)a"), act("!(p,r)a")], vec![]).unwrap();
        let d = Dependence::from_pairs(Vec::<(Action, Action)>::new());
        assert!(check_closed(&p, &d).is_err());
    }

    #[test]
    fn caps_bound_language_construction() {
        let sem = m3();
        let caps = Caps {
            max_linearizations: DEFAULT_TEST_CAP,
            max_trace_len: 3,
        };
        assert!(matches!(
            sem.language(&caps),
            Err(SemanticsError::Pomset(PomsetError::ResourceExceeded { .. }))
        ));
    }

    const DEFAULT_TEST_CAP: usize = 1000;
}
