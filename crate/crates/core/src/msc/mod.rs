//! The test-purpose DSL: message-sequence-chart documents with port and SUT
//! instances, messages, coregions, alternatives, generalized ordering, and
//! terminal verdicts.
//!
//! Documents arrive through [`MscDocument::parse`], are normalized with
//! [`MscDocument::desugar`] (ordering constraints become void `0` messages),
//! and yield the communication dependence and the per-alternative event
//! sequences the semantics is built from.

mod parse;
mod print;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::pomset::Dependence;

/// Reserved endpoint name for the environment.
pub const ENV_NAME: &str = "env";

/// Reserved message name inserted by desugaring for `order` statements.
pub const VOID_MESSAGE: &str = "0";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MscError {
    #[error("syntax error at line {line}, column {col}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("semantic error: {0}")]
    Semantic(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    Send,
    Receive,
}

/// A communication action. `!(p,q)m` sends message m from p to q and belongs
/// to instance p; `?(p,q)m` is the matching receive and belongs to q.
///
/// Field order matters: the derived `Ord` coincides with lexicographic order
/// on the rendered action string, which the synthesizer uses for
/// deterministic tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action {
    pub dir: Dir,
    pub from: String,
    pub to: String,
    pub msg: String,
}

impl Action {
    pub fn send(from: &str, to: &str, msg: &str) -> Self {
        Action {
            dir: Dir::Send,
            from: from.into(),
            to: to.into(),
            msg: msg.into(),
        }
    }

    pub fn receive(from: &str, to: &str, msg: &str) -> Self {
        Action {
            dir: Dir::Receive,
            from: from.into(),
            to: to.into(),
            msg: msg.into(),
        }
    }

    /// The instance the action is located on: sender for sends, receiver for
    /// receives.
    pub fn ins(&self) -> &str {
        match self.dir {
            Dir::Send => &self.from,
            Dir::Receive => &self.to,
        }
    }

    /// True iff the two actions are the send and receive of one message
    /// exchange (same endpoints, same message, opposite directions).
    pub fn matches(&self, other: &Action) -> bool {
        self.dir != other.dir
            && self.from == other.from
            && self.to == other.to
            && self.msg == other.msg
    }

    /// Parses the rendered form `!(p,q)m` / `?(p,q)m`.
    pub fn parse(s: &str) -> Result<Action, String> {
        let (dir, rest) = match s.chars().next() {
            Some('!') => (Dir::Send, &s[1..]),
            Some('?') => (Dir::Receive, &s[1..]),
            _ => return Err(format!("action must start with ! or ?: {s:?}")),
        };
        let rest = rest
            .strip_prefix('(')
            .ok_or_else(|| format!("missing ( in action {s:?}"))?;
        let (from, rest) = rest
            .split_once(',')
            .ok_or_else(|| format!("missing , in action {s:?}"))?;
        let (to, msg) = rest
            .split_once(')')
            .ok_or_else(|| format!("missing ) in action {s:?}"))?;
        let ident_ok = |t: &str| !t.is_empty() && t.chars().all(|c| c.is_alphanumeric() || c == '_');
        if !ident_ok(from) || !ident_ok(to) || !ident_ok(msg) {
            return Err(format!("malformed action {s:?}"));
        }
        Ok(Action {
            dir,
            from: from.to_string(),
            to: to.to_string(),
            msg: msg.to_string(),
        })
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = match self.dir {
            Dir::Send => '!',
            Dir::Receive => '?',
        };
        write!(f, "{mark}({},{}){}", self.from, self.to, self.msg)
    }
}

/// An observable trace (or any finite action sequence).
pub type Trace = Vec<Action>;

/// Renders a trace with spaces; the empty trace prints as `-`.
pub fn format_trace(trace: &[Action]) -> String {
    if trace.is_empty() {
        "-".to_string()
    } else {
        trace
            .iter()
            .map(Action::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Inconc,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconc => "inconc",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum InstanceKind {
    Port,
    Sut,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    pub kind: InstanceKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    Inst(String),
    Env,
}

impl Endpoint {
    fn name(&self) -> &str {
        match self {
            Endpoint::Inst(n) => n,
            Endpoint::Env => ENV_NAME,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub msg: String,
    pub from: Endpoint,
    pub to: Endpoint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Message(Message),
    Coregion {
        instance: String,
        messages: Vec<Message>,
    },
    Alt {
        branches: Vec<Vec<Stmt>>,
    },
    Order {
        from: String,
        to: String,
    },
    Verdict(Verdict),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MscDocument {
    pub name: String,
    pub instances: Vec<Instance>,
    pub body: Vec<Stmt>,
}

/// One event along an alternative path: its action plus the coregion block
/// it sits in, if any (block ids are unique within the path).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathEvent {
    pub action: Action,
    pub coblock: Option<usize>,
}

/// A fully resolved alternative: the event sequence in document order and
/// the terminal verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSpec {
    pub events: Vec<PathEvent>,
    pub verdict: Verdict,
}

impl MscDocument {
    /// Parses DSL source and applies the structural checks.
    pub fn parse(text: &str) -> Result<MscDocument, MscError> {
        let doc = parse::parse_document(text)?;
        doc.validate()?;
        Ok(doc)
    }

    /// Canonical source form; parsing it back yields an equal document.
    pub fn pretty(&self) -> String {
        print::pretty(self)
    }

    pub fn ports(&self) -> BTreeSet<String> {
        self.instances
            .iter()
            .filter(|i| i.kind == InstanceKind::Port)
            .map(|i| i.name.clone())
            .collect()
    }

    pub fn suts(&self) -> BTreeSet<String> {
        self.instances
            .iter()
            .filter(|i| i.kind == InstanceKind::Sut)
            .map(|i| i.name.clone())
            .collect()
    }

    /// Replaces every `order a -> b` with the void message `msg 0 from a to
    /// b`. Idempotent: documents without order statements are returned
    /// unchanged, even if they already contain `0` messages (that is the
    /// normal form). A document that still has order statements may not also
    /// use the reserved message name.
    pub fn desugar(&self) -> Result<MscDocument, MscError> {
        fn has_order(stmts: &[Stmt]) -> bool {
            stmts.iter().any(|s| match s {
                Stmt::Order { .. } => true,
                Stmt::Alt { branches } => branches.iter().any(|b| has_order(b)),
                _ => false,
            })
        }
        fn has_void_msg(stmts: &[Stmt]) -> bool {
            stmts.iter().any(|s| match s {
                Stmt::Message(m) => m.msg == VOID_MESSAGE,
                Stmt::Coregion { messages, .. } => {
                    messages.iter().any(|m| m.msg == VOID_MESSAGE)
                }
                Stmt::Alt { branches } => branches.iter().any(|b| has_void_msg(b)),
                _ => false,
            })
        }
        fn rewrite(stmts: &[Stmt]) -> Vec<Stmt> {
            stmts
                .iter()
                .map(|s| match s {
                    Stmt::Order { from, to } => Stmt::Message(Message {
                        msg: VOID_MESSAGE.to_string(),
                        from: Endpoint::Inst(from.clone()),
                        to: Endpoint::Inst(to.clone()),
                    }),
                    Stmt::Alt { branches } => Stmt::Alt {
                        branches: branches.iter().map(|b| rewrite(b)).collect(),
                    },
                    other => other.clone(),
                })
                .collect()
        }
        if !has_order(&self.body) {
            return Ok(self.clone());
        }
        if has_void_msg(&self.body) {
            return Err(MscError::Semantic(format!(
                "message name {VOID_MESSAGE} is reserved for desugared order statements"
            )));
        }
        let doc = MscDocument {
            name: self.name.clone(),
            instances: self.instances.clone(),
            body: rewrite(&self.body),
        };
        doc.validate()?;
        Ok(doc)
    }

    /// Every alternative resolved to its event sequence. Requires a
    /// desugared document.
    pub fn paths(&self) -> Result<Vec<PathSpec>, MscError> {
        #[derive(Default)]
        struct Walk {
            next_block: usize,
        }
        type Partial = (Vec<PathEvent>, Option<Verdict>);
        impl Walk {
            fn stmts(&mut self, stmts: &[Stmt]) -> Result<Vec<Partial>, MscError> {
                let mut acc: Vec<Partial> = vec![(Vec::new(), None)];
                for stmt in stmts {
                    let mut next = Vec::new();
                    for (events, verdict) in &acc {
                        debug_assert!(verdict.is_none(), "verdicts are terminal");
                        for (suffix, v) in self.stmt(stmt)? {
                            let mut events = events.clone();
                            events.extend(suffix);
                            next.push((events, v));
                        }
                    }
                    acc = next;
                }
                Ok(acc)
            }

            fn stmt(&mut self, stmt: &Stmt) -> Result<Vec<Partial>, MscError> {
                match stmt {
                    Stmt::Message(m) => Ok(vec![(message_events(m, None), None)]),
                    Stmt::Coregion { instance, messages } => {
                        let block = self.next_block;
                        self.next_block += 1;
                        let mut events = Vec::new();
                        for m in messages {
                            events.extend(message_events(m, Some((instance, block))));
                        }
                        Ok(vec![(events, None)])
                    }
                    Stmt::Alt { branches } => {
                        let mut out = Vec::new();
                        for b in branches {
                            out.extend(self.stmts(b)?);
                        }
                        Ok(out)
                    }
                    Stmt::Order { .. } => Err(MscError::Semantic(
                        "document must be desugared before computing paths".into(),
                    )),
                    Stmt::Verdict(v) => Ok(vec![(Vec::new(), Some(*v))]),
                }
            }
        }
        let partials = Walk::default().stmts(&self.body)?;
        partials
            .into_iter()
            .map(|(events, verdict)| {
                // the structural checks guarantee a terminal verdict
                let verdict = verdict.ok_or_else(|| {
                    MscError::Semantic("alternative path without terminal verdict".into())
                })?;
                Ok(PathSpec { events, verdict })
            })
            .collect()
    }

    /// The set of actions occurring anywhere in the document.
    pub fn actions(&self) -> Result<BTreeSet<Action>, MscError> {
        Ok(self
            .paths()?
            .iter()
            .flat_map(|p| p.events.iter().map(|e| e.action.clone()))
            .collect())
    }

    /// The communication dependence over this document's actions: two
    /// actions are dependent iff they live on the same instance (unless that
    /// pair only ever occurs together inside one coregion) or they are the
    /// matching send/receive of one message. Rejects documents where a
    /// same-instance pair occurs both inside a coregion and sequentially,
    /// which would make the label-level relation ill-defined.
    pub fn communication_dependence(&self) -> Result<Dependence<Action>, MscError> {
        let paths = self.paths()?;
        let mut coregion_pairs: BTreeSet<(Action, Action)> = BTreeSet::new();
        let mut sequential_pairs: BTreeSet<(Action, Action)> = BTreeSet::new();
        for path in &paths {
            for (i, a) in path.events.iter().enumerate() {
                for b in &path.events[i + 1..] {
                    if a.action == b.action || a.action.ins() != b.action.ins() {
                        continue;
                    }
                    let key = ordered_pair(&a.action, &b.action);
                    let colocated = a.coblock.is_some() && a.coblock == b.coblock;
                    if colocated {
                        coregion_pairs.insert(key);
                    } else {
                        sequential_pairs.insert(key);
                    }
                }
            }
        }
        if let Some((a, b)) = coregion_pairs.intersection(&sequential_pairs).next() {
            return Err(MscError::Semantic(format!(
                "actions {a} and {b} occur both inside one coregion and sequentially; \
                 their dependence is ambiguous"
            )));
        }
        let alphabet: Vec<Action> = self
            .actions()?
            .into_iter()
            .collect();
        let mut pairs = Vec::new();
        for (i, a) in alphabet.iter().enumerate() {
            for b in &alphabet[i + 1..] {
                let same_instance =
                    a.ins() == b.ins() && !coregion_pairs.contains(&ordered_pair(a, b));
                if same_instance || a.matches(b) {
                    pairs.push((a.clone(), b.clone()));
                }
            }
        }
        Ok(Dependence::from_pairs(pairs))
    }

    /// Structural checks beyond the grammar. `parse` and `desugar` run this.
    pub fn validate(&self) -> Result<(), MscError> {
        let mut names = BTreeSet::new();
        for inst in &self.instances {
            if !names.insert(inst.name.as_str()) {
                return Err(MscError::Semantic(format!(
                    "instance {} declared twice",
                    inst.name
                )));
            }
        }
        if self.ports().is_empty() {
            return Err(MscError::Semantic("no port instance declared".into()));
        }
        if self.suts().is_empty() {
            return Err(MscError::Semantic("no sut instance declared".into()));
        }
        self.check_stmts(&self.body, &names)?;
        check_verdict_placement(&self.body, true)?;
        Ok(())
    }

    fn check_stmts(&self, stmts: &[Stmt], names: &BTreeSet<&str>) -> Result<(), MscError> {
        let declared = |ep: &Endpoint| match ep {
            Endpoint::Env => Ok(()),
            Endpoint::Inst(n) if names.contains(n.as_str()) => Ok(()),
            Endpoint::Inst(n) => Err(MscError::Semantic(format!("undeclared instance {n}"))),
        };
        for stmt in stmts {
            match stmt {
                Stmt::Message(m) => {
                    declared(&m.from)?;
                    declared(&m.to)?;
                    if m.from == Endpoint::Env && m.to == Endpoint::Env {
                        return Err(MscError::Semantic(format!(
                            "message {} connects env to env",
                            m.msg
                        )));
                    }
                }
                Stmt::Coregion { instance, messages } => {
                    if !names.contains(instance.as_str()) {
                        return Err(MscError::Semantic(format!(
                            "undeclared instance {instance}"
                        )));
                    }
                    let mut colocated: BTreeSet<Action> = BTreeSet::new();
                    for m in messages {
                        declared(&m.from)?;
                        declared(&m.to)?;
                        if m.from.name() != instance && m.to.name() != instance {
                            return Err(MscError::Semantic(format!(
                                "message {} in coregion does not touch instance {instance}",
                                m.msg
                            )));
                        }
                        for ev in message_events(m, Some((instance, 0))) {
                            if ev.coblock.is_some() && !colocated.insert(ev.action.clone()) {
                                return Err(MscError::Semantic(format!(
                                    "identical action {} twice in one coregion",
                                    ev.action
                                )));
                            }
                        }
                    }
                }
                Stmt::Alt { branches } => {
                    if branches.iter().any(|b| b.is_empty()) {
                        return Err(MscError::Semantic("empty alt branch".into()));
                    }
                    for b in branches {
                        self.check_stmts(b, names)?;
                    }
                }
                Stmt::Order { from, to } => {
                    for n in [from, to] {
                        if !names.contains(n.as_str()) {
                            return Err(MscError::Semantic(format!("undeclared instance {n}")));
                        }
                    }
                    if from == to {
                        return Err(MscError::Semantic(format!(
                            "order from {from} to itself"
                        )));
                    }
                }
                Stmt::Verdict(_) => {}
            }
        }
        Ok(())
    }
}

/// The events of one message statement in document order. Internal messages
/// yield send then receive; env messages yield the single event owned by the
/// declared instance. Events on `coregion.0` get the block id `coregion.1`.
fn message_events(m: &Message, coregion: Option<(&str, usize)>) -> Vec<PathEvent> {
    let block_for = |ins: &str| match coregion {
        Some((cins, block)) if cins == ins => Some(block),
        _ => None,
    };
    match (&m.from, &m.to) {
        (Endpoint::Inst(from), Endpoint::Inst(to)) => vec![
            PathEvent {
                action: Action::send(from, to, &m.msg),
                coblock: block_for(from),
            },
            PathEvent {
                action: Action::receive(from, to, &m.msg),
                coblock: block_for(to),
            },
        ],
        (Endpoint::Env, Endpoint::Inst(to)) => vec![PathEvent {
            action: Action::receive(ENV_NAME, to, &m.msg),
            coblock: block_for(to),
        }],
        (Endpoint::Inst(from), Endpoint::Env) => vec![PathEvent {
            action: Action::send(from, ENV_NAME, &m.msg),
            coblock: block_for(from),
        }],
        (Endpoint::Env, Endpoint::Env) => Vec::new(), // rejected by validate
    }
}

fn ordered_pair(a: &Action, b: &Action) -> (Action, Action) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// Verdicts close an alternative: each maximal path ends in exactly one, and
/// none appears earlier. `terminal` is false inside a branch that is
/// followed by further statements.
fn check_verdict_placement(stmts: &[Stmt], terminal: bool) -> Result<(), MscError> {
    if stmts.is_empty() {
        return if terminal {
            Err(MscError::Semantic(
                "alternative path without terminal verdict".into(),
            ))
        } else {
            Ok(())
        };
    }
    let (last, init) = stmts.split_last().unwrap();
    for stmt in init {
        match stmt {
            Stmt::Verdict(_) => {
                return Err(MscError::Semantic(
                    "verdict in non-terminal position".into(),
                ))
            }
            Stmt::Alt { branches } => {
                for b in branches {
                    check_verdict_placement(b, false)?;
                }
            }
            _ => {}
        }
    }
    match last {
        Stmt::Verdict(_) if terminal => Ok(()),
        Stmt::Verdict(_) => Err(MscError::Semantic(
            "verdict in non-terminal position".into(),
        )),
        Stmt::Alt { branches } => {
            for b in branches {
                check_verdict_placement(b, terminal)?;
            }
            Ok(())
        }
        _ if terminal => Err(MscError::Semantic(
            "alternative path without terminal verdict".into(),
        )),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const M3: &str = "\
msc m3
inst p port   inst q port   inst r sut
coregion r { msg a from p to r   msg a from q to r }
alt {
  { msg b from r to p   order p -> q   msg b from r to q   verdict pass }
  { msg b from r to q   order q -> p   msg b from r to p   verdict fail }
}
";

    #[test]
    fn parses_m3_structure() {
        let doc = MscDocument::parse(M3).unwrap();
        assert_eq!(doc.name, "m3");
        assert_eq!(doc.instances.len(), 3);
        assert_eq!(doc.ports().len(), 2);
        assert_eq!(doc.suts(), ["r".to_string()].into_iter().collect());
        assert_eq!(doc.body.len(), 2);
        match &doc.body[0] {
            Stmt::Coregion { instance, messages } => {
                assert_eq!(instance, "r");
                assert_eq!(messages.len(), 2);
            }
            other => panic!("expected coregion, got {other:?}"),
        }
        match &doc.body[1] {
            Stmt::Alt { branches } => assert_eq!(branches.len(), 2),
            other => panic!("expected alt, got {other:?}"),
        }
    }

    #[test]
    fn minimal_purpose_parses() {
        let doc =
            MscDocument::parse("msc t\ninst p port\ninst r sut\nmsg a from p to r\nverdict pass\n")
                .unwrap();
        assert_eq!(doc.body.len(), 2);
    }

    #[test]
    fn rejects_missing_terminal_verdict() {
        let src = M3.replace("verdict fail", "");
        let err = MscDocument::parse(&src).unwrap_err();
        assert!(matches!(err, MscError::Semantic(m) if m.contains("terminal verdict")));
    }

    #[test]
    fn rejects_nonterminal_verdict() {
        let err = MscDocument::parse(
            "msc t\ninst p port\ninst r sut\nverdict pass\nmsg a from p to r\n",
        )
        .unwrap_err();
        assert!(matches!(err, MscError::Semantic(m) if m.contains("non-terminal")));
    }

    #[test]
    fn rejects_undeclared_instance() {
        let err =
            MscDocument::parse("msc t\ninst p port\ninst r sut\nmsg a from p to s\nverdict pass\n")
                .unwrap_err();
        assert!(matches!(err, MscError::Semantic(m) if m.contains("undeclared instance s")));
    }

    #[test]
    fn rejects_duplicate_coregion_action() {
        let err = MscDocument::parse(
            "msc t\ninst p port\ninst r sut\n\
             coregion r { msg a from p to r   msg a from p to r }\nverdict pass\n",
        )
        .unwrap_err();
        assert!(matches!(err, MscError::Semantic(m) if m.contains("twice in one coregion")));
    }

    #[test]
    fn rejects_port_only_documents() {
        let err = MscDocument::parse("msc t\ninst p port\nmsg a from p to env\nverdict pass\n")
            .unwrap_err();
        assert!(matches!(err, MscError::Semantic(m) if m.contains("no sut instance")));
    }

    #[test]
    fn desugar_replaces_order_in_place() {
        let doc = MscDocument::parse(M3).unwrap().desugar().unwrap();
        let branch = match &doc.body[1] {
            Stmt::Alt { branches } => &branches[0],
            _ => unreachable!(),
        };
        assert_eq!(branch.len(), 4);
        match &branch[1] {
            Stmt::Message(m) => {
                assert_eq!(m.msg, VOID_MESSAGE);
                assert_eq!(m.from, Endpoint::Inst("p".into()));
                assert_eq!(m.to, Endpoint::Inst("q".into()));
            }
            other => panic!("expected desugared message, got {other:?}"),
        }
    }

    #[test]
    fn desugar_is_idempotent() {
        let once = MscDocument::parse(M3).unwrap().desugar().unwrap();
        let twice = once.desugar().unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn desugar_accepts_void_messages_without_orders() {
        let doc = MscDocument::parse(
            "msc t\ninst p port\ninst q port\ninst r sut\nmsg 0 from p to q\nverdict pass\n",
        )
        .unwrap();
        assert_eq!(doc.desugar().unwrap(), doc);
    }

    #[test]
    fn desugar_rejects_void_collision() {
        let err = MscDocument::parse(
            "msc t\ninst p port\ninst q port\ninst r sut\n\
             msg 0 from p to q\norder q -> p\nverdict pass\n",
        )
        .unwrap()
        .desugar()
        .unwrap_err();
        assert!(matches!(err, MscError::Semantic(m) if m.contains("reserved")));
    }

    #[test]
    fn rejects_self_order() {
        let err = MscDocument::parse(
            "msc t\ninst p port\ninst r sut\norder p -> p\nverdict pass\n",
        )
        .unwrap_err();
        assert!(matches!(err, MscError::Semantic(m) if m.contains("itself")));
    }

    #[test]
    fn paths_of_m3() {
        let doc = MscDocument::parse(M3).unwrap().desugar().unwrap();
        let paths = doc.paths().unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].verdict, Verdict::Pass);
        assert_eq!(paths[1].verdict, Verdict::Fail);
        for p in &paths {
            assert_eq!(p.events.len(), 10);
        }
        // the coregion marks exactly the two receives at r
        let blocks: Vec<Option<usize>> = paths[0].events.iter().map(|e| e.coblock).collect();
        assert_eq!(blocks.iter().filter(|b| b.is_some()).count(), 2);
        assert_eq!(paths[0].events[1].action, Action::receive("p", "r", "a"));
        assert!(paths[0].events[1].coblock.is_some());
    }

    #[test]
    fn env_messages_have_one_event() {
        let doc = MscDocument::parse(
            "msc t\ninst p port\ninst r sut\nmsg a from env to p\nmsg b from p to env\nverdict pass\n",
        )
        .unwrap();
        let paths = doc.paths().unwrap();
        assert_eq!(paths[0].events.len(), 2);
        assert_eq!(paths[0].events[0].action, Action::receive("env", "p", "a"));
        assert_eq!(paths[0].events[1].action, Action::send("p", "env", "b"));
    }

    #[test]
    fn dependence_of_m3() {
        let doc = MscDocument::parse(M3).unwrap().desugar().unwrap();
        let d = doc.communication_dependence().unwrap();
        let send_p = Action::send("p", "r", "a");
        let send_q = Action::send("q", "r", "a");
        let rec_p = Action::receive("p", "r", "a");
        let rec_q = Action::receive("q", "r", "a");
        // matching send/receive pairs are dependent
        assert!(d.dependent(&send_p, &rec_p));
        // the two receives at r share only the coregion: independent
        assert!(!d.dependent(&rec_p, &rec_q));
        // different instances, no matching: independent
        assert!(!d.dependent(&send_p, &send_q));
        // same instance p outside any coregion: dependent
        assert!(d.dependent(&send_p, &Action::receive("r", "p", "b")));
        // receives at r are still ordered against r's later sends
        assert!(d.dependent(&rec_p, &Action::send("r", "p", "b")));
        // reflexive and symmetric by enumeration
        let alphabet = doc.actions().unwrap();
        for a in &alphabet {
            assert!(d.dependent(a, a));
            for b in &alphabet {
                assert_eq!(d.dependent(a, b), d.dependent(b, a));
            }
        }
    }

    #[test]
    fn dependence_rejects_ambiguous_coregion_pairs() {
        let err = MscDocument::parse(
            "msc t\ninst p port\ninst q port\ninst r sut\n\
             coregion r { msg a from p to r   msg b from q to r }\n\
             msg a from p to r\nmsg b from q to r\nverdict pass\n",
        )
        .unwrap()
        .communication_dependence()
        .unwrap_err();
        assert!(matches!(err, MscError::Semantic(m) if m.contains("ambiguous")));
    }

    #[test]
    fn pretty_roundtrip_on_m3() {
        let doc = MscDocument::parse(M3).unwrap();
        let printed = doc.pretty();
        let reparsed = MscDocument::parse(&printed).unwrap();
        assert_eq!(doc, reparsed);
        // and for the desugared form
        let desugared = doc.desugar().unwrap();
        assert_eq!(MscDocument::parse(&desugared.pretty()).unwrap(), desugared);
    }

    #[test]
    fn action_ord_matches_rendered_strings() {
        let actions = [
            Action::send("p", "r", "a"),
            Action::send("q", "r", "a"),
            Action::receive("r", "p", "b"),
            Action::send("p", "q", "0"),
            Action::receive("p", "q", "0"),
            Action::send("pq", "r", "m"),
            Action::send("p", "rq", "m"),
        ];
        for a in &actions {
            for b in &actions {
                assert_eq!(
                    a.cmp(b),
                    a.to_string().cmp(&b.to_string()),
                    "{a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn action_display_roundtrip() {
        for a in [
            Action::send("p", "r", "a"),
            Action::receive("env", "p", "x_1"),
            Action::send("p", "q", "0"),
        ] {
            assert_eq!(Action::parse(&a.to_string()).unwrap(), a);
        }
        assert!(Action::parse("(p,q)m").is_err());
        assert!(Action::parse("!(p;q)m").is_err());
    }
}
