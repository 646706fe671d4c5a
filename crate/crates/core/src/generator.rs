//! Seeded random generation of purposes and test-case tables. Generation
//! is biased toward well-formed purposes (alternatives open with distinct
//! responses) but deliberately keeps a tail of racy shapes so the checkers
//! see both outcomes; everything is deterministic in the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::msc::{
    Endpoint, Instance, InstanceKind, Message, MscDocument, Stmt, Trace, Verdict,
};
use crate::semantics::{LanguageTrie, PurposeSemantics, SemanticsError};
use crate::testcase::{Response, TestCase};
use crate::wellformed;
use crate::Caps;

#[derive(Debug, Clone, Copy)]
pub struct GeneratorConfig {
    pub max_ports: usize,
    pub max_suts: usize,
    pub max_branches: usize,
    /// Cap on the events of any single alternative path.
    pub max_path_events: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_ports: 2,
            max_suts: 2,
            max_branches: 3,
            max_path_events: 8,
        }
    }
}

const PORT_NAMES: [&str; 2] = ["p", "q"];
const SUT_NAMES: [&str; 2] = ["r", "s"];
const TAIL_MSGS: [&str; 3] = ["x", "y", "z"];

/// A structurally valid random document. May or may not be well-formed.
pub fn random_purpose(seed: u64, cfg: &GeneratorConfig) -> MscDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_ports = rng.gen_range(1..=cfg.max_ports.clamp(1, PORT_NAMES.len()));
    let n_suts = rng.gen_range(1..=cfg.max_suts.clamp(1, SUT_NAMES.len()));
    let ports: Vec<String> = PORT_NAMES[..n_ports].iter().map(|s| s.to_string()).collect();
    let suts: Vec<String> = SUT_NAMES[..n_suts].iter().map(|s| s.to_string()).collect();
    let mut instances: Vec<Instance> = ports
        .iter()
        .map(|name| Instance {
            name: name.clone(),
            kind: InstanceKind::Port,
        })
        .collect();
    instances.extend(suts.iter().map(|name| Instance {
        name: name.clone(),
        kind: InstanceKind::Sut,
    }));

    let mut body: Vec<Stmt> = Vec::new();
    let mut prefix_events = 0usize;
    // a couple of stimuli first, so the language does not start with a race
    for i in 0..rng.gen_range(0..=2usize) {
        if prefix_events + 2 > cfg.max_path_events.saturating_sub(4) {
            break;
        }
        let from = pick(&mut rng, &ports);
        let to = pick(&mut rng, &suts);
        body.push(Stmt::Message(Message {
            msg: format!("m{i}"),
            from: Endpoint::Inst(from),
            to: Endpoint::Inst(to),
        }));
        prefix_events += 2;
    }
    // sometimes a coregion collecting two stimuli at one SUT
    if n_ports >= 2 && prefix_events + 4 <= cfg.max_path_events.saturating_sub(4) && rng.gen_bool(0.4)
    {
        let at = pick(&mut rng, &suts);
        body.push(Stmt::Coregion {
            instance: at.clone(),
            messages: vec![
                Message {
                    msg: "ca".into(),
                    from: Endpoint::Inst(ports[0].clone()),
                    to: Endpoint::Inst(at.clone()),
                },
                Message {
                    msg: "cb".into(),
                    from: Endpoint::Inst(ports[1].clone()),
                    to: Endpoint::Inst(at),
                },
            ],
        });
        prefix_events += 4;
    }

    let branch_budget = cfg.max_path_events - prefix_events;
    if rng.gen_bool(0.75) {
        let n_branches = rng.gen_range(2..=cfg.max_branches.max(2));
        // biased well-formed: each branch opens with its own response; a
        // racy shape now and then keeps the malformed side populated
        let racy = rng.gen_bool(0.25);
        let mut branches = Vec::new();
        for b in 0..n_branches {
            let mut branch = Vec::new();
            let mut used = 0usize;
            if racy && b == n_branches - 1 {
                // a stimulus competing with the other branches' responses
                branch.push(Stmt::Message(Message {
                    msg: "race".into(),
                    from: Endpoint::Inst(pick(&mut rng, &ports)),
                    to: Endpoint::Inst(pick(&mut rng, &suts)),
                }));
            } else {
                branch.push(Stmt::Message(Message {
                    msg: format!("b{b}"),
                    from: Endpoint::Inst(pick(&mut rng, &suts)),
                    to: Endpoint::Inst(pick(&mut rng, &ports)),
                }));
            }
            used += 2;
            while used + 2 <= branch_budget && rng.gen_bool(0.45) {
                branch.push(random_tail_stmt(&mut rng, &ports, &suts, &mut used));
            }
            branch.push(Stmt::Verdict(random_verdict(&mut rng)));
            branches.push(branch);
        }
        body.push(Stmt::Alt { branches });
    } else {
        let mut used = 0usize;
        while used + 2 <= branch_budget && rng.gen_bool(0.5) {
            body.push(random_tail_stmt(&mut rng, &ports, &suts, &mut used));
        }
        body.push(Stmt::Verdict(random_verdict(&mut rng)));
    }

    let doc = MscDocument {
        name: format!("gen{seed}"),
        instances,
        body,
    };
    debug_assert!(doc.validate().is_ok(), "generated document must be valid");
    doc
}

fn random_tail_stmt(
    rng: &mut ChaCha8Rng,
    ports: &[String],
    suts: &[String],
    used: &mut usize,
) -> Stmt {
    // ordering constraint between the two ports, an env exchange, or a
    // plain message in either direction
    if ports.len() >= 2 && rng.gen_bool(0.15) {
        *used += 2;
        return Stmt::Order {
            from: ports[0].clone(),
            to: ports[1].clone(),
        };
    }
    if rng.gen_bool(0.1) {
        *used += 1;
        let port = pick(rng, ports);
        return Stmt::Message(if rng.gen_bool(0.5) {
            Message {
                msg: "e".into(),
                from: Endpoint::Env,
                to: Endpoint::Inst(port),
            }
        } else {
            Message {
                msg: "e".into(),
                from: Endpoint::Inst(port),
                to: Endpoint::Env,
            }
        });
    }
    *used += 2;
    let msg = TAIL_MSGS[rng.gen_range(0..TAIL_MSGS.len())].to_string();
    let (from, to) = if rng.gen_bool(0.5) {
        (pick(rng, ports), pick(rng, suts))
    } else {
        (pick(rng, suts), pick(rng, ports))
    };
    Stmt::Message(Message {
        msg,
        from: Endpoint::Inst(from),
        to: Endpoint::Inst(to),
    })
}

fn random_verdict(rng: &mut ChaCha8Rng) -> Verdict {
    match rng.gen_range(0..3u8) {
        0 => Verdict::Pass,
        1 => Verdict::Fail,
        _ => Verdict::Inconc,
    }
}

fn pick(rng: &mut ChaCha8Rng, names: &[String]) -> String {
    names[rng.gen_range(0..names.len())].clone()
}

/// Generates, desugars and checks a purpose; `Some` only when it is
/// well-formed under the given caps.
pub fn random_well_formed(
    seed: u64,
    cfg: &GeneratorConfig,
    caps: &Caps,
) -> Result<Option<(MscDocument, PurposeSemantics)>, SemanticsError> {
    let doc = random_purpose(seed, cfg);
    let doc = match doc.desugar() {
        Ok(d) => d,
        Err(_) => return Ok(None),
    };
    let sem = match PurposeSemantics::build(&doc) {
        Ok(s) => s,
        Err(_) => return Ok(None),
    };
    let report = wellformed::check(&sem, caps)?;
    Ok(report.well_formed.then_some((doc, sem)))
}

/// A random table over the purpose's language: mostly the canonical
/// response at each position, with occasional wrong verdicts, stray or
/// illegal stimuli, and missing entries.
pub fn random_testcase(
    sem: &PurposeSemantics,
    trie: &LanguageTrie,
    seed: u64,
) -> TestCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries: Vec<(Trace, Response)> = Vec::new();
    walk(
        sem,
        trie,
        LanguageTrie::ROOT,
        &mut Vec::new(),
        &mut rng,
        &mut entries,
    );
    TestCase::new(format!("rand{seed}"), entries)
        .expect("the walk visits each trace at most once and stops at verdicts")
}

fn walk(
    sem: &PurposeSemantics,
    trie: &LanguageTrie,
    node: usize,
    trace: &mut Trace,
    rng: &mut ChaCha8Rng,
    entries: &mut Vec<(Trace, Response)>,
) {
    if rng.gen_bool(0.08) {
        return; // leave this position undefined
    }
    let n = trie.node(node);
    if n.children.is_empty() {
        let correct = n.verdict();
        let verdict = if rng.gen_bool(0.85) {
            correct.unwrap_or(Verdict::Inconc)
        } else {
            random_verdict(rng)
        };
        entries.push((trace.clone(), Response::Verdict(verdict)));
        return;
    }
    let sends: Vec<&crate::msc::Action> = n
        .children
        .keys()
        .filter(|a| a.dir == crate::msc::Dir::Send)
        .collect();
    let roll = rng.gen_range(0..100u32);
    if roll < 8 {
        // stop early with some verdict
        entries.push((trace.clone(), Response::Verdict(random_verdict(rng))));
    } else if roll < 16 {
        // send something the purpose does not enable here
        let bad = sem
            .obs_send
            .iter()
            .find(|a| !n.children.contains_key(*a))
            .cloned();
        match bad {
            Some(a) => entries.push((trace.clone(), Response::Send(a))),
            None => entries.push((trace.clone(), Response::Quiet)),
        }
    } else if !sends.is_empty() && (roll < 70 || sends.len() == n.children.len()) {
        let a = sends[rng.gen_range(0..sends.len())].clone();
        let next = n.children[&a];
        entries.push((trace.clone(), Response::Send(a.clone())));
        trace.push(a);
        walk(sem, trie, next, trace, rng, entries);
        trace.pop();
    } else {
        entries.push((trace.clone(), Response::Quiet));
        let receives: Vec<(crate::msc::Action, usize)> = n
            .children
            .iter()
            .filter(|(a, _)| a.dir == crate::msc::Dir::Receive)
            .map(|(a, &next)| (a.clone(), next))
            .collect();
        for (a, next) in receives {
            trace.push(a);
            walk(sem, trie, next, trace, rng, entries);
            trace.pop();
        }
    }
}
