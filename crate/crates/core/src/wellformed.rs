//! Well-formedness of test purposes. A purpose is testable when every
//! observation the tester can make stands for exactly one partial order
//! (observable determinism) and every point where the future behavior
//! splits is resolved by the system under test, never by a race between a
//! stimulus and a response.

use std::collections::BTreeSet;

use crate::msc::{Action, Trace};
use crate::pomset::{Pomset, PomsetError};
use crate::semantics::{LanguageTrie, PurposeSemantics, SemanticsError, VerdictIssue};
use crate::Caps;

/// One element of the observable behavior set: a tester-visible pomset,
/// the alternatives it is a prefix of, and whether it is one of their
/// complete behaviors.
#[derive(Debug, Clone)]
pub struct ObsMember {
    pub pomset: Pomset<Action>,
    pub paths: BTreeSet<usize>,
    pub maximal: bool,
}

/// Two distinct partial orders sharing one observation.
#[derive(Debug, Clone)]
pub struct Wf1Violation {
    pub witness: Trace,
    pub left: Pomset<Action>,
    pub left_paths: BTreeSet<usize>,
    pub right: Pomset<Action>,
    pub right_paths: BTreeSet<usize>,
}

/// A point where the continuations of an observation lead to different
/// sets of complete behaviors depending on which action happens next.
/// `left`/`right` index the maximal behavior classes (see
/// [`maximal_classes`]) reachable after each action.
#[derive(Debug, Clone)]
pub struct ChoicePoint {
    pub trace: Trace,
    pub base: Pomset<Action>,
    pub actions: (Action, Action),
    pub left: BTreeSet<usize>,
    pub right: BTreeSet<usize>,
}

#[derive(Debug, Clone)]
pub struct WellFormednessReport {
    pub wf1_violations: Vec<Wf1Violation>,
    pub wf2_violations: Vec<ChoicePoint>,
    pub verdict_conflicts: Vec<VerdictIssue>,
    pub well_formed: bool,
}

/// The tester-visible behavior set: every downward-closed part of every
/// alternative's observable restriction, up to isomorphism.
pub fn obs_pomset_set(
    sem: &PurposeSemantics,
    caps: &Caps,
) -> Result<Vec<ObsMember>, SemanticsError> {
    let mut members: Vec<(Pomset<Action>, BTreeSet<usize>)> = Vec::new();
    for k in 0..sem.maximals.len() {
        let r = sem.maximal_obs(k);
        for ideal in r.downward_closed_sets() {
            let events: Vec<usize> = ideal.iter().copied().collect();
            let p = Pomset::from(r.rep().induced(&events));
            match members.iter_mut().find(|(q, _)| *q == p) {
                Some((_, paths)) => {
                    paths.insert(k);
                }
                None => {
                    if members.len() >= caps.max_linearizations {
                        return Err(PomsetError::ResourceExceeded {
                            limit: caps.max_linearizations,
                        }
                        .into());
                    }
                    members.push((p, [k].into_iter().collect()));
                }
            }
        }
    }
    let fulls: Vec<Pomset<Action>> = (0..sem.maximals.len())
        .map(|k| sem.maximal_obs(k))
        .collect();
    Ok(members
        .into_iter()
        .map(|(pomset, paths)| {
            let complete = fulls.contains(&pomset);
            let dominated = fulls
                .iter()
                .any(|f| pomset.is_prefix_of(f) && *f != pomset);
            ObsMember {
                maximal: complete && !dominated,
                pomset,
                paths,
            }
        })
        .collect())
}

/// The complete observable behaviors up to isomorphism, keeping only those
/// not strictly below another (an alternative whose whole behavior is a
/// prefix of another's cannot be told apart from it and is reported as a
/// verdict-assignment problem instead).
pub fn maximal_classes(sem: &PurposeSemantics) -> Vec<(Pomset<Action>, BTreeSet<usize>)> {
    let mut classes: Vec<(Pomset<Action>, BTreeSet<usize>)> = Vec::new();
    for k in 0..sem.maximals.len() {
        let r = sem.maximal_obs(k);
        match classes.iter_mut().find(|(p, _)| *p == r) {
            Some((_, paths)) => {
                paths.insert(k);
            }
            None => classes.push((r, [k].into_iter().collect())),
        }
    }
    let keep: Vec<bool> = classes
        .iter()
        .map(|(p, _)| {
            !classes
                .iter()
                .any(|(q, _)| p.is_prefix_of(q) && *q != *p)
        })
        .collect();
    classes
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect()
}

/// Observable determinism: no trace may stand for two distinct partial
/// orders. Returns one violation per pomset pair, with the first trace
/// (in language order) witnessing it.
pub fn check_wf1(
    sem: &PurposeSemantics,
    caps: &Caps,
) -> Result<Vec<Wf1Violation>, SemanticsError> {
    let (trie, _) = sem.language_lenient(caps)?;
    Ok(wf1_violations(sem, &trie))
}

fn wf1_violations(sem: &PurposeSemantics, trie: &LanguageTrie) -> Vec<Wf1Violation> {
    let mut out: Vec<Wf1Violation> = Vec::new();
    for trace in trie.all_traces() {
        let classes = sem.delin_candidates(&trace);
        if classes.len() < 2 {
            continue;
        }
        for i in 0..classes.len() {
            for j in i + 1..classes.len() {
                let (l, lp) = &classes[i];
                let (r, rp) = &classes[j];
                let seen = out.iter().any(|v| {
                    (v.left == *l && v.right == *r) || (v.left == *r && v.right == *l)
                });
                if !seen {
                    out.push(Wf1Violation {
                        witness: trace.clone(),
                        left: l.clone(),
                        left_paths: lp.clone(),
                        right: r.clone(),
                        right_paths: rp.clone(),
                    });
                }
            }
        }
    }
    out
}

/// All choice points of the purpose: traces from which two different next
/// actions lead to different sets of reachable complete behaviors.
/// Reported once per (underlying pomset, action pair), with the first
/// witnessing trace.
pub fn choice_points(
    sem: &PurposeSemantics,
    caps: &Caps,
) -> Result<Vec<ChoicePoint>, SemanticsError> {
    let (trie, _) = sem.language_lenient(caps)?;
    Ok(choice_points_from(sem, &trie))
}

fn choice_points_from(sem: &PurposeSemantics, trie: &LanguageTrie) -> Vec<ChoicePoint> {
    let classes = maximal_classes(sem);
    // which maximal class, if any, each alternative's behavior falls in
    let class_of: Vec<Option<usize>> = (0..sem.maximals.len())
        .map(|k| classes.iter().position(|(_, paths)| paths.contains(&k)))
        .collect();
    let reachable = |node: usize| -> BTreeSet<usize> {
        trie.node(node)
            .paths
            .iter()
            .filter_map(|&k| class_of[k])
            .collect()
    };
    let mut out: Vec<ChoicePoint> = Vec::new();
    for trace in trie.all_traces() {
        let id = trie.node_id(&trace).expect("trace came from the trie");
        let children: Vec<(&Action, usize)> = trie
            .node(id)
            .children
            .iter()
            .map(|(a, &n)| (a, n))
            .collect();
        for i in 0..children.len() {
            for j in i + 1..children.len() {
                let (a, na) = children[i];
                let (b, nb) = children[j];
                let left = reachable(na);
                let right = reachable(nb);
                if left == right {
                    continue;
                }
                let base = match sem.delin_candidates(&trace).into_iter().next() {
                    Some((p, _)) => p,
                    None => continue,
                };
                let seen = out.iter().any(|cp| {
                    cp.base == base && cp.actions == (a.clone(), b.clone())
                });
                if !seen {
                    out.push(ChoicePoint {
                        trace: trace.clone(),
                        base,
                        actions: (a.clone(), b.clone()),
                        left,
                        right,
                    });
                }
            }
        }
    }
    out
}

/// SUT-resolved choices: every choice point must branch on responses only.
/// Returns the choice points where a stimulus competes.
pub fn check_wf2(
    sem: &PurposeSemantics,
    caps: &Caps,
) -> Result<Vec<ChoicePoint>, SemanticsError> {
    let (trie, _) = sem.language_lenient(caps)?;
    Ok(wf2_violations(sem, choice_points_from(sem, &trie)))
}

fn wf2_violations(sem: &PurposeSemantics, cps: Vec<ChoicePoint>) -> Vec<ChoicePoint> {
    cps.into_iter()
        .filter(|cp| {
            !sem.obs_rec.contains(&cp.actions.0) || !sem.obs_rec.contains(&cp.actions.1)
        })
        .collect()
}

/// The full well-formedness decision: observable determinism, SUT-resolved
/// choice points, and a usable verdict assignment.
pub fn check(sem: &PurposeSemantics, caps: &Caps) -> Result<WellFormednessReport, SemanticsError> {
    let (trie, conflicts) = sem.language_lenient(caps)?;
    let mut verdict_conflicts = conflicts;
    verdict_conflicts.extend(trie.assignment_violations());
    let wf1_violations = wf1_violations(sem, &trie);
    let wf2_violations = wf2_violations(sem, choice_points_from(sem, &trie));
    let well_formed =
        wf1_violations.is_empty() && wf2_violations.is_empty() && verdict_conflicts.is_empty();
    Ok(WellFormednessReport {
        wf1_violations,
        wf2_violations,
        verdict_conflicts,
        well_formed,
    })
}
