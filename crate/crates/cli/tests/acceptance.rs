//! Acceptance gate: one test per criterion, each printing a pass line with
//! its measured runtime and asserting the stated bound.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tpv_core::generator::{self, GeneratorConfig};
use tpv_core::msc::{MscDocument, Verdict};
use tpv_core::pomset::{Dependence, Pomset};
use tpv_core::semantics::PurposeSemantics;
use tpv_core::testcase::Response;
use tpv_core::validator::{self, mutate, FailureReason};
use tpv_core::{Caps, TestCase};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

fn corpus_semantics(name: &str) -> PurposeSemantics {
    let src = std::fs::read_to_string(corpus(name)).expect("corpus file");
    let doc = MscDocument::parse(&src)
        .expect("corpus parses")
        .desugar()
        .expect("corpus desugars");
    PurposeSemantics::build(&doc).expect("corpus builds")
}

fn tpv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(criterion: &str, elapsed: Duration, bound: Duration) {
    println!(
        "criterion {criterion}: pass ({} ms, bound {} ms)",
        elapsed.as_millis(),
        bound.as_millis()
    );
    assert!(
        elapsed <= bound,
        "criterion {criterion} exceeded its runtime bound: {elapsed:?} > {bound:?}"
    );
}

#[test]
fn criterion_1_corpus_verdicts() {
    let bound = Duration::from_secs(1);
    let mut worst = Duration::ZERO;

    let t = Instant::now();
    let out = tpv(&["check", corpus("m3.tp").to_str().unwrap()]);
    worst = worst.max(t.elapsed());
    assert_eq!(out.status.code(), Some(0), "m3 must be well-formed");

    let t = Instant::now();
    let out = tpv(&["check", "--format", "records", corpus("m5.tp").to_str().unwrap()]);
    worst = worst.max(t.elapsed());
    assert_eq!(out.status.code(), Some(1), "m5 must be malformed");
    let text = String::from_utf8(out.stdout).unwrap();
    let witness = text
        .lines()
        .find_map(|l| l.strip_prefix("WF1 AT "))
        .expect("m5 report carries a WF1 witness")
        .split(" BRANCHES")
        .next()
        .unwrap();
    let acts: Vec<&str> = witness.split_whitespace().collect();
    assert_eq!(acts.len(), 2, "witness trace has length 2");
    assert_eq!(acts[0], "?(r,p)a", "first a receive of a at p");
    assert_eq!(acts[1], "!(p,r)b", "then a send of b at p");

    let t = Instant::now();
    let out = tpv(&["check", "--format", "records", corpus("m6.tp").to_str().unwrap()]);
    worst = worst.max(t.elapsed());
    assert_eq!(out.status.code(), Some(1), "m6 must be malformed");
    let text = String::from_utf8(out.stdout).unwrap();
    let wf2: Vec<&str> = text
        .lines()
        .filter_map(|l| l.strip_prefix("WF2 AT "))
        .collect();
    assert!(!wf2.is_empty(), "m6 report carries a WF2 choice point");
    let at_empty: Vec<&str> = wf2
        .iter()
        .copied()
        .filter(|rest| rest.starts_with("- ON "))
        .collect();
    assert!(!at_empty.is_empty(), "a WF2 choice point sits at the empty trace");
    assert!(
        at_empty.iter().any(|rest| rest.contains(" !(")),
        "the choice point involves a send action"
    );

    report("1 (corpus verdicts)", worst, bound);
}

#[test]
fn criterion_2_m3_language() {
    let bound = Duration::from_secs(1);
    let t = Instant::now();
    let sem = corpus_semantics("m3.tp");
    let trie = sem.language(&Caps::default()).expect("m3 language");
    let complete = trie.complete_traces();
    assert_eq!(complete.len(), 4, "exactly 4 complete observable traces");
    for (trace, _) in &complete {
        assert_eq!(trace.len(), 6, "each complete trace has length 6");
    }
    let passes = complete.iter().filter(|(_, v)| *v == Verdict::Pass).count();
    let fails = complete.iter().filter(|(_, v)| *v == Verdict::Fail).count();
    assert_eq!((passes, fails), (2, 2), "verdicts split pass: 2, fail: 2");
    report("2 (m3 language)", t.elapsed(), bound);
}

#[test]
fn criterion_3_synthesis_and_mutations() {
    let bound = Duration::from_secs(1);
    let t = Instant::now();

    let synth = tpv(&["synth", corpus("m3.tp").to_str().unwrap()]);
    assert_eq!(synth.status.code(), Some(0));
    let table = String::from_utf8(synth.stdout).unwrap();
    let dir = tempfile::tempdir().expect("temp dir");
    let tc_path = dir.path().join("m3.tc");
    std::fs::write(&tc_path, &table).expect("write test case");
    let val = tpv(&[
        "validate",
        corpus("m3.tp").to_str().unwrap(),
        tc_path.to_str().unwrap(),
    ]);
    assert_eq!(val.status.code(), Some(0), "the synthesized table validates");

    let sem = corpus_semantics("m3.tp");
    let caps = Caps::default();
    let trie = sem.language(&caps).unwrap();
    let ts = validator::synthesize(&sem, &caps).unwrap();
    let expect = [
        (mutate::swap_verdicts(&ts), FailureReason::WrongVerdict),
        (
            {
                let first_send = match ts.response(&[]).unwrap() {
                    Response::Send(a) => a.clone(),
                    other => panic!("m3 opens with a stimulus, found {other:?}"),
                };
                mutate::delete_entry(&ts, &[first_send]).expect("entry exists")
            },
            FailureReason::Undefined,
        ),
        (
            mutate::quiet_to_illegal_send(&ts, &sem, &trie).expect("table waits somewhere"),
            FailureReason::IllegalSend,
        ),
        (
            mutate::redirect_send(&ts).expect("table sends somewhere"),
            FailureReason::IllegalSend,
        ),
    ];
    for (bad, reason) in &expect {
        let rep = validator::valid(&trie, bad);
        assert!(!rep.valid, "{} must be invalid", bad.name);
        assert_eq!(
            rep.failure.as_ref().expect("invalid reports carry a failure").reason,
            *reason,
            "{} fails for the expected reason",
            bad.name
        );
    }

    report("3 (synthesis and mutations)", t.elapsed(), bound);
}

fn random_char_pomset(rng: &mut ChaCha8Rng, max_events: usize) -> Pomset<char> {
    let n = rng.gen_range(0..=max_events);
    let labels: Vec<char> = (0..n)
        .map(|_| ['a', 'b', 'c'][rng.gen_range(0..3)])
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            // forward edges only, so the order is acyclic by construction
            if rng.gen_bool(0.4) {
                edges.push((i, j));
            }
        }
    }
    Pomset::new(labels, edges).expect("acyclic by construction")
}

fn random_char_dependence(rng: &mut ChaCha8Rng) -> Dependence<char> {
    let all = [('a', 'b'), ('a', 'c'), ('b', 'c')];
    Dependence::from_pairs(all.into_iter().filter(|_| rng.gen_bool(0.5)))
}

#[test]
fn criterion_4_unseq_distributes_over_composition() {
    let bound = Duration::from_secs(10);
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x4c656d6d6131);
    for case in 0..200 {
        let x = random_char_pomset(&mut rng, 6);
        let y = random_char_pomset(&mut rng, 6);
        let d = random_char_dependence(&mut rng);
        let lhs = x.compose(&y, &d).unsequentialize(&d);
        let rhs = x.unsequentialize(&d).compose(&y.unsequentialize(&d), &d);
        assert!(
            lhs.iso_equal(&rhs),
            "case {case}: unseq(x.y) differs from unseq(x).unseq(y)"
        );
    }
    report("4 (composition law, 200 cases)", t.elapsed(), bound);
}

#[test]
fn criterion_5_maximals_are_unseq_fixpoints() {
    let bound = Duration::from_secs(5);
    let t = Instant::now();
    let mut purposes: Vec<PurposeSemantics> = ["m3.tp", "m4.tp", "m5.tp", "m6.tp"]
        .iter()
        .map(|n| corpus_semantics(n))
        .collect();
    let cfg = GeneratorConfig::default();
    for seed in 0..40 {
        let doc = generator::random_purpose(seed, &cfg);
        let Ok(doc) = doc.desugar() else { continue };
        let Ok(sem) = PurposeSemantics::build(&doc) else {
            continue;
        };
        purposes.push(sem);
    }
    assert!(purposes.len() > 30, "enough generated purposes to exercise");
    let mut checked = 0usize;
    for sem in &purposes {
        for m in &sem.maximals {
            let u = m.pomset.unsequentialize(&sem.dependence);
            assert!(
                u.iso_equal(&m.pomset),
                "a maximal behavior of {} is not an unsequentialization fixpoint",
                sem.name
            );
            checked += 1;
        }
    }
    assert!(checked >= purposes.len(), "every purpose contributed maximals");
    report("5 (unseq fixpoints)", t.elapsed(), bound);
}

#[test]
fn criterion_6_delin_is_prefix_monotone() {
    let bound = Duration::from_secs(2);
    let t = Instant::now();
    let sem = corpus_semantics("m3.tp");
    let trie = sem.language(&Caps::default()).unwrap();
    let traces = trie.all_traces();
    let mut pairs = 0usize;
    for rho in &traces {
        for sigma in &traces {
            if sigma.len() < rho.len() || &sigma[..rho.len()] != rho.as_slice() {
                continue;
            }
            let dr = sem.delin(rho).expect("m3 delineation is unambiguous");
            let ds = sem.delin(sigma).expect("m3 delineation is unambiguous");
            assert!(
                dr.is_prefix_of(&ds),
                "delin not monotone on the pair ({rho:?}, {sigma:?})"
            );
            pairs += 1;
        }
    }
    assert!(pairs > traces.len(), "exercised non-trivial prefix pairs");
    report("6 (delin monotonicity)", t.elapsed(), bound);
}

#[test]
fn criterion_7_three_characterizations_agree() {
    let bound = Duration::from_secs(60);
    let t = Instant::now();
    let cfg = GeneratorConfig::default();
    let caps = Caps::default();

    let mut suite: Vec<PurposeSemantics> =
        vec![corpus_semantics("m3.tp"), corpus_semantics("m4.tp")];
    let mut generated = 0usize;
    let mut seed = 0u64;
    while generated < 50 {
        assert!(seed < 2000, "well-formed purposes must not be this rare");
        let s = seed;
        seed += 1;
        let Ok(Some((_, sem))) = generator::random_well_formed(s, &cfg, &caps) else {
            continue;
        };
        generated += 1;
        suite.push(sem);
    }

    let mut tables = 0usize;
    for (n, sem) in suite.iter().enumerate() {
        let trie = sem.language(&caps).expect("well-formed purposes have a language");
        let ts = validator::synthesize(sem, &caps).expect("synthesis succeeds");

        let mut variants: Vec<TestCase> = vec![ts.clone(), mutate::swap_verdicts(&ts)];
        if let Response::Send(a) = ts.response(&[]).unwrap_or(&Response::Quiet) {
            variants.extend(mutate::delete_entry(&ts, std::slice::from_ref(a)));
        }
        variants.extend(mutate::quiet_to_illegal_send(&ts, sem, &trie));
        variants.extend(mutate::redirect_send(&ts));
        for k in 0..3 {
            variants.push(generator::random_testcase(sem, &trie, n as u64 * 31 + k));
        }
        assert!(variants.len() >= 5);

        for ts in &variants {
            let a = validator::valid(&trie, ts).valid;
            let (b, bw) = validator::definition_valid(sem, &trie, ts)
                .expect("definition check stays within caps");
            let (c, cw) = validator::oracle_valid(sem, &trie, ts);
            assert!(
                a == b && b == c,
                "characterizations disagree on {} for purpose {}: \
                 algorithm={a} definition={b} (witness {bw:?}) oracle={c} (witness {cw:?})",
                ts.name,
                sem.name
            );
            tables += 1;
        }
    }
    assert!(tables >= 5 * suite.len(), "at least five tables per purpose");
    report("7 (triple agreement, 52 purposes)", t.elapsed(), bound);
}

#[test]
fn criterion_8_round_trips_and_stability() {
    let bound = Duration::from_secs(5);
    let t = Instant::now();

    // Purpose pretty-print and parse close the loop on the whole corpus.
    for name in ["m3.tp", "m4.tp", "m5.tp", "m6.tp"] {
        let src = std::fs::read_to_string(corpus(name)).unwrap();
        let doc = MscDocument::parse(&src).unwrap();
        let printed = doc.pretty();
        let reparsed = MscDocument::parse(&printed).unwrap();
        assert_eq!(reparsed.pretty(), printed, "{name} pretty-print is not stable");
        let desugared = doc.desugar().unwrap().pretty();
        assert_eq!(
            MscDocument::parse(&desugared).unwrap().pretty(),
            desugared,
            "{name} desugared form is not stable"
        );
    }

    // Test-case serialize and parse close the loop on synthesized tables.
    let caps = Caps::default();
    for name in ["m3.tp", "m4.tp"] {
        let sem = corpus_semantics(name);
        let ts = validator::synthesize(&sem, &caps).unwrap();
        let text = ts.serialize();
        let back = TestCase::parse(&text).unwrap();
        assert_eq!(back.serialize(), text, "{name} table serialization drifts");
        assert_eq!(back.name, ts.name);
        let entries: BTreeSet<String> = ts
            .entries()
            .map(|(trace, _)| format!("{trace:?}"))
            .collect();
        let back_entries: BTreeSet<String> = back
            .entries()
            .map(|(trace, _)| format!("{trace:?}"))
            .collect();
        assert_eq!(entries, back_entries);
    }

    // Record output is byte-stable run over run.
    for (cmd, name) in [
        ("check", "m3.tp"),
        ("check", "m5.tp"),
        ("check", "m6.tp"),
        ("traces", "m3.tp"),
        ("synth", "m3.tp"),
    ] {
        let path = corpus(name);
        let args = ["--format", "records", cmd, path.to_str().unwrap()];
        let first = tpv(&args);
        let second = tpv(&args);
        assert_eq!(
            first.stdout, second.stdout,
            "{cmd} {name} records output is not byte-stable"
        );
    }

    report("8 (round-trips and stability)", t.elapsed(), bound);
}
