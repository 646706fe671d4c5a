//! Labeled partial orders (lposets), their isomorphism classes (pomsets),
//! and the order-theoretic operations the rest of the crate is built on.
//!
//! Events are plain indices into the label vector; the order relation is
//! kept transitively closed at all times, so `lt` is the full strict order,
//! not a cover relation. Pomset equality is isomorphism of representatives.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

/// Default cap on the number of strings a linearization enumeration may
/// produce before giving up with [`PomsetError::ResourceExceeded`].
pub const DEFAULT_LINEARIZATION_CAP: usize = 100_000;

/// Alphabet requirements: ordered so enumerations are deterministic, hashable
/// so dependences can be looked up.
pub trait Label: Clone + Eq + Ord + Hash + fmt::Debug {}
impl<T: Clone + Eq + Ord + Hash + fmt::Debug> Label for T {}

/// A word over the alphabet, used both as linearization output and as the
/// string pomset input.
pub type Word<L> = Vec<L>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PomsetError {
    /// The supplied edges relate some event to itself once closed.
    #[error("order relation contains a cycle")]
    Cycle,
    /// An enumeration grew past the configured cap.
    #[error("enumeration exceeded the cap of {limit}")]
    ResourceExceeded { limit: usize },
}

/// A reflexive, symmetric dependence relation over labels. Reflexivity is
/// built into the query, so only distinct pairs need to be supplied.
#[derive(Debug, Clone, Default)]
pub struct Dependence<L: Label> {
    pairs: BTreeSet<(L, L)>,
}

impl<L: Label> Dependence<L> {
    /// Builds the relation from unordered pairs; both orientations are kept.
    pub fn from_pairs<I: IntoIterator<Item = (L, L)>>(iter: I) -> Self {
        let mut pairs = BTreeSet::new();
        for (a, b) in iter {
            pairs.insert((b.clone(), a.clone()));
            pairs.insert((a, b));
        }
        Dependence { pairs }
    }

    pub fn dependent(&self, a: &L, b: &L) -> bool {
        a == b || self.pairs.contains(&(a.clone(), b.clone()))
    }

    /// The distinct (symmetric) pairs, for enumeration-style checks.
    pub fn pairs(&self) -> impl Iterator<Item = &(L, L)> {
        self.pairs.iter()
    }
}

/// A finite labeled partial order. `lt` is strict and transitively closed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lposet<L: Label> {
    labels: Vec<L>,
    lt: Vec<bool>, // row-major n*n, lt[i*n + j] <=> event i below event j
}

impl<L: Label> Lposet<L> {
    /// Constructs the lposet from labels and (not necessarily transitive)
    /// edges between event indices. Fails if the closure has a cycle.
    pub fn new<I>(labels: Vec<L>, edges: I) -> Result<Self, PomsetError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = labels.len();
        let mut lt = vec![false; n * n];
        for (a, b) in edges {
            assert!(a < n && b < n, "edge endpoint out of range");
            lt[a * n + b] = true;
        }
        close(&mut lt, n);
        for e in 0..n {
            if lt[e * n + e] {
                return Err(PomsetError::Cycle);
            }
        }
        Ok(Lposet { labels, lt })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, e: usize) -> &L {
        &self.labels[e]
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.lt[a * self.len() + b]
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        a == b || self.lt(a, b)
    }

    pub fn concurrent(&self, a: usize, b: usize) -> bool {
        a != b && !self.lt(a, b) && !self.lt(b, a)
    }

    pub fn preds(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&p| self.lt(p, e))
    }

    pub fn succs(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&s| self.lt(e, s))
    }

    /// The sub-lposet induced by `events` (with the inherited order, which
    /// is transitive already). Event indices are renumbered in the order
    /// given.
    pub fn induced(&self, events: &[usize]) -> Lposet<L> {
        let labels = events.iter().map(|&e| self.labels[e].clone()).collect();
        let n = events.len();
        let mut lt = vec![false; n * n];
        for (i, &a) in events.iter().enumerate() {
            for (j, &b) in events.iter().enumerate() {
                if self.lt(a, b) {
                    lt[i * n + j] = true;
                }
            }
        }
        Lposet { labels, lt }
    }

    fn pair_count(&self) -> usize {
        self.lt.iter().filter(|&&b| b).count()
    }

    /// Per-event signature used to prune isomorphism and embedding
    /// searches: (label, in-degree, out-degree, height). Height is the
    /// longest chain strictly below the event.
    fn signatures(&self) -> Vec<(L, usize, usize, usize)> {
        let n = self.len();
        let mut height = vec![0usize; n];
        // events sorted by in-degree-below works, but a fixpoint sweep is
        // simpler at this size
        let mut changed = true;
        while changed {
            changed = false;
            for a in 0..n {
                for b in 0..n {
                    if self.lt(a, b) && height[b] < height[a] + 1 {
                        height[b] = height[a] + 1;
                        changed = true;
                    }
                }
            }
        }
        (0..n)
            .map(|e| {
                let indeg = self.preds(e).count();
                let outdeg = self.succs(e).count();
                (self.labels[e].clone(), indeg, outdeg, height[e])
            })
            .collect()
    }
}

fn close(lt: &mut [bool], n: usize) {
    for k in 0..n {
        for i in 0..n {
            if lt[i * n + k] {
                for j in 0..n {
                    if lt[k * n + j] {
                        lt[i * n + j] = true;
                    }
                }
            }
        }
    }
}

/// An isomorphism class of lposets, handled through one concrete
/// representative. Equality is label- and order-preserving bijection.
#[derive(Debug, Clone)]
pub struct Pomset<L: Label> {
    rep: Lposet<L>,
}

impl<L: Label> PartialEq for Pomset<L> {
    fn eq(&self, other: &Self) -> bool {
        self.iso_equal(other)
    }
}

impl<L: Label> Eq for Pomset<L> {}

impl<L: Label> From<Lposet<L>> for Pomset<L> {
    fn from(rep: Lposet<L>) -> Self {
        Pomset { rep }
    }
}

impl<L: Label> Pomset<L> {
    pub fn new<I>(labels: Vec<L>, edges: I) -> Result<Self, PomsetError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Lposet::new(labels, edges).map(Pomset::from)
    }

    /// The empty pomset ε.
    pub fn empty() -> Self {
        Pomset {
            rep: Lposet {
                labels: Vec::new(),
                lt: Vec::new(),
            },
        }
    }

    /// The single-event pomset for one letter.
    pub fn letter(l: L) -> Self {
        Pomset {
            rep: Lposet {
                labels: vec![l],
                lt: vec![false],
            },
        }
    }

    /// The string pomset: a total order in word order.
    pub fn word<I: IntoIterator<Item = L>>(iter: I) -> Self {
        let labels: Vec<L> = iter.into_iter().collect();
        let n = labels.len();
        let mut lt = vec![false; n * n];
        for i in 0..n {
            for j in i + 1..n {
                lt[i * n + j] = true;
            }
        }
        Pomset {
            rep: Lposet { labels, lt },
        }
    }

    pub fn rep(&self) -> &Lposet<L> {
        &self.rep
    }

    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rep.is_empty()
    }

    /// True iff some label- and order-preserving bijection exists.
    pub fn iso_equal(&self, other: &Pomset<L>) -> bool {
        let (x, y) = (&self.rep, &other.rep);
        if x.len() != y.len() || x.pair_count() != y.pair_count() {
            return false;
        }
        let sig_x = x.signatures();
        let sig_y = y.signatures();
        if sorted(&sig_x) != sorted(&sig_y) {
            return false;
        }
        embed(x, y, &sig_x, &sig_y, Mode::Iso)
    }

    /// Prefix order ⊑: `self` embeds into `other` as a downward-closed,
    /// possibly more-ordered part. Concretely: a label-preserving injection
    /// f with downward-closed image such that f(e1) < f(e2) in `other`
    /// implies e1 < e2 in `self`.
    pub fn is_prefix_of(&self, other: &Pomset<L>) -> bool {
        let (x, y) = (&self.rep, &other.rep);
        if x.len() > y.len() {
            return false;
        }
        if !multiset_included(x.labels(), y.labels()) {
            return false;
        }
        embed_prefix(x, y)
    }

    /// Less-sequential order ≼: some label-preserving bijection carries every
    /// order pair of `self` into an order pair of `other`.
    pub fn less_sequential_than(&self, other: &Pomset<L>) -> bool {
        let (x, y) = (&self.rep, &other.rep);
        if x.len() != y.len() || x.pair_count() > y.pair_count() {
            return false;
        }
        if sorted(x.labels()) != sorted(y.labels()) {
            return false;
        }
        let sig_x = x.signatures();
        let sig_y = y.signatures();
        embed(x, y, &sig_x, &sig_y, Mode::LessSeq)
    }

    /// All linearizations as label strings, capped.
    pub fn linearizations(&self) -> Result<BTreeSet<Word<L>>, PomsetError> {
        self.linearizations_with_cap(DEFAULT_LINEARIZATION_CAP)
    }

    pub fn linearizations_with_cap(&self, cap: usize) -> Result<BTreeSet<Word<L>>, PomsetError> {
        let n = self.rep.len();
        let mut out = BTreeSet::new();
        let mut consumed = vec![false; n];
        let mut prefix = Vec::with_capacity(n);
        let mut budget = cap.saturating_mul(n.max(1)).saturating_mul(4).max(1024);
        lin_rec(
            &self.rep,
            &mut consumed,
            &mut prefix,
            &mut out,
            cap,
            &mut budget,
        )?;
        Ok(out)
    }

    /// True iff `word` is a linearization of this pomset.
    pub fn has_linearization(&self, word: &[L]) -> bool {
        let n = self.rep.len();
        if word.len() != n {
            return false;
        }
        let mut consumed = vec![false; n];
        match_word(&self.rep, word, 0, &mut consumed)
    }

    /// Weak sequential composition: concatenates the two pomsets, ordering a
    /// pair across the seam iff its labels are dependent. Events are index
    /// sets, so the operands are renamed apart automatically.
    pub fn compose(&self, other: &Pomset<L>, dep: &Dependence<L>) -> Pomset<L> {
        let (x, y) = (&self.rep, &other.rep);
        let (nx, ny) = (x.len(), y.len());
        let n = nx + ny;
        let mut labels = Vec::with_capacity(n);
        labels.extend_from_slice(x.labels());
        labels.extend_from_slice(y.labels());
        let mut lt = vec![false; n * n];
        for i in 0..nx {
            for j in 0..nx {
                if x.lt(i, j) {
                    lt[i * n + j] = true;
                }
            }
        }
        for i in 0..ny {
            for j in 0..ny {
                if y.lt(i, j) {
                    lt[(nx + i) * n + nx + j] = true;
                }
            }
        }
        for i in 0..nx {
            for j in 0..ny {
                if dep.dependent(x.label(i), y.label(j)) {
                    lt[i * n + nx + j] = true;
                }
            }
        }
        close(&mut lt, n);
        Pomset {
            rep: Lposet { labels, lt },
        }
    }

    /// Unsequentialization ⟨·⟩_D: keeps only the order forced by dependent
    /// label pairs (via transitive closure of those pairs).
    pub fn unsequentialize(&self, dep: &Dependence<L>) -> Pomset<L> {
        let x = &self.rep;
        let n = x.len();
        let mut lt = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                if x.lt(i, j) && dep.dependent(x.label(i), x.label(j)) {
                    lt[i * n + j] = true;
                }
            }
        }
        close(&mut lt, n);
        Pomset {
            rep: Lposet {
                labels: x.labels.clone(),
                lt,
            },
        }
    }

    /// D-consistency: concurrent events never carry dependent labels.
    pub fn is_consistent(&self, dep: &Dependence<L>) -> bool {
        let x = &self.rep;
        let n = x.len();
        for a in 0..n {
            for b in a + 1..n {
                if x.concurrent(a, b) && dep.dependent(x.label(a), x.label(b)) {
                    return false;
                }
            }
        }
        true
    }

    /// Restriction to the events whose labels lie in `keep`.
    pub fn restrict(&self, keep: &BTreeSet<L>) -> Pomset<L> {
        let events: Vec<usize> = (0..self.rep.len())
            .filter(|&e| keep.contains(self.rep.label(e)))
            .collect();
        Pomset {
            rep: self.rep.induced(&events),
        }
    }

    /// All downward-closed event subsets of the representative, smallest
    /// first (deterministic order).
    pub fn downward_closed_sets(&self) -> Vec<BTreeSet<usize>> {
        let x = &self.rep;
        let n = x.len();
        let mut layers: Vec<BTreeSet<BTreeSet<usize>>> = vec![BTreeSet::new(); n + 1];
        layers[0].insert(BTreeSet::new());
        for size in 0..n {
            let current: Vec<BTreeSet<usize>> = layers[size].iter().cloned().collect();
            for set in current {
                for e in 0..n {
                    if set.contains(&e) {
                        continue;
                    }
                    if x.preds(e).all(|p| set.contains(&p)) {
                        let mut next = set.clone();
                        next.insert(e);
                        layers[size + 1].insert(next);
                    }
                }
            }
        }
        layers.into_iter().flatten().collect()
    }
}

fn sorted<T: Clone + Ord>(items: &[T]) -> Vec<T> {
    let mut v = items.to_vec();
    v.sort();
    v
}

fn multiset_included<L: Label>(small: &[L], big: &[L]) -> bool {
    let mut counts: BTreeMap<&L, isize> = BTreeMap::new();
    for l in big {
        *counts.entry(l).or_insert(0) += 1;
    }
    for l in small {
        let c = counts.entry(l).or_insert(0);
        *c -= 1;
        if *c < 0 {
            return false;
        }
    }
    true
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Bijection with e1 < e2 ⟺ f(e1) < f(e2).
    Iso,
    /// Bijection with e1 < e2 ⟹ f(e1) < f(e2).
    LessSeq,
}

fn embed<L: Label>(
    x: &Lposet<L>,
    y: &Lposet<L>,
    sig_x: &[(L, usize, usize, usize)],
    sig_y: &[(L, usize, usize, usize)],
    mode: Mode,
) -> bool {
    let n = x.len();
    let mut image: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec<L: Label>(
        x: &Lposet<L>,
        y: &Lposet<L>,
        sig_x: &[(L, usize, usize, usize)],
        sig_y: &[(L, usize, usize, usize)],
        mode: Mode,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let i = image.len();
        if i == x.len() {
            return true;
        }
        for w in 0..y.len() {
            if used[w] {
                continue;
            }
            let compatible = match mode {
                // signatures must match exactly for isomorphism
                Mode::Iso => sig_x[i] == sig_y[w],
                Mode::LessSeq => x.label(i) == y.label(w),
            };
            if !compatible {
                continue;
            }
            let ok = (0..i).all(|j| {
                let v = image[j];
                match mode {
                    Mode::Iso => x.lt(j, i) == y.lt(v, w) && x.lt(i, j) == y.lt(w, v),
                    Mode::LessSeq => {
                        (!x.lt(j, i) || y.lt(v, w)) && (!x.lt(i, j) || y.lt(w, v))
                    }
                }
            });
            if !ok {
                continue;
            }
            image.push(w);
            used[w] = true;
            if rec(x, y, sig_x, sig_y, mode, image, used) {
                return true;
            }
            used[w] = false;
            image.pop();
        }
        false
    }
    rec(x, y, sig_x, sig_y, mode, &mut image, &mut used)
}

/// Injection search for the prefix order; see [`Pomset::is_prefix_of`].
fn embed_prefix<L: Label>(x: &Lposet<L>, y: &Lposet<L>) -> bool {
    let n = x.len();
    let mut image: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; y.len()];
    fn rec<L: Label>(
        x: &Lposet<L>,
        y: &Lposet<L>,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let i = image.len();
        if i == x.len() {
            // the image must be downward closed in y
            return image
                .iter()
                .all(|&w| y.preds(w).all(|p| image.contains(&p)));
        }
        for w in 0..y.len() {
            if used[w] || x.label(i) != y.label(w) {
                continue;
            }
            // order in y between already-chosen images must be reflected in x
            let ok = (0..i).all(|j| {
                let v = image[j];
                (!y.lt(v, w) || x.lt(j, i)) && (!y.lt(w, v) || x.lt(i, j))
            });
            if !ok {
                continue;
            }
            image.push(w);
            used[w] = true;
            if rec(x, y, image, used) {
                return true;
            }
            used[w] = false;
            image.pop();
        }
        false
    }
    rec(x, y, &mut image, &mut used)
}

fn lin_rec<L: Label>(
    x: &Lposet<L>,
    consumed: &mut Vec<bool>,
    prefix: &mut Word<L>,
    out: &mut BTreeSet<Word<L>>,
    cap: usize,
    budget: &mut usize,
) -> Result<(), PomsetError> {
    if *budget == 0 {
        return Err(PomsetError::ResourceExceeded { limit: cap });
    }
    *budget -= 1;
    let n = x.len();
    if prefix.len() == n {
        out.insert(prefix.clone());
        if out.len() > cap {
            return Err(PomsetError::ResourceExceeded { limit: cap });
        }
        return Ok(());
    }
    let available: Vec<usize> = (0..n)
        .filter(|&e| !consumed[e] && x.preds(e).all(|p| consumed[p]))
        .collect();
    for (k, &e) in available.iter().enumerate() {
        // skip events interchangeable with an earlier available one: same
        // label and the same set of successors give identical continuations
        let duplicate = available[..k].iter().any(|&d| {
            x.label(d) == x.label(e) && (0..n).all(|s| x.lt(d, s) == x.lt(e, s))
        });
        if duplicate {
            continue;
        }
        consumed[e] = true;
        prefix.push(x.label(e).clone());
        lin_rec(x, consumed, prefix, out, cap, budget)?;
        prefix.pop();
        consumed[e] = false;
    }
    Ok(())
}

fn match_word<L: Label>(x: &Lposet<L>, word: &[L], pos: usize, consumed: &mut Vec<bool>) -> bool {
    if pos == word.len() {
        return true;
    }
    let n = x.len();
    let mut tried: Vec<usize> = Vec::new();
    for e in 0..n {
        if consumed[e] || x.label(e) != &word[pos] {
            continue;
        }
        if !x.preds(e).all(|p| consumed[p]) {
            continue;
        }
        if tried
            .iter()
            .any(|&d| (0..n).all(|s| x.lt(d, s) == x.lt(e, s)))
        {
            continue; // interchangeable with an event that already failed
        }
        consumed[e] = true;
        if match_word(x, word, pos + 1, consumed) {
            consumed[e] = false;
            return true;
        }
        consumed[e] = false;
        tried.push(e);
    }
    false
}
