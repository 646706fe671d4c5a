//! Toolkit for MSC-style test purposes: pomset semantics, well-formedness
//! checking, and validation/synthesis of deterministic test cases.
//!
//! A test purpose is written as a small message-sequence-chart dialect
//! (instances, messages, coregions, alternatives, ordering constraints,
//! verdicts). Its meaning is a finite, prefix-closed set of pomsets; the
//! tester-visible part of that set induces an observable trace language with
//! verdicts. The [`validator`] module decides whether a test-case table
//! drives any system under test to the verdict the purpose prescribes, and
//! can synthesize such a table whenever the purpose is well-formed.

pub mod generator;
pub mod msc;
pub mod pomset;
pub mod semantics;
pub mod testcase;
pub mod validator;
pub mod wellformed;

pub use msc::{Action, Dir, MscDocument, Verdict};
pub use pomset::{Dependence, Lposet, Pomset};
pub use semantics::{LanguageTrie, PurposeSemantics};
pub use testcase::TestCase;

/// Enumeration limits shared by the trace-level operations. `Default` gives
/// the desk-scale caps the command line uses.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    /// Largest number of linearizations any single enumeration may produce.
    pub max_linearizations: usize,
    /// Largest observable trace length tolerated when building languages.
    pub max_trace_len: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_linearizations: pomset::DEFAULT_LINEARIZATION_CAP,
            max_trace_len: 64,
        }
    }
}
