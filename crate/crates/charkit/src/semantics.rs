//! The supported behavioural semantics and their command-line tags.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A behavioural preorder or equivalence over the states of one LTS.
///
/// Orientation of a pair (p, q) in the resulting relation:
///
/// * `SimLeq`: q simulates p.
/// * `SimGeq`: p simulates q.
/// * `SimEq`: p and q simulate each other (similarity).
/// * `Bisim`: p and q are strongly bisimilar.
/// * `ReadySim`: p ready simulates q.
/// * `Bfb`: p and q are back-and-forth bisimilar.
/// * `Bfbid`: back-and-forth bisimilar and indistinguishable to every agent.
/// * `Prebis`: p prebisimulates q (divergence-sensitive).
/// * `ExtLeq` / `ExtGeq`: simulation up to the label preorder, both ways.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Semantics {
    SimLeq,
    SimGeq,
    SimEq,
    Bisim,
    ReadySim,
    Bfb,
    Bfbid,
    Prebis,
    ExtLeq,
    ExtGeq,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown semantics tag `{0}`")]
pub struct UnknownSemantics(pub String);

impl Semantics {
    pub const ALL: [Semantics; 10] = [
        Semantics::SimLeq,
        Semantics::SimGeq,
        Semantics::SimEq,
        Semantics::Bisim,
        Semantics::ReadySim,
        Semantics::Bfb,
        Semantics::Bfbid,
        Semantics::Prebis,
        Semantics::ExtLeq,
        Semantics::ExtGeq,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Semantics::SimLeq => "simleq",
            Semantics::SimGeq => "simgeq",
            Semantics::SimEq => "simeq",
            Semantics::Bisim => "bisim",
            Semantics::ReadySim => "rs",
            Semantics::Bfb => "bfb",
            Semantics::Bfbid => "bfbid",
            Semantics::Prebis => "prebis",
            Semantics::ExtLeq => "extleq",
            Semantics::ExtGeq => "extgeq",
        }
    }

    /// SimEq is defined as an intersection of two fixed points and has no
    /// step function of its own; everything else does.
    pub fn has_step(self) -> bool {
        self != Semantics::SimEq
    }

    /// Whether the semantics needs a nonempty label preorder annotation.
    pub fn needs_label_preorder(self) -> bool {
        matches!(self, Semantics::ExtLeq | Semantics::ExtGeq)
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Semantics {
    type Err = UnknownSemantics;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Semantics::ALL
            .iter()
            .copied()
            .find(|sem| sem.tag() == s)
            .ok_or_else(|| UnknownSemantics(s.to_string()))
    }
}
