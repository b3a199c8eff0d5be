//! Finite labelled transition systems together with the annotations the
//! behavioural semantics consume: a divergence set, a preorder on labels and
//! per-agent indistinguishability relations.
//!
//! States, labels and agents are interned to dense indices at construction
//! time; everything downstream works on indices and the name tables only
//! matter at the text boundary.
//!
//! # Text format
//!
//! Line oriented. Blank lines and lines starting with `#` are ignored.
//! Section keywords may repeat; their contents accumulate.
//!
//! ```text
//! states: p q r
//! labels: a b
//! trans: p a q
//! diverge: r
//! labelle: a b
//! agent: alice p q
//! ```
//!
//! `trans:` takes one `source label target` triple per line, `labelle:` one
//! `a b` pair per line (meaning a is below b), `agent:` one `id p q` pair per
//! line. Agents are declared by first appearance.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::set::StateSet;

/// Dense index of a state within one LTS.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StateId(pub usize);

/// Dense index of a label within one LTS.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LabelId(pub usize);

/// Dense index of an agent within one LTS.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AgentId(pub usize);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LtsError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: undeclared {kind} `{name}`")]
    Undeclared {
        line: usize,
        kind: &'static str,
        name: String,
    },
    #[error("line {line}: duplicate {kind} declaration `{name}`")]
    Duplicate {
        line: usize,
        kind: &'static str,
        name: String,
    },
    #[error("invalid {kind} name `{name}`: names are nonempty and contain no whitespace")]
    BadName { kind: &'static str, name: String },
    #[error("an LTS needs at least one state")]
    NoStates,
}

/// One failed semantic invariant found by [`Lts::validate`].
///
/// Structural problems (dangling references, duplicate names) cannot be
/// represented at all; they are rejected while building.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    PreorderNotReflexive {
        label: String,
    },
    PreorderNotTransitive {
        a: String,
        b: String,
        c: String,
    },
    AgentNotSymmetric {
        agent: String,
        p: String,
        q: String,
    },
    AgentNotTransitive {
        agent: String,
        p: String,
        q: String,
        r: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PreorderNotReflexive { label } => {
                write!(f, "preorder not reflexive at {label}")
            }
            Violation::PreorderNotTransitive { a, b, c } => {
                write!(
                    f,
                    "preorder not transitive: ({a},{b}) and ({b},{c}) without ({a},{c})"
                )
            }
            Violation::AgentNotSymmetric { agent, p, q } => {
                write!(
                    f,
                    "agent relation not symmetric: {agent} relates {p} {q} but not {q} {p}"
                )
            }
            Violation::AgentNotTransitive { agent, p, q, r } => {
                write!(
                    f,
                    "agent relation not transitive: {agent} relates {p} {q} and {q} {r} but not {p} {r}"
                )
            }
        }
    }
}

/// An annotated labelled transition system.
///
/// Immutable once built. Successor, predecessor and agent-class sets are
/// precomputed so the formula semantics never walks the raw transition set;
/// the relational oracle deliberately does the opposite and only uses
/// [`Lts::has_transition`] and the raw annotation pair sets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Lts {
    state_names: Vec<String>,
    label_names: Vec<String>,
    agent_names: Vec<String>,
    transitions: BTreeSet<(StateId, LabelId, StateId)>,
    diverging: StateSet,
    label_preorder: BTreeSet<(LabelId, LabelId)>,
    agent_pairs: Vec<BTreeSet<(StateId, StateId)>>,
    succ: Vec<Vec<StateSet>>,
    pred: Vec<Vec<StateSet>>,
    agent_class: Vec<Vec<StateSet>>,
}

impl Lts {
    fn from_parts(
        state_names: Vec<String>,
        label_names: Vec<String>,
        agent_names: Vec<String>,
        transitions: BTreeSet<(StateId, LabelId, StateId)>,
        diverging: BTreeSet<StateId>,
        label_preorder: BTreeSet<(LabelId, LabelId)>,
        agent_pairs: Vec<BTreeSet<(StateId, StateId)>>,
    ) -> Result<Lts, LtsError> {
        if state_names.is_empty() {
            return Err(LtsError::NoStates);
        }
        for (kind, names) in [
            ("state", &state_names),
            ("label", &label_names),
            ("agent", &agent_names),
        ] {
            let mut seen = BTreeSet::new();
            for name in names.iter() {
                if name.is_empty() || name.chars().any(char::is_whitespace) {
                    return Err(LtsError::BadName {
                        kind,
                        name: name.clone(),
                    });
                }
                if !seen.insert(name) {
                    return Err(LtsError::Duplicate {
                        line: 0,
                        kind,
                        name: name.clone(),
                    });
                }
            }
        }
        let n = state_names.len();
        let m = label_names.len();
        debug_assert!(transitions
            .iter()
            .all(|&(p, a, q)| p.0 < n && a.0 < m && q.0 < n));
        debug_assert!(diverging.iter().all(|&p| p.0 < n));
        debug_assert!(label_preorder.iter().all(|&(a, b)| a.0 < m && b.0 < m));
        debug_assert_eq!(agent_pairs.len(), agent_names.len());

        let mut succ = vec![vec![StateSet::empty(n); n]; m];
        let mut pred = vec![vec![StateSet::empty(n); n]; m];
        for &(p, a, q) in &transitions {
            succ[a.0][p.0].insert(q);
            pred[a.0][q.0].insert(p);
        }
        let mut agent_class = Vec::with_capacity(agent_pairs.len());
        for pairs in &agent_pairs {
            let mut classes: Vec<StateSet> = (0..n)
                .map(|p| {
                    let mut s = StateSet::empty(n);
                    s.insert(StateId(p));
                    s
                })
                .collect();
            for &(p, q) in pairs {
                classes[p.0].insert(q);
                classes[q.0].insert(p);
            }
            agent_class.push(classes);
        }
        let mut div = StateSet::empty(n);
        for p in diverging {
            div.insert(p);
        }
        Ok(Lts {
            state_names,
            label_names,
            agent_names,
            transitions,
            diverging: div,
            label_preorder,
            agent_pairs,
            succ,
            pred,
            agent_class,
        })
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_labels(&self) -> usize {
        self.label_names.len()
    }

    pub fn num_agents(&self) -> usize {
        self.agent_names.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.num_states()).map(StateId)
    }

    pub fn labels(&self) -> impl Iterator<Item = LabelId> {
        (0..self.num_labels()).map(LabelId)
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (0..self.num_agents()).map(AgentId)
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s.0]
    }

    pub fn label_name(&self, a: LabelId) -> &str {
        &self.label_names[a.0]
    }

    pub fn agent_name(&self, i: AgentId) -> &str {
        &self.agent_names[i.0]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.state_names.iter().position(|s| s == name).map(StateId)
    }

    pub fn label_by_name(&self, name: &str) -> Option<LabelId> {
        self.label_names.iter().position(|s| s == name).map(LabelId)
    }

    pub fn agent_by_name(&self, name: &str) -> Option<AgentId> {
        self.agent_names.iter().position(|s| s == name).map(AgentId)
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, LabelId, StateId)> + '_ {
        self.transitions.iter().copied()
    }

    pub fn has_transition(&self, p: StateId, a: LabelId, q: StateId) -> bool {
        self.transitions.contains(&(p, a, q))
    }

    /// States reachable from `p` in one `a`-step.
    pub fn successors(&self, p: StateId, a: LabelId) -> &StateSet {
        &self.succ[a.0][p.0]
    }

    /// States from which `p` is reachable in one `a`-step.
    pub fn predecessors(&self, p: StateId, a: LabelId) -> &StateSet {
        &self.pred[a.0][p.0]
    }

    /// Labels with at least one outgoing transition from `p`, in label order.
    pub fn enabled(&self, p: StateId) -> Vec<LabelId> {
        self.labels()
            .filter(|&a| !self.successors(p, a).is_empty())
            .collect()
    }

    pub fn diverging(&self) -> &StateSet {
        &self.diverging
    }

    pub fn is_diverging(&self, p: StateId) -> bool {
        self.diverging.contains(p)
    }

    pub fn label_preorder(&self) -> &BTreeSet<(LabelId, LabelId)> {
        &self.label_preorder
    }

    /// Whether `a` is below `b` in the label preorder, as stored.
    pub fn label_leq(&self, a: LabelId, b: LabelId) -> bool {
        self.label_preorder.contains(&(a, b))
    }

    /// The indistinguishability class of `p` for agent `i`, including `p`
    /// itself; reflexivity is implicit, symmetry is closed over here.
    pub fn agent_class(&self, i: AgentId, p: StateId) -> &StateSet {
        &self.agent_class[i.0][p.0]
    }

    /// The agent relation exactly as stored. Reflexive pairs are implicit
    /// and never stored.
    pub fn agent_pairs(&self, i: AgentId) -> &BTreeSet<(StateId, StateId)> {
        &self.agent_pairs[i.0]
    }

    /// Whether `p` and `q` are indistinguishable to agent `i`, computed from
    /// the stored pairs plus implicit reflexivity and symmetry.
    pub fn agent_related(&self, i: AgentId, p: StateId, q: StateId) -> bool {
        p == q || self.agent_pairs[i.0].contains(&(p, q)) || self.agent_pairs[i.0].contains(&(q, p))
    }

    /// Replaces the label preorder by the reflexive-transitive closure of the
    /// stored pairs, over all declared labels.
    pub fn with_closed_preorder(mut self) -> Lts {
        let m = self.num_labels();
        let mut reach = vec![vec![false; m]; m];
        for &(a, b) in &self.label_preorder {
            reach[a.0][b.0] = true;
        }
        close_reflexive_transitive(&mut reach);
        self.label_preorder = (0..m)
            .flat_map(|a| (0..m).map(move |b| (a, b)))
            .filter(|&(a, b)| reach[a][b])
            .map(|(a, b)| (LabelId(a), LabelId(b)))
            .collect();
        self
    }

    /// Checks the semantic invariants of the annotations. An empty result
    /// means the system is valid; annotations that are absent are valid.
    ///
    /// The preorder is checked as stored: it must be reflexive over all
    /// declared labels and transitive whenever it is nonempty. Agent
    /// relations must be symmetric as stored and transitive up to the
    /// implicit reflexive pairs.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !self.label_preorder.is_empty() {
            for a in self.labels() {
                if !self.label_preorder.contains(&(a, a)) {
                    out.push(Violation::PreorderNotReflexive {
                        label: self.label_name(a).to_string(),
                    });
                }
            }
            for &(a, b) in &self.label_preorder {
                for &(b2, c) in &self.label_preorder {
                    if b == b2 && !self.label_preorder.contains(&(a, c)) {
                        out.push(Violation::PreorderNotTransitive {
                            a: self.label_name(a).to_string(),
                            b: self.label_name(b).to_string(),
                            c: self.label_name(c).to_string(),
                        });
                    }
                }
            }
        }
        for i in self.agents() {
            let pairs = &self.agent_pairs[i.0];
            for &(p, q) in pairs {
                if p != q && !pairs.contains(&(q, p)) {
                    out.push(Violation::AgentNotSymmetric {
                        agent: self.agent_name(i).to_string(),
                        p: self.state_name(p).to_string(),
                        q: self.state_name(q).to_string(),
                    });
                }
            }
            for &(p, q) in pairs {
                for &(q2, r) in pairs {
                    if q == q2 && p != r && !pairs.contains(&(p, r)) {
                        out.push(Violation::AgentNotTransitive {
                            agent: self.agent_name(i).to_string(),
                            p: self.state_name(p).to_string(),
                            q: self.state_name(q).to_string(),
                            r: self.state_name(r).to_string(),
                        });
                    }
                }
            }
        }
        out
    }

    /// Serializes to the text format. Sections appear in a fixed order,
    /// states and labels in declaration order, transitions sorted by
    /// (source, label, target) index; parsing the output reproduces the
    /// system field for field, and serializing again is byte-identical.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("states:");
        for s in &self.state_names {
            out.push(' ');
            out.push_str(s);
        }
        out.push('\n');
        if !self.label_names.is_empty() {
            out.push_str("labels:");
            for l in &self.label_names {
                out.push(' ');
                out.push_str(l);
            }
            out.push('\n');
        }
        for &(p, a, q) in &self.transitions {
            out.push_str(&format!(
                "trans: {} {} {}\n",
                self.state_name(p),
                self.label_name(a),
                self.state_name(q)
            ));
        }
        if !self.diverging.is_empty() {
            out.push_str("diverge:");
            for p in self.diverging.iter() {
                out.push(' ');
                out.push_str(self.state_name(p));
            }
            out.push('\n');
        }
        for &(a, b) in &self.label_preorder {
            out.push_str(&format!(
                "labelle: {} {}\n",
                self.label_name(a),
                self.label_name(b)
            ));
        }
        for i in self.agents() {
            if self.agent_pairs[i.0].is_empty() {
                // a reflexive pair declares an agent whose relation is identity
                out.push_str(&format!(
                    "agent: {} {} {}\n",
                    self.agent_name(i),
                    self.state_name(StateId(0)),
                    self.state_name(StateId(0))
                ));
                continue;
            }
            for &(p, q) in &self.agent_pairs[i.0] {
                out.push_str(&format!(
                    "agent: {} {} {}\n",
                    self.agent_name(i),
                    self.state_name(p),
                    self.state_name(q)
                ));
            }
        }
        out
    }
}

/// Incremental construction by name, for tests and embedders.
#[derive(Default, Clone)]
pub struct LtsBuilder {
    states: Vec<String>,
    labels: Vec<String>,
    agents: Vec<String>,
    transitions: Vec<(String, String, String)>,
    diverging: Vec<String>,
    preorder: Vec<(String, String)>,
    agent_pairs: Vec<(String, String, String)>,
}

impl LtsBuilder {
    pub fn new() -> Self {
        LtsBuilder::default()
    }

    pub fn states<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        self.states.extend(names.into_iter().map(String::from));
        self
    }

    pub fn labels<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        self.labels.extend(names.into_iter().map(String::from));
        self
    }

    pub fn trans(mut self, p: &str, a: &str, q: &str) -> Self {
        self.transitions
            .push((p.to_string(), a.to_string(), q.to_string()));
        self
    }

    pub fn diverging(mut self, p: &str) -> Self {
        self.diverging.push(p.to_string());
        self
    }

    /// Adds the pair `a` below `b` to the label preorder.
    pub fn label_leq(mut self, a: &str, b: &str) -> Self {
        self.preorder.push((a.to_string(), b.to_string()));
        self
    }

    /// Adds one stored pair to agent `i`'s relation, declaring `i` on first
    /// use. The pair is kept as given; add both directions for symmetry.
    /// A reflexive pair declares the agent without storing anything, since
    /// reflexivity is implicit.
    pub fn agent_pair(mut self, i: &str, p: &str, q: &str) -> Self {
        if !self.agents.iter().any(|x| x == i) {
            self.agents.push(i.to_string());
        }
        self.agent_pairs
            .push((i.to_string(), p.to_string(), q.to_string()));
        self
    }

    pub fn build(self) -> Result<Lts, LtsError> {
        let state_ix: BTreeMap<&str, usize> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let label_ix: BTreeMap<&str, usize> = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let agent_ix: BTreeMap<&str, usize> = self
            .agents
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let state = |name: &str| {
            state_ix
                .get(name)
                .copied()
                .map(StateId)
                .ok_or_else(|| LtsError::Undeclared {
                    line: 0,
                    kind: "state",
                    name: name.to_string(),
                })
        };
        let label = |name: &str| {
            label_ix
                .get(name)
                .copied()
                .map(LabelId)
                .ok_or_else(|| LtsError::Undeclared {
                    line: 0,
                    kind: "label",
                    name: name.to_string(),
                })
        };
        let mut transitions = BTreeSet::new();
        for (p, a, q) in &self.transitions {
            transitions.insert((state(p)?, label(a)?, state(q)?));
        }
        let mut diverging = BTreeSet::new();
        for p in &self.diverging {
            diverging.insert(state(p)?);
        }
        let mut preorder = BTreeSet::new();
        for (a, b) in &self.preorder {
            preorder.insert((label(a)?, label(b)?));
        }
        let mut pairs = vec![BTreeSet::new(); self.agents.len()];
        for (i, p, q) in &self.agent_pairs {
            let (p, q) = (state(p)?, state(q)?);
            if p != q {
                pairs[agent_ix[i.as_str()]].insert((p, q));
            }
        }
        Lts::from_parts(
            self.states,
            self.labels,
            self.agents,
            transitions,
            diverging,
            preorder,
            pairs,
        )
    }
}

/// Parses the text format. Declarations may appear in any order; references
/// are resolved after all `states:` and `labels:` sections have been read.
pub fn parse_lts(text: &str) -> Result<Lts, LtsError> {
    let mut state_names = Vec::new();
    let mut label_names = Vec::new();
    let mut agent_names: Vec<String> = Vec::new();
    let mut state_ix = BTreeMap::new();
    let mut label_ix = BTreeMap::new();
    let mut agent_ix = BTreeMap::new();

    let lines = || {
        text.lines()
            .enumerate()
            .map(|(i, raw)| (i + 1, raw.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
    };

    for (line, l) in lines() {
        let mut toks = l.split_whitespace();
        match toks.next().unwrap() {
            "states:" => {
                for name in toks {
                    if state_ix
                        .insert(name.to_string(), state_names.len())
                        .is_some()
                    {
                        return Err(LtsError::Duplicate {
                            line,
                            kind: "state",
                            name: name.to_string(),
                        });
                    }
                    state_names.push(name.to_string());
                }
            }
            "labels:" => {
                for name in toks {
                    if label_ix
                        .insert(name.to_string(), label_names.len())
                        .is_some()
                    {
                        return Err(LtsError::Duplicate {
                            line,
                            kind: "label",
                            name: name.to_string(),
                        });
                    }
                    label_names.push(name.to_string());
                }
            }
            "agent:" => {
                if let Some(name) = toks.next() {
                    if !agent_ix.contains_key(name) {
                        agent_ix.insert(name.to_string(), agent_names.len());
                        agent_names.push(name.to_string());
                    }
                }
            }
            "trans:" | "diverge:" | "labelle:" => {}
            kw => {
                return Err(LtsError::Syntax {
                    line,
                    msg: format!("unknown keyword `{kw}`"),
                })
            }
        }
    }
    if state_names.is_empty() {
        return Err(LtsError::NoStates);
    }

    let state = |line: usize, name: &str| {
        state_ix
            .get(name)
            .copied()
            .map(StateId)
            .ok_or(LtsError::Undeclared {
                line,
                kind: "state",
                name: name.to_string(),
            })
    };
    let label = |line: usize, name: &str| {
        label_ix
            .get(name)
            .copied()
            .map(LabelId)
            .ok_or(LtsError::Undeclared {
                line,
                kind: "label",
                name: name.to_string(),
            })
    };

    let mut transitions = BTreeSet::new();
    let mut diverging = BTreeSet::new();
    let mut preorder = BTreeSet::new();
    let mut agent_pairs = vec![BTreeSet::new(); agent_names.len()];

    for (line, l) in lines() {
        let mut toks = l.split_whitespace();
        let kw = toks.next().unwrap();
        let rest: Vec<&str> = toks.collect();
        match kw {
            "trans:" => {
                let [p, a, q] = rest[..] else {
                    return Err(LtsError::Syntax {
                        line,
                        msg: "trans: expects `source label target`".to_string(),
                    });
                };
                transitions.insert((state(line, p)?, label(line, a)?, state(line, q)?));
            }
            "diverge:" => {
                for p in rest {
                    diverging.insert(state(line, p)?);
                }
            }
            "labelle:" => {
                let [a, b] = rest[..] else {
                    return Err(LtsError::Syntax {
                        line,
                        msg: "labelle: expects `below above`".to_string(),
                    });
                };
                preorder.insert((label(line, a)?, label(line, b)?));
            }
            "agent:" => {
                let [i, p, q] = rest[..] else {
                    return Err(LtsError::Syntax {
                        line,
                        msg: "agent: expects `agent state state`".to_string(),
                    });
                };
                let (p, q) = (state(line, p)?, state(line, q)?);
                // reflexive pairs declare the agent but are implicit
                if p != q {
                    agent_pairs[agent_ix[i]].insert((p, q));
                }
            }
            _ => {}
        }
    }

    Lts::from_parts(
        state_names,
        label_names,
        agent_names,
        transitions,
        diverging,
        preorder,
        agent_pairs,
    )
}

/// Parameters for [`random_lts`]. Annotations are drawn only when asked for:
/// `diverge_prob` is the per-state divergence probability, `num_agents`
/// random partitions are generated, and `preorder_pairs = Some(k)` stores the
/// reflexive-transitive closure of k uniformly drawn pairs (so `Some(0)`
/// yields the identity preorder while `None` omits the section).
#[derive(Clone, Debug)]
pub struct RandomLtsConfig {
    pub num_states: usize,
    pub num_labels: usize,
    pub density: f64,
    pub diverge_prob: f64,
    pub num_agents: usize,
    pub preorder_pairs: Option<usize>,
    pub seed: u64,
}

impl RandomLtsConfig {
    /// Bare system without annotations.
    pub fn new(num_states: usize, num_labels: usize, density: f64, seed: u64) -> Self {
        RandomLtsConfig {
            num_states,
            num_labels,
            density,
            diverge_prob: 0.0,
            num_agents: 0,
            preorder_pairs: None,
            seed,
        }
    }
}

/// Reflexive-transitive closure of a square adjacency matrix, in place.
#[allow(clippy::needless_range_loop)]
fn close_reflexive_transitive(reach: &mut [Vec<bool>]) {
    let m = reach.len();
    for a in 0..m {
        reach[a][a] = true;
    }
    for k in 0..m {
        for a in 0..m {
            if reach[a][k] {
                for b in 0..m {
                    if reach[k][b] {
                        reach[a][b] = true;
                    }
                }
            }
        }
    }
}

/// Draws a random annotated LTS. Deterministic in the config, including the
/// seed; the output always validates. Each (source, label, target) triple is
/// a transition with probability `density`, so 0.0 gives the edgeless and
/// 1.0 the complete system.
pub fn random_lts(cfg: &RandomLtsConfig) -> Lts {
    assert!(cfg.num_states >= 1, "need at least one state");
    assert!(cfg.num_labels >= 1, "need at least one label");
    assert!((0.0..=1.0).contains(&cfg.density));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.num_states;
    let m = cfg.num_labels;

    let state_names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let label_names: Vec<String> = (0..m).map(|i| format!("a{i}")).collect();

    let mut transitions = BTreeSet::new();
    for p in 0..n {
        for a in 0..m {
            for q in 0..n {
                if rng.gen::<f64>() < cfg.density {
                    transitions.insert((StateId(p), LabelId(a), StateId(q)));
                }
            }
        }
    }

    let mut diverging = BTreeSet::new();
    for p in 0..n {
        if rng.gen::<f64>() < cfg.diverge_prob {
            diverging.insert(StateId(p));
        }
    }

    let mut preorder = BTreeSet::new();
    if let Some(k) = cfg.preorder_pairs {
        let mut reach = vec![vec![false; m]; m];
        for _ in 0..k {
            let a = rng.gen_range(0..m);
            let b = rng.gen_range(0..m);
            reach[a][b] = true;
        }
        close_reflexive_transitive(&mut reach);
        for (a, row) in reach.iter().enumerate() {
            for (b, &related) in row.iter().enumerate() {
                if related {
                    preorder.insert((LabelId(a), LabelId(b)));
                }
            }
        }
    }

    let agent_names: Vec<String> = (0..cfg.num_agents).map(|i| format!("i{i}")).collect();
    let mut agent_pairs = Vec::with_capacity(cfg.num_agents);
    for _ in 0..cfg.num_agents {
        let blocks = rng.gen_range(1..=n);
        let assignment: Vec<usize> = (0..n).map(|_| rng.gen_range(0..blocks)).collect();
        let mut pairs = BTreeSet::new();
        for p in 0..n {
            for q in 0..n {
                if p != q && assignment[p] == assignment[q] {
                    pairs.insert((StateId(p), StateId(q)));
                }
            }
        }
        agent_pairs.push(pairs);
    }

    Lts::from_parts(
        state_names,
        label_names,
        agent_names,
        transitions,
        diverging,
        preorder,
        agent_pairs,
    )
    .expect("generated parts are structurally valid")
}
