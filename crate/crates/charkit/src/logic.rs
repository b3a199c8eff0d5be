//! Recursion-free modal formulae over an LTS, plus recursive declarations
//! (one defining equation per variable) and their environments.
//!
//! The formula language is negation free, so every operator is monotone in
//! the variables and declarations always have least and greatest solutions.
//! Besides the usual forward modalities there are backward modalities over
//! predecessors, agent modalities over indistinguishability classes, and a
//! strict box `[!a]` that additionally demands convergence of the state.
//!
//! # Formula grammar
//!
//! ```text
//! F ::= tt | ff | X(state) | F /\ F | F \/ F
//!     | <a>F | [a]F | <~a>F | [~a]F | <i:agent>F | [i:agent]F | [!a]F
//!     | ( F )
//! ```
//!
//! `/\` binds tighter than `\/`, modalities bind tightest, both connectives
//! are left associative and parsed into n-ary nodes.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::lts::{AgentId, LabelId, Lts, StateId};
use crate::set::StateSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LogicError {
    #[error("unknown variable `{namespace}` at state index {state}")]
    UnknownVariable { namespace: String, state: usize },
    #[error("label index {0} out of range for this LTS")]
    LabelOutOfRange(usize),
    #[error("agent index {0} out of range for this LTS")]
    AgentOutOfRange(usize),
    #[error("environments or declarations disagree on their domain")]
    DomainMismatch,
    #[error("strict box requires a forward label")]
    StrictNonForward,
    #[error("malformed declaration: {0}")]
    Shape(String),
}

/// What a modality quantifies over.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum ModKind {
    /// Successors under a label.
    Forward(LabelId),
    /// Predecessors under a label.
    Backward(LabelId),
    /// The indistinguishability class of an agent.
    Agent(AgentId),
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum ModFlavor {
    /// Some target satisfies the body.
    Diamond,
    /// Every target satisfies the body.
    Box,
    /// Every target satisfies the body and the state converges.
    StrictBox,
}

/// A modality; the strict box only combines with forward labels, which the
/// constructors enforce.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct Modality {
    kind: ModKind,
    flavor: ModFlavor,
}

impl Modality {
    pub fn new(flavor: ModFlavor, kind: ModKind) -> Result<Modality, LogicError> {
        if flavor == ModFlavor::StrictBox && !matches!(kind, ModKind::Forward(_)) {
            return Err(LogicError::StrictNonForward);
        }
        Ok(Modality { kind, flavor })
    }

    pub fn diamond(a: LabelId) -> Modality {
        Modality {
            kind: ModKind::Forward(a),
            flavor: ModFlavor::Diamond,
        }
    }

    pub fn box_(a: LabelId) -> Modality {
        Modality {
            kind: ModKind::Forward(a),
            flavor: ModFlavor::Box,
        }
    }

    pub fn strict_box(a: LabelId) -> Modality {
        Modality {
            kind: ModKind::Forward(a),
            flavor: ModFlavor::StrictBox,
        }
    }

    pub fn back_diamond(a: LabelId) -> Modality {
        Modality {
            kind: ModKind::Backward(a),
            flavor: ModFlavor::Diamond,
        }
    }

    pub fn back_box(a: LabelId) -> Modality {
        Modality {
            kind: ModKind::Backward(a),
            flavor: ModFlavor::Box,
        }
    }

    pub fn agent_diamond(i: AgentId) -> Modality {
        Modality {
            kind: ModKind::Agent(i),
            flavor: ModFlavor::Diamond,
        }
    }

    pub fn agent_box(i: AgentId) -> Modality {
        Modality {
            kind: ModKind::Agent(i),
            flavor: ModFlavor::Box,
        }
    }

    pub fn kind(self) -> ModKind {
        self.kind
    }

    pub fn flavor(self) -> ModFlavor {
        self.flavor
    }
}

/// A declaration variable: a namespace token indexed by a state.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VarId {
    pub namespace: String,
    pub state: StateId,
}

impl VarId {
    pub fn new(namespace: &str, state: StateId) -> VarId {
        VarId {
            namespace: namespace.to_string(),
            state,
        }
    }
}

/// A modal formula. `And`/`Or` are n-ary; the empty conjunction means `tt`
/// and the empty disjunction `ff`. There is no negation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Formula {
    True,
    False,
    Var(VarId),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Modal(Modality, Box<Formula>),
}

impl Formula {
    pub fn var(namespace: &str, state: StateId) -> Formula {
        Formula::Var(VarId::new(namespace, state))
    }

    pub fn modal(m: Modality, body: Formula) -> Formula {
        Formula::Modal(m, Box::new(body))
    }

    /// All variables occurring in the formula, in syntactic order.
    pub fn variables(&self) -> Vec<&VarId> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a VarId>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Var(v) => out.push(v),
            Formula::And(cs) | Formula::Or(cs) => {
                for c in cs {
                    c.collect_vars(out);
                }
            }
            Formula::Modal(_, body) => body.collect_vars(out),
        }
    }
}

/// Which fixed point of a declaration is meant.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum FixMode {
    Max,
    Min,
}

impl fmt::Display for FixMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FixMode::Max => "max",
            FixMode::Min => "min",
        })
    }
}

impl FromStr for FixMode {
    type Err = LogicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max" => Ok(FixMode::Max),
            "min" => Ok(FixMode::Min),
            other => Err(LogicError::Shape(format!("unknown mode `{other}`"))),
        }
    }
}

/// Assigns a state set to every variable of a fixed domain: the declared
/// namespaces crossed with all states of one LTS.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Environment {
    namespaces: Vec<String>,
    num_states: usize,
    sets: Vec<Vec<StateSet>>,
}

impl Environment {
    pub fn top<S: AsRef<str>>(namespaces: &[S], num_states: usize) -> Environment {
        Environment::uniform(namespaces, num_states, StateSet::full(num_states))
    }

    pub fn bottom<S: AsRef<str>>(namespaces: &[S], num_states: usize) -> Environment {
        Environment::uniform(namespaces, num_states, StateSet::empty(num_states))
    }

    fn uniform<S: AsRef<str>>(namespaces: &[S], num_states: usize, fill: StateSet) -> Environment {
        Environment {
            namespaces: namespaces.iter().map(|s| s.as_ref().to_string()).collect(),
            num_states,
            sets: vec![vec![fill; num_states]; namespaces.len()],
        }
    }

    pub fn namespaces(&self) -> &[String] {
        &self.namespaces
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    fn ns_index(&self, ns: &str) -> Option<usize> {
        self.namespaces.iter().position(|x| x == ns)
    }

    pub fn get(&self, v: &VarId) -> Result<&StateSet, LogicError> {
        self.get_var(&v.namespace, v.state)
    }

    pub fn get_var(&self, ns: &str, q: StateId) -> Result<&StateSet, LogicError> {
        let unknown = || LogicError::UnknownVariable {
            namespace: ns.to_string(),
            state: q.0,
        };
        if q.0 >= self.num_states {
            return Err(unknown());
        }
        let i = self.ns_index(ns).ok_or_else(unknown)?;
        Ok(&self.sets[i][q.0])
    }

    pub fn assign(&mut self, ns: &str, q: StateId, value: StateSet) -> Result<(), LogicError> {
        assert_eq!(value.universe(), self.num_states);
        let unknown = || LogicError::UnknownVariable {
            namespace: ns.to_string(),
            state: q.0,
        };
        if q.0 >= self.num_states {
            return Err(unknown());
        }
        let i = self.ns_index(ns).ok_or_else(unknown)?;
        self.sets[i][q.0] = value;
        Ok(())
    }

    /// Pointwise inclusion over the shared domain.
    pub fn leq(&self, other: &Environment) -> Result<bool, LogicError> {
        if self.namespaces != other.namespaces || self.num_states != other.num_states {
            return Err(LogicError::DomainMismatch);
        }
        for (mine, theirs) in self.sets.iter().zip(&other.sets) {
            for (a, b) in mine.iter().zip(theirs) {
                if !a.is_subset(b) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// A recursive declaration: one body per variable of its domain. Closed and
/// total by construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Declaration {
    namespaces: Vec<String>,
    num_states: usize,
    bodies: Vec<Vec<Formula>>,
}

impl Declaration {
    /// `bodies[i][q]` defines variable `namespaces[i]` at state `q`. Fails if
    /// the shape does not match or some body mentions a variable outside the
    /// domain.
    pub fn new(
        namespaces: Vec<String>,
        num_states: usize,
        bodies: Vec<Vec<Formula>>,
    ) -> Result<Declaration, LogicError> {
        if namespaces.is_empty() {
            return Err(LogicError::Shape("no namespaces".to_string()));
        }
        for (i, ns) in namespaces.iter().enumerate() {
            if ns.is_empty() || namespaces[..i].contains(ns) {
                return Err(LogicError::Shape(format!("bad namespace `{ns}`")));
            }
        }
        if bodies.len() != namespaces.len() || bodies.iter().any(|b| b.len() != num_states) {
            return Err(LogicError::Shape(
                "bodies do not cover the declared domain".to_string(),
            ));
        }
        for body in bodies.iter().flatten() {
            for v in body.variables() {
                if v.state.0 >= num_states || !namespaces.contains(&v.namespace) {
                    return Err(LogicError::UnknownVariable {
                        namespace: v.namespace.clone(),
                        state: v.state.0,
                    });
                }
            }
        }
        Ok(Declaration {
            namespaces,
            num_states,
            bodies,
        })
    }

    pub fn namespaces(&self) -> &[String] {
        &self.namespaces
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn body(&self, ns: &str, q: StateId) -> Option<&Formula> {
        let i = self.namespaces.iter().position(|x| x == ns)?;
        self.bodies.get(i)?.get(q.0)
    }

    /// One simultaneous evaluation of every body under `env`.
    pub fn apply(&self, lts: &Lts, env: &Environment) -> Result<Environment, LogicError> {
        if env.namespaces() != self.namespaces || env.num_states() != self.num_states {
            return Err(LogicError::DomainMismatch);
        }
        let mut out = Environment::bottom(&self.namespaces, self.num_states);
        for (i, ns) in self.namespaces.iter().enumerate() {
            for q in 0..self.num_states {
                let value = eval(&self.bodies[i][q], lts, env)?;
                out.assign(ns, StateId(q), value)?;
            }
        }
        Ok(out)
    }
}

/// The set of states satisfying `f` under `env`, as one bottom-up pass.
pub fn eval(f: &Formula, lts: &Lts, env: &Environment) -> Result<StateSet, LogicError> {
    if env.num_states() != lts.num_states() {
        return Err(LogicError::DomainMismatch);
    }
    eval_inner(f, lts, env)
}

fn eval_inner(f: &Formula, lts: &Lts, env: &Environment) -> Result<StateSet, LogicError> {
    let n = lts.num_states();
    Ok(match f {
        Formula::True => StateSet::full(n),
        Formula::False => StateSet::empty(n),
        Formula::Var(v) => env.get(v)?.clone(),
        Formula::And(cs) => {
            let mut acc = StateSet::full(n);
            for c in cs {
                acc.intersect_with(&eval_inner(c, lts, env)?);
            }
            acc
        }
        Formula::Or(cs) => {
            let mut acc = StateSet::empty(n);
            for c in cs {
                acc.union_with(&eval_inner(c, lts, env)?);
            }
            acc
        }
        Formula::Modal(m, body) => {
            check_kind(lts, m.kind())?;
            let body_set = eval_inner(body, lts, env)?;
            let mut acc = StateSet::empty(n);
            for p in lts.states() {
                let targets = target_set(lts, m.kind(), p);
                let holds = match m.flavor() {
                    ModFlavor::Diamond => targets.intersects(&body_set),
                    ModFlavor::Box => targets.is_subset(&body_set),
                    ModFlavor::StrictBox => !lts.is_diverging(p) && targets.is_subset(&body_set),
                };
                if holds {
                    acc.insert(p);
                }
            }
            acc
        }
    })
}

fn check_kind(lts: &Lts, kind: ModKind) -> Result<(), LogicError> {
    match kind {
        ModKind::Forward(a) | ModKind::Backward(a) if a.0 >= lts.num_labels() => {
            Err(LogicError::LabelOutOfRange(a.0))
        }
        ModKind::Agent(i) if i.0 >= lts.num_agents() => Err(LogicError::AgentOutOfRange(i.0)),
        _ => Ok(()),
    }
}

fn target_set(lts: &Lts, kind: ModKind, p: StateId) -> &StateSet {
    match kind {
        ModKind::Forward(a) => lts.successors(p, a),
        ModKind::Backward(a) => lts.predecessors(p, a),
        ModKind::Agent(i) => lts.agent_class(i, p),
    }
}

/// Pointwise satisfaction, recursing over the formula at a single state.
///
/// Implemented independently of [`eval`] (clause by clause, not set valued)
/// so the two can be tested against each other; the contract is
/// `satisfies(lts, env, p, f) == eval(f, lts, env).contains(p)`.
pub fn satisfies(
    lts: &Lts,
    env: &Environment,
    p: StateId,
    f: &Formula,
) -> Result<bool, LogicError> {
    if env.num_states() != lts.num_states() {
        return Err(LogicError::DomainMismatch);
    }
    satisfies_inner(lts, env, p, f)
}

fn satisfies_inner(
    lts: &Lts,
    env: &Environment,
    p: StateId,
    f: &Formula,
) -> Result<bool, LogicError> {
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Var(v) => env.get(v)?.contains(p),
        Formula::And(cs) => {
            for c in cs {
                if !satisfies_inner(lts, env, p, c)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(cs) => {
            for c in cs {
                if satisfies_inner(lts, env, p, c)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Modal(m, body) => {
            check_kind(lts, m.kind())?;
            let targets = target_set(lts, m.kind(), p);
            match m.flavor() {
                ModFlavor::Diamond => {
                    let mut found = false;
                    for t in targets.iter() {
                        if satisfies_inner(lts, env, t, body)? {
                            found = true;
                            break;
                        }
                    }
                    found
                }
                ModFlavor::Box | ModFlavor::StrictBox => {
                    if m.flavor() == ModFlavor::StrictBox && lts.is_diverging(p) {
                        return Ok(false);
                    }
                    let mut all = true;
                    for t in targets.iter() {
                        if !satisfies_inner(lts, env, t, body)? {
                            all = false;
                            break;
                        }
                    }
                    all
                }
            }
        }
    })
}

// ---------------------------------------------------------------------------
// printing

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Or,
    And,
    Unary,
}

/// Renders a formula in the concrete grammar with minimal parentheses.
/// Deterministic; parsing the output restores the formula provided it has no
/// empty or single-child connectives (those print as their collapsed form).
pub fn print_formula(lts: &Lts, f: &Formula) -> String {
    let mut out = String::new();
    write_formula(lts, f, Prec::Or, &mut out);
    out
}

fn write_formula(lts: &Lts, f: &Formula, ctx: Prec, out: &mut String) {
    match f {
        Formula::True => out.push_str("tt"),
        Formula::False => out.push_str("ff"),
        Formula::Var(v) => {
            out.push_str(&v.namespace);
            out.push('(');
            out.push_str(lts.state_name(v.state));
            out.push(')');
        }
        Formula::And(cs) => match cs.len() {
            0 => out.push_str("tt"),
            1 => write_formula(lts, &cs[0], ctx, out),
            _ => {
                let parens = Prec::And < ctx;
                if parens {
                    out.push('(');
                }
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" /\\ ");
                    }
                    write_formula(lts, c, Prec::Unary, out);
                }
                if parens {
                    out.push(')');
                }
            }
        },
        Formula::Or(cs) => match cs.len() {
            0 => out.push_str("ff"),
            1 => write_formula(lts, &cs[0], ctx, out),
            _ => {
                let parens = Prec::Or < ctx;
                if parens {
                    out.push('(');
                }
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" \\/ ");
                    }
                    write_formula(lts, c, Prec::And, out);
                }
                if parens {
                    out.push(')');
                }
            }
        },
        Formula::Modal(m, body) => {
            let (open, close) = match m.flavor() {
                ModFlavor::Diamond => ('<', '>'),
                ModFlavor::Box | ModFlavor::StrictBox => ('[', ']'),
            };
            out.push(open);
            if m.flavor() == ModFlavor::StrictBox {
                out.push('!');
            }
            match m.kind() {
                ModKind::Forward(a) => out.push_str(lts.label_name(a)),
                ModKind::Backward(a) => {
                    out.push('~');
                    out.push_str(lts.label_name(a));
                }
                ModKind::Agent(i) => {
                    out.push_str("i:");
                    out.push_str(lts.agent_name(i));
                }
            }
            out.push(close);
            write_formula(lts, body, Prec::Unary, out);
        }
    }
}

// ---------------------------------------------------------------------------
// parsing

#[derive(Debug, Error, PartialEq, Eq)]
#[error("at byte {pos}: {msg}")]
pub struct FormulaParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, PartialEq)]
enum Tok {
    TT,
    FF,
    And,
    Or,
    LParen,
    RParen,
    Ident(String),
    Bracket { open: char, body: String },
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '\'' | '-')
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaParseError> {
    let mut toks = Vec::new();
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < bytes.len() {
        let (pos, c) = bytes[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                toks.push((pos, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((pos, Tok::RParen));
                i += 1;
            }
            '/' => {
                if bytes.get(i + 1).map(|&(_, c)| c) != Some('\\') {
                    return Err(FormulaParseError {
                        pos,
                        msg: "expected `/\\`".to_string(),
                    });
                }
                toks.push((pos, Tok::And));
                i += 2;
            }
            '\\' => {
                if bytes.get(i + 1).map(|&(_, c)| c) != Some('/') {
                    return Err(FormulaParseError {
                        pos,
                        msg: "expected `\\/`".to_string(),
                    });
                }
                toks.push((pos, Tok::Or));
                i += 2;
            }
            '<' | '[' => {
                let close = if c == '<' { '>' } else { ']' };
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].1 != close {
                    j += 1;
                }
                if j == bytes.len() {
                    return Err(FormulaParseError {
                        pos,
                        msg: format!("unclosed modality, missing `{close}`"),
                    });
                }
                let body: String = bytes[i + 1..j].iter().map(|&(_, c)| c).collect();
                toks.push((pos, Tok::Bracket { open: c, body }));
                i = j + 1;
            }
            c if is_ident_char(c) => {
                let mut j = i;
                while j < bytes.len() && is_ident_char(bytes[j].1) {
                    j += 1;
                }
                let word: String = bytes[i..j].iter().map(|&(_, c)| c).collect();
                let tok = match word.as_str() {
                    "tt" => Tok::TT,
                    "ff" => Tok::FF,
                    _ => Tok::Ident(word),
                };
                toks.push((pos, tok));
                i = j;
            }
            c => {
                return Err(FormulaParseError {
                    pos,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(toks)
}

struct FormulaParser<'a> {
    lts: &'a Lts,
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl<'a> FormulaParser<'a> {
    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T, FormulaParseError> {
        Err(FormulaParseError {
            pos,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|&(p, _)| p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<(usize, Tok)> {
        if self.at < self.toks.len() {
            let pair = std::mem::replace(&mut self.toks[self.at], (0, Tok::TT));
            self.at += 1;
            Some(pair)
        } else {
            None
        }
    }

    fn parse_or(&mut self) -> Result<Formula, FormulaParseError> {
        let mut parts = vec![self.parse_and()?];
        while self.peek() == Some(&Tok::Or) {
            self.next();
            parts.push(self.parse_and()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        })
    }

    fn parse_and(&mut self) -> Result<Formula, FormulaParseError> {
        let mut parts = vec![self.parse_unary()?];
        while self.peek() == Some(&Tok::And) {
            self.next();
            parts.push(self.parse_unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        })
    }

    fn parse_unary(&mut self) -> Result<Formula, FormulaParseError> {
        if let Some(Tok::Bracket { .. }) = self.peek() {
            let (pos, tok) = self.next().unwrap();
            let Tok::Bracket { open, body } = tok else {
                unreachable!()
            };
            let m = self.modality(pos, open, &body)?;
            let child = self.parse_unary()?;
            return Ok(Formula::modal(m, child));
        }
        self.parse_atom()
    }

    fn modality(&self, pos: usize, open: char, body: &str) -> Result<Modality, FormulaParseError> {
        let body = body.trim();
        if body.is_empty() {
            return self.err(pos, "empty modality");
        }
        if body.chars().any(char::is_whitespace) {
            return self.err(pos, "modality names contain no whitespace");
        }
        let diamond = open == '<';
        if let Some(rest) = body.strip_prefix('!') {
            if diamond {
                return self.err(pos, "strict modality must be a box");
            }
            if rest.starts_with('~') || rest.starts_with("i:") {
                return self.err(pos, "strict box applies to forward labels only");
            }
            let a = self.label(pos, rest)?;
            return Ok(Modality::strict_box(a));
        }
        if let Some(rest) = body.strip_prefix('~') {
            let a = self.label(pos, rest)?;
            return Ok(if diamond {
                Modality::back_diamond(a)
            } else {
                Modality::back_box(a)
            });
        }
        if let Some(rest) = body.strip_prefix("i:") {
            let i = match self.lts.agent_by_name(rest) {
                Some(i) => i,
                None => return self.err(pos, format!("undeclared agent `{rest}`")),
            };
            return Ok(if diamond {
                Modality::agent_diamond(i)
            } else {
                Modality::agent_box(i)
            });
        }
        let a = self.label(pos, body)?;
        Ok(if diamond {
            Modality::diamond(a)
        } else {
            Modality::box_(a)
        })
    }

    fn label(&self, pos: usize, name: &str) -> Result<LabelId, FormulaParseError> {
        match self.lts.label_by_name(name) {
            Some(a) => Ok(a),
            None => self.err(pos, format!("undeclared label `{name}`")),
        }
    }

    fn parse_atom(&mut self) -> Result<Formula, FormulaParseError> {
        let pos = self.pos();
        match self.next() {
            Some((_, Tok::TT)) => Ok(Formula::True),
            Some((_, Tok::FF)) => Ok(Formula::False),
            Some((_, Tok::LParen)) => {
                let inner = self.parse_or()?;
                match self.next() {
                    Some((_, Tok::RParen)) => Ok(inner),
                    _ => self.err(pos, "unclosed parenthesis"),
                }
            }
            Some((_, Tok::Ident(ns))) => {
                match self.next() {
                    Some((_, Tok::LParen)) => {}
                    _ => return self.err(pos, "expected `(` after variable namespace"),
                }
                let state_name = match self.next() {
                    Some((_, Tok::Ident(s))) => s,
                    Some((_, Tok::TT)) => "tt".to_string(),
                    Some((_, Tok::FF)) => "ff".to_string(),
                    _ => return self.err(pos, "expected state name in variable"),
                };
                match self.next() {
                    Some((_, Tok::RParen)) => {}
                    _ => return self.err(pos, "expected `)` after state name"),
                }
                match self.lts.state_by_name(&state_name) {
                    Some(q) => Ok(Formula::var(&ns, q)),
                    None => self.err(pos, format!("undeclared state `{state_name}`")),
                }
            }
            Some((p, tok)) => self.err(p, format!("unexpected token {tok:?}")),
            None => self.err(pos, "unexpected end of formula"),
        }
    }
}

/// Parses the concrete grammar against an LTS (for name resolution).
pub fn parse_formula(lts: &Lts, text: &str) -> Result<Formula, FormulaParseError> {
    let toks = lex(text)?;
    let mut p = FormulaParser {
        lts,
        toks,
        at: 0,
        end: text.len(),
    };
    let f = p.parse_or()?;
    if p.at != p.toks.len() {
        return Err(FormulaParseError {
            pos: p.pos(),
            msg: "trailing input after formula".to_string(),
        });
    }
    Ok(f)
}

// ---------------------------------------------------------------------------
// declaration files

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DeclError {
    #[error("line {line}: {source}")]
    Formula {
        line: usize,
        source: FormulaParseError,
    },
    #[error("line {line}: expected `max X(q) = formula` or `min X(q) = formula`")]
    BadEquation { line: usize },
    #[error("line {line}: mixed max/min modes in one declaration")]
    MixedModes { line: usize },
    #[error("line {line}: duplicate equation for {var}")]
    DuplicateEquation { line: usize, var: String },
    #[error("missing equation for {var}")]
    MissingEquation { var: String },
    #[error("declaration file has no equations")]
    Empty,
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// Parses a declaration file: one `mode X(q) = formula` line per equation,
/// a single shared mode, `#` comment lines ignored. The equations must cover
/// every declared namespace at every state of `lts` exactly once.
pub fn parse_declaration_file(lts: &Lts, text: &str) -> Result<(Declaration, FixMode), DeclError> {
    let mut mode: Option<FixMode> = None;
    let mut namespaces: Vec<String> = Vec::new();
    let mut equations: Vec<(VarId, Formula)> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let (lhs, rhs) = l.split_once('=').ok_or(DeclError::BadEquation { line })?;
        let lhs = lhs.trim();
        let (mode_tok, var_text) = lhs
            .split_once(char::is_whitespace)
            .ok_or(DeclError::BadEquation { line })?;
        let this_mode: FixMode = mode_tok
            .parse()
            .map_err(|_| DeclError::BadEquation { line })?;
        match mode {
            None => mode = Some(this_mode),
            Some(m) if m == this_mode => {}
            Some(_) => return Err(DeclError::MixedModes { line }),
        }
        let head =
            parse_formula(lts, var_text).map_err(|source| DeclError::Formula { line, source })?;
        let Formula::Var(var) = head else {
            return Err(DeclError::BadEquation { line });
        };
        let body = parse_formula(lts, rhs).map_err(|source| DeclError::Formula { line, source })?;
        if equations.iter().any(|(v, _)| *v == var) {
            return Err(DeclError::DuplicateEquation {
                line,
                var: format!("{}({})", var.namespace, lts.state_name(var.state)),
            });
        }
        if !namespaces.contains(&var.namespace) {
            namespaces.push(var.namespace.clone());
        }
        equations.push((var, body));
    }

    let mode = mode.ok_or(DeclError::Empty)?;
    let n = lts.num_states();
    let mut bodies: Vec<Vec<Option<Formula>>> = vec![vec![None; n]; namespaces.len()];
    for (var, body) in equations {
        let i = namespaces.iter().position(|x| *x == var.namespace).unwrap();
        bodies[i][var.state.0] = Some(body);
    }
    let mut filled = Vec::with_capacity(namespaces.len());
    for (ns, slots) in namespaces.iter().zip(bodies) {
        let mut row = Vec::with_capacity(n);
        for (q, slot) in slots.into_iter().enumerate() {
            match slot {
                Some(f) => row.push(f),
                None => {
                    return Err(DeclError::MissingEquation {
                        var: format!("{ns}({})", lts.state_name(StateId(q))),
                    })
                }
            }
        }
        filled.push(row);
    }
    let decl = Declaration::new(namespaces, n, filled)?;
    Ok((decl, mode))
}

/// Renders a declaration in the file format, without any header comment.
pub fn format_declaration_file(lts: &Lts, decl: &Declaration, mode: FixMode) -> String {
    let mut out = String::new();
    for ns in decl.namespaces() {
        for q in lts.states() {
            let body = decl.body(ns, q).expect("declaration is total");
            out.push_str(&format!(
                "{mode} {ns}({}) = {}\n",
                lts.state_name(q),
                print_formula(lts, body)
            ));
        }
    }
    out
}
