//! Direct relational fixed points, used as an oracle against the formula
//! route.
//!
//! Every step function below is a literal transcription of its defining
//! clauses as nested quantifier loops over [`Lts::has_transition`] and the
//! raw annotation sets. None of the precomputed successor bitsets are used
//! here; the point is to share as little machinery as possible with the
//! formula evaluator so that agreement between the two routes means
//! something.

use rand::Rng;

use crate::logic::Environment;
use crate::lts::{Lts, StateId};
use crate::semantics::Semantics;
use crate::set::StateSet;

/// A binary relation over the states of one LTS, as a square bitset.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Relation {
    rows: Vec<StateSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Relation {
        Relation {
            rows: vec![StateSet::empty(n); n],
        }
    }

    pub fn full(n: usize) -> Relation {
        Relation {
            rows: vec![StateSet::full(n); n],
        }
    }

    pub fn from_pairs(n: usize, pairs: &[(StateId, StateId)]) -> Relation {
        let mut r = Relation::empty(n);
        for &(p, q) in pairs {
            r.insert(p, q);
        }
        r
    }

    /// Each pair is present independently with probability `density`.
    pub fn random(n: usize, density: f64, rng: &mut impl Rng) -> Relation {
        let mut r = Relation::empty(n);
        for p in 0..n {
            for q in 0..n {
                if rng.gen::<f64>() < density {
                    r.insert(StateId(p), StateId(q));
                }
            }
        }
        r
    }

    pub fn universe(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, p: StateId, q: StateId) -> bool {
        self.rows[p.0].contains(q)
    }

    pub fn insert(&mut self, p: StateId, q: StateId) {
        self.rows[p.0].insert(q);
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(StateSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(StateSet::is_empty)
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows
            .iter()
            .zip(&other.rows)
            .all(|(a, b)| a.is_subset(b))
    }

    pub fn inverse(&self) -> Relation {
        let n = self.universe();
        let mut out = Relation::empty(n);
        for (p, q) in self.iter_pairs() {
            out.insert(q, p);
        }
        out
    }

    pub fn intersection(&self, other: &Relation) -> Relation {
        assert_eq!(self.universe(), other.universe());
        let mut out = self.clone();
        for (row, other_row) in out.rows.iter_mut().zip(&other.rows) {
            row.intersect_with(other_row);
        }
        out
    }

    /// All q related to p.
    pub fn row(&self, p: StateId) -> &StateSet {
        &self.rows[p.0]
    }

    /// All p related to q.
    pub fn column(&self, q: StateId) -> StateSet {
        let mut out = StateSet::empty(self.universe());
        for p in 0..self.universe() {
            if self.rows[p].contains(q) {
                out.insert(StateId(p));
            }
        }
        out
    }

    pub fn iter_pairs(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(p, row)| row.iter().map(move |q| (StateId(p), q)))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.universe()).all(|p| self.contains(StateId(p), StateId(p)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.iter_pairs().all(|(p, q)| self.contains(q, p))
    }

    pub fn is_transitive(&self) -> bool {
        self.iter_pairs()
            .all(|(p, q)| self.row(q).iter().all(|r| self.contains(p, r)))
    }

    /// The environment that assigns to each variable at state q the set of
    /// states this relation relates to q, for every given namespace.
    pub fn to_environment<S: AsRef<str>>(&self, namespaces: &[S]) -> Environment {
        let n = self.universe();
        let mut env = Environment::bottom(namespaces, n);
        for q in 0..n {
            let col = self.column(StateId(q));
            for ns in namespaces {
                env.assign(ns.as_ref(), StateId(q), col.clone())
                    .expect("domain was just built");
            }
        }
        env
    }

    /// Lines `p q` of state names, sorted by index pair.
    pub fn to_text(&self, lts: &Lts) -> String {
        let mut out = String::new();
        for (p, q) in self.iter_pairs() {
            out.push_str(&format!("{} {}\n", lts.state_name(p), lts.state_name(q)));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// step functions

// For every a and p', p -a-> p' implies some q' with q -a-> q' and (p', q') in s.
fn moves_matched(lts: &Lts, s: &Relation, p: StateId, q: StateId) -> bool {
    for a in lts.labels() {
        for p1 in lts.states() {
            if lts.has_transition(p, a, p1) {
                let mut matched = false;
                for q1 in lts.states() {
                    if lts.has_transition(q, a, q1) && s.contains(p1, q1) {
                        matched = true;
                        break;
                    }
                }
                if !matched {
                    return false;
                }
            }
        }
    }
    true
}

// For every a and q', q -a-> q' implies some p' with p -a-> p' and (p', q') in s.
fn comoves_matched(lts: &Lts, s: &Relation, p: StateId, q: StateId) -> bool {
    for a in lts.labels() {
        for q1 in lts.states() {
            if lts.has_transition(q, a, q1) {
                let mut matched = false;
                for p1 in lts.states() {
                    if lts.has_transition(p, a, p1) && s.contains(p1, q1) {
                        matched = true;
                        break;
                    }
                }
                if !matched {
                    return false;
                }
            }
        }
    }
    true
}

// For every a and p', p' -a-> p implies some q' with q' -a-> q and (p', q') in s.
fn back_moves_matched(lts: &Lts, s: &Relation, p: StateId, q: StateId) -> bool {
    for a in lts.labels() {
        for p1 in lts.states() {
            if lts.has_transition(p1, a, p) {
                let mut matched = false;
                for q1 in lts.states() {
                    if lts.has_transition(q1, a, q) && s.contains(p1, q1) {
                        matched = true;
                        break;
                    }
                }
                if !matched {
                    return false;
                }
            }
        }
    }
    true
}

// For every a and q', q' -a-> q implies some p' with p' -a-> p and (p', q') in s.
fn back_comoves_matched(lts: &Lts, s: &Relation, p: StateId, q: StateId) -> bool {
    for a in lts.labels() {
        for q1 in lts.states() {
            if lts.has_transition(q1, a, q) {
                let mut matched = false;
                for p1 in lts.states() {
                    if lts.has_transition(p1, a, p) && s.contains(p1, q1) {
                        matched = true;
                        break;
                    }
                }
                if !matched {
                    return false;
                }
            }
        }
    }
    true
}

// For every agent i and p' with p =i= p', some q' with q =i= q' and (p', q') in s.
fn agent_moves_matched(lts: &Lts, s: &Relation, p: StateId, q: StateId) -> bool {
    for i in lts.agents() {
        for p1 in lts.states() {
            if lts.agent_related(i, p, p1) {
                let mut matched = false;
                for q1 in lts.states() {
                    if lts.agent_related(i, q, q1) && s.contains(p1, q1) {
                        matched = true;
                        break;
                    }
                }
                if !matched {
                    return false;
                }
            }
        }
    }
    true
}

// For every agent i and q' with q =i= q', some p' with p =i= p' and (p', q') in s.
fn agent_comoves_matched(lts: &Lts, s: &Relation, p: StateId, q: StateId) -> bool {
    for i in lts.agents() {
        for q1 in lts.states() {
            if lts.agent_related(i, q, q1) {
                let mut matched = false;
                for p1 in lts.states() {
                    if lts.agent_related(i, p, p1) && s.contains(p1, q1) {
                        matched = true;
                        break;
                    }
                }
                if !matched {
                    return false;
                }
            }
        }
    }
    true
}

// Every label enabled at p is enabled at q.
fn enabled_subset(lts: &Lts, p: StateId, q: StateId) -> bool {
    for a in lts.labels() {
        let p_moves = lts.states().any(|p1| lts.has_transition(p, a, p1));
        if p_moves {
            let q_moves = lts.states().any(|q1| lts.has_transition(q, a, q1));
            if !q_moves {
                return false;
            }
        }
    }
    true
}

// For every a and p', p -a-> p' implies some b above a and q' with
// q -b-> q' and (p', q') in s.
fn ext_moves_matched(lts: &Lts, s: &Relation, p: StateId, q: StateId) -> bool {
    for a in lts.labels() {
        for p1 in lts.states() {
            if lts.has_transition(p, a, p1) {
                let mut matched = false;
                'find: for b in lts.labels() {
                    if lts.label_leq(a, b) {
                        for q1 in lts.states() {
                            if lts.has_transition(q, b, q1) && s.contains(p1, q1) {
                                matched = true;
                                break 'find;
                            }
                        }
                    }
                }
                if !matched {
                    return false;
                }
            }
        }
    }
    true
}

// For every a and q', q -a-> q' implies some b above a and p' with
// p -b-> p' and (p', q') in s.
fn ext_comoves_matched(lts: &Lts, s: &Relation, p: StateId, q: StateId) -> bool {
    for a in lts.labels() {
        for q1 in lts.states() {
            if lts.has_transition(q, a, q1) {
                let mut matched = false;
                'find: for b in lts.labels() {
                    if lts.label_leq(a, b) {
                        for p1 in lts.states() {
                            if lts.has_transition(p, b, p1) && s.contains(p1, q1) {
                                matched = true;
                                break 'find;
                            }
                        }
                    }
                }
                if !matched {
                    return false;
                }
            }
        }
    }
    true
}

// Per label: q's moves are matched by p, and when q converges, p converges
// and p's moves are matched by q. With no labels at all every pair is in.
fn prebis_ok(lts: &Lts, s: &Relation, p: StateId, q: StateId) -> bool {
    for a in lts.labels() {
        for q1 in lts.states() {
            if lts.has_transition(q, a, q1) {
                let mut matched = false;
                for p1 in lts.states() {
                    if lts.has_transition(p, a, p1) && s.contains(p1, q1) {
                        matched = true;
                        break;
                    }
                }
                if !matched {
                    return false;
                }
            }
        }
        if !lts.is_diverging(q) {
            if lts.is_diverging(p) {
                return false;
            }
            for p1 in lts.states() {
                if lts.has_transition(p, a, p1) {
                    let mut matched = false;
                    for q1 in lts.states() {
                        if lts.has_transition(q, a, q1) && s.contains(p1, q1) {
                            matched = true;
                            break;
                        }
                    }
                    if !matched {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// One application of the semantics' defining clauses to `s`.
///
/// Panics for [`Semantics::SimEq`], which has no step function; its fixed
/// point is the intersection computed by [`gfp`].
pub fn step(sem: Semantics, lts: &Lts, s: &Relation) -> Relation {
    assert!(
        sem.has_step(),
        "{sem} has no step function; use gfp directly"
    );
    assert_eq!(s.universe(), lts.num_states());
    let mut out = Relation::empty(lts.num_states());
    for p in lts.states() {
        for q in lts.states() {
            let keep = match sem {
                Semantics::SimLeq => moves_matched(lts, s, p, q),
                Semantics::SimGeq => comoves_matched(lts, s, p, q),
                Semantics::Bisim => moves_matched(lts, s, p, q) && comoves_matched(lts, s, p, q),
                Semantics::ReadySim => comoves_matched(lts, s, p, q) && enabled_subset(lts, p, q),
                Semantics::Bfb => {
                    moves_matched(lts, s, p, q)
                        && comoves_matched(lts, s, p, q)
                        && back_moves_matched(lts, s, p, q)
                        && back_comoves_matched(lts, s, p, q)
                }
                Semantics::Bfbid => {
                    moves_matched(lts, s, p, q)
                        && comoves_matched(lts, s, p, q)
                        && back_moves_matched(lts, s, p, q)
                        && back_comoves_matched(lts, s, p, q)
                        && agent_moves_matched(lts, s, p, q)
                        && agent_comoves_matched(lts, s, p, q)
                }
                Semantics::Prebis => prebis_ok(lts, s, p, q),
                Semantics::ExtLeq => ext_moves_matched(lts, s, p, q),
                Semantics::ExtGeq => ext_comoves_matched(lts, s, p, q),
                Semantics::SimEq => unreachable!(),
            };
            if keep {
                out.insert(p, q);
            }
        }
    }
    out
}

type StepFn = Box<dyn Fn(&Lts, &Relation) -> Relation + Send + Sync>;

/// A monotone endofunction on relations, closed under the inversion
/// combinator [`StepFunction::star`].
pub struct StepFunction {
    f: StepFn,
}

impl StepFunction {
    pub fn of(sem: Semantics) -> StepFunction {
        assert!(sem.has_step(), "{sem} has no step function");
        StepFunction {
            f: Box::new(move |lts, s| step(sem, lts, s)),
        }
    }

    /// The inverse-image function: star(F)(S) = inverse(F(inverse(S))).
    /// Its fixed points are exactly the inverses of F's.
    pub fn star(self) -> StepFunction {
        StepFunction {
            f: Box::new(move |lts, s| (self.f)(lts, &s.inverse()).inverse()),
        }
    }

    pub fn apply(&self, lts: &Lts, s: &Relation) -> Relation {
        (self.f)(lts, s)
    }
}

/// `star(sem)` as a value; see [`StepFunction::star`].
pub fn star(sem: Semantics) -> StepFunction {
    StepFunction::of(sem).star()
}

/// Greatest fixed point by descent from the full relation. Asserts the
/// chain actually descends each round; stabilizes within n*n steps.
pub fn gfp_of(f: &StepFunction, lts: &Lts) -> Relation {
    let mut cur = Relation::full(lts.num_states());
    loop {
        let next = f.apply(lts, &cur);
        assert!(next.is_subset(&cur), "step function is not descending");
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Least fixed point by ascent from the empty relation.
pub fn lfp_of(f: &StepFunction, lts: &Lts) -> Relation {
    let mut cur = Relation::empty(lts.num_states());
    loop {
        let next = f.apply(lts, &cur);
        assert!(cur.is_subset(&next), "step function is not ascending");
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// The semantics' greatest fixed point. SimEq is the one tag without a step
/// function and is computed as gfp(SimLeq) intersected with its inverse.
pub fn gfp(sem: Semantics, lts: &Lts) -> Relation {
    if sem == Semantics::SimEq {
        let leq = gfp_of(&StepFunction::of(Semantics::SimLeq), lts);
        return leq.intersection(&leq.inverse());
    }
    gfp_of(&StepFunction::of(sem), lts)
}

/// The semantics' least fixed point; panics for SimEq.
pub fn lfp(sem: Semantics, lts: &Lts) -> Relation {
    lfp_of(&StepFunction::of(sem), lts)
}
