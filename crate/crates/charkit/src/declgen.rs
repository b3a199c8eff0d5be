//! Characteristic declarations: for a semantics and a target LTS, one
//! greatest-fixed-point equation per state whose solution decides the
//! relation.
//!
//! Conjunct order is deterministic: labels and agents in declaration order,
//! target states in index order, so generation is byte stable. Empty
//! connectives become `tt`/`ff` and single-child ones collapse to the child;
//! this is a readability choice only and an internal test checks it cannot
//! change any solution.

use thiserror::Error;

use crate::logic::{
    format_declaration_file, Declaration, Environment, FixMode, Formula, LogicError, Modality,
};
use crate::lts::{Lts, StateId};
use crate::oracle::{step, Relation};
use crate::semantics::Semantics;
use crate::solver::{env_to_relation, solve_max, solve_min, SolveError, SolveStats};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("semantics {semantics} needs a nonempty label preorder (labelle: section)")]
    MissingAnnotation { semantics: Semantics },
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// A generated characteristic declaration together with how to query it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GeneratedSystem {
    pub semantics: Semantics,
    pub declaration: Declaration,
    pub mode: FixMode,
}

impl GeneratedSystem {
    /// The formula whose truth at a state p decides whether (p, q) is in the
    /// relation.
    pub fn query(&self, q: StateId) -> Formula {
        match self.semantics {
            Semantics::SimEq => Formula::And(vec![Formula::var("X", q), Formula::var("Y", q)]),
            _ => Formula::var(primary_namespace(self.semantics), q),
        }
    }

    pub fn query_pattern(&self) -> &'static str {
        match self.semantics {
            Semantics::SimEq => "X(q) /\\ Y(q)",
            Semantics::SimGeq | Semantics::ExtGeq => "Y(q)",
            _ => "X(q)",
        }
    }

    /// Declaration file rendering with a generator header.
    pub fn to_file_string(&self, lts: &Lts) -> String {
        format!(
            "# semantics: {}, mode: {}, query: {}\n{}",
            self.semantics,
            self.mode,
            self.query_pattern(),
            format_declaration_file(lts, &self.declaration, self.mode)
        )
    }

    pub fn solve(&self, lts: &Lts, mode: FixMode) -> Result<(Environment, SolveStats), SolveError> {
        match mode {
            FixMode::Max => solve_max(&self.declaration, lts),
            FixMode::Min => solve_min(&self.declaration, lts),
        }
    }

    /// Solves and reads the environment back as a relation: (p, q) is in iff
    /// p satisfies the query at q. SimEq intersects its two projections.
    pub fn relation(&self, lts: &Lts, mode: FixMode) -> Result<(Relation, SolveStats), SolveError> {
        let (env, stats) = self.solve(lts, mode)?;
        Ok((self.relation_of(&env)?, stats))
    }

    /// The relation induced by an already-solved environment.
    pub fn relation_of(&self, env: &Environment) -> Result<Relation, SolveError> {
        match self.semantics {
            Semantics::SimEq => {
                let x = env_to_relation(env, "X")?;
                let y = env_to_relation(env, "Y")?;
                Ok(x.intersection(&y))
            }
            sem => env_to_relation(env, primary_namespace(sem)),
        }
    }
}

fn primary_namespace(sem: Semantics) -> &'static str {
    match sem {
        Semantics::SimGeq | Semantics::ExtGeq => "Y",
        _ => "X",
    }
}

struct Ctx<'a> {
    lts: &'a Lts,
    collapse: bool,
}

impl Ctx<'_> {
    fn and(&self, cs: Vec<Formula>) -> Formula {
        if self.collapse {
            match cs.len() {
                0 => Formula::True,
                1 => cs.into_iter().next().unwrap(),
                _ => Formula::And(cs),
            }
        } else {
            Formula::And(cs)
        }
    }

    fn or(&self, cs: Vec<Formula>) -> Formula {
        if self.collapse {
            match cs.len() {
                0 => Formula::False,
                1 => cs.into_iter().next().unwrap(),
                _ => Formula::Or(cs),
            }
        } else {
            Formula::Or(cs)
        }
    }

    // [a] (one of q's a-successors), conjoined over all labels
    fn fwd_box_group(&self, ns: &str, q: StateId) -> Formula {
        self.and(
            self.lts
                .labels()
                .map(|a| {
                    let succs = self.lts.successors(q, a).iter();
                    Formula::modal(
                        Modality::box_(a),
                        self.or(succs.map(|q1| Formula::var(ns, q1)).collect()),
                    )
                })
                .collect(),
        )
    }

    // <a> per a-successor of q, conjoined over all pairs
    fn fwd_dia_group(&self, ns: &str, q: StateId) -> Formula {
        self.and(
            self.lts
                .labels()
                .flat_map(|a| {
                    self.lts
                        .successors(q, a)
                        .iter()
                        .map(move |q1| Formula::modal(Modality::diamond(a), Formula::var(ns, q1)))
                })
                .collect(),
        )
    }

    fn bwd_box_group(&self, ns: &str, q: StateId) -> Formula {
        self.and(
            self.lts
                .labels()
                .map(|a| {
                    let preds = self.lts.predecessors(q, a).iter();
                    Formula::modal(
                        Modality::back_box(a),
                        self.or(preds.map(|q1| Formula::var(ns, q1)).collect()),
                    )
                })
                .collect(),
        )
    }

    fn bwd_dia_group(&self, ns: &str, q: StateId) -> Formula {
        self.and(
            self.lts
                .labels()
                .flat_map(|a| {
                    self.lts.predecessors(q, a).iter().map(move |q1| {
                        Formula::modal(Modality::back_diamond(a), Formula::var(ns, q1))
                    })
                })
                .collect(),
        )
    }

    fn agent_box_group(&self, ns: &str, q: StateId) -> Formula {
        self.and(
            self.lts
                .agents()
                .map(|i| {
                    let class = self.lts.agent_class(i, q).iter();
                    Formula::modal(
                        Modality::agent_box(i),
                        self.or(class.map(|q1| Formula::var(ns, q1)).collect()),
                    )
                })
                .collect(),
        )
    }

    fn agent_dia_group(&self, ns: &str, q: StateId) -> Formula {
        self.and(
            self.lts
                .agents()
                .flat_map(|i| {
                    self.lts.agent_class(i, q).iter().map(move |q1| {
                        Formula::modal(Modality::agent_diamond(i), Formula::var(ns, q1))
                    })
                })
                .collect(),
        )
    }

    // [a]ff for every label q refuses
    fn refusal_group(&self, q: StateId) -> Formula {
        self.and(
            self.lts
                .labels()
                .filter(|&a| self.lts.successors(q, a).is_empty())
                .map(|a| Formula::modal(Modality::box_(a), Formula::False))
                .collect(),
        )
    }

    // like fwd_box_group but with the strict box
    fn strict_box_group(&self, ns: &str, q: StateId) -> Formula {
        self.and(
            self.lts
                .labels()
                .map(|a| {
                    let succs = self.lts.successors(q, a).iter();
                    Formula::modal(
                        Modality::strict_box(a),
                        self.or(succs.map(|q1| Formula::var(ns, q1)).collect()),
                    )
                })
                .collect(),
        )
    }

    // [a] (some b above a reaches one of q's b-successors)
    fn ext_box_group(&self, ns: &str, q: StateId) -> Formula {
        self.and(
            self.lts
                .labels()
                .map(|a| {
                    let per_b = self
                        .lts
                        .labels()
                        .filter(|&b| self.lts.label_leq(a, b))
                        .map(|b| {
                            self.or(self
                                .lts
                                .successors(q, b)
                                .iter()
                                .map(|q1| Formula::var(ns, q1))
                                .collect())
                        })
                        .collect();
                    Formula::modal(Modality::box_(a), self.or(per_b))
                })
                .collect(),
        )
    }

    // per a-successor q', some <b> with b above a into q'
    fn ext_dia_group(&self, ns: &str, q: StateId) -> Formula {
        self.and(
            self.lts
                .labels()
                .map(|a| {
                    self.and(
                        self.lts
                            .successors(q, a)
                            .iter()
                            .map(|q1| {
                                self.or(self
                                    .lts
                                    .labels()
                                    .filter(|&b| self.lts.label_leq(a, b))
                                    .map(|b| {
                                        Formula::modal(Modality::diamond(b), Formula::var(ns, q1))
                                    })
                                    .collect())
                            })
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    fn body(&self, sem: Semantics, ns: &str, q: StateId) -> Formula {
        match sem {
            Semantics::SimLeq => self.fwd_box_group(ns, q),
            Semantics::SimGeq => self.fwd_dia_group(ns, q),
            Semantics::Bisim => {
                self.and(vec![self.fwd_box_group(ns, q), self.fwd_dia_group(ns, q)])
            }
            Semantics::ReadySim => self.and(vec![self.fwd_dia_group(ns, q), self.refusal_group(q)]),
            Semantics::Bfb => self.and(vec![
                self.fwd_box_group(ns, q),
                self.fwd_dia_group(ns, q),
                self.bwd_box_group(ns, q),
                self.bwd_dia_group(ns, q),
            ]),
            Semantics::Bfbid => self.and(vec![
                self.fwd_box_group(ns, q),
                self.fwd_dia_group(ns, q),
                self.bwd_box_group(ns, q),
                self.bwd_dia_group(ns, q),
                self.agent_box_group(ns, q),
                self.agent_dia_group(ns, q),
            ]),
            Semantics::Prebis => {
                let mut branches = vec![self.strict_box_group(ns, q)];
                if self.lts.is_diverging(q) {
                    branches.push(Formula::True);
                }
                self.and(vec![self.fwd_dia_group(ns, q), self.or(branches)])
            }
            Semantics::ExtLeq => self.ext_box_group(ns, q),
            Semantics::ExtGeq => self.ext_dia_group(ns, q),
            Semantics::SimEq => unreachable!("SimEq bodies are built per namespace"),
        }
    }
}

/// Builds the characteristic declaration for `sem` over `lts`.
///
/// Expects a validated LTS. The extended-simulation semantics additionally
/// need a nonempty label preorder (unless the LTS has no labels at all, where
/// the requirement is vacuous).
pub fn gen(sem: Semantics, lts: &Lts) -> Result<GeneratedSystem, GenError> {
    gen_with_collapse(sem, lts, true)
}

fn gen_with_collapse(
    sem: Semantics,
    lts: &Lts,
    collapse: bool,
) -> Result<GeneratedSystem, GenError> {
    if sem.needs_label_preorder() && lts.num_labels() > 0 && lts.label_preorder().is_empty() {
        return Err(GenError::MissingAnnotation { semantics: sem });
    }
    let ctx = Ctx { lts, collapse };
    let n = lts.num_states();
    let (namespaces, bodies) = match sem {
        Semantics::SimEq => {
            let x: Vec<Formula> = lts
                .states()
                .map(|q| ctx.body(Semantics::SimLeq, "X", q))
                .collect();
            let y: Vec<Formula> = lts
                .states()
                .map(|q| ctx.body(Semantics::SimGeq, "Y", q))
                .collect();
            (vec!["X".to_string(), "Y".to_string()], vec![x, y])
        }
        sem => {
            let ns = primary_namespace(sem);
            let rows: Vec<Formula> = lts.states().map(|q| ctx.body(sem, ns, q)).collect();
            (vec![ns.to_string()], vec![rows])
        }
    };
    let declaration = Declaration::new(namespaces, n, bodies)?;
    Ok(GeneratedSystem {
        semantics: sem,
        declaration,
        mode: FixMode::Max,
    })
}

/// Bisim generator with diamond and box flavors swapped; a deliberately
/// broken construction for mutation-sensitivity tests of the difftest
/// machinery.
#[cfg(test)]
pub(crate) fn gen_bisim_flavor_swapped(lts: &Lts) -> GeneratedSystem {
    let ctx = Ctx {
        lts,
        collapse: true,
    };
    let bodies: Vec<Formula> = lts
        .states()
        .map(|q| {
            let swapped_box = ctx.and(
                lts.labels()
                    .map(|a| {
                        let succs = lts.successors(q, a).iter();
                        Formula::modal(
                            Modality::diamond(a),
                            ctx.or(succs.map(|q1| Formula::var("X", q1)).collect()),
                        )
                    })
                    .collect(),
            );
            let swapped_dia = ctx.and(
                lts.labels()
                    .flat_map(|a| {
                        lts.successors(q, a)
                            .iter()
                            .map(move |q1| Formula::modal(Modality::box_(a), Formula::var("X", q1)))
                    })
                    .collect(),
            );
            ctx.and(vec![swapped_box, swapped_dia])
        })
        .collect();
    GeneratedSystem {
        semantics: Semantics::Bisim,
        declaration: Declaration::new(vec!["X".to_string()], lts.num_states(), vec![bodies])
            .unwrap(),
        mode: FixMode::Max,
    }
}

/// Checks that the generated declaration expresses the semantics' step
/// function up to the given relation: evaluating every body under the
/// environment induced by `s` must carve out exactly `step(sem, lts, s)`,
/// namespace by namespace (SimEq: X against SimLeq's step, Y against
/// SimGeq's).
pub fn expresses_upto_check(sem: Semantics, lts: &Lts, s: &Relation) -> Result<bool, GenError> {
    let gs = gen(sem, lts)?;
    let env = s.to_environment(gs.declaration.namespaces());
    let applied = gs.declaration.apply(lts, &env)?;
    for ns in gs.declaration.namespaces() {
        let oracle_step = match (sem, ns.as_str()) {
            (Semantics::SimEq, "X") => step(Semantics::SimLeq, lts, s),
            (Semantics::SimEq, _) => step(Semantics::SimGeq, lts, s),
            (sem, _) => step(sem, lts, s),
        };
        for q in lts.states() {
            if *applied.get_var(ns, q)? != oracle_step.column(q) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
