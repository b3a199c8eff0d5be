//! Kleene iteration for recursive declarations: repeated simultaneous
//! application from the top (greatest fixed point) or bottom (least) of the
//! environment lattice until nothing changes.
//!
//! Every round is checked against the expected chain direction. The formula
//! language has no negation, so application is monotone and a violation
//! cannot happen for declarations built in this crate; the check guards
//! against future extensions and miswired evaluation, not expected inputs.

use thiserror::Error;

use crate::logic::{Declaration, Environment, FixMode, LogicError};
use crate::lts::{Lts, StateId};
use crate::oracle::Relation;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("{mode} iteration left its chain at round {round}")]
    ChainBroken { mode: FixMode, round: usize },
}

/// How much work one solve took.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct SolveStats {
    /// Declaration applications until the fixed point reproduced itself.
    pub iterations: usize,
    /// Size of the environment lattice in bits: variables times states. The
    /// iteration count can exceed it by at most one.
    pub lattice_bits: usize,
}

/// Greatest solution: descend from the all-full environment.
pub fn solve_max(d: &Declaration, lts: &Lts) -> Result<(Environment, SolveStats), SolveError> {
    solve(d, lts, FixMode::Max)
}

/// Least solution: ascend from the all-empty environment.
pub fn solve_min(d: &Declaration, lts: &Lts) -> Result<(Environment, SolveStats), SolveError> {
    solve(d, lts, FixMode::Min)
}

fn solve(
    d: &Declaration,
    lts: &Lts,
    mode: FixMode,
) -> Result<(Environment, SolveStats), SolveError> {
    let mut cur = match mode {
        FixMode::Max => Environment::top(d.namespaces(), d.num_states()),
        FixMode::Min => Environment::bottom(d.namespaces(), d.num_states()),
    };
    let mut iterations = 0;
    loop {
        let next = d.apply(lts, &cur)?;
        iterations += 1;
        let in_chain = match mode {
            FixMode::Max => next.leq(&cur)?,
            FixMode::Min => cur.leq(&next)?,
        };
        if !in_chain {
            return Err(SolveError::ChainBroken {
                mode,
                round: iterations,
            });
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    Ok((
        cur,
        SolveStats {
            iterations,
            lattice_bits: d.namespaces().len() * d.num_states() * lts.num_states(),
        },
    ))
}

/// Reads one namespace of an environment back as a relation: (p, q) is in
/// iff p belongs to the set assigned to the variable at q.
pub fn env_to_relation(env: &Environment, ns: &str) -> Result<Relation, SolveError> {
    let n = env.num_states();
    let mut rel = Relation::empty(n);
    for q in 0..n {
        let q = StateId(q);
        for p in env.get_var(ns, q)?.iter() {
            rel.insert(p, q);
        }
    }
    Ok(rel)
}

/// One line per variable listing its member states, then an iteration count.
pub fn format_environment(lts: &Lts, env: &Environment, stats: &SolveStats) -> String {
    let mut out = String::new();
    for ns in env.namespaces() {
        for q in lts.states() {
            let members: Vec<&str> = env
                .get_var(ns, q)
                .expect("environment covers its own domain")
                .iter()
                .map(|p| lts.state_name(p))
                .collect();
            out.push_str(&format!(
                "{ns}({}): {}\n",
                lts.state_name(q),
                members.join(" ")
            ));
        }
    }
    out.push_str(&format!("# iterations={}\n", stats.iterations));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::declgen::gen;
    use crate::logic::Formula;
    use crate::lts::{random_lts, LtsBuilder, RandomLtsConfig};
    use crate::semantics::Semantics;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_states() -> Lts {
        LtsBuilder::new()
            .states(["p", "q"])
            .labels(["a"])
            .trans("p", "a", "q")
            .build()
            .unwrap()
    }

    fn single_ns(bodies: Vec<Formula>) -> Declaration {
        Declaration::new(vec!["X".to_string()], bodies.len(), vec![bodies]).unwrap()
    }

    #[test]
    fn constant_true_declaration() {
        let lts = two_states();
        let d = single_ns(vec![Formula::True, Formula::True]);
        let (env, stats) = solve_max(&d, &lts).unwrap();
        assert_eq!(env, Environment::top(&["X"], 2));
        assert_eq!(stats.iterations, 1);
        assert_eq!(stats.lattice_bits, 4);
        // from the bottom the first round strictly ascends, the second confirms
        let (env, stats) = solve_min(&d, &lts).unwrap();
        assert_eq!(env, Environment::top(&["X"], 2));
        assert_eq!(stats.iterations, 2);
    }

    #[test]
    fn constant_false_declaration() {
        let lts = two_states();
        let d = single_ns(vec![Formula::False, Formula::False]);
        let (env, stats) = solve_max(&d, &lts).unwrap();
        assert_eq!(env, Environment::bottom(&["X"], 2));
        assert_eq!(stats.iterations, 2);
        let (env, stats) = solve_min(&d, &lts).unwrap();
        assert_eq!(env, Environment::bottom(&["X"], 2));
        assert_eq!(stats.iterations, 1);
    }

    #[test]
    fn self_referential_variables_split_by_mode() {
        let lts = two_states();
        let d = single_ns(vec![
            Formula::var("X", StateId(0)),
            Formula::var("X", StateId(1)),
        ]);
        let (max_env, _) = solve_max(&d, &lts).unwrap();
        assert_eq!(max_env, Environment::top(&["X"], 2));
        let (min_env, _) = solve_min(&d, &lts).unwrap();
        assert_eq!(min_env, Environment::bottom(&["X"], 2));
    }

    #[test]
    fn min_solution_is_below_max_solution() {
        for seed in 0..12 {
            let lts = random_lts(&RandomLtsConfig {
                num_states: 1 + (seed as usize % 5),
                num_labels: 2,
                density: 0.4,
                diverge_prob: 0.3,
                num_agents: 1,
                preorder_pairs: Some(1),
                seed,
            });
            for sem in Semantics::ALL {
                let d = gen(sem, &lts).unwrap().declaration;
                let (min_env, min_stats) = solve_min(&d, &lts).unwrap();
                let (max_env, max_stats) = solve_max(&d, &lts).unwrap();
                assert!(min_env.leq(&max_env).unwrap(), "{sem} seed {seed}");
                for stats in [min_stats, max_stats] {
                    assert!(
                        stats.iterations <= stats.lattice_bits + 1,
                        "{sem} seed {seed}: {} iterations on {} bits",
                        stats.iterations,
                        stats.lattice_bits
                    );
                }
            }
        }
    }

    #[test]
    fn relation_round_trip_through_environment() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let s = Relation::random(5, 0.4, &mut rng);
            let env = s.to_environment(&["X", "Y"]);
            assert_eq!(env_to_relation(&env, "X").unwrap(), s);
            assert_eq!(env_to_relation(&env, "Y").unwrap(), s);
        }
    }

    #[test]
    fn unknown_namespace_is_reported() {
        let env = Environment::top(&["X"], 2);
        assert_eq!(
            env_to_relation(&env, "Z").unwrap_err(),
            SolveError::Logic(LogicError::UnknownVariable {
                namespace: "Z".to_string(),
                state: 0,
            })
        );
    }

    #[test]
    fn environment_rendering() {
        let lts = two_states();
        let d = gen(Semantics::SimLeq, &lts).unwrap().declaration;
        let (env, stats) = solve_max(&d, &lts).unwrap();
        let text = format_environment(&lts, &env, &stats);
        assert_eq!(text, "X(p): p q\nX(q): q\n# iterations=2\n");
    }
}
