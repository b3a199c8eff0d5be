//! Differential testing: the formula route (generate a characteristic
//! declaration, solve it, read the relation back) against the relational
//! route (iterate the step function directly) on randomized instances.
//!
//! The two routes share no code beyond the LTS itself, so agreement on the
//! full relation is strong evidence for both. Trials are driven by one seed
//! stream; a failing instance is re-generated at every smaller state count
//! with the same stream so reports stay readable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::declgen::{gen, GeneratedSystem};
use crate::logic::{Environment, FixMode, Formula, ModFlavor, ModKind, Modality};
use crate::lts::{random_lts, Lts, RandomLtsConfig, StateId};
use crate::oracle::gfp;
use crate::semantics::Semantics;

/// Knobs for one differential run. `preorder_pairs = None` draws roughly
/// half as many generator pairs as there are labels.
#[derive(Clone, Debug)]
pub struct DifftestConfig {
    pub semantics: Vec<Semantics>,
    pub trials: usize,
    pub max_states: usize,
    pub max_labels: usize,
    /// Cycled through per trial.
    pub densities: Vec<f64>,
    pub diverge_prob: f64,
    pub max_agents: usize,
    pub preorder_pairs: Option<usize>,
    pub seed: u64,
}

impl Default for DifftestConfig {
    fn default() -> Self {
        DifftestConfig {
            semantics: Semantics::ALL.to_vec(),
            trials: 100,
            max_states: 8,
            max_labels: 3,
            densities: vec![0.1, 0.3, 0.7],
            diverge_prob: 0.3,
            max_agents: 2,
            preorder_pairs: None,
            seed: 0,
        }
    }
}

/// One disagreeing pair, with enough context to replay it.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct Mismatch {
    pub trial: usize,
    pub trial_seed: u64,
    pub semantics: String,
    pub p: String,
    pub q: String,
    pub formula_route: bool,
    pub oracle_route: bool,
    /// Text form of the (shrunk) instance.
    pub lts: String,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct DiffReport {
    pub trials: usize,
    pub comparisons: usize,
    pub mismatches: Vec<Mismatch>,
}

impl DiffReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "trials={} comparisons={} mismatches={}",
            self.trials,
            self.comparisons,
            self.mismatches.len()
        )
    }
}

/// Everything needed to rebuild one trial's instance at any state count.
struct TrialParams {
    num_states: usize,
    num_labels: usize,
    num_agents: usize,
    preorder_pairs: usize,
    density: f64,
    diverge_prob: f64,
    lts_seed: u64,
}

impl TrialParams {
    fn draw(cfg: &DifftestConfig, trial: usize, trial_seed: u64) -> TrialParams {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let num_states = rng.gen_range(1..=cfg.max_states.max(1));
        let num_labels = rng.gen_range(1..=cfg.max_labels.max(1));
        let num_agents = rng.gen_range(0..=cfg.max_agents);
        let lts_seed = rng.gen::<u64>();
        TrialParams {
            num_states,
            num_labels,
            num_agents,
            preorder_pairs: cfg.preorder_pairs.unwrap_or(num_labels.div_ceil(2)),
            density: cfg.densities[trial % cfg.densities.len()],
            diverge_prob: cfg.diverge_prob,
            lts_seed,
        }
    }

    fn lts(&self, num_states: usize) -> Lts {
        random_lts(&RandomLtsConfig {
            num_states,
            num_labels: self.num_labels,
            density: self.density,
            diverge_prob: self.diverge_prob,
            num_agents: self.num_agents,
            preorder_pairs: Some(self.preorder_pairs),
            seed: self.lts_seed,
        })
    }
}

/// Runs the configured number of trials with the honest generator.
pub fn run(cfg: &DifftestConfig) -> DiffReport {
    run_with(cfg, &|sem, lts| {
        gen(sem, lts).expect("random instances carry every annotation")
    })
}

/// Like `run` but with a caller-supplied generator, so deliberately broken
/// generators can be shown to trip the comparison.
pub fn run_with(
    cfg: &DifftestConfig,
    generate: &dyn Fn(Semantics, &Lts) -> GeneratedSystem,
) -> DiffReport {
    let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut comparisons = 0;
    let mut mismatches = Vec::new();
    for trial in 0..cfg.trials {
        let trial_seed = master.gen::<u64>();
        let params = TrialParams::draw(cfg, trial, trial_seed);
        let lts = params.lts(params.num_states);
        for &sem in &cfg.semantics {
            comparisons += 1;
            let bad = disagreements(sem, &lts, generate);
            if bad.is_empty() {
                continue;
            }
            // smallest state count on the same stream that still disagrees
            let (small_lts, small_bad) = (1..params.num_states)
                .find_map(|k| {
                    let shrunk = params.lts(k);
                    let b = disagreements(sem, &shrunk, generate);
                    (!b.is_empty()).then_some((shrunk, b))
                })
                .unwrap_or((lts.clone(), bad));
            let text = small_lts.to_text();
            for (p, q, formula_route, oracle_route) in small_bad {
                mismatches.push(Mismatch {
                    trial,
                    trial_seed,
                    semantics: sem.tag().to_string(),
                    p: small_lts.state_name(p).to_string(),
                    q: small_lts.state_name(q).to_string(),
                    formula_route,
                    oracle_route,
                    lts: text.clone(),
                });
            }
        }
    }
    DiffReport {
        trials: cfg.trials,
        comparisons,
        mismatches,
    }
}

fn disagreements(
    sem: Semantics,
    lts: &Lts,
    generate: &dyn Fn(Semantics, &Lts) -> GeneratedSystem,
) -> Vec<(StateId, StateId, bool, bool)> {
    let gs = generate(sem, lts);
    let (formula_rel, _) = gs
        .relation(lts, FixMode::Max)
        .expect("generated declarations solve on their own LTS");
    let oracle_rel = gfp(sem, lts);
    let mut out = Vec::new();
    for p in lts.states() {
        for q in lts.states() {
            let f = formula_rel.contains(p, q);
            let o = oracle_rel.contains(p, q);
            if f != o {
                out.push((p, q, f, o));
            }
        }
    }
    out
}

/// Shape constraints for random formulas.
#[derive(Clone, Debug)]
pub struct FormulaSampler {
    pub max_depth: usize,
    /// Empty means closed formulas only.
    pub namespaces: Vec<String>,
    pub allow_backward: bool,
    pub allow_agent: bool,
    pub allow_strict_box: bool,
}

impl FormulaSampler {
    /// Variable-free formulas over every available modality.
    pub fn closed(max_depth: usize) -> FormulaSampler {
        FormulaSampler {
            max_depth,
            namespaces: Vec::new(),
            allow_backward: true,
            allow_agent: true,
            allow_strict_box: true,
        }
    }

    /// Formulas that may mention variables in the given namespaces.
    pub fn over<S: AsRef<str>>(namespaces: &[S], max_depth: usize) -> FormulaSampler {
        FormulaSampler {
            namespaces: namespaces.iter().map(|s| s.as_ref().to_string()).collect(),
            ..FormulaSampler::closed(max_depth)
        }
    }
}

/// Draws a random formula that is well formed for `lts`.
pub fn sample_formula(lts: &Lts, cfg: &FormulaSampler, rng: &mut impl Rng) -> Formula {
    sample_at(lts, cfg, rng, cfg.max_depth)
}

fn sample_at(lts: &Lts, cfg: &FormulaSampler, rng: &mut impl Rng, depth: usize) -> Formula {
    let can_var = !cfg.namespaces.is_empty() && lts.num_states() > 0;
    let can_label = lts.num_labels() > 0;
    let can_agent = cfg.allow_agent && lts.num_agents() > 0;
    let mut options = vec![0u8, 1];
    if can_var {
        options.push(2);
    }
    if depth > 0 {
        options.extend([3, 4]);
        if can_label || can_agent {
            // bias toward modalities so depth is actually used
            options.extend([5, 5, 5]);
        }
    }
    match options[rng.gen_range(0..options.len())] {
        0 => Formula::True,
        1 => Formula::False,
        2 => {
            let ns = &cfg.namespaces[rng.gen_range(0..cfg.namespaces.len())];
            Formula::var(ns, StateId(rng.gen_range(0..lts.num_states())))
        }
        tag @ (3 | 4) => {
            let children = (0..rng.gen_range(2..=3))
                .map(|_| sample_at(lts, cfg, rng, depth - 1))
                .collect();
            if tag == 3 {
                Formula::And(children)
            } else {
                Formula::Or(children)
            }
        }
        _ => {
            let mut kinds = Vec::new();
            if can_label {
                kinds.push(0);
                if cfg.allow_backward {
                    kinds.push(1);
                }
            }
            if can_agent {
                kinds.push(2);
            }
            let kind = match kinds[rng.gen_range(0..kinds.len())] {
                0 => ModKind::Forward(crate::lts::LabelId(rng.gen_range(0..lts.num_labels()))),
                1 => ModKind::Backward(crate::lts::LabelId(rng.gen_range(0..lts.num_labels()))),
                _ => ModKind::Agent(crate::lts::AgentId(rng.gen_range(0..lts.num_agents()))),
            };
            let flavor = match kind {
                ModKind::Forward(_) if cfg.allow_strict_box && rng.gen_ratio(1, 4) => {
                    ModFlavor::StrictBox
                }
                _ if rng.gen_bool(0.5) => ModFlavor::Diamond,
                _ => ModFlavor::Box,
            };
            Formula::modal(
                Modality::new(flavor, kind).expect("kind and flavor are drawn compatibly"),
                sample_at(lts, cfg, rng, depth - 1),
            )
        }
    }
}

/// A random environment over the given domain, each membership bit drawn
/// independently at `density`.
pub fn sample_environment<S: AsRef<str>>(
    namespaces: &[S],
    num_states: usize,
    density: f64,
    rng: &mut impl Rng,
) -> Environment {
    let mut env = Environment::bottom(namespaces, num_states);
    for ns in namespaces {
        for q in 0..num_states {
            let members = (0..num_states)
                .filter(|_| rng.gen::<f64>() < density)
                .map(StateId)
                .collect::<Vec<_>>();
            let mut set = crate::set::StateSet::empty(num_states);
            for p in members {
                set.insert(p);
            }
            env.assign(ns.as_ref(), StateId(q), set)
                .expect("domain built above");
        }
    }
    env
}

/// Two environments with the first pointwise below the second.
pub fn sample_environment_pair<S: AsRef<str>>(
    namespaces: &[S],
    num_states: usize,
    rng: &mut impl Rng,
) -> (Environment, Environment) {
    let lower = sample_environment(namespaces, num_states, 0.3, rng);
    let mut upper = lower.clone();
    for ns in namespaces {
        for q in 0..num_states {
            let mut set = lower
                .get_var(ns.as_ref(), StateId(q))
                .expect("domain built above")
                .clone();
            for p in 0..num_states {
                if rng.gen_bool(0.3) {
                    set.insert(StateId(p));
                }
            }
            upper
                .assign(ns.as_ref(), StateId(q), set)
                .expect("domain built above");
        }
    }
    (lower, upper)
}
