//! Command-line front end: generate characteristic declarations, solve them,
//! decide relations (with an optional oracle cross-check), model-check user
//! formulae against declaration files, and run randomized differential tests.
//!
//! Exit codes form a protocol so shell scripts can use the tool as a decision
//! procedure: 0 related or success, 1 parse or validation failure, 2 missing
//! semantics annotation, 3 unrelated, 4 internal disagreement or differential
//! mismatches, 5 fixed-point chain violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use charkit::declgen::{gen, GenError};
use charkit::difftest::{self, DiffReport, DifftestConfig};
use charkit::logic::{eval, parse_declaration_file, parse_formula, FixMode};
use charkit::lts::{parse_lts, Lts, StateId};
use charkit::oracle::gfp;
use charkit::semantics::Semantics;
use charkit::solver::SolveError;

const EXIT_USER: u8 = 1;
const EXIT_ANNOTATION: u8 = 2;
const EXIT_UNRELATED: u8 = 3;
const EXIT_DISAGREE: u8 = 4;
const EXIT_CHAIN: u8 = 5;

#[derive(Parser)]
#[command(
    name = "charkit",
    version,
    about = "Characteristic formulae for behavioural preorders and equivalences over finite LTSs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

fn semantics_arg(s: &str) -> Result<Semantics, String> {
    s.parse::<Semantics>().map_err(|e| e.to_string())
}

fn mode_arg(s: &str) -> Result<FixMode, String> {
    s.parse::<FixMode>().map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate the characteristic declaration of a semantics over an LTS.
    Gen {
        /// LTS file in the text format.
        #[arg(long)]
        lts: PathBuf,
        /// Semantics tag: simleq, simgeq, simeq, bisim, rs, bfb, bfbid,
        /// prebis, extleq, extgeq.
        #[arg(long, value_parser = semantics_arg)]
        semantics: Semantics,
        /// Reflexive-transitively close the label preorder before validating.
        #[arg(long)]
        close_preorder: bool,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the characteristic declaration and print the relation it carves
    /// out, one `p q` pair per line.
    Solve {
        #[arg(long)]
        lts: PathBuf,
        #[arg(long, value_parser = semantics_arg)]
        semantics: Semantics,
        /// Fixed point to take: max or min.
        #[arg(long, value_parser = mode_arg, default_value = "max")]
        mode: FixMode,
        #[arg(long)]
        close_preorder: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether state P is related to state Q.
    Check {
        #[arg(long)]
        lts: PathBuf,
        #[arg(long, value_parser = semantics_arg)]
        semantics: Semantics,
        /// Left state name.
        p: String,
        /// Right state name.
        q: String,
        /// Also decide via the relational fixed point and fail with exit 4
        /// if the routes disagree (a toolkit bug, never a user error).
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        close_preorder: bool,
    },
    /// Solve a declaration file in its declared mode and test whether a
    /// state satisfies a query formula there.
    Mc {
        #[arg(long)]
        lts: PathBuf,
        /// Declaration file, `max X(q) = formula` per line.
        #[arg(long)]
        decl: PathBuf,
        /// State to test.
        state: String,
        /// Query formula over the declaration's variables, e.g. `X(s0)`.
        query: String,
        #[arg(long)]
        close_preorder: bool,
    },
    /// Randomized differential tests: the formula route against the
    /// relational oracle on the full relation, exact equality.
    Difftest {
        /// Semantics to exercise; repeatable, default all ten.
        #[arg(long, value_parser = semantics_arg)]
        semantics: Vec<Semantics>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 8)]
        max_states: usize,
        #[arg(long, default_value_t = 3)]
        max_labels: usize,
        /// Transition density; repeatable, cycled per trial. Default
        /// 0.1 0.3 0.7.
        #[arg(long = "density")]
        densities: Vec<f64>,
        /// Per-state divergence probability.
        #[arg(long, default_value_t = 0.3)]
        diverge_prob: f64,
        /// Agents per instance are drawn from 0..=max.
        #[arg(long, default_value_t = 2)]
        max_agents: usize,
        /// Generator pairs for the label preorder before closure; default
        /// half the label count, rounded up.
        #[arg(long)]
        preorder_pairs: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Line-delimited JSON instead of plain text.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A diagnostic for standard error plus the exit code it maps to.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Failure {
        Failure {
            code,
            msg: msg.into(),
        }
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Failure {
        let code = match e {
            GenError::MissingAnnotation { .. } => EXIT_ANNOTATION,
            GenError::Logic(_) => EXIT_USER,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Failure {
        let code = match e {
            SolveError::ChainBroken { .. } => EXIT_CHAIN,
            SolveError::Logic(_) => EXIT_USER,
        };
        Failure::new(code, e.to_string())
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_USER, format!("{}: {e}", path.display())))
}

fn load_lts(path: &Path, close_preorder: bool) -> Result<Lts, Failure> {
    let text = read_file(path)?;
    let mut lts = parse_lts(&text).map_err(|e| Failure::new(EXIT_USER, e.to_string()))?;
    if close_preorder {
        lts = lts.with_closed_preorder();
    }
    let violations = lts.validate();
    if !violations.is_empty() {
        let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Failure::new(EXIT_USER, msgs.join("\n")));
    }
    Ok(lts)
}

fn state_arg(lts: &Lts, name: &str) -> Result<StateId, Failure> {
    lts.state_by_name(name)
        .ok_or_else(|| Failure::new(EXIT_USER, format!("unknown state `{name}`")))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::new(EXIT_USER, format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_gen(
    lts: &Path,
    semantics: Semantics,
    close_preorder: bool,
    out: &Option<PathBuf>,
) -> Result<u8, Failure> {
    let lts = load_lts(lts, close_preorder)?;
    let gs = gen(semantics, &lts)?;
    emit(out, &gs.to_file_string(&lts))?;
    Ok(0)
}

fn cmd_solve(
    lts: &Path,
    semantics: Semantics,
    mode: FixMode,
    close_preorder: bool,
    out: &Option<PathBuf>,
) -> Result<u8, Failure> {
    let lts = load_lts(lts, close_preorder)?;
    let gs = gen(semantics, &lts)?;
    let (rel, _) = gs.relation(&lts, mode)?;
    emit(out, &rel.to_text(&lts))?;
    Ok(0)
}

fn cmd_check(
    lts: &Path,
    semantics: Semantics,
    p: &str,
    q: &str,
    oracle: bool,
    close_preorder: bool,
) -> Result<u8, Failure> {
    let lts = load_lts(lts, close_preorder)?;
    let p = state_arg(&lts, p)?;
    let q = state_arg(&lts, q)?;
    let gs = gen(semantics, &lts)?;
    let (rel, _) = gs.relation(&lts, FixMode::Max)?;
    let formula_verdict = rel.contains(p, q);
    if oracle {
        let oracle_verdict = gfp(semantics, &lts).contains(p, q);
        if oracle_verdict != formula_verdict {
            return Err(Failure::new(
                EXIT_DISAGREE,
                format!(
                    "internal disagreement on ({}, {}): formula route {}, oracle route {}",
                    lts.state_name(p),
                    lts.state_name(q),
                    formula_verdict,
                    oracle_verdict
                ),
            ));
        }
    }
    if formula_verdict {
        println!("related");
        Ok(0)
    } else {
        println!("unrelated");
        Ok(EXIT_UNRELATED)
    }
}

fn cmd_mc(
    lts: &Path,
    decl: &Path,
    state: &str,
    query: &str,
    close_preorder: bool,
) -> Result<u8, Failure> {
    let lts = load_lts(lts, close_preorder)?;
    let decl_text = read_file(decl)?;
    let (declaration, mode) = parse_declaration_file(&lts, &decl_text)
        .map_err(|e| Failure::new(EXIT_USER, e.to_string()))?;
    let state = state_arg(&lts, state)?;
    let query =
        parse_formula(&lts, query).map_err(|e| Failure::new(EXIT_USER, format!("query: {e}")))?;
    let (env, _) = match mode {
        FixMode::Max => charkit::solver::solve_max(&declaration, &lts)?,
        FixMode::Min => charkit::solver::solve_min(&declaration, &lts)?,
    };
    let sat = eval(&query, &lts, &env).map_err(|e| Failure::new(EXIT_USER, e.to_string()))?;
    if sat.contains(state) {
        println!("related");
        Ok(0)
    } else {
        println!("unrelated");
        Ok(EXIT_UNRELATED)
    }
}

fn render_report_text(report: &DiffReport) -> String {
    let mut out = String::new();
    for m in &report.mismatches {
        out.push_str(&format!(
            "mismatch: trial={} seed={} semantics={} pair=({}, {}) formula={} oracle={}\n",
            m.trial, m.trial_seed, m.semantics, m.p, m.q, m.formula_route, m.oracle_route
        ));
        for line in m.lts.lines() {
            out.push_str(&format!("  {line}\n"));
        }
    }
    out.push_str(&report.summary());
    out.push('\n');
    out
}

fn render_report_json(report: &DiffReport) -> String {
    let mut out = String::new();
    for m in &report.mismatches {
        out.push_str(&serde_json::to_string(m).expect("mismatches serialize"));
        out.push('\n');
    }
    out.push_str(&format!(
        "{{\"trials\":{},\"comparisons\":{},\"mismatches\":{}}}\n",
        report.trials,
        report.comparisons,
        report.mismatches.len()
    ));
    out
}

#[allow(clippy::too_many_arguments)]
fn cmd_difftest(
    semantics: Vec<Semantics>,
    trials: usize,
    max_states: usize,
    max_labels: usize,
    densities: Vec<f64>,
    diverge_prob: f64,
    max_agents: usize,
    preorder_pairs: Option<usize>,
    seed: u64,
    json: bool,
    out: &Option<PathBuf>,
) -> Result<u8, Failure> {
    if trials == 0 {
        return Err(Failure::new(EXIT_USER, "need at least one trial"));
    }
    for d in &densities {
        if !(0.0..=1.0).contains(d) {
            return Err(Failure::new(
                EXIT_USER,
                format!("density {d} not in [0, 1]"),
            ));
        }
    }
    let defaults = DifftestConfig::default();
    let cfg = DifftestConfig {
        semantics: if semantics.is_empty() {
            defaults.semantics
        } else {
            semantics
        },
        trials,
        max_states,
        max_labels,
        densities: if densities.is_empty() {
            defaults.densities
        } else {
            densities
        },
        diverge_prob,
        max_agents,
        preorder_pairs,
        seed,
    };
    let report = difftest::run(&cfg);
    let text = if json {
        render_report_json(&report)
    } else {
        render_report_text(&report)
    };
    emit(out, &text)?;
    Ok(if report.is_clean() { 0 } else { EXIT_DISAGREE })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.cmd {
        Cmd::Gen {
            lts,
            semantics,
            close_preorder,
            out,
        } => cmd_gen(&lts, semantics, close_preorder, &out),
        Cmd::Solve {
            lts,
            semantics,
            mode,
            close_preorder,
            out,
        } => cmd_solve(&lts, semantics, mode, close_preorder, &out),
        Cmd::Check {
            lts,
            semantics,
            p,
            q,
            oracle,
            close_preorder,
        } => cmd_check(&lts, semantics, &p, &q, oracle, close_preorder),
        Cmd::Mc {
            lts,
            decl,
            state,
            query,
            close_preorder,
        } => cmd_mc(&lts, &decl, &state, &query, close_preorder),
        Cmd::Difftest {
            semantics,
            trials,
            max_states,
            max_labels,
            densities,
            diverge_prob,
            max_agents,
            preorder_pairs,
            seed,
            json,
            out,
        } => cmd_difftest(
            semantics,
            trials,
            max_states,
            max_labels,
            densities,
            diverge_prob,
            max_agents,
            preorder_pairs,
            seed,
            json,
            &out,
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("charkit: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
