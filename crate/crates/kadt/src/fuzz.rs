//! Random differential testing of the decision procedure.

use std::thread;

use kadt_core::guarded::member;
use kadt_core::relational::{brute_oracle, Construction, OracleBudget, OracleVerdict};
use kadt_core::{decide_with, evaluate, DecideOptions, Expr, Side, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gen::{Generator, Shape};
use crate::modelfile::random_model;

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub count: usize,
    pub max_size: usize,
    pub seed: u64,
    pub actions: Vec<String>,
    pub props: Vec<String>,
    /// Random models each equivalence is checked in.
    pub models: usize,
    pub max_states: usize,
    /// Also compare with exhaustive search over small models.
    pub oracle: Option<OracleBudget>,
    pub options: DecideOptions,
    pub threads: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            count: 100,
            max_size: 6,
            seed: 7,
            actions: vec!["a".into(), "b".into()],
            props: vec!["p".into()],
            models: 100,
            max_states: 4,
            oracle: None,
            options: DecideOptions::default(),
            threads: thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

/// What went wrong with one pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Error(String),
    /// Equivalent, but some random model tells the sides apart.
    Unsound { model_seed: u64 },
    /// The witness is in both languages or in neither.
    Witness,
    /// The witness is accepted by the other side than reported.
    Side,
    Countermodel,
    /// Equivalent, but the exhaustive search found a difference.
    Oracle,
}

#[derive(Clone, Debug)]
pub struct Case {
    /// Seed the pair was generated from.
    pub seed: u64,
    pub left: Expr,
    pub right: Expr,
    pub equivalent: Option<bool>,
    pub construction: Option<Construction>,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, Default)]
pub struct FuzzReport {
    pub cases: Vec<Case>,
}

impl FuzzReport {
    pub fn equivalent(&self) -> usize {
        self.cases.iter().filter(|c| c.equivalent == Some(true)).count()
    }

    pub fn nonequivalent(&self) -> usize {
        self.cases.iter().filter(|c| c.equivalent == Some(false)).count()
    }

    /// Countermodels obtained by `k`.
    pub fn built_by(&self, k: Construction) -> usize {
        self.cases.iter().filter(|c| c.construction == Some(k)).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.violations.is_empty())
    }

    pub fn is_clean(&self) -> bool {
        self.failures().next().is_none()
    }
}

/// Per-case seed; cases are independent of the thread that runs them.
pub fn case_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64)
}

/// Checks one pair of expressions.
pub fn check_pair(e: &Expr, f: &Expr, seed: u64, cfg: &FuzzConfig) -> Case {
    let mut case = Case { seed, left: e.clone(), right: f.clone(), equivalent: None, construction: None, violations: vec![] };
    let d = match decide_with(e, f, &cfg.options) {
        Ok(d) => d,
        Err(err) => {
            case.violations.push(Violation::Error(err.to_string()));
            return case;
        }
    };
    let mut actions = cfg.actions.clone();
    let mut props = cfg.props.clone();
    for s in e.actions().iter().chain(&f.actions()) {
        if !actions.iter().any(|a| a == s.name()) {
            actions.push(s.name().into());
        }
    }
    for s in e.props().iter().chain(&f.props()) {
        if !props.iter().any(|p| p == s.name()) {
            props.push(s.name().into());
        }
    }
    match &d.verdict {
        Verdict::Equivalent => {
            case.equivalent = Some(true);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..cfg.models {
                let model_seed: u64 = rng.gen();
                let mut mr = ChaCha8Rng::seed_from_u64(model_seed);
                let n = mr.gen_range(1..=cfg.max_states);
                let m = random_model(&mut mr, n, &actions, &props, 0.5, 0.5);
                match (evaluate(e, &m), evaluate(f, &m)) {
                    (Ok(x), Ok(y)) if x == y => {}
                    (Ok(_), Ok(_)) => {
                        case.violations.push(Violation::Unsound { model_seed });
                        break;
                    }
                    (Err(err), _) | (_, Err(err)) => {
                        case.violations.push(Violation::Error(err.to_string()));
                        break;
                    }
                }
            }
            if let Some(budget) = &cfg.oracle {
                match brute_oracle(e, f, budget) {
                    Ok(OracleVerdict::Same { .. }) => {}
                    Ok(OracleVerdict::Distinguished { .. }) => case.violations.push(Violation::Oracle),
                    Err(err) => case.violations.push(Violation::Error(err.to_string())),
                }
            }
        }
        Verdict::Nonequivalent(cx) => {
            case.equivalent = Some(false);
            case.construction = Some(cx.construction);
            match (member(&cx.witness, e, &d.canonical), member(&cx.witness, f, &d.canonical)) {
                (Ok(l), Ok(r)) => {
                    if l == r {
                        case.violations.push(Violation::Witness);
                    } else if (cx.side == Side::Left) != l {
                        case.violations.push(Violation::Side);
                    }
                }
                (Err(err), _) | (_, Err(err)) => case.violations.push(Violation::Error(err.to_string())),
            }
            let (x, y) = cx.point;
            match (evaluate(e, &cx.model), evaluate(f, &cx.model)) {
                (Ok(re), Ok(rf)) if re.contains(x, y) != rf.contains(x, y) => {}
                (Ok(_), Ok(_)) => case.violations.push(Violation::Countermodel),
                (Err(err), _) | (_, Err(err)) => case.violations.push(Violation::Error(err.to_string())),
            }
        }
    }
    case
}

/// Runs `cfg.count` random pairs, spread over `cfg.threads` workers.
pub fn run(cfg: &FuzzConfig, shape: Shape) -> FuzzReport {
    let threads = cfg.threads.clamp(1, cfg.count.max(1));
    let mut cases: Vec<Option<Case>> = vec![None; cfg.count];
    let chunks: Vec<Vec<(usize, Case)>> = thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                s.spawn(move || {
                    let acts: Vec<&str> = cfg.actions.iter().map(String::as_str).collect();
                    let props: Vec<&str> = cfg.props.iter().map(String::as_str).collect();
                    (t..cfg.count)
                        .step_by(threads)
                        .map(|i| {
                            let seed = case_seed(cfg.seed, i);
                            let mut g = Generator::new(seed, &acts, &props, shape);
                            let (e, f) = g.pair(cfg.max_size);
                            (i, check_pair(&e, &f, seed, cfg))
                        })
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("fuzz worker panicked")).collect()
    });
    for (i, c) in chunks.into_iter().flatten() {
        cases[i] = Some(c);
    }
    FuzzReport { cases: cases.into_iter().map(|c| c.expect("every case ran")).collect() }
}
