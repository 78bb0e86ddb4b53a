//! Checks the law corpus over a pool of substitutions.

use std::time::{Duration, Instant};

use kadt_core::laws::{check, corpus, metavariables, LawEntry, LawOutcome, Substitution};
use kadt_core::{DecideOptions, Expr};

#[derive(Clone, Debug)]
pub struct LawTally {
    pub law: LawEntry,
    pub holds: usize,
    /// Conditional instances whose hypothesis was not derivable.
    pub vacuous: usize,
    pub failures: Vec<(usize, Expr, Expr)>,
    pub errors: Vec<(usize, String)>,
}

impl LawTally {
    pub fn is_conditional(&self) -> bool {
        !self.law.hypotheses.is_empty()
    }

    /// Passed, and for conditional laws at least once non-vacuously.
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.errors.is_empty() && self.holds > 0
    }
}

#[derive(Clone, Debug)]
pub struct LawReport {
    pub tallies: Vec<LawTally>,
    pub instances: usize,
    pub elapsed: Duration,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.tallies.iter().all(LawTally::passed)
    }
}

/// Checks every law on every substitution of `pool`. Instances that only
/// differ in unused metavariables are checked once.
pub fn run(pool: &[Substitution], opts: &DecideOptions) -> LawReport {
    let start = Instant::now();
    let mut instances = 0;
    let mut tallies = Vec::new();
    for law in corpus() {
        let vars = metavariables(&law).unwrap_or_default();
        let mut seen: Vec<Vec<Expr>> = Vec::new();
        let mut t = LawTally { law: law.clone(), holds: 0, vacuous: 0, failures: vec![], errors: vec![] };
        for (i, sub) in pool.iter().enumerate() {
            let key: Vec<Expr> = vars.iter().filter_map(|v| sub.exprs.get(v).cloned()).collect();
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            instances += 1;
            match check(&law, sub, opts) {
                Ok(LawOutcome::Holds) => t.holds += 1,
                Ok(LawOutcome::Vacuous) => t.vacuous += 1,
                Ok(LawOutcome::Fails { left, right }) => t.failures.push((i, left, right)),
                Err(e) => t.errors.push((i, e.to_string())),
            }
        }
        tallies.push(t);
    }
    LawReport { tallies, instances, elapsed: start.elapsed() }
}
