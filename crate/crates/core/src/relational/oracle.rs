//! Exhaustive search over small models.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::{evaluate, RelationalModel};
use crate::error::{Error, Result};
use crate::syntax::Expr;

#[derive(Clone, Copy, Debug)]
pub struct OracleBudget {
    pub max_states: usize,
    /// Refuse to enumerate more models than this.
    pub max_models: u128,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_states: 2, max_models: 1 << 20 }
    }
}

#[derive(Clone, Debug)]
pub enum OracleVerdict {
    /// No model within the budget tells the expressions apart.
    Same { models: usize },
    /// A model and a pair in exactly one of the two relations.
    Distinguished { model: RelationalModel, pair: (usize, usize) },
}

impl OracleVerdict {
    pub fn is_same(&self) -> bool {
        matches!(self, OracleVerdict::Same { .. })
    }
}

fn count(n: usize, actions: usize, props: usize) -> u128 {
    let bits = (actions * n * n + props * n) as u32;
    1u128.checked_shl(bits).unwrap_or(u128::MAX)
}

/// Every model with `1..=max_states` states over the given symbols, in a
/// fixed order: by size, then by the bits of the relations and valuations.
pub fn enumerate_models(actions: &[String], props: &[String], budget: &OracleBudget) -> Result<Vec<RelationalModel>> {
    let needed = (1..=budget.max_states).fold(0u128, |acc, n| acc.saturating_add(count(n, actions.len(), props.len())));
    if needed > budget.max_models {
        return Err(Error::OracleBudget { needed, limit: budget.max_models });
    }
    let mut out = Vec::with_capacity(needed as usize);
    for n in 1..=budget.max_states {
        let edge_bits = n * n;
        let bits = actions.len() * edge_bits + props.len() * n;
        for mask in 0..(1u64 << bits) {
            let mut m = RelationalModel::new(n);
            for (k, a) in actions.iter().enumerate() {
                m.declare_action(a);
                for e in 0..edge_bits {
                    if mask >> (k * edge_bits + e) & 1 == 1 {
                        m.add_edge(a, e / n, e % n)?;
                    }
                }
            }
            let off = actions.len() * edge_bits;
            for (k, p) in props.iter().enumerate() {
                m.declare_prop(p);
                for x in 0..n {
                    if mask >> (off + k * n + x) & 1 == 1 {
                        m.set_prop(p, x)?;
                    }
                }
            }
            out.push(m);
        }
    }
    Ok(out)
}

/// Looks for a small model where `e` and `f` denote different relations.
pub fn brute_oracle(e: &Expr, f: &Expr, budget: &OracleBudget) -> Result<OracleVerdict> {
    let actions: BTreeSet<String> = e.actions().iter().chain(&f.actions()).map(|s| s.name().into()).collect();
    let props: BTreeSet<String> = e.props().iter().chain(&f.props()).map(|s| s.name().into()).collect();
    let actions: Vec<String> = actions.into_iter().collect();
    let props: Vec<String> = props.into_iter().collect();
    let models = enumerate_models(&actions, &props, budget)?;
    let total = models.len();
    for model in models {
        let (re, rf) = (evaluate(e, &model)?, evaluate(f, &model)?);
        if re != rf {
            let pair = re.pairs().find(|&(x, y)| !rf.contains(x, y)).or_else(|| rf.pairs().find(|&(x, y)| !re.contains(x, y)));
            return Ok(OracleVerdict::Distinguished { model, pair: pair.expect("relations differ") });
        }
    }
    Ok(OracleVerdict::Same { models: total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn model_counts() {
        let b = OracleBudget { max_states: 2, max_models: 1000 };
        let ms = enumerate_models(&["a".into()], &["p".into()], &b).unwrap();
        assert_eq!(ms.len(), 4 + 64);
        let tight = OracleBudget { max_states: 3, max_models: 1000 };
        assert!(matches!(enumerate_models(&["a".into()], &["p".into()], &tight), Err(Error::OracleBudget { .. })));
    }

    #[test]
    fn examples() {
        let b = OracleBudget::default();
        let p = |s: &str| parse(s, &["p"]).unwrap();
        assert!(brute_oracle(&p("a"), &p("a + a"), &b).unwrap().is_same());
        assert!(!brute_oracle(&p("a"), &p("b"), &b).unwrap().is_same());
        let one = OracleBudget { max_states: 1, ..b };
        assert!(brute_oracle(&p("dom(p)"), &p("p"), &one).unwrap().is_same());
    }
}
