//! The congruence axioms and derived laws as checkable templates.
//!
//! Templates are written in the concrete syntax. The actions `e`, `f`, `g`
//! stand for arbitrary expressions, the propositions `phi`, `psi` for
//! formulas and `p` for a proposition.

use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::decide::{decide_leq_with, decide_with, DecideOptions};
use crate::error::{Error, Result};
use crate::syntax::{Expr, ExprKind, Vocabulary};

/// How two sides are related.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    /// `left + right ≡ right`.
    Leq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Axiom,
    Derived,
    /// Needed for a congruence of Kleene algebras but missing from the list.
    Supplementary,
}

#[derive(Clone, Debug)]
pub struct Clause {
    pub left: &'static str,
    pub rel: Relation,
    pub right: &'static str,
}

#[derive(Clone, Debug)]
pub struct LawEntry {
    /// Number and optional suffix, e.g. `2a`.
    pub name: &'static str,
    pub source: Source,
    /// Empty for plain laws.
    pub hypotheses: Vec<Clause>,
    pub conclusion: Clause,
}

const fn eq(left: &'static str, right: &'static str) -> Clause {
    Clause { left, rel: Relation::Eq, right }
}

const fn leq(left: &'static str, right: &'static str) -> Clause {
    Clause { left, rel: Relation::Leq, right }
}

fn law(name: &'static str, source: Source, conclusion: Clause) -> LawEntry {
    LawEntry { name, source, hypotheses: Vec::new(), conclusion }
}

fn cond(name: &'static str, source: Source, hyp: Clause, conclusion: Clause) -> LawEntry {
    LawEntry { name, source, hypotheses: alloc::vec![hyp], conclusion }
}

/// Axioms 1 to 16, derived laws 17 to 34 and the supplementary ones.
///
/// Axiom 4 reads `0 + e ≡ e ≡ e + 0`; an equivalence with `0` in the middle
/// would collapse every expression. Biconditionals appear once per direction.
pub fn corpus() -> Vec<LawEntry> {
    use Source::*;
    alloc::vec![
        law("1", Axiom, eq("(e;f);g", "e;(f;g)")),
        law("2a", Axiom, eq("e;1", "e")),
        law("2b", Axiom, eq("1;e", "e")),
        law("3", Axiom, eq("(e + f) + g", "e + (f + g)")),
        law("4a", Axiom, eq("0 + e", "e")),
        law("4b", Axiom, eq("e + 0", "e")),
        law("5", Axiom, eq("e", "e + e")),
        law("6", Axiom, eq("e;(f + g)", "e;f + e;g")),
        law("7", Axiom, eq("(e + f);g", "e;g + f;g")),
        law("8", Axiom, leq("1 + e;e*", "e*")),
        law("9", Axiom, leq("1 + e*;e", "e*")),
        cond("10", Axiom, leq("f + e;g", "g"), leq("e*;f", "g")),
        cond("11", Axiom, leq("f + g;e", "g"), leq("f;e*", "g")),
        law("12", Axiom, eq("adom(e);e", "0")),
        law("13", Axiom, eq("adom(e;f)", "adom(e;dom(f))")),
        law("14", Axiom, eq("adom(e) + dom(e)", "1")),
        law("15", Axiom, eq("dom(p)", "p")),
        law("16", Axiom, eq("dom(e)", "adom(adom(e))")),
        law("17", Derived, eq("dom(adom(e))", "adom(e)")),
        law("18", Derived, eq("adom(1)", "0")),
        law("19", Derived, eq("adom(0)", "1")),
        law("20", Derived, eq("dom(e + f)", "dom(e) + dom(f)")),
        law("21", Derived, eq("dom(dom(e);f)", "dom(e);dom(f)")),
        law("22", Derived, eq("dom(e);e", "e")),
        law("23", Derived, eq("dom(e*)", "1")),
        cond("24a", Derived, eq("e;dom(f)", "0"), eq("e;f", "0")),
        cond("24b", Derived, eq("e;f", "0"), eq("e;dom(f)", "0")),
        law("25", Derived, eq("phi;adom(phi)", "0")),
        law("26", Derived, eq("phi + adom(phi)", "1")),
        law("27", Derived, eq("adom(adom(phi))", "phi")),
        cond("28a", Derived, eq("phi;e", "0"), leq("phi", "adom(e)")),
        cond("28b", Derived, leq("phi", "adom(e)"), eq("phi;e", "0")),
        law("29", Derived, eq("phi;phi", "phi")),
        law("30", Derived, eq("phi;psi", "psi;phi")),
        law("31", Derived, eq("dom(phi)", "phi")),
        cond("32", Derived, leq("dom(e;phi)", "phi"), leq("dom(e*;phi)", "phi")),
        cond("33", Derived, leq("phi", "adom(e;adom(phi))"), leq("phi", "adom(e*;adom(phi))")),
        cond("34", Derived, leq("e;phi", "phi;(e;phi)"), leq("e*;phi", "phi;(e*;phi)")),
        law("S1", Supplementary, eq("e + f", "f + e")),
        law("S2a", Supplementary, eq("0;e", "0")),
        law("S2b", Supplementary, eq("e;0", "0")),
    ]
}

/// Values for the metavariables of a template.
#[derive(Clone, Debug, Default)]
pub struct Substitution {
    pub exprs: HashMap<&'static str, Expr>,
}

impl Substitution {
    pub fn new(pairs: impl IntoIterator<Item = (&'static str, Expr)>) -> Self {
        Substitution { exprs: pairs.into_iter().collect() }
    }
}

const FORMULA_VARS: [&str; 3] = ["phi", "psi", "p"];

fn template(text: &str) -> Result<Expr> {
    Vocabulary::with_props(&FORMULA_VARS)?.parse(text)
}

/// The metavariables a law mentions.
pub fn metavariables(law: &LawEntry) -> Result<Vec<&'static str>> {
    let mut names: Vec<&'static str> = Vec::new();
    let clauses = law.hypotheses.iter().chain(core::iter::once(&law.conclusion));
    for c in clauses {
        for side in [c.left, c.right] {
            let t = template(side)?;
            for s in t.actions().iter().chain(&t.props()) {
                for v in ["e", "f", "g", "phi", "psi", "p"] {
                    if s.name() == v && !names.contains(&v) {
                        names.push(v);
                    }
                }
            }
        }
    }
    Ok(names)
}

/// Fills in a template.
pub fn instantiate(text: &str, subst: &Substitution) -> Result<Expr> {
    let t = template(text)?;
    let mut missing = None;
    let e = t.map_leaves(&mut |x| match x.kind() {
        ExprKind::Act(s) | ExprKind::Prop(s) => match subst.exprs.get(s.name()) {
            Some(v) => Some(v.clone()),
            None => {
                missing = Some(String::from(s.name()));
                None
            }
        },
        _ => None,
    });
    if let Some(m) = missing {
        return Err(Error::UnnamedSymbol(m));
    }
    for v in FORMULA_VARS {
        if let Some(x) = subst.exprs.get(v) {
            if !x.is_formula() || (v == "p" && !matches!(x.kind(), ExprKind::Prop(_))) {
                return Err(Error::NotAFormula(alloc::format!("{x}")));
            }
        }
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LawOutcome {
    Holds,
    /// A conditional law whose hypothesis is not derivable here.
    Vacuous,
    /// The conclusion fails (or the hypothesis held but the conclusion not).
    Fails { left: Expr, right: Expr },
}

fn holds(c: &Clause, subst: &Substitution, opts: &DecideOptions) -> Result<(bool, Expr, Expr)> {
    let l = instantiate(c.left, subst)?;
    let r = instantiate(c.right, subst)?;
    let d = match c.rel {
        Relation::Eq => decide_with(&l, &r, opts)?,
        Relation::Leq => decide_leq_with(&l, &r, opts)?,
    };
    Ok((d.verdict.is_equivalent(), l, r))
}

/// Checks one instance of a law.
pub fn check(law: &LawEntry, subst: &Substitution, opts: &DecideOptions) -> Result<LawOutcome> {
    for h in &law.hypotheses {
        if !holds(h, subst, opts)?.0 {
            return Ok(LawOutcome::Vacuous);
        }
    }
    let (ok, left, right) = holds(&law.conclusion, subst, opts)?;
    Ok(if ok { LawOutcome::Holds } else { LawOutcome::Fails { left, right } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn s(pairs: &[(&'static str, &str)]) -> Substitution {
        Substitution::new(pairs.iter().map(|(k, v)| (*k, parse(v, &["p"]).unwrap())))
    }

    #[test]
    fn corpus_shape() {
        let c = corpus();
        let axioms: alloc::collections::BTreeSet<_> =
            c.iter().filter(|l| l.source == Source::Axiom).map(|l| l.name.trim_end_matches(['a', 'b'])).collect();
        assert_eq!(axioms.len(), 16);
        let derived: alloc::collections::BTreeSet<_> =
            c.iter().filter(|l| l.source == Source::Derived).map(|l| l.name.trim_end_matches(['a', 'b'])).collect();
        assert_eq!(derived.len(), 18);
        for l in &c {
            assert!(!metavariables(l).unwrap().is_empty() || l.name == "18" || l.name == "19");
        }
    }

    #[test]
    fn associativity_instance() {
        let law = corpus().into_iter().find(|l| l.name == "1").unwrap();
        let sub = s(&[("e", "a"), ("f", "b"), ("g", "c")]);
        assert_eq!(check(&law, &sub, &DecideOptions::default()).unwrap(), LawOutcome::Holds);
    }

    #[test]
    fn conditional_instances() {
        let opts = DecideOptions::default();
        let l33 = corpus().into_iter().find(|l| l.name == "33").unwrap();
        let out = check(&l33, &s(&[("e", "a"), ("phi", "p")]), &opts).unwrap();
        assert_eq!(out, LawOutcome::Vacuous);
        let out = check(&l33, &s(&[("e", "a"), ("phi", "[a*]p")]), &opts).unwrap();
        assert_eq!(out, LawOutcome::Holds);
        let l10 = corpus().into_iter().find(|l| l.name == "10").unwrap();
        let out = check(&l10, &s(&[("e", "a"), ("f", "b"), ("g", "a*;b")]), &opts).unwrap();
        assert_eq!(out, LawOutcome::Holds);
    }

    #[test]
    fn formula_slots_reject_programs() {
        let law = corpus().into_iter().find(|l| l.name == "29").unwrap();
        assert!(check(&law, &s(&[("phi", "a")]), &DecideOptions::default()).is_err());
    }

    #[test]
    fn a_false_law_is_caught() {
        let bogus = LawEntry { name: "x", source: Source::Axiom, hypotheses: Vec::new(), conclusion: eq("e;f", "f;e") };
        let out = check(&bogus, &s(&[("e", "a"), ("f", "b")]), &DecideOptions::default()).unwrap();
        assert!(matches!(out, LawOutcome::Fails { .. }));
    }
}
