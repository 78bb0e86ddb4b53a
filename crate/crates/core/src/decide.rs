//! The decision procedure end to end.

use alloc::boxed::Box;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::canonical::{build_canonical_with, BuildOptions, CanonicalModel};
use crate::closure::{gamma_for_with, ClosureOptions};
use crate::error::{Error, Result};
use crate::guarded::{canonical_interpret, language_equal, GuardedString, LanguageComparison};
use crate::relational::{export_countermodel, Construction, RelationalModel};
use crate::syntax::Expr;

/// Which of the two expressions accepts the witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Evidence that two expressions differ.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub witness: GuardedString,
    pub side: Side,
    pub model: RelationalModel,
    /// The pair of states in the relation of exactly one side.
    pub point: (usize, usize),
    /// States traced by the witness.
    pub path: Vec<usize>,
    pub construction: Construction,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Equivalent,
    Nonequivalent(Box<Counterexample>),
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Equivalent => None,
            Verdict::Nonequivalent(c) => Some(c),
        }
    }
}

/// A verdict with the canonical model it was obtained in.
#[derive(Clone, Debug)]
pub struct Decision {
    pub verdict: Verdict,
    pub canonical: CanonicalModel,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DecideOptions {
    pub build: BuildOptions,
    pub closure: ClosureOptions,
}

fn check_vocabulary(e: &Expr, f: &Expr) -> Result<()> {
    let (ea, ep, fa, fp) = (e.actions(), e.props(), f.actions(), f.props());
    if let Some(s) = ea.intersection(&fp).chain(fa.intersection(&ep)).next() {
        return Err(Error::SymbolClash(s.name().to_string()));
    }
    Ok(())
}

pub fn decide(e: &Expr, f: &Expr) -> Result<Decision> {
    decide_with(e, f, &DecideOptions::default())
}

/// `e ≤ f`, decided as `e + f ≡ f`.
pub fn decide_leq(e: &Expr, f: &Expr) -> Result<Decision> {
    decide(&Expr::sum(e.clone(), f.clone()), f)
}

pub fn decide_leq_with(e: &Expr, f: &Expr, opts: &DecideOptions) -> Result<Decision> {
    decide_with(&Expr::sum(e.clone(), f.clone()), f, opts)
}

pub fn decide_with(e: &Expr, f: &Expr, opts: &DecideOptions) -> Result<Decision> {
    check_vocabulary(e, f)?;
    let gamma = gamma_for_with([e, f], &opts.closure)?;
    let canonical = build_canonical_with(&gamma, &opts.build)?;
    let a = canonical_interpret(e, &canonical)?;
    let b = canonical_interpret(f, &canonical)?;
    let verdict = match language_equal(&a, &b)? {
        LanguageComparison::Equal => Verdict::Equivalent,
        LanguageComparison::Witness(witness) => {
            let side = if a.accepts(&witness) { Side::Left } else { Side::Right };
            let cm = export_countermodel(&canonical, &witness, e, f)?;
            Verdict::Nonequivalent(Box::new(Counterexample {
                witness,
                side,
                model: cm.model,
                point: cm.point,
                path: cm.path,
                construction: cm.construction,
            }))
        }
    };
    Ok(Decision { verdict, canonical })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relational::evaluate;
    use crate::syntax::parse;

    fn eqv(e: &str, f: &str) -> bool {
        let e = parse(e, &["p", "q"]).unwrap();
        let f = parse(f, &["p", "q"]).unwrap();
        decide(&e, &f).unwrap().verdict.is_equivalent()
    }

    #[test]
    fn axioms_and_laws() {
        assert!(eqv("adom(a);a", "0"));
        assert!(eqv("dom(a*)", "1"));
        assert!(eqv("dom(a);a", "a"));
        assert!(eqv("<a>p;[a]!p", "0"));
        assert!(eqv("<a*>p", "p + <a><a*>p"));
        assert!(eqv("adom(a;b)", "adom(a;dom(b))"));
    }

    #[test]
    fn distinct_actions() {
        let (a, b) = (Expr::act("a"), Expr::act("b"));
        let d = decide(&a, &b).unwrap();
        let cx = d.verdict.counterexample().unwrap();
        assert_eq!(cx.witness.len(), 3);
        assert_eq!(cx.side, Side::Left);
        let (x, y) = cx.point;
        assert!(evaluate(&a, &cx.model).unwrap().contains(x, y));
        assert!(!evaluate(&b, &cx.model).unwrap().contains(x, y));
    }

    #[test]
    fn tests_do_not_commute_with_actions() {
        assert!(!eqv("p;a", "a;p"));
    }

    #[test]
    fn inequations() {
        let p = |s: &str| parse(s, &["p"]).unwrap();
        assert!(decide_leq(&p("p;a"), &p("a")).unwrap().verdict.is_equivalent());
        assert!(!decide_leq(&p("a"), &p("p;a")).unwrap().verdict.is_equivalent());
    }

    #[test]
    fn clash_between_sides() {
        let e = parse::<&str>("p", &[]).unwrap();
        let f = parse("p", &["p"]).unwrap();
        assert!(matches!(decide(&e, &f), Err(Error::SymbolClash(_))));
    }
}
