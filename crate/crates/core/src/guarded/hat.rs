use alloc::string::ToString;
use alloc::vec::Vec;

use crate::canonical::logic::compile_dom;
use crate::canonical::{AtomUniverse, BoolExpr, CanonicalModel};
use crate::closure::ParameterSet;
use crate::error::{Error, Result};
use crate::syntax::{Expr, ExprKind};

/// Atom `g` as the product of its signed parameters.
pub fn atom_expr(universe: &AtomUniverse, g: usize) -> Expr {
    let atom = universe.atom(g);
    Expr::prod_all(universe.gamma().iter().enumerate().map(|(i, p)| {
        if atom.holds(i) {
            p.clone()
        } else {
            Expr::anti(p.clone())
        }
    }))
}

/// Replaces tests and actions by sums of consistent atoms and steps:
/// a formula becomes the sum of atoms satisfying it, `1` the sum of all
/// atoms and an action `a` the sum of its steps `G;a;H`.
pub fn hat(e: &Expr, c: &CanonicalModel) -> Result<Expr> {
    let u = c.universe();
    Ok(match e.kind() {
        ExprKind::Zero => Expr::zero(),
        ExprKind::One => Expr::sum_all((0..u.len()).map(|g| atom_expr(u, g))),
        ExprKind::Act(a) => {
            let rel = c.steps().get(a);
            let mut terms = Vec::new();
            for g in 0..u.len() {
                for h in rel.successors(g).ones() {
                    terms.push(Expr::prod_all([atom_expr(u, g), e.clone(), atom_expr(u, h)]));
                }
            }
            Expr::sum_all(terms)
        }
        ExprKind::Prop(_) | ExprKind::Dom(_) | ExprKind::Anti(_) => {
            let set = u.satisfying(e)?;
            Expr::sum_all(set.ones().map(|g| atom_expr(u, g)))
        }
        ExprKind::Sum(l, r) => Expr::sum(hat(l, c)?, hat(r, c)?),
        ExprKind::Prod(l, r) => Expr::prod(hat(l, c)?, hat(r, c)?),
        ExprKind::Star(b) => Expr::star(hat(b, c)?),
    })
}

/// The member of Γ standing for `dom(x)`.
fn dom_parameter(x: &Expr, gamma: &ParameterSet) -> Result<Option<Expr>> {
    match compile_dom(x, gamma) {
        Ok(BoolExpr::Var(i)) => Ok(Some(gamma.get(i).clone())),
        Ok(_) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Rewrites `e` so that every test is a parameter of Γ or the antidomain
/// of one, using `dom(x) = x?` and `adom(x) = adom(x?)`.
pub fn normalize_to_kat(e: &Expr, gamma: &ParameterSet) -> Result<Expr> {
    Ok(match e.kind() {
        ExprKind::Act(_) | ExprKind::Zero | ExprKind::One => e.clone(),
        ExprKind::Prop(_) => {
            if !gamma.contains(e) {
                return Err(Error::ClosureDeficiency(e.to_string()));
            }
            e.clone()
        }
        ExprKind::Dom(x) => match dom_parameter(x, gamma)? {
            Some(p) => p,
            None => normalize_to_kat(x, gamma)?,
        },
        ExprKind::Anti(x) => match dom_parameter(x, gamma)? {
            Some(p) => Expr::anti(p),
            None => {
                // Only formulas fall through here; negate by De Morgan.
                negate(x, gamma)?
            }
        },
        ExprKind::Sum(l, r) => Expr::sum(normalize_to_kat(l, gamma)?, normalize_to_kat(r, gamma)?),
        ExprKind::Prod(l, r) => Expr::prod(normalize_to_kat(l, gamma)?, normalize_to_kat(r, gamma)?),
        ExprKind::Star(b) => Expr::star(normalize_to_kat(b, gamma)?),
    })
}

fn negate(phi: &Expr, gamma: &ParameterSet) -> Result<Expr> {
    Ok(match phi.kind() {
        ExprKind::Zero => Expr::one(),
        ExprKind::One => Expr::zero(),
        ExprKind::Sum(l, r) => Expr::prod(negate(l, gamma)?, negate(r, gamma)?),
        ExprKind::Prod(l, r) => Expr::sum(negate(l, gamma)?, negate(r, gamma)?),
        ExprKind::Anti(x) => normalize_to_kat(&Expr::dom(x.clone()), gamma)?,
        ExprKind::Prop(_) | ExprKind::Dom(_) => match normalize_to_kat(phi, gamma)? {
            n if n.is_parameter() => Expr::anti(n),
            n => negate(&n, gamma)?,
        },
        _ => return Err(Error::NotAFormula(phi.to_string())),
    })
}
