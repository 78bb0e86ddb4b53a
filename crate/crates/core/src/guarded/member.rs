use alloc::string::ToString;

use fixedbitset::FixedBitSet;
use hashbrown::HashMap;

use super::GuardedString;
use crate::canonical::CanonicalModel;
use crate::error::{Error, Result};
use crate::relational::{extension, RelationalModel};
use crate::syntax::{Expr, ExprKind};

struct Matcher<'a> {
    w: &'a GuardedString,
    c: &'a CanonicalModel,
    model: RelationalModel,
    truth: HashMap<Expr, FixedBitSet>,
    memo: HashMap<(Expr, usize, usize), bool>,
}

impl Matcher<'_> {
    fn holds(&mut self, phi: &Expr, g: usize) -> Result<bool> {
        if let Some(t) = self.truth.get(phi) {
            return Ok(t.contains(g));
        }
        let t = extension(phi, &self.model)?;
        let v = t.contains(g);
        self.truth.insert(phi.clone(), t);
        Ok(v)
    }

    /// Whether the segment from atom `i` to atom `j` belongs to `e`.
    fn m(&mut self, e: &Expr, i: usize, j: usize) -> Result<bool> {
        let key = (e.clone(), i, j);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let atoms = self.w.atoms();
        let v = match e.kind() {
            ExprKind::Act(a) => {
                j == i + 1 && self.w.actions()[i] == *a && self.c.step(a, atoms[i], atoms[j])
            }
            ExprKind::Zero => false,
            ExprKind::One => i == j,
            ExprKind::Prop(_) | ExprKind::Dom(_) | ExprKind::Anti(_) => i == j && self.holds(e, atoms[i])?,
            ExprKind::Sum(l, r) => self.m(l, i, j)? || self.m(r, i, j)?,
            ExprKind::Prod(l, r) => {
                let mut found = false;
                for k in i..=j {
                    if self.m(l, i, k)? && self.m(r, k, j)? {
                        found = true;
                        break;
                    }
                }
                found
            }
            ExprKind::Star(b) => {
                let mut found = i == j;
                for k in i + 1..=j {
                    if found {
                        break;
                    }
                    found = self.m(b, i, k)? && self.m(e, k, j)?;
                }
                found
            }
        };
        self.memo.insert(key, v);
        Ok(v)
    }
}

/// Membership of `w` in `⟦e⟧` by matching segments of `w` against
/// subexpressions. Tests are evaluated in `c` as a relational model, so the
/// answer does not depend on any automaton.
pub fn member(w: &GuardedString, e: &Expr, c: &CanonicalModel) -> Result<bool> {
    if !super::same_universe(w.universe(), c.universe()) {
        return Err(Error::AtomMismatch);
    }
    for p in e.props() {
        let p = Expr::prop_sym(p);
        if !c.gamma().contains(&p) {
            return Err(Error::ClosureDeficiency(p.to_string()));
        }
    }
    let mut actions = e.actions();
    actions.extend(w.actions().iter().cloned());
    let model = c.to_relational(&actions, &e.props());
    let mut m = Matcher { w, c, model, truth: HashMap::new(), memo: HashMap::new() };
    m.m(e, 0, w.atoms().len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::build_canonical;
    use crate::closure::gamma_for;
    use crate::syntax::{parse, Symbol};
    use alloc::vec;

    #[test]
    fn atoms_and_steps() {
        let e = parse::<&str>("a + b", &[]).unwrap();
        let c = build_canonical(&gamma_for([&e]).unwrap()).unwrap();
        let u = c.universe().clone();
        let g = GuardedString::atom(u.clone(), 0).unwrap();
        assert!(member(&g, &Expr::one(), &c).unwrap());
        assert!(!member(&g, &Expr::zero(), &c).unwrap());
        let gah = GuardedString::new(u, vec![0, 0], vec![Symbol::new("a", 0)]).unwrap();
        assert!(member(&gah, &Expr::act("a"), &c).unwrap());
        assert!(!member(&gah, &Expr::act("b"), &c).unwrap());
        assert!(member(&gah, &e, &c).unwrap());
    }

    #[test]
    fn star_splits() {
        let e = parse("(a;p)*", &["p"]).unwrap();
        let c = build_canonical(&gamma_for([&e]).unwrap()).unwrap();
        let pi = c.gamma().index_of(&Expr::prop("p")).unwrap();
        let u = c.universe().clone();
        let with_p = (0..c.len()).find(|&g| u.atom(g).holds(pi)).unwrap();
        let without = (0..c.len()).find(|&g| !u.atom(g).holds(pi)).unwrap();
        let a = Symbol::new("a", 0);
        let w = GuardedString::new(u.clone(), vec![without, with_p, with_p], vec![a.clone(), a.clone()]).unwrap();
        assert!(member(&w, &e, &c).unwrap());
        let w = GuardedString::new(u, vec![with_p, without, with_p], vec![a.clone(), a]).unwrap();
        assert!(!member(&w, &e, &c).unwrap());
    }
}
