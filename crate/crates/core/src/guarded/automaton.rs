use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;
use hashbrown::HashMap;

use super::GuardedString;
use crate::canonical::{compile, AtomUniverse, CanonicalModel, StepTable};
use crate::error::{Error, Result};
use crate::syntax::{Expr, ExprKind, Symbol};

/// A position automaton over guarded strings.
///
/// Position 0 is the start; every other position stands for one action
/// occurrence and carries its label. Reading `G a H` from position `x`
/// moves to any `y` labelled `a` along an edge of `follow[x]` whose guard
/// contains `G`, provided `G -a-> H` is a step. A run ending at position
/// `x` on atom `G` accepts when `G ∈ accept[x]`. States therefore always
/// expect an action next, with the current atom known, which keeps every
/// accepted word alternating.
#[derive(Clone, Debug)]
pub struct GuardedAutomaton {
    universe: Arc<AtomUniverse>,
    steps: Arc<StepTable>,
    labels: Vec<Option<Symbol>>,
    follow: Vec<Vec<(FixedBitSet, usize)>>,
    accept: Vec<FixedBitSet>,
}

struct Frag {
    nullable: FixedBitSet,
    first: Vec<(FixedBitSet, usize)>,
    last: Vec<(usize, FixedBitSet)>,
}

#[derive(Clone, Copy)]
enum Tests {
    Canonical,
    /// Only literals over the universe's Γ.
    Standard,
}

struct Builder<'a> {
    universe: &'a Arc<AtomUniverse>,
    steps: &'a Arc<StepTable>,
    tests: Tests,
    labels: Vec<Option<Symbol>>,
    follow: Vec<BTreeMap<usize, FixedBitSet>>,
    domains: HashMap<Expr, FixedBitSet>,
}

fn and(a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
    let mut out = a.clone();
    out.intersect_with(b);
    out
}

impl Builder<'_> {
    fn all(&self) -> FixedBitSet {
        self.universe.all()
    }

    fn none(&self) -> FixedBitSet {
        self.universe.empty_set()
    }

    fn add_follow(&mut self, x: usize, guard: FixedBitSet, y: usize) {
        if guard.is_clear() {
            return;
        }
        self.follow[x].entry(y).or_insert_with(|| FixedBitSet::with_capacity(guard.len())).union_with(&guard);
    }

    fn test(&mut self, phi: &Expr) -> Result<FixedBitSet> {
        match self.tests {
            Tests::Canonical => self.canonical_test(phi),
            Tests::Standard => self.literal_test(phi),
        }
    }

    fn canonical_test(&mut self, phi: &Expr) -> Result<FixedBitSet> {
        Ok(match phi.kind() {
            ExprKind::Prop(_) => self.universe.satisfying(phi)?,
            ExprKind::Dom(y) => self.domain(y)?,
            ExprKind::Anti(y) => {
                let mut d = self.domain(y)?;
                d.toggle_range(..);
                d
            }
            _ => return Err(Error::Internal(alloc::format!("`{phi}` is not a test leaf"))),
        })
    }

    /// Atoms where some string of `y` starts.
    fn domain(&mut self, y: &Expr) -> Result<FixedBitSet> {
        if let Some(d) = self.domains.get(y) {
            return Ok(d.clone());
        }
        // The parameter must be expressible over Γ for the reading to be sound.
        compile(&Expr::dom(y.clone()), self.universe.gamma())?;
        let aut = build(y, self.universe, self.steps, Tests::Canonical)?;
        let d = aut.first_atoms();
        self.domains.insert(y.clone(), d.clone());
        Ok(d)
    }

    fn literal_test(&self, phi: &Expr) -> Result<FixedBitSet> {
        let positive = |e: &Expr| self.universe.gamma().index_of(e).map(|i| self.universe.positive(i));
        if let Some(s) = positive(phi) {
            return Ok(s);
        }
        if let ExprKind::Anti(g) = phi.kind() {
            if let Some(mut s) = positive(g) {
                s.toggle_range(..);
                return Ok(s);
            }
        }
        Err(Error::NotOverLiterals(phi.to_string()))
    }

    fn go(&mut self, e: &Expr) -> Result<Frag> {
        Ok(match e.kind() {
            ExprKind::Act(a) => {
                let y = self.labels.len();
                self.labels.push(Some(a.clone()));
                self.follow.push(BTreeMap::new());
                Frag { nullable: self.none(), first: alloc::vec![(self.all(), y)], last: alloc::vec![(y, self.all())] }
            }
            ExprKind::Zero => Frag { nullable: self.none(), first: Vec::new(), last: Vec::new() },
            ExprKind::One => Frag { nullable: self.all(), first: Vec::new(), last: Vec::new() },
            ExprKind::Prop(_) | ExprKind::Dom(_) | ExprKind::Anti(_) => {
                Frag { nullable: self.test(e)?, first: Vec::new(), last: Vec::new() }
            }
            ExprKind::Sum(l, r) => {
                let mut a = self.go(l)?;
                let b = self.go(r)?;
                a.nullable.union_with(&b.nullable);
                a.first.extend(b.first);
                a.last.extend(b.last);
                a
            }
            ExprKind::Prod(l, r) => {
                let a = self.go(l)?;
                let b = self.go(r)?;
                for (x, lx) in &a.last {
                    for (t, y) in &b.first {
                        self.add_follow(*x, and(lx, t), *y);
                    }
                }
                let mut first = a.first;
                for (t, y) in &b.first {
                    let g = and(&a.nullable, t);
                    if !g.is_clear() {
                        first.push((g, *y));
                    }
                }
                let mut last = b.last;
                for (x, lx) in a.last {
                    let g = and(&lx, &b.nullable);
                    if !g.is_clear() {
                        last.push((x, g));
                    }
                }
                Frag { nullable: and(&a.nullable, &b.nullable), first, last }
            }
            ExprKind::Star(b) => {
                let a = self.go(b)?;
                for (x, lx) in &a.last {
                    for (t, y) in &a.first {
                        self.add_follow(*x, and(lx, t), *y);
                    }
                }
                Frag { nullable: self.all(), first: a.first, last: a.last }
            }
        })
    }
}

fn build(e: &Expr, universe: &Arc<AtomUniverse>, steps: &Arc<StepTable>, tests: Tests) -> Result<GuardedAutomaton> {
    let mut b = Builder {
        universe,
        steps,
        tests,
        labels: alloc::vec![None],
        follow: alloc::vec![BTreeMap::new()],
        domains: HashMap::new(),
    };
    let frag = b.go(e)?;
    let n = b.labels.len();
    let mut accept = alloc::vec![universe.empty_set(); n];
    accept[0] = frag.nullable;
    for (x, l) in frag.last {
        accept[x].union_with(&l);
    }
    for (t, y) in frag.first {
        b.add_follow(0, t, y);
    }
    let follow = b.follow.into_iter().map(|m| m.into_iter().map(|(y, g)| (g, y)).collect()).collect();
    Ok(GuardedAutomaton { universe: universe.clone(), steps: steps.clone(), labels: b.labels, follow, accept })
}

/// The automaton of `⟦e⟧` over the consistent atoms and steps of `c`.
pub fn canonical_interpret(e: &Expr, c: &CanonicalModel) -> Result<GuardedAutomaton> {
    for p in e.props() {
        let p = Expr::prop_sym(p);
        if !c.gamma().contains(&p) {
            return Err(Error::ClosureDeficiency(p.to_string()));
        }
    }
    build(e, c.universe(), c.steps(), Tests::Canonical)
}

/// The automaton of `[e]` over `universe` with unconstrained steps.
///
/// Tests must be literals: a member of Γ or the antidomain of one.
pub fn standard_interpret(e: &Expr, universe: &Arc<AtomUniverse>) -> Result<GuardedAutomaton> {
    let steps = Arc::new(StepTable::complete(universe.len()));
    build(e, universe, &steps, Tests::Standard)
}

impl GuardedAutomaton {
    pub fn universe(&self) -> &Arc<AtomUniverse> {
        &self.universe
    }

    pub fn steps(&self) -> &Arc<StepTable> {
        &self.steps
    }

    /// Number of positions, the start included.
    pub fn positions(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, x: usize) -> Option<&Symbol> {
        self.labels[x].as_ref()
    }

    pub fn follow(&self, x: usize) -> &[(FixedBitSet, usize)] {
        &self.follow[x]
    }

    pub fn accept(&self, x: usize) -> &FixedBitSet {
        &self.accept[x]
    }

    /// Actions labelling some position, sorted by name.
    pub fn alphabet(&self) -> Vec<Symbol> {
        let mut v: Vec<Symbol> = self.labels.iter().flatten().cloned().collect();
        v.sort();
        v.dedup();
        v
    }

    /// Positions reached from `from` by reading action `a` at atom `g`.
    pub fn step_positions(&self, from: impl IntoIterator<Item = usize>, g: usize, a: &Symbol, out: &mut Vec<usize>) {
        out.clear();
        for x in from {
            for (t, y) in &self.follow[x] {
                if t.contains(g) && self.labels[*y].as_ref() == Some(a) {
                    out.push(*y);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
    }

    pub fn accepting(&self, positions: &[usize], g: usize) -> bool {
        positions.iter().any(|&x| self.accept[x].contains(g))
    }

    pub fn accepts(&self, w: &GuardedString) -> bool {
        if !super::same_universe(&self.universe, w.universe()) {
            return false;
        }
        let mut current = alloc::vec![0usize];
        let mut next = Vec::new();
        for (i, a) in w.actions().iter().enumerate() {
            let (g, h) = (w.atoms()[i], w.atoms()[i + 1]);
            if !self.steps.get(a).has(g, h) {
                return false;
            }
            self.step_positions(current.iter().copied(), g, a, &mut next);
            core::mem::swap(&mut current, &mut next);
            if current.is_empty() {
                return false;
            }
        }
        self.accepting(&current, w.last())
    }

    /// Atoms at which some accepted string starts.
    pub fn first_atoms(&self) -> FixedBitSet {
        let n = self.positions();
        let mut w: Vec<FixedBitSet> = self.accept.clone();
        loop {
            let mut changed = false;
            for x in (0..n).rev() {
                let mut acc = w[x].clone();
                for (t, y) in &self.follow[x] {
                    let a = self.labels[*y].as_ref().expect("action position");
                    let mut pre = self.steps.get(a).pre(&w[*y]);
                    pre.intersect_with(t);
                    acc.union_with(&pre);
                }
                if acc != w[x] {
                    w[x] = acc;
                    changed = true;
                }
            }
            if !changed {
                return w.swap_remove(0);
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.first_atoms().is_clear()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::build_canonical;
    use crate::closure::gamma_for;
    use crate::syntax::parse;

    fn model(exprs: &[&Expr]) -> CanonicalModel {
        build_canonical(&gamma_for(exprs.iter().copied()).unwrap()).unwrap()
    }

    #[test]
    fn one_accepts_all_atoms() {
        let one = Expr::one();
        let c = model(&[&one]);
        let a = canonical_interpret(&one, &c).unwrap();
        assert_eq!(a.first_atoms(), c.universe().all());
        let z = canonical_interpret(&Expr::zero(), &c).unwrap();
        assert!(z.is_empty());
    }

    #[test]
    fn antidomain_then_action_is_empty() {
        let e = parse::<&str>("adom(a);a", &[]).unwrap();
        let c = model(&[&e]);
        assert!(canonical_interpret(&e, &c).unwrap().is_empty());
    }

    #[test]
    fn action_accepts_its_steps() {
        let e = parse("a;p", &["p"]).unwrap();
        let c = model(&[&e]);
        let aut = canonical_interpret(&e, &c).unwrap();
        let a = Symbol::new("a", 0);
        let pi = c.gamma().index_of(&Expr::prop("p")).unwrap();
        for g in 0..c.len() {
            for h in 0..c.len() {
                let w = GuardedString::new(c.universe().clone(), alloc::vec![g, h], alloc::vec![a.clone()]).unwrap();
                let expected = c.step(&a, g, h) && c.universe().atom(h).holds(pi);
                assert_eq!(aut.accepts(&w), expected);
            }
        }
    }

    #[test]
    fn domain_is_first_atoms() {
        let e = parse("a;p;b", &["p"]).unwrap();
        let d = Expr::dom(e.clone());
        let c = model(&[&d]);
        let ae = canonical_interpret(&e, &c).unwrap();
        let ad = canonical_interpret(&d, &c).unwrap();
        assert_eq!(ad.first_atoms(), ae.first_atoms());
        let an = canonical_interpret(&Expr::anti(e), &c).unwrap();
        let mut comp = ae.first_atoms();
        comp.toggle_range(..);
        assert_eq!(an.first_atoms(), comp);
    }

    #[test]
    fn standard_requires_literals() {
        let p = Expr::prop("p");
        let c = model(&[&p]);
        let e = parse("p;a;adom(p)", &["p"]).unwrap();
        assert!(standard_interpret(&e, c.universe()).is_ok());
        let bad = parse("adom(a)", &["p"]).unwrap();
        assert!(matches!(standard_interpret(&bad, c.universe()), Err(Error::NotOverLiterals(_))));
    }
}
