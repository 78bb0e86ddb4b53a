//! Seeded random expressions, pairs and law substitutions.

use kadt_core::laws::Substitution;
use kadt_core::{Expr, ExprKind, FragmentId, Symbol};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Which operators the generator may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// The whole language.
    Full,
    /// Kleene algebra with tests: no domain, antidomain only on propositions.
    Kat,
    /// No propositions.
    Aka,
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub rng: ChaCha8Rng,
    actions: Vec<Symbol>,
    props: Vec<Symbol>,
    shape: Shape,
}

/// Symbols indexed by position, as a vocabulary would number them.
pub fn symbols(names: &[&str]) -> Vec<Symbol> {
    names.iter().enumerate().map(|(i, n)| Symbol::new(n, i as u32)).collect()
}

impl Generator {
    pub fn new(seed: u64, actions: &[&str], props: &[&str], shape: Shape) -> Self {
        let props = if shape == Shape::Aka { Vec::new() } else { symbols(props) };
        Generator { rng: ChaCha8Rng::seed_from_u64(seed), actions: symbols(actions), props, shape }
    }

    pub fn actions(&self) -> &[Symbol] {
        &self.actions
    }

    pub fn props(&self) -> &[Symbol] {
        &self.props
    }

    fn leaf(&mut self) -> Expr {
        let n = self.actions.len() + self.props.len();
        let k = self.rng.gen_range(0..n + 2);
        if k < self.actions.len() {
            Expr::act_sym(self.actions[k].clone())
        } else if k < n {
            Expr::prop_sym(self.props[k - self.actions.len()].clone())
        } else if k == n {
            Expr::zero()
        } else {
            Expr::one()
        }
    }

    fn prop_leaf(&mut self) -> Expr {
        match self.props.choose(&mut self.rng) {
            Some(p) => Expr::prop_sym(p.clone()),
            None => Expr::one(),
        }
    }

    /// An expression with exactly `size` nodes (when the shape allows it).
    pub fn expr(&mut self, size: usize) -> Expr {
        match size {
            0 | 1 => self.leaf(),
            2 => {
                if self.shape == Shape::Kat && !self.props.is_empty() && self.rng.gen_bool(0.3) {
                    return Expr::anti(self.prop_leaf());
                }
                let b = self.leaf();
                self.unary(b)
            }
            _ => {
                if self.rng.gen_bool(0.25) {
                    let b = self.expr(size - 1);
                    self.unary(b)
                } else {
                    let k = self.rng.gen_range(1..size - 1);
                    let (l, r) = (self.expr(k), self.expr(size - 1 - k));
                    if self.rng.gen_bool(0.5) {
                        Expr::sum(l, r)
                    } else {
                        Expr::prod(l, r)
                    }
                }
            }
        }
    }

    fn unary(&mut self, b: Expr) -> Expr {
        match self.shape {
            Shape::Kat => Expr::star(b),
            Shape::Full | Shape::Aka => match self.rng.gen_range(0..3) {
                0 => Expr::star(b),
                1 => Expr::dom(b),
                _ => Expr::anti(b),
            },
        }
    }

    /// An expression of a uniformly chosen size in `1..=max`.
    pub fn expr_upto(&mut self, max: usize) -> Expr {
        let n = self.rng.gen_range(1..=max.max(1));
        self.expr(n)
    }

    /// A formula with at most `size` nodes.
    pub fn formula(&mut self, size: usize) -> Expr {
        if size <= 1 {
            return match self.rng.gen_range(0..4) {
                0 => Expr::one(),
                1 => Expr::zero(),
                _ => self.prop_leaf(),
            };
        }
        match self.rng.gen_range(0..3) {
            0 => {
                let b = self.expr(size - 1);
                if self.rng.gen_bool(0.5) {
                    Expr::dom(b)
                } else {
                    Expr::anti(b)
                }
            }
            _ if size >= 3 => {
                let k = self.rng.gen_range(1..size - 1);
                let (l, r) = (self.formula(k), self.formula(size - 1 - k));
                if self.rng.gen_bool(0.5) {
                    Expr::sum(l, r)
                } else {
                    Expr::prod(l, r)
                }
            }
            _ => self.formula(1),
        }
    }

    pub fn formula_upto(&mut self, max: usize) -> Expr {
        let n = self.rng.gen_range(1..=max.max(1));
        self.formula(n)
    }

    /// A pair of expressions of size at most `max`.
    ///
    /// A third of the pairs are independent, a third rewrite one side with a
    /// sound identity (mostly equivalent) and a third change one leaf
    /// (near misses).
    pub fn pair(&mut self, max: usize) -> (Expr, Expr) {
        let e = self.expr_upto(max);
        match self.rng.gen_range(0..3) {
            0 => (e, self.expr_upto(max)),
            1 => {
                for _ in 0..8 {
                    let f = self.rewrite(&e);
                    if f.size() <= max && self.fits(&f) {
                        return (e, f);
                    }
                }
                (e.clone(), e)
            }
            _ => {
                let f = self.mutate(&e);
                (e, f)
            }
        }
    }

    fn fits(&self, e: &Expr) -> bool {
        let k = match self.shape {
            Shape::Full => return true,
            Shape::Kat => FragmentId::Kat,
            Shape::Aka => FragmentId::AKa,
        };
        kadt_core::syntax::in_fragment(e, k, &Default::default())
    }

    /// Replaces one random subterm by an equivalent one.
    pub fn rewrite(&mut self, e: &Expr) -> Expr {
        let subs = e.subexpressions();
        let target = self.rng.gen_range(0..subs.len());
        let mut k = 0;
        self.rewrite_at(e, target, &mut k)
    }

    fn rewrite_at(&mut self, e: &Expr, target: usize, k: &mut usize) -> Expr {
        if *k == target {
            *k += e.size();
            return self.identity(e);
        }
        *k += 1;
        match e.kind() {
            ExprKind::Sum(l, r) => {
                let l = self.rewrite_at(l, target, k);
                Expr::sum(l, self.rewrite_at(r, target, k))
            }
            ExprKind::Prod(l, r) => {
                let l = self.rewrite_at(l, target, k);
                Expr::prod(l, self.rewrite_at(r, target, k))
            }
            ExprKind::Star(b) => Expr::star(self.rewrite_at(b, target, k)),
            ExprKind::Anti(b) => Expr::anti(self.rewrite_at(b, target, k)),
            ExprKind::Dom(b) => Expr::dom(self.rewrite_at(b, target, k)),
            _ => e.clone(),
        }
    }

    fn identity(&mut self, e: &Expr) -> Expr {
        let kind = e.kind().clone();
        let options: Vec<Expr> = match &kind {
            ExprKind::Sum(l, r) => vec![Expr::sum(r.clone(), l.clone()), Expr::sum(e.clone(), l.clone())],
            ExprKind::Prod(l, r) => match l.kind() {
                ExprKind::Sum(x, y) => vec![Expr::sum(Expr::prod(x.clone(), r.clone()), Expr::prod(y.clone(), r.clone()))],
                ExprKind::Prod(x, y) => vec![Expr::prod(x.clone(), Expr::prod(y.clone(), r.clone()))],
                _ if l.is_formula() && r.is_formula() => vec![Expr::prod(r.clone(), l.clone())],
                _ => vec![Expr::prod(e.clone(), Expr::one())],
            },
            ExprKind::Star(b) => vec![
                Expr::sum(Expr::one(), Expr::prod(b.clone(), e.clone())),
                Expr::sum(Expr::one(), Expr::prod(e.clone(), b.clone())),
                Expr::star(Expr::star(b.clone())),
            ],
            ExprKind::Dom(b) => {
                let mut v = vec![Expr::anti(Expr::anti(b.clone()))];
                if b.is_formula() {
                    v.push(b.clone());
                }
                if let ExprKind::Star(_) = b.kind() {
                    v.push(Expr::one());
                }
                v
            }
            ExprKind::Anti(b) => match b.kind() {
                ExprKind::Prod(x, y) if !y.is_formula() => vec![Expr::anti(Expr::prod(x.clone(), Expr::dom(y.clone())))],
                _ => vec![Expr::dom(e.clone()), Expr::prod(e.clone(), e.clone())],
            },
            _ => vec![Expr::prod(Expr::one(), e.clone()), Expr::sum(e.clone(), Expr::zero()), Expr::sum(e.clone(), e.clone())],
        };
        options.choose(&mut self.rng).cloned().unwrap_or_else(|| e.clone())
    }

    /// Replaces one random leaf by a random leaf.
    pub fn mutate(&mut self, e: &Expr) -> Expr {
        let leaves = e.subexpressions().into_iter().filter(|x| x.children().next().is_none()).count();
        let target = self.rng.gen_range(0..leaves);
        let mut k = 0;
        let replacement = self.leaf();
        let out = e.map_leaves(&mut |x| {
            if x.children().next().is_some() {
                return None;
            }
            k += 1;
            (k - 1 == target).then(|| replacement.clone())
        });
        if self.fits(&out) {
            out
        } else {
            e.clone()
        }
    }
}

/// Substitutions for the law templates over actions `a`, `b` and the
/// proposition `p`, every value of size at most 6.
///
/// Every fourth entry is random. The others pick `g` and `phi` so that the
/// hypotheses of the conditional laws hold where the size bound allows:
/// `g = e*;f` or `f;e*`, `phi = dom(e*;p)` or `[e*]p`, and `e = adom(f)` or
/// `phi = adom(e)`.
pub fn law_pool(count: usize, seed: u64) -> Vec<Substitution> {
    const MAX: usize = 6;
    let mut g = Generator::new(seed, &["a", "b"], &["p"], Shape::Full);
    let p = Expr::prop_sym(g.props()[0].clone());
    let mut out: Vec<Substitution> = Vec::with_capacity(count);
    let mut seen = std::collections::HashSet::new();
    while out.len() < count {
        let mode = out.len() % 4;
        let bound = if mode == 0 { MAX } else { 3 };
        let e = g.expr_upto(bound);
        let f = g.expr_upto(bound);
        let (e, gg, phi) = match mode {
            0 => (e, None, None),
            1 => {
                let gg = Expr::prod(Expr::star(e.clone()), f.clone());
                let phi = Expr::dom(Expr::prod(Expr::star(e.clone()), p.clone()));
                (e, Some(gg), Some(phi))
            }
            2 => {
                let gg = Expr::prod(f.clone(), Expr::star(e.clone()));
                let phi = Expr::anti(Expr::prod(Expr::star(e.clone()), Expr::anti(p.clone())));
                (e, Some(gg), Some(phi))
            }
            _ => {
                let phi = Expr::anti(e.clone());
                (Expr::anti(f.clone()), None, Some(phi))
            }
        };
        let gg = gg.filter(|x| x.size() <= MAX).unwrap_or_else(|| g.expr_upto(MAX));
        let phi = phi.filter(|x| x.size() <= MAX).unwrap_or_else(|| g.formula_upto(MAX));
        let psi = g.formula_upto(MAX);
        if e.size() > MAX || !seen.insert((e.clone(), f.clone(), gg.clone(), phi.clone())) {
            continue;
        }
        out.push(Substitution::new([
            ("e", e),
            ("f", f),
            ("g", gg),
            ("phi", phi),
            ("psi", psi),
            ("p", p.clone()),
        ]));
    }
    out
}
