//! Finite relational models and the standard semantics.
//!
//! An expression denotes a binary relation on states: actions are
//! interpreted directly, propositions as subsets of the diagonal, `dom(e)`
//! as the diagonal restricted to the states where `e` has a successor and
//! `adom(e)` as its complement on the diagonal.

mod countermodel;
mod oracle;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::syntax::{Expr, ExprKind};

pub use countermodel::{
    bisimilar, bisimulation, cay, export_countermodel, generated_submodel, unravel, Construction, Countermodel, Unraveling,
};
pub use oracle::{brute_oracle, enumerate_models, OracleBudget, OracleVerdict};

/// A binary relation on `0..n`, stored row by row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    rows: Vec<FixedBitSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation { rows: alloc::vec![FixedBitSet::with_capacity(n); n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            r.rows[i].insert(i);
        }
        r
    }

    pub fn full(n: usize) -> Self {
        let mut r = Self::empty(n);
        for row in &mut r.rows {
            row.insert_range(..);
        }
        r
    }

    /// `{(x, x) | x ∈ set}`.
    pub fn diagonal(set: &FixedBitSet) -> Self {
        let mut r = Self::empty(set.len());
        for x in set.ones() {
            r.rows[x].insert(x);
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut r = Self::empty(n);
        for (x, y) in pairs {
            r.insert(x, y)?;
        }
        Ok(r)
    }

    /// Number of states.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.is_clear())
    }

    pub fn insert(&mut self, x: usize, y: usize) -> Result<()> {
        let n = self.len();
        for s in [x, y] {
            if s >= n {
                return Err(Error::StateOutOfRange(s));
            }
        }
        self.rows[x].insert(y);
        Ok(())
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.len() && self.rows[x].contains(y)
    }

    pub fn row(&self, x: usize) -> &FixedBitSet {
        &self.rows[x]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(x, r)| r.ones().map(move |y| (x, y)))
    }

    pub fn count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn union(&self, other: &Relation) -> Relation {
        let mut out = self.clone();
        for (a, b) in out.rows.iter_mut().zip(&other.rows) {
            a.union_with(b);
        }
        out
    }

    pub fn compose(&self, other: &Relation) -> Relation {
        let n = self.len();
        let mut out = Self::empty(n);
        for (x, row) in self.rows.iter().enumerate() {
            for y in row.ones() {
                out.rows[x].union_with(&other.rows[y]);
            }
        }
        out
    }

    /// Reflexive transitive closure.
    pub fn star(&self) -> Relation {
        let n = self.len();
        let mut out = self.clone();
        for k in 0..n {
            let via = out.rows[k].clone();
            for i in 0..n {
                if out.rows[i].contains(k) {
                    out.rows[i].union_with(&via);
                }
            }
        }
        for i in 0..n {
            out.rows[i].insert(i);
        }
        out
    }

    /// States with at least one successor.
    pub fn domain(&self) -> FixedBitSet {
        let mut d = FixedBitSet::with_capacity(self.len());
        for (x, r) in self.rows.iter().enumerate() {
            d.set(x, !r.is_clear());
        }
        d
    }

    /// States with a successor in `target`.
    pub fn pre(&self, target: &FixedBitSet) -> FixedBitSet {
        let mut d = FixedBitSet::with_capacity(self.len());
        for (x, r) in self.rows.iter().enumerate() {
            d.set(x, !r.is_disjoint(target));
        }
        d
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a.is_subset(b))
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// A finite set of named states with action relations and proposition
/// extensions. Only the declared actions and propositions have a meaning.
#[derive(Clone, PartialEq, Eq)]
pub struct RelationalModel {
    names: Vec<String>,
    actions: BTreeMap<String, Relation>,
    props: BTreeMap<String, FixedBitSet>,
}

impl RelationalModel {
    /// States named `0`, `1`, ...
    pub fn new(n: usize) -> Self {
        Self::with_names((0..n).map(|i| i.to_string()).collect())
    }

    pub fn with_names(names: Vec<String>) -> Self {
        RelationalModel { names, actions: BTreeMap::new(), props: BTreeMap::new() }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn state_name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn declare_action(&mut self, a: &str) {
        let n = self.len();
        self.actions.entry(a.to_string()).or_insert_with(|| Relation::empty(n));
    }

    pub fn declare_prop(&mut self, p: &str) {
        let n = self.len();
        self.props.entry(p.to_string()).or_insert_with(|| FixedBitSet::with_capacity(n));
    }

    pub fn add_edge(&mut self, a: &str, x: usize, y: usize) -> Result<()> {
        self.declare_action(a);
        self.actions.get_mut(a).expect("declared").insert(x, y)
    }

    pub fn set_prop(&mut self, p: &str, x: usize) -> Result<()> {
        if x >= self.len() {
            return Err(Error::StateOutOfRange(x));
        }
        self.declare_prop(p);
        self.props.get_mut(p).expect("declared").insert(x);
        Ok(())
    }

    pub fn action(&self, a: &str) -> Option<&Relation> {
        self.actions.get(a)
    }

    pub fn prop(&self, p: &str) -> Option<&FixedBitSet> {
        self.props.get(p)
    }

    pub fn actions(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.actions.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn props(&self) -> impl Iterator<Item = (&str, &FixedBitSet)> {
        self.props.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Every symbol of `e` is declared.
    pub fn covers(&self, e: &Expr) -> Result<()> {
        for a in e.actions() {
            if !self.actions.contains_key(a.name()) {
                return Err(Error::UnnamedSymbol(a.name().to_string()));
            }
        }
        for p in e.props() {
            if !self.props.contains_key(p.name()) {
                return Err(Error::UnnamedSymbol(p.name().to_string()));
            }
        }
        Ok(())
    }

    fn check_state(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::StateOutOfRange(x))
        }
    }
}

impl fmt::Debug for RelationalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RelationalModel")
            .field("states", &self.names)
            .field("actions", &self.actions)
            .field("props", &self.props.iter().map(|(k, v)| (k, v.ones().collect::<Vec<_>>())).collect::<BTreeMap<_, _>>())
            .finish()
    }
}

impl fmt::Display for RelationalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states: {}", self.names.join(" "))?;
        for (a, r) in &self.actions {
            let edges: Vec<String> =
                r.pairs().map(|(x, y)| format!("{}->{}", self.names[x], self.names[y])).collect();
            writeln!(f, "{a}: {}", edges.join(" "))?;
        }
        for (p, s) in &self.props {
            let states: Vec<&str> = s.ones().map(|x| self.names[x].as_str()).collect();
            writeln!(f, "{p}: {}", states.join(" "))?;
        }
        Ok(())
    }
}

fn eval(e: &Expr, m: &RelationalModel) -> Relation {
    let n = m.len();
    match e.kind() {
        ExprKind::Act(a) => m.actions[a.name()].clone(),
        ExprKind::Prop(p) => Relation::diagonal(&m.props[p.name()]),
        ExprKind::Zero => Relation::empty(n),
        ExprKind::One => Relation::identity(n),
        ExprKind::Sum(l, r) => eval(l, m).union(&eval(r, m)),
        ExprKind::Prod(l, r) => eval(l, m).compose(&eval(r, m)),
        ExprKind::Star(b) => eval(b, m).star(),
        ExprKind::Dom(b) => Relation::diagonal(&eval(b, m).domain()),
        ExprKind::Anti(b) => {
            let mut d = eval(b, m).domain();
            d.toggle_range(..);
            Relation::diagonal(&d)
        }
    }
}

/// The relation denoted by `e` in `m`.
pub fn evaluate(e: &Expr, m: &RelationalModel) -> Result<Relation> {
    m.covers(e)?;
    Ok(eval(e, m))
}

/// States with an `e`-path into `target`, computed backwards.
fn pre_image(e: &Expr, target: &FixedBitSet, m: &RelationalModel) -> FixedBitSet {
    let n = m.len();
    match e.kind() {
        ExprKind::Act(a) => m.actions[a.name()].pre(target),
        ExprKind::Zero => FixedBitSet::with_capacity(n),
        ExprKind::Sum(l, r) => {
            let mut out = pre_image(l, target, m);
            out.union_with(&pre_image(r, target, m));
            out
        }
        ExprKind::Prod(l, r) => {
            let mid = pre_image(r, target, m);
            pre_image(l, &mid, m)
        }
        ExprKind::Star(b) => {
            let mut acc = target.clone();
            loop {
                let mut next = pre_image(b, &acc, m);
                next.union_with(&acc);
                if next == acc {
                    return acc;
                }
                acc = next;
            }
        }
        _ => {
            // Formulas are subsets of the diagonal.
            let mut out = ext(e, m);
            out.intersect_with(target);
            out
        }
    }
}

fn ext(phi: &Expr, m: &RelationalModel) -> FixedBitSet {
    let n = m.len();
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    match phi.kind() {
        ExprKind::Prop(p) => m.props[p.name()].clone(),
        ExprKind::Zero => FixedBitSet::with_capacity(n),
        ExprKind::One => all,
        ExprKind::Sum(l, r) => {
            let mut out = ext(l, m);
            out.union_with(&ext(r, m));
            out
        }
        ExprKind::Prod(l, r) => {
            let mut out = ext(l, m);
            out.intersect_with(&ext(r, m));
            out
        }
        ExprKind::Dom(b) => pre_image(b, &all, m),
        ExprKind::Anti(b) => {
            let mut out = pre_image(b, &all, m);
            out.toggle_range(..);
            out
        }
        ExprKind::Act(_) | ExprKind::Star(_) => unreachable!("not a formula"),
    }
}

/// The states of `m` where the formula `phi` holds.
///
/// Computed by backward reachability, independently of [`evaluate`].
pub fn extension(phi: &Expr, m: &RelationalModel) -> Result<FixedBitSet> {
    if !phi.is_formula() {
        return Err(Error::NotAFormula(phi.to_string()));
    }
    m.covers(phi)?;
    Ok(ext(phi, m))
}

/// `(x, x) ∈ [[phi]]`.
pub fn satisfies(m: &RelationalModel, x: usize, phi: &Expr) -> Result<bool> {
    if !phi.is_formula() {
        return Err(Error::NotAFormula(phi.to_string()));
    }
    m.check_state(x)?;
    Ok(evaluate(phi, m)?.contains(x, x))
}

/// States reachable from `sources` along `e`, computed forwards.
fn post_image(e: &Expr, sources: &FixedBitSet, m: &RelationalModel) -> FixedBitSet {
    let n = m.len();
    match e.kind() {
        ExprKind::Act(a) => {
            let rel = &m.actions[a.name()];
            let mut out = FixedBitSet::with_capacity(n);
            for x in sources.ones() {
                out.union_with(rel.row(x));
            }
            out
        }
        ExprKind::Zero => FixedBitSet::with_capacity(n),
        ExprKind::Sum(l, r) => {
            let mut out = post_image(l, sources, m);
            out.union_with(&post_image(r, sources, m));
            out
        }
        ExprKind::Prod(l, r) => {
            let mid = post_image(l, sources, m);
            post_image(r, &mid, m)
        }
        ExprKind::Star(b) => {
            let mut acc = sources.clone();
            loop {
                let mut next = post_image(b, &acc, m);
                next.union_with(&acc);
                if next == acc {
                    return acc;
                }
                acc = next;
            }
        }
        _ => {
            let mut out = ext(e, m);
            out.intersect_with(sources);
            out
        }
    }
}

/// Row `x` of the relation denoted by `e`: the states `y` with
/// `(x, y) ∈ [[e]]`. Computed forwards from `x` without building the
/// whole relation.
pub fn image(e: &Expr, m: &RelationalModel, x: usize) -> Result<FixedBitSet> {
    m.covers(e)?;
    m.check_state(x)?;
    let mut s = FixedBitSet::with_capacity(m.len());
    s.insert(x);
    Ok(post_image(e, &s, m))
}

/// Whether `(x, y)` separates `e` and `f` in `m`.
pub fn separates(m: &RelationalModel, x: usize, y: usize, e: &Expr, f: &Expr) -> Result<bool> {
    m.check_state(y)?;
    Ok(image(e, m, x)?.contains(y) != image(f, m, x)?.contains(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn chain() -> RelationalModel {
        // 0 -a-> 1 -a-> 2, p at 2.
        let mut m = RelationalModel::new(3);
        m.add_edge("a", 0, 1).unwrap();
        m.add_edge("a", 1, 2).unwrap();
        m.set_prop("p", 2).unwrap();
        m
    }

    #[test]
    fn star_reaches() {
        let m = chain();
        let e = parse("<a*>p", &["p"]).unwrap();
        for x in 0..3 {
            assert!(satisfies(&m, x, &e).unwrap());
        }
        let r = evaluate(&parse::<&str>("a*", &[]).unwrap(), &m).unwrap();
        assert_eq!(r.count(), 6);
    }

    #[test]
    fn domain_and_antidomain() {
        let m = chain();
        let d = evaluate(&parse::<&str>("dom(a)", &[]).unwrap(), &m).unwrap();
        let ad = evaluate(&parse::<&str>("adom(a)", &[]).unwrap(), &m).unwrap();
        assert_eq!(d.pairs().collect::<Vec<_>>(), [(0, 0), (1, 1)]);
        assert_eq!(ad.pairs().collect::<Vec<_>>(), [(2, 2)]);
    }

    #[test]
    fn extension_agrees_with_evaluate() {
        let m = chain();
        for src in ["<a>p", "[a]p", "adom(a;a;a) + p", "dom((a;adom(p))*;p)", "!<a;a>p"] {
            let phi = parse(src, &["p"]).unwrap();
            let ext = extension(&phi, &m).unwrap();
            for x in 0..3 {
                assert_eq!(ext.contains(x), satisfies(&m, x, &phi).unwrap(), "{src} at {x}");
            }
        }
    }

    #[test]
    fn errors() {
        let m = chain();
        assert!(matches!(evaluate(&Expr::act("b"), &m), Err(Error::UnnamedSymbol(_))));
        assert!(matches!(satisfies(&m, 7, &Expr::one()), Err(Error::StateOutOfRange(7))));
        assert!(matches!(satisfies(&m, 0, &Expr::act("a")), Err(Error::NotAFormula(_))));
        let mut m = RelationalModel::new(1);
        assert!(matches!(m.add_edge("a", 0, 1), Err(Error::StateOutOfRange(1))));
    }

    #[test]
    fn separation() {
        let m = chain();
        let a = Expr::act("a");
        let aa = Expr::prod(a.clone(), a.clone());
        assert!(separates(&m, 0, 1, &a, &aa).unwrap());
        assert!(!separates(&m, 0, 0, &a, &aa).unwrap());
    }
}
