//! Abstract syntax of regular expressions with dynamic tests.

mod fragment;
mod parse;
mod print;

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};

use crate::error::{Error, Result};

pub use fragment::{classify, classify_with, embed_aka, in_fragment, FragmentId};
pub use parse::{parse, parse_program, Vocabulary};

/// An action or proposition name.
///
/// The index records declaration order and is only used by [`embed_aka`];
/// identity, ordering and hashing go by name.
#[derive(Clone)]
pub struct Symbol {
    name: Arc<str>,
    index: u32,
}

impl Symbol {
    pub fn new(name: &str, index: u32) -> Self {
        Symbol { name: Arc::from(name), index }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn with_index(&self, index: u32) -> Self {
        Symbol { name: self.name.clone(), index }
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Eq for Symbol {}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name.cmp(&other.name)
    }
}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state);
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.name, self.index)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum ExprKind {
    Act(Symbol),
    Prop(Symbol),
    Zero,
    One,
    Sum(Expr, Expr),
    Prod(Expr, Expr),
    Star(Expr),
    /// Antidomain, `e^⊥`.
    Anti(Expr),
    /// Domain, `e^⊤`.
    Dom(Expr),
}

struct Node {
    kind: ExprKind,
    hash: u64,
    size: u32,
}

/// An immutable, shared expression tree.
///
/// Every node caches a structural hash, so hashing is O(1) and equality
/// short-circuits on pointer identity or hash mismatch.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(a << 6).wrapping_add(a >> 2);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn str_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        let (hash, size) = match &kind {
            ExprKind::Act(s) => (mix(1, str_hash(s.name())), 1),
            ExprKind::Prop(s) => (mix(2, str_hash(s.name())), 1),
            ExprKind::Zero => (mix(3, 0), 1),
            ExprKind::One => (mix(4, 0), 1),
            ExprKind::Sum(l, r) => (mix(mix(5, l.0.hash), r.0.hash), 1 + l.0.size + r.0.size),
            ExprKind::Prod(l, r) => (mix(mix(6, l.0.hash), r.0.hash), 1 + l.0.size + r.0.size),
            ExprKind::Star(b) => (mix(7, b.0.hash), 1 + b.0.size),
            ExprKind::Anti(b) => (mix(8, b.0.hash), 1 + b.0.size),
            ExprKind::Dom(b) => (mix(9, b.0.hash), 1 + b.0.size),
        };
        Expr(Arc::new(Node { kind, hash, size }))
    }

    pub fn kind(&self) -> &ExprKind {
        &self.0.kind
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        self.0.size as usize
    }

    pub fn act(name: &str) -> Self {
        Expr::new(ExprKind::Act(Symbol::new(name, 0)))
    }

    pub fn prop(name: &str) -> Self {
        Expr::new(ExprKind::Prop(Symbol::new(name, 0)))
    }

    pub fn act_sym(s: Symbol) -> Self {
        Expr::new(ExprKind::Act(s))
    }

    pub fn prop_sym(s: Symbol) -> Self {
        Expr::new(ExprKind::Prop(s))
    }

    pub fn zero() -> Self {
        Expr::new(ExprKind::Zero)
    }

    pub fn one() -> Self {
        Expr::new(ExprKind::One)
    }

    pub fn sum(l: Expr, r: Expr) -> Self {
        Expr::new(ExprKind::Sum(l, r))
    }

    pub fn prod(l: Expr, r: Expr) -> Self {
        Expr::new(ExprKind::Prod(l, r))
    }

    pub fn star(b: Expr) -> Self {
        Expr::new(ExprKind::Star(b))
    }

    pub fn anti(b: Expr) -> Self {
        Expr::new(ExprKind::Anti(b))
    }

    pub fn dom(b: Expr) -> Self {
        Expr::new(ExprKind::Dom(b))
    }

    /// Left-nested sum; the empty sum is `0`.
    pub fn sum_all<I: IntoIterator<Item = Expr>>(items: I) -> Self {
        items.into_iter().reduce(Expr::sum).unwrap_or_else(Expr::zero)
    }

    /// Left-nested product; the empty product is `1`.
    pub fn prod_all<I: IntoIterator<Item = Expr>>(items: I) -> Self {
        items.into_iter().reduce(Expr::prod).unwrap_or_else(Expr::one)
    }

    /// Membership in the formula grammar: propositions, constants, sums and
    /// products of formulas, and any domain or antidomain.
    pub fn is_formula(&self) -> bool {
        match self.kind() {
            ExprKind::Prop(_) | ExprKind::Zero | ExprKind::One => true,
            ExprKind::Anti(_) | ExprKind::Dom(_) => true,
            ExprKind::Sum(l, r) | ExprKind::Prod(l, r) => l.is_formula() && r.is_formula(),
            ExprKind::Act(_) | ExprKind::Star(_) => false,
        }
    }

    /// No occurrence of the domain operator.
    pub fn is_testable(&self) -> bool {
        match self.kind() {
            ExprKind::Dom(_) => false,
            ExprKind::Act(_) | ExprKind::Prop(_) | ExprKind::Zero | ExprKind::One => true,
            ExprKind::Sum(l, r) | ExprKind::Prod(l, r) => l.is_testable() && r.is_testable(),
            ExprKind::Star(b) | ExprKind::Anti(b) => b.is_testable(),
        }
    }

    /// `dom(f)` with `f` testable.
    pub fn is_test(&self) -> bool {
        matches!(self.kind(), ExprKind::Dom(b) if b.is_testable())
    }

    pub fn is_parameter(&self) -> bool {
        matches!(self.kind(), ExprKind::Prop(_)) || self.is_test()
    }

    pub fn children(&self) -> impl Iterator<Item = &Expr> {
        let (a, b) = match self.kind() {
            ExprKind::Sum(l, r) | ExprKind::Prod(l, r) => (Some(l), Some(r)),
            ExprKind::Star(x) | ExprKind::Anti(x) | ExprKind::Dom(x) => (Some(x), None),
            _ => (None, None),
        };
        a.into_iter().chain(b)
    }

    /// All subexpressions, `self` included, in pre-order (with repeats).
    pub fn subexpressions(&self) -> Vec<Expr> {
        let mut out = Vec::new();
        let mut stack = alloc::vec![self.clone()];
        while let Some(e) = stack.pop() {
            let mut kids: Vec<Expr> = e.children().cloned().collect();
            out.push(e);
            kids.reverse();
            stack.extend(kids);
        }
        out
    }

    pub fn actions(&self) -> BTreeSet<Symbol> {
        self.subexpressions()
            .into_iter()
            .filter_map(|e| match e.kind() {
                ExprKind::Act(s) => Some(s.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn props(&self) -> BTreeSet<Symbol> {
        self.subexpressions()
            .into_iter()
            .filter_map(|e| match e.kind() {
                ExprKind::Prop(s) => Some(s.clone()),
                _ => None,
            })
            .collect()
    }

    /// Rebuilds the tree bottom-up, letting `f` replace leaves.
    pub fn map_leaves(&self, f: &mut impl FnMut(&Expr) -> Option<Expr>) -> Expr {
        if let Some(r) = f(self) {
            return r;
        }
        match self.kind() {
            ExprKind::Sum(l, r) => Expr::sum(l.map_leaves(f), r.map_leaves(f)),
            ExprKind::Prod(l, r) => Expr::prod(l.map_leaves(f), r.map_leaves(f)),
            ExprKind::Star(b) => Expr::star(b.map_leaves(f)),
            ExprKind::Anti(b) => Expr::anti(b.map_leaves(f)),
            ExprKind::Dom(b) => Expr::dom(b.map_leaves(f)),
            _ => self.clone(),
        }
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash && self.0.size == other.0.size && self.0.kind == other.0.kind)
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.kind.cmp(&other.0.kind)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Sf(e): the subexpressions of `e` that are formulas, `e` itself included.
pub fn subformulas(e: &Expr) -> BTreeSet<Expr> {
    e.subexpressions().into_iter().filter(Expr::is_formula).collect()
}

fn replace_dom(e: &Expr) -> Expr {
    match e.kind() {
        ExprKind::Dom(b) => Expr::anti(Expr::anti(replace_dom(b))),
        ExprKind::Sum(l, r) => Expr::sum(replace_dom(l), replace_dom(r)),
        ExprKind::Prod(l, r) => Expr::prod(replace_dom(l), replace_dom(r)),
        ExprKind::Star(b) => Expr::star(replace_dom(b)),
        ExprKind::Anti(b) => Expr::anti(replace_dom(b)),
        _ => e.clone(),
    }
}

/// Rewrites every `dom(x)` inside `e` to `adom(adom(x))`, yielding a
/// testable expression.
pub fn testable_form(e: &Expr) -> Expr {
    replace_dom(e)
}

/// `e?`: the test `dom(f)` where `f` is `e` with every domain replaced by a
/// double antidomain.
pub fn question(e: &Expr) -> Expr {
    Expr::dom(replace_dom(e))
}

/// St(E) = { f? | f ∈ Sf(E) }.
pub fn st<'a, I: IntoIterator<Item = &'a Expr>>(exprs: I) -> BTreeSet<Expr> {
    exprs.into_iter().flat_map(subformulas).map(|f| question(&f)).collect()
}

fn require_formula(phi: &Expr) -> Result<()> {
    if phi.is_formula() {
        Ok(())
    } else {
        Err(Error::NotAFormula(alloc::format!("{phi}")))
    }
}

/// `<e>φ`, encoded as `adom(adom(e;φ))`.
pub fn diamond(e: Expr, phi: Expr) -> Result<Expr> {
    require_formula(&phi)?;
    Ok(Expr::anti(Expr::anti(Expr::prod(e, phi))))
}

/// `[e]φ`, encoded as `adom(e;adom(φ))`.
pub fn boxed(e: Expr, phi: Expr) -> Result<Expr> {
    require_formula(&phi)?;
    Ok(Expr::anti(Expr::prod(e, Expr::anti(phi))))
}

pub fn neg(phi: Expr) -> Result<Expr> {
    require_formula(&phi)?;
    Ok(Expr::anti(phi))
}

pub fn conj(phi: Expr, psi: Expr) -> Result<Expr> {
    require_formula(&phi)?;
    require_formula(&psi)?;
    Ok(Expr::prod(phi, psi))
}

pub fn disj(phi: Expr, psi: Expr) -> Result<Expr> {
    require_formula(&phi)?;
    require_formula(&psi)?;
    Ok(Expr::sum(phi, psi))
}

/// `φ?`, the domain of a formula.
pub fn test(phi: Expr) -> Result<Expr> {
    require_formula(&phi)?;
    Ok(Expr::dom(phi))
}
