//! Fischer–Ladner closure of parameter sets.

use alloc::collections::VecDeque;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use hashbrown::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::syntax::{st, Expr, ExprKind};

/// A finite set of parameters, ordered by printed form.
#[derive(Clone, Default)]
pub struct ParameterSet {
    items: Vec<Expr>,
    names: Vec<String>,
    index: HashMap<Expr, usize>,
}

impl ParameterSet {
    /// Sorts and deduplicates; every member must be a parameter.
    pub fn new<I: IntoIterator<Item = Expr>>(items: I) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut pairs: Vec<(String, Expr)> = Vec::new();
        for e in items {
            if !e.is_parameter() {
                return Err(Error::NotAParameter(e.to_string()));
            }
            if seen.insert(e.clone()) {
                pairs.push((e.to_string(), e));
            }
        }
        pairs.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        let index = pairs.iter().enumerate().map(|(i, (_, e))| (e.clone(), i)).collect();
        let (names, items) = pairs.into_iter().unzip();
        Ok(ParameterSet { items, names, index })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, i: usize) -> &Expr {
        &self.items[i]
    }

    /// Printed form of the `i`-th parameter.
    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Expr> {
        self.items.iter()
    }

    pub fn index_of(&self, e: &Expr) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn contains(&self, e: &Expr) -> bool {
        self.index.contains_key(e)
    }

    pub fn is_subset(&self, other: &ParameterSet) -> bool {
        self.items.iter().all(|e| other.contains(e))
    }
}

impl PartialEq for ParameterSet {
    fn eq(&self, other: &Self) -> bool {
        self.items == other.items
    }
}

impl Eq for ParameterSet {}

impl fmt::Debug for ParameterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.names.iter()).finish()
    }
}

impl<'a> IntoIterator for &'a ParameterSet {
    type Item = &'a Expr;
    type IntoIter = core::slice::Iter<'a, Expr>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ClosureOptions {
    /// Read the sum clause literally, requiring `dom(e;f)` instead of
    /// `dom(e;φ)`. Only useful for comparing the two readings.
    pub literal_sum_clause: bool,
    /// Give up once the closure holds this many parameters.
    pub max_size: usize,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions { literal_sum_clause: false, max_size: 4096 }
    }
}

fn dd(e: Expr) -> Expr {
    Expr::anti(Expr::anti(e))
}

fn ends_in_formula(e: &Expr) -> bool {
    matches!(e.kind(), ExprKind::Prod(_, phi) if phi.is_formula())
}

/// `dom(e;1)`, or just `dom(e)` when `e` already ends in a formula.
pub fn pad(e: &Expr) -> Expr {
    if ends_in_formula(e) {
        Expr::dom(e.clone())
    } else {
        Expr::dom(Expr::prod(e.clone(), Expr::one()))
    }
}

/// The parameters that the presence of `param` forces into a closed set.
///
/// Padding `e` to `e;1` is skipped when `e` already ends in a formula
/// `e';φ`: iterating it there would never terminate. `dom(φ)` is added for
/// such `e` instead, which is what the padded form would have contributed.
pub fn requirements(param: &Expr, opts: &ClosureOptions) -> Vec<Expr> {
    let mut out = Vec::new();
    let x = match param.kind() {
        ExprKind::Dom(x) => x,
        _ => return out,
    };
    if !ends_in_formula(x) {
        out.push(pad(x));
    }
    match x.kind() {
        ExprKind::Prop(_) => out.push(x.clone()),
        ExprKind::Star(b) => out.push(Expr::dom(b.clone())),
        ExprKind::Anti(b) => out.push(pad(b)),
        ExprKind::Sum(l, r) | ExprKind::Prod(l, r) if l.is_formula() && r.is_formula() => {
            out.push(Expr::dom(l.clone()));
            out.push(Expr::dom(r.clone()));
        }
        _ => {}
    }
    if let ExprKind::Prod(y, phi) = x.kind() {
        if phi.is_formula() {
            out.push(Expr::dom(phi.clone()));
            match y.kind() {
                ExprKind::Sum(e, f) => {
                    if opts.literal_sum_clause {
                        out.push(Expr::dom(Expr::prod(e.clone(), f.clone())));
                    } else {
                        out.push(Expr::dom(Expr::prod(e.clone(), phi.clone())));
                    }
                    out.push(Expr::dom(Expr::prod(f.clone(), phi.clone())));
                }
                ExprKind::Prod(e, f) => {
                    let inner = Expr::prod(f.clone(), phi.clone());
                    out.push(Expr::dom(inner.clone()));
                    out.push(Expr::dom(Expr::prod(e.clone(), dd(inner))));
                }
                ExprKind::Star(e) => {
                    out.push(Expr::dom(Expr::prod(e.clone(), dd(x.clone()))));
                }
                _ => {}
            }
        }
    }
    out
}

fn constants() -> [Expr; 2] {
    [Expr::dom(Expr::one()), Expr::dom(Expr::zero())]
}

/// The least closed superset of `s`.
pub fn fl_close(s: &ParameterSet) -> Result<ParameterSet> {
    fl_close_with(s, &ClosureOptions::default())
}

pub fn fl_close_with(s: &ParameterSet, opts: &ClosureOptions) -> Result<ParameterSet> {
    let mut seen: HashSet<Expr> = HashSet::new();
    let mut queue: VecDeque<Expr> = VecDeque::new();
    for e in s.iter().cloned().chain(constants()) {
        if seen.insert(e.clone()) {
            queue.push_back(e);
        }
    }
    while let Some(e) = queue.pop_front() {
        for r in requirements(&e, opts) {
            if seen.insert(r.clone()) {
                if seen.len() > opts.max_size {
                    return Err(Error::ClosureTooLarge(opts.max_size));
                }
                queue.push_back(r);
            }
        }
    }
    ParameterSet::new(seen)
}

/// The first requirement `set` fails to meet, as (member, missing).
pub fn fl_violation(set: &ParameterSet, opts: &ClosureOptions) -> Option<(Expr, Expr)> {
    for c in constants() {
        if !set.contains(&c) {
            return Some((c.clone(), c));
        }
    }
    set.iter().find_map(|e| requirements(e, opts).into_iter().find(|r| !set.contains(r)).map(|r| (e.clone(), r)))
}

pub fn is_fl_closed(set: &ParameterSet) -> bool {
    fl_violation(set, &ClosureOptions::default()).is_none()
}

/// The closure of the tests of all subformulas of `exprs`.
pub fn gamma_for<'a, I: IntoIterator<Item = &'a Expr>>(exprs: I) -> Result<ParameterSet> {
    gamma_for_with(exprs, &ClosureOptions::default())
}

pub fn gamma_for_with<'a, I: IntoIterator<Item = &'a Expr>>(exprs: I, opts: &ClosureOptions) -> Result<ParameterSet> {
    fl_close_with(&ParameterSet::new(st(exprs))?, opts)
}
