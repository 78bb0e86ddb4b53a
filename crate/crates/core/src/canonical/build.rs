//! Type elimination.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;
use hashbrown::HashMap;

use super::logic::{compile, BoolExpr};
use super::steps::{StepRelation, StepTable};
use crate::closure::{fl_violation, pad, ClosureOptions, ParameterSet};
use crate::error::{Error, Result};
use crate::syntax::{Expr, ExprKind, Symbol};

/// Largest support for which diamond bodies are compared by truth table.
const TABLE_VARS: usize = 10;

pub(super) struct Outcome {
    pub atoms: Vec<FixedBitSet>,
    pub trace: Vec<String>,
    pub free: usize,
}

fn dd(e: Expr) -> Expr {
    Expr::anti(Expr::anti(e))
}

struct Rules<'g> {
    gamma: &'g ParameterSet,
    /// Local coherence conditions per parameter; the first one defines it.
    rules: Vec<Vec<BoolExpr>>,
    /// Atomic diamonds `dom(a;φ)`: (parameter, action, parameter `dom(φ)`).
    diamonds: Vec<(usize, Symbol, usize)>,
}

impl<'g> Rules<'g> {
    fn var(&self, e: &Expr) -> Result<BoolExpr> {
        self.gamma.index_of(e).map(BoolExpr::Var).ok_or_else(|| Error::ClosureDeficiency(e.to_string()))
    }

    fn new(gamma: &'g ParameterSet) -> Result<Self> {
        let mut me = Rules { gamma, rules: Vec::new(), diamonds: Vec::new() };
        for (i, param) in gamma.iter().enumerate() {
            let rs = me.rules_for(i, param)?;
            me.rules.push(rs);
        }
        Ok(me)
    }

    fn rules_for(&mut self, i: usize, param: &Expr) -> Result<Vec<BoolExpr>> {
        let mut rs = Vec::new();
        let x = match param.kind() {
            ExprKind::Dom(x) => x,
            _ => return Ok(rs),
        };
        match x.kind() {
            ExprKind::One => rs.push(BoolExpr::Const(true)),
            ExprKind::Zero => rs.push(BoolExpr::Const(false)),
            ExprKind::Prop(_) => rs.push(self.var(x)?),
            ExprKind::Anti(y) => rs.push(BoolExpr::negate(self.var(&pad(y))?)),
            ExprKind::Sum(l, r) if x.is_formula() => {
                rs.push(BoolExpr::or(self.var(&Expr::dom(l.clone()))?, self.var(&Expr::dom(r.clone()))?))
            }
            ExprKind::Prod(l, r) if x.is_formula() => {
                rs.push(BoolExpr::and(self.var(&Expr::dom(l.clone()))?, self.var(&Expr::dom(r.clone()))?))
            }
            _ => {}
        }
        if let ExprKind::Prod(y, phi) = x.kind() {
            if phi.is_formula() {
                match y.kind() {
                    ExprKind::Act(a) => {
                        let body = self.gamma.index_of(&Expr::dom(phi.clone()));
                        let body = body.ok_or_else(|| Error::ClosureDeficiency(Expr::dom(phi.clone()).to_string()))?;
                        self.diamonds.push((i, a.clone(), body));
                    }
                    ExprKind::Sum(e, f) => rs.push(BoolExpr::or(
                        self.var(&Expr::dom(Expr::prod(e.clone(), phi.clone())))?,
                        self.var(&Expr::dom(Expr::prod(f.clone(), phi.clone())))?,
                    )),
                    ExprKind::Prod(e, f) => {
                        let inner = dd(Expr::prod(f.clone(), phi.clone()));
                        rs.push(self.var(&Expr::dom(Expr::prod(e.clone(), inner)))?);
                    }
                    ExprKind::Star(e) => rs.push(BoolExpr::or(
                        self.var(&Expr::dom(phi.clone()))?,
                        self.var(&Expr::dom(Expr::prod(e.clone(), dd(x.clone()))))?,
                    )),
                    _ => {}
                }
            }
        }
        let padded = pad(x);
        if padded != *param {
            rs.push(self.var(&padded)?);
        }
        Ok(rs)
    }
}

/// Which parameters are computed from which, and in what order.
struct Plan {
    /// Defining expression per parameter; `None` for free parameters.
    defs: Vec<Option<BoolExpr>>,
    /// Conditions to check after evaluation: (parameter, expression).
    checks: Vec<(usize, BoolExpr)>,
    order: Vec<usize>,
    free: Vec<usize>,
}

impl Plan {
    fn new(rules: &Rules<'_>, overrides: &BTreeMap<usize, BoolExpr>) -> Plan {
        let n = rules.rules.len();
        let mut breakers: BTreeSet<usize> = BTreeSet::new();
        loop {
            let def = |i: usize| -> Option<&BoolExpr> {
                if breakers.contains(&i) {
                    None
                } else if let Some(o) = overrides.get(&i) {
                    Some(o)
                } else {
                    rules.rules[i].first()
                }
            };
            match topo(n, &def) {
                Ok(order) => {
                    let defs: Vec<Option<BoolExpr>> = (0..n).map(|i| def(i).cloned()).collect();
                    let mut checks = Vec::new();
                    for (i, rs) in rules.rules.iter().enumerate() {
                        for (k, r) in rs.iter().enumerate() {
                            let defining = k == 0 && !breakers.contains(&i) && !overrides.contains_key(&i);
                            if !defining {
                                checks.push((i, r.clone()));
                            }
                        }
                    }
                    let free = (0..n).filter(|&i| defs[i].is_none()).collect();
                    return Plan { defs, checks, order, free };
                }
                Err(cut) => {
                    breakers.insert(cut);
                }
            }
        }
    }

    fn eval(&self, free_values: impl Iterator<Item = (usize, bool)>, n: usize) -> FixedBitSet {
        let mut signs = FixedBitSet::with_capacity(n);
        for (i, v) in free_values {
            signs.set(i, v);
        }
        for &i in &self.order {
            if let Some(d) = &self.defs[i] {
                let v = d.eval(&signs);
                signs.set(i, v);
            }
        }
        signs
    }

    fn coherent(&self, signs: &FixedBitSet) -> bool {
        self.checks.iter().all(|(i, r)| signs.contains(*i) == r.eval(signs))
    }

    /// The free parameters `i` ultimately depends on.
    fn support(&self, i: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![i];
        let mut seen = BTreeSet::new();
        while let Some(j) = stack.pop() {
            if !seen.insert(j) {
                continue;
            }
            match &self.defs[j] {
                None => {
                    out.insert(j);
                }
                Some(d) => {
                    let mut vs = BTreeSet::new();
                    d.vars(&mut vs);
                    stack.extend(vs);
                }
            }
        }
        out
    }
}

/// Topological order of the definitions, or a parameter closing a cycle.
fn topo<'a>(n: usize, def: &dyn Fn(usize) -> Option<&'a BoolExpr>) -> core::result::Result<Vec<usize>, usize> {
    let mut state = vec![0u8; n];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, Vec<usize>)> = Vec::new();
        let deps = |i: usize| -> Vec<usize> {
            let mut vs = BTreeSet::new();
            if let Some(d) = def(i) {
                d.vars(&mut vs);
            }
            vs.into_iter().rev().collect()
        };
        state[root] = 1;
        stack.push((root, deps(root)));
        while let Some((node, pending)) = stack.last_mut() {
            if let Some(next) = pending.pop() {
                match state[next] {
                    0 => {
                        state[next] = 1;
                        let d = deps(next);
                        stack.push((next, d));
                    }
                    1 => return Err(next),
                    _ => {}
                }
            } else {
                let node = *node;
                state[node] = 2;
                order.push(node);
                stack.pop();
            }
        }
    }
    Ok(order)
}

/// Truth table of parameter `body` over the free parameters it depends on,
/// with irrelevant ones dropped.
fn table(plan: &Plan, body: usize, n: usize) -> Option<(Vec<usize>, Vec<bool>)> {
    let support: Vec<usize> = plan.support(body).into_iter().collect();
    if support.len() > TABLE_VARS {
        return None;
    }
    let rows = 1usize << support.len();
    let values: Vec<bool> = (0..rows)
        .map(|m| plan.eval(support.iter().enumerate().map(|(k, &v)| (v, m >> k & 1 == 1)), n).contains(body))
        .collect();
    // Drop variables the table does not depend on.
    let mut keep = Vec::new();
    for k in 0..support.len() {
        if (0..rows).any(|m| values[m] != values[m ^ (1 << k)]) {
            keep.push(k);
        }
    }
    let vars = keep.iter().map(|&k| support[k]).collect();
    let reduced = (0..1usize << keep.len())
        .map(|m| {
            let row = keep.iter().enumerate().fold(0, |acc, (j, &k)| acc | ((m >> j & 1) << k));
            values[row]
        })
        .collect();
    Some((vars, reduced))
}

/// Identifies atomic diamonds that cannot differ: same action and bodies
/// with the same truth table. Diamonds with an unsatisfiable body are false.
fn merge_diamonds(rules: &Rules<'_>, n: usize) -> (Plan, BTreeMap<usize, BoolExpr>, usize) {
    let mut overrides: BTreeMap<usize, BoolExpr> = BTreeMap::new();
    loop {
        let plan = Plan::new(rules, &overrides);
        let free: BTreeSet<usize> = plan.free.iter().copied().collect();
        let mut seen: HashMap<(Symbol, Vec<usize>, Vec<bool>), usize> = HashMap::new();
        let mut changed = false;
        for (d, a, body) in &rules.diamonds {
            if !free.contains(d) {
                continue;
            }
            let Some((vars, values)) = table(&plan, *body, n) else { continue };
            if values.iter().all(|v| !v) {
                overrides.insert(*d, BoolExpr::Const(false));
                changed = true;
                continue;
            }
            match seen.get(&(a.clone(), vars.clone(), values.clone())) {
                Some(&rep) => {
                    overrides.insert(*d, BoolExpr::Var(rep));
                    changed = true;
                }
                None => {
                    seen.insert((a.clone(), vars, values), *d);
                }
            }
        }
        if !changed {
            let merged = overrides.len();
            return (plan, overrides, merged);
        }
    }
}

/// Compiled form of a program for pre-image evaluation.
enum Prog {
    Test(FixedBitSet),
    Act(usize),
    Sum(alloc::boxed::Box<Prog>, alloc::boxed::Box<Prog>),
    Prod(alloc::boxed::Box<Prog>, alloc::boxed::Box<Prog>),
    Star(alloc::boxed::Box<Prog>),
}

struct Evaluator<'a> {
    gamma: &'a ParameterSet,
    atoms: &'a [FixedBitSet],
    actions: Vec<Symbol>,
    relations: Vec<StepRelation>,
}

impl Evaluator<'_> {
    fn formula_set(&self, phi: &Expr) -> Result<FixedBitSet> {
        let b = compile(phi, self.gamma)?;
        let mut out = FixedBitSet::with_capacity(self.atoms.len());
        for (k, g) in self.atoms.iter().enumerate() {
            if b.eval(g) {
                out.insert(k);
            }
        }
        Ok(out)
    }

    fn prog(&self, e: &Expr) -> Result<Prog> {
        use alloc::boxed::Box;
        if e.is_formula() {
            return Ok(Prog::Test(self.formula_set(e)?));
        }
        Ok(match e.kind() {
            ExprKind::Act(a) => match self.actions.iter().position(|b| b == a) {
                Some(k) => Prog::Act(k),
                None => Prog::Act(usize::MAX),
            },
            ExprKind::Sum(l, r) => Prog::Sum(Box::new(self.prog(l)?), Box::new(self.prog(r)?)),
            ExprKind::Prod(l, r) => Prog::Prod(Box::new(self.prog(l)?), Box::new(self.prog(r)?)),
            ExprKind::Star(b) => Prog::Star(Box::new(self.prog(b)?)),
            _ => return Err(Error::Internal(format!("unexpected program `{e}`"))),
        })
    }

    /// Atoms in `alive` with a run of `p` ending in `target`.
    fn pre(&self, p: &Prog, target: &FixedBitSet, alive: &FixedBitSet) -> FixedBitSet {
        match p {
            Prog::Test(t) => {
                let mut out = t.clone();
                out.intersect_with(target);
                out
            }
            Prog::Act(k) => {
                let mut out = if *k == usize::MAX {
                    if target.is_clear() {
                        FixedBitSet::with_capacity(self.atoms.len())
                    } else {
                        alive.clone()
                    }
                } else {
                    self.relations[*k].pre(target)
                };
                out.intersect_with(alive);
                out
            }
            Prog::Sum(l, r) => {
                let mut out = self.pre(l, target, alive);
                out.union_with(&self.pre(r, target, alive));
                out
            }
            Prog::Prod(l, r) => {
                let mid = self.pre(r, target, alive);
                self.pre(l, &mid, alive)
            }
            Prog::Star(b) => {
                let mut acc = target.clone();
                loop {
                    let mut next = self.pre(b, &acc, alive);
                    next.union_with(&acc);
                    if next == acc {
                        return acc;
                    }
                    acc = next;
                }
            }
        }
    }
}

/// Per-action (offer, need) patterns over the diamonds of that action.
fn step_relations(diamonds: &[(usize, Symbol, usize)], atoms: &[FixedBitSet]) -> BTreeMap<Symbol, StepRelation> {
    let mut by_action: BTreeMap<Symbol, Vec<(usize, usize)>> = BTreeMap::new();
    for (d, a, body) in diamonds {
        by_action.entry(a.clone()).or_default().push((*d, *body));
    }
    by_action
        .into_iter()
        .map(|(a, ds)| {
            let mut offer = Vec::with_capacity(atoms.len());
            let mut need = Vec::with_capacity(atoms.len());
            for g in atoms {
                let mut o = FixedBitSet::with_capacity(ds.len());
                let mut nd = FixedBitSet::with_capacity(ds.len());
                for (k, (d, body)) in ds.iter().enumerate() {
                    o.set(k, g.contains(*body));
                    nd.set(k, g.contains(*d));
                }
                offer.push(o);
                need.push(nd);
            }
            (a, StepRelation::new(offer, need))
        })
        .collect()
}

pub(super) fn diamond_list(gamma: &ParameterSet) -> Result<Vec<(usize, Symbol, usize)>> {
    Ok(Rules::new(gamma)?.diamonds)
}

pub(super) fn step_table(gamma: &ParameterSet, atoms: &[FixedBitSet]) -> Result<StepTable> {
    let diamonds = diamond_list(gamma)?;
    Ok(StepTable::new(atoms.len(), step_relations(&diamonds, atoms)))
}

pub(super) fn eliminate(gamma: &ParameterSet, max_atoms: usize) -> Result<Outcome> {
    if let Some((member, missing)) = fl_violation(gamma, &ClosureOptions::default()) {
        return Err(Error::NotFlClosed(member.to_string(), missing.to_string()));
    }
    let n = gamma.len();
    let rules = Rules::new(gamma)?;
    let (plan, _, merged) = merge_diamonds(&rules, n);
    let k = plan.free.len();
    let candidates: u128 = 1u128.checked_shl(k as u32).unwrap_or(u128::MAX);
    if k >= 64 || candidates > max_atoms as u128 {
        return Err(Error::Budget { gamma: n, free: k, candidates, limit: max_atoms });
    }
    let mut trace = vec![format!("|Γ| = {n}, {k} free parameters ({merged} diamonds identified or fixed)")];

    let mut atoms = Vec::new();
    for m in 0..(1u64 << k) {
        let signs = plan.eval(plan.free.iter().enumerate().map(|(j, &v)| (v, m >> j & 1 == 1)), n);
        if plan.coherent(&signs) {
            atoms.push(signs);
        }
    }
    trace.push(format!("{} of {} candidate atoms are locally coherent", atoms.len(), candidates));

    let relations = step_relations(&rules.diamonds, &atoms);
    let (actions, relations): (Vec<Symbol>, Vec<StepRelation>) = relations.into_iter().unzip();
    let ev = Evaluator { gamma, atoms: &atoms, actions, relations };

    let mut modal = Vec::new();
    for (i, param) in gamma.iter().enumerate() {
        if let ExprKind::Dom(x) = param.kind() {
            if !x.is_formula() {
                modal.push((i, ev.prog(x)?));
            }
        }
    }

    let mut alive = FixedBitSet::with_capacity(atoms.len());
    alive.insert_range(..);
    let mut round = 0;
    loop {
        round += 1;
        let mut removed = 0;
        for (i, prog) in &modal {
            let sat = ev.pre(prog, &alive, &alive);
            let doomed: Vec<usize> = alive.ones().filter(|&g| atoms[g].contains(*i) && !sat.contains(g)).collect();
            for g in doomed {
                alive.set(g, false);
                removed += 1;
            }
        }
        if removed == 0 {
            break;
        }
        trace.push(format!("round {round}: eliminated {removed} atoms"));
    }

    for (i, prog) in &modal {
        let sat = ev.pre(prog, &alive, &alive);
        if let Some(g) = alive.ones().find(|&g| atoms[g].contains(*i) != sat.contains(g)) {
            return Err(Error::Internal(format!(
                "surviving atom #{g} signs `{}` {} but it evaluates {}",
                gamma.name(*i),
                if atoms[g].contains(*i) { "positive" } else { "negative" },
                sat.contains(g)
            )));
        }
    }

    let survivors: Vec<FixedBitSet> = alive.ones().map(|g| atoms[g].clone()).collect();
    trace.push(format!("{} consistent atoms survive", survivors.len()));
    Ok(Outcome { atoms: survivors, trace, free: k })
}
