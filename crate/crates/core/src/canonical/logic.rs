//! Boolean evaluation of formulas at atoms.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::ToString;

use fixedbitset::FixedBitSet;

use crate::closure::{pad, ParameterSet};
use crate::error::{Error, Result};
use crate::syntax::{question, testable_form, Expr, ExprKind};

/// A Boolean combination of parameter signs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoolExpr {
    Const(bool),
    Var(usize),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn negate(b: BoolExpr) -> Self {
        match b {
            BoolExpr::Const(v) => BoolExpr::Const(!v),
            BoolExpr::Not(inner) => *inner,
            other => BoolExpr::Not(Box::new(other)),
        }
    }

    pub fn and(l: BoolExpr, r: BoolExpr) -> Self {
        match (l, r) {
            (BoolExpr::Const(false), _) | (_, BoolExpr::Const(false)) => BoolExpr::Const(false),
            (BoolExpr::Const(true), x) | (x, BoolExpr::Const(true)) => x,
            (l, r) => BoolExpr::And(Box::new(l), Box::new(r)),
        }
    }

    pub fn or(l: BoolExpr, r: BoolExpr) -> Self {
        match (l, r) {
            (BoolExpr::Const(true), _) | (_, BoolExpr::Const(true)) => BoolExpr::Const(true),
            (BoolExpr::Const(false), x) | (x, BoolExpr::Const(false)) => x,
            (l, r) => BoolExpr::Or(Box::new(l), Box::new(r)),
        }
    }

    pub fn eval(&self, signs: &FixedBitSet) -> bool {
        match self {
            BoolExpr::Const(v) => *v,
            BoolExpr::Var(i) => signs.contains(*i),
            BoolExpr::Not(b) => !b.eval(signs),
            BoolExpr::And(l, r) => l.eval(signs) && r.eval(signs),
            BoolExpr::Or(l, r) => l.eval(signs) || r.eval(signs),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            BoolExpr::Const(_) => {}
            BoolExpr::Var(i) => {
                out.insert(*i);
            }
            BoolExpr::Not(b) => b.vars(out),
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) => {
                l.vars(out);
                r.vars(out);
            }
        }
    }
}

/// Translates a formula into a Boolean combination of members of `gamma`.
///
/// Members are read directly; otherwise the formula is taken apart by the
/// Boolean laws until members are reached.
pub fn compile(phi: &Expr, gamma: &ParameterSet) -> Result<BoolExpr> {
    if !phi.is_formula() {
        return Err(Error::NotAFormula(phi.to_string()));
    }
    compile_formula(phi, gamma)
}

fn compile_formula(phi: &Expr, gamma: &ParameterSet) -> Result<BoolExpr> {
    if let Some(i) = gamma.index_of(phi) {
        return Ok(BoolExpr::Var(i));
    }
    if let Some(i) = gamma.index_of(&question(phi)) {
        return Ok(BoolExpr::Var(i));
    }
    match phi.kind() {
        ExprKind::Zero => Ok(BoolExpr::Const(false)),
        ExprKind::One => Ok(BoolExpr::Const(true)),
        ExprKind::Sum(l, r) => Ok(BoolExpr::or(compile_formula(l, gamma)?, compile_formula(r, gamma)?)),
        ExprKind::Prod(l, r) => Ok(BoolExpr::and(compile_formula(l, gamma)?, compile_formula(r, gamma)?)),
        ExprKind::Anti(y) => Ok(BoolExpr::negate(compile_dom(y, gamma)?)),
        ExprKind::Dom(y) => compile_dom(y, gamma),
        _ => Err(Error::ClosureDeficiency(phi.to_string())),
    }
}

/// The truth of `dom(x)`.
pub fn compile_dom(x: &Expr, gamma: &ParameterSet) -> Result<BoolExpr> {
    let t = testable_form(x);
    for cand in [Expr::dom(t.clone()), pad(&t), Expr::dom(Expr::prod(t.clone(), Expr::one()))] {
        if let Some(i) = gamma.index_of(&cand) {
            return Ok(BoolExpr::Var(i));
        }
    }
    if let ExprKind::Prod(f, one) = t.kind() {
        if matches!(one.kind(), ExprKind::One) {
            if let Some(i) = gamma.index_of(&Expr::dom(f.clone())) {
                return Ok(BoolExpr::Var(i));
            }
        }
    }
    if x.is_formula() {
        return compile_formula(x, gamma);
    }
    Err(Error::ClosureDeficiency(Expr::dom(x.clone()).to_string()))
}
