//! The canonical relational model over a closed parameter set.
//!
//! Atoms are sign vectors over Γ. [`build_canonical`] keeps the locally
//! coherent ones and then repeatedly removes atoms asserting a modal
//! parameter `dom(x)` that the remaining atoms and steps cannot realize.

mod build;
pub mod logic;
pub mod steps;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use fixedbitset::FixedBitSet;
use hashbrown::HashMap;

pub use logic::{compile, BoolExpr};
pub use steps::{StepRelation, StepTable};

use crate::closure::{gamma_for, ParameterSet};
use crate::error::{Error, Result};
use crate::relational::{satisfies, RelationalModel};
use crate::syntax::{Expr, Symbol};

/// A sign vector over Γ: bit `i` is set when parameter `i` occurs positively.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom(FixedBitSet);

impl Atom {
    pub fn from_signs(signs: FixedBitSet) -> Self {
        Atom(signs)
    }

    pub fn holds(&self, i: usize) -> bool {
        self.0.contains(i)
    }

    pub fn signs(&self) -> &FixedBitSet {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() == 0
    }
}

/// Orders sign vectors as binary numbers, parameter `i` weighing `2^i`.
pub fn binary_cmp(a: &FixedBitSet, b: &FixedBitSet) -> Ordering {
    let n = a.len().max(b.len());
    for i in (0..n).rev() {
        match (a.contains(i), b.contains(i)) {
            (true, false) => return Ordering::Greater,
            (false, true) => return Ordering::Less,
            _ => {}
        }
    }
    Ordering::Equal
}

/// An ordered set of atoms over a fixed Γ.
#[derive(Clone, Debug)]
pub struct AtomUniverse {
    gamma: ParameterSet,
    atoms: Vec<Atom>,
    index: HashMap<FixedBitSet, usize>,
}

impl AtomUniverse {
    pub fn new(gamma: ParameterSet, mut atoms: Vec<Atom>) -> Result<Self> {
        if atoms.iter().any(|a| a.len() != gamma.len()) {
            return Err(Error::AtomMismatch);
        }
        atoms.sort_by(|a, b| binary_cmp(&a.0, &b.0));
        atoms.dedup();
        let index = atoms.iter().enumerate().map(|(i, a)| (a.0.clone(), i)).collect();
        Ok(AtomUniverse { gamma, atoms, index })
    }

    /// All `2^|Γ|` atoms, refusing more than `limit`.
    pub fn full(gamma: ParameterSet, limit: usize) -> Result<Self> {
        let n = gamma.len();
        let count = 1u128.checked_shl(n as u32).unwrap_or(u128::MAX);
        if n >= 64 || count > limit as u128 {
            return Err(Error::Budget { gamma: n, free: n, candidates: count, limit });
        }
        let atoms = (0..1u64 << n)
            .map(|m| {
                let mut b = FixedBitSet::with_capacity(n);
                for i in 0..n {
                    b.set(i, m >> i & 1 == 1);
                }
                Atom(b)
            })
            .collect();
        Self::new(gamma, atoms)
    }

    pub fn gamma(&self) -> &ParameterSet {
        &self.gamma
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn index_of(&self, a: &Atom) -> Option<usize> {
        self.index.get(&a.0).copied()
    }

    /// The set of all atoms.
    pub fn all(&self) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(self.len());
        b.insert_range(..);
        b
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.len())
    }

    /// Atoms at which the formula `phi` holds, reading signs.
    pub fn satisfying(&self, phi: &Expr) -> Result<FixedBitSet> {
        let b = compile(phi, &self.gamma)?;
        let mut out = self.empty_set();
        for (i, a) in self.atoms.iter().enumerate() {
            out.set(i, b.eval(&a.0));
        }
        Ok(out)
    }

    /// Atoms where parameter `i` is positive.
    pub fn positive(&self, i: usize) -> FixedBitSet {
        let mut out = self.empty_set();
        for (k, a) in self.atoms.iter().enumerate() {
            out.set(k, a.holds(i));
        }
        out
    }

    /// `{p !q ...}` listing every parameter in order.
    pub fn format_atom(&self, a: &Atom) -> String {
        let mut s = String::from("{");
        for i in 0..self.gamma.len() {
            if i > 0 {
                s.push(' ');
            }
            if !a.holds(i) {
                s.push('!');
            }
            s.push_str(self.gamma.name(i));
        }
        s.push('}');
        s
    }

    pub fn format(&self, i: usize) -> String {
        self.format_atom(&self.atoms[i])
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    /// Refuse to enumerate more candidate atoms than this.
    pub max_atoms: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { max_atoms: 1 << 16 }
    }
}

/// The consistent atoms over Γ with their action steps.
#[derive(Clone, Debug)]
pub struct CanonicalModel {
    universe: Arc<AtomUniverse>,
    steps: Arc<StepTable>,
    trace: Vec<String>,
    free: usize,
}

pub fn build_canonical(gamma: &ParameterSet) -> Result<CanonicalModel> {
    build_canonical_with(gamma, &BuildOptions::default())
}

pub fn build_canonical_with(gamma: &ParameterSet, opts: &BuildOptions) -> Result<CanonicalModel> {
    let out = build::eliminate(gamma, opts.max_atoms)?;
    let universe = AtomUniverse::new(gamma.clone(), out.atoms.into_iter().map(Atom).collect())?;
    let signs: Vec<FixedBitSet> = universe.atoms.iter().map(|a| a.0.clone()).collect();
    let steps = build::step_table(gamma, &signs)?;
    Ok(CanonicalModel { universe: Arc::new(universe), steps: Arc::new(steps), trace: out.trace, free: out.free })
}

impl CanonicalModel {
    pub fn gamma(&self) -> &ParameterSet {
        self.universe.gamma()
    }

    pub fn universe(&self) -> &Arc<AtomUniverse> {
        &self.universe
    }

    pub fn steps(&self) -> &Arc<StepTable> {
        &self.steps
    }

    /// Notes on how the model was obtained.
    pub fn trace(&self) -> &[String] {
        &self.trace
    }

    /// Number of independent parameters enumerated.
    pub fn free_parameters(&self) -> usize {
        self.free
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn is_consistent(&self, a: &Atom) -> Result<bool> {
        if a.len() != self.gamma().len() {
            return Err(Error::AtomMismatch);
        }
        Ok(self.universe.index_of(a).is_some())
    }

    pub fn step(&self, a: &Symbol, g: usize, h: usize) -> bool {
        self.steps.get(a).has(g, h)
    }

    /// Truth of the formula `phi` at atom `g`, by its signs.
    pub fn entails(&self, g: usize, phi: &Expr) -> Result<bool> {
        entails(self.universe.atom(g), phi, self.gamma())
    }

    pub fn state_name(i: usize) -> String {
        format!("G{i}")
    }

    /// The model as a relational model. Actions are related by the
    /// canonical steps; propositions outside Γ are empty.
    pub fn to_relational<'a>(
        &self,
        actions: impl IntoIterator<Item = &'a Symbol>,
        props: impl IntoIterator<Item = &'a Symbol>,
    ) -> RelationalModel {
        let n = self.len();
        let mut m = RelationalModel::with_names((0..n).map(Self::state_name).collect());
        let mut acts: BTreeSet<Symbol> = actions.into_iter().cloned().collect();
        acts.extend(self.steps.constrained().cloned());
        for a in &acts {
            m.declare_action(a.name());
            let rel = self.steps.get(a);
            for (g, h) in rel.pairs() {
                m.add_edge(a.name(), g, h).expect("state in range");
            }
        }
        let mut ps: BTreeSet<Symbol> = props.into_iter().cloned().collect();
        for e in self.gamma().iter() {
            if let crate::syntax::ExprKind::Prop(p) = e.kind() {
                ps.insert(p.clone());
            }
        }
        for p in &ps {
            m.declare_prop(p.name());
            if let Some(i) = self.gamma().index_of(&Expr::prop_sym(p.clone())) {
                for g in 0..n {
                    if self.universe.atom(g).holds(i) {
                        m.set_prop(p.name(), g).expect("state in range");
                    }
                }
            }
        }
        m
    }
}

/// Truth of the formula `phi` at `atom`, by its signs over `gamma`.
pub fn entails(atom: &Atom, phi: &Expr, gamma: &ParameterSet) -> Result<bool> {
    if atom.len() != gamma.len() {
        return Err(Error::AtomMismatch);
    }
    Ok(compile(phi, gamma)?.eval(&atom.0))
}

/// A state of a finite model where a formula holds.
#[derive(Clone, Debug)]
pub struct SatWitness {
    pub canonical: CanonicalModel,
    pub model: RelationalModel,
    pub state: usize,
}

/// Satisfiability of a formula; the witness is checked by the relational
/// evaluator before it is returned.
pub fn sat(phi: &Expr) -> Result<Option<SatWitness>> {
    sat_with(phi, &BuildOptions::default())
}

pub fn sat_with(phi: &Expr, opts: &BuildOptions) -> Result<Option<SatWitness>> {
    if !phi.is_formula() {
        return Err(Error::NotAFormula(phi.to_string()));
    }
    let gamma = gamma_for([phi])?;
    let c = build_canonical_with(&gamma, opts)?;
    let mut found = None;
    for g in 0..c.len() {
        if c.entails(g, phi)? {
            found = Some(g);
            break;
        }
    }
    let Some(state) = found else { return Ok(None) };
    let model = c.to_relational(&phi.actions(), &phi.props());
    if !satisfies(&model, state, phi)? {
        return Err(Error::Internal(format!("sat witness for `{phi}` fails under the relational evaluator")));
    }
    Ok(Some(SatWitness { canonical: c, model, state }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::fl_close;
    use crate::syntax::parse;

    #[test]
    fn empty_gamma_has_one_atom() {
        let g = fl_close(&ParameterSet::default()).unwrap();
        let c = build_canonical(&g).unwrap();
        assert_eq!(c.len(), 1);
        let a = c.universe().atom(0);
        for i in 0..g.len() {
            assert_eq!(a.holds(i), !g.name(i).starts_with("dom(0"));
        }
    }

    #[test]
    fn prop_gives_two_atoms() {
        let p = Expr::prop("p");
        let c = build_canonical(&gamma_for([&p]).unwrap()).unwrap();
        assert_eq!(c.len(), 2);
        let i = c.gamma().index_of(&p).unwrap();
        assert!(!c.universe().atom(0).holds(i) && c.universe().atom(1).holds(i));
    }

    #[test]
    fn halting_and_diverging_exclude_each_other() {
        let a = Expr::act("a");
        let s = ParameterSet::new([Expr::dom(a.clone()), Expr::dom(Expr::anti(a.clone()))]).unwrap();
        let c = build_canonical(&fl_close(&s).unwrap()).unwrap();
        let i = c.gamma().index_of(&Expr::dom(a.clone())).unwrap();
        let j = c.gamma().index_of(&Expr::dom(Expr::anti(a))).unwrap();
        assert!(!c.is_empty());
        for atom in c.universe().atoms() {
            assert!(!(atom.holds(i) && atom.holds(j)));
            assert!(atom.holds(i) || atom.holds(j));
        }
        let mut bad = c.universe().atom(0).signs().clone();
        bad.insert(i);
        bad.insert(j);
        assert!(!c.is_consistent(&Atom::from_signs(bad)).unwrap());
    }

    #[test]
    fn zero_top_is_never_consistent() {
        let g = fl_close(&ParameterSet::default()).unwrap();
        let c = build_canonical(&g).unwrap();
        let mut signs = c.universe().atom(0).signs().clone();
        signs.insert(g.index_of(&Expr::dom(Expr::zero())).unwrap());
        assert!(!c.is_consistent(&Atom::from_signs(signs)).unwrap());
        assert!(matches!(c.is_consistent(&Atom::from_signs(FixedBitSet::with_capacity(1))), Err(Error::AtomMismatch)));
    }

    #[test]
    fn sat_examples() {
        assert!(sat(&Expr::one()).unwrap().is_some());
        assert!(sat(&Expr::zero()).unwrap().is_none());
        let contradiction = parse("<a>p;[a]!p", &["p"]).unwrap();
        assert!(sat(&contradiction).unwrap().is_none());
        let reach = parse("<a*>p", &["p"]).unwrap();
        let w = sat(&reach).unwrap().unwrap();
        assert!(satisfies(&w.model, w.state, &reach).unwrap());
    }

    #[test]
    fn entails_reads_signs() {
        let p = Expr::prop("p");
        let c = build_canonical(&gamma_for([&p]).unwrap()).unwrap();
        assert!(!c.entails(0, &p).unwrap() && c.entails(1, &p).unwrap());
        assert!(c.entails(1, &Expr::anti(Expr::anti(p.clone()))).unwrap());
        assert!(c.entails(0, &Expr::one()).unwrap() && !c.entails(0, &Expr::zero()).unwrap());
    }

    #[test]
    fn unclosed_gamma_is_rejected() {
        let s = ParameterSet::new([Expr::dom(Expr::prop("p"))]).unwrap();
        assert!(matches!(build_canonical(&s), Err(Error::NotFlClosed(..))));
    }
}
