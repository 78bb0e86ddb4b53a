//! Guarded strings and automata over them.
//!
//! A guarded string `G0 a1 G1 ... an Gn` alternates atoms and actions. The
//! canonical interpretation of an expression is a set of such strings whose
//! atoms are consistent and whose consecutive `G a H` are canonical steps.

mod automaton;
mod equal;
mod hat;
mod member;

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::hash::{Hash, Hasher};

use crate::canonical::AtomUniverse;
use crate::error::{Error, Result};
use crate::syntax::{Expr, Symbol};

pub use automaton::{canonical_interpret, standard_interpret, GuardedAutomaton};
pub use equal::{language_equal, LanguageComparison};
pub use hat::{atom_expr, hat, normalize_to_kat};
pub use member::member;

/// An alternating sequence of atoms (indices into a universe) and actions.
#[derive(Clone)]
pub struct GuardedString {
    universe: Arc<AtomUniverse>,
    atoms: Vec<usize>,
    actions: Vec<Symbol>,
}

impl GuardedString {
    pub fn new(universe: Arc<AtomUniverse>, atoms: Vec<usize>, actions: Vec<Symbol>) -> Result<Self> {
        if atoms.len() != actions.len() + 1 {
            return Err(Error::Internal(alloc::format!(
                "guarded string with {} atoms and {} actions",
                atoms.len(),
                actions.len()
            )));
        }
        if let Some(&g) = atoms.iter().find(|&&g| g >= universe.len()) {
            return Err(Error::StateOutOfRange(g));
        }
        Ok(GuardedString { universe, atoms, actions })
    }

    /// The one-atom string `G`.
    pub fn atom(universe: Arc<AtomUniverse>, g: usize) -> Result<Self> {
        Self::new(universe, alloc::vec![g], Vec::new())
    }

    pub fn universe(&self) -> &Arc<AtomUniverse> {
        &self.universe
    }

    pub fn atoms(&self) -> &[usize] {
        &self.atoms
    }

    pub fn actions(&self) -> &[Symbol] {
        &self.actions
    }

    pub fn first(&self) -> usize {
        self.atoms[0]
    }

    pub fn last(&self) -> usize {
        self.atoms[self.atoms.len() - 1]
    }

    /// Number of letters, atoms and actions together.
    pub fn len(&self) -> usize {
        self.atoms.len() + self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `self ⋄ other`, defined when the boundary atoms agree.
    pub fn fusion(&self, other: &GuardedString) -> Option<GuardedString> {
        if self.last() != other.first() || !same_universe(&self.universe, &other.universe) {
            return None;
        }
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms[1..]);
        let mut actions = self.actions.clone();
        actions.extend_from_slice(&other.actions);
        Some(GuardedString { universe: self.universe.clone(), atoms, actions })
    }

    /// The prefix ending at the `k`-th atom (0-based).
    pub fn prefix(&self, k: usize) -> GuardedString {
        GuardedString { universe: self.universe.clone(), atoms: self.atoms[..=k].to_vec(), actions: self.actions[..k].to_vec() }
    }

    /// The string as an expression: a product of atoms and actions.
    pub fn to_expr(&self) -> Expr {
        let mut parts = alloc::vec![atom_expr(&self.universe, self.atoms[0])];
        for (a, &g) in self.actions.iter().zip(&self.atoms[1..]) {
            parts.push(Expr::act_sym(a.clone()));
            parts.push(atom_expr(&self.universe, g));
        }
        Expr::prod_all(parts)
    }

    /// Letters as printed, atoms in brace form.
    pub fn letters(&self) -> Vec<String> {
        let mut out = alloc::vec![self.universe.format(self.atoms[0])];
        for (a, &g) in self.actions.iter().zip(&self.atoms[1..]) {
            out.push(String::from(a.name()));
            out.push(self.universe.format(g));
        }
        out
    }
}

pub(crate) fn same_universe(a: &Arc<AtomUniverse>, b: &Arc<AtomUniverse>) -> bool {
    Arc::ptr_eq(a, b) || (a.gamma() == b.gamma() && a.atoms() == b.atoms())
}

impl PartialEq for GuardedString {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms && self.actions == other.actions
    }
}

impl Eq for GuardedString {}

impl Hash for GuardedString {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.atoms.hash(state);
        self.actions.hash(state);
    }
}

impl PartialOrd for GuardedString {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Shorter strings first, then letter by letter.
impl Ord for GuardedString {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.atoms.len().cmp(&other.atoms.len()).then_with(|| {
            for i in 0..self.atoms.len() {
                let c = self.atoms[i].cmp(&other.atoms[i]);
                if c.is_ne() {
                    return c;
                }
                if i < self.actions.len() {
                    let c = self.actions[i].cmp(&other.actions[i]);
                    if c.is_ne() {
                        return c;
                    }
                }
            }
            core::cmp::Ordering::Equal
        })
    }
}

impl fmt::Display for GuardedString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.letters().join(" "))
    }
}

impl fmt::Debug for GuardedString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.atoms[0])?;
        for (a, g) in self.actions.iter().zip(&self.atoms[1..]) {
            write!(f, " {a} {g}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::build_canonical;
    use crate::closure::gamma_for;

    fn universe() -> Arc<AtomUniverse> {
        let p = Expr::prop("p");
        build_canonical(&gamma_for([&p]).unwrap()).unwrap().universe().clone()
    }

    #[test]
    fn fusion_cases() {
        let u = universe();
        let a = Symbol::new("a", 0);
        let b = Symbol::new("b", 1);
        let g = GuardedString::atom(u.clone(), 0).unwrap();
        assert_eq!(g.fusion(&g), Some(g.clone()));
        let gah = GuardedString::new(u.clone(), alloc::vec![0, 1], alloc::vec![a.clone()]).unwrap();
        let hbk = GuardedString::new(u.clone(), alloc::vec![1, 0], alloc::vec![b.clone()]).unwrap();
        let joined = gah.fusion(&hbk).unwrap();
        assert_eq!(joined.atoms(), &[0, 1, 0]);
        assert_eq!(joined.actions(), &[a, b]);
        assert!(gah.fusion(&gah).is_none());
    }

    #[test]
    fn display_lists_every_parameter() {
        let u = universe();
        let w = GuardedString::new(u.clone(), alloc::vec![1, 0], alloc::vec![Symbol::new("a", 0)]).unwrap();
        let s = alloc::format!("{w}");
        assert!(s.starts_with('{') && s.contains("} a {"));
        assert!(s.contains("!p") && s.contains(" p"));
    }

    #[test]
    fn shape_is_checked() {
        let u = universe();
        assert!(GuardedString::new(u.clone(), alloc::vec![0, 1], Vec::new()).is_err());
        assert!(GuardedString::new(u, alloc::vec![9], Vec::new()).is_err());
    }
}
