//! Action steps between atoms.
//!
//! A step `G -a-> H` exists when every `a`-diamond `dom(a;φ)` whose `φ`
//! holds at `H` is asserted by `G`. Atoms are grouped by the pattern of
//! diamonds they assert (their "need") and by the pattern of diamond bodies
//! they satisfy (their "offer"), so the relation is stored in space linear
//! in the number of atoms.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;
use hashbrown::HashMap;

use crate::syntax::Symbol;

#[derive(Clone, Debug)]
pub struct StepRelation {
    len: usize,
    offer_class: Vec<u32>,
    need_class: Vec<u32>,
    offer_members: Vec<FixedBitSet>,
    need_members: Vec<FixedBitSet>,
    /// For each need class, the offer classes it admits.
    admits: Vec<Vec<u32>>,
    /// For each offer class, the need classes admitting it.
    admitted_by: Vec<Vec<u32>>,
}

fn intern(patterns: Vec<FixedBitSet>, len: usize) -> (Vec<u32>, Vec<FixedBitSet>, Vec<FixedBitSet>) {
    let mut ids: HashMap<FixedBitSet, u32> = HashMap::new();
    let mut uniq = Vec::new();
    let mut members: Vec<FixedBitSet> = Vec::new();
    let mut class = Vec::with_capacity(patterns.len());
    for (i, p) in patterns.into_iter().enumerate() {
        let id = *ids.entry(p.clone()).or_insert_with(|| {
            uniq.push(p);
            members.push(FixedBitSet::with_capacity(len));
            (uniq.len() - 1) as u32
        });
        members[id as usize].insert(i);
        class.push(id);
    }
    (class, uniq, members)
}

impl StepRelation {
    /// `offer[h]` and `need[g]` are bitsets over the same list of diamonds.
    pub fn new(offer: Vec<FixedBitSet>, need: Vec<FixedBitSet>) -> Self {
        let len = offer.len();
        debug_assert_eq!(len, need.len());
        let (offer_class, offers, offer_members) = intern(offer, len);
        let (need_class, needs, need_members) = intern(need, len);
        let admits: Vec<Vec<u32>> = needs
            .iter()
            .map(|n| (0..offers.len() as u32).filter(|&o| offers[o as usize].is_subset(n)).collect())
            .collect();
        let mut admitted_by = alloc::vec![Vec::new(); offers.len()];
        for (n, os) in admits.iter().enumerate() {
            for &o in os {
                admitted_by[o as usize].push(n as u32);
            }
        }
        StepRelation { len, offer_class, need_class, offer_members, need_members, admits, admitted_by }
    }

    /// Every atom steps to every atom.
    pub fn complete(len: usize) -> Self {
        let empty = FixedBitSet::new();
        Self::new(alloc::vec![empty.clone(); len], alloc::vec![empty; len])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn has(&self, g: usize, h: usize) -> bool {
        self.admits[self.need_class[g] as usize].contains(&self.offer_class[h])
    }

    pub fn successors(&self, g: usize) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.len);
        for &o in &self.admits[self.need_class[g] as usize] {
            out.union_with(&self.offer_members[o as usize]);
        }
        out
    }

    /// Atoms with a step into `targets`.
    pub fn pre(&self, targets: &FixedBitSet) -> FixedBitSet {
        let mut offered = FixedBitSet::with_capacity(self.offer_members.len());
        for h in targets.ones() {
            offered.insert(self.offer_class[h] as usize);
        }
        let mut needs = FixedBitSet::with_capacity(self.need_members.len());
        for o in offered.ones() {
            for &n in &self.admitted_by[o] {
                needs.insert(n as usize);
            }
        }
        let mut out = FixedBitSet::with_capacity(self.len);
        for n in needs.ones() {
            out.union_with(&self.need_members[n]);
        }
        out
    }

    /// Atoms reachable by one step from `sources`.
    pub fn post(&self, sources: &FixedBitSet) -> FixedBitSet {
        let mut needed = FixedBitSet::with_capacity(self.need_members.len());
        for g in sources.ones() {
            needed.insert(self.need_class[g] as usize);
        }
        let mut offers = FixedBitSet::with_capacity(self.offer_members.len());
        for n in needed.ones() {
            for &o in &self.admits[n] {
                offers.insert(o as usize);
            }
        }
        let mut out = FixedBitSet::with_capacity(self.len);
        for o in offers.ones() {
            out.union_with(&self.offer_members[o]);
        }
        out
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len).flat_map(move |g| self.successors(g).ones().map(move |h| (g, h)).collect::<Vec<_>>())
    }
}

/// Step relations for every action; actions without diamonds step freely.
#[derive(Clone, Debug)]
pub struct StepTable {
    relations: BTreeMap<Symbol, StepRelation>,
    complete: StepRelation,
}

impl StepTable {
    pub fn new(len: usize, relations: BTreeMap<Symbol, StepRelation>) -> Self {
        StepTable { relations, complete: StepRelation::complete(len) }
    }

    /// The table where all actions relate all atoms.
    pub fn complete(len: usize) -> Self {
        Self::new(len, BTreeMap::new())
    }

    pub fn get(&self, a: &Symbol) -> &StepRelation {
        self.relations.get(a).unwrap_or(&self.complete)
    }

    /// Actions with a constrained relation.
    pub fn constrained(&self) -> impl Iterator<Item = &Symbol> {
        self.relations.keys()
    }

    pub fn len(&self) -> usize {
        self.complete.len()
    }

    pub fn is_empty(&self) -> bool {
        self.complete.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(n: usize, ones: &[usize]) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        for &i in ones {
            b.insert(i);
        }
        b
    }

    #[test]
    fn box_compatibility() {
        // One diamond. Atom 0 asserts it, atom 1 does not; atom 0 offers it.
        let offer = alloc::vec![bits(1, &[0]), bits(1, &[])];
        let need = alloc::vec![bits(1, &[0]), bits(1, &[])];
        let r = StepRelation::new(offer, need);
        assert!(r.has(0, 0) && r.has(0, 1));
        assert!(!r.has(1, 0) && r.has(1, 1));
        assert_eq!(r.pre(&bits(2, &[0])), bits(2, &[0]));
        assert_eq!(r.post(&bits(2, &[1])), bits(2, &[1]));
        assert_eq!(r.pairs().count(), 3);
    }

    #[test]
    fn complete_relation() {
        let r = StepRelation::complete(3);
        assert_eq!(r.pairs().count(), 9);
        assert_eq!(r.pre(&bits(3, &[2])), bits(3, &[0, 1, 2]));
        assert!(r.pre(&bits(3, &[])).is_clear());
    }
}
