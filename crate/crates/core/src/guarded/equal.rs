use alloc::collections::VecDeque;
use alloc::sync::Arc;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;
use hashbrown::{HashMap, HashSet};

use super::{same_universe, GuardedAutomaton, GuardedString};
use crate::error::{Error, Result};
use crate::syntax::Symbol;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LanguageComparison {
    Equal,
    /// A shortest, then least, string accepted by exactly one side.
    Witness(GuardedString),
}

#[derive(Default)]
struct Interner {
    ids: HashMap<Vec<usize>, u32>,
    sets: Vec<Vec<usize>>,
}

impl Interner {
    fn id(&mut self, s: &[usize]) -> u32 {
        if let Some(&i) = self.ids.get(s) {
            return i;
        }
        let i = self.sets.len() as u32;
        self.ids.insert(s.to_vec(), i);
        self.sets.push(s.to_vec());
        i
    }
}

struct Pair<'a> {
    a: &'a GuardedAutomaton,
    b: &'a GuardedAutomaton,
    alphabet: Vec<Symbol>,
    ps: Interner,
    qs: Interner,
}

impl Pair<'_> {
    fn mismatch(&self, p: u32, q: u32, g: usize) -> bool {
        self.a.accepting(&self.ps.sets[p as usize], g) != self.b.accepting(&self.qs.sets[q as usize], g)
    }

    fn targets(&mut self, p: u32, q: u32, g: usize, a: &Symbol, buf: &mut Vec<usize>) -> Option<(u32, u32)> {
        let from = self.ps.sets[p as usize].clone();
        self.a.step_positions(from, g, a, buf);
        let pe = buf.is_empty();
        let p2 = self.ps.id(buf);
        let from = self.qs.sets[q as usize].clone();
        self.b.step_positions(from, g, a, buf);
        if pe && buf.is_empty() {
            return None;
        }
        let q2 = self.qs.id(buf);
        Some((p2, q2))
    }

    /// Whether some reachable configuration disagrees, exploring sets of
    /// atoms per pair of position sets.
    fn differs(&mut self) -> bool {
        let n = self.a.universe().len();
        let start = (self.ps.id(&[0]), self.qs.id(&[0]));
        let mut seen: HashMap<(u32, u32), FixedBitSet> = HashMap::new();
        let mut queue: VecDeque<((u32, u32), FixedBitSet)> = VecDeque::new();
        let all = self.a.universe().all();
        queue.push_back((start, all));
        let mut buf = Vec::new();
        let alphabet = self.alphabet.clone();
        while let Some(((p, q), mut atoms)) = queue.pop_front() {
            let known = seen.entry((p, q)).or_insert_with(|| FixedBitSet::with_capacity(n));
            atoms.difference_with(known);
            if atoms.is_clear() {
                continue;
            }
            known.union_with(&atoms);
            if atoms.ones().any(|g| self.mismatch(p, q, g)) {
                return true;
            }
            for a in &alphabet {
                let mut groups: HashMap<(u32, u32), FixedBitSet> = HashMap::new();
                for g in atoms.ones() {
                    if let Some(t) = self.targets(p, q, g, a, &mut buf) {
                        groups.entry(t).or_insert_with(|| FixedBitSet::with_capacity(n)).insert(g);
                    }
                }
                let rel = self.a.steps().get(a);
                let mut groups: Vec<_> = groups.into_iter().collect();
                groups.sort_by_key(|(k, _)| *k);
                for (t, src) in groups {
                    queue.push_back((t, rel.post(&src)));
                }
            }
        }
        false
    }

    /// Breadth-first search for the least disagreeing string.
    fn witness(&mut self, shared_steps: bool) -> Option<(Vec<usize>, Vec<Symbol>)> {
        struct Node {
            atom: usize,
            p: u32,
            q: u32,
            parent: usize,
            action: Option<Symbol>,
        }
        let n = self.a.universe().len();
        let (p0, q0) = (self.ps.id(&[0]), self.qs.id(&[0]));
        let mut nodes: Vec<Node> = Vec::new();
        let mut seen: HashSet<(usize, u32, u32)> = HashSet::new();
        let mut queue = VecDeque::new();
        let trace = |nodes: &Vec<Node>, mut i: usize| {
            let mut atoms = Vec::new();
            let mut actions = Vec::new();
            loop {
                atoms.push(nodes[i].atom);
                match &nodes[i].action {
                    Some(a) => {
                        actions.push(a.clone());
                        i = nodes[i].parent;
                    }
                    None => break,
                }
            }
            atoms.reverse();
            actions.reverse();
            (atoms, actions)
        };
        for g in 0..n {
            seen.insert((g, p0, q0));
            nodes.push(Node { atom: g, p: p0, q: q0, parent: usize::MAX, action: None });
            if self.mismatch(p0, q0, g) {
                return Some(trace(&nodes, nodes.len() - 1));
            }
            queue.push_back(nodes.len() - 1);
        }
        let mut buf = Vec::new();
        let alphabet = self.alphabet.clone();
        while let Some(i) = queue.pop_front() {
            let (g, p, q) = (nodes[i].atom, nodes[i].p, nodes[i].q);
            for a in &alphabet {
                let Some((p2, q2)) = self.targets(p, q, g, a, &mut buf) else { continue };
                let (ra, rb) = (self.a.steps().get(a), self.b.steps().get(a));
                let mut succ = ra.successors(g);
                if !shared_steps {
                    succ.union_with(&rb.successors(g));
                }
                let empty = self.ps.id(&[]);
                for h in succ.ones() {
                    let (p2, q2) = if shared_steps {
                        (p2, q2)
                    } else {
                        let p2 = if ra.has(g, h) { p2 } else { empty };
                        let q2 = if rb.has(g, h) { q2 } else { self.qs.id(&[]) };
                        if p2 == empty && self.qs.sets[q2 as usize].is_empty() {
                            continue;
                        }
                        (p2, q2)
                    };
                    if !seen.insert((h, p2, q2)) {
                        continue;
                    }
                    nodes.push(Node { atom: h, p: p2, q: q2, parent: i, action: Some(a.clone()) });
                    if self.mismatch(p2, q2, h) {
                        return Some(trace(&nodes, nodes.len() - 1));
                    }
                    queue.push_back(nodes.len() - 1);
                }
            }
        }
        None
    }
}

fn same_steps(a: &GuardedAutomaton, b: &GuardedAutomaton) -> bool {
    Arc::ptr_eq(a.steps(), b.steps()) || (a.steps().constrained().next().is_none() && b.steps().constrained().next().is_none())
}

/// Compares the accepted languages of two automata over the same atoms.
///
/// With shared steps a search over sets of atoms settles equality first;
/// otherwise, and to extract a witness, configurations are explored one
/// atom at a time.
pub fn language_equal(a: &GuardedAutomaton, b: &GuardedAutomaton) -> Result<LanguageComparison> {
    if !same_universe(a.universe(), b.universe()) {
        return Err(Error::AlphabetMismatch);
    }
    let shared = same_steps(a, b);
    let mut alphabet = a.alphabet();
    alphabet.extend(b.alphabet());
    alphabet.sort();
    alphabet.dedup();
    let mut pair = Pair { a, b, alphabet, ps: Interner::default(), qs: Interner::default() };
    if shared && !pair.differs() {
        return Ok(LanguageComparison::Equal);
    }
    match pair.witness(shared) {
        Some((atoms, actions)) => Ok(LanguageComparison::Witness(GuardedString::new(a.universe().clone(), atoms, actions)?)),
        None if !shared => Ok(LanguageComparison::Equal),
        None => Err(Error::Internal("languages differ but no witness was found".into())),
    }
}
