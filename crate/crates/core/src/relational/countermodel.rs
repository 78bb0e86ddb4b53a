//! Countermodels, unravelings and bisimulation.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;

use super::{separates, RelationalModel};
use crate::canonical::CanonicalModel;
use crate::error::{Error, Result};
use crate::guarded::GuardedString;
use crate::syntax::{Expr, Symbol};

/// How a countermodel was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    /// Just the states and steps of the witness.
    Path,
    /// The part of the canonical model generated by the first atom.
    Submodel,
    /// The witness path unraveled into fresh states on top of the submodel.
    Unraveled,
}

/// A relational model with a pair of states separating two expressions.
#[derive(Clone, Debug)]
pub struct Countermodel {
    pub model: RelationalModel,
    /// The separating pair.
    pub point: (usize, usize),
    /// States visited by the witness, in order.
    pub path: Vec<usize>,
    pub construction: Construction,
}

fn vocabulary(exprs: &[&Expr], extra: &[Symbol]) -> (BTreeSet<Symbol>, BTreeSet<Symbol>) {
    let mut actions: BTreeSet<Symbol> = extra.iter().cloned().collect();
    let mut props = BTreeSet::new();
    for e in exprs {
        actions.extend(e.actions());
        props.extend(e.props());
    }
    (actions, props)
}

/// The part of `c` reachable from `roots`, as a relational model.
///
/// Returns the model and, for each of its states, the atom it stands for.
pub fn generated_submodel<'a>(
    c: &CanonicalModel,
    roots: impl IntoIterator<Item = usize>,
    actions: impl IntoIterator<Item = &'a Symbol>,
    props: impl IntoIterator<Item = &'a Symbol>,
) -> (RelationalModel, Vec<usize>) {
    let actions: Vec<&Symbol> = actions.into_iter().collect();
    let mut seen = FixedBitSet::with_capacity(c.len());
    let mut queue: VecDeque<usize> = VecDeque::new();
    for r in roots {
        if !seen.put(r) {
            queue.push_back(r);
        }
    }
    while let Some(g) = queue.pop_front() {
        for a in &actions {
            for h in c.steps().get(a).successors(g).ones() {
                if !seen.put(h) {
                    queue.push_back(h);
                }
            }
        }
    }
    let atoms: Vec<usize> = seen.ones().collect();
    let mut index = alloc::vec![usize::MAX; c.len()];
    for (k, &g) in atoms.iter().enumerate() {
        index[g] = k;
    }
    let mut m = RelationalModel::with_names(atoms.iter().map(|&g| CanonicalModel::state_name(g)).collect());
    for a in &actions {
        m.declare_action(a.name());
        let rel = c.steps().get(a);
        for (k, &g) in atoms.iter().enumerate() {
            for h in rel.successors(g).ones() {
                m.add_edge(a.name(), k, index[h]).expect("reachable");
            }
        }
    }
    for p in props {
        m.declare_prop(p.name());
        if let Some(i) = c.gamma().index_of(&Expr::prop_sym(p.clone())) {
            for (k, &g) in atoms.iter().enumerate() {
                if c.universe().atom(g).holds(i) {
                    m.set_prop(p.name(), k).expect("in range");
                }
            }
        }
    }
    (m, atoms)
}

/// The witness alone: states `w1 .. wn` with the valuations of its atoms,
/// linked by its actions and nothing else.
fn path_model(c: &CanonicalModel, w: &GuardedString, actions: &BTreeSet<Symbol>, props: &BTreeSet<Symbol>) -> Result<RelationalModel> {
    let n = w.atoms().len();
    let mut m = RelationalModel::with_names((1..=n).map(|i| format!("w{i}")).collect());
    for a in actions {
        m.declare_action(a.name());
    }
    for (i, a) in w.actions().iter().enumerate() {
        m.add_edge(a.name(), i, i + 1)?;
    }
    for p in props {
        m.declare_prop(p.name());
        if let Some(k) = c.gamma().index_of(&Expr::prop_sym(p.clone())) {
            for (i, &g) in w.atoms().iter().enumerate() {
                if c.universe().atom(g).holds(k) {
                    m.set_prop(p.name(), i)?;
                }
            }
        }
    }
    Ok(m)
}

/// A model for the witness `w` of a difference between `e` and `f`.
///
/// Three candidates are tried in order, each with the pair (first, last)
/// of the witness path:
///
/// 1. the witness path on its own, which suffices whenever no test of
///    `e` or `f` looks beyond it;
/// 2. the part of `c` generated by the first atom of `w`;
/// 3. the witness path unraveled: fresh states `w1 .. wn` copy the atoms
///    of `w`, are linked by its actions, and otherwise step into `c` like
///    their atoms do. Each copy is bisimilar to its atom and the only path
///    from `w1` to `wn` spells `w`, so this one always separates.
///
/// Every candidate is checked with the relational evaluator.
pub fn export_countermodel(c: &CanonicalModel, w: &GuardedString, e: &Expr, f: &Expr) -> Result<Countermodel> {
    if !crate::guarded::same_universe(w.universe(), c.universe()) {
        return Err(Error::AtomMismatch);
    }
    let (actions, props) = vocabulary(&[e, f], w.actions());
    let n = w.atoms().len();
    let pm = path_model(c, w, &actions, &props)?;
    if separates(&pm, 0, n - 1, e, f)? {
        return Ok(Countermodel { model: pm, point: (0, n - 1), path: (0..n).collect(), construction: Construction::Path });
    }

    let (m, atoms) = generated_submodel(c, [w.first()], &actions, &props);
    let local = |g: usize| atoms.binary_search(&g).expect("reachable from the first atom");
    let path: Vec<usize> = w.atoms().iter().map(|&g| local(g)).collect();
    let point = (path[0], path[path.len() - 1]);
    if separates(&m, point.0, point.1, e, f)? {
        return Ok(Countermodel { model: m, point, path, construction: Construction::Submodel });
    }

    let base = m.len();
    let mut names: Vec<String> = m.state_names().to_vec();
    names.extend((1..=n).map(|i| format!("w{i}")));
    let mut u = RelationalModel::with_names(names);
    for (a, rel) in m.actions() {
        u.declare_action(a);
        for (x, y) in rel.pairs() {
            u.add_edge(a, x, y)?;
        }
    }
    for (p, set) in m.props() {
        u.declare_prop(p);
        for x in set.ones() {
            u.set_prop(p, x)?;
        }
    }
    for (i, &g) in w.atoms().iter().enumerate() {
        let s = base + i;
        let k = local(g);
        for (p, set) in m.props() {
            if set.contains(k) {
                u.set_prop(p, s)?;
            }
        }
        for (a, rel) in m.actions() {
            for y in rel.row(k).ones() {
                u.add_edge(a, s, y)?;
            }
        }
        if i + 1 < n {
            u.add_edge(w.actions()[i].name(), s, s + 1)?;
        }
    }
    let point = (base, base + n - 1);
    if !separates(&u, point.0, point.1, e, f)? {
        return Err(Error::Internal(format!("countermodel for `{e}` vs `{f}` along {w:?} does not separate")));
    }
    Ok(Countermodel { model: u, point, path: (base..base + n).collect(), construction: Construction::Unraveled })
}

/// The pairs `(v, v ⋄ u)` for `u ∈ l` and `v` a consistently guarded
/// string of `c` with at most `bound` atoms.
pub fn cay(l: &[GuardedString], bound: usize, c: &CanonicalModel) -> Vec<(GuardedString, GuardedString)> {
    let mut actions: BTreeSet<Symbol> = c.steps().constrained().cloned().collect();
    for u in l {
        actions.extend(u.actions().iter().cloned());
    }
    let mut out = Vec::new();
    if l.is_empty() {
        return out;
    }
    let mut layer: Vec<GuardedString> =
        (0..c.len()).map(|g| GuardedString::atom(c.universe().clone(), g).expect("in range")).collect();
    for depth in 1..=bound {
        for v in &layer {
            for u in l {
                if let Some(vu) = v.fusion(u) {
                    out.push((v.clone(), vu));
                }
            }
        }
        if depth == bound {
            break;
        }
        let mut next = Vec::new();
        for v in &layer {
            for a in &actions {
                for h in c.steps().get(a).successors(v.last()).ones() {
                    let step =
                        GuardedString::new(c.universe().clone(), alloc::vec![v.last(), h], alloc::vec![a.clone()]).expect("in range");
                    next.push(v.fusion(&step).expect("shared atom"));
                }
            }
        }
        layer = next;
    }
    out
}

/// An unraveling of `c` from one atom.
#[derive(Clone, Debug)]
pub struct Unraveling {
    pub model: RelationalModel,
    /// States `0..atoms.len()` copy the atoms of `c` listed here.
    pub atoms: Vec<usize>,
    /// The remaining states, one per guarded string from the root.
    pub strings: Vec<GuardedString>,
}

impl Unraveling {
    pub fn string_state(&self, k: usize) -> usize {
        self.atoms.len() + k
    }
}

/// Unravels `c` from `root` into guarded strings with up to `depth`
/// actions. Strings of maximal depth step back into the generated part of
/// `c`, so every string is bisimilar to its last atom.
pub fn unravel<'a>(
    c: &CanonicalModel,
    root: usize,
    depth: usize,
    actions: impl IntoIterator<Item = &'a Symbol>,
    props: impl IntoIterator<Item = &'a Symbol>,
) -> Result<Unraveling> {
    let actions: Vec<&Symbol> = actions.into_iter().collect();
    let props: Vec<&Symbol> = props.into_iter().collect();
    if root >= c.len() {
        return Err(Error::StateOutOfRange(root));
    }
    let (m, atoms) = generated_submodel(c, [root], actions.iter().copied(), props.iter().copied());
    let local = |g: usize| atoms.binary_search(&g).expect("generated");
    let mut strings = alloc::vec![GuardedString::atom(c.universe().clone(), root)?];
    let mut edges: Vec<(usize, Symbol, usize)> = Vec::new();
    let mut frontier = alloc::vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &k in &frontier {
            let g = strings[k].last();
            for a in &actions {
                for h in c.steps().get(a).successors(g).ones() {
                    let step = GuardedString::new(c.universe().clone(), alloc::vec![g, h], alloc::vec![(*a).clone()])?;
                    let s = strings[k].fusion(&step).expect("shared atom");
                    strings.push(s);
                    edges.push((k, (*a).clone(), strings.len() - 1));
                    next.push(strings.len() - 1);
                }
            }
        }
        frontier = next;
    }
    let base = atoms.len();
    let mut names: Vec<String> = m.state_names().to_vec();
    names.extend((0..strings.len()).map(|k| format!("s{k}")));
    let mut u = RelationalModel::with_names(names);
    for (a, rel) in m.actions() {
        u.declare_action(a);
        for (x, y) in rel.pairs() {
            u.add_edge(a, x, y)?;
        }
    }
    for (p, set) in m.props() {
        u.declare_prop(p);
        for x in set.ones() {
            u.set_prop(p, x)?;
        }
        for (k, s) in strings.iter().enumerate() {
            if set.contains(local(s.last())) {
                u.set_prop(p, base + k)?;
            }
        }
    }
    for (x, a, y) in edges {
        u.add_edge(a.name(), base + x, base + y)?;
    }
    for &k in &frontier {
        let g = local(strings[k].last());
        for (a, rel) in m.actions() {
            for y in rel.row(g).ones() {
                u.add_edge(a, base + k, y)?;
            }
        }
    }
    Ok(Unraveling { model: u, atoms, strings })
}

/// Whether some bisimulation between `m` and `n` relates `x` and `y`.
pub fn bisimilar(m: &RelationalModel, x: usize, n: &RelationalModel, y: usize) -> Result<bool> {
    if x >= m.len() {
        return Err(Error::StateOutOfRange(x));
    }
    if y >= n.len() {
        return Err(Error::StateOutOfRange(y));
    }
    Ok(bisimulation(m, n)?[x].contains(y))
}

/// The largest bisimulation between `m` and `n`, one row per state of `m`.
pub fn bisimulation(m: &RelationalModel, n: &RelationalModel) -> Result<Vec<FixedBitSet>> {
    let names = |model: &RelationalModel| -> (Vec<String>, Vec<String>) {
        (model.actions().map(|(a, _)| a.into()).collect(), model.props().map(|(p, _)| p.into()).collect())
    };
    if names(m) != names(n) {
        return Err(Error::AlphabetMismatch);
    }
    let (rm, rn) = (m.len(), n.len());
    let mut rel: Vec<FixedBitSet> = (0..rm)
        .map(|s| {
            let mut row = FixedBitSet::with_capacity(rn);
            for t in 0..rn {
                let same = m.props().zip(n.props()).all(|((_, a), (_, b))| a.contains(s) == b.contains(t));
                row.set(t, same);
            }
            row
        })
        .collect();
    let pairs: Vec<_> = m.actions().map(|(_, r)| r).zip(n.actions().map(|(_, r)| r)).collect();
    loop {
        let mut changed = false;
        for s in 0..rm {
            let candidates: Vec<usize> = rel[s].ones().collect();
            for t in candidates {
                let ok = pairs.iter().all(|(ra, rb)| {
                    let forth = ra.row(s).ones().all(|s2| !rel[s2].is_disjoint(rb.row(t)));
                    let back = rb.row(t).ones().all(|t2| ra.row(s).ones().any(|s2| rel[s2].contains(t2)));
                    forth && back
                });
                if !ok {
                    rel[s].set(t, false);
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(rel);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::build_canonical;
    use crate::closure::gamma_for;
    use crate::relational::{evaluate, satisfies};
    use crate::syntax::parse;

    #[test]
    fn identity_is_a_bisimulation() {
        let mut m = RelationalModel::new(2);
        m.add_edge("a", 0, 1).unwrap();
        m.set_prop("p", 1).unwrap();
        assert!(bisimilar(&m, 0, &m, 0).unwrap());
        assert!(!bisimilar(&m, 0, &m, 1).unwrap());
    }

    #[test]
    fn unraveled_strings_are_bisimilar_to_their_last_atom() {
        let e = parse("<a*>p;[b]q", &["p", "q"]).unwrap();
        let c = build_canonical(&gamma_for([&e]).unwrap()).unwrap();
        let (acts, props) = (e.actions(), e.props());
        let u = unravel(&c, 0, 2, &acts, &props).unwrap();
        let (cm, atoms) = generated_submodel(&c, [0], &acts, &props);
        for (k, s) in u.strings.iter().enumerate().take(40) {
            for (j, &g) in atoms.iter().enumerate() {
                let b = bisimilar(&cm, j, &u.model, u.string_state(k)).unwrap();
                assert_eq!(b, g == s.last());
                if b {
                    assert_eq!(satisfies(&cm, j, &e).unwrap(), satisfies(&u.model, u.string_state(k), &e).unwrap());
                }
            }
        }
    }

    #[test]
    fn cay_pairs() {
        let a = Expr::act("a");
        let c = build_canonical(&gamma_for([&a]).unwrap()).unwrap();
        assert!(cay(&[], 3, &c).is_empty());
        let g = GuardedString::atom(c.universe().clone(), 0).unwrap();
        assert_eq!(cay(core::slice::from_ref(&g), 1, &c), alloc::vec![(g.clone(), g)]);
    }

    #[test]
    fn countermodel_for_action_versus_zero() {
        let a = Expr::act("a");
        let z = Expr::zero();
        let c = build_canonical(&gamma_for([&a, &z]).unwrap()).unwrap();
        let w = GuardedString::new(c.universe().clone(), alloc::vec![0, 0], alloc::vec![Symbol::new("a", 0)]).unwrap();
        let cm = export_countermodel(&c, &w, &a, &z).unwrap();
        assert_eq!(cm.construction, Construction::Path);
        assert!(evaluate(&a, &cm.model).unwrap().contains(cm.point.0, cm.point.1));
    }

    #[test]
    fn path_alone_separates_when_tests_stay_on_it() {
        let e = parse::<&str>("a;a", &[]).unwrap();
        let f = parse::<&str>("a", &[]).unwrap();
        let c = build_canonical(&gamma_for([&e, &f]).unwrap()).unwrap();
        let a = Symbol::new("a", 0);
        let w = GuardedString::new(c.universe().clone(), alloc::vec![0, 0, 0], alloc::vec![a.clone(), a]).unwrap();
        let cm = export_countermodel(&c, &w, &e, &f).unwrap();
        assert_eq!(cm.construction, Construction::Path);
        assert_eq!(cm.model.len(), 3);
    }

    #[test]
    fn submodel_is_used_when_a_test_looks_off_the_path() {
        // The witness is the single atom where dom(a) holds; the path alone
        // has no a-step, so the canonical model is needed.
        let e = parse::<&str>("dom(a)", &[]).unwrap();
        let f = Expr::zero();
        let c = build_canonical(&gamma_for([&e, &f]).unwrap()).unwrap();
        let g = (0..c.len()).find(|&g| c.entails(g, &e).unwrap()).unwrap();
        let w = GuardedString::atom(c.universe().clone(), g).unwrap();
        let cm = export_countermodel(&c, &w, &e, &f).unwrap();
        assert_eq!(cm.construction, Construction::Submodel);
    }

    #[test]
    fn unraveling_separates_when_pairs_collapse() {
        // The test on the middle state needs a b-successor off the path,
        // and in C some other middle state satisfies both sides.
        let e = parse::<&str>("a;dom(b);a", &[]).unwrap();
        let f = parse::<&str>("a;dom(b);dom(c);a", &[]).unwrap();
        let c = build_canonical(&gamma_for([&e, &f]).unwrap()).unwrap();
        let d = decide_with_c(&c, &e, &f);
        let cm = export_countermodel(&c, &d, &e, &f).unwrap();
        assert_eq!(cm.construction, Construction::Unraveled);
        assert!(separates(&cm.model, cm.point.0, cm.point.1, &e, &f).unwrap());
    }

    fn decide_with_c(c: &CanonicalModel, e: &Expr, f: &Expr) -> GuardedString {
        let a = crate::guarded::canonical_interpret(e, c).unwrap();
        let b = crate::guarded::canonical_interpret(f, c).unwrap();
        match crate::guarded::language_equal(&a, &b).unwrap() {
            crate::guarded::LanguageComparison::Witness(w) => w,
            _ => panic!("expected a difference"),
        }
    }
}
