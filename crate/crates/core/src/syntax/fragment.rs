use alloc::collections::BTreeSet;
use core::fmt;

use super::{Expr, ExprKind};

/// The syntactic fragments of the expression language.
///
/// `KaPhi` and `KatPhi` are relative to a parameter set Φ that always
/// contains the propositions; [`classify`] takes Φ to be just the
/// propositions, [`classify_with`] lets the caller extend it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FragmentId {
    Ka,
    KaPhi,
    DKa,
    AKa,
    Kat,
    KatPhi,
    DKat,
    AKat,
}

impl FragmentId {
    pub const ALL: [FragmentId; 8] = [
        FragmentId::Ka,
        FragmentId::KaPhi,
        FragmentId::DKa,
        FragmentId::AKa,
        FragmentId::Kat,
        FragmentId::KatPhi,
        FragmentId::DKat,
        FragmentId::AKat,
    ];

    /// Inclusions between fragments, smaller first.
    pub const EDGES: [(FragmentId, FragmentId); 11] = [
        (FragmentId::Ka, FragmentId::Kat),
        (FragmentId::Kat, FragmentId::DKat),
        (FragmentId::DKat, FragmentId::AKat),
        (FragmentId::Ka, FragmentId::DKa),
        (FragmentId::DKa, FragmentId::DKat),
        (FragmentId::DKa, FragmentId::AKa),
        (FragmentId::AKa, FragmentId::AKat),
        (FragmentId::Kat, FragmentId::KatPhi),
        (FragmentId::Ka, FragmentId::KaPhi),
        (FragmentId::KatPhi, FragmentId::AKat),
        (FragmentId::KaPhi, FragmentId::KatPhi),
    ];

    pub fn name(self) -> &'static str {
        match self {
            FragmentId::Ka => "KA",
            FragmentId::KaPhi => "KA_Phi",
            FragmentId::DKa => "dKA",
            FragmentId::AKa => "aKA",
            FragmentId::Kat => "KAT",
            FragmentId::KatPhi => "KAT_Phi",
            FragmentId::DKat => "dKAT",
            FragmentId::AKat => "aKAT",
        }
    }
}

impl fmt::Display for FragmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn in_phi(e: &Expr, phi: &BTreeSet<Expr>) -> bool {
    matches!(e.kind(), ExprKind::Prop(_)) || (e.is_parameter() && phi.contains(e))
}

/// Membership of `e` in fragment `k`, with Φ = propositions ∪ `phi`.
pub fn in_fragment(e: &Expr, k: FragmentId, phi: &BTreeSet<Expr>) -> bool {
    use FragmentId::*;
    if matches!(k, KaPhi | KatPhi) && in_phi(e, phi) {
        return true;
    }
    match e.kind() {
        ExprKind::Act(_) | ExprKind::Zero | ExprKind::One => true,
        ExprKind::Prop(_) => !matches!(k, Ka | DKa | AKa),
        ExprKind::Sum(l, r) | ExprKind::Prod(l, r) => in_fragment(l, k, phi) && in_fragment(r, k, phi),
        ExprKind::Star(b) => in_fragment(b, k, phi),
        ExprKind::Dom(b) => matches!(k, DKa | AKa | DKat | AKat) && in_fragment(b, k, phi),
        ExprKind::Anti(b) => match k {
            Ka | KaPhi | DKa => false,
            Kat | DKat => matches!(b.kind(), ExprKind::Prop(_)),
            KatPhi => in_phi(b, phi),
            AKa | AKat => in_fragment(b, k, phi),
        },
    }
}

/// All fragments containing `e`, taking Φ to be the propositions.
pub fn classify(e: &Expr) -> BTreeSet<FragmentId> {
    classify_with(e, &BTreeSet::new())
}

/// All fragments containing `e`, with Φ extended by `phi`.
pub fn classify_with(e: &Expr, phi: &BTreeSet<Expr>) -> BTreeSet<FragmentId> {
    FragmentId::ALL.into_iter().filter(|&k| in_fragment(e, k, phi)).collect()
}

/// Removes propositions: action `a_n` becomes `a_2n` and proposition `p_n`
/// becomes `dom(a_2n+1)`, where the fresh action reuses the proposition's
/// name.
pub fn embed_aka(e: &Expr) -> Expr {
    e.map_leaves(&mut |x| match x.kind() {
        ExprKind::Act(s) => Some(Expr::act_sym(s.with_index(2 * s.index()))),
        ExprKind::Prop(s) => Some(Expr::dom(Expr::act_sym(s.with_index(2 * s.index() + 1)))),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Symbol;
    use alloc::vec::Vec;
    use FragmentId::*;

    fn set(ks: &[FragmentId]) -> BTreeSet<FragmentId> {
        ks.iter().copied().collect()
    }

    #[test]
    fn action_is_everywhere() {
        assert_eq!(classify(&Expr::act("a")), set(&FragmentId::ALL));
    }

    #[test]
    fn domain_of_action() {
        assert_eq!(classify(&Expr::dom(Expr::act("a"))), set(&[DKa, AKa, DKat, AKat]));
    }

    #[test]
    fn negated_prop() {
        assert_eq!(classify(&Expr::anti(Expr::prop("p"))), set(&[Kat, KatPhi, DKat, AKat]));
    }

    #[test]
    fn explicit_phi_admits_tests() {
        let t = Expr::dom(Expr::act("a"));
        let phi: BTreeSet<Expr> = [t.clone()].into_iter().collect();
        let e = Expr::prod(Expr::anti(t.clone()), Expr::act("b"));
        let ks = classify_with(&e, &phi);
        assert!(ks.contains(&KatPhi) && !ks.contains(&KaPhi) && ks.contains(&AKat));
        assert!(classify_with(&t, &phi).contains(&KaPhi));
    }

    #[test]
    fn embedding_renumbers() {
        let a1 = Expr::act_sym(Symbol::new("a", 1));
        match embed_aka(&a1).kind() {
            ExprKind::Act(s) => assert_eq!(s.index(), 2),
            other => panic!("{other:?}"),
        }
        let p0 = Expr::prop_sym(Symbol::new("p", 0));
        match embed_aka(&p0).kind() {
            ExprKind::Dom(b) => match b.kind() {
                ExprKind::Act(s) => assert_eq!(s.index(), 1),
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
        assert_eq!(embed_aka(&Expr::zero()), Expr::zero());
    }

    #[test]
    fn embedding_lands_in_aka() {
        let e = Expr::sum(Expr::anti(Expr::prop("p")), Expr::star(Expr::act("a")));
        let out = embed_aka(&e);
        assert!(out.props().is_empty());
        assert!(classify(&out).contains(&AKa));
        let names: Vec<_> = out.actions().into_iter().map(|s| s.name().into()).collect::<Vec<alloc::string::String>>();
        assert_eq!(names, ["a", "p"]);
    }
}
