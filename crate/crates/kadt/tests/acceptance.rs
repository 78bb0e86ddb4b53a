//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always shown.
//! Exits non-zero when any criterion fails.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use kadt::fuzz::{self, FuzzConfig, Violation};
use kadt::gen::{law_pool, symbols, Generator, Shape};
use kadt::lawsuite;
use kadt_core::canonical::{build_canonical_with, AtomUniverse, BuildOptions};
use kadt_core::guarded::{language_equal, standard_interpret, LanguageComparison};
use kadt_core::laws::{corpus, instantiate};
use kadt_core::relational::{
    bisimulation, brute_oracle, enumerate_models, Construction, extension, generated_submodel, unravel, OracleBudget,
};
use kadt_core::syntax::{classify, embed_aka};
use kadt_core::{
    build_canonical, decide, decide_with, evaluate, gamma_for, parse, sat, satisfies, DecideOptions, Error, Expr,
    FragmentId, ParameterSet, Symbol,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn law_corpus() -> Outcome {
    const LIMIT: Duration = Duration::from_secs(300);
    let pool = law_pool(200, 1);
    let r = lawsuite::run(&pool, &DecideOptions::default());
    let axioms: BTreeSet<&str> = r
        .tallies
        .iter()
        .filter(|t| t.law.source == kadt_core::laws::Source::Axiom)
        .map(|t| t.law.name.trim_end_matches(['a', 'b']))
        .collect();
    let derived: BTreeSet<&str> = r
        .tallies
        .iter()
        .filter(|t| t.law.source == kadt_core::laws::Source::Derived)
        .map(|t| t.law.name.trim_end_matches(['a', 'b']))
        .collect();
    let failing: Vec<String> = r
        .tallies
        .iter()
        .filter(|t| !t.passed())
        .map(|t| format!("{}: {:?} {:?}", t.law.name, t.failures.first(), t.errors.first()))
        .collect();
    let vacuous: usize = r.tallies.iter().map(|t| t.vacuous).sum();
    let pass = failing.is_empty()
        && pool.len() >= 100
        && axioms.len() == 16
        && derived.len() == 18
        && r.elapsed < LIMIT;
    outcome(
        pass,
        format!(
            "{} axioms + {} derived laws, {} substitutions, {} instances ({} vacuous conditionals), {:.1?} (limit {:?}){}",
            axioms.len(),
            derived.len(),
            pool.len(),
            r.instances,
            vacuous,
            r.elapsed,
            LIMIT,
            if failing.is_empty() { String::new() } else { format!("; failing: {failing:?}") }
        ),
    )
}

fn soundness_and_witnesses() -> (Outcome, Outcome) {
    let cfg = FuzzConfig {
        count: 500,
        max_size: 8,
        seed: 2024,
        models: 100,
        max_states: 4,
        oracle: Some(OracleBudget::default()),
        ..FuzzConfig::default()
    };
    let start = Instant::now();
    let r = fuzz::run(&cfg, Shape::Full);
    let elapsed = start.elapsed();
    let is_soundness = |v: &Violation| matches!(v, Violation::Unsound { .. } | Violation::Oracle | Violation::Error(_));
    let is_witness = |v: &Violation| matches!(v, Violation::Witness | Violation::Side | Violation::Countermodel);
    let show = |pred: &dyn Fn(&Violation) -> bool| -> Vec<String> {
        r.failures()
            .filter(|c| c.violations.iter().any(pred))
            .take(3)
            .map(|c| format!("seed {}: {} vs {} {:?}", c.seed, c.left, c.right, c.violations))
            .collect()
    };
    let sound_bad = show(&is_soundness);
    let wit_bad = show(&is_witness);
    let decided = r.equivalent() + r.nonequivalent();
    let c2 = outcome(
        sound_bad.is_empty() && r.equivalent() > 0 && decided == cfg.count,
        format!(
            "{} pairs (size <= 8, seed {}), {} equivalent, each checked in {} random models with <= {} states, {:.1?}{}",
            cfg.count,
            cfg.seed,
            r.equivalent(),
            cfg.models,
            cfg.max_states,
            elapsed,
            if sound_bad.is_empty() { String::new() } else { format!("; violations: {sound_bad:?}") }
        ),
    );
    let c3 = outcome(
        wit_bad.is_empty() && r.nonequivalent() > 0,
        format!(
            "{} of {} nonequivalences validated by membership and countermodel (countermodels: {} path, {} submodel, {} unraveled){}",
            r.nonequivalent() - r.cases.iter().filter(|c| c.violations.iter().any(is_witness)).count(),
            r.nonequivalent(),
            r.built_by(Construction::Path),
            r.built_by(Construction::Submodel),
            r.built_by(Construction::Unraveled),
            if wit_bad.is_empty() { String::new() } else { format!("; violations: {wit_bad:?}") }
        ),
    );
    (c2, c3)
}

/// Every expression with at most `max` nodes over the given leaves.
fn all_exprs(max: usize, leaves: &[Expr]) -> Vec<Expr> {
    let mut by_size: Vec<Vec<Expr>> = vec![Vec::new(), leaves.to_vec()];
    for n in 2..=max {
        let mut v = Vec::new();
        for b in &by_size[n - 1] {
            v.push(Expr::star(b.clone()));
            v.push(Expr::dom(b.clone()));
            v.push(Expr::anti(b.clone()));
        }
        for k in 1..n - 1 {
            for l in &by_size[k] {
                for r in &by_size[n - 1 - k] {
                    v.push(Expr::sum(l.clone(), r.clone()));
                    v.push(Expr::prod(l.clone(), r.clone()));
                }
            }
        }
        by_size.push(v);
    }
    by_size.concat()
}

fn exhaustive() -> Outcome {
    const LIMIT: Duration = Duration::from_secs(30 * 60);
    let start = Instant::now();
    let a = Expr::act_sym(symbols(&["a"])[0].clone());
    let p = Expr::prop_sym(symbols(&["p"])[0].clone());
    let exprs = all_exprs(4, &[a, p, Expr::zero(), Expr::one()]);
    let budget = OracleBudget::default();
    let models = enumerate_models(&["a".into()], &["p".into()], &budget).expect("within budget");
    // The oracle's verdict on a pair is whether the two fingerprints differ.
    let prints: Vec<Vec<Vec<(usize, usize)>>> = exprs
        .iter()
        .map(|e| models.iter().map(|m| evaluate(e, m).expect("covered").pairs().collect()).collect())
        .collect();
    let mut stats = [0usize; 3];
    let mut bad = Vec::new();
    let mut spot = (0usize, 0usize);
    let mut k = 0usize;
    for i in 0..exprs.len() {
        for j in i + 1..exprs.len() {
            k += 1;
            let distinguished = prints[i] != prints[j];
            if k.is_multiple_of(2003) {
                spot.0 += 1;
                let o = brute_oracle(&exprs[i], &exprs[j], &budget).expect("within budget");
                if o.is_same() == distinguished {
                    spot.1 += 1;
                }
            }
            let eq = match decide(&exprs[i], &exprs[j]) {
                Ok(d) => d.verdict.is_equivalent(),
                Err(e) => {
                    bad.push(format!("{} vs {}: {e}", exprs[i], exprs[j]));
                    continue;
                }
            };
            match (distinguished, eq) {
                (true, false) => stats[0] += 1,
                (false, true) => stats[1] += 1,
                (false, false) => stats[2] += 1,
                (true, true) => bad.push(format!("{} vs {}", exprs[i], exprs[j])),
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && spot.1 == 0 && elapsed < LIMIT,
        format!(
            "{} expressions, {} pairs, {} models: {} distinguished and nonequivalent, {} equivalent, {} nonequivalent beyond 2 states, {} disagreements, oracle spot checks {}/{} consistent, {:.1?}{}",
            exprs.len(),
            k,
            models.len(),
            stats[0],
            stats[1],
            stats[2],
            bad.len(),
            spot.0 - spot.1,
            spot.0,
            elapsed,
            if bad.is_empty() { String::new() } else { format!("; e.g. {:?}", &bad[..bad.len().min(3)]) }
        ),
    )
}

fn pdl_sanity() -> Outcome {
    let p = |s: &str| parse(s, &["p"]).expect("parses");
    let mut notes = Vec::new();
    let mut pass = true;
    for (l, r) in [("<a>p;[a]!p", "0"), ("<a*>p", "p + <a><a*>p")] {
        let ok = decide(&p(l), &p(r)).map(|d| d.verdict.is_equivalent()).unwrap_or(false);
        pass &= ok;
        notes.push(format!("{l} == {r}: {ok}"));
    }
    let phi = p("<a*>p");
    let ok = match sat(&phi) {
        Ok(Some(w)) => satisfies(&w.model, w.state, &phi).unwrap_or(false),
        _ => false,
    };
    pass &= ok;
    notes.push(format!("sat(<a*>p) model checks: {ok}"));
    outcome(pass, notes.join(", "))
}

fn kat_compat() -> Outcome {
    let mut agree = 0;
    let mut eqs = 0;
    let mut bad = Vec::new();
    let props = symbols(&["p", "q"]);
    let gamma = ParameterSet::new(props.iter().map(|s| Expr::prop_sym(s.clone()))).expect("parameters");
    let universe = Arc::new(AtomUniverse::full(gamma, 1 << 16).expect("small"));
    for i in 0..200 {
        let mut g = Generator::new(fuzz::case_seed(66, i), &["a", "b"], &["p", "q"], Shape::Kat);
        let (e, f) = g.pair(8);
        let kat = |x: &Expr| classify(x).contains(&FragmentId::Kat);
        if !kat(&e) || !kat(&f) {
            bad.push(format!("not KAT: {e} / {f}"));
            continue;
        }
        let ours = decide(&e, &f).map(|d| d.verdict.is_equivalent());
        let theirs = standard_interpret(&e, &universe)
            .and_then(|a| Ok((a, standard_interpret(&f, &universe)?)))
            .and_then(|(a, b)| language_equal(&a, &b))
            .map(|c| matches!(c, LanguageComparison::Equal));
        match (ours, theirs) {
            (Ok(x), Ok(y)) if x == y => {
                agree += 1;
                eqs += x as usize;
            }
            (x, y) => bad.push(format!("{e} vs {f}: {x:?} / {y:?}")),
        }
    }
    outcome(
        bad.is_empty() && agree == 200,
        format!("{agree}/200 pairs agree with guarded-language equality over {{p, q}}-atoms ({eqs} equivalent){}", fmt_bad(&bad)),
    )
}

fn fmt_bad(bad: &[String]) -> String {
    if bad.is_empty() {
        String::new()
    } else {
        format!("; e.g. {:?}", &bad[..bad.len().min(3)])
    }
}

fn embedding() -> Outcome {
    let mut agree = 0;
    let mut eqs = 0;
    let mut bad = Vec::new();
    for i in 0..200 {
        let mut g = Generator::new(fuzz::case_seed(77, i), &["a", "b"], &["p"], Shape::Full);
        let (e, f) = g.pair(7);
        let (e2, f2) = (embed_aka(&e), embed_aka(&f));
        let aka = |x: &Expr| classify(x).contains(&FragmentId::AKa);
        if !aka(&e2) || !aka(&f2) {
            bad.push(format!("not aKA: {e2} / {f2}"));
            continue;
        }
        match (decide(&e, &f), decide(&e2, &f2)) {
            (Ok(x), Ok(y)) if x.verdict.is_equivalent() == y.verdict.is_equivalent() => {
                agree += 1;
                eqs += x.verdict.is_equivalent() as usize;
            }
            (x, y) => bad.push(format!(
                "{e} vs {f}: {:?} / {:?}",
                x.map(|d| d.verdict.is_equivalent()),
                y.map(|d| d.verdict.is_equivalent())
            )),
        }
    }
    outcome(
        bad.is_empty() && agree == 200,
        format!("{agree}/200 verdicts invariant under the embedding, all images aKA ({eqs} equivalent){}", fmt_bad(&bad)),
    )
}

/// The `count` distinct Γ of law instances with the largest canonical
/// models, ignoring those above `max_atoms`.
fn corpus_gammas(count: usize, max_atoms: usize) -> Vec<(Expr, Expr)> {
    let pool = law_pool(100, 5);
    let mut seen = HashSet::new();
    let mut found: Vec<(usize, String, Expr, Expr)> = Vec::new();
    for sub in &pool {
        for law in corpus() {
            let c = &law.conclusion;
            let (Ok(l), Ok(r)) = (instantiate(c.left, sub), instantiate(c.right, sub)) else { continue };
            let Ok(g) = gamma_for([&l, &r]) else { continue };
            let key: Vec<String> = (0..g.len()).map(|i| g.name(i).to_string()).collect();
            if !seen.insert(key.clone()) {
                continue;
            }
            let Ok(cm) = build_canonical(&g) else { continue };
            if cm.len() <= max_atoms {
                found.push((cm.len(), key.join(","), l, r));
            }
        }
    }
    found.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    found.into_iter().take(count).map(|(_, _, l, r)| (l, r)).collect()
}

fn bisimulation_invariance() -> Outcome {
    let mut checked_pairs = 0usize;
    let mut atoms_total = 0usize;
    let mut formulas = 0usize;
    let mut bad = Vec::new();
    let cases = corpus_gammas(50, 48);
    for (l, r) in &cases {
        let gamma = gamma_for([l, r]).expect("closes");
        let c = build_canonical(&gamma).expect("builds");
        atoms_total += c.len();
        let actions: BTreeSet<Symbol> = l.actions().into_iter().chain(r.actions()).collect();
        let props: BTreeSet<Symbol> = l.props().into_iter().chain(r.props()).collect();
        let params: Vec<Expr> = gamma.iter().cloned().collect();
        let roots: BTreeSet<usize> = (0..4).map(|k| k * c.len() / 4).collect();
        for root in roots {
            let (m, atoms) = generated_submodel(&c, [root], &actions, &props);
            let u = match unravel(&c, root, 3, &actions, &props) {
                Ok(u) => u,
                Err(e) => {
                    bad.push(format!("{l} / {r}: {e}"));
                    continue;
                }
            };
            let rel = bisimulation(&m, &u.model).expect("same vocabulary");
            for (k, s) in u.strings.iter().enumerate() {
                let x = atoms.binary_search(&s.last()).expect("generated");
                if !rel[x].contains(u.string_state(k)) {
                    bad.push(format!("{l} / {r}: string {k} not bisimilar to its last atom"));
                }
            }
            let exts: Vec<_> = params
                .iter()
                .map(|phi| (extension(phi, &m).expect("covered"), extension(phi, &u.model).expect("covered")))
                .collect();
            formulas += params.len();
            for (x, row) in rel.iter().enumerate() {
                for y in row.ones() {
                    checked_pairs += 1;
                    for (phi, (em, eu)) in params.iter().zip(&exts) {
                        if em.contains(x) != eu.contains(y) {
                            bad.push(format!("{l} / {r}: {phi} differs at {x} ~ {y}"));
                        }
                    }
                }
            }
        }
    }
    outcome(
        bad.is_empty() && cases.len() == 50 && checked_pairs > 0,
        format!(
            "{} closures ({} canonical atoms), {} bisimilar pairs checked against {} formula instances, {} disagreements{}",
            cases.len(),
            atoms_total,
            checked_pairs,
            formulas,
            bad.len(),
            fmt_bad(&bad)
        ),
    )
}

fn performance() -> Outcome {
    const LIMIT: Duration = Duration::from_secs(60);
    let mut by_gamma: HashMap<usize, usize> = HashMap::new();
    let mut worst = (Duration::ZERO, String::new(), 0usize);
    let mut errors = Vec::new();
    let mut seed = 0u64;
    let mut taken = 0;
    while taken < 150 && seed < 20_000 {
        seed += 1;
        let mut g = Generator::new(seed, &["a", "b", "c"], &["p", "q", "r"], Shape::Full);
        let e = g.expr_upto(12);
        let f = g.expr_upto(12);
        let Ok(gamma) = gamma_for([&e, &f]) else { continue };
        if gamma.len() > 12 || gamma.len() < 9 {
            continue;
        }
        taken += 1;
        *by_gamma.entry(gamma.len()).or_default() += 1;
        let start = Instant::now();
        let r = decide(&e, &f);
        let t = start.elapsed();
        if let Err(err) = r {
            errors.push(format!("{e} vs {f}: {err}"));
        }
        if t > worst.0 {
            worst = (t, format!("{e} vs {f}"), gamma.len());
        }
    }
    // Queries beyond the budget must be refused quickly with a diagnostic.
    let many: Vec<String> = (0..20).map(|i| format!("p{i}")).collect();
    let wide = parse(&many.join(" + "), &many).expect("parses");
    let start = Instant::now();
    let over = decide(&wide, &Expr::one());
    let over_t = start.elapsed();
    let over_ok = matches!(over, Err(Error::Budget { .. })) && over_t < Duration::from_secs(2);
    let small = DecideOptions { build: BuildOptions { max_atoms: 8 }, ..DecideOptions::default() };
    let narrow = parse("p0 + p1 + p2 + p3 + p4", &many).expect("parses");
    let capped = matches!(decide_with(&narrow, &Expr::one(), &small), Err(Error::Budget { .. }));
    let out = Command::new(env!("CARGO_BIN_EXE_kadt"))
        .args(["decide", "--props", "p,q,r,s", "--max-atoms", "4", "p + q + r + s", "1"])
        .output()
        .expect("runs the binary");
    let stderr = String::from_utf8_lossy(&out.stderr);
    let cli_ok = out.status.code() == Some(2) && stderr.contains("budget");
    // A wide but legal query: 12 propositions, 4096 atoms.
    let twelve = &many[..12];
    let big_l = parse(&format!("a;({});b", twelve.join(" + ")), twelve).expect("parses");
    let big_r = parse(&format!("a;({});b", twelve[..11].join(" + ")), twelve).expect("parses");
    let start = Instant::now();
    let big = decide(&big_l, &big_r);
    let big_t = start.elapsed();
    let big_ok = big_t < LIMIT
        && match &big {
            Ok(d) => match &d.verdict {
                kadt_core::Verdict::Nonequivalent(cx) => {
                    let (x, y) = cx.point;
                    d.canonical.len() == 4096
                        && evaluate(&big_l, &cx.model).expect("evaluates").contains(x, y)
                            != evaluate(&big_r, &cx.model).expect("evaluates").contains(x, y)
                }
                _ => false,
            },
            Err(_) => false,
        };
    let within = build_canonical_with(&gamma_for([&narrow]).expect("closes"), &BuildOptions::default()).is_ok();
    let mut hist: Vec<_> = by_gamma.into_iter().collect();
    hist.sort();
    outcome(
        errors.is_empty() && worst.0 < LIMIT && taken == 150 && over_ok && capped && cli_ok && within && big_ok,
        format!(
            "{taken} queries with 9 <= |Γ| <= 12 {hist:?} (|Γ|, count), slowest {:.1?} at |Γ| = {} (limit {LIMIT:?}); 4096-atom nonequivalence with countermodel in {big_t:.1?}: {big_ok}; 20-proposition query refused in {over_t:.1?}: {over_ok}; --max-atoms 4 via CLI exits 2 with diagnostic: {cli_ok}{}",
            worst.0,
            worst.2,
            fmt_bad(&errors)
        ),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    results.push((1, "law corpus", law_corpus()));
    let (c2, c3) = soundness_and_witnesses();
    results.push((2, "relational soundness", c2));
    results.push((3, "witness validity", c3));
    results.push((4, "exhaustive completeness", exhaustive()));
    results.push((5, "PDL sanity", pdl_sanity()));
    results.push((6, "KAT compatibility", kat_compat()));
    results.push((7, "aKA embedding", embedding()));
    results.push((8, "bisimulation", bisimulation_invariance()));
    results.push((9, "performance envelope", performance()));
    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (n, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        failed += !o.pass as usize;
        println!("criterion {n} ({name}): {tag} - {}", o.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
