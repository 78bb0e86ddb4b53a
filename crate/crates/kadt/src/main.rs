use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kadt::fuzz::{self, FuzzConfig};
use kadt::gen::{law_pool, Shape};
use kadt::report::DecisionJson;
use kadt::{lawsuite, CliError, ModelFile, Result};
use kadt_core::canonical::{build_canonical_with, sat_with, BuildOptions};
use kadt_core::relational::{Construction, OracleBudget};
use kadt_core::syntax::{classify, embed_aka};
use kadt_core::{decide_leq_with, decide_with, evaluate, gamma_for, DecideOptions, Expr, Verdict, Vocabulary};

/// Decide equivalence of regular expressions with domain and antidomain.
#[derive(Parser)]
#[command(name = "kadt", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Propositions, comma separated; every other identifier is an action.
    #[arg(long, value_delimiter = ',')]
    props: Vec<String>,
    /// Give up when the canonical model needs more candidate atoms.
    #[arg(long, default_value_t = 1 << 16)]
    max_atoms: usize,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decide `e ≡ f` (or `e ≤ f` with --leq).
    Decide {
        left: String,
        right: String,
        #[arg(long)]
        leq: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Satisfiability of a formula, with a model when satisfiable.
    Sat {
        formula: String,
        #[command(flatten)]
        common: Common,
    },
    /// The atoms of the canonical model for the given expressions.
    Atoms {
        #[arg(required = true)]
        exprs: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// The closure Γ of the given expressions, one parameter per line.
    Closure {
        #[arg(required = true)]
        exprs: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// The relation denoted by an expression in a model file.
    Eval {
        expr: String,
        #[arg(long)]
        model: String,
        #[command(flatten)]
        common: Common,
    },
    /// The fragments an expression belongs to.
    Fragment {
        expr: String,
        #[command(flatten)]
        common: Common,
    },
    /// The proposition-free expression obtained by the embedding.
    Embed {
        expr: String,
        #[command(flatten)]
        common: Common,
    },
    /// Random differential testing.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Random models per equivalent pair.
        #[arg(long, default_value_t = 100)]
        models: usize,
        /// Also compare with exhaustive search over models of up to 2 states.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 1 << 16)]
        max_atoms: usize,
    },
    /// Check the law corpus over random substitutions.
    Laws {
        #[arg(long, default_value_t = 120)]
        pool: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1 << 16)]
        max_atoms: usize,
    },
}

fn options(max_atoms: usize) -> DecideOptions {
    DecideOptions { build: BuildOptions { max_atoms }, ..DecideOptions::default() }
}

fn parse_all(props: &[String], texts: &[&str]) -> Result<Vec<Expr>> {
    let mut v = Vocabulary::with_props(props)?;
    texts.iter().map(|t| v.parse(t).map_err(CliError::from)).collect()
}

fn json<T: serde::Serialize>(out: &mut impl Write, v: &T) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn run(cmd: Command, out: &mut impl Write) -> Result<u8> {
    match cmd {
        Command::Decide { left, right, leq, common } => {
            let es = parse_all(&common.props, &[&left, &right])?;
            let opts = options(common.max_atoms);
            let d = if leq { decide_leq_with(&es[0], &es[1], &opts)? } else { decide_with(&es[0], &es[1], &opts)? };
            if common.json {
                json(out, &DecisionJson::new(&d, leq))?;
            } else {
                match &d.verdict {
                    Verdict::Equivalent => writeln!(out, "equivalent")?,
                    Verdict::Nonequivalent(cx) => {
                        let m = &cx.model;
                        writeln!(out, "nonequivalent")?;
                        writeln!(out, "witness: {}", cx.witness)?;
                        writeln!(out, "accepted by: {:?}", cx.side)?;
                        writeln!(out, "separating pair: ({}, {})", m.state_name(cx.point.0), m.state_name(cx.point.1))?;
                        writeln!(out, "countermodel:")?;
                        writeln!(out, "{}", serde_json::to_string(&ModelFile::from_model(m))?)?;
                    }
                }
            }
            Ok(if d.verdict.is_equivalent() { 0 } else { 1 })
        }
        Command::Sat { formula, common } => {
            let phi = parse_all(&common.props, &[&formula])?.remove(0);
            match sat_with(&phi, &BuildOptions { max_atoms: common.max_atoms })? {
                Some(w) => {
                    let mf = ModelFile::from_model(&w.model);
                    if common.json {
                        json(out, &serde_json::json!({"sat": true, "state": w.model.state_name(w.state), "model": mf}))?;
                    } else {
                        writeln!(out, "SAT at {}", w.model.state_name(w.state))?;
                        writeln!(out, "{}", serde_json::to_string_pretty(&mf)?)?;
                    }
                    Ok(0)
                }
                None => {
                    if common.json {
                        json(out, &serde_json::json!({"sat": false}))?;
                    } else {
                        writeln!(out, "UNSAT")?;
                    }
                    Ok(1)
                }
            }
        }
        Command::Atoms { exprs, common } => {
            let texts: Vec<&str> = exprs.iter().map(String::as_str).collect();
            let es = parse_all(&common.props, &texts)?;
            let c = build_canonical_with(&gamma_for(&es)?, &BuildOptions { max_atoms: common.max_atoms })?;
            let atoms: Vec<String> = (0..c.len()).map(|g| c.universe().format(g)).collect();
            if common.json {
                json(out, &atoms)?;
            } else {
                for a in atoms {
                    writeln!(out, "{a}")?;
                }
            }
            Ok(0)
        }
        Command::Closure { exprs, common } => {
            let texts: Vec<&str> = exprs.iter().map(String::as_str).collect();
            let es = parse_all(&common.props, &texts)?;
            let g = gamma_for(&es)?;
            let names: Vec<&str> = (0..g.len()).map(|i| g.name(i)).collect();
            if common.json {
                json(out, &names)?;
            } else {
                for n in names {
                    writeln!(out, "{n}")?;
                }
            }
            Ok(0)
        }
        Command::Eval { expr, model, common } => {
            let m = ModelFile::load(&model)?;
            let mut props = common.props.clone();
            props.extend(m.props().map(|(p, _)| p.to_string()));
            let e = parse_all(&props, &[&expr])?.remove(0);
            let r = evaluate(&e, &m)?;
            let pairs: Vec<(&str, &str)> = r.pairs().map(|(x, y)| (m.state_name(x), m.state_name(y))).collect();
            if common.json {
                json(out, &pairs)?;
            } else {
                for (x, y) in pairs {
                    writeln!(out, "{x} {y}")?;
                }
            }
            Ok(0)
        }
        Command::Fragment { expr, common } => {
            let e = parse_all(&common.props, &[&expr])?.remove(0);
            let names: Vec<&str> = classify(&e).into_iter().map(|k| k.name()).collect();
            if common.json {
                json(out, &names)?;
            } else {
                writeln!(out, "{}", names.join(" "))?;
            }
            Ok(0)
        }
        Command::Embed { expr, common } => {
            let e = parse_all(&common.props, &[&expr])?.remove(0);
            let embedded = embed_aka(&e);
            if common.json {
                json(out, &embedded.to_string())?;
            } else {
                writeln!(out, "{embedded}")?;
            }
            Ok(0)
        }
        Command::Fuzz { count, max_size, seed, models, oracle, max_atoms } => {
            let cfg = FuzzConfig {
                count,
                max_size,
                seed,
                models,
                oracle: oracle.then(OracleBudget::default),
                options: options(max_atoms),
                ..FuzzConfig::default()
            };
            let r = fuzz::run(&cfg, Shape::Full);
            writeln!(
                out,
                "seed {seed}: {count} pairs, {} equivalent, {} nonequivalent (countermodels: {} path, {} submodel, {} unraveled)",
                r.equivalent(),
                r.nonequivalent(),
                r.built_by(Construction::Path),
                r.built_by(Construction::Submodel),
                r.built_by(Construction::Unraveled)
            )?;
            let mut bad = 0;
            for c in r.failures() {
                bad += 1;
                writeln!(out, "FAIL case seed {}: {} vs {}: {:?}", c.seed, c.left, c.right, c.violations)?;
            }
            Ok(if bad == 0 { 0 } else { 1 })
        }
        Command::Laws { pool, seed, max_atoms } => {
            let r = lawsuite::run(&law_pool(pool, seed), &options(max_atoms));
            for t in &r.tallies {
                let status = if t.passed() { "ok" } else { "FAIL" };
                writeln!(out, "law {:>3}: {status} ({} hold, {} vacuous)", t.law.name, t.holds, t.vacuous)?;
                for (i, l, rr) in &t.failures {
                    writeln!(out, "  substitution {i}: {l} vs {rr}")?;
                }
                for (i, e) in &t.errors {
                    writeln!(out, "  substitution {i}: {e}")?;
                }
            }
            writeln!(out, "{} instances in {:.1?}", r.instances, r.elapsed)?;
            Ok(if r.passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    match run(cli.cmd, &mut out).and_then(|c| out.flush().map(|_| c).map_err(CliError::from)) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Stdout(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kadt: {e}");
            ExitCode::from(2)
        }
    }
}
