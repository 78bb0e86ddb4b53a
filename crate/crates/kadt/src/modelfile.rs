//! JSON model files.
//!
//! ```json
//! { "states": 2, "rel": { "a": [[0, 1]] }, "sat": { "p": [1] } }
//! ```
//!
//! `states` is either a count (states are then named `0`, `1`, ...) or a
//! list of names. Pairs and valuations may refer to states by index or by
//! name.

use std::collections::BTreeMap;

use kadt_core::RelationalModel;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum States {
    Count(usize),
    Names(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateRef {
    Index(usize),
    Name(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    pub states: States,
    #[serde(default)]
    pub rel: BTreeMap<String, Vec<(StateRef, StateRef)>>,
    #[serde(default)]
    pub sat: BTreeMap<String, Vec<StateRef>>,
}

fn default_names(m: &RelationalModel) -> bool {
    m.state_names().iter().enumerate().all(|(i, n)| *n == i.to_string())
}

impl ModelFile {
    /// States are written by index when they carry their default names
    /// and by name otherwise.
    pub fn from_model(m: &RelationalModel) -> Self {
        let by_name = !default_names(m);
        let r = |x: usize| if by_name { StateRef::Name(m.state_name(x).to_string()) } else { StateRef::Index(x) };
        let states = if by_name { States::Names(m.state_names().to_vec()) } else { States::Count(m.len()) };
        let rel = m.actions().map(|(a, rel)| (a.to_string(), rel.pairs().map(|(x, y)| (r(x), r(y))).collect())).collect();
        let sat = m.props().map(|(p, set)| (p.to_string(), set.ones().map(r).collect())).collect();
        ModelFile { states, rel, sat }
    }

    pub fn to_model(&self) -> Result<RelationalModel> {
        let mut m = match &self.states {
            States::Count(n) => RelationalModel::new(*n),
            States::Names(names) => {
                let mut seen = std::collections::BTreeSet::new();
                if let Some(d) = names.iter().find(|n| !seen.insert(n.as_str())) {
                    return Err(CliError::Model(format!("state `{d}` is listed twice")));
                }
                RelationalModel::with_names(names.clone())
            }
        };
        let resolve = |m: &RelationalModel, s: &StateRef| -> Result<usize> {
            match s {
                StateRef::Index(i) if *i < m.len() => Ok(*i),
                StateRef::Index(i) => Err(CliError::Model(format!("state {i} is out of range"))),
                StateRef::Name(n) => m.state_index(n).ok_or_else(|| CliError::Model(format!("unknown state `{n}`"))),
            }
        };
        for (a, pairs) in &self.rel {
            if self.sat.contains_key(a) {
                return Err(CliError::Model(format!("`{a}` is both an action and a proposition")));
            }
            m.declare_action(a);
            for (x, y) in pairs {
                let (x, y) = (resolve(&m, x)?, resolve(&m, y)?);
                m.add_edge(a, x, y)?;
            }
        }
        for (p, states) in &self.sat {
            m.declare_prop(p);
            for x in states {
                let x = resolve(&m, x)?;
                m.set_prop(p, x)?;
            }
        }
        Ok(m)
    }

    pub fn parse(text: &str) -> Result<RelationalModel> {
        serde_json::from_str::<ModelFile>(text)?.to_model()
    }

    pub fn load(path: &str) -> Result<RelationalModel> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        Self::parse(&text)
    }
}

/// A random model on `n` states: each pair is an edge of each action with
/// probability `p_edge`, and each proposition holds at each state with
/// probability `p_val`.
pub fn random_model<R: Rng>(
    rng: &mut R,
    n: usize,
    actions: &[String],
    props: &[String],
    p_edge: f64,
    p_val: f64,
) -> RelationalModel {
    let mut m = RelationalModel::new(n);
    for a in actions {
        m.declare_action(a);
        for x in 0..n {
            for y in 0..n {
                if rng.gen_bool(p_edge) {
                    m.add_edge(a, x, y).expect("in range");
                }
            }
        }
    }
    for p in props {
        m.declare_prop(p);
        for x in 0..n {
            if rng.gen_bool(p_val) {
                m.set_prop(p, x).expect("in range");
            }
        }
    }
    m
}
