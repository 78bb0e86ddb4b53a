//! Machine-readable verdicts.

use kadt_core::relational::Construction;
use kadt_core::{Decision, GuardedString, Side, Verdict};
use serde::Serialize;

use crate::modelfile::ModelFile;

#[derive(Clone, Debug, Serialize)]
pub struct WitnessJson {
    /// The witness as printed: atoms and actions separated by spaces.
    pub text: String,
    pub atoms: Vec<String>,
    pub actions: Vec<String>,
}

impl WitnessJson {
    pub fn new(w: &GuardedString) -> Self {
        let u = w.universe();
        WitnessJson {
            text: w.to_string(),
            atoms: w.atoms().iter().map(|&g| u.format(g)).collect(),
            actions: w.actions().iter().map(|a| a.name().to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CountermodelJson {
    pub model: ModelFile,
    pub point: (String, String),
    pub path: Vec<String>,
    /// `path`, `submodel` or `unraveled`.
    pub construction: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecisionJson {
    pub verdict: &'static str,
    pub relation: &'static str,
    pub gamma: usize,
    pub atoms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub countermodel: Option<CountermodelJson>,
}

impl DecisionJson {
    pub fn new(d: &Decision, leq: bool) -> Self {
        let mut out = DecisionJson {
            verdict: "equivalent",
            relation: if leq { "leq" } else { "eq" },
            gamma: d.canonical.gamma().len(),
            atoms: d.canonical.len(),
            side: None,
            witness: None,
            countermodel: None,
        };
        if let Verdict::Nonequivalent(cx) = &d.verdict {
            let name = |x: usize| cx.model.state_name(x).to_string();
            out.verdict = "nonequivalent";
            out.side = Some(match cx.side {
                Side::Left => "left",
                Side::Right => "right",
            });
            out.witness = Some(WitnessJson::new(&cx.witness));
            out.countermodel = Some(CountermodelJson {
                model: ModelFile::from_model(&cx.model),
                point: (name(cx.point.0), name(cx.point.1)),
                path: cx.path.iter().map(|&x| name(x)).collect(),
                construction: match cx.construction {
                    Construction::Path => "path",
                    Construction::Submodel => "submodel",
                    Construction::Unraveled => "unraveled",
                },
            });
        }
        out
    }
}
