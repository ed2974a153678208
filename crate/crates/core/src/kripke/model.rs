use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::WorldSet;

/// A finite multi-agent S5 model. Each agent's accessibility relation is
/// given as a partition of the worlds into equivalence classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KripkeModel {
    pub worlds: Vec<String>,
    #[serde(default)]
    pub agents: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    NoWorlds,
    DuplicateWorld { world: String },
    EmptyClass { agent: String },
    UnknownWorldInClass { agent: String, world: String },
    WorldInSeveralClasses { agent: String, world: String },
    WorldMissingFromPartition { agent: String, world: String },
    UnknownWorldInValuation { atom: String, world: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoWorlds => write!(f, "model has no worlds"),
            Violation::DuplicateWorld { world } => write!(f, "world `{world}` listed twice"),
            Violation::EmptyClass { agent } => write!(f, "agent `{agent}` has an empty class"),
            Violation::UnknownWorldInClass { agent, world } => {
                write!(f, "agent `{agent}` partitions unknown world `{world}`")
            }
            Violation::WorldInSeveralClasses { agent, world } => {
                write!(
                    f,
                    "world `{world}` is in several classes of agent `{agent}`"
                )
            }
            Violation::WorldMissingFromPartition { agent, world } => {
                write!(
                    f,
                    "world `{world}` is missing from the partition of agent `{agent}`"
                )
            }
            Violation::UnknownWorldInValuation { atom, world } => {
                write!(f, "valuation of `{atom}` mentions unknown world `{world}`")
            }
        }
    }
}

/// Lists every way in which `m` fails to be a well-formed partition model.
pub fn check_model(m: &KripkeModel) -> Vec<Violation> {
    let mut out = Vec::new();
    if m.worlds.is_empty() {
        out.push(Violation::NoWorlds);
    }
    let mut known = BTreeSet::new();
    for w in &m.worlds {
        if !known.insert(w.as_str()) {
            out.push(Violation::DuplicateWorld { world: w.clone() });
        }
    }
    for (agent, classes) in &m.agents {
        let mut seen = BTreeSet::new();
        for class in classes {
            if class.is_empty() {
                out.push(Violation::EmptyClass {
                    agent: agent.clone(),
                });
            }
            for w in class {
                if !known.contains(w.as_str()) {
                    out.push(Violation::UnknownWorldInClass {
                        agent: agent.clone(),
                        world: w.clone(),
                    });
                } else if !seen.insert(w.as_str()) {
                    out.push(Violation::WorldInSeveralClasses {
                        agent: agent.clone(),
                        world: w.clone(),
                    });
                }
            }
        }
        for w in &known {
            if !seen.contains(w) {
                out.push(Violation::WorldMissingFromPartition {
                    agent: agent.clone(),
                    world: w.to_string(),
                });
            }
        }
    }
    for (atom, ws) in &m.valuation {
        for w in ws {
            if !known.contains(w.as_str()) {
                out.push(Violation::UnknownWorldInValuation {
                    atom: atom.clone(),
                    world: w.clone(),
                });
            }
        }
    }
    out
}

/// Index-based view of a well-formed model, used for evaluation.
#[derive(Clone, Debug)]
pub struct CompiledModel {
    pub(crate) n: usize,
    pub(crate) index: HashMap<String, usize>,
    /// Per agent, the classes of the partition.
    pub(crate) partitions: BTreeMap<String, Vec<WorldSet>>,
    pub(crate) valuation: HashMap<String, WorldSet>,
}

impl CompiledModel {
    pub fn new(m: &KripkeModel) -> Result<CompiledModel, Vec<Violation>> {
        let violations = check_model(m);
        if !violations.is_empty() {
            return Err(violations);
        }
        let n = m.worlds.len();
        let index: HashMap<String, usize> = m
            .worlds
            .iter()
            .enumerate()
            .map(|(k, w)| (w.clone(), k))
            .collect();
        let set = |ws: &[String]| WorldSet::from_indices(n, ws.iter().map(|w| index[w]));
        let partitions = m
            .agents
            .iter()
            .map(|(a, classes)| (a.clone(), classes.iter().map(|c| set(c)).collect()))
            .collect();
        let valuation = m
            .valuation
            .iter()
            .map(|(p, ws)| (p.clone(), set(ws)))
            .collect();
        Ok(CompiledModel {
            n,
            index,
            partitions,
            valuation,
        })
    }

    pub fn world_count(&self) -> usize {
        self.n
    }

    pub fn world_index(&self, w: &str) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub(crate) fn atom(&self, p: &str) -> WorldSet {
        self.valuation
            .get(p)
            .cloned()
            .unwrap_or_else(|| WorldSet::empty(self.n))
    }
}

impl KripkeModel {
    /// The atoms true at `world`, in name order.
    pub fn atoms_at(&self, world: &str) -> Vec<&str> {
        self.valuation
            .iter()
            .filter(|(_, ws)| ws.iter().any(|w| w == world))
            .map(|(p, _)| p.as_str())
            .collect()
    }

    /// Graphviz rendering: one node per world listing its true atoms, and
    /// each agent class drawn as a clique of edges labelled by the agent.
    /// `highlight` marks a distinguished world (e.g. a counter-model's root).
    pub fn to_dot(&self, highlight: Option<&str>) -> String {
        let mut out = String::from("graph model {\n  node [shape=box];\n");
        for w in &self.worlds {
            let atoms = self.atoms_at(w).join(", ");
            let style = if highlight == Some(w.as_str()) {
                ", peripheries=2"
            } else {
                ""
            };
            out.push_str(&format!(
                "  \"{w}\" [label=\"{w}\\n{{{atoms}}}\"{style}];\n"
            ));
        }
        for (agent, classes) in &self.agents {
            for class in classes {
                for (k, a) in class.iter().enumerate() {
                    for b in &class[k + 1..] {
                        out.push_str(&format!("  \"{a}\" -- \"{b}\" [label=\"{agent}\"];\n"));
                    }
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(json: &str) -> KripkeModel {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn singleton_model_is_well_formed() {
        let m = model(r#"{"worlds":["w1"],"agents":{"i":[["w1"]]}}"#);
        assert!(check_model(&m).is_empty());
    }

    #[test]
    fn documented_json_shape_loads() {
        let m = model(
            r#"{"worlds":["w1","w2"],"agents":{"i":[["w1","w2"]],"j":[["w1"],["w2"]]},"valuation":{"p":["w1"]}}"#,
        );
        assert!(check_model(&m).is_empty());
        let back: KripkeModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn unknown_world_in_valuation() {
        let m = model(r#"{"worlds":["w1"],"agents":{"i":[["w1"]]},"valuation":{"p":["w9"]}}"#);
        assert_eq!(
            check_model(&m),
            vec![Violation::UnknownWorldInValuation {
                atom: "p".into(),
                world: "w9".into()
            }]
        );
    }

    #[test]
    fn broken_partitions() {
        let m = model(r#"{"worlds":["a","b","c"],"agents":{"i":[["a","b"],["b"],[]]}}"#);
        let v = check_model(&m);
        assert!(v.contains(&Violation::WorldInSeveralClasses {
            agent: "i".into(),
            world: "b".into()
        }));
        assert!(v.contains(&Violation::WorldMissingFromPartition {
            agent: "i".into(),
            world: "c".into()
        }));
        assert!(v.contains(&Violation::EmptyClass { agent: "i".into() }));
        assert!(check_model(&model(r#"{"worlds":[]}"#)).contains(&Violation::NoWorlds));
        assert!(serde_json::from_str::<KripkeModel>(r#"{"worlds":["a"],"extra":1}"#).is_err());
    }

    #[test]
    fn dot_lists_atoms_and_cliques() {
        let m = model(
            r#"{"worlds":["w1","w2"],"agents":{"i":[["w1","w2"]]},"valuation":{"p":["w1"]}}"#,
        );
        let dot = m.to_dot(Some("w1"));
        assert!(dot.contains("\"w1\" [label=\"w1\\n{p}\", peripheries=2]"));
        assert!(dot.contains("\"w1\" -- \"w2\" [label=\"i\"]"));
    }
}
