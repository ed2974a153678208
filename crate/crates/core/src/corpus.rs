//! Fixed formula collections with known verdicts, and a seeded generator
//! of random formulas for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::reduce::{contract, Axiom};
use crate::syntax::{parse_formula, Formula, Variant};

/// A formula with the verdict both deciders must reach.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    /// Short description used to identify the row in reports.
    pub anchor: String,
    pub formula: Formula,
    pub valid: bool,
}

fn entry(anchor: impl Into<String>, text: &str, valid: bool) -> CorpusEntry {
    let formula = parse_formula(text).unwrap_or_else(|e| panic!("corpus formula `{text}`: {e}"));
    CorpusEntry {
        anchor: anchor.into(),
        formula,
        valid,
    }
}

/// Introspection, distribution, normality, factivity and mixed-agent
/// results, each with its expected verdict.
pub fn results_corpus() -> Vec<CorpusEntry> {
    let mut out = vec![
        entry(
            "positive introspection",
            "K{i,1.1} a -> K{i,1.1} K{i,1.1} a",
            true,
        ),
        entry(
            "distribution over two agents",
            "K{i,1.1} K{j,1.1} a -> (K{i,1.1} a & K{j,1.1} a)",
            true,
        ),
        entry(
            "introspection across contexts, 1.2",
            "(K{i,1.2} a)^ci -> (K{i,1.2} K{i,1.2} a)^cj",
            false,
        ),
        entry(
            "introspection across contexts, 2.2",
            "(K{i,2.2} a)^ci -> (K{i,2.2} K{i,2.2} a)^cj",
            true,
        ),
    ];
    for v in Variant::ALL {
        let text = format!("((K{{j,{v}}} p & K{{j,{v}}} (p -> q)) -> K{{j,{v}}} q)^ci");
        out.push(entry(format!("normality, {v}"), &text, true));
    }
    for (v, valid) in [("1.1", true), ("1.2", false), ("2.2", false)] {
        let text = format!("(K{{j,{v}}} K{{k,{v}}} p -> K{{k,{v}}} p)^ci");
        out.push(entry(
            format!("knowledge of knowledge is knowledge, {v}"),
            &text,
            valid,
        ));
    }
    out.push(entry(
        "mixed agents",
        "(K{j,1.1} K{k,2.2} p)^ci -> (K{k,2.2} p)^ci",
        false,
    ));
    out.push(entry(
        "mixed variants, one agent",
        "(K{j,1.1} K{j,2.2} p)^ci -> (K{j,2.2} p)^ci",
        false,
    ));
    out.push(entry(
        "contextual negation, left to right",
        "(~p)^ci -> (ci -> ~(p)^ci)",
        true,
    ));
    out.push(entry(
        "contextual negation, right to left",
        "(ci -> ~(p)^ci) -> (~p)^ci",
        true,
    ));
    out
}

/// Every reduction-axiom instance over `p` (and `q` for conjunctions),
/// contexts `ci`/`cj`, agents `i`/`j` and all variants, as biconditionals.
pub fn axiom_instances() -> Vec<(Axiom, Formula)> {
    let p = || Formula::atom("p");
    let ctxs = ["ci", "cj"];
    let mut bodies = Vec::new();
    for c in ctxs {
        bodies.push((p(), c));
    }
    for c in ctxs {
        bodies.push((Formula::not(p()), c));
    }
    for c in ctxs {
        bodies.push((Formula::and(p(), Formula::atom("q")), c));
    }
    for outer in ctxs {
        for inner in ctxs {
            bodies.push((Formula::rel(p(), inner), outer));
        }
    }
    for agent in ["i", "j"] {
        for c in ctxs {
            for v in Variant::ALL {
                bodies.push((Formula::know(agent, v, p()), c));
            }
        }
    }
    bodies
        .into_iter()
        .map(|(body, c)| {
            let (rhs, axiom) = contract(&body, c);
            (axiom, Formula::iff(Formula::rel(body, c), rhs))
        })
        .collect()
}

/// [`results_corpus`] followed by the axiom instances.
pub fn verdict_corpus() -> Vec<CorpusEntry> {
    let mut out = results_corpus();
    for (axiom, f) in axiom_instances() {
        out.push(CorpusEntry {
            anchor: format!("{axiom} instance: {f}"),
            formula: f,
            valid: true,
        });
    }
    out
}

/// Vocabulary and shape of generated formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub atoms: Vec<String>,
    pub agents: Vec<String>,
    pub contexts: Vec<String>,
    /// Maximum nesting depth of the syntax tree (atoms have depth 0).
    pub max_depth: usize,
}

impl GenParams {
    /// Atoms `p`, `q`; agents `i`, `j`; their contexts `ci`, `cj`.
    pub fn small(max_depth: usize) -> GenParams {
        let names = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        GenParams {
            atoms: names(&["p", "q"]),
            agents: names(&["i", "j"]),
            contexts: names(&["ci", "cj"]),
            max_depth,
        }
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, xs: &'a [String]) -> &'a str {
    &xs[rng.gen_range(0..xs.len())]
}

/// A random formula of depth at most `depth`; leaves become likelier
/// as depth runs out.
pub fn random_formula(rng: &mut ChaCha8Rng, params: &GenParams, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return Formula::atom(pick(rng, &params.atoms));
    }
    let d = depth - 1;
    let sub = |rng: &mut ChaCha8Rng| random_formula(rng, params, d);
    match rng.gen_range(0..8) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::imp(sub(rng), sub(rng)),
        4 => Formula::iff(sub(rng), sub(rng)),
        5 | 6 => {
            let agent = pick(rng, &params.agents).to_string();
            let variant = Variant::ALL[rng.gen_range(0..4)];
            let body = sub(rng);
            if rng.gen_bool(0.75) {
                Formula::know(agent, variant, body)
            } else {
                Formula::poss(agent, variant, body)
            }
        }
        _ => {
            let body = sub(rng);
            Formula::rel(body, pick(rng, &params.contexts))
        }
    }
}

/// `count` formulas from a generator seeded with `seed`.
pub fn random_corpus(seed: u64, count: usize, params: &GenParams) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_formula(&mut rng, params, params.max_depth))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::formula_info;

    #[test]
    fn twenty_six_axiom_instances() {
        let inst = axiom_instances();
        assert_eq!(inst.len(), 26);
        let knowledge = inst
            .iter()
            .filter(|(a, _)| matches!(a, Axiom::ContextualKnowledge(_)))
            .count();
        assert_eq!(knowledge, 16);
        assert_eq!(inst[0].1, parse_formula("(p)^ci <-> (ci -> p)").unwrap());
    }

    #[test]
    fn generator_is_deterministic_and_bounded() {
        let params = GenParams::small(3);
        let a = random_corpus(7, 50, &params);
        assert_eq!(a, random_corpus(7, 50, &params));
        assert_ne!(a, random_corpus(8, 50, &params));
        fn depth(f: &Formula) -> usize {
            f.children()
                .into_iter()
                .map(|c| 1 + depth(c))
                .max()
                .unwrap_or(0)
        }
        for f in &a {
            assert!(depth(f) <= 3);
            let info = formula_info(f);
            assert!(info.agents.iter().all(|x| x == "i" || x == "j"));
        }
        assert!(a.iter().any(|f| !f.is_el()));
    }
}
