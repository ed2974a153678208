//! Validity for multi-agent S5 by a labelled tableau whose labels are
//! grouped into per-agent clusters, and validity for the relativized
//! language by reduction followed by the tableau.

mod tableau;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kripke::{satisfies, ContextEnv, EvalError, KripkeModel};
use crate::reduce::{reduce_full, BudgetExceeded};
use crate::syntax::Formula;

pub use tableau::{ProofEnd, ProofTree, Sign, SignedEntry};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Valid { proof: ProofTree },
    Invalid { model: KripkeModel, world: String },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProveError {
    #[error("formula contains relativizations; reduce it first")]
    NotEl,
    #[error(transparent)]
    Reduction(#[from] BudgetExceeded),
    #[error("context `{0}` is not bound")]
    UnresolvedContext(String),
    #[error("checking the counter-model failed: {0}")]
    Eval(#[from] EvalError),
    #[error("internal error: extracted model does not falsify the formula at {world}")]
    BadWitness { world: String },
}

/// Decides an unrelativized formula with every atom read plainly.
pub fn prove_el(f: &Formula) -> Result<Verdict, ProveError> {
    prove_el_in(f, &ContextEnv::fresh())
}

/// Decides an unrelativized formula; atoms bound in `env` stand for their
/// context bodies.
pub fn prove_el_in(f: &Formula, env: &ContextEnv) -> Result<Verdict, ProveError> {
    if !f.is_el() {
        return Err(ProveError::NotEl);
    }
    let verdict = tableau::decide(f, env);
    if let Verdict::Invalid { model, world } = &verdict {
        if satisfies(model, world, env, f)? {
            return Err(ProveError::BadWitness {
                world: world.clone(),
            });
        }
    }
    Ok(verdict)
}

/// Decides a relativized formula: reduce to plain epistemic logic, run the
/// tableau, and re-check any counter-model against the original formula.
pub fn prove_cel(f: &Formula, env: &ContextEnv) -> Result<Verdict, ProveError> {
    if !env.auto_bind() {
        if let Some(c) = f
            .context_vocabulary()
            .into_iter()
            .find(|c| !env.is_bound(c))
        {
            return Err(ProveError::UnresolvedContext(c));
        }
    }
    let trace = reduce_full(f)?;
    let verdict = prove_el_in(&trace.result, env)?;
    if let Verdict::Invalid { model, world } = &verdict {
        if satisfies(model, world, env, f)? {
            return Err(ProveError::BadWitness {
                world: world.clone(),
            });
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::find_countermodel;
    use crate::syntax::{parse_formula, Variant};

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn valid(s: &str) -> bool {
        prove_cel(&p(s), &ContextEnv::fresh()).unwrap().is_valid()
    }

    #[test]
    fn positive_introspection() {
        assert!(prove_el(&p("K{i,1.1} a -> K{i,1.1} K{i,1.1} a"))
            .unwrap()
            .is_valid());
    }

    #[test]
    fn two_agent_distribution() {
        assert!(
            prove_el(&p("K{i,1.1} K{j,1.1} a -> (K{i,1.1} a & K{j,1.1} a)"))
                .unwrap()
                .is_valid()
        );
    }

    #[test]
    fn truth_but_not_its_converse() {
        assert!(prove_el(&p("K{i,1.1} a -> a")).unwrap().is_valid());
        match prove_el(&p("a -> K{i,1.1} a")).unwrap() {
            Verdict::Invalid { model, .. } => assert_eq!(model.worlds.len(), 2),
            v => panic!("{v:?}"),
        }
        let oracle = find_countermodel(&p("a -> K{i,1.1} a"), &ContextEnv::fresh(), 2).unwrap();
        assert_eq!(oracle.unwrap().model.worlds.len(), 2);
    }

    #[test]
    fn negative_introspection_and_cross_agent_failure() {
        assert!(valid("~K{i,1.1} a -> K{i,1.1} ~K{i,1.1} a"));
        assert!(!valid("K{i,1.1} a -> K{j,1.1} K{i,1.1} a"));
        assert!(valid("P{i,1.1} a <-> ~K{i,1.1} ~a"));
        assert!(!valid("P{i,1.1} a & P{i,1.1} b -> P{i,1.1} (a & b)"));
    }

    #[test]
    fn rejects_relativized_input() {
        assert_eq!(prove_el(&p("(a)^ci")), Err(ProveError::NotEl));
    }

    #[test]
    fn introspection_across_contexts() {
        assert!(!valid("(K{i,1.2} a)^ci -> (K{i,1.2} K{i,1.2} a)^cj"));
        assert!(valid("(K{i,2.2} a)^ci -> (K{i,2.2} K{i,2.2} a)^cj"));
    }

    #[test]
    fn normality_for_every_variant() {
        for v in Variant::ALL {
            let f = format!("((K{{j,{v}}} p & K{{j,{v}}} (p -> q)) -> K{{j,{v}}} q)^ci");
            assert!(valid(&f), "{f}");
        }
    }

    #[test]
    fn bound_contexts_enter_the_tableau() {
        let env: ContextEnv =
            serde_json::from_str(r#"{"ci":"false","cj":"true","ck":"p & ~q"}"#).unwrap();
        let check = |s: &str| prove_cel(&p(s), &env).unwrap().is_valid();
        assert!(check("(r)^ci"));
        assert!(!check("(r)^cj"));
        assert!(check("(p)^ck"));
        assert!(check("(~q)^ck"));
        assert!(!check("(r)^ck"));
        assert!(check("ck -> p"));
    }

    #[test]
    fn strict_env_reports_unbound_contexts() {
        assert_eq!(
            prove_cel(&p("(a)^ci"), &ContextEnv::strict()),
            Err(ProveError::UnresolvedContext("ci".into()))
        );
    }

    #[test]
    fn verdicts_round_trip_through_json() {
        for s in ["K{i,1.1} a -> a", "a -> K{i,1.1} a", "K{i,1.1} a | ~a"] {
            let v = prove_el(&p(s)).unwrap();
            let back: Verdict = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
            assert_eq!(back, v);
        }
    }

    #[test]
    fn valid_proofs_are_closed() {
        match prove_el(&p("(a | b) & ~a -> b")).unwrap() {
            Verdict::Valid { proof } => {
                assert!(proof.is_closed());
                assert!(matches!(proof.end, ProofEnd::Split { .. }));
            }
            v => panic!("{v:?}"),
        }
    }
}
