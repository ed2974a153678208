//! Compilation of relativized formulas into plain epistemic logic by
//! repeated application of the reduction axioms, leftmost-outermost.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Formula, Variant};

/// The reduction axiom a rewrite step instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    Atoms,
    ContextIteration,
    ContextualNegation,
    ContextualConjunction,
    ContextualKnowledge(Variant),
    /// Relativized disjunction, read off the dialogical particle rule.
    DerivedOr,
    DerivedImp,
    DerivedIff,
    DerivedPoss,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Atoms => "Atoms",
            Axiom::ContextIteration => "Context iteration",
            Axiom::ContextualNegation => "Contextual negation",
            Axiom::ContextualConjunction => "Contextual conjunction",
            Axiom::ContextualKnowledge(Variant::V11) => "1.1-Contextual Knowledge",
            Axiom::ContextualKnowledge(Variant::V12) => "1.2-Contextual Knowledge",
            Axiom::ContextualKnowledge(Variant::V21) => "2.1-Contextual Knowledge",
            Axiom::ContextualKnowledge(Variant::V22) => "2.2-Contextual Knowledge",
            Axiom::DerivedOr => "derived-∨",
            Axiom::DerivedImp => "derived-→",
            Axiom::DerivedIff => "derived-↔",
            Axiom::DerivedPoss => "derived-◇",
        }
    }

    pub fn all() -> Vec<Axiom> {
        let mut out = vec![
            Axiom::Atoms,
            Axiom::ContextIteration,
            Axiom::ContextualNegation,
            Axiom::ContextualConjunction,
        ];
        out.extend(Variant::ALL.map(Axiom::ContextualKnowledge));
        out.extend([
            Axiom::DerivedOr,
            Axiom::DerivedImp,
            Axiom::DerivedIff,
            Axiom::DerivedPoss,
        ]);
        out
    }

    pub fn from_name(name: &str) -> Option<Axiom> {
        Axiom::all().into_iter().find(|a| a.name() == name)
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Axiom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Axiom {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        Axiom::from_name(&name)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown axiom `{name}`")))
    }
}

/// The right-hand side of the axiom whose left-hand side is `(body)^ctx`.
pub fn contract(body: &Formula, ctx: &str) -> (Formula, Axiom) {
    let c = || Formula::atom(ctx);
    let rel = |f: &Formula| Formula::rel(f.clone(), ctx);
    match body {
        Formula::Atom(_) => (Formula::imp(c(), body.clone()), Axiom::Atoms),
        Formula::Rel(..) => (Formula::imp(c(), body.clone()), Axiom::ContextIteration),
        Formula::Not(a) => (
            Formula::imp(c(), Formula::not(rel(a))),
            Axiom::ContextualNegation,
        ),
        Formula::And(a, b) => (Formula::and(rel(a), rel(b)), Axiom::ContextualConjunction),
        Formula::Know(j, v, a) => {
            let variant = Variant::resolve(*v);
            let guard = variant.condition_context(ctx, j).into_string();
            let next = variant.continuation_context(ctx, j).into_string();
            let inner = Formula::Know(j.clone(), *v, Box::new(Formula::rel((**a).clone(), next)));
            (
                Formula::imp(Formula::Atom(guard), inner),
                Axiom::ContextualKnowledge(variant),
            )
        }
        Formula::Or(a, b) => (
            Formula::imp(c(), Formula::or(rel(a), rel(b))),
            Axiom::DerivedOr,
        ),
        Formula::Imp(a, b) => (
            Formula::imp(c(), Formula::imp(rel(a), rel(b))),
            Axiom::DerivedImp,
        ),
        Formula::Iff(a, b) => {
            let both = Formula::and(
                Formula::imp((**a).clone(), (**b).clone()),
                Formula::imp((**b).clone(), (**a).clone()),
            );
            (Formula::rel(both, ctx), Axiom::DerivedIff)
        }
        Formula::Poss(j, v, a) => {
            let dual = Formula::not(Formula::Know(
                j.clone(),
                *v,
                Box::new(Formula::not((**a).clone())),
            ));
            (Formula::rel(dual, ctx), Axiom::DerivedPoss)
        }
    }
}

/// One rewrite: the subformula of `before` at `path` is the redex, and the
/// subformula of `after` at the same path is its contractum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub before: Formula,
    pub axiom: Axiom,
    pub path: Vec<usize>,
    pub after: Formula,
}

impl Step {
    pub fn redex(&self) -> &Formula {
        self.before
            .at_path(&self.path)
            .expect("step path addresses the redex")
    }

    pub fn contractum(&self) -> &Formula {
        self.after
            .at_path(&self.path)
            .expect("step path addresses the contractum")
    }

    /// `redex <-> contractum`, an instance of the step's axiom.
    pub fn instance(&self) -> Formula {
        Formula::iff(self.redex().clone(), self.contractum().clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub input: Formula,
    pub steps: Vec<Step>,
    pub result: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("reduction did not terminate within {budget} steps")]
pub struct BudgetExceeded {
    pub budget: usize,
}

fn first_rel(f: &Formula, path: &mut Vec<usize>) -> bool {
    if let Formula::Rel(..) = f {
        return true;
    }
    for (k, c) in f.children().into_iter().enumerate() {
        path.push(k);
        if first_rel(c, path) {
            return true;
        }
        path.pop();
    }
    false
}

/// Rewrites the first relativization in preorder; `None` iff `f` is
/// already free of relativizations.
pub fn reduce_once(f: &Formula) -> Option<(Formula, Axiom, Vec<usize>)> {
    let mut path = Vec::new();
    if !first_rel(f, &mut path) {
        return None;
    }
    let Some(Formula::Rel(body, ctx)) = f.at_path(&path) else {
        unreachable!("first_rel stops at a relativization")
    };
    let (contractum, axiom) = contract(body, ctx);
    let after = f.replace_at(&path, contractum).expect("path is valid");
    Some((after, axiom, path))
}

/// Default step budget: 4·|f|².
pub fn default_budget(f: &Formula) -> usize {
    4 * f.size() * f.size()
}

pub fn reduce_full(f: &Formula) -> Result<ReductionTrace, BudgetExceeded> {
    reduce_full_with(f, default_budget(f))
}

pub fn reduce_full_with(f: &Formula, budget: usize) -> Result<ReductionTrace, BudgetExceeded> {
    let mut steps = Vec::new();
    let mut cur = f.clone();
    while let Some((after, axiom, path)) = reduce_once(&cur) {
        if steps.len() == budget {
            return Err(BudgetExceeded { budget });
        }
        let before = std::mem::replace(&mut cur, after.clone());
        steps.push(Step {
            before,
            axiom,
            path,
            after,
        });
    }
    Ok(ReductionTrace {
        input: f.clone(),
        steps,
        result: cur,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn atoms_axiom() {
        let (g, ax, path) = reduce_once(&p("(p)^ci")).unwrap();
        assert_eq!((g, ax, path), (p("ci -> p"), Axiom::Atoms, vec![]));
    }

    #[test]
    fn knowledge_axiom_each_variant() {
        let cases = [
            ("(K{j,1.1} p)^ci", "ci -> K{j,1.1} (p)^ci"),
            ("(K{j,1.2} p)^ci", "ci -> K{j,1.2} (p)^cj"),
            ("(K{j,2.1} p)^ci", "cj -> K{j,2.1} (p)^ci"),
            ("(K{j,2.2} p)^ci", "cj -> K{j,2.2} (p)^cj"),
        ];
        for (v, (from, to)) in Variant::ALL.into_iter().zip(cases) {
            let (g, ax, _) = reduce_once(&p(from)).unwrap();
            assert_eq!(g, p(to));
            assert_eq!(ax, Axiom::ContextualKnowledge(v));
        }
    }

    #[test]
    fn el_input_is_a_fixpoint() {
        assert!(reduce_once(&p("p")).is_none());
        let t = reduce_full(&p("K{i,1.1} p -> p")).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.result, p("K{i,1.1} p -> p"));
    }

    #[test]
    fn context_iteration_then_atoms() {
        let t = reduce_full(&p("(p)^ck^ci")).unwrap();
        let names: Vec<_> = t.steps.iter().map(|s| s.axiom.name()).collect();
        assert_eq!(names, ["Context iteration", "Atoms"]);
        assert_eq!(t.result, p("ci -> ck -> p"));
        assert_eq!(t.steps[1].path, vec![1]);
    }

    #[test]
    fn subjectivist_knowledge_in_two_steps() {
        let t = reduce_full(&p("(K{i,2.2} a)^ci")).unwrap();
        assert_eq!(t.steps.len(), 2);
        assert_eq!(t.result, p("ci -> K{i,2.2} (ci -> a)"));
    }

    #[test]
    fn derived_rules() {
        let cases = [
            ("(p | q)^c", "c -> (p)^c | (q)^c", Axiom::DerivedOr),
            ("(p -> q)^c", "c -> (p)^c -> (q)^c", Axiom::DerivedImp),
            ("(p <-> q)^c", "((p -> q) & (q -> p))^c", Axiom::DerivedIff),
            ("(P{j,1.2} p)^c", "(~K{j,1.2} ~p)^c", Axiom::DerivedPoss),
            ("(~p)^c", "c -> ~(p)^c", Axiom::ContextualNegation),
            ("(p & q)^c", "(p)^c & (q)^c", Axiom::ContextualConjunction),
        ];
        for (from, to, ax) in cases {
            assert_eq!(
                reduce_once(&p(from)).unwrap(),
                (p(to), ax, vec![]),
                "{from}"
            );
        }
    }

    #[test]
    fn leftmost_outermost() {
        let (_, ax, path) = reduce_once(&p("K{i,1.1} (q)^cj & ((p)^ck)^ci")).unwrap();
        assert_eq!((ax, path), (Axiom::Atoms, vec![0, 0]));
        let (_, ax, path) = reduce_once(&p("((p)^ck & q)^ci")).unwrap();
        assert_eq!((ax, path), (Axiom::ContextualConjunction, vec![]));
    }

    #[test]
    fn trace_chains_and_round_trips() {
        let t = reduce_full(&p("(K{j,1.1} K{k,2.2} p -> (~q <-> P{k,2.1} p))^ci")).unwrap();
        assert!(t.result.is_el());
        for w in t.steps.windows(2) {
            assert_eq!(w[0].after, w[1].before);
        }
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<ReductionTrace>(&json).unwrap(), t);
    }

    #[test]
    fn budget_is_enforced() {
        assert_eq!(
            reduce_full_with(&p("(p)^ck^ci"), 1),
            Err(BudgetExceeded { budget: 1 })
        );
        assert!(reduce_full_with(&p("(p)^ck^ci"), 2).is_ok());
    }
}
