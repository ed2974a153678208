use thiserror::Error;

use super::{CompiledModel, ContextEnv, KripkeModel, Resolved, Violation, WorldSet};
use crate::reduce::contract;
use crate::syntax::{ContextFormula, Formula, Variant};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("ill-formed model: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Model(Vec<Violation>),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("agent `{0}` has no relation in the model")]
    UnknownAgent(String),
    #[error("context `{0}` is not bound")]
    UnresolvedContext(String),
}

impl CompiledModel {
    /// The set of worlds where `f` holds.
    pub fn extension(&self, env: &ContextEnv, f: &Formula) -> Result<WorldSet, EvalError> {
        let n = self.n;
        Ok(match f {
            Formula::Atom(p) => match env.get(p) {
                Some(body) => self.body(body),
                None => self.atom(p),
            },
            Formula::Not(a) => self.extension(env, a)?.complement(n),
            Formula::And(a, b) => self.extension(env, a)?.intersect(&self.extension(env, b)?),
            Formula::Or(a, b) => self.extension(env, a)?.union(&self.extension(env, b)?),
            Formula::Imp(a, b) => self
                .extension(env, a)?
                .complement(n)
                .union(&self.extension(env, b)?),
            Formula::Iff(a, b) => {
                let (x, y) = (self.extension(env, a)?, self.extension(env, b)?);
                let both = x.clone().intersect(&y);
                let neither = x.union(&y).complement(n);
                both.union(&neither)
            }
            Formula::Know(j, _, a) => self.necessity(j, &self.extension(env, a)?)?,
            Formula::Poss(j, _, a) => self.possibility(j, &self.extension(env, a)?)?,
            Formula::Rel(a, c) => self.relativized(env, a, c)?,
        })
    }

    /// Extension of `(body)^ctx`.
    fn relativized(
        &self,
        env: &ContextEnv,
        body: &Formula,
        ctx: &str,
    ) -> Result<WorldSet, EvalError> {
        let n = self.n;
        let outside =
            || -> Result<WorldSet, EvalError> { Ok(self.context(env, ctx)?.complement(n)) };
        Ok(match body {
            Formula::Atom(_) | Formula::Rel(..) => outside()?.union(&self.extension(env, body)?),
            Formula::Not(a) => outside()?.union(&self.relativized(env, a, ctx)?.complement(n)),
            Formula::And(a, b) => self
                .relativized(env, a, ctx)?
                .intersect(&self.relativized(env, b, ctx)?),
            Formula::Know(j, v, a) => {
                let v = Variant::resolve(*v);
                let guard = v.condition_context(ctx, j);
                let next = v.continuation_context(ctx, j);
                let known = self.necessity(j, &self.relativized(env, a, next.as_str())?)?;
                self.context(env, guard.as_str())?
                    .complement(n)
                    .union(&known)
            }
            Formula::Or(..) | Formula::Imp(..) | Formula::Iff(..) | Formula::Poss(..) => {
                let (rewritten, _) = contract(body, ctx);
                self.extension(env, &rewritten)?
            }
        })
    }

    /// Worlds where the named context holds.
    pub fn context(&self, env: &ContextEnv, name: &str) -> Result<WorldSet, EvalError> {
        match env.resolve(name) {
            Some(Resolved::Body(body)) => Ok(self.body(body)),
            Some(Resolved::Fresh) => Ok(self.atom(name)),
            None => Err(EvalError::UnresolvedContext(name.to_string())),
        }
    }

    fn body(&self, body: &ContextFormula) -> WorldSet {
        match body {
            ContextFormula::Top => WorldSet::full(self.n),
            ContextFormula::Bot => WorldSet::empty(self.n),
            ContextFormula::Conj(lits) => lits.iter().fold(WorldSet::full(self.n), |acc, l| {
                let s = self.atom(&l.atom);
                acc.intersect(&if l.positive { s } else { s.complement(self.n) })
            }),
        }
    }

    fn classes(&self, agent: &str) -> Result<&[WorldSet], EvalError> {
        self.partitions
            .get(agent)
            .map(Vec::as_slice)
            .ok_or_else(|| EvalError::UnknownAgent(agent.to_string()))
    }

    fn necessity(&self, agent: &str, s: &WorldSet) -> Result<WorldSet, EvalError> {
        Ok(self
            .classes(agent)?
            .iter()
            .filter(|c| c.is_subset(s))
            .fold(WorldSet::empty(self.n), |acc, c| acc.union(c)))
    }

    fn possibility(&self, agent: &str, s: &WorldSet) -> Result<WorldSet, EvalError> {
        Ok(self
            .classes(agent)?
            .iter()
            .filter(|c| c.intersects(s))
            .fold(WorldSet::empty(self.n), |acc, c| acc.union(c)))
    }

    fn world(&self, w: &str) -> Result<usize, EvalError> {
        self.world_index(w)
            .ok_or_else(|| EvalError::UnknownWorld(w.to_string()))
    }
}

/// Truth of `f` at world `w`.
pub fn satisfies(
    m: &KripkeModel,
    w: &str,
    env: &ContextEnv,
    f: &Formula,
) -> Result<bool, EvalError> {
    let cm = CompiledModel::new(m).map_err(EvalError::Model)?;
    let k = cm.world(w)?;
    Ok(cm.extension(env, f)?.contains(k))
}

/// Truth of the named context at world `w`.
pub fn eval_context(
    m: &KripkeModel,
    w: &str,
    env: &ContextEnv,
    name: &str,
) -> Result<bool, EvalError> {
    let cm = CompiledModel::new(m).map_err(EvalError::Model)?;
    let k = cm.world(w)?;
    Ok(cm.context(env, name)?.contains(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn model(json: &str) -> KripkeModel {
        serde_json::from_str(json).unwrap()
    }

    fn env(json: &str) -> ContextEnv {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn knowledge_in_a_singleton_class() {
        let m = model(r#"{"worlds":["w"],"agents":{"i":[["w"]]},"valuation":{"a":["w"]}}"#);
        assert!(satisfies(
            &m,
            "w",
            &ContextEnv::fresh(),
            &parse_formula("K{i,1.1} a").unwrap()
        )
        .unwrap());
    }

    #[test]
    fn context_bodies() {
        let m = model(r#"{"worlds":["u","v"],"agents":{},"valuation":{"p":["u","v"],"q":["v"]}}"#);
        assert!(eval_context(&m, "u", &env(r#"{"ci":"true"}"#), "ci").unwrap());
        assert!(eval_context(&m, "u", &env(r#"{"ci":"p & ~q"}"#), "ci").unwrap());
        assert!(!eval_context(&m, "v", &env(r#"{"ci":"p & ~q"}"#), "ci").unwrap());
        assert!(!eval_context(&m, "u", &env(r#"{"ci":"false"}"#), "ci").unwrap());
        assert_eq!(
            eval_context(&m, "u", &ContextEnv::strict(), "ci"),
            Err(EvalError::UnresolvedContext("ci".into()))
        );
    }

    #[test]
    fn bottom_context_makes_relativization_vacuous() {
        let m = model(r#"{"worlds":["u","v"],"agents":{"i":[["u","v"]]},"valuation":{"p":["v"]}}"#);
        let e = env(r#"{"ci":"false"}"#);
        for text in [
            "p",
            "~p",
            "K{i,1.1} p",
            "p & ~p",
            "P{i,1.2} ~p",
            "p | q",
            "(p)^cj",
        ] {
            let f = Formula::rel(parse_formula(text).unwrap(), "ci");
            assert!(satisfies(&m, "u", &e, &f).unwrap(), "{text}");
        }
    }

    #[test]
    fn bound_context_names_denote_their_bodies_as_atoms() {
        let m = model(r#"{"worlds":["u"],"agents":{},"valuation":{"p":["u"]}}"#);
        let e = env(r#"{"ci":"p"}"#);
        assert!(satisfies(&m, "u", &e, &parse_formula("ci").unwrap()).unwrap());
        assert!(!satisfies(&m, "u", &ContextEnv::fresh(), &parse_formula("ci").unwrap()).unwrap());
    }

    #[test]
    fn variant_guards_pick_the_right_context() {
        // ci holds everywhere, cj nowhere, a only at u.
        let m = model(
            r#"{"worlds":["u","v"],"agents":{"j":[["u","v"]]},"valuation":{"ci":["u","v"],"a":["u"]}}"#,
        );
        let at = |text: &str| {
            satisfies(&m, "u", &ContextEnv::fresh(), &parse_formula(text).unwrap()).unwrap()
        };
        // 1.1: guard ci true, continue in ci: needs a at v.
        assert!(!at("(K{j,1.1} a)^ci"));
        // 2.1: guard cj false: vacuous.
        assert!(at("(K{j,2.1} a)^ci"));
        // 1.2: guard ci, continue in cj which is false everywhere: (a)^cj trivially true.
        assert!(at("(K{j,1.2} a)^ci"));
        assert!(at("(K{j,2.2} a)^ci"));
    }

    #[test]
    fn errors() {
        let m = model(r#"{"worlds":["u"],"agents":{}}"#);
        let e = ContextEnv::fresh();
        assert_eq!(
            satisfies(&m, "x", &e, &Formula::atom("p")),
            Err(EvalError::UnknownWorld("x".into()))
        );
        assert_eq!(
            satisfies(&m, "u", &e, &parse_formula("K{i,1.1} p").unwrap()),
            Err(EvalError::UnknownAgent("i".into()))
        );
        let bad = model(r#"{"worlds":["u"],"agents":{"i":[]}}"#);
        assert!(matches!(
            satisfies(&bad, "u", &e, &Formula::atom("p")),
            Err(EvalError::Model(_))
        ));
        let strict = ContextEnv::strict();
        assert!(satisfies(&m, "u", &strict, &parse_formula("(p)^ci").unwrap()).is_err());
    }
}
