use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::ContextFormula;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("`{0}` is not a valid context name")]
    BadName(String),
    #[error("body of context `{context}` mentions `{atom}`, which is itself a bound context")]
    CircularBody { context: String, atom: String },
}

/// Binding of context names to their characteristic literal conjunctions.
///
/// Every context name is also an atom of the object language: an unbound
/// name stands for itself (a fresh atom, so verdicts are schematic in the
/// context), while a bound name stands for its body. With `auto_bind`
/// switched off, unbound names are errors instead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextEnv {
    bindings: BTreeMap<String, ContextFormula>,
    auto_bind: bool,
}

/// How a context name is interpreted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resolved<'a> {
    Body(&'a ContextFormula),
    /// Unbound; interpreted as the atom of the same name.
    Fresh,
}

impl Default for ContextEnv {
    fn default() -> Self {
        ContextEnv::fresh()
    }
}

fn valid_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl ContextEnv {
    /// No bindings; every context is a fresh atom.
    pub fn fresh() -> ContextEnv {
        ContextEnv {
            bindings: BTreeMap::new(),
            auto_bind: true,
        }
    }

    /// No bindings and no auto-binding.
    pub fn strict() -> ContextEnv {
        ContextEnv {
            bindings: BTreeMap::new(),
            auto_bind: false,
        }
    }

    pub fn from_bindings<I, S>(bindings: I) -> Result<ContextEnv, EnvError>
    where
        I: IntoIterator<Item = (S, ContextFormula)>,
        S: Into<String>,
    {
        let mut env = ContextEnv::fresh();
        for (name, body) in bindings {
            env.bindings.insert(name.into(), body);
        }
        env.validate()?;
        Ok(env)
    }

    pub fn with_auto_bind(mut self, on: bool) -> ContextEnv {
        self.auto_bind = on;
        self
    }

    pub fn auto_bind(&self) -> bool {
        self.auto_bind
    }

    pub fn bind(&mut self, name: impl Into<String>, body: ContextFormula) -> Result<(), EnvError> {
        let name = name.into();
        let previous = self.bindings.insert(name.clone(), body);
        if let Err(e) = self.validate() {
            match previous {
                Some(old) => self.bindings.insert(name, old),
                None => self.bindings.remove(&name),
            };
            return Err(e);
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&ContextFormula> {
        self.bindings.get(name)
    }

    pub fn is_bound(&self, name: &str) -> bool {
        self.bindings.contains_key(name)
    }

    pub fn bindings(&self) -> &BTreeMap<String, ContextFormula> {
        &self.bindings
    }

    /// Interprets a context name, or `None` if it is unbound and
    /// auto-binding is off.
    pub fn resolve(&self, name: &str) -> Option<Resolved<'_>> {
        match self.bindings.get(name) {
            Some(body) => Some(Resolved::Body(body)),
            None if self.auto_bind => Some(Resolved::Fresh),
            None => None,
        }
    }

    fn validate(&self) -> Result<(), EnvError> {
        for (name, body) in &self.bindings {
            if !valid_name(name) {
                return Err(EnvError::BadName(name.clone()));
            }
            if let Some(l) = body
                .literals()
                .iter()
                .find(|l| self.bindings.contains_key(&l.atom))
            {
                return Err(EnvError::CircularBody {
                    context: name.clone(),
                    atom: l.atom.clone(),
                });
            }
        }
        Ok(())
    }
}

impl Serialize for ContextEnv {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.bindings.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ContextEnv {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let bindings = BTreeMap::<String, ContextFormula>::deserialize(d)?;
        ContextEnv::from_bindings(bindings).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_context;

    #[test]
    fn documented_json_shape_loads() {
        let env: ContextEnv = serde_json::from_str(r#"{"ci":"p & ~q","cscep":"true"}"#).unwrap();
        assert_eq!(env.get("ci"), Some(&parse_context("p & ~q").unwrap()));
        assert_eq!(env.get("cscep"), Some(&ContextFormula::Top));
        assert_eq!(env.resolve("cj"), Some(Resolved::Fresh));
        let back: ContextEnv = serde_json::from_str(&serde_json::to_string(&env).unwrap()).unwrap();
        assert_eq!(back, env);
    }

    #[test]
    fn rejects_bodies_over_bound_names() {
        let err = serde_json::from_str::<ContextEnv>(r#"{"ci":"cj","cj":"p"}"#).unwrap_err();
        assert!(err.to_string().contains("bound context"));
        let mut env = ContextEnv::fresh();
        env.bind("ci", parse_context("cj").unwrap()).unwrap();
        assert!(env.bind("cj", ContextFormula::Top).is_err());
        assert!(!env.is_bound("cj"));
        assert!(env.bind("Bad", ContextFormula::Top).is_err());
    }

    #[test]
    fn strict_env_leaves_names_unresolved() {
        assert_eq!(ContextEnv::strict().resolve("ci"), None);
    }
}
