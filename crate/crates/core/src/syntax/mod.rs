//! Formulas of contextual epistemic logic, context formulas, and their
//! concrete syntax.

mod parse;
mod render;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use parse::{parse_context, parse_formula, parse_formula_with, ParseError, ParseOptions};
pub use render::render_formula;

/// Interaction mode between a knowledge operator and contexts.
///
/// The first digit picks the context that conditions the knowledge claim,
/// the second the context in which evaluation continues under the
/// operator; `1` is the current (attributor's) context and `2` the
/// subject's own context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "1.1")]
    V11,
    #[serde(rename = "1.2")]
    V12,
    #[serde(rename = "2.1")]
    V21,
    #[serde(rename = "2.2")]
    V22,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::V11, Variant::V12, Variant::V21, Variant::V22];

    /// Variant assumed for operators written without a tag.
    pub const DEFAULT: Variant = Variant::V11;

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::V11 => "1.1",
            Variant::V12 => "1.2",
            Variant::V21 => "2.1",
            Variant::V22 => "2.2",
        }
    }

    /// Resolves an optional occurrence tag, falling back to [`Variant::DEFAULT`].
    pub fn resolve(tag: Option<Variant>) -> Variant {
        tag.unwrap_or(Variant::DEFAULT)
    }

    /// The context that conditions `(K_agent φ)^current`.
    pub fn condition_context<'a>(self, current: &'a str, agent: &str) -> ContextRef<'a> {
        match self {
            Variant::V11 | Variant::V12 => ContextRef::Named(current),
            Variant::V21 | Variant::V22 => ContextRef::Agent(agent_context(agent)),
        }
    }

    /// The context pushed under the operator in `(K_agent φ)^current`.
    pub fn continuation_context<'a>(self, current: &'a str, agent: &str) -> ContextRef<'a> {
        match self {
            Variant::V11 | Variant::V21 => ContextRef::Named(current),
            Variant::V12 | Variant::V22 => ContextRef::Agent(agent_context(agent)),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1.1" => Ok(Variant::V11),
            "1.2" => Ok(Variant::V12),
            "2.1" => Ok(Variant::V21),
            "2.2" => Ok(Variant::V22),
            other => Err(format!(
                "unknown variant `{other}` (expected 1.1, 1.2, 2.1 or 2.2)"
            )),
        }
    }
}

/// Either a borrowed context name or the (owned) context of an agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContextRef<'a> {
    Named(&'a str),
    Agent(String),
}

impl ContextRef<'_> {
    pub fn as_str(&self) -> &str {
        match self {
            ContextRef::Named(s) => s,
            ContextRef::Agent(s) => s,
        }
    }

    pub fn into_string(self) -> String {
        match self {
            ContextRef::Named(s) => s.to_string(),
            ContextRef::Agent(s) => s,
        }
    }
}

/// Name of the context assigned to `agent`: agent `i` owns context `ci`.
pub fn agent_context(agent: &str) -> String {
    format!("c{agent}")
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// `K{agent,variant} body`; `None` marks an untagged occurrence.
    Know(String, Option<Variant>, Box<Formula>),
    /// Dual of [`Formula::Know`].
    Poss(String, Option<Variant>, Box<Formula>),
    /// `(body)^context`
    Rel(Box<Formula>, String),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::Imp(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Formula {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn know(agent: impl Into<String>, variant: Variant, body: Formula) -> Formula {
        Formula::Know(agent.into(), Some(variant), Box::new(body))
    }

    pub fn poss(agent: impl Into<String>, variant: Variant, body: Formula) -> Formula {
        Formula::Poss(agent.into(), Some(variant), Box::new(body))
    }

    pub fn rel(body: Formula, context: impl Into<String>) -> Formula {
        Formula::Rel(Box::new(body), context.into())
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) => vec![],
            Formula::Not(a)
            | Formula::Know(_, _, a)
            | Formula::Poss(_, _, a)
            | Formula::Rel(a, _) => {
                vec![a]
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                vec![a, b]
            }
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Formula::size)
            .sum::<usize>()
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Know(_, _, a) | Formula::Poss(_, _, a) => 1 + a.modal_depth(),
            _ => self
                .children()
                .into_iter()
                .map(Formula::modal_depth)
                .max()
                .unwrap_or(0),
        }
    }

    /// True iff no relativization occurs, i.e. the formula is plain epistemic logic.
    pub fn is_el(&self) -> bool {
        match self {
            Formula::Rel(..) => false,
            _ => self.children().into_iter().all(Formula::is_el),
        }
    }

    /// Subformula at a child-index path.
    pub fn at_path(&self, path: &[usize]) -> Option<&Formula> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    /// Rebuilds `self` with the subformula at `path` replaced.
    pub fn replace_at(&self, path: &[usize], replacement: Formula) -> Option<Formula> {
        let Some((&first, rest)) = path.split_first() else {
            return Some(replacement);
        };
        let sub = |a: &Formula| a.replace_at(rest, replacement.clone()).map(Box::new);
        Some(match (self, first) {
            (Formula::Not(a), 0) => Formula::Not(sub(a)?),
            (Formula::Know(j, v, a), 0) => Formula::Know(j.clone(), *v, sub(a)?),
            (Formula::Poss(j, v, a), 0) => Formula::Poss(j.clone(), *v, sub(a)?),
            (Formula::Rel(a, c), 0) => Formula::Rel(sub(a)?, c.clone()),
            (Formula::And(a, b), 0) => Formula::And(sub(a)?, b.clone()),
            (Formula::And(a, b), 1) => Formula::And(a.clone(), sub(b)?),
            (Formula::Or(a, b), 0) => Formula::Or(sub(a)?, b.clone()),
            (Formula::Or(a, b), 1) => Formula::Or(a.clone(), sub(b)?),
            (Formula::Imp(a, b), 0) => Formula::Imp(sub(a)?, b.clone()),
            (Formula::Imp(a, b), 1) => Formula::Imp(a.clone(), sub(b)?),
            (Formula::Iff(a, b), 0) => Formula::Iff(sub(a)?, b.clone()),
            (Formula::Iff(a, b), 1) => Formula::Iff(a.clone(), sub(b)?),
            _ => return None,
        })
    }

    /// Replaces every untagged Know/Poss tag with `variant`.
    pub fn fill_untagged(&self, variant: Variant) -> Formula {
        self.map_tags(&|tag| Some(tag.unwrap_or(variant)))
    }

    /// Rewrites every Know/Poss tag through `f`, keeping the skeleton.
    pub fn map_tags(&self, f: &dyn Fn(Option<Variant>) -> Option<Variant>) -> Formula {
        let go = |a: &Formula| Box::new(a.map_tags(f));
        match self {
            Formula::Atom(p) => Formula::Atom(p.clone()),
            Formula::Not(a) => Formula::Not(go(a)),
            Formula::And(a, b) => Formula::And(go(a), go(b)),
            Formula::Or(a, b) => Formula::Or(go(a), go(b)),
            Formula::Imp(a, b) => Formula::Imp(go(a), go(b)),
            Formula::Iff(a, b) => Formula::Iff(go(a), go(b)),
            Formula::Know(j, v, a) => Formula::Know(j.clone(), f(*v), go(a)),
            Formula::Poss(j, v, a) => Formula::Poss(j.clone(), f(*v), go(a)),
            Formula::Rel(a, c) => Formula::Rel(go(a), c.clone()),
        }
    }

    /// Contexts an evaluation of `self` may consult: every relativization
    /// name plus the context of each agent whose operator sits under a
    /// relativization with a variant that refers to the subject.
    pub fn context_vocabulary(&self) -> BTreeSet<String> {
        fn walk(f: &Formula, under_rel: bool, out: &mut BTreeSet<String>) {
            match f {
                Formula::Rel(a, c) => {
                    out.insert(c.clone());
                    walk(a, true, out);
                }
                Formula::Know(j, v, a) | Formula::Poss(j, v, a) => {
                    if under_rel && Variant::resolve(*v) != Variant::V11 {
                        out.insert(agent_context(j));
                    }
                    walk(a, under_rel, out);
                }
                _ => {
                    for c in f.children() {
                        walk(c, under_rel, out);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, false, &mut out);
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula(self))
    }
}

/// Summary of the vocabulary and shape of a formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaInfo {
    pub atoms: BTreeSet<String>,
    pub agents: BTreeSet<String>,
    pub contexts: BTreeSet<String>,
    pub modal_depth: usize,
    pub is_el: bool,
    pub is_absolute: bool,
}

pub fn formula_info(f: &Formula) -> FormulaInfo {
    fn walk(f: &Formula, info: &mut FormulaInfo) {
        match f {
            Formula::Atom(p) => {
                info.atoms.insert(p.clone());
            }
            Formula::Know(j, _, _) | Formula::Poss(j, _, _) => {
                info.agents.insert(j.clone());
            }
            Formula::Rel(_, c) => {
                info.contexts.insert(c.clone());
            }
            _ => {}
        }
        for c in f.children() {
            walk(c, info);
        }
    }
    let mut info = FormulaInfo {
        atoms: BTreeSet::new(),
        agents: BTreeSet::new(),
        contexts: BTreeSet::new(),
        modal_depth: f.modal_depth(),
        is_el: f.is_el(),
        is_absolute: f.is_el(),
    };
    walk(f, &mut info);
    info
}

/// Atom or negated atom inside a context formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub atom: String,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: impl Into<String>) -> Literal {
        Literal {
            atom: atom.into(),
            positive: true,
        }
    }

    pub fn neg(atom: impl Into<String>) -> Literal {
        Literal {
            atom: atom.into(),
            positive: false,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            f.write_str(&self.atom)
        } else {
            write!(f, "~{}", self.atom)
        }
    }
}

/// Characteristic formula of a context: a conjunction of literals, ⊤ or ⊥.
///
/// Always canonical: literals sorted and deduplicated, an empty conjunction
/// is `Top`, a complementary pair collapses to `Bot`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ContextFormula {
    Top,
    Bot,
    Conj(Vec<Literal>),
}

impl ContextFormula {
    pub fn from_literals(lits: impl IntoIterator<Item = Literal>) -> ContextFormula {
        let set: BTreeSet<Literal> = lits.into_iter().collect();
        if set.is_empty() {
            return ContextFormula::Top;
        }
        if set
            .iter()
            .any(|l| l.positive && set.contains(&Literal::neg(l.atom.clone())))
        {
            return ContextFormula::Bot;
        }
        ContextFormula::Conj(set.into_iter().collect())
    }

    pub fn literals(&self) -> &[Literal] {
        match self {
            ContextFormula::Conj(l) => l,
            _ => &[],
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        self.literals().iter().map(|l| l.atom.clone()).collect()
    }

    /// Truth of the context under a valuation of its atoms.
    pub fn holds(&self, mut value: impl FnMut(&str) -> bool) -> bool {
        match self {
            ContextFormula::Top => true,
            ContextFormula::Bot => false,
            ContextFormula::Conj(lits) => lits.iter().all(|l| value(&l.atom) == l.positive),
        }
    }

    /// The context as an ordinary formula; `None` for ⊤ and ⊥, which have
    /// no counterpart in the formula language.
    pub fn to_formula(&self) -> Option<Formula> {
        let lits = self.literals();
        let mut it = lits.iter().map(|l| {
            if l.positive {
                Formula::atom(&l.atom)
            } else {
                Formula::not(Formula::atom(&l.atom))
            }
        });
        let first = it.next()?;
        Some(it.fold(first, Formula::and))
    }
}

impl fmt::Display for ContextFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContextFormula::Top => f.write_str("true"),
            ContextFormula::Bot => f.write_str("false"),
            ContextFormula::Conj(lits) => {
                for (k, l) in lits.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" & ")?;
                    }
                    write!(f, "{l}")?;
                }
                Ok(())
            }
        }
    }
}

impl Serialize for ContextFormula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ContextFormula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_context(&text).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render_formula(self))
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_formula(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn info_of_atom() {
        let info = formula_info(&Formula::atom("p"));
        assert!(info.is_el && info.is_absolute);
        assert_eq!(info.modal_depth, 0);
    }

    #[test]
    fn info_of_two_agent_thesis() {
        let f = parse_formula("K{i,1.1} K{j,1.1} a -> (K{i,1.1} a & K{j,1.1} a)").unwrap();
        let info = formula_info(&f);
        assert_eq!(
            info.agents,
            ["i", "j"].iter().map(|s| s.to_string()).collect()
        );
        assert_eq!(info.modal_depth, 2);
        assert!(info.is_el);
    }

    #[test]
    fn info_reports_only_explicit_contexts() {
        let f = Formula::rel(Formula::know("k", Variant::V22, Formula::atom("p")), "ci");
        let info = formula_info(&f);
        assert!(!info.is_el);
        assert_eq!(info.contexts, ["ci".to_string()].into_iter().collect());
        // the subject's context only shows up in the evaluation vocabulary
        assert!(f.context_vocabulary().contains("ck"));
    }

    #[test]
    fn variant_context_selection() {
        let pick = |v: Variant| {
            (
                v.condition_context("ci", "j").into_string(),
                v.continuation_context("ci", "j").into_string(),
            )
        };
        assert_eq!(pick(Variant::V11), ("ci".into(), "ci".into()));
        assert_eq!(pick(Variant::V12), ("ci".into(), "cj".into()));
        assert_eq!(pick(Variant::V21), ("cj".into(), "ci".into()));
        assert_eq!(pick(Variant::V22), ("cj".into(), "cj".into()));
    }

    #[test]
    fn replace_and_lookup_paths() {
        let f = parse_formula("p -> ~(q)^ci").unwrap();
        assert_eq!(
            f.at_path(&[1, 0]),
            Some(&Formula::rel(Formula::atom("q"), "ci"))
        );
        let g = f.replace_at(&[1, 0], Formula::atom("r")).unwrap();
        assert_eq!(g, parse_formula("p -> ~r").unwrap());
        assert!(f.at_path(&[0, 0]).is_none());
    }
}
