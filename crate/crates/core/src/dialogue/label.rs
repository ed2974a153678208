use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A world name in the style `1i1j2`: the root `1` followed by one
/// `(agent, index)` step per world introduction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Label {
    steps: Vec<(String, u32)>,
}

impl Label {
    pub fn root() -> Label {
        Label::default()
    }

    pub fn child(&self, agent: &str, index: u32) -> Label {
        let mut steps = self.steps.clone();
        steps.push((agent.to_string(), index));
        Label { steps }
    }

    pub fn steps(&self) -> &[(String, u32)] {
        &self.steps
    }

    /// Number of steps from the root.
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn parent(&self) -> Option<(Label, &str, u32)> {
        let ((agent, index), rest) = self.steps.split_last()?;
        Some((
            Label {
                steps: rest.to_vec(),
            },
            agent,
            *index,
        ))
    }

    /// The label with every trailing step by `agent` removed. Two labels
    /// share an `agent`-class exactly when their tops coincide.
    pub fn top(&self, agent: &str) -> &[(String, u32)] {
        let keep = self
            .steps
            .iter()
            .rposition(|(a, _)| a != agent)
            .map_or(0, |k| k + 1);
        &self.steps[..keep]
    }

    pub fn same_class(&self, other: &Label, agent: &str) -> bool {
        self.top(agent) == other.top(agent)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("1")?;
        for (agent, index) in &self.steps {
            write!(f, "{agent}{index}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` is not a world label (expected `1` followed by agent/index steps, e.g. `1i1j2`)")]
pub struct LabelError(pub String);

impl FromStr for Label {
    type Err = LabelError;

    /// Agent names inside labels are read as maximal runs of letters and
    /// underscores, so agents whose names contain digits cannot be used.
    fn from_str(s: &str) -> Result<Label, LabelError> {
        let err = || LabelError(s.to_string());
        let rest = s.strip_prefix('1').ok_or_else(err)?;
        let mut steps = Vec::new();
        let mut chars = rest.chars().peekable();
        while chars.peek().is_some() {
            let mut agent = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphabetic() || c == '_' {
                    agent.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            let mut digits = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    digits.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            if agent.is_empty() || digits.is_empty() {
                return Err(err());
            }
            let index: u32 = digits.parse().map_err(|_| err())?;
            if index == 0 {
                return Err(err());
            }
            steps.push((agent, index));
        }
        Ok(Label { steps })
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}
