use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::Label;
use crate::syntax::{parse_formula, Formula};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Actor {
    /// Proponent: defends the thesis.
    P,
    /// Opponent: challenges it.
    O,
}

impl Actor {
    pub fn other(self) -> Actor {
        match self {
            Actor::P => Actor::O,
            Actor::O => Actor::P,
        }
    }
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Actor::P => "P",
            Actor::O => "O",
        })
    }
}

/// What a move says.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Payload {
    Assert(Arc<Formula>),
    /// `?`: asks for one of the disjuncts.
    Which,
    /// `?L`
    Left,
    /// `?R`
    Right,
    /// `?K{agent}/world`: the attacker picks the world.
    KnowAt {
        agent: String,
        world: Label,
    },
    /// `?P{agent}`: the defender picks the world.
    PossAt {
        agent: String,
    },
}

impl Payload {
    pub fn assert(f: Formula) -> Payload {
        Payload::Assert(Arc::new(f))
    }

    pub fn formula(&self) -> Option<&Formula> {
        match self {
            Payload::Assert(f) => Some(f),
            _ => None,
        }
    }
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::Assert(x) => write!(f, "{x}"),
            Payload::Which => f.write_str("?"),
            Payload::Left => f.write_str("?L"),
            Payload::Right => f.write_str("?R"),
            Payload::KnowAt { agent, world } => write!(f, "?K{{{agent}}}/{world}"),
            Payload::PossAt { agent } => write!(f, "?P{{{agent}}}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("bad move payload `{text}`: {reason}")]
pub struct PayloadError {
    pub text: String,
    pub reason: String,
}

fn braced_agent(s: &str) -> Option<(&str, &str)> {
    let inner = s.strip_prefix('{')?;
    let close = inner.find('}')?;
    let agent = &inner[..close];
    let ok = !agent.is_empty()
        && agent
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_lowercase() || c == '_')
        && agent.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    ok.then(|| (agent, &inner[close + 1..]))
}

impl FromStr for Payload {
    type Err = PayloadError;

    fn from_str(s: &str) -> Result<Payload, PayloadError> {
        let err = |reason: String| PayloadError {
            text: s.to_string(),
            reason,
        };
        let t = s.trim();
        let Some(q) = t.strip_prefix('?') else {
            return parse_formula(t)
                .map(Payload::assert)
                .map_err(|e| err(e.to_string()));
        };
        match q {
            "" => Ok(Payload::Which),
            "L" => Ok(Payload::Left),
            "R" => Ok(Payload::Right),
            _ => {
                if let Some(rest) = q.strip_prefix('K') {
                    let (agent, rest) = braced_agent(rest)
                        .ok_or_else(|| err("expected `?K{agent}/world`".into()))?;
                    let world = rest
                        .strip_prefix('/')
                        .ok_or_else(|| err("expected `/world`".into()))?;
                    let world = world
                        .parse()
                        .map_err(|e: super::LabelError| err(e.to_string()))?;
                    Ok(Payload::KnowAt {
                        agent: agent.to_string(),
                        world,
                    })
                } else if let Some(rest) = q.strip_prefix('P') {
                    match braced_agent(rest) {
                        Some((agent, "")) => Ok(Payload::PossAt {
                            agent: agent.to_string(),
                        }),
                        _ => Err(err("expected `?P{agent}`".into())),
                    }
                } else {
                    Err(err("unknown question".into()))
                }
            }
        }
    }
}

impl Serialize for Payload {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Payload {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MoveKind {
    Thesis,
    /// Attack on the move with this index.
    Attack {
        target: usize,
    },
    /// Defence against the attack with this index.
    Defence {
        target: usize,
    },
}

/// One utterance: who says what, where, and in reply to which move.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub actor: Actor,
    #[serde(flatten)]
    pub kind: MoveKind,
    pub label: Label,
    pub payload: Payload,
}

impl Move {
    pub fn thesis(f: Formula) -> Move {
        Move {
            actor: Actor::P,
            kind: MoveKind::Thesis,
            label: Label::root(),
            payload: Payload::assert(f),
        }
    }

    pub fn attack(actor: Actor, target: usize, label: Label, payload: Payload) -> Move {
        Move {
            actor,
            kind: MoveKind::Attack { target },
            label,
            payload,
        }
    }

    pub fn defence(actor: Actor, target: usize, label: Label, payload: Payload) -> Move {
        Move {
            actor,
            kind: MoveKind::Defence { target },
            label,
            payload,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MoveKind::Thesis => write!(f, "{} {}: {}", self.actor, self.label, self.payload),
            MoveKind::Attack { target } => write!(
                f,
                "{} {}: {} [attacks {target}]",
                self.actor, self.label, self.payload
            ),
            MoveKind::Defence { target } => write!(
                f,
                "{} {}: {} [defends {target}]",
                self.actor, self.label, self.payload
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn payload_strings_round_trip() {
        for s in [
            "?",
            "?L",
            "?R",
            "?K{i}/1i1",
            "?P{bob}",
            "K{i,1.1} a -> a",
            "(p)^ci",
        ] {
            let p: Payload = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        for bad in ["?X", "?K{i}", "?K{}/1", "?P{i}x", "?K{i}/2", "a ->"] {
            assert!(bad.parse::<Payload>().is_err(), "{bad}");
        }
    }

    #[test]
    fn moves_serialize_flat() {
        let m = Move::attack(Actor::O, 2, Label::root(), "?K{i}/1i1".parse().unwrap());
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(
            json,
            r#"{"actor":"O","kind":"attack","target":2,"label":"1","payload":"?K{i}/1i1"}"#
        );
        assert_eq!(serde_json::from_str::<Move>(&json).unwrap(), m);
    }
}
