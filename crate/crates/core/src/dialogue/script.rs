use serde::{Deserialize, Serialize};

use super::{initial_state_with, Actor, GameConfig, GameState, Move, MoveError, MoveKind, Rule};

/// A play written down move by move, thesis first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayScript {
    #[serde(default)]
    pub title: String,
    /// The player the play is expected to end in favour of.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub winner: Option<Actor>,
    pub moves: Vec<Move>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("move {index}: {error}")]
pub struct ReplayError {
    pub index: usize,
    pub error: MoveError,
}

/// Plays `moves` from the start, checking every move.
pub fn replay(moves: &[Move], config: GameConfig) -> Result<GameState, ReplayError> {
    let Some(first) = moves.first() else {
        return Err(ReplayError {
            index: 0,
            error: MoveError {
                rule: Rule::Pl0,
                message: "a play opens with the thesis".into(),
            },
        });
    };
    let thesis = match (&first.kind, first.actor, first.payload.formula()) {
        (MoveKind::Thesis, Actor::P, Some(f)) if first.label.depth() == 0 => f.clone(),
        _ => {
            let error = MoveError {
                rule: Rule::Pl0,
                message: "a play opens with P stating the thesis at 1".into(),
            };
            return Err(ReplayError { index: 0, error });
        }
    };
    let mut s = initial_state_with(&thesis, config);
    for (index, m) in moves.iter().enumerate().skip(1) {
        s = s
            .apply_move(m)
            .map_err(|error| ReplayError { index, error })?;
    }
    Ok(s)
}

const PLAYS: [(&str, &str); 11] = [
    ("ex1", include_str!("plays/ex1.json")),
    ("ex2-left", include_str!("plays/ex2-left.json")),
    ("ex2-right", include_str!("plays/ex2-right.json")),
    ("ex4", include_str!("plays/ex4.json")),
    ("ex5", include_str!("plays/ex5.json")),
    ("negation-1", include_str!("plays/negation-1.json")),
    ("negation-2", include_str!("plays/negation-2.json")),
    ("factivity-1.1", include_str!("plays/factivity-1.1.json")),
    ("factivity-1.2", include_str!("plays/factivity-1.2.json")),
    ("factivity-2.2", include_str!("plays/factivity-2.2.json")),
    ("mixed-agents", include_str!("plays/mixed-agents.json")),
];

/// The worked plays shipped with the library, by name.
pub fn reference_plays() -> Vec<(&'static str, PlayScript)> {
    PLAYS
        .iter()
        .map(|(name, json)| {
            (
                *name,
                serde_json::from_str(json).unwrap_or_else(|e| panic!("play {name}: {e}")),
            )
        })
        .collect()
}
