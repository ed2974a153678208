//! Dialogical games for contextual epistemic logic: a proponent defends a
//! thesis against an opponent, move by move, on labelled worlds.
//!
//! A thesis is valid when the proponent has a winning strategy; the solver
//! decides this by exhaustive search over positions.

mod label;
mod moves;
mod particle;
mod script;
mod search;
mod state;
mod transcript;

pub use label::{Label, LabelError};
pub use moves::{Actor, Move, MoveKind, Payload, PayloadError};
pub use script::{reference_plays, replay, PlayScript, ReplayError};
pub use search::{solve, DialogueOutcome, SearchExhausted, Strategy, StrategyTree, DEFAULT_BUDGET};
pub use state::{initial_state, initial_state_with, GameConfig, GameState, MoveError, Rule};
pub use transcript::{render_transcript, TranscriptStyle};

use crate::syntax::Formula;

/// Decides `thesis` with the default configuration and budget.
pub fn has_winning_strategy(thesis: &Formula) -> Result<DialogueOutcome, SearchExhausted> {
    has_winning_strategy_with(thesis, GameConfig::default(), DEFAULT_BUDGET)
}

pub fn has_winning_strategy_with(
    thesis: &Formula,
    config: GameConfig,
    budget: usize,
) -> Result<DialogueOutcome, SearchExhausted> {
    solve(&initial_state_with(thesis, config), budget)
}
