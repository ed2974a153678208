use std::collections::HashMap;

use serde::Serialize;

use super::state::MoveKey;
use super::{Actor, GameState, Move};

/// Default number of positions the solver may evaluate.
pub const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("dialogue search gave up after evaluating {explored} positions")]
pub struct SearchExhausted {
    pub explored: usize,
}

/// Positions are identified by the set of moves made, which fixes
/// everything the rules look at.
type PositionKey = Vec<u32>;

#[derive(Default)]
struct Table {
    ids: HashMap<MoveKey, u32>,
    /// `true` when P wins from the position.
    solved: HashMap<PositionKey, bool>,
}

impl Table {
    fn id(&mut self, k: MoveKey) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(k).or_insert(next)
    }

    fn lookup(&self, k: &MoveKey) -> Option<u32> {
        self.ids.get(k).copied()
    }
}

fn extend(key: &PositionKey, id: u32) -> PositionKey {
    let mut out = key.clone();
    let at = out.binary_search(&id).unwrap_or_else(|e| e);
    out.insert(at, id);
    out
}

struct Solver {
    table: Table,
    budget: usize,
    visited: usize,
}

impl Solver {
    fn solve(&mut self, s: &GameState, key: &PositionKey) -> Result<bool, SearchExhausted> {
        if let Some(&v) = self.table.solved.get(key) {
            return Ok(v);
        }
        if self.visited >= self.budget {
            return Err(SearchExhausted {
                explored: self.visited,
            });
        }
        self.visited += 1;
        let turn = s.turn();
        // P wins where O is stuck; every option must favour the mover's
        // opponent for the mover to lose.
        let mut result = turn == Actor::O || s.contradicted().is_some();
        for (m, k) in s.legal_moves_keyed() {
            let id = self.table.id(k);
            let child_key = extend(key, id);
            let child = s.push_unchecked(m);
            let p_wins = self.solve(&child, &child_key)?;
            if p_wins == (turn == Actor::P) {
                result = p_wins;
                break;
            }
        }
        self.table.solved.insert(key.clone(), result);
        Ok(result)
    }
}

/// A winning strategy for one player, found by exhaustive search.
pub struct Strategy {
    winner: Actor,
    root: GameState,
    table: Table,
}

impl std::fmt::Debug for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Strategy")
            .field("winner", &self.winner)
            .field("positions", &self.table.solved.len())
            .finish()
    }
}

/// A strategy unfolded into a tree: `reply` is the winner's move in this
/// position (absent when the loser is to move) and `branches` lists every
/// move the loser can make next, each with the continuation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrategyTree {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reply: Option<Move>,
    pub branches: Vec<(Move, StrategyTree)>,
}

impl Strategy {
    pub fn winner(&self) -> Actor {
        self.winner
    }

    /// Number of positions the search evaluated.
    pub fn positions(&self) -> usize {
        self.table.solved.len()
    }

    pub fn root(&self) -> &GameState {
        &self.root
    }

    fn key_of(&self, s: &GameState) -> Option<PositionKey> {
        let mut key: Vec<u32> = (0..s.len())
            .map(|k| self.table.lookup(&s.key_of(k)))
            .collect::<Option<_>>()?;
        key.sort_unstable();
        Some(key)
    }

    fn wins(&self, key: &PositionKey) -> Option<bool> {
        self.table
            .solved
            .get(key)
            .map(|&p| p == (self.winner == Actor::P))
    }

    /// The winner's move in `s`, if `s` is a position the strategy covers
    /// and it is the winner's turn.
    pub fn respond(&self, s: &GameState) -> Option<Move> {
        if s.turn() != self.winner {
            return None;
        }
        let key = self.key_of(s)?;
        s.legal_moves_keyed().into_iter().find_map(|(m, k)| {
            let id = self.table.lookup(&k)?;
            (self.wins(&extend(&key, id)) == Some(true)).then_some(m)
        })
    }

    /// The play in which the loser always takes its first legal move.
    pub fn principal_play(&self) -> GameState {
        let mut s = self.root.clone();
        loop {
            let next = if s.turn() == self.winner {
                self.respond(&s)
            } else {
                s.legal_moves().into_iter().next()
            };
            match next {
                Some(m) => s = s.push_unchecked(m),
                None => return s,
            }
        }
    }

    /// Unfolds the strategy; `None` if that takes more than `max_nodes`
    /// nodes.
    pub fn tree(&self, max_nodes: usize) -> Option<StrategyTree> {
        let mut left = max_nodes;
        self.unfold(&self.root, &mut left)
    }

    fn unfold(&self, s: &GameState, left: &mut usize) -> Option<StrategyTree> {
        *left = left.checked_sub(1)?;
        let (reply, s) = if s.turn() == self.winner {
            let m = self.respond(s)?;
            let next = s.push_unchecked(m.clone());
            (Some(m), next)
        } else {
            (None, s.clone())
        };
        let mut branches = Vec::new();
        for m in s.legal_moves() {
            let child = s.push_unchecked(m.clone());
            branches.push((m, self.unfold(&child, left)?));
        }
        Some(StrategyTree { reply, branches })
    }
}

/// Result of deciding a thesis by dialogue.
#[derive(Debug)]
pub enum DialogueOutcome {
    /// P can win whatever O does.
    ProponentWins(Strategy),
    /// O can win; `refutation` is one play O wins.
    OpponentWins {
        strategy: Strategy,
        refutation: GameState,
    },
}

impl DialogueOutcome {
    pub fn proponent_wins(&self) -> bool {
        matches!(self, DialogueOutcome::ProponentWins(_))
    }

    pub fn strategy(&self) -> &Strategy {
        match self {
            DialogueOutcome::ProponentWins(s)
            | DialogueOutcome::OpponentWins { strategy: s, .. } => s,
        }
    }

    /// The proponent's principal play, or O's refuting play.
    pub fn play(&self) -> GameState {
        match self {
            DialogueOutcome::ProponentWins(s) => s.principal_play(),
            DialogueOutcome::OpponentWins { refutation, .. } => refutation.clone(),
        }
    }
}

/// Decides who wins the game starting at `start`.
pub fn solve(start: &GameState, budget: usize) -> Result<DialogueOutcome, SearchExhausted> {
    let mut solver = Solver {
        table: Table::default(),
        budget,
        visited: 0,
    };
    let mut key: PositionKey = (0..start.len())
        .map(|k| solver.table.id(start.key_of(k)))
        .collect();
    key.sort_unstable();
    let p_wins = solver.solve(start, &key)?;
    let winner = if p_wins { Actor::P } else { Actor::O };
    let strategy = Strategy {
        winner,
        root: start.clone(),
        table: solver.table,
    };
    Ok(if p_wins {
        DialogueOutcome::ProponentWins(strategy)
    } else {
        let refutation = strategy.principal_play();
        DialogueOutcome::OpponentWins {
            strategy,
            refutation,
        }
    })
}
