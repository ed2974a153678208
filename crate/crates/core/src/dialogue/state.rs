use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::particle::{answer, challenges, fits, Answer, Challenge};
use super::{Actor, Label, Move, MoveKind, Payload};
use crate::kripke::ContextEnv;
use crate::syntax::{ContextFormula, Formula};

/// The structural rule a rejected move breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    /// Players alternate, P opens with the thesis.
    #[serde(rename = "PL-0")]
    Pl0,
    /// No move may repeat an earlier one.
    #[serde(rename = "PL-2")]
    Pl2,
    /// P asserts atoms only after O has.
    #[serde(rename = "PL-3")]
    Pl3,
    /// Which moves may be attacked or defended, and how often.
    #[serde(rename = "PL-4c")]
    Pl4c,
    /// Worlds: only introduced ones for P, fresh or witness ones for O.
    #[serde(rename = "ML-frw")]
    MlFrw,
    /// P asserts a context only after O has, or when O is committed to its body.
    #[serde(rename = "ML-frc")]
    MlFrc,
    /// World choices stay inside the agent's class.
    #[serde(rename = "ML-S5")]
    MlS5,
    /// O answers only the move P has just made.
    #[serde(rename = "O-reply")]
    Reply,
    #[serde(rename = "particle")]
    Particle,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Pl0 => "PL-0",
            Rule::Pl2 => "PL-2",
            Rule::Pl3 => "PL-3",
            Rule::Pl4c => "PL-4c",
            Rule::MlFrw => "ML-frw",
            Rule::MlFrc => "ML-frc",
            Rule::MlS5 => "ML-S5",
            Rule::Reply => "O-reply",
            Rule::Particle => "particle rule",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{rule}: {message}")]
pub struct MoveError {
    pub rule: Rule,
    pub message: String,
}

fn fail<T>(rule: Rule, message: impl Into<String>) -> Result<T, MoveError> {
    Err(MoveError {
        rule,
        message: message.into(),
    })
}

/// Settings fixed for a whole game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameConfig {
    /// Bodies of bound contexts; P may cite a bound context once O is
    /// committed to every literal of its body.
    pub env: ContextEnv,
    /// Worlds O introduces are at most this many steps deeper than the
    /// modal depth of the thesis.
    pub slack: usize,
}

impl Default for GameConfig {
    fn default() -> GameConfig {
        GameConfig {
            env: ContextEnv::fresh(),
            slack: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct AttackKey {
    actor: Actor,
    label: Label,
    target: Arc<Formula>,
    payload: Payload,
}

/// A move up to the index it points at: equal keys are the same move for
/// the repetition rules.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum MoveKey {
    Thesis(Arc<Formula>),
    Attack(AttackKey),
    Defence {
        actor: Actor,
        attack: AttackKey,
        label: Label,
        payload: Payload,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct WitnessKey {
    agent: String,
    top: Vec<(String, u32)>,
    demand: Arc<Formula>,
    know: bool,
}

/// Everything the rules need to know about a history.
#[derive(Default)]
struct Facts {
    keys: HashSet<MoveKey>,
    per_move: Vec<MoveKey>,
    introduced: BTreeSet<Label>,
    o_pos: HashMap<Label, HashSet<String>>,
    o_neg: HashMap<Label, HashSet<String>>,
    o_absurd: HashSet<Label>,
    asserted: HashSet<(Actor, Label, Arc<Formula>)>,
    o_attacked: HashSet<(Label, Arc<Formula>)>,
    o_defended: HashSet<AttackKey>,
    witness: HashMap<WitnessKey, Label>,
}

/// A position: the moves made so far.
#[derive(Clone, Debug)]
pub struct GameState {
    config: Arc<GameConfig>,
    depth_cap: usize,
    history: Vec<Arc<Move>>,
}

pub fn initial_state(thesis: &Formula) -> GameState {
    initial_state_with(thesis, GameConfig::default())
}

pub fn initial_state_with(thesis: &Formula, config: GameConfig) -> GameState {
    let depth_cap = thesis.modal_depth() + config.slack;
    GameState {
        config: Arc::new(config),
        depth_cap,
        history: vec![Arc::new(Move::thesis(thesis.clone()))],
    }
}

impl GameState {
    pub fn thesis(&self) -> &Formula {
        self.history[0]
            .payload
            .formula()
            .expect("the thesis is an assertion")
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn history(&self) -> impl ExactSizeIterator<Item = &Move> {
        self.history.iter().map(|m| &**m)
    }

    pub fn moves(&self) -> Vec<Move> {
        self.history().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.history.len()
    }

    pub fn is_empty(&self) -> bool {
        self.history.is_empty()
    }

    /// Who moves next.
    pub fn turn(&self) -> Actor {
        if self.history.len() % 2 == 1 {
            Actor::O
        } else {
            Actor::P
        }
    }

    /// The winner if the player to move is stuck.
    pub fn winner(&self) -> Option<Actor> {
        if self.contradicted().is_some() {
            return Some(Actor::P);
        }
        self.legal_moves().is_empty().then(|| self.turn().other())
    }

    /// A world at which O's literal commitments clash, through a context
    /// body bound to `false` or a literal and its negation. Such a play is
    /// over and P has won it.
    pub fn contradicted(&self) -> Option<Label> {
        self.facts().o_absurd.into_iter().min()
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        let facts = self.facts();
        if !facts.o_absurd.is_empty() {
            return Vec::new();
        }
        self.candidates(&facts)
            .into_iter()
            .filter(|m| self.validate(&facts, m).is_ok())
            .collect()
    }

    /// Legal moves with their repetition keys, for the solver.
    pub(crate) fn legal_moves_keyed(&self) -> Vec<(Move, MoveKey)> {
        let facts = self.facts();
        if !facts.o_absurd.is_empty() {
            return Vec::new();
        }
        self.candidates(&facts)
            .into_iter()
            .filter_map(|m| self.validate(&facts, &m).ok().map(|k| (m, k)))
            .collect()
    }

    pub(crate) fn key_of(&self, index: usize) -> MoveKey {
        self.facts().per_move[index].clone()
    }

    pub fn apply_move(&self, m: &Move) -> Result<GameState, MoveError> {
        let facts = self.facts();
        self.validate(&facts, m)?;
        Ok(self.push_unchecked(m.clone()))
    }

    pub(crate) fn push_unchecked(&self, m: Move) -> GameState {
        let mut next = self.clone();
        next.history.push(Arc::new(m));
        next
    }

    fn facts(&self) -> Facts {
        let mut facts = Facts::default();
        facts.introduced.insert(Label::root());
        for (k, m) in self.history.iter().enumerate() {
            let key = self.key_with(&facts.per_move, k);
            facts.introduced.insert(m.label.clone());
            if let (Actor::O, Payload::KnowAt { world, .. }) = (m.actor, &m.payload) {
                facts.introduced.insert(world.clone());
            }
            if let Payload::Assert(f) = &m.payload {
                facts.asserted.insert((m.actor, m.label.clone(), f.clone()));
            }
            if m.actor == Actor::O {
                if let Some(Formula::Atom(n)) = m.payload.formula() {
                    self.commit(&mut facts, &m.label, n);
                }
                match (&key, m.kind) {
                    (MoveKey::Attack(a), _) => {
                        facts.o_attacked.insert((a.label.clone(), a.target.clone()));
                        if let (Formula::Know(j, _, body), Payload::KnowAt { world, .. }) =
                            (&*a.target, &a.payload)
                        {
                            let wk = witness_key(j, &a.label, body, true);
                            facts.witness.entry(wk).or_insert_with(|| world.clone());
                        }
                    }
                    (MoveKey::Defence { attack, label, .. }, _) => {
                        facts.o_defended.insert(attack.clone());
                        if let (Formula::Poss(j, _, body), Payload::PossAt { .. }) =
                            (&*attack.target, &attack.payload)
                        {
                            let wk = witness_key(j, &attack.label, body, false);
                            facts.witness.entry(wk).or_insert_with(|| label.clone());
                        }
                    }
                    _ => {}
                }
            }
            facts.keys.insert(key.clone());
            facts.per_move.push(key);
        }
        facts
    }

    fn commit(&self, facts: &mut Facts, at: &Label, name: &str) {
        facts
            .o_pos
            .entry(at.clone())
            .or_default()
            .insert(name.to_string());
        match self.config.env.get(name) {
            Some(ContextFormula::Bot) => {
                facts.o_absurd.insert(at.clone());
            }
            Some(body) => {
                for l in body.literals() {
                    let side = if l.positive {
                        &mut facts.o_pos
                    } else {
                        &mut facts.o_neg
                    };
                    side.entry(at.clone()).or_default().insert(l.atom.clone());
                }
            }
            None => {}
        }
        let pos = facts.o_pos.get(at);
        let clash = facts
            .o_neg
            .get(at)
            .is_some_and(|neg| pos.is_some_and(|pos| !neg.is_disjoint(pos)));
        if clash {
            facts.o_absurd.insert(at.clone());
        }
    }

    /// Key of the `k`-th move given the keys of its predecessors.
    fn key_with(&self, earlier: &[MoveKey], k: usize) -> MoveKey {
        let m = &self.history[k];
        match m.kind {
            MoveKind::Thesis => MoveKey::Thesis(assertion(&m.payload)),
            MoveKind::Attack { target } => MoveKey::Attack(self.attack_key(m, target)),
            MoveKind::Defence { target } => match &earlier[target] {
                MoveKey::Attack(a) => MoveKey::Defence {
                    actor: m.actor,
                    attack: a.clone(),
                    label: m.label.clone(),
                    payload: m.payload.clone(),
                },
                _ => unreachable!("defences answer attacks"),
            },
        }
    }

    fn attack_key(&self, m: &Move, target: usize) -> AttackKey {
        let t = &self.history[target];
        AttackKey {
            actor: m.actor,
            label: t.label.clone(),
            target: assertion(&t.payload),
            payload: m.payload.clone(),
        }
    }

    fn is_context_name(&self, name: &str) -> bool {
        self.config.env.is_bound(name) || self.thesis().context_vocabulary().contains(name)
    }

    /// Whether P may assert atom `name` at `at`.
    fn p_may_assert(&self, facts: &Facts, name: &str, at: &Label) -> bool {
        if facts.o_pos.get(at).is_some_and(|s| s.contains(name)) {
            return true;
        }
        match self.config.env.get(name) {
            Some(ContextFormula::Top) => true,
            Some(ContextFormula::Bot) | None => false,
            Some(body) => body.literals().iter().all(|l| {
                let side = if l.positive {
                    &facts.o_pos
                } else {
                    &facts.o_neg
                };
                side.get(at).is_some_and(|s| s.contains(&l.atom))
            }),
        }
    }

    fn check_atom(&self, facts: &Facts, m: &Move) -> Result<(), MoveError> {
        if m.actor == Actor::P {
            if let Some(Formula::Atom(n)) = m.payload.formula() {
                if !self.p_may_assert(facts, n, &m.label) {
                    let rule = if self.is_context_name(n) {
                        Rule::MlFrc
                    } else {
                        Rule::Pl3
                    };
                    return fail(rule, format!("O has not conceded `{n}` at {}", m.label));
                }
            }
        }
        Ok(())
    }

    /// Worlds O may pick for a demand on `agent` from `at`: its earlier
    /// witness for the same demand in the same class, else a fresh child
    /// while the depth bound allows, else any world of the class.
    fn o_worlds(
        &self,
        facts: &Facts,
        agent: &str,
        at: &Label,
        demand: &Formula,
        know: bool,
    ) -> Vec<Label> {
        if let Some(w) = facts.witness.get(&witness_key(agent, at, demand, know)) {
            return vec![w.clone()];
        }
        if at.depth() < self.depth_cap {
            let children = facts
                .introduced
                .iter()
                .filter(|l| l.parent().is_some_and(|(p, a, _)| &p == at && a == agent))
                .count();
            return vec![at.child(agent, children as u32 + 1)];
        }
        self.class(facts, agent, at)
    }

    fn class(&self, facts: &Facts, agent: &str, at: &Label) -> Vec<Label> {
        facts
            .introduced
            .iter()
            .filter(|l| l.same_class(at, agent))
            .cloned()
            .collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn check_world(
        &self,
        facts: &Facts,
        actor: Actor,
        agent: &str,
        at: &Label,
        w: &Label,
        demand: &Formula,
        know: bool,
    ) -> Result<(), MoveError> {
        match actor {
            Actor::P if !facts.introduced.contains(w) => fail(Rule::MlFrw, format!("world {w} has not been introduced by O")),
            Actor::P if !w.same_class(at, agent) => fail(Rule::MlS5, format!("{w} is not in {agent}'s class of {at}")),
            Actor::P => Ok(()),
            Actor::O if !self.o_worlds(facts, agent, at, demand, know).contains(w) => fail(
                Rule::MlFrw,
                format!("O must introduce a fresh {agent}-world from {at} or reuse its witness, not {w}"),
            ),
            Actor::O => Ok(()),
        }
    }

    fn validate(&self, facts: &Facts, m: &Move) -> Result<MoveKey, MoveError> {
        let turn = self.turn();
        if m.actor != turn {
            return fail(Rule::Pl0, format!("it is {turn}'s turn"));
        }
        if let (Actor::O, MoveKind::Attack { target } | MoveKind::Defence { target }) =
            (m.actor, m.kind)
        {
            if target + 1 != self.history.len() {
                return fail(
                    Rule::Reply,
                    format!(
                        "O must answer move {}, not {target}",
                        self.history.len() - 1
                    ),
                );
            }
        }
        if let (Actor::P, Payload::Assert(g)) = (m.actor, &m.payload) {
            if !g.is_atom()
                && facts
                    .asserted
                    .contains(&(Actor::P, m.label.clone(), g.clone()))
            {
                return fail(
                    Rule::Pl2,
                    format!("P has already asserted {g} at {}", m.label),
                );
            }
        }
        let key = match m.kind {
            MoveKind::Thesis => return fail(Rule::Pl0, "only the opening move states the thesis"),
            MoveKind::Attack { target } => {
                let t = self.target(target)?;
                if t.actor == m.actor {
                    return fail(Rule::Pl4c, "players attack only the other player's moves");
                }
                let Payload::Assert(f) = &t.payload else {
                    return fail(
                        Rule::Particle,
                        format!("move {target} is a question and cannot be attacked"),
                    );
                };
                if f.is_atom() {
                    return fail(Rule::Pl3, format!("the atom {f} cannot be attacked"));
                }
                if m.label != t.label {
                    return fail(
                        Rule::Particle,
                        format!("an attack on move {target} is made at {}", t.label),
                    );
                }
                let ch = challenges(f).into_iter().find(|c| fits(c, &m.payload));
                let Some(ch) = ch else {
                    return fail(
                        Rule::Particle,
                        format!("`{}` is not an attack on {f}", m.payload),
                    );
                };
                if let (
                    Challenge::Know(j),
                    Payload::KnowAt { world, .. },
                    Formula::Know(_, _, body),
                ) = (&ch, &m.payload, &**f)
                {
                    self.check_world(facts, m.actor, j, &t.label, world, body, true)?;
                }
                self.check_atom(facts, m)?;
                let key = self.attack_key(m, target);
                if m.actor == Actor::O
                    && facts
                        .o_attacked
                        .contains(&(key.label.clone(), key.target.clone()))
                {
                    return fail(
                        Rule::Pl4c,
                        format!("O has already attacked {f} at {}", t.label),
                    );
                }
                MoveKey::Attack(key)
            }
            MoveKind::Defence { target } => {
                let a = self.target(target)?;
                let MoveKind::Attack { target: asserted } = a.kind else {
                    return fail(Rule::Pl4c, format!("move {target} is not an attack"));
                };
                if a.actor == m.actor {
                    return fail(
                        Rule::Pl4c,
                        "players defend only against the other player's attacks",
                    );
                }
                let t = &self.history[asserted];
                let f = t.payload.formula().expect("attacks target assertions");
                let Some(ans) = answer(f, &a.payload) else {
                    return fail(
                        Rule::Particle,
                        format!("the attack {} on {f} admits no defence", a.payload),
                    );
                };
                let Payload::Assert(g) = &m.payload else {
                    return fail(Rule::Particle, "a defence asserts a formula");
                };
                let (ok, at) = match &ans {
                    Answer::Here(h) => (h == &**g, t.label.clone()),
                    Answer::OneOf(hs) => (hs.iter().any(|h| h == &**g), t.label.clone()),
                    Answer::At(w, h) => (h == &**g, w.clone()),
                    Answer::Chosen(_, h) => (h == &**g, m.label.clone()),
                };
                if !ok {
                    return fail(
                        Rule::Particle,
                        format!("{g} does not answer {} on {f}", a.payload),
                    );
                }
                if m.label != at {
                    return fail(
                        Rule::Particle,
                        format!("the defence belongs at {at}, not {}", m.label),
                    );
                }
                if let (Answer::Chosen(j, _), Formula::Poss(_, _, body)) = (&ans, f) {
                    self.check_world(facts, m.actor, j, &t.label, &m.label, body, false)?;
                }
                self.check_atom(facts, m)?;
                let attack = match &facts.per_move[target] {
                    MoveKey::Attack(k) => k.clone(),
                    _ => unreachable!(),
                };
                if m.actor == Actor::O && facts.o_defended.contains(&attack) {
                    return fail(
                        Rule::Pl4c,
                        format!("O has already answered the attack {target}"),
                    );
                }
                MoveKey::Defence {
                    actor: m.actor,
                    attack,
                    label: m.label.clone(),
                    payload: m.payload.clone(),
                }
            }
        };
        if facts.keys.contains(&key) {
            return fail(Rule::Pl2, "the move repeats an earlier one");
        }
        Ok(key)
    }

    fn target(&self, index: usize) -> Result<&Move, MoveError> {
        match self.history.get(index) {
            Some(t) => Ok(t),
            None => fail(Rule::Pl4c, format!("there is no move {index}")),
        }
    }

    /// Moves the particle rules allow for the player to move, before the
    /// structural filters.
    fn candidates(&self, facts: &Facts) -> Vec<Move> {
        let me = self.turn();
        let mut defences = Vec::new();
        let mut attacks = Vec::new();
        let mut seen_attacks = HashSet::new();
        let mut seen_targets = HashSet::new();
        let first = if me == Actor::O {
            self.history.len() - 1
        } else {
            0
        };
        for (k, m) in self.history.iter().enumerate().skip(first) {
            if m.actor == me {
                continue;
            }
            if let MoveKind::Attack { target } = m.kind {
                let t = &self.history[target];
                let fresh = seen_attacks.insert(&facts.per_move[k]);
                if let (true, Some(f)) = (fresh, t.payload.formula()) {
                    if let Some(ans) = answer(f, &m.payload) {
                        let mut say = |label: Label, g: Formula| {
                            defences.push(Move::defence(me, k, label, Payload::assert(g)));
                        };
                        match ans {
                            Answer::Here(g) => say(t.label.clone(), g),
                            Answer::OneOf(gs) => {
                                gs.into_iter().for_each(|g| say(t.label.clone(), g))
                            }
                            Answer::At(w, g) => say(w, g),
                            Answer::Chosen(j, g) => {
                                let worlds = match me {
                                    Actor::P => self.class(facts, &j, &t.label),
                                    Actor::O => self.o_worlds(facts, &j, &t.label, &g, false),
                                };
                                for w in worlds {
                                    say(w, g.clone());
                                }
                            }
                        }
                    }
                }
            }
            if let Payload::Assert(f) = &m.payload {
                if seen_targets.insert((&m.label, f)) {
                    for ch in challenges(f) {
                        let payloads = match ch {
                            Challenge::Assert(g) => vec![Payload::assert(g)],
                            Challenge::Which => vec![Payload::Which],
                            Challenge::Left => vec![Payload::Left],
                            Challenge::Right => vec![Payload::Right],
                            Challenge::Poss(agent) => vec![Payload::PossAt { agent }],
                            Challenge::Know(agent) => {
                                let Formula::Know(_, _, body) = &**f else {
                                    unreachable!()
                                };
                                let worlds = match me {
                                    Actor::P => self.class(facts, &agent, &m.label),
                                    Actor::O => self.o_worlds(facts, &agent, &m.label, body, true),
                                };
                                worlds
                                    .into_iter()
                                    .map(|world| Payload::KnowAt {
                                        agent: agent.clone(),
                                        world,
                                    })
                                    .collect()
                            }
                        };
                        for p in payloads {
                            attacks.push(Move::attack(me, k, m.label.clone(), p));
                        }
                    }
                }
            }
        }
        defences.extend(attacks);
        defences
    }
}

fn assertion(p: &Payload) -> Arc<Formula> {
    match p {
        Payload::Assert(f) => f.clone(),
        _ => unreachable!("only assertions are attacked"),
    }
}

fn witness_key(agent: &str, at: &Label, demand: &Formula, know: bool) -> WitnessKey {
    WitnessKey {
        agent: agent.to_string(),
        top: at.top(agent).to_vec(),
        demand: Arc::new(demand.clone()),
        know,
    }
}
