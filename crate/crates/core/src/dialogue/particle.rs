//! Local meaning of each connective: how an assertion may be challenged
//! and what answers a challenge.

use crate::syntax::{Formula, Variant};

use super::{Label, Payload};

/// Shape of an admissible attack on an assertion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Challenge {
    Assert(Formula),
    Which,
    Left,
    Right,
    /// `?K{agent}/w` for a world chosen by the attacker.
    Know(String),
    Poss(String),
}

/// What the defender must assert in reply to a challenge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Answer {
    Here(Formula),
    OneOf(Vec<Formula>),
    At(Label, Formula),
    /// The formula at a world of the agent's class chosen by the defender.
    Chosen(String, Formula),
}

pub(crate) fn challenges(f: &Formula) -> Vec<Challenge> {
    match f {
        Formula::Atom(_) => vec![],
        Formula::Not(a) | Formula::Imp(a, _) => vec![Challenge::Assert((**a).clone())],
        Formula::And(..) | Formula::Iff(..) => vec![Challenge::Left, Challenge::Right],
        Formula::Or(..) => vec![Challenge::Which],
        Formula::Know(j, ..) => vec![Challenge::Know(j.clone())],
        Formula::Poss(j, ..) => vec![Challenge::Poss(j.clone())],
        Formula::Rel(body, c) => match &**body {
            Formula::And(..) | Formula::Iff(..) => vec![Challenge::Left, Challenge::Right],
            Formula::Know(j, v, _) => {
                let guard = Variant::resolve(*v).condition_context(c, j).into_string();
                vec![Challenge::Assert(Formula::Atom(guard))]
            }
            _ => vec![Challenge::Assert(Formula::atom(c.as_str()))],
        },
    }
}

pub(crate) fn fits(ch: &Challenge, p: &Payload) -> bool {
    match (ch, p) {
        (Challenge::Assert(f), Payload::Assert(g)) => f == &**g,
        (Challenge::Which, Payload::Which)
        | (Challenge::Left, Payload::Left)
        | (Challenge::Right, Payload::Right) => true,
        (Challenge::Know(j), Payload::KnowAt { agent, .. })
        | (Challenge::Poss(j), Payload::PossAt { agent }) => j == agent,
        _ => false,
    }
}

/// The answer to an admissible attack `attack` on `f`, or `None` when the
/// attack cannot be answered (negations) or does not fit `f`.
pub(crate) fn answer(f: &Formula, attack: &Payload) -> Option<Answer> {
    use Formula as F;
    let rel = |g: &Formula, c: &str| Formula::rel(g.clone(), c);
    Some(match (f, attack) {
        (F::And(a, _), Payload::Left) => Answer::Here((**a).clone()),
        (F::And(_, b), Payload::Right) => Answer::Here((**b).clone()),
        (F::Iff(a, b), Payload::Left) => Answer::Here(F::imp((**a).clone(), (**b).clone())),
        (F::Iff(a, b), Payload::Right) => Answer::Here(F::imp((**b).clone(), (**a).clone())),
        (F::Or(a, b), Payload::Which) => Answer::OneOf(vec![(**a).clone(), (**b).clone()]),
        (F::Imp(_, b), Payload::Assert(_)) => Answer::Here((**b).clone()),
        (F::Know(j, _, a), Payload::KnowAt { agent, world }) if j == agent => {
            Answer::At(world.clone(), (**a).clone())
        }
        (F::Poss(j, _, a), Payload::PossAt { agent }) if j == agent => {
            Answer::Chosen(j.clone(), (**a).clone())
        }
        (F::Rel(body, c), _) => match (&**body, attack) {
            (F::And(a, _), Payload::Left) => Answer::Here(rel(a, c)),
            (F::And(_, b), Payload::Right) => Answer::Here(rel(b, c)),
            (F::Iff(a, b), Payload::Left) => {
                Answer::Here(rel(&F::imp((**a).clone(), (**b).clone()), c))
            }
            (F::Iff(a, b), Payload::Right) => {
                Answer::Here(rel(&F::imp((**b).clone(), (**a).clone()), c))
            }
            (_, Payload::Assert(_)) => Answer::Here(match &**body {
                F::Atom(_) | F::Rel(..) => (**body).clone(),
                F::Not(a) => F::not(rel(a, c)),
                F::Or(a, b) => F::or(rel(a, c), rel(b, c)),
                F::Imp(a, b) => F::imp(rel(a, c), rel(b, c)),
                F::Know(j, v, a) => {
                    let next = Variant::resolve(*v)
                        .continuation_context(c, j)
                        .into_string();
                    F::Know(j.clone(), *v, Box::new(rel(a, &next)))
                }
                F::Poss(j, v, a) => F::not(rel(
                    &F::Know(j.clone(), *v, Box::new(F::not((**a).clone()))),
                    c,
                )),
                F::And(..) | F::Iff(..) => return None,
            }),
            _ => return None,
        },
        _ => return None,
    })
}
