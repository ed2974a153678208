use num_bigint::BigUint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cel::corpus::{random_formula, results_corpus, GenParams};
use cel::dialogue::{has_winning_strategy, initial_state, Actor};
use cel::reduce::reduce_full;
use cel::syntax::{parse_context, parse_formula, render_formula, ContextFormula, Formula, Literal};

fn formula(seed: u64, depth: usize) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_formula(&mut rng, &GenParams::small(depth), depth)
}

/// Size that a relativization's body contributes to the measure.
fn weight(f: &Formula) -> u32 {
    match f {
        Formula::Atom(_) => 1,
        Formula::Not(a) | Formula::Know(_, _, a) | Formula::Rel(a, _) => weight(a) + 1,
        Formula::Poss(_, _, a) => weight(a) + 4,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => weight(a) + weight(b) + 1,
        Formula::Iff(a, b) => 2 * (weight(a) + weight(b)) + 4,
    }
}

/// Sum over relativization nodes of 3 to the weight of their body.
fn measure(f: &Formula) -> BigUint {
    let own = match f {
        Formula::Rel(a, _) => BigUint::from(3u32).pow(weight(a)),
        _ => BigUint::from(0u32),
    };
    f.children()
        .into_iter()
        .map(measure)
        .fold(own, |acc, m| acc + m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn render_then_parse_is_identity(seed in any::<u64>(), depth in 0usize..6) {
        let f = formula(seed, depth);
        let text = render_formula(&f);
        prop_assert_eq!(parse_formula(&text).unwrap(), f);
    }

    #[test]
    fn context_formulas_round_trip(lits in prop::collection::vec(("[a-z][a-z0-9_]{0,3}", any::<bool>()), 0..5)) {
        let c = ContextFormula::from_literals(lits.into_iter().map(|(atom, pos)| {
            if pos { Literal::pos(atom) } else { Literal::neg(atom) }
        }));
        prop_assert_eq!(parse_context(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn every_rewrite_lowers_the_measure(seed in any::<u64>(), depth in 1usize..6) {
        let f = formula(seed, depth);
        let trace = reduce_full(&f).unwrap();
        for step in &trace.steps {
            prop_assert!(measure(&step.after) < measure(&step.before), "{}", step.axiom);
        }
        prop_assert_eq!(measure(&trace.result), BigUint::from(0u32));
    }
}

/// Plays the winner's strategy against a loser choosing uniformly among
/// its legal moves, and checks the winner always wins.
#[test]
fn strategies_win_against_random_opponents() {
    let theses: Vec<Formula> = results_corpus().into_iter().map(|e| e.formula).collect();
    let outcomes: Vec<_> = theses
        .iter()
        .map(|f| has_winning_strategy(f).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut plays = [0usize; 2];
    for round in 0..1000 {
        let k = round % theses.len();
        let strategy = outcomes[k].strategy();
        let winner = strategy.winner();
        let mut s = initial_state(&theses[k]);
        while s.winner().is_none() {
            let m = if s.turn() == winner {
                strategy
                    .respond(&s)
                    .unwrap_or_else(|| panic!("strategy has no reply in {:?}", s.moves()))
            } else {
                let options = s.legal_moves();
                options[rng.gen_range(0..options.len())].clone()
            };
            s = s.apply_move(&m).expect("chosen moves are legal");
        }
        assert_eq!(s.winner(), Some(winner), "thesis {}", theses[k]);
        plays[usize::from(winner == Actor::O)] += 1;
    }
    assert!(plays[0] > 0 && plays[1] > 0);
}
