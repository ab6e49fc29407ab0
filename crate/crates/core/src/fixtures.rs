//! The two small reference games used across the test suites.
//!
//! **G1**: players 1, 2 with actions {a, b}; states s0, sW, sL. Matching
//! actions at s0 lead to sW (labelled `p`), mismatching ones to sL; sW and
//! sL are absorbing. Both goals are `GF p`.
//!
//! **G2**: same action shape, states s0 and s1. Matching actions at s0 lead
//! to the absorbing s1, mismatching ones stay at s0. Mean-payoff weights
//! w1 = (0, 2) and w2 = (0, 0). Atom `at_s0` holds only at s0, `p_any`
//! holds everywhere.

use std::collections::BTreeSet;

use crate::formula::{BoolExpr, Gr1Formula};
use crate::model::{Arena, Game, Goals, Weights};

fn two_players() -> (Vec<String>, Vec<Vec<String>>) {
    (
        vec!["1".into(), "2".into()],
        vec![vec!["a".into(), "b".into()], vec!["a".into(), "b".into()]],
    )
}

pub fn g1_arena() -> Arena {
    let (players, actions) = two_players();
    Arena::new(
        players,
        actions,
        vec!["s0".into(), "sW".into(), "sL".into()],
        0,
        vec!["p".into()],
        vec![BTreeSet::new(), BTreeSet::from([0]), BTreeSet::new()],
        |s, a| match s {
            0 if a[0] == a[1] => 1,
            0 => 2,
            other => other,
        },
    )
    .expect("G1 is well formed")
}

pub fn g1() -> Game {
    let gf_p = Gr1Formula::new(vec![], vec![BoolExpr::Atom(0)]);
    Game::new(g1_arena(), Goals::Gr1(vec![gf_p.clone(), gf_p])).expect("G1 goals")
}

pub fn g2_arena() -> Arena {
    let (players, actions) = two_players();
    Arena::new(
        players,
        actions,
        vec!["s0".into(), "s1".into()],
        0,
        vec!["at_s0".into(), "p_any".into()],
        vec![BTreeSet::from([0, 1]), BTreeSet::from([1])],
        |s, a| match s {
            0 if a[0] == a[1] => 1,
            0 => 0,
            _ => 1,
        },
    )
    .expect("G2 is well formed")
}

pub fn g2() -> Game {
    Game::new(g2_arena(), Goals::MeanPayoff(Weights(vec![vec![0, 2], vec![0, 0]]))).expect("G2 weights")
}
