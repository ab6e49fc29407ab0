#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use rv_core::engine::Specification;
use rv_core::formula::{parse_ltl, BoolExpr, Gr1Formula};
use rv_core::lp::WeightedEdgeGraph;
use rv_core::model::{Arena, Game, Goals, Label, Weights};
use rv_core::Rational;

pub fn random_arena(rng: &mut StdRng, players: usize, max_states: usize, max_actions: usize) -> Arena {
    let ns = rng.gen_range(1..=max_states);
    let actions: Vec<Vec<String>> = (0..players)
        .map(|_| (0..rng.gen_range(1..=max_actions)).map(|a| format!("a{a}")).collect())
        .collect();
    let np: usize = actions.iter().map(Vec::len).product();
    let labels: Vec<Label> = (0..ns)
        .map(|_| (0..2).filter(|_| rng.gen_bool(0.5)).collect())
        .collect();
    let table = (0..ns * np).map(|_| rng.gen_range(0..ns)).collect();
    Arena::from_table(
        (1..=players).map(|i| i.to_string()).collect(),
        actions,
        (0..ns).map(|s| format!("s{s}")).collect(),
        0,
        vec!["p".into(), "q".into()],
        labels,
        table,
    )
    .expect("well-formed random arena")
}

pub fn random_literal(rng: &mut StdRng) -> BoolExpr {
    let atom = BoolExpr::Atom(rng.gen_range(0..2));
    if rng.gen_bool(0.5) {
        atom
    } else {
        BoolExpr::not(atom)
    }
}

/// A GR(1) formula with at most one antecedent and one consequent.
pub fn random_small_gr1(rng: &mut StdRng) -> Gr1Formula {
    let ante = (0..rng.gen_range(0..=1)).map(|_| random_literal(rng)).collect();
    let cons = (0..rng.gen_range(0..=1)).map(|_| random_literal(rng)).collect();
    Gr1Formula::new(ante, cons)
}

pub fn random_gr1_game(rng: &mut StdRng, players: usize, max_states: usize, max_actions: usize) -> Game {
    let arena = random_arena(rng, players, max_states, max_actions);
    let goals = (0..players).map(|_| random_small_gr1(rng)).collect();
    Game::new(arena, Goals::Gr1(goals)).expect("valid goals")
}

pub fn random_mp_game(rng: &mut StdRng, players: usize, max_states: usize, max_actions: usize) -> Game {
    let arena = random_arena(rng, players, max_states, max_actions);
    let ns = arena.num_states();
    let weights = (0..players)
        .map(|_| (0..ns).map(|_| rng.gen_range(-2..=2)).collect())
        .collect();
    Game::new(arena, Goals::MeanPayoff(Weights(weights))).expect("valid weights")
}

/// One of ⊤, GF p (GR(1)) or G ¬p (LTL).
pub fn random_gr1_spec(rng: &mut StdRng, game: &Game) -> Specification {
    match rng.gen_range(0..3) {
        0 => Specification::truth(),
        1 => Specification::Gr1(Gr1Formula::new(vec![], vec![BoolExpr::Atom(0)])),
        _ => Specification::Ltl(parse_ltl("G !p", game.arena.atoms()).expect("formula")),
    }
}

pub fn random_weighted_graph(rng: &mut StdRng, max_vertices: usize, max_dims: usize) -> WeightedEdgeGraph {
    let n = rng.gen_range(1..=max_vertices);
    let mut edges = Vec::new();
    for s in 0..n {
        for _ in 0..rng.gen_range(1..=2) {
            let t = rng.gen_range(0..n);
            if !edges.contains(&(s, t)) {
                edges.push((s, t));
            }
        }
    }
    let dims = rng.gen_range(1..=max_dims);
    let weights = (0..dims)
        .map(|_| (0..n).map(|_| Rational::from_int(rng.gen_range(-3..=3))).collect())
        .collect();
    let set = |rng: &mut StdRng| (0..n).map(|_| rng.gen_bool(0.4)).collect::<Vec<bool>>();
    let theta = (0..rng.gen_range(0..=1)).map(|_| set(rng)).collect();
    let psi = (0..rng.gen_range(0..=1)).map(|_| set(rng)).collect();
    WeightedEdgeGraph {
        num_vertices: n,
        edges,
        weights,
        theta,
        psi,
    }
}
