//! Punishment values for mean-payoff goals.
//!
//! `pun_i(s)` is the value of the zero-sum mean-payoff game in which the
//! coalition `N \ {i}` first commits `a_{-i}` at `s` and `i` then picks
//! `a_i`. Response nodes carry the weight of their source state, so each
//! original step contributes twice and averages are unchanged.

use std::cmp::Ordering;

use num_bigint::BigInt;

use crate::graph;
use crate::model::{ActionId, Arena, Game, PlayerId, ProfileId, StateId, Weights};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MpZeroSumGame {
    pub player: PlayerId,
    pub num_states: usize,
    /// Partial profiles `a_{-i}` (with `i`'s component set to 0).
    pub partials: Vec<ProfileId>,
    pub weight: Vec<i64>,
    /// Nodes owned by the maximiser (player `i`); the others are coalition nodes.
    pub maximizer: Vec<bool>,
    pub succ: Vec<Vec<usize>>,
    /// For response nodes: the action of `i` behind each successor edge.
    pub edge_action: Vec<Vec<ActionId>>,
}

impl MpZeroSumGame {
    pub fn len(&self) -> usize {
        self.weight.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weight.is_empty()
    }

    pub fn response_node(&self, s: StateId, k: usize) -> usize {
        self.num_states + s * self.partials.len() + k
    }
}

pub fn build_mp_punish_game(arena: &Arena, weights: &Weights, i: PlayerId) -> MpZeroSumGame {
    let ns = arena.num_states();
    let partials: Vec<ProfileId> = arena.partial_profiles(i).collect();
    let np = partials.len();
    let total = ns + ns * np;
    let mut weight = vec![0; total];
    let mut maximizer = vec![false; total];
    let mut succ = vec![Vec::new(); total];
    let mut edge_action = vec![Vec::new(); total];
    for s in 0..ns {
        weight[s] = weights.of(i, s);
        for (k, &pp) in partials.iter().enumerate() {
            let r = ns + s * np + k;
            weight[r] = weights.of(i, s);
            maximizer[r] = true;
            succ[s].push(r);
            for a in 0..arena.num_actions(i) {
                let t = arena.tr(s, arena.with_action(pp, i, a));
                if !succ[r].contains(&t) {
                    succ[r].push(t);
                    edge_action[r].push(a);
                }
            }
        }
    }
    MpZeroSumGame {
        player: i,
        num_states: ns,
        partials,
        weight,
        maximizer,
        succ,
        edge_action,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PunishValues {
    pub player: PlayerId,
    /// `pun_i(s)` per arena state.
    pub values: Vec<Rational>,
    /// Optimal memoryless coalition strategy: state → partial profile.
    pub coalition: Vec<ProfileId>,
    /// Optimal memoryless answer of `i`: `(state, partial index)` → action.
    pub maximizer: Vec<ActionId>,
    pub partials: Vec<ProfileId>,
}

impl PunishValues {
    pub fn value(&self, s: StateId) -> &Rational {
        &self.values[s]
    }

    /// The distinct punishment values in ascending order.
    pub fn candidates(&self) -> Vec<Rational> {
        let mut v = self.values.clone();
        v.sort();
        v.dedup();
        v
    }

    /// Action of `i` against `a_{-i}` at `s`.
    pub fn response(&self, s: StateId, partial: ProfileId) -> ActionId {
        let k = self.partials.iter().position(|&p| p == partial).expect("partial profile");
        self.maximizer[s * self.partials.len() + k]
    }
}

/// Values of the game with some nodes' choices fixed to one successor,
/// by value iteration followed by rounding to the nearest small-denominator
/// rational. Also returns the last-but-one iterate for strategy choices.
fn iterate(g: &MpZeroSumGame, fixed: &[Option<usize>]) -> (Vec<Rational>, Vec<i128>) {
    let n = g.len() as i128;
    let w = g.weight.iter().map(|x| x.abs()).max().unwrap_or(0) as i128;
    let k = 4 * n * n * n * w + 1;
    let mut cur = vec![0i128; g.len()];
    let mut next = vec![0i128; g.len()];
    let mut prev = cur.clone();
    for _ in 0..k {
        for x in 0..g.len() {
            let best = match fixed[x] {
                Some(y) => cur[y],
                None => {
                    let vals = g.succ[x].iter().map(|&y| cur[y]);
                    if g.maximizer[x] {
                        vals.max().expect("successor")
                    } else {
                        vals.min().expect("successor")
                    }
                }
            };
            next[x] = g.weight[x] as i128 + best;
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    let values = cur.iter().map(|&v| round_small(v, k, n)).collect();
    (values, prev)
}

/// The rational with denominator at most `max_den` closest to `v / k`.
fn round_small(v: i128, k: i128, max_den: i128) -> Rational {
    let mut best: Option<(i128, i128, i128)> = None;
    for q in 1..=max_den.max(1) {
        let p = (2 * v * q + k).div_euclid(2 * k);
        // distance |p/q - v/k| scaled by k*q
        let dist = (p * k - v * q).abs();
        let better = match best {
            None => true,
            Some((_, bq, bd)) => (dist * bq).cmp(&(bd * q)) == Ordering::Less,
        };
        if better {
            best = Some((p, q, dist));
        }
    }
    let (p, q, _) = best.expect("at least one denominator");
    Rational::from_big(BigInt::from(p), BigInt::from(q))
}

/// Optimal value of every node when all choices are fixed except those of
/// one side, computed exactly via minimum (or maximum) mean cycles.
fn one_player_values(g: &MpZeroSumGame, choice: &[Option<usize>], minimise: bool) -> Vec<Rational> {
    let succ: Vec<Vec<usize>> = (0..g.len())
        .map(|x| match choice[x] {
            Some(y) => vec![y],
            None => g.succ[x].clone(),
        })
        .collect();
    let sign = if minimise { 1 } else { -1 };
    let alive = vec![true; g.len()];
    let comps = graph::sccs(&succ, &alive);
    let mut best: Vec<Option<Rational>> = vec![None; g.len()];
    // Components arrive in reverse topological order, so successors first.
    for comp in &comps {
        let mut here: Option<Rational> = None;
        if graph::is_nontrivial(&succ, comp) {
            here = Some(min_mean_cycle(&succ, comp, |x| sign * g.weight[x]));
        }
        for &x in comp {
            for &y in &succ[x] {
                if let Some(v) = &best[y] {
                    if !comp.contains(&y) && here.as_ref().is_none_or(|h| v < h) {
                        here = Some(v.clone());
                    }
                }
            }
        }
        for &x in comp {
            best[x] = here.clone();
        }
    }
    best.into_iter()
        .map(|v| {
            let v = v.expect("every node reaches a cycle");
            if minimise {
                v
            } else {
                -v
            }
        })
        .collect()
}

/// Karp's minimum mean cycle inside a strongly connected component; the
/// weight of an edge is the weight of its source node.
fn min_mean_cycle(succ: &[Vec<usize>], comp: &[usize], weight: impl Fn(usize) -> i64) -> Rational {
    let n = comp.len();
    let pos = |x: usize| comp.binary_search(&x).ok();
    // d[k][v]: minimum weight of a walk with exactly k edges from comp[0] to v.
    let mut d: Vec<Vec<Option<i64>>> = vec![vec![None; n]; n + 1];
    d[0][0] = Some(0);
    for k in 0..n {
        for v in 0..n {
            let Some(dv) = d[k][v] else { continue };
            let x = comp[v];
            for &y in &succ[x] {
                if let Some(u) = pos(y) {
                    let cand = dv + weight(x);
                    if d[k + 1][u].is_none_or(|old| cand < old) {
                        d[k + 1][u] = Some(cand);
                    }
                }
            }
        }
    }
    let mut result: Option<Rational> = None;
    for v in 0..n {
        let Some(dn) = d[n][v] else { continue };
        let mut worst: Option<Rational> = None;
        for (k, row) in d.iter().enumerate().take(n) {
            if let Some(dk) = row[v] {
                let r = Rational::new(dn - dk, (n - k) as i64);
                if worst.as_ref().is_none_or(|w| &r > w) {
                    worst = Some(r);
                }
            }
        }
        if let Some(w) = worst {
            if result.as_ref().is_none_or(|r| &w < r) {
                result = Some(w);
            }
        }
    }
    result.expect("strongly connected component with a cycle")
}

/// Fixes one successor per node of one side so that the game values stay
/// `target`. Tries the choices suggested by the iterate first.
fn extract(g: &MpZeroSumGame, target: &[Rational], hint: &[i128], for_max: bool) -> Vec<Option<usize>> {
    let mine = |x: usize| g.maximizer[x] == for_max;
    let ranked = |x: usize| -> Vec<usize> {
        let mut ys = g.succ[x].clone();
        ys.sort_by_key(|&y| if for_max { -hint[y] } else { hint[y] });
        ys
    };
    let fast: Vec<Option<usize>> = (0..g.len()).map(|x| mine(x).then(|| ranked(x)[0])).collect();
    if one_player_values(g, &fast, for_max) == target {
        return fast;
    }
    let mut fixed: Vec<Option<usize>> = (0..g.len())
        .map(|x| (mine(x) && g.succ[x].len() == 1).then(|| g.succ[x][0]))
        .collect();
    for x in 0..g.len() {
        if !mine(x) || fixed[x].is_some() {
            continue;
        }
        for y in ranked(x) {
            fixed[x] = Some(y);
            if iterate(g, &fixed).0 == target {
                break;
            }
        }
    }
    fixed
}

pub fn solve_mp_values(g: &MpZeroSumGame) -> PunishValues {
    let none = vec![None; g.len()];
    let (node_values, hint) = iterate(g, &none);
    let max_choice = extract(g, &node_values, &hint, true);
    let min_choice = extract(g, &node_values, &hint, false);
    debug_assert_eq!(one_player_values(g, &max_choice, true), node_values);
    debug_assert_eq!(one_player_values(g, &min_choice, false), node_values);
    let np = g.partials.len();
    let coalition = (0..g.num_states)
        .map(|s| {
            let r = min_choice[s].expect("coalition choice");
            g.partials[(r - g.num_states) % np]
        })
        .collect();
    let maximizer = (g.num_states..g.len())
        .map(|r| {
            let y = max_choice[r].expect("maximiser choice");
            let k = g.succ[r].iter().position(|&t| t == y).expect("edge");
            g.edge_action[r][k]
        })
        .collect();
    PunishValues {
        player: g.player,
        values: node_values[..g.num_states].to_vec(),
        coalition,
        maximizer,
        partials: g.partials.clone(),
    }
}

/// `pun_i` for one player of an MP game.
pub fn punish_values(game: &Game, i: PlayerId) -> PunishValues {
    let w = game.weights().expect("punish_values needs a mean-payoff game");
    solve_mp_values(&build_mp_punish_game(&game.arena, w, i))
}

/// Every unilateral deviation of `i` from `profile` at `s` lands where
/// `pun_i ≤ z`.
pub fn z_secure(arena: &Arena, s: StateId, profile: ProfileId, i: PlayerId, z: &Rational, values: &PunishValues) -> bool {
    arena.deviation_successors(s, profile, i).all(|t| &values.values[t] <= z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{g2, g2_arena};
    use crate::model::Goals;

    fn single_state(w: i64) -> Game {
        let arena = Arena::new(
            vec!["1".into()],
            vec![vec!["a".into()]],
            vec!["s".into()],
            0,
            vec![],
            vec![Default::default()],
            |_, _| 0,
        )
        .unwrap();
        Game::new(arena, Goals::MeanPayoff(Weights(vec![vec![w]]))).unwrap()
    }

    #[test]
    fn single_node_value() {
        let g = single_state(5);
        let tb = build_mp_punish_game(&g.arena, g.weights().unwrap(), 0);
        assert_eq!(tb.len(), 2);
        assert_eq!(tb.succ[0].len(), 1);
        assert_eq!(punish_values(&g, 0).values, vec![Rational::from_int(5)]);
    }

    #[test]
    fn forced_alternation_averages_to_zero() {
        let arena = Arena::new(
            vec!["1".into()],
            vec![vec!["a".into()]],
            vec!["u".into(), "v".into()],
            0,
            vec![],
            vec![Default::default(); 2],
            |s, _| 1 - s,
        )
        .unwrap();
        let g = Game::new(arena, Goals::MeanPayoff(Weights(vec![vec![1, -1]]))).unwrap();
        assert_eq!(punish_values(&g, 0).values, vec![Rational::zero(); 2]);
    }

    #[test]
    fn g2_values_and_security() {
        let g = g2();
        let tb = build_mp_punish_game(&g.arena, g.weights().unwrap(), 0);
        assert_eq!(tb.succ[0].len(), 2);
        for &r in &tb.succ[0] {
            assert!(tb.succ[r].contains(&1));
        }
        let v = punish_values(&g, 0);
        assert_eq!(v.values, vec![Rational::from_int(2), Rational::from_int(2)]);
        let arena = g2_arena();
        let ab = arena.encode(&[0, 1]);
        assert!(z_secure(&arena, 0, ab, 0, &Rational::from_int(2), &v));
        assert!(!z_secure(&arena, 0, ab, 0, &Rational::from_int(1), &v));
        let v2 = punish_values(&g, 1);
        assert_eq!(v2.values, vec![Rational::zero(); 2]);
    }

    #[test]
    fn rounding_picks_small_denominators() {
        assert_eq!(round_small(1000, 3000, 5), Rational::new(1, 3));
        assert_eq!(round_small(-1499, 1000, 4), Rational::new(-3, 2));
    }
}
