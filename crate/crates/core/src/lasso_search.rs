//! Restricted arenas, Streett products and Streett emptiness with witness
//! lassos.

use std::collections::HashMap;

use crate::buchi::BuchiAutomaton;
use crate::formula::Gr1Formula;
use crate::graph;
use crate::model::{Arena, Game, Lasso, PlayerId, ProfileId, StateId, Step};
use crate::punish_gr1::{punishing_secure, CounterArena, PunishResult};
use crate::punish_mp::{z_secure, PunishValues};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("the start state has no surviving transition")]
pub struct EmptyRestriction;

/// An arena with some states and transitions removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedArena {
    pub alive: Vec<bool>,
    /// Surviving profiles per state (empty for removed states).
    pub allowed: Vec<Vec<ProfileId>>,
    pub start: StateId,
}

impl RestrictedArena {
    pub fn full(arena: &Arena) -> RestrictedArena {
        RestrictedArena {
            alive: vec![true; arena.num_states()],
            allowed: (0..arena.num_states())
                .map(|_| (0..arena.num_profiles()).collect())
                .collect(),
            start: arena.initial(),
        }
    }

    /// Surviving edges from `s`, one per target (the smallest profile).
    pub fn edges(&self, arena: &Arena, s: StateId) -> Vec<(StateId, ProfileId)> {
        let mut out: Vec<(StateId, ProfileId)> = Vec::new();
        for &p in &self.allowed[s] {
            let t = arena.tr(s, p);
            if !out.iter().any(|&(u, _)| u == t) {
                out.push((t, p));
            }
        }
        out
    }

    pub fn allows(&self, s: StateId, p: ProfileId) -> bool {
        self.allowed[s].contains(&p)
    }

    pub fn num_transitions(&self) -> usize {
        self.allowed.iter().map(Vec::len).sum()
    }

    /// Whether `lasso` only uses surviving transitions.
    pub fn admits(&self, lasso: &Lasso) -> bool {
        lasso.steps().all(|st| self.alive[st.state] && self.allows(st.state, st.profile))
    }
}

fn restrict(
    arena: &Arena,
    keep_state: impl Fn(StateId) -> bool,
    keep_transition: impl Fn(StateId, ProfileId) -> bool,
) -> Result<RestrictedArena, EmptyRestriction> {
    let start = arena.initial();
    let alive: Vec<bool> = (0..arena.num_states()).map(|s| s == start || keep_state(s)).collect();
    let allowed: Vec<Vec<ProfileId>> = (0..arena.num_states())
        .map(|s| {
            if !alive[s] {
                return Vec::new();
            }
            (0..arena.num_profiles())
                .filter(|&p| alive[arena.tr(s, p)] && keep_transition(s, p))
                .collect()
        })
        .collect();
    if allowed[start].is_empty() {
        return Err(EmptyRestriction);
    }
    Ok(RestrictedArena { alive, allowed, start })
}

/// `G^{-L}`: states punishing for every loser, transitions
/// punishing-secure for every loser. The start state is always kept.
pub fn restrict_gr1(game: &Game, losers: &[PlayerId], punish: &[PunishResult]) -> Result<RestrictedArena, EmptyRestriction> {
    let arena = &game.arena;
    let region = |j: PlayerId| &punish[j].region;
    restrict(
        arena,
        |s| losers.iter().all(|&j| region(j)[s]),
        |s, p| losers.iter().all(|&j| punishing_secure(arena, s, p, j, region(j))),
    )
}

/// `G[z]`: states with `pun_i ≤ z_i` for all `i`, transitions `z_i`-secure
/// for all `i`. The start state is always kept.
pub fn restrict_mp(game: &Game, z: &[Rational], values: &[PunishValues]) -> Result<RestrictedArena, EmptyRestriction> {
    let arena = &game.arena;
    let n = game.num_players();
    restrict(
        arena,
        |s| (0..n).all(|i| values[i].values[s] <= z[i]),
        |s, p| (0..n).all(|i| z_secure(arena, s, p, i, &z[i], &values[i])),
    )
}

/// A Streett pair: the run must visit `e` finitely often or `c` infinitely often.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreettPair {
    pub e: Vec<bool>,
    pub c: Vec<bool>,
}

/// Product of a restricted arena with GR(1) counters and optionally a
/// Büchi automaton.
#[derive(Debug, Clone)]
pub struct StreettProduct {
    pub succ: Vec<Vec<usize>>,
    pub edge_profile: Vec<Vec<ProfileId>>,
    pub state_of: Vec<StateId>,
    /// Büchi state per node when an automaton is present.
    pub aut_state: Vec<Option<usize>>,
    pub pairs: Vec<StreettPair>,
    pub starts: Vec<usize>,
}

impl StreettProduct {
    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    /// Projection of a node path (the cycle closing back to its first node)
    /// to an arena lasso.
    pub fn project(&self, prefix: &[usize], cycle: &[usize]) -> Lasso {
        let step = |v: usize, w: usize| {
            let k = self.succ[v].iter().position(|&x| x == w).expect("product edge");
            Step::new(self.state_of[v], self.edge_profile[v][k])
        };
        let mut pre = Vec::new();
        for k in 0..prefix.len() {
            let next = if k + 1 < prefix.len() { prefix[k + 1] } else { cycle[0] };
            pre.push(step(prefix[k], next));
        }
        let cyc = (0..cycle.len())
            .map(|k| step(cycle[k], cycle[(k + 1) % cycle.len()]))
            .collect();
        Lasso::new(pre, cyc)
    }
}

pub fn build_streett_product(
    arena: &Arena,
    ra: &RestrictedArena,
    objectives: &[Gr1Formula],
    buchi: Option<&BuchiAutomaton>,
) -> StreettProduct {
    let counters: Vec<CounterArena> = objectives.iter().map(|g| CounterArena::new(arena, g)).collect();
    type Key = (StateId, Vec<(usize, usize)>, Option<usize>);
    let mut index: HashMap<Key, usize> = HashMap::new();
    let mut keys: Vec<Key> = Vec::new();
    let mut intern = |k: Key, keys: &mut Vec<Key>| -> usize {
        *index.entry(k.clone()).or_insert_with(|| {
            keys.push(k);
            keys.len() - 1
        })
    };
    let zero = vec![(0, 0); counters.len()];
    let starts: Vec<usize> = match buchi {
        None => vec![intern((ra.start, zero, None), &mut keys)],
        Some(aut) => aut
            .initial
            .iter()
            .map(|&q| intern((ra.start, zero.clone(), Some(q)), &mut keys))
            .collect(),
    };
    let mut succ = Vec::new();
    let mut edge_profile = Vec::new();
    let mut i = 0;
    while i < keys.len() {
        let (s, cs, q) = keys[i].clone();
        let next_cs: Vec<(usize, usize)> = cs
            .iter()
            .zip(&counters)
            .map(|(&(i1, i2), c)| c.advance(s, i1, i2))
            .collect();
        let next_qs: Vec<Option<usize>> = match (buchi, q) {
            (Some(aut), Some(q)) => aut.step(q, arena.label(s)).map(Some).collect(),
            _ => vec![None],
        };
        let (mut out, mut profs) = (Vec::new(), Vec::new());
        for (t, p) in ra.edges(arena, s) {
            for &q2 in &next_qs {
                let w = intern((t, next_cs.clone(), q2), &mut keys);
                if !out.contains(&w) {
                    out.push(w);
                    profs.push(p);
                }
            }
        }
        succ.push(out);
        edge_profile.push(profs);
        i += 1;
    }
    let mut pairs: Vec<StreettPair> = (0..counters.len())
        .map(|k| StreettPair {
            e: keys.iter().map(|(_, cs, _)| cs[k].0 == 0).collect(),
            c: keys.iter().map(|(_, cs, _)| cs[k].1 == 0).collect(),
        })
        .collect();
    if let Some(aut) = buchi {
        pairs.push(StreettPair {
            e: vec![true; keys.len()],
            c: keys.iter().map(|(_, _, q)| aut.is_accepting(q.expect("automaton state"))).collect(),
        });
    }
    StreettProduct {
        succ,
        edge_profile,
        state_of: keys.iter().map(|k| k.0).collect(),
        aut_state: keys.iter().map(|k| k.2).collect(),
        pairs,
        starts,
    }
}

/// A reachable set of nodes, strongly connected, in which every pair is
/// satisfied; `None` if the product accepts nothing.
pub fn good_component(p: &StreettProduct) -> Option<Vec<usize>> {
    let reach = graph::reachable(&p.succ, &p.starts, &vec![true; p.len()]);
    let mut work: Vec<Vec<usize>> = graph::sccs(&p.succ, &reach);
    work.reverse();
    while let Some(comp) = work.pop() {
        if !graph::is_nontrivial(&p.succ, &comp) {
            continue;
        }
        let bad: Vec<&StreettPair> = p
            .pairs
            .iter()
            .filter(|pr| comp.iter().any(|&v| pr.e[v]) && !comp.iter().any(|&v| pr.c[v]))
            .collect();
        if bad.is_empty() {
            return Some(comp);
        }
        let mut inside = vec![false; p.len()];
        for &v in &comp {
            inside[v] = !bad.iter().any(|pr| pr.e[v]);
        }
        let mut sub = graph::sccs(&p.succ, &inside);
        sub.reverse();
        work.extend(sub);
    }
    None
}

/// A lasso through a good component: shortest prefix, then a cycle
/// threading one `C_k` node for every pair whose `E_k` meets the component.
pub fn streett_witness(p: &StreettProduct, comp: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let all = vec![true; p.len()];
    let mut inside = vec![false; p.len()];
    for &v in comp {
        inside[v] = true;
    }
    let path = graph::shortest_path(&p.succ, &p.starts, &all, |v| inside[v]).expect("component is reachable");
    let x = *path.last().expect("nonempty path");
    let prefix = path[..path.len() - 1].to_vec();
    let mut cycle = vec![x];
    let mut cur = x;
    for pr in &p.pairs {
        if !comp.iter().any(|&v| pr.e[v]) {
            continue;
        }
        if cycle.iter().any(|&v| pr.c[v]) {
            continue;
        }
        let seg = graph::shortest_path(&p.succ, &[cur], &inside, |v| pr.c[v]).expect("C node inside component");
        cycle.extend_from_slice(&seg[1..]);
        cur = *cycle.last().expect("nonempty");
    }
    let back = graph::shortest_nonempty_path(&p.succ, cur, &inside, |v| v == x).expect("strongly connected");
    cycle.extend_from_slice(&back[..back.len() - 1]);
    (prefix, cycle)
}

pub fn streett_nonempty(p: &StreettProduct) -> Option<Lasso> {
    let comp = good_component(p)?;
    let (prefix, cycle) = streett_witness(p, &comp);
    Some(p.project(&prefix, &cycle))
}
