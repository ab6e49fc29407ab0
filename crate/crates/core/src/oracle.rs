//! Brute-force reference procedures for tiny games. They share the model
//! and formula types with the engine but none of its solvers: punishment
//! is found by enumerating memoryless strategies, equilibria by
//! enumerating lassos or cycle combinations, and linear feasibility by
//! Fourier-Motzkin elimination over small cycle supports.

use std::collections::HashMap;

use crate::engine::Specification;
use crate::formula::{BoolExpr, Gr1Formula, Ltl};
use crate::lp::WeightedEdgeGraph;
use crate::model::{Arena, Game, Goals, PlayerId, ProfileId, StateId};
use crate::punish_gr1::PunishResult;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance too large for enumeration: {0}")]
    SizeLimit(String),
    #[error("not supported by the oracle: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Longest lasso prefix tried; `None` means the number of states.
    pub prefix_bound: Option<usize>,
    /// Longest lasso cycle tried; `None` means twice the number of states.
    pub cycle_bound: Option<usize>,
    /// Cap on any single enumeration.
    pub max_enumeration: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            prefix_bound: None,
            cycle_bound: None,
            max_enumeration: 1 << 22,
        }
    }
}

fn check_size(count: u128, cfg: &OracleConfig, what: &str) -> Result<(), OracleError> {
    if count > cfg.max_enumeration as u128 {
        Err(OracleError::SizeLimit(format!("{what}: {count} cases")))
    } else {
        Ok(())
    }
}

fn pow(base: usize, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

/// Truth of an LTL formula on the state sequence `states`, which loops
/// back to `loop_start` after its last position.
pub fn eval_ltl(f: &Ltl, states: &[StateId], loop_start: usize, arena: &Arena) -> bool {
    eval_positions(f, states, loop_start, arena)[0]
}

fn eval_positions(f: &Ltl, states: &[StateId], loop_start: usize, arena: &Arena) -> Vec<bool> {
    let len = states.len();
    let succ = |i: usize| if i + 1 < len { i + 1 } else { loop_start };
    let sub = |g: &Ltl| eval_positions(g, states, loop_start, arena);
    match f {
        Ltl::True => vec![true; len],
        Ltl::False => vec![false; len],
        Ltl::Atom(a) => states.iter().map(|&s| arena.label(s).contains(a)).collect(),
        Ltl::Not(g) => sub(g).into_iter().map(|b| !b).collect(),
        Ltl::And(a, b) => sub(a).into_iter().zip(sub(b)).map(|(x, y)| x && y).collect(),
        Ltl::Or(a, b) => sub(a).into_iter().zip(sub(b)).map(|(x, y)| x || y).collect(),
        Ltl::Implies(a, b) => sub(a).into_iter().zip(sub(b)).map(|(x, y)| !x || y).collect(),
        Ltl::Next(g) => {
            let v = sub(g);
            (0..len).map(|i| v[succ(i)]).collect()
        }
        Ltl::Until(a, b) => fixpoint(&sub(a), &sub(b), false, succ),
        Ltl::Release(a, b) => fixpoint(&sub(a), &sub(b), true, succ),
        Ltl::Finally(g) => fixpoint(&vec![true; len], &sub(g), false, succ),
        Ltl::Globally(g) => fixpoint(&vec![false; len], &sub(g), true, succ),
    }
}

/// Least (`a U b`) or greatest (`a R b`) fixpoint over the lasso positions.
fn fixpoint(a: &[bool], b: &[bool], greatest: bool, succ: impl Fn(usize) -> usize) -> Vec<bool> {
    let len = a.len();
    let mut v = vec![greatest; len];
    for _ in 0..=len {
        for i in (0..len).rev() {
            v[i] = if greatest {
                b[i] && (a[i] || v[succ(i)])
            } else {
                b[i] || (a[i] && v[succ(i)])
            };
        }
    }
    v
}

/// GR(1) truth from the set of states visited infinitely often.
pub fn gr1_holds_on(goal: &Gr1Formula, cycle: &[StateId], arena: &Arena) -> bool {
    let hit = |e: &BoolExpr| cycle.iter().any(|&s| e.eval(arena.label(s)));
    !goal.antecedents.iter().all(hit) || goal.consequents.iter().all(hit)
}

/// States of the forced run from `s` under a successor function, split as
/// (prefix, cycle).
fn forced_run(s: StateId, next: impl Fn(StateId) -> StateId) -> (Vec<StateId>, Vec<StateId>) {
    let mut seen: HashMap<StateId, usize> = HashMap::new();
    let mut path = Vec::new();
    let mut x = s;
    while !seen.contains_key(&x) {
        seen.insert(x, path.len());
        path.push(x);
        x = next(x);
    }
    let k = seen[&x];
    let cycle = path.split_off(k);
    (path, cycle)
}

fn digits(mut index: u128, base: usize, len: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let d = (index % base as u128) as usize;
            index /= base as u128;
            d
        })
        .collect()
}

/// States from which some memoryless coalition strategy defeats every
/// memoryless answer of `j`. Exact when the goal of `j` has at most one
/// antecedent and one consequent.
pub fn brute_pun_gr1(game: &Game, j: PlayerId, cfg: &OracleConfig) -> Result<Vec<bool>, OracleError> {
    let goals = game.gr1_goals().ok_or_else(|| OracleError::Unsupported("not a GR(1) game".into()))?;
    let goal = &goals[j];
    if goal.antecedents.len() > 1 || goal.consequents.len() > 1 {
        return Err(OracleError::Unsupported(
            "more than one antecedent or consequent".into(),
        ));
    }
    let arena = &game.arena;
    let ns = arena.num_states();
    let partials: Vec<ProfileId> = arena.partial_profiles(j).collect();
    let aj = arena.num_actions(j);
    let coalition = pow(partials.len(), ns);
    let answers = pow(aj, ns);
    check_size(coalition.saturating_mul(answers), cfg, "GR(1) punishment")?;
    let mut region = vec![false; ns];
    for ci in 0..coalition {
        let c = digits(ci, partials.len(), ns);
        let mut wins = vec![true; ns];
        for ri in 0..answers {
            let r = digits(ri, aj, ns);
            let next = |x: StateId| arena.tr(x, arena.with_action(partials[c[x]], j, r[x]));
            for s in 0..ns {
                if wins[s] {
                    let (_, cycle) = forced_run(s, next);
                    if gr1_holds_on(goal, &cycle, arena) {
                        wins[s] = false;
                    }
                }
            }
        }
        for s in 0..ns {
            region[s] |= wins[s];
        }
    }
    Ok(region)
}

/// Replays the coalition strategy of `res` from every state of its region
/// against every memoryless answer of the punished player on the counter
/// configurations, and checks that the goal always fails.
pub fn verify_punishing_strategy(game: &Game, res: &PunishResult, cfg: &OracleConfig) -> Result<bool, OracleError> {
    let goals = game.gr1_goals().ok_or_else(|| OracleError::Unsupported("not a GR(1) game".into()))?;
    let j = res.player;
    let goal = &goals[j];
    let arena = &game.arena;
    let counters = &res.counters;
    check_size(pow(arena.num_actions(j), counters.num_configs()), cfg, "answers")?;

    fn explore(
        x: usize,
        path: &mut Vec<usize>,
        res: &PunishResult,
        arena: &Arena,
        goal: &Gr1Formula,
        j: PlayerId,
    ) -> bool {
        if let Some(k) = path.iter().position(|&y| y == x) {
            let cycle: Vec<StateId> = path[k..].iter().map(|&y| res.counters.split(y).0).collect();
            return !gr1_holds_on(goal, &cycle, arena);
        }
        let Some(partial) = res.strategy[x] else {
            return false;
        };
        let s = res.counters.split(x).0;
        path.push(x);
        let ok = (0..arena.num_actions(j)).all(|a| {
            let t = arena.tr(s, arena.with_action(partial, j, a));
            explore(res.counters.step(x, t), path, res, arena, goal, j)
        });
        path.pop();
        ok
    }

    for s in res.states() {
        let start = counters.config(s, 0, 0);
        if !explore(start, &mut Vec::new(), res, arena, goal, j) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Per-state value of the maximum over memoryless strategies of `i` of
/// the minimum over memoryless coalition strategies of the mean weight of
/// the forced cycle.
pub fn brute_pun_mp(game: &Game, i: PlayerId, cfg: &OracleConfig) -> Result<Vec<Rational>, OracleError> {
    let w = game.weights().ok_or_else(|| OracleError::Unsupported("not an MP game".into()))?;
    let arena = &game.arena;
    let ns = arena.num_states();
    let partials: Vec<ProfileId> = arena.partial_profiles(i).collect();
    let k = partials.len();
    let ai = arena.num_actions(i);
    let coalition = pow(k, ns);
    let answers = pow(ai, ns * k);
    check_size(coalition.saturating_mul(answers), cfg, "MP punishment")?;
    let mut best: Vec<Option<Rational>> = vec![None; ns];
    for ri in 0..answers {
        let r = digits(ri, ai, ns * k);
        let mut worst: Vec<Option<Rational>> = vec![None; ns];
        for ci in 0..coalition {
            let c = digits(ci, k, ns);
            let next = |x: StateId| arena.tr(x, arena.with_action(partials[c[x]], i, r[x * k + c[x]]));
            for s in 0..ns {
                let (_, cycle) = forced_run(s, next);
                let avg = Rational::mean(cycle.iter().map(|&x| w.of(i, x)));
                if worst[s].as_ref().map_or(true, |v| &avg < v) {
                    worst[s] = Some(avg);
                }
            }
        }
        for s in 0..ns {
            let v = worst[s].take().expect("some coalition strategy");
            if best[s].as_ref().map_or(true, |b| &v > b) {
                best[s] = Some(v);
            }
        }
    }
    Ok(best.into_iter().map(|v| v.expect("some strategy")).collect())
}

/// One-step deviations of `j` from `p` at `s`.
fn deviations(arena: &Arena, s: StateId, p: ProfileId, j: PlayerId) -> impl Iterator<Item = StateId> + '_ {
    (0..arena.num_actions(j)).map(move |a| arena.tr(s, arena.with_action(p, j, a)))
}

/// Whether an equilibrium exists whose run satisfies `spec`.
pub fn brute_e_nash(game: &Game, spec: &Specification, cfg: &OracleConfig) -> Result<bool, OracleError> {
    match game.goals {
        Goals::Gr1(_) => brute_e_nash_gr1(game, spec, cfg),
        Goals::MeanPayoff(_) => brute_e_nash_mp(game, spec, cfg),
    }
}

fn brute_e_nash_gr1(game: &Game, spec: &Specification, cfg: &OracleConfig) -> Result<bool, OracleError> {
    let goals = game.gr1_goals().expect("GR(1) game");
    let arena = &game.arena;
    let n = game.num_players();
    let ns = arena.num_states();
    let pun: Vec<Vec<bool>> = (0..n)
        .map(|j| brute_pun_gr1(game, j, cfg))
        .collect::<Result<_, _>>()?;
    let spec = spec.to_ltl();
    let pb = cfg.prefix_bound.unwrap_or(ns);
    let cb = cfg.cycle_bound.unwrap_or(2 * ns);
    let np = arena.num_profiles();
    let succ: Vec<Vec<StateId>> = (0..ns)
        .map(|s| {
            let mut v: Vec<StateId> = (0..np).map(|p| arena.tr(s, p)).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let max_deg = succ.iter().map(Vec::len).max().unwrap_or(1);
    check_size(pow(max_deg, pb + cb).saturating_mul((pb + 1) as u128), cfg, "lassos")?;

    // secure[mask][s * ns + t]: some profile moves s to t and every loser
    // in `mask` can only deviate into its punishment region.
    let mut secure: HashMap<u64, Vec<bool>> = HashMap::new();
    let mut secure_for = |mask: u64| -> Vec<bool> {
        secure
            .entry(mask)
            .or_insert_with(|| {
                let mut out = vec![false; ns * ns];
                for s in 0..ns {
                    for p in 0..np {
                        let ok = (0..n)
                            .filter(|&j| mask >> j & 1 == 1)
                            .all(|j| deviations(arena, s, p, j).all(|t| pun[j][t]));
                        if ok {
                            out[s * ns + arena.tr(s, p)] = true;
                        }
                    }
                }
                out
            })
            .clone()
    };

    let mut walk = vec![arena.initial()];
    let mut found = false;
    // Depth-first over walks from the initial state; every split of a walk
    // into prefix and cycle that closes is a lasso.
    fn visit(
        walk: &mut Vec<StateId>,
        succ: &[Vec<StateId>],
        limit: usize,
        f: &mut dyn FnMut(&[StateId]) -> bool,
    ) -> bool {
        if f(walk) {
            return true;
        }
        if walk.len() == limit {
            return false;
        }
        let last = *walk.last().expect("nonempty");
        for &t in &succ[last] {
            walk.push(t);
            if visit(walk, succ, limit, f) {
                return true;
            }
            walk.pop();
        }
        false
    }
    let mut check = |w: &[StateId]| -> bool {
        let len = w.len();
        let lo = len.saturating_sub(cb);
        for k in lo..len.min(pb + 1) {
            let last = w[len - 1];
            if !succ[last].contains(&w[k]) {
                continue;
            }
            let cycle = &w[k..];
            let mask = (0..n)
                .filter(|&j| !gr1_holds_on(&goals[j], cycle, arena))
                .fold(0u64, |m, j| m | 1 << j);
            let sec = secure_for(mask);
            let edges_ok = (0..len).all(|t| {
                let to = if t + 1 < len { w[t + 1] } else { w[k] };
                sec[w[t] * ns + to]
            });
            if edges_ok && eval_ltl(&spec, w, k, arena) {
                return true;
            }
        }
        false
    };
    found |= visit(&mut walk, &succ, pb + cb, &mut check);
    Ok(found)
}

/// Simple cycles of the graph restricted to `inside`, as vertex lists
/// starting at their smallest vertex.
pub fn simple_cycles(succ: &[Vec<usize>], inside: &[bool], cap: usize) -> Result<Vec<Vec<usize>>, OracleError> {
    let n = succ.len();
    let mut out = Vec::new();
    for start in 0..n {
        if !inside[start] {
            continue;
        }
        let mut path = vec![start];
        let mut on = vec![false; n];
        on[start] = true;
        let mut iters: Vec<usize> = vec![0];
        while let Some(&v) = path.last() {
            let k = *iters.last().expect("parallel stacks");
            if k < succ[v].len() {
                *iters.last_mut().expect("parallel stacks") += 1;
                let t = succ[v][k];
                if t == start {
                    out.push(path.clone());
                    if out.len() > cap {
                        return Err(OracleError::SizeLimit(format!("more than {cap} simple cycles")));
                    }
                } else if t > start && inside[t] && !on[t] {
                    on[t] = true;
                    path.push(t);
                    iters.push(0);
                }
            } else {
                on[v] = false;
                path.pop();
                iters.pop();
            }
        }
    }
    Ok(out)
}

/// A homogeneous inequality `coeffs · x ≥ 0`, or `> 0` when strict.
#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<Rational>,
    strict: bool,
}

/// Fourier-Motzkin: is there `x ≥ 0` satisfying every row?
fn fm_feasible(mut rows: Vec<Row>, vars: usize) -> bool {
    for v in 0..vars {
        let mut unit = vec![Rational::zero(); vars];
        unit[v] = Rational::one();
        rows.push(Row {
            coeffs: unit,
            strict: false,
        });
    }
    for v in 0..vars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            if r.coeffs[v].is_positive() {
                pos.push(r);
            } else if r.coeffs[v].is_negative() {
                neg.push(r);
            } else {
                rest.push(r);
            }
        }
        for p in &pos {
            for q in &neg {
                let a = p.coeffs[v].clone();
                let b = -&q.coeffs[v];
                let coeffs: Vec<Rational> = (0..vars).map(|k| &(&b * &p.coeffs[k]) + &(&a * &q.coeffs[k])).collect();
                rest.push(Row {
                    coeffs,
                    strict: p.strict || q.strict,
                });
            }
        }
        rows = rest;
    }
    !rows.iter().any(|r| r.strict)
}

/// Is there a nonnegative combination of the cycle weight vectors that is
/// nonnegative in every dimension and puts positive weight on at least
/// one cycle of every group? Tries supports of at most `dims + groups`
/// cycles, which suffices for basic solutions.
pub fn cone_feasible(vectors: &[Vec<Rational>], groups: &[Vec<bool>]) -> bool {
    let k = vectors.len();
    if k == 0 {
        return false;
    }
    let dims = vectors[0].len();
    let max_support = (dims + groups.len()).max(1).min(k);
    let mut support: Vec<usize> = Vec::new();
    fn rec(
        start: usize,
        support: &mut Vec<usize>,
        max: usize,
        vectors: &[Vec<Rational>],
        groups: &[Vec<bool>],
        dims: usize,
    ) -> bool {
        if !support.is_empty() && groups.iter().all(|g| support.iter().any(|&c| g[c])) {
            let mut rows: Vec<Row> = (0..dims)
                .map(|d| Row {
                    coeffs: support.iter().map(|&c| vectors[c][d].clone()).collect(),
                    strict: false,
                })
                .collect();
            for g in groups {
                rows.push(Row {
                    coeffs: support
                        .iter()
                        .map(|&c| if g[c] { Rational::one() } else { Rational::zero() })
                        .collect(),
                    strict: true,
                });
            }
            if groups.is_empty() {
                rows.push(Row {
                    coeffs: vec![Rational::one(); support.len()],
                    strict: true,
                });
            }
            if fm_feasible(rows, support.len()) {
                return true;
            }
        }
        if support.len() == max {
            return false;
        }
        for c in start..vectors.len() {
            support.push(c);
            if rec(c + 1, support, max, vectors, groups, dims) {
                return true;
            }
            support.pop();
        }
        false
    }
    rec(0, &mut support, max_support, vectors, groups, dims)
}

/// Which cycle constraints a weighted graph is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleQuery {
    /// Every `theta` set visited.
    Theta,
    /// The `l`-th `psi` set avoided.
    Psi(usize),
}

/// Cycle-combination counterpart of the flow programs over a weighted graph.
pub fn brute_cycle_feasible(g: &WeightedEdgeGraph, q: CycleQuery, cap: usize) -> Result<bool, OracleError> {
    let n = g.num_vertices;
    let mut succ = vec![Vec::new(); n];
    for &(s, t) in &g.edges {
        if !succ[s].contains(&t) {
            succ[s].push(t);
        }
    }
    let inside: Vec<bool> = match q {
        CycleQuery::Theta => vec![true; n],
        CycleQuery::Psi(l) => g.psi[l].iter().map(|&b| !b).collect(),
    };
    let cycles = simple_cycles(&succ, &inside, cap)?;
    let vectors: Vec<Vec<Rational>> = cycles
        .iter()
        .map(|c| g.weights.iter().map(|w| c.iter().map(|&v| w[v].clone()).sum()).collect())
        .collect();
    let groups: Vec<Vec<bool>> = match q {
        CycleQuery::Theta => g
            .theta
            .iter()
            .map(|set| cycles.iter().map(|c| c.iter().any(|&v| set[v])).collect())
            .collect(),
        CycleQuery::Psi(_) => Vec::new(),
    };
    Ok(cone_feasible(&vectors, &groups))
}

fn reach_from(succ: &[Vec<usize>], s: usize) -> Vec<bool> {
    let mut seen = vec![false; succ.len()];
    let mut stack = vec![s];
    seen[s] = true;
    while let Some(v) = stack.pop() {
        for &t in &succ[v] {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen
}

/// Classes of mutually reachable vertices within `inside`.
fn classes(succ: &[Vec<usize>], inside: &[bool]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let restricted: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            if inside[v] {
                succ[v].iter().copied().filter(|&t| inside[t]).collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    let reach: Vec<Vec<bool>> = (0..n).map(|v| reach_from(&restricted, v)).collect();
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for v in 0..n {
        if !inside[v] || assigned[v] {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|&u| inside[u] && reach[v][u] && reach[u][v]).collect();
        for &u in &class {
            assigned[u] = true;
        }
        out.push(class);
    }
    out
}

/// Calls `f` with the threshold vector, the simple cycles and the cycle
/// groups that need positive weight, for every class of every branch of
/// every threshold candidate, until `f` returns true.
fn for_each_mp_component(
    game: &Game,
    goal: &Gr1Formula,
    cfg: &OracleConfig,
    mut f: impl FnMut(&[Rational], &[Vec<StateId>], &[Vec<bool>]) -> bool,
) -> Result<bool, OracleError> {
    if goal.antecedents.len() > 1 || goal.consequents.len() > 1 {
        return Err(OracleError::Unsupported(
            "MP oracle needs a GR(1) specification with at most one set per side".into(),
        ));
    }
    let arena = &game.arena;
    let n = game.num_players();
    let ns = arena.num_states();
    let np = arena.num_profiles();
    let pun: Vec<Vec<Rational>> = (0..n)
        .map(|i| brute_pun_mp(game, i, cfg))
        .collect::<Result<_, _>>()?;
    let cands: Vec<Vec<Rational>> = pun
        .iter()
        .map(|v| {
            let mut c = v.clone();
            c.sort();
            c.dedup();
            c
        })
        .collect();
    let total: u128 = cands.iter().map(|c| c.len() as u128).product();
    check_size(total, cfg, "threshold vectors")?;
    let marks = |e: Option<&BoolExpr>| -> Option<Vec<bool>> { e.map(|e| (0..ns).map(|s| e.eval(arena.label(s))).collect()) };
    let psi = marks(goal.antecedents.first());
    let theta = marks(goal.consequents.first());
    let cap = cfg.max_enumeration as usize;

    for zi in 0..total {
        let mut rem = zi;
        let z: Vec<Rational> = cands
            .iter()
            .map(|c| {
                let k = (rem % c.len() as u128) as usize;
                rem /= c.len() as u128;
                c[k].clone()
            })
            .collect();
        let mut succ = vec![Vec::new(); ns];
        for s in 0..ns {
            for p in 0..np {
                let t = arena.tr(s, p);
                if succ[s].contains(&t) {
                    continue;
                }
                if (0..n).all(|i| deviations(arena, s, p, i).all(|u| pun[i][u] <= z[i])) {
                    succ[s].push(t);
                }
            }
        }
        let reach = reach_from(&succ, arena.initial());
        // The consequent branch, then (with an antecedent present and a
        // consequent that can fail) the branch avoiding the antecedent.
        let mut branches: Vec<(Vec<bool>, bool)> = vec![(reach.clone(), true)];
        if let (Some(psi), Some(_)) = (&psi, &theta) {
            branches.push(((0..ns).map(|s| reach[s] && !psi[s]).collect(), false));
        }
        for (inside, use_theta) in branches {
            for class in classes(&succ, &inside) {
                let mut member = vec![false; ns];
                for &s in &class {
                    member[s] = true;
                }
                let cycles = simple_cycles(&succ, &member, cap)?;
                if cycles.is_empty() {
                    continue;
                }
                let groups: Vec<Vec<bool>> = match (&theta, use_theta) {
                    (Some(th), true) => vec![cycles.iter().map(|c| c.iter().any(|&s| th[s])).collect()],
                    _ => Vec::new(),
                };
                if f(&z, &cycles, &groups) {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

fn mp_goal(spec: &Specification) -> Result<&Gr1Formula, OracleError> {
    match spec {
        Specification::Gr1(g) => Ok(g),
        Specification::Ltl(_) => Err(OracleError::Unsupported("MP oracle needs a GR(1) specification".into())),
    }
}

fn brute_e_nash_mp(game: &Game, spec: &Specification, cfg: &OracleConfig) -> Result<bool, OracleError> {
    let w = game.weights().expect("MP game");
    let n = game.num_players();
    for_each_mp_component(game, mp_goal(spec)?, cfg, |z, cycles, groups| {
        let vectors: Vec<Vec<Rational>> = cycles
            .iter()
            .map(|c| {
                (0..n)
                    .map(|i| c.iter().map(|&s| Rational::from_int(w.of(i, s)) - &z[i]).sum())
                    .collect()
            })
            .collect();
        cone_feasible(&vectors, groups)
    })
}

/// Solves a square system exactly; `None` when singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let k = b.len();
    for col in 0..k {
        let piv = (col..k).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..k {
                    let d = &f * &a[col][c];
                    a[r][c] -= &d;
                }
                let d = &f * &b[col];
                b[r] -= &d;
            }
        }
    }
    Some((0..k).map(|r| &b[r] / &a[r][r]).collect())
}

/// Vertices of `{μ ≥ 0, Σμ = 1, Σ μ_c a_c ≥ 0}`, by choosing a support
/// and a set of tight rows and solving.
fn simplex_vertices(avgs: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let k = avgs.len();
    let d = avgs.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let subsets = |size: usize, from: usize| -> Vec<Vec<usize>> {
        let mut res: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..size {
            res = res
                .into_iter()
                .flat_map(|s| {
                    let lo = s.last().map_or(0, |&x| x + 1);
                    (lo..from).map(move |x| {
                        let mut t = s.clone();
                        t.push(x);
                        t
                    })
                })
                .collect();
        }
        res
    };
    for size in 1..=(d + 1).min(k) {
        for support in subsets(size, k) {
            for tight in subsets(size - 1, d) {
                let mut a = vec![vec![Rational::one(); size]];
                let mut b = vec![Rational::one()];
                for &row in &tight {
                    a.push(support.iter().map(|&c| avgs[c][row].clone()).collect());
                    b.push(Rational::zero());
                }
                let Some(mu) = solve_square(a, b) else { continue };
                if mu.iter().any(Rational::is_negative) {
                    continue;
                }
                let ok = (0..d).all(|row| {
                    let v: Rational = support.iter().zip(&mu).map(|(&c, m)| m * &avgs[c][row]).sum();
                    !v.is_negative()
                });
                if ok {
                    let mut full = vec![Rational::zero(); k];
                    for (&c, m) in support.iter().zip(mu) {
                        full[c] = m;
                    }
                    out.push(full);
                }
            }
        }
    }
    out
}

/// Exact supremum (or infimum) of the utilitarian welfare over equilibria
/// satisfying `spec`; `None` when there is no such equilibrium.
pub fn brute_opt_welfare(game: &Game, spec: &Specification, maximize: bool, cfg: &OracleConfig) -> Result<Option<Rational>, OracleError> {
    let w = game.weights().ok_or_else(|| OracleError::Unsupported("not an MP game".into()))?;
    let n = game.num_players();
    let mut best: Option<Rational> = None;
    for_each_mp_component(game, mp_goal(spec)?, cfg, |z, cycles, groups| {
        let avg = |c: &Vec<StateId>, f: &dyn Fn(StateId) -> i64| Rational::mean(c.iter().map(|&s| f(s)));
        let sums: Vec<Vec<Rational>> = cycles
            .iter()
            .map(|c| (0..n).map(|i| avg(c, &|s| w.of(i, s)) - &z[i]).collect())
            .collect();
        if !cone_feasible(&sums, groups) {
            return false;
        }
        let usw: Vec<Rational> = cycles
            .iter()
            .map(|c| avg(c, &|s| (0..n).map(|i| w.of(i, s)).sum()))
            .collect();
        for mu in simplex_vertices(&sums) {
            let v: Rational = mu.iter().zip(&usw).map(|(m, u)| m * u).sum();
            let better = match &best {
                None => true,
                Some(b) => (maximize && &v > b) || (!maximize && &v < b),
            };
            if better {
                best = Some(v);
            }
        }
        false
    })?;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{g1, g2};
    use crate::formula::{parse_gr1, parse_ltl};
    use crate::model::Weights;
    use crate::punish_gr1::punish_region;

    #[test]
    fn g2_welfare_optimum() {
        let cfg = OracleConfig::default();
        let g = g2();
        assert_eq!(brute_opt_welfare(&g, &Specification::truth(), true, &cfg).unwrap(), Some(r(2)));
        assert_eq!(brute_opt_welfare(&g, &Specification::truth(), false, &cfg).unwrap(), Some(r(2)));
    }

    #[test]
    fn vertices_of_mixing() {
        let v = simplex_vertices(&[vec![r(1)], vec![r(-1)]]);
        assert!(v.contains(&vec![Rational::new(1, 2), Rational::new(1, 2)]));
        assert!(v.contains(&vec![r(1), r(0)]));
        assert_eq!(v.len(), 2);
    }

    fn r(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn ltl_on_lassos() {
        let g = g1();
        let f = |t: &str| parse_ltl(t, g.arena.atoms()).unwrap();
        assert!(eval_ltl(&f("GF p"), &[0, 1], 1, &g.arena));
        assert!(!eval_ltl(&f("GF p"), &[0, 2], 1, &g.arena));
        assert!(eval_ltl(&f("G !p"), &[0, 2], 1, &g.arena));
        assert!(eval_ltl(&f("X p"), &[0, 1], 1, &g.arena));
        assert!(eval_ltl(&f("!p U p"), &[0, 1], 1, &g.arena));
        assert!(!eval_ltl(&f("!p U p"), &[0, 2], 1, &g.arena));
        assert!(eval_ltl(&f("FG !p"), &[0, 2], 1, &g.arena));
    }

    #[test]
    fn g1_punishment() {
        let g = g1();
        let cfg = OracleConfig::default();
        assert_eq!(brute_pun_gr1(&g, 0, &cfg).unwrap(), vec![false, false, true]);
        for j in 0..2 {
            assert!(verify_punishing_strategy(&g, &punish_region(&g, j), &cfg).unwrap());
        }
    }

    #[test]
    fn g2_punishment() {
        let g = g2();
        let cfg = OracleConfig::default();
        assert_eq!(brute_pun_mp(&g, 0, &cfg).unwrap(), vec![r(2), r(2)]);
        assert_eq!(brute_pun_mp(&g, 1, &cfg).unwrap(), vec![r(0), r(0)]);
    }

    #[test]
    fn single_state_value() {
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
        let g = Game::new(arena, Goals::MeanPayoff(Weights(vec![vec![5]]))).unwrap();
        let cfg = OracleConfig::default();
        assert_eq!(brute_pun_mp(&g, 0, &cfg).unwrap(), vec![r(5)]);
        assert!(brute_e_nash(&g, &Specification::truth(), &cfg).unwrap());
    }

    #[test]
    fn equilibrium_examples() {
        let cfg = OracleConfig::default();
        let g = g1();
        let spec = |t: &str| Specification::Gr1(parse_gr1(t, g.arena.atoms()).unwrap());
        assert!(brute_e_nash(&g, &spec("GF p"), &cfg).unwrap());
        let never = Specification::Ltl(parse_ltl("G !p", g.arena.atoms()).unwrap());
        assert!(!brute_e_nash(&g, &never, &cfg).unwrap());
        let g = g2();
        assert!(brute_e_nash(&g, &Specification::truth(), &cfg).unwrap());
        let at_s0 = Specification::Gr1(Gr1Formula::new(vec![], vec![BoolExpr::Atom(0)]));
        assert!(!brute_e_nash(&g, &at_s0, &cfg).unwrap());
    }

    #[test]
    fn cones() {
        // (1, -1) and (-1, 2): 2:1 mix gives (1, 0).
        let v = vec![vec![r(1), r(-1)], vec![r(-1), r(2)]];
        assert!(cone_feasible(&v, &[]));
        assert!(!cone_feasible(&[vec![r(1), r(-1)], vec![r(-2), r(1)]], &[]));
        assert!(!cone_feasible(&v, &[vec![false, false]]));
        assert!(cone_feasible(&v, &[vec![false, true]]));
    }

    #[test]
    fn cycles_of_small_graph() {
        let succ = vec![vec![0, 1], vec![0, 2], vec![1]];
        let cycles = simple_cycles(&succ, &[true; 3], 100).unwrap();
        assert_eq!(cycles, vec![vec![0], vec![0, 1], vec![1, 2]]);
    }
}
