//! E-Nash, A-Nash and Non-emptiness drivers, witness checks and synthesis
//! of equilibrium strategy profiles from witness lassos.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

use crate::buchi::translate;
use crate::formula::{lasso_satisfies, negate_to_ltl, Gr1Formula, Ltl};
use crate::lasso_search::{build_streett_product, restrict_gr1, restrict_mp, streett_nonempty};
use crate::lp::{mp_lasso_search, shifted, CycleSpec, WitnessGapError};
use crate::model::{
    gr1_payoff, mp_payoff, winners_losers, ActionId, Game, Goals, Lasso, PlayerId, ProfileId, StateId,
    StrategyProfile, TransducerStrategy,
};
use crate::punish_gr1::{punish_region, punishing_secure, PunishResult};
use crate::punish_mp::{punish_values, z_secure, PunishValues};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Specification {
    Gr1(Gr1Formula),
    Ltl(Ltl),
}

impl Specification {
    pub fn truth() -> Self {
        Specification::Gr1(Gr1Formula::truth())
    }

    pub fn to_ltl(&self) -> Ltl {
        match self {
            Specification::Gr1(g) => g.to_ltl(),
            Specification::Ltl(f) => f.clone(),
        }
    }

    pub fn holds_on(&self, lasso: &Lasso, game: &Game) -> bool {
        match self {
            Specification::Gr1(g) => gr1_payoff(lasso, &game.arena, g),
            Specification::Ltl(f) => lasso_satisfies(f, lasso, &game.arena),
        }
    }
}

/// The candidate under which a witness was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Candidate {
    /// GR(1) games: the assumed winner set `W`.
    Winners(Vec<PlayerId>),
    /// MP games: the threshold vector `z`.
    Thresholds(Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub lasso: Lasso,
    pub candidate: Candidate,
    /// Winners actually observed on the lasso (GR(1) games).
    pub winners: Vec<PlayerId>,
    /// Payoffs along the lasso (MP games).
    pub payoffs: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub answer: bool,
    pub witness: Option<Witness>,
    /// Set when the answer is yes but no witness cycle could be built.
    pub witness_gap: Option<Candidate>,
    pub candidates_examined: usize,
}

impl Verdict {
    fn no(examined: usize) -> Verdict {
        Verdict {
            answer: false,
            witness: None,
            witness_gap: None,
            candidates_examined: examined,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    /// Worker threads for the candidate loop; 1 runs serially.
    pub jobs: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { jobs: 1 }
    }
}

/// Runs `f` on the candidates in order and returns the first hit with its
/// index, identical for any number of jobs.
fn first_hit<C: Sync, T: Send>(cands: &[C], opts: Options, f: impl Fn(&C) -> Option<T> + Sync) -> Option<(usize, T)> {
    if opts.jobs <= 1 {
        return cands.iter().enumerate().find_map(|(i, c)| f(c).map(|t| (i, t)));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .expect("thread pool");
    pool.install(|| {
        cands
            .par_iter()
            .enumerate()
            .find_map_first(|(i, c)| f(c).map(|t| (i, t)))
    })
}

/// Subsets of `0..n` by increasing size, then lexicographically.
pub fn winner_candidates(n: usize) -> Vec<Vec<PlayerId>> {
    let mut all: Vec<Vec<PlayerId>> = (0u64..(1u64 << n))
        .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all
}

/// Threshold vectors over the per-player candidate values, each component
/// in descending order, lexicographic across players.
pub fn threshold_candidates(values: &[PunishValues]) -> Vec<Vec<Rational>> {
    let sets: Vec<Vec<Rational>> = values
        .iter()
        .map(|v| {
            let mut c = v.candidates();
            c.reverse();
            c
        })
        .collect();
    let mut out: Vec<Vec<Rational>> = vec![Vec::new()];
    for set in &sets {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                set.iter().map(move |v| {
                    let mut z = prefix.clone();
                    z.push(v.clone());
                    z
                })
            })
            .collect();
    }
    out
}

pub fn e_nash_gr1(game: &Game, spec: &Specification, opts: Options) -> Verdict {
    let goals = game.gr1_goals().expect("GR(1) game");
    let n = game.num_players();
    let punish: Vec<PunishResult> = (0..n).map(|j| punish_region(game, j)).collect();
    let buchi = match spec {
        Specification::Ltl(f) => Some(translate(f)),
        Specification::Gr1(_) => None,
    };
    let cands = winner_candidates(n);
    let hit = first_hit(&cands, opts, |w| {
        let losers: Vec<PlayerId> = (0..n).filter(|i| !w.contains(i)).collect();
        let ra = restrict_gr1(game, &losers, &punish).ok()?;
        let mut objectives: Vec<Gr1Formula> = Vec::new();
        if let Specification::Gr1(g) = spec {
            objectives.push(g.clone());
        }
        objectives.extend(w.iter().map(|&i| goals[i].clone()));
        let product = build_streett_product(&game.arena, &ra, &objectives, buchi.as_ref());
        streett_nonempty(&product)
    });
    match hit {
        None => Verdict::no(cands.len()),
        Some((i, lasso)) => {
            let lasso = lasso.canonical();
            let (winners, _) = winners_losers(game, &lasso).expect("GR(1) game");
            Verdict {
                answer: true,
                witness: Some(Witness {
                    lasso,
                    candidate: Candidate::Winners(cands[i].clone()),
                    winners,
                    payoffs: Vec::new(),
                }),
                witness_gap: None,
                candidates_examined: i + 1,
            }
        }
    }
}

/// Extra requirements on the cycle of an MP equilibrium, used for welfare
/// queries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MpExtra {
    /// Additional per-state weight vectors whose cycle average must be ≥ 0.
    pub dims: Vec<Vec<Rational>>,
    /// Raise every player's threshold to at least this value.
    pub floor: Option<Rational>,
}

pub fn e_nash_mp(game: &Game, spec: &Specification, opts: Options) -> Verdict {
    e_nash_mp_with(game, spec, &MpExtra::default(), opts)
}

enum MpOutcome {
    Found(Lasso),
    Gap,
}

pub fn e_nash_mp_with(game: &Game, spec: &Specification, extra: &MpExtra, opts: Options) -> Verdict {
    let w = game.weights().expect("MP game");
    let n = game.num_players();
    let values: Vec<PunishValues> = (0..n).map(|i| punish_values(game, i)).collect();
    let buchi = match spec {
        Specification::Ltl(f) => Some(translate(f)),
        Specification::Gr1(_) => None,
    };
    let cycle_spec = match (spec, &buchi) {
        (Specification::Gr1(g), _) => CycleSpec::Gr1(g),
        (Specification::Ltl(_), Some(aut)) => CycleSpec::Buchi(aut),
        _ => unreachable!(),
    };
    let cands = threshold_candidates(&values);
    let search = |z: &Vec<Rational>| -> Option<MpOutcome> {
        let ra = restrict_mp(game, z, &values).ok()?;
        let mut dims: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let shift = match &extra.floor {
                    Some(t) if t > &z[i] => t.clone(),
                    _ => z[i].clone(),
                };
                shifted(w.player(i), &shift)
            })
            .collect();
        dims.extend(extra.dims.iter().cloned());
        match mp_lasso_search(&game.arena, &ra, &dims, cycle_spec) {
            Ok(Some(l)) => Some(MpOutcome::Found(l)),
            Ok(None) => None,
            Err(WitnessGapError) => Some(MpOutcome::Gap),
        }
    };
    let hit = first_hit(&cands, opts, |z| match search(z) {
        Some(MpOutcome::Found(l)) => Some(l),
        _ => None,
    });
    if let Some((i, lasso)) = hit {
        let lasso = lasso.canonical();
        let payoffs = (0..n).map(|p| mp_payoff(&lasso, w, p)).collect();
        return Verdict {
            answer: true,
            witness: Some(Witness {
                lasso,
                candidate: Candidate::Thresholds(cands[i].clone()),
                winners: Vec::new(),
                payoffs,
            }),
            witness_gap: None,
            candidates_examined: i + 1,
        };
    }
    let gap = first_hit(&cands, opts, |z| match search(z) {
        Some(MpOutcome::Gap) => Some(()),
        _ => None,
    });
    match gap {
        Some((i, ())) => Verdict {
            answer: true,
            witness: None,
            witness_gap: Some(Candidate::Thresholds(cands[i].clone())),
            candidates_examined: cands.len(),
        },
        None => Verdict::no(cands.len()),
    }
}

pub fn e_nash(game: &Game, spec: &Specification, opts: Options) -> Verdict {
    match game.goals {
        Goals::Gr1(_) => e_nash_gr1(game, spec, opts),
        Goals::MeanPayoff(_) => e_nash_mp(game, spec, opts),
    }
}

/// Whether every equilibrium run satisfies `spec`; a witness, if present,
/// is an equilibrium violating it.
pub fn a_nash(game: &Game, spec: &Specification, opts: Options) -> Verdict {
    let neg = Specification::Ltl(negate_to_ltl(&spec.to_ltl()));
    let mut v = e_nash(game, &neg, opts);
    v.answer = !v.answer;
    v
}

pub fn non_emptiness(game: &Game, opts: Options) -> Verdict {
    e_nash(game, &Specification::truth(), opts)
}

/// Punishment data of every player, as used by the checks and synthesis.
#[derive(Debug, Clone)]
pub enum Punishment {
    Gr1(Vec<PunishResult>),
    Mp(Vec<PunishValues>),
}

impl Punishment {
    pub fn compute(game: &Game) -> Punishment {
        let n = game.num_players();
        match game.goals {
            Goals::Gr1(_) => Punishment::Gr1((0..n).map(|j| punish_region(game, j)).collect()),
            Goals::MeanPayoff(_) => Punishment::Mp((0..n).map(|i| punish_values(game, i)).collect()),
        }
    }
}

/// Re-checks a witness against the equilibrium characterisation: valid
/// lasso from the initial state, specification satisfied, and for GR(1)
/// every step punishing-secure for every actual loser, for MP every step
/// `z_i`-secure and every payoff at least `z_i`.
pub fn check_witness(game: &Game, spec: &Specification, w: &Witness, pun: &Punishment) -> Result<(), String> {
    let arena = &game.arena;
    w.lasso
        .validate(arena, arena.initial())
        .map_err(|e| format!("invalid lasso: {e}"))?;
    if !spec.holds_on(&w.lasso, game) {
        return Err("specification fails on the lasso".into());
    }
    match (pun, &w.candidate) {
        (Punishment::Gr1(pun), _) => {
            let (winners, losers) = winners_losers(game, &w.lasso).map_err(|e| e.to_string())?;
            if let Candidate::Winners(cw) = &w.candidate {
                if let Some(i) = cw.iter().find(|i| !winners.contains(i)) {
                    return Err(format!("claimed winner {i} loses on the lasso"));
                }
            }
            for step in w.lasso.steps() {
                for &j in &losers {
                    if !punishing_secure(arena, step.state, step.profile, j, &pun[j].region) {
                        return Err(format!("step at state {} is not punishing-secure for {j}", step.state));
                    }
                }
            }
        }
        (Punishment::Mp(vals), Candidate::Thresholds(z)) => {
            let weights = game.weights().ok_or("not an MP game")?;
            for i in 0..game.num_players() {
                if mp_payoff(&w.lasso, weights, i) < z[i] {
                    return Err(format!("payoff of player {i} is below z"));
                }
                for step in w.lasso.steps() {
                    if !z_secure(arena, step.state, step.profile, i, &z[i], &vals[i]) {
                        return Err(format!("step at state {} is not z-secure for {i}", step.state));
                    }
                }
            }
        }
        (Punishment::Mp(_), _) => return Err("MP witness without thresholds".into()),
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthesisError {
    #[error("the verdict has no witness lasso")]
    NoWitness,
    #[error("the witness does not fit the game: {0}")]
    BadWitness(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Flag {
    Conform,
    /// Deviator and, for GR(1), the configuration of its counter arena.
    Punish(PlayerId, usize),
}

/// Memory of the synthesised transducers: position on the lasso, current
/// arena state and the deviation flag.
type Memory = (usize, StateId, Flag);

/// Builds a strategy profile whose outcome is the witness lasso and in
/// which any unilateral deviator is punished from the next state on.
pub fn synthesize_profile(game: &Game, witness: Option<&Witness>, pun: &Punishment) -> Result<StrategyProfile, SynthesisError> {
    let w = witness.ok_or(SynthesisError::NoWitness)?;
    let arena = &game.arena;
    let lasso = &w.lasso;
    lasso
        .validate(arena, arena.initial())
        .map_err(|e| SynthesisError::BadWitness(e.to_string()))?;
    let n = arena.num_players();
    let len = lasso.len();
    let next_t = |t: usize| if t + 1 < len { t + 1 } else { lasso.prefix.len() };

    let deviator = |expected: ProfileId, p: ProfileId| -> Option<PlayerId> {
        let diff: Vec<PlayerId> = (0..n)
            .filter(|&i| arena.action_of(expected, i) != arena.action_of(p, i))
            .collect();
        (diff.len() == 1).then(|| diff[0])
    };
    let punish_start = |j: PlayerId, s: StateId| -> usize {
        match pun {
            Punishment::Gr1(r) => r[j].counters.config(s, 0, 0),
            Punishment::Mp(_) => 0,
        }
    };
    let delta = |m: Memory, p: ProfileId| -> Memory {
        let (t, s, flag) = m;
        let s2 = arena.tr(s, p);
        match flag {
            Flag::Conform => {
                let expected = lasso.at(t).profile;
                if p == expected {
                    return (next_t(t), s2, Flag::Conform);
                }
                match deviator(expected, p) {
                    Some(j) => (0, s2, Flag::Punish(j, punish_start(j, s2))),
                    None => (next_t(t), s2, Flag::Conform),
                }
            }
            Flag::Punish(j, c) => {
                let c2 = match pun {
                    Punishment::Gr1(r) => r[j].counters.step(c, s2),
                    Punishment::Mp(_) => 0,
                };
                (0, s2, Flag::Punish(j, c2))
            }
        }
    };
    let output = |m: Memory, i: PlayerId| -> ActionId {
        let (t, s, flag) = m;
        match flag {
            Flag::Conform => arena.action_of(lasso.at(t).profile, i),
            Flag::Punish(j, _) if j == i => 0,
            Flag::Punish(j, c) => {
                let partial = match pun {
                    Punishment::Gr1(r) => r[j].strategy[c],
                    Punishment::Mp(v) => Some(v[j].coalition[s]),
                };
                partial.map_or(0, |pp| arena.action_of(pp, i))
            }
        }
    };

    let start: Memory = (0, arena.initial(), Flag::Conform);
    let mut index: HashMap<Memory, usize> = HashMap::from([(start, 0)]);
    let mut states = vec![start];
    let mut queue = VecDeque::from([0usize]);
    let np = arena.num_profiles();
    let mut step_table: Vec<usize> = Vec::new();
    while let Some(q) = queue.pop_front() {
        debug_assert_eq!(q * np, step_table.len());
        for p in 0..np {
            let m2 = delta(states[q], p);
            let id = *index.entry(m2).or_insert_with(|| {
                states.push(m2);
                queue.push_back(states.len() - 1);
                states.len() - 1
            });
            step_table.push(id);
        }
    }
    let profile = (0..n)
        .map(|i| TransducerStrategy {
            num_states: states.len(),
            initial: 0,
            num_profiles: np,
            step: step_table.clone(),
            output: states.iter().map(|&m| output(m, i)).collect(),
        })
        .collect();
    Ok(StrategyProfile(profile))
}

/// The flag component of a synthesised transducer state, for inspection:
/// `None` while conforming, `Some(j)` once `j` has deviated.
pub fn synthesized_flags(game: &Game, witness: &Witness, pun: &Punishment) -> Vec<Option<PlayerId>> {
    // Re-run the construction and report the flag of every memory state.
    let profile = synthesize_profile(game, Some(witness), pun).expect("witness");
    let t = &profile.0[0];
    let np = t.num_profiles;
    // Walk from the initial state to classify each memory state by the first
    // deviating profile that reaches it.
    let mut flags = vec![None; t.num_states];
    let mut seen = vec![false; t.num_states];
    let mut queue = VecDeque::from([(0usize, None::<PlayerId>)]);
    seen[0] = true;
    let arena = &game.arena;
    let lasso = &witness.lasso;
    let len = lasso.len();
    let mut pos = vec![0usize; t.num_states];
    while let Some((q, flag)) = queue.pop_front() {
        flags[q] = flag;
        for p in 0..np {
            let q2 = t.next(q, p);
            if seen[q2] {
                continue;
            }
            seen[q2] = true;
            let f2 = match flag {
                Some(j) => Some(j),
                None => {
                    let expected = lasso.at(pos[q]).profile;
                    let diff: Vec<PlayerId> = (0..arena.num_players())
                        .filter(|&i| arena.action_of(expected, i) != arena.action_of(p, i))
                        .collect();
                    if diff.len() == 1 {
                        Some(diff[0])
                    } else {
                        pos[q2] = if pos[q] + 1 < len { pos[q] + 1 } else { lasso.prefix.len() };
                        None
                    }
                }
            };
            queue.push_back((q2, f2));
        }
    }
    flags
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{g1, g2};
    use crate::formula::{parse_gr1, parse_ltl, BoolExpr};
    use crate::model::{play, Arena, Step, Weights};

    fn gr1_spec(game: &Game, text: &str) -> Specification {
        Specification::Gr1(parse_gr1(text, game.arena.atoms()).unwrap())
    }

    fn ltl_spec(game: &Game, text: &str) -> Specification {
        Specification::Ltl(parse_ltl(text, game.arena.atoms()).unwrap())
    }

    #[test]
    fn candidate_orders() {
        assert_eq!(
            winner_candidates(3),
            vec![
                vec![],
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 1, 2]
            ]
        );
    }

    #[test]
    fn g1_examples() {
        let g = g1();
        let v = e_nash(&g, &gr1_spec(&g, "GF p"), Options::default());
        assert!(v.answer);
        let w = v.witness.as_ref().unwrap();
        assert_eq!(w.candidate, Candidate::Winners(vec![0, 1]));
        assert_eq!(w.lasso.cycle.iter().map(|s| s.state).collect::<Vec<_>>(), vec![1]);
        let pun = Punishment::compute(&g);
        check_witness(&g, &gr1_spec(&g, "GF p"), w, &pun).unwrap();
        assert!(!e_nash(&g, &ltl_spec(&g, "G !p"), Options::default()).answer);
        assert!(a_nash(&g, &gr1_spec(&g, "GF p"), Options::default()).answer);
        assert!(non_emptiness(&g, Options::default()).answer);
    }

    #[test]
    fn g2_examples() {
        let g = g2();
        let v = e_nash(&g, &Specification::truth(), Options::default());
        assert!(v.answer);
        let w = v.witness.as_ref().unwrap();
        assert_eq!(
            w.candidate,
            Candidate::Thresholds(vec![Rational::from_int(2), Rational::zero()])
        );
        assert!(w.lasso.cycle.iter().all(|s| s.state == 1));
        let at_s0 = Specification::Gr1(Gr1Formula::new(vec![], vec![BoolExpr::Atom(0)]));
        assert!(!e_nash(&g, &at_s0, Options::default()).answer);
        assert!(non_emptiness(&g, Options::default()).answer);
    }

    #[test]
    fn single_state_games() {
        let arena = Arena::new(
            vec!["1".into(), "2".into()],
            vec![vec!["a".into()], vec!["a".into(), "b".into()]],
            vec!["s".into()],
            0,
            vec![],
            vec![Default::default()],
            |_, _| 0,
        )
        .unwrap();
        let g = Game::new(arena, Goals::MeanPayoff(Weights(vec![vec![-1], vec![3]]))).unwrap();
        let v = e_nash(&g, &Specification::truth(), Options::default());
        assert!(v.answer);
        let pun = Punishment::compute(&g);
        let w = v.witness.unwrap();
        assert_eq!(w.payoffs, vec![Rational::from_int(-1), Rational::from_int(3)]);
        let prof = synthesize_profile(&g, Some(&w), &pun).unwrap();
        assert!(prof.validate(&g.arena));
        assert_eq!(play(&g.arena, &prof).canonical(), w.lasso);
    }

    #[test]
    fn synthesis_replays_and_flags() {
        let g = g1();
        let spec = gr1_spec(&g, "GF p");
        let v = e_nash(&g, &spec, Options::default());
        let w = v.witness.unwrap();
        let pun = Punishment::compute(&g);
        let prof = synthesize_profile(&g, Some(&w), &pun).unwrap();
        assert!(prof.validate(&g.arena));
        assert_eq!(play(&g.arena, &prof).canonical(), w.lasso);
        // Player 2 deviates at s0 from the witness profile.
        let expected = w.lasso.at(0).profile;
        let dev = g.arena.with_action(expected, 1, 1 - g.arena.action_of(expected, 1));
        let q = prof.0[0].next(0, dev);
        let flags = synthesized_flags(&g, &w, &pun);
        assert_eq!(flags[q], Some(1));

        let g = g2();
        let v = e_nash(&g, &Specification::truth(), Options::default());
        let w = v.witness.unwrap();
        let pun = Punishment::compute(&g);
        let prof = synthesize_profile(&g, Some(&w), &pun).unwrap();
        assert_eq!(play(&g.arena, &prof).canonical(), w.lasso);
        assert_eq!(w.lasso.steps().next().map(|s: &Step| s.state), Some(0));
    }

    #[test]
    fn parallel_matches_serial() {
        let g = g1();
        let spec = ltl_spec(&g, "F p");
        let a = e_nash(&g, &spec, Options { jobs: 1 });
        let b = e_nash(&g, &spec, Options { jobs: 4 });
        assert_eq!(a, b);
    }
}
