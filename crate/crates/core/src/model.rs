//! Concurrent game arenas, goals, lassos and transducer strategies.
//!
//! Players, actions, states and atoms are referred to by dense indices.
//! A full action profile is encoded as a single mixed-radix index over the
//! per-player action sets (player 0 most significant), so the transition
//! function is a flat `states × profiles` table.

use std::collections::{BTreeSet, HashMap};

use crate::formula::Gr1Formula;
use crate::rational::Rational;

pub type PlayerId = usize;
pub type StateId = usize;
pub type ActionId = usize;
pub type AtomId = usize;
/// Mixed-radix index of a full action profile.
pub type ProfileId = usize;

/// Atomic propositions true in a state.
pub type Label = BTreeSet<AtomId>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("arena needs at least one {0}")]
    Empty(&'static str),
    #[error("player `{0}` has no actions")]
    NoActions(String),
    #[error("initial state {0} out of range")]
    BadInitial(StateId),
    #[error("label of state `{state}` references undeclared atom {atom}")]
    UndeclaredAtom { state: String, atom: AtomId },
    #[error("transition from `{state}` under profile {profile} leads to unknown state {target}")]
    BadTarget {
        state: String,
        profile: String,
        target: StateId,
    },
    #[error("transition table has {got} entries, expected {expected}")]
    TableSize { got: usize, expected: usize },
    #[error("weights must cover {players} players × {states} states")]
    WeightShape { players: usize, states: usize },
    #[error("expected {expected} goals, found {got}")]
    GoalCount { expected: usize, got: usize },
    #[error("goal of player `{0}` references an undeclared atom")]
    GoalAtom(String),
    #[error("winners/losers are only defined for GR(1) games")]
    NotGr1,
    #[error("operation requires a mean-payoff game")]
    NotMeanPayoff,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LassoError {
    #[error("lasso cycle is empty")]
    EmptyCycle,
    #[error("lasso does not start at state {expected}")]
    WrongStart { expected: StateId },
    #[error("step {index}: state or profile out of range")]
    OutOfRange { index: usize },
    #[error("step {index}: tr({state}, profile {profile}) = {actual}, but the next entry is {next}")]
    Inconsistent {
        index: usize,
        state: StateId,
        profile: ProfileId,
        actual: StateId,
        next: StateId,
    },
}

/// A finite concurrent game structure with state-independent action sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arena {
    players: Vec<String>,
    actions: Vec<Vec<String>>,
    states: Vec<String>,
    initial: StateId,
    atoms: Vec<String>,
    labels: Vec<Label>,
    strides: Vec<usize>,
    num_profiles: usize,
    transitions: Vec<StateId>,
}

impl Arena {
    /// Builds an arena from a transition function evaluated on every
    /// (state, full profile) pair, which makes totality hold by construction.
    pub fn new(
        players: Vec<String>,
        actions: Vec<Vec<String>>,
        states: Vec<String>,
        initial: StateId,
        atoms: Vec<String>,
        labels: Vec<Label>,
        mut tr: impl FnMut(StateId, &[ActionId]) -> StateId,
    ) -> Result<Arena, ModelError> {
        let (strides, num_profiles) = Self::check_shape(&players, &actions, &states, initial)?;
        let mut transitions = Vec::with_capacity(states.len() * num_profiles);
        let mut scratch = vec![0; players.len()];
        for s in 0..states.len() {
            for p in 0..num_profiles {
                decode_into(&strides, &actions, p, &mut scratch);
                transitions.push(tr(s, &scratch));
            }
        }
        Self::from_parts(players, actions, states, initial, atoms, labels, strides, num_profiles, transitions)
    }

    /// Builds an arena from a flat table indexed by `state * num_profiles + profile`.
    pub fn from_table(
        players: Vec<String>,
        actions: Vec<Vec<String>>,
        states: Vec<String>,
        initial: StateId,
        atoms: Vec<String>,
        labels: Vec<Label>,
        transitions: Vec<StateId>,
    ) -> Result<Arena, ModelError> {
        let (strides, num_profiles) = Self::check_shape(&players, &actions, &states, initial)?;
        let expected = states.len() * num_profiles;
        if transitions.len() != expected {
            return Err(ModelError::TableSize {
                got: transitions.len(),
                expected,
            });
        }
        Self::from_parts(players, actions, states, initial, atoms, labels, strides, num_profiles, transitions)
    }

    fn check_shape(
        players: &[String],
        actions: &[Vec<String>],
        states: &[String],
        initial: StateId,
    ) -> Result<(Vec<usize>, usize), ModelError> {
        if players.is_empty() {
            return Err(ModelError::Empty("player"));
        }
        if states.is_empty() {
            return Err(ModelError::Empty("state"));
        }
        if actions.len() != players.len() {
            return Err(ModelError::Empty("action set per player"));
        }
        for (p, acts) in players.iter().zip(actions) {
            if acts.is_empty() {
                return Err(ModelError::NoActions(p.clone()));
            }
        }
        if initial >= states.len() {
            return Err(ModelError::BadInitial(initial));
        }
        let mut strides = vec![1; players.len()];
        for i in (0..players.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * actions[i + 1].len();
        }
        let num_profiles = strides[0] * actions[0].len();
        Ok((strides, num_profiles))
    }

    #[allow(clippy::too_many_arguments)]
    fn from_parts(
        players: Vec<String>,
        actions: Vec<Vec<String>>,
        states: Vec<String>,
        initial: StateId,
        atoms: Vec<String>,
        labels: Vec<Label>,
        strides: Vec<usize>,
        num_profiles: usize,
        transitions: Vec<StateId>,
    ) -> Result<Arena, ModelError> {
        if labels.len() != states.len() {
            return Err(ModelError::Empty("label set per state"));
        }
        for (s, label) in labels.iter().enumerate() {
            if let Some(&atom) = label.iter().find(|&&a| a >= atoms.len()) {
                return Err(ModelError::UndeclaredAtom {
                    state: states[s].clone(),
                    atom,
                });
            }
        }
        let arena = Arena {
            players,
            actions,
            states,
            initial,
            atoms,
            labels,
            strides,
            num_profiles,
            transitions,
        };
        for s in 0..arena.num_states() {
            for p in 0..num_profiles {
                let t = arena.transitions[s * num_profiles + p];
                if t >= arena.num_states() {
                    return Err(ModelError::BadTarget {
                        state: arena.states[s].clone(),
                        profile: arena.profile_name(p),
                        target: t,
                    });
                }
            }
        }
        Ok(arena)
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_profiles(&self) -> usize {
        self.num_profiles
    }

    pub fn num_actions(&self, player: PlayerId) -> usize {
        self.actions[player].len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn player_names(&self) -> &[String] {
        &self.players
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn action_names(&self, player: PlayerId) -> &[String] {
        &self.actions[player]
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn label(&self, s: StateId) -> &Label {
        &self.labels[s]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn player_index(&self, name: &str) -> Option<PlayerId> {
        self.players.iter().position(|s| s == name)
    }

    pub fn action_index(&self, player: PlayerId, name: &str) -> Option<ActionId> {
        self.actions[player].iter().position(|s| s == name)
    }

    #[inline]
    pub fn tr(&self, s: StateId, profile: ProfileId) -> StateId {
        self.transitions[s * self.num_profiles + profile]
    }

    /// Action of `player` inside an encoded profile.
    #[inline]
    pub fn action_of(&self, profile: ProfileId, player: PlayerId) -> ActionId {
        (profile / self.strides[player]) % self.actions[player].len()
    }

    /// Replaces the action of `player` in `profile`, giving `(a_{-player}, action)`.
    #[inline]
    pub fn with_action(&self, profile: ProfileId, player: PlayerId, action: ActionId) -> ProfileId {
        let stride = self.strides[player];
        profile - self.action_of(profile, player) * stride + action * stride
    }

    pub fn encode(&self, actions: &[ActionId]) -> ProfileId {
        debug_assert_eq!(actions.len(), self.num_players());
        actions
            .iter()
            .zip(&self.strides)
            .map(|(a, s)| a * s)
            .sum()
    }

    pub fn decode(&self, profile: ProfileId) -> ActionProfile {
        let mut v = vec![0; self.num_players()];
        decode_into(&self.strides, &self.actions, profile, &mut v);
        ActionProfile(v)
    }

    /// Profiles with `player`'s component fixed to action 0; each stands for
    /// one partial profile `a_{-player}`.
    pub fn partial_profiles(&self, player: PlayerId) -> impl Iterator<Item = ProfileId> + '_ {
        (0..self.num_profiles).filter(move |&p| self.action_of(p, player) == 0)
    }

    /// Successors `tr(s, (a_{-player}, a'))` for every `a'` of `player`.
    pub fn deviation_successors(
        &self,
        s: StateId,
        profile: ProfileId,
        player: PlayerId,
    ) -> impl Iterator<Item = StateId> + '_ {
        (0..self.num_actions(player)).map(move |a| self.tr(s, self.with_action(profile, player, a)))
    }

    pub fn profile_name(&self, profile: ProfileId) -> String {
        let names: Vec<&str> = self
            .decode(profile)
            .0
            .iter()
            .enumerate()
            .map(|(i, &a)| self.actions[i][a].as_str())
            .collect();
        format!("({})", names.join(", "))
    }

    /// Copy of the arena with one extra player whose actions never affect
    /// transitions.
    pub fn with_dummy_player(&self, name: &str, actions: Vec<String>) -> Result<Arena, ModelError> {
        let mut players = self.players.clone();
        players.push(name.to_string());
        let mut all_actions = self.actions.clone();
        all_actions.push(actions);
        let base: Vec<usize> = self.strides.clone();
        let n = self.num_players();
        Arena::new(
            players,
            all_actions,
            self.states.clone(),
            self.initial,
            self.atoms.clone(),
            self.labels.clone(),
            |s, acts| {
                let p: usize = acts[..n].iter().zip(&base).map(|(a, st)| a * st).sum();
                self.tr(s, p)
            },
        )
    }
}

fn decode_into(strides: &[usize], actions: &[Vec<String>], profile: ProfileId, out: &mut [ActionId]) {
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = (profile / strides[i]) % actions[i].len();
    }
}

/// One action per player, in player order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionProfile(pub Vec<ActionId>);

/// Integer state weights, `weights[player][state]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weights(pub Vec<Vec<i64>>);

impl Weights {
    pub fn of(&self, player: PlayerId, s: StateId) -> i64 {
        self.0[player][s]
    }

    pub fn player(&self, player: PlayerId) -> &[i64] {
        &self.0[player]
    }

    pub fn min(&self, player: PlayerId) -> i64 {
        *self.0[player].iter().min().expect("nonempty weights")
    }

    pub fn max(&self, player: PlayerId) -> i64 {
        *self.0[player].iter().max().expect("nonempty weights")
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().flatten().map(|w| w.abs()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Goals {
    Gr1(Vec<Gr1Formula>),
    MeanPayoff(Weights),
}

/// An arena together with one goal per player, all of the same kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    pub arena: Arena,
    pub goals: Goals,
}

impl Game {
    pub fn new(arena: Arena, goals: Goals) -> Result<Game, ModelError> {
        let n = arena.num_players();
        match &goals {
            Goals::Gr1(gs) => {
                if gs.len() != n {
                    return Err(ModelError::GoalCount {
                        expected: n,
                        got: gs.len(),
                    });
                }
                for (i, g) in gs.iter().enumerate() {
                    if g.atoms().iter().any(|&a| a >= arena.atoms().len()) {
                        return Err(ModelError::GoalAtom(arena.player_names()[i].clone()));
                    }
                }
            }
            Goals::MeanPayoff(w) => {
                if w.0.len() != n || w.0.iter().any(|row| row.len() != arena.num_states()) {
                    return Err(ModelError::WeightShape {
                        players: n,
                        states: arena.num_states(),
                    });
                }
            }
        }
        Ok(Game { arena, goals })
    }

    pub fn num_players(&self) -> usize {
        self.arena.num_players()
    }

    pub fn gr1_goals(&self) -> Option<&[Gr1Formula]> {
        match &self.goals {
            Goals::Gr1(g) => Some(g),
            Goals::MeanPayoff(_) => None,
        }
    }

    pub fn weights(&self) -> Option<&Weights> {
        match &self.goals {
            Goals::MeanPayoff(w) => Some(w),
            Goals::Gr1(_) => None,
        }
    }
}

/// One position of a path: the current state and the profile played there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub state: StateId,
    pub profile: ProfileId,
}

impl Step {
    pub fn new(state: StateId, profile: ProfileId) -> Self {
        Step { state, profile }
    }
}

/// An ultimately periodic path `prefix · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lasso {
    pub prefix: Vec<Step>,
    pub cycle: Vec<Step>,
}

impl Lasso {
    pub fn new(prefix: Vec<Step>, cycle: Vec<Step>) -> Self {
        Lasso { prefix, cycle }
    }

    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.is_empty()
    }

    pub fn start(&self) -> StateId {
        self.prefix.first().unwrap_or(&self.cycle[0]).state
    }

    pub fn steps(&self) -> impl Iterator<Item = &Step> {
        self.prefix.iter().chain(self.cycle.iter())
    }

    pub fn cycle_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.cycle.iter().map(|s| s.state)
    }

    /// The k-th position of the infinite path.
    pub fn at(&self, k: usize) -> Step {
        if k < self.prefix.len() {
            self.prefix[k]
        } else {
            self.cycle[(k - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn validate(&self, arena: &Arena, start: StateId) -> Result<(), LassoError> {
        if self.cycle.is_empty() {
            return Err(LassoError::EmptyCycle);
        }
        if self.start() != start {
            return Err(LassoError::WrongStart { expected: start });
        }
        let all: Vec<Step> = self.steps().copied().collect();
        for (i, step) in all.iter().enumerate() {
            if step.state >= arena.num_states() || step.profile >= arena.num_profiles() {
                return Err(LassoError::OutOfRange { index: i });
            }
        }
        for (i, step) in all.iter().enumerate() {
            let next = if i + 1 < all.len() {
                all[i + 1].state
            } else {
                self.cycle[0].state
            };
            let actual = arena.tr(step.state, step.profile);
            if actual != next {
                return Err(LassoError::Inconsistent {
                    index: i,
                    state: step.state,
                    profile: step.profile,
                    actual,
                    next,
                });
            }
        }
        Ok(())
    }

    /// Canonical representative of the infinite path: shortest prefix,
    /// primitive cycle, then the cycle rotated to its lexicographically
    /// minimal rotation (moving the skipped entries into the prefix).
    pub fn canonical(&self) -> Lasso {
        let mut prefix = self.prefix.clone();
        let mut cycle = self.cycle.clone();
        // Primitive root of the cycle word.
        let n = cycle.len();
        if let Some(p) = (1..n).find(|&p| n % p == 0 && (p..n).all(|i| cycle[i] == cycle[i - p])) {
            cycle.truncate(p);
        }
        // Roll the prefix back into the cycle while it ends with the cycle's last entry.
        while let Some(&last) = prefix.last() {
            if last == *cycle.last().unwrap() {
                prefix.pop();
                cycle.rotate_right(1);
            } else {
                break;
            }
        }
        let k = min_rotation(&cycle);
        prefix.extend_from_slice(&cycle[..k]);
        cycle.rotate_left(k);
        Lasso { prefix, cycle }
    }

    /// Same infinite path with the cycle repeated `times` times.
    pub fn unrolled(&self, times: usize) -> Lasso {
        let mut cycle = Vec::with_capacity(self.cycle.len() * times);
        for _ in 0..times {
            cycle.extend_from_slice(&self.cycle);
        }
        Lasso {
            prefix: self.prefix.clone(),
            cycle,
        }
    }
}

/// Index of the lexicographically least rotation (Booth's algorithm).
fn min_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = &s[(i + k) % n];
        let b = &s[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// A finite-state strategy `(Q, q0, δ, τ)`; `step` is indexed by
/// `q * num_profiles + profile`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransducerStrategy {
    pub num_states: usize,
    pub initial: usize,
    pub num_profiles: usize,
    pub step: Vec<usize>,
    pub output: Vec<ActionId>,
}

impl TransducerStrategy {
    /// Memoryless transducer that always plays `action`.
    pub fn constant(action: ActionId, num_profiles: usize) -> Self {
        TransducerStrategy {
            num_states: 1,
            initial: 0,
            num_profiles,
            step: vec![0; num_profiles],
            output: vec![action],
        }
    }

    pub fn next(&self, q: usize, profile: ProfileId) -> usize {
        self.step[q * self.num_profiles + profile]
    }

    pub fn validate(&self, arena: &Arena, player: PlayerId) -> bool {
        self.num_profiles == arena.num_profiles()
            && self.initial < self.num_states
            && self.step.len() == self.num_states * self.num_profiles
            && self.step.iter().all(|&q| q < self.num_states)
            && self.output.len() == self.num_states
            && self.output.iter().all(|&a| a < arena.num_actions(player))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyProfile(pub Vec<TransducerStrategy>);

impl StrategyProfile {
    pub fn validate(&self, arena: &Arena) -> bool {
        self.0.len() == arena.num_players()
            && self.0.iter().enumerate().all(|(i, t)| t.validate(arena, i))
    }
}

/// The unique outcome of `profile` from the arena's initial state.
pub fn play(arena: &Arena, profile: &StrategyProfile) -> Lasso {
    play_from(arena, profile, arena.initial())
}

pub fn play_from(arena: &Arena, profile: &StrategyProfile, start: StateId) -> Lasso {
    let mut seen: HashMap<(StateId, Vec<usize>), usize> = HashMap::new();
    let mut steps = Vec::new();
    let mut state = start;
    let mut qs: Vec<usize> = profile.0.iter().map(|t| t.initial).collect();
    loop {
        if let Some(&first) = seen.get(&(state, qs.clone())) {
            let cycle = steps.split_off(first);
            return Lasso::new(steps, cycle);
        }
        seen.insert((state, qs.clone()), steps.len());
        let actions: Vec<ActionId> = profile.0.iter().zip(&qs).map(|(t, &q)| t.output[q]).collect();
        let p = arena.encode(&actions);
        steps.push(Step::new(state, p));
        for (t, q) in profile.0.iter().zip(qs.iter_mut()) {
            *q = t.next(*q, p);
        }
        state = arena.tr(state, p);
    }
}

/// Mean payoff of `player` along the lasso: the average weight over the cycle.
pub fn mp_payoff(lasso: &Lasso, weights: &Weights, player: PlayerId) -> Rational {
    Rational::mean(lasso.cycle_states().map(|s| weights.of(player, s)))
}

/// Whether the lasso's label word satisfies a GR(1) goal.
pub fn gr1_payoff(lasso: &Lasso, arena: &Arena, goal: &Gr1Formula) -> bool {
    let visited: BTreeSet<StateId> = lasso.cycle_states().collect();
    goal.holds_on_cycle(visited.iter().map(|&s| arena.label(s)))
}

/// Partition of the players into winners and losers along the lasso.
pub fn winners_losers(game: &Game, lasso: &Lasso) -> Result<(Vec<PlayerId>, Vec<PlayerId>), ModelError> {
    let goals = game.gr1_goals().ok_or(ModelError::NotGr1)?;
    Ok((0..game.num_players()).partition(|&i| gr1_payoff(lasso, &game.arena, &goals[i])))
}

/// Per-player payoffs of an MP game along the lasso.
pub fn mp_payoffs(game: &Game, lasso: &Lasso) -> Result<Vec<Rational>, ModelError> {
    let w = game.weights().ok_or(ModelError::NotMeanPayoff)?;
    Ok((0..game.num_players()).map(|i| mp_payoff(lasso, w, i)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{g1, g2};
    use crate::formula::{BoolExpr, Gr1Formula};

    fn g1_state(name: &str) -> StateId {
        g1().arena.state_index(name).unwrap()
    }

    #[test]
    fn profile_encoding_round_trips() {
        let game = g1();
        let a = &game.arena;
        assert_eq!(a.num_profiles(), 4);
        for p in 0..4 {
            assert_eq!(a.encode(&a.decode(p).0), p);
        }
        // (a, b): player 0 plays a, player 1 plays b.
        let ab = a.encode(&[0, 1]);
        assert_eq!(a.action_of(ab, 0), 0);
        assert_eq!(a.action_of(ab, 1), 1);
        assert_eq!(a.with_action(ab, 0, 1), a.encode(&[1, 1]));
        assert_eq!(a.profile_name(ab), "(a, b)");
    }

    #[test]
    fn play_constant_a_a_on_g1() {
        let game = g1();
        let a = &game.arena;
        let prof = StrategyProfile(vec![
            TransducerStrategy::constant(0, 4),
            TransducerStrategy::constant(0, 4),
        ]);
        let l = play(a, &prof);
        let aa = a.encode(&[0, 0]);
        assert_eq!(l.prefix, vec![Step::new(g1_state("s0"), aa)]);
        assert_eq!(l.cycle, vec![Step::new(g1_state("sW"), aa)]);
        l.validate(a, a.initial()).unwrap();
    }

    #[test]
    fn play_a_b_on_g1_cycles_on_sl() {
        let game = g1();
        let a = &game.arena;
        let prof = StrategyProfile(vec![
            TransducerStrategy::constant(0, 4),
            TransducerStrategy::constant(1, 4),
        ]);
        let l = play(a, &prof);
        assert_eq!(l.cycle, vec![Step::new(g1_state("sL"), a.encode(&[0, 1]))]);
    }

    #[test]
    fn play_single_state_arena() {
        let arena = Arena::new(
            vec!["1".into()],
            vec![vec!["a".into(), "b".into()]],
            vec!["s".into()],
            0,
            vec![],
            vec![Label::new()],
            |_, _| 0,
        )
        .unwrap();
        let prof = StrategyProfile(vec![TransducerStrategy::constant(1, 2)]);
        let l = play(&arena, &prof);
        assert!(l.prefix.is_empty());
        assert_eq!(l.cycle.len(), 1);
    }

    #[test]
    fn mp_payoff_examples() {
        let w = Weights(vec![vec![100, 1, 2, 3, -2]]);
        let single = Lasso::new(vec![], vec![Step::new(3, 0)]);
        assert_eq!(mp_payoff(&single, &w, 0), Rational::from_int(3));
        let sym = Lasso::new(vec![], vec![Step::new(2, 0), Step::new(4, 0)]);
        assert_eq!(mp_payoff(&sym, &w, 0), Rational::zero());
        let pre = Lasso::new(vec![Step::new(0, 0)], vec![Step::new(1, 0), Step::new(2, 0)]);
        assert_eq!(mp_payoff(&pre, &w, 0), Rational::new(3, 2));
    }

    #[test]
    fn gr1_payoff_examples() {
        let game = g1();
        let a = &game.arena;
        let p = a.atoms().iter().position(|x| x == "p").unwrap();
        let gf_p = Gr1Formula::new(vec![], vec![BoolExpr::Atom(p)]);
        let on_w = Lasso::new(vec![], vec![Step::new(g1_state("sW"), 0)]);
        let on_l = Lasso::new(vec![], vec![Step::new(g1_state("sL"), 0)]);
        assert!(gr1_payoff(&on_w, a, &gf_p));
        assert!(!gr1_payoff(&on_l, a, &gf_p));
        // Antecedent never met: vacuously satisfied.
        let p_implies_q = Gr1Formula::new(vec![BoolExpr::Atom(p)], vec![BoolExpr::False]);
        assert!(gr1_payoff(&on_l, a, &p_implies_q));
    }

    #[test]
    fn winners_and_losers_on_g1() {
        let game = g1();
        let on_w = Lasso::new(vec![], vec![Step::new(g1_state("sW"), 0)]);
        let on_l = Lasso::new(vec![], vec![Step::new(g1_state("sL"), 0)]);
        assert_eq!(winners_losers(&game, &on_w).unwrap(), (vec![0, 1], vec![]));
        assert_eq!(winners_losers(&game, &on_l).unwrap(), (vec![], vec![0, 1]));
        assert_eq!(winners_losers(&g2(), &on_w), Err(ModelError::NotGr1));
    }

    #[test]
    fn trivial_goals_make_everyone_win() {
        let mut game = g1();
        game.goals = Goals::Gr1(vec![Gr1Formula::truth(), Gr1Formula::truth()]);
        let l = Lasso::new(vec![], vec![Step::new(g1_state("sL"), 0)]);
        assert_eq!(winners_losers(&game, &l).unwrap(), (vec![0, 1], vec![]));
    }

    #[test]
    fn canonical_rotates_and_shortens() {
        // Path 0 1 2 1 2 1 2 ... written with a long prefix and a doubled cycle.
        let l = Lasso::new(
            vec![Step::new(0, 0), Step::new(1, 0), Step::new(2, 0)],
            vec![Step::new(1, 0), Step::new(2, 0), Step::new(1, 0), Step::new(2, 0)],
        );
        let c = l.canonical();
        assert_eq!(c.prefix, vec![Step::new(0, 0)]);
        assert_eq!(c.cycle, vec![Step::new(1, 0), Step::new(2, 0)]);
        let l2 = Lasso::new(vec![Step::new(0, 0)], vec![Step::new(2, 0), Step::new(1, 0)]);
        let c2 = l2.canonical();
        assert_eq!(c2.prefix, vec![Step::new(0, 0), Step::new(2, 0)]);
        assert_eq!(c2.cycle, vec![Step::new(1, 0), Step::new(2, 0)]);
    }

    #[test]
    fn validate_rejects_inconsistent_lasso() {
        let game = g1();
        let a = &game.arena;
        let ab = a.encode(&[0, 1]);
        let bad = Lasso::new(vec![Step::new(0, ab)], vec![Step::new(g1_state("sW"), ab)]);
        assert!(matches!(bad.validate(a, 0), Err(LassoError::Inconsistent { .. })));
        let empty = Lasso::new(vec![Step::new(0, ab)], vec![]);
        assert_eq!(empty.validate(a, 0), Err(LassoError::EmptyCycle));
    }

    #[test]
    fn missing_weights_rejected() {
        let arena = g2().arena;
        let err = Game::new(arena, Goals::MeanPayoff(Weights(vec![vec![0, 1]]))).unwrap_err();
        assert!(matches!(err, ModelError::WeightShape { .. }));
    }
}
