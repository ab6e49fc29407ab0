//! Punishment regions for GR(1) goals.
//!
//! The goal of player `j` is tracked by two modular counters (ι1 over the
//! antecedents, ι2 over the consequents) appended to each arena state. The
//! goal holds on a run exactly when the ι1-reset set `E` is visited finitely
//! often or the ι2-reset set `C` infinitely often. The coalition commits to
//! `a_{-j}` first and `j` answers, and the resulting one-pair Streett game is
//! solved as a parity game with priorities `C → 2`, `E \ C → 1`, else `0`.

use crate::formula::Gr1Formula;
use crate::model::{Arena, Game, PlayerId, ProfileId, StateId};
use crate::parity::{ParityGame, ParitySolution};

/// Configuration index into a [`CounterArena`].
pub type Config = usize;

/// Arena states extended with the two counters of one GR(1) formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterArena {
    pub num_states: usize,
    /// Number of antecedents `m`; ι1 ranges over `0..=m`.
    pub m: usize,
    /// Number of consequents `n`; ι2 ranges over `0..=n`.
    pub n: usize,
    /// `psi[l][s]`: antecedent `l` holds at `s`.
    psi: Vec<Vec<bool>>,
    /// `theta[r][s]`: consequent `r` holds at `s`.
    theta: Vec<Vec<bool>>,
}

impl CounterArena {
    pub fn new(arena: &Arena, goal: &Gr1Formula) -> CounterArena {
        let eval = |es: &[crate::formula::BoolExpr]| -> Vec<Vec<bool>> {
            es.iter()
                .map(|e| (0..arena.num_states()).map(|s| e.eval(arena.label(s))).collect())
                .collect()
        };
        CounterArena {
            num_states: arena.num_states(),
            m: goal.antecedents.len(),
            n: goal.consequents.len(),
            psi: eval(&goal.antecedents),
            theta: eval(&goal.consequents),
        }
    }

    pub fn num_configs(&self) -> usize {
        self.num_states * (self.m + 1) * (self.n + 1)
    }

    pub fn config(&self, s: StateId, i1: usize, i2: usize) -> Config {
        (s * (self.m + 1) + i1) * (self.n + 1) + i2
    }

    pub fn split(&self, c: Config) -> (StateId, usize, usize) {
        let i2 = c % (self.n + 1);
        let rest = c / (self.n + 1);
        (rest / (self.m + 1), rest % (self.m + 1), i2)
    }

    /// Counter values after leaving state `s` with counters `(i1, i2)`.
    pub fn advance(&self, s: StateId, i1: usize, i2: usize) -> (usize, usize) {
        let j1 = if i1 == 0 || self.psi[i1 - 1][s] {
            (i1 + 1) % (self.m + 1)
        } else {
            i1
        };
        let j2 = if i2 == 0 || self.theta[i2 - 1][s] {
            (i2 + 1) % (self.n + 1)
        } else {
            i2
        };
        (j1, j2)
    }

    /// Successor configuration when the arena moves from the state of `c` to `target`.
    pub fn step(&self, c: Config, target: StateId) -> Config {
        let (s, i1, i2) = self.split(c);
        let (j1, j2) = self.advance(s, i1, i2);
        self.config(target, j1, j2)
    }

    pub fn in_reset1(&self, c: Config) -> bool {
        self.split(c).1 == 0
    }

    pub fn in_reset2(&self, c: Config) -> bool {
        self.split(c).2 == 0
    }
}

pub fn build_counter_arena(arena: &Arena, goal: &Gr1Formula) -> CounterArena {
    CounterArena::new(arena, goal)
}

/// The turn-based expansion: nodes `0..num_configs` are coalition nodes,
/// the rest are response nodes `(config, a_{-j})`.
#[derive(Debug, Clone)]
pub struct TurnBasedGame {
    pub game: ParityGame,
    pub num_configs: usize,
    /// Partial profile committed at each response node.
    pub response_profile: Vec<ProfileId>,
}

pub fn build_turn_based(arena: &Arena, counters: &CounterArena, j: PlayerId) -> TurnBasedGame {
    let partials: Vec<ProfileId> = arena.partial_profiles(j).collect();
    let nc = counters.num_configs();
    let total = nc + nc * partials.len();
    let mut owner = vec![1u8; nc];
    owner.resize(total, 0);
    let mut priority = Vec::with_capacity(total);
    for c in 0..nc {
        priority.push(if counters.in_reset2(c) {
            2
        } else if counters.in_reset1(c) {
            1
        } else {
            0
        });
    }
    priority.resize(total, 0);
    let mut succ = vec![Vec::new(); total];
    let mut response_profile = Vec::with_capacity(nc * partials.len());
    for c in 0..nc {
        let (s, _, _) = counters.split(c);
        for (k, &pp) in partials.iter().enumerate() {
            let r = nc + c * partials.len() + k;
            succ[c].push(r);
            response_profile.push(pp);
            let mut out: Vec<usize> = arena
                .deviation_successors(s, pp, j)
                .map(|t| counters.step(c, t))
                .collect();
            out.sort_unstable();
            out.dedup();
            succ[r] = out;
        }
    }
    TurnBasedGame {
        game: ParityGame {
            owner,
            priority,
            succ,
        },
        num_configs: nc,
        response_profile,
    }
}

/// Solves a parity game whose priorities lie in `{0, 1, 2}`.
pub fn solve_parity3(g: &TurnBasedGame) -> ParitySolution {
    assert!(g.game.priority.iter().all(|&p| p <= 2), "priorities must be in 0..=2");
    g.game.solve()
}

#[derive(Debug, Clone)]
pub struct PunishResult {
    pub player: PlayerId,
    /// `region[s]`: the coalition can force `γ_j` to fail from `s`.
    pub region: Vec<bool>,
    pub counters: CounterArena,
    /// Memoryless coalition strategy on configurations: a profile whose
    /// component for `j` is irrelevant (set to 0). `None` where the
    /// coalition does not win.
    pub strategy: Vec<Option<ProfileId>>,
}

impl PunishResult {
    pub fn contains(&self, s: StateId) -> bool {
        self.region[s]
    }

    pub fn states(&self) -> Vec<StateId> {
        (0..self.region.len()).filter(|&s| self.region[s]).collect()
    }
}

/// Computes `Pun_j` together with a memoryless punishing strategy.
pub fn punish_region(game: &Game, j: PlayerId) -> PunishResult {
    let goals = game.gr1_goals().expect("punish_region needs a GR(1) game");
    let arena = &game.arena;
    let counters = CounterArena::new(arena, &goals[j]);
    let tb = build_turn_based(arena, &counters, j);
    let sol = solve_parity3(&tb);
    let strategy = (0..tb.num_configs)
        .map(|c| {
            if sol.winner[c] == 1 {
                Some(tb.response_profile[sol.strategy[c] - tb.num_configs])
            } else {
                None
            }
        })
        .collect();
    let region = (0..arena.num_states())
        .map(|s| sol.winner[counters.config(s, 0, 0)] == 1)
        .collect();
    PunishResult {
        player: j,
        region,
        counters,
        strategy,
    }
}

/// Every unilateral deviation of `j` from `profile` at `s` lands in the region.
pub fn punishing_secure(arena: &Arena, s: StateId, profile: ProfileId, j: PlayerId, region: &[bool]) -> bool {
    arena.deviation_successors(s, profile, j).all(|t| region[t])
}
