//! Social-welfare threshold queries over equilibria of mean-payoff games
//! and bisection for the best or worst equilibrium welfare.

use crate::engine::{e_nash, e_nash_mp_with, MpExtra, Options, Specification, Verdict};
use crate::lp::{shifted, shifted_below};
use crate::model::{mp_payoff, Game, Lasso, Weights};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    /// Sum of the payoffs.
    Utilitarian,
    /// Minimum of the payoffs.
    Egalitarian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    AtLeast,
    AtMost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WelfareQuery {
    pub measure: Measure,
    pub direction: Direction,
    pub threshold: Rational,
    pub spec: Specification,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WelfareError {
    #[error("welfare queries need a mean-payoff game")]
    NotMeanPayoff,
    #[error("no equilibrium satisfies the specification")]
    NoEquilibrium,
    #[error("epsilon must be positive")]
    BadEpsilon,
}

pub fn usw(lasso: &Lasso, weights: &Weights) -> Rational {
    (0..weights.0.len()).map(|i| mp_payoff(lasso, weights, i)).sum()
}

pub fn esw(lasso: &Lasso, weights: &Weights) -> Rational {
    (0..weights.0.len())
        .map(|i| mp_payoff(lasso, weights, i))
        .min()
        .expect("at least one player")
}

pub fn welfare(measure: Measure, lasso: &Lasso, weights: &Weights) -> Rational {
    match measure {
        Measure::Utilitarian => usw(lasso, weights),
        Measure::Egalitarian => esw(lasso, weights),
    }
}

/// The interval `[a, b]` that contains the welfare of every run.
pub fn bounds(measure: Measure, weights: &Weights) -> (Rational, Rational) {
    let n = weights.0.len();
    match measure {
        Measure::Utilitarian => (
            Rational::from_int((0..n).map(|i| weights.min(i)).sum()),
            Rational::from_int((0..n).map(|i| weights.max(i)).sum()),
        ),
        Measure::Egalitarian => (
            Rational::from_int((0..n).map(|i| weights.min(i)).min().expect("player")),
            Rational::from_int((0..n).map(|i| weights.max(i)).min().expect("player")),
        ),
    }
}

/// Per-state sum of all players' weights.
fn summed(weights: &Weights, num_states: usize) -> Vec<Rational> {
    (0..num_states)
        .map(|s| Rational::from_int(weights.0.iter().map(|w| w[s]).sum()))
        .collect()
}

pub fn welfare_threshold(game: &Game, q: &WelfareQuery, opts: Options) -> Result<Verdict, WelfareError> {
    let w = game.weights().ok_or(WelfareError::NotMeanPayoff)?;
    let (a, b) = bounds(q.measure, w);
    let out_of_range = match q.direction {
        Direction::AtLeast => q.threshold > b,
        Direction::AtMost => q.threshold < a,
    };
    if out_of_range {
        return Ok(Verdict {
            answer: false,
            witness: None,
            witness_gap: None,
            candidates_examined: 0,
        });
    }
    let t = &q.threshold;
    let ns = game.arena.num_states();
    let verdict = match (q.measure, q.direction) {
        (Measure::Utilitarian, dir) => {
            let sum = summed(w, ns);
            let dim = match dir {
                Direction::AtLeast => sum.iter().map(|x| x - t).collect(),
                Direction::AtMost => shifted_below(&sum, t),
            };
            let extra = MpExtra {
                dims: vec![dim],
                floor: None,
            };
            e_nash_mp_with(game, &q.spec, &extra, opts)
        }
        (Measure::Egalitarian, Direction::AtLeast) => {
            let extra = MpExtra {
                dims: Vec::new(),
                floor: Some(t.clone()),
            };
            e_nash_mp_with(game, &q.spec, &extra, opts)
        }
        (Measure::Egalitarian, Direction::AtMost) => {
            let mut examined = 0;
            let mut last = None;
            for k in 0..game.num_players() {
                let wk: Vec<Rational> = shifted(w.player(k), &Rational::zero());
                let extra = MpExtra {
                    dims: vec![shifted_below(&wk, t)],
                    floor: None,
                };
                let mut v = e_nash_mp_with(game, &q.spec, &extra, opts);
                examined += v.candidates_examined;
                v.candidates_examined = examined;
                if v.answer {
                    return Ok(v);
                }
                last = Some(v);
            }
            last.expect("at least one player")
        }
    };
    Ok(verdict)
}

/// Number of halvings needed to shrink `[a, b]` to width at most `eps`.
pub fn bisection_steps(a: &Rational, b: &Rational, eps: &Rational) -> usize {
    let mut width = eps.clone();
    let mut n = 0;
    let span = b - a;
    while width < span {
        width = &width * &Rational::from_int(2);
        n += 1;
    }
    n
}

/// Bisection on `[a, b]` with a monotone threshold test. In max mode
/// `test(t)` answers "some equilibrium reaches at least `t`" and the lower
/// end is returned; in min mode it answers "at most `t`" and the upper end
/// is returned. Also returns the number of tests made.
pub fn bisect(
    a: Rational,
    b: Rational,
    eps: &Rational,
    mode: Mode,
    mut test: impl FnMut(&Rational) -> bool,
) -> (Rational, usize) {
    let n = bisection_steps(&a, &b, eps);
    let (mut lo, mut hi) = (a, b);
    let half = Rational::new(1, 2);
    for _ in 0..n {
        let mid = &(&lo + &hi) * &half;
        let yes = test(&mid);
        match (mode, yes) {
            (Mode::Max, true) | (Mode::Min, false) => lo = mid,
            (Mode::Max, false) | (Mode::Min, true) => hi = mid,
        }
    }
    let value = match mode {
        Mode::Max => lo,
        Mode::Min => hi,
    };
    (value, n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approximation {
    pub value: Rational,
    pub threshold_calls: usize,
}

pub fn approx_opt_welfare(
    game: &Game,
    spec: &Specification,
    measure: Measure,
    mode: Mode,
    eps: &Rational,
    opts: Options,
) -> Result<Approximation, WelfareError> {
    let w = game.weights().ok_or(WelfareError::NotMeanPayoff)?;
    if !eps.is_positive() {
        return Err(WelfareError::BadEpsilon);
    }
    if !e_nash(game, spec, opts).answer {
        return Err(WelfareError::NoEquilibrium);
    }
    let (a, b) = bounds(measure, w);
    let direction = match mode {
        Mode::Max => Direction::AtLeast,
        Mode::Min => Direction::AtMost,
    };
    let (value, threshold_calls) = bisect(a, b, eps, mode, |t| {
        let q = WelfareQuery {
            measure,
            direction,
            threshold: t.clone(),
            spec: spec.clone(),
        };
        welfare_threshold(game, &q, opts).expect("MP game").answer
    });
    Ok(Approximation { value, threshold_calls })
}
