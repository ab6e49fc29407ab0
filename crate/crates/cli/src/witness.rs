//! JSON witness documents. Rationals are written as `"num/den"` strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use rv_core::engine::{check_witness, Candidate, Punishment, Specification, Verdict, Witness};
use rv_core::model::{mp_payoff, winners_losers, Game, Lasso, Step, StrategyProfile, TransducerStrategy};
use rv_core::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDoc {
    pub state: String,
    /// Action of each player, by player name.
    pub actions: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LassoDoc {
    pub prefix: Vec<StepDoc>,
    pub cycle: Vec<StepDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateDoc {
    Winners(Vec<String>),
    Thresholds(BTreeMap<String, Rational>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransducerDoc {
    pub player: String,
    pub states: usize,
    pub initial: usize,
    /// `step[q][p]`: next memory state on profile index `p`.
    pub step: Vec<Vec<usize>>,
    /// Action name output in each memory state.
    pub output: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub candidates_examined: usize,
    pub witness_gap: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDocument {
    pub query: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub candidate: Option<CandidateDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lasso: Option<LassoDoc>,
    /// Mean payoff of every player (MP games).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub payoffs: Option<BTreeMap<String, Rational>>,
    /// Players whose goal holds on the lasso (GR(1) games).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub winners: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub transducers: Option<Vec<TransducerDoc>>,
    pub diagnostics: Diagnostics,
}

fn step_doc(game: &Game, step: &Step) -> StepDoc {
    let arena = &game.arena;
    let acts = arena.decode(step.profile).0;
    StepDoc {
        state: arena.state_names()[step.state].clone(),
        actions: arena
            .player_names()
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), arena.action_names(i)[acts[i]].clone()))
            .collect(),
    }
}

fn candidate_doc(game: &Game, c: &Candidate) -> CandidateDoc {
    let names = game.arena.player_names();
    match c {
        Candidate::Winners(w) => CandidateDoc::Winners(w.iter().map(|&i| names[i].clone()).collect()),
        Candidate::Thresholds(z) => {
            CandidateDoc::Thresholds(names.iter().cloned().zip(z.iter().cloned()).collect())
        }
    }
}

pub fn transducer_docs(game: &Game, profile: &StrategyProfile) -> Vec<TransducerDoc> {
    let arena = &game.arena;
    profile
        .0
        .iter()
        .enumerate()
        .map(|(i, t)| TransducerDoc {
            player: arena.player_names()[i].clone(),
            states: t.num_states,
            initial: t.initial,
            step: t.step.chunks(t.num_profiles).map(<[usize]>::to_vec).collect(),
            output: t.output.iter().map(|&a| arena.action_names(i)[a].clone()).collect(),
        })
        .collect()
}

impl WitnessDocument {
    pub fn new(query: &str, game: &Game, verdict: &Verdict, witness: Option<&Witness>) -> WitnessDocument {
        let names = game.arena.player_names();
        let mut doc = WitnessDocument {
            query: query.to_string(),
            verdict: if verdict.answer { "yes" } else { "no" }.to_string(),
            candidate: None,
            lasso: None,
            payoffs: None,
            winners: None,
            transducers: None,
            diagnostics: Diagnostics {
                candidates_examined: verdict.candidates_examined,
                witness_gap: verdict.witness_gap.is_some(),
            },
        };
        if let Some(c) = &verdict.witness_gap {
            doc.candidate = Some(candidate_doc(game, c));
        }
        if let Some(w) = witness {
            doc.candidate = Some(candidate_doc(game, &w.candidate));
            doc.lasso = Some(LassoDoc {
                prefix: w.lasso.prefix.iter().map(|s| step_doc(game, s)).collect(),
                cycle: w.lasso.cycle.iter().map(|s| step_doc(game, s)).collect(),
            });
            if let Some(weights) = game.weights() {
                doc.payoffs = Some(
                    names
                        .iter()
                        .enumerate()
                        .map(|(i, p)| (p.clone(), mp_payoff(&w.lasso, weights, i)))
                        .collect(),
                );
            }
            if let Ok((winners, _)) = winners_losers(game, &w.lasso) {
                doc.winners = Some(winners.iter().map(|&i| names[i].clone()).collect());
            }
        }
        doc
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReloadError {
    #[error("document has no lasso")]
    NoLasso,
    #[error("document has no candidate")]
    NoCandidate,
    #[error("unknown {0} '{1}'")]
    Unknown(&'static str, String),
    #[error("{0}")]
    Invalid(String),
}

fn parse_step(game: &Game, s: &StepDoc) -> Result<Step, ReloadError> {
    let arena = &game.arena;
    let state = arena
        .state_index(&s.state)
        .ok_or_else(|| ReloadError::Unknown("state", s.state.clone()))?;
    let mut acts = Vec::new();
    for (i, p) in arena.player_names().iter().enumerate() {
        let a = s.actions.get(p).ok_or_else(|| ReloadError::Unknown("player", p.clone()))?;
        acts.push(arena.action_index(i, a).ok_or_else(|| ReloadError::Unknown("action", a.clone()))?);
    }
    Ok(Step::new(state, arena.encode(&acts)))
}

fn parse_candidate(game: &Game, c: &CandidateDoc) -> Result<Candidate, ReloadError> {
    let arena = &game.arena;
    match c {
        CandidateDoc::Winners(w) => w
            .iter()
            .map(|p| arena.player_index(p).ok_or_else(|| ReloadError::Unknown("player", p.clone())))
            .collect::<Result<_, _>>()
            .map(Candidate::Winners),
        CandidateDoc::Thresholds(z) => arena
            .player_names()
            .iter()
            .map(|p| z.get(p).cloned().ok_or_else(|| ReloadError::Unknown("player", p.clone())))
            .collect::<Result<_, _>>()
            .map(Candidate::Thresholds),
    }
}

/// Rebuilds the witness from a document and re-checks it against the game:
/// lasso validity, the specification and the equilibrium conditions, plus
/// replay of any transducers.
pub fn revalidate(game: &Game, spec: &Specification, doc: &WitnessDocument) -> Result<Witness, ReloadError> {
    let lasso_doc = doc.lasso.as_ref().ok_or(ReloadError::NoLasso)?;
    let prefix = lasso_doc.prefix.iter().map(|s| parse_step(game, s)).collect::<Result<_, _>>()?;
    let cycle = lasso_doc.cycle.iter().map(|s| parse_step(game, s)).collect::<Result<_, _>>()?;
    let lasso = Lasso::new(prefix, cycle);
    let candidate = parse_candidate(game, doc.candidate.as_ref().ok_or(ReloadError::NoCandidate)?)?;
    let witness = Witness {
        lasso: lasso.clone(),
        candidate,
        winners: Vec::new(),
        payoffs: Vec::new(),
    };
    check_witness(game, spec, &witness, &Punishment::compute(game)).map_err(ReloadError::Invalid)?;
    if let Some(ts) = &doc.transducers {
        let arena = &game.arena;
        let mut strategies = Vec::new();
        for (i, t) in ts.iter().enumerate() {
            let output = t
                .output
                .iter()
                .map(|a| arena.action_index(i, a).ok_or_else(|| ReloadError::Unknown("action", a.clone())))
                .collect::<Result<_, _>>()?;
            strategies.push(TransducerStrategy {
                num_states: t.states,
                initial: t.initial,
                num_profiles: arena.num_profiles(),
                step: t.step.concat(),
                output,
            });
        }
        let profile = StrategyProfile(strategies);
        if !profile.validate(arena) {
            return Err(ReloadError::Invalid("malformed transducers".into()));
        }
        if rv_core::model::play(arena, &profile).canonical() != lasso.canonical() {
            return Err(ReloadError::Invalid("transducers do not reproduce the lasso".into()));
        }
    }
    Ok(witness)
}

pub fn rational_text(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
