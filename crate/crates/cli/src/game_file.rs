//! Line-oriented game description files.
//!
//! ```text
//! players: 1 2;
//! states: s0 sW sL;
//! initial: s0;
//! atoms: p;
//! actions 1: a b;
//! actions 2: a b;
//! label sW: p;
//! tr s0 (a, a) -> sW;
//! weight 1 s0 = 2;
//! goal 1: GF p;
//! ```
//!
//! Statements end with `;` and `#` starts a comment. Labels default to the
//! empty set and missing weights to 0. Every (state, profile) pair needs
//! exactly one `tr` row.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use rv_core::formula::{parse_gr1, Gr1Formula};
use rv_core::model::{Arena, Game, Goals, Weights};

#[derive(Debug, thiserror::Error)]
pub enum GameFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Semantic(String),
    #[error("no transition for state {state} under profile ({profile})")]
    Totality { state: String, profile: String },
    #[error("line {line}: duplicate transition for state {state} under profile ({profile})")]
    Duplicate { line: usize, state: String, profile: String },
    #[error("player {0} has both a goal and weights")]
    MixedGoals(String),
}

fn parse_err(line: usize, msg: impl Into<String>) -> GameFileError {
    GameFileError::Parse { line, msg: msg.into() }
}

pub fn parse_game_file(path: &Path) -> Result<Game, GameFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| GameFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_game(&text)
}

/// Statements with the line they start on.
fn statements(text: &str) -> Result<Vec<(usize, String)>, GameFileError> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        for (i, part) in line.split(';').enumerate() {
            if i > 0 {
                let stmt = current.trim().to_string();
                if stmt.is_empty() {
                    return Err(parse_err(k + 1, "empty statement"));
                }
                out.push((start, stmt));
                current.clear();
            }
            if current.trim().is_empty() && !part.trim().is_empty() {
                start = k + 1;
            }
            current.push_str(part);
            current.push(' ');
        }
    }
    if !current.trim().is_empty() {
        return Err(parse_err(start, "missing ';'"));
    }
    Ok(out)
}

#[derive(Default)]
struct Raw {
    players: Option<Vec<String>>,
    states: Option<Vec<String>>,
    initial: Option<(usize, String)>,
    atoms: Vec<String>,
    actions: HashMap<String, Vec<String>>,
    labels: Vec<(usize, String, Vec<String>)>,
    trs: Vec<(usize, String, Vec<String>, String)>,
    weights: Vec<(usize, String, String, i64)>,
    goals: Vec<(usize, String, String)>,
}

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

fn key_value(line: usize, stmt: &str) -> Result<(&str, &str), GameFileError> {
    stmt.split_once(':')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| parse_err(line, format!("expected ':' in '{stmt}'")))
}

fn read_raw(text: &str) -> Result<Raw, GameFileError> {
    let mut raw = Raw::default();
    for (line, stmt) in statements(text)? {
        let keyword = stmt.split_whitespace().next().unwrap_or("");
        let keyword = keyword.split(':').next().unwrap_or("");
        match keyword {
            "players" => raw.players = Some(words(key_value(line, &stmt)?.1)),
            "states" => raw.states = Some(words(key_value(line, &stmt)?.1)),
            "initial" => raw.initial = Some((line, key_value(line, &stmt)?.1.to_string())),
            "atoms" => raw.atoms = words(key_value(line, &stmt)?.1),
            "actions" | "label" | "goal" => {
                let (head, value) = key_value(line, &stmt)?;
                let name = head[keyword.len()..].trim();
                if name.is_empty() {
                    return Err(parse_err(line, format!("'{keyword}' needs a name")));
                }
                match keyword {
                    "actions" => {
                        if raw.actions.insert(name.to_string(), words(value)).is_some() {
                            return Err(parse_err(line, format!("actions of {name} declared twice")));
                        }
                    }
                    "label" => raw.labels.push((line, name.to_string(), words(value))),
                    _ => raw.goals.push((line, name.to_string(), value.to_string())),
                }
            }
            "tr" => {
                let body = stmt["tr".len()..].trim();
                let (lhs, target) = body
                    .split_once("->")
                    .ok_or_else(|| parse_err(line, "expected '->' in transition"))?;
                let (state, profile) = lhs
                    .split_once('(')
                    .ok_or_else(|| parse_err(line, "expected '(' in transition"))?;
                let profile = profile
                    .trim()
                    .strip_suffix(')')
                    .ok_or_else(|| parse_err(line, "expected ')' in transition"))?;
                let actions = profile.split(',').map(|a| a.trim().to_string()).collect();
                raw.trs.push((line, state.trim().to_string(), actions, target.trim().to_string()));
            }
            "weight" => {
                let body = stmt["weight".len()..].trim();
                let (lhs, value) = body
                    .split_once('=')
                    .ok_or_else(|| parse_err(line, "expected '=' in weight"))?;
                let lhs = words(lhs);
                if lhs.len() != 2 {
                    return Err(parse_err(line, "expected 'weight PLAYER STATE = INT'"));
                }
                let value: i64 = value
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad integer weight '{}'", value.trim())))?;
                raw.weights.push((line, lhs[0].clone(), lhs[1].clone(), value));
            }
            other => return Err(parse_err(line, format!("unknown statement '{other}'"))),
        }
    }
    Ok(raw)
}

fn index_of(names: &[String], name: &str, what: &str, line: usize) -> Result<usize, GameFileError> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| parse_err(line, format!("undeclared {what} '{name}'")))
}

pub fn parse_game(text: &str) -> Result<Game, GameFileError> {
    let raw = read_raw(text)?;
    let players = raw.players.ok_or_else(|| GameFileError::Semantic("missing 'players'".into()))?;
    let states = raw.states.ok_or_else(|| GameFileError::Semantic("missing 'states'".into()))?;
    let (iline, iname) = raw.initial.ok_or_else(|| GameFileError::Semantic("missing 'initial'".into()))?;
    let initial = index_of(&states, &iname, "state", iline)?;
    let mut actions = Vec::new();
    for p in &players {
        let acts = raw
            .actions
            .get(p)
            .ok_or_else(|| GameFileError::Semantic(format!("missing actions for player {p}")))?;
        actions.push(acts.clone());
    }
    if let Some(extra) = raw.actions.keys().find(|k| !players.contains(k)) {
        return Err(GameFileError::Semantic(format!("actions for undeclared player '{extra}'")));
    }
    let mut labels = vec![BTreeSet::new(); states.len()];
    for (line, s, atoms) in &raw.labels {
        let s = index_of(&states, s, "state", *line)?;
        for a in atoms {
            labels[s].insert(index_of(&raw.atoms, a, "atom", *line)?);
        }
    }
    let num_profiles: usize = actions.iter().map(Vec::len).product();
    let strides: Vec<usize> = (0..players.len())
        .map(|i| actions[i + 1..].iter().map(Vec::len).product())
        .collect();
    let profile_text = |p: usize| -> String {
        (0..players.len())
            .map(|i| actions[i][(p / strides[i]) % actions[i].len()].as_str())
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut table: Vec<Option<usize>> = vec![None; states.len() * num_profiles];
    for (line, s, acts, t) in &raw.trs {
        let si = index_of(&states, s, "state", *line)?;
        let ti = index_of(&states, t, "state", *line)?;
        if acts.len() != players.len() {
            return Err(parse_err(
                *line,
                format!("profile has {} actions, expected {}", acts.len(), players.len()),
            ));
        }
        let mut p = 0;
        for (i, a) in acts.iter().enumerate() {
            p += index_of(&actions[i], a, &format!("action of player {}", players[i]), *line)? * strides[i];
        }
        let slot = &mut table[si * num_profiles + p];
        if slot.is_some() {
            return Err(GameFileError::Duplicate {
                line: *line,
                state: s.clone(),
                profile: profile_text(p),
            });
        }
        *slot = Some(ti);
    }
    let mut transitions = Vec::with_capacity(table.len());
    for (k, t) in table.iter().enumerate() {
        match t {
            Some(t) => transitions.push(*t),
            None => {
                return Err(GameFileError::Totality {
                    state: states[k / num_profiles].clone(),
                    profile: profile_text(k % num_profiles),
                })
            }
        }
    }
    let arena = Arena::from_table(players.clone(), actions, states.clone(), initial, raw.atoms.clone(), labels, transitions)
        .map_err(|e| GameFileError::Semantic(e.to_string()))?;

    let mut weighted = vec![false; players.len()];
    let mut weights = vec![vec![0i64; states.len()]; players.len()];
    for (line, p, s, v) in &raw.weights {
        let pi = index_of(&players, p, "player", *line)?;
        let si = index_of(&states, s, "state", *line)?;
        weighted[pi] = true;
        weights[pi][si] = *v;
    }
    let mut goals: Vec<Option<Gr1Formula>> = vec![None; players.len()];
    for (line, p, f) in &raw.goals {
        let pi = index_of(&players, p, "player", *line)?;
        if weighted[pi] {
            return Err(GameFileError::MixedGoals(p.clone()));
        }
        if goals[pi].is_some() {
            return Err(parse_err(*line, format!("second goal for player {p}")));
        }
        let g = parse_gr1(f, arena.atoms()).map_err(|e| parse_err(*line, e.to_string()))?;
        goals[pi] = Some(g);
    }
    let any_goal = goals.iter().any(Option::is_some);
    let any_weight = !raw.weights.is_empty();
    let goals = match (any_goal, any_weight) {
        (true, true) => {
            let p = players
                .iter()
                .enumerate()
                .find(|(i, _)| weighted[*i] || goals[*i].is_none())
                .map(|(_, p)| p.clone())
                .unwrap_or_default();
            return Err(GameFileError::MixedGoals(p));
        }
        (true, false) => {
            let mut out = Vec::new();
            for (p, g) in players.iter().zip(goals) {
                out.push(g.ok_or_else(|| GameFileError::Semantic(format!("player {p} has no goal")))?);
            }
            Goals::Gr1(out)
        }
        (false, true) => Goals::MeanPayoff(Weights(weights)),
        (false, false) => return Err(GameFileError::Semantic("no goals or weights given".into())),
    };
    Game::new(arena, goals).map_err(|e| GameFileError::Semantic(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rv_core::fixtures::g1;

    const G1: &str = "
players: 1 2;
states: s0 sW sL;
initial: s0;
atoms: p;
actions 1: a b;
actions 2: a b;
label sW: p;
tr s0 (a, a) -> sW; tr s0 (b, b) -> sW;
tr s0 (a, b) -> sL; tr s0 (b, a) -> sL;
tr sW (a, a) -> sW; tr sW (a, b) -> sW; tr sW (b, a) -> sW; tr sW (b, b) -> sW;
tr sL (a, a) -> sL; tr sL (a, b) -> sL; tr sL (b, a) -> sL; tr sL (b, b) -> sL;
goal 1: GF p;  # both players want p infinitely often
goal 2: GF p;
";

    #[test]
    fn g1_round_trip() {
        let g = parse_game(G1).unwrap();
        let f = g1();
        assert_eq!(g.arena.num_states(), 3);
        for s in 0..3 {
            for p in 0..4 {
                assert_eq!(g.arena.tr(s, p), f.arena.tr(s, p));
            }
            assert_eq!(g.arena.label(s), f.arena.label(s));
        }
        assert_eq!(g.gr1_goals(), f.gr1_goals());
    }

    #[test]
    fn missing_row() {
        let text = G1.replace("tr sL (b, b) -> sL;", "");
        match parse_game(&text) {
            Err(GameFileError::Totality { state, profile }) => {
                assert_eq!(state, "sL");
                assert_eq!(profile, "b, b");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_row() {
        let text = format!("{G1}\ntr s0 (a, a) -> sL;");
        assert!(matches!(parse_game(&text), Err(GameFileError::Duplicate { .. })));
    }

    #[test]
    fn mixed_goals() {
        let text = format!("{G1}\nweight 1 s0 = 2;");
        assert!(matches!(parse_game(&text), Err(GameFileError::MixedGoals(p)) if p == "1"));
    }

    #[test]
    fn undeclared_names() {
        let text = G1.replace("label sW: p;", "label sW: q;");
        assert!(matches!(parse_game(&text), Err(GameFileError::Parse { line: 8, .. })));
        assert!(parse_game("players: 1;").is_err());
        assert!(matches!(parse_game("players: 1"), Err(GameFileError::Parse { .. })));
    }
}
