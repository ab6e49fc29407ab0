//! Acceptance criteria 1 to 9. Each prints one PASS or FAIL line.

mod common;

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::SeedableRng;
use rv_core::engine::{
    a_nash, check_witness, e_nash, non_emptiness, synthesize_profile, Options, Punishment, Specification,
};
use rv_core::fixtures::{g1, g2};
use rv_core::formula::{negate_to_ltl, parse_gr1, parse_ltl};
use rv_core::lp::{build_lp_psi, build_lp_theta, feasible};
use rv_core::model::{play, Arena, Game, Goals, Weights};
use rv_core::oracle::{
    brute_cycle_feasible, brute_e_nash, brute_opt_welfare, brute_pun_gr1, brute_pun_mp, verify_punishing_strategy,
    CycleQuery, OracleConfig,
};
use rv_core::punish_gr1::punish_region;
use rv_core::punish_mp::punish_values;
use rv_core::welfare::{
    approx_opt_welfare, bisect, bounds, welfare_threshold, Direction, Measure, Mode, WelfareQuery,
};
use rv_core::Rational;

const GR1_GAMES: usize = 500;
const GR1_TIME_LIMIT: Duration = Duration::from_secs(300);
const MP_GAMES: usize = 500;
const PUNISH_GAMES: usize = 300;
const MAX_GAP_RATE: f64 = 0.05;
const LP_GRAPHS: usize = 200;
const DUALITY_GAMES: usize = 100;
const MAX_SCALING_SLOPE: f64 = 4.0;
const EPSILONS: [(i64, i64); 3] = [(1, 1), (1, 4), (1, 16)];

struct Report {
    lines: Vec<(usize, bool, String)>,
}

impl Report {
    fn record(&mut self, n: usize, ok: bool, detail: String) {
        println!("criterion {n}: {} {detail}", if ok { "PASS" } else { "FAIL" });
        self.lines.push((n, ok, detail));
    }
}

/// Yes-instances gathered while running criteria 1 and 2, for criterion 4.
#[derive(Default)]
struct Witnesses {
    checked: usize,
    failures: Vec<String>,
    mp_yes: usize,
    mp_gaps: usize,
    gap_disagreements: usize,
}

impl Witnesses {
    fn inspect(&mut self, game: &Game, spec: &Specification, verdict: &rv_core::engine::Verdict, oracle_yes: bool) {
        if !verdict.answer {
            return;
        }
        let is_mp = matches!(game.goals, Goals::MeanPayoff(_));
        if is_mp {
            self.mp_yes += 1;
        }
        let Some(w) = &verdict.witness else {
            if is_mp {
                self.mp_gaps += 1;
                if !oracle_yes {
                    self.gap_disagreements += 1;
                }
            } else {
                self.failures.push("GR(1) yes without witness".into());
            }
            return;
        };
        self.checked += 1;
        let pun = Punishment::compute(game);
        if let Err(e) = check_witness(game, spec, w, &pun) {
            self.failures.push(e);
            return;
        }
        match synthesize_profile(game, Some(w), &pun) {
            Ok(profile) => {
                if !profile.validate(&game.arena) || play(&game.arena, &profile).canonical() != w.lasso {
                    self.failures.push("synthesised profile does not replay the witness".into());
                }
            }
            Err(e) => self.failures.push(e.to_string()),
        }
    }
}

fn criterion_1(report: &mut Report, wit: &mut Witnesses) {
    let mut rng = StdRng::seed_from_u64(1);
    let cfg = OracleConfig::default();
    let mut agree = 0;
    let mut yes = 0;
    let mut engine_time = Duration::ZERO;
    let mut problems = Vec::new();
    for k in 0..GR1_GAMES {
        let game = common::random_gr1_game(&mut rng, 2, 3, 2);
        let spec = common::random_gr1_spec(&mut rng, &game);
        let t = Instant::now();
        let v = e_nash(&game, &spec, Options::default());
        engine_time += t.elapsed();
        yes += v.answer as usize;
        match brute_e_nash(&game, &spec, &cfg) {
            Ok(o) if o == v.answer => {
                agree += 1;
                wit.inspect(&game, &spec, &v, o);
            }
            Ok(o) => problems.push(format!("game {k}: engine {} oracle {o}", v.answer)),
            Err(e) => problems.push(format!("game {k}: {e}")),
        }
    }
    let ok = agree == GR1_GAMES && engine_time < GR1_TIME_LIMIT;
    report.record(
        1,
        ok,
        format!(
            "{agree}/{GR1_GAMES} agree ({yes} yes), engine time {:.2}s {}",
            engine_time.as_secs_f64(),
            problems.first().cloned().unwrap_or_default()
        ),
    );
}

fn criterion_2(report: &mut Report, wit: &mut Witnesses) {
    let mut rng = StdRng::seed_from_u64(2);
    let cfg = OracleConfig::default();
    let mut agree = 0;
    let mut values_equal = 0;
    let mut yes = 0;
    let mut problems = Vec::new();
    for k in 0..MP_GAMES {
        let game = common::random_mp_game(&mut rng, 2, 3, 2);
        let spec = Specification::Gr1(common::random_small_gr1(&mut rng));
        let same_values = (0..2).all(|i| {
            brute_pun_mp(&game, i, &cfg).map(|v| v == punish_values(&game, i).values).unwrap_or(false)
        });
        values_equal += same_values as usize;
        if !same_values {
            problems.push(format!("game {k}: punishment values differ"));
        }
        let v = e_nash(&game, &spec, Options::default());
        yes += v.answer as usize;
        match brute_e_nash(&game, &spec, &cfg) {
            Ok(o) if o == v.answer => {
                agree += 1;
                wit.inspect(&game, &spec, &v, o);
            }
            Ok(o) => problems.push(format!("game {k}: engine {} oracle {o}", v.answer)),
            Err(e) => problems.push(format!("game {k}: {e}")),
        }
    }
    report.record(
        2,
        agree == MP_GAMES && values_equal == MP_GAMES,
        format!(
            "{agree}/{MP_GAMES} verdicts agree ({yes} yes), {values_equal}/{MP_GAMES} value tables equal {}",
            problems.first().cloned().unwrap_or_default()
        ),
    );
}

fn criterion_3(report: &mut Report) {
    let mut rng = StdRng::seed_from_u64(3);
    let cfg = OracleConfig::default();
    let (mut regions, mut strategies) = (0, 0);
    let mut total = 0;
    for _ in 0..PUNISH_GAMES {
        let game = common::random_gr1_game(&mut rng, 2, 3, 2);
        for j in 0..2 {
            total += 1;
            let res = punish_region(&game, j);
            if brute_pun_gr1(&game, j, &cfg).map(|r| r == res.region).unwrap_or(false) {
                regions += 1;
            }
            if verify_punishing_strategy(&game, &res, &cfg).unwrap_or(false) {
                strategies += 1;
            }
        }
    }
    report.record(
        3,
        regions == total && strategies == total,
        format!("{PUNISH_GAMES} games: {regions}/{total} regions equal, {strategies}/{total} strategies re-verified"),
    );
}

fn criterion_4(report: &mut Report, wit: &Witnesses) {
    let rate = if wit.mp_yes == 0 {
        0.0
    } else {
        wit.mp_gaps as f64 / wit.mp_yes as f64
    };
    let ok = wit.failures.is_empty() && rate < MAX_GAP_RATE && wit.gap_disagreements == 0 && wit.checked > 0;
    report.record(
        4,
        ok,
        format!(
            "{} witnesses checked and replayed, {} failures, gap rate {}/{} = {:.3} {}",
            wit.checked,
            wit.failures.len(),
            wit.mp_gaps,
            wit.mp_yes,
            rate,
            wit.failures.first().cloned().unwrap_or_default()
        ),
    );
}

fn criterion_5(report: &mut Report) {
    let mut rng = StdRng::seed_from_u64(5);
    let (mut runs, mut agree, mut exact) = (0, 0, 0);
    let mut solutions = 0;
    for _ in 0..LP_GRAPHS {
        let g = common::random_weighted_graph(&mut rng, 6, 2);
        let mut queries = vec![(build_lp_theta(&g), CycleQuery::Theta)];
        for l in 0..g.psi.len() {
            queries.push((build_lp_psi(&g, l), CycleQuery::Psi(l)));
        }
        for (lp, q) in queries {
            runs += 1;
            let sol = feasible(&lp);
            if let Some(x) = &sol {
                solutions += 1;
                exact += lp.check(x) as usize;
            }
            if brute_cycle_feasible(&g, q, 100_000).map(|b| b == sol.is_some()).unwrap_or(false) {
                agree += 1;
            }
        }
    }
    report.record(
        5,
        agree == runs && exact == solutions,
        format!("{LP_GRAPHS} graphs, {agree}/{runs} programs agree, {exact}/{solutions} solutions re-substitute"),
    );
}

fn duality_holds(game: &Game, spec: &Specification) -> bool {
    let o = Options::default();
    let neg = Specification::Ltl(negate_to_ltl(&spec.to_ltl()));
    a_nash(game, spec, o).answer == !e_nash(game, &neg, o).answer
        && non_emptiness(game, o).answer == e_nash(game, &Specification::truth(), o).answer
}

fn criterion_6(report: &mut Report) {
    let mut cases = 0;
    let mut holds = 0;
    let mut oracle_checked = 0;
    let cfg = OracleConfig::default();
    let g = g1();
    let atoms = g.arena.atoms().to_vec();
    let mut fixtures: Vec<(Game, Specification)> = ["GF p", "G !p", "F p", "FG !p", "true"]
        .iter()
        .map(|t| (g.clone(), Specification::Ltl(parse_ltl(t, &atoms).expect("formula"))))
        .collect();
    fixtures.push((g.clone(), Specification::Gr1(parse_gr1("GF p", &atoms).expect("formula"))));
    let g = g2();
    for t in ["GF at_s0", "true", "FG p_any"] {
        let f = parse_ltl(t, g.arena.atoms()).expect("formula");
        fixtures.push((g.clone(), Specification::Ltl(f)));
    }
    let mut rng = StdRng::seed_from_u64(6);
    for _ in 0..DUALITY_GAMES {
        let game = common::random_gr1_game(&mut rng, 2, 3, 2);
        let spec = common::random_gr1_spec(&mut rng, &game);
        fixtures.push((game, spec));
    }
    for _ in 0..DUALITY_GAMES {
        let game = common::random_mp_game(&mut rng, 2, 3, 2);
        let spec = Specification::Gr1(common::random_small_gr1(&mut rng));
        fixtures.push((game, spec));
    }
    for (game, spec) in &fixtures {
        cases += 1;
        let mut ok = duality_holds(game, spec);
        // On GR(1) games the dual answer is also checked against the oracle.
        if matches!(game.goals, Goals::Gr1(_)) {
            let neg = Specification::Ltl(negate_to_ltl(&spec.to_ltl()));
            if let Ok(o) = brute_e_nash(game, &neg, &cfg) {
                oracle_checked += 1;
                ok &= a_nash(game, spec, Options::default()).answer == !o;
            }
        }
        holds += ok as usize;
    }
    report.record(
        6,
        holds == cases,
        format!("{holds}/{cases} cases, {oracle_checked} also checked against the oracle"),
    );
}

fn ceil_log2_ratio(a: &Rational, b: &Rational, eps: &Rational) -> usize {
    if a == b {
        return 0;
    }
    let ratio = (&(b - a) / eps).to_f64();
    ratio.log2().ceil().max(0.0) as usize
}

/// G2 together with small two-state games of the same shape.
fn g2_class() -> Vec<Game> {
    let mut out = vec![g2()];
    let mut rng = StdRng::seed_from_u64(7);
    while out.len() < 8 {
        let game = common::random_mp_game(&mut rng, 2, 2, 2);
        if game.arena.num_states() == 2 && non_emptiness(&game, Options::default()).answer {
            out.push(game);
        }
    }
    out
}

fn criterion_7(report: &mut Report) {
    let o = Options::default();
    let cfg = OracleConfig::default();
    let games = g2_class();
    let mut problems: Vec<String> = Vec::new();
    // Monotonicity of threshold answers.
    for (k, game) in games.iter().enumerate() {
        for measure in [Measure::Utilitarian, Measure::Egalitarian] {
            for direction in [Direction::AtLeast, Direction::AtMost] {
                let answers: Vec<bool> = (-10..=10)
                    .map(|h| {
                        let q = WelfareQuery {
                            measure,
                            direction,
                            threshold: Rational::new(h, 2),
                            spec: Specification::truth(),
                        };
                        welfare_threshold(game, &q, o).expect("MP game").answer
                    })
                    .collect();
                let monotone = match direction {
                    Direction::AtLeast => answers.windows(2).all(|w| w[0] >= w[1]),
                    Direction::AtMost => answers.windows(2).all(|w| w[0] <= w[1]),
                };
                if !monotone {
                    problems.push(format!("game {k} {measure:?} {direction:?} not monotone"));
                }
            }
        }
    }
    // Approximation quality and iteration counts.
    let mut approximations = 0;
    for (k, game) in games.iter().enumerate() {
        let (a, b) = bounds(Measure::Utilitarian, game.weights().expect("MP"));
        for (mode, maximize) in [(Mode::Max, true), (Mode::Min, false)] {
            let exact = brute_opt_welfare(game, &Specification::truth(), maximize, &cfg)
                .expect("oracle")
                .expect("equilibrium exists");
            for (num, den) in EPSILONS {
                let eps = Rational::new(num, den);
                let r = approx_opt_welfare(game, &Specification::truth(), Measure::Utilitarian, mode, &eps, o)
                    .expect("equilibrium exists");
                approximations += 1;
                if (&r.value - &exact).abs() > eps {
                    problems.push(format!("game {k} {mode:?} eps {eps}: got {} want {exact}", r.value));
                }
                if r.threshold_calls != ceil_log2_ratio(&a, &b, &eps) {
                    problems.push(format!("game {k}: {} calls", r.threshold_calls));
                }
            }
        }
    }
    report.record(
        7,
        problems.is_empty(),
        format!(
            "{} games, {approximations} approximations within eps {}",
            games.len(),
            problems.first().cloned().unwrap_or_default()
        ),
    );
}

fn timed_e_nash(players: usize, states: usize, seed: u64) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut total = Duration::ZERO;
    let mut made = 0;
    while made < 4 {
        let game = common::random_gr1_game(&mut rng, players, states, 2);
        if game.arena.num_states() != states {
            // Force the exact size by re-drawing.
            continue;
        }
        let atoms = game.arena.atoms();
        let specs = [
            Specification::Gr1(parse_gr1("GF p", atoms).expect("formula")),
            Specification::Ltl(parse_ltl("G !p", atoms).expect("formula")),
        ];
        for spec in &specs {
            let t = Instant::now();
            let _ = e_nash(&game, spec, Options::default());
            total += t.elapsed();
        }
        made += 1;
    }
    total.as_secs_f64() / made as f64
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

fn criterion_8(report: &mut Report) {
    let sizes = [8usize, 16, 32, 64];
    let points: Vec<(f64, f64)> = sizes
        .iter()
        .map(|&n| (n as f64, timed_e_nash(2, n, 80 + n as u64).max(1e-6)))
        .collect();
    let s = slope(&points);
    let players: Vec<String> = [2usize, 3, 4]
        .iter()
        .map(|&p| format!("{p} players {:.4}s", timed_e_nash(p, 8, 90 + p as u64)))
        .collect();
    let times: Vec<String> = points.iter().map(|(n, t)| format!("|St|={n} {t:.4}s")).collect();
    report.record(
        8,
        s < MAX_SCALING_SLOPE,
        format!("slope {s:.2} ({}); recorded: {}", times.join(", "), players.join(", ")),
    );
}

fn criterion_9(report: &mut Report) {
    let mut calls = 0;
    let (_, n) = bisect(Rational::from_int(0), Rational::from_int(8), &Rational::one(), Mode::Max, |t| {
        calls += 1;
        t <= &Rational::from_int(5)
    });
    // The same interval produced by a one-player game with weights 0 and 8.
    let arena = Arena::new(
        vec!["1".into()],
        vec![vec!["stay".into(), "move".into()]],
        vec!["low".into(), "high".into()],
        0,
        vec![],
        vec![Default::default(); 2],
        |s, a| if a[0] == 1 { 1 - s } else { s },
    )
    .expect("arena");
    let game = Game::new(arena, Goals::MeanPayoff(Weights(vec![vec![0, 8]]))).expect("game");
    let r = approx_opt_welfare(&game, &Specification::truth(), Measure::Utilitarian, Mode::Max, &Rational::one(), Options::default())
        .expect("equilibrium exists");
    report.record(
        9,
        calls == 3 && n == 3 && r.threshold_calls == 3,
        format!("{calls} calls on [0, 8] with eps 1, {} calls through the welfare driver", r.threshold_calls),
    );
}

#[test]
fn acceptance() {
    let mut report = Report { lines: Vec::new() };
    let mut wit = Witnesses::default();
    criterion_1(&mut report, &mut wit);
    criterion_2(&mut report, &mut wit);
    criterion_3(&mut report);
    criterion_4(&mut report, &wit);
    criterion_5(&mut report);
    criterion_6(&mut report);
    criterion_7(&mut report);
    criterion_8(&mut report);
    criterion_9(&mut report);
    let failed: Vec<usize> = report.lines.iter().filter(|l| !l.1).map(|l| l.0).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
