use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    root().join("fixtures").join(name).display().to_string()
}

fn rv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rv")).args(args).output().expect("rv runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden mismatch for {name}");
}

#[test]
fn g1_gf_p_has_equilibrium() {
    let g1 = fixture("g1.game");
    let o = rv(&["e-nash", "--game", &g1, "--spec", "GF p"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("YES\n"));
    golden("g1_e_nash_gf_p.txt", &text);
}

#[test]
fn g1_g_not_p_has_none() {
    let g1 = fixture("g1.game");
    let o = rv(&["e-nash", "--game", &g1, "--spec", "G !p"]);
    assert_eq!(o.status.code(), Some(1));
    golden("g1_e_nash_g_not_p.txt", &stdout(&o));
}

#[test]
fn g1_a_nash_and_non_emptiness() {
    let g1 = fixture("g1.game");
    assert_eq!(rv(&["a-nash", "--game", &g1, "--spec", "GF p"]).status.code(), Some(0));
    assert_eq!(rv(&["non-emptiness", "--game", &g1]).status.code(), Some(0));
}

#[test]
fn g2_welfare_opt_close_to_two() {
    let g2 = fixture("g2.game");
    let o = rv(&[
        "welfare-opt", "--game", &g2, "--spec", "GF p_any", "--measure", "usw", "--mode", "max", "--eps", "1/4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let value: rv_core::Rational = stdout(&o).trim().parse().unwrap();
    let mut gap = rv_core::Rational::from_int(2);
    gap -= &value;
    assert!(!gap.is_negative() && gap <= rv_core::Rational::new(1, 4), "got {value}");
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("threshold calls:"));
}

#[test]
fn g2_welfare_threshold() {
    let g2 = fixture("g2.game");
    let yes = rv(&["welfare", "--game", &g2, "--measure", "usw", "--threshold", "2"]);
    assert_eq!(yes.status.code(), Some(0));
    let no = rv(&["welfare", "--game", &g2, "--measure", "usw", "--threshold", "3"]);
    assert_eq!(no.status.code(), Some(1));
    golden("g2_welfare_usw_ge_2.txt", &stdout(&yes));
}

#[test]
fn jobs_do_not_change_output() {
    for (game, spec) in [("g1.game", "GF p"), ("g1.game", "G !p"), ("g2.game", "GF p_any")] {
        let g = fixture(game);
        let one = rv(&["e-nash", "--game", &g, "--spec", spec, "--jobs", "1", "--synthesize"]);
        let four = rv(&["e-nash", "--game", &g, "--spec", spec, "--jobs", "4", "--synthesize"]);
        assert_eq!(one.stdout, four.stdout, "{game} {spec}");
        assert_eq!(one.status.code(), four.status.code());
    }
}

#[test]
fn emitted_witness_revalidates() {
    let dir = std::env::temp_dir().join(format!("rv-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (game, spec) in [("g1.game", "GF p"), ("g2.game", "GF p_any")] {
        let g = fixture(game);
        let w = dir.join(format!("{game}.json")).display().to_string();
        let o = rv(&["e-nash", "--game", &g, "--spec", spec, "--synthesize", "--witness", &w]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o), "YES\n");
        let c = rv(&["check-witness", "--game", &g, "--spec", spec, "--witness", &w]);
        assert_eq!(stdout(&c), "VALID\n", "{game}");
        assert_eq!(c.status.code(), Some(0));
        // The same lasso cannot satisfy a contradicting specification.
        let bad = rv(&["check-witness", "--game", &g, "--spec", "false", "--witness", &w]);
        assert_eq!(bad.status.code(), Some(1));
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn tampered_witness_is_rejected() {
    let g1 = fixture("g1.game");
    let o = rv(&["e-nash", "--game", &g1, "--spec", "GF p"]);
    let json = stdout(&o).split_once('\n').unwrap().1.replace("\"sW\"", "\"sL\"");
    let path = std::env::temp_dir().join(format!("rv-tampered-{}.json", std::process::id()));
    std::fs::write(&path, json).unwrap();
    let c = rv(&["check-witness", "--game", &g1, "--spec", "GF p", "--witness", &path.display().to_string()]);
    assert_eq!(stdout(&c), "INVALID\n");
    std::fs::remove_file(&path).ok();
}

#[test]
fn oracle_agrees_on_fixtures() {
    let g1 = fixture("g1.game");
    assert_eq!(rv(&["oracle", "--game", &g1, "--spec", "GF p"]).status.code(), Some(0));
    assert_eq!(rv(&["oracle", "--game", &g1, "--spec", "G !p"]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    let g1 = fixture("g1.game");
    assert_eq!(rv(&[]).status.code(), Some(2));
    assert_eq!(rv(&["e-nash"]).status.code(), Some(2));
    assert_eq!(rv(&["e-nash", "--game", "missing.game"]).status.code(), Some(2));
    assert_eq!(rv(&["e-nash", "--game", &g1, "--spec", "GF q"]).status.code(), Some(2));
    assert_eq!(rv(&["e-nash", "--game", &g1, "--jobs", "0"]).status.code(), Some(2));
    let g2 = fixture("g2.game");
    let bad_eps = ["welfare-opt", "--game", &g2, "--measure", "usw", "--mode", "max", "--eps", "x"];
    assert_eq!(rv(&bad_eps).status.code(), Some(2));
    // Welfare queries need a mean-payoff game.
    assert_eq!(rv(&["welfare", "--game", &g1, "--measure", "usw", "--threshold", "1"]).status.code(), Some(2));
}
