use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn teamsem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teamsem"))
        .args(args)
        .env_remove("TEAMSEM_DEPS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn eval_exit_codes() {
    let model = data("binary.model");
    let team = data("two_values.team");
    let (m, t) = (model.to_str().unwrap(), team.to_str().unwrap());

    let o = teamsem(&["eval", "--model", m, "--team", t, "-f", "#const(v0)"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "false");

    let o = teamsem(&["eval", "--model", m, "--team", t, "-f", "P(v0) | ~P(v0)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "true");

    let o = teamsem(&["eval", "--model", m, "-f", "E x P(x)", "--strategy", "naive"]);
    assert_eq!(o.status.code(), Some(0));

    let o = teamsem(&["eval", "--model", m, "--team", t, "-f", "#dep(v0;v0)", "--trace"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("#dep(v0;v0)"));
}

#[test]
fn errors_name_their_source() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.model");
    std::fs::write(&bad, "domain 0 1\nrel R 2\n  0 7\nend\n").unwrap();
    let o = teamsem(&["eval", "--model", bad.to_str().unwrap(), "-f", "x = x"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("bad.model") && err.contains("line 3"), "{err}");

    let o = teamsem(&["parse", "-f", "A x (P(x)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1:10"), "{}", stderr(&o));

    let o = teamsem(&["eval", "--model", "/nonexistent.model", "-f", "x = x"]);
    assert_eq!(o.status.code(), Some(2));

    let o = teamsem(&["classify", "--dep", "nosuchdep"]);
    assert_eq!(o.status.code(), Some(2));

    let o = teamsem(&["verify", "nosuchharness"]);
    assert_eq!(o.status.code(), Some(2));

    // clap's own usage errors share the error code
    let o = teamsem(&["eval"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn classify_constancy() {
    let o = teamsem(&["classify", "--dep", "const/1", "--max-domain", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let table: Vec<(String, String)> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let mut w = l.split_whitespace();
            (w.next().unwrap().to_string(), w.next().unwrap().to_string())
        })
        .collect();
    let expect = [
        ("empty-team", "yes"),
        ("downwards", "yes"),
        ("upwards", "no"),
        ("union", "no"),
        ("closed-world", "yes"),
    ];
    let expect: Vec<(String, String)> = expect.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    assert_eq!(table, expect);
}

#[test]
fn dmax_and_transforms() {
    let o = teamsem(&["dmax", "--dep", "const/1", "--max-domain", "3"]);
    assert_eq!(stdout(&o).lines().collect::<Vec<_>>(), ["{0}", "{1}", "{2}"]);

    let o = teamsem(&["transform", "desugar", "-f", "P(x) ~> #const(x)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "!P(x) | P(x) & #const(x)");

    let o = teamsem(&["transform", "eq1", "--dep", "const/1", "--theta", "x = z"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("#const("));

    let o = teamsem(&["transform", "pipeline", "--dep", "const/1", "-f", "A x (#const(x) | x = x)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("A x"));

    let o = teamsem(&["transform", "relativize", "--dep", "nt", "--vars", "v"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("closed-world"));
}

#[test]
fn dependency_file_from_environment() {
    let model = data("binary.model");
    let team = data("two_values.team");
    let o = Command::new(env!("CARGO_BIN_EXE_teamsem"))
        .args(["eval", "--model", model.to_str().unwrap(), "--team", team.to_str().unwrap(), "-f", "#ne(v0)"])
        .env("TEAMSEM_DEPS", data("ne.deps"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = teamsem(&["eval", "--model", model.to_str().unwrap(), "-f", "E x #ne(x)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eq1.report");
    let o = teamsem(&["verify", "eq1", "--seed", "42", "--report", path.to_str().unwrap(), "--jobs", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    let report = teamsem::verify::Report::parse(&text).unwrap();
    assert_eq!(report.harness, "eq1");
    assert!(report.passed());
    assert!(text.lines().any(|l| l.starts_with("CASE eq1/empty-teams pass")));
}

#[test]
fn output_is_deterministic() {
    let run = || stdout(&teamsem(&["verify", "const-not-flat", "--budget", "40", "--report", "/dev/null"]));
    let strip = |s: String| -> String { s.lines().filter(|l| !l.contains(" ms")).collect::<Vec<_>>().join("\n") };
    assert_eq!(strip(run()), strip(run()));
}
