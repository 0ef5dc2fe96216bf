//! Runs the `gradualhm` binary on the bundled examples.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gradualhm"));
    c.env_remove("GRADUALHM_SEED");
    c
}

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn run_example(name: &str, extra: &[&str]) -> Output {
    let path = example(name);
    let mut args = vec!["run", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn success_example_prints_value_and_binding() {
    let o = run_example("intro_success.itgl", &[]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "- : ? = 2 : int => ?");
    assert!(lines[1].starts_with("where '") && lines[1].ends_with(" := int"), "{out}");
}

#[test]
fn blame_example_exits_two() {
    let o = run_example("intro_blame.itgl", &[]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.starts_with("blame 3 at ") && out.lines().next().unwrap().ends_with("(polarity -)"), "{out}");
}

#[test]
fn divergent_example_times_out() {
    let o = run_example("omega.itgl", &["--max-steps", "1000"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o).trim(), "timeout after 1000 steps");
}

#[test]
fn declarations_run_in_order() {
    let o = run_example("let_poly.itgl", &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "- : int = 120");
}

#[test]
fn trace_lines_are_numbered() {
    let o = run_example("intro_success.itgl", &["--trace"]);
    let out = stdout(&o);
    let trace: Vec<&str> = out.lines().take_while(|l| !l.starts_with("- :")).collect();
    for (k, l) in trace.iter().enumerate() {
        assert!(l.starts_with(&format!("{}: R_", k + 1)), "{l}");
    }
    assert!(trace.iter().any(|l| l.contains("R_InstBase [") && l.ends_with(":= int]")), "{out}");

    let o = run_example("intro_success.itgl", &["--trace=full"]);
    let last = stdout(&o).lines().find(|l| l.starts_with("6: ")).map(str::to_string);
    assert_eq!(last.as_deref(), Some("6: R_Beta 2 : int =>[3+] ?"));
}

#[test]
fn json_output() {
    let o = run_example("intro_blame.itgl", &["--json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).expect("json");
    assert_eq!(v["outcome"], "blame");
    assert_eq!(v["blame"]["label"], "3-");
    assert!(v["steps"].as_u64().unwrap() > 0);
    assert!(v["type"].is_string());
}

#[test]
fn baseline_rejects_residual_type_variables() {
    let o = run_example("intro_success.itgl", &["--mode", "baseline"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn static_errors_exit_one() {
    let dir = std::env::temp_dir().join(format!("gradualhm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (name, src) in [("ill_typed.itgl", "1 + true"), ("syntax.itgl", "fun ->"), ("unbound.itgl", "x")] {
        let p = dir.join(name);
        std::fs::write(&p, src).unwrap();
        let o = run(&["run", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{name}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"), "{name}");
    }
    assert_eq!(run(&["run", dir.join("missing.itgl").to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["prop", "nonsense"]).status.code(), Some(1));
}

#[test]
fn precision_between_files() {
    let dir = std::env::temp_dir().join(format!("gradualhm-prec-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, src: &str| {
        let p = dir.join(name);
        std::fs::write(&p, src).unwrap();
        p.to_str().unwrap().to_string()
    };
    let dynamic = write("dyn.itgl", "fun (x : ?) -> x");
    let int = write("int.itgl", "fun (x : int) -> x");
    let o = run(&["prec", &int, &dynamic]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "[]");
    let o = run(&["prec", &dynamic, &int]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "unrelated");
}

#[test]
fn property_suite() {
    let o = run(&["prop", "safety", "--seeds", "20", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).expect("json");
    assert_eq!(v["cases"], 20);
    assert_eq!(v["failures"], 0);
}

#[test]
fn seed_comes_from_the_environment() {
    let o = bin().args(["prop", "cast-preservation", "--seeds", "3", "--json"]).env("GRADUALHM_SEED", "41").output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).expect("json");
    assert_eq!(v["seed"], 41);
}

#[test]
fn repl_session() {
    let mut child = bin().arg("repl").stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"let id = fun x -> x\nid 3\n:type id true\n:set fuel 10\n(fun (x : ?) -> x x) (fun (x : ?) -> x x)\n:quit\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("val id : "), "{out}");
    assert_eq!(&lines[1..], ["- : int = 3", "- : bool", "timeout after 10 steps"]);
}
