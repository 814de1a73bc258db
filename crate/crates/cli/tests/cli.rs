use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn nahm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nahm")).args(args).env_remove("NAHM_ORDER").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn eval_rogers_ramanujan() {
    let o = nahm(&["eval", "--triple", &fixture("rr1.json"), "--order", "5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "0:1 1:1 2:1 3:1 4:2\n");
}

#[test]
fn eval_order_zero_is_empty() {
    let o = nahm(&["eval", "--triple", &fixture("rr1.json"), "--order", "0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "");
}

#[test]
fn eval_indefinite_lift_exits_3() {
    let o = nahm(&["eval", "--triple", &fixture("example2_lift.json"), "--order", "5"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn malformed_input_exits_2() {
    assert_eq!(code(&nahm(&["eval", "--triple", &fixture("malformed.json")])), 2);
    assert_eq!(code(&nahm(&["eval", "--triple", &fixture("asymmetric.json")])), 2);
    assert_eq!(code(&nahm(&["eval", "--triple", &fixture("missing.json")])), 2);
    assert_eq!(code(&nahm(&["verify", "--name", "no-such-identity"])), 2);
    assert_eq!(code(&nahm(&["verify", "--name", "vz-rank2-2", "--bind", "a=1"])), 2);
}

#[test]
fn scaled_exponents_carry_denominator() {
    let o = nahm(&["eval", "--triple", &fixture("example11_b1.json"), "--order", "2"]);
    assert_eq!(stdout(&o), "-1/20:1 9/20:3 29/20:6 39/20:3\n");
    let o = nahm(&["eval", "--triple", &fixture("rr1.json"), "--order", "3", "--base-scale", "2"]);
    assert_eq!(stdout(&o), "0/2:1 2/2:1 4/2:1\n");
}

#[test]
fn environment_order_yields_to_flag() {
    let run = |flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_nahm"));
        c.args(["eval", "--triple", &fixture("rr1.json")]).env("NAHM_ORDER", "3");
        if let Some(f) = flag {
            c.args(["--order", f]);
        }
        String::from_utf8(c.output().unwrap().stdout).unwrap()
    };
    assert_eq!(run(None), "0:1 1:1 2:1\n");
    assert_eq!(run(Some("5")), "0:1 1:1 2:1 3:1 4:2\n");
}

#[test]
fn lift_of_unimodular_matrix() {
    let o = nahm(&["lift", "--triple", &fixture("example3.json")]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["A"], serde_json::json!([["1", "0", "0"], ["0", "2", "1"], ["0", "1", "1"]]));
    assert_eq!(v["rank"], 3);
}

#[test]
fn dual_of_lift_and_involution() {
    let dir = std::env::temp_dir().join(format!("nahm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let lifted = stdout(&nahm(&["lift", "--triple", &fixture("example11_b1.json")]));
    let lp = dir.join("lift.json");
    std::fs::write(&lp, &lifted).unwrap();
    let d1 = stdout(&nahm(&["dual", "--triple", lp.to_str().unwrap()]));
    let v: serde_json::Value = serde_json::from_str(&d1).unwrap();
    assert_eq!(v["C"], "-3/40");
    let dp = dir.join("dual.json");
    std::fs::write(&dp, &d1).unwrap();
    let d2 = stdout(&nahm(&["dual", "--triple", dp.to_str().unwrap()]));
    assert_eq!(d2, lifted);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_registry_keys() {
    let o = nahm(&["verify", "--name", "thm-lift-11-1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "thm-lift-11-1 PASS order=200\n");
    let o = nahm(&["verify", "--name", "rr-1", "--order", "50"]);
    assert_eq!(stdout(&o), "rr-1 PASS order=50\n");
    let o = nahm(&["verify", "--name", "vz-rank2-2", "--bind", "a=2"]);
    assert_eq!(stdout(&o), "vz-rank2-2[a=2] PASS order=120\n");
}

#[test]
fn injected_fault_is_reported() {
    let o = nahm(&["verify", "--file", &fixture("rr1_fault.json")]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "rr-1 FAIL order=120 exponent=7 lhs=3 rhs=4\n");
    let o = nahm(&["verify", "--name", "rr-2", "--perturb", "-q^(3)"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("exponent=3"));
}

#[test]
fn recognize_outputs() {
    let o = nahm(&["recognize", "--triple", &fixture("rr1.json"), "--window", "60", "--max-period", "20"]);
    assert_eq!(stdout(&o), "period=5 pattern=[1,0,0,1,0] C=-1/60\n");
    let o = nahm(&["recognize", "--series", &fixture("constant1.txt"), "--window", "10", "--max-period", "5"]);
    assert!(stdout(&o).starts_with("period=1 pattern=[0]"));
    let o = nahm(&["recognize", "--registry", "nonmod-1", "--side", "lhs", "--window", "240", "--max-period", "60"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "no period ≤ 60\n");
    let o = nahm(&["recognize", "--triple", &fixture("rr1.json"), "--registry", "rr-1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn search_small_and_degenerate() {
    let args = ["search", "--matrix", &fixture("rank1.json"), "--denominator-bound", "2", "--order", "80"];
    let extra = ["--window", "60", "--max-period", "20"];
    let o = nahm(&[&args[..], &extra[..]].concat());
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "candidate B=(0) period=5 window=60 C=-1/60\ncandidate B=(1) period=5 window=60 C=11/60\n"
    );
    let o1 = nahm(&[&args[..], &extra[..], &["--jobs", "1"]].concat());
    assert_eq!(stdout(&o1), stdout(&o));

    let o = nahm(&["search", "--matrix", &fixture("indefinite.json"), "--order", "40", "--window", "20"]);
    assert_eq!(code(&o), 3);
    let o = nahm(&["search", "--matrix", &fixture("dual32.json"), "--range", "1", "0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "");
}

#[test]
fn list_and_show() {
    let o = nahm(&["list"]);
    assert!(stdout(&o).lines().any(|l| l.starts_with("thm1-1\t")));
    let o = nahm(&["show", "--name", "rr-2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["name"], "rr-2");
    assert_eq!(v["lhs"]["kind"], "nahm");
}
