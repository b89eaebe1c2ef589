use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mml")).args(args).env_remove("MML_SEED").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("mml-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn theorem_backed_run_exits_clean() {
    let out = mml(&["verify", "ah", "--k", "0.25", "--t", "0.25", "--q", "auto", "--trials", "100"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let q = reports[0]["params"]["q"].as_f64().unwrap();
    // 2ktL / (1 - 2kt) with L = 1 + 2t - 4kt
    let (k, t) = (0.25f64, 0.25f64);
    let l = 1.0 + 2.0 * t - 4.0 * k * t;
    assert!((q - 2.0 * k * t * l / (1.0 - 2.0 * k * t)).abs() < 1e-15);
    assert_eq!(reports[0]["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn pinned_tilde_counterexample_exits_one() {
    let out =
        mml(&["verify", "ah", "--mean", "tilde", "--k", "0.95", "--q", "0.05", "--family", "2x2", "--trials", "2"]);
    assert_eq!(code(&out), 1);
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let v = &reports[0]["violations"][0];
    assert_eq!(v["n"], 2);
    let margin = v["margin"].as_f64().unwrap();
    assert!((margin - -4.139106671261e-4).abs() < 1e-12, "{margin}");
    assert_eq!(v["inputs"]["A"]["re"], serde_json::json!([[5.0, 3.0], [3.0, 5.0]]));
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        &["verify", "ah", "--bogus"][..],
        &["verify", "ah", "--k", "0.9", "--t", "0.9"],
        &["verify", "prop22", "--trials", "0"],
        &["verify", "eq-see", "--k", "0.7"],
        &["verify", "log-maj", "--theorem", "nope"],
        &["sweep", "ah", "--grid", "q="],
        &["sweep", "ah", "--grid", "q=0:1:0.0001", "--grid", "t=0.1,0.2"],
        &["search", "/nonexistent/campaign.json"],
    ] {
        assert_eq!(code(&mml(args)), 2, "{args:?}");
    }
}

#[test]
fn sweep_of_natural_half_is_clean() {
    let out = mml(&["sweep", "ah", "--mean", "natural", "--t", "0.5", "--grid", "q=0.05:1.0:0.05", "--trials", "40"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,trials,worstMargin,violations"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| r.ends_with(",0")));
}

#[test]
fn h_value_sign_map() {
    // L = 0.1 lies below L_{x,y} away from the diagonal, so h < 0 there and h = 0 on it
    let out = mml(&["sweep", "h-value", "--l", "0.1", "--grid", "x=1", "--grid", "y=0.25,1,4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let signs: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(signs, ["1", "0", "1"]);
}

#[test]
fn reports_are_byte_identical_across_workers() {
    let dir = Scratch::new("det");
    let (a, b) = (dir.path("a.json"), dir.path("b.csv"));
    let c = dir.path("c.json");
    mml(&["verify", "prop22", "--trials", "30", "--seed", "9", "--out", s(&a)]);
    mml(&["verify", "prop22", "--trials", "30", "--seed", "9", "--jobs", "1", "--out", s(&c)]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
    let out = mml(&["verify", "prop22", "--trials", "30", "--seed", "9", "--format", "csv", "--out", s(&b)]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(&b).unwrap();
    assert!(csv.starts_with("check,"));
    assert!(csv.lines().next().unwrap().ends_with(",trials,worstMargin,violations"));
    assert_eq!(csv.lines().count(), 8);
}

#[test]
fn seed_comes_from_the_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_mml"));
        cmd.args(["verify", "grand-furuta", "--trials", "5"]).args(extra).env_remove("MML_SEED");
        if let Some(v) = env {
            cmd.env("MML_SEED", v);
        }
        cmd.output().unwrap().stdout
    };
    assert_eq!(run(Some("42"), &[]), run(None, &["--seed", "42"]));
    assert_ne!(run(Some("42"), &[]), run(None, &[]));
}

#[test]
fn search_writes_identical_results() {
    let dir = Scratch::new("search");
    let campaign = dir.path("campaign.json");
    std::fs::write(
        &campaign,
        r#"{"schemaVersion":1,"target":"ahGapNaturalT","box":{"t":[0.28,0.32],"q":[0.6,0.65]},"budget":100,"baseSeed":1}"#,
    )
    .unwrap();
    let (r1, r2) = (dir.path("r1.json"), dir.path("r2.json"));
    let out = mml(&["search", s(&campaign), "--out", s(&r1)]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("no violation found"));
    mml(&["search", s(&campaign), "--out", s(&r2), "--jobs", "2"]);
    assert_eq!(std::fs::read(&r1).unwrap(), std::fs::read(&r2).unwrap());
    let result: serde_json::Value = serde_json::from_slice(&std::fs::read(&r1).unwrap()).unwrap();
    assert_eq!(result["trialsRun"], 100);
    assert_eq!(result["schemaVersion"], 1);

    let bad = dir.path("bad.json");
    std::fs::write(&bad, r#"{"schemaVersion":1,"target":"ahGapNaturalT","box":{"t":[0.28,0.32],"q":[0.3,0.65]},"budget":10,"baseSeed":1}"#).unwrap();
    assert_eq!(code(&mml(&["search", s(&bad)])), 2);
}

#[test]
fn order_campaign_reports_violations_but_exits_clean() {
    let dir = Scratch::new("order");
    let campaign = dir.path("order.json");
    let result = dir.path("order-result.json");
    std::fs::write(
        &campaign,
        format!(
            r#"{{"schemaVersion":1,"target":"orderNaturalVsTilde","box":{{"t":[0.5,0.9]}},"budget":40,"baseSeed":2,"outputPath":{}}}"#,
            serde_json::to_string(s(&result)).unwrap()
        ),
    )
    .unwrap();
    let out = mml(&["search", s(&campaign)]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("violation found"));
    let r: serde_json::Value = serde_json::from_slice(&std::fs::read(&result).unwrap()).unwrap();
    assert!(r["order"]["incomparable"].as_u64().unwrap() > 0);
}

#[test]
fn matrix_files_feed_the_ah_check() {
    let dir = Scratch::new("files");
    let (a, b) = (dir.path("a.json"), dir.path("b.json"));
    std::fs::write(&a, r#"{"n":2,"re":[[5,3],[3,5]]}"#).unwrap();
    std::fs::write(&b, r#"{"n":2,"re":[[1,0],[0,0]]}"#).unwrap();
    let out = mml(&[
        "verify",
        "ah",
        "--mean",
        "tilde",
        "--k",
        "0.95",
        "--q",
        "0.05",
        "--a-file",
        s(&a),
        "--b-file",
        s(&b),
        "--trials",
        "1",
    ]);
    assert_eq!(code(&out), 1);
    std::fs::write(&b, r#"{"n":2,"re":[[1,2],[0,0]]}"#).unwrap();
    let out = mml(&["verify", "ah", "--k", "0.25", "--t", "0.25", "--a-file", s(&a), "--b-file", s(&b)]);
    assert_eq!(code(&out), 2);
}
