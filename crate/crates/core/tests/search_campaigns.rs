use std::collections::BTreeMap;

use mml_core::linalg::{MatrixJson, PsdMatrix};
use mml_core::search::*;
use mml_core::twobytwo::{projection, FamilyPoint};
use mml_core::verify::ViolationRecord;
use mml_core::Error;

fn campaign(json: &str) -> Campaign {
    serde_json::from_str(json).unwrap()
}

fn ah_gap(budget: usize) -> Campaign {
    campaign(&format!(
        r#"{{"schemaVersion":1,"target":"ahGapNaturalT","box":{{"t":[0.28,0.32],"q":[0.6,0.65],"n":[2,4]}},"budget":{budget},"baseSeed":1}}"#
    ))
}

fn order(budget: usize) -> Campaign {
    campaign(&format!(
        r#"{{"schemaVersion":1,"target":"orderNaturalVsTilde","box":{{"t":[0.5,0.9],"n":[2,3]}},"budget":{budget},"baseSeed":5}}"#
    ))
}

#[test]
fn zero_budget_is_rejected() {
    let mut c = ah_gap(1);
    c.budget = 0;
    assert!(matches!(run_campaign(&c), Err(Error::Campaign(_))));
}

#[test]
fn boxes_outside_the_gap_are_rejected() {
    let bad = [
        // q reaches the proven region t/(1-t) ≈ 0.4286 at t = 0.3
        r#"{"schemaVersion":1,"target":"ahGapNaturalT","box":{"t":[0.28,0.32],"q":[0.4,0.65]},"budget":5,"baseSeed":1}"#,
        // t = 1/2 is fully proven
        r#"{"schemaVersion":1,"target":"ahGapNaturalT","box":{"t":[0.4,0.6],"q":[0.9,0.95]},"budget":5,"baseSeed":1}"#,
        // k above 1/2 belongs to the counterexample regime
        r#"{"schemaVersion":1,"target":"tildeGapSmallK","box":{"k":[0.9,0.95],"q":[0.6,0.9]},"budget":5,"baseSeed":1}"#,
        r#"{"schemaVersion":1,"target":"tildeGapSmallK","box":{"k":[0.1,0.4],"q":[0.7,0.9]},"budget":5,"baseSeed":1}"#,
        r#"{"schemaVersion":1,"target":"twoVarAh","box":{"t":[0.3,0.6],"r":[0.5,1.5],"s":[0.2,1.0]},"budget":5,"baseSeed":1}"#,
        r#"{"schemaVersion":1,"target":"orderNaturalVsTilde","box":{"t":[0.5,0.9],"n":[1,3]},"budget":5,"baseSeed":1}"#,
        r#"{"schemaVersion":2,"target":"orderNaturalVsTilde","box":{"t":[0.5,0.9]},"budget":5,"baseSeed":1}"#,
    ];
    for json in bad {
        let c = campaign(json);
        assert!(matches!(c.validate(), Err(Error::Campaign(_))), "{json}");
    }
    let unknown = r#"{"schemaVersion":1,"target":"twoVarAh","box":{"t":[0.3,0.6],"z":[0,1]},"budget":5,"baseSeed":1}"#;
    assert!(serde_json::from_str::<Campaign>(unknown).is_err());
}

#[test]
fn small_k_tilde_box_runs() {
    let c = campaign(
        r#"{"schemaVersion":1,"target":"tildeGapSmallK","box":{"k":[0.1,0.3],"q":[0.6,0.95]},"budget":200,"baseSeed":3}"#,
    );
    let r = run_campaign(&c).unwrap();
    assert!(r.completed);
    assert_eq!(r.trials_run, 200);
}

#[test]
fn campaigns_are_deterministic_across_workers() {
    for c in [ah_gap(150), order(80)] {
        let a = serde_json::to_string(&run_campaign(&c).unwrap()).unwrap();
        let b = serde_json::to_string(&run_campaign_with_jobs(&c, Some(1)).unwrap()).unwrap();
        let again = serde_json::to_string(&run_campaign(&c).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, again);
    }
}

#[test]
fn accounting_and_histogram() {
    let r = run_campaign(&ah_gap(300)).unwrap();
    assert!(r.completed && r.aborted.is_none());
    assert_eq!(r.trials_run, 300);
    assert_eq!(r.histogram.iter().map(|b| b.count).sum::<usize>(), 300);
    assert_eq!(r.strategies.values().sum::<usize>(), 300);
    assert_eq!(r.closest.as_ref().unwrap().margin, r.best_margin);
    assert!(!r.found_violation());
    assert!(r.summary().contains("no violation found"));
}

#[test]
fn order_violations_reverify() {
    let c = order(120);
    let r = run_campaign(&c).unwrap();
    let counts = r.order.clone().unwrap();
    let total = counts.natural_below_tilde + counts.natural_above_tilde + counts.equal + counts.incomparable;
    assert_eq!(total, 120);
    assert!(r.found_violation());
    assert!(r.violations.iter().all(|v| v.margin >= r.best_margin));
    for v in &r.violations {
        let m = reverify(c.target.objective(), v).unwrap();
        assert!(m.margin < -VIOLATION_FACTOR * c.tol);
        assert_eq!(m.margin.to_bits(), v.margin.to_bits());
    }
}

#[test]
fn result_is_persisted() {
    let dir = std::env::temp_dir().join(format!("mml-search-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut c = ah_gap(40);
    c.output_path = Some(dir.join("result.json"));
    let r = run_campaign(&c).unwrap();
    let text = std::fs::read_to_string(dir.join("result.json")).unwrap();
    let back: CampaignResult = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
    assert!(text.contains("\"schemaVersion\": 1"));
    c.output_path = Some(dir.join("missing").join("result.json"));
    assert!(matches!(run_campaign(&c), Err(Error::Io(_))));
    std::fs::remove_dir_all(&dir).unwrap();
}

fn pinned_tilde_witness() -> ViolationRecord {
    let a = FamilyPoint::new(1.0, 100.0).unwrap().matrix::<f64>().unwrap();
    let b: PsdMatrix<f64> = projection();
    let params: BTreeMap<String, f64> = [("k".to_string(), 0.95), ("q".to_string(), 0.05)].into();
    let inputs = [
        ("A".to_string(), MatrixJson::from_matrix(a.matrix())),
        ("B".to_string(), MatrixJson::from_matrix(b.matrix())),
    ]
    .into();
    let mut v = ViolationRecord { seed: 0, trial: 0, n: 2, inputs, params, lhs: 0.0, rhs: 0.0, margin: 0.0 };
    let m = reverify(Objective::AhTilde, &v).unwrap();
    (v.lhs, v.rhs, v.margin) = (m.lhs, m.rhs, m.margin);
    v
}

#[test]
fn refining_the_tilde_witness_never_worsens_it() {
    let v = pinned_tilde_witness();
    assert!(v.margin < -1e-3, "{}", v.margin);
    let refined = refine_witness(Objective::AhTilde, None, &v, 25).unwrap();
    assert!(refined.margin <= v.margin);
    let again = reverify(Objective::AhTilde, &refined).unwrap();
    assert_eq!(again.margin.to_bits(), refined.margin.to_bits());
}

#[test]
fn zero_steps_is_identity() {
    let v = pinned_tilde_witness();
    assert_eq!(refine_witness(Objective::AhTilde, None, &v, 0).unwrap(), v);
}

#[test]
fn refinement_stays_in_the_box() {
    let c = ah_gap(50);
    let r = run_campaign(&c).unwrap();
    let closest = r.closest.unwrap();
    let refined = refine_witness(c.target.objective(), Some(&c.param_box), &closest, 15).unwrap();
    assert!(refined.margin <= closest.margin);
    for name in ["t", "q"] {
        let [lo, hi] = c.param_box.range(name).unwrap();
        assert!((lo..=hi).contains(&refined.params[name]), "{name}");
    }
    let c = order(20);
    let r = run_campaign(&c).unwrap();
    let refined = refine_witness(c.target.objective(), Some(&c.param_box), r.closest.as_ref().unwrap(), 10).unwrap();
    assert_eq!(refined.params["k"], refined.params["t"]);
}

#[test]
fn histogram_bins_cover_the_line() {
    let h = histogram(&[f64::NEG_INFINITY, -1.0, -1e-7, -1e-10, 0.0, 1e-8, 2.0]);
    let counts: Vec<usize> = h.iter().map(|b| b.count).collect();
    assert_eq!(counts, [2, 0, 1, 1, 1, 1, 0, 1]);
}
