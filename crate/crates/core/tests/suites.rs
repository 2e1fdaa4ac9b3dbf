use valcalc::report::Status;
use valcalc::suite::*;

fn cfg(suite: Suite, n: &str, m_max: u32) -> SuiteConfig {
    SuiteConfig::new(suite, n.parse().unwrap(), m_max)
}

#[test]
fn ranges() {
    assert_eq!(
        "4".parse::<DimRange>().unwrap(),
        DimRange::new(4, 4).unwrap()
    );
    assert_eq!(
        "2..5".parse::<DimRange>().unwrap(),
        DimRange::new(2, 5).unwrap()
    );
    assert_eq!(
        "2..=5".parse::<DimRange>().unwrap(),
        DimRange::new(2, 5).unwrap()
    );
    for bad in ["1", "9", "5..3", "x", "2..", ""] {
        assert!(bad.parse::<DimRange>().is_err(), "{bad}");
    }
    assert_eq!(
        "hodge-riemann".parse::<Suite>().unwrap(),
        Suite::HodgeRiemann
    );
    assert!("hodge".parse::<Suite>().is_err());
}

#[test]
fn invalid_configs_are_rejected() {
    assert_eq!(
        run_suite(&cfg(Suite::Hwv, "3", 1)).unwrap_err(),
        ConfigError::MMax(1)
    );
    let mut c = cfg(Suite::Pairing, "3", 3);
    c.r = Some(3);
    assert!(matches!(run_suite(&c), Err(ConfigError::EmptyGrid { .. })));
    c.r = Some(1);
    c.k = Some(-1);
    assert!(matches!(run_suite(&c), Err(ConfigError::EmptyGrid { .. })));
}

#[test]
fn small_examples() {
    let hwv = run_suite(&cfg(Suite::Hwv, "2", 2)).unwrap();
    assert_eq!(hwv.items.len(), 1);
    assert_eq!(hwv.items[0].computed, "(2)");
    // (r, k, m) ∈ {1, 2} × {1} × {2, 3} for n = 3
    let pairing = run_suite(&cfg(Suite::Pairing, "3", 3)).unwrap();
    assert_eq!(pairing.items.len(), 4);
    assert!(pairing.all_passed());
    let all = run_suite(&cfg(Suite::All, "2..4", 2)).unwrap();
    assert_eq!(all.summary.fail, 0);
    assert!(all.summary.pass > 100);
}

#[test]
fn filters_restrict_the_grid() {
    let mut c = cfg(Suite::Rumin, "4..5", 3);
    c.r = Some(2);
    c.k = Some(1);
    let rep = run_suite(&c).unwrap();
    assert_eq!(rep.items.len(), 4);
    assert!(rep
        .items
        .iter()
        .all(|i| i.id.r == Some(2) && i.id.k == Some(1)));
}

#[test]
fn reports_are_sorted_and_independent_of_workers() {
    let mut a = cfg(Suite::All, "2..5", 3);
    a.jobs = Some(1);
    let mut b = a.clone();
    b.jobs = Some(3);
    let (mut ra, mut rb) = (run_suite(&a).unwrap(), run_suite(&b).unwrap());
    ra.elapsed_ms = 0;
    rb.elapsed_ms = 0;
    assert_eq!(to_json(&ra), to_json(&rb));
    assert!(ra.items.windows(2).all(|w| w[0].id <= w[1].id));
}

#[test]
fn csv_projection() {
    let rep = run_suite(&cfg(Suite::Lefschetz, "3", 2)).unwrap();
    let text = to_csv(&rep);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rows.headers().unwrap().iter().collect::<Vec<_>>(),
        ["n", "r", "k", "m", "suite", "check", "expected", "computed", "status"]
    );
    let rows: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), rep.items.len());
    assert!(rows.iter().all(|r| &r[8] == "pass"));
}

#[test]
fn json_schema() {
    let rep = run_suite(&cfg(Suite::Transfer, "4", 2)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&to_json(&rep)).unwrap();
    for key in ["command", "params", "items", "summary", "elapsed_ms"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let item = &v["items"][0];
    for key in ["id", "suite", "check", "expected", "computed", "status"] {
        assert!(item.get(key).is_some(), "{key}");
    }
    assert!(item["id"].get("m").is_some());
    assert_eq!(v["summary"]["fail"], 0);
    assert!(rep.items.iter().all(|i| i.status == Status::Pass));
}

#[test]
fn value_tables() {
    let rows = value_table(TableKind::Pairing, "2".parse().unwrap(), 2).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].1, "-3/8*pi");
    let rows = value_table(TableKind::Fourier, "2..3".parse().unwrap(), 3).unwrap();
    assert!(rows.iter().all(|(_, v)| !v.starts_with("FAILED")));
}

#[test]
fn human_table_has_summary() {
    let rep = run_suite(&cfg(Suite::Hwv, "3", 2)).unwrap();
    let text = human_table(&rep);
    assert!(text
        .lines()
        .last()
        .unwrap()
        .starts_with("2 passed, 0 failed"));
}
