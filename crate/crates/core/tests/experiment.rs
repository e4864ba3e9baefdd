mod common;

use satchain_core::experiment::*;
use satchain_core::heuristics::Algorithm;
use satchain_core::model::Placement;
use satchain_core::{Decision, GenerationConfig, Scenario, ServiceChain, SolveLimits, Terminal};

fn small_spec(parameter: SweepParameter, values: Vec<f64>, algorithms: Vec<Algorithm>) -> SweepSpec {
    SweepSpec {
        parameter,
        values,
        scenarios: 6,
        algorithms,
        base: GenerationConfig { n_terminals: 4, ..Default::default() },
        master_seed: 11,
        timing_repeats: 1,
        ..Default::default()
    }
}

/// Two terminals on a four-satellite ring sharing a two-NF chain.
fn doc_instance() -> Scenario {
    let cfg = GenerationConfig { n_satellites: 4, link_offsets: vec![1], chain_length: 2, n_nfs: 3, ..Default::default() };
    Scenario::from_parts(
        &cfg,
        vec![ServiceChain::new(vec![0, 2])],
        vec![Terminal::new(0, 0, vec![8.0e7, 4.0e7]), Terminal::new(2, 0, vec![6.0e7, 2.0e7])],
    )
    .unwrap()
}

#[test]
fn dco_only_sweep_is_exactly_one() {
    let spec = small_spec(SweepParameter::UplinkRate, vec![50.0e6, 200.0e6, 350.0e6], vec![Algorithm::Dco]);
    let table = run_sweep_with(&spec, 1).unwrap();
    assert_eq!(table.rows.len(), 3);
    for r in &table.rows {
        assert!((r.mean.unwrap() - 1.0).abs() <= 1e-12, "{r:?}");
        assert_eq!(r.count, 6);
        assert_eq!(r.failures, 0);
    }
    assert!(table.invariant_violations().is_empty());
}

#[test]
fn single_worker_csv_is_byte_identical() {
    let spec = small_spec(SweepParameter::NfAllocation, vec![1.0e9, 2.0e9], Algorithm::ALL.to_vec());
    let csv = |workers| {
        let mut buf = Vec::new();
        write_results_csv(&run_sweep_with(&spec, workers).unwrap(), &mut buf).unwrap();
        buf
    };
    let a = csv(1);
    assert_eq!(a, csv(1));
    // Aggregation happens in replicate order, so more workers change nothing.
    assert_eq!(a, csv(3));
}

#[test]
fn exact_never_loses_per_scenario() {
    let spec = small_spec(SweepParameter::NTerminals, vec![5.0, 8.0], Algorithm::ALL.to_vec());
    let table = run_sweep_with(&spec, 1).unwrap();
    assert!(table.invariant_violations().is_empty(), "{:?}", table.invariant_violations());
    for chunk in table.samples.chunks(4) {
        let cost = |a: Algorithm| chunk.iter().find(|s| s.algorithm == a).unwrap().cost.unwrap();
        let ilp = cost(Algorithm::Ilp);
        assert!(ilp <= 1.0 + 1e-9);
        for a in [Algorithm::Gco, Algorithm::Nfco, Algorithm::Dco] {
            assert!(ilp <= cost(a) + 1e-12, "{a}: {ilp} > {}", cost(a));
        }
    }
}

#[test]
fn results_csv_round_trips() {
    let spec = small_spec(SweepParameter::LeoCapacity, vec![2.0e9, 10.0e9], Algorithm::ALL.to_vec());
    let table = run_sweep_with(&spec, 1).unwrap();
    let mut buf = Vec::new();
    write_results_csv(&table, &mut buf).unwrap();
    assert_eq!(load_results_csv(buf.as_slice()).unwrap(), cost_rows(&table));
}

#[test]
fn emitted_files_have_expected_shape() {
    let spec = small_spec(SweepParameter::NTerminals, vec![5.0, 6.0, 7.0], vec![Algorithm::Ilp, Algorithm::Gco, Algorithm::Dco]);
    let table = run_sweep_with(&spec, 1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = emit_results(&table, dir.path()).unwrap();
    assert_eq!(files.len(), 6);

    let figure = std::fs::read_to_string(dir.path().join("cost_vs_n_terminals.csv")).unwrap();
    assert_eq!(figure.lines().count(), 1 + 3 * 3);
    assert!(figure.starts_with("terminals,algorithm,mean,std"));

    let runtime = std::fs::read_to_string(dir.path().join("runtime.csv")).unwrap();
    let mut rd = csv::Reader::from_reader(runtime.as_bytes());
    let col = rd.headers().unwrap().iter().position(|h| h == "mean_time_ms").unwrap();
    for rec in rd.records() {
        let field = rec.unwrap()[col].to_string();
        let digits: String = field.chars().filter(char::is_ascii_digit).collect();
        let significant = digits.trim_start_matches('0').len();
        assert!(significant >= 3, "{field}");
        assert!(field.parse::<f64>().unwrap() > 0.0);
    }

    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("results.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 9);
    assert_eq!(json["metadata"]["spec"]["parameter"], "n_terminals");
    assert_eq!(json["metadata"]["workers"], 1);
    let samples = std::fs::read_to_string(dir.path().join("samples.csv")).unwrap();
    assert_eq!(samples.lines().count(), 1 + 3 * 6 * 3);
}

#[test]
fn limit_hits_fail_or_count_as_budgeted() {
    let mut spec = small_spec(SweepParameter::NTerminals, vec![10.0], vec![Algorithm::Ilp, Algorithm::Gco]);
    spec.exact.node_limit = 1;
    let failing = run_sweep_with(&spec, 1).unwrap();
    let ilp = failing.row(10.0, Algorithm::Ilp).unwrap();
    assert_eq!(ilp.count + ilp.failures, 6);
    assert!(ilp.failures > 0);
    if ilp.count == 0 {
        assert_eq!(ilp.mean, None);
    }
    assert!(failing.metadata.notes.iter().any(|n| n.contains("excluded")));

    spec.exact.on_limit = LimitPolicy::Incumbent;
    let kept = run_sweep_with(&spec, 1).unwrap();
    let ilp2 = kept.row(10.0, Algorithm::Ilp).unwrap();
    assert_eq!((ilp2.count, ilp2.failures, ilp2.budgeted), (6, 0, ilp.failures));
    assert!(ilp2.mean.unwrap() <= kept.row(10.0, Algorithm::Gco).unwrap().mean.unwrap() + 1e-12);
    assert!(kept.metadata.notes.iter().any(|n| n.contains("node limit")));
}

#[test]
fn oversized_points_skip_the_exact_solver() {
    let mut spec = small_spec(SweepParameter::NTerminals, vec![5.0, 7.0], vec![Algorithm::Ilp, Algorithm::Gco]);
    spec.exact.max_terminals = Some(6);
    let table = run_sweep_with(&spec, 1).unwrap();
    assert_eq!(table.row(5.0, Algorithm::Ilp).unwrap().count, 6);
    let skipped = table.row(7.0, Algorithm::Ilp).unwrap();
    assert_eq!((skipped.count, skipped.skipped, skipped.mean), (0, 6, None));
    assert_eq!(table.row(7.0, Algorithm::Gco).unwrap().count, 6);
    assert_eq!(table.metadata.notes.len(), 1);
}

#[test]
fn invalid_specs_are_rejected() {
    let base = small_spec(SweepParameter::NTerminals, vec![5.0], vec![Algorithm::Gco]);
    for spec in [
        SweepSpec { values: vec![], ..base.clone() },
        SweepSpec { scenarios: 0, ..base.clone() },
        SweepSpec { algorithms: vec![], ..base.clone() },
        SweepSpec { values: vec![4.5], allow_out_of_range: true, ..base.clone() },
        SweepSpec { values: vec![40.0], ..base.clone() },
        SweepSpec { algorithms: vec![Algorithm::Gco, Algorithm::Gco], ..base.clone() },
        SweepSpec { parameter: SweepParameter::NfAllocation, values: vec![3.0e9], base: GenerationConfig { sat_compute: 2.0e9, ..Default::default() }, ..base.clone() },
    ] {
        assert!(run_sweep_with(&spec, 1).is_err(), "{spec:?}");
    }
    assert!(SweepSpec::from_json(r#"{"parameter": "n_terminals", "bogus": 1}"#).is_err());
    let parsed = SweepSpec::from_json(r#"{"parameter": "leo_capacity", "values": [2e9, 2.2e10], "scenarios": 3}"#).unwrap();
    assert_eq!((parsed.parameter, parsed.scenarios, parsed.values.len()), (SweepParameter::LeoCapacity, 3, 2));
}

#[test]
fn compare_reports_gco_not_above_dco() {
    let sc = doc_instance();
    let cmp = compare_single(&sc, &[Contender::Algorithm(Algorithm::Dco), Contender::Algorithm(Algorithm::Gco)], &SolveLimits::default()).unwrap();
    let total = |label: &str| cmp.column(label).unwrap().breakdown.as_ref().unwrap().normalized_total;
    assert!((total("dco") - 2.0).abs() < 1e-12);
    assert!(total("gco") <= total("dco"));
    let text = cmp.to_string();
    assert!(text.contains("d gco"));
    assert!(text.contains("decision differences against dco"));
}

#[test]
fn repeated_algorithm_gives_identical_columns() {
    let sc = doc_instance();
    let cmp = compare_single(&sc, &[Contender::Algorithm(Algorithm::Gco), Contender::Algorithm(Algorithm::Gco)], &SolveLimits::default()).unwrap();
    let (a, b) = (&cmp.columns[0], &cmp.columns[1]);
    assert_eq!(a.decision, b.decision);
    assert_eq!(a.breakdown, b.breakdown);
    assert!(cmp.to_string().contains("gco: cache same"));
}

#[test]
fn infeasible_decision_lists_violations() {
    let sc = doc_instance();
    let mut bad = Decision::from_placements(&sc, &[Placement::new(vec![Some(0), Some(1)]), Placement::data_center(2)]);
    bad.set_x(2, 1, false);
    let cmp = compare_single(
        &sc,
        &[Contender::Algorithm(Algorithm::Dco), Contender::Decision { label: "hand".into(), decision: bad }],
        &SolveLimits::default(),
    )
    .unwrap();
    let hand = cmp.column("hand").unwrap();
    assert!(hand.feasibility.violated("C3"));
    assert!(cmp.to_string().contains("C3 terminal 0: NF 2 served by satellite 1"));
}
