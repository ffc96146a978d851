use std::f64::consts::PI;

use qdarwin::formats::*;
use qdarwin_core::darwinism::mi_curve;
use qdarwin_core::estimator::{correlator_table, plan_measurements, PlanTarget};
use qdarwin_core::graphstate::{build_graph_state, diamond_spec, named_state, NamedState};
use qdarwin_core::measurement::{sample_plan, RunConfig};
use qdarwin_core::state::QuantumState;

#[test]
fn graph_spec_round_trip() {
    let spec = diamond_spec(3, PI, PI / 2.0).unwrap();
    let back = graph_spec_from_json(&graph_spec_to_json(&spec)).unwrap();
    assert_eq!(back, spec);
}

#[test]
fn graph_spec_rejects_invalid_graphs() {
    for text in [
        r#"{"n_qubits": 3, "system": 0, "edges": [[0, 0, 1.0]]}"#,
        r#"{"n_qubits": 3, "system": 0, "edges": [[0, 1, 1.0], [1, 0, 2.0]]}"#,
        r#"{"n_qubits": 3, "system": 5, "edges": []}"#,
        r#"{"n_qubits": 3, "system": 0, "edges": [[0, 7, 1.0]]}"#,
        r#"{"n_qubits": 3, "edges": []}"#,
    ] {
        assert!(graph_spec_from_json(text).is_err(), "{text}");
    }
}

#[test]
fn state_dump_round_trip() {
    let psi = named_state(NamedState::DiamondCanonical).unwrap();
    let text = state_to_json(&psi, 0);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["amplitudes"][1], serde_json::json!([-0.5, 0.0]));
    let (back, system) = state_from_json(&text).unwrap();
    assert_eq!(back, psi);
    assert_eq!(system, 0);
}

#[test]
fn correlator_table_round_trip() {
    let psi = named_state(NamedState::StarExperimental).unwrap();
    let table = correlator_table(&psi, &plan_measurements(PlanTarget::Star).correlators).unwrap();
    let text = correlator_table_to_json(&table);
    assert!(text.contains("\"string\": \"ZIZI\""));
    assert_eq!(correlator_table_from_json(&text).unwrap(), table);
}

#[test]
fn counts_round_trip_and_validation() {
    let psi = named_state(NamedState::StarExperimental).unwrap();
    let cfg = RunConfig { shots_per_setting: 300, seed: 4, ..RunConfig::default() };
    let data = sample_plan(&psi, &plan_measurements(PlanTarget::Star), &cfg).unwrap();
    let text = counts_to_json(&data);
    assert_eq!(counts_from_json(&text).unwrap(), data);

    let sparse = r#"[{"setting": "ZZZZ", "shots": 10, "counts": {"0101": 6, "1010": 4}}]"#;
    let parsed = counts_from_json(sparse).unwrap();
    assert_eq!(parsed[0].counts()[0b0101], 6);
    assert_eq!(parsed[0].counts()[0b1010], 4);

    for bad in [
        r#"[{"setting": "ZZZZ", "shots": 11, "counts": {"0101": 6, "1010": 4}}]"#,
        r#"[{"setting": "ZZZZ", "shots": 10, "counts": {"010": 10}}]"#,
        r#"[{"setting": "ZZZZ", "shots": 10, "counts": {"01a1": 10}}]"#,
        r#"[{"setting": "ZIZZ", "shots": 10, "counts": {"0101": 10}}]"#,
        r#"[{"setting": "ZQZZ", "shots": 10, "counts": {"0101": 10}}]"#,
    ] {
        assert!(counts_from_json(bad).is_err(), "{bad}");
    }
}

#[test]
fn plan_json_fields() {
    let value: serde_json::Value = serde_json::from_str(&plan_to_json(&plan_measurements(PlanTarget::FullTomography))).unwrap();
    assert_eq!(value["counts"]["n_correlators"], 255);
    assert_eq!(value["counts"]["n_settings"], 81);
    assert_eq!(value["counts"]["n_projectors"], 1296);
    assert_eq!(value["settings"].as_array().unwrap().len(), 81);
}

#[test]
fn curve_csv_and_json() {
    let psi = build_graph_state(&diamond_spec(3, PI, PI).unwrap()).unwrap();
    let curve = mi_curve(&psi, 0).unwrap();
    let csv = curve_to_csv(&curve);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CURVE_CSV_HEADER);
    assert_eq!(lines.len(), psi.n_qubits());
    assert!(lines[1].starts_with("1,0.333333333333,"));
    assert!(lines[1].ends_with(",3,"));
    assert!(lines[3].starts_with("3,2,2,2,1,"));
    let back = curve_from_json(&curve_to_json(&curve)).unwrap();
    assert_eq!(back, curve);
}
