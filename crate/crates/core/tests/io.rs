use std::io::Cursor;

use hawkes_horizon::eval::ExperimentConfig;
use hawkes_horizon::io::{load_dataset, load_toml, save_dataset, DatasetReader};
use hawkes_horizon::sim::{simulate_batch, BatchConfig};
use hawkes_horizon::Error;

const HEADER: &str = r#"{"format":"hawkes-horizon-cascades","schema_version":1,"static_width":1}"#;

#[test]
fn plain_and_gzip_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cascades = simulate_batch(&BatchConfig { n_items: 30, seed: 2, ..BatchConfig::default() }).unwrap().cascades;
    for name in ["c.jsonl", "c.jsonl.gz"] {
        let path = dir.path().join(name);
        save_dataset(&path, &cascades).unwrap();
        let back = load_dataset(&path).unwrap();
        assert_eq!(back.cascades, cascades);
        assert_eq!(back.static_width, cascades[0].static_attrs.len());
    }
    let a = std::fs::read(dir.path().join("c.jsonl.gz")).unwrap();
    save_dataset(&dir.path().join("c.jsonl.gz"), &cascades).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("c.jsonl.gz")).unwrap());
}

#[test]
fn malformed_records_report_their_line() {
    let text = format!(
        "{HEADER}\n\n{}\n{}\n",
        r#"{"item_id":"a","created_at":0,"static_attrs":[1],"events":[[1,1],[2,1]],"truncated":false}"#,
        r#"{"item_id":"b","created_at":0,"static_attrs":[1],"events":[[3,1],[2,1]],"truncated":false}"#,
    );
    let mut reader = DatasetReader::new(Cursor::new(text)).unwrap();
    assert_eq!(reader.next_cascade().unwrap().unwrap().item_id, "a");
    match reader.next_cascade() {
        Err(Error::Malformed { line, .. }) => assert_eq!(line, 4),
        other => panic!("expected a malformed record, got {other:?}"),
    }
}

#[test]
fn attribute_width_must_match_header() {
    let text = format!("{HEADER}\n{}\n", r#"{"item_id":"a","created_at":0,"static_attrs":[],"events":[],"truncated":false}"#);
    let err = DatasetReader::new(Cursor::new(text)).unwrap().next_cascade().unwrap_err();
    assert!(matches!(err, Error::Malformed { line: 2, .. }), "{err}");
}

#[test]
fn unknown_schema_version_is_rejected() {
    let text = r#"{"format":"hawkes-horizon-cascades","schema_version":7,"static_width":0}"#;
    assert!(DatasetReader::new(Cursor::new(text)).is_err());
}

#[test]
fn empty_input_has_no_records() {
    let mut reader = DatasetReader::new(Cursor::new("")).unwrap();
    assert!(reader.header().is_none());
    assert!(reader.next_cascade().unwrap().is_none());
}

#[test]
fn experiment_config_from_toml() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.toml");
    std::fs::write(&path, "seed = 42\ntest_every = 4\nmodels = [\"hwk\", \"seismic\"]\n").unwrap();
    let c: ExperimentConfig = load_toml(&path).unwrap();
    assert_eq!((c.seed, c.test_every, c.models.len()), (42, 4, 2));
    std::fs::write(&path, "no_such_key = 1\n").unwrap();
    assert!(matches!(load_toml::<ExperimentConfig>(&path), Err(Error::Config(_))));
}
