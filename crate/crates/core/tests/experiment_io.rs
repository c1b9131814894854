use std::fs::File;
use std::io::BufReader;

use splitgrow::experiment::{
    compare, write_census_files, write_report, Engine, ExperimentConfig, ModelSpec, ReplicaCensus,
};
use splitgrow::growth::read_census_bin;

fn small(model: ModelSpec) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(model);
    cfg.t_final = 2_000;
    cfg.replicas = 4;
    cfg.thin = 500;
    cfg.seed = 9;
    cfg
}

#[test]
fn census_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(ModelSpec::Preferential { a: 1.0, b: 0.0 });
    let (report, sim) = compare(&cfg).unwrap();
    write_census_files(dir.path(), &sim).unwrap();
    write_report(dir.path(), &report).unwrap();

    let mut r = BufReader::new(File::open(dir.path().join("census.bin")).unwrap());
    let mut records = Vec::new();
    while let Some(rec) = read_census_bin(&mut r).unwrap() {
        records.push(rec);
    }
    let expected: Vec<(u64, Vec<u64>)> = sim
        .replicas
        .iter()
        .flat_map(|rep| match rep {
            ReplicaCensus::One(snaps) => snaps.iter().map(|s| (s.t, s.counts.clone())).collect::<Vec<_>>(),
            ReplicaCensus::Two(_) => unreachable!(),
        })
        .collect();
    assert_eq!(records, expected);

    let csv = std::fs::read_to_string(dir.path().join("census.csv")).unwrap();
    assert!(csv.starts_with("replica,t,k,n\n"));
    let report_csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(report_csv.starts_with("quantity,k,analytic,method,empirical,stderr,z"));
    assert!(report_csv.contains("identity_violations"));
}

#[test]
fn simulation_is_reproducible_and_engine_independent_in_law() {
    let cfg = small(ModelSpec::Uniform { x: Some(0.0), a: None, b: None });
    let (_, a) = compare(&cfg).unwrap();
    let (_, b) = compare(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.identity_violations, 0);

    let mut urn = cfg.clone();
    urn.engine = Engine::Urn;
    let (report, sim) = compare(&urn).unwrap();
    assert_eq!(sim.identity_violations, 0);
    assert!(report.passed(), "{:?}", report.failures);
}

#[test]
fn digest_ignores_output_directory() {
    let mut a = small(ModelSpec::Preferential { a: 1.0, b: 0.0 });
    let d = a.digest();
    a.out = Some("elsewhere".into());
    assert_eq!(a.digest(), d);
    a.seed += 1;
    assert_ne!(a.digest(), d);
}
