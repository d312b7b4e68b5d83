use std::fs;

use orgsync_core::output::{figure_matrix, Manifest};
use orgsync_core::{reproduce_figures, run_matrix, Harness, ScenarioMatrix};

fn small_matrix(periods: u64, repetitions: usize) -> ScenarioMatrix {
    ScenarioMatrix::parse(&format!(
        "seed = 7\n[fixed]\nperiods = {periods}\nrepetitions = {repetitions}\n[matrix]\ntopologies = [\"star\", \"ring\"]\nregimes = [[3,0,0],[2,2,2]]"
    ))
    .unwrap()
}

#[test]
fn csv_has_header_and_one_row_per_period() {
    let dir = tempfile::tempdir().unwrap();
    let m = ScenarioMatrix::parse("[fixed]\nrepetitions = 3\n[matrix]\ntopologies = [\"line\"]").unwrap();
    let run = run_matrix(&m, &Harness::new(1).unwrap(), None, dir.path()).unwrap();
    assert!(run.failures.is_empty());
    let text = fs::read_to_string(dir.path().join("line_kcs300_w0.5-0.5_rho0.9.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 501);
    assert_eq!(lines[0], "period,mean_performance,se_performance,mean_synchrony,se_synchrony");
    assert!(lines[500].starts_with("500,"));
}

#[test]
fn reruns_are_byte_identical_across_worker_counts() {
    let m = small_matrix(80, 6);
    let mut outputs = Vec::new();
    for workers in [1, 4, 1] {
        let dir = tempfile::tempdir().unwrap();
        let run = run_matrix(&m, &Harness::new(workers).unwrap(), None, dir.path()).unwrap();
        let csvs: Vec<Vec<u8>> = run
            .files
            .iter()
            .filter(|p| p.extension().is_some_and(|e| e == "csv"))
            .map(|p| fs::read(p).unwrap())
            .collect();
        assert_eq!(csvs.len(), 4);
        outputs.push(csvs);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn manifest_round_trips_the_matrix() {
    let m = small_matrix(20, 2);
    let dir = tempfile::tempdir().unwrap();
    run_matrix(&m, &Harness::new(2).unwrap(), None, dir.path()).unwrap();
    let text = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert_eq!(ScenarioMatrix::from_manifest(&text).unwrap(), m);
    let manifest: Manifest = serde_json::from_str(&text).unwrap();
    assert_eq!(manifest.scenarios.len(), 4);
    assert_eq!(manifest.workers, 2);
    for s in &manifest.scenarios {
        assert_eq!(s.run_seeds.len(), 2);
        assert_eq!(s.config.seed, 7);
        assert!(s.terminal_performance_cv.is_some());
    }
}

#[test]
fn scenario_selector() {
    let m = small_matrix(10, 1);
    let dir = tempfile::tempdir().unwrap();
    let run = run_matrix(&m, &Harness::new(1).unwrap(), Some("ring_kcs222_w0.5-0.5_rho0.9"), dir.path()).unwrap();
    assert_eq!(run.results.len(), 1);
    assert!(run_matrix(&m, &Harness::new(1).unwrap(), Some("nope"), dir.path()).is_err());
}

#[test]
fn figure_outputs_have_one_column_per_topology() {
    let base = ScenarioMatrix::parse("[fixed]\nperiods = 30\nrepetitions = 2").unwrap();
    assert_eq!(figure_matrix(&base).expand().len(), 24);
    let dir = tempfile::tempdir().unwrap();
    let run = reproduce_figures(&base, &Harness::new(1).unwrap(), dir.path()).unwrap();
    assert!(run.failures.is_empty());
    for name in [
        "fig4_synchrony_full_conformity.csv",
        "fig5a_synchrony_moderate_internal.csv",
        "fig5b_synchrony_moderate_external.csv",
        "fig6a_performance_moderate_internal.csv",
        "fig6b_performance_moderate_external.csv",
        "baseline_synchrony_no_conformity_internal.csv",
        "baseline_synchrony_no_conformity_external.csv",
    ] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "period,star,ring,cycle,line");
        assert_eq!(lines.len(), 31);
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 5));
    }
}
