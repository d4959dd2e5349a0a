use std::fs;

use divscore::abcd::AbcdParams;
use divscore::embed::{EmbedAlgo, SgnsParams, WalkParams};
use divscore::sweep::{mean_std, run_sweep, SweepParam, SweepRow, SweepSpec};

fn small_spec() -> SweepSpec {
    SweepSpec {
        param: SweepParam::Xi,
        values: vec![0.2, 0.6],
        graphs_per_value: 2,
        embeddings_per_graph: 2,
        algorithms: vec![
            EmbedAlgo::Random { dim: 8 },
            EmbedAlgo::Node2Vec {
                walks: WalkParams {
                    num_walks: 2,
                    walk_length: 20,
                    ..Default::default()
                },
                sgns: SgnsParams {
                    epochs: 1,
                    ..Default::default()
                },
            },
        ],
        dims: vec![4, 8],
        base: AbcdParams::default().with_n(150),
        seed: 11,
        ..Default::default()
    }
}

#[test]
fn single_job_sweep_yields_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SweepSpec {
        values: vec![0.3],
        graphs_per_value: 1,
        embeddings_per_graph: 1,
        algorithms: vec![EmbedAlgo::Random { dim: 4 }],
        dims: vec![4],
        base: AbcdParams::default().with_n(120),
        ..Default::default()
    };
    let out = run_sweep(&spec, dir.path(), 1).unwrap();
    assert_eq!(out.rows.len(), 1);
    assert_eq!(out.computed, 1);
    assert!(out.rows[0].divergence.is_finite());
    let results = fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 2);
}

#[test]
fn replay_is_byte_identical_and_resume_recomputes_only_missing_rows() {
    let spec = small_spec();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = run_sweep(&spec, a.path(), 1).unwrap();
    assert_eq!(first.rows.len(), 2 * 2 * 2 * 2 * 2);
    // different worker count, same bytes
    run_sweep(&spec, b.path(), 3).unwrap();
    let files = ["results.csv", "aggregates.csv", "per_graph.csv", "variance.csv", "heatmap_mean_0.csv", "heatmap_std_1.csv"];
    for f in files {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }

    // rerun with a complete ledger computes nothing
    let again = run_sweep(&spec, a.path(), 1).unwrap();
    assert_eq!(again.computed, 0);
    assert_eq!(again.rows, first.rows);

    // drop the last five rows and tear the one before them
    let ledger = a.path().join("ledger.csv");
    let text = fs::read_to_string(&ledger).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let keep = lines.len() - 6;
    let torn = &lines[keep][..lines[keep].len() / 2];
    fs::write(&ledger, format!("{}\n{torn}", lines[..keep].join("\n"))).unwrap();
    let resumed = run_sweep(&spec, a.path(), 2).unwrap();
    assert_eq!(resumed.computed, 6);
    for f in files {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    // the ledger is readable again in full
    let rows = fs::read_to_string(&ledger)
        .unwrap()
        .lines()
        .skip(1)
        .filter(|l| SweepRow::from_csv(l).is_ok())
        .count();
    assert_eq!(rows, first.rows.len());
}

#[test]
fn changed_spec_in_same_directory_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = SweepSpec {
        values: vec![0.3],
        graphs_per_value: 1,
        embeddings_per_graph: 1,
        algorithms: vec![EmbedAlgo::Random { dim: 4 }],
        dims: vec![4],
        base: AbcdParams::default().with_n(120),
        ..Default::default()
    };
    run_sweep(&spec, dir.path(), 1).unwrap();
    spec.seed += 1;
    assert!(run_sweep(&spec, dir.path(), 1).is_err());
}

#[test]
fn aggregates_recompute_from_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_sweep(&small_spec(), dir.path(), 1).unwrap();
    for agg in &out.aggregates {
        let xs: Vec<f64> = out
            .rows
            .iter()
            .filter(|r| r.value == agg.value && r.algo == agg.algo && r.dim == agg.dim)
            .map(|r| r.divergence)
            .collect();
        assert_eq!(xs.len(), agg.count);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((agg.mean - mean).abs() < 1e-12);
        assert!((agg.std - var.sqrt()).abs() < 1e-12);
    }
    assert_eq!(out.aggregates.len(), 2 * 2 * 2);
    assert_eq!(out.per_graph.len(), 2 * 2 * 2 * 2);
    let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
    assert!((m - 2.5).abs() < 1e-15 && (s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
}
