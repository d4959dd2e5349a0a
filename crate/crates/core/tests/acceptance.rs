//! Acceptance criteria, one test each. Every test writes a single
//! `criterion N: PASS|FAIL ...` line to stderr (uncaptured) before asserting.

mod common;

use std::io::Write as _;
use std::time::Instant;

use common::{
    ami_from_table, best_partition, brute_auc, labels_from_table, naive_modularity, naive_probabilities,
    two_k5_bridge,
};
use divscore::abcd::{generate_abcd, mixing_fraction, AbcdParams};
use divscore::clustering::{louvain, Clusterer, WeightedGraph};
use divscore::embed::{random_embedding, EmbedAlgo, Embedding, SgnsParams, WalkParams};
use divscore::eval::{
    ami, auc, kmeans, knn_classify, link_prediction_split, pearson, score_link_prediction, variance_decomposition,
};
use divscore::gcl::{fit_gcl, js_divergence, DivergenceScorer, GclFitter};
use divscore::seed::{derive_seed, rng_from_seed};
use divscore::sweep::{run_sweep, SweepSpec};
use divscore::{Graph, Partition};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn report(criterion: usize, pass: bool, started: Instant, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let secs = started.elapsed().as_secs_f64();
    // bypass the test harness capture so the line always shows
    let _ = writeln!(std::io::stderr(), "criterion {criterion}: {verdict} ({secs:.0}s) {detail}");
}

fn embed64(algo: &EmbedAlgo, g: &Graph, seed: u64) -> Embedding<f64> {
    algo.embed::<f32>(g, seed).unwrap().cast::<f64>()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[test]
fn criterion_1_divergence_pipeline() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = Vec::new();

    let ln2 = std::f64::consts::LN_2;
    for _ in 0..2000 {
        let len = rng.random_range(1..20);
        let p: Vec<f64> = (0..len).map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random() }).collect();
        let q: Vec<f64> = (0..len).map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random() }).collect();
        if p.iter().sum::<f64>() == 0.0 || q.iter().sum::<f64>() == 0.0 {
            continue;
        }
        let pq = js_divergence(&p, &q).unwrap();
        let qp = js_divergence(&q, &p).unwrap();
        let pp = js_divergence(&p, &p).unwrap();
        let (sp, sq) = (p.iter().sum::<f64>(), q.iter().sum::<f64>());
        let equal = p.iter().zip(&q).all(|(a, b)| (a / sp - b / sq).abs() < 1e-15);
        if !(pq >= 0.0 && pq <= ln2 && (pq - qp).abs() < 1e-15 && pp == 0.0 && (equal || pq > 0.0)) {
            failures.push(format!("jsd axioms on {p:?} {q:?}"));
            break;
        }
    }

    for instance in 0..20 {
        let n = rng.random_range(20..=500);
        let alpha = rng.random_range(0.0..4.0);
        let degrees: Vec<f64> = (0..n).map(|_| rng.random_range(1..=10) as f64).collect();
        let emb = random_embedding::<f64>(n, rng.random_range(1..=6), instance).unwrap();
        let model = fit_gcl(&degrees, &emb, alpha).unwrap();
        let p = naive_probabilities(&emb, &model.x, alpha);
        let worst = p
            .iter()
            .enumerate()
            .map(|(u, row)| (row.iter().sum::<f64>() - degrees[u]).abs() / degrees[u])
            .fold(0.0, f64::max);
        if worst > 1e-6 {
            failures.push(format!("fit residual {worst:e} on instance {instance}"));
        }
    }

    for instance in 0..5 {
        let n = rng.random_range(30..=300);
        let ell = rng.random_range(1..=6);
        let labels: Vec<usize> = (0..n).map(|v| if v < ell { v } else { rng.random_range(0..ell) }).collect();
        let part = Partition::new(labels.clone()).unwrap();
        let emb = random_embedding::<f64>(n, 3, 100 + instance).unwrap();
        let degrees: Vec<f64> = (0..n).map(|_| rng.random_range(1..=8) as f64).collect();
        let alpha = rng.random_range(0.0..5.0);
        let mut fitter = GclFitter::new(&emb).unwrap();
        let model = fitter.fit(&degrees, alpha, None).unwrap();
        let mv = fitter.model_vectors(&model, &part).unwrap();
        let probs = naive_probabilities(&emb, &model.x, alpha);
        let mut block = vec![vec![0.0; ell]; ell];
        let mut total = 0.0;
        for u in 0..n {
            for v in u + 1..n {
                block[labels[u].min(labels[v])][labels[u].max(labels[v])] += probs[u][v];
                total += probs[u][v];
            }
        }
        let mut k = 0;
        for i in 0..ell {
            if (mv.intra[i] - block[i][i] / total).abs() > 1e-12 {
                failures.push(format!("model intra[{i}] on instance {instance}"));
            }
            for j in i + 1..ell {
                if (mv.inter[k] - block[i][j] / total).abs() > 1e-12 {
                    failures.push(format!("model inter[{k}] on instance {instance}"));
                }
                k += 1;
            }
        }
    }

    let g = generate_abcd(&AbcdParams::default().with_n(300).with_seed(4)).unwrap().graph;
    let e = random_embedding::<f64>(300, 3, 9).unwrap();
    let scorer = DivergenceScorer::<f64>::from_clusterer(&g, &Clusterer::default(), 1).unwrap();
    let base = scorer.score(&e, "base").unwrap().score;
    let scaled = scorer.score(&e.scaled(37.5), "scaled").unwrap().score;
    let m = DMatrix::<f64>::from_fn(3, 3, |_, _| rng.sample(StandardNormal));
    let q = m.qr().q();
    let a: Vec<f64> = (0..9).map(|i| q[(i / 3, i % 3)]).collect();
    let rotated = scorer.score(&e.affine(&a, 3, &[4.0, -2.0, 0.5]).unwrap(), "rotated").unwrap().score;
    let drift = (base - scaled).abs().max((base - rotated).abs());
    if drift >= 1e-9 {
        failures.push(format!("invariance drift {drift:e}"));
    }

    let pass = failures.is_empty() && t.elapsed().as_secs() < 120;
    report(1, pass, t, &format!("invariance drift {drift:.1e}; {failures:?}"));
    assert!(pass);
}

#[test]
fn criterion_2_link_prediction_at_full_scale() {
    let t = Instant::now();
    let base = 2024;
    let g = generate_abcd(&AbcdParams::default().with_seed(base)).unwrap().graph;
    let seeds = 5;
    let algos = [EmbedAlgo::node2vec(4, 1.0, 1.0), EmbedAlgo::node2vec(128, 1.0, 1.0), EmbedAlgo::Random { dim: 128 }];
    let mut aucs = vec![Vec::new(); algos.len()];
    let mut divergences = vec![Vec::new(); algos.len()];
    for s in 0..seeds {
        let split = link_prediction_split(&g, 0.1, derive_seed(base, &[s])).unwrap();
        let scorer =
            DivergenceScorer::<f64>::from_clusterer(&split.train, &Clusterer::default(), derive_seed(base, &[s, 1]))
                .unwrap();
        for (i, algo) in algos.iter().enumerate() {
            let emb = embed64(algo, &split.train, derive_seed(base, &[s, 2, i as u64]));
            aucs[i].push(score_link_prediction(&emb, &split).unwrap().auc);
            // the d=4 run is only needed for its AUC
            if i > 0 {
                divergences[i].push(scorer.score(&emb, &algo.id()).unwrap().score);
            }
        }
    }
    let (a4, a128, ar) = (mean(&aucs[0]), mean(&aucs[1]), mean(&aucs[2]));
    let (dn, dr) = (mean(&divergences[1]), mean(&divergences[2]));
    let pass = (a4 - 0.82).abs() <= 0.08 && (a128 - 0.81).abs() <= 0.08 && (ar - 0.5).abs() <= 0.05 && dr >= 5.0 * dn;
    report(
        2,
        pass,
        t,
        &format!(
            "auc d4 {a4:.3} {:?}, d128 {a128:.3} {:?}, random {ar:.3}; divergence node2vec {dn:.2e} vs random {dr:.2e} ({:.1}x)",
            aucs[0].iter().map(|x| (x * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
            aucs[1].iter().map(|x| (x * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
            dr / dn
        ),
    );
    assert!(pass);
}

fn embedding_grid() -> Vec<EmbedAlgo> {
    let mut grid = Vec::new();
    for (p, q) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.5)] {
        for d in [4, 16, 64] {
            grid.push(EmbedAlgo::node2vec(d, p, q));
        }
    }
    // undertrained variants fill in the middle of the quality range
    for q in [1.0, 2.0] {
        for d in [4, 16, 64] {
            grid.push(EmbedAlgo::Node2Vec {
                walks: WalkParams {
                    q,
                    num_walks: 1,
                    walk_length: 10,
                    ..Default::default()
                },
                sgns: SgnsParams {
                    dim: d,
                    epochs: 1,
                    ..Default::default()
                },
            });
        }
    }
    for d in [2, 4, 8, 16, 32] {
        grid.push(EmbedAlgo::Hope { dim: d });
    }
    for d in [2, 4, 8, 32] {
        grid.push(EmbedAlgo::Random { dim: d });
    }
    grid
}

#[test]
fn criterion_3_divergence_tracks_task_quality() {
    let t = Instant::now();
    let base = 77;
    let abcd = generate_abcd(&AbcdParams::default().with_n(2000).with_seed(base)).unwrap();
    let g = &abcd.graph;
    let truth = &abcd.ground_truth;
    let grid = embedding_grid();
    assert!(grid.len() >= 24);

    let scorer = DivergenceScorer::<f64>::from_clusterer(g, &Clusterer::default(), derive_seed(base, &[1])).unwrap();
    let split = link_prediction_split(g, 0.1, derive_seed(base, &[2])).unwrap();
    let train_scorer =
        DivergenceScorer::<f64>::from_clusterer(&split.train, &Clusterer::default(), derive_seed(base, &[3])).unwrap();

    let (mut div, mut acc, mut amis) = (Vec::new(), Vec::new(), Vec::new());
    let (mut div_lp, mut aucs) = (Vec::new(), Vec::new());
    for (i, algo) in grid.iter().enumerate() {
        let es = derive_seed(base, &[4, i as u64]);
        let emb = embed64(algo, g, es);
        div.push(scorer.score(&emb, &algo.id()).unwrap().score);
        acc.push(knn_classify(&emb, truth.labels(), 0.75, 10, es).unwrap());
        amis.push(ami(&kmeans(&emb, truth.ell(), es).unwrap().partition, truth).unwrap());

        let emb = embed64(algo, &split.train, derive_seed(es, &[1]));
        div_lp.push(train_scorer.score(&emb, &algo.id()).unwrap().score);
        aucs.push(score_link_prediction(&emb, &split).unwrap().auc);
    }
    let r_acc = pearson(&div, &acc).unwrap();
    let r_ami = pearson(&div, &amis).unwrap();
    let r_auc = pearson(&div_lp, &aucs).unwrap();
    let pass = r_acc <= -0.4 && r_ami <= -0.4 && r_auc <= -0.4;
    report(
        3,
        pass,
        t,
        &format!("{} embeddings; pearson accuracy {r_acc:.3}, ami {r_ami:.3}, auc {r_auc:.3}", grid.len()),
    );
    assert!(pass);
}

#[test]
fn criterion_4_noise_sweep_shape() {
    let t = Instant::now();
    let spec = SweepSpec {
        seed: 5,
        ..SweepSpec::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let out = run_sweep(&spec, dir.path(), workers).unwrap();
    let means: Vec<f64> = spec
        .values
        .iter()
        .map(|&v| out.aggregates.iter().find(|a| a.value == v).unwrap().mean)
        .collect();
    let top = means.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    let at = |v: f64| means[spec.values.iter().position(|&x| (x - v).abs() < 1e-12).unwrap()];
    let pass = top > 0 && top + 1 < means.len() && at(1.0) < at(0.5);
    let shown: Vec<String> = spec.values.iter().zip(&means).map(|(v, m)| format!("{v}:{m:.2e}")).collect();
    report(4, pass, t, &format!("argmax xi={}; means {}", spec.values[top], shown.join(" ")));
    assert!(pass);
}

#[test]
fn criterion_5_abcd_laws() {
    let t = Instant::now();
    let mut notes = Vec::new();
    let mut pass = true;
    for (xi, seed) in [(0.2, 1), (0.2, 2), (0.5, 3), (1.0, 4)] {
        let a = generate_abcd(&AbcdParams::default().with_xi(xi).with_seed(seed)).unwrap();
        let total: f64 = a.degrees.iter().sum::<usize>() as f64;
        let mut vol = vec![0.0; a.ground_truth.ell()];
        for (v, &d) in a.degrees.iter().enumerate() {
            vol[a.ground_truth.label(v)] += d as f64;
        }
        let collide: f64 = vol.iter().map(|x| (x / total).powi(2)).sum();
        let expected = (1.0 - xi) + xi * collide;
        let internal = 1.0 - mixing_fraction(&a.graph, &a.ground_truth);
        let exact_degrees = a.graph.degree_sequence() == a.degrees;
        pass &= (internal - expected).abs() <= 0.02 && exact_degrees;
        notes.push(format!("xi={xi}: internal {internal:.4} vs {expected:.4}, degrees exact {exact_degrees}"));
    }
    let a = generate_abcd(&AbcdParams::default().with_xi(0.0).with_seed(9)).unwrap();
    let pure = a.realized_xi == 0.0 && mixing_fraction(&a.graph, &a.ground_truth) == 0.0;
    pass &= pure && a.graph.degree_sequence() == a.degrees;
    notes.push(format!("xi=0: realized {}", a.realized_xi));
    pass &= t.elapsed().as_secs() < 300;
    report(5, pass, t, &notes.join("; "));
    assert!(pass);
}

#[test]
fn criterion_6_oracle_equivalences() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();

    for _ in 0..500 {
        let pos: Vec<f64> = (0..rng.random_range(1..32)).map(|_| rng.random_range(0..12) as f64).collect();
        let neg: Vec<f64> = (0..rng.random_range(1..32)).map(|_| rng.random_range(0..12) as f64).collect();
        if (auc(&pos, &neg).unwrap() - brute_auc(&pos, &neg)).abs() > 1e-12 {
            failures.push("auc");
            break;
        }
    }

    let mut tables = vec![vec![vec![2, 1], vec![1, 2]]];
    while tables.len() < 200 {
        let (r, c) = (rng.random_range(2..=6), rng.random_range(2..=6));
        let tab: Vec<Vec<usize>> = (0..r).map(|_| (0..c).map(|_| rng.random_range(0..5)).collect()).collect();
        let empty_row = tab.iter().any(|row| row.iter().sum::<usize>() == 0);
        let empty_col = (0..c).any(|j| tab.iter().map(|row| row[j]).sum::<usize>() == 0);
        if !empty_row && !empty_col {
            tables.push(tab);
        }
    }
    for tab in &tables {
        let (a, b) = labels_from_table(tab);
        let got = ami(&Partition::canonical(&a), &Partition::canonical(&b)).unwrap();
        if (got - ami_from_table(tab)).abs() > 1e-9 {
            failures.push("ami");
            break;
        }
    }

    let g = two_k5_bridge();
    let (best, q, _) = best_partition(&g);
    let best = Partition::canonical(&best);
    for seed in 0..10 {
        let p = louvain(&WeightedGraph::unweighted(&g), &mut rng_from_seed(seed)).unwrap();
        if !p.same_grouping(&best) || (naive_modularity(&g, p.labels()) - q).abs() > 1e-12 {
            failures.push("louvain");
            break;
        }
    }

    let v = variance_decomposition(&[vec![1.0, 2.0], vec![3.0, 5.0]]).unwrap();
    if (v.r_e - 2.0 / 7.0).abs() > 1e-12 {
        failures.push("variance");
    }

    let pass = failures.is_empty() && t.elapsed().as_secs() < 60;
    report(6, pass, t, &format!("r_E {:.6}; failures {failures:?}", v.r_e));
    assert!(pass);
}

#[test]
fn criterion_7_sweep_replay() {
    let t = Instant::now();
    let spec = SweepSpec {
        values: vec![0.2, 0.5, 0.8],
        graphs_per_value: 2,
        embeddings_per_graph: 2,
        algorithms: vec![
            EmbedAlgo::Node2Vec {
                walks: WalkParams {
                    num_walks: 2,
                    walk_length: 40,
                    ..Default::default()
                },
                sgns: SgnsParams {
                    epochs: 1,
                    ..Default::default()
                },
            },
            EmbedAlgo::Hope { dim: 8 },
            EmbedAlgo::Random { dim: 8 },
        ],
        dims: vec![4, 8],
        base: AbcdParams::default().with_n(300),
        seed: 3,
        ..SweepSpec::default()
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_sweep(&spec, a.path(), 1).unwrap();
    run_sweep(&spec, b.path(), 4).unwrap();
    let mut differing = Vec::new();
    let mut compared = 0;
    for entry in std::fs::read_dir(a.path()).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        // wall-clock timings are the one intentionally nondeterministic file
        if !name.ends_with(".csv") || name == "timings.csv" || name == "ledger.csv" {
            continue;
        }
        compared += 1;
        if std::fs::read(a.path().join(&name)).unwrap() != std::fs::read(b.path().join(&name)).unwrap() {
            differing.push(name);
        }
    }
    let pass = differing.is_empty() && compared >= 6;
    report(7, pass, t, &format!("{compared} csv files compared; differing {differing:?}"));
    assert!(pass);
}
