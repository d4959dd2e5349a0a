use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use divscore::abcd::{generate_abcd, AbcdParams};
use divscore::clustering::{modularity, Clusterer, EcgParams, WeightedGraph};
use divscore::embed::{load_embedding, save_embedding, EmbedAlgo, Embedding, SgnsParams, WalkParams};
use divscore::eval::{ami, kmeans, knn_classify, link_prediction_split, score_link_prediction, Metric};
use divscore::gcl::{DivergenceScorer, FitOptions, ScoreOptions};
use divscore::graph::{graph_stats, load_edge_list, load_partition, save_edge_list, save_partition};
use divscore::seed::derive_seed;
use divscore::sweep::{run_sweep, SweepParam, SweepSpec};
use divscore::{Error, Graph, Partition};
use log::{info, warn};

use crate::args::*;
use crate::Failure;

type CmdResult = Result<(), Failure>;

pub fn run(cli: Cli) -> CmdResult {
    if cli.workers == 0 {
        return Err(Error::Invalid("--workers must be >= 1".into()).into());
    }
    // only fails if a pool already exists, which is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global();
    fs::create_dir_all(&cli.out_dir).map_err(|e| io_err(&cli.out_dir, e))?;
    let ctx = Ctx {
        seed: cli.seed.unwrap_or(0),
        seed_given: cli.seed.is_some(),
        out_dir: cli.out_dir,
        workers: cli.workers,
    };
    match cli.command {
        Command::Abcd(a) => abcd(&ctx, a),
        Command::Embed(a) => embed(&ctx, a),
        Command::Cluster(a) => cluster(&ctx, a),
        Command::Score(a) => score(&ctx, a),
        Command::Eval(a) => eval(&ctx, a),
        Command::Sweep(a) => sweep(&ctx, a),
        Command::Stats(a) => stats(a),
    }
}

struct Ctx {
    seed: u64,
    seed_given: bool,
    out_dir: PathBuf,
    workers: usize,
}

fn io_err(path: &Path, source: std::io::Error) -> Failure {
    Failure::Lib(Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    let loaded = load_edge_list(path)?;
    if loaded.ids.iter().enumerate().any(|(i, &id)| id != i as u64) {
        warn!("node ids in {} are not 0..n; rows refer to ids compacted in ascending order", path.display());
    }
    Ok(loaded.graph)
}

fn abcd(ctx: &Ctx, a: AbcdArgs) -> CmdResult {
    let mut p = match &a.manifest {
        Some(path) => AbcdParams::from_manifest(&fs::read_to_string(path).map_err(|e| io_err(path, e))?)?,
        None => AbcdParams::default(),
    };
    if let Some(n) = a.n {
        p = p.with_n(n);
    }
    if let Some(g) = a.gamma {
        p = p.with_gamma(g);
    }
    if let Some(b) = a.beta {
        p = p.with_beta(b);
    }
    if let Some(x) = a.xi {
        p = p.with_xi(x);
    }
    if let Some(d) = a.delta_min {
        p.delta_min = d;
    }
    if let Some(d) = a.delta_max {
        p.delta_max = d;
    }
    if let Some(s) = a.s_min {
        p.s_min = s;
    }
    if let Some(s) = a.s_max {
        p.s_max = s;
    }
    if let Some(v) = &a.variant {
        p.variant = v.parse()?;
    }
    if let Some(m) = &a.community_model {
        p.community_model = m.parse()?;
    }
    if let Some(f) = &a.fractions {
        p.fixed_community_fractions = if f == "none" { None } else { Some(parse_list(f)?) };
    }
    if ctx.seed_given || a.manifest.is_none() {
        p = p.with_seed(ctx.seed);
    }
    p.validate()?;

    let out = generate_abcd(&p)?;
    save_edge_list(&out.graph, ctx.out_dir.join("graph.edges"))?;
    save_partition(&out.ground_truth, ctx.out_dir.join("communities.txt"))?;
    write_text(&ctx.out_dir.join("manifest.txt"), &p.to_manifest())?;
    let summary = format!(
        "realized_xi={}\nedges={}\ncommunities={}\nsaturated_nodes={}\nclamped_communities={}\n",
        out.realized_xi,
        out.graph.m(),
        out.ground_truth.ell(),
        out.diagnostics.saturated_nodes,
        out.diagnostics.clamped_communities
    );
    write_text(&ctx.out_dir.join("summary.txt"), &summary)?;
    println!(
        "n={} m={} communities={} realized_xi={:.4}",
        out.graph.n(),
        out.graph.m(),
        out.ground_truth.ell(),
        out.realized_xi
    );
    Ok(())
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| Failure::Lib(Error::Invalid(format!("cannot parse {t:?} in list {s:?}"))))
        })
        .collect()
}

fn build_algo(a: &AlgoArgs) -> EmbedAlgo {
    let (p, q) = match a.algo {
        Algo::Deepwalk => (1.0, 1.0),
        _ => (a.p, a.q),
    };
    match a.algo {
        Algo::Node2vec | Algo::Deepwalk => EmbedAlgo::Node2Vec {
            walks: WalkParams {
                p,
                q,
                num_walks: a.num_walks,
                walk_length: a.walk_length,
            },
            sgns: SgnsParams {
                dim: a.dim,
                window: a.window,
                negatives: a.negatives,
                epochs: a.epochs,
                learning_rate: a.learning_rate,
                ..SgnsParams::default()
            },
        },
        Algo::Hope => EmbedAlgo::Hope { dim: a.dim },
        Algo::Random => EmbedAlgo::Random { dim: a.dim },
    }
}

fn embed(ctx: &Ctx, a: EmbedArgs) -> CmdResult {
    let g = load_graph(&a.graph)?;
    let algo = build_algo(&a.algo);
    let path = a.output.unwrap_or_else(|| ctx.out_dir.join("embedding.txt"));
    if a.f64 {
        save_embedding(&algo.embed::<f64>(&g, ctx.seed)?, &path)?;
    } else {
        save_embedding(&algo.embed::<f32>(&g, ctx.seed)?, &path)?;
    }
    info!("wrote {} ({})", path.display(), algo.id());
    Ok(())
}

fn build_clusterer(a: &ClustererArgs, n: usize) -> Result<Clusterer, Failure> {
    Ok(match a.clusterer {
        ClustererKind::Ecg => Clusterer::Ecg(EcgParams {
            ensemble: a.ensemble,
            ..EcgParams::default()
        }),
        ClustererKind::Louvain => Clusterer::Louvain,
        ClustererKind::File => {
            let path = a
                .partition
                .as_ref()
                .ok_or_else(|| Error::Invalid("--clusterer file needs --partition".into()))?;
            Clusterer::Fixed(load_partition(path, n)?)
        }
    })
}

fn cluster(ctx: &Ctx, a: ClusterArgs) -> CmdResult {
    let g = load_graph(&a.graph)?;
    let p = build_clusterer(&a.clusterer, g.n())?.cluster(&g, ctx.seed)?;
    let q = modularity(&WeightedGraph::unweighted(&g), &p)?;
    let path = a.output.unwrap_or_else(|| ctx.out_dir.join("partition.txt"));
    save_partition(&p, &path)?;
    println!("communities={} modularity={q}", p.ell());
    Ok(())
}

fn score_options(a: &ScoreOptionArgs) -> Result<ScoreOptions, Failure> {
    if !(a.alpha_step > 0.0) || !(a.alpha_max >= 0.0) {
        return Err(Error::Invalid("alpha grid needs alpha-step > 0 and alpha-max >= 0".into()).into());
    }
    let steps = (a.alpha_max / a.alpha_step + 1e-9).floor() as usize;
    Ok(ScoreOptions {
        alpha_grid: (0..=steps).map(|k| k as f64 * a.alpha_step).collect(),
        alpha_cap: a.alpha_cap,
        weights: (a.w_inter, a.w_intra),
        fit: FitOptions {
            max_iter: a.max_iter,
            ..FitOptions::default()
        },
        ..ScoreOptions::default()
    })
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn score(ctx: &Ctx, a: ScoreArgs) -> CmdResult {
    let g = load_graph(&a.graph)?;
    let emb: Embedding<f64> = load_embedding(&a.embedding)?;
    let clusterer = build_clusterer(&a.clusterer, g.n())?;
    let scorer = DivergenceScorer::<f64>::from_clusterer(&g, &clusterer, ctx.seed)?
        .with_options(score_options(&a.options)?);
    let report = scorer.score(&emb, &file_stem(&a.embedding))?;
    write_text(&ctx.out_dir.join("report.txt"), &report.to_key_values())?;
    write_text(&ctx.out_dir.join("curve.csv"), &report.curve_csv())?;
    print!("{}", report.to_key_values());
    if !report.converged {
        return Err(Failure::NotConverged(format!(
            "the fit at the best alpha did not converge (residual {:e})",
            report.best_residual
        )));
    }
    Ok(())
}

const EVAL_HEADER: &str = "graph_id,algo,dim,seed,divergence,metric,value";

fn append_result(path: &Path, row: &str) -> CmdResult {
    let fresh = !path.exists() || fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| io_err(path, e))?;
    if fresh {
        writeln!(f, "{EVAL_HEADER}").map_err(|e| io_err(path, e))?;
    }
    writeln!(f, "{row}").map_err(|e| io_err(path, e))
}

fn eval(ctx: &Ctx, a: EvalArgs) -> CmdResult {
    let g = load_graph(&a.graph)?;
    let algo = build_algo(&a.algo);
    let graph_id = a.graph_id.clone().unwrap_or_else(|| file_stem(&a.graph));
    let cluster_seed = derive_seed(ctx.seed, &[0]);
    let embed_seed = derive_seed(ctx.seed, &[1]);
    let task_seed = derive_seed(ctx.seed, &[2]);

    let obtain = |graph: &Graph| -> Result<(Embedding<f64>, String, usize), Failure> {
        match &a.embedding {
            Some(path) => {
                let e: Embedding<f64> = load_embedding(path)?;
                if e.n() != graph.n() {
                    return Err(Error::NodeCountMismatch {
                        expected: graph.n(),
                        found: e.n(),
                    }
                    .into());
                }
                let d = e.dim();
                Ok((e, file_stem(path), d))
            }
            None => Ok((algo.embed::<f32>(graph, embed_seed)?.cast::<f64>(), algo.label(), algo.dim())),
        }
    };

    let (metric, value, divergence, name, dim, converged) = match a.task {
        Task::Classify | Task::Communities => {
            let path = a
                .labels
                .as_ref()
                .ok_or_else(|| Error::Invalid("this task needs --labels".into()))?;
            let truth: Partition = load_partition(path, g.n())?;
            let (emb, name, dim) = obtain(&g)?;
            let scorer = DivergenceScorer::<f64>::from_clusterer(&g, &Clusterer::default(), cluster_seed)?;
            let report = scorer.score(&emb, &name)?;
            let (metric, value) = if a.task == Task::Classify {
                (Metric::Accuracy, knn_classify(&emb, truth.labels(), 0.75, a.k, task_seed)?)
            } else {
                let km = kmeans(&emb, truth.ell(), task_seed)?;
                (Metric::Ami, ami(&km.partition, &truth)?)
            };
            (metric, value, report.score, name, dim, report.converged)
        }
        Task::Linkpred => {
            if a.embedding.is_some() {
                return Err(Error::Invalid(
                    "linkpred embeds the graph with held-out edges removed; use --algo instead of --embedding".into(),
                )
                .into());
            }
            let split = link_prediction_split(&g, a.holdout, task_seed)?;
            let (emb, name, dim) = obtain(&split.train)?;
            let scorer = DivergenceScorer::<f64>::from_clusterer(&split.train, &Clusterer::default(), cluster_seed)?;
            let report = scorer.score(&emb, &name)?;
            let scores = score_link_prediction(&emb, &split)?;
            info!("link prediction accuracy {}", scores.accuracy);
            (Metric::Auc, scores.auc, report.score, name, dim, report.converged)
        }
    };
    let row = format!("{graph_id},{name},{dim},{},{divergence},{metric},{value}", ctx.seed);
    let path = a.results.clone().unwrap_or_else(|| ctx.out_dir.join("eval.csv"));
    append_result(&path, &row)?;
    println!("{metric}={value} divergence={divergence}");
    if !converged {
        return Err(Failure::NotConverged("divergence fit did not converge".into()));
    }
    Ok(())
}

fn parse_algo(token: &str, dim: usize) -> Result<EmbedAlgo, Failure> {
    let parts: Vec<&str> = token.split(':').collect();
    let bad = || Failure::Lib(Error::Invalid(format!("unknown algorithm {token:?}")));
    match parts.as_slice() {
        ["deepwalk"] => Ok(EmbedAlgo::deepwalk(dim)),
        ["node2vec"] => Ok(EmbedAlgo::node2vec(dim, 1.0, 1.0)),
        ["node2vec", p, q] => Ok(EmbedAlgo::node2vec(
            dim,
            p.parse().map_err(|_| bad())?,
            q.parse().map_err(|_| bad())?,
        )),
        ["hope"] => Ok(EmbedAlgo::Hope { dim }),
        ["random"] => Ok(EmbedAlgo::Random { dim }),
        _ => Err(bad()),
    }
}

fn sweep(ctx: &Ctx, a: SweepArgs) -> CmdResult {
    let param: SweepParam = a.param.parse()?;
    let dims: Vec<usize> = parse_list(&a.dims)?;
    let first_dim = *dims.first().ok_or_else(|| Error::Invalid("no dimensions".into()))?;
    let algorithms = a
        .algos
        .split(',')
        .map(|t| parse_algo(t.trim(), first_dim))
        .collect::<Result<Vec<_>, _>>()?;
    let mut spec = SweepSpec {
        param,
        graphs_per_value: a.graphs,
        embeddings_per_graph: a.embeddings,
        algorithms,
        dims,
        base: AbcdParams::default().with_n(a.n).with_xi(a.xi),
        seed: ctx.seed,
        ..SweepSpec::default()
    };
    if let Some(v) = &a.values {
        spec.values = parse_list(v)?;
    }
    let out = run_sweep(&spec, &ctx.out_dir, ctx.workers)?;
    let unconverged = out.rows.iter().filter(|r| !r.converged).count();
    println!(
        "{} rows ({} computed now) in {}",
        out.rows.len(),
        out.computed,
        ctx.out_dir.display()
    );
    if unconverged > 0 {
        return Err(Failure::NotConverged(format!("{unconverged} row(s) with a non-converged best fit")));
    }
    Ok(())
}

fn stats(a: StatsArgs) -> CmdResult {
    let g = load_graph(&a.graph)?;
    print!("{}", graph_stats(&g).to_key_values());
    Ok(())
}
