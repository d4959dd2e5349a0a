//! Parameter sweeps over ABCD families: generate graphs, embed, score, and
//! write raw and aggregated tables. Runs are resumable and replay exactly.

mod report;

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;

pub use report::{
    aggregate, aggregates_csv, emit_heatmap_csv, mean_std, results_csv, variance_csv,
    variance_table, Aggregate, RESULTS_HEADER,
};

use crate::abcd::{generate_abcd, AbcdParams};
use crate::clustering::Clusterer;
use crate::embed::EmbedAlgo;
use crate::error::{Error, Result};
use crate::gcl::{DivergenceScorer, ScoreOptions};
use crate::seed::derive_seed;

/// ABCD parameter varied by a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    N,
    Gamma,
    Beta,
    Xi,
}

impl SweepParam {
    pub fn apply(self, base: &AbcdParams, value: f64) -> Result<AbcdParams> {
        let p = match self {
            SweepParam::N => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::invalid(format!("n must be a positive integer, got {value}")));
                }
                base.clone().with_n(value as usize)
            }
            SweepParam::Gamma => base.clone().with_gamma(value),
            SweepParam::Beta => base.clone().with_beta(value),
            SweepParam::Xi => base.clone().with_xi(value),
        };
        p.validate()?;
        Ok(p)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::N => "n",
            SweepParam::Gamma => "gamma",
            SweepParam::Beta => "beta",
            SweepParam::Xi => "xi",
        })
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(SweepParam::N),
            "gamma" => Ok(SweepParam::Gamma),
            "beta" => Ok(SweepParam::Beta),
            "xi" => Ok(SweepParam::Xi),
            other => Err(Error::Invalid(format!("unknown sweep parameter {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub graphs_per_value: usize,
    pub embeddings_per_graph: usize,
    /// Algorithm templates; each is run at every dimension in `dims`.
    pub algorithms: Vec<EmbedAlgo>,
    pub dims: Vec<usize>,
    pub base: AbcdParams,
    pub seed: u64,
    pub score: ScoreOptions,
}

impl Default for SweepSpec {
    /// Desk-scale noise sweep: n = 1000, ξ ∈ {0.1, …, 1.0}, 3 graphs × 3
    /// embeddings of node2vec at d = 32.
    fn default() -> Self {
        SweepSpec {
            param: SweepParam::Xi,
            values: (1..=10).map(|k| k as f64 / 10.0).collect(),
            graphs_per_value: 3,
            embeddings_per_graph: 3,
            algorithms: vec![EmbedAlgo::deepwalk(32)],
            dims: vec![32],
            base: AbcdParams::default().with_n(1000),
            seed: 0,
            score: ScoreOptions::default(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() || self.algorithms.is_empty() || self.dims.is_empty() {
            return Err(Error::invalid("sweep needs values, algorithms and dimensions"));
        }
        if self.graphs_per_value == 0 || self.embeddings_per_graph == 0 {
            return Err(Error::invalid("graph and embedding counts must be >= 1"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sweep values must be finite"));
        }
        let mut seen = self.values.clone();
        seen.sort_by(f64::total_cmp);
        seen.dedup();
        if seen.len() != self.values.len() {
            return Err(Error::invalid("sweep values must be distinct"));
        }
        if self.dims.contains(&0) {
            return Err(Error::invalid("dimensions must be >= 1"));
        }
        for &v in &self.values {
            self.param.apply(&self.base, v)?;
        }
        Ok(())
    }

    /// Every setting that influences the results, one `key=value` per line.
    pub fn to_manifest(&self) -> String {
        let list = |xs: &[f64]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        s.push_str(&format!("param={}\n", self.param));
        s.push_str(&format!("values={}\n", list(&self.values)));
        s.push_str(&format!("graphs_per_value={}\n", self.graphs_per_value));
        s.push_str(&format!("embeddings_per_graph={}\n", self.embeddings_per_graph));
        for (i, a) in self.algorithms.iter().enumerate() {
            s.push_str(&format!("algorithm.{i}={a:?}\n"));
        }
        let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        s.push_str(&format!("dims={}\n", dims.join(",")));
        s.push_str(&format!("seed={}\n", self.seed));
        s.push_str(&format!("score={:?}\n", self.score));
        s.push_str("clusterer=ecg\n");
        for line in self.base.to_manifest().lines() {
            s.push_str(&format!("abcd.{line}\n"));
        }
        s
    }

    pub fn graph_seed(&self, value_idx: usize, graph: usize) -> u64 {
        derive_seed(self.seed, &[value_idx as u64, graph as u64])
    }

    pub fn embed_seed(&self, graph_seed: u64, algo_idx: usize, dim: usize, rep: usize) -> u64 {
        derive_seed(graph_seed, &[1, algo_idx as u64, dim as u64, rep as u64])
    }

    fn cluster_seed(graph_seed: u64) -> u64 {
        derive_seed(graph_seed, &[0])
    }
}

/// One embedding of one graph, scored.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub graph: usize,
    pub graph_seed: u64,
    pub algo: String,
    pub dim: usize,
    pub replicate: usize,
    pub embed_seed: u64,
    pub divergence: f64,
    pub best_alpha: f64,
    pub converged: bool,
    pub communities: usize,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.value,
            self.graph,
            self.graph_seed,
            self.algo,
            self.dim,
            self.replicate,
            self.embed_seed,
            self.divergence,
            self.best_alpha,
            self.converged,
            self.communities
        )
    }

    pub fn from_csv(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.split(',').collect();
        let bad = |what: &str| Error::invalid(format!("bad {what} in ledger row {line:?}"));
        if f.len() != 11 {
            return Err(bad("field count"));
        }
        Ok(SweepRow {
            value: f[0].parse().map_err(|_| bad("value"))?,
            graph: f[1].parse().map_err(|_| bad("graph"))?,
            graph_seed: f[2].parse().map_err(|_| bad("graph_seed"))?,
            algo: f[3].to_string(),
            dim: f[4].parse().map_err(|_| bad("dim"))?,
            replicate: f[5].parse().map_err(|_| bad("replicate"))?,
            embed_seed: f[6].parse().map_err(|_| bad("embed_seed"))?,
            divergence: f[7].parse().map_err(|_| bad("divergence"))?,
            best_alpha: f[8].parse().map_err(|_| bad("best_alpha"))?,
            converged: f[9].parse().map_err(|_| bad("converged"))?,
            communities: f[10].parse().map_err(|_| bad("communities"))?,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SweepOutput {
    /// Rows in canonical order: value, graph, algorithm, dimension, replicate.
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<Aggregate>,
    pub per_graph: Vec<Aggregate>,
    /// Jobs computed in this invocation (the rest came from the ledger).
    pub computed: usize,
}

const MANIFEST: &str = "manifest.txt";
const LEDGER: &str = "ledger.csv";

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct JobKey {
    value_idx: usize,
    graph: usize,
    algo_idx: usize,
    dim_idx: usize,
    rep: usize,
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Run (or resume) a sweep whose state and outputs live in `out_dir`.
/// `workers` bounds the number of jobs in flight.
pub fn run_sweep(spec: &SweepSpec, out_dir: &Path, workers: usize) -> Result<SweepOutput> {
    spec.validate()?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let manifest = spec.to_manifest();
    let manifest_path = out_dir.join(MANIFEST);
    if manifest_path.exists() {
        let old = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
        if old != manifest {
            return Err(Error::invalid(format!(
                "{} holds a different sweep; use a fresh output directory",
                out_dir.display()
            )));
        }
    } else {
        write_file(&manifest_path, &manifest)?;
    }

    let algo_labels: Vec<String> = spec.algorithms.iter().map(EmbedAlgo::label).collect();
    let value_idx = |v: f64| spec.values.iter().position(|&x| x == v);
    let mut done: BTreeMap<JobKey, SweepRow> = BTreeMap::new();
    let ledger_path = out_dir.join(LEDGER);
    if ledger_path.exists() {
        let f = File::open(&ledger_path).map_err(|e| Error::io(&ledger_path, e))?;
        for line in BufReader::new(f).lines() {
            let line = line.map_err(|e| Error::io(&ledger_path, e))?;
            if line.is_empty() || line == RESULTS_HEADER {
                continue;
            }
            let row = match SweepRow::from_csv(&line) {
                Ok(r) => r,
                Err(e) => {
                    // an interrupted write leaves a torn final line
                    log::warn!("skipping unreadable ledger line: {e}");
                    continue;
                }
            };
            let key = (|| {
                Some(JobKey {
                    value_idx: value_idx(row.value)?,
                    graph: row.graph,
                    algo_idx: algo_labels.iter().position(|a| *a == row.algo)?,
                    dim_idx: spec.dims.iter().position(|&d| d == row.dim)?,
                    rep: row.replicate,
                })
            })()
            .ok_or_else(|| Error::invalid(format!("ledger row outside the sweep: {line}")))?;
            let gs = spec.graph_seed(key.value_idx, key.graph);
            if row.graph_seed != gs || row.embed_seed != spec.embed_seed(gs, key.algo_idx, row.dim, row.replicate) {
                return Err(Error::invalid(format!("ledger row has unexpected seeds: {line}")));
            }
            done.insert(key, row);
        }
    }

    let mut ledger = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&ledger_path)
        .map_err(|e| Error::io(&ledger_path, e))?;
    if done.is_empty() {
        ledger.set_len(0).map_err(|e| Error::io(&ledger_path, e))?;
        writeln!(ledger, "{RESULTS_HEADER}").map_err(|e| Error::io(&ledger_path, e))?;
    } else if !fs::read(&ledger_path).map_err(|e| Error::io(&ledger_path, e))?.ends_with(b"\n") {
        // terminate a torn line so the next row starts clean
        writeln!(ledger).map_err(|e| Error::io(&ledger_path, e))?;
    }
    let timings_path = out_dir.join("timings.csv");
    let mut timings = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&timings_path)
        .map_err(|e| Error::io(&timings_path, e))?;
    if timings.metadata().map(|m| m.len() == 0).unwrap_or(false) {
        writeln!(timings, "value,graph,algo,dim,replicate,embed_seconds,score_seconds")
            .map_err(|e| Error::io(&timings_path, e))?;
    }
    let writer = Mutex::new((ledger, timings));

    let graphs: Vec<(usize, usize)> = (0..spec.values.len())
        .flat_map(|v| (0..spec.graphs_per_value).map(move |g| (v, g)))
        .collect();
    let jobs_per_graph: Vec<(usize, usize, usize)> = (0..spec.algorithms.len())
        .flat_map(|a| {
            (0..spec.dims.len()).flat_map(move |d| (0..spec.embeddings_per_graph).map(move |r| (a, d, r)))
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("worker pool: {e}")))?;
    let fresh: Vec<Vec<SweepRow>> = pool.install(|| {
        graphs
            .par_iter()
            .map(|&(vi, gi)| -> Result<Vec<SweepRow>> {
                let pending: Vec<&(usize, usize, usize)> = jobs_per_graph
                    .iter()
                    .filter(|(a, d, r)| {
                        !done.contains_key(&JobKey {
                            value_idx: vi,
                            graph: gi,
                            algo_idx: *a,
                            dim_idx: *d,
                            rep: *r,
                        })
                    })
                    .collect();
                if pending.is_empty() {
                    return Ok(Vec::new());
                }
                let value = spec.values[vi];
                let gs = spec.graph_seed(vi, gi);
                let params = spec.param.apply(&spec.base, value)?.with_seed(gs);
                let abcd = generate_abcd(&params)?;
                let scorer = DivergenceScorer::<f64>::from_clusterer(
                    &abcd.graph,
                    &Clusterer::default(),
                    SweepSpec::cluster_seed(gs),
                )?
                .with_options(spec.score.clone());
                pending
                    .par_iter()
                    .map(|&&(ai, di, rep)| -> Result<SweepRow> {
                        let dim = spec.dims[di];
                        let algo = spec.algorithms[ai].with_dim(dim);
                        let es = spec.embed_seed(gs, ai, dim, rep);
                        let t0 = Instant::now();
                        let emb = algo.embed::<f32>(&abcd.graph, es)?.cast::<f64>();
                        let embed_secs = t0.elapsed().as_secs_f64();
                        let t1 = Instant::now();
                        let report = scorer.score(&emb, &algo.id())?;
                        let score_secs = t1.elapsed().as_secs_f64();
                        let row = SweepRow {
                            value,
                            graph: gi,
                            graph_seed: gs,
                            algo: algo_labels[ai].clone(),
                            dim,
                            replicate: rep,
                            embed_seed: es,
                            divergence: report.score,
                            best_alpha: report.best_alpha,
                            converged: report.converged,
                            communities: scorer.partition().ell(),
                        };
                        let mut w = writer.lock().expect("writer lock");
                        writeln!(w.0, "{}", row.to_csv())
                            .and_then(|_| w.0.flush())
                            .map_err(|e| Error::io(&ledger_path, e))?;
                        writeln!(
                            w.1,
                            "{},{},{},{},{},{},{}",
                            value, gi, row.algo, dim, rep, embed_secs, score_secs
                        )
                        .map_err(|e| Error::io(&timings_path, e))?;
                        Ok(row)
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let computed = fresh.iter().map(Vec::len).sum();
    for row in fresh.into_iter().flatten() {
        let vi = value_idx(row.value).expect("row from this sweep");
        let key = JobKey {
            value_idx: vi,
            graph: row.graph,
            algo_idx: algo_labels.iter().position(|a| *a == row.algo).expect("known algo"),
            dim_idx: spec.dims.iter().position(|&d| d == row.dim).expect("known dim"),
            rep: row.replicate,
        };
        done.insert(key, row);
    }
    let rows: Vec<SweepRow> = done.into_values().collect();
    let aggregates = aggregate(&rows, false);
    let per_graph = aggregate(&rows, true);

    write_file(&out_dir.join("results.csv"), &results_csv(&rows))?;
    write_file(&out_dir.join("aggregates.csv"), &aggregates_csv(&aggregates))?;
    write_file(&out_dir.join("per_graph.csv"), &aggregates_csv(&per_graph))?;
    write_file(&out_dir.join("variance.csv"), &variance_csv(&variance_table(&rows)))?;
    for (vi, &v) in spec.values.iter().enumerate() {
        let subset: Vec<SweepRow> = rows.iter().filter(|r| r.value == v).cloned().collect();
        if let Ok((mean, std)) = emit_heatmap_csv(&subset) {
            write_file(&out_dir.join(format!("heatmap_mean_{vi}.csv")), &mean)?;
            write_file(&out_dir.join(format!("heatmap_std_{vi}.csv")), &std)?;
        }
    }
    Ok(SweepOutput {
        rows,
        aggregates,
        per_graph,
        computed,
    })
}
