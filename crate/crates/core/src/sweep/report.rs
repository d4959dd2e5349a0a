use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::SweepRow;
use crate::error::{Error, Result};
use crate::eval::{variance_decomposition, VarianceDecomposition};

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

// Sort key for f64 sweep values, which are finite by construction.
fn key(v: f64) -> u64 {
    let b = v.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

fn unkey(k: u64) -> f64 {
    f64::from_bits(if k >> 63 == 1 { k & !(1 << 63) } else { !k })
}

pub const RESULTS_HEADER: &str =
    "value,graph,graph_seed,algo,dim,replicate,embed_seed,divergence,best_alpha,converged,communities";

pub fn results_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(RESULTS_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv());
        s.push('\n');
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub value: f64,
    pub graph: Option<usize>,
    pub algo: String,
    pub dim: usize,
    pub count: usize,
    pub mean: f64,
    pub std: f64,
}

/// Mean and std of the divergence per (value, algo, dim), or per
/// (value, graph, algo, dim) when `per_graph` is set.
pub fn aggregate(rows: &[SweepRow], per_graph: bool) -> Vec<Aggregate> {
    let mut groups: BTreeMap<(u64, usize, String, usize), Vec<f64>> = BTreeMap::new();
    for r in rows {
        let g = if per_graph { r.graph } else { 0 };
        groups
            .entry((key(r.value), g, r.algo.clone(), r.dim))
            .or_default()
            .push(r.divergence);
    }
    groups
        .into_iter()
        .map(|((v, g, algo, dim), xs)| {
            let (mean, std) = mean_std(&xs);
            Aggregate {
                value: unkey(v),
                graph: per_graph.then_some(g),
                algo,
                dim,
                count: xs.len(),
                mean,
                std,
            }
        })
        .collect()
}

pub fn aggregates_csv(aggs: &[Aggregate]) -> String {
    let per_graph = aggs.first().is_some_and(|a| a.graph.is_some());
    let mut s = String::from(if per_graph {
        "value,graph,algo,dim,count,mean,std\n"
    } else {
        "value,algo,dim,count,mean,std\n"
    });
    for a in aggs {
        let _ = write!(s, "{},", a.value);
        if let Some(g) = a.graph {
            let _ = write!(s, "{g},");
        }
        let _ = writeln!(s, "{},{},{},{},{}", a.algo, a.dim, a.count, a.mean, a.std);
    }
    s
}

/// Variance decomposition per (value, algo, dim) over the graphs × replicates
/// matrix. Groups with an incomplete matrix are skipped.
pub fn variance_table(rows: &[SweepRow]) -> Vec<(f64, String, usize, VarianceDecomposition)> {
    let mut groups: BTreeMap<(u64, String, usize), BTreeMap<usize, Vec<(usize, f64)>>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((key(r.value), r.algo.clone(), r.dim))
            .or_default()
            .entry(r.graph)
            .or_default()
            .push((r.replicate, r.divergence));
    }
    let mut out = Vec::new();
    for ((v, algo, dim), graphs) in groups {
        let matrix: Vec<Vec<f64>> = graphs
            .into_values()
            .map(|mut reps| {
                reps.sort_by_key(|e| e.0);
                reps.into_iter().map(|e| e.1).collect()
            })
            .collect();
        if let Ok(vd) = variance_decomposition(&matrix) {
            out.push((unkey(v), algo, dim, vd));
        }
    }
    out
}

pub fn variance_csv(table: &[(f64, String, usize, VarianceDecomposition)]) -> String {
    let mut s = String::from("value,algo,dim,ss_t,ss_g,ss_e,r_e\n");
    for (v, algo, dim, vd) in table {
        let _ = writeln!(s, "{v},{algo},{dim},{},{},{},{}", vd.ss_t, vd.ss_g, vd.ss_e, vd.r_e);
    }
    s
}

/// Algorithm × dimension matrices of mean and std divergence. A combination
/// with no rows is left as an empty field.
pub fn emit_heatmap_csv(rows: &[SweepRow]) -> Result<(String, String)> {
    if rows.is_empty() {
        return Err(Error::Empty("no results for a heatmap".into()));
    }
    let mut cells: BTreeMap<(String, usize), Vec<f64>> = BTreeMap::new();
    for r in rows {
        cells.entry((r.algo.clone(), r.dim)).or_default().push(r.divergence);
    }
    let mut algos: Vec<&String> = cells.keys().map(|k| &k.0).collect();
    algos.dedup();
    let mut dims: Vec<usize> = cells.keys().map(|k| k.1).collect();
    dims.sort_unstable();
    dims.dedup();
    let header = std::iter::once("algo".to_string())
        .chain(dims.iter().map(|d| format!("d{d}")))
        .collect::<Vec<_>>()
        .join(",");
    let (mut mean, mut std) = (header.clone() + "\n", header + "\n");
    for algo in algos {
        mean.push_str(algo);
        std.push_str(algo);
        for &d in &dims {
            mean.push(',');
            std.push(',');
            if let Some(xs) = cells.get(&(algo.clone(), d)) {
                let (m, s) = mean_std(xs);
                let _ = write!(mean, "{m}");
                let _ = write!(std, "{s}");
            }
        }
        mean.push('\n');
        std.push('\n');
    }
    Ok((mean, std))
}
