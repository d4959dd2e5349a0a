//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use divscore::embed::Embedding;
use divscore::Graph;

pub fn naive_distances(e: &Embedding<f64>) -> Vec<Vec<f64>> {
    let n = e.n();
    let mut d = vec![vec![0.0; n]; n];
    for u in 0..n {
        for v in 0..n {
            let mut s = 0.0;
            for k in 0..e.dim() {
                let t = e.row(u)[k] - e.row(v)[k];
                s += t * t;
            }
            d[u][v] = s.sqrt();
        }
    }
    d
}

pub fn naive_probabilities(e: &Embedding<f64>, x: &[f64], alpha: f64) -> Vec<Vec<f64>> {
    let d = naive_distances(e);
    let dmax = d.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    let n = e.n();
    let mut p = vec![vec![0.0; n]; n];
    for u in 0..n {
        for v in 0..n {
            if u != v {
                let g = if alpha == 0.0 { 1.0 } else { (1.0 - d[u][v] / dmax).powf(alpha) };
                p[u][v] = (x[u] * x[v] * g).min(1.0);
            }
        }
    }
    p
}

pub fn brute_auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut wins = 0.0;
    for p in pos {
        for q in neg {
            if p > q {
                wins += 1.0;
            } else if p == q {
                wins += 0.5;
            }
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

pub fn choose(n: usize, k: usize) -> f64 {
    (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product()
}

pub fn entropy(sizes: &[usize], n: usize) -> f64 {
    sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n as f64;
            -p * p.ln()
        })
        .sum()
}

// AMI straight from its definition, with hypergeometric probabilities from
// products of binomial coefficients.
pub fn ami_from_table(table: &[Vec<usize>]) -> f64 {
    let rows: Vec<usize> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<usize> = (0..table[0].len()).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let n: usize = rows.iter().sum();
    let nf = n as f64;
    let mut mi = 0.0;
    for (i, r) in table.iter().enumerate() {
        for (j, &c) in r.iter().enumerate() {
            if c > 0 {
                mi += c as f64 / nf * (nf * c as f64 / (rows[i] * cols[j]) as f64).ln();
            }
        }
    }
    let mut emi = 0.0;
    for &a in rows.iter().filter(|&&a| a > 0) {
        for &b in cols.iter().filter(|&&b| b > 0) {
            for k in 1..=a.min(b) {
                if n - b < a - k {
                    continue;
                }
                let prob = choose(b, k) * choose(n - b, a - k) / choose(n, a);
                emi += prob * k as f64 / nf * (nf * k as f64 / (a * b) as f64).ln();
            }
        }
    }
    let h = 0.5 * (entropy(&rows, n) + entropy(&cols, n));
    (mi - emi) / (h - emi)
}

pub fn labels_from_table(table: &[Vec<usize>]) -> (Vec<usize>, Vec<usize>) {
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, r) in table.iter().enumerate() {
        for (j, &c) in r.iter().enumerate() {
            for _ in 0..c {
                a.push(i);
                b.push(j);
            }
        }
    }
    (a, b)
}

pub fn two_k5_bridge() -> Graph {
    let mut e = Vec::new();
    for base in [0, 5] {
        for u in 0..5 {
            for v in u + 1..5 {
                e.push((base + u, base + v));
            }
        }
    }
    e.push((4, 5));
    Graph::from_edges(10, e).unwrap()
}

pub fn naive_modularity(g: &Graph, labels: &[usize]) -> f64 {
    let m = g.m() as f64;
    let ell = labels.iter().max().unwrap() + 1;
    let mut inside = vec![0.0; ell];
    let mut vol = vec![0.0; ell];
    for (u, v) in g.edges() {
        if labels[u] == labels[v] {
            inside[labels[u]] += 1.0;
        }
    }
    for v in 0..g.n() {
        vol[labels[v]] += g.degree(v) as f64;
    }
    (0..ell).map(|c| inside[c] / m - (vol[c] / (2.0 * m)).powi(2)).sum()
}

// Every set partition of 0..n as a restricted growth string.
pub fn best_partition(g: &Graph) -> (Vec<usize>, f64, usize) {
    let n = g.n();
    let mut labels = vec![0usize; n];
    let mut best = (labels.clone(), f64::NEG_INFINITY);
    let mut count = 0;
    fn rec(i: usize, max: usize, labels: &mut Vec<usize>, g: &Graph, best: &mut (Vec<usize>, f64), count: &mut usize) {
        if i == labels.len() {
            *count += 1;
            let q = naive_modularity(g, labels);
            if q > best.1 {
                *best = (labels.clone(), q);
            }
            return;
        }
        for c in 0..=max + 1 {
            labels[i] = c;
            rec(i + 1, max.max(c), labels, g, best, count);
        }
    }
    labels[0] = 0;
    rec(1, 0, &mut labels, g, &mut best, &mut count);
    (best.0, best.1, count)
}
