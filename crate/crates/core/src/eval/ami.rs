use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::Partition;

/// Cluster sizes of both labelings and the nonzero cells of their
/// contingency table as `(count, row size, column size)`.
struct Contingency {
    n: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    cells: Vec<(usize, usize, usize)>,
}

impl Contingency {
    fn new(a: &[usize], b: &[usize]) -> Self {
        let ra = a.iter().max().map_or(0, |m| m + 1);
        let rb = b.iter().max().map_or(0, |m| m + 1);
        let mut rows = vec![0; ra];
        let mut cols = vec![0; rb];
        let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
        for (&x, &y) in a.iter().zip(b) {
            *joint.entry((x, y)).or_insert(0) += 1;
            rows[x] += 1;
            cols[y] += 1;
        }
        let mut cells: Vec<(usize, usize, usize)> =
            joint.into_iter().map(|((x, y), c)| (c, rows[x], cols[y])).collect();
        cells.sort_unstable();
        rows.retain(|&c| c > 0);
        cols.retain(|&c| c > 0);
        Contingency {
            n: a.len(),
            rows,
            cols,
            cells,
        }
    }

    fn mutual_information(&self) -> f64 {
        let n = self.n as f64;
        self.cells
            .iter()
            .map(|&(c, a, b)| {
                let c = c as f64;
                c / n * (n * c / (a as f64 * b as f64)).ln()
            })
            .sum()
    }
}

fn entropy(sizes: &[usize], n: usize) -> f64 {
    let n = n as f64;
    -sizes
        .iter()
        .map(|&s| {
            let p = s as f64 / n;
            p * p.ln()
        })
        .sum::<f64>()
}

/// Expected mutual information of two random labelings with the given
/// cluster sizes (hypergeometric model).
pub fn expected_mutual_information(rows: &[usize], cols: &[usize], n: usize) -> f64 {
    let lg = |x: usize| libm::lgamma(x as f64 + 1.0);
    let nf = n as f64;
    let lg_n = lg(n);
    let mut emi = 0.0;
    for &a in rows {
        for &b in cols {
            let fixed = lg(a) + lg(b) + lg(n - a) + lg(n - b) - lg_n;
            let lo = (a + b).saturating_sub(n).max(1);
            for nij in lo..=a.min(b) {
                let x = nij as f64;
                let log_p = fixed - lg(nij) - lg(a - nij) - lg(b - nij) - lg(n + nij - a - b);
                emi += x / nf * (nf * x / (a as f64 * b as f64)).ln() * log_p.exp();
            }
        }
    }
    emi
}

/// Adjusted mutual information with arithmetic-mean normalization.
pub fn ami(a: &Partition, b: &Partition) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::NodeCountMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    if a.same_grouping(b) || (a.ell() == 1 && b.ell() == 1) {
        return Ok(1.0);
    }
    let t = Contingency::new(a.labels(), b.labels());
    let mi = t.mutual_information();
    let emi = expected_mutual_information(&t.rows, &t.cols, t.n);
    let mean_h = 0.5 * (entropy(&t.rows, t.n) + entropy(&t.cols, t.n));
    let denom = mean_h - emi;
    if denom.abs() < f64::EPSILON {
        return Ok(0.0);
    }
    Ok((mi - emi) / denom)
}
