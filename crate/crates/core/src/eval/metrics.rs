use crate::error::{Error, Result};

/// Probability that a random positive outscores a random negative, ties
/// counting one half. Computed from midranks.
pub fn auc(pos: &[f64], neg: &[f64]) -> Result<f64> {
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Empty("auc needs positive and negative scores".into()));
    }
    if pos.iter().chain(neg).any(|x| x.is_nan()) {
        return Err(Error::invalid("auc scores contain NaN"));
    }
    let mut all: Vec<(f64, bool)> = pos
        .iter()
        .map(|&s| (s, true))
        .chain(neg.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        // ranks i+1 ..= j share their mean
        let mid = (i + 1 + j) as f64 / 2.0;
        rank_sum += mid * all[i..j].iter().filter(|e| e.1).count() as f64;
        i = j;
    }
    let (np, nn) = (pos.len() as f64, neg.len() as f64);
    Ok((rank_sum - np * (np + 1.0) / 2.0) / (np * nn))
}

/// Sample Pearson correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(format!("{} vs {} values", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::invalid("pearson needs at least two points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::invalid("pearson needs positive variance in both inputs"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Split of the total sum of squares into between-graph and within-graph
/// (embedding) parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarianceDecomposition {
    pub ss_t: f64,
    pub ss_g: f64,
    pub ss_e: f64,
    pub r_e: f64,
}

/// `scores[g][r]`: replicate `r` on graph `g`. Every row must have the same
/// length.
pub fn variance_decomposition(scores: &[Vec<f64>]) -> Result<VarianceDecomposition> {
    let r = scores.first().map_or(0, Vec::len);
    if r == 0 {
        return Err(Error::Empty("no scores".into()));
    }
    if scores.iter().any(|row| row.len() != r) {
        return Err(Error::LengthMismatch("ragged score matrix".into()));
    }
    let total = (scores.len() * r) as f64;
    let mu = scores.iter().flatten().sum::<f64>() / total;
    let ss_t: f64 = scores.iter().flatten().map(|s| (s - mu) * (s - mu)).sum();
    let ss_g: f64 = r as f64
        * scores
            .iter()
            .map(|row| {
                let m = row.iter().sum::<f64>() / r as f64;
                (m - mu) * (m - mu)
            })
            .sum::<f64>();
    let ss_e = (ss_t - ss_g).max(0.0);
    let r_e = if ss_t > 0.0 { ss_e / ss_t } else { 0.0 };
    Ok(VarianceDecomposition { ss_t, ss_g, ss_e, r_e })
}
