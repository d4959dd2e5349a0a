use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::embed::Embedding;
use crate::error::{Error, Result};
use crate::scalar::{sq_dist, Scalar};
use crate::seed::rng_from_seed;

/// Stratified split: each class contributes `round(train_frac · size)` of its
/// members to training (at least one), the rest to the test set.
pub fn stratified_split(labels: &[usize], train_frac: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut members = vec![Vec::new(); classes];
    for (v, &l) in labels.iter().enumerate() {
        members[l].push(v);
    }
    let mut rng = rng_from_seed(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for m in members.iter_mut().filter(|m| !m.is_empty()) {
        m.shuffle(&mut rng);
        let t = ((train_frac * m.len() as f64).round() as usize).clamp(1, m.len());
        train.extend_from_slice(&m[..t]);
        test.extend_from_slice(&m[t..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Fraction of test nodes whose label matches the majority vote of their `k`
/// nearest training nodes. Distance ties go to the lower node id, vote ties to
/// the smaller class id.
pub fn knn_classify<F: Scalar>(
    emb: &Embedding<F>,
    labels: &[usize],
    train_frac: f64,
    k: usize,
    seed: u64,
) -> Result<f64> {
    if labels.len() != emb.n() {
        return Err(Error::NodeCountMismatch {
            expected: emb.n(),
            found: labels.len(),
        });
    }
    if k == 0 || !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(Error::invalid("need k >= 1 and 0 < train_frac < 1"));
    }
    let mut distinct = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::invalid("need at least two classes"));
    }
    let (train, test) = stratified_split(labels, train_frac, seed);
    if test.is_empty() {
        return Err(Error::Empty("test split is empty".into()));
    }
    let classes = distinct.last().map_or(0, |m| m + 1);
    let k = k.min(train.len());
    let correct = test
        .par_iter()
        .filter(|&&v| {
            let x = emb.row(v);
            let mut near: Vec<(F, usize)> = train.iter().map(|&u| (sq_dist(x, emb.row(u)), u)).collect();
            let by_dist = |a: &(F, usize), b: &(F, usize)| {
                a.0.partial_cmp(&b.0).expect("finite distances").then(a.1.cmp(&b.1))
            };
            if k < near.len() {
                near.select_nth_unstable_by(k - 1, by_dist);
            }
            let mut votes = vec![0usize; classes];
            for &(_, u) in &near[..k] {
                votes[labels[u]] += 1;
            }
            let top = *votes.iter().max().expect("classes >= 2");
            let predicted = votes.iter().position(|&c| c == top).expect("max exists");
            predicted == labels[v]
        })
        .count();
    Ok(correct as f64 / test.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_stratified() {
        let labels: Vec<usize> = (0..40).map(|v| usize::from(v >= 30)).collect();
        let (train, test) = stratified_split(&labels, 0.75, 3);
        assert_eq!(train.len() + test.len(), 40);
        assert_eq!(train.iter().filter(|&&v| labels[v] == 1).count(), 8);
        assert_eq!(train.iter().filter(|&&v| labels[v] == 0).count(), 23);
    }

    #[test]
    fn separated_classes_are_perfect() {
        let n = 40;
        let coords: Vec<f64> = (0..n).map(|v| if v % 2 == 0 { 0.0 } else { 10.0 } + v as f64 * 1e-3).collect();
        let labels: Vec<usize> = (0..n).map(|v| v % 2).collect();
        let e = Embedding::new(n, 1, coords).unwrap();
        assert_eq!(knn_classify(&e, &labels, 0.75, 10, 0).unwrap(), 1.0);
        assert!(knn_classify(&e, &vec![0; n], 0.75, 10, 0).is_err());
        assert!(knn_classify(&e, &labels, 1.0, 10, 0).is_err());
    }
}
