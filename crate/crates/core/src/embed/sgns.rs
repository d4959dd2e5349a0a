use rand::Rng as _;

use super::Embedding;
use crate::error::{Error, Result};
use crate::scalar::{axpy, dot, Scalar};
use crate::seed::{derive_seed, rng_from_seed};

/// Skip-gram with negative sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct SgnsParams {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_learning_rate: f64,
    /// After each epoch, evaluate the loss on a fixed sample of pairs.
    pub track_loss: bool,
}

impl Default for SgnsParams {
    fn default() -> Self {
        SgnsParams {
            dim: 128,
            window: 10,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_learning_rate: 1e-4,
            track_loss: false,
        }
    }
}

impl SgnsParams {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.window == 0 || self.negatives == 0 {
            return Err(Error::invalid("dim, window and negatives must be >= 1"));
        }
        if !(self.learning_rate > 0.0 && self.min_learning_rate >= 0.0) {
            return Err(Error::invalid("learning rates must be positive"));
        }
        Ok(())
    }
}

pub struct SgnsOutput<F> {
    pub embedding: Embedding<F>,
    /// Mean loss per sampled pair at the end of each epoch, when tracked.
    pub epoch_loss: Vec<f64>,
}

/// Alias table over `count(v)^0.75`. One 64-bit draw picks a slot (high
/// half) and decides between the slot and its alias (low half); the table is
/// small enough to stay in cache, unlike a flat unigram table.
struct NoiseSampler {
    threshold: Vec<u32>,
    alias: Vec<u32>,
}

impl NoiseSampler {
    fn new(counts: &[u64]) -> Self {
        let n = counts.len();
        let w: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
        let total: f64 = w.iter().sum();
        let mut scaled: Vec<f64> = w.iter().map(|x| x * n as f64 / total).collect();
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let mut threshold = vec![u32::MAX; n];
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| scaled[i] < 1.0);
        while let (Some(s), Some(&l)) = (small.pop(), large.last()) {
            threshold[s] = (scaled[s] * 4294967296.0).min(u32::MAX as f64) as u32;
            alias[s] = l as u32;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        NoiseSampler { threshold, alias }
    }

    #[inline]
    fn sample(&self, rng: &mut impl rand::RngCore) -> usize {
        let r = rng.next_u64();
        let slot = (((r >> 32) * self.threshold.len() as u64) >> 32) as usize;
        if (r as u32) < self.threshold[slot] {
            slot
        } else {
            self.alias[slot] as usize
        }
    }
}

#[inline]
fn sigmoid<F: Scalar>(x: F) -> F {
    let x = x.max(F::of(-20.0)).min(F::of(20.0));
    F::one() / (F::one() + (-x).exp())
}

// (context, center, negatives) triples drawn once; the running loss seen during
// an epoch is biased low because each pair is scored right after its
// neighbours in the window moved the same vectors.
fn loss_sample(
    walks: &[Vec<usize>],
    noise: &NoiseSampler,
    params: &SgnsParams,
    seed: u64,
) -> Vec<(usize, usize, Vec<usize>)> {
    const SAMPLE: usize = 20_000;
    let usable: Vec<&Vec<usize>> = walks.iter().filter(|w| w.len() >= 2).collect();
    let mut rng = rng_from_seed(seed);
    (0..SAMPLE)
        .map(|_| {
            let w = usable[rng.random_range(0..usable.len())];
            let i = rng.random_range(0..w.len());
            let lo = i.saturating_sub(params.window);
            let hi = (i + params.window + 1).min(w.len());
            let mut j = rng.random_range(lo..hi - 1);
            if j >= i {
                j += 1;
            }
            let center = w[i];
            let negs = (0..params.negatives)
                .map(|_| noise.sample(&mut rng))
                .filter(|&t| t != center)
                .collect();
            (w[j], center, negs)
        })
        .collect()
}

fn sample_loss<F: Scalar>(sample: &[(usize, usize, Vec<usize>)], syn0: &[F], syn1: &[F], d: usize) -> f64 {
    let mut loss = 0.0;
    for (context, center, negs) in sample {
        let input = &syn0[context * d..(context + 1) * d];
        loss -= sigmoid(dot(input, &syn1[center * d..(center + 1) * d])).as_f64().max(1e-12).ln();
        for &t in negs {
            let f = sigmoid(dot(input, &syn1[t * d..(t + 1) * d]));
            loss -= (F::one() - f).as_f64().max(1e-12).ln();
        }
    }
    loss / sample.len().max(1) as f64
}

/// Train input vectors on `(center, context)` pairs drawn from `walks`.
/// Single-threaded, so the result depends only on the inputs and `seed`.
pub fn train_sgns<F: Scalar>(
    walks: &[Vec<usize>],
    n: usize,
    params: &SgnsParams,
    seed: u64,
) -> Result<SgnsOutput<F>> {
    params.validate()?;
    if n == 0 {
        return Err(Error::Empty("no nodes".into()));
    }
    let d = params.dim;
    if d >= n {
        log::warn!("embedding dimension {d} >= node count {n}");
    }
    let mut counts = vec![0u64; n];
    let mut tokens = 0u64;
    for w in walks {
        for &v in w {
            if v >= n {
                return Err(Error::invalid(format!("walk visits node {v} >= n = {n}")));
            }
            counts[v] += 1;
        }
        tokens += w.len() as u64;
    }
    if !walks.iter().any(|w| w.len() >= 2) {
        return Err(Error::Empty("walks contain no positive pairs".into()));
    }
    let noise = NoiseSampler::new(&counts);

    let mut rng = rng_from_seed(seed);
    let half = 0.5 / d as f64;
    let mut syn0: Vec<F> = (0..n * d).map(|_| F::of(rng.random_range(-half..half))).collect();
    let mut syn1 = vec![F::zero(); n * d];
    let mut grad = vec![F::zero(); d];
    let mut epoch_loss = Vec::with_capacity(params.epochs);
    let probe = if params.track_loss {
        loss_sample(walks, &noise, params, derive_seed(seed, &[1]))
    } else {
        Vec::new()
    };

    let total = (tokens * params.epochs as u64).max(1) as f64;
    let (lr0, lr1) = (params.learning_rate, params.min_learning_rate.min(params.learning_rate));
    let mut seen = 0u64;
    for _ in 0..params.epochs {
        for walk in walks {
            for (i, &center) in walk.iter().enumerate() {
                let lr = F::of(lr0 - (lr0 - lr1) * (seen as f64 / total));
                seen += 1;
                let b = rng.random_range(0..params.window);
                let span = params.window - b;
                let lo = i.saturating_sub(span);
                let hi = (i + span + 1).min(walk.len());
                for (j, &context) in walk.iter().enumerate().take(hi).skip(lo) {
                    if j == i {
                        continue;
                    }
                    let input = &syn0[context * d..(context + 1) * d];
                    grad.iter_mut().for_each(|g| *g = F::zero());
                    for k in 0..=params.negatives {
                        let (target, label) = if k == 0 {
                            (center, F::one())
                        } else {
                            let t = noise.sample(&mut rng);
                            if t == center {
                                continue;
                            }
                            (t, F::zero())
                        };
                        let out = &mut syn1[target * d..(target + 1) * d];
                        let f = sigmoid(dot(input, out));
                        let gstep = (label - f) * lr;
                        axpy(gstep, out, &mut grad);
                        axpy(gstep, input, out);
                    }
                    axpy(F::one(), &grad, &mut syn0[context * d..(context + 1) * d]);
                }
            }
        }
        if params.track_loss {
            epoch_loss.push(sample_loss(&probe, &syn0, &syn1, d));
        }
    }
    Ok(SgnsOutput {
        embedding: Embedding::new(n, d, syn0)?,
        epoch_loss,
    })
}
