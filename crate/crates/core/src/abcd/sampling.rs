//! The sampling stages of the generator: degrees, community sizes, node
//! assignment, and the internal/background degree split.

use log::warn;
use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{AbcdParams, Variant};
use crate::error::{Error, Result};
use crate::graph::Partition;
use crate::seed::Rng;

/// Snap values within 1e-9 of an integer onto it so exact products such as
/// `0.8 * 10` do not pick up a spurious fractional part.
#[inline]
pub(crate) fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r
    } else {
        v
    }
}

/// Cumulative mass of the truncated power law `P(k) ∝ k^-exponent` on `lo..=hi`.
pub fn power_law_cdf(exponent: f64, lo: usize, hi: usize) -> Vec<f64> {
    let mut cdf: Vec<f64> = Vec::with_capacity(hi - lo + 1);
    let mut acc = 0.0;
    for k in lo..=hi {
        acc += (k as f64).powf(-exponent);
        cdf.push(acc);
    }
    for c in cdf.iter_mut() {
        *c /= acc;
    }
    cdf
}

/// I.i.d. draws from the truncated power law on `lo..=hi`, sorted descending.
pub fn sample_power_law(
    count: usize,
    exponent: f64,
    lo: usize,
    hi: usize,
    rng: &mut Rng,
) -> Result<Vec<usize>> {
    if lo > hi {
        return Err(Error::invalid(format!("power-law support {lo}..={hi} is empty")));
    }
    if lo == 0 {
        return Err(Error::invalid("power-law support must start at 1 or above"));
    }
    if !(exponent.is_finite() && exponent > 1.0) {
        return Err(Error::invalid(format!("power-law exponent {exponent} must exceed 1")));
    }
    let cdf = power_law_cdf(exponent, lo, hi);
    let mut out: Vec<usize> = (0..count)
        .map(|_| {
            let u: f64 = rng.random();
            lo + cdf.partition_point(|&c| c <= u).min(hi - lo)
        })
        .collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    Ok(out)
}

/// Degree sequence (descending) with even sum.
pub fn build_degree_sequence(params: &AbcdParams, rng: &mut Rng) -> Result<Vec<usize>> {
    let mut deg = sample_power_law(params.n, params.gamma, params.delta_min, params.delta_max, rng)?;
    if deg.iter().sum::<usize>() % 2 == 1 {
        let min = *deg.last().unwrap();
        if min < params.delta_max {
            // first occurrence of the minimum keeps the order descending
            let i = deg.iter().position(|&d| d == min).unwrap();
            deg[i] += 1;
        } else {
            warn!("degenerate degree range with odd sum; exceeding the maximum degree by one");
            deg[0] += 1;
        }
    }
    Ok(deg)
}

/// Community sizes for explicit fractions: largest-remainder rounding to `n`.
pub fn sizes_from_fractions(n: usize, fractions: &[f64]) -> Result<Vec<usize>> {
    if fractions.is_empty() || fractions.iter().any(|&f| !(f > 0.0)) {
        return Err(Error::invalid("community fractions must be positive"));
    }
    let raw: Vec<f64> = fractions.iter().map(|f| snap(f * n as f64)).collect();
    let mut sizes: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let mut short = n - sizes.iter().sum::<usize>().min(n);
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = raw[a] - raw[a].floor();
        let fb = raw[b] - raw[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if short == 0 {
            break;
        }
        sizes[i] += 1;
        short -= 1;
    }
    if sizes.contains(&0) {
        return Err(Error::invalid("a community fraction rounds to an empty community"));
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Ok(sizes)
}

/// Power-law community sizes summing to exactly `n`, sorted descending.
pub fn sample_community_sizes(params: &AbcdParams, rng: &mut Rng) -> Result<Vec<usize>> {
    let (n, lo, hi) = (params.n, params.s_min, params.s_max);
    if lo > n {
        return Err(Error::invalid(format!("minimum community size {lo} exceeds n = {n}")));
    }
    if lo > hi {
        return Err(Error::invalid("s_min exceeds s_max"));
    }
    let cdf = power_law_cdf(params.beta, lo, hi);
    let mut sizes = Vec::new();
    let mut total = 0usize;
    while total < n {
        let u: f64 = rng.random();
        let s = lo + cdf.partition_point(|&c| c <= u).min(hi - lo);
        sizes.push(s);
        total += s;
    }
    if total > n {
        let excess = total - n;
        let last = sizes.len() - 1;
        if sizes[last] - excess >= lo {
            sizes[last] -= excess;
        } else {
            total -= sizes.pop().unwrap();
            sizes.sort_unstable_by(|a, b| b.cmp(a));
            let mut i = 0;
            let mut stuck = 0;
            while total < n {
                if sizes.is_empty() || stuck == sizes.len() {
                    return Err(Error::invalid(format!(
                        "community sizes in [{lo}, {hi}] cannot sum to n = {n}"
                    )));
                }
                if sizes[i] < hi {
                    sizes[i] += 1;
                    total += 1;
                    stuck = 0;
                } else {
                    stuck += 1;
                }
                i = (i + 1) % sizes.len();
            }
        }
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Ok(sizes)
}

/// Smallest internal degree a node of degree `d` needs at mixing level `xi`.
#[inline]
fn required_internal(d: usize, xi: f64) -> usize {
    snap((1.0 - xi) * d as f64).ceil() as usize
}

/// Assign nodes (in the given order, degrees descending) to communities.
///
/// A community of size `s` admits a node of degree `d` when
/// `ceil((1 - xi) d) <= s - 1`. Among admissible communities the node takes a
/// uniformly random free slot. Returns the partition and the number of nodes
/// that found no admissible community.
pub fn assign_nodes(
    degrees: &[usize],
    sizes: &[usize],
    xi: f64,
    rng: &mut Rng,
) -> Result<(Partition, usize)> {
    let n: usize = sizes.iter().sum();
    if n != degrees.len() {
        return Err(Error::LengthMismatch(format!(
            "{} degrees for community sizes summing to {n}",
            degrees.len()
        )));
    }
    let mut by_size: Vec<usize> = (0..sizes.len()).collect();
    by_size.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let mut free: Vec<usize> = sizes.to_vec();
    let mut labels = vec![0usize; n];
    let mut saturated = 0;
    for (v, &d) in degrees.iter().enumerate() {
        let need = required_internal(d, xi);
        let prefix = by_size.partition_point(|&c| sizes[c] > need);
        let total: usize = by_size[..prefix].iter().map(|&c| free[c]).sum();
        let chosen = if total > 0 {
            let mut r = rng.random_range(0..total);
            let mut pick = by_size[0];
            for &c in &by_size[..prefix] {
                if r < free[c] {
                    pick = c;
                    break;
                }
                r -= free[c];
            }
            pick
        } else {
            saturated += 1;
            *by_size
                .iter()
                .find(|&&c| free[c] > 0)
                .expect("total free capacity equals remaining nodes")
        };
        free[chosen] -= 1;
        labels[v] = chosen;
    }
    if saturated > 0 {
        warn!("{saturated} node(s) had no admissible community; placed in the largest with room");
    }
    Ok((Partition::new(labels)?, saturated))
}

/// Make every community's degree volume even by nudging one member's degree
/// by one, staying inside `[delta_min, delta_max]` and below the community
/// size. Needed when there is no background graph to absorb parity stubs.
/// Returns the number of adjusted nodes.
pub fn even_community_volumes(
    degrees: &mut [usize],
    partition: &Partition,
    delta_min: usize,
    delta_max: usize,
) -> usize {
    let mut adjusted = 0;
    for (c, members) in partition.members().into_iter().enumerate() {
        let vol: usize = members.iter().map(|&v| degrees[v]).sum();
        if vol.is_multiple_of(2) {
            continue;
        }
        let cap = delta_max.min(partition.sizes()[c].saturating_sub(1));
        let up = members.iter().copied().filter(|&v| degrees[v] < cap).min_by_key(|&v| degrees[v]);
        let down = members.iter().copied().filter(|&v| degrees[v] > delta_min.max(1)).max_by_key(|&v| degrees[v]);
        match (up, down) {
            (Some(v), _) => degrees[v] += 1,
            (None, Some(v)) => degrees[v] -= 1,
            (None, None) => {
                warn!("community {c} has odd volume that cannot be evened within degree bounds");
                continue;
            }
        }
        adjusted += 1;
    }
    adjusted
}

/// Per-node internal (`y`) and background (`z`) degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSplit {
    pub internal: Vec<usize>,
    pub background: Vec<usize>,
    /// Communities whose local mixing level had to be clamped to 1.
    pub clamped: usize,
}

/// Effective mixing level per community.
pub fn community_mixing(degrees: &[usize], partition: &Partition, xi: f64, variant: Variant) -> (Vec<f64>, usize) {
    match variant {
        Variant::Global => (vec![xi; partition.ell()], 0),
        Variant::Local => {
            let total: f64 = degrees.iter().sum::<usize>() as f64;
            let mut vol = vec![0.0f64; partition.ell()];
            for (v, &d) in degrees.iter().enumerate() {
                vol[partition.label(v)] += d as f64;
            }
            let mut clamped = 0;
            let xs = vol
                .iter()
                .map(|&vj| {
                    if xi == 0.0 {
                        return 0.0;
                    }
                    let rho = if total > 0.0 { vj / total } else { 0.0 };
                    if rho >= 1.0 - xi {
                        clamped += 1;
                        1.0
                    } else {
                        (xi / (1.0 - rho)).min(1.0)
                    }
                })
                .collect();
            (xs, clamped)
        }
    }
}

/// Split each degree into internal and background parts by randomized
/// rounding of `(1 - xi_eff) d`, then fix the parity of every community's
/// internal volume.
pub fn split_degrees(
    degrees: &[usize],
    partition: &Partition,
    xi: f64,
    variant: Variant,
    rng: &mut Rng,
) -> Result<DegreeSplit> {
    if degrees.len() != partition.n() {
        return Err(Error::LengthMismatch("degrees vs partition".into()));
    }
    let (mix, clamped) = community_mixing(degrees, partition, xi, variant);
    if clamped > 0 {
        warn!("local variant: {clamped} community mixing level(s) clamped to 1");
    }
    let mut y: Vec<usize> = degrees
        .iter()
        .enumerate()
        .map(|(v, &d)| {
            let target = snap((1.0 - mix[partition.label(v)]) * d as f64);
            let base = target.floor();
            let frac = target - base;
            let up = frac > 0.0 && rng.random::<f64>() < frac;
            ((base as usize) + up as usize).min(d)
        })
        .collect();

    let sizes = partition.sizes();
    for (c, members) in partition.members().into_iter().enumerate() {
        let vol: usize = members.iter().map(|&v| y[v]).sum();
        if vol.is_multiple_of(2) {
            continue;
        }
        let mut order = members.clone();
        order.shuffle(rng);
        let cap = sizes[c].saturating_sub(1);
        let fixed = order.iter().find_map(|&v| {
            if y[v] < degrees[v] && y[v] < cap {
                Some((v, true))
            } else if y[v] > 0 {
                Some((v, false))
            } else {
                None
            }
        });
        match fixed {
            Some((v, true)) => y[v] += 1,
            Some((v, false)) => y[v] -= 1,
            None => unreachable!("odd volume implies a member with positive internal degree"),
        }
    }
    let z: Vec<usize> = degrees.iter().zip(&y).map(|(d, yi)| d - yi).collect();
    debug_assert_eq!(z.iter().sum::<usize>() % 2, degrees.iter().sum::<usize>() % 2);
    Ok(DegreeSplit {
        internal: y,
        background: z,
        clamped,
    })
}
