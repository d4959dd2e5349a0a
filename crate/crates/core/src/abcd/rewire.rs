//! Degree-preserving rewiring of a multigraph into a simple graph.

use std::collections::HashMap;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed::Rng;

/// Edge list that may contain self-loops and repeated edges. Each edge
/// belongs to a pool; swaps only ever exchange endpoints between edges of
/// the same pool, so community edges stay inside their community.
#[derive(Clone, Debug, Default)]
pub struct MultiGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub pools: Vec<usize>,
}

impl MultiGraph {
    pub fn new(n: usize) -> Self {
        MultiGraph {
            n,
            ..Default::default()
        }
    }

    pub fn push(&mut self, u: usize, v: usize, pool: usize) {
        self.edges.push((u, v));
        self.pools.push(pool);
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }
}

/// Summary of a rewiring run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RewireStats {
    pub initial_offenses: usize,
    pub swaps: usize,
    pub passes: usize,
}

#[inline]
fn key(n: usize, u: usize, v: usize) -> u64 {
    let (a, b) = if u <= v { (u, v) } else { (v, u) };
    (a as u64) * (n as u64) + b as u64
}

/// Offense contributed by a pair seen `count` times.
#[inline]
fn offense(is_loop: bool, count: u32) -> usize {
    match (is_loop, count) {
        (_, 0) => 0,
        (true, c) => c as usize,
        (false, c) => c as usize - 1,
    }
}

const STALL_PASSES: usize = 100;

/// Swap endpoints of offending edges (self-loops and repeats) with random
/// partners from the same pool whenever the swap strictly lowers the total
/// offense count. Degrees are preserved exactly.
pub fn rewire_to_simple(mut mg: MultiGraph, rng: &mut Rng) -> Result<(Graph, RewireStats)> {
    let n = mg.n;
    let mut counts: HashMap<u64, u32> = HashMap::with_capacity(mg.edges.len());
    for &(u, v) in &mg.edges {
        *counts.entry(key(n, u, v)).or_insert(0) += 1;
    }
    let total_offense = |counts: &HashMap<u64, u32>| -> usize {
        counts
            .iter()
            .map(|(&k, &c)| offense(k / n as u64 == k % n as u64, c))
            .sum()
    };
    let mut offenses = total_offense(&counts);
    let mut stats = RewireStats {
        initial_offenses: offenses,
        ..Default::default()
    };

    let mut pool_members: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, &p) in mg.pools.iter().enumerate() {
        pool_members.entry(p).or_default().push(i);
    }

    let mut stalled = 0;
    while offenses > 0 {
        stats.passes += 1;
        let before_pass = offenses;
        // Offending edges: every self-loop, and all but the first copy of a repeat.
        let mut seen: HashMap<u64, u32> = HashMap::new();
        let offenders: Vec<usize> = mg
            .edges
            .iter()
            .enumerate()
            .filter_map(|(i, &(u, v))| {
                let k = key(n, u, v);
                let s = seen.entry(k).or_insert(0);
                *s += 1;
                (u == v || *s > 1).then_some(i)
            })
            .collect();

        for e in offenders {
            let (a, b) = mg.edges[e];
            if a != b && counts[&key(n, a, b)] <= 1 {
                continue;
            }
            let members = &pool_members[&mg.pools[e]];
            if members.len() < 2 {
                continue;
            }
            let f = loop {
                let f = members[rng.random_range(0..members.len())];
                if f != e {
                    break f;
                }
            };
            let (c, d) = mg.edges[f];
            let (e_new, f_new) = if rng.random::<bool>() {
                ((a, c), (b, d))
            } else {
                ((a, d), (b, c))
            };
            let touched = [
                key(n, a, b),
                key(n, c, d),
                key(n, e_new.0, e_new.1),
                key(n, f_new.0, f_new.1),
            ];
            let mut uniq: Vec<u64> = touched.to_vec();
            uniq.sort_unstable();
            uniq.dedup();
            let local = |counts: &HashMap<u64, u32>| -> usize {
                uniq.iter()
                    .map(|k| {
                        let c = counts.get(k).copied().unwrap_or(0);
                        offense(k / n as u64 == k % n as u64, c)
                    })
                    .sum()
            };
            let before = local(&counts);
            *counts.get_mut(&touched[0]).unwrap() -= 1;
            *counts.get_mut(&touched[1]).unwrap() -= 1;
            *counts.entry(touched[2]).or_insert(0) += 1;
            *counts.entry(touched[3]).or_insert(0) += 1;
            let after = local(&counts);
            if after < before {
                mg.edges[e] = e_new;
                mg.edges[f] = f_new;
                offenses = offenses + after - before;
                stats.swaps += 1;
            } else {
                *counts.get_mut(&touched[2]).unwrap() -= 1;
                *counts.get_mut(&touched[3]).unwrap() -= 1;
                *counts.get_mut(&touched[0]).unwrap() += 1;
                *counts.get_mut(&touched[1]).unwrap() += 1;
            }
        }

        if offenses < before_pass {
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= STALL_PASSES {
                return Err(Error::Rewire(format!(
                    "{offenses} offending edge(s) remain after {STALL_PASSES} passes without \
                     progress ({} swaps in {} passes, {} edges, {} pools)",
                    stats.swaps,
                    stats.passes,
                    mg.edges.len(),
                    pool_members.len()
                )));
            }
        }
    }
    debug_assert_eq!(total_offense(&counts), 0);
    let g = Graph::from_edges(n, mg.edges.iter().copied())?;
    Ok((g, stats))
}
