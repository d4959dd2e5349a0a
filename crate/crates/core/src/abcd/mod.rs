//! ABCD benchmark graphs: power-law degrees and community sizes, a mixing
//! parameter that routes a fraction of every node's edges through a
//! community-agnostic background graph, and exact (configuration model) or
//! expected (Chung-Lu) degree preservation.

mod rewire;
mod sampling;

use std::fmt;
use std::str::FromStr;

use log::warn;
use rand::seq::SliceRandom;
use rand::Rng as _;

pub use rewire::{rewire_to_simple, MultiGraph, RewireStats};
pub use sampling::{
    assign_nodes, build_degree_sequence, community_mixing, even_community_volumes, power_law_cdf, sample_community_sizes,
    sample_power_law, sizes_from_fractions, split_degrees, DegreeSplit,
};

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::seed::{stream, Rng};

/// How the mixing parameter is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// One mixing level for every node; large communities also collect
    /// background edges.
    Global,
    /// Mixing adjusted per community so every community has the same
    /// expected internal-edge fraction.
    Local,
}

/// Random-graph mechanism used for community and background graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommunityModel {
    Configuration,
    ChungLu,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Global => "global",
            Variant::Local => "local",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(Variant::Global),
            "local" => Ok(Variant::Local),
            _ => Err(Error::invalid(format!("unknown variant {s:?}"))),
        }
    }
}

impl fmt::Display for CommunityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CommunityModel::Configuration => "configuration",
            CommunityModel::ChungLu => "chung_lu",
        })
    }
}

impl FromStr for CommunityModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "configuration" => Ok(CommunityModel::Configuration),
            "chung_lu" | "chung-lu" => Ok(CommunityModel::ChungLu),
            _ => Err(Error::invalid(format!("unknown community model {s:?}"))),
        }
    }
}

/// Full parameter record of the generator.
#[derive(Clone, Debug, PartialEq)]
pub struct AbcdParams {
    pub n: usize,
    /// Degree power-law exponent.
    pub gamma: f64,
    pub delta_min: usize,
    pub delta_max: usize,
    /// Community-size power-law exponent.
    pub beta: f64,
    pub s_min: usize,
    pub s_max: usize,
    /// Mixing parameter in `[0, 1]`.
    pub xi: f64,
    pub variant: Variant,
    pub community_model: CommunityModel,
    /// Explicit community-size fractions; overrides power-law sizes.
    pub fixed_community_fractions: Option<Vec<f64>>,
    pub seed: u64,
}

/// Community fractions used by the default benchmark.
pub const DEFAULT_FRACTIONS: [f64; 5] = [0.30, 0.25, 0.20, 0.15, 0.10];

/// Natural cut-off `round(n^(1/(gamma-1)))`, capped at `n - 1`.
pub fn natural_cutoff(n: usize, gamma: f64) -> usize {
    ((n as f64).powf(1.0 / (gamma - 1.0)).round() as usize).clamp(1, n.saturating_sub(1).max(1))
}

impl Default for AbcdParams {
    fn default() -> Self {
        AbcdParams {
            n: 10_000,
            gamma: 2.5,
            delta_min: 5,
            delta_max: natural_cutoff(10_000, 2.5),
            beta: 1.5,
            s_min: 50,
            s_max: 1000,
            xi: 0.2,
            variant: Variant::Global,
            community_model: CommunityModel::Configuration,
            fixed_community_fractions: Some(DEFAULT_FRACTIONS.to_vec()),
            seed: 0,
        }
    }
}

impl AbcdParams {
    /// Change `n` and re-derive the maximum degree from the natural cut-off.
    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self.delta_max = natural_cutoff(n, self.gamma);
        self.s_max = self.s_max.min(n);
        self
    }

    /// Change `gamma` and re-derive the maximum degree from the natural cut-off.
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self.delta_max = natural_cutoff(self.n, gamma);
        self
    }

    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Switch to power-law community sizes with exponent `beta`.
    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self.fixed_community_fractions = None;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Invalid(m));
        if self.n < 2 {
            return bad(format!("n = {} must be at least 2", self.n));
        }
        if !(1 <= self.delta_min && self.delta_min <= self.delta_max && self.delta_max < self.n) {
            return bad(format!(
                "need 1 <= delta_min ({}) <= delta_max ({}) <= n - 1 ({})",
                self.delta_min,
                self.delta_max,
                self.n - 1
            ));
        }
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return bad(format!("gamma = {} must exceed 1", self.gamma));
        }
        if !(0.0..=1.0).contains(&self.xi) {
            return bad(format!("xi = {} outside [0, 1]", self.xi));
        }
        match &self.fixed_community_fractions {
            Some(f) => {
                let total: f64 = f.iter().sum();
                if f.is_empty() || f.iter().any(|&x| !(x > 0.0)) || (total - 1.0).abs() > 1e-9 {
                    return bad(format!("community fractions must be positive and sum to 1 (sum {total})"));
                }
            }
            None => {
                if !(self.beta > 1.0 && self.beta.is_finite()) {
                    return bad(format!("beta = {} must exceed 1", self.beta));
                }
                if !(2 <= self.s_min && self.s_min <= self.s_max && self.s_max <= self.n) {
                    return bad(format!(
                        "need 2 <= s_min ({}) <= s_max ({}) <= n ({})",
                        self.s_min, self.s_max, self.n
                    ));
                }
            }
        }
        Ok(())
    }

    /// `key=value` manifest, one parameter per line.
    pub fn to_manifest(&self) -> String {
        let fractions = self
            .fixed_community_fractions
            .as_ref()
            .map(|f| f.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .unwrap_or_else(|| "none".into());
        format!(
            "n={}\ngamma={}\ndelta_min={}\ndelta_max={}\nbeta={}\ns_min={}\ns_max={}\nxi={}\n\
             variant={}\ncommunity_model={}\nfixed_community_fractions={}\nseed={}\n",
            self.n,
            self.gamma,
            self.delta_min,
            self.delta_max,
            self.beta,
            self.s_min,
            self.s_max,
            self.xi,
            self.variant,
            self.community_model,
            fractions,
            self.seed
        )
    }

    /// Inverse of [`AbcdParams::to_manifest`]. Unknown keys are rejected;
    /// missing keys keep their defaults.
    pub fn from_manifest(text: &str) -> Result<Self> {
        let mut p = AbcdParams::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: "expected key=value".into(),
            })?;
            let perr = |e: &dyn fmt::Display| Error::Parse {
                line: i + 1,
                msg: format!("{k}: {e}"),
            };
            let v = v.trim();
            match k.trim() {
                "n" => p.n = v.parse().map_err(|e| perr(&e))?,
                "gamma" => p.gamma = v.parse().map_err(|e| perr(&e))?,
                "delta_min" => p.delta_min = v.parse().map_err(|e| perr(&e))?,
                "delta_max" => p.delta_max = v.parse().map_err(|e| perr(&e))?,
                "beta" => p.beta = v.parse().map_err(|e| perr(&e))?,
                "s_min" => p.s_min = v.parse().map_err(|e| perr(&e))?,
                "s_max" => p.s_max = v.parse().map_err(|e| perr(&e))?,
                "xi" => p.xi = v.parse().map_err(|e| perr(&e))?,
                "variant" => p.variant = v.parse()?,
                "community_model" => p.community_model = v.parse()?,
                "fixed_community_fractions" => {
                    p.fixed_community_fractions = if v == "none" {
                        None
                    } else {
                        Some(
                            v.split(',')
                                .map(|x| x.trim().parse::<f64>().map_err(|e| perr(&e)))
                                .collect::<Result<_>>()?,
                        )
                    }
                }
                "seed" => p.seed = v.parse().map_err(|e| perr(&e))?,
                other => {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: format!("unknown key {other:?}"),
                    })
                }
            }
        }
        Ok(p)
    }
}

/// Non-fatal events recorded during generation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AbcdDiagnostics {
    pub saturated_nodes: usize,
    pub clamped_communities: usize,
    pub rewire: RewireStats,
}

/// A generated graph with its planted communities.
#[derive(Clone, Debug)]
pub struct AbcdGraph {
    pub graph: Graph,
    pub ground_truth: Partition,
    /// Fraction of edges joining different communities.
    pub realized_xi: f64,
    pub degrees: Vec<usize>,
    pub diagnostics: AbcdDiagnostics,
}

/// Fraction of edges whose endpoints lie in different communities.
pub fn mixing_fraction(g: &Graph, p: &Partition) -> f64 {
    if g.m() == 0 {
        return 0.0;
    }
    let inter = g.edges().filter(|&(u, v)| p.label(u) != p.label(v)).count();
    inter as f64 / g.m() as f64
}

fn configuration_edges(nodes: &[usize], stubs_per_node: &[usize], pool: usize, mg: &mut MultiGraph, rng: &mut Rng) {
    let mut stubs: Vec<usize> = Vec::new();
    for &v in nodes {
        stubs.extend(std::iter::repeat_n(v, stubs_per_node[v]));
    }
    debug_assert_eq!(stubs.len() % 2, 0);
    stubs.shuffle(rng);
    for pair in stubs.chunks_exact(2) {
        mg.push(pair[0], pair[1], pool);
    }
}

fn chung_lu_edges(nodes: &[usize], weights: &[usize], pool: usize, mg: &mut MultiGraph, rng: &mut Rng) {
    let total: f64 = nodes.iter().map(|&v| weights[v] as f64).sum();
    if total == 0.0 {
        return;
    }
    let active: Vec<usize> = nodes.iter().copied().filter(|&v| weights[v] > 0).collect();
    for (i, &u) in active.iter().enumerate() {
        let wu = weights[u] as f64;
        for &v in &active[i + 1..] {
            let p = (wu * weights[v] as f64 / total).min(1.0);
            if rng.random::<f64>() < p {
                mg.push(u, v, pool);
            }
        }
    }
}

/// Generate one ABCD graph. Deterministic given `params.seed`.
pub fn generate_abcd(params: &AbcdParams) -> Result<AbcdGraph> {
    params.validate()?;
    let seed = params.seed;
    let mut degrees = build_degree_sequence(params, &mut stream(seed, &[0]))?;
    let sizes = match &params.fixed_community_fractions {
        Some(f) => sizes_from_fractions(params.n, f)?,
        None => sample_community_sizes(params, &mut stream(seed, &[1]))?,
    };
    let (partition, saturated) = assign_nodes(&degrees, &sizes, params.xi, &mut stream(seed, &[2]))?;
    if params.xi == 0.0 {
        let k = even_community_volumes(&mut degrees, &partition, params.delta_min, params.delta_max);
        if k > 0 {
            log::info!("xi = 0: adjusted {k} degree(s) by one to even out community volumes");
        }
    }
    let split = split_degrees(&degrees, &partition, params.xi, params.variant, &mut stream(seed, &[3]))?;

    let mut edge_rng = stream(seed, &[4]);
    let mut mg = MultiGraph::new(params.n);
    let members = partition.members();
    let background_pool = partition.ell();
    for (c, nodes) in members.iter().enumerate() {
        match params.community_model {
            CommunityModel::Configuration => configuration_edges(nodes, &split.internal, c, &mut mg, &mut edge_rng),
            CommunityModel::ChungLu => chung_lu_edges(nodes, &split.internal, c, &mut mg, &mut edge_rng),
        }
    }
    let everyone: Vec<usize> = (0..params.n).collect();
    match params.community_model {
        CommunityModel::Configuration => {
            configuration_edges(&everyone, &split.background, background_pool, &mut mg, &mut edge_rng)
        }
        CommunityModel::ChungLu => chung_lu_edges(&everyone, &split.background, background_pool, &mut mg, &mut edge_rng),
    }

    let (graph, rewire) = rewire_to_simple(mg, &mut stream(seed, &[5]))?;
    if params.community_model == CommunityModel::Configuration && graph.degree_sequence() != degrees {
        warn!("configuration model output lost degree; this indicates a rewiring bug");
    }
    let realized_xi = mixing_fraction(&graph, &partition);
    Ok(AbcdGraph {
        graph,
        ground_truth: partition,
        realized_xi,
        degrees,
        diagnostics: AbcdDiagnostics {
            saturated_nodes: saturated,
            clamped_communities: split.clamped,
            rewire,
        },
    })
}
