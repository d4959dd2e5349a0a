use std::collections::VecDeque;

use rayon::prelude::*;

use super::Graph;

/// Descriptive statistics of a graph.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub density: f64,
    pub max_degree: usize,
    pub min_degree: usize,
    pub avg_degree: f64,
    /// `None` when the endpoint degree variance is zero (or there are no edges).
    pub assortativity: Option<f64>,
    pub triangles: u64,
    /// Transitivity: three times the triangle count over connected triples.
    pub clustering: f64,
    pub max_core: usize,
    pub components: usize,
    /// Diameter of the largest connected component.
    pub diameter: usize,
    /// Mean shortest-path length over pairs in the largest component.
    pub avg_path_length: f64,
}

impl GraphStats {
    /// `key=value` lines in field order.
    pub fn to_key_values(&self) -> String {
        let assort = self
            .assortativity
            .map_or_else(|| "null".to_string(), |a| a.to_string());
        format!(
            "nodes={}\nedges={}\ndensity={}\nmax_degree={}\nmin_degree={}\navg_degree={}\n\
             assortativity={}\ntriangles={}\nclustering={}\nmax_core={}\ncomponents={}\n\
             diameter={}\navg_path_length={}\n",
            self.nodes,
            self.edges,
            self.density,
            self.max_degree,
            self.min_degree,
            self.avg_degree,
            assort,
            self.triangles,
            self.clustering,
            self.max_core,
            self.components,
            self.diameter,
            self.avg_path_length
        )
    }
}

/// Triangle count by intersecting sorted forward adjacency lists.
pub fn triangle_count(g: &Graph) -> u64 {
    (0..g.n())
        .into_par_iter()
        .map(|u| {
            let nu = g.neighbors(u);
            let start = nu.partition_point(|&x| x <= u);
            let mut t = 0u64;
            for &v in &nu[start..] {
                let nv = g.neighbors(v);
                let a = &nu[nu.partition_point(|&x| x <= v)..];
                let b = &nv[nv.partition_point(|&x| x <= v)..];
                let (mut i, mut j) = (0, 0);
                while i < a.len() && j < b.len() {
                    match a[i].cmp(&b[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            t += 1;
                            i += 1;
                            j += 1;
                        }
                    }
                }
            }
            t
        })
        .sum()
}

/// Core number of every node (bucket peeling).
pub fn core_numbers(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut deg = g.degree_sequence();
    let max_deg = deg.iter().copied().max().unwrap_or(0);
    let mut bin = vec![0usize; max_deg + 2];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let c = *b;
        *b = start;
        start += c;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg + 1).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;
    for i in 0..n {
        let v = vert[i];
        for &u in g.neighbors(v) {
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    pos[u] = pw;
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg
}

/// Component label per node (labels in order of the smallest member).
pub fn connected_components(g: &Graph) -> (Vec<usize>, usize) {
    let n = g.n();
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = count;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if comp[u] == usize::MAX {
                    comp[u] = count;
                    queue.push_back(u);
                }
            }
        }
        count += 1;
    }
    (comp, count)
}

fn bfs_eccentricity(g: &Graph, s: usize, dist: &mut [u32], queue: &mut VecDeque<usize>) -> (u32, u64) {
    dist.fill(u32::MAX);
    dist[s] = 0;
    queue.clear();
    queue.push_back(s);
    let (mut ecc, mut total) = (0u32, 0u64);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v];
        ecc = ecc.max(dv);
        total += dv as u64;
        for &u in g.neighbors(v) {
            if dist[u] == u32::MAX {
                dist[u] = dv + 1;
                queue.push_back(u);
            }
        }
    }
    (ecc, total)
}

/// Compute all statistics. Path-based fields are exact over the largest
/// connected component (BFS from each of its nodes).
pub fn graph_stats(g: &Graph) -> GraphStats {
    let n = g.n();
    let m = g.m();
    let degrees = g.degree_sequence();
    let density = if n > 1 {
        2.0 * m as f64 / (n as f64 * (n as f64 - 1.0))
    } else {
        0.0
    };

    let assortativity = if m == 0 {
        None
    } else {
        // Each edge contributes both orientations, so both marginals coincide.
        let (mut sx, mut sxx, mut sxy) = (0.0f64, 0.0f64, 0.0f64);
        for (u, v) in g.edges() {
            let (a, b) = (degrees[u] as f64, degrees[v] as f64);
            sx += a + b;
            sxx += a * a + b * b;
            sxy += 2.0 * a * b;
        }
        let cnt = 2.0 * m as f64;
        let mean = sx / cnt;
        let var = sxx / cnt - mean * mean;
        let cov = sxy / cnt - mean * mean;
        if var <= 1e-12 * mean.max(1.0).powi(2) {
            None
        } else {
            Some(cov / var)
        }
    };

    let triangles = triangle_count(g);
    let triples: u64 = degrees
        .iter()
        .map(|&d| (d as u64) * (d as u64).saturating_sub(1) / 2)
        .sum();
    let clustering = if triples == 0 {
        0.0
    } else {
        3.0 * triangles as f64 / triples as f64
    };

    let cores = core_numbers(g);
    let (comp, components) = connected_components(g);
    let mut comp_sizes = vec![0usize; components];
    for &c in &comp {
        comp_sizes[c] += 1;
    }
    let largest = (0..components)
        .max_by_key(|&c| (comp_sizes[c], std::cmp::Reverse(c)))
        .unwrap_or(0);
    let lcc: Vec<usize> = (0..n).filter(|&v| comp[v] == largest).collect();
    let (diameter, path_sum) = lcc
        .par_iter()
        .map_init(
            || (vec![u32::MAX; n], VecDeque::new()),
            |(dist, q), &s| bfs_eccentricity(g, s, dist, q),
        )
        .reduce(|| (0, 0), |a, b| (a.0.max(b.0), a.1 + b.1));
    let k = lcc.len() as f64;
    let avg_path_length = if lcc.len() > 1 {
        path_sum as f64 / (k * (k - 1.0))
    } else {
        0.0
    };

    GraphStats {
        nodes: n,
        edges: m,
        density,
        max_degree: degrees.iter().copied().max().unwrap_or(0),
        min_degree: degrees.iter().copied().min().unwrap_or(0),
        avg_degree: 2.0 * m as f64 / n as f64,
        assortativity,
        triangles,
        clustering,
        max_core: cores.iter().copied().max().unwrap_or(0),
        components,
        diameter: diameter as usize,
        avg_path_length,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_triangles(g: &Graph) -> u64 {
        let n = g.n();
        let mut t = 0;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c) {
                        t += 1;
                    }
                }
            }
        }
        t
    }

    #[test]
    fn k3() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let s = graph_stats(&g);
        assert_eq!(s.density, 1.0);
        assert_eq!(s.triangles, 1);
        assert_eq!(s.clustering, 1.0);
        assert_eq!(s.diameter, 1);
        assert_eq!(s.max_core, 2);
        assert_eq!(s.assortativity, None);
    }

    #[test]
    fn path3() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let s = graph_stats(&g);
        assert_eq!(s.triangles, 0);
        assert_eq!(s.clustering, 0.0);
        assert_eq!(s.diameter, 2);
        // Ordered pairs: 1,1,1,1,2,2 over 6.
        assert!((s.avg_path_length - 4.0 / 3.0).abs() < 1e-15);
        // Star-like: endpoints of degree 1 always meet degree 2.
        assert!((s.assortativity.unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn disconnected_uses_largest_component() {
        // path of 4 plus an isolated edge
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (4, 5)]).unwrap();
        let s = graph_stats(&g);
        assert_eq!(s.components, 2);
        assert_eq!(s.diameter, 3);
        assert_eq!(s.max_core, 1);
    }

    #[test]
    fn core_numbers_on_clique_with_tail() {
        let mut e = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        e.push((3, 4));
        e.push((4, 5));
        let g = Graph::from_edges(6, e).unwrap();
        assert_eq!(core_numbers(&g), vec![3, 3, 3, 3, 1, 1]);
    }

    proptest! {
        #[test]
        fn triangles_match_brute_force(n in 3usize..40, raw in prop::collection::vec((0usize..40, 0usize..40), 0..200)) {
            let edges: Vec<_> = raw.into_iter().map(|(a, b)| (a % n, b % n)).collect();
            let g = Graph::from_edges(n, edges).unwrap();
            prop_assert_eq!(triangle_count(&g), brute_triangles(&g));
            let s = graph_stats(&g);
            prop_assert!((0.0..=1.0).contains(&s.clustering));
        }
    }
}
