use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

/// Lower bound on `σ_col`.
pub const SIGMA_FLOOR: f64 = 1e-6;

/// Undirected edge between superpixels `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// All-pairs geodesic distances and the color-edge spread `σ_col`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicMatrix {
    n: usize,
    dist: Vec<f64>,
    sigma: f64,
}

impl GeodesicMatrix {
    pub fn new(n: usize, dist: Vec<f64>, sigma: f64) -> Self {
        assert_eq!(dist.len(), n * n);
        Self { n, dist, sigma }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, q: usize, j: usize) -> f64 {
        self.dist[q * self.n + j]
    }

    pub fn row(&self, q: usize) -> &[f64] {
        &self.dist[q * self.n..(q + 1) * self.n]
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

#[derive(Debug, PartialEq)]
struct State {
    cost: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| self.node.cmp(&other.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn adjacency(n: usize, edges: &[Edge]) -> Vec<Vec<(usize, f64)>> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.a].push((e.b, e.weight));
        adj[e.b].push((e.a, e.weight));
    }
    adj
}

fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(State {
        cost: 0.0,
        node: source,
    });
    while let Some(State { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        for &(next, w) in &adj[node] {
            let c = cost + w;
            if c < dist[next] {
                dist[next] = c;
                heap.push(State { cost: c, node: next });
            }
        }
    }
    dist
}

/// Shortest-path distances between all node pairs of an undirected graph with
/// non-negative weights. Unreachable pairs are `f64::INFINITY`.
pub fn all_pairs_shortest_paths(n: usize, edges: &[Edge]) -> Vec<f64> {
    let adj = adjacency(n, edges);
    let rows: Vec<Vec<f64>> = (0..n).into_par_iter().map(|s| dijkstra(&adj, s)).collect();
    let mut dist = rows.concat();
    // Symmetrize: the two directions can differ in the last bit.
    for q in 0..n {
        for j in q + 1..n {
            let v = dist[q * n + j].min(dist[j * n + q]);
            dist[q * n + j] = v;
            dist[j * n + q] = v;
        }
    }
    dist
}

/// Connected component id of every node.
pub fn components(n: usize, edges: &[Edge]) -> Vec<usize> {
    let adj = adjacency(n, edges);
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &(v, _) in &adj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    comp
}

fn color_distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Bridge edges that join all components, each the minimum-color-distance
/// pair between the growing connected part and the rest.
pub fn bridge_edges(colors: &[[f64; 3]], edges: &[Edge]) -> Vec<Edge> {
    let n = colors.len();
    let comp = components(n, edges);
    let n_comp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut joined = vec![false; n_comp];
    if n_comp > 0 {
        joined[comp[0]] = true;
    }
    let mut bridges = Vec::new();
    for _ in 1..n_comp {
        let mut best: Option<Edge> = None;
        for a in (0..n).filter(|&a| joined[comp[a]]) {
            for b in (0..n).filter(|&b| !joined[comp[b]]) {
                let w = color_distance(&colors[a], &colors[b]);
                if best.map_or(true, |e| w < e.weight) {
                    best = Some(Edge { a, b, weight: w });
                }
            }
        }
        let e = best.expect("an unjoined component exists");
        joined[comp[e.b]] = true;
        bridges.push(e);
    }
    bridges
}

/// Population standard deviation of the edge weights, floored at [`SIGMA_FLOOR`].
pub fn edge_sigma(edges: &[Edge]) -> f64 {
    if edges.is_empty() {
        return SIGMA_FLOOR;
    }
    let n = edges.len() as f64;
    let mean = edges.iter().map(|e| e.weight).sum::<f64>() / n;
    let var = edges.iter().map(|e| (e.weight - mean).powi(2)).sum::<f64>() / n;
    var.sqrt().max(SIGMA_FLOOR)
}
