//! Directed weighted graphs and the structures derived from them.
//!
//! A [`Graph`] stores an edge list plus a per-node out-neighbor index. An
//! edge `(i, j)` points from tail `i` to head `j`, and node `i` uses the
//! state of its out-neighbors `j` in its feedback law. Indices are 0-based in
//! the API and 1-based in every serialized form.

mod cheeger;
mod generators;
mod json;
mod laplacian;
mod planar;

pub use cheeger::{cheeger_constant, CheegerCut, CHEEGER_MAX_NODES};
pub use generators::{
    delaunay_graph, permutation_graph, prufer_tree, uniform_points, FamilyKind, GraphFamily,
    NeighborhoodScaling, WeightProfile,
};
pub use json::GraphJson;
pub use laplacian::{build_laplacian, grounded_laplacian, is_normal, LaplacianKind, LaplacianMatrix};
pub use planar::{is_straight_line_embedding, satisfies_euler_bound};

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};

/// Weighted directed edge, tail → head.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub weight: f64,
}

impl Edge {
    pub fn new(tail: usize, head: usize, weight: f64) -> Self {
        Edge { tail, head, weight }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    out: Vec<Vec<(usize, f64)>>,
    directed: bool,
}

impl Graph {
    /// Builds a graph from directed edges, validating every invariant.
    ///
    /// Edges are stored sorted by `(tail, head)`, so two graphs with the same
    /// edge set compare equal regardless of insertion order.
    pub fn new(n: usize, mut edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewNodes { n, min: 1 });
        }
        for e in &edges {
            validate_edge(n, e)?;
        }
        edges.sort_by(|a, b| (a.tail, a.head).cmp(&(b.tail, b.head)));
        for pair in edges.windows(2) {
            if pair[0].tail == pair[1].tail && pair[0].head == pair[1].head {
                return Err(Error::EdgeExists {
                    tail: pair[0].tail + 1,
                    head: pair[0].head + 1,
                });
            }
        }
        let mut out = vec![Vec::new(); n];
        for e in &edges {
            out[e.tail].push((e.head, e.weight));
        }
        let mut g = Graph {
            n,
            edges,
            out,
            directed: true,
        };
        g.directed = !g.has_symmetric_weights();
        Ok(g)
    }

    /// Builds an undirected graph: each pair `(i, j, w)` becomes the two
    /// directed edges `(i, j)` and `(j, i)` with weight `w`.
    pub fn undirected(n: usize, pairs: &[(usize, usize, f64)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(2 * pairs.len());
        for &(i, j, w) in pairs {
            edges.push(Edge::new(i, j, w));
            edges.push(Edge::new(j, i, w));
        }
        Graph::new(n, edges)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Out-neighbors `N_i` of node `i` with their weights.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.out[i]
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_undirected(&self) -> bool {
        !self.directed
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.out
            .get(i)?
            .iter()
            .find(|(h, _)| *h == j)
            .map(|(_, w)| *w)
    }

    /// Weighted out-degree `d_i⁺`.
    pub fn out_degree(&self, i: usize) -> f64 {
        self.out[i].iter().map(|(_, w)| w).sum()
    }

    /// Weighted in-degree `d_i⁻`.
    pub fn in_degree(&self, i: usize) -> f64 {
        self.edges
            .iter()
            .filter(|e| e.head == i)
            .map(|e| e.weight)
            .sum()
    }

    /// Largest neighborhood size `max_i |N_i|`.
    pub fn max_neighborhood(&self) -> usize {
        self.out.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).fold(0.0, f64::max)
    }

    pub fn min_weight(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| e.weight)
            .fold(f64::INFINITY, f64::min)
    }

    /// Number of undirected edges; only meaningful for undirected graphs.
    pub fn undirected_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.tail < e.head).count()
    }

    pub fn is_balanced(&self, tol: f64) -> bool {
        let mut balance = vec![0.0; self.n];
        for e in &self.edges {
            balance[e.tail] += e.weight;
            balance[e.head] -= e.weight;
        }
        balance.iter().all(|b| b.abs() <= tol)
    }

    fn has_symmetric_weights(&self) -> bool {
        self.edges
            .iter()
            .all(|e| self.weight(e.head, e.tail) == Some(e.weight))
    }

    /// Nodes reachable from `root` following edges tail → head.
    fn reachable_from(&self, root: usize, reverse: bool) -> Vec<bool> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            if reverse {
                adj[e.head].push(e.tail);
            } else {
                adj[e.tail].push(e.head);
            }
        }
        let mut seen = vec![false; self.n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Connectivity of the underlying undirected graph.
    pub fn is_weakly_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.tail].push(e.head);
            adj[e.head].push(e.tail);
        }
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut stack = vec![0];
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// True when some node's information reaches every other node, which is
    /// the condition for a simple zero Laplacian eigenvalue.
    ///
    /// Information flows head → tail (node `i` listens to its out-neighbors),
    /// so the root must reach all nodes along reversed edges.
    pub fn has_spanning_tree(&self) -> bool {
        (0..self.n).any(|r| self.reachable_from(r, true).into_iter().all(|s| s))
    }

    /// Whether the one-way edges (those without an equal-weight reverse)
    /// contain a directed cycle. A directed cycle is necessary for a
    /// non-real Laplacian spectrum.
    pub fn has_directed_cycle(&self) -> bool {
        // Kahn's algorithm on the edges that lack an equal reverse.
        let mut indeg = vec![0usize; self.n];
        let mut adj = vec![Vec::new(); self.n];
        let mut any_oneway = false;
        for e in &self.edges {
            if self.weight(e.head, e.tail) == Some(e.weight) {
                continue;
            }
            any_oneway = true;
            adj[e.tail].push(e.head);
            indeg[e.head] += 1;
        }
        if !any_oneway {
            return false;
        }
        let mut queue: VecDeque<usize> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut removed = 0;
        while let Some(u) = queue.pop_front() {
            removed += 1;
            for &v in &adj[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
        removed < self.n
    }

    /// Connected undirected graph with exactly `N − 1` edges.
    pub fn is_tree(&self) -> bool {
        self.is_undirected() && self.undirected_edge_count() + 1 == self.n && self.is_weakly_connected()
    }

    /// Hop distances from `src` in the underlying undirected graph.
    pub fn bfs_distances(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &(v, _) in &self.out[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Diameter of a tree by double BFS (exact on trees only).
    pub fn tree_diameter(&self) -> Result<usize> {
        if !self.is_tree() {
            return Err(Error::ClassMismatch {
                bound: "tree diameter".into(),
                class: "tree".into(),
            });
        }
        let far = |src: usize| {
            self.bfs_distances(src)
                .into_iter()
                .enumerate()
                .map(|(v, d)| (d.unwrap_or(0), v))
                .max()
                .unwrap_or((0, src))
        };
        let (_, a) = far(0);
        let (d, _) = far(a);
        Ok(d)
    }

    /// Exact diameter by BFS from every node; `None` if disconnected.
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for s in 0..self.n {
            for d in self.bfs_distances(s) {
                best = best.max(d?);
            }
        }
        Some(best)
    }

    /// Weighted global minimum cut of an undirected graph (Stoer–Wagner).
    ///
    /// With unit weights this is the edge connectivity `e(G)`.
    pub fn edge_connectivity(&self) -> Result<f64> {
        if self.directed {
            return Err(Error::NotUndirected);
        }
        if self.n < 2 {
            return Ok(0.0);
        }
        let n = self.n;
        let mut w = vec![vec![0.0; n]; n];
        for e in &self.edges {
            w[e.tail][e.head] = e.weight;
        }
        let mut active: Vec<usize> = (0..n).collect();
        let mut best = f64::INFINITY;
        while active.len() > 1 {
            let mut added = vec![false; n];
            let mut conn = vec![0.0f64; n];
            let mut prev = active[0];
            let mut last = active[0];
            for step in 0..active.len() {
                let next = *active
                    .iter()
                    .filter(|&&v| !added[v])
                    .max_by(|&&a, &&b| conn[a].total_cmp(&conn[b]).then(b.cmp(&a)))
                    .expect("unvisited vertex");
                added[next] = true;
                if step == active.len() - 1 {
                    best = best.min(conn[next]);
                    prev = last;
                    last = next;
                } else {
                    last = next;
                }
                for &v in &active {
                    if !added[v] {
                        conn[v] += w[next][v];
                    }
                }
            }
            // merge `last` into `prev`
            for &v in &active {
                w[prev][v] += w[last][v];
                w[v][prev] = w[prev][v];
            }
            w[prev][prev] = 0.0;
            active.retain(|&v| v != last);
        }
        Ok(best)
    }

    /// Adds edge `(i, j)`; for undirected graphs `(j, i)` is added too.
    pub fn add_edge(&self, i: usize, j: usize, w: f64) -> Result<Graph> {
        self.check_node(i)?;
        self.check_node(j)?;
        let mut new = vec![Edge::new(i, j, w)];
        if self.is_undirected() {
            new.push(Edge::new(j, i, w));
        }
        for e in &new {
            if self.weight(e.tail, e.head).is_some() {
                return Err(Error::EdgeExists {
                    tail: e.tail + 1,
                    head: e.head + 1,
                });
            }
        }
        let mut edges = self.edges.clone();
        edges.extend(new);
        Graph::new(self.n, edges)
    }

    /// Multiplies the weight of `(i, j)` (and `(j, i)` if undirected) by
    /// `factor > 0`.
    pub fn scale_edge_weight(&self, i: usize, j: usize, factor: f64) -> Result<Graph> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "scale factor must be positive and finite, got {factor}"
            )));
        }
        self.check_node(i)?;
        self.check_node(j)?;
        if self.weight(i, j).is_none() {
            return Err(Error::EdgeMissing {
                tail: i + 1,
                head: j + 1,
            });
        }
        let symmetric = self.is_undirected();
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let hit = (e.tail == i && e.head == j) || (symmetric && e.tail == j && e.head == i);
                if hit {
                    Edge::new(e.tail, e.head, e.weight * factor)
                } else {
                    *e
                }
            })
            .collect();
        Graph::new(self.n, edges)
    }

    /// Removes `(i, j)` (and `(j, i)` if undirected).
    pub fn remove_edge(&self, i: usize, j: usize) -> Result<Graph> {
        self.check_node(i)?;
        self.check_node(j)?;
        if self.weight(i, j).is_none() {
            return Err(Error::EdgeMissing {
                tail: i + 1,
                head: j + 1,
            });
        }
        let symmetric = self.is_undirected();
        let edges = self
            .edges
            .iter()
            .filter(|e| {
                !((e.tail == i && e.head == j) || (symmetric && e.tail == j && e.head == i))
            })
            .copied()
            .collect();
        Graph::new(self.n, edges)
    }

    /// The mirror graph: undirected, with `ŵ_ij = ŵ_ji = (w_ij + w_ji)/2`
    /// over the edge set and its reversal.
    pub fn mirror(&self) -> Graph {
        let mut sym: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for e in &self.edges {
            *sym.entry((e.tail, e.head)).or_insert(0.0) += 0.5 * e.weight;
            *sym.entry((e.head, e.tail)).or_insert(0.0) += 0.5 * e.weight;
        }
        let edges = sym
            .into_iter()
            .map(|((i, j), w)| Edge::new(i, j, w))
            .collect();
        Graph::new(self.n, edges).expect("mirror of a valid graph is valid")
    }

    /// Cartesian product `self □ other`; node `(u, v)` has index
    /// `u * other.N + v`.
    pub fn cartesian_product(&self, other: &Graph) -> Graph {
        let m = other.n;
        let mut edges = Vec::with_capacity(self.edges.len() * m + other.edges.len() * self.n);
        for e in &self.edges {
            for v in 0..m {
                edges.push(Edge::new(e.tail * m + v, e.head * m + v, e.weight));
            }
        }
        for u in 0..self.n {
            for e in &other.edges {
                edges.push(Edge::new(u * m + e.tail, u * m + e.head, e.weight));
            }
        }
        Graph::new(self.n * m, edges).expect("product of valid graphs is valid")
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::NodeOutOfRange {
                index: i + 1,
                n: self.n,
            });
        }
        Ok(())
    }
}

fn validate_edge(n: usize, e: &Edge) -> Result<()> {
    let bad = |reason: &str| Error::InvalidEdge {
        tail: e.tail + 1,
        head: e.head + 1,
        reason: reason.to_string(),
    };
    if e.tail >= n || e.head >= n {
        return Err(bad(&format!("endpoint outside 1..={n}")));
    }
    if e.tail == e.head {
        return Err(bad("self-loop"));
    }
    if !e.weight.is_finite() {
        return Err(bad("weight is not finite"));
    }
    if e.weight < 0.0 {
        return Err(bad("negative weight"));
    }
    if e.weight == 0.0 {
        return Err(bad("zero weight"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> Graph {
        Graph::undirected(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap()
    }

    #[test]
    fn construction_rejects_bad_edges() {
        assert!(matches!(
            Graph::new(3, vec![Edge::new(1, 1, 1.0)]),
            Err(Error::InvalidEdge { .. })
        ));
        assert!(matches!(
            Graph::new(3, vec![Edge::new(0, 1, 0.0)]),
            Err(Error::InvalidEdge { .. })
        ));
        assert!(matches!(
            Graph::new(3, vec![Edge::new(0, 1, -1.0)]),
            Err(Error::InvalidEdge { .. })
        ));
        assert!(matches!(
            Graph::new(3, vec![Edge::new(0, 3, 1.0)]),
            Err(Error::InvalidEdge { .. })
        ));
        assert!(matches!(
            Graph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(0, 1, 2.0)]),
            Err(Error::EdgeExists { tail: 1, head: 2 })
        ));
        assert!(Graph::new(0, vec![]).is_err());
    }

    #[test]
    fn directed_flag() {
        assert!(c4().is_undirected());
        let g = Graph::new(2, vec![Edge::new(0, 1, 1.0), Edge::new(1, 0, 2.0)]).unwrap();
        assert!(g.is_directed());
    }

    #[test]
    fn mirror_of_undirected_is_itself() {
        assert_eq!(c4().mirror(), c4());
    }

    #[test]
    fn mirror_of_directed_ring_halves_weights() {
        let ring = Graph::new(
            3,
            vec![Edge::new(0, 2, 1.0), Edge::new(1, 0, 1.0), Edge::new(2, 1, 1.0)],
        )
        .unwrap();
        let m = ring.mirror();
        assert!(m.is_undirected());
        assert_eq!(m.edges().len(), 6);
        assert!(m.edges().iter().all(|e| e.weight == 0.5));
    }

    #[test]
    fn spanning_tree_follows_information_flow() {
        // 0 listens to 1, 1 listens to 2: node 2 is the root.
        let path = Graph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)]).unwrap();
        assert!(path.has_spanning_tree());
        // 0 and 2 both listen to 1, but nobody hears 0 and 2 from each other.
        let star_in = Graph::new(3, vec![Edge::new(1, 0, 1.0), Edge::new(1, 2, 1.0)]).unwrap();
        assert!(!star_in.has_spanning_tree());
    }

    #[test]
    fn edit_operations() {
        let g = c4();
        let chord = g.add_edge(0, 2, 1.0).unwrap();
        assert_eq!(chord.undirected_edge_count(), 5);
        assert!(matches!(g.add_edge(0, 1, 1.0), Err(Error::EdgeExists { .. })));
        let scaled = g.scale_edge_weight(0, 1, 2.0).unwrap();
        assert_eq!(scaled.weight(1, 0), Some(2.0));
        assert!(matches!(
            g.scale_edge_weight(0, 2, 2.0),
            Err(Error::EdgeMissing { .. })
        ));
        assert!(g.scale_edge_weight(0, 1, 0.0).is_err());
        let removed = chord.remove_edge(2, 0).unwrap();
        assert_eq!(removed, g);
    }

    #[test]
    fn tree_diameter_and_edge_connectivity() {
        let path = Graph::undirected(5, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)])
            .unwrap();
        assert!(path.is_tree());
        assert_eq!(path.tree_diameter().unwrap(), 4);
        assert_eq!(path.diameter(), Some(4));
        assert_eq!(path.edge_connectivity().unwrap(), 1.0);
        assert_eq!(c4().edge_connectivity().unwrap(), 2.0);
        assert!(c4().tree_diameter().is_err());
        let k4 = Graph::undirected(
            4,
            &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (1, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)],
        )
        .unwrap();
        assert_eq!(k4.edge_connectivity().unwrap(), 3.0);
    }

    #[test]
    fn cartesian_product_of_two_edges_is_a_square() {
        let k2 = Graph::undirected(2, &[(0, 1, 1.0)]).unwrap();
        let q2 = k2.cartesian_product(&k2);
        assert_eq!(q2.node_count(), 4);
        assert_eq!(q2.undirected_edge_count(), 4);
        assert!((0..4).all(|i| q2.neighbors(i).len() == 2));
        assert!(!q2.is_tree());
    }

    #[test]
    fn directed_cycle_detection() {
        assert!(!c4().has_directed_cycle());
        let ring = Graph::new(
            3,
            vec![Edge::new(0, 2, 1.0), Edge::new(1, 0, 1.0), Edge::new(2, 1, 1.0)],
        )
        .unwrap();
        assert!(ring.has_directed_cycle());
        let path = Graph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)]).unwrap();
        assert!(!path.has_directed_cycle());
    }
}
