use super::Graph;
use crate::error::{Error, Result};

/// Largest graph accepted by the exhaustive Cheeger search (2^N subsets).
pub const CHEEGER_MAX_NODES: usize = 20;

/// Minimizing subset of the isoperimetric ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct CheegerCut {
    pub value: f64,
    /// 0-based members of the minimizing set `X`.
    pub set: Vec<usize>,
}

/// Exact Cheeger constant
/// `h = min_X |∂X|_d / min(|X|_d, |X̄|_d)` over proper nonempty `X`, where
/// `∂X` is the set of nodes outside `X` adjacent to `X` and `|W|_d` sums the
/// weighted degrees of `W`.
///
/// The boundary is a node set measured by degree, not an edge cut.
pub fn cheeger_constant(g: &Graph) -> Result<CheegerCut> {
    let n = g.node_count();
    if g.is_directed() {
        return Err(Error::NotUndirected);
    }
    if n > CHEEGER_MAX_NODES {
        return Err(Error::TooLarge {
            n,
            limit: CHEEGER_MAX_NODES,
        });
    }
    if n < 2 {
        return Err(Error::TooFewNodes { n, min: 2 });
    }
    if !g.is_weakly_connected() {
        return Err(Error::Disconnected);
    }

    let adj: Vec<u32> = (0..n)
        .map(|i| g.neighbors(i).iter().fold(0u32, |m, &(j, _)| m | (1 << j)))
        .collect();
    let degree: Vec<f64> = (0..n).map(|i| g.out_degree(i)).collect();

    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let size = 1usize << n;
    // reach[X] = union of neighborhoods of X, vol[X] = |X|_d
    let mut reach = vec![0u32; size];
    let mut vol = vec![0.0f64; size];
    let total: f64 = degree.iter().sum();
    let mut best = CheegerCut {
        value: f64::INFINITY,
        set: Vec::new(),
    };
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        reach[mask] = reach[rest] | adj[low];
        vol[mask] = vol[rest] + degree[low];
        if mask as u32 == full {
            continue;
        }
        let boundary = reach[mask] & !(mask as u32) & full;
        let bvol: f64 = ones(boundary).map(|j| degree[j]).sum();
        let denom = vol[mask].min(total - vol[mask]);
        let ratio = bvol / denom;
        if ratio < best.value {
            best.value = ratio;
            best.set = ones(mask as u32).collect();
        }
    }
    Ok(best)
}

fn ones(mut m: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let j = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(j)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent enumeration: walks subsets from the top mask down and
    /// recomputes boundary and volumes from the edge list each time.
    fn oracle(g: &Graph) -> f64 {
        let n = g.node_count();
        let deg: Vec<f64> = (0..n).map(|i| g.out_degree(i)).collect();
        let mut best = f64::INFINITY;
        for mask in (1..(1u64 << n) - 1).rev() {
            let inside = |i: usize| mask >> i & 1 == 1;
            let mut in_boundary = vec![false; n];
            for e in g.edges() {
                if inside(e.tail) && !inside(e.head) {
                    in_boundary[e.head] = true;
                }
            }
            let b: f64 = (0..n).filter(|&j| in_boundary[j]).map(|j| deg[j]).sum();
            let vx: f64 = (0..n).filter(|&i| inside(i)).map(|i| deg[i]).sum();
            let vc: f64 = (0..n).filter(|&i| !inside(i)).map(|i| deg[i]).sum();
            best = best.min(b / vx.min(vc));
        }
        best
    }

    fn cycle(n: usize) -> Graph {
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        Graph::undirected(n, &pairs).unwrap()
    }

    #[test]
    fn four_cycle() {
        let c = cheeger_constant(&cycle(4)).unwrap();
        assert_eq!(c.value, 1.0);
        assert_eq!(oracle(&cycle(4)), 1.0);
    }

    #[test]
    fn triangle_minimum_is_a_two_node_set() {
        // A single node gives 4/2 = 2, but a pair X = {1, 2} has boundary
        // {3} of degree 2 against min(4, 2) = 2, so the infimum is 1.
        let k3 = cycle(3);
        let c = cheeger_constant(&k3).unwrap();
        assert_eq!(c.value, 1.0);
        assert_eq!(c.set.len(), 2);
        assert_eq!(oracle(&k3), 1.0);
    }

    #[test]
    fn barbell_cut_at_bridge() {
        let g = Graph::undirected(
            6,
            &[
                (0, 1, 1.0),
                (1, 2, 1.0),
                (2, 0, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (5, 3, 1.0),
                (2, 3, 1.0),
            ],
        )
        .unwrap();
        let c = cheeger_constant(&g).unwrap();
        assert!(c.value < 1.0);
        assert!((c.value - 3.0 / 7.0).abs() < 1e-15);
        let mut side = c.set.clone();
        side.sort();
        assert!(side == vec![0, 1, 2] || side == vec![3, 4, 5]);
        assert_eq!(oracle(&g), c.value);
    }

    #[test]
    fn refuses_large_directed_or_disconnected() {
        assert!(matches!(
            cheeger_constant(&cycle(21)),
            Err(Error::TooLarge { n: 21, limit: 20 })
        ));
        let two = Graph::undirected(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(cheeger_constant(&two), Err(Error::Disconnected));
        let dir = Graph::new(2, vec![super::super::Edge::new(0, 1, 1.0)]).unwrap();
        assert_eq!(cheeger_constant(&dir), Err(Error::NotUndirected));
    }
}
