//! Planarity evidence for generated graphs: the Euler edge bound and a
//! straight-line embedding test against known node coordinates.

use super::Graph;

/// `|E| ≤ 3N − 6` for `N ≥ 3` (every simple planar graph satisfies it).
pub fn satisfies_euler_bound(g: &Graph) -> bool {
    let n = g.node_count();
    n < 3 || g.undirected_edge_count() <= 3 * n - 6
}

/// True if drawing every undirected edge as a straight segment between the
/// given coordinates produces no crossings. Segments sharing an endpoint
/// are allowed to touch only at that endpoint.
pub fn is_straight_line_embedding(g: &Graph, coords: &[(f64, f64)]) -> bool {
    assert_eq!(coords.len(), g.node_count(), "one coordinate per node");
    let segs: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .filter(|e| e.tail < e.head)
        .map(|e| (e.tail, e.head))
        .collect();
    for (a, &(p, q)) in segs.iter().enumerate() {
        for &(r, s) in &segs[a + 1..] {
            let shared = [p, q].iter().filter(|v| **v == r || **v == s).count();
            match shared {
                0 => {
                    if segments_intersect(coords[p], coords[q], coords[r], coords[s]) {
                        return false;
                    }
                }
                1 => {
                    // Overlap beyond the common endpoint only happens when the
                    // segments are collinear and point the same way.
                    let (common, u, v) = if p == r || p == s {
                        (p, q, if p == r { s } else { r })
                    } else {
                        (q, p, if q == r { s } else { r })
                    };
                    if collinear_overlap(coords[common], coords[u], coords[v]) {
                        return false;
                    }
                }
                _ => {}
            }
        }
    }
    true
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn on_segment(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> bool {
    p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

fn segments_intersect(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

fn collinear_overlap(o: (f64, f64), u: (f64, f64), v: (f64, f64)) -> bool {
    if orient(o, u, v) != 0.0 {
        return false;
    }
    let dot = (u.0 - o.0) * (v.0 - o.0) + (u.1 - o.1) * (v.1 - o.1);
    dot > 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_with_diagonals() {
        let coords = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        let square =
            Graph::undirected(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap();
        assert!(is_straight_line_embedding(&square, &coords));
        let one_diag = square.add_edge(0, 2, 1.0).unwrap();
        assert!(is_straight_line_embedding(&one_diag, &coords));
        let both = one_diag.add_edge(1, 3, 1.0).unwrap();
        assert!(!is_straight_line_embedding(&both, &coords));
        // K4 is planar and meets the Euler bound with equality.
        assert!(satisfies_euler_bound(&both));
    }

    #[test]
    fn k5_violates_euler_bound() {
        let mut pairs = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                pairs.push((i, j, 1.0));
            }
        }
        assert!(!satisfies_euler_bound(&Graph::undirected(5, &pairs).unwrap()));
    }

    #[test]
    fn overlapping_collinear_edges() {
        let coords = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)];
        let g = Graph::undirected(3, &[(0, 1, 1.0), (0, 2, 1.0)]).unwrap();
        assert!(!is_straight_line_embedding(&g, &coords));
        let ok = Graph::undirected(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert!(is_straight_line_embedding(&ok, &coords));
    }
}
