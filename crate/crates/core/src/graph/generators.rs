use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::cmp::Reverse;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Edge, Graph};
use crate::error::{Error, Result};

/// How the neighborhood size `q` of a ring or path fuzz depends on `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NeighborhoodScaling {
    /// Constant `q` (must be even).
    Fixed(usize),
    /// Smallest even integer ≥ `fraction · N`.
    Linear { fraction: f64 },
    /// Smallest even integer ≥ `c · N^exponent`.
    Power { c: f64, exponent: f64 },
}

impl NeighborhoodScaling {
    pub fn q_for(&self, n: usize) -> usize {
        match *self {
            NeighborhoodScaling::Fixed(q) => q,
            NeighborhoodScaling::Linear { fraction } => smallest_even_at_least(fraction * n as f64),
            NeighborhoodScaling::Power { c, exponent } => {
                smallest_even_at_least(c * (n as f64).powf(exponent))
            }
        }
    }
}

/// Smallest even integer `≥ x` (and ≥ 2).
pub(crate) fn smallest_even_at_least(x: f64) -> usize {
    let q = x.ceil().max(2.0) as usize;
    q + q % 2
}

/// Plain family names, as used on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    RingFuzz,
    PathFuzz,
    LatticeFuzz,
    DirectedRing,
    DirectedLattice,
    RandomTree,
    RandomPlanar,
    PermutationExpander,
    CustomSequence,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 9] = [
        FamilyKind::RingFuzz,
        FamilyKind::PathFuzz,
        FamilyKind::LatticeFuzz,
        FamilyKind::DirectedRing,
        FamilyKind::DirectedLattice,
        FamilyKind::RandomTree,
        FamilyKind::RandomPlanar,
        FamilyKind::PermutationExpander,
        FamilyKind::CustomSequence,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::RingFuzz => "ring-fuzz",
            FamilyKind::PathFuzz => "path-fuzz",
            FamilyKind::LatticeFuzz => "lattice-fuzz",
            FamilyKind::DirectedRing => "directed-ring",
            FamilyKind::DirectedLattice => "directed-lattice",
            FamilyKind::RandomTree => "random-tree",
            FamilyKind::RandomPlanar => "random-planar",
            FamilyKind::PermutationExpander => "permutation-expander",
            FamilyKind::CustomSequence => "custom-sequence",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .iter()
            .find(|k| k.name() == s)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family '{s}'")))
    }
}

/// Generator for a sequence of graphs indexed by network size `N`.
///
/// Generation is a pure function of the variant's parameters and `N`.
#[derive(Clone)]
pub enum GraphFamily {
    /// Undirected ring; node `i` connects to `i ± 1, …, i ± q/2 (mod N)`.
    RingFuzz {
        q: NeighborhoodScaling,
        weight: f64,
    },
    /// Like [`GraphFamily::RingFuzz`] without wraparound.
    PathFuzz {
        q: NeighborhoodScaling,
        weight: f64,
    },
    /// Undirected `d`-dimensional periodic `r`-fuzz lattice, `N = M^d`.
    LatticeFuzz { d: usize, r: usize, weight: f64 },
    /// Edges `(i, i − 1)` only.
    DirectedRing { weight: f64 },
    /// Periodic lattice with location-invariant offset weights:
    /// `w_{i, i+k} = w_k` along every lattice direction.
    DirectedLattice { d: usize, offsets: Vec<(i64, f64)> },
    /// Uniform random labelled tree drawn from a Prüfer sequence.
    RandomTree { seed: u64, weights: WeightProfile },
    /// Delaunay triangulation of the first `N` points of a seeded uniform
    /// point stream in the unit square; `G_N` and `G_{N+1}` share `N` points.
    RandomPlanar { seed: u64, weights: WeightProfile },
    /// Union of `perms` uniformly random permutations, symmetrized.
    PermutationExpander { perms: usize, seed: u64 },
    CustomSequence {
        name: String,
        generator: Arc<dyn Fn(usize) -> Result<Graph> + Send + Sync>,
    },
}

/// Edge weights of randomly generated families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightProfile {
    Uniform(f64),
    /// Independent uniform draws from `[lo, hi]`.
    Random { lo: f64, hi: f64 },
}

impl WeightProfile {
    fn max(&self) -> f64 {
        match *self {
            WeightProfile::Uniform(w) => w,
            WeightProfile::Random { hi, .. } => hi,
        }
    }
}

impl fmt::Debug for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFamily::CustomSequence { name, .. } => {
                f.debug_struct("CustomSequence").field("name", name).finish()
            }
            other => write!(f, "{}", other.describe()),
        }
    }
}

impl GraphFamily {
    pub fn kind(&self) -> FamilyKind {
        match self {
            GraphFamily::RingFuzz { .. } => FamilyKind::RingFuzz,
            GraphFamily::PathFuzz { .. } => FamilyKind::PathFuzz,
            GraphFamily::LatticeFuzz { .. } => FamilyKind::LatticeFuzz,
            GraphFamily::DirectedRing { .. } => FamilyKind::DirectedRing,
            GraphFamily::DirectedLattice { .. } => FamilyKind::DirectedLattice,
            GraphFamily::RandomTree { .. } => FamilyKind::RandomTree,
            GraphFamily::RandomPlanar { .. } => FamilyKind::RandomPlanar,
            GraphFamily::PermutationExpander { .. } => FamilyKind::PermutationExpander,
            GraphFamily::CustomSequence { .. } => FamilyKind::CustomSequence,
        }
    }

    /// One-line parameter summary used in reports and CSV headers.
    pub fn describe(&self) -> String {
        match self {
            GraphFamily::RingFuzz { q, weight } => format!("ring-fuzz q={} w={weight}", fmt_q(q)),
            GraphFamily::PathFuzz { q, weight } => format!("path-fuzz q={} w={weight}", fmt_q(q)),
            GraphFamily::LatticeFuzz { d, r, weight } => {
                format!("lattice-fuzz d={d} r={r} w={weight}")
            }
            GraphFamily::DirectedRing { weight } => format!("directed-ring w={weight}"),
            GraphFamily::DirectedLattice { d, offsets } => {
                format!("directed-lattice d={d} offsets={offsets:?}")
            }
            GraphFamily::RandomTree { seed, .. } => format!("random-tree seed={seed}"),
            GraphFamily::RandomPlanar { seed, .. } => format!("random-planar seed={seed}"),
            GraphFamily::PermutationExpander { perms, seed } => {
                format!("permutation-expander perms={perms} seed={seed}")
            }
            GraphFamily::CustomSequence { name, .. } => format!("custom-sequence {name}"),
        }
    }

    /// Whether every member of the family is undirected.
    pub fn is_undirected(&self) -> bool {
        match self {
            GraphFamily::DirectedRing { .. } => false,
            GraphFamily::DirectedLattice { offsets, .. } => offsets_symmetric(offsets),
            GraphFamily::CustomSequence { .. } => false,
            _ => true,
        }
    }

    /// Declared neighborhood bound `q` at size `N`, for families that have one.
    pub fn declared_neighborhood(&self, n: usize) -> Option<usize> {
        match self {
            GraphFamily::RingFuzz { q, .. } | GraphFamily::PathFuzz { q, .. } => Some(q.q_for(n)),
            GraphFamily::LatticeFuzz { d, r, .. } => Some(2 * r * d),
            GraphFamily::DirectedRing { .. } => Some(1),
            GraphFamily::DirectedLattice { d, offsets } => Some(d * offsets.len()),
            GraphFamily::PermutationExpander { perms, .. } => Some(2 * perms),
            _ => None,
        }
    }

    /// Declared weight bound `w_max`, for families that have one.
    pub fn declared_max_weight(&self) -> Option<f64> {
        match self {
            GraphFamily::RingFuzz { weight, .. }
            | GraphFamily::PathFuzz { weight, .. }
            | GraphFamily::LatticeFuzz { weight, .. }
            | GraphFamily::DirectedRing { weight } => Some(*weight),
            GraphFamily::DirectedLattice { offsets, .. } => {
                Some(offsets.iter().map(|o| o.1).fold(0.0, f64::max))
            }
            GraphFamily::RandomTree { weights, .. } | GraphFamily::RandomPlanar { weights, .. } => {
                Some(weights.max())
            }
            GraphFamily::PermutationExpander { .. } => Some(1.0),
            GraphFamily::CustomSequence { .. } => None,
        }
    }

    /// Lattice side length `M` and dimension `d` for periodic families, with
    /// the per-direction offset weights. These families have circulant (or
    /// Kronecker-sum of circulant) Laplacians.
    pub fn circulant_profile(&self, n: usize) -> Option<(usize, usize, Vec<(i64, f64)>)> {
        match self {
            GraphFamily::RingFuzz { q, weight } => {
                let half = (q.q_for(n) / 2) as i64;
                let offsets = (1..=half).flat_map(|k| [(-k, *weight), (k, *weight)]).collect();
                Some((1, n, offsets))
            }
            GraphFamily::DirectedRing { weight } => Some((1, n, vec![(-1, *weight)])),
            GraphFamily::LatticeFuzz { d, r, weight } => {
                let side = lattice_side(n, *d)?;
                let r = *r as i64;
                let offsets = (1..=r).flat_map(|k| [(-k, *weight), (k, *weight)]).collect();
                Some((*d, side, offsets))
            }
            GraphFamily::DirectedLattice { d, offsets } => {
                Some((*d, lattice_side(n, *d)?, offsets.clone()))
            }
            _ => None,
        }
    }

    /// Checks that `N` is a valid size for this family.
    pub fn check_size(&self, n: usize) -> Result<()> {
        let fail = |reason: String| {
            Err(Error::IncompatibleSize {
                family: self.kind().to_string(),
                n,
                reason,
            })
        };
        if n == 0 {
            return fail("N must be positive".into());
        }
        match self {
            GraphFamily::RingFuzz { q, .. } => {
                let q = q.q_for(n);
                if q % 2 != 0 || q == 0 {
                    return fail(format!("q = {q} must be a positive even integer"));
                }
                if q >= n {
                    return fail(format!("q = {q} must be smaller than N"));
                }
            }
            GraphFamily::PathFuzz { q, .. } => {
                let q = q.q_for(n);
                if q % 2 != 0 || q == 0 {
                    return fail(format!("q = {q} must be a positive even integer"));
                }
            }
            GraphFamily::DirectedRing { .. } => {
                if n < 2 {
                    return fail("a ring needs at least 2 nodes".into());
                }
            }
            GraphFamily::LatticeFuzz { d, r, .. } => {
                let Some(m) = lattice_side(n, *d) else {
                    return fail(format!("N must equal M^{d} for an integer M"));
                };
                if 2 * r >= m {
                    return fail(format!("fuzz radius r = {r} requires M > 2r, got M = {m}"));
                }
            }
            GraphFamily::DirectedLattice { d, offsets } => {
                let Some(m) = lattice_side(n, *d) else {
                    return fail(format!("N must equal M^{d} for an integer M"));
                };
                let r = offsets.iter().map(|o| o.0.unsigned_abs() as usize).max().unwrap_or(0);
                if offsets.iter().any(|o| o.0 == 0 || !(o.1 > 0.0)) {
                    return fail("offsets must be nonzero with positive weights".into());
                }
                if 2 * r >= m {
                    return fail(format!("offset radius {r} requires M > 2r, got M = {m}"));
                }
            }
            GraphFamily::PermutationExpander { perms, .. } => {
                if *perms == 0 {
                    return fail("at least one permutation is required".into());
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn is_compatible(&self, n: usize) -> bool {
        self.check_size(n).is_ok()
    }

    pub fn generate(&self, n: usize) -> Result<Graph> {
        self.check_size(n)?;
        match self {
            GraphFamily::RingFuzz { .. }
            | GraphFamily::DirectedRing { .. }
            | GraphFamily::LatticeFuzz { .. }
            | GraphFamily::DirectedLattice { .. } => {
                let (d, m, offsets) = self
                    .circulant_profile(n)
                    .expect("periodic family has a circulant profile");
                let ring = circulant_graph(m, &offsets)?;
                let mut g = ring.clone();
                for _ in 1..d {
                    g = g.cartesian_product(&ring);
                }
                Ok(g)
            }
            GraphFamily::PathFuzz { q, weight } => {
                let half = q.q_for(n) / 2;
                let mut pairs = Vec::new();
                for i in 0..n {
                    for j in (i + 1)..n.min(i + half + 1) {
                        pairs.push((i, j, *weight));
                    }
                }
                Graph::undirected(n, &pairs)
            }
            GraphFamily::RandomTree { seed, weights } => {
                let mut rng = ChaCha8Rng::seed_from_u64(mix(*seed, n as u64));
                let pairs = prufer_tree(n, &mut rng);
                let pairs = assign_weights(&pairs, *weights, &mut rng);
                Graph::undirected(n, &pairs)
            }
            GraphFamily::RandomPlanar { seed, weights } => {
                let points = uniform_points(*seed, n);
                let g = delaunay_graph(&points, 1.0)?;
                let mut rng = ChaCha8Rng::seed_from_u64(mix(*seed ^ 0x9e37_79b9, n as u64));
                let pairs: Vec<_> = g
                    .edges()
                    .iter()
                    .filter(|e| e.tail < e.head)
                    .map(|e| (e.tail, e.head))
                    .collect();
                Graph::undirected(n, &assign_weights(&pairs, *weights, &mut rng))
            }
            GraphFamily::PermutationExpander { perms, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(mix(*seed, n as u64));
                permutation_graph(n, *perms, &mut rng)
            }
            GraphFamily::CustomSequence { generator, .. } => generator(n),
        }
    }
}

fn fmt_q(q: &NeighborhoodScaling) -> String {
    match q {
        NeighborhoodScaling::Fixed(q) => q.to_string(),
        NeighborhoodScaling::Linear { fraction } => format!("{fraction}N"),
        NeighborhoodScaling::Power { c, exponent } => format!("{c}N^{exponent}"),
    }
}

fn offsets_symmetric(offsets: &[(i64, f64)]) -> bool {
    let map: BTreeMap<i64, f64> = offsets.iter().copied().collect();
    map.iter().all(|(k, w)| map.get(&-k) == Some(w))
}

/// Integer `M` with `M^d = N`, if any.
pub(crate) fn lattice_side(n: usize, d: usize) -> Option<usize> {
    if d == 0 {
        return None;
    }
    let guess = (n as f64).powf(1.0 / d as f64).round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&m| m > 0 && m.checked_pow(d as u32) == Some(n))
}

/// 1-d periodic lattice on `m` nodes with edges `(i, i + k mod m)` of weight
/// `w_k`. Offsets that coincide modulo `m` have their weights summed.
fn circulant_graph(m: usize, offsets: &[(i64, f64)]) -> Result<Graph> {
    let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for i in 0..m {
        for &(k, w) in offsets {
            let j = (i as i64 + k).rem_euclid(m as i64) as usize;
            if j != i {
                *merged.entry((i, j)).or_insert(0.0) += w;
            }
        }
    }
    let edges = merged
        .into_iter()
        .map(|((i, j), w)| Edge::new(i, j, w))
        .collect();
    Graph::new(m, edges)
}

fn mix(seed: u64, n: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ n.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn assign_weights(
    pairs: &[(usize, usize)],
    weights: WeightProfile,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, usize, f64)> {
    pairs
        .iter()
        .map(|&(i, j)| {
            let w = match weights {
                WeightProfile::Uniform(w) => w,
                WeightProfile::Random { lo, hi } => rng.gen_range(lo..=hi),
            };
            (i, j, w)
        })
        .collect()
}

/// Edges of a uniformly random labelled tree on `n` nodes, decoded from a
/// random Prüfer sequence.
pub fn prufer_tree<R: Rng>(n: usize, rng: &mut R) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => return Vec::new(),
        2 => return vec![(0, 1)],
        _ => {}
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &s in &seq {
        let Reverse(leaf) = leaves.pop().expect("a Prüfer decode always has a leaf");
        edges.push((leaf.min(s), leaf.max(s)));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.push(Reverse(s));
        }
    }
    let Reverse(u) = leaves.pop().expect("two leaves remain");
    let Reverse(v) = leaves.pop().expect("two leaves remain");
    edges.push((u.min(v), u.max(v)));
    edges
}

/// `count` points drawn uniformly from the unit square. The stream is
/// prefix-stable: the first `k` points do not depend on `count`.
pub fn uniform_points(seed: u64, count: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect()
}

/// Undirected graph on the Delaunay triangulation of `points`, all edges
/// with weight `weight`. Collinear inputs fall back to the path through the
/// points sorted lexicographically.
pub fn delaunay_graph(points: &[(f64, f64)], weight: f64) -> Result<Graph> {
    let n = points.len();
    let pts: Vec<delaunator::Point> = points
        .iter()
        .map(|&(x, y)| delaunator::Point { x, y })
        .collect();
    let tri = delaunator::triangulate(&pts);
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for t in tri.triangles.chunks_exact(3) {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            pairs.insert((a.min(b), a.max(b)));
        }
    }
    if pairs.is_empty() && n >= 2 {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| points[a].partial_cmp(&points[b]).expect("finite points"));
        for w in order.windows(2) {
            pairs.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    let pairs: Vec<_> = pairs.into_iter().map(|(i, j)| (i, j, weight)).collect();
    Graph::undirected(n.max(1), &pairs)
}

/// Symmetrized union of `perms` uniformly random permutations of the node
/// set; self-loops and repeated pairs are dropped, so degrees are ≤ 2·perms.
pub fn permutation_graph<R: Rng>(n: usize, perms: usize, rng: &mut R) -> Result<Graph> {
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut sigma: Vec<usize> = (0..n).collect();
    for _ in 0..perms {
        sigma.shuffle(rng);
        for (i, &j) in sigma.iter().enumerate() {
            if i != j {
                pairs.insert((i.min(j), i.max(j)));
            }
        }
    }
    let pairs: Vec<_> = pairs.into_iter().map(|(i, j)| (i, j, 1.0)).collect();
    Graph::undirected(n, &pairs)
}
