use std::f64::consts::PI;

use serde::Serialize;

use super::log_log_slope;
use crate::error::{Error, Result};
use crate::graph::{build_laplacian, grounded_laplacian, satisfies_euler_bound, Graph, GraphFamily};
use crate::spectrum::{algebraic_connectivity, family_spectrum, laplacian_spectrum};

/// Absolute tolerance when deciding whether a bound holds.
pub const BOUND_TOL: f64 = 1e-9;

/// Tolerance on the fitted lattice decay exponent.
pub const DECAY_EXPONENT_TOL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// `λ₂ ≤ 8q·w_max/N` on planar graphs.
    Planar,
    /// `λ₂ ≤ π²w_max/(diam + 1)²` on trees.
    Tree,
    /// `λ̄₁ ≤ q·w_max/(N − 1)` for the grounded Laplacian.
    Grounded,
    /// `λ₂ = O(N^{−2/d})` on `d`-dimensional fuzz lattices.
    FuzzLattice,
    /// `λ₂ ≥ 2e(G)(1 − cos(π/N))` with `e(G)` the edge connectivity.
    FiedlerEdgeConnectivity,
    /// `λ₂ ≥ (2/3)c³w_min` for ring fuzzes with `q ≈ cN^{2/3}`.
    NeighborhoodScaling,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Planar => "planar",
            BoundKind::Tree => "tree",
            BoundKind::Grounded => "grounded",
            BoundKind::FuzzLattice => "fuzz-lattice",
            BoundKind::FiedlerEdgeConnectivity => "fiedler-edge-connectivity",
            BoundKind::NeighborhoodScaling => "neighborhood-scaling",
        }
    }
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            BoundKind::Planar,
            BoundKind::Tree,
            BoundKind::Grounded,
            BoundKind::FuzzLattice,
            BoundKind::FiedlerEdgeConnectivity,
            BoundKind::NeighborhoodScaling,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown bound '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDirection {
    /// measured ≤ bound
    Upper,
    /// measured ≥ bound
    Lower,
    /// |measured − bound| ≤ tolerance
    Within(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub direction: BoundDirection,
    pub bound: f64,
    pub measured: f64,
    pub satisfied: bool,
    /// Distance from violation; negative when violated.
    pub slack: f64,
}

impl BoundReport {
    fn new(kind: BoundKind, direction: BoundDirection, bound: f64, measured: f64) -> Self {
        let slack = match direction {
            BoundDirection::Upper => bound - measured,
            BoundDirection::Lower => measured - bound,
            BoundDirection::Within(tol) => tol - (measured - bound).abs(),
        };
        let satisfied = match direction {
            BoundDirection::Within(_) => slack >= 0.0,
            _ => slack >= -BOUND_TOL,
        };
        BoundReport {
            kind,
            direction,
            bound,
            measured,
            satisfied,
            slack,
        }
    }
}

fn require_undirected(g: &Graph, kind: BoundKind) -> Result<()> {
    if g.is_directed() {
        return Err(Error::ClassMismatch {
            bound: kind.name().into(),
            class: "undirected".into(),
        });
    }
    Ok(())
}

fn lambda2(g: &Graph) -> Result<f64> {
    if g.node_count() < 2 {
        return Err(Error::TooFewNodes {
            n: g.node_count(),
            min: 2,
        });
    }
    let spec = laplacian_spectrum(&build_laplacian(g))?;
    match algebraic_connectivity(&spec) {
        Ok(l) => Ok(l.re),
        Err(Error::ZeroMultiplicity(_)) => Err(Error::Disconnected),
        Err(e) => Err(e),
    }
}

/// Planar graphs: `λ₂ ≤ 8q·w_max/N` with `q` the largest neighborhood.
///
/// Planarity itself is not decided here; graphs violating `|E| ≤ 3N − 6`
/// are rejected, and generated planar families are checked for a straight
/// line embedding separately.
pub fn planar_bound(g: &Graph) -> Result<BoundReport> {
    require_undirected(g, BoundKind::Planar)?;
    if !satisfies_euler_bound(g) {
        return Err(Error::ClassMismatch {
            bound: BoundKind::Planar.name().into(),
            class: "planar".into(),
        });
    }
    let n = g.node_count() as f64;
    let bound = 8.0 * g.max_neighborhood() as f64 * g.max_weight() / n;
    Ok(BoundReport::new(BoundKind::Planar, BoundDirection::Upper, bound, lambda2(g)?))
}

/// Trees: `λ₂ ≤ π²w_max/(diam + 1)²`.
pub fn tree_bound(g: &Graph) -> Result<BoundReport> {
    require_undirected(g, BoundKind::Tree)?;
    if !g.is_tree() {
        return Err(Error::ClassMismatch {
            bound: BoundKind::Tree.name().into(),
            class: "tree".into(),
        });
    }
    let diam = g.tree_diameter()? as f64;
    let bound = PI * PI * g.max_weight() / ((diam + 1.0) * (diam + 1.0));
    Ok(BoundReport::new(BoundKind::Tree, BoundDirection::Upper, bound, lambda2(g)?))
}

/// Grounded Laplacian with the given 0-based leader:
/// `λ̄₁ ≤ q·w_max/(N − 1)`.
pub fn grounded_bound(g: &Graph, leader: usize) -> Result<BoundReport> {
    require_undirected(g, BoundKind::Grounded)?;
    if !g.is_weakly_connected() {
        return Err(Error::Disconnected);
    }
    let spec = laplacian_spectrum(&grounded_laplacian(g, leader)?)?;
    let measured = spec.values()[0].re;
    let n = g.node_count() as f64;
    let bound = g.max_neighborhood() as f64 * g.max_weight() / (n - 1.0);
    Ok(BoundReport::new(BoundKind::Grounded, BoundDirection::Upper, bound, measured))
}

/// Lower bound `λ₂ ≥ 2e(G)(1 − cos(π/N))`, with `e(G)` the (weighted)
/// minimum cut.
pub fn edge_connectivity_bound(g: &Graph) -> Result<BoundReport> {
    require_undirected(g, BoundKind::FiedlerEdgeConnectivity)?;
    let measured = lambda2(g)?;
    let n = g.node_count() as f64;
    let bound = 2.0 * g.edge_connectivity()? * (1.0 - (PI / n).cos());
    Ok(BoundReport::new(
        BoundKind::FiedlerEdgeConnectivity,
        BoundDirection::Lower,
        bound,
        measured,
    ))
}

/// Fits the exponent of `λ₂` against `N` over `d`-dimensional `r`-fuzz
/// lattices with the given side lengths and compares it to `−2/d`.
pub fn lattice_decay(d: usize, r: usize, sides: &[usize], weight: f64) -> Result<BoundReport> {
    if d == 0 || sides.len() < 2 {
        return Err(Error::InvalidArgument(
            "decay fit needs d >= 1 and at least two lattice sizes".into(),
        ));
    }
    let family = GraphFamily::LatticeFuzz { d, r, weight };
    let mut ns = Vec::with_capacity(sides.len());
    let mut l2 = Vec::with_capacity(sides.len());
    for &m in sides {
        let n = m.checked_pow(d as u32).ok_or_else(|| {
            Error::InvalidArgument(format!("lattice side {m} overflows in dimension {d}"))
        })?;
        let spec = family_spectrum(&family, n)?;
        ns.push(n as f64);
        l2.push(algebraic_connectivity(&spec)?.re);
    }
    let slope = log_log_slope(&ns, &l2)
        .ok_or_else(|| Error::InvalidArgument("lattice sizes must be distinct".into()))?;
    Ok(BoundReport::new(
        BoundKind::FuzzLattice,
        BoundDirection::Within(DECAY_EXPONENT_TOL),
        -2.0 / d as f64,
        slope,
    ))
}

/// Dispatches the graph-level bounds. `leader` is needed for
/// [`BoundKind::Grounded`] only.
pub fn check_bound(kind: BoundKind, g: &Graph, leader: Option<usize>) -> Result<BoundReport> {
    match kind {
        BoundKind::Planar => planar_bound(g),
        BoundKind::Tree => tree_bound(g),
        BoundKind::Grounded => grounded_bound(g, leader.unwrap_or(0)),
        BoundKind::FiedlerEdgeConnectivity => edge_connectivity_bound(g),
        BoundKind::FuzzLattice | BoundKind::NeighborhoodScaling => Err(Error::InvalidArgument(format!(
            "bound {kind} is evaluated over a family, not a single graph"
        ))),
    }
}
