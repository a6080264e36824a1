use std::fmt::Write as _;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;

use super::log_log_slope;
use crate::error::{Error, Result};
use crate::graph::{grounded_laplacian, FamilyKind, GraphFamily, NeighborhoodScaling};
use crate::spectrum::{algebraic_connectivity, family_spectrum, laplacian_spectrum};
use crate::stability::{
    grounded_verdict_with, network_verdict_with, GainSet, StabilityStatus, StabilityVerdict, VerdictRoute,
    DEFAULT_MARGINAL_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub route: VerdictRoute,
    pub marginal_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            route: VerdictRoute::Hurwitz,
            marginal_tol: DEFAULT_MARGINAL_TOL,
        }
    }
}

/// One network size of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub n: usize,
    /// `λ₂` for leaderless scans, the smallest grounded eigenvalue for
    /// leader-follower scans.
    pub lambda: Option<Complex64>,
    pub verdict: StabilityVerdict,
    /// Leader-follower scans only: whether the necessary condition
    /// `a_{n−1}a_{n−2} > a_{n−3}(N−1)/(q·w_max)` holds at this size.
    pub necessary_holds: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct CriticalSizeResult {
    pub family: String,
    pub gains: GainSet,
    pub range: (usize, usize),
    /// Smallest scanned `N` whose verdict is not stable.
    pub critical: Option<usize>,
    /// Every scanned size up to and including the critical one.
    pub trace: Vec<ScanPoint>,
}

impl CriticalSizeResult {
    /// The critical size, or [`Error::NoInstability`] when the whole range
    /// was stable.
    pub fn require_critical(&self) -> Result<usize> {
        self.critical.ok_or(Error::NoInstability {
            lo: self.range.0,
            hi: self.range.1,
        })
    }

    pub fn critical_point(&self) -> Option<&ScanPoint> {
        self.critical.and_then(|_| self.trace.last())
    }

    /// Columns `N,lambda_re,lambda_im,status,margin,binding`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,lambda_re,lambda_im,status,margin,binding\n");
        for p in &self.trace {
            let (re, im) = p.lambda.map_or((String::new(), String::new()), |l| (l.re.to_string(), l.im.to_string()));
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                p.n,
                re,
                im,
                p.verdict.status,
                p.verdict.margin,
                p.verdict.binding.name()
            );
        }
        out
    }
}

/// Evaluates `eval` over `sizes` in parallel chunks, keeping points in size
/// order and stopping after the first non-stable one. The answer is the
/// sequential scan's regardless of the thread count.
fn scan_sizes(sizes: &[usize], eval: impl Fn(usize) -> Result<ScanPoint> + Sync) -> Result<(Option<usize>, Vec<ScanPoint>)> {
    let chunk = rayon::current_num_threads().max(1);
    let mut trace = Vec::new();
    for block in sizes.chunks(chunk) {
        let results: Vec<Result<ScanPoint>> = block.par_iter().map(|&n| eval(n)).collect();
        for r in results {
            let point = r?;
            let n = point.n;
            let stable = point.verdict.status == StabilityStatus::Stable;
            trace.push(point);
            if !stable {
                return Ok((Some(n), trace));
            }
        }
    }
    Ok((None, trace))
}

fn compatible_sizes(family: &GraphFamily, range: &RangeInclusive<usize>) -> Vec<usize> {
    range.clone().filter(|&n| family.is_compatible(n)).collect()
}

/// Smallest `N` in `range` at which the leaderless closed loop is not stable,
/// by a linear scan over the family-compatible sizes.
pub fn critical_network_size(
    family: &GraphFamily,
    gains: &GainSet,
    range: RangeInclusive<usize>,
) -> Result<CriticalSizeResult> {
    critical_network_size_with(family, gains, range, &ScanOptions::default())
}

pub fn critical_network_size_with(
    family: &GraphFamily,
    gains: &GainSet,
    range: RangeInclusive<usize>,
    options: &ScanOptions,
) -> Result<CriticalSizeResult> {
    let sizes = compatible_sizes(family, &range);
    let (critical, trace) = scan_sizes(&sizes, |n| {
        let spec = family_spectrum(family, n)?;
        let verdict = network_verdict_with(gains, &spec, options.route, options.marginal_tol)?;
        Ok(ScanPoint {
            n,
            lambda: algebraic_connectivity(&spec).ok(),
            verdict,
            necessary_holds: None,
        })
    })?;
    Ok(CriticalSizeResult {
        family: family.describe(),
        gains: gains.clone(),
        range: (*range.start(), *range.end()),
        critical,
        trace,
    })
}

#[derive(Debug, Clone)]
pub struct LeaderFollowerResult {
    pub scan: CriticalSizeResult,
    pub leader: usize,
    /// First size at which the necessary condition fails, so every larger
    /// size is unstable too. Computed from the family's declared `q` and
    /// `w_max` when it has them, otherwise from the scanned graphs.
    pub necessary_limit: Option<usize>,
}

fn necessary_condition(gains: &GainSet, n: usize, q: usize, w_max: f64) -> bool {
    let k = gains.order();
    gains.a(k - 1) * gains.a(k - 2) * q as f64 * w_max > gains.a(k - 3) * (n as f64 - 1.0)
}

/// Leader-follower scan: every grounded eigenvalue must give a Hurwitz
/// polynomial. `leader` is a 0-based node index.
pub fn leader_follower_critical_size(
    family: &GraphFamily,
    gains: &GainSet,
    leader: usize,
    range: RangeInclusive<usize>,
) -> Result<LeaderFollowerResult> {
    if !family.is_undirected() {
        return Err(Error::NotUndirected);
    }
    if gains.order() < 3 {
        return Err(Error::InvalidGains("leader-follower scans require order n >= 3".into()));
    }
    let options = ScanOptions::default();
    let sizes: Vec<usize> = compatible_sizes(family, &range)
        .into_iter()
        .filter(|&n| n > leader.max(1))
        .collect();
    let (critical, trace) = scan_sizes(&sizes, |n| {
        let g = family.generate(n)?;
        let spec = laplacian_spectrum(&grounded_laplacian(&g, leader)?)?;
        let verdict = grounded_verdict_with(gains, &spec, options.route, options.marginal_tol)?;
        Ok(ScanPoint {
            n,
            lambda: spec.values().first().copied(),
            verdict,
            necessary_holds: Some(necessary_condition(gains, n, g.max_neighborhood(), g.max_weight())),
        })
    })?;
    let declared = |n: usize| Some((family.declared_neighborhood(n)?, family.declared_max_weight()?));
    let necessary_limit = if sizes.first().and_then(|&n| declared(n)).is_some() {
        sizes.iter().copied().find(|&n| {
            declared(n).is_some_and(|(q, w)| !necessary_condition(gains, n, q, w))
        })
    } else {
        trace.iter().find(|p| p.necessary_holds == Some(false)).map(|p| p.n)
    };
    Ok(LeaderFollowerResult {
        scan: CriticalSizeResult {
            family: family.describe(),
            gains: gains.clone(),
            range: (*range.start(), *range.end()),
            critical,
            trace,
        },
        leader,
        necessary_limit,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub q: usize,
    pub order: usize,
    pub critical: Option<usize>,
    pub lambda2_at_critical: Option<f64>,
    pub binding: String,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub kind: FamilyKind,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `log N̄` against `log q` over rows with a
    /// critical size.
    pub exponent: Option<f64>,
}

impl SweepResult {
    /// Columns `q,n,N_bar,lambda2_at_crit,binding_condition`; empty fields
    /// when no critical size was found.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,n,N_bar,lambda2_at_crit,binding_condition\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.q,
                r.order,
                r.critical.map_or(String::new(), |v| v.to_string()),
                r.lambda2_at_critical.map_or(String::new(), |v| v.to_string()),
                r.binding
            );
        }
        out
    }
}

/// Critical size of the ring- or path-fuzz family for each `q` in `q_list`,
/// scanning `N` from 2 to `n_max`.
pub fn sweep_q_vs_critical_size(
    kind: FamilyKind,
    q_list: &[usize],
    gains: &GainSet,
    n_max: usize,
    weight: f64,
) -> Result<SweepResult> {
    let make = |q: usize| match kind {
        FamilyKind::RingFuzz => Ok(GraphFamily::RingFuzz {
            q: NeighborhoodScaling::Fixed(q),
            weight,
        }),
        FamilyKind::PathFuzz => Ok(GraphFamily::PathFuzz {
            q: NeighborhoodScaling::Fixed(q),
            weight,
        }),
        other => Err(Error::InvalidArgument(format!(
            "q sweeps need ring-fuzz or path-fuzz, got {other}"
        ))),
    };
    let mut rows = Vec::with_capacity(q_list.len());
    for &q in q_list {
        let family = make(q)?;
        let result = critical_network_size(&family, gains, 2..=n_max)?;
        let point = result.critical_point();
        rows.push(SweepRow {
            q,
            order: gains.order(),
            critical: result.critical,
            lambda2_at_critical: point.and_then(|p| p.lambda).map(|l| l.re),
            binding: point.map_or("none".to_string(), |p| p.verdict.binding.name()),
        });
    }
    let (x, y): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| r.critical.map(|c| (r.q as f64, c as f64)))
        .unzip();
    Ok(SweepResult {
        kind,
        exponent: log_log_slope(&x, &y),
        rows,
    })
}
