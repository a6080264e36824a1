//! Scale fragility: where fixed-gain consensus stops working as the network
//! grows, and the connectivity bounds that explain it.

mod angle;
mod bounds;
mod certificate;
mod scan;

pub use angle::{theorem4_angle_check, AngleReport, AngleRow};
pub use bounds::{
    check_bound, edge_connectivity_bound, grounded_bound, lattice_decay, planar_bound, tree_bound, BoundDirection,
    BoundKind, BoundReport, BOUND_TOL,
};
pub use certificate::{ring_fuzz_lambda2, theorem5_certificate, CertificateReport, CertificateRow};
pub use scan::{
    critical_network_size, critical_network_size_with, leader_follower_critical_size, sweep_q_vs_critical_size,
    CriticalSizeResult, LeaderFollowerResult, ScanOptions, ScanPoint, SweepResult, SweepRow,
};

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).map(|f| f.0)
}
