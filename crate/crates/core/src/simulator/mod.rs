//! Time-domain integration of the closed loop
//! `ξ̇ = 𝒜ξ`, `ξ = [x⁽⁰⁾; x⁽¹⁾; …; x⁽ⁿ⁻¹⁾]`.
//!
//! State index `k·N + i` holds derivative `k` of agent `i`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{build_laplacian, grounded_laplacian, Graph};
use crate::stability::GainSet;

/// Largest state dimension for which the exact matrix-exponential solution
/// is offered.
pub const EXPM_MAX_DIM: usize = 64;

/// Largest state dimension for which the step-size check computes the
/// exact spectral radius; above it the row-sum norm is used.
const EXACT_RADIUS_MAX_DIM: usize = 240;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Pure relative feedback on the full Laplacian.
    Leaderless,
    /// Grounded Laplacian; the leader's state is pinned at zero.
    LeaderFollower,
    /// Relative plus absolute feedback on the full Laplacian.
    AbsoluteFeedback,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Leaderless => "leaderless",
            Variant::LeaderFollower => "leader-follower",
            Variant::AbsoluteFeedback => "absolute-feedback",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopSystem {
    /// Dense `(N·n) × (N·n)` state matrix.
    pub matrix: DMatrix<f64>,
    /// The Laplacian (or grounded Laplacian) the system was built from.
    pub laplacian: DMatrix<f64>,
    pub gains: GainSet,
    pub order: usize,
    /// Number of simulated agents (`N − 1` for leader-follower).
    pub agents: usize,
    pub variant: Variant,
    /// 0-based leader index in the original graph.
    pub leader: Option<usize>,
}

impl ClosedLoopSystem {
    pub fn dim(&self) -> usize {
        self.agents * self.order
    }

    /// `𝒜ξ` using the block structure: shifted channels plus the bottom row
    /// `−Σ_k (a_k L + a_kᵃᵇˢ I) x⁽ᵏ⁾`.
    pub fn rhs(&self, x: &[f64], out: &mut [f64]) {
        let (n, m) = (self.order, self.agents);
        out[..(n - 1) * m].copy_from_slice(&x[m..n * m]);
        let bottom = &mut out[(n - 1) * m..];
        bottom.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..n {
            let a = self.gains.a(k);
            let a_abs = if self.variant == Variant::AbsoluteFeedback {
                self.gains.a_abs(k)
            } else {
                0.0
            };
            let xk = &x[k * m..(k + 1) * m];
            for (i, b) in bottom.iter_mut().enumerate() {
                let lx: f64 = (0..m).map(|j| self.laplacian[(i, j)] * xk[j]).sum();
                *b -= a * lx + a_abs * xk[i];
            }
        }
    }
}

/// Assembles `𝒜` for `g`. `leader` (0-based) is required for
/// [`Variant::LeaderFollower`] and rejected otherwise.
pub fn build_system(g: &Graph, gains: &GainSet, variant: Variant, leader: Option<usize>) -> Result<ClosedLoopSystem> {
    let laplacian = match (variant, leader) {
        (Variant::LeaderFollower, Some(l)) => grounded_laplacian(g, l)?.matrix,
        (Variant::LeaderFollower, None) => {
            return Err(Error::InvalidArgument("leader-follower system needs a leader".into()))
        }
        (_, Some(_)) => {
            return Err(Error::InvalidArgument(format!(
                "a leader only applies to leader-follower systems, not {}",
                variant.name()
            )))
        }
        (_, None) => build_laplacian(g).matrix,
    };
    if variant != Variant::AbsoluteFeedback && gains.has_absolute() {
        return Err(Error::InvalidArgument(format!(
            "absolute gains given for a {} system",
            variant.name()
        )));
    }
    let n = gains.order();
    let m = laplacian.nrows();
    let mut a = DMatrix::zeros(n * m, n * m);
    for k in 0..n - 1 {
        for i in 0..m {
            a[(k * m + i, (k + 1) * m + i)] = 1.0;
        }
    }
    for k in 0..n {
        let a_abs = if variant == Variant::AbsoluteFeedback { gains.a_abs(k) } else { 0.0 };
        for i in 0..m {
            for j in 0..m {
                a[((n - 1) * m + i, k * m + j)] = -gains.a(k) * laplacian[(i, j)];
            }
            a[((n - 1) * m + i, k * m + i)] -= a_abs;
        }
    }
    Ok(ClosedLoopSystem {
        matrix: a,
        laplacian,
        gains: gains.clone(),
        order: n,
        agents: m,
        variant,
        leader,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorMode {
    /// `max_i |x_i⁽ᵏ⁾ − x₁⁽ᵏ⁾|`
    RelativeToFirst,
    /// `max_i |x_i⁽ᵏ⁾ − mean_j x_j⁽ᵏ⁾|`
    DeviationFromMean,
    /// `max_i |x_i⁽ᵏ⁾|`, the distance to a leader pinned at zero.
    AgainstLeader,
}

impl ErrorMode {
    pub fn for_variant(variant: Variant) -> Self {
        match variant {
            Variant::LeaderFollower => ErrorMode::AgainstLeader,
            _ => ErrorMode::DeviationFromMean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub h: f64,
    pub horizon: f64,
    /// Stop when `‖ξ‖∞ > divergence_threshold · max(1, ‖ξ₀‖∞)`.
    pub divergence_threshold: f64,
    /// Stop when the consensus error stays below this for
    /// [`CONVERGED_STEPS`] consecutive steps.
    pub convergence_tol: f64,
    /// Consensus error used for the convergence test; `None` picks
    /// [`ErrorMode::for_variant`].
    pub error_mode: Option<ErrorMode>,
    /// Keep every `sample_every`-th step (the last step is always kept).
    pub sample_every: usize,
}

pub const CONVERGED_STEPS: usize = 10;

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            h: 0.01,
            horizon: 300.0,
            divergence_threshold: 1e6,
            convergence_tol: 1e-8,
            error_mode: None,
            sample_every: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    Horizon,
    Converged,
    Diverged,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::Horizon => "horizon",
            Termination::Converged => "converged",
            Termination::Diverged => "diverged",
        }
    }
}

/// Snapshots `ξ(t_k)` on a grid of multiples of the step `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub h: f64,
    pub agents: usize,
    pub order: usize,
    times: Vec<f64>,
    states: Vec<f64>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len() / self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.agents * self.order
    }

    pub fn time(&self, snapshot: usize) -> f64 {
        self.times[snapshot]
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Time covered by the snapshots.
    pub fn span(&self) -> f64 {
        self.time(self.len().saturating_sub(1))
    }

    pub fn state(&self, step: usize) -> &[f64] {
        let d = self.dim();
        &self.states[step * d..(step + 1) * d]
    }

    pub fn final_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    /// `x_i⁽ᵏ⁾(t)` over all snapshots; `i` and `k` are 0-based.
    pub fn channel(&self, agent: usize, k: usize) -> Vec<f64> {
        let idx = k * self.agents + agent;
        (0..self.len()).map(|s| self.state(s)[idx]).collect()
    }

    /// `t` then `x{i}_d{k}` columns, derivative-major and agent-minor,
    /// `i` 1-based. Every `stride`-th snapshot is written, plus the last.
    pub fn to_csv(&self, stride: usize) -> String {
        let stride = stride.max(1);
        let mut out = String::from("t");
        for k in 0..self.order {
            for i in 1..=self.agents {
                let _ = write!(out, ",x{i}_d{k}");
            }
        }
        out.push('\n');
        let last = self.len().saturating_sub(1);
        for s in (0..self.len()).filter(|s| s % stride == 0 || *s == last) {
            let _ = write!(out, "{}", self.time(s));
            for v in self.state(s) {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

fn state_error(x: &[f64], agents: usize, order: usize, mode: ErrorMode) -> f64 {
    let mut err: f64 = 0.0;
    for k in 0..order {
        let xs = &x[k * agents..(k + 1) * agents];
        let reference = match mode {
            ErrorMode::RelativeToFirst => xs[0],
            ErrorMode::DeviationFromMean => xs.iter().sum::<f64>() / agents as f64,
            ErrorMode::AgainstLeader => 0.0,
        };
        err = xs.iter().fold(err, |e, v| e.max((v - reference).abs()));
    }
    err
}

/// Consensus error at every snapshot, maximized over agents and channels.
pub fn consensus_error(traj: &Trajectory, mode: ErrorMode) -> Vec<f64> {
    (0..traj.len())
        .map(|s| state_error(traj.state(s), traj.agents, traj.order, mode))
        .collect()
}

/// Spectral radius of `𝒜`, or an upper bound for large systems.
fn spectral_radius_estimate(sys: &ClosedLoopSystem) -> f64 {
    if sys.dim() <= EXACT_RADIUS_MAX_DIM {
        if let Some(schur) = nalgebra::Schur::try_new(sys.matrix.clone(), f64::EPSILON, 100 * sys.dim().max(10)) {
            return schur.complex_eigenvalues().iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
    }
    sys.matrix
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Fixed-step classical Runge–Kutta integration from `xi0`.
pub fn integrate(sys: &ClosedLoopSystem, xi0: &[f64], options: &IntegrateOptions) -> Result<Trajectory> {
    let dim = sys.dim();
    if xi0.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "initial state has length {}, system dimension is {dim}",
            xi0.len()
        )));
    }
    let h = options.h;
    if !(h > 0.0 && h.is_finite()) || !(options.horizon >= 0.0) {
        return Err(Error::InvalidArgument("step h must be positive and horizon nonnegative".into()));
    }
    let radius = spectral_radius_estimate(sys);
    if h * radius > 2.5 {
        log::warn!("h·ρ(A) = {:.3} exceeds 2.5; the integration may be inaccurate or unstable", h * radius);
    }
    let mode = options.error_mode.unwrap_or(ErrorMode::for_variant(sys.variant));
    let steps = (options.horizon / h).round() as usize;
    let scale = xi0.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let limit = options.divergence_threshold * scale;

    let every = options.sample_every.max(1);
    let mut times = vec![0.0];
    let mut states = Vec::with_capacity(dim * (steps / every + 2).min(1 << 22));
    states.extend_from_slice(xi0);
    let mut x = xi0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let mut tmp = vec![0.0; dim];
    let mut below = 0;
    let mut termination = Termination::Horizon;
    for step in 1..=steps {
        sys.rhs(&x, &mut k1);
        for i in 0..dim {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        sys.rhs(&tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        sys.rhs(&tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = x[i] + h * k3[i];
        }
        sys.rhs(&tmp, &mut k4);
        for i in 0..dim {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: step as f64 * h });
        }
        if x.iter().any(|v| v.abs() > limit) {
            termination = Termination::Diverged;
        } else if state_error(&x, sys.agents, sys.order, mode) < options.convergence_tol {
            below += 1;
            if below >= CONVERGED_STEPS {
                termination = Termination::Converged;
            }
        } else {
            below = 0;
        }
        let done = termination != Termination::Horizon;
        if done || step % every == 0 || step == steps {
            times.push(step as f64 * h);
            states.extend_from_slice(&x);
        }
        if done {
            break;
        }
    }
    Ok(Trajectory {
        h,
        agents: sys.agents,
        order: sys.order,
        times,
        states,
        termination,
    })
}

/// `e^{𝒜t} ξ₀` by the matrix exponential; an oracle for small systems.
pub fn exact_state(sys: &ClosedLoopSystem, xi0: &[f64], t: f64) -> Result<Vec<f64>> {
    let dim = sys.dim();
    if dim > EXPM_MAX_DIM {
        return Err(Error::MatrixTooLarge {
            dim,
            limit: EXPM_MAX_DIM,
        });
    }
    let e = (&sys.matrix * t).exp();
    Ok((e * DVector::from_column_slice(xi0)).iter().copied().collect())
}

/// Zero positions and velocities with seeded accelerations in `[−1, 1]`
/// (derivative 2, or the top derivative when `order < 3`).
pub fn random_acceleration_state(agents: usize, order: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = order.min(3) - 1;
    let mut x = vec![0.0; agents * order];
    for v in &mut x[k * agents..(k + 1) * agents] {
        *v = rng.gen_range(-1.0..=1.0);
    }
    x
}

/// All zero except derivative `k` of one agent (0-based), set to `value`.
pub fn step_state(agents: usize, order: usize, agent: usize, k: usize, value: f64) -> Result<Vec<f64>> {
    if agent >= agents || k >= order {
        return Err(Error::InvalidArgument(format!(
            "step at agent {} derivative {k} outside {agents} agents of order {order}",
            agent + 1
        )));
    }
    let mut x = vec![0.0; agents * order];
    x[k * agents + agent] = value;
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge() -> Graph {
        Graph::undirected(2, &[(0, 1, 1.0)]).unwrap()
    }

    #[test]
    fn first_order_matrix_is_negative_laplacian() {
        let g = Graph::undirected(3, &[(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let sys = build_system(&g, &GainSet::new(vec![0.7]).unwrap(), Variant::Leaderless, None).unwrap();
        assert_eq!(sys.matrix, -0.7 * build_laplacian(&g).matrix);
    }

    #[test]
    fn second_order_template() {
        let sys = build_system(&edge(), &GainSet::new(vec![1.0, 1.0]).unwrap(), Variant::Leaderless, None).unwrap();
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(4, 4, &[
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
            -1.0, 1.0, -1.0, 1.0,
            1.0, -1.0, 1.0, -1.0,
        ]);
        assert_eq!(sys.matrix, expected);
    }

    #[test]
    fn rhs_matches_dense_product() {
        let g = Graph::new(
            4,
            vec![
                crate::graph::Edge::new(0, 1, 0.5),
                crate::graph::Edge::new(1, 2, 1.5),
                crate::graph::Edge::new(2, 3, 0.3),
                crate::graph::Edge::new(3, 0, 2.0),
            ],
        )
        .unwrap();
        let gains = GainSet::with_absolute(vec![0.5, 1.0, 1.2], vec![0.1, 0.0, 0.3]).unwrap();
        let sys = build_system(&g, &gains, Variant::AbsoluteFeedback, None).unwrap();
        let x: Vec<f64> = (0..12).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut out = vec![0.0; 12];
        sys.rhs(&x, &mut out);
        let dense = &sys.matrix * DVector::from_vec(x);
        for (a, b) in out.iter().zip(dense.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn argument_consistency() {
        let gains = GainSet::new(vec![1.0, 1.0]).unwrap();
        assert!(build_system(&edge(), &gains, Variant::LeaderFollower, None).is_err());
        assert!(build_system(&edge(), &gains, Variant::Leaderless, Some(0)).is_err());
        let abs = GainSet::with_absolute(vec![1.0, 1.0], vec![1.0, 0.0]).unwrap();
        assert!(build_system(&edge(), &abs, Variant::Leaderless, None).is_err());
        let lf = build_system(&edge(), &gains, Variant::LeaderFollower, Some(0)).unwrap();
        assert_eq!(lf.agents, 1);
    }

    #[test]
    fn two_agent_first_order_decay() {
        let sys = build_system(&edge(), &GainSet::new(vec![1.0]).unwrap(), Variant::Leaderless, None).unwrap();
        let opts = IntegrateOptions {
            horizon: 2.0,
            convergence_tol: 0.0,
            ..Default::default()
        };
        let traj = integrate(&sys, &[1.0, -1.0], &opts).unwrap();
        assert_eq!(traj.termination, Termination::Horizon);
        assert_eq!(traj.len(), 201);
        assert!((traj.span() - 2.0).abs() < 1e-12);
        let err = consensus_error(&traj, ErrorMode::RelativeToFirst);
        for (s, e) in err.iter().enumerate() {
            let exact = 2.0 * (-2.0 * traj.time(s)).exp();
            assert!((e - exact).abs() < 1e-9, "t = {}", traj.time(s));
        }
    }

    #[test]
    fn identical_states_have_zero_error() {
        let g = Graph::undirected(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let sys = build_system(&g, &GainSet::new(vec![0.5, 1.0, 1.0]).unwrap(), Variant::Leaderless, None).unwrap();
        let x0 = vec![0.3, 0.3, 0.3, -1.0, -1.0, -1.0, 2.0, 2.0, 2.0];
        let opts = IntegrateOptions {
            horizon: 5.0,
            convergence_tol: -1.0,
            ..Default::default()
        };
        let traj = integrate(&sys, &x0, &opts).unwrap();
        for mode in [ErrorMode::RelativeToFirst, ErrorMode::DeviationFromMean] {
            assert!(consensus_error(&traj, mode).iter().all(|&e| e < 1e-12));
        }
    }

    #[test]
    fn converged_and_diverged_terminations() {
        let g = Graph::undirected(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let sys = build_system(&g, &GainSet::new(vec![1.0, 2.0]).unwrap(), Variant::Leaderless, None).unwrap();
        let traj = integrate(&sys, &[1.0, 0.0, -1.0, 0.0, 0.0, 0.0], &IntegrateOptions::default()).unwrap();
        assert_eq!(traj.termination, Termination::Converged);

        // λ₂ = 2 far below a₀/(a₁a₂) = 100
        let g2 = edge();
        let sys = build_system(&g2, &GainSet::new(vec![1.0, 0.1, 0.1]).unwrap(), Variant::Leaderless, None).unwrap();
        let x0 = step_state(2, 3, 0, 2, 1.0).unwrap();
        let traj = integrate(&sys, &x0, &IntegrateOptions::default()).unwrap();
        assert_eq!(traj.termination, Termination::Diverged);
    }

    #[test]
    fn csv_header_order() {
        let sys = build_system(&edge(), &GainSet::new(vec![1.0, 1.0]).unwrap(), Variant::Leaderless, None).unwrap();
        let opts = IntegrateOptions {
            h: 0.5,
            horizon: 1.0,
            convergence_tol: 0.0,
            ..Default::default()
        };
        let traj = integrate(&sys, &[1.0, 0.0, 0.0, 0.0], &opts).unwrap();
        let csv = traj.to_csv(1);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,x1_d0,x2_d0,x1_d1,x2_d1");
        assert_eq!(lines[1], "0,1,0,0,0");
        assert_eq!(lines.len(), 4);
        assert_eq!(traj.channel(0, 0)[0], 1.0);
    }

    #[test]
    fn strided_snapshots() {
        let sys = build_system(&edge(), &GainSet::new(vec![1.0]).unwrap(), Variant::Leaderless, None).unwrap();
        let opts = IntegrateOptions {
            horizon: 1.0,
            convergence_tol: 0.0,
            sample_every: 30,
            ..Default::default()
        };
        let traj = integrate(&sys, &[1.0, -1.0], &opts).unwrap();
        assert_eq!(traj.len(), 5);
        assert!((traj.time(3) - 0.9).abs() < 1e-12);
        assert!((traj.span() - 1.0).abs() < 1e-12);
        let full = integrate(&sys, &[1.0, -1.0], &IntegrateOptions { sample_every: 1, ..opts }).unwrap();
        assert_eq!(traj.final_state(), full.final_state());
    }

    #[test]
    fn exact_state_oracle() {
        let sys = build_system(&edge(), &GainSet::new(vec![1.0]).unwrap(), Variant::Leaderless, None).unwrap();
        let x = exact_state(&sys, &[1.0, -1.0], 1.0).unwrap();
        assert!((x[0] - (-2f64).exp()).abs() < 1e-12);
        assert!((x[1] + (-2f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn initial_states() {
        let x = random_acceleration_state(4, 3, 7);
        assert!(x[..8].iter().all(|&v| v == 0.0));
        assert!(x[8..].iter().all(|v| (-1.0..=1.0).contains(v) && *v != 0.0));
        assert_eq!(x, random_acceleration_state(4, 3, 7));
        assert!(step_state(2, 2, 2, 0, 1.0).is_err());
    }
}
