use std::fmt::Write as _;

use clap::Subcommand;
use serde_json::json;

use sfl_core::fragility::{
    check_bound, critical_network_size, lattice_decay, leader_follower_critical_size, sweep_q_vs_critical_size,
    theorem4_angle_check, theorem5_certificate, BoundDirection, BoundKind, BoundReport,
};
use sfl_core::graph::{
    build_laplacian, cheeger_constant, grounded_laplacian, FamilyKind, NeighborhoodScaling, WeightProfile,
};
use sfl_core::simulator::{
    build_system, consensus_error, integrate, random_acceleration_state, step_state, ErrorMode, IntegrateOptions,
    Variant,
};
use sfl_core::spectrum::{family_spectrum, laplacian_spectrum};
use sfl_core::stability::{grounded_verdict, network_verdict};
use sfl_core::{ComplexSpectrum, GainSet, Graph, GraphFamily, StabilityVerdict};

use crate::config::{Format, InitialState, Params};
use crate::error::{CliError, CliResult};
use crate::svg::line_chart;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Emit a graph from a family as JSON (or a CSV edge list).
    Gen,
    /// Laplacian eigenvalues of a graph or family member; grounded when
    /// --leader is given.
    Spectrum,
    /// Stability verdict of the networked closed loop for the given gains.
    Verdict,
    /// Smallest network size at which a family loses stability.
    #[command(name = "critical-n")]
    CriticalN,
    /// Critical network size against neighborhood size q for ring or path
    /// fuzzes.
    #[command(name = "sweep-q")]
    SweepQ,
    /// Check a spectral bound on a graph or family.
    Bounds,
    /// Exact Cheeger constant and a minimizing set.
    Cheeger,
    /// Lower bound on λ₂ for ring fuzzes with q growing like cN^{2/3}.
    Theorem5,
    /// Integrate the closed loop and record states.
    Simulate,
    /// Arguments of the Laplacian eigenvalues against an angle ψ.
    #[command(name = "angle-check")]
    AngleCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Gen => "gen",
            Command::Spectrum => "spectrum",
            Command::Verdict => "verdict",
            Command::CriticalN => "critical-n",
            Command::SweepQ => "sweep-q",
            Command::Bounds => "bounds",
            Command::Cheeger => "cheeger",
            Command::Theorem5 => "theorem5",
            Command::Simulate => "simulate",
            Command::AngleCheck => "angle-check",
        }
    }

    pub fn from_name(name: &str) -> CliResult<Self> {
        [
            Command::Gen,
            Command::Spectrum,
            Command::Verdict,
            Command::CriticalN,
            Command::SweepQ,
            Command::Bounds,
            Command::Cheeger,
            Command::Theorem5,
            Command::Simulate,
            Command::AngleCheck,
        ]
        .into_iter()
        .find(|c| c.name() == name)
        .ok_or_else(|| CliError::Usage(format!("unknown command '{name}'")))
    }
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Output {
    /// The CSV/JSON artifact.
    pub body: String,
    /// Result line printed to stdout in place of the body; the body then
    /// goes to --out only.
    pub summary: Option<String>,
    pub svg: Option<String>,
}

pub fn run(command: Command, p: &Params) -> CliResult<Output> {
    match command {
        Command::Gen => gen(p),
        Command::Spectrum => spectrum(p),
        Command::Verdict => verdict(p),
        Command::CriticalN => critical_n(p),
        Command::SweepQ => sweep_q(p),
        Command::Bounds => bounds(p),
        Command::Cheeger => cheeger(p),
        Command::Theorem5 => theorem5(p),
        Command::Simulate => simulate(p),
        Command::AngleCheck => angle_check(p),
    }
}

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn single_n(p: &Params) -> CliResult<usize> {
    match p.n.as_slice() {
        [n] => Ok(*n),
        [] => usage("--N is required"),
        _ => usage("--N takes a single size here"),
    }
}

fn leader_index(p: &Params) -> CliResult<Option<usize>> {
    match p.leader {
        Some(0) => usage("--leader is 1-based"),
        Some(l) => Ok(Some(l - 1)),
        None => Ok(None),
    }
}

fn weights(p: &Params) -> CliResult<WeightProfile> {
    match p.w_range.as_slice() {
        [] => Ok(WeightProfile::Uniform(p.w)),
        [lo, hi] if 0.0 < *lo && lo <= hi => Ok(WeightProfile::Random { lo: *lo, hi: *hi }),
        _ => usage("--w-range needs 0 < lo <= hi"),
    }
}

fn fixed_q(p: &Params) -> CliResult<NeighborhoodScaling> {
    match p.q.as_slice() {
        [q] => Ok(NeighborhoodScaling::Fixed(*q)),
        [] => usage("--q is required for this family"),
        _ => usage("--q takes a single value here"),
    }
}

fn offsets(p: &Params) -> CliResult<Vec<(i64, f64)>> {
    if p.offsets.is_empty() {
        return usage("--offsets is required for directed-lattice");
    }
    p.offsets
        .iter()
        .map(|s| {
            let (k, w) = s
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("offset '{s}' is not k:w")))?;
            let k = k.trim().parse().map_err(|_| CliError::Usage(format!("bad offset '{k}'")))?;
            let w = w.trim().parse().map_err(|_| CliError::Usage(format!("bad weight '{w}'")))?;
            Ok((k, w))
        })
        .collect()
}

fn family_of_kind(kind: FamilyKind, p: &Params) -> CliResult<GraphFamily> {
    Ok(match kind {
        FamilyKind::RingFuzz => GraphFamily::RingFuzz {
            q: fixed_q(p)?,
            weight: p.w,
        },
        FamilyKind::PathFuzz => GraphFamily::PathFuzz {
            q: fixed_q(p)?,
            weight: p.w,
        },
        FamilyKind::LatticeFuzz => GraphFamily::LatticeFuzz {
            d: p.d,
            r: p.r,
            weight: p.w,
        },
        FamilyKind::DirectedRing => GraphFamily::DirectedRing { weight: p.w },
        FamilyKind::DirectedLattice => GraphFamily::DirectedLattice {
            d: p.d,
            offsets: offsets(p)?,
        },
        FamilyKind::RandomTree => GraphFamily::RandomTree {
            seed: p.seed,
            weights: weights(p)?,
        },
        FamilyKind::RandomPlanar => GraphFamily::RandomPlanar {
            seed: p.seed,
            weights: weights(p)?,
        },
        FamilyKind::PermutationExpander => GraphFamily::PermutationExpander {
            perms: p.perms,
            seed: p.seed,
        },
        FamilyKind::CustomSequence => return usage("custom-sequence families are library-only"),
    })
}

fn family_kind(p: &Params) -> CliResult<FamilyKind> {
    let Some(name) = &p.family else {
        return usage("--family is required");
    };
    name.parse().map_err(|e: sfl_core::Error| CliError::Usage(e.to_string()))
}

fn family(p: &Params) -> CliResult<GraphFamily> {
    family_of_kind(family_kind(p)?, p)
}

fn load_graph(p: &Params) -> CliResult<Graph> {
    match (&p.graph, &p.family) {
        (Some(_), Some(_)) => usage("--graph and --family are mutually exclusive"),
        (Some(path), None) => Ok(Graph::from_json(&std::fs::read_to_string(path)?)?),
        (None, _) => Ok(family(p)?.generate(single_n(p)?)?),
    }
}

fn gain_set(p: &Params) -> CliResult<GainSet> {
    if p.gains.is_empty() {
        return usage("--gains is required");
    }
    if let Some(n) = p.n_order {
        if n != p.gains.len() {
            return usage(format!("--n-order {n} does not match {} gains", p.gains.len()));
        }
    }
    let gains = if p.abs_gains.is_empty() {
        GainSet::new(p.gains.clone())?
    } else {
        GainSet::with_absolute(p.gains.clone(), p.abs_gains.clone())?
    };
    Ok(gains)
}

/// Full spectrum, or the grounded one when a leader is set. Families with a
/// closed-form spectrum skip the dense solver.
fn spectrum_of(p: &Params) -> CliResult<ComplexSpectrum> {
    if let Some(leader) = leader_index(p)? {
        let g = load_graph(p)?;
        return Ok(laplacian_spectrum(&grounded_laplacian(&g, leader)?)?);
    }
    if p.graph.is_none() {
        let fam = family(p)?;
        return Ok(family_spectrum(&fam, single_n(p)?)?);
    }
    Ok(laplacian_spectrum(&build_laplacian(&load_graph(p)?))?)
}

fn gen(p: &Params) -> CliResult<Output> {
    let g = load_graph(p)?;
    let body = match p.format {
        Format::Json => {
            let mut s = g.to_json();
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("tail,head,weight\n");
            for e in g.edges() {
                let _ = writeln!(s, "{},{},{}", e.tail + 1, e.head + 1, e.weight);
            }
            s
        }
    };
    Ok(Output {
        body,
        ..Output::default()
    })
}

fn spectrum(p: &Params) -> CliResult<Output> {
    let spec = spectrum_of(p)?;
    let body = match p.format {
        Format::Csv => spec.to_csv(),
        Format::Json => pretty(&json!({
            "zero_tol": spec.zero_tol(),
            "zero_multiplicity": spec.zero_multiplicity(),
            "values": spec.values().iter().map(|v| [v.re, v.im]).collect::<Vec<_>>(),
        })),
    };
    Ok(Output {
        body,
        ..Output::default()
    })
}

fn verdict_csv(v: &StabilityVerdict) -> String {
    let (re, im) = v.witness.map_or((String::new(), String::new()), |w| (w.re.to_string(), w.im.to_string()));
    format!(
        "status,binding,witness_re,witness_im,margin\n{},{},{},{},{}\n",
        v.status.name(),
        v.binding.name(),
        re,
        im,
        v.margin
    )
}

fn verdict(p: &Params) -> CliResult<Output> {
    let gains = gain_set(p)?;
    let spec = spectrum_of(p)?;
    let v = if p.leader.is_some() {
        grounded_verdict(&gains, &spec)?
    } else {
        network_verdict(&gains, &spec)?
    };
    let body = match p.format {
        Format::Csv => verdict_csv(&v),
        Format::Json => pretty(&v.to_json_value()),
    };
    log::info!("verdict = {}", v.status.name());
    Ok(Output {
        body,
        ..Output::default()
    })
}

fn critical_n(p: &Params) -> CliResult<Output> {
    let fam = family(p)?;
    let gains = gain_set(p)?;
    let lo = match p.n.as_slice() {
        [] => 2,
        [n] => *n,
        _ => return usage("--N takes a single starting size here"),
    };
    if lo > p.n_max {
        return usage(format!("--N {lo} exceeds --N-max {}", p.n_max));
    }
    let result = match leader_index(p)? {
        Some(leader) => leader_follower_critical_size(&fam, &gains, leader, lo..=p.n_max)?.scan,
        None => critical_network_size(&fam, &gains, lo..=p.n_max)?,
    };
    let summary = match result.critical {
        Some(n) => format!("N_bar = {n}"),
        None => format!("N_bar = none (N <= {})", p.n_max),
    };
    let body = match p.format {
        Format::Csv => result.to_csv(),
        Format::Json => pretty(&json!({
            "family": result.family,
            "N_bar": result.critical,
            "range": [result.range.0, result.range.1],
            "trace": result.trace.iter().map(|pt| json!({
                "N": pt.n,
                "lambda": pt.lambda.map(|l| [l.re, l.im]),
                "verdict": pt.verdict.to_json_value(),
            })).collect::<Vec<_>>(),
        })),
    };
    let series: Vec<(f64, f64)> = result
        .trace
        .iter()
        .filter_map(|pt| pt.lambda.map(|l| (pt.n as f64, l.re)))
        .collect();
    Ok(Output {
        body,
        summary: Some(summary),
        svg: Some(line_chart(&result.family, "N", "Re lambda", &series)),
    })
}

fn sweep_q(p: &Params) -> CliResult<Output> {
    let kind = family_kind(p)?;
    if p.q.is_empty() {
        return usage("--q needs a list of neighborhood sizes");
    }
    let gains = gain_set(p)?;
    let result = sweep_q_vs_critical_size(kind, &p.q, &gains, p.n_max, p.w)?;
    let body = match p.format {
        Format::Csv => result.to_csv(),
        Format::Json => pretty(&json!({
            "family": kind.name(),
            "exponent": result.exponent,
            "rows": result.rows.iter().map(|r| json!({
                "q": r.q,
                "n": r.order,
                "N_bar": r.critical,
                "lambda2_at_crit": r.lambda2_at_critical,
                "binding": r.binding,
            })).collect::<Vec<_>>(),
        })),
    };
    let series: Vec<(f64, f64)> = result
        .rows
        .iter()
        .filter_map(|r| r.critical.map(|c| (r.q as f64, c as f64)))
        .collect();
    if let Some(e) = result.exponent {
        log::info!("fitted exponent = {e}");
    }
    Ok(Output {
        body,
        summary: None,
        svg: Some(line_chart(kind.name(), "q", "N_bar", &series)),
    })
}

fn direction_name(d: BoundDirection) -> &'static str {
    match d {
        BoundDirection::Upper => "upper",
        BoundDirection::Lower => "lower",
        BoundDirection::Within(_) => "within",
    }
}

fn bound_output(report: &BoundReport, format: Format) -> String {
    match format {
        Format::Csv => format!(
            "bound,direction,bound_value,measured,satisfied,slack\n{},{},{},{},{},{}\n",
            report.kind,
            direction_name(report.direction),
            report.bound,
            report.measured,
            report.satisfied,
            report.slack
        ),
        Format::Json => pretty(&serde_json::to_value(report).expect("report serializes")),
    }
}

fn bounds(p: &Params) -> CliResult<Output> {
    let Some(name) = &p.bound else {
        return usage("--bound is required");
    };
    let kind: BoundKind = name.parse().map_err(|e: sfl_core::Error| CliError::Usage(e.to_string()))?;
    let body = match kind {
        BoundKind::FuzzLattice => bound_output(&lattice_decay(p.d, p.r, &p.sides, p.w)?, p.format),
        BoundKind::NeighborhoodScaling => {
            if p.n.is_empty() {
                return usage("--N needs the sizes to certify");
            }
            let cert = theorem5_certificate(p.c, p.wmin, &p.n, p.tol)?;
            let min = cert.min_lambda2;
            let bound = cert.rows.first().map_or(f64::NAN, |r| r.lower_bound);
            match p.format {
                Format::Csv => format!(
                    "bound,direction,bound_value,measured,satisfied,slack\n{},lower,{},{},{},{}\n",
                    kind,
                    bound,
                    min.map_or(String::new(), |m| m.to_string()),
                    cert.all_satisfied(),
                    min.map_or(String::new(), |m| (m - bound).to_string())
                ),
                Format::Json => pretty(&json!({
                    "kind": kind.name(),
                    "direction": "lower",
                    "bound": bound,
                    "measured": min,
                    "satisfied": cert.all_satisfied(),
                })),
            }
        }
        _ => bound_output(&check_bound(kind, &load_graph(p)?, leader_index(p)?)?, p.format),
    };
    Ok(Output {
        body,
        ..Output::default()
    })
}

fn cheeger(p: &Params) -> CliResult<Output> {
    let cut = cheeger_constant(&load_graph(p)?)?;
    let set: Vec<usize> = cut.set.iter().map(|i| i + 1).collect();
    let body = match p.format {
        Format::Csv => {
            let members: Vec<String> = set.iter().map(|i| i.to_string()).collect();
            format!("h,set\n{},{}\n", cut.value, members.join(";"))
        }
        Format::Json => pretty(&json!({ "h": cut.value, "set": set })),
    };
    Ok(Output {
        body,
        ..Output::default()
    })
}

fn theorem5(p: &Params) -> CliResult<Output> {
    if p.n.is_empty() {
        return usage("--N needs the sizes to certify");
    }
    let cert = theorem5_certificate(p.c, p.wmin, &p.n, p.tol)?;
    let body = match p.format {
        Format::Csv => cert.to_csv(),
        Format::Json => pretty(&json!({
            "c": cert.c,
            "w_min": cert.w_min,
            "tol": cert.tol,
            "skipped": cert.skipped,
            "min_lambda2": cert.min_lambda2,
            "all_satisfied": cert.all_satisfied(),
            "rows": cert.rows.iter().map(|r| json!({
                "N": r.n, "q": r.q, "lambda2": r.lambda2, "lower_bound": r.lower_bound, "satisfied": r.satisfied,
            })).collect::<Vec<_>>(),
        })),
    };
    let series: Vec<(f64, f64)> = cert.rows.iter().map(|r| (r.n as f64, r.lambda2)).collect();
    log::info!("certified = {}", cert.all_satisfied());
    Ok(Output {
        body,
        summary: None,
        svg: Some(line_chart("ring fuzz, q = cN^(2/3)", "N", "lambda2", &series)),
    })
}

fn simulate(p: &Params) -> CliResult<Output> {
    let g = load_graph(p)?;
    let gains = gain_set(p)?;
    let leader = leader_index(p)?;
    let variant = match (leader, gains.has_absolute()) {
        (Some(_), true) => return usage("--leader and --abs-gains cannot be combined"),
        (Some(_), false) => Variant::LeaderFollower,
        (None, true) => Variant::AbsoluteFeedback,
        (None, false) => Variant::Leaderless,
    };
    let sys = build_system(&g, &gains, variant, leader)?;
    let xi0 = match p.init {
        InitialState::RandomAccel => random_acceleration_state(sys.agents, sys.order, p.seed),
        InitialState::Step => step_state(sys.agents, sys.order, 0, 1.min(sys.order - 1), 1.0)?,
    };
    let options = IntegrateOptions {
        h: p.h,
        horizon: p.horizon,
        sample_every: p.sample_every.max(1),
        ..IntegrateOptions::default()
    };
    let traj = integrate(&sys, &xi0, &options)?;
    let error = consensus_error(&traj, ErrorMode::for_variant(variant));
    let body = match p.format {
        Format::Csv => traj.to_csv(1),
        Format::Json => pretty(&json!({
            "variant": variant.name(),
            "termination": traj.termination.name(),
            "t": traj.times(),
            "consensus_error": error,
        })),
    };
    let series: Vec<(f64, f64)> = traj.times().iter().copied().zip(error.iter().copied()).collect();
    log::info!(
        "termination = {} at t = {}",
        traj.termination.name(),
        traj.times().last().copied().unwrap_or(0.0)
    );
    Ok(Output {
        body,
        summary: None,
        svg: Some(line_chart(variant.name(), "t", "consensus error", &series)),
    })
}

fn angle_check(p: &Params) -> CliResult<Output> {
    if !(p.psi > 0.0 && p.psi < std::f64::consts::FRAC_PI_2) {
        return usage("--psi must lie in (0, pi/2)");
    }
    let report = theorem4_angle_check(&spectrum_of(p)?, p.psi, p.re_max);
    let body = match p.format {
        Format::Csv => report.to_csv(),
        Format::Json => pretty(&json!({
            "psi": report.psi,
            "re_max": report.re_max,
            "flagged": report.flagged,
            "rows": report.rows.iter().map(|r| json!({
                "l": r.l, "re": r.lambda.re, "im": r.lambda.im, "arg": r.arg, "exceeds_psi": r.exceeds,
            })).collect::<Vec<_>>(),
        })),
    };
    log::info!("flagged = {}", report.flagged);
    Ok(Output {
        body,
        ..Output::default()
    })
}
