//! Independent checks of the bounds against exact dynamics.
//!
//! Nothing here trusts the closed forms in [`crate::bounds`]: orthogonal
//! times are found by scanning the overlap itself, the envelope is compared
//! with `arccos |<psi_0|psi_t>|` sample by sample, and the `xi` correction
//! is rebuilt from the tangency construction `1 - cos x <= a x + q sin x`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_set, envelope_angle, popoviciu, BoundSet};
use crate::error::{Error, Result};
use crate::solve;
use crate::spectral::{
    dual_state, energy_moments, overlap_magnitude, sample_random_state, SpectralState, DEFAULT_P_GRID,
};

/// Magnitude below which the overlap counts as zero.
pub const DEFAULT_ORTHO_TOLERANCE: f64 = 1e-9;
/// Searches run over this many bandwidth times.
pub const DEFAULT_WINDOW_FACTOR: f64 = 20.0;
/// Allowed negative envelope slack; covers the linearised `xi`.
pub const DEFAULT_SLACK_TOLERANCE: f64 = 1e-3;

/// First time the overlap vanishes within `[0, t_max]`.
///
/// `|<psi_0|psi_t>|` is sampled every `tau_bw / 20`, a twentieth of the
/// half period of the fastest oscillation. Each discrete local minimum is
/// refined by golden-section search; the first refined minimum below `tol`
/// is returned.
pub fn find_orthogonalization_time(state: &SpectralState, t_max: f64, tol: f64) -> Option<f64> {
    let bandwidth = state.bandwidth();
    if state.len() < 2 || bandwidth <= 0.0 || t_max.is_nan() || t_max <= 0.0 {
        return None;
    }
    let step = PI / bandwidth / 20.0;
    let n = (t_max / step).ceil() as usize;
    let time = |k: usize| (k as f64 * step).min(t_max);
    let mag = |t: f64| overlap_magnitude(state, t);

    let mut before = mag(time(0));
    let mut current = mag(time(1));
    for k in 2..=n {
        let after = mag(time(k));
        if current <= before && current <= after {
            let (t, m) = solve::golden_section_min(mag, time(k - 2), time(k), 1e-12);
            if m < tol {
                return Some(t);
            }
        }
        before = current;
        current = after;
    }
    None
}

/// Smallest value of `envelope_angle(t) - arccos |<psi_0|psi_t>|` on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSlack {
    pub worst_slack: f64,
    pub at: f64,
}

impl EnvelopeSlack {
    pub fn violates(&self, tolerance: f64) -> bool {
        self.worst_slack < -tolerance
    }
}

/// Envelope slack on `steps` evenly spaced times over `[0, t_max]`.
pub fn check_envelope(state: &SpectralState, t_max: f64, steps: usize) -> Result<EnvelopeSlack> {
    check_envelope_on(state, 0.0, t_max, steps)
}

/// Same as [`check_envelope`] on `[t_start, t_end]`.
pub fn check_envelope_on(state: &SpectralState, t_start: f64, t_end: f64, steps: usize) -> Result<EnvelopeSlack> {
    if steps < 2 {
        return Err(Error::OutOfRange { name: "steps", value: steps as f64, range: "[2, inf)" });
    }
    let bounds = bound_set(&energy_moments(state, None)?);
    Ok(envelope_slack(state, &bounds, t_start, t_end, steps))
}

fn envelope_slack(state: &SpectralState, bounds: &BoundSet, t_start: f64, t_end: f64, steps: usize) -> EnvelopeSlack {
    let mut worst = EnvelopeSlack { worst_slack: f64::INFINITY, at: t_start };
    let span = t_end - t_start;
    for k in 0..steps {
        let t = t_start + span * k as f64 / (steps - 1) as f64;
        let actual = overlap_magnitude(state, t).min(1.0).acos();
        let slack = envelope_angle(t, bounds) - actual;
        if slack < worst.worst_slack {
            worst = EnvelopeSlack { worst_slack: slack, at: t };
        }
    }
    worst
}

/// Parameters of a line `a x + q sin x` tangent to `1 - cos x` at `x_star`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangencySolution {
    pub q: f64,
    pub a: f64,
    pub x_star: f64,
}

impl TangencySolution {
    /// `(value residual, slope residual)` of the tangency conditions.
    pub fn residuals(&self) -> (f64, f64) {
        let (s, c) = self.x_star.sin_cos();
        (
            (1.0 - c) - (self.a * self.x_star + self.q * s),
            s - (self.a + self.q * c),
        )
    }
}

// Tangency without the domination scan; used in inner loops.
fn tangency(q: f64) -> Result<TangencySolution> {
    let value_gap = |x: f64| {
        let (s, c) = x.sin_cos();
        1.0 - c - (s - q * c) * x - q * s
    };
    let x_star = solve::bisect(value_gap, FRAC_PI_2, TAU - 1e-6, 1e-12, "a_of_q")?;
    let (s, c) = x_star.sin_cos();
    Ok(TangencySolution { q, a: s - q * c, x_star })
}

/// Smallest slope `a` such that `1 - cos x <= a x + q sin x` for all
/// `x >= 0`, with the tangency point. The slope condition gives
/// `a = sin x* - q cos x*`; the value condition is then a scalar equation
/// in `x*` on `(pi/2, 2 pi)` solved by bisection.
pub fn a_of_q(q: f64) -> Result<TangencySolution> {
    if !(q >= 0.0 && q.is_finite()) {
        return Err(Error::OutOfRange { name: "q", value: q, range: "[0, inf)" });
    }
    let sol = tangency(q)?;
    const GRID: usize = 4000;
    for k in 0..=GRID {
        let x = 4.0 * PI * k as f64 / GRID as f64;
        let deficit = (1.0 - x.cos()) - (sol.a * x + q * x.sin());
        if deficit > 1e-10 {
            return Err(Error::Domination { q, x, deficit });
        }
    }
    Ok(sol)
}

/// Search range for the inequality parameter `q`.
pub const Q_MAX: f64 = 10.0;
const Q_GRID: usize = 200;

/// `xi(x)` rebuilt from first principles.
///
/// Each `q` turns `1 - cos x <= a(q) x + q sin x` into
/// `1 - Re z + q Im z <= a(q) E t` for `z = <psi_0|psi_t>`. Taking the
/// worst phase of `z` leaves `|z| >= (1 - a(q) E t) / sqrt(1 + q^2)`.
/// The largest such floor over `q` at `t = x tau_ml` bounds the angle, and
/// `xi = arccos(floor) / ((pi/2) sqrt(x))`.
pub fn xi_oracle(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::OutOfRange { name: "x", value: x, range: "(0, 1]" });
    }
    let et = x * FRAC_PI_2;
    let floor = |q: f64| tangency(q).map(|sol| (1.0 - sol.a * et) / (1.0 + q * q).sqrt());

    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..=Q_GRID {
        let v = floor(Q_MAX * i as f64 / Q_GRID as f64)?;
        if v > best.1 {
            best = (i, v);
        }
    }
    if best.0 == Q_GRID {
        return Err(Error::BoundaryMaximizer { q: Q_MAX, x });
    }
    let lo = Q_MAX * best.0.saturating_sub(1) as f64 / Q_GRID as f64;
    let hi = Q_MAX * (best.0 + 1) as f64 / Q_GRID as f64;
    let (q_opt, neg) = solve::golden_section_min(|q| floor(q).map_or(f64::INFINITY, |v| -v), lo, hi, 1e-10);
    a_of_q(q_opt)?;

    let f = (-neg).max(best.1).clamp(0.0, 1.0);
    Ok(f.acos() / (FRAC_PI_2 * x.sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub samples: usize,
    pub min_levels: usize,
    pub max_levels: usize,
    pub seed: u64,
    pub emax: f64,
    pub time_samples: usize,
    pub window_factor: f64,
    pub tolerance: f64,
    pub ortho_tolerance: f64,
    pub p_grid: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            samples: 10_000,
            min_levels: 2,
            max_levels: 8,
            seed: 42,
            emax: 1.0,
            time_samples: 1000,
            window_factor: DEFAULT_WINDOW_FACTOR,
            tolerance: DEFAULT_SLACK_TOLERANCE,
            ortho_tolerance: DEFAULT_ORTHO_TOLERANCE,
            p_grid: DEFAULT_P_GRID.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Popoviciu,
    PopoviciuSaturation,
    QslAboveBandwidth,
    DualitySwap,
    Envelope,
    Orthogonalization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub check: CheckKind,
    pub state: SpectralState,
    pub t: Option<f64>,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsificationReport {
    pub samples: usize,
    pub worst_slack_rad: f64,
    pub violations: Vec<Violation>,
    pub ortho_checks: usize,
    pub seed: u64,
}

fn mix(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The `index`-th state of a sweep. Depends only on the seed and index,
/// never on how the work was split across threads.
pub fn sweep_state(config: &SweepConfig, index: usize) -> Result<SpectralState> {
    if config.min_levels == 0 || config.max_levels < config.min_levels {
        return Err(Error::OutOfRange {
            name: "levels",
            value: config.min_levels as f64,
            range: "1 <= min_levels <= max_levels",
        });
    }
    let seed = mix(config.seed, index as u64);
    let span = (config.max_levels - config.min_levels + 1) as u64;
    let levels = config.min_levels + (mix(seed, u64::MAX) % span) as usize;
    sample_random_state(levels, config.emax, seed)
}

fn relative_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

struct StateOutcome {
    worst_slack: f64,
    ortho_checked: bool,
    violations: Vec<Violation>,
}

fn check_state(config: &SweepConfig, state: SpectralState) -> Result<StateOutcome> {
    let moments = energy_moments(&state, Some(&config.p_grid))?;
    let bounds = bound_set(&moments);
    let mut violations = Vec::new();
    let mut flag = |check, t, slack| violations.push(Violation { check, state: state.clone(), t, slack });

    let pop = popoviciu(&moments);
    if moments.sigma > pop.max_sigma + 1e-12 {
        flag(CheckKind::Popoviciu, None, pop.max_sigma - moments.sigma);
    }
    if pop.saturated != (state.len() <= 2) {
        flag(CheckKind::PopoviciuSaturation, None, pop.max_sigma - moments.sigma);
    }

    if bounds.tau_qsl < bounds.tau_bw * (1.0 - 1e-12) {
        flag(CheckKind::QslAboveBandwidth, None, bounds.tau_qsl - bounds.tau_bw);
    }

    let dual = bound_set(&energy_moments(&dual_state(&state), None)?);
    let swapped = relative_close(dual.tau_ml, bounds.tau_ml_dual, 1e-12)
        && relative_close(dual.tau_ml_dual, bounds.tau_ml, 1e-12)
        && relative_close(dual.tau_mt, bounds.tau_mt, 1e-12)
        && relative_close(dual.tau_bw, bounds.tau_bw, 1e-12);
    if !swapped {
        flag(CheckKind::DualitySwap, None, (dual.tau_ml - bounds.tau_ml_dual).abs().max((dual.tau_ml_dual - bounds.tau_ml).abs()));
    }

    let t_max = if bounds.tau_bw.is_finite() { config.window_factor * bounds.tau_bw } else { 1.0 };
    let slack = envelope_slack(&state, &bounds, 0.0, t_max, config.time_samples.max(2));
    if slack.violates(config.tolerance) {
        flag(CheckKind::Envelope, Some(slack.at), slack.worst_slack);
    }

    let t_perp = find_orthogonalization_time(&state, t_max, config.ortho_tolerance);
    if let Some(t) = t_perp {
        let mut floors = vec![bounds.tau_qsl, bounds.tau_bw];
        for family in [&bounds.tau_ml_p, &bounds.tau_ml_dual_p].into_iter().flatten() {
            floors.extend(family.iter().map(|b| b.tau));
        }
        let tightest = floors.into_iter().fold(f64::NEG_INFINITY, f64::max);
        if t < tightest - 1e-9 {
            flag(CheckKind::Orthogonalization, Some(t), t - tightest);
        }
    }

    Ok(StateOutcome { worst_slack: slack.worst_slack, ortho_checked: t_perp.is_some(), violations })
}

/// Draws `config.samples` random states and checks every inequality on
/// each. Violations are collected, not raised.
pub fn falsification_sweep(config: &SweepConfig) -> Result<FalsificationReport> {
    if config.samples == 0 {
        return Err(Error::OutOfRange { name: "samples", value: 0.0, range: "[1, inf)" });
    }
    let outcomes: Vec<StateOutcome> = (0..config.samples)
        .into_par_iter()
        .map(|i| sweep_state(config, i).and_then(|s| check_state(config, s)))
        .collect::<Result<_>>()?;

    let mut report = FalsificationReport {
        samples: config.samples,
        worst_slack_rad: f64::INFINITY,
        violations: Vec::new(),
        ortho_checks: 0,
        seed: config.seed,
    };
    for outcome in outcomes {
        report.worst_slack_rad = report.worst_slack_rad.min(outcome.worst_slack);
        report.ortho_checks += outcome.ortho_checked as usize;
        report.violations.extend(outcome.violations);
    }
    Ok(report)
}
