//! States described by their spectral decomposition.
//!
//! A state is a list of occupied eigenenergies with populations `|c_n|^2`.
//! Phases never enter the two-time overlap, so they are not stored. Units
//! use hbar = 1: energies are in caller units and times in inverse energy.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json;

/// Populations below this are treated as unoccupied.
pub const PRUNE_THRESHOLD: f64 = 1e-15;
/// Largest deviation of the population sum from 1 that is renormalized away.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;
/// Energies closer than `MERGE_TOLERANCE * (1 + |E|)` are one level.
pub const MERGE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub population: f64,
}

/// A normalized, sorted, pruned list of occupied levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralState {
    levels: Vec<Level>,
}

impl<'de> Deserialize<'de> for SpectralState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            levels: Vec<Level>,
        }
        let raw = Raw::deserialize(d)?;
        let pairs: Vec<(f64, f64)> = raw.levels.iter().map(|l| (l.energy, l.population)).collect();
        validate_state(&pairs).map_err(serde::de::Error::custom)
    }
}

#[derive(Deserialize)]
struct StateFile {
    levels: Vec<Level>,
}

impl SpectralState {
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Lowest occupied energy.
    pub fn e0(&self) -> f64 {
        self.levels[0].energy
    }

    /// Highest occupied energy.
    pub fn emax(&self) -> f64 {
        self.levels[self.levels.len() - 1].energy
    }

    pub fn bandwidth(&self) -> f64 {
        self.emax() - self.e0()
    }

    /// The same populations with every energy moved by `offset`.
    pub fn shifted(&self, offset: f64) -> Result<SpectralState> {
        let raw: Vec<(f64, f64)> = self
            .levels
            .iter()
            .map(|l| (l.energy + offset, l.population))
            .collect();
        validate_state(&raw)
    }

    pub fn from_json(text: &str) -> Result<SpectralState> {
        let file: StateFile = serde_json::from_str(text)?;
        let raw: Vec<(f64, f64)> = file.levels.iter().map(|l| (l.energy, l.population)).collect();
        validate_state(&raw)
    }

    pub fn to_json(&self) -> Result<String> {
        json::to_json_string(self)
    }
}

/// Checks and canonicalizes raw `(energy, population)` pairs.
///
/// Levels are sorted, near-duplicate energies merged, sub-threshold
/// populations pruned, and the sum renormalized when it is already within
/// [`NORMALIZATION_TOLERANCE`] of one. Anything further off is rejected.
pub fn validate_state(raw: &[(f64, f64)]) -> Result<SpectralState> {
    if raw.is_empty() {
        return Err(Error::EmptyState);
    }
    for (index, &(energy, population)) in raw.iter().enumerate() {
        if !energy.is_finite() {
            return Err(Error::NonFinite { index, field: "energy", value: energy });
        }
        if !population.is_finite() {
            return Err(Error::NonFinite { index, field: "population", value: population });
        }
        if population < 0.0 {
            return Err(Error::NegativePopulation { index, population });
        }
    }
    let sum: f64 = raw.iter().map(|&(_, p)| p).sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Normalization { sum, tolerance: NORMALIZATION_TOLERANCE });
    }
    canonicalize(raw.iter().map(|&(energy, population)| Level { energy, population }).collect())
}

// Sort, merge, prune, renormalize. Inputs are already known to be finite
// and non-negative.
fn canonicalize(mut levels: Vec<Level>) -> Result<SpectralState> {
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));

    let mut merged: Vec<Level> = Vec::with_capacity(levels.len());
    for level in levels {
        match merged.last_mut() {
            Some(last) if (level.energy - last.energy).abs() <= MERGE_TOLERANCE * (1.0 + last.energy.abs()) => {
                let total = last.population + level.population;
                if total > 0.0 {
                    last.energy = (last.energy * last.population + level.energy * level.population) / total;
                }
                last.population = total;
            }
            _ => merged.push(level),
        }
    }

    merged.retain(|l| l.population >= PRUNE_THRESHOLD);
    if merged.is_empty() {
        return Err(Error::EmptyState);
    }
    let total: f64 = merged.iter().map(|l| l.population).sum();
    for level in &mut merged {
        level.population /= total;
    }
    Ok(SpectralState { levels: merged })
}

/// One `(p, E_p, E*_p)` entry of the generalized energy norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpNorm {
    pub p: f64,
    pub ep: f64,
    pub ep_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyMoments {
    pub e0: f64,
    pub emax: f64,
    pub mean: f64,
    pub sigma: f64,
    pub bandwidth: f64,
    pub lp: Option<Vec<LpNorm>>,
}

impl EnergyMoments {
    /// Moments given directly as numbers rather than derived from a state,
    /// e.g. a point of the regime diagram. Rejects combinations no state
    /// can have.
    pub fn from_summary(e0: f64, emax: f64, mean: f64, sigma: f64) -> Result<EnergyMoments> {
        for (name, value) in [("e0", e0), ("emax", emax), ("mean", mean), ("sigma", sigma)] {
            if !value.is_finite() {
                return Err(Error::OutOfRange { name, value, range: "finite numbers" });
            }
        }
        if emax < e0 {
            return Err(Error::OutOfRange { name: "emax", value: emax, range: "[e0, inf)" });
        }
        if mean < e0 || mean > emax {
            return Err(Error::OutOfRange { name: "mean", value: mean, range: "[e0, emax]" });
        }
        let max_sigma = ((mean - e0) * (emax - mean)).sqrt();
        if sigma < 0.0 || sigma > max_sigma * (1.0 + 1e-12) + 1e-300 {
            return Err(Error::OutOfRange {
                name: "sigma",
                value: sigma,
                range: "[0, sqrt((mean - e0)(emax - mean))]",
            });
        }
        Ok(EnergyMoments { e0, emax, mean, sigma, bandwidth: emax - e0, lp: None })
    }

    /// Mean energy above the lowest occupied level.
    pub fn lower_gap(&self) -> f64 {
        (self.mean - self.e0).max(0.0)
    }

    /// Distance from the mean energy to the highest occupied level.
    pub fn upper_gap(&self) -> f64 {
        (self.emax - self.mean).max(0.0)
    }
}

/// Default p grid for the generalized norms.
pub const DEFAULT_P_GRID: [f64; 5] = [1.0, 2.0, 4.0, 10.0, 100.0];

/// Mean, spread and extremes of the occupied spectrum, plus the Lp norms
/// `E_p = <(H - E0)^p>^(1/p)` and `E*_p = <(Emax - H)^p>^(1/p)` for each
/// requested `p >= 1`.
pub fn energy_moments(state: &SpectralState, p_list: Option<&[f64]>) -> Result<EnergyMoments> {
    let e0 = state.e0();
    let emax = state.emax();
    let bandwidth = emax - e0;

    let lower: f64 = state.levels.iter().map(|l| l.population * (l.energy - e0)).sum();
    let mean = (e0 + lower).clamp(e0, emax);
    let variance: f64 = state
        .levels
        .iter()
        .map(|l| {
            let d = l.energy - mean;
            l.population * d * d
        })
        .sum();
    let sigma = variance.max(0.0).sqrt();

    let lp = match p_list {
        None => None,
        Some(ps) => {
            let mut out = Vec::with_capacity(ps.len());
            for &p in ps {
                if p.is_nan() || p < 1.0 {
                    return Err(Error::OutOfRange { name: "p", value: p, range: "[1, inf)" });
                }
                out.push(LpNorm {
                    p,
                    ep: lp_norm(state, p, |e| e - e0, bandwidth),
                    ep_star: lp_norm(state, p, |e| emax - e, bandwidth),
                });
            }
            Some(out)
        }
    };

    Ok(EnergyMoments { e0, emax, mean, sigma, bandwidth, lp })
}

// <d^p>^(1/p) with d scaled by the bandwidth so that huge p neither
// overflows nor loses the top term.
fn lp_norm(state: &SpectralState, p: f64, distance: impl Fn(f64) -> f64, bandwidth: f64) -> f64 {
    if bandwidth <= 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return bandwidth;
    }
    let sum: f64 = state
        .levels
        .iter()
        .map(|l| l.population * (distance(l.energy) / bandwidth).clamp(0.0, 1.0).powf(p))
        .sum();
    bandwidth * sum.powf(1.0 / p)
}

/// `<psi_0|psi_t>` at one instant together with its magnitude and the
/// Fubini-Study angle `arccos |<psi_0|psi_t>|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapSample {
    pub t: f64,
    pub value: Complex64,
    pub magnitude: f64,
    pub angle: f64,
}

// Sum relative to the lowest level; the global phase is applied separately.
fn centered_sum(state: &SpectralState, t: f64) -> Complex64 {
    let e0 = state.e0();
    state
        .levels
        .iter()
        .map(|l| {
            let (s, c) = ((l.energy - e0) * t).sin_cos();
            Complex64::new(l.population * c, -l.population * s)
        })
        .sum()
}

/// Two-time overlap `sum_n |c_n|^2 exp(-i E_n t)`.
pub fn overlap(state: &SpectralState, t: f64) -> OverlapSample {
    let centered = centered_sum(state, t);
    let magnitude = centered.norm();
    let value = centered * Complex64::from_polar(1.0, -state.e0() * t);
    OverlapSample {
        t,
        value,
        magnitude,
        angle: magnitude.min(1.0).acos(),
    }
}

/// `|<psi_0|psi_t>|` without the phase bookkeeping.
pub fn overlap_magnitude(state: &SpectralState, t: f64) -> f64 {
    centered_sum(state, t).norm()
}

/// Time-reversed state: every energy `E_n` becomes `Emax - E_n`.
pub fn dual_state(state: &SpectralState) -> SpectralState {
    let emax = state.emax();
    let levels = state
        .levels
        .iter()
        .map(|l| Level { energy: emax - l.energy, population: l.population })
        .collect();
    canonicalize(levels).expect("dual of a non-empty state is non-empty")
}

/// Qubit with Hamiltonian `emax |1><1|` and excited population `p1`.
pub fn make_qubit(p1: f64, emax: f64) -> Result<SpectralState> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::OutOfRange { name: "p1", value: p1, range: "[0, 1]" });
    }
    if !(emax > 0.0 && emax.is_finite()) {
        return Err(Error::OutOfRange { name: "emax", value: emax, range: "(0, inf)" });
    }
    validate_state(&[(0.0, 1.0 - p1), (emax, p1)])
}

/// Qutrit on levels `0, eta*emax, emax` whose populations reproduce the
/// requested mean energy and energy spread.
pub fn qutrit_from_moments(mean: f64, sigma: f64, eta: f64, emax: f64) -> Result<SpectralState> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::OutOfRange { name: "eta", value: eta, range: "(0, 1)" });
    }
    if !(emax > 0.0 && emax.is_finite()) {
        return Err(Error::OutOfRange { name: "emax", value: emax, range: "(0, inf)" });
    }
    if !mean.is_finite() {
        return Err(Error::OutOfRange { name: "mean", value: mean, range: "finite numbers" });
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::OutOfRange { name: "sigma", value: sigma, range: "[0, inf)" });
    }
    let m = mean / emax;
    let s2 = (sigma / emax).powi(2);
    let w1 = ((1.0 - m) * m - s2) / ((1.0 - eta) * eta);
    let w2 = ((m - eta) * m + s2) / (1.0 - eta);
    let w0 = 1.0 - w1 - w2;

    const SLACK: f64 = 1e-12;
    let mut weights = [w0, w1, w2];
    for (level, w) in weights.iter_mut().enumerate() {
        if *w < -SLACK || *w > 1.0 + SLACK {
            return Err(Error::InfeasibleMoments { level, weight: *w });
        }
        *w = w.clamp(0.0, 1.0);
    }
    validate_state(&[(0.0, weights[0]), (eta * emax, weights[1]), (emax, weights[2])])
}

/// Random state: `level_count` energies uniform on `[0, emax]` with
/// populations uniform on the probability simplex. Deterministic per seed.
pub fn sample_random_state(level_count: usize, emax: f64, seed: u64) -> Result<SpectralState> {
    if level_count == 0 {
        return Err(Error::OutOfRange { name: "level_count", value: 0.0, range: "[1, inf)" });
    }
    if !(emax > 0.0 && emax.is_finite()) {
        return Err(Error::OutOfRange { name: "emax", value: emax, range: "(0, inf)" });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(f64, f64)> = (0..level_count)
        .map(|_| {
            let energy = rng.random_range(0.0..=emax);
            let weight: f64 = rng.sample(Exp1);
            (energy, weight)
        })
        .collect();
    let total: f64 = draws.iter().map(|&(_, w)| w).sum();
    let levels = draws
        .into_iter()
        .map(|(energy, w)| Level { energy, population: w / total })
        .collect();
    canonicalize(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // Direct weighted sums, kept separate from the shifted formulas above.
    fn oracle_moments(pairs: &[(f64, f64)]) -> (f64, f64) {
        let mean: f64 = pairs.iter().map(|&(e, p)| p * e).sum();
        let second: f64 = pairs.iter().map(|&(e, p)| p * e * e).sum();
        (mean, (second - mean * mean).sqrt())
    }

    fn pops(state: &SpectralState) -> Vec<(f64, f64)> {
        state.levels().iter().map(|l| (l.energy, l.population)).collect()
    }

    #[test]
    fn validate_sorts_and_merges() {
        let s = validate_state(&[(1.0, 0.5), (0.0, 0.5)]).unwrap();
        assert_eq!(pops(&s), vec![(0.0, 0.5), (1.0, 0.5)]);

        let s = validate_state(&[(0.0, 0.5), (0.0, 0.25), (1.0, 0.25)]).unwrap();
        assert_eq!(pops(&s), vec![(0.0, 0.75), (1.0, 0.25)]);
        let m = energy_moments(&s, None).unwrap();
        let (mean, sigma) = oracle_moments(&[(0.0, 0.5), (0.0, 0.25), (1.0, 0.25)]);
        assert!((m.mean - mean).abs() < 1e-15);
        assert!((m.sigma - sigma).abs() < 1e-15);
    }

    #[test]
    fn validate_rejects_bad_input() {
        assert!(matches!(validate_state(&[]), Err(Error::EmptyState)));
        assert!(matches!(
            validate_state(&[(0.0, 1.2), (1.0, -0.2)]),
            Err(Error::NegativePopulation { index: 1, .. })
        ));
        assert!(matches!(validate_state(&[(0.0, 0.5), (1.0, 0.4)]), Err(Error::Normalization { .. })));
        assert!(matches!(validate_state(&[(f64::NAN, 1.0)]), Err(Error::NonFinite { field: "energy", .. })));
        assert!(matches!(validate_state(&[(0.0, 1e-16), (1.0, 1e-16)]), Err(Error::Normalization { .. })));
    }

    #[test]
    fn validate_renormalizes_small_drift_and_prunes() {
        let s = validate_state(&[(0.0, 0.5 + 4e-10), (1.0, 0.5), (2.0, 1e-16)]).unwrap();
        assert_eq!(s.len(), 2);
        let sum: f64 = s.levels().iter().map(|l| l.population).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert_eq!(s.emax(), 1.0);
    }

    #[test]
    fn moments_of_reference_qubit_and_qutrit() {
        let q = validate_state(&[(0.0, 0.8), (1.0, 0.2)]).unwrap();
        let m = energy_moments(&q, None).unwrap();
        assert!((m.mean - 0.2).abs() < 1e-12);
        assert!((m.sigma - 0.4).abs() < 1e-12);
        assert_eq!((m.e0, m.emax), (0.0, 1.0));

        let pairs = [(0.0, 7.0 / 9.0), (0.5, 1.0 / 9.0), (1.0, 1.0 / 9.0)];
        let (mean, sigma) = oracle_moments(&pairs);
        assert!((mean - 1.0 / 6.0).abs() < 1e-15);
        assert!((sigma - 1.0 / 3.0).abs() < 1e-15);
        let m = energy_moments(&validate_state(&pairs).unwrap(), None).unwrap();
        assert!((m.mean - mean).abs() < 1e-12);
        assert!((m.sigma - sigma).abs() < 1e-12);
    }

    #[test]
    fn single_level_is_degenerate() {
        let s = validate_state(&[(0.3, 1.0)]).unwrap();
        let m = energy_moments(&s, Some(&DEFAULT_P_GRID)).unwrap();
        assert_eq!((m.mean, m.sigma, m.bandwidth), (0.3, 0.0, 0.0));
        assert!(m.lp.unwrap().iter().all(|n| n.ep == 0.0 && n.ep_star == 0.0));
    }

    #[test]
    fn lp_norms_interpolate_mean_to_bandwidth() {
        let s = validate_state(&[(0.0, 0.5), (0.3, 0.2), (1.0, 0.3)]).unwrap();
        let ps = [1.0, 2.0, 4.0, 10.0, 100.0, 1e6];
        let m = energy_moments(&s, Some(&ps)).unwrap();
        let lp = m.lp.as_ref().unwrap();
        assert!((lp[0].ep - (m.mean - m.e0)).abs() < 1e-12);
        assert!((lp[0].ep_star - (m.emax - m.mean)).abs() < 1e-12);
        for w in lp.windows(2) {
            assert!(w[1].ep >= w[0].ep - 1e-15);
            assert!(w[1].ep_star >= w[0].ep_star - 1e-15);
        }
        // p = 2 by direct sum
        let direct: f64 = s.levels().iter().map(|l| l.population * l.energy.powi(2)).sum::<f64>().sqrt();
        assert!((lp[1].ep - direct).abs() < 1e-14);
        assert!((lp[5].ep - 1.0).abs() < 2e-6);
        assert!(energy_moments(&s, Some(&[0.5])).is_err());
    }

    #[test]
    fn overlap_examples() {
        let balanced = make_qubit(0.5, 1.0).unwrap();
        let o = overlap(&balanced, 0.0);
        assert_eq!((o.value.re, o.value.im, o.angle), (1.0, 0.0, 0.0));
        let o = overlap(&balanced, PI);
        assert!(o.value.norm() < 1e-15);
        assert!((o.angle - PI / 2.0).abs() < 1e-15);

        let q = make_qubit(0.2, 1.0).unwrap();
        let direct = Complex64::new(0.8, 0.0) + Complex64::from_polar(0.2, -PI);
        let o = overlap(&q, PI);
        assert!((o.magnitude - 0.6).abs() < 1e-15);
        assert!((o.value - direct).norm() < 1e-15);
    }

    #[test]
    fn overlap_value_matches_direct_sum_with_offset_ground() {
        let s = validate_state(&[(2.0, 0.3), (2.5, 0.3), (4.0, 0.4)]).unwrap();
        for t in [0.1, 1.7, 9.3] {
            let direct: Complex64 = s.levels().iter().map(|l| Complex64::from_polar(l.population, -l.energy * t)).sum();
            assert!((overlap(&s, t).value - direct).norm() < 1e-14);
        }
    }

    #[test]
    fn dual_examples() {
        let q = make_qubit(0.2, 1.0).unwrap();
        assert_eq!(pops(&dual_state(&q)), vec![(0.0, 0.2), (1.0, 0.8)]);

        let single = validate_state(&[(0.7, 1.0)]).unwrap();
        assert_eq!(pops(&dual_state(&single)), vec![(0.0, 1.0)]);

        let s = validate_state(&[(0.0, 0.1), (0.25, 0.6), (1.5, 0.3)]).unwrap();
        let back = dual_state(&dual_state(&s));
        for (a, b) in back.levels().iter().zip(s.levels()) {
            assert!((a.energy - b.energy).abs() < 1e-15 && (a.population - b.population).abs() < 1e-15);
        }
    }

    #[test]
    fn qubit_constructor() {
        let m = energy_moments(&make_qubit(0.5, 1.0).unwrap(), None).unwrap();
        assert_eq!((m.mean, m.sigma), (0.5, 0.5));
        let m = energy_moments(&make_qubit(0.2, 1.0).unwrap(), None).unwrap();
        assert!((m.mean - 0.2).abs() < 1e-15 && (m.sigma - 0.4).abs() < 1e-15);
        let ground = make_qubit(0.0, 1.0).unwrap();
        assert_eq!(ground.len(), 1);
        assert_eq!(energy_moments(&ground, None).unwrap().sigma, 0.0);
        assert!(make_qubit(1.5, 1.0).is_err());
        assert!(make_qubit(0.5, 0.0).is_err());
    }

    #[test]
    fn qutrit_weights_for_reference_scenarios() {
        let cases = [
            (1.0 / 6.0, 1.0 / 3.0, [7.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0]),
            (0.5, 1.0 / 3.0, [2.0 / 9.0, 5.0 / 9.0, 2.0 / 9.0]),
            (5.0 / 6.0, 5.0 / 18.0, [7.0 / 162.0, 20.0 / 81.0, 115.0 / 162.0]),
        ];
        for (mean, sigma, expected) in cases {
            let s = qutrit_from_moments(mean, sigma, 0.5, 1.0).unwrap();
            let got: Vec<f64> = s.levels().iter().map(|l| l.population).collect();
            for (g, e) in got.iter().zip(expected) {
                assert!((g - e).abs() < 1e-12, "{got:?} vs {expected:?}");
            }
            let (m, sd) = oracle_moments(&pops(&s));
            assert!((m - mean).abs() < 1e-12 && (sd - sigma).abs() < 1e-12);
        }
    }

    #[test]
    fn qutrit_rejects_infeasible_moments() {
        // sigma beyond the Popoviciu limit makes the middle weight negative
        match qutrit_from_moments(0.5, 0.6, 0.5, 1.0) {
            Err(Error::InfeasibleMoments { level: 1, weight }) => assert!(weight < 0.0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(qutrit_from_moments(0.5, 0.3, 1.0, 1.0).is_err());
    }

    #[test]
    fn sampler_is_deterministic() {
        let a = sample_random_state(6, 2.0, 99).unwrap();
        let b = sample_random_state(6, 2.0, 99).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_random_state(6, 2.0, 100).unwrap());
        let one = sample_random_state(1, 1.0, 5).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.levels()[0].population, 1.0);
        assert!(a.levels().iter().all(|l| (0.0..=2.0).contains(&l.energy)));
    }

    #[test]
    fn sampler_mean_energy_is_centered() {
        let n = 10_000;
        let total: f64 = (0..n)
            .map(|seed| {
                let s = sample_random_state(50, 1.0, seed).unwrap();
                energy_moments(&s, None).unwrap().mean
            })
            .sum();
        assert!((total / n as f64 - 0.5).abs() < 0.02);
    }

    #[test]
    fn json_round_trip() {
        let s = validate_state(&[(0.1, 0.3), (1.0 / 3.0, 0.7)]).unwrap();
        let text = s.to_json().unwrap();
        assert!(text.contains("3.3333333333333331e-1"));
        assert_eq!(SpectralState::from_json(&text).unwrap(), s);
        let err = SpectralState::from_json(r#"{"levels": [{"energy": 0, "population": -1}]}"#).unwrap_err();
        assert!(matches!(err, Error::NegativePopulation { .. }));
    }

    #[test]
    fn summary_moments_validation() {
        assert!(EnergyMoments::from_summary(0.0, 1.0, 0.5, 0.5).is_ok());
        assert!(EnergyMoments::from_summary(0.0, 1.0, 0.5, 0.6).is_err());
        assert!(EnergyMoments::from_summary(0.0, 1.0, 1.5, 0.0).is_err());
    }
}
