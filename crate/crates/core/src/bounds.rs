//! Orthogonalization-time bounds and the non-orthogonal envelope.
//!
//! With hbar = 1:
//!
//! * Mandelstam-Tamm `tau_mt = pi / (2 sigma)`
//! * Margolus-Levitin `tau_ml = pi / (2 (E - E0))`
//! * dual Margolus-Levitin `tau_ml_dual = pi / (2 (Emax - E))`
//! * bandwidth `tau_bw = pi / (Emax - E0)`
//!
//! plus the Lp families `pi / (2^(1/p) E_p)` and `pi / (2^(1/p) E*_p)`.
//! A vanishing denominator gives `+inf`: a state without spread or without
//! room above/below its mean never reaches an orthogonal state.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::inf_f64;
use crate::solve;
use crate::spectral::EnergyMoments;

/// Slope of the linear approximation `xi(x) = 1 - XI_SLOPE (1 - x)`.
pub const XI_SLOPE: f64 = 0.0395;
/// Relative tolerance for the equalities that separate regimes.
pub const REGIME_TIE_TOLERANCE: f64 = 1e-12;
/// Relative tolerance for Popoviciu saturation.
pub const POPOVICIU_SATURATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpBound {
    pub p: f64,
    #[serde(with = "inf_f64")]
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSet {
    #[serde(with = "inf_f64")]
    pub tau_mt: f64,
    #[serde(with = "inf_f64")]
    pub tau_ml: f64,
    #[serde(with = "inf_f64")]
    pub tau_ml_dual: f64,
    #[serde(with = "inf_f64")]
    pub tau_bw: f64,
    pub tau_ml_p: Option<Vec<LpBound>>,
    pub tau_ml_dual_p: Option<Vec<LpBound>>,
    #[serde(with = "inf_f64")]
    pub tau_qsl: f64,
}

fn half_period(energy: f64) -> f64 {
    if energy > 0.0 { PI / (2.0 * energy) } else { f64::INFINITY }
}

pub fn bound_set(moments: &EnergyMoments) -> BoundSet {
    let tau_mt = half_period(moments.sigma);
    let tau_ml = half_period(moments.lower_gap());
    let tau_ml_dual = half_period(moments.upper_gap());
    let tau_bw = if moments.bandwidth > 0.0 { PI / moments.bandwidth } else { f64::INFINITY };

    let family = |norm: fn(&crate::spectral::LpNorm) -> f64| {
        moments.lp.as_ref().map(|lp| {
            lp.iter()
                .map(|n| {
                    let e = norm(n);
                    let tau = if e > 0.0 { PI / (2f64.powf(1.0 / n.p) * e) } else { f64::INFINITY };
                    LpBound { p: n.p, tau }
                })
                .collect::<Vec<_>>()
        })
    };

    BoundSet {
        tau_mt,
        tau_ml,
        tau_ml_dual,
        tau_bw,
        tau_ml_p: family(|n| n.ep),
        tau_ml_dual_p: family(|n| n.ep_star),
        tau_qsl: tau_mt.max(tau_ml).max(tau_ml_dual),
    }
}

/// Near-unity correction in the extended Margolus-Levitin envelope,
/// linearised on `[0, 1]`.
pub fn xi(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange { name: "x", value: x, range: "[0, 1]" });
    }
    Ok(xi_linear(x))
}

#[inline]
fn xi_linear(x: f64) -> f64 {
    1.0 - XI_SLOPE * (1.0 - x)
}

/// Which term of the envelope is the binding one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActiveBound {
    Mt,
    Ml,
    MlDual,
}

/// The three angle bounds at one instant, each already clamped to `pi/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeTerms {
    pub mt: f64,
    pub ml: f64,
    pub ml_dual: f64,
}

impl EnvelopeTerms {
    pub fn min(&self) -> f64 {
        self.mt.min(self.ml).min(self.ml_dual)
    }

    pub fn active(&self) -> ActiveBound {
        if self.mt <= self.ml && self.mt <= self.ml_dual {
            ActiveBound::Mt
        } else if self.ml <= self.ml_dual {
            ActiveBound::Ml
        } else {
            ActiveBound::MlDual
        }
    }
}

fn mt_term(t: f64, tau: f64) -> f64 {
    let x = t / tau;
    FRAC_PI_2 * x.min(1.0)
}

// Past x = 1 the term already exceeds pi/2 and constrains nothing.
fn ml_term(t: f64, tau: f64) -> f64 {
    let x = t / tau;
    if x > 1.0 { FRAC_PI_2 } else { FRAC_PI_2 * xi_linear(x) * x.sqrt() }
}

pub fn envelope_terms(t: f64, bounds: &BoundSet) -> EnvelopeTerms {
    EnvelopeTerms {
        mt: mt_term(t, bounds.tau_mt),
        ml: ml_term(t, bounds.tau_ml),
        ml_dual: ml_term(t, bounds.tau_ml_dual),
    }
}

/// Largest Fubini-Study angle `arccos |<psi_0|psi_t>|` reachable by time `t`.
pub fn envelope_angle(t: f64, bounds: &BoundSet) -> f64 {
    envelope_terms(t, bounds).min()
}

/// Where the Mandelstam-Tamm line meets the Margolus-Levitin curve, i.e.
/// the fixed point of `t = xi(t/tau)^2 tau_mt^2 / tau`. `None` when the
/// meeting point lies beyond `tau` (the MT term stays the smaller one).
fn crossover(tau_mt: f64, tau: f64) -> Result<Option<f64>> {
    if !(tau_mt.is_finite() && tau.is_finite()) || tau <= 0.0 {
        return Ok(None);
    }
    let ratio = (tau_mt / tau).powi(2);
    if ratio > 1.0 + REGIME_TIE_TOLERANCE {
        return Ok(None);
    }
    let ratio = ratio.min(1.0);
    // |d/dx xi(x)^2 ratio| <= 2 * 0.0395, so this contracts fast.
    let x = solve::fixed_point(|x| xi_linear(x).powi(2) * ratio, ratio, 1e-12, 100, "crossover")?;
    Ok((x > 0.0 && x <= 1.0).then_some(x * tau))
}

/// `(tau_c, tau_c_star)`: crossovers onto the ML and dual-ML curves.
pub fn crossover_times(bounds: &BoundSet) -> Result<(Option<f64>, Option<f64>)> {
    Ok((crossover(bounds.tau_mt, bounds.tau_ml)?, crossover(bounds.tau_mt, bounds.tau_ml_dual)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    Mt,
    Ml,
    DualMl,
    Boundary,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::Mt => "MT",
            Regime::Ml => "ML",
            Regime::DualMl => "DUAL_ML",
            Regime::Boundary => "BOUNDARY",
        }
    }

    /// The label under spectrum inversion.
    pub fn dual(&self) -> Regime {
        match self {
            Regime::Ml => Regime::DualMl,
            Regime::DualMl => Regime::Ml,
            other => *other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryTag {
    /// sigma == E - E0
    SigmaEqualsLowerGap,
    /// sigma == Emax - E
    SigmaEqualsUpperGap,
    /// E == (E0 + Emax) / 2
    MeanAtMidpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub regime: Regime,
    pub crossover: Option<f64>,
    pub boundary_tags: Vec<BoundaryTag>,
}

fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= REGIME_TIE_TOLERANCE * a.abs().max(b.abs())
}

pub fn classify_regime(moments: &EnergyMoments) -> RegimeReport {
    let lower = moments.lower_gap();
    let upper = moments.upper_gap();
    let sigma = moments.sigma;

    let mut boundary_tags = Vec::new();
    if ties(sigma, lower) {
        boundary_tags.push(BoundaryTag::SigmaEqualsLowerGap);
    }
    if ties(sigma, upper) {
        boundary_tags.push(BoundaryTag::SigmaEqualsUpperGap);
    }
    if ties(lower, upper) {
        boundary_tags.push(BoundaryTag::MeanAtMidpoint);
    }

    let nearest = lower.min(upper);
    let regime = if ties(sigma, nearest) {
        Regime::Boundary
    } else if sigma < nearest {
        Regime::Mt
    } else if ties(lower, upper) {
        Regime::Boundary
    } else if lower < upper {
        Regime::Ml
    } else {
        Regime::DualMl
    };

    let crossover = match regime {
        Regime::Mt => None,
        _ => {
            // The iteration is a contraction, so this cannot fail.
            let (tau_c, tau_c_star) = crossover_times(&bound_set(moments)).unwrap_or((None, None));
            if lower <= upper { tau_c } else { tau_c_star }
        }
    };

    RegimeReport { regime, crossover, boundary_tags }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopoviciuCheck {
    pub max_sigma: f64,
    pub saturated: bool,
}

/// Popoviciu's bound `sigma <= sqrt((E - E0)(Emax - E))`, reached only by
/// states supported on two levels.
pub fn popoviciu(moments: &EnergyMoments) -> PopoviciuCheck {
    let max_sigma = (moments.lower_gap() * moments.upper_gap()).sqrt();
    let saturated = (moments.sigma - max_sigma).abs()
        <= POPOVICIU_SATURATION_TOLERANCE * max_sigma.max(moments.sigma)
        || (max_sigma == 0.0 && moments.sigma == 0.0);
    PopoviciuCheck { max_sigma, saturated }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{energy_moments, make_qubit, qutrit_from_moments, validate_state};

    fn summary(mean: f64, sigma: f64) -> EnergyMoments {
        EnergyMoments::from_summary(0.0, 1.0, mean, sigma).unwrap()
    }

    #[test]
    fn balanced_qubit_bounds_coincide() {
        let b = bound_set(&energy_moments(&make_qubit(0.5, 1.0).unwrap(), None).unwrap());
        for tau in [b.tau_mt, b.tau_ml, b.tau_ml_dual, b.tau_bw, b.tau_qsl] {
            assert!((tau - PI).abs() < 1e-15);
        }
    }

    #[test]
    fn reference_qubit_b_bounds() {
        let b = bound_set(&energy_moments(&make_qubit(0.2, 1.0).unwrap(), None).unwrap());
        assert!((b.tau_mt - PI / 0.8).abs() < 1e-12);
        assert!((b.tau_ml - PI / 0.4).abs() < 1e-12);
        assert!((b.tau_ml_dual - PI / 1.6).abs() < 1e-12);
        assert!((b.tau_qsl - PI / 0.4).abs() < 1e-12);
    }

    #[test]
    fn single_level_bounds_are_infinite() {
        let s = validate_state(&[(0.4, 1.0)]).unwrap();
        let b = bound_set(&energy_moments(&s, Some(&[1.0, 2.0])).unwrap());
        assert!(b.tau_mt.is_infinite() && b.tau_ml.is_infinite() && b.tau_ml_dual.is_infinite());
        assert!(b.tau_bw.is_infinite() && b.tau_qsl.is_infinite());
        assert!(b.tau_ml_p.as_ref().unwrap().iter().all(|l| l.tau.is_infinite()));
        assert_eq!(envelope_angle(3.0, &b), 0.0);
        assert_eq!(crossover_times(&b).unwrap(), (None, None));
    }

    #[test]
    fn lp_family_starts_at_ml() {
        let s = validate_state(&[(0.0, 0.3), (0.4, 0.3), (1.0, 0.4)]).unwrap();
        let b = bound_set(&energy_moments(&s, Some(&[1.0, 1e6])).unwrap());
        let lp = b.tau_ml_p.as_ref().unwrap();
        let dual = b.tau_ml_dual_p.as_ref().unwrap();
        assert!((lp[0].tau - b.tau_ml).abs() < 1e-12);
        assert!((dual[0].tau - b.tau_ml_dual).abs() < 1e-12);
        // At large p the family sits at tau_bw * (2 p_top)^(-1/p).
        let expected = b.tau_bw * (2.0 * 0.4f64).powf(-1e-6);
        assert!((lp[1].tau - expected).abs() < 1e-12);
    }

    #[test]
    fn xi_values() {
        assert_eq!(xi(1.0).unwrap(), 1.0);
        assert!((xi(0.0).unwrap() - 0.9605).abs() < 1e-15);
        assert!((xi(0.5).unwrap() - 0.98025).abs() < 1e-15);
        assert!(xi(1.2).is_err());
        assert!(xi(-0.1).is_err());
    }

    #[test]
    fn envelope_examples() {
        let balanced = bound_set(&summary(0.5, 0.5));
        assert_eq!(envelope_angle(0.0, &balanced), 0.0);
        assert!((envelope_angle(PI, &balanced) - FRAC_PI_2).abs() < 1e-15);

        let b = bound_set(&summary(0.2, 0.4));
        let terms = envelope_terms(1.0, &b);
        // MT: (pi/2)/tau_mt = 0.4, ML: (pi/2) xi(0.4/pi) sqrt(0.4/pi)
        let x = 0.4 / PI;
        let ml = FRAC_PI_2 * (1.0 - 0.0395 * (1.0 - x)) * x.sqrt();
        assert!((terms.mt - 0.4).abs() < 1e-15);
        assert!((terms.ml - ml).abs() < 1e-15);
        assert!(terms.ml > terms.mt && terms.ml_dual > terms.mt);
        assert_eq!(terms.active(), ActiveBound::Mt);
        assert!((envelope_angle(1.0, &b) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn envelope_saturates_at_right_angle() {
        let b = bound_set(&summary(0.2, 0.4));
        assert_eq!(envelope_angle(1e3, &b), FRAC_PI_2);
    }

    #[test]
    fn crossover_examples() {
        let balanced = bound_set(&summary(0.5, 0.5));
        let (c, cs) = crossover_times(&balanced).unwrap();
        assert!((c.unwrap() - PI).abs() < 1e-12 && (cs.unwrap() - PI).abs() < 1e-12);

        // Oracle: bisection on the difference of the MT and ML terms.
        let b = bound_set(&summary(0.2, 0.4));
        let diff = |x: f64| x * b.tau_ml / b.tau_mt - (1.0 - 0.0395 * (1.0 - x)) * x.sqrt();
        let oracle = solve::bisect(diff, 0.1, 0.5, 1e-15, "oracle").unwrap();
        let (c, cs) = crossover_times(&b).unwrap();
        let ratio = c.unwrap() / b.tau_ml;
        assert!((ratio - oracle).abs() < 1e-10);
        assert!((ratio - 0.2351).abs() < 5e-5);
        assert!(cs.is_none());

        let (c, cs) = crossover_times(&bound_set(&summary(0.5, 0.3))).unwrap();
        assert!(c.is_none() && cs.is_none());
    }

    #[test]
    fn active_term_switches_at_crossover() {
        for (mean, sigma) in [(0.2, 0.4), (1.0 / 6.0, 1.0 / 3.0), (0.1, 0.2)] {
            let b = bound_set(&summary(mean, sigma));
            let tc = crossover_times(&b).unwrap().0.unwrap();
            assert_eq!(envelope_terms(tc * (1.0 - 1e-6), &b).active(), ActiveBound::Mt);
            assert_eq!(envelope_terms(tc * (1.0 + 1e-6), &b).active(), ActiveBound::Ml);
            let t = envelope_terms(tc, &b);
            assert!((t.mt - t.ml).abs() < 1e-11);
        }
        let b = bound_set(&summary(5.0 / 6.0, 5.0 / 18.0));
        let tcs = crossover_times(&b).unwrap().1.unwrap();
        assert_eq!(envelope_terms(tcs * (1.0 - 1e-6), &b).active(), ActiveBound::Mt);
        assert_eq!(envelope_terms(tcs * (1.0 + 1e-6), &b).active(), ActiveBound::MlDual);
    }

    #[test]
    fn regimes_of_reference_scenarios() {
        let r = classify_regime(&summary(0.5, 1.0 / 3.0));
        assert_eq!((r.regime, r.crossover), (Regime::Mt, None));
        let r = classify_regime(&summary(1.0 / 6.0, 1.0 / 3.0));
        assert_eq!(r.regime, Regime::Ml);
        assert!(r.crossover.is_some());
        let r = classify_regime(&summary(5.0 / 6.0, 5.0 / 18.0));
        assert_eq!(r.regime, Regime::DualMl);
        assert!(r.crossover.is_some());

        let r = classify_regime(&energy_moments(&make_qubit(0.5, 1.0).unwrap(), None).unwrap());
        assert_eq!(r.regime, Regime::Boundary);
        assert_eq!(r.boundary_tags.len(), 3);
        assert!((r.crossover.unwrap() - PI).abs() < 1e-12);
    }

    #[test]
    fn regime_serializes_with_spec_labels() {
        let r = classify_regime(&summary(5.0 / 6.0, 5.0 / 18.0));
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"regime\":\"DUAL_ML\""), "{text}");
        assert!(text.contains("\"boundary_tags\""));
    }

    #[test]
    fn popoviciu_examples() {
        let p = popoviciu(&energy_moments(&make_qubit(0.2, 1.0).unwrap(), None).unwrap());
        assert!((p.max_sigma - 0.4).abs() < 1e-15 && p.saturated);

        let q = qutrit_from_moments(1.0 / 6.0, 1.0 / 3.0, 0.5, 1.0).unwrap();
        let p = popoviciu(&energy_moments(&q, None).unwrap());
        assert!((p.max_sigma - 5f64.sqrt() / 6.0).abs() < 1e-12);
        assert!(!p.saturated);

        let p = popoviciu(&energy_moments(&validate_state(&[(2.0, 1.0)]).unwrap(), None).unwrap());
        assert_eq!(p.max_sigma, 0.0);
        assert!(p.saturated);
    }
}
