//! Datasets behind the regime diagram and the qubit/qutrit evolution plots.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{bound_set, classify_regime, envelope_terms, BoundSet, Regime, RegimeReport};
use crate::error::{Error, Result};
use crate::json::fmt_f64;
use crate::spectral::{energy_moments, make_qubit, overlap_magnitude, qutrit_from_moments, EnergyMoments, SpectralState};

pub const DEFAULT_TRACE_STEPS: usize = 2000;
pub const DEFAULT_GRID_RESOLUTION: usize = 400;
/// Allowed shortfall of the exact overlap below the bound curves.
pub const FLOOR_TOLERANCE: f64 = 1e-3;
/// Trace windows extend this far past the largest finite bound.
pub const WINDOW_MARGIN: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    A,
    B,
    C,
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Scenario> {
        match s {
            "a" | "A" => Ok(Scenario::A),
            "b" | "B" => Ok(Scenario::B),
            "c" | "C" => Ok(Scenario::C),
            other => Err(Error::UnknownScenario(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMetadata {
    pub label: String,
    pub state: SpectralState,
    pub moments: EnergyMoments,
    pub bounds: BoundSet,
    pub regime: RegimeReport,
}

/// Exact `|<psi_0|psi_t>|` with the magnitude floors `cos(angle bound)`
/// implied by each envelope term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDataset {
    pub times: Vec<f64>,
    pub overlap_magnitude: Vec<f64>,
    pub mt_curve: Vec<f64>,
    pub ml_curve: Vec<f64>,
    pub ml_dual_curve: Vec<f64>,
    pub metadata: TraceMetadata,
}

pub const TRACE_COLUMNS: [&str; 5] = ["times", "overlap_magnitude", "mt_curve", "ml_curve", "ml_dual_curve"];

impl TraceDataset {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest amount by which the overlap drops below a bound curve, with
    /// the time it happens.
    pub fn worst_floor_excess(&self) -> (f64, f64) {
        let mut worst = (f64::NEG_INFINITY, 0.0);
        for i in 0..self.len() {
            let floor = self.mt_curve[i].max(self.ml_curve[i]).max(self.ml_dual_curve[i]);
            let excess = floor - self.overlap_magnitude[i];
            if excess > worst.0 {
                worst = (excess, self.times[i]);
            }
        }
        worst
    }

    pub fn to_csv(&self) -> String {
        let mut out = TRACE_COLUMNS.join(",");
        out.push('\n');
        for i in 0..self.len() {
            let row = [
                self.times[i],
                self.overlap_magnitude[i],
                self.mt_curve[i],
                self.ml_curve[i],
                self.ml_dual_curve[i],
            ];
            let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// `WINDOW_MARGIN` times the largest finite orthogonalization bound.
pub fn default_window(bounds: &BoundSet) -> f64 {
    let longest = [bounds.tau_mt, bounds.tau_ml, bounds.tau_ml_dual]
        .into_iter()
        .filter(|t| t.is_finite())
        .fold(0.0, f64::max);
    if longest > 0.0 { WINDOW_MARGIN * longest } else { 1.0 }
}

/// Samples the overlap and the bound curves on `steps` points of `[0, t_end]`.
pub fn trace_dataset(label: &str, state: &SpectralState, t_end: Option<f64>, steps: usize) -> Result<TraceDataset> {
    if steps < 2 {
        return Err(Error::OutOfRange { name: "steps", value: steps as f64, range: "[2, inf)" });
    }
    let moments = energy_moments(state, None)?;
    let bounds = bound_set(&moments);
    let regime = classify_regime(&moments);
    let t_end = t_end.unwrap_or_else(|| default_window(&bounds));
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::OutOfRange { name: "t_end", value: t_end, range: "(0, inf)" });
    }

    let mut data = TraceDataset {
        times: Vec::with_capacity(steps),
        overlap_magnitude: Vec::with_capacity(steps),
        mt_curve: Vec::with_capacity(steps),
        ml_curve: Vec::with_capacity(steps),
        ml_dual_curve: Vec::with_capacity(steps),
        metadata: TraceMetadata { label: label.to_string(), state: state.clone(), moments, bounds, regime },
    };
    for k in 0..steps {
        let t = if k + 1 == steps { t_end } else { t_end * k as f64 / (steps - 1) as f64 };
        let terms = envelope_terms(t, &data.metadata.bounds);
        data.times.push(t);
        data.overlap_magnitude.push(overlap_magnitude(state, t).min(1.0));
        data.mt_curve.push(terms.mt.cos().max(0.0));
        data.ml_curve.push(terms.ml.cos().max(0.0));
        data.ml_dual_curve.push(terms.ml_dual.cos().max(0.0));
    }

    let (excess, t) = data.worst_floor_excess();
    if excess > FLOOR_TOLERANCE {
        return Err(Error::DatasetInvariant { t, excess });
    }
    Ok(data)
}

/// Qubit scenarios: balanced, `c0 = 2 c1`, and its dual `2 c0 = c1`.
pub fn fig2_dataset(scenario: Scenario, steps: usize) -> Result<TraceDataset> {
    let (label, p1) = match scenario {
        Scenario::A => ("qubit-a", 0.5),
        Scenario::B => ("qubit-b", 0.2),
        Scenario::C => ("qubit-c", 0.8),
    };
    let state = make_qubit(p1, 1.0)?;
    let window = match scenario {
        // Ends exactly at the common orthogonalization point.
        Scenario::A => Some(bound_set(&energy_moments(&state, None)?).tau_qsl),
        _ => None,
    };
    trace_dataset(label, &state, window, steps)
}

/// Qutrit scenarios on levels `0, 1/2, 1` built from `(E, sigma)`.
pub fn fig3_dataset(scenario: Scenario, steps: usize) -> Result<TraceDataset> {
    let (label, mean, sigma) = match scenario {
        Scenario::A => ("qutrit-a", 1.0 / 6.0, 1.0 / 3.0),
        Scenario::B => ("qutrit-b", 0.5, 1.0 / 3.0),
        Scenario::C => ("qutrit-c", 5.0 / 6.0, 5.0 / 18.0),
    };
    let state = qutrit_from_moments(mean, sigma, 0.5, 1.0)?;
    trace_dataset(label, &state, None, steps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GridCell {
    Mt,
    Ml,
    DualMl,
    Boundary,
    Forbidden,
}

impl GridCell {
    pub fn label(&self) -> &'static str {
        match self {
            GridCell::Mt => "MT",
            GridCell::Ml => "ML",
            GridCell::DualMl => "DUAL_ML",
            GridCell::Boundary => "BOUNDARY",
            GridCell::Forbidden => "FORBIDDEN",
        }
    }
}

impl From<Regime> for GridCell {
    fn from(r: Regime) -> GridCell {
        match r {
            Regime::Mt => GridCell::Mt,
            Regime::Ml => GridCell::Ml,
            Regime::DualMl => GridCell::DualMl,
            Regime::Boundary => GridCell::Boundary,
        }
    }
}

/// Regime of a point `(E, sigma)` in units of `Emax`, with `E0 = 0`.
pub fn classify_point(e: f64, de: f64) -> GridCell {
    if de > (e * (1.0 - e)).max(0.0).sqrt() {
        return GridCell::Forbidden;
    }
    match EnergyMoments::from_summary(0.0, 1.0, e, de) {
        Ok(m) => classify_regime(&m).regime.into(),
        Err(_) => GridCell::Forbidden,
    }
}

/// Regime diagram sampled at cell centres. `cells[i][j]` belongs to
/// `(e_axis[i], de_axis[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeGrid {
    pub e_axis: Vec<f64>,
    pub de_axis: Vec<f64>,
    pub cells: Vec<Vec<GridCell>>,
}

impl RegimeGrid {
    pub fn resolution(&self) -> usize {
        self.e_axis.len()
    }

    /// Cell containing the point `(e, de)`.
    pub fn cell_at(&self, e: f64, de: f64) -> GridCell {
        let n = self.resolution();
        let index = |v: f64| ((v * n as f64).floor().max(0.0) as usize).min(n - 1);
        self.cells[index(e)][index(de)]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("e,de,cell\n");
        for (i, e) in self.e_axis.iter().enumerate() {
            for (j, de) in self.de_axis.iter().enumerate() {
                let _ = writeln!(out, "{},{},{}", fmt_f64(*e), fmt_f64(*de), self.cells[i][j].label());
            }
        }
        out
    }
}

pub fn fig1_dataset(resolution: usize) -> Result<RegimeGrid> {
    if resolution < 2 {
        return Err(Error::OutOfRange { name: "resolution", value: resolution as f64, range: "[2, inf)" });
    }
    let axis: Vec<f64> = (0..resolution).map(|i| (i as f64 + 0.5) / resolution as f64).collect();
    let cells = axis
        .iter()
        .map(|&e| axis.iter().map(|&de| classify_point(e, de)).collect())
        .collect();
    Ok(RegimeGrid { e_axis: axis.clone(), de_axis: axis, cells })
}
