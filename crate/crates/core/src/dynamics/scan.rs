use rand::Rng;

use super::evolve::{Method, Propagator};
use super::ising::{build_ising, IsingSpec};
use crate::ensemble::{delta_ts, MeasurementBasis};
use crate::linalg::{schmidt_spectrum, StateVector, SystemGeometry};
use crate::moments::MomentBudget;
use crate::symmetry::{sample_symmetric_state, Chain, SectorKind, SectorProjector};
use crate::{Error, Result};

/// Evolution times.
#[derive(Clone, Debug, PartialEq)]
pub enum TimeGrid {
    /// `log_points` logarithmically spaced times in `[start, switch]`, then
    /// `linear_points` evenly spaced times in `(switch, end]`.
    LogLinear { start: f64, switch: f64, end: f64, log_points: usize, linear_points: usize },
    Explicit(Vec<f64>),
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid::LogLinear { start: 0.1, switch: 10.0, end: 50.0, log_points: 41, linear_points: 40 }
    }
}

impl TimeGrid {
    pub fn times(&self) -> Result<Vec<f64>> {
        let times = match self {
            TimeGrid::Explicit(t) => t.clone(),
            &TimeGrid::LogLinear { start, switch, end, log_points, linear_points } => {
                if !(start > 0.0 && switch > start && end >= switch) || log_points < 2 {
                    return Err(Error::Argument(format!(
                        "time grid needs 0 < start < switch <= end and log_points >= 2, got \
                         {start}, {switch}, {end}, {log_points}"
                    )));
                }
                let ratio = (switch / start).ln() / (log_points - 1) as f64;
                let mut t: Vec<f64> = (0..log_points).map(|i| start * (ratio * i as f64).exp()).collect();
                t[log_points - 1] = switch;
                let step = (end - switch) / linear_points.max(1) as f64;
                t.extend((1..=linear_points).map(|i| switch + step * i as f64));
                t
            }
        };
        if times.is_empty() {
            return Err(Error::Argument("empty time grid".into()));
        }
        if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Argument("times must be finite, >= 0 and strictly increasing".into()));
        }
        Ok(times)
    }
}

/// `Delta^(t)` of `|psi(tau)>` at one time.
#[derive(Clone, Debug)]
pub struct ScanPoint {
    pub tau: f64,
    /// One value per requested order.
    pub deltas: Vec<f64>,
    /// `sum_j |gamma_j^2 - d^-N_A|` from the Schmidt spectrum.
    pub schmidt_delta1: f64,
    pub energy: f64,
    pub norm: f64,
}

/// `sum_j |gamma_j^2 - 1/d_A|` over all `d_A` eigenvalues of the reduced state.
pub fn schmidt_delta1(state: &StateVector, geom: &SystemGeometry) -> Result<f64> {
    let spectrum = schmidt_spectrum(state, geom)?;
    let da = geom.dim_a();
    let uniform = 1.0 / da as f64;
    let present: f64 = spectrum.iter().take(da).map(|g| (g - uniform).abs()).sum();
    Ok(present + uniform * da.saturating_sub(spectrum.len()) as f64)
}

/// `Delta^(t)(tau)` for the state `e^{-i tau H}|0...0>`.
pub fn deep_thermalization_scan(
    spec: &IsingSpec,
    method: Method,
    times: &[f64],
    basis: &MeasurementBasis,
    ts: &[usize],
    geom: &SystemGeometry,
    budget: &MomentBudget,
) -> Result<Vec<ScanPoint>> {
    if spec.n != geom.n_total || geom.local_dim != 2 {
        return Err(Error::Contract(format!(
            "Ising chain of {} sites for geometry {geom:?}",
            spec.n
        )));
    }
    let h = build_ising(spec)?;
    let propagator = Propagator::new(&h, method)?;
    let initial = StateVector::basis_state(geom.dim(), 0);
    let states = propagator.evolve_series(&initial, times)?;
    times
        .iter()
        .zip(&states)
        .map(|(&tau, psi)| {
            Ok(ScanPoint {
                tau,
                deltas: delta_ts(psi, basis, ts, geom, budget)?,
                schmidt_delta1: schmidt_delta1(psi, geom)?,
                energy: h.expectation(psi)?,
                norm: psi.norm(),
            })
        })
        .collect()
}

/// Mean and standard error of the mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanStderr {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl MeanStderr {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr, samples: n }
    }
}

/// Symmetry of the random-state ensemble behind a saturation baseline.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RmtSector {
    TranslationOnly { k: usize },
    /// Common `+1` eigenspace of translation and all site reflections.
    TranslationPlusReflections,
}

impl RmtSector {
    pub fn kind(&self, n: usize) -> SectorKind {
        match *self {
            RmtSector::TranslationOnly { k } => SectorKind::Translation { k },
            RmtSector::TranslationPlusReflections => SectorKind::translation_plus_reflections(n),
        }
    }
}

/// Mean `Delta^(t)` over `samples` random states of the sector, one value
/// per order. `rng_for(i)` supplies the stream of sample `i`.
pub fn rmt_baseline<R: Rng>(
    sector: RmtSector,
    geom: &SystemGeometry,
    basis: &MeasurementBasis,
    ts: &[usize],
    samples: usize,
    mut rng_for: impl FnMut(usize) -> R,
    budget: &MomentBudget,
) -> Result<Vec<MeanStderr>> {
    if samples == 0 {
        return Err(Error::Argument("baseline needs at least one sample".into()));
    }
    let p = SectorProjector::new(sector.kind(geom.n_total), Chain::from(*geom))?;
    let mut values = vec![Vec::with_capacity(samples); ts.len()];
    for i in 0..samples {
        let s = sample_symmetric_state(&p, &mut rng_for(i))?;
        for (slot, d) in values.iter_mut().zip(delta_ts(&s.state, basis, ts, geom, budget)?) {
            slot.push(d);
        }
    }
    Ok(values.iter().map(|v| MeanStderr::of(v)).collect())
}

/// Least-squares fit of `log Delta = a + exponent log tau`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub stderr: f64,
    pub r2: f64,
    pub points: usize,
}

/// Fits a power law to the points with `tau` inside `window` (inclusive).
///
/// ```
/// use symdesign::dynamics::fit_power_law;
/// let taus: Vec<f64> = (1..=8).map(|i| 0.5 * i as f64).collect();
/// let values: Vec<f64> = taus.iter().map(|t: &f64| t.powf(-2.2)).collect();
/// let fit = fit_power_law(&taus, &values, (1.0, 4.0)).unwrap();
/// assert!((fit.exponent + 2.2).abs() < 1e-9);
/// ```
pub fn fit_power_law(taus: &[f64], values: &[f64], window: (f64, f64)) -> Result<PowerLawFit> {
    if taus.len() != values.len() {
        return Err(Error::Contract("times and values differ in length".into()));
    }
    let pts: Vec<(f64, f64)> = taus
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(&t, &v)| (t, v))
        .collect();
    if pts.len() < 4 {
        return Err(Error::Argument(format!(
            "power-law fit needs at least 4 points in [{}, {}], found {}",
            window.0,
            window.1,
            pts.len()
        )));
    }
    if pts.iter().any(|(t, v)| *t <= 0.0 || *v <= 0.0) {
        return Err(Error::Argument("power-law fit needs positive times and values".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    let stderr = (sse / (n - 2.0) / sxx).sqrt();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(PowerLawFit { exponent: slope, stderr, r2, points: pts.len() })
}

/// Mean over the last `fraction` of the values (at least one point).
pub fn long_time_average(values: &[f64], fraction: f64) -> Result<f64> {
    if values.is_empty() || !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Argument("long-time average needs values and a fraction in (0, 1]".into()));
    }
    let count = ((values.len() as f64 * fraction).round() as usize).max(1);
    let tail = &values[values.len() - count..];
    Ok(tail.iter().sum::<f64>() / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::BasisSpec;

    #[test]
    fn default_grid_shape() {
        let t = TimeGrid::default().times().unwrap();
        assert_eq!(t.len(), 81);
        assert!((t[0] - 0.1).abs() < 1e-15 && t[40] == 10.0 && (t[80] - 50.0).abs() < 1e-12);
    }

    #[test]
    fn fits() {
        let taus: Vec<f64> = (1..=20).map(|i| 0.25 * i as f64).collect();
        let flat = vec![0.3; taus.len()];
        let f = fit_power_law(&taus, &flat, (1.0, 4.0)).unwrap();
        assert!(f.exponent.abs() < 1e-12);
        assert!(fit_power_law(&taus[..3], &flat[..3], (0.0, 10.0)).is_err());
    }

    #[test]
    fn scan_starts_from_pure_product_state() {
        let geom = SystemGeometry::new(3, 3).unwrap();
        let basis = BasisSpec::Computational.build(3, 2).unwrap();
        let pts = deep_thermalization_scan(
            &IsingSpec::chaotic(6),
            Method::DenseEig,
            &[0.0, 1.0, 2.0],
            &basis,
            &[1, 2],
            &geom,
            &MomentBudget::default(),
        )
        .unwrap();
        assert!((pts[0].deltas[0] - 1.75).abs() < 1e-12);
        for p in &pts {
            assert!((p.deltas[0] - p.schmidt_delta1).abs() < 1e-10);
            assert!((p.energy - pts[0].energy).abs() < 1e-8);
        }
        assert!(pts[2].deltas[0] < pts[0].deltas[0]);
    }

    #[test]
    fn long_time_tail() {
        let v: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert_eq!(long_time_average(&v, 0.3).unwrap(), 8.0);
    }
}
