//! Scan drivers for each experiment kind.

use std::sync::atomic::Ordering;
use std::time::Instant;

use rayon::prelude::*;
use rayon::ThreadPool;
use symdesign::dynamics::{
    deep_thermalization_scan, fit_power_law, long_time_average, Disorder, MeanStderr, Method, ScanPoint,
    DENSE_SITES, MATRIX_FREE_SITES,
};
use symdesign::ensemble::{delta_prime_t, delta_ts, violation, BasisSpec, MeasurementBasis, DENSE_BASIS_SITES};
use symdesign::linalg::{sample_haar_state, SystemGeometry};
use symdesign::moments::{mixture_moment, trace_distance, z2_sigmax_projected_moment, SectorFrame};
use symdesign::rng::stream_rng;
use symdesign::symmetry::{sample_symmetric_state, Chain, SectorProjector, DENSE_PROJECTOR_LIMIT};

use crate::config::{BasisConfig, Config, DisorderName, ExperimentKind, MomentMode, SectorConfig};
use crate::output::{Record, Timing, SCHEMA_VERSION};
use crate::{CliError, INTERRUPTED};

/// Largest state vector any experiment allocates.
pub const MAX_STATE_DIM: usize = 1 << MATRIX_FREE_SITES;

/// Stream coordinate of Haar-random benchmark generators.
const HAAR_STREAM: u64 = 0x4841_4152;

/// Finished records, per-point timings and whether the run was cut short.
#[derive(Debug, Default)]
pub struct Outcome {
    pub records: Vec<Record>,
    pub timings: Vec<Timing>,
    pub truncated: bool,
}

struct Runner<'a> {
    config: &'a Config,
    pool: &'a ThreadPool,
    out: Outcome,
}

impl Runner<'_> {
    /// Runs one scan point unless an interrupt arrived; returns `false` once
    /// the run is truncated.
    fn point(
        &mut self,
        label: String,
        f: impl FnOnce(&ThreadPool) -> Result<Vec<Record>, CliError>,
    ) -> Result<bool, CliError> {
        if INTERRUPTED.load(Ordering::SeqCst) {
            self.out.truncated = true;
            return Ok(false);
        }
        let start = Instant::now();
        let records = f(self.pool)?;
        self.out.records.extend(records);
        self.out.timings.push(Timing { point: label, seconds: start.elapsed().as_secs_f64() });
        Ok(true)
    }
}

fn base(config: &Config, n_b: usize) -> Record {
    let n_a = config.geometry.n_a;
    Record {
        schema: SCHEMA_VERSION,
        experiment: config.experiment.name().into(),
        id: config.id(),
        n: n_a + n_b,
        n_a,
        n_b,
        ..Default::default()
    }
}

fn geometry(config: &Config, n_b: usize) -> Result<SystemGeometry, CliError> {
    Ok(SystemGeometry::with_local_dim(config.geometry.n_a, n_b, config.geometry.local_dim)?)
}

fn sector_with(r: Record, s: &SectorConfig) -> Record {
    Record { sector: Some(s.name().into()), k: s.label(), ..r }
}

/// Evaluates `f` on every sample index in parallel, keeping index order.
fn per_sample<T: Send>(
    pool: &ThreadPool,
    samples: usize,
    f: impl Fn(usize) -> Result<T, CliError> + Sync + Send,
) -> Result<Vec<T>, CliError> {
    pool.install(|| (0..samples).into_par_iter().map(f).collect())
}

/// Column `j` of a table of per-sample rows.
fn column(rows: &[Vec<f64>], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r[j]).collect()
}

fn stats(r: Record, quantity: &str, s: MeanStderr) -> Record {
    Record { quantity: quantity.into(), value: s.mean, stderr: Some(s.stderr), samples: Some(s.samples), ..r }
}

/// Checks every size limit of the planned scan without computing anything;
/// returns one label per scan point.
pub fn preflight(config: &Config) -> Result<Vec<String>, CliError> {
    let budget = config.budget.budget();
    let d = config.geometry.local_dim;
    let mut points = Vec::new();
    for n_b in config.n_b_values() {
        let geom = geometry(config, n_b)?;
        let n = geom.n_total;
        let dim = d.checked_pow(n as u32).filter(|&x| x <= MAX_STATE_DIM).ok_or_else(|| {
            CliError::Budget(format!("N = {n} sites of dimension {d} exceed the state limit of {MAX_STATE_DIM}"))
        })?;
        let sector_mode = config.experiment == ExperimentKind::MomentCheck && config.moment_mode() == MomentMode::Sector;
        if !sector_mode && config.experiment != ExperimentKind::ViolationScan {
            for &t in &config.t {
                budget.check(geom.dim_a(), t)?;
            }
        }
        for (i, b) in config.basis.iter().enumerate() {
            if b.is_dense() && n_b > DENSE_BASIS_SITES {
                return Err(CliError::Budget(format!(
                    "basis {i} ({b:?}) is dense and limited to N_B <= {DENSE_BASIS_SITES}, got {n_b}"
                )));
            }
            if let BasisConfig::Custom { re, .. } = b {
                if re.len() != geom.dim_b() {
                    return Err(CliError::Config(format!(
                        "custom basis {i} has dimension {}, N_B = {n_b} needs {}",
                        re.len(),
                        geom.dim_b()
                    )));
                }
            }
        }
        for s in &config.sector {
            let p = SectorProjector::new(s.kind(n)?, Chain::from(geom))?;
            p.rank()?;
            if sector_mode {
                if dim > DENSE_PROJECTOR_LIMIT {
                    return Err(CliError::Budget(format!(
                        "moment-check needs a dense projector; {dim} exceeds {DENSE_PROJECTOR_LIMIT}"
                    )));
                }
                for &t in &config.t {
                    budget.check(p.rank()?, t)?;
                }
            }
            points.push(format!("n_b={n_b} sector={}{}", s.name(), s.label().map_or(String::new(), |k| format!(" k={k}"))));
        }
        if config.experiment == ExperimentKind::Dynamics {
            let dynamics = config.dynamics();
            if dynamics.method(n) == Method::DenseEig && n > DENSE_SITES {
                return Err(CliError::Budget(format!("dense evolution is limited to N <= {DENSE_SITES}, got {n}")));
            }
            let variances = if dynamics.variances.is_empty() { vec![0.0] } else { dynamics.variances.clone() };
            for v in variances {
                points.push(format!("n_b={n_b} v={v}"));
            }
        }
    }
    Ok(points)
}

pub fn run(config: &Config, pool: &ThreadPool) -> Result<Outcome, CliError> {
    let mut runner = Runner { config, pool, out: Outcome::default() };
    match config.experiment {
        ExperimentKind::DesignScan => design_scan(&mut runner, "delta")?,
        ExperimentKind::RmtBaseline => design_scan(&mut runner, "rmt_delta")?,
        ExperimentKind::ViolationScan => violation_scan(&mut runner)?,
        ExperimentKind::MomentCheck => match config.moment_mode() {
            MomentMode::Sector => moment_check(&mut runner)?,
            MomentMode::Z2Sigmax => z2_sigmax_check(&mut runner)?,
        },
        ExperimentKind::Dynamics => dynamics(&mut runner)?,
        ExperimentKind::TransitionScan => transition_scan(&mut runner)?,
    }
    Ok(runner.out)
}

fn bases(config: &Config, n_b: usize) -> Result<Vec<(MeasurementBasis, Option<f64>)>, CliError> {
    let d = config.geometry.local_dim;
    let configs = if config.basis.is_empty() { vec![BasisConfig::Computational] } else { config.basis.clone() };
    configs
        .iter()
        .enumerate()
        .map(|(i, b)| Ok((b.spec(config.seed, i, n_b)?.build(n_b, d)?, b.alpha())))
        .collect()
}

/// Mean `Delta^(t)` of sector generators (and optionally Haar generators)
/// for every basis.
fn design_scan(runner: &mut Runner<'_>, quantity: &str) -> Result<(), CliError> {
    let config = runner.config;
    let budget = config.budget.budget();
    let haar = config.design.as_ref().is_some_and(|d| d.haar_benchmark);
    for n_b in config.n_b_values() {
        let geom = geometry(config, n_b)?;
        let bases = bases(config, n_b)?;
        let mut groups: Vec<Option<(usize, &SectorConfig)>> = config.sector.iter().enumerate().map(Some).collect();
        if haar {
            groups.push(None);
        }
        for group in groups {
            let label = match group {
                Some((_, s)) => format!("n_b={n_b} sector={}", s.name()),
                None => format!("n_b={n_b} haar"),
            };
            let proceed = runner.point(label, |pool| {
                let p = match group {
                    Some((_, s)) => Some(SectorProjector::new(s.kind(geom.n_total)?, Chain::from(geom))?),
                    None => None,
                };
                let rows = per_sample(pool, config.samples, |i| {
                    let state = match (&p, group) {
                        (Some(p), Some((si, _))) => {
                            let mut rng = stream_rng(config.seed, config.stream(&[n_b as u64, si as u64, i as u64]));
                            sample_symmetric_state(p, &mut rng)?.state
                        }
                        _ => {
                            let mut rng = stream_rng(config.seed, config.stream(&[n_b as u64, HAAR_STREAM, i as u64]));
                            sample_haar_state(geom.dim(), &mut rng)
                        }
                    };
                    let mut row = Vec::with_capacity(bases.len() * config.t.len());
                    for (basis, _) in &bases {
                        row.extend(delta_ts(&state, basis, &config.t, &geom, &budget)?);
                    }
                    Ok(row)
                })?;
                let mut out = Vec::new();
                for (bi, (basis, alpha)) in bases.iter().enumerate() {
                    for (ti, &t) in config.t.iter().enumerate() {
                        let r = base(config, n_b);
                        let r = match group {
                            Some((_, s)) => sector_with(r, s),
                            None => Record { sector: Some("haar".into()), ..r },
                        };
                        let r = Record { t: Some(t), basis: Some(basis.family().into()), alpha: *alpha, ..r };
                        out.push(stats(r, quantity, MeanStderr::of(&column(&rows, bi * config.t.len() + ti))));
                    }
                }
                Ok(out)
            })?;
            if !proceed {
                return Ok(());
            }
        }
    }
    Ok(())
}

fn violation_scan(runner: &mut Runner<'_>) -> Result<(), CliError> {
    let config = runner.config;
    let profile = config.violation.as_ref().is_some_and(|v| v.profile);
    for n_b in config.n_b_values() {
        let geom = geometry(config, n_b)?;
        for s in &config.sector {
            let proceed = runner.point(format!("n_b={n_b} sector={}", s.name()), |pool| {
                let p = SectorProjector::new(s.kind(geom.n_total)?, Chain::from(geom))?;
                let bases = bases(config, n_b)?;
                let reports = pool.install(|| {
                    bases.par_iter().map(|(b, _)| violation(&p, b, &geom)).collect::<Result<Vec<_>, _>>()
                })?;
                let mut out = Vec::new();
                for ((basis, alpha), report) in bases.iter().zip(&reports) {
                    let r = Record { basis: Some(basis.family().into()), alpha: *alpha, ..sector_with(base(config, n_b), s) };
                    out.push(Record { quantity: "violation".into(), value: report.total, ..r.clone() });
                    out.push(Record { quantity: "violation_normalized".into(), value: report.normalized, ..r.clone() });
                    if profile {
                        for (i, &v) in report.profile.iter().enumerate() {
                            out.push(Record { quantity: "violation_profile".into(), value: v, index: Some(i), ..r.clone() });
                        }
                    }
                }
                Ok(out)
            })?;
            if !proceed {
                return Ok(());
            }
        }
    }
    Ok(())
}

/// Sampled sector states against the analytic sector moment, compared on
/// the range of the projector.
fn moment_check(runner: &mut Runner<'_>) -> Result<(), CliError> {
    let config = runner.config;
    let budget = config.budget.budget();
    for n_b in config.n_b_values() {
        let geom = geometry(config, n_b)?;
        for (si, s) in config.sector.iter().enumerate() {
            let proceed = runner.point(format!("n_b={n_b} sector={}", s.name()), |pool| {
                let p = SectorProjector::new(s.kind(geom.n_total)?, Chain::from(geom))?;
                let frame = SectorFrame::new(&p)?;
                let states = per_sample(pool, config.samples, |i| {
                    let mut rng = stream_rng(config.seed, config.stream(&[n_b as u64, si as u64, i as u64]));
                    Ok(frame.compress(&sample_symmetric_state(&p, &mut rng)?.state)?)
                })?;
                let weights = vec![1.0 / states.len() as f64; states.len()];
                let mut out = Vec::new();
                for &t in &config.t {
                    let empirical = mixture_moment(&weights, &states, t, &budget)?;
                    let analytic = frame.moment(&p, t, &budget)?;
                    out.push(Record {
                        t: Some(t),
                        quantity: "moment_distance".into(),
                        value: trace_distance(&empirical, &analytic)?,
                        samples: Some(states.len()),
                        ..sector_with(base(config, n_b), s)
                    });
                }
                Ok(out)
            })?;
            if !proceed {
                return Ok(());
            }
        }
    }
    Ok(())
}

/// `Delta'^(t)` of sigma^x-measured Z2 generators against the Z2 reference.
fn z2_sigmax_check(runner: &mut Runner<'_>) -> Result<(), CliError> {
    let config = runner.config;
    let budget = config.budget.budget();
    for n_b in config.n_b_values() {
        let geom = geometry(config, n_b)?;
        let basis = BasisSpec::SigmaX.build(n_b, geom.local_dim)?;
        let references = config
            .t
            .iter()
            .map(|&t| z2_sigmax_projected_moment(geom.n_a, t, &budget))
            .collect::<Result<Vec<_>, _>>()?;
        for (si, s) in config.sector.iter().enumerate() {
            let proceed = runner.point(format!("n_b={n_b} sector={}", s.name()), |pool| {
                let p = SectorProjector::new(s.kind(geom.n_total)?, Chain::from(geom))?;
                let rows = per_sample(pool, config.samples, |i| {
                    let mut rng = stream_rng(config.seed, config.stream(&[n_b as u64, si as u64, i as u64]));
                    let state = sample_symmetric_state(&p, &mut rng)?.state;
                    references
                        .iter()
                        .map(|m| Ok(delta_prime_t(&state, &basis, m, &geom, &budget)?))
                        .collect::<Result<Vec<f64>, CliError>>()
                })?;
                Ok(config
                    .t
                    .iter()
                    .enumerate()
                    .map(|(ti, &t)| {
                        let r = Record { t: Some(t), basis: Some(basis.family().into()), ..sector_with(base(config, n_b), s) };
                        stats(r, "delta_prime", MeanStderr::of(&column(&rows, ti)))
                    })
                    .collect())
            })?;
            if !proceed {
                return Ok(());
            }
        }
    }
    Ok(())
}

/// Z2 generators measured in sigma^x on all `B` sites but the last, which
/// uses the eigenbasis of `alpha sigma^z + (1 - alpha) sigma^x`.
fn transition_scan(runner: &mut Runner<'_>) -> Result<(), CliError> {
    let config = runner.config;
    let budget = config.budget.budget();
    let alphas = config.transition().alphas();
    for n_b in config.n_b_values() {
        let geom = geometry(config, n_b)?;
        let bases = alphas
            .iter()
            .map(|&alpha| BasisSpec::MixedLastSite { alpha }.build(n_b, geom.local_dim))
            .collect::<Result<Vec<_>, _>>()?;
        for (si, s) in config.sector.iter().enumerate() {
            let proceed = runner.point(format!("n_b={n_b} sector={}", s.name()), |pool| {
                let p = SectorProjector::new(s.kind(geom.n_total)?, Chain::from(geom))?;
                let rows = per_sample(pool, config.samples, |i| {
                    let mut rng = stream_rng(config.seed, config.stream(&[n_b as u64, si as u64, i as u64]));
                    let state = sample_symmetric_state(&p, &mut rng)?.state;
                    let mut row = Vec::new();
                    for basis in &bases {
                        row.extend(delta_ts(&state, basis, &config.t, &geom, &budget)?);
                    }
                    Ok(row)
                })?;
                let violations = pool.install(|| {
                    bases.par_iter().map(|b| violation(&p, b, &geom)).collect::<Result<Vec<_>, _>>()
                })?;
                let mut out = Vec::new();
                for (ai, (&alpha, basis)) in alphas.iter().zip(&bases).enumerate() {
                    let r = Record {
                        basis: Some(basis.family().into()),
                        alpha: Some(alpha),
                        ..sector_with(base(config, n_b), s)
                    };
                    for (ti, &t) in config.t.iter().enumerate() {
                        let column = column(&rows, ai * config.t.len() + ti);
                        out.push(stats(Record { t: Some(t), ..r.clone() }, "delta", MeanStderr::of(&column)));
                    }
                    out.push(Record { quantity: "violation_normalized".into(), value: violations[ai].normalized, ..r });
                }
                Ok(out)
            })?;
            if !proceed {
                return Ok(());
            }
        }
    }
    Ok(())
}

fn dynamics(runner: &mut Runner<'_>) -> Result<(), CliError> {
    let config = runner.config;
    let budget = config.budget.budget();
    let d = config.dynamics();
    let times = d.time_grid().times()?;
    let window = (d.fit_window[0], d.fit_window[1]);
    let variances: Vec<Option<f64>> =
        if d.variances.is_empty() { vec![None] } else { d.variances.iter().copied().map(Some).collect() };
    for n_b in config.n_b_values() {
        let geom = geometry(config, n_b)?;
        let n = geom.n_total;
        let method = d.method(n);
        let bases = bases(config, n_b)?;
        for (vi, v) in variances.iter().enumerate() {
            let label = format!("n_b={n_b} v={}", v.unwrap_or(0.0));
            let proceed = runner.point(label, |pool| {
                let realizations = if v.is_some() { d.realizations } else { 1 };
                let mut out = Vec::new();
                for (basis, alpha) in &bases {
                    let series: Vec<Vec<ScanPoint>> = per_sample(pool, realizations, |r| {
                        let mut spec = d.ising(n);
                        if let Some(variance) = *v {
                            let seed = config.stream(&[n_b as u64, vi as u64, r as u64]) ^ config.seed;
                            spec.disorder = match d.disorder {
                                DisorderName::Bond => Disorder::Bond { variance, seed },
                                DisorderName::Field => Disorder::Field { variance, seed },
                                DisorderName::None => Disorder::None,
                            };
                        }
                        Ok(deep_thermalization_scan(&spec, method, &times, basis, &config.t, &geom, &budget)?)
                    })?;
                    let r = Record { basis: Some(basis.family().into()), alpha: *alpha, v: *v, ..base(config, n_b) };
                    for (ti, &t) in config.t.iter().enumerate() {
                        let mut means = Vec::with_capacity(times.len());
                        for (pi, &tau) in times.iter().enumerate() {
                            let values: Vec<f64> = series.iter().map(|s| s[pi].deltas[ti]).collect();
                            let s = MeanStderr::of(&values);
                            means.push(s.mean);
                            out.push(stats(Record { t: Some(t), tau: Some(tau), ..r.clone() }, "delta", s));
                        }
                        let fit = fit_power_law(&times, &means, window)?;
                        let rt = Record { t: Some(t), ..r.clone() };
                        out.push(Record {
                            quantity: "exponent".into(),
                            value: fit.exponent,
                            stderr: Some(fit.stderr),
                            samples: Some(fit.points),
                            ..rt.clone()
                        });
                        out.push(Record { quantity: "fit_r2".into(), value: fit.r2, samples: Some(fit.points), ..rt.clone() });
                        out.push(Record {
                            quantity: "long_time_average".into(),
                            value: long_time_average(&means, d.long_time_fraction)?,
                            samples: Some(realizations),
                            ..rt
                        });
                    }
                    for (pi, &tau) in times.iter().enumerate() {
                        let values: Vec<f64> = series.iter().map(|s| s[pi].schmidt_delta1).collect();
                        out.push(stats(Record { tau: Some(tau), t: Some(1), ..r.clone() }, "schmidt_delta1", MeanStderr::of(&values)));
                    }
                }
                Ok(out)
            })?;
            if !proceed {
                return Ok(());
            }
        }
    }
    Ok(())
}
