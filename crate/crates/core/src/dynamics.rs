//! Quench dynamics of product initial states, full spectra and revival
//! statistics.
//!
//! An initial state `|0>^n0 |1>^n1` overlaps each `l3 = 0` sector in exactly
//! one row-0 basis state, with probability `w_lambda`. Each sector is
//! diagonalized once and its contribution propagated with eigenphases; the
//! sector contributions are summed in ascending `p`, so results do not depend
//! on how many worker threads evaluate the sectors.

use num_bigint::BigUint;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::hamiltonian::{block_from_ops, observable_diagonal, DriveParams, Observable};
use crate::irrep::{build_basis, collective_operators, enumerate_partitions, multiplicity, Partition};
use crate::linalg::{eigvalsh, HermitianEigen};

/// Product initial state with `n0` atoms in `|0>`, `n1` in `|1>` and none in `|r>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialSpec {
    pub n0: usize,
    pub n1: usize,
}

impl InitialSpec {
    pub fn new(n0: usize, n1: usize) -> Result<Self> {
        if n0 + n1 == 0 {
            return Err(Error::invalid("initial state must contain at least one atom"));
        }
        Ok(Self { n0, n1 })
    }

    pub fn n(&self) -> usize {
        self.n0 + self.n1
    }
}

/// Pure state inside one sector together with the sector probability.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockState {
    pub partition: Partition,
    pub weight: f64,
    pub amplitudes: Vec<C64>,
}

/// Expectation values sampled on a strictly increasing time grid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub fn validate_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("time grid contains non-finite values"));
    }
    if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::invalid(format!(
            "time grid must be strictly increasing, found {} followed by {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Uniform grid `0, dt, 2 dt, ...` up to and including `t_max` (within rounding).
pub fn uniform_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::invalid(format!("t_max must be finite and non-negative, got {t_max}")));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    let steps = (t_max / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|i| i as f64 * dt).collect())
}

/// Default sampling step `0.1 / (Omega sqrt(n))`, fine enough for the
/// collectively enhanced Rabi oscillations.
pub fn default_dt(n: usize, drive: &DriveParams) -> f64 {
    let omega = drive.reference_frequency();
    let omega = if omega > 0.0 { omega } else { 1.0 };
    0.1 / (omega * (n.max(1) as f64).sqrt())
}

fn ln_weight(p: usize, q: usize, n0: usize, n1: usize) -> f64 {
    ((p + 1) as f64).ln() + ln_factorial(n0 as u64) + ln_factorial(n1 as u64)
        - ln_factorial(q as u64)
        - ln_factorial((p + q + 1) as u64)
}

fn exact_weight(p: usize, q: usize, n0: usize, n1: usize) -> f64 {
    let fact = |k: usize| (1..=k).fold(1.0f64, |acc, i| acc * i as f64);
    (p + 1) as f64 * fact(n0) * fact(n1) / (fact(q) * fact(p + q + 1))
}

/// Probability of each `l3 = 0` sector for the product state `spec`.
///
/// `w = (p+1) n0! n1! / (q! (p+q+1)!)` for `|n0 - n1| <= p <= n`; sectors with
/// zero weight are omitted. Returned in ascending `p`.
pub fn initial_weights(spec: &InitialSpec) -> Vec<(Partition, f64)> {
    let (n0, n1) = (spec.n0, spec.n1);
    let n = spec.n();
    let p_min = n0.abs_diff(n1);
    (p_min..=n)
        .step_by(2)
        .map(|p| {
            let q = (n - p) / 2;
            let w = if n > 20 {
                ln_weight(p, q, n0, n1).exp()
            } else {
                exact_weight(p, q, n0, n1)
            };
            (Partition::from_pq(p, q, 0), w)
        })
        .filter(|&(_, w)| w > 0.0)
        .collect()
}

/// Sector states of the product initial state: the unique row-0 basis state
/// with the right occupations in each contributing sector.
pub fn initial_block_states(spec: &InitialSpec) -> Result<Vec<BlockState>> {
    initial_weights(spec)
        .into_iter()
        .map(|(partition, weight)| {
            let basis = build_basis(&partition)?;
            let idx = basis.top_row_state(spec.n0, spec.n1).ok_or_else(|| {
                Error::Numerical(format!(
                    "sector {partition} has no row-0 state with n0 = {}, n1 = {}",
                    spec.n0, spec.n1
                ))
            })?;
            let mut amplitudes = vec![C64::new(0.0, 0.0); basis.dim()];
            amplitudes[idx] = C64::new(1.0, 0.0);
            Ok(BlockState { partition, weight, amplitudes })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    /// Sectors whose weight is at or below this value are skipped. Their
    /// contribution to an occupation expectation is bounded by
    /// `weight * n`, so a tiny cutoff changes nothing at double precision.
    pub weight_cutoff: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { weight_cutoff: 0.0 }
    }
}

/// Time series of a diagonal observable for an arbitrary set of sector states.
pub fn evolve_block_states(
    states: &[BlockState],
    drive: &DriveParams,
    observable: Observable,
    times: &[f64],
) -> Result<TimeSeries> {
    drive.validate()?;
    validate_times(times)?;
    let per_block: Vec<Vec<f64>> = states
        .par_iter()
        .map(|state| -> Result<Vec<f64>> {
            let basis = build_basis(&state.partition)?;
            let ops = collective_operators(&basis);
            let h = block_from_ops(&basis, &ops, drive);
            let eig = HermitianEigen::new(&h.matrix)?;
            let diag = observable_diagonal(&basis, observable);
            Ok(eig.diagonal_expectations(&state.amplitudes, &diag, times))
        })
        .collect::<Result<_>>()?;

    let mut values = vec![0.0; times.len()];
    for (state, contribution) in states.iter().zip(&per_block) {
        for (acc, x) in values.iter_mut().zip(contribution) {
            *acc += state.weight * x;
        }
    }
    Ok(TimeSeries { times: times.to_vec(), values })
}

/// `<A(t)>` after a quench from the product state `spec`.
pub fn evolve_expectation(
    spec: &InitialSpec,
    drive: &DriveParams,
    observable: Observable,
    times: &[f64],
    options: &EvolveOptions,
) -> Result<TimeSeries> {
    validate_times(times)?;
    let mut states = initial_block_states(spec)?;
    states.retain(|s| s.weight > options.weight_cutoff);
    states.sort_by_key(|s| s.partition.p());
    evolve_block_states(&states, drive, observable, times)
}

/// One eigenvalue of a sector block, tagged with the sector multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub eigenvalue: f64,
    pub multiplicity: BigUint,
    pub partition: Partition,
}

/// Eigenvalues of every blockade-relevant sector block, in the sector order
/// of [`enumerate_partitions`] and ascending within a sector.
pub fn full_spectrum(n: usize, drive: &DriveParams) -> Result<Vec<SpectrumEntry>> {
    drive.validate()?;
    let partitions = enumerate_partitions(n, true)?;
    let blocks: Vec<Vec<f64>> = partitions
        .par_iter()
        .map(|lam| -> Result<Vec<f64>> {
            let basis = build_basis(lam)?;
            let ops = collective_operators(&basis);
            eigvalsh(&block_from_ops(&basis, &ops, drive).matrix)
        })
        .collect::<Result<_>>()?;
    Ok(partitions
        .iter()
        .zip(blocks)
        .flat_map(|(lam, values)| {
            let mu = multiplicity(lam);
            values.into_iter().map(move |eigenvalue| SpectrumEntry {
                eigenvalue,
                multiplicity: mu.clone(),
                partition: *lam,
            })
        })
        .collect())
}

/// Largest collective enhancement `sqrt((n + p)/2)` of the `|1> <-> |r>`
/// Rabi frequency within a sector with `l3 = 0`.
///
/// Sectors with `l3 = 1` have no blockade-allowed Rydberg transition and are
/// rejected.
pub fn max_rabi_enhancement(lambda: &Partition) -> Result<f64> {
    if lambda.lambda3() != 0 {
        return Err(Error::invalid(format!(
            "sector {lambda} already holds a Rydberg excitation in its top row"
        )));
    }
    Ok(((lambda.n() + lambda.p()) as f64 / 2.0).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RevivalOptions {
    /// A sample counts as a revival when its time exceeds this factor times
    /// the latest time among all higher-valued samples.
    pub jump_factor: f64,
    /// Initial running maximum of the time; keeps the early fast oscillation
    /// from registering as a jump.
    pub exclusion_time: f64,
}

impl Default for RevivalOptions {
    fn default() -> Self {
        Self { jump_factor: 2.0, exclusion_time: 5.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Revival {
    pub time: f64,
    pub strength: f64,
}

/// Locates the first revival by scanning samples in order of decreasing value.
///
/// While the oscillation decays, samples sorted by value appear at steadily
/// increasing times. The first sample whose time jumps beyond
/// `jump_factor * max(exclusion_time, latest time seen)` is the peak of the
/// first revival. Returns `None` when no such jump occurs.
pub fn detect_revival(series: &TimeSeries, options: &RevivalOptions) -> Option<Revival> {
    let mut order: Vec<usize> = (0..series.len()).collect();
    order.sort_by(|&a, &b| {
        series.values[b]
            .total_cmp(&series.values[a])
            .then(series.times[a].total_cmp(&series.times[b]))
    });
    let mut latest = options.exclusion_time;
    for idx in order {
        let t = series.times[idx];
        if t > options.jump_factor * latest {
            return Some(Revival { time: t, strength: series.values[idx] });
        }
        latest = latest.max(t);
    }
    None
}

/// Least-squares fit `t_rev = a sqrt(n) + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqrtFit {
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

pub fn fit_sqrt_scaling(points: &[(usize, f64)]) -> Result<SqrtFit> {
    if points.len() < 2 {
        return Err(Error::invalid("need at least two points to fit a sqrt(n) law"));
    }
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).sqrt()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, t)| t).collect();
    let x_mean = xs.iter().sum::<f64>() / m;
    let y_mean = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("fit needs at least two distinct system sizes"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let a = sxy / sxx;
    let b = y_mean - a * x_mean;
    let residuals: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - (a * x + b)).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - y_mean).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(SqrtFit { a, b, r_squared, residuals })
}

/// Family of initial product states parameterized by the atom number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecFamily {
    AllZero,
    AllOne,
    /// `n0 = n/2` rounded down, `n1 = n - n0`.
    HalfHalf,
}

impl SpecFamily {
    pub fn spec(&self, n: usize) -> InitialSpec {
        match self {
            SpecFamily::AllZero => InitialSpec { n0: n, n1: 0 },
            SpecFamily::AllOne => InitialSpec { n0: 0, n1: n },
            SpecFamily::HalfHalf => InitialSpec { n0: n / 2, n1: n - n / 2 },
        }
    }
}

impl std::str::FromStr for SpecFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-zero" => Ok(SpecFamily::AllZero),
            "all-one" => Ok(SpecFamily::AllOne),
            "half-half" => Ok(SpecFamily::HalfHalf),
            other => Err(Error::invalid(format!(
                "unknown initial-state family {other:?}; expected all-zero, all-one or half-half"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Simulated time is `t_max_per_sqrt_n * sqrt(n) / Omega`.
    pub t_max_per_sqrt_n: f64,
    /// Sampling step is `dt_scale / (Omega sqrt(n))`.
    pub dt_scale: f64,
    pub revival: RevivalOptions,
    pub evolve: EvolveOptions,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            t_max_per_sqrt_n: 25.0,
            dt_scale: 0.1,
            revival: RevivalOptions::default(),
            evolve: EvolveOptions { weight_cutoff: 1e-16 },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RevivalPoint {
    pub n: usize,
    pub revival: Option<Revival>,
}

/// Runs the Rydberg-population quench for each `n` and detects its first revival.
pub fn revival_scan(
    n_list: &[usize],
    family: SpecFamily,
    drive: &DriveParams,
    options: &ScanOptions,
) -> Result<Vec<RevivalPoint>> {
    let omega = drive.reference_frequency();
    let omega = if omega > 0.0 { omega } else { 1.0 };
    n_list
        .iter()
        .map(|&n| {
            let sqrt_n = (n as f64).sqrt();
            let times = uniform_grid(options.t_max_per_sqrt_n * sqrt_n / omega, options.dt_scale / (omega * sqrt_n))?;
            let series = evolve_expectation(&family.spec(n), drive, Observable::Nr, &times, &options.evolve)?;
            let revival_opts = RevivalOptions {
                exclusion_time: options.revival.exclusion_time / omega,
                ..options.revival
            };
            Ok(RevivalPoint { n, revival: detect_revival(&series, &revival_opts) })
        })
        .collect()
}

/// Revival times over several system sizes fitted to `a sqrt(n) + b`.
pub fn revival_scaling(
    n_list: &[usize],
    family: SpecFamily,
    drive: &DriveParams,
    options: &ScanOptions,
) -> Result<(Vec<RevivalPoint>, SqrtFit)> {
    if n_list.len() < 4 {
        return Err(Error::invalid("revival scaling needs at least four system sizes"));
    }
    let points = revival_scan(n_list, family, drive, options)?;
    let pairs = points
        .iter()
        .map(|pt| pt.revival.map(|r| (pt.n, r.time)).ok_or(Error::NoRevival { n: pt.n }))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_sqrt_scaling(&pairs)?;
    Ok((points, fit))
}
