//! Large-spin approximations of the symmetric-sector dynamics.
//!
//! Adding one unphysical state to the symmetric sector turns it into a spin
//! `s = n/2` times a two-level system. For the `|1...1>` initial state and
//! `delta2 = 0` the two-level system splits off, leaving two spin Hamiltonians
//! `H+-` whose relative overlap bounds the Rydberg population. For the
//! `|0...0>` initial state the spin and the two-level system stay coupled.
//!
//! Spin states are ordered by descending `m`; the two-level index is 0 for
//! `sigma_z = +1` (no Rydberg excitation) and 1 otherwise.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{validate_times, TimeSeries};
use crate::error::{Error, Result};
use crate::hamiltonian::DriveParams;
use crate::linalg::{HermitianEigen, TIME_BATCH};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinModelConfig {
    pub n: usize,
    pub drive: DriveParams,
    pub times: Vec<f64>,
}

impl SpinModelConfig {
    fn validate(&self) -> Result<(f64, f64)> {
        if self.n == 0 {
            return Err(Error::invalid("atom number must be at least 1"));
        }
        self.drive.validate()?;
        validate_times(&self.times)?;
        if self.drive.omega1.im != 0.0 || self.drive.omega2.im != 0.0 {
            return Err(Error::invalid("spin models require real Rabi frequencies"));
        }
        Ok((self.drive.omega1.re, self.drive.omega2.re))
    }

    fn s(&self) -> f64 {
        self.n as f64 / 2.0
    }

    fn m(&self, i: usize) -> f64 {
        self.s() - i as f64
    }
}

/// `<m+1| S+ |m>`.
fn raise_element(s: f64, m: f64) -> f64 {
    (s * (s + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

fn spin_part(config: &SpinModelConfig, omega1: f64) -> Array2<f64> {
    let dim = config.n + 1;
    let s = config.s();
    let mut h = Array2::zeros((dim, dim));
    for i in 0..dim {
        h[[i, i]] = config.drive.delta1 * config.m(i);
        if i > 0 {
            let x = 0.5 * omega1 * raise_element(s, config.m(i));
            h[[i - 1, i]] = x;
            h[[i, i - 1]] = x;
        }
    }
    h
}

/// `H+- = omega1 S_x + delta1 S_z +- (omega2/2) sqrt(s - S_z)`.
pub fn build_sm_pm(config: &SpinModelConfig) -> Result<(Array2<f64>, Array2<f64>)> {
    let (omega1, omega2) = config.validate()?;
    if config.drive.delta2 != 0.0 {
        return Err(Error::invalid("the split spin model requires delta2 = 0"));
    }
    let base = spin_part(config, omega1);
    let mut plus = base.clone();
    let mut minus = base;
    for i in 0..=config.n {
        let shift = 0.5 * omega2 * (config.s() - config.m(i)).max(0.0).sqrt();
        plus[[i, i]] += shift;
        minus[[i, i]] -= shift;
    }
    Ok((plus, minus))
}

fn to_complex(m: &Array2<f64>) -> Array2<C64> {
    m.mapv(|x| C64::new(x, 0.0))
}

/// Envelope of the Rydberg population after a quench from `|1...1>`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub times: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Magnitude of the overlap of the unit-normalized branch states.
    pub overlap_abs: Vec<f64>,
    /// Spin-model estimate of the Rydberg population including the fast oscillation.
    pub rydberg: Vec<f64>,
}

/// Evolves `|m = -s>` under both `H+-`. The initial state splits evenly
/// between the two branches, so with unit-normalized branch states `o(t)` the
/// Rydberg population is `(1 - Re o)/2`, bounded by `(1 +- |o|)/2`.
pub fn envelope(config: &SpinModelConfig) -> Result<Envelope> {
    let (plus, minus) = build_sm_pm(config)?;
    let eig_p = HermitianEigen::new(&to_complex(&plus))?;
    let eig_m = HermitianEigen::new(&to_complex(&minus))?;
    let mut psi0 = vec![C64::new(0.0, 0.0); config.n + 1];
    psi0[config.n] = C64::new(1.0, 0.0);

    let mut out = Envelope { times: config.times.clone(), ..Default::default() };
    for chunk in config.times.chunks(TIME_BATCH) {
        let a = eig_p.evolve_batch(&psi0, chunk);
        let b = eig_m.evolve_batch(&psi0, chunk);
        for col in 0..chunk.len() {
            let o: C64 = a.column(col).iter().zip(b.column(col)).map(|(x, y)| x.conj() * y).sum();
            let mag = o.norm();
            out.overlap_abs.push(mag);
            out.lower.push(0.5 - 0.5 * mag);
            out.upper.push(0.5 + 0.5 * mag);
            out.rydberg.push(0.5 - 0.5 * o.re);
        }
    }
    Ok(out)
}

/// `<m|M|m>`: zero at `m = s`, otherwise cancels the `S+` element and leaves `sqrt(s - m)`.
fn m_element(s: f64, m: f64) -> f64 {
    if (m - s).abs() < 1e-12 {
        0.0
    } else {
        ((s - m) / (s * (s + 1.0) - m * (m + 1.0))).sqrt()
    }
}

/// `(omega1 S_x + delta1 S_z) x I + ((delta1 + delta2)/2) I x sigma_z
///  + (omega2/2)(S+ M x sigma- + h.c.)`, index `2 i + qubit`.
pub fn build_sm0(config: &SpinModelConfig) -> Result<Array2<f64>> {
    let (omega1, omega2) = config.validate()?;
    let spin = spin_part(config, omega1);
    let dim = config.n + 1;
    let s = config.s();
    let z = 0.5 * (config.drive.delta1 + config.drive.delta2);
    let mut h = Array2::zeros((2 * dim, 2 * dim));
    for i in 0..dim {
        for j in 0..dim {
            h[[2 * i, 2 * j]] = spin[[i, j]];
            h[[2 * i + 1, 2 * j + 1]] = spin[[i, j]];
        }
        h[[2 * i, 2 * i]] += z;
        h[[2 * i + 1, 2 * i + 1]] -= z;
        // S+ M sigma- : (m, up) -> (m+1, down)
        if i > 0 {
            let m = config.m(i);
            let x = 0.5 * omega2 * raise_element(s, m) * m_element(s, m);
            h[[2 * (i - 1) + 1, 2 * i]] = x;
            h[[2 * i, 2 * (i - 1) + 1]] = x;
        }
    }
    Ok(h)
}

/// Rydberg population under the coupled spin model, starting from `m = s`
/// with no Rydberg excitation.
pub fn evolve_sm0(config: &SpinModelConfig) -> Result<TimeSeries> {
    let h = build_sm0(config)?;
    let eig = HermitianEigen::new(&to_complex(&h))?;
    let dim = h.nrows();
    let mut psi0 = vec![C64::new(0.0, 0.0); dim];
    psi0[0] = C64::new(1.0, 0.0);
    let nr: Vec<f64> = (0..dim).map(|k| (k % 2) as f64).collect();
    Ok(TimeSeries { times: config.times.clone(), values: eig.diagonal_expectations(&psi0, &nr, &config.times) })
}
