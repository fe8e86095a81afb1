//! Pulse sequences that prepare permutation-symmetric states from `|0...0>`.
//!
//! Within the symmetric sector every basis state lies on a zigzag chain
//!
//! ```text
//! top n - bot n-1 - top n-1 - bot n-2 - ... - top 1 - bot 0 - top 0
//! ```
//!
//! where `top k` is the Dicke state with `k` atoms in `|1>` and `bot j` holds
//! one Rydberg excitation and `j` atoms in `|1>`. A `|1> <-> |r>` pulse couples
//! `(top k, bot k-1)` with strength `sqrt(k)` and a `|0> <-> |r>` pulse couples
//! `(top k, bot k)` with strength `sqrt(n-k)`, so every pulse is a set of
//! independent two-level rotations. Starting from the target, each pulse
//! empties the leftmost chain node; the preparation sequence is the inverse of
//! that sweep.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::{self, Write as _};

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{block_from_ops, DriveParams};
use crate::irrep::{build_basis, collective_operators, CollectiveOps, IrrepBasis, Partition};
use crate::linalg::HermitianEigen;
use crate::oracle::{build_full_hamiltonian, build_zero_rydberg_drive, symmetric_embedding, TensorBasis};

/// Amplitudes below this magnitude count as an empty chain node.
const EMPTY_NODE: f64 = 1e-14;
/// Residual population allowed off `|0...0>` after the synthesis sweep.
const SWEEP_RESIDUAL: f64 = 1e-9;
/// Population outside the top row above which a simulation flags leakage.
pub const LEAKAGE_WARNING: f64 = 1e-6;

/// Phase of the fixed rotation axis used for real amplitudes (the y axis).
const FIXED_PHASE: f64 = -FRAC_PI_2;

/// Superposition of Dicke states; `amplitudes[n0]` multiplies the symmetric
/// state with `n0` atoms in `|0>` and `n - n0` in `|1>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricTarget {
    amplitudes: Vec<C64>,
}

impl SymmetricTarget {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::invalid("a symmetric target needs at least one atom (two amplitudes)"));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::invalid("target amplitudes must be finite"));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("target must have unit norm, got squared norm {norm}")));
        }
        Ok(Self { amplitudes })
    }

    /// `(|0...0> + |1...1>)/sqrt(2)`.
    pub fn ghz(n: usize) -> Result<Self> {
        Self::check_n(n)?;
        let mut a = vec![C64::new(0.0, 0.0); n + 1];
        a[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        a[n] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(a)
    }

    /// Symmetric state with exactly one atom in `|1>`.
    pub fn w(n: usize) -> Result<Self> {
        Self::check_n(n)?;
        Self::dicke(n, n - 1)
    }

    pub fn dicke(n: usize, n0: usize) -> Result<Self> {
        Self::check_n(n)?;
        if n0 > n {
            return Err(Error::invalid(format!("n0 = {n0} exceeds n = {n}")));
        }
        let mut a = vec![C64::new(0.0, 0.0); n + 1];
        a[n0] = C64::new(1.0, 0.0);
        Self::new(a)
    }

    fn check_n(n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::invalid("atom number must be at least 1"));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `|<self|other>|^2` for amplitude vectors over the same Dicke states.
    pub fn fidelity(&self, other: &[C64]) -> f64 {
        self.amplitudes.iter().zip(other).map(|(a, b)| a.conj() * b).sum::<C64>().norm_sqr()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transition {
    /// `|0> <-> |1>`, driven by the first Rabi frequency.
    Hyperfine,
    /// `|1> <-> |r>`, driven by the second Rabi frequency.
    Rydberg,
    /// `|0> <-> |r>`, realized by conjugating a Rydberg pulse with hyperfine pi pulses.
    Effective,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transition::Hyperfine => "0<->1",
            Transition::Rydberg => "1<->r",
            Transition::Effective => "0<->r",
        })
    }
}

/// Square pulse; the complex Rabi frequency is `rabi_magnitude * exp(i phase)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub transition: Transition,
    pub rabi_magnitude: f64,
    pub phase: f64,
    pub detuning: f64,
    pub duration: f64,
}

impl Pulse {
    pub fn rabi(&self) -> C64 {
        C64::from_polar(self.rabi_magnitude, self.phase)
    }

    /// `|Omega| t / pi`.
    pub fn area_over_pi(&self) -> f64 {
        self.rabi_magnitude * self.duration / PI
    }

    /// Pulse undoing this one: same duration, opposite sign of the Rabi frequency.
    pub fn inverse(&self) -> Pulse {
        Pulse { phase: wrap_phase(self.phase + PI), detuning: -self.detuning, ..*self }
    }
}

fn wrap_phase(phase: f64) -> f64 {
    let wrapped = phase.rem_euclid(2.0 * PI);
    if wrapped > PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Effective,
    Physical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub n: usize,
    pub kind: ScheduleKind,
    pub pulses: Vec<Pulse>,
}

impl PulseSchedule {
    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    /// Drops zero-duration pulses.
    pub fn pruned(&self) -> PulseSchedule {
        PulseSchedule {
            pulses: self.pulses.iter().copied().filter(|p| p.duration > 0.0).collect(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("schedule serializes")
    }

    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.pulses.iter().enumerate() {
            let finite = [p.rabi_magnitude, p.phase, p.detuning, p.duration].iter().all(|x| x.is_finite());
            if !finite || p.duration < 0.0 || p.rabi_magnitude < 0.0 {
                return Err(Error::invalid(format!("pulse {} has invalid parameters: {p:?}", i + 1)));
            }
            if self.kind == ScheduleKind::Physical && p.transition == Transition::Effective {
                return Err(Error::invalid(format!("physical schedule contains effective pulse {}", i + 1)));
            }
        }
        Ok(())
    }

    /// Plain-text table of the pulse areas `|Omega| t / pi`.
    pub fn table(&self) -> String {
        let mut out = String::from("pulse  transition  |Omega|t/pi  phase\n");
        for (i, p) in self.pulses.iter().enumerate() {
            let _ = writeln!(out, "{:>5}  {:>10}  {:>11.5}  {:>8.5}", i + 1, p.transition, p.area_over_pi(), p.phase);
        }
        out
    }
}

/// Which node of a two-level pair should end up holding all the population.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pole {
    /// The top-row (Rydberg-free) state.
    Upper,
    /// The state with one Rydberg excitation.
    Lower,
}

/// Resonant rotation of a pair `(a, b)` with `a` on the top row, generated by
/// `(k/2)(Omega |b><a| + h.c.)` for a time `theta / (k |Omega|)`.
fn rotate_pair(a: C64, b: C64, theta: f64, phase: f64) -> (C64, C64) {
    let (s, c) = (theta / 2.0).sin_cos();
    let mi = C64::new(0.0, -1.0);
    let a2 = a * c + mi * s * C64::from_polar(1.0, -phase) * b;
    let b2 = b * c + mi * s * C64::from_polar(1.0, phase) * a;
    (a2, b2)
}

/// Resonant pulse (unit Rabi magnitude) moving all population of the pair
/// `(amp_a, amp_b)` onto `pole`.
///
/// When the two amplitudes share a phase up to sign, the rotation axis is
/// fixed and the angle lies in `[0, 2 pi)`; otherwise the axis is chosen
/// perpendicular to the Bloch vector and the pole. With `shorten`, angles
/// above `pi` are replaced by their complement about a reversed axis.
pub fn two_level_pulse(
    transition: Transition,
    amp_a: C64,
    amp_b: C64,
    k: f64,
    pole: Pole,
    shorten: bool,
) -> Result<Pulse> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::invalid(format!("coupling must be positive, got {k}")));
    }
    if amp_a.norm() == 0.0 && amp_b.norm() == 0.0 {
        return Err(Error::invalid("pair amplitudes are both zero"));
    }
    let (from, to) = match pole {
        Pole::Upper => (amp_b, amp_a),
        Pole::Lower => (amp_a, amp_b),
    };
    let (mut phase, mut theta) = if from.norm() == 0.0 {
        (FIXED_PHASE, 0.0)
    } else {
        let ratio = if to.norm() == 0.0 { C64::new(1.0, 0.0) } else { to / from };
        if ratio.im.abs() <= 1e-12 * ratio.norm() {
            (FIXED_PHASE, fixed_axis_angle(amp_a, amp_b, pole))
        } else {
            let rel = amp_b.arg() - amp_a.arg();
            let phase = match pole {
                Pole::Lower => rel + FRAC_PI_2,
                Pole::Upper => rel - FRAC_PI_2,
            };
            (wrap_phase(phase), 2.0 * from.norm().atan2(to.norm()))
        }
    };
    if shorten && theta > PI {
        theta = 2.0 * PI - theta;
        phase = wrap_phase(phase + PI);
    }
    Ok(Pulse { transition, rabi_magnitude: 1.0, phase, detuning: 0.0, duration: theta / k })
}

/// Rotation angle about the fixed axis for amplitudes with a common phase.
fn fixed_axis_angle(amp_a: C64, amp_b: C64, pole: Pole) -> f64 {
    let common = if amp_a.norm() >= amp_b.norm() { amp_a.arg() } else { amp_b.arg() };
    let unphase = C64::from_polar(1.0, -common);
    let (ra, rb) = ((amp_a * unphase).re, (amp_b * unphase).re);
    // With the axis along y the pair rotates as a real 2x2 rotation.
    let sigma = (C64::new(0.0, -1.0) * C64::from_polar(1.0, -FIXED_PHASE)).re;
    let half = match pole {
        Pole::Lower => (-ra).atan2(sigma * rb),
        Pole::Upper => rb.atan2(sigma * ra),
    };
    let theta = 2.0 * half.rem_euclid(PI);
    if theta >= 2.0 * PI - 1e-15 {
        0.0
    } else {
        theta
    }
}

/// Chain pairs driven by a transition: `(top node, bottom node, coupling)`
/// as chain positions.
fn chain_pairs(n: usize, transition: Transition) -> Vec<(usize, usize, f64)> {
    match transition {
        // (top n-i, bot n-1-i) at positions (2i, 2i+1)
        Transition::Rydberg => (0..n).map(|i| (2 * i, 2 * i + 1, ((n - i) as f64).sqrt())).collect(),
        // (top n-i, bot n-i) at positions (2i, 2i-1)
        Transition::Effective => (1..=n).map(|i| (2 * i, 2 * i - 1, (i as f64).sqrt())).collect(),
        Transition::Hyperfine => Vec::new(),
    }
}

fn apply_on_chain(chain: &mut [C64], n: usize, pulse: &Pulse) {
    let area = pulse.rabi_magnitude * pulse.duration;
    for (a, b, k) in chain_pairs(n, pulse.transition) {
        let (x, y) = rotate_pair(chain[a], chain[b], k * area, pulse.phase);
        chain[a] = x;
        chain[b] = y;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisOptions {
    /// Shorten rotations above `pi` by reversing the drive phase.
    pub shorten: bool,
}

/// Effective schedule preparing `target` from `|0...0>`, up to a global phase.
///
/// The schedule alternates Rydberg and effective pulses starting with a
/// Rydberg pulse in the sweep order, so it holds exactly `2n` pulses, some of
/// which may have zero duration.
pub fn synthesize_sequence(target: &SymmetricTarget, options: &SynthesisOptions) -> Result<PulseSchedule> {
    let n = target.n();
    let mut chain = vec![C64::new(0.0, 0.0); 2 * n + 1];
    for (n0, &amp) in target.amplitudes().iter().enumerate() {
        // top (n - n0) sits at position 2 n0
        chain[2 * n0] = amp;
    }
    let mut sweep = Vec::with_capacity(2 * n);
    for j in 0..2 * n {
        let (transition, top, bottom, k, pole) = if j % 2 == 0 {
            let i = j / 2;
            (Transition::Rydberg, j, j + 1, ((n - i) as f64).sqrt(), Pole::Lower)
        } else {
            let i = (j + 1) / 2;
            (Transition::Effective, j + 1, j, (i as f64).sqrt(), Pole::Upper)
        };
        let pulse = if chain[j].norm() <= EMPTY_NODE {
            Pulse { transition, rabi_magnitude: 1.0, phase: FIXED_PHASE, detuning: 0.0, duration: 0.0 }
        } else {
            two_level_pulse(transition, chain[top], chain[bottom], k, pole, options.shorten)?
        };
        apply_on_chain(&mut chain, n, &pulse);
        sweep.push(pulse);
    }
    let residual: f64 = chain[..2 * n].iter().map(|a| a.norm_sqr()).sum();
    if residual > SWEEP_RESIDUAL {
        return Err(Error::Numerical(format!(
            "synthesis sweep left population {residual:e} outside |0...0>"
        )));
    }
    Ok(PulseSchedule {
        n,
        kind: ScheduleKind::Effective,
        pulses: sweep.iter().rev().map(Pulse::inverse).collect(),
    })
}

/// Replaces each effective `|0> <-> |r>` pulse by a hyperfine pi pulse, the
/// corresponding Rydberg pulse, and the inverse hyperfine pi pulse. Zero-duration
/// pulses are dropped.
pub fn physical_schedule(effective: &PulseSchedule) -> PulseSchedule {
    let swap = Pulse { transition: Transition::Hyperfine, rabi_magnitude: 1.0, phase: 0.0, detuning: 0.0, duration: PI };
    let mut pulses = Vec::new();
    for p in effective.pulses.iter().filter(|p| p.duration > 0.0) {
        match p.transition {
            Transition::Effective => {
                pulses.push(swap);
                pulses.push(Pulse { transition: Transition::Rydberg, phase: wrap_phase(p.phase + FRAC_PI_2), ..*p });
                pulses.push(swap.inverse());
            }
            _ => pulses.push(*p),
        }
    }
    PulseSchedule { n: effective.n, kind: ScheduleKind::Physical, pulses }
}

/// Final state of a schedule simulated in the symmetric sector.
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleOutcome {
    /// Top-row amplitudes indexed by the number of atoms in `|0>`.
    pub amplitudes: Vec<C64>,
    /// Population left in states with a Rydberg excitation.
    pub leakage: f64,
    /// Full sector state in the sector's basis order.
    pub block_state: Vec<C64>,
}

impl ScheduleOutcome {
    pub fn leakage_warning(&self) -> bool {
        self.leakage > LEAKAGE_WARNING
    }
}

fn pulse_block(basis: &IrrepBasis, ops: &CollectiveOps, pulse: &Pulse) -> Array2<C64> {
    let omega = pulse.rabi();
    match pulse.transition {
        Transition::Hyperfine => {
            block_from_ops(basis, ops, &DriveParams::new(omega, C64::new(0.0, 0.0), pulse.detuning, -pulse.detuning))
                .matrix
        }
        Transition::Rydberg => {
            block_from_ops(basis, ops, &DriveParams::new(C64::new(0.0, 0.0), omega, 0.0, pulse.detuning)).matrix
        }
        Transition::Effective => {
            let dim = basis.dim();
            let mut h = Array2::zeros((dim, dim));
            for &(r, c, v) in ops.v_minus.entries() {
                h[[r, c]] += omega * (0.5 * v);
                h[[c, r]] += omega.conj() * (0.5 * v);
            }
            for (i, s) in basis.states().iter().enumerate() {
                h[[i, i]] -= C64::new(pulse.detuning * s.nr as f64, 0.0);
            }
            h
        }
    }
}

/// Piecewise-constant evolution of `|0...0>` under `schedule` inside the
/// symmetric sector, one diagonalization per pulse.
pub fn apply_schedule(schedule: &PulseSchedule, n: usize) -> Result<ScheduleOutcome> {
    if n == 0 || schedule.n != n {
        return Err(Error::invalid(format!("schedule is for n = {}, requested n = {n}", schedule.n)));
    }
    schedule.validate()?;
    let basis = build_basis(&Partition::new(n, 0, 0)?)?;
    let ops = collective_operators(&basis);
    let mut psi = vec![C64::new(0.0, 0.0); basis.dim()];
    psi[basis.top_row_state(n, 0).expect("symmetric sector holds |0...0>")] = C64::new(1.0, 0.0);
    for pulse in schedule.pulses.iter().filter(|p| p.duration > 0.0) {
        let eig = HermitianEigen::new(&pulse_block(&basis, &ops, pulse))?;
        psi = eig.evolve(&psi, pulse.duration);
    }
    let amplitudes: Vec<C64> =
        (0..=n).map(|n0| psi[basis.top_row_state(n0, n - n0).expect("top-row state")]).collect();
    let leakage = basis.states().iter().zip(&psi).filter(|(s, _)| s.row > 0).map(|(_, a)| a.norm_sqr()).sum();
    Ok(ScheduleOutcome { amplitudes, leakage, block_state: psi })
}

/// Same simulation carried out atom by atom in the full tensor space.
/// Returns the final tensor state and the symmetric sector embedding used to
/// compare it with [`apply_schedule`].
pub fn apply_schedule_tensor(schedule: &PulseSchedule, n: usize) -> Result<(Vec<C64>, Array2<C64>)> {
    schedule.validate()?;
    let tensor = TensorBasis::new(n)?;
    let block = build_basis(&Partition::new(n, 0, 0)?)?;
    let embed = symmetric_embedding(&tensor, &block)?;
    let mut psi = tensor.zeros_then_ones(n)?;
    for pulse in schedule.pulses.iter().filter(|p| p.duration > 0.0) {
        let omega = pulse.rabi();
        let zero = C64::new(0.0, 0.0);
        let h = match pulse.transition {
            Transition::Hyperfine => {
                build_full_hamiltonian(&tensor, &DriveParams::new(omega, zero, pulse.detuning, -pulse.detuning))?
            }
            Transition::Rydberg => build_full_hamiltonian(&tensor, &DriveParams::new(zero, omega, 0.0, pulse.detuning))?,
            Transition::Effective => build_zero_rydberg_drive(&tensor, omega, pulse.detuning),
        };
        psi = HermitianEigen::new(&h.to_dense())?.evolve(&psi, pulse.duration);
    }
    Ok((psi, embed))
}
