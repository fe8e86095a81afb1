//! Irreducible SU(3) sectors of n three-level atoms and their
//! blockade-restricted bases.
//!
//! A sector is labelled by a partition `(l1, l2, l3)` of `n` with
//! `p = l1 - l2`, `q = l2 - l3`. Within a sector the states are labelled
//! `|r; t, m_t>`: `r` is the weight-diagram row (number of Rydberg
//! excitations above `l3`), `t` the T-spin and `m_t` its projection. Only
//! rows with at most one Rydberg excitation are kept, so a sector stores at
//! most two rows.
//!
//! Half-integer quantum numbers are stored doubled (`twice_t`, `twice_mt`).

use std::collections::HashMap;
use std::fmt;

use ndarray::Array2;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition `l1 >= l2 >= l3 >= 0` of the atom number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[usize; 3]", into = "[usize; 3]")]
pub struct Partition {
    lambda: [usize; 3],
}

impl Partition {
    pub fn new(l1: usize, l2: usize, l3: usize) -> Result<Self> {
        if l1 < l2 || l2 < l3 {
            return Err(Error::invalid(format!(
                "partition ({l1},{l2},{l3}) is not non-increasing"
            )));
        }
        Ok(Self { lambda: [l1, l2, l3] })
    }

    /// The partition with irrep labels `(p, q)` and the given `l3`.
    pub fn from_pq(p: usize, q: usize, l3: usize) -> Self {
        Self { lambda: [p + q + l3, q + l3, l3] }
    }

    pub fn lambda1(&self) -> usize {
        self.lambda[0]
    }

    pub fn lambda2(&self) -> usize {
        self.lambda[1]
    }

    pub fn lambda3(&self) -> usize {
        self.lambda[2]
    }

    pub fn n(&self) -> usize {
        self.lambda.iter().sum()
    }

    pub fn p(&self) -> usize {
        self.lambda[0] - self.lambda[1]
    }

    pub fn q(&self) -> usize {
        self.lambda[1] - self.lambda[2]
    }

    /// Sectors with `l3 >= 2` contain only states with two or more Rydberg
    /// excitations and never take part in blockaded dynamics.
    pub fn is_blockade_relevant(&self) -> bool {
        self.lambda[2] <= 1
    }
}

impl TryFrom<[usize; 3]> for Partition {
    type Error = Error;

    fn try_from(l: [usize; 3]) -> Result<Self> {
        Partition::new(l[0], l[1], l[2])
    }
}

impl From<Partition> for [usize; 3] {
    fn from(p: Partition) -> Self {
        p.lambda
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.lambda;
        write!(f, "({a},{b},{c})")
    }
}

/// All partitions of `n` into three parts in descending lexicographic order.
/// With `blockade_only`, partitions with `l3 >= 2` are dropped.
pub fn enumerate_partitions(n: usize, blockade_only: bool) -> Result<Vec<Partition>> {
    if n == 0 {
        return Err(Error::invalid("atom number must be at least 1"));
    }
    let mut out = Vec::new();
    for l1 in (n.div_ceil(3)..=n).rev() {
        let rest = n - l1;
        for l2 in (rest.div_ceil(2)..=rest.min(l1)).rev() {
            let l3 = rest - l2;
            if blockade_only && l3 > 1 {
                continue;
            }
            out.push(Partition { lambda: [l1, l2, l3] });
        }
    }
    Ok(out)
}

fn factorial(k: usize) -> BigUint {
    (2..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Number of copies `mu` of the sector in the n-atom space (dimension of
/// the matching symmetric-group irrep), exact.
pub fn multiplicity(lambda: &Partition) -> BigUint {
    let (p, q) = (lambda.p(), lambda.q());
    let numerator = factorial(lambda.n()) * BigUint::from((p + q + 2) * (p + 1) * (q + 1));
    let denominator =
        factorial(lambda.lambda1() + 2) * factorial(lambda.lambda2() + 1) * factorial(lambda.lambda3());
    debug_assert!((&numerator % &denominator).is_zero());
    numerator / denominator
}

/// Multiplicity as `u64`, failing when it does not fit.
pub fn multiplicity_u64(lambda: &Partition) -> Result<u64> {
    multiplicity(lambda).to_u64().ok_or_else(|| {
        Error::Numerical(format!("multiplicity of {lambda} overflows 64-bit integers"))
    })
}

/// Dimension of the full (p, q) irrep, `(p+1)(q+1)(p+q+2)/2`.
pub fn su3_dimension(p: usize, q: usize) -> usize {
    (p + 1) * (q + 1) * (p + q + 2) / 2
}

/// Number of sector states with at most one Rydberg excitation.
pub fn blockaded_dimension(lambda: &Partition) -> usize {
    let p = lambda.p();
    match lambda.lambda3() {
        0 if lambda.q() == 0 => 3 * (p + 1) - (p + 2),
        0 => 3 * (p + 1),
        1 => p + 1,
        _ => 0,
    }
}

/// Basis state `|r; t, m_t>` together with its level occupations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisLabel {
    pub row: usize,
    pub twice_t: usize,
    pub twice_mt: i64,
    pub n0: usize,
    pub n1: usize,
    pub nr: usize,
}

impl BasisLabel {
    pub fn t(&self) -> f64 {
        self.twice_t as f64 / 2.0
    }

    pub fn m_t(&self) -> f64 {
        self.twice_mt as f64 / 2.0
    }
}

/// Ordered blockaded basis of one sector.
///
/// Order: row 0 with `m_t` descending; then row 1, first the
/// `t = (p+1)/2` multiplet, then `t = (p-1)/2`, each with `m_t` descending.
#[derive(Clone, Debug)]
pub struct IrrepBasis {
    partition: Partition,
    states: Vec<BasisLabel>,
    index: HashMap<(usize, usize, i64), usize>,
}

impl IrrepBasis {
    pub fn partition(&self) -> Partition {
        self.partition
    }

    pub fn states(&self) -> &[BasisLabel] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Index of `|row; t, m_t>` (doubled quantum numbers), if stored.
    pub fn index_of(&self, row: usize, twice_t: usize, twice_mt: i64) -> Option<usize> {
        self.index.get(&(row, twice_t, twice_mt)).copied()
    }

    /// The unique row-0 state with the given occupations of `|0>` and `|1>`.
    pub fn top_row_state(&self, n0: usize, n1: usize) -> Option<usize> {
        self.states.iter().position(|s| s.row == 0 && s.n0 == n0 && s.n1 == n1)
    }

    /// Twice the eigenvalues of `U^z` and `V^z` for a label, as (2 m_u, 2 m_v).
    fn twice_mu_mv(&self, label: &BasisLabel) -> (f64, f64) {
        let (p, q) = (self.partition.p() as f64, self.partition.q() as f64);
        let base = p + 2.0 * q - 3.0 * label.row as f64;
        let mt2 = label.twice_mt as f64;
        ((base - mt2) / 2.0, (base + mt2) / 2.0)
    }

    /// Diagonal of `T^z`.
    pub fn t_z(&self) -> Vec<f64> {
        self.states.iter().map(BasisLabel::m_t).collect()
    }

    /// Diagonal of `U^z`.
    pub fn u_z(&self) -> Vec<f64> {
        self.states.iter().map(|s| self.twice_mu_mv(s).0 / 2.0).collect()
    }

    /// Diagonal of `V^z`.
    pub fn v_z(&self) -> Vec<f64> {
        self.states.iter().map(|s| self.twice_mu_mv(s).1 / 2.0).collect()
    }
}

/// Builds the blockaded basis of a sector with `l3 <= 1`.
pub fn build_basis(lambda: &Partition) -> Result<IrrepBasis> {
    if !lambda.is_blockade_relevant() {
        return Err(Error::invalid(format!(
            "sector {lambda} has l3 >= 2 and no state with at most one Rydberg excitation"
        )));
    }
    let (p, q) = (lambda.p(), lambda.q());
    let mut multiplets: Vec<(usize, usize)> = vec![(0, p)];
    if lambda.lambda3() == 0 && p + q > 0 {
        if q > 0 {
            multiplets.push((1, p + 1));
        }
        if p > 0 {
            multiplets.push((1, p - 1));
        }
    }

    let n = lambda.n() as i64;
    let (pf, qf) = (p as i64, q as i64);
    let mut states = Vec::new();
    for (row, twice_t) in multiplets {
        let tt = twice_t as i64;
        for twice_mt in (-tt..=tt).rev().step_by(2) {
            // Occupations from n0 = (n + 2Tz + 2Vz)/3 etc., in units of 1/4.
            let base = pf + 2 * qf - 3 * row as i64;
            let twice_mu = (base - twice_mt) / 2;
            let twice_mv = (base + twice_mt) / 2;
            debug_assert_eq!((base - twice_mt) % 2, 0);
            let n0 = (n + twice_mt + twice_mv) / 3;
            let n1 = (n - twice_mt + twice_mu) / 3;
            let nr = (n - twice_mu - twice_mv) / 3;
            debug_assert_eq!(n0 + n1 + nr, n);
            debug_assert_eq!(nr as usize, lambda.lambda3() + row);
            states.push(BasisLabel {
                row,
                twice_t,
                twice_mt,
                n0: n0 as usize,
                n1: n1 as usize,
                nr: nr as usize,
            });
        }
    }
    debug_assert_eq!(states.len(), blockaded_dimension(lambda));
    let index = states
        .iter()
        .enumerate()
        .map(|(i, s)| ((s.row, s.twice_t, s.twice_mt), i))
        .collect();
    Ok(IrrepBasis { partition: *lambda, states, index })
}

/// Sparse real operator on a sector basis, stored as `(row, col, value)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOp {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseOp {
    fn new(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    fn push(&mut self, row: usize, col: usize, value: f64) {
        if value != 0.0 {
            self.entries.push((row, col, value));
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Transpose; equal to the Hermitian adjoint since all entries are real.
    pub fn adjoint(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|&(i, j, v)| (j, i, v)).collect();
        entries.sort_by_key(|&(i, j, _)| (i, j));
        Self { dim: self.dim, entries }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut m = Array2::zeros((self.dim, self.dim));
        for &(i, j, v) in &self.entries {
            m[[i, j]] += v;
        }
        m
    }
}

/// Collective operators `T^±, U^±, V^±` and the diagonals `T^z, U^z, V^z`
/// of one sector, in units where single-atom matrix elements are 1.
#[derive(Clone, Debug)]
pub struct CollectiveOps {
    pub t_plus: SparseOp,
    pub t_minus: SparseOp,
    pub u_plus: SparseOp,
    pub u_minus: SparseOp,
    pub v_plus: SparseOp,
    pub v_minus: SparseOp,
    pub t_z: Vec<f64>,
    pub u_z: Vec<f64>,
    pub v_z: Vec<f64>,
}

/// Matrix elements of the collective operators on a blockaded basis.
///
/// `T^±` act as spin ladders within each multiplet. `U^-` and `V^-` map row 0
/// into row 1; with `k = p/2 - m_t`,
///
/// ```text
/// U^- |0; p/2, p/2-k> =  sqrt(q(p-k+1)/(p+1)) |1; (p+1)/2, (p+1)/2-k>
///                      + sqrt(k(p+q+1)/(p+1)) |1; (p-1)/2, (p+1)/2-k>
/// V^- |0; p/2, p/2-k> = -sqrt(q(k+1)/(p+1))   |1; (p+1)/2, (p-1)/2-k>
///                      + sqrt((p-k)(p+q+1)/(p+1)) |1; (p-1)/2, (p-1)/2-k>
/// ```
///
/// Row-1 to row-2 elements fall outside the blockaded space and are absent.
pub fn collective_operators(basis: &IrrepBasis) -> CollectiveOps {
    let dim = basis.dim();
    let lambda = basis.partition();
    let (p, q) = (lambda.p() as f64, lambda.q() as f64);

    let mut t_plus = SparseOp::new(dim);
    for (i, s) in basis.states().iter().enumerate() {
        if s.twice_mt < s.twice_t as i64 {
            let j = basis
                .index_of(s.row, s.twice_t, s.twice_mt + 2)
                .expect("multiplet is complete");
            let (t, m) = (s.t(), s.m_t());
            t_plus.push(j, i, (t * (t + 1.0) - m * (m + 1.0)).sqrt());
        }
    }

    let mut u_minus = SparseOp::new(dim);
    let mut v_minus = SparseOp::new(dim);
    if lambda.lambda3() == 0 {
        let p_int = lambda.p() as i64;
        let (hi, lo) = (lambda.p() + 1, lambda.p().wrapping_sub(1));
        for (i, s) in basis.states().iter().enumerate().filter(|(_, s)| s.row == 0) {
            let twice_k = p_int - s.twice_mt;
            let k = (twice_k / 2) as f64;
            // Targets in doubled units: (p+1)/2 - k and (p-1)/2 - k.
            let m_up = p_int + 1 - twice_k;
            let m_down = p_int - 1 - twice_k;
            if let Some(j) = basis.index_of(1, hi, m_up) {
                u_minus.push(j, i, (q * (p - k + 1.0) / (p + 1.0)).sqrt());
            }
            if lambda.p() > 0 {
                if let Some(j) = basis.index_of(1, lo, m_up) {
                    u_minus.push(j, i, (k * (p + q + 1.0) / (p + 1.0)).sqrt());
                }
            }
            if let Some(j) = basis.index_of(1, hi, m_down) {
                v_minus.push(j, i, -(q * (k + 1.0) / (p + 1.0)).sqrt());
            }
            if lambda.p() > 0 {
                if let Some(j) = basis.index_of(1, lo, m_down) {
                    v_minus.push(j, i, ((p - k) * (p + q + 1.0) / (p + 1.0)).sqrt());
                }
            }
        }
    }

    CollectiveOps {
        t_minus: t_plus.adjoint(),
        u_plus: u_minus.adjoint(),
        v_plus: v_minus.adjoint(),
        t_plus,
        u_minus,
        v_minus,
        t_z: basis.t_z(),
        u_z: basis.u_z(),
        v_z: basis.v_z(),
    }
}
