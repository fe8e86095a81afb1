//! Per-sector Hamiltonian blocks and diagonal observables.
//!
//! Energies are in units of a reference Rabi frequency with hbar = 1. The
//! blocks include the constant shift `-(n/3)(2 delta1 + delta2)`, so the
//! energy zero is the one where `|0...0>` has energy 0 and every block equals
//! the restriction of the tensor-space Hamiltonian.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::irrep::{build_basis, collective_operators, CollectiveOps, IrrepBasis, Partition, SparseOp};

/// Drive amplitudes and detunings of the two transitions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// Complex Rabi frequency of the `|0> <-> |1>` drive.
    pub omega1: C64,
    /// Complex Rabi frequency of the `|1> <-> |r>` drive.
    pub omega2: C64,
    pub delta1: f64,
    pub delta2: f64,
}

impl DriveParams {
    pub fn new(omega1: C64, omega2: C64, delta1: f64, delta2: f64) -> Self {
        Self { omega1, omega2, delta1, delta2 }
    }

    /// Real Rabi frequencies.
    pub fn real(omega1: f64, omega2: f64, delta1: f64, delta2: f64) -> Self {
        Self::new(C64::new(omega1, 0.0), C64::new(omega2, 0.0), delta1, delta2)
    }

    pub fn zero() -> Self {
        Self::real(0.0, 0.0, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.omega1.re,
            self.omega1.im,
            self.omega2.re,
            self.omega2.im,
            self.delta1,
            self.delta2,
        ];
        if all.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::invalid(format!("drive parameters must be finite: {self:?}")))
        }
    }

    /// Unit of frequency: `|omega1|` when nonzero, otherwise `|omega2|`.
    pub fn reference_frequency(&self) -> f64 {
        if self.omega1.norm() > 0.0 {
            self.omega1.norm()
        } else {
            self.omega2.norm()
        }
    }
}

/// Permutation-invariant level occupation operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    N0,
    N1,
    Nr,
}

impl Observable {
    pub fn occupation(&self, n0: usize, n1: usize, nr: usize) -> usize {
        match self {
            Observable::N0 => n0,
            Observable::N1 => n1,
            Observable::Nr => nr,
        }
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n0" => Ok(Observable::N0),
            "n1" => Ok(Observable::N1),
            "nr" => Ok(Observable::Nr),
            other => Err(Error::invalid(format!("unknown observable {other:?}; expected n0, n1 or nr"))),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Observable::N0 => "n0",
            Observable::N1 => "n1",
            Observable::Nr => "nr",
        })
    }
}

/// Dense operator acting on the blockaded basis of one sector.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator {
    pub partition: Partition,
    pub matrix: Array2<C64>,
}

#[derive(Serialize)]
struct BlockDump<'a> {
    partition: Partition,
    basis: &'a [crate::irrep::BasisLabel],
    operator: Vec<[f64; 2]>,
}

impl BlockOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest absolute deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                worst = worst.max((m[[i, j]] - m[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// JSON debug dump: partition, basis labels and the row-major matrix as
    /// `[re, im]` pairs.
    pub fn to_json(&self, basis: &IrrepBasis) -> serde_json::Value {
        let dump = BlockDump {
            partition: self.partition,
            basis: basis.states(),
            operator: self.matrix.iter().map(|z| [z.re, z.im]).collect(),
        };
        serde_json::to_value(dump).expect("block dump is serializable")
    }
}

fn add_sparse(target: &mut Array2<C64>, op: &SparseOp, coeff: C64) {
    for &(i, j, v) in op.entries() {
        target[[i, j]] += coeff * v;
    }
}

/// Hamiltonian block from a prebuilt basis and its collective operators.
pub fn block_from_ops(basis: &IrrepBasis, ops: &CollectiveOps, drive: &DriveParams) -> BlockOperator {
    let dim = basis.dim();
    let n = basis.partition().n() as f64;
    let (d1, d2) = (drive.delta1, drive.delta2);
    let shift = -(n / 3.0) * (2.0 * d1 + d2);
    let mut h = Array2::<C64>::zeros((dim, dim));
    for i in 0..dim {
        let diag = (2.0 / 3.0) * d1 * ops.t_z[i]
            + (2.0 / 3.0) * d2 * ops.u_z[i]
            + (2.0 / 3.0) * (d1 + d2) * ops.v_z[i]
            + shift;
        h[[i, i]] = C64::new(diag, 0.0);
    }
    add_sparse(&mut h, &ops.t_minus, drive.omega1 / 2.0);
    add_sparse(&mut h, &ops.t_plus, drive.omega1.conj() / 2.0);
    add_sparse(&mut h, &ops.u_minus, drive.omega2 / 2.0);
    add_sparse(&mut h, &ops.u_plus, drive.omega2.conj() / 2.0);
    BlockOperator { partition: basis.partition(), matrix: h }
}

/// The Hamiltonian block `H_lambda` for a drive.
pub fn build_block(lambda: &Partition, drive: &DriveParams) -> Result<BlockOperator> {
    drive.validate()?;
    let basis = build_basis(lambda)?;
    let ops = collective_operators(&basis);
    Ok(block_from_ops(&basis, &ops, drive))
}

/// Diagonal of an occupation observable on a basis.
pub fn observable_diagonal(basis: &IrrepBasis, which: Observable) -> Vec<f64> {
    basis
        .states()
        .iter()
        .map(|s| which.occupation(s.n0, s.n1, s.nr) as f64)
        .collect()
}

/// Occupation observable block (real diagonal).
pub fn build_observable(lambda: &Partition, which: Observable) -> Result<BlockOperator> {
    let basis = build_basis(lambda)?;
    let diag = observable_diagonal(&basis, which);
    let mut m = Array2::<C64>::zeros((diag.len(), diag.len()));
    for (i, &d) in diag.iter().enumerate() {
        m[[i, i]] = C64::new(d, 0.0);
    }
    Ok(BlockOperator { partition: *lambda, matrix: m })
}
