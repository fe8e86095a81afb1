//! Brute-force reference model in the blockaded tensor-product space.
//!
//! Every atom is tracked individually, so the dimension grows as
//! `2^n + n 2^(n-1)`. Only meant for small `n`, as ground truth for the
//! sector-resolved computations.

use std::collections::HashMap;
use std::fmt;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::dynamics::{validate_times, TimeSeries};
use crate::error::{Error, Result};
use crate::hamiltonian::{DriveParams, Observable};
use crate::irrep::{IrrepBasis, Partition};
use crate::linalg::{eigvalsh, Eigenvectors, HermitianEigen};

pub const HAMILTONIAN_CAP: usize = 12;
pub const EVOLVE_CAP: usize = 10;
pub const PROJECTION_CAP: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Zero,
    One,
    Rydberg,
}

impl Level {
    pub fn symbol(self) -> char {
        match self {
            Level::Zero => '0',
            Level::One => '1',
            Level::Rydberg => 'r',
        }
    }
}

fn check_cap(n: usize, cap: usize, what: &'static str) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("atom number must be at least 1"));
    }
    if n > cap {
        return Err(Error::Capacity { n, cap, what });
    }
    Ok(())
}

/// Product states with at most one Rydberg excitation, in lexicographic order
/// over `0 < 1 < r`.
#[derive(Clone, Debug)]
pub struct TensorBasis {
    n: usize,
    states: Vec<Vec<Level>>,
    index: HashMap<Vec<Level>, usize>,
}

impl TensorBasis {
    pub fn new(n: usize) -> Result<Self> {
        check_cap(n, HAMILTONIAN_CAP, "tensor basis")?;
        let mut states = Vec::with_capacity((1 << n) + n * (1 << (n - 1)));
        let mut current = Vec::with_capacity(n);
        fill(n, false, &mut current, &mut states);
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(Self { n, states, index })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Vec<Level>] {
        &self.states
    }

    pub fn index_of(&self, levels: &[Level]) -> Option<usize> {
        self.index.get(levels).copied()
    }

    pub fn label(&self, i: usize) -> String {
        self.states[i].iter().map(|l| l.symbol()).collect()
    }

    pub fn occupations(&self, i: usize) -> (usize, usize, usize) {
        self.states[i].iter().fold((0, 0, 0), |(a, b, c), l| match l {
            Level::Zero => (a + 1, b, c),
            Level::One => (a, b + 1, c),
            Level::Rydberg => (a, b, c + 1),
        })
    }

    pub fn observable_diagonal(&self, which: Observable) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                let (n0, n1, nr) = self.occupations(i);
                which.occupation(n0, n1, nr) as f64
            })
            .collect()
    }

    /// Normalized product state with the given level on each atom.
    pub fn product_state(&self, levels: &[Level]) -> Result<Vec<C64>> {
        let idx = self.index_of(levels).ok_or_else(|| {
            Error::invalid(format!("{levels:?} is not a blockaded basis state for n = {}", self.n))
        })?;
        let mut psi = vec![C64::new(0.0, 0.0); self.dim()];
        psi[idx] = C64::new(1.0, 0.0);
        Ok(psi)
    }

    /// `|0>^n0 |1>^n1`, zeros on the leading atoms.
    pub fn zeros_then_ones(&self, n0: usize) -> Result<Vec<C64>> {
        if n0 > self.n {
            return Err(Error::invalid(format!("n0 = {n0} exceeds n = {}", self.n)));
        }
        let levels: Vec<Level> = (0..self.n).map(|i| if i < n0 { Level::Zero } else { Level::One }).collect();
        self.product_state(&levels)
    }

    /// Index map of the basis under exchange of atoms `i` and `j`.
    pub fn transposition(&self, i: usize, j: usize) -> Vec<usize> {
        self.states
            .iter()
            .map(|s| {
                let mut t = s.clone();
                t.swap(i, j);
                self.index[&t]
            })
            .collect()
    }
}

fn fill(n: usize, has_r: bool, current: &mut Vec<Level>, out: &mut Vec<Vec<Level>>) {
    if current.len() == n {
        out.push(current.clone());
        return;
    }
    for level in [Level::Zero, Level::One, Level::Rydberg] {
        if level == Level::Rydberg && has_r {
            continue;
        }
        current.push(level);
        fill(n, has_r || level == Level::Rydberg, current, out);
        current.pop();
    }
}

impl fmt::Display for TensorBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = (0..self.dim()).map(|i| self.label(i)).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

/// Sparse operator as `(row, col, value)` triplets, duplicates summed.
#[derive(Clone, Debug)]
pub struct TensorOperator {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl TensorOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn to_dense(&self) -> Array2<C64> {
        let mut m = Array2::zeros((self.dim, self.dim));
        for &(r, c, v) in &self.entries {
            m[[r, c]] += v;
        }
        m
    }

    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for &(r, c, v) in &self.entries {
            out[r] += v * psi[c];
        }
        out
    }

    /// Largest entry of `P^T A P - A` for the basis permutation `perm`.
    pub fn permutation_defect(&self, perm: &[usize]) -> f64 {
        let dense = self.to_dense();
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                worst = worst.max((dense[[perm[r], perm[c]]] - dense[[r, c]]).norm());
            }
        }
        worst
    }
}

/// Hamiltonian of the driven three-level atoms restricted to the blockaded
/// basis. Transitions that would create a second Rydberg excitation are
/// simply absent.
pub fn build_full_hamiltonian(basis: &TensorBasis, drive: &DriveParams) -> Result<TensorOperator> {
    drive.validate()?;
    let half1 = drive.omega1 * 0.5;
    let half2 = drive.omega2 * 0.5;
    let mut entries = Vec::new();
    for (col, state) in basis.states().iter().enumerate() {
        let (_, n1, nr) = basis.occupations(col);
        let diag = -drive.delta1 * n1 as f64 - (drive.delta1 + drive.delta2) * nr as f64;
        if diag != 0.0 {
            entries.push((col, col, C64::new(diag, 0.0)));
        }
        for atom in 0..basis.n() {
            let (target, amp) = match state[atom] {
                Level::Zero => (Level::One, half1),
                Level::One => {
                    let mut down = state.clone();
                    down[atom] = Level::Zero;
                    entries.push((basis.index_of(&down).expect("blockaded state"), col, half1.conj()));
                    if nr > 0 {
                        continue;
                    }
                    (Level::Rydberg, half2)
                }
                Level::Rydberg => (Level::One, half2.conj()),
            };
            let mut next = state.clone();
            next[atom] = target;
            entries.push((basis.index_of(&next).expect("blockaded state"), col, amp));
        }
    }
    entries.retain(|e| e.2 != C64::new(0.0, 0.0));
    Ok(TensorOperator { dim: basis.dim(), entries })
}

/// Direct drive of the `|0> <-> |r>` transition, `(omega sum_i |r><0|_i + h.c.)/2`,
/// plus `-detuning * nr`. Not part of the physical Hamiltonian; used to check
/// effective pulses against their hyperfine-conjugated realization.
pub fn build_zero_rydberg_drive(basis: &TensorBasis, omega: C64, detuning: f64) -> TensorOperator {
    let half = omega * 0.5;
    let mut entries = Vec::new();
    for (col, state) in basis.states().iter().enumerate() {
        let (_, _, nr) = basis.occupations(col);
        if nr > 0 && detuning != 0.0 {
            entries.push((col, col, C64::new(-detuning, 0.0)));
        }
        for atom in 0..basis.n() {
            let (target, amp) = match state[atom] {
                Level::Zero if nr == 0 => (Level::Rydberg, half),
                Level::Rydberg => (Level::Zero, half.conj()),
                _ => continue,
            };
            let mut next = state.clone();
            next[atom] = target;
            entries.push((basis.index_of(&next).expect("blockaded state"), col, amp));
        }
    }
    entries.retain(|e| e.2 != C64::new(0.0, 0.0));
    TensorOperator { dim: basis.dim(), entries }
}

/// Columns are the fully symmetric sector's basis states written out in the
/// tensor basis: the equal-weight superposition of all product states with the
/// state's occupations.
pub fn symmetric_embedding(basis: &TensorBasis, block: &IrrepBasis) -> Result<Array2<C64>> {
    let lam = block.partition();
    if lam.n() != basis.n() || lam.lambda2() != 0 {
        return Err(Error::invalid(format!(
            "sector {lam} is not the symmetric sector for n = {}",
            basis.n()
        )));
    }
    let mut e = Array2::zeros((basis.dim(), block.dim()));
    for (col, label) in block.states().iter().enumerate() {
        let members: Vec<usize> =
            (0..basis.dim()).filter(|&i| basis.occupations(i) == (label.n0, label.n1, label.nr)).collect();
        let amp = C64::new(1.0 / (members.len() as f64).sqrt(), 0.0);
        for i in members {
            e[[i, col]] = amp;
        }
    }
    Ok(e)
}

/// Exact evolution of a tensor-space state, sampled on `times`.
pub fn oracle_evolve(
    basis: &TensorBasis,
    initial: &[C64],
    drive: &DriveParams,
    observable: Observable,
    times: &[f64],
) -> Result<TimeSeries> {
    check_cap(basis.n(), EVOLVE_CAP, "oracle evolution")?;
    if initial.len() != basis.dim() {
        return Err(Error::invalid(format!(
            "state has {} amplitudes, basis has {}",
            initial.len(),
            basis.dim()
        )));
    }
    validate_times(times)?;
    let h = build_full_hamiltonian(basis, drive)?.to_dense();
    let eig = HermitianEigen::new(&h)?;
    let diag = basis.observable_diagonal(observable);
    Ok(TimeSeries { times: times.to_vec(), values: eig.diagonal_expectations(initial, &diag, times) })
}

/// All eigenvalues of the tensor-space Hamiltonian, ascending.
pub fn oracle_spectrum(basis: &TensorBasis, drive: &DriveParams) -> Result<Vec<f64>> {
    check_cap(basis.n(), EVOLVE_CAP, "oracle diagonalization")?;
    eigvalsh(&build_full_hamiltonian(basis, drive)?.to_dense())
}

/// Spectral decomposition of the total `T^2` on the Rydberg-free subspace,
/// used to split a state into its permutation-symmetry sectors.
pub struct IrrepProjector {
    n: usize,
    /// Tensor-basis indices of the Rydberg-free states.
    support: Vec<usize>,
    values: Vec<f64>,
    vectors: Array2<f64>,
}

impl IrrepProjector {
    pub fn new(basis: &TensorBasis) -> Result<Self> {
        let n = basis.n();
        check_cap(n, PROJECTION_CAP, "irrep projection")?;
        let support: Vec<usize> = (0..basis.dim()).filter(|&i| basis.occupations(i).2 == 0).collect();
        let local: HashMap<usize, usize> = support.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let m = support.len();

        // T+ = sum_i |0><1|_i
        let mut raise = Array2::<f64>::zeros((m, m));
        let mut tz = vec![0.0; m];
        for (k, &i) in support.iter().enumerate() {
            let state = &basis.states()[i];
            let (n0, n1, _) = basis.occupations(i);
            tz[k] = (n0 as f64 - n1 as f64) / 2.0;
            for atom in 0..n {
                if state[atom] == Level::One {
                    let mut up = state.clone();
                    up[atom] = Level::Zero;
                    raise[[local[&basis.index_of(&up).unwrap()], k]] += 1.0;
                }
            }
        }
        // T^2 = T- T+ + Tz (Tz + 1)
        let mut casimir = raise.t().dot(&raise);
        for k in 0..m {
            casimir[[k, k]] += tz[k] * (tz[k] + 1.0);
        }
        let eig = HermitianEigen::new(&casimir.mapv(|x| C64::new(x, 0.0)))?;
        let vectors = match eig.vectors {
            Eigenvectors::Real(v) => v,
            Eigenvectors::Complex(v) => v.mapv(|z| z.re),
        };
        Ok(Self { n, support, values: eig.values, vectors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Squared norm of the projection of `state` onto the sector with
    /// `l3 = 0` and the given `p`, i.e. total `T = p/2`.
    pub fn weight(&self, state: &[C64], lambda: &Partition) -> Result<f64> {
        if lambda.n() != self.n || lambda.lambda3() != 0 {
            return Err(Error::invalid(format!(
                "sector {lambda} is not a Rydberg-free sector for n = {}",
                self.n
            )));
        }
        let rydberg: f64 = state
            .iter()
            .enumerate()
            .filter(|(i, _)| self.support.binary_search(i).is_err())
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if rydberg > 0.0 {
            return Err(Error::invalid("state has nonzero Rydberg amplitude"));
        }
        let t = lambda.p() as f64 / 2.0;
        let target = t * (t + 1.0);
        let mut total = 0.0;
        for (k, &value) in self.values.iter().enumerate() {
            if (value - target).abs() > 1e-6 {
                continue;
            }
            let overlap: C64 = self.support.iter().enumerate().map(|(j, &i)| state[i] * self.vectors[[j, k]]).sum();
            total += overlap.norm_sqr();
        }
        Ok(total)
    }
}

/// One-shot version of [`IrrepProjector::weight`].
pub fn project_irrep_weight(basis: &TensorBasis, state: &[C64], lambda: &Partition) -> Result<f64> {
    IrrepProjector::new(basis)?.weight(state, lambda)
}
