#![allow(dead_code)]

use std::f64::consts::PI;

use blockade_core::hamiltonian::DriveParams;
use blockade_core::irrep::{build_basis, collective_operators, Partition};
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rand::Rng;

pub fn random_drive<R: Rng>(rng: &mut R) -> DriveParams {
    DriveParams::new(
        C64::from_polar(rng.random_range(0.2..2.0), rng.random_range(0.0..2.0 * PI)),
        C64::from_polar(rng.random_range(0.2..2.0), rng.random_range(0.0..2.0 * PI)),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
    )
}

pub fn random_real_drive<R: Rng>(rng: &mut R) -> DriveParams {
    DriveParams::real(
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
    )
}

pub fn random_unit_vector<R: Rng>(rng: &mut R, dim: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Random blockade-relevant partition with `1 <= n <= max_n`.
pub fn random_partition<R: Rng>(rng: &mut R, max_n: usize, allow_rydberg_row: bool) -> Partition {
    loop {
        let n = rng.random_range(1..=max_n);
        let l3 = if allow_rydberg_row && n >= 3 { rng.random_range(0..=1) } else { 0 };
        let l2 = rng.random_range(l3..=(n - l3) / 2);
        let l1 = n - l2 - l3;
        if l1 >= l2 {
            return Partition::new(l1, l2, l3).unwrap();
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Tp,
    Tm,
    Tz,
    Up,
    Um,
    Uz,
    Vp,
    Vm,
    Vz,
}

struct Dense {
    mats: Vec<Array2<f64>>,
}

impl Dense {
    fn new(lambda: &Partition) -> (Self, Vec<usize>) {
        let basis = build_basis(lambda).unwrap();
        let ops = collective_operators(&basis);
        let diag = |d: &[f64]| Array2::from_diag(&Array1::from_vec(d.to_vec()));
        let mats = vec![
            ops.t_plus.to_dense(),
            ops.t_minus.to_dense(),
            diag(&ops.t_z),
            ops.u_plus.to_dense(),
            ops.u_minus.to_dense(),
            diag(&ops.u_z),
            ops.v_plus.to_dense(),
            ops.v_minus.to_dense(),
            diag(&ops.v_z),
        ];
        let rows = basis.states().iter().map(|s| s.row).collect();
        (Self { mats }, rows)
    }

    fn get(&self, op: Op) -> &Array2<f64> {
        &self.mats[op as usize]
    }
}

/// `scale * [a, b] = sum of coefficient * operator`, checked on row-0 states.
struct Relation {
    name: &'static str,
    a: Op,
    b: Op,
    scale: f64,
    rhs: &'static [(f64, Op)],
}

const RELATIONS: &[Relation] = &[
    Relation { name: "[T+,Tz] = -T+", a: Op::Tp, b: Op::Tz, scale: 1.0, rhs: &[(-1.0, Op::Tp)] },
    Relation { name: "[T-,Tz] = T-", a: Op::Tm, b: Op::Tz, scale: 1.0, rhs: &[(1.0, Op::Tm)] },
    Relation { name: "[U+,Uz] = -U+", a: Op::Up, b: Op::Uz, scale: 1.0, rhs: &[(-1.0, Op::Up)] },
    Relation { name: "[U-,Uz] = U-", a: Op::Um, b: Op::Uz, scale: 1.0, rhs: &[(1.0, Op::Um)] },
    Relation { name: "[V+,Vz] = -V+", a: Op::Vp, b: Op::Vz, scale: 1.0, rhs: &[(-1.0, Op::Vp)] },
    Relation { name: "[V-,Vz] = V-", a: Op::Vm, b: Op::Vz, scale: 1.0, rhs: &[(1.0, Op::Vm)] },
    Relation { name: "[U+,U-] = 2Uz", a: Op::Up, b: Op::Um, scale: 1.0, rhs: &[(2.0, Op::Uz)] },
    Relation { name: "[V+,V-] = 2Vz", a: Op::Vp, b: Op::Vm, scale: 1.0, rhs: &[(2.0, Op::Vz)] },
    Relation { name: "[T+,V-] = -U-", a: Op::Tp, b: Op::Vm, scale: 1.0, rhs: &[(-1.0, Op::Um)] },
    Relation { name: "[T+,U+] = V+", a: Op::Tp, b: Op::Up, scale: 1.0, rhs: &[(1.0, Op::Vp)] },
    Relation { name: "[U+,V-] = T-", a: Op::Up, b: Op::Vm, scale: 1.0, rhs: &[(1.0, Op::Tm)] },
    Relation { name: "2[Tz,U+] = -U+", a: Op::Tz, b: Op::Up, scale: 2.0, rhs: &[(-1.0, Op::Up)] },
    Relation { name: "2[Tz,U-] = U-", a: Op::Tz, b: Op::Um, scale: 2.0, rhs: &[(1.0, Op::Um)] },
    Relation { name: "2[Tz,V+] = V+", a: Op::Tz, b: Op::Vp, scale: 2.0, rhs: &[(1.0, Op::Vp)] },
    Relation { name: "2[Tz,V-] = -V-", a: Op::Tz, b: Op::Vm, scale: 2.0, rhs: &[(-1.0, Op::Vm)] },
    Relation { name: "[T+,V+] = 0", a: Op::Tp, b: Op::Vp, scale: 1.0, rhs: &[] },
    Relation { name: "[T+,U-] = 0", a: Op::Tp, b: Op::Um, scale: 1.0, rhs: &[] },
    Relation { name: "[U+,V+] = 0", a: Op::Up, b: Op::Vp, scale: 1.0, rhs: &[] },
    // Hermitian conjugates
    Relation { name: "[V+,T-] = -U+", a: Op::Vp, b: Op::Tm, scale: 1.0, rhs: &[(-1.0, Op::Up)] },
    Relation { name: "[U-,T-] = V-", a: Op::Um, b: Op::Tm, scale: 1.0, rhs: &[(1.0, Op::Vm)] },
    Relation { name: "[V+,U-] = T+", a: Op::Vp, b: Op::Um, scale: 1.0, rhs: &[(1.0, Op::Tp)] },
    Relation { name: "[V-,T-] = 0", a: Op::Vm, b: Op::Tm, scale: 1.0, rhs: &[] },
    Relation { name: "[U+,T-] = 0", a: Op::Up, b: Op::Tm, scale: 1.0, rhs: &[] },
];

/// Largest violation of the commutation relations in sector `lambda`,
/// evaluated on row-0 basis states, plus `[T+,T-] = 2Tz` on every state.
/// Returns the worst relation name and its deviation.
pub fn commutator_violation(lambda: &Partition) -> (&'static str, f64) {
    let (d, rows) = Dense::new(lambda);
    let mut worst = ("none", 0.0);
    for rel in RELATIONS {
        let (a, b) = (d.get(rel.a), d.get(rel.b));
        let mut lhs = (a.dot(b) - b.dot(a)) * rel.scale;
        for (c, op) in rel.rhs {
            lhs = lhs - d.get(*op) * *c;
        }
        for (j, _) in rows.iter().enumerate().filter(|(_, &r)| r == 0) {
            let dev = lhs.column(j).iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if dev > worst.1 {
                worst = (rel.name, dev);
            }
        }
    }
    let (tp, tm, tz) = (d.get(Op::Tp), d.get(Op::Tm), d.get(Op::Tz));
    let full = tp.dot(tm) - tm.dot(tp) - tz * 2.0;
    let dev = full.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if dev > worst.1 {
        worst = ("[T+,T-] = 2Tz", dev);
    }
    worst
}
