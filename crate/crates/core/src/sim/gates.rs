//! Matrices of the standard gate library.

use super::{c, CMatrix};
use std::f64::consts::FRAC_1_SQRT_2;

fn mat(n: usize, entries: &[(f64, f64)]) -> CMatrix {
    CMatrix::from_row_iterator(n, n, entries.iter().map(|&(re, im)| c(re, im)))
}

pub fn identity(num_qubits: usize) -> CMatrix {
    CMatrix::identity(1 << num_qubits, 1 << num_qubits)
}

pub fn h() -> CMatrix {
    let s = FRAC_1_SQRT_2;
    mat(2, &[(s, 0.0), (s, 0.0), (s, 0.0), (-s, 0.0)])
}

pub fn x() -> CMatrix {
    mat(2, &[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)])
}

pub fn y() -> CMatrix {
    mat(2, &[(0.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.0, 0.0)])
}

pub fn z() -> CMatrix {
    mat(2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-1.0, 0.0)])
}

pub fn s() -> CMatrix {
    mat(2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 1.0)])
}

/// `R_y(theta) = exp(-i theta Y / 2)`.
pub fn ry(theta: f64) -> CMatrix {
    let (sn, cs) = (theta / 2.0).sin_cos();
    mat(2, &[(cs, 0.0), (-sn, 0.0), (sn, 0.0), (cs, 0.0)])
}

pub fn cz() -> CMatrix {
    let mut m = identity(2);
    m[(3, 3)] = c(-1.0, 0.0);
    m
}

pub fn swap() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = c(1.0, 0.0);
    m[(1, 2)] = c(1.0, 0.0);
    m[(2, 1)] = c(1.0, 0.0);
    m[(3, 3)] = c(1.0, 0.0);
    m
}

/// Block-diagonal `diag(I, u)`: `u` applied to the target when the control (MSB) is 1.
pub fn controlled(u: &CMatrix) -> CMatrix {
    let d = u.nrows();
    let mut m = CMatrix::identity(2 * d, 2 * d);
    m.view_mut((d, d), (d, d)).copy_from(u);
    m
}

pub fn cnot() -> CMatrix {
    controlled(&x())
}

/// Single-qubit Pauli by label `I`, `X`, `Y` or `Z`.
pub fn pauli(label: char) -> CMatrix {
    match label {
        'X' => x(),
        'Y' => y(),
        'Z' => z(),
        _ => identity(1),
    }
}
