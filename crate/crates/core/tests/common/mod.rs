#![allow(dead_code)]

use demonsteer::sim::{CMatrix, DensityMatrix, C64};
use proptest::prelude::*;

/// Random density matrix `A A^dagger / Tr` from a `dim x dim` complex matrix.
pub fn density_from(entries: &[(f64, f64)], dim: usize) -> DensityMatrix {
    let a = CMatrix::from_iterator(dim, dim, entries.iter().map(|&(re, im)| C64::new(re, im)));
    let m = &a * a.adjoint();
    let tr = m.trace();
    DensityMatrix::from_matrix(&(m / tr)).expect("A A^dagger is a state")
}

pub fn arb_density(num_qubits: usize) -> impl Strategy<Value = DensityMatrix> {
    let dim = 1usize << num_qubits;
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim)
        .prop_filter("non-degenerate", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(move |v| density_from(&v, dim))
}

pub fn arb_distribution(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, len)
        .prop_filter("positive mass", |v| v.iter().sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect()
        })
}
