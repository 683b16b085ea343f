use super::{CMatrix, C64};

/// Applies the `2^k x 2^k` matrix `m` in place to the amplitudes stored in
/// `data`, acting on bit positions `positions` (operand 0 is the local MSB).
pub(crate) fn apply_matrix(data: &mut [C64], m: &CMatrix, positions: &[usize]) {
    let arity = positions.len();
    let local = 1usize << arity;
    debug_assert_eq!(m.nrows(), local);
    let mask: usize = positions.iter().map(|p| 1usize << p).sum();
    let offsets: Vec<usize> = (0..local)
        .map(|l| {
            positions
                .iter()
                .enumerate()
                .map(|(k, &p)| ((l >> (arity - 1 - k)) & 1) << p)
                .sum()
        })
        .collect();
    let mut gathered = vec![C64::new(0.0, 0.0); local];
    for base in 0..data.len() {
        if base & mask != 0 {
            continue;
        }
        for (g, off) in gathered.iter_mut().zip(&offsets) {
            *g = data[base + off];
        }
        for (row, off) in offsets.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (col, g) in gathered.iter().enumerate() {
                acc += m[(row, col)] * g;
            }
            data[base + off] = acc;
        }
    }
}

/// Local index of `index` restricted to `qubits`, with `qubits[j]` as bit `j`.
pub(crate) fn gather_bits(index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .map(|(j, &q)| ((index >> q) & 1) << j)
        .sum()
}
