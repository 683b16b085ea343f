//! Gate vocabulary and circuit container.

use crate::error::{domain, Error};
use crate::sim::kernel_apply;
use crate::sim::{c, gates, CMatrix, DensityMatrix, StateVector, C64, MAX_QUBITS};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

/// Largest register for which full unitaries are built.
pub const MAX_UNITARY_QUBITS: usize = 5;

/// Maps an angle into `(-2pi, 2pi]`. `R_y` has period `4pi`, so this never
/// changes the gate's matrix.
pub fn normalize_angle(theta: f64) -> f64 {
    let period = 4.0 * PI;
    let mut t = theta.rem_euclid(period);
    if t > 2.0 * PI {
        t -= period;
    }
    t
}

/// The demon's knowledge: the measurement setting `a` (0 = sigma_Z, 1 = sigma_X)
/// and the chosen eigenstate `b` (0 = +1, 1 = -1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemonChoice {
    a: u8,
    b: u8,
}

impl DemonChoice {
    pub fn new(a: u8, b: u8) -> Result<Self> {
        if a > 1 || b > 1 {
            return Err(domain!("demon bits must be 0 or 1, got a={a} b={b}"));
        }
        Ok(Self { a, b })
    }

    pub fn a(self) -> u8 {
        self.a
    }

    pub fn b(self) -> u8 {
        self.b
    }

    /// `R_y` angle rotating `|0>` into the chosen eigenstate: `(pi/2)(a + 2b)`.
    pub fn rotation_angle(self) -> f64 {
        FRAC_PI_2 * f64::from(self.a + 2 * self.b)
    }
}

/// Gate kinds understood by the simulator and compiler.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H,
    X,
    Z,
    Ry(f64),
    Cz,
    Cnot,
    Ch,
    Cry(f64),
    Swap,
    /// Demon rotation: operands `[b, a, target]`, applies `R_y((pi/2)(a + 2b))`.
    Ccu,
    /// Alice's response; identical to [`Gate::Ccu`] (V = U).
    Ccv,
    /// Arbitrary unitary on `log2(dim)` operands.
    Unitary(CMatrix),
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H => "H",
            Gate::X => "X",
            Gate::Z => "Z",
            Gate::Ry(_) => "RY",
            Gate::Cz => "CZ",
            Gate::Cnot => "CNOT",
            Gate::Ch => "CH",
            Gate::Cry(_) => "CRY",
            Gate::Swap => "SWAP",
            Gate::Ccu => "CCU",
            Gate::Ccv => "CCV",
            Gate::Unitary(_) => "U",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Gate::H | Gate::X | Gate::Z | Gate::Ry(_) => 1,
            Gate::Cz | Gate::Cnot | Gate::Ch | Gate::Cry(_) | Gate::Swap => 2,
            Gate::Ccu | Gate::Ccv => 3,
            Gate::Unitary(m) => m.nrows().trailing_zeros() as usize,
        }
    }

    /// Gates that equal their own inverse.
    pub fn is_self_inverse(&self) -> bool {
        matches!(self, Gate::H | Gate::X | Gate::Z | Gate::Cz | Gate::Cnot | Gate::Ch | Gate::Swap)
    }

    /// Gates whose operands may be permuted without changing the matrix.
    pub fn is_symmetric(&self) -> bool {
        matches!(self, Gate::Cz | Gate::Swap)
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            Gate::Ry(t) | Gate::Cry(t) => vec![*t],
            Gate::Unitary(m) => {
                let d = m.nrows();
                let mut out = Vec::with_capacity(2 * d * d);
                for i in 0..d {
                    for j in 0..d {
                        out.push(m[(i, j)].re);
                        out.push(m[(i, j)].im);
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }

    pub fn matrix(&self) -> CMatrix {
        match self {
            Gate::H => gates::h(),
            Gate::X => gates::x(),
            Gate::Z => gates::z(),
            Gate::Ry(t) => gates::ry(*t),
            Gate::Cz => gates::cz(),
            Gate::Cnot => gates::cnot(),
            Gate::Ch => gates::controlled(&gates::h()),
            Gate::Cry(t) => gates::controlled(&gates::ry(*t)),
            Gate::Swap => gates::swap(),
            Gate::Ccu | Gate::Ccv => demon_matrix(),
            Gate::Unitary(m) => m.clone(),
        }
    }

    /// Builds a gate from its serialized name and parameter list.
    pub fn from_parts(kind: &str, params: &[f64]) -> Result<Self> {
        let want = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(domain!("{kind} takes {n} parameter(s), got {}", params.len()))
            }
        };
        let gate = match kind.to_ascii_uppercase().as_str() {
            "H" => want(0).map(|_| Gate::H)?,
            "X" => want(0).map(|_| Gate::X)?,
            "Z" => want(0).map(|_| Gate::Z)?,
            "RY" => want(1).map(|_| Gate::Ry(normalize_angle(params[0])))?,
            "CZ" => want(0).map(|_| Gate::Cz)?,
            "CNOT" | "CX" => want(0).map(|_| Gate::Cnot)?,
            "CH" => want(0).map(|_| Gate::Ch)?,
            "CRY" => want(1).map(|_| Gate::Cry(normalize_angle(params[0])))?,
            "SWAP" => want(0).map(|_| Gate::Swap)?,
            "CCU" => want(0).map(|_| Gate::Ccu)?,
            "CCV" => want(0).map(|_| Gate::Ccv)?,
            "U" => {
                let entries = params.len() / 2;
                let d = (entries as f64).sqrt().round() as usize;
                if !params.len().is_multiple_of(2) || d * d != entries || d < 2 || !d.is_power_of_two() {
                    return Err(domain!("U needs 2*d*d parameters for a power-of-two d, got {}", params.len()));
                }
                let m = CMatrix::from_row_iterator(d, d, params.chunks(2).map(|p| c(p[0], p[1])));
                Gate::Unitary(m)
            }
            other => return Err(domain!("unknown gate kind {other:?}")),
        };
        Ok(gate)
    }
}

fn demon_matrix() -> CMatrix {
    let mut m = CMatrix::zeros(8, 8);
    for b in 0..2u8 {
        for a in 0..2u8 {
            let theta = DemonChoice { a, b }.rotation_angle();
            let block = gates::ry(theta);
            let base = usize::from(b) << 2 | usize::from(a) << 1;
            m.view_mut((base, base), (2, 2)).copy_from(&block);
        }
    }
    m
}

/// One gate applied to an ordered operand list (controls before targets).
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub gate: Gate,
    pub qubits: Vec<usize>,
}

impl GateOp {
    pub fn new(gate: Gate, qubits: Vec<usize>) -> Result<Self> {
        if gate.arity() != qubits.len() {
            return Err(domain!("{} takes {} operand(s), got {}", gate.name(), gate.arity(), qubits.len()));
        }
        for (k, q) in qubits.iter().enumerate() {
            if qubits[..k].contains(q) {
                return Err(domain!("{} has duplicate operand {q}", gate.name()));
            }
        }
        if let Gate::Unitary(m) = &gate {
            let dev = crate::sim::unitarity_deviation(m);
            if dev > crate::sim::VALIDATION_TOL {
                return Err(Error::Validation(format!("custom gate is not unitary (deviation {dev:.3e})")));
            }
        }
        let gate = match gate {
            Gate::Ry(t) => Gate::Ry(normalize_angle(t)),
            Gate::Cry(t) => Gate::Cry(normalize_angle(t)),
            g => g,
        };
        Ok(Self { gate, qubits })
    }

    fn fixed(gate: Gate, qubits: &[usize]) -> Self {
        Self::new(gate, qubits.to_vec()).expect("library gate with distinct operands")
    }

    pub fn h(q: usize) -> Self {
        Self::fixed(Gate::H, &[q])
    }
    pub fn x(q: usize) -> Self {
        Self::fixed(Gate::X, &[q])
    }
    pub fn z(q: usize) -> Self {
        Self::fixed(Gate::Z, &[q])
    }
    pub fn ry(q: usize, theta: f64) -> Self {
        Self::fixed(Gate::Ry(theta), &[q])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::fixed(Gate::Cz, &[a, b])
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::fixed(Gate::Cnot, &[control, target])
    }
    pub fn ch(control: usize, target: usize) -> Self {
        Self::fixed(Gate::Ch, &[control, target])
    }
    pub fn cry(control: usize, target: usize, theta: f64) -> Self {
        Self::fixed(Gate::Cry(theta), &[control, target])
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Self::fixed(Gate::Swap, &[a, b])
    }
    pub fn ccu(b_control: usize, a_control: usize, target: usize) -> Self {
        Self::fixed(Gate::Ccu, &[b_control, a_control, target])
    }
    pub fn ccv(b_control: usize, a_control: usize, target: usize) -> Self {
        Self::fixed(Gate::Ccv, &[b_control, a_control, target])
    }

    pub fn arity(&self) -> usize {
        self.qubits.len()
    }

    pub fn matrix(&self) -> CMatrix {
        self.gate.matrix()
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.gate.name())?;
        match &self.gate {
            Gate::Ry(t) | Gate::Cry(t) => write!(f, "({t:.6})")?,
            _ => {}
        }
        let qs: Vec<String> = self.qubits.iter().map(|q| format!("q{q}")).collect();
        write!(f, " {}", qs.join(","))
    }
}

/// `gate_matrix`: the `2^arity` unitary of an operation.
pub fn gate_matrix(op: &GateOp) -> CMatrix {
    op.matrix()
}

/// Ordered list of gates over `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<GateOp>,
    pub label: String,
}

impl Circuit {
    pub fn new(num_qubits: usize, label: impl Into<String>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(domain!("qubit count {num_qubits} outside 1..={MAX_QUBITS}"));
        }
        Ok(Self { num_qubits, ops: Vec::new(), label: label.into() })
    }

    pub fn from_ops(num_qubits: usize, label: impl Into<String>, ops: Vec<GateOp>) -> Result<Self> {
        let mut c = Self::new(num_qubits, label)?;
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        if let Some(q) = op.qubits.iter().find(|&&q| q >= self.num_qubits) {
            return Err(domain!("operand {q} out of range for {}-qubit circuit", self.num_qubits));
        }
        self.ops.push(op);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn into_ops(self) -> Vec<GateOp> {
        self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Concatenation `self` then `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if other.num_qubits != self.num_qubits {
            return Err(domain!("cannot append {}-qubit circuit to {}-qubit circuit", other.num_qubits, self.num_qubits));
        }
        let mut out = self.clone();
        out.ops.extend(other.ops.iter().cloned());
        Ok(out)
    }

    /// Same gates on a wider register with operand `q` relabelled `map[q]`.
    pub fn relabel(&self, num_qubits: usize, map: &[usize]) -> Result<Circuit> {
        if map.len() < self.num_qubits {
            return Err(domain!("relabel map covers {} of {} qubits", map.len(), self.num_qubits));
        }
        let mut out = Circuit::new(num_qubits, self.label.clone())?;
        for op in &self.ops {
            out.push(GateOp::new(op.gate.clone(), op.qubits.iter().map(|&q| map[q]).collect())?)?;
        }
        Ok(out)
    }

    /// Number of layers when every gate is scheduled as early as possible.
    pub fn depth(&self) -> usize {
        let mut frontier = vec![0usize; self.num_qubits];
        for op in &self.ops {
            let layer = op.qubits.iter().map(|&q| frontier[q]).max().unwrap_or(0) + 1;
            for &q in &op.qubits {
                frontier[q] = layer;
            }
        }
        frontier.into_iter().max().unwrap_or(0)
    }

    pub fn count_where(&self, pred: impl Fn(&GateOp) -> bool) -> usize {
        self.ops.iter().filter(|op| pred(op)).count()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.count_where(|op| op.arity() == 2)
    }

    /// Runs the circuit on `|0...0>`.
    pub fn simulate(&self) -> Result<StateVector> {
        let mut psi = StateVector::zero(self.num_qubits)?;
        for op in &self.ops {
            psi = psi.apply_unitary(&op.matrix(), &op.qubits)?;
        }
        Ok(psi)
    }

    /// Noiseless density-matrix evolution of `|0...0><0...0|`.
    pub fn simulate_density(&self) -> Result<DensityMatrix> {
        let mut rho = DensityMatrix::zero(self.num_qubits)?;
        for op in &self.ops {
            rho = rho.apply_unitary(&op.matrix(), &op.qubits)?;
        }
        Ok(rho)
    }

    /// Full unitary (product of gate matrices in program order).
    pub fn unitary(&self) -> Result<CMatrix> {
        circuit_unitary(self)
    }
}

/// Product of the expanded gate matrices, last gate leftmost.
pub fn circuit_unitary(c: &Circuit) -> Result<CMatrix> {
    let n = c.num_qubits();
    if n > MAX_UNITARY_QUBITS {
        return Err(Error::Resource(format!("{n}-qubit unitary exceeds the {MAX_UNITARY_QUBITS}-qubit limit")));
    }
    let dim = 1usize << n;
    // row-major flat storage: row bits sit above the column bits
    let mut flat = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        flat[i * dim + i] = C64::new(1.0, 0.0);
    }
    for op in c.ops() {
        let rows: Vec<usize> = op.qubits.iter().map(|q| q + n).collect();
        kernel_apply(&mut flat, &op.matrix(), &rows);
    }
    Ok(CMatrix::from_row_slice(dim, dim, &flat))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct OpRecord {
    kind: String,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    params: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CircuitRecord {
    qubits: usize,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    label: String,
    ops: Vec<OpRecord>,
}

impl Circuit {
    /// Serialises to `{"qubits": n, "label": ..., "ops": [{"kind", "qubits", "params"}]}`.
    pub fn to_json(&self) -> String {
        let record = CircuitRecord {
            qubits: self.num_qubits,
            label: self.label.clone(),
            ops: self
                .ops
                .iter()
                .map(|op| OpRecord {
                    kind: op.gate.name().to_string(),
                    qubits: op.qubits.clone(),
                    params: op.gate.params(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&record).expect("circuit records always serialise")
    }

    /// Parses the circuit file format; syntax errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let record: CircuitRecord = serde_json::from_str(text)
            .map_err(|e| Error::Validation(format!("circuit file, line {} column {}: {e}", e.line(), e.column())))?;
        let mut c = Circuit::new(record.qubits, record.label)?;
        for (i, op) in record.ops.into_iter().enumerate() {
            let gate = Gate::from_parts(&op.kind, &op.params).map_err(|e| Error::Validation(format!("op {i}: {e}")))?;
            let op = GateOp::new(gate, op.qubits).map_err(|e| Error::Validation(format!("op {i}: {e}")))?;
            c.push(op).map_err(|e| Error::Validation(format!("op {i}: {e}")))?;
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::unitarity_deviation;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn approx_eq(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    /// Independent oracle: exp(-i theta Y / 2) by power series.
    fn ry_series(theta: f64) -> CMatrix {
        let gen = gates::y() * c(0.0, -theta / 2.0);
        let mut term = CMatrix::identity(2, 2);
        let mut sum = term.clone();
        for k in 1..40 {
            term = &term * &gen * c(1.0 / k as f64, 0.0);
            sum += &term;
        }
        sum
    }

    #[test]
    fn demon_angles() {
        let angle = |a, b| DemonChoice::new(a, b).unwrap().rotation_angle();
        assert_eq!(angle(0, 0), 0.0);
        assert!((angle(1, 0) - FRAC_PI_2).abs() < 1e-15);
        assert!((angle(0, 1) - PI).abs() < 1e-15);
        assert!((angle(1, 1) - 1.5 * PI).abs() < 1e-15);
        assert!(DemonChoice::new(2, 0).is_err());
    }

    #[test]
    fn demon_rotations_match_series_oracle() {
        let zero = StateVector::zero(1).unwrap();
        // (a, b) -> expected state up to global phase
        let s = FRAC_1_SQRT_2;
        let expected = [((0, 0), [1.0, 0.0]), ((1, 0), [s, s]), ((0, 1), [0.0, 1.0]), ((1, 1), [s, -s])];
        for ((a, b), want) in expected {
            let theta = DemonChoice::new(a, b).unwrap().rotation_angle();
            let series = ry_series(theta);
            assert!(approx_eq(&series, &gates::ry(theta), 1e-12));
            let out = zero.apply_unitary(&series, &[0]).unwrap();
            let overlap = out.amplitudes()[0] * want[0] + out.amplitudes()[1] * want[1];
            assert!((overlap.norm() - 1.0).abs() < 1e-12, "a={a} b={b}");
        }
    }

    #[test]
    fn ccu_truth_table_exhaustive() {
        let m = Gate::Ccu.matrix();
        assert!(unitarity_deviation(&m) < 1e-12);
        for b in 0..2usize {
            for a in 0..2usize {
                let input = StateVector::basis(3, b << 2 | a << 1).unwrap();
                // operand order [b, a, target] -> with qubits [2, 1, 0], local index == basis index
                let out = input.apply_unitary(&m, &[2, 1, 0]).unwrap();
                let theta = FRAC_PI_2 * (a + 2 * b) as f64;
                let r = gates::ry(theta);
                let mut want = vec![c(0.0, 0.0); 8];
                want[b << 2 | a << 1] = r[(0, 0)];
                want[b << 2 | a << 1 | 1] = r[(1, 0)];
                for (x, y) in out.amplitudes().iter().zip(&want) {
                    assert!((x - y).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn fixed_matrices() {
        let cnot = Gate::Cnot.matrix();
        let mut perm = CMatrix::identity(4, 4);
        perm.swap_rows(2, 3);
        assert!(approx_eq(&cnot, &perm, 0.0));
        let ch = Gate::Ch.matrix();
        assert!(approx_eq(&ch.view((0, 0), (2, 2)).into_owned(), &CMatrix::identity(2, 2), 0.0));
        assert!(approx_eq(&ch.view((2, 2), (2, 2)).into_owned(), &gates::h(), 0.0));
    }

    #[test]
    fn unitary_of_small_circuits() {
        let empty = Circuit::new(2, "").unwrap();
        assert!(approx_eq(&empty.unitary().unwrap(), &CMatrix::identity(4, 4), 0.0));
        let hh = Circuit::from_ops(1, "", vec![GateOp::h(0), GateOp::h(0)]).unwrap();
        assert!(approx_eq(&hh.unitary().unwrap(), &CMatrix::identity(2, 2), 1e-12));
        let big = Circuit::new(6, "").unwrap();
        assert!(matches!(big.unitary(), Err(Error::Resource(_))));
    }

    #[test]
    fn unitary_matches_simulation() {
        let c = Circuit::from_ops(
            3,
            "",
            vec![GateOp::h(0), GateOp::cnot(0, 2), GateOp::ry(1, 0.4), GateOp::ccu(0, 1, 2), GateOp::ch(2, 1)],
        )
        .unwrap();
        let u = c.unitary().unwrap();
        let psi = c.simulate().unwrap();
        for i in 0..8 {
            assert!((u[(i, 0)] - psi.amplitudes()[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_ops() {
        assert!(GateOp::new(Gate::Cz, vec![1]).is_err());
        assert!(GateOp::new(Gate::Cz, vec![1, 1]).is_err());
        let mut c = Circuit::new(2, "").unwrap();
        assert!(c.push(GateOp::h(2)).is_err());
        assert!(Gate::from_parts("TOFFOLI", &[]).is_err());
    }

    #[test]
    fn angle_normalization() {
        assert!((normalize_angle(4.0 * PI + 0.1) - 0.1).abs() < 1e-12);
        assert!((normalize_angle(-2.0 * PI) - 2.0 * PI).abs() < 1e-12);
        assert!((normalize_angle(3.0 * PI) + PI).abs() < 1e-12);
        let a = gates::ry(3.0 * PI);
        let b = gates::ry(normalize_angle(3.0 * PI));
        assert!(approx_eq(&a, &b, 1e-12));
    }

    #[test]
    fn json_round_trip_and_errors() {
        let u = gates::ry(0.3).kronecker(&gates::h());
        let c = Circuit::from_ops(
            3,
            "demo",
            vec![
                GateOp::h(0),
                GateOp::ry(1, -0.25),
                GateOp::cry(0, 2, 1.0),
                GateOp::ccv(0, 1, 2),
                GateOp::new(Gate::Unitary(u), vec![2, 0]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(Circuit::from_json(&c.to_json()).unwrap(), c);
        let err = Circuit::from_json("{\"qubits\": 2,\n \"ops\": [}").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}
