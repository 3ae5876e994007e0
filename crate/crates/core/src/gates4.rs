//! Quantum operations on `n` qubits as real `4ⁿ × 4ⁿ` matrices in the
//! normalized Pauli basis, and mixed states as real component vectors.
//!
//! `E_{μν} = 2⁻ⁿ Tr(σ_μ E(σ_ν))` with unnormalized Pauli strings `σ_μ`;
//! `μ` is read big-endian in base 4 (first qubit most significant).

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{self, I, ONE, ZERO};
use crate::liouville::{pauli_label, MatrixOperator, Representation, SuperOperator, MAX_PAULI_QUBITS};
use crate::propagator::QuantumOperation;

/// Tolerance on discarded imaginary parts and on the trace-preservation row.
pub const REALITY_TOL: f64 = 1e-10;

/// Tolerance on `U†U = I` for [`lift_unitary`].
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct GateMatrix4 {
    n_qubits: usize,
    matrix: Array2<f64>,
    trace_preserving: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector4 {
    n_qubits: usize,
    components: Array1<f64>,
}

/// `n` with `dim = 2ⁿ`, within the supported range.
pub fn qubit_count(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::invalid(format!("dimension {dim} is not a power of two")));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_PAULI_QUBITS {
        return Err(Error::invalid(format!("{n} qubits exceeds the supported maximum of {MAX_PAULI_QUBITS}")));
    }
    Ok(n)
}

/// Sparse form of a Pauli string: row `a` has its single nonzero entry at
/// column `a ^ flip` with value `phase(a)`.
#[derive(Clone, Copy)]
struct SparsePauli {
    n: usize,
    mu: usize,
    flip: usize,
}

impl SparsePauli {
    fn new(n: usize, mu: usize) -> Self {
        let mut flip = 0;
        for q in 0..n {
            let digit = (mu >> (2 * (n - 1 - q))) & 3;
            if digit == 1 || digit == 2 {
                flip |= 1 << (n - 1 - q);
            }
        }
        SparsePauli { n, mu, flip }
    }

    fn phase(&self, row: usize) -> C64 {
        let mut z = ONE;
        for q in 0..self.n {
            let digit = (self.mu >> (2 * (self.n - 1 - q))) & 3;
            let bit = (row >> (self.n - 1 - q)) & 1;
            z *= match (digit, bit) {
                (2, 0) => -I,
                (2, _) => I,
                (3, 1) => -ONE,
                _ => ONE,
            };
        }
        z
    }
}

fn check_qubits(n: usize, dim: usize) -> Result<()> {
    if n == 0 || n > MAX_PAULI_QUBITS {
        return Err(Error::invalid(format!("qubit count {n} is outside 1..={MAX_PAULI_QUBITS}")));
    }
    if dim != 1 << n {
        return Err(Error::invalid(format!("operation dimension {dim} is not 2^{n}")));
    }
    Ok(())
}

pub fn gate_matrix(e: &QuantumOperation, n: usize) -> Result<GateMatrix4> {
    gate_matrix_with(e.superop(), n, Exec::default())
}

/// Gate matrix of a superoperator, one column per Pauli input.
pub fn gate_matrix_with(s: &SuperOperator, n: usize, exec: Exec) -> Result<GateMatrix4> {
    let d = s.dim();
    check_qubits(n, d)?;
    let size = 1usize << (2 * n);
    let m = s.matrix();
    let paulis: Vec<SparsePauli> = (0..size).map(|mu| SparsePauli::new(n, mu)).collect();
    let scale = 1.0 / d as f64;
    // column ν of the complex gate matrix, as a row of its transpose
    let mut gt = Array2::<C64>::zeros((size, size));
    exec.for_each_row(gt.view_mut(), |nu, mut out| {
        let sn = paulis[nu];
        // X = E(σ_ν) as a d x d matrix
        let mut x = Array2::<C64>::zeros((d, d));
        for a in 0..d {
            let b = a ^ sn.flip;
            let w = sn.phase(a);
            let col = m.column(a * d + b);
            for (r, v) in col.iter().enumerate() {
                x[[r / d, r % d]] += v * w;
            }
        }
        for (mu, sm) in paulis.iter().enumerate() {
            // Tr(σ_μ X) = Σ_a σ_μ[a, a^flip] X[a^flip, a]
            let mut tr = ZERO;
            for a in 0..d {
                tr += sm.phase(a) * x[[a ^ sm.flip, a]];
            }
            out[mu] = tr * scale;
        }
    });
    let residue = gt.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));
    if residue > REALITY_TOL {
        return Err(Error::NotRealOperation { residue });
    }
    let matrix = gt.t().mapv(|z| z.re);
    Ok(GateMatrix4::from_matrix(n, matrix).expect("square of the right size"))
}

impl GateMatrix4 {
    pub fn from_matrix(n_qubits: usize, matrix: Array2<f64>) -> Result<Self> {
        let size = 1usize << (2 * n_qubits);
        if matrix.dim() != (size, size) {
            return Err(Error::invalid(format!("a {n_qubits}-qubit gate matrix must be {size}x{size}")));
        }
        let trace_preserving = matrix.row(0).iter().enumerate().all(|(k, &v)| {
            let target = if k == 0 { 1.0 } else { 0.0 };
            (v - target).abs() <= REALITY_TOL
        });
        Ok(GateMatrix4 { n_qubits, matrix, trace_preserving })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::from_matrix(n_qubits, Array2::eye(1 << (2 * n_qubits))).expect("square")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// `self · other`: `other` acts first.
    pub fn compose(&self, other: &GateMatrix4) -> Result<GateMatrix4> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::invalid("gate matrices act on different qubit counts"));
        }
        Self::from_matrix(self.n_qubits, self.matrix.dot(&other.matrix))
    }

    /// `max |G Gᵀ - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let g = &self.matrix;
        let prod = g.dot(&g.t()) - Array2::<f64>::eye(g.nrows());
        prod.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &GateMatrix4) -> f64 {
        self.matrix.iter().zip(other.matrix.iter()).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Back to a superoperator: `Σ E_{μν} |μ)(ν|`.
    pub fn to_superoperator(&self) -> SuperOperator {
        let n = self.n_qubits;
        let d = 1usize << n;
        let basis = crate::liouville::pauli_basis(n).expect("n within range");
        let b = basis.change_of_basis();
        let e = self.matrix.mapv(C64::from);
        let m = b.dot(&e).dot(&linalg::dagger(&b.view()));
        SuperOperator::new(Representation::Fock { dim: d }, m).expect("square")
    }

    /// CSV with a `n_qubits,<n>` line, a header of Pauli labels, then one
    /// labeled row per output index.
    pub fn to_csv(&self) -> String {
        let n = self.n_qubits;
        let size = self.matrix.nrows();
        let labels: Vec<String> = (0..size).map(|mu| pauli_label(n, mu)).collect();
        let mut out = format!("n_qubits,{n}\nrow,{}\n", labels.join(","));
        for (mu, row) in self.matrix.rows().into_iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|&v| crate::propagator::io::fmt_f64(v)).collect();
            out.push_str(&format!("{},{}\n", labels[mu], cells.join(",")));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (ln, first) = lines.next().ok_or_else(|| Error::invalid("empty gate-matrix CSV"))?;
        let n: usize = first
            .strip_prefix("n_qubits,")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::invalid(format!("line {}: expected `n_qubits,<n>`", ln + 1)))?;
        if n == 0 || n > MAX_PAULI_QUBITS {
            return Err(Error::invalid(format!("line {}: qubit count {n} out of range", ln + 1)));
        }
        let size = 1usize << (2 * n);
        lines.next().ok_or_else(|| Error::invalid("gate-matrix CSV has no header row"))?;
        let mut matrix = Array2::<f64>::zeros((size, size));
        let mut rows = 0;
        for (ln, line) in lines {
            if rows == size {
                return Err(Error::invalid(format!("line {}: more than {size} rows", ln + 1)));
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != size + 1 {
                return Err(Error::invalid(format!("line {}: expected {} fields, found {}", ln + 1, size + 1, cells.len())));
            }
            for (k, cell) in cells[1..].iter().enumerate() {
                matrix[[rows, k]] = cell
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("line {}: `{cell}` is not a number", ln + 1)))?;
            }
            rows += 1;
        }
        if rows != size {
            return Err(Error::invalid(format!("expected {size} rows, found {rows}")));
        }
        Self::from_matrix(n, matrix)
    }
}

impl StateVector4 {
    pub fn new(n_qubits: usize, components: Array1<f64>) -> Result<Self> {
        check_qubits(n_qubits, 1 << n_qubits)?;
        if components.len() != 1 << (2 * n_qubits) {
            return Err(Error::invalid(format!("a {n_qubits}-qubit state needs {} components", 1 << (2 * n_qubits))));
        }
        Ok(StateVector4 { n_qubits, components })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn components(&self) -> &Array1<f64> {
        &self.components
    }
}

/// `ρ_μ = (μ|ρ) = Tr(σ_μ ρ)/√2ⁿ`.
pub fn state_vector4(rho: &MatrixOperator) -> Result<StateVector4> {
    let d = rho.dim();
    let n = qubit_count(d)?;
    let defect = rho.hermiticity_defect();
    if defect > REALITY_TOL {
        return Err(Error::invalid(format!("state is not Hermitian (defect {defect:e})")));
    }
    let r = rho.entries();
    let norm = 1.0 / (d as f64).sqrt();
    let components = (0..1usize << (2 * n))
        .map(|mu| {
            let s = SparsePauli::new(n, mu);
            let tr: C64 = (0..d).map(|a| s.phase(a) * r[[a ^ s.flip, a]]).sum();
            tr.re * norm
        })
        .collect();
    StateVector4::new(n, components)
}

/// `Σ_μ ρ_μ σ_μ/√2ⁿ`.
pub fn reconstruct(v: &StateVector4) -> MatrixOperator {
    let n = v.n_qubits;
    let d = 1usize << n;
    let norm = 1.0 / (d as f64).sqrt();
    let mut m = Array2::<C64>::zeros((d, d));
    for (mu, &c) in v.components.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let s = SparsePauli::new(n, mu);
        for a in 0..d {
            m[[a, a ^ s.flip]] += s.phase(a) * (c * norm);
        }
    }
    MatrixOperator::new(Representation::Fock { dim: d }, m).expect("square")
}

pub fn apply_gate4(g: &GateMatrix4, v: &StateVector4) -> Result<StateVector4> {
    if g.n_qubits != v.n_qubits {
        return Err(Error::invalid(format!(
            "gate acts on {} qubits but the state has {}",
            g.n_qubits, v.n_qubits
        )));
    }
    StateVector4::new(v.n_qubits, g.matrix.dot(&v.components))
}

/// `ρ ↦ U ρ U†` as an instantaneous operation.
pub fn lift_unitary(u: &MatrixOperator) -> Result<QuantumOperation> {
    let d = u.dim();
    let e = u.entries();
    let defect = linalg::max_abs(&(linalg::dagger(&e).dot(&e) - linalg::identity(d)).view());
    if defect > UNITARITY_TOL {
        return Err(Error::invalid(format!("operator is not unitary (defect {defect:e})")));
    }
    let s = SuperOperator::sandwich(u, &u.dagger())?;
    Ok(QuantumOperation::instantaneous(s, "unitary"))
}
