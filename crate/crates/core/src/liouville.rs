//! Finite-dimensional Liouville space.
//!
//! Operators on a truncated Hilbert space are vectorized row-major: the ket
//! component with index `x * dim + x'` is the matrix element `<x|A|x'>`. With
//! that stacking, left multiplication is `L_A = A ⊗ I` and right
//! multiplication is `R_A = I ⊗ Aᵀ`, so the discrete kernel of `L_A` is
//! literally `A(x, y) δ(x', y')`.

use std::ops::{Add, Mul, Sub};

use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, I, ONE, ZERO};

/// Largest qubit count accepted by [`pauli_basis`].
pub const MAX_PAULI_QUBITS: usize = 6;

/// Basis in which operator matrices are written.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// A discrete basis `|0>, ..., |dim-1>`: oscillator number states, or
    /// the computational basis of a qubit register.
    Fock { dim: usize },
    /// A uniform position grid on `[-length/2, length/2)` with `points` nodes.
    Grid { points: usize, length: f64 },
}

impl Representation {
    pub fn dim(&self) -> usize {
        match *self {
            Representation::Fock { dim } => dim,
            Representation::Grid { points, .. } => points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Representation::Fock { dim: 0 } => Err(Error::invalid("Fock dimension must be positive")),
            Representation::Grid { points, length } if points < 2 || !(length > 0.0) => {
                Err(Error::invalid("grid needs at least two points and a positive length"))
            }
            _ => Ok(()),
        }
    }
}

/// An operator on the truncated Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixOperator {
    rep: Representation,
    entries: Array2<C64>,
}

impl MatrixOperator {
    pub fn new(rep: Representation, entries: Array2<C64>) -> Result<Self> {
        rep.validate()?;
        let (r, c) = entries.dim();
        if r != c {
            return Err(Error::invalid(format!("operator matrix is {r}x{c}, not square")));
        }
        Error::check_dim(rep.dim(), r)?;
        Ok(MatrixOperator { rep, entries })
    }

    /// Operator in a plain discrete basis of size `entries.nrows()`.
    pub fn from_matrix(entries: Array2<C64>) -> Result<Self> {
        let dim = entries.nrows();
        Self::new(Representation::Fock { dim }, entries)
    }

    pub fn identity(rep: Representation) -> Self {
        MatrixOperator { rep, entries: linalg::identity(rep.dim()) }
    }

    pub fn zeros(rep: Representation) -> Self {
        let d = rep.dim();
        MatrixOperator { rep, entries: Array2::zeros((d, d)) }
    }

    /// `|x><x'|`.
    pub fn matrix_unit(rep: Representation, x: usize, xp: usize) -> Self {
        let mut m = Self::zeros(rep);
        m.entries[[x, xp]] = ONE;
        m
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn representation(&self) -> Representation {
        self.rep
    }

    pub fn entries(&self) -> ArrayView2<'_, C64> {
        self.entries.view()
    }

    pub fn into_entries(self) -> Array2<C64> {
        self.entries
    }

    pub fn dagger(&self) -> Self {
        MatrixOperator { rep: self.rep, entries: linalg::dagger(&self.entries.view()) }
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.entries.view())
    }

    /// `A B`.
    pub fn product(&self, other: &MatrixOperator) -> Result<Self> {
        Error::check_dim(self.dim(), other.dim())?;
        Ok(MatrixOperator { rep: self.rep, entries: self.entries.dot(&other.entries) })
    }

    pub fn scale(&self, s: C64) -> Self {
        MatrixOperator { rep: self.rep, entries: &self.entries * s }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.entries.view())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Same matrix tagged with another representation of equal dimension.
    pub fn with_representation(self, rep: Representation) -> Result<Self> {
        Self::new(rep, self.entries)
    }
}

impl Add for &MatrixOperator {
    type Output = MatrixOperator;
    fn add(self, rhs: Self) -> MatrixOperator {
        MatrixOperator { rep: self.rep, entries: &self.entries + &rhs.entries }
    }
}

impl Sub for &MatrixOperator {
    type Output = MatrixOperator;
    fn sub(self, rhs: Self) -> MatrixOperator {
        MatrixOperator { rep: self.rep, entries: &self.entries - &rhs.entries }
    }
}

/// A vectorized operator `|A)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorKet {
    rep: Representation,
    components: Array1<C64>,
}

impl OperatorKet {
    /// Wraps raw components; the length must be a perfect square.
    pub fn from_components(components: Array1<C64>) -> Result<Self> {
        let n = components.len();
        let dim = (n as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != n {
            return Err(Error::invalid(format!("ket length {n} is not a positive perfect square")));
        }
        Ok(OperatorKet { rep: Representation::Fock { dim }, components })
    }

    pub fn with_representation(self, rep: Representation) -> Result<Self> {
        Error::check_dim(self.dim(), rep.dim())?;
        Ok(OperatorKet { rep, components: self.components })
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn representation(&self) -> Representation {
        self.rep
    }

    pub fn components(&self) -> &Array1<C64> {
        &self.components
    }

    /// Component `(x, x')`, i.e. `<x|A|x'>`.
    pub fn at(&self, x: usize, xp: usize) -> C64 {
        self.components[x * self.dim() + xp]
    }

    /// `(self|other)` with the first argument conjugated.
    pub fn inner(&self, other: &OperatorKet) -> Result<C64> {
        Error::check_dim(self.components.len(), other.components.len())?;
        Ok(self.components.iter().zip(other.components.iter()).map(|(a, b)| a.conj() * b).sum())
    }
}

/// A linear map on Liouville space, stored as a `dim² x dim²` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator {
    rep: Representation,
    matrix: Array2<C64>,
}

impl SuperOperator {
    pub fn new(rep: Representation, matrix: Array2<C64>) -> Result<Self> {
        rep.validate()?;
        let d2 = rep.dim() * rep.dim();
        let (r, c) = matrix.dim();
        if r != d2 || c != d2 {
            return Err(Error::invalid(format!(
                "superoperator matrix is {r}x{c}, expected {d2}x{d2} for dim {}",
                rep.dim()
            )));
        }
        Ok(SuperOperator { rep, matrix })
    }

    pub(crate) fn from_parts(rep: Representation, matrix: Array2<C64>) -> Self {
        debug_assert_eq!(matrix.nrows(), rep.dim() * rep.dim());
        SuperOperator { rep, matrix }
    }

    pub fn identity(rep: Representation) -> Self {
        let d = rep.dim();
        SuperOperator { rep, matrix: linalg::identity(d * d) }
    }

    pub fn zeros(rep: Representation) -> Self {
        let d2 = rep.dim() * rep.dim();
        SuperOperator { rep, matrix: Array2::zeros((d2, d2)) }
    }

    /// `L_A R_B`, i.e. `X ↦ A X B`, as the matrix `A ⊗ Bᵀ`.
    pub fn sandwich(a: &MatrixOperator, b: &MatrixOperator) -> Result<Self> {
        Error::check_dim(a.dim(), b.dim())?;
        Ok(SuperOperator { rep: a.rep, matrix: linalg::kron(&a.entries.view(), &b.entries.t()) })
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn representation(&self) -> Representation {
        self.rep
    }

    pub fn matrix(&self) -> ArrayView2<'_, C64> {
        self.matrix.view()
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn apply_ket(&self, v: &OperatorKet) -> Result<OperatorKet> {
        Error::check_dim(self.dim(), v.dim())?;
        Ok(OperatorKet { rep: self.rep, components: self.matrix.dot(&v.components) })
    }

    /// `devectorize ∘ matrix ∘ vectorize`.
    pub fn apply(&self, a: &MatrixOperator) -> Result<MatrixOperator> {
        Error::check_dim(self.dim(), a.dim())?;
        let out = self.apply_ket(&vectorize(a))?;
        devectorize(&out)
    }

    /// `self ∘ other` (other acts first).
    pub fn compose(&self, other: &SuperOperator) -> Result<SuperOperator> {
        Error::check_dim(self.dim(), other.dim())?;
        Ok(SuperOperator { rep: self.rep, matrix: self.matrix.dot(&other.matrix) })
    }

    pub fn scale(&self, s: C64) -> SuperOperator {
        SuperOperator { rep: self.rep, matrix: &self.matrix * s }
    }

    pub fn frobenius_norm(&self) -> f64 {
        linalg::frobenius_norm(&self.matrix.view())
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &SuperOperator) -> f64 {
        linalg::max_abs(&(&self.matrix - &other.matrix).view())
    }

    pub fn adjoint(&self) -> SuperOperator {
        adjoint_superoperator(self)
    }
}

impl Add for &SuperOperator {
    type Output = SuperOperator;
    fn add(self, rhs: Self) -> SuperOperator {
        SuperOperator { rep: self.rep, matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &SuperOperator {
    type Output = SuperOperator;
    fn sub(self, rhs: Self) -> SuperOperator {
        SuperOperator { rep: self.rep, matrix: &self.matrix - &rhs.matrix }
    }
}

impl Mul for &SuperOperator {
    type Output = SuperOperator;
    fn mul(self, rhs: Self) -> SuperOperator {
        SuperOperator { rep: self.rep, matrix: self.matrix.dot(&rhs.matrix) }
    }
}

impl<'a> Mul<&'a SuperOperator> for f64 {
    type Output = SuperOperator;
    fn mul(self, rhs: &'a SuperOperator) -> SuperOperator {
        rhs.scale(C64::from(self))
    }
}

/// `(A|B) = Tr(A† B)`.
pub fn inner_product(a: &MatrixOperator, b: &MatrixOperator) -> Result<C64> {
    Error::check_dim(a.dim(), b.dim())?;
    Ok(a.entries.iter().zip(b.entries.iter()).map(|(x, y)| x.conj() * y).sum())
}

pub fn vectorize(a: &MatrixOperator) -> OperatorKet {
    let components = a.entries.iter().copied().collect::<Array1<C64>>();
    OperatorKet { rep: a.rep, components }
}

pub fn devectorize(v: &OperatorKet) -> Result<MatrixOperator> {
    let d = v.dim();
    let entries = v
        .components
        .clone()
        .into_shape_with_order((d, d))
        .map_err(|e| Error::invalid(format!("devectorize: {e}")))?;
    Ok(MatrixOperator { rep: v.rep, entries })
}

/// `(L_A, R_A)` with `L_A|B) = |AB)` and `R_A|B) = |BA)`.
pub fn multiplication_superoperators(a: &MatrixOperator) -> (SuperOperator, SuperOperator) {
    let id = linalg::identity(a.dim());
    let left = linalg::kron(&a.entries.view(), &id.view());
    let right = linalg::kron(&id.view(), &a.entries.t());
    (SuperOperator { rep: a.rep, matrix: left }, SuperOperator { rep: a.rep, matrix: right })
}

/// Lie and Jordan multiplication `(L⁻_A, L⁺_A)`:
/// `L⁻_A B = (AB - BA)/(iħ)` and `L⁺_A B = (AB + BA)/2`.
pub fn lie_jordan_superoperators(a: &MatrixOperator, hbar: f64) -> Result<(SuperOperator, SuperOperator)> {
    check_hbar(hbar)?;
    let (l, r) = multiplication_superoperators(a);
    let minus = (&l - &r).scale(1.0 / (I * hbar));
    let plus = (&l + &r).scale(C64::from(0.5));
    Ok((minus, plus))
}

/// `S†` with `(S†(A)|B) = (A|S(B))`; the Hilbert–Schmidt inner product is the
/// plain ket inner product, so this is the conjugate-transposed matrix.
pub fn adjoint_superoperator(s: &SuperOperator) -> SuperOperator {
    SuperOperator { rep: s.rep, matrix: linalg::dagger(&s.matrix.view()) }
}

pub(crate) fn check_hbar(hbar: f64) -> Result<()> {
    if hbar > 0.0 && hbar.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("hbar must be positive and finite, got {hbar}")))
    }
}

/// Single-qubit Pauli matrix `σ_k` for `k` in `0..4` = (I, X, Y, Z).
pub fn pauli(k: usize) -> Array2<C64> {
    match k {
        0 => ndarray::array![[ONE, ZERO], [ZERO, ONE]],
        1 => ndarray::array![[ZERO, ONE], [ONE, ZERO]],
        2 => ndarray::array![[ZERO, -I], [I, ZERO]],
        3 => ndarray::array![[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("Pauli index {k} out of range"),
    }
}

/// Unnormalized tensor Pauli `σ_{μ1} ⊗ ... ⊗ σ_{μn}`, `μ` read big-endian base 4.
pub fn pauli_string(n_qubits: usize, mu: usize) -> Array2<C64> {
    let mut out = Array2::from_elem((1, 1), ONE);
    for q in 0..n_qubits {
        let digit = (mu / 4usize.pow((n_qubits - 1 - q) as u32)) % 4;
        out = linalg::kron(&out.view(), &pauli(digit).view());
    }
    out
}

/// `IXYZ` label of basis index `mu`.
pub fn pauli_label(n_qubits: usize, mu: usize) -> String {
    (0..n_qubits)
        .map(|q| ['I', 'X', 'Y', 'Z'][(mu / 4usize.pow((n_qubits - 1 - q) as u32)) % 4])
        .collect()
}

/// Normalized Pauli basis `|μ) = σ_μ / √(2ⁿ)` of the `n`-qubit operator space.
#[derive(Clone, Debug)]
pub struct PauliBasis {
    n_qubits: usize,
    elements: Vec<OperatorKet>,
}

impl PauliBasis {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[OperatorKet] {
        &self.elements
    }

    /// Columns are the basis kets; the matrix is unitary.
    pub fn change_of_basis(&self) -> Array2<C64> {
        let n = self.elements.len();
        let mut b = Array2::zeros((n, n));
        for (mu, e) in self.elements.iter().enumerate() {
            b.column_mut(mu).assign(e.components());
        }
        b
    }

    /// `Σ_μ |μ)(μ|`.
    pub fn resolution_of_identity(&self) -> SuperOperator {
        let b = self.change_of_basis();
        let dim = 1 << self.n_qubits;
        SuperOperator::from_parts(Representation::Fock { dim }, b.dot(&linalg::dagger(&b.view())))
    }
}

pub fn pauli_basis(n_qubits: usize) -> Result<PauliBasis> {
    if n_qubits == 0 || n_qubits > MAX_PAULI_QUBITS {
        return Err(Error::invalid(format!(
            "Pauli basis supports 1..={MAX_PAULI_QUBITS} qubits, got {n_qubits}"
        )));
    }
    let dim = 1usize << n_qubits;
    let rep = Representation::Fock { dim };
    let norm = C64::from(1.0 / (dim as f64).sqrt());
    let elements = (0..dim * dim)
        .map(|mu| {
            let m = MatrixOperator { rep, entries: pauli_string(n_qubits, mu) * norm };
            vectorize(&m)
        })
        .collect();
    Ok(PauliBasis { n_qubits, elements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use ndarray::array;

    fn op(m: Array2<C64>) -> MatrixOperator {
        MatrixOperator::from_matrix(m).unwrap()
    }

    #[test]
    fn inner_product_trivial_values() {
        let id = op(pauli(0));
        assert_eq!(inner_product(&id, &id).unwrap(), C64::from(2.0));
        assert_eq!(inner_product(&op(pauli(1)), &op(pauli(2))).unwrap(), ZERO);
    }

    #[test]
    fn inner_product_matches_elementwise_sum() {
        let mut rng = random::seeded(3);
        let a = op(random::ginibre(&mut rng, 3));
        let brute: f64 = a.entries().iter().map(|z| z.norm_sqr()).sum();
        let got = inner_product(&a, &a).unwrap();
        assert!((got.re - brute).abs() < 1e-12 && got.im.abs() < 1e-14);
    }

    #[test]
    fn inner_product_rejects_mismatch() {
        let a = op(linalg::identity(2));
        let b = op(linalg::identity(3));
        assert!(matches!(inner_product(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn stacking_is_row_major() {
        let a = op(array![[C64::from(1.0), C64::from(2.0)], [C64::from(3.0), C64::from(4.0)]]);
        let v = vectorize(&a);
        let comps: Vec<f64> = v.components().iter().map(|z| z.re).collect();
        assert_eq!(comps, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(v.at(1, 0), C64::from(3.0));
    }

    #[test]
    fn matrix_unit_is_basis_ket() {
        let rep = Representation::Fock { dim: 3 };
        let v = vectorize(&MatrixOperator::matrix_unit(rep, 2, 1));
        for (k, z) in v.components().iter().enumerate() {
            assert_eq!(*z, if k == 2 * 3 + 1 { ONE } else { ZERO });
        }
    }

    #[test]
    fn ket_inner_product_matches_trace_form() {
        let mut rng = random::seeded(11);
        let a = op(random::ginibre(&mut rng, 4));
        let b = op(random::ginibre(&mut rng, 4));
        let via_kets = vectorize(&a).inner(&vectorize(&b)).unwrap();
        let via_trace = linalg::trace(&a.dagger().entries().dot(&b.entries()).view());
        assert!((via_kets - via_trace).norm() < 1e-12);
    }

    #[test]
    fn devectorize_rejects_non_square_length() {
        assert!(OperatorKet::from_components(Array1::zeros(5)).is_err());
        assert!(OperatorKet::from_components(Array1::zeros(0)).is_err());
    }

    #[test]
    fn right_multiplication_by_identity_is_identity() {
        let (_, r) = multiplication_superoperators(&MatrixOperator::identity(Representation::Fock { dim: 3 }));
        assert_eq!(r, SuperOperator::identity(Representation::Fock { dim: 3 }));
    }

    #[test]
    fn left_multiplication_sigma_x_sigma_z() {
        let (l, _) = multiplication_superoperators(&op(pauli(1)));
        let got = l.apply(&op(pauli(3))).unwrap();
        // σ_x σ_z = -i σ_y
        let expected = pauli(1).dot(&pauli(3));
        assert_eq!(got.entries(), expected.view());
        assert_eq!(expected, pauli(2).mapv(|z| -I * z));
    }

    #[test]
    fn left_multiplication_kernel_formula() {
        let mut rng = random::seeded(5);
        let a = random::ginibre(&mut rng, 3);
        let (l, r) = multiplication_superoperators(&op(a.clone()));
        let d = 3;
        for x in 0..d {
            for xp in 0..d {
                for y in 0..d {
                    for yp in 0..d {
                        let delta = |i: usize, j: usize| if i == j { ONE } else { ZERO };
                        assert_eq!(l.matrix()[[x * d + xp, y * d + yp]], a[[x, y]] * delta(xp, yp));
                        assert_eq!(r.matrix()[[x * d + xp, y * d + yp]], delta(x, y) * a[[yp, xp]]);
                    }
                }
            }
        }
    }

    #[test]
    fn lie_jordan_examples() {
        let sz = op(pauli(3));
        let (minus, _) = lie_jordan_superoperators(&sz, 1.0).unwrap();
        let got = minus.apply(&op(pauli(1))).unwrap();
        let expected = pauli(2) * C64::from(2.0);
        assert!(linalg::max_abs(&(&got.entries() - &expected).view()) < 1e-15);

        let id = MatrixOperator::identity(Representation::Fock { dim: 2 });
        let zero = minus.apply(&id).unwrap();
        assert!(linalg::max_abs(&zero.entries()) == 0.0);

        let (_, plus_id) = lie_jordan_superoperators(&id, 0.3).unwrap();
        let b = op(random::ginibre(&mut random::seeded(1), 2));
        assert_eq!(plus_id.apply(&b).unwrap(), b);
    }

    #[test]
    fn lie_jordan_left_right_identities() {
        let mut rng = random::seeded(9);
        let a = op(random::ginibre(&mut rng, 3));
        let hbar = 0.7;
        let (l, r) = multiplication_superoperators(&a);
        let (minus, plus) = lie_jordan_superoperators(&a, hbar).unwrap();
        // right versions: R⁻_A X = (XA - AX)/(iħ), R⁺_A X = (XA + AX)/2
        let r_minus = (&r - &l).scale(1.0 / (I * hbar));
        let r_plus = (&r + &l).scale(C64::from(0.5));
        assert!(minus.max_abs_diff(&r_minus.scale(-ONE)) < 1e-14);
        assert!(plus.max_abs_diff(&r_plus) < 1e-14);
    }

    #[test]
    fn lie_jordan_rejects_bad_hbar() {
        let a = MatrixOperator::identity(Representation::Fock { dim: 2 });
        assert!(lie_jordan_superoperators(&a, 0.0).is_err());
        assert!(lie_jordan_superoperators(&a, -1.0).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let sx = op(pauli(1));
        let s = SuperOperator::sandwich(&sx, &sx).unwrap();
        assert_eq!(s.adjoint(), s);

        let mut rng = random::seeded(21);
        let d = 3;
        let rep = Representation::Fock { dim: d };
        let s = SuperOperator::new(rep, random::ginibre(&mut rng, d * d)).unwrap();
        assert_eq!(s.adjoint().adjoint(), s);
        let a = op(random::ginibre(&mut rng, d));
        let b = op(random::ginibre(&mut rng, d));
        let lhs = inner_product(&s.adjoint().apply(&a).unwrap(), &b).unwrap();
        let rhs = inner_product(&a, &s.apply(&b).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn adjoint_of_multiplications() {
        let mut rng = random::seeded(2);
        let a = op(random::ginibre(&mut rng, 3));
        let b = op(random::ginibre(&mut rng, 3));
        let (la, _) = multiplication_superoperators(&a);
        let (la_dag, _) = multiplication_superoperators(&a.dagger());
        assert!(la.adjoint().max_abs_diff(&la_dag) < 1e-15);
        let lr = SuperOperator::sandwich(&a, &b).unwrap();
        let lr_dag = SuperOperator::sandwich(&a.dagger(), &b.dagger()).unwrap();
        assert!(lr.adjoint().max_abs_diff(&lr_dag) < 1e-15);
    }

    #[test]
    fn pauli_basis_single_qubit() {
        let basis = pauli_basis(1).unwrap();
        let e0 = devectorize(&basis.elements()[0]).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!((e0.entries()[[0, 0]] - C64::from(s)).norm() < 1e-15);
        assert!((e0.entries()[[1, 1]] - C64::from(s)).norm() < 1e-15);
        assert!((basis.elements()[0].inner(&basis.elements()[0]).unwrap() - ONE).norm() < 1e-15);

        // explicit sum of outer products
        let mut sum = Array2::<C64>::zeros((4, 4));
        for e in basis.elements() {
            for i in 0..4 {
                for j in 0..4 {
                    sum[[i, j]] += e.components()[i] * e.components()[j].conj();
                }
            }
        }
        assert!(linalg::max_abs(&(&sum - &linalg::identity(4)).view()) < 1e-15);
        assert!(basis.resolution_of_identity().max_abs_diff(&SuperOperator::identity(Representation::Fock { dim: 2 })) < 1e-15);
    }

    #[test]
    fn pauli_basis_two_qubits_orthonormal() {
        let basis = pauli_basis(2).unwrap();
        assert_eq!(basis.len(), 16);
        for (m, a) in basis.elements().iter().enumerate() {
            for (n, b) in basis.elements().iter().enumerate() {
                let expected = if m == n { ONE } else { ZERO };
                assert!((a.inner(b).unwrap() - expected).norm() < 1e-15);
            }
        }
        assert_eq!(pauli_label(2, 0b0111), "XZ");
    }

    #[test]
    fn pauli_basis_range() {
        assert!(pauli_basis(0).is_err());
        assert!(pauli_basis(MAX_PAULI_QUBITS + 1).is_err());
    }

    #[test]
    fn operator_constructor_checks_shape() {
        let rep = Representation::Fock { dim: 2 };
        assert!(MatrixOperator::new(rep, Array2::zeros((2, 3))).is_err());
        assert!(MatrixOperator::new(rep, Array2::zeros((3, 3))).is_err());
        assert!(SuperOperator::new(rep, Array2::zeros((3, 3))).is_err());
    }
}
