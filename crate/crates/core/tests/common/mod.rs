//! Fixtures and reference computations shared by the integration tests.
#![allow(dead_code)]

use ndarray::{array, Array1, Array2};
use qpath::lindblad::{self, LindbladGenerator, OscillatorModelParams};
use qpath::linalg::{self, ONE, ZERO};
use qpath::liouville::{pauli, pauli_string, MatrixOperator, Representation, SuperOperator};
use qpath::C64;

pub fn qubit_op(m: Array2<C64>) -> MatrixOperator {
    MatrixOperator::from_matrix(m).unwrap()
}

pub fn sigma_minus() -> Array2<C64> {
    array![[ZERO, ONE], [ZERO, ZERO]]
}

/// `H = σ_z/2`, `V = √γ σ₋`, `ħ = 1`.
pub fn damped_qubit(gamma: f64) -> SuperOperator {
    let h = qubit_op(pauli(3).mapv(|z| z * 0.5));
    let v = qubit_op(sigma_minus().mapv(|z| z * gamma.sqrt()));
    LindbladGenerator::new(h, vec![v], 1.0).unwrap().build()
}

/// Closed-form `exp(tΛ)` of [`damped_qubit`] with `γ = 1`, written out entry
/// by entry in the row-major vectorization `(x, x') -> 2x + x'`.
pub fn damped_qubit_flow(t: f64) -> Array2<C64> {
    let mut m = Array2::<C64>::zeros((4, 4));
    let decay = (-t).exp();
    m[[0, 0]] = ONE;
    m[[0, 3]] = C64::from(1.0 - decay);
    m[[3, 3]] = C64::from(decay);
    // coherences rotate at E0 - E1 = 1 and decay at γ/2
    m[[1, 1]] = C64::from_polar((-0.5 * t).exp(), -t);
    m[[2, 2]] = C64::from_polar((-0.5 * t).exp(), t);
    m
}

/// Parameters used throughout for the dissipative oscillator.
pub fn oscillator_params() -> OscillatorModelParams {
    OscillatorModelParams { m: 1.0, omega: 1.0, mu: 0.0, lambda: 0.1, d_qq: 0.05, d_pp: 0.05, d_pq: 0.0, hbar: 1.0 }
}

/// Single Lindblad operator `V = aP + bQ` reproducing [`oscillator_params`]:
/// `|a|² = |b|² = 0.1` and `a* b = -0.1 i`.
pub fn oscillator_amplitudes() -> ([C64; 2], [C64; 2]) {
    let s = 0.1f64.sqrt();
    ([C64::new(s, 0.0), ZERO], [C64::new(0.0, -s), ZERO])
}

pub fn oscillator_lindblad(dim: usize) -> LindbladGenerator {
    let (a, b) = oscillator_amplitudes();
    let p = oscillator_params();
    lindblad::amplitude_generator(a, b, p.m, p.omega, p.mu, p.hbar, Representation::Fock { dim }).unwrap()
}

/// Truncated, renormalized coherent state `|α⟩⟨α|`.
pub fn coherent(dim: usize, alpha: C64) -> MatrixOperator {
    let mut psi = Array1::<C64>::zeros(dim);
    let mut amp = ONE;
    for n in 0..dim {
        if n > 0 {
            amp = amp * alpha / (n as f64).sqrt();
        }
        psi[n] = amp;
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.mapv_inplace(|z| z / norm);
    let m = Array2::from_shape_fn((dim, dim), |(i, j)| psi[i] * psi[j].conj());
    MatrixOperator::new(Representation::Fock { dim }, m).unwrap()
}

pub fn number_state(dim: usize, n: usize) -> MatrixOperator {
    MatrixOperator::matrix_unit(Representation::Fock { dim }, n, n)
}

/// Superoperator of `ρ ↦ Σ K ρ K†` from explicit Kraus matrices.
pub fn superop_from_kraus(ks: &[Array2<C64>]) -> SuperOperator {
    let d = ks[0].nrows();
    let mut m = Array2::<C64>::zeros((d * d, d * d));
    for k in ks {
        m = m + linalg::kron(&k.view(), &k.mapv(|z| z.conj()).view());
    }
    SuperOperator::new(Representation::Fock { dim: d }, m).unwrap()
}

/// Kraus operators of a random channel: blocks of a random isometry.
pub fn random_kraus(seed: u64, d: usize, r: usize) -> Vec<Array2<C64>> {
    let mut rng = qpath::random::seeded(seed);
    let u = qpath::random::unitary(&mut rng, d * r);
    (0..r).map(|k| u.slice(ndarray::s![k * d..(k + 1) * d, 0..d]).to_owned()).collect()
}

/// `ρ ↦ ρᵀ`.
pub fn transpose_map(d: usize) -> SuperOperator {
    let mut m = Array2::<C64>::zeros((d * d, d * d));
    for i in 0..d {
        for j in 0..d {
            m[[j * d + i, i * d + j]] = ONE;
        }
    }
    SuperOperator::new(Representation::Fock { dim: d }, m).unwrap()
}

/// `E_{μν} = 2⁻ⁿ Tr(σ_μ E(σ_ν))` with dense Pauli strings.
pub fn dense_gate_matrix(s: &SuperOperator, n: usize) -> Array2<f64> {
    let size = 1 << (2 * n);
    let d = (1 << n) as f64;
    Array2::from_shape_fn((size, size), |(mu, nu)| {
        let out = s.apply(&qubit_op(pauli_string(n, nu))).unwrap();
        linalg::trace(&pauli_string(n, mu).dot(&out.entries()).view()).re / d
    })
}

pub fn max_abs_real(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn max_abs_op(a: &MatrixOperator, b: &MatrixOperator) -> f64 {
    linalg::max_abs(&(&a.entries() - &b.entries()).view())
}

pub fn min_eigenvalue(rho: &MatrixOperator) -> f64 {
    linalg::eigvalsh(&rho.entries()).iter().cloned().fold(f64::INFINITY, f64::min)
}
