//! Lindblad generators in superoperator form, the quadratic oscillator model
//! written with Lie/Jordan multiplications, and generator diagnostics.

use ndarray::{Array2, Axis};
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, I, ONE, ZERO};
use crate::liouville::{check_hbar, MatrixOperator, Representation, SuperOperator};

/// Relative Hermiticity tolerance for a Hamiltonian input.
pub const HAMILTONIAN_HERMITICITY_TOL: f64 = 1e-12;

/// Default Fock truncation for oscillator models.
pub const DEFAULT_FOCK_DIM: usize = 24;

/// Levels discarded at the top of a Fock truncation when comparing
/// generators that only agree up to truncation artifacts.
pub const FOCK_EDGE_LEVELS: usize = 4;

/// `H` plus Lindblad operators `V_k`.
#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    hamiltonian: MatrixOperator,
    operators: Vec<MatrixOperator>,
    hbar: f64,
}

impl LindbladGenerator {
    pub fn new(hamiltonian: MatrixOperator, operators: Vec<MatrixOperator>, hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        let rep = hamiltonian.representation();
        for v in &operators {
            Error::check_dim(hamiltonian.dim(), v.dim())?;
            if v.representation() != rep {
                return Err(Error::invalid("Lindblad operators must share the Hamiltonian's representation"));
            }
        }
        let scale = linalg::max_abs(&hamiltonian.entries()).max(1.0);
        let defect = hamiltonian.hermiticity_defect();
        if defect > HAMILTONIAN_HERMITICITY_TOL * scale {
            return Err(Error::invalid(format!("Hamiltonian is not Hermitian (defect {defect:e})")));
        }
        Ok(LindbladGenerator { hamiltonian, operators, hbar })
    }

    pub fn hamiltonian(&self) -> &MatrixOperator {
        &self.hamiltonian
    }

    pub fn operators(&self) -> &[MatrixOperator] {
        &self.operators
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn representation(&self) -> Representation {
        self.hamiltonian.representation()
    }

    pub fn build(&self) -> SuperOperator {
        build_generator(self)
    }

    /// `dρ/dt` from the commutator form
    /// `-(i/ħ)[H,ρ] + (1/2ħ) Σ ([V ρ, V†] + [V, ρ V†])`.
    pub fn rhs(&self, rho: &MatrixOperator) -> Result<MatrixOperator> {
        Error::check_dim(self.hamiltonian.dim(), rho.dim())?;
        let h = self.hamiltonian.entries();
        let r = rho.entries();
        let mut out = (h.dot(&r) - r.dot(&h)) * (-I / self.hbar);
        for v in &self.operators {
            let v = v.entries();
            let vd = linalg::dagger(&v);
            let vr = v.dot(&r);
            let rvd = r.dot(&vd);
            let c1 = vr.dot(&vd) - vd.dot(&vr);
            let c2 = v.dot(&rvd) - rvd.dot(&v);
            out = out + (c1 + c2) * C64::from(0.5 / self.hbar);
        }
        MatrixOperator::new(rho.representation(), out)
    }
}

/// `Λ = -(i/ħ)(L_H - R_H) + (1/2ħ) Σ_k (2 L_{V_k} R_{V_k†} - L_{V_k† V_k} - R_{V_k† V_k})`.
pub fn build_generator(g: &LindbladGenerator) -> SuperOperator {
    let d = g.hamiltonian.dim();
    let id = linalg::identity(d);
    let h = g.hamiltonian.entries();
    let mut m = (linalg::kron(&h, &id.view()) - linalg::kron(&id.view(), &h.t())) * (-I / g.hbar);
    let half = C64::from(0.5 / g.hbar);
    for v in &g.operators {
        let v = v.entries();
        let vd = linalg::dagger(&v);
        let vdv = vd.dot(&v);
        // L_V R_{V†} = V ⊗ (V†)ᵀ = V ⊗ conj(V)
        let jump = linalg::kron(&v, &v.mapv(|z| z.conj()).view());
        let left = linalg::kron(&vdv.view(), &id.view());
        let right = linalg::kron(&id.view(), &vdv.t());
        m = m + (jump * C64::from(2.0) - left - right) * half;
    }
    SuperOperator::from_parts(g.representation(), m)
}

/// Coefficients of the quadratic oscillator model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffusionCoefficients {
    pub d_qq: f64,
    pub d_pp: f64,
    pub d_pq: f64,
    pub lambda: f64,
}

/// `d_qq = (ħ/2)Σ|a_k|²`, `d_pp = (ħ/2)Σ|b_k|²`,
/// `d_pq = -(ħ/2) Re Σ a_k* b_k`, `λ = -Im Σ a_k* b_k`.
pub fn oscillator_coefficients(a: [C64; 2], b: [C64; 2], hbar: f64) -> Result<DiffusionCoefficients> {
    check_hbar(hbar)?;
    let sa: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let sb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    let cross: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    Ok(DiffusionCoefficients {
        d_qq: 0.5 * hbar * sa,
        d_pp: 0.5 * hbar * sb,
        d_pq: -0.5 * hbar * cross.re,
        lambda: -cross.im,
    })
}

/// Parameters of the quadratic dissipative oscillator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorModelParams {
    pub m: f64,
    pub omega: f64,
    pub mu: f64,
    pub lambda: f64,
    pub d_qq: f64,
    pub d_pp: f64,
    pub d_pq: f64,
    pub hbar: f64,
}

impl OscillatorModelParams {
    pub fn from_amplitudes(a: [C64; 2], b: [C64; 2], m: f64, omega: f64, mu: f64, hbar: f64) -> Result<Self> {
        let c = oscillator_coefficients(a, b, hbar)?;
        let p = OscillatorModelParams { m, omega, mu, lambda: c.lambda, d_qq: c.d_qq, d_pp: c.d_pp, d_pq: c.d_pq, hbar };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_hbar(self.hbar)?;
        if !(self.m > 0.0) {
            return Err(Error::invalid(format!("mass must be positive, got {}", self.m)));
        }
        if !(self.omega >= 0.0) {
            return Err(Error::invalid(format!("omega must be non-negative, got {}", self.omega)));
        }
        if !(self.d_qq >= 0.0 && self.d_pp >= 0.0) {
            return Err(Error::invalid("d_qq and d_pp must be non-negative"));
        }
        let all = [self.mu, self.lambda, self.d_pq];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("oscillator parameters must be finite"));
        }
        Ok(())
    }

    pub fn diffusion(&self) -> DiffusionCoefficients {
        DiffusionCoefficients { d_qq: self.d_qq, d_pp: self.d_pp, d_pq: self.d_pq, lambda: self.lambda }
    }

    /// `H = P²/2m + mω²Q²/2 + (μ/2)(PQ + QP)`.
    pub fn hamiltonian(&self, pair: &CanonicalPair) -> MatrixOperator {
        let q = pair.q.entries();
        let p = pair.p.entries();
        let h = p.dot(&p) * C64::from(0.5 / self.m)
            + q.dot(&q) * C64::from(0.5 * self.m * self.omega * self.omega)
            + (p.dot(&q) + q.dot(&p)) * C64::from(0.5 * self.mu);
        MatrixOperator::new(pair.q.representation(), h).expect("shape preserved")
    }
}

/// Position and momentum matrices of a representation.
#[derive(Clone, Debug)]
pub struct CanonicalPair {
    pub q: MatrixOperator,
    pub p: MatrixOperator,
}

/// `Q` and `P` in the given representation.
///
/// Fock: `Q = √(ħ/2mω)(a + a†)`, `P = i√(ħmω/2)(a† - a)` with `ω` replaced by
/// 1 when zero. Grid: `Q` diagonal, `P` by spectral differentiation on the
/// periodic grid (discrete Fourier transform, Nyquist mode dropped so `P` is
/// real-antisymmetric times `-iħ`).
pub fn canonical_operators(rep: Representation, mass: f64, omega: f64, hbar: f64) -> Result<CanonicalPair> {
    check_hbar(hbar)?;
    rep.validate()?;
    if !(mass > 0.0) {
        return Err(Error::invalid("mass must be positive"));
    }
    match rep {
        Representation::Fock { dim } => {
            if dim < 2 {
                return Err(Error::invalid("a Fock truncation needs at least two levels to define P"));
            }
            let w = if omega > 0.0 { omega } else { 1.0 };
            let mut a = Array2::<C64>::zeros((dim, dim));
            for n in 1..dim {
                a[[n - 1, n]] = C64::from((n as f64).sqrt());
            }
            let ad = linalg::dagger(&a.view());
            let q = (&a + &ad) * C64::from((hbar / (2.0 * mass * w)).sqrt());
            let p = (&ad - &a) * (I * (hbar * mass * w / 2.0).sqrt());
            Ok(CanonicalPair { q: MatrixOperator::new(rep, q)?, p: MatrixOperator::new(rep, p)? })
        }
        Representation::Grid { points, length } => {
            let dx = length / points as f64;
            let q = Array2::from_diag(&ndarray::Array1::from_shape_fn(points, |j| C64::from(-0.5 * length + j as f64 * dx)));
            let p = spectral_momentum(points, length, hbar);
            Ok(CanonicalPair { q: MatrixOperator::new(rep, q)?, p: MatrixOperator::new(rep, p)? })
        }
    }
}

/// `P = F⁻¹ diag(p_k) F` on a periodic grid, built column by column with FFTs.
fn spectral_momentum(n: usize, length: f64, hbar: f64) -> Array2<C64> {
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let dp = 2.0 * std::f64::consts::PI * hbar / length;
    let freq = |k: usize| -> f64 {
        if 2 * k == n {
            0.0
        } else if 2 * k < n {
            k as f64 * dp
        } else {
            (k as f64 - n as f64) * dp
        }
    };
    let mut p = Array2::<C64>::zeros((n, n));
    for (col, mut column) in p.axis_iter_mut(Axis(1)).enumerate() {
        let mut buf = vec![ZERO; n];
        buf[col] = ONE;
        fwd.process(&mut buf);
        for (k, z) in buf.iter_mut().enumerate() {
            *z *= freq(k) / n as f64;
        }
        inv.process(&mut buf);
        for (row, z) in buf.into_iter().enumerate() {
            column[row] = z;
        }
    }
    p
}

/// `(L_X + sx R_X)(L_Y + sy R_Y) = L_{XY} + sy L_X R_Y + sx L_Y R_X + sx sy R_{YX}`.
fn bilinear(x: &Array2<C64>, sx: C64, y: &Array2<C64>, sy: C64) -> Array2<C64> {
    let d = x.nrows();
    let id = linalg::identity(d);
    let xy = x.dot(y);
    let yx = y.dot(x);
    linalg::kron(&xy.view(), &id.view())
        + linalg::kron(&x.view(), &y.t()) * sy
        + linalg::kron(&y.view(), &x.t()) * sx
        + linalg::kron(&id.view(), &yx.t()) * (sx * sy)
}

#[derive(Clone, Copy)]
enum Mult {
    Lie,
    Jordan,
}

/// `L^{k1}_X L^{k2}_Y` for Lie/Jordan kinds, assembled without superoperator products.
fn lj_product(k1: Mult, x: &Array2<C64>, k2: Mult, y: &Array2<C64>, hbar: f64) -> Array2<C64> {
    let coeffs = |k: Mult| match k {
        Mult::Lie => (-ONE, 1.0 / (I * hbar)),
        Mult::Jordan => (ONE, C64::from(0.5)),
    };
    let (sx, cx) = coeffs(k1);
    let (sy, cy) = coeffs(k2);
    bilinear(x, sx, y, sy) * (cx * cy)
}

/// The oscillator model in Lie/Jordan form:
///
/// `Λ = (1/m) L⁺_P L⁻_P + mω² L⁺_Q L⁻_Q - (λ-μ) L⁻_P L⁺_Q + (λ+μ) L⁻_Q L⁺_P
///      + d_pp L⁻_Q L⁻_Q + d_qq L⁻_P L⁻_P - 2 d_pq L⁻_P L⁻_Q`.
///
/// The first two terms reproduce `-(i/ħ)[P²/2m + mω²Q²/2, ·]` since
/// `L⁺_A L⁻_A = ½ L⁻_{A²}`.
pub fn build_oscillator_generator(params: &OscillatorModelParams, rep: Representation) -> Result<SuperOperator> {
    params.validate()?;
    let pair = canonical_operators(rep, params.m, params.omega, params.hbar)?;
    Ok(oscillator_generator_from_pair(params, &pair))
}

pub fn oscillator_generator_from_pair(params: &OscillatorModelParams, pair: &CanonicalPair) -> SuperOperator {
    use Mult::{Jordan, Lie};
    let q = pair.q.entries().to_owned();
    let p = pair.p.entries().to_owned();
    let hb = params.hbar;
    let c = |x: f64| C64::from(x);
    let m = lj_product(Jordan, &p, Lie, &p, hb) * c(1.0 / params.m)
        + lj_product(Jordan, &q, Lie, &q, hb) * c(params.m * params.omega * params.omega)
        - lj_product(Lie, &p, Jordan, &q, hb) * c(params.lambda - params.mu)
        + lj_product(Lie, &q, Jordan, &p, hb) * c(params.lambda + params.mu)
        + lj_product(Lie, &q, Lie, &q, hb) * c(params.d_pp)
        + lj_product(Lie, &p, Lie, &p, hb) * c(params.d_qq)
        - lj_product(Lie, &p, Lie, &q, hb) * c(2.0 * params.d_pq);
    SuperOperator::from_parts(pair.q.representation(), m)
}

/// Lindblad generator with `V_k = a_k P + b_k Q` and the full Hamiltonian
/// including the `μ` cross term.
pub fn amplitude_generator(
    a: [C64; 2],
    b: [C64; 2],
    m: f64,
    omega: f64,
    mu: f64,
    hbar: f64,
    rep: Representation,
) -> Result<LindbladGenerator> {
    let params = OscillatorModelParams::from_amplitudes(a, b, m, omega, mu, hbar)?;
    let pair = canonical_operators(rep, m, omega, hbar)?;
    let h = params.hamiltonian(&pair);
    let ops = (0..2)
        .filter(|&k| a[k] != ZERO || b[k] != ZERO)
        .map(|k| &pair.p.scale(a[k]) + &pair.q.scale(b[k]))
        .collect();
    LindbladGenerator::new(h, ops, hbar)
}

/// Result of [`verify_generator`].
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorReport {
    pub is_real: bool,
    pub preserves_trace: bool,
    pub cp_flow: bool,
    /// Largest `‖S(A†) - S(A)†‖` over the probes.
    pub reality_defect: f64,
    /// `‖S†(I)‖` (Frobenius).
    pub trace_defect: f64,
    /// Smallest Choi eigenvalue of `exp(τS)` over the sampled `τ`.
    pub min_choi_eigenvalue: f64,
}

/// Times at which the flow `exp(τS)` is tested for complete positivity.
pub const CP_PROBE_TIMES: [f64; 2] = [1e-2, 1e-1];

/// Checks the quantum-operation axioms on a candidate generator.
pub fn verify_generator(s: &SuperOperator, tol: f64) -> Result<GeneratorReport> {
    let d = s.dim();
    let mat = s.matrix();
    // S(E_ij) is column (i, j)
    let image = |i: usize, j: usize| mat.column(i * d + j).to_owned().into_shape_with_order((d, d)).expect("square");
    // Hermiticity preserving iff S(E_ji) = S(E_ij)†
    let mut reality: f64 = 0.0;
    for i in 0..d {
        for j in i..d {
            let diff = image(j, i) - linalg::dagger(&image(i, j).view());
            reality = reality.max(linalg::max_abs(&diff.view()));
        }
    }

    let id = crate::liouville::vectorize(&MatrixOperator::identity(s.representation()));
    let back = s.adjoint().apply_ket(&id)?;
    let trace_defect = back.components().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    let mut min_eig = f64::INFINITY;
    for &tau in &CP_PROBE_TIMES {
        let flow = crate::oracle::exact_propagator(s, tau)?;
        let choi = crate::propagator::choi_matrix(&flow);
        min_eig = min_eig.min(choi.min_eigenvalue());
    }

    Ok(GeneratorReport {
        is_real: reality <= tol,
        preserves_trace: trace_defect <= tol,
        cp_flow: min_eig >= -tol,
        reality_defect: reality,
        trace_defect,
        min_choi_eigenvalue: min_eig,
    })
}

/// Largest absolute entry difference between two superoperators restricted
/// to indices `(x, x', y, y')` all below `keep`.
pub fn interior_max_abs_diff(a: &SuperOperator, b: &SuperOperator, keep: usize) -> f64 {
    let d = a.dim();
    let (ma, mb) = (a.matrix(), b.matrix());
    let mut worst: f64 = 0.0;
    for x in 0..keep {
        for xp in 0..keep {
            for y in 0..keep {
                for yp in 0..keep {
                    let (r, c) = (x * d + xp, y * d + yp);
                    worst = worst.max((ma[[r, c]] - mb[[r, c]]).norm());
                }
            }
        }
    }
    worst
}

/// `‖S†(I)‖_∞` restricted to the components `(x, x')` with both below `keep`.
pub fn interior_trace_defect(s: &SuperOperator, keep: usize) -> f64 {
    let d = s.dim();
    let id = crate::liouville::vectorize(&MatrixOperator::identity(s.representation()));
    let back = s.adjoint().apply_ket(&id).expect("same dim");
    let mut worst: f64 = 0.0;
    for x in 0..keep {
        for xp in 0..keep {
            worst = worst.max(back.components()[x * d + xp].norm());
        }
    }
    worst
}
