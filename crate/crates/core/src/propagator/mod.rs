//! Quantum operations, time-sliced propagation, Choi/Kraus extraction and
//! the phase-space kernel machinery.

pub mod gaussian;
pub mod grid;
pub mod io;
pub mod symbol;

use std::borrow::Cow;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{self, ONE};
use crate::liouville::{MatrixOperator, Representation, SuperOperator};

pub use gaussian::{discrete_action, gaussian_short_time_kernel, gaussian_short_time_kernel_with, PhasePaths, SymbolFunction};
pub use grid::{kernel_to_symbol, symbol_to_kernel, KernelGrid, PhaseGrid, SymbolGrid};
pub use symbol::{
    classify_symbol, lindblad_symbol, lindblad_symbol_polynomial, oscillator_symbol, LagrangianCoefficients,
    OperatorPolynomial, QuadraticSymbolForm, ReducibilityVerdict, SymbolPolynomial,
};

/// Description attached to an operation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperationMeta {
    pub generator: String,
    pub slices: Option<usize>,
}

impl OperationMeta {
    pub fn new(generator: impl Into<String>, slices: Option<usize>) -> Self {
        OperationMeta { generator: generator.into(), slices }
    }
}

/// A superoperator together with the time interval it maps across.
#[derive(Clone, Debug)]
pub struct QuantumOperation {
    superop: SuperOperator,
    t0: f64,
    t: f64,
    meta: OperationMeta,
}

impl QuantumOperation {
    pub fn new(superop: SuperOperator, t0: f64, t: f64, meta: OperationMeta) -> Self {
        QuantumOperation { superop, t0, t, meta }
    }

    /// An operation with no duration, e.g. a gate or a measurement.
    pub fn instantaneous(superop: SuperOperator, description: impl Into<String>) -> Self {
        QuantumOperation::new(superop, 0.0, 0.0, OperationMeta::new(description, None))
    }

    pub fn identity(rep: Representation) -> Self {
        QuantumOperation::instantaneous(SuperOperator::identity(rep), "identity")
    }

    pub fn superop(&self) -> &SuperOperator {
        &self.superop
    }

    pub fn into_superop(self) -> SuperOperator {
        self.superop
    }

    pub fn time_span(&self) -> (f64, f64) {
        (self.t0, self.t)
    }

    pub fn meta(&self) -> &OperationMeta {
        &self.meta
    }

    pub fn dim(&self) -> usize {
        self.superop.dim()
    }

    pub fn is_instantaneous(&self) -> bool {
        self.t0 == self.t
    }

    pub fn apply(&self, rho: &MatrixOperator) -> Result<MatrixOperator> {
        self.superop.apply(rho)
    }
}

fn times_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// `E2 ∘ E1`: `E1` acts first. The end of `E1` must be the start of `E2`;
/// instantaneous operations attach to either end without a time check.
pub fn compose(e2: &QuantumOperation, e1: &QuantumOperation) -> Result<QuantumOperation> {
    Error::check_dim(e1.dim(), e2.dim())?;
    let (t0, t) = match (e1.is_instantaneous(), e2.is_instantaneous()) {
        (true, true) => (e1.t0, e1.t),
        (true, false) => (e2.t0, e2.t),
        (false, true) => (e1.t0, e1.t),
        (false, false) => {
            if !times_match(e1.t, e2.t0) {
                return Err(Error::invalid(format!(
                    "cannot compose: first operation ends at {} but second starts at {}",
                    e1.t, e2.t0
                )));
            }
            (e1.t0, e2.t)
        }
    };
    let superop = e2.superop.compose(&e1.superop)?;
    let slices = match (e1.meta.slices, e2.meta.slices) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    };
    let meta = OperationMeta::new(format!("({}) after ({})", e2.meta.generator, e1.meta.generator), slices);
    Ok(QuantumOperation::new(superop, t0, t, meta))
}

/// `I + τΛ`.
pub fn short_time_kernel(l: &SuperOperator, tau: f64) -> Result<SuperOperator> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::invalid(format!("slice length must be a finite non-negative number, got {tau}")));
    }
    let mut m = l.matrix().mapv(|z| z * tau);
    for k in 0..m.nrows() {
        m[[k, k]] += ONE;
    }
    SuperOperator::new(l.representation(), m)
}

/// A generator-valued function of time.
pub trait GeneratorSchedule {
    fn generator_at(&self, t: f64) -> Cow<'_, SuperOperator>;

    /// True when every call returns the same generator.
    fn is_constant(&self) -> bool {
        false
    }

    fn describe(&self) -> String {
        "time-dependent generator".into()
    }
}

impl GeneratorSchedule for SuperOperator {
    fn generator_at(&self, _t: f64) -> Cow<'_, SuperOperator> {
        Cow::Borrowed(self)
    }

    fn is_constant(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        "constant generator".into()
    }
}

impl<F> GeneratorSchedule for F
where
    F: Fn(f64) -> SuperOperator,
{
    fn generator_at(&self, t: f64) -> Cow<'_, SuperOperator> {
        Cow::Owned(self(t))
    }
}

/// Generator that switches at fixed times; piece `k` is active on
/// `[start_k, start_{k+1})`.
#[derive(Clone, Debug)]
pub struct PiecewiseConstant {
    starts: Vec<f64>,
    pieces: Vec<SuperOperator>,
}

impl PiecewiseConstant {
    pub fn new(pieces: Vec<(f64, SuperOperator)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::invalid("piecewise schedule needs at least one piece"));
        }
        let dim = pieces[0].1.dim();
        for w in pieces.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::invalid("piece start times must increase strictly"));
            }
        }
        for (_, s) in &pieces {
            Error::check_dim(dim, s.dim())?;
        }
        let (starts, pieces) = pieces.into_iter().unzip();
        Ok(PiecewiseConstant { starts, pieces })
    }
}

impl GeneratorSchedule for PiecewiseConstant {
    fn generator_at(&self, t: f64) -> Cow<'_, SuperOperator> {
        let k = self.starts.partition_point(|&s| s <= t).saturating_sub(1);
        Cow::Borrowed(&self.pieces[k])
    }

    fn is_constant(&self) -> bool {
        self.pieces.len() == 1
    }

    fn describe(&self) -> String {
        format!("piecewise-constant generator with {} pieces", self.pieces.len())
    }
}

/// Per-slice factor used by [`trotter_propagate_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceMode {
    /// `I + τΛ`.
    #[default]
    Linear,
    /// `exp(τΛ)` per slice.
    Exponential,
}

fn slice_factor(l: &SuperOperator, tau: f64, mode: SliceMode) -> Result<SuperOperator> {
    match mode {
        SliceMode::Linear => short_time_kernel(l, tau),
        SliceMode::Exponential => Ok(crate::oracle::exact_propagator(l, tau)?.into_superop()),
    }
}

fn check_slicing(t0: f64, t: f64, n_slices: usize) -> Result<f64> {
    if n_slices == 0 {
        return Err(Error::invalid("need at least one time slice"));
    }
    if !(t0.is_finite() && t.is_finite()) {
        return Err(Error::invalid("times must be finite"));
    }
    if t < t0 {
        return Err(Error::invalid(format!("final time {t} precedes initial time {t0}")));
    }
    Ok((t - t0) / n_slices as f64)
}

/// `Π_{k=n..1} (I + τΛ_{t_{k-1}})` with `τ = (t - t0)/n`.
pub fn trotter_propagate<S: GeneratorSchedule + ?Sized>(
    schedule: &S,
    t0: f64,
    t: f64,
    n_slices: usize,
) -> Result<QuantumOperation> {
    trotter_propagate_with(schedule, t0, t, n_slices, SliceMode::Linear)
}

pub fn trotter_propagate_with<S: GeneratorSchedule + ?Sized>(
    schedule: &S,
    t0: f64,
    t: f64,
    n_slices: usize,
    mode: SliceMode,
) -> Result<QuantumOperation> {
    let tau = check_slicing(t0, t, n_slices)?;
    let first = schedule.generator_at(t0);
    let rep = first.representation();
    let matrix = if schedule.is_constant() {
        // binary powering of the single slice factor
        let mut base = slice_factor(&first, tau, mode)?.into_matrix();
        let mut acc: Option<Array2<C64>> = None;
        let mut k = n_slices;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.dot(&base),
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.dot(&base);
            }
        }
        acc.expect("n_slices >= 1")
    } else {
        let mut acc = slice_factor(&first, tau, mode)?.into_matrix();
        for k in 1..n_slices {
            let l = schedule.generator_at(t0 + k as f64 * tau);
            Error::check_dim(first.dim(), l.dim())?;
            acc = slice_factor(&l, tau, mode)?.matrix().dot(&acc);
        }
        acc
    };
    let label = match mode {
        SliceMode::Linear => schedule.describe(),
        SliceMode::Exponential => format!("{} (exponential slices)", schedule.describe()),
    };
    Ok(QuantumOperation::new(SuperOperator::new(rep, matrix)?, t0, t, OperationMeta::new(label, Some(n_slices))))
}

/// Density operators at every slice boundary of the time-sliced product,
/// `(t_k, ρ_k)` for `k = 0..=n`.
pub fn trotter_trajectory<S: GeneratorSchedule + ?Sized>(
    schedule: &S,
    rho0: &MatrixOperator,
    t0: f64,
    t: f64,
    n_slices: usize,
    mode: SliceMode,
) -> Result<Vec<(f64, MatrixOperator)>> {
    let tau = check_slicing(t0, t, n_slices)?;
    let mut out = Vec::with_capacity(n_slices + 1);
    out.push((t0, rho0.clone()));
    let mut cached: Option<SuperOperator> = None;
    let mut rho = rho0.clone();
    for k in 0..n_slices {
        let tk = t0 + k as f64 * tau;
        let factor = match (&cached, schedule.is_constant()) {
            (Some(f), true) => f.clone(),
            _ => {
                let f = slice_factor(&schedule.generator_at(tk), tau, mode)?;
                if schedule.is_constant() {
                    cached = Some(f.clone());
                }
                f
            }
        };
        rho = factor.apply(&rho)?;
        out.push((t0 + (k + 1) as f64 * tau, rho.clone()));
    }
    Ok(out)
}

/// `Σ_ij E(|i⟩⟨j|) ⊗ |i⟩⟨j|`, stored with row index `(a, i)` and column
/// index `(b, j)`.
#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    rep: Representation,
    matrix: Array2<C64>,
}

impl ChoiMatrix {
    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn representation(&self) -> Representation {
        self.rep
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.matrix.view())
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> ndarray::Array1<f64> {
        linalg::eigvalsh(&self.matrix.view())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.matrix.view())
    }
}

pub fn choi_matrix(e: &QuantumOperation) -> ChoiMatrix {
    choi_of_superoperator(e.superop())
}

pub fn choi_of_superoperator(s: &SuperOperator) -> ChoiMatrix {
    choi_of_superoperator_with(s, Exec::default())
}

pub fn choi_of_superoperator_with(s: &SuperOperator, exec: Exec) -> ChoiMatrix {
    let d = s.dim();
    let m = s.matrix();
    let mut choi = Array2::<C64>::zeros((d * d, d * d));
    exec.for_each_row(choi.view_mut(), |row, mut out| {
        let (a, i) = (row / d, row % d);
        for b in 0..d {
            for j in 0..d {
                out[b * d + j] = m[[a * d + b, i * d + j]];
            }
        }
    });
    ChoiMatrix { rep: s.representation(), matrix: choi }
}

/// Inverse of the Choi reshuffle.
pub fn superoperator_from_choi(c: &ChoiMatrix) -> SuperOperator {
    let d = c.dim();
    let m = Array2::from_shape_fn((d * d, d * d), |(r, col)| {
        let (a, b) = (r / d, r % d);
        let (i, j) = (col / d, col % d);
        c.matrix[[a * d + i, b * d + j]]
    });
    SuperOperator::new(c.rep, m).expect("shape from Choi")
}

/// Kraus operators and the completeness defect `‖Σ A_k† A_k - I‖`.
#[derive(Clone, Debug)]
pub struct KrausSet {
    pub operators: Vec<MatrixOperator>,
    pub completeness_defect: f64,
}

impl KrausSet {
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `Σ A_k ρ A_k†`.
    pub fn apply(&self, rho: &MatrixOperator) -> Result<MatrixOperator> {
        let mut out = MatrixOperator::zeros(rho.representation());
        for a in &self.operators {
            let term = a.product(rho)?.product(&a.dagger())?;
            out = &out + &term;
        }
        Ok(out)
    }
}

/// Relative rank threshold used when none is given.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Kraus operators `A_k = √λ_k · reshape(u_k)` from the Choi eigenpairs with
/// `λ_k` above `rank_tol` (default `1e-10 · λ_max`).
pub fn kraus_decomposition(c: &ChoiMatrix, rank_tol: Option<f64>) -> Result<KrausSet> {
    let d = c.dim();
    let (values, vectors) = linalg::eigh(&c.matrix.view());
    let lmax = values.iter().copied().fold(0.0, f64::max);
    let tol = rank_tol.unwrap_or(DEFAULT_RANK_TOL * lmax);
    let lmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    if lmin < -tol {
        return Err(Error::NotCompletelyPositive { eigenvalue: lmin });
    }
    let mut ops = Vec::new();
    for (k, &lam) in values.iter().enumerate().rev() {
        if lam <= tol {
            continue;
        }
        let s = lam.sqrt();
        let a = Array2::from_shape_fn((d, d), |(x, i)| vectors[[x * d + i, k]] * s);
        ops.push(MatrixOperator::new(c.rep, a)?);
    }
    let mut sum = Array2::<C64>::zeros((d, d));
    for a in &ops {
        let e = a.entries();
        sum = sum + linalg::dagger(&e).dot(&e);
    }
    let defect = linalg::frobenius_norm(&(sum - linalg::identity(d)).view());
    Ok(KrausSet { operators: ops, completeness_defect: defect })
}

/// Tolerance used to validate density-matrix inputs.
pub const DENSITY_TOL: f64 = 1e-10;

/// Probabilities at or below this make normalization undefined.
pub const ZERO_PROBABILITY_TOL: f64 = 1e-12;

/// Checks Hermiticity, positivity and unit trace within [`DENSITY_TOL`].
pub fn validate_density(rho: &MatrixOperator) -> Result<()> {
    let defect = rho.hermiticity_defect();
    if defect > DENSITY_TOL {
        return Err(Error::invalid(format!("density matrix is not Hermitian (defect {defect:e})")));
    }
    let tr = rho.trace();
    if (tr - ONE).norm() > DENSITY_TOL {
        return Err(Error::invalid(format!("density matrix trace is {tr}, expected 1")));
    }
    let lmin = linalg::eigvalsh(&rho.entries())[0];
    if lmin < -DENSITY_TOL {
        return Err(Error::invalid(format!("density matrix has negative eigenvalue {lmin:e}")));
    }
    Ok(())
}

/// `(I|E|ρ) = Tr E(ρ)`.
pub fn operation_probability(e: &QuantumOperation, rho: &MatrixOperator) -> Result<f64> {
    validate_density(rho)?;
    Ok(e.apply(rho)?.trace().re)
}

/// `E(ρ) / Tr E(ρ)`.
pub fn normalize_operation(e: &QuantumOperation, rho: &MatrixOperator) -> Result<MatrixOperator> {
    let p = operation_probability(e, rho)?;
    if p <= ZERO_PROBABILITY_TOL {
        return Err(Error::ZeroProbability { probability: p });
    }
    Ok(e.apply(rho)?.scale(C64::from(1.0 / p)))
}
