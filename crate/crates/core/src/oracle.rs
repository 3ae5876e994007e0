//! Reference propagators: dense matrix exponential, classical RK4 on the
//! master equation, and the closed moment equations of the quadratic
//! oscillator model.

use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{CanonicalPair, OscillatorModelParams};
use crate::linalg::{self, ONE};
use crate::liouville::{devectorize, vectorize, MatrixOperator, SuperOperator};
use crate::propagator::{GeneratorSchedule, OperationMeta, QuantumOperation};

// Backward-error thresholds for the diagonal Padé approximants of degree
// 3, 5, 7, 9 and 13 (double precision).
#[allow(clippy::excessive_precision)]
const THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
];

fn pade_coefficients(m: usize) -> &'static [f64] {
    match m {
        3 => &[120.0, 60.0, 12.0, 1.0],
        5 => &[30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => &[17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0],
        9 => &[
            17643225600.0,
            8821612800.0,
            2075673600.0,
            302702400.0,
            30270240.0,
            2162160.0,
            110880.0,
            3960.0,
            90.0,
            1.0,
        ],
        _ => &[
            64764752532480000.0,
            32382376266240000.0,
            7771770303897600.0,
            1187353796428800.0,
            129060195264000.0,
            10559470521600.0,
            670442572800.0,
            33522128640.0,
            1323241920.0,
            40840800.0,
            960960.0,
            16380.0,
            182.0,
            1.0,
        ],
    }
}

/// Largest number of squarings accepted before the input is declared too
/// large to exponentiate.
const MAX_SQUARINGS: i32 = 1000;

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant, the degree picked from the 1-norm.
pub fn expm(a: &ArrayView2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::invalid("expm: matrix is not square"));
    }
    let norm = linalg::one_norm(a);
    if !norm.is_finite() || a.iter().any(|z| !z.is_finite()) {
        return Err(Error::invalid("expm: non-finite entries"));
    }
    let id = linalg::identity(n);
    for &(m, theta) in &THETA[..4] {
        if norm <= theta {
            let b = pade_coefficients(m);
            let a2 = a.dot(a);
            let mut powers = vec![id.clone(), a2.clone()];
            while powers.len() <= m / 2 {
                let next = powers.last().unwrap().dot(&a2);
                powers.push(next);
            }
            let mut u = Array2::<C64>::zeros((n, n));
            let mut v = Array2::<C64>::zeros((n, n));
            for (k, pk) in powers.iter().enumerate() {
                v.scaled_add(C64::from(b[2 * k]), pk);
                u.scaled_add(C64::from(b[2 * k + 1]), pk);
            }
            let u = a.dot(&u);
            return linalg::solve(&(&v - &u).view(), &(&v + &u).view());
        }
    }
    let theta13 = THETA[4].1;
    let s = (norm / theta13).log2().ceil().max(0.0) as i32;
    if s > MAX_SQUARINGS {
        return Err(Error::invalid(format!("expm: norm {norm:e} too large")));
    }
    let a = a.mapv(|z| z * 2f64.powi(-s));
    let b = pade_coefficients(13);
    let c = |k: usize| C64::from(b[k]);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let inner_u = &a6 * c(13) + &a4 * c(11) + &a2 * c(9);
    let u = a.dot(&(a6.dot(&inner_u) + &a6 * c(7) + &a4 * c(5) + &a2 * c(3) + &id * c(1)));
    let inner_v = &a6 * c(12) + &a4 * c(10) + &a2 * c(8);
    let v = a6.dot(&inner_v) + &a6 * c(6) + &a4 * c(4) + &a2 * c(2) + &id * c(0);
    let mut r = linalg::solve(&(&v - &u).view(), &(&v + &u).view())?;
    for _ in 0..s {
        r = r.dot(&r);
    }
    if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("expm: overflow during squaring"));
    }
    Ok(r)
}

/// `exp(t L)` as an operation over `(0, t)`.
pub fn exact_propagator(l: &SuperOperator, t: f64) -> Result<QuantumOperation> {
    exact_propagator_between(l, 0.0, t)
}

/// `exp((t - t0) L)` as an operation over `(t0, t)`.
pub fn exact_propagator_between(l: &SuperOperator, t0: f64, t: f64) -> Result<QuantumOperation> {
    if !(t.is_finite() && t0.is_finite()) {
        return Err(Error::invalid("times must be finite"));
    }
    let m = expm(&l.matrix().mapv(|z| z * (t - t0)).view())?;
    let superop = SuperOperator::new(l.representation(), m)?;
    Ok(QuantumOperation::new(superop, t0, t, OperationMeta::new("exact exponential", None)))
}

fn rk4_step<S: GeneratorSchedule + ?Sized>(schedule: &S, t: f64, h: f64, v: &Array1<C64>) -> Array1<C64> {
    let f = |s: f64, x: &Array1<C64>| schedule.generator_at(s).matrix().dot(x);
    let half = C64::from(0.5 * h);
    let k1 = f(t, v);
    let k2 = f(t + 0.5 * h, &(v + &(&k1 * half)));
    let k3 = f(t + 0.5 * h, &(v + &(&k2 * half)));
    let k4 = f(t + h, &(v + &(&k3 * C64::from(h))));
    let sixth = C64::from(h / 6.0);
    v + &((k1 + &k2 * C64::from(2.0) + &k3 * C64::from(2.0) + k4) * sixth)
}

/// Classical fourth-order Runge-Kutta for `d|ρ)/dt = Λ_t |ρ)` from 0 to `t`.
pub fn rk4_propagate<S: GeneratorSchedule + ?Sized>(
    schedule: &S,
    rho0: &MatrixOperator,
    t: f64,
    steps: usize,
) -> Result<MatrixOperator> {
    let traj = rk4_trajectory(schedule, rho0, 0.0, t, steps)?;
    Ok(traj.into_iter().last().expect("at least the initial state").1)
}

/// All RK4 states `(t_k, ρ_k)` for `k = 0..=steps` over `[t0, t]`.
pub fn rk4_trajectory<S: GeneratorSchedule + ?Sized>(
    schedule: &S,
    rho0: &MatrixOperator,
    t0: f64,
    t: f64,
    steps: usize,
) -> Result<Vec<(f64, MatrixOperator)>> {
    if steps == 0 {
        return Err(Error::invalid("rk4 needs at least one step"));
    }
    Error::check_dim(schedule.generator_at(t0).dim(), rho0.dim())?;
    let h = (t - t0) / steps as f64;
    let rep = rho0.representation();
    let mut v = vectorize(rho0).components().clone();
    let mut out = Vec::with_capacity(steps + 1);
    out.push((t0, rho0.clone()));
    for k in 0..steps {
        let tk = t0 + k as f64 * h;
        v = rk4_step(schedule, tk, h, &v);
        let ket = crate::liouville::OperatorKet::from_components(v.clone())?.with_representation(rep)?;
        out.push((t0 + (k + 1) as f64 * h, devectorize(&ket)?));
    }
    Ok(out)
}

/// First and second moments of position and momentum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentState {
    pub mean_q: f64,
    pub mean_p: f64,
    pub var_qq: f64,
    pub var_pp: f64,
    /// Symmetrized covariance `⟨(QP + PQ)/2⟩ - ⟨Q⟩⟨P⟩`.
    pub cov_qp: f64,
}

impl MomentState {
    pub fn new(mean_q: f64, mean_p: f64, var_qq: f64, var_pp: f64, cov_qp: f64) -> Result<Self> {
        let s = MomentState { mean_q, mean_p, var_qq, var_pp, cov_qp };
        if !s.is_physical() {
            return Err(Error::invalid("moment state violates var_qq, var_pp >= 0 or the covariance bound"));
        }
        Ok(s)
    }

    pub fn is_physical(&self) -> bool {
        self.var_qq >= 0.0 && self.var_pp >= 0.0 && self.var_qq * self.var_pp - self.cov_qp * self.cov_qp >= -1e-10
    }

    /// Moments of a density matrix with respect to the given `Q`, `P`.
    pub fn from_density(rho: &MatrixOperator, pair: &CanonicalPair) -> Result<Self> {
        let r = rho.entries();
        let q = pair.q.entries();
        let p = pair.p.entries();
        let ev = |a: &Array2<C64>| linalg::trace(&a.dot(&r).view()).re;
        let mq = ev(&q.to_owned());
        let mp = ev(&p.to_owned());
        let qq = ev(&q.dot(&q));
        let pp = ev(&p.dot(&p));
        let sym = ev(&((q.dot(&p) + p.dot(&q)) * C64::from(0.5)));
        Ok(MomentState { mean_q: mq, mean_p: mp, var_qq: qq - mq * mq, var_pp: pp - mp * mp, cov_qp: sym - mq * mp })
    }

    /// `⟨P²⟩/2m + mω²⟨Q²⟩/2`.
    pub fn energy(&self, m: f64, omega: f64) -> f64 {
        (self.var_pp + self.mean_p * self.mean_p) / (2.0 * m)
            + 0.5 * m * omega * omega * (self.var_qq + self.mean_q * self.mean_q)
    }

    fn to_array(self) -> [f64; 5] {
        [self.mean_q, self.mean_p, self.var_qq, self.var_pp, self.cov_qp]
    }

    fn from_array(a: [f64; 5]) -> Self {
        MomentState { mean_q: a[0], mean_p: a[1], var_qq: a[2], var_pp: a[3], cov_qp: a[4] }
    }
}

/// Right-hand side of the closed moment system of the oscillator model.
///
/// ```text
/// d⟨q⟩/dt = ⟨p⟩/m - (λ-μ)⟨q⟩
/// d⟨p⟩/dt = -mω²⟨q⟩ - (λ+μ)⟨p⟩
/// dσ_qq/dt = -2(λ-μ)σ_qq + (2/m)σ_qp + 2d_qq
/// dσ_pp/dt = -2(λ+μ)σ_pp - 2mω²σ_qp + 2d_pp
/// dσ_qp/dt = -mω²σ_qq + σ_pp/m - 2λσ_qp + 2d_pq
/// ```
pub fn moment_rates(p: &OscillatorModelParams, s: &MomentState) -> MomentState {
    let w2 = p.m * p.omega * p.omega;
    MomentState {
        mean_q: s.mean_p / p.m - (p.lambda - p.mu) * s.mean_q,
        mean_p: -w2 * s.mean_q - (p.lambda + p.mu) * s.mean_p,
        var_qq: -2.0 * (p.lambda - p.mu) * s.var_qq + 2.0 * s.cov_qp / p.m + 2.0 * p.d_qq,
        var_pp: -2.0 * (p.lambda + p.mu) * s.var_pp - 2.0 * w2 * s.cov_qp + 2.0 * p.d_pp,
        cov_qp: -w2 * s.var_qq + s.var_pp / p.m - 2.0 * p.lambda * s.cov_qp + 2.0 * p.d_pq,
    }
}

/// Integrates the moment system with RK4 over `[0, t]`.
pub fn evolve_moments(p: &OscillatorModelParams, m0: &MomentState, t: f64, steps: usize) -> Result<MomentState> {
    Ok(moment_trajectory(p, m0, t, steps)?.pop().expect("non-empty").1)
}

/// Moment states at every RK4 step, including `t = 0`.
pub fn moment_trajectory(
    p: &OscillatorModelParams,
    m0: &MomentState,
    t: f64,
    steps: usize,
) -> Result<Vec<(f64, MomentState)>> {
    p.validate()?;
    if steps == 0 {
        return Err(Error::invalid("moment evolution needs at least one step"));
    }
    let h = t / steps as f64;
    let f = |x: [f64; 5]| moment_rates(p, &MomentState::from_array(x)).to_array();
    let axpy = |x: [f64; 5], a: f64, y: [f64; 5]| std::array::from_fn::<f64, 5, _>(|i| x[i] + a * y[i]);
    let mut x = m0.to_array();
    let mut out = Vec::with_capacity(steps + 1);
    out.push((0.0, *m0));
    for k in 0..steps {
        let k1 = f(x);
        let k2 = f(axpy(x, 0.5 * h, k1));
        let k3 = f(axpy(x, 0.5 * h, k2));
        let k4 = f(axpy(x, h, k3));
        x = std::array::from_fn(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        out.push(((k + 1) as f64 * h, MomentState::from_array(x)));
    }
    Ok(out)
}

/// `‖exp(A) exp(-A) - I‖` as a cheap self-check of [`expm`].
pub fn expm_inverse_defect(a: &ArrayView2<C64>) -> Result<f64> {
    let e = expm(a)?;
    let f = expm(&a.mapv(|z| -z).view())?;
    let n = a.nrows();
    let prod = e.dot(&f) - &linalg::identity(n).mapv(|z| z * ONE);
    Ok(linalg::max_abs(&prod.view()))
}
