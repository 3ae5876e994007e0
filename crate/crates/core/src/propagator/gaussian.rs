//! Short-time kernels of quadratic symbols by closed-form momentum
//! integration, and the discretized phase-space action.
//!
//! For a symbol of momentum degree ≤ 2 the slice kernel is
//!
//! ```text
//! K(q,q',y,y') = (2πħ)⁻² ∫dp dp' exp{(i/ħ)[(q-y)p - (q'-y')p'] + τΛ_S(q,q',p,p')}
//! ```
//!
//! Writing the exponent as `-½ πᵀAπ + Jᵀπ + c` with `π = (p, p')`, the two
//! integrals are done one after the other with principal square roots, which
//! is valid while `Re A` is positive semidefinite. A direction with no
//! quadratic term gives a discrete delta over the momentum grid.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{I, ZERO};

use super::grid::{KernelGrid, PhaseGrid, SymbolGrid};
use super::symbol::{SymbolPolynomial, CLASSIFY_TOL};

/// Per `(q, q')` description of the momentum integral.
#[derive(Clone, Copy, Debug)]
enum Plan {
    /// Both directions Gaussian; `swap` integrates `p'` first.
    Gauss { swap: bool, a11: C64, a12: C64, s: C64, pref: C64 },
    /// `p` Gaussian, `p'` delta (or the mirror image when `swap`).
    GaussDelta { swap: bool, a: C64, shift: f64, pref: C64 },
    DeltaDelta { shift_p: f64, shift_pp: f64 },
}

struct Coefficients {
    p2: SymbolPolynomial,
    pp2: SymbolPolynomial,
    cross: SymbolPolynomial,
    p1: SymbolPolynomial,
    pp1: SymbolPolynomial,
    c0: SymbolPolynomial,
}

fn is_zero(z: C64, tol: f64) -> bool {
    z.norm() <= tol
}

/// `(Δp/2πħ) Σ_k exp(i p_k s/ħ)`: the grid delta, `1/Δx` at `s = 0`.
fn grid_delta(grid: &PhaseGrid, s: f64) -> C64 {
    let n = grid.points;
    let theta = grid.dp() * s / grid.hbar;
    let w = grid.dp() / (2.0 * std::f64::consts::PI * grid.hbar);
    let denom = C64::new(1.0, 0.0) - C64::from_polar(1.0, theta);
    let sum = if denom.norm() < 1e-9 {
        (0..n).map(|k| C64::from_polar(1.0, (k as f64 - 0.5 * n as f64) * theta)).sum()
    } else {
        C64::from_polar(1.0, -0.5 * n as f64 * theta) * (C64::new(1.0, 0.0) - C64::from_polar(1.0, n as f64 * theta)) / denom
    };
    sum * w
}

fn plan_for(co: &Coefficients, tau: f64, hbar: f64, q: f64, qp: f64) -> Result<(Plan, C64, C64, C64)> {
    let ev = |s: &SymbolPolynomial| s.evaluate(q, qp, 0.0, 0.0) * tau;
    let a11 = -2.0 * ev(&co.p2);
    let a22 = -2.0 * ev(&co.pp2);
    let a12 = -ev(&co.cross);
    let j1 = ev(&co.p1);
    let j2 = ev(&co.pp1);
    let c = ev(&co.c0);

    let scale = a11.norm().max(a22.norm()).max(a12.norm());
    let tol = CLASSIFY_TOL * scale.max(f64::MIN_POSITIVE);
    // Re A must be positive semidefinite for the integral to exist
    let (r11, r22, r12) = (a11.re, a22.re, a12.re);
    let tr = r11 + r22;
    let disc = ((r11 - r22).powi(2) + 4.0 * r12 * r12).sqrt();
    let min_eig = 0.5 * (tr - disc);
    if min_eig < -tol {
        return Err(Error::invalid(format!(
            "divergent momentum integral at q={q}, q'={qp}: the real part of the quadratic form has eigenvalue {min_eig:e} of the wrong sign"
        )));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let norm = 1.0 / (two_pi * hbar);
    let linear_shift = |j: C64, dir: &str| -> Result<f64> {
        if j.re.abs() > CLASSIFY_TOL * j.norm().max(1.0) {
            return Err(Error::invalid(format!(
                "divergent momentum integral at q={q}, q'={qp}: growing linear term in the {dir} direction"
            )));
        }
        Ok(hbar * j.im)
    };

    let plan = if scale == 0.0 {
        Plan::DeltaDelta { shift_p: linear_shift(j1, "p")?, shift_pp: linear_shift(j2, "p'")? }
    } else if is_zero(a12, tol) && (is_zero(a11, tol) || is_zero(a22, tol)) {
        let swap = is_zero(a11, tol);
        let (a, jd) = if swap { (a22, j1) } else { (a11, j2) };
        let pref = norm * (two_pi / a).sqrt();
        Plan::GaussDelta { swap, a, shift: linear_shift(jd, if swap { "p" } else { "p'" })?, pref }
    } else {
        let swap = is_zero(a11, tol);
        let (x11, x22) = if swap { (a22, a11) } else { (a11, a22) };
        if is_zero(x11, tol) {
            return Err(Error::UnsupportedForm(format!(
                "momentum quadratic form at q={q}, q'={qp} has only a p*p' term"
            )));
        }
        let s = x22 - a12 * a12 / x11;
        if is_zero(s, tol) {
            return Err(Error::UnsupportedForm(format!(
                "singular momentum quadratic form at q={q}, q'={qp}"
            )));
        }
        let pref = norm * norm * (two_pi / x11).sqrt() * (two_pi / s).sqrt();
        Plan::Gauss { swap, a11: x11, a12, s, pref }
    };
    Ok((plan, j1, j2, c))
}

/// Closed-form short-time kernel of a symbol with momentum degree ≤ 2.
pub fn gaussian_short_time_kernel(sym: &SymbolPolynomial, tau: f64, grid: PhaseGrid) -> Result<KernelGrid> {
    gaussian_short_time_kernel_with(sym, tau, grid, Exec::default())
}

pub fn gaussian_short_time_kernel_with(
    sym: &SymbolPolynomial,
    tau: f64,
    grid: PhaseGrid,
    exec: Exec,
) -> Result<KernelGrid> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::invalid(format!("slice length must be positive, got {tau}")));
    }
    let sym = sym.pruned(CLASSIFY_TOL * sym.max_abs_coefficient());
    if sym.momentum_degree() > 2 {
        return Err(Error::UnsupportedForm(format!(
            "symbol has momentum degree {}; the closed form needs degree <= 2",
            sym.momentum_degree()
        )));
    }
    let co = Coefficients {
        p2: sym.momentum_coefficient(2, 0),
        pp2: sym.momentum_coefficient(0, 2),
        cross: sym.momentum_coefficient(1, 1),
        p1: sym.momentum_coefficient(1, 0),
        pp1: sym.momentum_coefficient(0, 1),
        c0: sym.momentum_coefficient(0, 0),
    };
    let n = grid.points;
    let hbar = grid.hbar;
    let xs = grid.positions();
    let mut plans = Vec::with_capacity(n * n);
    for &q in &xs {
        for &qp in &xs {
            plans.push(plan_for(&co, tau, hbar, q, qp)?);
        }
    }

    let mut values = ndarray::Array4::<C64>::zeros((n, n, n, n));
    exec.for_each_slab(values.view_mut(), |iq, mut slab| {
        for ((iqp, iy, iyp), v) in slab.indexed_iter_mut() {
            let (plan, j1, j2, c) = plans[iq * n + iqp];
            let (dq, dqp) = (xs[iq] - xs[iy], xs[iqp] - xs[iyp]);
            *v = match plan {
                Plan::DeltaDelta { shift_p, shift_pp } => {
                    grid_delta(&grid, dq + shift_p) * grid_delta(&grid, -(dqp - shift_pp)) * c.exp()
                }
                Plan::GaussDelta { swap, a, shift, pref } => {
                    // Gaussian direction carries the total linear coefficient
                    let (jg, delta) = if swap {
                        (j2 - I * dqp / hbar, grid_delta(&grid, dq + shift))
                    } else {
                        (j1 + I * dq / hbar, grid_delta(&grid, -(dqp - shift)))
                    };
                    pref * delta * (jg * jg / (2.0 * a) + c).exp()
                }
                Plan::Gauss { swap, a11, a12, s, pref } => {
                    let t1 = j1 + I * dq / hbar;
                    let t2 = j2 - I * dqp / hbar;
                    let (x1, x2) = if swap { (t2, t1) } else { (t1, t2) };
                    let reduced = x2 - a12 * x1 / a11;
                    pref * (x1 * x1 / (2.0 * a11) + reduced * reduced / (2.0 * s) + c).exp()
                }
            };
        }
    });
    KernelGrid::new(grid, values)
}

/// Anything that can be evaluated as `Λ_S(q, q', p, p')`.
pub trait SymbolFunction {
    fn symbol_at(&self, q: f64, qp: f64, p: f64, pp: f64) -> C64;
}

impl SymbolFunction for SymbolPolynomial {
    fn symbol_at(&self, q: f64, qp: f64, p: f64, pp: f64) -> C64 {
        self.evaluate(q, qp, p, pp)
    }
}

/// Nearest-node lookup; arguments off the grid are clamped to its edge.
impl SymbolFunction for SymbolGrid {
    fn symbol_at(&self, q: f64, qp: f64, p: f64, pp: f64) -> C64 {
        let g = self.grid();
        let n = g.points as f64;
        let ix = |x: f64| (((x + 0.5 * g.length) / g.dx()).round().clamp(0.0, n - 1.0)) as usize;
        let ik = |k: f64| ((k / g.dp() + 0.5 * n).round().clamp(0.0, n - 1.0)) as usize;
        self.values()[[ix(q), ix(qp), ik(p), ik(pp)]]
    }
}

impl<F> SymbolFunction for F
where
    F: Fn(f64, f64, f64, f64) -> C64,
{
    fn symbol_at(&self, q: f64, qp: f64, p: f64, pp: f64) -> C64 {
        self(q, qp, p, pp)
    }
}

/// Discrete double phase-space paths at nodes `k = 0..=n+1`. `p[0]` and
/// `p_prime[0]` are not used by [`discrete_action`].
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePaths {
    pub q: Vec<f64>,
    pub q_prime: Vec<f64>,
    pub p: Vec<f64>,
    pub p_prime: Vec<f64>,
}

impl PhasePaths {
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }
}

/// `Σ_{k=1}^{n+1} { (i/ħ)[(q_k - q_{k-1}) p_k - (q'_k - q'_{k-1}) p'_k] + τ Λ_S(q_k, q'_k, p_k, p'_k) }`.
pub fn discrete_action<S: SymbolFunction + ?Sized>(paths: &PhasePaths, sym: &S, tau: f64, hbar: f64) -> Result<C64> {
    crate::liouville::check_hbar(hbar)?;
    let n = paths.q.len();
    if paths.q_prime.len() != n || paths.p.len() != n || paths.p_prime.len() != n {
        return Err(Error::invalid(format!(
            "path arrays differ in length: q {}, q' {}, p {}, p' {}",
            n,
            paths.q_prime.len(),
            paths.p.len(),
            paths.p_prime.len()
        )));
    }
    if n < 2 {
        return Err(Error::invalid("paths need at least two nodes"));
    }
    let mut total = ZERO;
    for k in 1..n {
        let kinetic = (paths.q[k] - paths.q[k - 1]) * paths.p[k] - (paths.q_prime[k] - paths.q_prime[k - 1]) * paths.p_prime[k];
        total += I * kinetic / hbar + sym.symbol_at(paths.q[k], paths.q_prime[k], paths.p[k], paths.p_prime[k]) * tau;
    }
    Ok(total)
}
