//! Polynomial symbols on double phase space.
//!
//! Operators are given by their Weyl symbols (polynomials in `q, p`). The
//! symbol of a superoperator `L_A R_B` is `A_qp(q, p) · B_pq(q', p')`, where
//! `A_qp` is the standard (`Q` left of `P`) symbol and `B_pq` the anti-standard
//! one. For polynomials of degree ≤ 2 the only ordering correction is
//! `Weyl(qp) = QP - iħ/2 = PQ + iħ/2`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lindblad::{CanonicalPair, OscillatorModelParams};
use crate::linalg::{I, ONE, ZERO};
use crate::liouville::{check_hbar, MatrixOperator};

use super::grid::{PhaseGrid, SymbolGrid};

/// Weyl symbol `Σ c_ij q^i p^j` of an operator.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OperatorPolynomial {
    terms: BTreeMap<(u32, u32), C64>,
}

impl OperatorPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        Self::from_terms([((0, 0), c)])
    }

    pub fn q() -> Self {
        Self::from_terms([((1, 0), ONE)])
    }

    pub fn p() -> Self {
        Self::from_terms([((0, 1), ONE)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), C64)>) -> Self {
        let mut out = Self::default();
        for (k, c) in terms {
            *out.terms.entry(k).or_insert(ZERO) += c;
        }
        out.terms.retain(|_, c| *c != ZERO);
        out
    }

    /// `a P + b Q`.
    pub fn linear(a: C64, b: C64) -> Self {
        Self::from_terms([((0, 1), a), ((1, 0), b)])
    }

    /// `P²/2m + mω²Q²/2 + (μ/2)(PQ + QP)` (Weyl symbol `μ qp`).
    pub fn oscillator_hamiltonian(m: f64, omega: f64, mu: f64) -> Self {
        Self::from_terms([
            ((0, 2), C64::from(0.5 / m)),
            ((2, 0), C64::from(0.5 * m * omega * omega)),
            ((1, 1), C64::from(mu)),
        ])
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), C64)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, *c))
    }

    pub fn coefficient(&self, i: u32, j: u32) -> C64 {
        self.terms.get(&(i, j)).copied().unwrap_or(ZERO)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_terms(self.terms().map(|(k, c)| (k, c * s)))
    }

    /// Weyl symbol of `A†`: the complex conjugate.
    pub fn dagger(&self) -> Self {
        Self::from_terms(self.terms().map(|(k, c)| (k, c.conj())))
    }

    pub fn evaluate(&self, q: f64, p: f64) -> C64 {
        self.terms().map(|((i, j), c)| c * q.powi(i as i32) * p.powi(j as i32)).sum()
    }

    fn require_degree(&self, max: u32, what: &str) -> Result<()> {
        if self.degree() > max {
            return Err(Error::UnsupportedForm(format!(
                "{what} has degree {}; only degree <= {max} is supported",
                self.degree()
            )));
        }
        Ok(())
    }

    /// Standard-ordered (`Q` left) symbol.
    pub fn qp_symbol(&self, hbar: f64) -> Result<Self> {
        self.require_degree(2, "operator")?;
        let c = self.coefficient(1, 1);
        Ok(self + &Self::constant(-c * I * (0.5 * hbar)))
    }

    /// Anti-standard (`P` left) symbol.
    pub fn pq_symbol(&self, hbar: f64) -> Result<Self> {
        self.require_degree(2, "operator")?;
        let c = self.coefficient(1, 1);
        Ok(self + &Self::constant(c * I * (0.5 * hbar)))
    }

    /// Weyl symbol of the operator product, exact for two polynomials of
    /// degree ≤ 1: `f ⋆ g = fg + (iħ/2){f, g}`.
    pub fn star_linear(&self, other: &Self, hbar: f64) -> Result<Self> {
        self.require_degree(1, "factor")?;
        other.require_degree(1, "factor")?;
        let mut out = BTreeMap::new();
        for ((i1, j1), c1) in self.terms() {
            for ((i2, j2), c2) in other.terms() {
                *out.entry((i1 + i2, j1 + j2)).or_insert(ZERO) += c1 * c2;
            }
        }
        let poisson = self.coefficient(1, 0) * other.coefficient(0, 1) - self.coefficient(0, 1) * other.coefficient(1, 0);
        *out.entry((0, 0)).or_insert(ZERO) += I * (0.5 * hbar) * poisson;
        Ok(Self::from_terms(out))
    }

    /// Weyl quantization with the given `Q`, `P` matrices (degree ≤ 2).
    pub fn to_operator(&self, pair: &CanonicalPair) -> Result<MatrixOperator> {
        self.require_degree(2, "operator")?;
        let q = pair.q.entries();
        let p = pair.p.entries();
        let rep = pair.q.representation();
        let mut out = ndarray::Array2::<C64>::zeros(q.raw_dim());
        for ((i, j), c) in self.terms() {
            let m = match (i, j) {
                (0, 0) => crate::linalg::identity(q.nrows()),
                (1, 0) => q.to_owned(),
                (0, 1) => p.to_owned(),
                (2, 0) => q.dot(&q),
                (0, 2) => p.dot(&p),
                _ => (q.dot(&p) + p.dot(&q)) * C64::from(0.5),
            };
            out = out + m * c;
        }
        MatrixOperator::new(rep, out)
    }
}

impl Add for &OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn add(self, rhs: &OperatorPolynomial) -> OperatorPolynomial {
        OperatorPolynomial::from_terms(self.terms().chain(rhs.terms()))
    }
}

/// Variable slots of a [`SymbolPolynomial`] exponent.
pub const Q: usize = 0;
pub const QP: usize = 1;
pub const P: usize = 2;
pub const PP: usize = 3;

const VAR_NAMES: [&str; 4] = ["q", "q'", "p", "p'"];

/// Sparse polynomial in `(q, q', p, p')` with complex coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymbolPolynomial {
    terms: BTreeMap<[u32; 4], C64>,
}

impl SymbolPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        Self::from_terms([([0; 4], c)])
    }

    /// The single variable in slot `k` (see [`Q`], [`QP`], [`P`], [`PP`]).
    pub fn var(k: usize) -> Self {
        let mut e = [0; 4];
        e[k] = 1;
        Self::from_terms([(e, ONE)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ([u32; 4], C64)>) -> Self {
        let mut out = Self::default();
        for (k, c) in terms {
            *out.terms.entry(k).or_insert(ZERO) += c;
        }
        out.terms.retain(|_, c| *c != ZERO);
        out
    }

    /// Embeds a `(q, p)` polynomial on the unprimed pair.
    pub fn unprimed(a: &OperatorPolynomial) -> Self {
        Self::from_terms(a.terms().map(|((i, j), c)| ([i, 0, j, 0], c)))
    }

    /// Embeds a `(q, p)` polynomial on the primed pair.
    pub fn primed(a: &OperatorPolynomial) -> Self {
        Self::from_terms(a.terms().map(|((i, j), c)| ([0, i, 0, j], c)))
    }

    pub fn terms(&self) -> impl Iterator<Item = ([u32; 4], C64)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, *c))
    }

    pub fn coefficient(&self, exps: [u32; 4]) -> C64 {
        self.terms.get(&exps).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_terms(self.terms().map(|(k, c)| (k, c * s)))
    }

    /// Highest total power of `p` and `p'`.
    pub fn momentum_degree(&self) -> u32 {
        self.terms.keys().map(|e| e[P] + e[PP]).max().unwrap_or(0)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Drops coefficients with modulus at or below `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        Self::from_terms(self.terms().filter(|(_, c)| c.norm() > tol))
    }

    pub fn evaluate(&self, q: f64, qp: f64, p: f64, pp: f64) -> C64 {
        let x = [q, qp, p, pp];
        self.terms()
            .map(|(e, c)| {
                let mut v = c;
                for k in 0..4 {
                    if e[k] > 0 {
                        v *= x[k].powi(e[k] as i32);
                    }
                }
                v
            })
            .sum()
    }

    /// Coefficient of `p^i p'^j` as a polynomial in `(q, q')`.
    pub fn momentum_coefficient(&self, i: u32, j: u32) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|(e, _)| e[P] == i && e[PP] == j)
                .map(|(e, c)| ([e[Q], e[QP], 0, 0], c)),
        )
    }

    /// Terms not involving `q'` (or any momentum).
    fn q_only(&self) -> Self {
        Self::from_terms(self.terms().filter(|(e, _)| e[QP] == 0 && e[P] == 0 && e[PP] == 0))
    }

    /// Replaces `q` by `q'` in a polynomial of `q` alone.
    fn q_to_qprime(&self) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| ([0, e[Q], e[P], e[PP]], c)))
    }

    fn map_coefficients(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (e, f(c))))
    }

    /// Samples the polynomial on a grid.
    pub fn to_grid(&self, grid: PhaseGrid, exec: Exec) -> SymbolGrid {
        SymbolGrid::from_fn(grid, exec, |q, qp, p, pp| self.evaluate(q, qp, p, pp))
    }
}

impl Add for &SymbolPolynomial {
    type Output = SymbolPolynomial;
    fn add(self, rhs: &SymbolPolynomial) -> SymbolPolynomial {
        SymbolPolynomial::from_terms(self.terms().chain(rhs.terms()))
    }
}

impl Sub for &SymbolPolynomial {
    type Output = SymbolPolynomial;
    fn sub(self, rhs: &SymbolPolynomial) -> SymbolPolynomial {
        SymbolPolynomial::from_terms(self.terms().chain(rhs.terms().map(|(e, c)| (e, -c))))
    }
}

impl Neg for &SymbolPolynomial {
    type Output = SymbolPolynomial;
    fn neg(self) -> SymbolPolynomial {
        self.scale(-ONE)
    }
}

impl Mul for &SymbolPolynomial {
    type Output = SymbolPolynomial;
    fn mul(self, rhs: &SymbolPolynomial) -> SymbolPolynomial {
        let mut out = Vec::new();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.push(([e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]], c1 * c2));
            }
        }
        SymbolPolynomial::from_terms(out)
    }
}

impl fmt::Display for SymbolPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            for (k, &n) in e.iter().enumerate() {
                match n {
                    0 => {}
                    1 => write!(f, "*{}", VAR_NAMES[k])?,
                    _ => write!(f, "*{}^{}", VAR_NAMES[k], n)?,
                }
            }
        }
        Ok(())
    }
}

/// Symbol of `L_A R_B`: `A_qp(q, p) · B_pq(q', p')`.
pub fn sandwich_symbol(a: &OperatorPolynomial, b: &OperatorPolynomial, hbar: f64) -> Result<SymbolPolynomial> {
    let left = SymbolPolynomial::unprimed(&a.qp_symbol(hbar)?);
    let right = SymbolPolynomial::primed(&b.pq_symbol(hbar)?);
    Ok(&left * &right)
}

/// `Λ_S = -(i/ħ)[H_qp(q,p) - H_pq(q',p')]
///        - (1/2ħ) Σ [(V†V)_qp(q,p) + (V†V)_pq(q',p') - 2 V_qp(q,p) V†_pq(q',p')]`.
pub fn lindblad_symbol_polynomial(
    h: &OperatorPolynomial,
    vs: &[OperatorPolynomial],
    hbar: f64,
) -> Result<SymbolPolynomial> {
    check_hbar(hbar)?;
    h.require_degree(2, "Hamiltonian")?;
    let one = OperatorPolynomial::constant(ONE);
    let mut out = (&sandwich_symbol(h, &one, hbar)? - &sandwich_symbol(&one, h, hbar)?).scale(-I / hbar);
    for v in vs {
        v.require_degree(1, "Lindblad operator")?;
        let vd = v.dagger();
        let vdv = vd.star_linear(v, hbar)?;
        let diss = &(&sandwich_symbol(&vdv, &one, hbar)? + &sandwich_symbol(&one, &vdv, hbar)?)
            - &sandwich_symbol(v, &vd, hbar)?.scale(C64::from(2.0));
        out = &out - &diss.scale(C64::from(0.5 / hbar));
    }
    Ok(out)
}

/// [`lindblad_symbol_polynomial`] sampled on a grid.
pub fn lindblad_symbol(
    h: &OperatorPolynomial,
    vs: &[OperatorPolynomial],
    hbar: f64,
    grid: PhaseGrid,
) -> Result<SymbolGrid> {
    let poly = lindblad_symbol_polynomial(h, vs, hbar)?;
    Ok(poly.to_grid(grid, Exec::default()))
}

/// Symbol of `(L_X + sx R_X)(L_Y + sy R_Y)` for linear `X`, `Y`.
fn bilinear_symbol(x: &OperatorPolynomial, sx: C64, y: &OperatorPolynomial, sy: C64, hbar: f64) -> Result<SymbolPolynomial> {
    let one = OperatorPolynomial::constant(ONE);
    let xy = x.star_linear(y, hbar)?;
    let yx = y.star_linear(x, hbar)?;
    let terms = [
        sandwich_symbol(&xy, &one, hbar)?,
        sandwich_symbol(x, y, hbar)?.scale(sy),
        sandwich_symbol(y, x, hbar)?.scale(sx),
        sandwich_symbol(&one, &yx, hbar)?.scale(sx * sy),
    ];
    Ok(terms.iter().fold(SymbolPolynomial::zero(), |acc, t| &acc + t))
}

/// Exact symbol of the Lie/Jordan form of the oscillator model.
pub fn oscillator_symbol(params: &OscillatorModelParams) -> Result<SymbolPolynomial> {
    params.validate()?;
    let hb = params.hbar;
    let (q, p) = (OperatorPolynomial::q(), OperatorPolynomial::p());
    let lie = (-ONE, 1.0 / (I * hb));
    let jordan = (ONE, C64::from(0.5));
    let term = |k1: (C64, C64), x: &OperatorPolynomial, k2: (C64, C64), y: &OperatorPolynomial, w: f64| -> Result<SymbolPolynomial> {
        Ok(bilinear_symbol(x, k1.0, y, k2.0, hb)?.scale(k1.1 * k2.1 * w))
    };
    let parts = [
        term(jordan, &p, lie, &p, 1.0 / params.m)?,
        term(jordan, &q, lie, &q, params.m * params.omega * params.omega)?,
        term(lie, &p, jordan, &q, -(params.lambda - params.mu))?,
        term(lie, &q, jordan, &p, params.lambda + params.mu)?,
        term(lie, &q, lie, &q, params.d_pp)?,
        term(lie, &p, lie, &p, params.d_qq)?,
        term(lie, &p, lie, &q, -2.0 * params.d_pq)?,
    ];
    Ok(parts.iter().fold(SymbolPolynomial::zero(), |acc, t| &acc + t))
}

/// Relative tolerance for treating symbol coefficients as zero.
pub const CLASSIFY_TOL: f64 = 1e-12;

/// A symbol with constant quadratic momentum coefficients, split as
/// `-(i/ħ)[H(q,p) - H(q',p')] + D_S + (cross and diffusive terms)` with
/// `H = a⁻¹p²/2 - b(q)p + c(q)` and `D_S = -d p + d' p' + e`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticSymbolForm {
    pub hbar: f64,
    /// Coefficient of `p²`.
    pub p_squared: C64,
    /// Coefficient of `p'²`.
    pub pp_squared: C64,
    /// `a⁻¹ = iħ (coef(p²) - coef(p'²))`.
    pub inverse_mass: C64,
    /// Coefficient of `p p'` as a polynomial in `(q, q')`.
    pub cross_pp: SymbolPolynomial,
    pub b: SymbolPolynomial,
    pub c: SymbolPolynomial,
    pub d: SymbolPolynomial,
    pub d_prime: SymbolPolynomial,
    pub e: SymbolPolynomial,
}

impl QuadraticSymbolForm {
    pub fn from_symbol(sym: &SymbolPolynomial, hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        let tol = CLASSIFY_TOL * sym.max_abs_coefficient().max(1.0);
        let sym = sym.pruned(tol);
        if sym.momentum_degree() > 2 {
            return Err(Error::UnsupportedForm(format!(
                "symbol has momentum degree {}; only quadratic symbols are classified",
                sym.momentum_degree()
            )));
        }
        let p2 = sym.momentum_coefficient(2, 0);
        let pp2 = sym.momentum_coefficient(0, 2);
        for (name, c) in [("p^2", &p2), ("p'^2", &pp2)] {
            if c.terms().any(|(e, _)| e != [0; 4]) {
                return Err(Error::UnsupportedForm(format!("the {name} coefficient depends on position: {c}")));
            }
        }
        let p_squared = p2.coefficient([0; 4]);
        let pp_squared = pp2.coefficient([0; 4]);
        let ih = I * hbar;

        let coef_p = sym.momentum_coefficient(1, 0);
        let coef_pp = sym.momentum_coefficient(0, 1);
        let f0 = sym.momentum_coefficient(0, 0);

        let b = coef_p.q_only().map_coefficients(|z| C64::from((-ih * z).re));
        let d = &b.scale(I / hbar) - &coef_p;
        let d_prime = &coef_pp + &b.q_to_qprime().scale(I / hbar);

        let f0_q = SymbolPolynomial::from_terms(f0.q_only().terms().filter(|(e, _)| *e != [0; 4]));
        let c = f0_q.map_coefficients(|z| C64::from((ih * z).re));
        let e = &f0 + &(&c - &c.q_to_qprime()).scale(I / hbar);

        Ok(QuadraticSymbolForm {
            hbar,
            p_squared,
            pp_squared,
            inverse_mass: ih * (p_squared - pp_squared),
            cross_pp: sym.momentum_coefficient(1, 1),
            b,
            c,
            d: d.pruned(tol),
            d_prime: d_prime.pruned(tol),
            e: e.pruned(tol),
        })
    }
}

/// `ℒ = ½ a q̇² + a b(q) q̇ + ½ a b(q)² - c(q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianCoefficients {
    pub a: f64,
    pub b: SymbolPolynomial,
    pub c: SymbolPolynomial,
}

impl LagrangianCoefficients {
    pub fn evaluate(&self, q: f64, qdot: f64) -> f64 {
        let b = self.b.evaluate(q, 0.0, 0.0, 0.0).re;
        let c = self.c.evaluate(q, 0.0, 0.0, 0.0).re;
        0.5 * self.a * qdot * qdot + self.a * b * qdot + 0.5 * self.a * b * b - c
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducibilityVerdict {
    pub reducible: bool,
    pub lagrangian: Option<LagrangianCoefficients>,
    /// Coefficient of `p p'`.
    pub cross_pp: SymbolPolynomial,
    /// Human-readable reasons the reduction fails; empty when reducible.
    pub obstructions: Vec<String>,
    /// Set when a reduction exists: the configuration-space measure then
    /// carries the unregularized factor `exp(δ(0) Δ(q, q'))`, `Δ = -ħ² ln a`,
    /// which is reported and never evaluated.
    pub divergent_measure_factor: bool,
}

/// Decides whether the momentum integrals reduce the symbol to a
/// configuration-space Lagrangian.
pub fn classify_symbol(form: &QuadraticSymbolForm) -> ReducibilityVerdict {
    let scale = [form.p_squared.norm(), form.pp_squared.norm(), form.cross_pp.max_abs_coefficient()]
        .into_iter()
        .fold(1.0, f64::max);
    let tol = CLASSIFY_TOL * scale;
    let mut obstructions = Vec::new();
    let cross = form.cross_pp.pruned(tol);
    if !cross.is_zero() {
        obstructions.push(format!("nonzero p*p' coefficient: {cross}"));
    }
    let diffusion = form.p_squared + form.pp_squared;
    if diffusion.norm() > tol {
        obstructions.push(format!("p^2 and p'^2 coefficients are not opposite (sum {diffusion})"));
    }
    let inv_m = form.inverse_mass;
    if inv_m.im.abs() > tol * form.hbar || !(inv_m.re > 0.0) {
        obstructions.push(format!("inverse mass {inv_m} is not real and positive"));
    }
    let reducible = obstructions.is_empty();
    let lagrangian = reducible.then(|| LagrangianCoefficients { a: 1.0 / inv_m.re, b: form.b.clone(), c: form.c.clone() });
    ReducibilityVerdict { reducible, lagrangian, cross_pp: cross, obstructions, divergent_measure_factor: reducible }
}
