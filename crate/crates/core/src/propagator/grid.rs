//! Uniform phase-space grids and the kernel/symbol Fourier pair
//!
//! ```text
//! Λ_S(q,q',p,p') = ∫dy dy' Λ(q,q',y,y') exp(-(i/ħ)[(q-y)p - (q'-y')p'])
//! Λ(q,q',y,y')   = (2πħ)⁻² ∫dp dp' Λ_S(q,q',p,p') exp((i/ħ)[(q-y)p - (q'-y')p'])
//! ```
//!
//! discretized with `x_j = -L/2 + jΔx`, `p_k = (k - N/2)Δp`, `Δx Δp = 2πħ/N`.
//! Each sum over one axis is an FFT with pre- and post-twiddles, so the
//! round trip is exact up to rounding.

use std::sync::Arc;

use ndarray::{Array4, ArrayViewMut2, Axis};
use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::liouville::{check_hbar, Representation, SuperOperator};

/// Position grid `x_j = -L/2 + jΔx` and its conjugate momentum grid
/// `p_k = (k - N/2)Δp`, `Δp = 2πħ/L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub points: usize,
    pub length: f64,
    pub hbar: f64,
}

impl PhaseGrid {
    pub fn new(points: usize, length: f64, hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        if points < 2 || !points.is_power_of_two() {
            return Err(Error::invalid(format!("grid size must be a power of two >= 2, got {points}")));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::invalid(format!("grid length must be positive, got {length}")));
        }
        Ok(PhaseGrid { points, length, hbar })
    }

    pub fn from_representation(rep: Representation, hbar: f64) -> Result<Self> {
        match rep {
            Representation::Grid { points, length } => PhaseGrid::new(points, length, hbar),
            Representation::Fock { .. } => Err(Error::invalid("phase-space grids need a grid representation")),
        }
    }

    pub fn representation(&self) -> Representation {
        Representation::Grid { points: self.points, length: self.length }
    }

    pub fn dx(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.hbar / self.length
    }

    pub fn position(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.dx()
    }

    pub fn momentum(&self, k: usize) -> f64 {
        (k as f64 - 0.5 * self.points as f64) * self.dp()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.position(j)).collect()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.momentum(k)).collect()
    }
}

fn check_shape(grid: &PhaseGrid, values: &Array4<C64>) -> Result<()> {
    let n = grid.points;
    if values.dim() != (n, n, n, n) {
        return Err(Error::invalid(format!("expected a {n}x{n}x{n}x{n} array, got {:?}", values.dim())));
    }
    Ok(())
}

/// `max |a - b| / max |b|`.
fn relative_diff(a: &Array4<C64>, b: &Array4<C64>) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let diff = a.iter().zip(b.iter()).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Position-space kernel `Λ(q, q', y, y')`.
#[derive(Clone, Debug)]
pub struct KernelGrid {
    grid: PhaseGrid,
    values: Array4<C64>,
}

impl KernelGrid {
    pub fn new(grid: PhaseGrid, values: Array4<C64>) -> Result<Self> {
        check_shape(&grid, &values)?;
        Ok(KernelGrid { grid, values })
    }

    /// Discrete `δ(q-y) δ(q'-y')`: `1/Δx²` on the diagonal.
    pub fn identity(grid: PhaseGrid) -> Self {
        let n = grid.points;
        let v = 1.0 / (grid.dx() * grid.dx());
        let mut values = Array4::zeros((n, n, n, n));
        for q in 0..n {
            for qp in 0..n {
                values[[q, qp, q, qp]] = C64::from(v);
            }
        }
        KernelGrid { grid, values }
    }

    /// Kernel of a grid superoperator: matrix entries divided by `Δx²`.
    pub fn from_superoperator(s: &SuperOperator, hbar: f64) -> Result<Self> {
        let grid = PhaseGrid::from_representation(s.representation(), hbar)?;
        let n = grid.points;
        let w = 1.0 / (grid.dx() * grid.dx());
        let values = s
            .matrix()
            .mapv(|z| z * w)
            .into_shape_with_order((n, n, n, n))
            .expect("d² x d² matrix reshapes to four indices");
        Ok(KernelGrid { grid, values })
    }

    pub fn to_superoperator(&self) -> SuperOperator {
        let n = self.grid.points;
        let w = self.grid.dx() * self.grid.dx();
        let m = self.values.mapv(|z| z * w).into_shape_with_order((n * n, n * n)).expect("reshape");
        SuperOperator::new(self.grid.representation(), m).expect("square")
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array4<C64> {
        &self.values
    }

    pub fn into_values(self) -> Array4<C64> {
        self.values
    }

    pub fn relative_diff(&self, other: &KernelGrid) -> f64 {
        relative_diff(&self.values, &other.values)
    }
}

/// Double-phase-space symbol `Λ_S(q, q', p, p')`.
#[derive(Clone, Debug)]
pub struct SymbolGrid {
    grid: PhaseGrid,
    values: Array4<C64>,
}

impl SymbolGrid {
    pub fn new(grid: PhaseGrid, values: Array4<C64>) -> Result<Self> {
        check_shape(&grid, &values)?;
        Ok(SymbolGrid { grid, values })
    }

    /// Samples `f(q, q', p, p')` at every grid node.
    pub fn from_fn<F>(grid: PhaseGrid, exec: Exec, f: F) -> Self
    where
        F: Fn(f64, f64, f64, f64) -> C64 + Sync + Send,
    {
        let n = grid.points;
        let mut values = Array4::zeros((n, n, n, n));
        let (xs, ps) = (grid.positions(), grid.momenta());
        exec.for_each_slab(values.view_mut(), |iq, mut slab| {
            for ((iqp, ip, ipp), v) in slab.indexed_iter_mut() {
                *v = f(xs[iq], xs[iqp], ps[ip], ps[ipp]);
            }
        });
        SymbolGrid { grid, values }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array4<C64> {
        &self.values
    }

    pub fn into_values(self) -> Array4<C64> {
        self.values
    }

    pub fn relative_diff(&self, other: &SymbolGrid) -> f64 {
        relative_diff(&self.values, &other.values)
    }
}

/// One-axis transform `out[k] = Σ_j exp(s·i·y_j p_k/ħ) in[j]` (or the same
/// sum over `k` for the reverse direction), written as an FFT between
/// twiddles `exp(i y_j p_k/ħ) = c0 · a_j · b_k · exp(2πi jk/N)`.
struct AxisTransform {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    a: Vec<C64>,
    b: Vec<C64>,
    c0: C64,
}

impl AxisTransform {
    fn new(grid: &PhaseGrid) -> Self {
        let n = grid.points;
        let mut planner = FftPlanner::new();
        let (x0, p0) = (grid.position(0), grid.momentum(0));
        let (dx, dp, hbar) = (grid.dx(), grid.dp(), grid.hbar);
        AxisTransform {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            a: (0..n).map(|j| C64::from_polar(1.0, j as f64 * dx * p0 / hbar)).collect(),
            b: (0..n).map(|k| C64::from_polar(1.0, x0 * k as f64 * dp / hbar)).collect(),
            c0: C64::from_polar(1.0, x0 * p0 / hbar),
        }
    }

    fn scratch_len(&self) -> usize {
        self.forward.get_inplace_scratch_len().max(self.inverse.get_inplace_scratch_len())
    }

    /// `positive`: sign `s = +1`. `to_momentum`: sum over positions.
    fn apply(&self, buf: &mut [C64], scratch: &mut [C64], positive: bool, to_momentum: bool) {
        let (pre, post) = if to_momentum { (&self.a, &self.b) } else { (&self.b, &self.a) };
        if positive {
            buf.iter_mut().zip(pre).for_each(|(z, w)| *z *= w);
            self.inverse.process_with_scratch(buf, scratch);
            buf.iter_mut().zip(post).for_each(|(z, w)| *z *= w * self.c0);
        } else {
            buf.iter_mut().zip(pre).for_each(|(z, w)| *z *= w.conj());
            self.forward.process_with_scratch(buf, scratch);
            let c = self.c0.conj();
            buf.iter_mut().zip(post).for_each(|(z, w)| *z *= w.conj() * c);
        }
    }
}

/// Applies the transform to rows (second index) then columns (first index).
fn transform_plane(
    t: &AxisTransform,
    mut plane: ArrayViewMut2<C64>,
    rows_positive: bool,
    cols_positive: bool,
    to_momentum: bool,
    buf: &mut [C64],
    scratch: &mut [C64],
) {
    for mut row in plane.axis_iter_mut(Axis(0)) {
        for (b, z) in buf.iter_mut().zip(row.iter()) {
            *b = *z;
        }
        t.apply(buf, scratch, rows_positive, to_momentum);
        for (z, b) in row.iter_mut().zip(buf.iter()) {
            *z = *b;
        }
    }
    for mut col in plane.axis_iter_mut(Axis(1)) {
        for (b, z) in buf.iter_mut().zip(col.iter()) {
            *b = *z;
        }
        t.apply(buf, scratch, cols_positive, to_momentum);
        for (z, b) in col.iter_mut().zip(buf.iter()) {
            *z = *b;
        }
    }
}

fn to_symbol_in_place(grid: &PhaseGrid, values: &mut Array4<C64>, exec: Exec) {
    let n = grid.points;
    let t = AxisTransform::new(grid);
    let (xs, ps) = (grid.positions(), grid.momenta());
    let dx2 = grid.dx() * grid.dx();
    let hbar = grid.hbar;
    exec.for_each_slab(values.view_mut(), |iq, mut slab| {
        let mut buf = vec![C64::from(0.0); n];
        let mut scratch = vec![C64::from(0.0); t.scratch_len()];
        for (iqp, mut plane) in slab.axis_iter_mut(Axis(0)).enumerate() {
            // Σ_y e^{+i y p/ħ} Σ_{y'} e^{-i y' p'/ħ}
            transform_plane(&t, plane.view_mut(), false, true, true, &mut buf, &mut scratch);
            for ((ip, ipp), z) in plane.indexed_iter_mut() {
                let phase = -(xs[iq] * ps[ip] - xs[iqp] * ps[ipp]) / hbar;
                *z *= C64::from_polar(dx2, phase);
            }
        }
    });
}

fn to_kernel_in_place(grid: &PhaseGrid, values: &mut Array4<C64>, exec: Exec) {
    let n = grid.points;
    let t = AxisTransform::new(grid);
    let (xs, ps) = (grid.positions(), grid.momenta());
    let w = (grid.dp() / (2.0 * std::f64::consts::PI * grid.hbar)).powi(2);
    let hbar = grid.hbar;
    exec.for_each_slab(values.view_mut(), |iq, mut slab| {
        let mut buf = vec![C64::from(0.0); n];
        let mut scratch = vec![C64::from(0.0); t.scratch_len()];
        for (iqp, mut plane) in slab.axis_iter_mut(Axis(0)).enumerate() {
            for ((ip, ipp), z) in plane.indexed_iter_mut() {
                let phase = (xs[iq] * ps[ip] - xs[iqp] * ps[ipp]) / hbar;
                *z *= C64::from_polar(w, phase);
            }
            // Σ_p e^{-i y p/ħ} Σ_{p'} e^{+i y' p'/ħ}
            transform_plane(&t, plane.view_mut(), true, false, false, &mut buf, &mut scratch);
        }
    });
}

pub fn kernel_to_symbol(k: &KernelGrid) -> SymbolGrid {
    kernel_to_symbol_with(k, Exec::default())
}

pub fn kernel_to_symbol_with(k: &KernelGrid, exec: Exec) -> SymbolGrid {
    k.clone().into_symbol(exec)
}

pub fn symbol_to_kernel(s: &SymbolGrid) -> KernelGrid {
    symbol_to_kernel_with(s, Exec::default())
}

pub fn symbol_to_kernel_with(s: &SymbolGrid, exec: Exec) -> KernelGrid {
    s.clone().into_kernel(exec)
}

impl KernelGrid {
    /// Transform in place, reusing the storage.
    pub fn into_symbol(mut self, exec: Exec) -> SymbolGrid {
        to_symbol_in_place(&self.grid, &mut self.values, exec);
        SymbolGrid { grid: self.grid, values: self.values }
    }
}

impl SymbolGrid {
    pub fn into_kernel(mut self, exec: Exec) -> KernelGrid {
        to_kernel_in_place(&self.grid, &mut self.values, exec);
        KernelGrid { grid: self.grid, values: self.values }
    }
}
