//! JSON and CSV dumps of kernels, symbols and Choi matrices.
//!
//! Complex numbers are written as `[re, im]`, arrays flattened row-major,
//! with a header that records the grid or basis they live on.

use ndarray::{Array2, Array4, ArrayView2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liouville::Representation;

use super::grid::{KernelGrid, PhaseGrid, SymbolGrid};
use super::ChoiMatrix;

/// Fixed-width scientific formatting with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub points: usize,
    pub length: f64,
    pub position_spacing: f64,
    pub momentum_spacing: f64,
    pub hbar: f64,
}

impl From<&PhaseGrid> for GridHeader {
    fn from(g: &PhaseGrid) -> Self {
        GridHeader { points: g.points, length: g.length, position_spacing: g.dx(), momentum_spacing: g.dp(), hbar: g.hbar }
    }
}

/// Serialized 4-index grid array.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDump {
    pub kind: String,
    pub grid: GridHeader,
    pub index_order: Vec<String>,
    pub shape: Vec<usize>,
    pub values: Vec<[f64; 2]>,
}

/// Serialized square complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixDump {
    pub kind: String,
    pub representation: Representation,
    pub shape: [usize; 2],
    pub values: Vec<[f64; 2]>,
}

fn pairs<'a>(it: impl Iterator<Item = &'a C64>) -> Vec<[f64; 2]> {
    it.map(|z| [z.re, z.im]).collect()
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

pub fn kernel_dump(k: &KernelGrid) -> GridDump {
    let n = k.grid().points;
    GridDump {
        kind: "kernel".into(),
        grid: k.grid().into(),
        index_order: ["q", "q'", "y", "y'"].map(String::from).to_vec(),
        shape: vec![n; 4],
        values: pairs(k.values().iter()),
    }
}

pub fn symbol_dump(s: &SymbolGrid) -> GridDump {
    let n = s.grid().points;
    GridDump {
        kind: "symbol".into(),
        grid: s.grid().into(),
        index_order: ["q", "q'", "p", "p'"].map(String::from).to_vec(),
        shape: vec![n; 4],
        values: pairs(s.values().iter()),
    }
}

pub fn kernel_to_json(k: &KernelGrid) -> String {
    to_json(&kernel_dump(k))
}

pub fn symbol_to_json(s: &SymbolGrid) -> String {
    to_json(&symbol_dump(s))
}

fn grid_values(dump: &GridDump, kind: &str) -> Result<(PhaseGrid, Array4<C64>)> {
    if dump.kind != kind {
        return Err(Error::invalid(format!("expected a {kind} dump, found {}", dump.kind)));
    }
    let grid = PhaseGrid::new(dump.grid.points, dump.grid.length, dump.grid.hbar)?;
    let n = grid.points;
    let v: Vec<C64> = dump.values.iter().map(|[re, im]| C64::new(*re, *im)).collect();
    let values = Array4::from_shape_vec((n, n, n, n), v)
        .map_err(|_| Error::invalid(format!("{kind} dump holds {} values, expected {}", dump.values.len(), n.pow(4))))?;
    Ok((grid, values))
}

pub fn kernel_from_json(s: &str) -> Result<KernelGrid> {
    let dump: GridDump = serde_json::from_str(s).map_err(|e| Error::invalid(format!("kernel JSON: {e}")))?;
    let (grid, values) = grid_values(&dump, "kernel")?;
    KernelGrid::new(grid, values)
}

pub fn symbol_from_json(s: &str) -> Result<SymbolGrid> {
    let dump: GridDump = serde_json::from_str(s).map_err(|e| Error::invalid(format!("symbol JSON: {e}")))?;
    let (grid, values) = grid_values(&dump, "symbol")?;
    SymbolGrid::new(grid, values)
}

pub fn choi_to_json(c: &ChoiMatrix) -> String {
    let m = c.matrix();
    to_json(&MatrixDump {
        kind: "choi".into(),
        representation: c.representation(),
        shape: [m.nrows(), m.ncols()],
        values: pairs(m.iter()),
    })
}

pub fn matrix_from_json(s: &str) -> Result<(Representation, Array2<C64>)> {
    let dump: MatrixDump = serde_json::from_str(s).map_err(|e| Error::invalid(format!("matrix JSON: {e}")))?;
    let v: Vec<C64> = dump.values.iter().map(|[re, im]| C64::new(*re, *im)).collect();
    let m = Array2::from_shape_vec((dump.shape[0], dump.shape[1]), v)
        .map_err(|_| Error::invalid("matrix dump shape does not match its values"))?;
    Ok((dump.representation, m))
}

/// Long-format CSV of a 2-D complex slice: `row_label,col_label,re,im`.
pub fn slice_to_csv(plane: &ArrayView2<C64>, row_label: &str, col_label: &str, rows: &[f64], cols: &[f64]) -> Result<String> {
    if plane.dim() != (rows.len(), cols.len()) {
        return Err(Error::invalid("slice coordinates do not match its shape"));
    }
    let mut out = format!("{row_label},{col_label},re,im\n");
    for ((i, j), z) in plane.indexed_iter() {
        out.push_str(&format!("{},{},{},{}\n", fmt_f64(rows[i]), fmt_f64(cols[j]), fmt_f64(z.re), fmt_f64(z.im)));
    }
    Ok(out)
}

/// The `(q', y')` plane of a kernel at fixed `(q, y)` indices.
pub fn kernel_slice_csv(k: &KernelGrid, iq: usize, iy: usize) -> Result<String> {
    let n = k.grid().points;
    if iq >= n || iy >= n {
        return Err(Error::invalid(format!("slice index out of range for a grid of {n} points")));
    }
    let plane = k.values().slice(ndarray::s![iq, .., iy, ..]);
    let xs = k.grid().positions();
    slice_to_csv(&plane, "q_prime", "y_prime", &xs, &xs)
}
