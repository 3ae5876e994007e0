//! Subcommand pipelines.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use ndarray::Array2;
use qpath::algebra;
use qpath::gates4::{self, qubit_count};
use qpath::lindblad::{self, canonical_operators, LindbladGenerator, OscillatorModelParams};
use qpath::linalg;
use qpath::liouville::{pauli, MatrixOperator, Representation, SuperOperator};
use qpath::oracle::{moment_trajectory, MomentState};
use qpath::propagator::io::{self, fmt_f64, MatrixDump};
use qpath::propagator::{
    self, classify_symbol, gaussian_short_time_kernel, kernel_to_symbol, lindblad_symbol_polynomial,
    oscillator_symbol, KernelGrid, OperatorPolynomial, PhaseGrid, QuadraticSymbolForm, QuantumOperation, SliceMode,
    SymbolPolynomial,
};
use qpath::C64;
use serde::Serialize;

use crate::config::{ComplexSpec, GeneratorSpec, LoadedConfig, OperatorSpec, Scheme, StateSpec, TimeSpec};

/// Options shared by every subcommand.
pub struct RunOptions {
    pub out: PathBuf,
    pub tol: Option<f64>,
    pub seed: u64,
}

const DEFAULT_TOL: f64 = 1e-8;
const ALGEBRA_TOL: f64 = 1e-11;

/// What a config's generator block builds.
enum Model {
    Generator {
        superop: SuperOperator,
        label: String,
        /// Present for the quadratic oscillator forms.
        params: Option<OscillatorModelParams>,
        /// Exact double phase-space symbol, when the operators are polynomials.
        symbol: Option<SymbolPolynomial>,
    },
    Gate(QuantumOperation),
}

/// Collects artifacts and writes the requested ones.
struct Artifacts<'a> {
    dir: &'a Path,
    wanted: &'a [String],
    written: Vec<PathBuf>,
}

impl<'a> Artifacts<'a> {
    fn new(dir: &'a Path, wanted: &'a [String], known: &[&str], cfg: &LoadedConfig) -> Result<Self> {
        for w in wanted {
            if !known.contains(&w.as_str()) {
                return Err(cfg
                    .error_at("outputs", format!("unknown output `{w}`; this subcommand writes {}", known.join(", ")))
                    .into());
            }
        }
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Artifacts { dir, wanted, written: Vec::new() })
    }

    fn wants(&self, name: &str) -> bool {
        self.wanted.is_empty() || self.wanted.iter().any(|w| w == name)
    }

    fn write(&mut self, name: &str, ext: &str, contents: impl FnOnce() -> Result<String>) -> Result<()> {
        if !self.wants(name) {
            return Ok(());
        }
        let path = self.dir.join(format!("{name}.{ext}"));
        fs::write(&path, contents()?).with_context(|| format!("cannot write {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }

    fn report(&self) {
        for p in &self.written {
            println!("wrote {}", p.display());
        }
    }
}

fn complex_matrix(rows: &[Vec<ComplexSpec>], dim: usize, what: &str) -> Result<Array2<C64>> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        bail!("{what} must be a {dim}x{dim} matrix");
    }
    Ok(Array2::from_shape_fn((dim, dim), |(i, j)| rows[i][j].value()))
}

fn pauli_operator(label: &str, dim: usize) -> Result<Array2<C64>> {
    let n = label.chars().count();
    if n == 0 || 1usize.checked_shl(n as u32) != Some(dim) {
        bail!("Pauli label `{label}` needs dimension 2^{n}, representation has {dim}");
    }
    let mut out = linalg::identity(1);
    for c in label.chars() {
        let k = match c {
            'I' => 0,
            'X' => 1,
            'Y' => 2,
            'Z' => 3,
            _ => bail!("`{c}` is not a Pauli label (use I, X, Y, Z)"),
        };
        out = linalg::kron(&out.view(), &pauli(k).view());
    }
    Ok(out)
}

/// Polynomial form of an operator spec, if it has one.
fn polynomial(spec: &OperatorSpec) -> Option<(OperatorPolynomial, f64, f64)> {
    match *spec {
        OperatorSpec::Linear { p, q, m, omega } => Some((
            OperatorPolynomial::linear(p.map_or(C64::new(0.0, 0.0), |z| z.value()), q.map_or(C64::new(0.0, 0.0), |z| z.value())),
            m,
            omega,
        )),
        OperatorSpec::Harmonic { m, omega, mu } => Some((OperatorPolynomial::oscillator_hamiltonian(m, omega, mu), m, omega)),
        _ => None,
    }
}

fn operator(spec: &OperatorSpec, rep: Representation, hbar: f64) -> Result<MatrixOperator> {
    let dim = rep.dim();
    let m = match spec {
        OperatorSpec::Matrix(rows) => complex_matrix(rows, dim, "operator")?,
        OperatorSpec::Pauli { label, scale } => pauli_operator(label, dim)?.mapv(|z| z * scale.value()),
        OperatorSpec::Lowering { scale } => {
            let mut a = Array2::<C64>::zeros((dim, dim));
            for n in 1..dim {
                a[[n - 1, n]] = scale.value() * (n as f64).sqrt();
            }
            a
        }
        OperatorSpec::Linear { .. } | OperatorSpec::Harmonic { .. } => {
            let (poly, mass, omega) = polynomial(spec).expect("polynomial spec");
            let pair = canonical_operators(rep, mass, omega, hbar)?;
            return Ok(poly.to_operator(&pair)?);
        }
    };
    Ok(MatrixOperator::new(rep, m)?)
}

fn build_model(cfg: &LoadedConfig) -> Result<Model> {
    let c = &cfg.config;
    let (rep, hbar) = (c.representation, c.hbar);
    let at = |e: qpath::Error| anyhow!(cfg.error_at("generator", e.to_string()));
    match &c.generator {
        GeneratorSpec::Lindblad(spec) => {
            let h = operator(&spec.hamiltonian, rep, hbar).map_err(|e| anyhow!(cfg.error_at("hamiltonian", e.to_string())))?;
            let ops = spec
                .operators
                .iter()
                .map(|o| operator(o, rep, hbar))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| anyhow!(cfg.error_at("operators", e.to_string())))?;
            let g = LindbladGenerator::new(h, ops, hbar).map_err(at)?;
            let symbol = match (polynomial(&spec.hamiltonian), spec.operators.iter().map(polynomial).collect::<Option<Vec<_>>>()) {
                (Some((h, ..)), Some(vs)) => {
                    let vs: Vec<_> = vs.into_iter().map(|v| v.0).collect();
                    lindblad_symbol_polynomial(&h, &vs, hbar).ok()
                }
                _ => None,
            };
            Ok(Model::Generator { superop: g.build(), label: "lindblad".into(), params: None, symbol })
        }
        GeneratorSpec::Oscillator(o) => {
            let params = OscillatorModelParams {
                m: o.m,
                omega: o.omega,
                mu: o.mu,
                lambda: o.lambda,
                d_qq: o.d_qq,
                d_pp: o.d_pp,
                d_pq: o.d_pq,
                hbar,
            };
            params.validate().map_err(at)?;
            let superop = lindblad::build_oscillator_generator(&params, rep).map_err(at)?;
            let symbol = oscillator_symbol(&params).ok();
            Ok(Model::Generator { superop, label: "oscillator".into(), params: Some(params), symbol })
        }
        GeneratorSpec::Amplitudes(a) => {
            let (av, bv) = (a.a.map(ComplexSpec::value), a.b.map(ComplexSpec::value));
            let params = OscillatorModelParams::from_amplitudes(av, bv, a.m, a.omega, a.mu, hbar).map_err(at)?;
            let g = lindblad::amplitude_generator(av, bv, a.m, a.omega, a.mu, hbar, rep).map_err(at)?;
            let symbol = oscillator_symbol(&params).ok();
            Ok(Model::Generator { superop: g.build(), label: "amplitudes".into(), params: Some(params), symbol })
        }
        GeneratorSpec::Unitary(spec) => {
            let u = operator(spec, rep, hbar).map_err(|e| anyhow!(cfg.error_at("unitary", e.to_string())))?;
            Ok(Model::Gate(gates4::lift_unitary(&u).map_err(|e| anyhow!(cfg.error_at("unitary", e.to_string())))?))
        }
    }
}

fn time_spec(cfg: &LoadedConfig, command: &str) -> Result<TimeSpec> {
    cfg.config.time.ok_or_else(|| anyhow!(cfg.error_at("generator", format!("`{command}` needs a time block"))))
}

fn slice_mode(s: Scheme) -> SliceMode {
    match s {
        Scheme::Linear => SliceMode::Linear,
        Scheme::Exponential => SliceMode::Exponential,
    }
}

fn generator<'m>(cfg: &LoadedConfig, model: &'m Model, command: &str) -> Result<(&'m SuperOperator, &'m str)> {
    match model {
        Model::Generator { superop, label, .. } => Ok((superop, label)),
        Model::Gate(_) => Err(cfg.error_at("unitary", format!("`{command}` needs a generator, not a unitary gate")).into()),
    }
}

/// The operation a config describes: the lifted gate or the sliced propagator.
fn operation(cfg: &LoadedConfig, model: &Model, command: &str) -> Result<QuantumOperation> {
    match model {
        Model::Gate(op) => Ok(op.clone()),
        Model::Generator { superop, label, .. } => {
            let t = time_spec(cfg, command)?;
            propagator::trotter_propagate_with(superop, t.t0, t.t, t.slices, slice_mode(t.scheme))
                .with_context(|| format!("operation `{label} propagator` failed"))
        }
    }
}

/// Mass and frequency of the oscillator frame used for `Q`, `P` and coherent states.
fn frame(cfg: &LoadedConfig, model: &Model) -> (f64, f64) {
    if let Model::Generator { params: Some(p), .. } = model {
        return (p.m, p.omega);
    }
    if let GeneratorSpec::Lindblad(spec) = &cfg.config.generator {
        if let Some((_, m, w)) = polynomial(&spec.hamiltonian) {
            return (m, w);
        }
    }
    (1.0, 1.0)
}

fn initial_state(cfg: &LoadedConfig, model: &Model) -> Result<MatrixOperator> {
    let c = &cfg.config;
    let rep = c.representation;
    let dim = rep.dim();
    let spec = c.initial_state.as_ref().ok_or_else(|| anyhow!(cfg.error_at("generator", "an initial_state is required")))?;
    let fail = |msg: String| anyhow!(cfg.error_at("initial_state", msg));
    let pure = |psi: ndarray::Array1<C64>| -> Array2<C64> {
        Array2::from_shape_fn((dim, dim), |(i, j)| psi[i] * psi[j].conj())
    };
    let m = match spec {
        StateSpec::Fock(n) => {
            if !matches!(rep, Representation::Fock { .. }) || *n >= dim {
                return Err(fail(format!("number state |{n}> needs a fock representation with dim > {n}")));
            }
            let mut m = Array2::zeros((dim, dim));
            m[[*n, *n]] = C64::new(1.0, 0.0);
            m
        }
        StateSpec::Coherent(alpha) => {
            let alpha = alpha.value();
            let mut psi = match rep {
                Representation::Fock { .. } => {
                    let mut v = ndarray::Array1::<C64>::zeros(dim);
                    let mut amp = C64::new(1.0, 0.0);
                    for n in 0..dim {
                        if n > 0 {
                            amp = amp * alpha / (n as f64).sqrt();
                        }
                        v[n] = amp;
                    }
                    v
                }
                Representation::Grid { points, length } => {
                    let (mass, omega) = frame(cfg, model);
                    let hbar = c.hbar;
                    let q0 = (2.0 * hbar / (mass * omega)).sqrt() * alpha.re;
                    let p0 = (2.0 * hbar * mass * omega).sqrt() * alpha.im;
                    let dx = length / points as f64;
                    ndarray::Array1::from_shape_fn(points, |j| {
                        let x = -0.5 * length + j as f64 * dx;
                        C64::from_polar((-(mass * omega / (2.0 * hbar)) * (x - q0).powi(2)).exp(), p0 * x / hbar)
                    })
                }
            };
            let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            psi.mapv_inplace(|z| z / norm);
            pure(psi)
        }
        StateSpec::Bloch([x, y, z]) => {
            if dim != 2 {
                return Err(fail("a Bloch vector needs a two-level representation".into()));
            }
            if x * x + y * y + z * z > 1.0 + 1e-12 {
                return Err(fail("Bloch vector is longer than 1".into()));
            }
            let s = [(*x, 1), (*y, 2), (*z, 3)];
            s.iter().fold(pauli(0), |acc, &(c, k)| acc + pauli(k) * C64::from(c)) * C64::from(0.5)
        }
        StateSpec::Matrix(rows) => complex_matrix(rows, dim, "initial_state").map_err(|e| fail(e.to_string()))?,
    };
    let rho = MatrixOperator::new(rep, m)?;
    propagator::validate_density(&rho).map_err(|e| fail(e.to_string()))?;
    Ok(rho)
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = format!("{header}\n");
    for r in rows {
        let cells: Vec<String> = r.into_iter().map(fmt_f64).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn density_dump(rho: &MatrixOperator) -> MatrixDump {
    let e = rho.entries();
    MatrixDump {
        kind: "density".into(),
        representation: rho.representation(),
        shape: [e.nrows(), e.ncols()],
        values: e.iter().map(|z| [z.re, z.im]).collect(),
    }
}

pub fn propagate(cfg: &LoadedConfig, opts: &RunOptions) -> Result<()> {
    let mut art = Artifacts::new(&opts.out, &cfg.config.outputs, &["trajectory", "final_state"], cfg)?;
    let model = build_model(cfg)?;
    let (superop, label) = generator(cfg, &model, "propagate")?;
    let t = time_spec(cfg, "propagate")?;
    let rho0 = initial_state(cfg, &model)?;
    let traj = propagator::trotter_trajectory(superop, &rho0, t.t0, t.t, t.slices, slice_mode(t.scheme))
        .with_context(|| format!("operation `{label} propagator` failed"))?;
    art.write("trajectory", "csv", || {
        Ok(csv(
            "t,trace,purity,rho_ee",
            traj.iter().map(|(tk, rho)| {
                let e = rho.entries();
                vec![*tk, rho.trace().re, linalg::trace(&e.dot(&e).view()).re, e[[1, 1]].re]
            }),
        ))
    })?;
    let last = &traj.last().expect("at least the initial state").1;
    art.write("final_state", "json", || json(&density_dump(last)))?;
    art.report();
    Ok(())
}

#[derive(Serialize)]
struct LagrangianReport {
    mass: f64,
    drift: String,
    potential: String,
}

#[derive(Serialize)]
struct ReducibilityReport {
    reducible: bool,
    obstructions: Vec<String>,
    cross_momentum_coefficient: String,
    divergent_measure_factor: bool,
    lagrangian: Option<LagrangianReport>,
}

pub fn kernel(cfg: &LoadedConfig, opts: &RunOptions) -> Result<()> {
    let known = ["generator_kernel", "generator_symbol", "kernel_slice", "short_time_kernel", "reducibility"];
    let mut art = Artifacts::new(&opts.out, &cfg.config.outputs, &known, cfg)?;
    let Representation::Grid { .. } = cfg.config.representation else {
        return Err(cfg.error_at("representation", "`kernel` needs a grid representation").into());
    };
    let grid = PhaseGrid::from_representation(cfg.config.representation, cfg.config.hbar)?;
    let model = build_model(cfg)?;
    let (superop, _) = generator(cfg, &model, "kernel")?;
    let Model::Generator { symbol, .. } = &model else { unreachable!() };

    let k = KernelGrid::from_superoperator(superop, cfg.config.hbar)?;
    let mid = grid.points / 2;
    art.write("generator_kernel", "json", || Ok(io::kernel_to_json(&k) + "\n"))?;
    art.write("generator_symbol", "json", || Ok(io::symbol_to_json(&kernel_to_symbol(&k)) + "\n"))?;
    art.write("kernel_slice", "csv", || Ok(io::kernel_slice_csv(&k, mid, mid)?))?;

    if let Some(sym) = symbol {
        let t = time_spec(cfg, "kernel")?;
        let tau = (t.t - t.t0) / t.slices as f64;
        if art.wants("short_time_kernel") {
            let g = gaussian_short_time_kernel(sym, tau, grid).context("operation `gaussian short-time kernel` failed")?;
            art.write("short_time_kernel", "json", || Ok(io::kernel_to_json(&g) + "\n"))?;
        }
        let form = QuadraticSymbolForm::from_symbol(sym, cfg.config.hbar)?;
        let v = classify_symbol(&form);
        let report = ReducibilityReport {
            reducible: v.reducible,
            obstructions: v.obstructions.clone(),
            cross_momentum_coefficient: v.cross_pp.to_string(),
            divergent_measure_factor: v.divergent_measure_factor,
            lagrangian: v.lagrangian.as_ref().map(|l| LagrangianReport {
                mass: l.a,
                drift: l.b.to_string(),
                potential: l.c.to_string(),
            }),
        };
        art.write("reducibility", "json", || json(&report))?;
    }
    art.report();
    Ok(())
}

#[derive(Serialize)]
struct KrausSummary {
    operation: String,
    rank: usize,
    completeness_defect: f64,
    min_eigenvalue: f64,
}

pub fn choi(cfg: &LoadedConfig, opts: &RunOptions) -> Result<()> {
    let mut art = Artifacts::new(&opts.out, &cfg.config.outputs, &["choi", "choi_eigenvalues", "kraus"], cfg)?;
    let model = build_model(cfg)?;
    let op = operation(cfg, &model, "choi")?;
    let c = propagator::choi_matrix(&op);
    let mut eig = c.eigenvalues().to_vec();
    eig.sort_by(|a, b| b.total_cmp(a));
    art.write("choi", "json", || Ok(io::choi_to_json(&c) + "\n"))?;
    art.write("choi_eigenvalues", "csv", || {
        let mut out = String::from("index,eigenvalue\n");
        for (i, v) in eig.iter().enumerate() {
            out.push_str(&format!("{i},{}\n", fmt_f64(*v)));
        }
        Ok(out)
    })?;
    let name = op.meta().generator.clone();
    let tol = opts.tol.unwrap_or(DEFAULT_TOL);
    let kraus = propagator::kraus_decomposition(&c, Some(tol)).with_context(|| format!("operation `{name}` failed"))?;
    let summary = KrausSummary {
        operation: name,
        rank: kraus.len(),
        completeness_defect: kraus.completeness_defect,
        min_eigenvalue: *eig.last().expect("non-empty"),
    };
    art.write("kraus", "json", || json(&summary))?;
    art.report();
    Ok(())
}

pub fn gate_matrix(cfg: &LoadedConfig, opts: &RunOptions) -> Result<()> {
    let mut art = Artifacts::new(&opts.out, &cfg.config.outputs, &["gate_matrix"], cfg)?;
    let dim = cfg.config.representation.dim();
    let n = match cfg.config.representation {
        Representation::Fock { .. } => qubit_count(dim).map_err(|e| anyhow!(cfg.error_at("representation", e.to_string())))?,
        Representation::Grid { .. } => return Err(cfg.error_at("representation", "`gate-matrix` needs a fock (qubit) representation").into()),
    };
    let model = build_model(cfg)?;
    let op = operation(cfg, &model, "gate-matrix")?;
    let g = gates4::gate_matrix(&op, n).with_context(|| format!("operation `{}` failed", op.meta().generator))?;
    art.write("gate_matrix", "csv", || Ok(g.to_csv()))?;
    art.report();
    Ok(())
}

pub fn moments(cfg: &LoadedConfig, opts: &RunOptions) -> Result<()> {
    let mut art = Artifacts::new(&opts.out, &cfg.config.outputs, &["moments"], cfg)?;
    let model = build_model(cfg)?;
    let Model::Generator { params: Some(params), .. } = &model else {
        return Err(cfg.error_at("generator", "`moments` needs an oscillator or amplitudes generator").into());
    };
    let t = time_spec(cfg, "moments")?;
    let rho0 = initial_state(cfg, &model)?;
    let pair = canonical_operators(cfg.config.representation, params.m, params.omega, params.hbar)?;
    let m0 = MomentState::from_density(&rho0, &pair)?;
    let traj = moment_trajectory(params, &m0, t.t - t.t0, t.slices).context("operation `moment evolution` failed")?;
    art.write("moments", "csv", || {
        Ok(csv(
            "t,mean_q,mean_p,var_qq,var_pp,cov_qp,energy",
            traj.iter().map(|(s, m)| {
                vec![t.t0 + s, m.mean_q, m.mean_p, m.var_qq, m.var_pp, m.cov_qp, m.energy(params.m, params.omega)]
            }),
        ))
    })?;
    art.report();
    Ok(())
}

/// Returns whether every relation stayed within tolerance.
pub fn check_algebra(cfg: Option<&LoadedConfig>, opts: &RunOptions) -> Result<bool> {
    let outputs = cfg.map_or(&[][..], |c| &c.config.outputs[..]);
    let hbars: Vec<f64> = match cfg {
        Some(c) => vec![c.config.hbar],
        None => vec![1.0, 0.5],
    };
    let tol = opts.tol.unwrap_or(ALGEBRA_TOL);
    let report = algebra::run_suite(opts.seed, 50, &[3, 4], &hbars)?;
    fs::create_dir_all(&opts.out).with_context(|| format!("cannot create output directory {}", opts.out.display()))?;
    if let Some(w) = outputs.iter().find(|w| w.as_str() != "algebra") {
        let c = cfg.expect("outputs come from a config");
        return Err(c.error_at("outputs", format!("unknown output `{w}`; this subcommand writes algebra")).into());
    }
    let mut body = String::from("relation,max_residual\n");
    for (rel, r) in &report.max_residuals {
        println!("{:<32} {}", rel.name(), fmt_f64(*r));
        body.push_str(&format!("{},{}\n", rel.name(), fmt_f64(*r)));
    }
    let path = opts.out.join("algebra.csv");
    fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
    println!("wrote {}", path.display());
    let worst = report.worst();
    println!("worst residual {} over {} triples (tolerance {tol:e})", fmt_f64(worst), report.triples);
    Ok(worst <= tol)
}
