//! Seeded random fixtures: matrices, density matrices, unitaries.
//!
//! Everything draws from a caller-supplied RNG so test fixtures and CLI runs
//! stay reproducible from an explicit seed.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{dagger, trace};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex Ginibre matrix with unit-variance entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Array2<C64> {
    Array2::from_shape_simple_fn((n, n), || C64::new(normal(rng), normal(rng)) * std::f64::consts::FRAC_1_SQRT_2)
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Array2<C64> {
    let g = ginibre(rng, n);
    (&g + &dagger(&g.view())) * C64::from(0.5)
}

/// Full-rank density matrix `G G† / Tr(G G†)`.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Array2<C64> {
    let g = ginibre(rng, n);
    let rho = g.dot(&dagger(&g.view()));
    let tr = trace(&rho.view());
    rho / tr
}

/// Unitary from Gram–Schmidt on a Ginibre matrix (Haar up to column phases).
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Array2<C64> {
    let g = ginibre(rng, n);
    let mut u = Array2::<C64>::zeros((n, n));
    for j in 0..n {
        let mut v = g.column(j).to_owned();
        for k in 0..j {
            let uk = u.column(k);
            let proj: C64 = uk.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            v.zip_mut_with(&uk, |x, &y| *x -= proj * y);
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        u.column_mut(j).assign(&(v / C64::from(norm)));
    }
    u
}
