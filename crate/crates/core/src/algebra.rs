//! Lie, Jordan and mixed relations between the multiplication superoperators
//! `L⁻_A` and `L⁺_A`, evaluated as matrix identities.
//!
//! With `A·B = (AB - BA)/(iħ)` and `A∘B = (AB + BA)/2`:
//!
//! * Lie: `L⁻_{A·B} = L⁻_A L⁻_B - L⁻_B L⁻_A`
//! * Jordan (three forms of the cubic identity in `L⁺`)
//! * mixed: `L⁺_{A·B} = L⁻_A L⁺_B - L⁺_B L⁻_A`,
//!   `L⁻_{A∘B} = L⁺_A L⁻_B + L⁺_B L⁻_A`,
//!   `L⁺_{A∘B} = L⁺_A L⁺_B - (ħ²/4) L⁻_B L⁻_A`,
//!   `L⁺_B L⁺_A - L⁺_A L⁺_B = +(ħ²/4) L⁻_{A·B}`.
//!
//! The last one follows from the third mixed relation and its `A ↔ B` image
//! combined with the Lie relation; the sign is `+`.

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::Result;
use crate::linalg::I;
use crate::liouville::{lie_jordan_superoperators, MatrixOperator, SuperOperator};
use crate::random;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Lie,
    Jordan1,
    Jordan2,
    Jordan3,
    MixedLieJordan,
    MixedJordanLie,
    MixedJordanProduct,
    MixedJordanCommutator,
}

impl Relation {
    pub const ALL: [Relation; 8] = [
        Relation::Lie,
        Relation::Jordan1,
        Relation::Jordan2,
        Relation::Jordan3,
        Relation::MixedLieJordan,
        Relation::MixedJordanLie,
        Relation::MixedJordanProduct,
        Relation::MixedJordanCommutator,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Lie => "lie",
            Relation::Jordan1 => "jordan_1",
            Relation::Jordan2 => "jordan_2",
            Relation::Jordan3 => "jordan_3",
            Relation::MixedLieJordan => "mixed_lplus_of_lie_product",
            Relation::MixedJordanLie => "mixed_lminus_of_jordan_product",
            Relation::MixedJordanProduct => "mixed_lplus_of_jordan_product",
            Relation::MixedJordanCommutator => "mixed_lplus_commutator",
        }
    }
}

/// `A·B = (AB - BA)/(iħ)`.
pub fn lie_product(a: &MatrixOperator, b: &MatrixOperator, hbar: f64) -> Result<MatrixOperator> {
    let ab = a.product(b)?;
    let ba = b.product(a)?;
    Ok((&ab - &ba).scale(1.0 / (I * hbar)))
}

/// `A∘B = (AB + BA)/2`.
pub fn jordan_product(a: &MatrixOperator, b: &MatrixOperator) -> Result<MatrixOperator> {
    let ab = a.product(b)?;
    let ba = b.product(a)?;
    Ok((&ab + &ba).scale(C64::from(0.5)))
}

/// Max-abs residual of every relation on one operator triple.
pub fn relation_residuals(
    a: &MatrixOperator,
    b: &MatrixOperator,
    c: &MatrixOperator,
    hbar: f64,
) -> Result<Vec<(Relation, f64)>> {
    let lm = |x: &MatrixOperator| lie_jordan_superoperators(x, hbar).map(|p| p.0);
    let lp = |x: &MatrixOperator| lie_jordan_superoperators(x, hbar).map(|p| p.1);
    let (lm_a, lp_a) = lie_jordan_superoperators(a, hbar)?;
    let (lm_b, lp_b) = lie_jordan_superoperators(b, hbar)?;
    let lp_c = lp(c)?;

    let a_dot_b = lie_product(a, b, hbar)?;
    let a_o_b = jordan_product(a, b)?;
    let b_o_c = jordan_product(b, c)?;
    let a_o_c = jordan_product(a, c)?;
    let ab_o_c = jordan_product(&a_o_b, c)?;

    let diff = |x: SuperOperator, y: SuperOperator| x.max_abs_diff(&y);
    let hb2 = C64::from(hbar * hbar / 4.0);

    let jordan_lhs = &(&lp(&ab_o_c)? + &(&(&lp_b * &lp_c) * &lp_a)) + &(&(&lp_a * &lp_c) * &lp_b);
    let jordan_r1 = &(&(&lp(&a_o_b)? * &lp_c) + &(&lp(&b_o_c)? * &lp_a)) + &(&lp(&a_o_c)? * &lp_b);
    let jordan_r2 = &(&(&lp_c * &lp(&a_o_b)?) + &(&lp_b * &lp(&a_o_c)?)) + &(&lp_a * &lp(&b_o_c)?);

    Ok(vec![
        (Relation::Lie, diff(lm(&a_dot_b)?, &(&lm_a * &lm_b) - &(&lm_b * &lm_a))),
        (Relation::Jordan1, diff(jordan_lhs.clone(), jordan_r1.clone())),
        (Relation::Jordan2, diff(jordan_lhs, jordan_r2.clone())),
        (Relation::Jordan3, diff(jordan_r2, jordan_r1)),
        (Relation::MixedLieJordan, diff(lp(&a_dot_b)?, &(&lm_a * &lp_b) - &(&lp_b * &lm_a))),
        (Relation::MixedJordanLie, diff(lm(&a_o_b)?, &(&lp_a * &lm_b) + &(&lp_b * &lm_a))),
        (
            Relation::MixedJordanProduct,
            diff(lp(&a_o_b)?, &(&lp_a * &lp_b) - &(&lm_b * &lm_a).scale(hb2)),
        ),
        (
            Relation::MixedJordanCommutator,
            diff(&(&lp_b * &lp_a) - &(&lp_a * &lp_b), lm(&a_dot_b)?.scale(hb2)),
        ),
    ])
}

/// Worst residual per relation over a batch of random triples.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub triples: usize,
    pub max_residuals: Vec<(Relation, f64)>,
}

impl SuiteReport {
    pub fn worst(&self) -> f64 {
        self.max_residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }
}

/// Runs every relation on `triples` random operator triples. Dimensions and
/// `ħ` values are cycled so each combination is visited.
pub fn run_suite(seed: u64, triples: usize, dims: &[usize], hbars: &[f64]) -> Result<SuiteReport> {
    let mut rng = random::seeded(seed);
    let mut worst: Vec<(Relation, f64)> = Relation::ALL.iter().map(|&r| (r, 0.0)).collect();
    for k in 0..triples {
        let d = dims[k % dims.len()];
        let hbar = hbars[(k / dims.len()) % hbars.len()];
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
            // scale entries to O(1) so residuals are comparable across draws
            let s = rng.random_range(0.5..1.5);
            MatrixOperator::from_matrix(random::ginibre(rng, d).mapv(|z| z * s))
        };
        let a = draw(&mut rng)?;
        let b = draw(&mut rng)?;
        let c = draw(&mut rng)?;
        for (slot, (_, r)) in worst.iter_mut().zip(relation_residuals(&a, &b, &c, hbar)?) {
            slot.1 = slot.1.max(r);
        }
    }
    Ok(SuiteReport { triples, max_residuals: worst })
}
