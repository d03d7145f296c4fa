//! Seeded random matrices, states and unitaries for test corpora.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::state::DensityMatrix;
use crate::tensor::{orthonormalize_columns, ComplexMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    })
}

/// Isometry with Haar-distributed columns (Gram-Schmidt of a Ginibre matrix).
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        if let Ok(v) = orthonormalize_columns(&gaussian_matrix(rows, cols, rng)) {
            return v;
        }
    }
}

pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    haar_isometry(dim, dim, rng)
}

/// Random Hermitian matrix `(G + G†)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(dim, dim, rng);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Full-rank random state `G G† / tr(G G†)`.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = gaussian_matrix(dim, dim, rng);
    let p = g.matmul(&g.adjoint());
    let tr: f64 = (0..dim).map(|i| p[(i, i)].re).sum();
    let hermitized = (&p + &p.adjoint()).scale_real(0.5 / tr);
    DensityMatrix::new(hermitized).expect("Wishart matrix is a valid state")
}

/// Random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    DensityMatrix::from_pure(&haar_isometry(dim, 1, rng).column(0)).expect("unit vector")
}
