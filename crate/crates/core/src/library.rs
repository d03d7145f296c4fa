//! Standard channels and operators used by tests, fixtures and examples.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::channel::{KrausChannel, Picture};
use crate::error::{Error, Result};
use crate::state::DensityMatrix;
use crate::tensor::{ComplexMatrix, C64};

fn real(rows: &[&[f64]]) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(rows).expect("static matrix")
}

pub fn pauli_x() -> ComplexMatrix {
    real(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::new(
        2,
        2,
        vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ],
    )
    .expect("static matrix")
}

pub fn pauli_z() -> ComplexMatrix {
    real(&[&[1.0, 0.0], &[0.0, -1.0]])
}

pub fn hadamard() -> ComplexMatrix {
    real(&[&[1.0, 1.0], &[1.0, -1.0]]).scale_real(FRAC_1_SQRT_2)
}

/// Real rotation `exp(-i θ σ_y / 2)`.
pub fn rotation_y(theta: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    real(&[&[c, -s], &[s, c]])
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "parameter {p} outside [0, 1]"
        )))
    }
}

/// Amplitude damping: `K0 = diag(1, √(1-γ))`, `K1 = √γ |0⟩⟨1|`.
pub fn amplitude_damping(gamma: f64) -> Result<KrausChannel> {
    check_probability(gamma)?;
    let k0 = real(&[&[1.0, 0.0], &[0.0, (1.0 - gamma).sqrt()]]);
    let k1 = real(&[&[0.0, gamma.sqrt()], &[0.0, 0.0]]);
    KrausChannel::new(2, 2, vec![k0, k1], Picture::Schroedinger)
}

/// `ρ ↦ (1-p) ρ + p XρX`.
pub fn bit_flip(p: f64) -> Result<KrausChannel> {
    check_probability(p)?;
    let k0 = ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt());
    let k1 = pauli_x().scale_real(p.sqrt());
    KrausChannel::new(2, 2, vec![k0, k1], Picture::Schroedinger)
}

/// `ρ ↦ (1-p) ρ + p ZρZ`.
pub fn dephasing(p: f64) -> Result<KrausChannel> {
    check_probability(p)?;
    let k0 = ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt());
    let k1 = pauli_z().scale_real(p.sqrt());
    KrausChannel::new(2, 2, vec![k0, k1], Picture::Schroedinger)
}

/// Transpose map `A ↦ Aᵀ` as a signed operator sum (not completely positive).
///
/// `Aᵀ = Σ_i E_ii A E_ii + Σ_{i<j} (S_ij A S_ij† - N_ij A N_ij†)` with
/// `S_ij = (E_ij + E_ji)/√2` and `N_ij = (E_ij - E_ji)/√2`.
pub fn transpose_map(dim: usize) -> KrausChannel {
    let mut kraus = Vec::new();
    let mut signs = Vec::new();
    for i in 0..dim {
        kraus.push(ComplexMatrix::unit(dim, dim, i, i));
        signs.push(1);
    }
    for i in 0..dim {
        for j in i + 1..dim {
            let eij = ComplexMatrix::unit(dim, dim, i, j);
            let eji = ComplexMatrix::unit(dim, dim, j, i);
            kraus.push((&eij + &eji).scale_real(FRAC_1_SQRT_2));
            signs.push(1);
            kraus.push((&eij - &eji).scale_real(FRAC_1_SQRT_2));
            signs.push(-1);
        }
    }
    KrausChannel::with_signs(dim, dim, kraus, signs, Picture::Schroedinger)
        .expect("consistent operator list")
}

/// Qubit rotation channel with `T^m = T`: conjugation by `R_y(2π/(m-1))`.
pub fn periodic_rotation(period: usize) -> Result<KrausChannel> {
    if period < 2 {
        return Err(Error::InvalidArgument(format!(
            "period {period} must be at least 2"
        )));
    }
    KrausChannel::unitary(rotation_y(2.0 * PI / (period - 1) as f64))
}

/// Replacement channel `A ↦ tr(A) σ` from dimension `dim_in` to `σ.dim()`.
pub fn replacement(dim_in: usize, sigma: &DensityMatrix) -> Result<KrausChannel> {
    let (values, vectors) = sigma.matrix().hermitian_eigen()?;
    let dout = sigma.dim();
    let mut kraus = Vec::new();
    for (idx, &lambda) in values.iter().enumerate() {
        if lambda <= 1e-14 {
            continue;
        }
        let v = vectors.column(idx);
        for i in 0..dim_in {
            let k = ComplexMatrix::from_fn(dout, dim_in, |r, c| {
                if c == i {
                    v[r] * lambda.sqrt()
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            kraus.push(k);
        }
    }
    KrausChannel::new(dim_in, dout, kraus, Picture::Schroedinger)
}

/// Full trace `A ↦ tr(A)` as a channel into dimension one.
pub fn trace_channel(dim_in: usize) -> KrausChannel {
    let kraus = (0..dim_in)
        .map(|i| ComplexMatrix::unit(1, dim_in, 0, i))
        .collect();
    KrausChannel::new(dim_in, 1, kraus, Picture::Schroedinger).expect("consistent operator list")
}

/// Diagonal unitary `diag(e^{iφ_0}, …)`.
pub fn phase_unitary(phases: &[f64]) -> ComplexMatrix {
    let entries: Vec<C64> = phases.iter().map(|&p| C64::from_polar(1.0, p)).collect();
    ComplexMatrix::diag(&entries)
}
