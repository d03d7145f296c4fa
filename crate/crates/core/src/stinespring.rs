//! Unitary dilations of a single channel.
//!
//! For a channel `T` on `d × d` matrices the ancilla is `K = C^{d²}` in the
//! pure state `ω = |e_0⟩⟨e_0|`, and `T(A) = tr_K(U (A ⊗ ω) U†)`. The unitary
//! extends the isometry `x ⊗ e_0 ↦ Σ_i K_i x ⊗ e_i`, with the Kraus list
//! zero-padded to `d²` operators.

use crate::channel::{
    choi, dual, kraus_from_choi, require_accepted, KrausChannel, Picture, CHOI_RANK_CUTOFF,
};
use crate::error::{Error, Result};
use crate::random::{gaussian_matrix, rng_from_seed};
use crate::state::DensityMatrix;
use crate::tensor::{
    complete_isometry_to_unitary, embed_identity, embed_state, partial_trace_factor,
    partial_trace_state, trace_norm, ComplexMatrix, FactorShape,
};

/// `T(A) = tr_K(U (A ⊗ ω) U†)` on `H ⊗ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryDilation {
    unitary: ComplexMatrix,
    ancilla_dim: usize,
    omega: DensityMatrix,
    shape: FactorShape,
}

impl UnitaryDilation {
    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn omega(&self) -> &DensityMatrix {
        &self.omega
    }

    pub fn shape(&self) -> &FactorShape {
        &self.shape
    }

    pub fn system_dim(&self) -> usize {
        self.shape.dims()[0]
    }

    /// `tr_K(U (A ⊗ ω) U†)`.
    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_operand(a)?;
        let big = embed_state(a, &self.omega);
        let evolved = self.unitary.matmul(&big).matmul(&self.unitary.adjoint());
        partial_trace_factor(&evolved, &self.shape, &[0])
    }

    /// `tr_ω(U† (B ⊗ id_K) U)`, the Heisenberg-picture reconstruction.
    pub fn apply_heisenberg(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_operand(b)?;
        let big = embed_identity(b, self.ancilla_dim);
        let pulled = self.unitary.adjoint().matmul(&big).matmul(&self.unitary);
        partial_trace_state(&pulled, &self.shape, &self.omega)
    }

    /// The isometry `x ↦ U (x ⊗ e_0)`.
    pub fn embedding(&self) -> ComplexMatrix {
        let d = self.system_dim();
        ComplexMatrix::from_fn(self.unitary.rows(), d, |r, c| {
            self.unitary[(r, c * self.ancilla_dim)]
        })
    }

    /// Largest trace-norm deviation from `t` over the matrix units `E_ij`.
    pub fn reconstruction_residual(&self, t: &KrausChannel) -> Result<f64> {
        let d = self.system_dim();
        if t.map_dims() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "dilation acts on dimension {d}, channel maps {:?}",
                t.map_dims()
            )));
        }
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let e = ComplexMatrix::unit(d, d, i, j);
                let (got, want) = match t.picture() {
                    Picture::Schroedinger => (self.apply(&e)?, t.apply(&e)?),
                    Picture::Heisenberg => (self.apply_heisenberg(&e)?, t.apply(&e)?),
                };
                worst = worst.max(trace_norm(&(&got - &want)));
            }
        }
        Ok(worst)
    }

    fn check_operand(&self, a: &ComplexMatrix) -> Result<()> {
        let d = self.system_dim();
        if a.rows() != d || a.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "expected a {d}x{d} operator, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        Ok(())
    }
}

/// Kraus family of `t` with at most `d²` members, padded with zeros to
/// exactly `d²`.
fn padded_kraus(t: &KrausChannel) -> Result<Vec<ComplexMatrix>> {
    let d = t.dim_in();
    let kt = d * d;
    let mut kraus = if t.kraus().len() > kt {
        kraus_from_choi(&choi(t)?, CHOI_RANK_CUTOFF)?
            .kraus()
            .to_vec()
    } else {
        t.kraus().to_vec()
    };
    kraus.resize(kt, ComplexMatrix::zeros(d, d));
    Ok(kraus)
}

/// Unitary on `H ⊗ K`, `K = C^{d²}`, whose columns `c·d²` hold the isometry
/// `e_c ⊗ e_0 ↦ Σ_i K_i e_c ⊗ e_i`.
fn dilation_unitary(kraus: &[ComplexMatrix], d: usize) -> Result<ComplexMatrix> {
    let kt = kraus.len();
    let n = d * kt;
    let mut iso = ComplexMatrix::zeros(n, d);
    for (i, k) in kraus.iter().enumerate() {
        for r in 0..d {
            for c in 0..d {
                iso[(r * kt + i, c)] = k[(r, c)];
            }
        }
    }
    let w = complete_isometry_to_unitary(&iso)?;
    // Column c of the isometry sits at c·k̃; completion columns fill the rest
    // in order.
    let mut order = Vec::with_capacity(n);
    let mut rest = d;
    for pos in 0..n {
        if pos % kt == 0 {
            order.push(pos / kt);
        } else {
            order.push(rest);
            rest += 1;
        }
    }
    Ok(ComplexMatrix::from_fn(n, n, |r, c| w[(r, order[c])]))
}

/// Dilation of a square Schrödinger channel with ancilla dimension `d²`.
pub fn stinespring_unitary(t: &KrausChannel) -> Result<UnitaryDilation> {
    if t.picture() != Picture::Schroedinger {
        return Err(Error::WrongPicture("schroedinger"));
    }
    if !t.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "square channel required, got {} -> {}",
            t.dim_in(),
            t.dim_out()
        )));
    }
    require_accepted(t)?;
    let d = t.dim_in();
    let kt = d * d;
    let unitary = dilation_unitary(&padded_kraus(t)?, d)?;
    Ok(UnitaryDilation {
        unitary,
        ancilla_dim: kt,
        omega: DensityMatrix::basis_state(kt, 0),
        shape: FactorShape::new(vec![d, kt])?,
    })
}

/// Dilation of a Heisenberg channel `S`, built from its pre-dual `T` with
/// `T* = S`; reconstruct with [`UnitaryDilation::apply_heisenberg`].
pub fn heisenberg_dilation(s: &KrausChannel) -> Result<UnitaryDilation> {
    if s.picture() != Picture::Heisenberg {
        return Err(Error::WrongPicture("heisenberg"));
    }
    stinespring_unitary(&dual(s))
}

/// Dilation of a rectangular channel `T : B(H) → B(G)` on `H ⊗ G ⊗ K`:
/// `T(A) = (tr_H ∘ tr_K)(U (A ⊗ ω_G ⊗ ω_K) U†)`.
///
/// `U` dilates the square channel `X(Y) = ω_H ⊗ T(tr_G Y)` on `H ⊗ G`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralDilation {
    unitary: ComplexMatrix,
    omega_g: DensityMatrix,
    omega_k: DensityMatrix,
    shape: FactorShape,
}

impl GeneralDilation {
    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn omega_g(&self) -> &DensityMatrix {
        &self.omega_g
    }

    pub fn omega_k(&self) -> &DensityMatrix {
        &self.omega_k
    }

    /// `[dim H, dim G, dim K]`.
    pub fn shape(&self) -> &FactorShape {
        &self.shape
    }

    /// `(tr_H ∘ tr_K)(U (A ⊗ ω_G ⊗ ω_K) U†)`.
    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        let dh = self.shape.dims()[0];
        if a.rows() != dh || a.cols() != dh {
            return Err(Error::DimensionMismatch(format!(
                "expected a {dh}x{dh} operator, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let ancillas = embed_state(self.omega_g.matrix(), &self.omega_k);
        let big = crate::tensor::kron(a, &ancillas);
        let evolved = self.unitary.matmul(&big).matmul(&self.unitary.adjoint());
        partial_trace_factor(&evolved, &self.shape, &[1])
    }

    /// Largest trace-norm deviation from `t` over the matrix units of `B(H)`.
    pub fn reconstruction_residual(&self, t: &KrausChannel) -> Result<f64> {
        let dh = self.shape.dims()[0];
        let mut worst: f64 = 0.0;
        for i in 0..dh {
            for j in 0..dh {
                let e = ComplexMatrix::unit(dh, dh, i, j);
                worst = worst.max(trace_norm(&(&self.apply(&e)? - &t.apply(&e)?)));
            }
        }
        Ok(worst)
    }
}

/// The square channel `X(Y) = ω_H ⊗ T(tr_G Y)` on `H ⊗ G` with
/// `ω_H = |e_0⟩⟨e_0|`. Its Kraus operators are
/// `X_{g,i}[(a,b),(c,e)] = δ_{a0} K_i[b,c] δ_{eg}`.
pub fn general_auxiliary_channel(t: &KrausChannel) -> Result<KrausChannel> {
    let (dh, dg) = (t.dim_in(), t.dim_out());
    let n = dh * dg;
    let mut kraus = Vec::with_capacity(dg * t.kraus().len());
    for g in 0..dg {
        for k in t.kraus() {
            let mut x = ComplexMatrix::zeros(n, n);
            for b in 0..dg {
                for c in 0..dh {
                    x[(b, c * dg + g)] = k[(b, c)];
                }
            }
            kraus.push(x);
        }
    }
    KrausChannel::new(n, n, kraus, Picture::Schroedinger)
}

/// Dilation of a rectangular Schrödinger channel via the auxiliary square
/// channel [`general_auxiliary_channel`].
pub fn general_stinespring(t: &KrausChannel) -> Result<GeneralDilation> {
    if t.picture() != Picture::Schroedinger {
        return Err(Error::WrongPicture("schroedinger"));
    }
    require_accepted(t)?;
    let x = general_auxiliary_channel(t)?;
    let inner = stinespring_unitary(&x)?;
    let (dh, dg) = (t.dim_in(), t.dim_out());
    Ok(GeneralDilation {
        unitary: inner.unitary,
        omega_g: DensityMatrix::basis_state(dg, 0),
        omega_k: inner.omega,
        shape: FactorShape::new(vec![dh, dg, inner.ancilla_dim])?,
    })
}

/// Residuals of the dilation axioms for `E = tr_K`, `J = i_ω`, `E* = i_K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomCheck {
    /// `max ‖E(J(E_ij)) - E_ij‖₁` over matrix units.
    pub expectation_after_injection: f64,
    /// `max ‖E(E*(B) A) - B E(A)‖₁` over random samples.
    pub module_property: f64,
    /// `max ‖tr_K(X (A ⊗ id)) - tr_K(X) A‖₁` over random samples.
    pub right_module_property: f64,
}

/// Evaluates the dilation axioms on `H ⊗ K` with `dim H = dim`, ancilla
/// state `omega` and `samples` random operator pairs drawn from `seed`.
pub fn check_dilation_axioms(
    dim: usize,
    omega: &DensityMatrix,
    samples: usize,
    seed: u64,
) -> Result<AxiomCheck> {
    let dk = omega.dim();
    let shape = FactorShape::new(vec![dim, dk])?;
    let e = |x: &ComplexMatrix| partial_trace_factor(x, &shape, &[0]);
    let mut ej: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let u = ComplexMatrix::unit(dim, dim, i, j);
            ej = ej.max(trace_norm(&(&e(&embed_state(&u, omega))? - &u)));
        }
    }
    let mut rng = rng_from_seed(seed);
    let (mut left, mut right): (f64, f64) = (0.0, 0.0);
    for _ in 0..samples {
        let big = gaussian_matrix(dim * dk, dim * dk, &mut rng);
        let small = gaussian_matrix(dim, dim, &mut rng);
        let lifted = embed_identity(&small, dk);
        let ea = e(&big)?;
        left = left.max(trace_norm(
            &(&e(&lifted.matmul(&big))? - &small.matmul(&ea)),
        ));
        right = right.max(trace_norm(
            &(&e(&big.matmul(&lifted))? - &ea.matmul(&small)),
        ));
    }
    Ok(AxiomCheck {
        expectation_after_injection: ej,
        module_property: left,
        right_module_property: right,
    })
}
