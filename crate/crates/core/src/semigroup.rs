//! One unitary dilating every power of a channel up to a horizon.
//!
//! On `H ⊗ K̃ ⊗ Z_L` with `L = N + 1`, `V = U W` where `W` shifts the cell
//! index `n ↦ n + 1 (mod L)` and `U` acts on cell `n` by `U_n U_{n-1}†`, with
//! `U_n` the single-channel dilation of `T^n` and `U_0 = id`. Starting from
//! `ω = ω̃ ⊗ |e_0⟩⟨e_0|`, the orbit reaches cell `n` after `n` steps, where the
//! telescoped product equals `U_n`. Hence
//! `T^n(A) = tr_{K̃ ⊗ Z_L}(V^n (A ⊗ ω) V†^n)` for `0 ≤ n ≤ N`.

use crate::channel::{compose, superoperator_matrix, KrausChannel, Picture};
use crate::error::{Error, Result};
use crate::evolution::{check_horizon, check_size, check_unitary, pull_back, reduce, Layout};
use crate::par;
use crate::report::{Residual, VerificationReport};
use crate::state::DensityMatrix;
use crate::stinespring::stinespring_unitary;
use crate::tensor::{trace_norm, ComplexMatrix, FactorShape};

/// Default ceiling on the dimension `d · d² · (N + 1)` of `V`.
pub const SEMIGROUP_MAX_DIM: usize = 4096;
/// Tolerance of the intermediate identity checked after construction.
pub const CONSTRUCTION_TOL: f64 = 1e-9;

/// Builder options.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Largest admissible dimension of the dilation unitary.
    pub max_dim: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            max_dim: SEMIGROUP_MAX_DIM,
        }
    }
}

/// Dilation of `T^0, …, T^N` on `H ⊗ K̃ ⊗ Z_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationBundle {
    layout: Layout,
    v: ComplexMatrix,
    omega: DensityMatrix,
    shape: FactorShape,
}

impl DilationBundle {
    /// Assembles a bundle from a stored unitary, validating shape and
    /// unitarity. `ω` is always `|e_0⟩⟨e_0| ⊗ |e_0⟩⟨e_0|`.
    pub fn from_parts(d: usize, ktilde: usize, shift_len: usize, v: ComplexMatrix) -> Result<Self> {
        if d == 0 || ktilde == 0 || shift_len < 2 {
            return Err(Error::InvalidShape(format!(
                "invalid bundle shape [{d}, {ktilde}, {shift_len}]"
            )));
        }
        let layout = Layout {
            d,
            ktilde,
            cells: shift_len,
        };
        if v.rows() != layout.total() || v.cols() != layout.total() {
            return Err(Error::InvalidShape(format!(
                "V is {}x{} but shape [{d}, {ktilde}, {shift_len}] needs {}",
                v.rows(),
                v.cols(),
                layout.total()
            )));
        }
        check_unitary(&v, "V")?;
        Ok(Self {
            layout,
            v,
            omega: DensityMatrix::basis_state(ktilde * shift_len, 0),
            shape: FactorShape::new(vec![d, ktilde, shift_len])?,
        })
    }

    pub fn d(&self) -> usize {
        self.layout.d
    }

    pub fn ktilde(&self) -> usize {
        self.layout.ktilde
    }

    /// Dimension `L` of the shift space.
    pub fn shift_len(&self) -> usize {
        self.layout.cells
    }

    /// Largest power `N = L - 1` the bundle reproduces.
    pub fn horizon(&self) -> usize {
        self.layout.cells - 1
    }

    pub fn v(&self) -> &ComplexMatrix {
        &self.v
    }

    /// Ancilla state on `K̃ ⊗ Z_L`.
    pub fn omega(&self) -> &DensityMatrix {
        &self.omega
    }

    /// `[d, k̃, L]`.
    pub fn shape(&self) -> &FactorShape {
        &self.shape
    }

    /// The isometry `x ↦ V^n (x ⊗ e_0 ⊗ e_0)`.
    pub fn propagated_embedding(&self, n: usize) -> Result<ComplexMatrix> {
        check_horizon(n, self.horizon())?;
        Ok(self.orbit(n).pop().expect("orbit is nonempty"))
    }

    /// Full dilated state `V^n (ρ ⊗ ω) V†^n` on `H ⊗ K̃ ⊗ Z_L`.
    pub fn dilated_state(&self, rho: &DensityMatrix, n: usize) -> Result<ComplexMatrix> {
        self.check_state(rho)?;
        let psi = self.propagated_embedding(n)?;
        Ok(psi.matmul(rho.matrix()).matmul(&psi.adjoint()))
    }

    /// Marginal of `V^n (ρ ⊗ ω) V†^n` on the shift space.
    pub fn shift_marginal(&self, rho: &DensityMatrix, n: usize) -> Result<ComplexMatrix> {
        self.check_state(rho)?;
        let psi = self.propagated_embedding(n)?;
        Ok(self.layout.cell_marginal(&psi, rho.matrix()))
    }

    // Embeddings V^j V_w for j = 0..=n.
    fn orbit(&self, n: usize) -> Vec<ComplexMatrix> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(self.layout.start_embedding(0));
        for _ in 0..n {
            let next = self.v.matmul(out.last().expect("nonempty"));
            out.push(next);
        }
        out
    }

    fn check_state(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.d() {
            return Err(Error::DimensionMismatch(format!(
                "state of dimension {} for a bundle on dimension {}",
                rho.dim(),
                self.d()
            )));
        }
        Ok(())
    }
}

/// Builds the dilation of `T^0, …, T^N` with default options.
pub fn build_semigroup_dilation(t: &KrausChannel, n: usize) -> Result<DilationBundle> {
    build_semigroup_dilation_with(t, n, BuildOptions::default())
}

/// Builds the dilation of `T^0, …, T^N`.
pub fn build_semigroup_dilation_with(
    t: &KrausChannel,
    n: usize,
    options: BuildOptions,
) -> Result<DilationBundle> {
    if t.picture() != Picture::Schroedinger {
        return Err(Error::WrongPicture("schroedinger"));
    }
    if !t.is_square() {
        return Err(Error::DimensionMismatch(
            "semigroup dilation needs a square channel".into(),
        ));
    }
    if n < 1 {
        return Err(Error::InvalidArgument(
            "horizon N must be at least 1".into(),
        ));
    }
    let d = t.dim_in();
    let layout = Layout {
        d,
        ktilde: d * d,
        cells: n + 1,
    };
    check_size(layout.total(), options.max_dim)?;

    // U_n for n = 1..=N; index 0 holds U_0 = id.
    let mut unitaries: Vec<Option<ComplexMatrix>> = vec![None];
    let mut p = KrausChannel::identity(d);
    for _ in 1..=n {
        p = compose(&p, t)?;
        unitaries.push(Some(stinespring_unitary(&p)?.unitary().clone()));
    }
    let mut blocks: Vec<Option<ComplexMatrix>> = vec![None];
    for m in 1..=n {
        let cur = unitaries[m].as_ref().expect("U_m exists for m >= 1");
        blocks.push(Some(match &unitaries[m - 1] {
            Some(prev) => cur.matmul(&prev.adjoint()),
            None => cur.clone(),
        }));
    }
    let shift: Vec<usize> = (0..=n).map(|c| (c + 1) % (n + 1)).collect();
    let v = layout
        .block_diagonal(&blocks)
        .matmul(&layout.cell_permutation(&shift));
    let bundle = DilationBundle::from_parts(d, layout.ktilde, n + 1, v)?;

    for (m, psi) in bundle.orbit(n).iter().enumerate() {
        let dev = layout.support_deviation(psi, unitaries[m].as_ref(), m);
        if dev > CONSTRUCTION_TOL {
            return Err(Error::ConstructionCheck(format!(
                "V^{m} departs from U_{m} on cell {m} by {dev:.3e}"
            )));
        }
    }
    Ok(bundle)
}

/// `tr_{K̃ ⊗ Z_L}(V^n (ρ_0 ⊗ ω) V†^n)` for `n ≤ horizon`.
pub fn evolve(b: &DilationBundle, rho0: &DensityMatrix, n: usize) -> Result<DensityMatrix> {
    b.check_state(rho0)?;
    let psi = b.propagated_embedding(n)?;
    DensityMatrix::with_tolerance(reduce(&psi, rho0.matrix()), 1e-9)
}

/// `tr_ω(V†^n (B ⊗ id) V^n)` for `n ≤ horizon`.
pub fn heisenberg_evolve(
    b: &DilationBundle,
    op: &ComplexMatrix,
    n: usize,
) -> Result<ComplexMatrix> {
    if op.rows() != b.d() || op.cols() != b.d() {
        return Err(Error::DimensionMismatch(format!(
            "expected a {0}x{0} observable, got {1}x{2}",
            b.d(),
            op.rows(),
            op.cols()
        )));
    }
    let psi = b.propagated_embedding(n)?;
    Ok(pull_back(&psi, op))
}

/// Compares the bundle against superoperator powers of `t` on every matrix
/// unit, for each `n` up to the horizon.
pub fn verify_dilation(
    b: &DilationBundle,
    t: &KrausChannel,
    tol: f64,
) -> Result<VerificationReport> {
    if t.picture() != Picture::Schroedinger || t.map_dims() != (b.d(), b.d()) {
        return Err(Error::DimensionMismatch(format!(
            "bundle acts on dimension {}, channel maps {:?} in the {} picture",
            b.d(),
            t.map_dims(),
            t.picture().name()
        )));
    }
    let d = b.d();
    let m = superoperator_matrix(t);
    let mut powers = vec![ComplexMatrix::identity(d * d)];
    for _ in 0..b.horizon() {
        let next = m.matrix.matmul(powers.last().expect("nonempty"));
        powers.push(next);
    }
    let orbit = b.orbit(b.horizon());
    let residuals = par::map_range(orbit.len(), |n| Residual {
        label: format!("n={n}"),
        index: vec![n],
        value: basis_residual(&orbit[n], &powers[n], d),
    });
    Ok(VerificationReport::new(tol, residuals))
}

/// Largest `‖M(E_ij) - tr_K(Ψ E_ij Ψ†)‖₁` over the matrix units of `B(C^d)`.
pub(crate) fn basis_residual(psi: &ComplexMatrix, superop: &ComplexMatrix, d: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let e = ComplexMatrix::unit(d, d, i, j);
            // Column-major vec(E_ij) is the unit vector at j·d + i.
            let col = j * d + i;
            let want = ComplexMatrix::from_fn(d, d, |r, c| superop[(c * d + r, col)]);
            let got = reduce(psi, &e);
            let r = trace_norm(&(&got - &want));
            worst = if r.is_nan() { f64::NAN } else { worst.max(r) };
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{dual, power, random_channel};
    use crate::library;
    use crate::random::{gaussian_matrix, haar_unitary, random_state, rng_from_seed};
    use crate::tensor::{embed_state, partial_trace_factor, trace};

    #[test]
    fn identity_channel_is_exact() {
        let b = build_semigroup_dilation(&KrausChannel::identity(2), 4).unwrap();
        assert_eq!(b.shape().dims(), &[2, 4, 5]);
        let rho = random_state(2, &mut rng_from_seed(1));
        for n in 0..=4 {
            assert!(evolve(&b, &rho, n).unwrap().matrix().distance(rho.matrix()) < 1e-13);
        }
    }

    #[test]
    fn unitary_conjugation_powers() {
        let mut rng = rng_from_seed(2);
        let u = haar_unitary(2, &mut rng);
        let t = KrausChannel::unitary(u.clone()).unwrap();
        let b = build_semigroup_dilation(&t, 5).unwrap();
        let rho = random_state(2, &mut rng);
        for n in 0..=5 {
            let un = u.pow(n);
            let want = un.matmul(rho.matrix()).matmul(&un.adjoint());
            assert!(evolve(&b, &rho, n).unwrap().matrix().distance(&want) < 1e-12);
        }
    }

    #[test]
    fn damping_six_steps_pass() {
        let t = library::amplitude_damping(0.5).unwrap();
        let b = build_semigroup_dilation(&t, 6).unwrap();
        assert_eq!(b.v().rows(), 56);
        let report = verify_dilation(&b, &t, 1e-9).unwrap();
        assert!(report.pass(), "max residual {}", report.max_residual());
        assert_eq!(report.residuals.len(), 7);
    }

    #[test]
    fn random_qutrit_five_steps() {
        let t = random_channel(3, 3, 4).unwrap();
        let b = build_semigroup_dilation(&t, 5).unwrap();
        let rho = random_state(3, &mut rng_from_seed(5));
        let want = power(&t, 5).unwrap().apply_state(&rho).unwrap();
        assert!(evolve(&b, &rho, 5).unwrap().trace_distance(&want) <= 1e-9);
    }

    #[test]
    fn efficient_route_matches_dense_partial_trace() {
        let t = random_channel(2, 2, 6).unwrap();
        let b = build_semigroup_dilation(&t, 3).unwrap();
        let rho = random_state(2, &mut rng_from_seed(7));
        let big = embed_state(rho.matrix(), b.omega());
        for n in 0..=3 {
            let vn = b.v().pow(n);
            let dense = vn.matmul(&big).matmul(&vn.adjoint());
            let reduced = partial_trace_factor(&dense, b.shape(), &[0]).unwrap();
            assert!(evolve(&b, &rho, n).unwrap().matrix().distance(&reduced) < 1e-12);
        }
    }

    #[test]
    fn v_factors_as_block_times_shift() {
        let t = library::amplitude_damping(0.3).unwrap();
        let b = build_semigroup_dilation(&t, 2).unwrap();
        let layout = Layout {
            d: 2,
            ktilde: 4,
            cells: 3,
        };
        let w = layout.cell_permutation(&[1, 2, 0]);
        // V W† is block diagonal over cells.
        let u = b.v().matmul(&w.adjoint());
        for r in 0..u.rows() {
            for c in 0..u.cols() {
                if r % 3 != c % 3 {
                    assert_eq!(u[(r, c)], crate::tensor::ZERO);
                }
            }
        }
    }

    #[test]
    fn shift_marginal_sits_on_cell_n() {
        let t = random_channel(2, 3, 8).unwrap();
        let b = build_semigroup_dilation(&t, 4).unwrap();
        let rho = random_state(2, &mut rng_from_seed(9));
        for n in 0..=4 {
            let marg = b.shift_marginal(&rho, n).unwrap();
            let want = ComplexMatrix::unit(5, 5, n, n);
            assert!(marg.distance(&want) <= 1e-9);
        }
    }

    #[test]
    fn beyond_horizon_is_an_error() {
        let b = build_semigroup_dilation(&KrausChannel::identity(2), 2).unwrap();
        let rho = DensityMatrix::basis_state(2, 0);
        assert_eq!(
            evolve(&b, &rho, 3).unwrap_err(),
            Error::HorizonExceeded {
                requested: 3,
                horizon: 2
            }
        );
        let id = ComplexMatrix::identity(2);
        assert!(heisenberg_evolve(&b, &id, 3).is_err());
    }

    #[test]
    fn identity_v_fails_verification() {
        let t = library::amplitude_damping(0.5).unwrap();
        let b = DilationBundle::from_parts(2, 4, 4, ComplexMatrix::identity(32)).unwrap();
        let report = verify_dilation(&b, &t, 1e-9).unwrap();
        assert!(!report.pass());
        assert!(report.residuals[0].value <= 1e-12);
        assert!(report.failures().all(|r| r.index[0] >= 1));
    }

    #[test]
    fn heisenberg_matches_dual_powers_and_is_unital() {
        let mut rng = rng_from_seed(10);
        let t = random_channel(2, 2, 11).unwrap();
        let s = dual(&t);
        let b = build_semigroup_dilation(&t, 5).unwrap();
        let id = ComplexMatrix::identity(2);
        let op = gaussian_matrix(2, 2, &mut rng);
        for n in 0..=5 {
            assert!(heisenberg_evolve(&b, &id, n).unwrap().distance(&id) <= 1e-10);
            let want = power(&s, n).unwrap().apply(&op).unwrap();
            assert!(heisenberg_evolve(&b, &op, n).unwrap().distance(&want) <= 1e-9);
        }
    }

    #[test]
    fn duality_through_the_dilation() {
        let mut rng = rng_from_seed(12);
        let t = random_channel(3, 2, 13).unwrap();
        let b = build_semigroup_dilation(&t, 3).unwrap();
        for _ in 0..5 {
            let rho = random_state(3, &mut rng);
            let op = gaussian_matrix(3, 3, &mut rng);
            for n in 0..=3 {
                let lhs = trace(&op.matmul(evolve(&b, &rho, n).unwrap().matrix())).unwrap();
                let rhs =
                    trace(&heisenberg_evolve(&b, &op, n).unwrap().matmul(rho.matrix())).unwrap();
                assert!((lhs - rhs).norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn trace_is_preserved() {
        let t = random_channel(2, 4, 14).unwrap();
        let b = build_semigroup_dilation(&t, 6).unwrap();
        let rho = random_state(2, &mut rng_from_seed(15));
        for n in 0..=6 {
            let out = evolve(&b, &rho, n).unwrap();
            assert!((trace(out.matrix()).unwrap().re - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn guards_and_preconditions() {
        let t = KrausChannel::identity(2);
        assert!(matches!(
            build_semigroup_dilation(&t, 0),
            Err(Error::InvalidArgument(_))
        ));
        // 2 · 4 · 513 > 4096
        assert_eq!(
            build_semigroup_dilation(&t, 512).unwrap_err(),
            Error::ResourceLimit {
                size: 4104,
                limit: 4096
            }
        );
        let small = BuildOptions { max_dim: 16 };
        assert!(build_semigroup_dilation_with(&t, 2, small).is_err());
        assert!(matches!(
            build_semigroup_dilation(&library::transpose_map(2), 2),
            Err(Error::ChannelRejected(_))
        ));
    }

    #[test]
    fn verify_rejects_mismatched_dimension() {
        let b = build_semigroup_dilation(&KrausChannel::identity(2), 2).unwrap();
        assert!(matches!(
            verify_dilation(&b, &KrausChannel::identity(3), 1e-9),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn from_parts_rejects_non_unitary() {
        let mut v = ComplexMatrix::identity(24);
        v[(0, 0)] = crate::tensor::C64::new(2.0, 0.0);
        assert!(DilationBundle::from_parts(2, 4, 3, v).is_err());
        assert!(DilationBundle::from_parts(2, 4, 3, ComplexMatrix::identity(25)).is_err());
    }
}
