//! Cyclic channels (`T^m = T` for some `m ≥ 2`) and their finite dilation.
//!
//! Powers reduce through `ν(m, n) = (n - 1) mod (m - 1) + 1` and
//! `μ(m, n) = (n - ν) / (m - 1)`, so `T^n = T^{ν(m,n)}`. The dilation lives on
//! `H ⊗ K̃ ⊗ C^m`: cell `i - 1` carries `U_i U_{i-1}†` for `i = 1..=m` with
//! `U_0 = U_m = id`, the shift moves cell `s` to `s + 1 (mod m)`, and the
//! ancilla starts in cell `m - 1`. A full turn of `m` steps returns to the
//! identity, which gives
//! `T^n(A) = tr_K(V^{n+μ} (A ⊗ ω) V†^{n+μ})` for every `n ≥ 1`.

use crate::channel::{compose, superoperator_matrix, KrausChannel, Picture};
use crate::error::{Error, Result};
use crate::evolution::{check_size, check_unitary, reduce, Layout};
use crate::par;
use crate::report::{Residual, VerificationReport};
use crate::semigroup::{basis_residual, BuildOptions, CONSTRUCTION_TOL};
use crate::state::DensityMatrix;
use crate::stinespring::stinespring_unitary;
use crate::tensor::{ComplexMatrix, FactorShape};

/// Default Frobenius tolerance of `‖M(T^m) - M(T)‖` for cycle detection.
pub const CYCLE_TOL: f64 = 1e-8;

// Exponents up to this are propagated step by step; larger ones use
// repeated squaring of `V`.
const STEPWISE_LIMIT: usize = 1024;

fn check_domain(m: usize, n: usize) -> Result<()> {
    if m < 2 || n < 1 {
        return Err(Error::InvalidArgument(format!(
            "need m >= 2 and n >= 1, got m = {m}, n = {n}"
        )));
    }
    Ok(())
}

/// `ν(m, n) = (n - 1) mod (m - 1) + 1`, in `1..=m-1`.
pub fn nu(m: usize, n: usize) -> Result<usize> {
    check_domain(m, n)?;
    Ok((n - 1) % (m - 1) + 1)
}

/// `μ(m, n) = (n - ν(m, n)) / (m - 1)`; `n = ν + μ (m - 1)` exactly.
pub fn mu(m: usize, n: usize) -> Result<usize> {
    Ok((n - nu(m, n)?) / (m - 1))
}

/// A period `m ≥ 2` with `T^m = T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CyclePeriod(usize);

impl CyclePeriod {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!(
                "cycle period must be >= 2, got {m}"
            )));
        }
        Ok(Self(m))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `‖M(T^m) - M(T)‖_F`.
    pub fn deviation(self, t: &KrausChannel) -> Result<f64> {
        let m = superoperator_matrix(t).matrix;
        Ok(m.pow(self.0).distance(&m))
    }
}

/// Smallest `m` in `2..=m_max` with `‖M(T^m) - M(T)‖_F ≤ tol`.
pub fn detect_cycle(t: &KrausChannel, m_max: usize, tol: f64) -> Result<Option<CyclePeriod>> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch(
            "cycle detection needs a square channel".into(),
        ));
    }
    let m = superoperator_matrix(t).matrix;
    let mut p = m.clone();
    for period in 2..=m_max {
        p = p.matmul(&m);
        if p.distance(&m) <= tol {
            return Ok(Some(CyclePeriod(period)));
        }
    }
    Ok(None)
}

/// The exponent `ν(m, n)` with `T^n = T^ν`.
pub fn reduce_power(m: CyclePeriod, n: usize) -> Result<usize> {
    nu(m.0, n)
}

/// Dilation of a cyclic channel on `H ⊗ K̃ ⊗ C^m`, valid for every `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicDilationBundle {
    layout: Layout,
    v: ComplexMatrix,
    omega: DensityMatrix,
    shape: FactorShape,
}

impl CyclicDilationBundle {
    /// Assembles a bundle from a stored unitary; `ω = |e_0⟩⟨e_0| ⊗ |e_{m-1}⟩⟨e_{m-1}|`.
    pub fn from_parts(d: usize, ktilde: usize, m: usize, v: ComplexMatrix) -> Result<Self> {
        if d == 0 || ktilde == 0 || m < 2 {
            return Err(Error::InvalidShape(format!(
                "invalid cyclic shape [{d}, {ktilde}, {m}]"
            )));
        }
        let layout = Layout {
            d,
            ktilde,
            cells: m,
        };
        if v.rows() != layout.total() || v.cols() != layout.total() {
            return Err(Error::InvalidShape(format!(
                "V is {}x{} but shape [{d}, {ktilde}, {m}] needs {}",
                v.rows(),
                v.cols(),
                layout.total()
            )));
        }
        check_unitary(&v, "V")?;
        Ok(Self {
            layout,
            v,
            omega: DensityMatrix::basis_state(ktilde * m, m - 1),
            shape: FactorShape::new(vec![d, ktilde, m])?,
        })
    }

    pub fn d(&self) -> usize {
        self.layout.d
    }

    pub fn ktilde(&self) -> usize {
        self.layout.ktilde
    }

    pub fn period(&self) -> usize {
        self.layout.cells
    }

    pub fn v(&self) -> &ComplexMatrix {
        &self.v
    }

    pub fn omega(&self) -> &DensityMatrix {
        &self.omega
    }

    /// `[d, k̃, m]`.
    pub fn shape(&self) -> &FactorShape {
        &self.shape
    }

    /// Exponent of `V` used for `T^n`: `0` for `n = 0`, else `n + μ(m, n)`.
    pub fn exponent(&self, n: usize) -> usize {
        if n == 0 {
            0
        } else {
            n + mu(self.period(), n).expect("period >= 2 and n >= 1")
        }
    }

    /// The isometry `x ↦ V^e (x ⊗ e_0 ⊗ e_{m-1})`.
    pub fn propagated_embedding(&self, exponent: usize) -> ComplexMatrix {
        let start = self.layout.start_embedding(self.period() - 1);
        if exponent > STEPWISE_LIMIT {
            return self.v.pow(exponent).matmul(&start);
        }
        (0..exponent).fold(start, |psi, _| self.v.matmul(&psi))
    }

    /// Full dilated state `V^e (ρ ⊗ ω) V†^e` with `e` the exponent for `n`.
    pub fn dilated_state(&self, rho: &DensityMatrix, n: usize) -> Result<ComplexMatrix> {
        self.check_state(rho)?;
        let psi = self.propagated_embedding(self.exponent(n));
        Ok(psi.matmul(rho.matrix()).matmul(&psi.adjoint()))
    }

    /// Marginal of the dilated state on `C^m`.
    pub fn shift_marginal(&self, rho: &DensityMatrix, n: usize) -> Result<ComplexMatrix> {
        self.check_state(rho)?;
        let psi = self.propagated_embedding(self.exponent(n));
        Ok(self.layout.cell_marginal(&psi, rho.matrix()))
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

/// Builds the cyclic dilation with default options.
pub fn build_cyclic_dilation(t: &KrausChannel, m: CyclePeriod) -> Result<CyclicDilationBundle> {
    build_cyclic_dilation_with(t, m, BuildOptions::default())
}

/// Builds the cyclic dilation; fails with [`Error::NotCyclic`] unless
/// `‖M(T^m) - M(T)‖_F ≤ CYCLE_TOL`.
pub fn build_cyclic_dilation_with(
    t: &KrausChannel,
    m: CyclePeriod,
    options: BuildOptions,
) -> Result<CyclicDilationBundle> {
    if t.picture() != Picture::Schroedinger {
        return Err(Error::WrongPicture("schroedinger"));
    }
    if !t.is_square() {
        return Err(Error::DimensionMismatch(
            "cyclic dilation needs a square channel".into(),
        ));
    }
    let period = m.get();
    let d = t.dim_in();
    let layout = Layout {
        d,
        ktilde: d * d,
        cells: period,
    };
    check_size(layout.total(), options.max_dim)?;
    let deviation = m.deviation(t)?;
    if deviation.is_nan() || deviation > CYCLE_TOL {
        return Err(Error::NotCyclic { period, deviation });
    }

    // unitaries[i] = U_i for i = 0..=m, with U_0 = U_m = id.
    let mut unitaries: Vec<Option<ComplexMatrix>> = vec![None];
    let mut p = KrausChannel::identity(d);
    for _ in 1..period {
        p = compose(&p, t)?;
        unitaries.push(Some(stinespring_unitary(&p)?.unitary().clone()));
    }
    unitaries.push(None);
    let blocks: Vec<Option<ComplexMatrix>> = (1..=period)
        .map(|i| match (&unitaries[i], &unitaries[i - 1]) {
            (Some(cur), Some(prev)) => Some(cur.matmul(&prev.adjoint())),
            (Some(cur), None) => Some(cur.clone()),
            (None, Some(prev)) => Some(prev.adjoint()),
            (None, None) => None,
        })
        .collect();
    let shift: Vec<usize> = (0..period).map(|c| (c + 1) % period).collect();
    let v = layout
        .block_diagonal(&blocks)
        .matmul(&layout.cell_permutation(&shift));
    let bundle = CyclicDilationBundle::from_parts(d, layout.ktilde, period, v)?;

    // Two full turns: V^j sits on cell j - 1 with U_{j mod m}, or on the start
    // cell with the identity after whole turns.
    let mut psi = layout.start_embedding(period - 1);
    for j in 0..=2 * period {
        let r = j % period;
        let (cell, block) = if r == 0 {
            (period - 1, None)
        } else {
            (r - 1, unitaries[r].as_ref())
        };
        let dev = layout.support_deviation(&psi, block, cell);
        if dev > CONSTRUCTION_TOL {
            return Err(Error::ConstructionCheck(format!(
                "V^{j} departs from U_{r} on cell {cell} by {dev:.3e}"
            )));
        }
        psi = bundle.v.matmul(&psi);
    }
    Ok(bundle)
}

/// `T^n(ρ_0)` through the cyclic dilation; `n = 0` returns `ρ_0`.
pub fn evolve_cyclic(
    b: &CyclicDilationBundle,
    rho0: &DensityMatrix,
    n: usize,
) -> Result<DensityMatrix> {
    b.check_state(rho0)?;
    if n == 0 {
        return Ok(rho0.clone());
    }
    let psi = b.propagated_embedding(b.exponent(n));
    DensityMatrix::with_tolerance(reduce(&psi, rho0.matrix()), 1e-9)
}

/// Compares the bundle against superoperator powers of `t` on every matrix
/// unit for `n = 0..=n_max`.
pub fn verify_cyclic_dilation(
    b: &CyclicDilationBundle,
    t: &KrausChannel,
    n_max: usize,
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
    let m = superoperator_matrix(t).matrix;
    let mut powers = vec![ComplexMatrix::identity(d * d)];
    for _ in 0..n_max {
        let next = m.matmul(powers.last().expect("nonempty"));
        powers.push(next);
    }
    // Exponents are nondecreasing in n, so one walk along the orbit suffices.
    let mut embeddings = Vec::with_capacity(n_max + 1);
    let mut psi = b.layout.start_embedding(b.period() - 1);
    let mut at = 0;
    for n in 0..=n_max {
        let e = b.exponent(n);
        while at < e {
            psi = b.v.matmul(&psi);
            at += 1;
        }
        embeddings.push(psi.clone());
    }
    let residuals = par::map_range(n_max + 1, |n| Residual {
        label: format!("n={n}"),
        index: vec![n],
        value: basis_residual(&embeddings[n], &powers[n], d),
    });
    Ok(VerificationReport::new(tol, residuals))
}
