//! Dense complex linear algebra on row-major matrices.
//!
//! Tensor factors are ordered big-endian throughout the crate: for a space
//! `A ⊗ B ⊗ C` the basis index is `(a * dim_b + b) * dim_c + c`, so the
//! leftmost factor varies slowest. [`kron`], the partial traces and every
//! embedding use this single convention.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;
use crate::state::DensityMatrix;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Default absolute tolerance for Hermiticity (Frobenius norm of `A - A†`).
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Default tolerance on the smallest eigenvalue of a PSD matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Maximum `‖V†V - I‖_F` accepted as an isometry.
pub const ISOMETRY_TOL: f64 = 1e-10;
/// Residual norm below which a candidate basis vector is skipped when
/// completing an isometry.
pub const COMPLETION_SKIP_TOL: f64 = 1e-8;

// Products below this many scalar multiply-adds stay on the calling thread.
const PAR_MATMUL_WORK: usize = 1 << 16;

/// Dense complex matrix with row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    /// Builds a real matrix from nested rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let nested: Vec<Vec<C64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&nested)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { ONE } else { ZERO })
    }

    /// Diagonal matrix with the given entries.
    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |r, c| if r == c { entries[r] } else { ZERO })
    }

    /// Matrix unit `E_ij = e_i e_j†`.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m[(i, j)] = ONE;
        m
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("columns of unequal length".into()));
        }
        Self::new(
            rows,
            cols,
            (0..rows * cols)
                .map(|k| columns[k % cols][k / cols])
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    /// Contiguous block of rows `start..start + count`.
    pub fn row_block(&self, start: usize, count: usize) -> ComplexMatrix {
        Self::from_raw(
            count,
            self.cols,
            self.data[start * self.cols..(start + count) * self.cols].to_vec(),
        )
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self::from_raw(
            self.rows,
            self.cols,
            self.data.iter().map(|z| z.conj()).collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_raw(
            self.rows,
            self.cols,
            self.data.iter().map(|z| z * s).collect(),
        )
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance to `other`.
    pub fn distance(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖A - A†‖_F`; infinite for non-square input.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut acc = 0.0;
        for r in 0..n {
            for c in 0..n {
                acc += (self[(r, c)] - self[(c, r)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// `‖A†A - I‖_F`.
    pub fn isometry_deviation(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .distance(&Self::identity(self.cols))
    }

    /// Unitarity deviation `max(‖U†U - I‖_F, ‖UU† - I‖_F)`; infinite for non-square.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let id = Self::identity(self.rows);
        let a = self.adjoint();
        a.matmul(self)
            .distance(&id)
            .max(self.matmul(&a).distance(&id))
    }

    /// Matrix product. Panics on incompatible shapes.
    pub fn matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let n = rhs.cols;
        let inner = self.cols;
        let mut out = vec![ZERO; self.rows * n];
        let kernel = |i: usize, row: &mut [C64]| {
            for k in 0..inner {
                let aik = self.data[i * inner + k];
                if aik == ZERO {
                    continue;
                }
                let brow = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in row.iter_mut().zip(brow) {
                    *o += aik * b;
                }
            }
        };
        if self.rows * inner * n >= PAR_MATMUL_WORK {
            par::for_each_chunk_mut(&mut out, n, kernel);
        } else {
            out.chunks_mut(n)
                .enumerate()
                .for_each(|(i, row)| kernel(i, row));
        }
        ComplexMatrix::from_raw(self.rows, n, out)
    }

    /// Matrix-vector product. Panics on incompatible shapes.
    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self^n` by repeated squaring. Panics on non-square input.
    pub fn pow(&self, mut n: usize) -> ComplexMatrix {
        assert!(self.is_square(), "pow of non-square matrix");
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.matmul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    /// Eigen-decomposition of the Hermitian part `(A + A†)/2`.
    ///
    /// Eigenvalues are returned in ascending order; eigenvectors are the
    /// matching columns of the returned matrix.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let m = self.to_nalgebra();
        let herm = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(herm);
        let mut order: Vec<usize> = (0..self.rows).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = Self::from_fn(self.rows, self.rows, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok((values, vectors))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let m = self.to_nalgebra();
        let herm = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let mut values: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        Ok(values)
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self
            .to_nalgebra()
            .singular_values()
            .iter()
            .copied()
            .collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "add shape mismatch"
        );
        ComplexMatrix::from_raw(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "sub shape mismatch"
        );
        ComplexMatrix::from_raw(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

/// Ordered tensor-factor dimensions of a composite space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorShape {
    dims: Vec<usize>,
}

impl FactorShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidShape(format!(
                "factor dimensions must be a nonempty list of positive integers, got {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    /// Product of all factor dimensions.
    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    fn check_square(&self, a: &ComplexMatrix) -> Result<()> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows,
                cols: a.cols,
            });
        }
        if self.total() != a.rows {
            return Err(Error::InvalidShape(format!(
                "shape {:?} spans dimension {} but matrix is {}x{}",
                self.dims,
                self.total(),
                a.rows,
                a.cols
            )));
        }
        Ok(())
    }

    // Offsets into the full index for every multi-index over `factors`.
    fn offsets(&self, factors: &[usize]) -> Vec<usize> {
        let mut strides = vec![1usize; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        let mut offsets = vec![0usize];
        for &f in factors {
            let mut next = Vec::with_capacity(offsets.len() * self.dims[f]);
            for &o in &offsets {
                for digit in 0..self.dims[f] {
                    next.push(o + digit * strides[f]);
                }
            }
            offsets = next;
        }
        offsets
    }
}

/// Sum of diagonal entries.
pub fn trace(a: &ComplexMatrix) -> Result<C64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    Ok((0..a.rows).map(|i| a[(i, i)]).sum())
}

/// Trace norm: the sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    a.singular_values().iter().sum()
}

/// Kronecker product; the first argument is the outer (slow) factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    ComplexMatrix::from_fn(rows, cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    })
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut iter = factors.iter();
    let first = (*iter.next().expect("kron_all of empty list")).clone();
    iter.fold(first, |acc, m| kron(&acc, m))
}

/// Kronecker product of vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Standard basis vector `e_i` of length `dim`.
pub fn basis_vector(dim: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[i] = ONE;
    v
}

/// Partial trace over every factor not listed in `keep`.
///
/// `keep` must be a nonempty proper subset of factor indices. Kept factors
/// appear in the result in their original order.
pub fn partial_trace_factor(
    a: &ComplexMatrix,
    shape: &FactorShape,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    shape.check_square(a)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() == shape.num_factors() {
        return Err(Error::InvalidShape(format!(
            "keep set {keep:?} must be a nonempty proper subset of {} factors",
            shape.num_factors()
        )));
    }
    if let Some(&bad) = kept.iter().find(|&&k| k >= shape.num_factors()) {
        return Err(Error::InvalidShape(format!(
            "factor index {bad} out of range"
        )));
    }
    let traced: Vec<usize> = (0..shape.num_factors())
        .filter(|i| !kept.contains(i))
        .collect();
    let keep_off = shape.offsets(&kept);
    let trace_off = shape.offsets(&traced);
    let n = keep_off.len();
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        trace_off
            .iter()
            .map(|&t| a[(keep_off[r] + t, keep_off[c] + t)])
            .sum()
    }))
}

/// Partial trace with respect to a state `ω` on the second factor of `H ⊗ K`.
///
/// Returns the unique `X` with `tr(X A) = tr(B (A ⊗ ω))` for every `A`, i.e.
/// `X[h, h'] = Σ_{k,k'} B[(h,k),(h',k')] ω[k',k]`.
pub fn partial_trace_state(
    b: &ComplexMatrix,
    shape: &FactorShape,
    omega: &DensityMatrix,
) -> Result<ComplexMatrix> {
    if shape.num_factors() != 2 {
        return Err(Error::InvalidShape(format!(
            "state partial trace expects a two-factor shape, got {:?}",
            shape.dims()
        )));
    }
    shape.check_square(b)?;
    let (dh, dk) = (shape.dims[0], shape.dims[1]);
    if omega.dim() != dk {
        return Err(Error::DimensionMismatch(format!(
            "state has dimension {} but the traced factor has dimension {dk}",
            omega.dim()
        )));
    }
    let w = omega.matrix();
    Ok(ComplexMatrix::from_fn(dh, dh, |h, hp| {
        let mut acc = ZERO;
        for k in 0..dk {
            for kp in 0..dk {
                let wv = w[(kp, k)];
                if wv != ZERO {
                    acc += b[(h * dk + k, hp * dk + kp)] * wv;
                }
            }
        }
        acc
    }))
}

/// Isometric embedding `V_y : x ↦ x ⊗ y` as a `(dim * |y|) × dim` matrix.
pub fn product_isometry(dim: usize, y: &[C64]) -> ComplexMatrix {
    let dk = y.len();
    let mut m = ComplexMatrix::zeros(dim * dk, dim);
    for x in 0..dim {
        for (k, &yk) in y.iter().enumerate() {
            m[(x * dk + k, x)] = yk;
        }
    }
    m
}

/// `A ↦ A ⊗ ω` (the injection `i_ω`).
pub fn embed_state(a: &ComplexMatrix, omega: &DensityMatrix) -> ComplexMatrix {
    kron(a, omega.matrix())
}

/// `B ↦ B ⊗ id_K` (the injection `i_K`).
pub fn embed_identity(b: &ComplexMatrix, ancilla_dim: usize) -> ComplexMatrix {
    kron(b, &ComplexMatrix::identity(ancilla_dim))
}

/// Hermitian PSD test: Hermitian within `tol` and minimum eigenvalue `>= -tol`.
pub fn is_psd(a: &ComplexMatrix, tol: f64) -> bool {
    if !a.is_hermitian(tol) {
        return false;
    }
    match a.hermitian_eigenvalues() {
        Ok(values) => values.first().is_none_or(|&min| min >= -tol),
        Err(_) => false,
    }
}

fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn project_out(v: &mut [C64], basis: &[Vec<C64>]) {
    for q in basis {
        let c = inner(q, v);
        for (x, qi) in v.iter_mut().zip(q) {
            *x -= c * qi;
        }
    }
}

/// Extends an isometry to a square unitary.
///
/// The input columns are copied verbatim into the first `cols` columns.
/// Standard basis vectors are then tried in index order: each is projected
/// against the current orthonormal set, skipped if the residual norm falls
/// below [`COMPLETION_SKIP_TOL`], and otherwise re-orthogonalized once more
/// and normalized.
pub fn complete_isometry_to_unitary(v: &ComplexMatrix) -> Result<ComplexMatrix> {
    if v.cols > v.rows {
        return Err(Error::InvalidShape(format!(
            "isometry must have cols <= rows, got {}x{}",
            v.rows, v.cols
        )));
    }
    let deviation = v.isometry_deviation();
    if deviation > ISOMETRY_TOL {
        return Err(Error::NotIsometry { deviation });
    }
    let n = v.rows;
    let mut basis: Vec<Vec<C64>> = (0..v.cols).map(|c| v.column(c)).collect();
    for e in 0..n {
        if basis.len() == n {
            break;
        }
        let mut cand = basis_vector(n, e);
        project_out(&mut cand, &basis);
        if norm(&cand) < COMPLETION_SKIP_TOL {
            continue;
        }
        project_out(&mut cand, &basis);
        let nn = norm(&cand);
        cand.iter_mut().for_each(|x| *x /= nn);
        basis.push(cand);
    }
    debug_assert_eq!(basis.len(), n);
    let mut u = ComplexMatrix::from_columns(&basis)?;
    // Restore the input columns bit for bit.
    for c in 0..v.cols {
        for r in 0..n {
            u[(r, c)] = v[(r, c)];
        }
    }
    Ok(u)
}

/// Orthonormalizes the columns of `m` in order (modified Gram-Schmidt with
/// one re-orthogonalization pass).
pub fn orthonormalize_columns(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m.cols);
    for c in 0..m.cols {
        let mut v = m.column(c);
        project_out(&mut v, &basis);
        project_out(&mut v, &basis);
        let nv = norm(&v);
        if nv < 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "column {c} is linearly dependent"
            )));
        }
        v.iter_mut().for_each(|x| *x /= nv);
        basis.push(v);
    }
    ComplexMatrix::from_columns(&basis)
}
