//! Quantum channels as Kraus families.
//!
//! A [`KrausChannel`] stores operators `K_i` of shape `dim_out × dim_in`
//! together with a picture flag:
//!
//! * Schrödinger: `A ↦ Σ K_i A K_i†`, mapping `dim_in` to `dim_out` operators.
//! * Heisenberg: `B ↦ Σ K_i† B K_i`, mapping `dim_out` to `dim_in` operators.
//!
//! Switching the flag is exactly the passage to the dual map, so `dim_in` and
//! `dim_out` always describe the Schrödinger-picture pre-dual.
//!
//! Each operator carries a sign `±1` so that non-CP Hermiticity-preserving maps
//! such as the transpose can be represented and rejected by certification.
//! Channels built from genuine Kraus families have all signs `+1`.

use crate::error::{Error, Result};
use crate::random::{gaussian_matrix, rng_from_seed};
use crate::state::DensityMatrix;
use crate::tensor::{orthonormalize_columns, ComplexMatrix, C64};

/// Default tolerance for CPTP certification.
pub const CPTP_TOL: f64 = 1e-10;
/// Relative eigenvalue cutoff used when counting Choi rank.
pub const CHOI_RANK_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Picture {
    Schroedinger,
    Heisenberg,
}

impl Picture {
    pub fn flipped(self) -> Self {
        match self {
            Picture::Schroedinger => Picture::Heisenberg,
            Picture::Heisenberg => Picture::Schroedinger,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Picture::Schroedinger => "schroedinger",
            Picture::Heisenberg => "heisenberg",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
    signs: Vec<i8>,
    picture: Picture,
}

impl KrausChannel {
    pub fn new(
        dim_in: usize,
        dim_out: usize,
        kraus: Vec<ComplexMatrix>,
        picture: Picture,
    ) -> Result<Self> {
        let signs = vec![1; kraus.len()];
        Self::with_signs(dim_in, dim_out, kraus, signs, picture)
    }

    /// Operator sum `Σ s_i K_i (·) K_i†` with signs `s_i ∈ {+1, -1}`.
    pub fn with_signs(
        dim_in: usize,
        dim_out: usize,
        kraus: Vec<ComplexMatrix>,
        signs: Vec<i8>,
        picture: Picture,
    ) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidArgument(
                "channel dimensions must be positive".into(),
            ));
        }
        if kraus.is_empty() {
            return Err(Error::InvalidArgument("Kraus list must be nonempty".into()));
        }
        if signs.len() != kraus.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} signs for {} Kraus operators",
                signs.len(),
                kraus.len()
            )));
        }
        if let Some(s) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument(format!("sign {s} is not +1 or -1")));
        }
        for (i, k) in kraus.iter().enumerate() {
            if k.rows() != dim_out || k.cols() != dim_in {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {i} is {}x{}, expected {dim_out}x{dim_in}",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
            signs,
            picture,
        })
    }

    /// Unitary conjugation `Ad_U : A ↦ U A U†`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::NotSquare {
                rows: u.rows(),
                cols: u.cols(),
            });
        }
        let d = u.rows();
        Self::new(d, d, vec![u], Picture::Schroedinger)
    }

    pub fn identity(dim: usize) -> Self {
        Self::identity_in(dim, Picture::Schroedinger)
    }

    fn identity_in(dim: usize, picture: Picture) -> Self {
        Self {
            dim_in: dim,
            dim_out: dim,
            kraus: vec![ComplexMatrix::identity(dim)],
            signs: vec![1],
            picture,
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn picture(&self) -> Picture {
        self.picture
    }

    pub fn is_square(&self) -> bool {
        self.dim_in == self.dim_out
    }

    /// All signs are `+1`, i.e. a genuine Kraus family.
    pub fn is_kraus_form(&self) -> bool {
        self.signs.iter().all(|&s| s == 1)
    }

    /// (input, output) dimensions of the map in its own picture.
    pub fn map_dims(&self) -> (usize, usize) {
        match self.picture {
            Picture::Schroedinger => (self.dim_in, self.dim_out),
            Picture::Heisenberg => (self.dim_out, self.dim_in),
        }
    }

    fn terms(&self) -> impl Iterator<Item = (f64, &ComplexMatrix)> {
        self.signs.iter().map(|&s| f64::from(s)).zip(&self.kraus)
    }

    /// Applies the map in its own picture.
    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (din, dout) = self.map_dims();
        if a.rows() != din || a.cols() != din {
            return Err(Error::DimensionMismatch(format!(
                "map acts on {din}x{din} operators, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(dout, dout);
        for (s, k) in self.terms() {
            let term = match self.picture {
                Picture::Schroedinger => k.matmul(a).matmul(&k.adjoint()),
                Picture::Heisenberg => k.adjoint().matmul(a).matmul(k),
            };
            out = &out + &term.scale_real(s);
        }
        Ok(out)
    }

    /// Applies a Schrödinger channel to a state.
    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if self.picture != Picture::Schroedinger {
            return Err(Error::WrongPicture("schroedinger"));
        }
        DensityMatrix::new(self.apply(rho.matrix())?)
    }

    /// `Σ s_i K_i† K_i`: equals the identity iff the Schrödinger map is
    /// trace-preserving, equivalently iff the Heisenberg map is unital.
    pub fn kraus_sum(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for (s, k) in self.terms() {
            acc = &acc + &k.adjoint().matmul(k).scale_real(s);
        }
        acc
    }

    fn as_picture(&self, picture: Picture) -> Self {
        Self {
            picture,
            ..self.clone()
        }
    }
}

/// Choi matrix `Σ_ij T(E_ij) ⊗ E_ij` of the Schrödinger map.
///
/// Rows and columns are indexed `(a, i) = a * dim_in + i` with `a` the output
/// index, so the Choi vector of a Kraus operator is its row-major flattening.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    pub matrix: ComplexMatrix,
    pub dim_in: usize,
    pub dim_out: usize,
}

impl ChoiMatrix {
    /// Number of eigenvalues above `cutoff` times the largest one.
    pub fn rank(&self, cutoff: f64) -> Result<usize> {
        let values = self.matrix.hermitian_eigenvalues()?;
        let max = values.last().copied().unwrap_or(0.0).max(0.0);
        Ok(values.iter().filter(|&&v| v > cutoff * max).count())
    }
}

/// Matrix of a map acting on column-vectorized operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    pub matrix: ComplexMatrix,
    /// Dimension of the operators the map takes.
    pub dim_in: usize,
    /// Dimension of the operators the map returns.
    pub dim_out: usize,
}

/// Column-stacking vectorization: `vec(A)[j * rows + i] = A[i, j]`.
pub fn vectorize(a: &ComplexMatrix) -> Vec<C64> {
    (0..a.cols())
        .flat_map(|j| (0..a.rows()).map(move |i| a[(i, j)]))
        .collect()
}

/// Inverse of [`vectorize`] for a square result.
pub fn unvectorize(v: &[C64], dim: usize) -> ComplexMatrix {
    assert_eq!(v.len(), dim * dim, "vector length does not match dimension");
    ComplexMatrix::from_fn(dim, dim, |i, j| v[j * dim + i])
}

impl Superoperator {
    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.rows() != self.dim_in || a.cols() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "superoperator acts on {0}x{0} operators",
                self.dim_in
            )));
        }
        Ok(unvectorize(
            &self.matrix.matvec(&vectorize(a)),
            self.dim_out,
        ))
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Superoperator) -> Result<Superoperator> {
        if self.dim_in != other.dim_out {
            return Err(Error::DimensionMismatch("superoperator composition".into()));
        }
        Ok(Superoperator {
            matrix: self.matrix.matmul(&other.matrix),
            dim_in: other.dim_in,
            dim_out: self.dim_out,
        })
    }

    pub fn pow(&self, n: usize) -> Result<Superoperator> {
        if self.dim_in != self.dim_out {
            return Err(Error::DimensionMismatch(
                "power of rectangular superoperator".into(),
            ));
        }
        Ok(Superoperator {
            matrix: self.matrix.pow(n),
            ..self.clone()
        })
    }

    /// Frobenius distance between superoperator matrices.
    pub fn distance(&self, other: &Superoperator) -> f64 {
        self.matrix.distance(&other.matrix)
    }
}

/// Outcome of [`verify_cptp`].
#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    /// Choi matrix PSD within tolerance.
    pub cp: bool,
    /// Trace preservation (Schrödinger) or unitality (Heisenberg).
    pub tp_or_unital: bool,
    pub min_choi_eigenvalue: f64,
    /// `‖Σ s_i K_i† K_i - I‖_F`.
    pub kraus_sum_deviation: f64,
    pub max_violation: f64,
    pub tolerance: f64,
}

impl CertificationReport {
    pub fn accepted(&self) -> bool {
        self.cp && self.tp_or_unital
    }
}

fn choi_of_family(ch: &KrausChannel) -> ChoiMatrix {
    let n = ch.dim_in * ch.dim_out;
    let mut m = ComplexMatrix::zeros(n, n);
    for (s, k) in ch.terms() {
        let v = k.data();
        m = &m + &ComplexMatrix::outer(v, v).scale_real(s);
    }
    ChoiMatrix {
        matrix: m,
        dim_in: ch.dim_in,
        dim_out: ch.dim_out,
    }
}

/// Certifies complete positivity via the Choi matrix and trace preservation
/// (or unitality, for Heisenberg channels) via the Kraus sum.
pub fn verify_cptp(ch: &KrausChannel, tol: f64) -> Result<CertificationReport> {
    let choi = choi_of_family(ch);
    let min = choi.matrix.hermitian_eigenvalues()?[0];
    let dev = ch.kraus_sum().distance(&ComplexMatrix::identity(ch.dim_in));
    let cp = min >= -tol;
    let tp = dev <= tol;
    Ok(CertificationReport {
        cp,
        tp_or_unital: tp,
        min_choi_eigenvalue: min,
        kraus_sum_deviation: dev,
        max_violation: (-min).max(0.0).max(dev),
        tolerance: tol,
    })
}

pub(crate) fn require_accepted(ch: &KrausChannel) -> Result<()> {
    let report = verify_cptp(ch, CPTP_TOL)?;
    if report.accepted() {
        Ok(())
    } else {
        Err(Error::ChannelRejected(format!(
            "cp={} tp_or_unital={} max_violation={:.3e}",
            report.cp, report.tp_or_unital, report.max_violation
        )))
    }
}

/// Choi matrix of a Schrödinger channel.
pub fn choi(ch: &KrausChannel) -> Result<ChoiMatrix> {
    if ch.picture != Picture::Schroedinger {
        return Err(Error::WrongPicture("schroedinger"));
    }
    Ok(choi_of_family(ch))
}

// Multiplies `v` by a unit phase so its first entry above `threshold` in
// modulus becomes positive real.
pub(crate) fn normalize_phase(v: &mut [C64], threshold: f64) {
    if let Some(&z) = v.iter().find(|z| z.norm() > threshold) {
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

/// Canonical Kraus family from the eigen-decomposition of a Choi matrix.
///
/// Operators are ordered by decreasing eigenvalue; eigenvalues at or below
/// `tol` times the largest are discarded. Each eigenvector is phase-normalized
/// before scaling by the square root of its eigenvalue.
pub fn kraus_from_choi(c: &ChoiMatrix, tol: f64) -> Result<KrausChannel> {
    let n = c.dim_in * c.dim_out;
    if c.matrix.rows() != n || c.matrix.cols() != n {
        return Err(Error::DimensionMismatch("Choi matrix size".into()));
    }
    let herm = c.matrix.hermiticity_deviation();
    if herm > tol.max(1e-12) * c.matrix.frobenius_norm().max(1.0) {
        return Err(Error::NotPositive {
            min_eigenvalue: f64::NAN,
        });
    }
    let (values, vectors) = c.matrix.hermitian_eigen()?;
    let max = values.last().copied().unwrap_or(0.0);
    if values[0] < -tol * max.max(1.0) {
        return Err(Error::NotPositive {
            min_eigenvalue: values[0],
        });
    }
    let cutoff = tol * max;
    let mut kraus = Vec::new();
    for idx in (0..n).rev() {
        let lambda = values[idx];
        if lambda <= cutoff || lambda <= 0.0 {
            break;
        }
        let mut v = vectors.column(idx);
        normalize_phase(&mut v, 1e-8);
        let s = lambda.sqrt();
        let data = v.iter().map(|z| z * s).collect();
        kraus.push(ComplexMatrix::from_raw(c.dim_out, c.dim_in, data));
    }
    if kraus.is_empty() {
        return Err(Error::InvalidArgument("Choi matrix of the zero map".into()));
    }
    KrausChannel::new(c.dim_in, c.dim_out, kraus, Picture::Schroedinger)
}

fn reextract(ch: KrausChannel) -> Result<KrausChannel> {
    if ch.kraus.len() <= ch.dim_in * ch.dim_out || !ch.is_kraus_form() {
        return Ok(ch);
    }
    let picture = ch.picture;
    let fresh = kraus_from_choi(&choi_of_family(&ch), CHOI_RANK_CUTOFF)?;
    Ok(fresh.as_picture(picture))
}

/// Composition `t1 ∘ t2` (apply `t2` first) in their common picture.
///
/// The product family is re-extracted from the Choi matrix whenever it has
/// more than `dim_in · dim_out` members.
pub fn compose(t1: &KrausChannel, t2: &KrausChannel) -> Result<KrausChannel> {
    if t1.picture != t2.picture {
        return Err(Error::InvalidArgument(
            "cannot compose channels in different pictures".into(),
        ));
    }
    let mut kraus = Vec::with_capacity(t1.kraus.len() * t2.kraus.len());
    let mut signs = Vec::with_capacity(kraus.capacity());
    let (dim_in, dim_out) = match t1.picture {
        Picture::Schroedinger => {
            if t1.dim_in != t2.dim_out {
                return Err(Error::DimensionMismatch(format!(
                    "outer channel takes dimension {}, inner produces {}",
                    t1.dim_in, t2.dim_out
                )));
            }
            for (a, sa) in t1.kraus.iter().zip(&t1.signs) {
                for (b, sb) in t2.kraus.iter().zip(&t2.signs) {
                    kraus.push(a.matmul(b));
                    signs.push(sa * sb);
                }
            }
            (t2.dim_in, t1.dim_out)
        }
        Picture::Heisenberg => {
            // S1(S2(B)) = Σ (K2 K1)† B (K2 K1)
            if t1.dim_out != t2.dim_in {
                return Err(Error::DimensionMismatch(format!(
                    "outer channel takes dimension {}, inner produces {}",
                    t1.dim_out, t2.dim_in
                )));
            }
            for (a, sa) in t1.kraus.iter().zip(&t1.signs) {
                for (b, sb) in t2.kraus.iter().zip(&t2.signs) {
                    kraus.push(b.matmul(a));
                    signs.push(sa * sb);
                }
            }
            (t1.dim_in, t2.dim_out)
        }
    };
    reextract(KrausChannel::with_signs(
        dim_in, dim_out, kraus, signs, t1.picture,
    )?)
}

/// `t^n`, with `t^0` the identity channel.
pub fn power(t: &KrausChannel, n: usize) -> Result<KrausChannel> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch(
            "power of a rectangular channel".into(),
        ));
    }
    let mut acc = KrausChannel::identity_in(t.dim_in, t.picture);
    for _ in 0..n {
        acc = compose(&acc, t)?;
    }
    Ok(acc)
}

/// Convex combination `Σ w_k T_k`.
pub fn convex_combine(channels: &[KrausChannel], weights: &[f64]) -> Result<KrausChannel> {
    if channels.is_empty() || channels.len() != weights.len() {
        return Err(Error::InvalidArgument(format!(
            "{} channels with {} weights",
            channels.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidArgument("weights must be nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "weights sum to {total}, expected 1"
        )));
    }
    let first = &channels[0];
    let mut kraus = Vec::new();
    let mut signs = Vec::new();
    for (ch, &w) in channels.iter().zip(weights) {
        if (ch.dim_in, ch.dim_out, ch.picture) != (first.dim_in, first.dim_out, first.picture) {
            return Err(Error::DimensionMismatch(
                "convex combination of channels with different dimensions or pictures".into(),
            ));
        }
        if w == 0.0 {
            continue;
        }
        let s = w.sqrt();
        for (k, &sign) in ch.kraus.iter().zip(&ch.signs) {
            kraus.push(k.scale_real(s));
            signs.push(sign);
        }
    }
    KrausChannel::with_signs(first.dim_in, first.dim_out, kraus, signs, first.picture)
}

/// Dual channel: the same operators with the picture flipped.
pub fn dual(t: &KrausChannel) -> KrausChannel {
    t.as_picture(t.picture.flipped())
}

/// Recovers `U` when `t = Ad_U`.
///
/// Returns `Some(U)` if the Choi matrix has rank one and its single Kraus
/// operator is unitary within `tol`; `U` is phase-normalized so its first
/// nonzero entry (row-major) is positive real.
pub fn detect_unitary_conjugation(t: &KrausChannel, tol: f64) -> Result<Option<ComplexMatrix>> {
    if t.picture != Picture::Schroedinger {
        return Err(Error::WrongPicture("schroedinger"));
    }
    if !t.is_square() {
        return Err(Error::DimensionMismatch(
            "unitary detection needs a square channel".into(),
        ));
    }
    let c = choi_of_family(t);
    let (values, vectors) = c.matrix.hermitian_eigen()?;
    let n = values.len();
    let max = values[n - 1];
    if max <= 0.0 || values[0] < -tol * max {
        return Ok(None);
    }
    let rank = values
        .iter()
        .filter(|&&v| v > CHOI_RANK_CUTOFF.max(tol) * max)
        .count();
    if rank != 1 {
        return Ok(None);
    }
    let s = max.sqrt();
    let mut data: Vec<C64> = vectors.column(n - 1).iter().map(|z| z * s).collect();
    normalize_phase(&mut data, tol);
    let k = ComplexMatrix::from_raw(t.dim_out, t.dim_in, data);
    if k.isometry_deviation() > tol {
        return Ok(None);
    }
    Ok(Some(k))
}

/// Matrix `M` with `vec(T(A)) = M vec(A)` under column vectorization, in the
/// channel's own picture.
pub fn superoperator_matrix(t: &KrausChannel) -> Superoperator {
    let (din, dout) = t.map_dims();
    let mut m = ComplexMatrix::zeros(dout * dout, din * din);
    for (s, k) in t.terms() {
        // vec(X A Y) = (Yᵀ ⊗ X) vec(A)
        let term = match t.picture {
            Picture::Schroedinger => crate::tensor::kron(&k.conj(), k),
            Picture::Heisenberg => crate::tensor::kron(&k.transpose(), &k.adjoint()),
        };
        m = &m + &term.scale_real(s);
    }
    Superoperator {
        matrix: m,
        dim_in: din,
        dim_out: dout,
    }
}

/// Random CPTP channel of Kraus rank `rank` on dimension `d`.
///
/// A `(d·rank) × d` complex Gaussian matrix is orthonormalized column-wise
/// into an isometry whose consecutive `d × d` row blocks are the Kraus
/// operators. Deterministic for a fixed seed.
pub fn random_channel(d: usize, rank: usize, seed: u64) -> Result<KrausChannel> {
    if d == 0 || rank == 0 || rank > d * d {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} outside 1..={} for dimension {d}",
            d * d
        )));
    }
    let mut rng = rng_from_seed(seed);
    let iso = loop {
        if let Ok(v) = orthonormalize_columns(&gaussian_matrix(d * rank, d, &mut rng)) {
            break v;
        }
    };
    let kraus = (0..rank).map(|i| iso.row_block(i * d, d)).collect();
    KrausChannel::new(d, d, kraus, Picture::Schroedinger)
}
