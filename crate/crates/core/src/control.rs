//! A control system switching between two commuting channels `T` and `S`.
//!
//! Since `T S = S T`, any length-`N` word applies `T^k S^{N-k}` with `k` the
//! number of `T`s. The dilation lives on `H ⊗ K̃ ⊗ Z_L ⊗ Z_L`, `L = N + 1`,
//! with two unitaries:
//!
//! * `U = U_1 W_1`, where `W_1` moves cell `(a, b)` to `(a+1, b+1)` and `U_1`
//!   acts on `(a, b)` by `U_{a,b} U_{a-1,b-1}†`;
//! * `V = U_2 W_2`, where `W_2` moves `(a, b)` to `(a+1, b)` and `U_2` acts on
//!   `(a, b)` by `U_{a,0} U_{a-1,0}†`.
//!
//! `U_{M,k}` dilates `T^k S^{M-k}` for `1 ≤ M ≤ N`, `0 ≤ k ≤ M`, and is the
//! identity elsewhere. Then `U^k V^{N-k}` reaches cell `(N, k)` carrying
//! `U_{N,k}`, so `T^k S^{N-k}(A) = tr_K(U^k V^{N-k} (A ⊗ ω) V†^{N-k} U†^k)`.

use std::fmt;
use std::str::FromStr;

use crate::channel::{compose, superoperator_matrix, KrausChannel, Picture};
use crate::error::{Error, Result};
use crate::evolution::{check_horizon, check_size, check_unitary, reduce, Layout};
use crate::par;
use crate::report::{Residual, VerificationReport};
use crate::semigroup::{basis_residual, CONSTRUCTION_TOL};
use crate::state::DensityMatrix;
use crate::stinespring::stinespring_unitary;
use crate::tensor::{trace_norm, ComplexMatrix, FactorShape};

/// Default ceiling on the dimension `d · d² · (N + 1)²` of `U` and `V`.
pub const CONTROL_MAX_DIM: usize = 8192;
/// Default Frobenius tolerance of the superoperator commutator.
pub const COMMUTING_TOL: f64 = 1e-9;
/// Trace distance below which reachable states are merged.
pub const DEDUP_TOL: f64 = 1e-9;

/// `‖M(T) M(S) - M(S) M(T)‖_F`.
pub fn commutator_norm(t: &KrausChannel, s: &KrausChannel) -> Result<f64> {
    if t.map_dims() != s.map_dims() || t.picture() != s.picture() || !t.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "channels map {:?} and {:?}; need equal square dimensions and pictures",
            t.map_dims(),
            s.map_dims()
        )));
    }
    let (mt, ms) = (
        superoperator_matrix(t).matrix,
        superoperator_matrix(s).matrix,
    );
    Ok(mt.matmul(&ms).distance(&ms.matmul(&mt)))
}

/// Whether `‖M(T) M(S) - M(S) M(T)‖_F ≤ tol`.
pub fn check_commuting(t: &KrausChannel, s: &KrausChannel, tol: f64) -> Result<bool> {
    Ok(commutator_norm(t, s)? <= tol)
}

fn require_commuting(t: &KrausChannel, s: &KrausChannel) -> Result<()> {
    let commutator = commutator_norm(t, s)?;
    if commutator.is_nan() || commutator > COMMUTING_TOL {
        return Err(Error::NonCommuting { commutator });
    }
    Ok(())
}

/// One control input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Control {
    T,
    S,
}

/// A word over `{T, S}`, applied left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ControlSequence(pub Vec<Control>);

impl ControlSequence {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of `T`s.
    pub fn t_count(&self) -> usize {
        self.0.iter().filter(|c| **c == Control::T).count()
    }

    /// All `2^n` words of length `n`, in lexicographic order with `T < S`.
    pub fn all_words(n: usize) -> Vec<ControlSequence> {
        (0..1usize << n)
            .map(|bits| {
                ControlSequence(
                    (0..n)
                        .map(|i| {
                            if bits >> (n - 1 - i) & 1 == 0 {
                                Control::T
                            } else {
                                Control::S
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    }

    /// Applies the word step by step: `ρ_{j+1} = C_j(ρ_j)`.
    pub fn apply(
        &self,
        t: &KrausChannel,
        s: &KrausChannel,
        rho0: &DensityMatrix,
    ) -> Result<ComplexMatrix> {
        let mut x = rho0.matrix().clone();
        for c in &self.0 {
            x = match c {
                Control::T => t.apply(&x)?,
                Control::S => s.apply(&x)?,
            };
        }
        Ok(x)
    }
}

impl FromStr for ControlSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                'T' | 't' => Ok(Control::T),
                'S' | 's' => Ok(Control::S),
                other => Err(Error::InvalidArgument(format!(
                    "control sequence may only contain T and S, found {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(ControlSequence)
    }
}

impl fmt::Display for ControlSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            f.write_str(match c {
                Control::T => "T",
                Control::S => "S",
            })?;
        }
        Ok(())
    }
}

/// A reachable state with every `k` (number of `T`s) that produces it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachableState {
    pub ks: Vec<usize>,
    pub state: DensityMatrix,
}

/// `{T^k S^{N-k} ρ_0 : k = 0..=N}`, merging states closer than [`DEDUP_TOL`]
/// in trace distance. Refuses non-commuting pairs.
pub fn reachable_set(
    t: &KrausChannel,
    s: &KrausChannel,
    rho0: &DensityMatrix,
    n: usize,
) -> Result<Vec<ReachableState>> {
    require_commuting(t, s)?;
    if t.picture() != Picture::Schroedinger {
        return Err(Error::WrongPicture("schroedinger"));
    }
    if rho0.dim() != t.dim_in() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} for channels on dimension {}",
            rho0.dim(),
            t.dim_in()
        )));
    }
    // s_pows[j] = S^j ρ_0
    let mut s_pows = vec![rho0.matrix().clone()];
    for _ in 0..n {
        let next = s.apply(s_pows.last().expect("nonempty"))?;
        s_pows.push(next);
    }
    let mut out: Vec<ReachableState> = Vec::new();
    for k in 0..=n {
        let mut x = s_pows[n - k].clone();
        for _ in 0..k {
            x = t.apply(&x)?;
        }
        let state = DensityMatrix::with_tolerance(x, 1e-9)?;
        match out
            .iter_mut()
            .find(|r| r.state.trace_distance(&state) <= DEDUP_TOL)
        {
            Some(existing) => existing.ks.push(k),
            None => out.push(ReachableState { ks: vec![k], state }),
        }
    }
    Ok(out)
}

/// Two-unitary dilation of a commuting pair on `H ⊗ K̃ ⊗ Z_L ⊗ Z_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlDilation {
    layout: Layout,
    shift_len: usize,
    u: ComplexMatrix,
    v: ComplexMatrix,
    omega: DensityMatrix,
    shape: FactorShape,
}

impl ControlDilation {
    /// Assembles a dilation from stored unitaries; `ω = |e_0⟩⟨e_0|^{⊗3}`.
    pub fn from_parts(
        d: usize,
        ktilde: usize,
        shift_len: usize,
        u: ComplexMatrix,
        v: ComplexMatrix,
    ) -> Result<Self> {
        if d == 0 || ktilde == 0 || shift_len < 2 {
            return Err(Error::InvalidShape(format!(
                "invalid control shape [{d}, {ktilde}, {shift_len}, {shift_len}]"
            )));
        }
        let layout = Layout {
            d,
            ktilde,
            cells: shift_len * shift_len,
        };
        for (name, m) in [("U", &u), ("V", &v)] {
            if m.rows() != layout.total() || m.cols() != layout.total() {
                return Err(Error::InvalidShape(format!(
                    "{name} is {}x{} but shape [{d}, {ktilde}, {shift_len}, {shift_len}] needs {}",
                    m.rows(),
                    m.cols(),
                    layout.total()
                )));
            }
            check_unitary(m, name)?;
        }
        Ok(Self {
            layout,
            shift_len,
            u,
            v,
            omega: DensityMatrix::basis_state(layout.cells * ktilde, 0),
            shape: FactorShape::new(vec![d, ktilde, shift_len, shift_len])?,
        })
    }

    pub fn d(&self) -> usize {
        self.layout.d
    }

    pub fn ktilde(&self) -> usize {
        self.layout.ktilde
    }

    pub fn shift_len(&self) -> usize {
        self.shift_len
    }

    pub fn horizon(&self) -> usize {
        self.shift_len - 1
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn v(&self) -> &ComplexMatrix {
        &self.v
    }

    pub fn omega(&self) -> &DensityMatrix {
        &self.omega
    }

    /// `[d, k̃, L, L]`.
    pub fn shape(&self) -> &FactorShape {
        &self.shape
    }

    /// The isometry `x ↦ U^k V^{n-k} (x ⊗ e_0 ⊗ e_0 ⊗ e_0)`.
    pub fn propagated_embedding(&self, n: usize, k: usize) -> Result<ComplexMatrix> {
        check_horizon(n, self.horizon())?;
        if k > n {
            return Err(Error::InvalidArgument(format!(
                "k = {k} exceeds word length {n}"
            )));
        }
        let mut psi = self.layout.start_embedding(0);
        for _ in 0..n - k {
            psi = self.v.matmul(&psi);
        }
        for _ in 0..k {
            psi = self.u.matmul(&psi);
        }
        Ok(psi)
    }

    /// Marginal of the dilated word state on `Z_L ⊗ Z_L`.
    pub fn shift_marginal(&self, rho: &DensityMatrix, n: usize, k: usize) -> Result<ComplexMatrix> {
        self.check_state(rho)?;
        let psi = self.propagated_embedding(n, k)?;
        Ok(self.layout.cell_marginal(&psi, rho.matrix()))
    }

    /// Embeddings for every `(n, k)` with `k ≤ n ≤ horizon`, keyed as
    /// `n (n + 1) / 2 + k`.
    fn all_embeddings(&self) -> Vec<ComplexMatrix> {
        let h = self.horizon();
        let mut v_orbit = vec![self.layout.start_embedding(0)];
        for _ in 0..h {
            let next = self.v.matmul(v_orbit.last().expect("nonempty"));
            v_orbit.push(next);
        }
        let mut out = vec![None; (h + 1) * (h + 2) / 2];
        for (j, start) in v_orbit.into_iter().enumerate() {
            let mut psi = start;
            for k in 0..=h - j {
                if k > 0 {
                    psi = self.u.matmul(&psi);
                }
                let n = j + k;
                out[n * (n + 1) / 2 + k] = Some(psi.clone());
            }
        }
        out.into_iter()
            .map(|p| p.expect("every (n, k) is visited"))
            .collect()
    }

    fn check_state(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.d() {
            return Err(Error::DimensionMismatch(format!(
                "state of dimension {} for a dilation on dimension {}",
                rho.dim(),
                self.d()
            )));
        }
        Ok(())
    }
}

/// Builds the control dilation with the default size guard.
pub fn build_control_dilation(
    t: &KrausChannel,
    s: &KrausChannel,
    n: usize,
) -> Result<ControlDilation> {
    build_control_dilation_with(t, s, n, CONTROL_MAX_DIM)
}

/// Builds the control dilation, refusing dimensions above `max_dim`.
pub fn build_control_dilation_with(
    t: &KrausChannel,
    s: &KrausChannel,
    n: usize,
    max_dim: usize,
) -> Result<ControlDilation> {
    if t.picture() != Picture::Schroedinger || s.picture() != Picture::Schroedinger {
        return Err(Error::WrongPicture("schroedinger"));
    }
    require_commuting(t, s)?;
    if n < 1 {
        return Err(Error::InvalidArgument(
            "horizon N must be at least 1".into(),
        ));
    }
    let d = t.dim_in();
    let l = n + 1;
    let layout = Layout {
        d,
        ktilde: d * d,
        cells: l * l,
    };
    check_size(layout.total(), max_dim)?;
    crate::channel::require_accepted(t)?;
    crate::channel::require_accepted(s)?;

    // words[M][k] = U_{M,k} for 1 <= M <= N, 0 <= k <= M; None is the identity.
    let mut s_pows = vec![KrausChannel::identity(d)];
    let mut t_pows = vec![KrausChannel::identity(d)];
    for _ in 0..n {
        s_pows.push(compose(s_pows.last().expect("nonempty"), s)?);
        t_pows.push(compose(t_pows.last().expect("nonempty"), t)?);
    }
    let mut words: Vec<Vec<Option<ComplexMatrix>>> = vec![vec![None]];
    for m in 1..=n {
        let row = (0..=m)
            .map(|k| {
                let ch = compose(&t_pows[k], &s_pows[m - k])?;
                Ok(Some(stinespring_unitary(&ch)?.unitary().clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        words.push(row);
    }
    let word = |m: isize, k: isize| -> Option<&ComplexMatrix> {
        if m < 1 || k < 0 || k > m {
            return None;
        }
        words[m as usize][k as usize].as_ref()
    };
    let step = |cur: Option<&ComplexMatrix>, prev: Option<&ComplexMatrix>| match (cur, prev) {
        (Some(c), Some(p)) => Some(c.matmul(&p.adjoint())),
        (Some(c), None) => Some(c.clone()),
        (None, Some(p)) => Some(p.adjoint()),
        (None, None) => None,
    };
    let cell = |a: usize, b: usize| a * l + b;

    let mut u1 = vec![None; l * l];
    let mut u2 = vec![None; l * l];
    let mut w1 = vec![0; l * l];
    let mut w2 = vec![0; l * l];
    for a in 0..l {
        for b in 0..l {
            let (ai, bi) = (a as isize, b as isize);
            u1[cell(a, b)] = step(word(ai, bi), word(ai - 1, bi - 1));
            u2[cell(a, b)] = step(word(ai, 0), word(ai - 1, 0));
            w1[cell(a, b)] = cell((a + 1) % l, (b + 1) % l);
            w2[cell(a, b)] = cell((a + 1) % l, b);
        }
    }
    let u = layout
        .block_diagonal(&u1)
        .matmul(&layout.cell_permutation(&w1));
    let v = layout
        .block_diagonal(&u2)
        .matmul(&layout.cell_permutation(&w2));
    let dil = ControlDilation::from_parts(d, layout.ktilde, l, u, v)?;

    let embeddings = dil.all_embeddings();
    for m in 0..=n {
        for k in 0..=m {
            let psi = &embeddings[m * (m + 1) / 2 + k];
            let dev = layout.support_deviation(psi, word(m as isize, k as isize), cell(m, k));
            if dev > CONSTRUCTION_TOL {
                return Err(Error::ConstructionCheck(format!(
                    "U^{k} V^{} departs from U_{{{m},{k}}} by {dev:.3e}",
                    m - k
                )));
            }
        }
    }
    Ok(dil)
}

/// Evolves `ρ_0` under the word `seq` through the dilation:
/// `tr_K(U^k V^{N-k} (ρ_0 ⊗ ω) V†^{N-k} U†^k)`.
pub fn evolve_control(
    b: &ControlDilation,
    rho0: &DensityMatrix,
    seq: &ControlSequence,
) -> Result<DensityMatrix> {
    b.check_state(rho0)?;
    let psi = b.propagated_embedding(seq.len(), seq.t_count())?;
    DensityMatrix::with_tolerance(reduce(&psi, rho0.matrix()), 1e-9)
}

/// Per-`k` residuals `‖T^k S^{N-k}(ρ_0) - tr_K(U^k V^{N-k} (ρ_0 ⊗ ω) …)‖₁`.
pub fn verify_reachable_inclusion(
    b: &ControlDilation,
    t: &KrausChannel,
    s: &KrausChannel,
    rho0: &DensityMatrix,
    n: usize,
    tol: f64,
) -> Result<VerificationReport> {
    check_horizon(n, b.horizon())?;
    b.check_state(rho0)?;
    check_pair(b, t, s)?;
    let residuals = (0..=n)
        .map(|k| {
            let mut x = rho0.matrix().clone();
            for _ in 0..n - k {
                x = s.apply(&x)?;
            }
            for _ in 0..k {
                x = t.apply(&x)?;
            }
            let psi = b.propagated_embedding(n, k)?;
            Ok(Residual {
                label: format!("k={k}"),
                index: vec![k],
                value: trace_norm(&(&reduce(&psi, rho0.matrix()) - &x)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::new(tol, residuals))
}

/// Compares every word `U^k V^{n-k}` with `M(T)^k M(S)^{n-k}` on the matrix
/// units, for all `k ≤ n ≤ horizon`.
pub fn verify_control_dilation(
    b: &ControlDilation,
    t: &KrausChannel,
    s: &KrausChannel,
    tol: f64,
) -> Result<VerificationReport> {
    check_pair(b, t, s)?;
    let d = b.d();
    let h = b.horizon();
    let (mt, ms) = (
        superoperator_matrix(t).matrix,
        superoperator_matrix(s).matrix,
    );
    let mut tp = vec![ComplexMatrix::identity(d * d)];
    let mut sp = vec![ComplexMatrix::identity(d * d)];
    for _ in 0..h {
        tp.push(mt.matmul(tp.last().expect("nonempty")));
        sp.push(ms.matmul(sp.last().expect("nonempty")));
    }
    let embeddings = b.all_embeddings();
    let keys: Vec<(usize, usize)> = (0..=h).flat_map(|n| (0..=n).map(move |k| (n, k))).collect();
    let residuals = par::map_slice(&keys, |&(n, k)| Residual {
        label: format!("N={n},k={k}"),
        index: vec![n, k],
        value: basis_residual(
            &embeddings[n * (n + 1) / 2 + k],
            &tp[k].matmul(&sp[n - k]),
            d,
        ),
    });
    Ok(VerificationReport::new(tol, residuals))
}

fn check_pair(b: &ControlDilation, t: &KrausChannel, s: &KrausChannel) -> Result<()> {
    for ch in [t, s] {
        if ch.picture() != Picture::Schroedinger || ch.map_dims() != (b.d(), b.d()) {
            return Err(Error::DimensionMismatch(format!(
                "dilation acts on dimension {}, channel maps {:?} in the {} picture",
                b.d(),
                ch.map_dims(),
                ch.picture().name()
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{convex_combine, power};
    use crate::library;
    use crate::random::{haar_unitary, random_state, rng_from_seed};

    fn ad(u: &ComplexMatrix) -> KrausChannel {
        KrausChannel::unitary(u.clone()).unwrap()
    }

    // Mixtures of powers of one random unitary conjugation.
    fn commuting_pair(seed: u64) -> (KrausChannel, KrausChannel) {
        let mut rng = rng_from_seed(seed);
        let u = haar_unitary(2, &mut rng);
        let base = ad(&u);
        let p2 = power(&base, 2).unwrap();
        let id = KrausChannel::identity(2);
        let t = convex_combine(&[base.clone(), id.clone()], &[0.7, 0.3]).unwrap();
        let s = convex_combine(&[p2, base, id], &[0.2, 0.5, 0.3]).unwrap();
        (t, s)
    }

    #[test]
    fn commuting_examples() {
        let t = library::amplitude_damping(0.2).unwrap();
        assert!(check_commuting(&t, &t, COMMUTING_TOL).unwrap());
        // Anticommuting unitaries give commuting conjugations.
        let x = ad(&library::pauli_x());
        let z = ad(&library::pauli_z());
        assert!(check_commuting(&x, &z, COMMUTING_TOL).unwrap());
        let h = ad(&library::hadamard());
        assert!(!check_commuting(&x, &h, COMMUTING_TOL).unwrap());
        assert!(!check_commuting(&x, &t, COMMUTING_TOL).unwrap());
        let (a, b) = commuting_pair(1);
        assert!(check_commuting(&a, &b, COMMUTING_TOL).unwrap());
        assert!(check_commuting(&a, &KrausChannel::identity(3), 1e-9).is_err());
    }

    #[test]
    fn sequence_parsing() {
        let seq: ControlSequence = "TST".parse().unwrap();
        assert_eq!(seq.len(), 3);
        assert_eq!(seq.t_count(), 2);
        assert_eq!(seq.to_string(), "TST");
        assert!("TXS".parse::<ControlSequence>().is_err());
        assert!("".parse::<ControlSequence>().unwrap().is_empty());
        assert_eq!(ControlSequence::all_words(3).len(), 8);
    }

    #[test]
    fn reachable_set_examples() {
        let t = library::amplitude_damping(0.3).unwrap();
        let rho = random_state(2, &mut rng_from_seed(2));
        let single = reachable_set(&t, &t, &rho, 4).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].ks, vec![0, 1, 2, 3, 4]);
        let zero = reachable_set(&t, &t, &rho, 0).unwrap();
        assert_eq!(zero.len(), 1);
        assert!(zero[0].state.trace_distance(&rho) < 1e-15);
        let x = ad(&library::pauli_x());
        assert!(matches!(
            reachable_set(&x, &t, &rho, 2),
            Err(Error::NonCommuting { .. })
        ));
    }

    #[test]
    fn every_word_lands_in_the_reachable_set() {
        let (t, s) = commuting_pair(3);
        let rho = random_state(2, &mut rng_from_seed(4));
        let set = reachable_set(&t, &s, &rho, 4).unwrap();
        assert!(set.len() <= 5);
        for word in ControlSequence::all_words(4) {
            let out =
                DensityMatrix::with_tolerance(word.apply(&t, &s, &rho).unwrap(), 1e-9).unwrap();
            let hit = set.iter().find(|r| r.ks.contains(&word.t_count())).unwrap();
            assert!(hit.state.trace_distance(&out) <= 1e-9);
        }
    }

    #[test]
    fn identity_pair_is_exact() {
        let id = KrausChannel::identity(2);
        let b = build_control_dilation(&id, &id, 2).unwrap();
        let report = verify_control_dilation(&b, &id, &id, 1e-12).unwrap();
        assert!(report.pass(), "max residual {}", report.max_residual());
    }

    #[test]
    fn conjugation_pair_reproduces_powers() {
        let mut rng = rng_from_seed(5);
        let u = haar_unitary(2, &mut rng);
        let t = ad(&u);
        let s = ad(&u.matmul(&u));
        let b = build_control_dilation(&t, &s, 3).unwrap();
        let rho = random_state(2, &mut rng);
        for word in ["", "T", "S", "TS", "SST", "TTT"] {
            let seq: ControlSequence = word.parse().unwrap();
            let k = seq.t_count();
            let p = u.pow(2 * seq.len() - k);
            let want = p.matmul(rho.matrix()).matmul(&p.adjoint());
            let got = evolve_control(&b, &rho, &seq).unwrap();
            assert!(got.matrix().distance(&want) <= 1e-10, "word {word}");
        }
    }

    #[test]
    fn random_commuting_pair_four_steps() {
        let (t, s) = commuting_pair(6);
        let b = build_control_dilation(&t, &s, 4).unwrap();
        assert_eq!(b.shape().dims(), &[2, 4, 5, 5]);
        let report = verify_control_dilation(&b, &t, &s, 1e-9).unwrap();
        assert_eq!(report.residuals.len(), 15);
        assert!(report.pass(), "max residual {}", report.max_residual());
    }

    #[test]
    fn word_order_does_not_matter() {
        let (t, s) = commuting_pair(7);
        let b = build_control_dilation(&t, &s, 3).unwrap();
        let rho = random_state(2, &mut rng_from_seed(8));
        let a = evolve_control(&b, &rho, &"TST".parse().unwrap()).unwrap();
        let c = evolve_control(&b, &rho, &"STT".parse().unwrap()).unwrap();
        assert!(a.matrix().distance(c.matrix()) <= 1e-10);
        let seq: ControlSequence = "TST".parse().unwrap();
        let direct = seq.apply(&t, &s, &rho).unwrap();
        assert!(a.matrix().distance(&direct) <= 1e-9);
        assert_eq!(
            evolve_control(&b, &rho, &ControlSequence::default()).unwrap(),
            {
                let m = reduce(&b.propagated_embedding(0, 0).unwrap(), rho.matrix());
                DensityMatrix::with_tolerance(m, 1e-9).unwrap()
            }
        );
    }

    #[test]
    fn shift_marginals_and_inclusion() {
        let (t, s) = commuting_pair(9);
        let b = build_control_dilation(&t, &s, 3).unwrap();
        let rho = random_state(2, &mut rng_from_seed(10));
        for n in 0..=3 {
            for k in 0..=n {
                let marg = b.shift_marginal(&rho, n, k).unwrap();
                let want = ComplexMatrix::unit(16, 16, n * 4 + k, n * 4 + k);
                assert!(marg.distance(&want) <= 1e-9);
            }
        }
        let report = verify_reachable_inclusion(&b, &t, &s, &rho, 3, 1e-9).unwrap();
        assert_eq!(report.residuals.len(), 4);
        assert!(report.pass());
    }

    #[test]
    fn guards() {
        let id = KrausChannel::identity(2);
        let b = build_control_dilation(&id, &id, 2).unwrap();
        let rho = DensityMatrix::basis_state(2, 0);
        assert!(matches!(
            evolve_control(&b, &rho, &"TTT".parse().unwrap()),
            Err(Error::HorizonExceeded {
                requested: 3,
                horizon: 2
            })
        ));
        // 2 · 4 · 33² > 8192
        assert!(matches!(
            build_control_dilation(&id, &id, 32),
            Err(Error::ResourceLimit { .. })
        ));
        let x = ad(&library::pauli_x());
        let h = ad(&library::hadamard());
        assert!(matches!(
            build_control_dilation(&x, &h, 2),
            Err(Error::NonCommuting { .. })
        ));
    }
}
