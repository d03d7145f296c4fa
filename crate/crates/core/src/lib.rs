//! Unitary dilations of discrete-time quantum-dynamical semigroups.
//!
//! The crate represents finite-dimensional quantum channels by Kraus families
//! and builds unitary dilations for
//!
//! * a single channel ([`stinespring`]),
//! * all powers `T^n` up to a horizon ([`semigroup`]),
//! * cyclic channels with `T^m = T`, valid for every `n` ([`cyclic`]),
//! * a control system switching between two commuting channels ([`control`]).
//!
//! Every construction ships with a verifier that compares it against the
//! brute-force superoperator representation.
//!
//! Tensor factors are ordered big-endian: in `H ⊗ K` the index of `h ⊗ k` is
//! `h * dim(K) + k`.
//!
//! ```
//! use dilatio::library::amplitude_damping;
//! use dilatio::semigroup::{build_semigroup_dilation, evolve, verify_dilation};
//! use dilatio::DensityMatrix;
//!
//! let t = amplitude_damping(0.5)?;
//! let bundle = build_semigroup_dilation(&t, 6)?;
//! assert!(verify_dilation(&bundle, &t, 1e-9)?.pass());
//!
//! let rho = evolve(&bundle, &DensityMatrix::basis_state(2, 1), 3)?;
//! assert!((rho.population(1) - 0.125).abs() < 1e-9);
//! # Ok::<(), dilatio::Error>(())
//! ```

pub mod channel;
pub mod control;
pub mod cyclic;
pub mod error;
pub mod library;
pub mod par;
pub mod random;
pub mod report;
pub mod semigroup;
pub mod state;
pub mod stinespring;
pub mod tensor;

mod evolution;

pub use channel::{
    choi, compose, convex_combine, detect_unitary_conjugation, dual, kraus_from_choi, power,
    random_channel, superoperator_matrix, verify_cptp, CertificationReport, ChoiMatrix,
    KrausChannel, Picture, Superoperator,
};
pub use control::{
    build_control_dilation, check_commuting, evolve_control, reachable_set,
    verify_control_dilation, verify_reachable_inclusion, Control, ControlDilation, ControlSequence,
    ReachableState,
};
pub use cyclic::{
    build_cyclic_dilation, detect_cycle, evolve_cyclic, mu, nu, reduce_power,
    verify_cyclic_dilation, CyclePeriod, CyclicDilationBundle,
};
pub use error::{Error, Result};
pub use report::{Residual, VerificationReport};
pub use semigroup::{
    build_semigroup_dilation, evolve, heisenberg_evolve, verify_dilation, DilationBundle,
};
pub use state::DensityMatrix;
pub use stinespring::{
    general_stinespring, heisenberg_dilation, stinespring_unitary, GeneralDilation, UnitaryDilation,
};
pub use tensor::{ComplexMatrix, FactorShape, C64};
