//! Cross-checks the reduced evolution routes against dense partial traces of
//! the full dilated state.

use dilatio::channel::{convex_combine, dual, power, random_channel};
use dilatio::control::{build_control_dilation, evolve_control, ControlSequence};
use dilatio::cyclic::{build_cyclic_dilation, evolve_cyclic, CyclePeriod};
use dilatio::library;
use dilatio::random::{gaussian_matrix, random_state, rng_from_seed};
use dilatio::semigroup::{build_semigroup_dilation, evolve, heisenberg_evolve};
use dilatio::tensor::{embed_identity, embed_state, partial_trace_factor, partial_trace_state};
use dilatio::tensor::{ComplexMatrix, FactorShape};
use dilatio::KrausChannel;

#[test]
fn semigroup_dense_route_for_qutrit() {
    let t = random_channel(3, 5, 1).unwrap();
    let b = build_semigroup_dilation(&t, 3).unwrap();
    let rho = random_state(3, &mut rng_from_seed(2));
    let big = embed_state(rho.matrix(), b.omega());
    let mut vn = ComplexMatrix::identity(b.v().rows());
    for n in 0..=3 {
        let dense = vn.matmul(&big).matmul(&vn.adjoint());
        let reduced = partial_trace_factor(&dense, b.shape(), &[0]).unwrap();
        assert!(reduced.distance(evolve(&b, &rho, n).unwrap().matrix()) <= 1e-12);
        let want = power(&t, n).unwrap().apply(rho.matrix()).unwrap();
        assert!(reduced.distance(&want) <= 1e-9);
        vn = b.v().matmul(&vn);
    }
}

#[test]
fn semigroup_dense_heisenberg_route() {
    let mut rng = rng_from_seed(3);
    let t = random_channel(2, 3, 4).unwrap();
    let b = build_semigroup_dilation(&t, 4).unwrap();
    let op = gaussian_matrix(2, 2, &mut rng);
    let flat = FactorShape::new(vec![2, b.ktilde() * b.shift_len()]).unwrap();
    let lifted = embed_identity(&op, b.ktilde() * b.shift_len());
    let mut vn = ComplexMatrix::identity(b.v().rows());
    for n in 0..=4 {
        let pulled = vn.adjoint().matmul(&lifted).matmul(&vn);
        let dense = partial_trace_state(&pulled, &flat, b.omega()).unwrap();
        assert!(dense.distance(&heisenberg_evolve(&b, &op, n).unwrap()) <= 1e-12);
        let want = power(&dual(&t), n).unwrap().apply(&op).unwrap();
        assert!(dense.distance(&want) <= 1e-9);
        vn = b.v().matmul(&vn);
    }
}

#[test]
fn cyclic_rotations_through_fifty_steps() {
    for m in [3, 4, 6] {
        let t = library::periodic_rotation(m).unwrap();
        let b = build_cyclic_dilation(&t, CyclePeriod::new(m).unwrap()).unwrap();
        let rho = random_state(2, &mut rng_from_seed(m as u64));
        let mut direct = rho.matrix().clone();
        for n in 0..=50 {
            let got = evolve_cyclic(&b, &rho, n).unwrap();
            assert!(got.matrix().distance(&direct) <= 1e-9, "m={m} n={n}");
            direct = t.apply(&direct).unwrap();
        }
    }
}

#[test]
fn control_dense_route() {
    let mut rng = rng_from_seed(5);
    // Dephasing commutes with conjugation by a diagonal unitary.
    let diag = KrausChannel::unitary(library::phase_unitary(&[0.0, 0.7])).unwrap();
    let t = convex_combine(&[diag, KrausChannel::identity(2)], &[0.6, 0.4]).unwrap();
    let s = library::dephasing(0.3).unwrap();
    let b = build_control_dilation(&t, &s, 2).unwrap();
    let rho = random_state(2, &mut rng);
    let big = embed_state(rho.matrix(), b.omega());
    for word in ["", "T", "S", "TS", "ST", "TT", "SS"] {
        let seq: ControlSequence = word.parse().unwrap();
        let k = seq.t_count();
        let op = b.u().pow(k).matmul(&b.v().pow(seq.len() - k));
        let dense = op.matmul(&big).matmul(&op.adjoint());
        let reduced = partial_trace_factor(&dense, b.shape(), &[0]).unwrap();
        let got = evolve_control(&b, &rho, &seq).unwrap();
        assert!(reduced.distance(got.matrix()) <= 1e-12, "word {word:?}");
        let direct = seq.apply(&t, &s, &rho).unwrap();
        assert!(reduced.distance(&direct) <= 1e-9, "word {word:?}");
    }
}
