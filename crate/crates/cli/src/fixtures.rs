//! Canonical fixture corpus: channels, commuting pairs and states.

use std::fs;
use std::path::Path;

use dilatio::channel::{convex_combine, power};
use dilatio::library;
use dilatio::{DensityMatrix, KrausChannel, C64};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::format::{to_json, write_atomic, ChannelFile, StateFile};

/// Manifest row describing one fixture file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureEntry {
    pub file: String,
    pub kind: &'static str,
    /// `accepted` or `rejected` by `check`; absent for states.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect: Option<&'static str>,
    pub description: String,
}

/// A fixture ready to be written.
pub enum Fixture {
    Channel(KrausChannel),
    State(DensityMatrix),
}

fn unitary(u: dilatio::ComplexMatrix) -> KrausChannel {
    KrausChannel::unitary(u).expect("library unitary")
}

/// Every fixture with its manifest entry, in a fixed order.
pub fn corpus() -> Vec<(FixtureEntry, Fixture)> {
    let mut out = Vec::new();
    let mut channel = |file: &str, description: &str, ch: KrausChannel, accepted: bool| {
        out.push((
            FixtureEntry {
                file: file.to_string(),
                kind: "channel",
                expect: Some(if accepted { "accepted" } else { "rejected" }),
                description: description.to_string(),
            },
            Fixture::Channel(ch),
        ));
    };

    channel(
        "identity_2.json",
        "identity channel on a qubit",
        KrausChannel::identity(2),
        true,
    );
    channel(
        "identity_3.json",
        "identity channel on a qutrit",
        KrausChannel::identity(3),
        true,
    );
    channel(
        "pauli_x.json",
        "conjugation by Pauli X",
        unitary(library::pauli_x()),
        true,
    );
    channel(
        "pauli_y.json",
        "conjugation by Pauli Y",
        unitary(library::pauli_y()),
        true,
    );
    channel(
        "pauli_z.json",
        "conjugation by Pauli Z",
        unitary(library::pauli_z()),
        true,
    );
    channel(
        "hadamard.json",
        "conjugation by the Hadamard gate",
        unitary(library::hadamard()),
        true,
    );
    for (name, gamma) in [("0.1", 0.1), ("0.3", 0.3), ("0.5", 0.5)] {
        channel(
            &format!("damping_{name}.json"),
            &format!("amplitude damping with gamma = {name}"),
            library::amplitude_damping(gamma).expect("valid gamma"),
            true,
        );
    }
    channel(
        "transpose_2.json",
        "transpose map (positive, not CP)",
        library::transpose_map(2),
        false,
    );
    for m in [3usize, 4, 6] {
        channel(
            &format!("rotation_period_{m}.json"),
            &format!("qubit rotation with T^{m} = T"),
            library::periodic_rotation(m).expect("valid period"),
            true,
        );
    }

    // Pair A: mixtures of powers of one rotation.
    let base = unitary(library::rotation_y(0.6));
    let id = KrausChannel::identity(2);
    let a_t = convex_combine(&[base.clone(), id.clone()], &[0.5, 0.5]).expect("weights");
    let a_s = convex_combine(
        &[power(&base, 2).expect("power"), base, id],
        &[0.25, 0.25, 0.5],
    )
    .expect("weights");
    channel(
        "pair_rotation_t.json",
        "commuting pair A, first channel",
        a_t,
        true,
    );
    channel(
        "pair_rotation_s.json",
        "commuting pair A, second channel",
        a_s,
        true,
    );
    // Pair B: a diagonal phase conjugation and dephasing.
    let b_t = unitary(library::phase_unitary(&[0.0, 0.4]));
    let b_s = library::dephasing(0.25).expect("valid p");
    channel(
        "pair_phase_t.json",
        "commuting pair B, phase conjugation",
        b_t,
        true,
    );
    channel(
        "pair_phase_s.json",
        "commuting pair B, dephasing",
        b_s,
        true,
    );

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let states = [
        (
            "state_ground.json",
            "qubit ground state |0><0|",
            DensityMatrix::basis_state(2, 0),
        ),
        (
            "state_excited.json",
            "qubit excited state |1><1|",
            DensityMatrix::basis_state(2, 1),
        ),
        (
            "state_plus.json",
            "qubit state |+><+|",
            DensityMatrix::from_pure(&[C64::new(s, 0.0), C64::new(s, 0.0)]).expect("nonzero"),
        ),
        (
            "state_mixed.json",
            "maximally mixed qubit state",
            DensityMatrix::maximally_mixed(2),
        ),
        (
            "state_qutrit_ground.json",
            "qutrit ground state",
            DensityMatrix::basis_state(3, 0),
        ),
    ];
    for (file, description, rho) in states {
        out.push((
            FixtureEntry {
                file: file.to_string(),
                kind: "state",
                expect: None,
                description: description.to_string(),
            },
            Fixture::State(rho),
        ));
    }
    out
}

/// Writes the corpus and `manifest.json` into `dir`.
pub fn write_fixtures(dir: &Path) -> CliResult<Vec<FixtureEntry>> {
    fs::create_dir_all(dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?;
    let mut manifest = Vec::new();
    for (entry, fixture) in corpus() {
        let text = match &fixture {
            Fixture::Channel(ch) => to_json(&ChannelFile::from_channel(ch)),
            Fixture::State(rho) => to_json(&StateFile::from_state(rho)),
        };
        write_atomic(&dir.join(&entry.file), text.as_bytes())?;
        manifest.push(entry);
    }
    write_atomic(&dir.join("manifest.json"), to_json(&manifest).as_bytes())?;
    Ok(manifest)
}
