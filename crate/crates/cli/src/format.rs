//! File formats.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major arrays of
//! pairs. Bundle unitaries are stored as base64 blobs of little-endian `f64`
//! with real and imaginary parts interleaved, which round-trips bit for bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use dilatio::control::ControlDilation;
use dilatio::cyclic::CyclicDilationBundle;
use dilatio::semigroup::DilationBundle;
use dilatio::{ComplexMatrix, DensityMatrix, KrausChannel, Picture, VerificationReport, C64};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Identifier written into every bundle file.
pub const BUNDLE_FORMAT: &str = "dilatio-bundle/1";

fn matrix_to_pairs(m: &ComplexMatrix) -> Vec<[f64; 2]> {
    m.data().iter().map(|z| [z.re, z.im]).collect()
}

fn matrix_from_pairs(
    rows: usize,
    cols: usize,
    pairs: &[[f64; 2]],
    field: &str,
) -> CliResult<ComplexMatrix> {
    if pairs.len() != rows * cols {
        return Err(CliError::input(format!(
            "{field}: expected {} entries for a {rows}x{cols} matrix, found {}",
            rows * cols,
            pairs.len()
        )));
    }
    if let Some(i) = pairs
        .iter()
        .position(|p| !p[0].is_finite() || !p[1].is_finite())
    {
        return Err(CliError::input(format!("{field}[{i}]: non-finite value")));
    }
    let data = pairs.iter().map(|p| C64::new(p[0], p[1])).collect();
    ComplexMatrix::new(rows, cols, data).map_err(|e| CliError::input(format!("{field}: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PictureName {
    Schroedinger,
    Heisenberg,
}

/// `{ dim_in, dim_out, picture, kraus, signs? }`; each Kraus operator is a
/// `dim_out × dim_in` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub dim_in: usize,
    pub dim_out: usize,
    pub picture: PictureName,
    pub kraus: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<i8>>,
}

impl ChannelFile {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        let signs = ch
            .signs()
            .iter()
            .any(|&s| s != 1)
            .then(|| ch.signs().to_vec());
        Self {
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            picture: match ch.picture() {
                Picture::Schroedinger => PictureName::Schroedinger,
                Picture::Heisenberg => PictureName::Heisenberg,
            },
            kraus: ch.kraus().iter().map(matrix_to_pairs).collect(),
            signs,
        }
    }

    pub fn to_channel(&self) -> CliResult<KrausChannel> {
        if self.dim_in == 0 || self.dim_out == 0 {
            return Err(CliError::input("dim_in/dim_out: must be positive"));
        }
        if self.kraus.is_empty() {
            return Err(CliError::input("kraus: at least one operator is required"));
        }
        let kraus = self
            .kraus
            .iter()
            .enumerate()
            .map(|(i, k)| matrix_from_pairs(self.dim_out, self.dim_in, k, &format!("kraus[{i}]")))
            .collect::<CliResult<Vec<_>>>()?;
        let signs = match &self.signs {
            Some(s) => {
                if s.len() != kraus.len() {
                    return Err(CliError::input(format!(
                        "signs: expected {} entries, found {}",
                        kraus.len(),
                        s.len()
                    )));
                }
                s.clone()
            }
            None => vec![1; kraus.len()],
        };
        let picture = match self.picture {
            PictureName::Schroedinger => Picture::Schroedinger,
            PictureName::Heisenberg => Picture::Heisenberg,
        };
        KrausChannel::with_signs(self.dim_in, self.dim_out, kraus, signs, picture)
            .map_err(|e| CliError::input(format!("signs: {e}")))
    }
}

/// `{ dim, matrix }` with a row-major `dim × dim` density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim: usize,
    pub matrix: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self {
            dim: rho.dim(),
            matrix: matrix_to_pairs(rho.matrix()),
        }
    }

    pub fn to_state(&self) -> CliResult<DensityMatrix> {
        if self.dim == 0 {
            return Err(CliError::input("dim: must be positive"));
        }
        let m = matrix_from_pairs(self.dim, self.dim, &self.matrix, "matrix")?;
        DensityMatrix::new(m).map_err(|e| CliError::input(format!("matrix: {e}")))
    }
}

/// A dense complex matrix as a base64 blob of interleaved little-endian
/// `f64` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixBlob {
    pub rows: usize,
    pub cols: usize,
    pub data: String,
}

impl MatrixBlob {
    pub fn encode(m: &ComplexMatrix) -> Self {
        let mut bytes = Vec::with_capacity(m.data().len() * 16);
        for z in m.data() {
            bytes.extend_from_slice(&z.re.to_le_bytes());
            bytes.extend_from_slice(&z.im.to_le_bytes());
        }
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: STANDARD.encode(bytes),
        }
    }

    pub fn decode(&self, field: &str) -> CliResult<ComplexMatrix> {
        let bytes = STANDARD
            .decode(&self.data)
            .map_err(|e| CliError::input(format!("{field}.data: invalid base64 ({e})")))?;
        if bytes.len() != self.rows * self.cols * 16 {
            return Err(CliError::input(format!(
                "{field}.data: {} bytes do not hold a {}x{} complex matrix",
                bytes.len(),
                self.rows,
                self.cols
            )));
        }
        let f = |chunk: &[u8]| f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
        let data = bytes
            .chunks_exact(16)
            .map(|c| C64::new(f(&c[..8]), f(&c[8..])))
            .collect();
        ComplexMatrix::new(self.rows, self.cols, data)
            .map_err(|e| CliError::input(format!("{field}: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Semigroup,
    Cyclic,
    Control,
}

/// Serialized dilation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleFile {
    pub format: String,
    pub mode: Mode,
    pub shape: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    pub omega: MatrixBlob,
    pub v: MatrixBlob,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<MatrixBlob>,
}

/// A loaded dilation of any mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Bundle {
    Semigroup(DilationBundle),
    Cyclic(CyclicDilationBundle),
    Control(ControlDilation),
}

impl Bundle {
    pub fn mode(&self) -> Mode {
        match self {
            Bundle::Semigroup(_) => Mode::Semigroup,
            Bundle::Cyclic(_) => Mode::Cyclic,
            Bundle::Control(_) => Mode::Control,
        }
    }

    pub fn shape(&self) -> &[usize] {
        match self {
            Bundle::Semigroup(b) => b.shape().dims(),
            Bundle::Cyclic(b) => b.shape().dims(),
            Bundle::Control(b) => b.shape().dims(),
        }
    }

    pub fn horizon(&self) -> Option<usize> {
        match self {
            Bundle::Semigroup(b) => Some(b.horizon()),
            Bundle::Cyclic(_) => None,
            Bundle::Control(b) => Some(b.horizon()),
        }
    }

    pub fn to_file(&self) -> BundleFile {
        let (omega, v, u, period) = match self {
            Bundle::Semigroup(b) => (b.omega(), b.v(), None, None),
            Bundle::Cyclic(b) => (b.omega(), b.v(), None, Some(b.period())),
            Bundle::Control(b) => (b.omega(), b.v(), Some(b.u()), None),
        };
        BundleFile {
            format: BUNDLE_FORMAT.to_string(),
            mode: self.mode(),
            shape: self.shape().to_vec(),
            horizon: self.horizon(),
            period,
            omega: MatrixBlob::encode(omega.matrix()),
            v: MatrixBlob::encode(v),
            u: u.map(MatrixBlob::encode),
        }
    }

    pub fn from_file(f: &BundleFile) -> CliResult<Self> {
        if f.format != BUNDLE_FORMAT {
            return Err(CliError::input(format!(
                "format: expected {BUNDLE_FORMAT:?}, found {:?}",
                f.format
            )));
        }
        let v = f.v.decode("v")?;
        let expected_len = match f.mode {
            Mode::Semigroup | Mode::Cyclic => 3,
            Mode::Control => 4,
        };
        if f.shape.len() != expected_len {
            return Err(CliError::input(format!(
                "shape: {:?} has {} factors, {:?} mode needs {expected_len}",
                f.shape,
                f.shape.len(),
                f.mode
            )));
        }
        let (d, kt, l) = (f.shape[0], f.shape[1], f.shape[2]);
        let bundle = match f.mode {
            Mode::Semigroup => Bundle::Semigroup(DilationBundle::from_parts(d, kt, l, v)?),
            Mode::Cyclic => Bundle::Cyclic(CyclicDilationBundle::from_parts(d, kt, l, v)?),
            Mode::Control => {
                if f.shape[3] != l {
                    return Err(CliError::input(
                        "shape: control shift factors must be equal",
                    ));
                }
                let u =
                    f.u.as_ref()
                        .ok_or_else(|| CliError::input("u: required in control mode"))?;
                Bundle::Control(ControlDilation::from_parts(d, kt, l, u.decode("u")?, v)?)
            }
        };
        if f.mode != Mode::Control && f.u.is_some() {
            return Err(CliError::input("u: only allowed in control mode"));
        }
        if f.horizon != bundle.horizon() {
            return Err(CliError::input(format!(
                "horizon: expected {:?} for this shape, found {:?}",
                bundle.horizon(),
                f.horizon
            )));
        }
        let period = match &bundle {
            Bundle::Cyclic(b) => Some(b.period()),
            _ => None,
        };
        if f.period != period {
            return Err(CliError::input(format!(
                "period: expected {period:?}, found {:?}",
                f.period
            )));
        }
        let omega = f.omega.decode("omega")?;
        let expected = match &bundle {
            Bundle::Semigroup(b) => b.omega().matrix(),
            Bundle::Cyclic(b) => b.omega().matrix(),
            Bundle::Control(b) => b.omega().matrix(),
        };
        if &omega != expected {
            return Err(CliError::input(
                "omega: does not match the canonical ancilla state",
            ));
        }
        Ok(bundle)
    }
}

/// One residual row of a report, with the value kept at full precision.
#[derive(Debug, Serialize)]
pub struct ResidualEntry {
    pub label: String,
    pub index: Vec<usize>,
    pub value: Box<RawValue>,
}

/// Verification report written by `check` and `verify`.
#[derive(Debug, Serialize)]
pub struct ReportFile {
    pub command: String,
    pub inputs: String,
    pub pass: bool,
    pub tolerance: f64,
    pub residuals: Vec<ResidualEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cp: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tp_or_unital: Option<bool>,
}

/// A finite value with 17 significant digits; `null` otherwise.
pub fn precise_number(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

impl ReportFile {
    pub fn from_report(
        command: &str,
        inputs: String,
        report: &VerificationReport,
        horizon: Option<usize>,
    ) -> Self {
        Self {
            command: command.to_string(),
            inputs,
            pass: report.pass(),
            tolerance: report.tolerance,
            residuals: report
                .residuals
                .iter()
                .map(|r| ResidualEntry {
                    label: r.label.clone(),
                    index: r.index.clone(),
                    value: precise_number(r.value),
                })
                .collect(),
            horizon,
            cp: None,
            tp_or_unital: None,
        }
    }
}

/// A reachable state with the `k` values producing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachableEntry {
    pub ks: Vec<usize>,
    pub dim: usize,
    pub matrix: Vec<[f64; 2]>,
}

/// SHA-256 over the given files, each prefixed by its byte length.
pub fn digest_files(paths: &[&Path]) -> CliResult<String> {
    let mut hasher = Sha256::new();
    for p in paths {
        let bytes = read_bytes(p)?;
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
    }
    Ok(hex::encode(hasher.finalize()))
}

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Parses a JSON file, naming the file in error messages.
pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let bytes = read_bytes(path)?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| CliError::input(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// Writes to `out` atomically, or to stdout when `out` is `None`.
pub fn emit(out: Option<&Path>, contents: &str) -> CliResult<()> {
    match out {
        Some(p) => write_atomic(p, contents.as_bytes()),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}
