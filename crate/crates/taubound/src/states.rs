//! Construction, sampling, and serialization of pure states and density
//! matrices, including the canonical GHZ/W families and their isotropic
//! mixtures.

use std::io::{BufRead, Write};
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::tensor::{self, CMatrix, CVector, DimList, C64};

/// Norm/Hermiticity/PSD tolerance for values constructed in-process.
pub const STRICT_TOL: f64 = 1e-10;
/// Looser tolerance applied to externally produced state files.
pub const LOAD_TOL: f64 = 1e-8;

/// Normalized state vector with its subsystem dimension list.
#[derive(Debug, Clone)]
pub struct PureState {
    amplitudes: CVector,
    dims: DimList,
}

impl PureState {
    pub fn new(amplitudes: CVector, dims: DimList) -> Result<Self> {
        Self::with_tol(amplitudes, dims, STRICT_TOL)
    }

    pub fn with_tol(amplitudes: CVector, dims: DimList, tol: f64) -> Result<Self> {
        dims.check_total(amplitudes.len())?;
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!(
                "squared norm {norm_sq} deviates from 1 by more than {tol}"
            )));
        }
        Ok(PureState { amplitudes, dims })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &DimList {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: self.projector(),
            dims: self.dims.clone(),
        }
    }

    /// Overlap <self|other>.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// Hermitian, PSD, trace-one operator with its subsystem dimension list.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dims: DimList,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, dims: DimList) -> Result<Self> {
        Self::with_tol(matrix, dims, STRICT_TOL)
    }

    pub fn with_tol(matrix: CMatrix, dims: DimList, tol: f64) -> Result<Self> {
        dims.check_total(matrix.nrows())?;
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = tensor::hermiticity_defect(&matrix);
        if herm > tol {
            return Err(Error::InvalidState(format!(
                "Hermiticity defect {herm:.3e} exceeds {tol:.1e}"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!(
                "trace {tr} deviates from 1 by more than {tol:.1e}"
            )));
        }
        let min_eig = tensor::hermitian_eigenvalues(&matrix)
            .last()
            .cloned()
            .unwrap_or(0.0);
        if min_eig < -tol {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite: minimum eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(DensityMatrix { matrix, dims })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &DimList {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Reduced state on the given parties.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let matrix = tensor::partial_trace(&self.matrix, &self.dims, &keep)?;
        let dims = DimList::new(keep.iter().map(|&p| self.dims.dim_of(p)).collect())?;
        Ok(DensityMatrix { matrix, dims })
    }

    /// Tr(rho^2).
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// (1/sqrt(d)) sum_i |i...i> on n parties of local dimension d.
pub fn make_ghz(d: usize, n: usize) -> Result<PureState> {
    if d < 2 || n < 2 {
        return Err(Error::InvalidParameter(format!(
            "GHZ requires d >= 2 and n >= 2, got d={d}, n={n}"
        )));
    }
    let dims = DimList::uniform(d, n)?;
    let mut amps = CVector::zeros(dims.total());
    let scale = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        amps[dims.encode(&vec![i; n])] = C64::new(scale, 0.0);
    }
    PureState::new(amps, dims)
}

/// Uniform superposition of the n weight-one basis states of n qubits.
pub fn make_w(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "W requires n >= 2, got n={n}"
        )));
    }
    let dims = DimList::uniform(2, n)?;
    let mut amps = CVector::zeros(dims.total());
    let scale = 1.0 / (n as f64).sqrt();
    for party in 0..n {
        let mut digits = vec![0usize; n];
        digits[party] = 1;
        amps[dims.encode(&digits)] = C64::new(scale, 0.0);
    }
    PureState::new(amps, dims)
}

/// Two-qubit Bell state, the two-party GHZ.
pub fn make_bell() -> PureState {
    make_ghz(2, 2).expect("bell construction cannot fail")
}

/// Computational-basis product state |0...0>.
pub fn make_product(dims: DimList) -> PureState {
    let mut amps = CVector::zeros(dims.total());
    amps[0] = C64::new(1.0, 0.0);
    PureState::new(amps, dims).expect("product construction cannot fail")
}

/// (1-p)/D I_D + p |psi><psi|.
pub fn isotropic_mix(psi: &PureState, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "mixing parameter p={p} outside [0,1]"
        )));
    }
    let d = psi.dim();
    let matrix = CMatrix::identity(d, d).scale((1.0 - p) / d as f64) + psi.projector().scale(p);
    DensityMatrix::new(matrix, psi.dims().clone())
}

/// Seeded RNG for all sampling in this crate. ChaCha20 is fixed so that
/// seeds reproduce across builds and platforms.
pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Haar-random pure state: normalized vector of iid standard complex
/// Gaussians.
pub fn haar_random_pure(dims: &DimList, seed: u64) -> PureState {
    haar_pure_with_rng(dims, &mut seeded_rng(seed))
}

pub fn haar_pure_with_rng<R: Rng>(dims: &DimList, rng: &mut R) -> PureState {
    let d = dims.total();
    let mut amps = CVector::zeros(d);
    for k in 0..d {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        amps[k] = C64::new(re, im);
    }
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|z| *z /= norm);
    PureState::new(amps, dims.clone()).expect("normalized by construction")
}

/// Flat-Dirichlet weights via normalized unit exponentials.
fn dirichlet_uniform<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k)
        .map(|_| -f64::ln(1.0 - rng.random::<f64>()))
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Random mixed state: Dirichlet-uniform weights over k Haar vectors.
pub fn random_mixed<R: Rng>(dims: &DimList, k: usize, rng: &mut R) -> DensityMatrix {
    let weights = dirichlet_uniform(k, rng);
    let d = dims.total();
    let mut matrix = CMatrix::zeros(d, d);
    for w in weights {
        let psi = haar_pure_with_rng(dims, rng);
        matrix += psi.projector().scale(w);
    }
    DensityMatrix::new(matrix, dims.clone()).expect("convex mixture of projectors")
}

/// Haar-random product pure state (independent local states).
pub fn random_product_pure<R: Rng>(dims: &DimList, rng: &mut R) -> PureState {
    let mut amps = CVector::from_element(1, C64::new(1.0, 0.0));
    for &d in dims.dims() {
        let local = haar_pure_with_rng(&DimList::new(vec![d]).expect("local dimension >= 2"), rng);
        let mut next = CVector::zeros(amps.len() * d);
        for i in 0..amps.len() {
            for j in 0..d {
                next[i * d + j] = amps[i] * local.amplitudes()[j];
            }
        }
        amps = next;
    }
    PureState::new(amps, dims.clone()).expect("product of normalized factors")
}

/// Random fully separable state: Dirichlet-uniform mixture of k random
/// product pure states.
pub fn random_separable<R: Rng>(dims: &DimList, k: usize, rng: &mut R) -> DensityMatrix {
    let weights = dirichlet_uniform(k, rng);
    let d = dims.total();
    let mut matrix = CMatrix::zeros(d, d);
    for w in weights {
        let psi = random_product_pure(dims, rng);
        matrix += psi.projector().scale(w);
    }
    DensityMatrix::new(matrix, dims.clone()).expect("convex mixture of projectors")
}

/// Named state family with its mixing parameter, as exposed on the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Ghz,
    W,
    WMix,
    GhzMix,
    Product,
    Bell,
    Haar,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ghz" => Ok(Family::Ghz),
            "w" => Ok(Family::W),
            "wmix" => Ok(Family::WMix),
            "ghzmix" => Ok(Family::GhzMix),
            "product" => Ok(Family::Product),
            "bell" => Ok(Family::Bell),
            "haar" => Ok(Family::Haar),
            other => Err(Error::InvalidParameter(format!(
                "unknown family '{other}' (expected ghz|w|wmix|ghzmix|product|bell|haar)"
            ))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::Ghz => "ghz",
            Family::W => "w",
            Family::WMix => "wmix",
            Family::GhzMix => "ghzmix",
            Family::Product => "product",
            Family::Bell => "bell",
            Family::Haar => "haar",
        };
        write!(f, "{s}")
    }
}

/// A family instance: tag, mixing parameter where applicable, dims.
#[derive(Debug, Clone)]
pub struct StateFamily {
    pub family: Family,
    pub p: Option<f64>,
    pub dims: DimList,
}

/// Either kind of state, as produced by generators and the file loader.
#[derive(Debug, Clone)]
pub enum State {
    Pure(PureState),
    Density(DensityMatrix),
}

impl State {
    pub fn dims(&self) -> &DimList {
        match self {
            State::Pure(s) => s.dims(),
            State::Density(s) => s.dims(),
        }
    }

    /// View as a density matrix, promoting pure states to projectors.
    pub fn density(&self) -> DensityMatrix {
        match self {
            State::Pure(s) => s.to_density(),
            State::Density(s) => s.clone(),
        }
    }
}

impl StateFamily {
    pub fn new(family: Family, p: Option<f64>, dims: DimList) -> Result<Self> {
        match family {
            Family::WMix | Family::GhzMix => {
                if dims.dims() != [2, 2, 2] {
                    return Err(Error::InvalidDims(format!(
                        "{family} requires three qubits, got dims {dims}"
                    )));
                }
                let p = p.ok_or_else(|| {
                    Error::InvalidParameter(format!("{family} requires a mixing parameter p"))
                })?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidParameter(format!("p={p} outside [0,1]")));
                }
            }
            Family::W => {
                if dims.common_dim() != Some(2) {
                    return Err(Error::InvalidDims(
                        "the W family is defined on qubits".into(),
                    ));
                }
            }
            Family::Bell => {
                if dims.dims() != [2, 2] {
                    return Err(Error::InvalidDims("bell requires dims 2,2".into()));
                }
            }
            Family::Ghz => {
                if dims.common_dim().is_none() {
                    return Err(Error::InvalidDims(
                        "GHZ requires equal local dimensions".into(),
                    ));
                }
            }
            Family::Product | Family::Haar => {}
        }
        Ok(StateFamily { family, p, dims })
    }

    /// Materialize the family member; `seed` only affects `haar`.
    pub fn build(&self, seed: u64) -> Result<State> {
        let n = self.dims.n_parties();
        Ok(match self.family {
            Family::Ghz => State::Pure(make_ghz(self.dims.dim_of(0), n)?),
            Family::W => State::Pure(make_w(n)?),
            Family::Bell => State::Pure(make_bell()),
            Family::Product => State::Pure(make_product(self.dims.clone())),
            Family::Haar => State::Pure(haar_random_pure(&self.dims, seed)),
            Family::WMix => {
                let p = self.p.expect("validated in new");
                State::Density(isotropic_mix(&make_w(3)?, p)?)
            }
            Family::GhzMix => {
                let p = self.p.expect("validated in new");
                State::Density(isotropic_mix(&make_ghz(2, 3)?, p)?)
            }
        })
    }

    /// For the mixture families, the state at a given p (used by scans).
    pub fn at_p(&self, p: f64) -> Result<DensityMatrix> {
        match self.family {
            Family::WMix => isotropic_mix(&make_w(3)?, p),
            Family::GhzMix => isotropic_mix(&make_ghz(2, 3)?, p),
            _ => Err(Error::InvalidParameter(format!(
                "family {} is not parameterized by p",
                self.family
            ))),
        }
    }
}

// ---------------------------------------------------------------------
// State file format (line-oriented UTF-8):
//   QSTATE 1
//   kind pure | kind density
//   dims d1 d2 ... dN
//   one `re im` entry per line; D lines in basis order for pure states,
//   D^2 lines row-major for density matrices. `#` starts a comment line.
// ---------------------------------------------------------------------

fn write_entry<W: Write>(w: &mut W, z: C64) -> Result<()> {
    // 17 significant digits round-trip f64 exactly.
    writeln!(w, "{:.16e} {:.16e}", z.re, z.im)?;
    Ok(())
}

pub fn save_state<W: Write>(w: &mut W, state: &State) -> Result<()> {
    writeln!(w, "QSTATE 1")?;
    match state {
        State::Pure(psi) => {
            writeln!(w, "kind pure")?;
            writeln!(
                w,
                "dims {}",
                psi.dims()
                    .dims()
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            )?;
            for k in 0..psi.dim() {
                write_entry(w, psi.amplitudes()[k])?;
            }
        }
        State::Density(rho) => {
            writeln!(w, "kind density")?;
            writeln!(
                w,
                "dims {}",
                rho.dims()
                    .dims()
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            )?;
            let d = rho.dim();
            for i in 0..d {
                for j in 0..d {
                    write_entry(w, rho.matrix()[(i, j)])?;
                }
            }
        }
    }
    Ok(())
}

pub fn save_state_to_path(path: &std::path::Path, state: &State) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    save_state(&mut file, state)
}

struct RawStateFile {
    kind: String,
    dims: DimList,
    entries: Vec<C64>,
}

fn parse_state_file<R: BufRead>(r: R) -> Result<RawStateFile> {
    let mut lines = r
        .lines()
        .collect::<std::io::Result<Vec<String>>>()?
        .into_iter()
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty() && !l.starts_with('#'));

    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedFile("empty file".into()))?;
    if header != "QSTATE 1" {
        return Err(Error::MalformedFile(format!(
            "expected header 'QSTATE 1', found '{header}'"
        )));
    }
    let kind_line = lines
        .next()
        .ok_or_else(|| Error::MalformedFile("missing kind line".into()))?;
    let kind = match kind_line.strip_prefix("kind ") {
        Some(k @ ("pure" | "density")) => k.to_string(),
        _ => {
            return Err(Error::MalformedFile(format!(
                "expected 'kind pure' or 'kind density', found '{kind_line}'"
            )))
        }
    };
    let dims_line = lines
        .next()
        .ok_or_else(|| Error::MalformedFile("missing dims line".into()))?;
    let dims_str = dims_line
        .strip_prefix("dims ")
        .ok_or_else(|| Error::MalformedFile(format!("expected 'dims ...', found '{dims_line}'")))?;
    let dims_vec = dims_str
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::MalformedFile(format!("bad dimension token '{t}'")))
        })
        .collect::<Result<Vec<usize>>>()?;
    let dims = DimList::new(dims_vec)?;

    let mut entries = Vec::new();
    for line in lines {
        let mut it = line.split_whitespace();
        let re = it
            .next()
            .ok_or_else(|| Error::MalformedFile(format!("empty entry line '{line}'")))?;
        let im = it.next().ok_or_else(|| {
            Error::MalformedFile(format!("entry line '{line}' lacks an imaginary part"))
        })?;
        if it.next().is_some() {
            return Err(Error::MalformedFile(format!(
                "entry line '{line}' has more than two fields"
            )));
        }
        let re: f64 = re
            .parse()
            .map_err(|_| Error::MalformedFile(format!("bad float '{re}'")))?;
        let im: f64 = im
            .parse()
            .map_err(|_| Error::MalformedFile(format!("bad float '{im}'")))?;
        entries.push(C64::new(re, im));
    }
    Ok(RawStateFile {
        kind,
        dims,
        entries,
    })
}

/// Load a state file, validating invariants at the file tolerance
/// (1e-8 on norm/PSD/trace).
pub fn load_state<R: BufRead>(r: R) -> Result<State> {
    let raw = parse_state_file(r)?;
    let d = raw.dims.total();
    match raw.kind.as_str() {
        "pure" => {
            if raw.entries.len() != d {
                return Err(Error::MalformedFile(format!(
                    "pure state on dims {} needs {} amplitude lines, found {}",
                    raw.dims,
                    d,
                    raw.entries.len()
                )));
            }
            let amps = CVector::from_vec(raw.entries);
            Ok(State::Pure(PureState::with_tol(amps, raw.dims, LOAD_TOL)?))
        }
        _ => {
            if raw.entries.len() != d * d {
                return Err(Error::MalformedFile(format!(
                    "density matrix on dims {} needs {} entry lines, found {}",
                    raw.dims,
                    d * d,
                    raw.entries.len()
                )));
            }
            let matrix = DMatrix::from_row_iterator(d, d, raw.entries);
            Ok(State::Density(DensityMatrix::with_tol(
                matrix, raw.dims, LOAD_TOL,
            )?))
        }
    }
}

pub fn load_state_from_path(path: &std::path::Path) -> Result<State> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    load_state(file)
}

/// Load a Hermitian operator (e.g. an entanglement witness) through the
/// same format: `kind density` with no trace-one or PSD enforcement.
pub fn load_operator<R: BufRead>(r: R) -> Result<(CMatrix, DimList)> {
    let raw = parse_state_file(r)?;
    if raw.kind != "density" {
        return Err(Error::MalformedFile("operators use 'kind density'".into()));
    }
    let d = raw.dims.total();
    if raw.entries.len() != d * d {
        return Err(Error::MalformedFile(format!(
            "operator on dims {} needs {} entry lines, found {}",
            raw.dims,
            d * d,
            raw.entries.len()
        )));
    }
    let matrix = DMatrix::from_row_iterator(d, d, raw.entries);
    Ok((matrix, raw.dims))
}

pub fn load_operator_from_path(path: &std::path::Path) -> Result<(CMatrix, DimList)> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    load_operator(file)
}
