//! Comparison entanglement detectors: the PPT test, witness
//! expectations, and the N-qubit correlation-matrix criterion based on
//! the Ky Fan norm of tensor unfoldings.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::states::DensityMatrix;
use crate::tensor::{self, CMatrix, C64};

/// Minimum partial-transpose eigenvalue above this bound counts as
/// positive; absorbs rounding on large mixtures.
pub const PPT_TOL: f64 = -1e-9;

/// A Ky Fan norm above 1 by more than this margin flags entanglement.
pub const KF_TOL: f64 = 1e-9;

const PAULIS: [[[C64; 2]; 2]; 3] = {
    const O: C64 = C64::new(0.0, 0.0);
    const I: C64 = C64::new(1.0, 0.0);
    const NI: C64 = C64::new(-1.0, 0.0);
    const J: C64 = C64::new(0.0, 1.0);
    const NJ: C64 = C64::new(0.0, -1.0);
    [
        [[O, I], [I, O]],  // x
        [[O, NJ], [J, O]], // y
        [[I, O], [O, NI]], // z
    ]
};

fn pauli(axis: usize) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| PAULIS[axis][i][j])
}

/// Order-N real tensor of Pauli correlations t = Tr(rho sigma x ... x
/// sigma), every index over {x,y,z}. Entries are stored with the last
/// party's index fastest (base-3, lower party index more significant).
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationTensor {
    pub n_parties: usize,
    pub entries: Vec<f64>,
}

impl CorrelationTensor {
    /// Entry by per-party axis indices, each in {0,1,2} for x,y,z.
    pub fn get(&self, axes: &[usize]) -> f64 {
        assert_eq!(axes.len(), self.n_parties);
        let flat = axes.iter().fold(0usize, |acc, &a| acc * 3 + a);
        self.entries[flat]
    }

    /// Mode-k unfolding: 3 x 3^(N-1) matrix; rows carry party k's index,
    /// columns the remaining indices lexicographically with lower party
    /// index more significant.
    pub fn unfold(&self, mode: usize) -> CMatrix {
        let n = self.n_parties;
        let cols = self.entries.len() / 3;
        let mut out = CMatrix::zeros(3, cols);
        let mut axes = vec![0usize; n];
        for (flat, &t) in self.entries.iter().enumerate() {
            let mut rem = flat;
            for k in (0..n).rev() {
                axes[k] = rem % 3;
                rem /= 3;
            }
            let row = axes[mode];
            let col = axes
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != mode)
                .fold(0usize, |acc, (_, &a)| acc * 3 + a);
            out[(row, col)] = C64::new(t, 0.0);
        }
        out
    }
}

/// Pauli correlation tensor of an N-qubit state.
pub fn correlation_tensor(rho: &DensityMatrix) -> Result<CorrelationTensor> {
    let dims = rho.dims();
    if dims.common_dim() != Some(2) {
        return Err(Error::InvalidDims(format!(
            "the correlation-matrix criterion is defined for qubits, got dims {dims}"
        )));
    }
    let n = dims.n_parties();
    let total = 3usize.pow(n as u32);
    let mut entries = Vec::with_capacity(total);
    let mut axes = vec![0usize; n];
    for flat in 0..total {
        let mut rem = flat;
        for k in (0..n).rev() {
            axes[k] = rem % 3;
            rem /= 3;
        }
        let mut op = pauli(axes[0]);
        for &a in &axes[1..] {
            op = tensor::kron(&op, &pauli(a));
        }
        entries.push((rho.matrix() * op).trace().re);
    }
    Ok(CorrelationTensor {
        n_parties: n,
        entries,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KfReport {
    /// Largest Ky Fan norm over the mode unfoldings.
    pub kf_norm: f64,
    /// Mode (party index) attaining it.
    pub mode: usize,
    pub entangled: bool,
}

/// Correlation-matrix criterion: fully separable N-qubit states satisfy
/// max_n ||T_n||_KF <= 1, so a larger value certifies entanglement.
pub fn kf_criterion(t: &CorrelationTensor) -> KfReport {
    let mut best = f64::NEG_INFINITY;
    let mut mode = 0;
    for k in 0..t.n_parties {
        let norm: f64 = tensor::singular_values(&t.unfold(k)).iter().sum();
        if norm > best {
            best = norm;
            mode = k;
        }
    }
    KfReport {
        kf_norm: best,
        mode,
        entangled: best > 1.0 + KF_TOL,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SubsetFlag {
    /// 1-based party indices of the transposed subset.
    pub subset: Vec<usize>,
    pub min_eigenvalue: f64,
    pub positive: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PptReport {
    pub subsets: Vec<SubsetFlag>,
    pub all_positive: bool,
}

/// Partial-transpose test over every nonempty proper subset of parties.
pub fn ppt_check(rho: &DensityMatrix) -> Result<PptReport> {
    let dims = rho.dims();
    let n = dims.n_parties();
    let mut subsets = Vec::new();
    let mut all_positive = true;
    for mask in 1..(1u64 << n) - 1 {
        let subset: Vec<usize> = (0..n).filter(|p| mask >> p & 1 == 1).collect();
        let pt = tensor::partial_transpose(rho.matrix(), dims, &subset)?;
        let eigs = tensor::hermitian_eigenvalues(&pt);
        let min_eigenvalue = *eigs.last().expect("nonempty spectrum");
        let positive = min_eigenvalue >= PPT_TOL;
        all_positive &= positive;
        subsets.push(SubsetFlag {
            subset: subset.iter().map(|p| p + 1).collect(),
            min_eigenvalue,
            positive,
        });
    }
    subsets.sort_by(|a, b| (a.subset.len(), &a.subset).cmp(&(b.subset.len(), &b.subset)));
    Ok(PptReport {
        subsets,
        all_positive,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub value: f64,
    pub entangled: bool,
}

/// Expectation Tr(W rho) of a Hermitian witness operator; a negative
/// value certifies entanglement.
pub fn witness_expectation(rho: &DensityMatrix, witness: &CMatrix) -> Result<WitnessReport> {
    if witness.nrows() != rho.dim() || witness.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "witness is {}x{} but the state has dimension {}",
            witness.nrows(),
            witness.ncols(),
            rho.dim()
        )));
    }
    if !tensor::is_hermitian(witness, 1e-8) {
        return Err(Error::InvalidParameter(
            "witness operator is not Hermitian".into(),
        ));
    }
    let value = (witness * rho.matrix()).trace().re;
    Ok(WitnessReport {
        value,
        entangled: value < 0.0,
    })
}

/// Combined detector report for one state.
#[derive(Debug, Clone, Serialize)]
pub struct CriteriaReport {
    pub tau: f64,
    pub tau_entangled: bool,
    pub ppt: PptReport,
    pub witness: Option<WitnessReport>,
    pub kf: Option<KfReport>,
}
