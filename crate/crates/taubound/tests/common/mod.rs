//! Independent oracles shared by the integration suites. Everything here
//! deliberately avoids the library's generator enumeration and its
//! general eigensolver path: spectra go through the Hermitian square-root
//! route and reference operators are written out by hand.
#![allow(dead_code)] // each test binary uses its own subset

use taubound::states::DensityMatrix;
use taubound::tensor::{self, CMatrix, C64};
use taubound::PureState;

/// sigma_y tensor sigma_y, written out explicitly.
pub fn spin_flip_operator() -> CMatrix {
    let j = C64::new(0.0, 1.0);
    let nj = C64::new(0.0, -1.0);
    let o = C64::new(0.0, 0.0);
    let sy = CMatrix::from_row_slice(2, 2, &[o, nj, j, o]);
    tensor::kron(&sy, &sy)
}

/// Spin-flip lambda values of a two-party (or any) state for an explicit
/// flip operator, via the Hermitian route: the spectrum of the PSD matrix
/// sqrt(rho) rho~ sqrt(rho), whose eigenvalues match those of rho rho~.
///
/// Eigenvalues below the library's documented clamp tolerance count as
/// the zeros of the rank-deficient product; both routes must classify
/// that window identically or the square root turns the classification
/// difference into an O(sqrt(tol)) disagreement.
pub fn hermitian_route_lambdas(rho: &CMatrix, flip: &CMatrix) -> Vec<f64> {
    let rho_tilde = flip * rho.map(|z| z.conj()) * flip;
    let root = tensor::sqrtm_psd(rho);
    let inner = &root * rho_tilde * &root;
    tensor::hermitian_eigenvalues(&inner)
        .into_iter()
        .map(|e| if e > tensor::CLAMP_TOL { e.sqrt() } else { 0.0 })
        .collect()
}

/// Two-qubit concurrence by the closed-form spin-flip recipe:
/// max{0, l1 - l2 - l3 - l4} with l the descending square roots of the
/// eigenvalues of rho (YY rho* YY).
pub fn wootters_concurrence(rho: &DensityMatrix) -> f64 {
    assert_eq!(rho.dim(), 4, "two-qubit oracle");
    let l = hermitian_route_lambdas(rho.matrix(), &spin_flip_operator());
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

/// Literal full-index minor sum of the pure-state concurrence: for every
/// bipartition, reshape the amplitudes into a matrix and accumulate
/// |M[u,k] M[v,m] - M[u,m] M[v,k]|^2 over all four indices, scaled by
/// d/(2m(d-1)). Every unordered minor is counted four times here, which
/// is the constant the oracle tests pin down.
pub fn minor_sum_c_squared(psi: &PureState) -> f64 {
    let dims = psi.dims();
    let n = dims.n_parties();
    let d = dims.common_dim().expect("equal local dimensions") as f64;
    let m = (1u64 << (n - 1)) as f64 - 1.0;
    let prefactor = d / (2.0 * m * (d - 1.0));

    let mut total = 0.0;
    for bip in taubound::enumerate_bipartitions(n).unwrap() {
        let rows = dims.subset_dim(bip.left());
        let cols = dims.subset_dim(bip.right());
        // amplitude matrix in the (left parties, right parties) grouping
        let mut mat = CMatrix::zeros(rows, cols);
        for flat in 0..dims.total() {
            let digits = dims.decode(flat);
            let mut r = 0usize;
            for &p in bip.left() {
                r = r * dims.dim_of(p) + digits[p];
            }
            let mut c = 0usize;
            for &p in bip.right() {
                c = c * dims.dim_of(p) + digits[p];
            }
            mat[(r, c)] = psi.amplitudes()[flat];
        }
        for u in 0..rows {
            for v in 0..rows {
                for k in 0..cols {
                    for l in 0..cols {
                        let minor = mat[(u, k)] * mat[(v, l)] - mat[(u, l)] * mat[(v, k)];
                        total += minor.norm_sqr();
                    }
                }
            }
        }
    }
    prefactor * total
}

/// Max absolute difference of two sorted spectra padded to equal length.
pub fn spectrum_distance(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    let len = a.len().max(b.len());
    a.resize(len, 0.0);
    b.resize(len, 0.0);
    a.sort_by(|x, y| y.partial_cmp(x).unwrap());
    b.sort_by(|x, y| y.partial_cmp(x).unwrap());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
