//! Dense complex matrix arithmetic and multipartite index manipulation.
//!
//! Conventions (fixed once, everything downstream depends on them):
//! entries are addressed in row-major logical order, and multipartite
//! basis indexing is big-endian: party 1 is the most significant digit,
//! so for dims (d1,...,dN) the basis state |i1,...,iN> has flat index
//! i1*(d2*...*dN) + i2*(d3*...*dN) + ... + iN.
//!
//! Storage and the eigenvalue/SVD kernels are delegated to `nalgebra`;
//! everything index-related (tensor products, subsystem permutation,
//! partial trace, partial transpose) is implemented here.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Default tolerance below which eigenvalues of PSD-product matrices are
/// treated as numerical zeros. An error, not a silent clamp, is raised
/// when imaginary parts exceed it.
pub const CLAMP_TOL: f64 = 1e-9;

/// Ordered list of subsystem dimensions annotating a vector or matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimList(Vec<usize>);

impl DimList {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDims("empty dimension list".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDims(format!(
                "subsystem dimension {d} is below 2"
            )));
        }
        Ok(DimList(dims))
    }

    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        DimList::new(vec![d; n])
    }

    /// Number of parties.
    pub fn n_parties(&self) -> usize {
        self.0.len()
    }

    /// Total Hilbert-space dimension (product of subsystem dimensions).
    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn dim_of(&self, party: usize) -> usize {
        self.0[party]
    }

    /// All local dimensions equal? Returns the common dimension if so.
    pub fn common_dim(&self) -> Option<usize> {
        let d = self.0[0];
        self.0.iter().all(|&x| x == d).then_some(d)
    }

    /// Check that this list annotates a space of dimension `dim`.
    pub fn check_total(&self, dim: usize) -> Result<()> {
        if self.total() != dim {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} have product {} but annotate dimension {}",
                self.0,
                self.total(),
                dim
            )));
        }
        Ok(())
    }

    /// Product of the dimensions of the given parties.
    pub fn subset_dim(&self, parties: &[usize]) -> usize {
        parties.iter().map(|&p| self.0[p]).product()
    }

    /// Decode a flat index into per-party digits (big-endian).
    pub fn decode(&self, mut flat: usize) -> Vec<usize> {
        let mut digits = vec![0usize; self.0.len()];
        for (k, &d) in self.0.iter().enumerate().rev() {
            digits[k] = flat % d;
            flat /= d;
        }
        digits
    }

    /// Encode per-party digits into a flat index (big-endian).
    pub fn encode(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(self.0.iter())
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }
}

impl std::fmt::Display for DimList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Tensor (Kronecker) product with the standard block layout.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

fn validate_square(m: &CMatrix, dims: &DimList) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expected square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    dims.check_total(m.nrows())
}

fn validate_perm(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "permutation length {} does not match {} parties",
            perm.len(),
            n
        )));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidParameter(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Map of flat indices realizing a subsystem permutation.
///
/// `perm[k]` is the new position of party `k`; the returned table sends
/// each old flat index to the flat index in the permuted ordering.
fn permutation_index_map(dims: &DimList, perm: &[usize]) -> Vec<usize> {
    let n = dims.n_parties();
    let mut new_dims = vec![0usize; n];
    for k in 0..n {
        new_dims[perm[k]] = dims.dim_of(k);
    }
    let new_dims = DimList(new_dims);
    let total = dims.total();
    let mut map = vec![0usize; total];
    let mut new_digits = vec![0usize; n];
    for (flat, slot) in map.iter_mut().enumerate() {
        let digits = dims.decode(flat);
        for k in 0..n {
            new_digits[perm[k]] = digits[k];
        }
        *slot = new_dims.encode(&new_digits);
    }
    map
}

/// Reorder the tensor factors of a square operator.
///
/// `perm[k]` gives the new position of party `k` (0-based).
pub fn permute_subsystems(m: &CMatrix, dims: &DimList, perm: &[usize]) -> Result<CMatrix> {
    validate_square(m, dims)?;
    validate_perm(perm, dims.n_parties())?;
    let map = permutation_index_map(dims, perm);
    let total = dims.total();
    let mut out = CMatrix::zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Reorder the tensor factors of a state vector; same convention as
/// [`permute_subsystems`].
pub fn permute_vector(v: &CVector, dims: &DimList, perm: &[usize]) -> Result<CVector> {
    dims.check_total(v.len())?;
    validate_perm(perm, dims.n_parties())?;
    let map = permutation_index_map(dims, perm);
    let mut out = CVector::zeros(v.len());
    for i in 0..v.len() {
        out[map[i]] = v[i];
    }
    Ok(out)
}

fn validate_subset(subset: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &p in subset {
        if p >= n {
            return Err(Error::InvalidParameter(format!(
                "party index {p} out of range for {n} parties"
            )));
        }
        if seen[p] {
            return Err(Error::InvalidParameter(format!(
                "duplicate party index {p} in subset"
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Trace out every party not listed in `keep`; the reduced operator lives
/// on the kept parties in ascending party order.
pub fn partial_trace(rho: &CMatrix, dims: &DimList, keep: &[usize]) -> Result<CMatrix> {
    validate_square(rho, dims)?;
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    validate_subset(keep, dims.n_parties())?;
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let n = dims.n_parties();
    let drop: Vec<usize> = (0..n).filter(|p| !keep.contains(p)).collect();
    if drop.is_empty() {
        return Ok(rho.clone());
    }

    let keep_dims = DimList(keep.iter().map(|&p| dims.dim_of(p)).collect());
    let drop_dims = DimList(drop.iter().map(|&p| dims.dim_of(p)).collect());
    let dk = keep_dims.total();
    let de = drop_dims.total();

    // full(k, e): flat index with kept digits k and dropped digits e.
    let mut full = vec![0usize; dk * de];
    let mut digits = vec![0usize; n];
    for k in 0..dk {
        let kd = keep_dims.decode(k);
        for e in 0..de {
            let ed = drop_dims.decode(e);
            for (pos, &p) in keep.iter().enumerate() {
                digits[p] = kd[pos];
            }
            for (pos, &p) in drop.iter().enumerate() {
                digits[p] = ed[pos];
            }
            full[k * de + e] = dims.encode(&digits);
        }
    }

    let mut out = CMatrix::zeros(dk, dk);
    for r in 0..dk {
        for c in 0..dk {
            let mut acc = C64::new(0.0, 0.0);
            for e in 0..de {
                acc += rho[(full[r * de + e], full[c * de + e])];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Transpose the indices of the listed parties only.
pub fn partial_transpose(rho: &CMatrix, dims: &DimList, subset: &[usize]) -> Result<CMatrix> {
    validate_square(rho, dims)?;
    validate_subset(subset, dims.n_parties())?;
    let total = dims.total();
    let n = dims.n_parties();
    let in_subset: Vec<bool> = (0..n).map(|p| subset.contains(&p)).collect();
    let mut out = CMatrix::zeros(total, total);
    for i in 0..total {
        let di = dims.decode(i);
        for j in 0..total {
            let dj = dims.decode(j);
            let mut ri = di.clone();
            let mut cj = dj.clone();
            for p in 0..n {
                if in_subset[p] {
                    ri[p] = dj[p];
                    cj[p] = di[p];
                }
            }
            out[(dims.encode(&ri), dims.encode(&cj))] = rho[(i, j)];
        }
    }
    Ok(out)
}

/// All complex eigenvalues, no assumptions on structure.
fn complex_eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    m.eigenvalues()
        .map(|v| v.iter().cloned().collect())
        .ok_or(Error::EigenFailed)
}

/// Real spectrum with separate tolerances for the imaginary-part check
/// and the small-real clamp; `eig_real_spectrum` uses the same value for
/// both.
pub(crate) fn real_spectrum_with(m: &CMatrix, imag_tol: f64, clamp_tol: f64) -> Result<Vec<f64>> {
    let ev = complex_eigenvalues(m)?;
    let max_imag = ev.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if max_imag > imag_tol {
        return Err(Error::SpectralContract {
            max_imag,
            tol: imag_tol,
        });
    }
    let mut re: Vec<f64> = ev
        .iter()
        .map(|z| if z.re < clamp_tol { 0.0 } else { z.re })
        .collect();
    re.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(re)
}

/// Eigenvalues of a matrix whose spectrum is real and nonnegative up to
/// numerical noise (a product of two PSD matrices). Imaginary residues
/// above `clamp_tol` raise a spectral-contract error since they signal an
/// upstream Hermiticity or positivity bug; real parts below `clamp_tol`
/// are clamped to zero. Returned descending.
pub fn eig_real_spectrum(m: &CMatrix, clamp_tol: f64) -> Result<Vec<f64>> {
    real_spectrum_with(m, clamp_tol, clamp_tol)
}

/// Eigenvalues of a Hermitian matrix, descending. The caller asserts
/// Hermiticity; only the real parts produced by the symmetric solver are
/// returned.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .cloned()
        .collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

/// Descending nonnegative singular values.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.singular_values().iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest |M[i,j] - conj(M[j,i])| over all entries.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.nrows() == m.ncols() && hermiticity_defect(m) <= tol
}

/// Principal square root of a PSD Hermitian matrix; negative eigenvalue
/// noise is clamped to zero. Used by the Hermitian cross-check route.
pub fn sqrtm_psd(m: &CMatrix) -> CMatrix {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &w) in eig.eigenvalues.iter().enumerate() {
        let s = if w > 0.0 { w.sqrt() } else { 0.0 };
        let v = eig.eigenvectors.column(k);
        out += (v * v.adjoint()).scale(s);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn so2() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[r(0.0), r(1.0), r(-1.0), r(0.0)])
    }

    #[test]
    fn kron_identity_case() {
        let i2 = identity(2);
        assert_eq!(kron(&i2, &i2), identity(4));
    }

    #[test]
    fn kron_dimension_arithmetic() {
        let a = CMatrix::zeros(2, 3);
        let b = CMatrix::zeros(4, 5);
        let k = kron(&a, &b);
        assert_eq!((k.nrows(), k.ncols()), (8, 15));
    }

    #[test]
    fn kron_of_rotation_generators() {
        // Hand-expanded 4x4: nonzero at (0,3)=1, (1,2)=-1, (2,1)=-1, (3,0)=1.
        let l = so2();
        let k = kron(&l, &l);
        for i in 0..4 {
            for j in 0..4 {
                let expect = match (i, j) {
                    (0, 3) | (3, 0) => 1.0,
                    (1, 2) | (2, 1) => -1.0,
                    _ => 0.0,
                };
                assert_abs_diff_eq!(k[(i, j)].re, expect);
                assert_abs_diff_eq!(k[(i, j)].im, 0.0);
            }
        }
    }

    #[test]
    fn permute_identity_is_noop() {
        let dims = DimList::new(vec![2, 2]).unwrap();
        let m = CMatrix::from_fn(4, 4, |i, j| C64::new(i as f64, j as f64));
        let p = permute_subsystems(&m, &dims, &[0, 1]).unwrap();
        assert_eq!(p, m);
    }

    #[test]
    fn permute_swap_relabels_basis() {
        // |01><01| -> |10><10|
        let dims = DimList::new(vec![2, 2]).unwrap();
        let mut m = CMatrix::zeros(4, 4);
        m[(1, 1)] = r(1.0);
        let p = permute_subsystems(&m, &dims, &[1, 0]).unwrap();
        let mut expect = CMatrix::zeros(4, 4);
        expect[(2, 2)] = r(1.0);
        assert_eq!(p, expect);
    }

    #[test]
    fn permute_then_inverse_recovers() {
        let dims = DimList::new(vec![2, 3, 2]).unwrap();
        let m = CMatrix::from_fn(12, 12, |i, j| C64::new((i * 17 + j) as f64, (i + j) as f64));
        let perm = [2usize, 0, 1];
        let mut inv = [0usize; 3];
        for k in 0..3 {
            inv[perm[k]] = k;
        }
        let out = permute_subsystems(
            &permute_subsystems(&m, &dims, &perm).unwrap(),
            &DimList::new(vec![3, 2, 2]).unwrap(),
            &inv,
        )
        .unwrap();
        let diff = (&out - &m).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff <= 1e-14);
    }

    #[test]
    fn partial_trace_of_product_factors() {
        let dims = DimList::new(vec![2, 2]).unwrap();
        let rho_a = CMatrix::from_row_slice(
            2,
            2,
            &[r(0.75), C64::new(0.1, 0.2), C64::new(0.1, -0.2), r(0.25)],
        );
        let rho_b = CMatrix::from_row_slice(
            2,
            2,
            &[r(0.5), C64::new(0.0, -0.3), C64::new(0.0, 0.3), r(0.5)],
        );
        let joint = kron(&rho_a, &rho_b);
        let back = partial_trace(&joint, &dims, &[0]).unwrap();
        let diff = (&back - &rho_a)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-12);
    }

    #[test]
    fn partial_trace_ghz_single_party() {
        // GHZ on (2,2,2), keep party 1: sum of the two diagonal blocks = I/2.
        let dims = DimList::new(vec![2, 2, 2]).unwrap();
        let mut psi = CVector::zeros(8);
        psi[0] = r(1.0 / 2f64.sqrt());
        psi[7] = r(1.0 / 2f64.sqrt());
        let rho = &psi * psi.adjoint();
        let red = partial_trace(&rho, &dims, &[0]).unwrap();
        let expect = identity(2).scale(0.5);
        let diff = (&red - &expect)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-14);
    }

    #[test]
    fn partial_trace_preserves_trace_and_rejects_empty_keep() {
        let dims = DimList::new(vec![2, 3]).unwrap();
        let m = {
            let g = CMatrix::from_fn(6, 6, |i, j| C64::new((i + 2 * j) as f64, (i * j) as f64));
            let h = &g * g.adjoint();
            let t = h.trace().re;
            h.scale(1.0 / t)
        };
        let red = partial_trace(&m, &dims, &[1]).unwrap();
        assert_abs_diff_eq!(red.trace().re, 1.0, epsilon = 1e-12);
        assert!(matches!(
            partial_trace(&m, &dims, &[]),
            Err(Error::EmptyKeepSet)
        ));
    }

    #[test]
    fn partial_transpose_full_set_is_transpose() {
        let dims = DimList::new(vec![2, 2]).unwrap();
        let m = CMatrix::from_fn(4, 4, |i, j| C64::new(i as f64, (j * j) as f64));
        let pt = partial_transpose(&m, &dims, &[0, 1]).unwrap();
        assert_eq!(pt, m.transpose());
    }

    #[test]
    fn partial_transpose_is_involution() {
        let dims = DimList::new(vec![2, 3]).unwrap();
        let m = CMatrix::from_fn(6, 6, |i, j| C64::new((i + j) as f64, (i * 3 + j) as f64));
        let twice =
            partial_transpose(&partial_transpose(&m, &dims, &[1]).unwrap(), &dims, &[1]).unwrap();
        assert_eq!(twice, m);
    }

    #[test]
    fn partial_transpose_bell_min_eigenvalue() {
        let dims = DimList::new(vec![2, 2]).unwrap();
        let mut psi = CVector::zeros(4);
        psi[0] = r(1.0 / 2f64.sqrt());
        psi[3] = r(1.0 / 2f64.sqrt());
        let rho = &psi * psi.adjoint();
        let pt = partial_transpose(&rho, &dims, &[1]).unwrap();
        let ev = hermitian_eigenvalues(&pt);
        assert_abs_diff_eq!(ev[ev.len() - 1], -0.5, epsilon = 1e-12);
    }

    #[test]
    fn eig_real_spectrum_diagonal() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![r(3.0), r(1.0), r(0.0)]));
        let ev = eig_real_spectrum(&m, CLAMP_TOL).unwrap();
        assert_eq!(ev.len(), 3);
        assert_abs_diff_eq!(ev[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn eig_real_spectrum_nilpotent() {
        let m = CMatrix::from_row_slice(2, 2, &[r(0.0), r(1.0), r(0.0), r(0.0)]);
        let ev = eig_real_spectrum(&m, CLAMP_TOL).unwrap();
        assert_eq!(ev, vec![0.0, 0.0]);
    }

    #[test]
    fn eig_real_spectrum_rank_one_projector() {
        // Bell rho with rho-tilde = rho: the product is rho itself.
        let mut psi = CVector::zeros(4);
        psi[0] = r(1.0 / 2f64.sqrt());
        psi[3] = r(1.0 / 2f64.sqrt());
        let rho = &psi * psi.adjoint();
        let ev = eig_real_spectrum(&(&rho * &rho), CLAMP_TOL).unwrap();
        assert_abs_diff_eq!(ev[0], 1.0, epsilon = 1e-10);
        assert_eq!(&ev[1..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn eig_real_spectrum_rejects_complex_spectra() {
        let m = so2(); // eigenvalues +/- i
        match eig_real_spectrum(&m, CLAMP_TOL) {
            Err(Error::SpectralContract { max_imag, .. }) => {
                assert_abs_diff_eq!(max_imag, 1.0, epsilon = 1e-12)
            }
            other => panic!("expected spectral-contract violation, got {other:?}"),
        }
    }

    #[test]
    fn singular_values_identity_and_rank_one() {
        let sv = singular_values(&identity(3));
        for s in sv {
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
        }
        let u = CVector::from_vec(vec![r(1.0), r(0.0)]);
        let v = CVector::from_vec(vec![r(0.6), r(0.8)]);
        let sv = singular_values(&(&u * v.adjoint()));
        assert_abs_diff_eq!(sv[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sv[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn singular_values_scaled_shift() {
        let m = CMatrix::from_row_slice(2, 2, &[r(0.0), r(2.0), r(0.0), r(0.0)]);
        let sv = singular_values(&m);
        assert_abs_diff_eq!(sv[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sv[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn dimlist_rejects_degenerate_dims() {
        assert!(DimList::new(vec![2, 1]).is_err());
        assert!(DimList::new(vec![]).is_err());
    }

    #[test]
    fn index_codec_roundtrip() {
        let dims = DimList::new(vec![2, 3, 4]).unwrap();
        for flat in 0..dims.total() {
            assert_eq!(dims.encode(&dims.decode(flat)), flat);
        }
        // party 1 is most significant
        assert_eq!(dims.decode(0), vec![0, 0, 0]);
        assert_eq!(dims.decode(12), vec![1, 0, 0]);
        assert_eq!(dims.decode(4), vec![0, 1, 0]);
    }

    #[test]
    fn sqrtm_squares_back() {
        let g = CMatrix::from_fn(4, 4, |i, j| {
            C64::new((i + j) as f64, (i as f64) - (j as f64))
        });
        let psd = &g * g.adjoint();
        let root = sqrtm_psd(&psd);
        let diff = (&root * &root - &psd)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-9 * frobenius_norm(&psd));
    }
}
