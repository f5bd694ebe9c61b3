//! Bipartitions of the parties, antisymmetric rotation generators, and
//! their embedding as full-space generator-pair operators.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{self, CMatrix, DimList, C64};

/// Split of the parties {0..N-1} into two nonempty groups. Canonical
/// form keeps party 0 on the left, so each unordered split appears once;
/// for N parties there are exactly 2^(N-1) - 1 of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    pub fn new(left: Vec<usize>, n_parties: usize) -> Result<Self> {
        let mut left = left;
        left.sort_unstable();
        left.dedup();
        if left.is_empty() || left.len() >= n_parties {
            return Err(Error::InvalidParameter(
                "bipartition sides must both be nonempty".into(),
            ));
        }
        if left[0] != 0 {
            return Err(Error::InvalidParameter(
                "canonical bipartitions keep party 1 on the left".into(),
            ));
        }
        if *left.last().unwrap() >= n_parties {
            return Err(Error::InvalidParameter(format!(
                "party index {} out of range for {} parties",
                left.last().unwrap(),
                n_parties
            )));
        }
        let right: Vec<usize> = (0..n_parties).filter(|p| !left.contains(p)).collect();
        Ok(Bipartition { left, right })
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn n_parties(&self) -> usize {
        self.left.len() + self.right.len()
    }

    /// 1-based label such as "12|3".
    pub fn label(&self) -> String {
        let side = |v: &[usize]| {
            v.iter()
                .map(|p| (p + 1).to_string())
                .collect::<Vec<_>>()
                .join("")
        };
        format!("{}|{}", side(&self.left), side(&self.right))
    }
}

impl std::fmt::Display for Bipartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// All canonical bipartitions in lexicographic order of the left side.
pub fn enumerate_bipartitions(n: usize) -> Result<Vec<Bipartition>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "bipartitions need at least 2 parties, got {n}"
        )));
    }
    let mut out = Vec::with_capacity((1usize << (n - 1)) - 1);
    for mask in 0..(1u64 << (n - 1)) {
        let mut left = vec![0usize];
        for p in 1..n {
            if mask >> (p - 1) & 1 == 1 {
                left.push(p);
            }
        }
        if left.len() == n {
            continue;
        }
        out.push(Bipartition::new(left, n)?);
    }
    out.sort_by(|a, b| a.left.cmp(&b.left));
    Ok(out)
}

/// Identifies the antisymmetric generator E_pq of the rotation group on
/// a side of dimension D; there are D(D-1)/2 of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GeneratorIndex {
    pub p: usize,
    pub q: usize,
}

impl GeneratorIndex {
    pub fn new(p: usize, q: usize, dim: usize) -> Result<Self> {
        if p >= q || q >= dim {
            return Err(Error::GeneratorIndexOutOfRange { p, q, dim });
        }
        Ok(GeneratorIndex { p, q })
    }
}

impl std::fmt::Display for GeneratorIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// All generator indices for dimension `d`, ordered lexicographically.
pub fn generator_indices(d: usize) -> Vec<GeneratorIndex> {
    let mut out = Vec::with_capacity(d * (d - 1) / 2);
    for p in 0..d {
        for q in (p + 1)..d {
            out.push(GeneratorIndex { p, q });
        }
    }
    out
}

/// The antisymmetric generator: E[p,q] = 1, E[q,p] = -1, zero elsewhere.
pub fn so_generator(dim: usize, idx: GeneratorIndex) -> Result<CMatrix> {
    if idx.q >= dim || idx.p >= idx.q {
        return Err(Error::GeneratorIndexOutOfRange {
            p: idx.p,
            q: idx.q,
            dim,
        });
    }
    let mut e = CMatrix::zeros(dim, dim);
    e[(idx.p, idx.q)] = C64::new(1.0, 0.0);
    e[(idx.q, idx.p)] = C64::new(-1.0, 0.0);
    Ok(e)
}

/// A generator pair embedded as an operator on the full space in
/// canonical party order.
#[derive(Debug, Clone)]
pub struct PairOperator {
    pub bipartition: Bipartition,
    pub left_gen: GeneratorIndex,
    pub right_gen: GeneratorIndex,
    pub matrix: CMatrix,
}

/// Build the full-space operator for one generator pair: the Kronecker
/// product of the two side generators (left side first, each side's basis
/// ordered lexicographically over its parties in ascending order),
/// permuted back to canonical party order when the bipartition groups
/// non-adjacent parties.
pub fn embed_pair_operator(
    bip: &Bipartition,
    left_idx: GeneratorIndex,
    right_idx: GeneratorIndex,
    dims: &DimList,
) -> Result<PairOperator> {
    if bip.n_parties() != dims.n_parties() {
        return Err(Error::DimensionMismatch(format!(
            "bipartition {} covers {} parties but dims {} has {}",
            bip,
            bip.n_parties(),
            dims,
            dims.n_parties()
        )));
    }
    let d_left = dims.subset_dim(&bip.left);
    let d_right = dims.subset_dim(&bip.right);
    let l = so_generator(d_left, left_idx)?;
    let r = so_generator(d_right, right_idx)?;
    let grouped = tensor::kron(&l, &r);

    // Factor ordering after the kron is left parties then right parties;
    // perm sends the party at each position to its canonical slot.
    let order: Vec<usize> = bip.left.iter().chain(bip.right.iter()).cloned().collect();
    let already_canonical = order.windows(2).all(|w| w[0] < w[1]);
    let matrix = if already_canonical {
        grouped
    } else {
        let grouped_dims = DimList::new(order.iter().map(|&p| dims.dim_of(p)).collect())?;
        tensor::permute_subsystems(&grouped, &grouped_dims, &order)?
    };
    Ok(PairOperator {
        bipartition: bip.clone(),
        left_gen: left_idx,
        right_gen: right_idx,
        matrix,
    })
}

/// Lazily yield every generator-pair operator for one bipartition, in
/// deterministic lexicographic order.
pub fn pair_operators<'a>(
    bip: &'a Bipartition,
    dims: &'a DimList,
) -> impl Iterator<Item = Result<PairOperator>> + 'a {
    let d_left = dims.subset_dim(&bip.left);
    let d_right = dims.subset_dim(&bip.right);
    generator_indices(d_left).into_iter().flat_map(move |lg| {
        generator_indices(d_right)
            .into_iter()
            .map(move |rg| embed_pair_operator(bip, lg, rg, dims))
    })
}

/// Number of generator pairs for one bipartition.
pub fn pair_count(bip: &Bipartition, dims: &DimList) -> usize {
    let dl = dims.subset_dim(&bip.left);
    let dr = dims.subset_dim(&bip.right);
    (dl * (dl - 1) / 2) * (dr * (dr - 1) / 2)
}

/// Lazily yield every generator-pair operator across all bipartitions.
pub fn all_pair_operators(
    dims: &DimList,
) -> Result<impl Iterator<Item = Result<PairOperator>> + '_> {
    let bips = enumerate_bipartitions(dims.n_parties())?;
    Ok(bips.into_iter().flat_map(move |bip| {
        let d_left = dims.subset_dim(bip.left());
        let d_right = dims.subset_dim(bip.right());
        let mut pairs = Vec::with_capacity(pair_count(&bip, dims));
        for lg in generator_indices(d_left) {
            for rg in generator_indices(d_right) {
                pairs.push((bip.clone(), lg, rg));
            }
        }
        pairs
            .into_iter()
            .map(move |(bip, lg, rg)| embed_pair_operator(&bip, lg, rg, dims))
    }))
}
