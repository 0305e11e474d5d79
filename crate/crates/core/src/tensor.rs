//! Sparse order-m, dimension-n tensors and the radius quantities derived
//! from their off-diagonal mass.
//!
//! Indices are 0-based throughout the library. Entries are stored in a
//! `BTreeMap` keyed by the full index tuple, so iterating a row visits its
//! tuples in lexicographic order. Every radius is a plain left-to-right sum in
//! that order; absent tuples contribute exact zeros, so the result is the same
//! as a dense odometer sweep.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance used when checking symmetry of literal-entry tensors.
pub const LITERAL_SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    order: usize,
    dim: usize,
    entries: BTreeMap<Vec<usize>, Complex64>,
    symmetric: bool,
}

impl Tensor {
    /// Builds a tensor from index tuples and values.
    ///
    /// With `symmetrize`, each tuple is a sorted representative and its value
    /// is copied to every distinct permutation. Zero values are accepted and
    /// participate in duplicate detection but are not stored.
    pub fn build<I>(order: usize, dim: usize, entries: I, symmetrize: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Complex64)>,
    {
        if order < 2 {
            return Err(Error::InvalidOrder(order));
        }
        if dim < 1 {
            return Err(Error::InvalidDim(dim));
        }

        let mut stored = BTreeMap::new();
        let mut seen: HashMap<Vec<usize>, Complex64> = HashMap::new();

        for (idx, value) in entries {
            check_tuple(&idx, order, dim)?;
            if symmetrize && idx.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::UnsortedRepresentative(idx));
            }
            if let Some(previous) = seen.get(&idx) {
                return Err(if symmetrize && *previous != value {
                    Error::ConflictingPermutation(idx)
                } else {
                    Error::DuplicateTuple(idx)
                });
            }
            seen.insert(idx.clone(), value);

            if value == Complex64::new(0.0, 0.0) {
                continue;
            }
            if symmetrize {
                let mut perm = idx;
                loop {
                    stored.insert(perm.clone(), value);
                    if !next_permutation(&mut perm) {
                        break;
                    }
                }
            } else {
                stored.insert(idx, value);
            }
        }

        Ok(Tensor {
            order,
            dim,
            entries: stored,
            symmetric: symmetrize,
        })
    }

    /// Real-valued convenience wrapper around [`Tensor::build`].
    pub fn from_real<I>(order: usize, dim: usize, entries: I, symmetrize: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        Self::build(
            order,
            dim,
            entries
                .into_iter()
                .map(|(idx, v)| (idx, Complex64::new(v, 0.0))),
            symmetrize,
        )
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        Self::build(order, dim, std::iter::empty(), true)
    }

    /// The tensor with ones on the diagonal, `I x^{m-1} = x^{[m-1]}`.
    pub fn identity(order: usize, dim: usize) -> Result<Self> {
        Self::diagonal(order, &vec![Complex64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(order: usize, diag: &[Complex64]) -> Result<Self> {
        Self::build(
            order,
            diag.len(),
            diag.iter().enumerate().map(|(i, &v)| (vec![i; order], v)),
            true,
        )
    }

    pub fn diagonal_real(order: usize, diag: &[f64]) -> Result<Self> {
        let diag: Vec<Complex64> = diag.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::diagonal(order, &diag)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether the tensor was built by symmetric expansion.
    pub fn built_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Stored (nonzero) entries in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (&[usize], Complex64)> + '_ {
        self.entries.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    /// Stored entries of row `i`, yielding the trailing `m - 1` indices.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (&[usize], Complex64)> + '_ {
        self.entries
            .range(vec![i]..vec![i + 1])
            .map(|(k, v)| (&k[1..], *v))
    }

    pub fn entry(&self, idx: &[usize]) -> Result<Complex64> {
        check_tuple(idx, self.order, self.dim)?;
        Ok(self.entries.get(idx).copied().unwrap_or_default())
    }

    /// `a_{i...i}`.
    pub fn diag(&self, i: usize) -> Complex64 {
        self.entries
            .get(&vec![i; self.order])
            .copied()
            .unwrap_or_default()
    }

    /// `a_{i j...j}`: row `i` with every trailing index equal to `j`.
    pub fn pivot(&self, i: usize, j: usize) -> Complex64 {
        let mut idx = vec![j; self.order];
        idx[0] = i;
        self.entries.get(&idx).copied().unwrap_or_default()
    }

    pub fn is_real(&self) -> bool {
        self.entries.values().all(|v| v.im == 0.0)
    }

    /// Checks invariance under every permutation of the index tuple.
    ///
    /// Tensors built by symmetric expansion are checked bit-exactly; literal
    /// tensors use [`LITERAL_SYMMETRY_TOL`] relative tolerance.
    pub fn is_symmetric(&self) -> bool {
        let tol = if self.symmetric {
            0.0
        } else {
            LITERAL_SYMMETRY_TOL
        };
        self.is_symmetric_within(tol)
    }

    pub fn is_symmetric_within(&self, rel_tol: f64) -> bool {
        self.entries.iter().all(|(idx, &v)| {
            let mut perm = idx.clone();
            perm.sort_unstable();
            loop {
                let w = self.entries.get(&perm).copied().unwrap_or_default();
                let diff = (w - v).norm();
                if diff > rel_tol * v.norm().max(w.norm()) {
                    return false;
                }
                if !next_permutation(&mut perm) {
                    return true;
                }
            }
        })
    }

    /// Multiplies every entry by a real scalar.
    pub fn scaled(&self, c: f64) -> Tensor {
        Tensor {
            order: self.order,
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .filter(|(_, v)| **v * c != Complex64::new(0.0, 0.0))
                .map(|(k, v)| (k.clone(), *v * c))
                .collect(),
            symmetric: self.symmetric,
        }
    }

    fn check_row(&self, i: usize) -> Result<()> {
        if i >= self.dim {
            let mut idx = vec![0; self.order];
            idx[0] = i;
            return Err(Error::IndexOutOfRange {
                idx,
                order: self.order,
                dim: self.dim,
            });
        }
        Ok(())
    }

    /// `r_i`: absolute off-diagonal mass of row `i`.
    pub fn row_radius(&self, i: usize) -> Result<f64> {
        self.check_row(i)?;
        Ok(self
            .row(i)
            .filter(|(rest, _)| !rest.iter().all(|&k| k == i))
            .fold(0.0, |acc, (_, v)| acc + v.norm()))
    }

    /// `r_i^j = r_i - |a_{ij...j}|`, computed as a direct sum that skips both
    /// the diagonal tuple and `(j, ..., j)`.
    pub fn deleted_row_radius(&self, i: usize, j: usize) -> Result<f64> {
        self.check_row(i)?;
        self.check_row(j)?;
        if i == j {
            return Err(Error::SameIndex { i, j });
        }
        Ok(self
            .row(i)
            .filter(|(rest, _)| {
                !rest.iter().all(|&k| k == i) && !rest.iter().all(|&k| k == j)
            })
            .fold(0.0, |acc, (_, v)| acc + v.norm()))
    }

    /// Splits `r_i` by whether the trailing tuple lies entirely inside the
    /// chosen side of `part`. Returns `(inside, outside)`; the diagonal tuple is
    /// excluded from both.
    pub fn split_radii(&self, i: usize, part: &SubsetPartition, side: Side) -> Result<(f64, f64)> {
        self.check_row(i)?;
        part.check_dim(self.dim)?;
        let mut inside = 0.0;
        let mut outside = 0.0;
        for (rest, v) in self.row(i) {
            if rest.iter().all(|&k| k == i) {
                continue;
            }
            if rest.iter().all(|&k| part.on_side(k, side)) {
                inside += v.norm();
            } else {
                outside += v.norm();
            }
        }
        Ok((inside, outside))
    }

    /// One block of [`Tensor::split_radii`].
    pub fn split_radius(
        &self,
        i: usize,
        part: &SubsetPartition,
        side: Side,
        block: Block,
    ) -> Result<f64> {
        let (inside, outside) = self.split_radii(i, part, side)?;
        Ok(match block {
            Block::Inside => inside,
            Block::Outside => outside,
        })
    }
}

fn check_tuple(idx: &[usize], order: usize, dim: usize) -> Result<()> {
    if idx.len() != order || idx.iter().any(|&k| k >= dim) {
        return Err(Error::IndexOutOfRange {
            idx: idx.to_vec(),
            order,
            dim,
        });
    }
    Ok(())
}

/// `δ_{i_1...i_m}`: true when all indices coincide.
pub fn is_diagonal_tuple(idx: &[usize]) -> bool {
    idx.windows(2).all(|w| w[0] == w[1])
}

/// Advances to the next lexicographic permutation; returns false after the last.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Which half of a partition a split radius refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Subset,
    Complement,
}

/// `Δ^X` (all trailing indices in X) versus its complement in `Δ^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Inside,
    Outside,
}

/// A nonempty proper subset `S` of `{0, ..., n-1}` together with its complement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetPartition {
    subset: Vec<usize>,
    complement: Vec<usize>,
    dim: usize,
}

impl SubsetPartition {
    pub fn new(mut subset: Vec<usize>, dim: usize) -> Result<Self> {
        subset.sort_unstable();
        subset.dedup();
        if subset.is_empty() {
            return Err(Error::InvalidPartition("subset is empty".into()));
        }
        if let Some(&k) = subset.iter().find(|&&k| k >= dim) {
            return Err(Error::InvalidPartition(format!(
                "index {} outside 1..={dim}",
                k + 1
            )));
        }
        if subset.len() == dim {
            return Err(Error::InvalidPartition(
                "subset must be a proper subset".into(),
            ));
        }
        let complement = (0..dim).filter(|k| subset.binary_search(k).is_err()).collect();
        Ok(SubsetPartition {
            subset,
            complement,
            dim,
        })
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self, side: Side) -> &[usize] {
        match side {
            Side::Subset => &self.subset,
            Side::Complement => &self.complement,
        }
    }

    pub fn contains(&self, k: usize) -> bool {
        self.subset.binary_search(&k).is_ok()
    }

    pub fn on_side(&self, k: usize, side: Side) -> bool {
        self.contains(k) == (side == Side::Subset)
    }

    /// The partition with `S` and its complement exchanged.
    pub fn swapped(&self) -> SubsetPartition {
        SubsetPartition {
            subset: self.complement.clone(),
            complement: self.subset.clone(),
            dim: self.dim,
        }
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(Error::InvalidPartition(format!(
                "partition built for dimension {}, tensor has dimension {dim}",
                self.dim
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for SubsetPartition {
    /// 1-based, comma separated.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.subset.iter().map(|k| (k + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Split radii of every row for one partition.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionRadii {
    pub partition: SubsetPartition,
    /// `r_i^{Δ^S}`
    pub in_subset: Vec<f64>,
    /// `r_i^{\overline{Δ^S}}`
    pub out_subset: Vec<f64>,
    /// `r_i^{Δ^{S̄}}`
    pub in_complement: Vec<f64>,
    /// `r_i^{\overline{Δ^{S̄}}}`
    pub out_complement: Vec<f64>,
}

impl PartitionRadii {
    pub fn new(t: &Tensor, part: &SubsetPartition) -> Result<Self> {
        part.check_dim(t.dim())?;
        let n = t.dim();
        let mut radii = PartitionRadii {
            partition: part.clone(),
            in_subset: Vec::with_capacity(n),
            out_subset: Vec::with_capacity(n),
            in_complement: Vec::with_capacity(n),
            out_complement: Vec::with_capacity(n),
        };
        for i in 0..n {
            let (a, b) = t.split_radii(i, part, Side::Subset)?;
            let (c, d) = t.split_radii(i, part, Side::Complement)?;
            radii.in_subset.push(a);
            radii.out_subset.push(b);
            radii.in_complement.push(c);
            radii.out_complement.push(d);
        }
        Ok(radii)
    }

    /// `(inside, outside)` radii of row `i` relative to the given side.
    pub fn get(&self, i: usize, side: Side) -> (f64, f64) {
        match side {
            Side::Subset => (self.in_subset[i], self.out_subset[i]),
            Side::Complement => (self.in_complement[i], self.out_complement[i]),
        }
    }
}

/// Precomputed diagonal entries and radii of a tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiiCache {
    pub diag: Vec<Complex64>,
    /// `r_i`
    pub row: Vec<f64>,
    /// `r_i^j`, row-major `n x n`; the diagonal holds 0.
    pub deleted: Vec<f64>,
    /// `|a_{ij...j}|`, row-major `n x n`; the diagonal holds 0.
    pub pivot: Vec<f64>,
    pub partitions: Vec<PartitionRadii>,
    dim: usize,
}

impl RadiiCache {
    pub fn new(t: &Tensor) -> Self {
        let n = t.dim();
        let mut deleted = vec![0.0; n * n];
        let mut pivot = vec![0.0; n * n];
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                deleted[i * n + j] = t.deleted_row_radius(i, j).expect("valid indices");
                pivot[i * n + j] = t.pivot(i, j).norm();
            }
        }
        RadiiCache {
            diag: (0..n).map(|i| t.diag(i)).collect(),
            row: (0..n).map(|i| t.row_radius(i).expect("valid index")).collect(),
            deleted,
            pivot,
            partitions: Vec::new(),
            dim: n,
        }
    }

    pub fn with_partitions(t: &Tensor, parts: &[SubsetPartition]) -> Result<Self> {
        let mut cache = Self::new(t);
        cache.partitions = parts
            .iter()
            .map(|p| PartitionRadii::new(t, p))
            .collect::<Result<_>>()?;
        Ok(cache)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn deleted(&self, i: usize, j: usize) -> f64 {
        self.deleted[i * self.dim + j]
    }

    pub fn pivot(&self, i: usize, j: usize) -> f64 {
        self.pivot[i * self.dim + j]
    }

    pub fn partition(&self, part: &SubsetPartition) -> Option<&PartitionRadii> {
        self.partitions.iter().find(|p| &p.partition == part)
    }
}
