#![allow(dead_code)]

use itertools::Itertools;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use tenloc::io::parse_tensor_file;
use tenloc::{SubsetPartition, Tensor};

pub fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn example41() -> Tensor {
    let bytes = std::fs::read(fixture("example41.tensor")).unwrap();
    parse_tensor_file(&bytes).unwrap()
}

/// 0-based index tuple from 1-based digits, e.g. `t1(&[3, 1, 1, 2])`.
pub fn t1(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|k| k - 1).collect()
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Every tuple of `len` indices in `0..n`, lexicographic.
pub fn all_tuples(len: usize, n: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![vec![]];
    }
    (0..len).map(|_| 0..n).multi_cartesian_product().collect()
}

/// Every sorted tuple of `len` indices in `0..n`.
pub fn sorted_tuples(len: usize, n: usize) -> Vec<Vec<usize>> {
    (0..n).combinations_with_replacement(len).collect()
}

/// Dense tensor with independent standard Gaussian entries.
pub fn dense_gaussian(order: usize, dim: usize, rng: &mut ChaCha8Rng) -> Tensor {
    let entries: Vec<_> = all_tuples(order, dim)
        .into_iter()
        .map(|idx| (idx, gauss(rng)))
        .collect();
    Tensor::from_real(order, dim, entries, false).unwrap()
}

/// Dense tensor with complex Gaussian entries.
pub fn dense_complex_gaussian(order: usize, dim: usize, rng: &mut ChaCha8Rng) -> Tensor {
    let entries: Vec<_> = all_tuples(order, dim)
        .into_iter()
        .map(|idx| (idx, Complex64::new(gauss(rng), gauss(rng))))
        .collect();
    Tensor::build(order, dim, entries, false).unwrap()
}

/// Symmetric tensor with Gaussian representatives.
pub fn symmetric_gaussian(order: usize, dim: usize, rng: &mut ChaCha8Rng) -> Tensor {
    let entries: Vec<_> = sorted_tuples(order, dim)
        .into_iter()
        .map(|idx| (idx, gauss(rng)))
        .collect();
    Tensor::from_real(order, dim, entries, true).unwrap()
}

/// Symmetric tensor with off-diagonal representatives scaled by `off` and
/// diagonal entries drawn from `diag(i, r_i)`, where `r_i` is the off-diagonal
/// row mass.
pub fn symmetric_with_diagonal<F>(
    order: usize,
    dim: usize,
    off: f64,
    rng: &mut ChaCha8Rng,
    mut diag: F,
) -> Tensor
where
    F: FnMut(&mut ChaCha8Rng, usize, f64) -> f64,
{
    let reps: Vec<_> = sorted_tuples(order, dim)
        .into_iter()
        .filter(|idx| !idx.iter().all_equal())
        .map(|idx| {
            let v = off * gauss(rng);
            (idx, v)
        })
        .collect();
    let offdiag = Tensor::from_real(order, dim, reps.clone(), true).unwrap();
    let mut all = reps;
    for i in 0..dim {
        let r = offdiag.row_radius(i).unwrap();
        all.push((vec![i; order], diag(rng, i, r)));
    }
    Tensor::from_real(order, dim, all, true).unwrap()
}

/// Every nonempty proper subset of `0..n`, smallest first.
pub fn all_partitions(n: usize) -> Vec<SubsetPartition> {
    (1..n)
        .flat_map(|k| (0..n).combinations(k))
        .map(|s| SubsetPartition::new(s, n).unwrap())
        .collect()
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

/// Relabels indices by `sigma`: entry `idx` moves to `sigma(idx)`.
pub fn relabel(t: &Tensor, sigma: &[usize]) -> Tensor {
    let entries: Vec<_> = t
        .entries()
        .map(|(idx, v)| (idx.iter().map(|&k| sigma[k]).collect::<Vec<_>>(), v))
        .collect();
    Tensor::build(t.order(), t.dim(), entries, false).unwrap()
}

/// Multiple of 1/64 in `[-2, 2]`; sums and products of a few of these are
/// exact in binary floating point.
pub fn dyadic(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-128i32..=128) as f64 / 64.0
}

/// Builds a dense general tensor with off-diagonal entries from `off`, and
/// diagonal `diag(rng, i, r_i)` where `r_i` is computed on the result.
pub fn with_diagonal<O, D>(order: usize, dim: usize, rng: &mut ChaCha8Rng, mut off: O, mut diag: D) -> Tensor
where
    O: FnMut(&mut ChaCha8Rng, &[usize]) -> f64,
    D: FnMut(&mut ChaCha8Rng, usize, f64) -> f64,
{
    let mut entries: Vec<_> = all_tuples(order, dim)
        .into_iter()
        .filter(|idx| !idx.iter().all_equal())
        .map(|idx| {
            let v = off(rng, &idx);
            (idx, v)
        })
        .collect();
    let offdiag = Tensor::from_real(order, dim, entries.clone(), false).unwrap();
    for i in 0..dim {
        let r = offdiag.row_radius(i).unwrap();
        entries.push((vec![i; order], diag(rng, i, r)));
    }
    Tensor::from_real(order, dim, entries, false).unwrap()
}

/// Random sign.
pub fn sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

/// Strictly diagonally dominant tensor with Gaussian off-diagonal entries.
pub fn sdd_tensor(order: usize, dim: usize, rng: &mut ChaCha8Rng) -> Tensor {
    with_diagonal(
        order,
        dim,
        rng,
        |r, _| gauss(r),
        |r, _, ri| sign(r) * (ri * (1.0 + r.random_range(1e-6..0.5)) + 1e-3),
    )
}

/// Diagonally dominant tensor on a dyadic grid; with probability one half
/// per row the diagonal equals the row radius exactly.
pub fn dd0_tensor(order: usize, dim: usize, rng: &mut ChaCha8Rng) -> Tensor {
    with_diagonal(
        order,
        dim,
        rng,
        |r, _| if r.random_bool(0.5) { dyadic(r) } else { 0.0 },
        |r, _, ri| {
            let slack = if r.random_bool(0.5) { 0.0 } else { r.random_range(0i32..=64) as f64 / 64.0 };
            sign(r) * (ri + slack)
        },
    )
}

/// Candidate for quasi-doubly but not diagonal dominance: the off-diagonal
/// mass of each row sits mostly on its pivots `a_{ij...j}`, and one row
/// falls short of its radius.
pub fn pivot_heavy(order: usize, dim: usize, rng: &mut ChaCha8Rng) -> Tensor {
    let weak = rng.random_range(0..dim);
    with_diagonal(
        order,
        dim,
        rng,
        |r, idx| {
            let pivot = idx[1..].iter().all_equal();
            if pivot {
                gauss(r)
            } else {
                0.05 * gauss(r)
            }
        },
        |r, i, ri| {
            let f = if i == weak { r.random_range(0.5..1.0) } else { r.random_range(1.0..2.0) };
            sign(r) * ri * f
        },
    )
}

/// Eigenvalues of the `n × n` matrix `a` (row-major, `n <= 3`) as roots of its
/// characteristic polynomial: closed form for `n <= 2`, Durand–Kerner for 3.
pub fn char_roots(a: &[Complex64], n: usize) -> Vec<Complex64> {
    let at = |i: usize, j: usize| a[i * n + j];
    match n {
        1 => vec![at(0, 0)],
        2 => {
            let tr = at(0, 0) + at(1, 1);
            let det = at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
            let disc = (tr * tr - 4.0 * det).sqrt();
            vec![(tr + disc) / 2.0, (tr - disc) / 2.0]
        }
        3 => {
            let tr = at(0, 0) + at(1, 1) + at(2, 2);
            let minors = at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0) + at(0, 0) * at(2, 2)
                - at(0, 2) * at(2, 0)
                + at(1, 1) * at(2, 2)
                - at(1, 2) * at(2, 1);
            let det = at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1))
                - at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0))
                + at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
            let p = |z: Complex64| ((z - tr) * z + minors) * z - det;
            let seed = Complex64::new(0.4, 0.9);
            let mut roots = vec![Complex64::new(1.0, 0.0), seed, seed * seed];
            for _ in 0..500 {
                let prev = roots.clone();
                for k in 0..3 {
                    let denom: Complex64 = (0..3)
                        .filter(|&l| l != k)
                        .map(|l| roots[k] - roots[l])
                        .product();
                    let zk = roots[k];
                    roots[k] = zk - p(zk) / denom;
                }
                if roots.iter().zip(&prev).all(|(a, b)| (a - b).norm() < 1e-15 * (1.0 + a.norm())) {
                    break;
                }
            }
            roots
        }
        _ => panic!("char_roots supports n <= 3"),
    }
}

/// Row-major dense matrix of an order-2 tensor.
pub fn matrix_of(t: &Tensor) -> Vec<Complex64> {
    let n = t.dim();
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for (idx, v) in t.entries() {
        m[idx[0] * n + idx[1]] = v;
    }
    m
}
