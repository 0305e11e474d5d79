//! Numerical eigenpairs `A x^{m-1} = λ x^{[m-1]}`.
//!
//! This module is an independent check on the localization sets and on the
//! certifier: it solves the eigenvalue system directly and never reads any
//! radius or dominance verdict.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Eigenvalues closer than this are treated as the same eigenvalue.
pub const DEDUP_TOL: f64 = 1e-6;

/// `(A x^{m-1})_i = Σ a_{i i_2...i_m} x_{i_2} ... x_{i_m}`, summed over stored
/// entries in lexicographic order.
pub fn apply(t: &Tensor, x: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(t, x)?;
    Ok(apply_unchecked(t, x))
}

fn check_len(t: &Tensor, x: &[Complex64]) -> Result<()> {
    if x.len() != t.dim() {
        return Err(Error::LengthMismatch {
            expected: t.dim(),
            got: x.len(),
        });
    }
    Ok(())
}

fn apply_unchecked(t: &Tensor, x: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; t.dim()];
    for (idx, a) in t.entries() {
        let prod = idx[1..].iter().fold(a, |acc, &k| acc * x[k]);
        out[idx[0]] += prod;
    }
    out
}

/// `x^{[k]}`, the componentwise k-th power.
pub fn power_vector(x: &[Complex64], k: u32) -> Vec<Complex64> {
    x.iter().map(|v| v.powu(k)).collect()
}

/// `∂(A x^{m-1})_i / ∂x_k`, accumulated slot by slot so that asymmetric
/// tensors are handled correctly.
pub fn jacobian(t: &Tensor, x: &[Complex64]) -> Result<DMatrix<Complex64>> {
    check_len(t, x)?;
    Ok(jacobian_unchecked(t, x))
}

fn jacobian_unchecked(t: &Tensor, x: &[Complex64]) -> DMatrix<Complex64> {
    let n = t.dim();
    let slots = t.order() - 1;
    let mut jac = DMatrix::from_element(n, n, ZERO);
    let mut prefix = vec![ONE; slots + 1];
    let mut suffix = vec![ONE; slots + 1];
    for (idx, a) in t.entries() {
        let rest = &idx[1..];
        for s in 0..slots {
            prefix[s + 1] = prefix[s] * x[rest[s]];
        }
        for s in (0..slots).rev() {
            suffix[s] = suffix[s + 1] * x[rest[s]];
        }
        for s in 0..slots {
            jac[(idx[0], rest[s])] += a * prefix[s] * suffix[s + 1];
        }
    }
    jac
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenKind {
    General,
    /// Real eigenvalue with a real eigenvector.
    HReal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: Complex64,
    /// Unit max-norm; the first component of largest modulus equals 1.
    pub x: Vec<Complex64>,
    pub residual: f64,
    pub kind: EigenKind,
}

/// Max-norm of `A x^{m-1} - λ x^{[m-1]}`.
pub fn residual(t: &Tensor, lambda: Complex64, x: &[Complex64]) -> Result<f64> {
    check_len(t, x)?;
    Ok(residual_unchecked(t, lambda, x))
}

fn residual_unchecked(t: &Tensor, lambda: Complex64, x: &[Complex64]) -> f64 {
    let k = (t.order() - 1) as u32;
    apply_unchecked(t, x)
        .iter()
        .zip(x)
        .map(|(ax, xi)| (ax - lambda * xi.powu(k)).norm())
        .fold(0.0, f64::max)
}

/// Scales `x` so that its first largest-modulus component is exactly 1.
/// Returns `None` for the zero vector or non-finite input.
pub fn canonicalize(x: &[Complex64]) -> Option<Vec<Complex64>> {
    let (lead, max) = x
        .iter()
        .enumerate()
        .fold((0, 0.0), |(bi, bm), (i, v)| if v.norm() > bm { (i, v.norm()) } else { (bi, bm) });
    if !(max > 0.0) || !max.is_finite() {
        return None;
    }
    let pivot = x[lead];
    let mut y: Vec<Complex64> = x.iter().map(|v| v / pivot).collect();
    y[lead] = ONE;
    Some(y)
}

impl EigenPair {
    /// Canonicalizes `x` and records the residual of the canonical pair.
    pub fn new(t: &Tensor, lambda: Complex64, x: &[Complex64], kind: EigenKind) -> Option<Self> {
        let x = canonicalize(x)?;
        let residual = residual_unchecked(t, lambda, &x);
        residual.is_finite().then_some(EigenPair {
            lambda,
            x,
            residual,
            kind,
        })
    }
}

/// `Σ conj(x_i^{m-1}) (A x^{m-1})_i / Σ |x_i^{m-1}|^2`
fn rayleigh(t: &Tensor, x: &[Complex64]) -> Complex64 {
    let k = (t.order() - 1) as u32;
    let ax = apply_unchecked(t, x);
    let (num, den) = ax.iter().zip(x).fold((ZERO, 0.0), |(num, den), (a, xi)| {
        let p = xi.powu(k);
        (num + p.conj() * a, den + p.norm_sqr())
    });
    num / den
}

/// Newton's method on `{A x^{m-1} - λ x^{[m-1]} = 0, u* x = 1}` in the
/// unknowns `(x, λ)`. Returns the first iterate whose canonical residual is
/// below `tol`.
fn newton_refine(
    t: &Tensor,
    mut x: Vec<Complex64>,
    mut lambda: Complex64,
    u: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Option<(Vec<Complex64>, Complex64)> {
    let n = t.dim();
    let k = (t.order() - 1) as u32;
    for _ in 0..=max_iter {
        let canon = canonicalize(&x)?;
        if residual_unchecked(t, lambda, &canon) < tol {
            return Some((x, lambda));
        }

        let ax = apply_unchecked(t, &x);
        let jx = jacobian_unchecked(t, &x);
        let mut jac = DMatrix::from_element(n + 1, n + 1, ZERO);
        let mut rhs = DVector::from_element(n + 1, ZERO);
        for i in 0..n {
            for c in 0..n {
                jac[(i, c)] = jx[(i, c)];
            }
            jac[(i, i)] -= lambda * (k as f64) * x[i].powu(k - 1);
            jac[(i, n)] = -x[i].powu(k);
            rhs[i] = -(ax[i] - lambda * x[i].powu(k));
            jac[(n, i)] = u[i].conj();
        }
        rhs[n] = -(u.iter().zip(&x).map(|(a, b)| a.conj() * b).sum::<Complex64>() - ONE);

        let step = jac.lu().solve(&rhs)?;
        for i in 0..n {
            x[i] += step[i];
        }
        lambda += step[n];
        if !lambda.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return None;
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub num_starts: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            num_starts: 64,
            seed: 0,
            tol: 1e-10,
            max_iter: 100,
        }
    }
}

fn complex_gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect()
}

fn newton_start(t: &Tensor, opts: &NewtonOptions, start: usize) -> Option<EigenPair> {
    let n = t.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(start as u64));
    let u = complex_gaussian(&mut rng, n);
    let x = complex_gaussian(&mut rng, n);
    let ux: Complex64 = u.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
    if ux.norm() < 1e-8 {
        return None;
    }
    let x: Vec<Complex64> = x.iter().map(|v| v / ux).collect();
    let lambda = rayleigh(t, &x);
    let (x, lambda) = newton_refine(t, x, lambda, &u, opts.tol, opts.max_iter)?;
    EigenPair::new(t, lambda, &x, EigenKind::General).filter(|p| p.residual < opts.tol)
}

fn cmp_lambda(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Merges pairs whose eigenvalues agree within [`DEDUP_TOL`], keeping the
/// smallest residual, and sorts by `(Re λ, Im λ)`.
pub fn dedup_eigenpairs(mut pairs: Vec<EigenPair>) -> Vec<EigenPair> {
    pairs.sort_by(|a, b| cmp_lambda(&a.lambda, &b.lambda));
    let mut kept: Vec<EigenPair> = Vec::new();
    for p in pairs {
        match kept
            .iter_mut()
            .find(|q| (q.lambda - p.lambda).norm() < DEDUP_TOL)
        {
            Some(q) => {
                if p.residual < q.residual {
                    *q = p;
                }
            }
            None => kept.push(p),
        }
    }
    kept.sort_by(|a, b| cmp_lambda(&a.lambda, &b.lambda));
    kept
}

/// Eigenpairs found by Newton's method from random complex starts.
///
/// Start `k` uses seed `opts.seed + k`, so the output is the same however the
/// starts are scheduled. There is no completeness guarantee.
pub fn newton_eigenpairs(t: &Tensor, opts: &NewtonOptions) -> Vec<EigenPair> {
    let found: Vec<EigenPair> = (0..opts.num_starts)
        .into_par_iter()
        .filter_map(|k| newton_start(t, opts, k))
        .collect();
    dedup_eigenpairs(found)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Largest,
    Smallest,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shift {
    /// `1 + Σ r_i + max |a_{i...i}|`
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerOptions {
    pub want: Extreme,
    pub shift: Shift,
    pub tol: f64,
    pub max_iter: usize,
    pub num_starts: usize,
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            want: Extreme::Smallest,
            shift: Shift::Auto,
            tol: 1e-10,
            max_iter: 2000,
            num_starts: 16,
            seed: 0,
        }
    }
}

fn real_vec(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// `A x^m / Σ x_i^m` and `A x^{m-1}` for real `x` and even `m`.
fn h_quotient(t: &Tensor, x: &[f64]) -> (f64, Vec<f64>) {
    let m = t.order() as i32;
    let ax: Vec<f64> = apply_unchecked(t, &real_vec(x)).iter().map(|v| v.re).collect();
    let num: f64 = ax.iter().zip(x).map(|(a, xi)| a * xi).sum();
    let den: f64 = x.iter().map(|v| v.powi(m)).sum();
    (num / den, ax)
}

fn unit(mut x: Vec<f64>) -> Option<Vec<f64>> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return None;
    }
    x.iter_mut().for_each(|v| *v /= norm);
    Some(x)
}

/// One run of the shifted iteration `x <- (α x ± ∇q(x)) / ‖·‖` on the unit
/// sphere, where `q` is the H-quotient. Steps that fail to improve `q` are
/// retried with a doubled shift; accepted steps relax it again.
fn power_run(t: &Tensor, start: Vec<f64>, alpha0: f64, opts: &PowerOptions) -> Option<EigenPair> {
    let m = t.order() as i32;
    let sign = match opts.want {
        Extreme::Largest => 1.0,
        Extreme::Smallest => -1.0,
    };
    let alpha_min = alpha0 * 1e-3;
    let mut alpha = alpha0;
    let mut x = unit(start)?;
    let (mut q, mut ax) = h_quotient(t, &x);
    let mut pair = EigenPair::new(t, Complex64::new(q, 0.0), &real_vec(&x), EigenKind::HReal)?;
    let mut rejected = 0;
    for _ in 0..opts.max_iter {
        if pair.residual < opts.tol {
            break;
        }
        let den: f64 = x.iter().map(|v| v.powi(m)).sum();
        let mut grad: Vec<f64> = ax
            .iter()
            .zip(&x)
            .map(|(a, xi)| m as f64 * (a - q * xi.powi(m - 1)) / den)
            .collect();
        let radial: f64 = grad.iter().zip(&x).map(|(g, xi)| g * xi).sum();
        grad.iter_mut().zip(&x).for_each(|(g, xi)| *g -= radial * xi);

        let y: Vec<f64> = x.iter().zip(&grad).map(|(xi, g)| alpha * xi + sign * g).collect();
        let Some(y) = unit(y) else { break };
        let (qy, ay) = h_quotient(t, &y);
        if !qy.is_finite() || sign * (qy - q) < 0.0 {
            alpha *= 2.0;
            rejected += 1;
            if rejected > 60 {
                break;
            }
            continue;
        }
        rejected = 0;
        alpha = (alpha * 0.7).max(alpha_min);
        let stalled = (qy - q).abs() <= f64::EPSILON * (1.0 + q.abs());
        x = y;
        q = qy;
        ax = ay;
        pair = EigenPair::new(t, Complex64::new(q, 0.0), &real_vec(&x), EigenKind::HReal)?;
        if stalled && pair.residual < opts.tol.sqrt() {
            break;
        }
    }
    if pair.residual < opts.tol {
        return Some(pair);
    }
    polish_real(t, pair, opts.tol)
}

/// A few Newton steps in real arithmetic; kept only if the residual drops
/// and the eigenvalue barely moves.
fn polish_real(t: &Tensor, pair: EigenPair, tol: f64) -> Option<EigenPair> {
    let u = pair.x.clone();
    let scale = u.iter().map(|v| v.norm_sqr()).sum::<f64>();
    let x: Vec<Complex64> = pair.x.iter().map(|v| v / scale).collect();
    let polished = newton_refine(t, x, pair.lambda, &u, tol, 20)
        .and_then(|(x, l)| {
            let x: Vec<Complex64> = x.iter().map(|v| Complex64::new(v.re, 0.0)).collect();
            EigenPair::new(t, Complex64::new(l.re, 0.0), &x, EigenKind::HReal)
        })
        .filter(|p| {
            p.residual < pair.residual
                && (p.lambda - pair.lambda).norm() < 1e-3 * (1.0 + pair.lambda.norm())
        });
    Some(polished.unwrap_or(pair))
}

/// Extreme H-eigenpair of an even-order real symmetric tensor by shifted
/// power iteration on the unit sphere, with restarts. The shift is the
/// initial one; each run adapts it so that every accepted step improves the
/// H-quotient `A x^m / Σ x_i^m`.
///
/// Starts are the unit vectors followed by Gaussian vectors, up to
/// `opts.num_starts` in total beyond the unit vectors. Among pairs that reach
/// `opts.tol`, the extreme eigenvalue wins; if none does, the pair with the
/// smallest residual is returned.
pub fn shifted_power_extreme(t: &Tensor, opts: &PowerOptions) -> Result<EigenPair> {
    if t.order() % 2 != 0 {
        return Err(Error::OddOrder(t.order()));
    }
    if !t.is_real() {
        return Err(Error::ComplexEntries);
    }
    if !t.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = t.dim();
    let alpha = match opts.shift {
        Shift::Auto => {
            let rsum: f64 = (0..n).map(|i| t.row_radius(i).expect("valid row")).sum();
            let dmax = (0..n).map(|i| t.diag(i).norm()).fold(0.0, f64::max);
            1.0 + rsum + dmax
        }
        Shift::Fixed(a) => a,
    };

    let mut starts: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect())
        .collect();
    for s in 0..opts.num_starts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(s as u64));
        starts.push((0..n).map(|_| StandardNormal.sample(&mut rng)).collect());
    }

    let runs: Vec<EigenPair> = starts
        .into_par_iter()
        .filter_map(|x0| power_run(t, x0, alpha, opts))
        .collect();

    let better = |a: &EigenPair, b: &EigenPair| match opts.want {
        Extreme::Largest => a.lambda.re > b.lambda.re,
        Extreme::Smallest => a.lambda.re < b.lambda.re,
    };
    let converged = runs
        .iter()
        .filter(|p| p.residual < opts.tol)
        .fold(None::<&EigenPair>, |best, p| match best {
            Some(b) if !better(p, b) => Some(b),
            _ => Some(p),
        });
    converged
        .or_else(|| runs.iter().min_by(|a, b| a.residual.total_cmp(&b.residual)))
        .cloned()
        .ok_or(Error::NoConvergence)
}
