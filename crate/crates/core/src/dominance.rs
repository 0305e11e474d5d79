//! Diagonal-dominance classes and the positive (semi-)definiteness
//! certificate built on them.
//!
//! The classes form a ladder, each implying the next for the same strictness:
//!
//! ```text
//! SDD  =>  QDSDD  =>  S-QDSDD  =>  S-SDD       (strict)
//! DD   =>  QDSDD0 =>  S-QDSDD0 =>  S-SDD0      (non-strict)
//! ```
//!
//! An even-order real symmetric tensor in any strict class with a positive
//! diagonal is positive definite; the non-strict classes with a nonnegative
//! diagonal give positive semi-definiteness. Strict comparisons use `>` with no
//! epsilon, so rounding can only turn a certificate into `Inconclusive`.

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::tensor::{PartitionRadii, RadiiCache, Side, SubsetPartition, Tensor};

/// Largest dimension for which [`find_certifying_subset`] enumerates subsets.
pub const DEFAULT_SEARCH_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DominanceClass {
    /// diagonally dominant
    Dd,
    /// strictly diagonally dominant
    Sdd,
    Qdsdd0,
    Qdsdd,
    SQdsdd0,
    SQdsdd,
    SSdd0,
    SSdd,
}

impl DominanceClass {
    pub fn is_strict(self) -> bool {
        matches!(
            self,
            DominanceClass::Sdd | DominanceClass::Qdsdd | DominanceClass::SQdsdd | DominanceClass::SSdd
        )
    }

    pub fn needs_partition(self) -> bool {
        matches!(
            self,
            DominanceClass::SQdsdd0 | DominanceClass::SQdsdd | DominanceClass::SSdd0 | DominanceClass::SSdd
        )
    }

    pub fn needs_pairs(self) -> bool {
        !matches!(self, DominanceClass::Dd | DominanceClass::Sdd)
    }

    /// The ladder for one strictness, weakest hypothesis last.
    pub fn ladder(strict: bool) -> [DominanceClass; 4] {
        if strict {
            [
                DominanceClass::Sdd,
                DominanceClass::Qdsdd,
                DominanceClass::SQdsdd,
                DominanceClass::SSdd,
            ]
        } else {
            [
                DominanceClass::Dd,
                DominanceClass::Qdsdd0,
                DominanceClass::SQdsdd0,
                DominanceClass::SSdd0,
            ]
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DominanceClass::Dd => "DD",
            DominanceClass::Sdd => "SDD",
            DominanceClass::Qdsdd0 => "QDSDD0",
            DominanceClass::Qdsdd => "QDSDD",
            DominanceClass::SQdsdd0 => "S-QDSDD0",
            DominanceClass::SQdsdd => "S-QDSDD",
            DominanceClass::SSdd0 => "S-SDD0",
            DominanceClass::SSdd => "S-SDD",
        }
    }
}

impl fmt::Display for DominanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One defining inequality `lhs >= rhs` (or `>`). Indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inequality {
    /// `|a_{i...i}|` against `r_i`
    Diagonal { i: usize },
    /// `(|a_{i...i}| - r_i^j) |a_{j...j}|` against `r_j |a_{ij...j}|`
    QuasiDoubly { i: usize, j: usize },
    /// `|a_{i...i}| (|a_{j...j}| - r_j^{out S})` against `r_i r_j^{in S}`,
    /// for `i ∈ S`, `j ∈ S̄`
    SplitSubset { i: usize, j: usize },
    /// `|a_{j...j}| (|a_{i...i}| - r_i^{out S̄})` against `r_j r_i^{in S̄}`,
    /// for `i ∈ S`, `j ∈ S̄`
    SplitComplement { i: usize, j: usize },
}

impl Inequality {
    /// Recomputes both sides directly from the tensor, without any cache.
    pub fn evaluate(&self, t: &Tensor, part: Option<&SubsetPartition>) -> Result<(f64, f64)> {
        let d = |k: usize| t.diag(k).norm();
        match *self {
            Inequality::Diagonal { i } => Ok((d(i), t.row_radius(i)?)),
            Inequality::QuasiDoubly { i, j } => Ok((
                (d(i) - t.deleted_row_radius(i, j)?) * d(j),
                t.row_radius(j)? * t.pivot(i, j).norm(),
            )),
            Inequality::SplitSubset { i, j } => {
                let part = part.ok_or_else(missing_partition)?;
                let (inside, outside) = t.split_radii(j, part, Side::Subset)?;
                Ok((d(i) * (d(j) - outside), t.row_radius(i)? * inside))
            }
            Inequality::SplitComplement { i, j } => {
                let part = part.ok_or_else(missing_partition)?;
                let (inside, outside) = t.split_radii(i, part, Side::Complement)?;
                Ok((d(j) * (d(i) - outside), t.row_radius(j)? * inside))
            }
        }
    }
}

fn missing_partition() -> Error {
    Error::InvalidPartition("inequality needs a subset".into())
}

impl fmt::Display for Inequality {
    /// 1-based indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Inequality::Diagonal { i } => write!(f, "|a_{0}..{0}| vs r_{0}", i + 1),
            Inequality::QuasiDoubly { i, j } => write!(
                f,
                "(|a_{0}..{0}| - r_{0}^{1})|a_{1}..{1}| vs r_{1}|a_{0}{1}..{1}|",
                i + 1,
                j + 1
            ),
            Inequality::SplitSubset { i, j } => write!(
                f,
                "|a_{0}..{0}|(|a_{1}..{1}| - r_{1}^out(S)) vs r_{0} r_{1}^in(S)",
                i + 1,
                j + 1
            ),
            Inequality::SplitComplement { i, j } => write!(
                f,
                "|a_{1}..{1}|(|a_{0}..{0}| - r_{0}^out(S')) vs r_{1} r_{0}^in(S')",
                i + 1,
                j + 1
            ),
        }
    }
}

/// The first violated inequality and the two sides as evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub inequality: Inequality,
    pub lhs: f64,
    pub rhs: f64,
}

impl Witness {
    /// Re-evaluates the inequality from scratch and reports whether it still
    /// fails at the given strictness.
    pub fn replays(&self, t: &Tensor, part: Option<&SubsetPartition>, strict: bool) -> Result<bool> {
        let (lhs, rhs) = self.inequality.evaluate(t, part)?;
        Ok(!compare(lhs, rhs, strict))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassVerdict {
    pub class: DominanceClass,
    pub holds: bool,
    /// Present exactly when `holds` is false.
    pub witness: Option<Witness>,
    pub partition: Option<SubsetPartition>,
}

#[inline]
fn compare(lhs: f64, rhs: f64, strict: bool) -> bool {
    if strict {
        lhs > rhs
    } else {
        lhs >= rhs
    }
}

/// Evaluates dominance classes against one tensor's cached radii.
#[derive(Debug, Clone)]
pub struct DominanceChecker<'a> {
    tensor: &'a Tensor,
    cache: RadiiCache,
    diag_abs: Vec<f64>,
}

impl<'a> DominanceChecker<'a> {
    pub fn new(tensor: &'a Tensor) -> Self {
        let cache = RadiiCache::new(tensor);
        let diag_abs = cache.diag.iter().map(|a| a.norm()).collect();
        DominanceChecker {
            tensor,
            cache,
            diag_abs,
        }
    }

    fn n(&self) -> usize {
        self.cache.dim()
    }

    fn first_failure<I>(&self, ineqs: I, strict: bool, split: Option<&PartitionRadii>) -> Option<Witness>
    where
        I: IntoIterator<Item = Inequality>,
    {
        ineqs.into_iter().find_map(|ineq| {
            let (lhs, rhs) = self.sides(ineq, split);
            (!compare(lhs, rhs, strict)).then_some(Witness {
                inequality: ineq,
                lhs,
                rhs,
            })
        })
    }

    fn sides(&self, ineq: Inequality, split: Option<&PartitionRadii>) -> (f64, f64) {
        let d = &self.diag_abs;
        let c = &self.cache;
        match ineq {
            Inequality::Diagonal { i } => (d[i], c.row[i]),
            Inequality::QuasiDoubly { i, j } => {
                ((d[i] - c.deleted(i, j)) * d[j], c.row[j] * c.pivot(i, j))
            }
            Inequality::SplitSubset { i, j } => {
                let (inside, outside) = split.expect("split radii").get(j, Side::Subset);
                (d[i] * (d[j] - outside), c.row[i] * inside)
            }
            Inequality::SplitComplement { i, j } => {
                let (inside, outside) = split.expect("split radii").get(i, Side::Complement);
                (d[j] * (d[i] - outside), c.row[j] * inside)
            }
        }
    }

    fn verdict(
        &self,
        class: DominanceClass,
        witness: Option<Witness>,
        partition: Option<&SubsetPartition>,
    ) -> ClassVerdict {
        ClassVerdict {
            class,
            holds: witness.is_none(),
            witness,
            partition: partition.cloned(),
        }
    }

    fn require_pairs(&self) -> Result<()> {
        if self.n() < 2 {
            return Err(Error::DimensionTooSmall(self.n()));
        }
        Ok(())
    }

    /// `|a_{i...i}| >= (>) r_i` for every `i`.
    pub fn diagonally_dominant(&self, strict: bool) -> ClassVerdict {
        let class = if strict {
            DominanceClass::Sdd
        } else {
            DominanceClass::Dd
        };
        let w = self.first_failure((0..self.n()).map(|i| Inequality::Diagonal { i }), strict, None);
        self.verdict(class, w, None)
    }

    /// The pairwise product condition over every ordered pair `i != j`.
    pub fn quasi_doubly(&self, strict: bool) -> Result<ClassVerdict> {
        self.require_pairs()?;
        let class = if strict {
            DominanceClass::Qdsdd
        } else {
            DominanceClass::Qdsdd0
        };
        let n = self.n();
        let pairs = (0..n)
            .cartesian_product(0..n)
            .filter(|(i, j)| i != j)
            .map(|(i, j)| Inequality::QuasiDoubly { i, j });
        Ok(self.verdict(class, self.first_failure(pairs, strict, None), None))
    }

    /// For each `i ∈ S`, `j ∈ S̄`: the quasi-doubly condition for `(i, j)`
    /// and for the mirrored pair `(j, i)`.
    pub fn s_quasi_doubly(&self, part: &SubsetPartition, strict: bool) -> Result<ClassVerdict> {
        self.require_pairs()?;
        part.check_dim(self.n())?;
        let class = if strict {
            DominanceClass::SQdsdd
        } else {
            DominanceClass::SQdsdd0
        };
        let ineqs = straddling(part).flat_map(|(i, j)| {
            [
                Inequality::QuasiDoubly { i, j },
                Inequality::QuasiDoubly { i: j, j: i },
            ]
        });
        Ok(self.verdict(class, self.first_failure(ineqs, strict, None), Some(part)))
    }

    /// For each `i ∈ S`, `j ∈ S̄`: both split-radius product conditions.
    pub fn s_sdd(&self, part: &SubsetPartition, strict: bool) -> Result<ClassVerdict> {
        self.require_pairs()?;
        let split = PartitionRadii::new(self.tensor, part)?;
        let class = if strict {
            DominanceClass::SSdd
        } else {
            DominanceClass::SSdd0
        };
        let ineqs = straddling(part).flat_map(|(i, j)| {
            [
                Inequality::SplitSubset { i, j },
                Inequality::SplitComplement { i, j },
            ]
        });
        Ok(self.verdict(class, self.first_failure(ineqs, strict, Some(&split)), Some(part)))
    }

    /// Dispatches on `class`; partition classes require `part`.
    pub fn check(&self, class: DominanceClass, part: Option<&SubsetPartition>) -> Result<ClassVerdict> {
        let strict = class.is_strict();
        match class {
            DominanceClass::Dd | DominanceClass::Sdd => Ok(self.diagonally_dominant(strict)),
            DominanceClass::Qdsdd0 | DominanceClass::Qdsdd => self.quasi_doubly(strict),
            DominanceClass::SQdsdd0 | DominanceClass::SQdsdd => {
                self.s_quasi_doubly(part.ok_or_else(missing_partition)?, strict)
            }
            DominanceClass::SSdd0 | DominanceClass::SSdd => {
                self.s_sdd(part.ok_or_else(missing_partition)?, strict)
            }
        }
    }

    /// First subset, by increasing size then lexicographically, for which
    /// `class` holds.
    pub fn find_subset(&self, class: DominanceClass, cap: usize) -> Result<Option<SubsetPartition>> {
        if !class.needs_partition() {
            return Err(Error::InvalidPartition(format!(
                "class {class} does not take a subset"
            )));
        }
        self.require_pairs()?;
        let n = self.n();
        if n > cap {
            return Err(Error::DimensionAboveCap { dim: n, cap });
        }
        for size in 1..n {
            for subset in (0..n).combinations(size) {
                let part = SubsetPartition::new(subset, n)?;
                if self.check(class, Some(&part))?.holds {
                    return Ok(Some(part));
                }
            }
        }
        Ok(None)
    }
}

fn straddling(part: &SubsetPartition) -> impl Iterator<Item = (usize, usize)> + '_ {
    part.subset()
        .iter()
        .flat_map(move |&i| part.complement().iter().map(move |&j| (i, j)))
}

pub fn is_diagonally_dominant(t: &Tensor, strict: bool) -> ClassVerdict {
    DominanceChecker::new(t).diagonally_dominant(strict)
}

pub fn is_quasi_doubly_dd(t: &Tensor, strict: bool) -> Result<ClassVerdict> {
    DominanceChecker::new(t).quasi_doubly(strict)
}

pub fn is_s_qdsdd(t: &Tensor, part: &SubsetPartition, strict: bool) -> Result<ClassVerdict> {
    DominanceChecker::new(t).s_quasi_doubly(part, strict)
}

pub fn is_s_sdd(t: &Tensor, part: &SubsetPartition, strict: bool) -> Result<ClassVerdict> {
    DominanceChecker::new(t).s_sdd(part, strict)
}

pub fn find_certifying_subset(t: &Tensor, class: DominanceClass) -> Result<Option<SubsetPartition>> {
    DominanceChecker::new(t).find_subset(class, DEFAULT_SEARCH_CAP)
}

/// Returns `((a-(b+c))/d, (a-b)/(c+d), a/(b+c+d))`.
///
/// When `a/(b+c+d) <= 1` the triple is non-decreasing, and when it is `>= 1`
/// the triple is non-increasing.
pub fn lemma_fraction_bounds(a: f64, b: f64, c: f64, d: f64) -> Result<(f64, f64, f64)> {
    if !(d > 0.0) {
        return Err(Error::NonPositiveDenominator(d));
    }
    Ok(((a - (b + c)) / d, (a - b) / (c + d), a / (b + c + d)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalSign {
    AllPositive,
    AllNonnegative,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conclusion {
    PositiveDefinite,
    PositiveSemidefinite,
    Inconclusive,
}

impl fmt::Display for DiagonalSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagonalSign::AllPositive => "all_positive",
            DiagonalSign::AllNonnegative => "all_nonnegative",
            DiagonalSign::Mixed => "mixed",
        })
    }
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conclusion::PositiveDefinite => "positive_definite",
            Conclusion::PositiveSemidefinite => "positive_semidefinite",
            Conclusion::Inconclusive => "inconclusive",
        })
    }
}

/// Where the certifier takes candidate partitions from.
#[derive(Debug, Clone, PartialEq)]
pub enum PartitionChoice {
    Explicit(Vec<SubsetPartition>),
    Search,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub symmetric: bool,
    pub even_order: bool,
    pub real: bool,
    pub diagonal_sign: DiagonalSign,
    pub verdicts: Vec<ClassVerdict>,
    pub conclusion: Conclusion,
    /// The class whose verdict completed the certificate.
    pub certified_by: Option<DominanceClass>,
    pub certifying_partition: Option<SubsetPartition>,
    pub reasons: Vec<String>,
}

impl CertificationReport {
    /// The verdict that certified the conclusion, if any.
    pub fn certificate(&self) -> Option<&ClassVerdict> {
        let class = self.certified_by?;
        self.verdicts
            .iter()
            .find(|v| v.holds && v.class == class && v.partition == self.certifying_partition)
    }
}

fn diagonal_sign(t: &Tensor) -> DiagonalSign {
    let diag: Vec<_> = (0..t.dim()).map(|i| t.diag(i)).collect();
    if diag.iter().any(|a| a.im != 0.0) {
        DiagonalSign::Mixed
    } else if diag.iter().all(|a| a.re > 0.0) {
        DiagonalSign::AllPositive
    } else if diag.iter().all(|a| a.re >= 0.0) {
        DiagonalSign::AllNonnegative
    } else {
        DiagonalSign::Mixed
    }
}

/// Walks one ladder, cheapest class first, and returns the first verdict
/// that holds. Every evaluated verdict is appended to `verdicts`.
fn climb(
    checker: &DominanceChecker<'_>,
    strict: bool,
    choice: &PartitionChoice,
    verdicts: &mut Vec<ClassVerdict>,
    reasons: &mut Vec<String>,
) -> Option<ClassVerdict> {
    for class in DominanceClass::ladder(strict) {
        if class.needs_pairs() && checker.n() < 2 {
            continue;
        }
        if !class.needs_partition() {
            let v = checker.check(class, None).expect("dimension checked");
            verdicts.push(v.clone());
            if v.holds {
                return Some(v);
            }
            continue;
        }
        match choice {
            PartitionChoice::Explicit(parts) => {
                for part in parts {
                    match checker.check(class, Some(part)) {
                        Ok(v) => {
                            verdicts.push(v.clone());
                            if v.holds {
                                return Some(v);
                            }
                        }
                        Err(e) => reasons.push(format!("{class} with S = {part}: {e}")),
                    }
                }
            }
            PartitionChoice::Search => match checker.find_subset(class, DEFAULT_SEARCH_CAP) {
                Ok(Some(part)) => {
                    let v = checker.check(class, Some(&part)).expect("searched partition");
                    verdicts.push(v.clone());
                    return Some(v);
                }
                Ok(None) => reasons.push(format!("no subset S makes the tensor {class}")),
                Err(e) => reasons.push(format!("{class} subset search: {e}")),
            },
        }
    }
    None
}

/// Tries to certify positive (semi-)definiteness.
///
/// The strict ladder is tried first; if it certifies nothing, the non-strict
/// ladder is tried for semi-definiteness. A certificate additionally needs an
/// even order, real entries, symmetry and a positive (nonnegative) diagonal.
/// The certifier never concludes indefiniteness.
pub fn certify_definiteness(t: &Tensor, choice: &PartitionChoice) -> CertificationReport {
    let checker = DominanceChecker::new(t);
    let symmetric = t.is_symmetric();
    let even_order = t.order() % 2 == 0;
    let real = t.is_real();
    let sign = diagonal_sign(t);

    let mut reasons = Vec::new();
    if !even_order {
        reasons.push("odd order".to_string());
    }
    if !real {
        reasons.push("complex entries".to_string());
    }
    if !symmetric {
        reasons.push("not symmetric".to_string());
    }
    let eligible = even_order && real && symmetric;

    let mut verdicts = Vec::new();
    let mut conclusion = Conclusion::Inconclusive;
    let mut certified: Option<ClassVerdict> = None;

    let strict_hit = climb(&checker, true, choice, &mut verdicts, &mut reasons);
    match (&strict_hit, sign) {
        (Some(v), DiagonalSign::AllPositive) if eligible => {
            conclusion = Conclusion::PositiveDefinite;
            certified = Some(v.clone());
        }
        (Some(v), DiagonalSign::AllNonnegative) if eligible => {
            // a strict class is also non-strict
            reasons.push("diagonal has zeros; strict class gives semi-definiteness only".into());
            conclusion = Conclusion::PositiveSemidefinite;
            certified = Some(v.clone());
        }
        _ => {}
    }

    if certified.is_none() {
        let weak_hit = climb(&checker, false, choice, &mut verdicts, &mut reasons);
        if let Some(v) = weak_hit {
            if eligible && sign != DiagonalSign::Mixed {
                conclusion = Conclusion::PositiveSemidefinite;
                certified = Some(v);
            }
        }
    }

    if certified.is_none() {
        if sign == DiagonalSign::Mixed {
            reasons.push("diagonal has negative or complex entries".into());
        }
        if strict_hit.is_none() && !verdicts.iter().any(|v| v.holds) {
            reasons.push("no dominance class holds".into());
        }
    }

    CertificationReport {
        symmetric,
        even_order,
        real,
        diagonal_sign: sign,
        verdicts,
        conclusion,
        certified_by: certified.as_ref().map(|v| v.class),
        certifying_partition: certified.and_then(|v| v.partition),
        reasons,
    }
}
