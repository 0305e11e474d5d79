//! Eigenvalue localization sets in the complex plane.
//!
//! Four nested sets are supported: the Geršgorin-type disks `Γ`, the
//! Brauer-type set `K`, its subset-restricted variant `K^S`, and `Ω^S`,
//! which only uses the split radii of one partition. All sets are closed and
//! every defining inequality is evaluated in product form, with no clamping
//! of negative left factors.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::{PartitionRadii, RadiiCache, Side, SubsetPartition, Tensor};

/// Default relative margin used by [`default_window`].
pub const DEFAULT_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionKind {
    Gamma,
    Brauer,
    SBrauer,
    OmegaS,
}

impl RegionKind {
    pub const ALL: [RegionKind; 4] = [
        RegionKind::Gamma,
        RegionKind::Brauer,
        RegionKind::SBrauer,
        RegionKind::OmegaS,
    ];

    pub fn needs_partition(self) -> bool {
        matches!(self, RegionKind::SBrauer | RegionKind::OmegaS)
    }

    pub fn name(self) -> &'static str {
        match self {
            RegionKind::Gamma => "gamma",
            RegionKind::Brauer => "brauer",
            RegionKind::SBrauer => "sbrauer",
            RegionKind::OmegaS => "omega",
        }
    }
}

impl std::str::FromStr for RegionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gamma" => Ok(RegionKind::Gamma),
            "brauer" => Ok(RegionKind::Brauer),
            "sbrauer" | "s_brauer" => Ok(RegionKind::SBrauer),
            "omega" | "omega_s" => Ok(RegionKind::OmegaS),
            other => Err(format!("unknown region kind '{other}'")),
        }
    }
}

/// Which region to evaluate, with the partition it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSpec {
    kind: RegionKind,
    partition: Option<SubsetPartition>,
}

impl RegionSpec {
    pub fn new(kind: RegionKind, partition: Option<SubsetPartition>) -> Result<Self> {
        match (kind.needs_partition(), partition.is_some()) {
            (true, false) => Err(Error::InvalidPartition(format!(
                "region '{}' requires a subset",
                kind.name()
            ))),
            (false, true) => Err(Error::InvalidPartition(format!(
                "region '{}' does not take a subset",
                kind.name()
            ))),
            _ => Ok(RegionSpec { kind, partition }),
        }
    }

    pub fn gamma() -> Self {
        RegionSpec {
            kind: RegionKind::Gamma,
            partition: None,
        }
    }

    pub fn brauer() -> Self {
        RegionSpec {
            kind: RegionKind::Brauer,
            partition: None,
        }
    }

    pub fn s_brauer(part: SubsetPartition) -> Self {
        RegionSpec {
            kind: RegionKind::SBrauer,
            partition: Some(part),
        }
    }

    pub fn omega_s(part: SubsetPartition) -> Self {
        RegionSpec {
            kind: RegionKind::OmegaS,
            partition: Some(part),
        }
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn partition(&self) -> Option<&SubsetPartition> {
        self.partition.as_ref()
    }
}

/// Inflates a right-hand side by `rel * (1 + |rhs|)`; zero leaves it untouched.
#[inline]
fn inflate(rhs: f64, rel: f64) -> f64 {
    rhs + rel * (1.0 + rhs.abs())
}

/// Membership predicates for one tensor, with radii computed once.
#[derive(Debug, Clone)]
pub struct Regions {
    cache: RadiiCache,
    split: Option<PartitionRadii>,
}

impl Regions {
    pub fn new(t: &Tensor) -> Self {
        Regions {
            cache: RadiiCache::new(t),
            split: None,
        }
    }

    pub fn with_partition(t: &Tensor, part: &SubsetPartition) -> Result<Self> {
        if t.dim() < 2 {
            return Err(Error::DimensionTooSmall(t.dim()));
        }
        Ok(Regions {
            cache: RadiiCache::new(t),
            split: Some(PartitionRadii::new(t, part)?),
        })
    }

    pub fn radii(&self) -> &RadiiCache {
        &self.cache
    }

    pub fn partition(&self) -> Option<&SubsetPartition> {
        self.split.as_ref().map(|s| &s.partition)
    }

    fn distances(&self, z: Complex64) -> Vec<f64> {
        self.cache.diag.iter().map(|&a| (z - a).norm()).collect()
    }

    fn split(&self) -> Result<&PartitionRadii> {
        self.split
            .as_ref()
            .ok_or_else(|| Error::InvalidPartition("no subset configured".into()))
    }

    pub fn gamma(&self, z: Complex64) -> bool {
        self.gamma_inflated(z, 0.0)
    }

    pub fn gamma_inflated(&self, z: Complex64, rel: f64) -> bool {
        gamma_at(&self.cache, &self.distances(z), rel)
    }

    pub fn brauer(&self, z: Complex64) -> bool {
        self.brauer_inflated(z, 0.0)
    }

    pub fn brauer_inflated(&self, z: Complex64, rel: f64) -> bool {
        let n = self.cache.dim();
        let dist = self.distances(z);
        (0..n).any(|i| (0..n).any(|j| j != i && brauer_pair(&self.cache, &dist, i, j, rel)))
    }

    pub fn s_brauer(&self, z: Complex64) -> Result<bool> {
        self.s_brauer_inflated(z, 0.0)
    }

    pub fn s_brauer_inflated(&self, z: Complex64, rel: f64) -> Result<bool> {
        let split = self.split()?;
        Ok(s_brauer_at(&self.cache, &split.partition, &self.distances(z), rel))
    }

    pub fn omega_s(&self, z: Complex64) -> Result<bool> {
        self.omega_s_inflated(z, 0.0)
    }

    pub fn omega_s_inflated(&self, z: Complex64, rel: f64) -> Result<bool> {
        let split = self.split()?;
        Ok(omega_at(&self.cache, split, &self.distances(z), rel))
    }

    /// Membership in any of the four regions. `rel` inflates every right-hand
    /// side; pass 0 for the exact closed sets.
    pub fn contains(&self, kind: RegionKind, z: Complex64, rel: f64) -> Result<bool> {
        match kind {
            RegionKind::Gamma => Ok(self.gamma_inflated(z, rel)),
            RegionKind::Brauer => Ok(self.brauer_inflated(z, rel)),
            RegionKind::SBrauer => self.s_brauer_inflated(z, rel),
            RegionKind::OmegaS => self.omega_s_inflated(z, rel),
        }
    }

    /// Evaluates all four memberships at once, sharing the distance vector.
    pub fn chain(&self, z: Complex64) -> Result<[bool; 4]> {
        let split = self.split()?;
        let dist = self.distances(z);
        let n = self.cache.dim();
        Ok([
            gamma_at(&self.cache, &dist, 0.0),
            (0..n).any(|i| (0..n).any(|j| j != i && brauer_pair(&self.cache, &dist, i, j, 0.0))),
            s_brauer_at(&self.cache, &split.partition, &dist, 0.0),
            omega_at(&self.cache, split, &dist, 0.0),
        ])
    }
}

fn gamma_at(cache: &RadiiCache, dist: &[f64], rel: f64) -> bool {
    dist.iter()
        .zip(&cache.row)
        .any(|(&d, &r)| d <= inflate(r, rel))
}

/// `z ∈ K_{i,j}`
#[inline]
fn brauer_pair(cache: &RadiiCache, dist: &[f64], i: usize, j: usize, rel: f64) -> bool {
    let lhs = (dist[i] - cache.deleted(i, j)) * dist[j];
    lhs <= inflate(cache.pivot(i, j) * cache.row[j], rel)
}

fn s_brauer_at(cache: &RadiiCache, part: &SubsetPartition, dist: &[f64], rel: f64) -> bool {
    part.subset().iter().any(|&i| {
        part.complement()
            .iter()
            .any(|&j| brauer_pair(cache, dist, i, j, rel) || brauer_pair(cache, dist, j, i, rel))
    })
}

/// `z ∈ Ω^X_{i,j}` where `X` is `side` of the partition.
#[inline]
fn omega_pair(
    cache: &RadiiCache,
    split: &PartitionRadii,
    side: Side,
    dist: &[f64],
    i: usize,
    j: usize,
    rel: f64,
) -> bool {
    let (inside, outside) = split.get(j, side);
    let lhs = dist[i] * (dist[j] - outside);
    lhs <= inflate(cache.row[i] * inside, rel)
}

fn omega_at(cache: &RadiiCache, split: &PartitionRadii, dist: &[f64], rel: f64) -> bool {
    let part = &split.partition;
    part.subset().iter().any(|&i| {
        part.complement()
            .iter()
            .any(|&j| omega_pair(cache, split, Side::Subset, dist, i, j, rel))
    }) || part.complement().iter().any(|&i| {
        part.subset()
            .iter()
            .any(|&j| omega_pair(cache, split, Side::Complement, dist, i, j, rel))
    })
}

fn require_pairs(t: &Tensor) -> Result<()> {
    if t.dim() < 2 {
        return Err(Error::DimensionTooSmall(t.dim()));
    }
    Ok(())
}

/// `z ∈ Γ(A)`: some disk `|z - a_{i...i}| <= r_i` contains `z`.
pub fn gamma_contains(t: &Tensor, z: Complex64) -> bool {
    Regions::new(t).gamma(z)
}

/// `z ∈ K(A)`, the union of `K_{i,j}` over ordered pairs `i != j`.
pub fn brauer_contains(t: &Tensor, z: Complex64) -> Result<bool> {
    require_pairs(t)?;
    Ok(Regions::new(t).brauer(z))
}

/// `z ∈ K^S(A)`: only pairs straddling the partition contribute.
pub fn s_brauer_contains(t: &Tensor, part: &SubsetPartition, z: Complex64) -> Result<bool> {
    Regions::with_partition(t, part)?.s_brauer(z)
}

/// `z ∈ Ω^S(A)`.
pub fn omega_s_contains(t: &Tensor, part: &SubsetPartition, z: Complex64) -> Result<bool> {
    Regions::with_partition(t, part)?.omega_s(z)
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let finite = [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite());
        if !finite || re_min > re_max || im_min > im_max {
            return Err(Error::DegenerateWindow);
        }
        Ok(Window {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    /// Grows every side by `pad`.
    pub fn padded(&self, pad: f64) -> Window {
        Window {
            re_min: self.re_min - pad,
            re_max: self.re_max + pad,
            im_min: self.im_min - pad,
            im_max: self.im_max + pad,
        }
    }
}

/// Bounding box of all Geršgorin disks, before any margin is applied.
pub fn gamma_bounding_box(t: &Tensor) -> Window {
    let cache = RadiiCache::new(t);
    let mut w = Window {
        re_min: f64::INFINITY,
        re_max: f64::NEG_INFINITY,
        im_min: f64::INFINITY,
        im_max: f64::NEG_INFINITY,
    };
    for (a, &r) in cache.diag.iter().zip(&cache.row) {
        w.re_min = w.re_min.min(a.re - r);
        w.re_max = w.re_max.max(a.re + r);
        w.im_min = w.im_min.min(a.im - r);
        w.im_max = w.im_max.max(a.im + r);
    }
    w
}

/// Bounding box of the Geršgorin disks grown by `margin_factor` times its
/// larger side. A box of zero size is grown by `max(1, margin_factor)` instead.
pub fn default_window(t: &Tensor, margin_factor: f64) -> Window {
    let w = gamma_bounding_box(t);
    let side = w.width().max(w.height());
    if side > 0.0 {
        w.padded(margin_factor * side)
    } else {
        w.padded(margin_factor.max(1.0))
    }
}

/// Boolean membership grid over a window.
///
/// Cell `(r, c)` samples the center of its rectangle; row 0 is the top row
/// (largest imaginary part).
#[derive(Debug, Clone, PartialEq)]
pub struct GridRaster {
    pub window: Window,
    pub cols: usize,
    pub rows: usize,
    pub cells: Vec<bool>,
    pub region: RegionSpec,
    /// Geršgorin disks `(a_{i...i}, r_i)`, filled for `gamma` rasters.
    pub disks: Vec<(Complex64, f64)>,
}

impl GridRaster {
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.cols + col]
    }

    pub fn center(&self, row: usize, col: usize) -> Complex64 {
        cell_center(&self.window, self.cols, self.rows, row, col)
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }
}

fn cell_center(w: &Window, cols: usize, rows: usize, row: usize, col: usize) -> Complex64 {
    let re = w.re_min + ((col as f64 + 0.5) * w.width()) / cols as f64;
    let im = w.im_max - ((row as f64 + 0.5) * w.height()) / rows as f64;
    Complex64::new(re, im)
}

/// Samples `spec` at every cell center. Rows are evaluated in parallel; the
/// result does not depend on scheduling.
pub fn rasterize(
    t: &Tensor,
    spec: &RegionSpec,
    window: &Window,
    cols: usize,
    rows: usize,
) -> Result<GridRaster> {
    if cols == 0 || rows == 0 {
        return Err(Error::InvalidResolution { cols, rows });
    }
    if (window.width() == 0.0 && cols > 1) || (window.height() == 0.0 && rows > 1) {
        return Err(Error::DegenerateWindow);
    }
    let regions = match spec.partition() {
        Some(p) => Regions::with_partition(t, p)?,
        None => {
            if spec.kind() == RegionKind::Brauer {
                require_pairs(t)?;
            }
            Regions::new(t)
        }
    };
    let kind = spec.kind();
    let cells: Vec<Vec<bool>> = (0..rows)
        .into_par_iter()
        .map(|r| {
            (0..cols)
                .map(|c| {
                    let z = cell_center(window, cols, rows, r, c);
                    regions.contains(kind, z, 0.0).expect("partition checked")
                })
                .collect()
        })
        .collect();
    let disks = if kind == RegionKind::Gamma {
        let cache = regions.radii();
        cache.diag.iter().copied().zip(cache.row.iter().copied()).collect()
    } else {
        Vec::new()
    };
    Ok(GridRaster {
        window: *window,
        cols,
        rows,
        cells: cells.into_iter().flatten().collect(),
        region: spec.clone(),
        disks,
    })
}

/// One link of `Ω^S ⊆ K^S ⊆ K ⊆ Γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainLink {
    OmegaInSBrauer,
    SBrauerInBrauer,
    BrauerInGamma,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainViolation {
    pub z: Complex64,
    pub link: ChainLink,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub points: usize,
    pub violations: Vec<ChainViolation>,
}

/// Points on and just around every Geršgorin circle, plus points along the
/// lines joining pairs of diagonal entries, where the Cassini-type
/// boundaries cross.
pub fn boundary_probe_points(t: &Tensor) -> Vec<Complex64> {
    const ANGLES: usize = 64;
    const FACTORS: [f64; 5] = [1.0 - 1e-3, 1.0 - 1e-9, 1.0, 1.0 + 1e-9, 1.0 + 1e-3];
    const SEGMENT: usize = 64;

    let cache = RadiiCache::new(t);
    let mut pts = Vec::new();
    for (&a, &r) in cache.diag.iter().zip(&cache.row) {
        pts.push(a);
        if r == 0.0 {
            continue;
        }
        for k in 0..ANGLES {
            let dir = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / ANGLES as f64);
            pts.extend(FACTORS.iter().map(|f| a + dir * (r * f)));
        }
    }
    let n = cache.diag.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (cache.diag[i], cache.diag[j]);
            for k in 0..=SEGMENT {
                let s = -1.0 + 3.0 * k as f64 / SEGMENT as f64;
                pts.push(a + (b - a) * s);
            }
        }
    }
    pts
}

/// Samples points and reports any that break the inclusion chain
/// `Ω^S ⊆ K^S ⊆ K ⊆ Γ`.
///
/// Points are `samples` uniform draws from [`default_window`] followed by
/// [`boundary_probe_points`].
pub fn verify_inclusion_chain(
    t: &Tensor,
    part: &SubsetPartition,
    samples: usize,
    seed: u64,
) -> Result<ChainReport> {
    let regions = Regions::with_partition(t, part)?;
    let w = default_window(t, DEFAULT_MARGIN);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Complex64> = (0..samples)
        .map(|_| {
            Complex64::new(
                rng.random_range(w.re_min..=w.re_max),
                rng.random_range(w.im_min..=w.im_max),
            )
        })
        .collect();
    points.extend(boundary_probe_points(t));

    let mut violations = Vec::new();
    for &z in &points {
        let [gamma, brauer, s_brauer, omega] = regions.chain(z)?;
        if omega && !s_brauer {
            violations.push(ChainViolation {
                z,
                link: ChainLink::OmegaInSBrauer,
            });
        }
        if s_brauer && !brauer {
            violations.push(ChainViolation {
                z,
                link: ChainLink::SBrauerInBrauer,
            });
        }
        if brauer && !gamma {
            violations.push(ChainViolation {
                z,
                link: ChainLink::BrauerInGamma,
            });
        }
    }
    Ok(ChainReport {
        points: points.len(),
        violations,
    })
}
