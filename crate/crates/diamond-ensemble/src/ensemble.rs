//! Parallel layouts with energy-minimizing heights, and seeded random point
//! sets built from them.
//!
//! A layout places `r_j` points on parallel `j` at height `z_j`. For fixed
//! counts the expected logarithmic energy has a unique minimizer over the
//! heights,
//!
//! ```text
//! z_j = 1 - u_j / (N - 1),    u_j = 1 + r_j + 2 Σ_{k<j} r_k,
//! ```
//!
//! and the integer numerators `u_j` are kept exactly: near the poles
//! `1 - z_j` is O(1/N), so all quantities of the form `1 ∓ z_j` and
//! `1 - z_j²` are derived from `u_j` rather than by subtracting a rounded
//! `z_j` from 1.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;
use thiserror::Error;

use crate::profile::{Profile, ProfileError};

/// Identifier of the pinned phase generator, embedded in export metadata.
///
/// Seeding: `ChaCha8Rng::seed_from_u64(seed)`; phases are drawn sequentially
/// as `theta = 2π * ((next_u64() >> 11) as f64) * 2^-53`, one per parallel in
/// order. Derived trial seeds (see [`crate::monte_carlo`]) use the same
/// generator with `set_stream(k)`.
pub const GENERATOR_ID: &str = "chacha8/u64-seed/theta-53bit";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error("a layout needs at least one parallel")]
    EmptyCounts,
    #[error("parallel {index} has count {count}; every parallel needs at least one point")]
    NonPositiveCount { index: usize, count: i64 },
    #[error("point count exceeds the 64-bit integer range")]
    Overflow,
    #[error("{counts} counts but {heights} heights")]
    HeightsLengthMismatch { counts: usize, heights: usize },
    #[error("heights must be strictly decreasing and inside (-1, 1); violation at index {index} (z = {z})")]
    InvalidHeight { index: usize, z: f64 },
    #[error("x = {x} outside piece domain [{lo}, {hi}]")]
    OutOfPiece { x: f64, lo: i64, hi: i64 },
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

#[derive(Clone, Debug, PartialEq)]
enum Heights {
    /// Energy-minimizing heights, stored as exact numerators of `1 - z_j`
    /// over `N - 1`.
    Optimal { numerators: Vec<i64> },
    /// Caller-supplied heights; only ordering and range are guaranteed.
    Custom { z: Vec<f64> },
}

/// Per-parallel counts and heights for `p` parallels plus the two poles.
#[derive(Clone, Debug, PartialEq)]
pub struct ParallelLayout {
    counts: Vec<i64>,
    heights: Heights,
    n_points: i64,
    source_profile: Option<Profile>,
}

impl ParallelLayout {
    /// Layout with the unique energy-minimizing heights for these counts.
    pub fn from_counts(counts: &[i64]) -> Result<Self, LayoutError> {
        if counts.is_empty() {
            return Err(LayoutError::EmptyCounts);
        }
        for (index, &count) in counts.iter().enumerate() {
            if count < 1 {
                return Err(LayoutError::NonPositiveCount { index, count });
            }
        }
        let mut prefix: i64 = 0; // Σ_{k<j} r_k
        let mut numerators = Vec::with_capacity(counts.len());
        for &r in counts {
            let u = 1i64
                .checked_add(r)
                .and_then(|v| v.checked_add(prefix.checked_mul(2)?))
                .ok_or(LayoutError::Overflow)?;
            numerators.push(u);
            prefix = prefix.checked_add(r).ok_or(LayoutError::Overflow)?;
        }
        let n_points = prefix.checked_add(2).ok_or(LayoutError::Overflow)?;
        Ok(ParallelLayout {
            counts: counts.to_vec(),
            heights: Heights::Optimal { numerators },
            n_points,
            source_profile: None,
        })
    }

    /// Layout with caller-supplied heights (strictly decreasing, inside
    /// `(-1, 1)`). Used for formula generality and optimality probing; the
    /// exact-numerator paths are unavailable.
    pub fn with_heights(counts: &[i64], z: &[f64]) -> Result<Self, LayoutError> {
        if counts.is_empty() {
            return Err(LayoutError::EmptyCounts);
        }
        for (index, &count) in counts.iter().enumerate() {
            if count < 1 {
                return Err(LayoutError::NonPositiveCount { index, count });
            }
        }
        if counts.len() != z.len() {
            return Err(LayoutError::HeightsLengthMismatch {
                counts: counts.len(),
                heights: z.len(),
            });
        }
        for (index, &h) in z.iter().enumerate() {
            let ordered = index == 0 || z[index - 1] > h;
            if !(-1.0 < h && h < 1.0) || !ordered || !h.is_finite() {
                return Err(LayoutError::InvalidHeight { index, z: h });
            }
        }
        let mut total: i64 = 2;
        for &r in counts {
            total = total.checked_add(r).ok_or(LayoutError::Overflow)?;
        }
        Ok(ParallelLayout {
            counts: counts.to_vec(),
            heights: Heights::Custom { z: z.to_vec() },
            n_points: total,
            source_profile: None,
        })
    }

    /// Layout of a profile: counts `r(1) .. r(2M-1)` with optimal heights.
    pub fn from_profile(profile: &Profile) -> Result<Self, LayoutError> {
        let counts = profile.parallel_counts()?;
        let mut layout = Self::from_counts(&counts)?;
        layout.source_profile = Some(profile.clone());
        Ok(layout)
    }

    /// Number of parallels `p`.
    pub fn parallel_count(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    /// Total number of points `N` including both poles.
    pub fn n_points(&self) -> i64 {
        self.n_points
    }

    pub fn source_profile(&self) -> Option<&Profile> {
        self.source_profile.as_ref()
    }

    /// Whether the heights are the closed-form energy minimizers.
    pub fn has_optimal_heights(&self) -> bool {
        matches!(self.heights, Heights::Optimal { .. })
    }

    /// Whether `r_j = r_{p+1-j}` for all parallels.
    pub fn is_symmetric(&self) -> bool {
        let p = self.counts.len();
        (0..p / 2).all(|j| self.counts[j] == self.counts[p - 1 - j])
    }

    /// Exact numerator `u_j` of `1 - z_j` over `N - 1`, when optimal.
    pub fn height_numerator(&self, j: usize) -> Option<i64> {
        match &self.heights {
            Heights::Optimal { numerators } => Some(numerators[j]),
            Heights::Custom { .. } => None,
        }
    }

    /// Height `z_j` of parallel `j` (0-based).
    pub fn z(&self, j: usize) -> f64 {
        match &self.heights {
            Heights::Optimal { numerators } => {
                let d = self.n_points - 1;
                (d - numerators[j]) as f64 / d as f64
            }
            Heights::Custom { z } => z[j],
        }
    }

    /// `1 - z_j`, exact-numerator path when available.
    pub fn one_minus_z(&self, j: usize) -> f64 {
        match &self.heights {
            Heights::Optimal { numerators } => numerators[j] as f64 / (self.n_points - 1) as f64,
            Heights::Custom { z } => 1.0 - z[j],
        }
    }

    /// `1 + z_j`, exact-numerator path when available.
    pub fn one_plus_z(&self, j: usize) -> f64 {
        match &self.heights {
            Heights::Optimal { numerators } => {
                let d = self.n_points - 1;
                (2 * d - numerators[j]) as f64 / d as f64
            }
            Heights::Custom { z } => 1.0 + z[j],
        }
    }

    /// `log(1 - z_j)` without cancellation near the north pole.
    pub fn ln_one_minus_z(&self, j: usize) -> f64 {
        match &self.heights {
            Heights::Optimal { numerators } => {
                (numerators[j] as f64).ln() - ((self.n_points - 1) as f64).ln()
            }
            Heights::Custom { z } => (1.0 - z[j]).ln(),
        }
    }

    /// `log(1 + z_j)` without cancellation near the south pole.
    pub fn ln_one_plus_z(&self, j: usize) -> f64 {
        match &self.heights {
            Heights::Optimal { numerators } => {
                let d = self.n_points - 1;
                ((2 * d - numerators[j]) as f64).ln() - (d as f64).ln()
            }
            Heights::Custom { z } => (1.0 + z[j]).ln(),
        }
    }

    /// `log(1 - z_j²) = log u_j + log(2(N-1) - u_j) - 2 log(N-1)`.
    pub fn ln_one_minus_z_sq(&self, j: usize) -> f64 {
        match &self.heights {
            Heights::Optimal { numerators } => {
                let d = (self.n_points - 1) as f64;
                let u = numerators[j] as f64;
                u.ln() + (2.0 * d - u).ln() - 2.0 * d.ln()
            }
            Heights::Custom { z } => (1.0 - z[j] * z[j]).ln(),
        }
    }

    /// Parallel radius `sqrt(1 - z_j²) = sqrt(u_j (2(N-1) - u_j)) / (N-1)`.
    /// The radicand is a product of positive integers, so it can never go
    /// negative through rounding.
    pub fn radius(&self, j: usize) -> f64 {
        match &self.heights {
            Heights::Optimal { numerators } => {
                let d = (self.n_points - 1) as f64;
                let u = numerators[j] as f64;
                (u * (2.0 * d - u)).sqrt() / d
            }
            Heights::Custom { z } => (1.0 - z[j] * z[j]).sqrt(),
        }
    }

    /// Draws phases from the pinned generator and realizes the point set.
    ///
    /// The phase vector is drawn sequentially before any per-parallel work,
    /// so output is identical regardless of how the parallels are filled in.
    pub fn sample(&self, seed: u64) -> PointSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phases: Vec<f64> = (0..self.counts.len())
            .map(|_| TAU * ((rng.next_u64() >> 11) as f64) * (-53f64).exp2())
            .collect();
        self.realize(seed, phases)
    }

    fn realize(&self, seed: u64, phases: Vec<f64>) -> PointSet {
        let p = self.counts.len();
        let per_parallel: Vec<Vec<[f64; 3]>> = (0..p)
            .into_par_iter()
            .map(|j| {
                let r = self.counts[j];
                let z = self.z(j);
                let rho = self.radius(j);
                let theta = phases[j];
                (1..=r)
                    .map(|i| {
                        let angle = TAU * i as f64 / r as f64 + theta;
                        [rho * angle.cos(), rho * angle.sin(), z]
                    })
                    .collect()
            })
            .collect();

        let mut points = Vec::with_capacity(self.n_points as usize);
        points.push([0.0, 0.0, 1.0]);
        for chunk in per_parallel {
            points.extend_from_slice(&chunk);
        }
        points.push([0.0, 0.0, -1.0]);

        PointSet {
            points,
            phases,
            layout: self.clone(),
            seed,
        }
    }
}

/// A realized configuration: both poles plus `r_j` rotated roots of unity on
/// each parallel.
///
/// Point order is fixed: north pole first, then parallels `j = 1..p` each in
/// `i = 1..r_j` order, south pole last.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    points: Vec<[f64; 3]>,
    phases: Vec<f64>,
    layout: ParallelLayout,
    seed: u64,
}

impl PointSet {
    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn layout(&self) -> &ParallelLayout {
        &self.layout
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The points of parallel `j` (0-based), excluding poles.
    pub fn parallel_points(&self, j: usize) -> &[[f64; 3]] {
        let start = 1 + self.layout.counts[..j].iter().sum::<i64>() as usize;
        let len = self.layout.counts[j] as usize;
        &self.points[start..start + len]
    }

    pub fn north_pole(&self) -> [f64; 3] {
        self.points[0]
    }

    pub fn south_pole(&self) -> [f64; 3] {
        *self.points.last().unwrap()
    }

    /// Writes the `x,y,z` CSV (17 significant digits, documented point
    /// order). The format round-trips every f64 exactly.
    pub fn write_csv(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "x,y,z")?;
        for pt in &self.points {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", pt[0], pt[1], pt[2])?;
        }
        Ok(())
    }

    /// Provenance sidecar matching the CSV export.
    pub fn sidecar(&self) -> Sidecar<'_> {
        Sidecar {
            seed: self.seed,
            generator_id: GENERATOR_ID,
            profile: self.layout.source_profile.clone(),
            phases: &self.phases,
        }
    }
}

/// JSON sidecar written next to a points CSV.
#[derive(Serialize)]
pub struct Sidecar<'a> {
    pub seed: u64,
    pub generator_id: &'static str,
    pub profile: Option<Profile>,
    pub phases: &'a [f64],
}

/// Quadratic describing `1 - z(x)` on one profile piece:
/// `1 - z_l(x) = (β x² + 2α x + C_l) / (N - 1)` with integer coefficients.
/// At integer `x = j` the numerator equals the layout numerator `u_j`.
#[derive(Clone, Copy, Debug)]
pub struct HeightCurve {
    beta: i64,
    alpha: i64,
    constant: i64,
    denom: i64,
    domain: (i64, i64),
}

impl HeightCurve {
    /// Curve for piece `l` (0-based) of the profile.
    pub fn from_profile(profile: &Profile, piece: usize) -> Result<Self, LayoutError> {
        let (lo, hi) = profile.piece_domain(piece);
        let p = profile.pieces()[piece];
        let n = profile.total_points()?;
        // points strictly before the piece's left knot
        let before = if lo == 0 {
            0
        } else {
            profile.cumulative_points_through(lo - 1)?
        };
        let constant = 1i64
            .checked_add(before.checked_mul(2).ok_or(LayoutError::Overflow)?)
            .and_then(|v| v.checked_add(p.alpha))
            .and_then(|v| v.checked_sub(p.alpha.checked_mul(2 * lo)?))
            .and_then(|v| v.checked_add(p.beta.checked_mul(lo.checked_mul(1 - lo)?)?))
            .ok_or(LayoutError::Overflow)?;
        Ok(HeightCurve {
            beta: p.beta,
            alpha: p.alpha,
            constant,
            denom: n - 1,
            domain: (lo, hi),
        })
    }

    pub fn domain(&self) -> (i64, i64) {
        self.domain
    }

    /// Exact integer numerator of `1 - z(j)` at integer `j`.
    pub fn numerator_at(&self, j: i64) -> i64 {
        self.beta * j * j + 2 * self.alpha * j + self.constant
    }

    /// `1 - z(x)`.
    pub fn one_minus_z(&self, x: f64) -> f64 {
        let num = self.beta as f64 * x * x + 2.0 * self.alpha as f64 * x + self.constant as f64;
        num / self.denom as f64
    }

    /// `1 + z(x)`.
    pub fn one_plus_z(&self, x: f64) -> f64 {
        2.0 - self.one_minus_z(x)
    }

    /// `z(x)`.
    pub fn z(&self, x: f64) -> f64 {
        1.0 - self.one_minus_z(x)
    }

    /// `d/dx (1 - z(x)) = (2βx + 2α) / (N-1)`.
    pub fn one_minus_z_prime(&self, x: f64) -> f64 {
        (2.0 * self.beta as f64 * x + 2.0 * self.alpha as f64) / self.denom as f64
    }

    /// `d²/dx² (1 - z(x)) = 2β / (N-1)`.
    pub fn one_minus_z_second(&self) -> f64 {
        2.0 * self.beta as f64 / self.denom as f64
    }
}

/// Height of the piecewise-quadratic interpolation `z_l(x)` through the
/// optimal heights, for `x` in the piece's domain (0-based piece index).
pub fn height_polynomial(profile: &Profile, piece: usize, x: f64) -> Result<f64, LayoutError> {
    let curve = HeightCurve::from_profile(profile, piece)?;
    let (lo, hi) = curve.domain();
    if !(lo as f64 <= x && x <= hi as f64) {
        return Err(LayoutError::OutOfPiece { x, lo, hi });
    }
    Ok(curve.z(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_heights(counts: &[i64], want: &[(i64, i64)]) {
        let layout = ParallelLayout::from_counts(counts).unwrap();
        for (j, &(num, den)) in want.iter().enumerate() {
            let z = layout.z(j);
            let expect = num as f64 / den as f64;
            assert!((z - expect).abs() < 1e-15, "z[{j}] = {z}, want {num}/{den}");
        }
    }

    #[test]
    fn optimal_heights_small_cases() {
        assert_heights(&[1], &[(0, 1)]);
        assert_heights(&[1, 2, 1], &[(3, 5), (0, 5), (-3, 5)]);
        assert_heights(&[2, 2, 2], &[(4, 7), (0, 7), (-4, 7)]);
        assert_heights(&[2, 2], &[(2, 5), (-2, 5)]);
    }

    #[test]
    fn both_height_expressions_agree_exactly() {
        // z_l = (Σ_{j>l} r_j - Σ_{j<l} r_j) / (N-1) must equal
        // 1 - u_l/(N-1) with identical integer numerators.
        let cases: Vec<Vec<i64>> = vec![
            vec![1],
            vec![3, 1, 4, 1, 5],
            vec![7, 2, 9, 9, 2, 7],
            Profile::quasioptimal(2).unwrap().parallel_counts().unwrap(),
        ];
        for counts in cases {
            let layout = ParallelLayout::from_counts(&counts).unwrap();
            let d = layout.n_points() - 1;
            for l in 0..counts.len() {
                let above: i64 = counts[l + 1..].iter().sum();
                let below: i64 = counts[..l].iter().sum();
                let u = layout.height_numerator(l).unwrap();
                assert_eq!(above - below, d - u);
            }
        }
    }

    #[test]
    fn symmetric_counts_give_antisymmetric_heights() {
        let profile = Profile::quasioptimal(1).unwrap();
        let layout = ParallelLayout::from_profile(&profile).unwrap();
        let p = layout.parallel_count();
        let d = layout.n_points() - 1;
        for j in 0..p {
            let u_j = layout.height_numerator(j).unwrap();
            let u_mirror = layout.height_numerator(p - 1 - j).unwrap();
            assert_eq!(u_j + u_mirror, 2 * d);
        }
        // equator parallel exactly at zero
        assert_eq!(layout.height_numerator(p / 2).unwrap(), d);
        assert_eq!(layout.z(p / 2), 0.0);
    }

    #[test]
    fn quasioptimal_first_height() {
        let layout = ParallelLayout::from_profile(&Profile::quasioptimal(1).unwrap()).unwrap();
        assert_eq!(layout.height_numerator(0).unwrap(), 7);
        assert_eq!(layout.n_points(), 241);
        assert!((layout.z(0) - 233.0 / 240.0).abs() < 1e-16);
    }

    #[test]
    fn simple_k1_m2_layout() {
        let layout = ParallelLayout::from_profile(&Profile::simple(1, 2).unwrap()).unwrap();
        assert_eq!(layout.counts(), &[1, 2, 1]);
        assert_eq!(layout.n_points(), 6);
        assert!((layout.z(0) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn numerators_strictly_increase_and_stay_in_range() {
        let layout = ParallelLayout::from_profile(&Profile::elaborated(3).unwrap()).unwrap();
        let d = layout.n_points() - 1;
        let mut prev = 0;
        for j in 0..layout.parallel_count() {
            let u = layout.height_numerator(j).unwrap();
            assert!(u > prev && u < 2 * d);
            prev = u;
        }
    }

    #[test]
    fn radius_matches_naive_form() {
        let layout = ParallelLayout::from_profile(&Profile::quasioptimal(3).unwrap()).unwrap();
        for j in 0..layout.parallel_count() {
            let z = layout.z(j);
            let naive = (1.0 - z * z).sqrt();
            assert!((layout.radius(j) - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn custom_heights_validation() {
        assert!(ParallelLayout::with_heights(&[1, 1], &[0.5, -0.5]).is_ok());
        assert!(matches!(
            ParallelLayout::with_heights(&[1, 1], &[-0.5, 0.5]),
            Err(LayoutError::InvalidHeight { index: 1, .. })
        ));
        assert!(matches!(
            ParallelLayout::with_heights(&[1, 1], &[1.0, 0.0]),
            Err(LayoutError::InvalidHeight { index: 0, .. })
        ));
        assert!(matches!(
            ParallelLayout::with_heights(&[1], &[0.1, 0.0]),
            Err(LayoutError::HeightsLengthMismatch { .. })
        ));
        assert!(matches!(
            ParallelLayout::from_counts(&[]),
            Err(LayoutError::EmptyCounts)
        ));
        assert!(matches!(
            ParallelLayout::from_counts(&[2, 0]),
            Err(LayoutError::NonPositiveCount { index: 1, .. })
        ));
    }

    #[test]
    fn single_parallel_sample() {
        let layout = ParallelLayout::from_counts(&[1]).unwrap();
        let ps = layout.sample(7);
        assert_eq!(ps.len(), 3);
        assert_eq!(ps.north_pole(), [0.0, 0.0, 1.0]);
        assert_eq!(ps.south_pole(), [0.0, 0.0, -1.0]);
        assert_eq!(ps.parallel_points(0).len(), 1);
        assert!(ps.parallel_points(0)[0][2].abs() < 1e-15);
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let layout = ParallelLayout::from_profile(&Profile::elaborated(1).unwrap()).unwrap();
        let a = layout.sample(123456789);
        let b = layout.sample(123456789);
        assert_eq!(a.phases(), b.phases());
        assert_eq!(a.points(), b.points());
        let c = layout.sample(123456790);
        assert_ne!(a.phases(), c.phases());
    }

    #[test]
    fn sample_norms_and_heights() {
        let layout = ParallelLayout::from_profile(&Profile::quasioptimal(2).unwrap()).unwrap();
        let ps = layout.sample(42);
        assert_eq!(ps.len(), 958);
        for pt in ps.points() {
            let norm = (pt[0] * pt[0] + pt[1] * pt[1] + pt[2] * pt[2]).sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        for j in 0..layout.parallel_count() {
            let z = layout.z(j);
            for pt in ps.parallel_points(j) {
                assert!((pt[2] - z).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn azimuthal_gaps_are_uniform() {
        let layout = ParallelLayout::from_profile(&Profile::simple(4, 3).unwrap()).unwrap();
        let ps = layout.sample(99);
        for j in 0..layout.parallel_count() {
            let pts = ps.parallel_points(j);
            let r = pts.len();
            let gap = TAU / r as f64;
            for i in 0..r {
                let a = pts[i][1].atan2(pts[i][0]);
                let b = pts[(i + 1) % r][1].atan2(pts[(i + 1) % r][0]);
                let mut diff = b - a;
                while diff < -1e-9 {
                    diff += TAU;
                }
                assert!(
                    (diff - gap).abs() < 1e-12,
                    "parallel {j}, gap {diff} vs {gap}"
                );
            }
        }
    }

    #[test]
    fn phases_stay_in_range() {
        let layout = ParallelLayout::from_profile(&Profile::elaborated(2).unwrap()).unwrap();
        for seed in 0..20 {
            for &theta in layout.sample(seed).phases() {
                assert!((0.0..TAU).contains(&theta));
            }
        }
    }

    #[test]
    fn rotation_preserves_pairwise_distances() {
        let layout = ParallelLayout::from_counts(&[3, 5, 3]).unwrap();
        let ps = layout.sample(5);
        // rotation by 0.3 rad around x, then 1.1 rad around z
        let (s1, c1) = (0.3f64.sin(), 0.3f64.cos());
        let (s2, c2) = (1.1f64.sin(), 1.1f64.cos());
        let rot = |p: [f64; 3]| {
            let v = [p[0], c1 * p[1] - s1 * p[2], s1 * p[1] + c1 * p[2]];
            [c2 * v[0] - s2 * v[1], s2 * v[0] + c2 * v[1], v[2]]
        };
        let rotated: Vec<[f64; 3]> = ps.points().iter().map(|&p| rot(p)).collect();
        let dist = |a: [f64; 3], b: [f64; 3]| {
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
        };
        for i in 0..ps.len() {
            for k in (i + 1)..ps.len() {
                let d0 = dist(ps.points()[i], ps.points()[k]);
                let d1 = dist(rotated[i], rotated[k]);
                assert!((d0 - d1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn height_curve_matches_layout_at_integers() {
        for profile in [
            Profile::simple(4, 9).unwrap(),
            Profile::elaborated(2).unwrap(),
            Profile::quasioptimal(2).unwrap(),
        ] {
            let layout = ParallelLayout::from_profile(&profile).unwrap();
            for piece in 0..profile.pieces().len() {
                let curve = HeightCurve::from_profile(&profile, piece).unwrap();
                let (lo, hi) = curve.domain();
                for j in lo.max(1)..=hi {
                    let u = layout.height_numerator((j - 1) as usize).unwrap();
                    assert_eq!(curve.numerator_at(j), u, "piece {piece}, j={j}");
                }
            }
        }
    }

    #[test]
    fn height_polynomial_named_values() {
        // First piece at x=0: numerator is 1, so z(0) = (N-2)/(N-1).
        let profile = Profile::quasioptimal(3).unwrap();
        let n = profile.total_points().unwrap();
        let z0 = height_polynomial(&profile, 0, 0.0).unwrap();
        let expect = (n as f64 - 2.0) / (n as f64 - 1.0);
        assert!((z0 - expect).abs() < 1e-15);

        // simple K=4: z(x) = 1 - (1 + 4x²)/(N-1); z(M) = 0
        let profile = Profile::simple(4, 10).unwrap();
        let n = profile.total_points().unwrap() as f64;
        for x in [0.0, 2.5, 7.0, 10.0] {
            let z = height_polynomial(&profile, 0, x).unwrap();
            let expect = 1.0 - (1.0 + 4.0 * x * x) / (n - 1.0);
            assert!((z - expect).abs() < 1e-14);
        }
        assert_eq!(height_polynomial(&profile, 0, 10.0).unwrap(), 0.0);
    }

    #[test]
    fn height_polynomial_agrees_at_knots() {
        // elaborated m=1 at the 2m knot: both pieces give 58/83
        let profile = Profile::elaborated(1).unwrap();
        let a = height_polynomial(&profile, 0, 2.0).unwrap();
        let b = height_polynomial(&profile, 1, 2.0).unwrap();
        assert!((a - 58.0 / 83.0).abs() < 1e-15);
        assert!((b - 58.0 / 83.0).abs() < 1e-15);
    }

    #[test]
    fn height_polynomial_domain_check() {
        let profile = Profile::elaborated(1).unwrap();
        assert!(matches!(
            height_polynomial(&profile, 0, 2.5),
            Err(LayoutError::OutOfPiece { .. })
        ));
        assert!(height_polynomial(&profile, 1, 2.5).is_ok());
    }

    #[test]
    fn csv_export_shape() {
        let layout = ParallelLayout::from_counts(&[2]).unwrap();
        let ps = layout.sample(1);
        let mut buf = Vec::new();
        ps.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,y,z");
        assert_eq!(lines.len(), 5);
        // 17 significant digits round-trip exactly
        let pole: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(pole, ps.points()[0]);
        let first: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first, ps.points()[1]);
    }
}
