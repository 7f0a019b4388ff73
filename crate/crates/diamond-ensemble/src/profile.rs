//! Piecewise-linear per-parallel population functions.
//!
//! A [`Profile`] describes how many points each parallel carries: a
//! continuous, integer-coefficient, piecewise-linear function `r` on `[0, M]`
//! with `r(0) = 0`, mirrored onto `[M, 2M]` by `r(x) = r(2M - x)`. Parallel
//! `j` (for `1 <= j <= 2M-1`) carries `r(j)` points. Only the left half is
//! stored; the mirror half is evaluated on demand so the symmetry cannot be
//! broken by construction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One linear piece `r(x) = alpha + beta * x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct Piece {
    pub alpha: i64,
    pub beta: i64,
}

impl From<[i64; 2]> for Piece {
    fn from(v: [i64; 2]) -> Self {
        Piece {
            alpha: v[0],
            beta: v[1],
        }
    }
}

impl From<Piece> for [i64; 2] {
    fn from(p: Piece) -> Self {
        [p.alpha, p.beta]
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProfileError {
    #[error("knot sequence must be integers 0 = t_0 < t_1 < … < t_n = M with one piece per interval: {0}")]
    InvalidKnots(String),
    #[error("piece {piece} has a negative coefficient (alpha={alpha}, beta={beta})")]
    NegativeCoefficient { piece: usize, alpha: i64, beta: i64 },
    #[error("first piece must be r(x) = beta*x with beta > 0, got alpha={alpha}, beta={beta}")]
    NonPositiveFirstSlope { alpha: i64, beta: i64 },
    #[error("pieces disagree at knot t={knot}: {left} vs {right}")]
    DiscontinuousAtKnot { knot: i64, left: i64, right: i64 },
    #[error("parallel j={j} would carry {count} points; every parallel needs at least one")]
    EmptyParallel { j: i64, count: i64 },
    #[error("parallel index j={j} outside [1, {max}]")]
    OutOfRange { j: i64, max: i64 },
    #[error("point count exceeds the 64-bit integer range")]
    Overflow,
}

/// Symmetric piecewise-linear population function on `[0, 2M]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(into = "ProfileRepr")]
pub struct Profile {
    equator_index: i64,
    knots: Vec<i64>,
    pieces: Vec<Piece>,
}

/// Serialized form: `{"M": …, "knots": […], "pieces": [[alpha, beta], …]}`.
#[derive(Serialize, Deserialize)]
struct ProfileRepr {
    #[serde(rename = "M")]
    m: i64,
    knots: Vec<i64>,
    pieces: Vec<Piece>,
}

impl From<Profile> for ProfileRepr {
    fn from(p: Profile) -> Self {
        ProfileRepr {
            m: p.equator_index,
            knots: p.knots,
            pieces: p.pieces,
        }
    }
}

impl TryFrom<ProfileRepr> for Profile {
    type Error = ProfileError;

    fn try_from(r: ProfileRepr) -> Result<Self, ProfileError> {
        Profile::new(r.m, r.knots, r.pieces)
    }
}

impl<'de> Deserialize<'de> for Profile {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ProfileRepr::deserialize(deserializer)?;
        Profile::try_from(repr).map_err(serde::de::Error::custom)
    }
}

impl Profile {
    /// Validates and builds a profile from its half-domain description.
    ///
    /// `m` is the equator index M (the profile covers parallels `1..=2M-1`,
    /// with parallel M on the equator), `knots` the breakpoints
    /// `0 = t_0 < … < t_n = M`, and `pieces[l]` the line on
    /// `[t_l, t_{l+1}]`.
    pub fn new(m: i64, knots: Vec<i64>, pieces: Vec<Piece>) -> Result<Self, ProfileError> {
        let profile = Profile {
            equator_index: m,
            knots,
            pieces,
        };
        profile.validate()?;
        Ok(profile)
    }

    /// Checks every structural invariant, reporting the first violation.
    pub fn validate(&self) -> Result<(), ProfileError> {
        let m = self.equator_index;
        if m < 1 {
            return Err(ProfileError::InvalidKnots(format!("M must be >= 1, got {m}")));
        }
        if self.knots.len() < 2 {
            return Err(ProfileError::InvalidKnots(
                "need at least knots [0, M]".into(),
            ));
        }
        if self.knots[0] != 0 {
            return Err(ProfileError::InvalidKnots(format!(
                "t_0 must be 0, got {}",
                self.knots[0]
            )));
        }
        if *self.knots.last().unwrap() != m {
            return Err(ProfileError::InvalidKnots(format!(
                "t_n must equal M = {m}, got {}",
                self.knots.last().unwrap()
            )));
        }
        if self.knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ProfileError::InvalidKnots(
                "knots must be strictly increasing".into(),
            ));
        }
        if self.pieces.len() != self.knots.len() - 1 {
            return Err(ProfileError::InvalidKnots(format!(
                "{} knots require {} pieces, got {}",
                self.knots.len(),
                self.knots.len() - 1,
                self.pieces.len()
            )));
        }
        for (l, piece) in self.pieces.iter().enumerate() {
            if piece.alpha < 0 || piece.beta < 0 {
                return Err(ProfileError::NegativeCoefficient {
                    piece: l,
                    alpha: piece.alpha,
                    beta: piece.beta,
                });
            }
        }
        let first = self.pieces[0];
        if first.alpha != 0 || first.beta <= 0 {
            return Err(ProfileError::NonPositiveFirstSlope {
                alpha: first.alpha,
                beta: first.beta,
            });
        }
        for (l, w) in self.pieces.windows(2).enumerate() {
            let knot = self.knots[l + 1];
            let left = w[0]
                .alpha
                .checked_add(w[0].beta.checked_mul(knot).ok_or(ProfileError::Overflow)?)
                .ok_or(ProfileError::Overflow)?;
            let right = w[1]
                .alpha
                .checked_add(w[1].beta.checked_mul(knot).ok_or(ProfileError::Overflow)?)
                .ok_or(ProfileError::Overflow)?;
            if left != right {
                return Err(ProfileError::DiscontinuousAtKnot { knot, left, right });
            }
        }
        // r is piecewise linear, so positivity at the piece endpoints covers
        // every integer in between. j = 0 is excluded (r(0) = 0 by design).
        for (l, piece) in self.pieces.iter().enumerate() {
            let endpoints = [self.knots[l].max(1), self.knots[l + 1]];
            for j in endpoints {
                let count = piece
                    .alpha
                    .checked_add(piece.beta.checked_mul(j).ok_or(ProfileError::Overflow)?)
                    .ok_or(ProfileError::Overflow)?;
                if count < 1 {
                    return Err(ProfileError::EmptyParallel { j, count });
                }
            }
        }
        Ok(())
    }

    /// Single-piece profile `r(x) = K x` on `[0, M]`; `N = 2 + K M²`.
    pub fn simple(k: i64, m: i64) -> Result<Self, ProfileError> {
        if k < 1 {
            return Err(ProfileError::NonPositiveFirstSlope { alpha: 0, beta: k });
        }
        Profile::new(m, vec![0, m], vec![Piece { alpha: 0, beta: k }])
    }

    /// Three-piece profile with `M = 4m`; `N = 82 m² + 2`.
    pub fn elaborated(m: i64) -> Result<Self, ProfileError> {
        if m < 1 {
            return Err(ProfileError::InvalidKnots(format!(
                "scale parameter must be >= 1, got {m}"
            )));
        }
        Profile::new(
            4 * m,
            vec![0, 2 * m, 3 * m, 4 * m],
            vec![
                Piece { alpha: 0, beta: 6 },
                Piece {
                    alpha: 6 * m,
                    beta: 3,
                },
                Piece {
                    alpha: 12 * m,
                    beta: 1,
                },
            ],
        )
    }

    /// Six-piece profile with `M = 7m`; `N = 239 m² + 2`. Among the built-in
    /// parameterizations this one attains the lowest asymptotic energy
    /// constant.
    pub fn quasioptimal(m: i64) -> Result<Self, ProfileError> {
        if m < 1 {
            return Err(ProfileError::InvalidKnots(format!(
                "scale parameter must be >= 1, got {m}"
            )));
        }
        Profile::new(
            7 * m,
            vec![0, 2 * m, 3 * m, 4 * m, 5 * m, 6 * m, 7 * m],
            vec![
                Piece { alpha: 0, beta: 6 },
                Piece {
                    alpha: 2 * m,
                    beta: 5,
                },
                Piece {
                    alpha: 5 * m,
                    beta: 4,
                },
                Piece {
                    alpha: 9 * m,
                    beta: 3,
                },
                Piece {
                    alpha: 14 * m,
                    beta: 2,
                },
                Piece {
                    alpha: 20 * m,
                    beta: 1,
                },
            ],
        )
    }

    /// Equator index M; parallel M sits at height zero.
    pub fn equator_index(&self) -> i64 {
        self.equator_index
    }

    /// Number of parallels `p = 2M - 1`.
    pub fn parallel_count(&self) -> i64 {
        2 * self.equator_index - 1
    }

    pub fn knots(&self) -> &[i64] {
        &self.knots
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Domain `[t_{l}, t_{l+1}]` of piece `l` (0-based).
    pub fn piece_domain(&self, l: usize) -> (i64, i64) {
        (self.knots[l], self.knots[l + 1])
    }

    /// Points on parallel `j` for `1 <= j <= 2M-1`, using the mirror rule
    /// for `j > M`.
    pub fn eval_r(&self, j: i64) -> Result<i64, ProfileError> {
        let max = 2 * self.equator_index - 1;
        if j < 1 || j > max {
            return Err(ProfileError::OutOfRange { j, max });
        }
        let x = if j <= self.equator_index {
            j
        } else {
            2 * self.equator_index - j
        };
        // Interior knots belong to both adjacent pieces; continuity makes
        // the choice irrelevant. This picks the earlier piece.
        let l = self.knots[1..self.knots.len() - 1]
            .iter()
            .filter(|&&t| t < x)
            .count();
        let piece = self.pieces[l];
        piece
            .alpha
            .checked_add(piece.beta.checked_mul(x).ok_or(ProfileError::Overflow)?)
            .ok_or(ProfileError::Overflow)
    }

    /// Total number of points `N = 2 + Σ_{j=1}^{2M-1} r(j)`, exactly.
    pub fn total_points(&self) -> Result<i64, ProfileError> {
        let half = self.cumulative_points_through(self.equator_index)? as i128;
        let r_m = self.eval_r(self.equator_index)? as i128;
        let n = 2 + 2 * half - r_m;
        i64::try_from(n).map_err(|_| ProfileError::Overflow)
    }

    /// Partial sum `Σ_{j=1}^{q} r(j)` for `0 <= q <= M`, exactly.
    pub fn cumulative_points_through(&self, q: i64) -> Result<i64, ProfileError> {
        if q < 0 || q > self.equator_index {
            return Err(ProfileError::OutOfRange {
                j: q,
                max: self.equator_index,
            });
        }
        let mut total: i128 = 0;
        for (l, piece) in self.pieces.iter().enumerate() {
            let a = self.knots[l] as i128; // sum over (a, b]
            let b = (self.knots[l + 1].min(q)) as i128;
            if b <= a {
                break;
            }
            let count = b - a;
            let j_sum = (b * (b + 1) - a * (a + 1)) / 2;
            total += piece.alpha as i128 * count + piece.beta as i128 * j_sum;
        }
        i64::try_from(total).map_err(|_| ProfileError::Overflow)
    }

    /// All parallel counts `r_1 .. r_{2M-1}`.
    pub fn parallel_counts(&self) -> Result<Vec<i64>, ProfileError> {
        (1..=self.parallel_count())
            .map(|j| self.eval_r(j))
            .collect()
    }

    /// Tightest constants under which the slope/offset growth assumptions
    /// hold for this profile: the smallest `A >= 2` with `alpha_l <= A*M` and
    /// `beta_l <= A`, and the largest `c` with `t_1 >= c*M`. Advisory only —
    /// generation never depends on them.
    pub fn asymptotic_lint(&self) -> ProfileLint {
        let m = self.equator_index as f64;
        let mut min_a: f64 = 2.0;
        for p in &self.pieces {
            min_a = min_a.max(p.alpha as f64 / m).max(p.beta as f64);
        }
        ProfileLint {
            min_a,
            max_c: self.knots[1] as f64 / m,
        }
    }
}

/// Output of [`Profile::asymptotic_lint`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileLint {
    /// Smallest admissible growth constant `A`.
    pub min_a: f64,
    /// Largest admissible first-knot fraction `c = t_1 / M`.
    pub max_c: f64,
}

/// Real-valued reference curve the integer profiles approximate:
/// `K0·π·sin(jπ/(p+1)) / sin(π/(2(p+1)))`.
pub fn heuristic_r(k0: f64, p: i64, j: i64) -> f64 {
    let denom = (p + 1) as f64;
    k0 * std::f64::consts::PI * (j as f64 * std::f64::consts::PI / denom).sin()
        / (std::f64::consts::PI / (2.0 * denom)).sin()
}

/// Parsed form of a profile spec string such as `"simple:K=4,M=20"`,
/// `"elaborated:m=4"`, or `"quasioptimal:m=2"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileSpec {
    Simple { k: i64, m: i64 },
    Elaborated { m: i64 },
    Quasioptimal { m: i64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("bad profile spec `{spec}`: {reason}")]
pub struct SpecError {
    pub spec: String,
    pub reason: String,
}

fn parse_params<'a>(
    spec: &str,
    body: &'a str,
    expected: &[&str],
) -> Result<Vec<(&'a str, i64)>, SpecError> {
    let mut out = Vec::new();
    for item in body.split(',') {
        let (key, value) = item.split_once('=').ok_or_else(|| SpecError {
            spec: spec.into(),
            reason: format!("expected key=value, got `{item}`"),
        })?;
        if !expected.contains(&key) {
            return Err(SpecError {
                spec: spec.into(),
                reason: format!("unknown parameter `{key}` (expected {expected:?})"),
            });
        }
        let value: i64 = value.parse().map_err(|_| SpecError {
            spec: spec.into(),
            reason: format!("parameter `{key}` must be an integer, got `{value}`"),
        })?;
        if out.iter().any(|(k, _)| *k == key) {
            return Err(SpecError {
                spec: spec.into(),
                reason: format!("duplicate parameter `{key}`"),
            });
        }
        out.push((key, value));
    }
    if out.len() != expected.len() {
        return Err(SpecError {
            spec: spec.into(),
            reason: format!("expected parameters {expected:?}"),
        });
    }
    Ok(out)
}

impl std::str::FromStr for ProfileSpec {
    type Err = SpecError;

    /// Grammar: `name:key=value[,key=value]`.
    fn from_str(s: &str) -> Result<Self, SpecError> {
        let (name, body) = s.split_once(':').ok_or_else(|| SpecError {
            spec: s.into(),
            reason: "expected `name:key=value[,key=value]`".into(),
        })?;
        match name {
            "simple" => {
                let params = parse_params(s, body, &["K", "M"])?;
                let k = params.iter().find(|(k, _)| *k == "K").unwrap().1;
                let m = params.iter().find(|(k, _)| *k == "M").unwrap().1;
                Ok(ProfileSpec::Simple { k, m })
            }
            "elaborated" => {
                let params = parse_params(s, body, &["m"])?;
                Ok(ProfileSpec::Elaborated { m: params[0].1 })
            }
            "quasioptimal" => {
                let params = parse_params(s, body, &["m"])?;
                Ok(ProfileSpec::Quasioptimal { m: params[0].1 })
            }
            other => Err(SpecError {
                spec: s.into(),
                reason: format!(
                    "unknown profile `{other}` (known: simple, elaborated, quasioptimal)"
                ),
            }),
        }
    }
}

impl std::fmt::Display for ProfileSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProfileSpec::Simple { k, m } => write!(f, "simple:K={k},M={m}"),
            ProfileSpec::Elaborated { m } => write!(f, "elaborated:m={m}"),
            ProfileSpec::Quasioptimal { m } => write!(f, "quasioptimal:m={m}"),
        }
    }
}

impl ProfileSpec {
    pub fn build(self) -> Result<Profile, SpecError> {
        let built = match self {
            ProfileSpec::Simple { k, m } => Profile::simple(k, m),
            ProfileSpec::Elaborated { m } => Profile::elaborated(m),
            ProfileSpec::Quasioptimal { m } => Profile::quasioptimal(m),
        };
        built.map_err(|e| SpecError {
            spec: self.to_string(),
            reason: e.to_string(),
        })
    }
}

/// A scale-indexed family of profiles, for convergence studies where one
/// member is instantiated per scale value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileFamily {
    /// `m` plays the role of M.
    Simple { k: i64 },
    Elaborated,
    Quasioptimal,
}

impl ProfileFamily {
    pub fn instantiate(self, m: i64) -> Result<Profile, SpecError> {
        match self {
            ProfileFamily::Simple { k } => ProfileSpec::Simple { k, m }.build(),
            ProfileFamily::Elaborated => ProfileSpec::Elaborated { m }.build(),
            ProfileFamily::Quasioptimal => ProfileSpec::Quasioptimal { m }.build(),
        }
    }
}

impl std::str::FromStr for ProfileFamily {
    type Err = SpecError;

    /// Accepts `simple:K=<k>`, `elaborated`, or `quasioptimal`.
    fn from_str(s: &str) -> Result<Self, SpecError> {
        match s {
            "elaborated" => Ok(ProfileFamily::Elaborated),
            "quasioptimal" => Ok(ProfileFamily::Quasioptimal),
            _ => {
                if let Some(body) = s.strip_prefix("simple:") {
                    let params = parse_params(s, body, &["K"])?;
                    return Ok(ProfileFamily::Simple { k: params[0].1 });
                }
                Err(SpecError {
                    spec: s.into(),
                    reason: "expected `simple:K=<k>`, `elaborated`, or `quasioptimal`".into(),
                })
            }
        }
    }
}

impl std::fmt::Display for ProfileFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProfileFamily::Simple { k } => write!(f, "simple:K={k}"),
            ProfileFamily::Elaborated => write!(f, "elaborated"),
            ProfileFamily::Quasioptimal => write!(f, "quasioptimal"),
        }
    }
}
