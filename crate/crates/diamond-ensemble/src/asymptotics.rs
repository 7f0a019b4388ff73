//! Trapezoidal rewrite of the expected energy, continuum estimates with
//! Euler–Maclaurin corrections, and asymptotic-constant extraction.
//!
//! For a profile, the symmetric expectation formula is a sum over integer
//! parallels of three families of functions per linear piece:
//!
//! ```text
//! f(x) = r(x) log r(x)
//! g(x) = r(x) (1 - z(x)) log(1 - z(x))
//! h(x) = r(x) (1 + z(x)) log(1 + z(x))
//! ```
//!
//! Summing each with half-weights at the piece endpoints reproduces the
//! expectation exactly; replacing the sums by integrals plus the
//! `(φ'(b) - φ'(a))/12` correction gives the continuum estimate whose
//! N-linear coefficient converges to the profile family's energy constant.

use serde::Serialize;
use thiserror::Error;

use crate::energy::{expected_energy_symmetric, EnergyError};
use crate::ensemble::{HeightCurve, LayoutError, ParallelLayout};
use crate::profile::{Profile, ProfileFamily, SpecError};
use crate::quad::{self, QuadratureFailure};
use crate::sum::NeumaierSum;

const LN_2: f64 = std::f64::consts::LN_2;
const PI: f64 = std::f64::consts::PI;

/// Absolute per-piece quadrature tolerance for the continuum estimate.
/// Subject to the f64 roundoff floor for large-magnitude pieces.
pub const PIECE_QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureFailure),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("scale list must be non-empty")]
    EmptyScaleList,
}

impl From<crate::profile::ProfileError> for AsymptoticsError {
    fn from(e: crate::profile::ProfileError) -> Self {
        AsymptoticsError::Layout(e.into())
    }
}

/// Composite trapezoidal sum at unit step:
/// `(f(a) + f(b))/2 + Σ_{j=a+1}^{b-1} f(j)`.
pub fn trapezoid_sum<F: Fn(f64) -> f64>(f: F, a: i64, b: i64) -> f64 {
    let mut acc = NeumaierSum::new();
    acc.add(0.5 * (f(a as f64) + f(b as f64)));
    for j in (a + 1)..b {
        acc.add(f(j as f64));
    }
    acc.value()
}

#[inline]
fn xlogx(v: f64) -> f64 {
    if v <= 0.0 {
        0.0
    } else {
        v * v.ln()
    }
}

/// The three per-piece integrands and their derivatives, evaluable on the
/// piece's knot interval.
#[derive(Clone, Copy, Debug)]
pub struct PieceFunctions {
    alpha: f64,
    beta: f64,
    curve: HeightCurve,
    domain: (i64, i64),
}

impl PieceFunctions {
    pub fn new(profile: &Profile, piece: usize) -> Result<Self, AsymptoticsError> {
        let p = profile.pieces()[piece];
        Ok(PieceFunctions {
            alpha: p.alpha as f64,
            beta: p.beta as f64,
            curve: HeightCurve::from_profile(profile, piece)?,
            domain: profile.piece_domain(piece),
        })
    }

    pub fn domain(&self) -> (i64, i64) {
        self.domain
    }

    #[inline]
    fn r(&self, x: f64) -> f64 {
        self.alpha + self.beta * x
    }

    /// `r(x) log r(x)`, extended by 0 where `r` vanishes.
    pub fn f(&self, x: f64) -> f64 {
        xlogx(self.r(x))
    }

    /// `r(x) (1 - z(x)) log(1 - z(x))`.
    pub fn g(&self, x: f64) -> f64 {
        self.r(x) * xlogx(self.curve.one_minus_z(x))
    }

    /// `r(x) (1 + z(x)) log(1 + z(x))`.
    pub fn h(&self, x: f64) -> f64 {
        self.r(x) * xlogx(self.curve.one_plus_z(x))
    }

    /// Analytic `g'`: with `s = 1 - z`, `g' = β s log s + r s'(log s + 1)`.
    pub fn g_prime(&self, x: f64) -> f64 {
        let s = self.curve.one_minus_z(x);
        let sp = self.curve.one_minus_z_prime(x);
        self.beta * xlogx(s) + self.r(x) * sp * (s.ln() + 1.0)
    }

    /// Analytic `h'`: with `q = 1 + z`, `q' = -s'`.
    pub fn h_prime(&self, x: f64) -> f64 {
        let q = self.curve.one_plus_z(x);
        let qp = -self.curve.one_minus_z_prime(x);
        self.beta * xlogx(q) + self.r(x) * qp * (q.ln() + 1.0)
    }

    /// Analytic `g'''`; `s` is quadratic so `s''' = 0` and
    /// `(s log s)''' = 3 s' s''/s - s'³/s²`.
    pub fn g_third(&self, x: f64) -> f64 {
        let s = self.curve.one_minus_z(x);
        let sp = self.curve.one_minus_z_prime(x);
        let spp = self.curve.one_minus_z_second();
        let phi2 = spp * (s.ln() + 1.0) + sp * sp / s;
        let phi3 = 3.0 * sp * spp / s - sp * sp * sp / (s * s);
        self.r(x) * phi3 + 3.0 * self.beta * phi2
    }

    /// Analytic `h'''` via `q = 1 + z`, `q' = -s'`, `q'' = -s''`.
    pub fn h_third(&self, x: f64) -> f64 {
        let q = self.curve.one_plus_z(x);
        let qp = -self.curve.one_minus_z_prime(x);
        let qpp = -self.curve.one_minus_z_second();
        let psi2 = qpp * (q.ln() + 1.0) + qp * qp / q;
        let psi3 = 3.0 * qp * qpp / q - qp * qp * qp / (q * q);
        self.r(x) * psi3 + 3.0 * self.beta * psi2
    }
}

/// Expected energy of a profile via the per-piece trapezoid form,
///
/// ```text
/// -(N-1) log 4 - 2 Σ_l T(f_l) - (N-1) Σ_l T(g_l) - (N-1) Σ_l T(h_l),
/// ```
///
/// an exact rearrangement of the symmetric formula: interior knots receive
/// half-weight from each adjacent piece (continuity makes the duplicated
/// values equal), and the `f(0) = g(0) = g(M) = h(0) = h(M) = 0` endpoints
/// account for the remaining `r(M) log r(M)` bookkeeping.
pub fn expected_energy_trapezoid(profile: &Profile) -> Result<f64, AsymptoticsError> {
    let n = profile.total_points()?;
    let d = (n - 1) as f64;
    let mut acc = NeumaierSum::new();
    acc.add(-d * 2.0 * LN_2);
    for piece in 0..profile.pieces().len() {
        let pf = PieceFunctions::new(profile, piece)?;
        let (a, b) = pf.domain();
        acc.add(-2.0 * trapezoid_sum(|x| pf.f(x), a, b));
        acc.add(-d * trapezoid_sum(|x| pf.g(x), a, b));
        acc.add(-d * trapezoid_sum(|x| pf.h(x), a, b));
    }
    Ok(acc.value())
}

/// Continuum estimate of the expected energy: piece integrals with the
/// Euler–Maclaurin endpoint corrections for `g` and `h`.
pub fn continuum_estimate(profile: &Profile) -> Result<f64, AsymptoticsError> {
    let n = profile.total_points()?;
    let d = (n - 1) as f64;
    let mut acc = NeumaierSum::new();
    acc.add(-d * 2.0 * LN_2);
    for piece in 0..profile.pieces().len() {
        let pf = PieceFunctions::new(profile, piece)?;
        let (a, b) = pf.domain();
        let (af, bf) = (a as f64, b as f64);
        let int_f = quad::integrate(|x| pf.f(x), af, bf, PIECE_QUAD_TOL)?;
        let int_g = quad::integrate(|x| pf.g(x), af, bf, PIECE_QUAD_TOL)?;
        let int_h = quad::integrate(|x| pf.h(x), af, bf, PIECE_QUAD_TOL)?;
        acc.add(-2.0 * int_f);
        acc.add(-d * (int_g + (pf.g_prime(bf) - pf.g_prime(af)) / 12.0));
        acc.add(-d * (int_h + (pf.h_prime(bf) - pf.h_prime(af)) / 12.0));
    }
    Ok(acc.value())
}

/// Which corrected integrand an Euler–Maclaurin check applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmIntegrand {
    G,
    H,
}

/// Result of one Euler–Maclaurin remainder check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EmErrorCheck {
    /// `|T(φ) - ∫φ - (φ'(b) - φ'(a))/12|`.
    pub observed: f64,
    /// `C̃ (b - a) / (24π)` with `C̃` an empirical max of `|φ'''|`.
    pub bound: f64,
}

/// Compares the trapezoid remainder of one `g`/`h` piece against the
/// third-derivative bound `C̃ (t_l - t_{l-1}) / (24π)`.
pub fn em_error_check(
    profile: &Profile,
    piece: usize,
    which: EmIntegrand,
) -> Result<EmErrorCheck, AsymptoticsError> {
    let pf = PieceFunctions::new(profile, piece)?;
    let (a, b) = pf.domain();
    let (af, bf) = (a as f64, b as f64);
    let (t, integral, correction, third): (f64, f64, f64, Box<dyn Fn(f64) -> f64>) = match which {
        EmIntegrand::G => (
            trapezoid_sum(|x| pf.g(x), a, b),
            quad::integrate(|x| pf.g(x), af, bf, PIECE_QUAD_TOL)?,
            (pf.g_prime(bf) - pf.g_prime(af)) / 12.0,
            Box::new(move |x| pf.g_third(x)),
        ),
        EmIntegrand::H => (
            trapezoid_sum(|x| pf.h(x), a, b),
            quad::integrate(|x| pf.h(x), af, bf, PIECE_QUAD_TOL)?,
            (pf.h_prime(bf) - pf.h_prime(af)) / 12.0,
            Box::new(move |x| pf.h_third(x)),
        ),
    };
    let samples = 1024;
    let mut c_max: f64 = 0.0;
    for k in 0..=samples {
        let x = af + (bf - af) * k as f64 / samples as f64;
        c_max = c_max.max(third(x).abs());
    }
    Ok(EmErrorCheck {
        observed: (t - integral - correction).abs(),
        bound: c_max * (bf - af) / (24.0 * PI),
    })
}

/// Order-N coefficient left after removing the leading terms of the energy
/// expansion: `(E - (½ - log 2) N² + ½ N log N) / N`.
pub fn extract_constant(energy: f64, n: i64) -> f64 {
    let nf = n as f64;
    (energy - (0.5 - LN_2) * nf * nf + 0.5 * nf * nf.ln()) / nf
}

/// One row of a convergence study.
///
/// Serializes as `{N, E_exact, c_N, target, abs_error}`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AsymptoticReport {
    #[serde(rename = "N")]
    pub n_points: i64,
    #[serde(rename = "E_exact")]
    pub energy: f64,
    #[serde(rename = "c_N")]
    pub constant: f64,
    pub target: Option<f64>,
    pub abs_error: Option<f64>,
}

/// Exact expectation and extracted constant for each scale in `m_list`,
/// against the family's limiting constant.
pub fn convergence_reports(
    family: ProfileFamily,
    m_list: &[i64],
) -> Result<Vec<AsymptoticReport>, AsymptoticsError> {
    if m_list.is_empty() {
        return Err(AsymptoticsError::EmptyScaleList);
    }
    let target = family_constant(family);
    m_list
        .iter()
        .map(|&m| {
            let profile = family.instantiate(m)?;
            let layout = ParallelLayout::from_profile(&profile)?;
            let energy = expected_energy_symmetric(&layout)?;
            let n = layout.n_points();
            let constant = extract_constant(energy, n);
            Ok(AsymptoticReport {
                n_points: n,
                energy,
                constant,
                target,
                abs_error: target.map(|t| (constant - t).abs()),
            })
        })
        .collect()
}

/// Whether the reports' distance to target strictly decreases.
pub fn is_strictly_improving(reports: &[AsymptoticReport]) -> bool {
    reports
        .windows(2)
        .all(|w| match (w[0].abs_error, w[1].abs_error) {
            (Some(a), Some(b)) => b < a,
            _ => false,
        })
}

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Limiting order-N constant of the elaborated three-piece family.
pub const C_ELABORATED: f64 = -0.048_033_870_622_806;

/// Limiting order-N constant of the quasioptimal six-piece family.
pub const C_QUASIOPTIMAL: f64 = -0.049_222_091_451_578_4;

/// Limiting order-N constant of the single-piece family with slope `k`:
/// `(log 2 / 6) K - ½ + log 2 - (log K)/2`.
pub fn c_simple(k: i64) -> f64 {
    LN_2 / 6.0 * k as f64 - 0.5 + LN_2 - 0.5 * (k as f64).ln()
}

/// Limiting constant of a built-in family.
pub fn family_constant(family: ProfileFamily) -> Option<f64> {
    match family {
        ProfileFamily::Simple { k } => Some(c_simple(k)),
        ProfileFamily::Elaborated => Some(C_ELABORATED),
        ProfileFamily::Quasioptimal => Some(C_QUASIOPTIMAL),
    }
}

/// Order-N constant of the continuous reference curve with density scale
/// `K0`: `K0 π/6 - ½ log K0 - ½ log π`. Strictly convex with minimizer
/// `K0 = 3/π` and minimum `(1 - log 3)/2`.
pub fn heuristic_constant(k0: f64) -> f64 {
    k0 * PI / 6.0 - 0.5 * k0.ln() - 0.5 * PI.ln()
}

/// Named reference constants of the energy expansion.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReferenceConstants {
    /// Continuous energy `W_log(S²) = ½ - log 2`, the N² coefficient.
    pub w_log: f64,
    /// Known bounds for the order-N constant of the true minimum.
    pub c_log_lower: f64,
    pub c_log_upper: f64,
    /// Order-N constant of the random-matrix eigenvalue family:
    /// `log 2 - γ/2`.
    pub c1: f64,
    /// Order-N constant of the random-polynomial zero family: `-W_log`.
    pub c2: f64,
    /// Limiting constant of the simple family at K = 4: `2 log 2/3 - ½`.
    pub c_simple_k4: f64,
    /// Limiting constant of the elaborated family.
    pub c_elaborated: f64,
    /// Limiting constant of the quasioptimal family.
    pub c_quasioptimal: f64,
    /// Best constant of the continuous reference curve: `(1 - log 3)/2`
    /// at `K0 = 3/π`.
    pub heuristic_optimum: f64,
    pub heuristic_minimizer: f64,
}

pub fn reference_constants() -> ReferenceConstants {
    ReferenceConstants {
        w_log: 0.5 - LN_2,
        c_log_lower: -0.223_282_352_6,
        c_log_upper: -0.055_605_3,
        c1: LN_2 - EULER_GAMMA / 2.0,
        c2: LN_2 - 0.5,
        c_simple_k4: c_simple(4),
        c_elaborated: C_ELABORATED,
        c_quasioptimal: C_QUASIOPTIMAL,
        heuristic_optimum: 0.5 * (1.0 - 3.0f64.ln()),
        heuristic_minimizer: 3.0 / PI,
    }
}
