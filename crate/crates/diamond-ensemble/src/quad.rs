//! Adaptive Simpson quadrature for the piece integrals.
//!
//! Globally adaptive: the interval with the largest Richardson error
//! estimate is split until the summed estimate meets the tolerance. This
//! handles the `x log x`-type endpoint behavior of the piece integrands,
//! where per-interval tolerance halving would need unbounded depth.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Requested absolute tolerance could not be reached within the interval
/// budget.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureFailure {
    pub interval: (f64, f64),
    pub requested: f64,
    pub achieved: f64,
}

impl std::fmt::Display for QuadratureFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "quadrature on [{}, {}] reached error {:e}, requested {:e}",
            self.interval.0, self.interval.1, self.achieved, self.requested
        )
    }
}

impl std::error::Error for QuadratureFailure {}

const MAX_INTERVALS: usize = 200_000;

// f64 cannot deliver an absolute tolerance below ~100 ulps of the integral
// magnitude; the effective tolerance is floored there.
const REL_FLOOR: f64 = 1e-14;

struct Segment {
    err: f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    estimate: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

#[inline]
fn simpson(fa: f64, fm: f64, fb: f64, width: f64) -> f64 {
    width / 6.0 * (fa + 4.0 * fm + fb)
}

fn split<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> (Segment, Segment) {
    let m = 0.5 * (a + b);
    let make = |lo: f64, hi: f64, flo: f64, fhi: f64| {
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        let coarse = simpson(flo, 0.5 * (flo + fhi), fhi, hi - lo);
        let fine = simpson(flo, fmid, fhi, hi - lo);
        // Richardson estimate of the fine rule's error; the coarse midpoint
        // interpolation only seeds it, the split refines it further.
        let err = (fine - coarse).abs().max(f64::MIN_POSITIVE);
        Segment {
            err,
            a: lo,
            b: hi,
            fa: flo,
            fm: fmid,
            fb: fhi,
            estimate: fine,
        }
    };
    (make(a, m, fa, fm), make(m, b, fm, fb))
}

fn refine_segment<F: Fn(f64) -> f64>(f: &F, seg: &Segment) -> (Segment, Segment) {
    let m = 0.5 * (seg.a + seg.b);
    let lm = 0.5 * (seg.a + m);
    let rm = 0.5 * (m + seg.b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(seg.fa, flm, seg.fm, m - seg.a);
    let right = simpson(seg.fm, frm, seg.fb, seg.b - m);
    let delta = left + right - seg.estimate;
    let err = (delta / 15.0).abs();
    (
        Segment {
            err: err.max(f64::MIN_POSITIVE) * 0.5,
            a: seg.a,
            b: m,
            fa: seg.fa,
            fm: flm,
            fb: seg.fm,
            estimate: left,
        },
        Segment {
            err: err.max(f64::MIN_POSITIVE) * 0.5,
            a: m,
            b: seg.b,
            fa: seg.fm,
            fm: frm,
            fb: seg.fb,
            estimate: right,
        },
    )
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol` (subject to
/// the f64 roundoff floor on large-magnitude integrals).
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
) -> Result<f64, QuadratureFailure> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let mut heap = BinaryHeap::new();
    let (l, r) = split(&f, a, b, fa, fm, fb);
    heap.push(l);
    heap.push(r);

    loop {
        let mut total = 0.0;
        let mut err = 0.0;
        let mut abs_total = 0.0;
        for seg in heap.iter() {
            total += seg.estimate;
            err += seg.err;
            abs_total += seg.estimate.abs();
        }
        let tol = abs_tol.max(REL_FLOOR * abs_total);
        if err <= tol {
            return Ok(total);
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(QuadratureFailure {
                interval: (a, b),
                requested: abs_tol,
                achieved: err,
            });
        }
        // Split the worst segments in a batch so the totals above are not
        // recomputed per split.
        let batch = (heap.len() / 4).max(1);
        for _ in 0..batch {
            let Some(worst) = heap.pop() else { break };
            let (l, r) = refine_segment(&f, &worst);
            heap.push(l);
            heap.push(r);
        }
    }
}
