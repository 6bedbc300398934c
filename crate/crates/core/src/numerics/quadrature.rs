use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances and subdivision budget of [`adaptive_integrate`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-9,
            abs_tol: 1e-300,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = QuadratureSpec {
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        QuadratureSpec { rel_tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::domain(format!("rel_tol must be > 0, got {}", self.rel_tol)));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(Error::domain(format!("abs_tol must be >= 0, got {}", self.abs_tol)));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::domain("max_subdivisions must be >= 1"));
        }
        Ok(())
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> Complex64>(f: &mut F, lo: f64, hi: f64) -> Result<Segment> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut fv = [Complex64::new(0.0, 0.0); 15];
    for (i, &x) in XGK.iter().enumerate() {
        if i == 7 {
            fv[7] = eval(f, center)?;
        } else {
            fv[i] = eval(f, center - half * x)?;
            fv[14 - i] = eval(f, center + half * x)?;
        }
    }
    let mut resk = fv[7] * WGK[7];
    let mut resg = fv[7] * WG[3];
    let mut resabs = fv[7].norm() * WGK[7];
    for i in 0..7 {
        let pair = fv[i] + fv[14 - i];
        resk += pair * WGK[i];
        resabs += (fv[i].norm() + fv[14 - i].norm()) * WGK[i];
        if i % 2 == 1 {
            resg += pair * WG[i / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fv[7] - mean).norm();
    for i in 0..7 {
        resasc += WGK[i] * ((fv[i] - mean).norm() + (fv[14 - i] - mean).norm());
    }
    let value = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut error = ((resk - resg) * half).norm();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Segment {
        lo,
        hi,
        value,
        error,
    })
}

fn eval<F: FnMut(f64) -> Complex64>(f: &mut F, x: f64) -> Result<Complex64> {
    let v = f(x);
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(x))
    }
}

/// Globally adaptive 7/15-point Gauss–Kronrod integration of `f` over
/// `[lo, hi]`.
///
/// The interval with the largest error estimate is bisected until the total
/// error satisfies `max(rel_tol·|value|, abs_tol)`. Endpoints are never
/// evaluated.
pub fn adaptive_integrate<F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: FnMut(f64) -> Complex64,
{
    adaptive_integrate_breaks(f, &[lo, hi], spec)
}

/// Like [`adaptive_integrate`], with the initial partition given by the
/// ascending list `breaks` (first and last entries are the limits).
pub fn adaptive_integrate_breaks<F>(
    mut f: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral>
where
    F: FnMut(f64) -> Complex64,
{
    spec.validate()?;
    if breaks.len() < 2 {
        return Err(Error::domain("integration needs at least two limits"));
    }
    for w in breaks.windows(2) {
        if !(w[0] < w[1]) || !w[0].is_finite() || !w[1].is_finite() {
            return Err(Error::domain(format!(
                "integration limits must be finite and increasing, got [{:e}, {:e}]",
                w[0], w[1]
            )));
        }
    }

    let mut heap = BinaryHeap::with_capacity(2 * breaks.len() + 16);
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for w in breaks.windows(2) {
        let seg = kronrod(&mut f, w[0], w[1])?;
        value += seg.value;
        error += seg.error;
        heap.push(seg);
    }
    // Segments too narrow to bisect in floating point; their error stays in
    // the total but they are not refined further.
    let mut frozen_error = 0.0;
    let mut frozen = 0usize;
    let mut splits = 0usize;
    let span = breaks[breaks.len() - 1] - breaks[0];

    loop {
        let target = (spec.rel_tol * value.norm()).max(spec.abs_tol);
        if error <= target {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi)
            || (worst.hi - worst.lo) < 1e3 * f64::EPSILON * worst.lo.abs().max(worst.hi.abs())
            || (worst.hi - worst.lo) < 8.0 * f64::EPSILON * span
        {
            frozen_error += worst.error;
            frozen += 1;
            continue;
        }
        if splits + breaks.len() >= spec.max_subdivisions {
            heap.push(worst);
            return Err(Error::Convergence {
                estimate: value,
                error,
                subdivisions: splits,
            });
        }
        let left = kronrod(&mut f, worst.lo, mid)?;
        let right = kronrod(&mut f, mid, worst.hi)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        splits += 1;

        // Re-sum occasionally to keep accumulated cancellation in check.
        if splits % 64 == 0 {
            value = heap.iter().fold(Complex64::new(0.0, 0.0), |s, g| s + g.value);
            error = heap.iter().map(|g| g.error).sum::<f64>() + frozen_error;
        }
    }
    Ok(Integral {
        value,
        error,
        intervals: heap.len() + frozen,
    })
}
