//! Trace of the scattering Green tensor at coincident points.
//!
//! The cavity has identical walls at z = ±a/2. Integrals over the transverse
//! wave number k⊥ are carried out in the normal wave number β = √(ω²/c² − k⊥²)
//! (propagating waves, 0 < β ≤ ω/c) and κ = −iβ (evanescent waves and all
//! imaginary frequencies), which removes the 1/β endpoint factor.
//!
//! For any wall containing matter |r_σ| → 1 at grazing incidence, and the
//! constant-dropped cavity kernel then has a simple pole at β = 0 whose
//! residue h does not depend on z. Real-frequency traces are evaluated with
//! the causal prescription ω → ω + i0: h/β is subtracted on both arms up to a
//! common radius and the quarter-circle contribution −iπh/2 is added to the
//! evanescent part. This only moves position-independent constants between
//! the two parts.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::C;
use crate::error::{Error, Result};
use crate::materials::{MirrorSpec, Polarization, Reflection, Reflector};
use crate::numerics::{adaptive_integrate_breaks, expm1_complex, golden_section, sqrt_upper, Goal, QuadratureSpec};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Decay lengths covered by the exponential cutoff of evanescent integrals.
const CUTOFF: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityGeometry {
    pub width: f64,
    pub mirror: MirrorSpec,
}

impl CavityGeometry {
    pub fn new(width: f64, mirror: MirrorSpec) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::domain(format!("cavity width must be > 0, got {width}")));
        }
        mirror.validate()?;
        Ok(CavityGeometry { width, mirror })
    }

    fn check_interior(&self, z: f64) -> Result<()> {
        if z.is_finite() && z.abs() < 0.5 * self.width {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "position z = {z:e} m outside the cavity interior |z| < {:e} m",
                0.5 * self.width
            )))
        }
    }

    fn evanescent_cutoff(&self, z: f64) -> f64 {
        CUTOFF / (self.width - 2.0 * z.abs())
    }
}

/// A single plate filling z < `surface`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateGeometry {
    pub mirror: MirrorSpec,
    pub surface: f64,
}

impl PlateGeometry {
    pub fn new(mirror: MirrorSpec, surface: f64) -> Result<Self> {
        mirror.validate()?;
        if !surface.is_finite() {
            return Err(Error::domain("plate surface position must be finite"));
        }
        Ok(PlateGeometry { mirror, surface })
    }

    fn distance(&self, z: f64) -> Result<f64> {
        let d = z - self.surface;
        if d > 0.0 && d.is_finite() {
            Ok(d)
        } else {
            Err(Error::domain(format!(
                "position z = {z:e} m is not above the plate surface at {:e} m",
                self.surface
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Geometry {
    Cavity(CavityGeometry),
    Plate(PlateGeometry),
}

impl From<CavityGeometry> for Geometry {
    fn from(c: CavityGeometry) -> Self {
        Geometry::Cavity(c)
    }
}

impl From<PlateGeometry> for Geometry {
    fn from(p: PlateGeometry) -> Self {
        Geometry::Plate(p)
    }
}

impl Geometry {
    pub fn mirror(&self) -> &MirrorSpec {
        match self {
            Geometry::Cavity(c) => &c.mirror,
            Geometry::Plate(p) => &p.mirror,
        }
    }

    pub fn check_position(&self, z: f64) -> Result<()> {
        match self {
            Geometry::Cavity(c) => c.check_interior(z),
            Geometry::Plate(p) => p.distance(z).map(|_| ()),
        }
    }

    /// Re Tr G(z, z, iξ) for ξ > 0.
    pub fn trace_imagfreq(&self, z: f64, xi: f64, spec: &QuadratureSpec) -> Result<f64> {
        match self {
            Geometry::Cavity(c) => cavity_trace_imagfreq(z, xi, c, spec),
            Geometry::Plate(p) => single_plate_trace_imagfreq(p.distance(z)?, xi, &p.mirror, spec),
        }
    }

    /// lim_{ω→0} ω² Re Tr G(z, z, ω).
    pub fn zero_frequency_limit(&self, z: f64, spec: &QuadratureSpec) -> Result<f64> {
        match self {
            Geometry::Cavity(c) => zero_frequency_trace_limit(z, c, spec),
            Geometry::Plate(p) => single_plate_zero_frequency_limit(p.distance(z)?, &p.mirror, spec),
        }
    }

    /// Real-frequency trace with position-independent terms dropped.
    pub fn trace_realfreq(&self, z: f64, omega: f64, spec: &QuadratureSpec) -> Result<GreenTraceParts> {
        match self {
            Geometry::Cavity(c) => cavity_trace_realfreq(z, omega, c, spec),
            Geometry::Plate(p) => single_plate_trace(p.distance(z)?, omega, &p.mirror, spec),
        }
    }

    /// Real-frequency trace including every multiple-reflection term.
    pub fn trace_realfreq_full(&self, z: f64, omega: f64, spec: &QuadratureSpec) -> Result<GreenTraceParts> {
        match self {
            Geometry::Cavity(c) => cavity_trace_realfreq_full(z, omega, c, spec),
            Geometry::Plate(p) => single_plate_trace(p.distance(z)?, omega, &p.mirror, spec),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GreenTraceParts {
    pub propagating: Complex64,
    pub evanescent: Complex64,
}

impl GreenTraceParts {
    pub fn total(&self) -> Complex64 {
        self.propagating + self.evanescent
    }
}

/// β = √(ω²/c² − k⊥²) with Im β ≥ 0.
pub fn transverse_beta(omega: Complex64, k_perp: f64) -> Complex64 {
    sqrt_upper(omega * omega / (C * C) - k_perp * k_perp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TraceForm {
    /// Position-independent terms dropped.
    ConstantDropped,
    /// Including the z-independent double-reflection term Σ r_σ² e^{2iβa}/D_σ.
    Full,
}

struct CavityKernel<'a> {
    refl: &'a Reflector,
    a: f64,
    z: f64,
    k0sq: Complex64,
    form: TraceForm,
}

impl CavityKernel<'_> {
    /// Cavity trace integrand without the k⊥/(2πiβ) measure.
    fn eval(&self, beta: Complex64) -> Complex64 {
        let pair = self.refl.reflect(beta);
        let (a, z) = (self.a, self.z);
        let ia = I * beta * a;
        let e1 = ia.exp();
        let e2 = e1 * e1;
        let em1_2 = expm1_complex(2.0 * ia);
        // e^{iβa} cos(2βz), written so that it stays bounded for β = iκ.
        let ec = 0.5 * ((I * beta * (a + 2.0 * z)).exp() + (I * beta * (a - 2.0 * z)).exp());
        let d = |r: &Reflection| r.one_minus_r2() * e2 - em1_2;
        let (ds, dp) = (d(&pair.s), d(&pair.p));
        let tangential = 2.0 * beta * beta / self.k0sq;
        match self.form {
            TraceForm::ConstantDropped => (tangential * pair.p.r / dp - pair.s.r / ds - pair.p.r / dp) * ec,
            TraceForm::Full => {
                let small = beta.norm() * a.max(2.0 * z.abs()) < 0.5;
                let num = |r: &Reflection| {
                    if small && r.one_plus_r.norm() < 0.5 {
                        // r e^{iβa}cos + r² e^{2iβa} with r = u − 1, free of cancellation.
                        let s = (beta * z).sin();
                        let e1_minus_cos = expm1_complex(ia) + 2.0 * s * s;
                        let u = r.one_plus_r;
                        e1 * e1_minus_cos + u * (ec - r.one_minus_r * e2)
                    } else {
                        r.r * ec + r.r * r.r * e2
                    }
                };
                tangential * pair.p.r * ec / dp - num(&pair.s) / ds - num(&pair.p) / dp
            }
        }
    }
}

fn sorted_breaks(lo: f64, hi: f64, mut pts: Vec<f64>) -> Vec<f64> {
    pts.retain(|&x| x > lo && x < hi && x.is_finite());
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(|x, y| x.total_cmp(y));
    let tol = 1e-12 * hi.abs().max(lo.abs());
    pts.dedup_by(|x, y| (*x - *y).abs() <= tol);
    if let Some(last) = pts.last_mut() {
        *last = hi;
    }
    pts[0] = lo;
    pts
}

fn graded(from: f64, scale: f64, levels: i32, sign: f64) -> impl Iterator<Item = f64> {
    (0..=levels).map(move |j| from + sign * scale * 10f64.powi(-j))
}

fn propagating_breaks(b: f64, a: f64, extra_scale: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = graded(0.0, b, 12, 1.0).collect();
    let mut m = 1.0;
    while m * PI / a <= b * (1.0 + 1e-12) {
        let bm = (m * PI / a).min(b);
        pts.extend(graded(bm, 1.0 / a, 10, -1.0));
        pts.extend(graded(bm, 1.0 / a, 10, 1.0));
        if extra_scale > 0.0 {
            pts.push(bm - extra_scale / a);
        }
        m += 1.0;
    }
    sorted_breaks(0.0, b, pts)
}

fn evanescent_breaks(b: f64, a: f64, kmax: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = graded(0.0, b, 12, 1.0).collect();
    pts.push(1.0 / a);
    pts.push(4.0 / a);
    sorted_breaks(0.0, kmax, pts)
}

/// Width parameter √(1−r) used to place a panel edge next to sharp cavity
/// resonances of highly reflecting walls.
fn resonance_panel(mirror: &MirrorSpec) -> f64 {
    match mirror {
        MirrorSpec::ConstantR(r) if 1.0 - r < 1e-3 => (1.0 - r).sqrt(),
        _ => 0.0,
    }
}

/// Positions of the cavity resonances (minima of |D_σ|) on the propagating
/// arm. For walls whose reflection phase varies with angle they drift away
/// from β = mπ/a.
fn resonance_locations(refl: &Reflector, mirror: &MirrorSpec, a: f64, b: f64) -> Vec<f64> {
    if matches!(mirror, MirrorSpec::ConstantR(_)) {
        return Vec::new();
    }
    let e2 = |beta: f64| Complex64::new(0.0, 2.0 * beta * a);
    let mut out = Vec::new();
    let mut m = 1.0;
    while (m - 0.5) * PI / a < b {
        let lo = (m - 0.5) * PI / a;
        let hi = ((m + 0.5) * PI / a).min(b);
        for pol in [Polarization::S, Polarization::P] {
            let mag = |beta: f64| -> Result<f64> {
                let pair = refl.reflect(Complex64::new(beta, 0.0));
                let r = match pol {
                    Polarization::S => pair.s,
                    Polarization::P => pair.p,
                };
                let x = e2(beta);
                Ok((r.one_minus_r2() * x.exp() - expm1_complex(x)).norm())
            };
            if let Ok(e) = golden_section(mag, lo, hi, 1e-13 / a, Goal::Minimize) {
                out.push(e.x);
            }
        }
        m += 1.0;
    }
    out
}

/// Locations of sharp peaks of `mag` (one value per polarization) on
/// (0, hi], found on a uniform scan and refined by golden section.
fn peak_locations<F>(mag: F, hi: f64) -> Vec<f64>
where
    F: Fn(f64) -> [f64; 2],
{
    const SCAN: usize = 4000;
    let xs: Vec<f64> = (1..=SCAN + 1).map(|i| hi * i as f64 / SCAN as f64).collect();
    let vs: Vec<[f64; 2]> = xs.iter().map(|&x| mag(x)).collect();
    let mut out = Vec::new();
    for pol in 0..2 {
        for i in 1..SCAN {
            let (l, c, r) = (vs[i - 1][pol], vs[i][pol], vs[i + 1][pol]);
            if c > l && c >= r {
                let f = |x: f64| Ok(mag(x)[pol]);
                if let Ok(e) = golden_section(f, xs[i - 1], xs[i + 1], 1e-14 * hi, Goal::Maximize) {
                    out.push(e.x);
                }
            }
        }
    }
    out
}

/// Breakpoints on the evanescent arm around the branch points of the mirror
/// and, for layered mirrors, around guided-mode peaks; `mag` is evaluated at
/// β = iκ.
fn mirror_breaks<F>(refl: &Reflector, k0: f64, mag: F) -> Vec<f64>
where
    F: Fn(f64) -> [f64; 2],
{
    let branch = refl.branch_points(k0);
    let Some(&top) = branch.last() else {
        return Vec::new();
    };
    let mut pts = Vec::new();
    for &x in &branch {
        pts.extend(graded(x, 1e-2 * top, 12, -1.0));
        pts.extend(graded(x, 1e-2 * top, 12, 1.0));
    }
    if refl.is_layered() {
        for x in peak_locations(mag, 1.05 * top) {
            pts.extend(graded(x, 1e-2 * top, 12, -1.0));
            pts.extend(graded(x, 1e-2 * top, 12, 1.0));
        }
    }
    pts
}

/// Length scale over which the reflection coefficients vary with β.
fn mirror_scale(mirror: &MirrorSpec) -> f64 {
    match mirror {
        MirrorSpec::Stack(layers) => layers.iter().filter_map(|l| l.thickness).sum(),
        _ => 0.0,
    }
}

/// Residue of the constant-dropped kernel at β = 0, from a Richardson
/// extrapolation of β·H(β) at tiny β; `length` bounds the scales on which
/// the reflection coefficients vary.
fn grazing_residue(kernel: &CavityKernel<'_>, length: f64) -> Complex64 {
    let x = 1e-10 / length;
    let g = |x: f64| kernel.eval(Complex64::new(x, 0.0)) * x;
    2.0 * g(x) - g(2.0 * x)
}

fn cavity_realfreq(
    z: f64,
    omega: f64,
    cav: &CavityGeometry,
    spec: &QuadratureSpec,
    form: TraceForm,
    with_evanescent: bool,
) -> Result<GreenTraceParts> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain(format!("real frequency must be > 0, got {omega}")));
    }
    let a = cav.width;
    let w = Complex64::new(omega, 0.0);
    let refl = cav.mirror.at_frequency(w)?;
    if refl.is_transparent() {
        return Ok(GreenTraceParts::default());
    }
    let b = omega / C;
    let kmax = if with_evanescent { cav.evanescent_cutoff(z) } else { f64::INFINITY };
    let kernel = CavityKernel {
        refl: &refl,
        a,
        z,
        k0sq: w * w / (C * C),
        form,
    };
    let singular = form == TraceForm::ConstantDropped && refl.is_grazing_singular();
    let (h, radius) = if singular {
        let length = (1.0 / b).max(a).max(mirror_scale(&cav.mirror));
        (grazing_residue(&kernel, length), b.min(kmax))
    } else {
        (Complex64::new(0.0, 0.0), 0.0)
    };

    let mut pbreaks = propagating_breaks(b, a, resonance_panel(&cav.mirror));
    let shifted = resonance_locations(&refl, &cav.mirror, a, b);
    if !shifted.is_empty() {
        let mut pts = pbreaks.clone();
        for x in shifted {
            pts.extend(graded(x, 1.0 / a, 12, -1.0));
            pts.extend(graded(x, 1.0 / a, 12, 1.0));
        }
        pbreaks = sorted_breaks(0.0, b, pts);
    }
    if singular && radius < b {
        pbreaks = sorted_breaks(0.0, b, [pbreaks.clone(), vec![radius]].concat());
    }
    let prop = adaptive_integrate_breaks(
        |x| {
            let v = kernel.eval(Complex64::new(x, 0.0));
            if x < radius {
                v - h / x
            } else {
                v
            }
        },
        &pbreaks,
        spec,
    )?;
    let propagating = prop.value / (2.0 * PI * I);
    if !with_evanescent {
        return Ok(GreenTraceParts {
            propagating,
            evanescent: Complex64::new(0.0, 0.0),
        });
    }

    let mut extra = mirror_breaks(&refl, b, |k| {
        let beta = Complex64::new(0.0, k);
        let pair = refl.reflect(beta);
        let x = 2.0 * I * beta * a;
        let d = |r: &Reflection| (r.r / (r.one_minus_r2() * x.exp() - expm1_complex(x))).norm();
        [d(&pair.s), d(&pair.p)]
    });
    if singular {
        extra.push(radius);
    }
    let ebreaks = sorted_breaks(0.0, kmax, [evanescent_breaks(b, a, kmax), extra].concat());
    let ev = adaptive_integrate_breaks(
        |k| {
            let beta = Complex64::new(0.0, k);
            let v = kernel.eval(beta);
            if k < radius {
                v - h / beta
            } else {
                v
            }
        },
        &ebreaks,
        spec,
    )?;
    let evanescent = -ev.value / (2.0 * PI) - h / 4.0;
    Ok(GreenTraceParts {
        propagating,
        evanescent,
    })
}

/// Tr G(z, z, ω) of the cavity at real ω, position-independent terms dropped,
/// split into propagating and evanescent parts.
pub fn cavity_trace_realfreq(
    z: f64,
    omega: f64,
    cavity: &CavityGeometry,
    spec: &QuadratureSpec,
) -> Result<GreenTraceParts> {
    cavity.check_interior(z)?;
    cavity_realfreq(z, omega, cavity, spec, TraceForm::ConstantDropped, true)
}

/// Propagating part of [`cavity_trace_realfreq`]; also defined on the walls
/// |z| = a/2.
pub fn cavity_trace_propagating(
    z: f64,
    omega: f64,
    cavity: &CavityGeometry,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    if !(z.is_finite() && z.abs() <= 0.5 * cavity.width) {
        return Err(Error::domain(format!("position z = {z:e} m outside the cavity")));
    }
    Ok(cavity_realfreq(z, omega, cavity, spec, TraceForm::ConstantDropped, false)?.propagating)
}

/// Tr G(z, z, ω) of the cavity at real ω including the position-independent
/// multiple-reflection term; finite for every wall without regularisation.
pub fn cavity_trace_realfreq_full(
    z: f64,
    omega: f64,
    cavity: &CavityGeometry,
    spec: &QuadratureSpec,
) -> Result<GreenTraceParts> {
    cavity.check_interior(z)?;
    cavity_realfreq(z, omega, cavity, spec, TraceForm::Full, true)
}

/// Tr G(z, z, iξ) of the cavity as a complex number; the imaginary part
/// vanishes up to round-off.
pub fn cavity_trace_imagfreq_complex(
    z: f64,
    xi: f64,
    cav: &CavityGeometry,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    cav.check_interior(z)?;
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::domain(format!("imaginary frequency must be > 0, got {xi}")));
    }
    let a = cav.width;
    let w = Complex64::new(0.0, xi);
    let refl = cav.mirror.at_frequency(w)?;
    if refl.is_transparent() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let kernel = CavityKernel {
        refl: &refl,
        a,
        z,
        k0sq: w * w / (C * C),
        form: TraceForm::ConstantDropped,
    };
    let lo = xi / C;
    let hi = (CUTOFF + 2.0 * xi * a / C) / (a - 2.0 * z.abs());
    let span = hi - lo;
    let breaks = sorted_breaks(lo, hi, vec![lo + 1e-3 * span, lo + 1e-2 * span, lo + 0.1 * span]);
    let v = adaptive_integrate_breaks(|k| kernel.eval(Complex64::new(0.0, k)), &breaks, spec)?;
    Ok(-v.value / (2.0 * PI))
}

/// Re Tr G(z, z, iξ) of the cavity for ξ > 0.
pub fn cavity_trace_imagfreq(z: f64, xi: f64, cavity: &CavityGeometry, spec: &QuadratureSpec) -> Result<f64> {
    let v = cavity_trace_imagfreq_complex(z, xi, cavity, spec)?;
    debug_assert!(
        v.im.abs() <= 1e-10 * v.re.abs() + 1e-300,
        "imaginary-frequency trace not real: {v}"
    );
    Ok(v.re)
}

/// lim_{ω→0} ω² Re Tr G(z, z, ω) of the cavity, from the static reflection
/// coefficients.
pub fn zero_frequency_trace_limit(z: f64, cavity: &CavityGeometry, spec: &QuadratureSpec) -> Result<f64> {
    cavity.check_interior(z)?;
    let a = cavity.width;
    let mirror = &cavity.mirror;
    if let MirrorSpec::ConstantR(r) = mirror {
        if *r == 0.0 {
            return Ok(0.0);
        }
    }
    let kmax = cavity.evanescent_cutoff(z);
    let breaks = sorted_breaks(0.0, kmax, vec![0.1 / a, 1.0 / a, 4.0 / a]);
    let v = adaptive_integrate_breaks(
        |k| {
            let rp = mirror.static_reflection(k).map(|p| p.1).unwrap_or(f64::NAN);
            let e2 = (-2.0 * k * a).exp();
            let d = (1.0 - rp * rp) * e2 - (-2.0 * k * a).exp_m1();
            let ec = 0.5 * ((-k * (a - 2.0 * z)).exp() + (-k * (a + 2.0 * z)).exp());
            Complex64::new(k * k * rp / d * ec, 0.0)
        },
        &breaks,
        spec,
    )?;
    Ok(C * C / PI * v.value.re)
}

fn plate_kernel(refl: &Reflector, k0sq: Complex64, d: f64, beta: Complex64) -> Complex64 {
    let pair = refl.reflect(beta);
    let tangential = 2.0 * beta * beta / k0sq;
    (pair.s.r + pair.p.r - tangential * pair.p.r) * (2.0 * I * beta * d).exp()
}

fn check_distance(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("distance from the plate must be > 0, got {d}")))
    }
}

/// Tr G at real frequency a distance `distance` above a single plate.
pub fn single_plate_trace(
    distance: f64,
    omega: f64,
    mirror: &MirrorSpec,
    spec: &QuadratureSpec,
) -> Result<GreenTraceParts> {
    check_distance(distance)?;
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain(format!("real frequency must be > 0, got {omega}")));
    }
    let w = Complex64::new(omega, 0.0);
    let refl = mirror.at_frequency(w)?;
    if refl.is_transparent() {
        return Ok(GreenTraceParts::default());
    }
    let k0sq = w * w / (C * C);
    let b = omega / C;
    let pbreaks = sorted_breaks(0.0, b, graded(0.0, b, 12, 1.0).collect());
    let prop = adaptive_integrate_breaks(
        |x| plate_kernel(&refl, k0sq, distance, Complex64::new(x, 0.0)),
        &pbreaks,
        spec,
    )?;
    let kmax = CUTOFF / (2.0 * distance);
    let mut pts: Vec<f64> = graded(0.0, b, 12, 1.0).collect();
    pts.push(1.0 / distance);
    pts.extend(mirror_breaks(&refl, b, |k| {
        let pair = refl.reflect(Complex64::new(0.0, k));
        [pair.s.r.norm(), pair.p.r.norm()]
    }));
    let ebreaks = sorted_breaks(0.0, kmax, pts);
    let ev = adaptive_integrate_breaks(
        |k| plate_kernel(&refl, k0sq, distance, Complex64::new(0.0, k)),
        &ebreaks,
        spec,
    )?;
    Ok(GreenTraceParts {
        propagating: I * prop.value / (4.0 * PI),
        evanescent: ev.value / (4.0 * PI),
    })
}

/// Re Tr G(iξ) a distance `distance` above a single plate.
pub fn single_plate_trace_imagfreq(
    distance: f64,
    xi: f64,
    mirror: &MirrorSpec,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_distance(distance)?;
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::domain(format!("imaginary frequency must be > 0, got {xi}")));
    }
    let w = Complex64::new(0.0, xi);
    let refl = mirror.at_frequency(w)?;
    if refl.is_transparent() {
        return Ok(0.0);
    }
    let k0sq = w * w / (C * C);
    let lo = xi / C;
    let hi = lo + CUTOFF / (2.0 * distance);
    let v = adaptive_integrate_breaks(
        |k| plate_kernel(&refl, k0sq, distance, Complex64::new(0.0, k)),
        &[lo, hi],
        spec,
    )?;
    Ok(v.value.re / (4.0 * PI))
}

/// lim_{ω→0} ω² Re Tr G above a single plate.
pub fn single_plate_zero_frequency_limit(distance: f64, mirror: &MirrorSpec, spec: &QuadratureSpec) -> Result<f64> {
    check_distance(distance)?;
    let kmax = CUTOFF / (2.0 * distance);
    let breaks = sorted_breaks(0.0, kmax, vec![0.1 / distance, 1.0 / distance]);
    let v = adaptive_integrate_breaks(
        |k| {
            let rp = mirror.static_reflection(k).map(|p| p.1).unwrap_or(f64::NAN);
            Complex64::new(k * k * rp * (-2.0 * k * distance).exp(), 0.0)
        },
        &breaks,
        spec,
    )?;
    Ok(C * C / (2.0 * PI) * v.value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ZETA3;
    use crate::materials::PermittivityModel;

    const W: f64 = 2.78973e12;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn lambda() -> f64 {
        2.0 * PI * C / W
    }

    #[test]
    fn beta_branches() {
        let w = Complex64::new(W, 0.0);
        assert_eq!(transverse_beta(w, 0.0), Complex64::new(W / C, 0.0));
        let b = transverse_beta(w, 2.0 * W / C);
        assert!(b.re.abs() < 1e-12 && (b.im - 3f64.sqrt() * W / C).abs() < 1e-9);
        let b = transverse_beta(Complex64::new(0.0, 1e13), 5e4);
        assert!(b.re == 0.0 && b.im > 0.0);
    }

    #[test]
    fn transparent_walls_give_zero() {
        let cav = CavityGeometry::new(1e-3, MirrorSpec::ConstantR(0.0)).unwrap();
        assert_eq!(cavity_trace_imagfreq(0.0, 1e12, &cav, &spec()).unwrap(), 0.0);
        assert_eq!(zero_frequency_trace_limit(0.0, &cav, &spec()).unwrap(), 0.0);
        let t = cavity_trace_realfreq(1e-4, W, &cav, &spec()).unwrap();
        assert_eq!(t.total(), Complex64::new(0.0, 0.0));
        let t = single_plate_trace(1e-4, W, &MirrorSpec::ConstantR(0.0), &spec()).unwrap();
        assert_eq!(t.total(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn zero_frequency_perfect_conductor_centre() {
        let a = 1e-3;
        let cav = CavityGeometry::new(a, MirrorSpec::HalfSpace(PermittivityModel::gold())).unwrap();
        let v = zero_frequency_trace_limit(0.0, &cav, &spec()).unwrap();
        let exact = C * C / PI * 7.0 * ZETA3 / (4.0 * a.powi(3));
        assert!((v / exact - 1.0).abs() < 1e-9);
        let up = zero_frequency_trace_limit(2e-4, &cav, &spec()).unwrap();
        let down = zero_frequency_trace_limit(-2e-4, &cav, &spec()).unwrap();
        assert_eq!(up, down);
    }

    #[test]
    fn imagfreq_decay_with_frequency() {
        let a = 1e-3;
        let cav = CavityGeometry::new(a, MirrorSpec::ConstantR(0.999_999)).unwrap();
        let lo = cavity_trace_imagfreq(0.0, 0.1 * C / a, &cav, &spec()).unwrap();
        let hi = cavity_trace_imagfreq(0.0, 10.0 * C / a, &cav, &spec()).unwrap();
        assert!(hi.abs() <= (-10f64).exp() * lo.abs());
    }

    #[test]
    fn imagfreq_is_real_for_drude_and_stacks() {
        let a = 6.75e-4;
        let gold = CavityGeometry::new(a, MirrorSpec::HalfSpace(PermittivityModel::gold())).unwrap();
        let sapph = PermittivityModel::constant_lossy(10.0, 1e-4).unwrap();
        let stack = crate::materials::quarter_wave_stack(sapph, PermittivityModel::Vacuum, 3, W).unwrap();
        let bragg = CavityGeometry::new(a, MirrorSpec::Stack(stack)).unwrap();
        for cav in [&gold, &bragg] {
            for &xi in &[1e11, 2.466e14, 5e15] {
                let v = cavity_trace_imagfreq_complex(1e-4, xi, cav, &spec()).unwrap();
                assert!(v.im.abs() <= 1e-10 * v.re.abs(), "{v}");
            }
        }
    }

    #[test]
    fn constant_r_polarisation_sum_cancels() {
        let refl = MirrorSpec::ConstantR(0.97).at_frequency(Complex64::new(W, 0.0)).unwrap();
        for &b in &[0.1, 100.0, 9000.0] {
            for beta in [Complex64::new(b, 0.0), Complex64::new(0.0, b)] {
                let p = refl.reflect(beta);
                let e2 = (2.0 * I * beta * 1e-3).exp();
                let em1 = expm1_complex(2.0 * I * beta * 1e-3);
                let ds = p.s.one_minus_r2() * e2 - em1;
                let dp = p.p.one_minus_r2() * e2 - em1;
                let sum = p.s.r / ds + p.p.r / dp;
                assert!(sum.norm() < 1e-14 * (p.p.r / dp).norm());
            }
        }
    }

    #[test]
    fn traces_are_even_in_z() {
        let a = lambda();
        let cav = CavityGeometry::new(a, MirrorSpec::HalfSpace(PermittivityModel::gold())).unwrap();
        let z = 0.17 * a;
        let p = cavity_trace_realfreq(z, W, &cav, &spec()).unwrap();
        let m = cavity_trace_realfreq(-z, W, &cav, &spec()).unwrap();
        assert_eq!(p, m);
    }

    #[test]
    fn full_and_dropped_forms_differ_by_a_constant() {
        let a = lambda();
        let cav = CavityGeometry::new(a, MirrorSpec::HalfSpace(PermittivityModel::gold())).unwrap();
        let t = |z: f64| {
            let d = cavity_trace_realfreq(z, W, &cav, &spec()).unwrap().total();
            let f = cavity_trace_realfreq_full(z, W, &cav, &spec()).unwrap().total();
            f - d
        };
        let c0 = t(0.0);
        for &z in &[0.1 * a, 0.3 * a] {
            assert!((t(z) - c0).norm() < 1e-6 * c0.norm());
        }
    }

    #[test]
    fn full_form_matches_dropped_for_constant_r_imaginary_part() {
        let a = 0.5 * lambda();
        let cav = CavityGeometry::new(a, MirrorSpec::ConstantR(0.9)).unwrap();
        let d = cavity_trace_realfreq(0.0, W, &cav, &spec()).unwrap().total();
        let f = cavity_trace_realfreq_full(0.0, W, &cav, &spec()).unwrap().total();
        assert!((d.im - f.im).abs() < 1e-7 * d.im.abs());
    }

    #[test]
    fn wide_cavity_near_wall_matches_single_plate() {
        let lam = lambda();
        let a = 20.0 * lam;
        let d = 0.25 * lam;
        let mirror = MirrorSpec::ConstantR(0.5);
        let cav = CavityGeometry::new(a, mirror.clone()).unwrap();
        let c = cavity_trace_realfreq(0.5 * a - d, W, &cav, &spec()).unwrap().total();
        let p = single_plate_trace(d, W, &mirror, &spec()).unwrap().total();
        assert!((c.re - p.re).abs() < 0.05 * p.re.abs(), "{c} vs {p}");
    }

    #[test]
    fn plate_zero_frequency_closed_form() {
        let d = 1e-4;
        let v = single_plate_zero_frequency_limit(d, &MirrorSpec::ConstantR(0.6), &spec()).unwrap();
        let exact = C * C * 0.6 / (8.0 * PI * d.powi(3));
        assert!((v / exact - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_positions_outside() {
        let cav = CavityGeometry::new(1e-3, MirrorSpec::ConstantR(0.5)).unwrap();
        assert!(cavity_trace_realfreq(5e-4, W, &cav, &spec()).is_err());
        assert!(cavity_trace_propagating(5e-4, W, &cav, &spec()).is_ok());
        assert!(single_plate_trace(0.0, W, &MirrorSpec::ConstantR(0.5), &spec()).is_err());
        assert!(CavityGeometry::new(-1.0, MirrorSpec::ConstantR(0.5)).is_err());
    }
}

