//! Permittivity models and reflection coefficients of the cavity walls.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::C;
use crate::error::{Error, Result};
use crate::numerics::{expm1_complex, sqrt_upper};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PermittivityModel {
    Drude { plasma_frequency: f64, damping: f64 },
    ConstantLossy { eps_real: f64, eps_imag: f64 },
    Vacuum,
}

/// Permittivity in the static limit ω → 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StaticPermittivity {
    Infinite,
    Finite(f64),
}

impl PermittivityModel {
    pub fn drude(plasma_frequency: f64, damping: f64) -> Result<Self> {
        let m = PermittivityModel::Drude {
            plasma_frequency,
            damping,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn constant_lossy(eps_real: f64, eps_imag: f64) -> Result<Self> {
        let m = PermittivityModel::ConstantLossy { eps_real, eps_imag };
        m.validate()?;
        Ok(m)
    }

    /// Gold, ω_p = 1.37e16 rad/s and γ = 5.32e13 rad/s.
    pub fn gold() -> Self {
        PermittivityModel::Drude {
            plasma_frequency: 1.37e16,
            damping: 5.32e13,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PermittivityModel::Drude {
                plasma_frequency,
                damping,
            } => {
                if !(plasma_frequency > 0.0 && plasma_frequency.is_finite()) {
                    return Err(Error::domain("Drude plasma frequency must be > 0"));
                }
                if !(damping > 0.0 && damping.is_finite()) {
                    return Err(Error::domain("Drude damping must be > 0"));
                }
            }
            PermittivityModel::ConstantLossy { eps_real, eps_imag } => {
                if !eps_real.is_finite() {
                    return Err(Error::domain("eps_real must be finite"));
                }
                if !(eps_imag >= 0.0 && eps_imag.is_finite()) {
                    return Err(Error::domain("eps_imag must be >= 0 (passive medium)"));
                }
            }
            PermittivityModel::Vacuum => {}
        }
        Ok(())
    }

    pub fn is_vacuum(&self) -> bool {
        match *self {
            PermittivityModel::Vacuum => true,
            PermittivityModel::ConstantLossy { eps_real, eps_imag } => {
                eps_real == 1.0 && eps_imag == 0.0
            }
            PermittivityModel::Drude { .. } => false,
        }
    }

    /// ε(ω) on the real or positive imaginary frequency axis.
    ///
    /// A frequency-independent complex constant has no causal continuation,
    /// so on the imaginary axis `ConstantLossy` returns its real part.
    pub fn permittivity_at(&self, omega: Complex64) -> Result<Complex64> {
        match *self {
            PermittivityModel::Vacuum => Ok(ONE),
            PermittivityModel::ConstantLossy { eps_real, eps_imag } => {
                if omega.re == 0.0 {
                    Ok(Complex64::new(eps_real, 0.0))
                } else {
                    Ok(Complex64::new(eps_real, eps_imag))
                }
            }
            PermittivityModel::Drude {
                plasma_frequency: wp,
                damping: g,
            } => {
                if omega.norm() == 0.0 {
                    return Err(Error::StaticLimit);
                }
                if omega.re == 0.0 {
                    let xi = omega.im;
                    return Ok(Complex64::new(1.0 + wp * wp / (xi * (xi + g)), 0.0));
                }
                Ok(ONE - wp * wp / (omega * (omega + Complex64::new(0.0, g))))
            }
        }
    }

    pub fn static_permittivity(&self) -> StaticPermittivity {
        match *self {
            PermittivityModel::Vacuum => StaticPermittivity::Finite(1.0),
            PermittivityModel::ConstantLossy { eps_real, .. } => StaticPermittivity::Finite(eps_real),
            PermittivityModel::Drude { .. } => StaticPermittivity::Infinite,
        }
    }
}

/// ε(ω) of `model`; see [`PermittivityModel::permittivity_at`].
pub fn permittivity_at(model: &PermittivityModel, omega: Complex64) -> Result<Complex64> {
    model.permittivity_at(omega)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub material: PermittivityModel,
    /// Thickness in metres; `None` marks the semi-infinite substrate.
    pub thickness: Option<f64>,
}

impl Layer {
    pub fn finite(material: PermittivityModel, thickness: f64) -> Result<Self> {
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(Error::domain(format!("layer thickness must be > 0, got {thickness}")));
        }
        Ok(Layer {
            material,
            thickness: Some(thickness),
        })
    }

    pub fn semi_infinite(material: PermittivityModel) -> Self {
        Layer {
            material,
            thickness: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MirrorSpec {
    HalfSpace(PermittivityModel),
    /// Layers ordered from the cavity side; the last one is semi-infinite.
    Stack(Vec<Layer>),
    /// r_p = −r_s = r at every frequency and wave vector.
    ConstantR(f64),
}

impl MirrorSpec {
    pub fn half_space(material: PermittivityModel) -> Result<Self> {
        material.validate()?;
        Ok(MirrorSpec::HalfSpace(material))
    }

    pub fn stack(layers: Vec<Layer>) -> Result<Self> {
        let m = MirrorSpec::Stack(layers);
        m.validate()?;
        Ok(m)
    }

    pub fn constant_r(r: f64) -> Result<Self> {
        let m = MirrorSpec::ConstantR(r);
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MirrorSpec::HalfSpace(m) => m.validate(),
            MirrorSpec::ConstantR(r) => {
                if (0.0..1.0).contains(r) {
                    Ok(())
                } else {
                    Err(Error::domain(format!("constant reflectivity must be in [0, 1), got {r}")))
                }
            }
            MirrorSpec::Stack(layers) => validate_stack(layers),
        }
    }

    /// Binds the mirror to a frequency on the real or imaginary axis.
    pub fn at_frequency(&self, omega: Complex64) -> Result<Reflector> {
        let k0sq = omega * omega / (C * C);
        let kind = match self {
            MirrorSpec::ConstantR(r) => ReflectorKind::Constant(*r),
            MirrorSpec::HalfSpace(m) => {
                if m.is_vacuum() {
                    ReflectorKind::Transparent
                } else {
                    let eps = m.permittivity_at(omega)?;
                    ReflectorKind::HalfSpace {
                        eps,
                        shift: (eps - 1.0) * k0sq,
                    }
                }
            }
            MirrorSpec::Stack(layers) => {
                validate_stack(layers)?;
                if layers.iter().all(|l| l.material.is_vacuum()) {
                    ReflectorKind::Transparent
                } else {
                    let mut bound = Vec::with_capacity(layers.len());
                    for l in layers {
                        let eps = l.material.permittivity_at(omega)?;
                        bound.push(BoundLayer {
                            eps,
                            shift: (eps - 1.0) * k0sq,
                            vacuum: l.material.is_vacuum(),
                            thickness: l.thickness.unwrap_or(0.0),
                        });
                    }
                    ReflectorKind::Stack(bound)
                }
            }
        };
        Ok(Reflector { kind })
    }

    /// Reflection coefficients in the limit ω → 0 at transverse wave number
    /// `k_perp` > 0, as (r_s, r_p).
    pub fn static_reflection(&self, k_perp: f64) -> Result<(f64, f64)> {
        if !(k_perp > 0.0) {
            return Err(Error::domain(format!("static limit needs k_perp > 0, got {k_perp}")));
        }
        match self {
            MirrorSpec::ConstantR(r) => Ok((-r, *r)),
            MirrorSpec::HalfSpace(m) => {
                Ok((0.0, static_interface(StaticPermittivity::Finite(1.0), m.static_permittivity())))
            }
            MirrorSpec::Stack(layers) => {
                validate_stack(layers)?;
                let n = layers.len();
                let eps = |m: usize| {
                    if m == 0 {
                        StaticPermittivity::Finite(1.0)
                    } else {
                        layers[m - 1].material.static_permittivity()
                    }
                };
                let mut r = static_interface(eps(n - 1), eps(n));
                for m in (1..n).rev() {
                    let d = layers[m - 1].thickness.unwrap_or(0.0);
                    let e = (-2.0 * k_perp * d).exp();
                    let ri = static_interface(eps(m - 1), eps(m));
                    r = (ri + r * e) / (1.0 + ri * r * e);
                }
                Ok((0.0, r))
            }
        }
    }
}

fn validate_stack(layers: &[Layer]) -> Result<()> {
    let Some((last, body)) = layers.split_last() else {
        return Err(Error::domain("layer stack is empty"));
    };
    if last.thickness.is_some() {
        return Err(Error::domain("the last layer of a stack must be semi-infinite"));
    }
    for l in layers {
        l.material.validate()?;
    }
    for l in body {
        match l.thickness {
            Some(d) if d > 0.0 && d.is_finite() => {}
            Some(d) => return Err(Error::domain(format!("layer thickness must be > 0, got {d}"))),
            None => return Err(Error::domain("only the last layer may be semi-infinite")),
        }
    }
    Ok(())
}

fn static_interface(a: StaticPermittivity, b: StaticPermittivity) -> f64 {
    use StaticPermittivity::*;
    match (a, b) {
        (Infinite, Infinite) => 0.0,
        (Finite(_), Infinite) => 1.0,
        (Infinite, Finite(_)) => -1.0,
        (Finite(x), Finite(y)) => {
            if x == y {
                0.0
            } else {
                (y - x) / (y + x)
            }
        }
    }
}

/// Limits ω → 0 of (r_s, r_p); see [`MirrorSpec::static_reflection`].
pub fn static_limit_reflection(mirror: &MirrorSpec, k_perp: f64) -> Result<(f64, f64)> {
    mirror.static_reflection(k_perp)
}

/// A reflection coefficient together with 1 ± r, computed without
/// cancellation when r ≈ ∓1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflection {
    pub r: Complex64,
    pub one_plus_r: Complex64,
    pub one_minus_r: Complex64,
}

impl Reflection {
    const NONE: Reflection = Reflection {
        r: ZERO,
        one_plus_r: ONE,
        one_minus_r: ONE,
    };

    fn from_ratio(num: Complex64, num_one_plus: Complex64, num_one_minus: Complex64, den: Complex64) -> Self {
        Reflection {
            r: num / den,
            one_plus_r: num_one_plus / den,
            one_minus_r: num_one_minus / den,
        }
    }

    fn real(r: f64) -> Self {
        Reflection {
            r: Complex64::new(r, 0.0),
            one_plus_r: Complex64::new(1.0 + r, 0.0),
            one_minus_r: Complex64::new(1.0 - r, 0.0),
        }
    }

    #[inline]
    pub fn one_minus_r2(&self) -> Complex64 {
        self.one_plus_r * self.one_minus_r
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionPair {
    pub s: Reflection,
    pub p: Reflection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    S,
    P,
}

#[derive(Debug, Clone)]
struct BoundLayer {
    eps: Complex64,
    shift: Complex64,
    vacuum: bool,
    thickness: f64,
}

#[derive(Debug, Clone)]
enum ReflectorKind {
    Transparent,
    Constant(f64),
    HalfSpace { eps: Complex64, shift: Complex64 },
    Stack(Vec<BoundLayer>),
}

/// A mirror evaluated at one frequency; maps the vacuum normal wave number β
/// to the reflection coefficients.
#[derive(Debug, Clone)]
pub struct Reflector {
    kind: ReflectorKind,
}

impl Reflector {
    /// True when |r_σ| → 1 at grazing incidence (β → 0), which holds for every
    /// wall containing matter.
    pub fn is_grazing_singular(&self) -> bool {
        matches!(
            self.kind,
            ReflectorKind::HalfSpace { .. } | ReflectorKind::Stack(_)
        )
    }

    pub fn is_transparent(&self) -> bool {
        match self.kind {
            ReflectorKind::Transparent => true,
            ReflectorKind::Constant(r) => r == 0.0,
            _ => false,
        }
    }

    /// Values κ on the evanescent arm β = iκ at which the normal wave number
    /// inside a denser-than-vacuum medium of the mirror vanishes (branch
    /// points of the reflection coefficients), for vacuum wave number `k0`.
    /// Layered mirrors guide waves below the largest of them.
    pub fn branch_points(&self, k0: f64) -> Vec<f64> {
        let eps: Vec<Complex64> = match &self.kind {
            ReflectorKind::HalfSpace { eps, .. } => vec![*eps],
            ReflectorKind::Stack(layers) => layers.iter().filter(|l| !l.vacuum).map(|l| l.eps).collect(),
            _ => Vec::new(),
        };
        let mut out: Vec<f64> = eps
            .iter()
            .filter(|e| e.re > 1.0)
            .map(|e| k0 * (e.re - 1.0).sqrt())
            .collect();
        out.sort_by(|x, y| x.total_cmp(y));
        out.dedup();
        out
    }

    pub fn is_layered(&self) -> bool {
        matches!(self.kind, ReflectorKind::Stack(_))
    }

    /// Reflection coefficients for vacuum normal wave number `beta`
    /// (Im β ≥ 0).
    pub fn reflect(&self, beta: Complex64) -> ReflectionPair {
        debug_assert!(beta.im >= 0.0, "branch violated: β = {beta}");
        match &self.kind {
            ReflectorKind::Transparent => ReflectionPair {
                s: Reflection::NONE,
                p: Reflection::NONE,
            },
            ReflectorKind::Constant(r) => ReflectionPair {
                s: Reflection::real(-r),
                p: Reflection::real(*r),
            },
            ReflectorKind::HalfSpace { eps, shift } => {
                let beta1 = sqrt_upper(beta * beta + shift);
                interface(ONE, beta, *eps, beta1)
            }
            ReflectorKind::Stack(layers) => stack_reflect(layers, beta),
        }
    }
}

fn interface(eps_i: Complex64, beta_i: Complex64, eps_j: Complex64, beta_j: Complex64) -> ReflectionPair {
    if eps_i == eps_j {
        return ReflectionPair {
            s: Reflection::NONE,
            p: Reflection::NONE,
        };
    }
    let s = Reflection::from_ratio(beta_i - beta_j, 2.0 * beta_i, 2.0 * beta_j, beta_i + beta_j);
    let a = eps_j * beta_i;
    let b = eps_i * beta_j;
    let p = Reflection::from_ratio(a - b, 2.0 * a, 2.0 * b, a + b);
    ReflectionPair { s, p }
}

fn stack_reflect(layers: &[BoundLayer], beta: Complex64) -> ReflectionPair {
    let n = layers.len();
    let beta2 = beta * beta;
    let medium = |m: usize| -> (Complex64, Complex64) {
        if m == 0 {
            (ONE, beta)
        } else {
            let l = &layers[m - 1];
            if l.vacuum {
                (ONE, beta)
            } else {
                (l.eps, sqrt_upper(beta2 + l.shift))
            }
        }
    };
    let (mut eps_j, mut beta_j) = medium(n);
    let (eps_i, beta_i) = medium(n - 1);
    let mut acc = interface(eps_i, beta_i, eps_j, beta_j);
    eps_j = eps_i;
    beta_j = beta_i;
    for m in (1..n).rev() {
        let (eps_i, beta_i) = medium(m - 1);
        let front = interface(eps_i, beta_i, eps_j, beta_j);
        let phase = Complex64::new(0.0, 2.0 * layers[m - 1].thickness) * beta_j;
        let e = phase.exp();
        let em1 = expm1_complex(phase);
        acc = ReflectionPair {
            s: propagate(front.s, acc.s, e, em1),
            p: propagate(front.p, acc.p, e, em1),
        };
        eps_j = eps_i;
        beta_j = beta_i;
    }
    acc
}

// r = (r_ij + X)/(1 + r_ij X) with X = R e, and
// 1 ± r = (1 ± r_ij)(1 ± X)/(1 + r_ij X).
#[inline]
fn propagate(front: Reflection, back: Reflection, e: Complex64, em1: Complex64) -> Reflection {
    let x = back.r * e;
    // Each quantity has a direct form and forms expanded about r = ±1; all
    // are equal in exact arithmetic, and the one built from the smallest
    // terms carries the smallest rounding error. Near grazing incidence
    // r_ij ≈ ±1 and X ≈ ∓1 favour the expansions; on the evanescent arm
    // |X| ≫ 1 favours the direct forms.
    let one_plus_x = pick([
        (ONE + x, 1.0f64.max(x.norm())),
        (back.one_plus_r + back.r * em1, back.one_plus_r.norm().max((back.r * em1).norm())),
    ]);
    let one_minus_x = pick([
        (ONE - x, 1.0f64.max(x.norm())),
        (back.one_minus_r - back.r * em1, back.one_minus_r.norm().max((back.r * em1).norm())),
    ]);
    let fx_m = front.one_minus_r * x;
    let fx_p = front.one_plus_r * x;
    let num = pick3([
        (front.r + x, front.r.norm().max(x.norm())),
        (one_plus_x - front.one_minus_r, one_plus_x.norm().max(front.one_minus_r.norm())),
        (front.one_plus_r - one_minus_x, front.one_plus_r.norm().max(one_minus_x.norm())),
    ]);
    let den = pick3([
        (ONE + front.r * x, 1.0f64.max((front.r * x).norm())),
        (one_plus_x - fx_m, one_plus_x.norm().max(fx_m.norm())),
        (one_minus_x + fx_p, one_minus_x.norm().max(fx_p.norm())),
    ]);
    Reflection {
        r: num / den,
        one_plus_r: front.one_plus_r * one_plus_x / den,
        one_minus_r: front.one_minus_r * one_minus_x / den,
    }
}

#[inline]
fn pick(c: [(Complex64, f64); 2]) -> Complex64 {
    if c[0].1 <= c[1].1 {
        c[0].0
    } else {
        c[1].0
    }
}

#[inline]
fn pick3(c: [(Complex64, f64); 3]) -> Complex64 {
    let mut best = c[0];
    for cand in &c[1..] {
        if cand.1 < best.1 {
            best = *cand;
        }
    }
    best.0
}

/// Fresnel coefficients (r_s, r_p) of a vacuum/medium interface.
pub fn fresnel_halfspace(eps: Complex64, omega: Complex64, k_perp: f64) -> (Complex64, Complex64) {
    let beta = crate::greens::transverse_beta(omega, k_perp);
    let k0sq = omega * omega / (C * C);
    let beta1 = sqrt_upper(beta * beta + (eps - 1.0) * k0sq);
    let pair = interface(ONE, beta, eps, beta1);
    (pair.s.r, pair.p.r)
}

/// Reflection coefficient of a vacuum-fronted layer stack.
pub fn multilayer_reflection(
    stack: &[Layer],
    omega: Complex64,
    k_perp: f64,
    polarization: Polarization,
) -> Result<Complex64> {
    if stack.is_empty() {
        return Err(Error::domain("layer stack is empty"));
    }
    let refl = MirrorSpec::Stack(stack.to_vec()).at_frequency(omega)?;
    let pair = refl.reflect(crate::greens::transverse_beta(omega, k_perp));
    Ok(match polarization {
        Polarization::S => pair.s.r,
        Polarization::P => pair.p.r,
    })
}

/// Quarter-wave stack of `n_pairs` (a, b) pairs designed for `omega0`,
/// terminated by semi-infinite `a`.
pub fn quarter_wave_stack(
    a: PermittivityModel,
    b: PermittivityModel,
    n_pairs: usize,
    omega0: f64,
) -> Result<Vec<Layer>> {
    let w = Complex64::new(omega0, 0.0);
    let thickness = |m: &PermittivityModel| -> Result<f64> {
        let eps = m.permittivity_at(w)?;
        if !(eps.re > 0.0) {
            return Err(Error::domain("quarter-wave layers need Re ε > 0"));
        }
        let n = sqrt_upper(eps).re;
        Ok(std::f64::consts::PI * C / (2.0 * n * omega0))
    };
    let (da, db) = (thickness(&a)?, thickness(&b)?);
    let mut layers = Vec::with_capacity(2 * n_pairs + 1);
    for _ in 0..n_pairs {
        layers.push(Layer::finite(a, da)?);
        layers.push(Layer::finite(b, db)?);
    }
    layers.push(Layer::semi_infinite(a));
    Ok(layers)
}

/// Normal-incidence deficit 1 − Re r_p of a quarter-wave stack with
/// `n_pairs` pairs, evaluated at `omega`. The p coefficient tends to +1 for
/// a perfect mirror.
pub fn bragg_deficit(
    high: PermittivityModel,
    low: PermittivityModel,
    n_pairs: usize,
    design_omega: f64,
    omega: f64,
) -> Result<(f64, f64)> {
    let stack = quarter_wave_stack(high, low, n_pairs, design_omega)?;
    let r = multilayer_reflection(&stack, Complex64::new(omega, 0.0), 0.0, Polarization::P)?;
    Ok((1.0 - r.re, r.norm()))
}

/// Index at which a decreasing sequence levels off: the first entry within
/// 25% of the final value, provided at least three entries from there on
/// stay within that band. `None` if the sequence is still falling.
pub fn saturation_onset(values: &[f64]) -> Option<usize> {
    let last = *values.last()?;
    let band = 1.25 * last.abs();
    let mut onset = values.len();
    for i in (0..values.len()).rev() {
        if values[i].abs() <= band && values[i].abs() >= last.abs() / 1.25 {
            onset = i;
        } else {
            break;
        }
    }
    (values.len() - onset >= 3).then_some(onset)
}
