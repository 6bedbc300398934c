//! Closed forms and scaling laws for cavities with frequency-independent
//! reflectivity.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{EPSILON_0, EULER_GAMMA, ZETA3};
use crate::error::{Error, Result};
use crate::numerics::{adaptive_integrate_breaks, digamma, hurwitz_zeta3, QuadratureSpec};

/// Series terms are dropped once r^{2j} falls below this.
const SERIES_CUTOFF: f64 = 1e-16;

/// A cavity with constant real reflectivity `r`, tuned to the ν-th resonance
/// of a transition of wavelength λ, so a = νλ/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantRCavity {
    pub r: f64,
    pub nu: u32,
    pub wavelength: f64,
}

impl ConstantRCavity {
    pub fn new(r: f64, nu: u32, wavelength: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::domain(format!("reflectivity must lie in (0, 1), got {r}")));
        }
        if nu == 0 {
            return Err(Error::domain("resonance order must be >= 1"));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::domain(format!("wavelength must be > 0, got {wavelength}")));
        }
        Ok(ConstantRCavity { r, nu, wavelength })
    }

    pub fn width(&self) -> f64 {
        0.5 * self.nu as f64 * self.wavelength
    }

    pub fn delta(&self) -> f64 {
        1.0 - self.r
    }

    fn check_phi(&self, phi: f64) -> Result<()> {
        if !(-0.5..=0.5).contains(&phi) {
            return Err(Error::domain(format!("position φ = z/a must lie in [-1/2, 1/2], got {phi}")));
        }
        Ok(())
    }
}

/// Compensated (Neumaier) running sum.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// y(p) = [2(cos q − 1) − q² cos q + 2q sin q]/p³ with q = 2πνp, given the
/// precomputed cos q and sin q.
fn y_term(p: f64, nu: f64, cos_q: f64, sin_q: f64) -> f64 {
    let q = 2.0 * PI * nu * p;
    if q.abs() < 0.5 {
        // Taylor series in q; the q² terms cancel, leaving Σ c_k q^{2k}/p³.
        let w = 2.0 * PI * nu;
        let q2 = q * q;
        let mut sum = 0.0;
        let mut pow = w.powi(4) * p;
        let mut f2k = 24.0; // (2k)!
        for k in 2..14 {
            let kf = k as f64;
            let f2k2 = f2k / ((2.0 * kf) * (2.0 * kf - 1.0)); // (2k−2)!
            let f2k1 = f2k / (2.0 * kf); // (2k−1)!
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * (2.0 / f2k + 1.0 / f2k2 - 2.0 / f2k1) * pow;
            pow *= q2;
            f2k *= (2.0 * kf + 1.0) * (2.0 * kf + 2.0);
        }
        return sum;
    }
    (2.0 * (cos_q - 1.0) - q * q * cos_q + 2.0 * q * sin_q) / p.powi(3)
}

/// I(φ) by its image-series expansion; U_pr = n(ω)d²/(3ε₀) · I(φ).
pub fn i_phi_series(cfg: &ConstantRCavity, phi: f64) -> Result<f64> {
    cfg.check_phi(phi)?;
    let nu = cfg.nu as f64;
    let r2 = cfg.r * cfg.r;
    // cos(2πν(j + ½ ± φ)) does not depend on j.
    let (sp, cp) = (PI * nu * (1.0 + 2.0 * phi)).sin_cos();
    let (sm, cm) = (PI * nu * (1.0 - 2.0 * phi)).sin_cos();
    let mut acc = Neumaier::default();
    let mut weight = 1.0;
    let mut j = 0.0;
    while weight >= SERIES_CUTOFF {
        let term = y_term(j + 0.5 + phi, nu, cp, sp) + y_term(j + 0.5 - phi, nu, cm, sm);
        acc.add(weight * term);
        weight *= r2;
        j += 1.0;
    }
    Ok(cfg.r / (2.0 * PI * nu.powi(3) * cfg.wavelength.powi(3)) * acc.value())
}

/// I(φ) by adaptive quadrature of
/// (r/8πa³) Im ∫₀^{2πν} x² e^{ix/2} cos(φx)/(1 − r²e^{ix}) dx.
pub fn i_phi_quadrature(cfg: &ConstantRCavity, phi: f64, spec: &QuadratureSpec) -> Result<f64> {
    cfg.check_phi(phi)?;
    let r2 = cfg.r * cfg.r;
    let top = 2.0 * PI * cfg.nu as f64;
    // Near-poles at x = 2πm have width ~ 1 − r².
    let w = (1.0 - r2).max(1e-12);
    let mut breaks = vec![0.0, top];
    for m in 0..=cfg.nu {
        let c = 2.0 * PI * m as f64;
        for k in 0..6 {
            let h = w * 10f64.powi(k);
            if h < 1.0 {
                breaks.push(c - h);
                breaks.push(c + h);
            }
        }
    }
    breaks.retain(|x| *x >= 0.0 && *x <= top);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let f = |x: f64| {
        let e = Complex64::from_polar(1.0, x);
        let num = Complex64::from_polar(x * x * (phi * x).cos(), 0.5 * x);
        num / (1.0 - r2 * e)
    };
    let v = adaptive_integrate_breaks(f, &breaks, spec)?;
    let a = cfg.width();
    Ok(cfg.r / (8.0 * PI * a.powi(3)) * v.value.im)
}

/// I(½) = π(r + 1/r)/(4a³) · ln(1 − r²) for ν = 1.
pub fn i_half_closed(r: f64, a: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain(format!("reflectivity must lie in (0, 1), got {r}")));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("width must be > 0, got {a}")));
    }
    let one_minus_r2 = (1.0 - r) * (1.0 + r);
    Ok(PI * (r + 1.0 / r) / (4.0 * a.powi(3)) * one_minus_r2.ln())
}

/// Small-δ form of U_pr(0) − U_pr(a/2) for ν = 1, with `coupling` = n(ω)d².
pub fn depth_nu1_asym(coupling: f64, delta: f64, a: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("width must be > 0, got {a}")));
    }
    let c = 7.0 * ZETA3 / (2.0 * PI * PI);
    Ok(-PI * coupling / (3.0 * EPSILON_0 * a.powi(3)) * (delta.ln() + c))
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("δ = 1 − r must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

fn check_nu(nu: u32) -> Result<()> {
    if nu < 2 {
        return Err(Error::domain(format!("well depths need ν >= 2, got {nu}")));
    }
    Ok(())
}

/// The digamma/Hurwitz-zeta expression for the depth offset as it is
/// usually written:
/// ln 2 + γ + ¼[ψ(1−3/2ν) + ψ(3/2ν) + ψ(1−1/ν) + ψ(1/ν)]
/// + [ζ(3, 1−3/2ν) + ζ(3, 3/2ν)]/(4π²ν²).
///
/// This is the value the numerical depth extraction reproduces.
pub fn phi_nu_printed(nu: u32) -> Result<f64> {
    check_nu(nu)?;
    let n = nu as f64;
    let a = 1.0 - 1.5 / n;
    let b = 1.5 / n;
    let psi = digamma(a)? + digamma(b)? + digamma(1.0 - 1.0 / n)? + digamma(1.0 / n)?;
    let zeta = hurwitz_zeta3(a)? + hurwitz_zeta3(b)?;
    Ok(LN_2 + EULER_GAMMA + 0.25 * psi + zeta / (4.0 * PI * PI * n * n))
}

/// [`phi_nu_printed`] plus ν/(4(ν−1)): the tabulated values
/// φ(2) = −0.1134…, φ(3) = −0.4016…, φ(4) = −0.7384…, which are the ones
/// consistent with the large-ν intercept ln 2 + ¼.
pub fn phi_nu(nu: u32) -> Result<f64> {
    let n = nu as f64;
    Ok(phi_nu_printed(nu)? + n / (4.0 * (n - 1.0)))
}

pub fn phi_asymptote_slope() -> f64 {
    -(5.0 / 12.0 - 2.0 / (27.0 * PI * PI))
}

pub fn phi_asymptote_intercept() -> f64 {
    LN_2 + 0.25
}

/// Large-ν behaviour of [`phi_nu`].
pub fn phi_asymptote(nu: u32) -> Result<f64> {
    check_nu(nu)?;
    Ok(phi_asymptote_slope() * nu as f64 + phi_asymptote_intercept())
}

/// Small-δ well depth ΔU_ν = U_pr(max) − U_pr(min) at constant reflectivity,
/// with `coupling` = n(ω)d². Uses [`phi_nu_printed`], which is what the
/// exact series converges to.
pub fn depth_scaling(nu: u32, delta: f64, wavelength: f64, coupling: f64) -> Result<f64> {
    check_delta(delta)?;
    let phi = phi_nu_printed(nu)?;
    Ok(coupling / (3.0 * EPSILON_0) * 8.0 * PI / (nu as f64 * wavelength.powi(3)) * (delta.ln() + phi).abs())
}

/// Exact constant-r well depth from the image series:
/// n(ω)d²/(3ε₀) · [I(½ − 3/2ν) − I(½ − 1/ν)].
pub fn depth_series(cfg: &ConstantRCavity, coupling: f64) -> Result<f64> {
    check_nu(cfg.nu)?;
    let n = cfg.nu as f64;
    let hi = i_phi_series(cfg, 0.5 - 1.5 / n)?;
    let lo = i_phi_series(cfg, 0.5 - 1.0 / n)?;
    Ok(coupling / (3.0 * EPSILON_0) * (hi - lo))
}

/// Depth rescaled so that it reads −ln δ − φ(ν) for small δ.
pub fn scaled_depth(cfg: &ConstantRCavity) -> Result<f64> {
    let n = cfg.nu as f64;
    Ok(depth_series(cfg, 3.0 * EPSILON_0)? * n * cfg.wavelength.powi(3) / (8.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_term_branches_agree() {
        for &p in &[0.01, 0.03, 0.05] {
            let q = 2.0 * PI * 2.0 * p;
            let series = y_term(p, 2.0, q.cos(), q.sin());
            let direct = (2.0 * (q.cos() - 1.0) - q * q * q.cos() + 2.0 * q * q.sin()) / p.powi(3);
            assert!((series - direct).abs() <= 1e-9 * direct.abs(), "{p}");
        }
    }

    #[test]
    fn phi_table() {
        let expect = [(2, -0.1134423724), (3, -0.4015949503), (4, -0.7384479470)];
        for (nu, v) in expect {
            assert!((phi_nu(nu).unwrap() - v).abs() < 1e-9, "{nu}");
        }
        let printed = [(2, -0.613442372022), (3, -0.776594949966), (4, -1.071781280586)];
        for (nu, v) in printed {
            assert!((phi_nu_printed(nu).unwrap() - v).abs() < 1e-9, "{nu}");
        }
        assert!(phi_nu(1).is_err());
    }

    #[test]
    fn asymptote_constants() {
        assert!((phi_asymptote_slope() + 0.4091613938).abs() < 1e-10);
        assert!((phi_asymptote_intercept() - 0.9431471806).abs() < 1e-10);
        let (a, p) = (phi_asymptote(4).unwrap(), phi_nu(4).unwrap());
        assert!(((a - p) / p).abs() < 0.07);
    }

    #[test]
    fn half_closed_value() {
        let v = i_half_closed(0.9, 1.0).unwrap();
        let expect = PI * (0.9 + 1.0 / 0.9) / 4.0 * 0.19f64.ln();
        assert!((v - expect).abs() < 1e-14);
        assert!(i_half_closed(1.0, 1.0).is_err());
    }

    #[test]
    fn nu1_asym_scaling() {
        let d1 = depth_nu1_asym(1e-40, 1e-4, 1e-4).unwrap();
        let d2 = depth_nu1_asym(1e-40, 1e-4, 2e-4).unwrap();
        assert!((d1 / d2 - 8.0).abs() < 1e-12);
        assert!(d1 > 0.0);
    }
}
