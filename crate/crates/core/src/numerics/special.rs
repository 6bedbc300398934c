//! Special functions with brute-force series oracles.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constants::{EULER_GAMMA, ZETA3};
use crate::error::{Error, Result};

/// Square root with non-negative imaginary part; a positive real radicand
/// gives the positive real root.
#[inline]
pub fn sqrt_upper(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// `exp(z) - 1` without cancellation for small |z|.
#[inline]
pub fn expm1_complex(z: Complex64) -> Complex64 {
    let ex = z.re.exp();
    let half = (0.5 * z.im).sin();
    Complex64::new(ex * (-2.0 * half * half) + z.re.exp_m1(), ex * z.im.sin())
}

fn zeta_even(m: u32) -> f64 {
    match m {
        2 => PI * PI / 6.0,
        4 => PI.powi(4) / 90.0,
        6 => PI.powi(6) / 945.0,
        8 => PI.powi(8) / 9450.0,
        _ => {
            let mut s = 0.0;
            for n in (1..=64u32).rev() {
                s += (n as f64).powi(-(m as i32));
            }
            s
        }
    }
}

fn zeta_positive(s: u32) -> f64 {
    match s {
        2 => PI * PI / 6.0,
        3 => ZETA3,
        _ => unreachable!("only ζ(2) and ζ(3) are needed"),
    }
}

/// Polylogarithm Li_s(z) = Σ_{k≥1} z^k / k^s for s ∈ {0, 1, 2, 3} and
/// |z| ≤ 1 (z ≠ 1 when s ≤ 1).
pub fn polylog(s: u32, z: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > 1.0 + 4.0 * f64::EPSILON {
        return Err(Error::domain(format!("polylog needs |z| <= 1, got {z}")));
    }
    match s {
        0 | 1 if z == one => Err(Error::domain(format!("Li_{s}(1) diverges"))),
        0 => Ok(z / (one - z)),
        1 => Ok(-(one - z).ln()),
        2 | 3 => {
            if z.norm() <= 0.5 {
                Ok(polylog_power_series(s, z))
            } else {
                Ok(polylog_log_series(s, z))
            }
        }
        _ => Err(Error::domain(format!("polylog order {s} not supported"))),
    }
}

fn polylog_power_series(s: u32, z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zk = z;
    for k in 1..200u32 {
        let term = zk / (k as f64).powi(s as i32);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
        zk *= z;
    }
    sum
}

// Expansion about z = 1 in μ = ln z, valid for |μ| < 2π:
// Li_s(e^μ) = Σ_{k≠s−1} ζ(s−k) μ^k/k! + μ^{s−1}/(s−1)! [H_{s−1} − ln(−μ)].
fn polylog_log_series(s: u32, z: Complex64) -> Complex64 {
    let mu = z.ln();
    if mu.norm() == 0.0 {
        return Complex64::new(zeta_positive(s), 0.0);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    let mut fact = 1.0;
    for k in 0..s - 1 {
        sum += pow * (zeta_positive(s - k) / fact);
        pow *= mu;
        fact *= (k + 1) as f64;
    }
    // k = s − 1
    let harmonic: f64 = (1..s).map(|i| 1.0 / i as f64).sum();
    sum += pow / fact * (Complex64::new(harmonic, 0.0) - (-mu).ln());
    // k = s: ζ(0) = −1/2
    pow *= mu;
    fact *= s as f64;
    sum += pow * (-0.5 / fact);
    // k = m + s − 1 for even m ≥ 2, ζ(1−m) = (−1)^{m/2} 2 (m−1)! ζ(m)/(2π)^m
    let mu2 = mu * mu;
    let mut pow_m = pow * mu; // μ^{s+1}
    let mut m = 2u32;
    loop {
        let denom: f64 = (0..s).map(|i| (m + i) as f64).product();
        let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign * 2.0 * zeta_even(m) / ((2.0 * PI).powi(m as i32) * denom);
        let term = pow_m * coeff;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() || m > 200 {
            break;
        }
        pow_m *= mu2;
        m += 2;
    }
    sum
}

/// Direct summation of Σ_{k=1}^{terms} z^k/k^s (oracle).
pub fn polylog_direct(s: u32, z: Complex64, terms: usize) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zk = Complex64::new(1.0, 0.0);
    for k in 1..=terms {
        zk *= z;
        sum += zk / (k as f64).powi(s as i32);
    }
    sum
}

/// Digamma function ψ(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("digamma needs x > 0, got {x}")));
    }
    let mut shift = 0.0;
    let mut y = x;
    while y < 12.0 {
        shift -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let tail = inv2
        * (-1.0 / 12.0
            + inv2
                * (1.0 / 120.0
                    + inv2
                        * (-1.0 / 252.0
                            + inv2
                                * (1.0 / 240.0
                                    + inv2 * (-1.0 / 132.0 + inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(shift + y.ln() - 0.5 / y + tail)
}

/// Slow series ψ(x) = −γ + Σ_n (1/(n+1) − 1/(n+x)) with a logarithmic tail
/// estimate (oracle).
pub fn digamma_series(x: f64, terms: usize) -> f64 {
    let mut sum = 0.0;
    for n in (0..terms).rev() {
        let n = n as f64;
        sum += 1.0 / (n + 1.0) - 1.0 / (n + x);
    }
    let big = terms as f64;
    let tail = ((big + x - 0.5) / (big + 0.5)).ln();
    -EULER_GAMMA + sum + tail
}

/// Hurwitz zeta function ζ(3, b) = Σ_{j≥0} (j+b)^{-3} for b > 0.
pub fn hurwitz_zeta3(b: f64) -> Result<f64> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::domain(format!("hurwitz_zeta3 needs b > 0, got {b}")));
    }
    const N: usize = 12;
    let mut head = 0.0;
    for j in (0..N).rev() {
        head += (j as f64 + b).powi(-3);
    }
    // Euler–Maclaurin remainder at x = N + b: Σ B_{2k}(2k+1)/2 · x^{−2k−2}.
    const B2K: [f64; 6] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
    ];
    let x = N as f64 + b;
    let inv2 = 1.0 / (x * x);
    let mut tail = 0.5 * inv2 + 0.5 * inv2 / x;
    let mut p = inv2 * inv2;
    for (k, bk) in B2K.iter().enumerate() {
        tail += bk * (2 * k + 3) as f64 * 0.5 * p;
        p *= inv2;
    }
    Ok(head + tail)
}

/// Direct summation of ζ(3, b) with a midpoint-integral tail (oracle).
pub fn hurwitz_zeta3_direct(b: f64, terms: usize) -> f64 {
    let mut sum = 0.0;
    for j in (0..terms).rev() {
        sum += (j as f64 + b).powi(-3);
    }
    let x = terms as f64 + b - 0.5;
    sum + 0.5 / (x * x)
}

/// Σ_{j≥0} r^{2j}/(j+b) for b > 0 and 0 ≤ r < 1.
///
/// For r² > 0.9 the sum is evaluated through the logarithmic connection
/// formula of the hypergeometric function F(1, b; 1+b; r²), an expansion in
/// powers of 1 − r² whose leading term is −ln(1−r²) − γ − ψ(b).
pub fn shifted_geometric_sum(b: f64, r: f64) -> Result<f64> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::domain(format!("shifted_geometric_sum needs b > 0, got {b}")));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain(format!(
            "shifted_geometric_sum needs 0 <= r < 1, got {r}"
        )));
    }
    let z = r * r;
    if z <= 0.9 {
        let mut sum = 0.0;
        let mut zj = 1.0;
        let mut j = 0.0;
        loop {
            let term = zj / (j + b);
            sum += term;
            if term <= 1e-17 * sum {
                break;
            }
            zj *= z;
            j += 1.0;
        }
        return Ok(sum);
    }
    let w = (1.0 - r) * (1.0 + r);
    let log_w = w.ln();
    let mut coeff = 1.0; // (b)_n / n!
    let mut psi_diff = -EULER_GAMMA - digamma(b)?; // ψ(n+1) − ψ(b+n)
    let mut wn = 1.0;
    let mut sum = 0.0;
    let mut small = 0;
    for n in 0..2000 {
        let nf = n as f64;
        let term = coeff * (psi_diff - log_w) * wn;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            small += 1;
            if small == 2 {
                break;
            }
        } else {
            small = 0;
        }
        psi_diff += 1.0 / (nf + 1.0) - 1.0 / (b + nf);
        coeff *= (b + nf) / (nf + 1.0);
        wn *= w;
    }
    Ok(sum)
}

/// Direct summation of Σ_{j<terms} r^{2j}/(j+b) (oracle).
pub fn shifted_geometric_sum_direct(b: f64, r: f64, terms: usize) -> f64 {
    let z = r * r;
    let mut sum = 0.0;
    let mut zj = 1.0;
    for j in 0..terms {
        sum += zj / (j as f64 + b);
        zj *= z;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn sqrt_branch() {
        assert_eq!(sqrt_upper(Complex64::new(4.0, 0.0)), Complex64::new(2.0, 0.0));
        let s = sqrt_upper(Complex64::new(-4.0, -0.0));
        assert!(s.im > 0.0 && (s.im - 2.0).abs() < 1e-15);
        let s = sqrt_upper(Complex64::new(1.0, -1e-3));
        assert!(s.im >= 0.0);
    }

    #[test]
    fn expm1_small_argument() {
        let z = Complex64::new(1e-12, -3e-13);
        let e = expm1_complex(z);
        assert!((e - z).norm() < 1e-24);
        let z = Complex64::new(0.3, 2.0);
        assert!((expm1_complex(z) - (z.exp() - 1.0)).norm() < 1e-15);
    }

    #[test]
    fn polylog_examples() {
        let li1 = polylog(1, Complex64::new(0.5, 0.0)).unwrap();
        assert!(close(li1.re, 2f64.ln(), 1e-15));
        for s in 0..4 {
            assert_eq!(polylog(s, Complex64::new(0.0, 0.0)).unwrap().norm(), 0.0);
        }
        let li2 = polylog(2, Complex64::new(1.0, 0.0)).unwrap();
        assert!(close(li2.re, PI * PI / 6.0, 1e-15));
        let li3 = polylog(3, Complex64::new(-1.0, 0.0)).unwrap();
        assert!(close(li3.re, -0.75 * ZETA3, 1e-14));
        assert!(polylog(1, Complex64::new(1.0, 0.0)).is_err());
        assert!(polylog(2, Complex64::new(1.2, 0.0)).is_err());
    }

    #[test]
    fn polylog_branch_switch_is_continuous() {
        for &s in &[2u32, 3] {
            for k in 0..16 {
                let th = k as f64 * PI / 8.0;
                let z_in = Complex64::from_polar(0.5 - 1e-16, th);
                let z_out = Complex64::from_polar(0.5 + 1e-16, th);
                let a = polylog(s, z_in).unwrap();
                let b = polylog(s, z_out).unwrap();
                assert!((a - b).norm() < 1e-12 * a.norm(), "s={s} θ={th}");
            }
        }
    }

    #[test]
    fn polylog_against_direct_sum() {
        for &s in &[2u32, 3] {
            for &z in &[
                Complex64::new(0.7, 0.0),
                Complex64::new(-0.9, 0.1),
                Complex64::new(0.3, 0.8),
                Complex64::from_polar(0.95, 2.0),
            ] {
                let fast = polylog(s, z).unwrap();
                let slow = polylog_direct(s, z, 2000);
                assert!((fast - slow).norm() < 1e-12 * slow.norm(), "s={s} z={z}");
            }
        }
    }

    #[test]
    fn digamma_values() {
        assert!(close(digamma(1.0).unwrap(), -EULER_GAMMA, 1e-14));
        assert!(close(digamma(0.5).unwrap(), -EULER_GAMMA - 2.0 * 2f64.ln(), 1e-14));
        for &x in &[0.01, 0.3, 1.7, 5.5, 40.0] {
            let d = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
            assert!((d - 1.0 / x).abs() < 1e-12 * (1.0 / x).max(1.0));
        }
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.5).is_err());
    }

    #[test]
    fn digamma_against_series() {
        for &x in &[0.25, 0.5, 1.0, 2.5, 7.0] {
            let fast = digamma(x).unwrap();
            let slow = digamma_series(x, 200_000);
            assert!((fast - slow).abs() < 1e-10, "x = {x}: {fast} vs {slow}");
        }
    }

    #[test]
    fn hurwitz_values() {
        assert!(close(hurwitz_zeta3(0.5).unwrap(), 7.0 * ZETA3, 1e-13));
        assert!(close(hurwitz_zeta3(1.0).unwrap(), ZETA3, 1e-13));
        for &b in &[0.1, 0.75, 3.0, 9.9] {
            let d = hurwitz_zeta3(b).unwrap() - hurwitz_zeta3(b + 1.0).unwrap();
            assert!(close(d, b.powi(-3), 1e-12));
        }
        assert!(hurwitz_zeta3(0.0).is_err());
    }

    #[test]
    fn shifted_geometric_examples() {
        let r = 0.9;
        let v = shifted_geometric_sum(0.5, r).unwrap();
        assert!(close(v, (1.0 / r) * ((1.0 + r) / (1.0 - r)).ln(), 1e-13));
        assert!(close(shifted_geometric_sum(2.5, 0.0).unwrap(), 0.4, 1e-15));
        assert!(shifted_geometric_sum(1.0, 1.0).is_err());
        assert!(shifted_geometric_sum(0.0, 0.5).is_err());
    }

    #[test]
    fn shifted_geometric_half_closed_form_near_one() {
        for &d in &[1e-2, 1e-4, 1e-7, 1e-10] {
            let r: f64 = 1.0 - d;
            let d = 1.0 - r;
            let v = shifted_geometric_sum(0.5, r).unwrap();
            let exact = (1.0 / r) * ((1.0 + r).ln() - d.ln());
            assert!(close(v, exact, 1e-13), "δ = {d}");
        }
    }

    #[test]
    fn shifted_geometric_across_switch() {
        for &b in &[0.2, 1.0, 1.5, 4.0] {
            let r = 0.9f64.sqrt();
            let lo = shifted_geometric_sum(b, r * (1.0 - 1e-15)).unwrap();
            let hi = shifted_geometric_sum(b, r * (1.0 + 1e-15)).unwrap();
            assert!(close(lo, hi, 1e-12), "b = {b}");
            let slow = shifted_geometric_sum_direct(b, 0.97, 4000);
            assert!(close(shifted_geometric_sum(b, 0.97).unwrap(), slow, 1e-12));
        }
    }
}
