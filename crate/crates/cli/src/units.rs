//! Command-line quantities with optional unit suffixes.

use std::ops::RangeInclusive;

use anyhow::{anyhow, bail, Result};

/// A length in metres. Accepts `m`, `mm`, `um` and `nm` suffixes.
pub fn parse_length(s: &str) -> Result<f64> {
    let t = s.trim();
    let (num, scale) = if let Some(v) = t.strip_suffix("nm") {
        (v, 1e-9)
    } else if let Some(v) = t.strip_suffix("um") {
        (v, 1e-6)
    } else if let Some(v) = t.strip_suffix("mm") {
        (v, 1e-3)
    } else if let Some(v) = t.strip_suffix('m') {
        (v, 1.0)
    } else {
        (t, 1.0)
    };
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| anyhow!("invalid length `{s}`"))?;
    if !v.is_finite() {
        bail!("invalid length `{s}`");
    }
    Ok(v * scale)
}

/// A temperature in kelvin, with or without a `K` suffix.
pub fn parse_temperature(s: &str) -> Result<f64> {
    let t = s.trim();
    let num = t.strip_suffix('K').unwrap_or(t);
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| anyhow!("invalid temperature `{s}`"))?;
    if !(v > 0.0 && v.is_finite()) {
        bail!("temperature must be > 0 K, got `{s}`");
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Width {
    Meters(f64),
    Resonance(u32),
}

/// A cavity width: a length, or `resonance:N` for N half-wavelengths.
pub fn parse_width(s: &str) -> Result<Width> {
    if let Some(v) = s.trim().strip_prefix("resonance:") {
        let nu: u32 = v
            .trim()
            .parse()
            .map_err(|_| anyhow!("invalid resonance order in `{s}`"))?;
        if nu == 0 {
            bail!("resonance order must be >= 1");
        }
        return Ok(Width::Resonance(nu));
    }
    let a = parse_length(s)?;
    if !(a > 0.0) {
        bail!("width must be > 0, got `{s}`");
    }
    Ok(Width::Meters(a))
}

/// `A..B` (inclusive), `A,B,C` or a single integer.
pub fn parse_int_list(s: &str) -> Result<Vec<u32>> {
    let t = s.trim();
    if let Some((lo, hi)) = t.split_once("..") {
        let lo: u32 = lo.trim().parse().map_err(|_| anyhow!("invalid range `{s}`"))?;
        let hi: u32 = hi.trim().parse().map_err(|_| anyhow!("invalid range `{s}`"))?;
        let r: RangeInclusive<u32> = lo..=hi;
        let out: Vec<u32> = r.collect();
        if out.is_empty() {
            bail!("range `{s}` is empty");
        }
        return Ok(out);
    }
    let out = t
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<u32>().map_err(|_| anyhow!("invalid integer `{p}`")))
        .collect::<Result<Vec<_>>>()?;
    if out.is_empty() {
        bail!("empty list");
    }
    Ok(out)
}

/// Comma-separated floats.
pub fn parse_float_list(s: &str) -> Result<Vec<f64>> {
    let out = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| anyhow!("invalid number `{p}`"))
        })
        .collect::<Result<Vec<_>>>()?;
    if out.is_empty() {
        bail!("empty list");
    }
    Ok(out)
}
