//! Thermal Casimir–Polder potential components, well depths and heating
//! rates.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{C, EPSILON_0, HBAR, MU_0};
use crate::error::{Error, Result};
use crate::greens::{cavity_trace_propagating, CavityGeometry, Geometry};
use crate::materials::MirrorSpec;
use crate::molecules::{
    matsubara_frequency, photon_number, polarizability_imag, Molecule, ThermalEnvironment, Transition,
};
use crate::numerics::{golden_section, Extremum, Goal, QuadratureSpec};

/// Matsubara terms below this fraction of the running sum count as negligible.
const MATSUBARA_TOL: f64 = 1e-12;
const MAX_MATSUBARA: u32 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialComponents {
    pub z: f64,
    pub nonresonant: f64,
    pub propagating: f64,
    pub evanescent: f64,
    pub total: f64,
}

impl PotentialComponents {
    pub fn new(z: f64, nonresonant: f64, propagating: f64, evanescent: f64) -> Self {
        PotentialComponents {
            z,
            nonresonant,
            propagating,
            evanescent,
            total: nonresonant + propagating + evanescent,
        }
    }

    /// Components relative to `reference`, each shifted separately.
    pub fn relative_to(&self, reference: &PotentialComponents) -> Self {
        PotentialComponents::new(
            self.z,
            self.nonresonant - reference.nonresonant,
            self.propagating - reference.propagating,
            self.evanescent - reference.evanescent,
        )
    }
}

/// Sums Matsubara terms `term(j)` for j ≥ 1 plus `first` until two
/// consecutive terms are negligible.
fn matsubara_sum<F>(first: f64, mut term: F) -> Result<f64>
where
    F: FnMut(u32) -> Result<f64>,
{
    let mut sum = first;
    let mut quiet = 0;
    for j in 1..=MAX_MATSUBARA {
        let t = term(j)?;
        sum += t;
        if t.abs() <= MATSUBARA_TOL * sum.abs() {
            quiet += 1;
            if quiet == 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Convergence {
        estimate: sum.into(),
        error: f64::NAN,
        subdivisions: MAX_MATSUBARA as usize,
    })
}

/// Non-resonant potential for a polarizability `alpha(ξ)`.
fn nonresonant_with<A>(
    z: f64,
    alpha: A,
    geom: &Geometry,
    env: &ThermalEnvironment,
    spec: &QuadratureSpec,
) -> Result<f64>
where
    A: Fn(f64) -> f64,
{
    geom.check_position(z)?;
    // ξ² Tr G(iξ) → −lim ω² Tr G(ω) as ξ → 0.
    let first = -0.5 * alpha(0.0) * geom.zero_frequency_limit(z, spec)?;
    let sum = matsubara_sum(first, |j| {
        let xi = matsubara_frequency(j, env);
        Ok(xi * xi * alpha(xi) * geom.trace_imagfreq(z, xi, spec)?)
    })?;
    Ok(MU_0 * env.thermal_energy() * sum)
}

/// U_nr(z): the Matsubara sum over imaginary frequencies.
pub fn nonresonant_potential(
    z: f64,
    mol: &Molecule,
    geom: &Geometry,
    env: &ThermalEnvironment,
    spec: &QuadratureSpec,
) -> Result<f64> {
    nonresonant_with(z, |xi| polarizability_imag(mol, xi), geom, env, spec)
}

/// (U_pr, U_ev): the thermally driven resonant contributions.
pub fn resonant_potential(
    z: f64,
    mol: &Molecule,
    geom: &Geometry,
    env: &ThermalEnvironment,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    geom.check_position(z)?;
    let (mut pr, mut ev) = (0.0, 0.0);
    for t in &mol.transitions {
        let w = resonant_weight(t, env);
        let g = geom.trace_realfreq(z, t.omega, spec)?;
        pr += w * g.propagating.re;
        ev += w * g.evanescent.re;
    }
    Ok((pr, ev))
}

fn resonant_weight(t: &Transition, env: &ThermalEnvironment) -> f64 {
    MU_0 / 3.0 * t.omega * t.omega * photon_number(t.omega, env) * t.d_squared
}

/// U_pr(z) alone. In a cavity it is also defined on the walls |z| = a/2.
pub fn propagating_potential(
    z: f64,
    mol: &Molecule,
    geom: &Geometry,
    env: &ThermalEnvironment,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let mut pr = 0.0;
    for t in &mol.transitions {
        let g = match geom {
            Geometry::Cavity(c) => cavity_trace_propagating(z, t.omega, c, spec)?,
            Geometry::Plate(_) => geom.trace_realfreq(z, t.omega, spec)?.propagating,
        };
        pr += resonant_weight(t, env) * g.re;
    }
    Ok(pr)
}

/// All three components at `z` (position-independent terms dropped).
pub fn potential_components(
    z: f64,
    mol: &Molecule,
    geom: &Geometry,
    env: &ThermalEnvironment,
    spec: &QuadratureSpec,
) -> Result<PotentialComponents> {
    let nr = nonresonant_potential(z, mol, geom, env, spec)?;
    let (pr, ev) = resonant_potential(z, mol, geom, env, spec)?;
    Ok(PotentialComponents::new(z, nr, pr, ev))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileShift {
    /// Constant-dropped values as computed.
    Raw,
    /// Every component shifted to vanish at the cavity centre.
    Centre,
}

/// Potential components on a grid of positions, evaluated in parallel and
/// returned in input order.
pub fn potential_profile(
    zs: &[f64],
    mol: &Molecule,
    geom: &Geometry,
    env: &ThermalEnvironment,
    spec: &QuadratureSpec,
    shift: ProfileShift,
) -> Result<Vec<PotentialComponents>> {
    let rows: Vec<PotentialComponents> = zs
        .par_iter()
        .map(|&z| potential_components(z, mol, geom, env, spec))
        .collect::<Result<_>>()?;
    match (shift, geom) {
        (ProfileShift::Raw, _) => Ok(rows),
        (ProfileShift::Centre, Geometry::Cavity(_)) => {
            let centre = potential_components(0.0, mol, geom, env, spec)?;
            Ok(rows.iter().map(|r| r.relative_to(&centre)).collect())
        }
        (ProfileShift::Centre, Geometry::Plate(_)) => Err(Error::domain(
            "a single plate has no centre; request raw values",
        )),
    }
}

/// Energy levels (angular frequencies) and symmetric squared dipole matrix
/// elements d²_nk of a molecule in an arbitrary incoherent state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelScheme {
    pub frequencies: Vec<f64>,
    pub d_squared: Vec<Vec<f64>>,
}

impl LevelScheme {
    pub fn new(frequencies: Vec<f64>, d_squared: Vec<Vec<f64>>) -> Result<Self> {
        let n = frequencies.len();
        if n < 2 {
            return Err(Error::domain("a level scheme needs at least two levels"));
        }
        if d_squared.len() != n || d_squared.iter().any(|row| row.len() != n) {
            return Err(Error::domain("dipole matrix must be square and match the level count"));
        }
        for i in 0..n {
            if !frequencies[i].is_finite() {
                return Err(Error::domain("level frequencies must be finite"));
            }
            for k in 0..n {
                let d = d_squared[i][k];
                if !(d >= 0.0 && d.is_finite()) || d != d_squared[k][i] {
                    return Err(Error::domain("dipole matrix must be symmetric and non-negative"));
                }
                if i != k && d > 0.0 && frequencies[i] == frequencies[k] {
                    return Err(Error::domain("degenerate levels cannot be dipole coupled"));
                }
            }
        }
        Ok(LevelScheme {
            frequencies,
            d_squared,
        })
    }

    /// Ground state at frequency 0 plus one upper level per transition.
    pub fn from_molecule(mol: &Molecule) -> Self {
        let n = mol.transitions.len() + 1;
        let mut frequencies = vec![0.0; n];
        let mut d = vec![vec![0.0; n]; n];
        for (k, t) in mol.transitions.iter().enumerate() {
            frequencies[k + 1] = t.omega;
            d[0][k + 1] = t.d_squared;
            d[k + 1][0] = t.d_squared;
        }
        LevelScheme {
            frequencies,
            d_squared: d,
        }
    }

    fn len(&self) -> usize {
        self.frequencies.len()
    }

    /// α_n(iξ) = (2/3ħ) Σ_k d²_nk ω_kn/(ω_kn² + ξ²).
    pub fn polarizability(&self, n: usize, xi: f64) -> f64 {
        let mut sum = 0.0;
        for k in 0..self.len() {
            let d = self.d_squared[n][k];
            if k == n || d == 0.0 {
                continue;
            }
            let w = self.frequencies[k] - self.frequencies[n];
            sum += d * w / (w * w + xi * xi);
        }
        2.0 * sum / (3.0 * HBAR)
    }
}

/// Potential of a molecule with level populations `populations`.
///
/// Each state n contributes its non-resonant term with α_n and resonant terms
/// weighted by n(ω_kn) for absorption (k above n) and −[n(ω_nk) + 1] for
/// emission (k below n).
pub fn general_state_potential(
    z: f64,
    levels: &LevelScheme,
    populations: &[f64],
    geom: &Geometry,
    env: &ThermalEnvironment,
    spec: &QuadratureSpec,
) -> Result<PotentialComponents> {
    if populations.len() != levels.len() {
        return Err(Error::domain("one population per level is required"));
    }
    if populations.iter().any(|p| !(*p >= 0.0)) {
        return Err(Error::domain("populations must be non-negative"));
    }
    let total: f64 = populations.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!("populations must sum to 1, got {total}")));
    }
    geom.check_position(z)?;

    let alpha = |xi: f64| {
        let mut a = 0.0;
        for (n, p) in populations.iter().enumerate() {
            if *p > 0.0 {
                a += p * levels.polarizability(n, xi);
            }
        }
        a
    };
    let nr = nonresonant_with(z, alpha, geom, env, spec)?;

    let mut weights: Vec<(f64, f64)> = Vec::new();
    for (n, p) in populations.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        for k in 0..levels.len() {
            let d = levels.d_squared[n][k];
            if k == n || d == 0.0 {
                continue;
            }
            let w = levels.frequencies[k] - levels.frequencies[n];
            let occupation = if w > 0.0 {
                photon_number(w, env)
            } else {
                -(photon_number(-w, env) + 1.0)
            };
            let freq = w.abs();
            let weight = p * MU_0 / 3.0 * freq * freq * d * occupation;
            match weights.iter_mut().find(|(f, _)| *f == freq) {
                Some(entry) => entry.1 += weight,
                None => weights.push((freq, weight)),
            }
        }
    }
    weights.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut pr, mut ev) = (0.0, 0.0);
    for (freq, weight) in weights {
        if weight == 0.0 {
            continue;
        }
        let g = geom.trace_realfreq(z, freq, spec)?;
        pr += weight * g.propagating.re;
        ev += weight * g.evanescent.re;
    }
    Ok(PotentialComponents::new(z, nr, pr, ev))
}

/// Cavity width a = νπc/ω at which the transition is resonant with the ν-th
/// cavity mode.
pub fn resonance_width(transition: &Transition, nu: u32) -> Result<f64> {
    if nu == 0 {
        return Err(Error::domain("resonance order must be >= 1"));
    }
    Ok(nu as f64 * PI * C / transition.omega)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DepthTarget {
    /// U_pr only.
    Propagating,
    /// U_nr + U_pr + U_ev, restricted to |z| ≤ a/2 − a/1000.
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DepthKind {
    /// Deepest minimum against the lower of its two neighbouring maxima.
    WellDepth,
    /// ν = 1: central maximum against the wall value.
    PeakHeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthOptions {
    pub target: DepthTarget,
    /// Index into the molecule's transitions that sets the resonance.
    pub transition: usize,
}

impl Default for DepthOptions {
    fn default() -> Self {
        DepthOptions {
            target: DepthTarget::Propagating,
            transition: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremumReport {
    pub nu: u32,
    pub width: f64,
    pub maxima: Vec<Extremum>,
    pub minima: Vec<Extremum>,
    pub depth: f64,
    pub kind: DepthKind,
    pub deepest_minimum: Option<Extremum>,
    /// The maximum (or wall point) the depth is measured against.
    pub reference: Extremum,
}

/// Extrema and well depth of the potential in a cavity tuned to the ν-th
/// resonance of the molecule's primary transition.
pub fn potential_depth(
    mol: &Molecule,
    mirror: &MirrorSpec,
    nu: u32,
    env: &ThermalEnvironment,
    spec: &QuadratureSpec,
) -> Result<ExtremumReport> {
    potential_depth_with(mol, mirror, nu, env, spec, DepthOptions::default())
}

pub fn potential_depth_with(
    mol: &Molecule,
    mirror: &MirrorSpec,
    nu: u32,
    env: &ThermalEnvironment,
    spec: &QuadratureSpec,
    opts: DepthOptions,
) -> Result<ExtremumReport> {
    let t = mol
        .transitions
        .get(opts.transition)
        .ok_or_else(|| Error::domain(format!("molecule has no transition {}", opts.transition)))?;
    let a = resonance_width(t, nu)?;
    let lambda = t.wavelength();
    let geom = Geometry::Cavity(CavityGeometry::new(a, mirror.clone())?);
    let limit = match opts.target {
        DepthTarget::Propagating => 0.5 * a,
        DepthTarget::Total => 0.5 * a - a / 1000.0,
    };
    let f = |z: f64| -> Result<f64> {
        match opts.target {
            DepthTarget::Propagating => propagating_potential(z, mol, &geom, env, spec),
            DepthTarget::Total => Ok(potential_components(z, mol, &geom, env, spec)?.total),
        }
    };
    let tol = 1e-6 * a;
    let refine = |seed: f64, goal: Goal| -> Result<Extremum> {
        if seed == 0.0 {
            // The centre is an extremum by symmetry.
            return Ok(Extremum { x: 0.0, value: f(0.0)? });
        }
        let lo = (seed - lambda / 8.0).max(-limit);
        let hi = (seed + lambda / 8.0).min(limit);
        golden_section(&f, lo, hi, tol, goal).map_err(|e| match e {
            Error::ExtremumNotFound(_) => Error::ExtremumNotFound(seed),
            other => other,
        })
    };
    // Grid z = −νλ/4 + μλ/4: odd μ are maxima, even μ minima. The potential
    // is even in z, so only the left half is refined.
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    for mu in 1..(2 * nu) {
        let seed = -(nu as f64) * lambda / 4.0 + mu as f64 * lambda / 4.0;
        if seed > 1e-9 * a {
            break;
        }
        let seed = if seed.abs() <= 1e-9 * a { 0.0 } else { seed };
        if mu % 2 == 1 {
            maxima.push(refine(seed, Goal::Maximize)?);
        } else {
            minima.push(refine(seed, Goal::Minimize)?);
        }
    }
    let mirror_half = |v: &mut Vec<Extremum>| {
        let right: Vec<Extremum> = v
            .iter()
            .rev()
            .filter(|e| e.x != 0.0)
            .map(|e| Extremum { x: -e.x, value: e.value })
            .collect();
        v.extend(right);
    };
    mirror_half(&mut maxima);
    mirror_half(&mut minima);

    if nu == 1 {
        let wall = Extremum {
            x: limit,
            value: f(limit)?,
        };
        let peak = maxima[0];
        return Ok(ExtremumReport {
            nu,
            width: a,
            depth: peak.value - wall.value,
            maxima,
            minima,
            kind: DepthKind::PeakHeight,
            deepest_minimum: None,
            reference: wall,
        });
    }
    let mut best: Option<(f64, Extremum, Extremum)> = None;
    for (i, m) in minima.iter().enumerate() {
        let (l, r) = (maxima[i], maxima[i + 1]);
        let lower = if l.value <= r.value { l } else { r };
        let depth = lower.value - m.value;
        if best.as_ref().map_or(true, |b| depth > b.0) {
            best = Some((depth, *m, lower));
        }
    }
    let (depth, well, reference) = best.expect("ν ≥ 2 has at least one minimum");
    Ok(ExtremumReport {
        nu,
        width: a,
        maxima,
        minima,
        depth,
        kind: DepthKind::WellDepth,
        deepest_minimum: Some(well),
        reference,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateWell {
    pub minimum: Extremum,
    pub near_maximum: Extremum,
    pub far_maximum: Extremum,
    /// Minimum against the lower of the two maxima.
    pub depth: f64,
}

/// The oscillation well of the single-plate potential closest to the
/// molecule-wall distance `near`, measured with the same rule as cavity
/// well depths. Distances are from the plate surface.
pub fn plate_well_depth(
    mol: &Molecule,
    mirror: &MirrorSpec,
    near: f64,
    env: &ThermalEnvironment,
    spec: &QuadratureSpec,
    opts: DepthOptions,
) -> Result<PlateWell> {
    let t = mol
        .transitions
        .get(opts.transition)
        .ok_or_else(|| Error::domain(format!("molecule has no transition {}", opts.transition)))?;
    let lambda = t.wavelength();
    if !(near > 3.0 * lambda / 8.0) {
        return Err(Error::domain("plate well search needs a distance above 3λ/8"));
    }
    let geom = Geometry::Plate(crate::greens::PlateGeometry::new(mirror.clone(), 0.0)?);
    let f = |d: f64| -> Result<f64> {
        match opts.target {
            DepthTarget::Propagating => propagating_potential(d, mol, &geom, env, spec),
            DepthTarget::Total => Ok(potential_components(d, mol, &geom, env, spec)?.total),
        }
    };
    let tol = 1e-6 * lambda;
    let find = |seed: f64, goal: Goal| {
        golden_section(&f, seed - lambda / 8.0, seed + lambda / 8.0, tol, goal).map_err(|e| match e {
            Error::ExtremumNotFound(_) => Error::ExtremumNotFound(seed),
            other => other,
        })
    };
    let minimum = find(near, Goal::Minimize)?;
    let near_maximum = find(minimum.x - lambda / 4.0, Goal::Maximize)?;
    let far_maximum = find(minimum.x + lambda / 4.0, Goal::Maximize)?;
    let depth = near_maximum.value.min(far_maximum.value) - minimum.value;
    Ok(PlateWell {
        minimum,
        near_maximum,
        far_maximum,
        depth,
    })
}

/// Local extrema of `f` on `[lo, hi]`: a scan over `samples` points followed
/// by golden-section refinement. Returns (extremum, is_maximum) pairs.
pub fn local_extrema<F>(f: F, lo: f64, hi: f64, samples: usize, tol: f64) -> Result<Vec<(Extremum, bool)>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if samples < 3 || !(lo < hi) {
        return Err(Error::domain("extremum scan needs lo < hi and at least 3 samples"));
    }
    let step = (hi - lo) / (samples - 1) as f64;
    let xs: Vec<f64> = (0..samples).map(|i| lo + i as f64 * step).collect();
    let ys: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 1..samples - 1 {
        let is_max = ys[i] > ys[i - 1] && ys[i] >= ys[i + 1];
        let is_min = ys[i] < ys[i - 1] && ys[i] <= ys[i + 1];
        if is_max || is_min {
            let goal = if is_max { Goal::Maximize } else { Goal::Minimize };
            let e = golden_section(&f, xs[i - 1], xs[i + 1], tol, goal)?;
            out.push((e, is_max));
        }
    }
    Ok(out)
}

/// Free-space heating rate Γ₀ = Σ_k d_k² ω_k³ n(ω_k)/(3πħc³ε₀).
pub fn heating_rate_free(mol: &Molecule, env: &ThermalEnvironment) -> f64 {
    mol.transitions
        .iter()
        .map(|t| t.d_squared * t.omega.powi(3) * photon_number(t.omega, env))
        .sum::<f64>()
        / (3.0 * PI * HBAR * C.powi(3) * EPSILON_0)
}

/// Heating rate Γ(z) = Γ₀ + (2μ₀/3ħ) Σ_k d_k² ω_k² n(ω_k) Im Tr G(z, z, ω_k).
///
/// The absolute rate needs the complete scattering trace, including the
/// position-independent multiple-reflection term.
pub fn heating_rate_profile(
    z: f64,
    mol: &Molecule,
    geom: &Geometry,
    env: &ThermalEnvironment,
    spec: &QuadratureSpec,
) -> Result<f64> {
    geom.check_position(z)?;
    let mut cav = 0.0;
    for t in &mol.transitions {
        let g = geom.trace_realfreq_full(z, t.omega, spec)?;
        cav += t.d_squared * t.omega * t.omega * photon_number(t.omega, env) * g.total().im;
    }
    Ok(heating_rate_free(mol, env) + 2.0 * MU_0 / (3.0 * HBAR) * cav)
}
