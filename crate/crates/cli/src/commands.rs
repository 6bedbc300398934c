//! Subcommand implementations. Each returns a [`Table`] in input order.

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;

use cavity_cp::asymptotics::{
    phi_asymptote, phi_nu, phi_nu_printed, scaled_depth, ConstantRCavity,
};
use cavity_cp::config::Registry;
use cavity_cp::materials::{bragg_deficit, saturation_onset};
use cavity_cp::potential::{
    heating_rate_free, heating_rate_profile, potential_depth_with, potential_profile,
    resonance_width, DepthKind, DepthOptions, DepthTarget, ProfileShift,
};
use cavity_cp::{CavityGeometry, Geometry, Molecule, PlateGeometry, QuadratureSpec, ThermalEnvironment};

use crate::table::{Cell, Table};
use crate::units::{parse_float_list, parse_int_list, parse_length, parse_temperature, parse_width, Width};

pub struct Context {
    pub registry: Registry,
    pub spec: QuadratureSpec,
}

#[derive(Debug, Clone, Args)]
pub struct SystemArgs {
    /// Molecule name from the registry.
    #[arg(long, default_value = "LiH")]
    pub molecule: String,
    /// Mirror name from the registry, or `r=VALUE` for an ideal wall.
    #[arg(long, default_value = "gold")]
    pub mirror: String,
    /// Temperature, e.g. `300K`.
    #[arg(long, default_value = "300K")]
    pub temperature: String,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Cavity width (`675um`, `0.5mm`, `resonance:2`).
    #[arg(long, default_value = "resonance:2")]
    pub width: String,
    /// Number of grid points.
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Lower end of the grid (default: 1% of the width from the left wall).
    #[arg(long, allow_hyphen_values = true)]
    pub zmin: Option<String>,
    /// Upper end of the grid (default: 1% of the width from the right wall).
    #[arg(long, allow_hyphen_values = true)]
    pub zmax: Option<String>,
    /// Single plate instead of a cavity: z is the distance from the surface
    /// (default grid λ/20 to 2λ).
    #[arg(long)]
    pub plate: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Emit the constant-dropped values instead of shifting every component
    /// to zero at the cavity centre.
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Propagating,
    Total,
}

#[derive(Debug, Clone, Args)]
pub struct DepthArgs {
    /// Molecule name from the registry.
    #[arg(long, default_value = "LiH")]
    pub molecule: String,
    /// Mirror names (repeatable).
    #[arg(long = "mirror", default_value = "gold")]
    pub mirrors: Vec<String>,
    /// Temperature, e.g. `300K`.
    #[arg(long, default_value = "300K")]
    pub temperature: String,
    /// Resonance orders: `1,2,3` or `2..6`.
    #[arg(long, default_value = "1,2,3")]
    pub nu: String,
    /// Which potential the extrema refer to.
    #[arg(long, value_enum, default_value = "propagating")]
    pub target: Target,
}

#[derive(Debug, Clone, Args)]
pub struct BraggArgs {
    /// High-index material (front layer).
    #[arg(long, default_value = "sapphire_300K")]
    pub high: String,
    /// Low-index material.
    #[arg(long, default_value = "vacuum")]
    pub low: String,
    /// Numbers of layer pairs: `1..40` or `5,10,20`.
    #[arg(long, default_value = "1..20")]
    pub pairs: String,
    /// Quarter-wave design frequency in rad/s (default: primary transition
    /// of `--molecule`).
    #[arg(long)]
    pub design_omega: Option<f64>,
    /// Evaluation frequency in rad/s (default: design frequency).
    #[arg(long)]
    pub omega: Option<f64>,
    /// Molecule whose primary transition sets the default design frequency.
    #[arg(long, default_value = "LiH")]
    pub molecule: String,
}

#[derive(Debug, Clone, Args)]
pub struct AsymArgs {
    /// Resonance orders: `2..10` or `2,3,4`.
    #[arg(long, default_value = "2..10")]
    pub nu: String,
    /// Values of δ = 1 − r.
    #[arg(long, default_value = "1e-4,1e-5,1e-6")]
    pub delta: String,
}

fn cavity_width(width: &str, mol: &Molecule) -> Result<f64> {
    Ok(match parse_width(width)? {
        Width::Meters(a) => a,
        Width::Resonance(nu) => resonance_width(mol.primary(), nu)?,
    })
}

fn grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        bail!("a grid needs at least 2 points, got {n}");
    }
    if !(lo < hi) {
        bail!("grid bounds must satisfy zmin < zmax");
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i + 1 == n { hi } else { lo + i as f64 * step })
        .collect())
}

struct Setup {
    mol: Molecule,
    geom: Geometry,
    env: ThermalEnvironment,
    zs: Vec<f64>,
}

fn setup(ctx: &Context, system: &SystemArgs, g: &GridArgs) -> Result<Setup> {
    let mol = ctx.registry.molecule(&system.molecule)?.clone();
    let mirror = ctx.registry.mirror(&system.mirror)?;
    let env = ThermalEnvironment::new(parse_temperature(&system.temperature)?)?;
    let bound = |s: &Option<String>, default: f64| -> Result<f64> {
        s.as_deref().map(parse_length).unwrap_or(Ok(default))
    };
    let (geom, lo, hi) = if g.plate {
        let lambda = mol.primary().wavelength();
        let geom = Geometry::Plate(PlateGeometry::new(mirror, 0.0)?);
        (geom, bound(&g.zmin, lambda / 20.0)?, bound(&g.zmax, 2.0 * lambda)?)
    } else {
        let a = cavity_width(&g.width, &mol)?;
        let geom = Geometry::Cavity(CavityGeometry::new(a, mirror)?);
        (geom, bound(&g.zmin, -0.49 * a)?, bound(&g.zmax, 0.49 * a)?)
    };
    let zs = grid(lo, hi, g.points)?;
    for &z in &zs {
        geom.check_position(z)?;
    }
    Ok(Setup { mol, geom, env, zs })
}

pub fn profile(ctx: &Context, args: &ProfileArgs) -> Result<Table> {
    let s = setup(ctx, &args.system, &args.grid)?;
    let shift = if args.raw || args.grid.plate {
        ProfileShift::Raw
    } else {
        ProfileShift::Centre
    };
    let rows = potential_profile(&s.zs, &s.mol, &s.geom, &s.env, &ctx.spec, shift)?;
    let mut t = Table::new(vec!["z_m", "U_nr_J", "U_pr_J", "U_ev_J", "U_total_J"]);
    for r in rows {
        t.push(vec![
            r.z.into(),
            r.nonresonant.into(),
            r.propagating.into(),
            r.evanescent.into(),
            r.total.into(),
        ]);
    }
    Ok(t)
}

pub fn heating(ctx: &Context, args: &ProfileArgs) -> Result<Table> {
    let s = setup(ctx, &args.system, &args.grid)?;
    let free = heating_rate_free(&s.mol, &s.env);
    let rates: Vec<f64> = s
        .zs
        .par_iter()
        .map(|&z| heating_rate_profile(z, &s.mol, &s.geom, &s.env, &ctx.spec))
        .collect::<cavity_cp::Result<_>>()?;
    let mut t = Table::new(vec!["z_m", "gamma_per_s", "gamma_free_per_s"]);
    for (z, g) in s.zs.iter().zip(rates) {
        t.push(vec![(*z).into(), g.into(), free.into()]);
    }
    Ok(t)
}

fn join_positions(xs: impl Iterator<Item = f64>) -> String {
    xs.map(crate::table::format_float).collect::<Vec<_>>().join(";")
}

pub fn depth(ctx: &Context, args: &DepthArgs) -> Result<Table> {
    let mol = ctx.registry.molecule(&args.molecule)?.clone();
    let env = ThermalEnvironment::new(parse_temperature(&args.temperature)?)?;
    let nus = parse_int_list(&args.nu)?;
    if nus.contains(&0) {
        bail!("resonance orders must be >= 1");
    }
    let mirrors = args
        .mirrors
        .iter()
        .map(|m| Ok((m.clone(), ctx.registry.mirror(m)?)))
        .collect::<Result<Vec<_>>>()?;
    let opts = DepthOptions {
        target: match args.target {
            Target::Propagating => DepthTarget::Propagating,
            Target::Total => DepthTarget::Total,
        },
        transition: 0,
    };
    let jobs: Vec<(usize, u32)> = (0..mirrors.len())
        .flat_map(|m| nus.iter().map(move |&nu| (m, nu)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|&(m, nu)| potential_depth_with(&mol, &mirrors[m].1, nu, &env, &ctx.spec, opts))
        .collect::<cavity_cp::Result<Vec<_>>>()?;
    let mut t = Table::new(vec![
        "mirror",
        "nu",
        "a_m",
        "depth_J",
        "kind",
        "z_min_m",
        "z_reference_m",
        "z_maxima_m",
    ]);
    for (&(m, nu), rep) in jobs.iter().zip(reports) {
        let kind = match rep.kind {
            DepthKind::WellDepth => "well_depth",
            DepthKind::PeakHeight => "peak_height_vs_wall",
        };
        let zmin = rep
            .deepest_minimum
            .map(|e| Cell::Float(e.x))
            .unwrap_or_else(|| Cell::Text(String::new()));
        t.push(vec![
            mirrors[m].0.as_str().into(),
            nu.into(),
            rep.width.into(),
            rep.depth.into(),
            kind.into(),
            zmin,
            rep.reference.x.into(),
            join_positions(rep.maxima.iter().map(|e| e.x)).into(),
        ]);
    }
    Ok(t)
}

pub fn bragg(ctx: &Context, args: &BraggArgs) -> Result<Table> {
    let high = ctx.registry.material(&args.high)?;
    let low = ctx.registry.material(&args.low)?;
    let pairs = parse_int_list(&args.pairs)?;
    let design = match args.design_omega {
        Some(w) => w,
        None => ctx.registry.molecule(&args.molecule)?.primary().omega,
    };
    if !(design > 0.0 && design.is_finite()) {
        bail!("design frequency must be > 0");
    }
    let omega = args.omega.unwrap_or(design);
    if !(omega > 0.0 && omega.is_finite()) {
        bail!("evaluation frequency must be > 0");
    }
    let values = pairs
        .iter()
        .map(|&n| bragg_deficit(high, low, n as usize, design, omega))
        .collect::<cavity_cp::Result<Vec<_>>>()?;
    let deficits: Vec<f64> = values.iter().map(|v| v.0).collect();
    let onset = saturation_onset(&deficits);
    let mut t = Table::new(vec!["N", "one_minus_re_r", "abs_r", "saturated"]);
    for (i, (&n, (d, abs))) in pairs.iter().zip(values).enumerate() {
        let saturated = onset.is_some_and(|o| i >= o);
        t.push(vec![n.into(), d.into(), abs.into(), saturated.into()]);
    }
    match onset {
        Some(o) => log::info!("saturates from N = {} at {:e}", pairs[o], deficits[deficits.len() - 1]),
        None => log::info!("no saturation within N = {}..{}", pairs[0], pairs[pairs.len() - 1]),
    }
    Ok(t)
}

/// Least-squares line y = slope·x + intercept.
fn fit_line(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

pub fn asym(_ctx: &Context, args: &AsymArgs) -> Result<Table> {
    let nus = parse_int_list(&args.nu)?;
    if nus.iter().any(|&n| n < 2) {
        bail!("resonance orders must be >= 2");
    }
    let deltas = parse_float_list(&args.delta)?;
    if deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        bail!("δ values must lie in (0, 1)");
    }
    let mut t = Table::new(vec![
        "nu",
        "delta",
        "scaled_depth",
        "scaled_depth_predicted",
        "fitted_slope",
        "fitted_phi",
        "phi_nu",
        "phi_nu_printed",
        "phi_asymptote",
        "phi_over_nu",
    ]);
    let per_nu = nus
        .par_iter()
        .map(|&nu| {
            deltas
                .iter()
                .map(|&d| scaled_depth(&ConstantRCavity::new(1.0 - d, nu, 1.0)?))
                .collect::<cavity_cp::Result<Vec<f64>>>()
        })
        .collect::<cavity_cp::Result<Vec<_>>>()?;
    for (&nu, scaled) in nus.iter().zip(per_nu) {
        let xs: Vec<f64> = deltas.iter().map(|d| -d.ln()).collect();
        let (slope, phi_fit) = match fit_line(&xs, &scaled) {
            Some((s, b)) => (Cell::Float(s), Cell::Float(-b)),
            None => (Cell::Text(String::new()), Cell::Text(String::new())),
        };
        let phi = phi_nu(nu)?;
        let printed = phi_nu_printed(nu)?;
        let asym = phi_asymptote(nu)?;
        for (&d, s) in deltas.iter().zip(&scaled) {
            t.push(vec![
                nu.into(),
                d.into(),
                (*s).into(),
                (-d.ln() - printed).into(),
                slope.clone(),
                phi_fit.clone(),
                phi.into(),
                printed.into(),
                asym.into(),
                (phi / nu as f64).into(),
            ]);
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit() {
        let (s, b) = fit_line(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]).unwrap();
        assert!((s - 2.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
        assert!(fit_line(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn grids_are_monotone() {
        let g = grid(-1.0, 1.0, 2).unwrap();
        assert_eq!(g, vec![-1.0, 1.0]);
        assert!(grid(0.0, 1.0, 1).is_err());
        assert!(grid(1.0, 0.0, 5).is_err());
    }
}
