use cavity_cp::asymptotics::{depth_series, i_phi_series, ConstantRCavity};
use cavity_cp::constants::EPSILON_0;
use cavity_cp::config::Registry;
use cavity_cp::molecules::photon_number;
use cavity_cp::potential::*;
use cavity_cp::*;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn room() -> ThermalEnvironment {
    ThermalEnvironment::new(300.0).unwrap()
}

fn gold() -> MirrorSpec {
    MirrorSpec::HalfSpace(PermittivityModel::gold())
}

#[test]
fn extrema_sit_on_the_quarter_wave_grid() {
    let mol = Molecule::lih();
    let lam = mol.primary().wavelength();
    for nu in 2..=4 {
        for mirror in [gold(), MirrorSpec::constant_r(0.99).unwrap()] {
            let rep = potential_depth(&mol, &mirror, nu, &room(), &spec()).unwrap();
            assert_eq!(rep.maxima.len(), nu as usize);
            assert_eq!(rep.minima.len(), nu as usize - 1);
            let grid = |mu: u32| -(nu as f64) * lam / 4.0 + mu as f64 * lam / 4.0;
            for (i, m) in rep.maxima.iter().enumerate() {
                assert!((m.x - grid(2 * i as u32 + 1)).abs() < lam / 8.0);
            }
            for (i, m) in rep.minima.iter().enumerate() {
                assert!((m.x - grid(2 * i as u32 + 2)).abs() < lam / 8.0);
            }
            assert!(rep.depth > 0.0);
        }
    }
}

#[test]
fn constant_r_depth_matches_series() {
    let mol = Molecule::lih();
    let t = *mol.primary();
    let coupling = photon_number(t.omega, &room()) * t.d_squared;
    for nu in 2..=3 {
        for &r in &[0.9, 0.999] {
            let rep = potential_depth(&mol, &MirrorSpec::constant_r(r).unwrap(), nu, &room(), &spec()).unwrap();
            let cfg = ConstantRCavity::new(r, nu, t.wavelength()).unwrap();
            let at = |x: f64| coupling / (3.0 * EPSILON_0) * i_phi_series(&cfg, x / rep.width).unwrap();
            let m = rep.deepest_minimum.unwrap();
            let s = at(rep.reference.x) - at(m.x);
            assert!((rep.depth / s - 1.0).abs() < 1e-6, "ν={nu} r={r}: {} vs {s}", rep.depth);
            // On the ideal grid the series only bounds the depth from below.
            let grid = depth_series(&cfg, coupling).unwrap();
            assert!(grid <= rep.depth * (1.0 + 1e-9));
            if r > 0.99 {
                assert!(rep.depth / grid - 1.0 < 1e-2);
            }
        }
    }
}

#[test]
fn gold_is_bracketed_by_constant_reflectivities() {
    let mol = Molecule::lih();
    let g = potential_depth(&mol, &gold(), 2, &room(), &spec()).unwrap().depth;
    let lo = potential_depth(&mol, &MirrorSpec::constant_r(1.0 - 1e-2).unwrap(), 2, &room(), &spec()).unwrap().depth;
    let hi = potential_depth(&mol, &MirrorSpec::constant_r(1.0 - 1e-3).unwrap(), 2, &room(), &spec()).unwrap().depth;
    assert!(lo < g && g < hi, "{lo:e} < {g:e} < {hi:e}");
}

#[test]
fn depth_is_proportional_to_dipole_squared() {
    let base = Molecule::lih();
    let t = *base.primary();
    let scaled = Molecule::new("LiH2", vec![Transition::new(t.omega, 2.5 * t.d_squared).unwrap()]).unwrap();
    for mirror in [gold(), MirrorSpec::constant_r(0.999).unwrap()] {
        let a = potential_depth(&base, &mirror, 2, &room(), &spec()).unwrap().depth;
        let b = potential_depth(&scaled, &mirror, 2, &room(), &spec()).unwrap().depth;
        assert!((b / a - 2.5).abs() < 1e-6 * 2.5);
    }
}

#[test]
fn depth_grows_with_reflectivity() {
    let mol = Molecule::lih();
    let mut prev = 0.0;
    for &d in &[1e-1, 1e-2, 1e-3, 1e-4, 1e-5] {
        let v = potential_depth(&mol, &MirrorSpec::constant_r(1.0 - d).unwrap(), 2, &room(), &spec())
            .unwrap()
            .depth;
        assert!(v > prev);
        prev = v;
    }
}

#[test]
fn nonresonant_part_is_attractive_towards_walls() {
    let mol = Molecule::lih();
    let a = resonance_width(mol.primary(), 2).unwrap();
    let geom = Geometry::Cavity(CavityGeometry::new(a, gold()).unwrap());
    let zs: Vec<f64> = (0..8).map(|i| i as f64 * 0.06 * a).collect();
    let p = potential_profile(&zs, &mol, &geom, &room(), &spec(), ProfileShift::Centre).unwrap();
    assert_eq!(p[0].nonresonant, 0.0);
    for w in p.windows(2) {
        assert!(w[1].nonresonant < w[0].nonresonant);
    }
}

#[test]
fn heating_limits() {
    let mol = Molecule::lih();
    let env = room();
    let g0 = heating_rate_free(&mol, &env);
    let a = resonance_width(mol.primary(), 1).unwrap();
    let weak = Geometry::Cavity(CavityGeometry::new(a, MirrorSpec::constant_r(1e-9).unwrap()).unwrap());
    let g = heating_rate_profile(0.1 * a, &mol, &weak, &env, &spec()).unwrap();
    assert!((g / g0 - 1.0).abs() < 1e-7);
    // Near-perfect walls: the rate stays finite as δ → 0.
    let rates: Vec<f64> = [1e-3, 1e-5, 1e-7]
        .iter()
        .map(|d| {
            let geom = Geometry::Cavity(CavityGeometry::new(a, MirrorSpec::constant_r(1.0 - d).unwrap()).unwrap());
            heating_rate_profile(0.0, &mol, &geom, &env, &spec()).unwrap()
        })
        .collect();
    assert!(rates.iter().all(|r| r.is_finite() && *r > 0.0));
    assert!((rates[2] / rates[1] - 1.0).abs() < 0.01);
}

#[test]
fn bragg_mirrors_beat_gold() {
    let reg = Registry::builtin();
    let mol = Molecule::lih();
    for (name, temp) in [("bragg_sapphire_300K", 300.0), ("bragg_sapphire_77K", 77.0)] {
        let env = ThermalEnvironment::new(temp).unwrap();
        let b = potential_depth(&mol, &reg.mirror(name).unwrap(), 2, &env, &spec()).unwrap().depth;
        let g = potential_depth(&mol, &gold(), 2, &env, &spec()).unwrap().depth;
        assert!(b > g, "{name}: {b:e} vs {g:e}");
    }
}

#[test]
fn bragg_cavity_total_potential_evaluates() {
    let reg = Registry::builtin();
    let mol = Molecule::lih();
    let a = resonance_width(mol.primary(), 2).unwrap();
    let geom = Geometry::Cavity(CavityGeometry::new(a, reg.mirror("bragg_sapphire_300K").unwrap()).unwrap());
    let zs = [-0.4 * a, -0.2 * a, 0.0, 0.2 * a, 0.4 * a];
    let p = potential_profile(&zs, &mol, &geom, &room(), &spec(), ProfileShift::Centre).unwrap();
    assert!((p[0].total - p[4].total).abs() <= 1e-9 * p[0].total.abs());
    assert!((p[1].total - p[3].total).abs() <= 1e-9 * p[1].total.abs());
    let h = heating_rate_profile(0.0, &mol, &geom, &room(), &spec()).unwrap();
    assert!(h > 0.0);
}

#[test]
fn user_molecule_at_low_frequency() {
    let reg = Registry::from_source("[molecule:YbF-vib]\ntransition = 9e10, 1e-59\n").unwrap();
    let mol = reg.molecule("YbF-vib").unwrap();
    let rep = potential_depth(mol, &gold(), 2, &room(), &spec()).unwrap();
    assert!(rep.depth > 0.0);
}

#[test]
fn plate_oscillation_well() {
    let mol = Molecule::lih();
    let lam = mol.primary().wavelength();
    let w = plate_well_depth(&mol, &gold(), 0.5 * lam, &room(), &spec(), DepthOptions::default()).unwrap();
    assert!(w.depth > 0.0);
    assert!(w.near_maximum.x < w.minimum.x && w.minimum.x < w.far_maximum.x);
    // Oscillations decay away from the plate.
    assert!(w.near_maximum.value > w.far_maximum.value);
}
