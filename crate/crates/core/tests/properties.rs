use cavity_cp::config::{load_molecules, molecules_to_config};
use cavity_cp::greens::{cavity_trace_imagfreq_complex, transverse_beta};
use cavity_cp::materials::{quarter_wave_stack, Polarization};
use cavity_cp::molecules::{photon_number, polarizability_imag};
use cavity_cp::numerics::{
    digamma, digamma_series, hurwitz_zeta3, hurwitz_zeta3_direct, polylog, polylog_direct,
    shifted_geometric_sum, shifted_geometric_sum_direct,
};
use cavity_cp::potential::{
    general_state_potential, heating_rate_profile, nonresonant_potential, potential_components,
    LevelScheme,
};
use cavity_cp::*;
use proptest::prelude::*;

const W_LIH: f64 = 2.78973e12;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 1000,
        ..ProptestConfig::default()
    }
}

fn mirror(kind: u8, r: f64) -> MirrorSpec {
    match kind % 3 {
        0 => MirrorSpec::HalfSpace(PermittivityModel::gold()),
        1 => MirrorSpec::constant_r(r).unwrap(),
        _ => MirrorSpec::HalfSpace(PermittivityModel::constant_lossy(10.0, 1e-3).unwrap()),
    }
}

fn cavity(kind: u8, r: f64, a_lambda: f64) -> Geometry {
    let a = a_lambda * 2.0 * std::f64::consts::PI * constants::C / W_LIH;
    Geometry::Cavity(CavityGeometry::new(a, mirror(kind, r)).unwrap())
}

fn width(g: &Geometry) -> f64 {
    match g {
        Geometry::Cavity(c) => c.width,
        Geometry::Plate(_) => unreachable!(),
    }
}

fn close(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * x.abs().max(y.abs()) + 1e-300
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn beta_has_non_negative_imaginary_part(
        re in -1e15f64..1e15, im in 0f64..1e15, k in 0f64..1e7,
    ) {
        let b = transverse_beta(Complex64::new(re, im), k);
        prop_assert!(b.im >= 0.0);
    }

    #[test]
    fn passive_mirrors_reflect_at_most_unity(
        eps_re in 1f64..50.0, eps_im in 0f64..1e6, k_frac in 0f64..1.0, n in 0usize..6,
    ) {
        let w = Complex64::new(W_LIH, 0.0);
        let k = k_frac * W_LIH / constants::C;
        let m = PermittivityModel::constant_lossy(eps_re, eps_im).unwrap();
        let half = MirrorSpec::HalfSpace(m).at_frequency(w).unwrap();
        let stack = MirrorSpec::Stack(quarter_wave_stack(m, PermittivityModel::Vacuum, n, W_LIH).unwrap())
            .at_frequency(w)
            .unwrap();
        for refl in [half, stack] {
            let p = refl.reflect(transverse_beta(w, k));
            prop_assert!(p.s.r.norm() <= 1.0 + 1e-12 && p.p.r.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn normal_incidence_rp_equals_minus_rs(kind in 0u8..3, r in 0.01f64..0.999, n in 1usize..5) {
        let w = Complex64::new(W_LIH, 0.0);
        let b = Complex64::new(W_LIH / constants::C, 0.0);
        let sapph = PermittivityModel::constant_lossy(10.0, 1e-4).unwrap();
        let stack = MirrorSpec::Stack(quarter_wave_stack(sapph, PermittivityModel::Vacuum, n, W_LIH).unwrap());
        for m in [mirror(kind, r), stack] {
            let p = m.at_frequency(w).unwrap().reflect(b);
            prop_assert!((p.p.r + p.s.r).norm() <= 1e-12);
        }
    }

    #[test]
    fn imaginary_frequency_trace_is_real(
        kind in 0u8..3, r in 0.01f64..0.99, a in 0.3f64..3.0, zf in -0.45f64..0.45, xi in 1e12f64..1e15,
    ) {
        let Geometry::Cavity(c) = cavity(kind, r, a) else { unreachable!() };
        let v = cavity_trace_imagfreq_complex(zf * c.width, xi, &c, &QuadratureSpec::default()).unwrap();
        prop_assert!(v.im.abs() <= 1e-8 * v.re.abs(), "{v}");
    }

    #[test]
    fn components_are_even_in_z(kind in 0u8..3, r in 0.05f64..0.999, a in 0.5f64..2.5, zf in 0.01f64..0.45) {
        let g = cavity(kind, r, a);
        let z = zf * width(&g);
        let spec = QuadratureSpec::default();
        let env = ThermalEnvironment::new(300.0).unwrap();
        let mol = Molecule::lih();
        let p = potential_components(z, &mol, &g, &env, &spec).unwrap();
        let m = potential_components(-z, &mol, &g, &env, &spec).unwrap();
        prop_assert!(close(p.nonresonant, m.nonresonant, 1e-10));
        prop_assert!(close(p.propagating, m.propagating, 1e-10));
        prop_assert!(close(p.evanescent, m.evanescent, 1e-10));
        let hp = heating_rate_profile(z, &mol, &g, &env, &spec).unwrap();
        let hm = heating_rate_profile(-z, &mol, &g, &env, &spec).unwrap();
        prop_assert!(close(hp, hm, 1e-10));
        prop_assert!(hp > 0.0);
    }

    #[test]
    fn total_is_sum_of_components(kind in 0u8..3, r in 0.05f64..0.999, a in 0.5f64..2.5, zf in -0.45f64..0.45) {
        let g = cavity(kind, r, a);
        let p = potential_components(
            zf * width(&g),
            &Molecule::lih(),
            &g,
            &ThermalEnvironment::new(300.0).unwrap(),
            &QuadratureSpec::default(),
        )
        .unwrap();
        let sum = p.nonresonant + p.propagating + p.evanescent;
        prop_assert!((p.total - sum).abs() <= 4.0 * f64::EPSILON * (p.nonresonant.abs() + p.propagating.abs() + p.evanescent.abs()));
    }

    #[test]
    fn pure_ground_state_matches_dedicated_path(
        kind in 0u8..3, r in 0.05f64..0.999, a in 0.5f64..2.5, zf in -0.45f64..0.45, t in 20f64..600.0,
    ) {
        let g = cavity(kind, r, a);
        let z = zf * width(&g);
        let mol = Molecule::lih();
        let env = ThermalEnvironment::new(t).unwrap();
        let spec = QuadratureSpec::default();
        let levels = LevelScheme::from_molecule(&mol);
        let general = general_state_potential(z, &levels, &[1.0, 0.0], &g, &env, &spec).unwrap();
        let direct = potential_components(z, &mol, &g, &env, &spec).unwrap();
        prop_assert!(close(general.nonresonant, direct.nonresonant, 1e-12));
        prop_assert!(close(general.propagating, direct.propagating, 1e-12));
        prop_assert!(close(general.evanescent, direct.evanescent, 1e-12));
    }

    #[test]
    fn thermal_two_level_resonant_terms_cancel(
        kind in 0u8..3, r in 0.05f64..0.999, a in 0.5f64..2.5, zf in -0.45f64..0.45, t in 20f64..600.0,
    ) {
        let g = cavity(kind, r, a);
        let z = zf * width(&g);
        let mol = Molecule::lih();
        let env = ThermalEnvironment::new(t).unwrap();
        let spec = QuadratureSpec::default();
        let levels = LevelScheme::from_molecule(&mol);
        let boltzmann = (-constants::HBAR * W_LIH / (constants::K_B * t)).exp();
        let p0 = 1.0 / (1.0 + boltzmann);
        let thermal = general_state_potential(z, &levels, &[p0, 1.0 - p0], &g, &env, &spec).unwrap();
        let ground = potential_components(z, &mol, &g, &env, &spec).unwrap();
        let scale = ground.propagating.abs() + ground.evanescent.abs();
        prop_assert!(thermal.propagating.abs() <= 1e-8 * scale, "{} vs {}", thermal.propagating, scale);
        prop_assert!(thermal.evanescent.abs() <= 1e-8 * scale);
        // The excited state's polarizability is the ground state's with the
        // sign reversed.
        let nr = nonresonant_potential(z, &mol, &g, &env, &spec).unwrap();
        prop_assert!(close(thermal.nonresonant, (2.0 * p0 - 1.0) * nr, 1e-12));
    }

    #[test]
    fn photon_number_identity(log_w in 10f64..16.0, t in 1f64..1000.0) {
        let w = 10f64.powf(log_w);
        let env = ThermalEnvironment::new(t).unwrap();
        let n = photon_number(w, &env);
        let x = constants::HBAR * w / (constants::K_B * t);
        if n > 0.0 {
            prop_assert!((n * x.exp_m1() - 1.0).abs() < 1e-14);
        } else {
            prop_assert!(x > 700.0);
        }
    }

    #[test]
    fn polarizability_decreases(xi in 0f64..1e15, step in 1e8f64..1e14) {
        let mol = Molecule::lih();
        let a0 = polarizability_imag(&mol, xi);
        let a1 = polarizability_imag(&mol, xi + step);
        prop_assert!(a0 > 0.0 && a1 > 0.0 && a1 < a0);
    }

    #[test]
    fn special_functions_match_direct_sums(x in 0.05f64..20.0, r in 0.0f64..0.9, zr in -0.95f64..0.95) {
        prop_assert!(close(digamma(x).unwrap(), digamma_series(x, 2_000_000), 1e-6));
        prop_assert!(close(hurwitz_zeta3(x).unwrap(), hurwitz_zeta3_direct(x, 200_000), 1e-10));
        prop_assert!(close(
            shifted_geometric_sum(x, r).unwrap(),
            shifted_geometric_sum_direct(x, r, 2000),
            1e-10,
        ));
        let z = Complex64::new(zr, 0.0);
        for s in 0..4 {
            let fast = polylog(s, z).unwrap();
            let slow = polylog_direct(s, z, 4000);
            prop_assert!((fast - slow).norm() <= 1e-10 * slow.norm().max(1e-300));
        }
        let l1 = polylog(1, z).unwrap();
        prop_assert!((l1.re + (1.0 - zr).ln()).abs() < 1e-12);
    }

    #[test]
    fn hurwitz_recurrence(b in 0.1f64..10.0) {
        let lhs = hurwitz_zeta3(b).unwrap();
        let rhs = b.powi(-3) + hurwitz_zeta3(b + 1.0).unwrap();
        prop_assert!(close(lhs, rhs, 1e-12));
    }

    #[test]
    fn registry_round_trip(
        ws in proptest::collection::vec(1e9f64..1e15, 1..4),
        ds in proptest::collection::vec(1e-62f64..1e-56, 4),
    ) {
        let mut ws = ws;
        ws.sort_by(|a, b| a.total_cmp(b));
        ws.dedup();
        let ts = ws.iter().zip(&ds).map(|(&w, &d)| Transition::new(w, d).unwrap()).collect();
        let mol = Molecule::new("Probe", ts).unwrap();
        let text = molecules_to_config([&mol]);
        let loaded = load_molecules(&text).unwrap();
        let back = loaded.iter().find(|m| m.name == "Probe").unwrap();
        prop_assert_eq!(back, &mol);
    }
}

#[test]
fn lossless_bragg_deficit_never_increases() {
    let w = Complex64::new(W_LIH, 0.0);
    let sapph = PermittivityModel::constant_lossy(10.0, 0.0).unwrap();
    let mut prev = f64::INFINITY;
    for n in 0..12 {
        let st = quarter_wave_stack(sapph, PermittivityModel::Vacuum, n, W_LIH).unwrap();
        let r = materials::multilayer_reflection(&st, w, 0.0, Polarization::P).unwrap();
        let d = 1.0 - r.re;
        assert!(d <= prev * (1.0 + 1e-12), "N = {n}: {d} > {prev}");
        prev = d;
    }
}
