use std::f64::consts::PI;

use proptest::prelude::*;

use imposter::feedback::{control_field, ResponseParts, TimeGrid};
use imposter::lattice::build_sector_basis;
use imposter::pulse::*;
use imposter::spectrum::{power_spectrum, windowed_energy, Window};
use imposter::TimeSeries;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(values in prop::collection::vec(-10.0f64..10.0, 16..700), hann in any::<bool>()) {
        let window = if hann { Window::Hann } else { Window::None };
        let s = TimeSeries::new(0.0, 0.3, values, "x").unwrap();
        let spec = power_spectrum(&s, window).unwrap();
        let e = windowed_energy(&s, window);
        prop_assume!(e > 1e-12);
        prop_assert!(((spec.total_power() - e) / e).abs() < 1e-10);
    }

    #[test]
    fn cosines_peak_at_their_bin(n in 1usize..60, omega0 in 0.05f64..0.5) {
        let dt = 0.05;
        prop_assume!(n as f64 * omega0 < 0.9 * PI / dt);
        let samples = 4096;
        let s = TimeSeries::new(
            0.0,
            dt,
            (0..samples).map(|i| (n as f64 * omega0 * i as f64 * dt).cos()).collect(),
            "x",
        )
        .unwrap();
        let spec = power_spectrum(&s, Window::Hann).unwrap();
        let argmax = spec
            .power
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc })
            .0;
        prop_assert!((argmax as i64 - spec.bin_of(n as f64 * omega0) as i64).abs() <= 1);
    }

    #[test]
    fn ati_matching_keeps_the_peak_positions(
        field in 0.0f64..0.2, omega in 0.01f64..0.5, ip in 0.2f64..1.5, ip_new in 0.2f64..1.5,
    ) {
        let budget = ponderomotive_energy(field, omega).unwrap() + ip;
        prop_assume!(budget >= ip_new);
        let f = ati_matched_field(omega, field, ip, ip_new).unwrap();
        let lhs = ponderomotive_energy(f, omega).unwrap() + ip_new;
        prop_assert!((lhs - budget).abs() < 1e-12 * budget.max(1.0));
    }

    #[test]
    fn hhg_matching_round_trip(omega in 0.01f64..0.5, extra in 0.0f64..5.0, ip_new in 0.2f64..1.5) {
        let cutoff = ip_new + extra;
        let f = hhg_matched_field(omega, cutoff, ip_new).unwrap();
        let back = hhg_cutoff(f, omega, ip_new).unwrap();
        prop_assert!((back - cutoff).abs() <= 0.01 * cutoff);
    }

    #[test]
    fn field_is_bounded_and_compact(e0 in 0.0f64..5.0, omega in 0.01f64..5.0, cycles in 1u32..20, s in -0.5f64..1.5) {
        let p = PulseSpec::new(e0, omega, cycles).unwrap();
        let t = s * p.duration();
        let e = p.field(t);
        prop_assert!(e.abs() <= e0 + 1e-15);
        if !(0.0..=p.duration()).contains(&t) {
            prop_assert_eq!(e, 0.0);
        }
    }

    #[test]
    fn closed_form_control_solves_the_implicit_law(
        drift in -5.0f64..5.0, coupling in -20.0f64..0.0, tl in -3.0f64..3.0,
        target in -5.0f64..5.0, gain in 0.0f64..1e4,
    ) {
        let parts = ResponseParts { drift, coupling };
        let out = control_field(parts, tl, target, gain, 1e-6, 0.0);
        prop_assert!(!out.guard_tripped);
        let implicit = gain * (parts.response(tl + out.value) - target);
        prop_assert!((out.value - implicit).abs() <= 1e-10 * (1.0 + implicit.abs()));
    }

    #[test]
    fn time_grid_tiles_the_pulse(omega in 0.01f64..5.0, cycles in 1u32..12, max_dt in 0.001f64..0.5) {
        let p = PulseSpec::new(1.0, omega, cycles).unwrap();
        let g = TimeGrid::for_pulse(&p, max_dt).unwrap();
        prop_assert!(g.dt <= max_dt * (1.0 + 1e-12));
        prop_assert!((g.duration() - p.duration()).abs() < 1e-9 * p.duration());
        prop_assert_eq!(g.samples(), g.steps + 1);
    }

    #[test]
    fn phase_is_linear_in_the_control(c1 in -1.0f64..1.0, c2 in -1.0f64..1.0, frac in 0.0f64..1.0) {
        let p = PulseSpec::new(0.5, 2.0, 2).unwrap();
        let n = 101;
        let dt = p.duration() / (n - 1) as f64;
        let series = |c: f64| TimeSeries::new(0.0, dt, vec![c; n], "u").unwrap();
        let t = frac * p.duration();
        let a = peierls_phase(t, &p, 1.0, &series(c1)).unwrap();
        let b = peierls_phase(t, &p, 1.0, &series(c2)).unwrap();
        prop_assert!((a - b + (c1 - c2) * t).abs() < 1e-10);
    }

    #[test]
    fn basis_lookup_inverts(l in 1usize..9, up in 0usize..9, down in 0usize..9) {
        prop_assume!(up <= l && down <= l);
        let basis = build_sector_basis(l, up, down).unwrap();
        let binom = |n: usize, k: usize| (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
        prop_assert_eq!(basis.dimension(), binom(l, up) * binom(l, down));
        for i in 0..basis.dimension() {
            let (u, d) = basis.state_of(i);
            prop_assert_eq!(u.count_ones() as usize, up);
            prop_assert_eq!(d.count_ones() as usize, down);
            prop_assert_eq!(basis.index_of(u, d), Some(i));
        }
    }
}
