//! Worked examples checked against values computed independently of the
//! library: hand sums, closed-form ODE solutions and naive transforms.

mod common;

use std::f64::consts::{LN_2, PI};

use common::*;
use kawahara::bourgain::{
    l4_ratio, l6_norm_exact, l6_norm_grid, xsb_norm, ys_norm, SpaceTimeSample, Window, DENOMINATOR_B,
};
use kawahara::evolution::{
    absorbing_time, energy_law_residual, evolve, linear_propagate, picard_solve_with, step, Nonlinearity,
    PicardConfig, StepperConfig,
};
use kawahara::normal_form::{
    check_nonresonance, duhamel_residual_with, multilinear_ratios, nonresonant_trilinear, nonresonant_trilinear_fast,
    normal_form_bilinear, resonant_pair, resonant_self, DuhamelOptions,
};
use kawahara::resonance::{enumerate_apq, gamma_gap_stats};
use kawahara::spectral::{nonlinear_term, to_physical, to_spectral};
use kawahara::{random_field, ConvolutionMode, SpectralField};

#[test]
fn cosine_nonlinearity() {
    let u = cosine(4, 1, 0.5);
    let n = nonlinear_term(&u, ConvolutionMode::Fast);
    let mut expected = vec![C::new(0.0, 0.0); 4];
    expected[1] = C::new(0.0, -0.25);
    assert!(max_dev(&n, &expected) < 1e-15);
    assert!(max_dev(&nonlinear_term(&u, ConvolutionMode::Direct), &expected) < 1e-15);
}

#[test]
fn cosine_samples() {
    let u = cosine(1, 1, 0.5);
    let xs = to_physical(&u, 16).unwrap();
    for (j, v) in xs.iter().enumerate() {
        assert!((v - (2.0 * PI * j as f64 / 16.0).cos()).abs() < 1e-12);
    }
    let r = random_field(8, 1.0, 1.0, 3);
    let back = to_spectral(&to_physical(&r, 64).unwrap(), 8).unwrap();
    assert!(max_dev(&back, r.coeffs()) < 1e-12);
}

#[test]
fn rough_field_norms_from_the_coefficient_formula() {
    // |c_k| = k^{-0.6} whatever the phases
    let l2: f64 = (1..=64).map(|k| 2.0 * (k as f64).powf(-1.2)).sum::<f64>().sqrt();
    let h2: f64 = (1..=64).map(|k| 2.0 * (k as f64).powf(4.0 - 1.2)).sum::<f64>().sqrt();
    let g = random_field(64, 0.6, 1.0, 7);
    assert!((g.l2_norm() - l2).abs() < 1e-12 * l2);
    assert!((g.sobolev_norm(2.0) - h2).abs() < 1e-12 * h2);
    assert!(h2 > 10.0 * l2);
}

#[test]
fn phase_and_damped_propagation() {
    assert_eq!(params(1.0, 0.0, 1.0).phase(2), 32.0);
    assert_eq!(params(1.0, 1.0, 1.0).phase(1), 0.0);
    assert_eq!(params(2.0, 3.0, 1.0).phase(-1), 1.0);
    let p = params(1.0, 0.3, 0.5);
    let u = random_field(10, 1.0, 1.0, 2);
    let v = linear_propagate(&u, 2.0, &p, true);
    for s in [0.0, 1.0, 2.0] {
        assert!((v.sobolev_norm(s) - (-1f64).exp() * u.sobolev_norm(s)).abs() < 1e-13 * u.sobolev_norm(s));
    }
}

#[test]
fn unforced_decay_of_a_cosine() {
    let p = params(1.0, 0.0, 1.0);
    let g = cosine(16, 1, 0.5);
    let cfg = StepperConfig::new(1e-3, 16).unwrap();
    let traj = evolve(&g, &SpectralField::zeros(16), 2.0, &cfg, &p).unwrap();
    let exact = (-2f64).exp() / 2f64.sqrt();
    assert!((traj.last().l2_norm() - exact).abs() < 1e-8 * exact);
}

#[test]
fn fourth_order_self_convergence() {
    // resolved regime: phase(kmax) dt = 1.6 on the coarsest level
    let p = params(1.0, 0.0, 0.5);
    let g = random_field(4, 2.0, 0.5, 4);
    let f = cosine(4, 2, 0.2);
    let run = |n: usize| {
        let cfg = StepperConfig::new(0.2 / n as f64, 4).unwrap();
        let mut u = g.clone();
        for _ in 0..n {
            u = step(&u, &f, &cfg, &p).unwrap();
        }
        u
    };
    let (a, b, c) = (run(64), run(128), run(256));
    let ratio = a.sub(&b).l2_norm() / b.sub(&c).l2_norm();
    assert!((13.0..19.0).contains(&ratio), "{ratio}");
}

/// `u_k' = -(gamma + i phase) u_k + f_k`.
fn linear_ode(g: &SpectralField, f: &SpectralField, t: f64, p: &kawahara::PhysicalParams) -> Vec<C> {
    (1..=g.kmax() as i64)
        .map(|k| {
            let lam = C::new(p.gamma(), p.phase(k));
            let e = (-lam * t).exp();
            e * c(g, k) + c(f, k) * (1.0 - e) / lam
        })
        .collect()
}

#[test]
fn linear_picard_matches_the_mode_ode() {
    let p = params(1.0, -0.5, 0.7);
    // Simpson resolves the forced oscillation: phase(kmax) h = 0.2
    let g = random_field(4, 1.0, 1.0, 21);
    let f = random_field(4, 2.0, 0.5, 22);
    let mut cfg = PicardConfig::new(12, 256);
    cfg.nonlinearity = Nonlinearity::Disabled;
    let sol = picard_solve_with(&g, &f, 0.05, &cfg, &p).unwrap();
    let dev = max_dev(&sol.state, &linear_ode(&g, &f, 0.05, &p));
    assert!(dev < 1e-12, "{dev} {:?}", sol.contraction);
}

#[test]
fn forced_energy_residual_is_second_order() {
    let p = params(1.0, 0.0, 1.0);
    let g = SpectralField::zeros(8);
    let f = cosine(8, 1, 0.05);
    let worst = |dt: f64| {
        let cfg = StepperConfig::new(dt, 8).unwrap();
        let traj = evolve(&g, &f, 1.0, &cfg, &p).unwrap();
        energy_law_residual(&traj).unwrap().iter().fold(0.0f64, |m, r| m.max(r.abs()))
    };
    let ratio = worst(0.01) / worst(0.005);
    assert!((3.5..4.5).contains(&ratio), "{ratio}");
}

#[test]
fn absorbing_times() {
    assert!((absorbing_time(3.0, 1.0, 1.0).unwrap() - LN_2).abs() < 1e-15);
    assert_eq!(absorbing_time(0.5, 1.0, 1.0).unwrap(), 0.0);
    // (|g| - |f|/gamma) / (|f|/gamma) = 4 at gamma = 2
    assert!((absorbing_time(5.0, 2.0, 2.0).unwrap() - 4f64.ln() / 2.0).abs() < 1e-15);
    assert!(absorbing_time(1.0, 1.0, 0.0).is_err());
}

#[test]
fn nonresonance_examples() {
    assert!(check_nonresonance(&params(1.0, 0.0, 1.0), 64).nonresonant);
    assert!(check_nonresonance(&params(1.0, -7.0, 1.0), 64).nonresonant);
    let bad = kawahara::PhysicalParams::new(3.0, 5.0, 1.0);
    assert!(bad.is_err() || !bad.unwrap().is_nonresonant());
}

#[test]
fn operator_hand_values() {
    let p = params(1.0, 0.0, 1.0);
    let u = cosine(4, 1, 0.5);
    let b = normal_form_bilinear(&u, &u, &p).unwrap();
    assert_eq!(b.coeff(1), C::new(0.0, 0.0));
    assert!((b.coeff(2) - C::new(-1.0 / 120.0, 0.0)).norm() < 1e-17);

    let unit = cosine(4, 1, 1.0);
    assert!((resonant_self(&unit, &p).unwrap().coeff(1) - C::new(0.0, 1.0 / 30.0)).norm() < 1e-17);
    let r = nonresonant_trilinear(&unit, &p).unwrap();
    assert_eq!(r.coeff(1), C::new(0.0, 0.0));
    assert!((r.coeff(3) - C::new(0.0, -1.0 / 70.0)).norm() < 1e-17);
    assert_eq!(resonant_pair(&unit, &p).unwrap().coeff(1), C::new(0.0, 0.0));

    // modes 1 and 2: sigma_1 = -i u_1 |u_2|^2 (1/(2 D(1,2)) - 1/(2 D(1,-2)))
    let two = SpectralField::new(2, vec![C::new(0.3, 0.1), C::new(-0.2, 0.4)]).unwrap();
    let (d_plus, d_minus) = (5.0 * 3.0, 5.0 * 7.0);
    let u2 = two.coeff(2).norm_sqr();
    let hand = -I * two.coeff(1) * u2 * (1.0 / (2.0 * d_plus) - 1.0 / (2.0 * d_minus));
    assert!((resonant_pair(&two, &p).unwrap().coeff(1) - hand).norm() < 1e-14);
}

#[test]
fn operators_match_naive_sums() {
    for (i, p) in [params(1.0, 0.0, 1.0), params(1.0, 1.0, 1.0), params(-2.0, 0.5, 1.0)].iter().enumerate() {
        let phi = random_field(12, 0.5, 1.0, 100 + i as u64);
        let psi = random_field(12, 1.5, 1.0, 200 + i as u64);
        assert!(max_dev(&normal_form_bilinear(&phi, &psi, p).unwrap(), &bilinear(&phi, &psi, p)) < 1e-13);
        assert!(max_dev(&resonant_self(&phi, p).unwrap(), &rho(&phi, p)) < 1e-13);
        assert!(max_dev(&resonant_pair(&phi, p).unwrap(), &sigma(&phi, p)) < 1e-13);
        let r = remainder(&phi, p);
        assert!(max_dev(&nonresonant_trilinear(&phi, p).unwrap(), &r) < 1e-13);
        assert!(max_dev(&nonresonant_trilinear_fast(&phi, p).unwrap(), &r) < 1e-13);
        assert!(max_dev(&nonlinear_term(&phi, ConvolutionMode::Direct), &nonlinear(&phi)) < 1e-13);
    }
}

#[test]
fn single_mode_multilinear_ratios() {
    let p = params(1.0, 0.0, 1.0);
    let u = cosine(2, 1, 0.5);
    let r = multilinear_ratios(&u, &u, &u, 0.0, &p).unwrap();
    // |B(u,u)| = sqrt(2)/120 against |u|^2 = 1/2
    assert!((r.bilinear - 2f64.sqrt() / 60.0).abs() < 1e-15);
    // rho_1 = i (1/8)/30, |u|^3 = 2^{-3/2}
    assert!((r.resonant_self - 2f64.sqrt() / 240.0 * 2f64.powf(1.5)).abs() < 1e-15);
}

#[test]
fn linear_duhamel_identity() {
    let p = params(1.0, 0.0, 1.0);
    let g = random_field(16, 1.0, 0.5, 9);
    // forcing on modes the step resolves; RK4 stages cannot follow the
    // forcing integral where phase(k) dt is large
    let f = SpectralField::from_fn(16, |k| if k <= 2 { C::new(0.2, 0.1 * k as f64) } else { C::new(0.0, 0.0) }).unwrap();
    let cfg = StepperConfig::new(1.0 / 512.0, 16).unwrap().with_nonlinearity(Nonlinearity::Disabled);
    let traj = evolve(&g, &f, 1.0, &cfg, &p).unwrap();
    let opts = DuhamelOptions {
        nonlinear: false,
        ..DuhamelOptions::default()
    };
    let report = duhamel_residual_with(&traj, &g, &f, 1.0, &opts).unwrap();
    assert!(report.total_relative < 1e-10, "{}", report.total_relative);
}

#[test]
fn first_gamma_gap() {
    let r = gamma_gap_stats(1, 2, &params(1.0, 0.0, 1.0)).unwrap();
    assert_eq!(r.min_gap, 30.0);
}

#[test]
fn unit_shell_table() {
    let t = enumerate_apq(1, 1, &params(1.0, 0.0, 1.0)).unwrap();
    assert_eq!(t.total(), 8);
    assert_eq!(t.count(3, -3 * t.exact.scale), 1);
    assert_eq!(t.count(1, -t.exact.scale), 3);
    assert_eq!(t.max_count, 3);
    assert_eq!(enumerate_apq(3, 2, &params(1.0, 0.0, 1.0)).unwrap().total(), 0);
}

/// Naive DFT of the window samples, `m = -nt/2 .. nt/2 - 1`.
fn window_spectrum(w: &Window, period: f64, nt: usize) -> Vec<(f64, C)> {
    let lo = -(nt as i64) / 2;
    (0..nt as i64)
        .map(|i| {
            let m = lo + i;
            let mut s = C::new(0.0, 0.0);
            for j in 0..nt {
                let t = j as f64 * period / nt as f64;
                s += w.value(t) * C::from_polar(1.0, -2.0 * PI * (m * j as i64) as f64 / nt as f64);
            }
            (2.0 * PI * m as f64 / period, s / nt as f64)
        })
        .collect()
}

#[test]
fn characteristic_norms_from_the_window_spectrum() {
    let p = params(1.0, 0.0, 1.0);
    let (period, nt) = (1.0, 64);
    let w = Window::tukey(0.0, 1.0);
    let spec = window_spectrum(&w, period, nt);
    let amp = C::new(0.6, -0.2);
    let x = |b: f64| {
        (2.0 * period * spec.iter().map(|(s, c)| (1.0 + s.abs()).powf(2.0 * b) * (amp * c).norm_sqr()).sum::<f64>())
            .sqrt()
    };
    let l1 = 2f64.sqrt() * spec.iter().map(|(_, c)| (amp * c).norm()).sum::<f64>();
    for k in [1, 5, 16] {
        let u = SpaceTimeSample::characteristic(16, k, amp, period, nt, w, &p).unwrap();
        for b in [-0.5, 0.0, 0.3, 0.5] {
            let got = xsb_norm(&u, 0.0, b, &p);
            assert!((got - x(b)).abs() < 1e-10 * x(b), "k={k} b={b}");
        }
        let y = ys_norm(&u, 0.0, &p);
        assert!((y - (x(0.5) + l1)).abs() < 1e-8 * y);
    }
}

#[test]
fn characteristic_l4_ratio_is_k_independent() {
    let p = params(1.0, 0.0, 1.0);
    let w = Window::tukey(0.0, 1.0);
    let ratios: Vec<f64> = [1, 5, 16]
        .iter()
        .map(|&k| {
            let u = SpaceTimeSample::characteristic(16, k, C::new(1.0, 0.0), 1.0, 64, w, &p).unwrap();
            l4_ratio(&u, 0.5, &p).unwrap()
        })
        .collect();
    for r in &ratios[1..] {
        assert!((r - ratios[0]).abs() < 1e-8 * ratios[0]);
    }
    // nothing sampled before the cutoff
    let late = SpaceTimeSample::characteristic(4, 1, C::new(1.0, 0.0), 2.0, 64, Window::tukey(1.0, 1.0), &p).unwrap();
    assert_eq!(l4_ratio(&late, 0.5, &p).unwrap(), 0.0);
    assert!(DENOMINATOR_B > 0.0);
}

#[test]
fn l6_of_a_travelling_cosine() {
    // u = 2 cos(x - phase t): int |u|^6 = 64 (5/16) 2 pi span
    let p = params(1.0, 0.0, 1.0);
    let h = cosine(4, 1, 1.0);
    let span = 2.0 * PI;
    let exact = (40.0 * PI * span).powf(1.0 / 6.0);
    assert!((l6_norm_exact(&h, span, &p).unwrap() - exact).abs() < 1e-10 * exact);
    assert!((l6_norm_grid(&h, span, 32, 256, &p).unwrap() - exact).abs() < 1e-10 * exact);
}
