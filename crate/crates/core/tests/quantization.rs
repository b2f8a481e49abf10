mod common;

use avwiretap::channel::{EveState, EveTrace, PowerConfig};
use avwiretap::estimators::estimate_truncation_mass;
use avwiretap::mc;
use avwiretap::quantization::{
    chernoff_exponent, check_loglik_perturbation, gallager_exponent, grid_log_size, grid_log_size_from_log_m,
    quantize_trace, schedule_params, truncation_exponent, truncation_mass, PerturbationOutcome, QuantGrid,
    TailSide,
};
use avwiretap::ComplexMat;
use common::{diag_channel, random_channel, rng};
use rand_distr::{Distribution, Exp1};
use statrs::function::gamma::{gamma_lr, gamma_ur};

#[test]
fn quantization_error_within_row_bound() {
    let mut r = rng(1);
    for &m in &[2u64, 10, 100] {
        let grid = QuantGrid::new(m, 3, 2).unwrap();
        let bound = grid.row_error_bound();
        let mut worst: f64 = 0.0;
        for _ in 0..100_000 {
            let st = EveState::haar(2, 3, &mut r).unwrap();
            let q = grid.quantize(&st).unwrap();
            assert!(grid.contains(&q));
            let d = st.matrix().sub(&q).unwrap();
            for row in 0..2 {
                worst = worst.max(d.row_norm_sq(row));
            }
        }
        assert!(worst <= bound, "M={m}: {worst} > {bound}");
        // Each coordinate can be off by up to 1/(2M), so the bound is
        // reached within a factor of about four.
        assert!(worst > bound / 8.0, "M={m}: bound is far from tight ({worst})");
    }
}

#[test]
fn trace_quantization_is_per_state() {
    let mut r = rng(2);
    let trace = EveTrace::haar(1, 2, 5, &mut r).unwrap();
    let q = quantize_trace(&trace, 10).unwrap();
    assert_eq!(q.len(), 5);
    let grid = QuantGrid::new(10, 2, 1).unwrap();
    assert!(q.iter().all(|h| grid.contains(h)));
    assert_eq!(grid.log_size(5), grid_log_size(10, 2, 1, 5));
}

#[test]
fn grid_size_log_domain_agrees() {
    for &m in &[1u64, 7, 1000, 1 << 40] {
        let direct = grid_log_size(m, 2, 1, 9);
        let via_log = grid_log_size_from_log_m((m as f64).ln(), 2, 1, 9);
        assert!((direct - via_log).abs() <= 1e-9 * direct);
    }
}

/// Fraction of `trials` blocks of `n` unit exponentials whose mean lies
/// above `1 + eps` and below `1 - eps`.
fn exponential_tails(n: usize, eps: f64, trials: usize, seed: u64) -> (f64, f64) {
    let parts = mc::run_chunks(seed, 100, trials, |rng, _, count| {
        let (mut up, mut down) = (0usize, 0usize);
        for _ in 0..count {
            let s: f64 = (0..n).map(|_| -> f64 { Exp1.sample(rng) }).sum::<f64>() / n as f64;
            up += (s >= 1.0 + eps) as usize;
            down += (s <= 1.0 - eps) as usize;
        }
        (up, down)
    });
    let (up, down) = parts.iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    (up as f64 / trials as f64, down as f64 / trials as f64)
}

#[test]
fn chernoff_bounds_exponential_averages() {
    let (n, eps, trials) = (200, 0.3, 1_000_000);
    let (up, down) = exponential_tails(n, eps, trials, 3);
    let nf = n as f64;
    let up_bound = (-nf * chernoff_exponent(eps, TailSide::Upper).unwrap()).exp();
    let down_bound = (-nf * chernoff_exponent(eps, TailSide::Lower).unwrap()).exp();
    assert!(up <= up_bound, "{up} > {up_bound}");
    assert!(down <= down_bound, "{down} > {down_bound}");
    // The Monte Carlo frequencies also match the exact Gamma tails.
    let up_exact = gamma_ur(nf, nf * (1.0 + eps));
    let down_exact = gamma_lr(nf, nf * (1.0 - eps));
    for (mc_p, exact) in [(up, up_exact), (down, down_exact)] {
        let se = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((mc_p - exact).abs() <= 4.0 * se, "{mc_p} vs {exact}");
    }
}

#[test]
fn chernoff_rejects_bad_eps() {
    assert!(chernoff_exponent(0.0, TailSide::Upper).is_err());
    assert!(chernoff_exponent(1.0, TailSide::Lower).is_err());
    assert!(chernoff_exponent(-0.1, TailSide::Lower).is_err());
}

#[test]
fn truncation_mass_matches_monte_carlo() {
    let configs = [
        (1usize, 1usize, 1.0, 0.0),
        (5, 2, 4.0, 0.0),
        (10, 2, 4.0, 0.1),
        (10, 3, 9.0, 0.3),
        (20, 2, 2.0, 0.2),
        (50, 1, 1.0, 0.05),
        (50, 4, 8.0, 0.0),
        (100, 2, 4.0, 0.1),
        (3, 4, 0.5, 0.5),
        (30, 3, 6.0, 0.02),
    ];
    for (k, &(n, n_t, p, eps_p)) in configs.iter().enumerate() {
        let pc = PowerConfig::from_power(p, eps_p, 1, n_t).unwrap();
        let mu = truncation_mass(n, n_t, p, eps_p).unwrap();
        let (mh, se) = estimate_truncation_mass(n, &pc, 40_000, 50 + k as u64).unwrap();
        assert!((mh - mu).abs() <= 3.5 * se.max(1e-4), "config {k}: {mh} ± {se} vs {mu}");
    }
}

#[test]
fn truncation_exponent_bounds_the_tail() {
    for &eps_p in &[0.05, 0.2, 0.5, 0.8] {
        for &n_t in &[1usize, 2, 4] {
            let a = truncation_exponent(eps_p, n_t).unwrap();
            for &n in &[1usize, 10, 100] {
                let tail = 1.0 - truncation_mass(n, n_t, 3.0, eps_p).unwrap();
                assert!(tail <= (-(n as f64) * a).exp() + 1e-15);
            }
        }
    }
}

#[test]
fn gallager_exponent_shape() {
    let mut r = rng(4);
    for _ in 0..10 {
        let ch = random_channel(2, 2, &mut r);
        let pc = PowerConfig::for_channel(&ch, 20.0, 0.0).unwrap();
        let var = pc.per_antenna_var();
        let cap: f64 = ch
            .singular_values()
            .iter()
            .map(|s| (s * s * var / (s * s + 1.0)).ln_1p() / std::f64::consts::LN_2)
            .sum();
        let mut prev = f64::INFINITY;
        for k in 0..=20 {
            let rate = cap * k as f64 / 20.0;
            let e = gallager_exponent(&ch, &pc, rate).unwrap();
            assert!(e >= 0.0 && e <= prev + 1e-12);
            if k < 20 {
                assert!(e > 0.0);
            }
            prev = e;
        }
        assert!(gallager_exponent(&ch, &pc, cap * 1.1).unwrap().abs() < 1e-12);
    }
}

#[test]
fn gallager_zero_rate_is_cutoff() {
    let ch = diag_channel(&[1.0]);
    let pc = PowerConfig::from_power(2.0, 0.0, 1, 1).unwrap();
    // snr = 1, and the maximum over ρ ∈ [0, 1] sits at ρ = 1: log2(1.5).
    let e = gallager_exponent(&ch, &pc, 0.0).unwrap();
    assert!((e - 1.5f64.log2()).abs() < 1e-9);
}

#[test]
fn schedule_minimal_lengths_are_minimal() {
    for &eps in &[0.001, 0.01, 0.05, 0.2] {
        let c_prime = 2.0 * eps;
        let s = schedule_params(eps, 1, c_prime, 1.0, 1.0, 1.0).unwrap();
        for (min_n, pick) in [
            (s.min_n_resolvability.unwrap(), 0usize),
            (s.min_n_grid.unwrap(), 1usize),
        ] {
            let at = |n: u64| {
                let f = schedule_params(eps, n, c_prime, 1.0, 1.0, 1.0).unwrap().flags;
                if pick == 0 { f.resolvability_length } else { f.grid_length }
            };
            assert!(at(min_n));
            assert!(min_n == 1 || !at(min_n - 1));
            assert!(at(min_n * 2));
        }
    }
}

#[test]
fn schedule_values() {
    let s = schedule_params(0.1, 50, 0.5, 0.5, 0.5, 0.5).unwrap();
    assert!((s.eps_n - (-5f64).exp()).abs() < 1e-15);
    assert!((s.log_k - 10.0).abs() < 1e-12 && (s.log_m - 10.0).abs() < 1e-12);
    assert_eq!(s.flags.perturbation, None);
    let s = s.with_radii(4.0, 2, 1, 0.5).unwrap();
    assert!(s.flags.perturbation.is_some());
}

#[test]
fn perturbation_bound_on_grid_neighbors() {
    // With the grid state in place of the true one, every admissible
    // instance satisfies the continuity bound.
    let mut r = rng(5);
    let (n, p) = (6, 3.0);
    let mut applicable = 0;
    for _ in 0..2000 {
        let trace = EveTrace::haar(2, 3, n, &mut r).unwrap();
        let hs = trace.matrices();
        let qs = quantize_trace(&trace, 20).unwrap();
        let x = avwiretap::noise::gaussian_matrix(3, n, 0.5, &mut r);
        let noise = avwiretap::noise::gaussian_matrix(2, n, 1.0, &mut r);
        let z = avwiretap::channel::eve_observe(&x, &trace).unwrap().add(&noise).unwrap();
        let c = check_loglik_perturbation(&x, &z, &hs, &qs, p, 20, 1.0).unwrap();
        match c.outcome {
            PerturbationOutcome::Holds => applicable += 1,
            PerturbationOutcome::Violated => panic!("violated: {} > {}", c.lhs, c.rhs),
            PerturbationOutcome::NotApplicable(_) => {}
        }
    }
    assert!(applicable > 1000);
}

#[test]
fn perturbation_flags_shape_errors() {
    let x = ComplexMat::zeros(2, 3);
    let z = ComplexMat::zeros(1, 3);
    let hs = vec![ComplexMat::selector(1, 2); 2];
    assert!(check_loglik_perturbation(&x, &z, &hs, &hs, 1.0, 10, 0.5).is_err());
}
