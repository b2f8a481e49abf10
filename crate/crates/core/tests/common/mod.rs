#![allow(dead_code)]

use avwiretap::noise::gaussian_matrix;
use avwiretap::{ComplexMat, MainChannel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random full-rank `n_r × n_t` channel with i.i.d. unit-variance entries.
pub fn random_channel(n_r: usize, n_t: usize, rng: &mut ChaCha8Rng) -> MainChannel {
    loop {
        if let Ok(ch) = MainChannel::new(gaussian_matrix(n_r, n_t, 1.0, rng)) {
            return ch;
        }
    }
}

pub fn diag_channel(gains: &[f64]) -> MainChannel {
    MainChannel::new(ComplexMat::diag(gains)).unwrap()
}

/// ½∫|CN(z; 0, p') - CN(z; mu, 1)| dz over the complex plane, by a midpoint
/// rule on a square grid.
pub fn tv_quadrature(mu: num_complex::Complex64, p_prime: f64) -> f64 {
    let half = 9.0 * p_prime.sqrt() + mu.norm();
    let steps = 2400;
    let h = 2.0 * half / steps as f64;
    let pi = std::f64::consts::PI;
    let mut acc = 0.0;
    for a in 0..steps {
        let re = -half + (a as f64 + 0.5) * h;
        for b in 0..steps {
            let im = -half + (b as f64 + 0.5) * h;
            let r2 = re * re + im * im;
            let fg = (-r2 / p_prime).exp() / (pi * p_prime);
            let d2 = (re - mu.re).powi(2) + (im - mu.im).powi(2);
            let fc = (-d2).exp() / pi;
            acc += (fg - fc).abs();
        }
    }
    0.5 * acc * h * h
}
