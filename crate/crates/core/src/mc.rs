//! Seeded, thread-count independent Monte Carlo plumbing.
//!
//! Trials are split into fixed-size chunks. Each chunk owns a ChaCha stream
//! seeded from `(master seed, operation id, chunk index)`, and chunk results
//! are reduced in index order, so the outcome does not depend on how rayon
//! schedules the chunks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{Beta, ContinuousCDF};

pub const CHUNK: usize = 512;

/// Operation ids keep the streams of different estimators disjoint.
pub mod op {
    pub const DECODE_ERROR: u64 = 1;
    pub const INFO_DENSITY: u64 = 2;
    pub const VARIATIONAL: u64 = 3;
    pub const LEAKAGE_MI: u64 = 4;
    pub const TRUNCATION: u64 = 5;
    pub const SECOND_MOMENT: u64 = 6;
    pub const SYMMETRY: u64 = 7;
    pub const TWO_STAGE: u64 = 8;
    pub const CODEBOOK: u64 = 9;
    pub const TRACE: u64 = 10;
    pub const CHECKS: u64 = 11;
    pub const OUTPUT: u64 = 12;
    pub const WHITENESS: u64 = 13;
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, op: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ op.wrapping_mul(0xA24B_AED4_963E_E407)) ^ index)
}

pub fn stream(master: u64, op: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, op, index))
}

/// Runs `f(rng, first_trial, count)` on every chunk of `trials` in parallel
/// and returns the per-chunk results in chunk order.
pub fn run_chunks<T, F>(master: u64, op: u64, trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize, usize) -> T + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let count = CHUNK.min(trials - start);
            let mut rng = stream(master, op, c as u64);
            f(&mut rng, start, count)
        })
        .collect()
}

/// Running first and second moments.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(mut self, other: Moments) -> Moments {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.variance() / self.count as f64).sqrt()
    }

    pub fn combine(parts: impl IntoIterator<Item = Moments>) -> Moments {
        parts.into_iter().fold(Moments::default(), Moments::merge)
    }
}

/// Binomial standard error `sqrt(p(1-p)/n)` of a hit rate.
pub fn binomial_stderr(hits: usize, trials: usize) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let p = hits as f64 / trials as f64;
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Two-sided Clopper-Pearson upper limit at confidence `1 - alpha`.
pub fn clopper_pearson_upper(hits: usize, trials: usize, alpha: f64) -> f64 {
    if trials == 0 || hits >= trials {
        return 1.0;
    }
    if hits == 0 {
        return 1.0 - (alpha / 2.0).powf(1.0 / trials as f64);
    }
    let beta = Beta::new(hits as f64 + 1.0, (trials - hits) as f64).expect("valid beta");
    beta.inverse_cdf(1.0 - alpha / 2.0)
}

/// `ln(sum(exp(x)))` without overflow.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn chunked_runs_are_pool_independent() {
        let run = || {
            run_chunks(42, op::CHECKS, 5000, |rng, _, count| {
                (0..count).map(|_| rng.random::<f64>()).sum::<f64>()
            })
        };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(run);
        let b = four.install(run);
        assert_eq!(a, b);
        assert_eq!(a.len(), 5000usize.div_ceil(CHUNK));
    }

    #[test]
    fn seeds_differ_across_ops_and_indices() {
        assert_ne!(derive_seed(1, 1, 0), derive_seed(1, 2, 0));
        assert_ne!(derive_seed(1, 1, 0), derive_seed(1, 1, 1));
        assert_ne!(derive_seed(1, 1, 0), derive_seed(2, 1, 0));
    }

    #[test]
    fn log_sum_exp_is_stable() {
        let v = log_sum_exp(&[-1000.0, -1000.0]);
        assert!((v - (-1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }

    #[test]
    fn clopper_pearson_zero_hits() {
        // Rule of three at 95%.
        let u = clopper_pearson_upper(0, 1000, 0.05);
        assert!((u - 0.003682).abs() < 1e-5);
        let u = clopper_pearson_upper(5, 100, 0.05);
        assert!((u - 0.11284).abs() < 1e-4);
    }

    #[test]
    fn slope_of_line() {
        let xs = [1.0, 2.0, 3.0];
        let ys = [2.0, 4.5, 7.0];
        assert!((ols_slope(&xs, &ys) - 2.5).abs() < 1e-12);
    }
}
