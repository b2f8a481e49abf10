//! Circularly-symmetric complex Gaussian sources.
//!
//! "Unit variance" means `E|z|^2 = 1`: real and imaginary parts are
//! independent `N(0, 1/2)`.

use num_complex::Complex64;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::ComplexMat;

/// Anything that can draw `CN(0, variance)` samples.
pub trait NoiseSource {
    fn complex_gaussian(&mut self, variance: f64) -> Complex64;
}

impl<R: RngCore + ?Sized> NoiseSource for R {
    fn complex_gaussian(&mut self, variance: f64) -> Complex64 {
        let s = (variance / 2.0).sqrt();
        let re: f64 = StandardNormal.sample(self);
        let im: f64 = StandardNormal.sample(self);
        Complex64::new(s * re, s * im)
    }
}

/// A source that always returns zero. Turns every noisy operation into its
/// noiseless counterpart.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroNoise;

impl NoiseSource for ZeroNoise {
    fn complex_gaussian(&mut self, _variance: f64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
}

/// `rows × cols` matrix of i.i.d. `CN(0, variance)` entries, filled row-major.
pub fn gaussian_matrix<N: NoiseSource + ?Sized>(
    rows: usize,
    cols: usize,
    variance: f64,
    noise: &mut N,
) -> ComplexMat {
    let data: Vec<Complex64> = (0..rows * cols)
        .map(|_| noise.complex_gaussian(variance))
        .collect();
    ComplexMat::from_row_major(rows, cols, &data).expect("finite gaussian samples")
}
