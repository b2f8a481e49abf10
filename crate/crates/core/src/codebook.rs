//! Truncated-Gaussian binned codebooks with their encoder and decoders.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{EveTrace, MainChannel, PowerConfig};
use crate::error::{dim, invalid, Result, WiretapError};
use crate::linalg::ComplexMat;
use crate::mc::{self, op};
use crate::noise::gaussian_matrix;
use crate::quantization::truncation_mass;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SecrecyMode {
    /// Bins large enough to resolve the eavesdropper's channel.
    Strong,
    /// Bins just small enough to be decodable by the eavesdropper.
    Weak,
}

impl std::str::FromStr for SecrecyMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "strong" => Ok(Self::Strong),
            "weak" => Ok(Self::Weak),
            other => Err(format!("unknown secrecy mode '{other}' (expected strong|weak)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinningParams {
    pub n: usize,
    /// Codebook rate in bits per channel use.
    pub rate: f64,
    pub n_i: usize,
    pub n_j: usize,
    pub delta_n: f64,
    pub delta_prime: f64,
    pub mode: SecrecyMode,
}

impl BinningParams {
    pub fn codeword_count(&self) -> usize {
        self.n_i * self.n_j
    }
}

/// `2^e`, snapping `e` to the nearest integer when it is within `1e-9`.
fn pow2_snapped(e: f64) -> f64 {
    let r = e.round();
    if (e - r).abs() <= 1e-9 {
        2f64.powi(r as i32)
    } else {
        e.exp2()
    }
}

// Largest count we are willing to represent exactly.
const MAX_COUNT: f64 = (1u64 << 52) as f64;

/// Bin sizes for the given mutual informations (bits per use).
///
/// Strong: `R = I_main - δ'`, `N_j = ceil(2^{n(I_eve + δ_n)})`.
/// Weak: `R = I_main - 2δ_n`, `N_j = ceil(2^{n(I_eve - δ_n)})`.
/// Both: `N_i = max(1, floor(2^{nR} / N_j))`.
pub fn binning_params(
    i_main: f64,
    i_eve: f64,
    n: usize,
    delta_n: f64,
    delta_prime: f64,
    mode: SecrecyMode,
) -> Result<BinningParams> {
    if n == 0 {
        return invalid("blocklength must be >= 1");
    }
    if !(i_main.is_finite() && i_eve >= 0.0 && delta_n >= 0.0 && delta_prime >= 0.0) {
        return invalid("mutual informations and slacks must be finite and >= 0");
    }
    if !(i_main > i_eve + delta_n) {
        return invalid(format!(
            "need I_main > I_eve + delta_n for a positive secrecy rate, got {i_main} <= {i_eve} + {delta_n}"
        ));
    }
    let nf = n as f64;
    let (rate, exp_j) = match mode {
        SecrecyMode::Strong => (i_main - delta_prime, nf * (i_eve + delta_n)),
        SecrecyMode::Weak => (i_main - 2.0 * delta_n, nf * (i_eve - delta_n)),
    };
    if !(nf * rate - exp_j > 0.0) {
        return invalid(format!(
            "bin count target 2^{} is not above 1",
            nf * rate - exp_j
        ));
    }
    let n_j = pow2_snapped(exp_j).ceil();
    let total = pow2_snapped(nf * rate);
    if n_j > MAX_COUNT || total > MAX_COUNT {
        return Err(WiretapError::ResourceCap(format!(
            "codebook size 2^{:.1} is not representable",
            nf * rate
        )));
    }
    let n_i = (total / n_j).floor().max(1.0);
    Ok(BinningParams {
        n,
        rate,
        n_i: n_i as usize,
        n_j: n_j as usize,
        delta_n,
        delta_prime,
        mode,
    })
}

/// Size limits for estimators that evaluate full Gaussian mixtures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToyCaps {
    pub max_codewords: usize,
    pub max_n: usize,
}

impl Default for ToyCaps {
    fn default() -> Self {
        Self {
            max_codewords: 1 << 14,
            max_n: 32,
        }
    }
}

impl ToyCaps {
    pub fn check(&self, codewords: usize, n: usize) -> Result<()> {
        if codewords > self.max_codewords {
            return Err(WiretapError::ResourceCap(format!(
                "{codewords} codewords exceed the cap of {}",
                self.max_codewords
            )));
        }
        if n > self.max_n {
            return Err(WiretapError::ResourceCap(format!(
                "blocklength {n} exceeds the cap of {}",
                self.max_n
            )));
        }
        Ok(())
    }
}

/// Codewords stored in bin-major order: codeword `(i, j)` sits at
/// `i * N_j + j`. Indices are 0-based.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook {
    codewords: Vec<ComplexMat>,
    n_i: usize,
    n_j: usize,
    power_cap: f64,
    acceptance_rate: Option<f64>,
}

impl Codebook {
    /// Wraps explicit codewords. Every codeword must be `N_T × n` with
    /// `(1/n)‖x‖² <= power_cap`.
    pub fn from_codewords(
        codewords: Vec<ComplexMat>,
        n_i: usize,
        n_j: usize,
        power_cap: f64,
    ) -> Result<Self> {
        if n_i == 0 || n_j == 0 {
            return invalid("bin counts must be >= 1");
        }
        if codewords.len() != n_i * n_j {
            return dim(format!(
                "expected {} codewords, got {}",
                n_i * n_j,
                codewords.len()
            ));
        }
        let shape = codewords[0].shape();
        if codewords.iter().any(|c| c.shape() != shape) {
            return dim("codewords must share one shape");
        }
        let n = shape.1 as f64;
        if let Some(k) = codewords.iter().position(|c| c.norm_sq() / n > power_cap) {
            return invalid(format!("codeword {k} exceeds the power cap {power_cap}"));
        }
        Ok(Self {
            codewords,
            n_i,
            n_j,
            power_cap,
            acceptance_rate: None,
        })
    }

    pub fn n_i(&self) -> usize {
        self.n_i
    }

    pub fn n_j(&self) -> usize {
        self.n_j
    }

    pub fn n(&self) -> usize {
        self.codewords[0].cols()
    }

    pub fn n_t(&self) -> usize {
        self.codewords[0].rows()
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn power_cap(&self) -> f64 {
        self.power_cap
    }

    /// Fraction of Gaussian draws accepted during sampling.
    pub fn acceptance_rate(&self) -> Option<f64> {
        self.acceptance_rate
    }

    pub fn codewords(&self) -> &[ComplexMat] {
        &self.codewords
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_j + j
    }

    pub fn codeword(&self, i: usize, j: usize) -> &ComplexMat {
        &self.codewords[self.index(i, j)]
    }

    pub fn bin(&self, i: usize) -> &[ComplexMat] {
        &self.codewords[i * self.n_j..(i + 1) * self.n_j]
    }
}

/// Draws `N_i N_j` codewords i.i.d. from the truncated Gaussian ensemble:
/// `CN(0, per_antenna_var)` entries, redrawn until `(1/n)‖x‖² <= P`.
pub fn sample_codebook(bp: &BinningParams, pc: &PowerConfig, caps: &ToyCaps, seed: u64) -> Result<Codebook> {
    let count = bp.codeword_count();
    caps.check(count, bp.n)?;
    let p = pc.p();
    if p > 0.0 {
        let mu = truncation_mass(bp.n, pc.n_t, p, pc.eps_p)?;
        if mu < 1e-6 {
            return invalid(format!("power-cap acceptance rate {mu:.3e} is below 1e-6"));
        }
    }
    let var = pc.per_antenna_var();
    let (n, n_t) = (bp.n, pc.n_t);
    let cap = p * n as f64;
    let chunks = mc::run_chunks(seed, op::CODEBOOK, count, |rng, _, cnt| {
        let mut out = Vec::with_capacity(cnt);
        let mut attempts = 0u64;
        for _ in 0..cnt {
            loop {
                attempts += 1;
                let x = gaussian_matrix(n_t, n, var, rng);
                if x.norm_sq() <= cap {
                    out.push(x);
                    break;
                }
            }
        }
        (out, attempts)
    });
    let mut codewords = Vec::with_capacity(count);
    let mut attempts = 0u64;
    for (cws, a) in chunks {
        codewords.extend(cws);
        attempts += a;
    }
    Ok(Codebook {
        codewords,
        n_i: bp.n_i,
        n_j: bp.n_j,
        power_cap: p,
        acceptance_rate: Some(count as f64 / attempts as f64),
    })
}

/// Stochastic encoder: picks `j` uniformly in bin `w`.
pub fn encode<'a, R: Rng + ?Sized>(w: usize, cb: &'a Codebook, rng: &mut R) -> Result<(&'a ComplexMat, usize)> {
    if w >= cb.n_i {
        return invalid(format!("message {w} out of range 0..{}", cb.n_i));
    }
    let j = rng.random_range(0..cb.n_j);
    Ok((cb.codeword(w, j), j))
}

fn dist_sq(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum()
}

/// Index of the smallest distance; ties go to the lower index.
fn argmin<'a>(target: &DMatrix<Complex64>, images: impl Iterator<Item = &'a DMatrix<Complex64>>) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, img) in images.enumerate() {
        let d = dist_sq(target, img);
        if d < best_d {
            best = k;
            best_d = d;
        }
    }
    best
}

/// Maximum-likelihood decoder for the main receiver. The effective noise
/// `H N + Z` has covariance `H H^H + I`, so residuals are whitened by the
/// inverse Cholesky factor before comparison.
#[derive(Clone, Debug)]
pub struct MainDecoder {
    l: DMatrix<Complex64>,
    images: Vec<DMatrix<Complex64>>,
    n_j: usize,
    n_r: usize,
    n: usize,
}

impl MainDecoder {
    pub fn new(ch: &MainChannel, cb: &Codebook) -> Result<Self> {
        if cb.n_t() != ch.n_t() {
            return dim("codebook and channel disagree on N_T");
        }
        let cov = crate::channel::effective_noise_cov(ch).into_inner();
        let l = cov
            .cholesky()
            .ok_or_else(|| WiretapError::Numerical("noise covariance is not positive definite".into()))?
            .l();
        let h = ch.h().inner();
        let images = cb
            .codewords()
            .iter()
            .map(|x| whiten(&l, &(h * x.inner())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            l,
            images,
            n_j: cb.n_j(),
            n_r: ch.n_r(),
            n: cb.n(),
        })
    }

    /// Returns the decoded `(i, j)`.
    pub fn decode(&self, y: &ComplexMat) -> Result<(usize, usize)> {
        if y.shape() != (self.n_r, self.n) {
            return dim(format!("observation must be {}x{}", self.n_r, self.n));
        }
        let w = whiten(&self.l, y.inner())?;
        let k = argmin(&w, self.images.iter());
        Ok((k / self.n_j, k % self.n_j))
    }
}

fn whiten(l: &DMatrix<Complex64>, m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    l.solve_lower_triangular(m)
        .ok_or_else(|| WiretapError::Numerical("singular whitening factor".into()))
}

pub fn ml_decode_main(y: &ComplexMat, ch: &MainChannel, cb: &Codebook) -> Result<(usize, usize)> {
    MainDecoder::new(ch, cb)?.decode(y)
}

/// Noiseless eavesdropper images `H̃ x` of every codeword.
pub fn eve_images(cb: &Codebook, trace: &EveTrace) -> Result<Vec<DMatrix<Complex64>>> {
    cb.codewords()
        .iter()
        .map(|x| crate::channel::eve_observe(x, trace).map(ComplexMat::into_inner))
        .collect()
}

/// Fictitious eavesdropper that knows the bin `i0` and decodes `j` by
/// minimum distance (its equivalent noise is white).
#[derive(Clone, Debug)]
pub struct EveBinDecoder {
    images: Vec<DMatrix<Complex64>>,
    n_i: usize,
    n_j: usize,
    n_e: usize,
    n: usize,
}

impl EveBinDecoder {
    pub fn new(trace: &EveTrace, cb: &Codebook) -> Result<Self> {
        Ok(Self {
            images: eve_images(cb, trace)?,
            n_i: cb.n_i(),
            n_j: cb.n_j(),
            n_e: trace.n_e(),
            n: cb.n(),
        })
    }

    pub fn images(&self) -> &[DMatrix<Complex64>] {
        &self.images
    }

    pub fn decode(&self, z: &ComplexMat, i0: usize) -> Result<usize> {
        if i0 >= self.n_i {
            return invalid(format!("bin {i0} out of range 0..{}", self.n_i));
        }
        if z.shape() != (self.n_e, self.n) {
            return dim(format!("observation must be {}x{}", self.n_e, self.n));
        }
        let bin = &self.images[i0 * self.n_j..(i0 + 1) * self.n_j];
        Ok(argmin(z.inner(), bin.iter()))
    }
}

pub fn eve_bin_decode(z: &ComplexMat, i0: usize, trace: &EveTrace, cb: &Codebook) -> Result<usize> {
    EveBinDecoder::new(trace, cb)?.decode(z, i0)
}
