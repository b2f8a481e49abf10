//! Monte Carlo estimators for decoding error, information density,
//! variational-distance leakage and the supporting bound checks.
//!
//! Every estimator takes a master seed. Trials are split into fixed chunks
//! with their own derived streams, so results do not depend on the size of
//! the rayon pool.

use std::f64::consts::{LN_2, LOG2_E, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{eve_observe, EveState, EveTrace, MainChannel, PowerConfig};
use crate::codebook::{encode, eve_images, sample_codebook, BinningParams, Codebook, EveBinDecoder, MainDecoder, ToyCaps};
use crate::error::{dim, invalid, Result};
use crate::linalg::ComplexMat;
use crate::mc::{self, log_sum_exp, op, Moments};
use crate::noise::{gaussian_matrix, NoiseSource};
use crate::quantization::{chernoff_exponent, truncation_exponent, truncation_mass, TailSide};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    Gaussian,
    /// No artificial or receiver noise.
    Silent,
}

#[derive(Clone, Copy, Debug)]
pub enum DecodeTarget<'a> {
    /// Legitimate receiver decoding `(i, j)`.
    Main(&'a MainChannel),
    /// Eavesdropper decoding `j` given the bin.
    Eve(&'a EveTrace),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub rate: f64,
    pub stderr: f64,
    pub errors: usize,
    pub trials: usize,
}

fn sq_dist(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum()
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return invalid("Monte Carlo budget must be >= 1");
    }
    Ok(())
}

/// Average block error over uniformly chosen codewords.
pub fn estimate_decode_error(
    cb: &Codebook,
    target: DecodeTarget<'_>,
    noise: NoiseModel,
    trials: usize,
    seed: u64,
) -> Result<ErrorEstimate> {
    check_trials(trials)?;
    let counts: Vec<usize> = match target {
        DecodeTarget::Main(ch) => {
            let dec = MainDecoder::new(ch, cb)?;
            let run = |rng: &mut rand_chacha::ChaCha8Rng, _: usize, count: usize| -> Result<usize> {
                let mut errors = 0;
                for _ in 0..count {
                    let k = rng.random_range(0..cb.len());
                    let x = &cb.codewords()[k];
                    let y = match noise {
                        NoiseModel::Gaussian => {
                            let tx = crate::channel::transmit(x, rng);
                            crate::channel::main_observe(&tx, ch, rng)?
                        }
                        NoiseModel::Silent => ch.h().matmul(x)?,
                    };
                    let (i, j) = dec.decode(&y)?;
                    if cb.index(i, j) != k {
                        errors += 1;
                    }
                }
                Ok(errors)
            };
            mc::run_chunks(seed, op::DECODE_ERROR, trials, run)
                .into_iter()
                .collect::<Result<_>>()?
        }
        DecodeTarget::Eve(trace) => {
            let dec = EveBinDecoder::new(trace, cb)?;
            let run = |rng: &mut rand_chacha::ChaCha8Rng, _: usize, count: usize| -> Result<usize> {
                let mut errors = 0;
                for _ in 0..count {
                    let i0 = rng.random_range(0..cb.n_i());
                    let j = rng.random_range(0..cb.n_j());
                    let img = &dec.images()[cb.index(i0, j)];
                    let z = match noise {
                        NoiseModel::Gaussian => {
                            let an = gaussian_matrix(cb.n_t(), cb.n(), 1.0, rng);
                            img + eve_observe(&an, trace)?.inner()
                        }
                        NoiseModel::Silent => img.clone(),
                    };
                    if dec.decode(&ComplexMat::from_inner(z)?, i0)? != j {
                        errors += 1;
                    }
                }
                Ok(errors)
            };
            mc::run_chunks(seed, op::DECODE_ERROR, trials, run)
                .into_iter()
                .collect::<Result<_>>()?
        }
    };
    let errors: usize = counts.iter().sum();
    Ok(ErrorEstimate {
        rate: errors as f64 / trials as f64,
        stderr: mc::binomial_stderr(errors, trials),
        errors,
        trials,
    })
}

/// Information density of `(x, z)` under Gaussian inputs, in bits per use:
/// `N_E log2 P' + ((1/n)‖z‖²/P' - (1/n)‖z - H̃x‖²) log2 e`.
pub fn info_density(x: &ComplexMat, z: &ComplexMat, trace: &EveTrace, pc: &PowerConfig) -> Result<f64> {
    let n = x.cols();
    if z.cols() != n || z.rows() != trace.n_e() {
        return dim("observation shape does not match the trace and codeword");
    }
    let resid = z.sub(&eve_observe(x, trace)?)?.norm_sq();
    Ok(info_density_from_norms(z.norm_sq(), resid, n, trace.n_e(), pc.p_prime()))
}

fn info_density_from_norms(z_sq: f64, resid_sq: f64, n: usize, n_e: usize, p_prime: f64) -> f64 {
    let nf = n as f64;
    n_e as f64 * p_prime.log2() + (z_sq / p_prime / nf - resid_sq / nf) * LOG2_E
}

/// How eavesdropper states are drawn for tail experiments.
#[derive(Clone, Debug)]
pub enum TraceFamily {
    /// The same state at every channel use.
    Constant(EveState),
    /// A fresh Haar-random trace for every chunk of trials.
    Haar { n_e: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub n: usize,
    pub hits: usize,
    pub trials: usize,
    pub estimate: f64,
    pub stderr: f64,
    /// 95% Clopper-Pearson upper limit, informative when `hits == 0`.
    pub cp_upper: f64,
    /// MC mean of `(1/n) i` and its standard error.
    pub mean_density: f64,
    pub mean_stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub points: Vec<TailPoint>,
    /// `N_E log2 P'`.
    pub center: f64,
    /// Least-squares slope of the natural-log tail against `n`; zero-hit
    /// points enter through their Clopper-Pearson limit.
    pub slope: f64,
    /// Decay rate guaranteed by the Chernoff decomposition.
    pub chernoff_floor: f64,
}

/// Rate floor `N_E α_upper(ε₂)` with `ε₂ = δ / (2 N_E log2 e)`: the weaker
/// of the two exponential-average tails in the union bound.
pub fn info_density_chernoff_floor(delta: f64, n_e: usize) -> Result<f64> {
    let eps2 = delta / (2.0 * n_e as f64 * LOG2_E);
    let up = chernoff_exponent(eps2, TailSide::Upper)?;
    let low = if eps2 < 1.0 {
        chernoff_exponent(eps2, TailSide::Lower)?
    } else {
        f64::INFINITY
    };
    Ok(n_e as f64 * up.min(low))
}

/// Estimates `Pr[(1/n) i > N_E log2 P' + δ]` for each `n` under untruncated
/// Gaussian inputs.
pub fn info_density_tail(
    ns: &[usize],
    delta: f64,
    pc: &PowerConfig,
    family: &TraceFamily,
    trials: usize,
    seed: u64,
) -> Result<TailReport> {
    check_trials(trials)?;
    if !(delta > 0.0) {
        return invalid("delta must be > 0");
    }
    if ns.is_empty() || ns.contains(&0) {
        return invalid("blocklengths must be >= 1");
    }
    let n_e = match family {
        TraceFamily::Constant(st) => st.n_e(),
        TraceFamily::Haar { n_e } => *n_e,
    };
    if n_e == 0 || n_e > pc.n_t {
        return invalid("need 1 <= N_E <= N_T");
    }
    if let TraceFamily::Constant(st) = family {
        if st.n_t() != pc.n_t {
            return dim("state does not match N_T");
        }
    }
    let center = n_e as f64 * pc.p_prime().log2();
    let var = pc.per_antenna_var();
    let mut points = Vec::with_capacity(ns.len());
    for (idx, &n) in ns.iter().enumerate() {
        let master = mc::derive_seed(seed, op::INFO_DENSITY, idx as u64);
        let parts = mc::run_chunks(master, op::INFO_DENSITY, trials, |rng, _, count| -> Result<(usize, Moments)> {
            let trace = match family {
                TraceFamily::Constant(st) => EveTrace::constant(st.clone(), n)?,
                TraceFamily::Haar { n_e } => EveTrace::haar(*n_e, pc.n_t, n, rng)?,
            };
            let mut hits = 0;
            let mut m = Moments::default();
            for _ in 0..count {
                let x = gaussian_matrix(pc.n_t, n, var, rng);
                let an = gaussian_matrix(pc.n_t, n, 1.0, rng);
                let z = eve_observe(&x.add(&an)?, &trace)?;
                let i = info_density(&x, &z, &trace, pc)?;
                if i > center + delta {
                    hits += 1;
                }
                m.push(i);
            }
            Ok((hits, m))
        });
        let mut hits = 0;
        let mut moments = Moments::default();
        for part in parts {
            let (h, m) = part?;
            hits += h;
            moments = moments.merge(m);
        }
        points.push(TailPoint {
            n,
            hits,
            trials,
            estimate: hits as f64 / trials as f64,
            stderr: mc::binomial_stderr(hits, trials),
            cp_upper: mc::clopper_pearson_upper(hits, trials, 0.05),
            mean_density: moments.mean(),
            mean_stderr: moments.stderr(),
        });
    }
    let slope = if points.len() >= 2 {
        let xs: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
        let ys: Vec<f64> = points
            .iter()
            .map(|p| if p.hits > 0 { p.estimate.ln() } else { p.cp_upper.ln() })
            .collect();
        mc::ols_slope(&xs, &ys)
    } else {
        f64::NAN
    };
    Ok(TailReport {
        points,
        center,
        slope,
        chernoff_floor: info_density_chernoff_floor(delta, n_e)?,
    })
}

/// Reference density for the variational-distance estimator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    /// The codebook's per-bin output mixture.
    Mixture,
    /// Test mode: the mixture is replaced by the Gaussian marginal itself.
    Marginal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageEstimate {
    /// Normalized variational distance to the Gaussian output, in `[0, 1]`.
    pub d_hat: f64,
    pub stderr: f64,
    /// Mutual-information estimate in bits, when computed.
    pub mi_hat: Option<f64>,
    pub mi_stderr: Option<f64>,
    /// Leakage bound `d log2(|W|/d)` at `d = min(1, 4 d̂ + 8 e^{-n α(eps_P)})`.
    pub leakage_bound: f64,
    /// Samples whose log density ratio left the double range.
    pub saturated: usize,
}

/// `d log2(|W| / d)`, zero at `d = 0`.
pub fn leakage_from_distance(d: f64, w_count: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&d) {
        return invalid(format!("distance must lie in [0, 1], got {d}"));
    }
    if w_count == 0 {
        return invalid("message set must be non-empty");
    }
    if d == 0.0 {
        return Ok(0.0);
    }
    Ok(d * (w_count as f64 / d).log2())
}

/// Maps the estimated distance to the untruncated Gaussian output onto the
/// leakage bound: `d = min(1, 4 d̂ + 8 e^{-n α(eps_P)})`.
pub fn leakage_bound(d_hat: f64, n: usize, pc: &PowerConfig, w_count: usize) -> Result<f64> {
    let alpha = truncation_exponent(pc.eps_p, pc.n_t)?;
    let d = (4.0 * d_hat.max(0.0) + 8.0 * (-(n as f64) * alpha).exp()).min(1.0);
    leakage_from_distance(d, w_count)
}

/// Importance-sampling estimate of
/// `½ (1/|W'|) Σ_w ∫ |f_G(z) - f_{C|w}(z)| dz` with `z ~ f_G = CN(0, P' I)`,
/// using the bounded integrand `(1 - f_{C|w}/f_G)⁺`.
pub fn estimate_variational_distance(
    cb: &Codebook,
    trace: &EveTrace,
    pc: &PowerConfig,
    w_subset: &[usize],
    samples: usize,
    reference: Reference,
    seed: u64,
) -> Result<LeakageEstimate> {
    check_trials(samples)?;
    if w_subset.is_empty() {
        return invalid("message subset is empty");
    }
    if let Some(&w) = w_subset.iter().find(|&&w| w >= cb.n_i()) {
        return invalid(format!("message {w} out of range 0..{}", cb.n_i()));
    }
    let images = eve_images(cb, trace)?;
    let (n, n_e) = (cb.n(), trace.n_e());
    let p_prime = pc.p_prime();
    let log_norm = (n * n_e) as f64 * p_prime.ln() - (cb.n_j() as f64).ln();
    let total = w_subset.len() * samples;
    let parts = mc::run_chunks(seed, op::VARIATIONAL, total, |rng, start, count| {
        let mut m = Moments::default();
        let mut saturated = 0;
        let mut logs = vec![0.0; cb.n_j()];
        for t in start..start + count {
            let w = w_subset[t / samples];
            let z = gaussian_matrix(n_e, n, p_prime, rng).into_inner();
            let log_ratio = match reference {
                Reference::Marginal => 0.0,
                Reference::Mixture => {
                    for (j, l) in logs.iter_mut().enumerate() {
                        *l = -sq_dist(&z, &images[cb.index(w, j)]);
                    }
                    log_norm + z.iter().map(|v| v.norm_sqr()).sum::<f64>() / p_prime + log_sum_exp(&logs)
                }
            };
            if !(-745.0..=709.0).contains(&log_ratio) {
                saturated += 1;
            }
            m.push((1.0 - log_ratio.exp()).max(0.0));
        }
        (m, saturated)
    });
    let mut moments = Moments::default();
    let mut saturated = 0;
    for (m, s) in parts {
        moments = moments.merge(m);
        saturated += s;
    }
    let d_hat = moments.mean().clamp(0.0, 1.0);
    Ok(LeakageEstimate {
        d_hat,
        stderr: moments.stderr(),
        mi_hat: None,
        mi_stderr: None,
        leakage_bound: leakage_bound(d_hat, n, pc, cb.n_i())?,
        saturated,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiEstimate {
    pub mi_hat: f64,
    pub stderr: f64,
}

/// `I(W; Ỹ) = E[log2 f_{C|W}(Ỹ) / f_C(Ỹ)]` with uniform messages and bin
/// indices, evaluated with exact mixture densities.
pub fn estimate_leakage_mi(cb: &Codebook, trace: &EveTrace, samples: usize, seed: u64) -> Result<MiEstimate> {
    check_trials(samples)?;
    if cb.n_i() == 1 {
        return Ok(MiEstimate { mi_hat: 0.0, stderr: 0.0 });
    }
    let images = eve_images(cb, trace)?;
    let ln_ni = (cb.n_i() as f64).ln();
    let parts = mc::run_chunks(seed, op::LEAKAGE_MI, samples, |rng, _, count| -> Result<Moments> {
        let mut m = Moments::default();
        let mut all = vec![0.0; cb.len()];
        for _ in 0..count {
            let k = rng.random_range(0..cb.len());
            let w = k / cb.n_j();
            let an = gaussian_matrix(cb.n_t(), cb.n(), 1.0, rng);
            let z = &images[k] + eve_observe(&an, trace)?.inner();
            for (l, img) in all.iter_mut().zip(&images) {
                *l = -sq_dist(&z, img);
            }
            // Common constants cancel; the ratio keeps ln N_i.
            let own = log_sum_exp(&all[w * cb.n_j()..(w + 1) * cb.n_j()]);
            let mix = log_sum_exp(&all);
            m.push((own - mix + ln_ni) / LN_2);
        }
        Ok(m)
    });
    let m = Moments::combine(parts.into_iter().collect::<Result<Vec<_>>>()?);
    Ok(MiEstimate {
        mi_hat: m.mean(),
        stderr: m.stderr(),
    })
}

/// Runs both leakage estimators on all bins and attaches the mutual
/// information to the distance estimate.
pub fn estimate_leakage(
    cb: &Codebook,
    trace: &EveTrace,
    pc: &PowerConfig,
    samples: usize,
    seed: u64,
) -> Result<LeakageEstimate> {
    let all: Vec<usize> = (0..cb.n_i()).collect();
    let per_bin = samples.div_ceil(all.len()).max(1);
    let mut est = estimate_variational_distance(cb, trace, pc, &all, per_bin, Reference::Mixture, seed)?;
    let mi = estimate_leakage_mi(cb, trace, samples, seed)?;
    est.mi_hat = Some(mi.mi_hat);
    est.mi_stderr = Some(mi.stderr);
    Ok(est)
}

/// Monte Carlo acceptance rate of the power cap under Gaussian inputs.
pub fn estimate_truncation_mass(n: usize, pc: &PowerConfig, trials: usize, seed: u64) -> Result<(f64, f64)> {
    check_trials(trials)?;
    if n == 0 {
        return invalid("blocklength must be >= 1");
    }
    let var = pc.per_antenna_var();
    let cap = n as f64 * pc.p();
    let hits: usize = mc::run_chunks(seed, op::TRUNCATION, trials, |rng, _, count| {
        (0..count)
            .filter(|_| gaussian_matrix(pc.n_t, n, var, rng).norm_sq() <= cap)
            .count()
    })
    .into_iter()
    .sum();
    Ok((hits as f64 / trials as f64, mc::binomial_stderr(hits, trials)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationDistance {
    /// `4 (1 - μ̂)` from Monte Carlo.
    pub estimate: f64,
    pub stderr: f64,
    /// `4 (1 - μ)` from the gamma CDF.
    pub exact: f64,
    /// `4 e^{-n α(eps_P)}`.
    pub bound: f64,
}

/// Surrogate `4 (1 - μ_{n,eps_P})` for the total variation between the
/// eavesdropper outputs under truncated and untruncated inputs, with its
/// exponential bound. The surrogate does not depend on the state sequence.
pub fn truncated_vs_gaussian_distance(n: usize, pc: &PowerConfig, samples: usize, seed: u64) -> Result<TruncationDistance> {
    if !(pc.eps_p > 0.0) {
        return invalid("the exponential bound needs eps_P > 0");
    }
    let (mu_hat, se) = estimate_truncation_mass(n, pc, samples, seed)?;
    let mu = truncation_mass(n, pc.n_t, pc.p(), pc.eps_p)?;
    let alpha = truncation_exponent(pc.eps_p, pc.n_t)?;
    Ok(TruncationDistance {
        estimate: 4.0 * (1.0 - mu_hat),
        stderr: 4.0 * se,
        exact: 4.0 * (1.0 - mu),
        bound: 4.0 * (-(n as f64) * alpha).exp(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondMomentCheck {
    /// MC estimate of `Σ_i E‖Ỹ_i‖²`.
    pub empirical: f64,
    pub stderr: f64,
    /// `n N_E (P + 1)`.
    pub bound: f64,
    /// `empirical <= bound + 3 stderr`.
    pub holds: bool,
}

/// Total eavesdropper output energy over uniform codewords plus artificial
/// noise, against `n N_E (P + 1)`.
pub fn eve_second_moment_check(cb: &Codebook, trace: &EveTrace, trials: usize, seed: u64) -> Result<SecondMomentCheck> {
    check_trials(trials)?;
    let images = eve_images(cb, trace)?;
    let parts = mc::run_chunks(seed, op::SECOND_MOMENT, trials, |rng, _, count| -> Result<Moments> {
        let mut m = Moments::default();
        for _ in 0..count {
            let k = rng.random_range(0..cb.len());
            let an = gaussian_matrix(cb.n_t(), cb.n(), 1.0, rng);
            let z = &images[k] + eve_observe(&an, trace)?.inner();
            m.push(z.iter().map(|v| v.norm_sqr()).sum());
        }
        Ok(m)
    });
    let m = Moments::combine(parts.into_iter().collect::<Result<Vec<_>>>()?);
    let bound = (cb.n() * trace.n_e()) as f64 * (cb.power_cap() + 1.0);
    Ok(SecondMomentCheck {
        empirical: m.mean(),
        stderr: m.stderr(),
        bound,
        holds: m.mean() <= bound + 3.0 * m.stderr(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryCheck {
    pub eta_a: f64,
    pub se_a: f64,
    pub eta_b: f64,
    pub se_b: f64,
    /// `|eta_a - eta_b| <= 3 sqrt(se_a² + se_b²)`.
    pub compatible: bool,
}

/// Averages the eavesdropper's in-bin decoding error over independently
/// sampled codebooks for each of two traces and tests the means for
/// equality. Standard errors come from the spread across codebooks.
#[allow(clippy::too_many_arguments)]
pub fn bin_error_symmetry_check(
    bp: &BinningParams,
    pc: &PowerConfig,
    trace_a: &EveTrace,
    trace_b: &EveTrace,
    n_codebooks: usize,
    trials: usize,
    caps: &ToyCaps,
    seed: u64,
) -> Result<SymmetryCheck> {
    if n_codebooks < 2 {
        return invalid("need at least 2 codebooks per trace");
    }
    check_trials(trials)?;
    if trace_a.n_e() != trace_b.n_e() || trace_a.n_t() != trace_b.n_t() || trace_a.len() != trace_b.len() {
        return dim("traces must have the same shape");
    }
    let eta = |trace: &EveTrace, side: u64| -> Result<Moments> {
        let mut m = Moments::default();
        for k in 0..n_codebooks as u64 {
            let book_seed = mc::derive_seed(seed, op::SYMMETRY, 2 * k + side);
            let cb = sample_codebook(bp, pc, caps, book_seed)?;
            let e = estimate_decode_error(&cb, DecodeTarget::Eve(trace), NoiseModel::Gaussian, trials, book_seed)?;
            m.push(e.rate);
        }
        Ok(m)
    };
    let a = eta(trace_a, 0)?;
    let b = eta(trace_b, 1)?;
    let combined = (a.stderr().powi(2) + b.stderr().powi(2)).sqrt();
    Ok(SymmetryCheck {
        eta_a: a.mean(),
        se_a: a.stderr(),
        eta_b: b.mean(),
        se_b: b.stderr(),
        compatible: (a.mean() - b.mean()).abs() <= 3.0 * combined,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoStageSymbol {
    pub k_index: usize,
    pub j: usize,
    pub codeword: ComplexMat,
    /// The codebook index, delivered over the stage-two link.
    pub stage2_payload: usize,
    /// Stage-two channel uses `ceil(log2 K / R0)`.
    pub stage2_len: usize,
}

/// Picks a codebook uniformly, encodes `w` with it and emits the index as
/// the stage-two payload. Stage two is modeled as reliable at rate `R0`.
pub fn two_stage_encode<R: Rng + ?Sized>(w: usize, books: &[Codebook], r0: f64, rng: &mut R) -> Result<TwoStageSymbol> {
    if books.is_empty() {
        return invalid("need at least one codebook");
    }
    if !(r0 > 0.0) {
        return invalid("stage-two rate must be > 0");
    }
    let k = if books.len() == 1 { 0 } else { rng.random_range(0..books.len()) };
    let (x, j) = encode(w, &books[k], rng)?;
    Ok(TwoStageSymbol {
        k_index: k,
        j,
        codeword: x.clone(),
        stage2_payload: k,
        stage2_len: ((books.len() as f64).log2() / r0).ceil() as usize,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoStageLeakage {
    /// `(1/K) Σ_k d̂'_k`.
    pub mean_d: f64,
    pub stderr: f64,
    pub per_book: Vec<LeakageEstimate>,
}

/// Average variational distance of the `K`-codebook scheme, computed per
/// book with independent streams.
pub fn two_stage_distance(
    books: &[Codebook],
    trace: &EveTrace,
    pc: &PowerConfig,
    w_subset: &[usize],
    samples: usize,
    seed: u64,
) -> Result<TwoStageLeakage> {
    if books.is_empty() {
        return invalid("need at least one codebook");
    }
    let per_book = books
        .iter()
        .enumerate()
        .map(|(k, cb)| {
            let s = mc::derive_seed(seed, op::TWO_STAGE, k as u64);
            estimate_variational_distance(cb, trace, pc, w_subset, samples, Reference::Mixture, s)
        })
        .collect::<Result<Vec<_>>>()?;
    let k = per_book.len() as f64;
    Ok(TwoStageLeakage {
        mean_d: per_book.iter().map(|e| e.d_hat).sum::<f64>() / k,
        stderr: per_book.iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt() / k,
        per_book,
    })
}

/// Largest entry deviation of the empirical covariance of `H̃ N` from the
/// identity, over `samples` draws of `N ~ CN(0, I)`. Accepts any matrix so
/// that non-canonical states can serve as a negative control.
pub fn an_whiteness(ht: &ComplexMat, samples: usize, seed: u64) -> Result<f64> {
    check_trials(samples)?;
    let (n_e, n_t) = ht.shape();
    let parts = mc::run_chunks(seed, op::WHITENESS, samples, |rng, _, count| {
        let noise = gaussian_matrix(n_t, count, 1.0, rng);
        let y = ht.inner() * noise.inner();
        y.clone() * y.adjoint()
    });
    let mut acc = DMatrix::<Complex64>::zeros(n_e, n_e);
    for p in parts {
        acc += p;
    }
    let cov = ComplexMat::from_inner(acc / Complex64::new(samples as f64, 0.0))?;
    Ok(cov.max_abs_diff(&ComplexMat::identity(n_e)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputStats {
    /// Mean of `‖Ỹ‖²` over the block.
    pub mean_norm_sq: f64,
    pub stderr: f64,
    /// Counts of `‖Ỹ‖² / P'` falling between consecutive `edges`; values
    /// beyond the last edge land in a final overflow bin.
    pub histogram: Vec<usize>,
    /// Per-entry mean, pooled over channel uses.
    pub mean: Vec<Complex64>,
    /// Per-entry covariance `E[Ỹ Ỹ^H] / n`, pooled over channel uses.
    pub cov: ComplexMat,
    pub samples: usize,
}

/// Eavesdropper output statistics under untruncated Gaussian inputs with
/// artificial noise.
pub fn gaussian_output_stats(
    trace: &EveTrace,
    pc: &PowerConfig,
    samples: usize,
    edges: &[f64],
    seed: u64,
) -> Result<OutputStats> {
    check_trials(samples)?;
    if trace.n_t() != pc.n_t {
        return dim("trace does not match N_T");
    }
    if edges.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid("histogram edges must be strictly ascending");
    }
    let (n, n_e) = (trace.len(), trace.n_e());
    let var = pc.per_antenna_var();
    let p_prime = pc.p_prime();
    let bins = edges.len() + 1;
    let parts = mc::run_chunks(seed, op::OUTPUT, samples, |rng, _, count| -> Result<_> {
        let mut m = Moments::default();
        let mut hist = vec![0usize; bins];
        let mut cov = DMatrix::<Complex64>::zeros(n_e, n_e);
        let mut mean = vec![Complex64::new(0.0, 0.0); n_e];
        for _ in 0..count {
            let x = gaussian_matrix(pc.n_t, n, var, rng);
            let z = eve_view(&x, trace, rng)?.into_inner();
            let e: f64 = z.iter().map(|v| v.norm_sqr()).sum();
            m.push(e);
            hist[edges.partition_point(|&b| b <= e / p_prime)] += 1;
            cov += &z * z.adjoint();
            for (r, acc) in mean.iter_mut().enumerate() {
                *acc += z.row(r).sum();
            }
        }
        Ok((m, hist, cov, mean))
    });
    let mut moments = Moments::default();
    let mut histogram = vec![0usize; bins];
    let mut cov = DMatrix::<Complex64>::zeros(n_e, n_e);
    let mut mean = vec![Complex64::new(0.0, 0.0); n_e];
    for part in parts {
        let (m, h, c, mu) = part?;
        moments = moments.merge(m);
        histogram.iter_mut().zip(h).for_each(|(a, b)| *a += b);
        cov += c;
        mean.iter_mut().zip(mu).for_each(|(a, b)| *a += b);
    }
    let pooled = (samples * n) as f64;
    Ok(OutputStats {
        mean_norm_sq: moments.mean(),
        stderr: moments.stderr(),
        histogram,
        mean: mean.into_iter().map(|v| v / pooled).collect(),
        cov: ComplexMat::from_inner(cov / Complex64::new(pooled, 0.0))?,
        samples,
    })
}

/// Density of `CN(0, var I)` at `z`, in nats.
pub fn gaussian_log_density(z: &ComplexMat, var: f64) -> f64 {
    let d = (z.rows() * z.cols()) as f64;
    -d * (PI * var).ln() - z.norm_sq() / var
}

/// Draws `X = X̃ + N` and the eavesdropper's view with any noise source.
pub fn eve_view<N: NoiseSource + ?Sized>(x: &ComplexMat, trace: &EveTrace, noise: &mut N) -> Result<ComplexMat> {
    let tx = crate::channel::transmit(x, noise);
    eve_observe(&tx, trace)
}
