//! Eavesdropper-state quantization, continuity bounds, tail and error
//! exponents, and the parameter schedule of the correlation-elimination
//! scheme.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_lr;

use crate::channel::{EveState, EveTrace, MainChannel, PowerConfig};
use crate::error::{dim, invalid, Result};
use crate::linalg::ComplexMat;

/// Lattice of `N_E × N_T` matrices whose entries have real and imaginary
/// parts in `(1/M) Z ∩ [-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantGrid {
    pub m: u64,
    pub n_t: usize,
    pub n_e: usize,
}

impl QuantGrid {
    pub fn new(m: u64, n_t: usize, n_e: usize) -> Result<Self> {
        if m == 0 {
            return invalid("grid density M must be >= 1");
        }
        if n_t == 0 || n_e == 0 || n_e > n_t {
            return invalid(format!("need 1 <= N_E <= N_T, got N_E={n_e}, N_T={n_t}"));
        }
        Ok(Self { m, n_t, n_e })
    }

    /// Squared error bound per row, `2 N_T / M²`.
    pub fn row_error_bound(&self) -> f64 {
        row_error_bound(self.m, self.n_t)
    }

    pub fn quantize(&self, st: &EveState) -> Result<ComplexMat> {
        if st.n_e() != self.n_e || st.n_t() != self.n_t {
            return dim("state shape does not match the grid");
        }
        quantize_eve(st, self.m)
    }

    /// Whether `h` is a grid point.
    pub fn contains(&self, h: &ComplexMat) -> bool {
        let m = self.m as f64;
        let on_lattice = |v: f64| {
            let s = v * m;
            (s - s.round()).abs() <= 1e-9 * m.max(1.0) && v.abs() <= 1.0 + 1e-12
        };
        h.shape() == (self.n_e, self.n_t)
            && h.inner().iter().all(|z| on_lattice(z.re) && on_lattice(z.im))
    }

    /// Natural log of the number of grid points for a length-`n` sequence.
    pub fn log_size(&self, n: usize) -> f64 {
        grid_log_size(self.m, self.n_t, self.n_e, n)
    }
}

pub fn row_error_bound(m: u64, n_t: usize) -> f64 {
    2.0 * n_t as f64 / (m as f64 * m as f64)
}

fn round_to(v: f64, m: f64) -> f64 {
    // f64::round breaks ties away from zero.
    (v * m).round() / m
}

/// Rounds each real and imaginary part to the nearest multiple of `1/M`.
pub fn quantize_matrix(h: &ComplexMat, m: u64) -> Result<ComplexMat> {
    if m == 0 {
        return invalid("grid density M must be >= 1");
    }
    let mf = m as f64;
    let q = h
        .inner()
        .map(|z| Complex64::new(round_to(z.re, mf), round_to(z.im, mf)));
    ComplexMat::from_inner(q)
}

pub fn quantize_eve(st: &EveState, m: u64) -> Result<ComplexMat> {
    quantize_matrix(st.matrix(), m)
}

/// Quantizes every state of a trace.
pub fn quantize_trace(trace: &EveTrace, m: u64) -> Result<Vec<ComplexMat>> {
    trace.states().iter().map(|s| quantize_eve(s, m)).collect()
}

/// `ln |S_M| = 2 N_T N_E n ln(2M + 1)`.
pub fn grid_log_size(m: u64, n_t: usize, n_e: usize, n: usize) -> f64 {
    2.0 * (n_t * n_e * n) as f64 * (2.0 * m as f64 + 1.0).ln()
}

/// [`grid_log_size`] with `M` given by its natural log, for schedules where
/// `M` itself overflows.
pub fn grid_log_size_from_log_m(log_m: f64, n_t: usize, n_e: usize, n: usize) -> f64 {
    // ln(2M + 1) = ln M + ln(2 + 1/M)
    let ln_2m1 = if log_m > 0.0 {
        log_m + (2.0 + (-log_m).exp()).ln()
    } else {
        (2.0 * log_m.exp() + 1.0).ln()
    };
    2.0 * (n_t * n_e * n) as f64 * ln_2m1
}

/// Radii of the log-likelihood continuity argument:
/// `r'² = 2 N_T N_E P / M²` and `r = r' + sqrt(N_E (1 + eps))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationRadii {
    pub r_prime: f64,
    pub r: f64,
    pub eps: f64,
}

impl PerturbationRadii {
    pub fn g(&self) -> f64 {
        g_bound(self)
    }
}

pub fn perturbation_radii(p: f64, n_t: usize, n_e: usize, m: u64, eps: f64) -> Result<PerturbationRadii> {
    if !(p >= 0.0) || !p.is_finite() {
        return invalid(format!("power must be finite and >= 0, got {p}"));
    }
    if n_t == 0 || n_e == 0 || m == 0 {
        return invalid("N_T, N_E and M must be >= 1");
    }
    if !(eps > 0.0) {
        return invalid(format!("eps must be > 0, got {eps}"));
    }
    let r_prime = (2.0 * (n_t * n_e) as f64 * p).sqrt() / m as f64;
    Ok(PerturbationRadii {
        r_prime,
        r: r_prime + (n_e as f64 * (1.0 + eps)).sqrt(),
        eps,
    })
}

/// `g(r, r') = r' (2r + r')`.
pub fn g_bound(radii: &PerturbationRadii) -> f64 {
    radii.r_prime * (2.0 * radii.r + radii.r_prime)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PerturbationOutcome {
    Holds,
    Violated,
    /// A precondition of the bound failed; the reason is attached.
    NotApplicable(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationCheck {
    /// `|ln f_A(z|x) - ln f_B(z|x)|` in nats.
    pub lhs: f64,
    /// `n g(r, r')`.
    pub rhs: f64,
    pub outcome: PerturbationOutcome,
}

impl PerturbationCheck {
    pub fn holds(&self) -> bool {
        self.outcome == PerturbationOutcome::Holds
    }

    pub fn applicable(&self) -> bool {
        !matches!(self.outcome, PerturbationOutcome::NotApplicable(_))
    }
}

/// `H̃(i) x_i` column by column for an arbitrary matrix sequence.
fn observe_seq(x: &ComplexMat, hs: &[ComplexMat]) -> Result<ComplexMat> {
    let rows = hs[0].rows();
    let mut out = nalgebra::DMatrix::zeros(rows, x.cols());
    for (i, h) in hs.iter().enumerate() {
        out.set_column(i, &(h.inner() * x.inner().column(i)));
    }
    ComplexMat::from_inner(out)
}

/// Compares the Gaussian log-likelihoods of `z` given codeword `x` under two
/// state sequences against `n g(r, r')`, with radii built from `p`, `m` and
/// `eps`. The sequences are plain matrices so that grid points, which are
/// not orthonormal in general, can be used directly; `hs_a` is the one the
/// typical-residual condition refers to.
pub fn check_loglik_perturbation(
    x: &ComplexMat,
    z: &ComplexMat,
    hs_a: &[ComplexMat],
    hs_b: &[ComplexMat],
    p: f64,
    m: u64,
    eps: f64,
) -> Result<PerturbationCheck> {
    let n = x.cols();
    if n == 0 || z.cols() != n || hs_a.len() != n || hs_b.len() != n {
        return dim("codeword, observation and state sequences must share the blocklength");
    }
    let shape = hs_a[0].shape();
    if hs_a.iter().chain(hs_b).any(|h| h.shape() != shape) {
        return dim("all states must have the same shape");
    }
    let (n_e, n_t) = shape;
    if z.rows() != n_e || x.rows() != n_t {
        return dim("codeword or observation shape does not match the states");
    }
    let radii = perturbation_radii(p, n_t, n_e, m, eps)?;
    let rhs = n as f64 * radii.g();

    let res_a = z.sub(&observe_seq(x, hs_a)?)?.norm_sq();
    let res_b = z.sub(&observe_seq(x, hs_b)?)?.norm_sq();
    let lhs = (res_a - res_b).abs();

    let bound = row_error_bound(m, n_t);
    let rows_ok = hs_a.iter().zip(hs_b).all(|(a, b)| {
        let d = a.sub(b).expect("same shape");
        (0..n_e).all(|r| d.row_norm_sq(r) < bound)
    });
    let outcome = if !rows_ok {
        PerturbationOutcome::NotApplicable("state difference exceeds the per-row bound".into())
    } else if x.norm_sq() / n as f64 > p {
        PerturbationOutcome::NotApplicable("codeword exceeds the power cap".into())
    } else if res_a / n as f64 >= radii.r * radii.r {
        PerturbationOutcome::NotApplicable("residual outside the typical radius".into())
    } else if lhs <= rhs {
        PerturbationOutcome::Holds
    } else {
        PerturbationOutcome::Violated
    };
    Ok(PerturbationCheck { lhs, rhs, outcome })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailSide {
    /// Average of unit-mean exponentials above `1 + eps`.
    Upper,
    /// Average below `1 - eps`.
    Lower,
}

/// Cramér rate of a unit-mean exponential average leaving `[1-eps, 1+eps]`
/// on the chosen side.
pub fn chernoff_exponent(eps: f64, side: TailSide) -> Result<f64> {
    match side {
        TailSide::Upper => {
            if !(eps > 0.0) || !eps.is_finite() {
                return invalid(format!("upper tail needs eps > 0, got {eps}"));
            }
            Ok(eps - eps.ln_1p())
        }
        TailSide::Lower => {
            if !(eps > 0.0 && eps < 1.0) {
                return invalid(format!("lower tail needs 0 < eps < 1, got {eps}"));
            }
            Ok(-eps - (-eps).ln_1p())
        }
    }
}

/// Probability that an i.i.d. `CN(0, P (1-eps_P)/N_T)` block of length `n`
/// meets the power cap `(1/n)‖x‖² <= P`.
pub fn truncation_mass(n: usize, n_t: usize, p: f64, eps_p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return invalid(format!("truncation needs P > 0, got {p}"));
    }
    if !(0.0..1.0).contains(&eps_p) {
        return invalid(format!("eps_P must lie in [0, 1), got {eps_p}"));
    }
    if n == 0 || n_t == 0 {
        return invalid("n and N_T must be >= 1");
    }
    let shape = (n * n_t) as f64;
    let scale = p * (1.0 - eps_p) / n_t as f64;
    Ok(gamma_lr(shape, n as f64 * p / scale))
}

/// Exponent `α(eps_P)` with `1 - μ_{n,eps_P} <= e^{-n α}`: the upper-tail
/// rate of the `n N_T` exponential entries overshooting their mean by the
/// factor `1/(1-eps_P)`.
pub fn truncation_exponent(eps_p: f64, n_t: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&eps_p) {
        return invalid(format!("eps_P must lie in [0, 1), got {eps_p}"));
    }
    if eps_p == 0.0 {
        return Ok(0.0);
    }
    let eta = eps_p / (1.0 - eps_p);
    Ok(n_t as f64 * chernoff_exponent(eta, TailSide::Upper)?)
}

/// Gaussian-input random coding exponent in bits:
/// `max_{ρ∈[0,1]} Σ ρ log2(1 + snr_i/(1+ρ)) - ρR`.
pub fn gallager_exponent(ch: &MainChannel, pc: &PowerConfig, rate: f64) -> Result<f64> {
    if !(rate >= 0.0) {
        return invalid(format!("rate must be >= 0, got {rate}"));
    }
    if pc.n_t != ch.n_t() {
        return invalid("power config does not match the channel");
    }
    let var = pc.per_antenna_var();
    let snr: Vec<f64> = ch
        .singular_values()
        .iter()
        .map(|s| s * s * var / (s * s + 1.0))
        .collect();
    let e0 = |rho: f64| -> f64 {
        snr.iter()
            .map(|&x| rho * (x / (1.0 + rho)).ln_1p() / std::f64::consts::LN_2)
            .sum::<f64>()
            - rho * rate
    };
    // E0(ρ) - ρR is concave in ρ: grid, then golden section on the best cell.
    const GRID: usize = 200;
    let mut best = 0;
    let mut best_val = e0(0.0);
    for k in 1..=GRID {
        let v = e0(k as f64 / GRID as f64);
        if v > best_val {
            best = k;
            best_val = v;
        }
    }
    let mut lo = (best.saturating_sub(1)) as f64 / GRID as f64;
    let mut hi = ((best + 1).min(GRID)) as f64 / GRID as f64;
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    while hi - lo > 1e-10 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        if e0(a) < e0(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    Ok(best_val.max(e0(0.5 * (lo + hi))).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFlags {
    /// `ε' < c'`.
    pub resolvability: bool,
    /// `ε' < α(ε)`.
    pub info_tail: bool,
    /// `ε' < α(ε_P)`.
    pub truncation: bool,
    /// `2ε' < E(R)`.
    pub error_exponent: bool,
    /// `1 + e² e^{-c'n} < 1 + e^{-ε'n}`.
    pub resolvability_length: bool,
    /// `2M + 1 <= e^{4ε'n}`.
    pub grid_length: bool,
    /// `n g(r, r') < e^{-1.5ε'n}`; needs radii context.
    pub perturbation: Option<bool>,
}

/// Parameters of the correlation-elimination schedule. `K` and `M` are kept
/// as natural logs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    pub eps_prime: f64,
    pub n: u64,
    pub eps_n: f64,
    pub log_k: f64,
    pub log_m: f64,
    pub flags: ScheduleFlags,
    /// Smallest `n` satisfying the `c'` condition, if any.
    pub min_n_resolvability: Option<u64>,
    /// Smallest `n` satisfying the grid-size condition, if any.
    pub min_n_grid: Option<u64>,
}

fn resolvability_length_holds(eps_prime: f64, c_prime: f64, n: u64) -> bool {
    let nf = n as f64;
    2.0 - c_prime * nf < -eps_prime * nf
}

fn grid_length_holds(eps_prime: f64, n: u64) -> bool {
    let log_m = 2.0 * eps_prime * n as f64;
    log_m + (2.0 + (-log_m).exp()).ln() <= 4.0 * eps_prime * n as f64
}

fn min_n_resolvability(eps_prime: f64, c_prime: f64) -> Option<u64> {
    let gap = c_prime - eps_prime;
    if !(gap > 0.0) {
        return None;
    }
    let guess = (2.0 / gap).floor();
    if guess >= u64::MAX as f64 / 2.0 {
        return None;
    }
    let mut n = (guess as u64).saturating_sub(1).max(1);
    while !resolvability_length_holds(eps_prime, c_prime, n) {
        n += 1;
    }
    Some(n)
}

fn min_n_grid(eps_prime: f64) -> Option<u64> {
    if !(eps_prime > 0.0) {
        return None;
    }
    // The condition is monotone in n: double, then bisect.
    let mut hi: u64 = 1;
    while !grid_length_holds(eps_prime, hi) {
        if hi > 1 << 62 {
            return None;
        }
        hi *= 2;
    }
    if hi == 1 {
        return Some(1);
    }
    // The previous doubling step failed at hi / 2.
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if grid_length_holds(eps_prime, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Schedule `ε_n = e^{-nε'}`, `K = M = e^{2ε'n}` with feasibility flags.
pub fn schedule_params(
    eps_prime: f64,
    n: u64,
    c_prime: f64,
    alpha_eps: f64,
    alpha_eps_p: f64,
    e_val: f64,
) -> Result<ScheduleParams> {
    if !(eps_prime >= 0.0) || !eps_prime.is_finite() {
        return invalid(format!("eps' must be finite and >= 0, got {eps_prime}"));
    }
    for (name, v) in [("c'", c_prime), ("alpha(eps)", alpha_eps), ("alpha(eps_P)", alpha_eps_p), ("E", e_val)] {
        if !(v > 0.0) || !v.is_finite() {
            return invalid(format!("{name} must be finite and > 0, got {v}"));
        }
    }
    let nf = n as f64;
    let flags = ScheduleFlags {
        resolvability: eps_prime < c_prime,
        info_tail: eps_prime < alpha_eps,
        truncation: eps_prime < alpha_eps_p,
        error_exponent: 2.0 * eps_prime < e_val,
        resolvability_length: resolvability_length_holds(eps_prime, c_prime, n),
        grid_length: grid_length_holds(eps_prime, n),
        perturbation: None,
    };
    Ok(ScheduleParams {
        eps_prime,
        n,
        eps_n: (-nf * eps_prime).exp(),
        log_k: 2.0 * eps_prime * nf,
        log_m: 2.0 * eps_prime * nf,
        flags,
        min_n_resolvability: min_n_resolvability(eps_prime, c_prime),
        min_n_grid: min_n_grid(eps_prime),
    })
}

impl ScheduleParams {
    /// Fills in the `n g(r, r') < e^{-1.5ε'n}` flag for grid density
    /// `M = e^{2ε'n}`, evaluated in the log domain.
    pub fn with_radii(mut self, p: f64, n_t: usize, n_e: usize, eps: f64) -> Result<Self> {
        if !(p >= 0.0) || n_t == 0 || n_e == 0 || !(eps > 0.0) {
            return invalid("radii need P >= 0, N_T, N_E >= 1 and eps > 0");
        }
        let ln_g_n = if p == 0.0 || self.n == 0 {
            f64::NEG_INFINITY
        } else {
            let ln_r_prime = 0.5 * (2.0 * (n_t * n_e) as f64 * p).ln() - self.log_m;
            let r_prime = ln_r_prime.exp();
            let r = r_prime + (n_e as f64 * (1.0 + eps)).sqrt();
            (self.n as f64).ln() + ln_r_prime + (2.0 * r + r_prime).ln()
        };
        self.flags.perturbation = Some(ln_g_n < -1.5 * self.eps_prime * self.n as f64);
        Ok(self)
    }
}

/// `ln(|S_M| e^{-ε_n K})` under the schedule, i.e.
/// `2 N_T N_E n ln(2M + 1) - e^{nε'}`.
pub fn union_log_quantity(eps_prime: f64, n: u64, n_t: usize, n_e: usize) -> f64 {
    let log_m = 2.0 * eps_prime * n as f64;
    grid_log_size_from_log_m(log_m, n_t, n_e, n as usize) - (n as f64 * eps_prime).exp()
}

/// Overhead of sending the codebook index: `c(ε') = 2ε' log2(e)/R₀ + 1` and
/// `n₂/n = 2ε' log2(e)/R₀`.
pub fn two_stage_overhead(eps_prime: f64, r0: f64) -> Result<(f64, f64)> {
    if !(r0 > 0.0) || !r0.is_finite() {
        return invalid(format!("stage-two rate R0 must be > 0, got {r0}"));
    }
    if !(eps_prime >= 0.0) {
        return invalid(format!("eps' must be >= 0, got {eps_prime}"));
    }
    let ratio = 2.0 * eps_prime * std::f64::consts::LOG2_E / r0;
    Ok((ratio + 1.0, ratio))
}

/// Empirical resolvability exponent: minus the least-squares slope of
/// `ln d̂'` against `n`. Zero estimates are skipped.
pub fn estimate_c_prime(ns: &[usize], d_hats: &[f64]) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = ns
        .iter()
        .zip(d_hats)
        .filter(|(_, &d)| d > 0.0)
        .map(|(&n, &d)| (n as f64, d.ln()))
        .unzip();
    if xs.len() < 2 {
        return None;
    }
    Some(-crate::mc::ols_slope(&xs, &ys))
}
