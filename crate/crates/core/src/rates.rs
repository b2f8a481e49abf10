//! Closed-form secrecy rates, secure degrees of freedom and converse bounds.

use serde::{Deserialize, Serialize};

use crate::channel::{MainChannel, PowerConfig};
use crate::error::{invalid, Result};

/// Which capacity function `C(x)` rates are expressed with.
///
/// `Full` is `log2(1 + x)`, the complex-channel capacity; `Half` is
/// `0.5 log2(1 + x)`, the per-real-dimension form. Every rate under `Half` is
/// exactly half its `Full` value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Full,
    Half,
}

impl Convention {
    pub fn factor(self) -> f64 {
        match self {
            Convention::Full => 1.0,
            Convention::Half => 0.5,
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "full" => Ok(Convention::Full),
            "half" => Ok(Convention::Half),
            other => Err(format!("unknown convention '{other}' (expected full|half)")),
        }
    }
}

/// How the eavesdropper's leakage term is computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeakageMode {
    /// `N_E · C(P)`, the conservative term in the achievable rate.
    #[default]
    Theorem,
    /// `N_E · C(P (1 - eps_P) / N_T)`, the leakage of the i.i.d. Gaussian input.
    Exact,
}

impl std::str::FromStr for LeakageMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "theorem" => Ok(LeakageMode::Theorem),
            "exact" => Ok(LeakageMode::Exact),
            other => Err(format!("unknown leakage mode '{other}' (expected theorem|exact)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecrecyRateResult {
    pub rate_bits: f64,
    pub main_mi: f64,
    pub leakage_cap: f64,
    pub clamped: bool,
}

/// `P = max(P̄ - N_TR, 0)`.
pub fn effective_power(pbar: f64, n_tr: usize) -> Result<f64> {
    if !(pbar >= 0.0) {
        return invalid(format!("power budget must be >= 0, got {pbar}"));
    }
    if n_tr == 0 {
        return invalid("N_TR must be >= 1");
    }
    Ok((pbar - n_tr as f64).max(0.0))
}

pub fn capacity_term(x: f64, conv: Convention) -> Result<f64> {
    if !(x >= 0.0) {
        return invalid(format!("capacity argument must be >= 0, got {x}"));
    }
    Ok(conv.factor() * x.ln_1p() / std::f64::consts::LN_2)
}

// Infallible variant for arguments that are nonnegative by construction.
fn cap(x: f64, conv: Convention) -> f64 {
    conv.factor() * x.max(0.0).ln_1p() / std::f64::consts::LN_2
}

/// Sum over the `N_TR` modes of `C(s_i² P / ((s_i² + 1) N_TR))`.
pub fn main_mutual_info(ch: &MainChannel, pc: &PowerConfig, conv: Convention) -> Result<f64> {
    if pc.n_tr != ch.n_m() || pc.n_t != ch.n_t() {
        return invalid(format!(
            "power config (N_TR={}, N_T={}) does not match a {}x{} channel",
            pc.n_tr,
            pc.n_t,
            ch.n_r(),
            ch.n_t()
        ));
    }
    Ok(mode_sum(ch.singular_values(), pc.p(), pc.n_tr, conv))
}

fn mode_sum(singular_values: &[f64], p: f64, n_tr: usize, conv: Convention) -> f64 {
    singular_values
        .iter()
        .map(|s| {
            let s2 = s * s;
            cap(s2 * p / ((s2 + 1.0) * n_tr as f64), conv)
        })
        .sum()
}

pub fn leakage_cap(pc: &PowerConfig, n_e: usize, mode: LeakageMode, conv: Convention) -> f64 {
    let arg = match mode {
        LeakageMode::Theorem => pc.p(),
        LeakageMode::Exact => pc.per_antenna_var(),
    };
    n_e as f64 * cap(arg, conv)
}

/// Achievable secrecy rate `max(I(X̃;Y) - N_E C(P), 0)`.
pub fn secrecy_rate(
    ch: &MainChannel,
    pc: &PowerConfig,
    n_e: usize,
    conv: Convention,
) -> Result<SecrecyRateResult> {
    let main_mi = main_mutual_info(ch, pc, conv)?;
    let leak = leakage_cap(pc, n_e, LeakageMode::Theorem, conv);
    Ok(SecrecyRateResult {
        rate_bits: (main_mi - leak).max(0.0),
        main_mi,
        leakage_cap: leak,
        clamped: main_mi <= leak,
    })
}

/// [`secrecy_rate`] at budget `pbar` with no truncation margin.
pub fn secrecy_rate_at(ch: &MainChannel, pbar: f64, n_e: usize, conv: Convention) -> Result<f64> {
    let pc = PowerConfig::for_channel(ch, pbar, 0.0)?;
    Ok(secrecy_rate(ch, &pc, n_e, conv)?.rate_bits)
}

/// Secure degrees of freedom `max(min(N_T, N_R) - N_E, 0)`.
pub fn sdof(n_t: usize, n_r: usize, n_e: usize) -> usize {
    n_t.min(n_r).saturating_sub(n_e)
}

/// Least-squares slope of `rate_fn(P̄)` against `log2 P̄`.
pub fn sdof_slope<F>(rate_fn: F, pbar_grid: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    validate_grid(pbar_grid)?;
    let xs: Vec<f64> = pbar_grid.iter().map(|p| p.log2()).collect();
    let ys = pbar_grid
        .iter()
        .map(|&p| rate_fn(p))
        .collect::<Result<Vec<_>>>()?;
    Ok(crate::mc::ols_slope(&xs, &ys))
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 3 {
        return invalid("power grid needs at least 3 points");
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid[0] <= 0.0 {
        return invalid("power grid must be positive and strictly ascending");
    }
    if *grid.last().unwrap() < 1e3 {
        return invalid("largest grid point must be >= 1e3");
    }
    Ok(())
}

/// The standard high-SNR grid `{1e3, 1e4, 1e5, 1e6}`.
pub fn default_pbar_grid() -> Vec<f64> {
    vec![1e3, 1e4, 1e5, 1e6]
}

/// Upper bound on the secrecy rate when the eavesdropper observes the `N_E`
/// strongest modes: `Σ_{i>N_E} C(d_i² P̄ / N_m)` over the remaining
/// (weakest) singular values. Only the `N_m = min(N_T, N_R)` inputs aligned
/// with the receiver carry information, so the full budget is spread over
/// those.
pub fn converse_rate_bound(ch: &MainChannel, pbar: f64, n_e: usize, conv: Convention) -> f64 {
    let n_m = ch.n_m() as f64;
    ch.singular_values()
        .iter()
        .skip(n_e)
        .map(|d| cap(d * d * pbar / n_m, conv))
        .sum()
}

/// Secrecy rate of a single time-sharing slot with `N_T` antennas on every
/// node, at backed-off power `p`: `[Σ C(s² p / ((s²+1) N_T)) - N_E C(p)]⁺`.
pub(crate) fn slot_rate(ch: &MainChannel, p: f64, n_e: usize, conv: Convention) -> f64 {
    let n_t = ch.n_t();
    (mode_sum(ch.singular_values(), p, n_t, conv) - n_e as f64 * cap(p, conv)).max(0.0)
}
