//! Channel matrices, canonical eavesdropper states, artificial noise and the
//! single-use observation models of the legitimate receiver and the
//! (noiseless) eavesdropper.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{dim, invalid, Result, WiretapError};
use crate::linalg::{complete_columns, ComplexMat};
use crate::noise::{gaussian_matrix, NoiseSource};

/// Relative numerical rank threshold: `s_min > RANK_TOL * s_max`.
pub const RANK_TOL: f64 = 1e-8;
/// Max-entry tolerance on `Ht Ht^H = I` for canonical eavesdropper states.
pub const ORTHONORMAL_TOL: f64 = 1e-9;

/// The static legitimate channel `H` (`N_R × N_T`), required to be full rank.
#[derive(Clone, Debug, PartialEq)]
pub struct MainChannel {
    h: ComplexMat,
    singular_values: Vec<f64>,
}

impl MainChannel {
    pub fn new(h: ComplexMat) -> Result<Self> {
        let singular_values = h.singular_values()?;
        check_rank(&singular_values)?;
        Ok(Self { h, singular_values })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(ComplexMat::identity(n)).expect("identity has full rank")
    }

    pub fn h(&self) -> &ComplexMat {
        &self.h
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn n_t(&self) -> usize {
        self.h.cols()
    }

    pub fn n_r(&self) -> usize {
        self.h.rows()
    }

    /// `min(N_T, N_R)`.
    pub fn n_m(&self) -> usize {
        self.singular_values.len()
    }
}

fn check_rank(sv: &[f64]) -> Result<()> {
    let largest = sv.first().copied().unwrap_or(0.0);
    let smallest = sv.last().copied().unwrap_or(0.0);
    let tolerance = RANK_TOL * largest;
    if largest <= 0.0 || smallest <= tolerance {
        return Err(WiretapError::RankDeficient {
            smallest,
            tolerance,
        });
    }
    Ok(())
}

/// `H = left · [D | 0] · right^H` with `D` diagonal `N_m × N_m`.
#[derive(Clone, Debug)]
pub struct ChannelReduction {
    pub d: ComplexMat,
    /// `N_R × N_R` unitary.
    pub left: ComplexMat,
    /// `N_T × N_T` unitary.
    pub right: ComplexMat,
}

impl ChannelReduction {
    /// `D` zero-padded to `N_R × N_T`.
    pub fn padded_d(&self) -> ComplexMat {
        let (r, c) = (self.left.rows(), self.right.rows());
        let k = self.d.rows();
        let m = DMatrix::from_fn(r, c, |i, j| {
            if i == j && i < k {
                self.d[(i, i)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        ComplexMat::from_inner(m).expect("finite")
    }

    pub fn reconstruct(&self) -> ComplexMat {
        self.left
            .matmul(&self.padded_d())
            .and_then(|m| m.matmul(&self.right.adjoint()))
            .expect("consistent shapes")
    }
}

/// Cancels the SVD unitaries of `H`, leaving the diagonal gain matrix.
pub fn reduce_main_channel(h: &ComplexMat) -> Result<ChannelReduction> {
    let svd = h.svd()?;
    check_rank(&svd.singular_values)?;
    let left = complete_columns(&svd.u);
    let right = complete_columns(&svd.v_h.adjoint());
    Ok(ChannelReduction {
        d: ComplexMat::diag(&svd.singular_values),
        left: ComplexMat::from_inner(left)?,
        right: ComplexMat::from_inner(right)?,
    })
}

/// An eavesdropper channel state in canonical form: `N_E × N_T` with
/// orthonormal rows (`Ht Ht^H = I`), which requires `N_E <= N_T`.
#[derive(Clone, Debug, PartialEq)]
pub struct EveState {
    ht: ComplexMat,
}

impl EveState {
    /// Wraps a matrix that is already canonical.
    pub fn new(ht: ComplexMat) -> Result<Self> {
        if ht.rows() > ht.cols() {
            return dim(format!(
                "eavesdropper has {} antennas but only {} transmit antennas",
                ht.rows(),
                ht.cols()
            ));
        }
        let deviation = orthonormality_deviation(&ht);
        if deviation > ORTHONORMAL_TOL {
            return Err(WiretapError::NotCanonical { deviation });
        }
        Ok(Self { ht })
    }

    /// `[I | 0]`.
    pub fn selector(n_e: usize, n_t: usize) -> Result<Self> {
        Self::new(ComplexMat::selector(n_e, n_t))
    }

    /// A Haar-distributed canonical state.
    pub fn haar<N: NoiseSource + ?Sized>(n_e: usize, n_t: usize, noise: &mut N) -> Result<Self> {
        canonicalize_eve(&gaussian_matrix(n_e, n_t, 1.0, noise))
    }

    pub fn matrix(&self) -> &ComplexMat {
        &self.ht
    }

    pub fn n_e(&self) -> usize {
        self.ht.rows()
    }

    pub fn n_t(&self) -> usize {
        self.ht.cols()
    }

    /// Covariance of the equivalent eavesdropper noise `Ht N`; identity.
    pub fn noise_cov(&self) -> ComplexMat {
        self.ht.matmul(&self.ht.adjoint()).expect("square")
    }

    /// Canonical form of `Ht · U` for an `N_T × N_T` matrix `U`.
    pub fn rotate(&self, u: &ComplexMat) -> Result<Self> {
        canonicalize_eve(&self.ht.matmul(u)?)
    }
}

fn orthonormality_deviation(ht: &ComplexMat) -> f64 {
    let gram = ht.matmul(&ht.adjoint()).expect("square");
    gram.max_abs_diff(&ComplexMat::identity(ht.rows()))
}

/// Maps an arbitrary eavesdropper matrix to canonical form.
///
/// The nonzero part is replaced by its polar factor `U V^H` (singular values
/// normalized to one, phase-free). Directions with zero gain are filled with
/// standard basis rows not already spanned, so the canonical eavesdropper
/// sees at least what the original one did.
pub fn canonicalize_eve(hraw: &ComplexMat) -> Result<EveState> {
    let (n_e, n_t) = hraw.shape();
    if n_e > n_t {
        return dim(format!(
            "eavesdropper has {n_e} antennas but only {n_t} transmit antennas"
        ));
    }
    let svd = hraw.svd()?;
    let largest = svd.singular_values.first().copied().unwrap_or(0.0);
    let rank = if largest > 0.0 {
        svd.singular_values
            .iter()
            .filter(|&&s| s > RANK_TOL * largest)
            .count()
    } else {
        0
    };
    let left = complete_columns(&svd.u.columns(0, rank).into_owned());
    let right_basis = complete_columns(&svd.v_h.rows(0, rank).adjoint());
    let rows = right_basis.columns(0, n_e).adjoint();
    let ht = ComplexMat::from_inner(left * rows)?;
    EveState::new(ht)
}

/// A length-`n` sequence of eavesdropper states sharing `(N_E, N_T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EveTrace {
    states: Vec<EveState>,
}

impl EveTrace {
    pub fn new(states: Vec<EveState>) -> Result<Self> {
        let Some(first) = states.first() else {
            return invalid("trace must contain at least one state");
        };
        let shape = first.matrix().shape();
        if states.iter().any(|s| s.matrix().shape() != shape) {
            return dim("all states of a trace must share (N_E, N_T)");
        }
        Ok(Self { states })
    }

    /// A static eavesdropper.
    pub fn constant(state: EveState, n: usize) -> Result<Self> {
        Self::new(vec![state; n])
    }

    /// Independent Haar-distributed states for each channel use.
    pub fn haar<N: NoiseSource + ?Sized>(
        n_e: usize,
        n_t: usize,
        n: usize,
        noise: &mut N,
    ) -> Result<Self> {
        let states = (0..n)
            .map(|_| EveState::haar(n_e, n_t, noise))
            .collect::<Result<Vec<_>>>()?;
        Self::new(states)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[EveState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &EveState {
        &self.states[i]
    }

    pub fn n_e(&self) -> usize {
        self.states[0].n_e()
    }

    pub fn n_t(&self) -> usize {
        self.states[0].n_t()
    }

    /// The state matrices, cloned.
    pub fn matrices(&self) -> Vec<ComplexMat> {
        self.states.iter().map(|s| s.matrix().clone()).collect()
    }

    /// Applies `f` to every state.
    pub fn map_states(&self, f: impl Fn(&EveState) -> Result<EveState>) -> Result<Self> {
        Self::new(self.states.iter().map(f).collect::<Result<Vec<_>>>()?)
    }
}

/// Power budget bookkeeping.
///
/// `P = max(P̄ - N_TR, 0)` is the power left for the codeword after the unit
/// artificial noise per mode; inputs are drawn with per-antenna variance
/// `P (1 - eps_P) / N_T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    pub pbar: f64,
    pub eps_p: f64,
    pub n_tr: usize,
    pub n_t: usize,
}

impl PowerConfig {
    pub fn new(pbar: f64, eps_p: f64, n_tr: usize, n_t: usize) -> Result<Self> {
        if !(pbar >= 0.0) || !pbar.is_finite() {
            return invalid(format!("power budget must be finite and >= 0, got {pbar}"));
        }
        if !(0.0..1.0).contains(&eps_p) {
            return invalid(format!("eps_P must lie in [0, 1), got {eps_p}"));
        }
        if n_tr == 0 || n_t == 0 || n_tr > n_t {
            return invalid(format!("need 1 <= N_TR <= N_T, got N_TR={n_tr}, N_T={n_t}"));
        }
        Ok(Self {
            pbar,
            eps_p,
            n_tr,
            n_t,
        })
    }

    /// Configuration matched to a main channel: `N_TR = min(N_T, N_R)`.
    pub fn for_channel(ch: &MainChannel, pbar: f64, eps_p: f64) -> Result<Self> {
        Self::new(pbar, eps_p, ch.n_m(), ch.n_t())
    }

    /// Configuration specified by its backed-off power `P` directly.
    pub fn from_power(p: f64, eps_p: f64, n_tr: usize, n_t: usize) -> Result<Self> {
        Self::new(p + n_tr as f64, eps_p, n_tr, n_t)
    }

    pub fn p(&self) -> f64 {
        (self.pbar - self.n_tr as f64).max(0.0)
    }

    pub fn per_antenna_var(&self) -> f64 {
        self.p() * (1.0 - self.eps_p) / self.n_t as f64
    }

    /// Per-entry variance of the eavesdropper output under Gaussian inputs:
    /// `P (1 - eps_P) / N_T + 1`.
    pub fn p_prime(&self) -> f64 {
        self.per_antenna_var() + 1.0
    }
}

/// Adds unit-variance artificial noise to the codeword block:
/// `X = X̃ + N`.
pub fn transmit<N: NoiseSource + ?Sized>(xtilde: &ComplexMat, noise: &mut N) -> ComplexMat {
    let an = gaussian_matrix(xtilde.rows(), xtilde.cols(), 1.0, noise);
    xtilde.add(&an).expect("same shape")
}

/// `Y(i) = H X(i) + Z(i)` with unit-variance receiver noise.
pub fn main_observe<N: NoiseSource + ?Sized>(
    x: &ComplexMat,
    ch: &MainChannel,
    noise: &mut N,
) -> Result<ComplexMat> {
    let hx = ch.h().matmul(x)?;
    let z = gaussian_matrix(hx.rows(), hx.cols(), 1.0, noise);
    hx.add(&z)
}

/// `Ỹ(i) = H̃(i) X(i)`, column by column, without noise.
pub fn eve_observe(x: &ComplexMat, trace: &EveTrace) -> Result<ComplexMat> {
    if trace.len() != x.cols() {
        return dim(format!(
            "trace has {} states but the block has {} channel uses",
            trace.len(),
            x.cols()
        ));
    }
    if trace.n_t() != x.rows() {
        return dim(format!(
            "trace expects {} transmit antennas, block has {}",
            trace.n_t(),
            x.rows()
        ));
    }
    let n_e = trace.n_e();
    let mut out = DMatrix::zeros(n_e, x.cols());
    for (i, st) in trace.states().iter().enumerate() {
        let col = st.matrix().inner() * x.inner().column(i);
        out.set_column(i, &col);
    }
    ComplexMat::from_inner(out)
}

/// Covariance of the effective main-channel noise `H N + Z`: `H H^H + I`.
pub fn effective_noise_cov(ch: &MainChannel) -> ComplexMat {
    let hh = ch.h().matmul(&ch.h().adjoint()).expect("square");
    hh.add(&ComplexMat::identity(ch.n_r())).expect("same shape")
}

/// Covariance of the eavesdropper's equivalent noise `H̃ N`. Fails when the
/// matrix is not canonical, since then the covariance is not the identity.
pub fn eve_equiv_noise_cov(ht: &ComplexMat) -> Result<ComplexMat> {
    let cov = ht.matmul(&ht.adjoint())?;
    let deviation = cov.max_abs_diff(&ComplexMat::identity(ht.rows()));
    if deviation > ORTHONORMAL_TOL {
        return Err(WiretapError::NotCanonical { deviation });
    }
    Ok(cov)
}

/// Haar-distributed `n × n` unitary.
pub fn random_unitary<N: NoiseSource + ?Sized>(n: usize, noise: &mut N) -> ComplexMat {
    canonicalize_eve(&gaussian_matrix(n, n, 1.0, noise))
        .expect("square gaussian matrix canonicalizes")
        .matrix()
        .clone()
}

/// Sample covariance `(1/m) Σ v v^H` of the columns of `samples`.
pub fn empirical_covariance(samples: &ComplexMat) -> ComplexMat {
    let m = samples.inner();
    let cov = m * m.adjoint() / Complex64::new(m.ncols() as f64, 0.0);
    ComplexMat::from_inner(cov).expect("finite")
}
