//! The five subcommands. Each builds a [`ResultTable`]; `verify` also
//! reports whether every check passed.

use avwiretap::channel::{eve_observe, EveState, EveTrace, PowerConfig};
use avwiretap::codebook::{binning_params, sample_codebook, BinningParams, SecrecyMode, ToyCaps};
use avwiretap::estimators::{
    an_whiteness, bin_error_symmetry_check, estimate_decode_error, estimate_leakage, estimate_truncation_mass,
    eve_second_moment_check, gaussian_output_stats, info_density_chernoff_floor, info_density_tail,
    truncated_vs_gaussian_distance, DecodeTarget, NoiseModel, TraceFamily,
};
use avwiretap::mc::{derive_seed, stream};
use avwiretap::noise::gaussian_matrix;
use avwiretap::quantization::{
    check_loglik_perturbation, estimate_c_prime, gallager_exponent, quantize_matrix, schedule_params,
    truncation_exponent, truncation_mass, two_stage_overhead, union_log_quantity,
};
use avwiretap::rates::{converse_rate_bound, default_pbar_grid, leakage_cap, main_mutual_info};
use avwiretap::region::{bc_region, default_alpha_grid, mac_region};
use avwiretap::{ComplexMat, Convention};

use crate::config::{channel, matrix, section, RegionKind, RunConfig, TraceKind};
use crate::table::ResultTable;
use crate::CliError;

// Stream ids for the command-level randomness, disjoint from the library's.
const TRACE_STREAM: u64 = 101;
const CODEBOOK_STREAM: u64 = 102;
const ESTIMATE_STREAM: u64 = 103;
const VERIFY_STREAM: u64 = 104;

pub fn cmd_rate(cfg: &RunConfig) -> Result<ResultTable, CliError> {
    let sec = section(&cfg.rate, "rate")?;
    let ch = channel(&sec.h, "rate.h")?;
    let conv = cfg.convention();
    let grid = sec.pbar.clone().unwrap_or_else(default_pbar_grid);
    let mut t = ResultTable::new(&[
        "pbar",
        "p",
        "main_mi",
        "leakage_cap",
        "secrecy_rate",
        "converse_bound",
        "clamped",
    ]);
    for pbar in grid {
        let pc = PowerConfig::for_channel(&ch, pbar, sec.eps_p)?;
        let mi = main_mutual_info(&ch, &pc, conv)?;
        let leak = leakage_cap(&pc, sec.n_e, sec.leakage, conv);
        t.push(vec![
            pbar.into(),
            pc.p().into(),
            mi.into(),
            leak.into(),
            (mi - leak).max(0.0).into(),
            converse_rate_bound(&ch, pbar, sec.n_e, conv).into(),
            (mi <= leak).into(),
        ]);
    }
    Ok(t)
}

pub fn cmd_region(cfg: &RunConfig) -> Result<ResultTable, CliError> {
    let sec = section(&cfg.region, "region")?;
    let h1 = channel(&sec.h1, "region.h1")?;
    let h2 = channel(&sec.h2, "region.h2")?;
    let conv = cfg.convention();
    let region = match sec.kind {
        RegionKind::Mac => {
            let alphas = sec.alpha.clone().unwrap_or_else(default_alpha_grid);
            mac_region(&h1, &h2, sec.pbar, sec.n_e, &alphas, conv)?
        }
        RegionKind::Bc => bc_region(&h1, &h2, sec.pbar, sec.n_e, conv)?,
    };
    let mut t = ResultTable::new(&["r1", "r2", "hull"]);
    for p in &region.raw_points {
        t.push(vec![p.r1.into(), p.r2.into(), false.into()]);
    }
    for p in &region.hull {
        t.push(vec![p.r1.into(), p.r2.into(), true.into()]);
    }
    Ok(t)
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<ResultTable, CliError> {
    let sec = section(&cfg.simulate, "simulate")?;
    let seed = cfg.require_seed()?;
    let ch = channel(&sec.h, "simulate.h")?;
    let pc = PowerConfig::for_channel(&ch, sec.pbar, sec.eps_p)?;
    // Codebook rates are complex-channel quantities whatever the reporting
    // convention.
    let i_main = main_mutual_info(&ch, &pc, Convention::Full)?;
    let i_eve = sec.n_e as f64 * pc.p_prime().log2();
    let caps = ToyCaps {
        max_codewords: sec.max_codewords,
        max_n: sec.max_n,
    };
    let mut t = ResultTable::new(&[
        "n",
        "n_i",
        "n_j",
        "rate",
        "lambda",
        "lambda_se",
        "eta",
        "eta_se",
        "d_hat",
        "d_se",
        "mi_hat",
        "mi_se",
        "leakage_bound",
    ]);
    for &n in &sec.n {
        let idx = n as u64;
        let bp = binning_params(i_main, i_eve, n, sec.delta_n, sec.delta_prime, sec.mode)?;
        caps.check(bp.codeword_count(), n)?;
        let trace = match sec.trace {
            TraceKind::Selector => EveTrace::constant(EveState::selector(sec.n_e, pc.n_t)?, n)?,
            TraceKind::Haar => EveTrace::haar(sec.n_e, pc.n_t, n, &mut stream(seed, TRACE_STREAM, idx))?,
        };
        let cb = sample_codebook(&bp, &pc, &caps, derive_seed(seed, CODEBOOK_STREAM, idx))?;
        let est_seed = derive_seed(seed, ESTIMATE_STREAM, idx);
        let lambda = estimate_decode_error(&cb, DecodeTarget::Main(&ch), NoiseModel::Gaussian, sec.trials, est_seed)?;
        let eta = estimate_decode_error(&cb, DecodeTarget::Eve(&trace), NoiseModel::Gaussian, sec.trials, est_seed + 1)?;
        let leak = estimate_leakage(&cb, &trace, &pc, sec.samples, est_seed + 2)?;
        t.push(vec![
            n.into(),
            bp.n_i.into(),
            bp.n_j.into(),
            bp.rate.into(),
            lambda.rate.into(),
            lambda.stderr.into(),
            eta.rate.into(),
            eta.stderr.into(),
            leak.d_hat.into(),
            leak.stderr.into(),
            leak.mi_hat.into(),
            leak.mi_stderr.into(),
            leak.leakage_bound.into(),
        ]);
    }
    Ok(t)
}

struct Check {
    id: &'static str,
    property: &'static str,
    observed: f64,
    bound: f64,
    pass: bool,
}

/// Runs the bound and invariance checks. Returns the table and whether all
/// checks passed.
pub fn cmd_verify(cfg: &RunConfig) -> Result<(ResultTable, bool), CliError> {
    let sec = cfg.verify.clone().unwrap_or_default();
    let seed = cfg.require_seed()?;
    let (n_t, n_e, samples) = (sec.n_t, sec.n_e, sec.samples);
    if samples == 0 {
        return Err(CliError::Config("verify.samples must be >= 1".into()));
    }
    let s = |k: u64| derive_seed(seed, VERIFY_STREAM, k);
    let mut rng = stream(seed, VERIFY_STREAM, 0);
    let mut checks = Vec::new();

    let eve = match &sec.eve {
        Some(spec) => matrix(spec, "verify.eve")?,
        None => EveState::haar(n_e, n_t, &mut rng)?.matrix().clone(),
    };
    let dev = an_whiteness(&eve, 5 * samples, s(1))?;
    checks.push(Check {
        id: "an-whiteness",
        property: "covariance of the eavesdropper's equivalent noise is the identity",
        observed: dev,
        bound: 0.05,
        pass: dev <= 0.05,
    });

    let n = 4;
    let pc_out = PowerConfig::from_power(2.0 * n_t as f64, 0.0, 1, n_t)?;
    let ta = EveTrace::haar(n_e, n_t, n, &mut rng)?;
    let tb = EveTrace::haar(n_e, n_t, n, &mut rng)?;
    let edges = [n as f64 * n_e as f64];
    let oa = gaussian_output_stats(&ta, &pc_out, samples, &edges, s(2))?;
    let ob = gaussian_output_stats(&tb, &pc_out, samples, &edges, s(3))?;
    let z = (oa.mean_norm_sq - ob.mean_norm_sq).abs() / (oa.stderr.powi(2) + ob.stderr.powi(2)).sqrt();
    checks.push(Check {
        id: "output-invariance",
        property: "Gaussian-input output energy is the same for any canonical state (z-score)",
        observed: z,
        bound: 3.0,
        pass: z <= 3.0,
    });

    let (p, m, n_pert) = (4.0, 10u64, 8usize);
    let mut violations = 0usize;
    for _ in 0..samples.min(5_000) {
        let trace = EveTrace::haar(n_e, n_t, n_pert, &mut rng)?;
        let hs_a = trace.matrices();
        let hs_b = hs_a.iter().map(|h| quantize_matrix(h, m)).collect::<Result<Vec<ComplexMat>, _>>()?;
        let x = loop {
            let x = gaussian_matrix(n_t, n_pert, 0.7 * p / n_t as f64, &mut rng);
            if x.norm_sq() / n_pert as f64 <= p {
                break x;
            }
        };
        let an = gaussian_matrix(n_t, n_pert, 1.0, &mut rng);
        let z = eve_observe(&x.add(&an)?, &trace)?;
        let c = check_loglik_perturbation(&x, &z, &hs_a, &hs_b, p, m, 0.5)?;
        if c.applicable() && !c.holds() {
            violations += 1;
        }
    }
    checks.push(Check {
        id: "loglik-perturbation",
        property: "log-likelihood change under grid quantization stays within n g(r, r') (violations)",
        observed: violations as f64,
        bound: 0.0,
        pass: violations == 0,
    });

    let pc_trunc = PowerConfig::from_power(4.0, 0.3, 1, n_t)?;
    let td = truncated_vs_gaussian_distance(20, &pc_trunc, samples, s(4))?;
    checks.push(Check {
        id: "truncation-distance",
        property: "distance between truncated and plain Gaussian codeword laws stays below 4 exp(-n alpha)",
        observed: td.estimate,
        bound: td.bound,
        pass: td.estimate <= td.bound,
    });

    let pc_mass = PowerConfig::from_power(4.0, 0.0, 1, n_t)?;
    let mu = truncation_mass(50, n_t, 4.0, 0.0)?;
    let (mh, se) = estimate_truncation_mass(50, &pc_mass, samples, s(5))?;
    let zm = (mh - mu).abs() / se.max(f64::MIN_POSITIVE);
    checks.push(Check {
        id: "truncation-mass",
        property: "Monte Carlo power-cap acceptance agrees with the gamma CDF (z-score)",
        observed: zm,
        bound: 3.0,
        pass: zm <= 3.0,
    });

    let pc_tail = PowerConfig::from_power(8.0, 0.0, 1, n_t)?;
    let fam = TraceFamily::Constant(EveState::selector(n_e, n_t)?);
    let rep = info_density_tail(&[20, 40, 80], 0.5, &pc_tail, &fam, samples, s(6))?;
    let decreasing = rep.points.windows(2).all(|w| w[1].estimate < w[0].estimate);
    checks.push(Check {
        id: "info-density-tail",
        property: "upper tail of the normalized information density decays in n (log-linear slope)",
        observed: rep.slope,
        bound: 0.0,
        pass: decreasing && rep.slope < 0.0,
    });
    let floor = info_density_chernoff_floor(0.5, n_e)?;
    checks.push(Check {
        id: "info-density-rate",
        property: "tail decays at least at the Chernoff rate (|slope| vs floor)",
        observed: -rep.slope,
        bound: floor,
        pass: -rep.slope >= floor,
    });

    let (bp, pc_bins) = symmetry_setup(n_t, n_e)?;
    let caps = ToyCaps::default();
    let trace = EveTrace::haar(n_e, n_t, bp.n, &mut rng)?;
    let cb = sample_codebook(&bp, &pc_bins, &caps, s(7))?;
    let leak = estimate_leakage(&cb, &trace, &pc_bins, (samples / 5).max(1), s(8))?;
    let mi = leak.mi_hat.unwrap_or(0.0);
    let slack = 3.0 * leak.mi_stderr.unwrap_or(0.0);
    checks.push(Check {
        id: "leakage-bound",
        property: "estimated I(W; Z) stays below the distance-based leakage bound (+3 sigma)",
        observed: mi,
        bound: leak.leakage_bound + slack,
        pass: mi <= leak.leakage_bound + slack,
    });

    let trace_b = EveTrace::haar(n_e, n_t, bp.n, &mut rng)?;
    let sym = bin_error_symmetry_check(&bp, &pc_bins, &trace, &trace_b, 10, (samples / 50).max(1), &caps, s(9))?;
    checks.push(Check {
        id: "bin-error-symmetry",
        property: "codebook-averaged in-bin error is the same for two canonical traces (|difference|)",
        observed: (sym.eta_a - sym.eta_b).abs(),
        bound: 3.0 * (sym.se_a.powi(2) + sym.se_b.powi(2)).sqrt(),
        pass: sym.compatible,
    });

    let moment = eve_second_moment_check(&cb, &trace, samples, s(10))?;
    checks.push(Check {
        id: "second-moment",
        property: "eavesdropper output energy is at most n N_E (P + 1)",
        observed: moment.empirical,
        bound: moment.bound,
        pass: moment.holds,
    });

    let q: Vec<f64> = sec
        .union_n
        .iter()
        .map(|&n| union_log_quantity(sec.union_eps_prime, n, n_t, n_e))
        .collect();
    let worst_step = q.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check {
        id: "union-bound-trend",
        property: "log of grid size times e^(-eps_n K) decreases along the n grid (largest step)",
        observed: worst_step,
        bound: 0.0,
        pass: q.len() >= 2 && worst_step < 0.0,
    });

    let mut t = ResultTable::new(&["check", "property", "observed", "bound", "pass"]);
    let all = checks.iter().all(|c| c.pass);
    for c in checks {
        t.push(vec![c.id.into(), c.property.into(), c.observed.into(), c.bound.into(), c.pass.into()]);
    }
    Ok((t, all))
}

/// Weak-secrecy toy code with tens of bins of about fifteen codewords.
fn symmetry_setup(n_t: usize, n_e: usize) -> Result<(BinningParams, PowerConfig), CliError> {
    let pc = PowerConfig::from_power(4.0, 0.3, n_t, n_t)?;
    let gains = vec![3.0; n_t];
    let ch = avwiretap::MainChannel::new(ComplexMat::diag(&gains))?;
    let i_main = main_mutual_info(&ch, &pc, Convention::Full)?;
    let i_eve = n_e as f64 * pc.p_prime().log2();
    Ok((binning_params(i_main, i_eve, 4, 0.3, 0.0, SecrecyMode::Weak)?, pc))
}

pub fn cmd_schedule(cfg: &RunConfig) -> Result<ResultTable, CliError> {
    let sec = section(&cfg.schedule, "schedule")?;
    let need = |what: &str| CliError::Config(format!("schedule needs {what}"));
    let c_prime = match (sec.c_prime, &sec.c_prime_fit) {
        (Some(c), _) => c,
        (None, Some(fit)) => estimate_c_prime(&fit.n, &fit.d).ok_or_else(|| need("at least two positive fit points"))?,
        (None, None) => return Err(need("c_prime or c_prime_fit")),
    };
    let alpha_eps = match (sec.alpha_eps, sec.delta) {
        (Some(a), _) => a,
        (None, Some(d)) => info_density_chernoff_floor(d, sec.n_e)?,
        (None, None) => return Err(need("alpha_eps or delta")),
    };
    let alpha_eps_p = match (sec.alpha_eps_p, sec.eps_p) {
        (Some(a), _) => a,
        (None, Some(e)) => truncation_exponent(e, sec.n_t)?,
        (None, None) => return Err(need("alpha_eps_p or eps_p")),
    };
    let e_val = match (sec.e_val, &sec.gallager) {
        (Some(e), _) => e,
        (None, Some(g)) => {
            let ch = channel(&g.h, "schedule.gallager.h")?;
            let pc = PowerConfig::for_channel(&ch, g.pbar, g.eps_p)?;
            gallager_exponent(&ch, &pc, g.rate)?
        }
        (None, None) => return Err(need("e_val or gallager")),
    };
    let (overhead, ratio) = two_stage_overhead(sec.eps_prime, sec.r0)?;
    let mut t = ResultTable::new(&[
        "eps_prime",
        "n",
        "c_prime",
        "alpha_eps",
        "alpha_eps_p",
        "e_val",
        "eps_n",
        "log_k",
        "log_m",
        "union_log_quantity",
        "resolvability",
        "info_tail",
        "truncation",
        "error_exponent",
        "resolvability_length",
        "grid_length",
        "perturbation",
        "min_n_resolvability",
        "min_n_grid",
        "overhead_c",
        "stage2_ratio",
    ]);
    for &n in &sec.n {
        let mut s = schedule_params(sec.eps_prime, n, c_prime, alpha_eps, alpha_eps_p, e_val)?;
        if let Some([p, eps]) = sec.radii {
            s = s.with_radii(p, sec.n_t, sec.n_e, eps)?;
        }
        let f = s.flags;
        t.push(vec![
            s.eps_prime.into(),
            n.into(),
            c_prime.into(),
            alpha_eps.into(),
            alpha_eps_p.into(),
            e_val.into(),
            s.eps_n.into(),
            s.log_k.into(),
            s.log_m.into(),
            union_log_quantity(sec.eps_prime, n, sec.n_t, sec.n_e).into(),
            f.resolvability.into(),
            f.info_tail.into(),
            f.truncation.into(),
            f.error_exponent.into(),
            f.resolvability_length.into(),
            f.grid_length.into(),
            f.perturbation.into(),
            s.min_n_resolvability.into(),
            s.min_n_grid.into(),
            overhead.into(),
            ratio.into(),
        ]);
    }
    Ok(t)
}
