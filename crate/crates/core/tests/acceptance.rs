//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use avwiretap::channel::{eve_observe, random_unitary, EveState, EveTrace, PowerConfig};
use avwiretap::codebook::{binning_params, sample_codebook, BinningParams, SecrecyMode, ToyCaps};
use avwiretap::estimators::{
    an_whiteness, estimate_decode_error, estimate_leakage, estimate_truncation_mass,
    estimate_variational_distance, eve_second_moment_check, gaussian_output_stats, info_density_tail,
    bin_error_symmetry_check, leakage_bound, truncated_vs_gaussian_distance, two_stage_distance,
    DecodeTarget, NoiseModel, OutputStats, Reference, TraceFamily,
};
use avwiretap::noise::gaussian_matrix;
use avwiretap::quantization::{
    check_loglik_perturbation, union_log_quantity, quantize_matrix, schedule_params, truncation_mass,
};
use avwiretap::rates::{converse_rate_bound, default_pbar_grid, main_mutual_info, sdof, sdof_slope, secrecy_rate_at};
use avwiretap::region::{bc_region, default_alpha_grid, mac_region, region_sum_sdof, RatePoint};
use avwiretap::{ComplexMat, Convention};
use common::{diag_channel, random_channel, rng, tv_quadrature};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

const FULL: Convention = Convention::Full;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn run(id: u32, title: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let res = catch_unwind(AssertUnwindSafe(f));
    let elapsed = start.elapsed();
    let (pass, detail) = match res {
        Ok(o) => (o.pass, o.detail),
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        }
    };
    let in_budget = budget.is_none_or(|b| elapsed <= b);
    let ok = pass && in_budget;
    let timing = match budget {
        Some(b) => format!("{:.2}s of {:.0}s", elapsed.as_secs_f64(), b.as_secs_f64()),
        None => format!("{:.2}s", elapsed.as_secs_f64()),
    };
    println!(
        "criterion {id:02} {} {title}: {detail} [{timing}]",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

fn c01_sdof() -> Outcome {
    let mut r = rng(101);
    let grid = default_pbar_grid();
    let mut pass = true;
    let mut parts = Vec::new();
    for &(n_t, n_r, n_e) in &[(2, 2, 1), (3, 3, 1), (3, 3, 2), (4, 4, 2), (2, 3, 1), (3, 2, 1)] {
        let ch = random_channel(n_r, n_t, &mut r);
        let slope = sdof_slope(|p| secrecy_rate_at(&ch, p, n_e, FULL), &grid).unwrap();
        let want = sdof(n_t, n_r, n_e) as f64;
        pass &= (slope - want).abs() <= 0.05;
        parts.push(format!("({n_t},{n_r},{n_e}) {slope:.3} vs {want}"));
    }
    outcome(pass, parts.join(", "))
}

fn c02_zero_capacity() -> Outcome {
    let mut r = rng(102);
    let mut pass = true;
    let mut cases = 0;
    for &(n_t, n_r, n_e) in &[(2, 2, 2), (3, 3, 3), (2, 3, 2), (3, 2, 2), (2, 2, 3), (4, 4, 4)] {
        let ch = random_channel(n_r, n_t, &mut r);
        for k in 0..=6 {
            let pbar = 10f64.powi(k).max(ch.n_m() as f64);
            pass &= secrecy_rate_at(&ch, pbar, n_e, FULL).unwrap() == 0.0;
            pass &= converse_rate_bound(&ch, pbar, n_e, FULL) == 0.0;
            cases += 1;
        }
    }
    outcome(pass, format!("{cases} cases with N_E >= min(N_T, N_R) give exactly 0"))
}

fn c03_converse() -> Outcome {
    let mut r = rng(103);
    let mut violations = 0;
    let mut worst_gap = f64::INFINITY;
    for _ in 0..100 {
        let n_t = r.random_range(1..=4);
        let n_r = r.random_range(1..=4);
        let n_m = n_t.min(n_r);
        let n_e = r.random_range(0..=n_m);
        let ch = random_channel(n_r, n_t, &mut r);
        let pbar = (r.random_range((n_m as f64).ln()..1e6f64.ln())).exp();
        let ach = secrecy_rate_at(&ch, pbar, n_e, FULL).unwrap();
        let conv = converse_rate_bound(&ch, pbar, n_e, FULL);
        worst_gap = worst_gap.min(conv - ach);
        if conv < ach {
            violations += 1;
        }
    }
    let grid = default_pbar_grid();
    let mut slopes_ok = true;
    let mut parts = Vec::new();
    let mut r = rng(101);
    for &(n_t, n_r, n_e) in &[(2, 2, 1), (3, 3, 1), (3, 3, 2), (4, 4, 2), (2, 3, 1), (3, 2, 1)] {
        let ch = random_channel(n_r, n_t, &mut r);
        let a = sdof_slope(|p| secrecy_rate_at(&ch, p, n_e, FULL), &grid).unwrap();
        let c = sdof_slope(|p| Ok(converse_rate_bound(&ch, p, n_e, FULL)), &grid).unwrap();
        slopes_ok &= (a - c).abs() <= 0.05;
        parts.push(format!("{:.3}", (a - c).abs()));
    }
    outcome(
        violations == 0 && slopes_ok,
        format!(
            "{violations}/100 dominance violations (min gap {worst_gap:.3} bits); slope gaps [{}]",
            parts.join(", ")
        ),
    )
}

fn c04_regions() -> Outcome {
    let mut r = rng(104);
    let h1 = random_channel(2, 2, &mut r);
    let h2 = random_channel(2, 2, &mut r);
    let grid = default_pbar_grid();
    let alphas = default_alpha_grid();
    let mac = region_sum_sdof(|p| mac_region(&h1, &h2, p, 1, &alphas, FULL), &grid).unwrap();
    let bc = region_sum_sdof(|p| bc_region(&h1, &h2, p, 1, FULL), &grid).unwrap();
    let origin = vec![RatePoint::new(0.0, 0.0)];
    let mut collapsed = true;
    for &p in &[10.0, 1e3, 1e6] {
        collapsed &= mac_region(&h1, &h2, p, 2, &alphas, FULL).unwrap().hull == origin;
        collapsed &= bc_region(&h1, &h2, p, 2, FULL).unwrap().hull == origin;
    }
    outcome(
        (mac - 1.0).abs() <= 0.05 && (bc - 1.0).abs() <= 0.05 && collapsed,
        format!("MAC slope {mac:.3}, BC slope {bc:.3}, N_E=2 collapses to origin: {collapsed}"),
    )
}

fn c05_whiteness() -> Outcome {
    let mut r = rng(105);
    let shapes = [(1, 2), (2, 3), (1, 4), (2, 4), (3, 4)];
    let mut worst: f64 = 0.0;
    for k in 0..10u64 {
        let (n_e, n_t) = shapes[k as usize % shapes.len()];
        let st = EveState::haar(n_e, n_t, &mut r).unwrap();
        worst = worst.max(an_whiteness(st.matrix(), 100_000, 500 + k).unwrap());
    }
    outcome(worst <= 0.05, format!("max entry deviation {worst:.4} over 10 states"))
}

/// Three-sigma comparison of two output-statistics runs; returns the worst
/// normalized deviation per statistic and the chi-square verdict.
fn compare_outputs(a: &OutputStats, b: &OutputStats, n: usize, p_prime: f64) -> (f64, f64, bool) {
    let norm_z = (a.mean_norm_sq - b.mean_norm_sq).abs() / (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
    let pooled = (a.samples * n) as f64;
    let sd_mean = (2.0 * p_prime / pooled).sqrt();
    let sd_cov = (2.0 * p_prime * p_prime / pooled).sqrt();
    let mut moment_z: f64 = 0.0;
    for (x, y) in a.mean.iter().zip(&b.mean) {
        moment_z = moment_z.max((x - y).norm() / sd_mean);
    }
    moment_z = moment_z.max(a.cov.max_abs_diff(&b.cov) / sd_cov);
    // Two-sample homogeneity with equal sample sizes.
    let (mut stat, mut df) = (0.0, 0usize);
    for (&x, &y) in a.histogram.iter().zip(&b.histogram) {
        if x + y > 0 {
            stat += (x as f64 - y as f64).powi(2) / (x + y) as f64;
            df += 1;
        }
    }
    let chi = ChiSquared::new((df - 1) as f64).unwrap();
    let crit = chi.inverse_cdf(1.0 - 0.0027);
    (norm_z, moment_z, stat <= crit)
}

fn c06_output_invariance() -> Outcome {
    let mut r = rng(106);
    let (n, n_e, n_t) = (4, 2, 3);
    let pc = PowerConfig::from_power(6.0, 0.0, 2, n_t).unwrap();
    let edges = [5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 12.0];
    let mut pass = true;
    let mut parts = Vec::new();
    for k in 0..5u64 {
        let ta = EveTrace::haar(n_e, n_t, n, &mut r).unwrap();
        let tb = EveTrace::haar(n_e, n_t, n, &mut r).unwrap();
        let sa = gaussian_output_stats(&ta, &pc, 100_000, &edges, 600 + 2 * k).unwrap();
        let sb = gaussian_output_stats(&tb, &pc, 100_000, &edges, 601 + 2 * k).unwrap();
        let (nz, mz, chi_ok) = compare_outputs(&sa, &sb, n, pc.p_prime());
        pass &= nz <= 3.0 && mz <= 3.0 && chi_ok;
        parts.push(format!("{nz:.2}/{mz:.2}/{}", if chi_ok { "ok" } else { "chi2 fail" }));
    }
    outcome(pass, format!("5 trace pairs, norm z / moment z / histogram: {}", parts.join(", ")))
}

fn c07_perturbation() -> Outcome {
    let mut r = rng(107);
    let (n, n_t, n_e, p, eps) = (8, 2, 1, 4.0, 0.5);
    let var = p * 0.7 / n_t as f64;
    let mut pass = true;
    let mut parts = Vec::new();
    for &m in &[10u64, 100] {
        let (mut applicable, mut violations, mut attempts) = (0, 0, 0);
        let mut worst: f64 = 0.0;
        while applicable < 10_000 && attempts < 100_000 {
            attempts += 1;
            let trace = EveTrace::haar(n_e, n_t, n, &mut r).unwrap();
            let hs_a = trace.matrices();
            let hs_b: Vec<ComplexMat> = hs_a.iter().map(|h| quantize_matrix(h, m).unwrap()).collect();
            let x = loop {
                let x = gaussian_matrix(n_t, n, var, &mut r);
                if x.norm_sq() / n as f64 <= p {
                    break x;
                }
            };
            let an = gaussian_matrix(n_t, n, 1.0, &mut r);
            let z = eve_observe(&x.add(&an).unwrap(), &trace).unwrap();
            let c = check_loglik_perturbation(&x, &z, &hs_a, &hs_b, p, m, eps).unwrap();
            if c.applicable() {
                applicable += 1;
                worst = worst.max(c.lhs / c.rhs);
                if !c.holds() {
                    violations += 1;
                }
            }
        }
        pass &= applicable == 10_000 && violations == 0;
        parts.push(format!("M={m}: {violations} violations in {applicable} (max lhs/rhs {worst:.3})"));
    }
    outcome(pass, parts.join("; "))
}

fn c08_info_stability() -> Outcome {
    let pc = PowerConfig::from_power(8.0, 0.0, 2, 2).unwrap();
    let fam = TraceFamily::Constant(EveState::selector(1, 2).unwrap());
    let rep = info_density_tail(&[50, 100, 200], 0.5, &pc, &fam, 100_000, 108).unwrap();
    let p = &rep.points;
    let decreasing = p.windows(2).all(|w| w[1].estimate < w[0].estimate);
    let slope_ok = rep.slope < 0.0 && rep.slope.abs() >= rep.chernoff_floor;
    let means_ok = p
        .iter()
        .all(|t| (t.mean_density - rep.center).abs() <= 3.0 * t.mean_stderr);
    let tails: Vec<String> = p.iter().map(|t| format!("{:.2e}", t.estimate)).collect();
    outcome(
        decreasing && slope_ok && means_ok,
        format!(
            "tails [{}], slope {:.4} (floor {:.4}), means within 3 stderr: {means_ok}",
            tails.join(", "),
            rep.slope,
            rep.chernoff_floor
        ),
    )
}

fn resolvability_setup() -> (PowerConfig, f64, f64) {
    let pc = PowerConfig::from_power(2.0, 0.5, 2, 2).unwrap();
    let ch = diag_channel(&[5.0, 5.0]);
    let i_main = main_mutual_info(&ch, &pc, FULL).unwrap();
    (pc, i_main, pc.p_prime().log2())
}

fn c09_resolvability() -> Outcome {
    let (pc, i_main, i_eve) = resolvability_setup();
    let caps = ToyCaps::default();
    let mut ds = Vec::new();
    let mut bound_ok = true;
    let mut parts = Vec::new();
    for (k, &n) in [2usize, 4, 8].iter().enumerate() {
        let bp = binning_params(i_main, i_eve, n, 1.0, 0.2, SecrecyMode::Strong).unwrap();
        let cb = sample_codebook(&bp, &pc, &caps, 900 + k as u64).unwrap();
        let trace = EveTrace::constant(EveState::selector(1, 2).unwrap(), n).unwrap();
        let est = estimate_leakage(&cb, &trace, &pc, 20_000, 910 + k as u64).unwrap();
        let mi = est.mi_hat.unwrap();
        let mi_se = est.mi_stderr.unwrap();
        let b_hi = leakage_bound((est.d_hat + est.stderr).min(1.0), n, &pc, cb.n_i()).unwrap();
        let combined = (mi_se.powi(2) + (b_hi - est.leakage_bound).powi(2)).sqrt();
        bound_ok &= mi <= est.leakage_bound + 3.0 * combined;
        parts.push(format!(
            "n={n} N_j={} d'={:.4}±{:.4} I={mi:.4} bound={:.3}",
            bp.n_j, est.d_hat, est.stderr, est.leakage_bound
        ));
        ds.push((est.d_hat, est.stderr));
    }
    let trend = ds
        .windows(2)
        .all(|w| w[1].0 <= w[0].0 + 3.0 * (w[0].1.powi(2) + w[1].1.powi(2)).sqrt());

    // n = 1, one codeword: compare against direct numerical integration.
    let bp1 = BinningParams {
        n: 1,
        rate: 0.0,
        n_i: 1,
        n_j: 1,
        delta_n: 1.0,
        delta_prime: 0.2,
        mode: SecrecyMode::Strong,
    };
    let cb1 = sample_codebook(&bp1, &pc, &caps, 920).unwrap();
    let trace1 = EveTrace::constant(EveState::selector(1, 2).unwrap(), 1).unwrap();
    let e1 = estimate_variational_distance(&cb1, &trace1, &pc, &[0], 100_000, Reference::Mixture, 921).unwrap();
    let quad = tv_quadrature(cb1.codeword(0, 0).get(0, 0), pc.p_prime());
    let quad_ok = (e1.d_hat - quad).abs() <= 3.0 * e1.stderr;
    outcome(
        trend && bound_ok && quad_ok,
        format!(
            "{}; trend ok: {trend}, leakage bound ok: {bound_ok}, quadrature {quad:.4} vs {:.4}±{:.4}",
            parts.join("; "),
            e1.d_hat,
            e1.stderr
        ),
    )
}

fn c10_truncation() -> Outcome {
    let pc0 = PowerConfig::from_power(4.0, 0.0, 2, 2).unwrap();
    let mut pass = true;
    let mut gaps = Vec::new();
    let mut parts = Vec::new();
    for (k, &n) in [10usize, 100, 1000].iter().enumerate() {
        let mu = truncation_mass(n, 2, 4.0, 0.0).unwrap();
        let (mh, se) = estimate_truncation_mass(n, &pc0, 50_000, 1000 + k as u64).unwrap();
        pass &= (mh - mu).abs() <= 3.0 * se;
        gaps.push((mu - 0.5).abs());
        parts.push(format!("mu_{n}={mu:.4} (MC {mh:.4}±{se:.4})"));
    }
    pass &= gaps.windows(2).all(|w| w[1] < w[0]);
    let pc3 = PowerConfig::from_power(4.0, 0.3, 2, 2).unwrap();
    for (k, &n) in [20usize, 50, 100].iter().enumerate() {
        let td = truncated_vs_gaussian_distance(n, &pc3, 50_000, 1010 + k as u64).unwrap();
        pass &= td.estimate <= td.bound && td.exact <= td.bound;
        parts.push(format!("n={n}: {:.2e} <= {:.2e}", td.estimate, td.bound));
    }
    outcome(pass, parts.join(", "))
}

fn c11_schedule() -> Outcome {
    let eps = 0.01;
    let ns: Vec<u64> = (1..=10).map(|k| 50 * k).collect();
    let q: Vec<f64> = ns.iter().map(|&n| union_log_quantity(eps, n, 2, 1)).collect();
    let decreasing = q.windows(2).all(|w| w[1] < w[0]);
    let turn = (50..100_000u64)
        .find(|&n| union_log_quantity(eps, n + 1, 2, 1) < union_log_quantity(eps, n, 2, 1))
        .unwrap_or(0);

    let (c_prime, a_eps, a_eps_p, e_val) = (0.05, 0.03, 0.04, 0.1);
    let below = |t: f64| t * (1.0 - 1e-9);
    let above = |t: f64| t * (1.0 + 1e-9);
    let flags = |e: f64| schedule_params(e, 1000, c_prime, a_eps, a_eps_p, e_val).unwrap().flags;
    let flips = flags(below(c_prime)).resolvability
        && !flags(above(c_prime)).resolvability
        && flags(below(a_eps)).info_tail
        && !flags(above(a_eps)).info_tail
        && flags(below(a_eps_p)).truncation
        && !flags(above(a_eps_p)).truncation
        && flags(below(e_val / 2.0)).error_exponent
        && !flags(above(e_val / 2.0)).error_exponent;
    outcome(
        decreasing && flips,
        format!(
            "ln(|S_M| e^(-eps_n K)) at n=50,100,...,500 (N_T=2, N_E=1): [{}]; strictly decreasing: {decreasing} \
             (first decrease at n={turn}); feasibility flags flip at thresholds: {flips}",
            q.iter().map(|v| format!("{v:.0}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn symmetry_setup() -> (BinningParams, PowerConfig) {
    let pc = PowerConfig::from_power(4.0, 0.3, 2, 2).unwrap();
    let ch = diag_channel(&[3.0, 3.0]);
    let i_main = main_mutual_info(&ch, &pc, FULL).unwrap();
    let bp = binning_params(i_main, pc.p_prime().log2(), 4, 0.3, 0.0, SecrecyMode::Weak).unwrap();
    (bp, pc)
}

fn c12_symmetry() -> Outcome {
    let (bp, pc) = symmetry_setup();
    let caps = ToyCaps::default();
    let mut r = rng(112);
    let mut compatible = 0;
    let mut etas = Vec::new();
    for k in 0..20u64 {
        let ta = EveTrace::haar(1, 2, bp.n, &mut r).unwrap();
        let u = random_unitary(2, &mut r);
        let tb = ta.map_states(|s| s.rotate(&u)).unwrap();
        let c = bin_error_symmetry_check(&bp, &pc, &ta, &tb, 20, 400, &caps, 1200 + k).unwrap();
        if c.compatible {
            compatible += 1;
        }
        etas.push(c.eta_a);
    }
    let lo = etas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = etas.iter().copied().fold(0.0, f64::max);
    outcome(
        compatible >= 19,
        format!(
            "{compatible}/20 pairs compatible at 3 sigma (N_i={}, N_j={}, eta in [{lo:.3}, {hi:.3}])",
            bp.n_i, bp.n_j
        ),
    )
}

/// Reduced-budget versions of the Monte Carlo criteria, rendered to text.
fn mc_fingerprint() -> String {
    let mut out = String::new();
    let mut push = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    let mut r = rng(113);
    let st = EveState::haar(2, 3, &mut r).unwrap();
    push(format!("{:?}", an_whiteness(st.matrix(), 20_000, 1)));
    let pc6 = PowerConfig::from_power(6.0, 0.0, 2, 3).unwrap();
    let t6 = EveTrace::haar(2, 3, 4, &mut r).unwrap();
    push(format!("{:?}", gaussian_output_stats(&t6, &pc6, 20_000, &[5.0, 8.0], 2)));
    let pc8 = PowerConfig::from_power(8.0, 0.0, 2, 2).unwrap();
    let fam = TraceFamily::Haar { n_e: 1 };
    push(format!("{:?}", info_density_tail(&[20, 40], 0.5, &pc8, &fam, 20_000, 3)));

    let (pc, i_main, i_eve) = resolvability_setup();
    let bp = binning_params(i_main, i_eve, 4, 1.0, 0.2, SecrecyMode::Strong).unwrap();
    let cb = sample_codebook(&bp, &pc, &ToyCaps::default(), 4).unwrap();
    push(format!("{:?}", cb.codewords()));
    let trace = EveTrace::haar(1, 2, 4, &mut r).unwrap();
    push(format!("{:?}", estimate_leakage(&cb, &trace, &pc, 5_000, 5)));
    push(format!("{:?}", eve_second_moment_check(&cb, &trace, 5_000, 6)));
    let ch = diag_channel(&[5.0, 5.0]);
    push(format!(
        "{:?}",
        estimate_decode_error(&cb, DecodeTarget::Main(&ch), NoiseModel::Gaussian, 3_000, 7)
    ));
    push(format!(
        "{:?}",
        estimate_decode_error(&cb, DecodeTarget::Eve(&trace), NoiseModel::Gaussian, 3_000, 8)
    ));
    let books: Vec<_> = (0..3)
        .map(|k| sample_codebook(&bp, &pc, &ToyCaps::default(), 20 + k).unwrap())
        .collect();
    push(format!("{:?}", two_stage_distance(&books, &trace, &pc, &[0], 3_000, 9)));
    let pc3 = PowerConfig::from_power(4.0, 0.3, 2, 2).unwrap();
    push(format!("{:?}", truncated_vs_gaussian_distance(20, &pc3, 20_000, 10)));
    let (bp10, pc10) = symmetry_setup();
    let ta = EveTrace::haar(1, 2, bp10.n, &mut r).unwrap();
    let tb = EveTrace::haar(1, 2, bp10.n, &mut r).unwrap();
    push(format!(
        "{:?}",
        bin_error_symmetry_check(&bp10, &pc10, &ta, &tb, 3, 200, &ToyCaps::default(), 11)
    ));
    out
}

fn in_pool(threads: usize) -> String {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(mc_fingerprint)
}

fn c13_determinism() -> Outcome {
    let one = in_pool(1);
    let four = in_pool(4);
    let again = in_pool(4);
    outcome(
        one == four && four == again,
        format!(
            "{} bytes of estimator output; 1 vs 4 threads identical: {}, rerun identical: {}",
            one.len(),
            one == four,
            four == again
        ),
    )
}

fn main() {
    let results = [
        run(1, "s.d.o.f. reproduction", secs(1), c01_sdof),
        run(2, "zero-capacity clamp", secs(1), c02_zero_capacity),
        run(3, "converse dominance", secs(5), c03_converse),
        run(4, "MAC/BC region s.d.o.f.", secs(5), c04_regions),
        run(5, "artificial-noise whiteness", secs(5), c05_whiteness),
        run(6, "output invariance across states", secs(10), c06_output_invariance),
        run(7, "log-likelihood perturbation bound", secs(30), c07_perturbation),
        run(8, "information stability", secs(60), c08_info_stability),
        run(9, "resolvability and leakage bound", secs(120), c09_resolvability),
        run(10, "truncation machinery", secs(30), c10_truncation),
        run(11, "schedule consistency", secs(1), c11_schedule),
        run(12, "bin-error symmetry across states", secs(120), c12_symmetry),
        run(13, "determinism across thread counts", None, c13_determinism),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
