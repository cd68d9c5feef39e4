//! Acceptance suite. Every criterion prints one PASS/FAIL line followed by
//! indented detail; the process exits non-zero when any criterion fails.

use std::time::Instant;

use qmcis::isampling::{check_assumptions, estimate, resolve_plan, PointSource, ProposalKind, Sampling, Verdict};
use qmcis::lattice::{cbc_construct, make_pod_weights, worst_case_error_sq, GeneratingVector};
use qmcis::models::{
    glmm_condition, rb_alpha_bound, rb_price_closed_form_sigma0, GlmmInstance, RbInstance, Synthetic,
};
use qmcis::numkit::{fit_loglog_slope, RngStream};
use qmcis::rkhs::{rate_certificate, theta_hat, ThetaGrid, WeightScheme};
use qmcis_cli::config::{ExperimentConfig, Method, ProblemConfig, Sampler};
use qmcis_cli::runner::{run_convergence, ConvergenceReport};
use qmcis_cli::VectorCache;
use qmcis_validation::{derivative_errors, glmm_direct, median, rb_frobenius_sq, subset_wce_sq};
use rand::Rng;

const POD: (f64, f64, f64) = (0.1, 3.1, 0.51);
const GAUSSIAN_KINDS: [ProposalKind; 3] = [ProposalKind::None, ProposalKind::Odis, ProposalKind::Lapis];

struct Outcome {
    pass: bool,
    detail: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { pass: true, detail: Vec::new() }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.detail.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.detail.push(format!("     {line}"));
    }
}

fn gaussian(alpha_sq: f64) -> WeightScheme {
    WeightScheme::gaussian(alpha_sq).unwrap()
}

fn cbc(n: u64, d: usize, scheme: &WeightScheme) -> GeneratingVector {
    let w = make_pod_weights(d, POD.0, POD.1, POD.2).unwrap();
    cbc_construct(n, d, &w, &ThetaGrid::new(scheme, n as usize).unwrap()).unwrap()
}

fn closed_form_exactness() -> Outcome {
    let mut o = Outcome::new();
    let exact = 0.5f64.exp();
    for d in [1usize, 5] {
        let mut a = vec![0.0; d];
        a[0] = 1.0;
        let p = Synthetic::GaussianMgf { a }.problem().unwrap();
        let plan = resolve_plan(&p, ProposalKind::Odis).unwrap();
        for n in [8u64, 1024] {
            for src in [PointSource::MonteCarlo { n: n as usize }, PointSource::Lattice(cbc(n, d, &gaussian(4.0)))] {
                let r = estimate(&p, &plan, &src, &Sampling::new(8, 1)).unwrap();
                let rel = (r.value / exact - 1.0).abs();
                let spread = r.per_shift.iter().fold(0.0f64, |m, v| m.max((v - r.value).abs()));
                let var = r.per_shift.iter().map(|v| (v - r.value).powi(2)).sum::<f64>() / 7.0;
                o.check(
                    rel <= 1e-12 && spread <= 1e-14,
                    format!("d={d} N={n} {}: rel err {rel:.2e}, per-shift spread {spread:.1e}, variance {var:.1e}", src.label()),
                );
            }
        }
    }
    o
}

fn fourier_bound() -> Outcome {
    let mut o = Outcome::new();
    for alpha_sq in [3.0, 4.0, 9.0] {
        let s = gaussian(alpha_sq);
        let cert = rate_certificate(&s).unwrap();
        let mut violations = Vec::new();
        let mut worst: (f64, i64) = (0.0, 0);
        for h in 1..=128i64 {
            let ratio = theta_hat(h, &s).unwrap() / cert.bound(h);
            if ratio > worst.0 {
                worst = (ratio, h);
            }
            if ratio > 1.0 {
                violations.push(h);
            }
        }
        o.check(
            violations.is_empty(),
            format!(
                "alpha^2={alpha_sq}: C2={:.4} r2={:.4}, {} violations{}, max ratio {:.4} at h={}",
                cert.c2,
                cert.r2,
                violations.len(),
                violations.first().map(|h| format!(" (first h={h})")).unwrap_or_default(),
                worst.0,
                worst.1
            ),
        );
    }
    o
}

fn wce_rate() -> Outcome {
    let mut o = Outcome::new();
    let s = gaussian(4.0);
    let w = make_pod_weights(4, POD.0, POD.1, POD.2).unwrap();
    let pts: Vec<(f64, f64)> = (6..=12)
        .map(|k| {
            let n = 1u64 << k;
            let grid = ThetaGrid::new(&s, n as usize).unwrap();
            let g = cbc_construct(n, 4, &w, &grid).unwrap();
            (n as f64, worst_case_error_sq(&g, &w, &grid).unwrap().sqrt())
        })
        .collect();
    let fit = fit_loglog_slope(&pts).unwrap();
    o.check(fit.slope <= -0.65, format!("slope {:.4} (threshold -0.65)", fit.slope));
    o.note(format!("e(2^6) = {:.3e}, e(2^12) = {:.3e}", pts[0].1, pts[6].1));
    o
}

fn rb_config(d: usize, seed: u64, methods: Vec<Method>, scheme: WeightScheme) -> ExperimentConfig {
    ExperimentConfig {
        seed,
        replications: 16,
        n_list: (8..=13).map(|k| 1u64 << k).collect(),
        methods,
        problem: Some(ProblemConfig::RandlemanBartter { d, r0: 0.1, sigma: 0.01 }),
        scheme,
        ..ExperimentConfig::default()
    }
}

fn slope(r: &ConvergenceReport, m: &Method) -> f64 {
    r.fit(m).map_or(f64::NAN, |f| f.slope)
}

fn rb_convergence() -> Outcome {
    let mut o = Outcome::new();
    let is = [ProposalKind::Odis, ProposalKind::Lapis];
    for (d, rqmc_max) in [(5usize, -0.8), (16, -0.7)] {
        let mut methods: Vec<Method> = GAUSSIAN_KINDS.iter().map(|&k| Method::new(Sampler::Mc, k)).collect();
        methods.extend(is.iter().map(|&k| Method::new(Sampler::Rqmc, k)));
        let cfg = rb_config(d, 1, methods.clone(), gaussian(4.0));
        let r = run_convergence(&cfg, &VectorCache::new(None)).unwrap();
        o.check(r.failed_cells() == 0, format!("d={d}: {} cells, {} failed", r.rows.len(), r.failed_cells()));
        for m in &methods {
            let s = slope(&r, m);
            match m.sampler {
                Sampler::Mc => o.check((-0.65..=-0.35).contains(&s), format!("d={d} {m}: slope {s:.4} in [-0.65, -0.35]")),
                Sampler::Rqmc => o.check(s <= rqmc_max, format!("d={d} {m}: slope {s:.4} <= {rqmc_max}")),
            }
        }
        for k in is {
            let mc = r.row(&Method::new(Sampler::Mc, k), 1 << 13).unwrap().rmse;
            let q = r.row(&Method::new(Sampler::Rqmc, k), 1 << 13).unwrap().rmse;
            o.check(mc >= 10.0 * q, format!("d={d} {k}: rmse at 2^13 mc {mc:.3e} / rqmc {q:.3e} = {:.2}x (need 10x)", mc / q));
        }
    }
    o
}

fn oracle_equivalences() -> Outcome {
    let mut o = Outcome::new();
    let s = gaussian(4.0);
    let mut rng = RngStream::new(2024, 0).rng();
    let grids: Vec<ThetaGrid> = [8usize, 16, 32, 64, 128].iter().map(|&n| ThetaGrid::new(&s, n).unwrap()).collect();
    let mut worst = 0.0f64;
    for case in 0..25 {
        let grid = &grids[case % grids.len()];
        let n = grid.n as u64;
        let d = rng.random_range(1..=8usize);
        let z: Vec<u64> = (0..d).map(|_| 2 * rng.random_range(0..n / 2) + 1).collect();
        let gen = GeneratingVector::new(n, z).unwrap();
        let w = make_pod_weights(d, rng.random_range(0.05..1.0), rng.random_range(1.0..4.0), POD.2).unwrap();
        let fast = worst_case_error_sq(&gen, &w, grid).unwrap();
        let slow = subset_wce_sq(&gen, &w, grid);
        worst = worst.max((fast - slow).abs() / slow.abs());
    }
    o.check(worst <= 1e-10, format!("symmetric polynomials vs subset enumeration, 25 cases: worst rel {worst:.2e}"));

    let grid = ThetaGrid::new(&s, 16).unwrap();
    let w = make_pod_weights(2, POD.0, POD.1, POD.2).unwrap();
    let chosen = cbc_construct(16, 2, &w, &grid).unwrap();
    let e_cbc = worst_case_error_sq(&chosen, &w, &grid).unwrap();
    let mut best = (f64::INFINITY, (0, 0));
    for z1 in (1..16).step_by(2) {
        for z2 in (1..16).step_by(2) {
            let e = subset_wce_sq(&GeneratingVector::new(16, vec![z1, z2]).unwrap(), &w, &grid);
            if e < best.0 {
                best = (e, (z1, z2));
            }
        }
    }
    o.check(
        e_cbc <= best.0 * (1.0 + 1e-12),
        format!("N=16 d=2: cbc {:?} e^2={e_cbc:.6e}, exhaustive best {:?} e^2={:.6e}", chosen.z, best.1, best.0),
    );

    let mut pts = |d: usize, spread: f64| -> Vec<Vec<f64>> {
        (0..50).map(|_| (0..d).map(|_| rng.random_range(-spread..spread)).collect()).collect()
    };
    let glmm = GlmmInstance::new(vec![0, 3, 1, 7, 2, 4], 0.4, 0.7, 0.9).unwrap();
    let (eg, eh) = derivative_errors(&glmm, &pts(6, 1.5));
    o.check(eg <= 1e-6 && eh <= 1e-6, format!("glmm d=6 derivatives: grad {eg:.2e}, hess {eh:.2e}"));
    for m in [RbInstance::baseline(5), RbInstance::new(8, 0.05, 0.25).unwrap()] {
        let (eg, eh) = derivative_errors(&m, &pts(m.d, 2.0));
        o.check(eg <= 1e-6 && eh <= 1e-6, format!("rb d={} sigma={}: grad {eg:.2e}, hess {eh:.2e}", m.d, m.sigma));
    }
    o
}

fn degenerate_oracles() -> Outcome {
    let mut o = Outcome::new();
    for d in [3usize, 5] {
        let m = RbInstance::new(d, 0.1, 0.0).unwrap();
        let exact = rb_price_closed_form_sigma0(&m).unwrap();
        let p = m.problem().unwrap();
        let mut worst = 0.0f64;
        for kind in GAUSSIAN_KINDS {
            let plan = resolve_plan(&p, kind).unwrap();
            for src in [PointSource::MonteCarlo { n: 256 }, PointSource::Lattice(cbc(256, d, &gaussian(4.0)))] {
                let r = estimate(&p, &plan, &src, &Sampling::new(4, 1)).unwrap();
                worst = worst.max((r.value / exact - 1.0).abs());
            }
        }
        o.check(worst <= 1e-14, format!("rb d={d} sigma=0: (1.1)^-{} = {exact:.15}, worst rel {worst:.1e} over none/odis/lapis x mc/rqmc", d + 1));
    }
    for d in [1usize, 4] {
        let p = Synthetic::ConstantOne { d }.problem().unwrap();
        let mut all = true;
        for kind in GAUSSIAN_KINDS {
            let plan = resolve_plan(&p, kind).unwrap();
            for src in [PointSource::MonteCarlo { n: 64 }, PointSource::Lattice(cbc(64, d, &gaussian(4.0)))] {
                let r = estimate(&p, &plan, &src, &Sampling::new(4, 1)).unwrap();
                all &= r.value == 1.0 && r.rmse == 0.0;
            }
        }
        o.check(all, format!("G=1 d={d}: value 1 and rmse 0 under none/odis/lapis x mc/rqmc"));
    }
    o
}

fn assumption_checker() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = RngStream::new(77, 0).rng();
    let (mut eigen_agree, mut closed_agree, mut omega_err) = (0, 0, 0.0f64);
    let mut tally = [0usize; 3];
    for _ in 0..20 {
        let d = rng.random_range(1..=8usize);
        let y: Vec<u64> = (0..d).map(|_| rng.random_range(0..8)).collect();
        let inst = GlmmInstance::new(y, rng.random_range(-3.0..1.0), rng.random_range(0.0..0.9), rng.random_range(0.1..1.5))
            .unwrap();
        let alpha_sq = [3.0, 4.0, 9.0][rng.random_range(0..3)];
        let scheme = gaussian(alpha_sq);
        let direct = glmm_direct(&inst);

        let p = inst.problem().unwrap();
        let plan = resolve_plan(&p, ProposalKind::Lapis).unwrap();
        let report = check_assumptions(&p, &plan, &scheme).unwrap();
        let eigen_direct = direct.neg_h_min * direct.lambda_max < 1.0 / alpha_sq.sqrt();
        eigen_agree += usize::from((report.eigen_verdict == Verdict::Satisfied) == eigen_direct);

        let c = glmm_condition(&inst, &scheme).unwrap();
        let max_omega = direct.omega_star.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sufficient = direct.lambda_max < (-inst.beta - max_omega).exp() / alpha_sq;
        let necessary = 2.0 * (inst.beta + max_omega).exp() * direct.lambda_max < 1.0;
        closed_agree += usize::from(c.sufficient == sufficient && c.necessary == necessary);
        omega_err = omega_err.max(
            c.omega_star.iter().zip(&direct.omega_star).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())),
        );
        tally[0] += usize::from(eigen_direct);
        tally[1] += usize::from(sufficient);
        tally[2] += usize::from(necessary);
    }
    o.check(eigen_agree == 20, format!("generic eigenvalue inequality: {eigen_agree}/20 agree"));
    o.check(closed_agree == 20, format!("closed-form sufficient/necessary: {closed_agree}/20 agree"));
    o.note(format!(
        "true counts: eigen {}, sufficient {}, necessary {}; max |mode difference| {omega_err:.1e}",
        tally[0], tally[1], tally[2]
    ));

    let mut ok = 0;
    let mut min_gap = f64::INFINITY;
    for _ in 0..20 {
        let inst = RbInstance::new(rng.random_range(1..=20), rng.random_range(0.01..0.2), rng.random_range(0.005..0.5)).unwrap();
        let b = rb_alpha_bound(&inst).unwrap();
        let z = qmcis::isampling::find_mode(&inst.problem().unwrap()).unwrap().z_star;
        let frob = rb_frobenius_sq(&inst, &z);
        ok += usize::from(b.s_d <= frob);
        min_gap = min_gap.min(frob / b.s_d);
    }
    o.check(ok == 20, format!("rb S_d <= direct Frobenius^2: {ok}/20, smallest ratio {min_gap:.3}"));
    o
}

fn t_proposal() -> Outcome {
    let mut o = Outcome::new();
    let nus = [6.0, 20.0, 100.0];
    let mut medians = Vec::new();
    for nu in nus {
        let m = Method::new(Sampler::Rqmc, ProposalKind::StudentT { nu });
        let slopes: Vec<f64> = (1..=3u64)
            .map(|seed| {
                let cfg = rb_config(3, seed, vec![m], WeightScheme::rational(2.0, nu).unwrap());
                slope(&run_convergence(&cfg, &VectorCache::new(None)).unwrap(), &m)
            })
            .collect();
        let med = median(&slopes);
        o.note(format!("nu={nu}: slopes {:.4} {:.4} {:.4}, median {med:.4}", slopes[0], slopes[1], slopes[2]));
        medians.push(med);
    }
    let threshold = -(1.0 - (2.0 * 2.0 + 1.0) / (2.0 * 20.0)) + 0.15;
    o.check(medians[1] <= threshold, format!("nu=20 median slope {:.4} <= {threshold:.4}", medians[1]));
    o.check(
        medians[0] > medians[1] && medians[1] > medians[2],
        format!("monotone improvement over nu = 6, 20, 100: {:.4} > {:.4} > {:.4}", medians[0], medians[1], medians[2]),
    );
    o
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("closed-form exactness (ODIS, gaussian mgf)", closed_form_exactness),
        ("Fourier coefficient bound, gaussian weight", fourier_bound),
        ("worst-case error rate of CBC vectors", wce_rate),
        ("bond model convergence, d = 5 and 16", rb_convergence),
        ("oracle equivalences", oracle_equivalences),
        ("degenerate oracles", degenerate_oracles),
        ("assumption checker", assumption_checker),
        ("Student t proposal rates", t_proposal),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let secs = start.elapsed().as_secs_f64();
        println!("{} criterion {}: {name} ({secs:.1} s)", if out.pass { "PASS" } else { "FAIL" }, i + 1);
        for line in &out.detail {
            println!("    {line}");
        }
        if !out.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", criteria.len());
    } else {
        println!("acceptance: {} of {} criteria fail: {failed:?}", failed.len(), criteria.len());
        std::process::exit(1);
    }
}
