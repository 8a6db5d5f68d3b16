//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line
//! straight to stdout, so the summary survives output capture.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use fidelity::goe::{verify_goe_identity, GoeIntegrator};
use fidelity::gue::{fidelity_gue, fidelity_gue_oracle, fidelity_gue_small_eps, heisenberg_continuity, oracle_rule};
use fidelity::linear_response::{c_of_tau, default_rule, fidelity_lr, ResponseForm};
use fidelity::model::{Beta, EnsembleSpec, FidelityCurve, PerturbationSpec, TimeGrid};
use fidelity::sim::eigen::diagonalize;
use fidelity::sim::ensemble::mix;
use fidelity::sim::estimator::pair_amplitude;
use fidelity::sim::{estimate_curve, sample_pair, spectral_calibration, SimulationConfig};

fn report(id: u32, title: &str, passed: bool, detail: &str) {
    let line = format!(
        "criterion {id} [{}] {title}: {detail}\n",
        if passed { "PASS" } else { "FAIL" }
    );
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(passed, "criterion {id} failed: {detail}");
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

#[test]
fn criterion_1_gue_oracle_equivalence() {
    let start = Instant::now();
    let rule = oracle_rule();
    let grid = TimeGrid::uniform(0.01, 3.0, 300).unwrap();
    let mut worst = (0.0f64, 0.0, 0.0);
    for eps in [0.2, 1.0, 2.0, 4.0, 10.0] {
        for &tau in grid.taus() {
            let d = (fidelity_gue(eps, tau).unwrap() - fidelity_gue_oracle(eps, tau, &rule).unwrap()).abs();
            if d > worst.0 {
                worst = (d, eps, tau);
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        1,
        "GUE closed form vs integral",
        worst.0 <= 1e-10 && elapsed < Duration::from_secs(1),
        &format!(
            "max |diff| {:.2e} at eps={} tau={:.3} (tol 1e-10), {:.3} s",
            worst.0,
            worst.1,
            worst.2,
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_2_heisenberg_time_continuity() {
    let start = Instant::now();
    let mut value_jump = 0.0f64;
    let mut slope_jump = 0.0f64;
    for eps in [0.2, 1.0, 4.0, 10.0] {
        let c = heisenberg_continuity(eps).unwrap();
        value_jump = value_jump.max(c.value_jump);
        slope_jump = slope_jump.max(c.slope_jump());
    }
    // Estimator error is near 1e-7.
    let at4 = heisenberg_continuity(4.0).unwrap();
    let curvature_detected = at4.curvature_jump() > 1e-4;
    let elapsed = start.elapsed();
    report(
        2,
        "continuity at tau = 1",
        value_jump <= 1e-8 && slope_jump <= 1e-4 && curvature_detected && elapsed < Duration::from_secs(1),
        &format!(
            "value jump {value_jump:.1e} (tol 1e-8), slope jump {slope_jump:.1e} (tol 1e-4), \
             eps=4 curvature left {:.8} right {:.8} jump {:.1e} (needs > 1e-4), {:.3} s",
            at4.curvature_left,
            at4.curvature_right,
            at4.curvature_jump(),
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_3_unperturbed_goe_identity() {
    let start = Instant::now();
    let grid = TimeGrid::new((1..=50).map(|i| 0.06 * i as f64).collect()).unwrap();
    let r = verify_goe_identity(&grid, 1e-6).unwrap();
    let elapsed = start.elapsed();
    report(
        3,
        "GOE f_0(tau) = 1",
        r.passed && elapsed < Duration::from_secs(30),
        &format!(
            "max |f_0 - 1| {:.2e} at tau={:.2} over 50 points (tol 1e-6), {:.2} s",
            r.max_deviation,
            r.worst_tau,
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_4_small_perturbation_limit() {
    let start = Instant::now();
    let eps = 1e-3;
    let goe = GoeIntegrator::default_instance();
    let mut worst = 0.0f64;
    let mut form = 0.0f64;
    for tau in [0.25, 0.5, 0.75, 1.0] {
        for (beta, f) in [
            (Beta::Unitary, fidelity_gue(eps, tau).unwrap()),
            (Beta::Orthogonal, goe.fidelity(eps, tau).unwrap()),
        ] {
            let c = c_of_tau(beta, tau, default_rule()).unwrap();
            worst = worst.max(((1.0 - f) / eps / c - 1.0).abs());
        }
        let expansion = fidelity_gue_small_eps(eps, tau).unwrap();
        let lr = fidelity_lr(Beta::Unitary, eps, tau, ResponseForm::Linear).unwrap();
        form = form.max((expansion - lr).abs());
    }
    let elapsed = start.elapsed();
    report(
        4,
        "small-eps limit vs linear response",
        worst <= 0.02 && form <= 1e-14 && elapsed < Duration::from_secs(60),
        &format!(
            "max relative deviation {:.3}% (tol 2%), GUE expansion vs 1 - eps C {form:.1e}, {:.2} s",
            100.0 * worst,
            secs(elapsed)
        ),
    );
}

fn mc_agreement(beta: Beta, eps: f64) -> (bool, String) {
    let start = Instant::now();
    let grid = TimeGrid::uniform(0.0, 1.5, 31).unwrap();
    let cfg = SimulationConfig::new(
        EnsembleSpec::new(beta, 300).unwrap(),
        PerturbationSpec::new(eps).unwrap(),
        grid.clone(),
    )
    .with_realizations(100, 20)
    .with_seed(2024);
    let sim = estimate_curve(&cfg).unwrap();
    let stderr = sim.stderr.clone().unwrap();
    let (mut ok, mut worst, mut worst_tau) = (true, 0.0f64, 0.0);
    for (i, &tau) in grid.taus().iter().enumerate() {
        let exact = match beta {
            Beta::Unitary => fidelity_gue(eps, tau).unwrap(),
            _ => GoeIntegrator::default_instance().fidelity(eps, tau).unwrap(),
        };
        let d = (sim.values[i] - exact).abs();
        ok &= d <= (3.0 * stderr[i]).max(0.01);
        if d > worst {
            worst = d;
            worst_tau = tau;
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(15 * 60);
    (
        ok,
        format!(
            "{} eps={eps}: max |sim - exact| {worst:.4} at tau={worst_tau:.2}, {:.0} s",
            beta.name(),
            secs(elapsed)
        ),
    )
}

#[test]
fn criterion_5_monte_carlo_matches_exact_curves() {
    let (gue_ok, gue) = mc_agreement(Beta::Unitary, 4.0);
    let (goe_ok, goe) = mc_agreement(Beta::Orthogonal, 1.0);
    report(
        5,
        "Monte Carlo vs exact, N=300, 100x20",
        gue_ok && goe_ok,
        &format!("{gue}; {goe} (tol max(0.01, 3 stderr))"),
    );
}

#[test]
fn criterion_6_partial_revival() {
    let start = Instant::now();
    let grid = TimeGrid::uniform(0.7, 1.2, 501).unwrap();
    let goe = GoeIntegrator::default_instance();
    let gue = FidelityCurve::from_fn(&grid, |t| fidelity_gue(10.0, t)).unwrap();
    let goe_curve = FidelityCurve::from_fn(&grid, |t| goe.fidelity(10.0, t)).unwrap();
    let f08 = fidelity_gue(10.0, 0.8).unwrap();
    let peak = gue
        .local_maxima(0.8, 1.1)
        .into_iter()
        .find(|&(_, f)| f > f08);
    let gue_prom = gue.revival_prominence(0.8, 1.1);
    let goe_prom = goe_curve.revival_prominence(0.8, 1.1);

    // Smallest integer strength whose GUE curve does show a maximum there.
    let onset = (10..=40).find(|&e| {
        FidelityCurve::from_fn(&grid, |t| fidelity_gue(e as f64, t))
            .unwrap()
            .local_maxima(0.8, 1.1)
            .iter()
            .any(|&(_, f)| f > fidelity_gue(e as f64, 0.8).unwrap())
    });
    let elapsed = start.elapsed();
    report(
        6,
        "partial revival at eps = 10",
        peak.is_some() && goe_prom < gue_prom && elapsed < Duration::from_secs(60),
        &format!(
            "GUE f(0.8)={f08:.5} f(0.9)={:.5} f(1.0)={:.5}, maximum {:?}, prominence GUE {gue_prom:.2e} GOE {goe_prom:.2e}; \
             first GUE maximum in (0.8, 1.1) at integer eps {:?}; {:.1} s",
            fidelity_gue(10.0, 0.9).unwrap(),
            fidelity_gue(10.0, 1.0).unwrap(),
            peak,
            onset,
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_7_spectral_calibration() {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for beta in Beta::ALL {
        let cfg = SimulationConfig::new(
            EnsembleSpec::new(beta, 500).unwrap(),
            PerturbationSpec::new(0.0).unwrap(),
            TimeGrid::new(vec![0.0]).unwrap(),
        )
        .with_realizations(200, 1)
        .with_seed(7);
        let r = spectral_calibration(&cfg).unwrap();
        let this = match beta {
            Beta::Symplectic => r.spacing_ok && r.kramers_max_splitting.is_some_and(|k| k <= 1e-8),
            _ => r.spacing_ok && r.density_ok,
        };
        ok &= this;
        let mut part = format!(
            "{} spacing {:.4} (tol {}), density dev {:.3}",
            beta.name(),
            r.mean_spacing,
            r.spacing_tolerance,
            r.max_density_deviation
        );
        if let Some(k) = r.kramers_max_splitting {
            part += &format!(", Kramers splitting {k:.1e}");
        }
        if let Some(ff) = &r.form_factor {
            part += &format!(", form factor |dev| {:.3}", ff.mean_abs_deviation);
        }
        parts.push(part);
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(10 * 60);
    report(
        7,
        "spectral calibration, N=500, 200 draws",
        ok,
        &format!("{}; {:.0} s", parts.join("; "), secs(elapsed)),
    );
}

#[test]
fn criterion_8_gse_properties() {
    let start = Instant::now();
    let spec = EnsembleSpec::new(Beta::Symplectic, 300).unwrap();
    let eps = 0.2;
    let phi = PerturbationSpec::new(eps).unwrap().phi(300);

    let mut f0_dev = 0.0f64;
    let band = fidelity::sim::estimator::central_band(&spec, 0.2).unwrap();
    for inner in 0..3 {
        let pair = sample_pair(&spec, phi, 99, inner, inner).unwrap();
        let base = diagonalize(&pair.h0).unwrap();
        let pert = diagonalize(&mix(&pair.h0, &pair.h1, phi)).unwrap();
        let (re, _) = pair_amplitude(&base, &pert, band.clone(), &[0.0]);
        f0_dev = f0_dev.max((re[0] - 1.0).abs());
    }

    let grid = TimeGrid::uniform(0.0, 0.5, 11).unwrap();
    let cfg = SimulationConfig::new(spec, PerturbationSpec::new(eps).unwrap(), grid.clone())
        .with_realizations(100, 20)
        .with_seed(4);
    let sim = estimate_curve(&cfg).unwrap();
    let stderr = sim.stderr.clone().unwrap();
    let mut ok = f0_dev <= 1e-12;
    let mut worst_z = 0.0f64;
    let mut worst_log_z = 0.0f64;
    let mut rows = Vec::new();
    for (i, &tau) in grid.taus().iter().enumerate().skip(1) {
        let c = c_of_tau(Beta::Symplectic, tau, default_rule()).unwrap();
        let measured = (1.0 - sim.values[i]) / eps;
        let err = stderr[i] / eps;
        let z = (measured - c).abs() / err;
        ok &= (measured - c).abs() <= 3.0 * err;
        worst_z = worst_z.max(z);
        // Same data read through the exponentiated law, for diagnosis only.
        let log_measured = -sim.values[i].ln() / eps;
        worst_log_z = worst_log_z.max((log_measured - c).abs() / (err / sim.values[i]));
        if i % 5 == 0 {
            rows.push(format!("tau={tau:.2} (1-f)/eps={measured:.4}+-{err:.4} C={c:.4}"));
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(15 * 60);
    report(
        8,
        "GSE: f(0) = 1 and weak-perturbation decay",
        ok,
        &format!(
            "max |f(0) - 1| {f0_dev:.1e}; {}; worst deviation {worst_z:.2} stderr (tol 3); \
             -ln(f)/eps vs C worst {worst_log_z:.2} stderr; {:.0} s",
            rows.join(", "),
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_9_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--mode", "simulate", "--beta", "2", "--epsilon", "2,6", "--steps", "31", "--dim", "80",
        "--outer", "8", "--inner", "3", "--seed", "11",
    ];
    let mut outputs = Vec::new();
    for (i, workers) in ["1", "4", "1", "2"].iter().enumerate() {
        let run = dir.path().join(format!("run{i}"));
        std::fs::create_dir(&run).unwrap();
        for format in ["csv", "json"] {
            let status = Command::new(env!("CARGO_BIN_EXE_fidelity"))
                .current_dir(&run)
                .env("FIDELITY_WORKERS", workers)
                .args(args)
                .args(["--format", format, "--output", &format!("out.{format}")])
                .output()
                .unwrap()
                .status;
            assert!(status.success());
        }
        let csv = std::fs::read(run.join("out.csv")).unwrap();
        let json = std::fs::read(run.join("out.json")).unwrap();
        outputs.push((csv, json));
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    report(
        9,
        "byte-identical simulate output",
        identical,
        &format!("{} runs with 1, 4, 1 and 2 workers, CSV and JSON compared", outputs.len()),
    );
}
