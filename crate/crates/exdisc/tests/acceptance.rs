//! Acceptance suite: every quantitative claim the artifact makes, at the
//! default desk scale (c0 = 1, R = 30, N = 600, M = 128), one test per
//! criterion, each printing a pass/fail line (run with `--nocapture` to see
//! them on success).
//!
//! Known red: the Neumann/Robin pair of criterion 3. Its two boundary
//! conditions share the principal boundary symbol, so the leading Weyl
//! coefficient of the inverse difference vanishes and the observed slope is
//! -3; the pinned band [-2.15, -1.85] cannot be met by a faithful
//! implementation. The test states the band as pinned and fails honestly.

use std::sync::{Arc, OnceLock};

use exdisc::experiments::{
    run_biharmonic, run_krein_identity, run_negligibility, run_union, run_weyl, ExperimentConfig,
    ExperimentKind, ExperimentReport,
};
use exdisc::grid::build_grid;
use exdisc::krein::poisson_mode;
use exdisc::mode_ops::{apply_bc, assemble_second_order, Coefficients, RealizationSpec};

fn report_criteria(tag: &str, report: &ExperimentReport, names: &[&str]) -> bool {
    let mut all = true;
    for c in &report.criteria {
        let relevant = names.is_empty() || names.iter().any(|n| c.name.starts_with(n));
        if !relevant {
            continue;
        }
        println!(
            "{tag}: [{}] {} = {:.6e} (requirement {})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.requirement
        );
        all &= c.pass;
    }
    all
}

fn krein_report() -> &'static ExperimentReport {
    static R: OnceLock<ExperimentReport> = OnceLock::new();
    R.get_or_init(|| {
        let mut cfg = ExperimentConfig::new(ExperimentKind::KreinIdentity);
        cfg.modes = Some(129); // covers every mode m <= 128
        run_krein_identity(&cfg).expect("identity experiment")
    })
}

fn weyl_report() -> &'static ExperimentReport {
    static R: OnceLock<ExperimentReport> = OnceLock::new();
    R.get_or_init(|| {
        let cfg = ExperimentConfig::new(ExperimentKind::Weyl);
        run_weyl(&cfg).expect("weyl experiment")
    })
}

fn union_report() -> &'static ExperimentReport {
    static R: OnceLock<ExperimentReport> = OnceLock::new();
    R.get_or_init(|| {
        let cfg = ExperimentConfig::new(ExperimentKind::Union);
        run_union(&cfg).expect("union experiment")
    })
}

#[test]
fn criterion_01_resolvent_identity() {
    let ok = report_criteria(
        "criterion 1",
        krein_report(),
        &["identity_max_rel_error", "dirichlet_limit_ratio"],
    );
    assert!(ok, "criterion 1 failed");
}

#[test]
fn criterion_02_neumann_type_equivalence() {
    let ok = report_criteria("criterion 2", krein_report(), &["equivalence_max_rel_error"]);
    assert!(ok, "criterion 2 failed");
}

#[test]
fn criterion_03_pair_exponents() {
    let ok = report_criteria(
        "criterion 3",
        weyl_report(),
        &["sv_dirichlet_neumann", "sv_dirichlet_robin", "sv_neumann_robin"],
    );
    assert!(
        ok,
        "criterion 3 failed (expected: the Neumann/Robin pair sits at slope -3 \
         because its leading Weyl coefficient vanishes; see README)"
    );
}

#[test]
fn criterion_04_interior_truncation_exponent() {
    let ok = report_criteria("criterion 4", weyl_report(), &["interior_truncation_slope"]);
    assert!(ok, "criterion 4 failed");
}

#[test]
fn criterion_05_spectral_negligibility() {
    let cfg = ExperimentConfig::new(ExperimentKind::Negligibility);
    let report = run_negligibility(&cfg).expect("negligibility experiment");
    let ok = report_criteria(
        "criterion 5",
        &report,
        &["restricted_poisson_sustained_p", "offdiagonal_blocks_sustained_p"],
    );
    assert!(ok, "criterion 5 failed");
}

#[test]
fn criterion_06_essential_spectrum_augmentation() {
    let ok = report_criteria(
        "criterion 6",
        union_report(),
        &["cluster_count_at_", "cluster_growth_", "dirichlet_cluster_count"],
    );
    assert!(ok, "criterion 6 failed");
}

#[test]
fn criterion_07_spectrum_not_diminished() {
    let ok = report_criteria("criterion 7", union_report(), &["counting_diff_max"]);
    assert!(ok, "criterion 7 failed");
}

#[test]
fn criterion_08_two_point_augmentation() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Union);
    cfg.t_values = Some(vec![0.4, 0.6]);
    let report = run_union(&cfg).expect("two-point union experiment");
    let ok = report_criteria(
        "criterion 8",
        &report,
        &["cluster_count_at_+0.400", "cluster_count_at_+0.600"],
    );
    assert!(ok, "criterion 8 failed");
}

#[test]
fn criterion_09_biharmonic_family() {
    let cfg = ExperimentConfig::new(ExperimentKind::Biharmonic);
    let report = run_biharmonic(&cfg).expect("biharmonic experiment");
    let ok = report_criteria(
        "criterion 9",
        &report,
        &[
            "zero_perturbation_error",
            "cluster_count_at_",
            "cluster_growth_",
            "unperturbed_spectrum_floor",
        ],
    );
    assert!(ok, "criterion 9 failed");
}

#[test]
fn criterion_10_oracle_agreement() {
    // DtN and null-norm against the Bessel oracles on the finest grid of a
    // refinement ladder, plus second-order mesh convergence of the solver.
    let co = Coefficients::second_order(1.0).unwrap();
    let mut p_errs = Vec::new();
    let mut l_errs = Vec::new();
    let p_oracle = -specfun::bessel_k1(1.0) / specfun::bessel_k0(1.0);
    let k01 = specfun::bessel_k0(1.0);
    let lam_oracle = specfun::adaptive_simpson(
        &|r: f64| {
            let v = specfun::bessel_k0(r) / k01;
            v * v * r
        },
        1.0,
        40.0,
        1e-12,
    );
    for n in [200usize, 400, 800, 1600] {
        let grid = Arc::new(build_grid(1.0, 20.0, n, 2.0).unwrap());
        let nd = poisson_mode(0, &grid, &co).unwrap();
        p_errs.push((nd.p_m - p_oracle).abs());
        l_errs.push((nd.lambda_m - lam_oracle).abs());
    }
    let p_fine = *p_errs.last().unwrap();
    let l_fine = *l_errs.last().unwrap();
    println!(
        "criterion 10: [{}] dtn_error_finest = {:.6e} (requirement <= 1e-5)",
        if p_fine <= 1e-5 { "PASS" } else { "FAIL" },
        p_fine
    );
    println!(
        "criterion 10: [{}] null_norm_error_finest = {:.6e} (requirement <= 1e-4)",
        if l_fine <= 1e-4 { "PASS" } else { "FAIL" },
        l_fine
    );

    // Mesh convergence of solve() against the closed-form solution.
    let mut errs = Vec::new();
    let ladder = [100usize, 200, 400, 800];
    for n in ladder {
        let grid = Arc::new(build_grid(1.0, 30.0, n, 2.0).unwrap());
        let raw = assemble_second_order(0, &grid, &co).unwrap();
        let dir = apply_bc(&raw, &RealizationSpec::Dirichlet).unwrap();
        let u = dir.solve(&vec![1.0; dir.n()]).unwrap();
        let mut worst = 0.0f64;
        for (i, r) in dir.active_nodes().iter().enumerate() {
            if *r <= 12.0 {
                worst = worst.max((u[i] - (1.0 - specfun::bessel_k0(*r) / k01)).abs());
            }
        }
        errs.push(worst);
    }
    let xs: Vec<f64> = ladder.iter().map(|n| (*n as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let k = xs.len() as f64;
    let (sx, sy): (f64, f64) = (xs.iter().sum(), ys.iter().sum());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let order = -(k * sxy - sx * sy) / (k * sxx - sx * sx);
    let order_ok = (1.7..=2.3).contains(&order);
    println!(
        "criterion 10: [{}] mesh_convergence_order = {:.3} (requirement 2.0 +/- 0.3)",
        if order_ok { "PASS" } else { "FAIL" },
        order
    );

    assert!(p_fine <= 1e-5, "DtN error {p_errs:?}");
    assert!(l_fine <= 1e-4, "null norm error {l_errs:?}");
    assert!(order_ok, "order {order}, errors {errs:?}");
}
