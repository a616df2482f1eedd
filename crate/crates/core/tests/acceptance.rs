//! End-to-end verification suite. One test per criterion; each prints a
//! PASS/FAIL line (visible with `--nocapture`) and asserts its thresholds.
//!
//! Criterion 3 (maximal-coupling thresholds) is known to fail: the closed
//! forms approach full entanglement only like `1 - O(1/sqrt(A))`, far more
//! slowly than the demanded couplings assume. The test keeps the demanded
//! thresholds and reports the measured values; see the assertion message.

use std::time::Instant;

use moshinsky_core::model2e::{
    self, epsilon_asymptotic_2e, epsilon_closed_2e, epsilon_oracle_2e, single_particle_entropies,
    ModelParams2e, SpinConfig, StateLabel2e,
};
use moshinsky_core::model3e::{
    self, epsilon_closed_3e, epsilon_oracle_3e, epsilon_theta_mixture_3e, oracle_rule_3e,
    ModelParams3e, StateLabel3e, SzSector, CRITICAL_TAU, SUPPORTED_STATES_3E,
};
use moshinsky_core::perturb::{
    self, build_block_2e, build_block_3e, eigenstate_entanglements, entanglement_distribution,
    enumerate_level_3e, epsilon_mixture, fit_block, fit_block_permuted, reference, Excitation,
};
use moshinsky_core::quadrature::gauss_hermite;
use moshinsky_core::Interaction;

fn label3(n1: u32, n2: u32, n3: u32) -> StateLabel3e {
    StateLabel3e::new(n1, n2, n3, SzSector::PlusHalf)
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

/// All five supported two-electron states with their admissible spins.
fn supported_2e() -> Vec<StateLabel2e> {
    vec![
        StateLabel2e::ground(SpinConfig::Antiparallel).unwrap(),
        StateLabel2e::new(1, 0, 0, 0, 0, 0, SpinConfig::Antiparallel).unwrap(),
        StateLabel2e::new(0, 0, 0, 1, 0, 0, SpinConfig::Antiparallel).unwrap(),
        StateLabel2e::new(0, 0, 1, 0, 0, 0, SpinConfig::Antiparallel).unwrap(),
        StateLabel2e::new(0, 0, 0, 0, 0, 1, SpinConfig::Antiparallel).unwrap(),
        StateLabel2e::new(0, 0, 0, 0, 0, 1, SpinConfig::Parallel).unwrap(),
    ]
}

#[test]
fn criterion_1_decoupled_limit_exactness() {
    let start = Instant::now();
    let p3 = ModelParams3e::from_tau(0.0, Interaction::Attractive).unwrap();
    let want3: [((u32, u32, u32), f64); 8] = [
        ((0, 1, 0), 0.0),
        ((1, 1, 0), 8.0 / 27.0),
        ((0, 1, 1), 8.0 / 27.0),
        ((2, 1, 0), 4.0 / 9.0),
        ((1, 1, 1), 4.0 / 9.0),
        ((0, 1, 2), 4.0 / 9.0),
        ((0, 2, 1), 43.0 / 108.0),
        ((0, 0, 3), 1.0 / 4.0),
    ];
    let mut exact = true;
    for ((n1, n2, n3), want) in want3 {
        exact &= epsilon_closed_3e(&label3(n1, n2, n3), &p3).unwrap() == want;
    }
    let p2 = ModelParams2e::from_tau_sigma(0.0, 1.3, Interaction::Attractive).unwrap();
    let want2: [(StateLabel2e, f64); 6] = [
        (StateLabel2e::ground(SpinConfig::Antiparallel).unwrap(), 0.0),
        (
            StateLabel2e::new(1, 0, 0, 0, 0, 0, SpinConfig::Antiparallel).unwrap(),
            0.75,
        ),
        (
            StateLabel2e::new(0, 0, 0, 1, 0, 0, SpinConfig::Antiparallel).unwrap(),
            0.75,
        ),
        (
            StateLabel2e::new(0, 0, 1, 0, 0, 0, SpinConfig::Antiparallel).unwrap(),
            0.5,
        ),
        (
            StateLabel2e::new(0, 0, 0, 0, 0, 1, SpinConfig::Antiparallel).unwrap(),
            0.5,
        ),
        (
            StateLabel2e::new(0, 0, 0, 0, 0, 1, SpinConfig::Parallel).unwrap(),
            0.0,
        ),
    ];
    for (state, want) in want2 {
        exact &= epsilon_closed_2e(&state, &p2).unwrap() == want;
    }
    let elapsed = start.elapsed().as_secs_f64();
    let in_time = elapsed < 1.0;
    report(
        "1 (decoupled-limit exactness)",
        exact && in_time,
        &format!("exact rational comparison over 14 states, {elapsed:.3} s"),
    );
    assert!(exact, "a decoupled limit deviates from its exact rational");
    assert!(in_time, "took {elapsed:.3} s, budget 1 s");
}

#[test]
fn criterion_2_closed_form_vs_oracle() {
    let start = Instant::now();

    struct Item {
        name: String,
        diff: f64,
        tol: f64,
    }
    let mut work: Vec<Box<dyn Fn() -> Item + Send + Sync>> = Vec::new();

    for (n1, n2, n3) in SUPPORTED_STATES_3E {
        let grid: &[(f64, Interaction)] = &[
            (0.1, Interaction::Attractive),
            (0.5, Interaction::Attractive),
            (1.0, Interaction::Attractive),
            (2.0, Interaction::Attractive),
            (0.1, Interaction::Repulsive),
            (0.3, Interaction::Repulsive),
            (0.5, Interaction::Repulsive),
        ];
        for &(tau, sign) in grid {
            work.push(Box::new(move || {
                let params = ModelParams3e::from_tau(tau, sign).unwrap();
                let state = label3(n1, n2, n3);
                let rule = oracle_rule_3e(&params, model3e::DEFAULT_ORACLE_ORDER_3E).unwrap();
                let closed = epsilon_closed_3e(&state, &params).unwrap();
                let oracle = epsilon_oracle_3e(&state, &params, &rule).unwrap().epsilon;
                Item {
                    name: format!("3e |{n1}{n2}{n3}> tau={tau} {sign:?}"),
                    diff: (closed - oracle).abs(),
                    tol: 1e-8,
                }
            }));
        }
    }

    for state in supported_2e() {
        let grid: &[(f64, f64, Interaction)] = &[
            (0.2, 0.0, Interaction::Attractive),
            (0.2, 0.5, Interaction::Attractive),
            (0.2, 2.0, Interaction::Attractive),
            (0.6, 0.0, Interaction::Attractive),
            (0.6, 0.5, Interaction::Attractive),
            (0.6, 2.0, Interaction::Attractive),
            (1.5, 0.0, Interaction::Attractive),
            (1.5, 0.5, Interaction::Attractive),
            (1.5, 2.0, Interaction::Attractive),
            (0.2, 0.0, Interaction::Repulsive),
            (0.2, 0.5, Interaction::Repulsive),
            (0.2, 2.0, Interaction::Repulsive),
            (0.6, 0.0, Interaction::Repulsive),
            (0.6, 0.5, Interaction::Repulsive),
            (0.6, 2.0, Interaction::Repulsive),
        ];
        for &(tau, sigma, sign) in grid {
            work.push(Box::new(move || {
                let params = ModelParams2e::from_tau_sigma(tau, sigma, sign).unwrap();
                let rule = gauss_hermite(model2e::DEFAULT_ORACLE_ORDER_2E, 1.0).unwrap();
                let closed = epsilon_closed_2e(&state, &params).unwrap();
                let oracle = epsilon_oracle_2e(&state, &params, &rule).unwrap().epsilon;
                Item {
                    name: format!(
                        "2e {:?}/{:?} {:?} tau={tau} sigma={sigma} {sign:?}",
                        state.cm(),
                        state.rel(),
                        state.spin()
                    ),
                    diff: (closed - oracle).abs(),
                    tol: 1e-7,
                }
            }));
        }
    }

    // Fan the independent evaluations out over the available cores.
    let threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(2);
    let results: Vec<Item> = std::thread::scope(|scope| {
        let work = &work;
        let mut handles = Vec::new();
        for t in 0..threads {
            handles.push(scope.spawn(move || {
                let mut out = Vec::new();
                let mut i = t;
                while i < work.len() {
                    out.push(work[i]());
                    i += threads;
                }
                out
            }));
        }
        handles
            .into_iter()
            .flat_map(|h| h.join().unwrap())
            .collect()
    });

    let mut worst: Option<&Item> = None;
    let mut failures = Vec::new();
    for item in &results {
        if worst.map_or(true, |w| item.diff / item.tol > w.diff / w.tol) {
            worst = Some(item);
        }
        if item.diff >= item.tol {
            failures.push(format!("{}: |diff| = {:.3e}", item.name, item.diff));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let in_time = elapsed < 300.0;
    let worst = worst.unwrap();
    report(
        "2 (closed form vs oracle)",
        failures.is_empty() && in_time,
        &format!(
            "{} comparisons, worst |diff| = {:.3e} ({}), {elapsed:.1} s",
            results.len(),
            worst.diff,
            worst.name
        ),
    );
    assert!(failures.is_empty(), "disagreements: {failures:?}");
    assert!(in_time, "took {elapsed:.1} s, budget 300 s");
}

#[test]
fn criterion_3_maximal_coupling_limits() {
    let mut failures = Vec::new();

    // Attractive tau = 1e3, both models, every supported state: demand
    // eps > 0.999.
    let p3 = ModelParams3e::from_tau(1e3, Interaction::Attractive).unwrap();
    for (n1, n2, n3) in SUPPORTED_STATES_3E {
        let eps = epsilon_closed_3e(&label3(n1, n2, n3), &p3).unwrap();
        if eps.is_nan() || eps <= 0.999 {
            failures.push(format!(
                "3e |{n1}{n2}{n3}> attractive tau=1e3: eps = {eps:.6}"
            ));
        }
    }
    let p2 = ModelParams2e::from_tau_sigma(1e3, 0.0, Interaction::Attractive).unwrap();
    for state in supported_2e() {
        let eps = epsilon_closed_2e(&state, &p2).unwrap();
        if eps.is_nan() || eps <= 0.999 {
            failures.push(format!(
                "2e {:?}/{:?} attractive tau=1e3: eps = {eps:.6}",
                state.cm(),
                state.rel()
            ));
        }
    }

    // Repulsive tau = 0.999 tau_c (three-electron) and tau = 0.999
    // (two-electron): demand eps > 0.99.
    let p3r = ModelParams3e::from_tau(0.999 * CRITICAL_TAU, Interaction::Repulsive).unwrap();
    for (n1, n2, n3) in SUPPORTED_STATES_3E {
        let eps = epsilon_closed_3e(&label3(n1, n2, n3), &p3r).unwrap();
        if eps.is_nan() || eps <= 0.99 {
            failures.push(format!(
                "3e |{n1}{n2}{n3}> repulsive tau=0.999 tau_c: eps = {eps:.6}"
            ));
        }
    }
    let p2r = ModelParams2e::from_tau_sigma(0.999, 0.0, Interaction::Repulsive).unwrap();
    for state in supported_2e() {
        let eps = epsilon_closed_2e(&state, &p2r).unwrap();
        if eps.is_nan() || eps <= 0.99 {
            failures.push(format!(
                "2e {:?}/{:?} repulsive tau=0.999: eps = {eps:.6}",
                state.cm(),
                state.rel()
            ));
        }
    }

    report(
        "3 (maximal-coupling limits)",
        failures.is_empty(),
        &format!("{} of 28 checks below threshold", failures.len()),
    );
    assert!(
        failures.is_empty(),
        "the demanded couplings do not reach the thresholds; the subtracted term of \
         every closed form decays only like 1/sqrt(coupling ratio), so eps(tau = 1e3) \
         saturates near 0.94-0.95 (three-electron) and eps(tau = 0.999 tau_c) near \
         0.5-0.7. Measured values:\n{}",
        failures.join("\n")
    );
}

#[test]
fn criterion_4_monotonicity() {
    // Three-electron: eps non-decreasing in tau on 200-point grids.
    for (n1, n2, n3) in SUPPORTED_STATES_3E {
        let state = label3(n1, n2, n3);
        let mut last = -1.0;
        for i in 0..200 {
            let tau = 3.0 * i as f64 / 199.0;
            let eps = epsilon_closed_3e(
                &state,
                &ModelParams3e::from_tau(tau, Interaction::Attractive).unwrap(),
            )
            .unwrap();
            assert!(
                eps >= last - 1e-12,
                "3e |{n1}{n2}{n3}> attr not monotone at tau={tau}"
            );
            last = eps;
        }
        last = -1.0;
        for i in 0..200 {
            let tau = 0.999 * CRITICAL_TAU * i as f64 / 199.0;
            let eps = epsilon_closed_3e(
                &state,
                &ModelParams3e::from_tau(tau, Interaction::Repulsive).unwrap(),
            )
            .unwrap();
            assert!(
                eps >= last - 1e-12,
                "3e |{n1}{n2}{n3}> rep not monotone at tau={tau}"
            );
            last = eps;
        }
    }

    // Two-electron: non-decreasing in tau, non-increasing in sigma.
    for state in supported_2e() {
        for sigma in [0.0, 1.0, 5.0] {
            let mut last = -1.0;
            for i in 0..150 {
                let tau = 3.0 * i as f64 / 149.0;
                let eps = epsilon_closed_2e(
                    &state,
                    &ModelParams2e::from_tau_sigma(tau, sigma, Interaction::Attractive).unwrap(),
                )
                .unwrap();
                assert!(
                    eps >= last - 1e-12,
                    "2e not tau-monotone at tau={tau}, sigma={sigma}"
                );
                last = eps;
            }
        }
        for tau in [0.3, 1.0] {
            let mut last = 2.0;
            for i in 0..100 {
                let sigma = 20.0 * i as f64 / 99.0;
                let eps = epsilon_closed_2e(
                    &state,
                    &ModelParams2e::from_tau_sigma(tau, sigma, Interaction::Attractive).unwrap(),
                )
                .unwrap();
                assert!(
                    eps <= last + 1e-12,
                    "2e not sigma-monotone at sigma={sigma}"
                );
                last = eps;
            }
        }
    }

    // Confinement entropies strictly decreasing in the field.
    let mut last = (f64::INFINITY, f64::INFINITY);
    for i in 0..100 {
        let b = 10.0 * i as f64 / 99.0;
        let (s_l, s_vn) = single_particle_entropies(1.0, b).unwrap();
        assert!(
            s_l < last.0 && s_vn < last.1,
            "entropies not strictly decreasing at b={b}"
        );
        last = (s_l, s_vn);
    }
    report(
        "4 (monotonicity)",
        true,
        "tau up, sigma down, entropies strictly down in b",
    );
}

#[test]
fn criterion_5_perturbation_blocks() {
    let start = Instant::now();

    let first = enumerate_level_3e(Excitation::First);
    let block1 = build_block_3e(&first, 1.0).unwrap();
    let fit1 = fit_block(&block1.matrix, &reference::block_3e_first());
    assert!(
        fit1.scale > 0.0 && fit1.residual < 1e-9,
        "first block residual {:e}",
        fit1.residual
    );
    let eps1 = eigenstate_entanglements(&block1, &first, 3).unwrap();
    // Reference values are exact rationals; the computed floats may differ
    // by accumulated rounding only.
    for e in &eps1 {
        assert!(
            (*e - 8.0 / 27.0).abs() < 1e-12,
            "first-level entanglement {e}"
        );
    }

    let second = enumerate_level_3e(Excitation::Second);
    let block2 = build_block_3e(&second, 1.0).unwrap();
    let (_, fit2) = fit_block_permuted(&block2.matrix, &reference::block_3e_second());
    assert!(
        fit2.scale > 0.0 && fit2.residual < 1e-9,
        "second block residual {:e}",
        fit2.residual
    );
    let mut eps2 = eigenstate_entanglements(&block2, &second, 3).unwrap();
    eps2.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut want2 = vec![
        0.0,
        0.0,
        0.25,
        0.25,
        20.0 / 49.0,
        20.0 / 49.0,
        4.0 / 9.0,
        4.0 / 9.0,
        4.0 / 9.0,
        4.0 / 9.0,
    ];
    want2.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (got, want) in eps2.iter().zip(&want2) {
        assert!(
            (got - want).abs() < 1e-12,
            "second-level multiset {eps2:?} vs {want2:?}"
        );
    }

    let (omega, b) = (1.0, 0.6);
    let xy = perturb::level_2e_xy_excited();
    let block_xy = build_block_2e(&xy, omega, b).unwrap();
    let c1 = reference::c1_xy(omega, b);
    let c2 = block_xy.matrix[(1, 5)];
    let fit_xy = fit_block(&block_xy.matrix, &reference::block_2e_xy(c1, c2));
    assert!(
        fit_xy.residual < 1e-9,
        "planar block residual {:e}",
        fit_xy.residual
    );
    let mut eps_xy = eigenstate_entanglements(&block_xy, &xy, 2).unwrap();
    eps_xy.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let want_xy = [0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.75, 0.75];
    for (got, want) in eps_xy.iter().zip(want_xy) {
        assert!((got - want).abs() < 1e-12, "planar multiset {eps_xy:?}");
    }

    let z = perturb::level_2e_z_excited();
    let block_z = build_block_2e(&z, omega, b).unwrap();
    let fit_z = fit_block(
        &block_z.matrix,
        &reference::block_2e_z(reference::d1_z(omega, b), reference::d2_z(omega)),
    );
    assert!(
        fit_z.residual < 1e-9,
        "axial block residual {:e}",
        fit_z.residual
    );
    let mut eps_z = eigenstate_entanglements(&block_z, &z, 2).unwrap();
    eps_z.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let want_z = [0.0, 0.0, 0.5, 0.5];
    for (got, want) in eps_z.iter().zip(want_z) {
        assert!((got - want).abs() < 1e-12, "axial multiset {eps_z:?}");
    }

    let elapsed = start.elapsed().as_secs_f64();
    report(
        "5 (perturbation blocks)",
        elapsed < 10.0,
        &format!(
            "residuals {:.1e}, {:.1e}, {:.1e}, {:.1e}; multisets exact; {elapsed:.2} s",
            fit1.residual, fit2.residual, fit_xy.residual, fit_z.residual
        ),
    );
    assert!(elapsed < 10.0, "took {elapsed:.2} s, budget 10 s");
}

#[test]
fn criterion_6_mixture_curve() {
    // Exact endpoint.
    assert_eq!(epsilon_mixture(1.0).unwrap(), 20.0 / 49.0);
    assert_eq!(epsilon_mixture(0.0).unwrap(), 0.0);
    // Bisect eps(p) = 43/108 on [0, 1] (the curve is increasing).
    let target = 43.0 / 108.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if epsilon_mixture(mid).unwrap() < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    report(
        "6 (mixture curve)",
        (root - 0.992).abs() <= 1e-3,
        &format!("eps(1) = 20/49 exactly; eps(p) = 43/108 at p = {root:.6}"),
    );
    assert!((root - 0.992).abs() <= 1e-3, "root {root}");
}

#[test]
fn criterion_7_haar_distribution() {
    let start = Instant::now();
    let stats = entanglement_distribution(10_000_000, 20120717).unwrap();
    let f = stats.bin_fractions();
    let elapsed = start.elapsed().as_secs_f64();

    let bin_ok = (f[0] - 0.0475).abs() < 0.0015
        && (f[1] - 0.1825).abs() < 0.0015
        && (f[2] - 0.77).abs() < 0.0015;
    let mean_ok = (stats.mean - 0.26667).abs() < 0.001;
    let max_ok = (stats.max - 1.0 / 3.0).abs() < 1e-4 && stats.max <= 1.0 / 3.0 + 1e-12;
    let in_time = elapsed < 60.0;
    report(
        "7 (Haar entanglement distribution)",
        bin_ok && mean_ok && max_ok && in_time,
        &format!(
            "bins ({:.4}%, {:.4}%, {:.4}%), mean {:.6}, max {:.8}, {elapsed:.1} s",
            100.0 * f[0],
            100.0 * f[1],
            100.0 * f[2],
            stats.mean,
            stats.max
        ),
    );
    assert!(bin_ok, "bins {f:?}");
    assert!(mean_ok, "mean {}", stats.mean);
    assert!(max_ok, "max {}", stats.max);
    assert!(in_time, "took {elapsed:.1} s, budget 60 s");
}

#[test]
fn criterion_8_theta_invariance() {
    let params = ModelParams3e::from_tau(0.4, Interaction::Attractive).unwrap();
    let rule = oracle_rule_3e(&params, 32).unwrap();
    let mut worst: f64 = 0.0;
    for (n1, n2, n3) in [(0u32, 1u32, 1u32), (1, 1, 0)] {
        let state = label3(n1, n2, n3);
        let base = epsilon_theta_mixture_3e(&state, 0.0, &params, &rule).unwrap();
        for k in 0..16 {
            let theta = 2.0 * core::f64::consts::PI * k as f64 / 16.0;
            let eps = epsilon_theta_mixture_3e(&state, theta, &params, &rule).unwrap();
            worst = worst.max((eps - base).abs());
        }
    }
    report(
        "8 (theta invariance)",
        worst < 1e-8,
        &format!("largest drift over 16 angles x 2 states: {worst:.3e}"),
    );
    assert!(worst < 1e-8, "drift {worst:e}");
}

#[test]
fn criterion_9_strong_field_asymptotics() {
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for state in supported_2e() {
        for &(tau, sign) in &[
            (0.3, Interaction::Attractive),
            (1.0, Interaction::Attractive),
            (0.3, Interaction::Repulsive),
        ] {
            let params = ModelParams2e::from_tau_sigma(tau, 1e4, sign).unwrap();
            let closed = epsilon_closed_2e(&state, &params).unwrap();
            let asym = epsilon_asymptotic_2e(&state, tau, sign).unwrap();
            worst = worst.max((closed - asym).abs());
            checks += 1;
        }
    }
    report(
        "9 (strong-field asymptotics)",
        worst < 1e-3,
        &format!("{checks} comparisons at sigma = 1e4, worst |diff| = {worst:.3e}"),
    );
    assert!(worst < 1e-3, "worst {worst:e}");
}
