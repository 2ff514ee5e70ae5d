//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `--nocapture`). Tolerances are pinned in the
//! assertions.

use std::f64::consts::PI;
use std::time::Instant;

use sswave_core::{asymptotics, exterior, interior, polar, spectrum, stability};

fn verdict(criterion: &str, ok: bool, detail: &str) {
    println!("[{}] {criterion} — {detail}", if ok { "PASS" } else { "FAIL" });
}

/// Reference values: n, c_n, b_n, E_n and the closed-form prediction
/// columns c_n, b_n.
const TABLE: [(f64, f64, f64, f64, f64); 7] = [
    (std::f64::consts::SQRT_2, std::f64::consts::SQRT_2, 1.0 / 3.0, 1.630626, 1.467029),
    (9.616283, -3.578348, 4.62810, 9.991135, -3.631358),
    (30.13927, 6.315947, 21.5429, 30.681145, 6.363520),
    (68.58242, -9.519976, 64.8053, 69.292246, -9.563216),
    (130.5379, 13.13018, 153.071, 131.41603, 13.170001),
    (221.5967, -17.10516, 309.116, 222.64408, -17.142226),
    (347.3277, 21.41418, 556.682, 348.56798, 21.448919),
];

#[test]
fn criterion_01_table_regression() {
    let t0 = Instant::now();
    let rows = spectrum::table(6).expect("table n = 0..6");
    let elapsed = t0.elapsed();
    let mut worst = (0.0f64, String::new());
    let mut ok = true;
    for (n, row) in rows.iter().enumerate() {
        let (cq, bq, eq, _, _) = TABLE[n];
        let s = &row.solution;
        for (label, got, want) in
            [("c", s.c, cq), ("b", s.b, bq), ("E", s.energy, eq)]
        {
            let dev = (got / want - 1.0).abs();
            if dev > worst.0 {
                worst = (dev, format!("{label}_{n}: computed {got:.9} vs quoted {want}"));
            }
            if dev > 1e-4 {
                ok = false;
            }
        }
    }
    let in_time = elapsed.as_secs_f64() < 60.0;
    verdict(
        "criterion 1: table regression (c_n, b_n, E_n to 1e-4, < 60 s)",
        ok && in_time,
        &format!("worst deviation {:.2e} at {}; runtime {elapsed:?}", worst.0, worst.1),
    );
    assert!(in_time, "runtime {elapsed:?} exceeds 60 s");
    // Known discrepancy: the quoted energies for n >= 3 are less accurate
    // than this gate; two independent energy routes (direct quadrature and
    // E = 1/4 int f'^2) agree with each other and are stable under
    // tolerance refinement, while the quoted values drift away. The
    // criterion is asserted as stated and records the disagreement.
    assert!(ok, "worst deviation {:.2e} at {}", worst.0, worst.1);
}

#[test]
fn criterion_02_exact_anchors() {
    let s = spectrum::find_c_n(0, 1e-12).expect("ground state");
    let dc = (s.c - 2f64.sqrt()).abs();
    let db = (s.b - 2f64.sqrt()).abs();
    let de = (s.energy - 1.0 / 3.0).abs();
    let ok = dc < 1e-9 && db < 1e-9 && de < 1e-9;
    verdict(
        "criterion 2: exact anchors c0 = b0 = sqrt(2), E0 = 1/3 to 1e-9",
        ok,
        &format!("|dc| = {dc:.2e}, |db| = {db:.2e}, |dE| = {de:.2e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_03_asymptotic_constants() {
    let k = asymptotics::constants();
    let checks = [
        ("T", (k.t_len - 4.20654632).abs(), 1e-7),
        ("tau", (k.tau - 7.41629871).abs(), 1e-7),
        ("T routes", k.t_route_discrepancy(), 1e-9),
        ("tau routes", k.tau_route_discrepancy(), 1e-9),
        ("A0", (k.a0 - 0.90247851).abs(), 1e-6),
        ("A1", (k.a1 - 0.82273965).abs(), 1e-6),
        ("theta0", (k.theta0 + 1.6225533).abs(), 1e-5),
        ("theta1", (k.theta1 - 0.8623512).abs(), 1e-5),
    ];
    let ok = checks.iter().all(|&(_, err, tol)| err < tol);
    let detail: Vec<String> =
        checks.iter().map(|(l, e, _)| format!("{l} {e:.1e}")).collect();
    verdict("criterion 3: asymptotic constants", ok, &detail.join(", "));
    for (label, err, tol) in checks {
        assert!(err < tol, "{label}: error {err:.2e} exceeds {tol:.0e}");
    }
}

#[test]
fn criterion_04_prediction_formulas() {
    let k = asymptotics::constants();
    let mut worst = 0.0f64;
    for (n, &(_, _, _, cth, bth)) in TABLE.iter().enumerate() {
        let (c, b) = asymptotics::predict(n as u32, k);
        worst = worst.max((c / cth - 1.0).abs()).max((b / bth - 1.0).abs());
    }
    let (half_tau, minus_sum, a0t) = k.prediction_literals();
    let lit = [
        (half_tau / 3.70814935 - 1.0).abs(),
        (minus_sum / 0.7602022 - 1.0).abs(),
        (a0t / 3.7963177 - 1.0).abs(),
        (k.amplitude_ratio_cubed() / 1.3198462 - 1.0).abs(),
    ];
    let lit_worst = lit.iter().cloned().fold(0.0, f64::max);
    let ok = worst < 1e-5 && lit_worst < 1e-6;
    verdict(
        "criterion 4: prediction formulas (theory columns 1e-5, literals 1e-6)",
        ok,
        &format!("worst column deviation {worst:.2e}, worst literal deviation {lit_worst:.2e}"),
    );
    assert!(ok, "columns {worst:.2e}, literals {lit_worst:.2e}");
}

#[test]
fn criterion_05_small_c_phase_law() {
    let orbit = interior::evolve_c_orbit(1e-2, 1e-12).expect("small-c orbit");
    let law = PI.powi(4) / 30.0;
    let dev = (orbit.total_phase / 1e-4 / law - 1.0).abs();
    let ok = dev < 1e-3;
    verdict(
        "criterion 5: small-c phase law Phi(c)/c^2 -> pi^4/30 (0.1%)",
        ok,
        &format!("relative deviation {dev:.2e}"),
    );
    assert!(ok, "deviation {dev:.2e}");
}

#[test]
fn criterion_06_linearization_spectra() {
    let mut ok = true;
    let mut details = Vec::new();
    for n in 0..=4u32 {
        let sol = spectrum::solution(n);
        let pot = stability::build_potential(sol);
        let report = stability::eigenvalues(&pot, 1.5 * pot.min_value(), 1e-10)
            .expect("eigenvalue report");
        let count_ok = report.negative_count == (n as usize) + 1;
        let gauge_eig = report
            .eigenvalues
            .iter()
            .map(|l| (l + 1.0).abs())
            .fold(f64::INFINITY, f64::min);
        let has_minus_one = gauge_eig < 1e-6;
        let gauge_ok = report.gauge_residual < 1e-5;
        let agree_ok = report.method_agreement < 1e-5;
        let window_ok = report.gap_window_count == 0;
        let pt_ok = n != 0 || report.negative_count == 1;
        ok &= count_ok && has_minus_one && gauge_ok && agree_ok && window_ok && pt_ok;
        details.push(format!(
            "n={n}: count {} (want {}), |eig+1| {:.1e}, gauge {:.1e}, agree {:.1e}, window {}",
            report.negative_count,
            n + 1,
            gauge_eig,
            report.gauge_residual,
            report.method_agreement,
            report.gap_window_count
        ));
    }
    verdict("criterion 6: linearization spectra n = 0..4", ok, &details.join("; "));
    assert!(ok, "{}", details.join("\n"));
}

#[test]
fn criterion_07_exterior_singularities() {
    let mut ok = true;
    let mut details = Vec::new();
    for n in 1..=4u32 {
        let report = exterior::exterior_singularity(spectrum::solution(n))
            .expect("exterior singularity");
        let drift = report.uncertainty / report.rho_sing;
        let this_ok = report.rho_sing > 1.0 && report.rho_sing.is_finite() && drift < 1e-3;
        ok &= this_ok;
        details.push(format!("n={n}: rho = {:.6} (drift {:.1e})", report.rho_sing, drift));
    }
    // The constant orbit stays at sqrt(2) out to rho = 100.
    let start = exterior::rho_series_cone(2f64.sqrt(), 1e-4, exterior::ConeSide::Outer).unwrap();
    let report = exterior::continue_orbit(start, 100.0, 1e-10).expect("constant orbit");
    let const_dev = report
        .monitors
        .iter()
        .map(|m| (m.u - 2f64.sqrt()).abs())
        .fold(0.0, f64::max);
    ok &= const_dev < 1e-8;
    details.push(format!("constant-orbit deviation {const_dev:.1e}"));
    verdict("criterion 7: exterior singularities and constant orbit", ok, &details.join("; "));
    assert!(ok, "{}", details.join("\n"));
}

#[test]
fn criterion_08_inequality_certificates() {
    let report = exterior::certify_inequalities(1000).expect("certificates");
    let ok = report.rectangle_min >= -1e-12
        && report.boundary_min >= -1e-12
        && report.g_prime_min > 0.0
        && report.outward_increment_min >= 0.0
        && report.outward_g_min > 0.0
        && report.inward_numerator_max <= 1e-9
        && report.integrated_inequality_min >= -1e-12;
    verdict(
        "criterion 8: inequality certificates (1000x1000 grid and orbit monitors)",
        ok,
        &format!(
            "N min {:.2e} at {:?}, g' min {:.2e}, ineq min {:.2e}, dU min {:.2e}, g min {:.2e}, numerator max {:.2e}",
            report.rectangle_min,
            report.rectangle_argmin,
            report.g_prime_min,
            report.integrated_inequality_min,
            report.outward_increment_min,
            report.outward_g_min,
            report.inward_numerator_max
        ),
    );
    assert!(ok, "{report:?}");
}

#[test]
fn criterion_09_route_agreement() {
    let cases = [
        (0u32, polar::Branch::Even),
        (0, polar::Branch::Odd),
        (1, polar::Branch::Even),
        (1, polar::Branch::Odd),
        (2, polar::Branch::Even),
    ];
    let mut ok = true;
    let mut details = Vec::new();
    for (k, branch) in cases {
        let hit = polar::find_intersection(k, branch).expect("intersection");
        let reference = spectrum::solution(hit.n);
        let dev = (hit.c / reference.c - 1.0).abs();
        let res = polar::glued_equation_residual(hit.c, hit.b).expect("residual");
        let this_ok = dev < 1e-3 && res < 1e-6;
        ok &= this_ok;
        details.push(format!("n={}: route deviation {dev:.1e}, residual {res:.1e}", hit.n));
    }
    verdict("criterion 9: intersection route agrees with phase route", ok, &details.join("; "));
    assert!(ok, "{}", details.join("\n"));
}

#[test]
fn criterion_10_property_suite() {
    // 50 deterministic parameters from the golden-ratio sequence on
    // [0.1, 50].
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut lyap_worst = 0.0f64;
    let mut phase_worst = 0.0f64;
    for i in 0..50 {
        let frac = (i as f64 * phi).fract();
        let c = 0.1 + (50.0 - 0.1) * frac;
        let orbit = interior::evolve_c_orbit(c, 1e-11).expect("orbit");
        lyap_worst = lyap_worst.max(orbit.lyapunov_violation());
        phase_worst = phase_worst.max(orbit.phase_violation());
    }
    let monotone_ok = lyap_worst <= 1e-10 && phase_worst <= 1e-10;

    let energies: Vec<f64> = (0..=6).map(|n| spectrum::solution(n).energy).collect();
    let energy_ok = energies.windows(2).all(|w| w[0] < w[1]);
    let ok = monotone_ok && energy_ok;
    verdict(
        "criterion 10: Lyapunov/phase monotonicity and energy ordering",
        ok,
        &format!(
            "max Lyapunov increase {lyap_worst:.1e}, max phase decrease {phase_worst:.1e}, energies strictly increasing: {energy_ok}"
        ),
    );
    assert!(ok);
}
