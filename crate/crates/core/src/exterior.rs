//! Continuation of profiles outside the light cone.
//!
//! In the similarity variable the profile solves
//! (1 - rho^2) U'' + (2/rho - 4 rho) U' - 2U + U^3 = 0, with regular
//! singular points at rho = 0 and rho = 1; orbits leave either point on a
//! local series and are then continued numerically with blowup detection.
//! Monitor functions certify the two monotonicity arguments that rule out
//! smooth continuation: h = -U'/U decreasing for inward orbits below
//! sqrt(2), and g = rho^4 U U' - rho^3 (U^2 - 2)/6 positive for outward
//! orbits above sqrt(2).

use crate::ode::{self, Options, Problem, Termination, Trajectory};
use crate::spectrum::SelfSimilarSolution;
use crate::Scalar;
use thiserror::Error;

/// State of the similarity-variable equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoState {
    pub rho: Scalar,
    pub u: Scalar,
    pub du: Scalar,
}

/// Which side of the light cone a cone-series start selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeSide {
    Inner,
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    RegularTo(Scalar),
    SingularAt(Scalar),
}

/// One monitor row along an orbit.
#[derive(Debug, Clone, Copy)]
pub struct MonitorSample {
    pub rho: Scalar,
    pub u: Scalar,
    pub du: Scalar,
    /// h = -U'/U.
    pub h: Scalar,
    /// g = rho^4 U U' - rho^3 (U^2 - 2)/6.
    pub g: Scalar,
    /// Numerator of h': (rho - rho^3) U'^2 + (2 - 4 rho^2) U U' - rho U^2 (2 - U^2).
    pub h_prime_numerator: Scalar,
}

#[derive(Debug, Clone)]
pub struct ExteriorReport {
    pub b: Scalar,
    pub outcome: Outcome,
    pub monitors: Vec<MonitorSample>,
    traj: Trajectory<Scalar>,
}

#[derive(Debug, Error)]
pub enum ExteriorError {
    #[error("series offset {delta} outside the valid range (0, {max}]")]
    SeriesDomain { delta: Scalar, max: Scalar },
    #[error("exterior continuation needs |b| > sqrt(2) and n >= 1, got b = {b}, n = {n}")]
    PreconditionViolation { b: Scalar, n: u32 },
    #[error("outward orbit stayed regular to rho = {rho_limit}; expected blowup")]
    UnexpectedRegularity { rho_limit: Scalar },
    #[error(transparent)]
    Ode(#[from] ode::OdeError<Scalar>),
}

/// Right-hand side of the similarity equation for y = (U, U').
pub(crate) fn rho_rhs(rho: Scalar, y: &[Scalar], dy: &mut [Scalar]) {
    dy[0] = y[1];
    dy[1] = ((4.0 * rho - 2.0 / rho) * y[1] + 2.0 * y[0] - y[0].powi(3)) / (1.0 - rho * rho);
}

/// U'' from the equation itself.
pub(crate) fn u_second(rho: Scalar, u: Scalar, du: Scalar) -> Scalar {
    ((4.0 * rho - 2.0 / rho) * du + 2.0 * u - u.powi(3)) / (1.0 - rho * rho)
}

/// Center series U = c + c(2-c^2)/6 rho^2 + c(2-c^2)(4-c^2)/40 rho^4 + ...
/// evaluated at rho = delta; the rho^6 coefficient follows from matching
/// one more order.
pub fn rho_series_center(c: Scalar, delta: Scalar) -> Result<RhoState, ExteriorError> {
    if !(delta > 0.0 && delta <= 0.05) {
        return Err(ExteriorError::SeriesDomain { delta, max: 0.05 });
    }
    let u2 = c * (2.0 - c * c) / 6.0;
    let u4 = c * (2.0 - c * c) * (4.0 - c * c) / 40.0;
    let u6 = (u4 * (10.0 - c * c) - c * u2 * u2) / 14.0;
    Ok(RhoState {
        rho: delta,
        u: c + u2 * delta * delta + u4 * delta.powi(4) + u6 * delta.powi(6),
        du: 2.0 * u2 * delta + 4.0 * u4 * delta.powi(3) + 6.0 * u6 * delta.powi(5),
    })
}

/// Cone series U = b + b(b^2-2)/2 (rho-1) + b(b^2-2)(3b^2-8)/16 (rho-1)^2
/// at rho = 1 +/- delta; the rho = 1 constraint -2U'(1) = 2b - b^3 is
/// exact in the leading coefficient.
pub fn rho_series_cone(b: Scalar, delta: Scalar, side: ConeSide) -> Result<RhoState, ExteriorError> {
    if !(delta > 0.0 && delta <= 1e-2) {
        return Err(ExteriorError::SeriesDomain { delta, max: 1e-2 });
    }
    let sigma = match side {
        ConeSide::Inner => -delta,
        ConeSide::Outer => delta,
    };
    let u1 = b * (b * b - 2.0) / 2.0;
    let u2 = u1 * (3.0 * b * b - 8.0) / 8.0;
    let u3 = (u2 * (3.0 * b * b - 16.0) + 2.0 * u1 + 3.0 * b * u1 * u1) / 18.0;
    Ok(RhoState {
        rho: 1.0 + sigma,
        u: b + sigma * (u1 + sigma * (u2 + sigma * u3)),
        du: u1 + sigma * (2.0 * u2 + sigma * 3.0 * u3),
    })
}

fn monitor(rho: Scalar, u: Scalar, du: Scalar) -> MonitorSample {
    MonitorSample {
        rho,
        u,
        du,
        h: -du / u,
        g: rho.powi(4) * u * du - rho.powi(3) / 6.0 * (u * u - 2.0),
        h_prime_numerator: (rho - rho.powi(3)) * du * du + (2.0 - 4.0 * rho * rho) * u * du
            - rho * u * u * (2.0 - u * u),
    }
}

/// Continue an orbit from `start` to `rho_limit` (either direction),
/// recording the monitor traces; blowup is reported as the singularity
/// location.
pub fn continue_orbit(
    start: RhoState,
    rho_limit: Scalar,
    tol: Scalar,
) -> Result<ExteriorReport, ExteriorError> {
    let rel = tol.min(1e-9).max(1e-13);
    let mut opts = Options::with_tols(rel, rel * 1e-2);
    opts.initial_step = Some(((start.rho - 1.0).abs().min(start.rho) * 0.1).max(1e-8));
    let p = Problem::new(&rho_rhs, start.rho, rho_limit, vec![start.u, start.du]);
    let traj = ode::integrate(&p, &opts, &[])?;
    let outcome = match traj.termination {
        Termination::ReachedEnd => Outcome::RegularTo(rho_limit),
        Termination::Blowup { location } => Outcome::SingularAt(location),
        Termination::Event { location, .. } => Outcome::SingularAt(location),
    };
    let monitors = traj
        .nodes
        .iter()
        .map(|(rho, y)| monitor(*rho, y[0], y[1]))
        .collect();
    Ok(ExteriorReport { b: start.u, outcome, monitors, traj })
}

impl ExteriorReport {
    pub fn state_at(&self, rho: Scalar) -> RhoState {
        let y = self.traj.eval(rho);
        RhoState { rho, u: y[0], du: y[1] }
    }

    /// Residual of the similarity equation along the dense output, using
    /// the analytic derivative of the interpolant for U''.
    pub fn equation_residual(&self, rho: Scalar) -> Scalar {
        let y = self.traj.eval(rho);
        let dy = self.traj.eval_deriv(rho);
        (1.0 - rho * rho) * dy[1] + (2.0 / rho - 4.0 * rho) * y[1] - 2.0 * y[0] + y[0].powi(3)
    }

    /// Dense integration record of the orbit.
    pub fn trajectory(&self) -> &Trajectory<Scalar> {
        &self.traj
    }
}

/// Singularity location of the continuation of a regular profile past the
/// light cone, with a refinement-based uncertainty.
#[derive(Debug, Clone, Copy)]
pub struct SingularityReport {
    pub n: u32,
    pub b: Scalar,
    pub rho_sing: Scalar,
    /// |change| under halving the series offset and tightening tolerances.
    pub uncertainty: Scalar,
}

pub fn exterior_singularity(sol: &SelfSimilarSolution) -> Result<SingularityReport, ExteriorError> {
    let b = sol.b.abs(); // U -> -U symmetry
    if sol.n == 0 || b <= (2.0 as Scalar).sqrt() {
        return Err(ExteriorError::PreconditionViolation { b: sol.b, n: sol.n });
    }
    let locate = |delta: Scalar, tol: Scalar| -> Result<Scalar, ExteriorError> {
        let start = rho_series_cone(b, delta, ConeSide::Outer)?;
        let report = continue_orbit(start, 1e6, tol)?;
        match report.outcome {
            Outcome::SingularAt(rho) => Ok(rho),
            Outcome::RegularTo(rho_limit) => Err(ExteriorError::UnexpectedRegularity { rho_limit }),
        }
    };
    let coarse = locate(1e-4, 1e-10)?;
    let fine = locate(5e-5, 1e-11)?;
    Ok(SingularityReport {
        n: sol.n,
        b: sol.b,
        rho_sing: fine,
        uncertainty: (coarse - fine).abs(),
    })
}

/// Discriminant-reduced boundary function
/// N(U, R) = (Delta + R^2)(1 - 2R^2 + sqrt(Delta)) + (1 - R^2) R^4 (U^2 - 2),
/// with Delta = 1 - R^2 (1 - R^2)(2 + U^2); non-negativity on
/// [0, sqrt(2)] x [0, 1] closes the inward-monotonicity argument.
pub fn discriminant_bound(u: Scalar, r: Scalar) -> Scalar {
    let r2 = r * r;
    let delta = 1.0 - r2 * (1.0 - r2) * (2.0 + u * u);
    (delta + r2) * (1.0 - 2.0 * r2 + delta.max(0.0).sqrt()) + (1.0 - r2) * r2 * r2 * (u * u - 2.0)
}

/// g' at a zero of g, for rho > 1 and U > sqrt(2):
/// rho^2 (U^2 - 2) ((17U - 9) rho^2 + U + 3) / (18 (rho^2 - 1)).
pub fn g_prime_at_zero(rho: Scalar, u: Scalar) -> Scalar {
    rho * rho * (u * u - 2.0) / (18.0 * (rho * rho - 1.0)) * ((17.0 * u - 9.0) * rho * rho + u + 3.0)
}

/// Grid certificate report; `*_margin` values are minima of quantities
/// that must be non-negative (or maxima of ones that must be
/// non-positive, sign-flipped so positive margins always mean "holds").
#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub grid: usize,
    /// min N over the closed rectangle [0, sqrt(2)] x [0, 1].
    pub rectangle_min: Scalar,
    pub rectangle_argmin: (Scalar, Scalar),
    /// min N over the four rectangle edges.
    pub boundary_min: Scalar,
    /// min of g'(g=0) over sampled (rho, U) with rho > 1, U > sqrt(2).
    pub g_prime_min: Scalar,
    /// min over outward orbits of lhs - rhs in the integrated inequality
    /// (U - sqrt2)/(U + sqrt2) >= ((b - sqrt2)/(b + sqrt2)) rho^(1/(3 sqrt 2)).
    pub integrated_inequality_min: Scalar,
    /// min of U-increments along outward orbits (monotonicity).
    pub outward_increment_min: Scalar,
    /// min of g along outward orbits.
    pub outward_g_min: Scalar,
    /// max of the h' numerator along inward orbits (must be <= 0).
    pub inward_numerator_max: Scalar,
}

impl CertificateReport {
    pub fn holds(&self, slack: Scalar) -> bool {
        self.rectangle_min >= -slack
            && self.boundary_min >= -slack
            && self.g_prime_min > 0.0
            && self.integrated_inequality_min >= -slack
            && self.outward_increment_min >= -slack
            && self.outward_g_min > 0.0
            && self.inward_numerator_max <= slack
    }
}

/// Evaluate every grid certificate at the given resolution.
pub fn certify_inequalities(grid: usize) -> Result<CertificateReport, ExteriorError> {
    let sqrt2 = (2.0 as Scalar).sqrt();
    let mut rect_min = Scalar::INFINITY;
    let mut argmin = (0.0, 0.0);
    for i in 0..=grid {
        let u = sqrt2 * i as Scalar / grid as Scalar;
        for j in 0..=grid {
            let r = j as Scalar / grid as Scalar;
            let v = discriminant_bound(u, r);
            if v < rect_min {
                rect_min = v;
                argmin = (u, r);
            }
        }
    }
    let mut boundary_min = Scalar::INFINITY;
    for i in 0..=grid {
        let t = i as Scalar / grid as Scalar;
        for v in [
            discriminant_bound(0.0, t),
            discriminant_bound(sqrt2, t),
            discriminant_bound(sqrt2 * t, 0.0),
            discriminant_bound(sqrt2 * t, 1.0),
        ] {
            boundary_min = boundary_min.min(v);
        }
    }

    let mut g_prime_min = Scalar::INFINITY;
    for i in 1..=60 {
        let rho = 1.0 + 9.0 * i as Scalar / 60.0;
        for j in 1..=60 {
            let u = sqrt2 + (20.0 - sqrt2) * j as Scalar / 60.0;
            g_prime_min = g_prime_min.min(g_prime_at_zero(rho, u));
        }
    }

    let mut ineq_min = Scalar::INFINITY;
    let mut incr_min = Scalar::INFINITY;
    let mut g_min = Scalar::INFINITY;
    for &b in &[1.5, 2.0, 3.0, 5.0] {
        let start = rho_series_cone(b, 1e-4, ConeSide::Outer)?;
        let report = continue_orbit(start, 1e6, 1e-10)?;
        let exponent = 1.0 / (3.0 * sqrt2);
        let base = (b - sqrt2) / (b + sqrt2);
        let mut prev_u = start.u;
        for m in &report.monitors {
            let lhs = (m.u - sqrt2) / (m.u + sqrt2);
            ineq_min = ineq_min.min(lhs - base * m.rho.powf(exponent));
            incr_min = incr_min.min(m.u - prev_u);
            prev_u = m.u;
            g_min = g_min.min(m.g);
        }
    }

    let mut num_max = Scalar::NEG_INFINITY;
    for &b in &[0.5, 1.0, 1.3] {
        let start = rho_series_cone(b, 1e-4, ConeSide::Inner)?;
        let report = continue_orbit(start, 1e-6, 1e-10)?;
        for m in &report.monitors {
            if m.rho < 1.0 {
                num_max = num_max.max(m.h_prime_numerator);
            }
        }
    }

    Ok(CertificateReport {
        grid,
        rectangle_min: rect_min,
        rectangle_argmin: argmin,
        boundary_min,
        g_prime_min,
        integrated_inequality_min: ineq_min,
        outward_increment_min: incr_min,
        outward_g_min: g_min,
        inward_numerator_max: num_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn center_series_constant_solution() {
        let st = rho_series_center(2f64.sqrt(), 0.01).unwrap();
        assert_abs_diff_eq!(st.u, 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(st.du, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn center_series_leading_coefficient() {
        let st = rho_series_center(1.0, 0.01).unwrap();
        assert_abs_diff_eq!(st.u, 1.0 + 1e-4 / 6.0, epsilon = 1e-9);
    }

    #[test]
    fn center_series_matches_integration() {
        // Coefficient oracle: start at delta/10 and integrate up to delta;
        // the states must agree to the size of the first omitted term.
        for &c in &[1.0, 3.0, 9.616283] {
            let delta = 0.015;
            let inner = rho_series_center(c, delta / 10.0).unwrap();
            let p = Problem::new(&rho_rhs, delta / 10.0, delta, vec![inner.u, inner.du]);
            let traj = ode::integrate(&p, &Options::with_tols(1e-13, 1e-15), &[]).unwrap();
            let (_, y) = traj.last_state();
            let direct = rho_series_center(c, delta).unwrap();
            assert_abs_diff_eq!(y[0], direct.u, epsilon = 1e-9 * c.max(1.0));
            assert_abs_diff_eq!(y[1], direct.du, epsilon = 1e-7 * c.max(1.0));
        }
    }

    #[test]
    fn cone_series_constant_and_leading() {
        let st = rho_series_cone(2f64.sqrt(), 1e-3, ConeSide::Outer).unwrap();
        assert_abs_diff_eq!(st.u, 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(st.du, 0.0, epsilon = 1e-15);
        let st = rho_series_cone(2.0, 1e-3, ConeSide::Outer).unwrap();
        assert_abs_diff_eq!(st.u, 2.0 + 2e-3 + 1e-6, epsilon = 2e-9);
    }

    #[test]
    fn cone_constraint_exact() {
        // At rho = 1 the equation degenerates to -2U' - 2U + U^3 = 0.
        for &b in &[0.7f64, 1.5, 2.0, 3.3] {
            let u1 = b * (b * b - 2.0) / 2.0;
            assert_abs_diff_eq!(-2.0 * u1 - 2.0 * b + b.powi(3), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn cone_series_matches_integration() {
        for &b in &[0.8, 2.0, 3.578348] {
            for side in [ConeSide::Inner, ConeSide::Outer] {
                let delta = 1e-3;
                let inner = rho_series_cone(b, delta / 10.0, side).unwrap();
                let direct = rho_series_cone(b, delta, side).unwrap();
                let p = Problem::new(&rho_rhs, inner.rho, direct.rho, vec![inner.u, inner.du]);
                let traj = ode::integrate(&p, &Options::with_tols(1e-13, 1e-15), &[]).unwrap();
                let (_, y) = traj.last_state();
                // The omitted sigma^4 (resp. sigma^3 in U') term bounds the
                // defect.
                assert_abs_diff_eq!(y[0], direct.u, epsilon = 1e-7 * b.max(1.0));
                assert_abs_diff_eq!(y[1], direct.du, epsilon = 3e-5 * b.max(1.0));
            }
        }
    }

    #[test]
    fn constant_orbit_stays_constant() {
        let start = rho_series_cone(2f64.sqrt(), 1e-4, ConeSide::Outer).unwrap();
        let report = continue_orbit(start, 100.0, 1e-10).unwrap();
        assert_eq!(report.outcome, Outcome::RegularTo(100.0));
        for m in &report.monitors {
            assert_abs_diff_eq!(m.u, 2f64.sqrt(), epsilon = 1e-8);
        }
    }

    #[test]
    fn outward_orbit_above_sqrt2_blows_up() {
        let start = rho_series_cone(2.0, 1e-4, ConeSide::Outer).unwrap();
        let report = continue_orbit(start, 1e6, 1e-10).unwrap();
        let Outcome::SingularAt(rho) = report.outcome else {
            panic!("expected singularity, got {:?}", report.outcome)
        };
        assert!(rho > 1.0 && rho.is_finite());
        // g(1) = (b^2-2)(3b^2-1)/6 = 11/3 by substituting the cone series
        // into the definition of g; g stays positive and U increases.
        assert_relative_eq!(report.monitors[0].g, 11.0 / 3.0, max_relative = 1e-3);
        let mut prev = 0.0;
        for m in &report.monitors {
            assert!(m.g > 0.0);
            assert!(m.u > prev);
            prev = m.u;
        }
    }

    #[test]
    fn inward_orbit_below_sqrt2_h_monitor() {
        let start = rho_series_cone(1.0, 1e-4, ConeSide::Inner).unwrap();
        let report = continue_orbit(start, 1e-6, 1e-10).unwrap();
        // h(1) = (2 - b^2)/2 = 1/2.
        assert_relative_eq!(report.monitors[0].h, 0.5, max_relative = 1e-3);
        for m in &report.monitors {
            if m.rho < 1.0 - 1e-3 {
                assert!(
                    m.h_prime_numerator <= 1e-9,
                    "numerator {} at rho {}",
                    m.h_prime_numerator,
                    m.rho
                );
            }
        }
    }

    #[test]
    fn first_solution_singular_outside() {
        let report = exterior_singularity(spectrum::solution(1)).unwrap();
        assert!(report.rho_sing > 1.0);
        assert!(report.uncertainty < 1e-3 * report.rho_sing);
    }

    #[test]
    fn ground_state_not_applicable() {
        assert!(matches!(
            exterior_singularity(spectrum::solution(0)),
            Err(ExteriorError::PreconditionViolation { .. })
        ));
    }

    #[test]
    fn interior_bridge_identity() {
        // U(tanh x) = f(x) coth(x): continue the center series to rho = 0.9
        // and compare against the interior record.
        let sol = spectrum::solution(1);
        let start = rho_series_center(sol.c, 0.01).unwrap();
        let p = Problem::new(&rho_rhs, start.rho, 0.9, vec![start.u, start.du]);
        let traj = ode::integrate(&p, &Options::with_tols(1e-12, 1e-14), &[]).unwrap();
        for &rho in &[0.3f64, 0.6, 0.9] {
            let x = rho.atanh();
            let u_interior = sol.orbit.f_at(x) / rho;
            assert_relative_eq!(traj.eval(rho)[0], u_interior, max_relative = 1e-7);
        }
        // U(rho -> 1) -> b_n.
        let x_far = 9.0f64;
        assert_abs_diff_eq!(
            sol.orbit.f_at(x_far) / x_far.tanh() - sol.b,
            0.0,
            epsilon = 1e-6
        );
    }

    #[test]
    fn rectangle_certificate_edges() {
        // N on the U = 0 edge and the exact corner value N(sqrt2, 1) = 0.
        for i in 0..=100 {
            let r = i as f64 / 100.0;
            assert!(discriminant_bound(0.0, r) >= 0.0);
        }
        assert_abs_diff_eq!(discriminant_bound(2f64.sqrt(), 1.0), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn certificates_hold_on_coarse_grid() {
        let report = certify_inequalities(200).unwrap();
        assert!(report.holds(1e-12), "{report:?}");
        assert!(report.rectangle_min >= -1e-12);
    }
}
