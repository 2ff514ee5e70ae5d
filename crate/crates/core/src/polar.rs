//! Topological shooting in polar coordinates.
//!
//! Orbits of the similarity equation are followed from the center (rho = 0)
//! and from the light cone (rho = 1) to the midpoint rho_0 = sqrt(2/3),
//! tracking the polar angle of (U, U') by integrating its exact derivative
//! theta' = (U'' U - U'^2)/(U^2 + U'^2), so the unwrapping is continuous by
//! construction. Where the two one-parameter curves meet in the
//! (angle, radius) chart, a center orbit and a cone orbit glue into a
//! solution on the whole interval; the crossing is sharpened as a
//! two-variable root problem on the (U, U') match. This reproduces the
//! spectrum of regular solutions through an entirely different route than
//! the interior phase condition.

use crate::exterior::{self, rho_series_center, rho_series_cone, ConeSide};
use crate::ode::{self, Options, Problem, Trajectory};
use crate::rootfind::{self, newton2d};
use crate::Scalar;
use std::f64::consts::PI;
use thiserror::Error;

/// Gluing point rho_0 = sqrt(2/3).
pub fn rho_match() -> Scalar {
    (2.0f64 / 3.0).sqrt()
}

// Series offsets scale with the local oscillation length so the truncated
// series stays inside its convergence region for large parameters.
fn center_delta(c: Scalar) -> Scalar {
    (0.2 / c.abs().max(1.0)).min(0.01)
}

fn cone_delta(b: Scalar) -> Scalar {
    (0.1 / (b * b).max(1.0)).min(1e-4)
}

/// Polar image of one orbit at rho_0.
#[derive(Debug, Clone, Copy)]
pub struct PolarPoint {
    /// Continuously unwrapped angle of (U, U').
    pub angle: Scalar,
    pub radius: Scalar,
    /// The shooting parameter (c for center orbits, b for cone orbits).
    pub parameter: Scalar,
    pub u: Scalar,
    pub du: Scalar,
}

/// A curve sample for dumps and intersection scans.
#[derive(Debug, Clone, Copy)]
pub struct CurveSample {
    pub parameter: Scalar,
    pub angle: Scalar,
    pub radius: Scalar,
    pub u: Scalar,
    pub du: Scalar,
}

/// Which nodal branch the cone curve belongs to: even glues b > 0, odd
/// glues b < 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Even,
    Odd,
}

/// A glued solution found by curve intersection.
#[derive(Debug, Clone)]
pub struct NodalIntersection {
    pub k: u32,
    pub branch: Branch,
    /// Verified interior zero count of the glued profile.
    pub n: u32,
    pub c: Scalar,
    pub b: Scalar,
    /// Scaled sup of the (U, U') mismatch at rho_0 after refinement.
    pub residual: Scalar,
}

#[derive(Debug, Error)]
pub enum PolarError {
    #[error("no curve crossing found for k = {k} ({branch:?}); {} center and {} cone samples", center.len(), cone.len())]
    ScanFailure { k: u32, branch: Branch, center: Vec<CurveSample>, cone: Vec<CurveSample> },
    #[error("glued solution has {found} zeros, expected {expected}")]
    WrongNodalClass { expected: u32, found: u32 },
    #[error(transparent)]
    Ode(#[from] ode::OdeError<Scalar>),
    #[error(transparent)]
    Exterior(#[from] exterior::ExteriorError),
    #[error(transparent)]
    Root(#[from] rootfind::RootError),
}

/// rhs for (U, U', theta).
fn polar_rhs(rho: Scalar, y: &[Scalar], dy: &mut [Scalar]) {
    let upp = exterior::u_second(rho, y[0], y[1]);
    dy[0] = y[1];
    dy[1] = upp;
    dy[2] = (upp * y[0] - y[1] * y[1]) / (y[0] * y[0] + y[1] * y[1]);
}

fn integrate_to_match(
    rho0: Scalar,
    u: Scalar,
    du: Scalar,
    theta0: Scalar,
) -> Result<Trajectory<Scalar>, PolarError> {
    let mut opts = Options::with_tols(1e-11, 1e-12);
    opts.initial_step = Some(((rho0 - 1.0).abs().min(rho0) * 0.1).max(1e-7));
    let p = Problem::new(&polar_rhs, rho0, rho_match(), vec![u, du, theta0]);
    Ok(ode::integrate(&p, &opts, &[])?)
}

/// Center orbit c -> (theta, r) at rho_0, with theta(0, c) = 0.
pub fn center_map(c: Scalar) -> Result<PolarPoint, PolarError> {
    let start = rho_series_center(c, center_delta(c))?;
    let theta0 = (start.du / start.u).atan();
    let traj = integrate_to_match(start.rho, start.u, start.du, theta0)?;
    let (_, y) = traj.last_state();
    Ok(PolarPoint {
        angle: y[2],
        radius: (y[0] * y[0] + y[1] * y[1]).sqrt(),
        parameter: c,
        u: y[0],
        du: y[1],
    })
}

/// Cone orbit b -> (beta, R) at rho_0, with beta(1, sqrt(2)) = 0 on the
/// b > 0 branch and beta(1, b) in (pi/2, 3 pi/2) on the b < 0 branch.
pub fn cone_map(b: Scalar) -> Result<PolarPoint, PolarError> {
    let start = rho_series_cone(b, cone_delta(b), ConeSide::Inner)?;
    let mut theta0 = start.du.atan2(start.u);
    if b < 0.0 && theta0 < 0.0 {
        theta0 += 2.0 * PI;
    }
    let traj = integrate_to_match(start.rho, start.u, start.du, theta0)?;
    let (_, y) = traj.last_state();
    Ok(PolarPoint {
        angle: y[2],
        radius: (y[0] * y[0] + y[1] * y[1]).sqrt(),
        parameter: b,
        u: y[0],
        du: y[1],
    })
}

fn sample(is_center: bool, p: Scalar) -> Result<CurveSample, PolarError> {
    let pt = if is_center { center_map(p)? } else { cone_map(p)? };
    Ok(CurveSample {
        parameter: pt.parameter,
        angle: pt.angle,
        radius: pt.radius,
        u: pt.u,
        du: pt.du,
    })
}

/// Adaptive curve trace over the actual parameter interval: refinement
/// keeps angle increments below 0.1 rad (and radius steps moderate) so no
/// crossing is stepped over.
fn trace(is_center: bool, p_lo: Scalar, p_hi: Scalar) -> Result<Vec<CurveSample>, PolarError> {
    fn refine(
        is_center: bool,
        a: CurveSample,
        b: CurveSample,
        depth: u32,
        out: &mut Vec<CurveSample>,
    ) -> Result<(), PolarError> {
        let coarse = (b.angle - a.angle).abs() > 0.1
            || (b.radius - a.radius).abs() > 0.1 * (1.0 + a.radius.min(b.radius));
        if coarse && depth < 22 {
            let mid = sample(is_center, 0.5 * (a.parameter + b.parameter))?;
            refine(is_center, a, mid, depth + 1, out)?;
            refine(is_center, mid, b, depth + 1, out)?;
        } else {
            out.push(a);
        }
        Ok(())
    }
    let mut out: Vec<CurveSample> = Vec::new();
    let first = sample(is_center, p_lo)?;
    let last = sample(is_center, p_hi)?;
    refine(is_center, first, last, 0, &mut out)?;
    out.push(last);
    Ok(out)
}

/// Both traced curves for one nodal class; the cone angles already carry
/// the -2 k pi offset.
pub fn curves(k: u32, branch: Branch) -> Result<(Vec<CurveSample>, Vec<CurveSample>), PolarError> {
    let n = match branch {
        Branch::Even => 2 * k,
        Branch::Odd => 2 * k + 1,
    };
    let (c_pred, b_pred) = crate::asymptotics::predict(n, crate::asymptotics::constants());
    let center = trace(true, 0.3, 1.6 * c_pred + 2.0)?;
    let b_hi = 1.6 * b_pred.abs() + 2.0;
    let mut cone = match branch {
        Branch::Even => trace(false, 0.3, b_hi)?,
        Branch::Odd => trace(false, -b_hi, -0.3)?,
    };
    // The b < 0 normalization beta(1, b) in (pi/2, 3 pi/2) sits one turn
    // above the center chart, so the odd branch carries one extra offset.
    let turns = match branch {
        Branch::Even => k,
        Branch::Odd => k + 1,
    };
    for s in &mut cone {
        s.angle -= 2.0 * PI * turns as Scalar;
    }
    Ok((center, cone))
}

/// Proper intersection of segments a0-a1 and b0-b1 in the (angle, radius)
/// plane; returns the parameters (t, s) of the crossing.
fn segment_cross(
    a0: (Scalar, Scalar),
    a1: (Scalar, Scalar),
    b0: (Scalar, Scalar),
    b1: (Scalar, Scalar),
) -> Option<(Scalar, Scalar)> {
    let d1 = (a1.0 - a0.0, a1.1 - a0.1);
    let d2 = (b1.0 - b0.0, b1.1 - b0.1);
    let den = d1.0 * d2.1 - d1.1 * d2.0;
    if den == 0.0 {
        return None;
    }
    let r = (b0.0 - a0.0, b0.1 - a0.1);
    let t = (r.0 * d2.1 - r.1 * d2.0) / den;
    let s = (r.0 * d1.1 - r.1 * d1.0) / den;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&s) {
        Some((t, s))
    } else {
        None
    }
}

/// Zero count of the glued profile on (0, 1).
fn glued_zero_count(c: Scalar, b: Scalar) -> Result<u32, PolarError> {
    let start = rho_series_center(c, center_delta(c))?;
    let p = Problem::new(&exterior::rho_rhs, start.rho, rho_match(), vec![start.u, start.du]);
    let center = ode::integrate(&p, &Options::with_tols(1e-11, 1e-12), &[])?;
    let start = rho_series_cone(b, cone_delta(b), ConeSide::Inner)?;
    let p = Problem::new(&exterior::rho_rhs, start.rho, rho_match(), vec![start.u, start.du]);
    let cone = ode::integrate(&p, &Options::with_tols(1e-11, 1e-12), &[])?;

    let mut count = 0u32;
    let mut prev = c;
    let mut push = |u: Scalar| {
        if prev * u < 0.0 {
            count += 1;
        }
        if u != 0.0 {
            prev = u;
        }
    };
    for w in center.nodes.windows(2) {
        for j in 0..4 {
            let rho = w[0].0 + (w[1].0 - w[0].0) * j as Scalar / 4.0;
            push(center.eval(rho)[0]);
        }
    }
    for w in cone.nodes.windows(2).rev() {
        for j in (0..4).rev() {
            let rho = w[0].0 + (w[1].0 - w[0].0) * j as Scalar / 4.0;
            push(cone.eval(rho)[0]);
        }
    }
    Ok(count)
}

/// Locate the glued solution in nodal class n = 2k (even branch) or
/// n = 2k + 1 (odd branch, b < 0).
pub fn find_intersection(k: u32, branch: Branch) -> Result<NodalIntersection, PolarError> {
    let (center, cone) = curves(k, branch)?;
    let expected_n = match branch {
        Branch::Even => 2 * k,
        Branch::Odd => 2 * k + 1,
    };

    let mut seed: Option<(Scalar, Scalar)> = None;
    'outer: for wa in center.windows(2) {
        for wb in cone.windows(2) {
            if let Some((t, s)) = segment_cross(
                (wa[0].angle, wa[0].radius),
                (wa[1].angle, wa[1].radius),
                (wb[0].angle, wb[0].radius),
                (wb[1].angle, wb[1].radius),
            ) {
                let c = wa[0].parameter + t * (wa[1].parameter - wa[0].parameter);
                let b = wb[0].parameter + s * (wb[1].parameter - wb[0].parameter);
                seed = Some((c, b));
                break 'outer;
            }
        }
    }
    let Some((c0, b0)) = seed else {
        return Err(PolarError::ScanFailure { k, branch, center, cone });
    };

    // Sharpen as a root problem on the (U, U') match at rho_0; this is
    // stronger than matching in the chart and has no degeneracy at small
    // radius.
    let sign = if branch == Branch::Odd { -1.0 } else { 1.0 };
    let f = |p: [Scalar; 2]| -> [Scalar; 2] {
        let a = center_map(p[0]).expect("center orbit");
        let d = cone_map(sign * p[1]).expect("cone orbit");
        [a.u - d.u, a.du - d.du]
    };
    let scale = [c0.max(1.0), b0.abs().max(1.0)];
    let ((c, b_mag), _res) = newton2d(f, [c0, b0.abs()], scale, 1e-9, 60)
        .map(|(p, r)| ((p[0], p[1]), r))?;
    let b = sign * b_mag;

    let a = center_map(c)?;
    let d = cone_map(b)?;
    let residual = ((a.u - d.u).abs() / (1.0 + a.u.abs()))
        .max((a.du - d.du).abs() / (1.0 + a.du.abs()));

    let n = glued_zero_count(c, b)?;
    if n != expected_n {
        return Err(PolarError::WrongNodalClass { expected: expected_n, found: n });
    }
    Ok(NodalIntersection { k, branch, n, c, b, residual })
}

/// Equation residual of the glued solution near rho_0, via the dense
/// interpolant derivative (no finite differencing).
pub fn glued_equation_residual(c: Scalar, b: Scalar) -> Result<Scalar, PolarError> {
    let rho0 = rho_match();
    let residual_of = |traj: &Trajectory<Scalar>, rho: Scalar| -> Scalar {
        let y = traj.eval(rho);
        let dy = traj.eval_deriv(rho);
        let r = (1.0 - rho * rho) * dy[1] + (2.0 / rho - 4.0 * rho) * y[1] - 2.0 * y[0]
            + y[0].powi(3);
        r.abs() / (1.0 + y[0].abs().powi(3))
    };
    let start = rho_series_center(c, center_delta(c))?;
    let p = Problem::new(&exterior::rho_rhs, start.rho, rho0, vec![start.u, start.du]);
    let center = ode::integrate(&p, &Options::with_tols(1e-11, 1e-12), &[])?;
    let start = rho_series_cone(b, cone_delta(b), ConeSide::Inner)?;
    let p = Problem::new(&exterior::rho_rhs, start.rho, rho0, vec![start.u, start.du]);
    let cone = ode::integrate(&p, &Options::with_tols(1e-11, 1e-12), &[])?;
    let mut worst = 0.0 as Scalar;
    let lo = (rho0 - 0.2).max(center.span().0);
    let hi = (rho0 + 0.2).min(cone.span().0);
    for i in 0..=40 {
        let rho = lo + (rho0 - lo) * i as Scalar / 40.0;
        worst = worst.max(residual_of(&center, rho));
        let rho = rho0 + (hi - rho0) * i as Scalar / 40.0;
        worst = worst.max(residual_of(&cone, rho));
    }
    Ok(worst)
}

/// H(rho) = (1 - rho^2) U'^2 / 2 - U^2 + U^4/4; decreasing then increasing
/// with the turn exactly at rho_0.
pub fn h_function(rho: Scalar, u: Scalar, du: Scalar) -> Scalar {
    0.5 * (1.0 - rho * rho) * du * du - u * u + 0.25 * u.powi(4)
}

/// Grid certificates for the qualitative lemmas behind the construction.
#[derive(Debug, Clone)]
pub struct LemmaReport {
    /// (parameter, radius at rho_0) for small c; radius must shrink to 0.
    pub small_c_radius: Vec<(Scalar, Scalar)>,
    pub small_b_radius: Vec<(Scalar, Scalar)>,
    /// max over sampled center orbits and rho of theta (must stay < pi/2).
    pub theta_sup: Scalar,
    /// min over sampled cone orbits (b > 0) of beta (must stay > -pi/2).
    pub beta_inf: Scalar,
    /// max over c in (0,2) center orbits of H(rho) - H(0) on (0, rho_0]
    /// (must be negative) and the worst H(0,c) (must be negative).
    pub h_excess_center: Scalar,
    pub h_at_center_max: Scalar,
    /// Same for cone orbits with b in (0,2) on [rho_0, 1).
    pub h_excess_cone: Scalar,
    pub h_at_cone_max: Scalar,
    /// max |angle at rho_0| over parameters in (0,2) (Lemma-4 window).
    pub small_parameter_angle_sup: Scalar,
    /// sup |dH/drho - (3 rho - 2/rho) U'^2| relative, along a sampled orbit.
    pub h_derivative_defect: Scalar,
    /// The bracketing frame (c_l, c_r, b_l, b_r) for index k.
    pub frame: (Scalar, Scalar, Scalar, Scalar),
    /// "-pi/2 > theta(rho_0, p) > -(2k+1) pi" checked with p ranging over
    /// (c_l, c_r) (the consistent reading) ...
    pub frame_sentence_c_reading: bool,
    /// ... and with p ranging over (b_l, b_r) (the literal reading).
    pub frame_sentence_b_reading: bool,
}

/// Evaluate the lemma monitors; `k` fixes the frame for the bracketing
/// sentence checks.
pub fn lemma_monitors(k: u32) -> Result<LemmaReport, PolarError> {
    let mut small_c_radius = Vec::new();
    let mut small_b_radius = Vec::new();
    for i in 0..6 {
        let p = 0.01 * (4.0f64).powi(i) / 10.0; // 1e-3 .. ~1
        small_c_radius.push((p, center_map(p)?.radius));
        small_b_radius.push((p, cone_map(p)?.radius));
    }

    // Angle bounds along whole orbits.
    let mut theta_sup = Scalar::NEG_INFINITY;
    let mut beta_inf = Scalar::INFINITY;
    for i in 1..=25 {
        let p = 2.0 * i as Scalar;
        let start = rho_series_center(p, center_delta(p))?;
        let theta0 = (start.du / start.u).atan();
        let traj = integrate_to_match(start.rho, start.u, start.du, theta0)?;
        for (_, y) in &traj.nodes {
            theta_sup = theta_sup.max(y[2]);
        }
        let start = rho_series_cone(p, cone_delta(p), ConeSide::Inner)?;
        let traj = integrate_to_match(start.rho, start.u, start.du, (start.du / start.u).atan())?;
        for (_, y) in &traj.nodes {
            beta_inf = beta_inf.min(y[2]);
        }
    }

    // H-function monotonicity window for parameters in (0, 2).
    let mut h_excess_center = Scalar::NEG_INFINITY;
    let mut h_at_center_max = Scalar::NEG_INFINITY;
    let mut h_excess_cone = Scalar::NEG_INFINITY;
    let mut h_at_cone_max = Scalar::NEG_INFINITY;
    let mut angle_sup = 0.0 as Scalar;
    let mut h_defect = 0.0 as Scalar;
    for i in 1..=9 {
        let p = 0.2 * i as Scalar + 0.1;
        let h0 = -p * p + 0.25 * p.powi(4);
        h_at_center_max = h_at_center_max.max(h0);
        let start = rho_series_center(p, center_delta(p))?;
        let theta0 = (start.du / start.u).atan();
        let traj = integrate_to_match(start.rho, start.u, start.du, theta0)?;
        let mut prev: Option<(Scalar, Scalar)> = None;
        for (rho, y) in &traj.nodes {
            let h = h_function(*rho, y[0], y[1]);
            h_excess_center = h_excess_center.max(h - h0);
            if let Some((r0, hp)) = prev {
                let mid = 0.5 * (r0 + rho);
                let ymid = traj.eval(mid);
                let formula = (3.0 * mid - 2.0 / mid) * ymid[1] * ymid[1];
                let fd = (h - hp) / (rho - r0);
                h_defect = h_defect.max((fd - formula).abs() / (1.0 + formula.abs()));
            }
            prev = Some((*rho, h));
        }
        let end = center_map(p)?;
        angle_sup = angle_sup.max(end.angle.abs());

        let h1 = -p * p + 0.25 * p.powi(4);
        h_at_cone_max = h_at_cone_max.max(h1);
        let start = rho_series_cone(p, cone_delta(p), ConeSide::Inner)?;
        let traj = integrate_to_match(start.rho, start.u, start.du, (start.du / start.u).atan())?;
        for (rho, y) in &traj.nodes {
            if *rho < 1.0 - 1e-3 {
                h_excess_cone = h_excess_cone.max(h_function(*rho, y[0], y[1]) - h1);
            }
        }
        let end = cone_map(p)?;
        angle_sup = angle_sup.max(end.angle.abs());
    }

    // Bracketing frame: c_l, c_r with theta(rho_0) = -pi/2, -(2k+1) pi and
    // b_l, b_r with beta(rho_0) = pi/2, (2k+1) pi.
    let odd_pi = (2 * k + 1) as Scalar * PI;
    let theta_at = |c: Scalar| center_map(c).expect("center orbit").angle;
    let beta_at = |b: Scalar| cone_map(b).expect("cone orbit").angle;
    let c_l = rootfind::brent(|c| theta_at(c) + PI / 2.0, 2.0, 400.0, 1e-8, 200)?;
    let c_r = rootfind::brent(|c| theta_at(c) + odd_pi, c_l, 2000.0, 1e-8, 200)?;
    let b_l = rootfind::brent(|b| beta_at(b) - PI / 2.0, 2.0, 100.0, 1e-8, 200)?;
    let b_r = rootfind::brent(|b| beta_at(b) - odd_pi, b_l, 400.0, 1e-8, 200)?;

    let inside = |lo: Scalar, hi: Scalar, eval: &dyn Fn(Scalar) -> Scalar| -> bool {
        (1..10).all(|i| {
            let p = lo + (hi - lo) * i as Scalar / 10.0;
            let th = eval(p);
            -odd_pi < th && th < -PI / 2.0
        })
    };
    let frame_sentence_c_reading = inside(c_l, c_r, &theta_at);
    let frame_sentence_b_reading = inside(b_l, b_r, &theta_at);

    Ok(LemmaReport {
        small_c_radius,
        small_b_radius,
        theta_sup,
        beta_inf,
        h_excess_center,
        h_at_center_max,
        h_excess_cone,
        h_at_cone_max,
        small_parameter_angle_sup: angle_sup,
        h_derivative_defect: h_defect,
        frame: (c_l, c_r, b_l, b_r),
        frame_sentence_c_reading,
        frame_sentence_b_reading,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn constant_orbit_maps_to_origin_angle() {
        let pt = center_map(2f64.sqrt()).unwrap();
        assert_abs_diff_eq!(pt.angle, 0.0, epsilon = 1e-10);
        assert_relative_eq!(pt.radius, 2f64.sqrt(), epsilon = 1e-10);
        let pt = cone_map(2f64.sqrt()).unwrap();
        assert_abs_diff_eq!(pt.angle, 0.0, epsilon = 1e-10);
        assert_relative_eq!(pt.radius, 2f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn small_parameters_stay_in_principal_range() {
        assert!(center_map(1.0).unwrap().angle.abs() < PI / 2.0);
        assert!(cone_map(1.0).unwrap().angle.abs() < PI / 2.0);
    }

    #[test]
    fn center_angle_decreases_without_bound() {
        let t10 = center_map(10.0).unwrap().angle;
        let t100 = center_map(100.0).unwrap().angle;
        assert!(t100 < t10 && t10 < -PI / 2.0, "t10 = {t10}, t100 = {t100}");
    }

    #[test]
    fn cone_angle_increases() {
        let b20 = cone_map(20.0).unwrap().angle;
        assert!(b20 > PI / 2.0, "beta(20) = {b20}");
    }

    #[test]
    fn angle_matches_arctan_mod_pi() {
        for &c in &[0.7, 3.0, 20.0] {
            let pt = center_map(c).unwrap();
            let principal = (pt.du / pt.u).atan();
            let diff = (pt.angle - principal) / PI;
            assert_abs_diff_eq!(diff, diff.round(), epsilon = 1e-8);
        }
    }

    #[test]
    fn ground_state_intersection() {
        let hit = find_intersection(0, Branch::Even).unwrap();
        assert_eq!(hit.n, 0);
        assert_relative_eq!(hit.c, 2f64.sqrt(), max_relative = 1e-6);
        assert_relative_eq!(hit.b, 2f64.sqrt(), max_relative = 1e-6);
        assert!(hit.residual < 1e-9);
    }

    #[test]
    fn first_odd_intersection_matches_spectrum() {
        let hit = find_intersection(0, Branch::Odd).unwrap();
        assert_eq!(hit.n, 1);
        let reference = spectrum::solution(1);
        assert_relative_eq!(hit.c, reference.c, max_relative = 1e-3);
        assert_relative_eq!(hit.b, reference.b, max_relative = 1e-3);
    }

    #[test]
    fn second_even_intersection_matches_spectrum() {
        let hit = find_intersection(1, Branch::Even).unwrap();
        assert_eq!(hit.n, 2);
        let reference = spectrum::solution(2);
        assert_relative_eq!(hit.c, reference.c, max_relative = 1e-3);
        assert_relative_eq!(hit.b, reference.b, max_relative = 1e-3);
    }

    #[test]
    fn glued_residual_small() {
        let hit = find_intersection(0, Branch::Odd).unwrap();
        let res = glued_equation_residual(hit.c, hit.b).unwrap();
        assert!(res < 1e-6, "residual {res}");
    }

    #[test]
    fn lemma_monitor_report() {
        let report = lemma_monitors(1).unwrap();
        // Radii shrink linearly with the parameter: in the linearized
        // regime r(rho_0, c)/c tends to a constant (~2.41).
        let r001 = center_map(0.01).unwrap().radius;
        assert!(r001 < 0.03, "r = {r001}");
        let r0001 = center_map(0.001).unwrap().radius;
        assert_relative_eq!(r0001 / 0.001, r001 / 0.01, max_relative = 1e-2);
        for w in report.small_c_radius.windows(2) {
            assert!(w[0].1 < w[1].1);
        }
        assert!(report.theta_sup < PI / 2.0);
        assert!(report.beta_inf > -PI / 2.0);
        assert!(report.h_excess_center < 0.0);
        assert!(report.h_at_center_max < 0.0);
        assert!(report.h_excess_cone < 0.0);
        assert!(report.h_at_cone_max < 0.0);
        assert!(report.small_parameter_angle_sup < PI / 2.0);
        assert!(report.h_derivative_defect < 1e-2);
        // H(0, 1) = -1 + 1/4.
        assert_abs_diff_eq!(h_function(0.0, 1.0, 0.0), -0.75, epsilon = 1e-15);
        // H' factor flips sign exactly at rho_0.
        let eps = 1e-9;
        let factor = |rho: f64| 3.0 * rho - 2.0 / rho;
        assert!(factor(rho_match() - eps) < 0.0 && factor(rho_match() + eps) > 0.0);
    }
}
