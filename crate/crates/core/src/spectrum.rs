//! The discrete family of regular solutions.
//!
//! Regular profiles are selected by the phase condition
//! Phi(c_n) = (n + 1/2) pi; the root is bracketed around the closed-form
//! prediction and refined by Brent's method. Each record carries the full
//! orbit, the limit b_n, the static energy and the verified nodal count.

use crate::asymptotics::{self, AsymptoticsError};
use crate::interior::{self, COrbitSummary, InteriorError};
use crate::rootfind::{self, RootError};
use crate::Scalar;
use std::f64::consts::PI;
use std::sync::OnceLock;
use thiserror::Error;

/// One regular self-similar solution.
#[derive(Debug, Clone)]
pub struct SelfSimilarSolution {
    /// Nodal index: number of interior zeros of the profile.
    pub n: u32,
    pub c: Scalar,
    pub b: Scalar,
    pub energy: Scalar,
    pub x_max: Scalar,
    pub orbit: COrbitSummary,
}

/// A table row pairing the computed solution with the closed-form
/// prediction and the relative deviations.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub solution: SelfSimilarSolution,
    pub c_predicted: Scalar,
    pub b_predicted: Scalar,
    pub c_deviation: Scalar,
    pub b_deviation: Scalar,
}

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("no phase bracket found for n = {n}; scanned {} points", scan.len())]
    BracketFailure { n: u32, target: Scalar, scan: Vec<(Scalar, Scalar)> },
    #[error("converged root for n = {n} has {zeros_found} interior zeros (c = {c})")]
    WrongBranch { n: u32, c: Scalar, zeros_found: usize },
    #[error(transparent)]
    Interior(#[from] InteriorError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
}

const ORBIT_TOL: Scalar = 1e-11;

fn total_phase(c: Scalar) -> Result<Scalar, InteriorError> {
    Ok(interior::evolve_c_orbit(c, ORBIT_TOL)?.total_phase)
}

/// Locate c_n and assemble the full record; `tol` is the relative tolerance
/// on c_n.
pub fn find_c_n(n: u32, tol: Scalar) -> Result<SelfSimilarSolution, SpectrumError> {
    let target = (n as Scalar + 0.5) * PI;
    let (c_pred, _) = asymptotics::predict(n, asymptotics::constants());
    let g = |c: Scalar| total_phase(c).map(|p| p - target);

    // Bracket around the prediction, with a geometric scan as fallback.
    let mut bracket: Option<(Scalar, Scalar)> = None;
    let mut scan: Vec<(Scalar, Scalar)> = Vec::new();
    let lo = 0.7 * c_pred;
    let hi = 1.3 * c_pred;
    let glo = g(lo)?;
    let ghi = g(hi)?;
    scan.push((lo, glo));
    scan.push((hi, ghi));
    if glo * ghi <= 0.0 {
        bracket = Some((lo, hi));
    } else {
        let mut c_prev = 0.1;
        let mut g_prev = g(c_prev)?;
        scan.push((c_prev, g_prev));
        let c_end = 2.0 * c_pred;
        let steps = 60;
        let ratio = (c_end / c_prev).powf(1.0 / steps as Scalar);
        for _ in 0..steps {
            let c = c_prev * ratio;
            let gc = g(c)?;
            scan.push((c, gc));
            if g_prev * gc <= 0.0 && bracket.is_none() {
                bracket = Some((c_prev, c));
            }
            c_prev = c;
            g_prev = gc;
        }
    }
    let Some((a, b)) = bracket else {
        return Err(SpectrumError::BracketFailure { n, target, scan });
    };

    let c_root = rootfind::brent(
        |c| g(c).expect("phase evaluation inside bracket"),
        a,
        b,
        tol * c_pred,
        200,
    )?;

    let orbit = interior::evolve_c_orbit(c_root, ORBIT_TOL)?;
    let zeros = orbit.zero_count();
    if zeros != n as usize {
        return Err(SpectrumError::WrongBranch { n, c: c_root, zeros_found: zeros });
    }
    let energy = interior::static_energy(&orbit)?;
    Ok(SelfSimilarSolution {
        n,
        c: c_root,
        b: orbit.b_limit,
        energy,
        x_max: orbit.x_max,
        orbit,
    })
}

/// Rows n = 0..=n_max with predictions and deviations.
pub fn table(n_max: u32) -> Result<Vec<TableRow>, SpectrumError> {
    (0..=n_max)
        .map(|n| {
            let solution = find_c_n(n, 1e-11)?;
            let (c_predicted, b_predicted) = asymptotics::predict(n, asymptotics::constants());
            let c_deviation = (c_predicted / solution.c - 1.0).abs();
            let b_deviation = (b_predicted / solution.b - 1.0).abs();
            Ok(TableRow { solution, c_predicted, b_predicted, c_deviation, b_deviation })
        })
        .collect()
}

/// Cached solution records (tol 1e-11) for repeated downstream use.
pub fn solution(n: u32) -> &'static SelfSimilarSolution {
    const MAX_CACHED: usize = 11;
    static CACHE: [OnceLock<SelfSimilarSolution>; MAX_CACHED] =
        [const { OnceLock::new() }; MAX_CACHED];
    assert!((n as usize) < MAX_CACHED, "cached solutions cover n <= 10");
    CACHE[n as usize].get_or_init(|| find_c_n(n, 1e-11).expect("solution record"))
}

/// One sample of the existence-scan curve in the normalized chart
/// sigma = ((B + 8D)^2 + D^2)^(1/6).
#[derive(Debug, Clone, Copy)]
pub struct ScanPoint {
    pub c: Scalar,
    pub b_limit: Scalar,
    pub d_limit: Scalar,
    pub sigma: Scalar,
    pub b_bar: Scalar,
    pub d_bar: Scalar,
}

/// Evaluate the normalized (b_bar, d_bar) chart over a c-grid; negative c
/// uses the odd symmetry (B, D)(-c) = -(B, D)(c).
pub fn scan_points(cs: &[Scalar]) -> Result<Vec<ScanPoint>, SpectrumError> {
    cs.iter()
        .map(|&c| {
            let orbit = interior::evolve_c_orbit(c.abs(), ORBIT_TOL)?;
            let sign = if c < 0.0 { -1.0 } else { 1.0 };
            let b = sign * orbit.b_limit;
            let d = sign * orbit.d_limit;
            let u = b + 8.0 * d;
            let sigma = (u * u + d * d).powf(1.0 / 6.0);
            Ok(ScanPoint { c, b_limit: b, d_limit: d, sigma, b_bar: u / sigma, d_bar: d / sigma })
        })
        .collect()
}
