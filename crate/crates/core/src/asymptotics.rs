//! Large-n scaling constants and predictions.
//!
//! Profiles with many oscillations factor as f = a(x) v(t(x)) with
//! a = sinh^(1/3) and t' = sinh^(-2/3); v then obeys a cubic oscillator with
//! a small linear term that only matters near the ends of the t-interval.
//! Matching the inner (t -> 0) and outer (tbar -> 0) limits of that
//! oscillator yields closed-form predictions for c_n and b_n. This module
//! computes the six matching constants from scratch and applies them.


use crate::ode::{self, Options, Problem, Trajectory};
use crate::quad::{self, QuadError};
use crate::special::beta;
use crate::Scalar;
use std::sync::OnceLock;
use thiserror::Error;

/// The matching constants; `t_len` and `tau` carry the quadrature route,
/// their `_beta` twins the Gamma/Beta closed forms.
#[derive(Debug, Clone)]
pub struct AsymptoticConstants {
    /// Length T of the t-interval image of [0, inf).
    pub t_len: Scalar,
    pub t_len_beta: Scalar,
    /// Period of the unit-amplitude cubic oscillator.
    pub tau: Scalar,
    pub tau_beta: Scalar,
    /// Inner amplitude and phase shift.
    pub a0: Scalar,
    pub theta0: Scalar,
    /// Outer amplitude and phase shift.
    pub a1: Scalar,
    pub theta1: Scalar,
}

#[derive(Debug, Error)]
pub enum AsymptoticsError {
    #[error("oscillator amplitude not converged: relative drift {drift} over one period")]
    NonConvergence { drift: Scalar },
    #[error("phase regression needs more zeros, found {0}")]
    TooFewZeros(usize),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Ode(#[from] ode::OdeError<Scalar>),
}

impl AsymptoticConstants {
    /// tau/2, -(theta0 + theta1), a0 * T: the literal constants of the
    /// closed-form prediction for c_n.
    pub fn prediction_literals(&self) -> (Scalar, Scalar, Scalar) {
        (self.tau / 2.0, -(self.theta0 + self.theta1), self.a0 * self.t_len)
    }

    /// (a0/a1)^3, the ratio linking b_n^2 to c_n.
    pub fn amplitude_ratio_cubed(&self) -> Scalar {
        (self.a0 / self.a1).powi(3)
    }

    pub fn t_route_discrepancy(&self) -> Scalar {
        (self.t_len - self.t_len_beta).abs()
    }

    pub fn tau_route_discrepancy(&self) -> Scalar {
        (self.tau - self.tau_beta).abs()
    }
}

/// Closed-form c and b predictions for index n.
pub fn predict(n: u32, k: &AsymptoticConstants) -> (Scalar, Scalar) {
    let (half_tau, minus_theta_sum, a0t) = k.prediction_literals();
    let c = ((half_tau * (n as Scalar + 1.0) + minus_theta_sum) / a0t).powi(3);
    let b_mag = (k.amplitude_ratio_cubed() * c).sqrt();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    (c, sign * b_mag)
}

fn inner_rhs(t: Scalar, y: &[Scalar], dy: &mut [Scalar]) {
    dy[0] = y[1];
    dy[1] = -y[0].powi(3) + 2.0 * y[0] / (t * t);
}

fn outer_rhs(t: Scalar, y: &[Scalar], dy: &mut [Scalar]) {
    dy[0] = y[1];
    dy[1] = -y[0].powi(3) - y[0] / (4.0 * t * t);
}

/// Up-crossing zeros of component 0, located on the dense output.
fn up_crossings(traj: &Trajectory<Scalar>, from: Scalar) -> Vec<Scalar> {
    let mut zeros = Vec::new();
    for w in traj.nodes.windows(2) {
        let (t0, y0) = (&w[0].0, &w[0].1);
        let (t1, y1) = (&w[1].0, &w[1].1);
        if *t1 < from || !(y0[0] < 0.0 && y1[0] >= 0.0) {
            continue;
        }
        let mut lo = *t0;
        let mut hi = *t1;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if traj.eval(mid)[0] < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 * hi.abs().max(1.0) {
                break;
            }
        }
        let z = 0.5 * (lo + hi);
        if traj.eval(z)[1] > 0.0 {
            zeros.push(z);
        }
    }
    zeros
}

/// Least squares with columns prescribed as closures of the sample index.
fn lsq(cols: &[Vec<Scalar>], rhs: &[Scalar]) -> Vec<Scalar> {
    let m = cols.len();
    let n = rhs.len();
    // Column scaling for conditioning.
    let scales: Vec<Scalar> = cols
        .iter()
        .map(|c| c.iter().fold(0.0 as Scalar, |s, &v| s.max(v.abs())).max(1e-300))
        .collect();
    let mut ata = vec![vec![0.0 as Scalar; m]; m];
    let mut atb = vec![0.0 as Scalar; m];
    for i in 0..m {
        for j in 0..m {
            let mut s = 0.0;
            for k in 0..n {
                s += cols[i][k] / scales[i] * (cols[j][k] / scales[j]);
            }
            ata[i][j] = s;
        }
        let mut s = 0.0;
        for k in 0..n {
            s += cols[i][k] / scales[i] * rhs[k];
        }
        atb[i] = s;
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..m {
        let piv = (col..m).max_by(|&a, &b| ata[a][col].abs().total_cmp(&ata[b][col].abs())).unwrap();
        ata.swap(col, piv);
        atb.swap(col, piv);
        for row in col + 1..m {
            let f = ata[row][col] / ata[col][col];
            for k in col..m {
                ata[row][k] -= f * ata[col][k];
            }
            atb[row] -= f * atb[col];
        }
    }
    let mut x = vec![0.0 as Scalar; m];
    for row in (0..m).rev() {
        let mut s = atb[row];
        for k in row + 1..m {
            s -= ata[row][k] * x[k];
        }
        x[row] = s / ata[row][row];
    }
    for i in 0..m {
        x[i] /= scales[i];
    }
    x
}

struct OscillatorFit {
    amplitude: Scalar,
    theta: Scalar,
    period_route_amplitude: Scalar,
    drift: Scalar,
}

/// Extract the asymptotic amplitude and phase of one oscillator run.
///
/// Amplitude comes from the cubic-oscillator energy e = v_dot^2/2 + v^4/4 at
/// the zeros of v (where e = v_dot^2/2 exactly), extrapolated to t = inf;
/// the phase comes from regressing the zero times t_k on their index, which
/// aligns v against the reference solution with a zero at the origin.
fn extract(traj: &Trajectory<Scalar>, tau: Scalar, tol: Scalar) -> Result<OscillatorFit, AsymptoticsError> {
    let zeros = up_crossings(traj, 150.0);
    if zeros.len() < 24 {
        return Err(AsymptoticsError::TooFewZeros(zeros.len()));
    }
    let energies: Vec<Scalar> = zeros
        .iter()
        .map(|&t| {
            let vdot = traj.eval(t)[1];
            0.5 * vdot * vdot
        })
        .collect();
    // e(t) = e_inf + O(1/t^2): fit a cubic in 1/t.
    let cols: Vec<Vec<Scalar>> = (0..4)
        .map(|p| zeros.iter().map(|&t| t.powi(-(p as i32))).collect())
        .collect();
    let e_fit = lsq(&cols, &energies);
    let e_inf = e_fit[0];
    let amplitude = (4.0 * e_inf).powf(0.25);

    let k = energies.len();
    let drift = ((energies[k - 1] - energies[k - 2]) / e_inf).abs() * 0.25;
    if drift > tol {
        return Err(AsymptoticsError::NonConvergence { drift });
    }

    // t_k = (tau/A) k - theta/A + p/t_k + q/t_k^2 + r/t_k^3.
    let mut cols: Vec<Vec<Scalar>> = Vec::new();
    cols.push(zeros.iter().enumerate().map(|(i, _)| i as Scalar).collect());
    for p in 0..4 {
        cols.push(zeros.iter().map(|&t| t.powi(-(p as i32))).collect());
    }
    let fit = lsq(&cols, &zeros);
    let slope = fit[0];
    let intercept = fit[1];
    let period_route_amplitude = tau / slope;
    let theta_raw = -intercept * period_route_amplitude;
    // Fold into (-tau/2, tau/2].
    let mut theta = theta_raw - tau * (theta_raw / tau).round();
    if theta <= -tau / 2.0 {
        theta += tau;
    }
    Ok(OscillatorFit { amplitude, theta, period_route_amplitude, drift })
}

fn oscillator_options() -> Options<Scalar> {
    Options::with_tols(1e-12, 1e-14)
}

const OSC_T_END: Scalar = 2400.0;

/// Compute all six constants. `tol` bounds the allowed residual amplitude
/// drift per period (the production default is 1e-8).
pub fn compute_constants(tol: Scalar) -> Result<AsymptoticConstants, AsymptoticsError> {
    let qtol = 1e-11;
    let t_len = quad::quadrature(
        |x: Scalar| x.sinh().powf(-2.0 / 3.0),
        0.0,
        Scalar::INFINITY,
        qtol,
    )?;
    let t_len_beta = 0.5 * beta(1.0 / 6.0, 1.0 / 3.0);
    // Period integral 4 sqrt(2) int_0^1 dz / sqrt(1 - z^4), folded so the
    // square-root singularity sits at the left endpoint; 1 - z^4 is factored
    // as u (1 + z + z^2 + z^3) to stay accurate for tiny u.
    let tau = 4.0
        * (2.0 as Scalar).sqrt()
        * quad::quadrature(
            |u: Scalar| {
                let z = 1.0 - u;
                (u * (1.0 + z + z * z + z * z * z)).sqrt().recip()
            },
            0.0,
            1.0,
            qtol,
        )?;
    let tau_beta = (2.0 as Scalar).sqrt() * beta(0.25, 0.5);

    // Inner problem: v -> t^2/9 as t -> 0.
    let t0: Scalar = 1e-4;
    let v0 = t0 * t0 / 9.0 - t0.powi(8) / 39366.0;
    let vd0 = 2.0 * t0 / 9.0 - 8.0 * t0.powi(7) / 39366.0;
    let p = Problem::new(&inner_rhs, t0, OSC_T_END, vec![v0, vd0]);
    let inner = ode::integrate(&p, &oscillator_options(), &[])?;
    let fit0 = extract(&inner, tau_beta, tol)?;

    // Outer problem: v -> sqrt(2/3) tbar^(1/2) as tbar -> 0.
    let s23 = (2.0f64 / 3.0).sqrt();
    let v0 = s23 * (t0.sqrt() - 2.0 / 27.0 * t0.powf(3.5) + t0.powf(6.5) / 243.0);
    let vd0 = s23 * (0.5 / t0.sqrt() - 7.0 / 27.0 * t0.powf(2.5) + 13.0 / 486.0 * t0.powf(5.5));
    let p = Problem::new(&outer_rhs, t0, OSC_T_END, vec![v0, vd0]);
    let outer = ode::integrate(&p, &oscillator_options(), &[])?;
    let fit1 = extract(&outer, tau_beta, tol)?;

    // The energy route and the zero-spacing route must deliver the same
    // amplitudes; a split signals an unconverged oscillator tail.
    for fit in [&fit0, &fit1] {
        let split = (fit.amplitude / fit.period_route_amplitude - 1.0).abs();
        if split > 1e-5 {
            return Err(AsymptoticsError::NonConvergence { drift: fit.drift.max(split) });
        }
    }

    Ok(AsymptoticConstants {
        t_len,
        t_len_beta,
        tau,
        tau_beta,
        a0: fit0.amplitude,
        theta0: fit0.theta,
        a1: fit1.amplitude,
        theta1: fit1.theta,
    })
}

/// Cached constants at the default drift tolerance.
pub fn constants() -> &'static AsymptoticConstants {
    static CACHE: OnceLock<AsymptoticConstants> = OnceLock::new();
    CACHE.get_or_init(|| compute_constants(1e-8).expect("asymptotic constants"))
}

/// The modulation chart: a(x) = sinh^(1/3) x, t(x) = int_0^x sinh^(-2/3),
/// and the residual linear coefficient h(x).
pub struct ModulationFrame {
    traj: Trajectory<Scalar>,
    x_lo: Scalar,
    x_hi: Scalar,
    pub t_total: Scalar,
}

impl ModulationFrame {
    pub fn new() -> Result<Self, AsymptoticsError> {
        let x_lo: Scalar = 1e-6;
        let x_hi = 40.0;
        let t_lo = 3.0 * x_lo.powf(1.0 / 3.0) - x_lo.powf(7.0 / 3.0) / 21.0;
        let rhs = |x: Scalar, _y: &[Scalar], dy: &mut [Scalar]| {
            dy[0] = x.sinh().powf(-2.0 / 3.0);
        };
        let p = Problem::new(&rhs, x_lo, x_hi, vec![t_lo]);
        let traj = ode::integrate(&p, &Options::with_tols(1e-12, 1e-13), &[])?;
        let t_end = traj.last_state().1[0];
        let t_total = t_end + 1.5 * x_hi.cosh().powf(-2.0 / 3.0);
        Ok(ModulationFrame { traj, x_lo, x_hi, t_total })
    }

    pub fn a(&self, x: Scalar) -> Scalar {
        x.sinh().powf(1.0 / 3.0)
    }

    pub fn t(&self, x: Scalar) -> Scalar {
        if x < self.x_lo {
            3.0 * x.powf(1.0 / 3.0) - x.powf(7.0 / 3.0) / 21.0
        } else if x > self.x_hi {
            self.t_total - 1.5 * x.cosh().powf(-2.0 / 3.0)
        } else {
            self.traj.eval(x)[0]
        }
    }

    /// Inverse of t(x) by bisection (t is strictly increasing).
    pub fn x_of_t(&self, t: Scalar) -> Scalar {
        let mut lo = 0.0;
        let mut hi = self.x_hi;
        if t >= self.t(hi) {
            // Invert the tail formula directly.
            let arg = 1.5 / (self.t_total - t);
            return arg.powf(1.5).acosh();
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.t(mid) < t {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-13 * hi.max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn h(&self, x: Scalar) -> Scalar {
        let sh = x.sinh();
        let ch = x.cosh();
        (3.0 * sh * sh - 2.0 * ch * ch) / (9.0 * sh.powf(2.0 / 3.0))
    }
}

/// Residual report of the factorization f = a(x) v(t(x)).
#[derive(Debug, Clone)]
pub struct ModulationReport {
    /// sup |v_ddot + v^3 + h v| over the core window, with v_ddot from a
    /// five-point stencil on a uniform t-grid.
    pub sup_residual: Scalar,
    pub window: (Scalar, Scalar),
    /// max |v| over the mid-interval, an estimate of the core amplitude.
    pub core_amplitude: Scalar,
}

/// Transform a profile into the oscillator chart and measure how well it
/// satisfies the reduced equation; differentiation is numerical on purpose
/// so the report is an independent consistency check.
pub fn modulation_decompose(
    orbit: &crate::interior::COrbitSummary,
    frame: &ModulationFrame,
) -> ModulationReport {
    let t_total = frame.t_total;
    let window = (0.5, t_total - 0.5);
    let dt = 0.01;
    let n = ((t_total - 0.2) / dt) as usize;
    let v_at = |t: Scalar| {
        let x = frame.x_of_t(t);
        orbit.f_at(x) / frame.a(x)
    };
    let mut sup = 0.0 as Scalar;
    let mut amp = 0.0 as Scalar;
    for i in 2..n - 2 {
        let t = 0.1 + i as Scalar * dt;
        if t >= t_total - 0.1 {
            break;
        }
        let v = v_at(t);
        if t > 0.15 * t_total && t < 0.6 * t_total {
            amp = amp.max(v.abs());
        }
        if t < window.0 || t > window.1 {
            continue;
        }
        let vm2 = v_at(t - 2.0 * dt);
        let vm1 = v_at(t - dt);
        let vp1 = v_at(t + dt);
        let vp2 = v_at(t + 2.0 * dt);
        let vdd = (-vm2 + 16.0 * vm1 - 30.0 * v + 16.0 * vp1 - vp2) / (12.0 * dt * dt);
        let x = frame.x_of_t(t);
        let res = vdd + v.powi(3) + frame.h(x) * v;
        sup = sup.max(res.abs());
    }
    ModulationReport { sup_residual: sup, window, core_amplitude: amp }
}
